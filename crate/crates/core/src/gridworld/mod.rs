//! Deterministic episodic grid MDP over the channel model.
//!
//! The feasible area is split into `n1 × n2` square cells of side `V·T`.
//! Cell `(i, j)` has its center at `origin + (i·cell_size, j·cell_size)` and
//! the UAV flies at a fixed altitude. Entering a cell earns the sum uplink
//! rate at its center, entering the terminal cell earns the bonus
//! `R̂ = 10 · max_s R[s]`, and moving off the grid rebounds the UAV in place
//! with the boundary penalty (zero by default).
//!
//! States are flattened as `id = j · n1 + i`.

mod layout;

use std::fmt;

use crate::channel::{self, CarrierConfig, GroundUser, Position3};
use crate::error::{Error, Result};

pub(crate) use layout::line_of as layout_line_of;
pub use layout::{load_layout, parse_layout, Layout};

/// Multiplier applied to the best cell reward to form the terminal bonus.
pub const TERMINAL_BONUS_FACTOR: f64 = 10.0;

/// The four movement options, in eigenaction basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    /// `j + 1`
    Forward,
    /// `j − 1`
    Backward,
    /// `i − 1`
    Left,
    /// `i + 1`
    Right,
}

impl Action {
    pub const ALL: [Action; 4] = [
        Action::Forward,
        Action::Backward,
        Action::Left,
        Action::Right,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Action> {
        Self::ALL.get(index).copied()
    }

    /// Cell displacement `(di, dj)`.
    pub fn displacement(self) -> (i64, i64) {
        match self {
            Action::Forward => (0, 1),
            Action::Backward => (0, -1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Action::Forward => "forward",
            Action::Backward => "backward",
            Action::Left => "left",
            Action::Right => "right",
        };
        f.write_str(name)
    }
}

/// Flattened cell index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Cell coordinates `(i, j)` with `i` along x and `j` along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.i.abs_diff(other.i) + self.j.abs_diff(other.j)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    /// Cell side in meters, equal to speed times slot length.
    pub cell_size: f64,
    /// Center of cell `(0, 0)`; the z component is ignored.
    pub origin: Position3,
    pub altitude: f64,
}

/// Where per-cell rewards come from.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardSource {
    /// Sum uplink rate at each cell center.
    Channel,
    /// Every cell earns the same reward.
    Constant(f64),
    /// Explicit per-state rewards indexed by [`StateId`].
    Table(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub grid: GridSpec,
    pub users: Vec<GroundUser>,
    pub carrier: CarrierConfig,
    pub start: Cell,
    pub terminal: Cell,
    /// Step budget, `floor(E / T)`.
    pub max_steps: usize,
    /// Total available bandwidth `B` in hertz.
    pub total_bandwidth: f64,
    pub rewards: RewardSource,
    /// Reward for an off-grid move.
    pub boundary_penalty: f64,
}

/// The configuration entry a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigField {
    GridSize,
    CellSize,
    Altitude,
    Origin,
    Start,
    Terminal,
    MaxSteps,
    TotalBandwidth,
    Users,
    Rewards,
    BoundaryPenalty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigViolation {
    pub field: ConfigField,
    pub message: String,
}

impl ConfigViolation {
    fn new(field: ConfigField, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

impl EnvConfig {
    /// Checks every environment invariant, reporting the first violation.
    pub fn validate(&self) -> std::result::Result<(), ConfigViolation> {
        use ConfigField::*;
        let g = &self.grid;
        if g.n1 < 2 || g.n2 < 2 {
            return Err(ConfigViolation::new(
                GridSize,
                format!("grid must be at least 2x2, got {}x{}", g.n1, g.n2),
            ));
        }
        if !(g.cell_size.is_finite() && g.cell_size > 0.0) {
            return Err(ConfigViolation::new(
                CellSize,
                format!("cell_size must be positive, got {}", g.cell_size),
            ));
        }
        if !(g.altitude.is_finite() && g.altitude > 0.0) {
            return Err(ConfigViolation::new(
                Altitude,
                format!("altitude must be positive, got {}", g.altitude),
            ));
        }
        if !(g.origin.x.is_finite() && g.origin.y.is_finite()) {
            return Err(ConfigViolation::new(Origin, "origin must be finite"));
        }
        let inside = |c: Cell| c.i < g.n1 && c.j < g.n2;
        if !inside(self.start) {
            return Err(ConfigViolation::new(
                Start,
                format!(
                    "start cell {} lies outside the {}x{} grid",
                    self.start, g.n1, g.n2
                ),
            ));
        }
        if !inside(self.terminal) {
            return Err(ConfigViolation::new(
                Terminal,
                format!(
                    "terminal cell {} lies outside the {}x{} grid",
                    self.terminal, g.n1, g.n2
                ),
            ));
        }
        if self.start == self.terminal {
            return Err(ConfigViolation::new(
                Terminal,
                "terminal cell must differ from the start cell",
            ));
        }
        let min_steps = self.start.manhattan(self.terminal);
        if self.max_steps < min_steps {
            return Err(ConfigViolation::new(
                MaxSteps,
                format!(
                    "max_steps {} is below the start-to-terminal Manhattan distance {min_steps}",
                    self.max_steps
                ),
            ));
        }
        if !(self.total_bandwidth.is_finite() && self.total_bandwidth > 0.0) {
            return Err(ConfigViolation::new(
                TotalBandwidth,
                format!(
                    "total_bandwidth must be positive, got {}",
                    self.total_bandwidth
                ),
            ));
        }
        let used: f64 = self.users.iter().map(GroundUser::bandwidth).sum();
        if used > self.total_bandwidth {
            return Err(ConfigViolation::new(
                TotalBandwidth,
                format!(
                    "users occupy {used} Hz but total_bandwidth is only {} Hz",
                    self.total_bandwidth
                ),
            ));
        }
        if !self.boundary_penalty.is_finite() {
            return Err(ConfigViolation::new(
                BoundaryPenalty,
                "boundary_penalty must be finite",
            ));
        }
        match &self.rewards {
            RewardSource::Channel if self.users.is_empty() => {
                return Err(ConfigViolation::new(
                    Users,
                    "channel rewards need at least one ground user",
                ));
            }
            RewardSource::Channel => {}
            RewardSource::Constant(r) => {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(ConfigViolation::new(
                        Rewards,
                        format!("constant reward must be positive, got {r}"),
                    ));
                }
            }
            RewardSource::Table(t) => {
                let n = g.n1 * g.n2;
                if t.len() != n {
                    return Err(ConfigViolation::new(
                        Rewards,
                        format!("reward table has {} entries, grid has {n} cells", t.len()),
                    ));
                }
                if t.iter().any(|r| !r.is_finite() || *r < 0.0) {
                    return Err(ConfigViolation::new(
                        Rewards,
                        "reward table entries must be finite and non-negative",
                    ));
                }
                if !t.iter().any(|r| *r > 0.0) {
                    return Err(ConfigViolation::new(
                        Rewards,
                        "reward table needs at least one positive entry",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Result of one environment transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next_state: StateId,
    pub reward: f64,
    pub boundary_hit: bool,
    pub terminal: bool,
}

/// Immutable environment with precomputed per-cell rewards.
#[derive(Debug, Clone)]
pub struct GridWorld {
    config: EnvConfig,
    rewards: Vec<f64>,
    bonus: f64,
}

impl GridWorld {
    pub fn build(config: EnvConfig) -> Result<Self> {
        config
            .validate()
            .map_err(|v| Error::config(None, v.message))?;
        let n = config.grid.n1 * config.grid.n2;
        let rewards = match &config.rewards {
            RewardSource::Constant(r) => vec![*r; n],
            RewardSource::Table(t) => t.clone(),
            RewardSource::Channel => (0..n)
                .map(|s| {
                    let p = center_of(&config.grid, StateId(s));
                    channel::sum_rate(&p, &config.users, &config.carrier)
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let best = rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            config,
            rewards,
            bonus: TERMINAL_BONUS_FACTOR * best,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn n1(&self) -> usize {
        self.config.grid.n1
    }

    pub fn n2(&self) -> usize {
        self.config.grid.n2
    }

    pub fn n_states(&self) -> usize {
        self.rewards.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.n_states()).map(StateId)
    }

    pub fn start(&self) -> StateId {
        self.state_of(self.config.start)
    }

    pub fn terminal(&self) -> StateId {
        self.state_of(self.config.terminal)
    }

    pub fn max_steps(&self) -> usize {
        self.config.max_steps
    }

    /// Terminal bonus `R̂`.
    pub fn bonus(&self) -> f64 {
        self.bonus
    }

    /// Reward for entering `state` (the bonus is not included).
    pub fn reward(&self, state: StateId) -> f64 {
        self.rewards[state.0]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn is_terminal(&self, state: StateId) -> bool {
        state == self.terminal()
    }

    pub fn state_of(&self, cell: Cell) -> StateId {
        debug_assert!(cell.i < self.n1() && cell.j < self.n2());
        StateId(cell.j * self.n1() + cell.i)
    }

    pub fn cell_of(&self, state: StateId) -> Cell {
        Cell::new(state.0 % self.n1(), state.0 / self.n1())
    }

    pub fn cell_center(&self, state: StateId) -> Result<Position3> {
        if state.0 >= self.n_states() {
            return Err(Error::domain(format!(
                "state {} out of range for {} cells",
                state.0,
                self.n_states()
            )));
        }
        Ok(center_of(&self.config.grid, state))
    }

    /// Cell reached by `action`, or `None` when it would leave the grid.
    pub fn neighbor(&self, state: StateId, action: Action) -> Option<StateId> {
        let cell = self.cell_of(state);
        let (di, dj) = action.displacement();
        let i = cell.i.checked_add_signed(di as isize)?;
        let j = cell.j.checked_add_signed(dj as isize)?;
        (i < self.n1() && j < self.n2()).then(|| self.state_of(Cell::new(i, j)))
    }

    pub fn step(&self, state: StateId, action: Action) -> StepOutcome {
        match self.neighbor(state, action) {
            None => StepOutcome {
                next_state: state,
                reward: self.config.boundary_penalty,
                boundary_hit: true,
                terminal: false,
            },
            Some(next) if self.is_terminal(next) => StepOutcome {
                next_state: next,
                reward: self.bonus,
                boundary_hit: false,
                terminal: true,
            },
            Some(next) => StepOutcome {
                next_state: next,
                reward: self.rewards[next.0],
                boundary_hit: false,
                terminal: false,
            },
        }
    }

    /// Replays `actions` from the start cell and sums the rewards, stopping at
    /// the terminal cell or the step budget.
    pub fn replay_return(&self, actions: &[Action]) -> f64 {
        let mut state = self.start();
        let mut total = 0.0;
        for &a in actions.iter().take(self.max_steps()) {
            let out = self.step(state, a);
            total += out.reward;
            state = out.next_state;
            if out.terminal {
                break;
            }
        }
        total
    }
}

fn center_of(grid: &GridSpec, state: StateId) -> Position3 {
    let i = state.0 % grid.n1;
    let j = state.0 / grid.n1;
    Position3 {
        x: grid.origin.x + i as f64 * grid.cell_size,
        y: grid.origin.y + j as f64 * grid.cell_size,
        z: grid.altitude,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn synthetic(
        n1: usize,
        n2: usize,
        rewards: RewardSource,
        start: Cell,
        terminal: Cell,
        max_steps: usize,
    ) -> EnvConfig {
        EnvConfig {
            grid: GridSpec {
                n1,
                n2,
                cell_size: 20.0,
                origin: Position3 {
                    x: 10.0,
                    y: 10.0,
                    z: 0.0,
                },
                altitude: 100.0,
            },
            users: vec![],
            carrier: CarrierConfig::new(2.0e9).unwrap(),
            start,
            terminal,
            max_steps,
            total_bandwidth: 10.0e6,
            rewards,
            boundary_penalty: 0.0,
        }
    }

    fn reference_grid_with(users: Vec<GroundUser>) -> EnvConfig {
        EnvConfig {
            users,
            rewards: RewardSource::Channel,
            ..synthetic(
                10,
                10,
                RewardSource::Channel,
                Cell::new(0, 9),
                Cell::new(9, 0),
                900,
            )
        }
    }

    fn five_users() -> Vec<GroundUser> {
        [
            (30.0, 150.0),
            (70.0, 70.0),
            (130.0, 130.0),
            (170.0, 50.0),
            (110.0, 30.0),
        ]
        .iter()
        .map(|&(x, y)| GroundUser::new(x, y, 1.0, 1.0, 2.0e6).unwrap())
        .collect()
    }

    #[test]
    fn cell_centers_match_start_and_destination() {
        let env = GridWorld::build(reference_grid_with(five_users())).unwrap();
        let c = |i, j| env.cell_center(env.state_of(Cell::new(i, j))).unwrap();
        assert_eq!(
            c(0, 0),
            Position3 {
                x: 10.0,
                y: 10.0,
                z: 100.0
            }
        );
        assert_eq!(
            c(9, 0),
            Position3 {
                x: 190.0,
                y: 10.0,
                z: 100.0
            }
        );
        assert_eq!(
            c(0, 9),
            Position3 {
                x: 10.0,
                y: 190.0,
                z: 100.0
            }
        );
        assert_eq!(env.cell_center(env.terminal()).unwrap(), c(9, 0));
        assert_eq!(env.cell_center(env.start()).unwrap(), c(0, 9));
        assert!(env.cell_center(StateId(100)).is_err());
    }

    #[test]
    fn reward_table_matches_direct_channel_evaluation() {
        let env = GridWorld::build(reference_grid_with(five_users())).unwrap();
        assert_eq!(env.n_states(), 100);
        for s in env.states() {
            let p = env.cell_center(s).unwrap();
            let direct = channel::sum_rate(&p, &env.config().users, &env.config().carrier).unwrap();
            assert!(env.reward(s) > 0.0);
            assert!(((env.reward(s) - direct) / direct).abs() < 1e-12);
        }
    }

    #[test]
    fn bonus_is_ten_times_best_cell() {
        let cfg = EnvConfig {
            grid: GridSpec {
                n1: 2,
                n2: 2,
                ..reference_grid_with(vec![]).grid
            },
            users: vec![GroundUser::new(12.0, 25.0, 1.0, 1.0, 2.0e6).unwrap()],
            rewards: RewardSource::Channel,
            ..synthetic(
                2,
                2,
                RewardSource::Channel,
                Cell::new(0, 0),
                Cell::new(1, 1),
                4,
            )
        };
        let env = GridWorld::build(cfg).unwrap();
        let best = env.rewards().iter().copied().fold(0.0, f64::max);
        assert_eq!(env.bonus(), 10.0 * best);

        let uniform = GridWorld::build(synthetic(
            3,
            3,
            RewardSource::Constant(1.0),
            Cell::new(0, 0),
            Cell::new(2, 2),
            4,
        ))
        .unwrap();
        assert_eq!(uniform.bonus(), 10.0);
    }

    #[test]
    fn step_rules() {
        let rewards: Vec<f64> = (0..25).map(|s| 1.0 + s as f64).collect();
        let env = GridWorld::build(synthetic(
            5,
            5,
            RewardSource::Table(rewards),
            Cell::new(0, 0),
            Cell::new(4, 4),
            8,
        ))
        .unwrap();

        let corner = env.state_of(Cell::new(0, 0));
        let out = env.step(corner, Action::Left);
        assert_eq!(out.next_state, corner);
        assert_eq!(out.reward, 0.0);
        assert!(out.boundary_hit && !out.terminal);
        assert!(env.step(corner, Action::Backward).boundary_hit);

        let interior = env.state_of(Cell::new(2, 2));
        let out = env.step(interior, Action::Right);
        assert_eq!(out.next_state, env.state_of(Cell::new(3, 2)));
        assert_eq!(out.reward, env.reward(out.next_state));
        assert!(!out.boundary_hit && !out.terminal);
        assert_eq!(
            env.step(interior, Action::Forward).next_state,
            env.state_of(Cell::new(2, 3))
        );
        assert_eq!(
            env.step(interior, Action::Backward).next_state,
            env.state_of(Cell::new(2, 1))
        );
        assert_eq!(
            env.step(interior, Action::Left).next_state,
            env.state_of(Cell::new(1, 2))
        );

        let near = env.state_of(Cell::new(3, 4));
        let out = env.step(near, Action::Right);
        assert_eq!(out.next_state, env.terminal());
        assert_eq!(out.reward, env.bonus());
        assert!(out.terminal);
    }

    #[test]
    fn boundary_penalty_is_configurable() {
        let mut cfg = synthetic(
            3,
            3,
            RewardSource::Constant(1.0),
            Cell::new(0, 0),
            Cell::new(2, 2),
            4,
        );
        cfg.boundary_penalty = -0.5;
        let env = GridWorld::build(cfg).unwrap();
        assert_eq!(env.step(env.start(), Action::Left).reward, -0.5);
    }

    #[test]
    fn terminal_reachable_within_perimeter_budget() {
        let env = GridWorld::build(reference_grid_with(five_users())).unwrap();
        // BFS distance from the terminal over the reversible move graph
        let mut dist = vec![usize::MAX; env.n_states()];
        let mut queue = std::collections::VecDeque::from([env.terminal()]);
        dist[env.terminal().0] = 0;
        while let Some(s) = queue.pop_front() {
            for a in Action::ALL {
                if let Some(n) = env.neighbor(s, a) {
                    if dist[n.0] == usize::MAX {
                        dist[n.0] = dist[s.0] + 1;
                        queue.push_back(n);
                    }
                }
            }
        }
        assert!(dist.iter().all(|&d| d <= env.n1() + env.n2()));
    }

    #[test]
    fn invalid_configs_name_the_violation() {
        let base = || {
            synthetic(
                3,
                3,
                RewardSource::Constant(1.0),
                Cell::new(0, 0),
                Cell::new(2, 2),
                4,
            )
        };
        let field = |cfg: EnvConfig| cfg.validate().unwrap_err().field;

        let mut c = base();
        c.terminal = c.start;
        assert_eq!(field(c), ConfigField::Terminal);

        let mut c = base();
        c.start = Cell::new(3, 0);
        assert_eq!(field(c), ConfigField::Start);

        let mut c = base();
        c.max_steps = 3;
        assert_eq!(field(c), ConfigField::MaxSteps);

        let mut c = base();
        c.grid.n2 = 1;
        assert_eq!(field(c), ConfigField::GridSize);

        let mut c = base();
        c.users = (0..6)
            .map(|k| GroundUser::new(k as f64, 0.0, 1.0, 1.0, 2.0e6).unwrap())
            .collect();
        assert_eq!(field(c), ConfigField::TotalBandwidth);

        let mut c = base();
        c.rewards = RewardSource::Channel;
        assert_eq!(field(c), ConfigField::Users);

        let mut c = base();
        c.rewards = RewardSource::Table(vec![1.0; 8]);
        assert_eq!(field(c), ConfigField::Rewards);

        let mut c = base();
        c.max_steps = 3;
        let err = GridWorld::build(c).unwrap_err();
        assert!(err.to_string().contains("max_steps"), "{err}");
    }

    #[test]
    fn replay_stops_at_terminal_and_budget() {
        let env = GridWorld::build(synthetic(
            3,
            3,
            RewardSource::Constant(1.0),
            Cell::new(0, 0),
            Cell::new(2, 2),
            4,
        ))
        .unwrap();
        use Action::*;
        assert_eq!(
            env.replay_return(&[Right, Right, Forward, Forward, Left]),
            13.0
        );
        assert_eq!(env.replay_return(&[Left, Left, Left, Left, Right]), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn step_is_deterministic_and_consistent(s in 0usize..25, a in 0usize..4) {
                let rewards: Vec<f64> = (0..25).map(|s| 0.5 + (s * 7 % 11) as f64).collect();
                let env = GridWorld::build(synthetic(
                    5, 5, RewardSource::Table(rewards), Cell::new(0, 4), Cell::new(4, 0), 10,
                )).unwrap();
                let action = Action::from_index(a).unwrap();
                let first = env.step(StateId(s), action);
                prop_assert_eq!(first, env.step(StateId(s), action));
                if first.boundary_hit {
                    prop_assert_eq!(first.next_state, StateId(s));
                    prop_assert_eq!(first.reward, 0.0);
                }
                if first.terminal {
                    prop_assert_eq!(first.next_state, env.terminal());
                }
            }
        }
    }
}
