use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{argmax_first, Agent, LearningRate, Transition};
use crate::error::{Error, Result};
use crate::gridworld::{Action, GridWorld, StateId};
use crate::quantum::{sample_index, NORM_TOLERANCE};

/// Per-state value estimates `V(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    v: Vec<f64>,
}

impl ValueTable {
    pub fn new(n_states: usize) -> Self {
        Self {
            v: vec![0.0; n_states],
        }
    }

    pub fn get(&self, s: StateId) -> f64 {
        self.v[s.0]
    }

    pub fn set(&mut self, s: StateId, value: f64) {
        self.v[s.0] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }
}

/// Per-state action probabilities ("AmpMem"), initialized uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionPreferenceTable {
    rows: Vec<[f64; 4]>,
}

impl ActionPreferenceTable {
    pub fn new(n_states: usize) -> Self {
        Self {
            rows: vec![[0.25; 4]; n_states],
        }
    }

    pub fn row(&self, s: StateId) -> &[f64; 4] {
        &self.rows[s.0]
    }

    /// Replaces a row after checking it is a probability vector.
    pub fn set_row(&mut self, s: StateId, row: [f64; 4]) -> Result<()> {
        check_row(&row, 0.0)?;
        self.rows[s.0] = row;
        Ok(())
    }

    pub fn rows(&self) -> &[[f64; 4]] {
        &self.rows
    }

    /// Checks the normalization and floor of row `s`.
    pub fn check(&self, s: StateId, p_floor: f64) -> Result<()> {
        check_row(&self.rows[s.0], p_floor)
    }
}

fn check_row(row: &[f64; 4], p_floor: f64) -> Result<()> {
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::domain(format!("row {row:?} sums to {sum}")));
    }
    if row
        .iter()
        .any(|p| !p.is_finite() || *p < p_floor || *p > 1.0)
    {
        return Err(Error::domain(format!(
            "row {row:?} has an entry outside [{p_floor}, 1]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QirlConfig {
    pub learning_rate: LearningRate,
    /// Always 1: the task is episodic and undiscounted.
    pub gamma: f64,
    /// Gain used when the move looks good.
    pub k_plus: f64,
    /// Gain used on a boundary hit or a negative TD error.
    pub k_minus: f64,
    /// Divides `R + V(s')` so exponents stay O(1).
    pub reward_scale: f64,
    /// Bound on the magnitude of the reinforcement exponent.
    pub exponent_clamp: f64,
    /// Smallest probability any action keeps.
    pub p_floor: f64,
}

impl QirlConfig {
    pub const DEFAULT_ALPHA: f64 = 0.1;

    /// Defaults scaled to `env`: `reward_scale` is the terminal bonus.
    pub fn for_env(env: &GridWorld) -> Self {
        Self {
            learning_rate: LearningRate::constant(Self::DEFAULT_ALPHA),
            gamma: 1.0,
            k_plus: 1.0,
            k_minus: -1.0,
            reward_scale: env.bonus(),
            exponent_clamp: 10.0,
            p_floor: 1e-4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.learning_rate.validate()?;
        let problems = [
            (self.gamma != 1.0, "gamma must be 1"),
            (
                !(self.k_plus > 0.0 && self.k_plus.is_finite()),
                "k_plus must be positive",
            ),
            (
                !(self.k_minus < 0.0 && self.k_minus.is_finite()),
                "k_minus must be negative",
            ),
            (
                !(self.reward_scale > 0.0 && self.reward_scale.is_finite()),
                "reward_scale must be positive",
            ),
            (
                !(self.exponent_clamp > 0.0 && self.exponent_clamp.is_finite()),
                "exponent_clamp must be positive",
            ),
            (
                !(0.0..=0.01).contains(&self.p_floor),
                "p_floor must lie in [0, 0.01]",
            ),
        ];
        match problems.iter().find(|(bad, _)| *bad) {
            Some((_, msg)) => Err(Error::domain(*msg)),
            None => Ok(()),
        }
    }
}

/// Samples an action with the probabilities stored for `state`.
pub fn qirl_select(
    prefs: &ActionPreferenceTable,
    state: StateId,
    rng: &mut dyn RngCore,
) -> Result<Action> {
    let k = sample_index(prefs.row(state), rng)?;
    Ok(Action::ALL[k])
}

/// What one QiRL update did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QirlStep {
    /// TD error computed before the value write.
    pub td_error: f64,
    /// Gain actually applied.
    pub gain: f64,
    /// Multiplier applied to the chosen action's probability.
    pub factor: f64,
}

/// TD(0) value update followed by multiplicative reinforcement of the
/// chosen action's probability and re-normalization of its row.
pub fn qirl_update(
    v: &mut ValueTable,
    prefs: &mut ActionPreferenceTable,
    t: &Transition,
    cfg: &QirlConfig,
    alpha: f64,
) -> Result<QirlStep> {
    if !t.reward.is_finite() {
        return Err(Error::domain(format!("non-finite reward {}", t.reward)));
    }
    let next_value = |v: &ValueTable| {
        if t.bootstraps() {
            v.get(t.next_state)
        } else {
            0.0
        }
    };

    let td_error = t.reward + cfg.gamma * next_value(v) - v.get(t.state);
    v.set(t.state, v.get(t.state) + alpha * td_error);

    let gain = if t.boundary_hit || td_error < 0.0 {
        cfg.k_minus
    } else {
        cfg.k_plus
    };
    let exponent = (gain * (t.reward + next_value(v)) / cfg.reward_scale)
        .clamp(-cfg.exponent_clamp, cfg.exponent_clamp);
    let factor = exponent.exp();

    let row = &mut prefs.rows[t.state.0];
    row[t.action.index()] *= factor;
    normalize(row);
    apply_floor(row, cfg.p_floor);

    Ok(QirlStep {
        td_error,
        gain,
        factor,
    })
}

fn normalize(row: &mut [f64; 4]) {
    let sum: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= sum);
}

/// Raises entries below `floor` to exactly `floor` and rescales the rest
/// so the row still sums to one.
fn apply_floor(row: &mut [f64; 4], floor: f64) {
    if floor <= 0.0 {
        return;
    }
    let mut pinned = [false; 4];
    loop {
        let newly: Vec<usize> = (0..4).filter(|&k| !pinned[k] && row[k] < floor).collect();
        if newly.is_empty() {
            break;
        }
        newly.iter().for_each(|&k| pinned[k] = true);
        let pinned_count = pinned.iter().filter(|p| **p).count();
        let free_mass = 1.0 - floor * pinned_count as f64;
        let free_sum: f64 = (0..4).filter(|&k| !pinned[k]).map(|k| row[k]).sum();
        for k in 0..4 {
            row[k] = if pinned[k] {
                floor
            } else {
                row[k] * free_mass / free_sum
            };
        }
    }
}

/// The QiRL learner: collapse-based selection over [`ActionPreferenceTable`]
/// and TD(0) state values.
#[derive(Debug, Clone)]
pub struct QirlAgent {
    values: ValueTable,
    prefs: ActionPreferenceTable,
    cfg: QirlConfig,
    alpha: f64,
}

impl QirlAgent {
    pub fn new(n_states: usize, cfg: QirlConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            values: ValueTable::new(n_states),
            prefs: ActionPreferenceTable::new(n_states),
            alpha: cfg.learning_rate.at(0),
            cfg,
        })
    }

    pub fn values(&self) -> &ValueTable {
        &self.values
    }

    pub fn preferences(&self) -> &ActionPreferenceTable {
        &self.prefs
    }

    pub fn preferences_mut(&mut self) -> &mut ActionPreferenceTable {
        &mut self.prefs
    }

    pub fn config(&self) -> &QirlConfig {
        &self.cfg
    }

    /// Update that also reports the applied gain and factor.
    pub fn update_detailed(&mut self, t: &Transition) -> Result<QirlStep> {
        qirl_update(&mut self.values, &mut self.prefs, t, &self.cfg, self.alpha)
    }
}

impl Agent for QirlAgent {
    fn name(&self) -> &'static str {
        "qirl"
    }

    fn begin_episode(&mut self, episode: usize) {
        self.alpha = self.cfg.learning_rate.at(episode);
    }

    fn select(&mut self, state: StateId, rng: &mut dyn RngCore) -> Result<Action> {
        qirl_select(&self.prefs, state, rng)
    }

    fn update(&mut self, t: &Transition) -> Result<()> {
        self.update_detailed(t).map(|_| ())
    }

    fn greedy_action(&self, state: StateId) -> (Action, bool) {
        let (k, tied) = argmax_first(self.prefs.row(state));
        (Action::ALL[k], tied)
    }
}
