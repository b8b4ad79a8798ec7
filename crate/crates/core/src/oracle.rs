//! Exact solvers used as ground truth for the learners.
//!
//! [`dp_optimal`] runs backward induction over `(remaining steps, state)`:
//! with an undiscounted positive reward the infinite-horizon Bellman operator
//! is not a contraction, but the finite horizon makes the recursion exact.
//! [`enumerate_paths`] checks the DP by brute force on tiny grids.
//!
//! Both only consider paths that reach the terminal cell. Returns are
//! accumulated from the last step backwards in both solvers so their
//! floating-point results agree bit for bit.

use crate::error::{Error, Result};
use crate::gridworld::{Action, GridWorld, StateId};

/// Largest grid [`enumerate_paths`] accepts.
pub const ENUMERATION_MAX_STATES: usize = 16;
/// Longest path [`enumerate_paths`] accepts.
pub const ENUMERATION_MAX_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct DpResult {
    /// Best terminal-reaching return, `-inf` when infeasible.
    pub optimal_return: f64,
    /// Visited cells from start to terminal; empty when infeasible.
    pub optimal_path: Vec<StateId>,
    pub actions: Vec<Action>,
    /// Steps taken by the optimal path.
    pub horizon_used: usize,
    pub feasible: bool,
}

/// Optimal return within the environment's own step budget.
pub fn dp_optimal(env: &GridWorld) -> DpResult {
    dp_optimal_within(env, env.max_steps())
}

/// Optimal return when at most `horizon` steps may be flown.
pub fn dp_optimal_within(env: &GridWorld, horizon: usize) -> DpResult {
    let n = env.n_states();
    let terminal = env.terminal();
    let mut best = Vec::with_capacity(horizon + 1);
    let mut layer = vec![f64::NEG_INFINITY; n];
    layer[terminal.0] = 0.0;
    best.push(layer);

    for t in 1..=horizon {
        let prev = &best[t - 1];
        let layer: Vec<f64> = (0..n)
            .map(|s| {
                if s == terminal.0 {
                    return 0.0;
                }
                Action::ALL
                    .iter()
                    .map(|&a| {
                        let out = env.step(StateId(s), a);
                        out.reward + prev[out.next_state.0]
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        best.push(layer);
    }

    let start = env.start();
    let optimal_return = best[horizon][start.0];
    if optimal_return == f64::NEG_INFINITY {
        return DpResult {
            optimal_return,
            optimal_path: Vec::new(),
            actions: Vec::new(),
            horizon_used: 0,
            feasible: false,
        };
    }

    let mut path = vec![start];
    let mut actions = Vec::new();
    let mut state = start;
    let mut t = horizon;
    while state != terminal {
        let target = best[t][state.0];
        let (action, next) = Action::ALL
            .iter()
            .find_map(|&a| {
                let out = env.step(state, a);
                (out.reward + best[t - 1][out.next_state.0] == target)
                    .then_some((a, out.next_state))
            })
            .expect("DP value must be attained by some action");
        actions.push(action);
        path.push(next);
        state = next;
        t -= 1;
    }
    DpResult {
        optimal_return,
        horizon_used: actions.len(),
        optimal_path: path,
        actions,
        feasible: true,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    /// Best terminal-reaching return, `-inf` when none exists.
    pub best_return: f64,
    pub best_path: Vec<StateId>,
    pub best_actions: Vec<Action>,
    /// Number of complete action sequences examined (each ends at the
    /// terminal cell or at `max_len`).
    pub sequences_examined: u64,
}

/// Exhaustive depth-first search over every action sequence of length at
/// most `max_len`.
pub fn enumerate_paths(env: &GridWorld, max_len: usize) -> Result<EnumerationResult> {
    if env.n_states() > ENUMERATION_MAX_STATES || max_len > ENUMERATION_MAX_LEN {
        return Err(Error::domain(format!(
            "enumeration refused: {} cells and length {max_len} exceed the limits of \
             {ENUMERATION_MAX_STATES} cells and length {ENUMERATION_MAX_LEN}",
            env.n_states()
        )));
    }
    let mut search = Search {
        env,
        max_len,
        actions: Vec::with_capacity(max_len),
        rewards: Vec::with_capacity(max_len),
        result: EnumerationResult {
            best_return: f64::NEG_INFINITY,
            best_path: Vec::new(),
            best_actions: Vec::new(),
            sequences_examined: 0,
        },
    };
    search.visit(env.start());
    Ok(search.result)
}

struct Search<'a> {
    env: &'a GridWorld,
    max_len: usize,
    actions: Vec<Action>,
    rewards: Vec<f64>,
    result: EnumerationResult,
}

impl Search<'_> {
    fn visit(&mut self, state: StateId) {
        if self.env.is_terminal(state) {
            self.result.sequences_examined += 1;
            let ret = self.rewards.iter().rev().fold(0.0, |acc, r| r + acc);
            if ret > self.result.best_return {
                self.result.best_return = ret;
                self.result.best_actions = self.actions.clone();
            }
            return;
        }
        if self.actions.len() == self.max_len {
            self.result.sequences_examined += 1;
            return;
        }
        for a in Action::ALL {
            let out = self.env.step(state, a);
            self.actions.push(a);
            self.rewards.push(out.reward);
            self.visit(out.next_state);
            self.actions.pop();
            self.rewards.pop();
        }
        if self.actions.is_empty() {
            self.result.best_path = trace(self.env, &self.result.best_actions);
        }
    }
}

fn trace(env: &GridWorld, actions: &[Action]) -> Vec<StateId> {
    if actions.is_empty() {
        return Vec::new();
    }
    let mut s = env.start();
    let mut path = vec![s];
    for &a in actions {
        s = env.step(s, a).next_state;
        path.push(s);
    }
    path
}
