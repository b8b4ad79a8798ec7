//! Tabular learners over the grid MDP.
//!
//! [`QirlAgent`] samples actions by collapsing a per-state probability
//! vector and reinforces the chosen entry multiplicatively while learning a
//! state-value table by TD(0). [`QLearningAgent`] is the classical baseline
//! with ε-greedy or Boltzmann exploration.

mod greedy;
mod qirl;
mod qlearning;
mod schedule;

use rand::RngCore;

use crate::error::Result;
use crate::gridworld::{Action, StateId, StepOutcome};

pub use greedy::{greedy_policy, GreedyRollout};
pub use qirl::{
    qirl_select, qirl_update, ActionPreferenceTable, QirlAgent, QirlConfig, ValueTable,
};
pub use qlearning::{ql_select, ql_update, QLearningAgent, QTable, MIN_TEMPERATURE};
pub use schedule::{ExplorationKind, ExplorationSchedule, LearningRate};

/// One observed environment transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: StateId,
    pub action: Action,
    pub reward: f64,
    pub next_state: StateId,
    pub boundary_hit: bool,
    /// `next_state` is the terminal cell.
    pub terminal: bool,
    /// The step budget ran out on this transition.
    pub truncated: bool,
}

impl Transition {
    pub fn new(state: StateId, action: Action, outcome: StepOutcome, truncated: bool) -> Self {
        Self {
            state,
            action,
            reward: outcome.reward,
            next_state: outcome.next_state,
            boundary_hit: outcome.boundary_hit,
            terminal: outcome.terminal,
            truncated,
        }
    }

    /// Whether the target bootstraps from the value of `next_state`.
    pub fn bootstraps(&self) -> bool {
        !(self.terminal || self.truncated)
    }
}

/// A learner that can be trained episode by episode.
pub trait Agent: Send {
    fn name(&self) -> &'static str;

    /// Called before the first step of episode `episode` (0-based).
    fn begin_episode(&mut self, episode: usize);

    fn select(&mut self, state: StateId, rng: &mut dyn RngCore) -> Result<Action>;

    fn update(&mut self, transition: &Transition) -> Result<()>;

    /// Deterministic exploitation choice and whether it was a tie.
    fn greedy_action(&self, state: StateId) -> (Action, bool);
}

/// First index of the maximum, plus whether another entry ties it.
pub(crate) fn argmax_first(row: &[f64; 4]) -> (usize, bool) {
    let mut best = 0;
    for k in 1..4 {
        if row[k] > row[best] {
            best = k;
        }
    }
    let tied = row
        .iter()
        .enumerate()
        .any(|(k, v)| k != best && *v == row[best]);
    (best, tied)
}
