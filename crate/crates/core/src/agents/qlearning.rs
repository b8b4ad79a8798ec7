use rand::{Rng, RngCore};

use super::{argmax_first, Agent, ExplorationKind, ExplorationSchedule, Transition};
use crate::error::{Error, Result};
use crate::gridworld::{Action, StateId};
use crate::quantum::sample_index;

/// Smallest Boltzmann temperature accepted.
pub const MIN_TEMPERATURE: f64 = 1e-12;

/// Per-(state, action) values, initialized to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    q: Vec<[f64; 4]>,
}

impl QTable {
    pub fn new(n_states: usize) -> Self {
        Self {
            q: vec![[0.0; 4]; n_states],
        }
    }

    pub fn row(&self, s: StateId) -> &[f64; 4] {
        &self.q[s.0]
    }

    pub fn get(&self, s: StateId, a: Action) -> f64 {
        self.q[s.0][a.index()]
    }

    pub fn set(&mut self, s: StateId, a: Action, value: f64) {
        self.q[s.0][a.index()] = value;
    }

    pub fn max(&self, s: StateId) -> f64 {
        self.q[s.0]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// ε-greedy or Boltzmann action choice with the schedule value at `episode`.
pub fn ql_select(
    q: &QTable,
    state: StateId,
    schedule: &ExplorationSchedule,
    episode: usize,
    rng: &mut dyn RngCore,
) -> Result<Action> {
    let row = q.row(state);
    let value = schedule.at(episode);
    match schedule.kind {
        ExplorationKind::EpsilonGreedy => {
            if rng.gen::<f64>() < value {
                return Ok(Action::ALL[rng.gen_range(0..4)]);
            }
            let best = q.max(state);
            let ties: Vec<usize> = (0..4).filter(|&k| row[k] == best).collect();
            let k = if ties.len() == 1 {
                ties[0]
            } else {
                ties[rng.gen_range(0..ties.len())]
            };
            Ok(Action::ALL[k])
        }
        ExplorationKind::Boltzmann => {
            if !(value >= MIN_TEMPERATURE) {
                return Err(Error::domain(format!(
                    "Boltzmann temperature {value} is below {MIN_TEMPERATURE}"
                )));
            }
            let best = q.max(state);
            let weights = row.map(|v| ((v - best) / value).exp());
            let total: f64 = weights.iter().sum();
            let probs = weights.map(|w| w / total);
            Ok(Action::ALL[sample_index(&probs, rng)?])
        }
    }
}

/// One-step Q-learning backup; terminal and truncated transitions bootstrap from 0.
pub fn ql_update(q: &mut QTable, t: &Transition, alpha: f64, gamma: f64) {
    let bootstrap = if t.bootstraps() {
        q.max(t.next_state)
    } else {
        0.0
    };
    let old = q.get(t.state, t.action);
    q.set(
        t.state,
        t.action,
        old + alpha * (t.reward + gamma * bootstrap - old),
    );
}

#[derive(Debug, Clone)]
pub struct QLearningAgent {
    q: QTable,
    schedule: ExplorationSchedule,
    learning_rate: super::LearningRate,
    gamma: f64,
    episode: usize,
    alpha: f64,
}

impl QLearningAgent {
    pub fn new(
        n_states: usize,
        schedule: ExplorationSchedule,
        learning_rate: super::LearningRate,
        gamma: f64,
    ) -> Result<Self> {
        schedule.validate()?;
        learning_rate.validate()?;
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::domain(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        Ok(Self {
            q: QTable::new(n_states),
            schedule,
            alpha: learning_rate.at(0),
            learning_rate,
            gamma,
            episode: 0,
        })
    }

    pub fn q_table(&self) -> &QTable {
        &self.q
    }

    pub fn schedule(&self) -> &ExplorationSchedule {
        &self.schedule
    }
}

impl Agent for QLearningAgent {
    fn name(&self) -> &'static str {
        match self.schedule.kind {
            ExplorationKind::EpsilonGreedy => "ql_eps",
            ExplorationKind::Boltzmann => "ql_boltz",
        }
    }

    fn begin_episode(&mut self, episode: usize) {
        self.episode = episode;
        self.alpha = self.learning_rate.at(episode);
    }

    fn select(&mut self, state: StateId, rng: &mut dyn RngCore) -> Result<Action> {
        ql_select(&self.q, state, &self.schedule, self.episode, rng)
    }

    fn update(&mut self, t: &Transition) -> Result<()> {
        if !t.reward.is_finite() {
            return Err(Error::domain(format!("non-finite reward {}", t.reward)));
        }
        ql_update(&mut self.q, t, self.alpha, self.gamma);
        Ok(())
    }

    fn greedy_action(&self, state: StateId) -> (Action, bool) {
        let (k, tied) = argmax_first(self.q.row(state));
        (Action::ALL[k], tied)
    }
}
