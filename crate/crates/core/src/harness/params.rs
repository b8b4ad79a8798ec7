//! Agent hyperparameters from the `[agents]` table of a layout file.
//!
//! ```toml
//! [agents.qirl]
//! learning_rate = { kind = "constant", alpha = 0.1 }
//! k_plus = 1.0
//! k_minus = -1.0
//! # reward_scale defaults to the terminal bonus
//!
//! [agents.ql_eps]
//! learning_rate = { kind = "decaying", initial = 0.5, c = 0.01 }
//! initial = 1.0
//! decay = 0.995
//! floor = 0.01
//!
//! [agents.ql_boltz]
//! initial = 0.5   # defaults to the terminal bonus
//! ```
//!
//! Unset fields fall back to defaults scaled to the environment.

use serde::{Deserialize, Serialize};

use crate::agents::{ExplorationSchedule, LearningRate, QirlConfig};
use crate::error::{Error, Result};
use crate::gridworld::GridWorld;

/// Default learning rate of the Q-learning baselines.
pub const DEFAULT_QL_LEARNING_RATE: LearningRate = LearningRate::Constant { alpha: 0.1 };
pub const DEFAULT_QL_GAMMA: f64 = 1.0;
pub const DEFAULT_EXPLORATION_DECAY: f64 = 0.995;
pub const DEFAULT_EPSILON_FLOOR: f64 = 0.01;
/// Boltzmann temperature floor as a fraction of the terminal bonus.
pub const DEFAULT_TAU_FLOOR_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentParams {
    #[serde(default)]
    pub qirl: QirlParams,
    #[serde(default)]
    pub ql_eps: EpsilonParams,
    #[serde(default)]
    pub ql_boltz: BoltzmannParams,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QirlParams {
    pub learning_rate: Option<LearningRate>,
    pub k_plus: Option<f64>,
    pub k_minus: Option<f64>,
    pub reward_scale: Option<f64>,
    pub exponent_clamp: Option<f64>,
    pub p_floor: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonParams {
    pub learning_rate: Option<LearningRate>,
    pub gamma: Option<f64>,
    /// Starting ε.
    pub initial: Option<f64>,
    pub decay: Option<f64>,
    pub floor: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoltzmannParams {
    pub learning_rate: Option<LearningRate>,
    pub gamma: Option<f64>,
    /// Starting τ.
    pub initial: Option<f64>,
    pub decay: Option<f64>,
    pub floor: Option<f64>,
}

#[derive(Deserialize)]
struct AgentsOnly {
    #[serde(default)]
    agents: Option<AgentParams>,
}

impl AgentParams {
    /// Reads the `[agents]` table of `text`, if there is one.
    pub fn from_layout(agents: Option<&toml::Value>, text: &str) -> Result<Self> {
        if agents.is_none() {
            return Ok(Self::default());
        }
        // re-parse the text rather than the value so errors keep their spans
        let only: AgentsOnly = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| crate::gridworld::layout_line_of(text, s.start));
            Error::config(line, e.message().to_string())
        })?;
        Ok(only.agents.unwrap_or_default())
    }

    /// Field-wise merge where `other`'s set fields win.
    pub fn overridden_by(&self, other: &AgentParams) -> AgentParams {
        let q = (&self.qirl, &other.qirl);
        let e = (&self.ql_eps, &other.ql_eps);
        let b = (&self.ql_boltz, &other.ql_boltz);
        AgentParams {
            qirl: QirlParams {
                learning_rate: q.1.learning_rate.or(q.0.learning_rate),
                k_plus: q.1.k_plus.or(q.0.k_plus),
                k_minus: q.1.k_minus.or(q.0.k_minus),
                reward_scale: q.1.reward_scale.or(q.0.reward_scale),
                exponent_clamp: q.1.exponent_clamp.or(q.0.exponent_clamp),
                p_floor: q.1.p_floor.or(q.0.p_floor),
            },
            ql_eps: EpsilonParams {
                learning_rate: e.1.learning_rate.or(e.0.learning_rate),
                gamma: e.1.gamma.or(e.0.gamma),
                initial: e.1.initial.or(e.0.initial),
                decay: e.1.decay.or(e.0.decay),
                floor: e.1.floor.or(e.0.floor),
            },
            ql_boltz: BoltzmannParams {
                learning_rate: b.1.learning_rate.or(b.0.learning_rate),
                gamma: b.1.gamma.or(b.0.gamma),
                initial: b.1.initial.or(b.0.initial),
                decay: b.1.decay.or(b.0.decay),
                floor: b.1.floor.or(b.0.floor),
            },
        }
    }

    pub fn qirl_config(&self, env: &GridWorld) -> QirlConfig {
        let d = QirlConfig::for_env(env);
        let p = &self.qirl;
        QirlConfig {
            learning_rate: p.learning_rate.unwrap_or(d.learning_rate),
            gamma: d.gamma,
            k_plus: p.k_plus.unwrap_or(d.k_plus),
            k_minus: p.k_minus.unwrap_or(d.k_minus),
            reward_scale: p.reward_scale.unwrap_or(d.reward_scale),
            exponent_clamp: p.exponent_clamp.unwrap_or(d.exponent_clamp),
            p_floor: p.p_floor.unwrap_or(d.p_floor),
        }
    }

    pub fn epsilon_settings(
        &self,
        _env: &GridWorld,
    ) -> Result<(ExplorationSchedule, LearningRate, f64)> {
        let p = &self.ql_eps;
        let schedule = ExplorationSchedule::epsilon_greedy(
            p.initial.unwrap_or(1.0),
            p.decay.unwrap_or(DEFAULT_EXPLORATION_DECAY),
            p.floor.unwrap_or(DEFAULT_EPSILON_FLOOR),
        )?;
        Ok((
            schedule,
            p.learning_rate.unwrap_or(DEFAULT_QL_LEARNING_RATE),
            p.gamma.unwrap_or(DEFAULT_QL_GAMMA),
        ))
    }

    pub fn boltzmann_settings(
        &self,
        env: &GridWorld,
    ) -> Result<(ExplorationSchedule, LearningRate, f64)> {
        let p = &self.ql_boltz;
        let schedule = ExplorationSchedule::boltzmann(
            p.initial.unwrap_or(env.bonus()),
            p.decay.unwrap_or(DEFAULT_EXPLORATION_DECAY),
            p.floor.unwrap_or(DEFAULT_TAU_FLOOR_FRACTION * env.bonus()),
        )?;
        Ok((
            schedule,
            p.learning_rate.unwrap_or(DEFAULT_QL_LEARNING_RATE),
            p.gamma.unwrap_or(DEFAULT_QL_GAMMA),
        ))
    }
}
