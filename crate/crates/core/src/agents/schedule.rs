use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Learning rate as a function of the episode index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LearningRate {
    Constant {
        alpha: f64,
    },
    /// `α_k = α_0 / (1 + c·k)`. The sum of `α_k` diverges while the sum of
    /// `α_k²` converges, so the stochastic-approximation step conditions hold.
    Decaying {
        initial: f64,
        c: f64,
    },
}

impl LearningRate {
    pub fn constant(alpha: f64) -> Self {
        LearningRate::Constant { alpha }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            LearningRate::Constant { alpha } => alpha > 0.0 && alpha <= 1.0,
            LearningRate::Decaying { initial, c } => {
                initial > 0.0 && initial <= 1.0 && c.is_finite() && c >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid learning rate {self:?}")))
        }
    }

    pub fn at(&self, episode: usize) -> f64 {
        match *self {
            LearningRate::Constant { alpha } => alpha,
            LearningRate::Decaying { initial, c } => initial / (1.0 + c * episode as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplorationKind {
    EpsilonGreedy,
    Boltzmann,
}

/// Multiplicatively annealed ε or τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplorationSchedule {
    pub kind: ExplorationKind,
    pub initial: f64,
    pub decay: f64,
    pub floor: f64,
}

impl ExplorationSchedule {
    pub fn epsilon_greedy(initial: f64, decay: f64, floor: f64) -> Result<Self> {
        let s = Self {
            kind: ExplorationKind::EpsilonGreedy,
            initial,
            decay,
            floor,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn boltzmann(initial: f64, decay: f64, floor: f64) -> Result<Self> {
        let s = Self {
            kind: ExplorationKind::Boltzmann,
            initial,
            decay,
            floor,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let floor_ok = match self.kind {
            ExplorationKind::EpsilonGreedy => self.floor >= 0.0 && self.initial <= 1.0,
            ExplorationKind::Boltzmann => self.floor > 0.0,
        };
        if self.initial > 0.0
            && self.initial.is_finite()
            && self.decay > 0.0
            && self.decay <= 1.0
            && self.floor.is_finite()
            && floor_ok
        {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "invalid exploration schedule {self:?}"
            )))
        }
    }

    /// `max(floor, initial · decay^episode)`.
    pub fn at(&self, episode: usize) -> f64 {
        let exponent = i32::try_from(episode).unwrap_or(i32::MAX);
        (self.initial * self.decay.powi(exponent)).max(self.floor)
    }
}
