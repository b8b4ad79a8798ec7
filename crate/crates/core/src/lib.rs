//! Quantum-inspired reinforcement learning (QiRL) for UAV trajectory planning.
//!
//! A UAV flies over a discretized ground area collecting uplink rate from a
//! set of ground users. The crate provides:
//!
//! - [`channel`]: path loss, SNR and weighted sum uplink rate.
//! - [`gridworld`]: the deterministic episodic grid MDP built on the channel model.
//! - [`quantum`]: four-amplitude registers, collapse sampling and the
//!   flexible-phase Grover operator (explicit matrix and closed form).
//! - [`agents`]: the QiRL learner plus ε-greedy and Boltzmann Q-learning baselines.
//! - [`oracle`]: exact finite-horizon DP and brute-force path enumeration.
//! - [`harness`]: seeded multi-run experiments, convergence metrics and CSV output.

pub mod agents;
pub mod channel;
pub mod error;
pub mod gridworld;
pub mod harness;
pub mod oracle;
pub mod quantum;

pub use error::{Error, Result};
