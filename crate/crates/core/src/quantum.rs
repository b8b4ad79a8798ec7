//! Two-qubit action registers and the flexible-phase Grover operator.
//!
//! A register holds one complex amplitude per eigenaction, in the basis
//! order `Forward, Backward, Left, Right` ↔ `|00⟩, |01⟩, |10⟩, |11⟩`.
//!
//! The Grover operator with free phases is `G = U_A · U_a`, where
//! `U_a = I − (1 − e^{jφ1})|a⟩⟨a|` marks the target eigenaction and
//! `U_A = (1 − e^{jφ2})|A⟩⟨A| − I` reflects about the current register.
//! [`grover_matrix`] builds both 4×4 matrices explicitly; [`grover_analytic`]
//! uses the closed form
//!
//! ```text
//! Q       = (1 − e^{jφ2}) · [1 − (1 − e^{jφ1}) |h_i|²]
//! target  ← (Q − e^{jφ1}) · h_i
//! other n ← (Q − 1) · h_n
//! ```
//!
//! so the two can be checked against each other.

use std::f64::consts::TAU;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub const NUM_EIGENACTIONS: usize = 4;

/// Tolerance on `Σ|h|²` for constructing a register.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Tolerance on `Σ|h|²` (or `Σp`) accepted by the samplers.
pub const SAMPLING_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeRegister {
    amps: [Complex64; NUM_EIGENACTIONS],
}

impl AmplitudeRegister {
    pub fn new(amps: [Complex64; NUM_EIGENACTIONS]) -> Result<Self> {
        let reg = Self { amps };
        let norm = reg.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!(
                "register is not normalized: sum of |h|^2 = {norm}"
            )));
        }
        Ok(reg)
    }

    /// Real non-negative amplitudes `√p_n` for a probability vector.
    pub fn from_probabilities(probs: [f64; NUM_EIGENACTIONS]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::domain(format!("invalid probabilities {probs:?}")));
        }
        Self::new(probs.map(|p| Complex64::new(p.sqrt(), 0.0)))
    }

    /// Scales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amps: [Complex64; NUM_EIGENACTIONS]) -> Result<Self> {
        let norm = amps.iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::domain("cannot normalize a zero register"));
        }
        Self::new(amps.map(|h| h / norm))
    }

    pub fn amplitudes(&self) -> &[Complex64; NUM_EIGENACTIONS] {
        &self.amps
    }

    pub fn probabilities(&self) -> [f64; NUM_EIGENACTIONS] {
        self.amps.map(|h| h.norm_sqr())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|h| h.norm_sqr()).sum()
    }

    fn to_vector(self) -> Vector4<Complex64> {
        Vector4::from(self.amps)
    }
}

/// Phase parameters `(φ1, φ2)`, canonicalized into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair {
    phi1: f64,
    phi2: f64,
}

impl PhasePair {
    pub fn new(phi1: f64, phi2: f64) -> Result<Self> {
        if !(phi1.is_finite() && phi2.is_finite()) {
            return Err(Error::domain(format!(
                "phases must be finite, got ({phi1}, {phi2})"
            )));
        }
        Ok(Self {
            phi1: canonical(phi1),
            phi2: canonical(phi2),
        })
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    pub fn swapped(&self) -> Self {
        Self {
            phi1: self.phi2,
            phi2: self.phi1,
        }
    }
}

fn canonical(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn cis(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

fn check_target(target: usize) -> Result<()> {
    if target >= NUM_EIGENACTIONS {
        return Err(Error::domain(format!(
            "target eigenaction {target} out of range"
        )));
    }
    Ok(())
}

pub fn uniform_register() -> AmplitudeRegister {
    AmplitudeRegister {
        amps: [Complex64::new(0.5, 0.0); NUM_EIGENACTIONS],
    }
}

/// Draws an index with probability `probs[n]`, consuming exactly one uniform draw.
pub fn sample_index<R: Rng + ?Sized>(
    probs: &[f64; NUM_EIGENACTIONS],
    rng: &mut R,
) -> Result<usize> {
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (total - 1.0).abs() > SAMPLING_TOLERANCE
    {
        return Err(Error::domain(format!(
            "probability vector {probs:?} is not normalized"
        )));
    }
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (n, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok(n);
        }
    }
    // u landed in the rounding gap at the top; take the last non-zero entry
    Ok(probs
        .iter()
        .rposition(|p| *p > 0.0)
        .unwrap_or(NUM_EIGENACTIONS - 1))
}

/// Measures the register without disturbing it.
pub fn collapse<R: Rng + ?Sized>(reg: &AmplitudeRegister, rng: &mut R) -> Result<usize> {
    let norm = reg.norm_sqr();
    if (norm - 1.0).abs() > SAMPLING_TOLERANCE {
        return Err(Error::domain(format!(
            "cannot measure an un-normalized register (norm {norm})"
        )));
    }
    sample_index(&reg.probabilities(), rng)
}

/// `U_a = I − (1 − e^{jφ1})|a_target⟩⟨a_target|`.
pub fn target_phase_operator(target: usize, phi1: f64) -> Matrix4<Complex64> {
    let mut u = Matrix4::identity();
    u[(target, target)] -= Complex64::new(1.0, 0.0) - cis(phi1);
    u
}

/// `U_A = (1 − e^{jφ2})|A⟩⟨A| − I`.
pub fn register_reflection_operator(reg: &AmplitudeRegister, phi2: f64) -> Matrix4<Complex64> {
    let a = reg.to_vector();
    let projector = a * a.adjoint();
    projector * (Complex64::new(1.0, 0.0) - cis(phi2)) - Matrix4::identity()
}

/// One Grover iteration via explicit matrix products.
pub fn grover_matrix(
    reg: &AmplitudeRegister,
    target: usize,
    phases: PhasePair,
) -> Result<AmplitudeRegister> {
    check_target(target)?;
    let g =
        register_reflection_operator(reg, phases.phi2) * target_phase_operator(target, phases.phi1);
    let out = g * reg.to_vector();
    Ok(AmplitudeRegister {
        amps: [out[0], out[1], out[2], out[3]],
    })
}

/// One Grover iteration via the closed-form coefficients.
pub fn grover_analytic(
    reg: &AmplitudeRegister,
    target: usize,
    phases: PhasePair,
) -> Result<AmplitudeRegister> {
    check_target(target)?;
    let one = Complex64::new(1.0, 0.0);
    let e1 = cis(phases.phi1);
    let e2 = cis(phases.phi2);
    let p_target = reg.amps[target].norm_sqr();
    let q = (one - e2) * (one - (one - e1) * p_target);
    let mut amps = reg.amps;
    for (n, h) in amps.iter_mut().enumerate() {
        *h *= if n == target { q - e1 } else { q - one };
    }
    Ok(AmplitudeRegister { amps })
}

/// Ratio of the target amplitude after one iteration to its value before.
///
/// `|R|² · p_target` is the post-iteration target probability.
pub fn amplitude_ratio(phases: PhasePair, p_target: f64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&p_target) {
        return Err(Error::domain(format!(
            "target probability must lie in [0, 1], got {p_target}"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let e1 = cis(phases.phi1);
    let e2 = cis(phases.phi2);
    Ok((one - e1 - e2) - (one - e1) * (one - e2) * p_target)
}
