//! Two-qubit Born-rule engine.
//!
//! Observables are restricted to the Z–X plane: the setting at angle θ
//! measures cos(θ)·Z + sin(θ)·X, whose ±1 eigenprojectors are
//! Π_±(θ) = (I ± cos(θ)·Z ± sin(θ)·X)/2. Qubit 0 is Alice's, so the basis
//! order is |00⟩, |01⟩, |10⟩, |11⟩ with Alice's bit first.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use thiserror::Error;

use crate::causal_models::{joint_from_masses, JointDistribution, JointModel, Setting, Sign, JOINT_OUTCOMES};

/// Allowed deviation of Σ|amplitude|² from 1.
pub const STATE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("state has squared norm {0}, expected 1")]
    InvalidState(f64),
}

/// Pure two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amplitudes: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self, QuantumError> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(QuantumError::InvalidState(norm));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: [f64; 4]) -> Result<Self, QuantumError> {
        Self::new(amplitudes.map(|a| Complex64::new(a, 0.0)))
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: [Complex64; 4]) -> Result<Self, QuantumError> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QuantumError::InvalidState(norm * norm));
        }
        Self::new(amplitudes.map(|a| a / norm))
    }

    /// (|00⟩ + |11⟩)/√2.
    pub fn phi_plus() -> Self {
        Self::from_real([FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).expect("unit norm")
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }
}

/// ±1-valued observable cos(θ)·Z + sin(θ)·X on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub angle: f64,
}

impl MeasurementSetting {
    pub fn new(angle: f64) -> Self {
        Self { angle }
    }

    /// Real 2×2 eigenprojector for outcome `sign`.
    pub fn projector(&self, sign: Sign) -> [[f64; 2]; 2] {
        let s = f64::from(sign.value());
        let (sin, cos) = self.angle.sin_cos();
        [
            [0.5 * (1.0 + s * cos), 0.5 * s * sin],
            [0.5 * s * sin, 0.5 * (1.0 - s * cos)],
        ]
    }
}

/// P(a, b) = ⟨ψ| Π_a(θa) ⊗ Π_b(θb) |ψ⟩.
pub fn born_joint(state: &TwoQubitState, alice: MeasurementSetting, bob: MeasurementSetting) -> JointDistribution {
    let psi = state.amplitudes();
    let masses = JOINT_OUTCOMES.map(|(a, b)| {
        let pa = alice.projector(a);
        let pb = bob.projector(b);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        acc += psi[2 * i + j].conj() * pa[i][k] * pb[j][l] * psi[2 * k + l];
                    }
                }
            }
        }
        acc.re.max(0.0)
    });
    joint_from_masses(masses).expect("projectors resolve the identity on a normalized state")
}

/// E = Σ a·b·P(a, b).
pub fn correlator(state: &TwoQubitState, alice: MeasurementSetting, bob: MeasurementSetting) -> f64 {
    crate::causal_models::product_expectation(&born_joint(state, alice, bob))
}

/// A state plus the angle each button selects on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshConfiguration {
    pub state: TwoQubitState,
    pub alice_red: MeasurementSetting,
    pub alice_green: MeasurementSetting,
    pub bob_red: MeasurementSetting,
    pub bob_green: MeasurementSetting,
}

impl ChshConfiguration {
    pub fn alice(&self, setting: Setting) -> MeasurementSetting {
        match setting {
            Setting::Red => self.alice_red,
            Setting::Green => self.alice_green,
        }
    }

    pub fn bob(&self, setting: Setting) -> MeasurementSetting {
        match setting {
            Setting::Red => self.bob_red,
            Setting::Green => self.bob_green,
        }
    }
}

impl JointModel for ChshConfiguration {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        born_joint(&self.state, self.alice(alice), self.bob(bob))
    }
}

/// |Φ+⟩ with a_r = 0, a_g = π/2, b_r = π/4, b_g = −π/4, which gives F = 2√2.
pub fn tsirelson_config() -> ChshConfiguration {
    ChshConfiguration {
        state: TwoQubitState::phi_plus(),
        alice_red: MeasurementSetting::new(0.0),
        alice_green: MeasurementSetting::new(FRAC_PI_2),
        bob_red: MeasurementSetting::new(FRAC_PI_4),
        bob_green: MeasurementSetting::new(-FRAC_PI_4),
    }
}
