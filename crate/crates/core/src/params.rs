//! System parameters and the separation constants that label every orbit.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Oscillatory ring-shaped potential ½Ω²r² + ½Q/ρ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscParams {
    pub omega: f64,
    pub q: f64,
}

impl OscParams {
    pub fn new(omega: f64, q: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(invalid(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !(q >= 0.0 && q.is_finite()) {
            return Err(invalid(format!(
                "q must be non-negative and finite, got {q}"
            )));
        }
        Ok(Self { omega, q })
    }

    /// Oscillator period 2π/Ω, the common period of ρ(t) and z(t).
    pub fn oscillator_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// Coulombic ring-shaped (Hartmann) potential −Z/r + ½Q/ρ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulParams {
    pub z_strength: f64,
    pub q: f64,
}

impl CoulParams {
    pub fn new(z_strength: f64, q: f64) -> Result<Self> {
        if !(z_strength > 0.0 && z_strength.is_finite()) {
            return Err(invalid(format!(
                "coulomb strength must be positive and finite, got {z_strength}"
            )));
        }
        if !(q >= 0.0 && q.is_finite()) {
            return Err(invalid(format!(
                "q must be non-negative and finite, got {q}"
            )));
        }
        Ok(Self { z_strength, q })
    }
}

/// Sense of rotation about the symmetry axis, i.e. the sign of ℓ₃.
///
/// The geometric orbit parameters only fix m², so the sign is carried separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Sense {
    #[default]
    Positive,
    Negative,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Positive => 1.0,
            Sense::Negative => -1.0,
        }
    }

    pub fn of(m: f64) -> Self {
        if m.is_sign_negative() {
            Sense::Negative
        } else {
            Sense::Positive
        }
    }
}

/// Energy E, separation constant K, axial angular momentum m = ℓ₃ and the
/// effective angular momentum M = √(m² + Q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionConstants {
    pub energy: f64,
    pub separation: f64,
    pub m_z: f64,
    pub m_eff: f64,
}

impl MotionConstants {
    pub fn new(energy: f64, separation: f64, m_z: f64, q: f64) -> Self {
        Self {
            energy,
            separation,
            m_z,
            m_eff: (m_z * m_z + q).sqrt(),
        }
    }

    /// The ring strength implied by (m, M).
    pub fn q(&self) -> f64 {
        self.m_eff * self.m_eff - self.m_z * self.m_z
    }

    /// m/|M|, the azimuthal frequency ratio. Zero when M vanishes.
    pub fn m_ratio(&self) -> f64 {
        if self.m_eff == 0.0 {
            0.0
        } else {
            self.m_z / self.m_eff
        }
    }
}

/// Relative closeness used for degenerate-case detection.
pub(crate) fn nearly_equal(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
