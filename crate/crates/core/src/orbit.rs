//! Types shared by the two systems: sampled orbit points, periodicity
//! verdicts, planarity reports and equipotential curves.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::phase::PhaseState;
use crate::rational::{best_rational, RationalApprox};

/// Default tolerance for detecting a rational |M|/m.
pub const RATIONAL_TOL: f64 = 1e-9;
/// Default largest denominator tried when detecting a rational |M|/m.
pub const RATIONAL_MAX_DEN: u64 = 1_000_000;
/// Zero test for torsion and for the planarity constants.
pub const TORSION_TOL: f64 = 1e-10;

/// A trajectory point together with the continuous azimuth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub state: PhaseState,
    /// Unwrapped φ; `state` only determines it modulo 2π.
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Periodicity {
    /// |M|/m = k1/k2, closing after |k1| base periods.
    Periodic { ratio: RationalApprox, period: f64 },
    /// No rational within tolerance.
    QuasiPeriodic { ratio: f64 },
    /// m = 0: motion in a fixed meridian plane, periodic with the base period.
    Meridional { period: f64 },
}

impl Periodicity {
    pub fn period(&self) -> Option<f64> {
        match *self {
            Periodicity::Periodic { period, .. } | Periodicity::Meridional { period } => {
                Some(period)
            }
            Periodicity::QuasiPeriodic { .. } => None,
        }
    }
}

/// Shared detection: the azimuthal to radial frequency ratio is m/|M|.
pub(crate) fn detect_periodicity(
    m_z: f64,
    m_eff: f64,
    base_period: f64,
    tol: f64,
    max_den: u64,
) -> Result<Periodicity> {
    if m_z == 0.0 {
        return Ok(Periodicity::Meridional {
            period: base_period,
        });
    }
    let ratio = m_eff.abs() / m_z;
    Ok(match best_rational(ratio, tol, max_den)? {
        Some(r) => Periodicity::Periodic {
            period: r.k1.unsigned_abs() as f64 * base_period,
            ratio: r,
        },
        None => Periodicity::QuasiPeriodic { ratio },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanarityVerdict {
    PlanarQZero,
    PlanarEquatorial,
    PlanarMeridional,
    PlanarDegenerate,
    NonPlanar,
}

impl PlanarityVerdict {
    pub fn is_planar(self) -> bool {
        self != PlanarityVerdict::NonPlanar
    }
}

/// Planarity classification with the torsion numerator and denominator at
/// one phase point. `torsion` is `None` when the denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Planarity {
    pub verdict: PlanarityVerdict,
    pub torsion_num: f64,
    pub torsion_den: f64,
    pub torsion: Option<f64>,
}

impl Planarity {
    pub(crate) fn new(verdict: PlanarityVerdict, num: f64, den: f64) -> Self {
        let torsion = (den > 0.0 && (num / den).is_finite()).then(|| -num / den);
        Self {
            verdict,
            torsion_num: num,
            torsion_den: den,
            torsion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquipotentialKind {
    /// The surface has collapsed onto the circle ρ = ρ0, z = 0.
    Circle,
    /// Closed surface between two cylinders.
    Bounded,
    /// Open surface; samples are truncated at a caller-chosen ρ.
    Unbounded,
}

/// Upper half (z ≥ 0) of the meridian section of an equipotential surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquipotentialCurve {
    pub kind: EquipotentialKind,
    pub rho_inner: f64,
    /// Infinite for unbounded surfaces.
    pub rho_outer: f64,
    /// (ρ, z) pairs with ρ increasing.
    pub samples: Vec<(f64, f64)>,
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n { b } else { a + step * i as f64 })
}
