//! The coulombic ring-shaped (Hartmann) system V = −Z/r + ½Q/ρ².

mod analysis;
mod degeneracy;
mod separatrix;
mod trajectory;

pub use analysis::{
    coul_period, coul_planarity, coul_semiclassical, coul_torsion_terms, coul_virial, CoulPeriod,
};
pub use degeneracy::{degeneracy_q, degeneracy_search, DegeneracyOutcome, DegeneracyTriple};
pub use separatrix::{
    coul_separatrix, separatrix_radius, separatrix_residual, SeparatrixOrbit, SeparatrixTrajectory,
};
pub use trajectory::{
    coul_planar_orbit, coul_radial_time, coul_sphere_orbit, coul_trajectory, CoulOrbit,
    CoulTrajectory,
};

use serde::{Deserialize, Serialize};

use crate::error::{inadmissible, invalid, Error, Result};
use crate::orbit::{linspace, EquipotentialCurve, EquipotentialKind};
use crate::oscillator::check_q;
use crate::params::{nearly_equal, CoulParams, MotionConstants, Sense};
use crate::phase::{angular_momentum, PhaseState};
use crate::potential::PotentialModel;

/// Relative tolerance for the sphere case 2EK = −Z² and for M² = K.
pub const DEGENERACY_TOL: f64 = 1e-12;

pub fn coul_potential(p: &CoulParams, state: &PhaseState) -> Result<f64> {
    if state.radius() == 0.0 {
        return Err(Error::Singular(
            "coulomb potential undefined at r = 0".into(),
        ));
    }
    state.require_off_axis("coulomb potential")?;
    Ok(p.value(&state.position()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulInvariants {
    pub h: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl CoulInvariants {
    pub fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("H", self.h),
            ("B1", self.b1),
            ("B2", self.b2),
            ("B3", self.b3),
        ]
    }
}

/// H, B1 = ℓ² + Q/sin²θ, B2 = ℓ3 and the parabolic constant
/// B3 = ℓ1p2 − ℓ2p1 + Zz/r − Qz/ρ².
pub fn coul_invariants(p: &CoulParams, state: &PhaseState) -> Result<CoulInvariants> {
    let rho = state.require_off_axis("coulomb invariants")?;
    let pos = state.position();
    let r = pos.norm();
    let l = angular_momentum(state);
    let l2 = l[0] * l[0] + l[1] * l[1] + l[2] * l[2];
    let rho2 = rho * rho;
    Ok(CoulInvariants {
        h: state.kinetic_energy() + p.value(&pos),
        b1: l2 + p.q * r * r / rho2,
        b2: l[2],
        b3: l[0] * state.vy - l[1] * state.vx + p.z_strength * state.z / r - p.q * state.z / rho2,
    })
}

/// Meridian section of V = `level`. Sampling of open surfaces stops at
/// `rho_max` (level 0) or just short of the asymptotic cylinder (level > 0).
pub fn coul_equipotential(
    p: &CoulParams,
    level: f64,
    n_samples: usize,
    rho_max: Option<f64>,
) -> Result<EquipotentialCurve> {
    if n_samples < 2 {
        return Err(invalid("n_samples must be at least 2"));
    }
    if !level.is_finite() {
        return Err(invalid("level must be finite"));
    }
    let (z, q) = (p.z_strength, p.q);
    if q == 0.0 {
        if level >= 0.0 {
            return Err(inadmissible(format!(
                "with Q = 0 only levels < 0 are attained (level = {level})"
            )));
        }
        let radius = -z / level;
        return Ok(EquipotentialCurve {
            kind: EquipotentialKind::Bounded,
            rho_inner: 0.0,
            rho_outer: radius,
            samples: linspace(0.0, radius, n_samples)
                .map(|rho| (rho, (radius * radius - rho * rho).max(0.0).sqrt()))
                .collect(),
        });
    }
    let floor = -z * z / (2.0 * q);
    if level < floor && !nearly_equal(level, floor, DEGENERACY_TOL) {
        return Err(inadmissible(format!(
            "level >= -Z^2/(2Q) = {floor} violated (level = {level}): empty surface"
        )));
    }
    let height = |rho: f64| {
        let d = q - 2.0 * level * rho * rho;
        let inner = (4.0 * z * z * rho * rho - d * d).max(0.0);
        rho * inner.sqrt() / d
    };
    let disc = (z * z + 2.0 * q * level).max(0.0);
    // (Z − √(Z² + 2QV))/(−2V) and (−Z + √(Z² + 2QV))/(2V) share this form
    let inner = q / (z + disc.sqrt());
    if nearly_equal(level, floor, DEGENERACY_TOL) || disc == 0.0 {
        let rho0 = q / z;
        return Ok(EquipotentialCurve {
            kind: EquipotentialKind::Circle,
            rho_inner: rho0,
            rho_outer: rho0,
            samples: vec![(rho0, 0.0); n_samples],
        });
    }
    if level < 0.0 {
        let outer = (z + disc.sqrt()) / (-2.0 * level);
        return Ok(EquipotentialCurve {
            kind: EquipotentialKind::Bounded,
            rho_inner: inner,
            rho_outer: outer,
            samples: linspace(inner, outer, n_samples)
                .map(|rho| (rho, height(rho)))
                .collect(),
        });
    }
    if level == 0.0 {
        let rho_max =
            rho_max.ok_or_else(|| invalid("level 0 surface is open: rho_max required"))?;
        if !(rho_max > inner) {
            return Err(invalid(format!("rho_max must exceed {inner}")));
        }
        return Ok(EquipotentialCurve {
            kind: EquipotentialKind::Unbounded,
            rho_inner: inner,
            rho_outer: f64::INFINITY,
            samples: linspace(inner, rho_max, n_samples)
                .map(|rho| {
                    (
                        rho,
                        rho * (4.0 * z * z * rho * rho - q * q).max(0.0).sqrt() / q,
                    )
                })
                .collect(),
        });
    }
    // level > 0: z grows without bound as ρ approaches √(Q/2V)
    let outer = (q / (2.0 * level)).sqrt();
    let stop = rho_max.map_or(outer, |m| m.min(outer));
    let step = (stop - inner) / n_samples as f64;
    Ok(EquipotentialCurve {
        kind: EquipotentialKind::Unbounded,
        rho_inner: inner,
        rho_outer: outer,
        samples: (0..n_samples)
            .map(|i| {
                let rho = inner + step * i as f64;
                (rho, height(rho))
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulBounds {
    pub r1: f64,
    pub r2: f64,
    pub theta0: f64,
    /// 2EK = −Z²: the orbit lies on the sphere r = r1 = r2.
    pub degenerate: bool,
}

pub(super) fn check_bounded(p: &CoulParams, c: &MotionConstants) -> Result<()> {
    check_q(c, p.q)?;
    let (e, k) = (c.energy, c.separation);
    if !(e.is_finite() && k.is_finite()) {
        return Err(invalid("E and K must be finite"));
    }
    if e > 0.0 {
        return Err(Error::OutOfScope(format!(
            "unbounded motion with E > 0 is not supported (E = {e})"
        )));
    }
    if e == 0.0 {
        return Err(inadmissible(
            "E < 0 violated (E = 0 is the separatrix, see coul_separatrix)",
        ));
    }
    if !(k > 0.0) {
        return Err(inadmissible(format!("K > 0 violated (K = {k})")));
    }
    let z2 = p.z_strength * p.z_strength;
    if 2.0 * e * k + z2 < -DEGENERACY_TOL * z2 {
        return Err(inadmissible(format!(
            "E >= -Z^2/(2K) violated (E = {e}, -Z^2/(2K) = {})",
            -z2 / (2.0 * k)
        )));
    }
    let m2 = c.m_eff * c.m_eff;
    if m2 > k && !nearly_equal(m2, k, DEGENERACY_TOL) {
        return Err(inadmissible(format!(
            "K >= M^2 violated (K = {k}, M^2 = {m2})"
        )));
    }
    Ok(())
}

pub fn coul_bounds(p: &CoulParams, c: &MotionConstants) -> Result<CoulBounds> {
    check_bounded(p, c)?;
    let (e, k, z) = (c.energy, c.separation, p.z_strength);
    let disc = z * z + 2.0 * e * k;
    let sin_t0 = (c.m_eff.abs() / k.sqrt()).min(1.0);
    let theta0 = sin_t0.asin();
    if disc <= DEGENERACY_TOL * z * z {
        let r0 = z / (-2.0 * e);
        return Ok(CoulBounds {
            r1: r0,
            r2: r0,
            theta0,
            degenerate: true,
        });
    }
    let root = disc.sqrt();
    Ok(CoulBounds {
        r1: k / (z + root),
        r2: (z + root) / (-2.0 * e),
        theta0,
        degenerate: false,
    })
}

pub fn coul_constants_from_bounds(
    p: &CoulParams,
    orbit: &CoulOrbit,
    sense: Sense,
) -> Result<MotionConstants> {
    orbit.validate(p)?;
    let z = p.z_strength;
    let (r1, r2) = (orbit.r1, orbit.r2);
    let k = 2.0 * z * r1 * r2 / (r1 + r2);
    let e = -z / (r1 + r2);
    let m_eff2 = k * orbit.theta0.sin().powi(2);
    let mut m2 = (m_eff2 - p.q).max(0.0);
    if m2 <= 64.0 * f64::EPSILON * m_eff2 {
        m2 = 0.0;
    }
    Ok(MotionConstants::new(e, k, sense.sign() * m2.sqrt(), p.q))
}
