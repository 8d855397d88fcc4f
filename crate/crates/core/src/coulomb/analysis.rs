use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{check_bounded, CoulOrbit};
use crate::error::Result;
use crate::orbit::{detect_periodicity, Periodicity, Planarity, PlanarityVerdict, TORSION_TOL};
use crate::oscillator::check_q;
use crate::params::{CoulParams, MotionConstants};
use crate::phase::PhaseState;

/// Torsion numerator and denominator specialised to V; m is taken from the
/// state.
pub fn coul_torsion_terms(p: &CoulParams, state: &PhaseState) -> Result<(f64, f64)> {
    torsion_terms(p, state, state.x * state.vy - state.y * state.vx)
}

fn torsion_terms(p: &CoulParams, state: &PhaseState, m: f64) -> Result<(f64, f64)> {
    let rho = state.require_off_axis("coulomb torsion")?;
    let PhaseState {
        x,
        y,
        z,
        vx,
        vy,
        vz,
        ..
    } = *state;
    let r = state.radius();
    let rho2 = rho * rho;
    let rho4 = rho2 * rho2;
    let rho8 = rho4 * rho4;
    let zs = p.z_strength;
    let s = zs * rho4 / (r * r * r);
    let g = p.q - s;
    let rr = x * vx + y * vy;
    let bracket = rr * (r * r + 3.0 * z * z) - 3.0 * z * vz * rho2;
    let num = p.q * m * (g * vz + zs * rho2 / r.powi(5) * bracket * z) / rho8;
    let den = (g * g * (m * m + rho2 * vz * vz)
        + 2.0 * s * g * rr * z * vz
        + s * s * (vx * vx + vy * vy) * z * z)
        / rho8;
    Ok((num, den))
}

pub fn coul_planarity(
    p: &CoulParams,
    state: &PhaseState,
    c: &MotionConstants,
) -> Result<Planarity> {
    check_q(c, p.q)?;
    // ℓ3 of the state is m up to rounding; the constant makes m = 0 exact
    let (num, den) = torsion_terms(p, state, c.m_z)?;
    let zero = |v: f64, scale: f64| v.abs() <= TORSION_TOL * scale.max(1.0);
    let z2 = p.z_strength * p.z_strength;
    let m_small = zero(c.m_z, c.m_eff.abs());
    let verdict = if p.q == 0.0 {
        PlanarityVerdict::PlanarQZero
    } else if m_small && zero(2.0 * c.energy * p.q + z2, z2) {
        // resting at the bottom of the ring, ρ = Q/Z, z = 0
        PlanarityVerdict::PlanarDegenerate
    } else if zero(c.m_eff * c.m_eff - c.separation, c.separation) {
        PlanarityVerdict::PlanarEquatorial
    } else if m_small {
        PlanarityVerdict::PlanarMeridional
    } else {
        PlanarityVerdict::NonPlanar
    };
    Ok(Planarity::new(verdict, num, den))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulPeriod {
    /// T_C = 2πZ(−2E)^(−3/2).
    pub radial: f64,
    pub periodicity: Periodicity,
    /// m² and (r1r2/(r1 + r2))·sin²θ0 fixed by the rational ratio, when Q > 0.
    pub quantized: Option<(f64, f64)>,
}

pub fn coul_period(
    p: &CoulParams,
    c: &MotionConstants,
    tol: f64,
    max_den: u64,
) -> Result<CoulPeriod> {
    check_bounded(p, c)?;
    let radial = TAU * p.z_strength * (-2.0 * c.energy).powf(-1.5);
    let periodicity = detect_periodicity(c.m_z, c.m_eff, radial, tol, max_den)?;
    let quantized = match periodicity {
        Periodicity::Periodic { ratio, .. } if p.q > 0.0 => {
            let (k1s, k2s) = ((ratio.k1 as f64).powi(2), (ratio.k2 as f64).powi(2));
            let d = k1s - k2s;
            (d > 0.0).then(|| (p.q * k2s / d, 0.5 * p.q / p.z_strength * k1s / d))
        }
        _ => None,
    };
    Ok(CoulPeriod {
        radial,
        periodicity,
        quantized,
    })
}

/// Time average of V over one radial period: 2E + Q/((r1 + r2)√(r1r2)·sin θ0).
pub fn coul_virial(p: &CoulParams, orbit: &CoulOrbit) -> Result<f64> {
    orbit.validate(p)?;
    let (r1, r2) = (orbit.r1, orbit.r2);
    let e = -p.z_strength / (r1 + r2);
    if p.q == 0.0 {
        return Ok(2.0 * e);
    }
    Ok(2.0 * e + p.q / ((r1 + r2) * (r1 * r2).sqrt() * orbit.theta0.sin()))
}

/// Bohr–Sommerfeld level −Z²/(2(|M| + n_r + n_θ + 1)²).
pub fn coul_semiclassical(p: &CoulParams, m: i64, n_r: u32, n_theta: u32) -> f64 {
    let m_eff = ((m as f64).powi(2) + p.q).sqrt();
    let n = m_eff + n_r as f64 + n_theta as f64 + 1.0;
    -p.z_strength * p.z_strength / (2.0 * n * n)
}
