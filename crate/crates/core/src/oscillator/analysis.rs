use std::f64::consts::TAU;

use super::{check_q, OscOrbit, DEGENERACY_TOL};
use crate::error::{inadmissible, invalid, Error, Result};
use crate::orbit::{
    detect_periodicity, linspace, EquipotentialCurve, EquipotentialKind, Periodicity, Planarity,
    PlanarityVerdict, TORSION_TOL,
};
use crate::params::{nearly_equal, MotionConstants, OscParams};
use crate::phase::PhaseState;

/// Meridian section of the surface U = `level`.
pub fn osc_equipotential(
    p: &OscParams,
    level: f64,
    n_samples: usize,
) -> Result<EquipotentialCurve> {
    if n_samples < 2 {
        return Err(invalid("n_samples must be at least 2"));
    }
    let om2 = p.omega * p.omega;
    let floor = p.omega * p.q.sqrt();
    if !level.is_finite() || level < floor {
        return Err(inadmissible(format!(
            "level >= Omega sqrt(Q) = {floor} violated (level = {level}): empty surface"
        )));
    }
    let disc = level * level - om2 * p.q;
    if nearly_equal(level, floor, 1e-12) || disc <= 0.0 {
        let rho0 = (p.q / om2).sqrt().sqrt();
        return Ok(EquipotentialCurve {
            kind: EquipotentialKind::Circle,
            rho_inner: rho0,
            rho_outer: rho0,
            samples: vec![(rho0, 0.0); n_samples],
        });
    }
    let root = disc.sqrt();
    // U − √(U² − Ω²Q) without cancellation
    let inner = (p.q / (level + root)).sqrt();
    let outer = ((level + root) / om2).sqrt();
    let z_at = |rho: f64| {
        let ring = if p.q == 0.0 {
            0.0
        } else {
            p.q / (om2 * rho * rho)
        };
        (2.0 * level / om2 - rho * rho - ring).max(0.0).sqrt()
    };
    Ok(EquipotentialCurve {
        kind: EquipotentialKind::Bounded,
        rho_inner: inner,
        rho_outer: outer,
        samples: linspace(inner, outer, n_samples)
            .map(|rho| (rho, z_at(rho)))
            .collect(),
    })
}

/// Closure test on |M|/m. The period is |k1|·2π/Ω when rational; m = 0 gives
/// the meridional case with period 2π/Ω.
pub fn osc_periodicity(
    p: &OscParams,
    c: &MotionConstants,
    tol: f64,
    max_den: u64,
) -> Result<Periodicity> {
    check_q(c, p.q)?;
    detect_periodicity(c.m_z, c.m_eff, p.oscillator_period(), tol, max_den)
}

/// m² and ρ1²ρ2² of the periodic orbits with |M|/m = k1/k2.
pub fn osc_quantized_constants(q: f64, k1: i64, k2: i64, omega: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0) {
        return Err(invalid(format!("omega must be positive, got {omega}")));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::OutOfScope(format!(
            "quantized orbits need Q > 0 (got {q})"
        )));
    }
    let (k1s, k2s) = ((k1 as f64).powi(2), (k2 as f64).powi(2));
    if !(k2 != 0 && k1s > k2s) {
        return Err(invalid(format!(
            "k1^2 > k2^2 >= 1 violated (k1 = {k1}, k2 = {k2})"
        )));
    }
    let d = k1s - k2s;
    Ok((q * k2s / d, q / (omega * omega) * k1s / d))
}

/// Time average of U over one oscillator period: E/2 + Q/(2ρ1ρ2).
pub fn osc_mean_potential(p: &OscParams, orbit: &OscOrbit) -> Result<f64> {
    orbit.validate(p)?;
    if orbit.rho1 == 0.0 {
        return Err(Error::Singular("mean potential needs rho1 > 0".into()));
    }
    let om2 = p.omega * p.omega;
    let e = 0.5 * om2 * (orbit.rho1.powi(2) + orbit.rho2.powi(2) + orbit.z0.powi(2));
    Ok(0.5 * e + 0.5 * p.q / (orbit.rho1 * orbit.rho2))
}

/// Torsion numerator and denominator specialised to U; m is taken from the
/// state.
pub fn osc_torsion_terms(p: &OscParams, state: &PhaseState) -> Result<(f64, f64)> {
    let rho = state.require_off_axis("oscillator torsion")?;
    let PhaseState {
        x,
        y,
        z,
        vx,
        vy,
        vz,
        ..
    } = *state;
    let rho2 = rho * rho;
    let rho4 = rho2 * rho2;
    let rho8 = rho4 * rho4;
    let om2 = p.omega * p.omega;
    let w = om2 * rho4;
    let g = p.q - w;
    let rr = x * vx + y * vy;
    let m = x * vy - y * vx;
    let num = p.q * m * (g * vz + 4.0 * om2 * rho2 * rr * z) / rho8;
    let den = (g * g * (m * m + rho2 * vz * vz)
        + 2.0 * w * g * rr * z * vz
        + w * w * (vx * vx + vy * vy) * z * z)
        / rho8;
    Ok((num, den))
}

pub fn osc_planarity(p: &OscParams, state: &PhaseState, c: &MotionConstants) -> Result<Planarity> {
    check_q(c, p.q)?;
    let (num, den) = osc_torsion_terms(p, state)?;
    let zero = |v: f64, scale: f64| v.abs() <= TORSION_TOL * scale.max(1.0);
    let k = c.separation;
    let verdict = if p.q == 0.0 {
        PlanarityVerdict::PlanarQZero
    } else if zero(c.energy - k, c.energy.abs()) {
        PlanarityVerdict::PlanarEquatorial
    } else if zero(c.m_z, c.m_eff.abs()) {
        let radial_width = k * k - (p.omega * c.m_eff).powi(2);
        if radial_width <= DEGENERACY_TOL * k * k {
            PlanarityVerdict::PlanarDegenerate
        } else {
            PlanarityVerdict::PlanarMeridional
        }
    } else {
        PlanarityVerdict::NonPlanar
    };
    Ok(Planarity::new(verdict, num, den))
}

/// Bohr–Sommerfeld level (|M| + 2n_ρ + n_z + 3/2)Ω.
pub fn osc_semiclassical(p: &OscParams, m: i64, n_rho: u32, n_z: u32) -> f64 {
    let m_eff = ((m as f64).powi(2) + p.q).sqrt();
    (m_eff + 2.0 * n_rho as f64 + n_z as f64 + 1.5) * p.omega
}

/// Period of ρ(t), half the oscillator period.
pub fn osc_radial_period(p: &OscParams) -> f64 {
    0.5 * TAU / p.omega
}
