//! The oscillatory ring-shaped system U = ½Ω²r² + ½Q/ρ².

mod analysis;
mod trajectory;

pub use analysis::{
    osc_equipotential, osc_mean_potential, osc_periodicity, osc_planarity, osc_quantized_constants,
    osc_radial_period, osc_semiclassical, osc_torsion_terms,
};
pub use trajectory::{
    osc_angmom_q0, osc_cylinder_orbit, osc_projection, osc_trajectory, OscOrbit, OscTrajectory,
};

use serde::{Deserialize, Serialize};

use crate::error::{inadmissible, invalid, Result};
use crate::params::{nearly_equal, MotionConstants, OscParams, Sense};
use crate::phase::{angular_momentum, PhaseState};
use crate::potential::PotentialModel;

/// Relative width below which ρ1 = ρ2 is treated as the cylinder orbit.
pub const DEGENERACY_TOL: f64 = 1e-12;

pub fn osc_potential(p: &OscParams, state: &PhaseState) -> Result<f64> {
    state.require_off_axis("oscillator potential")?;
    Ok(p.value(&state.position()))
}

/// Values of the integrals of motion at one phase point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscInvariants {
    pub h: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    /// Focal parameter of the spheroidal coordinates used for A4 and A5.
    pub a_scale: f64,
}

impl OscInvariants {
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("H", self.h),
            ("A1", self.a1),
            ("A2", self.a2),
            ("A3", self.a3),
            ("A4", self.a4),
            ("A5", self.a5),
        ]
    }
}

pub fn osc_invariants(p: &OscParams, state: &PhaseState, a_scale: f64) -> Result<OscInvariants> {
    if !(a_scale > 0.0 && a_scale.is_finite()) {
        return Err(invalid(format!("a_scale must be positive, got {a_scale}")));
    }
    let rho = state.require_off_axis("oscillator invariants")?;
    let l = angular_momentum(state);
    let l2 = l[0] * l[0] + l[1] * l[1] + l[2] * l[2];
    let r2 = state.position().norm_squared();
    let a1 = l2 + p.q * r2 / (rho * rho);
    let a2 = 0.5 * (state.vz * state.vz + p.omega * p.omega * state.z * state.z);
    let h = state.kinetic_energy() + p.value(&state.position());
    let shift = 2.0 * a_scale * a_scale * (a2 - h);
    Ok(OscInvariants {
        h,
        a1,
        a2,
        a3: l[2],
        a4: a1 + shift,
        a5: a1 - shift,
        a_scale,
    })
}

/// Turning radii and z amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscBounds {
    pub rho1: f64,
    pub rho2: f64,
    pub z0: f64,
    /// K² = Ω²M²: the orbit lies on the cylinder ρ = ρ1 = ρ2.
    pub degenerate: bool,
}

pub(crate) fn check_q(c: &MotionConstants, q: f64) -> Result<()> {
    let implied = c.m_z * c.m_z + q;
    if !nearly_equal(c.m_eff * c.m_eff, implied, 1e-12) {
        return Err(invalid(format!(
            "M^2 = {} does not match m^2 + Q = {implied}",
            c.m_eff * c.m_eff
        )));
    }
    Ok(())
}

pub fn osc_bounds(p: &OscParams, c: &MotionConstants) -> Result<OscBounds> {
    check_q(c, p.q)?;
    let (e, k, m_eff) = (c.energy, c.separation, c.m_eff.abs());
    if !(e.is_finite() && k.is_finite()) {
        return Err(invalid("E and K must be finite"));
    }
    if !(k > 0.0) {
        return Err(inadmissible(format!("K > 0 violated (K = {k})")));
    }
    if e < k {
        return Err(inadmissible(format!("E >= K violated (E = {e}, K = {k})")));
    }
    let om = p.omega;
    let disc = k * k - om * om * m_eff * m_eff;
    if disc < -DEGENERACY_TOL * k * k {
        return Err(inadmissible(format!(
            "K^2 - Omega^2 M^2 >= 0 violated ({disc:e})"
        )));
    }
    let z0 = (2.0 * (e - k)).sqrt() / om;
    if disc <= DEGENERACY_TOL * k * k {
        let rho0 = k.sqrt() / om;
        return Ok(OscBounds {
            rho1: rho0,
            rho2: rho0,
            z0,
            degenerate: true,
        });
    }
    let root = disc.sqrt();
    Ok(OscBounds {
        // K − √(K² − Ω²M²) rewritten to avoid cancellation when M is small.
        rho1: (m_eff * m_eff / (k + root)).sqrt(),
        rho2: (k + root).sqrt() / om,
        z0,
        degenerate: false,
    })
}

pub fn osc_constants_from_bounds(
    p: &OscParams,
    orbit: &OscOrbit,
    sense: Sense,
) -> Result<MotionConstants> {
    orbit.validate(p)?;
    let om2 = p.omega * p.omega;
    let (r1s, r2s) = (orbit.rho1 * orbit.rho1, orbit.rho2 * orbit.rho2);
    let m_eff2 = om2 * r1s * r2s;
    let mut m2 = (m_eff2 - p.q).max(0.0);
    if m2 <= 64.0 * f64::EPSILON * m_eff2 {
        // rounding residue of Ω²ρ1²ρ2² − Q
        m2 = 0.0;
    }
    let k = 0.5 * om2 * (r1s + r2s);
    let e = 0.5 * om2 * (r1s + r2s + orbit.z0 * orbit.z0);
    Ok(MotionConstants::new(e, k, sense.sign() * m2.sqrt(), p.q))
}
