//! Phase-space state of a unit-mass particle and the coordinate systems used
//! throughout the crate.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cartesian position, velocity and time of a particle of unit (reduced) mass.
///
/// Since the mass is one, the velocity doubles as the linear momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub t: f64,
}

impl PhaseState {
    pub fn new(position: [f64; 3], velocity: [f64; 3], t: f64) -> Self {
        Self {
            x: position[0],
            y: position[1],
            z: position[2],
            vx: velocity[0],
            vy: velocity[1],
            vz: velocity[2],
            t,
        }
    }

    pub fn from_vectors(position: Vector3<f64>, velocity: Vector3<f64>, t: f64) -> Self {
        Self::new(position.into(), velocity.into(), t)
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn velocity(&self) -> Vector3<f64> {
        Vector3::new(self.vx, self.vy, self.vz)
    }

    /// Cylindrical radius ρ = √(x² + y²).
    pub fn rho(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Spherical radius r = |position|.
    pub fn radius(&self) -> f64 {
        self.position().norm()
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.velocity().norm_squared()
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.z, self.vx, self.vy, self.vz, self.t]
            .iter()
            .all(|v| v.is_finite())
    }

    pub(crate) fn require_off_axis(&self, what: &str) -> Result<f64> {
        let rho = self.rho();
        if rho > 0.0 && rho.is_finite() {
            Ok(rho)
        } else {
            Err(Error::Singular(format!(
                "{what}: position lies on the symmetry axis (rho = 0)"
            )))
        }
    }
}

/// Circular cylindrical coordinates (ρ, φ, z) and their rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylindrical {
    pub rho: f64,
    pub phi: f64,
    pub z: f64,
    pub rho_dot: f64,
    /// `None` on the axis, where the azimuthal rate is undefined.
    pub phi_dot: Option<f64>,
    pub z_dot: f64,
}

/// Spherical coordinates (r, θ, φ) and their rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spherical {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub r_dot: f64,
    pub theta_dot: Option<f64>,
    pub phi_dot: Option<f64>,
}

/// Instantaneous cylindrical coordinates with φ in (−π, π].
///
/// On the axis φ is reported as 0, the radial rate as the in-plane speed and
/// `phi_dot` as `None`.
pub fn to_cylindrical(state: &PhaseState) -> Cylindrical {
    let rho = state.rho();
    if rho == 0.0 {
        return Cylindrical {
            rho,
            phi: 0.0,
            z: state.z,
            rho_dot: state.vx.hypot(state.vy),
            phi_dot: None,
            z_dot: state.vz,
        };
    }
    let rho2 = rho * rho;
    Cylindrical {
        rho,
        phi: principal_angle(state.y.atan2(state.x)),
        z: state.z,
        rho_dot: (state.x * state.vx + state.y * state.vy) / rho,
        phi_dot: Some((state.x * state.vy - state.y * state.vx) / rho2),
        z_dot: state.vz,
    }
}

/// Spherical coordinates with θ in [0, π] and φ in (−π, π].
pub fn to_spherical(state: &PhaseState) -> Result<Spherical> {
    let r = state.radius();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Singular(
            "spherical coordinates undefined at r = 0".into(),
        ));
    }
    let rho = state.rho();
    let theta = rho.atan2(state.z);
    let r_dot = state.position().dot(&state.velocity()) / r;
    let (phi, theta_dot, phi_dot) = if rho == 0.0 {
        (0.0, None, None)
    } else {
        let rho_dot = (state.x * state.vx + state.y * state.vy) / rho;
        // d/dt atan2(ρ, z) = (z ρ̇ − ρ ż) / r²
        let theta_dot = (state.z * rho_dot - rho * state.vz) / (r * r);
        let phi_dot = (state.x * state.vy - state.y * state.vx) / (rho * rho);
        (
            principal_angle(state.y.atan2(state.x)),
            Some(theta_dot),
            Some(phi_dot),
        )
    };
    Ok(Spherical {
        r,
        theta,
        phi,
        r_dot,
        theta_dot,
        phi_dot,
    })
}

/// Rebuilds a Cartesian state from cylindrical coordinates.
pub fn from_cylindrical(c: &Cylindrical, t: f64) -> PhaseState {
    let (s, co) = c.phi.sin_cos();
    let phi_dot = c.phi_dot.unwrap_or(0.0);
    PhaseState {
        x: c.rho * co,
        y: c.rho * s,
        z: c.z,
        vx: c.rho_dot * co - c.rho * phi_dot * s,
        vy: c.rho_dot * s + c.rho * phi_dot * co,
        vz: c.z_dot,
        t,
    }
}

/// Rebuilds a Cartesian state from spherical coordinates.
pub fn from_spherical(s: &Spherical, t: f64) -> PhaseState {
    let (st, ct) = s.theta.sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    let theta_dot = s.theta_dot.unwrap_or(0.0);
    let phi_dot = s.phi_dot.unwrap_or(0.0);
    let r = s.r;
    let e_r = Vector3::new(st * cp, st * sp, ct);
    let e_theta = Vector3::new(ct * cp, ct * sp, -st);
    let e_phi = Vector3::new(-sp, cp, 0.0);
    let pos = r * e_r;
    let vel = s.r_dot * e_r + r * theta_dot * e_theta + r * st * phi_dot * e_phi;
    PhaseState::from_vectors(pos, vel, t)
}

/// Angular momentum ℓ = r × v for unit mass.
pub fn angular_momentum(state: &PhaseState) -> [f64; 3] {
    state.position().cross(&state.velocity()).into()
}

/// Maps an angle into (−π, π].
pub(crate) fn principal_angle(a: f64) -> f64 {
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Continuous branch of `atan((a·tan s + b) / c)` for `c > 0`.
///
/// The result increases by exactly π every time `s` advances by π and equals
/// `atan(b / c)` at `s = 0`.
pub(crate) fn wound_atan(s: f64, a: f64, b: f64, c: f64) -> f64 {
    let n = ((s + 0.5 * PI) / PI).floor();
    let reduced = s - n * PI;
    let (sn, cs) = reduced.sin_cos();
    // cs >= 0 on the reduced interval, so atan2 stays on the principal branch.
    n * PI + (a * sn + b * cs).atan2(c * cs)
}
