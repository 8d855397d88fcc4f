use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::{check_bounded, coul_bounds, coul_constants_from_bounds, DEGENERACY_TOL};
use crate::error::{inadmissible, invalid, Error, Result};
use crate::orbit::OrbitSample;
use crate::oscillator::check_q;
use crate::params::{nearly_equal, CoulParams, MotionConstants, Sense};
use crate::phase::{from_spherical, wound_atan, PhaseState, Spherical};

const KEPLER_TOL: f64 = 1e-14;
const KEPLER_MAX_ITER: usize = 50;

/// Geometric constants of a bounded orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulOrbit {
    pub r1: f64,
    pub r2: f64,
    pub theta0: f64,
    pub phi0: f64,
    /// Radial phase: r(t0) = (r1 + r2)/2, increasing.
    pub t0: f64,
    pub beta0: f64,
}

impl CoulOrbit {
    pub fn new(r1: f64, r2: f64, theta0: f64, phi0: f64, t0: f64, beta0: f64) -> Self {
        Self {
            r1,
            r2,
            theta0,
            phi0,
            t0,
            beta0,
        }
    }

    pub fn from_constants(
        p: &CoulParams,
        c: &MotionConstants,
        phi0: f64,
        t0: f64,
        beta0: f64,
    ) -> Result<Self> {
        let b = coul_bounds(p, c)?;
        Ok(Self::new(b.r1, b.r2, b.theta0, phi0, t0, beta0))
    }

    pub fn semi_major(&self) -> f64 {
        0.5 * (self.r1 + self.r2)
    }

    pub fn eccentricity(&self) -> f64 {
        (self.r2 - self.r1) / (self.r1 + self.r2)
    }

    pub fn validate(&self, p: &CoulParams) -> Result<()> {
        let vals = [
            self.r1,
            self.r2,
            self.theta0,
            self.phi0,
            self.t0,
            self.beta0,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(invalid("orbit constants must be finite"));
        }
        if !(self.r1 > 0.0 && self.r1 <= self.r2) {
            return Err(inadmissible(format!(
                "0 < r1 <= r2 violated (r1 = {}, r2 = {})",
                self.r1, self.r2
            )));
        }
        check_theta0(
            p,
            self.theta0,
            2.0 * p.z_strength * self.r1 * self.r2 / (self.r1 + self.r2),
        )
    }
}

pub(super) fn check_theta0(p: &CoulParams, theta0: f64, k: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta0) || (theta0 == 0.0 && p.q > 0.0) {
        return Err(inadmissible(format!(
            "theta0 in (0, pi/2] violated (theta0 = {theta0})"
        )));
    }
    let m_eff2 = k * theta0.sin().powi(2);
    if m_eff2 < p.q && !nearly_equal(m_eff2, p.q, DEGENERACY_TOL) {
        return Err(inadmissible(format!(
            "K sin^2(theta0) >= Q violated ({m_eff2} < {})",
            p.q
        )));
    }
    Ok(())
}

/// Solves u − e·sin u = mean for e < 1, keeping u continuous in `mean`.
fn eccentric_anomaly(mean: f64, e: f64) -> Result<f64> {
    let turns = ((mean + PI) / TAU).floor();
    let reduced = mean - turns * TAU;
    let mut u = if e < 0.8 {
        reduced
    } else {
        PI.copysign(reduced)
    };
    for _ in 0..KEPLER_MAX_ITER {
        let (s, c) = u.sin_cos();
        let f = u - e * s - reduced;
        // near e = 1 and u = 0 the step is dominated by rounding in f
        if f.abs() <= 4.0 * f64::EPSILON * (u.abs() + reduced.abs()) {
            return Ok(u + turns * TAU);
        }
        let du = f / (1.0 - e * c);
        u -= du;
        if du.abs() <= KEPLER_TOL * u.abs().max(1.0) {
            return Ok(u + turns * TAU);
        }
    }
    Err(Error::Numeric(format!(
        "Kepler iteration did not converge (mean anomaly {mean}, e = {e})"
    )))
}

/// Orientation data shared by the bounded and separatrix evaluators: the polar
/// angle follows cos θ = cos θ0·cos w, the azimuth φ0 + (m/|M|)·atan(tan w / sin θ0).
#[derive(Debug, Clone, Copy)]
pub(super) struct Angular {
    pub sin_t0: f64,
    pub cos_t0: f64,
    pub phi0: f64,
    pub ratio: f64,
    pub m: f64,
}

impl Angular {
    pub fn new(theta0: f64, phi0: f64, c: &MotionConstants) -> Self {
        let (sin_t0, mut cos_t0) = theta0.sin_cos();
        if theta0 == FRAC_PI_2 {
            cos_t0 = 0.0;
        }
        Self {
            sin_t0,
            cos_t0,
            phi0,
            ratio: c.m_ratio(),
            m: c.m_z,
        }
    }

    pub fn sample(&self, r: f64, r_dot: f64, w: f64, w_dot: f64, t: f64) -> OrbitSample {
        let (sw, cw) = w.sin_cos();
        if self.sin_t0 == 0.0 {
            // M = 0: Kepler motion in the meridian plane φ = φ0.
            let (sp, cp) = self.phi0.sin_cos();
            let (rho, rho_dot) = (r * sw, r_dot * sw + r * cw * w_dot);
            let state = PhaseState::new(
                [rho * cp, rho * sp, r * cw],
                [rho_dot * cp, rho_dot * sp, r_dot * cw - r * sw * w_dot],
                t,
            );
            return OrbitSample {
                state,
                phi: self.phi0,
            };
        }
        let cos_t = self.cos_t0 * cw;
        // 1 − cos²θ0·cos²w without cancellation
        let sin_t2 = self.sin_t0 * self.sin_t0 + (self.cos_t0 * sw).powi(2);
        let sin_t = sin_t2.sqrt();
        let phi = self.phi0 + self.ratio * wound_atan(w, 1.0, 0.0, self.sin_t0);
        let s = Spherical {
            r,
            theta: sin_t.atan2(cos_t),
            phi,
            r_dot,
            theta_dot: Some(self.cos_t0 * sw * w_dot / sin_t),
            phi_dot: Some(self.m / (r * r * sin_t2)),
        };
        OrbitSample {
            state: from_spherical(&s, t),
            phi,
        }
    }
}

/// Closed-form evaluator for one bounded orbit.
#[derive(Debug, Clone, Copy)]
pub struct CoulTrajectory {
    params: CoulParams,
    orbit: CoulOrbit,
    constants: MotionConstants,
    angular: Angular,
    mean_motion: f64,
    beta: f64,
    sqrt_k: f64,
}

impl CoulTrajectory {
    pub fn new(p: &CoulParams, orbit: &CoulOrbit, sense: Sense) -> Result<Self> {
        let constants = coul_constants_from_bounds(p, orbit, sense)?;
        let a = orbit.semi_major();
        let e = orbit.eccentricity();
        Ok(Self {
            params: *p,
            orbit: *orbit,
            constants,
            angular: Angular::new(orbit.theta0, orbit.phi0, &constants),
            mean_motion: (p.z_strength / (a * a * a)).sqrt(),
            beta: e / (1.0 + (1.0 - e * e).sqrt()),
            sqrt_k: constants.separation.sqrt(),
        })
    }

    pub fn constants(&self) -> MotionConstants {
        self.constants
    }

    pub fn orbit(&self) -> &CoulOrbit {
        &self.orbit
    }

    pub fn params(&self) -> &CoulParams {
        &self.params
    }

    /// T_C = 2πZ(−2E)^(−3/2).
    pub fn radial_period(&self) -> f64 {
        TAU / self.mean_motion
    }

    /// Eccentric anomaly u and its rate.
    fn anomaly(&self, t: f64) -> Result<(f64, f64)> {
        let e = self.orbit.eccentricity();
        let u = eccentric_anomaly(self.mean_motion * (t - self.orbit.t0) + FRAC_PI_2, e)?;
        Ok((u, self.mean_motion / (1.0 - e * u.cos())))
    }

    pub fn radial(&self, t: f64) -> Result<(f64, f64)> {
        let (u, u_dot) = self.anomaly(t)?;
        let (a, e) = (self.orbit.semi_major(), self.orbit.eccentricity());
        let (su, cu) = u.sin_cos();
        Ok((a * (1.0 - e * cu), a * e * su * u_dot))
    }

    pub fn state_at(&self, t: f64) -> Result<PhaseState> {
        Ok(self.sample_at(t)?.state)
    }

    pub fn sample_at(&self, t: f64) -> Result<OrbitSample> {
        let (u, u_dot) = self.anomaly(t)?;
        let (a, e) = (self.orbit.semi_major(), self.orbit.eccentricity());
        let (su, cu) = u.sin_cos();
        let r = a * (1.0 - e * cu);
        let r_dot = a * e * su * u_dot;
        let b = self.beta;
        let true_anomaly = u + 2.0 * (b * su).atan2(1.0 - b * cu);
        let w = true_anomaly - self.orbit.beta0;
        Ok(self.angular.sample(r, r_dot, w, self.sqrt_k / (r * r), t))
    }
}

/// r(t) and ṙ(t) from the Kepler substitution r = a(1 − e·cos u).
pub fn coul_radial_time(p: &CoulParams, orbit: &CoulOrbit, t: f64) -> Result<(f64, f64)> {
    CoulTrajectory::new(p, orbit, Sense::Positive)?.radial(t)
}

pub fn coul_trajectory(
    p: &CoulParams,
    orbit: &CoulOrbit,
    sense: Sense,
    t: f64,
) -> Result<PhaseState> {
    CoulTrajectory::new(p, orbit, sense)?.state_at(t)
}

/// Motion on the sphere r0 = K/Z when 2EK = −Z²; the sign of m is taken from `c`.
pub fn coul_sphere_orbit(
    p: &CoulParams,
    c: &MotionConstants,
    psi0: f64,
    t: f64,
) -> Result<PhaseState> {
    let b = coul_bounds(p, c)?;
    if !b.degenerate {
        return Err(inadmissible(format!(
            "2EK = -Z^2 required (2EK = {}, -Z^2 = {})",
            2.0 * c.energy * c.separation,
            -p.z_strength * p.z_strength
        )));
    }
    let orbit = CoulOrbit::new(b.r1, b.r2, b.theta0, 0.0, 0.0, FRAC_PI_2 - psi0);
    coul_trajectory(p, &orbit, Sense::of(c.m_z), t)
}

/// Polar curve ρ(φ) of an equatorial orbit (M² = K). For E < 0 the phase is
/// fixed by ρ = ρ2 at (|M|/m)(φ − φ0) = π/2; at E = 0 ρ = ρ_min at φ = φ0.
pub fn coul_planar_orbit(p: &CoulParams, c: &MotionConstants, phi0: f64, phi: f64) -> Result<f64> {
    check_q(c, p.q)?;
    let (e, k) = (c.energy, c.separation);
    if !nearly_equal(c.m_eff * c.m_eff, k, DEGENERACY_TOL) {
        return Err(inadmissible(format!(
            "M^2 = K required (M^2 = {}, K = {k})",
            c.m_eff * c.m_eff
        )));
    }
    if c.m_z == 0.0 {
        return Err(invalid("planar orbit needs m != 0"));
    }
    let arg = (phi - phi0) / c.m_ratio();
    if e == 0.0 {
        if !(k > 0.0) {
            return Err(inadmissible(format!("K > 0 violated (K = {k})")));
        }
        let rho_min = k / (2.0 * p.z_strength);
        return Ok(rho_min * (1.0 + (0.5 * arg).tan().powi(2)));
    }
    check_bounded(p, c)?;
    let b = coul_bounds(p, c)?;
    let (r1, r2) = (b.r1, b.r2);
    Ok(2.0 * r1 * r2 / (r1 + r2 - (r2 - r1) * arg.sin()))
}
