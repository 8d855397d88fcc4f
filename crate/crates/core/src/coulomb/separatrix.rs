use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::trajectory::{check_theta0, Angular};
use super::DEGENERACY_TOL;
use crate::error::{inadmissible, invalid, Error, Result};
use crate::orbit::OrbitSample;
use crate::oscillator::check_q;
use crate::params::{CoulParams, MotionConstants, Sense};
use crate::phase::PhaseState;

/// E = 0 orbit data. At t0 the particle is at closest approach r_min.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparatrixOrbit {
    pub r_min: f64,
    pub theta0: f64,
    pub phi0: f64,
    pub beta0: f64,
    pub t0: f64,
}

impl SeparatrixOrbit {
    pub fn new(r_min: f64, theta0: f64, phi0: f64, beta0: f64, t0: f64) -> Self {
        Self {
            r_min,
            theta0,
            phi0,
            beta0,
            t0,
        }
    }

    pub fn from_constants(
        p: &CoulParams,
        c: &MotionConstants,
        phi0: f64,
        beta0: f64,
        t0: f64,
    ) -> Result<Self> {
        check_q(c, p.q)?;
        let k = c.separation;
        if !(k > 0.0) {
            return Err(inadmissible(format!("K > 0 violated (K = {k})")));
        }
        if c.energy.abs() > DEGENERACY_TOL * p.z_strength * p.z_strength / k {
            return Err(inadmissible(format!("E = 0 required (E = {})", c.energy)));
        }
        let m2 = c.m_eff * c.m_eff;
        if m2 > k * (1.0 + DEGENERACY_TOL) {
            return Err(inadmissible(format!(
                "K >= M^2 violated (K = {k}, M^2 = {m2})"
            )));
        }
        let theta0 = (c.m_eff.abs() / k.sqrt()).min(1.0).asin();
        Ok(Self::new(k / (2.0 * p.z_strength), theta0, phi0, beta0, t0))
    }

    pub fn validate(&self, p: &CoulParams) -> Result<()> {
        let vals = [self.r_min, self.theta0, self.phi0, self.beta0, self.t0];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(invalid("orbit constants must be finite"));
        }
        if !(self.r_min > 0.0) {
            return Err(inadmissible(format!(
                "r_min > 0 violated (r_min = {})",
                self.r_min
            )));
        }
        check_theta0(p, self.theta0, 2.0 * p.z_strength * self.r_min)
    }

    pub fn constants(&self, p: &CoulParams, sense: Sense) -> Result<MotionConstants> {
        self.validate(p)?;
        let k = 2.0 * p.z_strength * self.r_min;
        let m_eff2 = k * self.theta0.sin().powi(2);
        let mut m2 = (m_eff2 - p.q).max(0.0);
        if m2 <= 64.0 * f64::EPSILON * m_eff2 {
            m2 = 0.0;
        }
        Ok(MotionConstants::new(0.0, k, sense.sign() * m2.sqrt(), p.q))
    }
}

/// The root r ≥ r_min of r³ + 3r²r_min − 4r_min³ − (9/2)Z(t − t0)² = 0.
///
/// For dt ≠ 0 the cubic has one real root; at dt = 0 the others coincide at
/// −2r_min. The closed form avoids the cancellation in r − r_min.
pub fn separatrix_radius(z: f64, r_min: f64, dt: f64) -> Result<f64> {
    Ok(separatrix_root(z, r_min, dt)?.0)
}

/// The root and its excess r − r_min, both free of cancellation.
fn separatrix_root(z: f64, r_min: f64, dt: f64) -> Result<(f64, f64)> {
    let c = 4.5 * z * dt * dt;
    let r3 = r_min * r_min * r_min;
    let delta = c * r3 + 0.25 * c * c;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Numeric(format!(
            "separatrix cubic lost its unique real root (discriminant {delta})"
        )));
    }
    let lift = 0.5 * c + delta.sqrt();
    let u1 = (r3 + lift).cbrt();
    let gap = lift / (u1 * u1 + u1 * r_min + r_min * r_min);
    let excess = gap * gap / u1;
    let r = r_min + excess;
    if !(excess >= 0.0 && r.is_finite()) {
        return Err(Error::Numeric(format!(
            "separatrix root {r} below r_min {r_min}"
        )));
    }
    Ok((r, excess))
}

pub fn separatrix_residual(z: f64, r_min: f64, dt: f64, r: f64) -> f64 {
    r * r * r + 3.0 * r * r * r_min - 4.0 * r_min.powi(3) - 4.5 * z * dt * dt
}

/// Closed-form evaluator on the E = 0 separatrix.
#[derive(Debug, Clone, Copy)]
pub struct SeparatrixTrajectory {
    params: CoulParams,
    orbit: SeparatrixOrbit,
    constants: MotionConstants,
    angular: Angular,
    time_scale: f64,
}

impl SeparatrixTrajectory {
    pub fn new(p: &CoulParams, orbit: &SeparatrixOrbit, sense: Sense) -> Result<Self> {
        let constants = orbit.constants(p, sense)?;
        Ok(Self {
            params: *p,
            orbit: *orbit,
            constants,
            angular: Angular::new(orbit.theta0, orbit.phi0, &constants),
            time_scale: (2.0 * orbit.r_min.powi(3) / p.z_strength).sqrt(),
        })
    }

    pub fn constants(&self) -> MotionConstants {
        self.constants
    }

    pub fn orbit(&self) -> &SeparatrixOrbit {
        &self.orbit
    }

    pub fn params(&self) -> &CoulParams {
        &self.params
    }

    pub fn state_at(&self, t: f64) -> Result<PhaseState> {
        Ok(self.sample_at(t)?.state)
    }

    pub fn sample_at(&self, t: f64) -> Result<OrbitSample> {
        let r_min = self.orbit.r_min;
        let dt = t - self.orbit.t0;
        let (r, excess) = separatrix_root(self.params.z_strength, r_min, dt)?;
        // D = tan(ν/2) on the parabola r = r_min(1 + D²)
        let d = (excess / r_min).sqrt().copysign(dt);
        let d_dot = 1.0 / (self.time_scale * (1.0 + d * d));
        let true_anomaly = 2.0 * d.atan();
        let w = true_anomaly - self.orbit.beta0 + FRAC_PI_2;
        let w_dot = 2.0 * d_dot / (1.0 + d * d);
        Ok(self.angular.sample(r, 2.0 * r_min * d * d_dot, w, w_dot, t))
    }
}

pub fn coul_separatrix(
    p: &CoulParams,
    orbit: &SeparatrixOrbit,
    sense: Sense,
    t: f64,
) -> Result<PhaseState> {
    SeparatrixTrajectory::new(p, orbit, sense)?.state_at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coulomb::{coul_bounds, coul_invariants, CoulOrbit, CoulTrajectory};
    use crate::oracle::integrate_at;

    fn bisect(z: f64, r_min: f64, dt: f64) -> f64 {
        let (mut lo, mut hi) = (r_min, r_min + 10.0 * (1.0 + (z * dt * dt).cbrt()));
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if separatrix_residual(z, r_min, dt, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn closest_approach_and_bisection() {
        assert_eq!(separatrix_radius(1.0, 0.5, 0.0).unwrap(), 0.5);
        let r = separatrix_radius(1.0, 0.5, 1.0).unwrap();
        assert!((r - bisect(1.0, 0.5, 1.0)).abs() < 1e-14);
        assert!((r * r * r + 1.5 * r * r - 5.0).abs() < 1e-13);
        for &dt in &[-3.0, 1e-4, 0.2, 7.0, 300.0] {
            let r = separatrix_radius(2.0, 0.3, dt).unwrap();
            assert!((r - bisect(2.0, 0.3, dt)).abs() < 1e-12 * r);
        }
    }

    #[test]
    fn asymptotic_growth() {
        let dt = 1e6;
        let r = separatrix_radius(1.0, 0.5, dt).unwrap();
        let asym = 4.5f64.cbrt() * dt.powf(2.0 / 3.0);
        assert!((r / asym - 1.0).abs() < 1e-3);
    }

    #[test]
    fn conserved_along_separatrix() {
        let p = CoulParams::new(1.0, 0.6).unwrap();
        let c = MotionConstants::new(0.0, 2.0, 0.8, 0.6);
        let orbit = SeparatrixOrbit::from_constants(&p, &c, 0.3, 0.7, 1.0).unwrap();
        assert_eq!(orbit.r_min, 1.0);
        let tr = SeparatrixTrajectory::new(&p, &orbit, Sense::Positive).unwrap();
        let first = coul_invariants(&p, &tr.state_at(-20.0).unwrap()).unwrap();
        for i in 0..200 {
            let t = -20.0 + 0.2 * i as f64;
            let s = tr.state_at(t).unwrap();
            assert!(s.radius() >= orbit.r_min * (1.0 - 1e-15));
            let inv = coul_invariants(&p, &s).unwrap();
            assert!(inv.h.abs() < 1e-13);
            assert!((inv.b1 - 2.0).abs() < 1e-12);
            assert!((inv.b2 - 0.8).abs() < 1e-13);
            assert!((inv.b3 - first.b3).abs() < 1e-12);
        }
    }

    #[test]
    fn velocity_and_oracle() {
        let p = CoulParams::new(1.5, 0.4).unwrap();
        let orbit = SeparatrixOrbit::new(0.8, 1.0, 0.1, 0.4, 0.0);
        let tr = SeparatrixTrajectory::new(&p, &orbit, Sense::Negative).unwrap();
        let h = 1e-5;
        for &t in &[-2.0, -1e-3, 0.0, 0.5, 4.0] {
            let s = tr.state_at(t).unwrap();
            let fd = (tr.state_at(t + h).unwrap().position()
                - tr.state_at(t - h).unwrap().position())
                / (2.0 * h);
            assert!((fd - s.velocity()).norm() < 1e-8, "t={t}");
        }
        let times: Vec<f64> = (1..=40).map(|i| -5.0 + 0.25 * i as f64).collect();
        let run = integrate_at(&p, &tr.state_at(-5.0).unwrap(), &times, 1e-12, &[]).unwrap();
        for s in &run.samples {
            assert!((tr.state_at(s.t).unwrap().position() - s.position()).norm() < 1e-7);
        }
    }

    // E → 0⁻: the bounded orbit near perihelion approaches the separatrix.
    #[test]
    fn bounded_limit() {
        let p = CoulParams::new(1.0, 0.5).unwrap();
        let (k, m) = (2.0, 1.0);
        let sep = SeparatrixOrbit::from_constants(
            &p,
            &MotionConstants::new(0.0, k, m, 0.5),
            0.0,
            0.3,
            0.0,
        )
        .unwrap();
        let e = -1e-7;
        let b = coul_bounds(&p, &MotionConstants::new(e, k, m, 0.5)).unwrap();
        assert!((b.r1 - sep.r_min).abs() < 1e-6);
        let a = 0.5 * (b.r1 + b.r2);
        // perihelion sits a quarter radial period before t0
        let t_peri = 0.25 * std::f64::consts::TAU * (a * a * a).sqrt();
        // the bounded polar phase is measured a quarter turn later
        let orbit = CoulOrbit::new(b.r1, b.r2, b.theta0, 0.0, t_peri, 0.3 - FRAC_PI_2);
        let bounded = CoulTrajectory::new(&p, &orbit, Sense::Positive).unwrap();
        let tr = SeparatrixTrajectory::new(&p, &sep, Sense::Positive).unwrap();
        for &t in &[-1.0, 0.0, 0.5, 2.0] {
            let d = (bounded.state_at(t).unwrap().position() - tr.state_at(t).unwrap().position())
                .norm();
            assert!(d < 1e-4, "t={t} d={d}");
        }
    }

    #[test]
    fn rejects_bad_data() {
        let p = CoulParams::new(1.0, 1.0).unwrap();
        assert!(SeparatrixOrbit::new(0.0, 1.0, 0.0, 0.0, 0.0)
            .validate(&p)
            .is_err());
        assert!(SeparatrixOrbit::new(1.0, 0.3, 0.0, 0.0, 0.0)
            .validate(&p)
            .is_err());
        let c = MotionConstants::new(-0.1, 2.0, 0.5, 1.0);
        assert!(SeparatrixOrbit::from_constants(&p, &c, 0.0, 0.0, 0.0).is_err());
    }
}
