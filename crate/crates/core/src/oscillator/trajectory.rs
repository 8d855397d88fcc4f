use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::{check_q, osc_bounds, DEGENERACY_TOL};
use crate::error::{inadmissible, invalid, Result};
use crate::orbit::OrbitSample;
use crate::params::{nearly_equal, MotionConstants, OscParams, Sense};
use crate::phase::{wound_atan, PhaseState};

/// Geometric orbit constants: turning radii, z amplitude and three phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscOrbit {
    pub rho1: f64,
    pub rho2: f64,
    pub z0: f64,
    pub phi0: f64,
    /// Radial phase: ρ(t0) is the mean of ρ1² and ρ2², increasing.
    pub t0: f64,
    /// z phase: z(t0p) = 0, increasing.
    pub t0p: f64,
}

impl OscOrbit {
    pub fn new(rho1: f64, rho2: f64, z0: f64, phi0: f64, t0: f64, t0p: f64) -> Self {
        Self {
            rho1,
            rho2,
            z0,
            phi0,
            t0,
            t0p,
        }
    }

    pub fn from_constants(
        p: &OscParams,
        c: &MotionConstants,
        phi0: f64,
        t0: f64,
        t0p: f64,
    ) -> Result<Self> {
        let b = osc_bounds(p, c)?;
        Ok(Self::new(b.rho1, b.rho2, b.z0, phi0, t0, t0p))
    }

    /// The angle α with sin α = (ρ2² − ρ1²)/(ρ1² + ρ2²), cos α = 2ρ1ρ2/(ρ1² + ρ2²).
    pub fn alpha(&self) -> f64 {
        (self.rho2 * self.rho2 - self.rho1 * self.rho1).atan2(2.0 * self.rho1 * self.rho2)
    }

    pub fn is_degenerate(&self) -> bool {
        (self.rho2 - self.rho1) < DEGENERACY_TOL * self.rho2
    }

    pub fn validate(&self, p: &OscParams) -> Result<()> {
        let vals = [self.rho1, self.rho2, self.z0, self.phi0, self.t0, self.t0p];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(invalid("orbit constants must be finite"));
        }
        if !(self.rho1 >= 0.0 && self.rho2 > 0.0 && self.rho1 <= self.rho2) {
            return Err(inadmissible(format!(
                "0 <= rho1 <= rho2, rho2 > 0 violated (rho1 = {}, rho2 = {})",
                self.rho1, self.rho2
            )));
        }
        if self.z0 < 0.0 {
            return Err(inadmissible(format!("z0 >= 0 violated (z0 = {})", self.z0)));
        }
        let m_eff2 = (p.omega * self.rho1 * self.rho2).powi(2);
        if m_eff2 < p.q && !nearly_equal(m_eff2, p.q, 1e-12) {
            return Err(inadmissible(format!(
                "Omega^2 rho1^2 rho2^2 >= Q violated ({m_eff2} < {})",
                p.q
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Radial {
    /// ρ² = ½(A + B sin 2s) with s = Ω(t − t0).
    General {
        a: f64,
        b: f64,
        c: f64,
        phi_base: f64,
    },
    /// ρ1 = ρ2: uniform rotation on a cylinder.
    Cylinder { rho0: f64, omega: f64 },
    /// ρ1 = 0 (Q = 0, m = 0): a segment through the axis at φ = φ0.
    Axial { rho2: f64 },
}

/// Closed-form evaluator for one oscillator orbit.
#[derive(Debug, Clone, Copy)]
pub struct OscTrajectory {
    params: OscParams,
    orbit: OscOrbit,
    constants: MotionConstants,
    radial: Radial,
}

impl OscTrajectory {
    pub fn new(p: &OscParams, orbit: &OscOrbit, sense: Sense) -> Result<Self> {
        orbit.validate(p)?;
        let constants = super::osc_constants_from_bounds(p, orbit, sense)?;
        let ratio = constants.m_ratio();
        let (r1s, r2s) = (orbit.rho1 * orbit.rho1, orbit.rho2 * orbit.rho2);
        let radial = if orbit.is_degenerate() {
            Radial::Cylinder {
                rho0: orbit.rho2,
                omega: p.omega * ratio,
            }
        } else if orbit.rho1 == 0.0 {
            Radial::Axial { rho2: orbit.rho2 }
        } else {
            Radial::General {
                a: r1s + r2s,
                b: r2s - r1s,
                c: 2.0 * orbit.rho1 * orbit.rho2,
                phi_base: orbit.phi0 - 0.5 * ratio * orbit.alpha(),
            }
        };
        Ok(Self {
            params: *p,
            orbit: *orbit,
            constants,
            radial,
        })
    }

    pub fn constants(&self) -> MotionConstants {
        self.constants
    }

    pub fn orbit(&self) -> &OscOrbit {
        &self.orbit
    }

    pub fn params(&self) -> &OscParams {
        &self.params
    }

    pub fn state_at(&self, t: f64) -> PhaseState {
        self.sample_at(t).state
    }

    pub fn sample_at(&self, t: f64) -> OrbitSample {
        let om = self.params.omega;
        let o = &self.orbit;
        let s = om * (t - o.t0);
        let ratio = self.constants.m_ratio();
        let (rho, rho_dot, phi, phi_dot) = match self.radial {
            Radial::General { a, b, c, phi_base } => {
                let (sn, cs) = (2.0 * s).sin_cos();
                let rho2 = 0.5 * (a + b * sn);
                let rho = rho2.sqrt();
                (
                    rho,
                    om * b * cs / (2.0 * rho),
                    phi_base + ratio * wound_atan(s, a, b, c),
                    self.constants.m_z / rho2,
                )
            }
            Radial::Cylinder { rho0, omega } => (rho0, 0.0, o.phi0 + omega * (t - o.t0), omega),
            Radial::Axial { rho2 } => {
                let (sn, cs) = (s + FRAC_PI_4).sin_cos();
                (rho2 * sn, om * rho2 * cs, o.phi0, 0.0)
            }
        };
        let (zs, zc) = (om * (t - o.t0p)).sin_cos();
        let (sp, cp) = phi.sin_cos();
        let state = PhaseState::new(
            [rho * cp, rho * sp, o.z0 * zs],
            [
                rho_dot * cp - rho * phi_dot * sp,
                rho_dot * sp + rho * phi_dot * cp,
                o.z0 * om * zc,
            ],
            t,
        );
        OrbitSample { state, phi }
    }
}

pub fn osc_trajectory(p: &OscParams, orbit: &OscOrbit, sense: Sense, t: f64) -> Result<PhaseState> {
    Ok(OscTrajectory::new(p, orbit, sense)?.state_at(t))
}

/// The orbit with K = Ω|M|: rotation at ω = Ωm/|M| on the cylinder
/// ρ0 = √(|M|/Ω), combined with the z oscillation.
pub fn osc_cylinder_orbit(
    p: &OscParams,
    c: &MotionConstants,
    phi0p: f64,
    t0p: f64,
    t: f64,
) -> Result<PhaseState> {
    check_q(c, p.q)?;
    let m_eff = c.m_eff.abs();
    if !nearly_equal(c.separation, p.omega * m_eff, DEGENERACY_TOL) {
        return Err(inadmissible(format!(
            "K = Omega |M| required (K = {}, Omega |M| = {})",
            c.separation,
            p.omega * m_eff
        )));
    }
    if c.energy < c.separation {
        return Err(inadmissible(format!(
            "E >= K violated (E = {}, K = {})",
            c.energy, c.separation
        )));
    }
    let rho0 = (m_eff / p.omega).sqrt();
    let z0 = (2.0 * (c.energy - c.separation)).sqrt() / p.omega;
    let orbit = OscOrbit::new(rho0, rho0, z0, phi0p, 0.0, t0p);
    osc_trajectory(p, &orbit, Sense::of(c.m_z), t)
}

/// Angular momentum of the orbit constants read as a harmonic (Q = 0) orbit,
/// for which m = ±Ωρ1ρ2.
pub fn osc_angmom_q0(orbit: &OscOrbit, omega: f64, sense: Sense) -> [f64; 3] {
    let sigma = sense.sign();
    let (r1, r2) = (orbit.rho1, orbit.rho2);
    let delta = omega * (orbit.t0p - orbit.t0);
    let (sd, cd) = delta.sin_cos();
    if r1 == 0.0 {
        // Segment through the axis in the meridian φ = φ0.
        let mag = -omega * r2 * orbit.z0 * (FRAC_PI_4 + delta).sin();
        let (sp, cp) = orbit.phi0.sin_cos();
        return [-mag * sp, mag * cp, 0.0];
    }
    let pre = omega * orbit.z0 * (0.5 * (r1 * r1 + r2 * r2)).sqrt();
    let half = 0.5 * sigma * orbit.alpha();
    let (plus, minus) = (orbit.phi0 + half, orbit.phi0 - half);
    [
        pre * (plus.sin() * cd + sigma * minus.cos() * sd),
        -pre * (plus.cos() * cd - sigma * minus.sin() * sd),
        sigma * omega * r1 * r2,
    ]
}

/// ρ as a function of the (unwrapped) azimuth for the projection of the orbit
/// onto the xy plane.
pub fn osc_projection(orbit: &OscOrbit, m_ratio: f64, phi: f64) -> Result<f64> {
    if m_ratio == 0.0 || !m_ratio.is_finite() {
        return Err(invalid(
            "projection needs m != 0 (for m = 0 it is a radial segment)",
        ));
    }
    let (r1, r2) = (orbit.rho1, orbit.rho2);
    if orbit.is_degenerate() {
        return Ok(r2);
    }
    let arg = 2.0 * (phi - orbit.phi0) / m_ratio;
    Ok(std::f64::consts::SQRT_2 * r1 * r2
        / (r1 * r1 + r2 * r2 - (r2 * r2 - r1 * r1) * arg.sin()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{osc_invariants, OscInvariants};
    use crate::phase::{angular_momentum, to_cylindrical};
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, TAU};

    fn worked() -> (OscParams, OscOrbit) {
        (
            OscParams::new(1.0, 5.0).unwrap(),
            OscOrbit::new(1.0, 3.0, 2.0, 0.3, 0.2, -0.4),
        )
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn quarter_period_reaches_outer_radius() {
        let (p, orbit) = worked();
        let tr = OscTrajectory::new(&p, &orbit, Sense::Positive).unwrap();
        let s = tr.state_at(orbit.t0 + PI / 4.0);
        assert_relative_eq!(s.rho(), 3.0, max_relative = 1e-15);
        let s = tr.state_at(orbit.t0 - PI / 4.0);
        assert_relative_eq!(s.rho(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn z_phase_convention() {
        let (p, orbit) = worked();
        let s = osc_trajectory(&p, &orbit, Sense::Positive, orbit.t0p).unwrap();
        assert_eq!(s.z, 0.0);
        assert_eq!(s.vz, 2.0);
    }

    #[test]
    fn harmonic_circle() {
        let p = OscParams::new(1.0, 0.0).unwrap();
        let phi0p = 0.7;
        let orbit = OscOrbit::new(1.0, 1.0, 0.0, phi0p, 0.0, 0.0);
        for &t in &[0.0, 0.5, 2.0, 9.0] {
            let s = osc_trajectory(&p, &orbit, Sense::Positive, t).unwrap();
            assert!((s.x - (t + phi0p).cos()).abs() < 1e-15);
            assert!((s.y - (t + phi0p).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn worked_constants_along_orbit() {
        let (p, orbit) = worked();
        let tr = OscTrajectory::new(&p, &orbit, Sense::Positive).unwrap();
        for &t in &[0.0, 1.3, 7.7] {
            let inv = osc_invariants(&p, &tr.state_at(t), 1.0).unwrap();
            assert!(rel(inv.a3, 2.0) < 1e-14);
            assert!(rel(inv.h, 7.0) < 1e-14);
            assert!(rel(inv.h - inv.a2, 5.0) < 1e-14);
        }
    }

    fn max_drift(samples: &[OscInvariants]) -> f64 {
        let first = samples[0].named();
        samples
            .iter()
            .flat_map(|s| {
                s.named()
                    .into_iter()
                    .zip(first)
                    .map(|((_, v), (_, v0))| (v - v0).abs() / v0.abs().max(1.0))
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn conservation_over_ten_radial_periods() {
        let cases = [
            (
                OscParams::new(1.0, 5.0).unwrap(),
                OscOrbit::new(1.0, 3.0, 2.0, 0.3, 0.2, -0.4),
                Sense::Positive,
            ),
            (
                OscParams::new(1.0, 5.0).unwrap(),
                OscOrbit::new(1.0, 3.0, 2.0, 0.3, 0.2, -0.4),
                Sense::Negative,
            ),
            (
                OscParams::new(2.3, 0.7).unwrap(),
                OscOrbit::new(0.6, 1.9, 0.4, -1.0, 3.0, 1.0),
                Sense::Positive,
            ),
            (
                OscParams::new(1.0, 0.0).unwrap(),
                OscOrbit::new(0.5, 2.0, 1.0, 0.0, 0.0, 0.6),
                Sense::Negative,
            ),
        ];
        for (p, orbit, sense) in cases {
            let tr = OscTrajectory::new(&p, &orbit, sense).unwrap();
            let t_end = 10.0 * PI / p.omega;
            let inv: Vec<_> = (0..1000)
                .map(|i| {
                    let s = tr.state_at(t_end * i as f64 / 999.0);
                    osc_invariants(&p, &s, 1.0).unwrap()
                })
                .collect();
            assert!(max_drift(&inv) < 1e-10, "{:?}", orbit);
            let c = tr.constants();
            assert!(rel(inv[0].h, c.energy) < 1e-12);
            assert!(rel(inv[0].a3, c.m_z) < 1e-12);
        }
    }

    #[test]
    fn confinement() {
        let (p, orbit) = worked();
        let tr = OscTrajectory::new(&p, &orbit, Sense::Positive).unwrap();
        for i in 0..2000 {
            let s = tr.state_at(0.01 * i as f64);
            assert!(s.rho() >= 1.0 - 1e-10 && s.rho() <= 3.0 + 1e-10);
            assert!(s.z.abs() <= 2.0 + 1e-10);
        }
    }

    #[test]
    fn velocities_match_finite_differences_and_phi_is_continuous() {
        let (p, orbit) = worked();
        for sense in [Sense::Positive, Sense::Negative] {
            let tr = OscTrajectory::new(&p, &orbit, sense).unwrap();
            let h = 1e-6;
            let mut prev = tr.sample_at(-0.01).phi;
            for i in 0..2000 {
                let t = 0.01 * i as f64;
                let (a, b) = (tr.sample_at(t - h), tr.sample_at(t + h));
                let s = tr.state_at(t);
                let fd = (b.state.position() - a.state.position()) / (2.0 * h);
                assert!((fd - s.velocity()).norm() < 1e-7, "t = {t}");
                let phi = tr.sample_at(t).phi;
                assert!((phi - prev).abs() < 0.05, "jump at t = {t}");
                // unwrapped φ agrees with the instantaneous angle mod 2π
                let wrapped = to_cylindrical(&s).phi;
                let d = (phi - wrapped).rem_euclid(TAU);
                assert!(d < 1e-12 || TAU - d < 1e-12);
                prev = phi;
            }
        }
    }

    #[test]
    fn phi_advance_per_radial_period() {
        let (p, orbit) = worked();
        let tr = OscTrajectory::new(&p, &orbit, Sense::Positive).unwrap();
        let d = tr.sample_at(1.1 + PI).phi - tr.sample_at(1.1).phi;
        assert_relative_eq!(d, PI * 2.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn periodic_closure_after_three_oscillator_periods() {
        let (p, orbit) = worked();
        let tr = OscTrajectory::new(&p, &orbit, Sense::Positive).unwrap();
        for &t in &[0.0, 0.4, 2.2] {
            let (a, b) = (tr.state_at(t), tr.state_at(t + 3.0 * TAU));
            assert!((a.position() - b.position()).norm() < 1e-8);
            assert!((a.velocity() - b.velocity()).norm() < 1e-8);
        }
    }

    #[test]
    fn projection_matches_trajectory() {
        let (p, orbit) = worked();
        for sense in [Sense::Positive, Sense::Negative] {
            let tr = OscTrajectory::new(&p, &orbit, sense).unwrap();
            let ratio = tr.constants().m_ratio();
            for i in 0..300 {
                let smp = tr.sample_at(0.037 * i as f64);
                let rho = osc_projection(&orbit, ratio, smp.phi).unwrap();
                assert!(rel(rho, smp.state.rho()) < 1e-12);
            }
        }
    }

    #[test]
    fn projection_extremes() {
        let (_, orbit) = worked();
        let ratio = 2.0 / 3.0;
        // sin[2(|M|/m)(φ − φ0)] = ±1
        let at = |s: f64| osc_projection(&orbit, ratio, orbit.phi0 + ratio * s / 2.0).unwrap();
        assert_relative_eq!(at(PI / 2.0), 3.0, max_relative = 1e-15);
        assert_relative_eq!(at(-PI / 2.0), 1.0, max_relative = 1e-15);
        let flat = OscOrbit::new(2.0, 2.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(osc_projection(&flat, 0.5, 1.234).unwrap(), 2.0);
        assert!(osc_projection(&orbit, 0.0, 1.0).is_err());
    }

    #[test]
    fn angular_momentum_of_harmonic_orbits() {
        let p = OscParams::new(1.4, 0.0).unwrap();
        let orbits = [
            OscOrbit::new(0.7, 1.6, 0.9, 0.4, 0.3, -0.8),
            OscOrbit::new(1.0, 2.0, 1.5, -2.0, 1.0, 1.0),
            OscOrbit::new(0.0, 1.5, 0.8, 0.9, 0.2, 1.7),
        ];
        for orbit in orbits {
            for sense in [Sense::Positive, Sense::Negative] {
                let l = osc_angmom_q0(&orbit, p.omega, sense);
                let tr = OscTrajectory::new(&p, &orbit, sense).unwrap();
                for i in 0..50 {
                    let s = tr.state_at(0.13 * i as f64);
                    let direct = angular_momentum(&s);
                    for k in 0..3 {
                        assert!((direct[k] - l[k]).abs() < 1e-12, "{orbit:?} {sense:?} {k}");
                    }
                    let dot = l[0] * s.x + l[1] * s.y + l[2] * s.z;
                    assert!(dot.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn angmom_special_cases() {
        let orbit = OscOrbit::new(1.0, 2.0, 0.0, 0.5, 0.0, 1.0);
        let l = osc_angmom_q0(&orbit, 1.0, Sense::Positive);
        assert_eq!((l[0], l[1], l[2]), (0.0, -0.0, 2.0));
        let orbit = OscOrbit::new(1.0, 2.0, 1.0, 0.0, 0.4, 0.4);
        let l = osc_angmom_q0(&orbit, 1.0, Sense::Positive);
        let (pre, a) = ((2.5f64).sqrt(), orbit.alpha());
        assert_relative_eq!(l[0], pre * (a / 2.0).sin(), max_relative = 1e-15);
        assert_relative_eq!(l[1], -pre * (a / 2.0).cos(), max_relative = 1e-15);
    }

    #[test]
    fn cylinder_orbit_examples() {
        // k1 = 2, k2 = 1: ρ0 = √2, ω = 1/2, period 4π
        let p = OscParams::new(1.0, 3.0).unwrap();
        let c = MotionConstants::new(2.5, 2.0, 1.0, 3.0);
        let s0 = osc_cylinder_orbit(&p, &c, 0.3, 0.1, 0.7).unwrap();
        assert_relative_eq!(s0.rho(), 2f64.sqrt(), max_relative = 1e-15);
        let ph = to_cylindrical(&s0).phi_dot.unwrap();
        assert_relative_eq!(ph, 0.5, max_relative = 1e-14);
        let s1 = osc_cylinder_orbit(&p, &c, 0.3, 0.1, 0.7 + 2.0 * TAU).unwrap();
        assert!((s0.position() - s1.position()).norm() < 1e-12);
        assert!((s0.velocity() - s1.velocity()).norm() < 1e-12);
        let s = osc_cylinder_orbit(&p, &c, 0.3, 0.1, 0.0).unwrap();
        assert!((s.y.atan2(s.x) - 0.3).abs() < 1e-15);

        let harmonic = OscParams::new(1.0, 0.0).unwrap();
        let c = MotionConstants::new(3.0, 2.0, 2.0, 0.0);
        let s = osc_cylinder_orbit(&harmonic, &c, 0.0, 0.0, 0.3).unwrap();
        assert_relative_eq!(
            to_cylindrical(&s).phi_dot.unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(s.rho().powi(2), 2.0, max_relative = 1e-14);

        let c = MotionConstants::new(3.0, 2.5, 1.0, 3.0);
        assert!(osc_cylinder_orbit(&p, &c, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn degenerate_branch_matches_nearby_general_orbit() {
        let p = OscParams::new(1.0, 3.0).unwrap();
        let exact = OscOrbit::new(2f64.sqrt(), 2f64.sqrt(), 0.5, 0.2, 0.3, 0.0);
        let mut near = exact;
        near.rho2 *= 1.0 + 1e-9;
        let (a, b) = (
            OscTrajectory::new(&p, &exact, Sense::Positive).unwrap(),
            OscTrajectory::new(&p, &near, Sense::Positive).unwrap(),
        );
        for &t in &[0.0, 1.0, 5.0] {
            assert!((a.state_at(t).position() - b.state_at(t).position()).norm() < 1e-7);
        }
    }

    #[test]
    fn meridional_orbits_stay_in_their_plane() {
        let p = OscParams::new(1.0, 4.0).unwrap();
        let orbit = OscOrbit::new(1.0, 2.0, 0.5, 0.8, 0.0, 0.3);
        let tr = OscTrajectory::new(&p, &orbit, Sense::Positive).unwrap();
        assert_eq!(tr.constants().m_z, 0.0);
        let axial = OscTrajectory::new(
            &OscParams::new(1.0, 0.0).unwrap(),
            &OscOrbit::new(0.0, 2.0, 0.5, 0.8, 0.0, 0.3),
            Sense::Positive,
        )
        .unwrap();
        for t in [0.1, 1.0, 2.9] {
            for tr in [&tr, &axial] {
                let s = tr.state_at(t);
                assert!((s.y * 0.8f64.cos() - s.x * 0.8f64.sin()).abs() < 1e-15);
                assert!((s.vy * 0.8f64.cos() - s.vx * 0.8f64.sin()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_invalid_orbits() {
        let p = OscParams::new(1.0, 5.0).unwrap();
        assert!(OscTrajectory::new(
            &p,
            &OscOrbit::new(3.0, 1.0, 0.0, 0.0, 0.0, 0.0),
            Sense::Positive
        )
        .is_err());
        assert!(OscTrajectory::new(
            &p,
            &OscOrbit::new(1.0, 2.0, 0.0, 0.0, 0.0, 0.0),
            Sense::Positive
        )
        .is_err());
        assert!(OscTrajectory::new(
            &p,
            &OscOrbit::new(1.0, 3.0, -1.0, 0.0, 0.0, 0.0),
            Sense::Positive
        )
        .is_err());
    }
}
