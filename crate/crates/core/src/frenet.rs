//! Torsion and curvature of trajectories.
//!
//! Sign convention: τ = −[(ṙ∧r̈)·r⃛]/|ṙ∧r̈|², so the right-handed helix
//! (cos t, sin t, t) has τ = −1/2. Textbooks usually use the opposite sign.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::phase::PhaseState;
use crate::potential::PotentialModel;

/// Relative size of |ṙ∧r̈| below which the torsion is reported as undefined.
const COLLINEAR_TOL: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    /// −num/den; `None` for straight or degenerate instants.
    pub torsion: Option<f64>,
    /// √den/den_k; `None` when the speed vanishes.
    pub curvature: Option<f64>,
    pub num: f64,
    pub den: f64,
    /// |ṙ|³
    pub den_k: f64,
}

impl FrenetData {
    fn from_terms(num: f64, den: f64, den_k: f64, degenerate: bool) -> Self {
        Self {
            torsion: (!degenerate && den > 0.0).then(|| -num / den),
            curvature: (den_k > 0.0).then(|| den.sqrt() / den_k),
            num,
            den,
            den_k,
        }
    }
}

fn collinear(cross_norm2: f64, a: &Vector3<f64>, b: &Vector3<f64>) -> bool {
    cross_norm2 <= (COLLINEAR_TOL * a.norm() * b.norm()).powi(2)
}

/// Torsion and curvature from the first three derivatives of any
/// parametrisation.
pub fn frenet_parametric(
    rdot: &Vector3<f64>,
    rddot: &Vector3<f64>,
    rdddot: &Vector3<f64>,
) -> FrenetData {
    let c = rdot.cross(rddot);
    let den = c.norm_squared();
    FrenetData::from_terms(
        c.dot(rdddot),
        den,
        rdot.norm().powi(3),
        collinear(den, rdot, rddot),
    )
}

/// NUM and DEN written out component by component.
pub fn torsion_terms_expanded(
    grad: &Vector3<f64>,
    hess: &Matrix3<f64>,
    v: &Vector3<f64>,
    mass: f64,
) -> (f64, f64) {
    let (vx, vy, vz) = (v.x, v.y, v.z);
    let (gx, gy, gz) = (grad.x, grad.y, grad.z);
    let c1 = vy * gz - vz * gy;
    let c2 = vz * gx - vx * gz;
    let c3 = vx * gy - vy * gx;
    let h = |i: usize, j: usize| hess[(i, j)];
    let num = c1 * (h(0, 0) * vx + h(1, 0) * vy + h(2, 0) * vz)
        + c2 * (h(0, 1) * vx + h(1, 1) * vy + h(2, 1) * vz)
        + c3 * (h(0, 2) * vx + h(1, 2) * vy + h(2, 2) * vz);
    let den = c1 * c1 + c2 * c2 + c3 * c3;
    let mu2 = mass * mass;
    (num / mu2, den / mu2)
}

/// NUM = (ṙ∧∇V)·(Hess V ṙ)/μ², DEN = |ṙ∧∇V|²/μ².
pub fn torsion_terms_compact(
    grad: &Vector3<f64>,
    hess: &Matrix3<f64>,
    v: &Vector3<f64>,
    mass: f64,
) -> (f64, f64) {
    let c = v.cross(grad);
    let mu2 = mass * mass;
    (c.dot(&(hess * v)) / mu2, c.norm_squared() / mu2)
}

/// Torsion and curvature of the trajectory through `state` for H = p²/2μ + V,
/// from position and velocity alone.
pub fn frenet_conservative<P: PotentialModel + ?Sized>(
    potential: &P,
    state: &PhaseState,
    mass: f64,
) -> Result<FrenetData> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid(format!("mass must be positive, got {mass}")));
    }
    let pos = state.position();
    potential.check_position(&pos)?;
    let grad = potential.gradient(&pos);
    let hess = potential.hessian(&pos);
    let v = state.velocity();
    let (num, den) = torsion_terms_expanded(&grad, &hess, &v, mass);
    let degenerate = collinear(den * mass * mass, &v, &grad);
    Ok(FrenetData::from_terms(
        num,
        den,
        v.norm().powi(3),
        degenerate,
    ))
}

/// Derivatives of a general Hamiltonian H(x, p, t) with ẋ = p/μ.
///
/// Only the position gradient and Hessian are required. The momentum-position
/// block and the mixed time derivative default to zero.
pub trait HamiltonianDerivatives {
    fn grad_x(&self, state: &PhaseState) -> Vector3<f64>;
    fn hess_xx(&self, state: &PhaseState) -> Matrix3<f64>;

    /// ∂²H/∂p_j∂x_i at (i, j).
    fn hess_px(&self, _state: &PhaseState) -> Matrix3<f64> {
        Matrix3::zeros()
    }

    /// ∂²H/∂t∂x_i.
    fn mixed_t(&self, _state: &PhaseState) -> Vector3<f64> {
        Vector3::zeros()
    }
}

/// Adapter for time-independent potentials.
pub struct Conservative<'a, P: ?Sized>(pub &'a P);

impl<P: PotentialModel + ?Sized> HamiltonianDerivatives for Conservative<'_, P> {
    fn grad_x(&self, state: &PhaseState) -> Vector3<f64> {
        self.0.gradient(&state.position())
    }
    fn hess_xx(&self, state: &PhaseState) -> Matrix3<f64> {
        self.0.hessian(&state.position())
    }
}

/// r̈ and r⃛ from Hamilton's equations, then the parametric formulas.
pub fn frenet_hamiltonian<H: HamiltonianDerivatives + ?Sized>(
    h: &H,
    state: &PhaseState,
    mass: f64,
) -> Result<FrenetData> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid(format!("mass must be positive, got {mass}")));
    }
    let v = state.velocity();
    let g = h.grad_x(state);
    let acc = -g / mass;
    let jerk = -(h.hess_xx(state) * v - h.hess_px(state) * g + h.mixed_t(state)) / mass;
    Ok(frenet_parametric(&v, &acc, &jerk))
}
