//! Potentials with first and second derivatives, as consumed by the torsion
//! formulas and the numerical integrator.

use nalgebra::{Matrix3, Vector3};

use crate::error::{invalid, Error, Result};
use crate::params::{CoulParams, OscParams};

/// Distance from a singular set below which positions are rejected.
pub const SINGULARITY_GUARD: f64 = 1e-10;

/// A time-independent potential energy V(x) with gradient and Hessian.
///
/// Implementations must be stateless: they are evaluated concurrently.
pub trait PotentialModel: Sync {
    fn value(&self, pos: &Vector3<f64>) -> f64;
    fn gradient(&self, pos: &Vector3<f64>) -> Vector3<f64>;
    fn hessian(&self, pos: &Vector3<f64>) -> Matrix3<f64>;

    /// Rejects positions too close to a singularity of the potential.
    fn check_position(&self, _pos: &Vector3<f64>) -> Result<()> {
        Ok(())
    }
}

impl<P: PotentialModel + ?Sized> PotentialModel for &P {
    fn value(&self, pos: &Vector3<f64>) -> f64 {
        (**self).value(pos)
    }
    fn gradient(&self, pos: &Vector3<f64>) -> Vector3<f64> {
        (**self).gradient(pos)
    }
    fn hessian(&self, pos: &Vector3<f64>) -> Matrix3<f64> {
        (**self).hessian(pos)
    }
    fn check_position(&self, pos: &Vector3<f64>) -> Result<()> {
        (**self).check_position(pos)
    }
}

/// V = 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeParticle;

impl PotentialModel for FreeParticle {
    fn value(&self, _pos: &Vector3<f64>) -> f64 {
        0.0
    }
    fn gradient(&self, _pos: &Vector3<f64>) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn hessian(&self, _pos: &Vector3<f64>) -> Matrix3<f64> {
        Matrix3::zeros()
    }
}

// Ring term ½Q/ρ² and its derivatives.
fn ring_gradient(q: f64, pos: &Vector3<f64>) -> Vector3<f64> {
    if q == 0.0 {
        return Vector3::zeros();
    }
    let rho2 = pos.x * pos.x + pos.y * pos.y;
    let f = -q / (rho2 * rho2);
    Vector3::new(f * pos.x, f * pos.y, 0.0)
}

fn ring_hessian(q: f64, pos: &Vector3<f64>) -> Matrix3<f64> {
    if q == 0.0 {
        return Matrix3::zeros();
    }
    let rho2 = pos.x * pos.x + pos.y * pos.y;
    let diag = -q / (rho2 * rho2);
    let cross = 4.0 * q / (rho2 * rho2 * rho2);
    let (x, y) = (pos.x, pos.y);
    Matrix3::new(
        diag + cross * x * x,
        cross * x * y,
        0.0,
        cross * x * y,
        diag + cross * y * y,
        0.0,
        0.0,
        0.0,
        0.0,
    )
}

fn check_ring(q: f64, pos: &Vector3<f64>) -> Result<()> {
    if q > 0.0 && pos.x.hypot(pos.y) < SINGULARITY_GUARD {
        return Err(Error::Singular(
            "position too close to the ring axis".into(),
        ));
    }
    Ok(())
}

impl PotentialModel for OscParams {
    fn value(&self, pos: &Vector3<f64>) -> f64 {
        let rho2 = pos.x * pos.x + pos.y * pos.y;
        let ring = if self.q == 0.0 {
            0.0
        } else {
            0.5 * self.q / rho2
        };
        0.5 * self.omega * self.omega * pos.norm_squared() + ring
    }

    fn gradient(&self, pos: &Vector3<f64>) -> Vector3<f64> {
        self.omega * self.omega * pos + ring_gradient(self.q, pos)
    }

    fn hessian(&self, pos: &Vector3<f64>) -> Matrix3<f64> {
        Matrix3::identity() * (self.omega * self.omega) + ring_hessian(self.q, pos)
    }

    fn check_position(&self, pos: &Vector3<f64>) -> Result<()> {
        check_ring(self.q, pos)
    }
}

impl PotentialModel for CoulParams {
    fn value(&self, pos: &Vector3<f64>) -> f64 {
        let rho2 = pos.x * pos.x + pos.y * pos.y;
        let ring = if self.q == 0.0 {
            0.0
        } else {
            0.5 * self.q / rho2
        };
        -self.z_strength / pos.norm() + ring
    }

    fn gradient(&self, pos: &Vector3<f64>) -> Vector3<f64> {
        let r = pos.norm();
        pos * (self.z_strength / (r * r * r)) + ring_gradient(self.q, pos)
    }

    fn hessian(&self, pos: &Vector3<f64>) -> Matrix3<f64> {
        let r = pos.norm();
        let r3 = r * r * r;
        let kepler = Matrix3::identity() * (self.z_strength / r3)
            - pos * pos.transpose() * (3.0 * self.z_strength / (r3 * r * r));
        kepler + ring_hessian(self.q, pos)
    }

    fn check_position(&self, pos: &Vector3<f64>) -> Result<()> {
        if pos.norm() < SINGULARITY_GUARD {
            return Err(Error::Singular(
                "position too close to the coulomb centre".into(),
            ));
        }
        check_ring(self.q, pos)
    }
}

/// Central-difference derivatives of a value-only potential.
///
/// Steps are scaled by the characteristic length max(1, |x|). The Hessian is
/// symmetrized.
pub struct FiniteDifferenceModel<F> {
    value: F,
    gradient_step: f64,
    hessian_step: f64,
}

impl<F> FiniteDifferenceModel<F>
where
    F: Fn(&Vector3<f64>) -> f64 + Sync,
{
    /// Default steps: ε^(1/3) for the gradient and ε^(1/4) for the Hessian.
    pub fn new(value: F) -> Self {
        Self {
            value,
            gradient_step: f64::EPSILON.cbrt(),
            hessian_step: f64::EPSILON.powf(0.25),
        }
    }

    /// Uses the same relative `step` for gradient and Hessian.
    pub fn with_step(value: F, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid(format!(
                "finite-difference step must be positive, got {step}"
            )));
        }
        Ok(Self {
            value,
            gradient_step: step,
            hessian_step: step,
        })
    }

    fn scale(pos: &Vector3<f64>) -> f64 {
        pos.norm().max(1.0)
    }
}

/// Builds a [`FiniteDifferenceModel`] with an explicit relative step.
pub fn finite_difference_model<F>(value: F, step: f64) -> Result<FiniteDifferenceModel<F>>
where
    F: Fn(&Vector3<f64>) -> f64 + Sync,
{
    FiniteDifferenceModel::with_step(value, step)
}

impl<F> PotentialModel for FiniteDifferenceModel<F>
where
    F: Fn(&Vector3<f64>) -> f64 + Sync,
{
    fn value(&self, pos: &Vector3<f64>) -> f64 {
        (self.value)(pos)
    }

    fn gradient(&self, pos: &Vector3<f64>) -> Vector3<f64> {
        let h = self.gradient_step * Self::scale(pos);
        Vector3::from_fn(|i, _| {
            let mut e = Vector3::zeros();
            e[i] = h;
            ((self.value)(&(pos + e)) - (self.value)(&(pos - e))) / (2.0 * h)
        })
    }

    fn hessian(&self, pos: &Vector3<f64>) -> Matrix3<f64> {
        let h = self.hessian_step * Self::scale(pos);
        let f = &self.value;
        let f0 = f(pos);
        let unit = |i: usize| {
            let mut e = Vector3::zeros();
            e[i] = h;
            e
        };
        let mut m = Matrix3::zeros();
        for i in 0..3 {
            let ei = unit(i);
            m[(i, i)] = (f(&(pos + ei)) - 2.0 * f0 + f(&(pos - ei))) / (h * h);
            for j in (i + 1)..3 {
                let ej = unit(j);
                let v = (f(&(pos + ei + ej)) - f(&(pos + ei - ej)) - f(&(pos - ei + ej))
                    + f(&(pos - ei - ej)))
                    / (4.0 * h * h);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        0.5 * (m + m.transpose())
    }
}
