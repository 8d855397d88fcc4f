//! Rational detection of frequency ratios by continued-fraction convergents.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A fraction k1/k2 (k2 > 0, coprime) approximating `value` to within `residual`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalApprox {
    pub k1: i64,
    pub k2: i64,
    pub value: f64,
    pub residual: f64,
}

impl RationalApprox {
    pub fn ratio(&self) -> f64 {
        self.k1 as f64 / self.k2 as f64
    }
}

/// Returns the first continued-fraction convergent of `value` that lies within
/// `tol` of it, provided its denominator does not exceed `max_den`.
///
/// Convergents are visited in order of increasing denominator, so the result is
/// the convergent with the smallest denominator meeting the tolerance.
/// Intermediate fractions (semiconvergents) are not considered.
pub fn best_rational(value: f64, tol: f64, max_den: u64) -> Result<Option<RationalApprox>> {
    if !value.is_finite() {
        return Err(invalid(format!(
            "cannot approximate non-finite value {value}"
        )));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if max_den == 0 {
        return Err(invalid("max_den must be at least 1"));
    }
    let max_den = i128::from(max_den.min(i64::MAX as u64));

    // h_{-1}/k_{-1} = 1/0, h_{-2}/k_{-2} = 0/1
    let (mut h_prev, mut h) = (0i128, 1i128);
    let (mut k_prev, mut k) = (1i128, 0i128);
    let mut rest = value;
    for _ in 0..128 {
        let a = rest.floor();
        if a.abs() > 9.0e18 {
            break;
        }
        let a_int = a as i128;
        let h_next = a_int.checked_mul(h).and_then(|v| v.checked_add(h_prev));
        let k_next = a_int.checked_mul(k).and_then(|v| v.checked_add(k_prev));
        let (Some(h_next), Some(k_next)) = (h_next, k_next) else {
            break;
        };
        if k_next > max_den || h_next.abs() > i128::from(i64::MAX) {
            break;
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);

        let approx = h as f64 / k as f64;
        let residual = (value - approx).abs();
        if residual <= tol {
            return Ok(Some(RationalApprox {
                k1: h as i64,
                k2: k as i64,
                value,
                residual,
            }));
        }
        let frac = rest - a;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    Ok(None)
}
