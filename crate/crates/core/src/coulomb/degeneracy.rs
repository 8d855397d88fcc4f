use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const BRANCH_TOL: f64 = 1e-12;

/// Levels (m, n) and (m′, n + I) coincide, or (m, n + |I|) and (m′, n) when
/// the shift points the other way: see [`DegeneracyTriple::shift`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyTriple {
    pub m: i64,
    pub m_prime: i64,
    pub i_shift: i64,
    pub q_value: f64,
}

impl DegeneracyTriple {
    /// |M| − |M′|, equal to ±I on a valid triple.
    pub fn shift(&self) -> i64 {
        let m_eff = |m: i64| ((m * m) as f64 + self.q_value).sqrt();
        (m_eff(self.m) - m_eff(self.m_prime)).round() as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegeneracyOutcome {
    Degenerate(DegeneracyTriple),
    /// The squared condition holds but only through |M| + |M′| = |I|.
    SpuriousBranch {
        q_value: f64,
    },
    NegativeCoupling {
        q_value: f64,
    },
    /// Q = 0: the unperturbed spectrum already depends on |m| + n only.
    VanishingCoupling,
}

/// Q = [I² − (m + m′)²][I² − (m − m′)²]/(4I²) with the branch check
/// √(m² + Q) − √(m′² + Q) = ±I.
pub fn degeneracy_q(m: i64, m_prime: i64, i_shift: i64) -> Result<DegeneracyOutcome> {
    if i_shift == 0 {
        return Err(invalid("I must be nonzero"));
    }
    if m_prime == m || m_prime == -m {
        return Err(invalid(format!(
            "m' != +-m violated (m = {m}, m' = {m_prime})"
        )));
    }
    let (m, mp, i) = (m as i128, m_prime as i128, i_shift as i128);
    let num = (i * i - (m + mp).pow(2)) * (i * i - (m - mp).pow(2));
    let q_value = num as f64 / (4 * i * i) as f64;
    if num < 0 {
        return Ok(DegeneracyOutcome::NegativeCoupling { q_value });
    }
    if num == 0 {
        return Ok(DegeneracyOutcome::VanishingCoupling);
    }
    let diff = ((m * m) as f64 + q_value).sqrt() - ((mp * mp) as f64 + q_value).sqrt();
    let target = (i as f64).abs();
    if (diff.abs() - target).abs() <= BRANCH_TOL * target.max(1.0) {
        Ok(DegeneracyOutcome::Degenerate(DegeneracyTriple {
            m: m as i64,
            m_prime: mp as i64,
            i_shift: i as i64,
            q_value,
        }))
    } else {
        Ok(DegeneracyOutcome::SpuriousBranch { q_value })
    }
}

/// All triples with |m|, |m′| ≤ max_m, 0 < |I| ≤ max_i whose coupling lies
/// within `tol` of `q`.
pub fn degeneracy_search(
    q: f64,
    tol: f64,
    max_m: i64,
    max_i: i64,
) -> Result<Vec<DegeneracyTriple>> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(invalid(format!("q must be finite and >= 0, got {q}")));
    }
    if !(tol >= 0.0) || max_m < 0 || max_i < 1 {
        return Err(invalid("tol >= 0, max_m >= 0 and max_i >= 1 required"));
    }
    let mut out = Vec::new();
    for m in -max_m..=max_m {
        for mp in -max_m..=max_m {
            if mp == m || mp == -m {
                continue;
            }
            for i in (-max_i..=max_i).filter(|&i| i != 0) {
                if let DegeneracyOutcome::Degenerate(t) = degeneracy_q(m, mp, i)? {
                    if (t.q_value - q).abs() <= tol {
                        out.push(t);
                    }
                }
            }
        }
    }
    Ok(out)
}
