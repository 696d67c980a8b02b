//! Exponent triples, pair regime classification and auxiliary exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when a reciprocal sum sits on a regime boundary. Sums like
/// 1/3 + 1/1.5 land a few ulps below 1 in floating point; without the slack
/// the pair would be misclassified and r would blow up to ~1e16.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Which bilinear checking condition governs a pair of exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PairRegime {
    /// 1/p_a + 1/p_b >= 1.
    Sawyer,
    /// 1/p_a + 1/p_b < 1, with 1/r + 1/p_a + 1/p_b = 1.
    Wolff { r: f64 },
}

impl PairRegime {
    pub fn is_sawyer(&self) -> bool {
        matches!(self, PairRegime::Sawyer)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Sawyer regime iff 1/p_a + 1/p_b >= 1 (boundary inclusive), else Wolff with
/// r = (1 - 1/p_a - 1/p_b)^-1.
pub fn classify_pair(p_a: f64, p_b: f64) -> Result<PairRegime> {
    check_exponent(p_a)?;
    check_exponent(p_b)?;
    let s = 1.0 / p_a + 1.0 / p_b;
    if s >= 1.0 - BOUNDARY_TOLERANCE {
        Ok(PairRegime::Sawyer)
    } else {
        Ok(PairRegime::Wolff { r: 1.0 / (1.0 - s) })
    }
}

/// (p1, p2, p3) with 1 < p_i < inf and 1/p1 + 1/p2 + 1/p3 >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    p: [f64; 3],
}

impl ExponentTriple {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        for p in [p1, p2, p3] {
            check_exponent(p)?;
        }
        let sum = 1.0 / p1 + 1.0 / p2 + 1.0 / p3;
        if sum < 1.0 - BOUNDARY_TOLERANCE {
            return Err(Error::UnsupportedExponents(p1, p2, p3));
        }
        Ok(Self { p: [p1, p2, p3] })
    }

    pub fn from_array(p: [f64; 3]) -> Result<Self> {
        Self::new(p[0], p[1], p[2])
    }

    pub fn p(&self, i: usize) -> f64 {
        self.p[i]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.p
    }

    /// Dual exponent p_i' = p_i / (p_i - 1).
    pub fn dual(&self, i: usize) -> f64 {
        dual_exponent(self.p[i])
    }

    /// Slack of the hypothesis: 1/p1 + 1/p2 + 1/p3 - 1.
    pub fn hypothesis_slack(&self) -> f64 {
        self.p.iter().map(|p| 1.0 / p).sum::<f64>() - 1.0
    }

    pub fn pair_regime(&self, a: usize, b: usize) -> PairRegime {
        classify_pair(self.p[a], self.p[b]).expect("exponents validated at construction")
    }

    /// Auxiliary exponents (s_a, s_b) for the roles (a, b, c): they satisfy
    /// 1/s_a + 1/s_b + 1/p_c = 1 with p_a <= s_a and p_b <= s_b.
    ///
    /// The slack is split evenly between the two reciprocals whenever that
    /// keeps both positive; otherwise it is distributed proportionally, which
    /// is always feasible. Both constraints are re-verified before returning.
    pub fn aux_pair(&self, a: usize, b: usize, c: usize) -> Result<(f64, f64)> {
        let ua = 1.0 / self.p[a];
        let ub = 1.0 / self.p[b];
        let uc = 1.0 / self.p[c];
        let target = 1.0 - uc;
        let slack = (ua + ub - target).max(0.0);
        let half = slack / 2.0;
        let (xa, xb) = if half < ua && half < ub {
            (ua - half, ub - half)
        } else {
            (ua * target / (ua + ub), ub * target / (ua + ub))
        };
        let (sa, sb) = (1.0 / xa, 1.0 / xb);
        let residual = (xa + xb + uc - 1.0).abs();
        if !(sa.is_finite() && sb.is_finite()) || residual > 1e-9 {
            return Err(Error::InvalidValue(format!(
                "auxiliary exponent selection failed for ({}, {}, {})",
                self.p[a], self.p[b], self.p[c]
            )));
        }
        if sa < self.p[a] * (1.0 - 1e-12) || sb < self.p[b] * (1.0 - 1e-12) {
            return Err(Error::InvalidValue(
                "auxiliary exponents violate s_i >= p_i".to_string(),
            ));
        }
        Ok((sa, sb))
    }

    /// Auxiliary exponents for the canonical roles (1, 2 | 3).
    pub fn aux_default(&self) -> Result<(f64, f64)> {
        self.aux_pair(0, 1, 2)
    }
}

pub fn dual_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}
