//! Classification of return-probability decay and the translation to `c₀`.

use serde::{Deserialize, Serialize};

use super::group::GroupSpec;
use super::returns::{return_series, ReturnSeries, WalkSpec};
use crate::capval::CapacityValue;
use crate::error::{Error, Result};
use crate::fit;

/// Window slopes that agree to within this fraction are one power law.
pub const AGREEMENT: f64 = 0.15;
/// `p(k)^{1/k}` limits below `1 − EXPONENTIAL_GAP` count as exponential decay.
pub const EXPONENTIAL_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DecayClass {
    /// `p(k) ≈ C·k^{−exponent}`.
    Polynomial { exponent: f64 },
    /// Faster than every power of `k`, slower than every `ρ^k` with `ρ < 1`.
    Superpolynomial,
    /// `p(k)^{1/k} → rate < 1`.
    Exponential { rate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub class: DecayClass,
    /// Slopes of `−ln p(k)` against `ln k` on `[K/8, K/4]`, `[K/4, K/2]`, `[K/2, K]`.
    pub window_slopes: [f64; 3],
    /// `ρ` from fitting `ln p(k) = A − B ln k + k ln ρ` on `[K/2, K]`.
    pub rate_estimate: f64,
}

fn window(rs: &ReturnSeries, lo: usize, hi: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut ks = Vec::new();
    let mut lnk = Vec::new();
    let mut lnp = Vec::new();
    for k in lo.max(1)..=hi {
        let p = rs.probabilities[k];
        if p > 0.0 {
            ks.push(k as f64);
            lnk.push((k as f64).ln());
            lnp.push(p.ln());
        }
    }
    (ks, lnk, lnp)
}

/// Fits the three dyadic windows ending at `K` and classifies the decay.
///
/// Steps with `p(k) = 0` (odd steps of a non-lazy walk on a bipartite
/// graph) are skipped.
pub fn decay_exponent(rs: &ReturnSeries) -> Result<DecayFit> {
    let k = rs.steps();
    if k < 32 {
        return Err(Error::InvalidArgument(format!(
            "decay classification needs at least 32 steps, got {k}"
        )));
    }
    let mut slopes = [0.0; 3];
    for (slot, (lo, hi)) in slopes.iter_mut().zip([(k / 8, k / 4), (k / 4, k / 2), (k / 2, k)]) {
        let (_, x, y) = window(rs, lo, hi);
        let (s, _) = fit::line(&x, &y).ok_or_else(|| {
            Error::Inconclusive(format!("no usable samples in window [{lo}, {hi}]"))
        })?;
        *slot = -s;
    }
    let (ks, lnk, lnp) = window(rs, k / 2, k);
    let design: Vec<Vec<f64>> = ks.iter().zip(&lnk).map(|(k, l)| vec![1.0, *l, *k]).collect();
    let coef = fit::linear_model(&design, &lnp)
        .ok_or_else(|| Error::Inconclusive("rate fit is degenerate".into()))?;
    let rate = coef[2].exp().min(1.0);
    let [s1, s2, s3] = slopes;

    let mean = 0.5 * (s2 + s3);
    let class = if mean > 0.0 && (s3 - s2).abs() <= AGREEMENT * mean {
        DecayClass::Polynomial { exponent: mean }
    } else {
        // slopes grow like k^β: β = 1 for ρ^k, β < 1 for stretched exponentials
        let beta = if s2 > 0.0 && s3 > 0.0 { (s3 / s2).log2() } else { 0.0 };
        let limit = if beta >= 0.75 { rate } else { 1.0 };
        if limit < 1.0 - EXPONENTIAL_GAP {
            DecayClass::Exponential { rate }
        } else if s2 > (1.0 + AGREEMENT) * s1 && s3 > (1.0 + AGREEMENT) * s2 {
            DecayClass::Superpolynomial
        } else {
            return Err(Error::Inconclusive(format!(
                "window slopes {s1:.4}, {s2:.4}, {s3:.4} fit no class"
            )));
        }
    };
    Ok(DecayFit {
        class,
        window_slopes: slopes,
        rate_estimate: rate,
    })
}

/// `c₀` of a group from the lazy walk of length `steps`.
pub fn c0_from_walk(group: &GroupSpec, steps: usize) -> Result<CapacityValue> {
    let rs = return_series(&WalkSpec::lazy(group.clone()), steps)?;
    c0_from_series(&rs)
}

pub fn c0_from_series(rs: &ReturnSeries) -> Result<CapacityValue> {
    if rs.finite_order.is_some() {
        return Ok(CapacityValue::ZeroMinus);
    }
    Ok(match decay_exponent(rs)?.class {
        DecayClass::Polynomial { exponent } => CapacityValue::finite(1.0 / (2.0 * exponent))?,
        DecayClass::Superpolynomial => CapacityValue::Finite(0.0),
        DecayClass::Exponential { .. } => CapacityValue::ZeroMinus,
    })
}
