//! The two-sided bound `(1−λ)^k F(λ) ≤ p(k) ≤ (1−λ)^k + F(λ)` relating the
//! Laplacian density to return probabilities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::group::GroupSpec;
use super::returns::{ReturnSeries, WalkSpec};
use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentPolynomial};
use crate::symbol::{hermitian_density, Quadrature, SpectralDensitySamples};

pub const SANDWICH_TOLERANCE: f64 = 1e-6;

/// Spectral density of `Δ₀ = 1 − P` for a walk on `ℤⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianDensity {
    pub walk: WalkSpec,
    pub samples: SpectralDensitySamples,
}

/// Symbol of the walk operator `P` on `ℤⁿ`.
pub fn walk_symbol(walk: &WalkSpec) -> Result<LaurentPolynomial> {
    let GroupSpec::FreeAbelian { n } = walk.group else {
        return Err(Error::Unsupported(format!(
            "walk symbols exist for free abelian groups only, got {:?}",
            walk.group
        )));
    };
    if n == 0 {
        return Err(Error::InvalidArgument("free_abelian needs n ≥ 1".into()));
    }
    let (w0, w) = walk.weights(2 * n)?;
    let mut terms = vec![(vec![0; n], Complex64::new(w0, 0.0))];
    for i in 0..n {
        for s in [1, -1] {
            let mut e = vec![0; n];
            e[i] = s;
            terms.push((e, Complex64::new(w, 0.0)));
        }
    }
    LaurentPolynomial::from_terms(n, terms)
}

pub fn laplacian_density(walk: &WalkSpec, grid: &[f64], quad: &Quadrature) -> Result<LaplacianDensity> {
    let p = walk_symbol(walk)?;
    let lap = LaurentPolynomial::one(p.rank()) - p;
    Ok(LaplacianDensity {
        walk: walk.clone(),
        samples: hermitian_density(&LaurentMatrix::scalar(lap), grid, quad)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichRow {
    pub lambda: f64,
    pub k: usize,
    /// `p(k) − (1−λ)^k F(λ)`.
    pub lower_margin: f64,
    /// `(1−λ)^k + F(λ) − p(k)`.
    pub upper_margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    pub violations: usize,
    pub tolerance: f64,
}

/// Evaluates both inequalities at each `(λ, k)`; `λ` must be a grid point
/// of the density.
pub fn sandwich_check(f: &LaplacianDensity, rs: &ReturnSeries, pairs: &[(f64, usize)]) -> Result<SandwichReport> {
    if f.walk != rs.walk {
        return Err(Error::MismatchedWalk(format!(
            "density built for {:?}, return series for {:?}",
            f.walk, rs.walk
        )));
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for &(lambda, k) in pairs {
        let fl = f.samples.value_at(lambda).ok_or_else(|| {
            Error::InvalidArgument(format!("λ = {lambda} is not a grid point of the density"))
        })?;
        let p = *rs.probabilities.get(k).ok_or_else(|| {
            Error::InvalidArgument(format!("k = {k} beyond the return series length {}", rs.steps()))
        })?;
        let decay = (1.0 - lambda).powi(k as i32);
        let lower_margin = p - decay * fl;
        let upper_margin = decay + fl - p;
        rows.push(SandwichRow {
            lambda,
            k,
            lower_margin,
            upper_margin,
            holds: lower_margin >= -SANDWICH_TOLERANCE && upper_margin >= -SANDWICH_TOLERANCE,
        });
    }
    Ok(SandwichReport {
        violations: rows.iter().filter(|r| !r.holds).count(),
        rows,
        tolerance: SANDWICH_TOLERANCE,
    })
}
