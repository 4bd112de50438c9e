//! Koszul complexes over `ℂ[ℤⁿ]` and the capacities `c_p(ℤⁿ)`.
//!
//! `C_p` is free on the `p`-subsets of `{0, …, n−1}` in lexicographic order
//! and `d_p(e_S) = Σ_j (−1)^j (z_{s_j} − 1) e_{S∖s_j}` for `S = {s_0 < s_1 < …}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capval::{ns_to_capacity, CapacityValue, NSValue};
use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentPolynomial, OperatorSpec};
use crate::symbol::{
    default_grid, ns_exponent, singular_values_at, spectral_density, Quadrature, DIM_TOLERANCE,
};

pub const MAX_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct KoszulComplex {
    n: usize,
    /// `differentials[p − 1] = d_p : C_p → C_{p−1}`.
    differentials: Vec<LaurentMatrix>,
}

fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn go(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    go(0, n, p, &mut cur, &mut out);
    out
}

pub fn koszul_complex(n: usize) -> Result<KoszulComplex> {
    if !(1..=MAX_RANK).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "Koszul complexes are supported for 1 ≤ n ≤ {MAX_RANK}, got {n}"
        )));
    }
    let differentials = (1..=n)
        .map(|p| {
            let rows = subsets(n, p - 1);
            let cols = subsets(n, p);
            let mut d = LaurentMatrix::zeros(n, rows.len(), cols.len());
            for (c, set) in cols.iter().enumerate() {
                for (j, &s) in set.iter().enumerate() {
                    let mut face = set.clone();
                    face.remove(j);
                    let r = rows.iter().position(|x| *x == face).expect("face is a subset");
                    let e = LaurentPolynomial::z_minus_one(n, s);
                    d.set(r, c, if j % 2 == 0 { e } else { -e });
                }
            }
            d
        })
        .collect();
    Ok(KoszulComplex { n, differentials })
}

impl KoszulComplex {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `d_p` for `1 ≤ p ≤ n`, `None` outside that range.
    pub fn differential(&self, p: usize) -> Option<&LaurentMatrix> {
        p.checked_sub(1).and_then(|i| self.differentials.get(i))
    }

    pub fn differentials(&self) -> &[LaurentMatrix] {
        &self.differentials
    }

    /// Operator specs of `d_1, …, d_n`.
    pub fn export_specs(&self) -> Vec<OperatorSpec> {
        self.differentials.iter().map(LaurentMatrix::to_spec).collect()
    }
}

/// Quadrature and grid used by the complex-level computations.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexConfig {
    pub quadrature: Option<Quadrature>,
    pub grid: Vec<f64>,
}

impl Default for ComplexConfig {
    fn default() -> Self {
        ComplexConfig {
            quadrature: None,
            grid: default_grid(),
        }
    }
}

impl ComplexConfig {
    fn quad(&self, n: usize) -> Quadrature {
        self.quadrature.unwrap_or_else(|| Quadrature::default_for_rank(n))
    }
}

/// Exponent of `d_p`; absent differentials give `∞⁺`.
pub fn differential_exponent(cx: &KoszulComplex, p: usize, cfg: &ComplexConfig) -> Result<NSValue> {
    match cx.differential(p) {
        None => Ok(NSValue::InfinityPlus),
        Some(d) => ns_exponent(&spectral_density(d, &cfg.grid, &cfg.quad(cx.n))?),
    }
}

pub fn chain_capacity(n: usize, p: usize) -> Result<CapacityValue> {
    chain_capacity_with(n, p, &ComplexConfig::default())
}

/// `c_p(ℤⁿ) = 1/α(d_{p+1})` for `p < n`; `0⁻` for `p ≥ n` once `H_p` is
/// confirmed trivial.
pub fn chain_capacity_with(n: usize, p: usize, cfg: &ComplexConfig) -> Result<CapacityValue> {
    if p > n + 1 {
        return Err(Error::InvalidArgument(format!("degree {p} outside 0..={}", n + 1)));
    }
    let cx = koszul_complex(n)?;
    if p < n {
        return Ok(ns_to_capacity(differential_exponent(&cx, p + 1, cfg)?));
    }
    if p == n {
        // H_n = ker d_n must vanish: zero-dimensional kernel and full column
        // rank at generic points.
        let d = cx.differential(n).expect("d_n exists");
        let s = spectral_density(d, &cfg.grid, &cfg.quad(n))?;
        if s.kernel_dim > DIM_TOLERANCE {
            return Err(Error::Unsupported(format!(
                "top homology has dimension {} in degree {n}",
                s.kernel_dim
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x6b6f737a);
        for _ in 0..8 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
            let sv = singular_values_at(d, &x)?;
            let tol = 1e-9 * sv.last().copied().unwrap_or(0.0);
            if sv.iter().filter(|&&v| v > tol).count() < d.cols() {
                return Err(Error::Unsupported(format!("d_{n} is not injective at {x:?}")));
            }
        }
    }
    // C_{n+1} = 0
    Ok(CapacityValue::ZeroMinus)
}

pub fn laplace_ns(n: usize, p: usize) -> Result<NSValue> {
    laplace_ns_with(n, p, &ComplexConfig::default())
}

/// `α̃_p = min(α_{p+1}, α_p)`.
pub fn laplace_ns_with(n: usize, p: usize, cfg: &ComplexConfig) -> Result<NSValue> {
    if p > n {
        return Err(Error::InvalidArgument(format!("degree {p} outside 0..={n}")));
    }
    let cx = koszul_complex(n)?;
    let upper = differential_exponent(&cx, p + 1, cfg)?;
    let lower = if p == 0 {
        NSValue::InfinityPlus
    } else {
        differential_exponent(&cx, p, cfg)?
    };
    Ok(upper.min(lower))
}
