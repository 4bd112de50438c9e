//! Singular values on the torus, von Neumann dimension and spectral density
//! functions of Laurent matrices.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{CompiledSymbol, Quadrature};
use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;

const CHUNK: usize = 2048;

/// Sampled spectral density `F(λ) = ∫ #{i : s_i(x) ≤ λ} dx` of an operator
/// on `ℂ^cols ⊗ ℓ²(ℤⁿ)`, with Haar measure normalised to one.
///
/// Columns beyond `min(rows, cols)` have no singular value and count as
/// kernel, so `F(0)` is the von Neumann dimension of the kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensitySamples {
    pub lambda_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kernel_dim: f64,
    pub quadrature_nodes_per_axis: usize,
    pub kernel_tolerance: f64,
    pub rank: usize,
    pub node_count: usize,
    pub total_dim: usize,
    pub max_singular_value: f64,
    /// Upper estimate of the smallest singular value above the kernel
    /// tolerance over the whole torus; `None` when there is no such value.
    /// Refined off-grid when the grid minimum exceeds `GAP_REFINE_ABOVE`.
    pub spectrum_floor: Option<f64>,
}

/// The gap scan only needs a refined floor when the nodes see nothing below this.
pub const GAP_REFINE_ABOVE: f64 = 1e-2;

impl SpectralDensitySamples {
    /// `F(λ)` at a grid point, matched exactly.
    pub fn value_at(&self, lambda: f64) -> Option<f64> {
        self.lambda_grid
            .iter()
            .position(|&l| l == lambda)
            .map(|i| self.values[i])
    }
}

/// Entries of `M` evaluated at `x`; `exp(i⟨v, x⟩)` per monomial.
pub fn symbol_eval(m: &LaurentMatrix, x: &[f64]) -> Result<DMatrix<Complex64>> {
    m.eval(x)
}

/// Ascending singular values of the symbol at `x`.
pub fn singular_values_at(m: &LaurentMatrix, x: &[f64]) -> Result<Vec<f64>> {
    Ok(sorted_singular_values(&m.eval(x)?))
}

pub(crate) fn sorted_singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    let (r, c) = a.shape();
    let mut s = if r == 0 || c == 0 {
        Vec::new()
    } else if r == 1 || c == 1 {
        vec![a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()]
    } else {
        a.singular_values().iter().copied().collect()
    };
    s.sort_unstable_by(f64::total_cmp);
    s
}

/// Ascending eigenvalues of a Hermitian symbol at `x`.
fn sorted_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = if a.nrows() == 1 {
        vec![a[(0, 0)].re]
    } else {
        a.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
    };
    e.sort_unstable_by(f64::total_cmp);
    e
}

/// Per-node spectra, flattened in node order.
struct NodeSpectrum {
    per_node: usize,
    node_count: usize,
    values: Vec<f64>,
}

impl NodeSpectrum {
    fn collect(
        m: &LaurentMatrix,
        quad: &Quadrature,
        per_node: usize,
        f: fn(&DMatrix<Complex64>) -> Vec<f64>,
    ) -> Self {
        let compiled = CompiledSymbol::new(m, quad);
        let node_count = compiled.node_count();
        let chunks: Vec<Vec<f64>> = (0..node_count.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut scratch = vec![0usize; m.rank()];
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(node_count);
                let mut out = Vec::with_capacity((hi - lo) * per_node);
                for idx in lo..hi {
                    out.extend(f(&compiled.eval_node(idx, &mut scratch)));
                }
                out
            })
            .collect();
        NodeSpectrum {
            per_node,
            node_count,
            values: chunks.concat(),
        }
    }

    fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::InvalidArgument("lambda grid must be finite and positive".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("lambda grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Geometric grid from `min` to `max` with `points_per_decade` points per
/// factor of ten, both ends included when they fall on the lattice.
pub fn geometric_grid(min: f64, max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) || points_per_decade == 0 {
        return Err(Error::InvalidArgument(format!(
            "bad grid: min={min}, max={max}, points_per_decade={points_per_decade}"
        )));
    }
    let lo = min.log10();
    let steps = ((max.log10() - lo) * points_per_decade as f64 + 1e-9).floor() as usize;
    Ok((0..=steps)
        .map(|j| 10f64.powf(lo + j as f64 / points_per_decade as f64))
        .collect())
}

/// `[1e-4, 1]` with 64 points per decade.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(1e-4, 1.0, 64).expect("default grid is valid")
}

/// Dimension of the cokernel of `M`: `cols − ∫ rank σ(x) dx`.
///
/// `M` acts on row vectors, `x ↦ xM : ℂ[ℤⁿ]^rows → ℂ[ℤⁿ]^cols`.
pub fn vn_dimension(m: &LaurentMatrix, quad: &Quadrature) -> Result<f64> {
    let s = spectral_density(m, &[], quad)?;
    Ok(m.cols() as f64 - (s.total_dim as f64 - s.kernel_dim))
}

/// Spectral density of `M` sampled on `grid`.
pub fn spectral_density(
    m: &LaurentMatrix,
    grid: &[f64],
    quad: &Quadrature,
) -> Result<SpectralDensitySamples> {
    quad.validate()?;
    validate_grid(grid)?;
    let spec = NodeSpectrum::collect(m, quad, m.rows().min(m.cols()), sorted_singular_values);
    let max_sv = spec.max_abs();
    let tol = quad.kernel_rel_tol * max_sv;
    let padded = m.cols() - spec.per_node;

    let mut nonkernel_min = f64::INFINITY;
    let mut argmins: Vec<(f64, usize)> = Vec::new();
    for (idx, vals) in spec.values.chunks(spec.per_node.max(1)).enumerate() {
        if let Some(&s) = vals.iter().find(|&&s| s > tol) {
            nonkernel_min = nonkernel_min.min(s);
            argmins.push((s, idx));
        }
    }
    let mut sorted: Vec<f64> = spec
        .values
        .iter()
        .map(|&s| if s <= tol { 0.0 } else { s })
        .collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = spec.node_count as f64;
    let count_le = |l: f64| sorted.partition_point(|&s| s <= l) as f64;
    let kernel_dim = padded as f64 + count_le(0.0) / n;
    let values = grid
        .iter()
        .map(|&l| padded as f64 + count_le(l) / n)
        .collect();

    let spectrum_floor = if nonkernel_min.is_infinite() {
        None
    } else if nonkernel_min <= GAP_REFINE_ABOVE {
        Some(nonkernel_min)
    } else {
        argmins.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let starts: Vec<Vec<f64>> = argmins
            .iter()
            .take(8)
            .map(|&(_, idx)| quad.node(m.rank(), idx))
            .collect();
        Some(refine_floor(m, tol, &starts, 2.0 * PI / quad.nodes_per_axis as f64)?.min(nonkernel_min))
    };

    Ok(SpectralDensitySamples {
        lambda_grid: grid.to_vec(),
        values,
        kernel_dim,
        quadrature_nodes_per_axis: quad.nodes_per_axis,
        kernel_tolerance: tol,
        rank: m.rank(),
        node_count: spec.node_count,
        total_dim: m.cols(),
        max_singular_value: max_sv,
        spectrum_floor,
    })
}

/// Spectral density of a Hermitian (square) symbol from its eigenvalues,
/// `F(λ) = ∫ #{i : e_i(x) ≤ λ} dx`. Eigenvalues within the kernel tolerance
/// of zero are counted at zero.
pub fn hermitian_density(
    m: &LaurentMatrix,
    grid: &[f64],
    quad: &Quadrature,
) -> Result<SpectralDensitySamples> {
    quad.validate()?;
    validate_grid(grid)?;
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian density needs a square symbol, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if *m != m.adjoint() {
        return Err(Error::InvalidArgument("symbol is not self-adjoint".into()));
    }
    let spec = NodeSpectrum::collect(m, quad, m.rows(), sorted_eigenvalues);
    let max_abs = spec.max_abs();
    let tol = quad.kernel_rel_tol * max_abs;
    let mut sorted: Vec<f64> = spec
        .values
        .iter()
        .map(|&e| if e.abs() <= tol { 0.0 } else { e })
        .collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = spec.node_count as f64;
    let count_le = |l: f64| sorted.partition_point(|&s| s <= l) as f64 / n;
    let floor = sorted.iter().copied().find(|&e| e > 0.0);
    Ok(SpectralDensitySamples {
        lambda_grid: grid.to_vec(),
        values: grid.iter().map(|&l| count_le(l)).collect(),
        kernel_dim: count_le(0.0),
        quadrature_nodes_per_axis: quad.nodes_per_axis,
        kernel_tolerance: tol,
        rank: m.rank(),
        node_count: spec.node_count,
        total_dim: m.cols(),
        max_singular_value: max_abs,
        spectrum_floor: floor,
    })
}

/// Pattern search for the smallest non-kernel singular value near `starts`.
fn refine_floor(m: &LaurentMatrix, tol: f64, starts: &[Vec<f64>], h0: f64) -> Result<f64> {
    let objective = |x: &[f64]| -> Result<f64> {
        Ok(singular_values_at(m, x)?
            .into_iter()
            .find(|&s| s > tol)
            .unwrap_or(f64::INFINITY))
    };
    let n = m.rank();
    let stencil: Vec<Vec<f64>> = (0..3usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let d = (code % 3) as f64 - 1.0;
                    code /= 3;
                    d
                })
                .collect()
        })
        .filter(|d: &Vec<f64>| d.iter().any(|&v| v != 0.0))
        .collect();
    let mut best = f64::INFINITY;
    for start in starts {
        let mut x = start.clone();
        let mut fx = objective(&x)?;
        let mut h = h0;
        for _ in 0..200 {
            if h < 1e-6 {
                break;
            }
            let mut moved = false;
            for d in &stencil {
                let y: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + h * b).collect();
                let fy = objective(&y)?;
                if fy < fx {
                    x = y;
                    fx = fy;
                    moved = true;
                    break;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        best = best.min(fx);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPolynomial;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn zm1() -> LaurentMatrix {
        LaurentMatrix::scalar(LaurentPolynomial::z_minus_one(1, 0))
    }

    #[test]
    fn symbol_examples() {
        let a = symbol_eval(&zm1(), &[0.0]).unwrap();
        assert!(a[(0, 0)].norm() < 1e-15);
        let a = symbol_eval(&zm1(), &[PI]).unwrap();
        assert!((a[(0, 0)] - c(-2.0)).norm() < 1e-15);
        let row = LaurentMatrix::from_rows(
            2,
            vec![vec![
                LaurentPolynomial::z_minus_one(2, 0),
                LaurentPolynomial::z_minus_one(2, 1),
            ]],
        )
        .unwrap();
        let a = symbol_eval(&row, &[PI / 2.0, 0.0]).unwrap();
        assert!((a[(0, 0)] - Complex64::new(-1.0, 1.0)).norm() < 1e-15);
        assert!(a[(0, 1)].norm() < 1e-15);
        assert!(symbol_eval(&row, &[0.0]).is_err());
    }

    #[test]
    fn singular_value_examples() {
        for theta in [0.3, 1.0, PI, 5.0] {
            let s = singular_values_at(&zm1(), &[theta]).unwrap();
            assert!((s[0] - 2.0 * (theta / 2.0).sin().abs()).abs() < 1e-14);
        }
        assert_eq!(
            singular_values_at(&LaurentMatrix::zeros(1, 2, 2), &[0.4]).unwrap(),
            vec![0.0, 0.0]
        );
        let s = singular_values_at(&LaurentMatrix::identity(1, 2), &[0.4]).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn dimension_examples() {
        let q = Quadrature::default_for_rank(1);
        assert_eq!(vn_dimension(&zm1(), &q).unwrap(), 0.0);
        assert_eq!(vn_dimension(&LaurentMatrix::zeros(1, 1, 1), &q).unwrap(), 1.0);
        let d = LaurentMatrix::diagonal(
            1,
            vec![LaurentPolynomial::z_minus_one(1, 0), LaurentPolynomial::zero(1)],
        )
        .unwrap();
        assert_eq!(vn_dimension(&d, &q).unwrap(), 1.0);
        // wide matrices have at least cols - rows of kernel
        let row = LaurentMatrix::from_rows(
            2,
            vec![vec![
                LaurentPolynomial::z_minus_one(2, 0),
                LaurentPolynomial::z_minus_one(2, 1),
            ]],
        )
        .unwrap();
        assert_eq!(vn_dimension(&row, &Quadrature::new(64).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn density_examples() {
        let q = Quadrature::default_for_rank(1);
        let s = spectral_density(&zm1(), &[1.0], &q).unwrap();
        let exact = 2.0 / PI * (0.5f64).asin();
        assert!((s.values[0] - exact).abs() < 1e-3);
        assert_eq!(s.kernel_dim, 0.0);
        let s = spectral_density(&LaurentMatrix::identity(1, 1), &[0.5], &q).unwrap();
        assert_eq!(s.values, vec![0.0]);
        assert_eq!(s.spectrum_floor, Some(1.0));
        let s = spectral_density(&LaurentMatrix::zeros(1, 1, 1), &[0.1, 2.0], &q).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0]);
        assert_eq!(s.spectrum_floor, None);
    }

    #[test]
    fn density_against_closed_form_on_grid() {
        let q = Quadrature::default_for_rank(1);
        let s = spectral_density(&zm1(), &default_grid(), &q).unwrap();
        for (l, f) in s.lambda_grid.iter().zip(&s.values) {
            let exact = 2.0 / PI * (l / 2.0).asin();
            assert!((f - exact).abs() <= 1.0 / q.nodes_per_axis as f64 + 1e-12);
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        let q = Quadrature::new(8).unwrap();
        assert!(spectral_density(&zm1(), &[0.5, 0.5], &q).is_err());
        assert!(spectral_density(&zm1(), &[0.0, 0.5], &q).is_err());
        assert!(geometric_grid(1.0, 0.5, 4).is_err());
        let g = default_grid();
        assert_eq!(g.len(), 257);
        assert!((g[0] - 1e-4).abs() < 1e-18 && (g[256] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_and_bounded() {
        let p = LaurentPolynomial::z_minus_one(2, 0) * LaurentPolynomial::z_minus_one(2, 1)
            + LaurentPolynomial::constant(2, c(0.25));
        let m = LaurentMatrix::from_rows(
            2,
            vec![
                vec![p.clone(), LaurentPolynomial::z_minus_one(2, 1)],
                vec![LaurentPolynomial::zero(2), p.adjoint()],
                vec![LaurentPolynomial::one(2), LaurentPolynomial::zero(2)],
            ],
        )
        .unwrap();
        let s = spectral_density(&m, &default_grid(), &Quadrature::new(64).unwrap()).unwrap();
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(s.kernel_dim <= s.values[0]);
        assert!(s.values.iter().all(|&v| v <= s.total_dim as f64));
    }

    #[test]
    fn scaling_shifts_the_grid() {
        let q = Quadrature::default_for_rank(1);
        let m = LaurentMatrix::scalar(LaurentPolynomial::z_minus_one(1, 0).pow(2));
        let t = 4.0;
        let grid = geometric_grid(1e-3, 1.0, 8).unwrap();
        let scaled: Vec<f64> = grid.iter().map(|l| l * t).collect();
        let a = spectral_density(&m, &grid, &q).unwrap();
        let b = spectral_density(&m.scale(c(t)), &scaled, &q).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 2.0 / q.nodes_per_axis as f64);
        }
    }

    #[test]
    fn adjoint_has_same_nonzero_singular_values() {
        let m = LaurentMatrix::from_rows(
            2,
            vec![vec![
                LaurentPolynomial::z_minus_one(2, 0),
                LaurentPolynomial::z_minus_one(2, 1).pow(2),
            ]],
        )
        .unwrap();
        let q = Quadrature::new(16).unwrap();
        for idx in 0..q.node_count(2) {
            let x = q.node(2, idx);
            let a = singular_values_at(&m, &x).unwrap();
            let b = singular_values_at(&m.adjoint(), &x).unwrap();
            let nz = |v: Vec<f64>| v.into_iter().filter(|s| *s > 1e-12).collect::<Vec<_>>();
            let (a, b) = (nz(a), nz(b));
            assert_eq!(a.len(), b.len());
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() <= 1e-14 * u.max(1.0));
            }
        }
    }

    #[test]
    fn block_diagonal_adds() {
        let q = Quadrature::new(512).unwrap();
        let a = zm1();
        let b = LaurentMatrix::scalar(LaurentPolynomial::z_minus_one(1, 0).pow(3));
        let grid = default_grid();
        let fa = spectral_density(&a, &grid, &q).unwrap();
        let fb = spectral_density(&b, &grid, &q).unwrap();
        let fab = spectral_density(&a.block_diag(&b).unwrap(), &grid, &q).unwrap();
        for i in 0..grid.len() {
            assert!((fab.values[i] - fa.values[i] - fb.values[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_converges() {
        let grid = default_grid();
        let coarse = Quadrature::new(1024).unwrap();
        let fine = Quadrature::new(2048).unwrap();
        let a = spectral_density(&zm1(), &grid, &coarse).unwrap();
        let b = spectral_density(&zm1(), &grid, &fine).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 4.0 / 1024.0);
        }
    }

    #[test]
    fn hermitian_density_of_walk_laplacian() {
        // 1 - (1 + z + z^-1)/3 has eigenvalue (2 - 2cosθ)/3
        let third = c(1.0 / 3.0);
        let phi = LaurentPolynomial::from_terms(
            1,
            [(vec![0], third), (vec![1], third), (vec![-1], third)],
        )
        .unwrap();
        let lap = LaurentMatrix::scalar(LaurentPolynomial::one(1) - phi);
        let q = Quadrature::default_for_rank(1);
        let s = hermitian_density(&lap, &[0.5], &q).unwrap();
        // (2 - 2cosθ)/3 ≤ 0.5  ⇔  cosθ ≥ 0.25
        let exact = (0.25f64).acos() / PI;
        assert!((s.values[0] - exact).abs() < 1e-3);
        assert!(hermitian_density(&zm1(), &[0.5], &q).is_err());
    }

    #[test]
    fn deterministic() {
        let q = Quadrature::new(300).unwrap();
        let m = LaurentMatrix::scalar(
            LaurentPolynomial::z_minus_one(2, 0) + LaurentPolynomial::z_minus_one(2, 1).pow(2),
        );
        let a = spectral_density(&m, &default_grid(), &q).unwrap();
        let b = spectral_density(&m, &default_grid(), &q).unwrap();
        assert_eq!(a, b);
    }
}
