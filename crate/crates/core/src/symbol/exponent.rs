//! Novikov-Shubin exponent extraction from sampled densities.

use serde::{Deserialize, Serialize};

use super::density::{spectral_density, SpectralDensitySamples};
use super::quadrature::Quadrature;
use crate::capval::{ns_to_capacity, CapacityValue, NSValue};
use crate::error::{Error, Result};
use crate::fit;
use crate::laurent::LaurentMatrix;

/// Cokernels with measured dimension above this are not zero-dimensional.
pub const DIM_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentConfig {
    /// Declare a gap when `F − F(0)` stays below `gap_tolerance` for every
    /// grid point up to `gap_scan_max`.
    pub gap_scan_max: f64,
    pub gap_tolerance: f64,
    /// Sliding window width and step, in decades of λ.
    pub window_decades: f64,
    pub step_decades: f64,
    /// A sample is usable once `F − F(0)` is carried by at least this many
    /// quadrature nodes; below that the staircase of the rule dominates.
    pub min_node_count: f64,
    pub min_samples: usize,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        ExponentConfig {
            gap_scan_max: 1e-2,
            gap_tolerance: 1e-6,
            window_decades: 1.0,
            step_decades: 0.25,
            min_node_count: 16.0,
            min_samples: 4,
        }
    }
}

/// One least-squares window `[lambda_lo, lambda_hi]` and its log-log slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSlope {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub alpha: NSValue,
    pub windows: Vec<WindowSlope>,
    pub usable_samples: usize,
}

pub fn ns_exponent(s: &SpectralDensitySamples) -> Result<NSValue> {
    Ok(ns_exponent_fit(s, &ExponentConfig::default())?.alpha)
}

/// Liminf proxy of `ln(F(λ) − F(0)) / ln λ`: the smallest slope over
/// sliding windows, clamped at zero.
pub fn ns_exponent_fit(s: &SpectralDensitySamples, cfg: &ExponentConfig) -> Result<ExponentFit> {
    let excess: Vec<f64> = s.values.iter().map(|v| v - s.kernel_dim).collect();
    let scanned_flat = s
        .lambda_grid
        .iter()
        .zip(&excess)
        .filter(|(l, _)| **l <= cfg.gap_scan_max)
        .all(|(_, e)| *e < cfg.gap_tolerance);
    let floor_clear = s.spectrum_floor.map_or(true, |f| f > cfg.gap_scan_max);
    if scanned_flat && floor_clear {
        return Ok(ExponentFit {
            alpha: NSValue::InfinityPlus,
            windows: Vec::new(),
            usable_samples: 0,
        });
    }

    let threshold = cfg.min_node_count / s.node_count as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = s
        .lambda_grid
        .iter()
        .zip(&excess)
        .filter(|(_, e)| **e >= threshold)
        .map(|(l, e)| (l.ln(), e.ln()))
        .unzip();
    if xs.len() < cfg.min_samples {
        return Err(Error::InsufficientResolution {
            usable: xs.len(),
            required: cfg.min_samples,
        });
    }

    let ln10 = std::f64::consts::LN_10;
    let width = cfg.window_decades * ln10;
    let step = cfg.step_decades * ln10;
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    let mut windows = Vec::new();
    if last - first < width {
        if let Some((slope, _)) = fit::line(&xs, &ys) {
            windows.push(WindowSlope {
                lambda_lo: first.exp(),
                lambda_hi: last.exp(),
                slope,
            });
        }
    } else {
        let mut lo = first;
        while lo + width <= last + 1e-9 {
            let hi = lo + width;
            let idx: Vec<usize> = (0..xs.len())
                .filter(|&i| xs[i] >= lo - 1e-12 && xs[i] <= hi + 1e-12)
                .collect();
            if idx.len() >= cfg.min_samples {
                let wx: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
                let wy: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
                if let Some((slope, _)) = fit::line(&wx, &wy) {
                    windows.push(WindowSlope {
                        lambda_lo: lo.exp(),
                        lambda_hi: hi.exp(),
                        slope,
                    });
                }
            }
            lo += step;
        }
    }
    let alpha = windows
        .iter()
        .map(|w| w.slope)
        .min_by(f64::total_cmp)
        .ok_or(Error::InsufficientResolution {
            usable: xs.len(),
            required: cfg.min_samples,
        })?;
    Ok(ExponentFit {
        alpha: NSValue::Finite(alpha.max(0.0)),
        windows,
        usable_samples: xs.len(),
    })
}

/// Capacity `1/α` of a zero-dimensional cokernel.
pub fn capacity_of_cokernel(
    m: &LaurentMatrix,
    grid: &[f64],
    quad: &Quadrature,
) -> Result<CapacityValue> {
    let s = spectral_density(m, grid, quad)?;
    cokernel_capacity_from_samples(&s)
}

/// As [`capacity_of_cokernel`] on an already sampled density.
pub fn cokernel_capacity_from_samples(s: &SpectralDensitySamples) -> Result<CapacityValue> {
    if s.kernel_dim > DIM_TOLERANCE {
        return Err(Error::NotZeroDimensional {
            dimension: s.kernel_dim,
        });
    }
    Ok(ns_to_capacity(ns_exponent(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPolynomial;
    use crate::symbol::density::default_grid;

    fn power(n: u32) -> LaurentMatrix {
        LaurentMatrix::scalar(LaurentPolynomial::z_minus_one(1, 0).pow(n))
    }

    fn alpha(m: &LaurentMatrix, q: &Quadrature) -> NSValue {
        ns_exponent(&spectral_density(m, &default_grid(), q).unwrap()).unwrap()
    }

    #[test]
    fn circle_exponent_is_one() {
        let a = alpha(&power(1), &Quadrature::default_for_rank(1));
        assert!((a.finite_part().unwrap() - 1.0).abs() < 0.05, "{a}");
    }

    #[test]
    fn powers_give_reciprocals() {
        let q = Quadrature::default_for_rank(1);
        for n in 2..=4 {
            let a = alpha(&power(n), &q).finite_part().unwrap();
            assert!((a - 1.0 / n as f64).abs() < 0.05 / n as f64, "n={n}: {a}");
        }
    }

    #[test]
    fn gapped_operators() {
        let q = Quadrature::default_for_rank(1);
        assert_eq!(alpha(&LaurentMatrix::identity(1, 1), &q), NSValue::InfinityPlus);
        // 2 + z has singular values in [1, 3]
        let shifted = LaurentMatrix::scalar(
            LaurentPolynomial::variable(1, 0) + LaurentPolynomial::constant(1, 2.0.into()),
        );
        assert_eq!(alpha(&shifted, &q), NSValue::InfinityPlus);
        assert_eq!(alpha(&LaurentMatrix::zeros(1, 1, 1), &q), NSValue::InfinityPlus);
    }

    #[test]
    fn capacities() {
        let q = Quadrature::default_for_rank(1);
        let g = default_grid();
        let c = capacity_of_cokernel(&power(2), &g, &q).unwrap();
        assert!((c.finite_part().unwrap() - 2.0).abs() < 0.1);
        let c = capacity_of_cokernel(&power(1), &g, &q).unwrap();
        assert!((c.finite_part().unwrap() - 1.0).abs() < 0.05);
        assert!(capacity_of_cokernel(&LaurentMatrix::identity(1, 1), &g, &q)
            .unwrap()
            .is_zero_minus());
        match capacity_of_cokernel(&LaurentMatrix::zeros(1, 1, 1), &g, &q) {
            Err(Error::NotZeroDimensional { dimension }) => assert_eq!(dimension, 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_coarse_is_an_error() {
        let q = Quadrature::new(8).unwrap();
        let s = spectral_density(&power(1), &default_grid(), &q).unwrap();
        assert!(matches!(
            ns_exponent(&s),
            Err(Error::InsufficientResolution { .. })
        ));
    }

    #[test]
    fn scaling_leaves_exponent_alone() {
        let q = Quadrature::default_for_rank(1);
        for t in [0.25, 0.5] {
            let a = alpha(&power(2).scale(t.into()), &q).finite_part().unwrap();
            let b = alpha(&power(2), &q).finite_part().unwrap();
            assert!((a - b).abs() < 0.05, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn two_torus_laplacian_symbol() {
        // σ = |u|² near zero for Σ(z_i − 1)(z_i⁻¹ − 1), so α = 1 on T²
        let mut p = LaurentPolynomial::zero(2);
        for i in 0..2 {
            let d = LaurentPolynomial::z_minus_one(2, i);
            p = p + &d * &d.adjoint();
        }
        let a = alpha(&LaurentMatrix::scalar(p), &Quadrature::default_for_rank(2));
        assert!((a.finite_part().unwrap() - 1.0).abs() < 0.05, "{a}");
    }
}
