//! Tensor-product midpoint rule on the torus `[0, 2π)ⁿ` and fast symbol
//! evaluation at its nodes.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;

/// Relative kernel tolerance: singular values at or below
/// `KERNEL_REL_TOL × (largest singular value on the grid)` count as kernel.
pub const KERNEL_REL_TOL: f64 = 1e-12;

/// Quadrature settings for integrals over normalised Haar measure on `Tⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub nodes_per_axis: usize,
    pub kernel_rel_tol: f64,
}

impl Quadrature {
    pub fn new(nodes_per_axis: usize) -> Result<Self> {
        if nodes_per_axis < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least 2 nodes per axis, got {nodes_per_axis}"
            )));
        }
        Ok(Quadrature {
            nodes_per_axis,
            kernel_rel_tol: KERNEL_REL_TOL,
        })
    }

    /// 4096 nodes on the circle, 512² on `T²`, 96³ on `T³`, 32⁴ on `T⁴`.
    pub fn default_for_rank(rank: usize) -> Self {
        let nodes_per_axis = match rank {
            0 | 1 => 4096,
            2 => 512,
            3 => 96,
            _ => 32,
        };
        Quadrature {
            nodes_per_axis,
            kernel_rel_tol: KERNEL_REL_TOL,
        }
    }

    pub fn node_count(&self, rank: usize) -> usize {
        self.nodes_per_axis.pow(rank as u32)
    }

    pub fn node_angle(&self, j: usize) -> f64 {
        2.0 * PI * (j as f64 + 0.5) / self.nodes_per_axis as f64
    }

    /// Angle vector of the flat node index `idx` (last axis varies fastest).
    pub fn node(&self, rank: usize, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; rank];
        let mut rest = idx;
        for slot in x.iter_mut().rev() {
            *slot = self.node_angle(rest % self.nodes_per_axis);
            rest /= self.nodes_per_axis;
        }
        x
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 2 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least 2 nodes per axis".into(),
            ));
        }
        if self.kernel_rel_tol.is_nan() || self.kernel_rel_tol < 0.0 {
            return Err(Error::InvalidArgument(
                "kernel tolerance must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// A Laurent matrix compiled against one quadrature: per-axis tables of
/// `exp(i·e·θ_j)` replace trigonometric calls in the inner loop.
pub(crate) struct CompiledSymbol {
    rows: usize,
    cols: usize,
    rank: usize,
    nodes_per_axis: usize,
    // per axis: lowest exponent and the table [node][e - lo]
    axes: Vec<(i64, usize, Vec<Complex64>)>,
    // per entry (row-major): terms as (table offsets per axis, coefficient)
    entries: Vec<Vec<(Vec<usize>, Complex64)>>,
}

impl CompiledSymbol {
    pub(crate) fn new(m: &LaurentMatrix, quad: &Quadrature) -> Self {
        let rank = m.rank();
        let mut bounds = vec![(0i64, 0i64); rank];
        for (_, _, p) in m.entries() {
            if let Some(b) = p.exponent_bounds() {
                for (slot, (lo, hi)) in bounds.iter_mut().zip(b) {
                    slot.0 = slot.0.min(lo);
                    slot.1 = slot.1.max(hi);
                }
            }
        }
        let n = quad.nodes_per_axis;
        let axes = bounds
            .iter()
            .map(|&(lo, hi)| {
                let width = (hi - lo + 1) as usize;
                let mut table = Vec::with_capacity(n * width);
                for j in 0..n {
                    let theta = quad.node_angle(j);
                    for e in lo..=hi {
                        table.push(Complex64::from_polar(1.0, e as f64 * theta));
                    }
                }
                (lo, width, table)
            })
            .collect::<Vec<_>>();
        let entries = m
            .entries()
            .map(|(_, _, p)| {
                p.terms()
                    .map(|(e, c)| {
                        let offs = e
                            .iter()
                            .zip(&axes)
                            .map(|(&v, (lo, _, _))| (v - lo) as usize)
                            .collect();
                        (offs, c)
                    })
                    .collect()
            })
            .collect();
        CompiledSymbol {
            rows: m.rows(),
            cols: m.cols(),
            rank,
            nodes_per_axis: n,
            axes,
            entries,
        }
    }

    pub(crate) fn node_count(&self) -> usize {
        self.nodes_per_axis.pow(self.rank as u32)
    }

    pub(crate) fn eval_node(&self, idx: usize, axis_idx: &mut [usize]) -> DMatrix<Complex64> {
        let mut rest = idx;
        for slot in axis_idx.iter_mut().rev() {
            *slot = rest % self.nodes_per_axis;
            rest /= self.nodes_per_axis;
        }
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (k, terms) in self.entries.iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (offs, c) in terms {
                let mut t = *c;
                for ((_, width, table), (&j, &o)) in self.axes.iter().zip(axis_idx.iter().zip(offs)) {
                    t *= table[j * width + o];
                }
                acc += t;
            }
            out[(k / self.cols, k % self.cols)] = acc;
        }
        out
    }
}
