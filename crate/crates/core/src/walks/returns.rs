//! Exact return probabilities `p(k) = tr(P^k)` of symmetric random walks.
//!
//! With `μ_j` the law of the walk after `j` steps and a symmetric step
//! distribution, `p(2j) = Σ_g μ_j(g)²` and `p(2j+1) = Σ_g μ_j(g)·μ_{j+1}(g)`.
//! Only the ball of radius `⌈K/2⌉` is needed for `K` steps.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::group::{GroupModel, GroupSpec};
use super::growth::{explore, DEFAULT_BUDGET, OUTSIDE};
use crate::error::{Error, Result};

/// Probabilities below this are dropped during convolution.
pub const PRUNE_BELOW: f64 = 1e-300;

/// Which operator `P` is iterated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WalkSpec {
    pub group: GroupSpec,
    /// Uniform on `S ∪ {e}` when true, uniform on `S` otherwise.
    pub lazy: bool,
}

impl WalkSpec {
    pub fn lazy(group: GroupSpec) -> Self {
        WalkSpec { group, lazy: true }
    }

    pub fn simple(group: GroupSpec) -> Self {
        WalkSpec { group, lazy: false }
    }

    /// Step weights `(w_identity, w_generator)`.
    pub fn weights(&self, degree: usize) -> Result<(f64, f64)> {
        if self.lazy {
            let w = 1.0 / (degree + 1) as f64;
            Ok((w, w))
        } else if degree == 0 {
            Err(Error::InvalidArgument(
                "a non-lazy walk needs a nonempty generating set".into(),
            ))
        } else {
            Ok((0.0, 1.0 / degree as f64))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub walk: WalkSpec,
    /// `p(0), …, p(K)`.
    pub probabilities: Vec<f64>,
    /// Order of the group when the enumerated ball closed up.
    pub finite_order: Option<usize>,
}

impl ReturnSeries {
    pub fn steps(&self) -> usize {
        self.probabilities.len() - 1
    }
}

pub fn return_series(walk: &WalkSpec, steps: usize) -> Result<ReturnSeries> {
    return_series_with_budget(walk, steps, DEFAULT_BUDGET)
}

/// Return probabilities for `k = 0..=steps`.
///
/// `free_abelian` and `free_group` use exact reductions (a reflected lattice
/// array and the word-length chain); every other group goes through the
/// enumerated ball. The budget bounds the number of stored states.
pub fn return_series_with_budget(walk: &WalkSpec, steps: usize, budget: usize) -> Result<ReturnSeries> {
    let g = GroupModel::new(walk.group.clone())?;
    let degree = g.generating_set().len();
    let (w0, w) = walk.weights(degree)?;
    let radius = steps.div_ceil(2);
    match &walk.group {
        GroupSpec::FreeAbelian { n } => {
            let states = orthant_states(*n, radius);
            if states > budget as f64 {
                return Err(Error::BudgetExceeded {
                    budget,
                    radius_reached: max_orthant_radius(*n, budget),
                    max_feasible_steps: 2 * max_orthant_radius(*n, budget),
                });
            }
            Ok(ReturnSeries {
                walk: walk.clone(),
                probabilities: lattice_series(*n, steps, w0, w),
                finite_order: None,
            })
        }
        GroupSpec::FreeGroup { r } => Ok(ReturnSeries {
            walk: walk.clone(),
            probabilities: free_group_series(*r, steps, w0),
            finite_order: None,
        }),
        _ => generic_series(walk, &g, steps, budget, w0, w),
    }
}

/// Combines consecutive laws into `p(2j)` and `p(2j+1)`.
fn assemble(steps: usize, mut next: impl FnMut(usize) -> (f64, f64)) -> Vec<f64> {
    let mut p = vec![0.0; steps + 1];
    for j in 0..=steps / 2 {
        let (even, odd) = next(j);
        p[2 * j] = even;
        if 2 * j < steps {
            p[2 * j + 1] = odd;
        }
    }
    p
}

fn generic_series(
    walk: &WalkSpec,
    g: &GroupModel,
    steps: usize,
    budget: usize,
    w0: f64,
    w: f64,
) -> Result<ReturnSeries> {
    let radius = steps.div_ceil(2);
    let ex = explore(g, radius, budget)?;
    let size = *ex.sphere_ends.last().unwrap();
    let deg = ex.degree;
    let nbr = &ex.nbr;
    let step = |mu: &[f64], len: usize| -> Vec<f64> {
        (0..len)
            .into_par_iter()
            .with_min_len(4096)
            .map(|i| {
                let mut acc = w0 * mu[i];
                for &j in &nbr[i * deg..(i + 1) * deg] {
                    if j != OUTSIDE {
                        acc += w * mu[j as usize];
                    }
                }
                if acc < PRUNE_BELOW {
                    0.0
                } else {
                    acc
                }
            })
            .collect()
    };
    // μ_j lives on the first sphere_ends[j] states
    let support = |j: usize| ex.sphere_ends[j.min(ex.sphere_ends.len() - 1)];
    let mut mu = vec![0.0; size];
    mu[0] = 1.0;
    let mut mu_next = step(&mu, support(1));
    mu_next.resize(size, 0.0);
    let probabilities = assemble(steps, |j| {
        if j > 0 {
            mu = std::mem::take(&mut mu_next);
            if j < radius {
                mu_next = step(&mu, support(j + 1));
                mu_next.resize(size, 0.0);
            } else {
                mu_next = vec![0.0; size];
            }
        }
        let even = mu.iter().map(|x| x * x).sum();
        let odd = mu.iter().zip(&mu_next).map(|(a, b)| a * b).sum();
        (even, odd)
    });
    Ok(ReturnSeries {
        walk: walk.clone(),
        probabilities,
        finite_order: ex.saturated.then_some(size),
    })
}

/// Number of lattice points `x ≥ 0` with `|x|₁ ≤ r`.
fn orthant_states(n: usize, r: usize) -> f64 {
    // C(r + n, n)
    (1..=n).fold(1.0, |acc, i| acc * (r + i) as f64 / i as f64)
}

fn max_orthant_radius(n: usize, budget: usize) -> usize {
    let mut r = 0;
    while orthant_states(n, r + 1) <= budget as f64 {
        r += 1;
    }
    r
}

/// Lazy or simple walk on `ℤⁿ` stored on the orthant `x ≥ 0`, using the
/// reflection symmetry `μ(…, −x_i, …) = μ(…, x_i, …)`.
///
/// The array is swept in rows along the last axis; a row is fixed by the
/// other coordinates.
fn lattice_series(n: usize, steps: usize, w0: f64, w: f64) -> Vec<f64> {
    let radius = steps.div_ceil(2);
    let side = radius + 2;
    let strides: Vec<usize> = (0..n).map(|i| side.pow((n - 1 - i) as u32)).collect();
    let cells = side.pow(n as u32);

    struct Row {
        base: usize,
        prefix_l1: usize,
        // bit i set when prefix coordinate i is zero
        on_wall: u32,
        multiplicity: f64,
    }
    fn visit(axis: usize, left: usize, base: usize, wall: u32, strides: &[usize], out: &mut Vec<Row>, used: usize) {
        if axis + 1 == strides.len() {
            let zeros = wall.count_ones() as i32;
            out.push(Row {
                base,
                prefix_l1: used,
                on_wall: wall,
                multiplicity: 2f64.powi(axis as i32 - zeros),
            });
            return;
        }
        for c in 0..=left {
            let wall = if c == 0 { wall | 1 << axis } else { wall };
            visit(axis + 1, left - c, base + c * strides[axis], wall, strides, out, used + c);
        }
    }
    let mut rows = Vec::new();
    visit(0, radius, 0, 0, &strides, &mut rows, 0);
    rows.sort_by_key(|r| (r.prefix_l1, r.base));
    let prefix = &strides[..n - 1];

    // cells with |x|₁ > radius are never written and stay zero
    let advance = |mu: &[f64], out: &mut [f64], reach: usize| {
        let mut acc = Vec::with_capacity(radius + 1);
        for row in rows.iter().take_while(|r| r.prefix_l1 <= reach) {
            let len = reach - row.prefix_l1 + 1;
            let b = row.base;
            let cur = &mu[b..b + len + 1];
            acc.clear();
            acc.push(w0 * cur[0] + 2.0 * w * cur[1]);
            acc.extend((1..len).map(|c| w0 * cur[c] + w * (cur[c + 1] + cur[c - 1])));
            for (axis, &s) in prefix.iter().enumerate() {
                let up = &mu[b + s..b + s + len];
                let down = if row.on_wall >> axis & 1 == 1 { up } else { &mu[b - s..b - s + len] };
                for ((a, u), d) in acc.iter_mut().zip(up).zip(down) {
                    *a += w * (u + d);
                }
            }
            out[b..b + len].copy_from_slice(&acc);
        }
    };
    let sums = |mu: &[f64], nu: &[f64], reach: usize| -> (f64, f64) {
        let (mut even, mut odd) = (0.0, 0.0);
        for row in rows.iter().take_while(|r| r.prefix_l1 <= reach) {
            let len = reach - row.prefix_l1 + 1;
            let m = &mu[row.base..row.base + len];
            let v = &nu[row.base..row.base + len];
            let (mut e, mut o) = (0.0, 0.0);
            for c in 1..len {
                e += m[c] * m[c];
                o += m[c] * v[c];
            }
            even += row.multiplicity * (m[0] * m[0] + 2.0 * e);
            odd += row.multiplicity * (m[0] * v[0] + 2.0 * o);
        }
        (even, odd)
    };
    let mut mu = vec![0.0; cells];
    let mut mu_next = vec![0.0; cells];
    mu[0] = 1.0;
    advance(&mu, &mut mu_next, 1.min(radius));
    assemble(steps, |j| {
        if j > 0 {
            std::mem::swap(&mut mu, &mut mu_next);
            if j < radius {
                advance(&mu, &mut mu_next, j + 1);
            } else {
                mu_next.iter_mut().for_each(|x| *x = 0.0);
            }
        }
        sums(&mu, &mu_next, j.min(radius))
    })
}

/// The word length of a walk on the free group of rank `r` is a birth-death
/// chain; `p(k)` is its probability of sitting at 0.
fn free_group_series(r: usize, steps: usize, w0: f64) -> Vec<f64> {
    let deg = (2 * r) as f64;
    let move_p = 1.0 - w0;
    let up = move_p * (deg - 1.0) / deg;
    let down = move_p / deg;
    let mut q = vec![0.0; steps + 2];
    q[0] = 1.0;
    let mut p = vec![1.0];
    for k in 1..=steps {
        let mut next = vec![0.0; steps + 2];
        next[0] += w0 * q[0] + down * q[1];
        next[1] += move_p * q[0];
        for len in 1..k.min(steps + 1) {
            let v = q[len];
            if v == 0.0 {
                continue;
            }
            next[len] += w0 * v;
            next[len + 1] += up * v;
            if len >= 2 {
                next[len - 1] += down * v;
            }
        }
        for v in next.iter_mut() {
            if *v < PRUNE_BELOW {
                *v = 0.0;
            }
        }
        q = next;
        p.push(q[0]);
    }
    p
}

/// `∫_{Tⁿ} φ(θ)^k dθ` for the walk symbol `φ = (w₀ + 2w Σ cos θ_i)`, by the
/// midpoint rule with `nodes_per_axis` nodes. Exact for `k < nodes_per_axis`.
///
/// The integrand only depends on the multiset of `cos θ_i`, so the sum runs
/// over nondecreasing index tuples of half the circle with multinomial
/// weights.
pub fn torus_return_probabilities(n: usize, steps: usize, lazy: bool, nodes_per_axis: usize) -> Result<Vec<f64>> {
    if n == 0 || nodes_per_axis < 2 || nodes_per_axis % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "torus oracle needs n ≥ 1 and an even node count, got n={n}, nodes={nodes_per_axis}"
        )));
    }
    let (w0, w) = WalkSpec {
        group: GroupSpec::FreeAbelian { n },
        lazy,
    }
    .weights(2 * n)?;
    let half = nodes_per_axis / 2;
    let cos: Vec<f64> = (0..half)
        .map(|j| (2.0 * PI * (j as f64 + 0.5) / nodes_per_axis as f64).cos())
        .collect();
    let total = (nodes_per_axis as f64).powi(n as i32);
    // (φ, weight) over nondecreasing tuples
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut idx = vec![0usize; n];
    let fact = |k: usize| (1..=k).fold(1.0, |a, i| a * i as f64);
    loop {
        let phi = w0 + 2.0 * w * idx.iter().map(|&i| cos[i]).sum::<f64>();
        let mut mult = fact(n);
        let mut run = 1;
        for t in 1..=n {
            if t < n && idx[t] == idx[t - 1] {
                run += 1;
            } else {
                mult /= fact(run);
                run = 1;
            }
        }
        // each half-circle index stands for ±θ
        points.push((phi, mult * 2f64.powi(n as i32) / total));
        let mut axis = n;
        while axis > 0 {
            axis -= 1;
            if idx[axis] + 1 < half {
                idx[axis] += 1;
                for t in axis + 1..n {
                    idx[t] = idx[axis];
                }
                break;
            }
            if axis == 0 {
                axis = usize::MAX;
                break;
            }
        }
        if axis == usize::MAX {
            break;
        }
    }
    let mut power: Vec<f64> = points.iter().map(|p| p.1).collect();
    let mut base: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut p = Vec::with_capacity(steps + 1);
    p.push(power.iter().sum());
    for k in 1..=steps {
        let mut s = 0.0;
        for (x, b) in power.iter_mut().zip(&base) {
            *x *= b;
            s += *x;
        }
        p.push(s);
        if k % 64 == 0 {
            let keep: Vec<bool> = power.iter().map(|x| x.abs() >= PRUNE_BELOW).collect();
            let mut it = keep.iter();
            power.retain(|_| *it.next().unwrap());
            let mut it = keep.iter();
            base.retain(|_| *it.next().unwrap());
        }
    }
    Ok(p)
}
