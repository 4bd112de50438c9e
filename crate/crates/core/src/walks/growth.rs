//! Breadth-first balls in Cayley graphs and growth functions.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::group::{Element, GroupModel};
use crate::error::{Error, Result};
use crate::fit;

/// Default cap on the number of enumerated elements.
pub const DEFAULT_BUDGET: usize = 10_000_000;

pub(crate) const OUTSIDE: u32 = u32::MAX;

/// Elements of word length at most `radius`, in breadth-first order.
#[derive(Debug, Clone)]
pub struct Ball {
    elements: Vec<Element>,
    index: FxHashMap<Element, u32>,
    /// `sphere_ends[k]` is the number of elements of length `≤ k`.
    sphere_ends: Vec<usize>,
    saturated: bool,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn radius(&self) -> usize {
        self.sphere_ends.len() - 1
    }

    pub fn word_length(&self, x: &Element) -> Option<usize> {
        let i = *self.index.get(x)? as usize;
        Some(self.sphere_ends.partition_point(|&end| end <= i))
    }

    /// `(element, word length)` pairs in breadth-first order.
    pub fn iter(&self) -> impl Iterator<Item = (&Element, usize)> + '_ {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x, self.sphere_ends.partition_point(|&end| end <= i)))
    }

    /// True when the last sphere was empty, so the group is finite.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn counts(&self) -> Vec<u64> {
        self.sphere_ends.iter().map(|&e| e as u64).collect()
    }
}

/// Neighbour table of a ball: `nbr[i·|S| + j]` is the index of `x_i·s_j`, or
/// `OUTSIDE` when that product has length beyond the radius.
pub(crate) struct Explored {
    pub sphere_ends: Vec<usize>,
    pub nbr: Vec<u32>,
    pub degree: usize,
    pub saturated: bool,
}

fn budget_error(budget: usize, complete: usize) -> Error {
    Error::BudgetExceeded {
        budget,
        radius_reached: complete,
        max_feasible_steps: 2 * complete,
    }
}

fn bfs(g: &GroupModel, radius: usize, budget: usize, neighbours: bool) -> Result<(Ball, Vec<u32>)> {
    let gens = g.generating_set();
    let mut elements = vec![g.identity()];
    let mut index = FxHashMap::default();
    index.insert(g.identity(), 0u32);
    let mut sphere_ends = vec![1usize];
    let mut nbr = Vec::new();
    let mut start = 0;
    let mut saturated = false;
    for r in 0..=radius {
        let end = elements.len();
        for i in start..end {
            for s in gens {
                let y = g.mul(&elements[i], s)?;
                let j = match index.get(&y) {
                    Some(&j) => j,
                    None if r < radius => {
                        if elements.len() >= budget {
                            return Err(budget_error(budget, r));
                        }
                        let j = elements.len() as u32;
                        index.insert(y.clone(), j);
                        elements.push(y);
                        j
                    }
                    None => OUTSIDE,
                };
                if neighbours {
                    nbr.push(j);
                }
            }
        }
        if r < radius {
            if elements.len() == end {
                saturated = true;
            }
            sphere_ends.push(elements.len());
        }
        start = end;
    }
    Ok((
        Ball {
            elements,
            index,
            sphere_ends,
            saturated,
        },
        nbr,
    ))
}

/// Exact ball of radius `radius` under the canonical generating set.
pub fn ball(g: &GroupModel, radius: usize) -> Result<Ball> {
    ball_with_budget(g, radius, DEFAULT_BUDGET)
}

pub fn ball_with_budget(g: &GroupModel, radius: usize, budget: usize) -> Result<Ball> {
    Ok(bfs(g, radius, budget, false)?.0)
}

pub(crate) fn explore(g: &GroupModel, radius: usize, budget: usize) -> Result<Explored> {
    let (ball, nbr) = bfs(g, radius, budget, true)?;
    Ok(Explored {
        sphere_ends: ball.sphere_ends,
        nbr,
        degree: g.generating_set().len(),
        saturated: ball.saturated,
    })
}

/// `b_S(k)` for `k = 0..=K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSeries {
    pub counts: Vec<u64>,
}

pub fn growth_series(g: &GroupModel, radius: usize) -> Result<GrowthSeries> {
    Ok(GrowthSeries {
        counts: ball(g, radius)?.counts(),
    })
}

/// Log-log slope of `b_S(k)` over the upper half of the radii.
pub fn growth_degree(gs: &GrowthSeries) -> Result<f64> {
    let k_max = gs.counts.len().saturating_sub(1);
    if k_max < 8 {
        return Err(Error::InvalidArgument(format!(
            "growth degree needs radius at least 8, got {k_max}"
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = (k_max.div_ceil(2)..=k_max)
        .map(|k| ((k as f64).ln(), (gs.counts[k] as f64).ln()))
        .unzip();
    let (slope, _) = fit::line(&xs, &ys).ok_or(Error::InvalidArgument("degenerate growth series".into()))?;
    Ok(slope.max(0.0))
}

/// `Σ i·n_i` for the ranks `n_1, n_2, …` of the lower central series quotients.
pub fn bass_degree(ranks: &[u64]) -> u64 {
    ranks.iter().zip(1u64..).map(|(n, i)| i * n).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks::group::GroupSpec;

    fn model(spec: GroupSpec) -> GroupModel {
        GroupModel::new(spec).unwrap()
    }

    #[test]
    fn small_balls() {
        let z = model(GroupSpec::FreeAbelian { n: 1 });
        let b = ball(&z, 3).unwrap();
        assert_eq!(b.len(), 7);
        assert_eq!(b.word_length(&Element::Lattice(vec![-3])), Some(3));
        assert_eq!(b.word_length(&Element::Lattice(vec![4])), None);
        assert_eq!(ball(&model(GroupSpec::FreeAbelian { n: 2 }), 2).unwrap().len(), 13);
        assert_eq!(ball(&model(GroupSpec::FreeGroup { r: 2 }), 2).unwrap().len(), 17);
    }

    #[test]
    fn lattice_ball_matches_enumeration() {
        let b = ball(&model(GroupSpec::FreeAbelian { n: 2 }), 5).unwrap();
        for (x, len) in b.iter() {
            let Element::Lattice(v) = x else { panic!() };
            assert_eq!(len as i64, v[0].abs() + v[1].abs());
        }
        let direct = (-5i64..=5)
            .flat_map(|a| (-5i64..=5).map(move |c| (a, c)))
            .filter(|(a, c)| a.abs() + c.abs() <= 5)
            .count();
        assert_eq!(b.len(), direct);
    }

    #[test]
    fn growth_examples() {
        let z = growth_series(&model(GroupSpec::FreeAbelian { n: 1 }), 4).unwrap();
        assert_eq!(z.counts, vec![1, 3, 5, 7, 9]);
        let z2 = growth_series(&model(GroupSpec::FreeAbelian { n: 2 }), 2).unwrap();
        assert_eq!(z2.counts, vec![1, 5, 13]);
        let h = growth_series(&model(GroupSpec::Heisenberg), 2).unwrap();
        assert_eq!(h.counts[..2], [1, 5]);
        assert!(h.counts[2] > 13);
    }

    #[test]
    fn growth_degrees() {
        let z2 = growth_series(&model(GroupSpec::FreeAbelian { n: 2 }), 32).unwrap();
        let counts: Vec<u64> = (0..=32u64).map(|k| 2 * k * k + 2 * k + 1).collect();
        assert_eq!(z2.counts, counts);
        assert!((growth_degree(&z2).unwrap() - 2.0).abs() < 0.2);
        let z = growth_series(&model(GroupSpec::FreeAbelian { n: 1 }), 16).unwrap();
        assert!((growth_degree(&z).unwrap() - 1.0).abs() < 0.1);
        assert!(growth_degree(&GrowthSeries { counts: vec![1, 3, 5] }).is_err());
    }

    #[test]
    fn bass() {
        assert_eq!(bass_degree(&[2, 1]), 4);
        assert_eq!(bass_degree(&[3]), 3);
        assert_eq!(bass_degree(&[]), 0);
    }

    #[test]
    fn finite_groups_saturate() {
        let b = ball(&model(GroupSpec::FiniteCyclic { m: 5 }), 6).unwrap();
        assert_eq!(b.len(), 5);
        assert!(b.saturated());
        let trivial = ball(&model(GroupSpec::FiniteCyclic { m: 1 }), 3).unwrap();
        assert_eq!(trivial.counts(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn budget_is_enforced() {
        let f = model(GroupSpec::FreeGroup { r: 2 });
        match ball_with_budget(&f, 10, 100) {
            Err(Error::BudgetExceeded { radius_reached, max_feasible_steps, .. }) => {
                // |B(3)| = 53 fits, |B(4)| = 161 does not
                assert_eq!(radius_reached, 3);
                assert_eq!(max_feasible_steps, 6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn product_growth_bounds() {
        let a = GroupSpec::FreeAbelian { n: 1 };
        let b = GroupSpec::Heisenberg;
        let k = 8;
        let ga = growth_series(&model(a.clone()), k).unwrap().counts;
        let gb = growth_series(&model(b.clone()), k).unwrap().counts;
        let gp = growth_series(&model(GroupSpec::DirectProduct { factors: vec![a, b] }), k)
            .unwrap()
            .counts;
        for r in 0..=k {
            assert!(gp[r] >= ga[r / 2] * gb[r / 2]);
            assert!(gp[r] <= ga[r] * gb[r]);
        }
    }
}
