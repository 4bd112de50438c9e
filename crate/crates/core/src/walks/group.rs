//! Concrete finitely generated groups with canonical generating sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Group description as read from a spec file, e.g.
/// `{"kind": "free_abelian", "n": 2}` or `{"kind": "heisenberg"}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    FreeAbelian { n: usize },
    Heisenberg,
    Lamplighter,
    FreeGroup { r: usize },
    FiniteCyclic { m: u64 },
    DirectProduct { factors: Vec<GroupSpec> },
}

/// Lamp window of the lamplighter representation: bit `i` is position `i − 64`.
pub const LAMP_OFFSET: i64 = 64;

/// Canonical element forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Lattice(Vec<i64>),
    /// `(a, b, c)` with `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
    Heisenberg([i64; 3]),
    /// Lit lamps in the window `[−64, 63]` and the lamplighter position.
    Lamplighter { lamps: u128, pos: i64 },
    /// Freely reduced word; letter `±(i+1)` is the generator `a_i^{±1}`.
    Word(Vec<i8>),
    Residue(u64),
    Tuple(Vec<Element>),
}

/// A group together with its element arithmetic and generating set.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupModel {
    spec: GroupSpec,
    generators: Vec<Element>,
}

impl GroupModel {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        validate(&spec)?;
        let generators = generators_of(&spec);
        Ok(GroupModel { spec, generators })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Symmetric generating set without the identity.
    pub fn generating_set(&self) -> &[Element] {
        &self.generators
    }

    pub fn identity(&self) -> Element {
        identity_of(&self.spec)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        mul(&self.spec, a, b)
    }

    pub fn inverse(&self, a: &Element) -> Result<Element> {
        inverse(&self.spec, a)
    }
}

fn validate(spec: &GroupSpec) -> Result<()> {
    match spec {
        GroupSpec::FreeAbelian { n: 0 } => Err(Error::InvalidArgument("free_abelian needs n ≥ 1".into())),
        GroupSpec::FreeGroup { r } if *r == 0 || *r > 127 => {
            Err(Error::InvalidArgument(format!("free_group needs 1 ≤ r ≤ 127, got {r}")))
        }
        GroupSpec::FiniteCyclic { m: 0 } => Err(Error::InvalidArgument("finite_cyclic needs m ≥ 1".into())),
        GroupSpec::DirectProduct { factors } => {
            if factors.is_empty() {
                return Err(Error::InvalidArgument("direct_product needs at least one factor".into()));
            }
            factors.iter().try_for_each(validate)
        }
        _ => Ok(()),
    }
}

fn identity_of(spec: &GroupSpec) -> Element {
    match spec {
        GroupSpec::FreeAbelian { n } => Element::Lattice(vec![0; *n]),
        GroupSpec::Heisenberg => Element::Heisenberg([0; 3]),
        GroupSpec::Lamplighter => Element::Lamplighter { lamps: 0, pos: 0 },
        GroupSpec::FreeGroup { .. } => Element::Word(Vec::new()),
        GroupSpec::FiniteCyclic { .. } => Element::Residue(0),
        GroupSpec::DirectProduct { factors } => Element::Tuple(factors.iter().map(identity_of).collect()),
    }
}

fn generators_of(spec: &GroupSpec) -> Vec<Element> {
    match spec {
        GroupSpec::FreeAbelian { n } => (0..*n)
            .flat_map(|i| {
                [1, -1].map(|s| {
                    let mut v = vec![0; *n];
                    v[i] = s;
                    Element::Lattice(v)
                })
            })
            .collect(),
        GroupSpec::Heisenberg => vec![
            Element::Heisenberg([1, 0, 0]),
            Element::Heisenberg([-1, 0, 0]),
            Element::Heisenberg([0, 1, 0]),
            Element::Heisenberg([0, -1, 0]),
        ],
        GroupSpec::Lamplighter => vec![
            Element::Lamplighter { lamps: 0, pos: 1 },
            Element::Lamplighter { lamps: 0, pos: -1 },
            Element::Lamplighter {
                lamps: 1u128 << LAMP_OFFSET,
                pos: 0,
            },
        ],
        GroupSpec::FreeGroup { r } => (1..=*r as i8)
            .flat_map(|a| [Element::Word(vec![a]), Element::Word(vec![-a])])
            .collect(),
        GroupSpec::FiniteCyclic { m } => match m {
            1 => Vec::new(),
            2 => vec![Element::Residue(1)],
            _ => vec![Element::Residue(1), Element::Residue(m - 1)],
        },
        GroupSpec::DirectProduct { factors } => {
            let ids: Vec<Element> = factors.iter().map(identity_of).collect();
            factors
                .iter()
                .enumerate()
                .flat_map(|(i, f)| {
                    let ids = ids.clone();
                    generators_of(f).into_iter().map(move |g| {
                        let mut t = ids.clone();
                        t[i] = g;
                        Element::Tuple(t)
                    })
                })
                .collect()
        }
    }
}

/// Shifts a lamp configuration by `by` positions, failing if a lit lamp
/// leaves the window.
fn shift_lamps(lamps: u128, by: i64) -> Result<u128> {
    if lamps == 0 || by == 0 {
        return Ok(lamps);
    }
    let lo = lamps.trailing_zeros() as i64;
    let hi = 127 - lamps.leading_zeros() as i64;
    if lo + by < 0 || hi + by > 127 {
        return Err(Error::Unsupported(format!(
            "lamplighter configuration leaves the window [{}, {}]",
            -LAMP_OFFSET,
            127 - LAMP_OFFSET
        )));
    }
    Ok(if by > 0 { lamps << by } else { lamps >> -by })
}

fn mul(spec: &GroupSpec, a: &Element, b: &Element) -> Result<Element> {
    match (spec, a, b) {
        (GroupSpec::FreeAbelian { n }, Element::Lattice(x), Element::Lattice(y))
            if x.len() == *n && y.len() == *n =>
        {
            Ok(Element::Lattice(x.iter().zip(y).map(|(p, q)| p + q).collect()))
        }
        (GroupSpec::Heisenberg, Element::Heisenberg([a1, b1, c1]), Element::Heisenberg([a2, b2, c2])) => {
            Ok(Element::Heisenberg([a1 + a2, b1 + b2, c1 + c2 + a1 * b2]))
        }
        (
            GroupSpec::Lamplighter,
            Element::Lamplighter { lamps: l1, pos: p1 },
            Element::Lamplighter { lamps: l2, pos: p2 },
        ) => Ok(Element::Lamplighter {
            lamps: l1 ^ shift_lamps(*l2, *p1)?,
            pos: p1 + p2,
        }),
        (GroupSpec::FreeGroup { .. }, Element::Word(x), Element::Word(y)) => {
            let mut w = x.clone();
            for &l in y {
                if w.last() == Some(&-l) {
                    w.pop();
                } else {
                    w.push(l);
                }
            }
            Ok(Element::Word(w))
        }
        (GroupSpec::FiniteCyclic { m }, Element::Residue(x), Element::Residue(y)) if x < m && y < m => {
            Ok(Element::Residue(((*x as u128 + *y as u128) % *m as u128) as u64))
        }
        (GroupSpec::DirectProduct { factors }, Element::Tuple(x), Element::Tuple(y))
            if x.len() == factors.len() && y.len() == factors.len() =>
        {
            Ok(Element::Tuple(
                factors
                    .iter()
                    .zip(x.iter().zip(y))
                    .map(|(f, (p, q))| mul(f, p, q))
                    .collect::<Result<_>>()?,
            ))
        }
        _ => Err(Error::InvalidArgument(format!(
            "elements {a:?} and {b:?} do not both belong to {spec:?}"
        ))),
    }
}

fn inverse(spec: &GroupSpec, a: &Element) -> Result<Element> {
    match (spec, a) {
        (GroupSpec::FreeAbelian { n }, Element::Lattice(x)) if x.len() == *n => {
            Ok(Element::Lattice(x.iter().map(|v| -v).collect()))
        }
        (GroupSpec::Heisenberg, Element::Heisenberg([a, b, c])) => Ok(Element::Heisenberg([-a, -b, a * b - c])),
        (GroupSpec::Lamplighter, Element::Lamplighter { lamps, pos }) => Ok(Element::Lamplighter {
            lamps: shift_lamps(*lamps, -pos)?,
            pos: -pos,
        }),
        (GroupSpec::FreeGroup { .. }, Element::Word(w)) => Ok(Element::Word(w.iter().rev().map(|l| -l).collect())),
        (GroupSpec::FiniteCyclic { m }, Element::Residue(x)) if x < m => Ok(Element::Residue((m - x) % m)),
        (GroupSpec::DirectProduct { factors }, Element::Tuple(x)) if x.len() == factors.len() => Ok(Element::Tuple(
            factors
                .iter()
                .zip(x)
                .map(|(f, p)| inverse(f, p))
                .collect::<Result<_>>()?,
        )),
        _ => Err(Error::InvalidArgument(format!(
            "element {a:?} does not belong to {spec:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_kinds() -> Vec<GroupSpec> {
        vec![
            GroupSpec::FreeAbelian { n: 3 },
            GroupSpec::Heisenberg,
            GroupSpec::Lamplighter,
            GroupSpec::FreeGroup { r: 2 },
            GroupSpec::FiniteCyclic { m: 5 },
            GroupSpec::DirectProduct {
                factors: vec![GroupSpec::FreeAbelian { n: 1 }, GroupSpec::FiniteCyclic { m: 2 }],
            },
        ]
    }

    /// A word of generator indices evaluated left to right.
    fn word(g: &GroupModel, idx: &[usize]) -> Element {
        let s = g.generating_set();
        idx.iter()
            .fold(g.identity(), |acc, &i| g.mul(&acc, &s[i % s.len()]).unwrap())
    }

    #[test]
    fn generating_sets_are_symmetric_without_identity() {
        for spec in all_kinds() {
            let g = GroupModel::new(spec.clone()).unwrap();
            let s = g.generating_set();
            assert!(!s.is_empty());
            assert!(!s.contains(&g.identity()), "{spec:?}");
            for x in s {
                assert!(s.contains(&g.inverse(x).unwrap()), "{spec:?}");
            }
        }
        assert!(GroupModel::new(GroupSpec::FiniteCyclic { m: 1 })
            .unwrap()
            .generating_set()
            .is_empty());
    }

    #[test]
    fn heisenberg_commutator_is_central() {
        let g = GroupModel::new(GroupSpec::Heisenberg).unwrap();
        let x = Element::Heisenberg([1, 0, 0]);
        let y = Element::Heisenberg([0, 1, 0]);
        let xy = g.mul(&x, &y).unwrap();
        let yx = g.mul(&y, &x).unwrap();
        let comm = g.mul(&xy, &g.inverse(&yx).unwrap()).unwrap();
        assert_eq!(comm, Element::Heisenberg([0, 0, 1]));
    }

    #[test]
    fn lamplighter_toggles_where_it_stands() {
        let g = GroupModel::new(GroupSpec::Lamplighter).unwrap();
        let t = Element::Lamplighter { lamps: 0, pos: 1 };
        let m = Element::Lamplighter {
            lamps: 1 << LAMP_OFFSET,
            pos: 0,
        };
        let e = g.mul(&g.mul(&t, &m).unwrap(), &g.mul(&t, &m).unwrap()).unwrap();
        assert_eq!(
            e,
            Element::Lamplighter {
                lamps: 0b11 << (LAMP_OFFSET + 1),
                pos: 2
            }
        );
        let far = Element::Lamplighter { lamps: 0, pos: 100 };
        assert!(g.mul(&far, &m).is_err());
    }

    #[test]
    fn free_words_reduce() {
        let g = GroupModel::new(GroupSpec::FreeGroup { r: 2 }).unwrap();
        let ab = Element::Word(vec![1, 2]);
        let inv = g.inverse(&ab).unwrap();
        assert_eq!(inv, Element::Word(vec![-2, -1]));
        assert_eq!(g.mul(&ab, &inv).unwrap(), g.identity());
    }

    #[test]
    fn spec_json() {
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"free_abelian","n":2}"#).unwrap();
        assert_eq!(s, GroupSpec::FreeAbelian { n: 2 });
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"heisenberg"}"#).unwrap();
        assert_eq!(s, GroupSpec::Heisenberg);
        let s: GroupSpec = serde_json::from_str(
            r#"{"kind":"direct_product","factors":[{"kind":"lamplighter"},{"kind":"finite_cyclic","m":3}]}"#,
        )
        .unwrap();
        assert!(matches!(s, GroupSpec::DirectProduct { .. }));
        assert!(serde_json::from_str::<GroupSpec>(r#"{"kind":"free_abelian","n":2,"x":1}"#).is_err());
        assert!(serde_json::from_str::<GroupSpec>(r#"{"kind":"klein"}"#).is_err());
        assert!(GroupModel::new(GroupSpec::FreeAbelian { n: 0 }).is_err());
    }

    #[test]
    fn foreign_elements_are_rejected() {
        let g = GroupModel::new(GroupSpec::Heisenberg).unwrap();
        assert!(g.mul(&Element::Residue(0), &g.identity()).is_err());
        assert!(g.inverse(&Element::Word(vec![])).is_err());
    }

    proptest! {
        #[test]
        fn associative_with_identity_and_inverses(
            a in prop::collection::vec(0usize..8, 0..12),
            b in prop::collection::vec(0usize..8, 0..12),
            c in prop::collection::vec(0usize..8, 0..12),
        ) {
            for spec in all_kinds() {
                let g = GroupModel::new(spec).unwrap();
                let (x, y, z) = (word(&g, &a), word(&g, &b), word(&g, &c));
                let left = g.mul(&g.mul(&x, &y).unwrap(), &z).unwrap();
                let right = g.mul(&x, &g.mul(&y, &z).unwrap()).unwrap();
                prop_assert_eq!(&left, &right);
                prop_assert_eq!(g.mul(&x, &g.identity()).unwrap(), x.clone());
                prop_assert_eq!(g.mul(&g.identity(), &x).unwrap(), x.clone());
                prop_assert_eq!(g.mul(&x, &g.inverse(&x).unwrap()).unwrap(), g.identity());
            }
        }
    }
}
