//! Laurent polynomials and matrices over the group ring of `ℤⁿ`.
//!
//! A monomial `z₁^{v₁}⋯z_n^{v_n}` is keyed by its exponent vector. Matrix
//! entries act on column vectors, so an `m × k` matrix maps `k` free generators
//! to `m`; this matches the Koszul differentials `C_p → C_{p-1}`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPolynomial {
    rank: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

impl LaurentPolynomial {
    pub fn zero(rank: usize) -> Self {
        LaurentPolynomial {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(rank: usize, c: Complex64) -> Self {
        Self::monomial(rank, vec![0; rank], c)
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(rank: usize, exponent: Vec<i64>, c: Complex64) -> Self {
        assert_eq!(exponent.len(), rank, "exponent length must equal rank");
        let mut p = Self::zero(rank);
        p.add_term(exponent, c);
        p
    }

    /// The generator `z_axis` (0-based axis).
    pub fn variable(rank: usize, axis: usize) -> Self {
        assert!(axis < rank, "axis {axis} out of range for rank {rank}");
        let mut e = vec![0; rank];
        e[axis] = 1;
        Self::monomial(rank, e, Complex64::new(1.0, 0.0))
    }

    /// `z_axis − 1`.
    pub fn z_minus_one(rank: usize, axis: usize) -> Self {
        Self::variable(rank, axis) - Self::one(rank)
    }

    pub fn from_terms<I>(rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut p = Self::zero(rank);
        for (e, c) in terms {
            if e.len() != rank {
                return Err(Error::DimensionMismatch(format!(
                    "exponent {e:?} has length {}, rank is {rank}",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exponent: Vec<i64>, c: Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        match self.terms.entry(exponent) {
            Entry::Vacant(slot) => {
                if c != zero {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == zero {
                    slot.remove();
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.rank);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn scale(&self, t: Complex64) -> Self {
        let mut out = Self::zero(self.rank);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * t);
        }
        out
    }

    /// Adjoint in the group ring: conjugate coefficients, invert group elements.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.rank);
        for (e, c) in &self.terms {
            out.add_term(e.iter().map(|v| -v).collect(), c.conj());
        }
        out
    }

    /// Fourier symbol at the angle vector `x`: `Σ c_v exp(i⟨v, x⟩)`.
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "angle vector of length {} for rank {}",
                x.len(),
                self.rank
            )));
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                let phase: f64 = e.iter().zip(x).map(|(&v, &t)| v as f64 * t).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum())
    }

    /// Per-axis `(min, max)` exponents; `None` for the zero polynomial.
    pub fn exponent_bounds(&self) -> Option<Vec<(i64, i64)>> {
        let mut bounds: Option<Vec<(i64, i64)>> = None;
        for e in self.terms.keys() {
            let b = bounds.get_or_insert_with(|| e.iter().map(|&v| (v, v)).collect());
            for (slot, &v) in b.iter_mut().zip(e) {
                slot.0 = slot.0.min(v);
                slot.1 = slot.1.max(v);
            }
        }
        bounds
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c * sign);
        }
        out
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        self.combine(rhs, 1.0)
    }
}

impl Add for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        &self + &rhs
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        self.combine(rhs, -1.0)
    }
}

impl Sub for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        &self - &rhs
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Neg for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        -&self
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> LaurentPolynomial {
        assert_eq!(self.rank, rhs.rank, "rank mismatch");
        let mut out = LaurentPolynomial::zero(self.rank);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: Self) -> LaurentPolynomial {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            for (axis, &v) in e.iter().enumerate() {
                if v != 0 {
                    write!(f, "·z{}^{}", axis + 1, v)?;
                }
            }
        }
        Ok(())
    }
}

/// An `rows × cols` matrix of Laurent polynomials sharing one torus rank.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    rank: usize,
    entries: Vec<LaurentPolynomial>,
}

impl LaurentMatrix {
    pub fn zeros(rank: usize, rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            rows,
            cols,
            rank,
            entries: vec![LaurentPolynomial::zero(rank); rows * cols],
        }
    }

    pub fn identity(rank: usize, size: usize) -> Self {
        let mut m = Self::zeros(rank, size, size);
        for i in 0..size {
            m.set(i, i, LaurentPolynomial::one(rank));
        }
        m
    }

    pub fn scalar(p: LaurentPolynomial) -> Self {
        LaurentMatrix {
            rows: 1,
            cols: 1,
            rank: p.rank(),
            entries: vec![p],
        }
    }

    pub fn diagonal(rank: usize, diag: Vec<LaurentPolynomial>) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zeros(rank, n, n);
        for (i, p) in diag.into_iter().enumerate() {
            m.try_set(i, i, p)?;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major rows; all rows must have equal length.
    pub fn from_rows(rank: usize, rows: Vec<Vec<LaurentPolynomial>>) -> Result<Self> {
        let m = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        let mut out = Self::zeros(rank, m, k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            for (j, p) in row.into_iter().enumerate() {
                out.try_set(i, j, p)?;
            }
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPolynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPolynomial) {
        self.try_set(i, j, p).expect("entry rank mismatch")
    }

    pub fn try_set(&mut self, i: usize, j: usize, p: LaurentPolynomial) -> Result<()> {
        if p.rank() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "entry of rank {} in a rank-{} matrix",
                p.rank(),
                self.rank
            )));
        }
        if i >= self.rows || j >= self.cols {
            return Err(Error::DimensionMismatch(format!(
                "entry ({i},{j}) outside a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        self.entries[i * self.cols + j] = p;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPolynomial::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &LaurentPolynomial)> {
        let cols = self.cols;
        self.entries
            .iter()
            .enumerate()
            .map(move |(idx, p)| (idx / cols, idx % cols, p))
    }

    pub fn matmul(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        if self.cols != other.rows || self.rank != other.rank {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} (rank {}) by {}x{} (rank {})",
                self.rows, self.cols, self.rank, other.rows, other.cols, other.rank
            )));
        }
        let mut out = LaurentMatrix::zeros(self.rank, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = LaurentPolynomial::zero(self.rank);
                for l in 0..self.cols {
                    let (a, b) = (self.get(i, l), other.get(l, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Conjugate transpose in the group ring.
    pub fn adjoint(&self) -> LaurentMatrix {
        let mut out = LaurentMatrix::zeros(self.rank, self.cols, self.rows);
        for (i, j, p) in self.entries() {
            out.set(j, i, p.adjoint());
        }
        out
    }

    pub fn scale(&self, t: Complex64) -> LaurentMatrix {
        LaurentMatrix {
            entries: self.entries.iter().map(|p| p.scale(t)).collect(),
            ..self.clone()
        }
    }

    pub fn block_diag(&self, other: &LaurentMatrix) -> Result<LaurentMatrix> {
        let zero_tr = LaurentMatrix::zeros(self.rank, self.rows, other.cols);
        let zero_bl = LaurentMatrix::zeros(self.rank, other.rows, self.cols);
        LaurentMatrix::block2x2(self, &zero_tr, &zero_bl, other)
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn block2x2(
        a: &LaurentMatrix,
        b: &LaurentMatrix,
        c: &LaurentMatrix,
        d: &LaurentMatrix,
    ) -> Result<LaurentMatrix> {
        let rank = a.rank;
        if [b.rank, c.rank, d.rank].iter().any(|&r| r != rank)
            || a.rows != b.rows
            || c.rows != d.rows
            || a.cols != c.cols
            || b.cols != d.cols
        {
            return Err(Error::DimensionMismatch(format!(
                "incompatible blocks {}x{}, {}x{}, {}x{}, {}x{}",
                a.rows, a.cols, b.rows, b.cols, c.rows, c.cols, d.rows, d.cols
            )));
        }
        let mut out = LaurentMatrix::zeros(rank, a.rows + c.rows, a.cols + b.cols);
        for (blk, r0, c0) in [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)] {
            for (i, j, p) in blk.entries() {
                out.set(r0 + i, c0 + j, p.clone());
            }
        }
        Ok(out)
    }

    /// Complex symbol matrix at the angle vector `x`.
    pub fn eval(&self, x: &[f64]) -> Result<DMatrix<Complex64>> {
        if x.len() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "angle vector of length {} for rank {}",
                x.len(),
                self.rank
            )));
        }
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (i, j, p) in self.entries() {
            out[(i, j)] = p.eval(x)?;
        }
        Ok(out)
    }

    pub fn to_spec(&self) -> OperatorSpec {
        let entries = self
            .entries()
            .filter(|(_, _, p)| !p.is_zero())
            .map(|(row, col, p)| EntrySpec {
                row,
                col,
                terms: p
                    .terms()
                    .map(|(e, c)| TermSpec {
                        exp: e.to_vec(),
                        re: c.re,
                        im: c.im,
                    })
                    .collect(),
            })
            .collect();
        OperatorSpec {
            rank: self.rank,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// On-disk operator description.
///
/// ```json
/// { "rank": 1, "rows": 1, "cols": 1,
///   "entries": [ { "row": 0, "col": 0,
///                  "terms": [ { "exp": [1], "re": 1.0, "im": 0.0 },
///                             { "exp": [0], "re": -1.0, "im": 0.0 } ] } ] }
/// ```
///
/// Entries that are not listed are zero. Repeated `(row, col)` entries add.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub rank: usize,
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub entries: Vec<EntrySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exp: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl OperatorSpec {
    pub fn to_matrix(&self) -> Result<LaurentMatrix> {
        if self.rank == 0 {
            return Err(Error::InvalidArgument("rank must be positive".into()));
        }
        let mut m = LaurentMatrix::zeros(self.rank, self.rows, self.cols);
        for entry in &self.entries {
            if entry.row >= self.rows || entry.col >= self.cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({}, {}) outside a {}x{} operator",
                    entry.row, entry.col, self.rows, self.cols
                )));
            }
            let p = LaurentPolynomial::from_terms(
                self.rank,
                entry
                    .terms
                    .iter()
                    .map(|t| (t.exp.clone(), Complex64::new(t.re, t.im))),
            )?;
            let sum = m.get(entry.row, entry.col) + &p;
            m.set(entry.row, entry.col, sum);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = LaurentPolynomial::z_minus_one(1, 0);
        let q = &p - &p;
        assert!(q.is_zero());
        assert_eq!(q.num_terms(), 0);
    }

    #[test]
    fn binomial_square() {
        let p = LaurentPolynomial::z_minus_one(1, 0).pow(2);
        let expected =
            LaurentPolynomial::from_terms(1, [(vec![2], c(1.0)), (vec![1], c(-2.0)), (vec![0], c(1.0))])
                .unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn eval_matches_direct_formula() {
        let p = LaurentPolynomial::z_minus_one(1, 0);
        let v = p.eval(&[std::f64::consts::PI]).unwrap();
        assert!((v - c(-2.0)).norm() < 1e-15);
        assert!(p.eval(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn adjoint_is_conjugate_on_the_torus() {
        let p = LaurentPolynomial::from_terms(
            2,
            [(vec![1, -2], Complex64::new(0.5, 2.0)), (vec![0, 3], c(-1.0))],
        )
        .unwrap();
        let x = [0.3, -1.1];
        let lhs = p.adjoint().eval(&x).unwrap();
        let rhs = p.eval(&x).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn spec_round_trip() {
        let m = LaurentMatrix::from_rows(
            2,
            vec![vec![
                LaurentPolynomial::z_minus_one(2, 0),
                LaurentPolynomial::z_minus_one(2, 1),
            ]],
        )
        .unwrap();
        let json = serde_json::to_string(&m.to_spec()).unwrap();
        let back: OperatorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn spec_rejects_out_of_range_entries() {
        let spec: OperatorSpec = serde_json::from_str(
            r#"{"rank":1,"rows":1,"cols":1,"entries":[{"row":1,"col":0,"terms":[]}]}"#,
        )
        .unwrap();
        assert!(spec.to_matrix().is_err());
        let spec: OperatorSpec = serde_json::from_str(
            r#"{"rank":1,"rows":1,"cols":1,"entries":[{"row":0,"col":0,"terms":[{"exp":[1,2],"re":1}]}]}"#,
        )
        .unwrap();
        assert!(matches!(spec.to_matrix(), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn block_assembly_shapes() {
        let a = LaurentMatrix::identity(1, 2);
        let b = LaurentMatrix::zeros(1, 3, 1);
        let d = a.block_diag(&b).unwrap();
        assert_eq!((d.rows(), d.cols()), (5, 3));
        assert!(LaurentMatrix::block2x2(&a, &a, &b, &a).is_err());
    }
}
