//! Restriction from `ℤ` to the finite-index subgroup `dℤ`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentPolynomial};

type Terms = Vec<(Vec<i64>, Complex64)>;

/// Rewrites each entry of a rank-one matrix as a `d × d` block over
/// `w = z^d`, using the basis `1, z, …, z^{d−1}`.
///
/// Column `j` of the block for `f` holds the coordinates of `f·z^j`; an
/// exponent `e + j = q·d + r` lands in row `r` as `w^q`.
pub fn finite_index_restriction(m: &LaurentMatrix, d: usize) -> Result<LaurentMatrix> {
    if m.rank() != 1 {
        return Err(Error::Unsupported(format!(
            "restriction is implemented for rank 1 only, got rank {}",
            m.rank()
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("index must be positive".into()));
    }
    if d == 1 {
        return Ok(m.clone());
    }
    let di = d as i64;
    let mut out = LaurentMatrix::zeros(1, m.rows() * d, m.cols() * d);
    for (i, k, f) in m.entries() {
        if f.is_zero() {
            continue;
        }
        let mut block: Vec<Vec<Terms>> = vec![vec![Vec::new(); d]; d];
        for (e, c) in f.terms() {
            for (j, col) in (0..di).zip(0..d) {
                let t = e[0] + j;
                let (q, r) = (t.div_euclid(di), t.rem_euclid(di) as usize);
                block[r][col].push((vec![q], c));
            }
        }
        for (r, row) in block.into_iter().enumerate() {
            for (col, terms) in row.into_iter().enumerate() {
                out.set(i * d + r, k * d + col, LaurentPolynomial::from_terms(1, terms)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::density::{singular_values_at, spectral_density, vn_dimension};
    use crate::symbol::exponent::ns_exponent;
    use crate::symbol::quadrature::Quadrature;
    use crate::symbol::density::default_grid;

    fn zm1() -> LaurentMatrix {
        LaurentMatrix::scalar(LaurentPolynomial::z_minus_one(1, 0))
    }

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn examples() {
        assert_eq!(finite_index_restriction(&zm1(), 1).unwrap(), zm1());
        let w = LaurentPolynomial::variable(1, 0);
        let expected = LaurentMatrix::from_rows(
            1,
            vec![
                vec![LaurentPolynomial::constant(1, c(-1.0)), w.clone()],
                vec![LaurentPolynomial::one(1), LaurentPolynomial::constant(1, c(-1.0))],
            ],
        )
        .unwrap();
        assert_eq!(finite_index_restriction(&zm1(), 2).unwrap(), expected);
        let z = LaurentMatrix::scalar(w.clone());
        let companion = LaurentMatrix::from_rows(
            1,
            vec![
                vec![LaurentPolynomial::zero(1), w],
                vec![LaurentPolynomial::one(1), LaurentPolynomial::zero(1)],
            ],
        )
        .unwrap();
        assert_eq!(finite_index_restriction(&z, 2).unwrap(), companion);
        let two = LaurentMatrix::scalar(LaurentPolynomial::z_minus_one(2, 0));
        assert!(matches!(
            finite_index_restriction(&two, 2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn singular_values_are_the_lifted_ones() {
        let r = finite_index_restriction(&zm1(), 2).unwrap();
        for theta in [0.1, 0.7, 2.0, 3.3] {
            let s = singular_values_at(&r, &[2.0 * theta]).unwrap();
            let mut e = [
                2.0 * (theta / 2.0).sin().abs(),
                2.0 * ((theta + std::f64::consts::PI) / 2.0).sin().abs(),
            ];
            e.sort_by(f64::total_cmp);
            assert!((s[0] - e[0]).abs() < 1e-12 && (s[1] - e[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_exponents_wrap() {
        // z^{-1} over w = z^3: z^{-1}·z^j = z^{j-1}
        let inv = LaurentMatrix::scalar(LaurentPolynomial::monomial(1, vec![-1], c(1.0)));
        let r = finite_index_restriction(&inv, 3).unwrap();
        let wi = LaurentPolynomial::monomial(1, vec![-1], c(1.0));
        assert_eq!(r.get(2, 0), &wi);
        assert_eq!(r.get(0, 1), &LaurentPolynomial::one(1));
        assert_eq!(r.get(1, 2), &LaurentPolynomial::one(1));
    }

    #[test]
    fn restriction_keeps_exponent_and_scales_dimension() {
        let q = Quadrature::default_for_rank(1);
        for n in [1u32, 2] {
            let m = LaurentMatrix::scalar(LaurentPolynomial::z_minus_one(1, 0).pow(n));
            let base = ns_exponent(&spectral_density(&m, &default_grid(), &q).unwrap())
                .unwrap()
                .finite_part()
                .unwrap();
            for d in 1..=3 {
                let r = finite_index_restriction(&m, d).unwrap();
                let a = ns_exponent(&spectral_density(&r, &default_grid(), &q).unwrap())
                    .unwrap()
                    .finite_part()
                    .unwrap();
                assert!((a - base).abs() < 0.05, "n={n} d={d}: {a} vs {base}");
            }
        }
        let zero = LaurentMatrix::zeros(1, 1, 1);
        for d in 1..=3 {
            let r = finite_index_restriction(&zero, d).unwrap();
            assert_eq!(vn_dimension(&r, &q).unwrap(), d as f64);
        }
    }
}
