//! Small least-squares helpers shared by the exponent estimators.

use nalgebra::{DMatrix, DVector};

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
///
/// Returns `None` for fewer than two points or a degenerate abscissa.
pub fn line(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= f64::EPSILON * nf * mx.abs().max(1.0) {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Least-squares coefficients for `y ≈ Σ_j c_j·f_j(x)` given the design rows.
pub fn linear_model(design: &[Vec<f64>], ys: &[f64]) -> Option<Vec<f64>> {
    let rows = design.len();
    let cols = design.first()?.len();
    if rows < cols {
        return None;
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| design[i][j]);
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let sol = svd.solve(&b, 1e-12).ok()?;
    Some(sol.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (s, c) = line(&xs, &ys).unwrap();
        assert!((s - 2.5).abs() < 1e-12 && (c + 1.0).abs() < 1e-12);
        assert!(line(&[1.0], &[1.0]).is_none());
        assert!(line(&[1.0, 1.0], &[0.0, 2.0]).is_none());
    }

    #[test]
    fn three_parameter_model() {
        let ks: Vec<f64> = (10..40).map(f64::from).collect();
        let ys: Vec<f64> = ks.iter().map(|k| 0.3 - 1.5 * k.ln() + k * (-0.2)).collect();
        let design: Vec<Vec<f64>> = ks.iter().map(|k| vec![1.0, k.ln(), *k]).collect();
        let c = linear_model(&design, &ys).unwrap();
        assert!((c[0] - 0.3).abs() < 1e-8);
        assert!((c[1] + 1.5).abs() < 1e-8);
        assert!((c[2] + 0.2).abs() < 1e-9);
    }
}
