//! Polynomial extrapolation of sampled values to the origin.

use num_complex::Complex64;

/// Neville's scheme: value at `h = 0` of the interpolating polynomial
/// through `(h_k, y_k)`. Requires distinct abscissae.
pub fn neville_at_zero(abscissae: &[f64], values: &[Complex64]) -> Complex64 {
    assert_eq!(abscissae.len(), values.len(), "length mismatch");
    assert!(!values.is_empty(), "no samples");
    let mut p = values.to_vec();
    let n = p.len();
    for level in 1..n {
        for k in 0..n - level {
            let (h0, h1) = (abscissae[k], abscissae[k + level]);
            p[k] = (h1 * p[k] - h0 * p[k + 1]) / (h1 - h0);
        }
    }
    p[0]
}

/// Fit of `y ≈ c0 + c1·h` through the samples by least squares, with the
/// largest absolute residual.
pub fn linear_fit(abscissae: &[f64], values: &[Complex64]) -> (Complex64, Complex64, f64) {
    let n = abscissae.len() as f64;
    let mean_h = abscissae.iter().sum::<f64>() / n;
    let mean_y = values.iter().sum::<Complex64>() / n;
    let sxx: f64 = abscissae.iter().map(|h| (h - mean_h).powi(2)).sum();
    let sxy: Complex64 = abscissae
        .iter()
        .zip(values)
        .map(|(h, y)| (h - mean_h) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_h;
    let residual = abscissae
        .iter()
        .zip(values)
        .map(|(h, y)| (y - intercept - slope * h).norm())
        .fold(0.0, f64::max);
    (intercept, slope, residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_reproduced() {
        let f = |h: f64| Complex64::new(2.0 - 3.0 * h + 5.0 * h * h, h);
        let hs = [0.01, 0.005, 0.0025];
        let ys: Vec<_> = hs.iter().map(|&h| f(h)).collect();
        assert!((neville_at_zero(&hs, &ys) - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn linear_fit_exact_line() {
        let hs = [0.02, 0.01, 0.005];
        let ys: Vec<_> = hs.iter().map(|&h| Complex64::new(-1.5 + 0.4 * h, 0.1 * h)).collect();
        let (c0, c1, r) = linear_fit(&hs, &ys);
        assert!((c0 - Complex64::new(-1.5, 0.0)).norm() < 1e-14);
        assert!((c1 - Complex64::new(0.4, 0.1)).norm() < 1e-12);
        assert!(r < 1e-14);
    }
}
