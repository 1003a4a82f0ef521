//! Ordinary least squares on log-transformed data, for extracting
//! scaling exponents y ∝ x^a from sweep results.

use crate::{Error, Result};

/// Result of a log-log linear regression ln y = a ln x + b.
#[derive(Debug, Clone)]
pub struct RegressionResult {
    pub slope_a: f64,
    pub intercept_b: f64,
    /// Standard deviation of the slope estimate.
    pub sigma_a: f64,
    /// Standard deviation of the intercept estimate.
    pub sigma_b: f64,
    /// Pearson correlation coefficient of (ln x, ln y).
    pub corr_r: f64,
    pub n_points: usize,
}

/// Fit ln y = a ln x + b by ordinary least squares and report the
/// parameter standard deviations and the correlation coefficient.
pub fn scaling_regression(xs: &[f64], ys: &[f64]) -> Result<RegressionResult> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "regression input lengths differ: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "regression needs at least 3 points, got {n}"
        )));
    }
    if xs.iter().chain(ys.iter()).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter(
            "regression data must be strictly positive for the log transform".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let nf = n as f64;
    let mx = lx.iter().sum::<f64>() / nf;
    let my = ly.iter().sum::<f64>() / nf;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    let syy: f64 = ly.iter().map(|v| (v - my) * (v - my)).sum();
    let sxy: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(&x, &y)| (x - mx) * (y - my))
        .sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "regression abscissae are all equal".into(),
        ));
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(&x, &y)| {
            let r = y - (a * x + b);
            r * r
        })
        .sum();
    let s2 = sse / (nf - 2.0);
    let sigma_a = (s2 / sxx).sqrt();
    let sigma_b = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    let corr_r = if syy == 0.0 {
        1.0
    } else {
        sxy / (sxx * syy).sqrt()
    };
    Ok(RegressionResult {
        slope_a: a,
        intercept_b: b,
        sigma_a,
        sigma_b,
        corr_r,
        n_points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs: Vec<f64> = (1..=8).map(|j| 0.25 * j as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x * x).collect();
        let r = scaling_regression(&xs, &ys).unwrap();
        assert!((r.slope_a - 2.0).abs() < 1e-12);
        assert!((r.intercept_b - 3.0_f64.ln()).abs() < 1e-12);
        assert!((r.corr_r - 1.0).abs() < 1e-12);
        assert!(r.sigma_a < 1e-12 && r.sigma_b < 1e-12);
        assert_eq!(r.n_points, 8);
    }

    #[test]
    fn noisy_power_law_within_three_sigma() {
        // Deterministic multiplicative perturbation.
        let xs: Vec<f64> = (1..=10).map(|j| 0.1 * j as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(j, &x)| x.powf(1.5) * (1.0 + 0.01 * ((j as f64 * 2.7).sin())))
            .collect();
        let r = scaling_regression(&xs, &ys).unwrap();
        assert!((r.slope_a - 1.5).abs() < 3.0 * r.sigma_a + 0.02);
        assert!(r.corr_r > 0.999);
    }

    #[test]
    fn subset_slopes_agree_within_three_sigma() {
        let xs: Vec<f64> = (1..=12).map(|j| 0.05 * j as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(j, &x)| 2.0 * x.powf(0.8) * (1.0 + 0.005 * ((j as f64).cos())))
            .collect();
        let even: (Vec<f64>, Vec<f64>) = xs
            .iter()
            .zip(&ys)
            .enumerate()
            .filter(|(j, _)| j % 2 == 0)
            .map(|(_, (&x, &y))| (x, y))
            .unzip();
        let odd: (Vec<f64>, Vec<f64>) = xs
            .iter()
            .zip(&ys)
            .enumerate()
            .filter(|(j, _)| j % 2 == 1)
            .map(|(_, (&x, &y))| (x, y))
            .unzip();
        let ra = scaling_regression(&even.0, &even.1).unwrap();
        let rb = scaling_regression(&odd.0, &odd.1).unwrap();
        let tol = 3.0 * (ra.sigma_a + rb.sigma_a);
        assert!((ra.slope_a - rb.slope_a).abs() <= tol);
    }

    proptest::proptest! {
        #[test]
        fn recovers_exact_power_laws(a in -3.0..3.0f64, c in 0.1..10.0f64) {
            let xs: Vec<f64> = (1..=6).map(|j| 0.5 * j as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|&x| c * x.powf(a)).collect();
            let r = scaling_regression(&xs, &ys).unwrap();
            proptest::prop_assert!((r.slope_a - a).abs() < 1e-8);
            proptest::prop_assert!((r.intercept_b - c.ln()).abs() < 1e-8);
            proptest::prop_assert!(r.sigma_a < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(scaling_regression(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(scaling_regression(&[1.0, 2.0, -3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(scaling_regression(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]).is_err());
        assert!(scaling_regression(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
        assert!(scaling_regression(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
