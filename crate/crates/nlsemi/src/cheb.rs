//! Chebyshev–Gauss–Lobatto collocation utilities: nodes, differentiation
//! matrices on affine segments in the complex plane, coefficient
//! transforms, barycentric interpolation and coefficient-space
//! integration.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Chebyshev–Gauss–Lobatto nodes y_j = cos(πj/N), j = 0..N (descending
/// from +1 to −1).
pub fn lobatto_nodes(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect()
}

/// First-derivative collocation matrix on the reference interval [−1,1]
/// for the Lobatto nodes (Trefethen's construction with negative-sum
/// diagonal for roundoff robustness).
pub fn diff_matrix(n: usize) -> DMatrix<f64> {
    let x = lobatto_nodes(n);
    let c = |j: usize| -> f64 {
        let base = if j == 0 || j == n { 2.0 } else { 1.0 };
        base * if j % 2 == 0 { 1.0 } else { -1.0 }
    };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let row_sum: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -row_sum;
    }
    d
}

/// An affine Chebyshev segment in the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSegment {
    pub endpoint_a: Complex64,
    pub endpoint_b: Complex64,
    /// Polynomial degree: the segment carries n_coll+1 nodes.
    pub n_coll: usize,
}

impl ChebSegment {
    pub fn new(endpoint_a: Complex64, endpoint_b: Complex64, n_coll: usize) -> Result<Self> {
        if endpoint_a == endpoint_b {
            return Err(Error::InvalidParameter(
                "segment endpoints must differ".into(),
            ));
        }
        if n_coll < 8 {
            return Err(Error::InvalidParameter(format!(
                "n_coll must be ≥ 8, got {n_coll}"
            )));
        }
        Ok(ChebSegment { endpoint_a, endpoint_b, n_coll })
    }

    /// Real segment [a, b] on the real axis.
    pub fn real(a: f64, b: f64, n_coll: usize) -> Result<Self> {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0), n_coll)
    }
}

/// Nodes mapped onto the segment (node 0 = endpoint_b, node N =
/// endpoint_a) and the matching first-derivative operator d/dξ.
pub fn cheb_operator(segment: &ChebSegment) -> (Vec<Complex64>, DMatrix<Complex64>) {
    let n = segment.n_coll;
    let y = lobatto_nodes(n);
    let mid = 0.5 * (segment.endpoint_a + segment.endpoint_b);
    let half = 0.5 * (segment.endpoint_b - segment.endpoint_a);
    let nodes: Vec<Complex64> = y.iter().map(|&t| mid + half * t).collect();
    let scale = 1.0 / half;
    let d = diff_matrix(n).map(|v| scale * v);
    (nodes, d)
}

/// Chebyshev expansion coefficients a_k (k = 0..N) of the values at the
/// Lobatto nodes, so f(y) = Σ a_k T_k(y).
pub fn cheb_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len() - 1;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    // Direct DCT-I; O(N²) but only used for diagnostics and integration.
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut s = 0.5 * (values[0] * 1.0 + values[n] * if k % 2 == 0 { 1.0 } else { -1.0 });
        for (j, &vj) in values.iter().enumerate().take(n).skip(1) {
            s += vj * (std::f64::consts::PI * (j * k) as f64 / n as f64).cos();
        }
        let norm = if k == 0 || k == n { 1.0 } else { 2.0 };
        *ck = s * (norm / n as f64);
    }
    coeffs
}

/// Largest modulus among the trailing `tail` Chebyshev coefficients.
pub fn tail_coefficient(values: &[Complex64], tail: usize) -> f64 {
    let coeffs = cheb_coefficients(values);
    let start = coeffs.len().saturating_sub(tail);
    coeffs[start..].iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Coefficients of the antiderivative: if f = Σ a_k T_k then
/// ∫f = Σ b_k T_k (b_0 free, set so the antiderivative vanishes at the
/// first node y = +1).
pub fn integrate_coefficients(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
    let get = |k: usize| -> Complex64 {
        if k <= n {
            a[k]
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    for k in 1..=n {
        let upper = if k == 1 { 2.0 * get(0) } else { get(k - 1) };
        b[k] = (upper - get(k + 1)) / (2.0 * k as f64);
    }
    // Fix the constant so the antiderivative is zero at y = 1 (T_k(1)=1).
    let sum: Complex64 = b[1..].iter().sum();
    b[0] = -sum;
    b
}

/// Evaluate a Chebyshev series Σ a_k T_k(y) by Clenshaw recurrence.
pub fn eval_cheb_series(a: &[Complex64], y: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &ak in a.iter().rev() {
        let b0 = 2.0 * y * b1 - b2 + ak;
        b2 = b1;
        b1 = b0;
    }
    // Clenshaw for T_k: f = b0 − y·b1' ... using the standard correction:
    b1 - y * b2
}

/// Barycentric interpolation of Lobatto-node values to an arbitrary
/// point y ∈ [−1,1].
pub fn barycentric_eval(values: &[Complex64], y: f64) -> Complex64 {
    let n = values.len() - 1;
    let nodes = lobatto_nodes(n);
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for j in 0..=n {
        let dy = y - nodes[j];
        if dy.abs() < 1e-15 {
            return values[j];
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n {
            w *= 0.5;
        }
        let t = w / dy;
        num += values[j] * t;
        den += t;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn nodes_span_interval() {
        let x = lobatto_nodes(16);
        assert_eq!(x.len(), 17);
        assert!((x[0] - 1.0).abs() < 1e-15);
        assert!((x[16] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_exact_on_polynomials() {
        let n = 12;
        let d = diff_matrix(n);
        let x = lobatto_nodes(n);
        // p(y) = y⁵ − 2y³ + y, p' = 5y⁴ − 6y² + 1.
        let p: Vec<f64> = x.iter().map(|&t| t.powi(5) - 2.0 * t.powi(3) + t).collect();
        for i in 0..=n {
            let dp: f64 = (0..=n).map(|j| d[(i, j)] * p[j]).sum();
            let exact = 5.0 * x[i].powi(4) - 6.0 * x[i] * x[i] + 1.0;
            assert!((dp - exact).abs() < 1e-12, "node {i}: {dp} vs {exact}");
        }
    }

    #[test]
    fn derivative_of_exp() {
        let n = 32;
        let seg = ChebSegment::real(-1.0, 1.0, n).unwrap();
        let (nodes, d) = cheb_operator(&seg);
        let f: Vec<Complex64> = nodes.iter().map(|z| z.exp()).collect();
        for i in 0..=n {
            let df: Complex64 = (0..=n).map(|j| d[(i, j)] * f[j]).sum();
            assert!((df - nodes[i].exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn segment_endpoints_mapped() {
        let a = Complex64::new(2.0, -1.0);
        let b = Complex64::new(-3.0, 4.0);
        let seg = ChebSegment::new(a, b, 16).unwrap();
        let (nodes, _) = cheb_operator(&seg);
        assert!((nodes[0] - b).norm() < 1e-14);
        assert!((nodes[16] - a).norm() < 1e-14);
    }

    #[test]
    fn segment_validation() {
        assert!(ChebSegment::real(1.0, 1.0, 16).is_err());
        assert!(ChebSegment::real(0.0, 1.0, 4).is_err());
    }

    #[test]
    fn coefficients_recover_polynomial() {
        // f = T_0 + 0.5 T_3 sampled at nodes: coefficients should match.
        let n = 8;
        let x = lobatto_nodes(n);
        let vals: Vec<Complex64> = x
            .iter()
            .map(|&t| c(1.0 + 0.5 * (4.0 * t * t * t - 3.0 * t)))
            .collect();
        let a = cheb_coefficients(&vals);
        assert!((a[0] - c(1.0)).norm() < 1e-13);
        assert!((a[3] - c(0.5)).norm() < 1e-13);
        for (k, ak) in a.iter().enumerate() {
            if k != 0 && k != 3 {
                assert!(ak.norm() < 1e-13, "stray coefficient {k}");
            }
        }
    }

    #[test]
    fn series_evaluation_round_trip() {
        let n = 24;
        let x = lobatto_nodes(n);
        let vals: Vec<Complex64> = x.iter().map(|&t| c((2.0 * t).sin())).collect();
        let a = cheb_coefficients(&vals);
        for (&xi, v) in x.iter().zip(&vals) {
            let s = eval_cheb_series(&a, xi);
            assert!((s - v).norm() < 1e-12);
        }
    }

    #[test]
    fn integration_matches_analytic() {
        // ∫ from y=1 of sin(2y): antiderivative −cos(2y)/2 + cos(2)/2.
        let n = 32;
        let x = lobatto_nodes(n);
        let vals: Vec<Complex64> = x.iter().map(|&t| c((2.0 * t).sin())).collect();
        let a = cheb_coefficients(&vals);
        let b = integrate_coefficients(&a);
        for &xi in &x {
            let got = eval_cheb_series(&b, xi);
            let exact = -(2.0 * xi).cos() / 2.0 + (2.0_f64).cos() / 2.0;
            assert!((got - c(exact)).norm() < 1e-13);
        }
    }

    #[test]
    fn barycentric_matches_function() {
        // Poles at ±i/2 give geometric convergence with ratio
        // ρ = (1+√5)/2; n = 96 puts the interpolation error below 1e-13.
        let n = 96;
        let x = lobatto_nodes(n);
        let vals: Vec<Complex64> = x.iter().map(|&t| c(1.0 / (1.0 + 4.0 * t * t))).collect();
        for &y in &[0.123, -0.77, 0.999, 0.0] {
            let got = barycentric_eval(&vals, y);
            let exact = 1.0 / (1.0 + 4.0 * y * y);
            assert!((got - c(exact)).norm() < 1e-10, "y={y}");
        }
    }

    #[test]
    fn tail_coefficient_small_for_smooth() {
        let n = 64;
        let x = lobatto_nodes(n);
        let vals: Vec<Complex64> = x.iter().map(|&t| c(t.exp())).collect();
        assert!(tail_coefficient(&vals, 10) < 1e-14);
    }
}
