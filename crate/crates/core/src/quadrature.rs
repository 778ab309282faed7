//! Gauss rules for the two orthogonality measures, normalized to unit mass.
//!
//! Used by the orthonormality checks; the Legendre rule comes from the
//! eigen-decomposition of the Jacobi matrix and never touches the
//! polynomial recurrences in [`crate::basis`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

/// `n`-point Gauss–Legendre rule for `dt/2` on `[-1, 1]`, as `(node, weight)` pairs.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        jacobi[(k - 1, k)] = beta;
        jacobi[(k, k - 1)] = beta;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// `n`-point Gauss–Chebyshev rule for the arcsine probability measure.
pub fn gauss_chebyshev(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let w = 1.0 / n as f64;
    (1..=n)
        .map(|i| (((2 * i - 1) as f64 * PI / (2 * n) as f64).cos(), w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_monomials() {
        let rule = gauss_legendre(10);
        for p in 0..20 {
            let q: f64 = rule.iter().map(|&(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 1.0 / (p as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn chebyshev_rule_moments() {
        // ∫ t² dν = 1/2 and ∫ t⁴ dν = 3/8 under the arcsine law
        let rule = gauss_chebyshev(8);
        let m2: f64 = rule.iter().map(|&(x, w)| w * x * x).sum();
        let m4: f64 = rule.iter().map(|&(x, w)| w * x.powi(4)).sum();
        assert!((m2 - 0.5).abs() < 1e-14);
        assert!((m4 - 0.375).abs() < 1e-14);
    }
}
