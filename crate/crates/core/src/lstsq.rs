//! Dense least squares via Householder QR, with an SVD fallback that returns
//! the minimum-norm minimizer when the columns are (numerically) dependent.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub coefficients: DVector<f64>,
    pub rank: usize,
}

/// Minimizes `‖matrix · x − rhs‖₂`.
///
/// `rel_tolerance` is relative to the largest diagonal entry of `R` (or the
/// largest singular value); directions below it are treated as null.
pub fn solve(matrix: &DMatrix<f64>, rhs: &DVector<f64>, rel_tolerance: f64) -> Result<LstsqSolution> {
    let (m, k) = matrix.shape();
    if rhs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: rhs.len(),
        });
    }
    if k == 0 {
        return Ok(LstsqSolution {
            coefficients: DVector::zeros(0),
            rank: 0,
        });
    }
    if k <= m {
        let qr = matrix.clone().qr();
        let r = qr.r();
        let diag_max = r.diagonal().amax();
        let diag_min = r.diagonal().iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        if diag_max > 0.0 && diag_min > rel_tolerance * diag_max {
            let mut qty = rhs.clone();
            qr.q_tr_mul(&mut qty);
            let top = qty.rows(0, k).into_owned();
            if let Some(x) = r.solve_upper_triangular(&top) {
                return Ok(LstsqSolution {
                    coefficients: x,
                    rank: k,
                });
            }
        }
    }
    min_norm(matrix, rhs, rel_tolerance)
}

/// Like [`solve`] but refuses rank-deficient systems.
pub fn solve_full_rank(
    matrix: &DMatrix<f64>,
    rhs: &DVector<f64>,
    rel_tolerance: f64,
) -> Result<DVector<f64>> {
    let sol = solve(matrix, rhs, rel_tolerance)?;
    if sol.rank < matrix.ncols() {
        return Err(Error::RankDeficient {
            rank: sol.rank,
            cols: matrix.ncols(),
        });
    }
    Ok(sol.coefficients)
}

fn min_norm(matrix: &DMatrix<f64>, rhs: &DVector<f64>, rel_tolerance: f64) -> Result<LstsqSolution> {
    let svd = matrix.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let cutoff = rel_tolerance * sigma_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let x = svd
        .solve(rhs, cutoff)
        .map_err(|e| Error::Parse(format!("svd solve failed: {e}")))?;
    Ok(LstsqSolution {
        coefficients: x,
        rank,
    })
}
