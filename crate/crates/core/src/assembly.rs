//! Sensing-system assembly and column normalization.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::basis::{univariate_table, BasisKind, SamplePoint};
use crate::error::{Error, Result};
use crate::index_sets::MultiIndexSet;

/// A real-valued target `f : (-1, 1)^d → ℝ`.
#[derive(Clone)]
pub struct TargetFunction {
    evaluator: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    description: String,
}

impl TargetFunction {
    pub fn new<F>(description: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            evaluator: Arc::new(f),
            description: description.into(),
        }
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        (self.evaluator)(t)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("description", &self.description)
            .finish()
    }
}

/// `A x = y` with `A_ij = φ_j(t_i)/√m` and `y_i = f(t_i)/√m`.
///
/// After [`LinearSystem::normalize_columns`], `matrix` holds `Ã = A M⁻¹`
/// and `column_norms` the diagonal of `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
    column_norms: DVector<f64>,
    normalized: bool,
}

impl LinearSystem {
    /// Wraps an explicit matrix and right-hand side (unnormalized).
    pub fn from_parts(matrix: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        if matrix.nrows() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: rhs.len(),
            });
        }
        let n = matrix.ncols();
        Ok(Self {
            matrix,
            rhs,
            column_norms: DVector::from_element(n, 1.0),
            normalized: false,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn column_norms(&self) -> &DVector<f64> {
        &self.column_norms
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Replaces the right-hand side, keeping the matrix and its normalization.
    pub fn with_rhs(&self, rhs: DVector<f64>) -> Result<Self> {
        if rhs.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                found: rhs.len(),
            });
        }
        Ok(Self {
            rhs,
            ..self.clone()
        })
    }

    /// Divides every column by its ℓ2 norm (`Ã = A M⁻¹`).
    pub fn normalize_columns(mut self) -> Result<Self> {
        let mut norms = DVector::zeros(self.cols());
        for (j, mut col) in self.matrix.column_iter_mut().enumerate() {
            let norm = col.norm();
            if norm == 0.0 {
                return Err(Error::ZeroColumn(j));
            }
            col /= norm;
            norms[j] = norm * self.column_norms[j];
        }
        self.column_norms = norms;
        self.normalized = true;
        Ok(self)
    }

    /// Maps a solution of `Ã z = y` back to the original frame: `z_j = x̂_j / M_jj`,
    /// so that `A z = Ã x̂`.
    pub fn denormalize_solution(&self, x_hat: &DVector<f64>) -> Result<DVector<f64>> {
        if !self.normalized {
            return Err(Error::NotNormalized);
        }
        if x_hat.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                found: x_hat.len(),
            });
        }
        Ok(x_hat.component_div(&self.column_norms))
    }

    /// Row-major dump: each line holds one matrix row followed by the rhs entry.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.rows() {
            let mut row: Vec<String> = self.matrix.row(i).iter().map(|v| format!("{v:?}")).collect();
            row.push(format!("{:?}", self.rhs[i]));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Evaluates the whole basis at every point: row `i` holds `φ_j(t_i)` over `Λ`.
pub fn design_matrix(
    points: &[SamplePoint],
    kind: BasisKind,
    set: &MultiIndexSet,
) -> Result<DMatrix<f64>> {
    let d = set.dimension();
    let max_degree = set
        .iter()
        .flat_map(|j| j.entries().iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let mut out = DMatrix::zeros(points.len(), set.cardinality());
    for (i, p) in points.iter().enumerate() {
        if p.dimension() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dimension(),
            });
        }
        let tables: Vec<Vec<f64>> = p
            .coordinates()
            .iter()
            .map(|&t| univariate_table(kind, max_degree, t))
            .collect();
        for (col, j) in set.iter().enumerate() {
            out[(i, col)] = j
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(k, &e)| tables[k][e as usize])
                .product();
        }
    }
    Ok(out)
}

/// Assembles the scaled sensing system from samples of `f`.
pub fn build_system(
    points: &[SamplePoint],
    f: &TargetFunction,
    kind: BasisKind,
    set: &MultiIndexSet,
) -> Result<LinearSystem> {
    if points.is_empty() {
        return Err(Error::Config("at least one sample point is required".into()));
    }
    let scale = 1.0 / (points.len() as f64).sqrt();
    let mut matrix = design_matrix(points, kind, set)?;
    matrix *= scale;
    let rhs = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let value = f.eval(p.coordinates());
            if value.is_finite() {
                Ok(value * scale)
            } else {
                Err(Error::NonFiniteTarget { index: i, value })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LinearSystem::from_parts(matrix, DVector::from_vec(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{eval_tensor, sample_measure};
    use crate::index_sets::{hyperbolic_cross, MultiIndex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(m: usize, n: usize, seed: u64) -> LinearSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
        let y = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
        LinearSystem::from_parts(a, y).unwrap()
    }

    #[test]
    fn constant_column_has_unit_norm() {
        let set = MultiIndexSet::from_indices(3, vec![MultiIndex::zero(3)]).unwrap();
        let pts = sample_measure(BasisKind::Legendre, 3, 9, 1);
        let f = TargetFunction::new("one", |_| 1.0);
        let sys = build_system(&pts, &f, BasisKind::Legendre, &set).unwrap();
        assert_eq!(sys.cols(), 1);
        assert!(sys.matrix().iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        assert!((sys.matrix().column(0).norm() - 1.0).abs() < 1e-15);
        assert!(!sys.is_normalized());
        assert!(sys.column_norms().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn basis_element_target_is_a_column() {
        let set = hyperbolic_cross(4, 8).unwrap();
        let target = set.get(17).unwrap().clone();
        let kind = BasisKind::Chebyshev;
        let pts = sample_measure(kind, 4, 30, 2);
        let f = TargetFunction::new("phi", move |t| {
            eval_tensor(kind, &target, &SamplePoint::new(t.to_vec()).unwrap()).unwrap()
        });
        let sys = build_system(&pts, &f, kind, &set).unwrap();
        let diff = sys.matrix().column(17) - sys.rhs();
        assert!(diff.norm() <= 1e-12);
    }

    #[test]
    fn study_scale_shape() {
        let set = hyperbolic_cross(10, 10).unwrap();
        let pts = sample_measure(BasisKind::Legendre, 10, 80, 3);
        let f = TargetFunction::new("zero", |_| 0.0);
        let sys = build_system(&pts, &f, BasisKind::Legendre, &set).unwrap();
        assert_eq!((sys.rows(), sys.cols()), (80, 571));
    }

    #[test]
    fn errors_on_bad_input() {
        let set = hyperbolic_cross(2, 3).unwrap();
        let pts = sample_measure(BasisKind::Legendre, 3, 4, 3);
        let f = TargetFunction::new("zero", |_| 0.0);
        assert!(matches!(
            build_system(&pts, &f, BasisKind::Legendre, &set),
            Err(Error::DimensionMismatch { .. })
        ));
        let pts = sample_measure(BasisKind::Legendre, 2, 4, 3);
        let inf = TargetFunction::new("log0", |_| f64::ln(0.0));
        assert!(matches!(
            build_system(&pts, &inf, BasisKind::Legendre, &set),
            Err(Error::NonFiniteTarget { index: 0, .. })
        ));
    }

    #[test]
    fn normalization() {
        let sys = random_system(20, 40, 4).normalize_columns().unwrap();
        assert!(sys.is_normalized());
        for col in sys.matrix().column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
        let mut a = DMatrix::zeros(4, 1);
        a[(0, 0)] = 2.5;
        let single = LinearSystem::from_parts(a, DVector::zeros(4))
            .unwrap()
            .normalize_columns()
            .unwrap();
        assert_eq!(single.matrix()[(0, 0)], 1.0);
        assert_eq!(single.column_norms()[0], 2.5);
    }

    #[test]
    fn unit_columns_unchanged() {
        let a = DMatrix::<f64>::identity(5, 3);
        let sys = LinearSystem::from_parts(a.clone(), DVector::zeros(5))
            .unwrap()
            .normalize_columns()
            .unwrap();
        assert_eq!(sys.matrix(), &a);
        assert!(sys.column_norms().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn zero_column_rejected() {
        let mut a = DMatrix::from_element(3, 3, 1.0);
        a.column_mut(1).fill(0.0);
        let r = LinearSystem::from_parts(a, DVector::zeros(3)).unwrap().normalize_columns();
        assert!(matches!(r, Err(Error::ZeroColumn(1))));
    }

    #[test]
    fn denormalization() {
        let raw = random_system(20, 40, 5);
        let sys = raw.clone().normalize_columns().unwrap();
        assert!(matches!(
            raw.denormalize_solution(&DVector::zeros(40)),
            Err(Error::NotNormalized)
        ));
        assert_eq!(sys.denormalize_solution(&DVector::zeros(40)).unwrap(), DVector::zeros(40));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = DVector::from_fn(40, |_, _| rng.gen_range(-2.0..2.0));
        let z = sys.denormalize_solution(&x).unwrap();
        let lhs = raw.matrix() * &z;
        let rhs = sys.matrix() * &x;
        assert!((lhs - rhs).amax() < 1e-12);

        let unit = LinearSystem::from_parts(DMatrix::identity(4, 4), DVector::zeros(4))
            .unwrap()
            .normalize_columns()
            .unwrap();
        assert_eq!(unit.denormalize_solution(&x.rows(0, 4).into_owned()).unwrap(), x.rows(0, 4));
    }

    #[test]
    fn expected_squared_column_norm_is_one() {
        let set = hyperbolic_cross(3, 6).unwrap();
        let f = TargetFunction::new("zero", |_| 0.0);
        for kind in [BasisKind::Legendre, BasisKind::Chebyshev] {
            let draws = 400;
            let mut acc = vec![0.0; set.cardinality()];
            for seed in 0..draws {
                let pts = sample_measure(kind, 3, 25, 1000 + seed);
                let sys = build_system(&pts, &f, kind, &set).unwrap();
                for (j, col) in sys.matrix().column_iter().enumerate() {
                    acc[j] += col.norm_squared();
                }
            }
            for (j, a) in acc.iter().enumerate() {
                let mean = a / draws as f64;
                assert!((mean - 1.0).abs() < 0.05, "{kind} column {j}: {mean}");
            }
        }
    }

    #[test]
    fn csv_dump_shape() {
        let sys = random_system(3, 4, 8);
        let mut buf = Vec::new();
        sys.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let first: Vec<f64> = lines[0].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first.len(), 5);
        assert_eq!(first[1], sys.matrix()[(0, 1)]);
        assert_eq!(first[4], sys.rhs()[0]);
    }
}
