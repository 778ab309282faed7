//! Tensorized orthonormal Legendre and Chebyshev polynomials on `(-1, 1)^d`.
//!
//! Both families are normalized against their orthogonality *probability*
//! measure: the uniform measure `dt/2` for Legendre and the arcsine measure
//! `dt / (π √(1 - t²))` for Chebyshev. Hence `φ_0 ≡ 1` in both cases.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_sets::{MultiIndex, MultiIndexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Legendre,
    Chebyshev,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Legendre => "legendre",
            BasisKind::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "legendre" => Ok(BasisKind::Legendre),
            "chebyshev" => Ok(BasisKind::Chebyshev),
            other => Err(Error::Parse(format!("unknown basis `{other}`"))),
        }
    }
}

/// A point of the cube `(-1, 1)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint(Vec<f64>);

impl SamplePoint {
    pub fn new(coordinates: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = coordinates.iter().find(|t| !(t.abs() <= 1.0)) {
            return Err(Error::OutOfDomain(bad));
        }
        Ok(Self(coordinates))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.0
    }
}

/// Sup-norm weights aligned with a [`MultiIndexSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn for_set(kind: BasisKind, set: &MultiIndexSet) -> Self {
        Self(set.iter().map(|j| weight(kind, j)).collect())
    }

    /// Unit weights, which turn the weighted decoders into their classical forms.
    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    /// Arbitrary positive weights.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Config("weights must be finite and positive".into()));
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

/// Degree-`degree` univariate orthonormal polynomial of `kind` at `t`.
pub fn eval_1d(kind: BasisKind, degree: usize, t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return Err(Error::OutOfDomain(t));
    }
    Ok(*univariate_table(kind, degree, t).last().unwrap())
}

/// Values `φ_0(t), …, φ_max_degree(t)` from a single recurrence sweep.
///
/// The caller is responsible for `|t| ≤ 1`.
pub fn univariate_table(kind: BasisKind, max_degree: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    if max_degree == 0 {
        return out;
    }
    match kind {
        BasisKind::Legendre => {
            // (n+1) P_{n+1} = (2n+1) t P_n - n P_{n-1},  φ_n = √(2n+1) P_n
            let (mut prev, mut curr) = (1.0, t);
            out.push(3f64.sqrt() * t);
            for n in 1..max_degree {
                let nf = n as f64;
                let next = ((2.0 * nf + 1.0) * t * curr - nf * prev) / (nf + 1.0);
                prev = curr;
                curr = next;
                out.push((2.0 * nf + 3.0).sqrt() * curr);
            }
        }
        BasisKind::Chebyshev => {
            // T_{n+1} = 2 t T_n - T_{n-1},  φ_n = √2 T_n for n ≥ 1
            let (mut prev, mut curr) = (1.0, t);
            out.push(SQRT_2 * t);
            for _ in 1..max_degree {
                let next = 2.0 * t * curr - prev;
                prev = curr;
                curr = next;
                out.push(SQRT_2 * curr);
            }
        }
    }
    out
}

/// `φ_j(t) = ∏_k φ_{j_k}(t_k)`.
pub fn eval_tensor(kind: BasisKind, j: &MultiIndex, t: &SamplePoint) -> Result<f64> {
    if j.dimension() != t.dimension() {
        return Err(Error::DimensionMismatch {
            expected: j.dimension(),
            found: t.dimension(),
        });
    }
    j.entries()
        .iter()
        .zip(t.coordinates())
        .try_fold(1.0, |acc, (&deg, &tk)| Ok(acc * eval_1d(kind, deg as usize, tk)?))
}

/// Closed-form `‖φ_j‖_{L∞(D)}`.
pub fn weight(kind: BasisKind, j: &MultiIndex) -> f64 {
    match kind {
        BasisKind::Legendre => j
            .entries()
            .iter()
            .map(|&e| (2.0 * f64::from(e) + 1.0).sqrt())
            .product(),
        BasisKind::Chebyshev => SQRT_2.powi(j.nonzero_count() as i32),
    }
}

/// `m` i.i.d. draws from the orthogonality measure of `kind` on `(-1, 1)^d`.
pub fn sample_measure(kind: BasisKind, d: usize, m: usize, rng_seed: u64) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_with(kind, d, m, &mut rng)
}

pub fn sample_with<R: Rng>(kind: BasisKind, d: usize, m: usize, rng: &mut R) -> Vec<SamplePoint> {
    (0..m)
        .map(|_| {
            let coords = (0..d)
                .map(|_| {
                    let u: f64 = rng.sample(Open01);
                    match kind {
                        BasisKind::Legendre => 2.0 * u - 1.0,
                        BasisKind::Chebyshev => (PI * u).cos(),
                    }
                })
                .collect();
            SamplePoint(coords)
        })
        .collect()
}

/// One point per row, `d` comma-separated columns, shortest round-trip formatting.
pub fn write_samples_csv<W: Write>(points: &[SamplePoint], mut out: W) -> Result<()> {
    for p in points {
        let row: Vec<String> = p.coordinates().iter().map(|t| format!("{t:?}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_samples_csv<R: BufRead>(input: R) -> Result<Vec<SamplePoint>> {
    let mut points = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let coords = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad coordinate `{tok}`", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(SamplePoint::new(coords)?);
    }
    Ok(points)
}
