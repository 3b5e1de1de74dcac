//! Sample containers and the estimate-and-whiten standardization.
//!
//! A [`DataMatrix`] is a dense row-major `n x d` table of finite reals. The
//! empirical distribution of a sample is never materialized; every routine
//! counts over rows directly.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major table of observations (rows) in `d` dimensions (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<RawMatrix> for DataMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let m = DataMatrix::new(raw.n, raw.d, raw.values)?;
        match raw.labels {
            Some(labels) => m.with_labels(labels),
            None => Ok(m),
        }
    }
}

impl From<DataMatrix> for RawMatrix {
    fn from(m: DataMatrix) -> Self {
        RawMatrix {
            n: m.n,
            d: m.d,
            values: m.values,
            labels: m.labels,
        }
    }
}

impl DataMatrix {
    /// Builds a matrix from row-major values, rejecting empty shapes and
    /// non-finite entries.
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Shape(format!(
                "a data matrix needs at least one row and one column (got {n}x{d})"
            )));
        }
        if values.len() != n * d {
            return Err(Error::Shape(format!(
                "expected {} values for a {n}x{d} matrix, got {}",
                n * d,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        Ok(DataMatrix {
            n,
            d,
            values,
            labels: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::Shape(format!(
                    "row {i} has {} columns, expected {d}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        DataMatrix::new(rows.len(), d, values)
    }

    /// Attaches column labels (e.g. a CSV header).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.d {
            return Err(Error::Shape(format!(
                "{} labels supplied for {} columns",
                labels.len(),
                self.d
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Row-major backing storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Panics if `i >= nrows()`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.d)
    }

    /// Stacks `other` below `self`; labels of `self` are kept.
    pub fn vstack(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if self.d != other.d {
            return Err(Error::Shape(format!(
                "cannot stack {}-column and {}-column matrices",
                self.d, other.d
            )));
        }
        let mut values = Vec::with_capacity(self.values.len() + other.values.len());
        values.extend_from_slice(&self.values);
        values.extend_from_slice(&other.values);
        Ok(DataMatrix {
            n: self.n + other.n,
            d: self.d,
            values,
            labels: self.labels.clone(),
        })
    }

    /// Gathers the given rows (repetition allowed). `indices` must be non-empty
    /// and in range.
    pub fn select_rows(&self, indices: &[usize]) -> Result<DataMatrix> {
        if indices.is_empty() {
            return Err(Error::Shape("row selection is empty".into()));
        }
        let mut values = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            if i >= self.n {
                return Err(Error::Shape(format!(
                    "row index {i} out of range for {} rows",
                    self.n
                )));
            }
            values.extend_from_slice(self.row(i));
        }
        Ok(DataMatrix {
            n: indices.len(),
            d: self.d,
            values,
            labels: self.labels.clone(),
        })
    }

    pub(crate) fn from_parts_unchecked(n: usize, d: usize, values: Vec<f64>) -> DataMatrix {
        debug_assert_eq!(values.len(), n * d);
        DataMatrix {
            n,
            d,
            values,
            labels: None,
        }
    }
}

/// Mean vector and covariance estimated from a sample, together with the
/// whitening matrix `W` satisfying `W * covariance * W^T = I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub mean: Vec<f64>,
    /// Row-major `d x d`.
    pub covariance: Vec<f64>,
    /// Row-major `d x d`; inverse of the lower Cholesky factor of `covariance`.
    pub whitener: Vec<f64>,
}

impl StandardizationParams {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Applies `W (x - mean)` to every row of `x`.
    pub fn apply(&self, x: &DataMatrix) -> Result<DataMatrix> {
        let d = self.dim();
        if x.ncols() != d {
            return Err(Error::Shape(format!(
                "standardization fitted in dimension {d}, data has {} columns",
                x.ncols()
            )));
        }
        let mut out = Vec::with_capacity(x.nrows() * d);
        let mut centered = vec![0.0; d];
        for row in x.rows() {
            for (c, (v, m)) in centered.iter_mut().zip(row.iter().zip(&self.mean)) {
                *c = v - m;
            }
            for i in 0..d {
                let w = &self.whitener[i * d..(i + 1) * d];
                // W is lower triangular.
                out.push((0..=i).map(|j| w[j] * centered[j]).sum());
            }
        }
        Ok(DataMatrix::from_parts_unchecked(x.nrows(), d, out))
    }
}

pub fn column_mean(x: &DataMatrix) -> Vec<f64> {
    let mut mean = vec![0.0; x.ncols()];
    for row in x.rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    let n = x.nrows() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Unbiased (divisor `n - 1`) covariance, row-major `d x d`. The result is
/// exactly symmetric: the upper triangle is computed and mirrored.
pub fn sample_covariance(x: &DataMatrix) -> Result<Vec<f64>> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "sample covariance needs at least 2 rows, got {n}"
        )));
    }
    let d = x.ncols();
    let mean = column_mean(x);
    let mut cov = vec![0.0; d * d];
    for row in x.rows() {
        for i in 0..d {
            let ci = row[i] - mean[i];
            for j in i..d {
                cov[i * d + j] += ci * (row[j] - mean[j]);
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    Ok(cov)
}

/// Lower Cholesky factor of a row-major SPD matrix, or the smallest
/// eigenvalue when the matrix is not (numerically) positive definite.
pub(crate) fn cholesky_lower(matrix: &[f64], d: usize) -> Result<DMatrix<f64>> {
    let m = DMatrix::from_row_slice(d, d, matrix);
    let smallest_eigenvalue = || {
        SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    let Some(chol) = m.clone().cholesky() else {
        return Err(Error::NonInvertibleScatter {
            smallest_eigenvalue: smallest_eigenvalue(),
        });
    };
    let l = chol.l();
    // Reject numerically rank-deficient matrices that slip through the
    // factorization with a rounding-sized pivot.
    let scale = (0..d).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
    let min_pivot = (0..d)
        .map(|i| l[(i, i)] * l[(i, i)])
        .fold(f64::INFINITY, f64::min);
    if min_pivot.is_nan() || min_pivot <= 1e-13 * scale {
        return Err(Error::NonInvertibleScatter {
            smallest_eigenvalue: smallest_eigenvalue(),
        });
    }
    Ok(l)
}

/// Centers and whitens `x` with its own sample mean and covariance.
///
/// The output has sample mean zero and sample covariance `I` (to rounding).
pub fn standardize(x: &DataMatrix) -> Result<(DataMatrix, StandardizationParams)> {
    let d = x.ncols();
    let mean = column_mean(x);
    let covariance = sample_covariance(x)?;
    let l = cholesky_lower(&covariance, d)?;
    let w =
        l.solve_lower_triangular(&DMatrix::identity(d, d))
            .ok_or(Error::NonInvertibleScatter {
                smallest_eigenvalue: 0.0,
            })?;
    let mut whitener = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            whitener[i * d + j] = w[(i, j)];
        }
    }
    let params = StandardizationParams {
        mean,
        covariance,
        whitener,
    };
    let out = params.apply(x)?;
    Ok((out, params))
}
