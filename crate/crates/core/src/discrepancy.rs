//! Data-depth discrepancy `DDD(x) = D_A(x) - D_B(x)` and plot records.
//!
//! A record carries the two depths at one evaluation point, their difference
//! and a pointwise band. The default band is two standard deviations of a
//! binomial proportion, `2 sqrt(D (1 - D) / n_eff)`. A bootstrap band (the
//! pointwise standard deviation of the resampled discrepancy, doubled) can be
//! requested instead.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::depth::{DepthFunction, DepthMethod, DepthPlan, DepthValue};
use crate::distributions::{sample, ReferenceDistribution};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// One evaluation point of a discrepancy plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DddRecord {
    pub index: usize,
    pub point: Vec<f64>,
    pub depth_a: DepthValue,
    pub depth_b: DepthValue,
    pub ddd: f64,
    pub band_halfwidth: f64,
    pub outside: bool,
}

impl DddRecord {
    fn new(
        index: usize,
        point: &[f64],
        depth_a: DepthValue,
        depth_b: DepthValue,
        band: f64,
    ) -> Self {
        let ddd = depth_a.value() - depth_b.value();
        DddRecord {
            index,
            point: point.to_vec(),
            depth_a,
            depth_b,
            ddd,
            band_halfwidth: band,
            outside: ddd.abs() > band,
        }
    }
}

/// Which pointwise band to attach to the records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    #[default]
    TwoSigma,
    Bootstrap {
        replicates: usize,
    },
}

/// Reference sample size used when the caller gives none: `max(10 n, 5000)`.
pub fn default_reference_size(n: usize) -> usize {
    (10 * n).max(5000)
}

/// Half-width `2 sqrt(D (1 - D) / n)`, or `2 sqrt(D (1 - D) (1/n + 1/m))` when
/// a second sample size is given. `D` is clamped to `[0, 1]`.
pub fn two_sigma_band(depth_ref: f64, n: usize, m: Option<usize>) -> f64 {
    let d = depth_ref.clamp(0.0, 1.0);
    let scale = match m {
        None => 1.0 / n as f64,
        Some(m) => 1.0 / n as f64 + 1.0 / m as f64,
    };
    2.0 * (d * (1.0 - d) * scale).sqrt()
}

/// Discrepancy between the depth in `x` and the depth under `f0` at every row
/// of `x`. The `f0` depth is the depth in one Monte Carlo sample of size
/// `n_ref` (default [`default_reference_size`]).
pub fn ddd_gof(
    x: &DataMatrix,
    f0: &ReferenceDistribution,
    n_ref: Option<usize>,
    method: DepthMethod,
    rng: &mut StreamRng,
) -> Result<Vec<DddRecord>> {
    ddd_gof_banded(x, f0, n_ref, method, Band::TwoSigma, rng)
}

/// [`ddd_gof`] with a choice of band.
pub fn ddd_gof_banded(
    x: &DataMatrix,
    f0: &ReferenceDistribution,
    n_ref: Option<usize>,
    method: DepthMethod,
    band: Band,
    rng: &mut StreamRng,
) -> Result<Vec<DddRecord>> {
    if f0.dim() != x.ncols() {
        return Err(Error::Shape(format!(
            "null distribution is {}-dimensional, data are {}-dimensional",
            f0.dim(),
            x.ncols()
        )));
    }
    let n_ref = n_ref.unwrap_or_else(|| default_reference_size(x.nrows()));
    if n_ref == 0 {
        return Err(Error::Precondition(
            "reference sample size must be positive".into(),
        ));
    }
    let plan = DepthPlan::resolve(method, x.ncols(), &mut rng.fork(0))?;
    let reference = sample(f0, n_ref, &mut rng.fork(1))?;
    ddd_gof_with_reference_banded(x, &reference, &plan, band, &rng.fork(2))
}

/// Goodness-of-fit records against an explicit reference sample.
pub fn ddd_gof_with_reference(
    x: &DataMatrix,
    reference: &DataMatrix,
    plan: &DepthPlan,
) -> Result<Vec<DddRecord>> {
    ddd_gof_with_reference_banded(x, reference, plan, Band::TwoSigma, &StreamRng::new(0, 0))
}

fn ddd_gof_with_reference_banded(
    x: &DataMatrix,
    reference: &DataMatrix,
    plan: &DepthPlan,
    band: Band,
    rng: &StreamRng,
) -> Result<Vec<DddRecord>> {
    let depth_a = DepthFunction::new(x, plan)?.profile(x.as_slice())?;
    let depth_b = DepthFunction::new(reference, plan)?.profile(x.as_slice())?;
    let bands = match band {
        Band::TwoSigma => depth_b
            .iter()
            .map(|b| two_sigma_band(b.value(), x.nrows(), None))
            .collect(),
        Band::Bootstrap { replicates } => bootstrap_band(x, None, x, plan, replicates, rng)?,
    };
    Ok(assemble(x, &depth_a, &depth_b, &bands))
}

/// Discrepancy `D_x - D_y` at every row of `x`, then every row of `y`.
pub fn ddd_twosample(
    x: &DataMatrix,
    y: &DataMatrix,
    method: DepthMethod,
    rng: &mut StreamRng,
) -> Result<Vec<DddRecord>> {
    ddd_twosample_banded(x, y, method, Band::TwoSigma, rng)
}

/// [`ddd_twosample`] with a choice of band.
pub fn ddd_twosample_banded(
    x: &DataMatrix,
    y: &DataMatrix,
    method: DepthMethod,
    band: Band,
    rng: &mut StreamRng,
) -> Result<Vec<DddRecord>> {
    let pooled = x.vstack(y)?;
    let plan = DepthPlan::resolve(method, x.ncols(), &mut rng.fork(0))?;
    let depth_a = DepthFunction::new(x, &plan)?.profile(pooled.as_slice())?;
    let depth_b = DepthFunction::new(y, &plan)?.profile(pooled.as_slice())?;
    let (n, m) = (x.nrows(), y.nrows());
    let bands = match band {
        Band::TwoSigma => depth_a
            .iter()
            .zip(&depth_b)
            .map(|(a, b)| two_sigma_band(0.5 * (a.value() + b.value()), n, Some(m)))
            .collect(),
        Band::Bootstrap { replicates } => {
            bootstrap_band(x, Some(y), &pooled, &plan, replicates, &rng.fork(2))?
        }
    };
    Ok(assemble(&pooled, &depth_a, &depth_b, &bands))
}

fn assemble(
    points: &DataMatrix,
    depth_a: &[DepthValue],
    depth_b: &[DepthValue],
    bands: &[f64],
) -> Vec<DddRecord> {
    points
        .rows()
        .enumerate()
        .map(|(i, p)| DddRecord::new(i, p, depth_a[i], depth_b[i], bands[i]))
        .collect()
}

/// Twice the pointwise standard deviation of the resampled depth in `x`
/// (minus the resampled depth in `y`, when given) over `replicates` draws
/// with replacement. Replicate `b` uses `rng.fork(b)`.
fn bootstrap_band(
    x: &DataMatrix,
    y: Option<&DataMatrix>,
    points: &DataMatrix,
    plan: &DepthPlan,
    replicates: usize,
    base: &StreamRng,
) -> Result<Vec<f64>> {
    if replicates < 2 {
        return Err(Error::Precondition(
            "a bootstrap band needs at least two replicates".into(),
        ));
    }
    let draws: Vec<Vec<f64>> = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut r = base.fork(b);
            let xs = resample(x, &mut r)?;
            let mut v = DepthFunction::new(&xs, plan)?.values_at(points)?;
            if let Some(y) = y {
                let ys = resample(y, &mut r)?;
                let w = DepthFunction::new(&ys, plan)?.values_at(points)?;
                v.iter_mut().zip(w).for_each(|(a, b)| *a -= b);
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let k = replicates as f64;
    Ok((0..points.nrows())
        .map(|i| {
            let mean = draws.iter().map(|v| v[i]).sum::<f64>() / k;
            let var = draws.iter().map(|v| (v[i] - mean).powi(2)).sum::<f64>() / (k - 1.0);
            2.0 * var.sqrt()
        })
        .collect())
}

pub(crate) fn resample(x: &DataMatrix, rng: &mut StreamRng) -> Result<DataMatrix> {
    use rand::Rng;
    let n = x.nrows();
    let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    x.select_rows(&idx)
}

/// Fraction of records flagged outside their band.
pub fn outside_fraction(records: &[DddRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| r.outside).count() as f64 / records.len() as f64
}
