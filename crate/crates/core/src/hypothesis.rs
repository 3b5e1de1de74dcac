//! Depth-based Kolmogorov-Smirnov and Cramér-von Mises tests with bootstrap
//! p-values.
//!
//! Goodness of fit compares the depth in the data with the depth in a large
//! sample from the null `F0`:
//!
//! * KS: `sqrt(n) max |D_X(u) - D_F0(u)|` over a grid of `M` points,
//! * CvM: `n / M * sum (D_X(y_j) - D_F0(y_j))^2` over `M` draws `y_j ~ F0`.
//!
//! The null law is approximated by redrawing the data from `F0` while the
//! grids and the reference sample stay fixed.
//!
//! The two-sample statistics are `sqrt(n + m) max |D_X - D_Y|` over a grid
//! and `sum (D_X - D_Y)^2` over the pooled points. Their null law comes from
//! resampling `n + m` rows of the pooled data with replacement and splitting
//! the result into the first `n` and the last `m` rows.
//!
//! Depth differences are accumulated as exact integers over the common
//! denominator `n_a n_b` and divided once at the end.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{standardize, DataMatrix};
use crate::depth::{DepthFunction, DepthMethod, DepthPlan, DepthValue};
use crate::discrepancy::default_reference_size;
use crate::distributions::{sample, sample_unit_sphere, ReferenceDistribution};
use crate::error::{Error, Result};
use crate::rng::{StreamId, StreamRng};

/// Default number of grid points / null draws per statistic.
pub const DEFAULT_GRID_SIZE: usize = 2000;
/// Default number of bootstrap replicates.
pub const DEFAULT_BOOTSTRAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Ks,
    Cvm,
}

impl Statistic {
    pub const ALL: [Statistic; 2] = [Statistic::Ks, Statistic::Cvm];
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Ks => "ks",
            Statistic::Cvm => "cvm",
        })
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ks" => Ok(Statistic::Ks),
            "cvm" => Ok(Statistic::Cvm),
            _ => Err(Error::Parameter(format!(
                "unknown statistic '{s}' (ks|cvm)"
            ))),
        }
    }
}

/// Where the KS supremum is taken.
///
/// `Sphere` uses `M` uniform points on the unit sphere, which only makes sense
/// for data on the scale of the unit ball (standardized data or a standard
/// null). `Pooled` uses the null draws for goodness of fit and the pooled
/// sample rows for two samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalGrid {
    #[default]
    Sphere,
    Pooled,
}

impl FromStr for EvalGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(EvalGrid::Sphere),
            "pooled" => Ok(EvalGrid::Pooled),
            _ => Err(Error::Parameter(format!(
                "unknown grid '{s}' (sphere|pooled)"
            ))),
        }
    }
}

/// `Strict` is `#{T_b > T} / B`; `Corrected` is `(1 + #{T_b > T}) / (1 + B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueRule {
    #[default]
    Strict,
    Corrected,
}

impl PValueRule {
    pub fn apply(self, exceedances: usize, replicates: usize) -> f64 {
        match self {
            PValueRule::Strict => exceedances as f64 / replicates as f64,
            PValueRule::Corrected => (1 + exceedances) as f64 / (1 + replicates) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofSpec {
    pub f0: ReferenceDistribution,
    pub statistic: Statistic,
    /// Grid size `M`, used for both the sphere grid and the null draws.
    pub grid_size: usize,
    pub bootstrap: usize,
    /// `None` means [`default_reference_size`] of the data size.
    pub reference_size: Option<usize>,
    pub method: DepthMethod,
    pub grid: EvalGrid,
    pub p_value: PValueRule,
    pub seed: u64,
}

impl GofSpec {
    pub fn new(f0: ReferenceDistribution, statistic: Statistic, seed: u64) -> Self {
        GofSpec {
            f0,
            statistic,
            grid_size: DEFAULT_GRID_SIZE,
            bootstrap: DEFAULT_BOOTSTRAP,
            reference_size: None,
            method: DepthMethod::Auto,
            grid: EvalGrid::Sphere,
            p_value: PValueRule::Strict,
            seed,
        }
    }

    fn validate(&self, x: &DataMatrix) -> Result<usize> {
        if self.f0.dim() != x.ncols() {
            return Err(Error::Shape(format!(
                "null distribution is {}-dimensional, data are {}-dimensional",
                self.f0.dim(),
                x.ncols()
            )));
        }
        check_counts(self.grid_size, self.bootstrap)?;
        let n_ref = self
            .reference_size
            .unwrap_or_else(|| default_reference_size(x.nrows()));
        if n_ref == 0 {
            return Err(Error::Precondition(
                "reference sample size must be positive".into(),
            ));
        }
        Ok(n_ref)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSampleSpec {
    pub statistic: Statistic,
    pub grid_size: usize,
    pub bootstrap: usize,
    pub method: DepthMethod,
    pub grid: EvalGrid,
    pub p_value: PValueRule,
    pub seed: u64,
}

impl TwoSampleSpec {
    pub fn new(statistic: Statistic, seed: u64) -> Self {
        TwoSampleSpec {
            statistic,
            grid_size: DEFAULT_GRID_SIZE,
            bootstrap: DEFAULT_BOOTSTRAP,
            method: DepthMethod::Auto,
            grid: EvalGrid::Sphere,
            p_value: PValueRule::Strict,
            seed,
        }
    }
}

fn check_counts(grid_size: usize, bootstrap: usize) -> Result<()> {
    if grid_size == 0 {
        return Err(Error::Precondition("grid size M must be at least 1".into()));
    }
    if bootstrap == 0 {
        return Err(Error::Precondition(
            "bootstrap replicate count B must be at least 1".into(),
        ));
    }
    Ok(())
}

/// The configuration a [`TestResult`] came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum TestSpec {
    Gof(GofSpec),
    TwoSample(TwoSampleSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: Statistic,
    pub statistic_value: f64,
    pub p_value: f64,
    /// `#{b : T_b > T}`.
    pub exceedances: usize,
    pub replicates: Vec<f64>,
    pub sample_sizes: Vec<usize>,
    pub spec: TestSpec,
    /// Stream the whole test was derived from.
    pub rng: StreamId,
}

impl TestResult {
    /// Reject at level `alpha` iff `p <= alpha`.
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

// ---------------------------------------------------------------------------
// Exact accumulation of depth differences.

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `num / den` reduced first, so small exact ratios round once.
fn ratio(num: u128, den: u128) -> f64 {
    let g = gcd(num, den).max(1);
    (num / g) as f64 / (den / g) as f64
}

/// `|D_a - D_b|` at each point as integers over the common denominator.
fn abs_differences<'a>(
    a: &'a [DepthValue],
    b: &'a [DepthValue],
) -> (u128, impl Iterator<Item = u128> + 'a) {
    let na = a.first().map_or(1, |v| v.total) as u128;
    let nb = b.first().map_or(1, |v| v.total) as u128;
    let diffs = a.iter().zip(b).map(move |(x, y)| {
        let p = x.hits as u128 * nb;
        let q = y.hits as u128 * na;
        p.abs_diff(q)
    });
    (na * nb, diffs)
}

/// `sqrt(scale) * max |D_a - D_b|`.
fn ks_from_depths(scale: usize, a: &[DepthValue], b: &[DepthValue]) -> f64 {
    let (den, diffs) = abs_differences(a, b);
    let max = diffs.max().unwrap_or(0);
    if max == 0 {
        return 0.0;
    }
    let g = gcd(max, den);
    (scale as f64).sqrt() * (max / g) as f64 / (den / g) as f64
}

/// `factor / divisor * sum (D_a - D_b)^2`.
fn cvm_from_depths(factor: usize, divisor: usize, a: &[DepthValue], b: &[DepthValue]) -> f64 {
    let (den, diffs) = abs_differences(a, b);
    let sum: u128 = diffs.map(|d| d * d).sum();
    ratio(factor as u128 * sum, divisor as u128 * den * den)
}

fn nonempty_grid(grid: &DataMatrix, d: usize) -> Result<()> {
    if grid.ncols() != d {
        return Err(Error::Shape(format!(
            "grid is {}-dimensional, data are {d}-dimensional",
            grid.ncols()
        )));
    }
    Ok(())
}

fn same_dim(x: &DataMatrix, y: &DataMatrix) -> Result<()> {
    if x.ncols() != y.ncols() {
        return Err(Error::Shape(format!(
            "samples have {} and {} columns",
            x.ncols(),
            y.ncols()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Statistics for explicit inputs.

/// `sqrt(n) max_{u in grid} |D_x(u) - D_ref(u)|`.
pub fn gof_statistic_ks(
    x: &DataMatrix,
    grid: &DataMatrix,
    reference: &DataMatrix,
    plan: &DepthPlan,
) -> Result<f64> {
    same_dim(x, reference)?;
    nonempty_grid(grid, x.ncols())?;
    let a = DepthFunction::new(x, plan)?.profile(grid.as_slice())?;
    let b = DepthFunction::new(reference, plan)?.profile(grid.as_slice())?;
    Ok(ks_from_depths(x.nrows(), &a, &b))
}

/// `n / M * sum_j (D_x(u_j) - D_ref(u_j))^2` over the `M` rows of `draws`.
pub fn gof_statistic_cvm(
    x: &DataMatrix,
    draws: &DataMatrix,
    reference: &DataMatrix,
    plan: &DepthPlan,
) -> Result<f64> {
    same_dim(x, reference)?;
    nonempty_grid(draws, x.ncols())?;
    let a = DepthFunction::new(x, plan)?.profile(draws.as_slice())?;
    let b = DepthFunction::new(reference, plan)?.profile(draws.as_slice())?;
    Ok(cvm_from_depths(x.nrows(), draws.nrows(), &a, &b))
}

/// `sqrt(n + m) max_{u in grid} |D_x(u) - D_y(u)|`.
pub fn ts_statistic_ks(
    x: &DataMatrix,
    y: &DataMatrix,
    grid: &DataMatrix,
    plan: &DepthPlan,
) -> Result<f64> {
    same_dim(x, y)?;
    nonempty_grid(grid, x.ncols())?;
    let a = DepthFunction::new(x, plan)?.profile(grid.as_slice())?;
    let b = DepthFunction::new(y, plan)?.profile(grid.as_slice())?;
    Ok(ks_from_depths(x.nrows() + y.nrows(), &a, &b))
}

/// `sum (D_x(z) - D_y(z))^2` over the `n + m` pooled rows `z`.
pub fn ts_statistic_cvm(x: &DataMatrix, y: &DataMatrix, plan: &DepthPlan) -> Result<f64> {
    let pooled = x.vstack(y)?;
    let a = DepthFunction::new(x, plan)?.profile(pooled.as_slice())?;
    let b = DepthFunction::new(y, plan)?.profile(pooled.as_slice())?;
    Ok(cvm_from_depths(1, 1, &a, &b))
}

// ---------------------------------------------------------------------------
// Goodness of fit.

/// Grids, reference depths and plan, fixed across bootstrap replicates.
struct GofSetup {
    plan: DepthPlan,
    sphere: DataMatrix,
    draws: DataMatrix,
    ref_sphere: Vec<DepthValue>,
    ref_draws: Vec<DepthValue>,
    stats: Vec<Statistic>,
    grid: EvalGrid,
}

impl GofSetup {
    fn new(
        x: &DataMatrix,
        spec: &GofSpec,
        stats: &[Statistic],
        n_ref: usize,
        base: &StreamRng,
    ) -> Result<Self> {
        let d = x.ncols();
        let plan = DepthPlan::resolve(spec.method, d, &mut base.fork(0))?;
        let sphere = sample_unit_sphere(d, spec.grid_size, &mut base.fork(1))?.to_matrix();
        let draws = sample(&spec.f0, spec.grid_size, &mut base.fork(2))?;
        let reference = sample(&spec.f0, n_ref, &mut base.fork(3))?;
        let wants_sphere = stats.contains(&Statistic::Ks) && spec.grid == EvalGrid::Sphere;
        let wants_draws = stats.contains(&Statistic::Cvm) || spec.grid == EvalGrid::Pooled;
        let ref_fn = DepthFunction::new(&reference, &plan)?;
        let ref_sphere = if wants_sphere {
            ref_fn.profile(sphere.as_slice())?
        } else {
            Vec::new()
        };
        let ref_draws = if wants_draws {
            ref_fn.profile(draws.as_slice())?
        } else {
            Vec::new()
        };
        Ok(GofSetup {
            plan,
            sphere,
            draws,
            ref_sphere,
            ref_draws,
            stats: stats.to_vec(),
            grid: spec.grid,
        })
    }

    fn statistics(&self, x: &DataMatrix) -> Result<Vec<f64>> {
        let f = DepthFunction::new(x, &self.plan)?;
        let at_draws = if self.ref_draws.is_empty() {
            Vec::new()
        } else {
            f.profile(self.draws.as_slice())?
        };
        let at_sphere = if self.ref_sphere.is_empty() {
            Vec::new()
        } else {
            f.profile(self.sphere.as_slice())?
        };
        let n = x.nrows();
        Ok(self
            .stats
            .iter()
            .map(|s| match (s, self.grid) {
                (Statistic::Ks, EvalGrid::Sphere) => {
                    ks_from_depths(n, &at_sphere, &self.ref_sphere)
                }
                (Statistic::Ks, EvalGrid::Pooled) => ks_from_depths(n, &at_draws, &self.ref_draws),
                (Statistic::Cvm, _) => {
                    cvm_from_depths(n, self.draws.nrows(), &at_draws, &self.ref_draws)
                }
            })
            .collect())
    }
}

/// Bootstrap goodness-of-fit test of `x ~ F0`.
pub fn gof_test(x: &DataMatrix, spec: &GofSpec) -> Result<TestResult> {
    Ok(gof_test_many(x, spec, &[spec.statistic])?.remove(0))
}

/// Runs several statistics on the same grids, reference sample and bootstrap
/// draws. The result for each statistic equals what [`gof_test`] returns with
/// that statistic in the spec.
pub fn gof_test_many(
    x: &DataMatrix,
    spec: &GofSpec,
    stats: &[Statistic],
) -> Result<Vec<TestResult>> {
    let n_ref = spec.validate(x)?;
    let base = StreamRng::new(spec.seed, 0);
    let setup = GofSetup::new(x, spec, stats, n_ref, &base)?;
    let observed = setup.statistics(x)?;
    let boot = base.fork(4);
    let n = x.nrows();
    let replicates: Vec<Vec<f64>> = (0..spec.bootstrap as u64)
        .into_par_iter()
        .map(|b| {
            let xb = sample(&spec.f0, n, &mut boot.fork(b))?;
            setup.statistics(&xb)
        })
        .collect::<Result<_>>()?;
    Ok(stats
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let mut echo = spec.clone();
            echo.statistic = s;
            finish(
                s,
                observed[k],
                replicates.iter().map(|r| r[k]).collect(),
                spec.p_value,
                vec![n],
                TestSpec::Gof(echo),
                base.id(),
            )
        })
        .collect())
}

/// Plug-in normality check: standardize `x` with its own mean and
/// covariance, then test against the standard normal of the same dimension.
/// The `f0` of `spec` is replaced.
pub fn standardized_gof_test(
    x: &DataMatrix,
    spec: &GofSpec,
    stats: &[Statistic],
) -> Result<Vec<TestResult>> {
    let (z, _) = standardize(x)?;
    let mut spec = spec.clone();
    spec.f0 = ReferenceDistribution::standard_normal(x.ncols())?;
    gof_test_many(&z, &spec, stats)
}

fn finish(
    statistic: Statistic,
    value: f64,
    replicates: Vec<f64>,
    rule: PValueRule,
    sample_sizes: Vec<usize>,
    spec: TestSpec,
    rng: StreamId,
) -> TestResult {
    let exceedances = replicates.iter().filter(|t| **t > value).count();
    TestResult {
        statistic,
        statistic_value: value,
        p_value: rule.apply(exceedances, replicates.len()),
        exceedances,
        replicates,
        sample_sizes,
        spec,
        rng,
    }
}

// ---------------------------------------------------------------------------
// Two samples.

struct TwoSampleSetup {
    plan: DepthPlan,
    sphere: DataMatrix,
    stats: Vec<Statistic>,
    grid: EvalGrid,
}

impl TwoSampleSetup {
    fn statistics(&self, x: &DataMatrix, y: &DataMatrix) -> Result<Vec<f64>> {
        let fx = DepthFunction::new(x, &self.plan)?;
        let fy = DepthFunction::new(y, &self.plan)?;
        let needs_pooled = self.stats.contains(&Statistic::Cvm) || self.grid == EvalGrid::Pooled;
        let needs_sphere = self.stats.contains(&Statistic::Ks) && self.grid == EvalGrid::Sphere;
        let (pa, pb) = if needs_pooled {
            let pooled = x.vstack(y)?;
            (
                fx.profile(pooled.as_slice())?,
                fy.profile(pooled.as_slice())?,
            )
        } else {
            (Vec::new(), Vec::new())
        };
        let (sa, sb) = if needs_sphere {
            (
                fx.profile(self.sphere.as_slice())?,
                fy.profile(self.sphere.as_slice())?,
            )
        } else {
            (Vec::new(), Vec::new())
        };
        let total = x.nrows() + y.nrows();
        Ok(self
            .stats
            .iter()
            .map(|s| match (s, self.grid) {
                (Statistic::Ks, EvalGrid::Sphere) => ks_from_depths(total, &sa, &sb),
                (Statistic::Ks, EvalGrid::Pooled) => ks_from_depths(total, &pa, &pb),
                (Statistic::Cvm, _) => cvm_from_depths(1, 1, &pa, &pb),
            })
            .collect())
    }
}

/// Bootstrap two-sample test of `x` and `y` having the same law.
pub fn twosample_test(x: &DataMatrix, y: &DataMatrix, spec: &TwoSampleSpec) -> Result<TestResult> {
    Ok(twosample_test_many(x, y, spec, &[spec.statistic])?.remove(0))
}

/// Several statistics on shared draws; see [`gof_test_many`].
pub fn twosample_test_many(
    x: &DataMatrix,
    y: &DataMatrix,
    spec: &TwoSampleSpec,
    stats: &[Statistic],
) -> Result<Vec<TestResult>> {
    same_dim(x, y)?;
    check_counts(spec.grid_size, spec.bootstrap)?;
    let d = x.ncols();
    let base = StreamRng::new(spec.seed, 0);
    let setup = TwoSampleSetup {
        plan: DepthPlan::resolve(spec.method, d, &mut base.fork(0))?,
        sphere: sample_unit_sphere(d, spec.grid_size, &mut base.fork(1))?.to_matrix(),
        stats: stats.to_vec(),
        grid: spec.grid,
    };
    let observed = setup.statistics(x, y)?;
    let pooled = x.vstack(y)?;
    let (n, total) = (x.nrows(), pooled.nrows());
    let boot = base.fork(4);
    let replicates: Vec<Vec<f64>> = (0..spec.bootstrap as u64)
        .into_par_iter()
        .map(|b| {
            let mut r = boot.fork(b);
            let idx: Vec<usize> = (0..total).map(|_| r.random_range(0..total)).collect();
            let xb = pooled.select_rows(&idx[..n])?;
            let yb = pooled.select_rows(&idx[n..])?;
            setup.statistics(&xb, &yb)
        })
        .collect::<Result<_>>()?;
    Ok(stats
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let mut echo = spec.clone();
            echo.statistic = s;
            finish(
                s,
                observed[k],
                replicates.iter().map(|r| r[k]).collect(),
                spec.p_value,
                vec![x.nrows(), y.nrows()],
                TestSpec::TwoSample(echo),
                base.id(),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> DataMatrix {
        DataMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    fn shifted() -> DataMatrix {
        DataMatrix::from_rows(&[[2.0, 2.0], [3.0, 2.0], [2.0, 3.0]]).unwrap()
    }

    #[test]
    fn triangle_values() {
        let (x, y) = (tri(), shifted());
        let pooled = x.vstack(&y).unwrap();
        let plan = DepthPlan::Planar;
        assert_eq!(ts_statistic_cvm(&x, &y, &plan).unwrap(), 2.0 / 3.0);
        assert_eq!(
            ts_statistic_ks(&x, &y, &pooled, &plan).unwrap(),
            6f64.sqrt() / 3.0
        );
        assert_eq!(
            gof_statistic_ks(&x, &pooled, &y, &plan).unwrap(),
            3f64.sqrt() / 3.0
        );
        assert_eq!(ts_statistic_cvm(&x, &x, &plan).unwrap(), 0.0);
        assert_eq!(gof_statistic_ks(&x, &pooled, &x, &plan).unwrap(), 0.0);
    }

    #[test]
    fn cvm_definition_arithmetic() {
        let a = [DepthValue::new(1, 3), DepthValue::new(0, 3)];
        let b = [DepthValue::new(0, 3), DepthValue::new(1, 3)];
        assert_eq!(cvm_from_depths(3, 2, &a, &b), 1.0 / 3.0);
    }

    #[test]
    fn single_point_samples() {
        let p = DataMatrix::from_rows(&[[0.0, 0.0]]).unwrap();
        assert_eq!(ts_statistic_cvm(&p, &p, &DepthPlan::Planar).unwrap(), 0.0);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let spec = TwoSampleSpec {
            grid_size: 0,
            ..TwoSampleSpec::new(Statistic::Ks, 1)
        };
        assert!(matches!(
            twosample_test(&tri(), &shifted(), &spec),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn p_value_counting() {
        let r = finish(
            Statistic::Ks,
            0.5,
            vec![0.6, 0.7, 0.5, 0.1],
            PValueRule::Strict,
            vec![1],
            TestSpec::TwoSample(TwoSampleSpec::new(Statistic::Ks, 0)),
            StreamId { seed: 0, stream: 0 },
        );
        assert_eq!(r.p_value, 0.5);
        assert_eq!(PValueRule::Corrected.apply(2, 4), 0.6);
        let r = finish(
            Statistic::Ks,
            -1.0,
            vec![0.0; 5],
            PValueRule::Strict,
            vec![1],
            TestSpec::TwoSample(TwoSampleSpec::new(Statistic::Ks, 0)),
            StreamId { seed: 0, stream: 0 },
        );
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn identical_samples() {
        let f0 = ReferenceDistribution::standard_normal(2).unwrap();
        let x = sample(&f0, 30, &mut StreamRng::new(2, 0)).unwrap();
        let mut spec = TwoSampleSpec::new(Statistic::Cvm, 9);
        spec.bootstrap = 40;
        spec.grid_size = 50;
        for r in twosample_test_many(&x, &x, &spec, &Statistic::ALL).unwrap() {
            assert_eq!(r.statistic_value, 0.0);
            let zero = r.replicates.iter().filter(|t| **t == 0.0).count();
            assert_eq!(r.p_value, 1.0 - zero as f64 / 40.0);
        }
    }

    #[test]
    fn many_matches_single_and_is_deterministic() {
        let f0 = ReferenceDistribution::standard_normal(2).unwrap();
        let x = sample(&f0, 25, &mut StreamRng::new(4, 0)).unwrap();
        let mut spec = GofSpec::new(f0, Statistic::Cvm, 17);
        spec.bootstrap = 20;
        spec.grid_size = 40;
        spec.reference_size = Some(500);
        let both = gof_test_many(&x, &spec, &Statistic::ALL).unwrap();
        let cvm = gof_test(&x, &spec).unwrap();
        assert_eq!(both[1], cvm);
        spec.statistic = Statistic::Ks;
        assert_eq!(both[0], gof_test(&x, &spec).unwrap());
        assert!((both[0].p_value * 20.0).fract() == 0.0);
    }
}
