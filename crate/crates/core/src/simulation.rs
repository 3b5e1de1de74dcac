//! Monte Carlo size and power studies.
//!
//! A cell is one model at one sample size. Every repeat draws fresh data,
//! runs the bootstrap test and records whether `p <= alpha`. Repeat `r` takes
//! its data from `fork(r).fork(0)` of the cell stream and its test seed from
//! `fork(r).fork(1)`, so a cell is reproducible and independent of the worker
//! count.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::DepthMethod;
use crate::distributions::{contiguous_mixture, identity, sample, ReferenceDistribution};
use crate::error::{Error, Result};
use crate::hypothesis::{
    gof_test_many, twosample_test_many, EvalGrid, GofSpec, PValueRule, Statistic, TwoSampleSpec,
    DEFAULT_BOOTSTRAP, DEFAULT_GRID_SIZE,
};
use crate::rng::StreamRng;

/// Data-generating model of a cell.
///
/// Models `A1`..`A6` are goodness-of-fit alternatives tested against the
/// standard normal: `A1` is the null itself, `A2` the mixture
/// `0.8 N(0, I) + 0.2 N(5 1, I)`, `A3` the mixture `0.8 N(0, I) + 0.2 N(0, S)`
/// with `S` compound symmetric (unit diagonal, 0.5 elsewhere), `A4` the
/// Student t with 3 degrees of freedom, `A5` the Cauchy and `A6` the Laplace
/// with density proportional to `exp(-|x|)`.
///
/// `B` is the two-sample model: `X ~ N(0, I)` and `Y ~ N(mu 1, I)`.
///
/// `Contiguous` draws from `(1 - w) F0 + w H` with `w = gamma / sqrt(N)`, where
/// `N` is `n` for goodness of fit and `n + m` for two samples; in the latter
/// case only the second sample is contaminated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Model {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    B {
        mu: f64,
    },
    Contiguous {
        gamma: f64,
        f0: ReferenceDistribution,
        h: ReferenceDistribution,
    },
}

impl Model {
    pub fn label(&self) -> String {
        match self {
            Model::A1 => "A.1".into(),
            Model::A2 => "A.2".into(),
            Model::A3 => "A.3".into(),
            Model::A4 => "A.4".into(),
            Model::A5 => "A.5".into(),
            Model::A6 => "A.6".into(),
            Model::B { mu } => format!("B(mu={mu})"),
            Model::Contiguous { gamma, .. } => format!("contiguous(gamma={gamma})"),
        }
    }

    fn rank(&self) -> (u8, f64) {
        match self {
            Model::A1 => (1, 0.0),
            Model::A2 => (2, 0.0),
            Model::A3 => (3, 0.0),
            Model::A4 => (4, 0.0),
            Model::A5 => (5, 0.0),
            Model::A6 => (6, 0.0),
            Model::B { mu } => (7, *mu),
            Model::Contiguous { gamma, .. } => (8, *gamma),
        }
    }

    pub fn is_two_sample(&self) -> bool {
        matches!(self, Model::B { .. })
    }

    /// The null distribution `F0` (for two samples, the law of `X`).
    pub fn null(&self, d: usize) -> Result<ReferenceDistribution> {
        match self {
            Model::Contiguous { f0, .. } => {
                check_model_dim(f0, d)?;
                Ok(f0.clone())
            }
            _ => ReferenceDistribution::standard_normal(d),
        }
    }

    /// The law the tested data come from (for two samples, the law of `Y`).
    /// `n_total` is the contiguity scale `N`.
    pub fn alternative(&self, d: usize, n_total: usize) -> Result<ReferenceDistribution> {
        let std_normal = || ReferenceDistribution::standard_normal(d);
        let zeros = || vec![0.0; d];
        match self {
            Model::A1 => std_normal(),
            Model::A2 => ReferenceDistribution::mixture(
                vec![0.8, 0.2],
                vec![
                    std_normal()?,
                    ReferenceDistribution::normal(vec![5.0; d], identity(d))?,
                ],
            ),
            Model::A3 => {
                let mut sigma = vec![0.5; d * d];
                for i in 0..d {
                    sigma[i * d + i] = 1.0;
                }
                ReferenceDistribution::mixture(
                    vec![0.8, 0.2],
                    vec![
                        std_normal()?,
                        ReferenceDistribution::normal(zeros(), sigma)?,
                    ],
                )
            }
            Model::A4 => ReferenceDistribution::student_t(zeros(), identity(d), 3.0),
            Model::A5 => ReferenceDistribution::cauchy(zeros(), identity(d)),
            Model::A6 => ReferenceDistribution::laplace(d),
            Model::B { mu } => ReferenceDistribution::normal(vec![*mu; d], identity(d)),
            Model::Contiguous { gamma, f0, h } => {
                check_model_dim(f0, d)?;
                check_model_dim(h, d)?;
                contiguous_mixture(f0, h, *gamma, n_total)
            }
        }
    }
}

fn check_model_dim(dist: &ReferenceDistribution, d: usize) -> Result<()> {
    if dist.dim() != d {
        return Err(Error::Shape(format!(
            "model distribution is {}-dimensional, cell asks for d = {d}",
            dist.dim()
        )));
    }
    Ok(())
}

/// One study cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: Model,
    pub d: usize,
    pub n: usize,
    /// Second sample size. When absent it is derived from `lambda`, and
    /// failing that equals `n`.
    pub m: Option<usize>,
    /// Target ratio `n / (n + m)`.
    pub lambda: Option<f64>,
    pub alpha: f64,
    pub reps: usize,
    pub bootstrap: usize,
    pub grid_size: usize,
    pub reference_size: Option<usize>,
    pub method: DepthMethod,
    pub grid: EvalGrid,
    pub p_value: PValueRule,
    pub statistics: Vec<Statistic>,
    pub seed: u64,
}

impl ExperimentSpec {
    /// Desk-scale defaults: `alpha = 0.05`, 200 repeats, 200 bootstrap
    /// replicates, a grid of 2000 points, both statistics.
    pub fn new(model: Model, d: usize, n: usize, seed: u64) -> Self {
        ExperimentSpec {
            model,
            d,
            n,
            m: None,
            lambda: None,
            alpha: 0.05,
            reps: 200,
            bootstrap: DEFAULT_BOOTSTRAP,
            grid_size: DEFAULT_GRID_SIZE,
            reference_size: None,
            method: DepthMethod::Auto,
            grid: EvalGrid::Sphere,
            p_value: PValueRule::Strict,
            statistics: Statistic::ALL.to_vec(),
            seed,
        }
    }

    /// The second sample size: `m` if set, else the smallest `m` with
    /// `n / (n + m) <= lambda`, else `n`.
    pub fn second_size(&self) -> Result<usize> {
        match (self.m, self.lambda) {
            (Some(0), _) => Err(Error::Parameter("m must be at least 1".into())),
            (Some(m), _) => Ok(m),
            (None, Some(l)) if l > 0.0 && l < 1.0 => {
                let m = (self.n as f64 * (1.0 - l) / l - 1e-9).ceil();
                Ok((m as usize).max(1))
            }
            (None, Some(l)) => Err(Error::Parameter(format!(
                "lambda must lie in (0, 1), got {l}"
            ))),
            (None, None) => Ok(self.n),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.reps == 0 {
            return Err(Error::Parameter("reps must be at least 1".into()));
        }
        if self.n == 0 || self.d == 0 {
            return Err(Error::Parameter("n and d must be positive".into()));
        }
        if self.statistics.is_empty() {
            return Err(Error::Parameter("no statistic requested".into()));
        }
        Ok(())
    }

    fn gof_spec(&self, f0: ReferenceDistribution, seed: u64) -> GofSpec {
        GofSpec {
            f0,
            statistic: self.statistics[0],
            grid_size: self.grid_size,
            bootstrap: self.bootstrap,
            reference_size: self.reference_size,
            method: self.method,
            grid: self.grid,
            p_value: self.p_value,
            seed,
        }
    }

    fn twosample_spec(&self, seed: u64) -> TwoSampleSpec {
        TwoSampleSpec {
            statistic: self.statistics[0],
            grid_size: self.grid_size,
            bootstrap: self.bootstrap,
            method: self.method,
            grid: self.grid,
            p_value: self.p_value,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub statistic: Statistic,
    pub rejections: usize,
    pub reps: usize,
    pub rejection_rate: f64,
    /// `sqrt(p (1 - p) / reps)`.
    pub mc_std_error: f64,
    /// p-value of every repeat, in repeat order.
    pub p_values: Vec<f64>,
    pub spec: ExperimentSpec,
}

impl PowerEstimate {
    fn from_p_values(statistic: Statistic, p_values: Vec<f64>, spec: &ExperimentSpec) -> Self {
        let reps = p_values.len();
        let rejections = p_values.iter().filter(|p| **p <= spec.alpha).count();
        let rate = rejections as f64 / reps as f64;
        PowerEstimate {
            statistic,
            rejections,
            reps,
            rejection_rate: rate,
            mc_std_error: (rate * (1.0 - rate) / reps as f64).sqrt(),
            p_values,
            spec: spec.clone(),
        }
    }
}

fn collect_estimates(spec: &ExperimentSpec, per_rep: Vec<Vec<f64>>) -> Vec<PowerEstimate> {
    spec.statistics
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            PowerEstimate::from_p_values(s, per_rep.iter().map(|p| p[k]).collect(), spec)
        })
        .collect()
}

/// Goodness-of-fit cell: one estimate per requested statistic.
pub fn run_gof_cell(spec: &ExperimentSpec) -> Result<Vec<PowerEstimate>> {
    spec.validate()?;
    if spec.model.is_two_sample() {
        return Err(Error::Parameter(format!(
            "model {} is a two-sample model",
            spec.model.label()
        )));
    }
    let f0 = spec.model.null(spec.d)?;
    let law = spec.model.alternative(spec.d, spec.n)?;
    let master = StreamRng::new(spec.seed, 0);
    let per_rep = (0..spec.reps as u64)
        .into_par_iter()
        .map(|r| {
            let rep = master.fork(r);
            let x = sample(&law, spec.n, &mut rep.fork(0))?;
            let seed = rep.fork(1).next_u64();
            let results = gof_test_many(&x, &spec.gof_spec(f0.clone(), seed), &spec.statistics)?;
            Ok(results.iter().map(|t| t.p_value).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(collect_estimates(spec, per_rep))
}

/// Two-sample cell for model `B` or a contiguous alternative.
pub fn run_twosample_cell(spec: &ExperimentSpec) -> Result<Vec<PowerEstimate>> {
    spec.validate()?;
    let m = spec.second_size()?;
    let (fx, fy) = match &spec.model {
        Model::B { .. } => (spec.model.null(spec.d)?, spec.model.alternative(spec.d, 0)?),
        Model::Contiguous { .. } => (
            spec.model.null(spec.d)?,
            spec.model.alternative(spec.d, spec.n + m)?,
        ),
        other => {
            return Err(Error::Parameter(format!(
                "model {} is a goodness-of-fit model",
                other.label()
            )))
        }
    };
    let master = StreamRng::new(spec.seed, 0);
    let per_rep = (0..spec.reps as u64)
        .into_par_iter()
        .map(|r| {
            let rep = master.fork(r);
            let x = sample(&fx, spec.n, &mut rep.fork(0))?;
            let y = sample(&fy, m, &mut rep.fork(2))?;
            let seed = rep.fork(1).next_u64();
            let results =
                twosample_test_many(&x, &y, &spec.twosample_spec(seed), &spec.statistics)?;
            Ok(results.iter().map(|t| t.p_value).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(collect_estimates(spec, per_rep))
}

/// Power at each `gamma` of the contiguous alternative between `f0` and `h`.
///
/// Every point of the curve reuses the seed of `template`, so the curve is
/// reproducible as a whole. The model and `d` of `template` are replaced.
pub fn run_local_power_curve(
    gammas: &[f64],
    f0: &ReferenceDistribution,
    h: &ReferenceDistribution,
    template: &ExperimentSpec,
    two_sample: bool,
) -> Result<Vec<(f64, Vec<PowerEstimate>)>> {
    let n_total = if two_sample {
        template.n + template.second_size()?
    } else {
        template.n
    };
    // Check every weight before spending time on any cell.
    for &g in gammas {
        contiguous_mixture(f0, h, g, n_total)?;
    }
    gammas
        .iter()
        .map(|&gamma| {
            let mut spec = template.clone();
            spec.d = f0.dim();
            spec.model = Model::Contiguous {
                gamma,
                f0: f0.clone(),
                h: h.clone(),
            };
            let cell = if two_sample {
                run_twosample_cell(&spec)?
            } else {
                run_gof_cell(&spec)?
            };
            Ok((gamma, cell))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

/// Lays out estimates one per row, ordered by model, `d`, `n`, `m` and
/// statistic. Two estimates with the same key are an error.
pub fn render_table(cells: &[PowerEstimate], format: TableFormat) -> Result<String> {
    let keyed: Vec<(CellKey, &PowerEstimate)> = cells
        .iter()
        .map(|c| Ok((CellKey::of(c)?, c)))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..keyed.len()).collect();
    order.sort_by(|&a, &b| keyed[a].0.cmp(&keyed[b].0));
    for w in order.windows(2) {
        if keyed[w[0]].0.cmp(&keyed[w[1]].0) == Ordering::Equal {
            let c = keyed[w[0]].1;
            return Err(Error::DuplicateRow(format!(
                "{} d={} n={} {}",
                c.spec.model.label(),
                c.spec.d,
                c.spec.n,
                c.statistic
            )));
        }
    }
    let header = ["model", "d", "n", "m", "statistic", "reps", "rate", "se"];
    let rows: Vec<[String; 8]> = order
        .iter()
        .map(|&i| {
            let (key, c) = &keyed[i];
            [
                c.spec.model.label(),
                c.spec.d.to_string(),
                c.spec.n.to_string(),
                key.m.map_or_else(|| "-".into(), |m| m.to_string()),
                c.statistic.to_string(),
                c.reps.to_string(),
                format!("{:.3}", c.rejection_rate),
                format!("{:.4}", c.mc_std_error),
            ]
        })
        .collect();
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header)
                .map_err(|e| Error::Io(e.to_string()))?;
            for r in &rows {
                w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
        }
        TableFormat::Text => {
            let mut widths = header.map(str::len);
            for r in &rows {
                for (w, cell) in widths.iter_mut().zip(r) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut out = String::new();
            let mut line = |cells: &[&str]| {
                let parts: Vec<String> = cells
                    .iter()
                    .zip(widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                let _ = writeln!(out, "{}", parts.join("  ").trim_end());
            };
            line(&header);
            for r in &rows {
                let cells: Vec<&str> = r.iter().map(String::as_str).collect();
                line(&cells);
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct CellKey {
    model: (u8, f64),
    d: usize,
    n: usize,
    m: Option<usize>,
    statistic: Statistic,
}

impl CellKey {
    fn of(c: &PowerEstimate) -> Result<Self> {
        let m = if c.spec.model.is_two_sample() || c.spec.m.is_some() || c.spec.lambda.is_some() {
            Some(c.spec.second_size()?)
        } else {
            None
        };
        Ok(CellKey {
            model: c.spec.model.rank(),
            d: c.spec.d,
            n: c.spec.n,
            m,
            statistic: c.statistic,
        })
    }

    fn cmp(&self, other: &Self) -> Ordering {
        self.model
            .0
            .cmp(&other.model.0)
            .then(self.model.1.total_cmp(&other.model.1))
            .then(self.d.cmp(&other.d))
            .then(self.n.cmp(&other.n))
            .then(self.m.cmp(&other.m))
            .then(self.statistic.cmp(&other.statistic))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(model: Model) -> ExperimentSpec {
        ExperimentSpec {
            reps: 4,
            bootstrap: 10,
            grid_size: 20,
            reference_size: Some(300),
            ..ExperimentSpec::new(model, 2, 20, 5)
        }
    }

    #[test]
    fn table4_second_sizes() {
        let mut s = ExperimentSpec::new(Model::B { mu: 0.0 }, 2, 50, 0);
        for (lambda, n, m) in [
            (0.3, 50, 117),
            (0.3, 100, 234),
            (0.3, 300, 700),
            (0.5, 100, 100),
            (0.8, 50, 13),
            (0.8, 300, 75),
        ] {
            s.n = n;
            s.lambda = Some(lambda);
            assert_eq!(s.second_size().unwrap(), m, "lambda={lambda} n={n}");
        }
    }

    #[test]
    fn single_repeat_is_bernoulli() {
        let mut s = small(Model::A1);
        s.reps = 1;
        for e in run_gof_cell(&s).unwrap() {
            assert!(e.rejection_rate == 0.0 || e.rejection_rate == 1.0);
        }
    }

    #[test]
    fn cells_are_deterministic() {
        let s = small(Model::B { mu: 0.5 });
        assert_eq!(
            run_twosample_cell(&s).unwrap(),
            run_twosample_cell(&s).unwrap()
        );
        let s = small(Model::A3);
        assert_eq!(run_gof_cell(&s).unwrap(), run_gof_cell(&s).unwrap());
    }

    #[test]
    fn wrong_kind_of_model() {
        assert!(run_gof_cell(&small(Model::B { mu: 1.0 })).is_err());
        assert!(run_twosample_cell(&small(Model::A2)).is_err());
    }

    #[test]
    fn curve_rejects_heavy_weight() {
        let f0 = ReferenceDistribution::standard_normal(2).unwrap();
        let h = ReferenceDistribution::laplace(2).unwrap();
        let s = small(Model::A1);
        assert!(matches!(
            run_local_power_curve(&[0.0, 11.0], &f0, &h, &s, false),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn table_layout() {
        let mk = |model: Model, n: usize, stat: Statistic| PowerEstimate {
            statistic: stat,
            rejections: 1,
            reps: 2,
            rejection_rate: 0.5,
            mc_std_error: 0.5f64.sqrt() / 2.0,
            p_values: vec![0.0, 1.0],
            spec: ExperimentSpec::new(model, 2, n, 0),
        };
        let empty = render_table(&[], TableFormat::Csv).unwrap();
        assert_eq!(empty, "model,d,n,m,statistic,reps,rate,se\n");
        let cells = [
            mk(Model::A2, 50, Statistic::Ks),
            mk(Model::A1, 100, Statistic::Ks),
            mk(Model::A1, 50, Statistic::Ks),
        ];
        let csv = render_table(&cells, TableFormat::Csv).unwrap();
        let firsts: Vec<&str> = csv.lines().skip(1).map(|l| &l[..8]).collect();
        assert_eq!(firsts, ["A.1,2,50", "A.1,2,10", "A.2,2,50"]);
        let text = render_table(&cells, TableFormat::Text).unwrap();
        assert_eq!(text.lines().count(), 4);
        let dup = [cells[0].clone(), cells[0].clone()];
        assert!(matches!(
            render_table(&dup, TableFormat::Text),
            Err(Error::DuplicateRow(_))
        ));
    }
}
