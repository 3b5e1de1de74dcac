//! Samplable reference distributions: null laws, alternatives, the
//! simulation models, contiguous mixtures and uniform directions.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{cholesky_lower, DataMatrix};
use crate::depth::DirectionSet;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ReferenceDistribution {
    Normal(Gaussian),
    StudentT(StudentT),
    /// Spherically symmetric law with density proportional to `exp(-|x|)`.
    Laplace {
        d: usize,
    },
    SkewNormal(SkewNormal),
    Mixture(Mixture),
    /// Resampling with replacement from fixed rows.
    Empirical {
        sample: DataMatrix,
    },
}

impl ReferenceDistribution {
    pub fn normal(mean: Vec<f64>, scatter: Vec<f64>) -> Result<Self> {
        Ok(ReferenceDistribution::Normal(Gaussian::new(mean, scatter)?))
    }

    pub fn standard_normal(d: usize) -> Result<Self> {
        Ok(ReferenceDistribution::Normal(Gaussian::standard(d)?))
    }

    pub fn student_t(mean: Vec<f64>, scatter: Vec<f64>, dof: f64) -> Result<Self> {
        Ok(ReferenceDistribution::StudentT(StudentT::new(
            Gaussian::new(mean, scatter)?,
            dof,
        )?))
    }

    /// Multivariate Cauchy: the Student t law with one degree of freedom.
    pub fn cauchy(mean: Vec<f64>, scatter: Vec<f64>) -> Result<Self> {
        Self::student_t(mean, scatter, 1.0)
    }

    pub fn laplace(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        Ok(ReferenceDistribution::Laplace { d })
    }

    pub fn skew_normal(lambda: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        Ok(ReferenceDistribution::SkewNormal(SkewNormal::new(
            lambda, psi,
        )?))
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<ReferenceDistribution>) -> Result<Self> {
        Ok(ReferenceDistribution::Mixture(Mixture::new(
            weights, components,
        )?))
    }

    pub fn empirical(sample: DataMatrix) -> Self {
        ReferenceDistribution::Empirical { sample }
    }

    pub fn dim(&self) -> usize {
        match self {
            ReferenceDistribution::Normal(g) => g.dim(),
            ReferenceDistribution::StudentT(t) => t.location.dim(),
            ReferenceDistribution::Laplace { d } => *d,
            ReferenceDistribution::SkewNormal(s) => s.alpha.len(),
            ReferenceDistribution::Mixture(m) => m.components[0].dim(),
            ReferenceDistribution::Empirical { sample } => sample.ncols(),
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            ReferenceDistribution::Normal(g) if g.is_standard() => {
                format!("N_{}(0, I)", g.dim())
            }
            ReferenceDistribution::Normal(g) => format!("N_{}(mu, Sigma)", g.dim()),
            ReferenceDistribution::StudentT(t) if t.dof == 1.0 => {
                format!("Cauchy_{}", t.location.dim())
            }
            ReferenceDistribution::StudentT(t) => format!("t_{}(nu = {})", t.location.dim(), t.dof),
            ReferenceDistribution::Laplace { d } => format!("Laplace_{d}"),
            ReferenceDistribution::SkewNormal(s) => format!("SkewNormal_{}", s.alpha.len()),
            ReferenceDistribution::Mixture(m) => {
                let parts: Vec<String> = m
                    .weights
                    .iter()
                    .zip(&m.components)
                    .map(|(w, c)| format!("{w}*{}", c.describe()))
                    .collect();
                parts.join(" + ")
            }
            ReferenceDistribution::Empirical { sample } => {
                format!("Empirical(n = {})", sample.nrows())
            }
        }
    }

    /// Appends one draw (`dim()` values) to `out`.
    pub fn sample_row(&self, rng: &mut StreamRng, out: &mut Vec<f64>) {
        match self {
            ReferenceDistribution::Normal(g) => g.sample_row(rng, out),
            ReferenceDistribution::StudentT(t) => t.sample_row(rng, out),
            ReferenceDistribution::Laplace { d } => {
                let radius: f64 = Gamma::new(*d as f64, 1.0)
                    .expect("positive shape")
                    .sample(rng);
                let start = out.len();
                push_unit_vector(*d, rng, out);
                out[start..].iter_mut().for_each(|v| *v *= radius);
            }
            ReferenceDistribution::SkewNormal(s) => s.sample_row(rng, out),
            ReferenceDistribution::Mixture(m) => m.pick(rng).sample_row(rng, out),
            ReferenceDistribution::Empirical { sample } => {
                let i = rng.random_range(0..sample.nrows());
                out.extend_from_slice(sample.row(i));
            }
        }
    }
}

/// Draws `n` i.i.d. rows.
pub fn sample(dist: &ReferenceDistribution, n: usize, rng: &mut StreamRng) -> Result<DataMatrix> {
    if n == 0 {
        return Err(Error::Precondition("sample size must be at least 1".into()));
    }
    let d = dist.dim();
    let mut values = Vec::with_capacity(n * d);
    for _ in 0..n {
        dist.sample_row(rng, &mut values);
    }
    DataMatrix::new(n, d, values)
}

/// Gaussian with mean `mean` and scatter (covariance) `scatter`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LocationScatter", into = "LocationScatter")]
pub struct Gaussian {
    mean: Vec<f64>,
    scatter: Vec<f64>,
    /// Lower Cholesky factor, row-major.
    factor: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct LocationScatter {
    mean: Vec<f64>,
    scatter: Vec<f64>,
}

impl TryFrom<LocationScatter> for Gaussian {
    type Error = Error;

    fn try_from(p: LocationScatter) -> Result<Self> {
        Gaussian::new(p.mean, p.scatter)
    }
}

impl From<Gaussian> for LocationScatter {
    fn from(g: Gaussian) -> Self {
        LocationScatter {
            mean: g.mean,
            scatter: g.scatter,
        }
    }
}

impl Gaussian {
    pub fn new(mean: Vec<f64>, scatter: Vec<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 || scatter.len() != d * d {
            return Err(Error::Parameter(format!(
                "mean of length {d} needs a {d}x{d} scatter matrix, got {} entries",
                scatter.len()
            )));
        }
        if mean.iter().chain(&scatter).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite location or scatter".into()));
        }
        check_symmetric(&scatter, d, "scatter")?;
        let l = cholesky_lower(&scatter, d).map_err(|e| Error::Parameter(e.to_string()))?;
        let mut factor = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                factor[i * d + j] = l[(i, j)];
            }
        }
        Ok(Gaussian {
            mean,
            scatter,
            factor,
        })
    }

    pub fn standard(d: usize) -> Result<Self> {
        Gaussian::new(vec![0.0; d], identity(d))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn scatter(&self) -> &[f64] {
        &self.scatter
    }

    fn is_standard(&self) -> bool {
        self.mean.iter().all(|m| *m == 0.0) && self.scatter == identity(self.dim())
    }

    /// `out += mean + L z * scale` with `z` the given standard normals.
    fn push_transformed(&self, z: &[f64], scale: f64, out: &mut Vec<f64>) {
        let d = self.dim();
        for i in 0..d {
            let row = &self.factor[i * d..i * d + i + 1];
            let lz: f64 = row.iter().zip(z).map(|(l, z)| l * z).sum();
            out.push(self.mean[i] + lz * scale);
        }
    }

    fn sample_row(&self, rng: &mut StreamRng, out: &mut Vec<f64>) {
        let z = standard_normals(self.dim(), rng);
        self.push_transformed(&z, 1.0, out);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentT {
    pub location: Gaussian,
    pub dof: f64,
}

impl StudentT {
    pub fn new(location: Gaussian, dof: f64) -> Result<Self> {
        if !(dof > 0.0 && dof.is_finite()) {
            return Err(Error::Parameter(format!(
                "degrees of freedom must be positive, got {dof}"
            )));
        }
        Ok(StudentT { location, dof })
    }

    /// `mean + L z / sqrt(w / nu)` with `w ~ chi^2_nu`.
    fn sample_row(&self, rng: &mut StreamRng, out: &mut Vec<f64>) {
        let z = standard_normals(self.location.dim(), rng);
        let w: f64 = ChiSquared::new(self.dof).expect("positive dof").sample(rng);
        self.location
            .push_transformed(&z, 1.0 / (w / self.dof).sqrt(), out);
    }
}

/// Skew-normal law with density `2 phi_d(x; Omega) Phi(alpha^T x)`, built from
/// per-coordinate skewness values `lambda_i` in `(-1, 1)` and a correlation
/// matrix `psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SkewNormalParams", into = "SkewNormalParams")]
pub struct SkewNormal {
    lambda: Vec<f64>,
    psi: Vec<f64>,
    alpha: Vec<f64>,
    omega: Vec<f64>,
    delta: Vec<f64>,
    /// Cholesky factor of the joint covariance of `(Z0, Z)`.
    joint: Gaussian,
}

#[derive(Serialize, Deserialize)]
struct SkewNormalParams {
    lambda: Vec<f64>,
    psi: Vec<f64>,
}

impl TryFrom<SkewNormalParams> for SkewNormal {
    type Error = Error;

    fn try_from(p: SkewNormalParams) -> Result<Self> {
        SkewNormal::new(p.lambda, p.psi)
    }
}

impl From<SkewNormal> for SkewNormalParams {
    fn from(s: SkewNormal) -> Self {
        SkewNormalParams {
            lambda: s.lambda,
            psi: s.psi,
        }
    }
}

impl SkewNormal {
    pub fn new(lambda: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        let (alpha, omega) = skew_normal_params(&lambda, &psi)?;
        let d = alpha.len();
        let om = DMatrix::from_row_slice(d, d, &omega);
        let a = DVector::from_column_slice(&alpha);
        let quad = (a.transpose() * &om * &a)[(0, 0)];
        let delta: Vec<f64> = (&om * &a / (1.0 + quad).sqrt()).iter().copied().collect();

        let mut joint = vec![0.0; (d + 1) * (d + 1)];
        joint[0] = 1.0;
        for i in 0..d {
            joint[i + 1] = delta[i];
            joint[(i + 1) * (d + 1)] = delta[i];
            for j in 0..d {
                joint[(i + 1) * (d + 1) + j + 1] = omega[i * d + j];
            }
        }
        // Symmetrize rounding in omega before factoring.
        for i in 0..=d {
            for j in 0..i {
                let v = 0.5 * (joint[i * (d + 1) + j] + joint[j * (d + 1) + i]);
                joint[i * (d + 1) + j] = v;
                joint[j * (d + 1) + i] = v;
            }
        }
        let joint = Gaussian::new(vec![0.0; d + 1], joint)?;
        Ok(SkewNormal {
            lambda,
            psi,
            alpha,
            omega,
            delta,
            joint,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// `delta = Omega alpha / sqrt(1 + alpha^T Omega alpha)`, the covariance
    /// between the latent selector and the observed vector.
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// Selection representation: draw `(Z0, Z)` jointly normal and return `Z`
    /// when `Z0 > 0`, `-Z` otherwise.
    fn sample_row(&self, rng: &mut StreamRng, out: &mut Vec<f64>) {
        let mut joint = Vec::with_capacity(self.alpha.len() + 1);
        self.joint.sample_row(rng, &mut joint);
        let sign = if joint[0] > 0.0 { 1.0 } else { -1.0 };
        out.extend(joint[1..].iter().map(|z| sign * z));
    }
}

/// `(alpha, Omega)` of the skew-normal law with skewness values `lambda` and
/// correlation matrix `psi` (row-major):
///
/// * `Delta = diag(sqrt(1 - lambda_i^2))`, `l_i = lambda_i / sqrt(1 - lambda_i^2)`,
/// * `Omega = Delta (psi + l l^T) Delta`,
/// * `alpha^T = l^T psi^-1 Delta^-1 / sqrt(1 + l^T psi^-1 l)`.
pub fn skew_normal_params(lambda: &[f64], psi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = lambda.len();
    if d == 0 || psi.len() != d * d {
        return Err(Error::Parameter(format!(
            "{d} skewness values need a {d}x{d} correlation matrix"
        )));
    }
    if let Some(l) = lambda.iter().find(|l| l.is_nan() || l.abs() >= 1.0) {
        return Err(Error::Parameter(format!(
            "skewness values must lie in (-1, 1), got {l}"
        )));
    }
    check_symmetric(psi, d, "psi")?;
    if (0..d).any(|i| (psi[i * d + i] - 1.0).abs() > 1e-12) {
        return Err(Error::Parameter("psi must have a unit diagonal".into()));
    }
    let psi_m = DMatrix::from_row_slice(d, d, psi);
    let psi_inv = psi_m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Parameter("psi is not positive definite".into()))?
        .inverse();
    let scale = DVector::from_iterator(d, lambda.iter().map(|l| (1.0 - l * l).sqrt()));
    let l = DVector::from_iterator(d, lambda.iter().zip(scale.iter()).map(|(l, s)| l / s));
    let delta_m = DMatrix::from_diagonal(&scale);

    let omega = &delta_m * (&psi_m + &l * l.transpose()) * &delta_m;
    let psi_inv_l = &psi_inv * &l;
    let denom = (1.0 + l.dot(&psi_inv_l)).sqrt();
    let alpha: Vec<f64> = psi_inv_l
        .iter()
        .zip(scale.iter())
        .map(|(v, s)| v / s / denom)
        .collect();
    let mut omega_rows = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            omega_rows[i * d + j] = omega[(i, j)];
        }
    }
    Ok((alpha, omega_rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixtureParams", into = "MixtureParams")]
pub struct Mixture {
    weights: Vec<f64>,
    components: Vec<ReferenceDistribution>,
}

#[derive(Serialize, Deserialize)]
struct MixtureParams {
    weights: Vec<f64>,
    components: Vec<ReferenceDistribution>,
}

impl TryFrom<MixtureParams> for Mixture {
    type Error = Error;

    fn try_from(p: MixtureParams) -> Result<Self> {
        Mixture::new(p.weights, p.components)
    }
}

impl From<Mixture> for MixtureParams {
    fn from(m: Mixture) -> Self {
        MixtureParams {
            weights: m.weights,
            components: m.components,
        }
    }
}

impl Mixture {
    pub fn new(weights: Vec<f64>, components: Vec<ReferenceDistribution>) -> Result<Self> {
        if components.is_empty() || weights.len() != components.len() {
            return Err(Error::Parameter(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::Parameter(
                "mixture weights must be nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        let d = components[0].dim();
        if components.iter().any(|c| c.dim() != d) {
            return Err(Error::Parameter(
                "mixture components differ in dimension".into(),
            ));
        }
        Ok(Mixture {
            weights,
            components,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[ReferenceDistribution] {
        &self.components
    }

    /// Component for the next row. A mixture with a single positive weight
    /// consumes no randomness here, so it reproduces that component exactly.
    fn pick(&self, rng: &mut StreamRng) -> &ReferenceDistribution {
        let mut positive = self.weights.iter().enumerate().filter(|(_, w)| **w > 0.0);
        let first = positive.next().map(|(i, _)| i).unwrap_or(0);
        if positive.next().is_none() {
            return &self.components[first];
        }
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut last = first;
        for (i, w) in self.weights.iter().enumerate() {
            if *w <= 0.0 {
                continue;
            }
            cumulative += w;
            last = i;
            if u < cumulative {
                return &self.components[i];
            }
        }
        &self.components[last]
    }
}

/// Local alternative `(1 - gamma / sqrt(n_total)) f0 + (gamma / sqrt(n_total)) h`.
pub fn contiguous_mixture(
    f0: &ReferenceDistribution,
    h: &ReferenceDistribution,
    gamma: f64,
    n_total: usize,
) -> Result<ReferenceDistribution> {
    if n_total == 0 {
        return Err(Error::Parameter("sample size must be positive".into()));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Parameter(format!(
            "gamma must be finite and nonnegative, got {gamma}"
        )));
    }
    let w = gamma / (n_total as f64).sqrt();
    if w > 1.0 {
        return Err(Error::Parameter(format!(
            "contamination weight gamma / sqrt(n) = {w} exceeds 1"
        )));
    }
    ReferenceDistribution::mixture(vec![1.0 - w, w], vec![f0.clone(), h.clone()])
}

/// `count` directions uniformly distributed on the unit sphere in `d`
/// dimensions (normalized Gaussian vectors).
pub fn sample_unit_sphere(d: usize, count: usize, rng: &mut StreamRng) -> Result<DirectionSet> {
    if d == 0 || count == 0 {
        return Err(Error::Precondition(format!(
            "need a positive dimension and count (got d = {d}, count = {count})"
        )));
    }
    let mut values = Vec::with_capacity(d * count);
    for _ in 0..count {
        push_unit_vector(d, rng, &mut values);
    }
    Ok(DirectionSet::from_unit_vectors_unchecked(d, values))
}

fn push_unit_vector(d: usize, rng: &mut StreamRng, out: &mut Vec<f64>) {
    loop {
        let z = standard_normals(d, rng);
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            out.extend(z.iter().map(|v| v / norm));
            return;
        }
    }
}

fn standard_normals(d: usize, rng: &mut StreamRng) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

pub(crate) fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    (0..d).for_each(|i| m[i * d + i] = 1.0);
    m
}

fn check_symmetric(m: &[f64], d: usize, what: &str) -> Result<()> {
    for i in 0..d {
        for j in 0..i {
            let (a, b) = (m[i * d + j], m[j * d + i]);
            if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::Parameter(format!("{what} is not symmetric")));
            }
        }
    }
    Ok(())
}
