//! Tukey half-space depth.
//!
//! The depth of `x` with respect to a sample is the smallest fraction of the
//! sample contained in a closed half-space whose boundary passes through `x`.
//! Three engines are provided:
//!
//! * `d = 1`: the closed form `min(#{X_i <= x}, #{X_i >= x}) / n`;
//! * `d = 2`: exact, either by O(n^2) candidate enumeration
//!   ([`depth_exact_2d`]) or by an O(n log n) angular sweep
//!   ([`depth_sweep_2d`]), which agree exactly;
//! * any `d`: the minimum over a finite [`DirectionSet`] ([`depth_approx`]),
//!   which can only over-estimate the exact depth.
//!
//! Batch evaluation goes through [`DepthFunction`], which resolves the engine
//! (and draws random directions, if any) once for a whole batch.

mod planar;
mod projection;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::distributions::sample_unit_sphere;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

use planar::P2;
use projection::ProjectedIndex;

/// Number of random directions used by [`DepthMethod::Auto`] when `d >= 3`.
pub const DEFAULT_APPROX_DIRECTIONS: usize = 5000;

/// A depth value `hits / total`: the smallest half-space count out of the
/// `total` sample points. Comparisons are exact rational comparisons.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DepthValue {
    pub hits: usize,
    pub total: usize,
}

impl DepthValue {
    pub fn new(hits: usize, total: usize) -> Self {
        debug_assert!(total > 0 && hits <= total);
        DepthValue { hits, total }
    }

    pub fn value(&self) -> f64 {
        self.hits as f64 / self.total as f64
    }
}

impl PartialEq for DepthValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DepthValue {}

impl PartialOrd for DepthValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DepthValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.hits as u128 * other.total as u128).cmp(&(other.hits as u128 * self.total as u128))
    }
}

impl fmt::Display for DepthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.hits, self.total)
    }
}

/// A finite set of unit vectors in `d` dimensions, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    d: usize,
    values: Vec<f64>,
}

impl DirectionSet {
    /// Validates that every direction has unit norm (within `1e-12`).
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 || values.is_empty() || values.len() % d != 0 {
            return Err(Error::Shape(format!(
                "{} values do not form a non-empty set of {d}-vectors",
                values.len()
            )));
        }
        for (k, u) in values.chunks_exact(d).enumerate() {
            let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm.is_nan() || (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Parameter(format!(
                    "direction {k} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(DirectionSet { d, values })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> &[f64] {
        &self.values[k * self.d..(k + 1) * self.d]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// The directions viewed as points, e.g. as an evaluation grid on the
    /// unit sphere.
    pub fn to_matrix(&self) -> DataMatrix {
        DataMatrix::from_parts_unchecked(self.len(), self.d, self.values.clone())
    }

    pub(crate) fn from_unit_vectors_unchecked(d: usize, values: Vec<f64>) -> Self {
        DirectionSet { d, values }
    }
}

/// How depth is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthMethod {
    /// Closed form for `d = 1`, angular sweep for `d = 2`, random directions
    /// ([`DEFAULT_APPROX_DIRECTIONS`]) otherwise.
    #[default]
    Auto,
    /// Exact engines only; fails for `d >= 3`.
    Exact,
    /// Minimum over `directions` uniformly random unit vectors.
    Approx { directions: usize },
}

impl fmt::Display for DepthMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthMethod::Auto => f.write_str("auto"),
            DepthMethod::Exact => f.write_str("exact"),
            DepthMethod::Approx { directions } => write!(f, "approx({directions})"),
        }
    }
}

/// A depth method resolved for a dimension, with any random directions
/// already drawn. Cloning shares the directions.
#[derive(Debug, Clone)]
pub enum DepthPlan {
    Univariate,
    Planar,
    Projected(Arc<DirectionSet>),
}

impl DepthPlan {
    /// Resolves `method` for dimension `d`, drawing directions from `rng` when
    /// the method needs them.
    pub fn resolve(method: DepthMethod, d: usize, rng: &mut StreamRng) -> Result<Self> {
        match (method, d) {
            (_, 0) => Err(Error::Shape("dimension must be positive".into())),
            (DepthMethod::Auto | DepthMethod::Exact, 1) => Ok(DepthPlan::Univariate),
            (DepthMethod::Auto | DepthMethod::Exact, 2) => Ok(DepthPlan::Planar),
            (DepthMethod::Exact, d) => Err(Error::UnsupportedDimension(d)),
            (DepthMethod::Auto, d) => Ok(DepthPlan::Projected(Arc::new(sample_unit_sphere(
                d,
                DEFAULT_APPROX_DIRECTIONS,
                rng,
            )?))),
            (DepthMethod::Approx { directions: 0 }, _) => Err(Error::Precondition(
                "approximate depth needs at least one direction".into(),
            )),
            (DepthMethod::Approx { directions }, d) => Ok(DepthPlan::Projected(Arc::new(
                sample_unit_sphere(d, directions, rng)?,
            ))),
        }
    }

    pub fn with_directions(dirs: DirectionSet) -> Self {
        DepthPlan::Projected(Arc::new(dirs))
    }
}

/// Depth with respect to one fixed sample, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct DepthFunction {
    d: usize,
    n: usize,
    engine: Engine,
}

#[derive(Debug, Clone)]
enum Engine {
    Univariate(Vec<f64>),
    Planar(Vec<P2>),
    Projected(ProjectedIndex),
}

impl DepthFunction {
    pub fn new(sample: &DataMatrix, plan: &DepthPlan) -> Result<Self> {
        let d = sample.ncols();
        let engine = match plan {
            DepthPlan::Univariate => {
                check_dim(d, 1)?;
                let mut sorted = sample.as_slice().to_vec();
                sorted.sort_unstable_by(f64::total_cmp);
                Engine::Univariate(sorted)
            }
            DepthPlan::Planar => {
                check_dim(d, 2)?;
                Engine::Planar(to_points(sample))
            }
            DepthPlan::Projected(dirs) => {
                if dirs.dim() != d {
                    return Err(Error::Shape(format!(
                        "directions are {}-dimensional, sample is {d}-dimensional",
                        dirs.dim()
                    )));
                }
                Engine::Projected(ProjectedIndex::new(sample, Arc::clone(dirs)))
            }
        };
        Ok(DepthFunction {
            d,
            n: sample.nrows(),
            engine,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn depth(&self, x: &[f64]) -> Result<DepthValue> {
        if x.len() != self.d {
            return Err(Error::Shape(format!(
                "query point has {} coordinates, sample has {}",
                x.len(),
                self.d
            )));
        }
        Ok(DepthValue::new(self.hits(x), self.n))
    }

    /// Depth at each `d`-coordinate chunk of the row-major `points`.
    pub fn profile(&self, points: &[f64]) -> Result<Vec<DepthValue>> {
        if points.len() % self.d != 0 {
            return Err(Error::Shape(format!(
                "{} coordinates do not form {}-dimensional points",
                points.len(),
                self.d
            )));
        }
        Ok(points
            .par_chunks_exact(self.d)
            .map(|x| DepthValue::new(self.hits(x), self.n))
            .collect())
    }

    /// Depth values at the rows of `points` as plain fractions.
    pub(crate) fn values_at(&self, points: &DataMatrix) -> Result<Vec<f64>> {
        Ok(self
            .profile(points.as_slice())?
            .iter()
            .map(DepthValue::value)
            .collect())
    }

    fn hits(&self, x: &[f64]) -> usize {
        match &self.engine {
            Engine::Univariate(sorted) => univariate_hits(sorted, x[0]),
            Engine::Planar(points) => planar::min_count_sweep(points, [x[0], x[1]]),
            Engine::Projected(index) => index.min_count(x),
        }
    }
}

fn check_dim(actual: usize, expected: usize) -> Result<()> {
    if actual == expected {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "engine requires d = {expected}, sample has d = {actual}"
        )))
    }
}

fn check_query(sample: &DataMatrix, x: &[f64]) -> Result<()> {
    if x.len() != sample.ncols() {
        return Err(Error::Shape(format!(
            "query point has {} coordinates, sample has {}",
            x.len(),
            sample.ncols()
        )));
    }
    Ok(())
}

fn to_points(sample: &DataMatrix) -> Vec<P2> {
    sample.rows().map(|r| [r[0], r[1]]).collect()
}

/// `sorted` must be ascending.
fn univariate_hits(sorted: &[f64], x: f64) -> usize {
    let at_most = sorted.partition_point(|v| *v <= x);
    let at_least = sorted.len() - sorted.partition_point(|v| *v < x);
    at_most.min(at_least)
}

/// `min(#{X_i <= x}, #{X_i >= x}) / n`; ties at `x` count on both sides.
pub fn depth_univariate(sample: &DataMatrix, x: f64) -> Result<DepthValue> {
    check_dim(sample.ncols(), 1)?;
    let n = sample.nrows();
    let at_most = sample.as_slice().iter().filter(|v| **v <= x).count();
    let at_least = sample.as_slice().iter().filter(|v| **v >= x).count();
    Ok(DepthValue::new(at_most.min(at_least), n))
}

/// Exact planar depth by candidate-direction enumeration, O(n^2).
pub fn depth_exact_2d(sample: &DataMatrix, x: &[f64]) -> Result<DepthValue> {
    check_dim(sample.ncols(), 2)?;
    check_query(sample, x)?;
    let hits = planar::min_count_enumerate(&to_points(sample), [x[0], x[1]]);
    Ok(DepthValue::new(hits, sample.nrows()))
}

/// Exact planar depth by angular sweep, O(n log n). Always equal to
/// [`depth_exact_2d`].
pub fn depth_sweep_2d(sample: &DataMatrix, x: &[f64]) -> Result<DepthValue> {
    check_dim(sample.ncols(), 2)?;
    check_query(sample, x)?;
    let hits = planar::min_count_sweep(&to_points(sample), [x[0], x[1]]);
    Ok(DepthValue::new(hits, sample.nrows()))
}

/// `min over u in dirs of #{i : u.X_i <= u.x} / n`. Never below the exact depth.
pub fn depth_approx(sample: &DataMatrix, x: &[f64], dirs: &DirectionSet) -> Result<DepthValue> {
    check_query(sample, x)?;
    if dirs.dim() != sample.ncols() {
        return Err(Error::Shape(format!(
            "directions are {}-dimensional, sample is {}-dimensional",
            dirs.dim(),
            sample.ncols()
        )));
    }
    let hits = projection::min_count_direct(sample, x, dirs);
    Ok(DepthValue::new(hits, sample.nrows()))
}

/// The directions at which [`depth_exact_2d`] evaluates the half-plane count
/// at `x`: every critical angle plus the midpoint of each arc between
/// consecutive critical angles, as unit vectors.
pub fn candidate_directions_2d(sample: &DataMatrix, x: &[f64]) -> Result<DirectionSet> {
    check_dim(sample.ncols(), 2)?;
    check_query(sample, x)?;
    let dirs = planar::candidate_directions(&to_points(sample), [x[0], x[1]]);
    Ok(DirectionSet::from_unit_vectors_unchecked(
        2,
        dirs.into_iter().flatten().collect(),
    ))
}

/// Depth of one point. Random directions, when the method needs them, are
/// drawn from `rng` for this call only.
pub fn depth(
    sample: &DataMatrix,
    x: &[f64],
    method: DepthMethod,
    rng: &mut StreamRng,
) -> Result<DepthValue> {
    let plan = DepthPlan::resolve(method, sample.ncols(), rng)?;
    DepthFunction::new(sample, &plan)?.depth(x)
}

/// Depth at each row-major `d`-point of `eval_points`, sharing one resolved
/// plan (and therefore one direction set) across the batch.
pub fn depth_profile(
    sample: &DataMatrix,
    eval_points: &[f64],
    method: DepthMethod,
    rng: &mut StreamRng,
) -> Result<Vec<DepthValue>> {
    let plan = DepthPlan::resolve(method, sample.ncols(), rng)?;
    DepthFunction::new(sample, &plan)?.profile(eval_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> DataMatrix {
        DataMatrix::from_rows(rows).unwrap()
    }

    fn triangle() -> DataMatrix {
        mat(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]])
    }

    #[test]
    fn univariate_examples() {
        let s = mat(&[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0]]);
        assert_eq!(depth_univariate(&s, 3.0).unwrap(), DepthValue::new(3, 5));
        assert_eq!(depth_univariate(&s, 1.0).unwrap(), DepthValue::new(1, 5));
        assert_eq!(depth_univariate(&s, 0.0).unwrap().hits, 0);
        let ties = mat(&[&[1.0], &[2.0], &[2.0], &[2.0], &[9.0]]);
        assert_eq!(depth_univariate(&ties, 2.0).unwrap().hits, 4);
        assert!(depth_univariate(&triangle(), 0.0).is_err());
    }

    #[test]
    fn planar_examples() {
        let tri = triangle();
        let square = mat(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        for f in [depth_exact_2d, depth_sweep_2d] {
            assert_eq!(f(&tri, &[0.0, 0.0]).unwrap(), DepthValue::new(1, 3));
            assert_eq!(f(&square, &[0.0, 0.0]).unwrap(), DepthValue::new(1, 2));
            assert_eq!(f(&tri, &[5.0, 5.0]).unwrap().hits, 0);
        }
        let same = mat(&[&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(depth_sweep_2d(&same, &[0.5, 0.5]).unwrap().value(), 1.0);
        assert!(depth_sweep_2d(&tri, &[0.0]).is_err());
    }

    #[test]
    fn approx_with_candidate_set_is_exact() {
        let tri = triangle();
        let square = mat(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        for (s, x) in [
            (&tri, [0.0, 0.0]),
            (&square, [0.0, 0.0]),
            (&tri, [0.2, 0.3]),
        ] {
            let dirs = candidate_directions_2d(s, &x).unwrap();
            assert_eq!(
                depth_approx(s, &x, &dirs).unwrap(),
                depth_exact_2d(s, &x).unwrap()
            );
        }
    }

    #[test]
    fn approx_rejects_wrong_dimension() {
        let dirs = DirectionSet::new(3, vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            depth_approx(&triangle(), &[0.0, 0.0], &dirs),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn direction_set_validates_norms() {
        assert!(DirectionSet::new(2, vec![1.0, 1.0]).is_err());
        assert!(DirectionSet::new(2, vec![]).is_err());
        assert!(DirectionSet::new(2, vec![0.6, 0.8, 0.0, -1.0]).is_ok());
    }

    #[test]
    fn dispatch() {
        let mut rng = StreamRng::from_seed(1);
        let line = mat(&[&[1.0], &[2.0], &[3.0]]);
        assert_eq!(
            depth(&line, &[2.0], DepthMethod::Auto, &mut rng).unwrap(),
            depth_univariate(&line, 2.0).unwrap()
        );
        let cube = mat(&[
            &[0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
        ]);
        assert_eq!(
            depth(&cube, &[0.1, 0.1, 0.1], DepthMethod::Exact, &mut rng),
            Err(Error::UnsupportedDimension(3))
        );
        assert!(depth(&cube, &[0.1, 0.1, 0.1], DepthMethod::Auto, &mut rng).is_ok());
        let tri = triangle();
        assert_eq!(
            depth(&tri, &[0.1, 0.1], DepthMethod::Auto, &mut rng).unwrap(),
            depth_exact_2d(&tri, &[0.1, 0.1]).unwrap()
        );
        assert!(matches!(
            depth(
                &tri,
                &[0.1, 0.1],
                DepthMethod::Approx { directions: 0 },
                &mut rng
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn profile_of_triangle_and_empty() {
        let tri = triangle();
        let mut rng = StreamRng::from_seed(2);
        let prof = depth_profile(&tri, tri.as_slice(), DepthMethod::Auto, &mut rng).unwrap();
        assert_eq!(prof, vec![DepthValue::new(1, 3); 3]);
        assert!(depth_profile(&tri, &[], DepthMethod::Auto, &mut rng)
            .unwrap()
            .is_empty());
        assert!(depth_profile(&tri, &[1.0, 2.0, 3.0], DepthMethod::Auto, &mut rng).is_err());
    }

    #[test]
    fn depth_value_compares_as_rational() {
        assert_eq!(DepthValue::new(1, 2), DepthValue::new(50, 100));
        assert!(DepthValue::new(1, 3) < DepthValue::new(34, 100));
        assert_eq!(DepthValue::new(2, 5).to_string(), "2/5");
    }
}
