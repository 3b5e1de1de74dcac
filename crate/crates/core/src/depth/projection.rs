//! Depth restricted to a finite set of directions.

use std::sync::Arc;

use super::DirectionSet;
use crate::data::DataMatrix;

/// Above this many stored projections the index falls back to recomputing
/// projections per query (64 MiB of `f64`).
const MAX_INDEXED_PROJECTIONS: usize = 1 << 23;

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn min_count_direct(sample: &DataMatrix, x: &[f64], dirs: &DirectionSet) -> usize {
    dirs.iter()
        .map(|u| {
            let ux = dot(u, x);
            sample.rows().filter(|row| dot(u, row) <= ux).count()
        })
        .min()
        .unwrap_or(sample.nrows())
}

/// Sorted projections of a sample on every direction, so each query costs
/// one binary search per direction.
#[derive(Debug, Clone)]
pub(crate) struct ProjectedIndex {
    dirs: Arc<DirectionSet>,
    sample: Option<DataMatrix>,
    sorted: Vec<f64>,
    n: usize,
}

impl ProjectedIndex {
    pub(crate) fn new(sample: &DataMatrix, dirs: Arc<DirectionSet>) -> Self {
        let n = sample.nrows();
        if dirs.len().saturating_mul(n) > MAX_INDEXED_PROJECTIONS {
            return ProjectedIndex {
                dirs,
                sample: Some(sample.clone()),
                sorted: Vec::new(),
                n,
            };
        }
        let mut sorted = Vec::with_capacity(dirs.len() * n);
        for u in dirs.iter() {
            let start = sorted.len();
            sorted.extend(sample.rows().map(|row| dot(u, row)));
            sorted[start..].sort_unstable_by(f64::total_cmp);
        }
        ProjectedIndex {
            dirs,
            sample: None,
            sorted,
            n,
        }
    }

    pub(crate) fn min_count(&self, x: &[f64]) -> usize {
        if let Some(sample) = &self.sample {
            return min_count_direct(sample, x, &self.dirs);
        }
        self.dirs
            .iter()
            .zip(self.sorted.chunks_exact(self.n))
            .map(|(u, proj)| {
                let ux = dot(u, x);
                proj.partition_point(|p| *p <= ux)
            })
            .min()
            .unwrap_or(self.n)
    }
}
