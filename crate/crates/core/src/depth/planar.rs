//! Exact half-plane depth in two dimensions.
//!
//! Both engines work on the offsets `v_i = X_i - x`. Offsets equal to zero lie
//! on every boundary line through `x` and are counted in every closed
//! half-plane. For the rest, the closed count `#{i : u.v_i >= 0}` is a
//! piecewise-constant function of the direction `u` that jumps only where
//! `u` is orthogonal to some `v_i`, and its minimum is attained on the open
//! arcs between those critical directions.
//!
//! All branching goes through the exact orientation predicate, so the two
//! engines agree combinatorially on any input, including ties, collinear
//! points and duplicates.

use std::cmp::Ordering;

use robust::Coord;

pub(crate) type P2 = [f64; 2];

const ORIGIN: Coord<f64> = Coord { x: 0.0, y: 0.0 };

/// Relative error bound of the naive 2x2 determinant (Shewchuk's
/// `ccwerrboundA`).
const CROSS_ERR_BOUND: f64 = (3.0 + 16.0 * f64::EPSILON / 2.0) * f64::EPSILON / 2.0;

/// Exact sign of `a.x * b.y - a.y * b.x`.
#[inline]
pub(crate) fn cross_sign(a: P2, b: P2) -> i32 {
    let left = a[0] * b[1];
    let right = a[1] * b[0];
    let det = left - right;
    let sum = left.abs() + right.abs();
    let bound = CROSS_ERR_BOUND * sum;
    if sum < 1e-280 {
        // the relative bound does not hold for subnormal products
        return cross_sign_exact(a, b);
    }
    if det > bound {
        return 1;
    }
    if -det > bound {
        return -1;
    }
    cross_sign_exact(a, b)
}

#[cold]
fn cross_sign_exact(a: P2, b: P2) -> i32 {
    let det = robust::orient2d(
        Coord { x: a[0], y: a[1] },
        Coord { x: b[0], y: b[1] },
        ORIGIN,
    );
    if det > 0.0 {
        1
    } else if det < 0.0 {
        -1
    } else {
        0
    }
}

/// Exact sign of `a . b`, written as `cross(a, rot90(b))`.
#[inline]
pub(crate) fn dot_sign(a: P2, b: P2) -> i32 {
    cross_sign(a, [-b[1], b[0]])
}

/// 0 for angles in `[0, pi)`, 1 for `[pi, 2 pi)`. `v` must be non-zero.
#[inline]
fn half(v: P2) -> u8 {
    if v[1] > 0.0 || (v[1] == 0.0 && v[0] > 0.0) {
        0
    } else {
        1
    }
}

/// Exact counter-clockwise angular order starting at the positive x axis.
#[inline]
fn angle_cmp(a: P2, b: P2) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| match cross_sign(a, b) {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    })
}

/// Monotone stand-in for the polar angle on `[0, 4)`. Only used to get a
/// nearly sorted order cheaply; [`angle_cmp`] has the final word.
#[inline]
fn pseudo_angle(v: P2) -> f64 {
    let p = v[1] / (v[0].abs() + v[1].abs());
    if v[0] < 0.0 {
        2.0 - p
    } else if v[1] < 0.0 {
        4.0 + p
    } else {
        p
    }
}

fn split_offsets(sample: &[P2], x: P2) -> (usize, Vec<P2>) {
    let mut zeros = 0;
    let mut offsets = Vec::with_capacity(sample.len());
    for p in sample {
        let v = [p[0] - x[0], p[1] - x[1]];
        if v[0] == 0.0 && v[1] == 0.0 {
            zeros += 1;
        } else {
            offsets.push(v);
        }
    }
    (zeros, offsets)
}

/// Minimum closed half-plane count by candidate-direction enumeration, O(n^2).
///
/// For every offset `a` the directions `u = +-perp(a)` are critical. The count
/// is evaluated at each of them and on the open arc immediately
/// counter-clockwise of each, which visits every constancy arc.
pub(crate) fn min_count_enumerate(sample: &[P2], x: P2) -> usize {
    let (zeros, offsets) = split_offsets(sample, x);
    if offsets.is_empty() {
        return zeros;
    }
    let mut best = sample.len();
    for &a in &offsets {
        for s in [1, -1] {
            // u = s * perp(a):   u.b = s * cross(a, b)
            // perp(u) = -s * a:  perp(u).b = -s * dot(a, b)
            let mut closed = zeros;
            let mut after = zeros;
            for &b in &offsets {
                let c = s * cross_sign(a, b);
                if c > 0 {
                    closed += 1;
                    after += 1;
                } else if c == 0 {
                    closed += 1;
                    if -s * dot_sign(a, b) > 0 {
                        after += 1;
                    }
                }
            }
            best = best.min(closed).min(after);
        }
    }
    best
}

/// Minimum closed half-plane count by an angular sweep, O(n log n).
///
/// With the offsets sorted by angle, the count on the open arc just past a
/// critical direction equals the number of offsets in a half-open half-turn
/// `(t, t + pi]` where `t` is an offset angle or its antipode. The half-turn
/// ending of each group is found with a single forward-moving pointer.
pub(crate) fn min_count_sweep(sample: &[P2], x: P2) -> usize {
    let (zeros, mut offsets) = split_offsets(sample, x);
    let m = offsets.len();
    if m == 0 {
        return zeros;
    }
    sort_by_angle(&mut offsets);

    let in_half_turn = |a: P2, b: P2| match cross_sign(a, b) {
        1 => true,
        0 => half(a) != half(b),
        _ => false,
    };

    let mut best = m;
    let mut end = 0usize;
    let mut k = 0usize;
    while k < m {
        let head = offsets[k];
        let mut group_end = k + 1;
        while group_end < m && angle_cmp(head, offsets[group_end]) == Ordering::Equal {
            group_end += 1;
        }
        end = end.max(group_end);
        while end < k + m && in_half_turn(head, offsets[if end >= m { end - m } else { end }]) {
            end += 1;
        }
        let ahead = end - group_end;
        best = best.min(ahead).min(m - ahead);
        k = group_end;
    }
    zeros + best
}

fn sort_by_angle(v: &mut [P2]) {
    if v.len() <= 1 << 16 {
        // Quantized pseudo-angle in the high 48 bits, index in the low 16.
        let mut keys: Vec<u64> = v
            .iter()
            .enumerate()
            .map(|(i, p)| (((pseudo_angle(*p) * (1u64 << 46) as f64) as u64) << 16) | i as u64)
            .collect();
        keys.sort_unstable();
        let src = v.to_vec();
        for (slot, k) in v.iter_mut().zip(keys) {
            *slot = src[(k & 0xffff) as usize];
        }
    } else {
        v.sort_unstable_by(|a, b| pseudo_angle(*a).total_cmp(&pseudo_angle(*b)));
    }
    // Insertion pass under the exact order; linear unless rounding in the
    // pseudo-angle misplaced nearly parallel offsets.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && angle_cmp(v[j - 1], v[j]) == Ordering::Greater {
            v.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// Unit directions at every critical angle of the count function at `x` and at
/// the midpoint of each pair of angularly consecutive critical angles.
pub(crate) fn candidate_directions(sample: &[P2], x: P2) -> Vec<P2> {
    let (_, offsets) = split_offsets(sample, x);
    if offsets.is_empty() {
        return vec![[1.0, 0.0], [-1.0, 0.0]];
    }
    let mut angles: Vec<f64> = offsets
        .iter()
        .flat_map(|v| {
            let t = v[1].atan2(v[0]);
            [
                t + std::f64::consts::FRAC_PI_2,
                t - std::f64::consts::FRAC_PI_2,
            ]
        })
        .map(|t| t.rem_euclid(std::f64::consts::TAU))
        .collect();
    angles.sort_unstable_by(f64::total_cmp);
    angles.dedup();
    let k = angles.len();
    let mut dirs = Vec::with_capacity(2 * k);
    for i in 0..k {
        let t = angles[i];
        let next = if i + 1 < k {
            angles[i + 1]
        } else {
            angles[0] + std::f64::consts::TAU
        };
        let mid = 0.5 * (t + next);
        dirs.push([t.cos(), t.sin()]);
        dirs.push([mid.cos(), mid.sin()]);
    }
    dirs
}
