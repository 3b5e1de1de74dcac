//! Helpers shared by the integration tests.
#![allow(dead_code)]

use ddd_core::DataMatrix;
use proptest::prelude::*;

/// Integer point sets with coordinates in `-span..=span`. Small spans make
/// duplicates, ties and collinear triples common.
pub fn int_points(len: std::ops::Range<usize>, span: i64) -> impl Strategy<Value = Vec<[i64; 2]>> {
    prop::collection::vec((-span..=span, -span..=span).prop_map(|(a, b)| [a, b]), len)
}

pub fn matrix(pts: &[[i64; 2]]) -> DataMatrix {
    let flat: Vec<f64> = pts
        .iter()
        .flat_map(|p| [p[0] as f64, p[1] as f64])
        .collect();
    DataMatrix::new(pts.len(), 2, flat).unwrap()
}

/// Closed half-plane depth count of `q` by exhaustive search in exact
/// integer arithmetic.
///
/// The count `#{i : <u, p_i - q> >= 0}` is constant on the open arcs between
/// directions orthogonal to some offset, and never smaller at an arc
/// endpoint, so it suffices to look just to either side of every such
/// direction `c`. "Just beside" is decided lexicographically: the sign of
/// `<c, w>` first, then the sign of `<rot(c), w>` for the side being probed.
pub fn brute_depth_2d(pts: &[[i64; 2]], q: [i64; 2]) -> usize {
    let offsets: Vec<[i128; 2]> = pts
        .iter()
        .map(|p| [(p[0] - q[0]) as i128, (p[1] - q[1]) as i128])
        .collect();
    let dot = |a: [i128; 2], b: [i128; 2]| a[0] * b[0] + a[1] * b[1];
    let mut best = pts.len();
    for w in offsets.iter().filter(|w| **w != [0, 0]) {
        for c in [[-w[1], w[0]], [w[1], -w[0]]] {
            for side in [1i128, -1] {
                let rot = [-c[1] * side, c[0] * side];
                let count = offsets
                    .iter()
                    .filter(|v| {
                        let s = dot(c, **v);
                        s > 0 || (s == 0 && dot(rot, **v) >= 0)
                    })
                    .count();
                best = best.min(count);
            }
        }
    }
    best
}

#[test]
fn brute_force_hand_cases() {
    let tri = [[0, 0], [1, 0], [0, 1]];
    assert_eq!(brute_depth_2d(&tri, [0, 0]), 1);
    assert_eq!(brute_depth_2d(&tri, [5, 5]), 0);
    let square = [[0, 0], [2, 0], [0, 2], [2, 2]];
    assert_eq!(brute_depth_2d(&square, [1, 1]), 2);
    assert_eq!(brute_depth_2d(&[[3, 3]; 4], [3, 3]), 4);
}
