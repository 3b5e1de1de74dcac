//! Timing of the planar sweep: `cargo run --release --example bench_depth`.

use std::time::Instant;

use ddd_core::{sample, DepthFunction, DepthPlan, ReferenceDistribution, StreamRng};

fn main() {
    let mut rng = StreamRng::from_seed(1);
    let law = ReferenceDistribution::standard_normal(2).expect("valid law");
    let queries = 2000;
    for n in [50usize, 100, 1000, 5000] {
        let x = sample(&law, n, &mut rng).expect("sample");
        let q = sample(&law, queries, &mut rng).expect("queries");
        let f = DepthFunction::new(&x, &DepthPlan::Planar).expect("depth function");
        let start = Instant::now();
        let depths = f.profile(q.as_slice()).expect("profile");
        let per_query = start.elapsed().as_secs_f64() * 1e6 / queries as f64;
        let mean = depths.iter().map(|d| d.value()).sum::<f64>() / queries as f64;
        println!("n = {n:>5}: {per_query:8.2} us per query, mean depth {mean:.4}");
    }
}
