//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits with status 1 if any criterion fails.
//!
//! `cargo test -p ddd-core --test acceptance`
//!
//! Monte Carlo criteria use fixed seeds, so reruns print identical rates.

mod common;

use std::path::Path;
use std::time::Instant;

use common::brute_depth_2d;
use ddd_core::cli::cli_main;
use ddd_core::datasets::{iris_sepal, IRIS_SPECIES};
use ddd_core::distributions::sample_unit_sphere;
use ddd_core::hypothesis::{
    standardized_gof_test, ts_statistic_cvm, ts_statistic_ks, GofSpec, Statistic,
};
use ddd_core::simulation::{
    run_gof_cell, run_local_power_curve, run_twosample_cell, ExperimentSpec, Model, PowerEstimate,
};
use ddd_core::{
    depth_approx, depth_exact_2d, depth_sweep_2d, depth_univariate, sample, DataMatrix,
    ReferenceDistribution, StreamRng,
};
use rand::Rng;

const ALPHA: f64 = 0.05;
/// Evaluation grid size M for every Monte Carlo criterion. The library
/// default is 2000; power moves by less than its Monte Carlo error between
/// the two, and the smaller grid keeps the suite to minutes.
const GRID: usize = 250;
/// Bootstrap replicates B, the library default.
const BOOTSTRAP: usize = 200;

const C1_INSTANCES: usize = 1000;
const C1_MAX_SECONDS: f64 = 30.0;
const C2_PAIRS: usize = 10_000;
const C3_DIRECTIONS: usize = 5000;
const C3_MIN_FRACTION: f64 = 0.95;
const C4_SIZE_RANGE: (f64, f64) = (0.01, 0.11);
const C5_MIN_POWER: f64 = 0.9;
const C6_MIN_CVM: f64 = 0.9;
const C6_MIN_KS: f64 = 0.8;
const C7_SIZE_RANGE: (f64, f64) = (0.01, 0.12);
const C7_MIN_POWER: f64 = 0.95;
const C8_MIN_P: f64 = 0.05;
const C9_GAMMAS: [f64; 4] = [0.0, 2.0, 4.0, 6.0];
const C10_MAX_KOLMOGOROV: f64 = 0.12;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rates(cells: &[PowerEstimate]) -> String {
    cells
        .iter()
        .map(|c| format!("{}={:.3}", c.statistic, c.rejection_rate))
        .collect::<Vec<_>>()
        .join(" ")
}

fn rate(cells: &[PowerEstimate], stat: Statistic) -> f64 {
    cells
        .iter()
        .find(|c| c.statistic == stat)
        .expect("statistic present")
        .rejection_rate
}

fn gof_spec(model: Model, n: usize, reps: usize, bootstrap: usize, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        reps,
        bootstrap,
        grid_size: GRID,
        alpha: ALPHA,
        ..ExperimentSpec::new(model, 2, n, seed)
    }
}

/// 2-D instances with duplicates, collinear runs and sample-point queries.
fn random_instance(rng: &mut StreamRng) -> (Vec<[i64; 2]>, [i64; 2]) {
    let n = rng.random_range(1..=60);
    let span = rng.random_range(1..=20);
    let mut pts: Vec<[i64; 2]> = Vec::with_capacity(n);
    while pts.len() < n {
        match rng.random_range(0..4) {
            0 if !pts.is_empty() => pts.push(pts[rng.random_range(0..pts.len())]),
            1 => {
                let (a, b) = (rng.random_range(-2..=2), rng.random_range(-2..=2));
                let t = rng.random_range(-span..=span);
                pts.push([3 + a * t, -1 + b * t]);
            }
            _ => pts.push([
                rng.random_range(-span..=span),
                rng.random_range(-span..=span),
            ]),
        }
    }
    let q = if rng.random_bool(0.4) {
        pts[rng.random_range(0..n)]
    } else {
        [
            rng.random_range(-span..=span),
            rng.random_range(-span..=span),
        ]
    };
    (pts, q)
}

fn crit1() -> Outcome {
    let start = Instant::now();
    let mut rng = StreamRng::new(101, 0);
    let mut mismatches = 0;
    for _ in 0..C1_INSTANCES {
        let (pts, q) = random_instance(&mut rng);
        let flat: Vec<f64> = pts
            .iter()
            .flat_map(|p| [p[0] as f64, p[1] as f64])
            .collect();
        let x = DataMatrix::new(pts.len(), 2, flat).unwrap();
        let qf = [q[0] as f64, q[1] as f64];
        let sweep = depth_sweep_2d(&x, &qf).unwrap();
        let exact = depth_exact_2d(&x, &qf).unwrap();
        let oracle = brute_depth_2d(&pts, q);
        if sweep.hits != exact.hits || exact.hits != oracle || sweep.total != exact.total {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < C1_MAX_SECONDS,
        format!("{C1_INSTANCES} instances, {mismatches} mismatches, {secs:.2} s"),
    )
}

fn crit2() -> Outcome {
    let mut rng = StreamRng::new(102, 0);
    let mut mismatches = 0;
    for _ in 0..C2_PAIRS {
        let n = rng.random_range(1..=40);
        let values: Vec<f64> = (0..n)
            .map(|_| rng.random_range(-4..=4) as f64 / 2.0)
            .collect();
        let q = rng.random_range(-5..=5) as f64 / 2.0;
        let x = DataMatrix::new(n, 1, values.clone()).unwrap();
        let f = values.iter().filter(|v| **v <= q).count();
        let s = values.iter().filter(|v| **v >= q).count();
        let got = depth_univariate(&x, q).unwrap();
        if got.hits != f.min(s) || got.total != n {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{C2_PAIRS} pairs, {mismatches} mismatches"),
    )
}

fn crit3() -> Outcome {
    let n = 100;
    let law = ReferenceDistribution::standard_normal(2).unwrap();
    let x = sample(&law, n, &mut StreamRng::new(103, 0)).unwrap();
    let queries = sample(&law, 100, &mut StreamRng::new(103, 1)).unwrap();
    let dirs = sample_unit_sphere(2, C3_DIRECTIONS, &mut StreamRng::new(103, 2)).unwrap();
    let within = queries
        .rows()
        .filter(|q| {
            let gap = depth_approx(&x, q, &dirs).unwrap().hits as i64
                - depth_exact_2d(&x, q).unwrap().hits as i64;
            (0..=2).contains(&gap)
        })
        .count();
    let fraction = within as f64 / 100.0;
    outcome(
        fraction >= C3_MIN_FRACTION,
        format!("{within}/100 queries with gap in [0, 2/n]"),
    )
}

fn crit4() -> Outcome {
    let cells = run_gof_cell(&gof_spec(Model::A1, 100, 200, BOOTSTRAP, 104)).unwrap();
    let ok = cells
        .iter()
        .all(|c| (C4_SIZE_RANGE.0..=C4_SIZE_RANGE.1).contains(&c.rejection_rate));
    outcome(ok, format!("size {} (reps 200, B 200)", rates(&cells)))
}

fn crit5() -> Outcome {
    let cells = run_gof_cell(&gof_spec(Model::A5, 50, 100, BOOTSTRAP, 105)).unwrap();
    let ok = cells.iter().all(|c| c.rejection_rate >= C5_MIN_POWER);
    outcome(ok, format!("power {} (reps 100, B 200)", rates(&cells)))
}

fn crit6() -> Outcome {
    let cells = run_gof_cell(&gof_spec(Model::A2, 50, 100, BOOTSTRAP, 106)).unwrap();
    let ok = rate(&cells, Statistic::Cvm) >= C6_MIN_CVM && rate(&cells, Statistic::Ks) >= C6_MIN_KS;
    outcome(ok, format!("power {} (reps 100, B 200)", rates(&cells)))
}

fn crit7() -> Outcome {
    let spec = |mu: f64| ExperimentSpec {
        m: Some(100),
        ..gof_spec(Model::B { mu }, 100, 200, BOOTSTRAP, 107)
    };
    let size = run_twosample_cell(&spec(0.0)).unwrap();
    let power = run_twosample_cell(&spec(1.0)).unwrap();
    let ok = size
        .iter()
        .all(|c| (C7_SIZE_RANGE.0..=C7_SIZE_RANGE.1).contains(&c.rejection_rate))
        && power.iter().all(|c| c.rejection_rate >= C7_MIN_POWER);
    outcome(
        ok,
        format!("size {} | power at mu=1 {}", rates(&size), rates(&power)),
    )
}

fn crit8() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for species in IRIS_SPECIES {
        let x = iris_sepal(species).unwrap();
        let spec = GofSpec {
            bootstrap: 500,
            grid_size: GRID,
            ..GofSpec::new(
                ReferenceDistribution::standard_normal(2).unwrap(),
                Statistic::Ks,
                108,
            )
        };
        for r in standardized_gof_test(&x, &spec, &Statistic::ALL).unwrap() {
            ok &= r.p_value > C8_MIN_P;
            parts.push(format!("{species} {}: p={:.3}", r.statistic, r.p_value));
        }
    }
    outcome(ok, parts.join(", "))
}

fn crit9() -> Outcome {
    let reps = 200;
    let template = gof_spec(Model::A1, 100, reps, BOOTSTRAP, 109);
    let f0 = ReferenceDistribution::standard_normal(2).unwrap();
    let h = ReferenceDistribution::laplace(2).unwrap();
    let curve = run_local_power_curve(&C9_GAMMAS, &f0, &h, &template, false).unwrap();
    let sigma = |p: f64| (p * (1.0 - p) / reps as f64).sqrt();
    let mut ok = true;
    let mut text = Vec::new();
    for stat in Statistic::ALL {
        let r: Vec<f64> = curve.iter().map(|(_, cells)| rate(cells, stat)).collect();
        ok &= (r[0] - ALPHA).abs() <= 3.0 * sigma(ALPHA);
        for w in r.windows(2) {
            let s = (sigma(w[0]).powi(2) + sigma(w[1]).powi(2)).sqrt();
            ok &= w[1] >= w[0] - 2.0 * s;
        }
        let list: Vec<String> = r.iter().map(|v| format!("{v:.3}")).collect();
        text.push(format!("{stat} [{}]", list.join(", ")));
    }
    outcome(ok, format!("gamma 0,2,4,6: {}", text.join(" ")))
}

fn kolmogorov_to_uniform(p: &[f64]) -> f64 {
    let mut v = p.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let t = v[i];
        let mut j = i;
        while j < v.len() && v[j] == t {
            j += 1;
        }
        // Empirical CDF just below t and at t, against the uniform CDF t.
        worst = worst
            .max((i as f64 / n - t).abs())
            .max((j as f64 / n - t).abs());
        i = j;
    }
    worst
}

fn crit10() -> Outcome {
    let spec = ExperimentSpec {
        m: Some(50),
        ..gof_spec(Model::B { mu: 0.0 }, 50, 200, BOOTSTRAP, 110)
    };
    let cells = run_twosample_cell(&spec).unwrap();
    let dists: Vec<f64> = cells
        .iter()
        .map(|c| kolmogorov_to_uniform(&c.p_values))
        .collect();
    let ok = dists.iter().all(|d| *d <= C10_MAX_KOLMOGOROV);
    let text: Vec<String> = cells
        .iter()
        .zip(&dists)
        .map(|(c, d)| format!("{} {d:.3}", c.statistic))
        .collect();
    outcome(ok, format!("Kolmogorov distance {}", text.join(", ")))
}

/// Output of one CLI run with the timing block removed, or the raw bytes for
/// CSV output.
fn cli_payload(args: &[String], out: &Path) -> Option<Vec<u8>> {
    let argv = std::iter::once("ddd".to_string()).chain(args.iter().cloned());
    if cli_main(argv) != 0 {
        return None;
    }
    let bytes = std::fs::read(out).ok()?;
    match serde_json::from_slice::<serde_json::Value>(&bytes) {
        Ok(mut v) => {
            let obj = v.as_object_mut()?;
            obj.remove("timing");
            obj.remove("command");
            serde_json::to_vec(&v).ok()
        }
        Err(_) => Some(bytes),
    }
}

fn crit11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, x: &DataMatrix| {
        let p = dir.path().join(name);
        let mut s = String::from("a,b\n");
        for r in x.rows() {
            s.push_str(&format!("{:?},{:?}\n", r[0], r[1]));
        }
        std::fs::write(&p, s).unwrap();
        p.to_string_lossy().into_owned()
    };
    let law = ReferenceDistribution::standard_normal(2).unwrap();
    let x = write(
        "x.csv",
        &sample(&law, 40, &mut StreamRng::new(111, 0)).unwrap(),
    );
    let y = write(
        "y.csv",
        &sample(&law, 30, &mut StreamRng::new(111, 1)).unwrap(),
    );
    let small = ["--bootstrap", "20", "--directions", "60"];
    let commands: Vec<Vec<&str>> = vec![
        vec!["depth", &x, "--queries", &y],
        vec!["depth", &x, "--method", "approx:500"],
        vec!["ddd", "gof", &x, "--null", "t:4", "--ref-size", "400"],
        vec!["ddd", "twosample", &x, &y, "--bootstrap-band", "20"],
        [vec!["gof", &x, "--ref-size", "300"], small.to_vec()].concat(),
        [
            vec!["gof", &x, "--standardize", "--eval-grid", "pooled"],
            small.to_vec(),
        ]
        .concat(),
        [vec!["twosample", &x, &y, "--format", "csv"], small.to_vec()].concat(),
        [
            vec![
                "simulate", "--model", "b", "--mu", "0.5", "--n", "15", "--m", "15", "--reps", "4",
            ],
            small.to_vec(),
        ]
        .concat(),
        [
            vec![
                "simulate",
                "--model",
                "contiguous",
                "--gammas",
                "0,2",
                "--n",
                "15",
                "--reps",
                "3",
            ],
            small.to_vec(),
        ]
        .concat(),
    ];
    let out = dir.path().join("out");
    let out_s = out.to_string_lossy().into_owned();
    let mut failures = Vec::new();
    for cmd in &commands {
        let runs: Vec<Option<Vec<u8>>> = ["1", "8", "1"]
            .iter()
            .map(|threads| {
                let mut args: Vec<String> = cmd.iter().map(|s| s.to_string()).collect();
                args.extend(
                    ["--seed", "2024", "--threads", threads, "--out", &out_s]
                        .iter()
                        .map(|s| s.to_string()),
                );
                cli_payload(&args, &out)
            })
            .collect();
        if runs[0].is_none() || runs.iter().any(|r| r != &runs[0]) {
            failures.push(cmd[..cmd.len().min(2)].join(" "));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} commands x (threads 1, 8, 1); differing: [{}]",
            commands.len(),
            failures.join("; ")
        ),
    )
}

fn crit12() -> Outcome {
    let x = DataMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    let y = DataMatrix::from_rows(&[[2.0, 2.0], [3.0, 2.0], [2.0, 3.0]]).unwrap();
    let plan = ddd_core::DepthPlan::Planar;
    let cvm = ts_statistic_cvm(&x, &y, &plan).unwrap();
    let ks = ts_statistic_ks(&x, &y, &x.vstack(&y).unwrap(), &plan).unwrap();
    outcome(
        cvm == 2.0 / 3.0 && ks == 6f64.sqrt() / 3.0,
        format!("cvm={cvm:?} (2/3), ks={ks:?} (sqrt(6)/3)"),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("depth oracle equivalence", crit1),
        ("univariate closed form", crit2),
        ("approximation bound", crit3),
        ("size calibration, model A.1", crit4),
        ("power, heavy tail (A.5)", crit5),
        ("power, mixture (A.2)", crit6),
        ("two-sample size and power", crit7),
        ("iris plug-in test", crit8),
        ("local power curve", crit9),
        ("two-sample p-value calibration", crit10),
        ("CLI determinism", crit11),
        ("micro-case hand values", crit12),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!(
            "criterion {id:>2} {verdict} {name}: {} [{:.1} s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
