use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use ddd_ffi::*;

fn matrix(values: &[f64], n: usize, d: usize) -> *mut DddMatrix {
    let mut m = ptr::null_mut();
    let status = unsafe { ddd_matrix_new(values.as_ptr(), n, d, &mut m) };
    assert_eq!(status, DddStatus::Ok);
    m
}

fn last_error() -> String {
    let p = ddd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ddd_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn matrix_round_trip() {
    let vals = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let m = matrix(&vals, 3, 2);
    unsafe {
        assert_eq!(ddd_matrix_nrows(m), 3);
        assert_eq!(ddd_matrix_ncols(m), 2);
        let data = std::slice::from_raw_parts(ddd_matrix_data(m), 6);
        assert_eq!(data, &vals);
        ddd_matrix_free(m);
        ddd_matrix_free(ptr::null_mut());
        assert_eq!(ddd_matrix_nrows(ptr::null()), 0);
    }
}

#[test]
fn triangle_depths() {
    let tri = matrix(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0], 3, 2);
    let q = matrix(&[0.2, 0.2, 5.0, 5.0, 0.0, 0.0], 3, 2);
    let mut out = [f64::NAN; 3];
    let status = unsafe { ddd_depth(tri, q, DddMethod::Exact, 0, 0, out.as_mut_ptr(), 3) };
    assert_eq!(status, DddStatus::Ok);
    assert_eq!(out, [1.0 / 3.0, 0.0, 1.0 / 3.0]);
    unsafe {
        ddd_matrix_free(tri);
        ddd_matrix_free(q);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut m = ptr::null_mut();
    let bad = [1.0, f64::NAN];
    assert_eq!(
        unsafe { ddd_matrix_new(bad.as_ptr(), 1, 2, &mut m) },
        DddStatus::NonFinite
    );
    assert!(m.is_null());
    assert!(last_error().contains("non-finite"));

    assert_eq!(
        unsafe { ddd_matrix_new(ptr::null(), 2, 2, &mut m) },
        DddStatus::NullPointer
    );

    let spec = CString::new("no-such-law").unwrap();
    let mut dist = ptr::null_mut();
    let status = unsafe { ddd_distribution_parse(spec.as_ptr(), 2, &mut dist) };
    assert_ne!(status, DddStatus::Ok);
    assert!(dist.is_null());

    let one = matrix(&[0.0, 0.0, 1.0, 1.0], 2, 2);
    let q = matrix(&[0.0, 0.0, 1.0, 1.0], 2, 2);
    let mut out = [0.0; 1];
    let status = unsafe { ddd_depth(one, q, DddMethod::Exact, 0, 0, out.as_mut_ptr(), 1) };
    assert_eq!(status, DddStatus::Shape);

    let cube = matrix(&[0.0; 9], 3, 3);
    let q3 = matrix(&[0.0; 3], 1, 3);
    let status = unsafe { ddd_depth(cube, q3, DddMethod::Exact, 0, 0, out.as_mut_ptr(), 1) };
    assert_eq!(status, DddStatus::UnsupportedDimension);
    unsafe {
        for h in [one, q, cube, q3] {
            ddd_matrix_free(h);
        }
    }
}

#[test]
fn sample_and_test_are_seeded() {
    let spec = CString::new("standard-normal").unwrap();
    let mut dist = ptr::null_mut();
    assert_eq!(
        unsafe { ddd_distribution_parse(spec.as_ptr(), 2, &mut dist) },
        DddStatus::Ok
    );
    assert_eq!(unsafe { ddd_distribution_dim(dist) }, 2);

    let draw = |seed| {
        let mut x = ptr::null_mut();
        assert_eq!(unsafe { ddd_sample(dist, 40, seed, &mut x) }, DddStatus::Ok);
        x
    };
    let (x, x_again, y) = (draw(7), draw(7), draw(8));
    unsafe {
        let a = std::slice::from_raw_parts(ddd_matrix_data(x), 80);
        let b = std::slice::from_raw_parts(ddd_matrix_data(x_again), 80);
        assert_eq!(a, b);
    }

    let mut r1 = DddTestResult::default();
    let mut r2 = DddTestResult::default();
    unsafe {
        assert_eq!(
            ddd_gof_test(x, dist, DddStatistic::Ks, 100, 20, 3, &mut r1),
            DddStatus::Ok
        );
        assert_eq!(
            ddd_gof_test(x_again, dist, DddStatistic::Ks, 100, 20, 3, &mut r2),
            DddStatus::Ok
        );
    }
    assert_eq!(r1, r2);
    assert_eq!(r1.replicates, 20);
    assert!((0.0..=1.0).contains(&r1.p_value));
    assert_eq!(r1.p_value, r1.exceedances as f64 / 20.0);

    let mut ts = DddTestResult::default();
    unsafe {
        assert_eq!(
            ddd_twosample_test(x, y, DddStatistic::Cvm, 100, 20, 3, &mut ts),
            DddStatus::Ok
        );
    }
    assert!(ts.statistic > 0.0);
    unsafe {
        for h in [x, x_again, y] {
            ddd_matrix_free(h);
        }
        ddd_distribution_free(dist);
    }
}

#[test]
fn csv_reader() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    std::fs::write(&path, "a,b\n1,2\n3,4\n").unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { ddd_matrix_read_csv(cpath.as_ptr(), true, &mut m) },
        DddStatus::Ok
    );
    assert_eq!(unsafe { ddd_matrix_nrows(m) }, 2);
    unsafe { ddd_matrix_free(m) };

    let missing = CString::new(dir.path().join("none.csv").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { ddd_matrix_read_csv(missing.as_ptr(), true, &mut m) },
        DddStatus::Io
    );
}

#[test]
fn header_declares_the_api_and_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ddd.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "ddd_version",
        "ddd_last_error_message",
        "ddd_matrix_new",
        "ddd_matrix_free",
        "ddd_distribution_parse",
        "ddd_sample",
        "ddd_depth",
        "ddd_gof_test",
        "ddd_twosample_test",
        "typedef struct DddMatrix DddMatrix",
        "DDD_STATUS_NULL_POINTER = 1",
    ] {
        assert!(text.contains(name), "{name} missing from ddd.h");
    }

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"ddd.h\"\n\
         int main(void) {\n\
           DddMatrix *m = NULL; double v[2] = {0, 0}; DddTestResult r;\n\
           DddStatus s = ddd_matrix_new(v, 1, 2, &m);\n\
           (void)r; ddd_matrix_free(m); return s == DDD_STATUS_OK ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    {
        Ok(out) => assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        ),
        Err(_) => eprintln!("no C compiler on PATH; syntax check skipped"),
    }
}
