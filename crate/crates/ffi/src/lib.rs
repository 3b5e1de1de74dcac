//! C ABI over `ddd-core`.
//!
//! Every fallible function returns a [`DddStatus`]. On failure the message
//! is kept per thread and can be read with [`ddd_last_error_message`].
//! Matrices and distributions are opaque handles owned by the caller and
//! released with their `_free` functions. Panics never cross the boundary;
//! they surface as `DDD_STATUS_INTERNAL`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ddd_core::hypothesis::{
    gof_test, twosample_test, GofSpec, Statistic, TestResult, TwoSampleSpec,
};
use ddd_core::io::{parse_null_spec, read_csv};
use ddd_core::{
    DataMatrix, DepthFunction, DepthMethod, DepthPlan, Error, ReferenceDistribution, StreamRng,
};

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DddStatus {
    Ok = 0,
    NullPointer = 1,
    Shape = 2,
    NonFinite = 3,
    InsufficientData = 4,
    NonInvertibleScatter = 5,
    UnsupportedDimension = 6,
    Parameter = 7,
    Precondition = 8,
    Parse = 9,
    Io = 10,
    Internal = 11,
}

/// How depth is computed.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DddMethod {
    /// Exact for d <= 2, random directions otherwise.
    Auto = 0,
    Exact = 1,
    Approx = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DddStatistic {
    Ks = 0,
    Cvm = 1,
}

/// Result of a bootstrap test.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DddTestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Replicates whose statistic exceeded the observed one.
    pub exceedances: usize,
    pub replicates: usize,
}

/// Row-major real matrix (opaque).
pub struct DddMatrix(DataMatrix);

/// Probability law that can be sampled and tested against (opaque).
pub struct DddDistribution(ReferenceDistribution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DddStatus {
    match err {
        Error::Shape(_) => DddStatus::Shape,
        Error::NonFinite { .. } => DddStatus::NonFinite,
        Error::InsufficientData(_) => DddStatus::InsufficientData,
        Error::NonInvertibleScatter { .. } => DddStatus::NonInvertibleScatter,
        Error::UnsupportedDimension(_) => DddStatus::UnsupportedDimension,
        Error::Parameter(_) | Error::DuplicateRow(_) => DddStatus::Parameter,
        Error::Precondition(_) => DddStatus::Precondition,
        Error::Parse { .. } => DddStatus::Parse,
        Error::Io(_) => DddStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DddStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DddStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is a null pointer"));
            DddStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            DddStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Core(Error::Parameter(format!("{what} is not UTF-8"))))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

fn method_of(method: DddMethod, directions: usize) -> DepthMethod {
    match method {
        DddMethod::Auto => DepthMethod::Auto,
        DddMethod::Exact => DepthMethod::Exact,
        DddMethod::Approx => DepthMethod::Approx { directions },
    }
}

fn statistic_of(s: DddStatistic) -> Statistic {
    match s {
        DddStatistic::Ks => Statistic::Ks,
        DddStatistic::Cvm => Statistic::Cvm,
    }
}

fn result_of(r: &TestResult) -> DddTestResult {
    DddTestResult {
        statistic: r.statistic_value,
        p_value: r.p_value,
        exceedances: r.exceedances,
        replicates: r.replicates.len(),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ddd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ddd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Copies `n * d` row-major values into a new matrix.
#[no_mangle]
pub unsafe extern "C" fn ddd_matrix_new(
    values: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut DddMatrix,
) -> DddStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let len = n
            .checked_mul(d)
            .ok_or_else(|| Error::Shape("n * d overflows".into()))?;
        let v = slice(values, len, "values")?.to_vec();
        emit(out, DddMatrix(DataMatrix::new(n, d, v)?));
        Ok(())
    })
}

/// Reads a numeric CSV file.
#[no_mangle]
pub unsafe extern "C" fn ddd_matrix_read_csv(
    path: *const c_char,
    has_header: bool,
    out: *mut *mut DddMatrix,
) -> DddStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let m = read_csv(text(path, "path")?, has_header)?;
        emit(out, DddMatrix(m));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ddd_matrix_free(m: *mut DddMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of rows, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ddd_matrix_nrows(m: *const DddMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.nrows())
}

/// Number of columns, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ddd_matrix_ncols(m: *const DddMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.ncols())
}

/// Borrowed pointer to the row-major values, valid while `m` lives.
#[no_mangle]
pub unsafe extern "C" fn ddd_matrix_data(m: *const DddMatrix) -> *const f64 {
    m.as_ref().map_or(ptr::null(), |m| m.0.as_slice().as_ptr())
}

/// Parses a distribution such as `standard-normal`, `t:3`, `cauchy`,
/// `laplace`, `normal:<mean>:<cov>` or `mixture:<w>@<spec>;...` in
/// dimension `d`.
#[no_mangle]
pub unsafe extern "C" fn ddd_distribution_parse(
    spec: *const c_char,
    d: usize,
    out: *mut *mut DddDistribution,
) -> DddStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let dist = parse_null_spec(text(spec, "spec")?, d)?;
        emit(out, DddDistribution(dist));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ddd_distribution_free(p: *mut DddDistribution) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Dimension of the distribution, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ddd_distribution_dim(p: *const DddDistribution) -> usize {
    p.as_ref().map_or(0, |p| p.0.dim())
}

/// Draws `n` rows from `dist` using stream `(seed, 0)`.
#[no_mangle]
pub unsafe extern "C" fn ddd_sample(
    dist: *const DddDistribution,
    n: usize,
    seed: u64,
    out: *mut *mut DddMatrix,
) -> DddStatus {
    guard(|| {
        let dist = deref(dist, "dist")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let m = ddd_core::sample(&dist.0, n, &mut StreamRng::new(seed, 0))?;
        emit(out, DddMatrix(m));
        Ok(())
    })
}

/// Depth of each row of `queries` with respect to `sample`, written to
/// `out_values[0..nrows(queries)]`. `directions` and `seed` only matter for
/// the approximate method.
#[no_mangle]
pub unsafe extern "C" fn ddd_depth(
    sample: *const DddMatrix,
    queries: *const DddMatrix,
    method: DddMethod,
    directions: usize,
    seed: u64,
    out_values: *mut f64,
    out_len: usize,
) -> DddStatus {
    guard(|| {
        let sample = &deref(sample, "sample")?.0;
        let queries = &deref(queries, "queries")?.0;
        if out_len < queries.nrows() {
            return Err(Error::Shape(format!(
                "output holds {out_len} values, {} needed",
                queries.nrows()
            ))
            .into());
        }
        if out_values.is_null() && queries.nrows() > 0 {
            return Err(Failure::Null("out_values"));
        }
        let plan = DepthPlan::resolve(
            method_of(method, directions),
            sample.ncols(),
            &mut StreamRng::new(seed, 0),
        )?;
        let depths = DepthFunction::new(sample, &plan)?.profile(queries.as_slice())?;
        for (i, v) in depths.iter().enumerate() {
            *out_values.add(i) = v.value();
        }
        Ok(())
    })
}

/// Bootstrap goodness-of-fit test of `x` against `f0`. `grid_size` is the
/// evaluation count M and `bootstrap` the replicate count B.
#[no_mangle]
pub unsafe extern "C" fn ddd_gof_test(
    x: *const DddMatrix,
    f0: *const DddDistribution,
    statistic: DddStatistic,
    grid_size: usize,
    bootstrap: usize,
    seed: u64,
    out: *mut DddTestResult,
) -> DddStatus {
    guard(|| {
        let x = &deref(x, "x")?.0;
        let f0 = &deref(f0, "f0")?.0;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let spec = GofSpec {
            grid_size,
            bootstrap,
            ..GofSpec::new(f0.clone(), statistic_of(statistic), seed)
        };
        *out = result_of(&gof_test(x, &spec)?);
        Ok(())
    })
}

/// Bootstrap two-sample test of `x` against `y`.
#[no_mangle]
pub unsafe extern "C" fn ddd_twosample_test(
    x: *const DddMatrix,
    y: *const DddMatrix,
    statistic: DddStatistic,
    grid_size: usize,
    bootstrap: usize,
    seed: u64,
    out: *mut DddTestResult,
) -> DddStatus {
    guard(|| {
        let x = &deref(x, "x")?.0;
        let y = &deref(y, "y")?.0;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let spec = TwoSampleSpec {
            grid_size,
            bootstrap,
            ..TwoSampleSpec::new(statistic_of(statistic), seed)
        };
        *out = result_of(&twosample_test(x, y, &spec)?);
        Ok(())
    })
}
