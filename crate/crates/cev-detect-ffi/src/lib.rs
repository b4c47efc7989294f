//! C ABI for the cev-detect library.
//!
//! Conventions:
//! - Handles (`CevdSample`, `CevdTraces`) are opaque; create them through
//!   the constructors and release them with the matching `_free` function.
//! - Every fallible function returns a [`CevdStatus`]; on failure a
//!   human-readable message is kept in thread-local storage and can be
//!   copied out with [`cevd_last_error_message`].
//! - Undefined statistic entries surface as NaN in output buffers.
//!
//! The header `include/cev_detect.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::os::raw::c_char;

use cev_detect::detection::{product_verdict, DetectionConfig, Verdict};
use cev_detect::models::{
    hillish_limit_ex2, kendall_limit_ex2, numeric_i_mustar, numeric_j_mustar,
    pickandsish_limit_ex2, simulate, ModelSpec, MuStarSpec,
};
use cev_detect::rank::{build_view, ranks_topk};
use cev_detect::statistics::{
    compute_traces, hillish_pair, kendall_tau, pickandsish, KGrid, TraceBundle,
};
use cev_detect::BivariateSample;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CevdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    BufferTooSmall = 4,
    ComputationFailed = 5,
}

/// Reference models available to [`cevd_sample_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CevdModel {
    /// X ~ N(0,1) independent of Y ~ Pareto(1).
    Example1 = 1,
    /// X ~ Pareto(rho), Z ~ Pareto(1-rho), Y = min(X, Z).
    Example2 = 2,
}

/// Fixed trace columns addressable through [`cevd_traces_column`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CevdColumn {
    K = 0,
    Hillish = 1,
    HillishNeg = 2,
    Kendall = 3,
}

/// Detection verdict codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CevdVerdict {
    NotCev = 0,
    CevProduct = 1,
    CevNonproduct = 2,
    Inconclusive = 3,
}

/// Detection thresholds; obtain defaults from
/// [`cevd_detection_config_default`] and adjust fields as needed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CevdDetectionConfig {
    pub window_lo_frac: f64,
    pub window_hi_frac: f64,
    pub window_width_frac: f64,
    pub rank_dispersion_threshold: f64,
    pub pickandsish_dispersion_threshold: f64,
    pub eps_hillish: f64,
    pub eps_pickandsish: f64,
    pub max_undefined_frac: f64,
}

impl From<CevdDetectionConfig> for DetectionConfig {
    fn from(c: CevdDetectionConfig) -> Self {
        DetectionConfig {
            window_lo_frac: c.window_lo_frac,
            window_hi_frac: c.window_hi_frac,
            window_width_frac: c.window_width_frac,
            rank_dispersion_threshold: c.rank_dispersion_threshold,
            pickandsish_dispersion_threshold: c.pickandsish_dispersion_threshold,
            eps_hillish: c.eps_hillish,
            eps_pickandsish: c.eps_pickandsish,
            max_undefined_frac: c.max_undefined_frac,
        }
    }
}

/// Opaque bivariate sample handle.
pub struct CevdSample {
    inner: BivariateSample,
}

/// Opaque trace-bundle handle (statistics over a k-grid).
pub struct CevdTraces {
    inner: TraceBundle,
    n: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: CevdStatus, msg: impl Into<String>) -> CevdStatus {
    set_error(msg);
    status
}

fn fail_with(err: cev_detect::Error) -> CevdStatus {
    let status = match err {
        cev_detect::Error::KOutOfRange { .. } => CevdStatus::OutOfRange,
        cev_detect::Error::QuadratureNotConverged { .. } => CevdStatus::ComputationFailed,
        _ => CevdStatus::InvalidArgument,
    };
    set_error(err.to_string());
    status
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn cevd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Build a sample from two arrays of length `len`.
///
/// # Safety
/// `xs` and `ys` must point to `len` readable f64 values; `out` must be a
/// valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn cevd_sample_new(
    xs: *const f64,
    ys: *const f64,
    len: usize,
    out: *mut *mut CevdSample,
) -> CevdStatus {
    if xs.is_null() || ys.is_null() || out.is_null() {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    let xs = std::slice::from_raw_parts(xs, len).to_vec();
    let ys = std::slice::from_raw_parts(ys, len).to_vec();
    match BivariateSample::new(xs, ys) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CevdSample { inner }));
            CevdStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Simulate a reference model (`rho` is ignored for `Example1`).
///
/// # Safety
/// `out` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn cevd_sample_simulate(
    model: CevdModel,
    rho: f64,
    n: usize,
    seed: u64,
    out: *mut *mut CevdSample,
) -> CevdStatus {
    if out.is_null() {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    let spec = match model {
        CevdModel::Example1 => ModelSpec::Example1,
        CevdModel::Example2 => ModelSpec::Example2 { rho },
    };
    match simulate(&spec, n, seed) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CevdSample { inner }));
            CevdStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Number of observations in a sample, or 0 for a null handle.
///
/// # Safety
/// `sample` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cevd_sample_len(sample: *const CevdSample) -> usize {
    if sample.is_null() {
        return 0;
    }
    (*sample).inner.n()
}

/// Release a sample handle (null is a no-op).
///
/// # Safety
/// `sample` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn cevd_sample_free(sample: *mut CevdSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// One-shot statistics at a single k: Hillish on (X,Y) and (-X,Y),
/// Kendall's tau, and Pickandsish at probe `p` (NaN when undefined).
///
/// # Safety
/// All pointers must be valid; `sample` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cevd_statistics_at_k(
    sample: *const CevdSample,
    k: usize,
    p: f64,
    out_hillish: *mut f64,
    out_hillish_neg: *mut f64,
    out_kendall: *mut f64,
    out_pickandsish: *mut f64,
) -> CevdStatus {
    if sample.is_null()
        || out_hillish.is_null()
        || out_hillish_neg.is_null()
        || out_kendall.is_null()
        || out_pickandsish.is_null()
    {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    let view = build_view(&(*sample).inner);
    let (h, hn) = match hillish_pair(&view, k) {
        Ok(v) => v,
        Err(e) => return fail_with(e),
    };
    let tau = match ranks_topk(&view, k).and_then(|r| kendall_tau(&r)) {
        Ok(v) => v,
        Err(e) => return fail_with(e),
    };
    let pick = match pickandsish(&view, k, p) {
        Ok(v) => v,
        Err(e) => return fail_with(e),
    };
    *out_hillish = h;
    *out_hillish_neg = hn;
    *out_kendall = tau;
    *out_pickandsish = pick.unwrap_or(f64::NAN);
    CevdStatus::Ok
}

/// Compute all statistic traces over a k-grid with the given Pickandsish
/// probe levels.
///
/// # Safety
/// `ks` must point to `ks_len` values, `ps` to `ps_len` values; `sample`
/// must be a live handle and `out` a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn cevd_traces_compute(
    sample: *const CevdSample,
    ks: *const usize,
    ks_len: usize,
    ps: *const f64,
    ps_len: usize,
    out: *mut *mut CevdTraces,
) -> CevdStatus {
    if sample.is_null() || ks.is_null() || ps.is_null() || out.is_null() {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    let ks = std::slice::from_raw_parts(ks, ks_len).to_vec();
    let ps = std::slice::from_raw_parts(ps, ps_len).to_vec();
    let sample = &(*sample).inner;
    let grid = match KGrid::new(ks) {
        Ok(g) => g,
        Err(e) => return fail_with(e),
    };
    match compute_traces(sample, &grid, &ps) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CevdTraces {
                inner,
                n: sample.n(),
            }));
            CevdStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Grid length of a trace bundle, or 0 for a null handle.
///
/// # Safety
/// `traces` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cevd_traces_len(traces: *const CevdTraces) -> usize {
    if traces.is_null() {
        return 0;
    }
    (*traces).inner.kgrid.len()
}

/// Number of Pickandsish probe levels carried by the bundle.
///
/// # Safety
/// `traces` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cevd_traces_num_probes(traces: *const CevdTraces) -> usize {
    if traces.is_null() {
        return 0;
    }
    (*traces).inner.p_values.len()
}

/// Probe level at `index` (ascending order).
///
/// # Safety
/// `traces` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cevd_traces_probe(
    traces: *const CevdTraces,
    index: usize,
    out: *mut f64,
) -> CevdStatus {
    if traces.is_null() || out.is_null() {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    let bundle = &(*traces).inner;
    match bundle.p_values.get(index) {
        Some(&p) => {
            *out = p;
            CevdStatus::Ok
        }
        None => fail(CevdStatus::OutOfRange, format!("no probe {index}")),
    }
}

/// Copy one fixed column of the trace bundle into `buf`.
///
/// # Safety
/// `buf` must hold at least `buf_len` f64 slots; `traces` must be live.
#[no_mangle]
pub unsafe extern "C" fn cevd_traces_column(
    traces: *const CevdTraces,
    column: CevdColumn,
    buf: *mut f64,
    buf_len: usize,
) -> CevdStatus {
    if traces.is_null() || buf.is_null() {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    let bundle = &(*traces).inner;
    let g = bundle.kgrid.len();
    if buf_len < g {
        return fail(
            CevdStatus::BufferTooSmall,
            format!("need {g} slots, got {buf_len}"),
        );
    }
    let out = std::slice::from_raw_parts_mut(buf, g);
    match column {
        CevdColumn::K => {
            for (dst, &k) in out.iter_mut().zip(bundle.kgrid.values()) {
                *dst = k as f64;
            }
        }
        CevdColumn::Hillish => out.copy_from_slice(&bundle.hillish),
        CevdColumn::HillishNeg => out.copy_from_slice(&bundle.hillish_neg),
        CevdColumn::Kendall => out.copy_from_slice(&bundle.kendall),
    }
    CevdStatus::Ok
}

/// Copy the Pickandsish trace for probe `probe_index` into `buf`;
/// undefined entries become NaN.
///
/// # Safety
/// `buf` must hold at least `buf_len` f64 slots; `traces` must be live.
#[no_mangle]
pub unsafe extern "C" fn cevd_traces_pickandsish(
    traces: *const CevdTraces,
    probe_index: usize,
    buf: *mut f64,
    buf_len: usize,
) -> CevdStatus {
    if traces.is_null() || buf.is_null() {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    let bundle = &(*traces).inner;
    let g = bundle.kgrid.len();
    if buf_len < g {
        return fail(
            CevdStatus::BufferTooSmall,
            format!("need {g} slots, got {buf_len}"),
        );
    }
    match bundle.pickandsish.get(probe_index) {
        Some((_, trace)) => {
            let out = std::slice::from_raw_parts_mut(buf, g);
            for (dst, v) in out.iter_mut().zip(trace) {
                *dst = v.unwrap_or(f64::NAN);
            }
            CevdStatus::Ok
        }
        None => fail(CevdStatus::OutOfRange, format!("no probe {probe_index}")),
    }
}

/// Release a trace handle (null is a no-op).
///
/// # Safety
/// `traces` must have been produced by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn cevd_traces_free(traces: *mut CevdTraces) {
    if !traces.is_null() {
        drop(Box::from_raw(traces));
    }
}

/// Default detection thresholds.
#[no_mangle]
pub extern "C" fn cevd_detection_config_default() -> CevdDetectionConfig {
    let d = DetectionConfig::default();
    CevdDetectionConfig {
        window_lo_frac: d.window_lo_frac,
        window_hi_frac: d.window_hi_frac,
        window_width_frac: d.window_width_frac,
        rank_dispersion_threshold: d.rank_dispersion_threshold,
        pickandsish_dispersion_threshold: d.pickandsish_dispersion_threshold,
        eps_hillish: d.eps_hillish,
        eps_pickandsish: d.eps_pickandsish,
        max_undefined_frac: d.max_undefined_frac,
    }
}

/// Run detection on a trace bundle; `config` may be null for defaults.
/// The bundle must carry at least two Pickandsish probe levels.
///
/// # Safety
/// `traces` must be live; `out` must be valid; `config` null or valid.
#[no_mangle]
pub unsafe extern "C" fn cevd_product_verdict(
    traces: *const CevdTraces,
    config: *const CevdDetectionConfig,
    out: *mut CevdVerdict,
) -> CevdStatus {
    if traces.is_null() || out.is_null() {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    let cfg: DetectionConfig = if config.is_null() {
        DetectionConfig::default()
    } else {
        (*config).into()
    };
    let t = &*traces;
    match product_verdict(&t.inner, t.n, &cfg) {
        Ok(v) => {
            *out = match v.verdict {
                Verdict::NotCev => CevdVerdict::NotCev,
                Verdict::CevProduct => CevdVerdict::CevProduct,
                Verdict::CevNonproduct => CevdVerdict::CevNonproduct,
                Verdict::Inconclusive => CevdVerdict::Inconclusive,
            };
            CevdStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

unsafe fn write_result(out: *mut f64, r: cev_detect::Result<f64>) -> CevdStatus {
    if out.is_null() {
        return fail(CevdStatus::NullPointer, "null pointer argument");
    }
    match r {
        Ok(v) => {
            *out = v;
            CevdStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Closed-form Hillish limit constant of the example2 model.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cevd_hillish_limit_ex2(rho: f64, out: *mut f64) -> CevdStatus {
    write_result(out, hillish_limit_ex2(rho))
}

/// Closed-form Pickandsish limit constant of the example2 model.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cevd_pickandsish_limit_ex2(rho: f64, p: f64, out: *mut f64) -> CevdStatus {
    write_result(out, pickandsish_limit_ex2(rho, p))
}

/// Closed-form Kendall limit constant of the example2 model.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cevd_kendall_limit_ex2(rho: f64, out: *mut f64) -> CevdStatus {
    write_result(out, kendall_limit_ex2(rho))
}

fn mustar_for(model: CevdModel, rho: f64) -> cev_detect::Result<MuStarSpec> {
    match model {
        CevdModel::Example1 => Ok(MuStarSpec::product()),
        CevdModel::Example2 => MuStarSpec::example2(rho),
    }
}

/// Quadrature value of the Hillish limit constant I for a reference model
/// (`rho` is ignored for `Example1`).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cevd_numeric_i_mustar(
    model: CevdModel,
    rho: f64,
    tol: f64,
    out: *mut f64,
) -> CevdStatus {
    write_result(
        out,
        mustar_for(model, rho).and_then(|s| numeric_i_mustar(&s, tol)),
    )
}

/// Quadrature value of the Kendall limit constant J for a reference model
/// (`rho` is ignored for `Example1`).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cevd_numeric_j_mustar(
    model: CevdModel,
    rho: f64,
    tol: f64,
    out: *mut f64,
) -> CevdStatus {
    write_result(
        out,
        mustar_for(model, rho).and_then(|s| numeric_j_mustar(&s, tol)),
    )
}
