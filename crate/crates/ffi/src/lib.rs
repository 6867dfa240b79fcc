//! C ABI over the large scale structure toolkit. Workspaces travel as
//! JSON strings; live objects are opaque handles. Every function returns
//! an `LssStatus`; out-parameters are written only on `Ok`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use largescale::entourage::{delta_of_family, maximal_family_of_entourage};
use largescale::error::Error;
use largescale::higson::higson_defect;
use largescale::io::Workspace;
use largescale::laws::{run_laws, CaseSpec, LAW_IDS};
use largescale::metric::{chain_metric_equivalence, generate_chain, metrize};
use largescale::sets::PointSet;

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum LssStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Schema = 3,
    InvalidArgument = 4,
    Mismatch = 5,
    Internal = 6,
}

fn status_of(e: &Error) -> LssStatus {
    match e {
        Error::Schema(_) | Error::Json(_) => LssStatus::Schema,
        Error::UniverseMismatch => LssStatus::Mismatch,
        Error::InvalidArgument(_)
        | Error::InvalidMetric(_)
        | Error::InvalidChain(_)
        | Error::IndexOutOfRange { .. }
        | Error::UnknownLaw(_)
        | Error::SearchCapExceeded { .. } => LssStatus::InvalidArgument,
        Error::Io(_) => LssStatus::Internal,
    }
}

/// Opaque workspace handle.
pub struct LssWorkspace {
    inner: Workspace,
}

fn guarded(f: impl FnOnce() -> LssStatus) -> LssStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(LssStatus::Internal)
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, LssStatus> {
    if p.is_null() {
        return Err(LssStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| LssStatus::InvalidUtf8)
}

fn write_string(out: *mut *mut c_char, s: String) -> LssStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            LssStatus::Ok
        }
        Err(_) => LssStatus::Internal,
    }
}

/// Parses a JSON workspace into a handle. The handle must be released
/// with `lss_workspace_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lss_workspace_parse(
    json: *const c_char,
    out: *mut *mut LssWorkspace,
) -> LssStatus {
    guarded(|| {
        if out.is_null() {
            return LssStatus::NullPointer;
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Workspace::from_str(text) {
            Ok(ws) => {
                *out = Box::into_raw(Box::new(LssWorkspace { inner: ws }));
                LssStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Renders a workspace back to canonical JSON. The string must be
/// released with `lss_string_free`.
///
/// # Safety
/// `ws` must come from `lss_workspace_parse`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lss_workspace_to_json(
    ws: *const LssWorkspace,
    out: *mut *mut c_char,
) -> LssStatus {
    guarded(|| {
        if ws.is_null() || out.is_null() {
            return LssStatus::NullPointer;
        }
        write_string(out, (*ws).inner.to_json())
    })
}

/// # Safety
/// `ws` must come from `lss_workspace_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lss_workspace_free(ws: *mut LssWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// # Safety
/// `s` must come from an `lss_*` out-parameter and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Converts the named family to its entourage, returning a workspace
/// JSON holding the family, the entourage and round-trip diagnostics.
///
/// # Safety
/// Pointer contract as in `lss_workspace_to_json`; `name` is a valid
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lss_family_to_entourage(
    ws: *const LssWorkspace,
    name: *const c_char,
    out: *mut *mut c_char,
) -> LssStatus {
    guarded(|| {
        if ws.is_null() || out.is_null() {
            return LssStatus::NullPointer;
        }
        let name = match read_str(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let inner = &(*ws).inner;
        let run = || -> Result<String, Error> {
            let u = inner.resolve_universe()?;
            let fam = inner.family(name, &u)?;
            let e = delta_of_family(&fam);
            let round = delta_of_family(&maximal_family_of_entourage(&e));
            let mut out_ws = Workspace::default();
            out_ws.put_ground_set(&u);
            out_ws.put_family(name, &fam);
            out_ws.put_entourage("E", &e);
            out_ws.put_report(serde_json::json!({
                "round_trip_delta_identity": round == e,
            }));
            Ok(out_ws.to_json())
        };
        match run() {
            Ok(s) => write_string(out, s),
            Err(e) => status_of(&e),
        }
    })
}

/// Builds the depth-`depth` chain of the first family, the chain metric
/// and the equivalence report, returned as workspace JSON.
///
/// # Safety
/// Pointer contract as in `lss_workspace_to_json`.
#[no_mangle]
pub unsafe extern "C" fn lss_metrize(
    ws: *const LssWorkspace,
    depth: usize,
    out: *mut *mut c_char,
) -> LssStatus {
    guarded(|| {
        if ws.is_null() || out.is_null() {
            return LssStatus::NullPointer;
        }
        let inner = &(*ws).inner;
        let run = || -> Result<String, Error> {
            let u = inner.resolve_universe()?;
            let (name, seed) = inner.first_family(&u)?;
            let chain = generate_chain(&seed, depth)?;
            let d = metrize(&chain);
            let eq = chain_metric_equivalence(&chain, &d)?;
            let mut out_ws = Workspace::default();
            out_ws.put_ground_set(&u);
            out_ws.put_family(&name, &seed);
            out_ws.put_chain(&chain);
            out_ws.put_metric(&d);
            out_ws.put_report(serde_json::to_value(&eq)?);
            Ok(out_ws.to_json())
        };
        match run() {
            Ok(s) => write_string(out, s),
            Err(e) => status_of(&e),
        }
    })
}

/// Higson defect of function `f` over the first family with the final
/// exhaustion stage (or no truncation when the workspace has none).
///
/// # Safety
/// Pointer contract as in `lss_workspace_to_json`.
#[no_mangle]
pub unsafe extern "C" fn lss_higson_defect(
    ws: *const LssWorkspace,
    function_name: *const c_char,
    out: *mut f64,
) -> LssStatus {
    guarded(|| {
        if ws.is_null() || out.is_null() {
            return LssStatus::NullPointer;
        }
        let name = match read_str(function_name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let inner = &(*ws).inner;
        let run = || -> Result<f64, Error> {
            let u = inner.resolve_universe()?;
            let f = inner.function(name, &u)?;
            let (_, b) = inner.first_family(&u)?;
            let stage = inner
                .exhaustion_of(&u)
                .ok()
                .and_then(|ex| ex.stages().last().cloned())
                .unwrap_or_else(|| PointSet::empty(&u));
            higson_defect(&f, &b, &stage)
        };
        match run() {
            Ok(v) => {
                *out = v;
                LssStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Runs the full law suite with the given seed and 500 trials; writes the
/// JSON report and sets `all_pass`.
///
/// # Safety
/// `out_report` and `all_pass` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lss_run_laws(
    seed: u64,
    out_report: *mut *mut c_char,
    all_pass: *mut bool,
) -> LssStatus {
    guarded(|| {
        if out_report.is_null() || all_pass.is_null() {
            return LssStatus::NullPointer;
        }
        let run = || -> Result<(String, bool), Error> {
            let spec = CaseSpec::new(seed, 10, 3, 4, 500)?;
            let report = run_laws(&spec, LAW_IDS)?;
            Ok((serde_json::to_string_pretty(&report)?, report.all_pass))
        };
        match run() {
            Ok((s, pass)) => {
                *all_pass = pass;
                write_string(out_report, s)
            }
            Err(e) => status_of(&e),
        }
    })
}
