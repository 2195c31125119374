//! C ABI over greedy-lab.
//!
//! Every fallible function returns a [`GlStatus`]; on anything but `GL_STATUS_OK` the
//! message is available from [`gl_last_error_message`] on the same thread. Strings
//! handed out through `char **out` parameters are owned by the caller and released
//! with [`gl_string_free`]. Vectors use the `index:value,...` text form, values being
//! integers, fractions such as `-3/4`, or decimals.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use greedy_lab::cli::{resolve_mode, tga_record};
use greedy_lab::norms::dual_norm_polyhedral;
use greedy_lab::sampler::SamplerSpec;
use greedy_lab::verify::{filter_claims, find_claim, reproduce_examples, run_claim_in, ClaimOptions};
use greedy_lab::{norm, ArithmeticMode, EngineRegistry, Error, NormEngine, Rational, Scalar, SparseVector, TiePolicy, WeightSequence};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed vector, set, space or weight text, or an unknown name.
    Parse = 3,
    InvalidArgument = 4,
    OutsideWindow = 5,
    /// The engine has no exact evaluation; use the `_f64` variant.
    ModeUnsupported = 6,
    /// A claim that cannot run with the given space, weight or window.
    NotApplicable = 7,
    Internal = 8,
    Panic = 9,
}

/// A norm engine built from a space description such as `lp:2` or `spreading:3`.
pub struct GlEngine {
    inner: Box<dyn NormEngine>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GlStatus {
    match e {
        Error::InvalidIndex(_) | Error::DuplicateIndex(_) | Error::Parse { .. } | Error::Unknown { .. } | Error::Json(_) => GlStatus::Parse,
        Error::NonPositive { .. } | Error::EmptyExponents | Error::ExponentsNotIncreasing | Error::InvalidConfig { .. } => {
            GlStatus::InvalidArgument
        }
        Error::OutsideWindow { .. } | Error::WindowTooSmall { .. } => GlStatus::OutsideWindow,
        Error::ModeUnsupported { .. } => GlStatus::ModeUnsupported,
        Error::NotApplicable { .. } | Error::MissingConstant { .. } | Error::EmptyInstanceStream(_) => GlStatus::NotApplicable,
        Error::LinearProgram(_) | Error::Invariant(_) | Error::Io(_) => GlStatus::Internal,
    }
}

enum Failure {
    Lib(Error),
    Status(GlStatus, &'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(Error::Json(e))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GlStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg.to_string());
            s
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            GlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Status(GlStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(GlStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn engine_ref<'a>(e: *const GlEngine) -> Result<&'a dyn NormEngine, Failure> {
    e.as_ref()
        .map(|e| e.inner.as_ref())
        .ok_or(Failure::Status(GlStatus::NullPointer, "null engine"))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Status(GlStatus::NullPointer, "null output pointer"));
    }
    let c = CString::new(s).map_err(|_| Failure::Status(GlStatus::Internal, "output contains a nul byte"))?;
    *out = c.into_raw();
    Ok(())
}

/// Builds an engine; `space` takes the same forms as the command line (`lp:inf`,
/// `partial_sum@12`, `modular@10`, `modular:1,2,4`, or a JSON object).
///
/// # Safety
/// `space` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl_engine_new(space: *const c_char, out: *mut *mut GlEngine) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Status(GlStatus::NullPointer, "null output pointer"));
        }
        let inner = EngineRegistry::with_builtins().parse(text(space)?)?;
        *out = Box::into_raw(Box::new(GlEngine { inner }));
        Ok(())
    })
}

/// # Safety
/// `engine` must come from [`gl_engine_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gl_engine_free(engine: *mut GlEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Canonical name of the engine, e.g. `spreading:3`.
///
/// # Safety
/// `engine` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_engine_name(engine: *const GlEngine, out: *mut *mut c_char) -> GlStatus {
    guard(|| put_string(out, engine_ref(engine)?.name()))
}

/// Exact norm as a reduced fraction string.
///
/// # Safety
/// `engine` must be live, `vector` a valid C string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_norm(engine: *const GlEngine, vector: *const c_char, out: *mut *mut c_char) -> GlStatus {
    guard(|| {
        let e = engine_ref(engine)?;
        let x = SparseVector::<Rational>::decode(text(vector)?)?;
        put_string(out, norm(e, &x)?.encode())
    })
}

/// # Safety
/// `engine` must be live, `vector` a valid C string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_norm_f64(engine: *const GlEngine, vector: *const c_char, out: *mut f64) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Status(GlStatus::NullPointer, "null output pointer"));
        }
        let e = engine_ref(engine)?;
        let x = SparseVector::<f64>::decode(text(vector)?)?;
        *out = norm(e, &x)?;
        Ok(())
    })
}

/// Exact dual norm on a spreading engine, as a fraction string.
///
/// # Safety
/// `engine` must be live, `vector` a valid C string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_dual_norm(engine: *const GlEngine, vector: *const c_char, out: *mut *mut c_char) -> GlStatus {
    guard(|| {
        let e = engine_ref(engine)?;
        let s = e
            .as_spreading()
            .ok_or(Failure::Status(GlStatus::InvalidArgument, "the dual norm needs a spreading engine"))?;
        let f = SparseVector::<Rational>::decode(text(vector)?)?;
        put_string(out, dual_norm_polyhedral(s, &f)?.value.encode())
    })
}

/// Greedy sets of size `m` with approximants and residual norms, as JSON. `ties` is
/// `lowest-index` or `enumerate`; null means `lowest-index`. Exact where the engine allows.
///
/// # Safety
/// `engine` must be live, `vector` a valid C string, `ties` null or a valid C string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_tga_run(
    engine: *const GlEngine,
    vector: *const c_char,
    m: usize,
    ties: *const c_char,
    out: *mut *mut c_char,
) -> GlStatus {
    guard(|| {
        let e = engine_ref(engine)?;
        let vector = text(vector)?;
        let ties: TiePolicy = if ties.is_null() { TiePolicy::LowestIndex } else { text(ties)?.parse()? };
        let record = match resolve_mode(ArithmeticMode::Exact, e) {
            ArithmeticMode::Exact => tga_record::<Rational>(e, vector, m, ties)?,
            ArithmeticMode::Float => tga_record::<f64>(e, vector, m, ties)?,
        };
        put_string(out, serde_json::to_string(&record)?)
    })
}

/// Checks one claim and writes its report as JSON. `weight` null selects the claim's own
/// weight; `window` 0 selects the engine's window. `passed` may be null.
///
/// # Safety
/// `engine` must be live, `id` a valid C string, `weight` null or a valid C string,
/// `out` valid and `passed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn gl_verify_claim(
    engine: *const GlEngine,
    id: *const c_char,
    weight: *const c_char,
    window: usize,
    samples: usize,
    seed: u64,
    out: *mut *mut c_char,
    passed: *mut bool,
) -> GlStatus {
    guard(|| {
        let e = engine_ref(engine)?;
        let id = text(id)?;
        let claim = find_claim(id).ok_or_else(|| Error::Unknown {
            what: "claim",
            name: id.to_string(),
        })?;
        let w = WeightSequence::parse(if weight.is_null() { claim.default_weight } else { text(weight)? })?;
        let opts = ClaimOptions {
            window: (window > 0).then_some(window),
            samples,
            seed,
            sampler: SamplerSpec::with_seed(seed),
            ..ClaimOptions::default()
        };
        let report = run_claim_in(ArithmeticMode::Exact, claim, e, &w, &opts)?;
        put_string(out, serde_json::to_string(&report)?)?;
        if !passed.is_null() {
            *passed = report.passed;
        }
        Ok(())
    })
}

/// Recomputes the reference values of the example spaces; JSON report.
///
/// # Safety
/// `out` must be valid; `passed` null or valid.
#[no_mangle]
pub unsafe extern "C" fn gl_reproduce_examples(seed: u64, out: *mut *mut c_char, passed: *mut bool) -> GlStatus {
    guard(|| {
        let report = reproduce_examples(seed, 2000)?;
        put_string(out, serde_json::to_string(&report)?)?;
        if !passed.is_null() {
            *passed = report.passed;
        }
        Ok(())
    })
}

/// The claim registry as a JSON array, optionally restricted by id, alias or group.
///
/// # Safety
/// `filter` must be null or a valid C string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_list_claims(filter: *const c_char, out: *mut *mut c_char) -> GlStatus {
    guard(|| {
        let filter = if filter.is_null() { None } else { Some(text(filter)?) };
        let rows: Vec<serde_json::Value> = filter_claims(filter)
            .iter()
            .map(|c| serde_json::json!({ "id": c.id, "aliases": c.aliases, "group": c.group, "statement": c.statement }))
            .collect();
        put_string(out, serde_json::to_string(&rows)?)
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the next call
/// into this library on the same thread; do not free.
#[no_mangle]
pub extern "C" fn gl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static; do not free.
#[no_mangle]
pub extern "C" fn gl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
