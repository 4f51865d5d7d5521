//! C interface to the `scas` engine.
//!
//! Models and enumerators are opaque heap handles released with their
//! `*_free` function. Every fallible call returns a [`ScasStatus`]; on
//! failure [`scas_last_error`] describes the problem. Strings handed out by
//! the library are NUL-terminated UTF-8 and must be released with
//! [`scas_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use scas::engine::{self, ConfigurationIter, EnumerateOptions, LayerKey};
use scas::report::{Report, ScopeReport};
use scas::selfconfig::{self, RequirementSet};
use scas::{Configuration, EngineError, FeatureId, FeatureModel, SelfConfigError, SourceFormat};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScasStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The model text could not be parsed or violates a structural rule.
    ParseError = 3,
    UnknownFeature = 4,
    ScopeTooLarge = 5,
    /// No valid configuration meets the requirements.
    Infeasible = 6,
    /// The scope has no valid configuration or the model lacks layer tags.
    EngineError = 7,
    InvalidArgument = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScasFormat {
    Xml = 0,
    ArcTable = 1,
}

/// Parsed feature model.
pub struct ScasModel {
    model: Arc<FeatureModel>,
    source: Vec<u8>,
}

/// Lazy stream of the valid configurations of one scope.
pub struct ScasEnumerator {
    // Declared before `_model` so it is dropped first.
    iter: ConfigurationIter<'static>,
    _model: Arc<FeatureModel>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<Vec<u8>>) {
    let mut bytes = message.into();
    bytes.retain(|&b| b != 0);
    let message = CString::new(bytes).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

struct Failure(ScasStatus, String);

type FfiResult<T> = Result<T, Failure>;

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let status = match e {
            EngineError::UnknownFeature(_) | EngineError::OutOfScope { .. } => ScasStatus::UnknownFeature,
            EngineError::ScopeTooLarge { .. } => ScasStatus::ScopeTooLarge,
            _ => ScasStatus::EngineError,
        };
        Failure(status, e.to_string())
    }
}

impl From<SelfConfigError> for Failure {
    fn from(e: SelfConfigError) -> Self {
        match e {
            SelfConfigError::Engine(e) => e.into(),
            SelfConfigError::Contradictory(_) | SelfConfigError::NoValidConfiguration(_) => {
                Failure(ScasStatus::Infeasible, e.to_string())
            }
            SelfConfigError::BadWeight { .. } => Failure(ScasStatus::InvalidArgument, e.to_string()),
        }
    }
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> FfiResult<()>) -> ScasStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            ScasStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ScasStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> FfiResult<()> {
    if p.is_null() {
        Err(Failure(ScasStatus::NullArgument, format!("`{what}` is NULL")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be NULL or a valid NUL-terminated string.
unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Failure(ScasStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

/// # Safety
/// `p` must be a valid NUL-terminated string.
unsafe fn req_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    non_null(p, what)?;
    Ok(opt_str(p, what)?.expect("checked"))
}

/// # Safety
/// `m` must be a live model handle.
unsafe fn model_ref_handle<'a>(m: *const ScasModel) -> FfiResult<&'a ScasModel> {
    non_null(m, "model")?;
    Ok(&*m)
}

/// # Safety
/// `m` must be a live model handle.
unsafe fn model_ref<'a>(m: *const ScasModel) -> FfiResult<&'a FeatureModel> {
    non_null(m, "model")?;
    Ok(&(*m).model)
}

/// # Safety
/// `out` must be valid for writes.
unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    let c = CString::new(s).map_err(|_| Failure(ScasStatus::InvalidArgument, "output holds a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn resolve(model: &FeatureModel, token: &str) -> FfiResult<FeatureId> {
    model.resolve(token).cloned().ok_or_else(|| EngineError::UnknownFeature(FeatureId::new(token)).into())
}

fn scope_of(model: &FeatureModel, scope: Option<&str>) -> FfiResult<FeatureId> {
    match scope {
        Some(s) => resolve(model, s),
        None => Ok(model.root().id.clone()),
    }
}

fn token_list(model: &FeatureModel, csv: Option<&str>) -> FfiResult<Vec<FeatureId>> {
    csv.map_or(Ok(Vec::new()), |csv| {
        Configuration::parse_line(csv).iter().map(|id| resolve(model, id.as_str())).collect()
    })
}

/// # Safety
/// Each pointer must be NULL or a valid NUL-terminated string.
unsafe fn requirements(
    model: &FeatureModel,
    require: *const c_char,
    exclude: *const c_char,
    weights: *const c_char,
) -> FfiResult<RequirementSet> {
    let mut req = RequirementSet::new();
    req.required.extend(token_list(model, opt_str(require, "require")?)?);
    req.excluded.extend(token_list(model, opt_str(exclude, "exclude")?)?);
    if let Some(text) = opt_str(weights, "weights")? {
        for (id, w) in selfconfig::parse_weights(text)? {
            req.weights.insert(resolve(model, id.as_str())?, w);
        }
    }
    Ok(req)
}

/// Parses `text` in the given dialect into a new model handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scas_model_parse(
    text: *const c_char,
    format: ScasFormat,
    out: *mut *mut ScasModel,
) -> ScasStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = req_str(text, "text")?;
        let format = match format {
            ScasFormat::Xml => SourceFormat::Xml,
            ScasFormat::ArcTable => SourceFormat::ArcTable,
        };
        let model = format.parse(text).map_err(|e| {
            let message = match e.location() {
                Some(l) => format!("{}:{}: {e}", l.line, l.column),
                None => e.to_string(),
            };
            Failure(ScasStatus::ParseError, message)
        })?;
        *out = Box::into_raw(Box::new(ScasModel { model: Arc::new(model), source: text.as_bytes().to_vec() }));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle from [`scas_model_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scas_model_free(model: *mut ScasModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of features, or 0 for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scas_model_feature_count(model: *const ScasModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.feature_count())
}

/// Number of hyperarcs, or 0 for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scas_model_arc_count(model: *const ScasModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.arc_count())
}

/// Counts the valid configurations of `scope` (NULL for the model root).
///
/// # Safety
/// `model` must be a live handle, `scope` NULL or a valid string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scas_count_configurations(
    model: *const ScasModel,
    scope: *const c_char,
    out: *mut u64,
) -> ScasStatus {
    guard(|| {
        non_null(out, "out")?;
        let model = model_ref(model)?;
        let scope = scope_of(model, opt_str(scope, "scope")?)?;
        *out = engine::enumerate_configurations(model, &scope, EnumerateOptions::from_env())?.count() as u64;
        Ok(())
    })
}

/// Writes the JSON metrics report for `scope`, or for every tagged layer
/// when `scope` is NULL.
///
/// # Safety
/// `model` must be a live handle, `scope` NULL or a valid string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scas_metrics_json(
    model: *const ScasModel,
    scope: *const c_char,
    out: *mut *mut c_char,
) -> ScasStatus {
    guard(|| {
        non_null(out, "out")?;
        let source = &model_ref_handle(model)?.source;
        let model = model_ref(model)?;
        let options = EnumerateOptions::from_env();
        let scopes = match opt_str(scope, "scope")? {
            None => engine::scas_report(model, options)?
                .iter()
                .map(|(key, metrics)| ScopeReport::new(Some(*key), metrics))
                .collect(),
            Some(s) => {
                let scope = resolve(model, s)?;
                let f = model.feature(&scope).expect("resolved");
                let key = f.layer.map(|layer| LayerKey { level: f.level, layer });
                vec![ScopeReport::new(key, &engine::layer_metrics(model, &scope, options)?)]
            }
        };
        write_string(out, Report::new(source, model, scopes).to_json())
    })
}

/// Starts a lazy enumeration of `scope` (NULL for the model root). With
/// `streaming` set the scope-size cap is not applied.
///
/// # Safety
/// `model` must be a live handle, `scope` NULL or a valid string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scas_enumerator_new(
    model: *const ScasModel,
    scope: *const c_char,
    streaming: bool,
    out: *mut *mut ScasEnumerator,
) -> ScasStatus {
    guard(|| {
        non_null(out, "out")?;
        non_null(model, "model")?;
        let shared = Arc::clone(&(*model).model);
        // SAFETY: the iterator borrows the heap model kept alive by `_model`,
        // which is dropped after it.
        let model_ref: &'static FeatureModel = &*Arc::as_ptr(&shared);
        let scope = scope_of(model_ref, opt_str(scope, "scope")?)?;
        let options = EnumerateOptions::from_env().streaming(streaming);
        let iter = engine::enumerate_configurations(model_ref, &scope, options)?;
        *out = Box::into_raw(Box::new(ScasEnumerator { iter, _model: shared }));
        Ok(())
    })
}

/// Writes the next configuration as a comma-separated token line, or NULL
/// once the enumeration is exhausted.
///
/// # Safety
/// `enumerator` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scas_enumerator_next(enumerator: *mut ScasEnumerator, out: *mut *mut c_char) -> ScasStatus {
    guard(|| {
        non_null(out, "out")?;
        non_null(enumerator, "enumerator")?;
        match (*enumerator).iter.next() {
            Some(config) => write_string(out, config.to_string()),
            None => {
                *out = ptr::null_mut();
                Ok(())
            }
        }
    })
}

/// # Safety
/// `enumerator` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scas_enumerator_free(enumerator: *mut ScasEnumerator) {
    if !enumerator.is_null() {
        drop(Box::from_raw(enumerator));
    }
}

/// Finds the cheapest valid configuration of `scope` holding every feature
/// in `require` and none in `exclude` (comma-separated, either may be NULL).
/// `weights` is NULL or `token value` lines. Writes the configuration line.
///
/// # Safety
/// `model` must be a live handle, the strings NULL or valid, and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scas_select(
    model: *const ScasModel,
    scope: *const c_char,
    require: *const c_char,
    exclude: *const c_char,
    weights: *const c_char,
    out: *mut *mut c_char,
) -> ScasStatus {
    guard(|| {
        non_null(out, "out")?;
        let model = model_ref(model)?;
        let scope = scope_of(model, opt_str(scope, "scope")?)?;
        let req = requirements(model, require, exclude, weights)?;
        let sel = selfconfig::select_configuration(model, &scope, &req, EnumerateOptions::from_env())?;
        write_string(out, sel.configuration.to_string())
    })
}

/// Computes the smallest change from `current` (comma-separated) to a valid
/// configuration meeting the requirements and writes the plan as JSON with
/// `target`, `add`, `remove`, `cost` and `delta_size` fields.
///
/// # Safety
/// `model` must be a live handle, the strings NULL or valid, and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn scas_reconfigure_json(
    model: *const ScasModel,
    scope: *const c_char,
    current: *const c_char,
    require: *const c_char,
    exclude: *const c_char,
    weights: *const c_char,
    out: *mut *mut c_char,
) -> ScasStatus {
    guard(|| {
        non_null(out, "out")?;
        let model = model_ref(model)?;
        let scope = scope_of(model, opt_str(scope, "scope")?)?;
        let current: Configuration = token_list(model, opt_str(current, "current")?)?.into_iter().collect();
        let req = requirements(model, require, exclude, weights)?;
        let plan = selfconfig::reconfigure(model, &scope, &current, &req, EnumerateOptions::from_env())?;
        write_string(out, serde_json::to_string(&plan).expect("plan serializes"))
    })
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn scas_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scas_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
