//! C ABI over [`luandri::QueryEnvironment`].
//!
//! Environments and result sets are identified by opaque 64-bit handles.
//! Handles are never reused, so a call with a destroyed handle is reported as
//! `LUANDRI_INVALID_ARGUMENT` instead of touching freed memory. Handle `0` is
//! never issued and doubles as the null result set.
//!
//! Memory ownership:
//! - request data is owned by the caller and only read during the call;
//! - strings inside a [`LuandriFlatResult`] are owned by the result set and
//!   stay valid until `luandri_results_destroy` (or destruction of the
//!   owning environment);
//! - the string returned by `luandri_last_error` is owned by the environment
//!   and stays valid until the next failing call on that environment.
//!
//! No function unwinds into the caller: panics are caught and reported as
//! `LUANDRI_INTERNAL_ERROR`.

use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, LazyLock, Mutex, MutexGuard, RwLock};

use luandri::{Error, QueryEnvironment, ScoredResult, SearchRequest};

pub type LuandriEnvHandle = u64;
pub type LuandriResultSetHandle = u64;
pub type LuandriStatus = i32;

pub const LUANDRI_OK: LuandriStatus = 0;
pub const LUANDRI_INVALID_ARGUMENT: LuandriStatus = 1;
pub const LUANDRI_PARSE_ERROR: LuandriStatus = 2;
pub const LUANDRI_IO_ERROR: LuandriStatus = 3;
pub const LUANDRI_INTERNAL_ERROR: LuandriStatus = 4;

/// Search request. All pointers are borrowed for the duration of the call.
///
/// A zero `doc_ids_count` or `stopwords_count` means the option is absent.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LuandriFlatRequest {
    /// NUL-terminated UTF-8 query text.
    pub query: *const c_char,
    /// Maximum number of results; must be non-negative.
    pub results_requested: i32,
    /// Array of `doc_ids_count` docids restricting the search.
    pub doc_ids: *const u64,
    pub doc_ids_count: i64,
    /// Array of `stopwords_count` NUL-terminated UTF-8 stop words.
    pub stopwords: *const *const c_char,
    pub stopwords_count: i64,
}

/// One ranked result. Strings are owned by the result set.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LuandriFlatResult {
    pub docid: u64,
    pub document_name: *const c_char,
    pub snippet: *const c_char,
    pub score: f64,
}

struct EnvSlot {
    env: RwLock<QueryEnvironment>,
    last_error: Mutex<CString>,
}

impl EnvSlot {
    fn fail(&self, status: LuandriStatus, message: impl Into<String>) -> LuandriStatus {
        *lock(&self.last_error) = to_cstring(message.into());
        status
    }
}

struct ResultSet {
    env: LuandriEnvHandle,
    records: Vec<LuandriFlatResult>,
    // Backing storage for the record pointers.
    _strings: Vec<CString>,
}

// The raw pointers in `records` point into `_strings`, which the set owns and
// never mutates.
unsafe impl Send for ResultSet {}
unsafe impl Sync for ResultSet {}

#[derive(Default)]
struct Registry {
    next_handle: u64,
    envs: HashMap<LuandriEnvHandle, Arc<EnvSlot>>,
    result_sets: HashMap<LuandriResultSetHandle, Arc<ResultSet>>,
}

impl Registry {
    fn issue(&mut self) -> u64 {
        self.next_handle += 1;
        self.next_handle
    }
}

static REGISTRY: LazyLock<Mutex<Registry>> = LazyLock::new(Default::default);

static EMPTY: &CStr = c"";
static UNKNOWN_ENV: &CStr = c"unknown environment handle";

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

fn registry() -> MutexGuard<'static, Registry> {
    lock(&REGISTRY)
}

fn env_slot(handle: LuandriEnvHandle) -> Option<Arc<EnvSlot>> {
    registry().envs.get(&handle).cloned()
}

fn to_cstring(s: String) -> CString {
    CString::new(s).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("NUL bytes removed")
    })
}

fn guard<T>(on_panic: T, f: impl FnOnce() -> T) -> T {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(on_panic)
}

fn status_of(e: &Error) -> LuandriStatus {
    match e {
        Error::Parse(_) => LUANDRI_PARSE_ERROR,
        Error::Load(_) | Error::Io(_) | Error::Ingest(_) => LUANDRI_IO_ERROR,
        Error::InvalidArgument(_) | Error::NoIndex | Error::EmptyCollection => {
            LUANDRI_INVALID_ARGUMENT
        }
    }
}

/// Reads a borrowed C string as UTF-8.
///
/// # Safety
/// `p` must be null or point to a NUL-terminated buffer.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, String> {
    if p.is_null() {
        return Err(format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| format!("{what} is not valid UTF-8: {e}"))
}

/// # Safety
/// Pointers in `req` must satisfy the [`LuandriFlatRequest`] contract.
unsafe fn to_request(req: &LuandriFlatRequest) -> Result<SearchRequest, String> {
    let query = read_str(req.query, "query")?;
    let results_requested = usize::try_from(req.results_requested)
        .map_err(|_| format!("results_requested is negative ({})", req.results_requested))?;
    let doc_ids_count = usize::try_from(req.doc_ids_count)
        .map_err(|_| format!("doc_ids_count is negative ({})", req.doc_ids_count))?;
    let stopwords_count = usize::try_from(req.stopwords_count)
        .map_err(|_| format!("stopwords_count is negative ({})", req.stopwords_count))?;

    let mut request = SearchRequest::new(query).results_requested(results_requested);
    if doc_ids_count > 0 {
        if req.doc_ids.is_null() {
            return Err("doc_ids is null but doc_ids_count > 0".into());
        }
        request.doc_id_restriction =
            Some(std::slice::from_raw_parts(req.doc_ids, doc_ids_count).to_vec());
    }
    if stopwords_count > 0 {
        if req.stopwords.is_null() {
            return Err("stopwords is null but stopwords_count > 0".into());
        }
        let words = std::slice::from_raw_parts(req.stopwords, stopwords_count)
            .iter()
            .enumerate()
            .map(|(i, &w)| read_str(w, &format!("stopwords[{i}]")).map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        request.stopwords = Some(words);
    }
    Ok(request)
}

fn to_result_set(env: LuandriEnvHandle, results: Vec<ScoredResult>) -> ResultSet {
    let mut strings = Vec::with_capacity(results.len() * 2);
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        let name = to_cstring(r.document_name);
        let snippet = to_cstring(r.snippet);
        // CString heap buffers do not move when the CString itself is moved.
        records.push(LuandriFlatResult {
            docid: r.docid,
            document_name: name.as_ptr(),
            snippet: snippet.as_ptr(),
            score: r.score,
        });
        strings.push(name);
        strings.push(snippet);
    }
    ResultSet {
        env,
        records,
        _strings: strings,
    }
}

fn sentinel() -> LuandriFlatResult {
    LuandriFlatResult {
        docid: 0,
        document_name: EMPTY.as_ptr(),
        snippet: EMPTY.as_ptr(),
        score: f64::NAN,
    }
}

/// Creates an empty query environment.
#[no_mangle]
pub extern "C" fn luandri_env_create() -> LuandriEnvHandle {
    guard(0, || {
        let mut reg = registry();
        let handle = reg.issue();
        reg.envs.insert(
            handle,
            Arc::new(EnvSlot {
                env: RwLock::new(QueryEnvironment::new()),
                last_error: Mutex::new(CString::default()),
            }),
        );
        handle
    })
}

/// Destroys an environment and every result set it produced.
#[no_mangle]
pub extern "C" fn luandri_env_destroy(env: LuandriEnvHandle) -> LuandriStatus {
    guard(LUANDRI_INTERNAL_ERROR, || {
        let mut reg = registry();
        if reg.envs.remove(&env).is_none() {
            return LUANDRI_INVALID_ARGUMENT;
        }
        reg.result_sets.retain(|_, rs| rs.env != env);
        LUANDRI_OK
    })
}

/// Opens the index directory at `path` and adds it to the environment.
///
/// # Safety
/// `path` must be null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn luandri_env_add_index(
    env: LuandriEnvHandle,
    path: *const c_char,
) -> LuandriStatus {
    guard(LUANDRI_INTERNAL_ERROR, || {
        let Some(slot) = env_slot(env) else {
            return LUANDRI_INVALID_ARGUMENT;
        };
        let path = match read_str(path, "path") {
            Ok(p) => p,
            Err(msg) => return slot.fail(LUANDRI_INVALID_ARGUMENT, msg),
        };
        let mut qe = slot.env.write().unwrap_or_else(|e| e.into_inner());
        match qe.add_index(path) {
            Ok(()) => LUANDRI_OK,
            Err(e) => slot.fail(status_of(&e), format!("{path}: {e}")),
        }
    })
}

/// Runs a query. Returns a result-set handle, or 0 on failure. The status is
/// written to `status_out` when it is non-null.
///
/// # Safety
/// `request` must be null or point to a [`LuandriFlatRequest`] whose pointers
/// honor its documented contract; `status_out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn luandri_env_run_query(
    env: LuandriEnvHandle,
    request: *const LuandriFlatRequest,
    status_out: *mut LuandriStatus,
) -> LuandriResultSetHandle {
    let (handle, status) = guard((0, LUANDRI_INTERNAL_ERROR), || {
        let Some(slot) = env_slot(env) else {
            return (0, LUANDRI_INVALID_ARGUMENT);
        };
        let Some(request) = request.as_ref() else {
            return (0, slot.fail(LUANDRI_INVALID_ARGUMENT, "request is null"));
        };
        let request = match to_request(request) {
            Ok(r) => r,
            Err(msg) => return (0, slot.fail(LUANDRI_INVALID_ARGUMENT, msg)),
        };
        let outcome = slot
            .env
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .run_query(&request);
        match outcome {
            Ok(results) => {
                let set = Arc::new(to_result_set(env, results));
                let mut reg = registry();
                let handle = reg.issue();
                reg.result_sets.insert(handle, set);
                (handle, LUANDRI_OK)
            }
            Err(e) => (0, slot.fail(status_of(&e), e.to_string())),
        }
    });
    if !status_out.is_null() {
        *status_out = status;
    }
    handle
}

/// Number of results in the set, or -1 for an unknown handle.
#[no_mangle]
pub extern "C" fn luandri_results_count(results: LuandriResultSetHandle) -> i64 {
    guard(-1, || {
        registry()
            .result_sets
            .get(&results)
            .map_or(-1, |rs| rs.records.len() as i64)
    })
}

/// The `index`-th result in rank order. Unknown handles and out-of-range
/// indexes yield a sentinel record (docid 0, empty strings, NaN score); an
/// out-of-range index also records an invalid-argument message as the owning
/// environment's last error.
#[no_mangle]
pub extern "C" fn luandri_results_get(
    results: LuandriResultSetHandle,
    index: i64,
) -> LuandriFlatResult {
    guard(sentinel(), || {
        let Some(rs) = registry().result_sets.get(&results).cloned() else {
            return sentinel();
        };
        match usize::try_from(index).ok().and_then(|i| rs.records.get(i)) {
            Some(record) => *record,
            None => {
                if let Some(slot) = env_slot(rs.env) {
                    slot.fail(
                        LUANDRI_INVALID_ARGUMENT,
                        format!(
                            "result index {index} out of range (count {})",
                            rs.records.len()
                        ),
                    );
                }
                sentinel()
            }
        }
    })
}

/// Releases a result set and the strings it owns.
#[no_mangle]
pub extern "C" fn luandri_results_destroy(results: LuandriResultSetHandle) -> LuandriStatus {
    guard(LUANDRI_INTERNAL_ERROR, || {
        match registry().result_sets.remove(&results) {
            Some(_) => LUANDRI_OK,
            None => LUANDRI_INVALID_ARGUMENT,
        }
    })
}

/// Message of the most recent failed call on `env`, or an empty string if
/// no call has failed yet.
#[no_mangle]
pub extern "C" fn luandri_last_error(env: LuandriEnvHandle) -> *const c_char {
    guard(EMPTY.as_ptr(), || match env_slot(env) {
        // The slot is kept alive by the registry, so the buffer outlives this
        // call until the next call that replaces the message.
        Some(slot) => lock(&slot.last_error).as_ptr(),
        None => UNKNOWN_ENV.as_ptr(),
    })
}
