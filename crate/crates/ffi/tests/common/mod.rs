#![allow(dead_code)]

use std::ffi::{CStr, CString};
use std::path::Path;

use luandri::{ScoredResult, SearchRequest};
use luandri_ffi::*;

pub const TOY_TREC: &str = "\
<DOC><DOCNO>A</DOCNO><year>2010</year><TEXT>neural networks</TEXT></DOC>
<DOC><DOCNO>B</DOCNO><year>2005</year><TEXT>deep learning</TEXT></DOC>
<DOC><DOCNO>C</DOCNO><year>2012</year><TEXT>networks neural</TEXT></DOC>
";

pub const EXAMPLE_QUERY: &str =
    "#syn( #od1(neural networks) #od1(deep learning)) #greater(year 2009)";

pub fn write_trec_index(trec: &str, fields: &[&str], dir: &Path) {
    let fields = fields.iter().map(|s| s.to_string()).collect();
    let docs = luandri::parse_trec(trec.as_bytes(), &fields).unwrap();
    let snapshot = luandri::build_index(&docs).unwrap();
    luandri::write_index(&snapshot, dir).unwrap();
}

pub fn last_error(env: LuandriEnvHandle) -> String {
    unsafe { CStr::from_ptr(luandri_last_error(env)) }
        .to_str()
        .unwrap()
        .to_string()
}

pub fn add_index(env: LuandriEnvHandle, path: &Path) -> LuandriStatus {
    let c = CString::new(path.to_str().unwrap()).unwrap();
    unsafe { luandri_env_add_index(env, c.as_ptr()) }
}

/// Marshals `request` into a flat record, runs it, copies every result out
/// and destroys the result set.
pub fn query(
    env: LuandriEnvHandle,
    request: &SearchRequest,
) -> Result<Vec<ScoredResult>, (LuandriStatus, String)> {
    let query = CString::new(request.query.as_str()).unwrap();
    let doc_ids = request.doc_id_restriction.clone().unwrap_or_default();
    let stop_owned: Vec<CString> = request
        .stopwords
        .iter()
        .flatten()
        .map(|w| CString::new(w.as_str()).unwrap())
        .collect();
    let stop_ptrs: Vec<*const std::ffi::c_char> = stop_owned.iter().map(|c| c.as_ptr()).collect();
    let flat = LuandriFlatRequest {
        query: query.as_ptr(),
        results_requested: request.results_requested as i32,
        doc_ids: doc_ids.as_ptr(),
        doc_ids_count: doc_ids.len() as i64,
        stopwords: stop_ptrs.as_ptr(),
        stopwords_count: stop_ptrs.len() as i64,
    };
    let mut status = -1;
    let rs = unsafe { luandri_env_run_query(env, &flat, &mut status) };
    if status != LUANDRI_OK {
        assert_eq!(rs, 0);
        return Err((status, last_error(env)));
    }
    let count = luandri_results_count(rs);
    assert!(count >= 0);
    let out = (0..count)
        .map(|i| {
            let r = luandri_results_get(rs, i);
            unsafe {
                ScoredResult {
                    docid: r.docid,
                    document_name: CStr::from_ptr(r.document_name)
                        .to_str()
                        .unwrap()
                        .to_string(),
                    snippet: CStr::from_ptr(r.snippet).to_str().unwrap().to_string(),
                    score: r.score,
                }
            }
        })
        .collect();
    assert_eq!(luandri_results_destroy(rs), LUANDRI_OK);
    Ok(out)
}
