//! Standard six-column retrieval run format: `qid Q0 docname rank score tag`.

use std::fmt;

use crate::retrieval::ScoredResult;

#[derive(Debug, Clone, PartialEq)]
pub struct RunFileLine {
    pub query_id: String,
    pub document_name: String,
    /// 1-based.
    pub rank: usize,
    pub score: f64,
    pub run_tag: String,
}

impl fmt::Display for RunFileLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} Q0 {} {} {:.6} {}",
            self.query_id, self.document_name, self.rank, self.score, self.run_tag
        )
    }
}

/// Run lines for one query's ranked results, ranks starting at 1.
pub fn run_lines(query_id: &str, results: &[ScoredResult], run_tag: &str) -> Vec<RunFileLine> {
    results
        .iter()
        .enumerate()
        .map(|(i, r)| RunFileLine {
            query_id: query_id.to_string(),
            document_name: r.document_name.clone(),
            rank: i + 1,
            score: r.score,
            run_tag: run_tag.to_string(),
        })
        .collect()
}
