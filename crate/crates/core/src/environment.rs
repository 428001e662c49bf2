use std::path::Path;

use crate::error::{Error, Result};
use crate::index::{open_index, CollectionStats, IndexSnapshot};
use crate::retrieval::{run_query, ScoredResult, ScoringParams, SearchRequest};

/// Searchable runtime owning one or more opened indexes.
///
/// Indexes are searched as one collection: the documents of the n-th added
/// index get docids offset by the document count of the indexes before it,
/// and collection statistics cover all of them.
#[derive(Debug, Default)]
pub struct QueryEnvironment {
    parts: Vec<IndexSnapshot>,
    combined: Option<IndexSnapshot>,
    params: ScoringParams,
}

impl QueryEnvironment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_params(params: ScoringParams) -> Self {
        Self {
            params,
            ..Self::default()
        }
    }

    pub fn params(&self) -> &ScoringParams {
        &self.params
    }

    pub fn add_index(&mut self, dir: impl AsRef<Path>) -> Result<()> {
        let snapshot = open_index(dir)?;
        self.add_snapshot(snapshot);
        Ok(())
    }

    pub fn add_snapshot(&mut self, snapshot: IndexSnapshot) {
        self.parts.push(snapshot);
        self.combined = Some(if self.parts.len() == 1 {
            self.parts[0].clone()
        } else {
            IndexSnapshot::concat(&self.parts)
        });
    }

    pub fn index_count(&self) -> usize {
        self.parts.len()
    }

    pub fn snapshot(&self) -> Option<&IndexSnapshot> {
        self.combined.as_ref()
    }

    pub fn stats(&self) -> CollectionStats {
        self.combined
            .as_ref()
            .map(IndexSnapshot::stats)
            .unwrap_or_default()
    }

    pub fn run_query(&self, request: &SearchRequest) -> Result<Vec<ScoredResult>> {
        let snapshot = self.combined.as_ref().ok_or(Error::NoIndex)?;
        run_query(snapshot, request, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_index;
    use crate::ingest::{tokenize, RawDocument};

    fn snap(names: &[&str]) -> IndexSnapshot {
        let docs: Vec<_> = names
            .iter()
            .map(|n| RawDocument::new(*n, tokenize("shared words here")))
            .collect();
        build_index(&docs).unwrap()
    }

    #[test]
    fn empty_environment_has_no_index() {
        let env = QueryEnvironment::new();
        assert!(matches!(
            env.run_query(&SearchRequest::new("a")),
            Err(Error::NoIndex)
        ));
    }

    #[test]
    fn multiple_indexes_are_searched_together() {
        let mut env = QueryEnvironment::new();
        env.add_snapshot(snap(&["a", "b", "c"]));
        env.add_snapshot(snap(&["d", "e", "f", "g"]));
        assert_eq!(env.stats().doc_count, 7);
        let r = env
            .run_query(&SearchRequest::new("shared").results_requested(100))
            .unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r[4].docid, 5);
        assert_eq!(r[4].document_name, "e");
    }
}
