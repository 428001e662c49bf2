//! Query evaluation and Dirichlet-smoothed query-likelihood ranking.
//!
//! Every proximity node (`Term`, `#odN`, `#uwN`, `#syn`) is evaluated over the
//! whole snapshot into a [`VirtualPosting`], so its collection frequency is
//! exact. A leaf scores
//!
//! ```text
//! ln( (tf(leaf, D) + mu * cf(leaf) / |C|) / (|D| + mu) )
//! ```
//!
//! and `#combine` (explicit or implicit) takes the arithmetic mean of its
//! children. Leaves that never occur in the collection are dropped.

mod windows;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use log::warn;

use crate::error::{Error, Result};
use crate::index::{DocId, IndexSnapshot, PostingList};
use crate::ingest::tokenize;
use crate::query::{apply_stopwords, parse_query, NumericFilter, QueryNode};
use crate::snippet::{generate_snippet, SnippetConfig};

pub use windows::{eval_ordered_window, eval_unordered_window};

pub const DEFAULT_RESULTS_REQUESTED: usize = 10;
pub const DEFAULT_MU: f64 = 2500.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRequest {
    pub query: String,
    pub results_requested: usize,
    /// Restrict evaluation to these documents. Unknown docids are ignored.
    pub doc_id_restriction: Option<Vec<DocId>>,
    /// Query-time stop words, removed from `#combine` children.
    pub stopwords: Option<Vec<String>>,
}

impl SearchRequest {
    pub fn new(query: impl Into<String>) -> Self {
        Self {
            query: query.into(),
            results_requested: DEFAULT_RESULTS_REQUESTED,
            doc_id_restriction: None,
            stopwords: None,
        }
    }

    pub fn results_requested(mut self, n: usize) -> Self {
        self.results_requested = n;
        self
    }

    pub fn restrict_to(mut self, docids: impl IntoIterator<Item = DocId>) -> Self {
        self.doc_id_restriction = Some(docids.into_iter().collect());
        self
    }

    pub fn stopwords<S: Into<String>>(mut self, words: impl IntoIterator<Item = S>) -> Self {
        self.stopwords = Some(words.into_iter().map(Into::into).collect());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredResult {
    pub docid: DocId,
    pub document_name: String,
    pub snippet: String,
    /// Log-probability; always finite and at most zero.
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringParams {
    /// Dirichlet pseudo-count.
    pub mu: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        Self { mu: DEFAULT_MU }
    }
}

impl ScoringParams {
    pub fn new(mu: f64) -> Result<Self> {
        let p = Self { mu };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.mu.is_finite() && self.mu > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "mu must be a positive finite number, got {}",
                self.mu
            )))
        }
    }
}

/// Smoothed probability `(tf + mu * cf / |C|) / (|D| + mu)`.
pub fn dirichlet_probability(tf: u64, doclen: u64, cf: u64, total_terms: u64, mu: f64) -> f64 {
    (tf as f64 + mu * cf as f64 / total_terms as f64) / (doclen as f64 + mu)
}

/// Match start positions of a proximity node, per document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VirtualPosting {
    entries: BTreeMap<DocId, Vec<u32>>,
}

impl VirtualPosting {
    pub fn from_entries(entries: impl IntoIterator<Item = (DocId, Vec<u32>)>) -> Self {
        Self {
            entries: entries.into_iter().filter(|(_, p)| !p.is_empty()).collect(),
        }
    }

    fn from_postings(list: &PostingList) -> Self {
        Self::from_entries(list.entries.iter().map(|p| (p.docid, p.positions.clone())))
    }

    pub fn positions(&self, docid: DocId) -> &[u32] {
        self.entries.get(&docid).map_or(&[], Vec::as_slice)
    }

    pub fn tf(&self, docid: DocId) -> u64 {
        self.positions(docid).len() as u64
    }

    pub fn df(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn cf(&self) -> u64 {
        self.entries.values().map(|p| p.len() as u64).sum()
    }

    pub fn docids(&self) -> impl Iterator<Item = DocId> + '_ {
        self.entries.keys().copied()
    }
}

/// Per-document union of child match positions; coinciding positions count once.
pub fn eval_syn(children: &[VirtualPosting]) -> VirtualPosting {
    let mut merged: BTreeMap<DocId, BTreeSet<u32>> = BTreeMap::new();
    for child in children {
        for (&docid, positions) in &child.entries {
            merged.entry(docid).or_default().extend(positions);
        }
    }
    VirtualPosting::from_entries(
        merged
            .into_iter()
            .map(|(d, set)| (d, set.into_iter().collect())),
    )
}

/// Evaluates a proximity node across the whole snapshot.
///
/// # Panics
///
/// If `node` is a `Combine`; those are belief nodes, not proximity nodes.
pub fn evaluate_proximity(node: &QueryNode, snapshot: &IndexSnapshot) -> VirtualPosting {
    match node {
        QueryNode::Term(t) => snapshot
            .postings(t)
            .map(VirtualPosting::from_postings)
            .unwrap_or_default(),
        QueryNode::Syn(children) => {
            let evaluated: Vec<_> = children
                .iter()
                .map(|c| evaluate_proximity(c, snapshot))
                .collect();
            eval_syn(&evaluated)
        }
        QueryNode::OrderedWindow { width, terms } => {
            evaluate_window(snapshot, terms, |p| eval_ordered_window(*width, p))
        }
        QueryNode::UnorderedWindow { width, terms } => {
            evaluate_window(snapshot, terms, |p| eval_unordered_window(*width, p))
        }
        QueryNode::Combine(_) => panic!("#combine is not a proximity node"),
    }
}

fn evaluate_window(
    snapshot: &IndexSnapshot,
    terms: &[String],
    eval: impl Fn(&[&[u32]]) -> Vec<u32>,
) -> VirtualPosting {
    let Some(lists) = terms
        .iter()
        .map(|t| snapshot.postings(t))
        .collect::<Option<Vec<_>>>()
    else {
        return VirtualPosting::default();
    };
    let driver = lists
        .iter()
        .min_by_key(|l| l.entries.len())
        .expect("windows have at least two terms");
    let mut entries = Vec::new();
    for posting in &driver.entries {
        let per_term: Option<Vec<&[u32]>> = lists
            .iter()
            .map(|l| l.positions_in(posting.docid))
            .collect();
        if let Some(per_term) = per_term {
            let matches = eval(&per_term);
            if !matches.is_empty() {
                entries.push((posting.docid, matches));
            }
        }
    }
    VirtualPosting::from_entries(entries)
}

/// Token positions to highlight for `node` in one document: term
/// occurrences, plus every argument occurrence inside a window match.
pub fn highlight_positions(
    node: &QueryNode,
    snapshot: &IndexSnapshot,
    docid: DocId,
) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    collect_highlights(node, snapshot, docid, &mut out);
    out
}

fn collect_highlights(
    node: &QueryNode,
    snapshot: &IndexSnapshot,
    docid: DocId,
    out: &mut BTreeSet<u32>,
) {
    let positions_of = |t: &str| {
        snapshot
            .postings(t)
            .and_then(|l| l.positions_in(docid))
            .unwrap_or(&[])
    };
    match node {
        QueryNode::Term(t) => out.extend(positions_of(t)),
        QueryNode::Combine(children) | QueryNode::Syn(children) => {
            for c in children {
                collect_highlights(c, snapshot, docid, out);
            }
        }
        QueryNode::OrderedWindow { width, terms } => {
            let lists: Vec<&[u32]> = terms.iter().map(|t| positions_of(t)).collect();
            for tuple in windows::ordered_matches(*width, &lists) {
                out.extend(tuple);
            }
        }
        QueryNode::UnorderedWindow { width, terms } => {
            let lists: Vec<&[u32]> = terms.iter().map(|t| positions_of(t)).collect();
            for (l, r) in windows::unordered_matches(*width, &lists) {
                for list in &lists {
                    out.extend(list.iter().filter(|&&p| l <= p && p <= r));
                }
            }
        }
    }
}

/// Belief tree with proximity leaves resolved to their virtual postings.
enum Scorer {
    Leaf(VirtualPosting),
    Mean(Vec<Scorer>),
}

impl Scorer {
    /// `None` when every leaf below is absent from the collection.
    fn prepare(node: &QueryNode, snapshot: &IndexSnapshot) -> Option<Scorer> {
        match node {
            QueryNode::Combine(children) => {
                let kept: Vec<Scorer> = children
                    .iter()
                    .filter_map(|c| Scorer::prepare(c, snapshot))
                    .collect();
                (!kept.is_empty()).then_some(Scorer::Mean(kept))
            }
            leaf => {
                let vp = evaluate_proximity(leaf, snapshot);
                (vp.cf() > 0).then_some(Scorer::Leaf(vp))
            }
        }
    }

    fn score(&self, docid: DocId, doclen: u64, total_terms: u64, mu: f64) -> f64 {
        match self {
            Scorer::Leaf(vp) => {
                dirichlet_probability(vp.tf(docid), doclen, vp.cf(), total_terms, mu).ln()
            }
            Scorer::Mean(children) => {
                let sum: f64 = children
                    .iter()
                    .map(|c| c.score(docid, doclen, total_terms, mu))
                    .sum();
                sum / children.len() as f64
            }
        }
    }

    fn collect_matching_docs(&self, out: &mut BTreeSet<DocId>) {
        match self {
            Scorer::Leaf(vp) => out.extend(vp.docids()),
            Scorer::Mean(children) => children.iter().for_each(|c| c.collect_matching_docs(out)),
        }
    }
}

/// Query-likelihood score of one document. `Ok(None)` when no leaf of
/// `belief` occurs anywhere in the collection.
pub fn score_document(
    belief: &QueryNode,
    docid: DocId,
    snapshot: &IndexSnapshot,
    params: &ScoringParams,
) -> Result<Option<f64>> {
    params.validate()?;
    let total_terms = snapshot.stats().total_terms;
    if total_terms == 0 {
        return Err(Error::EmptyCollection);
    }
    let doc = snapshot
        .document(docid)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown docid {docid}")))?;
    Ok(Scorer::prepare(belief, snapshot)
        .map(|s| s.score(docid, doc.doclen, total_terms, params.mu)))
}

/// Runs a request end to end: parse, stop words, candidate selection,
/// filtering, ranking (score descending, docid ascending) and snippets.
pub fn run_query(
    snapshot: &IndexSnapshot,
    request: &SearchRequest,
    params: &ScoringParams,
) -> Result<Vec<ScoredResult>> {
    let parsed = parse_query(&request.query)?;
    params.validate()?;
    let total_terms = snapshot.stats().total_terms;
    if total_terms == 0 {
        return Err(Error::EmptyCollection);
    }
    if request.results_requested == 0 {
        return Ok(Vec::new());
    }

    let stopwords: HashSet<String> = request
        .stopwords
        .iter()
        .flatten()
        .flat_map(|w| tokenize(w))
        .collect();
    let Some(belief) = apply_stopwords(&parsed.belief, &stopwords) else {
        return Ok(Vec::new());
    };
    let Some(scorer) = Scorer::prepare(&belief, snapshot) else {
        return Ok(Vec::new());
    };

    let candidates: BTreeSet<DocId> = match &request.doc_id_restriction {
        Some(ids) => ids
            .iter()
            .copied()
            .filter(|&d| {
                let known = snapshot.contains(d);
                if !known {
                    warn!("docid {d} in restriction list is not in the index; ignored");
                }
                known
            })
            .collect(),
        None => {
            let mut set = BTreeSet::new();
            scorer.collect_matching_docs(&mut set);
            set
        }
    };

    let mut scored: Vec<(DocId, f64)> = candidates
        .into_iter()
        .filter(|&d| passes_filters(snapshot, &parsed.filters, d))
        .map(|d| {
            let doclen = snapshot.document(d).map_or(0, |r| r.doclen);
            (d, scorer.score(d, doclen, total_terms, params.mu))
        })
        .collect();
    scored.sort_by(|a, b| rank_order(*a, *b));
    scored.truncate(request.results_requested);

    let config = SnippetConfig::default();
    Ok(scored
        .into_iter()
        .map(|(docid, score)| {
            let tokens = snapshot.document_tokens(docid).unwrap_or_default();
            let highlights: Vec<u32> = highlight_positions(&belief, snapshot, docid)
                .into_iter()
                .collect();
            ScoredResult {
                docid,
                document_name: snapshot
                    .document(docid)
                    .map(|r| r.name.clone())
                    .unwrap_or_default(),
                snippet: generate_snippet(&tokens, &highlights, &config),
                score,
            }
        })
        .collect())
}

fn passes_filters(snapshot: &IndexSnapshot, filters: &[NumericFilter], docid: DocId) -> bool {
    filters
        .iter()
        .all(|f| f.accepts(snapshot.field_value(&f.field, docid)))
}

/// Score descending, then docid ascending.
fn rank_order(a: (DocId, f64), b: (DocId, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}
