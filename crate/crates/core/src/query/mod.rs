//! Structured query language: AST, parser, canonical rendering and
//! query-time stop-word removal.

mod ast;
mod parser;

use std::collections::HashSet;

pub use ast::{render_query, FilterOp, NumericFilter, ParsedQuery, QueryNode};
pub use parser::{parse_query, ParseError};

/// Removes stop words that appear as direct `Term` children of a `Combine`
/// (a bare top-level term counts as the implicit top-level combine). Terms
/// inside `#syn`, `#odN` and `#uwN` are kept since dropping them would change
/// adjacency. Combines left empty disappear; `None` means nothing is left to
/// score.
pub fn apply_stopwords(belief: &QueryNode, stopwords: &HashSet<String>) -> Option<QueryNode> {
    match belief {
        QueryNode::Term(t) if stopwords.contains(t) => None,
        QueryNode::Combine(_) => strip(belief, stopwords),
        other => Some(other.clone()),
    }
}

fn strip(node: &QueryNode, stopwords: &HashSet<String>) -> Option<QueryNode> {
    match node {
        QueryNode::Combine(children) => {
            let kept: Vec<QueryNode> = children
                .iter()
                .filter_map(|c| match c {
                    QueryNode::Term(t) if stopwords.contains(t) => None,
                    _ => strip(c, stopwords),
                })
                .collect();
            (!kept.is_empty()).then_some(QueryNode::Combine(kept))
        }
        other => Some(other.clone()),
    }
}
