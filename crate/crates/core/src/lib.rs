//! An embeddable search engine with a structured query language.
//!
//! The crate is split along the lines of a classic builder/searcher pair:
//!
//! - [`ingest`] turns raw TREC-text or plain-text corpora into [`RawDocument`]s.
//! - [`index`] builds an immutable positional [`IndexSnapshot`] and persists it.
//! - [`query`] parses `#combine`, `#syn`, `#odN`, `#uwN` and numeric filter
//!   operators into a [`QueryNode`] tree.
//! - [`retrieval`] scores documents with Dirichlet-smoothed query likelihood.
//! - [`snippet`] builds highlighted excerpts for results.
//! - [`environment`] ties it together: a [`QueryEnvironment`] owns one or more
//!   indexes and answers [`SearchRequest`]s.
//!
//! ```no_run
//! use luandri::{QueryEnvironment, SearchRequest};
//!
//! # fn main() -> luandri::Result<()> {
//! let mut env = QueryEnvironment::new();
//! env.add_index("path/to/index")?;
//! let request = SearchRequest::new(
//!     "#syn( #od1(neural networks) #od1(deep learning)) #greater(year 2009)",
//! );
//! for r in env.run_query(&request)? {
//!     println!("{}\n{}\n{}\n", r.docid, r.document_name, r.snippet);
//! }
//! # Ok(())
//! # }
//! ```

pub mod environment;
pub mod error;
pub mod index;
pub mod ingest;
pub mod query;
pub mod retrieval;
pub mod run_file;
pub mod snippet;

pub use environment::QueryEnvironment;
pub use error::{Error, IngestError, LoadError, Result};
pub use index::{
    build_index, open_index, write_index, CollectionStats, DocId, DocumentRecord, IndexSnapshot,
    PostingList,
};
pub use ingest::{parse_plaintext, parse_trec, tokenize, RawDocument};
pub use query::{
    apply_stopwords, parse_query, render_query, FilterOp, NumericFilter, ParseError, ParsedQuery,
    QueryNode,
};
pub use retrieval::{run_query, ScoredResult, ScoringParams, SearchRequest, VirtualPosting};
pub use snippet::{generate_snippet, SnippetConfig};
