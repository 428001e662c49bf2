//! Immutable positional index.

mod store;
pub mod varint;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::IngestError;
use crate::ingest::RawDocument;

pub use store::{open_index, write_index, FORMAT_VERSION};

/// Internal document identifier. Assigned 1, 2, 3, … in ingestion order.
pub type DocId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posting {
    pub docid: DocId,
    /// Strictly increasing token positions; never empty.
    pub positions: Vec<u32>,
}

impl Posting {
    pub fn tf(&self) -> u64 {
        self.positions.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostingList {
    pub term: String,
    /// Sorted by strictly increasing docid.
    pub entries: Vec<Posting>,
}

impl PostingList {
    pub fn df(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn cf(&self) -> u64 {
        self.entries.iter().map(Posting::tf).sum()
    }

    pub fn positions_in(&self, docid: DocId) -> Option<&[u32]> {
        self.entries
            .binary_search_by_key(&docid, |p| p.docid)
            .ok()
            .map(|i| self.entries[i].positions.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TextSpan {
    pub offset: u64,
    pub len: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentRecord {
    pub docid: DocId,
    pub name: String,
    pub doclen: u64,
    pub text_span: TextSpan,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionStats {
    pub doc_count: u64,
    pub total_terms: u64,
    pub vocab_size: u64,
}

/// Field name → (docid → value). A docid absent from a field's map means the
/// document has no value for that field.
pub type NumericFieldTable = BTreeMap<String, BTreeMap<DocId, i64>>;

/// Searchable, read-only index state.
///
/// The stored text is every document's token stream joined with single
/// spaces, concatenated; each [`DocumentRecord::text_span`] addresses its
/// slice in bytes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSnapshot {
    lexicon: BTreeMap<String, PostingList>,
    documents: Vec<DocumentRecord>,
    fields: NumericFieldTable,
    stats: CollectionStats,
    store: String,
}

impl IndexSnapshot {
    pub fn stats(&self) -> CollectionStats {
        self.stats
    }

    pub fn postings(&self, term: &str) -> Option<&PostingList> {
        self.lexicon.get(term)
    }

    /// Posting lists in lexicographic term order.
    pub fn terms(&self) -> impl Iterator<Item = &PostingList> {
        self.lexicon.values()
    }

    pub fn documents(&self) -> &[DocumentRecord] {
        &self.documents
    }

    pub fn document(&self, docid: DocId) -> Option<&DocumentRecord> {
        let idx = usize::try_from(docid.checked_sub(1)?).ok()?;
        self.documents.get(idx)
    }

    pub fn contains(&self, docid: DocId) -> bool {
        docid >= 1 && docid <= self.documents.len() as u64
    }

    pub fn fields(&self) -> &NumericFieldTable {
        &self.fields
    }

    pub fn field_value(&self, field: &str, docid: DocId) -> Option<i64> {
        self.fields.get(field)?.get(&docid).copied()
    }

    pub fn stored_text(&self, docid: DocId) -> Option<&str> {
        let span = self.document(docid)?.text_span;
        self.store
            .get(span.offset as usize..(span.offset + span.len) as usize)
    }

    /// Document tokens as recorded in the stored text.
    pub fn document_tokens(&self, docid: DocId) -> Option<Vec<&str>> {
        let text = self.stored_text(docid)?;
        Some(if text.is_empty() {
            Vec::new()
        } else {
            text.split(' ').collect()
        })
    }

    /// Concatenates snapshots into one collection, offsetting each input's
    /// docids by the running document count.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a IndexSnapshot>) -> IndexSnapshot {
        let mut out = IndexSnapshot::default();
        for part in parts {
            let doc_offset = out.documents.len() as u64;
            let text_offset = out.store.len() as u64;
            out.store.push_str(&part.store);
            out.documents
                .extend(part.documents.iter().map(|d| DocumentRecord {
                    docid: d.docid + doc_offset,
                    name: d.name.clone(),
                    doclen: d.doclen,
                    text_span: TextSpan {
                        offset: d.text_span.offset + text_offset,
                        len: d.text_span.len,
                    },
                }));
            for (term, list) in &part.lexicon {
                let target = out
                    .lexicon
                    .entry(term.clone())
                    .or_insert_with(|| PostingList {
                        term: term.clone(),
                        entries: Vec::new(),
                    });
                target.entries.extend(list.entries.iter().map(|p| Posting {
                    docid: p.docid + doc_offset,
                    positions: p.positions.clone(),
                }));
            }
            for (name, values) in &part.fields {
                out.fields
                    .entry(name.clone())
                    .or_default()
                    .extend(values.iter().map(|(d, v)| (d + doc_offset, *v)));
            }
            out.stats.total_terms += part.stats.total_terms;
        }
        out.stats.doc_count = out.documents.len() as u64;
        out.stats.vocab_size = out.lexicon.len() as u64;
        out
    }

    pub(crate) fn from_parts(
        lexicon: BTreeMap<String, PostingList>,
        documents: Vec<DocumentRecord>,
        fields: NumericFieldTable,
        store: String,
    ) -> Self {
        let stats = CollectionStats {
            doc_count: documents.len() as u64,
            total_terms: documents.iter().map(|d| d.doclen).sum(),
            vocab_size: lexicon.len() as u64,
        };
        Self {
            lexicon,
            documents,
            fields,
            stats,
            store,
        }
    }

    pub(crate) fn store(&self) -> &str {
        &self.store
    }
}

/// Builds a snapshot, assigning docids 1.. in input order.
pub fn build_index(docs: &[RawDocument]) -> Result<IndexSnapshot, IngestError> {
    let mut seen = HashSet::new();
    let mut lexicon: BTreeMap<String, PostingList> = BTreeMap::new();
    let mut documents = Vec::with_capacity(docs.len());
    let mut fields = NumericFieldTable::new();
    let mut store = String::new();

    for (i, doc) in docs.iter().enumerate() {
        if !seen.insert(doc.name.as_str()) {
            return Err(IngestError::DuplicateName(doc.name.clone()));
        }
        let docid = i as DocId + 1;

        let mut local: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
        for (term, pos) in doc.positioned_tokens() {
            local.entry(term).or_default().push(pos);
        }
        for (term, positions) in local {
            lexicon
                .entry(term.to_string())
                .or_insert_with(|| PostingList {
                    term: term.to_string(),
                    entries: Vec::new(),
                })
                .entries
                .push(Posting { docid, positions });
        }
        for (name, value) in &doc.fields {
            fields
                .entry(name.clone())
                .or_default()
                .insert(docid, *value);
        }

        let offset = store.len() as u64;
        for (j, tok) in doc.tokens.iter().enumerate() {
            if j > 0 {
                store.push(' ');
            }
            store.push_str(tok);
        }
        documents.push(DocumentRecord {
            docid,
            name: doc.name.clone(),
            doclen: doc.tokens.len() as u64,
            text_span: TextSpan {
                offset,
                len: store.len() as u64 - offset,
            },
        });
    }
    Ok(IndexSnapshot::from_parts(lexicon, documents, fields, store))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(name: &str, toks: &[&str]) -> RawDocument {
        RawDocument::new(name, toks.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn empty_build() {
        let s = build_index(&[]).unwrap();
        assert_eq!(s.stats().doc_count, 0);
        assert_eq!(s.stats().total_terms, 0);
        assert_eq!(s.stats().vocab_size, 0);
    }

    #[test]
    fn single_doc_counts() {
        let s = build_index(&[doc("d", &["a", "b", "a"])]).unwrap();
        let a = s.postings("a").unwrap();
        assert_eq!(a.cf(), 2);
        assert_eq!(s.postings("b").unwrap().cf(), 1);
        assert_eq!(s.stats().total_terms, 3);
        assert_eq!(
            a.entries,
            vec![Posting {
                docid: 1,
                positions: vec![0, 2]
            }]
        );
    }

    #[test]
    fn two_doc_counts() {
        let s = build_index(&[doc("x", &["a"]), doc("y", &["a", "a"])]).unwrap();
        let a = s.postings("a").unwrap();
        assert_eq!(a.df(), 2);
        assert_eq!(a.cf(), 3);
        assert_eq!(
            a.entries,
            vec![
                Posting {
                    docid: 1,
                    positions: vec![0]
                },
                Posting {
                    docid: 2,
                    positions: vec![0, 1]
                }
            ]
        );
        assert!(s.postings("zzz").is_none());
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(matches!(
            build_index(&[doc("x", &["a"]), doc("x", &["b"])]),
            Err(IngestError::DuplicateName(_))
        ));
    }

    #[test]
    fn stored_text_and_fields() {
        let s = build_index(&[
            doc("x", &["deep", "learning"]).with_field("year", 2010),
            doc("empty", &[]),
            doc("z", &["c"]),
        ])
        .unwrap();
        assert_eq!(s.stored_text(1), Some("deep learning"));
        assert_eq!(s.document_tokens(2), Some(vec![]));
        assert_eq!(s.document_tokens(3), Some(vec!["c"]));
        assert_eq!(s.field_value("year", 1), Some(2010));
        assert_eq!(s.field_value("year", 3), None);
        assert!(s.document(0).is_none());
        assert!(s.document(4).is_none());
    }

    #[test]
    fn concat_offsets_docids() {
        let a = build_index(&[doc("a1", &["x"]), doc("a2", &["y", "x"])]).unwrap();
        let b = build_index(&[doc("b1", &["x", "z"]).with_field("year", 7)]).unwrap();
        let c = IndexSnapshot::concat([&a, &b]);
        assert_eq!(c.stats().doc_count, 3);
        assert_eq!(c.stats().total_terms, 5);
        assert_eq!(c.stats().vocab_size, 3);
        assert_eq!(c.document(3).unwrap().name, "b1");
        assert_eq!(c.postings("x").unwrap().df(), 3);
        assert_eq!(c.field_value("year", 3), Some(7));
        assert_eq!(c.stored_text(3), Some("x z"));
        assert_eq!(c.postings("x").unwrap().positions_in(3), Some(&[0u32][..]));
    }
}
