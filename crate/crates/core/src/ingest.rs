//! Corpus ingestion: tokenization, TREC-text SGML and plain-text documents.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use log::warn;
use walkdir::WalkDir;

use crate::error::IngestError;

/// One ingested document. Token `i` sits at position `i`, so positions are
/// always the contiguous range `0..tokens.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub name: String,
    pub tokens: Vec<String>,
    pub fields: BTreeMap<String, i64>,
}

impl RawDocument {
    pub fn new(name: impl Into<String>, tokens: Vec<String>) -> Self {
        Self {
            name: name.into(),
            tokens,
            fields: BTreeMap::new(),
        }
    }

    pub fn with_field(mut self, field: impl Into<String>, value: i64) -> Self {
        self.fields.entry(field.into()).or_insert(value);
        self
    }

    /// `(term, position)` pairs in document order.
    pub fn positioned_tokens(&self) -> impl Iterator<Item = (&str, u32)> {
        self.tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i as u32))
    }
}

/// Splits text into maximal runs of Unicode alphanumeric characters, lowercased.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            // Lowercasing may expand to several chars, some of which (combining
            // marks) are not alphanumeric; dropping them keeps tokenize idempotent.
            current.extend(c.to_lowercase().filter(|l| l.is_alphanumeric()));
        } else if !current.is_empty() {
            terms.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        terms.push(current);
    }
    terms
}

/// [`tokenize`] over raw bytes, failing on invalid UTF-8.
pub fn tokenize_bytes(bytes: &[u8]) -> Result<Vec<String>, IngestError> {
    Ok(tokenize(decode_utf8(bytes)?))
}

fn decode_utf8(bytes: &[u8]) -> Result<&str, IngestError> {
    std::str::from_utf8(bytes).map_err(|e| IngestError::InvalidUtf8 {
        offset: e.valid_up_to(),
    })
}

pub fn parse_plaintext(name: &str, bytes: &[u8]) -> Result<RawDocument, IngestError> {
    let name = Path::new(name)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.to_string());
    if name.is_empty() {
        return Err(IngestError::EmptyName { offset: 0 });
    }
    Ok(RawDocument::new(name, tokenize_bytes(bytes)?))
}

/// Parses a concatenation of `<DOC>` blocks.
///
/// Tag names match case-insensitively. For every name in `field_names`, the
/// first `<name>…</name>` element anywhere in the block is read as a decimal
/// integer; content that does not parse is skipped with a warning.
pub fn parse_trec(
    bytes: &[u8],
    field_names: &BTreeSet<String>,
) -> Result<Vec<RawDocument>, IngestError> {
    let text = decode_utf8(bytes)?;
    // ASCII lowercasing preserves byte offsets, so tag searches can run on a
    // folded copy and slice the original.
    let folded = text.to_ascii_lowercase();
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    let mut pos = 0;

    loop {
        pos += folded[pos..].len() - folded[pos..].trim_start().len();
        if pos >= folded.len() {
            break;
        }
        if !folded[pos..].starts_with("<doc>") {
            return Err(IngestError::UnexpectedContent { offset: pos });
        }
        let body_start = pos + "<doc>".len();
        let body_end = folded[body_start..]
            .find("</doc>")
            .map(|i| body_start + i)
            .ok_or(IngestError::Unterminated {
                tag: "DOC",
                offset: pos,
            })?;
        let block = Block {
            text,
            folded: &folded,
            start: body_start,
            end: body_end,
        };

        let name = block
            .element("docno")
            .map_err(|e| e.with_tag("DOCNO", pos))?
            .ok_or(IngestError::MissingElement {
                tag: "DOCNO",
                offset: pos,
            })?
            .trim()
            .to_string();
        if name.is_empty() {
            return Err(IngestError::EmptyName { offset: pos });
        }
        if !seen.insert(name.clone()) {
            return Err(IngestError::DuplicateName(name));
        }
        let body = block
            .element("text")
            .map_err(|e| e.with_tag("TEXT", pos))?
            .ok_or(IngestError::MissingElement {
                tag: "TEXT",
                offset: pos,
            })?;

        let mut doc = RawDocument::new(name, tokenize(body));
        for field in field_names {
            let tag = field.to_ascii_lowercase();
            match block.element(&tag) {
                Ok(Some(content)) => match content.trim().parse::<i64>() {
                    Ok(v) => {
                        doc.fields.insert(tag, v);
                    }
                    Err(_) => warn!(
                        "document {}: field <{}> has non-integer content {:?}; ignored",
                        doc.name,
                        field,
                        content.trim()
                    ),
                },
                Ok(None) => {}
                Err(_) => warn!("document {}: unterminated <{}> ignored", doc.name, field),
            }
        }
        docs.push(doc);
        pos = body_end + "</doc>".len();
    }
    Ok(docs)
}

struct Block<'a> {
    text: &'a str,
    folded: &'a str,
    start: usize,
    end: usize,
}

struct UnterminatedElement;

impl UnterminatedElement {
    fn with_tag(self, tag: &'static str, offset: usize) -> IngestError {
        IngestError::Unterminated { tag, offset }
    }
}

impl<'a> Block<'a> {
    /// Content of the first `<tag>…</tag>` element inside the block.
    fn element(&self, tag: &str) -> Result<Option<&'a str>, UnterminatedElement> {
        let open = format!("<{tag}>");
        let close = format!("</{tag}>");
        let scope = &self.folded[self.start..self.end];
        let Some(o) = scope.find(&open) else {
            return Ok(None);
        };
        let content_start = o + open.len();
        let Some(c) = scope[content_start..].find(&close) else {
            return Err(UnterminatedElement);
        };
        let abs = self.start + content_start;
        Ok(Some(&self.text[abs..abs + c]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Trec,
    Text,
}

/// Reads a file, or every regular file below a directory in path order.
/// Document names must be unique across the whole corpus.
pub fn read_corpus(
    path: &Path,
    format: CorpusFormat,
    field_names: &BTreeSet<String>,
) -> Result<Vec<RawDocument>, IngestError> {
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| IngestError::Io { path: p, source }
    };
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in WalkDir::new(path).sort_by_file_name() {
            let entry = entry.map_err(|e| IngestError::Io {
                path: path.to_path_buf(),
                source: e.into(),
            })?;
            if entry.file_type().is_file() {
                files.push(entry.into_path());
            }
        }
    } else {
        fs::metadata(path).map_err(io_err(path))?;
        files.push(path.to_path_buf());
    }

    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for file in files {
        let bytes = fs::read(&file).map_err(io_err(&file))?;
        let batch = match format {
            CorpusFormat::Trec => parse_trec(&bytes, field_names)?,
            CorpusFormat::Text => vec![parse_plaintext(&file.to_string_lossy(), &bytes)?],
        };
        for doc in batch {
            if !seen.insert(doc.name.clone()) {
                return Err(IngestError::DuplicateName(doc.name));
            }
            docs.push(doc);
        }
    }
    Ok(docs)
}
