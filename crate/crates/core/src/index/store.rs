//! On-disk index directory.
//!
//! ```text
//! manifest.json   version, collection stats, field names, .bin sizes
//! lexicon.bin     per term, sorted: [term_len][term][cf][df][offset:u64][byte_len:u64]
//! postings.bin    per term: [df] then per doc [docid_delta][tf][tf × position_delta]
//! docs.bin        per doc, docid order: [name_len][name][doclen][offset:u64][len:u64]
//! fields.bin      per field, sorted: [name_len][name][count] then [docid_delta][value:i64]
//! store.bin       stored token text (UTF-8)
//! ```
//!
//! Bracketed integers are LEB128 varints unless typed; fixed-width integers
//! are little-endian. Every `.bin` file ends with a little-endian CRC32 of the
//! bytes before it. Lexicon offsets are relative to the start of
//! `postings.bin`.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::varint;
use super::{DocumentRecord, IndexSnapshot, NumericFieldTable, Posting, PostingList, TextSpan};
use crate::error::LoadError;

pub const FORMAT_VERSION: u32 = 1;

const MANIFEST: &str = "manifest.json";
const LEXICON: &str = "lexicon.bin";
const POSTINGS: &str = "postings.bin";
const DOCS: &str = "docs.bin";
const FIELDS: &str = "fields.bin";
const STORE: &str = "store.bin";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    version: u32,
    doc_count: u64,
    total_terms: u64,
    vocab_size: u64,
    fields: Vec<String>,
    /// Size in bytes of each `.bin` file, checksum included.
    file_sizes: BTreeMap<String, u64>,
}

pub fn write_index(snapshot: &IndexSnapshot, dir: impl AsRef<Path>) -> io::Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;

    let mut lexicon = Vec::new();
    let mut postings = Vec::new();
    for list in snapshot.terms() {
        let offset = postings.len() as u64;
        encode_postings(&mut postings, list);
        varint::write_u64(&mut lexicon, list.term.len() as u64);
        lexicon.extend_from_slice(list.term.as_bytes());
        varint::write_u64(&mut lexicon, list.cf());
        varint::write_u64(&mut lexicon, list.df());
        lexicon.extend_from_slice(&offset.to_le_bytes());
        lexicon.extend_from_slice(&(postings.len() as u64 - offset).to_le_bytes());
    }

    let mut docs = Vec::new();
    for d in snapshot.documents() {
        varint::write_u64(&mut docs, d.name.len() as u64);
        docs.extend_from_slice(d.name.as_bytes());
        varint::write_u64(&mut docs, d.doclen);
        docs.extend_from_slice(&d.text_span.offset.to_le_bytes());
        docs.extend_from_slice(&d.text_span.len.to_le_bytes());
    }

    let mut fields = Vec::new();
    for (name, values) in snapshot.fields() {
        varint::write_u64(&mut fields, name.len() as u64);
        fields.extend_from_slice(name.as_bytes());
        varint::write_u64(&mut fields, values.len() as u64);
        let mut prev = 0;
        for (&docid, &value) in values {
            varint::write_u64(&mut fields, docid - prev);
            fields.extend_from_slice(&value.to_le_bytes());
            prev = docid;
        }
    }

    let mut file_sizes = BTreeMap::new();
    for (name, payload) in [
        (LEXICON, lexicon),
        (POSTINGS, postings),
        (DOCS, docs),
        (FIELDS, fields),
        (STORE, snapshot.store().as_bytes().to_vec()),
    ] {
        let bytes = seal(payload);
        file_sizes.insert(name.to_string(), bytes.len() as u64);
        fs::write(dir.join(name), bytes)?;
    }

    let stats = snapshot.stats();
    let manifest = Manifest {
        version: FORMAT_VERSION,
        doc_count: stats.doc_count,
        total_terms: stats.total_terms,
        vocab_size: stats.vocab_size,
        fields: snapshot.fields().keys().cloned().collect(),
        file_sizes,
    };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    fs::write(dir.join(MANIFEST), json)
}

fn encode_postings(out: &mut Vec<u8>, list: &PostingList) {
    varint::write_u64(out, list.df());
    let mut prev_doc = 0;
    for p in &list.entries {
        varint::write_u64(out, p.docid - prev_doc);
        varint::write_u64(out, p.tf());
        let mut prev_pos = 0;
        for &pos in &p.positions {
            varint::write_u64(out, u64::from(pos - prev_pos));
            prev_pos = pos;
        }
        prev_doc = p.docid;
    }
}

fn seal(mut payload: Vec<u8>) -> Vec<u8> {
    let crc = crc32fast::hash(&payload);
    payload.extend_from_slice(&crc.to_le_bytes());
    payload
}

pub fn open_index(dir: impl AsRef<Path>) -> Result<IndexSnapshot, LoadError> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST);
    let manifest_bytes = match fs::read(&manifest_path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(LoadError::MissingManifest(dir.to_path_buf()))
        }
        Err(source) => {
            return Err(LoadError::Io {
                path: manifest_path,
                source,
            })
        }
    };
    let raw: serde_json::Value =
        serde_json::from_slice(&manifest_bytes).map_err(|e| malformed(MANIFEST, e))?;
    let version = raw.get("version").and_then(|v| v.as_u64());
    if version != Some(u64::from(FORMAT_VERSION)) {
        return Err(LoadError::VersionMismatch {
            found: version.map_or(0, |v| v as u32),
            expected: FORMAT_VERSION,
        });
    }
    let manifest: Manifest = serde_json::from_value(raw).map_err(|e| malformed(MANIFEST, e))?;

    let read = |name: &'static str| read_sealed(dir, name, &manifest);
    let lexicon_bytes = read(LEXICON)?;
    let postings_bytes = read(POSTINGS)?;
    let docs_bytes = read(DOCS)?;
    let fields_bytes = read(FIELDS)?;
    let store_bytes = read(STORE)?;

    let store = String::from_utf8(store_bytes).map_err(|e| malformed(STORE, e))?;
    let documents = decode_docs(&docs_bytes, &store)?;
    let lexicon = decode_lexicon(&lexicon_bytes, &postings_bytes, documents.len() as u64)?;
    let fields = decode_fields(&fields_bytes, documents.len() as u64)?;

    let snapshot = IndexSnapshot::from_parts(lexicon, documents, fields, store);
    let stats = snapshot.stats();
    if stats.doc_count != manifest.doc_count
        || stats.total_terms != manifest.total_terms
        || stats.vocab_size != manifest.vocab_size
    {
        return Err(malformed(
            MANIFEST,
            "collection statistics disagree with data files",
        ));
    }
    let cf_total: u64 = snapshot.terms().map(PostingList::cf).sum();
    if cf_total != stats.total_terms {
        return Err(malformed(
            POSTINGS,
            "collection frequencies do not sum to total_terms",
        ));
    }
    if !snapshot.fields().keys().eq(manifest.fields.iter()) {
        return Err(malformed(FIELDS, "field names disagree with manifest"));
    }
    Ok(snapshot)
}

fn malformed(file: &'static str, reason: impl ToString) -> LoadError {
    LoadError::Malformed {
        file,
        reason: reason.to_string(),
    }
}

fn read_sealed(dir: &Path, name: &'static str, manifest: &Manifest) -> Result<Vec<u8>, LoadError> {
    let path: PathBuf = dir.join(name);
    let mut bytes = fs::read(&path).map_err(|source| LoadError::Io { path, source })?;
    let expected = manifest
        .file_sizes
        .get(name)
        .copied()
        .ok_or_else(|| malformed(MANIFEST, format!("no size recorded for {name}")))?;
    if (bytes.len() as u64) < expected || bytes.len() < 4 {
        return Err(LoadError::Truncated { file: name });
    }
    if bytes.len() as u64 != expected {
        return Err(malformed(name, "trailing bytes after checksum"));
    }
    let split = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[split..].try_into().expect("4-byte trailer"));
    bytes.truncate(split);
    let computed = crc32fast::hash(&bytes);
    if stored != computed {
        return Err(LoadError::Checksum {
            file: name,
            stored,
            computed,
        });
    }
    Ok(bytes)
}

/// Cursor over a checksummed payload. Any overrun is a format error because
/// the checksum already vouched for the byte count.
struct Reader<'a> {
    file: &'static str,
    input: &'a [u8],
}

impl<'a> Reader<'a> {
    fn new(file: &'static str, input: &'a [u8]) -> Self {
        Self { file, input }
    }

    fn is_empty(&self) -> bool {
        self.input.is_empty()
    }

    fn varint(&mut self) -> Result<u64, LoadError> {
        varint::read_u64(&mut self.input).ok_or_else(|| malformed(self.file, "bad varint"))
    }

    fn u64(&mut self) -> Result<u64, LoadError> {
        Ok(u64::from_le_bytes(
            self.bytes(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn i64(&mut self) -> Result<i64, LoadError> {
        Ok(i64::from_le_bytes(
            self.bytes(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn bytes(&mut self, n: u64) -> Result<&'a [u8], LoadError> {
        let n = usize::try_from(n).map_err(|_| malformed(self.file, "length overflow"))?;
        if n > self.input.len() {
            return Err(malformed(self.file, "unexpected end of data"));
        }
        let (head, tail) = self.input.split_at(n);
        self.input = tail;
        Ok(head)
    }

    fn string(&mut self) -> Result<String, LoadError> {
        let len = self.varint()?;
        let file = self.file;
        let bytes = self.bytes(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|e| malformed(file, e))
    }
}

fn decode_docs(payload: &[u8], store: &str) -> Result<Vec<DocumentRecord>, LoadError> {
    let mut r = Reader::new(DOCS, payload);
    let mut docs = Vec::new();
    while !r.is_empty() {
        let name = r.string()?;
        let doclen = r.varint()?;
        let span = TextSpan {
            offset: r.u64()?,
            len: r.u64()?,
        };
        let end = span.offset.checked_add(span.len);
        if end.is_none_or(|e| e > store.len() as u64) {
            return Err(malformed(DOCS, "text span outside stored text"));
        }
        docs.push(DocumentRecord {
            docid: docs.len() as u64 + 1,
            name,
            doclen,
            text_span: span,
        });
    }
    Ok(docs)
}

fn decode_lexicon(
    lexicon: &[u8],
    postings: &[u8],
    doc_count: u64,
) -> Result<BTreeMap<String, PostingList>, LoadError> {
    let mut r = Reader::new(LEXICON, lexicon);
    let mut out = BTreeMap::new();
    let mut prev_term: Option<String> = None;
    while !r.is_empty() {
        let term = r.string()?;
        let cf = r.varint()?;
        let df = r.varint()?;
        let offset = r.u64()?;
        let len = r.u64()?;
        if prev_term.as_ref().is_some_and(|p| *p >= term) || term.is_empty() {
            return Err(malformed(LEXICON, "terms not strictly sorted"));
        }
        let slice = offset
            .checked_add(len)
            .filter(|&end| end <= postings.len() as u64)
            .map(|end| &postings[offset as usize..end as usize])
            .ok_or_else(|| malformed(LEXICON, "posting locator out of range"))?;
        let list = decode_posting_list(&term, slice, doc_count)?;
        if list.df() != df || list.cf() != cf {
            return Err(malformed(
                LEXICON,
                format!("statistics mismatch for {term:?}"),
            ));
        }
        prev_term = Some(term.clone());
        out.insert(term, list);
    }
    Ok(out)
}

fn decode_posting_list(term: &str, slice: &[u8], doc_count: u64) -> Result<PostingList, LoadError> {
    let mut r = Reader::new(POSTINGS, slice);
    let df = r.varint()?;
    if df == 0 || df > doc_count {
        return Err(malformed(POSTINGS, format!("bad df for {term:?}")));
    }
    let mut entries = Vec::with_capacity(df as usize);
    let mut docid = 0u64;
    for _ in 0..df {
        let delta = r.varint()?;
        if delta == 0 {
            return Err(malformed(POSTINGS, "docids not increasing"));
        }
        docid = docid
            .checked_add(delta)
            .filter(|&d| d <= doc_count)
            .ok_or_else(|| malformed(POSTINGS, "docid out of range"))?;
        let tf = r.varint()?;
        if tf == 0 || tf > slice.len() as u64 {
            return Err(malformed(POSTINGS, "bad tf"));
        }
        let mut positions = Vec::with_capacity(tf as usize);
        let mut pos = 0u64;
        for i in 0..tf {
            let delta = r.varint()?;
            if i > 0 && delta == 0 {
                return Err(malformed(POSTINGS, "positions not increasing"));
            }
            pos += delta;
            let p = u32::try_from(pos).map_err(|_| malformed(POSTINGS, "position overflow"))?;
            positions.push(p);
        }
        entries.push(Posting { docid, positions });
    }
    if !r.is_empty() {
        return Err(malformed(POSTINGS, "trailing bytes in posting list"));
    }
    Ok(PostingList {
        term: term.to_string(),
        entries,
    })
}

fn decode_fields(payload: &[u8], doc_count: u64) -> Result<NumericFieldTable, LoadError> {
    let mut r = Reader::new(FIELDS, payload);
    let mut table = NumericFieldTable::new();
    while !r.is_empty() {
        let name = r.string()?;
        let count = r.varint()?;
        let mut values = BTreeMap::new();
        let mut docid = 0u64;
        for _ in 0..count {
            let delta = r.varint()?;
            docid = docid
                .checked_add(delta)
                .filter(|&d| delta > 0 && d <= doc_count)
                .ok_or_else(|| malformed(FIELDS, "docid out of range"))?;
            values.insert(docid, r.i64()?);
        }
        if table.insert(name, values).is_some() {
            return Err(malformed(FIELDS, "duplicate field"));
        }
    }
    Ok(table)
}
