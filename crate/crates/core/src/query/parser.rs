//! Recursive-descent parser for the structured query language.
//!
//! ```text
//! query  := item+
//! item   := belief | filter
//! belief := WORD | #combine( belief+ ) | #syn( prox+ )
//!         | #odN( WORD WORD+ ) | #uwN( WORD WORD+ )
//! prox   := WORD | #syn( prox+ ) | #odN( … ) | #uwN( … )
//! filter := #greater( FIELD INT ) | #less( FIELD INT )
//!         | #between( FIELD INT INT ) | #equals( FIELD INT )
//! ```
//!
//! A WORD is split with the ingest tokenizer and may therefore contribute
//! several terms. Filters are only legal at the top level.

use std::fmt;

use thiserror::Error;

use super::ast::{FilterOp, NumericFilter, ParsedQuery, QueryNode};
use crate::ingest::tokenize;

const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Op(&'a str),
    Open,
    Close,
    Word(&'a str),
    End,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Op(name) => write!(f, "operator #{name}"),
            Tok::Open => f.write_str("'('"),
            Tok::Close => f.write_str("')'"),
            Tok::Word(w) => write!(f, "{w:?}"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned<'a> {
    tok: Tok<'a>,
    offset: usize,
}

fn lex(input: &str) -> Vec<Spanned<'_>> {
    let mut toks = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    let is_boundary = |c: char| c.is_whitespace() || matches!(c, '(' | ')' | '#');
    while i < input.len() {
        let c = input[i..].chars().next().expect("non-empty remainder");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let tok = match bytes[i] {
            b'(' => {
                i += 1;
                Tok::Open
            }
            b')' => {
                i += 1;
                Tok::Close
            }
            b'#' => {
                i += 1;
                let len = input[i..]
                    .find(|c: char| !c.is_ascii_alphanumeric())
                    .unwrap_or(input.len() - i);
                i += len;
                Tok::Op(&input[start + 1..i])
            }
            _ => {
                let len = input[i..].find(is_boundary).unwrap_or(input.len() - i);
                i += len;
                Tok::Word(&input[start..i])
            }
        };
        toks.push(Spanned { tok, offset: start });
    }
    toks.push(Spanned {
        tok: Tok::End,
        offset: input.len(),
    });
    toks
}

enum Item {
    Beliefs(Vec<QueryNode>),
    Filter(NumericFilter),
}

struct Parser<'a> {
    toks: Vec<Spanned<'a>>,
    pos: usize,
    depth: usize,
}

pub fn parse_query(text: &str) -> Result<ParsedQuery, ParseError> {
    let mut p = Parser {
        toks: lex(text),
        pos: 0,
        depth: 0,
    };
    let mut beliefs = Vec::new();
    let mut filters = Vec::new();
    while p.peek().tok != Tok::End {
        match p.item()? {
            Item::Beliefs(b) => beliefs.extend(b),
            Item::Filter(f) => filters.push(f),
        }
    }
    let belief = match beliefs.len() {
        0 => return Err(p.error_here("at least one query term or belief operator")),
        1 => beliefs.pop().expect("one belief"),
        _ => QueryNode::Combine(beliefs),
    };
    Ok(ParsedQuery { belief, filters })
}

enum OpKind {
    Combine,
    Syn,
    Ordered(u32),
    Unordered(u32),
    Filter(&'static str),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned<'a> {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned<'a> {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Spanned<'_>, expected: impl Into<String>) -> ParseError {
        ParseError {
            offset: tok.offset,
            expected: expected.into(),
            found: tok.tok.to_string(),
        }
    }

    fn error_here(&self, expected: impl Into<String>) -> ParseError {
        self.error_at(self.peek(), expected)
    }

    fn classify(&self, tok: &Spanned<'_>, name: &str) -> Result<OpKind, ParseError> {
        let lower = name.to_ascii_lowercase();
        let window = |prefix: &str| -> Option<Result<u32, ParseError>> {
            let digits = lower.strip_prefix(prefix)?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            Some(match digits.parse::<u32>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(self.error_at(tok, "a window width of at least 1")),
            })
        };
        Ok(match lower.as_str() {
            "combine" => OpKind::Combine,
            "syn" => OpKind::Syn,
            "greater" => OpKind::Filter("greater"),
            "less" => OpKind::Filter("less"),
            "between" => OpKind::Filter("between"),
            "equals" => OpKind::Filter("equals"),
            _ => {
                if let Some(n) = window("od") {
                    OpKind::Ordered(n?)
                } else if let Some(n) = window("uw") {
                    OpKind::Unordered(n?)
                } else {
                    return Err(self.error_at(
                        tok,
                        "a known operator (#combine, #syn, #odN, #uwN, #greater, #less, #between, #equals)",
                    ));
                }
            }
        })
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        let tok = self.peek().clone();
        if let Tok::Op(name) = tok.tok {
            if let OpKind::Filter(kind) = self.classify(&tok, name)? {
                self.bump();
                return self.filter(kind).map(Item::Filter);
            }
        }
        self.belief().map(Item::Beliefs)
    }

    /// One syntactic belief; a WORD may expand to several terms.
    fn belief(&mut self) -> Result<Vec<QueryNode>, ParseError> {
        self.node(false)
    }

    fn prox(&mut self) -> Result<Vec<QueryNode>, ParseError> {
        self.node(true)
    }

    fn node(&mut self, proximity_only: bool) -> Result<Vec<QueryNode>, ParseError> {
        let tok = self.peek().clone();
        match tok.tok {
            Tok::Word(w) => {
                self.bump();
                self.word_terms(&tok, w)
                    .map(|ts| ts.into_iter().map(QueryNode::Term).collect())
            }
            Tok::Op(name) => {
                let kind = self.classify(&tok, name)?;
                let expected = if proximity_only {
                    "a term or proximity operator"
                } else {
                    "a term or belief operator"
                };
                match kind {
                    OpKind::Filter(_) => {
                        return Err(self.error_at(
                            &tok,
                            format!("{expected} (numeric filters are only allowed at top level)"),
                        ))
                    }
                    OpKind::Combine if proximity_only => return Err(self.error_at(&tok, expected)),
                    _ => {}
                }
                self.bump();
                self.depth += 1;
                if self.depth > MAX_DEPTH {
                    return Err(self.error_at(&tok, "less deeply nested operators"));
                }
                let node = match kind {
                    OpKind::Combine => self.group(&tok, 1, Self::belief).map(QueryNode::Combine),
                    OpKind::Syn => self.group(&tok, 1, Self::prox).map(QueryNode::Syn),
                    OpKind::Ordered(width) => self
                        .window_terms(&tok)
                        .map(|terms| QueryNode::OrderedWindow { width, terms }),
                    OpKind::Unordered(width) => self
                        .window_terms(&tok)
                        .map(|terms| QueryNode::UnorderedWindow { width, terms }),
                    OpKind::Filter(_) => unreachable!("handled above"),
                };
                self.depth -= 1;
                node.map(|n| vec![n])
            }
            _ => Err(self.error_here(if proximity_only {
                "a term or proximity operator"
            } else {
                "a term or operator"
            })),
        }
    }

    fn expect_open(&mut self, op: &Spanned<'_>) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Open {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("'(' after {}", op.tok)))
        }
    }

    fn group(
        &mut self,
        op: &Spanned<'_>,
        min: usize,
        mut child: impl FnMut(&mut Self) -> Result<Vec<QueryNode>, ParseError>,
    ) -> Result<Vec<QueryNode>, ParseError> {
        self.expect_open(op)?;
        let mut children = Vec::new();
        while !matches!(self.peek().tok, Tok::Close | Tok::End) {
            children.extend(child(self)?);
        }
        if children.len() < min {
            return Err(self.error_here(format!("at least {min} argument(s) to {}", op.tok)));
        }
        self.close()?;
        Ok(children)
    }

    fn close(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Close {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here("')'"))
        }
    }

    fn window_terms(&mut self, op: &Spanned<'_>) -> Result<Vec<String>, ParseError> {
        self.expect_open(op)?;
        let mut terms = Vec::new();
        loop {
            let tok = self.peek().clone();
            match tok.tok {
                Tok::Word(w) => {
                    self.bump();
                    terms.extend(self.word_terms(&tok, w)?);
                }
                Tok::Close | Tok::End => break,
                _ => return Err(self.error_at(&tok, format!("a plain term inside {}", op.tok))),
            }
        }
        if terms.len() < 2 {
            return Err(self.error_here(format!("at least 2 terms in {}", op.tok)));
        }
        self.close()?;
        Ok(terms)
    }

    fn word_terms(&self, tok: &Spanned<'_>, word: &str) -> Result<Vec<String>, ParseError> {
        let terms = tokenize(word);
        if terms.is_empty() {
            return Err(self.error_at(tok, "a term containing letters or digits"));
        }
        Ok(terms)
    }

    fn filter(&mut self, kind: &'static str) -> Result<NumericFilter, ParseError> {
        let op_tok = self.toks[self.pos - 1].clone();
        self.expect_open(&op_tok)?;
        let field_tok = self.bump();
        let field = match field_tok.tok {
            Tok::Word(w) if !w.is_empty() && w.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                w.to_lowercase()
            }
            _ => return Err(self.error_at(&field_tok, "a field name")),
        };
        let first = self.int()?;
        let op = match kind {
            "greater" => FilterOp::Greater(first),
            "less" => FilterOp::Less(first),
            "equals" => FilterOp::Equals(first),
            _ => {
                let at = self.peek().clone();
                let second = self.int()?;
                if first > second {
                    return Err(self.error_at(&at, format!("an upper bound >= {first}")));
                }
                FilterOp::Between(first, second)
            }
        };
        self.close()?;
        Ok(NumericFilter { field, op })
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let tok = self.bump();
        match tok.tok {
            Tok::Word(w) => w
                .parse::<i64>()
                .map_err(|_| self.error_at(&tok, "a 64-bit integer")),
            _ => Err(self.error_at(&tok, "a 64-bit integer")),
        }
    }
}
