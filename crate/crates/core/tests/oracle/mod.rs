//! Brute-force reference implementations used by property and acceptance
//! tests. Everything here works directly on raw token vectors and shares no
//! code with the index or retrieval paths.

#![allow(dead_code)]

use std::collections::BTreeSet;

use luandri::{FilterOp, NumericFilter, QueryNode};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Doc = Vec<String>;

/// Start offsets of exact consecutive occurrences of `phrase`.
pub fn phrase_starts(doc: &[String], phrase: &[String]) -> Vec<u32> {
    if phrase.is_empty() || phrase.len() > doc.len() {
        return Vec::new();
    }
    (0..=doc.len() - phrase.len())
        .filter(|&i| doc[i..i + phrase.len()] == *phrase)
        .map(|i| i as u32)
        .collect()
}

/// Every position tuple `(p1 < p2 < …)` with `doc[p_k] == terms[k]` and
/// consecutive gaps of at most `width`.
pub fn ordered_tuples(doc: &[String], width: u32, terms: &[String]) -> Vec<Vec<u32>> {
    fn extend(
        doc: &[String],
        width: u32,
        terms: &[String],
        prefix: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let k = prefix.len();
        if k == terms.len() {
            out.push(prefix.clone());
            return;
        }
        let range: Vec<usize> = match prefix.last() {
            None => (0..doc.len()).collect(),
            Some(&p) => (p as usize + 1..doc.len().min(p as usize + 1 + width as usize)).collect(),
        };
        for i in range {
            if doc[i] == terms[k] {
                prefix.push(i as u32);
                extend(doc, width, terms, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(doc, width, terms, &mut Vec::new(), &mut out);
    out
}

/// Ordered-window match starts by direct scan of the token array: from each
/// anchor, step to the nearest next-term token within `width`.
pub fn ordered_window_starts(doc: &[String], width: u32, terms: &[String]) -> Vec<u32> {
    let mut out = Vec::new();
    for anchor in 0..doc.len() {
        if doc[anchor] != terms[0] {
            continue;
        }
        let mut cur = anchor;
        let mut ok = true;
        for term in &terms[1..] {
            let next = (cur + 1..=(cur + width as usize).min(doc.len().saturating_sub(1)))
                .find(|&j| doc[j] == *term);
            match next {
                Some(j) => cur = j,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            out.push(anchor as u32);
        }
    }
    out
}

fn covers(doc: &[String], l: usize, r: usize, terms: &[String]) -> bool {
    terms.iter().all(|t| doc[l..=r].contains(t))
}

/// Left ends of all minimal covering intervals within the span budget,
/// found by enumerating every interval.
pub fn minimal_interval_starts(doc: &[String], width: u32, terms: &[String]) -> Vec<u32> {
    let budget = width as usize * terms.len();
    let mut out = Vec::new();
    for l in 0..doc.len() {
        for r in l..doc.len() {
            if !covers(doc, l, r, terms) {
                continue;
            }
            let shrink_left = l < r && covers(doc, l + 1, r, terms);
            let shrink_right = l < r && covers(doc, l, r - 1, terms);
            if !shrink_left && !shrink_right && r - l + 1 <= budget {
                out.push(l as u32);
            }
        }
    }
    out
}

/// Query shapes the reference scorer understands.
#[derive(Debug, Clone)]
pub enum OracleNode {
    Term(String),
    Ordered(u32, Vec<String>),
    Syn(Vec<OracleNode>),
    Combine(Vec<OracleNode>),
}

impl OracleNode {
    pub fn to_query(&self) -> String {
        match self {
            OracleNode::Term(t) => t.clone(),
            OracleNode::Ordered(n, terms) => format!("#od{n}( {} )", terms.join(" ")),
            OracleNode::Syn(c) => format!(
                "#syn( {} )",
                c.iter()
                    .map(OracleNode::to_query)
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            OracleNode::Combine(c) => c
                .iter()
                .map(OracleNode::to_query)
                .collect::<Vec<_>>()
                .join(" "),
        }
    }

    fn matches(&self, doc: &[String]) -> BTreeSet<u32> {
        match self {
            OracleNode::Term(t) => doc
                .iter()
                .enumerate()
                .filter(|(_, d)| *d == t)
                .map(|(i, _)| i as u32)
                .collect(),
            OracleNode::Ordered(n, terms) => {
                ordered_window_starts(doc, *n, terms).into_iter().collect()
            }
            OracleNode::Syn(children) => children.iter().flat_map(|c| c.matches(doc)).collect(),
            OracleNode::Combine(_) => unreachable!("belief node"),
        }
    }
}

/// Reference ranking: `(docid, score)` sorted by score descending, docid
/// ascending, over documents containing at least one leaf occurrence.
pub fn rank(docs: &[Doc], query: &OracleNode, mu: f64) -> Vec<(u64, f64)> {
    let total: usize = docs.iter().map(Vec::len).sum();
    enum Tree {
        Leaf(Vec<usize>, usize),
        Mean(Vec<Tree>),
    }
    fn build(node: &OracleNode, docs: &[Doc]) -> Option<Tree> {
        match node {
            OracleNode::Combine(children) => {
                let kept: Vec<Tree> = children.iter().filter_map(|c| build(c, docs)).collect();
                (!kept.is_empty()).then_some(Tree::Mean(kept))
            }
            leaf => {
                let tfs: Vec<usize> = docs.iter().map(|d| leaf.matches(d).len()).collect();
                let cf: usize = tfs.iter().sum();
                (cf > 0).then_some(Tree::Leaf(tfs, cf))
            }
        }
    }
    fn score(tree: &Tree, i: usize, doclen: usize, total: usize, mu: f64) -> f64 {
        match tree {
            Tree::Leaf(tfs, cf) => {
                ((tfs[i] as f64 + mu * *cf as f64 / total as f64) / (doclen as f64 + mu)).ln()
            }
            Tree::Mean(children) => {
                children
                    .iter()
                    .map(|c| score(c, i, doclen, total, mu))
                    .sum::<f64>()
                    / children.len() as f64
            }
        }
    }
    fn any_match(tree: &Tree, i: usize) -> bool {
        match tree {
            Tree::Leaf(tfs, _) => tfs[i] > 0,
            Tree::Mean(children) => children.iter().any(|c| any_match(c, i)),
        }
    }
    if total == 0 {
        return Vec::new();
    }
    let Some(tree) = build(query, docs) else {
        return Vec::new();
    };
    let mut out: Vec<(u64, f64)> = (0..docs.len())
        .filter(|&i| any_match(&tree, i))
        .map(|i| (i as u64 + 1, score(&tree, i, docs[i].len(), total, mu)))
        .collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

pub fn vocab(size: usize) -> Vec<String> {
    (0..size).map(|i| format!("t{i}")).collect()
}

pub fn random_corpus(
    rng: &mut impl Rng,
    max_docs: usize,
    vocab: &[String],
    max_len: usize,
) -> Vec<Doc> {
    let n = rng.gen_range(1..=max_docs);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            (0..len)
                .map(|_| vocab.choose(rng).unwrap().clone())
                .collect()
        })
        .collect()
}

/// Random belief query over `vocab` (possibly with out-of-vocabulary terms).
pub fn random_ast(rng: &mut impl Rng, depth: u32) -> QueryNode {
    let term = |rng: &mut dyn rand::RngCore| {
        let pool = ["a", "b", "c", "deep", "x1", "2009", "ünï", "zz"];
        pool[rng.gen_range(0..pool.len())].to_string()
    };
    let terms = |rng: &mut dyn rand::RngCore| {
        let n = rng.gen_range(2..5);
        (0..n).map(|_| term(rng)).collect::<Vec<_>>()
    };
    let choice = if depth == 0 {
        rng.gen_range(0..3)
    } else {
        rng.gen_range(0..5)
    };
    match choice {
        0 => QueryNode::Term(term(rng)),
        1 => QueryNode::OrderedWindow {
            width: rng.gen_range(1..20),
            terms: terms(rng),
        },
        2 => QueryNode::UnorderedWindow {
            width: rng.gen_range(1..20),
            terms: terms(rng),
        },
        3 => {
            let n = rng.gen_range(1..4);
            QueryNode::Syn((0..n).map(|_| random_prox(rng, depth - 1)).collect())
        }
        _ => {
            let n = rng.gen_range(1..4);
            QueryNode::Combine((0..n).map(|_| random_ast(rng, depth - 1)).collect())
        }
    }
}

fn random_prox(rng: &mut impl Rng, depth: u32) -> QueryNode {
    loop {
        let n = random_ast(rng, depth);
        if n.is_proximity() {
            return n;
        }
    }
}

pub fn random_filters(rng: &mut impl Rng) -> Vec<NumericFilter> {
    let n = rng.gen_range(0..3);
    (0..n)
        .map(|_| {
            let a: i64 = rng.gen_range(-5000..5000);
            let b = a + rng.gen_range(0..100);
            let op = match rng.gen_range(0..4) {
                0 => FilterOp::Greater(a),
                1 => FilterOp::Less(a),
                2 => FilterOp::Between(a, b),
                _ => FilterOp::Equals(a),
            };
            NumericFilter {
                field: ["year", "month", "n_2"][rng.gen_range(0..3)].to_string(),
                op,
            }
        })
        .collect()
}

/// Fifty malformed queries with the byte offset of the first offending token.
pub const MALFORMED: [(&str, usize); 50] = [
    ("", 0),
    ("   ", 3),
    ("(", 0),
    (")", 0),
    ("a )", 2),
    ("a (", 2),
    ("#", 0),
    ("#foo(a)", 0),
    ("#weight(1 a)", 0),
    ("#wsyn(1 a)", 0),
    ("#od(a b)", 0),
    ("#od0(a b)", 0),
    ("#uw0(a b)", 0),
    ("#od99999999999(a b)", 0),
    ("#od1 a b", 5),
    ("#od1(a)", 6),
    ("#uw3(a)", 6),
    ("#od1()", 5),
    ("#od1(a b", 8),
    ("#uw2(a #od1(b c))", 7),
    ("#od1(a (b))", 7),
    ("#combine()", 9),
    ("#combine(a", 10),
    ("#combine a", 9),
    ("#combine(a))", 11),
    ("#syn()", 5),
    ("#syn(a", 6),
    ("#syn( #combine(a) )", 6),
    ("#syn( #greater(year 1) )", 6),
    ("#combine( #greater(year 1) )", 10),
    ("#od1( a #less(x 1) )", 8),
    ("#greater(year 2009)", 19),
    ("#greater(year)", 13),
    ("#greater(year x)", 14),
    ("#greater(2009)", 13),
    ("#greater(year 1 2)", 16),
    ("#greater year 1", 9),
    ("#less(y 1.5)", 8),
    ("#equals(y)", 9),
    ("#between(y 1)", 12),
    ("#between(y 5 1)", 13),
    ("#between(y a b)", 11),
    ("a #between(y 1 2", 16),
    ("!!!", 0),
    ("a ---", 2),
    ("#combine( ... )", 10),
    ("#od2( a ?? )", 8),
    ("a #greater(y 99999999999999999999)", 13),
    ("((a))", 0),
    ("#syn(a b) #foo", 10),
];
