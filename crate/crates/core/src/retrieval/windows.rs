//! Match extraction for `#odN` and `#uwN`.
//!
//! Both evaluators take, for one document, the sorted occurrence positions of
//! each operator argument (in argument order) and return match start
//! positions in ascending order.

/// Ordered window: for each occurrence `p1` of the first term, greedily take
/// the nearest following occurrence of each next term no more than `width`
/// positions after the previous one. Each anchor yields at most one match.
pub fn eval_ordered_window(width: u32, positions: &[&[u32]]) -> Vec<u32> {
    ordered_matches(width, positions)
        .into_iter()
        .map(|tuple| tuple[0])
        .collect()
}

/// Full position tuples of every ordered-window match.
pub(crate) fn ordered_matches(width: u32, positions: &[&[u32]]) -> Vec<Vec<u32>> {
    let Some((first, rest)) = positions.split_first() else {
        return Vec::new();
    };
    if rest.is_empty() {
        return first.iter().map(|&p| vec![p]).collect();
    }
    let mut out = Vec::new();
    'anchor: for &anchor in *first {
        let mut tuple = Vec::with_capacity(positions.len());
        tuple.push(anchor);
        let mut prev = anchor;
        for list in rest {
            let i = list.partition_point(|&p| p <= prev);
            match list.get(i) {
                Some(&next) if u64::from(next) - u64::from(prev) <= u64::from(width) => {
                    tuple.push(next);
                    prev = next;
                }
                _ => continue 'anchor,
            }
        }
        out.push(tuple);
    }
    out
}

/// Unordered window: left endpoint of every minimal interval covering at
/// least one occurrence of each argument, provided its span `r - l + 1` is at
/// most `width × argument count`.
pub fn eval_unordered_window(width: u32, positions: &[&[u32]]) -> Vec<u32> {
    unordered_matches(width, positions)
        .into_iter()
        .map(|(l, _)| l)
        .collect()
}

/// `(left, right)` bounds of every qualifying minimal interval.
pub(crate) fn unordered_matches(width: u32, positions: &[&[u32]]) -> Vec<(u32, u32)> {
    if positions.is_empty() || positions.iter().any(|p| p.is_empty()) {
        return Vec::new();
    }
    let budget = u64::from(width) * positions.len() as u64;

    let mut occurrences: Vec<u32> = positions.iter().flat_map(|p| p.iter().copied()).collect();
    occurrences.sort_unstable();
    occurrences.dedup();

    // Smallest right end of an interval starting at `l` that covers every
    // argument; non-decreasing in `l`.
    let right_end = |l: u32| -> Option<u32> {
        positions
            .iter()
            .map(|list| list.get(list.partition_point(|&p| p < l)).copied())
            .try_fold(0u32, |acc, p| p.map(|p| acc.max(p)))
    };

    let mut out = Vec::new();
    let mut current = occurrences
        .first()
        .and_then(|&l| right_end(l).map(|r| (l, r)));
    let mut idx = 0;
    while let Some((l, r)) = current {
        idx += 1;
        let next = occurrences
            .get(idx)
            .and_then(|&nl| right_end(nl).map(|nr| (nl, nr)));
        // [l, r] is minimal unless dropping l keeps the same right end.
        let minimal = next.is_none_or(|(_, nr)| nr > r);
        if minimal && u64::from(r - l) < budget {
            out.push((l, r));
        }
        current = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Positions of each term within a token sequence.
    fn lists(doc: &[&str], terms: &[&str]) -> Vec<Vec<u32>> {
        terms
            .iter()
            .map(|t| {
                doc.iter()
                    .enumerate()
                    .filter(|(_, d)| *d == t)
                    .map(|(i, _)| i as u32)
                    .collect()
            })
            .collect()
    }

    fn od(width: u32, doc: &[&str], terms: &[&str]) -> Vec<u32> {
        let l = lists(doc, terms);
        let refs: Vec<&[u32]> = l.iter().map(Vec::as_slice).collect();
        eval_ordered_window(width, &refs)
    }

    fn uw(width: u32, doc: &[&str], terms: &[&str]) -> Vec<u32> {
        let l = lists(doc, terms);
        let refs: Vec<&[u32]> = l.iter().map(Vec::as_slice).collect();
        eval_unordered_window(width, &refs)
    }

    #[test]
    fn ordered_examples() {
        let doc = ["deep", "learning", "deep", "learning"];
        assert_eq!(od(1, &doc, &["deep", "learning"]), vec![0, 2]);
        assert!(od(1, &["deep", "x", "learning"], &["deep", "learning"]).is_empty());
        assert_eq!(od(2, &["a", "b", "a", "b"], &["a", "b"]), vec![0, 2]);
    }

    #[test]
    fn ordered_greedy_is_not_existence() {
        // Greedy commits to b@1, after which c@4 is out of reach.
        let doc = ["a", "b", "b", "x", "c"];
        assert!(od(2, &doc, &["a", "b", "c"]).is_empty());
    }

    #[test]
    fn ordered_repeated_term() {
        assert_eq!(od(1, &["a", "a", "a"], &["a", "a"]), vec![0, 1]);
    }

    #[test]
    fn unordered_examples() {
        assert_eq!(uw(2, &["a", "c", "b"], &["a", "b"]), vec![0]);
        assert_eq!(uw(1, &["a", "b"], &["a", "b"]), vec![0]);
        assert!(uw(1, &["a"], &["a", "b"]).is_empty());
        assert_eq!(uw(1, &["b", "a", "b"], &["a", "b"]), vec![0, 1]);
    }

    #[test]
    fn unordered_budget_applies() {
        // span 4 > 1 * 2
        assert!(uw(1, &["a", "x", "x", "b"], &["a", "b"]).is_empty());
        assert_eq!(uw(2, &["a", "x", "x", "b"], &["a", "b"]), vec![0]);
    }
}
