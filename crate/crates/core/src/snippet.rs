//! Result excerpts.
//!
//! Snippets are rendered from the stored token stream (lowercased terms
//! joined by single spaces), not from the original document bytes.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnippetConfig {
    /// Excerpt length in tokens; at least 1.
    pub window_width: usize,
    pub open_marker: String,
    pub close_marker: String,
}

impl Default for SnippetConfig {
    fn default() -> Self {
        Self {
            window_width: 30,
            open_marker: "<b>".to_string(),
            close_marker: "</b>".to_string(),
        }
    }
}

const ELLIPSIS: &str = "...";

/// Picks the leftmost `window_width`-token window with the most matches and
/// renders it, highlighting matched tokens. `"..."` marks each document edge
/// the window does not reach. Out-of-range match positions are ignored.
pub fn generate_snippet(tokens: &[&str], matches: &[u32], config: &SnippetConfig) -> String {
    let width = config.window_width.max(1);
    let mut is_match = vec![false; tokens.len()];
    for &m in matches {
        if let Some(slot) = is_match.get_mut(m as usize) {
            *slot = true;
        }
    }
    let start = best_window(&is_match, width);
    let end = (start + width).min(tokens.len());

    let mut parts: Vec<String> = Vec::with_capacity(end - start + 2);
    if start > 0 {
        parts.push(ELLIPSIS.to_string());
    }
    for i in start..end {
        if is_match[i] {
            parts.push(format!(
                "{}{}{}",
                config.open_marker, tokens[i], config.close_marker
            ));
        } else {
            parts.push(tokens[i].to_string());
        }
    }
    if end < tokens.len() {
        parts.push(ELLIPSIS.to_string());
    }
    parts.join(" ")
}

/// Leftmost start of a `width`-wide window maximizing the number of matches.
pub(crate) fn best_window(is_match: &[bool], width: usize) -> usize {
    if is_match.len() <= width {
        return 0;
    }
    let mut count = is_match[..width].iter().filter(|&&m| m).count();
    let (mut best, mut best_count) = (0, count);
    for start in 1..=is_match.len() - width {
        count -= usize::from(is_match[start - 1]);
        count += usize::from(is_match[start + width - 1]);
        if count > best_count {
            best = start;
            best_count = count;
        }
    }
    best
}
