//! Case-folded word tokenization shared by the lexicon loader and matchers.

/// Splits text on every non-alphanumeric character and lowercases the pieces.
///
/// URLs go through the same path, so `example.de/afd-news` yields
/// `["example", "de", "afd", "news"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Finds every start index where `pattern` occurs as a contiguous token run.
pub fn find_token_runs(haystack: &[String], pattern: &[String]) -> Vec<usize> {
    if pattern.is_empty() || pattern.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - pattern.len())
        .filter(|&i| haystack[i..i + pattern.len()] == *pattern)
        .collect()
}
