/// Default maximum span width in tokens.
pub const DEFAULT_MAX_WIDTH: usize = 12;

/// All `(start, end)` intervals (inclusive end) of at most `max_width` tokens,
/// ordered by start then end.
pub fn enumerate_spans(n_tokens: usize, max_width: usize) -> Vec<(usize, usize)> {
    assert!(max_width >= 1, "max_width must be at least 1");
    let mut spans = Vec::with_capacity(span_count(n_tokens, max_width));
    for s in 0..n_tokens {
        for e in s..n_tokens.min(s + max_width) {
            spans.push((s, e));
        }
    }
    spans
}

/// Closed form of `enumerate_spans(n, w).len()`.
pub fn span_count(n_tokens: usize, max_width: usize) -> usize {
    (1..=max_width.min(n_tokens)).map(|w| n_tokens - w + 1).sum()
}
