use super::types::TokenSequence;

/// Splits text into maximal alphanumeric runs; every other non-whitespace
/// character becomes a token of its own. Offsets are byte positions.
pub fn tokenize(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    let mut offsets = Vec::new();
    let mut run_start: Option<usize> = None;

    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            run_start.get_or_insert(i);
            continue;
        }
        if let Some(s) = run_start.take() {
            tokens.push(text[s..i].to_string());
            offsets.push((s, i));
        }
        if !c.is_whitespace() {
            let e = i + c.len_utf8();
            tokens.push(text[i..e].to_string());
            offsets.push((i, e));
        }
    }
    if let Some(s) = run_start {
        tokens.push(text[s..].to_string());
        offsets.push((s, text.len()));
    }
    TokenSequence { tokens, offsets }
}
