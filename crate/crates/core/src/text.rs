//! Matching tokenizer shared by dictionary scanning, title rules and tag windows.
//!
//! Tokens are maximal runs of alphanumeric characters, lowercased. Everything
//! else (including hyphens) separates tokens, so `Seven-Eleven` yields
//! `["seven", "eleven"]`.

/// One token with its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            if current.is_empty() {
                start = i;
            }
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            out.push(Token { text: std::mem::take(&mut current), start, end: i });
        }
    }
    if !current.is_empty() {
        out.push(Token { text: current, start, end: text.len() });
    }
    out
}

/// Token strings only.
pub fn token_strings(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.text).collect()
}

/// Canonical space-joined form of a term, used for dictionary keys.
pub fn normalize_term(text: &str) -> String {
    token_strings(text).join(" ")
}
