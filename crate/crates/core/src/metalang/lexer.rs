use std::ops::Range;

use super::SyntaxError;

/// Operator keywords, case-sensitive exactly as written.
pub const OPERATOR_KEYWORDS: [&str; 13] =
    ["where", "who", "how", "Se", "what", "which", "Semant", "Cons", "profile", "Union", "Inters", "Differ", "Agg"];

pub const AGG_KEYWORDS: [&str; 3] = ["SUM", "COUNT", "AVG"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Ident,
    Number,
    AggKind,
    Comparator,
    ArithOp,
    LParen,
    RParen,
    Comma,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offsets into the input.
    pub span: Range<usize>,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }
}

/// `letter { letter | digit | _ }`, excluding reserved words.
pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    bytes.next().is_some_and(|b| b.is_ascii_alphabetic())
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
        && !OPERATOR_KEYWORDS.contains(&s)
        && !AGG_KEYWORDS.contains(&s)
}

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r')
}

/// Maximal-munch tokenizer. Whitespace separates tokens and is otherwise
/// dropped; any character outside the token alphabet is a `Lex` error at its
/// byte offset.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let kind = match b {
            _ if is_space(b) => {
                i += 1;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                if OPERATOR_KEYWORDS.contains(&word) {
                    TokenKind::Keyword
                } else if AGG_KEYWORDS.contains(&word) {
                    TokenKind::AggKind
                } else {
                    TokenKind::Ident
                }
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                TokenKind::Number
            }
            b'<' => {
                i += 1;
                if i < bytes.len() && (bytes[i] == b'>' || bytes[i] == b'=') {
                    i += 1;
                }
                TokenKind::Comparator
            }
            b'>' => {
                i += 1;
                if i < bytes.len() && bytes[i] == b'=' {
                    i += 1;
                }
                TokenKind::Comparator
            }
            b'=' => {
                i += 1;
                TokenKind::Comparator
            }
            b'+' | b'-' | b'*' | b'/' => {
                i += 1;
                TokenKind::ArithOp
            }
            b'(' => {
                i += 1;
                TokenKind::LParen
            }
            b')' => {
                i += 1;
                TokenKind::RParen
            }
            b',' => {
                i += 1;
                TokenKind::Comma
            }
            b'.' => {
                i += 1;
                TokenKind::Dot
            }
            _ => return Err(SyntaxError::Lex { offset: start }),
        };
        tokens.push(Token { kind, text: text[start..i].to_string(), span: start..i });
    }
    Ok(tokens)
}
