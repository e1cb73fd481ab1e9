//! The query metalanguage: tokenizer, parser, canonical printer and the
//! catalog-aware validator.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod validate;

pub use ast::*;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;
pub use printer::pretty_print;
pub use validate::{validate, BoundQuery, EntityBinding, ItemBinding, ValidateError, ValidatedQuery};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("unexpected character at offset {offset}")]
    Lex { offset: usize },
    #[error("expected {expected}, found {found} at offset {offset}")]
    Parse { expected: String, found: String, offset: usize },
    #[error("{operator}() needs at least one argument (offset {offset})")]
    EmptyArgList { operator: String, offset: usize },
}
