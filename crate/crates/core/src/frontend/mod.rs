//! Tokenizer and parser for ECO-mini source.

pub mod ast;
pub mod parser;
pub mod token;

pub use parser::{parse, parse_with_mode, ParseMode};
pub use token::{tokenize, Token, TokenKind};

use crate::diagnostic::Diagnostic;
use ast::Module;

/// Tokenizes and parses one source file.
pub fn parse_source(source: &str, file: &str, mode: ParseMode) -> Result<Module, Vec<Diagnostic>> {
    let tokens = tokenize(source, file)?;
    parse_with_mode(&tokens, file, mode)
}
