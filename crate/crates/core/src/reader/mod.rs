//! Source text to syntax trees.

mod lexer;
mod parser;

use std::rc::Rc;

pub use lexer::{tokenize, Bracket, Token, TokenKind};

use crate::ast::{Expr, Pattern, TopForm};
use crate::error::ParseError;

/// Parses every top-level form in `text`.
pub fn parse_program(text: &str) -> Result<Vec<TopForm>, ParseError> {
    parser::Parser::new(text)?.program()
}

/// Parses exactly one expression.
pub fn parse_expr(text: &str) -> Result<Rc<Expr>, ParseError> {
    let mut p = parser::Parser::new(text)?;
    let e = p.expr()?;
    if !p.at_end() {
        return Err(ParseError::new(Default::default(), "trailing input after expression"));
    }
    Ok(e)
}

/// Parses exactly one pattern and checks its ellipsis placement.
pub fn parse_pattern(text: &str) -> Result<Rc<Pattern>, ParseError> {
    let mut p = parser::Parser::new(text)?;
    let pos = Default::default();
    let pat = p.pattern()?;
    if !p.at_end() {
        return Err(ParseError::new(pos, "trailing input after pattern"));
    }
    parser::validate_pattern(&pat, pos)?;
    Ok(pat)
}
