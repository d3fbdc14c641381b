use std::rc::Rc;

use super::lexer::{tokenize, Bracket, Token, TokenKind};
use crate::ast::*;
use crate::error::ParseError;

const KEYWORDS: &[&str] = &[
    "define",
    "lambda",
    "if",
    "let",
    "letrec",
    "match-all",
    "match",
    "matcher",
    "algebraic-data-matcher",
    "loop",
];

pub struct Parser {
    tokens: Vec<Token>,
    at: usize,
    end: Pos,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(text: &str) -> PResult<Self> {
        let tokens = tokenize(text)?;
        let end = end_pos(text);
        Ok(Parser { tokens, at: 0, end })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_kind_at(&self, offset: usize) -> Option<&TokenKind> {
        self.tokens.get(self.at + offset).map(|t| &t.kind)
    }

    fn pos(&self) -> Pos {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn next(&mut self, what: &str) -> PResult<Token> {
        match self.tokens.get(self.at) {
            Some(t) => {
                self.at += 1;
                Ok(t.clone())
            }
            None => Err(ParseError::eof(self.end, format!("unexpected end of input, expected {what}"))),
        }
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.tokens.len()
    }

    fn expect_open(&mut self, b: Bracket, what: &str) -> PResult<Pos> {
        let tok = self.next(what)?;
        match tok.kind {
            TokenKind::Open(found) if found == b => Ok(tok.pos),
            _ => Err(ParseError::new(tok.pos, format!("expected '{}' to start {what}", b.open_str()))),
        }
    }

    fn expect_close(&mut self, b: Bracket, what: &str) -> PResult<()> {
        let tok = self.next(&format!("'{}'", b.close_str()))?;
        match tok.kind {
            TokenKind::Close(found) if found == b => Ok(()),
            _ => Err(ParseError::new(tok.pos, format!("expected '{}' to close {what}", b.close_str()))),
        }
    }

    fn at_close(&self, b: Bracket) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Close(found)) if *found == b)
    }

    fn symbol(&mut self, what: &str) -> PResult<(String, Pos)> {
        let tok = self.next(what)?;
        match tok.kind {
            TokenKind::Symbol(s) if s != "_" && s != "..." => Ok((s, tok.pos)),
            _ => Err(ParseError::new(tok.pos, format!("expected {what}"))),
        }
    }

    /// `$name` with no indices.
    fn binder(&mut self, what: &str) -> PResult<Name> {
        let tok = self.next(what)?;
        if tok.kind != TokenKind::Dollar {
            return Err(ParseError::new(tok.pos, format!("expected {what} starting with '$'")));
        }
        let (name, _) = self.symbol(what)?;
        if self.peek_kind() == Some(&TokenKind::IndexSep) {
            return Err(ParseError::new(self.pos(), format!("{what} cannot carry indices")));
        }
        Ok(name.into())
    }

    /// A whole program: defines and expressions.
    pub fn program(&mut self) -> PResult<Vec<TopForm>> {
        let mut forms = Vec::new();
        while !self.at_end() {
            forms.push(self.top_form()?);
        }
        Ok(forms)
    }

    pub fn top_form(&mut self) -> PResult<TopForm> {
        let pos = self.pos();
        let is_define = matches!(self.peek_kind(), Some(TokenKind::Open(Bracket::Paren)))
            && matches!(self.peek_kind_at(1), Some(TokenKind::Symbol(s)) if s == "define");
        if is_define {
            self.at += 2;
            let name = self.binder("name of definition")?;
            let expr = self.expr()?;
            self.expect_close(Bracket::Paren, "define")?;
            return Ok(TopForm { kind: TopKind::Define(name, expr), pos });
        }
        let expr = self.expr()?;
        Ok(TopForm { kind: TopKind::Expr(expr), pos })
    }

    pub fn expr(&mut self) -> PResult<Rc<Expr>> {
        let tok = self.next("an expression")?;
        let pos = tok.pos;
        let e = match tok.kind {
            TokenKind::Int(n) => Expr::Int(n),
            TokenKind::Bool(b) => Expr::Bool(b),
            TokenKind::Str(s) => Expr::Str(s.into()),
            TokenKind::Symbol(s) => match s.as_str() {
                "something" => Expr::Something,
                "_" | "..." => return Err(ParseError::new(pos, format!("'{s}' is only valid inside a pattern"))),
                _ if KEYWORDS.contains(&s.as_str()) => {
                    return Err(ParseError::new(pos, format!("keyword '{s}' used as a variable")))
                }
                _ => Expr::Var { name: s.into(), indices: self.indices()? },
            },
            TokenKind::Open(Bracket::Paren) => return self.paren_expr(pos),
            TokenKind::Open(Bracket::Angle) => {
                let (ctor, cpos) = self.symbol("data constructor name")?;
                if !ctor.starts_with(|c: char| c.is_uppercase()) {
                    return Err(ParseError::new(
                        cpos,
                        format!("data constructor '{ctor}' must start with an uppercase letter"),
                    ));
                }
                let mut args = Vec::new();
                while !self.at_close(Bracket::Angle) {
                    args.push(self.expr()?);
                }
                self.expect_close(Bracket::Angle, "data constructor")?;
                Expr::Inductive { ctor: ctor.into(), args }
            }
            TokenKind::Open(Bracket::Square) => Expr::Tuple(self.exprs_until(Bracket::Square, "tuple")?),
            TokenKind::Open(Bracket::Curly) => Expr::Collection(self.exprs_until(Bracket::Curly, "collection")?),
            TokenKind::Open(Bracket::Hash) => {
                let mut entries = Vec::new();
                while !self.at_close(Bracket::Hash) {
                    self.expect_open(Bracket::Square, "hash entry")?;
                    let key = self.expr()?;
                    let value = self.expr()?;
                    self.expect_close(Bracket::Square, "hash entry")?;
                    entries.push((key, value));
                }
                self.expect_close(Bracket::Hash, "hash")?;
                Expr::Hash(entries)
            }
            TokenKind::At => return Err(ParseError::new(pos, "'@' is reserved")),
            TokenKind::Close(b) => {
                return Err(ParseError::new(pos, format!("unexpected '{}'", b.close_str())));
            }
            TokenKind::Dollar | TokenKind::Comma | TokenKind::Bang | TokenKind::IndexSep => {
                return Err(ParseError::new(pos, "pattern syntax in expression position"));
            }
        };
        Ok(Rc::new(e))
    }

    fn exprs_until(&mut self, close: Bracket, what: &str) -> PResult<Vec<Rc<Expr>>> {
        let mut items = Vec::new();
        while !self.at_close(close) {
            items.push(self.expr()?);
        }
        self.expect_close(close, what)?;
        Ok(items)
    }

    /// Index expressions following `_` separators.
    fn indices(&mut self) -> PResult<Vec<Rc<Expr>>> {
        let mut out = Vec::new();
        while self.peek_kind() == Some(&TokenKind::IndexSep) {
            self.at += 1;
            let index = match self.peek_kind() {
                Some(TokenKind::Symbol(s)) if s != "_" && s != "..." && !KEYWORDS.contains(&s.as_str()) => {
                    let name = s.clone();
                    self.at += 1;
                    Rc::new(Expr::Var { name: name.into(), indices: Vec::new() })
                }
                Some(TokenKind::Int(_) | TokenKind::Open(_)) => self.expr()?,
                _ => return Err(ParseError::new(self.pos(), "expected an index expression after '_'")),
            };
            out.push(index);
        }
        Ok(out)
    }

    fn paren_expr(&mut self, pos: Pos) -> PResult<Rc<Expr>> {
        let head = match self.peek_kind() {
            Some(TokenKind::Close(Bracket::Paren)) => {
                return Err(ParseError::new(pos, "empty application '()'"));
            }
            Some(TokenKind::Symbol(s)) => s.clone(),
            _ => String::new(),
        };
        let e = match head.as_str() {
            "define" => return Err(ParseError::new(pos, "define is only allowed at top level")),
            "lambda" => {
                self.at += 1;
                self.expect_open(Bracket::Square, "parameter list")?;
                let mut params = Vec::new();
                while !self.at_close(Bracket::Square) {
                    params.push(self.binder("lambda parameter")?);
                }
                self.expect_close(Bracket::Square, "parameter list")?;
                let body = self.expr()?;
                Expr::Lambda { params, body }
            }
            "if" => {
                self.at += 1;
                let cond = self.expr()?;
                let then = self.expr()?;
                let otherwise = self.expr()?;
                Expr::If { cond, then, otherwise }
            }
            "let" | "letrec" => {
                self.at += 1;
                let bindings = self.bindings(head == "let")?;
                let body = self.expr()?;
                if head == "let" {
                    Expr::Let { bindings, body }
                } else {
                    Expr::LetRec { bindings, body }
                }
            }
            "match-all" => {
                self.at += 1;
                let target = self.expr()?;
                let matcher = self.expr()?;
                let clause = self.match_clause()?;
                Expr::MatchAll { target, matcher, clause }
            }
            "match" => {
                self.at += 1;
                let target = self.expr()?;
                let matcher = self.expr()?;
                let open = self.expect_open(Bracket::Curly, "match clauses")?;
                let mut clauses = Vec::new();
                while !self.at_close(Bracket::Curly) {
                    clauses.push(self.match_clause()?);
                }
                self.expect_close(Bracket::Curly, "match clauses")?;
                if clauses.is_empty() {
                    return Err(ParseError::new(open, "match needs at least one clause"));
                }
                Expr::Match { target, matcher, clauses }
            }
            "matcher" => {
                self.at += 1;
                self.expect_open(Bracket::Curly, "matcher clauses")?;
                let mut clauses = Vec::new();
                while !self.at_close(Bracket::Curly) {
                    clauses.push(self.matcher_clause()?);
                }
                self.expect_close(Bracket::Curly, "matcher clauses")?;
                Expr::Matcher(clauses.into())
            }
            "algebraic-data-matcher" => {
                self.at += 1;
                self.expect_open(Bracket::Curly, "constructor list")?;
                let mut ctors: Vec<CtorSpec> = Vec::new();
                while !self.at_close(Bracket::Curly) {
                    self.expect_open(Bracket::Angle, "constructor")?;
                    let (name, npos) = self.symbol("pattern constructor name")?;
                    if !name.starts_with(|c: char| c.is_lowercase()) {
                        return Err(ParseError::new(
                            npos,
                            format!("pattern constructor '{name}' must start with a lowercase letter"),
                        ));
                    }
                    if ctors.iter().any(|c| *c.name == *name) {
                        return Err(ParseError::new(npos, format!("duplicate constructor '{name}'")));
                    }
                    let mut matchers = Vec::new();
                    while !self.at_close(Bracket::Angle) {
                        matchers.push(self.expr()?);
                    }
                    self.expect_close(Bracket::Angle, "constructor")?;
                    ctors.push(CtorSpec { name: name.into(), matchers });
                }
                self.expect_close(Bracket::Curly, "constructor list")?;
                Expr::AlgebraicDataMatcher(ctors)
            }
            _ => {
                let func = self.expr()?;
                let mut args = Vec::new();
                while !self.at_close(Bracket::Paren) {
                    args.push(self.expr()?);
                }
                Expr::Apply { func, args }
            }
        };
        self.expect_close(Bracket::Paren, "form")?;
        Ok(Rc::new(e))
    }

    fn bindings(&mut self, allow_indices: bool) -> PResult<Vec<Binding>> {
        self.expect_open(Bracket::Curly, "bindings")?;
        let mut out = Vec::new();
        while !self.at_close(Bracket::Curly) {
            self.expect_open(Bracket::Square, "binding")?;
            let var = self.pat_var(allow_indices)?;
            let expr = self.expr()?;
            self.expect_close(Bracket::Square, "binding")?;
            out.push(Binding { var, expr });
        }
        self.expect_close(Bracket::Curly, "bindings")?;
        Ok(out)
    }

    fn pat_var(&mut self, allow_indices: bool) -> PResult<PatVar> {
        let tok = self.next("a '$' binder")?;
        if tok.kind != TokenKind::Dollar {
            return Err(ParseError::new(tok.pos, "expected a binder starting with '$'"));
        }
        let (name, _) = self.symbol("variable name after '$'")?;
        let indices = self.indices()?;
        if !allow_indices && !indices.is_empty() {
            return Err(ParseError::new(tok.pos, "indexed binder not allowed here"));
        }
        Ok(PatVar { name: name.into(), indices })
    }

    fn match_clause(&mut self) -> PResult<MatchClause> {
        self.expect_open(Bracket::Square, "match clause")?;
        let pos = self.pos();
        let pattern = self.pattern()?;
        validate_pattern(&pattern, pos)?;
        let body = self.expr()?;
        self.expect_close(Bracket::Square, "match clause")?;
        Ok(MatchClause { pattern, body })
    }

    pub fn pattern(&mut self) -> PResult<Rc<Pattern>> {
        let tok = self.next("a pattern")?;
        let pos = tok.pos;
        let p = match tok.kind {
            TokenKind::Symbol(s) if s == "_" => Pattern::Wildcard,
            TokenKind::Symbol(s) if s == "..." => Pattern::Ellipsis,
            TokenKind::Dollar => {
                self.at -= 1;
                Pattern::Var(self.pat_var(true)?)
            }
            TokenKind::Comma => Pattern::Value(self.expr()?),
            TokenKind::Bang => Pattern::Not(self.pattern()?),
            TokenKind::Open(Bracket::Angle) => {
                let (ctor, cpos) = self.symbol("pattern constructor name")?;
                if !ctor.starts_with(|c: char| c.is_lowercase()) {
                    return Err(ParseError::new(
                        cpos,
                        format!("pattern constructor '{ctor}' must start with a lowercase letter"),
                    ));
                }
                let mut args = Vec::new();
                while !self.at_close(Bracket::Angle) {
                    args.push(self.pattern()?);
                }
                self.expect_close(Bracket::Angle, "inductive pattern")?;
                Pattern::Inductive { ctor: ctor.into(), args }
            }
            TokenKind::Open(Bracket::Square) => {
                let mut items = Vec::new();
                while !self.at_close(Bracket::Square) {
                    items.push(self.pattern()?);
                }
                self.expect_close(Bracket::Square, "tuple pattern")?;
                Pattern::Tuple(items)
            }
            TokenKind::Open(Bracket::Paren) => return self.paren_pattern(pos),
            TokenKind::At => return Err(ParseError::new(pos, "'@' is reserved")),
            _ => return Err(ParseError::new(pos, "expected a pattern")),
        };
        Ok(Rc::new(p))
    }

    fn paren_pattern(&mut self, pos: Pos) -> PResult<Rc<Pattern>> {
        let (head, _) = self.symbol("pattern form ('|', '&', let or loop)")?;
        let p = match head.as_str() {
            "|" | "&" => {
                let mut items = Vec::new();
                while !self.at_close(Bracket::Paren) {
                    items.push(self.pattern()?);
                }
                if head == "|" {
                    Pattern::Or(items)
                } else {
                    Pattern::And(items)
                }
            }
            "let" => {
                let bindings = self.bindings(true)?;
                let body = self.pattern()?;
                Pattern::Let { bindings, body }
            }
            "loop" => {
                let index = self.binder("loop index variable")?;
                let range = self.index_range()?;
                let repeat = self.pattern()?;
                let end = self.pattern()?;
                Pattern::Loop(Rc::new(LoopPattern { index, range, repeat, end }))
            }
            other => return Err(ParseError::new(pos, format!("unknown pattern form '({other}'"))),
        };
        self.expect_close(Bracket::Paren, "pattern form")?;
        Ok(Rc::new(p))
    }

    /// Whether the next tokens begin a pattern rather than an expression
    /// inside a two-component index range.
    fn pattern_ahead(&self) -> bool {
        match self.peek_kind() {
            Some(TokenKind::Dollar | TokenKind::Comma | TokenKind::Bang) => true,
            Some(TokenKind::Symbol(s)) => s == "_",
            Some(TokenKind::Open(Bracket::Paren)) => {
                matches!(self.peek_kind_at(1), Some(TokenKind::Symbol(s)) if s == "&" || s == "|")
            }
            _ => false,
        }
    }

    fn index_range(&mut self) -> PResult<IndexRange> {
        let open = self.expect_open(Bracket::Square, "index range")?;
        let start = self.expr()?;
        let from_start = || Rc::new(Expr::Apply { func: var("from"), args: vec![start.clone()] });
        if self.at_close(Bracket::Square) {
            self.at += 1;
            return Ok(IndexRange { start: start.clone(), ends: from_start(), end_number: wildcard() });
        }
        if self.pattern_ahead() {
            let end_number = self.pattern()?;
            self.expect_close(Bracket::Square, "index range")?;
            return Ok(IndexRange { start: start.clone(), ends: from_start(), end_number });
        }
        let ends = self.expr()?;
        if self.at_close(Bracket::Square) {
            self.at += 1;
            let ends = match &*ends {
                Expr::Int(_) => Rc::new(Expr::Collection(vec![ends])),
                _ => ends,
            };
            return Ok(IndexRange { start, ends, end_number: wildcard() });
        }
        let end_number = self.pattern()?;
        if !self.at_close(Bracket::Square) {
            return Err(ParseError::new(open, "index range takes at most 3 components"));
        }
        self.at += 1;
        Ok(IndexRange { start, ends, end_number })
    }

    fn matcher_clause(&mut self) -> PResult<MatcherClause> {
        self.expect_open(Bracket::Square, "matcher clause")?;
        let pattern = self.prim_pattern()?;
        let next_matchers = self.expr()?;
        if let Expr::Tuple(items) = &*next_matchers {
            let holes = pattern.hole_count();
            if items.len() != holes {
                return Err(ParseError::new(
                    self.pos(),
                    format!("matcher clause {pattern} has {holes} hole(s) but {} next matcher(s)", items.len()),
                ));
            }
        }
        self.expect_open(Bracket::Curly, "data clauses")?;
        let mut data = Vec::new();
        while !self.at_close(Bracket::Curly) {
            self.expect_open(Bracket::Square, "data clause")?;
            let dpos = self.pos();
            let dp = self.data_pattern()?;
            let mut seen = Vec::new();
            if let Some(dup) = duplicate_data_var(&dp, &mut seen) {
                return Err(ParseError::new(dpos, format!("variable '{dup}' bound twice in data pattern")));
            }
            let next = self.expr()?;
            self.expect_close(Bracket::Square, "data clause")?;
            data.push(DataClause { pattern: dp, next });
        }
        self.expect_close(Bracket::Curly, "data clauses")?;
        self.expect_close(Bracket::Square, "matcher clause")?;
        Ok(MatcherClause { pattern, next_matchers, data })
    }

    fn prim_pattern(&mut self) -> PResult<PrimPattern> {
        let tok = self.next("a primitive pattern pattern")?;
        match tok.kind {
            TokenKind::Dollar => {
                if matches!(self.peek(), Some(t) if t.joined && matches!(t.kind, TokenKind::Symbol(_))) {
                    return Err(ParseError::new(tok.pos, "pattern variables are not allowed here; use '$' or ',$name'"));
                }
                Ok(PrimPattern::Hole)
            }
            TokenKind::Comma => {
                let name = self.binder("value hole")?;
                Ok(PrimPattern::ValueHole(name))
            }
            TokenKind::Open(Bracket::Angle) => {
                let (ctor, _) = self.symbol("pattern constructor name")?;
                let mut args = Vec::new();
                while !self.at_close(Bracket::Angle) {
                    args.push(self.prim_pattern()?);
                }
                self.expect_close(Bracket::Angle, "primitive pattern pattern")?;
                Ok(PrimPattern::Inductive(ctor.into(), args))
            }
            _ => Err(ParseError::new(tok.pos, "expected '$', ',$name' or '<ctor ...>'")),
        }
    }

    fn data_pattern(&mut self) -> PResult<DataPattern> {
        let tok = self.next("a primitive data pattern")?;
        match tok.kind {
            TokenKind::Symbol(s) if s == "_" => Ok(DataPattern::Wildcard),
            TokenKind::Dollar => {
                let (name, _) = self.symbol("variable name after '$'")?;
                Ok(DataPattern::Var(name.into()))
            }
            TokenKind::Open(Bracket::Angle) => {
                let (ctor, _) = self.symbol("data constructor name")?;
                let mut args = Vec::new();
                while !self.at_close(Bracket::Angle) {
                    args.push(self.data_pattern()?);
                }
                self.expect_close(Bracket::Angle, "primitive data pattern")?;
                Ok(DataPattern::Inductive(ctor.into(), args))
            }
            _ => Err(ParseError::new(tok.pos, "expected '$name', '_' or '<Ctor ...>'")),
        }
    }
}

fn duplicate_data_var(dp: &DataPattern, seen: &mut Vec<Name>) -> Option<Name> {
    match dp {
        DataPattern::Var(n) => {
            if seen.contains(n) {
                Some(n.clone())
            } else {
                seen.push(n.clone());
                None
            }
        }
        DataPattern::Wildcard => None,
        DataPattern::Inductive(_, args) => args.iter().find_map(|a| duplicate_data_var(a, seen)),
    }
}

fn var(name: &str) -> Rc<Expr> {
    Rc::new(Expr::Var { name: name.into(), indices: Vec::new() })
}

fn wildcard() -> Rc<Pattern> {
    Rc::new(Pattern::Wildcard)
}

fn end_pos(text: &str) -> Pos {
    let mut pos = Pos { line: 1, column: 1 };
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

/// Checks ellipsis placement for a whole match-clause pattern: every loop's
/// repeat pattern owns exactly one ellipsis, no ellipsis escapes a loop, and
/// no not-pattern separates an ellipsis from its loop.
pub fn validate_pattern(p: &Pattern, pos: Pos) -> PResult<()> {
    let stray = count_ellipses(p, pos, false)?;
    if stray > 0 {
        return Err(ParseError::new(pos, "ellipsis '...' outside of a loop's repeat pattern"));
    }
    Ok(())
}

/// Returns the number of ellipses that belong to the innermost enclosing
/// loop. An ellipsis in a nested loop's end or end-number pattern belongs to
/// the enclosing loop because the nested context is already popped there.
fn count_ellipses(p: &Pattern, pos: Pos, under_not: bool) -> PResult<usize> {
    Ok(match p {
        Pattern::Ellipsis => {
            if under_not {
                return Err(ParseError::new(pos, "ellipsis '...' inside a not-pattern"));
            }
            1
        }
        Pattern::Wildcard | Pattern::Var(_) | Pattern::Value(_) => 0,
        Pattern::Inductive { args: ps, .. } | Pattern::Or(ps) | Pattern::And(ps) | Pattern::Tuple(ps) => {
            let mut n = 0;
            for q in ps {
                n += count_ellipses(q, pos, under_not)?;
            }
            n
        }
        Pattern::Not(q) => count_ellipses(q, pos, true)?,
        Pattern::Let { body, .. } => count_ellipses(body, pos, under_not)?,
        Pattern::Loop(lp) => {
            let own = count_ellipses(&lp.repeat, pos, false)?;
            if own != 1 {
                return Err(ParseError::new(
                    pos,
                    format!("repeat pattern of loop ${} must contain exactly one ellipsis, found {own}", lp.index),
                ));
            }
            count_ellipses(&lp.end, pos, under_not)? + count_ellipses(&lp.range.end_number, pos, under_not)?
        }
    })
}
