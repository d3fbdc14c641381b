//! Syntax trees for expressions, patterns and matcher definitions.
//!
//! Every `Display` impl prints the canonical surface form: re-reading the
//! printed text yields a structurally equal tree.

use std::fmt;
use std::rc::Rc;

pub type Name = Rc<str>;

/// Line and column, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    Str(Rc<str>),
    /// `x`, `x_1`, `x_i_(+ j 1)`.
    Var { name: Name, indices: Vec<Rc<Expr>> },
    /// `<Ctor e ...>`
    Inductive { ctor: Name, args: Vec<Rc<Expr>> },
    Tuple(Vec<Rc<Expr>>),
    Collection(Vec<Rc<Expr>>),
    /// `{| [k v] ... |}`
    Hash(Vec<(Rc<Expr>, Rc<Expr>)>),
    Lambda { params: Vec<Name>, body: Rc<Expr> },
    Apply { func: Rc<Expr>, args: Vec<Rc<Expr>> },
    If { cond: Rc<Expr>, then: Rc<Expr>, otherwise: Rc<Expr> },
    Let { bindings: Vec<Binding>, body: Rc<Expr> },
    LetRec { bindings: Vec<Binding>, body: Rc<Expr> },
    MatchAll { target: Rc<Expr>, matcher: Rc<Expr>, clause: MatchClause },
    Match { target: Rc<Expr>, matcher: Rc<Expr>, clauses: Vec<MatchClause> },
    Matcher(Rc<[MatcherClause]>),
    AlgebraicDataMatcher(Vec<CtorSpec>),
    Something,
}

/// A binder with optional index expressions, as in `$x` or `$x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PatVar {
    pub name: Name,
    pub indices: Vec<Rc<Expr>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Binding {
    pub var: PatVar,
    pub expr: Rc<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub pattern: Rc<Pattern>,
    pub body: Rc<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    Wildcard,
    Var(PatVar),
    Value(Rc<Expr>),
    Inductive { ctor: Name, args: Vec<Rc<Pattern>> },
    Or(Vec<Rc<Pattern>>),
    And(Vec<Rc<Pattern>>),
    Not(Rc<Pattern>),
    Tuple(Vec<Rc<Pattern>>),
    Let { bindings: Vec<Binding>, body: Rc<Pattern> },
    Loop(Rc<LoopPattern>),
    Ellipsis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopPattern {
    pub index: Name,
    pub range: IndexRange,
    pub repeat: Rc<Pattern>,
    pub end: Rc<Pattern>,
}

/// Fully desugared `[start ends end-number-pattern]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexRange {
    pub start: Rc<Expr>,
    /// Evaluates to an ascending collection of integers, or to a single
    /// integer which stands for the one-element collection.
    pub ends: Rc<Expr>,
    pub end_number: Rc<Pattern>,
}

/// Pattern over patterns, the left part of a matcher clause.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimPattern {
    Hole,
    ValueHole(Name),
    Inductive(Name, Vec<PrimPattern>),
}

impl PrimPattern {
    pub fn hole_count(&self) -> usize {
        match self {
            PrimPattern::Hole => 1,
            PrimPattern::ValueHole(_) => 0,
            PrimPattern::Inductive(_, args) => args.iter().map(PrimPattern::hole_count).sum(),
        }
    }
}

/// Destructuring pattern over target data inside matcher clauses.
#[derive(Debug, Clone, PartialEq)]
pub enum DataPattern {
    Var(Name),
    Wildcard,
    Inductive(Name, Vec<DataPattern>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataClause {
    pub pattern: DataPattern,
    pub next: Rc<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatcherClause {
    pub pattern: PrimPattern,
    pub next_matchers: Rc<Expr>,
    pub data: Vec<DataClause>,
}

/// One constructor of an `algebraic-data-matcher`: `<name m1 ... mk>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CtorSpec {
    pub name: Name,
    pub matchers: Vec<Rc<Expr>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopKind {
    Define(Name, Rc<Expr>),
    Expr(Rc<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopForm {
    pub kind: TopKind,
    pub pos: Pos,
}

pub(crate) fn write_str_literal(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

fn write_seq<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

fn write_indices(f: &mut fmt::Formatter<'_>, indices: &[Rc<Expr>]) -> fmt::Result {
    for index in indices {
        f.write_str("_")?;
        match &**index {
            // A bare indexed variable would merge into the outer index chain.
            Expr::Var { name, indices } if !indices.is_empty() => {
                f.write_str("(")?;
                write!(f, "{name}")?;
                write_indices(f, indices)?;
                f.write_str(")")?;
            }
            other => write!(f, "{other}")?,
        }
    }
    Ok(())
}

fn write_bindings(f: &mut fmt::Formatter<'_>, bindings: &[Binding]) -> fmt::Result {
    f.write_str("{")?;
    for (i, b) in bindings.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "[{} {}]", b.var, b.expr)?;
    }
    f.write_str("}")
}

impl fmt::Display for PatVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.name)?;
        write_indices(f, &self.indices)
    }
}

impl fmt::Display for MatchClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}]", self.pattern, self.body)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Bool(true) => f.write_str("#t"),
            Expr::Bool(false) => f.write_str("#f"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Str(s) => write_str_literal(f, s),
            Expr::Var { name, indices } => {
                write!(f, "{name}")?;
                write_indices(f, indices)
            }
            Expr::Inductive { ctor, args } => {
                write!(f, "<{ctor}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(">")
            }
            Expr::Tuple(items) => {
                f.write_str("[")?;
                write_seq(f, items)?;
                f.write_str("]")
            }
            Expr::Collection(items) => {
                f.write_str("{")?;
                write_seq(f, items)?;
                f.write_str("}")
            }
            Expr::Hash(entries) => {
                f.write_str("{|")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "[{k} {v}]")?;
                }
                f.write_str("|}")
            }
            Expr::Lambda { params, body } => {
                f.write_str("(lambda [")?;
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "${p}")?;
                }
                write!(f, "] {body})")
            }
            Expr::Apply { func, args } => {
                write!(f, "({func}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Expr::If { cond, then, otherwise } => write!(f, "(if {cond} {then} {otherwise})"),
            Expr::Let { bindings, body } => {
                f.write_str("(let ")?;
                write_bindings(f, bindings)?;
                write!(f, " {body})")
            }
            Expr::LetRec { bindings, body } => {
                f.write_str("(letrec ")?;
                write_bindings(f, bindings)?;
                write!(f, " {body})")
            }
            Expr::MatchAll { target, matcher, clause } => {
                write!(f, "(match-all {target} {matcher} {clause})")
            }
            Expr::Match { target, matcher, clauses } => {
                write!(f, "(match {target} {matcher} {{")?;
                write_seq(f, clauses)?;
                f.write_str("})")
            }
            Expr::Matcher(clauses) => {
                f.write_str("(matcher {")?;
                write_seq(f, clauses)?;
                f.write_str("})")
            }
            Expr::AlgebraicDataMatcher(ctors) => {
                f.write_str("(algebraic-data-matcher {")?;
                for (i, c) in ctors.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "<{}", c.name)?;
                    for m in &c.matchers {
                        write!(f, " {m}")?;
                    }
                    f.write_str(">")?;
                }
                f.write_str("})")
            }
            Expr::Something => f.write_str("something"),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Wildcard => f.write_str("_"),
            Pattern::Var(v) => write!(f, "{v}"),
            Pattern::Value(e) => write!(f, ",{e}"),
            Pattern::Inductive { ctor, args } => {
                write!(f, "<{ctor}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(">")
            }
            Pattern::Or(ps) => {
                f.write_str("(|")?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                f.write_str(")")
            }
            Pattern::And(ps) => {
                f.write_str("(&")?;
                for p in ps {
                    write!(f, " {p}")?;
                }
                f.write_str(")")
            }
            Pattern::Not(p) => write!(f, "!{p}"),
            Pattern::Tuple(ps) => {
                f.write_str("[")?;
                write_seq(f, ps)?;
                f.write_str("]")
            }
            Pattern::Let { bindings, body } => {
                f.write_str("(let ")?;
                write_bindings(f, bindings)?;
                write!(f, " {body})")
            }
            Pattern::Loop(lp) => write!(
                f,
                "(loop ${} [{} {} {}] {} {})",
                lp.index, lp.range.start, lp.range.ends, lp.range.end_number, lp.repeat, lp.end
            ),
            Pattern::Ellipsis => f.write_str("..."),
        }
    }
}

impl fmt::Display for PrimPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimPattern::Hole => f.write_str("$"),
            PrimPattern::ValueHole(name) => write!(f, ",${name}"),
            PrimPattern::Inductive(ctor, args) => {
                write!(f, "<{ctor}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(">")
            }
        }
    }
}

impl fmt::Display for DataPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataPattern::Var(name) => write!(f, "${name}"),
            DataPattern::Wildcard => f.write_str("_"),
            DataPattern::Inductive(ctor, args) => {
                write!(f, "<{ctor}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(">")
            }
        }
    }
}

impl fmt::Display for MatcherClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {} {{", self.pattern, self.next_matchers)?;
        for (i, dc) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "[{} {}]", dc.pattern, dc.next)?;
        }
        f.write_str("}]")
    }
}

impl fmt::Display for TopForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TopKind::Define(name, e) => write!(f, "(define ${name} {e})"),
            TopKind::Expr(e) => write!(f, "{e}"),
        }
    }
}
