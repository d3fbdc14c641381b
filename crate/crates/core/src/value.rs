//! Runtime values, call-by-need thunks and lazy sequences.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::rc::Rc;

use crate::ast::{Expr, Name};
use crate::env::Env;
use crate::error::{EvalError, EvalResult};
use crate::eval::{self, MatcherValue};

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Rc<str>),
    Collection(Seq),
    Tuple(Rc<[Thunk]>),
    Inductive(Name, Rc<[Thunk]>),
    Hash(Rc<BTreeMap<i64, Thunk>>),
    Closure(Rc<Closure>),
    Builtin(Rc<Builtin>),
    Matcher(Rc<MatcherValue>),
    Something,
}

pub struct Closure {
    pub params: Vec<Name>,
    pub body: Rc<Expr>,
    pub env: Env,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Exact(usize),
    AtLeast(usize),
    Between(usize, usize),
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Exact(k) => n == k,
            Arity::AtLeast(k) => n >= k,
            Arity::Between(lo, hi) => (lo..=hi).contains(&n),
        }
    }
}

impl std::fmt::Display for Arity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Arity::Exact(k) => write!(f, "{k}"),
            Arity::AtLeast(k) => write!(f, "at least {k}"),
            Arity::Between(lo, hi) => write!(f, "{lo} to {hi}"),
        }
    }
}

pub type BuiltinFn = fn(&[Thunk]) -> EvalResult<Value>;

pub struct Builtin {
    pub name: &'static str,
    pub arity: Arity,
    pub func: BuiltinFn,
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(s.into())
    }

    pub fn tuple(items: Vec<Value>) -> Value {
        Value::Tuple(items.into_iter().map(Thunk::ready).collect())
    }

    pub fn collection(items: Vec<Value>) -> Value {
        Value::Collection(Seq::from_values(items))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::Collection(_) => "collection",
            Value::Tuple(_) => "tuple",
            Value::Inductive(..) => "inductive data",
            Value::Hash(_) => "hash",
            Value::Closure(_) | Value::Builtin(_) => "function",
            Value::Matcher(_) | Value::Something => "matcher",
        }
    }

    fn type_error(&self, expected: &'static str) -> EvalError {
        EvalError::Type { expected, found: self.type_name().to_string() }
    }

    pub fn as_int(&self) -> EvalResult<i64> {
        match self {
            Value::Int(n) => Ok(*n),
            other => Err(other.type_error("integer")),
        }
    }

    pub fn as_bool(&self) -> EvalResult<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(other.type_error("boolean")),
        }
    }

    pub fn as_seq(&self) -> EvalResult<&Seq> {
        match self {
            Value::Collection(s) => Ok(s),
            other => Err(other.type_error("collection")),
        }
    }

    pub fn is_matcher(&self) -> bool {
        matches!(self, Value::Matcher(_) | Value::Something)
    }

    /// Canonical printed form. Forces the whole value.
    pub fn show(&self) -> EvalResult<String> {
        self.show_limited(None)
    }

    /// Like [`Value::show`], but prints at most `limit` elements of every
    /// collection, marking truncation with ` ...}`. Never forces an element
    /// past the limit.
    pub fn show_limited(&self, limit: Option<usize>) -> EvalResult<String> {
        let mut out = String::new();
        write_value(&mut out, self, limit)?;
        Ok(out)
    }
}

fn write_thunks(out: &mut String, items: &[Thunk], limit: Option<usize>) -> EvalResult<()> {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_value(out, &t.force()?, limit)?;
    }
    Ok(())
}

fn write_value(out: &mut String, v: &Value, limit: Option<usize>) -> EvalResult<()> {
    match v {
        Value::Int(n) => write!(out, "{n}").unwrap(),
        Value::Bool(true) => out.push_str("#t"),
        Value::Bool(false) => out.push_str("#f"),
        Value::Str(s) => write!(out, "{}", StrLiteral(s)).unwrap(),
        Value::Collection(seq) => {
            out.push('{');
            let mut cur = seq.clone();
            let mut count = 0;
            loop {
                if limit.is_some_and(|l| count >= l) {
                    out.push_str(if count > 0 { " ...}" } else { "...}" });
                    return Ok(());
                }
                let Some((head, tail)) = cur.uncons()? else { break };
                if count > 0 {
                    out.push(' ');
                }
                write_value(out, &head.force()?, limit)?;
                count += 1;
                cur = tail;
            }
            out.push('}');
        }
        Value::Tuple(items) => {
            out.push('[');
            write_thunks(out, items, limit)?;
            out.push(']');
        }
        Value::Inductive(ctor, args) => {
            write!(out, "<{ctor}").unwrap();
            for a in args.iter() {
                out.push(' ');
                write_value(out, &a.force()?, limit)?;
            }
            out.push('>');
        }
        Value::Hash(map) => {
            out.push_str("{|");
            for (i, (k, t)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "[{k} ").unwrap();
                write_value(out, &t.force()?, limit)?;
                out.push(']');
            }
            out.push_str("|}");
        }
        Value::Closure(_) | Value::Builtin(_) => out.push_str("#<closure>"),
        Value::Matcher(_) | Value::Something => out.push_str("#<matcher>"),
    }
    Ok(())
}

impl std::fmt::Debug for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.show_limited(Some(16)) {
            Ok(text) => f.write_str(&text),
            Err(_) => write!(f, "#<{} with unprintable parts>", self.type_name()),
        }
    }
}

struct StrLiteral<'a>(&'a str);

impl std::fmt::Display for StrLiteral<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        crate::ast::write_str_literal(f, self.0)
    }
}

/// Structural equality. Functions and matchers cannot be compared.
pub fn deep_equal(a: &Value, b: &Value) -> EvalResult<bool> {
    Ok(match (a, b) {
        (Value::Closure(_) | Value::Builtin(_) | Value::Matcher(_) | Value::Something, _) => {
            return Err(a.type_error("comparable value"))
        }
        (_, Value::Closure(_) | Value::Builtin(_) | Value::Matcher(_) | Value::Something) => {
            return Err(b.type_error("comparable value"))
        }
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Collection(xs), Value::Collection(ys)) => {
            let (mut xs, mut ys) = (xs.clone(), ys.clone());
            loop {
                match (xs.uncons()?, ys.uncons()?) {
                    (None, None) => break true,
                    (Some((x, xt)), Some((y, yt))) => {
                        if !deep_equal(&x.force()?, &y.force()?)? {
                            break false;
                        }
                        xs = xt;
                        ys = yt;
                    }
                    _ => break false,
                }
            }
        }
        (Value::Tuple(xs), Value::Tuple(ys)) => thunks_equal(xs, ys)?,
        (Value::Inductive(c, xs), Value::Inductive(d, ys)) => c == d && thunks_equal(xs, ys)?,
        (Value::Hash(xs), Value::Hash(ys)) => {
            if xs.len() != ys.len() {
                return Ok(false);
            }
            for ((kx, vx), (ky, vy)) in xs.iter().zip(ys.iter()) {
                if kx != ky || !deep_equal(&vx.force()?, &vy.force()?)? {
                    return Ok(false);
                }
            }
            true
        }
        _ => false,
    })
}

fn thunks_equal(xs: &[Thunk], ys: &[Thunk]) -> EvalResult<bool> {
    if xs.len() != ys.len() {
        return Ok(false);
    }
    for (x, y) in xs.iter().zip(ys) {
        if !deep_equal(&x.force()?, &y.force()?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

enum ThunkState {
    Pending(Rc<Expr>, Env),
    Native(Box<dyn FnOnce() -> EvalResult<Value>>),
    Forcing,
    Done(Value),
    Failed(EvalError),
}

/// A delayed value, evaluated at most once.
#[derive(Clone)]
pub struct Thunk(Rc<RefCell<ThunkState>>);

impl Thunk {
    pub fn ready(v: Value) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Done(v))))
    }

    /// Delays `expr` in `env`. Literals are evaluated immediately.
    pub fn pending(expr: &Rc<Expr>, env: &Env) -> Thunk {
        match &**expr {
            Expr::Int(n) => Thunk::ready(Value::Int(*n)),
            Expr::Bool(b) => Thunk::ready(Value::Bool(*b)),
            Expr::Str(s) => Thunk::ready(Value::Str(s.clone())),
            _ => Thunk(Rc::new(RefCell::new(ThunkState::Pending(expr.clone(), env.clone())))),
        }
    }

    pub fn native(f: impl FnOnce() -> EvalResult<Value> + 'static) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Native(Box::new(f)))))
    }

    pub fn force(&self) -> EvalResult<Value> {
        match &*self.0.borrow() {
            ThunkState::Done(v) => return Ok(v.clone()),
            ThunkState::Failed(e) => return Err(e.clone()),
            ThunkState::Forcing => return Err(EvalError::Divergent),
            _ => {}
        }
        let state = std::mem::replace(&mut *self.0.borrow_mut(), ThunkState::Forcing);
        let result = match state {
            ThunkState::Pending(expr, env) => eval::eval(&expr, &env),
            ThunkState::Native(f) => f(),
            _ => unreachable!("thunk state checked above"),
        };
        *self.0.borrow_mut() = match &result {
            Ok(v) => ThunkState::Done(v.clone()),
            Err(e) => ThunkState::Failed(e.clone()),
        };
        result
    }

    /// The value, if already computed.
    pub fn peek(&self) -> Option<Value> {
        match &*self.0.borrow() {
            ThunkState::Done(v) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn is_forced(&self) -> bool {
        matches!(&*self.0.borrow(), ThunkState::Done(_) | ThunkState::Failed(_))
    }
}

pub enum Cell {
    Nil,
    Cons(Thunk, Seq),
}

enum SeqState {
    Nil,
    Cons(Thunk, Seq),
    Pending(Box<dyn FnOnce() -> EvalResult<Cell>>),
    Forcing,
    Failed(EvalError),
}

/// An immutable, lazily produced, memoized sequence.
#[derive(Clone)]
pub struct Seq(Rc<RefCell<SeqState>>);

impl Seq {
    pub fn nil() -> Seq {
        Seq(Rc::new(RefCell::new(SeqState::Nil)))
    }

    pub fn cons(head: Thunk, tail: Seq) -> Seq {
        Seq(Rc::new(RefCell::new(SeqState::Cons(head, tail))))
    }

    pub fn lazy(f: impl FnOnce() -> EvalResult<Cell> + 'static) -> Seq {
        Seq(Rc::new(RefCell::new(SeqState::Pending(Box::new(f)))))
    }

    pub fn from_thunks(items: Vec<Thunk>) -> Seq {
        items.into_iter().rev().fold(Seq::nil(), |tail, head| Seq::cons(head, tail))
    }

    pub fn from_values(items: Vec<Value>) -> Seq {
        Seq::from_thunks(items.into_iter().map(Thunk::ready).collect())
    }

    /// A sequence pulling elements on demand from `iter`.
    pub fn pull<I>(iter: I) -> Seq
    where
        I: Iterator<Item = EvalResult<Thunk>> + 'static,
    {
        Seq::unfold(Rc::new(RefCell::new(iter)))
    }

    fn unfold<I>(iter: Rc<RefCell<I>>) -> Seq
    where
        I: Iterator<Item = EvalResult<Thunk>> + 'static,
    {
        Seq::lazy(move || {
            let next = iter.borrow_mut().next();
            match next {
                None => Ok(Cell::Nil),
                Some(Err(e)) => Err(e),
                Some(Ok(head)) => Ok(Cell::Cons(head, Seq::unfold(iter))),
            }
        })
    }

    /// Forces the first cell.
    pub fn uncons(&self) -> EvalResult<Option<(Thunk, Seq)>> {
        match &*self.0.borrow() {
            SeqState::Nil => return Ok(None),
            SeqState::Cons(h, t) => return Ok(Some((h.clone(), t.clone()))),
            SeqState::Failed(e) => return Err(e.clone()),
            SeqState::Forcing => return Err(EvalError::Divergent),
            SeqState::Pending(_) => {}
        }
        let SeqState::Pending(f) = std::mem::replace(&mut *self.0.borrow_mut(), SeqState::Forcing) else {
            unreachable!("sequence state checked above")
        };
        let (state, result) = match f() {
            Ok(Cell::Nil) => (SeqState::Nil, Ok(None)),
            Ok(Cell::Cons(h, t)) => (SeqState::Cons(h.clone(), t.clone()), Ok(Some((h, t)))),
            Err(e) => (SeqState::Failed(e.clone()), Err(e)),
        };
        *self.0.borrow_mut() = state;
        result
    }

    pub fn is_empty(&self) -> EvalResult<bool> {
        Ok(self.uncons()?.is_none())
    }

    /// Iterates over element thunks, forcing cells as it goes.
    pub fn iter(&self) -> SeqIter {
        SeqIter { cur: Some(self.clone()) }
    }

    /// Forces the spine and every element.
    pub fn to_values(&self) -> EvalResult<Vec<Value>> {
        self.iter().map(|t| t?.force()).collect()
    }

    pub fn to_thunks(&self) -> EvalResult<Vec<Thunk>> {
        self.iter().collect()
    }
}

impl Drop for Seq {
    // Unlinks uniquely owned spines iteratively so that dropping a long
    // forced sequence cannot exhaust the stack.
    fn drop(&mut self) {
        let mut next = detach_tail(&self.0);
        while let Some(seq) = next {
            next = detach_tail(&seq.0);
        }
    }
}

fn detach_tail(cell: &Rc<RefCell<SeqState>>) -> Option<Seq> {
    if Rc::strong_count(cell) != 1 {
        return None;
    }
    let mut state = cell.try_borrow_mut().ok()?;
    match std::mem::replace(&mut *state, SeqState::Nil) {
        SeqState::Cons(_, tail) => Some(tail),
        other => {
            *state = other;
            None
        }
    }
}

pub struct SeqIter {
    cur: Option<Seq>,
}

impl Iterator for SeqIter {
    type Item = EvalResult<Thunk>;

    fn next(&mut self) -> Option<Self::Item> {
        let seq = self.cur.take()?;
        match seq.uncons() {
            Ok(None) => None,
            Ok(Some((head, tail))) => {
                self.cur = Some(tail);
                Some(Ok(head))
            }
            Err(e) => Some(Err(e)),
        }
    }
}
