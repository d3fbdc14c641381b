//! Host functions available beneath the prelude.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::ast::Name;
use crate::env::Env;
use crate::error::{EvalError, EvalResult};
use crate::value::{deep_equal, Arity, Builtin, BuiltinFn, Cell, Seq, Thunk, Value};

use super::apply;

const TABLE: &[(&str, Arity, BuiltinFn)] = &[
    ("+", Arity::AtLeast(0), add),
    ("-", Arity::Between(1, 2), sub),
    ("*", Arity::AtLeast(0), mul),
    ("quotient", Arity::Exact(2), quotient),
    ("modulo", Arity::Exact(2), modulo),
    ("eq?", Arity::Exact(2), eq),
    ("lt?", Arity::Exact(2), lt),
    ("gt?", Arity::Exact(2), gt),
    ("lte?", Arity::Exact(2), lte),
    ("gte?", Arity::Exact(2), gte),
    ("not", Arity::Exact(1), not),
    ("and", Arity::AtLeast(0), and),
    ("or", Arity::AtLeast(0), or),
    ("between", Arity::Exact(2), between),
    ("from", Arity::Exact(1), from),
    ("cons", Arity::Exact(2), cons),
    ("append", Arity::Exact(2), append),
    ("concat", Arity::Exact(1), concat),
    ("car", Arity::Exact(1), car),
    ("cdr", Arity::Exact(1), cdr),
    ("empty?", Arity::Exact(1), is_empty),
    ("take", Arity::Exact(2), take),
    ("drop", Arity::Exact(2), drop),
    ("map", Arity::Exact(2), map),
    ("sum", Arity::Exact(1), sum),
    ("length", Arity::Exact(1), length),
    ("join-splits", Arity::Exact(1), join_splits),
    ("multiset-eq?", Arity::Exact(2), multiset_eq),
    ("set-eq?", Arity::Exact(2), set_eq),
];

/// Names of all host functions and constants.
pub fn names() -> impl Iterator<Item = &'static str> {
    TABLE.iter().map(|(name, _, _)| *name).chain(["primes"])
}

/// A fresh environment holding every host function plus `primes`.
pub fn base_env() -> Env {
    let mut map: HashMap<Name, Thunk> = TABLE
        .iter()
        .map(|&(name, arity, func)| (name.into(), Thunk::ready(Value::Builtin(Rc::new(Builtin { name, arity, func })))))
        .collect();
    map.insert("primes".into(), Thunk::ready(Value::Collection(primes())));
    Env::empty().extend_map(map)
}

fn int(t: &Thunk) -> EvalResult<i64> {
    t.force()?.as_int()
}

fn seq(t: &Thunk) -> EvalResult<Seq> {
    Ok(t.force()?.as_seq()?.clone())
}

fn fold(args: &[Thunk], init: i64, op: fn(i64, i64) -> Option<i64>) -> EvalResult<Value> {
    let mut acc = init;
    for a in args {
        acc = op(acc, int(a)?).ok_or(EvalError::Overflow)?;
    }
    Ok(Value::Int(acc))
}

fn add(args: &[Thunk]) -> EvalResult<Value> {
    fold(args, 0, i64::checked_add)
}

fn mul(args: &[Thunk]) -> EvalResult<Value> {
    fold(args, 1, i64::checked_mul)
}

fn sub(args: &[Thunk]) -> EvalResult<Value> {
    let r = match args {
        [a] => int(a)?.checked_neg(),
        [a, b] => int(a)?.checked_sub(int(b)?),
        _ => unreachable!("arity checked by caller"),
    };
    r.map(Value::Int).ok_or(EvalError::Overflow)
}

fn divisor(t: &Thunk) -> EvalResult<i64> {
    match int(t)? {
        0 => Err(EvalError::other("division by zero")),
        n => Ok(n),
    }
}

fn quotient(args: &[Thunk]) -> EvalResult<Value> {
    let b = divisor(&args[1])?;
    int(&args[0])?.checked_div(b).map(Value::Int).ok_or(EvalError::Overflow)
}

/// Remainder with the sign of the divisor.
fn modulo(args: &[Thunk]) -> EvalResult<Value> {
    let b = divisor(&args[1])?;
    let r = int(&args[0])?.checked_rem(b).ok_or(EvalError::Overflow)?;
    Ok(Value::Int(if r != 0 && (r < 0) != (b < 0) { r + b } else { r }))
}

fn eq(args: &[Thunk]) -> EvalResult<Value> {
    Ok(Value::Bool(deep_equal(&args[0].force()?, &args[1].force()?)?))
}

fn compare(args: &[Thunk], op: fn(&i64, &i64) -> bool) -> EvalResult<Value> {
    Ok(Value::Bool(op(&int(&args[0])?, &int(&args[1])?)))
}

fn lt(args: &[Thunk]) -> EvalResult<Value> {
    compare(args, i64::lt)
}

fn gt(args: &[Thunk]) -> EvalResult<Value> {
    compare(args, i64::gt)
}

fn lte(args: &[Thunk]) -> EvalResult<Value> {
    compare(args, i64::le)
}

fn gte(args: &[Thunk]) -> EvalResult<Value> {
    compare(args, i64::ge)
}

fn not(args: &[Thunk]) -> EvalResult<Value> {
    Ok(Value::Bool(!args[0].force()?.as_bool()?))
}

fn and(args: &[Thunk]) -> EvalResult<Value> {
    for a in args {
        if !a.force()?.as_bool()? {
            return Ok(Value::Bool(false));
        }
    }
    Ok(Value::Bool(true))
}

fn or(args: &[Thunk]) -> EvalResult<Value> {
    for a in args {
        if a.force()?.as_bool()? {
            return Ok(Value::Bool(true));
        }
    }
    Ok(Value::Bool(false))
}

fn range_seq(from: i64, to: Option<i64>) -> Seq {
    Seq::lazy(move || {
        if to.is_some_and(|t| from > t) {
            return Ok(Cell::Nil);
        }
        let next = from.checked_add(1).ok_or(EvalError::Overflow)?;
        Ok(Cell::Cons(Thunk::ready(Value::Int(from)), range_seq(next, to)))
    })
}

fn between(args: &[Thunk]) -> EvalResult<Value> {
    Ok(Value::Collection(range_seq(int(&args[0])?, Some(int(&args[1])?))))
}

fn from(args: &[Thunk]) -> EvalResult<Value> {
    Ok(Value::Collection(range_seq(int(&args[0])?, None)))
}

/// The first cell of the collection held by `t`, forced on demand.
fn cell_of(t: Thunk) -> EvalResult<Cell> {
    Ok(match seq(&t)?.uncons()? {
        None => Cell::Nil,
        Some((h, tail)) => Cell::Cons(h, tail),
    })
}

fn cons(args: &[Thunk]) -> EvalResult<Value> {
    let rest = args[1].clone();
    Ok(Value::Collection(Seq::cons(args[0].clone(), Seq::lazy(move || cell_of(rest)))))
}

fn append_seq(xs: Seq, ys: Thunk) -> Seq {
    Seq::lazy(move || match xs.uncons()? {
        None => cell_of(ys),
        Some((h, t)) => Ok(Cell::Cons(h, append_seq(t, ys))),
    })
}

fn append(args: &[Thunk]) -> EvalResult<Value> {
    let ys = args[1].clone();
    let xs = args[0].clone();
    Ok(Value::Collection(Seq::lazy(move || match seq(&xs)?.uncons()? {
        None => cell_of(ys),
        Some((h, t)) => Ok(Cell::Cons(h, append_seq(t, ys))),
    })))
}

fn concat_seq(outer: Seq) -> Seq {
    Seq::lazy(move || {
        let mut outer = outer;
        loop {
            let Some((first, rest)) = outer.uncons()? else { return Ok(Cell::Nil) };
            if let Some((h, t)) = seq(&first)?.uncons()? {
                let rest = Thunk::ready(Value::Collection(concat_seq(rest)));
                return Ok(Cell::Cons(h, append_seq(t, rest)));
            }
            outer = rest;
        }
    })
}

fn concat(args: &[Thunk]) -> EvalResult<Value> {
    Ok(Value::Collection(concat_seq(seq(&args[0])?)))
}

fn car(args: &[Thunk]) -> EvalResult<Value> {
    match seq(&args[0])?.uncons()? {
        Some((h, _)) => h.force(),
        None => Err(EvalError::other("car: empty collection")),
    }
}

fn cdr(args: &[Thunk]) -> EvalResult<Value> {
    match seq(&args[0])?.uncons()? {
        Some((_, t)) => Ok(Value::Collection(t)),
        None => Err(EvalError::other("cdr: empty collection")),
    }
}

fn is_empty(args: &[Thunk]) -> EvalResult<Value> {
    Ok(Value::Bool(seq(&args[0])?.is_empty()?))
}

fn take_seq(n: i64, xs: Seq) -> Seq {
    Seq::lazy(move || {
        if n <= 0 {
            return Ok(Cell::Nil);
        }
        Ok(match xs.uncons()? {
            None => Cell::Nil,
            Some((h, t)) => Cell::Cons(h, take_seq(n - 1, t)),
        })
    })
}

fn take(args: &[Thunk]) -> EvalResult<Value> {
    Ok(Value::Collection(take_seq(int(&args[0])?, seq(&args[1])?)))
}

fn drop(args: &[Thunk]) -> EvalResult<Value> {
    let n = int(&args[0])?;
    let xs = args[1].clone();
    Ok(Value::Collection(Seq::lazy(move || {
        let mut cur = seq(&xs)?;
        for _ in 0..n {
            match cur.uncons()? {
                Some((_, t)) => cur = t,
                None => return Ok(Cell::Nil),
            }
        }
        Ok(match cur.uncons()? {
            None => Cell::Nil,
            Some((h, t)) => Cell::Cons(h, t),
        })
    })))
}

fn map_seq(f: Value, xs: Seq) -> Seq {
    Seq::lazy(move || {
        Ok(match xs.uncons()? {
            None => Cell::Nil,
            Some((x, rest)) => {
                let g = f.clone();
                Cell::Cons(Thunk::native(move || apply(&g, vec![x])), map_seq(f, rest))
            }
        })
    })
}

fn map(args: &[Thunk]) -> EvalResult<Value> {
    Ok(Value::Collection(map_seq(args[0].force()?, seq(&args[1])?)))
}

fn sum(args: &[Thunk]) -> EvalResult<Value> {
    let mut acc: i64 = 0;
    for t in seq(&args[0])?.iter() {
        acc = acc.checked_add(int(&t?)?).ok_or(EvalError::Overflow)?;
    }
    Ok(Value::Int(acc))
}

fn length(args: &[Thunk]) -> EvalResult<Value> {
    let mut n = 0;
    for t in seq(&args[0])?.iter() {
        t?;
        n += 1;
    }
    Ok(Value::Int(n))
}

/// `{[{} xs] [{x1} xs'] ...}`: every split of a collection into a prefix
/// and a suffix, shortest prefix first. Prefixes are lazy and suffixes are
/// shared with the input.
fn join_splits(args: &[Thunk]) -> EvalResult<Value> {
    let xs = seq(&args[0])?;
    Ok(Value::Collection(splits_from(xs.clone(), 0, xs)))
}

fn splits_from(whole: Seq, k: i64, suffix: Seq) -> Seq {
    Seq::lazy(move || {
        let pair = Value::Tuple(Rc::from([
            Thunk::ready(Value::Collection(take_seq(k, whole.clone()))),
            Thunk::ready(Value::Collection(suffix.clone())),
        ]));
        let rest = Seq::lazy(move || match suffix.uncons()? {
            None => Ok(Cell::Nil),
            Some((_, t)) => cell_of(Thunk::ready(Value::Collection(splits_from(whole, k + 1, t)))),
        });
        Ok(Cell::Cons(Thunk::ready(pair), rest))
    })
}

fn multiset_eq(args: &[Thunk]) -> EvalResult<Value> {
    let xs = seq(&args[0])?.to_values()?;
    let mut ys = seq(&args[1])?.to_values()?;
    if xs.len() != ys.len() {
        return Ok(Value::Bool(false));
    }
    for x in &xs {
        let mut found = None;
        for (i, y) in ys.iter().enumerate() {
            if deep_equal(x, y)? {
                found = Some(i);
                break;
            }
        }
        match found {
            Some(i) => {
                ys.swap_remove(i);
            }
            None => return Ok(Value::Bool(false)),
        }
    }
    Ok(Value::Bool(true))
}

fn contains(haystack: &[Value], needle: &Value) -> EvalResult<bool> {
    for v in haystack {
        if deep_equal(v, needle)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn set_eq(args: &[Thunk]) -> EvalResult<Value> {
    let xs = seq(&args[0])?.to_values()?;
    let ys = seq(&args[1])?.to_values()?;
    for x in &xs {
        if !contains(&ys, x)? {
            return Ok(Value::Bool(false));
        }
    }
    for y in &ys {
        if !contains(&xs, y)? {
            return Ok(Value::Bool(false));
        }
    }
    Ok(Value::Bool(true))
}

/// The infinite ascending stream of primes, by trial division against the
/// primes found so far.
fn primes() -> Seq {
    let found = Rc::new(RefCell::new(Vec::<i64>::new()));
    let mut candidate = 1i64;
    Seq::pull(std::iter::from_fn(move || {
        let mut found = found.borrow_mut();
        loop {
            candidate += 1;
            let c = candidate;
            if found.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
                found.push(c);
                return Some(Ok(Thunk::ready(Value::Int(c))));
            }
        }
    }))
}

#[cfg(test)]
mod tests {
    use crate::interp::Interpreter;

    fn run(src: &str) -> String {
        Interpreter::bare().eval_str(src).unwrap()
    }

    #[test]
    fn ranges() {
        assert_eq!(run("(between 1 4)"), "{1 2 3 4}");
        assert_eq!(run("(between 3 1)"), "{}");
        assert_eq!(run("(take 3 (from 5))"), "{5 6 7}");
        assert_eq!(run("(take 5 primes)"), "{2 3 5 7 11}");
    }

    #[test]
    fn collection_functions() {
        assert_eq!(run("(cons 0 (between 1 2))"), "{0 1 2}");
        assert_eq!(run("(append {1 2} {3})"), "{1 2 3}");
        assert_eq!(run("(concat {{1} {} {2 3}})"), "{1 2 3}");
        assert_eq!(run("(car (cdr {1 2}))"), "2");
        assert_eq!(run("(drop 2 {1 2 3})"), "{3}");
        assert_eq!(run("(drop 5 {1 2 3})"), "{}");
        assert_eq!(run("(map (lambda [$x] (* x x)) {1 2 3})"), "{1 4 9}");
        assert_eq!(run("(sum {200 160 220})"), "580");
        assert_eq!(run("(length (between 1 10))"), "10");
        assert_eq!(run("(car (append (from 1) {0}))"), "1");
        assert_eq!(run("(take 2 (concat (map (lambda [$x] {x x}) (from 1))))"), "{1 1}");
    }

    #[test]
    fn join_splits_order() {
        assert_eq!(run("(join-splits {1 2 3})"), "{[{} {1 2 3}] [{1} {2 3}] [{1 2} {3}] [{1 2 3} {}]}");
        assert_eq!(run("(length (take 3 (join-splits (from 1))))"), "3");
        assert_eq!(run("(length (join-splits {1 2 3 4}))"), "5");
    }

    #[test]
    fn arithmetic_edge_cases() {
        assert_eq!(run("(- 3)"), "-3");
        assert_eq!(run("(modulo -7 3)"), "2");
        assert_eq!(run("(quotient 7 2)"), "3");
        assert!(Interpreter::bare().eval_str("(* 9223372036854775807 2)").is_err());
        assert!(Interpreter::bare().eval_str("(car {})").is_err());
    }

    #[test]
    fn equality_builtins() {
        assert_eq!(run("(eq? {|[1 2]|} {|[1 2]|})"), "#t");
        assert_eq!(run("(multiset-eq? {1 2 2} {2 1 2})"), "#t");
        assert_eq!(run("(multiset-eq? {1 2 2} {2 1 1})"), "#f");
        assert_eq!(run("(set-eq? {1 2 2} {2 1})"), "#t");
    }
}
