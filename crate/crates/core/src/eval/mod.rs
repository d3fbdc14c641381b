//! Expression evaluation.

pub mod builtins;
mod matcher;

use std::collections::BTreeMap;
use std::rc::Rc;

pub use matcher::{algebraic_data_matcher, MatcherValue};

use crate::ast::{Binding, Expr, MatchClause, PatVar};
use crate::engine::{self, MatchingState};
use crate::env::{insert_nested, Bindings, Env};
use crate::error::{EvalError, EvalResult};
use crate::value::{Closure, Seq, Thunk, Value};

/// Evaluates `expr` in `env`. Arguments, bindings and data fields are
/// delayed; tail positions are evaluated in a loop rather than recursively.
pub fn eval(expr: &Rc<Expr>, env: &Env) -> EvalResult<Value> {
    let mut expr = expr.clone();
    let mut env = env.clone();
    loop {
        let next = match &*expr {
            Expr::Bool(b) => return Ok(Value::Bool(*b)),
            Expr::Int(n) => return Ok(Value::Int(*n)),
            Expr::Str(s) => return Ok(Value::Str(s.clone())),
            Expr::Var { name, indices } => {
                let mut value = env.get(name)?.force()?;
                let mut keys = Vec::new();
                for index in indices {
                    let key = eval(index, &env)?.as_int()?;
                    keys.push(key);
                    value = match value {
                        Value::Hash(map) => match map.get(&key) {
                            Some(t) => t.force()?,
                            None => {
                                return Err(EvalError::MissingIndex { name: indexed_name(name, &keys[..keys.len() - 1]), key })
                            }
                        },
                        other => {
                            return Err(EvalError::Type {
                                expected: "hash for indexed variable",
                                found: other.type_name().to_string(),
                            })
                        }
                    };
                }
                return Ok(value);
            }
            Expr::Inductive { ctor, args } => {
                return Ok(Value::Inductive(ctor.clone(), args.iter().map(|a| Thunk::pending(a, &env)).collect()))
            }
            Expr::Tuple(items) => return Ok(Value::Tuple(items.iter().map(|a| Thunk::pending(a, &env)).collect())),
            Expr::Collection(items) => {
                return Ok(Value::Collection(Seq::from_thunks(items.iter().map(|a| Thunk::pending(a, &env)).collect())))
            }
            Expr::Hash(entries) => {
                let mut map = BTreeMap::new();
                for (k, v) in entries {
                    map.insert(eval(k, &env)?.as_int()?, Thunk::pending(v, &env));
                }
                return Ok(Value::Hash(Rc::new(map)));
            }
            Expr::Lambda { params, body } => {
                return Ok(Value::Closure(Rc::new(Closure { params: params.clone(), body: body.clone(), env })))
            }
            Expr::Apply { func, args } => {
                let f = eval(func, &env)?;
                let args: Vec<Thunk> = args.iter().map(|a| Thunk::pending(a, &env)).collect();
                match f {
                    Value::Closure(c) => {
                        env = closure_env(&c, args)?;
                        c.body.clone()
                    }
                    other => return apply(&other, args),
                }
            }
            Expr::If { cond, then, otherwise } => {
                if eval(cond, &env)?.as_bool()? {
                    then.clone()
                } else {
                    otherwise.clone()
                }
            }
            Expr::Let { bindings, body } => {
                for b in bindings {
                    env = bind_let(&env, b)?;
                }
                body.clone()
            }
            Expr::LetRec { bindings, body } => {
                let group = env.extend_mutable();
                for b in bindings {
                    group.define(b.var.name.clone(), Thunk::pending(&b.expr, &group));
                }
                env = group;
                body.clone()
            }
            Expr::MatchAll { target, matcher, clause } => return match_all(target, matcher, clause, &env),
            Expr::Match { target, matcher, clauses } => {
                let (clause, delta) = match_first(target, matcher, clauses, &env)?;
                env = env.extend_bindings(&delta);
                clause.body.clone()
            }
            Expr::Matcher(clauses) => {
                return Ok(Value::Matcher(Rc::new(MatcherValue { clauses: clauses.clone(), env })))
            }
            Expr::AlgebraicDataMatcher(ctors) => return Ok(algebraic_data_matcher(ctors, &env)),
            Expr::Something => return Ok(Value::Something),
        };
        expr = next;
    }
}

fn indexed_name(name: &str, keys: &[i64]) -> String {
    let mut s = name.to_string();
    for k in keys {
        s.push('_');
        s.push_str(&k.to_string());
    }
    s
}

fn closure_env(c: &Closure, args: Vec<Thunk>) -> EvalResult<Env> {
    if args.len() != c.params.len() {
        return Err(EvalError::Arity {
            callee: "lambda".into(),
            expected: c.params.len().to_string(),
            got: args.len(),
        });
    }
    Ok(match args.len() {
        0 => c.env.clone(),
        1 => c.env.extend(c.params[0].clone(), args.into_iter().next().unwrap()),
        _ => c.env.extend_all(c.params.iter().cloned().zip(args).collect()),
    })
}

/// Applies a function value to delayed arguments.
pub fn apply(f: &Value, args: Vec<Thunk>) -> EvalResult<Value> {
    match f {
        Value::Closure(c) => eval(&c.body, &closure_env(c, args)?),
        Value::Builtin(b) => {
            if !b.arity.accepts(args.len()) {
                return Err(EvalError::Arity { callee: b.name.into(), expected: b.arity.to_string(), got: args.len() });
            }
            (b.func)(&args)
        }
        other => Err(EvalError::Type { expected: "function", found: other.type_name().to_string() }),
    }
}

/// Evaluates the index expressions of `var` to integers.
pub(crate) fn eval_indices(var: &PatVar, env: &Env) -> EvalResult<Vec<i64>> {
    var.indices
        .iter()
        .map(|e| match eval(e, env)? {
            Value::Int(n) => Ok(n),
            other => Err(EvalError::Type {
                expected: "integer index after '_'",
                found: other.type_name().to_string(),
            }),
        })
        .collect()
}

fn bind_let(env: &Env, b: &Binding) -> EvalResult<Env> {
    let value = Thunk::pending(&b.expr, env);
    let keys = eval_indices(&b.var, env)?;
    if keys.is_empty() {
        return Ok(env.extend(b.var.name.clone(), value));
    }
    let existing = match env.lookup(&b.var.name) {
        Some(t) => Some(t.force()?),
        None => None,
    };
    Ok(env.extend(b.var.name.clone(), Thunk::ready(insert_nested(existing, &keys, value)?)))
}

fn eval_matcher(matcher: &Rc<Expr>, env: &Env) -> EvalResult<Value> {
    let m = eval(matcher, env)?;
    match &m {
        Value::Matcher(_) | Value::Something | Value::Tuple(_) => Ok(m),
        other => Err(EvalError::Type { expected: "matcher", found: other.type_name().to_string() }),
    }
}

fn match_all(target: &Rc<Expr>, matcher: &Rc<Expr>, clause: &MatchClause, env: &Env) -> EvalResult<Value> {
    let m = eval_matcher(matcher, env)?;
    let state = MatchingState::initial(clause.pattern.clone(), m, Thunk::pending(target, env), env.clone());
    let body = clause.body.clone();
    let env = env.clone();
    let results = engine::msearch(state).map(move |r| r.map(|delta| Thunk::pending(&body, &env.extend_bindings(&delta))));
    Ok(Value::Collection(Seq::pull(results)))
}

fn match_first<'a>(
    target: &Rc<Expr>,
    matcher: &Rc<Expr>,
    clauses: &'a [MatchClause],
    env: &Env,
) -> EvalResult<(&'a MatchClause, Bindings)> {
    let m = eval_matcher(matcher, env)?;
    let target = Thunk::pending(target, env);
    for clause in clauses {
        let state = MatchingState::initial(clause.pattern.clone(), m.clone(), target.clone(), env.clone());
        if let Some(first) = engine::msearch(state).next() {
            return Ok((clause, first?));
        }
    }
    Err(EvalError::NoMatchingClause)
}
