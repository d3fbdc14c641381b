use std::rc::Rc;

use crate::ast::{CtorSpec, DataClause, DataPattern, Expr, MatcherClause, Name, PrimPattern};
use crate::env::Env;
use crate::value::Value;

/// A user matcher: ordered clauses closed over their defining environment.
pub struct MatcherValue {
    pub clauses: Rc<[MatcherClause]>,
    pub env: Env,
}

fn var(name: &str) -> Rc<Expr> {
    Rc::new(Expr::Var { name: name.into(), indices: Vec::new() })
}

fn capitalize(name: &str) -> Name {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect::<String>().into(),
        None => name.into(),
    }
}

/// Clause `[,$val [] {[$tgt (if (eq? val tgt) {[]} {})]}]`.
pub(crate) fn value_clause() -> MatcherClause {
    let test = Rc::new(Expr::Apply { func: var("eq?"), args: vec![var("val"), var("tgt")] });
    let hit = Rc::new(Expr::Collection(vec![Rc::new(Expr::Tuple(Vec::new()))]));
    let miss = Rc::new(Expr::Collection(Vec::new()));
    MatcherClause {
        pattern: PrimPattern::ValueHole("val".into()),
        next_matchers: Rc::new(Expr::Tuple(Vec::new())),
        data: vec![DataClause {
            pattern: DataPattern::Var("tgt".into()),
            next: Rc::new(Expr::If { cond: test, then: hit, otherwise: miss }),
        }],
    }
}

/// Clause `[$ [something] {[$tgt {[tgt]}]}]`.
pub(crate) fn catch_all_clause() -> MatcherClause {
    MatcherClause {
        pattern: PrimPattern::Hole,
        next_matchers: Rc::new(Expr::Tuple(vec![Rc::new(Expr::Something)])),
        data: vec![DataClause {
            pattern: DataPattern::Var("tgt".into()),
            next: Rc::new(Expr::Collection(vec![Rc::new(Expr::Tuple(vec![var("tgt")]))])),
        }],
    }
}

/// Builds the matcher for `(algebraic-data-matcher {<c m ...> ...})`: one
/// clause per constructor, then a value clause and a catch-all.
pub fn algebraic_data_matcher(ctors: &[CtorSpec], env: &Env) -> Value {
    let mut clauses = Vec::with_capacity(ctors.len() + 2);
    for ctor in ctors {
        let k = ctor.matchers.len();
        let fields: Vec<Name> = (1..=k).map(|i| format!("x{i}").into()).collect();
        let tuple = Expr::Tuple(fields.iter().map(|f| var(f)).collect());
        clauses.push(MatcherClause {
            pattern: PrimPattern::Inductive(ctor.name.clone(), vec![PrimPattern::Hole; k]),
            next_matchers: Rc::new(Expr::Tuple(ctor.matchers.clone())),
            data: vec![
                DataClause {
                    pattern: DataPattern::Inductive(
                        capitalize(&ctor.name),
                        fields.iter().cloned().map(DataPattern::Var).collect(),
                    ),
                    next: Rc::new(Expr::Collection(vec![Rc::new(tuple)])),
                },
                DataClause { pattern: DataPattern::Wildcard, next: Rc::new(Expr::Collection(Vec::new())) },
            ],
        });
    }
    clauses.push(value_clause());
    clauses.push(catch_all_clause());
    Value::Matcher(Rc::new(MatcherValue { clauses: clauses.into(), env: env.clone() }))
}
