//! Matching of matcher-clause patterns: pattern-patterns against patterns
//! and data patterns against targets.

use std::rc::Rc;

use crate::ast::{DataPattern, Pattern, PrimPattern};
use crate::env::{Bindings, Env};
use crate::error::EvalResult;
use crate::value::{Thunk, Value};

/// Matches a pattern-pattern against a pattern. On success returns the
/// subpatterns captured by `$` holes, left to right, and the bindings made
/// by `,$y` holes. Value expressions are delayed in `env`.
pub fn ppm(pp: &PrimPattern, p: &Rc<Pattern>, env: &dyn Fn() -> Env) -> Option<(Vec<Rc<Pattern>>, Bindings)> {
    let mut holes = Vec::new();
    let mut binds = Vec::new();
    if ppm_into(pp, p, env, &mut holes, &mut binds) {
        Some((holes, binds.into_iter().collect()))
    } else {
        None
    }
}

fn ppm_into(
    pp: &PrimPattern,
    p: &Rc<Pattern>,
    env: &dyn Fn() -> Env,
    holes: &mut Vec<Rc<Pattern>>,
    binds: &mut Vec<(crate::ast::Name, Thunk)>,
) -> bool {
    match (pp, &**p) {
        (PrimPattern::Hole, _) => {
            holes.push(p.clone());
            true
        }
        (PrimPattern::ValueHole(y), Pattern::Value(e)) => {
            binds.push((y.clone(), Thunk::pending(e, &env())));
            true
        }
        (PrimPattern::Inductive(c, pps), Pattern::Inductive { ctor, args }) => {
            c == ctor
                && pps.len() == args.len()
                && pps.iter().zip(args).all(|(pp, a)| ppm_into(pp, a, env, holes, binds))
        }
        _ => false,
    }
}

/// Matches a data pattern against a target, forcing it only as far as
/// constructor patterns require.
pub fn pdm(dp: &DataPattern, target: &Thunk) -> EvalResult<Option<Bindings>> {
    let mut binds = Vec::new();
    Ok(if pdm_into(dp, target, &mut binds)? { Some(binds.into_iter().collect()) } else { None })
}

fn pdm_into(dp: &DataPattern, target: &Thunk, binds: &mut Vec<(crate::ast::Name, Thunk)>) -> EvalResult<bool> {
    match dp {
        DataPattern::Var(z) => {
            binds.push((z.clone(), target.clone()));
            Ok(true)
        }
        DataPattern::Wildcard => Ok(true),
        DataPattern::Inductive(c, dps) => match target.force()? {
            Value::Inductive(ctor, args) if ctor == *c && args.len() == dps.len() => {
                for (dp, a) in dps.iter().zip(args.iter()) {
                    if !pdm_into(dp, a, binds)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        },
    }
}
