//! The standard library written in the object language itself.

use crate::env::Env;
use crate::error::Error;
use crate::reader::parse_program;
use crate::ast::TopKind;
use crate::value::Thunk;

/// Source text of the prelude.
pub const SOURCE: &str = include_str!("../prelude/prelude.egi");

/// Names the prelude defines, in definition order.
pub const EXPORTS: &[&str] =
    &["integer", "bool", "string", "list", "multiset", "set", "map", "take", "drop", "comb", "twin-primes"];

/// Defines every prelude binding in `global`, a mutable frame. Each
/// definition is forced once so that a broken prelude fails here.
pub fn load(global: &Env) -> Result<(), (String, Error)> {
    let forms = parse_program(SOURCE).map_err(|e| ("<prelude>".to_string(), e.into()))?;
    let mut defined = Vec::new();
    for form in forms {
        if let TopKind::Define(name, expr) = form.kind {
            global.define(name.clone(), Thunk::pending(&expr, global));
            defined.push(name);
        }
    }
    for name in defined {
        let thunk = global.get(&name).expect("just defined");
        thunk.force().map_err(|e| (name.to_string(), e.into()))?;
    }
    Ok(())
}
