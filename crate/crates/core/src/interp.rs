//! A session: global environment plus top-level form evaluation.

use crate::ast::{TopForm, TopKind};
use crate::env::Env;
use crate::error::{Error, EvalError, EvalResult};
use crate::eval::{builtins, eval};
use crate::reader::parse_program;
use crate::value::{Thunk, Value};

/// Stack size for threads that run interpreters. Forcing deeply nested
/// lazy structures recurses on the native stack.
pub const STACK_SIZE: usize = 512 * 1024 * 1024;

/// Runs `f` on a fresh thread with a [`STACK_SIZE`] stack and returns its
/// result. Interpreters are not `Send`, so create them inside `f`.
pub fn with_stack<R: Send + 'static>(f: impl FnOnce() -> R + Send + 'static) -> R {
    std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(f)
        .expect("spawn interpreter thread")
        .join()
        .unwrap_or_else(|p| std::panic::resume_unwind(p))
}

/// What evaluating one top-level form produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Defined(String),
    /// The printed value.
    Value(String),
}

pub struct Interpreter {
    global: Env,
    limit: Option<usize>,
}

impl Default for Interpreter {
    fn default() -> Self {
        Interpreter::new()
    }
}

impl Interpreter {
    /// A session with host builtins and the prelude loaded.
    pub fn new() -> Interpreter {
        let interp = Interpreter::bare();
        if let Err((name, e)) = crate::prelude::load(&interp.global) {
            panic!("prelude failed to load at '{name}': {e}");
        }
        interp
    }

    /// A session with host builtins only.
    pub fn bare() -> Interpreter {
        Interpreter { global: builtins::base_env().extend_mutable(), limit: None }
    }

    /// Print at most `limit` elements of every collection.
    pub fn set_show_limit(&mut self, limit: Option<usize>) {
        self.limit = limit;
    }

    pub fn env(&self) -> &Env {
        &self.global
    }

    pub fn show(&self, v: &Value) -> EvalResult<String> {
        v.show_limited(self.limit)
    }

    /// Binds `name` in the global frame. The expression is evaluated on
    /// first use and sees every global definition, including later ones.
    pub fn define(&self, name: &str, expr: &std::rc::Rc<crate::ast::Expr>) {
        self.global.define(name.into(), Thunk::pending(expr, &self.global));
    }

    pub fn eval_form(&self, form: &TopForm) -> EvalResult<Outcome> {
        match &form.kind {
            TopKind::Define(name, expr) => {
                self.define(name, expr);
                Ok(Outcome::Defined(name.to_string()))
            }
            TopKind::Expr(expr) => Ok(Outcome::Value(self.show(&eval(expr, &self.global)?)?)),
        }
    }

    /// Evaluates every form of `text` in order. A parse error stops before
    /// anything runs; an evaluation error affects only its own form.
    pub fn run(&self, text: &str) -> Result<Vec<(TopForm, EvalResult<Outcome>)>, Error> {
        let forms = parse_program(text)?;
        Ok(forms
            .into_iter()
            .map(|form| {
                let outcome = self.eval_form(&form);
                (form, outcome)
            })
            .collect())
    }

    /// Evaluates `text` and returns the value of its last expression.
    pub fn eval_value(&self, text: &str) -> Result<Value, Error> {
        let mut last = None;
        for form in parse_program(text)? {
            match &form.kind {
                TopKind::Define(name, expr) => self.define(name, expr),
                TopKind::Expr(expr) => last = Some(eval(expr, &self.global)?),
            }
        }
        last.ok_or_else(|| EvalError::other("no expression to evaluate").into())
    }

    /// Evaluates `text` and prints the value of its last expression.
    pub fn eval_str(&self, text: &str) -> Result<String, Error> {
        Ok(self.show(&self.eval_value(text)?)?)
    }
}
