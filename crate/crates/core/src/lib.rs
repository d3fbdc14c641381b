//! An interpreter for a small S-expression language with non-linear,
//! backtracking pattern matching over user-defined matchers, including loop
//! patterns with explicit repeat-count variables.
//!
//! ```
//! use loopmatch::Interpreter;
//!
//! let interp = Interpreter::new();
//! let out = interp.eval_str("(match-all {1 2 3} (list integer) [<join $xs $ys> [xs ys]])").unwrap();
//! assert_eq!(out, "{[{} {1 2 3}] [{1} {2 3}] [{1 2} {3}] [{1 2 3} {}]}");
//! ```

pub mod ast;
pub mod batch;
pub mod engine;
pub mod env;
pub mod error;
pub mod eval;
pub mod interp;
pub mod prelude;
pub mod reader;
pub mod value;

pub use error::{Error, EvalError, ParseError};
pub use interp::{with_stack, Interpreter, Outcome};
pub use value::Value;
