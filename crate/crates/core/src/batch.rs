//! Evaluation of many independent programs, each in its own interpreter.
//!
//! With the `parallel` feature the programs are spread over a rayon pool;
//! without it, or through [`eval_batch_sequential`], they run one after
//! another on a single thread.

use crate::error::{Error, EvalResult};
use crate::interp::{Interpreter, Outcome, STACK_SIZE};

/// Per-form outcomes of one program, or the parse error that stopped it.
pub type ProgramResult = Result<Vec<EvalResult<Outcome>>, Error>;

fn run_one(source: &str, prelude: bool) -> ProgramResult {
    let interp = if prelude { Interpreter::new() } else { Interpreter::bare() };
    Ok(interp.run(source)?.into_iter().map(|(_, outcome)| outcome).collect())
}

/// Runs the programs in order on one worker thread.
pub fn eval_batch_sequential(sources: &[String], prelude: bool) -> Vec<ProgramResult> {
    let sources = sources.to_vec();
    crate::interp::with_stack(move || sources.iter().map(|s| run_one(s, prelude)).collect())
}

/// Runs the programs concurrently, preserving input order in the result.
#[cfg(feature = "parallel")]
pub fn eval_batch(sources: &[String], prelude: bool) -> Vec<ProgramResult> {
    use rayon::prelude::*;
    pool().install(|| sources.par_iter().map(|s| run_one(s, prelude)).collect())
}

/// Runs the programs in order; the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn eval_batch(sources: &[String], prelude: bool) -> Vec<ProgramResult> {
    eval_batch_sequential(sources, prelude)
}

#[cfg(feature = "parallel")]
fn pool() -> &'static rayon::ThreadPool {
    static POOL: std::sync::OnceLock<rayon::ThreadPool> = std::sync::OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .stack_size(STACK_SIZE)
            .thread_name(|i| format!("loopmatch-{i}"))
            .build()
            .expect("build worker pool")
    })
}
