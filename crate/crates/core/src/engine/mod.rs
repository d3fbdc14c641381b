//! The pattern-matching machine: matching states, loop contexts and the
//! breadth-wise search over state vectors.

mod primitive;

use std::cell::{Cell as StdCell, OnceCell, RefCell};
use std::collections::VecDeque;
use std::rc::Rc;

pub use primitive::{pdm, ppm};

use crate::ast::{LoopPattern, Pattern};
use crate::env::{Bindings, Env};
use crate::error::{EvalError, EvalResult};
use crate::eval::{self, MatcherValue};
use crate::value::{deep_equal, Seq, Thunk, Value};

/// A persistent stack.
pub struct Stack<T>(Option<Rc<(T, Stack<T>)>>);

impl<T> Clone for Stack<T> {
    fn clone(&self) -> Self {
        Stack(self.0.clone())
    }
}

impl<T> Default for Stack<T> {
    fn default() -> Self {
        Stack(None)
    }
}

impl<T: Clone> Stack<T> {
    pub fn push(&self, item: T) -> Stack<T> {
        Stack(Some(Rc::new((item, self.clone()))))
    }

    pub fn pop(&self) -> Option<(T, Stack<T>)> {
        self.0.as_ref().map(|node| (node.0.clone(), node.1.clone()))
    }

    pub fn top(&self) -> Option<&T> {
        self.0.as_ref().map(|node| &node.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    /// Items from the top down.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let (item, rest) = cur?;
            cur = rest.0.as_deref();
            Some(item)
        })
    }
}

/// A pattern waiting to be matched against a target by a matcher.
#[derive(Clone)]
pub struct Atom {
    pub pattern: Rc<Pattern>,
    pub matcher: Value,
    pub target: Thunk,
}

/// Bookkeeping for one active loop pattern.
#[derive(Clone)]
pub struct LoopContext {
    pub pattern: Rc<LoopPattern>,
    /// Current value of the index variable.
    pub index: i64,
    /// Remaining end numbers: a collection, or a single integer.
    pub ends: Thunk,
}

#[derive(Clone)]
pub struct MatchingState {
    pub atoms: Stack<Atom>,
    pub gamma: Env,
    pub delta: Bindings,
    pub loops: Stack<LoopContext>,
}

impl MatchingState {
    pub fn initial(pattern: Rc<Pattern>, matcher: Value, target: Thunk, gamma: Env) -> MatchingState {
        MatchingState {
            atoms: Stack::default().push(Atom { pattern, matcher, target }),
            gamma,
            delta: Bindings::new(),
            loops: Stack::default(),
        }
    }

    fn with_atoms(&self, atoms: Stack<Atom>) -> MatchingState {
        MatchingState { atoms, gamma: self.gamma.clone(), delta: self.delta.clone(), loops: self.loops.clone() }
    }

    /// Γ ∪ Δ ∪ the index bindings of every active loop, inner loops
    /// shadowing outer ones. Pattern expressions are evaluated here.
    pub fn pattern_env(&self) -> Env {
        let mut env = self.gamma.extend_bindings(&self.delta);
        let loops: Vec<&LoopContext> = self.loops.iter().collect();
        for ctx in loops.into_iter().rev() {
            env = env.extend(ctx.pattern.index.clone(), Thunk::ready(Value::Int(ctx.index)));
        }
        env
    }
}

/// A lazily produced sequence of states.
pub enum StateVec {
    One(Option<MatchingState>),
    Many(Box<dyn Iterator<Item = EvalResult<MatchingState>>>),
}

impl StateVec {
    fn one(s: MatchingState) -> StateVec {
        StateVec::One(Some(s))
    }

    fn next_state(&mut self) -> Option<EvalResult<MatchingState>> {
        match self {
            StateVec::One(s) => s.take().map(Ok),
            StateVec::Many(it) => it.next(),
        }
    }

    fn is_spent(&self) -> bool {
        matches!(self, StateVec::One(None))
    }
}

/// Result of stepping one state.
pub enum Step {
    /// The state had no atoms left: a match, with the loop-stack depth at
    /// that point.
    Done(Bindings, usize),
    Spawn(StateVec),
    Fail,
}

/// Callback run after every sweep.
pub type TraceHook = Box<dyn FnMut(&SweepInfo)>;

thread_local! {
    static STEPS: StdCell<u64> = const { StdCell::new(0) };
    static SWEEPS: StdCell<u64> = const { StdCell::new(0) };
    static TRACE: RefCell<Option<TraceHook>> = const { RefCell::new(None) };
}

/// Counters for work done on the current thread.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// States stepped, including those of nested searches.
    pub steps: u64,
    pub sweeps: u64,
}

pub fn stats() -> Stats {
    Stats { steps: STEPS.with(StdCell::get), sweeps: SWEEPS.with(StdCell::get) }
}

pub fn reset_stats() {
    STEPS.with(|c| c.set(0));
    SWEEPS.with(|c| c.set(0));
}

/// Reported after every sweep when a trace hook is installed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepInfo {
    /// Sweep number within its search, from 0.
    pub index: u64,
    /// State vectors in the frontier at the start of the sweep.
    pub vectors: usize,
    /// Results emitted by the sweep.
    pub emitted: usize,
    /// Nesting level of the search: 0 for a top-level search.
    pub depth: usize,
}

/// Installs (or with `None`, removes) the per-sweep trace hook for the
/// current thread.
pub fn set_trace_hook(hook: Option<TraceHook>) {
    TRACE.with(|t| *t.borrow_mut() = hook);
}

thread_local! {
    static DEPTH: StdCell<usize> = const { StdCell::new(0) };
    static SCHEDULE: StdCell<Schedule> = const { StdCell::new(Schedule::Interleaved) };
}

/// Where a sweep places the vectors it spawns in the next frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Each spawned vector goes directly before the tail of the vector that
    /// spawned it.
    #[default]
    Interleaved,
    /// All spawned vectors, in order, then all tails, in order.
    SpawnedFirst,
}

/// Sets the schedule used by searches started later on this thread.
pub fn set_schedule(schedule: Schedule) {
    SCHEDULE.with(|s| s.set(schedule));
}

pub fn schedule() -> Schedule {
    SCHEDULE.with(StdCell::get)
}

/// Steps a single state: pops its head atom and applies the matching rule
/// for that atom's pattern and matcher.
pub fn step(s: MatchingState) -> EvalResult<Step> {
    STEPS.with(|c| c.set(c.get() + 1));
    let Some((atom, rest)) = s.atoms.pop() else {
        let depth = s.loops.len();
        return Ok(Step::Done(s.delta, depth));
    };
    let Atom { pattern, matcher, target } = atom;
    let single = |st: MatchingState| Ok(Step::Spawn(StateVec::one(st)));
    match &*pattern {
        Pattern::Wildcard => single(s.with_atoms(rest)),
        Pattern::Ellipsis => expand_ellipsis(&s, rest, matcher, target),
        Pattern::Loop(lp) => {
            let env = s.pattern_env();
            let start = match eval::eval(&lp.range.start, &env)? {
                Value::Int(n) => n,
                other => {
                    return Err(EvalError::Type { expected: "integer start number", found: other.type_name().into() })
                }
            };
            let ctx = LoopContext {
                pattern: lp.clone(),
                index: start.checked_sub(1).ok_or(EvalError::Overflow)?,
                ends: Thunk::pending(&lp.range.ends, &env),
            };
            let atoms = rest.push(Atom { pattern: Rc::new(Pattern::Ellipsis), matcher, target });
            single(MatchingState { atoms, gamma: s.gamma, delta: s.delta, loops: s.loops.push(ctx) })
        }
        Pattern::And(ps) => {
            let mut atoms = rest;
            for p in ps.iter().rev() {
                atoms = atoms.push(Atom { pattern: p.clone(), matcher: matcher.clone(), target: target.clone() });
            }
            single(s.with_atoms(atoms))
        }
        Pattern::Or(ps) => {
            let states: Vec<EvalResult<MatchingState>> = ps
                .iter()
                .map(|p| {
                    Ok(s.with_atoms(rest.push(Atom {
                        pattern: p.clone(),
                        matcher: matcher.clone(),
                        target: target.clone(),
                    })))
                })
                .collect();
            Ok(Step::Spawn(StateVec::Many(Box::new(states.into_iter()))))
        }
        Pattern::Not(p) => {
            let inner = MatchingState {
                atoms: Stack::default().push(Atom { pattern: p.clone(), matcher, target }),
                gamma: s.gamma.clone(),
                delta: s.delta.clone(),
                loops: s.loops.clone(),
            };
            match msearch(inner).next() {
                None => single(s.with_atoms(rest)),
                Some(Ok(_)) => Ok(Step::Fail),
                Some(Err(e)) => Err(e),
            }
        }
        Pattern::Let { bindings, body } => {
            let mut st = s.with_atoms(rest);
            for b in bindings {
                let env = st.pattern_env();
                let keys = eval::eval_indices(&b.var, &env)?;
                st.delta = st.delta.bind_indexed(&b.var.name, &keys, Thunk::pending(&b.expr, &env))?;
            }
            st.atoms = st.atoms.push(Atom { pattern: body.clone(), matcher, target });
            single(st)
        }
        _ => match &matcher {
            Value::Something => match &*pattern {
                Pattern::Var(v) => {
                    let keys = eval::eval_indices(v, &s.pattern_env())?;
                    let delta = s.delta.bind_indexed(&v.name, &keys, target)?;
                    single(MatchingState { atoms: rest, gamma: s.gamma, delta, loops: s.loops })
                }
                Pattern::Tuple(ps) => {
                    let items = tuple_target(&target, ps.len())?;
                    let mut atoms = rest;
                    for (p, t) in ps.iter().zip(items.iter()).rev() {
                        atoms = atoms.push(Atom { pattern: p.clone(), matcher: Value::Something, target: t.clone() });
                    }
                    single(s.with_atoms(atoms))
                }
                other => Err(EvalError::SomethingPattern(other.to_string())),
            },
            Value::Tuple(ms) => match &*pattern {
                Pattern::Var(v) => {
                    let keys = eval::eval_indices(v, &s.pattern_env())?;
                    let delta = s.delta.bind_indexed(&v.name, &keys, target)?;
                    single(MatchingState { atoms: rest, gamma: s.gamma, delta, loops: s.loops })
                }
                Pattern::Value(e) => {
                    let expected = eval::eval(e, &s.pattern_env())?;
                    if deep_equal(&expected, &target.force()?)? {
                        single(s.with_atoms(rest))
                    } else {
                        Ok(Step::Fail)
                    }
                }
                Pattern::Tuple(ps) => {
                    if ps.len() != ms.len() {
                        return Err(EvalError::other(format!(
                            "tuple pattern {pattern} has {} element(s) but the matcher has {}",
                            ps.len(),
                            ms.len()
                        )));
                    }
                    let items = tuple_target(&target, ps.len())?;
                    let mut atoms = rest;
                    for ((p, m), t) in ps.iter().zip(ms.iter()).zip(items.iter()).rev() {
                        atoms = atoms.push(Atom { pattern: p.clone(), matcher: m.force()?, target: t.clone() });
                    }
                    single(s.with_atoms(atoms))
                }
                other => Err(EvalError::NoMatcherClause(format!("{other} (tuple matcher)"))),
            },
            Value::Matcher(m) => resolve(&s, rest, &pattern, m, target),
            other => Err(EvalError::Type { expected: "matcher", found: other.type_name().into() }),
        },
    }
}

fn tuple_target(target: &Thunk, arity: usize) -> EvalResult<Rc<[Thunk]>> {
    match target.force()? {
        Value::Tuple(items) if items.len() == arity => Ok(items),
        Value::Tuple(items) => Err(EvalError::other(format!(
            "tuple pattern of {arity} element(s) against a tuple of {}",
            items.len()
        ))),
        other => Err(EvalError::Type { expected: "tuple", found: other.type_name().into() }),
    }
}

fn expand_ellipsis(s: &MatchingState, rest: Stack<Atom>, matcher: Value, target: Thunk) -> EvalResult<Step> {
    let Some((ctx, outer)) = s.loops.pop() else {
        return Err(EvalError::EllipsisOutsideLoop);
    };
    let (first, tail) = match ctx.ends.force()? {
        Value::Int(n) => (n, Seq::nil()),
        Value::Collection(seq) => match seq.uncons()? {
            None => return Ok(Step::Fail),
            Some((h, t)) => (h.force()?.as_int()?, t),
        },
        other => return Err(EvalError::Type { expected: "end numbers", found: other.type_name().into() }),
    };
    let k = ctx.index;
    let lp = &ctx.pattern;
    let repeat = |ends: Thunk| -> EvalResult<MatchingState> {
        let next = LoopContext { pattern: lp.clone(), index: k.checked_add(1).ok_or(EvalError::Overflow)?, ends };
        Ok(MatchingState {
            atoms: rest.push(Atom { pattern: lp.repeat.clone(), matcher: matcher.clone(), target: target.clone() }),
            gamma: s.gamma.clone(),
            delta: s.delta.clone(),
            loops: outer.push(next),
        })
    };
    if k < first {
        return Ok(Step::Spawn(StateVec::one(repeat(ctx.ends.clone())?)));
    }
    if k > first {
        return Ok(Step::Fail);
    }
    let end = MatchingState {
        atoms: rest
            .push(Atom { pattern: lp.end.clone(), matcher: matcher.clone(), target: target.clone() })
            .push(Atom {
                pattern: lp.range.end_number.clone(),
                matcher: Value::Something,
                target: Thunk::ready(Value::Int(k)),
            }),
        gamma: s.gamma.clone(),
        delta: s.delta.clone(),
        loops: outer.clone(),
    };
    if tail.is_empty()? {
        return Ok(Step::Spawn(StateVec::one(end)));
    }
    let cont = repeat(Thunk::ready(Value::Collection(tail)))?;
    Ok(Step::Spawn(StateVec::Many(Box::new([Ok(end), Ok(cont)].into_iter()))))
}

/// Applies the first matcher clause whose pattern-pattern accepts `pattern`
/// and, within it, the first data clause accepting the target.
fn resolve(
    s: &MatchingState,
    rest: Stack<Atom>,
    pattern: &Rc<Pattern>,
    m: &MatcherValue,
    target: Thunk,
) -> EvalResult<Step> {
    let env_cell = OnceCell::new();
    let penv = || env_cell.get_or_init(|| s.pattern_env()).clone();
    let mut committed = None;
    for clause in m.clauses.iter() {
        if let Some(found) = ppm(&clause.pattern, pattern, &penv) {
            committed = Some((clause, found));
            break;
        }
    }
    let Some((clause, (subpatterns, pp_binds))) = committed else {
        return Err(EvalError::NoMatcherClause(pattern.to_string()));
    };
    let mut chosen = None;
    for dc in &clause.data {
        if let Some(b) = pdm(&dc.pattern, &target)? {
            chosen = Some((dc, b));
            break;
        }
    }
    let Some((dc, dp_binds)) = chosen else {
        let shown = target.force()?.show_limited(Some(8)).unwrap_or_else(|_| "<unprintable>".into());
        return Err(EvalError::NoDataClause(shown));
    };
    let k = subpatterns.len();
    let matchers = next_matchers(eval::eval(&clause.next_matchers, &m.env)?, k)?;
    let nenv = m.env.extend_bindings(&pp_binds.union(&dp_binds));
    let targets = eval::eval(&dc.next, &nenv)?.as_seq()?.clone();
    let base = s.with_atoms(rest);
    let successors = targets.iter().map(move |t| {
        let values = next_targets(t?, k)?;
        let mut atoms = base.atoms.clone();
        for ((p, m), v) in subpatterns.iter().zip(matchers.iter()).zip(values).rev() {
            atoms = atoms.push(Atom { pattern: p.clone(), matcher: m.clone(), target: v });
        }
        Ok(base.with_atoms(atoms))
    });
    Ok(Step::Spawn(StateVec::Many(Box::new(successors))))
}

/// Splits a next-matcher value into `k` matchers. With one hole, a bare
/// matcher stands for itself.
fn next_matchers(v: Value, k: usize) -> EvalResult<Vec<Value>> {
    match v {
        Value::Tuple(items) if items.len() == k => items.iter().map(Thunk::force).collect(),
        other if k == 1 => Ok(vec![other]),
        other => Err(EvalError::other(format!(
            "next matchers: expected a tuple of {k} matcher(s), found {}",
            describe_arity(&other)
        ))),
    }
}

/// Splits one next-target tuple into `k` targets. With one hole, a value
/// that is not a one-element tuple stands for itself.
fn next_targets(t: Thunk, k: usize) -> EvalResult<Vec<Thunk>> {
    match t.force()? {
        Value::Tuple(items) if items.len() == k => Ok(items.to_vec()),
        _ if k == 1 => Ok(vec![t]),
        other => Err(EvalError::other(format!(
            "next targets: expected a tuple of {k} value(s), found {}",
            describe_arity(&other)
        ))),
    }
}

fn describe_arity(v: &Value) -> String {
    match v {
        Value::Tuple(items) => format!("a tuple of {}", items.len()),
        other => format!("a {}", other.type_name()),
    }
}

/// A match produced by a search.
pub struct Emitted {
    pub delta: Bindings,
    /// Loop contexts still open when the match completed.
    pub open_loops: usize,
}

/// Lazy search over all matches reachable from an initial state.
pub struct Search {
    frontier: Vec<StateVec>,
    ready: VecDeque<EvalResult<Emitted>>,
    sweeps: u64,
    depth: usize,
    schedule: Schedule,
}

impl Search {
    pub fn new(initial: MatchingState) -> Search {
        Search {
            frontier: vec![StateVec::one(initial)],
            ready: VecDeque::new(),
            sweeps: 0,
            depth: DEPTH.with(StdCell::get),
            schedule: schedule(),
        }
    }

    /// Steps the head of every vector once and builds the next frontier
    /// according to the search's [`Schedule`].
    fn sweep(&mut self) {
        SWEEPS.with(|c| c.set(c.get() + 1));
        let frontier = std::mem::take(&mut self.frontier);
        let vectors = frontier.len();
        let before = self.ready.len();
        let mut spawned = Vec::new();
        let mut tails = Vec::new();
        DEPTH.with(|d| d.set(self.depth + 1));
        let mut failed = false;
        for mut v in frontier {
            if failed {
                break;
            }
            let outcome = match v.next_state() {
                None => continue,
                Some(state) => state.and_then(step),
            };
            match outcome {
                Ok(Step::Done(delta, open_loops)) => self.ready.push_back(Ok(Emitted { delta, open_loops })),
                Ok(Step::Spawn(sv)) => match self.schedule {
                    Schedule::Interleaved => tails.push(sv),
                    Schedule::SpawnedFirst => spawned.push(sv),
                },
                Ok(Step::Fail) => {}
                Err(e) => {
                    self.ready.push_back(Err(e));
                    failed = true;
                }
            }
            if !v.is_spent() {
                tails.push(v);
            }
        }
        DEPTH.with(|d| d.set(self.depth));
        if !failed {
            spawned.append(&mut tails);
            self.frontier = spawned;
        }
        let info = SweepInfo { index: self.sweeps, vectors, emitted: self.ready.len() - before, depth: self.depth };
        self.sweeps += 1;
        TRACE.with(|t| {
            if let Ok(mut hook) = t.try_borrow_mut() {
                if let Some(hook) = hook.as_mut() {
                    hook(&info);
                }
            }
        });
    }
}

impl Iterator for Search {
    type Item = EvalResult<Emitted>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(r) = self.ready.pop_front() {
                return Some(r);
            }
            if self.frontier.is_empty() {
                return None;
            }
            self.sweep();
        }
    }
}

/// All matches of `initial`, as a lazy stream of binding frames in the
/// order the scheduler finds them.
pub fn msearch(initial: MatchingState) -> impl Iterator<Item = EvalResult<Bindings>> {
    Search::new(initial).map(|r| r.map(|e| e.delta))
}

#[cfg(test)]
mod tests;
