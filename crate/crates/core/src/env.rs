//! Lexical environments and match-result binding frames.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::ast::Name;
use crate::error::{EvalError, EvalResult};
use crate::value::{Thunk, Value};

type Slots = Rc<Vec<(Name, Thunk)>>;

fn find<'a>(slots: &'a [(Name, Thunk)], name: &str) -> Option<&'a Thunk> {
    slots.iter().find(|(n, _)| **n == *name).map(|(_, t)| t)
}

enum FrameKind {
    Table(HashMap<Name, Thunk>),
    /// A handful of bindings, searched linearly.
    Fixed(Slots),
    /// Filled after creation: the global frame and `letrec` groups.
    Mutable(RefCell<HashMap<Name, Thunk>>),
    Single(Name, Thunk),
}

struct Frame {
    kind: FrameKind,
    parent: Env,
}

/// A chain of frames; lookup finds the innermost binding.
#[derive(Clone, Default)]
pub struct Env(Option<Rc<Frame>>);

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    fn push(&self, kind: FrameKind) -> Env {
        Env(Some(Rc::new(Frame { kind, parent: self.clone() })))
    }

    pub fn extend(&self, name: Name, value: Thunk) -> Env {
        self.push(FrameKind::Single(name, value))
    }

    pub fn extend_map(&self, map: HashMap<Name, Thunk>) -> Env {
        self.push(FrameKind::Table(map))
    }

    /// Binds each name to its value. Names must be distinct.
    pub fn extend_all(&self, slots: Vec<(Name, Thunk)>) -> Env {
        self.push(FrameKind::Fixed(Rc::new(slots)))
    }

    pub fn extend_bindings(&self, bindings: &Bindings) -> Env {
        if bindings.is_empty() {
            return self.clone();
        }
        self.push(FrameKind::Fixed(bindings.0.clone()))
    }

    /// A new empty frame whose bindings can be added later with
    /// [`Env::define`].
    pub fn extend_mutable(&self) -> Env {
        self.push(FrameKind::Mutable(RefCell::new(HashMap::new())))
    }

    /// Adds or replaces a binding in the innermost frame, which must have
    /// been created by [`Env::extend_mutable`].
    pub fn define(&self, name: Name, value: Thunk) {
        match self.0.as_deref().map(|f| &f.kind) {
            Some(FrameKind::Mutable(map)) => {
                map.borrow_mut().insert(name, value);
            }
            _ => panic!("define on an environment without a mutable head frame"),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Thunk> {
        let mut cur = self.0.as_deref();
        while let Some(frame) = cur {
            let found = match &frame.kind {
                FrameKind::Table(map) => map.get(name).cloned(),
                FrameKind::Fixed(slots) => find(slots, name).cloned(),
                FrameKind::Mutable(map) => map.borrow().get(name).cloned(),
                FrameKind::Single(n, t) => (**n == *name).then(|| t.clone()),
            };
            if found.is_some() {
                return found;
            }
            cur = frame.parent.0.as_deref();
        }
        None
    }

    pub fn get(&self, name: &str) -> EvalResult<Thunk> {
        self.lookup(name).ok_or_else(|| EvalError::Unbound(name.to_string()))
    }
}

/// Bindings accumulated by pattern matching. Updates are functional: every
/// binding operation returns a new frame and leaves the receiver untouched.
#[derive(Clone, Default)]
pub struct Bindings(Slots);

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, name: &str) -> Option<&Thunk> {
        find(&self.0, name)
    }

    /// Names in the order they were first bound.
    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.0.iter().map(|(n, _)| n)
    }

    fn with(&self, name: &Name, value: Thunk) -> Bindings {
        let mut slots = Vec::with_capacity(self.0.len() + 1);
        slots.extend(self.0.iter().cloned());
        match slots.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => slots.push((name.clone(), value)),
        }
        Bindings(Rc::new(slots))
    }

    /// Binds `name`, or `name_i1_i2...` when `indices` is non-empty.
    ///
    /// An indexed binding inserts into the hash already bound to `name`, or
    /// starts a fresh hash when `name` is unbound or bound to a non-hash.
    /// Several indices nest hashes.
    pub fn bind_indexed(&self, name: &Name, indices: &[i64], value: Thunk) -> EvalResult<Bindings> {
        let value = match indices {
            [] => value,
            _ => {
                let existing = match self.get(name) {
                    Some(t) => Some(t.force()?),
                    None => None,
                };
                Thunk::ready(insert_nested(existing, indices, value)?)
            }
        };
        Ok(self.with(name, value))
    }

    /// Right-biased union.
    pub fn union(&self, other: &Bindings) -> Bindings {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut slots = (*self.0).clone();
        for (k, v) in other.0.iter() {
            match slots.iter_mut().find(|(n, _)| n == k) {
                Some(slot) => slot.1 = v.clone(),
                None => slots.push((k.clone(), v.clone())),
            }
        }
        Bindings(Rc::new(slots))
    }

    pub fn to_env(&self) -> Env {
        Env::empty().extend_bindings(self)
    }
}

pub(crate) fn insert_nested(existing: Option<Value>, indices: &[i64], value: Thunk) -> EvalResult<Value> {
    let (first, rest) = indices.split_first().expect("indices are non-empty");
    let mut map = match existing {
        Some(Value::Hash(map)) => (*map).clone(),
        _ => BTreeMap::new(),
    };
    let entry = if rest.is_empty() {
        value
    } else {
        let inner = match map.get(first) {
            Some(t) => Some(t.force()?),
            None => None,
        };
        Thunk::ready(insert_nested(inner, rest, value)?)
    };
    map.insert(*first, entry);
    Ok(Value::Hash(Rc::new(map)))
}

/// Later pairs replace earlier ones with the same name.
impl FromIterator<(Name, Thunk)> for Bindings {
    fn from_iter<T: IntoIterator<Item = (Name, Thunk)>>(iter: T) -> Self {
        let mut slots: Vec<(Name, Thunk)> = Vec::new();
        for (k, v) in iter {
            match slots.iter_mut().find(|(n, _)| *n == k) {
                Some(slot) => slot.1 = v,
                None => slots.push((k, v)),
            }
        }
        Bindings(Rc::new(slots))
    }
}
