use super::*;
use crate::interp::Interpreter;
use crate::reader::parse_pattern;

fn int(n: i64) -> Thunk {
    Thunk::ready(Value::Int(n))
}

fn ints(xs: &[i64]) -> Thunk {
    Thunk::ready(Value::collection(xs.iter().map(|&x| Value::Int(x)).collect()))
}

fn matcher(interp: &Interpreter, src: &str) -> Value {
    interp.eval_value(src).unwrap()
}

fn frames(state: MatchingState) -> Vec<Bindings> {
    msearch(state).collect::<EvalResult<Vec<_>>>().unwrap()
}

fn show(b: &Bindings, name: &str) -> String {
    b.get(name).unwrap().force().unwrap().show().unwrap()
}

fn successors(state: MatchingState) -> Vec<MatchingState> {
    match step(state).unwrap() {
        Step::Spawn(mut sv) => std::iter::from_fn(|| sv.next_state()).map(Result::unwrap).collect(),
        Step::Done(..) | Step::Fail => Vec::new(),
    }
}

fn same_stack<T>(a: &Stack<T>, b: &Stack<T>) -> bool {
    match (&a.0, &b.0) {
        (None, None) => true,
        (Some(x), Some(y)) => Rc::ptr_eq(x, y),
        _ => false,
    }
}

fn below_top<T: Clone>(s: &Stack<T>) -> Stack<T> {
    s.pop().map(|(_, rest)| rest).unwrap_or_default()
}

#[test]
fn variable_under_something_binds_target() {
    let p = parse_pattern("$x").unwrap();
    let out = frames(MatchingState::initial(p, Value::Something, int(5), Env::empty()));
    assert_eq!(out.len(), 1);
    assert_eq!(show(&out[0], "x"), "5");
}

#[test]
fn value_pattern_under_something_is_an_error() {
    let p = parse_pattern(",1").unwrap();
    let err = msearch(MatchingState::initial(p, Value::Something, int(1), Env::empty())).next().unwrap();
    assert!(matches!(err, Err(EvalError::SomethingPattern(_))));
}

#[test]
fn ellipsis_without_loop_is_an_error() {
    let s = MatchingState::initial(Rc::new(Pattern::Ellipsis), Value::Something, int(1), Env::empty());
    assert!(matches!(step(s), Err(EvalError::EllipsisOutsideLoop)));
}

#[test]
fn or_pattern_spawns_alternatives_in_order() {
    let p = parse_pattern("(| $a $b $c)").unwrap();
    let s = MatchingState::initial(p.clone(), Value::Something, int(7), Env::empty());
    assert_eq!(successors(s.clone()).len(), 3);
    let out = frames(s);
    let names: Vec<Vec<&str>> = out.iter().map(|b| b.names().map(|n| &**n).collect()).collect();
    assert_eq!(names, [["a"], ["b"], ["c"]]);
}

#[test]
fn and_pattern_sees_earlier_indexed_binding() {
    let interp = Interpreter::new();
    let p = parse_pattern("(& ,(+ 1 x_1) $x_2)").unwrap();
    let mut s = MatchingState::initial(p, matcher(&interp, "integer"), int(2), interp.env().clone());
    s.delta = Bindings::new().bind_indexed(&"x".into(), &[1], int(1)).unwrap();
    let out = frames(s);
    assert_eq!(out.len(), 1);
    assert_eq!(show(&out[0], "x"), "{|[1 1] [2 2]|}");
}

#[test]
fn not_pattern_adds_no_bindings() {
    let interp = Interpreter::new();
    let a = Bindings::new().bind_indexed(&"a".into(), &[1], int(2)).unwrap();
    let p = parse_pattern("!,(- a_1 1)").unwrap();
    let mut s = MatchingState::initial(p, matcher(&interp, "integer"), int(3), interp.env().clone());
    s.delta = a.clone();
    let out = frames(s.clone());
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].len(), a.len());
    assert_eq!(show(&out[0], "a"), "{|[1 2]|}");

    s.atoms = Stack::default().push(Atom {
        pattern: parse_pattern("!$y").unwrap(),
        matcher: matcher(&interp, "integer"),
        target: int(3),
    });
    assert!(frames(s).is_empty());
}

#[test]
fn multiset_cons_deletes_each_position() {
    let interp = Interpreter::new();
    let xs = [4, 1, 4, 2, 9];
    let p = parse_pattern("<cons $x $rest>").unwrap();
    let out = frames(MatchingState::initial(p, matcher(&interp, "(multiset integer)"), ints(&xs), interp.env().clone()));
    let got: Vec<(String, String)> = out.iter().map(|b| (show(b, "x"), show(b, "rest"))).collect();
    let want: Vec<(String, String)> = (0..xs.len())
        .map(|i| {
            let rest: Vec<String> = xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.to_string()).collect();
            (xs[i].to_string(), format!("{{{}}}", rest.join(" ")))
        })
        .collect();
    assert_eq!(got, want);
}

#[test]
fn join_yields_every_split_shortest_prefix_first() {
    let interp = Interpreter::new();
    let p = parse_pattern("<join $hs $ts>").unwrap();
    for n in 0..6 {
        let xs: Vec<i64> = (1..=n).collect();
        let out = frames(MatchingState::initial(p.clone(), matcher(&interp, "(list integer)"), ints(&xs), interp.env().clone()));
        assert_eq!(out.len(), xs.len() + 1);
        for (k, b) in out.iter().enumerate() {
            let h: Vec<String> = xs[..k].iter().map(i64::to_string).collect();
            assert_eq!(show(b, "hs"), format!("{{{}}}", h.join(" ")));
        }
    }
}

#[test]
fn loop_with_zero_repetitions_matches_end_pattern_only() {
    let interp = Interpreter::new();
    let p = parse_pattern("(loop $i [1 0 $n] <cons $x_i ...> $rest)").unwrap();
    let out = frames(MatchingState::initial(p, matcher(&interp, "(list integer)"), ints(&[1, 2]), interp.env().clone()));
    assert_eq!(out.len(), 1);
    assert_eq!(show(&out[0], "n"), "0");
    assert_eq!(show(&out[0], "rest"), "{1 2}");
    assert!(out[0].get("x").is_none());
}

#[test]
fn start_past_end_number_prunes() {
    let interp = Interpreter::new();
    let p = parse_pattern("(loop $i [3 {1}] <cons $x_i ...> _)").unwrap();
    let out = frames(MatchingState::initial(p, matcher(&interp, "(list integer)"), ints(&[1, 2, 3, 4]), interp.env().clone()));
    assert!(out.is_empty());
}

#[test]
fn expand_loop_pushes_context_below_start() {
    let interp = Interpreter::new();
    let p = parse_pattern("(loop $i [1 {2} _] <join _ <cons $x_i ...>> _)").unwrap();
    let s = MatchingState::initial(p, matcher(&interp, "(list integer)"), ints(&[1, 2, 3]), interp.env().clone());
    let next = successors(s);
    assert_eq!(next.len(), 1);
    let ctx = next[0].loops.top().unwrap();
    assert_eq!(ctx.index, 0);
    assert_eq!(ctx.ends.force().unwrap().show().unwrap(), "{2}");
    assert!(matches!(&*next[0].atoms.top().unwrap().pattern, Pattern::Ellipsis));
}

#[test]
fn two_way_ellipsis_puts_end_branch_first() {
    let interp = Interpreter::new();
    let p = parse_pattern("(loop $i [1 {1 2} $n] <cons $x_i ...> $rest)").unwrap();
    let s = MatchingState::initial(p, matcher(&interp, "(list integer)"), ints(&[5, 6, 7]), interp.env().clone());
    let out = frames(s);
    let got: Vec<(String, String)> = out.iter().map(|b| (show(b, "n"), show(b, "rest"))).collect();
    assert_eq!(got, [("1".to_string(), "{6 7}".to_string()), ("2".to_string(), "{7}".to_string())]);
}

/// Walks the whole search tree and checks that each step leaves the loop
/// stack untouched, pushes one context, pops the top one, or advances the
/// top one's index.
fn check_loop_discipline(state: MatchingState, budget: &mut usize) -> usize {
    let mut results = 0;
    let mut pending = vec![state];
    while let Some(s) = pending.pop() {
        *budget -= 1;
        if s.atoms.is_empty() {
            assert!(s.loops.is_empty(), "match completed with open loop contexts");
            results += 1;
            continue;
        }
        let parent = s.loops.clone();
        for child in successors(s) {
            let c = &child.loops;
            let ok = same_stack(c, &parent)
                || same_stack(&below_top(c), &parent)
                || same_stack(c, &below_top(&parent))
                || (c.len() == parent.len()
                    && same_stack(&below_top(c), &below_top(&parent))
                    && c.top().unwrap().index == parent.top().unwrap().index + 1);
            assert!(ok, "loop stack changed out of order");
            pending.push(child);
        }
        assert!(*budget > 0, "search tree larger than expected");
    }
    results
}

#[test]
fn loop_contexts_are_last_in_first_out() {
    let interp = Interpreter::new();
    let cases = [
        ("(loop $i [1 {2 3} $n] <join _ <cons $x_i ...>> _)", "(list integer)", "{1 2 3 4 5}", 20),
        (
            "<cons $a_1 (loop $i [2 5] <cons (loop $j [1 (- i 1)] (& !,(- a_j (- i j)) !,(+ a_j (- i j)) ...) $a_i) ...> <nil>)>",
            "(multiset integer)",
            "{1 2 3 4 5}",
            10,
        ),
        ("(loop $i [1 $n] <cons (loop $j [1 i] <cons _ ...> <nil>) ...> <nil>)", "(list (list integer))", "{{1} {2 2} {3 3 3}}", 1),
    ];
    for (pat, m, target, expected) in cases {
        let p = parse_pattern(pat).unwrap();
        let t = Thunk::ready(interp.eval_value(target).unwrap());
        let s = MatchingState::initial(p, matcher(&interp, m), t, interp.env().clone());
        let mut budget = 1_000_000;
        assert_eq!(check_loop_discipline(s, &mut budget), expected, "{pat}");
    }
}

#[test]
fn emitted_frames_have_no_open_loops() {
    let interp = Interpreter::new();
    let p = parse_pattern("(loop $i [1 {1 2 3} _] <join _ <cons $x_i ...>> _)").unwrap();
    let s = MatchingState::initial(p, matcher(&interp, "(list integer)"), ints(&[1, 2, 3, 4]), interp.env().clone());
    let all: Vec<Emitted> = Search::new(s).collect::<EvalResult<_>>().unwrap();
    assert_eq!(all.len(), 4 + 6 + 4);
    assert!(all.iter().all(|e| e.open_loops == 0));
}

#[test]
fn schedules_differ_only_in_order() {
    let interp = Interpreter::new();
    let p = parse_pattern("<join _ <cons $a <join _ <cons $b _>>>>").unwrap();
    let run = |schedule| {
        set_schedule(schedule);
        let s = MatchingState::initial(p.clone(), matcher(&interp, "(list integer)"), ints(&[1, 2, 3, 4]), interp.env().clone());
        let out: Vec<String> = frames(s).iter().map(|b| format!("{}{}", show(b, "a"), show(b, "b"))).collect();
        set_schedule(Schedule::default());
        out
    };
    let interleaved = run(Schedule::Interleaved);
    let grouped = run(Schedule::SpawnedFirst);
    assert_eq!(interleaved, ["12", "13", "23", "14", "24", "34"]);
    assert_eq!(grouped, ["12", "23", "13", "34", "24", "14"]);
}

#[test]
fn infinite_target_is_explored_fairly() {
    let interp = Interpreter::new();
    let p = parse_pattern("<join _ <cons $x _>>").unwrap();
    let t = Thunk::ready(interp.eval_value("(from 1)").unwrap());
    let s = MatchingState::initial(p, matcher(&interp, "(list integer)"), t, interp.env().clone());
    let first: Vec<String> = msearch(s).take(50).map(|b| show(&b.unwrap(), "x")).collect();
    let want: Vec<String> = (1..=50).map(|n: i64| n.to_string()).collect();
    assert_eq!(first, want);
}

#[test]
fn steps_and_sweeps_are_counted() {
    reset_stats();
    let p = parse_pattern("(| $a $b)").unwrap();
    frames(MatchingState::initial(p, Value::Something, int(1), Env::empty()));
    let st = stats();
    assert!(st.steps >= 5);
    assert!(st.sweeps >= 3);
}
