use std::collections::BTreeMap;
use std::rc::Rc;

use loopmatch::env::Bindings;
use loopmatch::reader::{parse_expr, parse_pattern};
use loopmatch::value::Thunk;
use loopmatch::{Interpreter, Value};
use proptest::prelude::*;

/// Source text of a random printable value.
fn value_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        any::<i64>().prop_map(|n| n.to_string()),
        any::<bool>().prop_map(|b| if b { "#t".into() } else { "#f".into() }),
        "[a-z \"\\\\]{0,6}".prop_map(|s| format!("{s:?}")),
        Just("<Leaf>".to_string()),
    ];
    leaf.prop_recursive(4, 32, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(|xs| format!("{{{}}}", xs.join(" "))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|xs| format!("[{}]", xs.join(" "))),
            prop::collection::vec(inner.clone(), 1..3).prop_map(|xs| format!("<Node {}>", xs.join(" "))),
            prop::collection::btree_map(-5i64..5, inner, 1..4).prop_map(|m| {
                let entries: Vec<String> = m.into_iter().map(|(k, v)| format!("[{k} {v}]")).collect();
                format!("{{|{}|}}", entries.join(" "))
            }),
        ]
    })
}

fn pattern_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("_".to_string()),
        "[a-z]".prop_map(|v| format!("${v}")),
        "[a-z]".prop_map(|v| format!("${v}_1")),
        (-9i64..9).prop_map(|n| format!(",{n}")),
        Just(",(+ x 1)".to_string()),
        Just("<nil>".to_string()),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("<cons {a} {b}>")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("(| {a} {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("(& {a} {b})")),
            inner.clone().prop_map(|a| format!("!{a}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("[{a} {b}]")),
            inner.clone().prop_map(|a| format!("(loop $i [1 $n] <cons $x_i ...> {a})")),
            inner.prop_map(|a| format!("(let {{[$k 2]}} {a})")),
        ]
    })
}

fn ints(v: &Value) -> Vec<i64> {
    v.as_seq().unwrap().to_values().unwrap().iter().map(|x| x.as_int().unwrap()).collect()
}

fn int_list(xs: &[i64]) -> String {
    let items: Vec<String> = xs.iter().map(i64::to_string).collect();
    format!("{{{}}}", items.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shown_values_read_back_unchanged(text in value_text()) {
        let interp = Interpreter::bare();
        let shown = interp.eval_str(&text).unwrap();
        prop_assert_eq!(interp.eval_str(&shown).unwrap(), shown.clone());
        let again = interp.eval_value(&shown).unwrap();
        let first = interp.eval_value(&text).unwrap();
        prop_assert!(loopmatch::value::deep_equal(&first, &again).unwrap());
    }

    #[test]
    fn printed_patterns_parse_to_the_same_tree(text in pattern_text()) {
        let p = parse_pattern(&text).unwrap();
        let printed = p.to_string();
        prop_assert_eq!(parse_pattern(&printed).unwrap(), p);
        let e = parse_expr(&format!("(match-all {{}} (list integer) [{printed} 0])")).unwrap();
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn indexed_binding_leaves_the_original_untouched(
        entries in prop::collection::vec((-4i64..4, -4i64..4, any::<i64>()), 1..12)
    ) {
        let name: Rc<str> = "x".into();
        let mut model: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        let mut b = Bindings::new();
        for (i, j, v) in entries {
            let before = b.clone();
            let snapshot = model.clone();
            b = b.bind_indexed(&name, &[i, j], Thunk::ready(Value::Int(v))).unwrap();
            model.insert((i, j), v);
            // The earlier frame still shows the earlier contents.
            prop_assert_eq!(nested(&before), snapshot);
        }
        prop_assert_eq!(nested(&b), model);
        prop_assert_eq!(b.len(), 1);
    }

    #[test]
    fn join_yields_every_split_in_order(xs in prop::collection::vec(-50i64..50, 0..8)) {
        let interp = Interpreter::new();
        let out = interp
            .eval_value(&format!("(match-all {} (list integer) [<join $a $b> [a b]])", int_list(&xs)))
            .unwrap();
        let splits = out.as_seq().unwrap().to_values().unwrap();
        prop_assert_eq!(splits.len(), xs.len() + 1);
        for (k, s) in splits.iter().enumerate() {
            let Value::Tuple(parts) = s else { panic!("not a tuple") };
            prop_assert_eq!(ints(&parts[0].force().unwrap()), xs[..k].to_vec());
            prop_assert_eq!(ints(&parts[1].force().unwrap()), xs[k..].to_vec());
        }
    }

    #[test]
    fn multiset_cons_removes_one_occurrence(xs in prop::collection::vec(0i64..5, 0..7)) {
        let interp = Interpreter::new();
        let out = interp
            .eval_value(&format!("(match-all {} (multiset integer) [<cons $x $rest> [x rest]])", int_list(&xs)))
            .unwrap();
        let got = out.as_seq().unwrap().to_values().unwrap();
        prop_assert_eq!(got.len(), xs.len());
        for (k, pair) in got.iter().enumerate() {
            let Value::Tuple(parts) = pair else { panic!("not a tuple") };
            let mut rest = xs.clone();
            let x = rest.remove(k);
            prop_assert_eq!(parts[0].force().unwrap().as_int().unwrap(), x);
            prop_assert_eq!(ints(&parts[1].force().unwrap()), rest);
        }
    }

    #[test]
    fn take_and_drop_partition(xs in prop::collection::vec(-9i64..9, 0..10), n in 0usize..12) {
        let interp = Interpreter::new();
        let list = int_list(&xs);
        let taken = ints(&interp.eval_value(&format!("(take {n} {list})")).unwrap());
        let dropped = ints(&interp.eval_value(&format!("(drop {n} {list})")).unwrap());
        let k = n.min(xs.len());
        prop_assert_eq!(&taken[..], &xs[..k]);
        prop_assert_eq!(&dropped[..], &xs[k..]);
    }
}

fn nested(b: &Bindings) -> BTreeMap<(i64, i64), i64> {
    let mut out = BTreeMap::new();
    let Some(Value::Hash(outer)) = b.get("x").map(|t| t.force().unwrap()) else {
        return out;
    };
    for (i, inner) in outer.iter() {
        let Value::Hash(inner) = inner.force().unwrap() else { panic!("not nested") };
        for (j, v) in inner.iter() {
            out.insert((*i, *j), v.force().unwrap().as_int().unwrap());
        }
    }
    out
}
