use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use abcde_core::ltss::{self, LtssGraph};
use abcde_core::synchrons::{synchrons_of_process, synchrons_of_transition};
use abcde_core::syntax::{apply_relabelling, complement};
use abcde_core::{
    enabled, parse, validate, Declarations, Document, Label, Name, Process, Relabelling,
};
use proptest::prelude::*;

const DOC: &str = "handshake a, c, d; broadcast b, e; signal s, r;
    A := a.A + b?.'c.0;
    B := e!.(s.B + tau.0);
    C := 'd.C;";

fn doc() -> Document {
    parse(DOC).unwrap()
}

fn name(pool: &'static [&'static str]) -> impl Strategy<Value = Name> {
    prop::sample::select(pool).prop_map(Name::new)
}

fn action() -> impl Strategy<Value = Label> {
    prop_oneof![
        name(&["a", "c", "d"]).prop_map(Label::Hand),
        name(&["a", "c", "d"]).prop_map(Label::CoHand),
        Just(Label::Tau),
        name(&["b", "e"]).prop_map(Label::Send),
        name(&["b", "e"]).prop_map(Label::Receive),
        name(&["s", "r"]).prop_map(Label::Read),
    ]
}

fn any_label() -> impl Strategy<Value = Label> {
    prop_oneof![
        action(),
        name(&["b", "e"]).prop_map(Label::Discard),
        name(&["s", "r"]).prop_map(Label::Emit),
    ]
}

fn relabelling() -> impl Strategy<Value = Relabelling> {
    let map =
        |pool: &'static [&'static str]| prop::collection::btree_map(name(pool), name(pool), 0..2);
    (map(&["a", "c", "d"]), map(&["b", "e"]), map(&["s", "r"])).prop_map(
        |(handshake, broadcast, signal)| Relabelling {
            handshake,
            broadcast,
            signal,
        },
    )
}

fn restriction() -> impl Strategy<Value = BTreeSet<Name>> {
    prop::collection::btree_set(name(&["a", "c", "d", "s", "r"]), 1..3)
}

fn process() -> impl Strategy<Value = Process> {
    let leaf = prop_oneof![
        Just(Process::nil()),
        name(&["A", "B", "C"]).prop_map(Process::agent),
        action().prop_map(|l| Process::prefix(l, Process::nil())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (action(), inner.clone()).prop_map(|(l, p)| Process::prefix(l, p)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Process::choice(p, q)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Process::par(p, q)),
            (inner.clone(), restriction()).prop_map(|(p, l)| Process::restrict(p, l)),
            (inner.clone(), relabelling()).prop_map(|(p, f)| Process::relabel(p, f)),
            (inner, name(&["s", "r"])).prop_map(|(p, s)| Process::signal(p, s)),
        ]
    })
}

/// Whether every broadcast relabelling in `p` is injective, so that no
/// broadcast name disappears from view.
fn broadcasts_stay_visible(p: &Process) -> bool {
    use abcde_core::Term;
    match p.term() {
        Term::Nil | Term::Agent(_) => true,
        Term::Prefix(_, q) | Term::Restrict(q, _) | Term::Signal(q, _) => {
            broadcasts_stay_visible(q)
        }
        Term::Choice(q, r) | Term::Par(q, r) => {
            broadcasts_stay_visible(q) && broadcasts_stay_visible(r)
        }
        Term::Relabel(q, f) => {
            let images: BTreeSet<Name> = ["b", "e"].map(|b| f.broadcast(&Name::new(b))).into();
            images.len() == 2 && broadcasts_stay_visible(q)
        }
    }
}

fn graph(p: &Process, decls: &Arc<Declarations>) -> Option<LtssGraph> {
    LtssGraph::explore(std::slice::from_ref(p), decls.clone(), 150).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(p in process()) {
        let d = doc();
        let text = p.to_string();
        prop_assert_eq!(d.parse_process(&text).unwrap(), p, "{}", text);
    }

    #[test]
    fn complement_is_an_involution(l in any_label()) {
        if let Ok(c) = complement(&l) {
            prop_assert_eq!(complement(&c).unwrap(), l);
        }
    }

    #[test]
    fn identity_relabelling_fixes_labels(l in any_label()) {
        prop_assert_eq!(apply_relabelling(&Relabelling::identity(), &l), l);
    }

    #[test]
    fn enabled_transitions_are_valid(p in process()) {
        let d = doc();
        for t in enabled(&p, &d.decls).unwrap() {
            prop_assert!(validate(&t, &d.decls), "{}", t);
            prop_assert_eq!(t.source(), p.clone());
            if t.label().is_discard() || t.label().is_emission() {
                prop_assert_eq!(t.target(), p.clone(), "{}", t);
            }
        }
    }

    #[test]
    fn broadcasts_are_never_blocked(p in process()) {
        prop_assume!(broadcasts_stay_visible(&p));
        let d = doc();
        let en = enabled(&p, &d.decls).unwrap();
        for b in ["b", "e"].map(Name::new) {
            prop_assert!(
                en.iter().any(|t| matches!(t.label(), Label::Receive(x) | Label::Discard(x) if *x == b)),
                "{} cannot take {}", p, b
            );
            let receives = en.iter().any(|t| *t.label() == Label::Receive(b.clone()));
            let discards = en.iter().any(|t| *t.label() == Label::Discard(b.clone()));
            prop_assert!(!(receives && discards), "{} both receives and discards {}", p, b);
        }
    }

    #[test]
    fn successor_shape_and_transparency(p in process()) {
        let decls = Arc::new(doc().decls);
        let Some(g) = graph(&p, &decls) else { return Ok(()) };
        for s in g.states() {
            for &t in g.enabled(s) {
                for &u in g.enabled(s) {
                    let vs = g.successors(t, u);
                    for &v in vs.iter() {
                        prop_assert_eq!(g.source(v), g.target(u));
                    }
                    if g.label(u).is_discard() || g.label(u).is_emission() {
                        prop_assert_eq!(&vs[..], &[t][..], "{} after {}", g.derivation(t), g.derivation(u));
                    }
                }
                prop_assert_eq!(g.tr_bullet(t), !g.aconc(t, t));
            }
        }
    }

    #[test]
    fn transition_synchrons_belong_to_the_source(p in process()) {
        let d = doc();
        let of_p = synchrons_of_process(&p, &d.decls).unwrap();
        for t in enabled(&p, &d.decls).unwrap() {
            prop_assert!(synchrons_of_transition(&t).is_subset(&of_p), "{}", t);
        }
    }
}

#[test]
fn affected_by_own_occurrence() {
    let d = doc();
    let decls = &d.decls;
    let first = |text: &str, pick: &dyn Fn(&Label) -> bool| {
        let p = d.parse_process(text).unwrap();
        enabled(&p, decls)
            .unwrap()
            .into_iter()
            .find(|t| pick(t.label()))
            .unwrap()
    };
    let emit = first("0 ^ s", &|l| l.is_emission());
    assert!(!ltss::tr_bullet(&emit, decls).unwrap());
    let receive = first("b?.0", &|l| matches!(l, Label::Receive(_)));
    assert!(!ltss::tr_bullet(&receive, decls).unwrap());
    let hand = first("a.0", &|l| matches!(l, Label::Hand(_)));
    assert!(ltss::tr_bullet(&hand, decls).unwrap());
    let send = first("b!.0", &|l| matches!(l, Label::Send(_)));
    assert!(ltss::tr_bullet(&send, decls).unwrap());
}

#[test]
fn relabelling_examples_with_all_classes() {
    let f = Relabelling {
        handshake: BTreeMap::from([(Name::new("a"), Name::new("c"))]),
        broadcast: BTreeMap::from([(Name::new("b"), Name::new("e"))]),
        signal: BTreeMap::new(),
    };
    assert_eq!(
        apply_relabelling(&f, &Label::CoHand(Name::new("a"))),
        Label::CoHand(Name::new("c"))
    );
    assert_eq!(
        apply_relabelling(&f, &Label::Discard(Name::new("b"))),
        Label::Discard(Name::new("e"))
    );
    assert_eq!(apply_relabelling(&f, &Label::Tau), Label::Tau);
}
