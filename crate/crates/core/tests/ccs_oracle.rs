//! A second, CCS-only implementation of the successor and concurrency
//! relations, compared with the general one on handshake-only terms.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use abcde_core::ltss::{self, LtssGraph};
use abcde_core::{
    parse, Declarations, Derivation, DerivationKind as K, Label, Name, Process, Relabelling,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exists(t: Derivation) -> Option<Derivation> {
    t.try_label().is_some().then_some(t)
}

fn restricted(l: &Label, set: &BTreeSet<Name>) -> bool {
    match l {
        Label::Hand(c) | Label::CoHand(c) => set.contains(c),
        _ => false,
    }
}

/// `{t' | t ⤳_v t'}` for CCS transitions with a common source.
fn ccs_succ(t: &Derivation, v: &Derivation) -> BTreeSet<Derivation> {
    let mut out = BTreeSet::new();
    let mut add = |d: Derivation| {
        if let Some(d) = exists(d) {
            out.insert(d);
        }
    };
    match (t.kind(), v.kind()) {
        (K::SumL(t1, _), K::SumL(v1, _)) | (K::SumR(_, t1), K::SumR(_, v1)) => {
            ccs_succ(t1, v1).into_iter().for_each(add);
        }
        (K::ParL(t1, _), K::ParR(_, w)) => add(Derivation::new(K::ParL(t1.clone(), w.target()))),
        (K::ParR(_, u1), K::ParL(v1, _)) => add(Derivation::new(K::ParR(v1.target(), u1.clone()))),
        (K::ParL(t1, q), K::ParL(v1, _)) => {
            for t2 in ccs_succ(t1, v1) {
                add(Derivation::new(K::ParL(t2, q.clone())));
            }
        }
        (K::ParL(t1, _), K::ParBoth(v1, w)) => {
            for t2 in ccs_succ(t1, v1) {
                add(Derivation::new(K::ParL(t2, w.target())));
            }
        }
        (K::ParBoth(t1, u1), K::ParL(v1, _)) => {
            for t2 in ccs_succ(t1, v1) {
                add(Derivation::new(K::ParBoth(t2, u1.clone())));
            }
        }
        (K::ParR(p, u1), K::ParR(_, w1)) => {
            for u2 in ccs_succ(u1, w1) {
                add(Derivation::new(K::ParR(p.clone(), u2)));
            }
        }
        (K::ParR(_, u1), K::ParBoth(v, w1)) => {
            for u2 in ccs_succ(u1, w1) {
                add(Derivation::new(K::ParR(v.target(), u2)));
            }
        }
        (K::ParBoth(t1, u1), K::ParR(_, w1)) => {
            for u2 in ccs_succ(u1, w1) {
                add(Derivation::new(K::ParBoth(t1.clone(), u2)));
            }
        }
        (K::ParBoth(t1, u1), K::ParBoth(v1, w1)) => {
            let right = ccs_succ(u1, w1);
            for t2 in ccs_succ(t1, v1) {
                for u2 in &right {
                    add(Derivation::new(K::ParBoth(t2.clone(), u2.clone())));
                }
            }
        }
        (K::Res(t1, l), K::Res(v1, _)) => {
            for t2 in ccs_succ(t1, v1) {
                if !restricted(t2.label(), l) {
                    add(Derivation::new(K::Res(t2, l.clone())));
                }
            }
        }
        (K::Rel(t1, f), K::Rel(v1, _)) => {
            for t2 in ccs_succ(t1, v1) {
                add(Derivation::new(K::Rel(t2, f.clone())));
            }
        }
        (K::Rec(_, t1), K::Rec(_, v1)) => ccs_succ(t1, v1).into_iter().for_each(add),
        _ => {}
    }
    out
}

/// `t ⌣ v` for CCS, by the rules for concurrency alone.
fn ccs_conc(t: &Derivation, v: &Derivation) -> bool {
    match (t.kind(), v.kind()) {
        (K::SumL(t1, _), K::SumL(v1, _)) | (K::SumR(_, t1), K::SumR(_, v1)) => ccs_conc(t1, v1),
        (K::ParL(..), K::ParR(..)) | (K::ParR(..), K::ParL(..)) => true,
        (K::ParL(t1, _), K::ParL(v1, _) | K::ParBoth(v1, _))
        | (K::ParBoth(t1, _), K::ParL(v1, _)) => ccs_conc(t1, v1),
        (K::ParR(_, u1), K::ParR(_, w1) | K::ParBoth(_, w1))
        | (K::ParBoth(_, u1), K::ParR(_, w1)) => ccs_conc(u1, w1),
        (K::ParBoth(t1, u1), K::ParBoth(v1, w1)) => ccs_conc(t1, v1) && ccs_conc(u1, w1),
        (K::Res(t1, _), K::Res(v1, _))
        | (K::Rel(t1, _), K::Rel(v1, _))
        | (K::Rec(_, t1), K::Rec(_, v1)) => ccs_conc(t1, v1),
        _ => false,
    }
}

struct CcsGen {
    rng: ChaCha8Rng,
    hand: Vec<Name>,
    agents: Vec<Name>,
}

impl CcsGen {
    fn action(&mut self) -> Label {
        let c = self.hand[self.rng.gen_range(0..self.hand.len())].clone();
        match self.rng.gen_range(0..7) {
            0..=2 => Label::Hand(c),
            3..=5 => Label::CoHand(c),
            _ => Label::Tau,
        }
    }

    fn term(&mut self, depth: usize) -> Process {
        if depth <= 1 {
            return match self.rng.gen_range(0..4) {
                0 => Process::nil(),
                1 => Process::agent(self.agents[self.rng.gen_range(0..self.agents.len())].clone()),
                _ => Process::prefix(self.action(), Process::nil()),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..12) {
            0..=3 => Process::par(self.term(d), self.term(d)),
            4..=6 => Process::choice(self.term(d), self.term(d)),
            7..=8 => {
                let a = self.action();
                Process::prefix(a, self.term(d))
            }
            9 => {
                let c = self.hand[self.rng.gen_range(0..self.hand.len())].clone();
                Process::restrict(self.term(d), BTreeSet::from([c]))
            }
            10 => {
                let i = self.rng.gen_range(0..self.hand.len());
                let f = Relabelling {
                    handshake: BTreeMap::from([(
                        self.hand[i].clone(),
                        self.hand[(i + 1) % self.hand.len()].clone(),
                    )]),
                    ..Relabelling::default()
                };
                Process::relabel(self.term(d), f)
            }
            _ => Process::agent(self.agents[self.rng.gen_range(0..self.agents.len())].clone()),
        }
    }
}

fn ccs_corpus(n: usize, seed: u64) -> (Arc<Declarations>, Vec<Process>) {
    let doc = parse(
        "handshake a, c, d;
         A0 := a.A0 + 'c.A1;
         A1 := c.(d.0 + tau.A0);
         A2 := 'a.'d.A2;",
    )
    .unwrap();
    let decls = Arc::new(doc.decls);
    let mut gen = CcsGen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        hand: ["a", "c", "d"].map(Name::new).to_vec(),
        agents: ["A0", "A1", "A2"].map(Name::new).to_vec(),
    };
    let mut terms = Vec::new();
    while terms.len() < n {
        let depth = gen.rng.gen_range(2..=5);
        terms.push(gen.term(depth));
    }
    (decls, terms)
}

#[test]
fn successors_agree_with_ccs_rules() {
    let (decls, terms) = ccs_corpus(150, 11);
    let mut pairs = 0;
    let mut concurrent = 0;
    for p in &terms {
        let g = LtssGraph::explore(std::slice::from_ref(p), decls.clone(), 500).expect("finite");
        for s in g.states() {
            let en = g.enabled(s);
            for &t in en {
                for &u in en {
                    let (dt, du) = (g.derivation(t), g.derivation(u));
                    pairs += 1;
                    let general = ltss::successors(dt, du, &decls).unwrap();
                    assert_eq!(general, ccs_succ(dt, du), "successors of {dt} after {du}");
                    let c = ccs_conc(dt, du);
                    assert_eq!(ltss::aconc(dt, du, &decls).unwrap(), c, "{dt} and {du}");
                    assert_eq!(c, ccs_conc(du, dt), "symmetry for {dt} and {du}");
                    concurrent += usize::from(c);
                }
            }
        }
    }
    assert!(pairs > 1000, "only {pairs} pairs");
    assert!(concurrent > 100, "only {concurrent} concurrent pairs");
}

#[test]
fn concurrency_is_irreflexive_for_ccs() {
    let (decls, terms) = ccs_corpus(40, 5);
    for p in &terms {
        for t in abcde_core::enabled(p, &decls).unwrap() {
            assert!(!ccs_conc(&t, &t), "{t}");
            assert!(!ltss::conc(&t, &t, &decls).unwrap(), "{t}");
        }
    }
}
