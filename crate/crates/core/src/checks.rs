//! Sweeps that exercise the semantics over many terms: the synchron
//! cross-check of the successor relation, and the algebraic properties of
//! ep-bisimilarity and justness. Used by the command-line front end and the
//! acceptance tests.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::{self, Display, Formatter, Write};
use std::sync::Arc;

use crate::corpus::Corpus;
use crate::epbisim::{
    check_ep_bisim, check_path_relation, check_strong_bisim, validate_witness, EpError, EpVerdict,
    Limits, StrongVerdict, Witness,
};
use crate::justness::{check_b_just, check_justness_preservation, BlockingSet};
use crate::ltss::{Lasso, LtssGraph, StateId};
use crate::synchrons::{
    p_complete, retrieve, ssleadsto, synchrons_of_process, synchrons_of_transition,
    target_synchrons, Synchron,
};
use crate::syntax::{parse, Declarations, Label, Name, Process, Relabelling};

/// Small documents with known behaviour, each with the definitions whose
/// states are worth checking.
pub const SAMPLES: &[(&str, &[&str])] = &[
    (
        "handshake x, y;
         L := y.L + x.L2;
         L2 := y.L2;
         R := Yl | x.0;
         Yl := y.Yl;",
        &["L", "R"],
    ),
    ("handshake jam, bacon; A := jam.A + bacon.A;", &["A"]),
    (
        "broadcast b; signal s; P := (b!.0)^s | (s.0 + b?.0);",
        &["P"],
    ),
    (
        "handshake a, c, d; P := (a.0 | d.0) + c.0; Q := a.(c.0 | d.0);",
        &["P", "Q"],
    ),
    (
        "handshake a, c, e; broadcast b;
         P1 := c.0; P2 := e.0;
         P := a.(b?.P1 + b?.P2) | b!.0;
         Q := a.(b?.P1 + b?.P2);",
        &["P", "Q"],
    ),
    (
        "handshake a; A := tau.A + a.A; B := 'a.B; P := A | B;",
        &["P"],
    ),
];

/// Which comparison of the oracle a mismatch comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MismatchKind {
    /// Successor sets differ from the synchron characterisation.
    Successors,
    /// The synchrons of a target state are not those inherited plus new.
    TargetSynchrons,
    /// Completeness disagrees with the enabled transitions, or a transition
    /// is not rebuilt from its synchrons.
    Completeness,
    /// The graph could not be built or synchrons could not be computed.
    Setup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub kind: MismatchKind,
    pub detail: String,
}

impl Display for Mismatch {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub states: usize,
    pub successor_pairs: usize,
    pub transitions: usize,
    pub complete_states: usize,
    pub complete_subsets: usize,
    pub complete_skipped: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn merge(&mut self, other: OracleReport) {
        self.states += other.states;
        self.successor_pairs += other.successor_pairs;
        self.transitions += other.transitions;
        self.complete_states += other.complete_states;
        self.complete_subsets += other.complete_subsets;
        self.complete_skipped += other.complete_skipped;
        self.mismatches.extend(other.mismatches);
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn count(&self, kind: MismatchKind) -> usize {
        self.mismatches.iter().filter(|m| m.kind == kind).count()
    }

    fn push(&mut self, kind: MismatchKind, detail: String) {
        self.mismatches.push(Mismatch { kind, detail });
    }
}

fn show_set(set: &BTreeSet<Synchron>) -> String {
    let items: Vec<String> = set.iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Compares the successor relation of every state of `g` with its synchron
/// characterisation, checks the synchrons of every target state, and
/// compares completeness with the synchron sets of enabled transitions for
/// states with at most `max_synchrons` synchrons.
pub fn oracle_graph(g: &LtssGraph, max_synchrons: usize) -> OracleReport {
    let decls = g.decls();
    let mut r = OracleReport::default();
    for s in g.states() {
        r.states += 1;
        let p = g.state(s);
        let en = g.enabled(s);
        for &t in en {
            for &u in en {
                r.successor_pairs += 1;
                let direct: BTreeSet<_> = g
                    .successors(t, u)
                    .iter()
                    .map(|&v| g.derivation(v).clone())
                    .collect();
                match ssleadsto(g.derivation(t), g.derivation(u), decls) {
                    Ok(via_synchrons) if via_synchrons == direct => {}
                    Ok(via_synchrons) => r.push(
                        MismatchKind::Successors,
                        format!(
                            "successors of {} after {}: direct {:?}, synchrons {:?}",
                            g.derivation(t),
                            g.derivation(u),
                            direct,
                            via_synchrons
                        ),
                    ),
                    Err(e) => r.push(
                        MismatchKind::Successors,
                        format!("successors of {}: {e}", g.derivation(t)),
                    ),
                }
            }
            r.transitions += 1;
            match target_synchrons(g.derivation(t), decls) {
                Ok(ts) if ts.holds() => {}
                Ok(ts) => r.push(
                    MismatchKind::TargetSynchrons,
                    format!(
                        "synchrons of the target of {}: {} but inherited {} and new {}",
                        g.derivation(t),
                        show_set(&ts.of_target),
                        show_set(&ts.inherited),
                        show_set(&ts.new)
                    ),
                ),
                Err(e) => r.push(
                    MismatchKind::TargetSynchrons,
                    format!("synchrons of the target of {}: {e}", g.derivation(t)),
                ),
            }
        }
        let of_p = match synchrons_of_process(p, decls) {
            Ok(x) => x,
            Err(e) => {
                r.push(MismatchKind::Setup, format!("synchrons of {p}: {e}"));
                continue;
            }
        };
        if of_p.len() > max_synchrons {
            r.complete_skipped += 1;
            continue;
        }
        r.complete_states += 1;
        let realised: BTreeMap<BTreeSet<Synchron>, usize> = en
            .iter()
            .map(|&t| synchrons_of_transition(g.derivation(t)))
            .fold(BTreeMap::new(), |mut m, set| {
                *m.entry(set).or_default() += 1;
                m
            });
        if let Some((set, _)) = realised.iter().find(|(_, &n)| n > 1) {
            r.push(
                MismatchKind::Completeness,
                format!("two transitions of {p} share synchrons {}", show_set(set)),
            );
        }
        for &t in en {
            let set = synchrons_of_transition(g.derivation(t));
            if retrieve(p, &set, decls).as_ref() != Some(g.derivation(t)) {
                r.push(
                    MismatchKind::Completeness,
                    format!("{} is not rebuilt from its synchrons", g.derivation(t)),
                );
            }
        }
        let all: Vec<&Synchron> = of_p.iter().collect();
        for mask in 0u32..(1 << all.len()) {
            r.complete_subsets += 1;
            let sigma: BTreeSet<Synchron> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| (*s).clone())
                .collect();
            let complete = p_complete(&sigma, &of_p, decls);
            if complete != realised.contains_key(&sigma) {
                r.push(
                    MismatchKind::Completeness,
                    format!(
                        "completeness of {} for {p}: checker says {complete}",
                        show_set(&sigma)
                    ),
                );
            }
        }
    }
    r
}

/// Explores `terms` under `decls` and runs [`oracle_graph`] on the result.
pub fn oracle_terms(
    terms: &[Process],
    decls: Arc<Declarations>,
    state_limit: usize,
    max_synchrons: usize,
) -> Result<OracleReport, crate::ltss::LtssError> {
    let g = LtssGraph::explore(terms, decls, state_limit)?;
    Ok(oracle_graph(&g, max_synchrons))
}

/// The oracle over every sample document.
pub fn oracle_samples(state_limit: usize, max_synchrons: usize) -> OracleReport {
    let mut r = OracleReport::default();
    for (src, names) in SAMPLES {
        let doc = parse(src).expect("sample documents parse");
        let terms: Vec<Process> = names
            .iter()
            .map(|n| doc.state(n).expect("sample term"))
            .collect();
        match oracle_terms(&terms, Arc::new(doc.decls), state_limit, max_synchrons) {
            Ok(rep) => r.merge(rep),
            Err(e) => r.push(MismatchKind::Setup, format!("sample {names:?}: {e}")),
        }
    }
    r
}

/// The oracle over a corpus, one graph per term.
pub fn oracle_corpus(corpus: &Corpus, state_limit: usize, max_synchrons: usize) -> OracleReport {
    let mut r = OracleReport::default();
    for t in &corpus.terms {
        match oracle_terms(
            std::slice::from_ref(t),
            corpus.decls.clone(),
            state_limit,
            max_synchrons,
        ) {
            Ok(rep) => r.merge(rep),
            Err(e) => r.push(MismatchKind::Setup, format!("{t}: {e}")),
        }
    }
    r
}

/// Deterministic lassos from `start`. The `k`-th walk takes a rotating
/// choice among the action transitions of each state (discards only when
/// nothing else is enabled) until a state repeats.
pub fn lassos(g: &LtssGraph, start: StateId, count: usize) -> Vec<Lasso> {
    let mut out: Vec<Lasso> = Vec::new();
    for k in 0..count {
        let mut states = vec![start];
        let mut steps = Vec::new();
        loop {
            let here = *states.last().unwrap();
            let en = g.enabled(here);
            let active: Vec<_> = en
                .iter()
                .copied()
                .filter(|&t| g.label(t).is_action())
                .collect();
            let choices = if active.is_empty() {
                en.to_vec()
            } else {
                active
            };
            if choices.is_empty() {
                break;
            }
            let t = choices[(k + steps.len() * (k + 1)) % choices.len()];
            steps.push(t);
            let next = g.target(t);
            if let Some(i) = states.iter().position(|&s| s == next) {
                let lasso = Lasso {
                    start,
                    prefix: steps[..i].to_vec(),
                    cycle: steps[i..].to_vec(),
                };
                if !out.contains(&lasso) {
                    out.push(lasso);
                }
                break;
            }
            states.push(next);
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl PropReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub state_limit: usize,
    pub limits: Limits,
    pub lassos_per_witness: usize,
    /// Witnesses whose composition with their inverse would pair up more
    /// triples than this are not composed.
    pub max_compose_pairs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            state_limit: 2_000,
            limits: Limits::default(),
            lassos_per_witness: 2,
            max_compose_pairs: 1_000_000,
        }
    }
}

pub const REFLEXIVITY: &str = "reflexivity";
pub const SYMMETRY: &str = "symmetry";
pub const TRANSITIVITY: &str = "transitivity";
pub const UNION: &str = "union";
pub const WITNESS_VALIDITY: &str = "witness-validity";
pub const COMMUTATIVITY: &str = "commutativity";
pub const ASSOCIATIVITY: &str = "associativity";
pub const CONGRUENCE: &str = "congruence";
pub const DISCRIMINATION: &str = "discrimination";
pub const JUSTNESS_PRESERVATION: &str = "justness-preservation";
pub const PATH_TRANSFER: &str = "path-transfer";
pub const CONCURRENCY_RESPECT: &str = "concurrency-respect";
pub const REFINEMENT: &str = "refinement";
pub const BLOCKING_MONOTONICITY: &str = "blocking-monotonicity";
pub const SUFFIX_CLOSURE: &str = "suffix-closure";

/// Outcome of an ep-bisimilarity check on a freshly explored graph.
pub enum PairCheck {
    Checked {
        graph: Arc<LtssGraph>,
        p: StateId,
        q: StateId,
        verdict: EpVerdict,
    },
    /// State limit or relation caps exceeded.
    Skipped(String),
}

pub fn check_pair(
    p: &Process,
    q: &Process,
    decls: Arc<Declarations>,
    cfg: &SweepConfig,
) -> PairCheck {
    let g = match LtssGraph::explore(&[p.clone(), q.clone()], decls, cfg.state_limit) {
        Ok(g) => Arc::new(g),
        Err(e) => return PairCheck::Skipped(e.to_string()),
    };
    let (rp, rq) = (g.roots()[0], g.roots()[1]);
    match check_ep_bisim(&g, rp, rq, &cfg.limits) {
        Ok(verdict) => PairCheck::Checked {
            graph: g,
            p: rp,
            q: rq,
            verdict,
        },
        Err(e @ (EpError::TooManyEnabled { .. } | EpError::TooManyRelations { .. })) => {
            PairCheck::Skipped(e.to_string())
        }
    }
}

/// Accumulated property results, keyed by property name.
#[derive(Clone, Debug, Default)]
pub struct Sweep {
    pub cfg: SweepConfig,
    pub reports: BTreeMap<&'static str, PropReport>,
}

impl Sweep {
    pub fn new(cfg: SweepConfig) -> Self {
        Sweep {
            cfg,
            reports: BTreeMap::new(),
        }
    }

    pub fn report(&self, name: &str) -> PropReport {
        self.reports.get(name).cloned().unwrap_or_default()
    }

    fn record(&mut self, name: &'static str, result: Result<(), String>) {
        let r = self.reports.entry(name).or_default();
        r.checked += 1;
        if let Err(e) = result {
            r.failures.push(e);
        }
    }

    fn skip(&mut self, name: &'static str) {
        self.reports.entry(name).or_default().skipped += 1;
    }

    /// Checks `p ≈ q` is reported, and runs every witness-level property
    /// on the result. Returns whether the pair came out equivalent.
    fn expect_equivalent(
        &mut self,
        name: &'static str,
        p: &Process,
        q: &Process,
        decls: &Arc<Declarations>,
    ) -> bool {
        match check_pair(p, q, decls.clone(), &self.cfg) {
            PairCheck::Skipped(_) => {
                self.skip(name);
                false
            }
            PairCheck::Checked {
                graph,
                p: rp,
                q: rq,
                verdict,
            } => match verdict {
                EpVerdict::Equivalent(w) => {
                    self.record(name, Ok(()));
                    self.witness_properties(&graph, rp, rq, &w);
                    true
                }
                EpVerdict::Inequivalent(trace) => {
                    let detail = trace.to_structured(&graph);
                    self.record(
                        name,
                        Err(format!("{p} and {q} found inequivalent:\n{detail}")),
                    );
                    false
                }
            },
        }
    }

    /// Properties every produced witness must have.
    pub fn witness_properties(&mut self, g: &LtssGraph, p: StateId, q: StateId, w: &Witness) {
        let names = || format!("{} and {}", g.state(p), g.state(q));
        self.record(
            WITNESS_VALIDITY,
            validate_witness(g, w).map_err(|v| format!("{}: {v}", names())),
        );
        self.record(
            REFINEMENT,
            match check_strong_bisim(g, p, q) {
                StrongVerdict::Equivalent => Ok(()),
                StrongVerdict::Inequivalent { .. } => {
                    Err(format!("{} are not strongly bisimilar", names()))
                }
            },
        );
        self.record(
            CONCURRENCY_RESPECT,
            concurrency_respect(g, w).map_err(|e| format!("{}: {e}", names())),
        );
        let inv = w.invert();
        self.record(
            SYMMETRY,
            validate_witness(g, &inv).map_err(|v| format!("inverse for {}: {v}", names())),
        );
        if compose_pairs(w, &inv) > self.cfg.max_compose_pairs {
            self.skip(TRANSITIVITY);
        } else {
            let comp = w.compose(&inv);
            let res = validate_witness(g, &comp)
                .map_err(|v| format!("composition for {}: {v}", names()))
                .and_then(|_| {
                    if comp.covers(p, p) {
                        Ok(())
                    } else {
                        Err(format!("composition misses {}", g.state(p)))
                    }
                });
            self.record(TRANSITIVITY, res);
        }
        let un = w.union(&Witness::identity(g, p));
        self.record(
            UNION,
            validate_witness(g, &un).map_err(|v| format!("union for {}: {v}", names())),
        );
        for pi in lassos(g, p, self.cfg.lassos_per_witness) {
            for blocking in [
                BlockingSet::default(),
                BlockingSet::new(pi.cycle.iter().take(1).map(|&t| g.label(t).clone())),
            ] {
                let res = check_justness_preservation(g, w, &pi, &blocking);
                match res {
                    Ok(pres) => {
                        self.record(PATH_TRANSFER, check_path_relation(g, w, &pres.transfer));
                        self.record(
                            JUSTNESS_PRESERVATION,
                            if pres.agrees() {
                                Ok(())
                            } else {
                                Err(format!(
                                    "lasso from {} classified {:?} but transferred {:?}",
                                    g.state(p),
                                    pres.source,
                                    pres.target
                                ))
                            },
                        );
                    }
                    Err(e) => self.record(
                        JUSTNESS_PRESERVATION,
                        Err(format!("lasso from {}: {e}", g.state(p))),
                    ),
                }
            }
        }
    }

    pub fn reflexivity(&mut self, corpus: &Corpus) {
        for t in &corpus.terms {
            match check_pair(t, t, corpus.decls.clone(), &self.cfg) {
                PairCheck::Skipped(_) => self.skip(REFLEXIVITY),
                PairCheck::Checked {
                    graph,
                    p,
                    q,
                    verdict,
                } => match verdict {
                    EpVerdict::Equivalent(w) => {
                        let id = Witness::identity(&graph, p);
                        let res = if id
                            .triples
                            .iter()
                            .all(|tr| w.triples.contains(tr) || tr.p != p)
                        {
                            Ok(())
                        } else {
                            Err(format!("witness for {t} lacks the identity at the root"))
                        };
                        self.record(REFLEXIVITY, res);
                        self.witness_properties(&graph, p, q, &w);
                    }
                    EpVerdict::Inequivalent(_) => {
                        self.record(REFLEXIVITY, Err(format!("{t} is not related to itself")))
                    }
                },
            }
        }
    }

    /// `P+Q ≈ Q+P` and `P|Q ≈ Q|P` for consecutive corpus terms. Returns the
    /// pairs found equivalent, for use as congruence inputs.
    pub fn commutativity(&mut self, corpus: &Corpus, pairs: usize) -> Vec<(Process, Process)> {
        let mut equivalent = Vec::new();
        let ts = &corpus.terms;
        for i in 0..pairs.min(ts.len().saturating_sub(1)) {
            let (p, q) = (&ts[i], &ts[i + 1]);
            for (x, y) in [
                (
                    Process::choice(p.clone(), q.clone()),
                    Process::choice(q.clone(), p.clone()),
                ),
                (
                    Process::par(p.clone(), q.clone()),
                    Process::par(q.clone(), p.clone()),
                ),
            ] {
                if self.expect_equivalent(COMMUTATIVITY, &x, &y, &corpus.decls) {
                    equivalent.push((x, y));
                }
            }
        }
        equivalent
    }

    /// `(P+Q)+R ≈ P+(Q+R)` and `(P|Q)|R ≈ P|(Q|R)` for consecutive terms.
    pub fn associativity(&mut self, corpus: &Corpus, triples: usize) {
        let ts = &corpus.terms;
        for i in 0..triples.min(ts.len().saturating_sub(2)) {
            let (p, q, r) = (ts[i].clone(), ts[i + 1].clone(), ts[i + 2].clone());
            let sum_l = Process::choice(Process::choice(p.clone(), q.clone()), r.clone());
            let sum_r = Process::choice(p.clone(), Process::choice(q.clone(), r.clone()));
            self.expect_equivalent(ASSOCIATIVITY, &sum_l, &sum_r, &corpus.decls);
            let par_l = Process::par(Process::par(p.clone(), q.clone()), r.clone());
            let par_r = Process::par(p, Process::par(q, r));
            self.expect_equivalent(ASSOCIATIVITY, &par_l, &par_r, &corpus.decls);
        }
    }

    /// Wraps each equivalent pair in every one-level context and expects
    /// the results to be equivalent again. Returns how many pairs came
    /// through all contexts without being skipped.
    pub fn congruence(&mut self, corpus: &Corpus, pairs: &[(Process, Process)]) -> usize {
        let mut complete = 0;
        for (i, (x, y)) in pairs.iter().enumerate() {
            let r = corpus.terms[(i * 7 + 3) % corpus.terms.len()].clone();
            let before = self.report(CONGRUENCE);
            let mut all = true;
            for (cx, cy) in contexts(x, y, &r) {
                all &= self.expect_equivalent(CONGRUENCE, &cx, &cy, &corpus.decls);
            }
            let after = self.report(CONGRUENCE);
            if all && after.failures.len() == before.failures.len() {
                complete += 1;
            }
        }
        complete
    }

    /// Monotonicity in the blocking set and closure under suffixes, on
    /// lassos of every corpus term.
    pub fn justness_laws(&mut self, corpus: &Corpus) {
        for t in &corpus.terms {
            let Ok(g) = LtssGraph::explore(
                std::slice::from_ref(t),
                corpus.decls.clone(),
                self.cfg.state_limit,
            ) else {
                self.skip(BLOCKING_MONOTONICITY);
                continue;
            };
            for pi in lassos(&g, g.root(), 3) {
                let empty = BlockingSet::default();
                let base = check_b_just(&g, &pi, &empty).map(|v| v.is_just());
                let labels: BTreeSet<Label> = (0..pi.positions())
                    .map(|i| g.label(pi.step(i)).clone())
                    .collect();
                for l in labels {
                    let bigger = BlockingSet::new([l]);
                    let res = match (&base, check_b_just(&g, &pi, &bigger)) {
                        (Ok(true), Ok(v)) if !v.is_just() => {
                            Err(format!("{t}: blocking more made a lasso unjust"))
                        }
                        (Err(e), _) => Err(format!("{t}: {e}")),
                        (_, Err(e)) => Err(format!("{t}: {e}")),
                        _ => Ok(()),
                    };
                    self.record(BLOCKING_MONOTONICITY, res);
                }
                if let Ok(true) = base {
                    for s in suffixes(&g, &pi) {
                        let res = match check_b_just(&g, &s, &empty) {
                            Ok(v) if v.is_just() => Ok(()),
                            Ok(_) => Err(format!("{t}: a suffix of a just lasso is unjust")),
                            Err(e) => Err(format!("{t}: {e}")),
                        };
                        self.record(SUFFIX_CLOSURE, res);
                    }
                }
            }
        }
    }

    /// The two encodings of a counter running next to a one-shot
    /// assignment: strongly bisimilar, not ep-bisimilar, and the looping
    /// path is unjust only where the components are independent.
    pub fn discrimination(&mut self) {
        let (src, _) = SAMPLES[0];
        let doc = parse(src).expect("sample parses");
        let (l, r) = (doc.state("L").unwrap(), doc.state("R").unwrap());
        let g = match LtssGraph::explore(&[l, r], Arc::new(doc.decls), self.cfg.state_limit) {
            Ok(g) => g,
            Err(e) => return self.record(DISCRIMINATION, Err(e.to_string())),
        };
        let (pl, pr) = (g.roots()[0], g.roots()[1]);
        let strong = check_strong_bisim(&g, pl, pr) == StrongVerdict::Equivalent;
        self.record(
            DISCRIMINATION,
            if strong {
                Ok(())
            } else {
                Err("encodings not strongly bisimilar".into())
            },
        );
        let ep = check_ep_bisim(&g, pl, pr, &self.cfg.limits);
        let res = match ep {
            Ok(EpVerdict::Inequivalent(_)) => Ok(()),
            Ok(EpVerdict::Equivalent(_)) => Err("encodings found ep-bisimilar".into()),
            Err(e) => Err(e.to_string()),
        };
        self.record(DISCRIMINATION, res);
        let y = Label::Hand(Name::new("y"));
        for (root, expect_just) in [(pl, true), (pr, false)] {
            let res = match label_lasso(&g, root, &y) {
                Some(pi) => match check_b_just(&g, &pi, &BlockingSet::default()) {
                    Ok(v) if v.is_just() == expect_just => Ok(()),
                    Ok(v) => Err(format!("y-loop from {} classified {v:?}", g.state(root))),
                    Err(e) => Err(e.to_string()),
                },
                None => Err(format!("no y-loop from {}", g.state(root))),
            };
            self.record(DISCRIMINATION, res);
        }
    }
}

/// Follows transitions labelled `l` from `s` until a state repeats.
pub fn label_lasso(g: &LtssGraph, s: StateId, l: &Label) -> Option<Lasso> {
    let mut steps = Vec::new();
    let mut states = vec![s];
    loop {
        let here = *states.last().unwrap();
        let t = *g.enabled(here).iter().find(|&&t| g.label(t) == l)?;
        steps.push(t);
        let next = g.target(t);
        if let Some(k) = states.iter().position(|&x| x == next) {
            return Some(Lasso {
                start: s,
                prefix: steps[..k].to_vec(),
                cycle: steps[k..].to_vec(),
            });
        }
        states.push(next);
    }
}

/// Every lasso obtained by dropping a proper part of the unrolled path:
/// prefix steps first, then rotations of the cycle.
pub fn suffixes(g: &LtssGraph, pi: &Lasso) -> Vec<Lasso> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for i in 1..pi.positions() {
        let start = pi.state_at(g, i);
        let (prefix, cycle) = if i <= pi.prefix.len() {
            (pi.prefix[i..].to_vec(), pi.cycle.clone())
        } else {
            let k = i - pi.prefix.len();
            let mut c = pi.cycle[k..].to_vec();
            c.extend_from_slice(&pi.cycle[..k]);
            (Vec::new(), c)
        };
        let l = Lasso {
            start,
            prefix,
            cycle,
        };
        if seen.insert(l.clone()) {
            out.push(l);
        }
    }
    out
}

/// `α.·`, `· + R`, `· | R`, `·\{a}`, `·[a->c]` and `· ^ s` around both
/// sides of a pair.
pub fn contexts(x: &Process, y: &Process, r: &Process) -> Vec<(Process, Process)> {
    let a = Name::new("a");
    let wrap: Vec<Box<dyn Fn(&Process) -> Process>> = vec![
        Box::new(|p| Process::prefix(Label::Hand(Name::new("a")), p.clone())),
        Box::new(|p| Process::choice(p.clone(), r.clone())),
        Box::new(|p| Process::par(p.clone(), r.clone())),
        Box::new(move |p| Process::restrict(p.clone(), BTreeSet::from([a.clone()]))),
        Box::new(|p| {
            let f = Relabelling {
                handshake: BTreeMap::from([(Name::new("a"), Name::new("c"))]),
                ..Relabelling::default()
            };
            Process::relabel(p.clone(), f)
        }),
        Box::new(|p| Process::signal(p.clone(), Name::new("s"))),
    ];
    wrap.iter().map(|c| (c(x), c(y))).collect()
}

/// How many pairs of triples `w1.compose(w2)` has to combine.
pub fn compose_pairs(w1: &Witness, w2: &Witness) -> usize {
    let mut right: HashMap<StateId, usize> = HashMap::new();
    for tr in &w2.triples {
        *right.entry(tr.p).or_default() += 1;
    }
    w1.triples
        .iter()
        .map(|tr| right.get(&tr.q).copied().unwrap_or(0))
        .sum()
}

/// `t ⌣ v ⟺ u ⌣ w` whenever `t R u` and `v R w` in one triple.
pub fn concurrency_respect(g: &LtssGraph, w: &Witness) -> Result<(), String> {
    for tr in &w.triples {
        for &(t, u) in &tr.rel {
            for &(v, x) in &tr.rel {
                if g.aconc(t, v) != g.aconc(u, x) {
                    return Err(format!(
                        "{} after {} differs from {} after {}",
                        g.derivation(t),
                        g.derivation(v),
                        g.derivation(u),
                        g.derivation(x)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Runs every property suite over `corpus` using `pairs` consecutive pairs.
pub fn run_properties(corpus: &Corpus, pairs: usize, cfg: SweepConfig) -> Sweep {
    let mut sweep = Sweep::new(cfg);
    sweep.discrimination();
    sweep.reflexivity(corpus);
    let equivalent = sweep.commutativity(corpus, pairs);
    sweep.associativity(corpus, pairs);
    sweep.congruence(corpus, &equivalent);
    sweep.justness_laws(corpus);
    sweep
}

impl Sweep {
    /// One line per property: name, checked, skipped, failures.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (name, r) in &self.reports {
            let status = if r.holds() { "ok" } else { "FAILED" };
            let _ = writeln!(
                out,
                "{name:<24} {status:<6} checked {:>6} skipped {:>4} failures {}",
                r.checked,
                r.skipped,
                r.failures.len()
            );
        }
        out
    }

    pub fn holds(&self) -> bool {
        self.reports.values().all(PropReport::holds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::generate;

    #[test]
    fn samples_agree_with_synchrons() {
        let r = oracle_samples(1000, 12);
        assert!(r.is_clean(), "{:#?}", r.mismatches);
        assert!(r.complete_states > 0);
    }

    #[test]
    fn small_corpus_agrees_with_synchrons() {
        let c = generate(15, 11, 200);
        let r = oracle_corpus(&c, 200, 10);
        assert!(
            r.is_clean(),
            "{:#?}",
            &r.mismatches[..r.mismatches.len().min(5)]
        );
    }

    #[test]
    fn discrimination_holds() {
        let mut s = Sweep::new(SweepConfig::default());
        s.discrimination();
        let r = s.report(DISCRIMINATION);
        assert_eq!(r.checked, 4);
        assert!(r.holds(), "{:?}", r.failures);
    }

    #[test]
    fn suffixes_of_a_lasso() {
        let doc = parse("handshake a, c, d; A := a.c.d.A;").unwrap();
        let g = LtssGraph::explore(&[doc.state("A").unwrap()], Arc::new(doc.decls), 100).unwrap();
        let pi = lassos(&g, g.root(), 1).remove(0);
        assert_eq!((pi.prefix.len(), pi.cycle.len()), (0, 3));
        let s = suffixes(&g, &pi);
        assert_eq!(s.len(), 2);
        for l in &s {
            g.check_lasso(l).unwrap();
        }
    }
}
