//! The successor relation on transitions, and finite LTSS graphs explored
//! from a set of root states.
//!
//! `t ⤳_u v` says that `v`, enabled after `u`, is what remains of `t` once
//! `u` has happened. A transition with no successor after `u` is affected by
//! `u`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::sos::{enabled, Derivation, DerivationKind, SosError};
use crate::syntax::{Declarations, Label, Process};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtssError {
    #[error("transitions {0} and {1} do not share a source")]
    SourceMismatch(Derivation, Derivation),
    #[error("not a path: {0}")]
    InvalidPath(String),
    #[error("state limit of {0} exceeded")]
    LimitExceeded(usize),
    #[error(transparent)]
    Sos(#[from] SosError),
}

fn same_broadcast_reaction(l: &Label, b: &Label) -> bool {
    match b.broadcast_name() {
        Some(name) => {
            matches!(b, Label::Receive(_) | Label::Discard(_)) && l.is_receive_or_discard_of(name)
        }
        None => false,
    }
}

/// `{v | t ⤳_u v}`.
pub fn successors(
    t: &Derivation,
    u: &Derivation,
    decls: &Declarations,
) -> Result<BTreeSet<Derivation>, LtssError> {
    if t.source() != u.source() {
        return Err(LtssError::SourceMismatch(t.clone(), u.clone()));
    }
    let mut out = BTreeSet::new();
    succ(t, u, decls, &mut out)?;
    Ok(out)
}

/// `t ⌣ u`: `t` has a successor after `u`.
pub fn aconc(t: &Derivation, u: &Derivation, decls: &Declarations) -> Result<bool, LtssError> {
    Ok(!successors(t, u, decls)?.is_empty())
}

pub fn conc(t: &Derivation, u: &Derivation, decls: &Declarations) -> Result<bool, LtssError> {
    Ok(aconc(t, u, decls)? && aconc(u, t, decls)?)
}

/// Transitions that are affected by their own occurrence.
pub fn tr_bullet(t: &Derivation, decls: &Declarations) -> Result<bool, LtssError> {
    Ok(!aconc(t, t, decls)?)
}

/// Checks that `ts` is the transition sequence of a path from `start`.
pub fn check_path(start: &Process, ts: &[Derivation]) -> Result<(), LtssError> {
    let mut here = start.clone();
    for (i, u) in ts.iter().enumerate() {
        if u.source() != here {
            return Err(LtssError::InvalidPath(format!(
                "step {i}: {u} does not start at {here}"
            )));
        }
        here = u.target();
    }
    Ok(())
}

/// `{w | t ⤳_ts w}`, the variants of `t` that survive the whole sequence.
pub fn successors_along(
    t: &Derivation,
    ts: &[Derivation],
    decls: &Declarations,
) -> Result<BTreeSet<Derivation>, LtssError> {
    check_path(&t.source(), ts)?;
    let mut current = BTreeSet::from([t.clone()]);
    for u in ts {
        let mut next = BTreeSet::new();
        for v in &current {
            succ(v, u, decls, &mut next)?;
        }
        current = next;
        if current.is_empty() {
            break;
        }
    }
    Ok(current)
}

pub fn paconc(t: &Derivation, ts: &[Derivation], decls: &Declarations) -> Result<bool, LtssError> {
    Ok(!successors_along(t, ts, decls)?.is_empty())
}

fn sub(
    t: &Derivation,
    u: &Derivation,
    decls: &Declarations,
) -> Result<BTreeSet<Derivation>, LtssError> {
    let mut out = BTreeSet::new();
    succ(t, u, decls, &mut out)?;
    Ok(out)
}

fn emit_if_valid(d: Derivation, decls: &Declarations, out: &mut BTreeSet<Derivation>) {
    // a composed successor only exists if the rule that builds it applies
    if is_composable(&d, decls) {
        out.insert(d);
    }
}

fn is_composable(d: &Derivation, _decls: &Declarations) -> bool {
    use DerivationKind::*;
    let Some(l) = d.try_label() else { return false };
    match d.kind() {
        ParL(t, _) | ParR(_, t) => t.label().is_interleaving(),
        Res(_, set) => !l.restricted_by(set),
        _ => true,
    }
}

fn succ(
    chi: &Derivation,
    zeta: &Derivation,
    decls: &Declarations,
    out: &mut BTreeSet<Derivation>,
) -> Result<(), LtssError> {
    use DerivationKind as K;
    let d = Derivation::new;
    let lz = zeta.label();

    // discards and emissions leave every co-enabled transition intact
    if lz.is_passive() {
        out.insert(chi.clone());
    }

    match (chi.kind(), zeta.kind()) {
        // a receive or a discard continues as any reaction to the same
        // broadcast in the state after the prefix
        (K::Act(Label::Receive(b), p), _) if chi == zeta => {
            let b = Label::Receive(b.clone());
            for t in enabled(p, decls)? {
                if same_broadcast_reaction(t.label(), &b) {
                    out.insert(t);
                }
            }
        }
        (K::DisAct(b, a, p), K::Act(a2, p2)) if a == a2 && p == p2 => {
            let b = Label::Discard(b.clone());
            for t in enabled(p, decls)? {
                if same_broadcast_reaction(t.label(), &b) {
                    out.insert(t);
                }
            }
        }

        (K::SumL(t, _), K::SumL(v, _)) | (K::SumBoth(t, _), K::SumL(v, _))
            if !v.label().is_emission() =>
        {
            out.extend(sub(t, v, decls)?);
        }
        (K::SumR(_, u), K::SumR(_, w)) | (K::SumBoth(_, u), K::SumR(_, w))
            if !w.label().is_emission() =>
        {
            out.extend(sub(u, w, decls)?);
        }
        (K::SumL(t, _), K::SumR(_, w)) => {
            if let (Label::Receive(b), false) = (t.label(), w.label().is_emission()) {
                let b = Label::Receive(b.clone());
                for u2 in enabled(&zeta.target(), decls)? {
                    if same_broadcast_reaction(u2.label(), &b) {
                        out.insert(u2);
                    }
                }
            }
        }
        (K::SumR(_, u), K::SumL(v, _)) => {
            if let (Label::Receive(b), false) = (u.label(), v.label().is_emission()) {
                let b = Label::Receive(b.clone());
                for t2 in enabled(&zeta.target(), decls)? {
                    if same_broadcast_reaction(t2.label(), &b) {
                        out.insert(t2);
                    }
                }
            }
        }

        (K::ParL(t, _), K::ParR(_, w)) => {
            emit_if_valid(d(K::ParL(t.clone(), w.target())), decls, out);
        }
        (K::ParR(_, u), K::ParL(v, _)) => {
            emit_if_valid(d(K::ParR(v.target(), u.clone())), decls, out);
        }
        (K::ParL(t, q), K::ParL(v, _)) => {
            for t2 in sub(t, v, decls)? {
                emit_if_valid(d(K::ParL(t2, q.clone())), decls, out);
            }
        }
        (K::ParL(t, _), K::ParBoth(v, w)) => {
            for t2 in sub(t, v, decls)? {
                emit_if_valid(d(K::ParL(t2, w.target())), decls, out);
            }
        }
        (K::ParBoth(t, u), K::ParL(v, _)) => {
            for t2 in sub(t, v, decls)? {
                emit_if_valid(d(K::ParBoth(t2, u.clone())), decls, out);
            }
        }
        (K::ParR(p, u), K::ParR(_, w)) => {
            for u2 in sub(u, w, decls)? {
                emit_if_valid(d(K::ParR(p.clone(), u2)), decls, out);
            }
        }
        (K::ParR(_, u), K::ParBoth(v, w)) => {
            for u2 in sub(u, w, decls)? {
                emit_if_valid(d(K::ParR(v.target(), u2)), decls, out);
            }
        }
        (K::ParBoth(t, u), K::ParR(_, w)) => {
            for u2 in sub(u, w, decls)? {
                emit_if_valid(d(K::ParBoth(t.clone(), u2)), decls, out);
            }
        }
        (K::ParBoth(t, u), K::ParBoth(v, w)) => {
            let ts = sub(t, v, decls)?;
            if !ts.is_empty() {
                let us = sub(u, w, decls)?;
                for t2 in &ts {
                    for u2 in &us {
                        emit_if_valid(d(K::ParBoth(t2.clone(), u2.clone())), decls, out);
                    }
                }
            }
        }

        (K::Res(t, set), K::Res(v, _)) if lz.is_action() => {
            for t2 in sub(t, v, decls)? {
                emit_if_valid(d(K::Res(t2, set.clone())), decls, out);
            }
        }
        (K::Rel(t, f), K::Rel(v, _)) if lz.is_action() => {
            for t2 in sub(t, v, decls)? {
                out.insert(d(K::Rel(t2, f.clone())));
            }
        }
        (K::Rec(_, t), K::Rec(_, v)) if lz.is_action() => {
            out.extend(sub(t, v, decls)?);
        }
        (K::SigCtx(t, _), K::SigCtx(v, _)) if lz.is_action() => {
            out.extend(sub(t, v, decls)?);
        }
        _ => {}
    }
    Ok(())
}

/// Index of a state in an [`LtssGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

/// Index of a transition in an [`LtssGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TransId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An infinite path that runs through `prefix` once and then repeats
/// `cycle` forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub start: StateId,
    pub prefix: Vec<TransId>,
    pub cycle: Vec<TransId>,
}

impl Lasso {
    /// Number of distinct suffixes.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// The `i`-th transition of the unrolled path.
    pub fn step(&self, i: usize) -> TransId {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Position in the cycle that the `i`-th step of the unrolled path
    /// takes, if it is past the prefix.
    pub fn cycle_position(&self, i: usize) -> Option<usize> {
        (i >= self.prefix.len()).then(|| (i - self.prefix.len()) % self.cycle.len())
    }

    pub fn state_at(&self, g: &LtssGraph, i: usize) -> StateId {
        if i == 0 {
            self.start
        } else {
            g.target(self.step(i - 1))
        }
    }
}

/// The part of the LTSS reachable from some root states. States and
/// transitions are numbered in breadth-first discovery order.
pub struct LtssGraph {
    decls: Arc<Declarations>,
    states: Vec<Process>,
    state_ids: HashMap<Process, StateId>,
    transitions: Vec<Derivation>,
    trans_ids: HashMap<Derivation, TransId>,
    source: Vec<StateId>,
    target: Vec<StateId>,
    enabled: Vec<Vec<TransId>>,
    roots: Vec<StateId>,
    succ_memo: Mutex<HashMap<(TransId, TransId), Arc<[TransId]>>>,
}

impl fmt::Debug for LtssGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LtssGraph")
            .field("states", &self.states.len())
            .field("transitions", &self.transitions.len())
            .field("roots", &self.roots)
            .finish()
    }
}

/// Breadth-first exploration from a single root.
pub fn explore(
    p: &Process,
    decls: Arc<Declarations>,
    state_limit: usize,
) -> Result<LtssGraph, LtssError> {
    LtssGraph::explore(std::slice::from_ref(p), decls, state_limit)
}

impl LtssGraph {
    /// Breadth-first exploration from all `roots`. Fails once more than
    /// `state_limit` states have been discovered.
    pub fn explore(
        roots: &[Process],
        decls: Arc<Declarations>,
        state_limit: usize,
    ) -> Result<Self, LtssError> {
        let mut g = LtssGraph {
            decls,
            states: Vec::new(),
            state_ids: HashMap::new(),
            transitions: Vec::new(),
            trans_ids: HashMap::new(),
            source: Vec::new(),
            target: Vec::new(),
            enabled: Vec::new(),
            roots: Vec::new(),
            succ_memo: Mutex::new(HashMap::new()),
        };
        let mut queue = VecDeque::new();
        for r in roots {
            let (id, fresh) = g.intern_state(r, state_limit)?;
            if fresh {
                queue.push_back(id);
            }
            g.roots.push(id);
        }
        while let Some(s) = queue.pop_front() {
            let p = g.states[s.index()].clone();
            let en = enabled(&p, &g.decls)?;
            let mut ids = Vec::with_capacity(en.len());
            for t in en {
                let (tgt, fresh) = g.intern_state(&t.target(), state_limit)?;
                if fresh {
                    queue.push_back(tgt);
                }
                let id = TransId(g.transitions.len() as u32);
                g.trans_ids.insert(t.clone(), id);
                g.transitions.push(t);
                g.source.push(s);
                g.target.push(tgt);
                ids.push(id);
            }
            g.enabled[s.index()] = ids;
        }
        Ok(g)
    }

    fn intern_state(&mut self, p: &Process, limit: usize) -> Result<(StateId, bool), LtssError> {
        if let Some(&id) = self.state_ids.get(p) {
            return Ok((id, false));
        }
        if self.states.len() >= limit {
            return Err(LtssError::LimitExceeded(limit));
        }
        let id = StateId(self.states.len() as u32);
        self.states.push(p.clone());
        self.state_ids.insert(p.clone(), id);
        self.enabled.push(Vec::new());
        Ok((id, true))
    }

    pub fn decls(&self) -> &Declarations {
        &self.decls
    }

    pub fn decls_arc(&self) -> Arc<Declarations> {
        self.decls.clone()
    }

    pub fn roots(&self) -> &[StateId] {
        &self.roots
    }

    pub fn root(&self) -> StateId {
        self.roots[0]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn transitions(&self) -> impl Iterator<Item = TransId> + '_ {
        (0..self.transitions.len() as u32).map(TransId)
    }

    pub fn state(&self, s: StateId) -> &Process {
        &self.states[s.index()]
    }

    pub fn state_id(&self, p: &Process) -> Option<StateId> {
        self.state_ids.get(p).copied()
    }

    pub fn derivation(&self, t: TransId) -> &Derivation {
        &self.transitions[t.index()]
    }

    pub fn trans_id(&self, t: &Derivation) -> Option<TransId> {
        self.trans_ids.get(t).copied()
    }

    pub fn label(&self, t: TransId) -> &Label {
        self.transitions[t.index()].label()
    }

    pub fn source(&self, t: TransId) -> StateId {
        self.source[t.index()]
    }

    pub fn target(&self, t: TransId) -> StateId {
        self.target[t.index()]
    }

    pub fn enabled(&self, s: StateId) -> &[TransId] {
        &self.enabled[s.index()]
    }

    /// Successors of `t` after `u`, memoised. Both must leave the same state.
    pub fn successors(&self, t: TransId, u: TransId) -> Arc<[TransId]> {
        if let Some(hit) = self.succ_memo.lock().unwrap().get(&(t, u)) {
            return hit.clone();
        }
        assert_eq!(
            self.source(t),
            self.source(u),
            "successors of transitions with different sources"
        );
        let set = successors(self.derivation(t), self.derivation(u), &self.decls)
            .expect("explored states have finite enabled sets");
        let ids: Arc<[TransId]> = set
            .iter()
            .map(|v| {
                self.trans_id(v)
                    .expect("successors are enabled in an explored state")
            })
            .collect();
        self.succ_memo.lock().unwrap().insert((t, u), ids.clone());
        ids
    }

    pub fn aconc(&self, t: TransId, u: TransId) -> bool {
        !self.successors(t, u).is_empty()
    }

    pub fn tr_bullet(&self, t: TransId) -> bool {
        !self.aconc(t, t)
    }

    /// One step of the path-extended relation: all successors of any of
    /// `ts` after `u`.
    pub fn step_variants(&self, ts: &BTreeSet<TransId>, u: TransId) -> BTreeSet<TransId> {
        ts.iter()
            .flat_map(|&t| self.successors(t, u).iter().copied().collect::<Vec<_>>())
            .collect()
    }

    pub fn check_path(&self, start: StateId, ts: &[TransId]) -> Result<StateId, LtssError> {
        let mut here = start;
        for (i, &u) in ts.iter().enumerate() {
            if self.source(u) != here {
                return Err(LtssError::InvalidPath(format!(
                    "step {i}: {} does not start at {}",
                    self.derivation(u),
                    self.state(here)
                )));
            }
            here = self.target(u);
        }
        Ok(here)
    }

    /// Checks that the lasso is a path whose cycle returns to where it
    /// starts, and returns that state.
    pub fn check_lasso(&self, lasso: &Lasso) -> Result<StateId, LtssError> {
        if lasso.cycle.is_empty() {
            return Err(LtssError::InvalidPath("empty cycle".into()));
        }
        let anchor = self.check_path(lasso.start, &lasso.prefix)?;
        let end = self.check_path(anchor, &lasso.cycle)?;
        if end != anchor {
            return Err(LtssError::InvalidPath(format!(
                "cycle ends at {} instead of {}",
                self.state(end),
                self.state(anchor)
            )));
        }
        Ok(anchor)
    }

    pub fn successors_along(
        &self,
        t: TransId,
        ts: &[TransId],
    ) -> Result<BTreeSet<TransId>, LtssError> {
        self.check_path(self.source(t), ts)?;
        let mut current = BTreeSet::from([t]);
        for &u in ts {
            if current.is_empty() {
                break;
            }
            current = self.step_variants(&current, u);
        }
        Ok(current)
    }

    /// Every triple `(t, u, v)` with `t ⤳_u v`, in id order.
    pub fn successor_triples(&self) -> Vec<(TransId, TransId, TransId)> {
        let mut out = Vec::new();
        for s in self.states() {
            for &t in self.enabled(s) {
                for &u in self.enabled(s) {
                    for &v in self.successors(t, u).iter() {
                        out.push((t, u, v));
                    }
                }
            }
        }
        out
    }

    /// Line-oriented dump: states, transitions with their names, and the
    /// successor relation.
    pub fn to_structured(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "states {}", self.num_states());
        for s in self.states() {
            let root = if self.roots.contains(&s) { " root" } else { "" };
            let _ = writeln!(out, "state {} {}{}", s.0, self.state(s), root);
        }
        let _ = writeln!(out, "transitions {}", self.num_transitions());
        for t in self.transitions() {
            let _ = writeln!(
                out,
                "transition {} {} -> {} label {} name {}",
                t.0,
                self.source(t).0,
                self.target(t).0,
                self.label(t),
                self.derivation(t)
            );
        }
        let triples = self.successor_triples();
        let _ = writeln!(out, "successors {}", triples.len());
        for (t, u, v) in triples {
            let _ = writeln!(out, "successor {} {} {}", t.0, u.0, v.0);
        }
        out
    }

    /// Graphviz digraph of states and labelled transitions.
    pub fn to_dot(&self) -> String {
        let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut out = String::from("digraph ltss {\n");
        for s in self.states() {
            let shape = if self.roots.contains(&s) {
                ", shape=doublecircle"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  s{} [label=\"{}\"{}];",
                s.0,
                esc(&self.state(s).to_string()),
                shape
            );
        }
        for t in self.transitions() {
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"];",
                self.source(t).0,
                self.target(t).0,
                esc(&self.label(t).to_string())
            );
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Name};

    const ENCODINGS: &str = "handshake x, y;
        L := y.L + x.L2;
        L2 := y.L2;
        R := Yl | x.0;
        Yl := y.Yl;";

    fn graph(src: &str, term: &str) -> LtssGraph {
        let doc = parse(src).unwrap();
        let p = doc.state(term).unwrap();
        explore(&p, Arc::new(doc.decls), 1000).unwrap()
    }

    fn find(g: &LtssGraph, s: StateId, name: &str) -> TransId {
        *g.enabled(s)
            .iter()
            .find(|&&t| g.derivation(t).to_string() == name)
            .unwrap_or_else(|| {
                panic!(
                    "no {name} in {:?}",
                    g.enabled(s)
                        .iter()
                        .map(|&t| g.derivation(t).to_string())
                        .collect::<Vec<_>>()
                )
            })
    }

    #[test]
    fn two_component_program() {
        let g = graph(ENCODINGS, "R");
        assert_eq!(g.num_states(), 2);
        let r = g.root();
        let t = find(&g, r, "Yl:(<y->Yl>) | x.0");
        let u = find(&g, r, "Yl | <x->0>");
        let tu: Vec<_> = g
            .successors(t, u)
            .iter()
            .map(|&v| g.derivation(v).to_string())
            .collect();
        assert_eq!(tu, ["Yl:(<y->Yl>) | 0"]);
        let ut: Vec<_> = g
            .successors(u, t)
            .iter()
            .map(|&v| g.derivation(v).to_string())
            .collect();
        assert_eq!(ut, ["Yl | <x->0>"]);
        assert!(!g.tr_bullet(u) || g.successors(u, u).is_empty());
        assert!(g.tr_bullet(u));
        // the x-step survives any number of y-steps
        let mut path = Vec::new();
        for _ in 0..5 {
            path.push(t);
            assert_eq!(g.successors_along(u, &path).unwrap().len(), 1);
        }
    }

    #[test]
    fn one_component_program() {
        let g = graph(ENCODINGS, "L");
        assert_eq!(g.num_states(), 2);
        let r = g.root();
        let en = g.enabled(r);
        assert_eq!(en.len(), 2);
        for &a in en {
            for &b in en {
                assert!(g.successors(a, b).is_empty());
            }
        }
        let y = en
            .iter()
            .copied()
            .find(|&t| g.label(t).to_string() == "y")
            .unwrap();
        let x = en
            .iter()
            .copied()
            .find(|&t| g.label(t).to_string() == "x")
            .unwrap();
        assert!(g.successors_along(x, &[y]).unwrap().is_empty());
        assert_eq!(g.successors_along(x, &[]).unwrap(), BTreeSet::from([x]));
    }

    #[test]
    fn discard_then_receive_has_two_successors() {
        let src = "handshake a, c, d; broadcast b;
            P1 := c.0; P2 := d.0;
            P := a.(b?.P1 + b?.P2) | b!.0;";
        let doc = parse(src).unwrap();
        let p = doc.term("P").unwrap().clone();
        let en = enabled(&p, &doc.decls).unwrap();
        let name = |t: &Derivation| t.to_string();
        let t = en
            .iter()
            .find(|t| name(t) == "b:a.(b?.P1 + b?.P2) | <b!->0>")
            .unwrap();
        let w = en
            .iter()
            .find(|t| name(t) == "<a->(b?.P1 + b?.P2)> | b!.0")
            .unwrap();
        let s = successors(t, w, &doc.decls).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|v| *v.label() == Label::Send(Name::new("b"))));
    }

    #[test]
    fn passive_transitions_do_not_interfere() {
        let src = "handshake a; broadcast b; signal s; P := a.0 ^ s | s.0;";
        let g = graph(src, "P");
        for s in g.states() {
            for &u in g.enabled(s) {
                if g.label(u).is_passive() {
                    for &t in g.enabled(s) {
                        assert_eq!(&*g.successors(t, u), &[t]);
                    }
                }
            }
        }
    }

    #[test]
    fn self_successors() {
        let src = "handshake a; broadcast b; signal s; P := a.0 ^ s; Q := b?.0;";
        let doc = parse(src).unwrap();
        let p = doc.term("P").unwrap();
        let en = enabled(p, &doc.decls).unwrap();
        assert!(!tr_bullet(&en[0], &doc.decls).unwrap());
        let q = doc.term("Q").unwrap();
        let en = enabled(q, &doc.decls).unwrap();
        assert!(!tr_bullet(&en[0], &doc.decls).unwrap());
        let a = Derivation::new(DerivationKind::Act(
            Label::Hand(Name::new("a")),
            Process::nil(),
        ));
        assert!(tr_bullet(&a, &doc.decls).unwrap());
    }

    #[test]
    fn source_mismatch() {
        let doc = parse("handshake a, c;").unwrap();
        let a = Derivation::new(DerivationKind::Act(
            Label::Hand(Name::new("a")),
            Process::nil(),
        ));
        let c = Derivation::new(DerivationKind::Act(
            Label::Hand(Name::new("c")),
            Process::nil(),
        ));
        assert!(matches!(
            successors(&a, &c, &doc.decls),
            Err(LtssError::SourceMismatch(..))
        ));
    }

    #[test]
    fn exploration_limits() {
        let g = graph("handshake a; broadcast b; A := a.A;", "A");
        assert_eq!(g.num_states(), 1);
        assert_eq!(g.num_transitions(), 2);
        let doc = parse("handshake a; C := a.(C | C);").unwrap();
        let e = explore(&doc.state("C").unwrap(), Arc::new(doc.decls), 50).unwrap_err();
        assert_eq!(e, LtssError::LimitExceeded(50));
    }

    #[test]
    fn exports_are_deterministic() {
        let a = graph(ENCODINGS, "R");
        let b = graph(ENCODINGS, "R");
        assert_eq!(a.to_structured(), b.to_structured());
        assert_eq!(a.to_dot(), b.to_dot());
        assert!(a.to_dot().starts_with("digraph"));
    }
}
