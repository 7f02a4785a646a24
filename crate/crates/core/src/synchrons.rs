//! Synchrons: a transition seen as the set of paths from the root of its
//! proof tree to the prefixes, nil processes and signalling operators that
//! take part in it.
//!
//! Concurrency and successors can be phrased purely in terms of synchrons.
//! That formulation shares no code with [`crate::ltss`] and serves as a
//! cross-check for it.

use std::collections::BTreeSet;
use std::fmt::{self, Display, Formatter, Write};

use crate::ltss::LtssError;
use crate::sos::{enabled, validate, Derivation, DerivationKind, SosError};
use crate::syntax::{Declarations, Label, Name, Process, Relabelling, Term};

/// One step of a synchron path.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Arg {
    SumL,
    SumR,
    ParL,
    ParR,
    Res(BTreeSet<Name>),
    Rel(Relabelling),
    Rec(Name),
    Sig(Name),
}

impl Arg {
    /// `+L`, `+R`, `A:` and `^r` disappear once the synchron's transition
    /// has fired; the others survive.
    pub fn is_dynamic(&self) -> bool {
        matches!(self, Arg::SumL | Arg::SumR | Arg::Rec(_) | Arg::Sig(_))
    }
}

impl Display for Arg {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Arg::SumL => f.write_str("+L"),
            Arg::SumR => f.write_str("+R"),
            Arg::ParL => f.write_str("|L"),
            Arg::ParR => f.write_str("|R"),
            Arg::Res(set) => {
                f.write_str("\\{")?;
                for (i, n) in set.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_char('}')
            }
            Arg::Rel(rel) => write!(f, "{rel}"),
            Arg::Rec(a) => write!(f, "{a}:"),
            Arg::Sig(r) => write!(f, "^{r}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Tip {
    /// `(a->P)`
    Act(Label, Process),
    /// `(b:)`
    Dis(Name),
    /// `(P<^s)`
    Sig(Process, Name),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Synchron {
    pub path: Vec<Arg>,
    pub tip: Tip,
}

impl Display for Synchron {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for a in &self.path {
            write!(f, "{a}")?;
        }
        match &self.tip {
            Tip::Act(a, p) => write!(f, "({a}->{p})"),
            Tip::Dis(b) => write!(f, "({b}:)"),
            Tip::Sig(p, s) => write!(f, "({p}<^{s})"),
        }
    }
}

impl Synchron {
    pub fn tip(tip: Tip) -> Self {
        Synchron {
            path: Vec::new(),
            tip,
        }
    }

    fn prepend(mut self, arg: Arg) -> Self {
        self.path.insert(0, arg);
        self
    }

    pub fn label(&self) -> Label {
        match &self.tip {
            Tip::Act(a, _) => a.clone(),
            Tip::Dis(b) => Label::Discard(b.clone()),
            Tip::Sig(_, s) => Label::Emit(s.clone()),
        }
    }

    pub fn is_active(&self) -> bool {
        matches!(self.tip, Tip::Act(..))
    }

    /// Receives and discards are only potential participation in a
    /// broadcast; every other synchron is needed for its transition.
    pub fn is_necessary(&self) -> bool {
        !matches!(self.tip, Tip::Act(Label::Receive(_), _) | Tip::Dis(_))
    }

    fn common_prefix_len(&self, other: &Synchron) -> usize {
        self.path
            .iter()
            .zip(&other.path)
            .take_while(|(a, b)| a == b)
            .count()
    }
}

fn prefixed(arg: Arg, set: BTreeSet<Synchron>) -> impl Iterator<Item = Synchron> {
    set.into_iter().map(move |s| s.prepend(arg.clone()))
}

/// `ς(P)`.
pub fn synchrons_of_process(
    p: &Process,
    decls: &Declarations,
) -> Result<BTreeSet<Synchron>, SosError> {
    of_process(p, decls, &mut Vec::new())
}

fn of_process(
    p: &Process,
    decls: &Declarations,
    unfolding: &mut Vec<Name>,
) -> Result<BTreeSet<Synchron>, SosError> {
    let mut out = BTreeSet::new();
    match p.term() {
        Term::Nil => {
            out.extend(
                decls
                    .broadcast
                    .iter()
                    .map(|b| Synchron::tip(Tip::Dis(b.clone()))),
            );
        }
        Term::Prefix(a, q) => {
            out.insert(Synchron::tip(Tip::Act(a.clone(), q.clone())));
            for b in &decls.broadcast {
                if *a != Label::Receive(b.clone()) {
                    out.insert(Synchron::tip(Tip::Dis(b.clone())));
                }
            }
        }
        Term::Choice(l, r) => {
            out.extend(prefixed(Arg::SumL, of_process(l, decls, unfolding)?));
            out.extend(prefixed(Arg::SumR, of_process(r, decls, unfolding)?));
        }
        Term::Par(l, r) => {
            out.extend(prefixed(Arg::ParL, of_process(l, decls, unfolding)?));
            out.extend(prefixed(Arg::ParR, of_process(r, decls, unfolding)?));
        }
        Term::Restrict(q, set) => out.extend(prefixed(
            Arg::Res(set.clone()),
            of_process(q, decls, unfolding)?,
        )),
        Term::Relabel(q, f) => out.extend(prefixed(
            Arg::Rel(f.clone()),
            of_process(q, decls, unfolding)?,
        )),
        Term::Agent(a) => {
            if unfolding.contains(a) {
                return Err(SosError::UnguardedRecursion(a.clone()));
            }
            let body = decls
                .body(a)
                .ok_or_else(|| SosError::UnknownAgent(a.clone()))?;
            unfolding.push(a.clone());
            let inner = of_process(body, decls, unfolding);
            unfolding.pop();
            out.extend(prefixed(Arg::Rec(a.clone()), inner?));
        }
        Term::Signal(q, s) => {
            out.insert(Synchron::tip(Tip::Sig(q.clone(), s.clone())));
            out.extend(prefixed(
                Arg::Sig(s.clone()),
                of_process(q, decls, unfolding)?,
            ));
        }
    }
    Ok(out)
}

/// `ς(t)`.
pub fn synchrons_of_transition(t: &Derivation) -> BTreeSet<Synchron> {
    use DerivationKind::*;
    match t.kind() {
        Act(a, p) => BTreeSet::from([Synchron::tip(Tip::Act(a.clone(), p.clone()))]),
        DisNil(b) | DisAct(b, _, _) => BTreeSet::from([Synchron::tip(Tip::Dis(b.clone()))]),
        SigEmit(p, s) => BTreeSet::from([Synchron::tip(Tip::Sig(p.clone(), s.clone()))]),
        SumL(t, _) => prefixed(Arg::SumL, synchrons_of_transition(t)).collect(),
        SumR(_, u) => prefixed(Arg::SumR, synchrons_of_transition(u)).collect(),
        SumBoth(t, u) => prefixed(Arg::SumL, synchrons_of_transition(t))
            .chain(prefixed(Arg::SumR, synchrons_of_transition(u)))
            .collect(),
        ParL(t, _) => prefixed(Arg::ParL, synchrons_of_transition(t)).collect(),
        ParR(_, u) => prefixed(Arg::ParR, synchrons_of_transition(u)).collect(),
        ParBoth(t, u) => prefixed(Arg::ParL, synchrons_of_transition(t))
            .chain(prefixed(Arg::ParR, synchrons_of_transition(u)))
            .collect(),
        Res(t, set) => prefixed(Arg::Res(set.clone()), synchrons_of_transition(t)).collect(),
        Rel(t, f) => prefixed(Arg::Rel(f.clone()), synchrons_of_transition(t)).collect(),
        Rec(a, t) => prefixed(Arg::Rec(a.clone()), synchrons_of_transition(t)).collect(),
        SigCtx(t, r) => prefixed(Arg::Sig(r.clone()), synchrons_of_transition(t)).collect(),
    }
}

/// Direct concurrency: the paths first differ at the two sides of one
/// parallel composition.
pub fn sconc_d(s: &Synchron, u: &Synchron) -> bool {
    let k = s.common_prefix_len(u);
    matches!(
        (s.path.get(k), u.path.get(k)),
        (Some(Arg::ParL), Some(Arg::ParR)) | (Some(Arg::ParR), Some(Arg::ParL))
    )
}

/// `ς` is concurrent with every active synchron of `w`.
pub fn saconc_d(s: &Synchron, w: &Derivation) -> bool {
    synchrons_of_transition(w)
        .iter()
        .filter(|u| u.is_active())
        .all(|u| sconc_d(s, u))
}

/// Every necessary synchron of `t` is unaffected by `u`.
pub fn ssaconc(t: &Derivation, u: &Derivation) -> Result<bool, LtssError> {
    if t.source() != u.source() {
        return Err(LtssError::SourceMismatch(t.clone(), u.clone()));
    }
    Ok(ssaconc_unchecked(t, u))
}

fn ssaconc_unchecked(t: &Derivation, u: &Derivation) -> bool {
    let active: Vec<Synchron> = synchrons_of_transition(u)
        .into_iter()
        .filter(|s| s.is_active())
        .collect();
    synchrons_of_transition(t)
        .iter()
        .filter(|s| s.is_necessary())
        .all(|s| active.iter().all(|a| sconc_d(s, a)))
}

pub fn static_strip(path: &[Arg]) -> Vec<Arg> {
    path.iter().filter(|a| !a.is_dynamic()).cloned().collect()
}

/// `ς@υ` for directly concurrent synchrons.
pub fn after_synchron(s: &Synchron, u: &Synchron) -> Option<Synchron> {
    if !sconc_d(s, u) {
        return None;
    }
    let k = s.common_prefix_len(u);
    let mut path = static_strip(&s.path[..k]);
    path.extend_from_slice(&s.path[k..]);
    Some(Synchron {
        path,
        tip: s.tip.clone(),
    })
}

/// `ς@w`: what becomes of an unaffected synchron once `w` has fired.
/// `None` when `ς` is affected by `w`.
pub fn after(s: &Synchron, w: &Derivation) -> Option<Synchron> {
    if w.label().is_passive() {
        return Some(s.clone());
    }
    let active: Vec<Synchron> = synchrons_of_transition(w)
        .into_iter()
        .filter(|u| u.is_active())
        .collect();
    assert!(
        !active.is_empty(),
        "action transition {w} without active synchrons"
    );
    if !active.iter().all(|u| sconc_d(s, u)) {
        return None;
    }
    // ties keep the first candidate in synchron order
    let mut closest = &active[0];
    for u in &active[1..] {
        if s.common_prefix_len(u) > s.common_prefix_len(closest) {
            closest = u;
        }
    }
    after_synchron(s, closest)
}

/// `Σ@w`, dropping the synchrons affected by `w`.
pub fn after_set(set: &BTreeSet<Synchron>, w: &Derivation) -> BTreeSet<Synchron> {
    set.iter().filter_map(|s| after(s, w)).collect()
}

/// Synchrons uncovered by firing the active synchrons of `w`.
pub fn new_synchrons(w: &Derivation, decls: &Declarations) -> Result<BTreeSet<Synchron>, SosError> {
    let mut out = BTreeSet::new();
    for u in synchrons_of_transition(w) {
        if let Tip::Act(_, p) = &u.tip {
            let base = static_strip(&u.path);
            for s in synchrons_of_process(p, decls)? {
                let mut path = base.clone();
                path.extend(s.path);
                out.insert(Synchron { path, tip: s.tip });
            }
        }
    }
    Ok(out)
}

fn is_simple_label(l: &Label) -> bool {
    matches!(
        l,
        Label::Hand(_) | Label::CoHand(_) | Label::Tau | Label::Read(_) | Label::Emit(_)
    )
}

fn is_complementable(l: &Label) -> bool {
    matches!(
        l,
        Label::Hand(_) | Label::CoHand(_) | Label::Read(_) | Label::Emit(_)
    )
}

impl Synchron {
    /// The label as seen at depth `k` of the path: the tip's label passed
    /// outwards through the relabellings at positions `k..`, or `None` if a
    /// restriction there blocks it.
    pub fn label_at(&self, k: usize) -> Option<Label> {
        let mut l = self.label();
        for arg in self.path.get(k..).unwrap_or_default().iter().rev() {
            match arg {
                Arg::Rel(f) => l = l.relabel(f),
                Arg::Res(set) if l.restricted_by(set) => return None,
                _ => {}
            }
        }
        Some(l)
    }

    /// Labels of `self` and `other` just below the point where their paths
    /// part.
    fn labels_where_parted(&self, other: &Synchron) -> (Option<Label>, Option<Label>) {
        let k = self.common_prefix_len(other) + 1;
        (self.label_at(k), other.label_at(k))
    }
}

fn same_broadcast_where_parted(s: &Synchron, u: &Synchron) -> bool {
    match s.labels_where_parted(u) {
        (Some(l1), Some(l2)) => {
            l1.broadcast_name().is_some() && l1.broadcast_name() == l2.broadcast_name()
        }
        _ => false,
    }
}

/// Decides whether `sigma` is exactly the synchron set of some transition
/// of a process whose synchrons are `of_p`.
///
/// Labels are compared where they meet: a single synchron by its label at
/// the root, two synchronising ones just below the parallel composition
/// where their paths part. This makes restrictions and relabellings on the
/// path count.
pub fn p_complete(
    sigma: &BTreeSet<Synchron>,
    of_p: &BTreeSet<Synchron>,
    decls: &Declarations,
) -> bool {
    if !sigma.is_subset(of_p) {
        return false;
    }
    let members: Vec<&Synchron> = sigma.iter().collect();
    if let [s] = members[..] {
        if s.label_at(0).is_some_and(|l| is_simple_label(&l)) {
            return true;
        }
    }
    if let [s, u] = members[..] {
        if sconc_d(s, u) {
            if let (Some(ls), Some(lu)) = s.labels_where_parted(u) {
                if is_complementable(&ls) && ls.complement().ok() == Some(lu) {
                    return true;
                }
            }
        }
    }
    let candidates: Vec<Name> = match members.first() {
        Some(s) => s
            .label_at(0)
            .and_then(|l| l.broadcast_name().cloned())
            .into_iter()
            .collect(),
        None => decls.broadcast.iter().cloned().collect(),
    };
    candidates
        .iter()
        .any(|b| broadcast_complete(&members, of_p, b))
}

fn broadcast_complete(sigma: &[&Synchron], of_p: &BTreeSet<Synchron>, b: &Name) -> bool {
    let send = Label::Send(b.clone());
    let recv = Label::Receive(b.clone());
    let dis = Label::Discard(b.clone());
    let labels: Vec<Label> = match sigma
        .iter()
        .map(|s| s.label_at(0))
        .collect::<Option<Vec<_>>>()
    {
        Some(ls) => ls,
        None => return false,
    };
    if !labels.iter().all(|l| *l == send || *l == recv || *l == dis) {
        return false;
    }
    if labels.iter().filter(|l| **l == send).count() > 1 {
        return false;
    }
    for (i, s) in sigma.iter().enumerate() {
        for (j, u) in sigma.iter().enumerate() {
            if i == j {
                continue;
            }
            if !same_broadcast_where_parted(s, u) {
                return false;
            }
            if (labels[i] != dis || labels[j] != dis) && !sconc_d(s, u) {
                return false;
            }
        }
    }
    let active: Vec<&Synchron> = sigma.iter().copied().filter(|s| s.is_active()).collect();
    for s in of_p {
        if sigma.contains(&s) {
            continue;
        }
        let Some(l) = s.label_at(0) else { continue };
        if !(l == recv || l == dis) || !sigma.iter().all(|u| same_broadcast_where_parted(s, u)) {
            continue;
        }
        if active.iter().all(|u| sconc_d(s, u)) {
            return false;
        }
    }
    true
}

/// Rebuilds the transition of `p` whose synchron set is `sigma`.
pub fn retrieve(
    p: &Process,
    sigma: &BTreeSet<Synchron>,
    decls: &Declarations,
) -> Option<Derivation> {
    let t = retrieve_in(p, sigma, decls)?;
    validate(&t, decls).then_some(t)
}

fn split_first(sigma: &BTreeSet<Synchron>) -> Option<Vec<(Arg, Synchron)>> {
    sigma
        .iter()
        .map(|s| {
            let (first, rest) = s.path.split_first()?;
            Some((
                first.clone(),
                Synchron {
                    path: rest.to_vec(),
                    tip: s.tip.clone(),
                },
            ))
        })
        .collect()
}

fn retrieve_in(
    p: &Process,
    sigma: &BTreeSet<Synchron>,
    decls: &Declarations,
) -> Option<Derivation> {
    use DerivationKind as K;
    let d = Derivation::new;
    let single_tip = || -> Option<&Tip> {
        match sigma.iter().collect::<Vec<_>>()[..] {
            [s] if s.path.is_empty() => Some(&s.tip),
            _ => None,
        }
    };
    match p.term() {
        Term::Nil => match single_tip()? {
            Tip::Dis(b) => Some(d(K::DisNil(b.clone()))),
            _ => None,
        },
        Term::Prefix(a, q) => match single_tip()? {
            Tip::Act(a2, q2) if a == a2 && q == q2 => Some(d(K::Act(a.clone(), q.clone()))),
            Tip::Dis(b) => Some(d(K::DisAct(b.clone(), a.clone(), q.clone()))),
            _ => None,
        },
        Term::Choice(l, r) | Term::Par(l, r) => {
            let (left_arg, right_arg) = if matches!(p.term(), Term::Choice(..)) {
                (Arg::SumL, Arg::SumR)
            } else {
                (Arg::ParL, Arg::ParR)
            };
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            for (arg, rest) in split_first(sigma)? {
                if arg == left_arg {
                    left.insert(rest);
                } else if arg == right_arg {
                    right.insert(rest);
                } else {
                    return None;
                }
            }
            let is_choice = left_arg == Arg::SumL;
            match (left.is_empty(), right.is_empty()) {
                (true, true) => None,
                (false, true) => {
                    let t = retrieve_in(l, &left, decls)?;
                    Some(d(if is_choice {
                        K::SumL(t, r.clone())
                    } else {
                        K::ParL(t, r.clone())
                    }))
                }
                (true, false) => {
                    let u = retrieve_in(r, &right, decls)?;
                    Some(d(if is_choice {
                        K::SumR(l.clone(), u)
                    } else {
                        K::ParR(l.clone(), u)
                    }))
                }
                (false, false) => {
                    let t = retrieve_in(l, &left, decls)?;
                    let u = retrieve_in(r, &right, decls)?;
                    Some(d(if is_choice {
                        K::SumBoth(t, u)
                    } else {
                        K::ParBoth(t, u)
                    }))
                }
            }
        }
        Term::Restrict(q, set) => {
            let inner = unwrap_all(sigma, &Arg::Res(set.clone()))?;
            Some(d(K::Res(retrieve_in(q, &inner, decls)?, set.clone())))
        }
        Term::Relabel(q, f) => {
            let inner = unwrap_all(sigma, &Arg::Rel(f.clone()))?;
            Some(d(K::Rel(retrieve_in(q, &inner, decls)?, f.clone())))
        }
        Term::Agent(a) => {
            let inner = unwrap_all(sigma, &Arg::Rec(a.clone()))?;
            Some(d(K::Rec(
                a.clone(),
                retrieve_in(decls.body(a)?, &inner, decls)?,
            )))
        }
        Term::Signal(q, s) => {
            if let Some(Tip::Sig(q2, s2)) = single_tip() {
                return (q == q2 && s == s2).then(|| d(K::SigEmit(q.clone(), s.clone())));
            }
            let inner = unwrap_all(sigma, &Arg::Sig(s.clone()))?;
            Some(d(K::SigCtx(retrieve_in(q, &inner, decls)?, s.clone())))
        }
    }
}

fn unwrap_all(sigma: &BTreeSet<Synchron>, expected: &Arg) -> Option<BTreeSet<Synchron>> {
    let parts = split_first(sigma)?;
    if parts.is_empty() || parts.iter().any(|(a, _)| a != expected) {
        return None;
    }
    Some(parts.into_iter().map(|(_, s)| s).collect())
}

/// Possible successors of `t` after `w`, characterised by synchrons.
pub fn ssleadsto(
    t: &Derivation,
    w: &Derivation,
    decls: &Declarations,
) -> Result<BTreeSet<Derivation>, LtssError> {
    if t.source() != w.source() {
        return Err(LtssError::SourceMismatch(t.clone(), w.clone()));
    }
    let mut out = BTreeSet::new();
    if !ssaconc_unchecked(t, w) {
        return Ok(out);
    }
    let required = after_set(&synchrons_of_transition(t), w);
    let lt = t.label();
    for t2 in enabled(&w.target(), decls)? {
        let l2 = t2.label();
        let labels_fit = lt == l2
            || lt.broadcast_name().is_some_and(|b| {
                let pair = [Label::Receive(b.clone()), Label::Discard(b.clone())];
                pair.contains(lt) && pair.contains(l2) && lt != l2
            });
        if labels_fit && required.is_subset(&synchrons_of_transition(&t2)) {
            out.insert(t2);
        }
    }
    Ok(out)
}

/// `ς ⤳ ς'` between synchrons.
pub fn sleadsto(s: &Synchron, s2: &Synchron) -> bool {
    if s == s2 {
        return true;
    }
    if s.tip != s2.tip {
        return false;
    }
    s.path.iter().enumerate().any(|(k, a)| {
        matches!(a, Arg::ParL | Arg::ParR) && {
            let mut path = static_strip(&s.path[..k]);
            path.extend_from_slice(&s.path[k..]);
            path == s2.path
        }
    })
}

/// Outcome of comparing the synchrons of a target state with those
/// predicted from the source and the transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSynchrons {
    pub of_target: BTreeSet<Synchron>,
    pub inherited: BTreeSet<Synchron>,
    pub new: BTreeSet<Synchron>,
}

impl TargetSynchrons {
    pub fn holds(&self) -> bool {
        self.inherited.is_disjoint(&self.new)
            && self.of_target.len() == self.inherited.len() + self.new.len()
            && self
                .inherited
                .union(&self.new)
                .all(|s| self.of_target.contains(s))
    }
}

/// Evaluates both sides of `ς(target(w)) = ς(source(w))@w ⊎ new(w)`.
pub fn target_synchrons(w: &Derivation, decls: &Declarations) -> Result<TargetSynchrons, SosError> {
    let of_source = synchrons_of_process(&w.source(), decls)?;
    Ok(TargetSynchrons {
        of_target: synchrons_of_process(&w.target(), decls)?,
        inherited: after_set(&of_source, w),
        new: new_synchrons(w, decls)?,
    })
}

pub fn check_target_synchrons(w: &Derivation, decls: &Declarations) -> Result<bool, SosError> {
    Ok(target_synchrons(w, decls)?.holds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn doc(src: &str) -> crate::syntax::Document {
        parse(src).unwrap()
    }

    fn show(set: &BTreeSet<Synchron>) -> Vec<String> {
        set.iter().map(|s| s.to_string()).collect()
    }

    fn by_name(en: &[Derivation], name: &str) -> Derivation {
        en.iter()
            .find(|t| t.to_string() == name)
            .unwrap_or_else(|| panic!("{name} not among {en:?}"))
            .clone()
    }

    #[test]
    fn nil_synchrons() {
        let d = doc("broadcast b;");
        assert_eq!(
            show(&synchrons_of_process(&Process::nil(), &d.decls).unwrap()),
            ["(b:)"]
        );
    }

    #[test]
    fn choice_of_parallel_synchrons() {
        let d = doc("handshake a, c, d; P := (a.0 | d.0) + c.0;");
        let s = synchrons_of_process(d.term("P").unwrap(), &d.decls).unwrap();
        let mut got = show(&s);
        got.sort();
        assert_eq!(got, ["+L|L(a->0)", "+L|R(d->0)", "+R(c->0)"]);
    }

    #[test]
    fn signalling_example() {
        let d = doc("broadcast b; signal s; P := (b!.0)^s | (s.0 + b?.0);");
        let p = d.term("P").unwrap();
        let en = enabled(p, &d.decls).unwrap();
        let t = by_name(&en, "<b!->0> ^ s | (s.0 + <b?->0>)");
        let u = by_name(&en, "b!.0<^s | (<s->0> + b?.0)");
        let mut st = show(&synchrons_of_transition(&t));
        st.sort();
        assert_eq!(st, ["|L^s(b!->0)", "|R+R(b?->0)"]);
        assert!(ssaconc(&t, &u).unwrap());
        assert!(!ssaconc(&u, &t).unwrap());
        let sp = synchrons_of_process(p, &d.decls).unwrap();
        assert!(sp.contains(&Synchron {
            path: vec![Arg::ParL],
            tip: Tip::Sig(
                Process::prefix(Label::Send(Name::new("b")), Process::nil()),
                Name::new("s")
            ),
        }));
    }

    #[test]
    fn after_strips_dynamic_arguments() {
        let d = doc("handshake a, c, d; P := (a.0 | d.0) + c.0;");
        let p = d.term("P").unwrap();
        let en = enabled(p, &d.decls).unwrap();
        let w = by_name(&en, "<a->0> | d.0 + c.0");
        let s = synchrons_of_process(p, &d.decls)
            .unwrap()
            .into_iter()
            .find(|s| s.to_string() == "+L|R(d->0)")
            .unwrap();
        assert!(saconc_d(&s, &w));
        assert_eq!(after(&s, &w).unwrap().to_string(), "|R(d->0)");
        assert!(sleadsto(&s, &after(&s, &w).unwrap()));
        assert!(check_target_synchrons(&w, &d.decls).unwrap());
    }

    #[test]
    fn new_synchrons_of_a_prefix() {
        let d = doc("handshake a, c, d; P := a.(c.0 | d.0);");
        let p = d.term("P").unwrap();
        let w = enabled(p, &d.decls).unwrap()[0].clone();
        assert_eq!(w.to_string(), "<a->(c.0 | d.0)>");
        assert_eq!(
            show(&new_synchrons(&w, &d.decls).unwrap()),
            ["|L(c->0)", "|R(d->0)"]
        );
        assert!(after_set(&synchrons_of_process(p, &d.decls).unwrap(), &w).is_empty());
    }

    #[test]
    fn static_strip_examples() {
        assert_eq!(static_strip(&[Arg::SumL, Arg::ParR]), [Arg::ParR]);
        assert_eq!(static_strip(&[]), []);
        let l = Arg::Res(BTreeSet::from([Name::new("a")]));
        assert_eq!(
            static_strip(&[Arg::ParL, Arg::Rec(Name::new("A")), l.clone()]),
            [Arg::ParL, l]
        );
    }

    #[test]
    fn sleadsto_examples() {
        let tip = Tip::Act(Label::Hand(Name::new("d")), Process::nil());
        let s = Synchron {
            path: vec![Arg::SumL, Arg::ParR],
            tip: tip.clone(),
        };
        let s2 = Synchron {
            path: vec![Arg::ParR],
            tip: tip.clone(),
        };
        assert!(sleadsto(&s, &s));
        assert!(sleadsto(&s, &s2));
        let l = Synchron {
            path: vec![Arg::ParL],
            tip: tip.clone(),
        };
        assert!(!sleadsto(&l, &s2));
        assert!(!sconc_d(&s, &s));
    }

    #[test]
    fn complete_sets() {
        let d = doc("handshake a; broadcast b; P := a.0 | 'a.0;");
        let p = d.term("P").unwrap();
        let sp = synchrons_of_process(p, &d.decls).unwrap();
        let pair: BTreeSet<Synchron> = sp.iter().filter(|s| s.is_active()).cloned().collect();
        assert_eq!(pair.len(), 2);
        assert!(p_complete(&pair, &sp, &d.decls));
        assert!(!p_complete(&BTreeSet::new(), &sp, &d.decls));
        for t in enabled(p, &d.decls).unwrap() {
            let s = synchrons_of_transition(&t);
            assert!(p_complete(&s, &sp, &d.decls), "{t}");
            assert_eq!(retrieve(p, &s, &d.decls), Some(t));
        }
    }

    #[test]
    fn restriction_counts_for_completeness() {
        let d = doc("handshake a, d; P := ('d.0)\\{d} | a.0; Q := ('d.0)[d->a] | a.0;");
        let p = d.term("P").unwrap();
        let sp = synchrons_of_process(p, &d.decls).unwrap();
        let blocked: BTreeSet<Synchron> = sp
            .iter()
            .filter(|s| s.to_string().contains("'d"))
            .cloned()
            .collect();
        assert_eq!(blocked.len(), 1);
        assert!(!p_complete(&blocked, &sp, &d.decls));
        assert_eq!(enabled(p, &d.decls).unwrap().len(), 1);

        let q = d.term("Q").unwrap();
        let sq = synchrons_of_process(q, &d.decls).unwrap();
        let active: BTreeSet<Synchron> = sq.iter().filter(|s| s.is_active()).cloned().collect();
        assert_eq!(active.len(), 2);
        assert!(p_complete(&active, &sq, &d.decls));
        assert!(retrieve(q, &active, &d.decls).is_some_and(|t| t.label() == &Label::Tau));
    }

    #[test]
    fn retrieve_base_cases() {
        let d = doc("handshake a; broadcast b;");
        let p = Process::prefix(Label::Hand(Name::new("a")), Process::nil());
        let act = Synchron::tip(Tip::Act(Label::Hand(Name::new("a")), Process::nil()));
        assert_eq!(
            retrieve(&p, &BTreeSet::from([act]), &d.decls)
                .unwrap()
                .to_string(),
            "<a->0>"
        );
        let dis = Synchron::tip(Tip::Dis(Name::new("b")));
        assert_eq!(
            retrieve(&Process::nil(), &BTreeSet::from([dis]), &d.decls)
                .unwrap()
                .to_string(),
            "b:0"
        );
    }

    #[test]
    fn discard_then_receive_candidates() {
        let d = doc(
            "handshake a, c, e; broadcast b; P1 := c.0; P2 := e.0; P := a.(b?.P1 + b?.P2) | b!.0;",
        );
        let p = d.term("P").unwrap();
        let en = enabled(p, &d.decls).unwrap();
        let t = by_name(&en, "b:a.(b?.P1 + b?.P2) | <b!->0>");
        let w = by_name(&en, "<a->(b?.P1 + b?.P2)> | b!.0");
        assert!(ssaconc(&t, &w).unwrap());
        assert_eq!(ssleadsto(&t, &w, &d.decls).unwrap().len(), 2);
    }
}
