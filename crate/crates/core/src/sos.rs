//! Structural operational semantics. Transitions are derivations of
//! transition triples, identified by their names.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::fmt::{self, Display, Formatter, Write};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::printer::{write_name_set, ATOM, CHOICE, PAR, POSTFIX, PREFIX};
use crate::syntax::{Declarations, Label, Name, Process, Relabelling, Term};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DerivationKind {
    /// `<a->P>`
    Act(Label, Process),
    /// `t + Q`
    SumL(Derivation, Process),
    /// `P + t`
    SumR(Process, Derivation),
    /// `t + u`, both sides discarding
    SumBoth(Derivation, Derivation),
    /// `t | Q`
    ParL(Derivation, Process),
    /// `P | t`
    ParR(Process, Derivation),
    /// `t | u`, a handshake, signal read or broadcast synchronisation
    ParBoth(Derivation, Derivation),
    Res(Derivation, BTreeSet<Name>),
    Rel(Derivation, Relabelling),
    /// `A:t`
    Rec(Name, Derivation),
    /// `b:0`
    DisNil(Name),
    /// `b:a.P`
    DisAct(Name, Label, Process),
    /// `P<^s`
    SigEmit(Process, Name),
    /// `t ^ r`
    SigCtx(Derivation, Name),
}

struct Node {
    kind: DerivationKind,
    label: Option<Label>,
    hash: u64,
}

/// A derivation name. Cheap to clone; equality and ordering are structural.
#[derive(Clone)]
pub struct Derivation(Arc<Node>);

fn compute_label(kind: &DerivationKind) -> Option<Label> {
    use DerivationKind::*;
    match kind {
        Act(a, _) => Some(a.clone()),
        SumL(t, _) | SumR(_, t) => t.label_opt().cloned(),
        SumBoth(t, u) => {
            let (lt, lu) = (t.label_opt()?, u.label_opt()?);
            (lt == lu && lt.is_discard()).then(|| lt.clone())
        }
        ParL(t, _) | ParR(_, t) => t.label_opt().cloned(),
        ParBoth(t, u) => t.label_opt()?.synchronise(u.label_opt()?),
        Res(t, _) | Rec(_, t) | SigCtx(t, _) => t.label_opt().cloned(),
        Rel(t, f) => Some(t.label_opt()?.relabel(f)),
        DisNil(b) | DisAct(b, _, _) => Some(Label::Discard(b.clone())),
        SigEmit(_, s) => Some(Label::Emit(s.clone())),
    }
}

impl Derivation {
    pub fn new(kind: DerivationKind) -> Self {
        let mut h = DefaultHasher::new();
        kind.hash(&mut h);
        let label = compute_label(&kind);
        Derivation(Arc::new(Node {
            hash: h.finish(),
            label,
            kind,
        }))
    }

    pub fn kind(&self) -> &DerivationKind {
        &self.0.kind
    }

    /// The label, or `None` for names whose premises cannot be combined.
    pub fn try_label(&self) -> Option<&Label> {
        self.label_opt()
    }

    fn label_opt(&self) -> Option<&Label> {
        self.0.label.as_ref()
    }

    /// The label of the derived triple.
    ///
    /// # Panics
    /// Panics for names that combine premises no rule can combine; such
    /// names are rejected by [`validate`] and never produced by [`enabled`].
    pub fn label(&self) -> &Label {
        self.label_opt()
            .unwrap_or_else(|| panic!("derivation {self} has no well-formed label"))
    }

    pub fn source(&self) -> Process {
        use DerivationKind::*;
        match self.kind() {
            Act(a, p) => Process::prefix(a.clone(), p.clone()),
            SumL(t, q) => Process::choice(t.source(), q.clone()),
            SumR(p, u) => Process::choice(p.clone(), u.source()),
            SumBoth(t, u) => Process::choice(t.source(), u.source()),
            ParL(t, q) => Process::par(t.source(), q.clone()),
            ParR(p, u) => Process::par(p.clone(), u.source()),
            ParBoth(t, u) => Process::par(t.source(), u.source()),
            Res(t, l) => Process::restrict(t.source(), l.clone()),
            Rel(t, f) => Process::relabel(t.source(), f.clone()),
            Rec(a, _) => Process::agent(a.clone()),
            DisNil(_) => Process::nil(),
            DisAct(_, a, p) => Process::prefix(a.clone(), p.clone()),
            SigEmit(p, s) => Process::signal(p.clone(), s.clone()),
            SigCtx(t, r) => Process::signal(t.source(), r.clone()),
        }
    }

    pub fn target(&self) -> Process {
        use DerivationKind::*;
        match self.kind() {
            Act(_, p) => p.clone(),
            SumL(t, q) => {
                if t.label().is_emission() {
                    Process::choice(t.target(), q.clone())
                } else {
                    t.target()
                }
            }
            SumR(p, u) => {
                if u.label().is_emission() {
                    Process::choice(p.clone(), u.target())
                } else {
                    u.target()
                }
            }
            SumBoth(t, u) => Process::choice(t.target(), u.target()),
            ParL(t, q) => Process::par(t.target(), q.clone()),
            ParR(p, u) => Process::par(p.clone(), u.target()),
            ParBoth(t, u) => Process::par(t.target(), u.target()),
            Res(t, l) => Process::restrict(t.target(), l.clone()),
            Rel(t, f) => Process::relabel(t.target(), f.clone()),
            Rec(a, t) => {
                if t.label().is_passive() {
                    Process::agent(a.clone())
                } else {
                    t.target()
                }
            }
            DisNil(_) | DisAct(..) | SigEmit(..) => self.source(),
            SigCtx(t, r) => {
                if t.label().is_action() {
                    t.target()
                } else {
                    Process::signal(t.target(), r.clone())
                }
            }
        }
    }

    /// Number of name nodes, for size bounds in tests and benches.
    pub fn depth(&self) -> usize {
        use DerivationKind::*;
        match self.kind() {
            Act(..) | DisNil(_) | DisAct(..) | SigEmit(..) => 1,
            SumL(t, _)
            | SumR(_, t)
            | ParL(t, _)
            | ParR(_, t)
            | Res(t, _)
            | Rel(t, _)
            | Rec(_, t)
            | SigCtx(t, _) => 1 + t.depth(),
            SumBoth(t, u) | ParBoth(t, u) => 1 + t.depth().max(u.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        use DerivationKind::*;
        match self.kind() {
            Act(..) | DisNil(_) | Rec(..) => ATOM,
            DisAct(..) => PREFIX,
            Res(..) | Rel(..) | SigCtx(..) | SigEmit(..) => POSTFIX,
            ParL(..) | ParR(..) | ParBoth(..) => PAR,
            SumL(..) | SumR(..) | SumBoth(..) => CHOICE,
        }
    }

    fn write_at(&self, f: &mut Formatter<'_>, level: u8) -> fmt::Result {
        use DerivationKind::*;
        if self.precedence() < level {
            f.write_char('(')?;
            self.write_at(f, CHOICE)?;
            return f.write_char(')');
        }
        match self.kind() {
            Act(a, p) => {
                write!(f, "<{a}->")?;
                p.write_at(f, PREFIX)?;
                f.write_char('>')
            }
            SumL(t, q) => {
                t.write_at(f, CHOICE)?;
                f.write_str(" + ")?;
                q.write_at(f, PAR)
            }
            SumR(p, u) => {
                p.write_at(f, CHOICE)?;
                f.write_str(" + ")?;
                u.write_at(f, PAR)
            }
            SumBoth(t, u) => {
                t.write_at(f, CHOICE)?;
                f.write_str(" + ")?;
                u.write_at(f, PAR)
            }
            ParL(t, q) => {
                t.write_at(f, PAR)?;
                f.write_str(" | ")?;
                q.write_at(f, POSTFIX)
            }
            ParR(p, u) => {
                p.write_at(f, PAR)?;
                f.write_str(" | ")?;
                u.write_at(f, POSTFIX)
            }
            ParBoth(t, u) => {
                t.write_at(f, PAR)?;
                f.write_str(" | ")?;
                u.write_at(f, POSTFIX)
            }
            Res(t, l) => {
                t.write_at(f, POSTFIX)?;
                write_name_set(f, l)
            }
            Rel(t, rel) => {
                t.write_at(f, POSTFIX)?;
                write!(f, "{rel}")
            }
            Rec(a, t) => write!(f, "{a}:({t})"),
            DisNil(b) => write!(f, "{b}:0"),
            DisAct(b, a, p) => {
                write!(f, "{b}:{a}.")?;
                p.write_at(f, PREFIX)
            }
            SigEmit(p, s) => {
                p.write_at(f, POSTFIX)?;
                write!(f, "<^{s}")
            }
            SigCtx(t, r) => {
                t.write_at(f, POSTFIX)?;
                write!(f, " ^ {r}")
            }
        }
    }
}

impl PartialEq for Derivation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl Eq for Derivation {}

impl Hash for Derivation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Derivation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Derivation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl Display for Derivation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        self.write_at(f, CHOICE)
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn label(t: &Derivation) -> Label {
    t.label().clone()
}

pub fn source(t: &Derivation) -> Process {
    t.source()
}

pub fn target(t: &Derivation) -> Process {
    t.target()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SosError {
    #[error("unguarded recursion through agent {0}")]
    UnguardedRecursion(Name),
    #[error("agent {0} is not defined")]
    UnknownAgent(Name),
}

/// All derivations with source `p`, in a fixed left-to-right order.
pub fn enabled(p: &Process, decls: &Declarations) -> Result<Vec<Derivation>, SosError> {
    let mut stack = Vec::new();
    enabled_in(p, decls, &mut stack)
}

fn enabled_in(
    p: &Process,
    decls: &Declarations,
    unfolding: &mut Vec<Name>,
) -> Result<Vec<Derivation>, SosError> {
    use DerivationKind as K;
    let d = Derivation::new;
    let mut out = Vec::new();
    match p.term() {
        Term::Nil => {
            for b in &decls.broadcast {
                out.push(d(K::DisNil(b.clone())));
            }
        }
        Term::Prefix(a, body) => {
            out.push(d(K::Act(a.clone(), body.clone())));
            for b in &decls.broadcast {
                if *a != Label::Receive(b.clone()) {
                    out.push(d(K::DisAct(b.clone(), a.clone(), body.clone())));
                }
            }
        }
        Term::Choice(l, r) => {
            let en_l = enabled_in(l, decls, unfolding)?;
            let en_r = enabled_in(r, decls, unfolding)?;
            for t in &en_l {
                if t.label().is_action() || t.label().is_emission() {
                    out.push(d(K::SumL(t.clone(), r.clone())));
                }
            }
            for u in &en_r {
                if u.label().is_action() || u.label().is_emission() {
                    out.push(d(K::SumR(l.clone(), u.clone())));
                }
            }
            for t in en_l.iter().filter(|t| t.label().is_discard()) {
                for u in en_r.iter().filter(|u| u.label() == t.label()) {
                    out.push(d(K::SumBoth(t.clone(), u.clone())));
                }
            }
        }
        Term::Par(l, r) => {
            let en_l = enabled_in(l, decls, unfolding)?;
            let en_r = enabled_in(r, decls, unfolding)?;
            for t in en_l.iter().filter(|t| t.label().is_interleaving()) {
                out.push(d(K::ParL(t.clone(), r.clone())));
            }
            for u in en_r.iter().filter(|u| u.label().is_interleaving()) {
                out.push(d(K::ParR(l.clone(), u.clone())));
            }
            for t in &en_l {
                for u in &en_r {
                    if t.label().synchronise(u.label()).is_some() {
                        out.push(d(K::ParBoth(t.clone(), u.clone())));
                    }
                }
            }
        }
        Term::Restrict(q, set) => {
            for t in enabled_in(q, decls, unfolding)? {
                if !t.label().restricted_by(set) {
                    out.push(d(K::Res(t, set.clone())));
                }
            }
        }
        Term::Relabel(q, f) => {
            for t in enabled_in(q, decls, unfolding)? {
                out.push(d(K::Rel(t, f.clone())));
            }
        }
        Term::Agent(a) => {
            if unfolding.contains(a) {
                return Err(SosError::UnguardedRecursion(a.clone()));
            }
            let body = decls
                .body(a)
                .ok_or_else(|| SosError::UnknownAgent(a.clone()))?;
            unfolding.push(a.clone());
            let inner = enabled_in(body, decls, unfolding);
            unfolding.pop();
            for t in inner? {
                out.push(d(K::Rec(a.clone(), t)));
            }
        }
        Term::Signal(q, s) => {
            out.push(d(K::SigEmit(q.clone(), s.clone())));
            for t in enabled_in(q, decls, unfolding)? {
                out.push(d(K::SigCtx(t, s.clone())));
            }
        }
    }
    Ok(out)
}

/// Checks that `t` names a genuine derivation: every node is an instance of
/// a rule with its side conditions satisfied, over declared names only.
pub fn validate(t: &Derivation, decls: &Declarations) -> bool {
    use DerivationKind::*;
    if t.label_opt().is_none() {
        return false;
    }
    let l = t.label();
    match t.kind() {
        Act(a, p) => a.is_action() && decls.label_declared(a) && process_declared(p, decls),
        SumL(t, q) => {
            (t.label().is_action() || t.label().is_emission())
                && validate(t, decls)
                && process_declared(q, decls)
        }
        SumR(p, u) => {
            (u.label().is_action() || u.label().is_emission())
                && validate(u, decls)
                && process_declared(p, decls)
        }
        SumBoth(t, u) => l.is_discard() && validate(t, decls) && validate(u, decls),
        ParL(t, q) => {
            t.label().is_interleaving() && validate(t, decls) && process_declared(q, decls)
        }
        ParR(p, u) => {
            u.label().is_interleaving() && validate(u, decls) && process_declared(p, decls)
        }
        ParBoth(t, u) => validate(t, decls) && validate(u, decls),
        Res(t, set) => {
            !t.label().restricted_by(set)
                && set
                    .iter()
                    .all(|n| decls.handshake.contains(n) || decls.signal.contains(n))
                && validate(t, decls)
        }
        Rel(t, f) => relabelling_declared(f, decls) && validate(t, decls),
        Rec(a, t) => decls.body(a) == Some(&t.source()) && validate(t, decls),
        DisNil(b) => decls.broadcast.contains(b),
        DisAct(b, a, p) => {
            decls.broadcast.contains(b)
                && a.is_action()
                && *a != Label::Receive(b.clone())
                && decls.label_declared(a)
                && process_declared(p, decls)
        }
        SigEmit(p, s) => decls.signal.contains(s) && process_declared(p, decls),
        SigCtx(t, r) => decls.signal.contains(r) && validate(t, decls),
    }
}

fn relabelling_declared(f: &Relabelling, decls: &Declarations) -> bool {
    f.handshake
        .iter()
        .all(|(a, b)| decls.handshake.contains(a) && decls.handshake.contains(b))
        && f.broadcast
            .iter()
            .all(|(a, b)| decls.broadcast.contains(a) && decls.broadcast.contains(b))
        && f.signal
            .iter()
            .all(|(a, b)| decls.signal.contains(a) && decls.signal.contains(b))
}

/// True when every name and agent in `p` is declared with a fitting class.
pub fn process_declared(p: &Process, decls: &Declarations) -> bool {
    match p.term() {
        Term::Nil => true,
        Term::Agent(a) => decls.agents.contains_key(a),
        Term::Prefix(a, q) => {
            a.is_action() && decls.label_declared(a) && process_declared(q, decls)
        }
        Term::Choice(l, r) | Term::Par(l, r) => {
            process_declared(l, decls) && process_declared(r, decls)
        }
        Term::Restrict(q, set) => {
            set.iter()
                .all(|n| decls.handshake.contains(n) || decls.signal.contains(n))
                && process_declared(q, decls)
        }
        Term::Relabel(q, f) => relabelling_declared(f, decls) && process_declared(q, decls),
        Term::Signal(q, s) => decls.signal.contains(s) && process_declared(q, decls),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn setup(src: &str, name: &str) -> (Declarations, Process) {
        let doc = parse(src).unwrap();
        let p = doc.term(name).cloned().unwrap_or_else(Process::nil);
        (doc.decls, p)
    }

    fn labels(en: &[Derivation]) -> Vec<String> {
        en.iter().map(|t| t.label().to_string()).collect()
    }

    #[test]
    fn nil_discards_every_broadcast() {
        let (decls, _) = setup("broadcast b;", "X");
        let en = enabled(&Process::nil(), &decls).unwrap();
        assert_eq!(en.len(), 1);
        assert_eq!(en[0].to_string(), "b:0");
        assert_eq!(labels(&en), ["b:"]);
    }

    #[test]
    fn prefix_acts_and_discards() {
        let (decls, p) = setup("handshake a; broadcast b; P := a.0", "P");
        let en = enabled(&p, &decls).unwrap();
        let names: Vec<_> = en.iter().map(|t| t.to_string()).collect();
        assert_eq!(names, ["<a->0>", "b:a.0"]);
        let dis = &en[1];
        assert_eq!(dis.source(), p);
        assert_eq!(dis.target(), p);
    }

    #[test]
    fn receivers_in_a_choice_cannot_discard() {
        let (decls, p) = setup("handshake x; broadcast b; P := b?.x.0 + b?.0", "P");
        let en = enabled(&p, &decls).unwrap();
        assert_eq!(en.len(), 2);
        assert!(en
            .iter()
            .all(|t| *t.label() == Label::Receive(Name::new("b"))));
    }

    #[test]
    fn signalling_example_has_five_derivations() {
        let (decls, p) = setup("broadcast b; signal s; P := (b!.0)^s | (s.0 + b?.0)", "P");
        let en = enabled(&p, &decls).unwrap();
        let mut ls = labels(&en);
        ls.sort();
        assert_eq!(ls, ["'s", "b!", "b?", "s", "tau"]);
        let send = en.iter().find(|t| t.label().to_string() == "b!").unwrap();
        assert_eq!(send.to_string(), "<b!->0> ^ s | (s.0 + <b?->0>)");
        assert_eq!(send.target(), Process::par(Process::nil(), Process::nil()));
        let tau = en.iter().find(|t| t.label().to_string() == "tau").unwrap();
        assert_eq!(tau.to_string(), "b!.0<^s | (<s->0> + b?.0)");
        assert_eq!(tau.target().to_string(), "b!.0 ^ s | 0");
    }

    #[test]
    fn signal_context_targets() {
        let (decls, p) = setup("handshake a; broadcast b; signal s; P := a.0 ^ s", "P");
        let en = enabled(&p, &decls).unwrap();
        let names: Vec<_> = en.iter().map(|t| t.to_string()).collect();
        assert_eq!(names, ["a.0<^s", "<a->0> ^ s", "b:a.0 ^ s"]);
        assert_eq!(en[0].source(), p);
        assert_eq!(en[0].target(), p);
        assert_eq!(en[1].target(), Process::nil());
        assert_eq!(en[2].target(), p);
    }

    #[test]
    fn recursion_targets() {
        let (decls, _) = setup("handshake a; broadcast b; signal s; A := a.A ^ s", "A");
        let a = Process::agent(Name::new("A"));
        let en = enabled(&a, &decls).unwrap();
        assert_eq!(en.len(), 3);
        for t in &en {
            assert_eq!(t.source(), a);
            assert!(validate(t, &decls));
            if t.label().is_passive() {
                assert_eq!(t.target(), a);
            }
        }
        assert_eq!(en[1].to_string(), "A:(<a->A> ^ s)");
        assert_eq!(en[1].target(), a);
    }

    #[test]
    fn unguarded_recursion_is_reported() {
        let (decls, _) = setup("handshake a; A := A + a.0", "A");
        let e = enabled(&Process::agent(Name::new("A")), &decls).unwrap_err();
        assert_eq!(e, SosError::UnguardedRecursion(Name::new("A")));
    }

    #[test]
    fn invalid_names_are_rejected() {
        let (decls, _) = setup("handshake a; broadcast b;", "X");
        let send = Derivation::new(DerivationKind::Act(
            Label::Send(Name::new("b")),
            Process::nil(),
        ));
        let both = Derivation::new(DerivationKind::ParBoth(send.clone(), send.clone()));
        assert!(!validate(&both, &decls));
        let act = Derivation::new(DerivationKind::Act(
            Label::Hand(Name::new("a")),
            Process::nil(),
        ));
        let res = Derivation::new(DerivationKind::Res(act.clone(), [Name::new("a")].into()));
        assert!(!validate(&res, &decls));
        let dis = Derivation::new(DerivationKind::DisAct(
            Name::new("b"),
            Label::Receive(Name::new("b")),
            Process::nil(),
        ));
        assert!(!validate(&dis, &decls));
        assert!(validate(&act, &decls));
    }

    #[test]
    fn par_both_is_ordered() {
        let (decls, p) = setup("handshake a; P := a.0 | 'a.0", "P");
        let en = enabled(&p, &decls).unwrap();
        let sync: Vec<_> = en.iter().filter(|t| *t.label() == Label::Tau).collect();
        assert_eq!(sync.len(), 1);
        if let DerivationKind::ParBoth(t, u) = sync[0].kind() {
            let swapped = Derivation::new(DerivationKind::ParBoth(u.clone(), t.clone()));
            assert_ne!(&swapped, sync[0]);
            assert!(!validate(&swapped, &decls) || swapped.source() != p);
        } else {
            panic!();
        }
    }
}
