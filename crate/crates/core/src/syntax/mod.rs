//! Abstract syntax of ABCdE terms: names, labels, relabellings, process
//! expressions and the declarations that give them meaning.
//!
//! Terms are immutable and reference counted. Every [`Process`] caches a
//! structural hash so that state tables keyed by terms stay cheap.

mod parser;
pub(crate) mod printer;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

pub use parser::{parse, Document, ParseError, ParseErrorKind};

/// A communication name, signal, broadcast channel or agent identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

/// Transition labels. The action alphabet is every variant except
/// [`Label::Discard`] and [`Label::Emit`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    /// handshake `c`
    Hand(Name),
    /// handshake co-name `'c`
    CoHand(Name),
    Tau,
    /// broadcast send `b!`
    Send(Name),
    /// broadcast receive `b?`
    Receive(Name),
    /// broadcast discard `b:`
    Discard(Name),
    /// signal read `s`
    Read(Name),
    /// signal emission `'s`
    Emit(Name),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("label {0} has no complement")]
pub struct NoComplement(pub Label);

impl Label {
    /// Member of Act, i.e. usable as a prefix.
    pub fn is_action(&self) -> bool {
        !matches!(self, Label::Discard(_) | Label::Emit(_))
    }

    /// Discards and emissions never change the state of the process.
    pub fn is_passive(&self) -> bool {
        matches!(self, Label::Discard(_) | Label::Emit(_))
    }

    pub fn is_emission(&self) -> bool {
        matches!(self, Label::Emit(_))
    }

    pub fn is_discard(&self) -> bool {
        matches!(self, Label::Discard(_))
    }

    /// Labels that may be propagated by the interleaving rules of parallel
    /// composition: everything except broadcast labels.
    pub fn is_interleaving(&self) -> bool {
        self.broadcast_name().is_none()
    }

    /// The channel of a broadcast label (`b!`, `b?` or `b:`).
    pub fn broadcast_name(&self) -> Option<&Name> {
        match self {
            Label::Send(b) | Label::Receive(b) | Label::Discard(b) => Some(b),
            _ => None,
        }
    }

    /// `b?` or `b:` for the given channel.
    pub fn is_receive_or_discard_of(&self, b: &Name) -> bool {
        matches!(self, Label::Receive(x) | Label::Discard(x) if x == b)
    }

    pub fn complement(&self) -> Result<Label, NoComplement> {
        match self {
            Label::Hand(c) => Ok(Label::CoHand(c.clone())),
            Label::CoHand(c) => Ok(Label::Hand(c.clone())),
            Label::Read(s) => Ok(Label::Emit(s.clone())),
            Label::Emit(s) => Ok(Label::Read(s.clone())),
            other => Err(NoComplement(other.clone())),
        }
    }

    pub fn relabel(&self, f: &Relabelling) -> Label {
        match self {
            Label::Hand(c) => Label::Hand(f.handshake(c)),
            Label::CoHand(c) => Label::CoHand(f.handshake(c)),
            Label::Tau => Label::Tau,
            Label::Send(b) => Label::Send(f.broadcast(b)),
            Label::Receive(b) => Label::Receive(f.broadcast(b)),
            Label::Discard(b) => Label::Discard(f.broadcast(b)),
            Label::Read(s) => Label::Read(f.signal(s)),
            Label::Emit(s) => Label::Emit(f.signal(s)),
        }
    }

    /// True when a restriction to `set` blocks this label (`l ∈ L ∪ L̄`).
    pub fn restricted_by(&self, set: &BTreeSet<Name>) -> bool {
        match self {
            Label::Hand(c) | Label::CoHand(c) | Label::Read(c) | Label::Emit(c) => set.contains(c),
            _ => false,
        }
    }

    /// Combined label of a synchronisation of `self` (left) with `other`
    /// (right), if the two can synchronise at all.
    pub fn synchronise(&self, other: &Label) -> Option<Label> {
        use Label::*;
        match (self, other) {
            (Hand(a), CoHand(b))
            | (CoHand(a), Hand(b))
            | (Read(a), Emit(b))
            | (Emit(a), Read(b))
                if a == b =>
            {
                Some(Tau)
            }
            _ => {
                let b = self.broadcast_name()?;
                if other.broadcast_name()? != b {
                    return None;
                }
                let b = b.clone();
                match (self, other) {
                    (Send(_), Send(_)) => None,
                    (Send(_), _) | (_, Send(_)) => Some(Send(b)),
                    (Receive(_), _) | (_, Receive(_)) => Some(Receive(b)),
                    _ => Some(Discard(b)),
                }
            }
        }
    }
}

pub fn complement(l: &Label) -> Result<Label, NoComplement> {
    l.complement()
}

pub fn apply_relabelling(f: &Relabelling, l: &Label) -> Label {
    l.relabel(f)
}

/// A relabelling, one map per name class. Names not listed map to themselves.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Relabelling {
    pub handshake: BTreeMap<Name, Name>,
    pub broadcast: BTreeMap<Name, Name>,
    pub signal: BTreeMap<Name, Name>,
}

impl Relabelling {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn handshake(&self, c: &Name) -> Name {
        self.handshake.get(c).unwrap_or(c).clone()
    }

    pub fn broadcast(&self, b: &Name) -> Name {
        self.broadcast.get(b).unwrap_or(b).clone()
    }

    pub fn signal(&self, s: &Name) -> Name {
        self.signal.get(s).unwrap_or(s).clone()
    }

    pub fn is_empty(&self) -> bool {
        self.handshake.is_empty() && self.broadcast.is_empty() && self.signal.is_empty()
    }

    /// All listed entries in name order, regardless of class.
    pub fn entries(&self) -> Vec<(&Name, &Name)> {
        let mut all: Vec<_> = self
            .handshake
            .iter()
            .chain(self.broadcast.iter())
            .chain(self.signal.iter())
            .collect();
        all.sort();
        all
    }
}

/// The shape of a process expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Nil,
    Prefix(Label, Process),
    Choice(Process, Process),
    Par(Process, Process),
    Restrict(Process, BTreeSet<Name>),
    Relabel(Process, Relabelling),
    Agent(Name),
    /// `P ^ s`
    Signal(Process, Name),
}

struct ProcessNode {
    hash: u64,
    term: Term,
}

/// An ABCdE process expression. Structural equality is state identity.
#[derive(Clone)]
pub struct Process(Arc<ProcessNode>);

impl Process {
    pub fn new(term: Term) -> Self {
        let mut h = DefaultHasher::new();
        term.hash(&mut h);
        Process(Arc::new(ProcessNode {
            hash: h.finish(),
            term,
        }))
    }

    pub fn term(&self) -> &Term {
        &self.0.term
    }

    pub fn nil() -> Self {
        Process::new(Term::Nil)
    }

    pub fn prefix(action: Label, body: Process) -> Self {
        Process::new(Term::Prefix(action, body))
    }

    pub fn choice(l: Process, r: Process) -> Self {
        Process::new(Term::Choice(l, r))
    }

    pub fn par(l: Process, r: Process) -> Self {
        Process::new(Term::Par(l, r))
    }

    pub fn restrict(p: Process, set: BTreeSet<Name>) -> Self {
        Process::new(Term::Restrict(p, set))
    }

    pub fn relabel(p: Process, f: Relabelling) -> Self {
        Process::new(Term::Relabel(p, f))
    }

    pub fn agent(name: Name) -> Self {
        Process::new(Term::Agent(name))
    }

    pub fn signal(p: Process, s: Name) -> Self {
        Process::new(Term::Signal(p, s))
    }

    /// Number of syntax nodes, not unfolding agents.
    pub fn size(&self) -> usize {
        match self.term() {
            Term::Nil | Term::Agent(_) => 1,
            Term::Prefix(_, p)
            | Term::Restrict(p, _)
            | Term::Relabel(p, _)
            | Term::Signal(p, _) => 1 + p.size(),
            Term::Choice(l, r) | Term::Par(l, r) => 1 + l.size() + r.size(),
        }
    }
}

impl PartialEq for Process {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.0.term == other.0.term)
    }
}

impl Eq for Process {}

impl Hash for Process {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Process {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Process {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.term.cmp(&other.0.term)
    }
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Which of the declared name sets a name belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NameClass {
    Handshake,
    Broadcast,
    Signal,
}

impl fmt::Display for NameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameClass::Handshake => "handshake",
            NameClass::Broadcast => "broadcast",
            NameClass::Signal => "signal",
        })
    }
}

/// Declared name sets and agent definitions.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct Declarations {
    pub handshake: BTreeSet<Name>,
    pub broadcast: BTreeSet<Name>,
    pub signal: BTreeSet<Name>,
    pub agents: BTreeMap<Name, Process>,
}

impl Declarations {
    pub fn class_of(&self, n: &Name) -> Option<NameClass> {
        if self.handshake.contains(n) {
            Some(NameClass::Handshake)
        } else if self.broadcast.contains(n) {
            Some(NameClass::Broadcast)
        } else if self.signal.contains(n) {
            Some(NameClass::Signal)
        } else {
            None
        }
    }

    pub fn body(&self, agent: &Name) -> Option<&Process> {
        self.agents.get(agent)
    }

    /// Agent identifiers that occur in some agent body. Only these take part
    /// in recursion, so only these must have guarded bodies.
    pub fn referenced_agents(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for body in self.agents.values() {
            collect_agents(body, &mut out);
        }
        out
    }

    /// True when every name occurring in the label is declared with the
    /// matching class.
    pub fn label_declared(&self, l: &Label) -> bool {
        match l {
            Label::Hand(c) | Label::CoHand(c) => self.handshake.contains(c),
            Label::Tau => true,
            Label::Send(b) | Label::Receive(b) | Label::Discard(b) => self.broadcast.contains(b),
            Label::Read(s) | Label::Emit(s) => self.signal.contains(s),
        }
    }

    /// Every label the declarations can produce, in a fixed order.
    pub fn label_universe(&self) -> Vec<Label> {
        let mut out = vec![Label::Tau];
        for c in &self.handshake {
            out.push(Label::Hand(c.clone()));
            out.push(Label::CoHand(c.clone()));
        }
        for b in &self.broadcast {
            out.push(Label::Send(b.clone()));
            out.push(Label::Receive(b.clone()));
            out.push(Label::Discard(b.clone()));
        }
        for s in &self.signal {
            out.push(Label::Read(s.clone()));
            out.push(Label::Emit(s.clone()));
        }
        out
    }
}

fn collect_agents(p: &Process, out: &mut BTreeSet<Name>) {
    match p.term() {
        Term::Nil => {}
        Term::Agent(a) => {
            out.insert(a.clone());
        }
        Term::Prefix(_, q) | Term::Restrict(q, _) | Term::Relabel(q, _) | Term::Signal(q, _) => {
            collect_agents(q, out)
        }
        Term::Choice(l, r) | Term::Par(l, r) => {
            collect_agents(l, out);
            collect_agents(r, out);
        }
    }
}

/// One step into a term, used to locate unguarded agent occurrences.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PathStep {
    ChoiceLeft,
    ChoiceRight,
    ParLeft,
    ParRight,
    Restrict,
    Relabel,
    Signal,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathStep::ChoiceLeft => "+L",
            PathStep::ChoiceRight => "+R",
            PathStep::ParLeft => "|L",
            PathStep::ParRight => "|R",
            PathStep::Restrict => "\\L",
            PathStep::Relabel => "[f]",
            PathStep::Signal => "^r",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardViolation {
    /// Agent whose body is unguarded.
    pub agent: Name,
    /// The identifier occurring outside any prefix.
    pub occurrence: Name,
    pub path: Vec<PathStep>,
}

impl fmt::Display for GuardViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "agent {}: unguarded occurrence of {} at ",
            self.agent, self.occurrence
        )?;
        if self.path.is_empty() {
            f.write_str("top level")
        } else {
            for s in &self.path {
                write!(f, "{s}")?;
            }
            Ok(())
        }
    }
}

/// Reports every agent occurrence that is not underneath a prefix, for each
/// body of a referenced agent.
pub fn check_guarded(decls: &Declarations) -> Result<(), Vec<GuardViolation>> {
    let referenced = decls.referenced_agents();
    let mut violations = Vec::new();
    for (name, body) in &decls.agents {
        if referenced.contains(name) {
            unguarded_occurrences(name, body, &mut Vec::new(), &mut violations);
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Guardedness of a single expression, independent of any declarations.
pub fn is_guarded(p: &Process) -> bool {
    let mut v = Vec::new();
    unguarded_occurrences(&Name::new("_"), p, &mut Vec::new(), &mut v);
    v.is_empty()
}

fn unguarded_occurrences(
    agent: &Name,
    p: &Process,
    path: &mut Vec<PathStep>,
    out: &mut Vec<GuardViolation>,
) {
    let descend = |step: PathStep, q: &Process, path: &mut Vec<PathStep>, out: &mut Vec<_>| {
        path.push(step);
        unguarded_occurrences(agent, q, path, out);
        path.pop();
    };
    match p.term() {
        Term::Nil | Term::Prefix(..) => {}
        Term::Agent(a) => out.push(GuardViolation {
            agent: agent.clone(),
            occurrence: a.clone(),
            path: path.clone(),
        }),
        Term::Choice(l, r) => {
            descend(PathStep::ChoiceLeft, l, path, out);
            descend(PathStep::ChoiceRight, r, path, out);
        }
        Term::Par(l, r) => {
            descend(PathStep::ParLeft, l, path, out);
            descend(PathStep::ParRight, r, path, out);
        }
        Term::Restrict(q, _) => descend(PathStep::Restrict, q, path, out),
        Term::Relabel(q, _) => descend(PathStep::Relabel, q, path, out),
        Term::Signal(q, _) => descend(PathStep::Signal, q, path, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Label::Hand(n("a")).complement(), Ok(Label::CoHand(n("a"))));
        assert_eq!(Label::Emit(n("s")).complement(), Ok(Label::Read(n("s"))));
        assert!(Label::Tau.complement().is_err());
        assert!(Label::Send(n("b")).complement().is_err());
        assert!(Label::Discard(n("b")).complement().is_err());
    }

    #[test]
    fn relabelling_examples() {
        let mut f = Relabelling::identity();
        f.handshake.insert(n("a"), n("c"));
        f.broadcast.insert(n("b"), n("d"));
        assert_eq!(Label::CoHand(n("a")).relabel(&f), Label::CoHand(n("c")));
        assert_eq!(Label::Discard(n("b")).relabel(&f), Label::Discard(n("d")));
        assert_eq!(Label::Tau.relabel(&f), Label::Tau);
        assert_eq!(Label::Hand(n("z")).relabel(&f), Label::Hand(n("z")));
    }

    #[test]
    fn broadcast_combination_table() {
        let b = n("b");
        let s = Label::Send(b.clone());
        let r = Label::Receive(b.clone());
        let d = Label::Discard(b.clone());
        assert_eq!(s.synchronise(&s), None);
        assert_eq!(s.synchronise(&r), Some(s.clone()));
        assert_eq!(s.synchronise(&d), Some(s.clone()));
        assert_eq!(r.synchronise(&s), Some(s.clone()));
        assert_eq!(r.synchronise(&r), Some(r.clone()));
        assert_eq!(r.synchronise(&d), Some(r.clone()));
        assert_eq!(d.synchronise(&s), Some(s.clone()));
        assert_eq!(d.synchronise(&r), Some(r.clone()));
        assert_eq!(d.synchronise(&d), Some(d.clone()));
        assert_eq!(r.synchronise(&Label::Receive(n("c"))), None);
    }

    #[test]
    fn guardedness_examples() {
        let a = n("A");
        let mut decls = Declarations::default();
        decls.handshake.insert(n("a"));
        decls.agents.insert(
            a.clone(),
            Process::prefix(Label::Hand(n("a")), Process::agent(a.clone())),
        );
        assert!(check_guarded(&decls).is_ok());

        decls.agents.insert(
            a.clone(),
            Process::choice(
                Process::agent(a.clone()),
                Process::prefix(Label::Hand(n("a")), Process::nil()),
            ),
        );
        let v = check_guarded(&decls).unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].agent, a);
        assert_eq!(v[0].path, vec![PathStep::ChoiceLeft]);
    }

    #[test]
    fn mutually_recursive_guarded_bodies() {
        let mut decls = Declarations::default();
        decls.handshake.insert(n("a"));
        decls.broadcast.insert(n("b"));
        decls.agents.insert(
            n("A"),
            Process::prefix(Label::Receive(n("b")), Process::agent(n("B"))),
        );
        decls.agents.insert(
            n("B"),
            Process::prefix(Label::Hand(n("a")), Process::agent(n("A"))),
        );
        assert!(check_guarded(&decls).is_ok());
    }
}
