//! Seeded random terms for sweeping the semantics.
//!
//! All terms of a corpus share one set of declarations: three handshake
//! names, one broadcast name, one signal name and a few recursive agents.
//! Agent bodies are sequential, so every term has a finite state space,
//! and recursion under a prefix keeps them guarded. Terms lean towards
//! parallel composition and choice, where successor computation has the
//! most cases.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ltss::LtssGraph;
use crate::syntax::{Declarations, Label, Name, Process, Relabelling};

pub const MAX_DEPTH: usize = 5;
const AGENTS: usize = 3;
const AGENT_DEPTH: usize = 3;

#[derive(Clone, Debug)]
pub struct Corpus {
    pub decls: Arc<Declarations>,
    pub terms: Vec<Process>,
}

impl Corpus {
    /// The corpus in the input syntax, terms named `T0`, `T1`, ...
    pub fn to_source(&self) -> String {
        let d = &self.decls;
        let join = |set: &BTreeSet<Name>| {
            set.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "handshake {};", join(&d.handshake));
        let _ = writeln!(out, "broadcast {};", join(&d.broadcast));
        let _ = writeln!(out, "signal {};", join(&d.signal));
        for (name, body) in &d.agents {
            let _ = writeln!(out, "{name} := {body};");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let _ = writeln!(out, "T{i} := {t};");
        }
        out
    }
}

struct Gen {
    rng: ChaCha8Rng,
    hand: Vec<Name>,
    b: Name,
    s: Name,
    agents: Vec<Name>,
}

impl Gen {
    fn action(&mut self) -> Label {
        let c = self.hand[self.rng.gen_range(0..self.hand.len())].clone();
        match self.rng.gen_range(0..10) {
            0..=2 => Label::Hand(c),
            3..=5 => Label::CoHand(c),
            6 => Label::Tau,
            7 => Label::Send(self.b.clone()),
            8 => Label::Receive(self.b.clone()),
            _ => Label::Read(self.s.clone()),
        }
    }

    fn agent(&mut self) -> Process {
        Process::agent(self.agents[self.rng.gen_range(0..self.agents.len())].clone())
    }

    /// A sequential term; agents may only occur under a prefix.
    fn sequential(&mut self, depth: usize, guarded: bool) -> Process {
        let roll = self.rng.gen_range(0..10);
        if depth <= 1 {
            return match roll {
                0..=3 if guarded => self.agent(),
                0..=1 => Process::nil(),
                _ => {
                    let a = self.action();
                    let body = if guarded {
                        self.agent()
                    } else {
                        Process::nil()
                    };
                    Process::prefix(a, body)
                }
            };
        }
        match roll {
            0 => Process::nil(),
            1..=2 if guarded => self.agent(),
            1..=6 => {
                let a = self.action();
                Process::prefix(a, self.sequential(depth - 1, true))
            }
            _ => Process::choice(
                self.sequential(depth - 1, guarded),
                self.sequential(depth - 1, guarded),
            ),
        }
    }

    fn term(&mut self, depth: usize) -> Process {
        if depth <= 2 {
            return match self.rng.gen_range(0..6) {
                0 => Process::nil(),
                1 => self.agent(),
                _ => {
                    let a = self.action();
                    Process::prefix(a, Process::nil())
                }
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..16) {
            0..=3 => Process::par(self.term(d), self.term(d)),
            4..=7 => Process::choice(self.term(d), self.term(d)),
            8..=9 => {
                let a = self.action();
                Process::prefix(a, self.term(d))
            }
            10 => self.agent(),
            11 => Process::nil(),
            12 => {
                let c = self.hand[self.rng.gen_range(0..self.hand.len())].clone();
                let set = if self.rng.gen_bool(0.25) {
                    BTreeSet::from([self.s.clone()])
                } else {
                    BTreeSet::from([c])
                };
                Process::restrict(self.term(d), set)
            }
            13 => {
                let i = self.rng.gen_range(0..self.hand.len());
                let j = (i + 1) % self.hand.len();
                let f = Relabelling {
                    handshake: BTreeMap::from([(self.hand[i].clone(), self.hand[j].clone())]),
                    ..Relabelling::default()
                };
                Process::relabel(self.term(d), f)
            }
            _ => Process::signal(self.term(d), self.s.clone()),
        }
    }
}

/// `n` terms from `seed`. A drawn term whose state space exceeds
/// `state_limit` is replaced by the next draw.
pub fn generate(n: usize, seed: u64, state_limit: usize) -> Corpus {
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        hand: ["a", "c", "d"].map(Name::new).to_vec(),
        b: Name::new("b"),
        s: Name::new("s"),
        agents: (0..AGENTS).map(|i| Name::new(&format!("A{i}"))).collect(),
    };
    let mut agents = BTreeMap::new();
    for name in gen.agents.clone() {
        let a = gen.action();
        let body = Process::prefix(a, gen.sequential(AGENT_DEPTH - 1, true));
        let body = if gen.rng.gen_bool(0.5) {
            let extra = gen.sequential(AGENT_DEPTH - 1, true);
            let a = gen.action();
            Process::choice(body, Process::prefix(a, extra))
        } else {
            body
        };
        agents.insert(name, body);
    }
    let decls = Arc::new(Declarations {
        handshake: gen.hand.iter().cloned().collect(),
        broadcast: BTreeSet::from([gen.b.clone()]),
        signal: BTreeSet::from([gen.s.clone()]),
        agents,
    });
    let mut terms = Vec::with_capacity(n);
    while terms.len() < n {
        let depth = gen.rng.gen_range(3..=MAX_DEPTH);
        let t = gen.term(depth);
        if LtssGraph::explore(std::slice::from_ref(&t), decls.clone(), state_limit).is_ok() {
            terms.push(t);
        }
    }
    Corpus { decls, terms }
}
