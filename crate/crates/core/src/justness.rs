//! Justness of paths: a path is `B`-just if every transition that is
//! affected by its own occurrence and not blocking, once enabled, is
//! eventually affected by the path itself.
//!
//! Infinite paths are given as lassos. Following the variants of a
//! transition along the cycle visits finitely many variant sets per cycle
//! position, so a repetition settles whether the transition survives
//! forever.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write;

use thiserror::Error;

use crate::epbisim::{transfer_lasso, Transfer, TransferError, Witness};
use crate::ltss::{Lasso, LtssError, LtssGraph, StateId, TransId};
use crate::syntax::Label;

/// Labels whose transitions need the environment's cooperation and are
/// exempt from justness obligations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockingSet {
    pub labels: BTreeSet<Label>,
}

impl BlockingSet {
    pub fn new(labels: impl IntoIterator<Item = Label>) -> Self {
        BlockingSet {
            labels: labels.into_iter().collect(),
        }
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.labels.contains(l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JustVerdict {
    Just,
    /// `transition`, enabled at `position`, is never affected by the rest of
    /// the path; `variants` is its variant set where the evolution repeats
    /// (or at the end of a finite path).
    Unjust {
        position: usize,
        transition: TransId,
        variants: BTreeSet<TransId>,
    },
}

impl JustVerdict {
    pub fn is_just(&self) -> bool {
        matches!(self, JustVerdict::Just)
    }

    pub fn to_structured(&self, g: &LtssGraph) -> String {
        match self {
            JustVerdict::Just => "just\n".to_string(),
            JustVerdict::Unjust {
                position,
                transition,
                variants,
            } => {
                let mut out = String::from("unjust\n");
                let _ = writeln!(out, "position {position}");
                let _ = writeln!(out, "transition {}", g.derivation(*transition));
                let _ = writeln!(out, "label {}", g.label(*transition));
                let _ = writeln!(out, "variants {}", variants.len());
                for v in variants {
                    let _ = writeln!(out, "variant {}", g.derivation(*v));
                }
                out
            }
        }
    }
}

fn obligations(g: &LtssGraph, s: StateId, blocking: &BlockingSet) -> Vec<TransId> {
    g.enabled(s)
        .iter()
        .copied()
        .filter(|&t| !blocking.contains(g.label(t)) && g.tr_bullet(t))
        .collect()
}

/// Decides `B`-justness of the infinite path presented by `pi`.
pub fn check_b_just(
    g: &LtssGraph,
    pi: &Lasso,
    blocking: &BlockingSet,
) -> Result<JustVerdict, LtssError> {
    g.check_lasso(pi)?;
    for i in 0..pi.positions() {
        for t in obligations(g, pi.state_at(g, i), blocking) {
            let mut variants = BTreeSet::from([t]);
            let mut seen = HashSet::new();
            let mut j = i;
            loop {
                if let Some(cp) = pi.cycle_position(j) {
                    if !seen.insert((cp, variants.clone())) {
                        return Ok(JustVerdict::Unjust {
                            position: i,
                            transition: t,
                            variants,
                        });
                    }
                }
                variants = g.step_variants(&variants, pi.step(j));
                if variants.is_empty() {
                    break;
                }
                j += 1;
            }
        }
    }
    Ok(JustVerdict::Just)
}

/// Decides `B`-justness of the finite path from `start` along `ts`. The
/// last state counts as a suffix of its own, so any obligation enabled
/// there makes the path unjust.
pub fn check_b_just_finite(
    g: &LtssGraph,
    start: StateId,
    ts: &[TransId],
    blocking: &BlockingSet,
) -> Result<JustVerdict, LtssError> {
    g.check_path(start, ts)?;
    let mut here = start;
    for i in 0..=ts.len() {
        for t in obligations(g, here, blocking) {
            let variants = ts[i..]
                .iter()
                .fold(BTreeSet::from([t]), |vs, &u| g.step_variants(&vs, u));
            if !variants.is_empty() {
                return Ok(JustVerdict::Unjust {
                    position: i,
                    transition: t,
                    variants,
                });
            }
        }
        if i < ts.len() {
            here = g.target(ts[i]);
        }
    }
    Ok(JustVerdict::Just)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PreservationError {
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Ltss(#[from] LtssError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preservation {
    pub transfer: Transfer,
    pub source: JustVerdict,
    pub target: JustVerdict,
}

impl Preservation {
    pub fn agrees(&self) -> bool {
        self.source.is_just() == self.target.is_just()
    }
}

/// Carries `pi` across `w` and classifies both lassos.
pub fn check_justness_preservation(
    g: &LtssGraph,
    w: &Witness,
    pi: &Lasso,
    blocking: &BlockingSet,
) -> Result<Preservation, PreservationError> {
    let transfer = transfer_lasso(g, w, pi)?;
    let source = check_b_just(g, pi, blocking)?;
    let target = check_b_just(g, &transfer.target, blocking)?;
    Ok(Preservation {
        transfer,
        source,
        target,
    })
}
