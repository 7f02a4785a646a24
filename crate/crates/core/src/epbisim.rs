//! Strong bisimilarity and enabling preserving (ep-) bisimilarity on an
//! explored graph.
//!
//! An ep-bisimulation is a set of triples `(p, q, R)` where `R` matches the
//! transitions enabled in `p` with those enabled in `q`. Matching has to
//! survive every matched step: the successors of related transitions stay
//! related in the target pair. The checker computes the greatest set of
//! such triples by pruning candidate relations until nothing changes.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::{self, Display, Formatter, Write};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::ltss::{Lasso, LtssError, LtssGraph, StateId, TransId};
use crate::syntax::Label;

/// Caps on the candidate relations enumerated per state pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_enabled_per_label: usize,
    pub max_relations_per_pair: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enabled_per_label: 6,
            max_relations_per_pair: 20_000,
        }
    }
}

/// Coarsest strong bisimulation on the graph, as a block number per state.
pub fn strong_partition(g: &LtssGraph) -> Vec<usize> {
    let mut block = vec![0usize; g.num_states()];
    let mut count = 1;
    loop {
        let mut ids: HashMap<(usize, BTreeSet<(Label, usize)>), usize> = HashMap::new();
        let mut next = Vec::with_capacity(block.len());
        for s in g.states() {
            let sig: BTreeSet<(Label, usize)> = g
                .enabled(s)
                .iter()
                .map(|&t| (g.label(t).clone(), block[g.target(t).index()]))
                .collect();
            let fresh = ids.len();
            next.push(*ids.entry((block[s.index()], sig)).or_insert(fresh));
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrongVerdict {
    Equivalent,
    Inequivalent { p: StateId, q: StateId },
}

pub fn check_strong_bisim(g: &LtssGraph, p: StateId, q: StateId) -> StrongVerdict {
    let block = strong_partition(g);
    if block[p.index()] == block[q.index()] {
        StrongVerdict::Equivalent
    } else {
        StrongVerdict::Inequivalent { p, q }
    }
}

/// A relation between the transitions enabled in two states.
pub type TransRel = BTreeSet<(TransId, TransId)>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EpTriple {
    pub p: StateId,
    pub q: StateId,
    pub rel: TransRel,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub triples: BTreeSet<EpTriple>,
}

impl Witness {
    /// `{(s, s, Id_s)}` for every state reachable from `from`.
    pub fn identity(g: &LtssGraph, from: StateId) -> Witness {
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        let mut triples = BTreeSet::new();
        while let Some(s) = queue.pop_front() {
            let rel = g.enabled(s).iter().map(|&t| (t, t)).collect();
            triples.insert(EpTriple { p: s, q: s, rel });
            for &t in g.enabled(s) {
                if seen.insert(g.target(t)) {
                    queue.push_back(g.target(t));
                }
            }
        }
        Witness { triples }
    }

    pub fn invert(&self) -> Witness {
        let triples = self
            .triples
            .iter()
            .map(|tr| EpTriple {
                p: tr.q,
                q: tr.p,
                rel: tr.rel.iter().map(|&(t, u)| (u, t)).collect(),
            })
            .collect();
        Witness { triples }
    }

    pub fn union(&self, other: &Witness) -> Witness {
        Witness {
            triples: self.triples.union(&other.triples).cloned().collect(),
        }
    }

    /// Relational composition of triples that meet in a middle state.
    pub fn compose(&self, other: &Witness) -> Witness {
        let mut by_left: HashMap<StateId, Vec<(StateId, Vec<(TransId, TransId)>)>> = HashMap::new();
        for tr in &other.triples {
            by_left
                .entry(tr.p)
                .or_default()
                .push((tr.q, tr.rel.iter().copied().collect()));
        }
        let mut seen: HashSet<(StateId, StateId, Vec<(TransId, TransId)>)> = HashSet::new();
        let mut rel = Vec::new();
        for a in &self.triples {
            for (q, r2) in by_left.get(&a.q).into_iter().flatten() {
                rel.clear();
                for &(t, u) in &a.rel {
                    let from = r2.partition_point(|&(x, _)| x < u);
                    rel.extend(
                        r2[from..]
                            .iter()
                            .take_while(|&&(x, _)| x == u)
                            .map(|&(_, v)| (t, v)),
                    );
                }
                rel.sort_unstable();
                rel.dedup();
                seen.insert((a.p, *q, rel.clone()));
            }
        }
        let triples = seen
            .into_iter()
            .map(|(p, q, rel)| EpTriple {
                p,
                q,
                rel: rel.into_iter().collect(),
            })
            .collect();
        Witness { triples }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples relating `p` and `q`.
    pub fn at(&self, p: StateId, q: StateId) -> impl Iterator<Item = &EpTriple> {
        let lo = EpTriple {
            p,
            q,
            rel: BTreeSet::new(),
        };
        self.triples
            .range(lo..)
            .take_while(move |tr| tr.p == p && tr.q == q)
    }

    pub fn covers(&self, p: StateId, q: StateId) -> bool {
        self.at(p, q).next().is_some()
    }

    /// Line-oriented listing: one `triple` line per triple followed by the
    /// related derivation names.
    pub fn to_structured(&self, g: &LtssGraph) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "witness {} triples", self.triples.len());
        for tr in &self.triples {
            let _ = writeln!(
                out,
                "triple {} {} {} ~ {}",
                tr.p.0,
                tr.q.0,
                g.state(tr.p),
                g.state(tr.q)
            );
            for &(t, u) in &tr.rel {
                let _ = writeln!(out, "  {} ~ {}", g.derivation(t), g.derivation(u));
            }
        }
        out
    }
}

/// The clause of the ep-bisimulation definition a triple can violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    /// `R` relates transitions not enabled in `p` and `q`.
    Typing,
    /// Some transition of `p` is unmatched.
    OneA,
    /// Some transition of `q` is unmatched.
    OneB,
    /// Related transitions carry different labels.
    OneC,
    /// No triple at all for the targets of a related pair.
    Two,
    /// Successors on the left are not matched.
    TwoA,
    /// Successors on the right are not matched.
    TwoB,
}

impl Display for Item {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Item::Typing => "typing",
            Item::OneA => "1a",
            Item::OneB => "1b",
            Item::OneC => "1c",
            Item::Two => "2",
            Item::TwoA => "2a",
            Item::TwoB => "2b",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub triple: EpTriple,
    pub item: Item,
    /// The offending transition pair, where there is one.
    pub pair: Option<(TransId, TransId)>,
}

impl Display for Violation {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "item {} fails for triple at states {} and {}",
            self.item, self.triple.p.0, self.triple.q.0
        )?;
        if let Some((t, u)) = self.pair {
            write!(f, " (transitions {} and {})", t.0, u.0)?;
        }
        Ok(())
    }
}

fn matches_left(g: &LtssGraph, rel: &TransRel, v: TransId, w: TransId, next: &TransRel) -> bool {
    rel.iter().all(|&(t, u)| {
        let su = g.successors(u, w);
        g.successors(t, v)
            .iter()
            .all(|&t2| su.iter().any(|&u2| next.contains(&(t2, u2))))
    })
}

fn matches_right(g: &LtssGraph, rel: &TransRel, v: TransId, w: TransId, next: &TransRel) -> bool {
    rel.iter().all(|&(t, u)| {
        let st = g.successors(t, v);
        g.successors(u, w)
            .iter()
            .all(|&u2| st.iter().any(|&t2| next.contains(&(t2, u2))))
    })
}

/// Whether `next` may serve as `R'` for the step `v R w` out of a triple
/// with relation `rel`.
pub fn is_step_match(
    g: &LtssGraph,
    rel: &TransRel,
    v: TransId,
    w: TransId,
    next: &TransRel,
) -> bool {
    matches_left(g, rel, v, w, next) && matches_right(g, rel, v, w, next)
}

/// Checks every triple against the definition and reports the first
/// violation in triple order.
pub fn validate_witness(g: &LtssGraph, w: &Witness) -> Result<(), Violation> {
    for tr in &w.triples {
        let fail = |item, pair| {
            Err(Violation {
                triple: tr.clone(),
                item,
                pair,
            })
        };
        let en_p = g.enabled(tr.p);
        let en_q = g.enabled(tr.q);
        for &(t, u) in &tr.rel {
            if !en_p.contains(&t) || !en_q.contains(&u) {
                return fail(Item::Typing, Some((t, u)));
            }
        }
        for &t in en_p {
            if !tr.rel.iter().any(|&(x, _)| x == t) {
                return fail(Item::OneA, None);
            }
        }
        for &u in en_q {
            if !tr.rel.iter().any(|&(_, y)| y == u) {
                return fail(Item::OneB, None);
            }
        }
        for &(t, u) in &tr.rel {
            if g.label(t) != g.label(u) {
                return fail(Item::OneC, Some((t, u)));
            }
        }
        for &(v, wt) in &tr.rel {
            let mut candidates = w.at(g.target(v), g.target(wt)).peekable();
            if candidates.peek().is_none() {
                return fail(Item::Two, Some((v, wt)));
            }
            let mut left_ok = false;
            let mut found = false;
            for next in candidates {
                let l = matches_left(g, &tr.rel, v, wt, &next.rel);
                left_ok |= l;
                if l && matches_right(g, &tr.rel, v, wt, &next.rel) {
                    found = true;
                    break;
                }
            }
            if !found {
                return fail(if left_ok { Item::TwoB } else { Item::TwoA }, Some((v, wt)));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("not an ep-bisimulation: {0}")]
    NotABisimulation(Violation),
}

pub fn invert_witness(g: &LtssGraph, w: &Witness) -> Result<Witness, WitnessError> {
    validate_witness(g, w).map_err(WitnessError::NotABisimulation)?;
    Ok(w.invert())
}

pub fn compose_witness(g: &LtssGraph, w1: &Witness, w2: &Witness) -> Result<Witness, WitnessError> {
    validate_witness(g, w1).map_err(WitnessError::NotABisimulation)?;
    validate_witness(g, w2).map_err(WitnessError::NotABisimulation)?;
    Ok(w1.compose(w2))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EpError {
    #[error("state {state} enables {count} transitions labelled {label}, more than the limit of {limit}")]
    TooManyEnabled {
        state: u32,
        label: Label,
        count: usize,
        limit: usize,
    },
    #[error("states {p} and {q} admit more than {limit} candidate relations")]
    TooManyRelations { p: u32, q: u32, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureStep {
    /// Some transition has no partner with the same label and a strongly
    /// bisimilar target, so no relation can satisfy the matching and label
    /// conditions.
    NoRelation { p: StateId, q: StateId },
    /// `rel` was discarded because the step `v R w` has no viable
    /// continuation; `item` is the clause that could not be met.
    Pruned {
        p: StateId,
        q: StateId,
        rel: TransRel,
        v: TransId,
        w: TransId,
        item: Item,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FailureTrace {
    pub steps: Vec<FailureStep>,
}

impl FailureTrace {
    pub fn to_structured(&self, g: &LtssGraph) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "failure {} steps", self.steps.len());
        for step in &self.steps {
            match step {
                FailureStep::NoRelation { p, q } => {
                    let _ = writeln!(
                        out,
                        "not-bisimilar {} {} {} ~ {}",
                        p.0,
                        q.0,
                        g.state(*p),
                        g.state(*q)
                    );
                }
                FailureStep::Pruned {
                    p,
                    q,
                    rel,
                    v,
                    w,
                    item,
                } => {
                    let _ = writeln!(
                        out,
                        "pruned {} {} item {} at {} ~ {}",
                        p.0,
                        q.0,
                        item,
                        g.derivation(*v),
                        g.derivation(*w)
                    );
                    for &(t, u) in rel {
                        let _ = writeln!(out, "  {} ~ {}", g.derivation(t), g.derivation(u));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpVerdict {
    Equivalent(Witness),
    Inequivalent(FailureTrace),
}

impl EpVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EpVerdict::Equivalent(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            EpVerdict::Equivalent(w) => Some(w),
            EpVerdict::Inequivalent(_) => None,
        }
    }
}

struct Cand {
    bits: FixedBitSet,
    pairs: Vec<(TransId, TransId)>,
}

struct Prune {
    v: TransId,
    w: TransId,
    item: Item,
}

/// Successor requirements that a relation `R'` at a target pair has to
/// meet: for each entry, `R'` must be total in both directions between the
/// two position lists it names.
type Requirement = Vec<(u32, u32)>;

/// One obligation of a candidate: the step pair `(v, w)` leads to the pair
/// with index `target`, where some live relation has to meet requirement
/// number `req`.
struct Obligation {
    v: TransId,
    w: TransId,
    target: usize,
    req: usize,
}

/// Scan position in the candidate list of a pair for one requirement.
/// Candidates before it fail the requirement or are dead for good.
#[derive(Clone, Copy, Default)]
struct Cursor(usize);

struct Solver<'g> {
    g: &'g LtssGraph,
    /// Index of each transition within the enabled list of its source.
    pos: Vec<usize>,
    pairs: Vec<(StateId, StateId)>,
    pair_index: HashMap<(StateId, StateId), usize>,
    cands: Vec<Vec<Cand>>,
    alive: Vec<Vec<bool>>,
    pruned: HashMap<(usize, usize), Prune>,
    /// Pairs left without candidates by the successor shape check, with
    /// the relation that would have been tried first and why it fails.
    defects: HashMap<usize, (TransRel, Prune)>,
    obligations: Vec<Vec<Vec<Obligation>>>,
    reqs: Vec<Requirement>,
    /// Candidates with an obligation at each pair.
    dependents: Vec<Vec<(usize, usize)>>,
    cursors: HashMap<(usize, usize), Cursor>,
    /// Interned lists of enabled positions; entry 0 is the empty list.
    lists: Vec<Vec<usize>>,
    list_ids: HashMap<Vec<usize>, u32>,
    tables: Vec<Option<Vec<Vec<u32>>>>,
}

/// Relations made of cells `(i, j)` drawn from the groups, total in both
/// directions within every group, using only `allowed` cells and only
/// pairwise `compatible` ones. Fails once more than `cap` have been found.
fn consistent_relations(
    groups: &[(Vec<usize>, Vec<usize>)],
    allowed: &dyn Fn(usize, usize) -> bool,
    compatible: &dyn Fn((usize, usize), (usize, usize)) -> bool,
    cap: usize,
) -> Option<Vec<Vec<(usize, usize)>>> {
    struct Search<'a> {
        cells: Vec<(usize, usize)>,
        /// For the last cell of a row, its row; for the last cell of a
        /// group, the group.
        row_end: Vec<Option<usize>>,
        group_end: Vec<Option<usize>>,
        groups: &'a [(Vec<usize>, Vec<usize>)],
        compatible: &'a dyn Fn((usize, usize), (usize, usize)) -> bool,
        cap: usize,
        chosen: Vec<(usize, usize)>,
        row_count: Vec<usize>,
        col_count: Vec<usize>,
        out: Vec<Vec<(usize, usize)>>,
    }

    impl Search<'_> {
        fn closes(&self, k: usize) -> bool {
            if let Some(i) = self.row_end[k] {
                if self.row_count[i] == 0 {
                    return false;
                }
            }
            match self.group_end[k] {
                Some(gi) => self.groups[gi].1.iter().all(|&j| self.col_count[j] > 0),
                None => true,
            }
        }

        fn go(&mut self, k: usize) -> bool {
            if k == self.cells.len() {
                if self.out.len() == self.cap {
                    return false;
                }
                self.out.push(self.chosen.clone());
                return true;
            }
            let (i, j) = self.cells[k];
            if self.chosen.iter().all(|&c| (self.compatible)(c, (i, j))) {
                self.chosen.push((i, j));
                self.row_count[i] += 1;
                self.col_count[j] += 1;
                let ok = !self.closes(k) || self.go(k + 1);
                self.chosen.pop();
                self.row_count[i] -= 1;
                self.col_count[j] -= 1;
                if !ok {
                    return false;
                }
            }
            !self.closes(k) || self.go(k + 1)
        }
    }

    let mut cells = Vec::new();
    let mut row_end = Vec::new();
    let mut group_end = Vec::new();
    for (gi, (left, right)) in groups.iter().enumerate() {
        let group_start = cells.len();
        for &i in left {
            let row: Vec<(usize, usize)> = right
                .iter()
                .filter(|&&j| allowed(i, j))
                .map(|&j| (i, j))
                .collect();
            if row.is_empty() {
                return Some(Vec::new());
            }
            row_end.extend(std::iter::repeat_n(None, row.len() - 1));
            row_end.push(Some(i));
            cells.extend(row);
        }
        if right
            .iter()
            .any(|&j| !cells[group_start..].iter().any(|c| c.1 == j))
        {
            return Some(Vec::new());
        }
        group_end.extend(std::iter::repeat_n(None, cells.len() - group_start - 1));
        group_end.push(Some(gi));
    }
    let rows = groups
        .iter()
        .flat_map(|g| g.0.iter())
        .max()
        .map_or(0, |m| m + 1);
    let cols = groups
        .iter()
        .flat_map(|g| g.1.iter())
        .max()
        .map_or(0, |m| m + 1);
    let mut search = Search {
        cells,
        row_end,
        group_end,
        groups,
        compatible,
        cap,
        chosen: Vec::new(),
        row_count: vec![0; rows],
        col_count: vec![0; cols],
        out: Vec::new(),
    };
    search.go(0).then_some(search.out)
}

impl<'g> Solver<'g> {
    fn new(g: &'g LtssGraph) -> Self {
        let mut pos = vec![0; g.num_transitions()];
        for s in g.states() {
            for (i, &t) in g.enabled(s).iter().enumerate() {
                pos[t.index()] = i;
            }
        }
        Solver {
            g,
            pos,
            pairs: Vec::new(),
            pair_index: HashMap::new(),
            cands: Vec::new(),
            alive: Vec::new(),
            pruned: HashMap::new(),
            defects: HashMap::new(),
            obligations: Vec::new(),
            reqs: Vec::new(),
            dependents: Vec::new(),
            cursors: HashMap::new(),
            lists: vec![Vec::new()],
            list_ids: HashMap::from([(Vec::new(), 0)]),
            tables: vec![None; g.num_states()],
        }
    }

    /// The relations worth considering at `(p, q)`. When there are none
    /// although every transition has a possible partner, also returns the
    /// relation pairing all possible partners together with its defect.
    fn candidates(
        &self,
        block: &[usize],
        p: StateId,
        q: StateId,
        limits: &Limits,
    ) -> Result<(Vec<Cand>, Option<(TransRel, Prune)>), EpError> {
        let g = self.g;
        let (en_p, en_q) = (g.enabled(p), g.enabled(q));
        for (s, en) in [(p, en_p), (q, en_q)] {
            let mut per_label: BTreeMap<&Label, usize> = BTreeMap::new();
            for &t in en {
                *per_label.entry(g.label(t)).or_default() += 1;
            }
            if let Some((label, &count)) = per_label
                .iter()
                .find(|(_, &c)| c > limits.max_enabled_per_label)
            {
                return Err(EpError::TooManyEnabled {
                    state: s.0,
                    label: (*label).clone(),
                    count,
                    limit: limits.max_enabled_per_label,
                });
            }
        }
        // transitions can only be related if their targets may turn out
        // ep-bisimilar, which requires strong bisimilarity
        let mut groups: BTreeMap<(&Label, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (i, &t) in en_p.iter().enumerate() {
            groups
                .entry((g.label(t), block[g.target(t).index()]))
                .or_default()
                .0
                .push(i);
        }
        for (j, &u) in en_q.iter().enumerate() {
            groups
                .entry((g.label(u), block[g.target(u).index()]))
                .or_default()
                .1
                .push(j);
        }
        if groups
            .values()
            .any(|(left, right)| left.is_empty() || right.is_empty())
        {
            return Ok((Vec::new(), None));
        }
        // related pairs must agree on what each other's successors look like,
        // or no relation at the target pair can match them
        let shapes = |en: &[TransId]| -> Vec<Vec<BTreeSet<(&Label, usize)>>> {
            en.iter()
                .map(|&t| {
                    en.iter()
                        .map(|&v| {
                            g.successors(t, v)
                                .iter()
                                .map(|&x| (g.label(x), block[g.target(x).index()]))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };
        let (sp, sq) = (shapes(en_p), shapes(en_q));
        let allowed = |i: usize, j: usize| sp[i][i] == sq[j][j];
        let compatible = |(i, j): (usize, usize), (k, l): (usize, usize)| {
            sp[i][k] == sq[j][l] && sp[k][i] == sq[l][j]
        };
        let groups: Vec<(Vec<usize>, Vec<usize>)> = groups.into_values().collect();
        let rels = consistent_relations(
            &groups,
            &allowed,
            &compatible,
            limits.max_relations_per_pair,
        )
        .ok_or(EpError::TooManyRelations {
            p: p.0,
            q: q.0,
            limit: limits.max_relations_per_pair,
        })?;
        if rels.is_empty() {
            let full: Vec<(usize, usize)> = groups
                .iter()
                .flat_map(|(l, r)| l.iter().flat_map(move |&i| r.iter().map(move |&j| (i, j))))
                .collect();
            let rel: TransRel = full.iter().map(|&(i, j)| (en_p[i], en_q[j])).collect();
            let defect = full.iter().find_map(|&(i, j)| {
                full.iter().find_map(|&(k, l)| {
                    let item = |a: &BTreeSet<_>, b: &BTreeSet<_>| {
                        if a.is_subset(b) {
                            Item::TwoB
                        } else {
                            Item::TwoA
                        }
                    };
                    if sp[i][k] != sq[j][l] {
                        Some(Prune {
                            v: en_p[k],
                            w: en_q[l],
                            item: item(&sp[i][k], &sq[j][l]),
                        })
                    } else if sp[k][i] != sq[l][j] {
                        Some(Prune {
                            v: en_p[i],
                            w: en_q[j],
                            item: item(&sp[k][i], &sq[l][j]),
                        })
                    } else {
                        None
                    }
                })
            });
            return Ok((Vec::new(), defect.map(|d| (rel, d))));
        }
        let m = en_q.len();
        let cands = rels
            .into_iter()
            .map(|mut idx| {
                idx.sort_unstable();
                let mut bits = FixedBitSet::with_capacity(en_p.len() * m);
                for &(i, j) in &idx {
                    bits.insert(i * m + j);
                }
                Cand {
                    bits,
                    pairs: idx.into_iter().map(|(i, j)| (en_p[i], en_q[j])).collect(),
                }
            })
            .collect();
        Ok((cands, None))
    }

    fn explore(
        &mut self,
        block: &[usize],
        root: (StateId, StateId),
        limits: &Limits,
    ) -> Result<(), EpError> {
        let g = self.g;
        let mut queue = VecDeque::from([root]);
        self.pair_index.insert(root, 0);
        self.pairs.push(root);
        while let Some((p, q)) = queue.pop_front() {
            let (cands, defect) = self.candidates(block, p, q, limits)?;
            if let Some(d) = defect {
                self.defects.insert(self.cands.len(), d);
            }
            let mut targets = BTreeSet::new();
            for c in &cands {
                for &(v, w) in &c.pairs {
                    targets.insert((g.target(v), g.target(w)));
                }
            }
            self.alive.push(vec![true; cands.len()]);
            self.cands.push(cands);
            for pair in targets {
                if !self.pair_index.contains_key(&pair) {
                    self.pair_index.insert(pair, self.pairs.len());
                    self.pairs.push(pair);
                    queue.push_back(pair);
                }
            }
        }
        Ok(())
    }

    /// Fills in the successor table of `s`: entry `[i][k]` names the list
    /// of positions of the successors of the `i`-th enabled transition after
    /// the `k`-th.
    fn ensure_table(&mut self, s: StateId) {
        if self.tables[s.index()].is_some() {
            return;
        }
        let g = self.g;
        let en = g.enabled(s);
        let mut table = Vec::with_capacity(en.len());
        for &t in en {
            let mut row = Vec::with_capacity(en.len());
            for &v in en {
                let mut l: Vec<usize> = g
                    .successors(t, v)
                    .iter()
                    .map(|x| self.pos[x.index()])
                    .collect();
                l.sort_unstable();
                let next = self.lists.len() as u32;
                let id = *self.list_ids.entry(l.clone()).or_insert(next);
                if id == next {
                    self.lists.push(l);
                }
                row.push(id);
            }
            table.push(row);
        }
        self.tables[s.index()] = Some(table);
    }

    fn meets_left(&self, req: &Requirement, bits: &FixedBitSet, m: usize) -> bool {
        req.iter().all(|&(a, b)| {
            let right = &self.lists[b as usize];
            self.lists[a as usize]
                .iter()
                .all(|&i| right.iter().any(|&j| bits.contains(i * m + j)))
        })
    }

    fn meets_right(&self, req: &Requirement, bits: &FixedBitSet, m: usize) -> bool {
        req.iter().all(|&(a, b)| {
            let left = &self.lists[a as usize];
            self.lists[b as usize]
                .iter()
                .all(|&j| left.iter().any(|&i| bits.contains(i * m + j)))
        })
    }

    fn width(&self, pair: usize) -> usize {
        self.g.enabled(self.pairs[pair].1).len()
    }

    fn target_pair(&self, v: TransId, w: TransId) -> usize {
        self.pair_index[&(self.g.target(v), self.g.target(w))]
    }

    /// Interns the requirement of every candidate step and records which
    /// candidates depend on which pairs.
    fn link(&mut self) {
        for pi in 0..self.pairs.len() {
            let (p, q) = self.pairs[pi];
            self.ensure_table(p);
            self.ensure_table(q);
        }
        let mut interned: HashMap<Requirement, usize> = HashMap::new();
        let mut obligations = Vec::with_capacity(self.pairs.len());
        let mut dependents = vec![Vec::new(); self.pairs.len()];
        for pi in 0..self.pairs.len() {
            let (p, q) = self.pairs[pi];
            let (tp, tq) = (
                self.tables[p.index()].as_ref().unwrap(),
                self.tables[q.index()].as_ref().unwrap(),
            );
            let mut per_cand = Vec::with_capacity(self.cands[pi].len());
            for (ci, c) in self.cands[pi].iter().enumerate() {
                let idx: Vec<(usize, usize)> = c
                    .pairs
                    .iter()
                    .map(|&(t, u)| (self.pos[t.index()], self.pos[u.index()]))
                    .collect();
                let mut obs = Vec::with_capacity(c.pairs.len());
                for (&(v, w), &(k, l)) in c.pairs.iter().zip(&idx) {
                    let target = self.pair_index[&(self.g.target(v), self.g.target(w))];
                    let mut r: Requirement = idx
                        .iter()
                        .map(|&(i, j)| (tp[i][k], tq[j][l]))
                        .filter(|&e| e != (0, 0))
                        .collect();
                    r.sort_unstable();
                    r.dedup();
                    let next = interned.len();
                    let req = *interned.entry(r).or_insert(next);
                    if dependents[target].last() != Some(&(pi, ci)) {
                        dependents[target].push((pi, ci));
                    }
                    obs.push(Obligation { v, w, target, req });
                }
                per_cand.push(obs);
            }
            obligations.push(per_cand);
        }
        self.reqs = vec![Vec::new(); interned.len()];
        for (r, i) in interned {
            self.reqs[i] = r;
        }
        self.obligations = obligations;
        self.dependents = dependents;
    }

    fn meets(&self, pair: usize, ci: usize, req: &Requirement) -> bool {
        let m = self.width(pair);
        let bits = &self.cands[pair][ci].bits;
        self.meets_left(req, bits, m) && self.meets_right(req, bits, m)
    }

    /// First live candidate at `pair` meeting requirement `req`, resuming
    /// the previous scan.
    fn find_match(&mut self, pair: usize, req: usize) -> Option<usize> {
        let start = self
            .cursors
            .get(&(pair, req))
            .copied()
            .unwrap_or_default()
            .0;
        let found = (start..self.cands[pair].len())
            .find(|&ci| self.alive[pair][ci] && self.meets(pair, ci, &self.reqs[req]));
        self.cursors
            .insert((pair, req), Cursor(found.unwrap_or(self.cands[pair].len())));
        found
    }

    /// The clause that no live candidate at `pair` can meet.
    fn unmet_item(&self, pair: usize, req: usize) -> Item {
        let m = self.width(pair);
        let left_ok = (0..self.cands[pair].len()).any(|ci| {
            self.alive[pair][ci] && self.meets_left(&self.reqs[req], &self.cands[pair][ci].bits, m)
        });
        if left_ok {
            Item::TwoB
        } else {
            Item::TwoA
        }
    }

    fn prune(&mut self) {
        let mut queued: Vec<Vec<bool>> = self.cands.iter().map(|cs| vec![true; cs.len()]).collect();
        let mut queue: VecDeque<(usize, usize)> = (0..self.pairs.len())
            .flat_map(|pi| (0..self.cands[pi].len()).map(move |ci| (pi, ci)))
            .collect();
        while let Some((pi, ci)) = queue.pop_front() {
            queued[pi][ci] = false;
            if !self.alive[pi][ci] {
                continue;
            }
            let mut failure = None;
            for k in 0..self.obligations[pi][ci].len() {
                let Obligation { v, w, target, req } = self.obligations[pi][ci][k];
                if self.find_match(target, req).is_none() {
                    failure = Some(Prune {
                        v,
                        w,
                        item: self.unmet_item(target, req),
                    });
                    break;
                }
            }
            if let Some(p) = failure {
                self.alive[pi][ci] = false;
                self.pruned.insert((pi, ci), p);
                for &(pj, cj) in &self.dependents[pi] {
                    if self.alive[pj][cj] && !queued[pj][cj] {
                        queued[pj][cj] = true;
                        queue.push_back((pj, cj));
                    }
                }
            }
        }
    }

    fn triple(&self, pi: usize, ci: usize) -> EpTriple {
        let (p, q) = self.pairs[pi];
        EpTriple {
            p,
            q,
            rel: self.cands[pi][ci].pairs.iter().copied().collect(),
        }
    }

    fn witness(&self) -> Witness {
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        for ci in 0..self.cands[0].len() {
            if self.alive[0][ci] {
                seen.insert((0, ci));
                queue.push_back((0, ci));
            }
        }
        let mut triples = BTreeSet::new();
        let mut matches: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        while let Some((pi, ci)) = queue.pop_front() {
            triples.insert(self.triple(pi, ci));
            for ob in &self.obligations[pi][ci] {
                let matching = matches.entry((ob.target, ob.req)).or_insert_with(|| {
                    let req = &self.reqs[ob.req];
                    (0..self.cands[ob.target].len())
                        .filter(|&cj| self.alive[ob.target][cj] && self.meets(ob.target, cj, req))
                        .collect()
                });
                for &cj in matching.iter() {
                    if seen.insert((ob.target, cj)) {
                        queue.push_back((ob.target, cj));
                    }
                }
            }
        }
        Witness { triples }
    }

    /// Follows the first discarded relation at each pair, starting at the
    /// root, until a pair with no relations at all or one already visited.
    fn failure(&self) -> FailureTrace {
        let mut steps = Vec::new();
        let mut visited = HashSet::new();
        let mut pi = 0;
        while visited.insert(pi) {
            let (p, q) = self.pairs[pi];
            if self.cands[pi].is_empty() {
                steps.push(match self.defects.get(&pi) {
                    Some((rel, pr)) => FailureStep::Pruned {
                        p,
                        q,
                        rel: rel.clone(),
                        v: pr.v,
                        w: pr.w,
                        item: pr.item,
                    },
                    None => FailureStep::NoRelation { p, q },
                });
                break;
            }
            let Some(ci) = (0..self.cands[pi].len()).find(|&ci| !self.alive[pi][ci]) else {
                break;
            };
            let pr = &self.pruned[&(pi, ci)];
            steps.push(FailureStep::Pruned {
                p,
                q,
                rel: self.cands[pi][ci].pairs.iter().copied().collect(),
                v: pr.v,
                w: pr.w,
                item: pr.item,
            });
            pi = self.target_pair(pr.v, pr.w);
            if self.alive[pi].iter().any(|&a| a) {
                break;
            }
        }
        FailureTrace { steps }
    }
}

/// Decides `p ≈ q` for ep-bisimilarity. An equivalent verdict carries the
/// triples reachable from the root pair in the greatest ep-bisimulation.
pub fn check_ep_bisim(
    g: &LtssGraph,
    p: StateId,
    q: StateId,
    limits: &Limits,
) -> Result<EpVerdict, EpError> {
    let block = strong_partition(g);
    if block[p.index()] != block[q.index()] {
        return Ok(EpVerdict::Inequivalent(FailureTrace {
            steps: vec![FailureStep::NoRelation { p, q }],
        }));
    }
    let mut solver = Solver::new(g);
    solver.explore(&block, (p, q), limits)?;
    solver.link();
    solver.prune();
    if solver.alive[0].iter().any(|&a| a) {
        Ok(EpVerdict::Equivalent(solver.witness()))
    } else {
        Ok(EpVerdict::Inequivalent(solver.failure()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error(transparent)]
    InvalidLasso(#[from] LtssError),
    #[error("no triple of the witness covers state {0}")]
    Uncovered(u32),
    #[error("the witness has no match for step {0}")]
    Stuck(usize),
}

/// A lasso together with a matching lasso across a witness. `source` is
/// the original path, unrolled so that both lassos have the same shape;
/// `relations[i]` is the relation used at position `i`, and position
/// `positions()` wraps around to `source.prefix.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub source: Lasso,
    pub target: Lasso,
    pub relations: Vec<TransRel>,
}

/// Walks `pi` and picks, at each step, the first matching transition and
/// the first suitable triple of `w`. Stops once a position in the cycle is
/// revisited with the same right-hand state and relation.
pub fn transfer_lasso(g: &LtssGraph, w: &Witness, pi: &Lasso) -> Result<Transfer, TransferError> {
    g.check_lasso(pi)?;
    let first = w
        .triples
        .iter()
        .find(|tr| tr.p == pi.start)
        .ok_or(TransferError::Uncovered(pi.start.0))?;
    let q0 = first.q;
    let mut q = first.q;
    let mut rel = first.rel.clone();
    let mut seen: HashMap<(usize, StateId, TransRel), usize> = HashMap::new();
    let mut steps = Vec::new();
    let mut relations = Vec::new();
    let mut i = 0;
    loop {
        if let Some(cp) = pi.cycle_position(i) {
            if let Some(&k) = seen.get(&(cp, q, rel.clone())) {
                let unrolled: Vec<TransId> = (0..i).map(|j| pi.step(j)).collect();
                return Ok(Transfer {
                    source: Lasso {
                        start: pi.start,
                        prefix: unrolled[..k].to_vec(),
                        cycle: unrolled[k..].to_vec(),
                    },
                    target: Lasso {
                        start: q0,
                        prefix: steps[..k].to_vec(),
                        cycle: steps[k..].to_vec(),
                    },
                    relations,
                });
            }
            seen.insert((cp, q, rel.clone()), i);
        }
        let u = pi.step(i);
        let mut chosen = None;
        'search: for &(_, wt) in rel.range((u, TransId(0))..).take_while(|(x, _)| *x == u) {
            for next in w.at(g.target(u), g.target(wt)) {
                if is_step_match(g, &rel, u, wt, &next.rel) {
                    chosen = Some((wt, next.rel.clone()));
                    break 'search;
                }
            }
        }
        let (wt, next) = chosen.ok_or(TransferError::Stuck(i))?;
        steps.push(wt);
        relations.push(rel);
        q = g.target(wt);
        rel = next;
        i += 1;
    }
}

/// Checks that two lassos of equal shape are related by `w` through the
/// given relations, step by step.
pub fn check_path_relation(g: &LtssGraph, w: &Witness, t: &Transfer) -> Result<(), String> {
    let (src, tgt) = (&t.source, &t.target);
    let n = src.positions();
    if tgt.prefix.len() != src.prefix.len()
        || tgt.cycle.len() != src.cycle.len()
        || t.relations.len() != n
    {
        return Err("lasso shapes differ".into());
    }
    g.check_lasso(src).map_err(|e| e.to_string())?;
    g.check_lasso(tgt).map_err(|e| e.to_string())?;
    let rel_at = |i: usize| {
        if i < n {
            &t.relations[i]
        } else {
            &t.relations[src.prefix.len()]
        }
    };
    for i in 0..n {
        let (p, q) = (src.state_at(g, i), tgt.state_at(g, i));
        if !w.triples.contains(&EpTriple {
            p,
            q,
            rel: rel_at(i).clone(),
        }) {
            return Err(format!("position {i}: triple not in witness"));
        }
        let (u, u2) = (src.step(i), tgt.step(i));
        if !rel_at(i).contains(&(u, u2)) {
            return Err(format!("position {i}: steps not related"));
        }
        if !is_step_match(g, rel_at(i), u, u2, rel_at(i + 1)) {
            return Err(format!("position {i}: successors not matched"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use std::sync::Arc;

    const ENCODINGS: &str = "handshake x, y;
        L := y.L + x.L2;
        L2 := y.L2;
        R := Yl | x.0;
        Yl := y.Yl;";

    fn graph(src: &str, terms: &[&str]) -> (LtssGraph, Vec<StateId>) {
        let doc = parse(src).unwrap();
        let ps: Vec<_> = terms
            .iter()
            .map(|t| doc.parse_process(t).unwrap())
            .collect();
        let g = LtssGraph::explore(&ps, Arc::new(doc.decls), 1000).unwrap();
        let roots = g.roots().to_vec();
        (g, roots)
    }

    #[test]
    fn encodings_strong_but_not_ep() {
        let (g, r) = graph(ENCODINGS, &["L", "R"]);
        assert_eq!(
            check_strong_bisim(&g, r[0], r[1]),
            StrongVerdict::Equivalent
        );
        let v = check_ep_bisim(&g, r[0], r[1], &Limits::default()).unwrap();
        let EpVerdict::Inequivalent(trace) = v else {
            panic!("expected inequivalent")
        };
        assert!(matches!(trace.steps[0], FailureStep::Pruned { .. }));
    }

    #[test]
    fn trivial_inequivalence() {
        let (g, r) = graph("handshake a;", &["a.0", "a.a.0"]);
        assert_eq!(
            check_strong_bisim(&g, r[0], r[1]),
            StrongVerdict::Inequivalent { p: r[0], q: r[1] }
        );
        let v = check_ep_bisim(&g, r[0], r[1], &Limits::default()).unwrap();
        assert_eq!(
            v,
            EpVerdict::Inequivalent(FailureTrace {
                steps: vec![FailureStep::NoRelation { p: r[0], q: r[1] }]
            })
        );
    }

    #[test]
    fn reflexive_with_identity() {
        let (g, r) = graph(ENCODINGS, &["R"]);
        let v = check_ep_bisim(&g, r[0], r[0], &Limits::default()).unwrap();
        let w = v.witness().unwrap();
        assert!(w.triples.contains(
            &Witness::identity(&g, r[0])
                .triples
                .iter()
                .next()
                .unwrap()
                .clone()
        ));
        validate_witness(&g, w).unwrap();
        validate_witness(&g, &Witness::identity(&g, r[0])).unwrap();
    }

    #[test]
    fn choice_is_associative_and_commutative() {
        let src = "handshake a, c, d; broadcast b;";
        let (g, r) = graph(
            src,
            &[
                "(a.0 + c.0) + b?.d.0",
                "a.0 + (c.0 + b?.d.0)",
                "b?.d.0 + (c.0 + a.0)",
            ],
        );
        for (x, y) in [(0, 1), (1, 2), (0, 2)] {
            let v = check_ep_bisim(&g, r[x], r[y], &Limits::default()).unwrap();
            validate_witness(&g, v.witness().expect("equivalent")).unwrap();
        }
    }

    #[test]
    fn parallel_is_commutative() {
        let src = "handshake a, c; broadcast b; signal s;";
        let (g, r) = graph(
            src,
            &[
                "(a.b!.0)^s | (s.'a.0 + b?.c.0)",
                "(s.'a.0 + b?.c.0) | (a.b!.0)^s",
            ],
        );
        let v = check_ep_bisim(&g, r[0], r[1], &Limits::default()).unwrap();
        let w = v.witness().expect("equivalent");
        validate_witness(&g, w).unwrap();
        validate_witness(&g, &w.invert()).unwrap();
        assert_eq!(w.invert().invert(), *w);
    }

    #[test]
    fn compose_and_union_validate() {
        let src = "handshake a, c, d;";
        let (g, r) = graph(
            src,
            &[
                "a.0 | c.d.0",
                "c.d.0 | a.0",
                "(a.0 | c.d.0) + (a.0 | c.d.0)",
            ],
        );
        let limits = Limits::default();
        let w1 = check_ep_bisim(&g, r[0], r[1], &limits)
            .unwrap()
            .witness()
            .unwrap()
            .clone();
        let w2 = check_ep_bisim(&g, r[1], r[0], &limits)
            .unwrap()
            .witness()
            .unwrap()
            .clone();
        let c = compose_witness(&g, &w1, &w2).unwrap();
        validate_witness(&g, &c).unwrap();
        assert!(c.covers(r[0], r[0]));
        validate_witness(&g, &w1.union(&w2)).unwrap();
        let id = Witness::identity(&g, r[1]);
        assert_eq!(w1.compose(&id), w1);
    }

    #[test]
    fn mutations_are_caught() {
        let (g, r) = graph("handshake a, c;", &["a.c.0 | c.0", "c.0 | a.c.0"]);
        let w = check_ep_bisim(&g, r[0], r[1], &Limits::default())
            .unwrap()
            .witness()
            .unwrap()
            .clone();
        let victim = w
            .triples
            .iter()
            .find(|tr| tr.rel.len() > 1)
            .unwrap()
            .clone();
        let mut cut = w.clone();
        cut.triples.remove(&victim);
        let mut rel = victim.rel.clone();
        let first = *rel.iter().next().unwrap();
        rel.remove(&first);
        cut.triples.insert(EpTriple {
            rel,
            ..victim.clone()
        });
        let err = validate_witness(&g, &cut).unwrap_err();
        assert!(
            matches!(err.item, Item::OneA | Item::OneB | Item::TwoA | Item::TwoB),
            "{err}"
        );
        let mut swapped = BTreeSet::new();
        for tr in &w.triples {
            swapped.insert(EpTriple {
                p: tr.p,
                q: tr.q,
                rel: BTreeSet::new(),
            });
        }
        let err = validate_witness(&g, &Witness { triples: swapped }).unwrap_err();
        assert_eq!(err.item, Item::OneA);
    }

    #[test]
    fn successor_mismatch_is_2a() {
        // after `a`, the two `c` transitions are matched crosswise, which
        // separates each from its own variant
        let (g, r) = graph("handshake a, c;", &["c.0 | c.0 | a.0"]);
        let w = Witness::identity(&g, r[0]);
        let a = *g
            .enabled(r[0])
            .iter()
            .find(|&&t| g.label(t).to_string() == "a")
            .unwrap();
        let after_a = g.target(a);
        let en = g.enabled(after_a).to_vec();
        assert_eq!(en.len(), 2);
        let crosswise: TransRel = BTreeSet::from([(en[0], en[1]), (en[1], en[0])]);
        let mut triples: BTreeSet<EpTriple> = w
            .triples
            .iter()
            .filter(|tr| tr.p != after_a)
            .cloned()
            .collect();
        triples.insert(EpTriple {
            p: after_a,
            q: after_a,
            rel: crosswise,
        });
        let err = validate_witness(&g, &Witness { triples }).unwrap_err();
        assert_eq!(err.item, Item::TwoA);
        assert_eq!(err.triple.p, r[0]);
        assert_eq!(err.pair, Some((a, a)));
    }

    #[test]
    fn resource_limits() {
        let (g, r) = graph("handshake a;", &["a.0 + a.0 + a.0 + a.0 + a.0 + a.0 + a.0"]);
        let err = check_ep_bisim(&g, r[0], r[0], &Limits::default()).unwrap_err();
        assert!(matches!(err, EpError::TooManyEnabled { count: 7, .. }));
        let tight = Limits {
            max_enabled_per_label: 6,
            max_relations_per_pair: 10,
        };
        let (g, r) = graph("handshake a;", &["a.0 + a.0 + a.0"]);
        assert!(matches!(
            check_ep_bisim(&g, r[0], r[0], &tight),
            Err(EpError::TooManyRelations { .. })
        ));
    }

    #[test]
    fn bitotal_counts() {
        let any = |_: usize, _: usize| true;
        let free = |_: (usize, usize), _: (usize, usize)| true;
        let group = |a: usize, b: usize| vec![((0..a).collect(), (0..b).collect())];
        let count = |a, b| {
            consistent_relations(&group(a, b), &any, &free, usize::MAX)
                .unwrap()
                .len()
        };
        assert_eq!(count(1, 1), 1);
        assert_eq!(count(2, 2), 7);
        assert_eq!(count(2, 3), 25);
        assert_eq!(count(3, 3), 265);
        assert!(consistent_relations(&group(3, 3), &any, &free, 100).is_none());
        let two = vec![(vec![0], vec![0, 1]), (vec![1, 2], vec![2])];
        assert_eq!(
            consistent_relations(&two, &any, &free, usize::MAX)
                .unwrap()
                .len(),
            1
        );
        let diagonal = |i: usize, j: usize| i == j;
        assert_eq!(
            consistent_relations(&group(3, 3), &diagonal, &free, usize::MAX).unwrap(),
            [[(0, 0), (1, 1), (2, 2)]]
        );
        let apart = |a: (usize, usize), b: (usize, usize)| a.0 != b.0 || a == b;
        assert_eq!(
            consistent_relations(&group(2, 2), &any, &apart, usize::MAX)
                .unwrap()
                .len(),
            2
        );
        assert!(
            consistent_relations(&group(2, 1), &diagonal, &free, usize::MAX)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn lasso_transfer_under_identity() {
        let (g, r) = graph(ENCODINGS, &["R"]);
        let y = *g
            .enabled(r[0])
            .iter()
            .find(|&&t| g.label(t).to_string() == "y")
            .unwrap();
        let at = g.target(y);
        let y2 = *g
            .enabled(at)
            .iter()
            .find(|&&t| g.label(t).to_string() == "y")
            .unwrap();
        assert_eq!(g.target(y2), at);
        let pi = Lasso {
            start: r[0],
            prefix: vec![y],
            cycle: vec![y2],
        };
        let w = Witness::identity(&g, r[0]);
        let tr = transfer_lasso(&g, &w, &pi).unwrap();
        assert_eq!(tr.target, pi);
        assert_eq!(tr.source, pi);
        check_path_relation(&g, &w, &tr).unwrap();
    }

    #[test]
    fn lasso_transfer_across_commutativity() {
        let src = "handshake a, c; A := a.A; C := c.C;";
        let (g, r) = graph(src, &["A + C", "C + A"]);
        let w = check_ep_bisim(&g, r[0], r[1], &Limits::default())
            .unwrap()
            .witness()
            .unwrap()
            .clone();
        let a = *g
            .enabled(r[0])
            .iter()
            .find(|&&t| g.label(t).to_string() == "a")
            .unwrap();
        let again = *g.enabled(g.target(a)).first().unwrap();
        let pi = Lasso {
            start: r[0],
            prefix: vec![a],
            cycle: vec![again],
        };
        let tr = transfer_lasso(&g, &w, &pi).unwrap();
        check_path_relation(&g, &w, &tr).unwrap();
        assert_eq!(tr.target.start, r[1]);
        let labels = |l: &Lasso| {
            l.cycle
                .iter()
                .map(|&t| g.label(t).clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(labels(&tr.source), labels(&tr.target));
    }
}
