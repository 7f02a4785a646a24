//! `abcde`: command-line front end for the ABCdE toolkit.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use abcde_core::checks::{oracle_corpus, oracle_graph, run_properties, OracleReport, SweepConfig};
use abcde_core::corpus::generate;
use abcde_core::epbisim::{check_ep_bisim, check_strong_bisim, EpVerdict, Limits, StrongVerdict};
use abcde_core::justness::{check_b_just, check_b_just_finite, BlockingSet};
use abcde_core::ltss::{Lasso, LtssError, LtssGraph, StateId, TransId};
use abcde_core::{check_guarded, parse, Document, Label, Process};
use clap::{Parser, Subcommand};

const EXIT_RESOURCE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;
const EXIT_NO_INPUT: u8 = 66;

const LIMITS_VAR: &str = "ABCDE_LAB_LIMITS";

#[derive(Parser, Debug)]
#[command(
    name = "abcde",
    version,
    about = "Semantics, justness and ep-bisimilarity for ABCdE"
)]
struct Cli {
    /// Maximum number of states explored per graph.
    #[arg(long, global = true)]
    state_limit: Option<usize>,
    /// Maximum number of enabled transitions per state and label class.
    #[arg(long, global = true)]
    max_enabled: Option<usize>,
    /// Maximum number of candidate relations tried per state pair.
    #[arg(long, global = true)]
    max_relations: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a file and report guardedness.
    Check { file: PathBuf },
    /// Explore the reachable states of a term.
    Lts {
        file: PathBuf,
        term: String,
        /// Overrides the state limit for this command.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, conflicts_with = "structured")]
        dot: bool,
        #[arg(long)]
        structured: bool,
    },
    /// List the enabled transitions of a term.
    En { file: PathBuf, term: String },
    /// List every `t ⤳_u v` among the transitions enabled at a term.
    Succ { file: PathBuf, term: String },
    /// Print the concurrency matrix over the enabled transitions of a term.
    Conc { file: PathBuf, term: String },
    /// Decide enabling preserving bisimilarity (exit 0 equivalent, 1 not, 2 resources).
    Epbisim {
        file: PathBuf,
        left: String,
        right: String,
    },
    /// Decide strong bisimilarity.
    Bisim {
        file: PathBuf,
        left: String,
        right: String,
    },
    /// Decide justness of a path given by transition names or labels.
    Just {
        file: PathBuf,
        term: String,
        /// Steps before the cycle, comma separated.
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<String>,
        /// Steps of the cycle, comma separated; omit for a finite path.
        #[arg(long, value_delimiter = ',')]
        cycle: Vec<String>,
        /// Blocking labels, comma separated.
        #[arg(long, value_delimiter = ',')]
        blocking: Vec<String>,
    },
    /// Compare the successor relation against the synchron calculus.
    Oracle {
        /// File whose named terms are checked.
        file: Option<PathBuf>,
        /// Check a generated corpus of this many terms instead.
        #[arg(long, conflicts_with = "file")]
        corpus: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Skip the completeness enumeration for states with more synchrons.
        #[arg(long, default_value_t = 12)]
        max_synchrons: usize,
    },
    /// Run the property suites over a generated corpus.
    Props {
        #[arg(long, default_value_t = 60)]
        corpus: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of consecutive corpus pairs fed to the algebraic laws.
        #[arg(long, default_value_t = 60)]
        pairs: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct RunConfig {
    state_limit: usize,
    limits: Limits,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            state_limit: 10_000,
            limits: Limits::default(),
        }
    }
}

impl RunConfig {
    /// Applies `key=value` pairs separated by commas, as in
    /// `state_limit=500,max_relations_per_pair=1000`.
    fn apply_overrides(&mut self, spec: &str) -> Result<(), String> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let n: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("`{value}` is not a count"))?;
            match key.trim() {
                "state_limit" => self.state_limit = n,
                "max_enabled_per_label" => self.limits.max_enabled_per_label = n,
                "max_relations_per_pair" => self.limits.max_relations_per_pair = n,
                other => return Err(format!("unknown limit `{other}`")),
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), String> {
        if self.state_limit == 0
            || self.limits.max_enabled_per_label == 0
            || self.limits.max_relations_per_pair == 0
        {
            return Err("limits must be positive".into());
        }
        Ok(())
    }

    fn from_cli(cli: &Cli, env: Option<&str>) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        if let Some(spec) = env {
            cfg.apply_overrides(spec)
                .map_err(|e| format!("{LIMITS_VAR}: {e}"))?;
        }
        if let Some(n) = cli.state_limit {
            cfg.state_limit = n;
        }
        if let Some(n) = cli.max_enabled {
            cfg.limits.max_enabled_per_label = n;
        }
        if let Some(n) = cli.max_relations {
            cfg.limits.max_relations_per_pair = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Why a command stopped; each maps to one exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    NoInput(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Parse(_) => EXIT_PARSE,
            Failure::NoInput(_) => EXIT_NO_INPUT,
            Failure::Resource(_) => EXIT_RESOURCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::NoInput(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<LtssError> for Failure {
    fn from(e: LtssError) -> Self {
        match e {
            LtssError::LimitExceeded(_) => Failure::Resource(e.to_string()),
            LtssError::InvalidPath(_) | LtssError::SourceMismatch(..) => {
                Failure::Usage(e.to_string())
            }
            LtssError::Sos(_) => Failure::Parse(e.to_string()),
        }
    }
}

/// Text to print and the exit code of a command that ran to a verdict.
struct Outcome {
    out: String,
    code: u8,
}

impl Outcome {
    fn ok(out: String) -> Self {
        Outcome { out, code: 0 }
    }

    fn verdict(out: String, positive: bool) -> Self {
        Outcome {
            out,
            code: if positive { 0 } else { 1 },
        }
    }
}

fn load(path: &Path) -> Result<Document, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::NoInput(format!("{}: {e}", path.display())))?;
    let doc = parse(&text).map_err(|e| Failure::Parse(format!("{}:{e}", path.display())))?;
    if let Err(vs) = check_guarded(&doc.decls) {
        let lines: Vec<String> = vs
            .iter()
            .map(|v| format!("{}: {v}", path.display()))
            .collect();
        return Err(Failure::Parse(lines.join("\n")));
    }
    Ok(doc)
}

/// A term named in the file, or a process expression over its declarations.
fn resolve(doc: &Document, term: &str) -> Result<Process, Failure> {
    if let Some(p) = doc.state(term) {
        return Ok(p);
    }
    doc.parse_process(term)
        .map_err(|e| Failure::Parse(format!("term `{term}`: {e}")))
}

fn explore(doc: &Document, terms: &[&str], state_limit: usize) -> Result<LtssGraph, Failure> {
    let ps = terms
        .iter()
        .map(|t| resolve(doc, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LtssGraph::explore(
        &ps,
        Arc::new(doc.decls.clone()),
        state_limit,
    )?)
}

/// The transition at `s` named `step`, matched against derivation names
/// first and then, if unambiguous, against labels.
fn find_step(g: &LtssGraph, s: StateId, step: &str) -> Result<TransId, Failure> {
    let en = g.enabled(s);
    if let Some(&t) = en.iter().find(|&&t| g.derivation(t).to_string() == step) {
        return Ok(t);
    }
    let by_label: Vec<TransId> = en
        .iter()
        .copied()
        .filter(|&t| g.label(t).to_string() == step)
        .collect();
    match by_label[..] {
        [t] => Ok(t),
        [] => Err(Failure::Usage(format!(
            "no transition `{step}` at {}",
            g.state(s)
        ))),
        _ => {
            let names: Vec<String> = by_label
                .iter()
                .map(|&t| g.derivation(t).to_string())
                .collect();
            Err(Failure::Usage(format!(
                "label `{step}` at {} is ambiguous: {}",
                g.state(s),
                names.join(", ")
            )))
        }
    }
}

fn find_path(
    g: &LtssGraph,
    start: StateId,
    steps: &[String],
) -> Result<(Vec<TransId>, StateId), Failure> {
    let mut here = start;
    let mut ts = Vec::with_capacity(steps.len());
    for step in steps {
        let t = find_step(g, here, step)?;
        ts.push(t);
        here = g.target(t);
    }
    Ok((ts, here))
}

fn parse_blocking(doc: &Document, labels: &[String]) -> Result<BlockingSet, Failure> {
    let universe = doc.decls.label_universe();
    let mut set = BTreeSet::new();
    for l in labels {
        let found: Option<&Label> = universe.iter().find(|u| u.to_string() == *l);
        set.insert(
            found
                .cloned()
                .ok_or_else(|| Failure::Usage(format!("`{l}` is not a declared label")))?,
        );
    }
    Ok(BlockingSet { labels: set })
}

fn cmd_check(doc: &Document) -> Outcome {
    let d = &doc.decls;
    let mut out = String::new();
    let _ = writeln!(out, "handshake {}", d.handshake.len());
    let _ = writeln!(out, "broadcast {}", d.broadcast.len());
    let _ = writeln!(out, "signal {}", d.signal.len());
    let _ = writeln!(out, "definitions {}", doc.terms.len());
    for (name, _) in &doc.terms {
        let _ = writeln!(out, "definition {name}");
    }
    out.push_str("guarded\n");
    Outcome::ok(out)
}

fn cmd_en(g: &LtssGraph) -> Outcome {
    let mut out = String::new();
    let en = g.enabled(g.root());
    let _ = writeln!(out, "enabled {}", en.len());
    for &t in en {
        let _ = writeln!(
            out,
            "{} : {} -> {}",
            g.derivation(t),
            g.label(t),
            g.state(g.target(t))
        );
    }
    Outcome::ok(out)
}

fn cmd_succ(g: &LtssGraph) -> Outcome {
    let en = g.enabled(g.root());
    let mut out = String::new();
    for (i, &t) in en.iter().enumerate() {
        let _ = writeln!(out, "t{i} {}", g.derivation(t));
    }
    for (i, &t) in en.iter().enumerate() {
        for (j, &u) in en.iter().enumerate() {
            let vs = g.successors(t, u);
            let names: Vec<String> = vs.iter().map(|&v| g.derivation(v).to_string()).collect();
            let shown = if names.is_empty() {
                "none".to_string()
            } else {
                names.join(" ; ")
            };
            let _ = writeln!(out, "t{i} after t{j}: {shown}");
        }
    }
    Outcome::ok(out)
}

fn cmd_conc(g: &LtssGraph) -> Outcome {
    let en = g.enabled(g.root());
    let mut out = String::new();
    for (i, &t) in en.iter().enumerate() {
        let _ = writeln!(out, "t{i} {}", g.derivation(t));
    }
    for &t in en {
        let row: String = en
            .iter()
            .map(|&u| if g.aconc(t, u) { '1' } else { '0' })
            .collect();
        let _ = writeln!(out, "{row}");
    }
    Outcome::ok(out)
}

fn cmd_epbisim(g: &LtssGraph, limits: &Limits) -> Result<Outcome, Failure> {
    let (p, q) = (g.roots()[0], g.roots()[1]);
    let verdict = check_ep_bisim(g, p, q, limits).map_err(|e| Failure::Resource(e.to_string()))?;
    Ok(match verdict {
        EpVerdict::Equivalent(w) => {
            Outcome::verdict(format!("equivalent\n{}", w.to_structured(g)), true)
        }
        EpVerdict::Inequivalent(trace) => {
            Outcome::verdict(format!("inequivalent\n{}", trace.to_structured(g)), false)
        }
    })
}

fn cmd_bisim(g: &LtssGraph) -> Outcome {
    let (p, q) = (g.roots()[0], g.roots()[1]);
    match check_strong_bisim(g, p, q) {
        StrongVerdict::Equivalent => Outcome::verdict("equivalent\n".into(), true),
        StrongVerdict::Inequivalent { p, q } => {
            let out = format!(
                "inequivalent\ndistinguished {} and {}\n",
                g.state(p),
                g.state(q)
            );
            Outcome::verdict(out, false)
        }
    }
}

fn cmd_just(
    g: &LtssGraph,
    prefix: &[String],
    cycle: &[String],
    blocking: &BlockingSet,
) -> Result<Outcome, Failure> {
    let start = g.root();
    let (prefix_ts, loop_start) = find_path(g, start, prefix)?;
    let verdict = if cycle.is_empty() {
        check_b_just_finite(g, start, &prefix_ts, blocking)?
    } else {
        let (cycle_ts, _) = find_path(g, loop_start, cycle)?;
        check_b_just(
            g,
            &Lasso {
                start,
                prefix: prefix_ts,
                cycle: cycle_ts,
            },
            blocking,
        )?
    };
    Ok(Outcome::verdict(
        verdict.to_structured(g),
        verdict.is_just(),
    ))
}

fn oracle_outcome(r: &OracleReport) -> Outcome {
    let mut out = String::new();
    let _ = writeln!(out, "states {}", r.states);
    let _ = writeln!(out, "successor-pairs {}", r.successor_pairs);
    let _ = writeln!(out, "transitions {}", r.transitions);
    let _ = writeln!(out, "complete-states {}", r.complete_states);
    let _ = writeln!(out, "complete-subsets {}", r.complete_subsets);
    let _ = writeln!(out, "complete-skipped {}", r.complete_skipped);
    let _ = writeln!(out, "mismatches {}", r.mismatches.len());
    for m in &r.mismatches {
        let _ = writeln!(out, "mismatch {m}");
    }
    Outcome::verdict(out, r.is_clean())
}

fn cmd_oracle_file(
    doc: &Document,
    cfg: &RunConfig,
    max_synchrons: usize,
) -> Result<Outcome, Failure> {
    let decls = Arc::new(doc.decls.clone());
    let mut report = OracleReport::default();
    for (name, _) in &doc.terms {
        let p = doc.state(name.as_str()).expect("named definition");
        let g = LtssGraph::explore(&[p], decls.clone(), cfg.state_limit)?;
        report.merge(oracle_graph(&g, max_synchrons));
    }
    Ok(oracle_outcome(&report))
}

fn run(cli: Cli, env: Option<&str>) -> Result<Outcome, Failure> {
    let cfg = RunConfig::from_cli(&cli, env).map_err(Failure::Usage)?;
    match cli.cmd {
        Command::Check { file } => Ok(cmd_check(&load(&file)?)),
        Command::Lts {
            file,
            term,
            limit,
            dot,
            structured,
        } => {
            let doc = load(&file)?;
            let limit = limit.unwrap_or(cfg.state_limit);
            if limit == 0 {
                return Err(Failure::Usage("limit must be positive".into()));
            }
            let g = explore(&doc, &[&term], limit)?;
            let out = if dot {
                g.to_dot()
            } else if structured {
                g.to_structured()
            } else {
                let mut out = format!(
                    "states {}\ntransitions {}\n",
                    g.num_states(),
                    g.num_transitions()
                );
                for t in g.transitions() {
                    let _ = writeln!(
                        out,
                        "{} --{}--> {}",
                        g.state(g.source(t)),
                        g.label(t),
                        g.state(g.target(t))
                    );
                }
                out
            };
            Ok(Outcome::ok(out))
        }
        Command::En { file, term } => {
            Ok(cmd_en(&explore(&load(&file)?, &[&term], cfg.state_limit)?))
        }
        Command::Succ { file, term } => Ok(cmd_succ(&explore(
            &load(&file)?,
            &[&term],
            cfg.state_limit,
        )?)),
        Command::Conc { file, term } => Ok(cmd_conc(&explore(
            &load(&file)?,
            &[&term],
            cfg.state_limit,
        )?)),
        Command::Epbisim { file, left, right } => {
            let g = explore(&load(&file)?, &[&left, &right], cfg.state_limit)?;
            cmd_epbisim(&g, &cfg.limits)
        }
        Command::Bisim { file, left, right } => Ok(cmd_bisim(&explore(
            &load(&file)?,
            &[&left, &right],
            cfg.state_limit,
        )?)),
        Command::Just {
            file,
            term,
            prefix,
            cycle,
            blocking,
        } => {
            let doc = load(&file)?;
            let blocking = parse_blocking(&doc, &blocking)?;
            let g = explore(&doc, &[&term], cfg.state_limit)?;
            cmd_just(&g, &prefix, &cycle, &blocking)
        }
        Command::Oracle {
            file,
            corpus,
            seed,
            max_synchrons,
        } => match (file, corpus) {
            (Some(file), None) => cmd_oracle_file(&load(&file)?, &cfg, max_synchrons),
            (None, Some(n)) => {
                let c = generate(n, seed, cfg.state_limit);
                Ok(oracle_outcome(&oracle_corpus(
                    &c,
                    cfg.state_limit,
                    max_synchrons,
                )))
            }
            _ => Err(Failure::Usage("oracle needs a file or --corpus N".into())),
        },
        Command::Props {
            corpus,
            seed,
            pairs,
        } => {
            let c = generate(
                corpus,
                seed,
                cfg.state_limit.min(SweepConfig::default().state_limit),
            );
            let sweep_cfg = SweepConfig {
                state_limit: cfg.state_limit,
                limits: cfg.limits,
                ..SweepConfig::default()
            };
            let sweep = run_properties(&c, pairs, sweep_cfg);
            let mut out = sweep.summary();
            for (name, r) in &sweep.reports {
                for f in &r.failures {
                    let _ = writeln!(out, "failure {name}: {f}");
                }
            }
            Ok(Outcome::verdict(out, sweep.holds()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let env = std::env::var(LIMITS_VAR).ok();
    match run(cli, env.as_deref()) {
        Ok(Outcome { out, code }) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("abcde: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_overrides() {
        let mut cfg = RunConfig::default();
        cfg.apply_overrides("state_limit=5, max_relations_per_pair=9")
            .unwrap();
        assert_eq!(cfg.state_limit, 5);
        assert_eq!(cfg.limits.max_relations_per_pair, 9);
        assert_eq!(cfg.limits.max_enabled_per_label, 6);
        assert!(cfg.apply_overrides("depth=3").is_err());
        assert!(cfg.apply_overrides("state_limit").is_err());
        cfg.apply_overrides("state_limit=0").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn flags_beat_environment() {
        let cli = Cli::try_parse_from(["abcde", "--state-limit", "7", "check", "x"]).unwrap();
        let cfg = RunConfig::from_cli(&cli, Some("state_limit=3,max_enabled_per_label=2")).unwrap();
        assert_eq!(cfg.state_limit, 7);
        assert_eq!(cfg.limits.max_enabled_per_label, 2);
    }
}
