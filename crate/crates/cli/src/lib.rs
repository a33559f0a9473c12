//! `polysync` command-line front end. [`run`] executes one command line and
//! captures its streams; the binary only forwards them.
//!
//! Exit status: 0 for a positive verdict or a produced artifact, 1 for a
//! negative verdict, 2 for usage and validation errors. Verdicts go to
//! standard output, details to standard error. With `--json` a single JSON
//! object `{verdict, witness, stats}` is printed instead.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use polysync::format::{parse_automaton, to_dot};
use polysync::reductions::{self, HardnessTriple, SetTransporterInstance};
use polysync::solver::{self, ConstrSyncResult, WCode};
use polysync::{polycyclic, sync, Alphabet, Automaton, Error, StateSet, Word};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "polysync", version, about = "Constrained synchronization with polycyclic constraints")]
struct Cli {
    /// Print one JSON object instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-serialize an automaton file in canonical form.
    Fmt {
        file: PathBuf,
        /// Emit Graphviz DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// Unconstrained synchronization.
    #[command(subcommand)]
    Sync(SyncCmd),
    /// Polycyclic automata and closure constructions.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Constrained synchronization.
    #[command(subcommand)]
    Constr(ConstrCmd),
    /// Set transporter reductions and hardness gadgets.
    #[command(subcommand)]
    Reduce(ReduceCmd),
}

#[derive(Subcommand)]
enum SyncCmd {
    /// Decide whether the automaton is synchronizing.
    Check { file: PathBuf },
    /// Produce a synchronizing word by greedy pair merging.
    Word { file: PathBuf },
}

#[derive(Subcommand)]
enum PolyCmd {
    /// Decide whether every strongly connected component is a single cycle.
    Check { file: PathBuf },
    /// List the cycle word of every on-cycle state.
    Skeleton { file: PathBuf },
    /// Apply a closure construction and print the resulting automaton.
    Op {
        op: PolyOp,
        file: PathBuf,
        /// Second operand for union, intersect and concat.
        other: Option<PathBuf>,
        /// Word for quotient.
        #[arg(long)]
        word: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolyOp {
    Complement,
    Union,
    Intersect,
    Concat,
    Quotient,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Oracle,
    Search,
    Pcase,
    Auto,
}

#[derive(Args)]
struct Pair {
    /// Constraint automaton (PDFA).
    #[arg(long)]
    constraint: PathBuf,
    /// Input automaton (DCSA).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum ConstrCmd {
    /// Decide whether some word of the constraint language synchronizes the input.
    Solve {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        /// Let auto mode fall back to the exhaustive oracle for non-polycyclic constraints.
        #[arg(long)]
        allow_oracle: bool,
        /// Also print the expanded witness word.
        #[arg(long)]
        expand: bool,
        /// Longest witness that --expand prints.
        #[arg(long, default_value_t = 4096)]
        max_expansion: usize,
    },
    /// Check a witness code.
    Verify {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        code: String,
    },
}

#[derive(Args)]
struct TripleArgs {
    /// Alphabet as whitespace-separated tokens; defaults to the letters used.
    #[arg(long)]
    alphabet: Option<String>,
    /// Automaton file for U; defaults to {w}.
    #[arg(long)]
    tail: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Make source and target disjoint by copying the source states.
    Disjointify {
        file: PathBuf,
        /// Source states (comma separated); overrides the file's S: line.
        #[arg(long = "S")]
        source: Option<String>,
        /// Target states (comma separated); overrides the file's T: line.
        #[arg(long = "T")]
        target: Option<String>,
    },
    /// Decide the set transporter instance by breadth-first search.
    Transport { file: PathBuf },
    /// Check the hardness criterion for u v* U.
    Criterion {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: Option<String>,
        #[command(flatten)]
        triple: TripleArgs,
    },
    /// Build the synchronization gadget for a unary disjoint instance.
    Gadget {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: Option<String>,
        #[command(flatten)]
        triple: TripleArgs,
        /// Instance file.
        file: PathBuf,
    },
    /// Compare gadget verdicts with the set transporter brute force.
    Batch {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        max_q: usize,
        /// `u,v,w`.
        #[arg(long)]
        triple: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        args: TripleArgs,
    },
}

/// What a command produced.
struct Outcome {
    verdict: String,
    positive: bool,
    witness: Option<String>,
    stats: Map<String, Value>,
    details: Vec<String>,
    /// Printed on stdout instead of the verdict in plain mode.
    artifact: Option<String>,
}

impl Outcome {
    fn verdict(verdict: &str, positive: bool) -> Self {
        Outcome {
            verdict: verdict.to_string(),
            positive,
            witness: None,
            stats: Map::new(),
            details: Vec::new(),
            artifact: None,
        }
    }

    fn artifact(text: String) -> Self {
        Outcome {
            artifact: Some(text),
            ..Outcome::verdict("ok", true)
        }
    }

    fn stat(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.stats.insert(key.to_string(), value.into());
        self
    }

    fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }
}

type CmdResult = Result<Outcome, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Automaton, String> {
    parse_automaton(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn err(e: Error) -> String {
    e.to_string()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn execute(cmd: Command) -> CmdResult {
    match cmd {
        Command::Fmt { file, dot } => {
            let aut = load(&file)?;
            let text = if dot { to_dot(&aut) } else { aut.to_string() };
            Ok(Outcome::artifact(text).stat("states", aut.n_states()))
        }
        Command::Sync(c) => run_sync(c),
        Command::Poly(c) => run_poly(c),
        Command::Constr(c) => run_constr(c),
        Command::Reduce(c) => run_reduce(c),
    }
}

fn run_sync(cmd: SyncCmd) -> CmdResult {
    match cmd {
        SyncCmd::Check { file } => {
            let aut = load(&file)?;
            let s = sync::is_synchronizing(&aut).map_err(err)?;
            let verdict = if s { "synchronizing" } else { "not-synchronizing" };
            Ok(Outcome::verdict(verdict, s).stat("states", aut.n_states()))
        }
        SyncCmd::Word { file } => {
            let aut = load(&file)?;
            match sync::synchronizing_word(&aut).map_err(err)? {
                Some(w) => {
                    let word = aut.alphabet().format_word(&w.word);
                    let sink = aut.state_name(w.sink).to_string();
                    Ok(Outcome {
                        witness: Some(word.clone()),
                        ..Outcome::verdict("yes", true)
                    }
                    .stat("length", w.word.len())
                    .stat("sink", sink.clone())
                    .detail(format!("word: {word}"))
                    .detail(format!("sink: {sink}")))
                }
                None => Ok(Outcome::verdict("no", false)),
            }
        }
    }
}

fn run_poly(cmd: PolyCmd) -> CmdResult {
    match cmd {
        PolyCmd::Check { file } => {
            let aut = load(&file)?;
            let p = polycyclic::is_polycyclic(&aut).map_err(err)?;
            let verdict = if p { "polycyclic" } else { "not-polycyclic" };
            Ok(Outcome::verdict(verdict, p).stat("states", aut.n_states()))
        }
        PolyCmd::Skeleton { file } => {
            let aut = load(&file)?;
            let sk = match polycyclic::skeleton(&aut) {
                Err(Error::NotPolycyclic) => return Ok(Outcome::verdict("not-polycyclic", false)),
                other => other.map_err(err)?,
            };
            let mut text = String::new();
            let mut cycles = Vec::new();
            for (&p, info) in &sk.cycle_info {
                let word = aut.alphabet().format_word(&info.cycle_word);
                text.push_str(&format!(
                    "{} component={} cycle={} exponent={}\n",
                    aut.state_name(p),
                    sk.scc.component_of(p),
                    word,
                    info.loop_exponent
                ));
                cycles.push(json!({
                    "state": aut.state_name(p),
                    "cycle_word": word,
                    "loop_exponent": info.loop_exponent,
                }));
            }
            Ok(Outcome::artifact(text)
                .stat("components", sk.scc.len())
                .stat("start_unfolded", sk.start_unfolded)
                .stat("cycles", cycles))
        }
        PolyCmd::Op {
            op,
            file,
            other,
            word,
        } => {
            let a = load(&file)?;
            let second = || -> Result<Automaton, String> {
                load(other.as_deref().ok_or("this operation needs a second automaton file")?)
            };
            let out = match op {
                PolyOp::Complement => polycyclic::complement_pc(&a),
                PolyOp::Union => polycyclic::union_pc(&a, &second()?),
                PolyOp::Intersect => polycyclic::intersection_pc(&a, &second()?),
                PolyOp::Concat => polycyclic::concat_pc(&a, &second()?),
                PolyOp::Quotient => {
                    let w = word.as_deref().ok_or("quotient needs --word")?;
                    let u = a.alphabet().parse_word(w).map_err(err)?;
                    polycyclic::quotient_pc(&a, &u)
                }
            }
            .map_err(err)?;
            let p = polycyclic::is_polycyclic(&out).map_err(err)?;
            Ok(Outcome::artifact(out.to_string())
                .stat("states", out.n_states())
                .stat("polycyclic", p)
                .detail(format!("result polycyclic: {p}")))
        }
    }
}

fn describe(r: &ConstrSyncResult, b: &Automaton, expand: Option<usize>) -> Result<Outcome, String> {
    let mut out = Outcome::verdict(yes_no(r.decision), r.decision);
    if let Some(code) = &r.witness {
        let text = code.encode(b);
        out = out.detail(format!("witness: {text}"));
        out.witness = Some(text);
    }
    if let Some(len) = &r.expanded_length {
        out = out.stat("length", len.to_string()).detail(format!("length: {len}"));
    }
    if let (Some(max), Some(code)) = (expand, &r.witness) {
        let word = if polycyclic::is_polycyclic(b).map_err(err)? {
            code.expand(b, max).map_err(err)?
        } else {
            Some(code.segments[0].connector.clone())
                .filter(|w| w.len() <= max)
        };
        match word {
            Some(w) => {
                let w = b.alphabet().format_word(&w);
                out = out.stat("word", w.clone()).detail(format!("word: {w}"));
            }
            None => out = out.detail(format!("word: longer than {max} symbols")),
        }
    }
    Ok(out)
}

fn run_constr(cmd: ConstrCmd) -> CmdResult {
    match cmd {
        ConstrCmd::Solve {
            pair,
            mode,
            allow_oracle,
            expand,
            max_expansion,
        } => {
            let b = load(&pair.constraint)?;
            let a = load(&pair.input)?;
            let poly = polycyclic::is_polycyclic(&b).map_err(err)?;
            let (used, class, result) = match mode {
                Mode::Oracle => ("oracle", None, solver::oracle(&a, &b)),
                Mode::Search => ("search", None, solver::solve(&a, &b)),
                Mode::Pcase => ("pcase", None, solver::solve_p_case(&a, &b)),
                Mode::Auto if !poly => {
                    if !allow_oracle {
                        return Err(
                            "constraint automaton is not polycyclic; rerun with --allow-oracle".into(),
                        );
                    }
                    ("oracle", Some("unknown complexity class"), solver::oracle(&a, &b))
                }
                Mode::Auto => {
                    if solver::p_case_applicable(&b).map_err(err)? {
                        ("pcase", Some("P"), solver::solve_p_case(&a, &b))
                    } else if reductions::find_hardness_triple(&b).map_err(err)?.is_some() {
                        ("search", Some("NP-complete"), solver::solve(&a, &b))
                    } else {
                        ("search", Some("unknown complexity class"), solver::solve(&a, &b))
                    }
                }
            };
            let r = result.map_err(err)?;
            let mut out = describe(&r, &b, expand.then_some(max_expansion))?
                .stat("mode", used)
                .detail(format!("mode: {used}"));
            if let Some(class) = class {
                out = out.stat("class", class).detail(format!("class: {class}"));
            }
            Ok(out)
        }
        ConstrCmd::Verify { pair, code } => {
            let b = load(&pair.constraint)?;
            let a = load(&pair.input)?;
            let code = WCode::parse(&code, &b).map_err(err)?;
            let ok = solver::verify_wcode(&a, &b, &code).map_err(err)?;
            let len = code.expanded_length(&b).map_err(err)?;
            Ok(Outcome {
                witness: Some(code.encode(&b)),
                ..Outcome::verdict(if ok { "accepted" } else { "rejected" }, ok)
            }
            .stat("length", len.to_string()))
        }
    }
}

fn parse_states(aut: &Automaton, list: &str) -> Result<StateSet, String> {
    let mut set = StateSet::empty(aut.n_states());
    for name in list.split([',', ' ']).filter(|s| !s.is_empty()) {
        let q = aut
            .state_id(name)
            .ok_or_else(|| err(Error::DanglingState(name.to_string())))?;
        set.insert(q);
    }
    Ok(set)
}

fn load_instance(
    path: &Path,
    source: Option<&str>,
    target: Option<&str>,
) -> Result<SetTransporterInstance, String> {
    let text = read(path)?;
    let located = |e: Error| format!("{}: {e}", path.display());
    if source.is_none() && target.is_none() {
        return reductions::parse_instance(&text).map_err(located);
    }
    let (aut, s, t) = match reductions::parse_instance(&text) {
        Ok(inst) => (inst.aut, Some(inst.source), Some(inst.target)),
        Err(_) => (parse_automaton(&text).map_err(located)?, None, None),
    };
    let s = match source {
        Some(list) => parse_states(&aut, list)?,
        None => s.ok_or("missing source set (S: line or --S)")?,
    };
    let t = match target {
        Some(list) => parse_states(&aut, list)?,
        None => t.ok_or("missing target set (T: line or --T)")?,
    };
    SetTransporterInstance::new(aut, s, t).map_err(err)
}

fn triple_alphabet(args: &TripleArgs, words: &[&str]) -> Result<Alphabet, String> {
    if let Some(tail) = &args.tail {
        return Ok(load(tail)?.alphabet().clone());
    }
    match &args.alphabet {
        Some(names) => Alphabet::new(names.split_whitespace()).map_err(err),
        None => {
            let mut letters: Vec<char> = words
                .iter()
                .flat_map(|w| w.chars())
                .filter(|c| !c.is_whitespace() && *c != '-')
                .collect();
            letters.sort_unstable();
            letters.dedup();
            let letters: String = letters.into_iter().collect();
            Alphabet::from_chars(&letters).map_err(err)
        }
    }
}

/// The triple and the tail word, with `U = {w}` unless a tail file is given.
fn build_triple(u: &str, v: &str, w: Option<&str>, args: &TripleArgs) -> Result<(HardnessTriple, Word), String> {
    let sigma = triple_alphabet(args, &[u, v, w.unwrap_or("")])?;
    let word = |s: &str| sigma.parse_word(s).map_err(err);
    let (u, v) = (word(u)?, word(v)?);
    let w = w.map(word).transpose()?;
    let tail = match (&args.tail, &w) {
        (Some(path), _) => load(path)?,
        (None, Some(w)) => polycyclic::word_automaton(&sigma, w).map_err(err)?,
        (None, None) => return Err("give --w or --tail".into()),
    };
    let t = HardnessTriple { u, v, tail };
    let w = t.tail_word(w.as_ref()).map_err(err)?;
    Ok((t, w))
}

fn run_reduce(cmd: ReduceCmd) -> CmdResult {
    match cmd {
        ReduceCmd::Disjointify {
            file,
            source,
            target,
        } => {
            let inst = load_instance(&file, source.as_deref(), target.as_deref())?;
            let out = reductions::disjointify(&inst).map_err(err)?;
            Ok(Outcome::artifact(out.to_string()).stat("states", out.aut.n_states()))
        }
        ReduceCmd::Transport { file } => {
            let inst = load_instance(&file, None, None)?;
            match reductions::set_transporter_bruteforce(&inst) {
                Some(w) => {
                    let word = inst.aut.alphabet().format_word(&w);
                    Ok(Outcome {
                        witness: Some(word.clone()),
                        ..Outcome::verdict("yes", true)
                    }
                    .stat("length", w.len())
                    .detail(format!("word: {word}")))
                }
                None => Ok(Outcome::verdict("no", false)),
            }
        }
        ReduceCmd::Criterion { u, v, w, triple } => {
            let sigma = triple_alphabet(&triple, &[&u, &v, w.as_deref().unwrap_or("")])?;
            let word = |s: &str| sigma.parse_word(s).map_err(err);
            let tail = match (&triple.tail, &w) {
                (Some(path), _) => load(path)?,
                (None, Some(w)) => polycyclic::word_automaton(&sigma, &word(w)?).map_err(err)?,
                (None, None) => return Err("give --w or --tail".into()),
            };
            let t = HardnessTriple {
                u: word(&u)?,
                v: word(&v)?,
                tail,
            };
            let r = t.criterion().map_err(err)?;
            Ok(Outcome::verdict(if r.holds() { "holds" } else { "fails" }, r.holds())
                .stat("u_not_factor_of_v_star", r.u_not_factor_of_v_star)
                .stat("v_not_factor_of_tail", r.v_not_factor_of_tail)
                .stat("tail_avoids_prefixes", r.tail_avoids_prefixes)
                .detail(format!("u not in F(v*): {}", r.u_not_factor_of_v_star))
                .detail(format!("v not in F(U): {}", r.v_not_factor_of_tail))
                .detail(format!("P(v*) and U disjoint: {}", r.tail_avoids_prefixes)))
        }
        ReduceCmd::Gadget {
            u,
            v,
            w,
            triple,
            file,
        } => {
            let (t, w) = build_triple(&u, &v, w.as_deref(), &triple)?;
            let inst = load_instance(&file, None, None)?;
            let g = reductions::build_hardness_gadget(&inst, &t, &w).map_err(err)?;
            Ok(Outcome::artifact(g.to_string())
                .stat("states", g.n_states())
                .detail(format!("tail word: {}", t.alphabet().format_word(&w))))
        }
        ReduceCmd::Batch {
            count,
            max_q,
            triple,
            seed,
            args,
        } => {
            let parts: Vec<&str> = triple.split(',').collect();
            let [u, v, w] = parts.as_slice() else {
                return Err("--triple expects u,v,w".into());
            };
            let (t, w) = build_triple(u, v, Some(w), &args)?;
            let report = reductions::gadget_equivalence_batch(count, max_q, &t, &w, seed).map_err(err)?;
            let agree = report.agreements();
            let all = agree == report.cases.len();
            Ok(Outcome {
                artifact: Some(report.to_string()),
                ..Outcome::verdict(&format!("agreement {agree}/{}", report.cases.len()), all)
            }
            .stat("instances", report.cases.len())
            .stat("agreements", agree)
            .stat("seed", seed))
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line; `args` includes the program name.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = String::new();
    let mut stderr = String::new();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                stderr = text;
            } else {
                stdout = text;
            }
            return Output {
                code,
                stdout,
                stderr,
            };
        }
    };
    let json = cli.json;
    let code = match execute(cli.command) {
        Ok(out) => {
            if json {
                let mut obj = json!({
                    "verdict": out.verdict,
                    "witness": out.witness,
                    "stats": Value::Object(out.stats),
                });
                if let Some(text) = out.artifact {
                    obj["output"] = Value::String(text);
                }
                stdout = format!("{obj}\n");
            } else {
                match &out.artifact {
                    Some(text) => stdout.push_str(text),
                    None => stdout = format!("{}\n", out.verdict),
                }
                for line in &out.details {
                    stderr.push_str(line);
                    stderr.push('\n');
                }
            }
            if out.positive {
                0
            } else {
                1
            }
        }
        Err(message) => {
            let message = message.replace('\n', " ");
            if json {
                let obj = json!({"verdict": "error", "witness": null, "stats": {"message": message}});
                stdout = format!("{obj}\n");
            }
            stderr = format!("error: {message}\n");
            2
        }
    };
    Output {
        code,
        stdout,
        stderr,
    }
}
