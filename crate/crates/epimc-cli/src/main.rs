//! Command-line front end for the belief-base model checker.
//!
//! One subcommand per engine or pipeline: direct checking over explicit or
//! generated contexts, Kripke checking, structure-validity decisions, model
//! translations, belief-structure inspection, seeded fuzz suites, and the
//! QBF reduction sweep. Reports are line-oriented `key=value` text
//! (`--json` for a single JSON object); identical argv and seed give
//! byte-identical output.

mod gen;
mod report;
mod suites;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use epimc_core::beliefbase::{is_correct, sat_epistemic, sat_explicit, Context, PointedModel};
use epimc_core::contextgen::{
    check_capped, default_pool, generate_capped, AlphaContextSpec, UniversePool,
    DEFAULT_CONTEXT_CAP,
};
use epimc_core::formula::{is_valid_atom, parse_epistemic, parse_explicit, AtomSet, Lang};
use epimc_core::kripke::{kripke_to_mbm, mbm_to_kripke, sat_kripke, PointedKripke};
use epimc_core::qbfreduce::{build_instance, parse_qbf, ReductionEngine, UniversalStandIn};
use epimc_core::structures::{
    canonical_base, coherence, enumerate_worlds, find_structure_countermodel,
    sat_structure_capped, tau, KWorld, WorldFilter, DEFAULT_SAT_CAP, DEFAULT_WORLD_CAP,
};
use epimc_core::{Error, Result};

use report::{compact_json, Report};
use suites::{Deadline, FuzzConfig, Suite};

const AFTER_HELP: &str = "\
Exit codes: 0 verdict true / suite passed; 1 verdict false / suite failed;
2 usage, parse, or input error; 3 resource cap or timeout.

Environment: EPIMC_MAX_CONTEXT caps context-generation candidates,
EPIMC_MAX_WORLDS caps structure enumeration and satisfaction, and
EPIMC_TIMEOUT_MS sets a wall-clock deadline for sweeps and fuzz suites.

Note: `fuzz --suite prop-lemmuccio` checks depth invariance of structure
satisfaction over the full modal language; that property genuinely fails for
the complement modality (and at depth 3), so the default and --exhaustive
runs exit 1 with a counterexample. Pass --el-only for the box-fragment
variant at depths 1-2, which passes.";

#[derive(Parser)]
#[command(
    name = "epimc",
    version,
    about = "Model checking for epistemic logics grounded in belief bases",
    after_help = AFTER_HELP
)]
struct Cli {
    /// Emit the report as a single JSON object instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,

    /// Append wall-clock timing to the report (not byte-deterministic).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a formula at a pointed belief-base model.
    Check(CheckArgs),
    /// Check a formula at a pointed Kripke model.
    Kcheck(KcheckArgs),
    /// Decide validity over coherent belief structures.
    Validity(ValidityArgs),
    /// Translate between model representations.
    Translate(TranslateArgs),
    /// Inspect belief structures: enumerate, coherence, sat, tau, canon.
    Structure(StructureArgs),
    /// Run a seeded cross-semantics fuzz suite.
    Fuzz(FuzzArgs),
    /// QBF reduction agreement: sweep, random sample, or single instance.
    Qbf(QbfArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckEngine {
    /// Generate the context from a literal pool constrained by alpha.
    Pool,
    /// Use the model file's own context, filtered by alpha (and bc).
    Explicit,
}

#[derive(Args)]
struct CheckArgs {
    /// Pointed-model JSON file.
    #[arg(long)]
    model: PathBuf,

    /// Integrity constraint over the base language.
    #[arg(long, default_value = "true")]
    alpha: String,

    /// Query formula.
    #[arg(long)]
    phi: String,

    #[arg(long, value_enum, default_value_t = CheckEngine::Pool)]
    engine: CheckEngine,

    /// Belief-prefix depth of the default generated pool.
    #[arg(long, default_value_t = 1)]
    tri_depth: usize,

    /// Require belief correctness of context members.
    #[arg(long)]
    bc: bool,

    /// Pool descriptor JSON file (overrides --tri-depth).
    #[arg(long)]
    pool: Option<PathBuf>,

    /// Cap on context-generation candidates (default EPIMC_MAX_CONTEXT or 4096).
    #[arg(long)]
    context_cap: Option<u64>,
}

#[derive(Args)]
struct KcheckArgs {
    /// Pointed Kripke model JSON file.
    #[arg(long)]
    kripke: PathBuf,

    /// Query formula.
    #[arg(long)]
    phi: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidityEngine {
    Structures,
}

#[derive(Args)]
struct ValidityArgs {
    /// Formula to decide.
    #[arg(long)]
    phi: String,

    /// Restrict to belief-correct structures.
    #[arg(long)]
    bc: bool,

    #[arg(long, value_enum, default_value_t = ValidityEngine::Structures)]
    engine: ValidityEngine,

    /// Cap on enumerated worlds (default EPIMC_MAX_WORLDS or 2^20).
    #[arg(long)]
    world_cap: Option<u64>,

    /// Write the countermodel, if any, to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Belief-base model to pointed Kripke model.
    Mbm2k,
    /// Pointed Kripke model to belief-base model.
    K2mbm,
    /// Closed QBF to a model-checking instance (base, query, valuation).
    Qbf2mc,
}

#[derive(Args)]
struct TranslateArgs {
    #[arg(long, value_enum)]
    direction: Direction,

    /// Input model JSON file (mbm2k, k2mbm).
    #[arg(long)]
    input: Option<PathBuf>,

    /// Closed QBF text (qbf2mc), e.g. "A p. E q. (p <-> q)".
    #[arg(long)]
    qbf: Option<String>,

    /// Comma-separated atoms of the valuation s (qbf2mc).
    #[arg(long, default_value = "")]
    s: String,

    /// Comma-separated guard atoms (k2mbm).
    #[arg(long, default_value = "")]
    guard_atoms: String,
}

#[derive(Args)]
struct StructureArgs {
    #[command(subcommand)]
    sub: StructureCmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    All,
    Coherent,
    CoherentCorrect,
}

impl From<FilterArg> for WorldFilter {
    fn from(f: FilterArg) -> WorldFilter {
        match f {
            FilterArg::All => WorldFilter::All,
            FilterArg::Coherent => WorldFilter::Coherent,
            FilterArg::CoherentCorrect => WorldFilter::CoherentCorrect,
        }
    }
}

#[derive(Subcommand)]
enum StructureCmd {
    /// Enumerate depth-k worlds over an atom set.
    Enum {
        /// Comma-separated atoms.
        #[arg(long)]
        atoms: String,
        #[arg(long, default_value_t = 1)]
        agents: u8,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = FilterArg::Coherent)]
        filter: FilterArg,
        /// Print each world as a JSON row.
        #[arg(long)]
        list: bool,
        /// Cap on enumerated worlds (default EPIMC_MAX_WORLDS or 2^20).
        #[arg(long)]
        world_cap: Option<u64>,
    },
    /// Coherence and correctness report for a world file.
    Coherence {
        #[arg(long)]
        world: PathBuf,
    },
    /// Satisfaction of a formula at a world file.
    Sat {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        phi: String,
    },
    /// Lift a pointed Kripke model to a depth-k belief structure.
    Tau {
        #[arg(long)]
        kripke: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Comma-separated atoms (default: the model's valuation atoms).
        #[arg(long)]
        atoms: Option<String>,
    },
    /// Canonical belief base of a world, as a pointed model with empty context.
    Canon {
        #[arg(long)]
        world: PathBuf,
        /// Comma-separated guard atoms.
        #[arg(long, default_value = "")]
        guard_atoms: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    /// Base/Kripke transfer for the box fragment, both directions.
    Thm1,
    /// Base/Kripke forward transfer for the full language, point in context.
    Thm2Pipeline,
    /// Depth invariance of structure satisfaction (fails by design; see help).
    PropLemmuccio,
    /// Structure validity against pool validity on the enumerated suite.
    ThmTeoremiccolo,
    /// Class satisfiability as a diamond at the maximal-uncertainty point.
    PropPropone,
    /// Cross-check of the belief-correctness definitions.
    BcVariants,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Thm1 => Suite::Thm1,
            SuiteArg::Thm2Pipeline => Suite::Thm2Pipeline,
            SuiteArg::PropLemmuccio => Suite::PropLemmuccio,
            SuiteArg::ThmTeoremiccolo => Suite::ThmTeoremiccolo,
            SuiteArg::PropPropone => Suite::PropPropone,
            SuiteArg::BcVariants => Suite::BcVariants,
        }
    }
}

fn suite_name(s: SuiteArg) -> &'static str {
    match s {
        SuiteArg::Thm1 => "thm1",
        SuiteArg::Thm2Pipeline => "thm2-pipeline",
        SuiteArg::PropLemmuccio => "prop-lemmuccio",
        SuiteArg::ThmTeoremiccolo => "thm-teoremiccolo",
        SuiteArg::PropPropone => "prop-propone",
        SuiteArg::BcVariants => "bc-variants",
    }
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,

    /// RNG seed (mandatory: reports are reproducible by construction).
    #[arg(long)]
    seed: u64,

    /// Number of random cases.
    #[arg(long, default_value_t = 100)]
    count: usize,

    /// prop-lemmuccio only: restrict to the box fragment at depths 1-2.
    #[arg(long)]
    el_only: bool,

    /// prop-lemmuccio only: enumerate all coherent one-atom worlds instead
    /// of sampling.
    #[arg(long)]
    exhaustive: bool,

    /// Deliberately corrupt the model translation (harness sanity check).
    #[arg(long)]
    mutate: bool,

    /// Write the counterexample model, if any, to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Pool,
    Structures,
}

impl From<EngineArg> for ReductionEngine {
    fn from(e: EngineArg) -> ReductionEngine {
        match e {
            EngineArg::Pool => ReductionEngine::Pool,
            EngineArg::Structures => ReductionEngine::Structures,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StandinArg {
    /// Level-tagged grid of all valuations (faithful stand-in).
    Grid,
    /// Powerset closure of the instance descriptions (diverges by design
    /// for some three-quantifier prefixes).
    Closure,
}

impl From<StandinArg> for UniversalStandIn {
    fn from(s: StandinArg) -> UniversalStandIn {
        match s {
            StandinArg::Grid => UniversalStandIn::Grid,
            StandinArg::Closure => UniversalStandIn::PowersetClosure,
        }
    }
}

#[derive(Args)]
struct QbfArgs {
    /// Exhaustive agreement table over at most this many variables (1 or 2).
    #[arg(long)]
    sweep: Option<usize>,

    /// Number of random closed QBFs to sample (requires --seed).
    #[arg(long)]
    random: Option<usize>,

    /// RNG seed for --random.
    #[arg(long)]
    seed: Option<u64>,

    /// Variable count for --random.
    #[arg(long, default_value_t = 3)]
    vars: usize,

    /// Single closed QBF, e.g. "A p. E q. (p <-> q)".
    #[arg(long)]
    qbf: Option<String>,

    /// Comma-separated atoms of the valuation s (single-instance mode).
    #[arg(long, default_value = "")]
    s: String,

    #[arg(long, value_enum, default_value_t = EngineArg::Pool)]
    engine: EngineArg,

    #[arg(long, value_enum, default_value_t = StandinArg::Grid)]
    standin: StandinArg,

    /// Cap on stand-in context members (default EPIMC_MAX_CONTEXT or 4096).
    #[arg(long)]
    context_cap: Option<u64>,

    /// Deliberately corrupt the query translation (harness sanity check).
    #[arg(long)]
    mutate: bool,
}

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

fn env_u64(name: &str) -> Result<Option<u64>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::Input(format!("{name} must be an unsigned integer, got {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::Input(format!("{name}: {e}"))),
    }
}

fn context_cap(flag: Option<u64>) -> Result<u64> {
    Ok(flag.or(env_u64("EPIMC_MAX_CONTEXT")?).unwrap_or(DEFAULT_CONTEXT_CAP))
}

fn world_cap(flag: Option<u64>) -> Result<u64> {
    Ok(flag.or(env_u64("EPIMC_MAX_WORLDS")?).unwrap_or(DEFAULT_WORLD_CAP))
}

fn sat_cap() -> Result<u64> {
    Ok(env_u64("EPIMC_MAX_WORLDS")?.unwrap_or(DEFAULT_SAT_CAP))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Attach the file name to parse/input errors from file contents.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { pos, msg } => {
            Error::Parse { pos, msg: format!("{}: {msg}", path.display()) }
        }
        Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn parse_atoms(text: &str) -> Result<AtomSet> {
    let mut out = AtomSet::new();
    for part in text.split(',') {
        let t = part.trim();
        if t.is_empty() {
            continue;
        }
        if !is_valid_atom(t) {
            return Err(Error::Input(format!("invalid atom name {t:?}")));
        }
        out.insert(t.to_string());
    }
    Ok(out)
}

fn render_atoms(atoms: &AtomSet) -> String {
    format!("{{{}}}", atoms.iter().cloned().collect::<Vec<_>>().join(","))
}

struct Timing {
    start: Instant,
    enabled: bool,
}

impl Timing {
    fn apply(&self, rep: &mut Report) {
        if self.enabled {
            rep.push("elapsed_ms", self.start.elapsed().as_millis());
        }
    }
}

// ---------------------------------------------------------------------------
// Entry point and dispatch
// ---------------------------------------------------------------------------

fn main() {
    // Die silently on a closed pipe (`epimc ... | head`) like other CLIs.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Cap { .. } | Error::Timeout(_) => 3,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli) -> Result<i32> {
    let timing = Timing { start: Instant::now(), enabled: cli.timing };
    let deadline = Deadline::new(env_u64("EPIMC_TIMEOUT_MS")?);
    match &cli.cmd {
        Cmd::Check(a) => run_check(a, cli.json, &timing),
        Cmd::Kcheck(a) => run_kcheck(a, cli.json, &timing),
        Cmd::Validity(a) => run_validity(a, cli.json, &timing),
        Cmd::Translate(a) => run_translate(a, cli.json, &timing),
        Cmd::Structure(a) => run_structure(a, cli.json, &timing),
        Cmd::Fuzz(a) => run_fuzz_cmd(a, cli.json, &timing, &deadline),
        Cmd::Qbf(a) => run_qbf_cmd(a, cli.json, &timing, &deadline),
    }
}

fn verdict_code(v: bool) -> i32 {
    if v {
        0
    } else {
        1
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn run_check(a: &CheckArgs, json: bool, timing: &Timing) -> Result<i32> {
    let m = in_file(&a.model, PointedModel::from_json(&read_file(&a.model)?))?;
    let n_agents = m.base.n_agents();
    let phi = parse_epistemic(&a.phi, n_agents, Lang::Eel)?;
    let alpha = parse_explicit(&a.alpha, n_agents)?;
    let cap = context_cap(a.context_cap)?;
    let mut rep = Report::new("check");
    rep.push("phi", phi.render());
    rep.push("alpha", alpha.render());
    rep.push("bc", a.bc);
    let verdict = match a.engine {
        CheckEngine::Pool => {
            rep.push("engine", "pool");
            let pool = match &a.pool {
                Some(p) => in_file(p, UniversePool::from_json(&read_file(p)?))?,
                None => {
                    let mut atoms = m.base.mentioned_atoms();
                    atoms.extend(phi.atoms());
                    atoms.extend(alpha.atoms());
                    default_pool(&atoms, a.tri_depth, n_agents)?
                }
            };
            let tri = pool.formulas().iter().map(|f| f.tri_depth()).max().unwrap_or(0);
            rep.push("pool_size", pool.formulas().len());
            rep.push("tri_depth", tri);
            rep.push("atoms", render_atoms(pool.atoms()));
            let spec = AlphaContextSpec::new(pool, alpha, a.bc)?;
            let ctx = generate_capped(&spec, cap)?;
            rep.push("context_size", ctx.len());
            check_capped(&m.base, &spec, &phi, cap)?
        }
        CheckEngine::Explicit => {
            rep.push("engine", "explicit");
            let members: Vec<_> = m
                .context
                .iter()
                .filter(|b| sat_explicit(b, &alpha) && (!a.bc || is_correct(b)))
                .cloned()
                .collect();
            let ctx = Context::from_members(members);
            let mut atoms = m.base.mentioned_atoms();
            let mut tri = 0;
            for b in ctx.iter() {
                atoms.extend(b.mentioned_atoms());
                for i in 1..=b.n_agents() {
                    let id = epimc_core::formula::AgentId::new(i).expect("nonzero index");
                    tri = tri.max(b.base(id).iter().map(|f| f.tri_depth()).max().unwrap_or(0));
                }
            }
            rep.push("pool_size", ctx.len());
            rep.push("tri_depth", tri);
            rep.push("atoms", render_atoms(&atoms));
            rep.push("context_size", ctx.len());
            sat_epistemic(&PointedModel::new(m.base.clone(), ctx), &phi)
        }
    };
    rep.push("verdict", verdict);
    timing.apply(&mut rep);
    rep.print(json);
    Ok(verdict_code(verdict))
}

// ---------------------------------------------------------------------------
// kcheck
// ---------------------------------------------------------------------------

fn run_kcheck(a: &KcheckArgs, json: bool, timing: &Timing) -> Result<i32> {
    let pk = in_file(&a.kripke, PointedKripke::from_json(&read_file(&a.kripke)?))?;
    let phi = parse_epistemic(&a.phi, pk.model().n_agents(), Lang::Eel)?;
    let verdict = sat_kripke(&pk, &phi);
    let mut rep = Report::new("kcheck");
    rep.push("phi", phi.render());
    rep.push("worlds", pk.model().n_worlds());
    rep.push("agents", pk.model().n_agents());
    rep.push("point", pk.world());
    rep.push("verdict", verdict);
    timing.apply(&mut rep);
    rep.print(json);
    Ok(verdict_code(verdict))
}

// ---------------------------------------------------------------------------
// validity
// ---------------------------------------------------------------------------

fn run_validity(a: &ValidityArgs, json: bool, timing: &Timing) -> Result<i32> {
    let phi = parse_epistemic(&a.phi, u8::MAX, Lang::Eel)?;
    let wc = world_cap(a.world_cap)?;
    let counter = find_structure_countermodel(&phi, a.bc, wc, sat_cap()?)?;
    let valid = counter.is_none();
    let mut rep = Report::new("validity");
    rep.push("engine", "structures");
    rep.push("phi", phi.render());
    rep.push("bc", a.bc);
    rep.push("depth", phi.depth());
    rep.push("atoms", render_atoms(&phi.atoms()));
    rep.push("verdict", if valid { "valid" } else { "invalid" });
    if let Some(w) = &counter {
        rep.push("countermodel", compact_json(&w.to_json()));
        if let Some(path) = &a.dump {
            write_file(path, &w.to_json())?;
            rep.push("countermodel_file", path.display());
        }
    }
    timing.apply(&mut rep);
    rep.print(json);
    Ok(verdict_code(valid))
}

// ---------------------------------------------------------------------------
// translate
// ---------------------------------------------------------------------------

fn require<'v, T>(v: &'v Option<T>, what: &str) -> Result<&'v T> {
    v.as_ref()
        .ok_or_else(|| Error::Input(format!("--{what} is required for this direction")))
}

fn run_translate(a: &TranslateArgs, json: bool, timing: &Timing) -> Result<i32> {
    match a.direction {
        Direction::Mbm2k => {
            let path = require(&a.input, "input")?;
            let m = in_file(path, PointedModel::from_json(&read_file(path)?))?;
            println!("{}", mbm_to_kripke(&m).to_json());
            Ok(0)
        }
        Direction::K2mbm => {
            let path = require(&a.input, "input")?;
            let pk = in_file(path, PointedKripke::from_json(&read_file(path)?))?;
            let guards = parse_atoms(&a.guard_atoms)?;
            println!("{}", kripke_to_mbm(&pk, &guards).to_json());
            Ok(0)
        }
        Direction::Qbf2mc => {
            let text = require(&a.qbf, "qbf")?;
            let chi = parse_qbf(text)?;
            if !chi.is_closed() {
                return Err(Error::Input(format!(
                    "the QBF must be closed; {} has free matrix atoms",
                    chi.render()
                )));
            }
            let s = parse_atoms(&a.s)?;
            let inst = build_instance(&chi, &s);
            let mut rep = Report::new("translate");
            rep.push("direction", "qbf2mc");
            rep.push("qbf", chi.render());
            rep.push("s", render_atoms(&s));
            rep.push("query", inst.query.render());
            rep.push("depth", inst.query.depth());
            let base_model = PointedModel::new(inst.base, Context::new());
            rep.push("base_model", compact_json(&base_model.to_json()));
            timing.apply(&mut rep);
            rep.print(json);
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// structure
// ---------------------------------------------------------------------------

fn run_structure(a: &StructureArgs, json: bool, timing: &Timing) -> Result<i32> {
    match &a.sub {
        StructureCmd::Enum { atoms, agents, depth, filter, list, world_cap: wc } => {
            let atoms = parse_atoms(atoms)?;
            let cap = world_cap(*wc)?;
            let worlds = enumerate_worlds(&atoms, *agents, *depth, (*filter).into(), cap)?;
            let mut rep = Report::new("structure-enum");
            rep.push("atoms", render_atoms(&atoms));
            rep.push("agents", agents);
            rep.push("depth", depth);
            rep.push(
                "filter",
                match filter {
                    FilterArg::All => "all",
                    FilterArg::Coherent => "coherent",
                    FilterArg::CoherentCorrect => "coherent-correct",
                },
            );
            rep.push("count", worlds.len());
            if *list {
                for w in &worlds {
                    rep.row("world", vec![("json", compact_json(&w.to_json()))]);
                }
            }
            timing.apply(&mut rep);
            rep.print(json);
            Ok(0)
        }
        StructureCmd::Coherence { world } => {
            let w = in_file(world, KWorld::from_json(&read_file(world)?))?;
            let report = coherence(&w);
            let mut rep = Report::new("structure-coherence");
            rep.push("depth", w.depth());
            rep.push("agents", w.n_agents());
            rep.push("atoms", render_atoms(&w.atoms()));
            rep.push("coherent", report.coherent);
            rep.push("correct", report.correct);
            rep.push("violations", report.violations.len());
            for v in &report.violations {
                rep.row(
                    "violation",
                    vec![
                        ("level", v.level.to_string()),
                        ("agent", v.agent.get().to_string()),
                        ("witness", v.witness.clone()),
                    ],
                );
            }
            timing.apply(&mut rep);
            rep.print(json);
            Ok(verdict_code(report.coherent))
        }
        StructureCmd::Sat { world, phi } => {
            let w = in_file(world, KWorld::from_json(&read_file(world)?))?;
            let phi = parse_epistemic(phi, w.n_agents(), Lang::Eel)?;
            let verdict = sat_structure_capped(&w, &phi, sat_cap()?)?;
            let mut rep = Report::new("structure-sat");
            rep.push("phi", phi.render());
            rep.push("depth", w.depth());
            rep.push("agents", w.n_agents());
            rep.push("atoms", render_atoms(&w.atoms()));
            rep.push("verdict", verdict);
            timing.apply(&mut rep);
            rep.print(json);
            Ok(verdict_code(verdict))
        }
        StructureCmd::Tau { kripke, depth, atoms } => {
            let pk = in_file(kripke, PointedKripke::from_json(&read_file(kripke)?))?;
            let atoms = match atoms {
                Some(t) => parse_atoms(t)?,
                None => pk.model().valuation_atoms().cloned().collect(),
            };
            let w = tau(&pk, *depth, &atoms)?;
            println!("{}", w.to_json());
            Ok(0)
        }
        StructureCmd::Canon { world, guard_atoms } => {
            let w = in_file(world, KWorld::from_json(&read_file(world)?))?;
            let guards = parse_atoms(guard_atoms)?;
            let base = canonical_base(&w, &guards);
            println!("{}", PointedModel::new(base, Context::new()).to_json());
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// fuzz
// ---------------------------------------------------------------------------

fn run_fuzz_cmd(a: &FuzzArgs, json: bool, timing: &Timing, deadline: &Deadline) -> Result<i32> {
    let cfg = FuzzConfig {
        seed: a.seed,
        count: a.count,
        el_only: a.el_only,
        exhaustive: a.exhaustive,
        mutate: a.mutate,
    };
    let out = suites::run_fuzz(a.suite.into(), &cfg, deadline)?;
    let pass = out.failure.is_none();
    let mut rep = Report::new("fuzz");
    rep.push("suite", suite_name(a.suite));
    rep.push("seed", a.seed);
    rep.push("count", a.count);
    rep.push("el_only", a.el_only);
    rep.push("exhaustive", a.exhaustive);
    rep.push("mutate", a.mutate);
    rep.push("cases", out.cases);
    rep.push("checks", out.checks);
    rep.push("verdict", if pass { "pass" } else { "fail" });
    let mut document: Option<String> = None;
    if let Some(c) = &out.failure {
        let mut fields = vec![("case", c.case_idx.to_string())];
        fields.extend(c.fields.iter().map(|(k, v)| (*k, v.clone())));
        rep.row("counterexample", fields);
        if let Some(doc) = &c.document {
            if let Some(path) = &a.dump {
                write_file(path, doc)?;
                rep.push("counterexample_file", path.display());
            }
            if json {
                rep.push("counterexample_model", compact_json(doc));
            } else {
                document = Some(doc.clone());
            }
        }
    }
    timing.apply(&mut rep);
    rep.print(json);
    if let Some(doc) = document {
        // Loadable counterexample, verbatim.
        println!("{doc}");
    }
    Ok(if pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// qbf
// ---------------------------------------------------------------------------

fn run_qbf_cmd(a: &QbfArgs, json: bool, timing: &Timing, deadline: &Deadline) -> Result<i32> {
    let cap = context_cap(a.context_cap)?;
    let engine: ReductionEngine = a.engine.into();
    let standin: UniversalStandIn = a.standin.into();
    let (mode, rows) = match (a.sweep, a.random, &a.qbf) {
        (Some(vars), None, None) => {
            ("sweep", suites::qbf_sweep(vars, engine, standin, cap, a.mutate, deadline)?)
        }
        (None, Some(count), None) => {
            let seed = a
                .seed
                .ok_or_else(|| Error::Input("--random requires --seed".into()))?;
            (
                "random",
                suites::qbf_random(seed, count, a.vars, engine, standin, cap, a.mutate, deadline)?,
            )
        }
        (None, None, Some(text)) => {
            let chi = parse_qbf(text)?;
            if !chi.is_closed() {
                return Err(Error::Input(format!(
                    "the QBF must be closed; {} has free matrix atoms",
                    chi.render()
                )));
            }
            let s = parse_atoms(&a.s)?;
            ("single", vec![suites::qbf_row(&chi, &s, engine, standin, cap, a.mutate)?])
        }
        _ => {
            return Err(Error::Input(
                "choose exactly one of --sweep, --random, --qbf".into(),
            ))
        }
    };
    let disagreements = rows.iter().filter(|r| r.oracle != r.reduced).count();
    if !json {
        for r in &rows {
            println!("{} {} oracle={} reduced={}", r.qbf, r.s, r.oracle, r.reduced);
        }
    }
    let mut rep = Report::new("qbf");
    rep.push("mode", mode);
    rep.push(
        "engine",
        match a.engine {
            EngineArg::Pool => "pool",
            EngineArg::Structures => "structures",
        },
    );
    rep.push(
        "standin",
        match a.standin {
            StandinArg::Grid => "grid",
            StandinArg::Closure => "closure",
        },
    );
    rep.push("context_cap", cap);
    rep.push("mutate", a.mutate);
    rep.push("rows", rows.len());
    rep.push("disagreements", disagreements);
    rep.push("verdict", if disagreements == 0 { "pass" } else { "fail" });
    if json {
        for r in &rows {
            rep.row(
                "instance",
                vec![
                    ("qbf", r.qbf.clone()),
                    ("s", r.s.clone()),
                    ("oracle", r.oracle.to_string()),
                    ("reduced", r.reduced.to_string()),
                ],
            );
        }
    }
    timing.apply(&mut rep);
    rep.print(json);
    Ok(if disagreements == 0 { 0 } else { 1 })
}
