//! Fuzz suites cross-checking independent semantics, and the QBF sweep.
//!
//! Each suite draws `count` seeded random instances and compares two
//! independently implemented answers; the first disagreement is reported as
//! a loadable counterexample. Mutation mode deliberately corrupts one side
//! to demonstrate that the harness can fail.

use std::time::{Duration, Instant};

use epimc_core::beliefbase::{
    is_correct, sat_epistemic, satisfies_bc, Context, PointedModel,
};
use epimc_core::contextgen::{default_pool, max_uncertainty_model, satisfiable_in_class};
use epimc_core::formula::{
    parse_epistemic, AgentId, AtomSet, EpistemicFormula, Lang,
};
use epimc_core::kripke::{
    kripke_to_mbm, mbm_to_kripke, sat_kripke, KripkeModel, PointedKripke,
};
use epimc_core::qbfreduce::{
    build_instance, eval_qbf, grid_context_capped, powerset_closure_context,
    reduction_check_with, translate, Quantifier, ReductionEngine, UniversalStandIn, QBF,
};
use epimc_core::structures::{
    enumerate_worlds, extend_random, random_coherent_world, restrict, sat_structure,
    valid_universal, WorldFilter,
};
use epimc_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gen;

// ---------------------------------------------------------------------------
// Deadline
// ---------------------------------------------------------------------------

/// Wall-clock budget checked between cases; `None` means unlimited.
pub struct Deadline {
    end: Option<Instant>,
    ms: u64,
}

impl Deadline {
    pub fn new(ms: Option<u64>) -> Self {
        match ms {
            Some(ms) => Deadline { end: Some(Instant::now() + Duration::from_millis(ms)), ms },
            None => Deadline { end: None, ms: 0 },
        }
    }

    pub fn check(&self) -> Result<()> {
        match self.end {
            Some(end) if Instant::now() >= end => Err(Error::Timeout(self.ms)),
            _ => Ok(()),
        }
    }
}

// ---------------------------------------------------------------------------
// Suite plumbing
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Suite {
    Thm1,
    Thm2Pipeline,
    PropLemmuccio,
    ThmTeoremiccolo,
    PropPropone,
    BcVariants,
}

pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub el_only: bool,
    pub exhaustive: bool,
    pub mutate: bool,
}

/// First disagreement found by a suite.
pub struct Counterexample {
    pub case_idx: usize,
    pub fields: Vec<(&'static str, String)>,
    /// Pretty JSON of the offending model, loadable by the other subcommands.
    pub document: Option<String>,
}

#[derive(Default)]
pub struct SuiteOutcome {
    pub cases: usize,
    pub checks: usize,
    pub failure: Option<Counterexample>,
}

impl SuiteOutcome {
    fn fail(
        &mut self,
        case_idx: usize,
        fields: Vec<(&'static str, String)>,
        document: Option<String>,
    ) {
        self.failure = Some(Counterexample { case_idx, fields, document });
    }
}

pub fn run_fuzz(suite: Suite, cfg: &FuzzConfig, deadline: &Deadline) -> Result<SuiteOutcome> {
    if cfg.mutate && !matches!(suite, Suite::Thm1 | Suite::Thm2Pipeline) {
        return Err(Error::Input(
            "--mutate applies to the translation suites thm1 and thm2-pipeline".into(),
        ));
    }
    if cfg.el_only && suite != Suite::PropLemmuccio {
        return Err(Error::Input("--el-only applies to suite prop-lemmuccio".into()));
    }
    if cfg.exhaustive && suite != Suite::PropLemmuccio {
        return Err(Error::Input("--exhaustive applies to suite prop-lemmuccio".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match suite {
        Suite::Thm1 => transfer_suite(&mut rng, cfg, deadline, false),
        Suite::Thm2Pipeline => transfer_suite(&mut rng, cfg, deadline, true),
        Suite::PropLemmuccio if cfg.exhaustive => lemmuccio_exhaustive(cfg.el_only, deadline),
        Suite::PropLemmuccio => lemmuccio(&mut rng, cfg, deadline),
        Suite::ThmTeoremiccolo => teoremiccolo(&mut rng, cfg, deadline),
        Suite::PropPropone => propone(&mut rng, cfg, deadline),
        Suite::BcVariants => bc_variants(&mut rng, cfg, deadline),
    }
}

fn names(k: usize) -> Vec<String> {
    ["p", "q", "r"][..k].iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------------
// thm1 / thm2-pipeline: Kripke transfer
// ---------------------------------------------------------------------------

/// Direct belief-base satisfaction must agree with Kripke satisfaction
/// through the model translations. `eel` admits the complement modality and
/// pins the point inside the context (the extended transfer needs that).
fn transfer_suite(
    rng: &mut ChaCha8Rng,
    cfg: &FuzzConfig,
    deadline: &Deadline,
    eel: bool,
) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    for case in 0..cfg.count {
        deadline.check()?;
        out.cases += 1;
        let atoms = names(rng.gen_range(1..=3));
        let m = gen::rand_mbm(rng, &atoms, 2, 5, 2, 2, eel);
        let translated = mbm_to_kripke(&m);
        let pk = if cfg.mutate { corrupt_kripke(&translated) } else { translated };
        for _ in 0..10 {
            let phi = gen::rand_epistemic(rng, &atoms, 2, 3, 4, eel);
            let direct = sat_epistemic(&m, &phi);
            let kripke = sat_kripke(&pk, &phi);
            out.checks += 1;
            if direct != kripke {
                out.fail(
                    case,
                    vec![
                        ("phi", phi.render()),
                        ("direct", direct.to_string()),
                        ("kripke", kripke.to_string()),
                    ],
                    Some(m.to_json()),
                );
                return Ok(out);
            }
        }
        if !eel {
            // Reverse direction: random Kripke model, translated to bases.
            // Formulas mention only the guard atoms, as the reverse
            // translation preserves exactly those.
            let pk2 = gen::rand_kripke(rng, &atoms, 2, 5);
            let guards: AtomSet = atoms.iter().cloned().collect();
            let m2 = kripke_to_mbm(&pk2, &guards);
            for _ in 0..10 {
                let phi = gen::rand_epistemic(rng, &atoms, 2, 3, 4, false);
                let kripke = sat_kripke(&pk2, &phi);
                let direct = sat_epistemic(&m2, &phi);
                out.checks += 1;
                if kripke != direct {
                    out.fail(
                        case,
                        vec![
                            ("phi", phi.render()),
                            ("kripke", kripke.to_string()),
                            ("direct", direct.to_string()),
                        ],
                        Some(pk2.to_json()),
                    );
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// Deterministically corrupt a Kripke model: drop its first edge, or add a
/// loop at the point if it has no edges.
fn corrupt_kripke(pk: &PointedKripke) -> PointedKripke {
    let m = pk.model();
    let mut out =
        KripkeModel::new(m.n_agents(), m.worlds().to_vec()).expect("copy of a valid model");
    for a in m.valuation_atoms() {
        for w in 0..m.n_worlds() {
            if m.atom_true_at(a, w) {
                out.set_atom_true(a, &m.worlds()[w]).expect("world exists");
            }
        }
    }
    let mut dropped = false;
    for i in 1..=m.n_agents() {
        let id = AgentId::new(i).expect("agent index is nonzero");
        for u in 0..m.n_worlds() {
            for &v in m.successors(id, u) {
                if !dropped {
                    dropped = true;
                    continue;
                }
                out.add_edge(id, &m.worlds()[u], &m.worlds()[v]).expect("worlds exist");
            }
        }
    }
    if !dropped {
        let one = AgentId::new(1).expect("agent index is nonzero");
        out.add_edge(one, pk.world(), pk.world()).expect("point exists");
    }
    PointedKripke::new(out, pk.world().to_string()).expect("point unchanged")
}

// ---------------------------------------------------------------------------
// prop-lemmuccio: depth invariance of structure satisfaction
// ---------------------------------------------------------------------------

/// The formula pool for the depth-invariance property: all modal shapes of
/// nesting depth <= 2 over the atom `p` and agents `1..=n`.
fn lemmuccio_pool(n: u8, el_only: bool) -> Result<Vec<EpistemicFormula>> {
    let mut texts: Vec<String> = vec!["p".into(), "~p".into(), "p & ~p".into()];
    for i in 1..=n {
        texts.push(format!("B[{i}] p"));
        texts.push(format!("B[{i}] ~p"));
        texts.push(format!("~B[{i}] p"));
        texts.push(format!("D[{i}] p"));
        texts.push(format!("p & B[{i}] p"));
        if !el_only {
            texts.push(format!("C[{i}] p"));
            texts.push(format!("C[{i}] ~p"));
        }
        for j in 1..=n {
            texts.push(format!("B[{i}] B[{j}] p"));
            texts.push(format!("B[{i}] D[{j}] p"));
            texts.push(format!("D[{i}] B[{j}] p"));
            if !el_only {
                texts.push(format!("B[{i}] C[{j}] p"));
                texts.push(format!("C[{i}] B[{j}] p"));
                texts.push(format!("C[{i}] C[{j}] p"));
            }
        }
    }
    texts.sort();
    texts.dedup();
    texts.iter().map(|t| parse_epistemic(t, n, Lang::Eel)).collect()
}

/// Satisfaction of a formula must not change when a world is restricted to
/// any depth still covering the formula, or randomly extended upward.
///
/// This holds for the box fragment at depths <= 2 but is refutable both for
/// the complement modality and at depth 3, so the default configuration is
/// expected to fail; `--el-only` restricts to the provable range.
fn lemmuccio(rng: &mut ChaCha8Rng, cfg: &FuzzConfig, deadline: &Deadline) -> Result<SuiteOutcome> {
    let pools = [lemmuccio_pool(1, cfg.el_only)?, lemmuccio_pool(2, cfg.el_only)?];
    let (ks, ext_cap): (&[usize], usize) =
        if cfg.el_only { (&[1, 2], 2) } else { (&[1, 2, 3], 3) };
    let atoms: AtomSet = std::iter::once("p".to_string()).collect();
    let mut out = SuiteOutcome::default();
    for case in 0..cfg.count {
        deadline.check()?;
        out.cases += 1;
        let n: u8 = rng.gen_range(1..=2);
        let k = *gen::pick(rng, ks);
        let force = rng.gen_bool(0.5);
        let w = random_coherent_world(&atoms, n, k, 2, force, rng)?;
        for phi in &pools[(n - 1) as usize] {
            if phi.depth() > k {
                continue;
            }
            let at_k = sat_structure(&w, phi)?;
            for j in phi.depth()..k {
                let wj = restrict(&w, j)?;
                out.checks += 1;
                if sat_structure(&wj, phi)? != at_k {
                    out.fail(
                        case,
                        vec![
                            ("phi", phi.render()),
                            ("depth", k.to_string()),
                            ("restricted_to", j.to_string()),
                            ("verdict_full", at_k.to_string()),
                            ("verdict_restricted", (!at_k).to_string()),
                        ],
                        Some(w.to_json()),
                    );
                    return Ok(out);
                }
            }
            if k < ext_cap {
                let we = extend_random(&w, k + 1, 2, force, rng)?;
                out.checks += 1;
                if sat_structure(&we, phi)? != at_k {
                    out.fail(
                        case,
                        vec![
                            ("phi", phi.render()),
                            ("depth", k.to_string()),
                            ("extended_to", (k + 1).to_string()),
                            ("verdict_base", at_k.to_string()),
                            ("verdict_extended", (!at_k).to_string()),
                        ],
                        Some(we.to_json()),
                    );
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

/// Exhaustive depth-invariance sweep: every coherent world over one atom and
/// one agent at depths 1 and 2, against every pool formula it covers.
fn lemmuccio_exhaustive(el_only: bool, deadline: &Deadline) -> Result<SuiteOutcome> {
    let atoms: AtomSet = std::iter::once("p".to_string()).collect();
    let pool = lemmuccio_pool(1, el_only)?;
    let mut out = SuiteOutcome::default();
    for k in 1..=2usize {
        let worlds = enumerate_worlds(&atoms, 1, k, WorldFilter::Coherent, 1 << 16)?;
        for w in worlds {
            deadline.check()?;
            out.cases += 1;
            for phi in &pool {
                if phi.depth() > k {
                    continue;
                }
                let at_k = sat_structure(&w, phi)?;
                for j in phi.depth()..k {
                    let wj = restrict(&w, j)?;
                    out.checks += 1;
                    if sat_structure(&wj, phi)? != at_k {
                        out.fail(
                            out.cases - 1,
                            vec![
                                ("phi", phi.render()),
                                ("depth", k.to_string()),
                                ("restricted_to", j.to_string()),
                                ("verdict_full", at_k.to_string()),
                                ("verdict_restricted", (!at_k).to_string()),
                            ],
                            Some(w.to_json()),
                        );
                        return Ok(out);
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// thm-teoremiccolo: structure validity vs pool validity
// ---------------------------------------------------------------------------

/// Validity-agreement suite: formulas whose universal validity over belief
/// structures coincides with validity over the full generated context of the
/// matching literal pool. Top-level disjunctions of modal clauses are
/// deliberately absent: finite literal pools are too coarse for some of
/// them, and those shapes are documented separately.
pub fn validity_suite() -> Vec<EpistemicFormula> {
    const ONE_ATOM_DEPTH2: &[&str] = &[
        "B[1] p",
        "B[1] ~p",
        "~B[1] p",
        "D[1] p",
        "B[1] (p & ~p)",
        "B[1] (p | ~p)",
        "~B[1] (p & ~p)",
        "B[1] (p -> p)",
        "C[1] p",
        "C[1] ~p",
        "B[1] B[1] p",
        "B[1] D[1] p",
        "D[1] B[1] p",
        "B[1] C[1] p",
        "C[1] B[1] p",
        "C[1] C[1] p",
        "O[1] p",
        "O[1] ~p",
        "U p",
        "E p",
        "U (p | ~p)",
        "E (p & ~p)",
        "B[1] p & C[1] ~p",
        "B[1] p & B[1] ~p",
        "B[1] p & ~B[1] p",
        "B[1] p -> p",
        "B[1] p -> B[1] B[1] p",
        "D[1] p -> B[1] D[1] p",
        "p -> B[1] D[1] p",
    ];
    const TWO_ATOM_DEPTH1: &[&str] = &[
        "B[1] (p -> q) -> (B[1] p -> B[1] q)",
        "B[1] (p & q) -> B[1] p",
        "B[1] p & B[1] q",
        "D[1] (p & q)",
        "C[1] (p & q)",
        "U (p -> q)",
        "E (p & ~q)",
        "O[1] (p & q)",
        "B[1] (p & ~p) -> B[1] q",
    ];
    ONE_ATOM_DEPTH2
        .iter()
        .chain(TWO_ATOM_DEPTH1)
        .map(|t| parse_epistemic(t, 1, Lang::Eel).expect("suite formulas parse"))
        .collect()
}

/// Universal validity over coherent structures must agree with validity over
/// the generated full context of the default literal pool at matching
/// tri-depth, under both correctness conventions.
fn teoremiccolo(
    rng: &mut ChaCha8Rng,
    cfg: &FuzzConfig,
    deadline: &Deadline,
) -> Result<SuiteOutcome> {
    let suite = validity_suite();
    let mut out = SuiteOutcome::default();
    for case in 0..cfg.count {
        deadline.check()?;
        out.cases += 1;
        let phi = gen::pick(rng, &suite).clone();
        let bc = rng.gen_bool(0.5);
        let exact = valid_universal(&phi, bc)?;
        let pool = default_pool(&phi.atoms(), phi.depth(), phi.max_agent().max(1))?;
        let approx = !satisfiable_in_class(&phi.clone().neg(), &pool, bc)?;
        out.checks += 1;
        if exact != approx {
            out.fail(
                case,
                vec![
                    ("phi", phi.render()),
                    ("bc", bc.to_string()),
                    ("structures", exact.to_string()),
                    ("pool", approx.to_string()),
                ],
                None,
            );
            return Ok(out);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// prop-propone: class satisfiability as a diamond at maximal uncertainty
// ---------------------------------------------------------------------------

/// A formula is satisfiable over the generated class iff the point of
/// maximal uncertainty considers it possible.
fn propone(rng: &mut ChaCha8Rng, cfg: &FuzzConfig, deadline: &Deadline) -> Result<SuiteOutcome> {
    let atoms: AtomSet = std::iter::once("p".to_string()).collect();
    let name = vec!["p".to_string()];
    let pool = default_pool(&atoms, 2, 1)?;
    let mut out = SuiteOutcome::default();
    for case in 0..cfg.count {
        deadline.check()?;
        out.cases += 1;
        let phi = gen::rand_epistemic(rng, &name, 1, 2, 3, true);
        let bc = rng.gen_bool(0.5);
        let in_class = satisfiable_in_class(&phi, &pool, bc)?;
        let mu = max_uncertainty_model(&pool, bc)?;
        let possible =
            sat_epistemic(&mu, &EpistemicFormula::diamond(AgentId::one(), phi.clone()));
        out.checks += 1;
        if in_class != possible {
            out.fail(
                case,
                vec![
                    ("phi", phi.render()),
                    ("bc", bc.to_string()),
                    ("satisfiable_in_class", in_class.to_string()),
                    ("diamond_at_max_uncertainty", possible.to_string()),
                ],
                Some(mu.to_json()),
            );
            return Ok(out);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// bc-variants: the two definitions of belief correctness
// ---------------------------------------------------------------------------

/// `satisfies_bc` cross-checks two characterizations internally; this suite
/// feeds it adversarial and provably-correct models and compares against a
/// third independent computation.
fn bc_variants(
    rng: &mut ChaCha8Rng,
    cfg: &FuzzConfig,
    deadline: &Deadline,
) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    for case in 0..cfg.count {
        deadline.check()?;
        out.cases += 1;
        let atoms = names(rng.gen_range(1..=3));
        let m = match rng.gen_range(0..3u8) {
            0 => gen::rand_mbm(rng, &atoms, 2, 5, 2, 2, false),
            1 => gen::rand_mbm(rng, &atoms, 2, 5, 2, 2, true),
            _ => {
                // Correct-by-construction members, point included.
                let point = gen::honest_base(rng, &atoms, 2);
                let mut ctx = Context::new();
                ctx.insert(point.clone());
                for _ in 0..rng.gen_range(0..4) {
                    ctx.insert(gen::honest_base(rng, &atoms, 2));
                }
                PointedModel::new(point, ctx)
            }
        };
        let got = match satisfies_bc(&m) {
            Ok(v) => v,
            Err(Error::InternalInconsistency(msg)) => {
                out.fail(case, vec![("inconsistency", msg)], Some(m.to_json()));
                return Ok(out);
            }
            Err(e) => return Err(e),
        };
        let reference = m.context.contains(&m.base) && m.context.iter().all(is_correct);
        out.checks += 1;
        if got != reference {
            out.fail(
                case,
                vec![
                    ("satisfies_bc", got.to_string()),
                    ("reference", reference.to_string()),
                ],
                Some(m.to_json()),
            );
            return Ok(out);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// QBF sweep
// ---------------------------------------------------------------------------

pub struct QbfRow {
    pub qbf: String,
    pub s: String,
    pub oracle: bool,
    pub reduced: bool,
}

fn render_s(s: &AtomSet) -> String {
    format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))
}

/// One oracle-vs-reduction row. Mutation mode translates the query from the
/// formula with its first quantifier flipped, keeping the honest base: a
/// deliberately wrong translation the sweep must catch.
pub fn qbf_row(
    chi: &QBF,
    s: &AtomSet,
    engine: ReductionEngine,
    standin: UniversalStandIn,
    cap: u64,
    mutate: bool,
) -> Result<QbfRow> {
    let (oracle, reduced) = if mutate {
        (eval_qbf(s, chi), mutated_reduced(chi, s, engine, standin, cap)?)
    } else {
        reduction_check_with(chi, s, engine, standin, cap)?
    };
    Ok(QbfRow { qbf: chi.render(), s: render_s(s), oracle, reduced })
}

fn mutated_reduced(
    chi: &QBF,
    s: &AtomSet,
    engine: ReductionEngine,
    standin: UniversalStandIn,
    cap: u64,
) -> Result<bool> {
    if engine != ReductionEngine::Pool {
        return Err(Error::Input("--mutate supports the pool engine only".into()));
    }
    let mut prefix = chi.prefix().to_vec();
    if let Some(first) = prefix.first_mut() {
        first.0 = match first.0 {
            Quantifier::ForAll => Quantifier::Exists,
            Quantifier::Exists => Quantifier::ForAll,
        };
    }
    let flipped = QBF::new(prefix, chi.matrix().clone()).expect("same atoms, same matrix");
    let ctx = match standin {
        UniversalStandIn::Grid => grid_context_capped(chi, cap)?,
        UniversalStandIn::PowersetClosure => powerset_closure_context(chi, cap)?,
    };
    let inst = build_instance(chi, s);
    let model = PointedModel::new(inst.base, ctx);
    Ok(sat_epistemic(&model, &translate(&flipped)))
}

/// All Boolean functions over one variable, as matrices mentioning it.
const FUNCS1: &[&str] = &["p0 & ~p0", "~p0", "p0", "p0 | ~p0"];

/// All sixteen Boolean functions over two variables, as matrices mentioning
/// both (the prefix of a QBF must cover exactly the matrix atoms).
const FUNCS2: &[&str] = &[
    "(p0 & ~p0) & (p1 & ~p1)",
    "~p0 & ~p1",
    "~p0 & p1",
    "~p0 & (p1 | ~p1)",
    "p0 & ~p1",
    "(p0 | ~p0) & ~p1",
    "~(p0 <-> p1)",
    "~(p0 & p1)",
    "p0 & p1",
    "p0 <-> p1",
    "(p0 | ~p0) & p1",
    "p0 -> p1",
    "p0 & (p1 | ~p1)",
    "p1 -> p0",
    "p0 | p1",
    "(p0 | ~p0) & (p1 | ~p1)",
];

/// Exhaustive agreement table over all matrices (up to Boolean function),
/// quantifier kinds, quantifier orders, and valuations with at most
/// `max_vars` variables.
pub fn qbf_sweep(
    max_vars: usize,
    engine: ReductionEngine,
    standin: UniversalStandIn,
    cap: u64,
    mutate: bool,
    deadline: &Deadline,
) -> Result<Vec<QbfRow>> {
    use epimc_core::formula::parse_explicit;
    if !(1..=2).contains(&max_vars) {
        return Err(Error::Input("--sweep supports 1 or 2 variables".into()));
    }
    let mut rows = Vec::new();
    // One variable: 4 functions x 2 kinds x 2 valuations.
    for matrix in FUNCS1 {
        let f = parse_explicit(matrix, 1)?;
        for q in [Quantifier::ForAll, Quantifier::Exists] {
            let chi = QBF::new(vec![(q, "p0".to_string())], f.clone())
                .expect("single-variable prefix covers the matrix");
            for s_bits in 0..2u32 {
                deadline.check()?;
                let s: AtomSet =
                    if s_bits == 1 { std::iter::once("p0".to_string()).collect() } else { AtomSet::new() };
                rows.push(qbf_row(&chi, &s, engine, standin, cap, mutate)?);
            }
        }
    }
    if max_vars == 1 {
        return Ok(rows);
    }
    // Two variables: 16 functions x 2 orders x 4 kind patterns x 4 valuations.
    let vars = ["p0".to_string(), "p1".to_string()];
    for matrix in FUNCS2 {
        let f = parse_explicit(matrix, 1)?;
        for order in [[0usize, 1], [1, 0]] {
            for kinds in 0..4u32 {
                let prefix: Vec<(Quantifier, String)> = order
                    .iter()
                    .enumerate()
                    .map(|(pos, &v)| {
                        let q = if kinds >> pos & 1 == 0 {
                            Quantifier::ForAll
                        } else {
                            Quantifier::Exists
                        };
                        (q, vars[v].clone())
                    })
                    .collect();
                let chi = QBF::new(prefix, f.clone()).expect("prefix covers the matrix");
                for s_bits in 0..4u32 {
                    deadline.check()?;
                    let s: AtomSet = vars
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| s_bits >> i & 1 == 1)
                        .map(|(_, v)| v.clone())
                        .collect();
                    rows.push(qbf_row(&chi, &s, engine, standin, cap, mutate)?);
                }
            }
        }
    }
    Ok(rows)
}

/// Seeded random closed QBFs over `vars` variables.
pub fn qbf_random(
    seed: u64,
    count: usize,
    vars: usize,
    engine: ReductionEngine,
    standin: UniversalStandIn,
    cap: u64,
    mutate: bool,
    deadline: &Deadline,
) -> Result<Vec<QbfRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for _ in 0..count {
        deadline.check()?;
        let (chi, s) = gen::rand_qbf(&mut rng, vars);
        rows.push(qbf_row(&chi, &s, engine, standin, cap, mutate)?);
    }
    Ok(rows)
}

