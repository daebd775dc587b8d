//! Acceptance suite: one test per acceptance criterion.
//!
//! Every test prints exactly one `criterion N: PASS` or `criterion N: FAIL`
//! line (run with `-- --nocapture` to see the lines for passing tests;
//! additional analysis lines may follow the verdict line). Scales, seeds and
//! time budgets are pinned in code.
//!
//! Criterion 4 (depth invariance of structure satisfaction) FAILS by design:
//! the property is genuinely false for the complement modality, the sweep
//! finds the witness, and the test reports it honestly instead of shrinking
//! the sweep until the defect is invisible. See README, "Known semantic
//! notes".

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use epimc_core::beliefbase::{is_alternative, sat_epistemic, BeliefBase, Context, PointedModel};
use epimc_core::contextgen::{default_pool, max_uncertainty_model, satisfiable_in_class};
use epimc_core::formula::{
    parse_epistemic, AgentId, AtomSet, EpistemicFormula, ExplicitFormula, Lang,
};
use epimc_core::kripke::{
    filtrate, kripke_to_mbm, mbm_to_kripke, sat_kripke, tree_family, unravel, KripkeModel,
    PointedKripke,
};
use epimc_core::qbfreduce::{
    alternating_chain, instance_size, reduction_check, InstanceSize, Quantifier, ReductionEngine,
    QBF,
};
use epimc_core::structures::{
    canonical_base, enumerate_worlds, find_structure_countermodel, restrict, sat_structure, tau,
    tau_mbm, valid_universal, WorldFilter, DEFAULT_SAT_CAP, DEFAULT_WORLD_CAP,
};

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn ag(i: u8) -> AgentId {
    AgentId::new(i).expect("nonzero agent index")
}

fn eel(text: &str) -> EpistemicFormula {
    parse_epistemic(text, 2, Lang::Eel).expect("acceptance formulas parse")
}

fn atoms_of(names: &[&str]) -> AtomSet {
    names.iter().map(|s| s.to_string()).collect()
}

fn pass(n: usize) {
    println!("criterion {n}: PASS");
}

fn fail(n: usize, detail: &str) -> ! {
    println!("criterion {n}: FAIL ({detail})");
    panic!("criterion {n} failed: {detail}");
}

fn budget(n: usize, t0: Instant, limit: Duration) {
    let spent = t0.elapsed();
    assert!(spent <= limit, "criterion {n} exceeded its time budget: {spent:?} > {limit:?}");
}

// Seeded random instances (same shapes as the CLI fuzz generators).
mod gen {
    use super::*;

    pub fn pick<'a, T, R: Rng>(rng: &mut R, xs: &'a [T]) -> &'a T {
        &xs[rng.gen_range(0..xs.len())]
    }

    fn agent<R: Rng>(rng: &mut R, agents: u8) -> AgentId {
        ag(rng.gen_range(1..=agents))
    }

    pub fn rand_state<R: Rng>(rng: &mut R, atoms: &[String]) -> AtomSet {
        atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
    }

    pub fn rand_explicit<R: Rng>(
        rng: &mut R,
        atoms: &[String],
        agents: u8,
        size: usize,
        tri: usize,
    ) -> ExplicitFormula {
        fn leaf<R: Rng>(rng: &mut R, atoms: &[String]) -> ExplicitFormula {
            match rng.gen_range(0..12u8) {
                0 => ExplicitFormula::Top,
                1 => ExplicitFormula::Bottom,
                _ => {
                    let a = ExplicitFormula::atom(pick(rng, atoms).clone());
                    if rng.gen_bool(0.5) {
                        a
                    } else {
                        a.neg()
                    }
                }
            }
        }
        if size == 0 {
            return leaf(rng, atoms);
        }
        match rng.gen_range(0..100u8) {
            0..=29 => leaf(rng, atoms),
            30..=54 => rand_explicit(rng, atoms, agents, size - 1, tri).neg(),
            55..=79 => rand_explicit(rng, atoms, agents, size - 1, tri)
                .and(rand_explicit(rng, atoms, agents, size - 1, tri)),
            _ if tri > 0 => ExplicitFormula::tri(
                agent(rng, agents),
                rand_explicit(rng, atoms, agents, size - 1, tri - 1),
            ),
            _ => rand_explicit(rng, atoms, agents, size - 1, 0).neg(),
        }
    }

    pub fn rand_base<R: Rng>(
        rng: &mut R,
        atoms: &[String],
        agents: u8,
        max_members: usize,
        tri: usize,
    ) -> BeliefBase {
        let mut b = BeliefBase::new(agents).with_state(rand_state(rng, atoms));
        for i in 1..=agents {
            for _ in 0..rng.gen_range(0..=max_members) {
                b.insert_member(ag(i), rand_explicit(rng, atoms, agents, 2, tri));
            }
        }
        b
    }

    pub fn rand_mbm<R: Rng>(
        rng: &mut R,
        atoms: &[String],
        agents: u8,
        max_ctx: usize,
        max_members: usize,
        tri: usize,
        point_in_ctx: bool,
    ) -> PointedModel {
        let point = rand_base(rng, atoms, agents, max_members, tri);
        let mut ctx = Context::new();
        if point_in_ctx {
            ctx.insert(point.clone());
        }
        let target = rng.gen_range(1..=max_ctx);
        for _ in 0..2 * max_ctx {
            if ctx.len() >= target {
                break;
            }
            ctx.insert(rand_base(rng, atoms, agents, max_members, tri));
        }
        PointedModel::new(point, ctx)
    }

    pub fn rand_epistemic<R: Rng>(
        rng: &mut R,
        atoms: &[String],
        agents: u8,
        depth: usize,
        size: usize,
        cbox: bool,
    ) -> EpistemicFormula {
        fn leaf<R: Rng>(rng: &mut R, atoms: &[String]) -> EpistemicFormula {
            match rng.gen_range(0..12u8) {
                0 => EpistemicFormula::Top,
                1 => EpistemicFormula::Bottom,
                _ => {
                    let a = EpistemicFormula::atom(pick(rng, atoms).clone());
                    if rng.gen_bool(0.5) {
                        a
                    } else {
                        a.neg()
                    }
                }
            }
        }
        if size == 0 {
            return leaf(rng, atoms);
        }
        match rng.gen_range(0..100u8) {
            0..=24 => leaf(rng, atoms),
            25..=44 => rand_epistemic(rng, atoms, agents, depth, size - 1, cbox).neg(),
            45..=59 => rand_epistemic(rng, atoms, agents, depth, size - 1, cbox)
                .and(rand_epistemic(rng, atoms, agents, depth, size - 1, cbox)),
            _ if depth > 0 => {
                let i = agent(rng, agents);
                let body = rand_epistemic(rng, atoms, agents, depth - 1, size - 1, cbox);
                if cbox && rng.gen_bool(0.4) {
                    EpistemicFormula::cbox(i, body)
                } else {
                    EpistemicFormula::box_(i, body)
                }
            }
            _ => rand_epistemic(rng, atoms, agents, 0, size - 1, cbox).neg(),
        }
    }

    pub fn rand_kripke<R: Rng>(
        rng: &mut R,
        atoms: &[String],
        agents: u8,
        max_worlds: usize,
    ) -> PointedKripke {
        let n = rng.gen_range(1..=max_worlds);
        let ids: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let mut m = KripkeModel::new(agents, ids.clone()).expect("generated ids are valid");
        for i in 1..=agents {
            for u in &ids {
                for v in &ids {
                    if rng.gen_bool(0.4) {
                        m.add_edge(ag(i), u, v).expect("generated worlds exist");
                    }
                }
            }
        }
        for a in atoms {
            for w in &ids {
                if rng.gen_bool(0.5) {
                    m.set_atom_true(a, w).expect("generated atoms are valid");
                }
            }
        }
        PointedKripke::new(m, ids[0].clone()).expect("point is a world")
    }

    pub fn rand_qbf<R: Rng>(rng: &mut R, vars: usize) -> (QBF, AtomSet) {
        let names: Vec<String> = (0..vars).map(|i| format!("p{i}")).collect();
        let matrix = loop {
            let f = rand_explicit(rng, &names, 1, 4, 0);
            if f.atoms().len() == vars {
                break f;
            }
        };
        let mut order = names.clone();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let prefix: Vec<(Quantifier, String)> = order
            .into_iter()
            .map(|v| {
                let q = if rng.gen_bool(0.5) { Quantifier::ForAll } else { Quantifier::Exists };
                (q, v)
            })
            .collect();
        let chi = QBF::new(prefix, matrix).expect("prefix covers exactly the matrix atoms");
        let s = rand_state(rng, &names);
        (chi, s)
    }
}

/// Per-case atom universe: the first 1..=3 names of `p,q,r`.
fn case_atoms<R: Rng>(rng: &mut R, max: usize) -> Vec<String> {
    let n = rng.gen_range(1..=max);
    ["p", "q", "r"][..n].iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------------
// 1. Kripke transfer, both directions, box fragment
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_kripke_transfer_both_directions() {
    let n = 1;
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);

    // Forward: 500 models x 50 formulas.
    for case in 0..500 {
        let atoms = case_atoms(&mut rng, 3);
        let m = gen::rand_mbm(&mut rng, &atoms, 2, 5, 2, 2, false);
        let pk = mbm_to_kripke(&m);
        for _ in 0..50 {
            let phi = gen::rand_epistemic(&mut rng, &atoms, 2, 3, 4, false);
            let direct = sat_epistemic(&m, &phi);
            let transferred = sat_kripke(&pk, &phi);
            if direct != transferred {
                fail(n, &format!("forward case {case}: phi={} direct={direct} kripke={transferred}", phi.render()));
            }
        }
    }

    // Backward: 200 Kripke models x 50 formulas, scoped to the drawn atoms.
    for case in 0..200 {
        let atoms = case_atoms(&mut rng, 3);
        let guards: AtomSet = atoms.iter().cloned().collect();
        let pk = gen::rand_kripke(&mut rng, &atoms, 2, 5);
        let m = kripke_to_mbm(&pk, &guards);
        for _ in 0..50 {
            let phi = gen::rand_epistemic(&mut rng, &atoms, 2, 3, 4, false);
            let original = sat_kripke(&pk, &phi);
            let transferred = sat_epistemic(&m, &phi);
            if original != transferred {
                fail(n, &format!("backward case {case}: phi={} kripke={original} direct={transferred}", phi.render()));
            }
        }
    }

    budget(n, t0, Duration::from_secs(60));
    pass(n);
}

// ---------------------------------------------------------------------------
// 2. Forward transfer for the extended language (complement modality)
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_extended_forward_transfer() {
    let n = 2;
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);

    // The complement transfer needs the point inside the context.
    for case in 0..500 {
        let atoms = case_atoms(&mut rng, 3);
        let m = gen::rand_mbm(&mut rng, &atoms, 2, 5, 2, 2, true);
        let pk = mbm_to_kripke(&m);
        for _ in 0..50 {
            let phi = gen::rand_epistemic(&mut rng, &atoms, 2, 3, 4, true);
            let direct = sat_epistemic(&m, &phi);
            let transferred = sat_kripke(&pk, &phi);
            if direct != transferred {
                fail(n, &format!("case {case}: phi={} direct={direct} kripke={transferred}", phi.render()));
            }
        }
    }

    budget(n, t0, Duration::from_secs(60));
    pass(n);
}

// ---------------------------------------------------------------------------
// 3. Tree pipeline reproduces verdicts
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_tree_pipeline_reproduces_verdicts() {
    let n = 3;
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);

    for case in 0..100 {
        let atoms = case_atoms(&mut rng, 2);
        let m = gen::rand_mbm(&mut rng, &atoms, 2, 4, 2, 1, false);
        let phi = gen::rand_epistemic(&mut rng, &atoms, 2, 2, 4, false);
        let expected = sat_epistemic(&m, &phi);

        // Model -> Kripke -> filtration by the subformulas -> bounded
        // unraveling -> node bases evaluated within their own family.
        let pk = mbm_to_kripke(&m);
        let sigma = phi.subformulas();
        let (filtered, class_of) = filtrate(pk.model(), &sigma).expect("sigma is closed");
        let pf = PointedKripke::new(filtered, class_of[pk.world()].clone())
            .expect("the point's class exists");
        let tree = unravel(&pf, phi.depth()).expect("bounded unraveling");
        let family = tree_family(&tree, &phi.atoms()).expect("unraveled models are trees");
        let got = sat_epistemic(&family, &phi);

        if got != expected {
            fail(n, &format!("case {case}: phi={} model={expected} pipeline={got}", phi.render()));
        }
    }

    budget(n, t0, Duration::from_secs(300));
    pass(n);
}

// ---------------------------------------------------------------------------
// 4. Depth invariance of structure satisfaction (honest failure)
// ---------------------------------------------------------------------------

/// Depth-`<=2` query pool over one atom for `agents` agents, complement
/// modality included.
fn invariance_pool(agents: u8, max_depth: usize) -> Vec<EpistemicFormula> {
    let lits = vec![EpistemicFormula::atom("p"), EpistemicFormula::atom("p").neg()];
    let modal1: Vec<EpistemicFormula> = (1..=agents)
        .flat_map(|i| {
            lits.iter().flat_map(move |l| {
                [EpistemicFormula::box_(ag(i), l.clone()), EpistemicFormula::cbox(ag(i), l.clone())]
            })
        })
        .collect();
    let mut pool = lits.clone();
    pool.extend(modal1.iter().cloned());
    pool.extend(modal1.iter().map(|f| f.clone().neg()));
    for a in &modal1 {
        for b in &modal1 {
            pool.push(a.clone().and(b.clone()));
        }
    }
    if max_depth >= 2 {
        for i in 1..=agents {
            for m in &modal1 {
                pool.push(EpistemicFormula::box_(ag(i), m.clone()));
                pool.push(EpistemicFormula::cbox(ag(i), m.clone()));
            }
        }
    }
    pool
}

#[test]
fn criterion_04_depth_invariance_exhaustive() {
    let n = 4;
    let p = atoms_of(&["p"]);

    // Exhaustive sweep over every feasible (agents, k) slice: one agent up to
    // k = 2, two agents at k = 1. (Deeper slices are astronomically large;
    // the defect below already appears at one agent, k = 2.)
    let slices: &[(u8, usize)] = &[(1, 1), (1, 2), (2, 1)];
    let mut violations = 0usize;
    let mut box_violations = 0usize;
    let mut witness: Option<String> = None;

    for &(agents, k) in slices {
        let worlds = enumerate_worlds(&p, agents, k, WorldFilter::Coherent, DEFAULT_WORLD_CAP)
            .expect("slice is under the world cap");
        let pool = invariance_pool(agents, k.min(2));
        for w in &worlds {
            for phi in &pool {
                let d = phi.depth();
                if d >= k {
                    continue;
                }
                let full = sat_structure(w, phi).expect("depth fits");
                for j in d..k {
                    let shallow = restrict(w, j).expect("j <= depth");
                    let red = sat_structure(&shallow, phi).expect("depth fits");
                    if red != full {
                        violations += 1;
                        if phi.render().contains("C[") {
                            // counted below as complement-involving
                        } else {
                            box_violations += 1;
                        }
                        witness.get_or_insert_with(|| {
                            format!(
                                "phi={} agents={agents} k={k} restricted_to={j} full={full} restricted={red}",
                                phi.render()
                            )
                        });
                    }
                }
            }
        }
    }

    if violations == 0 {
        pass(n);
        return;
    }
    println!(
        "criterion 4: FAIL ({violations} depth-invariance violations; first witness: {})",
        witness.as_deref().unwrap_or("-")
    );
    println!(
        "criterion 4 analysis: satisfaction restricted to a formula's modal depth is NOT \
         invariant for the complement modality ({} of {violations} violations involve it; \
         the box fragment alone shows {box_violations} at these depths). \
         See README, \"Known semantic notes\".",
        violations - box_violations
    );
    panic!(
        "depth invariance fails for the complement modality; honest failure, \
         see README \"Known semantic notes\""
    );
}

// ---------------------------------------------------------------------------
// 5. Cross-engine validity agreement on the enumerated pool
// ---------------------------------------------------------------------------

/// The frozen validity-agreement pool (kept in sync with the CLI suite).
fn agreement_pool() -> Vec<EpistemicFormula> {
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
    ONE_ATOM_DEPTH2.iter().chain(TWO_ATOM_DEPTH1).map(|t| eel(t)).collect()
}

#[test]
fn criterion_05_cross_engine_validity_agreement() {
    let n = 5;
    let t0 = Instant::now();

    for phi in agreement_pool() {
        for bc in [false, true] {
            let exact = valid_universal(&phi, bc).expect("within caps");
            let pool = default_pool(&phi.atoms(), phi.depth(), phi.max_agent().max(1))
                .expect("pool parameters are valid");
            let approx =
                !satisfiable_in_class(&phi.clone().neg(), &pool, bc).expect("within caps");
            if exact != approx {
                fail(n, &format!("phi={} bc={bc} structures={exact} pool={approx}", phi.render()));
            }
        }
    }

    // The two shapes excluded from the pool really do diverge: finite literal
    // pools are too coarse for them. Pinned so the exclusion stays justified.
    for text in ["B[1] p | D[1] B[1] p", "U (B[1] p -> p)"] {
        let phi = eel(text);
        let diverges = [false, true].into_iter().any(|bc| {
            let exact = valid_universal(&phi, bc).expect("within caps");
            let pool = default_pool(&phi.atoms(), phi.depth(), 1).expect("valid pool");
            let approx =
                !satisfiable_in_class(&phi.clone().neg(), &pool, bc).expect("within caps");
            exact != approx
        });
        if !diverges {
            fail(n, &format!("excluded shape {text:?} no longer diverges; re-admit it"));
        }
    }

    budget(n, t0, Duration::from_secs(120));
    pass(n);
}

// ---------------------------------------------------------------------------
// 6. QBF reduction agreement: exhaustive <= 2 vars, seeded 3 vars
// ---------------------------------------------------------------------------

/// All Boolean functions over one and two variables, as matrices mentioning
/// every variable (a prefix must cover exactly the matrix atoms).
const FUNCS1: &[&str] = &["p0 & ~p0", "~p0", "p0", "p0 | ~p0"];
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

fn exhaustive_qbfs() -> Vec<(QBF, AtomSet)> {
    use epimc_core::formula::parse_explicit;
    let mut out = Vec::new();
    for matrix in FUNCS1 {
        let f = parse_explicit(matrix, 1).expect("matrices parse");
        for q in [Quantifier::ForAll, Quantifier::Exists] {
            let chi = QBF::new(vec![(q, "p0".into())], f.clone()).expect("prefix covers matrix");
            for s_bits in 0..2u32 {
                let s: AtomSet =
                    if s_bits == 1 { atoms_of(&["p0"]) } else { AtomSet::new() };
                out.push((chi.clone(), s));
            }
        }
    }
    let vars = ["p0".to_string(), "p1".to_string()];
    for matrix in FUNCS2 {
        let f = parse_explicit(matrix, 1).expect("matrices parse");
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
                let chi = QBF::new(prefix, f.clone()).expect("prefix covers matrix");
                for s_bits in 0..4u32 {
                    let s: AtomSet = vars
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| s_bits >> i & 1 == 1)
                        .map(|(_, v)| v.clone())
                        .collect();
                    out.push((chi.clone(), s));
                }
            }
        }
    }
    out
}

#[test]
fn criterion_06_qbf_reduction_agreement() {
    let n = 6;
    let t0 = Instant::now();

    // Exhaustive at <= 2 variables, on both engines.
    let rows = exhaustive_qbfs();
    assert_eq!(rows.len(), 16 + 512, "the sweep is the full function space");
    for engine in [ReductionEngine::Pool, ReductionEngine::Structures] {
        for (chi, s) in &rows {
            let (oracle, reduced) = reduction_check(chi, s, engine).expect("within caps");
            if oracle != reduced {
                fail(n, &format!("qbf={} s={s:?} engine={engine:?} oracle={oracle} reduced={reduced}", chi.render()));
            }
        }
    }

    // 100 seeded random three-variable instances.
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for case in 0..100 {
        let (chi, s) = gen::rand_qbf(&mut rng, 3);
        let (oracle, reduced) =
            reduction_check(&chi, &s, ReductionEngine::Pool).expect("within caps");
        if oracle != reduced {
            fail(n, &format!("random case {case}: qbf={} s={s:?} oracle={oracle} reduced={reduced}", chi.render()));
        }
    }

    budget(n, t0, Duration::from_secs(600));
    pass(n);
}

// ---------------------------------------------------------------------------
// 7. Class satisfiability as possibility at maximal uncertainty
// ---------------------------------------------------------------------------

/// Enumerated one-atom query pool of modal depth <= 2 (with negations).
fn satisfiability_pool() -> Vec<EpistemicFormula> {
    let lits = vec![
        EpistemicFormula::atom("p"),
        EpistemicFormula::atom("p").neg(),
        EpistemicFormula::Top,
        EpistemicFormula::Bottom,
    ];
    let modal1: Vec<EpistemicFormula> = lits
        .iter()
        .flat_map(|l| {
            [EpistemicFormula::box_(ag(1), l.clone()), EpistemicFormula::cbox(ag(1), l.clone())]
        })
        .collect();
    let modal2: Vec<EpistemicFormula> = modal1
        .iter()
        .flat_map(|m| {
            [EpistemicFormula::box_(ag(1), m.clone()), EpistemicFormula::cbox(ag(1), m.clone())]
        })
        .collect();
    let mut pool = Vec::new();
    pool.extend(lits.iter().cloned());
    pool.extend(modal1.iter().cloned());
    pool.extend(modal2.iter().cloned());
    for a in &modal1 {
        for b in &modal1 {
            pool.push(a.clone().and(b.clone()));
        }
    }
    let negs: Vec<EpistemicFormula> = pool.iter().map(|f| f.clone().neg()).collect();
    pool.extend(negs);
    pool
}

#[test]
fn criterion_07_class_satisfiability_as_diamond() {
    let n = 7;
    let t0 = Instant::now();
    let pool = default_pool(&atoms_of(&["p"]), 2, 1).expect("valid pool");

    for bc in [false, true] {
        let mu = max_uncertainty_model(&pool, bc).expect("within caps");
        for phi in satisfiability_pool() {
            let in_class = satisfiable_in_class(&phi, &pool, bc).expect("within caps");
            let possible =
                sat_epistemic(&mu, &EpistemicFormula::diamond(ag(1), phi.clone()));
            if in_class != possible {
                fail(n, &format!("phi={} bc={bc} satisfiable={in_class} diamond={possible}", phi.render()));
            }
        }
    }

    budget(n, t0, Duration::from_secs(120));
    pass(n);
}

// ---------------------------------------------------------------------------
// 8. Separation pins: finite contexts vs the universal class; correctness
// ---------------------------------------------------------------------------

/// Validity of `phi` over every pointed Kripke model with at most two worlds
/// and one agent over atom `p`; returns (all frames, reflexive frames).
fn small_kripke_validity(phi: &EpistemicFormula) -> (bool, bool) {
    let mut valid_all = true;
    let mut valid_reflexive = true;
    for n in 1..=2usize {
        let ids: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        for rel_bits in 0..1u32 << (n * n) {
            for val_bits in 0..1u32 << n {
                let mut m = KripkeModel::new(1, ids.clone()).expect("fresh ids");
                for u in 0..n {
                    for v in 0..n {
                        if rel_bits >> (u * n + v) & 1 == 1 {
                            m.add_edge(ag(1), &ids[u], &ids[v]).expect("worlds exist");
                        }
                    }
                }
                for w in 0..n {
                    if val_bits >> w & 1 == 1 {
                        m.set_atom_true("p", &ids[w]).expect("valid atom");
                    }
                }
                let reflexive = (0..n).all(|i| rel_bits >> (i * n + i) & 1 == 1);
                for point in 0..n {
                    let pk = PointedKripke::new(m.clone(), ids[point].clone())
                        .expect("point is a world");
                    if !sat_kripke(&pk, phi) {
                        valid_all = false;
                        if reflexive {
                            valid_reflexive = false;
                        }
                    }
                }
            }
        }
    }
    (valid_all, valid_reflexive)
}

#[test]
fn criterion_08_separation_pins() {
    let n = 8;

    // "Someone considers p-and-not-q possible" is valid over the unbounded
    // class of structures, yet refuted by a concrete finite-context model.
    let somewhere = eel("E (p & ~q)");
    if !valid_universal(&somewhere, false).expect("within caps") {
        fail(n, "E (p & ~q) is no longer valid over all structures");
    }
    let m = PointedModel::from_json(include_str!("data/separation_model.json"))
        .expect("shipped model parses");
    if sat_epistemic(&m, &somewhere) {
        fail(n, "the shipped finite model no longer refutes E (p & ~q)");
    }

    // The truth axiom splits on belief correctness in the structures engine...
    let truth = eel("B[1] p -> p");
    if valid_universal(&truth, false).expect("within caps") {
        fail(n, "B[1] p -> p must not be valid without correctness");
    }
    if find_structure_countermodel(&truth, false, DEFAULT_WORLD_CAP, DEFAULT_SAT_CAP)
        .expect("within caps")
        .is_none()
    {
        fail(n, "expected a structure countermodel for B[1] p -> p");
    }
    if !valid_universal(&truth, true).expect("within caps") {
        fail(n, "B[1] p -> p must be valid under correctness");
    }

    // ...and identically on enumerated Kripke frames: falsifiable in general,
    // valid once every world sees itself.
    let (all_frames, reflexive_frames) = small_kripke_validity(&truth);
    if all_frames {
        fail(n, "B[1] p -> p must fail on some small Kripke model");
    }
    if !reflexive_frames {
        fail(n, "B[1] p -> p must hold on all small reflexive Kripke models");
    }

    pass(n);
}

// ---------------------------------------------------------------------------
// 9. Canonical bases reach every coherent world
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_canonical_base_surjectivity() {
    let n = 9;
    let t0 = Instant::now();
    let p = atoms_of(&["p"]);
    let none = AtomSet::new();

    // Depth 1: point each canonical base at the family of all of them.
    let worlds = enumerate_worlds(&p, 1, 1, WorldFilter::Coherent, DEFAULT_WORLD_CAP)
        .expect("8 worlds");
    let ctx = Context::from_members(worlds.iter().map(|w| canonical_base(w, &none)));
    if ctx.len() != worlds.len() {
        fail(n, "depth-1 canonical bases are not pairwise distinct");
    }
    for w in &worlds {
        let m = PointedModel::new(canonical_base(w, &none), ctx.clone());
        if &tau_mbm(&m, 1, &p).expect("within caps") != w {
            fail(n, &format!("depth-1 world not recovered: {}", w.to_json()));
        }
    }

    // Depth 2: rebuild the alternative graph between all 512 canonical bases
    // and read each world back through the hierarchy map.
    let worlds = enumerate_worlds(&p, 1, 2, WorldFilter::Coherent, DEFAULT_WORLD_CAP)
        .expect("512 worlds");
    let bases: Vec<BeliefBase> = worlds.iter().map(|w| canonical_base(w, &none)).collect();
    let distinct: BTreeSet<&BeliefBase> = bases.iter().collect();
    if distinct.len() != worlds.len() {
        fail(n, "depth-2 canonical bases are not pairwise distinct");
    }
    let ids: Vec<String> = (0..bases.len()).map(|i| format!("b{i}")).collect();
    let mut km = KripkeModel::new(1, ids.clone()).expect("fresh ids");
    for (i, b) in bases.iter().enumerate() {
        if b.state().contains("p") {
            km.set_atom_true("p", &ids[i]).expect("valid atom");
        }
        for (j, b2) in bases.iter().enumerate() {
            if is_alternative(b, ag(1), b2) {
                km.add_edge(ag(1), &ids[i], &ids[j]).expect("worlds exist");
            }
        }
    }
    for (i, w) in worlds.iter().enumerate() {
        let pk = PointedKripke::new(km.clone(), ids[i].clone()).expect("point is a world");
        if &tau(&pk, 2, &p).expect("within caps") != w {
            fail(n, &format!("depth-2 world not recovered: {}", w.to_json()));
        }
    }

    budget(n, t0, Duration::from_secs(120));
    pass(n);
}

// ---------------------------------------------------------------------------
// 10. Reduction size bounds across the alternating chain family
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_reduction_size_bounds() {
    let n = 10;
    let s = AtomSet::new();
    let sizes: Vec<InstanceSize> =
        (1..=5).map(|m| instance_size(&alternating_chain(m), &s)).collect();

    // Exact regression pins (quantifiers, members, base chars, query chars).
    let expected = [
        (2, 2, 26, 63),
        (3, 4, 111, 113),
        (4, 6, 253, 163),
        (5, 8, 452, 211),
        (6, 10, 708, 261),
    ];
    for (sz, want) in sizes.iter().zip(expected) {
        let got =
            (sz.quantifiers, sz.base_members, sz.base_rendered_len, sz.query_rendered_len);
        if got != want {
            fail(n, &format!("size pins moved: got {got:?}, want {want:?}"));
        }
    }

    // Shape: the rendered query grows by a bounded step per extra quantifier
    // (linear, hence sub-quadratic), the member count is exactly linear, and
    // the rendered description is quadratic with constant second differences.
    for w in sizes.windows(2) {
        let step = w[1].query_rendered_len - w[0].query_rendered_len;
        if step > 51 {
            fail(n, &format!("query growth step {step} exceeds the linear bound"));
        }
    }
    for (m, sz) in (1..=5).zip(&sizes) {
        if sz.base_members != 2 * m {
            fail(n, &format!("member count at m={m} is {}, want {}", sz.base_members, 2 * m));
        }
    }
    let diffs: Vec<usize> =
        sizes.windows(2).map(|w| w[1].base_rendered_len - w[0].base_rendered_len).collect();
    if !diffs.windows(2).all(|d| d[1] - d[0] == 57) {
        fail(n, &format!("description second differences moved: {diffs:?}"));
    }

    pass(n);
}
