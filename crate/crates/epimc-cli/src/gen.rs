//! Seeded random instance generators for the fuzz suites.
//!
//! All generators draw from a caller-supplied RNG; suites seed a ChaCha
//! stream cipher from the mandatory `--seed`, so every run is reproducible.

use epimc_core::beliefbase::{BeliefBase, Context, PointedModel};
use epimc_core::formula::{AgentId, AtomSet, EpistemicFormula, ExplicitFormula};
use epimc_core::kripke::{KripkeModel, PointedKripke};
use epimc_core::qbfreduce::{Quantifier, QBF};
use rand::Rng;

/// Uniform pick from a non-empty slice.
pub fn pick<'a, T, R: Rng>(rng: &mut R, xs: &'a [T]) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

fn agent<R: Rng>(rng: &mut R, agents: u8) -> AgentId {
    AgentId::new(rng.gen_range(1..=agents)).expect("agent index is nonzero")
}

/// A random subset of `atoms`.
pub fn rand_state<R: Rng>(rng: &mut R, atoms: &[String]) -> AtomSet {
    atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// Random base-language formula with at most `size` connectives and
/// belief-operator nesting at most `tri`.
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

/// Random belief base: random state plus up to `max_members` member
/// formulas per agent, each of belief-nesting depth at most `tri`.
pub fn rand_base<R: Rng>(
    rng: &mut R,
    atoms: &[String],
    agents: u8,
    max_members: usize,
    tri: usize,
) -> BeliefBase {
    let mut b = BeliefBase::new(agents).with_state(rand_state(rng, atoms));
    for i in 1..=agents {
        let id = AgentId::new(i).expect("agent index is nonzero");
        for _ in 0..rng.gen_range(0..=max_members) {
            b.insert_member(id, rand_explicit(rng, atoms, agents, 2, tri));
        }
    }
    b
}

/// A base that provably satisfies belief correctness: members are literals
/// true in its own state, plus first-person reports of those members.
pub fn honest_base<R: Rng>(rng: &mut R, atoms: &[String], agents: u8) -> BeliefBase {
    let state = rand_state(rng, atoms);
    let mut b = BeliefBase::new(agents).with_state(state.clone());
    for i in 1..=agents {
        let id = AgentId::new(i).expect("agent index is nonzero");
        let mut lits = Vec::new();
        for a in atoms {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let lit = if state.contains(a) {
                ExplicitFormula::atom(a.clone())
            } else {
                ExplicitFormula::atom(a.clone()).neg()
            };
            b.insert_member(id, lit.clone());
            lits.push(lit);
        }
        // A report about an inserted member is itself correct.
        if !lits.is_empty() && rng.gen_bool(0.5) {
            let lit = pick(rng, &lits).clone();
            b.insert_member(id, ExplicitFormula::tri(id, lit));
        }
    }
    b
}

/// Random pointed model: a designated base plus a context of up to
/// `max_ctx` bases. With `point_in_ctx` the designated base is a member.
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

/// Random modal formula with nesting depth at most `depth` and at most
/// `size` connectives; `cbox` admits the complement modality.
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

/// Random pointed Kripke model with 1..=`max_worlds` worlds, edge density
/// 0.4 per agent and atom density 0.5 per world.
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
        let id = AgentId::new(i).expect("agent index is nonzero");
        for u in &ids {
            for v in &ids {
                if rng.gen_bool(0.4) {
                    m.add_edge(id, u, v).expect("generated worlds exist");
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

/// Random closed prenex QBF over `vars` variables (`p0..`), with every
/// variable occurring in the matrix, plus a random valuation over them.
pub fn rand_qbf<R: Rng>(rng: &mut R, vars: usize) -> (QBF, AtomSet) {
    let names: Vec<String> = (0..vars).map(|i| format!("p{i}")).collect();
    let matrix = loop {
        let f = rand_explicit(rng, &names, 1, 4, 0);
        if f.atoms().len() == vars {
            break f;
        }
    };
    // Random quantifier order and kinds over all variables.
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
