//! Finite generation of integrity-constrained contexts.
//!
//! The universal context (every belief base whatsoever) is infinite, so the
//! checker approximates it by a [`UniversePool`]: a finite atom set, a
//! finite menu of permitted base members, an agent count, and a flag for
//! whether states range over all subsets of the atoms. [`generate`]
//! enumerates every base over a pool that satisfies an integrity constraint
//! (and, optionally, belief correctness) in canonical order; [`check`] runs
//! an epistemic query against the point placed in that generated context.
//! [`max_uncertainty_model`] builds the all-empty-base model over the
//! unconstrained context, and [`satisfiable_in_class`] searches it for a
//! satisfying point. Verdicts are exact for the given pool; they
//! approximate the unbounded-context semantics and the pool parameters are
//! part of any reported result.
//!
//! Pool descriptor JSON:
//! `{ "atoms": ["p"], "agents": 1, "tri_depth": 1, "extra_formulas": ["X[1] p"] }`
//! where `tri_depth` (optional) includes every iterated belief-prefixed
//! literal up to that depth, `extra_formulas` (optional) add hand-picked
//! members, and atoms mentioned by extras are absorbed into the atom set.
//! An optional `"max_state": false` pins states to the empty set.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::beliefbase::{is_correct, sat_epistemic, sat_explicit, BeliefBase, Context, PointedModel};
use crate::error::{Error, Result};
use crate::formula::{is_valid_atom, parse_explicit, AtomSet, EpistemicFormula, ExplicitFormula};

/// Default ceiling on the number of permitted base members of a pool.
pub const DEFAULT_FORMULA_CAP: u64 = 12;

/// Default ceiling on candidate bases enumerated before filtering.
pub const DEFAULT_CONTEXT_CAP: u64 = 4096;

// ---------------------------------------------------------------------------
// UniversePool
// ---------------------------------------------------------------------------

/// A finite universe of belief bases: states over `atoms` (all subsets, or
/// just the empty one), per-agent bases drawn from the member menu.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniversePool {
    atoms: AtomSet,
    formulas: Vec<ExplicitFormula>,
    agents: u8,
    max_state: bool,
}

impl UniversePool {
    /// Build a pool from a member menu, with the default menu-size cap.
    ///
    /// The menu is closed under belief-operator bodies (if `X[i] g` can be
    /// a member, `g` can too), deduplicated, and sorted by rendered text.
    /// Every member must mention only pool atoms and agents.
    pub fn new(
        atoms: &AtomSet,
        formulas: impl IntoIterator<Item = ExplicitFormula>,
        agents: u8,
        max_state: bool,
    ) -> Result<Self> {
        Self::with_formula_cap(atoms, formulas, agents, max_state, DEFAULT_FORMULA_CAP)
    }

    /// As [`UniversePool::new`] with an explicit menu-size cap.
    pub fn with_formula_cap(
        atoms: &AtomSet,
        formulas: impl IntoIterator<Item = ExplicitFormula>,
        agents: u8,
        max_state: bool,
        formula_cap: u64,
    ) -> Result<Self> {
        if agents == 0 {
            return Err(Error::Input("a pool needs at least one agent".into()));
        }
        for a in atoms {
            if !is_valid_atom(a) {
                return Err(Error::Input(format!("invalid atom name {a:?}")));
            }
        }
        // Close the menu under belief-operator bodies.
        let mut menu = BTreeSet::new();
        for f in formulas {
            collect_with_tri_bodies(&f, &mut menu);
        }
        for f in &menu {
            if !f.atoms().is_subset(atoms) {
                return Err(Error::Input(format!(
                    "pool member {} mentions atoms outside the pool",
                    f.render()
                )));
            }
            if f.max_agent() > agents {
                return Err(Error::Input(format!(
                    "pool member {} mentions agent {} but the pool has {} agents",
                    f.render(),
                    f.max_agent(),
                    agents
                )));
            }
        }
        if menu.len() as u64 > formula_cap {
            return Err(Error::cap("pool formulas", menu.len() as u64, formula_cap));
        }
        let mut formulas: Vec<ExplicitFormula> = menu.into_iter().collect();
        formulas.sort_by_key(|f| f.render());
        Ok(UniversePool { atoms: atoms.clone(), formulas, agents, max_state })
    }

    pub fn atoms(&self) -> &AtomSet {
        &self.atoms
    }

    /// The permitted base members, sorted by rendered text.
    pub fn formulas(&self) -> &[ExplicitFormula] {
        &self.formulas
    }

    pub fn agents(&self) -> u8 {
        self.agents
    }

    /// Whether states range over all subsets of the atoms (else only the
    /// empty state).
    pub fn max_state(&self) -> bool {
        self.max_state
    }

    /// The number of candidate bases [`generate`] enumerates before
    /// filtering, if it fits in a `u128`.
    pub fn candidate_count(&self) -> Option<u128> {
        let states: u128 = if self.max_state { 1u128 << self.atoms.len() } else { 1 };
        let bits = (self.agents as u32).checked_mul(self.formulas.len() as u32)?;
        if bits >= 100 {
            return None;
        }
        states.checked_mul(1u128 << bits)
    }

    /// Pool descriptor JSON (explicit-list form).
    pub fn to_json(&self) -> String {
        let v = json!({
            "atoms": self.atoms,
            "agents": self.agents,
            "extra_formulas": self.formulas.iter().map(|f| f.render()).collect::<Vec<_>>(),
            "max_state": self.max_state,
        });
        serde_json::to_string_pretty(&v).expect("pool JSON serialization cannot fail")
    }

    /// Parse a pool descriptor. Atoms mentioned by extra formulas are
    /// absorbed into the atom set; `tri_depth`, `extra_formulas` and
    /// `max_state` are optional.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("invalid pool JSON: {e}")))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Input("pool JSON must be an object".into()))?;
        for key in obj.keys() {
            if !matches!(
                key.as_str(),
                "atoms" | "agents" | "tri_depth" | "extra_formulas" | "max_state"
            ) {
                return Err(Error::Input(format!("unknown pool field {key:?}")));
            }
        }
        let atoms_v = obj
            .get("atoms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Input("pool JSON needs an \"atoms\" array".into()))?;
        let mut atoms = AtomSet::new();
        for a in atoms_v {
            let s = a
                .as_str()
                .ok_or_else(|| Error::Input("atoms must be strings".into()))?;
            atoms.insert(s.to_string());
        }
        let agents = obj
            .get("agents")
            .and_then(Value::as_u64)
            .filter(|n| (1..=u8::MAX as u64).contains(n))
            .ok_or_else(|| Error::Input("\"agents\" must be an integer >= 1".into()))?
            as u8;
        let max_state = match obj.get("max_state") {
            None => true,
            Some(Value::Bool(b)) => *b,
            Some(_) => return Err(Error::Input("\"max_state\" must be a boolean".into())),
        };
        let mut formulas = Vec::new();
        if let Some(extra) = obj.get("extra_formulas") {
            let arr = extra
                .as_array()
                .ok_or_else(|| Error::Input("\"extra_formulas\" must be an array".into()))?;
            for e in arr {
                let text = e
                    .as_str()
                    .ok_or_else(|| Error::Input("extra formulas must be strings".into()))?;
                let f = parse_explicit(text, agents)?;
                atoms.extend(f.atoms());
                formulas.push(f);
            }
        }
        if let Some(d) = obj.get("tri_depth") {
            let d = d
                .as_u64()
                .ok_or_else(|| Error::Input("\"tri_depth\" must be a non-negative integer".into()))?;
            let defaults = default_pool(&atoms, d as usize, agents)?;
            formulas.extend(defaults.formulas.iter().cloned());
        }
        UniversePool::new(&atoms, formulas, agents, max_state)
    }
}

/// Insert `f` and, recursively, every body of a belief operator inside it.
fn collect_with_tri_bodies(f: &ExplicitFormula, out: &mut BTreeSet<ExplicitFormula>) {
    if out.insert(f.clone()) {
        collect_tri_bodies(f, out);
    }
}

fn collect_tri_bodies(f: &ExplicitFormula, out: &mut BTreeSet<ExplicitFormula>) {
    match f {
        ExplicitFormula::Atom(_) | ExplicitFormula::Top | ExplicitFormula::Bottom => {}
        ExplicitFormula::Neg(b) => collect_tri_bodies(b, out),
        ExplicitFormula::Conj(a, b) => {
            collect_tri_bodies(a, out);
            collect_tri_bodies(b, out);
        }
        ExplicitFormula::Tri(_, b) => collect_with_tri_bodies(b, out),
    }
}

/// The pool of all iterated belief-prefixed literals up to prefix depth
/// `d`: every literal over `atoms`, plus `X[j] g` for every agent `j` and
/// every pool member `g` of lower prefix depth.
pub fn default_pool(atoms: &AtomSet, d: usize, agents: u8) -> Result<UniversePool> {
    default_pool_capped(atoms, d, agents, DEFAULT_FORMULA_CAP)
}

/// As [`default_pool`] with an explicit menu-size cap.
pub fn default_pool_capped(
    atoms: &AtomSet,
    d: usize,
    agents: u8,
    formula_cap: u64,
) -> Result<UniversePool> {
    if agents == 0 {
        return Err(Error::Input("a pool needs at least one agent".into()));
    }
    let mut layer: Vec<ExplicitFormula> = Vec::new();
    for a in atoms {
        let atom = ExplicitFormula::atom(a.clone());
        layer.push(atom.clone());
        layer.push(atom.neg());
    }
    let mut all = layer.clone();
    for _ in 0..d {
        let next: Vec<ExplicitFormula> = (1..=agents)
            .flat_map(|j| {
                let j = crate::formula::AgentId::new(j).expect("agent range checked");
                layer.iter().map(move |g| ExplicitFormula::tri(j, g.clone()))
            })
            .collect();
        all.extend(next.iter().cloned());
        if all.len() as u64 > formula_cap {
            return Err(Error::cap("pool formulas", all.len() as u64, formula_cap));
        }
        layer = next;
    }
    UniversePool::with_formula_cap(atoms, all, agents, true, formula_cap)
}

// ---------------------------------------------------------------------------
// AlphaContextSpec and generation
// ---------------------------------------------------------------------------

/// A pool together with an integrity constraint and a correctness flag:
/// the recipe for one generated context.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlphaContextSpec {
    pool: UniversePool,
    alpha: ExplicitFormula,
    bc: bool,
}

impl AlphaContextSpec {
    /// The constraint must mention only pool atoms and agents.
    pub fn new(pool: UniversePool, alpha: ExplicitFormula, bc: bool) -> Result<Self> {
        if !alpha.atoms().is_subset(&pool.atoms) {
            return Err(Error::Input(format!(
                "constraint {} mentions atoms outside the pool",
                alpha.render()
            )));
        }
        if alpha.max_agent() > pool.agents {
            return Err(Error::Input(format!(
                "constraint {} mentions agent {} but the pool has {} agents",
                alpha.render(),
                alpha.max_agent(),
                pool.agents
            )));
        }
        Ok(AlphaContextSpec { pool, alpha, bc })
    }

    /// The unconstrained spec over a pool.
    pub fn top(pool: UniversePool, bc: bool) -> Self {
        AlphaContextSpec { pool, alpha: ExplicitFormula::Top, bc }
    }

    pub fn pool(&self) -> &UniversePool {
        &self.pool
    }

    pub fn alpha(&self) -> &ExplicitFormula {
        &self.alpha
    }

    pub fn bc(&self) -> bool {
        self.bc
    }
}

/// Every base over the pool that satisfies the constraint (and, if the
/// spec asks, belief correctness), in canonical order.
pub fn generate(spec: &AlphaContextSpec) -> Result<Context> {
    generate_capped(spec, DEFAULT_CONTEXT_CAP)
}

/// As [`generate`] with an explicit cap on the pre-filter candidate count.
pub fn generate_capped(spec: &AlphaContextSpec, cap: u64) -> Result<Context> {
    let pool = &spec.pool;
    match pool.candidate_count() {
        Some(c) if c <= cap as u128 => {}
        c => {
            return Err(Error::cap(
                "context candidates",
                c.map_or(u64::MAX, |c| c.min(u64::MAX as u128) as u64),
                cap,
            ))
        }
    }
    let atoms: Vec<&String> = pool.atoms.iter().collect();
    let n_states: u64 = if pool.max_state { 1 << atoms.len() } else { 1 };
    let nf = pool.formulas.len();
    let n = pool.agents as usize;
    let base_combos: u64 = 1 << (n * nf);
    let mut ctx = Context::new();
    for state_mask in 0..n_states {
        let state: AtomSet = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| state_mask >> i & 1 == 1)
            .map(|(_, a)| (*a).clone())
            .collect();
        for combo in 0..base_combos {
            let mut b = BeliefBase::new(pool.agents);
            b.set_state(state.clone());
            for i in 0..n {
                for (j, f) in pool.formulas.iter().enumerate() {
                    if combo >> (i * nf + j) & 1 == 1 {
                        b.insert_member(crate::formula::AgentId::new(i as u8 + 1).unwrap(), f.clone());
                    }
                }
            }
            if sat_explicit(&b, &spec.alpha) && (!spec.bc || is_correct(&b)) {
                ctx.insert(b);
            }
        }
    }
    Ok(ctx)
}

/// Whether the point `b`, placed in the generated context, satisfies `phi`.
/// Exact for the pool; an approximation of the unbounded-context question.
pub fn check(b: &BeliefBase, spec: &AlphaContextSpec, phi: &EpistemicFormula) -> Result<bool> {
    check_capped(b, spec, phi, DEFAULT_CONTEXT_CAP)
}

/// As [`check`] with an explicit candidate cap.
pub fn check_capped(
    b: &BeliefBase,
    spec: &AlphaContextSpec,
    phi: &EpistemicFormula,
    cap: u64,
) -> Result<bool> {
    if !phi.atoms().is_subset(&spec.pool.atoms) {
        return Err(Error::Input(format!(
            "query {} mentions atoms outside the pool",
            phi.render()
        )));
    }
    if phi.max_agent() > spec.pool.agents {
        return Err(Error::Input(format!(
            "query {} mentions agent {} but the pool has {} agents",
            phi.render(),
            phi.max_agent(),
            spec.pool.agents
        )));
    }
    if b.n_agents() != spec.pool.agents {
        return Err(Error::Input(format!(
            "the point has {} agents but the pool has {}",
            b.n_agents(),
            spec.pool.agents
        )));
    }
    let ctx = generate_capped(spec, cap)?;
    Ok(sat_epistemic(&PointedModel::new(b.clone(), ctx), phi))
}

/// The all-empty-base, empty-state point over the unconstrained generated
/// context: the model of maximal general uncertainty.
pub fn max_uncertainty_model(pool: &UniversePool, bc: bool) -> Result<PointedModel> {
    max_uncertainty_model_capped(pool, bc, DEFAULT_CONTEXT_CAP)
}

/// As [`max_uncertainty_model`] with an explicit candidate cap.
pub fn max_uncertainty_model_capped(
    pool: &UniversePool,
    bc: bool,
    cap: u64,
) -> Result<PointedModel> {
    let ctx = generate_capped(&AlphaContextSpec::top(pool.clone(), bc), cap)?;
    Ok(PointedModel::new(BeliefBase::new(pool.agents), ctx))
}

/// Whether some base over the pool satisfies `phi` when placed in the full
/// unconstrained generated context.
pub fn satisfiable_in_class(phi: &EpistemicFormula, pool: &UniversePool, bc: bool) -> Result<bool> {
    satisfiable_in_class_capped(phi, pool, bc, DEFAULT_CONTEXT_CAP)
}

/// As [`satisfiable_in_class`] with an explicit candidate cap.
pub fn satisfiable_in_class_capped(
    phi: &EpistemicFormula,
    pool: &UniversePool,
    bc: bool,
    cap: u64,
) -> Result<bool> {
    if phi.max_agent() > pool.agents {
        return Err(Error::Input(format!(
            "query {} mentions agent {} but the pool has {} agents",
            phi.render(),
            phi.max_agent(),
            pool.agents
        )));
    }
    let ctx = generate_capped(&AlphaContextSpec::top(pool.clone(), bc), cap)?;
    let mut m = PointedModel::new(BeliefBase::new(pool.agents), ctx);
    let members: Vec<BeliefBase> = m.context.iter().cloned().collect();
    for b in members {
        m.base = b;
        if sat_epistemic(&m, phi) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether `phi` is satisfiable when the context may be any subset of the
/// generated universe up to `max_context_size` members (the point still
/// ranges over the full universe and need not lie in the chosen context).
/// The empty context is included. `cap` bounds the number of
/// (point, sub-context) pairs tried.
pub fn satisfiable_in_subcontexts(
    phi: &EpistemicFormula,
    pool: &UniversePool,
    bc: bool,
    max_context_size: usize,
    cap: u64,
) -> Result<bool> {
    if phi.max_agent() > pool.agents {
        return Err(Error::Input(format!(
            "query {} mentions agent {} but the pool has {} agents",
            phi.render(),
            phi.max_agent(),
            pool.agents
        )));
    }
    let full = generate_capped(&AlphaContextSpec::top(pool.clone(), bc), cap)?;
    let members: Vec<BeliefBase> = full.iter().cloned().collect();
    let n = members.len();
    let size_cap = max_context_size.min(n);
    let subcontexts = count_subsets_up_to(n, size_cap)
        .and_then(|s| s.checked_mul(n as u128))
        .ok_or_else(|| Error::cap("sub-context candidates", u64::MAX, cap))?;
    if subcontexts > cap as u128 {
        return Err(Error::cap(
            "sub-context candidates",
            subcontexts.min(u64::MAX as u128) as u64,
            cap,
        ));
    }
    let mut chosen: Vec<usize> = Vec::new();
    search_subcontexts(phi, &members, &mut chosen, 0, size_cap)
}

/// Sum of binomial coefficients C(n, 0..=k), if it fits in a `u128`.
fn count_subsets_up_to(n: usize, k: usize) -> Option<u128> {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for s in 0..=k {
        total = total.checked_add(binom)?;
        binom = binom
            .checked_mul((n - s) as u128)?
            .checked_div((s + 1) as u128)?;
    }
    Some(total)
}

fn search_subcontexts(
    phi: &EpistemicFormula,
    members: &[BeliefBase],
    chosen: &mut Vec<usize>,
    next: usize,
    size_cap: usize,
) -> Result<bool> {
    let ctx = Context::from_members(chosen.iter().map(|&i| members[i].clone()));
    let mut m = PointedModel::new(BeliefBase::new(members[0].n_agents()), ctx);
    for b in members {
        m.base = b.clone();
        if sat_epistemic(&m, phi) {
            return Ok(true);
        }
    }
    if chosen.len() < size_cap {
        for i in next..members.len() {
            chosen.push(i);
            if search_subcontexts(phi, members, chosen, i + 1, size_cap)? {
                return Ok(true);
            }
            chosen.pop();
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
