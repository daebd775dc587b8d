//! Multi-relational Kripke semantics and the constructive translations
//! between pointed Kripke models and pointed belief-base models.
//!
//! Besides the standard satisfaction relation (with the complement operator
//! `C[i]` quantifying over the *non*-successors), the module provides the
//! building blocks of the model-equivalence arguments:
//!
//! * [`mbm_to_kripke`]: worlds are the context members plus the point,
//!   relations are the epistemic-alternative relations;
//! * [`kripke_to_mbm`]: each world becomes a base listing a disjunction of
//!   fresh "name" atoms of its successors, so that the alternative relation
//!   replays the edge relation exactly;
//! * [`filtrate`]: quotient by agreement on a subformula-closed set;
//! * [`unravel`]: depth-bounded tree unfolding from the point;
//! * [`label_tree`] / [`tree_to_mbm`] / [`tree_family`]: explicit formulas
//!   describing a valuation tree, and belief bases built from them;
//! * [`k_bisimilar`]: bounded back-and-forth equivalence.
//!
//! The translation guarantees are exact for the basic (complement-free)
//! fragment; the complement operator transfers forward when the point is a
//! context member and backward through [`kripke_to_mbm`] (worlds and
//! constructed bases are in bijection). Filtration and unraveling preserve
//! only the complement-free fragment, which is the fragment the tree pipeline
//! is used for.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::beliefbase::{is_alternative, BeliefBase, Context, PointedModel};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::formula::{
    is_valid_atom, mutual_belief, AgentId, AtomSet, EpistemicFormula, ExplicitFormula,
};

/// Hard limit on worlds produced by [`unravel`].
const MAX_UNRAVEL_WORLDS: usize = 200_000;

/// A finite multi-relational Kripke model with opaque string world ids.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KripkeModel {
    n_agents: u8,
    worlds: Vec<String>,
    index: BTreeMap<String, usize>,
    /// `rel[agent0][world] -> successor indices`
    rel: Vec<Vec<BTreeSet<usize>>>,
    /// `atom -> indices of worlds where it is true`
    val: BTreeMap<String, BTreeSet<usize>>,
}

impl KripkeModel {
    pub fn new<I, S>(n_agents: u8, world_ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if n_agents == 0 {
            return Err(Error::Input("agent count must be at least 1".into()));
        }
        let worlds: Vec<String> = world_ids.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, w) in worlds.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::Input("world ids must be non-empty".into()));
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate world id {w:?}")));
            }
        }
        let n_worlds = worlds.len();
        Ok(KripkeModel {
            n_agents,
            worlds,
            index,
            rel: vec![vec![BTreeSet::new(); n_worlds]; n_agents as usize],
            val: BTreeMap::new(),
        })
    }

    pub fn n_agents(&self) -> u8 {
        self.n_agents
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn n_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn world_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    fn check_agent(&self, agent: AgentId) -> Result<()> {
        if agent.get() > self.n_agents {
            return Err(Error::Input(format!(
                "agent {agent} out of range 1..={}",
                self.n_agents
            )));
        }
        Ok(())
    }

    fn require_world(&self, id: &str) -> Result<usize> {
        self.world_index(id)
            .ok_or_else(|| Error::Input(format!("unknown world id {id:?}")))
    }

    pub fn add_edge(&mut self, agent: AgentId, from: &str, to: &str) -> Result<()> {
        self.check_agent(agent)?;
        let f = self.require_world(from)?;
        let t = self.require_world(to)?;
        self.rel[agent.index0()][f].insert(t);
        Ok(())
    }

    pub fn set_atom_true(&mut self, atom: &str, world: &str) -> Result<()> {
        if !is_valid_atom(atom) {
            return Err(Error::Input(format!("invalid atom identifier {atom:?}")));
        }
        let w = self.require_world(world)?;
        self.val.entry(atom.to_string()).or_default().insert(w);
        Ok(())
    }

    /// Successor indices of `world` for `agent`; empty for out-of-range agents.
    pub fn successors(&self, agent: AgentId, world: usize) -> &BTreeSet<usize> {
        static EMPTY: BTreeSet<usize> = BTreeSet::new();
        self.rel
            .get(agent.index0())
            .map_or(&EMPTY, |per_world| &per_world[world])
    }

    pub fn has_edge(&self, agent: AgentId, from: usize, to: usize) -> bool {
        self.successors(agent, from).contains(&to)
    }

    /// Atoms with a declared (possibly empty) valuation entry.
    pub fn valuation_atoms(&self) -> impl Iterator<Item = &String> {
        self.val.keys()
    }

    pub fn atom_true_at(&self, atom: &str, world: usize) -> bool {
        self.val.get(atom).is_some_and(|set| set.contains(&world))
    }

    /// True iff every agent's relation contains every self-loop.
    pub fn is_reflexive(&self) -> bool {
        self.rel
            .iter()
            .all(|per_world| per_world.iter().enumerate().all(|(w, succ)| succ.contains(&w)))
    }
}

/// A Kripke model with a distinguished world.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointedKripke {
    model: KripkeModel,
    world: String,
    world_idx: usize,
}

impl PointedKripke {
    pub fn new(model: KripkeModel, world: impl Into<String>) -> Result<Self> {
        let world = world.into();
        let world_idx = model.require_world(&world)?;
        Ok(PointedKripke { model, world, world_idx })
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn world(&self) -> &str {
        &self.world
    }

    pub fn world_idx(&self) -> usize {
        self.world_idx
    }

    /// The same model pointed at a different world.
    pub fn repoint(&self, world: &str) -> Result<Self> {
        PointedKripke::new(self.model.clone(), world)
    }
}

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

/// Evaluates epistemic formulas over all worlds of a model, bottom-up with
/// one bitset per subformula.
pub(crate) struct KripkeEval<'a> {
    m: &'a KripkeModel,
    memo: HashMap<EpistemicFormula, Bits>,
}

impl<'a> KripkeEval<'a> {
    pub fn new(m: &'a KripkeModel) -> Self {
        KripkeEval { m, memo: HashMap::new() }
    }

    pub fn holds_at(&mut self, phi: &EpistemicFormula, world: usize) -> bool {
        self.eval(phi).get(world)
    }

    fn eval(&mut self, phi: &EpistemicFormula) -> Bits {
        if let Some(b) = self.memo.get(phi) {
            return b.clone();
        }
        let n = self.m.n_worlds();
        let bits = match phi {
            EpistemicFormula::Atom(p) => {
                let mut b = Bits::zeros(n);
                if let Some(set) = self.m.val.get(p) {
                    for &w in set {
                        b.set(w, true);
                    }
                }
                b
            }
            EpistemicFormula::Top => Bits::ones(n),
            EpistemicFormula::Bottom => Bits::zeros(n),
            EpistemicFormula::Neg(x) => {
                let mut b = self.eval(x);
                b.negate();
                b
            }
            EpistemicFormula::Conj(x, y) => {
                let mut b = self.eval(x);
                let by = self.eval(y);
                b.and_with(&by);
                b
            }
            EpistemicFormula::Box(agent, body) => {
                let body_bits = self.eval(body);
                let mut b = Bits::zeros(n);
                for w in 0..n {
                    let ok = self
                        .m
                        .successors(*agent, w)
                        .iter()
                        .all(|&v| body_bits.get(v));
                    b.set(w, ok);
                }
                b
            }
            EpistemicFormula::CBox(agent, body) => {
                let body_bits = self.eval(body);
                let mut b = Bits::zeros(n);
                for w in 0..n {
                    let succ = self.m.successors(*agent, w);
                    let ok = (0..n).all(|v| succ.contains(&v) || body_bits.get(v));
                    b.set(w, ok);
                }
                b
            }
        };
        self.memo.insert(phi.clone(), bits.clone());
        bits
    }
}

/// Standard Kripke satisfaction; `B[i]` quantifies over `i`-successors and
/// `C[i]` over all worlds that are not `i`-successors.
pub fn sat_kripke(pk: &PointedKripke, phi: &EpistemicFormula) -> bool {
    KripkeEval::new(pk.model()).holds_at(phi, pk.world_idx())
}

// ---------------------------------------------------------------------------
// MBM -> Kripke
// ---------------------------------------------------------------------------

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// A canonical text form of a base, used only to derive stable world names.
fn canonical_base_string(b: &BeliefBase) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    out.push_str("s{");
    for atom in b.state() {
        let _ = write!(out, "{atom},");
    }
    out.push('}');
    for i in 1..=b.n_agents() {
        let agent = AgentId::new(i).expect("nonzero");
        let _ = write!(out, "{i}{{");
        for f in b.base(agent) {
            let _ = write!(out, "{f};");
        }
        out.push('}');
    }
    out
}

/// Translates a pointed belief-base model into a pointed Kripke model.
///
/// Worlds are the context members plus the point (if external), with stable
/// names derived by hashing a canonical rendering of each base. Edges go from
/// any world to the *context members* that are epistemic alternatives; the
/// valuation records each base's state atoms.
pub fn mbm_to_kripke(m: &PointedModel) -> PointedKripke {
    let mut entries: Vec<&BeliefBase> = m.context.iter().collect();
    let n_ctx = entries.len();
    let point_idx = match entries.iter().position(|b| *b == &m.base) {
        Some(i) => i,
        None => {
            entries.push(&m.base);
            n_ctx
        }
    };

    // Stable, collision-safe world names.
    let mut names: Vec<String> = Vec::with_capacity(entries.len());
    let mut used: BTreeSet<String> = BTreeSet::new();
    for b in &entries {
        let mut name = format!("w{:016x}", fnv1a64(canonical_base_string(b).as_bytes()));
        while used.contains(&name) {
            name.push('x');
        }
        used.insert(name.clone());
        names.push(name);
    }

    let n_agents = m.base.n_agents().max(
        m.context.iter().map(BeliefBase::n_agents).max().unwrap_or(1),
    );
    let mut model = KripkeModel::new(n_agents, names.clone()).expect("valid world set");

    for (u, b) in entries.iter().enumerate() {
        for i in 1..=n_agents {
            let agent = AgentId::new(i).expect("nonzero");
            // Targets are context members only: the point world has no
            // incoming candidacy unless it is itself a member.
            for (v, b2) in entries.iter().enumerate().take(n_ctx) {
                if is_alternative(b, agent, b2) {
                    model
                        .add_edge(agent, &names[u], &names[v])
                        .expect("worlds exist");
                }
            }
        }
    }

    for (u, b) in entries.iter().enumerate() {
        for atom in b.state() {
            model.set_atom_true(atom, &names[u]).expect("valid atom");
        }
    }

    PointedKripke::new(model, names[point_idx].clone()).expect("point exists")
}

// ---------------------------------------------------------------------------
// Kripke -> MBM
// ---------------------------------------------------------------------------

/// Translates a pointed Kripke model into a pointed belief-base model.
///
/// Each world `v` gets a fresh "name" atom; its base holds, per agent, the
/// disjunction of the names of its successors (the empty disjunction is
/// `false`, so dead ends admit no alternatives), and its state keeps the
/// `guard_atoms` true at `v` plus its own name. Worlds and constructed bases
/// are in bijection, so satisfaction of formulas over `guard_atoms` transfers
/// in both directions, complement operator included.
pub fn kripke_to_mbm(pk: &PointedKripke, guard_atoms: &AtomSet) -> PointedModel {
    let m = pk.model();
    let n = m.n_worlds();

    // Fresh name atoms, avoiding the guards and the declared valuation atoms.
    let mut taken: BTreeSet<&str> = guard_atoms.iter().map(String::as_str).collect();
    taken.extend(m.valuation_atoms().map(String::as_str));
    let mut names: Vec<String> = Vec::with_capacity(n);
    let mut counter = 0usize;
    for _ in 0..n {
        loop {
            let cand = format!("n{counter}");
            counter += 1;
            if !taken.contains(cand.as_str()) {
                names.push(cand);
                break;
            }
        }
    }

    let bases: Vec<BeliefBase> = (0..n)
        .map(|v| {
            let mut b = BeliefBase::new(m.n_agents());
            for i in 1..=m.n_agents() {
                let agent = AgentId::new(i).expect("nonzero");
                let disj = ExplicitFormula::disj_all(
                    m.successors(agent, v)
                        .iter()
                        .map(|&u| ExplicitFormula::atom(names[u].clone())),
                );
                b.insert_member(agent, disj);
            }
            let mut state: AtomSet = guard_atoms
                .iter()
                .filter(|p| m.atom_true_at(p, v))
                .cloned()
                .collect();
            state.insert(names[v].clone());
            b.set_state(state);
            b
        })
        .collect();

    let point = bases[pk.world_idx()].clone();
    PointedModel::new(point, Context::from_members(bases))
}

// ---------------------------------------------------------------------------
// Filtration
// ---------------------------------------------------------------------------

/// Quotients a model by agreement on the subformula-closed set `sigma`
/// (smallest filtration: a class edge exists iff some representatives have an
/// edge). The result's valuation covers exactly the atoms of `sigma`; class
/// ids are fresh `c0, c1, ...` in first-seen world order, and the returned
/// map sends each original world id to its class id.
///
/// Truth of `sigma` formulas is preserved at corresponding classes for the
/// complement-free fragment.
pub fn filtrate(
    m: &KripkeModel,
    sigma: &BTreeSet<EpistemicFormula>,
) -> Result<(KripkeModel, BTreeMap<String, String>)> {
    // Validate subformula closure.
    for phi in sigma {
        let missing = |f: &EpistemicFormula| !sigma.contains(f);
        let bad = match phi {
            EpistemicFormula::Atom(_) | EpistemicFormula::Top | EpistemicFormula::Bottom => false,
            EpistemicFormula::Neg(b)
            | EpistemicFormula::Box(_, b)
            | EpistemicFormula::CBox(_, b) => missing(b),
            EpistemicFormula::Conj(a, b) => missing(a) || missing(b),
        };
        if bad {
            return Err(Error::Input(format!(
                "formula set is not subformula-closed: {phi} has a missing subformula"
            )));
        }
    }

    let n = m.n_worlds();
    let mut eval = KripkeEval::new(m);
    let vectors: Vec<Vec<bool>> = (0..n)
        .map(|w| sigma.iter().map(|phi| eval.holds_at(phi, w)).collect())
        .collect();

    // Classes in first-seen world order.
    let mut class_of: Vec<usize> = Vec::with_capacity(n);
    let mut class_reps: Vec<usize> = Vec::new();
    let mut seen: HashMap<&Vec<bool>, usize> = HashMap::new();
    for w in 0..n {
        let next = class_reps.len();
        let c = *seen.entry(&vectors[w]).or_insert(next);
        if c == next {
            class_reps.push(w);
        }
        class_of.push(c);
    }

    let class_ids: Vec<String> = (0..class_reps.len()).map(|i| format!("c{i}")).collect();
    let mut out = KripkeModel::new(m.n_agents(), class_ids.clone())?;

    for i in 1..=m.n_agents() {
        let agent = AgentId::new(i).expect("nonzero");
        for w in 0..n {
            for &v in m.successors(agent, w) {
                out.add_edge(agent, &class_ids[class_of[w]], &class_ids[class_of[v]])?;
            }
        }
    }

    // Valuation over the atoms of sigma only.
    let sigma_atoms: AtomSet = sigma.iter().flat_map(EpistemicFormula::atoms).collect();
    for p in &sigma_atoms {
        for w in 0..n {
            if m.atom_true_at(p, w) {
                out.set_atom_true(p, &class_ids[class_of[w]])?;
            }
        }
        // Ensure the atom is declared even if false everywhere.
        out.val.entry(p.clone()).or_default();
    }

    let map = (0..n)
        .map(|w| (m.worlds[w].clone(), class_ids[class_of[w]].clone()))
        .collect();
    Ok((out, map))
}

// ---------------------------------------------------------------------------
// Unraveling
// ---------------------------------------------------------------------------

/// Unfolds the model from the point into a tree of edge-paths of length at
/// most `k`. Node ids encode the path (`t0`, then `_<agent>_<branch>`
/// segments); each node carries the valuation of its final world. The root
/// agrees with the original point on complement-free formulas of depth <= k.
pub fn unravel(pk: &PointedKripke, k: usize) -> Result<PointedKripke> {
    let m = pk.model();

    struct Node {
        id: String,
        world: usize,
        depth: usize,
    }

    let mut nodes = vec![Node { id: "t0".to_string(), world: pk.world_idx(), depth: 0 }];
    let mut edges: Vec<(AgentId, usize, usize)> = Vec::new();
    let mut next = 0usize;
    while next < nodes.len() {
        let (parent_id, world, depth) = {
            let nd = &nodes[next];
            (nd.id.clone(), nd.world, nd.depth)
        };
        if depth < k {
            for i in 1..=m.n_agents() {
                let agent = AgentId::new(i).expect("nonzero");
                for (branch, &succ) in m.successors(agent, world).iter().enumerate() {
                    let id = format!("{parent_id}_{i}_{branch}");
                    nodes.push(Node { id, world: succ, depth: depth + 1 });
                    edges.push((agent, next, nodes.len() - 1));
                    if nodes.len() > MAX_UNRAVEL_WORLDS {
                        return Err(Error::cap(
                            "unraveled worlds",
                            nodes.len() as u64,
                            MAX_UNRAVEL_WORLDS as u64,
                        ));
                    }
                }
            }
        }
        next += 1;
    }

    let mut out = KripkeModel::new(m.n_agents(), nodes.iter().map(|n| n.id.clone()))?;
    for (agent, from, to) in edges {
        out.add_edge(agent, &nodes[from].id, &nodes[to].id)?;
    }
    let atoms: Vec<String> = m.valuation_atoms().cloned().collect();
    for p in &atoms {
        for node in &nodes {
            if m.atom_true_at(p, node.world) {
                out.set_atom_true(p, &node.id)?;
            }
        }
        out.val.entry(p.clone()).or_default();
    }
    PointedKripke::new(out, "t0")
}

// ---------------------------------------------------------------------------
// Tree labelling and tree-to-base construction
// ---------------------------------------------------------------------------

/// Checks that the pointed model is a tree rooted at the point and returns
/// children per (node, agent) plus a topological (parent-before-child) order.
fn tree_children(t: &PointedKripke) -> Result<(Vec<Vec<Vec<usize>>>, Vec<usize>)> {
    let m = t.model();
    let n = m.n_worlds();
    let root = t.world_idx();

    let mut indegree = vec![0usize; n];
    let mut children: Vec<Vec<Vec<usize>>> =
        vec![vec![Vec::new(); m.n_agents() as usize]; n];
    for w in 0..n {
        for i in 1..=m.n_agents() {
            let agent = AgentId::new(i).expect("nonzero");
            for &v in m.successors(agent, w) {
                indegree[v] += 1;
                children[w][agent.index0()].push(v);
            }
        }
    }
    if indegree[root] != 0 {
        return Err(Error::Input("not a tree: the root has an incoming edge".into()));
    }
    for (w, d) in indegree.iter().enumerate() {
        if w != root && *d != 1 {
            return Err(Error::Input(format!(
                "not a tree: world {:?} has in-degree {d}",
                m.worlds()[w]
            )));
        }
    }
    // Parent-before-child order via BFS from the root; all nodes must appear.
    let mut order = vec![root];
    let mut head = 0;
    while head < order.len() {
        let w = order[head];
        head += 1;
        for per_agent in &children[w] {
            order.extend(per_agent.iter().copied());
        }
    }
    if order.len() != n {
        return Err(Error::Input("not a tree: unreachable worlds".into()));
    }
    Ok((children, order))
}

/// Computes the describing formula of every node of a valuation tree.
///
/// A node's label conjoins one literal per guard atom (positive or negative
/// according to the node's valuation) with, per agent, the explicit-belief
/// operator applied to the disjunction of the labels of that agent's children
/// (the empty disjunction is `false`, so terminals get `X[i] false`).
pub fn label_tree(
    t: &PointedKripke,
    guard_atoms: &AtomSet,
) -> Result<BTreeMap<String, ExplicitFormula>> {
    let (children, order) = tree_children(t)?;
    let m = t.model();

    let mut labels: Vec<Option<ExplicitFormula>> = vec![None; m.n_worlds()];
    for &w in order.iter().rev() {
        let mut parts: Vec<ExplicitFormula> = Vec::new();
        for p in guard_atoms {
            let atom = ExplicitFormula::atom(p.clone());
            parts.push(if m.atom_true_at(p, w) { atom } else { atom.neg() });
        }
        for i in 1..=m.n_agents() {
            let agent = AgentId::new(i).expect("nonzero");
            let disj = ExplicitFormula::disj_all(
                children[w][agent.index0()]
                    .iter()
                    .map(|&c| labels[c].clone().expect("children labelled first")),
            );
            parts.push(ExplicitFormula::tri(agent, disj));
        }
        labels[w] = Some(ExplicitFormula::conj_all(parts));
    }

    Ok(m
        .worlds()
        .iter()
        .zip(labels)
        .map(|(id, l)| (id.clone(), l.expect("all nodes labelled")))
        .collect())
}

/// Height of a tree-shaped pointed model (longest path from the root).
fn tree_height(children: &[Vec<Vec<usize>>], order: &[usize], root: usize) -> usize {
    let mut depth = vec![0usize; children.len()];
    let mut height = 0;
    for &w in order {
        if w == root {
            depth[w] = 0;
        }
        for per_agent in &children[w] {
            for &c in per_agent {
                depth[c] = depth[w] + 1;
                height = height.max(depth[c]);
            }
        }
    }
    height
}

fn node_base(
    t: &PointedKripke,
    children: &[Vec<Vec<usize>>],
    labels: &BTreeMap<String, ExplicitFormula>,
    spare_atoms: &AtomSet,
    mb_level: usize,
    node: usize,
) -> BeliefBase {
    let m = t.model();
    let agents = AgentId::all(m.n_agents());
    let mut b = BeliefBase::new(m.n_agents());
    for &agent in &agents {
        let disj = ExplicitFormula::disj_all(
            children[node][agent.index0()]
                .iter()
                .map(|&c| labels[&m.worlds()[c]].clone()),
        );
        b.insert_member(agent, disj);
        for q in spare_atoms {
            b.insert_member(
                agent,
                mutual_belief(mb_level, &ExplicitFormula::atom(q.clone()).neg(), &agents),
            );
        }
    }
    let state: AtomSet = m
        .valuation_atoms()
        .filter(|p| m.atom_true_at(p, node))
        .cloned()
        .collect();
    b.set_state(state);
    b
}

/// Builds the belief base describing the root of a valuation tree: per agent,
/// the disjunction of the root's child labels, plus one mutual-belief guard
/// `MB^height ~q` per spare atom (guards silence atoms outside the tree's
/// universe when the base is dropped into a larger pool).
pub fn tree_to_mbm(
    t: &PointedKripke,
    guard_atoms: &AtomSet,
    spare_atoms: &AtomSet,
) -> Result<BeliefBase> {
    if !guard_atoms.is_disjoint(spare_atoms) {
        return Err(Error::Input("spare atoms must be disjoint from guard atoms".into()));
    }
    let (children, order) = tree_children(t)?;
    let labels = label_tree(t, guard_atoms)?;
    let height = tree_height(&children, &order, t.world_idx());
    Ok(node_base(t, &children, &labels, spare_atoms, height, t.world_idx()))
}

/// Builds the base of *every* tree node (with no spare-atom guards) and
/// returns the root base pointed at the family of all node bases.
///
/// Within this family the alternative relation replays the tree edges up to
/// label equality, so satisfaction of complement-free formulas of depth up to
/// the tree height transfers from the tree to the pointed model. This is the
/// context used by the end-to-end tree pipeline.
pub fn tree_family(t: &PointedKripke, guard_atoms: &AtomSet) -> Result<PointedModel> {
    let (children, _) = tree_children(t)?;
    let labels = label_tree(t, guard_atoms)?;
    let empty = AtomSet::new();
    let bases: Vec<BeliefBase> = (0..t.model().n_worlds())
        .map(|w| node_base(t, &children, &labels, &empty, 0, w))
        .collect();
    let root = bases[t.world_idx()].clone();
    Ok(PointedModel::new(root, Context::from_members(bases)))
}

// ---------------------------------------------------------------------------
// Bounded bisimulation
// ---------------------------------------------------------------------------

/// `k`-round back-and-forth equivalence of two pointed models. Atom agreement
/// is checked over the union of the two declared valuation atom sets.
pub fn k_bisimilar(m1: &PointedKripke, m2: &PointedKripke, k: usize) -> bool {
    let atoms: Vec<&String> = {
        let mut set: BTreeSet<&String> = m1.model().valuation_atoms().collect();
        set.extend(m2.model().valuation_atoms());
        set.into_iter().collect()
    };
    let n_agents = m1.model().n_agents().max(m2.model().n_agents());
    let mut memo: HashMap<(usize, usize, usize), bool> = HashMap::new();
    bisim(
        m1.model(),
        m2.model(),
        &atoms,
        n_agents,
        m1.world_idx(),
        m2.world_idx(),
        k,
        &mut memo,
    )
}

#[allow(clippy::too_many_arguments)]
fn bisim(
    a: &KripkeModel,
    b: &KripkeModel,
    atoms: &[&String],
    n_agents: u8,
    w1: usize,
    w2: usize,
    k: usize,
    memo: &mut HashMap<(usize, usize, usize), bool>,
) -> bool {
    if let Some(&r) = memo.get(&(w1, w2, k)) {
        return r;
    }
    let agree = atoms
        .iter()
        .all(|p| a.atom_true_at(p, w1) == b.atom_true_at(p, w2));
    let mut result = agree;
    if result && k > 0 {
        'outer: for i in 1..=n_agents {
            let agent = AgentId::new(i).expect("nonzero");
            let succ1 = a.successors(agent, w1);
            let succ2 = b.successors(agent, w2);
            // forth
            for &v1 in succ1 {
                if !succ2
                    .iter()
                    .any(|&v2| bisim(a, b, atoms, n_agents, v1, v2, k - 1, memo))
                {
                    result = false;
                    break 'outer;
                }
            }
            // back
            for &v2 in succ2 {
                if !succ1
                    .iter()
                    .any(|&v1| bisim(a, b, atoms, n_agents, v1, v2, k - 1, memo))
                {
                    result = false;
                    break 'outer;
                }
            }
        }
    }
    memo.insert((w1, w2, k), result);
    result
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KripkeFile {
    agents: u8,
    worlds: Vec<String>,
    relations: BTreeMap<String, Vec<(String, String)>>,
    valuation: BTreeMap<String, Vec<String>>,
    point: String,
}

impl PointedKripke {
    /// Serializes to the Kripke file format (pretty JSON, canonical ordering).
    pub fn to_json(&self) -> String {
        let m = self.model();
        let relations = (1..=m.n_agents())
            .map(|i| {
                let agent = AgentId::new(i).expect("nonzero");
                let pairs: Vec<(String, String)> = (0..m.n_worlds())
                    .flat_map(|w| {
                        m.successors(agent, w)
                            .iter()
                            .map(move |&v| (m.worlds()[w].clone(), m.worlds()[v].clone()))
                    })
                    .collect();
                (i.to_string(), pairs)
            })
            .collect();
        let valuation = m
            .val
            .iter()
            .map(|(p, set)| {
                (p.clone(), set.iter().map(|&w| m.worlds()[w].clone()).collect())
            })
            .collect();
        let file = KripkeFile {
            agents: m.n_agents(),
            worlds: m.worlds().to_vec(),
            relations,
            valuation,
            point: self.world.clone(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Parses the Kripke file format, validating world references, agent
    /// keys, and atom identifiers. Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: KripkeFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("kripke file: {e}")))?;
        let mut model = KripkeModel::new(file.agents, file.worlds)?;
        for (key, pairs) in &file.relations {
            let idx: u8 = key.parse().map_err(|_| {
                Error::Input(format!("agent key {key:?} is not a decimal integer"))
            })?;
            if idx == 0 || idx > file.agents {
                return Err(Error::Input(format!(
                    "agent key {key:?} out of range 1..={}",
                    file.agents
                )));
            }
            let agent = AgentId::new(idx).expect("nonzero");
            for (from, to) in pairs {
                model.add_edge(agent, from, to)?;
            }
        }
        for (atom, worlds) in &file.valuation {
            for w in worlds {
                model.set_atom_true(atom, w)?;
            }
            model.val.entry(atom.clone()).or_default();
        }
        PointedKripke::new(model, file.point)
    }
}
