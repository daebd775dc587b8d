//! Depth-bounded qualitative belief structures over a finite atom set.
//!
//! A depth-k world is a tuple `(f_0, ..., f_k)`: `f_0` is a propositional
//! valuation over the signature atoms, and each level `h+1` assigns every
//! agent the set of depth-h worlds the agent marks as possible. Writing
//! `Z_h` for the set of all depth-h worlds over a fixed signature, the
//! marked sets at level `h+1` are arbitrary subsets of `Z_h`.
//!
//! The module provides world enumeration with coherence filters, coherence
//! and correctness reports, exact formula satisfaction (a box quantifies
//! the marked worlds one level down, a complement box the unmarked
//! remainder of the full stratum), depth restriction and canonical
//! extension, the hierarchy map [`tau`] from pointed models, the canonical
//! belief base realizing a world, and universal validity over coherent
//! worlds.
//!
//! JSON world format (nested, level-indexed): the top object carries
//! `atoms`, `agents`, and `levels`; `levels[0]` maps each atom to 0 or 1,
//! and `levels[h]` (h >= 1) maps agent indices to arrays of marked
//! depth-(h-1) worlds, each rendered as its own levels array of length h.

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Map, Value};

use crate::beliefbase::{BeliefBase, PointedModel};
use crate::error::{Error, Result};
use crate::formula::{
    is_valid_atom, mutual_belief, AgentId, AtomSet, EpistemicFormula, ExplicitFormula,
};
use crate::kripke::{mbm_to_kripke, PointedKripke};

/// Default ceiling on how many worlds an enumeration may materialize.
pub const DEFAULT_WORLD_CAP: u64 = 1 << 20;

/// Default ceiling on the stratum size a complement quantifier may walk.
pub const DEFAULT_SAT_CAP: u64 = 1 << 16;

/// Most atoms a world signature may carry (valuations are stored as masks).
const MAX_SIG_ATOMS: usize = 16;

// ---------------------------------------------------------------------------
// Signature and hierarchy representation
// ---------------------------------------------------------------------------

/// Shared signature of a world: the sorted finite atom set and agent count.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct Sig {
    atoms: Vec<String>,
    n_agents: u8,
}

impl Sig {
    fn new(atoms: &AtomSet, n_agents: u8) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::Input("a world needs at least one agent".into()));
        }
        if atoms.len() > MAX_SIG_ATOMS {
            return Err(Error::cap(
                "signature atoms",
                atoms.len() as u64,
                MAX_SIG_ATOMS as u64,
            ));
        }
        for a in atoms {
            if !is_valid_atom(a) {
                return Err(Error::Input(format!("invalid atom name {a:?}")));
            }
        }
        Ok(Sig { atoms: atoms.iter().cloned().collect(), n_agents })
    }

    fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.binary_search_by(|a| a.as_str().cmp(name)).ok()
    }

    fn n_valuations(&self) -> u64 {
        1u64 << self.atoms.len()
    }
}

/// One element of `Z_h`: a bare valuation, or a lower world wrapped with
/// per-agent marked sets of worlds one level down.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
enum Hier {
    Zero(u32),
    Succ(Box<Hier>, Vec<BTreeSet<Hier>>),
}

impl Hier {
    fn depth(&self) -> usize {
        match self {
            Hier::Zero(_) => 0,
            Hier::Succ(p, _) => 1 + p.depth(),
        }
    }

    /// The level-0 valuation mask.
    fn mask(&self) -> u32 {
        match self {
            Hier::Zero(m) => *m,
            Hier::Succ(p, _) => p.mask(),
        }
    }

    fn prefix(&self) -> Option<&Hier> {
        match self {
            Hier::Zero(_) => None,
            Hier::Succ(p, _) => Some(p),
        }
    }

    fn marks(&self) -> Option<&[BTreeSet<Hier>]> {
        match self {
            Hier::Zero(_) => None,
            Hier::Succ(_, m) => Some(m),
        }
    }

    /// The depth-`k2` prefix; `k2` must not exceed the current depth.
    fn truncate(&self, k2: usize) -> &Hier {
        let mut cur = self;
        while cur.depth() > k2 {
            cur = cur.prefix().expect("positive depth implies a prefix");
        }
        cur
    }

    /// All prefixes by depth: index h holds the depth-h prefix, last = self.
    fn chain(&self) -> Vec<&Hier> {
        let mut out = Vec::with_capacity(self.depth() + 1);
        let mut cur = self;
        loop {
            out.push(cur);
            match cur.prefix() {
                Some(p) => cur = p,
                None => break,
            }
        }
        out.reverse();
        out
    }
}

fn agent_at(idx: usize) -> AgentId {
    AgentId::new(idx as u8 + 1).expect("agent indices stay within range")
}

// ---------------------------------------------------------------------------
// KWorld: the public world type
// ---------------------------------------------------------------------------

/// A depth-k world: a valuation plus, for each level `1..=k` and agent, the
/// set of marked lower-level worlds.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct KWorld {
    sig: Sig,
    top: Hier,
}

impl KWorld {
    /// A depth-0 world: just a valuation over the signature atoms.
    pub fn propositional(atoms: &AtomSet, n_agents: u8, true_atoms: &AtomSet) -> Result<KWorld> {
        let sig = Sig::new(atoms, n_agents)?;
        let mut mask = 0u32;
        for a in true_atoms {
            match sig.atom_index(a) {
                Some(i) => mask |= 1 << i,
                None => {
                    return Err(Error::Input(format!(
                        "true atom {a:?} is not in the signature"
                    )))
                }
            }
        }
        Ok(KWorld { sig, top: Hier::Zero(mask) })
    }

    /// Wrap a world with one more level of per-agent marks. Every marked
    /// world must share the signature and have exactly the prefix's depth.
    pub fn compose(prefix: &KWorld, marks: &[BTreeSet<KWorld>]) -> Result<KWorld> {
        if marks.len() != prefix.sig.n_agents as usize {
            return Err(Error::Input(format!(
                "expected marks for {} agents, got {}",
                prefix.sig.n_agents,
                marks.len()
            )));
        }
        let d = prefix.depth();
        let mut hier_marks = Vec::with_capacity(marks.len());
        for per_agent in marks {
            let mut set = BTreeSet::new();
            for m in per_agent {
                if m.sig != prefix.sig {
                    return Err(Error::Input(
                        "marked world uses a different signature".into(),
                    ));
                }
                if m.depth() != d {
                    return Err(Error::Input(format!(
                        "marked world has depth {}, expected {}",
                        m.depth(),
                        d
                    )));
                }
                set.insert(m.top.clone());
            }
            hier_marks.push(set);
        }
        Ok(KWorld {
            sig: prefix.sig.clone(),
            top: Hier::Succ(Box::new(prefix.top.clone()), hier_marks),
        })
    }

    pub fn atoms(&self) -> AtomSet {
        self.sig.atoms.iter().cloned().collect()
    }

    pub fn n_agents(&self) -> u8 {
        self.sig.n_agents
    }

    /// The depth k of the world `(f_0, ..., f_k)`.
    pub fn depth(&self) -> usize {
        self.top.depth()
    }

    /// Truth of one atom at level 0.
    pub fn atom_true(&self, atom: &str) -> bool {
        self.sig
            .atom_index(atom)
            .is_some_and(|i| self.top.mask() >> i & 1 == 1)
    }

    /// The atoms true at level 0 (the propositional state of the world).
    pub fn state_atoms(&self) -> AtomSet {
        let mask = self.top.mask();
        self.sig
            .atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect()
    }

    /// The worlds marked for `agent` at the top level (empty at depth 0).
    pub fn marked(&self, agent: AgentId) -> Vec<KWorld> {
        match self.top.marks() {
            Some(m) => m
                .get(agent.index0())
                .map(|set| {
                    set.iter()
                        .map(|h| KWorld { sig: self.sig.clone(), top: h.clone() })
                        .collect()
                })
                .unwrap_or_default(),
            None => Vec::new(),
        }
    }

    /// The depth-(k-1) prefix, or None at depth 0.
    pub fn prefix(&self) -> Option<KWorld> {
        self.top
            .prefix()
            .map(|p| KWorld { sig: self.sig.clone(), top: p.clone() })
    }

    /// Pretty JSON in the nested level-indexed world format.
    pub fn to_json(&self) -> String {
        let v = json!({
            "atoms": self.sig.atoms,
            "agents": self.sig.n_agents,
            "levels": hier_levels_value(&self.sig, &self.top),
        });
        serde_json::to_string_pretty(&v).expect("world JSON serialization cannot fail")
    }

    /// Parse the nested world format, validating structure and signature.
    pub fn from_json(text: &str) -> Result<KWorld> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("invalid world JSON: {e}")))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Input("world JSON must be an object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "atoms" | "agents" | "levels") {
                return Err(Error::Input(format!("unknown world field {key:?}")));
            }
        }
        let atoms_v = obj
            .get("atoms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Input("world JSON needs an \"atoms\" array".into()))?;
        let mut atoms = AtomSet::new();
        for a in atoms_v {
            let s = a
                .as_str()
                .ok_or_else(|| Error::Input("atoms must be strings".into()))?;
            if !atoms.insert(s.to_string()) {
                return Err(Error::Input(format!("duplicate atom {s:?}")));
            }
        }
        let agents = obj
            .get("agents")
            .and_then(Value::as_u64)
            .filter(|n| (1..=u8::MAX as u64).contains(n))
            .ok_or_else(|| Error::Input("\"agents\" must be an integer >= 1".into()))?;
        let sig = Sig::new(&atoms, agents as u8)?;
        let levels = obj
            .get("levels")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Input("world JSON needs a \"levels\" array".into()))?;
        let top = hier_from_levels(&sig, levels)?;
        Ok(KWorld { sig, top })
    }
}

/// Render a hierarchy element as its levels array.
fn hier_levels_value(sig: &Sig, h: &Hier) -> Value {
    let chain = h.chain();
    let mut levels = Vec::with_capacity(chain.len());
    let mask = h.mask();
    let mut val = Map::new();
    for (i, a) in sig.atoms.iter().enumerate() {
        val.insert(a.clone(), json!(mask >> i & 1));
    }
    levels.push(Value::Object(val));
    for lvl in chain.iter().skip(1) {
        let marks = lvl.marks().expect("levels above 0 carry marks");
        let mut per_agent = Map::new();
        for (i, set) in marks.iter().enumerate() {
            per_agent.insert(
                (i + 1).to_string(),
                Value::Array(set.iter().map(|g| hier_levels_value(sig, g)).collect()),
            );
        }
        levels.push(Value::Object(per_agent));
    }
    Value::Array(levels)
}

/// Parse a levels array into a hierarchy element.
fn hier_from_levels(sig: &Sig, levels: &[Value]) -> Result<Hier> {
    if levels.is_empty() {
        return Err(Error::Input(
            "a world needs at least the valuation level".into(),
        ));
    }
    let val = levels[0]
        .as_object()
        .ok_or_else(|| Error::Input("level 0 must be an atom-to-bit object".into()))?;
    for key in val.keys() {
        if sig.atom_index(key).is_none() {
            return Err(Error::Input(format!(
                "valuation mentions unknown atom {key:?}"
            )));
        }
    }
    let mut mask = 0u32;
    for (i, a) in sig.atoms.iter().enumerate() {
        let bit = val
            .get(a)
            .and_then(Value::as_u64)
            .filter(|b| *b <= 1)
            .ok_or_else(|| Error::Input(format!("valuation for {a:?} must be 0 or 1")))?;
        mask |= (bit as u32) << i;
    }
    let mut cur = Hier::Zero(mask);
    for (h, lv) in levels.iter().enumerate().skip(1) {
        let per_agent = lv
            .as_object()
            .ok_or_else(|| Error::Input(format!("level {h} must be an object")))?;
        let mut marks = vec![BTreeSet::new(); sig.n_agents as usize];
        for (key, arr) in per_agent {
            let agent: u8 = key
                .parse()
                .ok()
                .filter(|a| (1..=sig.n_agents).contains(a))
                .ok_or_else(|| {
                    Error::Input(format!("level {h} has invalid agent key {key:?}"))
                })?;
            let worlds = arr.as_array().ok_or_else(|| {
                Error::Input(format!("marks for agent {agent} must be an array"))
            })?;
            for wv in worlds {
                let sub = wv.as_array().ok_or_else(|| {
                    Error::Input("a marked world must be a levels array".into())
                })?;
                if sub.len() != h {
                    return Err(Error::Input(format!(
                        "a world marked at level {h} must have {h} levels, got {}",
                        sub.len()
                    )));
                }
                marks[(agent - 1) as usize].insert(hier_from_levels(sig, sub)?);
            }
        }
        cur = Hier::Succ(Box::new(cur), marks);
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Strata: lazily materialized Z_0, Z_1, ...
// ---------------------------------------------------------------------------

/// Lazily materialized strata `Z_0, Z_1, ...` over one signature.
struct Universe {
    sig: Sig,
    strata: Vec<Vec<Hier>>,
}

impl Universe {
    fn new(sig: &Sig) -> Self {
        Universe { sig: sig.clone(), strata: Vec::new() }
    }

    /// |Z_h| if it stays within `limit`, else None. The stratum sizes grow
    /// as a tower: |Z_0| = 2^|P| and |Z_{h+1}| = |Z_h| * 2^(n * |Z_h|).
    fn count(sig: &Sig, h: usize, limit: u128) -> Option<u128> {
        let mut c: u128 = 1u128 << sig.atoms.len();
        for _ in 0..h {
            let exp = (sig.n_agents as u128).checked_mul(c)?;
            if exp >= 64 {
                return None;
            }
            c = c.checked_mul(1u128 << exp)?;
            if c > limit {
                return None;
            }
        }
        if c > limit {
            None
        } else {
            Some(c)
        }
    }

    /// Materialize and return `Z_h`, guarding by `cap`.
    fn z(&mut self, h: usize, cap: u64) -> Result<&[Hier]> {
        while self.strata.len() <= h {
            let next = self.strata.len();
            let stratum = self.build_stratum(next, cap)?;
            self.strata.push(stratum);
        }
        Ok(&self.strata[h])
    }

    fn build_stratum(&self, h: usize, cap: u64) -> Result<Vec<Hier>> {
        let count = Self::count(&self.sig, h, cap as u128).ok_or_else(|| {
            Error::cap(format!("worlds at depth {h}"), u64::MAX, cap)
        })?;
        if h == 0 {
            return Ok((0..self.sig.n_valuations()).map(|m| Hier::Zero(m as u32)).collect());
        }
        let prev = &self.strata[h - 1];
        let m = prev.len();
        let n = self.sig.n_agents as usize;
        let bits = n * m;
        debug_assert!(bits < 64, "cap check bounds the subset odometer");
        let mut out = Vec::with_capacity(count as usize);
        for p in prev {
            for combo in 0..(1u64 << bits) {
                let marks: Vec<BTreeSet<Hier>> = (0..n)
                    .map(|i| {
                        (0..m)
                            .filter(|j| combo >> (i * m + j) & 1 == 1)
                            .map(|j| prev[j].clone())
                            .collect()
                    })
                    .collect();
                out.push(Hier::Succ(Box::new(p.clone()), marks));
            }
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Which worlds an enumeration keeps.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WorldFilter {
    /// Every world, coherent or not.
    All,
    /// Only coherent worlds.
    Coherent,
    /// Only coherent worlds that additionally satisfy belief correctness.
    CoherentCorrect,
}

/// All depth-`k` worlds over `(atoms, n_agents)`, optionally filtered.
///
/// Coherent worlds are generated directly: the two coherence conditions
/// force every interior level to be the projection of the level above, so a
/// coherent world is exactly a valuation plus a free choice of top-level
/// marks; interior levels are reconstructed by projecting downwards.
pub fn enumerate_worlds(
    atoms: &AtomSet,
    n_agents: u8,
    k: usize,
    filter: WorldFilter,
    cap: u64,
) -> Result<Vec<KWorld>> {
    let sig = Sig::new(atoms, n_agents)?;
    let mut uni = Universe::new(&sig);
    match filter {
        WorldFilter::All => {
            let zs = uni.z(k, cap)?;
            Ok(zs
                .iter()
                .map(|h| KWorld { sig: sig.clone(), top: h.clone() })
                .collect())
        }
        WorldFilter::Coherent => enumerate_coherent(&sig, &mut uni, k, cap),
        WorldFilter::CoherentCorrect => {
            let worlds = enumerate_coherent(&sig, &mut uni, k, cap)?;
            Ok(worlds.into_iter().filter(|w| coherence(w).correct).collect())
        }
    }
}

fn enumerate_coherent(sig: &Sig, uni: &mut Universe, k: usize, cap: u64) -> Result<Vec<KWorld>> {
    if k == 0 {
        return Ok((0..sig.n_valuations())
            .map(|m| KWorld { sig: sig.clone(), top: Hier::Zero(m as u32) })
            .collect());
    }
    let prev = uni.z(k - 1, cap)?.to_vec();
    let m = prev.len();
    let n = sig.n_agents as usize;
    let bits = n * m;
    let total = if bits >= 63 {
        None
    } else {
        (1u128 << bits).checked_mul(sig.n_valuations() as u128)
    };
    match total {
        Some(t) if t <= cap as u128 => {}
        _ => {
            return Err(Error::cap(
                format!("coherent worlds at depth {k}"),
                total.map_or(u64::MAX, |t| t.min(u64::MAX as u128) as u64),
                cap,
            ))
        }
    }
    let mut out = Vec::new();
    for f0 in 0..sig.n_valuations() {
        for combo in 0..(1u64 << bits) {
            let topmarks: Vec<BTreeSet<Hier>> = (0..n)
                .map(|i| {
                    (0..m)
                        .filter(|j| combo >> (i * m + j) & 1 == 1)
                        .map(|j| prev[j].clone())
                        .collect()
                })
                .collect();
            out.push(KWorld {
                sig: sig.clone(),
                top: build_coherent(f0 as u32, topmarks, k),
            });
        }
    }
    Ok(out)
}

/// Assemble the unique coherent world with the given valuation and top-level
/// marks: interior levels are the iterated projections of the top level.
fn build_coherent(f0: u32, topmarks: Vec<BTreeSet<Hier>>, k: usize) -> Hier {
    let mut levels: Vec<Vec<BTreeSet<Hier>>> = vec![Vec::new(); k + 1];
    levels[k] = topmarks;
    for h in (1..k).rev() {
        levels[h] = levels[h + 1]
            .iter()
            .map(|set| {
                set.iter()
                    .map(|g| g.prefix().expect("marks above level 1 wrap a prefix").clone())
                    .collect()
            })
            .collect();
    }
    let mut w = Hier::Zero(f0);
    for marks in levels.drain(1..) {
        w = Hier::Succ(Box::new(w), marks);
    }
    w
}

// ---------------------------------------------------------------------------
// Coherence and correctness
// ---------------------------------------------------------------------------

/// One coherence failure: the mark at `level` for `agent` that lacks either
/// its projection one level down or an extension one level up.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub level: usize,
    pub agent: AgentId,
    pub witness: String,
}

/// Outcome of checking a world for coherence and belief correctness.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoherenceReport {
    pub coherent: bool,
    pub correct: bool,
    pub violations: Vec<Violation>,
}

/// Check both coherence conditions and belief correctness.
///
/// Coherence: every mark at level `h >= 2` projects to a mark at level
/// `h-1` (projection), and every mark at level `h <= k-1` extends to a mark
/// at level `h+1` (extension). Correctness: the world's own depth-(h-1)
/// prefix is marked for every agent at every level `1..=k`.
pub fn coherence(w: &KWorld) -> CoherenceReport {
    let k = w.depth();
    let n = w.sig.n_agents as usize;
    let chain = w.top.chain();
    let marks_at: Vec<&[BTreeSet<Hier>]> = (1..=k)
        .map(|h| chain[h].marks().expect("levels above 0 carry marks"))
        .collect();
    let marks = |h: usize| marks_at[h - 1];

    let mut violations = Vec::new();
    // Projection: a mark at level h must be prefixed by a mark at level h-1.
    for h in 2..=k {
        for i in 0..n {
            for g in &marks(h)[i] {
                let gp = g.prefix().expect("marks above level 1 wrap a prefix");
                if !marks(h - 1)[i].contains(gp) {
                    violations.push(Violation {
                        level: h,
                        agent: agent_at(i),
                        witness: witness_json(&w.sig, g),
                    });
                }
            }
        }
    }
    // Extension: a mark at level h must extend to a mark at level h+1.
    for h in 1..k {
        for i in 0..n {
            for g in &marks(h)[i] {
                let extended = marks(h + 1)[i].iter().any(|g2| g2.prefix() == Some(g));
                if !extended {
                    violations.push(Violation {
                        level: h,
                        agent: agent_at(i),
                        witness: witness_json(&w.sig, g),
                    });
                }
            }
        }
    }
    let correct = k >= 1
        && (1..=k).all(|h| (0..n).all(|i| marks(h)[i].contains(chain[h - 1])))
        || k == 0;
    CoherenceReport { coherent: violations.is_empty(), correct, violations }
}

fn witness_json(sig: &Sig, g: &Hier) -> String {
    hier_levels_value(sig, g).to_string()
}

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

/// Exact satisfaction at a world, with the default complement cap.
pub fn sat_structure(w: &KWorld, phi: &EpistemicFormula) -> Result<bool> {
    sat_structure_capped(w, phi, DEFAULT_SAT_CAP)
}

/// Exact satisfaction at a world.
///
/// `B[i] phi` holds iff `phi` holds at every world the agent marks at the
/// top level; `C[i] phi` iff `phi` holds at every *unmarked* world of the
/// full stratum one level down, including incoherent ones. Requires
/// `depth(phi) <= w.depth()` and the formula's atoms and agents to lie in
/// the world's signature. Expects a coherent world; coherence itself is
/// not re-checked here.
pub fn sat_structure_capped(w: &KWorld, phi: &EpistemicFormula, cap: u64) -> Result<bool> {
    if phi.depth() > w.depth() {
        return Err(Error::Input(format!(
            "formula depth {} exceeds world depth {}",
            phi.depth(),
            w.depth()
        )));
    }
    let missing: Vec<_> = phi
        .atoms()
        .into_iter()
        .filter(|a| w.sig.atom_index(a).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Input(format!(
            "formula atoms {missing:?} are outside the world's signature"
        )));
    }
    if phi.max_agent() > w.sig.n_agents {
        return Err(Error::Input(format!(
            "formula mentions agent {} but the world has {} agents",
            phi.max_agent(),
            w.sig.n_agents
        )));
    }
    let mut ev = StructEval {
        uni: Universe::new(&w.sig),
        cap,
        memo: HashMap::new(),
    };
    ev.eval(&w.top, phi)
}

struct StructEval {
    uni: Universe,
    cap: u64,
    memo: HashMap<(Hier, EpistemicFormula), bool>,
}

impl StructEval {
    fn eval(&mut self, w: &Hier, phi: &EpistemicFormula) -> Result<bool> {
        match phi {
            EpistemicFormula::Atom(a) => {
                let i = self.uni.sig.atom_index(a).expect("atoms checked upfront");
                Ok(w.mask() >> i & 1 == 1)
            }
            EpistemicFormula::Top => Ok(true),
            EpistemicFormula::Bottom => Ok(false),
            EpistemicFormula::Neg(b) => Ok(!self.eval(w, b)?),
            EpistemicFormula::Conj(a, b) => Ok(self.eval(w, a)? && self.eval(w, b)?),
            EpistemicFormula::Box(i, body) => {
                let key = (w.clone(), phi.clone());
                if let Some(&v) = self.memo.get(&key) {
                    return Ok(v);
                }
                let marks = &w.marks().expect("depth precondition checked upfront")[i.index0()];
                let mut out = true;
                for g in marks {
                    if !self.eval(g, body)? {
                        out = false;
                        break;
                    }
                }
                self.memo.insert(key, out);
                Ok(out)
            }
            EpistemicFormula::CBox(i, body) => {
                let key = (w.clone(), phi.clone());
                if let Some(&v) = self.memo.get(&key) {
                    return Ok(v);
                }
                let lower = w.depth() - 1;
                let stratum = self.uni.z(lower, self.cap)?.to_vec();
                let marks = &w.marks().expect("depth precondition checked upfront")[i.index0()];
                let mut out = true;
                for g in &stratum {
                    if !marks.contains(g) && !self.eval(g, body)? {
                        out = false;
                        break;
                    }
                }
                self.memo.insert(key, out);
                Ok(out)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Restriction and extension
// ---------------------------------------------------------------------------

/// Drop levels above `k2` (prefix truncation).
pub fn restrict(w: &KWorld, k2: usize) -> Result<KWorld> {
    if k2 > w.depth() {
        return Err(Error::Input(format!(
            "cannot restrict a depth-{} world to depth {k2}",
            w.depth()
        )));
    }
    Ok(KWorld { sig: w.sig.clone(), top: w.top.truncate(k2).clone() })
}

/// Extend to depth `k2` by the canonical minimal coherent completion: each
/// new level marks exactly one minimal extension of every mark below, plus
/// the world's own prefix when the input is correct. Expects a coherent
/// input; the completion of a coherent world is coherent, and the
/// completion of a correct world stays correct at the completed levels.
pub fn extend(w: &KWorld, k2: usize) -> Result<KWorld> {
    if k2 < w.depth() {
        return Err(Error::Input(format!(
            "cannot extend a depth-{} world down to depth {k2}",
            w.depth()
        )));
    }
    let n = w.sig.n_agents as usize;
    let keep_correct = coherence(w).correct;
    let mut top = w.top.clone();
    while top.depth() < k2 {
        let mut new_marks = Vec::with_capacity(n);
        for i in 0..n {
            let mut set = BTreeSet::new();
            if let Some(m) = top.marks() {
                for g in &m[i] {
                    set.insert(Hier::Succ(Box::new(g.clone()), vec![BTreeSet::new(); n]));
                }
            }
            if keep_correct {
                set.insert(top.clone());
            }
            new_marks.push(set);
        }
        top = Hier::Succ(Box::new(top), new_marks);
    }
    Ok(KWorld { sig: w.sig.clone(), top })
}

/// Extend to depth `k2` with random coherent completions: level 1 (when
/// starting from depth 0) gets arbitrary random marks, and every later
/// level marks a nonempty random set of extensions of each mark below.
/// With `force_correct` the world's own prefix is marked at each new level,
/// so a correct input stays correct. A coherent input yields a coherent
/// output either way.
pub fn extend_random<R: rand::Rng>(
    w: &KWorld,
    k2: usize,
    max_branch: usize,
    force_correct: bool,
    rng: &mut R,
) -> Result<KWorld> {
    if k2 < w.depth() {
        return Err(Error::Input(format!(
            "cannot extend a depth-{} world down to depth {k2}",
            w.depth()
        )));
    }
    let n = w.sig.n_agents as usize;
    let branch = max_branch.max(1);
    let mut uni = Universe::new(&w.sig);
    let mut top = w.top.clone();
    while top.depth() < k2 {
        let d = top.depth();
        let mut new_marks = Vec::with_capacity(n);
        if d == 0 {
            // Marks at level 1 are unconstrained subsets of the stratum below.
            let z0 = uni.z(0, DEFAULT_SAT_CAP)?.to_vec();
            for _ in 0..n {
                let mut set: BTreeSet<Hier> =
                    z0.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
                if force_correct {
                    set.insert(top.clone());
                }
                new_marks.push(set);
            }
        } else {
            // Marks at level d+1 must project exactly onto the marks below.
            let lower = uni.z(d - 1, DEFAULT_SAT_CAP)?.to_vec();
            for i in 0..n {
                let mut set = BTreeSet::new();
                let below = top.marks().expect("positive depth carries marks")[i].clone();
                for g in &below {
                    let count = rng.gen_range(1..=branch);
                    for _ in 0..count {
                        let sub_marks: Vec<BTreeSet<Hier>> = (0..n)
                            .map(|_| {
                                lower
                                    .iter()
                                    .filter(|_| rng.gen_bool(0.5))
                                    .cloned()
                                    .collect()
                            })
                            .collect();
                        set.insert(Hier::Succ(Box::new(g.clone()), sub_marks));
                    }
                }
                if force_correct {
                    set.insert(top.clone());
                }
                new_marks.push(set);
            }
        }
        top = Hier::Succ(Box::new(top), new_marks);
    }
    Ok(KWorld { sig: w.sig.clone(), top })
}

/// A seeded random coherent world built level by level; correct at every
/// level when `force_correct` is set.
pub fn random_coherent_world<R: rand::Rng>(
    atoms: &AtomSet,
    n_agents: u8,
    k: usize,
    max_branch: usize,
    force_correct: bool,
    rng: &mut R,
) -> Result<KWorld> {
    let sig = Sig::new(atoms, n_agents)?;
    let mask = rng.gen_range(0..sig.n_valuations()) as u32;
    let w = KWorld { sig, top: Hier::Zero(mask) };
    extend_random(&w, k, max_branch, force_correct, rng)
}

// ---------------------------------------------------------------------------
// tau: from pointed models to hierarchies
// ---------------------------------------------------------------------------

/// The depth-`k` belief hierarchy of the point of a Kripke model over
/// `atoms`, built bottom-up: level 0 is the point's valuation restricted to
/// `atoms`, and level h+1 marks, for each agent, the level-h hierarchies of
/// the agent's successors. The result is always coherent.
pub fn tau(pk: &PointedKripke, k: usize, atoms: &AtomSet) -> Result<KWorld> {
    let m = pk.model();
    let sig = Sig::new(atoms, m.n_agents())?;
    let nw = m.n_worlds();
    let mut cur: Vec<Hier> = (0..nw)
        .map(|widx| {
            let mut mask = 0u32;
            for (i, a) in sig.atoms.iter().enumerate() {
                if m.atom_true_at(a, widx) {
                    mask |= 1 << i;
                }
            }
            Hier::Zero(mask)
        })
        .collect();
    let agents = AgentId::all(m.n_agents());
    for _level in 1..=k {
        let next: Vec<Hier> = (0..nw)
            .map(|widx| {
                let marks: Vec<BTreeSet<Hier>> = agents
                    .iter()
                    .map(|&i| {
                        m.successors(i, widx)
                            .iter()
                            .map(|&u| cur[u].clone())
                            .collect()
                    })
                    .collect();
                Hier::Succ(Box::new(cur[widx].clone()), marks)
            })
            .collect();
        cur = next;
    }
    Ok(KWorld { sig, top: cur[pk.world_idx()].clone() })
}

/// As [`tau`], for a pointed belief model: the model is first translated to
/// its Kripke form, so marks follow the epistemic-alternative relation over
/// the model's context.
pub fn tau_mbm(m: &PointedModel, k: usize, atoms: &AtomSet) -> Result<KWorld> {
    tau(&mbm_to_kripke(m), k, atoms)
}

// ---------------------------------------------------------------------------
// Canonical bases
// ---------------------------------------------------------------------------

/// The belief base realizing a coherent world's hierarchy.
///
/// For each agent the base holds one disjunctive description per level
/// `1..=k`: the level-h description enumerates the marked (h-1)-worlds,
/// each rendered as its valuation literals conjoined (above level 1) with
/// every agent's constraint on the description one level down. An empty
/// marked set renders as `false`. On top of that, every `guard_atom` q
/// contributes the graded guards `MB^h ~q` for `0 <= h <= k`; guard atoms
/// are expected to be disjoint from the signature atoms. The state is the
/// set of atoms true at level 0.
pub fn canonical_base(w: &KWorld, guard_atoms: &AtomSet) -> BeliefBase {
    let k = w.depth();
    let agents = AgentId::all(w.sig.n_agents);
    let chain = w.top.chain();
    let mut base = BeliefBase::new(w.sig.n_agents);
    for &i in &agents {
        for h in 1..=k {
            base.insert_member(i, beta(&w.sig, i.index0(), chain[h]));
        }
        for q in guard_atoms {
            for h in 0..=k {
                base.insert_member(
                    i,
                    mutual_belief(h, &ExplicitFormula::atom(q.clone()).neg(), &agents),
                );
            }
        }
    }
    base.set_state(w.state_atoms());
    base
}

/// The disjunction over the worlds agent `agent_idx` marks at the top of
/// `h_world`, each disjunct pinning the marked world's valuation and (above
/// level 1) every agent's lower description.
fn beta(sig: &Sig, agent_idx: usize, h_world: &Hier) -> ExplicitFormula {
    let marks = &h_world.marks().expect("descriptions start at level 1")[agent_idx];
    ExplicitFormula::disj_all(marks.iter().map(|g| match g {
        Hier::Zero(m) => lit_conj(sig, *m),
        Hier::Succ(..) => {
            let mut parts = vec![lit_conj(sig, g.mask())];
            for j in 0..sig.n_agents as usize {
                parts.push(ExplicitFormula::tri(agent_at(j), beta(sig, j, g)));
            }
            ExplicitFormula::conj_all(parts)
        }
    }))
}

/// The conjunction of literals pinning a valuation over the signature atoms.
fn lit_conj(sig: &Sig, mask: u32) -> ExplicitFormula {
    ExplicitFormula::conj_all(sig.atoms.iter().enumerate().map(|(idx, a)| {
        let atom = ExplicitFormula::atom(a.clone());
        if mask >> idx & 1 == 1 {
            atom
        } else {
            atom.neg()
        }
    }))
}

// ---------------------------------------------------------------------------
// Universal validity
// ---------------------------------------------------------------------------

/// True iff `phi` holds at every coherent (and, with `bc`, correct)
/// depth(phi)-world over the formula's own atoms and agents. This is the
/// exact finite counterpart of validity over the universal context.
pub fn valid_universal(phi: &EpistemicFormula, bc: bool) -> Result<bool> {
    Ok(find_structure_countermodel(phi, bc, DEFAULT_WORLD_CAP, DEFAULT_SAT_CAP)?.is_none())
}

/// A coherent (resp. also correct) world falsifying `phi`, if one exists.
pub fn find_structure_countermodel(
    phi: &EpistemicFormula,
    bc: bool,
    world_cap: u64,
    sat_cap: u64,
) -> Result<Option<KWorld>> {
    let atoms = phi.atoms();
    let n = phi.max_agent().max(1);
    let filter = if bc { WorldFilter::CoherentCorrect } else { WorldFilter::Coherent };
    let worlds = enumerate_worlds(&atoms, n, phi.depth(), filter, world_cap)?;
    for w in worlds {
        if !sat_structure_capped(&w, phi, sat_cap)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
