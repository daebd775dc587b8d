//! Multi-agent belief bases, contexts, and the two satisfaction relations.
//!
//! A [`BeliefBase`] pairs one finite set of explicit formulas per agent with a
//! propositional state (the set of true atoms). Explicit formulas are checked
//! directly against a base ([`sat_explicit`]); epistemic formulas are checked
//! against a [`PointedModel`], i.e. a base plus a finite [`Context`] of
//! candidate bases ([`sat_epistemic`]). Agent `i`'s *epistemic alternatives*
//! at `B` are the context members satisfying everything in `B`'s base for `i`;
//! `B[i]` quantifies over them and `C[i]` over the remaining context members.
//!
//! Base membership is syntactic: `X[1] p` holds iff the formula `p` itself is
//! a member of base 1, so `p` and `p & p` are distinct members.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::formula::{
    is_valid_atom, parse_explicit, AgentId, AtomSet, EpistemicFormula, ExplicitFormula,
};

/// One agent configuration: a belief base per agent plus a propositional state.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BeliefBase {
    /// Base sets indexed by 0-based agent; the length is the agent count.
    bases: Vec<BTreeSet<ExplicitFormula>>,
    /// The set of atoms that are true.
    state: AtomSet,
}

impl BeliefBase {
    /// A base with `n_agents` empty belief sets and an empty state.
    pub fn new(n_agents: u8) -> Self {
        assert!(n_agents >= 1, "at least one agent required");
        BeliefBase { bases: vec![BTreeSet::new(); n_agents as usize], state: AtomSet::new() }
    }

    /// Builder: replaces the state with the given atoms.
    pub fn with_state<I, S>(mut self, atoms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.state = atoms.into_iter().map(Into::into).collect();
        self
    }

    /// Builder: adds one formula to `agent`'s base.
    pub fn with_member(mut self, agent: AgentId, member: ExplicitFormula) -> Self {
        self.insert_member(agent, member);
        self
    }

    /// Adds one formula to `agent`'s base.
    pub fn insert_member(&mut self, agent: AgentId, member: ExplicitFormula) {
        let idx = agent.index0();
        assert!(idx < self.bases.len(), "agent {agent} out of range");
        self.bases[idx].insert(member);
    }

    /// Replaces the state.
    pub fn set_state(&mut self, state: AtomSet) {
        self.state = state;
    }

    pub fn n_agents(&self) -> u8 {
        self.bases.len() as u8
    }

    /// Agent `i`'s base. Out-of-range agents have an empty base, so bases with
    /// different agent counts can be compared without panicking.
    pub fn base(&self, agent: AgentId) -> &BTreeSet<ExplicitFormula> {
        static EMPTY: OnceLock<BTreeSet<ExplicitFormula>> = OnceLock::new();
        self.bases
            .get(agent.index0())
            .unwrap_or_else(|| EMPTY.get_or_init(BTreeSet::new))
    }

    pub fn state(&self) -> &AtomSet {
        &self.state
    }

    /// All atoms mentioned anywhere in the base: state plus member formulas.
    pub fn mentioned_atoms(&self) -> AtomSet {
        let mut out = self.state.clone();
        for set in &self.bases {
            for f in set {
                out.extend(f.atoms());
            }
        }
        out
    }
}

/// A finite set of belief bases; duplicates collapse under structural equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct Context {
    members: BTreeSet<BeliefBase>,
}

impl Context {
    pub fn new() -> Self {
        Context::default()
    }

    pub fn from_members(members: impl IntoIterator<Item = BeliefBase>) -> Self {
        Context { members: members.into_iter().collect() }
    }

    pub fn insert(&mut self, member: BeliefBase) {
        self.members.insert(member);
    }

    pub fn contains(&self, base: &BeliefBase) -> bool {
        self.members.contains(base)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in their canonical (structural) order.
    pub fn iter(&self) -> impl Iterator<Item = &BeliefBase> {
        self.members.iter()
    }
}

impl FromIterator<BeliefBase> for Context {
    fn from_iter<T: IntoIterator<Item = BeliefBase>>(iter: T) -> Self {
        Context::from_members(iter)
    }
}

impl IntoIterator for Context {
    type Item = BeliefBase;
    type IntoIter = std::collections::btree_set::IntoIter<BeliefBase>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.into_iter()
    }
}

/// A pointed model: the base under evaluation plus its context.
///
/// The base is *not* required to be a context member (belief correctness,
/// checked by [`satisfies_bc`], additionally requires membership).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PointedModel {
    pub base: BeliefBase,
    pub context: Context,
}

impl PointedModel {
    pub fn new(base: BeliefBase, context: Context) -> Self {
        PointedModel { base, context }
    }
}

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

/// Checks an explicit formula against a single base: atoms against the state,
/// `X[i] a` as literal membership of `a` in base `i`.
pub fn sat_explicit(b: &BeliefBase, alpha: &ExplicitFormula) -> bool {
    match alpha {
        ExplicitFormula::Atom(p) => b.state.contains(p),
        ExplicitFormula::Top => true,
        ExplicitFormula::Bottom => false,
        ExplicitFormula::Neg(x) => !sat_explicit(b, x),
        ExplicitFormula::Conj(x, y) => sat_explicit(b, x) && sat_explicit(b, y),
        ExplicitFormula::Tri(i, body) => b.base(*i).contains(body.as_ref()),
    }
}

/// A base is correct when it satisfies every member of each of its own bases.
pub fn is_correct(b: &BeliefBase) -> bool {
    (1..=b.n_agents()).all(|i| {
        let agent = AgentId::new(i).expect("nonzero");
        b.base(agent).iter().all(|alpha| sat_explicit(b, alpha))
    })
}

/// `b2` is an epistemic alternative for `agent` at `b` iff `b2` satisfies
/// every formula in `b`'s base for that agent.
pub fn is_alternative(b: &BeliefBase, agent: AgentId, b2: &BeliefBase) -> bool {
    b.base(agent).iter().all(|alpha| sat_explicit(b2, alpha))
}

/// The context members that are epistemic alternatives for `agent` at `b`.
pub fn alternatives<'c>(b: &BeliefBase, agent: AgentId, ctx: &'c Context) -> Vec<&'c BeliefBase> {
    ctx.iter().filter(|b2| is_alternative(b, agent, b2)).collect()
}

/// Checks an epistemic formula at a pointed model.
///
/// `B[i] a` holds iff `a` holds at `(B', ctx)` for every alternative `B'` of
/// the point; `C[i] a` holds iff `a` holds at every context member that is not
/// an alternative. Evaluation is bottom-up over subformulas with one bit per
/// context member, so each (member, subformula) pair is evaluated once.
pub fn sat_epistemic(m: &PointedModel, phi: &EpistemicFormula) -> bool {
    Evaluator::new(m).check(phi)
}

struct Evaluator<'m> {
    /// Context members in canonical order, then the point if it is external.
    nodes: Vec<&'m BeliefBase>,
    /// Number of leading nodes that are context members (quantifier range).
    n_ctx: usize,
    point_idx: usize,
    /// Per explicit constraint: which context members satisfy it.
    constraint_sat: HashMap<ExplicitFormula, Bits>,
    /// Per (node, agent): which context members are alternatives.
    alt: HashMap<(usize, AgentId), Bits>,
    /// Per epistemic subformula: which nodes satisfy it.
    memo: HashMap<EpistemicFormula, Bits>,
}

impl<'m> Evaluator<'m> {
    fn new(m: &'m PointedModel) -> Self {
        let mut nodes: Vec<&BeliefBase> = m.context.iter().collect();
        let n_ctx = nodes.len();
        let point_idx = match nodes.iter().position(|b| *b == &m.base) {
            Some(i) => i,
            None => {
                nodes.push(&m.base);
                n_ctx
            }
        };
        Evaluator {
            nodes,
            n_ctx,
            point_idx,
            constraint_sat: HashMap::new(),
            alt: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn check(&mut self, phi: &EpistemicFormula) -> bool {
        let bits = self.eval(phi);
        bits.get(self.point_idx)
    }

    fn constraint_bits(&mut self, alpha: &ExplicitFormula) -> Bits {
        if let Some(b) = self.constraint_sat.get(alpha) {
            return b.clone();
        }
        let mut bits = Bits::zeros(self.n_ctx);
        for (i, node) in self.nodes[..self.n_ctx].iter().enumerate() {
            if sat_explicit(node, alpha) {
                bits.set(i, true);
            }
        }
        self.constraint_sat.insert(alpha.clone(), bits.clone());
        bits
    }

    /// Alternatives of node `u` for `agent`, as bits over the context part.
    fn alt_bits(&mut self, u: usize, agent: AgentId) -> Bits {
        if let Some(b) = self.alt.get(&(u, agent)) {
            return b.clone();
        }
        let mut bits = Bits::ones(self.n_ctx);
        let constraints: Vec<ExplicitFormula> =
            self.nodes[u].base(agent).iter().cloned().collect();
        for alpha in &constraints {
            let sat = self.constraint_bits(alpha);
            bits.and_with(&sat);
        }
        self.alt.insert((u, agent), bits.clone());
        bits
    }

    fn eval(&mut self, phi: &EpistemicFormula) -> Bits {
        if let Some(b) = self.memo.get(phi) {
            return b.clone();
        }
        let n = self.nodes.len();
        let bits = match phi {
            EpistemicFormula::Atom(p) => {
                let mut b = Bits::zeros(n);
                for (i, node) in self.nodes.iter().enumerate() {
                    if node.state.contains(p) {
                        b.set(i, true);
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
                for u in 0..n {
                    let alt = self.alt_bits(u, *agent);
                    if alt.subset_of(&body_bits, self.n_ctx) {
                        b.set(u, true);
                    }
                }
                b
            }
            EpistemicFormula::CBox(agent, body) => {
                let body_bits = self.eval(body);
                let mut b = Bits::zeros(n);
                for u in 0..n {
                    let mut non_alt = self.alt_bits(u, *agent);
                    non_alt.negate();
                    if non_alt.subset_of(&body_bits, self.n_ctx) {
                        b.set(u, true);
                    }
                }
                b
            }
        };
        self.memo.insert(phi.clone(), bits.clone());
        bits
    }
}

/// Belief correctness of a pointed model: the point is a context member and
/// every member is a self-alternative for every agent.
///
/// The equivalent characterization "the point is a member and every member is
/// correct" is computed independently; disagreement raises
/// [`Error::InternalInconsistency`], since it would indicate a bug.
pub fn satisfies_bc(m: &PointedModel) -> Result<bool> {
    let member = m.context.contains(&m.base);
    let self_accessible = m.context.iter().all(|b| {
        (1..=b.n_agents()).all(|i| {
            let agent = AgentId::new(i).expect("nonzero");
            is_alternative(b, agent, b)
        })
    });
    let literal = member && self_accessible;

    let all_correct = m.context.iter().all(is_correct);
    let characterization = member && all_correct;

    if literal != characterization {
        return Err(Error::InternalInconsistency(format!(
            "belief-correctness checks disagree: self-accessibility gives {literal}, \
             member-correctness gives {characterization}"
        )));
    }
    Ok(literal)
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    agents: u8,
    base: BaseFile,
    context: Vec<BaseFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseFile {
    state: Vec<String>,
    bases: BTreeMap<String, Vec<String>>,
}

pub(crate) fn base_to_file_parts(b: &BeliefBase) -> (Vec<String>, BTreeMap<String, Vec<String>>) {
    let state = b.state.iter().cloned().collect();
    let bases = (1..=b.n_agents())
        .map(|i| {
            let agent = AgentId::new(i).expect("nonzero");
            (i.to_string(), b.base(agent).iter().map(|f| f.render()).collect())
        })
        .collect();
    (state, bases)
}

fn base_to_file(b: &BeliefBase) -> BaseFile {
    let (state, bases) = base_to_file_parts(b);
    BaseFile { state, bases }
}

fn base_from_file(file: &BaseFile, n_agents: u8) -> Result<BeliefBase> {
    let mut b = BeliefBase::new(n_agents);
    let mut state = AtomSet::new();
    for atom in &file.state {
        if !is_valid_atom(atom) {
            return Err(Error::Input(format!("invalid atom identifier {atom:?} in state")));
        }
        state.insert(atom.clone());
    }
    b.set_state(state);
    for (key, members) in &file.bases {
        let idx: u8 = key
            .parse()
            .map_err(|_| Error::Input(format!("agent key {key:?} is not a decimal integer")))?;
        if idx == 0 || idx > n_agents {
            return Err(Error::Input(format!(
                "agent key {key:?} out of range 1..={n_agents}"
            )));
        }
        let agent = AgentId::new(idx).expect("nonzero");
        for text in members {
            let f = parse_explicit(text, n_agents)
                .map_err(|e| Error::Input(format!("in base formula {text:?}: {e}")))?;
            b.insert_member(agent, f);
        }
    }
    Ok(b)
}

impl PointedModel {
    /// Serializes to the model file format (pretty JSON, canonical ordering).
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            agents: self.base.n_agents(),
            base: base_to_file(&self.base),
            context: self.context.iter().map(base_to_file).collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    /// Parses the model file format. Unknown keys, invalid atoms, out-of-range
    /// agent keys, and malformed formulas are all rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("model file: {e}")))?;
        if file.agents == 0 {
            return Err(Error::Input("model file: agent count must be at least 1".into()));
        }
        let base = base_from_file(&file.base, file.agents)?;
        let context = file
            .context
            .iter()
            .map(|bf| base_from_file(bf, file.agents))
            .collect::<Result<Context>>()?;
        Ok(PointedModel { base, context })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_epistemic, Lang};
    use proptest::prelude::*;

    type EF = ExplicitFormula;

    fn ag(i: u8) -> AgentId {
        AgentId::new(i).unwrap()
    }

    fn pe(s: &str) -> ExplicitFormula {
        parse_explicit(s, 2).unwrap()
    }

    fn pk(s: &str) -> EpistemicFormula {
        parse_epistemic(s, 2, Lang::Eel).unwrap()
    }

    /// B = ({p}, {}, state {q})
    fn sample_base() -> BeliefBase {
        BeliefBase::new(2).with_state(["q"]).with_member(ag(1), pe("p"))
    }

    #[test]
    fn sat_explicit_examples() {
        let b = sample_base();
        assert!(sat_explicit(&b, &pe("X[1] p")));
        // p & p is not literally a member, so X[1] (p & p) fails.
        assert!(!sat_explicit(&b, &pe("X[1] (p & p)")));
        assert!(sat_explicit(&b, &pe("q & ~p")));
        assert!(sat_explicit(&b, &pe("true")));
        assert!(!sat_explicit(&b, &pe("false")));
    }

    #[test]
    fn membership_sensitivity_regression() {
        // Replacing p by p & p in the base changes X[1] p.
        let b1 = BeliefBase::new(1).with_member(ag(1), pe("p"));
        let b2 = BeliefBase::new(1).with_member(ag(1), pe("p & p"));
        let query = pe("X[1] p");
        assert!(sat_explicit(&b1, &query));
        assert!(!sat_explicit(&b2, &query));
    }

    #[test]
    fn is_correct_examples() {
        let correct = BeliefBase::new(2).with_state(["p"]).with_member(ag(1), pe("p"));
        assert!(is_correct(&correct));

        let incorrect = BeliefBase::new(2).with_member(ag(1), pe("p"));
        assert!(!is_correct(&incorrect));

        let nested = BeliefBase::new(2)
            .with_state(["p"])
            .with_member(ag(1), pe("X[1] p"))
            .with_member(ag(1), pe("p"));
        assert!(is_correct(&nested));
    }

    #[test]
    fn is_alternative_examples() {
        let empty = BeliefBase::new(2);
        let any = BeliefBase::new(2).with_state(["r"]);
        assert!(is_alternative(&empty, ag(1), &any));

        let b = BeliefBase::new(2).with_member(ag(1), pe("p"));
        let target = BeliefBase::new(2).with_state(["p"]);
        assert!(is_alternative(&b, ag(1), &target));
        assert!(!is_alternative(&b, ag(1), &empty));

        // Membership constraints ignore the target's state.
        let b = BeliefBase::new(2).with_member(ag(1), pe("X[2] q"));
        let target = BeliefBase::new(2).with_member(ag(2), pe("q"));
        assert!(is_alternative(&b, ag(1), &target));
    }

    #[test]
    fn alternatives_examples() {
        let ctx = Context::from_members([
            BeliefBase::new(2).with_state(["p"]),
            BeliefBase::new(2).with_state(["q"]),
            BeliefBase::new(2),
        ]);
        let empty = BeliefBase::new(2);
        assert_eq!(alternatives(&empty, ag(1), &ctx).len(), 3);

        let contradictory = BeliefBase::new(2).with_member(ag(1), pe("p & ~p"));
        assert!(alternatives(&contradictory, ag(1), &ctx).is_empty());

        let wants_p = BeliefBase::new(2).with_member(ag(1), pe("p"));
        let alts = alternatives(&wants_p, ag(1), &ctx);
        assert_eq!(alts.len(), 1);
        assert!(alts[0].state().contains("p"));
    }

    /// The two-member pointed model of the worked examples:
    /// point has base1 = {p}; context = {B_a with state {p}, B_b with state {}}.
    fn worked_model() -> PointedModel {
        let point = BeliefBase::new(2).with_member(ag(1), pe("p"));
        let ctx = Context::from_members([
            BeliefBase::new(2).with_state(["p"]),
            BeliefBase::new(2),
        ]);
        PointedModel::new(point, ctx)
    }

    #[test]
    fn sat_epistemic_examples() {
        // Empty context: box is vacuously true, even of falsum.
        let lonely = PointedModel::new(BeliefBase::new(1), Context::new());
        assert!(sat_epistemic(&lonely, &parse_epistemic("B[1] false", 1, Lang::El).unwrap()));

        let m = worked_model();
        assert!(sat_epistemic(&m, &pk("B[1] p & C[1] ~p")));
        assert!(sat_epistemic(&m, &pk("O[1] p")));
        assert!(!sat_epistemic(&m, &pk("O[1] q")));
        assert!(sat_epistemic(&m, &pk("D[1] p")));
        assert!(!sat_epistemic(&m, &pk("B[1] q")));
    }

    #[test]
    fn point_inside_context_is_not_duplicated() {
        // A self-referential model: the point is a context member; C[1] at the
        // point must quantify over the other member only.
        let point = BeliefBase::new(1).with_state(["p"]).with_member(ag(1), pe("p"));
        let other = BeliefBase::new(1);
        let m = PointedModel::new(
            point.clone(),
            Context::from_members([point, other]),
        );
        let phi = parse_epistemic("C[1] ~p", 1, Lang::Eel).unwrap();
        assert!(sat_epistemic(&m, &phi));
    }

    #[test]
    fn satisfies_bc_examples() {
        let empty = BeliefBase::new(2);
        let m = PointedModel::new(empty.clone(), Context::from_members([empty]));
        assert!(satisfies_bc(&m).unwrap());

        let good = BeliefBase::new(2).with_state(["p"]).with_member(ag(1), pe("p"));
        let m = PointedModel::new(good.clone(), Context::from_members([good]));
        assert!(satisfies_bc(&m).unwrap());

        let bad = BeliefBase::new(2).with_member(ag(1), pe("p"));
        let m = PointedModel::new(bad.clone(), Context::from_members([bad]));
        assert!(!satisfies_bc(&m).unwrap());

        // The point must be a member.
        let outside = PointedModel::new(BeliefBase::new(2), Context::new());
        assert!(!satisfies_bc(&outside).unwrap());
    }

    #[test]
    fn model_file_round_trip() {
        let m = worked_model();
        let json = m.to_json();
        let back = PointedModel::from_json(&json).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn model_file_example_schema() {
        let text = r#"{
            "agents": 2,
            "base": { "state": ["p", "q"], "bases": { "1": ["X[2] p", "q"], "2": [] } },
            "context": [ { "state": [], "bases": { "1": ["p"] } } ]
        }"#;
        let m = PointedModel::from_json(text).unwrap();
        assert_eq!(m.base.n_agents(), 2);
        assert!(m.base.state().contains("p"));
        assert!(m.base.base(ag(1)).contains(&pe("X[2] p")));
        assert!(m.base.base(ag(2)).is_empty());
        assert_eq!(m.context.len(), 1);
    }

    #[test]
    fn model_file_rejections() {
        // Unknown key.
        assert!(PointedModel::from_json(
            r#"{"agents":1,"base":{"state":[],"bases":{}},"context":[],"extra":0}"#
        )
        .is_err());
        // Unknown key inside a base.
        assert!(PointedModel::from_json(
            r#"{"agents":1,"base":{"state":[],"bases":{},"x":1},"context":[]}"#
        )
        .is_err());
        // Agent key out of range.
        assert!(PointedModel::from_json(
            r#"{"agents":1,"base":{"state":[],"bases":{"2":[]}},"context":[]}"#
        )
        .is_err());
        // Invalid atom.
        assert!(PointedModel::from_json(
            r#"{"agents":1,"base":{"state":["P"],"bases":{}},"context":[]}"#
        )
        .is_err());
        // Malformed member formula.
        assert!(PointedModel::from_json(
            r#"{"agents":1,"base":{"state":[],"bases":{"1":["p &"]}},"context":[]}"#
        )
        .is_err());
        // Forbidden operator in a member formula.
        assert!(PointedModel::from_json(
            r#"{"agents":1,"base":{"state":[],"bases":{"1":["B[1] p"]}},"context":[]}"#
        )
        .is_err());
        // Zero agents.
        assert!(PointedModel::from_json(
            r#"{"agents":0,"base":{"state":[],"bases":{}},"context":[]}"#
        )
        .is_err());
    }

    // ---- randomized properties ----

    /// Explicit formulas over atoms {p,q}, 2 agents, nesting depth <= 2.
    fn arb_member() -> impl Strategy<Value = ExplicitFormula> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["p", "q"]).prop_map(EF::atom),
            prop::sample::select(vec!["p", "q"]).prop_map(|s| EF::atom(s).neg()),
        ];
        leaf.prop_recursive(2, 8, 2, |inner| {
            prop_oneof![
                (1u8..=2, inner.clone()).prop_map(|(i, b)| EF::tri(ag(i), b)),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| x.and(y)),
                inner.prop_map(EF::neg),
            ]
        })
    }

    fn arb_base() -> impl Strategy<Value = BeliefBase> {
        (
            prop::collection::btree_set(arb_member(), 0..3),
            prop::collection::btree_set(arb_member(), 0..3),
            prop::collection::btree_set(prop::sample::select(vec!["p", "q", "r"]), 0..3),
        )
            .prop_map(|(b1, b2, state)| {
                let mut b = BeliefBase::new(2)
                    .with_state(state.into_iter().map(str::to_string));
                for f in b1 {
                    b.insert_member(ag(1), f);
                }
                for f in b2 {
                    b.insert_member(ag(2), f);
                }
                b
            })
    }

    fn arb_model() -> impl Strategy<Value = PointedModel> {
        (arb_base(), prop::collection::vec(arb_base(), 0..5), any::<bool>()).prop_map(
            |(base, members, include_point)| {
                let mut ctx = Context::from_members(members);
                if include_point {
                    ctx.insert(base.clone());
                }
                PointedModel::new(base, ctx)
            },
        )
    }

    fn arb_query() -> impl Strategy<Value = EpistemicFormula> {
        type KF = EpistemicFormula;
        let leaf = prop_oneof![
            prop::sample::select(vec!["p", "q"]).prop_map(KF::atom),
            Just(KF::Top),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(KF::neg),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| x.and(y)),
                (1u8..=2, inner.clone()).prop_map(|(i, b)| KF::box_(ag(i), b)),
                (1u8..=2, inner).prop_map(|(i, b)| KF::cbox(ag(i), b)),
            ]
        })
    }

    /// Direct recursive implementation of the satisfaction clauses, used as an
    /// oracle for the bitset evaluator.
    fn sat_epistemic_naive(m: &PointedModel, phi: &EpistemicFormula) -> bool {
        type KF = EpistemicFormula;
        match phi {
            KF::Atom(p) => m.base.state().contains(p),
            KF::Top => true,
            KF::Bottom => false,
            KF::Neg(x) => !sat_epistemic_naive(m, x),
            KF::Conj(x, y) => sat_epistemic_naive(m, x) && sat_epistemic_naive(m, y),
            KF::Box(i, body) => m
                .context
                .iter()
                .filter(|b2| is_alternative(&m.base, *i, b2))
                .all(|b2| {
                    sat_epistemic_naive(&PointedModel::new(b2.clone(), m.context.clone()), body)
                }),
            KF::CBox(i, body) => m
                .context
                .iter()
                .filter(|b2| !is_alternative(&m.base, *i, b2))
                .all(|b2| {
                    sat_epistemic_naive(&PointedModel::new(b2.clone(), m.context.clone()), body)
                }),
        }
    }

    proptest! {
        #[test]
        fn bitset_engine_matches_naive_oracle(m in arb_model(), phi in arb_query()) {
            prop_assert_eq!(sat_epistemic(&m, &phi), sat_epistemic_naive(&m, &phi));
        }

        #[test]
        fn constraint_monotonicity(m in arb_model(), extra in arb_member()) {
            // Adding a constraint can only shrink the alternative set.
            let stronger = m.base.clone().with_member(ag(1), extra);
            let before: Vec<_> = alternatives(&m.base, ag(1), &m.context);
            let after: Vec<_> = alternatives(&stronger, ag(1), &m.context);
            for b in &after {
                prop_assert!(before.contains(b));
            }
        }

        #[test]
        fn empty_base_sees_everything(members in prop::collection::vec(arb_base(), 0..5)) {
            let ctx = Context::from_members(members);
            let empty = BeliefBase::new(2);
            prop_assert_eq!(alternatives(&empty, ag(1), &ctx).len(), ctx.len());
        }

        #[test]
        fn dual_law(m in arb_model(), body in arb_query()) {
            let diamond = EpistemicFormula::diamond(ag(1), body.clone());
            let box_neg = EpistemicFormula::box_(ag(1), body.neg());
            prop_assert_eq!(sat_epistemic(&m, &diamond), !sat_epistemic(&m, &box_neg));
        }

        #[test]
        fn universal_modality_is_agent_independent(m in arb_model(), body in arb_query()) {
            let u_with = |i: u8| {
                EpistemicFormula::box_(ag(i), body.clone())
                    .and(EpistemicFormula::cbox(ag(i), body.clone()))
            };
            prop_assert_eq!(sat_epistemic(&m, &u_with(1)), sat_epistemic(&m, &u_with(2)));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn bc_characterizations_agree(m in arb_model()) {
            // satisfies_bc internally cross-checks the two characterizations
            // and errors on disagreement.
            prop_assert!(satisfies_bc(&m).is_ok());
        }
    }
}
