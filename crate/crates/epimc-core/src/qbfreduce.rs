//! Reduction from quantified boolean formulas to single-agent belief-model
//! checking.
//!
//! A [`QBF`] is a prenex-form quantifier prefix over a propositional
//! matrix. [`eval_qbf`] is the brute-force truth oracle. [`translate`]
//! maps a QBF to a single-agent belief formula: each universal quantifier
//! becomes a box over alternatives guarded by uncertainty about the next
//! variable, each existential the dual. [`build_instance`] produces the
//! matching belief base, whose members pin the already-decided variables as
//! literals and force, level by level, an opinion on every variable except
//! the one currently being quantified.
//!
//! [`reduction_check`] runs both sides and reports (oracle, reduced). The
//! unbounded context of "all belief bases" is replaced by a finite
//! stand-in: the default *instance grid* holds the canonical instance base
//! for every suffix of the prefix and every valuation of the matrix atoms,
//! which keeps believed literals consistent with states; the alternative
//! *powerset closure* holds every base assembled from the instance
//! description pieces, including self-deluded ones whose believed literals
//! contradict their own state. The grid tracks the oracle; the closure is
//! kept as an explicit mode because it documents how delusion breaks the
//! correspondence once three or more quantifiers alternate.

use std::collections::BTreeSet;

use crate::beliefbase::{sat_epistemic, BeliefBase, Context, PointedModel};
use crate::contextgen::DEFAULT_CONTEXT_CAP;
use crate::error::{Error, Result};
use crate::formula::{
    is_valid_atom, parse_explicit, AgentId, AtomSet, EpistemicFormula, ExplicitFormula,
};
use crate::kripke::mbm_to_kripke;
use crate::structures::{sat_structure, tau};

/// Longest quantifier prefix the structures engine accepts by default.
pub const DEFAULT_PREFIX_CAP: usize = 3;

// ---------------------------------------------------------------------------
// QBF
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Quantifier {
    ForAll,
    Exists,
}

impl Quantifier {
    fn token(self) -> &'static str {
        match self {
            Quantifier::ForAll => "A",
            Quantifier::Exists => "E",
        }
    }
}

/// A prenex quantified boolean formula: a quantifier prefix over a
/// propositional matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QBF {
    prefix: Vec<(Quantifier, String)>,
    matrix: ExplicitFormula,
}

impl QBF {
    /// The prefix atoms must be distinct, occur in the matrix, and the
    /// matrix must be purely propositional.
    pub fn new(prefix: Vec<(Quantifier, String)>, matrix: ExplicitFormula) -> Result<QBF> {
        if matrix.tri_depth() > 0 {
            return Err(Error::Input(
                "a QBF matrix must be propositional (no X[i] operators)".into(),
            ));
        }
        let matrix_atoms = matrix.atoms();
        let mut seen = AtomSet::new();
        for (_, p) in &prefix {
            if !is_valid_atom(p) {
                return Err(Error::Input(format!("invalid quantified atom {p:?}")));
            }
            if !seen.insert(p.clone()) {
                return Err(Error::Input(format!("atom {p:?} is quantified twice")));
            }
            if !matrix_atoms.contains(p) {
                return Err(Error::Input(format!(
                    "quantified atom {p:?} does not occur in the matrix"
                )));
            }
        }
        Ok(QBF { prefix, matrix })
    }

    pub fn prefix(&self) -> &[(Quantifier, String)] {
        &self.prefix
    }

    pub fn matrix(&self) -> &ExplicitFormula {
        &self.matrix
    }

    /// Closed: every matrix atom is quantified.
    pub fn is_closed(&self) -> bool {
        let quantified: AtomSet = self.prefix.iter().map(|(_, p)| p.clone()).collect();
        quantified == self.matrix.atoms()
    }

    /// `"A p. E q. <matrix>"`; parses back via [`parse_qbf`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (q, p) in &self.prefix {
            out.push_str(q.token());
            out.push(' ');
            out.push_str(p);
            out.push_str(". ");
        }
        out.push_str(&self.matrix.render());
        out
    }

    /// The instance obtained by dropping the first `k` quantifiers.
    fn suffix(&self, k: usize) -> QBF {
        QBF { prefix: self.prefix[k..].to_vec(), matrix: self.matrix.clone() }
    }
}

/// Parse `"A p. E q. (p <-> q)"`: `A`/`E` quantifier tokens, then a matrix
/// in the propositional grammar.
pub fn parse_qbf(text: &str) -> Result<QBF> {
    let mut prefix = Vec::new();
    let mut rest = text.trim_start();
    loop {
        let q = match rest.chars().next() {
            Some('A') => Quantifier::ForAll,
            Some('E') => Quantifier::Exists,
            _ => break,
        };
        let pos = |r: &str| text.len() - r.len();
        rest = rest[1..].trim_start();
        let len = rest
            .char_indices()
            .take_while(|&(i, c)| {
                if i == 0 {
                    c.is_ascii_lowercase()
                } else {
                    c.is_ascii_alphanumeric() || c == '_'
                }
            })
            .count();
        if len == 0 {
            return Err(Error::Parse {
                pos: pos(rest),
                msg: "expected a quantified atom".into(),
            });
        }
        let atom = rest[..len].to_string();
        rest = rest[len..].trim_start();
        match rest.strip_prefix('.') {
            Some(r) => rest = r.trim_start(),
            None => {
                return Err(Error::Parse {
                    pos: pos(rest),
                    msg: "expected '.' after the quantified atom".into(),
                })
            }
        }
        prefix.push((q, atom));
    }
    let offset = text.len() - rest.len();
    let matrix = parse_explicit(rest, 1).map_err(|e| match e {
        Error::Parse { pos, msg } => Error::Parse { pos: pos + offset, msg },
        other => other,
    })?;
    QBF::new(prefix, matrix)
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

/// Brute-force QBF truth at a valuation: a universal quantifier must hold
/// with its atom set both true and false, an existential with either.
pub fn eval_qbf(s: &AtomSet, chi: &QBF) -> bool {
    let mut val = s.clone();
    eval_rec(&chi.prefix, &chi.matrix, &mut val)
}

fn eval_rec(prefix: &[(Quantifier, String)], matrix: &ExplicitFormula, val: &mut AtomSet) -> bool {
    match prefix.split_first() {
        None => eval_prop(matrix, val),
        Some(((q, p), rest)) => {
            let had = val.contains(p);
            val.insert(p.clone());
            let with_true = eval_rec(rest, matrix, val);
            // Short-circuit before exploring the false branch.
            match (q, with_true) {
                (Quantifier::ForAll, false) | (Quantifier::Exists, true) => {
                    if !had {
                        val.remove(p);
                    }
                    return with_true;
                }
                _ => {}
            }
            val.remove(p);
            let with_false = eval_rec(rest, matrix, val);
            if had {
                val.insert(p.clone());
            }
            with_false
        }
    }
}

fn eval_prop(f: &ExplicitFormula, val: &AtomSet) -> bool {
    match f {
        ExplicitFormula::Atom(p) => val.contains(p),
        ExplicitFormula::Top => true,
        ExplicitFormula::Bottom => false,
        ExplicitFormula::Neg(b) => !eval_prop(b, val),
        ExplicitFormula::Conj(a, b) => eval_prop(a, val) && eval_prop(b, val),
        ExplicitFormula::Tri(..) => unreachable!("QBF matrices carry no X[i] operators"),
    }
}

// ---------------------------------------------------------------------------
// Translation
// ---------------------------------------------------------------------------

/// The single-agent box-fragment image of a QBF. Atoms and Boolean
/// connectives map homomorphically; a universal step becomes
/// `B[1] (uncertainty-about-next-variable -> body)` and an existential
/// step its dual.
pub fn translate(chi: &QBF) -> EpistemicFormula {
    tr(&chi.prefix, &chi.matrix)
}

fn tr(prefix: &[(Quantifier, String)], matrix: &ExplicitFormula) -> EpistemicFormula {
    match prefix.split_first() {
        None => prop_to_epistemic(matrix),
        Some(((q, _), rest)) => {
            let body = tr(rest, matrix);
            match q {
                Quantifier::ForAll => boxed_step(rest, body),
                Quantifier::Exists => boxed_step(rest, body.neg()).neg(),
            }
        }
    }
}

/// `B[1] (o -> body)` where `o` expresses uncertainty about the next
/// quantified variable, or `true` when none remains.
fn boxed_step(rest: &[(Quantifier, String)], body: EpistemicFormula) -> EpistemicFormula {
    let one = AgentId::one();
    let guard = match rest.first() {
        None => EpistemicFormula::Top,
        Some((_, p)) => {
            let atom = EpistemicFormula::atom(p.clone());
            EpistemicFormula::diamond(one, atom.clone())
                .and(EpistemicFormula::diamond(one, atom.neg()))
        }
    };
    EpistemicFormula::box_(one, guard.and(body.neg()).neg())
}

fn prop_to_epistemic(f: &ExplicitFormula) -> EpistemicFormula {
    match f {
        ExplicitFormula::Atom(p) => EpistemicFormula::atom(p.clone()),
        ExplicitFormula::Top => EpistemicFormula::Top,
        ExplicitFormula::Bottom => EpistemicFormula::Bottom,
        ExplicitFormula::Neg(b) => prop_to_epistemic(b).neg(),
        ExplicitFormula::Conj(a, b) => prop_to_epistemic(a).and(prop_to_epistemic(b)),
        ExplicitFormula::Tri(..) => unreachable!("QBF matrices carry no X[i] operators"),
    }
}

// ---------------------------------------------------------------------------
// Instance construction
// ---------------------------------------------------------------------------

/// The base description for a non-empty prefix: literals fixing every
/// matrix atom except the first quantified one according to the valuation,
/// plus one belief-prefixed opinion guard per later quantifier position
/// (level `k` demands an opinion on every atom except the `k`-th
/// quantified one).
pub fn build_sigma(chi: &QBF, s: &AtomSet) -> Result<BTreeSet<ExplicitFormula>> {
    let Some(((_, first), _)) = chi.prefix.split_first() else {
        return Err(Error::Input(
            "an empty-prefix QBF takes the empty base, not a description".into(),
        ));
    };
    let prop: AtomSet = chi.matrix.atoms();
    let one = AgentId::one();
    let mut sigma = BTreeSet::new();
    for q in prop.iter().filter(|q| *q != first) {
        let atom = ExplicitFormula::atom(q.clone());
        sigma.insert(if s.contains(q) { atom } else { atom.neg() });
    }
    for k in 1..chi.prefix.len() {
        let skipped = &chi.prefix[k].1;
        let mut opinion = ExplicitFormula::conj_all(prop.iter().filter(|q| *q != skipped).map(
            |q| {
                let atom = ExplicitFormula::atom(q.clone());
                ExplicitFormula::tri(one, atom.clone()).or(ExplicitFormula::tri(one, atom.neg()))
            },
        ));
        for _ in 1..k {
            opinion = ExplicitFormula::tri(one, opinion);
        }
        sigma.insert(opinion);
    }
    Ok(sigma)
}

/// One model-checking instance: the base for `(chi, s)`, the translated
/// query, and the valuation itself.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionInstance {
    pub base: BeliefBase,
    pub query: EpistemicFormula,
    pub valuation: AtomSet,
}

/// Assemble the instance: the base carries the description for a
/// non-empty prefix (the empty base otherwise) with state `s`.
pub fn build_instance(chi: &QBF, s: &AtomSet) -> ReductionInstance {
    let mut base = BeliefBase::new(1);
    base.set_state(s.clone());
    if !chi.prefix.is_empty() {
        for member in build_sigma(chi, s).expect("prefix checked non-empty") {
            base.insert_member(AgentId::one(), member);
        }
    }
    ReductionInstance { base, query: translate(chi), valuation: s.clone() }
}

/// Size metrics of an instance, for growth regressions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InstanceSize {
    pub quantifiers: usize,
    pub base_members: usize,
    pub base_rendered_len: usize,
    pub query_rendered_len: usize,
}

pub fn instance_size(chi: &QBF, s: &AtomSet) -> InstanceSize {
    let inst = build_instance(chi, s);
    let members = inst.base.base(AgentId::one());
    InstanceSize {
        quantifiers: chi.prefix.len(),
        base_members: members.len(),
        base_rendered_len: members.iter().map(|f| f.render().len()).sum(),
        query_rendered_len: inst.query.render().len(),
    }
}

/// The scaling family for size regressions: an alternating prefix (starting
/// universal) over `p0..=p<m>` and an implication-chain matrix.
pub fn alternating_chain(m: usize) -> QBF {
    let prefix: Vec<(Quantifier, String)> = (0..=m)
        .map(|i| {
            let q = if i % 2 == 0 { Quantifier::ForAll } else { Quantifier::Exists };
            (q, format!("p{i}"))
        })
        .collect();
    let atom = |i: usize| ExplicitFormula::atom(format!("p{i}"));
    let matrix = if m == 0 {
        atom(0)
    } else {
        ExplicitFormula::conj_all((0..m).map(|i| atom(i).and(atom(i + 1).neg()).neg()))
    };
    QBF::new(prefix, matrix).expect("the chain family is well-formed by construction")
}

// ---------------------------------------------------------------------------
// Finite stand-ins for the unbounded context
// ---------------------------------------------------------------------------

/// How the unbounded "all belief bases" context is approximated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UniversalStandIn {
    /// Canonical instance bases for every prefix suffix and every matrix
    /// valuation. Believed literals always match the member's own state.
    Grid,
    /// Every base assembled from the instance description pieces (literals
    /// and opinion guards) over every state, including self-contradictory
    /// combinations.
    PowersetClosure,
}

/// The grid stand-in for `chi`.
pub fn grid_context(chi: &QBF) -> Result<Context> {
    grid_context_capped(chi, DEFAULT_CONTEXT_CAP)
}

/// As [`grid_context`] with an explicit member cap.
pub fn grid_context_capped(chi: &QBF, cap: u64) -> Result<Context> {
    let prop: Vec<String> = chi.matrix.atoms().into_iter().collect();
    if prop.len() >= 32 {
        return Err(Error::cap("grid context atoms", prop.len() as u64, 31));
    }
    let members = (chi.prefix.len() as u64 + 1) << prop.len();
    if members > cap {
        return Err(Error::cap("grid context members", members, cap));
    }
    let mut ctx = Context::new();
    for k in 0..=chi.prefix.len() {
        let suffix = chi.suffix(k);
        for mask in 0u64..1 << prop.len() {
            let s: AtomSet = prop
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect();
            ctx.insert(build_instance(&suffix, &s).base);
        }
    }
    Ok(ctx)
}

/// The powerset-closure stand-in for `chi`: all subsets of the union of
/// every suffix instance's description pieces, over all states.
pub fn powerset_closure_context(chi: &QBF, cap: u64) -> Result<Context> {
    let prop: Vec<String> = chi.matrix.atoms().into_iter().collect();
    let full: AtomSet = prop.iter().cloned().collect();
    let mut pieces = BTreeSet::new();
    for k in 0..chi.prefix.len() {
        let suffix = chi.suffix(k);
        pieces.extend(build_sigma(&suffix, &AtomSet::new())?);
        pieces.extend(build_sigma(&suffix, &full)?);
    }
    let pieces: Vec<ExplicitFormula> = pieces.into_iter().collect();
    let bits = pieces.len() + prop.len();
    if bits >= 32 {
        return Err(Error::cap("powerset closure bits", bits as u64, 31));
    }
    let members = 1u64 << bits;
    if members > cap {
        return Err(Error::cap("powerset closure members", members, cap));
    }
    let mut ctx = Context::new();
    for state_mask in 0u64..1 << prop.len() {
        let state: AtomSet = prop
            .iter()
            .enumerate()
            .filter(|(i, _)| state_mask >> i & 1 == 1)
            .map(|(_, a)| a.clone())
            .collect();
        for base_mask in 0u64..1 << pieces.len() {
            let mut b = BeliefBase::new(1);
            b.set_state(state.clone());
            for (j, piece) in pieces.iter().enumerate() {
                if base_mask >> j & 1 == 1 {
                    b.insert_member(AgentId::one(), piece.clone());
                }
            }
            ctx.insert(b);
        }
    }
    Ok(ctx)
}

// ---------------------------------------------------------------------------
// End-to-end harness
// ---------------------------------------------------------------------------

/// Which machinery evaluates the reduced query.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReductionEngine {
    /// Direct belief-model satisfaction over the stand-in context.
    Pool,
    /// Hierarchy semantics: the pointed model is translated to its Kripke
    /// form, mapped to a depth-bounded belief structure, and the query is
    /// checked there.
    Structures,
}

/// Run the oracle and the reduced check over the grid stand-in.
pub fn reduction_check(chi: &QBF, s: &AtomSet, engine: ReductionEngine) -> Result<(bool, bool)> {
    reduction_check_with(chi, s, engine, UniversalStandIn::Grid, DEFAULT_CONTEXT_CAP)
}

/// As [`reduction_check`] with an explicit stand-in and member cap.
pub fn reduction_check_with(
    chi: &QBF,
    s: &AtomSet,
    engine: ReductionEngine,
    standin: UniversalStandIn,
    cap: u64,
) -> Result<(bool, bool)> {
    let oracle = eval_qbf(s, chi);
    let ctx = match standin {
        UniversalStandIn::Grid => grid_context_capped(chi, cap)?,
        UniversalStandIn::PowersetClosure => powerset_closure_context(chi, cap)?,
    };
    let inst = build_instance(chi, s);
    let model = PointedModel::new(inst.base, ctx);
    let reduced = match engine {
        ReductionEngine::Pool => sat_epistemic(&model, &inst.query),
        ReductionEngine::Structures => {
            if chi.prefix.len() > DEFAULT_PREFIX_CAP {
                return Err(Error::cap(
                    "quantifier prefix for the structures engine",
                    chi.prefix.len() as u64,
                    DEFAULT_PREFIX_CAP as u64,
                ));
            }
            let pk = mbm_to_kripke(&model);
            let w = tau(&pk, inst.query.depth(), &inst.query.atoms())?;
            sat_structure(&w, &inst.query)?
        }
    };
    Ok((oracle, reduced))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
