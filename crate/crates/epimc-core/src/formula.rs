//! Abstract syntax, concrete ASCII syntax, and structural metrics for the
//! formula languages used across the crate:
//!
//! * the explicit language: atoms, `~`, `&`, and the explicit-belief operator
//!   `X[i]` ("agent i has the formula in its belief base"); these formulas are
//!   the contents of belief bases;
//! * the basic epistemic language: atoms, `~`, `&`, `B[i]` (implicit belief),
//!   with `D[i]` (consistent-with-beliefs) as a derived operator;
//! * the extended epistemic language: additionally `C[i]` (complement belief,
//!   "true in all non-alternatives") plus the derived operators `O[i]`
//!   (only-believing), `U` (universally true over the context) and `E`
//!   (somewhere true in the context).
//!
//! Derived connectives (`|`, `->`, `<->`, `D`, `O`, `U`, `E`) are expanded at
//! parse time; ASTs contain only the primitive constructors plus the constants
//! `true`/`false`. Structural equality is purely syntactic: no normalization
//! is ever applied, because base membership is sensitive to the exact shape of
//! a formula (`p` and `p & p` are different base members).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A 1-based agent index.
///
/// Values are validated on construction (`0` is rejected); parsers additionally
/// validate the index against the ambient agent count.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AgentId(u8);

impl AgentId {
    /// Creates an agent id, rejecting the invalid index 0.
    pub fn new(index: u8) -> Result<Self> {
        if index == 0 {
            Err(Error::Input("agent index must be at least 1".into()))
        } else {
            Ok(AgentId(index))
        }
    }

    /// Agent 1, which always exists (the crate requires at least one agent).
    pub fn one() -> Self {
        AgentId(1)
    }

    /// The 1-based index.
    pub fn get(self) -> u8 {
        self.0
    }

    /// The 0-based index, for vector addressing.
    pub fn index0(self) -> usize {
        self.0 as usize - 1
    }

    /// All agents `1..=n`, in order.
    pub fn all(n_agents: u8) -> Vec<AgentId> {
        (1..=n_agents).map(AgentId).collect()
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite set of atom identifiers.
pub type AtomSet = BTreeSet<String>;

/// Returns true iff `s` is a well-formed atom identifier:
/// `[a-z][A-Za-z0-9_]*`, excluding the reserved words `true` and `false`.
pub fn is_valid_atom(s: &str) -> bool {
    let b = s.as_bytes();
    !b.is_empty()
        && b[0].is_ascii_lowercase()
        && b.iter().all(|c| c.is_ascii_alphanumeric() || *c == b'_')
        && s != "true"
        && s != "false"
}

/// A formula of the explicit language (belief-base contents).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExplicitFormula {
    Atom(String),
    Top,
    Bottom,
    Neg(Box<ExplicitFormula>),
    Conj(Box<ExplicitFormula>, Box<ExplicitFormula>),
    /// `X[i] body`: the body is literally a member of agent i's belief base.
    Tri(AgentId, Box<ExplicitFormula>),
}

/// A formula of the epistemic languages.
///
/// A formula with no `CBox` node belongs to the basic fragment; `CBox` is the
/// extension operator quantifying over non-alternatives.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum EpistemicFormula {
    Atom(String),
    Top,
    Bottom,
    Neg(Box<EpistemicFormula>),
    Conj(Box<EpistemicFormula>, Box<EpistemicFormula>),
    /// `B[i] body`: body holds in every epistemic alternative of agent i.
    Box(AgentId, Box<EpistemicFormula>),
    /// `C[i] body`: body holds in every context member that is *not* an
    /// epistemic alternative of agent i.
    CBox(AgentId, Box<EpistemicFormula>),
}

/// Epistemic language fragments accepted by [`parse_epistemic`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Lang {
    /// Basic fragment: `B[i]` and the derived `D[i]` only.
    El,
    /// Extended fragment: additionally `C[i]`, `O[i]`, `U`, `E`.
    Eel,
}

impl ExplicitFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        ExplicitFormula::Atom(name.into())
    }

    pub fn neg(self) -> Self {
        ExplicitFormula::Neg(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        ExplicitFormula::Conj(Box::new(self), Box::new(other))
    }

    pub fn tri(agent: AgentId, body: Self) -> Self {
        ExplicitFormula::Tri(agent, Box::new(body))
    }

    /// `a | b`, expanded to `~(~a & ~b)`.
    pub fn or(self, other: Self) -> Self {
        self.neg().and(other.neg()).neg()
    }

    /// Left-associated conjunction of all items; empty yields `true`.
    pub fn conj_all(items: impl IntoIterator<Item = Self>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => ExplicitFormula::Top,
            Some(first) => it.fold(first, |acc, x| acc.and(x)),
        }
    }

    /// Left-associated disjunction of all items; empty yields `false`.
    pub fn disj_all(items: impl IntoIterator<Item = Self>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => ExplicitFormula::Bottom,
            Some(first) => it.fold(first, |acc, x| acc.or(x)),
        }
    }

    /// Maximum nesting depth of `X[i]` operators.
    pub fn tri_depth(&self) -> usize {
        match self {
            ExplicitFormula::Atom(_) | ExplicitFormula::Top | ExplicitFormula::Bottom => 0,
            ExplicitFormula::Neg(b) => b.tri_depth(),
            ExplicitFormula::Conj(a, b) => a.tri_depth().max(b.tri_depth()),
            ExplicitFormula::Tri(_, b) => 1 + b.tri_depth(),
        }
    }

    /// The largest agent index mentioned by an `X[i]` operator, or 0 if none.
    pub fn max_agent(&self) -> u8 {
        match self {
            ExplicitFormula::Atom(_) | ExplicitFormula::Top | ExplicitFormula::Bottom => 0,
            ExplicitFormula::Neg(b) => b.max_agent(),
            ExplicitFormula::Conj(a, b) => a.max_agent().max(b.max_agent()),
            ExplicitFormula::Tri(i, b) => i.get().max(b.max_agent()),
        }
    }

    /// The set of atoms occurring anywhere in the formula.
    pub fn atoms(&self) -> AtomSet {
        let mut out = AtomSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut AtomSet) {
        match self {
            ExplicitFormula::Atom(s) => {
                out.insert(s.clone());
            }
            ExplicitFormula::Top | ExplicitFormula::Bottom => {}
            ExplicitFormula::Neg(b) | ExplicitFormula::Tri(_, b) => b.collect_atoms(out),
            ExplicitFormula::Conj(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Renders to the concrete syntax; `parse_explicit` round-trips the result.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl EpistemicFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        EpistemicFormula::Atom(name.into())
    }

    pub fn neg(self) -> Self {
        EpistemicFormula::Neg(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        EpistemicFormula::Conj(Box::new(self), Box::new(other))
    }

    /// `a | b`, expanded to `~(~a & ~b)`.
    pub fn or(self, other: Self) -> Self {
        self.neg().and(other.neg()).neg()
    }

    pub fn box_(agent: AgentId, body: Self) -> Self {
        EpistemicFormula::Box(agent, Box::new(body))
    }

    pub fn cbox(agent: AgentId, body: Self) -> Self {
        EpistemicFormula::CBox(agent, Box::new(body))
    }

    /// `D[i] body` expansion: `~B[i] ~body`.
    pub fn diamond(agent: AgentId, body: Self) -> Self {
        Self::box_(agent, body.neg()).neg()
    }

    /// Left-associated conjunction of all items; empty yields `true`.
    pub fn conj_all(items: impl IntoIterator<Item = Self>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => EpistemicFormula::Top,
            Some(first) => it.fold(first, |acc, x| acc.and(x)),
        }
    }

    /// Maximum nesting depth of modal operators (`B`/`C`).
    pub fn depth(&self) -> usize {
        match self {
            EpistemicFormula::Atom(_) | EpistemicFormula::Top | EpistemicFormula::Bottom => 0,
            EpistemicFormula::Neg(b) => b.depth(),
            EpistemicFormula::Conj(a, b) => a.depth().max(b.depth()),
            EpistemicFormula::Box(_, b) | EpistemicFormula::CBox(_, b) => 1 + b.depth(),
        }
    }

    /// True iff the formula lies in the basic fragment (contains no `CBox`).
    pub fn is_el(&self) -> bool {
        match self {
            EpistemicFormula::Atom(_) | EpistemicFormula::Top | EpistemicFormula::Bottom => true,
            EpistemicFormula::Neg(b) => b.is_el(),
            EpistemicFormula::Conj(a, b) => a.is_el() && b.is_el(),
            EpistemicFormula::Box(_, b) => b.is_el(),
            EpistemicFormula::CBox(_, _) => false,
        }
    }

    /// The largest agent index mentioned by a modality, or 0 if there is none.
    pub fn max_agent(&self) -> u8 {
        match self {
            EpistemicFormula::Atom(_) | EpistemicFormula::Top | EpistemicFormula::Bottom => 0,
            EpistemicFormula::Neg(b) => b.max_agent(),
            EpistemicFormula::Conj(a, b) => a.max_agent().max(b.max_agent()),
            EpistemicFormula::Box(i, b) | EpistemicFormula::CBox(i, b) => {
                i.get().max(b.max_agent())
            }
        }
    }

    /// The set of atoms occurring anywhere in the formula.
    pub fn atoms(&self) -> AtomSet {
        let mut out = AtomSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut AtomSet) {
        match self {
            EpistemicFormula::Atom(s) => {
                out.insert(s.clone());
            }
            EpistemicFormula::Top | EpistemicFormula::Bottom => {}
            EpistemicFormula::Neg(b)
            | EpistemicFormula::Box(_, b)
            | EpistemicFormula::CBox(_, b) => b.collect_atoms(out),
            EpistemicFormula::Conj(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Renders to the concrete syntax; `parse_epistemic` round-trips the result.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// All subformulas including the formula itself (a subformula-closed set).
    pub fn subformulas(&self) -> BTreeSet<EpistemicFormula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<EpistemicFormula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            EpistemicFormula::Atom(_) | EpistemicFormula::Top | EpistemicFormula::Bottom => {}
            EpistemicFormula::Neg(b)
            | EpistemicFormula::Box(_, b)
            | EpistemicFormula::CBox(_, b) => b.collect_subformulas(out),
            EpistemicFormula::Conj(a, b) => {
                a.collect_subformulas(out);
                b.collect_subformulas(out);
            }
        }
    }
}

/// One level of group belief: the conjunction over `agents` of `X[i] alpha`.
pub fn everyone_believes(alpha: &ExplicitFormula, agents: &[AgentId]) -> ExplicitFormula {
    assert!(!agents.is_empty(), "everyone_believes requires at least one agent");
    ExplicitFormula::conj_all(
        agents.iter().map(|&i| ExplicitFormula::tri(i, alpha.clone())),
    )
}

/// Mutual belief up to level `k`: the conjunction over `0 <= h <= k` of the
/// h-fold iteration of [`everyone_believes`] applied to `alpha` (level 0 is
/// `alpha` itself).
pub fn mutual_belief(k: usize, alpha: &ExplicitFormula, agents: &[AgentId]) -> ExplicitFormula {
    assert!(!agents.is_empty(), "mutual_belief requires at least one agent");
    let mut level = alpha.clone(); // EB^0
    let mut acc = level.clone();
    for _ in 0..k {
        level = everyone_believes(&level, agents);
        acc = acc.and(level.clone());
    }
    acc
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

// Arguments of `~` and of modal operators, and right operands of `&`, render
// bare unless they are conjunctions (the grammar's `&` chain is parsed
// left-associatively, so a left conjunction operand renders bare).

impl fmt::Display for ExplicitFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn arg(f: &mut fmt::Formatter<'_>, x: &ExplicitFormula) -> fmt::Result {
            if matches!(x, ExplicitFormula::Conj(..)) {
                write!(f, "({x})")
            } else {
                write!(f, "{x}")
            }
        }
        match self {
            ExplicitFormula::Atom(s) => f.write_str(s),
            ExplicitFormula::Top => f.write_str("true"),
            ExplicitFormula::Bottom => f.write_str("false"),
            ExplicitFormula::Neg(b) => {
                f.write_str("~")?;
                arg(f, b)
            }
            ExplicitFormula::Conj(a, b) => {
                write!(f, "{a} & ")?;
                arg(f, b)
            }
            ExplicitFormula::Tri(i, b) => {
                write!(f, "X[{i}] ")?;
                arg(f, b)
            }
        }
    }
}

impl fmt::Display for EpistemicFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn arg(f: &mut fmt::Formatter<'_>, x: &EpistemicFormula) -> fmt::Result {
            if matches!(x, EpistemicFormula::Conj(..)) {
                write!(f, "({x})")
            } else {
                write!(f, "{x}")
            }
        }
        match self {
            EpistemicFormula::Atom(s) => f.write_str(s),
            EpistemicFormula::Top => f.write_str("true"),
            EpistemicFormula::Bottom => f.write_str("false"),
            EpistemicFormula::Neg(b) => {
                f.write_str("~")?;
                arg(f, b)
            }
            EpistemicFormula::Conj(a, b) => {
                write!(f, "{a} & ")?;
                arg(f, b)
            }
            EpistemicFormula::Box(i, b) => {
                write!(f, "B[{i}] ")?;
                arg(f, b)
            }
            EpistemicFormula::CBox(i, b) => {
                write!(f, "C[{i}] ")?;
                arg(f, b)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parses a formula of the explicit language (`X[i]` is the only modal
/// operator). Agent indices are validated against `n_agents`.
pub fn parse_explicit(text: &str, n_agents: u8) -> Result<ExplicitFormula> {
    parse_with::<ExplicitFormula>(text, n_agents, Mode::Explicit)
}

/// Parses a formula of an epistemic language fragment. `D[i]`, `O[i]`, `U`
/// and `E` are expanded into primitives at parse time (`U`/`E` expand with
/// agent 1; the choice of agent is semantically irrelevant, which is verified
/// by test, not assumed here).
pub fn parse_epistemic(text: &str, n_agents: u8, lang: Lang) -> Result<EpistemicFormula> {
    parse_with::<EpistemicFormula>(text, n_agents, Mode::Epistemic(lang))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Explicit,
    Epistemic(Lang),
}

/// AST construction interface shared by the two formula types, so a single
/// recursive-descent parser serves both languages.
trait Ast: Clone {
    fn atom(name: String) -> Self;
    fn top() -> Self;
    fn bottom() -> Self;
    fn neg(a: Self) -> Self;
    fn conj(a: Self, b: Self) -> Self;
    /// Builds (or expands) the modal operator `op` (one of `XBCDOUE`).
    /// The parser has already validated `op` against the language mode.
    fn modal(op: u8, agent: AgentId, body: Self) -> Self;

    fn disj(a: Self, b: Self) -> Self {
        Self::neg(Self::conj(Self::neg(a), Self::neg(b)))
    }
    fn imp(a: Self, b: Self) -> Self {
        Self::neg(Self::conj(a, Self::neg(b)))
    }
    fn iff(a: Self, b: Self) -> Self {
        Self::conj(Self::imp(a.clone(), b.clone()), Self::imp(b, a))
    }
}

impl Ast for ExplicitFormula {
    fn atom(name: String) -> Self {
        ExplicitFormula::Atom(name)
    }
    fn top() -> Self {
        ExplicitFormula::Top
    }
    fn bottom() -> Self {
        ExplicitFormula::Bottom
    }
    fn neg(a: Self) -> Self {
        a.neg()
    }
    fn conj(a: Self, b: Self) -> Self {
        a.and(b)
    }
    fn modal(op: u8, agent: AgentId, body: Self) -> Self {
        match op {
            b'X' => ExplicitFormula::tri(agent, body),
            _ => unreachable!("operator validated by the parser"),
        }
    }
}

impl Ast for EpistemicFormula {
    fn atom(name: String) -> Self {
        EpistemicFormula::Atom(name)
    }
    fn top() -> Self {
        EpistemicFormula::Top
    }
    fn bottom() -> Self {
        EpistemicFormula::Bottom
    }
    fn neg(a: Self) -> Self {
        a.neg()
    }
    fn conj(a: Self, b: Self) -> Self {
        a.and(b)
    }
    fn modal(op: u8, agent: AgentId, body: Self) -> Self {
        let one = AgentId::one();
        match op {
            b'B' => Self::box_(agent, body),
            b'C' => Self::cbox(agent, body),
            // D[i] a == ~B[i] ~a
            b'D' => Self::diamond(agent, body),
            // O[i] a == B[i] a & C[i] ~a
            b'O' => Self::box_(agent, body.clone()).and(Self::cbox(agent, body.neg())),
            // U a == B[1] a & C[1] a
            b'U' => Self::box_(one, body.clone()).and(Self::cbox(one, body)),
            // E a == ~U ~a
            b'E' => Self::box_(one, body.clone().neg())
                .and(Self::cbox(one, body.neg()))
                .neg(),
            _ => unreachable!("operator validated by the parser"),
        }
    }
}

fn parse_with<A: Ast>(text: &str, n_agents: u8, mode: Mode) -> Result<A> {
    if n_agents == 0 {
        return Err(Error::Input("agent count must be at least 1".into()));
    }
    let mut p = Parser { s: text.as_bytes(), pos: 0, n: n_agents, mode };
    let f = p.form()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return p.fail(p.pos, "unexpected trailing input");
    }
    Ok(f)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: u8,
    mode: Mode,
}

impl<'a> Parser<'a> {
    fn fail<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    /// After skipping whitespace, consumes `tok` if present.
    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(self.pos, format!("expected '{}'", c as char))
        }
    }

    fn form<A: Ast>(&mut self) -> Result<A> {
        self.iff()
    }

    fn iff<A: Ast>(&mut self) -> Result<A> {
        let a = self.imp()?;
        if self.eat("<->") {
            let b = self.iff()?;
            Ok(A::iff(a, b))
        } else {
            Ok(a)
        }
    }

    fn imp<A: Ast>(&mut self) -> Result<A> {
        let a = self.disj()?;
        if self.eat("->") {
            let b = self.imp()?;
            Ok(A::imp(a, b))
        } else {
            Ok(a)
        }
    }

    fn disj<A: Ast>(&mut self) -> Result<A> {
        let mut a = self.conj()?;
        while self.eat("|") {
            let b = self.conj()?;
            a = A::disj(a, b);
        }
        Ok(a)
    }

    fn conj<A: Ast>(&mut self) -> Result<A> {
        let mut a = self.prim()?;
        while self.eat("&") {
            let b = self.prim()?;
            a = A::conj(a, b);
        }
        Ok(a)
    }

    fn prim<A: Ast>(&mut self) -> Result<A> {
        self.skip_ws();
        let Some(c) = self.peek() else {
            return self.fail(self.pos, "unexpected end of input");
        };
        match c {
            b'~' => {
                self.pos += 1;
                Ok(A::neg(self.prim()?))
            }
            b'(' => {
                self.pos += 1;
                let f = self.form()?;
                self.expect(b')')?;
                Ok(f)
            }
            b'a'..=b'z' => {
                let name = self.ident();
                match name.as_str() {
                    "true" => Ok(A::top()),
                    "false" => Ok(A::bottom()),
                    _ => Ok(A::atom(name)),
                }
            }
            b'X' | b'B' | b'C' | b'D' | b'O' => {
                let op_pos = self.pos;
                self.pos += 1;
                self.check_op(c, op_pos)?;
                let agent = self.agent_brackets()?;
                let body = self.prim()?;
                Ok(A::modal(c, agent, body))
            }
            b'U' | b'E' => {
                let op_pos = self.pos;
                self.pos += 1;
                self.check_op(c, op_pos)?;
                let body = self.prim()?;
                Ok(A::modal(c, AgentId::one(), body))
            }
            _ => {
                let msg = if c.is_ascii_graphic() {
                    format!("unexpected character '{}'", c as char)
                } else {
                    format!("unexpected byte 0x{c:02x}")
                };
                self.fail(self.pos, msg)
            }
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn check_op(&self, op: u8, pos: usize) -> Result<()> {
        let ok = match self.mode {
            Mode::Explicit => op == b'X',
            Mode::Epistemic(Lang::El) => matches!(op, b'B' | b'D'),
            Mode::Epistemic(Lang::Eel) => op != b'X',
        };
        if ok {
            Ok(())
        } else {
            let where_ = match self.mode {
                Mode::Explicit => "the explicit language (only X[i] is modal)",
                Mode::Epistemic(Lang::El) => "the basic epistemic language (only B[i]/D[i])",
                Mode::Epistemic(Lang::Eel) => "the extended epistemic language (X[i] is not)",
            };
            self.fail(pos, format!("operator '{}' is not allowed in {}", op as char, where_))
        }
    }

    fn agent_brackets(&mut self) -> Result<AgentId> {
        self.expect(b'[')?;
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.fail(start, "expected an agent index");
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        let value: u32 = digits
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "agent index too large".into() })?;
        if value == 0 {
            return self.fail(start, "agent index must be at least 1");
        }
        if value > u32::from(self.n) {
            return self.fail(
                start,
                format!("agent index {value} out of range 1..={}", self.n),
            );
        }
        self.expect(b']')?;
        Ok(AgentId(value as u8))
    }
}
