//! Model checking for epistemic logics grounded in belief bases.
//!
//! An agent's state of mind is a finite *belief base* of explicit formulas
//! rather than an abstract accessibility relation. Implicit belief (`B[i]`)
//! quantifies over the *epistemic alternatives* of an agent inside a finite
//! context of candidate belief configurations; the extended language adds the
//! complement operator (`C[i]`) quantifying over non-alternatives, which makes
//! only-believing and context-universal statements expressible.
//!
//! The crate provides:
//!
//! * [`formula`]: ASTs, an ASCII concrete syntax, and structural metrics;
//! * [`beliefbase`]: multi-agent belief bases, contexts, and the direct
//!   model-checking semantics over them;
//! * [`contextgen`]: deterministic generation of contexts from finite
//!   formula/atom pools, with resource caps;
//! * [`kripke`]: translations to and from pointed Kripke models, filtration,
//!   unraveling, tree labeling, and bounded bisimulation;
//! * [`structures`]: hierarchies of nested valuation/marking levels (belief
//!   structures), coherence/correctness checks, satisfaction, and a validity
//!   decision procedure over them;
//! * [`qbfreduce`]: a polynomial reduction from closed quantified Boolean
//!   formulas to the model-checking problem, with an independent QBF oracle.

pub mod beliefbase;
mod bits;
pub mod contextgen;
pub mod error;
pub mod formula;
pub mod kripke;
pub mod qbfreduce;
pub mod structures;

pub use error::{Error, Result};
