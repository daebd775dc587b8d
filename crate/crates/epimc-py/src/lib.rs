//! Python bindings for the belief-base model checker.
//!
//! The module mirrors the `epimc` CLI surface as Python classes: [`Model`]
//! (pointed belief-base model), [`Kripke`] (pointed Kripke model), [`World`]
//! (depth-bounded belief structure) and [`Qbf`], plus free functions for
//! parsing and validity. Models cross the boundary as the same JSON documents
//! the CLI reads and writes; formulas cross as ASCII concrete syntax.
//!
//! Errors map onto Python exceptions: malformed syntax or input becomes
//! `ValueError`; resource caps, timeouts and internal inconsistencies become
//! `RuntimeError`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use epimc_core::beliefbase::{self, BeliefBase, Context, PointedModel};
use epimc_core::contextgen::{self, AlphaContextSpec, DEFAULT_CONTEXT_CAP};
use epimc_core::formula::{self, AtomSet, EpistemicFormula, Lang};
use epimc_core::kripke::{self, PointedKripke};
use epimc_core::qbfreduce::{self, ReductionEngine, UniversalStandIn, QBF};
use epimc_core::structures::{self, KWorld, DEFAULT_SAT_CAP, DEFAULT_WORLD_CAP};
use epimc_core::Error;

fn to_py(e: Error) -> PyErr {
    match &e {
        Error::Parse { .. } | Error::Input(_) => PyValueError::new_err(e.to_string()),
        Error::Cap { .. } | Error::Timeout(_) | Error::InternalInconsistency(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
    }
}

fn parse_phi(text: &str, n_agents: u8) -> PyResult<EpistemicFormula> {
    formula::parse_epistemic(text, n_agents, Lang::Eel).map_err(to_py)
}

fn atom_set(items: Vec<String>) -> AtomSet {
    items.into_iter().collect()
}

/// A pointed belief-base model: the point base plus a finite context.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Model {
    inner: PointedModel,
}

#[pymethods]
impl Model {
    /// Load a model from its JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Model { inner: PointedModel::from_json(text).map_err(to_py)? })
    }

    /// The model as a JSON document (pretty-printed).
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn agents(&self) -> u8 {
        self.inner.base.n_agents()
    }

    #[getter]
    fn context_size(&self) -> usize {
        self.inner.context.len()
    }

    /// Atoms mentioned by the point base (state plus member formulas).
    fn atoms(&self) -> Vec<String> {
        self.inner.base.mentioned_atoms().into_iter().collect()
    }

    /// Evaluate `phi` at the model exactly as given (its own context).
    fn sat(&self, phi: &str) -> PyResult<bool> {
        let phi = parse_phi(phi, self.inner.base.n_agents())?;
        Ok(beliefbase::sat_epistemic(&self.inner, &phi))
    }

    /// Check `phi` under a generated alpha-context.
    ///
    /// The context ranges over every base drawn from the default formula pool
    /// (literals and belief prefixes up to `tri_depth` over the atoms of the
    /// point base, `phi` and `alpha`) whose members all satisfy `alpha`;
    /// `bc=True` additionally requires context members to be correct.
    #[pyo3(signature = (phi, alpha = "true", tri_depth = 1, bc = false, context_cap = None))]
    fn check(
        &self,
        phi: &str,
        alpha: &str,
        tri_depth: usize,
        bc: bool,
        context_cap: Option<u64>,
    ) -> PyResult<bool> {
        let n = self.inner.base.n_agents();
        let phi = parse_phi(phi, n)?;
        let alpha = formula::parse_explicit(alpha, n).map_err(to_py)?;
        let mut atoms = self.inner.base.mentioned_atoms();
        atoms.extend(phi.atoms());
        atoms.extend(alpha.atoms());
        let pool = contextgen::default_pool(&atoms, tri_depth, n).map_err(to_py)?;
        let spec = AlphaContextSpec::new(pool, alpha, bc).map_err(to_py)?;
        let cap = context_cap.unwrap_or(DEFAULT_CONTEXT_CAP);
        contextgen::check_capped(&self.inner.base, &spec, &phi, cap).map_err(to_py)
    }

    /// Check `phi` against the model's own context, filtered to the members
    /// that satisfy `alpha` (and that are correct, when `bc=True`).
    #[pyo3(signature = (phi, alpha = "true", bc = false))]
    fn check_explicit(&self, phi: &str, alpha: &str, bc: bool) -> PyResult<bool> {
        let n = self.inner.base.n_agents();
        let phi = parse_phi(phi, n)?;
        let alpha = formula::parse_explicit(alpha, n).map_err(to_py)?;
        let members: Vec<BeliefBase> = self
            .inner
            .context
            .iter()
            .filter(|b| beliefbase::sat_explicit(b, &alpha) && (!bc || beliefbase::is_correct(b)))
            .cloned()
            .collect();
        let m = PointedModel::new(self.inner.base.clone(), Context::from_members(members));
        Ok(beliefbase::sat_epistemic(&m, &phi))
    }

    /// Whether the point lies in the context and every member is correct.
    fn satisfies_bc(&self) -> PyResult<bool> {
        beliefbase::satisfies_bc(&self.inner).map_err(to_py)
    }

    /// Translate to a pointed Kripke model over the context.
    fn to_kripke(&self) -> Kripke {
        Kripke { inner: kripke::mbm_to_kripke(&self.inner) }
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(agents={}, context_size={})",
            self.inner.base.n_agents(),
            self.inner.context.len()
        )
    }
}

/// A pointed Kripke model (worlds, per-agent edges, valuation, point).
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Kripke {
    inner: PointedKripke,
}

#[pymethods]
impl Kripke {
    /// Load a pointed Kripke model from its JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Kripke { inner: PointedKripke::from_json(text).map_err(to_py)? })
    }

    /// The model as a JSON document (pretty-printed).
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn agents(&self) -> u8 {
        self.inner.model().n_agents()
    }

    #[getter]
    fn point(&self) -> String {
        self.inner.world().to_owned()
    }

    fn worlds(&self) -> Vec<String> {
        self.inner.model().worlds().to_vec()
    }

    /// Evaluate `phi` at the point under standard Kripke semantics.
    fn sat(&self, phi: &str) -> PyResult<bool> {
        let phi = parse_phi(phi, self.inner.model().n_agents())?;
        Ok(kripke::sat_kripke(&self.inner, &phi))
    }

    /// Translate back to a belief-base model.
    ///
    /// Satisfaction transfers for formulas over `guard_atoms` only (world
    /// states keep just those atoms, next to fresh world-name atoms). The
    /// default keeps every valuation atom.
    #[pyo3(signature = (guard_atoms = None))]
    fn to_model(&self, guard_atoms: Option<Vec<String>>) -> Model {
        let guards: AtomSet = match guard_atoms {
            Some(v) => atom_set(v),
            None => self.inner.model().valuation_atoms().cloned().collect(),
        };
        Model { inner: kripke::kripke_to_mbm(&self.inner, &guards) }
    }

    /// The depth-`depth` belief structure of the point (hierarchy semantics).
    #[pyo3(signature = (depth, atoms = None))]
    fn tau(&self, depth: usize, atoms: Option<Vec<String>>) -> PyResult<World> {
        let atoms: AtomSet = match atoms {
            Some(v) => atom_set(v),
            None => self.inner.model().valuation_atoms().cloned().collect(),
        };
        Ok(World { inner: structures::tau(&self.inner, depth, &atoms).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "Kripke(agents={}, worlds={}, point={:?})",
            self.inner.model().n_agents(),
            self.inner.model().n_worlds(),
            self.inner.world()
        )
    }
}

/// A depth-bounded belief structure: a valuation plus nested marking levels.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct World {
    inner: KWorld,
}

#[pymethods]
impl World {
    /// Load a belief structure from its JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(World { inner: KWorld::from_json(text).map_err(to_py)? })
    }

    /// The structure as a JSON document (pretty-printed).
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn agents(&self) -> u8 {
        self.inner.n_agents()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn atoms(&self) -> Vec<String> {
        self.inner.atoms().into_iter().collect()
    }

    /// Evaluate `phi` at the structure. The modal depth of `phi` must not
    /// exceed the structure depth.
    fn sat(&self, phi: &str) -> PyResult<bool> {
        let phi = parse_phi(phi, self.inner.n_agents())?;
        structures::sat_structure(&self.inner, &phi).map_err(to_py)
    }

    /// Both coherence conditions (mark projection and extension) hold.
    fn coherent(&self) -> bool {
        structures::coherence(&self.inner).coherent
    }

    /// The structure's own prefixes are marked at every level.
    fn correct(&self) -> bool {
        structures::coherence(&self.inner).correct
    }

    /// Drop marking levels above `depth`.
    fn restrict(&self, depth: usize) -> PyResult<World> {
        Ok(World { inner: structures::restrict(&self.inner, depth).map_err(to_py)? })
    }

    /// Raise to `depth` by the canonical coherent extension.
    fn extend(&self, depth: usize) -> PyResult<World> {
        Ok(World { inner: structures::extend(&self.inner, depth).map_err(to_py)? })
    }

    /// The canonical belief base describing this structure, as a model with
    /// an empty context. `guard_atoms` defaults to the structure's atoms.
    #[pyo3(signature = (guard_atoms = None))]
    fn canonical_model(&self, guard_atoms: Option<Vec<String>>) -> Model {
        let guards: AtomSet = match guard_atoms {
            Some(v) => atom_set(v),
            None => self.inner.atoms(),
        };
        let base = structures::canonical_base(&self.inner, &guards);
        Model { inner: PointedModel::new(base, Context::new()) }
    }

    fn __repr__(&self) -> String {
        format!("World(agents={}, depth={})", self.inner.n_agents(), self.inner.depth())
    }
}

/// A prenex quantified Boolean formula.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Qbf {
    inner: QBF,
}

#[pymethods]
impl Qbf {
    /// Parse e.g. `"A p. E q. (p <-> q)"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Qbf { inner: qbfreduce::parse_qbf(text).map_err(to_py)? })
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    #[getter]
    fn closed(&self) -> bool {
        self.inner.is_closed()
    }

    #[getter]
    fn quantifiers(&self) -> usize {
        self.inner.prefix().len()
    }

    /// Evaluate under the valuation `s` (free atoms not in `s` are false).
    #[pyo3(signature = (s = None))]
    fn eval(&self, s: Option<Vec<String>>) -> bool {
        qbfreduce::eval_qbf(&atom_set(s.unwrap_or_default()), &self.inner)
    }

    /// The epistemic query formula of the reduction, rendered.
    fn translate(&self) -> String {
        qbfreduce::translate(&self.inner).render()
    }

    /// The model-checking instance for valuation `s`: a single-agent model
    /// (instance base, empty context) and the rendered query.
    #[pyo3(signature = (s = None))]
    fn instance(&self, s: Option<Vec<String>>) -> (Model, String) {
        let inst = qbfreduce::build_instance(&self.inner, &atom_set(s.unwrap_or_default()));
        let model = Model { inner: PointedModel::new(inst.base, Context::new()) };
        (model, inst.query.render())
    }

    /// Run the oracle and the reduction side by side; returns
    /// `(oracle, reduced)`. Engines: `"pool"`, `"structures"`; stand-ins for
    /// the universal context: `"grid"` (faithful), `"closure"`.
    #[pyo3(signature = (s = None, engine = "pool", standin = "grid", context_cap = None))]
    fn reduction_check(
        &self,
        s: Option<Vec<String>>,
        engine: &str,
        standin: &str,
        context_cap: Option<u64>,
    ) -> PyResult<(bool, bool)> {
        let engine = match engine {
            "pool" => ReductionEngine::Pool,
            "structures" => ReductionEngine::Structures,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown engine {other:?} (expected \"pool\" or \"structures\")"
                )))
            }
        };
        let standin = match standin {
            "grid" => UniversalStandIn::Grid,
            "closure" => UniversalStandIn::PowersetClosure,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown stand-in {other:?} (expected \"grid\" or \"closure\")"
                )))
            }
        };
        let cap = context_cap.unwrap_or(DEFAULT_CONTEXT_CAP);
        qbfreduce::reduction_check_with(&self.inner, &atom_set(s.unwrap_or_default()), engine, standin, cap)
            .map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!("Qbf({:?})", self.inner.render())
    }
}

/// Parse an explicit (base-language) formula; returns the normalized render.
#[pyfunction]
#[pyo3(signature = (text, agents = 1))]
fn parse_explicit(text: &str, agents: u8) -> PyResult<String> {
    Ok(formula::parse_explicit(text, agents).map_err(to_py)?.render())
}

/// Parse an epistemic formula; returns the normalized render (derived
/// operators are expanded). `extended=False` restricts to the `B`/`D`
/// fragment.
#[pyfunction]
#[pyo3(signature = (text, agents = 1, extended = true))]
fn parse_epistemic(text: &str, agents: u8, extended: bool) -> PyResult<String> {
    let lang = if extended { Lang::Eel } else { Lang::El };
    Ok(formula::parse_epistemic(text, agents, lang).map_err(to_py)?.render())
}

/// Whether `phi` holds at every coherent belief structure of matching depth
/// (every coherent-and-correct structure when `bc=True`).
#[pyfunction]
#[pyo3(signature = (phi, bc = false))]
fn is_valid(phi: &str, bc: bool) -> PyResult<bool> {
    let phi = parse_phi(phi, u8::MAX)?;
    structures::valid_universal(&phi, bc).map_err(to_py)
}

/// A belief structure falsifying `phi`, or `None` if `phi` is valid.
#[pyfunction]
#[pyo3(signature = (phi, bc = false, world_cap = None, sat_cap = None))]
fn find_countermodel(
    phi: &str,
    bc: bool,
    world_cap: Option<u64>,
    sat_cap: Option<u64>,
) -> PyResult<Option<World>> {
    let phi = parse_phi(phi, u8::MAX)?;
    let found = structures::find_structure_countermodel(
        &phi,
        bc,
        world_cap.unwrap_or(DEFAULT_WORLD_CAP),
        sat_cap.unwrap_or(DEFAULT_SAT_CAP),
    )
    .map_err(to_py)?;
    Ok(found.map(|w| World { inner: w }))
}

#[pymodule]
fn epimc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Model>()?;
    m.add_class::<Kripke>()?;
    m.add_class::<World>()?;
    m.add_class::<Qbf>()?;
    m.add_function(wrap_pyfunction!(parse_explicit, m)?)?;
    m.add_function(wrap_pyfunction!(parse_epistemic, m)?)?;
    m.add_function(wrap_pyfunction!(is_valid, m)?)?;
    m.add_function(wrap_pyfunction!(find_countermodel, m)?)?;
    Ok(())
}
