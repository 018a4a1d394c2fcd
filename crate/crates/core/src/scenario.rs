//! JSON scenario files: parsing, building the described structures and
//! running tasks against them.
//!
//! A scenario has an arithmetic mode, up to three blocks (`quantum`,
//! `classical`, `abstract`) and a list of tasks. Every task is a thin
//! wrapper over a library call. Reports are canonical: object keys are
//! sorted and every list follows a fixed order, so a scenario run twice
//! produces byte-identical JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::classical::{
    build_function_category, check_quantisation_functor, ClassicalMeasure, ClassicalQuantity, FunctionCategory,
    Macrostate, StateSpace,
};
use crate::error::{malformed, Error};
use crate::fincat::{CategoryBuilder, FiniteCategory, ObjId};
use crate::genval::{
    check_coarse_graining, nat_trans_of_valuation, ComparisonFunctor, GeneralisedValuation, PropositionPresheaf,
};
use crate::linalg::{parse_rational, Complex64, GaussianRational, Matrix, Rational, Scalar};
use crate::omega::Omega;
use crate::presheaf::{Presheaf, Section};
use crate::quantity::PartialValuation;
use crate::quantum::{
    ks_operators, spectral_decompose, BuildOptions, DensityMatrix, KsOutcome, OperatorCategory, SpectralOperator,
    StateVector, DEFAULT_EPSILON,
};
use crate::report::{Report, Violation};

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA: &str = "toposval-report/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Numeric,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Numeric => "numeric",
        })
    }
}

/// A number written as a JSON number or as a string such as `"-1/2"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Text(String),
    Number(serde_json::Number),
}

impl Num {
    pub fn rational(&self) -> Result<Rational, Error> {
        let text = match self {
            Num::Text(s) => s.clone(),
            Num::Number(n) => n.to_string(),
        };
        parse_rational(&text)
            .or_else(|| text.parse::<f64>().ok().and_then(Rational::from_float))
            .ok_or_else(|| malformed(format!("`{text}` is not a number")))
    }
}

/// A matrix or vector entry: a real number or a `[re, im]` pair.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(Num),
    Complex([Num; 2]),
}

impl Entry {
    fn scalar<S: Backend>(&self) -> Result<S, Error> {
        match self {
            Entry::Real(x) => Ok(S::from_rational(&x.rational()?)),
            Entry::Complex([re, im]) => Ok(S::complex(&re.rational()?, &im.rational()?)),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub quantum: Option<QuantumBlock>,
    #[serde(default)]
    pub classical: Option<ClassicalBlock>,
    #[serde(default, rename = "abstract")]
    pub abstract_block: Option<AbstractBlock>,
    pub tasks: Vec<Task>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    pub dom: String,
    pub cod: String,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub name: String,
    #[serde(default)]
    pub eigenvalues: Option<Vec<Num>>,
    #[serde(default)]
    pub projectors: Option<Vec<Vec<Vec<Entry>>>>,
    #[serde(default)]
    pub diagonal: Option<Vec<Num>>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<Entry>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KsSpec {
    pub dim: usize,
    pub bases: Vec<Vec<Vec<Entry>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    /// A unit vector.
    #[serde(default)]
    pub vector: Option<Vec<Entry>>,
    /// Any nonzero representative of the ray.
    #[serde(default)]
    pub ray: Option<Vec<Entry>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumBlock {
    #[serde(default)]
    pub operators: Vec<OperatorSpec>,
    #[serde(default)]
    pub ks: Option<KsSpec>,
    /// Morphism labels, and with `only_listed_relations` the relations kept.
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
    #[serde(default)]
    pub only_listed_relations: bool,
    #[serde(default)]
    pub states: BTreeMap<String, StateSpec>,
    #[serde(default)]
    pub densities: BTreeMap<String, Vec<Vec<Entry>>>,
    #[serde(default)]
    pub partial_valuations: BTreeMap<String, BTreeMap<String, Num>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalBlock {
    pub states: Vec<String>,
    pub quantities: BTreeMap<String, Vec<Num>>,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
    #[serde(default)]
    pub macrostates: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub measures: BTreeMap<String, Vec<Num>>,
    #[serde(default)]
    pub partial_valuations: BTreeMap<String, BTreeMap<String, Num>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySpec {
    pub objects: Vec<String>,
    #[serde(default)]
    pub morphisms: Vec<MorphismSpec>,
    /// `[g, f, gf]` with `gf = f∘g`.
    #[serde(default)]
    pub composition: Vec<[String; 3]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresheafSpec {
    pub sets: BTreeMap<String, Vec<String>>,
    /// Morphism `f: B → A` to a table from `X(A)` to `X(B)`; identities may
    /// be omitted.
    #[serde(default)]
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropositionSpec {
    pub presheaf: String,
    /// Generating pairs `[lower, upper]`; the order is their reflexive and
    /// transitive closure.
    pub order: BTreeMap<String, Vec<[String; 2]>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationSpec {
    pub over: String,
    /// Object to proposition to morphism labels; missing entries are empty.
    pub values: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractBlock {
    pub category: CategorySpec,
    #[serde(default)]
    pub presheaves: BTreeMap<String, PresheafSpec>,
    #[serde(default)]
    pub propositions: BTreeMap<String, PropositionSpec>,
    #[serde(default)]
    pub valuations: BTreeMap<String, ValuationSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Quantum,
    Classical,
    Abstract,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValuationRef {
    NuPsi { state: String },
    NuRho { density: String },
    NuPartial {
        source: Source,
        #[serde(default)]
        valuation: Option<String>,
        #[serde(default)]
        macrostate: Option<String>,
    },
    NuMacrostate { macrostate: String },
    NuMicrostate { state: String },
    NuMeasure { measure: String },
    Table { name: String },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropositionRef {
    #[serde(default)]
    pub operator: Option<String>,
    #[serde(default)]
    pub quantity: Option<String>,
    #[serde(default)]
    pub delta: Vec<Num>,
    #[serde(default)]
    pub object: Option<String>,
    #[serde(default)]
    pub element: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionKind {
    Global,
    MaximalPartial,
    KsSearch,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskKind {
    BuildCategory {
        source: Source,
    },
    Validate {
        source: Source,
        #[serde(default)]
        presheaf: Option<String>,
    },
    Omega {
        source: Source,
        #[serde(default)]
        object: Option<String>,
    },
    Valuate {
        valuation: ValuationRef,
        #[serde(default)]
        propositions: Vec<PropositionRef>,
    },
    Verify {
        valuation: ValuationRef,
    },
    Sections {
        kind: SectionKind,
        source: Source,
        #[serde(default)]
        presheaf: Option<String>,
    },
    QuantiseCheck {
        mapping: BTreeMap<String, String>,
    },
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::BuildCategory { .. } => "build-category",
            TaskKind::Validate { .. } => "validate",
            TaskKind::Omega { .. } => "omega",
            TaskKind::Valuate { .. } => "valuate",
            TaskKind::Verify { .. } => "verify",
            TaskKind::Sections { .. } => "sections",
            TaskKind::QuantiseCheck { .. } => "quantise-check",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct Task {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub kind: TaskKind,
}

/// Scenario problems that prevent running: syntax, schema, unresolved
/// references, structures that fail to build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioError {
    pub location: Option<String>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(loc) => write!(f, "{loc}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl ScenarioError {
    fn at(location: impl Into<String>, e: impl fmt::Display) -> Self {
        ScenarioError { location: Some(location.into()), message: e.to_string() }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError {
            location: Some(format!("line {} column {}", e.line(), e.column())),
            message: e.to_string(),
        })?;
        if scenario.version != SCHEMA_VERSION {
            return Err(ScenarioError::at(
                "version",
                format!("unsupported scenario version {} (expected {SCHEMA_VERSION})", scenario.version),
            ));
        }
        Ok(scenario)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::at(path.display().to_string(), e))?;
        Scenario::from_json(&text)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub mode: Option<Mode>,
    pub epsilon: Option<f64>,
    pub strip_units: bool,
    /// Run only tasks whose kind or name matches.
    pub task_filter: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskOutcome {
    pub index: usize,
    pub task: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub passed: bool,
    pub result: Value,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub mode: Mode,
    pub epsilon: f64,
    pub passed: bool,
    pub tasks: Vec<TaskOutcome>,
}

impl RunReport {
    /// Pretty-printed canonical JSON.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    /// One line per task plus a total, with timings.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let status = if t.passed { "ok  " } else { "FAIL" };
            let name = t.name.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
            out.push_str(&format!(
                "{status} #{} {}{name}: {} ({:.1} ms)\n",
                t.index,
                t.task,
                brief(t),
                t.elapsed.as_secs_f64() * 1e3
            ));
        }
        let passed = self.tasks.iter().filter(|t| t.passed).count();
        out.push_str(&format!("{passed}/{} tasks passed ({} mode)\n", self.tasks.len(), self.mode));
        out
    }
}

fn brief(t: &TaskOutcome) -> String {
    if let Some(e) = &t.error {
        return e.clone();
    }
    if !t.violations.is_empty() {
        return format!("{} violation(s), first: {}", t.violations.len(), t.violations[0]);
    }
    let r = &t.result;
    if let Some(outcome) = r.get("outcome").and_then(Value::as_str) {
        return match outcome {
            "exhausted" => format!("no global section; exhausted after {} nodes", r["nodes"]),
            _ => "global section found".to_owned(),
        };
    }
    if let Some(list) = r.get("sections").and_then(Value::as_array) {
        return format!("{} section(s)", list.len());
    }
    if let Some(list) = r.get("values").and_then(Value::as_array) {
        let shown: Vec<String> = list
            .iter()
            .take(4)
            .map(|v| format!("{} -> {}", v["proposition"].as_str().unwrap_or(""), v["sieve"]))
            .collect();
        let more = if list.len() > 4 { format!(" (+{} more)", list.len() - 4) } else { String::new() };
        return format!("{}{more}", shown.join("; "));
    }
    if let Some(m) = r.get("morphisms").and_then(Value::as_array) {
        return format!("{} objects, {} morphisms", r["objects"].as_array().map_or(0, Vec::len), m.len());
    }
    "no violations".to_owned()
}

/// Runs a scenario. Scenario errors (unbuildable blocks, unresolved
/// references) abort the run; task-level failures are recorded per task.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<RunReport, ScenarioError> {
    let mode = options.mode.unwrap_or(scenario.mode);
    let epsilon = options.epsilon.or(scenario.epsilon).unwrap_or(DEFAULT_EPSILON);
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(ScenarioError::at("epsilon", "must be a nonnegative number"));
    }
    let tasks = match mode {
        Mode::Exact => World::<GaussianRational>::build(scenario, 0.0, options.strip_units)?.run_all(scenario, options)?,
        Mode::Numeric => World::<Complex64>::build(scenario, epsilon, options.strip_units)?.run_all(scenario, options)?,
    };
    let passed = tasks.iter().all(|t| t.passed);
    let epsilon = if mode == Mode::Exact { 0.0 } else { epsilon };
    Ok(RunReport { schema: REPORT_SCHEMA, mode, epsilon, passed, tasks })
}

/// Convenience wrapper: parse and run a scenario file.
pub fn run_scenario(path: impl AsRef<Path>, options: &RunOptions) -> Result<RunReport, ScenarioError> {
    run(&Scenario::from_path(path)?, options)
}

/// What the scenario runner needs beyond [`Scalar`]: complex entries,
/// raw-matrix input and ray normalisation.
pub trait Backend: Scalar {
    fn complex(re: &Rational, im: &Rational) -> Self;
    fn operator_from_matrix(name: &str, m: Matrix<Self>, eps: f64) -> Result<SpectralOperator<Self>, Error>;
    fn operator_from_diagonal(name: &str, values: &[Rational], eps: f64) -> Result<SpectralOperator<Self>, Error>;
    fn state_from_ray(v: Vec<Self>, eps: f64) -> Result<StateVector<Self>, Error>;
}

impl Backend for GaussianRational {
    fn complex(re: &Rational, im: &Rational) -> Self {
        GaussianRational::new(re.clone(), im.clone())
    }

    fn operator_from_matrix(name: &str, _: Matrix<Self>, _: f64) -> Result<SpectralOperator<Self>, Error> {
        Err(malformed(format!(
            "`{name}`: exact mode takes operators in spectral form (`eigenvalues` and `projectors`, or `diagonal`)"
        )))
    }

    fn operator_from_diagonal(name: &str, values: &[Rational], eps: f64) -> Result<SpectralOperator<Self>, Error> {
        SpectralOperator::diagonal(name, values, eps)
    }

    fn state_from_ray(v: Vec<Self>, eps: f64) -> Result<StateVector<Self>, Error> {
        StateVector::ray(v, eps)
    }
}

impl Backend for Complex64 {
    fn complex(re: &Rational, im: &Rational) -> Self {
        Complex64::new(Complex64::real_from_rational(re), Complex64::real_from_rational(im))
    }

    fn operator_from_matrix(name: &str, m: Matrix<Self>, eps: f64) -> Result<SpectralOperator<Self>, Error> {
        spectral_decompose(name, &m, eps)
    }

    fn operator_from_diagonal(name: &str, values: &[Rational], eps: f64) -> Result<SpectralOperator<Self>, Error> {
        let d: Vec<Complex64> = values.iter().map(Complex64::from_rational).collect();
        spectral_decompose(name, &Matrix::diagonal(&d), eps)
    }

    fn state_from_ray(v: Vec<Self>, eps: f64) -> Result<StateVector<Self>, Error> {
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm <= eps {
            return Err(malformed("zero vector does not represent a state"));
        }
        StateVector::new(v.into_iter().map(|x| x / norm).collect(), eps.max(1e-12))
    }
}

fn matrix<S: Backend>(rows: &[Vec<Entry>], what: &str) -> Result<Matrix<S>, Error> {
    let rows = rows.iter().map(|r| r.iter().map(Entry::scalar::<S>).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(rows).ok_or_else(|| malformed(format!("{what} is not a square matrix")))
}

fn vector<S: Backend>(v: &[Entry]) -> Result<Vec<S>, Error> {
    v.iter().map(Entry::scalar::<S>).collect()
}

fn rationals(v: &[Num]) -> Result<Vec<Rational>, Error> {
    v.iter().map(Num::rational).collect()
}

fn labels_of(relations: &[RelationSpec]) -> BTreeMap<(String, String), String> {
    relations
        .iter()
        .filter_map(|r| r.label.clone().map(|l| ((r.dom.clone(), r.cod.clone()), l)))
        .collect()
}

struct QuantumWorld<S: Backend> {
    cat: OperatorCategory<S>,
    g: Arc<PropositionPresheaf>,
    c: ComparisonFunctor,
    states: BTreeMap<String, StateVector<S>>,
    densities: BTreeMap<String, DensityMatrix<S>>,
    partials: BTreeMap<String, PartialValuation>,
}

struct ClassicalWorld {
    cat: FunctionCategory,
    g: Arc<PropositionPresheaf>,
    c: ComparisonFunctor,
    macrostates: BTreeMap<String, Macrostate>,
    measures: BTreeMap<String, ClassicalMeasure>,
    partials: BTreeMap<String, PartialValuation>,
}

struct AbstractWorld {
    cat: Arc<FiniteCategory>,
    presheaves: BTreeMap<String, Presheaf>,
    valuations: BTreeMap<String, GeneralisedValuation>,
}

struct World<S: Backend> {
    quantum: Option<QuantumWorld<S>>,
    classical: Option<ClassicalWorld>,
    abstract_world: Option<AbstractWorld>,
}

impl<S: Backend> World<S> {
    fn build(scenario: &Scenario, eps: f64, strip_units: bool) -> Result<Self, ScenarioError> {
        let quantum = scenario
            .quantum
            .as_ref()
            .map(|q| build_quantum::<S>(q, eps, strip_units))
            .transpose()
            .map_err(|e| ScenarioError::at("quantum", e))?;
        let classical = scenario
            .classical
            .as_ref()
            .map(build_classical)
            .transpose()
            .map_err(|e| ScenarioError::at("classical", e))?;
        let abstract_world = scenario
            .abstract_block
            .as_ref()
            .map(build_abstract)
            .transpose()
            .map_err(|e| ScenarioError::at("abstract", e))?;
        Ok(World { quantum, classical, abstract_world })
    }

    fn run_all(&self, scenario: &Scenario, options: &RunOptions) -> Result<Vec<TaskOutcome>, ScenarioError> {
        let mut out = Vec::new();
        for (i, task) in scenario.tasks.iter().enumerate() {
            let kind = task.kind.name();
            if let Some(f) = &options.task_filter {
                if f != kind && task.name.as_deref() != Some(f.as_str()) {
                    continue;
                }
            }
            let start = Instant::now();
            let outcome = self.run_task(&task.kind);
            let elapsed = start.elapsed();
            let (result, report, error) = match outcome {
                Ok((result, report)) => (result, report, None),
                Err(Error::NotFound(what)) => {
                    return Err(ScenarioError::at(format!("tasks[{i}]"), format!("unresolved reference: {what}")))
                }
                Err(e) => (Value::Null, Report::new(), Some(e.to_string())),
            };
            out.push(TaskOutcome {
                index: i,
                task: kind.to_owned(),
                name: task.name.clone(),
                passed: error.is_none() && report.is_empty(),
                result,
                violations: report.violations,
                error,
                elapsed,
            });
        }
        Ok(out)
    }

    fn quantum(&self) -> Result<&QuantumWorld<S>, Error> {
        self.quantum.as_ref().ok_or_else(|| Error::NotFound("quantum block".into()))
    }

    fn classical(&self) -> Result<&ClassicalWorld, Error> {
        self.classical.as_ref().ok_or_else(|| Error::NotFound("classical block".into()))
    }

    fn abstract_world(&self) -> Result<&AbstractWorld, Error> {
        self.abstract_world.as_ref().ok_or_else(|| Error::NotFound("abstract block".into()))
    }

    fn category(&self, source: Source) -> Result<&FiniteCategory, Error> {
        Ok(match source {
            Source::Quantum => self.quantum()?.cat.category(),
            Source::Classical => self.classical()?.cat.category(),
            Source::Abstract => &self.abstract_world()?.cat,
        })
    }

    fn presheaf(&self, source: Source, name: Option<&str>) -> Result<Presheaf, Error> {
        match (source, name) {
            (Source::Quantum, None | Some("spectral")) => Ok(self.quantum()?.cat.spectral_presheaf()),
            (Source::Classical, None | Some("value")) => Ok(self.classical()?.cat.value_presheaf()),
            (Source::Abstract, Some(n)) => {
                self.abstract_world()?.presheaves.get(n).cloned().ok_or_else(|| Error::NotFound(format!("presheaf `{n}`")))
            }
            (_, n) => Err(Error::NotFound(format!("presheaf `{}` for source {source:?}", n.unwrap_or("")))),
        }
    }

    fn run_task(&self, task: &TaskKind) -> Result<(Value, Report), Error> {
        match task {
            TaskKind::BuildCategory { source } => {
                let cat = self.category(*source)?;
                let warnings = match source {
                    Source::Quantum => self.quantum()?.cat.warnings().to_vec(),
                    _ => Vec::new(),
                };
                Ok((category_json(cat, &warnings), cat.validate()))
            }
            TaskKind::Validate { source, presheaf } => {
                let mut report = self.category(*source)?.validate();
                let mut checked = vec!["category"];
                if presheaf.is_some() || *source != Source::Abstract {
                    report.extend(self.presheaf(*source, presheaf.as_deref())?.validate());
                    checked.push("presheaf");
                }
                let gc = match source {
                    Source::Quantum => Some((&self.quantum()?.g, &self.quantum()?.c)),
                    Source::Classical => Some((&self.classical()?.g, &self.classical()?.c)),
                    Source::Abstract => None,
                };
                let mut result = Map::new();
                if let Some((g, c)) = gc {
                    let cg = check_coarse_graining(g, c);
                    report.extend(cg.required.clone());
                    checked.push("coarse-graining");
                    result.insert("retraction_holds".into(), json!(cg.retraction_holds()));
                    result.insert(
                        "injective".into(),
                        Value::Object(cg.injective.iter().map(|(l, b)| (l.clone(), json!(b))).collect()),
                    );
                }
                result.insert("checked".into(), json!(checked));
                Ok((Value::Object(result), report))
            }
            TaskKind::Omega { source, object } => {
                let cat = self.category(*source)?;
                let omega = Omega::new(Arc::new(cat.clone()));
                let objects: Vec<ObjId> = match object {
                    Some(o) => vec![cat.object_by_label(o)?],
                    None => cat.objects().collect(),
                };
                let mut m = Map::new();
                for a in objects {
                    m.insert(cat.object_label(a).to_owned(), json!(omega.at(a).labels()));
                }
                Ok((json!({ "sieves": m }), Report::new()))
            }
            TaskKind::Valuate { valuation, propositions } => {
                let nu = self.valuation(valuation)?;
                let rows = if propositions.is_empty() {
                    nu.table()
                        .into_iter()
                        .map(|(a, d, s)| json!({ "proposition": format!("{a} in {d}"), "sieve": s }))
                        .collect()
                } else {
                    propositions
                        .iter()
                        .map(|p| {
                            let (a, d, label) = self.proposition(valuation, &nu, p)?;
                            Ok(json!({ "proposition": label, "sieve": nu.value(a, d).labels(nu.base()) }))
                        })
                        .collect::<Result<Vec<_>, Error>>()?
                };
                Ok((json!({ "values": rows }), Report::new()))
            }
            TaskKind::Verify { valuation } => self.verify(valuation),
            TaskKind::Sections { kind, source, presheaf } => {
                if *kind == SectionKind::KsSearch {
                    if *source != Source::Quantum {
                        return Err(malformed("ks-search runs on the quantum block"));
                    }
                    let q = &self.quantum()?.cat;
                    let result = match q.ks_section_search() {
                        KsOutcome::Section(s) => json!({ "outcome": "section", "section": s.to_json(&q.spectral_presheaf()) }),
                        KsOutcome::Exhausted(stats) => {
                            json!({ "outcome": "exhausted", "nodes": stats.nodes, "dead_ends": stats.dead_ends })
                        }
                    };
                    return Ok((result, Report::new()));
                }
                let x = self.presheaf(*source, presheaf.as_deref())?;
                let sections: Vec<Section> = match kind {
                    SectionKind::Global => x.global_sections(),
                    _ => x.maximal_partial_elements(),
                };
                let mut report = Report::new();
                for s in &sections {
                    report.extend(x.check_section(s));
                }
                let list: Vec<Value> = sections.iter().map(|s| s.to_json(&x)).collect();
                Ok((json!({ "sections": list }), report))
            }
            TaskKind::QuantiseCheck { mapping } => {
                let report = check_quantisation_functor(&self.classical()?.cat, &self.quantum()?.cat, mapping)?;
                Ok((json!({ "mapping": mapping }), report))
            }
        }
    }

    fn valuation(&self, r: &ValuationRef) -> Result<GeneralisedValuation, Error> {
        let lookup = |what: &str, name: &str| Error::NotFound(format!("{what} `{name}`"));
        match r {
            ValuationRef::NuPsi { state } => {
                let q = self.quantum()?;
                let psi = q.states.get(state).ok_or_else(|| lookup("state", state))?;
                q.cat.nu_psi(&q.g, psi)
            }
            ValuationRef::NuRho { density } => {
                let q = self.quantum()?;
                let rho = q.densities.get(density).ok_or_else(|| lookup("density", density))?;
                q.cat.nu_rho(&q.g, rho)
            }
            ValuationRef::NuPartial { source, valuation, macrostate } => match (source, valuation, macrostate) {
                (Source::Quantum, Some(v), None) => {
                    let q = self.quantum()?;
                    let pv = q.partials.get(v).ok_or_else(|| lookup("partial valuation", v))?;
                    q.cat.nu_from_partial_valuation(&q.g, pv)
                }
                (Source::Classical, Some(v), None) => {
                    let c = self.classical()?;
                    let pv = c.partials.get(v).ok_or_else(|| lookup("partial valuation", v))?;
                    c.cat.nu_from_partial_valuation(&c.g, pv)
                }
                (Source::Classical, None, Some(r)) => {
                    let c = self.classical()?;
                    let region = c.macrostates.get(r).ok_or_else(|| lookup("macrostate", r))?;
                    c.cat.nu_from_partial_valuation(&c.g, &c.cat.partial_valuation_from_macrostate(region))
                }
                _ => Err(malformed("nu_partial takes `valuation`, or `macrostate` with the classical source")),
            },
            ValuationRef::NuMacrostate { macrostate } => {
                let c = self.classical()?;
                let region = c.macrostates.get(macrostate).ok_or_else(|| lookup("macrostate", macrostate))?;
                c.cat.nu_macrostate(&c.g, region)
            }
            ValuationRef::NuMicrostate { state } => {
                let c = self.classical()?;
                c.cat.space().index(state)?;
                c.cat.nu_microstate(&c.g, state)
            }
            ValuationRef::NuMeasure { measure } => {
                let c = self.classical()?;
                let rho = c.measures.get(measure).ok_or_else(|| lookup("measure", measure))?;
                c.cat.nu_measure(&c.g, rho)
            }
            ValuationRef::Table { name } => {
                self.abstract_world()?.valuations.get(name).cloned().ok_or_else(|| lookup("valuation", name))
            }
        }
    }

    fn source_of(r: &ValuationRef) -> Source {
        match r {
            ValuationRef::NuPsi { .. } | ValuationRef::NuRho { .. } => Source::Quantum,
            ValuationRef::NuPartial { source, .. } => *source,
            ValuationRef::Table { .. } => Source::Abstract,
            _ => Source::Classical,
        }
    }

    fn proposition(
        &self,
        r: &ValuationRef,
        nu: &GeneralisedValuation,
        p: &PropositionRef,
    ) -> Result<(ObjId, usize, String), Error> {
        match Self::source_of(r) {
            Source::Abstract => {
                let (Some(o), Some(e)) = (&p.object, &p.element) else {
                    return Err(malformed("abstract propositions are given by `object` and `element`"));
                };
                let a = nu.base().object_by_label(o)?;
                let d = nu.over().presheaf().element_by_label(a, e)?;
                Ok((a, d, format!("{o} in {e}")))
            }
            source => {
                let name = p
                    .operator
                    .as_ref()
                    .or(p.quantity.as_ref())
                    .ok_or_else(|| malformed("propositions need `operator` or `quantity`"))?;
                let delta = rationals(&p.delta)?;
                let (a, mask) = if source == Source::Quantum {
                    let q = &self.quantum()?.cat;
                    let values: Vec<S::Real> = delta.iter().map(S::real_from_rational).collect();
                    q.proposition(name, &values)?
                } else {
                    self.classical()?.cat.proposition(name, &delta)?
                };
                Ok((a, mask as usize, format!("{name} in {}", nu.over().label(a, mask as usize))))
            }
        }
    }

    fn verify(&self, r: &ValuationRef) -> Result<(Value, Report), Error> {
        let nu = self.valuation(r)?;
        let mut report = Report::new();
        let mut checks = Map::new();

        let properties = nu.verify();
        checks.insert("generalised-valuation".into(), json!(properties.is_empty()));
        report.extend(properties);

        let func_holds = nu.check_func().is_empty();
        let natural = nat_trans_of_valuation(&nu);
        let agree = func_holds == natural.is_ok();
        checks.insert(
            "naturality".into(),
            json!({ "func_holds": func_holds, "natural_transformation": natural.is_ok(), "agree": agree }),
        );
        if !agree {
            report.push(
                Violation::new("naturality-equivalence")
                    .expected(format!("natural transformation exists = {func_holds}"))
                    .actual(natural.is_ok().to_string()),
            );
        }

        let gc = match Self::source_of(r) {
            Source::Quantum => Some((&self.quantum()?.g, &self.quantum()?.c)),
            Source::Classical => Some((&self.classical()?.g, &self.classical()?.c)),
            Source::Abstract => None,
        };
        if let Some((g, c)) = gc {
            let cg = check_coarse_graining(g, c);
            checks.insert(
                "coarse-graining".into(),
                json!({ "holds": cg.holds(), "retraction_holds": cg.retraction_holds() }),
            );
            report.extend(cg.required);
        }

        let axioms = nu.check_partial_truth_axioms();
        checks.insert("partial-truth".into(), json!(axioms.is_empty()));
        report.extend(axioms);

        Ok((json!({ "checks": checks }), report))
    }
}

fn category_json(cat: &FiniteCategory, warnings: &[String]) -> Value {
    let objects: Vec<&str> = cat.objects().map(|a| cat.object_label(a)).collect();
    let mut morphisms: Vec<Value> = cat
        .morphisms()
        .map(|m| json!({ "label": cat.label(m), "dom": cat.object_label(cat.dom(m)), "cod": cat.object_label(cat.cod(m)) }))
        .collect();
    morphisms.sort_by(|a, b| a["label"].as_str().cmp(&b["label"].as_str()));
    let mut composites: Vec<[String; 3]> = Vec::new();
    for g in cat.morphisms() {
        for f in cat.morphisms() {
            if cat.is_identity(g) || cat.is_identity(f) {
                continue;
            }
            if let Some(h) = cat.entry(g, f) {
                composites.push([cat.label(g).to_owned(), cat.label(f).to_owned(), cat.label(h).to_owned()]);
            }
        }
    }
    composites.sort();
    json!({ "objects": objects, "morphisms": morphisms, "composites": composites, "warnings": warnings })
}

fn build_quantum<S: Backend>(block: &QuantumBlock, eps: f64, strip_units: bool) -> Result<QuantumWorld<S>, Error> {
    let mut ops = Vec::new();
    for spec in &block.operators {
        let forms = [spec.eigenvalues.is_some() || spec.projectors.is_some(), spec.diagonal.is_some(), spec.matrix.is_some()];
        if forms.iter().filter(|&&b| b).count() != 1 {
            return Err(malformed(format!(
                "operator `{}` needs exactly one of `eigenvalues`+`projectors`, `diagonal`, `matrix`",
                spec.name
            )));
        }
        let op = if let Some(d) = &spec.diagonal {
            S::operator_from_diagonal(&spec.name, &rationals(d)?, eps)?
        } else if let Some(m) = &spec.matrix {
            S::operator_from_matrix(&spec.name, matrix(m, &spec.name)?, eps)?
        } else {
            let (Some(eigs), Some(projs)) = (&spec.eigenvalues, &spec.projectors) else {
                return Err(malformed(format!("operator `{}` needs both `eigenvalues` and `projectors`", spec.name)));
            };
            let eigs: Vec<S::Real> = rationals(eigs)?.iter().map(S::real_from_rational).collect();
            let projs = projs.iter().map(|p| matrix::<S>(p, &spec.name)).collect::<Result<Vec<_>, _>>()?;
            SpectralOperator::new(spec.name.clone(), eigs, projs, eps)?
        };
        ops.push(op);
    }
    if let Some(ks) = &block.ks {
        let bases = ks
            .bases
            .iter()
            .map(|b| b.iter().map(|v| vector::<S>(v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        ops.extend(ks_operators(ks.dim, &bases, eps)?);
    }
    let mut options = BuildOptions { epsilon: eps, strip_units, labels: labels_of(&block.relations), restrict: None };
    if block.only_listed_relations {
        options.restrict = Some(block.relations.iter().map(|r| (r.dom.clone(), r.cod.clone())).collect::<BTreeSet<_>>());
    }
    let cat = OperatorCategory::build(ops, &options)?;
    let (g, c) = cat.coarse_graining_presheaf();
    let states = block
        .states
        .iter()
        .map(|(name, s)| {
            let psi = match (&s.vector, &s.ray) {
                (Some(v), None) => StateVector::new(vector(v)?, eps)?,
                (None, Some(v)) => S::state_from_ray(vector(v)?, eps)?,
                _ => return Err(malformed(format!("state `{name}` needs exactly one of `vector`, `ray`"))),
            };
            Ok((name.clone(), psi))
        })
        .collect::<Result<_, Error>>()?;
    let densities = block
        .densities
        .iter()
        .map(|(name, m)| Ok((name.clone(), DensityMatrix::new(matrix(m, name)?, eps.max(1e-12))?)))
        .collect::<Result<_, Error>>()?;
    let partials = block
        .partial_valuations
        .iter()
        .map(|(name, values)| {
            let values: Vec<(&str, S::Real)> = values
                .iter()
                .map(|(op, v)| Ok((op.as_str(), S::real_from_rational(&v.rational()?))))
                .collect::<Result<_, Error>>()?;
            Ok((name.clone(), cat.partial_valuation(&values)?))
        })
        .collect::<Result<_, Error>>()?;
    Ok(QuantumWorld { cat, g, c, states, densities, partials })
}

fn build_classical(block: &ClassicalBlock) -> Result<ClassicalWorld, Error> {
    let space = StateSpace::new(block.states.iter().cloned())?;
    let quantities = block
        .quantities
        .iter()
        .map(|(name, v)| Ok(ClassicalQuantity::new(name.clone(), rationals(v)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let cat = build_function_category(space, quantities, &labels_of(&block.relations))?;
    let (g, c) = cat.coarse_graining_presheaf();
    let macrostates = block
        .macrostates
        .iter()
        .map(|(name, states)| {
            let states: Vec<&str> = states.iter().map(String::as_str).collect();
            Ok((name.clone(), cat.space().macrostate(&states)?))
        })
        .collect::<Result<_, Error>>()?;
    let measures = block
        .measures
        .iter()
        .map(|(name, w)| {
            let rho = ClassicalMeasure::new(rationals(w)?)?;
            if rho.weights().len() != cat.space().len() {
                return Err(malformed(format!("measure `{name}` has the wrong number of weights")));
            }
            Ok((name.clone(), rho))
        })
        .collect::<Result<_, Error>>()?;
    let partials = block
        .partial_valuations
        .iter()
        .map(|(name, values)| {
            let mut out = vec![None; cat.category().object_count()];
            for (q, v) in values {
                let (a, mask) = cat.proposition(q, &[v.rational()?])?;
                out[a.0] = Some(mask.trailing_zeros() as usize);
            }
            Ok((name.clone(), PartialValuation::new(out)))
        })
        .collect::<Result<_, Error>>()?;
    Ok(ClassicalWorld { cat, g, c, macrostates, measures, partials })
}

fn build_abstract(block: &AbstractBlock) -> Result<AbstractWorld, Error> {
    let spec = &block.category;
    let mut builder = CategoryBuilder::new();
    for o in &spec.objects {
        builder = builder.object(o.clone());
    }
    for m in &spec.morphisms {
        builder = builder.morphism(m.id.clone(), m.dom.clone(), m.cod.clone());
    }
    for [g, f, gf] in &spec.composition {
        builder = builder.composite(g.clone(), f.clone(), gf.clone());
    }
    let cat = Arc::new(builder.build()?);
    let mut presheaves = BTreeMap::new();
    for (name, p) in &block.presheaves {
        let sets: Vec<(&str, Vec<&str>)> =
            p.sets.iter().map(|(o, els)| (o.as_str(), els.iter().map(String::as_str).collect())).collect();
        let maps: Vec<(&str, Vec<(&str, &str)>)> = p
            .maps
            .iter()
            .map(|(m, t)| (m.as_str(), t.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect()))
            .collect();
        let x = Presheaf::from_labels(cat.clone(), &sets, &maps).map_err(|e| malformed(format!("presheaf `{name}`: {e}")))?;
        presheaves.insert(name.clone(), x);
    }
    let mut propositions = BTreeMap::new();
    for (name, p) in &block.propositions {
        let x: &Presheaf =
            presheaves.get(&p.presheaf).ok_or_else(|| Error::NotFound(format!("presheaf `{}`", p.presheaf)))?;
        let mut leq: Vec<Vec<Vec<bool>>> = cat
            .objects()
            .map(|a| {
                let n = x.size(a);
                (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect()
            })
            .collect();
        for (o, pairs) in &p.order {
            let a = cat.object_by_label(o)?;
            for [lo, hi] in pairs {
                let (i, j) = (x.element_by_label(a, lo)?, x.element_by_label(a, hi)?);
                leq[a.0][i][j] = true;
            }
            let n = x.size(a);
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if leq[a.0][i][k] && leq[a.0][k][j] {
                            leq[a.0][i][j] = true;
                        }
                    }
                }
            }
        }
        let g = PropositionPresheaf::new(x.clone(), leq).map_err(|e| malformed(format!("propositions `{name}`: {e}")))?;
        propositions.insert(name.clone(), Arc::new(g));
    }
    let mut valuations = BTreeMap::new();
    for (name, v) in &block.valuations {
        let g = propositions.get(&v.over).ok_or_else(|| Error::NotFound(format!("propositions `{}`", v.over)))?;
        let mut assign: Vec<Vec<crate::fincat::Sieve>> =
            cat.objects().map(|a| (0..g.size(a)).map(|_| crate::fincat::Sieve::empty(&cat, a)).collect()).collect();
        for (o, row) in &v.values {
            let a = cat.object_by_label(o)?;
            for (d, members) in row {
                let d = g.presheaf().element_by_label(a, d)?;
                let mut set = cat.empty_set();
                for m in members {
                    let m = cat.morphism_by_label(m)?;
                    if cat.cod(m) != a {
                        return Err(malformed(format!("valuation `{name}`: `{}` does not end at `{o}`", cat.label(m))));
                    }
                    set.insert(m);
                }
                assign[a.0][d] = crate::fincat::Sieve::new_unchecked(a, set);
            }
        }
        valuations.insert(name.clone(), GeneralisedValuation::new(g.clone(), assign)?);
    }
    Ok(AbstractWorld { cat, presheaves, valuations })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q3: &str = r#"{
        "mode": "exact",
        "quantum": {
            "operators": [
                {"name": "A", "diagonal": [1, 2]},
                {"name": "P", "diagonal": [0, 1]},
                {"name": "I", "diagonal": [1, 1]}
            ],
            "relations": [
                {"dom": "P", "cod": "A", "label": "p"},
                {"dom": "I", "cod": "A", "label": "u"},
                {"dom": "I", "cod": "P", "label": "u'"}
            ],
            "only_listed_relations": true,
            "states": {"psi": {"ray": [1, 1]}}
        },
        "tasks": [
            {"task": "valuate", "name": "psi",
             "valuation": {"kind": "nu_psi", "state": "psi"},
             "propositions": [{"operator": "A", "delta": [1]}]},
            {"task": "verify", "valuation": {"kind": "nu_psi", "state": "psi"}}
        ]
    }"#;

    #[test]
    fn runs_q3_in_both_modes() {
        let s = Scenario::from_json(Q3).unwrap();
        for mode in [Mode::Exact, Mode::Numeric] {
            let report = run(&s, &RunOptions { mode: Some(mode), ..RunOptions::default() }).unwrap();
            assert!(report.passed, "{}", report.to_json());
            assert_eq!(report.tasks[0].result["values"][0]["sieve"], json!(["u"]));
            assert_eq!(report.tasks[0].result["values"][0]["proposition"], json!("A in {1}"));
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let s = Scenario::from_json(Q3).unwrap();
        let a = run(&s, &RunOptions::default()).unwrap().to_json();
        let b = run(&s, &RunOptions::default()).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn task_filter() {
        let s = Scenario::from_json(Q3).unwrap();
        let r = run(&s, &RunOptions { task_filter: Some("verify".into()), ..RunOptions::default() }).unwrap();
        assert_eq!(r.tasks.len(), 1);
        assert_eq!(r.tasks[0].index, 1);
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = Scenario::from_json("{\n  \"tasks\": [ }").unwrap_err();
        assert!(err.location.unwrap().starts_with("line 2"));
        let err = Scenario::from_json(r#"{"tasks": [], "bogus": 1}"#).unwrap_err();
        assert!(err.message.contains("bogus"));
    }

    #[test]
    fn unresolved_reference_is_a_scenario_error() {
        let s = Scenario::from_json(&Q3.replace("\"kind\": \"nu_psi\", \"state\": \"psi\"}}", "\"kind\": \"nu_psi\", \"state\": \"phi\"}}")).unwrap();
        assert!(run(&s, &RunOptions::default()).is_err());
    }

    #[test]
    fn exact_mode_rejects_raw_matrices() {
        let text = r#"{"quantum": {"operators": [{"name": "A", "matrix": [[1, 0], [0, 2]]}]}, "tasks": []}"#;
        let s = Scenario::from_json(text).unwrap();
        assert!(run(&s, &RunOptions::default()).is_err());
        assert!(run(&s, &RunOptions { mode: Some(Mode::Numeric), ..RunOptions::default() }).is_ok());
    }
}
