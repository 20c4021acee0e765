//! Scenario files: parsing, validation, and the canonical JSON form.
//!
//! A scenario is a single JSON object naming an algebra, a task, module
//! ranks, operands and the parameters the task consumes. Validation errors
//! carry the JSON path of the offending field (`operands[1][0].blocks[2]`),
//! so a bad file is rejected before any numerics run.
//!
//! The canonical form produced by [`canonical`] fills every default in, so
//! re-parsing a report's embedded scenario reproduces the run bit for bit,
//! and canonicalization is a fixpoint: `canonical(parse(canonical(s))) ==
//! canonical(s)` byte for byte.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde_json::{json, Map, Value};

use cstarmod::algebra::{AlgebraDescriptor, AlgebraElement};
use cstarmod::module::{ModuleOperator, ModuleVector};
use cstarmod::powernorm::PowerNormTag;
use cstarmod::search::SearchBudget;
use cstarmod::summing::Pi1Mode;
use cstarmod::tol;

/// A validation failure, pointing at the offending field.
#[derive(Debug)]
pub struct Invalid {
    /// JSON path of the field, e.g. `operands[0]` or `budget.step_scale`.
    pub path: String,
    pub message: String,
}

impl Invalid {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

type VResult<T> = Result<T, Invalid>;

/// Every operation a scenario can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    VecNorm,
    VecAbs,
    InnerProduct,
    Theta,
    OpNorm,
    OpAbs,
    Apply,
    Compose,
    PolarDecompose,
    PolarPowerIdentityCheck,
    LatticeMultinorm,
    DualLatticeMultinorm,
    HilbertCstarMultinorm,
    Mu,
    MuStar,
    L2ModuleNorm,
    ClassicalMu2,
    MuStarCombinationSup,
    MuStarFunctionalSup,
    MuStarMinLambdaCheck,
    AmplificationNorm,
    MbNorm,
    Pi2Frame,
    Pi2Estimate,
    Pi1,
    TriangleDecomposition,
    PiAdjointSymmetryCheck,
    FrameVerify,
}

const TASKS: &[(&str, Task)] = &[
    ("amplification_norm", Task::AmplificationNorm),
    ("apply", Task::Apply),
    ("classical_mu2", Task::ClassicalMu2),
    ("compose", Task::Compose),
    ("dual_lattice_multinorm", Task::DualLatticeMultinorm),
    ("frame_verify", Task::FrameVerify),
    ("hilbert_cstar_multinorm", Task::HilbertCstarMultinorm),
    ("inner_product", Task::InnerProduct),
    ("l2_module_norm", Task::L2ModuleNorm),
    ("lattice_multinorm", Task::LatticeMultinorm),
    ("mb_norm", Task::MbNorm),
    ("mu", Task::Mu),
    ("mu_star", Task::MuStar),
    ("mu_star_combination_sup", Task::MuStarCombinationSup),
    ("mu_star_functional_sup", Task::MuStarFunctionalSup),
    ("mu_star_min_lambda_check", Task::MuStarMinLambdaCheck),
    ("op_abs", Task::OpAbs),
    ("op_norm", Task::OpNorm),
    ("pi1", Task::Pi1),
    ("pi2_estimate", Task::Pi2Estimate),
    ("pi2_frame", Task::Pi2Frame),
    ("pi_adjoint_symmetry_check", Task::PiAdjointSymmetryCheck),
    ("polar_decompose", Task::PolarDecompose),
    ("polar_power_identity_check", Task::PolarPowerIdentityCheck),
    ("theta", Task::Theta),
    ("triangle_decomposition", Task::TriangleDecomposition),
    ("vec_abs", Task::VecAbs),
    ("vec_norm", Task::VecNorm),
];

impl Task {
    pub fn name(self) -> &'static str {
        TASKS.iter().find(|(_, t)| *t == self).unwrap().0
    }

    pub fn parse(name: &str) -> Option<Task> {
        TASKS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
    }
}

/// What a single operand slot must contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Vector,
    Operator,
}

/// Operand pattern of a task: a fixed shape list, or one-or-more vectors
/// sharing a rank (the tuple norms).
enum Pattern {
    Fixed(&'static [Shape]),
    VectorTuple,
}

fn pattern(task: Task) -> Pattern {
    use Shape::{Operator, Vector};
    match task {
        Task::VecNorm | Task::VecAbs => Pattern::Fixed(&[Vector]),
        Task::InnerProduct | Task::Theta | Task::TriangleDecomposition => {
            Pattern::Fixed(&[Vector, Vector])
        }
        Task::OpNorm
        | Task::OpAbs
        | Task::PolarDecompose
        | Task::PolarPowerIdentityCheck
        | Task::AmplificationNorm
        | Task::MbNorm
        | Task::Pi2Frame
        | Task::Pi2Estimate
        | Task::Pi1
        | Task::PiAdjointSymmetryCheck => Pattern::Fixed(&[Operator]),
        Task::Apply => Pattern::Fixed(&[Operator, Vector]),
        Task::Compose => Pattern::Fixed(&[Operator, Operator]),
        Task::LatticeMultinorm
        | Task::DualLatticeMultinorm
        | Task::HilbertCstarMultinorm
        | Task::Mu
        | Task::MuStar
        | Task::L2ModuleNorm
        | Task::ClassicalMu2
        | Task::MuStarCombinationSup
        | Task::MuStarFunctionalSup
        | Task::MuStarMinLambdaCheck
        | Task::FrameVerify => Pattern::VectorTuple,
    }
}

/// Optional fields a task consumes, beyond the base set
/// (`algebra`, `task`, `rank`, `operands`, `seed`). Anything else present
/// in a scenario is rejected, so a misspelled or misplaced parameter never
/// gets silently ignored.
fn allowed_extras(task: Task) -> &'static [&'static str] {
    match task {
        Task::PolarDecompose => &["tolerances"],
        Task::PolarPowerIdentityCheck => &["alpha", "tolerances"],
        Task::TriangleDecomposition => &["tolerances"],
        Task::HilbertCstarMultinorm | Task::Mu => &["budget"],
        Task::MuStarCombinationSup
        | Task::MuStarFunctionalSup
        | Task::MuStarMinLambdaCheck
        | Task::FrameVerify => &["n"],
        Task::AmplificationNorm | Task::MbNorm => {
            &["budget", "codomain_kind", "domain_kind", "n"]
        }
        Task::Pi2Estimate | Task::PiAdjointSymmetryCheck => &["budget", "n"],
        Task::Pi1 => &["budget", "mode", "n"],
        _ => &[],
    }
}

/// Which tolerance overrides a task reads.
fn allowed_tolerances(task: Task) -> &'static [&'static str] {
    match task {
        Task::PolarDecompose | Task::PolarPowerIdentityCheck => &["polar_roundtrip"],
        Task::TriangleDecomposition => &["triangle_eps"],
        _ => &[],
    }
}

const BASE_FIELDS: &[&str] = &["algebra", "operands", "rank", "seed", "task"];
const KNOWN_FIELDS: &[&str] = &[
    "algebra",
    "alpha",
    "budget",
    "codomain_kind",
    "domain_kind",
    "mode",
    "n",
    "operands",
    "rank",
    "seed",
    "task",
    "tolerances",
];

/// A parsed operand.
#[derive(Debug, Clone)]
pub enum Operand {
    Vector(ModuleVector<f64>),
    Operator(ModuleOperator<f64>),
}

/// A fully validated scenario with every default resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub algebra: AlgebraDescriptor,
    pub task: Task,
    /// One rank per operand: the vector's rank, or the operator's domain
    /// rank.
    pub ranks: Vec<usize>,
    pub operands: Vec<Operand>,
    pub seed: u64,
    pub budget: SearchBudget,
    /// Level / tuple length / sample count / trial count, whichever the
    /// task means by `n`; resolved to its default when the task has one.
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub mode: Pi1Mode,
    pub domain_kind: PowerNormTag,
    pub codomain_kind: PowerNormTag,
    pub polar_roundtrip_tol: f64,
    pub triangle_eps: f64,
}

impl Scenario {
    /// The operand at `i` as a vector; validation guarantees the shape.
    pub fn vector(&self, i: usize) -> &ModuleVector<f64> {
        match &self.operands[i] {
            Operand::Vector(x) => x,
            Operand::Operator(_) => unreachable!("operand {i} validated as a vector"),
        }
    }

    /// The operand at `i` as an operator; validation guarantees the shape.
    pub fn operator(&self, i: usize) -> &ModuleOperator<f64> {
        match &self.operands[i] {
            Operand::Operator(t) => t,
            Operand::Vector(_) => unreachable!("operand {i} validated as an operator"),
        }
    }

    /// All operands as the vector tuple the multi-norms take.
    pub fn vector_tuple(&self) -> Vec<ModuleVector<f64>> {
        (0..self.operands.len())
            .map(|i| self.vector(i).clone())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

fn parse_complex(v: &Value, path: &str) -> VResult<Complex<f64>> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Invalid::new(path, "expected a complex number [re, im]"))?;
    let mut parts = [0.0f64; 2];
    for (i, p) in arr.iter().enumerate() {
        let x = p
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Invalid::new(format!("{path}[{i}]"), "expected a finite number"))?;
        parts[i] = x;
    }
    Ok(Complex::new(parts[0], parts[1]))
}

fn parse_element(
    desc: &AlgebraDescriptor,
    v: &Value,
    path: &str,
) -> VResult<AlgebraElement<f64>> {
    let obj = v.as_object().ok_or_else(|| {
        Invalid::new(path, "expected an algebra element {\"blocks\": [matrices]}")
    })?;
    for key in obj.keys() {
        if key != "blocks" {
            return Err(Invalid::new(format!("{path}.{key}"), "unknown field"));
        }
    }
    let blocks_v = obj
        .get("blocks")
        .ok_or_else(|| Invalid::new(path, "missing field `blocks`"))?
        .as_array()
        .ok_or_else(|| Invalid::new(format!("{path}.blocks"), "expected an array of matrices"))?;
    if blocks_v.len() != desc.num_blocks() {
        return Err(Invalid::new(
            format!("{path}.blocks"),
            format!(
                "algebra {:?} has {} blocks, found {}",
                desc.block_sizes(),
                desc.num_blocks(),
                blocks_v.len()
            ),
        ));
    }
    let mut blocks = Vec::with_capacity(blocks_v.len());
    for (j, (bv, &k)) in blocks_v.iter().zip(desc.block_sizes()).enumerate() {
        let bpath = format!("{path}.blocks[{j}]");
        let rows = bv
            .as_array()
            .filter(|r| r.len() == k)
            .ok_or_else(|| Invalid::new(&bpath, format!("expected a {k}x{k} row-major matrix")))?;
        let mut mat = DMatrix::<Complex<f64>>::zeros(k, k);
        for (r, row_v) in rows.iter().enumerate() {
            let cells = row_v.as_array().filter(|c| c.len() == k).ok_or_else(|| {
                Invalid::new(
                    format!("{bpath}[{r}]"),
                    format!("expected a row of {k} complex entries"),
                )
            })?;
            for (c, cell) in cells.iter().enumerate() {
                mat[(r, c)] = parse_complex(cell, &format!("{bpath}[{r}][{c}]"))?;
            }
        }
        blocks.push(mat);
    }
    AlgebraElement::from_blocks(desc.clone(), blocks).map_err(|e| Invalid::new(path, e.to_string()))
}

fn parse_vector(
    desc: &AlgebraDescriptor,
    v: &Value,
    rank: usize,
    path: &str,
) -> VResult<ModuleVector<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Invalid::new(path, "expected a vector: an array of algebra elements"))?;
    if arr.len() != rank {
        return Err(Invalid::new(
            path,
            format!("vector length {} does not match rank {rank}", arr.len()),
        ));
    }
    let entries = arr
        .iter()
        .enumerate()
        .map(|(i, e)| parse_element(desc, e, &format!("{path}[{i}]")))
        .collect::<VResult<Vec<_>>>()?;
    ModuleVector::from_entries(entries).map_err(|e| Invalid::new(path, e.to_string()))
}

fn parse_operator(
    desc: &AlgebraDescriptor,
    v: &Value,
    domain_rank: usize,
    path: &str,
) -> VResult<ModuleOperator<f64>> {
    let rows = v.as_array().ok_or_else(|| {
        Invalid::new(
            path,
            "expected an operator: codomain-major nested arrays of algebra elements",
        )
    })?;
    if rows.is_empty() {
        return Err(Invalid::new(path, "operator needs at least one codomain row"));
    }
    let mut entries = Vec::with_capacity(rows.len());
    for (i, row_v) in rows.iter().enumerate() {
        let row = row_v
            .as_array()
            .ok_or_else(|| Invalid::new(format!("{path}[{i}]"), "expected an array of elements"))?;
        if row.len() != domain_rank {
            return Err(Invalid::new(
                format!("{path}[{i}]"),
                format!(
                    "operator row length {} does not match domain rank {domain_rank}",
                    row.len()
                ),
            ));
        }
        let elems = row
            .iter()
            .enumerate()
            .map(|(l, e)| parse_element(desc, e, &format!("{path}[{i}][{l}]")))
            .collect::<VResult<Vec<_>>>()?;
        entries.push(elems);
    }
    ModuleOperator::from_entries(entries).map_err(|e| Invalid::new(path, e.to_string()))
}

fn parse_algebra(v: &Value) -> VResult<AlgebraDescriptor> {
    let arr = v
        .as_array()
        .ok_or_else(|| Invalid::new("algebra", "expected an array of positive block sizes"))?;
    let mut sizes = Vec::with_capacity(arr.len());
    for (j, s) in arr.iter().enumerate() {
        let k = s.as_u64().filter(|&k| k >= 1).ok_or_else(|| {
            Invalid::new(format!("algebra[{j}]"), "expected a positive integer block size")
        })?;
        sizes.push(k as usize);
    }
    AlgebraDescriptor::new(sizes).map_err(|e| Invalid::new("algebra", e.to_string()))
}

fn parse_ranks(v: Option<&Value>, count: usize) -> VResult<Vec<usize>> {
    let v = v.ok_or_else(|| {
        Invalid::new("rank", "missing field: the module rank, an integer or one per operand")
    })?;
    let one = |x: &Value, path: &str| -> VResult<usize> {
        x.as_u64()
            .filter(|&r| r >= 1)
            .map(|r| r as usize)
            .ok_or_else(|| Invalid::new(path, "expected a positive integer rank"))
    };
    match v {
        Value::Array(arr) => {
            if arr.len() != count {
                return Err(Invalid::new(
                    "rank",
                    format!("expected {count} entries (one per operand), found {}", arr.len()),
                ));
            }
            arr.iter()
                .enumerate()
                .map(|(i, x)| one(x, &format!("rank[{i}]")))
                .collect()
        }
        _ => Ok(vec![one(v, "rank")?; count]),
    }
}

fn parse_budget(v: &Value) -> VResult<SearchBudget> {
    const FIELDS: &[&str] = &[
        "local_steps",
        "restarts",
        "samples",
        "stagnation_halvings",
        "step_scale",
    ];
    let obj = v
        .as_object()
        .ok_or_else(|| Invalid::new("budget", "expected an object of search parameters"))?;
    for key in obj.keys() {
        if !FIELDS.contains(&key.as_str()) {
            return Err(Invalid::new(format!("budget.{key}"), "unknown field"));
        }
    }
    let count = |name: &str, default: usize| -> VResult<usize> {
        match obj.get(name) {
            None => Ok(default),
            Some(x) => x
                .as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| Invalid::new(format!("budget.{name}"), "expected a nonnegative integer")),
        }
    };
    let mut b = SearchBudget::default();
    b.samples = count("samples", b.samples)?;
    b.restarts = count("restarts", b.restarts)?;
    b.local_steps = count("local_steps", b.local_steps)?;
    b.stagnation_halvings = count("stagnation_halvings", b.stagnation_halvings)?;
    if let Some(x) = obj.get("step_scale") {
        b.step_scale = x
            .as_f64()
            .filter(|s| s.is_finite() && *s > 0.0)
            .ok_or_else(|| Invalid::new("budget.step_scale", "expected a positive number"))?;
    }
    Ok(b)
}

fn parse_kind(v: &Value, path: &str) -> VResult<PowerNormTag> {
    let s = v
        .as_str()
        .ok_or_else(|| Invalid::new(path, "expected a power-norm kind name"))?;
    match s {
        "lattice" => Ok(PowerNormTag::Lattice),
        "dual_lattice" => Ok(PowerNormTag::DualLattice),
        "hilbert_cstar" => Ok(PowerNormTag::HilbertCstar),
        "mu" => Ok(PowerNormTag::Mu),
        "mu_star" => Ok(PowerNormTag::MuStar),
        "l2_module" => Ok(PowerNormTag::L2Module),
        "classical_mu2" => Ok(PowerNormTag::ClassicalMu2),
        _ => Err(Invalid::new(
            path,
            format!(
                "unknown power-norm kind `{s}`; expected lattice, dual_lattice, \
                 hilbert_cstar, mu, mu_star, l2_module or classical_mu2"
            ),
        )),
    }
}

fn parse_mode(v: &Value) -> VResult<Pi1Mode> {
    match v.as_str() {
        Some("frame_exact") => Ok(Pi1Mode::FrameExact),
        Some("estimate") => Ok(Pi1Mode::Estimate),
        _ => Err(Invalid::new("mode", "expected \"frame_exact\" or \"estimate\"")),
    }
}

fn parse_tolerances(v: &Value, allowed: &[&str]) -> VResult<(Option<f64>, Option<f64>)> {
    let obj = v
        .as_object()
        .ok_or_else(|| Invalid::new("tolerances", "expected an object"))?;
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Invalid::new(
                format!("tolerances.{key}"),
                "tolerance does not apply to this task",
            ));
        }
    }
    let get = |name: &str| -> VResult<Option<f64>> {
        match obj.get(name) {
            None => Ok(None),
            Some(x) => x
                .as_f64()
                .filter(|t| t.is_finite() && *t >= 0.0)
                .map(Some)
                .ok_or_else(|| {
                    Invalid::new(format!("tolerances.{name}"), "expected a nonnegative number")
                }),
        }
    };
    Ok((get("polar_roundtrip")?, get("triangle_eps")?))
}

/// Checks a power-norm kind against the algebra it will be evaluated on.
fn kind_precondition(tag: PowerNormTag, desc: &AlgebraDescriptor, path: &str) -> VResult<()> {
    match tag {
        PowerNormTag::Lattice | PowerNormTag::DualLattice if !desc.is_commutative() => {
            Err(Invalid::new(
                path,
                format!("`{}` needs a commutative algebra (all block sizes 1)", tag.name()),
            ))
        }
        PowerNormTag::ClassicalMu2 if desc.block_sizes() != [1] => Err(Invalid::new(
            path,
            "`classical_mu2` needs the scalar algebra [1]",
        )),
        _ => Ok(()),
    }
}

/// Parses and validates a scenario, resolving every default.
pub fn parse(root: &Value) -> VResult<Scenario> {
    let obj = root
        .as_object()
        .ok_or_else(|| Invalid::new("", "scenario must be a JSON object"))?;
    for key in obj.keys() {
        if !KNOWN_FIELDS.contains(&key.as_str()) {
            return Err(Invalid::new(key.clone(), "unknown field"));
        }
    }

    let algebra = parse_algebra(
        obj.get("algebra")
            .ok_or_else(|| Invalid::new("algebra", "missing field"))?,
    )?;
    let task_v = obj
        .get("task")
        .ok_or_else(|| Invalid::new("task", "missing field"))?;
    let task_s = task_v
        .as_str()
        .ok_or_else(|| Invalid::new("task", "expected a task name string"))?;
    let task = Task::parse(task_s).ok_or_else(|| {
        let names: Vec<&str> = TASKS.iter().map(|(n, _)| *n).collect();
        Invalid::new(
            "task",
            format!("unknown task `{task_s}`; expected one of: {}", names.join(", ")),
        )
    })?;

    // Fields that exist but do not apply to this task are rejected, not
    // ignored: a silently dropped parameter is a debugging trap.
    let extras = allowed_extras(task);
    for key in obj.keys() {
        if !BASE_FIELDS.contains(&key.as_str()) && !extras.contains(&key.as_str()) {
            return Err(Invalid::new(
                key.clone(),
                format!("field does not apply to task `{}`", task.name()),
            ));
        }
    }

    let seed = match obj.get("seed") {
        None => 0,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| Invalid::new("seed", "expected a nonnegative integer"))?,
    };
    let budget = match obj.get("budget") {
        None => SearchBudget::default(),
        Some(v) => parse_budget(v)?,
    };

    // Operands.
    let operands_v = obj
        .get("operands")
        .ok_or_else(|| Invalid::new("operands", "missing field"))?
        .as_array()
        .ok_or_else(|| Invalid::new("operands", "expected an array"))?;
    if operands_v.is_empty() {
        return Err(Invalid::new("operands", "expected at least one operand"));
    }
    let ranks = parse_ranks(obj.get("rank"), operands_v.len())?;

    let shapes: Vec<Shape> = match pattern(task) {
        Pattern::Fixed(shapes) => {
            if operands_v.len() != shapes.len() {
                return Err(Invalid::new(
                    "operands",
                    format!(
                        "task `{}` takes exactly {} operand(s), found {}",
                        task.name(),
                        shapes.len(),
                        operands_v.len()
                    ),
                ));
            }
            shapes.to_vec()
        }
        Pattern::VectorTuple => {
            if ranks.windows(2).any(|w| w[0] != w[1]) {
                return Err(Invalid::new(
                    "rank",
                    format!("task `{}` needs one common rank for the tuple", task.name()),
                ));
            }
            vec![Shape::Vector; operands_v.len()]
        }
    };
    let operands: Vec<Operand> = operands_v
        .iter()
        .zip(&shapes)
        .zip(&ranks)
        .enumerate()
        .map(|(i, ((v, shape), &rank))| {
            let path = format!("operands[{i}]");
            match shape {
                Shape::Vector => parse_vector(&algebra, v, rank, &path).map(Operand::Vector),
                Shape::Operator => parse_operator(&algebra, v, rank, &path).map(Operand::Operator),
            }
        })
        .collect::<VResult<_>>()?;

    // Cross-operand shape coupling.
    match task {
        Task::InnerProduct if ranks[0] != ranks[1] => {
            return Err(Invalid::new("rank", "inner product needs operands of equal rank"));
        }
        Task::Apply if ranks[0] != ranks[1] => {
            return Err(Invalid::new(
                "rank",
                "apply needs the operator's domain rank to equal the vector's rank",
            ));
        }
        Task::Compose => {
            let (t, s) = (&operands[0], &operands[1]);
            if let (Operand::Operator(t), Operand::Operator(s)) = (t, s) {
                if t.domain_rank() != s.codomain_rank() {
                    return Err(Invalid::new(
                        "operands[1]",
                        format!(
                            "composition needs the second operator's codomain rank ({}) to \
                             match the first's domain rank ({})",
                            s.codomain_rank(),
                            t.domain_rank()
                        ),
                    ));
                }
            }
        }
        Task::TriangleDecomposition if ranks != [1, 1] => {
            return Err(Invalid::new(
                "rank",
                "triangle decomposition takes two algebra elements (rank-1 vectors)",
            ));
        }
        _ => {}
    }

    // Task preconditions on the algebra.
    let commutative = algebra.is_commutative();
    match task {
        Task::LatticeMultinorm | Task::DualLatticeMultinorm | Task::Pi2Frame if !commutative => {
            return Err(Invalid::new(
                "algebra",
                format!(
                    "task `{}` needs a commutative algebra (all block sizes 1)",
                    task.name()
                ),
            ));
        }
        Task::ClassicalMu2 if algebra.block_sizes() != [1] => {
            return Err(Invalid::new(
                "algebra",
                "task `classical_mu2` needs the scalar algebra [1]",
            ));
        }
        _ => {}
    }

    // Mode, kinds, alpha, tolerances.
    let mode = match obj.get("mode") {
        None => Pi1Mode::Estimate,
        Some(v) => parse_mode(v)?,
    };
    if task == Task::Pi1 && mode == Pi1Mode::FrameExact && !commutative {
        return Err(Invalid::new(
            "mode",
            "frame_exact needs a commutative algebra (all block sizes 1)",
        ));
    }
    let domain_kind = match obj.get("domain_kind") {
        None => PowerNormTag::HilbertCstar,
        Some(v) => parse_kind(v, "domain_kind")?,
    };
    let codomain_kind = match obj.get("codomain_kind") {
        None => PowerNormTag::HilbertCstar,
        Some(v) => parse_kind(v, "codomain_kind")?,
    };
    if matches!(task, Task::AmplificationNorm | Task::MbNorm) {
        kind_precondition(domain_kind, &algebra, "domain_kind")?;
        kind_precondition(codomain_kind, &algebra, "codomain_kind")?;
    }
    let alpha = match obj.get("alpha") {
        None => None,
        Some(v) => Some(
            v.as_f64()
                .filter(|a| a.is_finite() && *a > 0.0)
                .ok_or_else(|| Invalid::new("alpha", "expected a positive number"))?,
        ),
    };
    if task == Task::PolarPowerIdentityCheck && alpha.is_none() {
        return Err(Invalid::new("alpha", "missing field: the exponent to check"));
    }
    let (polar_tol, triangle_eps) = match obj.get("tolerances") {
        None => (None, None),
        Some(v) => parse_tolerances(v, allowed_tolerances(task))?,
    };

    // `n`, with per-task meaning and default.
    let n_given = match obj.get("n") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .filter(|&n| n >= 1)
                .map(|n| n as usize)
                .ok_or_else(|| Invalid::new("n", "expected a positive integer"))?,
        ),
    };
    let n = match task {
        Task::AmplificationNorm => Some(
            n_given
                .ok_or_else(|| Invalid::new("n", "missing field: the amplification level"))?,
        ),
        Task::MuStarCombinationSup | Task::MuStarFunctionalSup => Some(n_given.unwrap_or(5000)),
        Task::MuStarMinLambdaCheck | Task::FrameVerify => Some(n_given.unwrap_or(200)),
        Task::MbNorm | Task::Pi2Estimate | Task::Pi1 | Task::PiAdjointSymmetryCheck => {
            // Tuple lengths up to twice the total Hilbert dimension of the
            // module cover every rank the suprema can distinguish.
            Some(n_given.unwrap_or_else(|| 2 * ranks[0] * algebra.total_dim()))
        }
        _ => None,
    };

    Ok(Scenario {
        algebra,
        task,
        ranks,
        operands,
        seed,
        budget,
        n,
        alpha,
        mode,
        domain_kind,
        codomain_kind,
        polar_roundtrip_tol: polar_tol.unwrap_or(tol::EXACT),
        triangle_eps: triangle_eps.unwrap_or(0.0),
    })
}

// ---------------------------------------------------------------------------
// Canonical serialization
// ---------------------------------------------------------------------------

pub fn complex_value(c: Complex<f64>) -> Value {
    json!([c.re, c.im])
}

pub fn element_value(a: &AlgebraElement<f64>) -> Value {
    let blocks: Vec<Value> = a
        .blocks()
        .iter()
        .map(|b| {
            let rows: Vec<Value> = (0..b.nrows())
                .map(|r| Value::Array((0..b.ncols()).map(|c| complex_value(b[(r, c)])).collect()))
                .collect();
            Value::Array(rows)
        })
        .collect();
    json!({ "blocks": blocks })
}

pub fn vector_value(x: &ModuleVector<f64>) -> Value {
    Value::Array(x.entries().iter().map(element_value).collect())
}

pub fn operator_value(t: &ModuleOperator<f64>) -> Value {
    Value::Array(
        t.entries()
            .iter()
            .map(|row| Value::Array(row.iter().map(element_value).collect()))
            .collect(),
    )
}

pub fn budget_value(b: &SearchBudget) -> Value {
    json!({
        "local_steps": b.local_steps,
        "restarts": b.restarts,
        "samples": b.samples,
        "stagnation_halvings": b.stagnation_halvings,
        "step_scale": b.step_scale,
    })
}

fn kind_name(tag: PowerNormTag) -> &'static str {
    tag.name()
}

/// The canonical JSON form of a validated scenario: defaults filled in,
/// keys alphabetical. Embedded in every report; re-running it reproduces
/// the report's result values bit for bit.
pub fn canonical(sc: &Scenario) -> Value {
    let mut m = Map::new();
    m.insert("algebra".into(), json!(sc.algebra.block_sizes()));
    m.insert(
        "operands".into(),
        Value::Array(
            sc.operands
                .iter()
                .map(|op| match op {
                    Operand::Vector(x) => vector_value(x),
                    Operand::Operator(t) => operator_value(t),
                })
                .collect(),
        ),
    );
    m.insert("rank".into(), json!(sc.ranks));
    m.insert("seed".into(), json!(sc.seed));
    m.insert("task".into(), json!(sc.task.name()));
    let extras = allowed_extras(sc.task);
    if extras.contains(&"budget") {
        m.insert("budget".into(), budget_value(&sc.budget));
    }
    if extras.contains(&"n") {
        m.insert("n".into(), json!(sc.n.expect("n resolved during validation")));
    }
    if extras.contains(&"alpha") {
        m.insert(
            "alpha".into(),
            json!(sc.alpha.expect("alpha required during validation")),
        );
    }
    if extras.contains(&"mode") {
        m.insert(
            "mode".into(),
            json!(match sc.mode {
                Pi1Mode::FrameExact => "frame_exact",
                Pi1Mode::Estimate => "estimate",
            }),
        );
    }
    if extras.contains(&"domain_kind") {
        m.insert("domain_kind".into(), json!(kind_name(sc.domain_kind)));
        m.insert("codomain_kind".into(), json!(kind_name(sc.codomain_kind)));
    }
    if extras.contains(&"tolerances") {
        let mut t = Map::new();
        for &name in allowed_tolerances(sc.task) {
            match name {
                "polar_roundtrip" => {
                    t.insert("polar_roundtrip".into(), json!(sc.polar_roundtrip_tol));
                }
                "triangle_eps" => {
                    t.insert("triangle_eps".into(), json!(sc.triangle_eps));
                }
                _ => unreachable!(),
            }
        }
        m.insert("tolerances".into(), Value::Object(t));
    }
    Value::Object(m)
}
