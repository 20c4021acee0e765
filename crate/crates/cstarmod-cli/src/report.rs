//! Task dispatch and report serialization.
//!
//! [`dispatch`] evaluates a validated [`Scenario`] through the library and
//! renders the result as JSON. Every float goes through `serde_json`'s
//! shortest-round-trip encoding, and every map is a `BTreeMap`, so a report
//! is a canonical byte sequence: rerunning the embedded scenario reproduces
//! the `results` subtree exactly.

use serde_json::{json, Map, Value};

use cstarmod::module::{
    apply, compose, inner_product, op_abs, op_norm, polar_decompose,
    polar_power_identity_check, theta, vec_abs, vec_norm, PolarDecomposition, PolarPowerReport,
};
use cstarmod::powernorm::{
    amplification_norm, classical_mu2, dual_lattice_multinorm, hilbert_cstar_multinorm,
    l2_module_norm, lattice_multinorm, mb_norm, mu, mu_star, mu_star_combination_sup,
    mu_star_functional_sup, mu_star_min_lambda_check, AmplificationReport, CheckMode,
    EstimateKind, NormEstimate, PowerNormKind, SampledSup, Witness,
};
use cstarmod::summing::{
    frame_verify, pi1, pi2_estimate, pi2_frame, pi_adjoint_symmetry_check, standard_frame,
    triangle_decomposition, Frame, Normalization, SummingReport,
};
use cstarmod::verify::{Check, CheckStatus, VerifyReport};

use crate::scenario::{element_value, operator_value, vector_value, Scenario, Task};

/// A float as a JSON value; non-finite values (which no healthy run
/// produces) become strings rather than silent nulls.
fn real(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format!("{v}")))
}

fn witness_value(w: &Witness<f64>) -> Value {
    match w {
        Witness::None => json!({ "kind": "none" }),
        Witness::Vector(x) => json!({ "kind": "vector", "vector": vector_value(x) }),
        Witness::Tuple(xs) => json!({
            "kind": "tuple",
            "vectors": xs.iter().map(vector_value).collect::<Vec<_>>(),
        }),
        Witness::AlgebraTuple(coeffs) => json!({
            "elements": coeffs.iter().map(element_value).collect::<Vec<_>>(),
            "kind": "algebra_tuple",
        }),
        Witness::Family(f) => json!({
            "kind": "family",
            "projections": f.projections().iter().map(operator_value).collect::<Vec<_>>(),
        }),
    }
}

fn estimate_value(e: &NormEstimate<f64>) -> Value {
    json!({
        "budget_used": {
            "restarts": e.budget_used.restarts,
            "samples": e.budget_used.samples,
        },
        "kind": match e.kind {
            EstimateKind::Exact => "exact",
            EstimateKind::LowerBound => "lower_bound",
        },
        "seed": e.seed,
        "value": real(e.value),
        "witness": witness_value(&e.witness),
    })
}

fn sampled_sup_value(s: &SampledSup<f64>) -> Value {
    json!({
        "best": real(s.best),
        "samples": s.samples,
        "witness": witness_value(&s.witness),
    })
}

fn summing_value(r: &SummingReport<f64>) -> Value {
    json!({
        "admissible_tuples_used": r.admissible_tuples_used,
        "estimate": estimate_value(&r.estimate),
        "normalization": match r.normalization {
            Normalization::ExactMu => "exact_mu",
            Normalization::CertifiedUpperBound => "certified_upper_bound",
        },
    })
}

fn amplification_value(r: &AmplificationReport<f64>) -> Value {
    json!({
        "estimate": estimate_value(&r.estimate),
        "sequence": r.sequence.iter().map(|&v| real(v)).collect::<Vec<_>>(),
        "sequence_monotone": r.sequence_monotone,
    })
}

fn polar_value(p: &PolarDecomposition<f64>) -> Value {
    json!({
        "abs": operator_value(&p.abs),
        "corange_angle": real(p.corange_angle),
        "isometry": operator_value(&p.isometry),
        "range_angle": real(p.range_angle),
        "roundtrip_residual": real(p.roundtrip_residual),
    })
}

fn polar_power_value(r: &PolarPowerReport<f64>) -> Value {
    json!({
        "alpha": real(r.alpha),
        "codomain_abs_residual": real(r.codomain_abs_residual),
        "conjugate_power_residual": real(r.conjugate_power_residual),
        "domain_abs_residual": real(r.domain_abs_residual),
        "pass": r.pass,
        "reverse_conjugate_residual": real(r.reverse_conjugate_residual),
    })
}

/// Evaluates the scenario's task and returns the `results` array of the
/// report: one object whose keys name what the task produced.
pub fn dispatch(sc: &Scenario) -> cstarmod::Result<Value> {
    let budget = &sc.budget;
    let seed = sc.seed;
    let result: Value = match sc.task {
        Task::VecNorm => json!({ "value": real(vec_norm(sc.vector(0))?) }),
        Task::VecAbs => json!({ "element": element_value(&vec_abs(sc.vector(0))?) }),
        Task::InnerProduct => {
            json!({ "element": element_value(&inner_product(sc.vector(0), sc.vector(1))?) })
        }
        Task::Theta => {
            json!({ "operator": operator_value(&theta(sc.vector(0), sc.vector(1))?) })
        }
        Task::OpNorm => json!({ "value": real(op_norm(sc.operator(0))?) }),
        Task::OpAbs => json!({ "operator": operator_value(&op_abs(sc.operator(0))?) }),
        Task::Apply => {
            json!({ "vector": vector_value(&apply(sc.operator(0), sc.vector(1))?) })
        }
        Task::Compose => {
            json!({ "operator": operator_value(&compose(sc.operator(0), sc.operator(1))?) })
        }
        Task::PolarDecompose => {
            polar_value(&polar_decompose(sc.operator(0), sc.polar_roundtrip_tol)?)
        }
        Task::PolarPowerIdentityCheck => {
            let alpha = sc.alpha.expect("alpha validated");
            polar_power_value(&polar_power_identity_check(
                sc.operator(0),
                alpha,
                sc.polar_roundtrip_tol,
            )?)
        }
        Task::LatticeMultinorm => {
            json!({ "estimate": estimate_value(&lattice_multinorm(&sc.vector_tuple())?) })
        }
        Task::DualLatticeMultinorm => {
            json!({ "estimate": estimate_value(&dual_lattice_multinorm(&sc.vector_tuple())?) })
        }
        Task::HilbertCstarMultinorm => {
            let est = hilbert_cstar_multinorm(&sc.vector_tuple(), budget, seed)?;
            json!({ "estimate": estimate_value(&est) })
        }
        Task::Mu => {
            let rep = mu(&sc.vector_tuple(), budget, seed)?;
            json!({
                "estimate": estimate_value(&rep.estimate),
                "upper_bound": real(rep.upper_bound),
            })
        }
        Task::MuStar => json!({ "estimate": estimate_value(&mu_star(&sc.vector_tuple())?) }),
        Task::L2ModuleNorm => {
            json!({ "estimate": estimate_value(&l2_module_norm(&sc.vector_tuple())?) })
        }
        Task::ClassicalMu2 => {
            json!({ "estimate": estimate_value(&classical_mu2(&sc.vector_tuple())?) })
        }
        Task::MuStarCombinationSup => {
            let n = sc.n.expect("n resolved");
            sampled_sup_value(&mu_star_combination_sup(&sc.vector_tuple(), n, seed)?)
        }
        Task::MuStarFunctionalSup => {
            let n = sc.n.expect("n resolved");
            sampled_sup_value(&mu_star_functional_sup(&sc.vector_tuple(), n, seed)?)
        }
        Task::MuStarMinLambdaCheck => {
            let trials = sc.n.expect("n resolved");
            let r = mu_star_min_lambda_check(&sc.vector_tuple(), trials, seed)?;
            json!({
                "inequality_holds": r.inequality_holds,
                "lambda": real(r.lambda),
                "minimality_confirmed": r.minimality_confirmed,
                "trials": r.trials,
                "worst_margin": real(r.worst_margin),
            })
        }
        Task::AmplificationNorm | Task::MbNorm => {
            let n = sc.n.expect("n resolved");
            let dom = PowerNormKind::new(sc.domain_kind, budget.clone());
            let cod = PowerNormKind::new(sc.codomain_kind, budget.clone());
            let rep = if sc.task == Task::AmplificationNorm {
                amplification_norm(sc.operator(0), n, &dom, &cod, budget, seed)?
            } else {
                mb_norm(sc.operator(0), n, &dom, &cod, budget, seed)?
            };
            amplification_value(&rep)
        }
        Task::Pi2Frame => {
            let t = sc.operator(0);
            let frame = standard_frame(t.descriptor(), t.domain_rank())?;
            json!({ "estimate": estimate_value(&pi2_frame(t, &frame)?) })
        }
        Task::Pi2Estimate => {
            let n = sc.n.expect("n resolved");
            summing_value(&pi2_estimate(sc.operator(0), n, budget, seed)?)
        }
        Task::Pi1 => {
            let n = sc.n.expect("n resolved");
            summing_value(&pi1(sc.operator(0), sc.mode, n, budget, seed)?)
        }
        Task::TriangleDecomposition => {
            let a = sc.vector(0).entry(0);
            let b = sc.vector(1).entry(0);
            let (u, v) = triangle_decomposition(a, b, sc.triangle_eps)?;
            json!({
                "margin_verified": true,
                "u": element_value(&u),
                "v": element_value(&v),
            })
        }
        Task::PiAdjointSymmetryCheck => {
            let n = sc.n.expect("n resolved");
            let r = pi_adjoint_symmetry_check(sc.operator(0), n, budget, seed)?;
            json!({
                "mode": match r.mode {
                    CheckMode::Exact => "exact",
                    CheckMode::Statistical => "statistical",
                },
                "pass": r.pass,
                "pi1_backward": real(r.pi1_backward),
                "pi1_forward": real(r.pi1_forward),
                "pi2_backward": real(r.pi2_backward),
                "pi2_forward": real(r.pi2_forward),
                "tolerance": real(r.tolerance),
            })
        }
        Task::FrameVerify => {
            let trials = sc.n.expect("n resolved");
            let frame = Frame::new(sc.vector_tuple())?;
            let (lower, upper) = frame_verify(&frame, trials, seed)?;
            json!({
                "is_normalized_tight": frame.is_normalized_tight(),
                "lower": real(lower),
                "upper": real(upper),
            })
        }
    };
    Ok(Value::Array(vec![result]))
}

// ---------------------------------------------------------------------------
// Verify reports
// ---------------------------------------------------------------------------

fn check_value(c: &Check<f64>) -> Value {
    let mut m = Map::new();
    m.insert("cases".into(), json!(c.cases));
    m.insert("id".into(), json!(c.id));
    m.insert(
        "note".into(),
        c.note.as_deref().map(|n| json!(n)).unwrap_or(Value::Null),
    );
    m.insert("residual".into(), real(c.residual));
    m.insert(
        "status".into(),
        json!(match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Warn => "warn",
            CheckStatus::Fail => "fail",
        }),
    );
    m.insert("tolerance".into(), real(c.tolerance));
    Value::Object(m)
}

pub fn verify_value(rep: &VerifyReport<f64>) -> Value {
    json!({
        "budget_scale": rep.budget_scale,
        "checks": rep.checks.iter().map(check_value).collect::<Vec<_>>(),
        "pass": rep.pass,
        "seed": rep.seed,
        "suite": rep.suite.name(),
    })
}
