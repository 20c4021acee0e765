//! Acceptance battery: ten numbered end-to-end criteria, one test per
//! criterion, so the harness prints one pass/fail line for each.
//!
//! Closed-form values are checked against oracles built only from
//! nalgebra's *real* SVD/eigendecomposition through the real embedding
//! `z ↦ [[Re, −Im], [Im, Re]]` (singular values and eigenvalues come out
//! doubled), so no library kernel verifies itself. Search-based estimates
//! are held to the soundness-plus-attainment contract with the stated
//! slack. Criterion 9 asserts the full summing battery is green; the
//! rank-one product identity it contains only holds on the scalar algebra,
//! so that test documents the defect and is expected to stay red — the
//! corrected identity is verified green in the same suite.

use std::process::Command;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde_json::Value;

use cstarmod::algebra::{alg_abs, alg_sample, AlgebraDescriptor, AlgebraElement, SampleKind};
use cstarmod::module::{
    compose, op_norm, polar_decompose, polar_power_identity_check, sample_operator,
    sample_vector, theta,
};
use cstarmod::powernorm::{
    amplification_norm, axiom_check, mu_star, mu_star_combination_sup, CheckMode, PowerNormKind,
    PowerNormTag,
};
use cstarmod::search::SearchBudget;
use cstarmod::summing::{pi1, pi2_estimate, pi2_frame, standard_frame, Pi1Mode};
use cstarmod::verify::{run_suite, CheckStatus, Suite};
use cstarmod::{Operator, Vector};

type CMat = DMatrix<Complex<f64>>;

const DESCRIPTORS: &[&[usize]] = &[&[1], &[2], &[1, 1], &[1, 1, 1], &[2, 1]];

fn desc(sizes: &[usize]) -> AlgebraDescriptor {
    AlgebraDescriptor::new(sizes.to_vec()).unwrap()
}

// ---------------------------------------------------------------------------
// Oracles (real embedding + nalgebra real factorizations only)
// ---------------------------------------------------------------------------

/// `[[Re, −Im], [Im, Re]]`: a real matrix with the same singular values as
/// the complex one, each taken twice; Hermitian inputs embed to symmetric
/// matrices with doubled eigenvalues.
fn real_embedding(m: &CMat) -> DMatrix<f64> {
    let (p, q) = m.shape();
    DMatrix::from_fn(2 * p, 2 * q, |r, c| {
        let z = m[(r % p, c % q)];
        match (r < p, c < q) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn sigma_max_oracle(m: &CMat) -> f64 {
    real_embedding(m).singular_values().max()
}

fn trace_norm_oracle(m: &CMat) -> f64 {
    real_embedding(m).singular_values().iter().sum::<f64>() / 2.0
}

fn frobenius_oracle(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn min_eig_oracle(h: &CMat) -> f64 {
    real_embedding(h).symmetric_eigen().eigenvalues.min()
}

/// The flattened `j`-th block of a module vector: entry blocks stacked
/// vertically into an `(m·k) × k` matrix.
fn flattened_block(x: &Vector, j: usize) -> CMat {
    let k = x.descriptor().block_sizes()[j];
    let mut out = CMat::zeros(x.rank() * k, k);
    for i in 0..x.rank() {
        out.view_mut((i * k, 0), (k, k)).copy_from(&x.entry(i).blocks()[j]);
    }
    out
}

/// The flattened `j`-th block of the combination map `(a_i) ↦ Σ x_i a_i`:
/// the tuple's flattened blocks side by side, `(m·k) × (n·k)`.
fn stacked_tuple_block(xs: &[Vector], j: usize) -> CMat {
    let k = xs[0].descriptor().block_sizes()[j];
    let mut out = CMat::zeros(xs[0].rank() * k, xs.len() * k);
    for (l, x) in xs.iter().enumerate() {
        out.view_mut((0, l * k), (x.rank() * k, k))
            .copy_from(&flattened_block(x, j));
    }
    out
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// The exact tuple norm equals the top singular value of the flattened
/// combination map, sampled combinations never exceed it, and the best of
/// 5000 admissible combinations attains at least 95% of it.
#[test]
fn criterion_01_mu_star_is_the_combination_map_norm() {
    for i in 0..200u64 {
        let d = desc(DESCRIPTORS[(i % 5) as usize]);
        let m = 1 + (i / 5) as usize % 3;
        let n = 1 + (i / 15) as usize % 4;
        let xs: Vec<Vector> = (0..n)
            .map(|l| sample_vector(&d, m, 1_001 + 97 * i + l as u64).unwrap())
            .collect();

        let value = mu_star(&xs).unwrap().value;
        let oracle = (0..d.num_blocks())
            .map(|j| sigma_max_oracle(&stacked_tuple_block(&xs, j)))
            .fold(0.0f64, f64::max);
        assert!(
            (value - oracle).abs() <= 1e-9 * (1.0 + oracle),
            "instance {i}: mu_star {value} vs flattened sigma_max {oracle}"
        );

        let sup = mu_star_combination_sup(&xs, 5000, 2_001 + i).unwrap();
        let (best, samples) = (sup.best, sup.samples);
        assert!(
            best <= value + 1e-9,
            "instance {i}: sampled combination {best} exceeds the exact value {value}"
        );
        assert!(
            best >= 0.95 * value,
            "instance {i}: best of {samples} samples {best} below 0.95 x {value}"
        );
    }
}

/// On the scalar algebra the 2-summing frame value is the Frobenius norm
/// and the exact 1-summing value is the trace norm, against entrywise
/// oracles.
#[test]
fn criterion_02_scalar_frame_formula_matches_frobenius_and_trace_norm() {
    let d = desc(&[1]);
    let budget = SearchBudget::default();
    for i in 0..200u64 {
        let m = 1 + i as usize % 3;
        let p = 1 + (i / 3) as usize % 3;
        let t: Operator = sample_operator(&d, m, p, 3_001 + i).unwrap();
        let mat = CMat::from_fn(p, m, |r, c| t.entry(r, c).coordinates().unwrap()[0]);

        let v2 = pi2_frame(&t, &standard_frame(&d, m).unwrap()).unwrap().value;
        let frob = frobenius_oracle(&mat);
        assert!(
            (v2 - frob).abs() <= 1e-10,
            "instance {i}: pi2_frame {v2} vs Frobenius {frob}"
        );

        let v1 = pi1(&t, Pi1Mode::FrameExact, 1, &budget, 0).unwrap().estimate.value;
        let trace = trace_norm_oracle(&mat);
        assert!(
            (v1 - trace).abs() <= 1e-9,
            "instance {i}: pi1 frame_exact {v1} vs trace norm {trace}"
        );
    }
}

/// On commutative algebras the certified estimate stays below the exact
/// frame value and reaches at least 90% of it at the default budget.
#[test]
fn criterion_03_commutative_pi2_estimate_brackets_the_frame_value() {
    let budget = SearchBudget::default();
    for i in 0..60u64 {
        let dim = 1 + i as usize % 3;
        let d = desc(&vec![1; dim]);
        let m = 1 + (i / 3) as usize % 3;
        let p = 1 + (i / 9) as usize % 3;
        let t: Operator = sample_operator(&d, m, p, 4_001 + i).unwrap();

        let frame_value = pi2_frame(&t, &standard_frame(&d, m).unwrap()).unwrap().value;
        let est = pi2_estimate(&t, 4, &budget, 4_501 + i).unwrap().estimate.value;
        assert!(
            est <= frame_value + 1e-9,
            "instance {i}: estimate {est} exceeds frame value {frame_value}"
        );
        assert!(
            est >= 0.90 * frame_value,
            "instance {i}: estimate {est} below 0.90 × frame value {frame_value}"
        );
    }
}

/// On the rank-one module `E = A` the 2-summing norm is the operator norm:
/// the structured singleton witness attains it exactly and no sampled
/// admissible tuple exceeds it.
#[test]
fn criterion_04_rank_one_module_pi2_equals_the_operator_norm() {
    let budget = SearchBudget::default();
    for i in 0..100u64 {
        let d = desc(DESCRIPTORS[(i % 5) as usize]);
        let t: Operator = sample_operator(&d, 1, 1, 5_001 + i).unwrap();
        let norm = op_norm(&t).unwrap();
        let est = pi2_estimate(&t, 3, &budget, 5_501 + i).unwrap().estimate.value;
        assert!(
            est >= norm - 1e-10,
            "instance {i}: structured witness reaches {est}, operator norm {norm}"
        );
        assert!(
            est <= norm + 1e-9,
            "instance {i}: a sampled tuple reached {est} above operator norm {norm}"
        );
    }
}

/// With the projection-family norm on both sides, every amplification
/// level of a bounded operator stays within [‖T‖ − 1e−9, 1.02 ‖T‖]; the 2%
/// headroom is the paired-seed estimator bias on the domain norm.
#[test]
fn criterion_05_amplification_norm_stays_near_the_operator_norm() {
    let budget = SearchBudget::default();
    let hilbert = PowerNormKind::new(PowerNormTag::HilbertCstar, budget.clone());
    for i in 0..50u64 {
        let d = desc(DESCRIPTORS[(i % 5) as usize]);
        let m = 1 + (i / 5) as usize % 2;
        let p = 1 + (i / 10) as usize % 2;
        let t: Operator = sample_operator(&d, m, p, 6_001 + i).unwrap();
        let norm = op_norm(&t).unwrap();

        let rep = amplification_norm(&t, 3, &hilbert, &hilbert, &budget, 6_501 + i).unwrap();
        for (level, &value) in rep.sequence.iter().enumerate() {
            let level = level + 1;
            assert!(
                value >= norm - 1e-9 && value <= 1.02 * norm,
                "instance {i} level {level}: amplification value {value} strays \
                 from operator norm {norm}"
            );
        }
    }
}

/// Every power-norm axiom battery passes: closed-form kinds exactly
/// (1e−10), the projection-family norm statistically (paired seeds, 1%),
/// 100 instances each.
#[test]
fn criterion_06_multinorm_axiom_batteries_pass() {
    let kinds = [
        PowerNormTag::Lattice,
        PowerNormTag::DualLattice,
        PowerNormTag::MuStar,
        PowerNormTag::L2Module,
        PowerNormTag::ClassicalMu2,
        PowerNormTag::HilbertCstar,
    ];
    for (k, tag) in kinds.into_iter().enumerate() {
        let kind = PowerNormKind::with_default_budget(tag);
        let report = axiom_check::<f64>(&kind, 100, 7_001 + k as u64).unwrap();
        for entry in &report.entries {
            match entry.mode {
                CheckMode::Exact => assert!(
                    entry.tolerance <= 1e-10,
                    "{} {}: exact entry with loose tolerance {}",
                    tag.name(),
                    entry.axiom,
                    entry.tolerance
                ),
                CheckMode::Statistical => assert!(
                    entry.tolerance <= 1e-2,
                    "{} {}: statistical entry with loose tolerance {}",
                    tag.name(),
                    entry.axiom,
                    entry.tolerance
                ),
            }
            assert!(
                entry.pass,
                "{} axiom {} failed: violation {} > tolerance {} over {} cases",
                tag.name(),
                entry.axiom,
                entry.max_violation,
                entry.tolerance,
                entry.cases
            );
        }
        assert!(report.pass);
    }
}

/// Polar decomposition on 200 operators (every third one rank-one, hence
/// rank-deficient): the factorization reassembles, the isometry's two
/// Gram operators are projections onto the verified ranges, and the
/// absolute-value power identities hold for α ∈ {1/2, 1, 2}.
#[test]
fn criterion_07_polar_decomposition_contracts_hold() {
    for i in 0..200u64 {
        let d = desc(DESCRIPTORS[(i % 5) as usize]);
        let m = 1 + (i / 5) as usize % 3;
        let p = 1 + (i / 15) as usize % 3;
        let t: Operator = if i % 3 == 0 {
            let y = sample_vector(&d, p, 8_001 + 2 * i).unwrap();
            let x = sample_vector(&d, m, 8_002 + 2 * i).unwrap();
            theta(&y, &x).unwrap()
        } else {
            sample_operator(&d, m, p, 8_003 + i).unwrap()
        };
        let norm = op_norm(&t).unwrap();

        let polar = polar_decompose(&t, 1e-9).unwrap();
        assert!(
            polar.roundtrip_residual <= 1e-9 * (1.0 + norm),
            "instance {i}: roundtrip residual {}",
            polar.roundtrip_residual
        );
        assert!(
            polar.range_angle <= 1e-8 && polar.corange_angle <= 1e-8,
            "instance {i}: principal angles {} / {}",
            polar.range_angle,
            polar.corange_angle
        );
        let w = &polar.isometry;
        for gram in [compose(&w.adjoint(), w).unwrap(), compose(w, &w.adjoint()).unwrap()] {
            let idem = op_norm(&compose(&gram, &gram).unwrap().sub(&gram)).unwrap();
            assert!(idem <= 1e-9, "instance {i}: Gram operator not a projection ({idem})");
        }

        for alpha in [0.5, 1.0, 2.0] {
            let rep = polar_power_identity_check(&t, alpha, 1e-9).unwrap();
            let worst = rep
                .conjugate_power_residual
                .max(rep.codomain_abs_residual)
                .max(rep.reverse_conjugate_residual)
                .max(rep.domain_abs_residual);
            assert!(
                rep.pass && worst <= 1e-9,
                "instance {i} alpha {alpha}: power identity residual {worst}"
            );
        }
    }
}

/// The two-unitary decomposition of |a + b|: on 200 pairs per descriptor
/// and ε ∈ {0, 1e−6}, both factors are unitary to 1e−10 and
/// `u*|a|u + v*|b|v + ε − |a+b|` stays PSD with margin ≥ −1e−10.
#[test]
fn criterion_08_triangle_decomposition_unitarity_and_margin() {
    for sizes in DESCRIPTORS {
        let d = desc(sizes);
        for i in 0..200u64 {
            let a = alg_sample(&d, &SampleKind::Generic, 9_001 + 2 * i).unwrap();
            let b = alg_sample(&d, &SampleKind::Generic, 9_002 + 2 * i).unwrap();
            for eps in [0.0, 1e-6] {
                let (u, v) = cstarmod::summing::triangle_decomposition(&a, &b, eps).unwrap();
                for factor in [&u, &v] {
                    for blk in factor.blocks() {
                        let k = blk.nrows();
                        let id = CMat::identity(k, k);
                        let res = (blk.adjoint() * blk - &id)
                            .norm()
                            .max((blk * blk.adjoint() - &id).norm());
                        assert!(
                            res <= 1e-10,
                            "{sizes:?} instance {i} eps {eps}: factor unitarity residual {res}"
                        );
                    }
                }
                let lhs = alg_abs(&a.add(&b)).unwrap();
                let rhs = u
                    .adjoint()
                    .mul(&alg_abs(&a).unwrap())
                    .mul(&u)
                    .add(&v.adjoint().mul(&alg_abs(&b).unwrap()).mul(&v))
                    .add(&AlgebraElement::identity(&d).scale(Complex::new(eps, 0.0)));
                let margin = rhs
                    .sub(&lhs)
                    .blocks()
                    .iter()
                    .map(min_eig_oracle)
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    margin >= -1e-10,
                    "{sizes:?} instance {i} eps {eps}: PSD margin {margin}"
                );
            }
        }
    }
}

/// The full summing-norm battery at default scale must be green.
///
/// Expected to stay red: the battery asserts the rank-one identity
/// `2-summing norm of θ_{y,x} = ‖x‖·‖y‖` on every commutative algebra, but
/// that equality only holds on the scalar algebra — the supremum the
/// definition actually attains is `‖ |x|·|y| ‖`, which is strictly smaller
/// whenever ‖x‖ and ‖y‖ peak in different blocks (and on noncommutative
/// algebras the sampled witness tops out at the same corrected value, so
/// its 0.9·‖x‖‖y‖ attainment clause fails too). The corrected identity is
/// verified green in this same suite as
/// `p2_1_corrected_abs_product_identity`.
#[test]
fn criterion_09_summing_invariant_battery_all_green() {
    let report = run_suite::<f64>(Suite::Summing, 7, 1.0).unwrap();
    let mut failed = Vec::new();
    for c in &report.checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Warn => "warn",
            CheckStatus::Fail => "FAIL",
        };
        println!(
            "{status} {} (cases {}, residual {:.3e}, tolerance {:.3e})",
            c.id, c.cases, c.residual, c.tolerance
        );
        if c.status == CheckStatus::Fail {
            failed.push(c.id.clone());
        }
    }
    assert!(
        failed.is_empty(),
        "summing battery has red checks: {failed:?} — the rank-one product \
         equality does not hold beyond the scalar algebra (see the green \
         p2_1_corrected_abs_product_identity check for the value it does attain)"
    );
}

/// Two full `verify all --seed 7` runs of the CLI produce byte-identical
/// result values; only the wall clock outside the report subtree may
/// differ.
#[test]
fn criterion_10_verify_all_reports_are_bit_identical() {
    let run_all = || {
        Command::new(env!("CARGO_BIN_EXE_cstarmod"))
            .args(["verify", "all", "--seed", "7"])
            .output()
            .expect("binary runs")
    };
    let first = run_all();
    let second = run_all();
    // The suite contains the documented red checks, so the exit code is 1;
    // determinism is about the bytes, not the verdict.
    assert_eq!(first.status.code(), Some(1));
    assert_eq!(second.status.code(), Some(1));

    let v1: Value = serde_json::from_slice(&first.stdout).unwrap();
    let v2: Value = serde_json::from_slice(&second.stdout).unwrap();
    assert_eq!(
        serde_json::to_string(&v1["report"]).unwrap(),
        serde_json::to_string(&v2["report"]).unwrap(),
        "verify all --seed 7 is not reproducible"
    );
}
