//! Summing norms of adjointable operators: the 2-summing norm `π̃₂` (sup of
//! `‖Σ|Tx_i|²‖^{1/2}` over tuples with `μ_n ≤ 1`), the 1-summing norm `π̃₁`,
//! module frames with exact bounds, the commutative frame formula, the
//! constructive triangle decomposition of `|a + b|`, and the adjoint-symmetry
//! check `π̃(T) = π̃(T*)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{alg_norm, AlgebraDescriptor, AlgebraElement};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::module::{
    apply, flatten_operator, inner_product, op_abs, polar_decompose, reconstruct_hermitian,
    sample_vector_with_rng, theta, unflatten_operator, ModuleOperator, ModuleVector,
};
use crate::powernorm::{
    alg_min_eig, l2_module_norm, mu_star, top_singular_vector, CheckMode, EstimateKind,
    NormEstimate, Witness,
};
use crate::scalar::Real;
use crate::search::{derive_seed, sphere_sample, BudgetUsed, SearchBudget};
use crate::tol;

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

/// A finite module frame `(f_i)` with its exact bounds `(C, D)`:
/// `C⟨x,x⟩ ⪯ Σ_i ⟨x,f_i⟩⟨f_i,x⟩ ⪯ D⟨x,x⟩` for all `x`, where `C` and `D`
/// are the extreme eigenvalues of the flattened frame operator
/// `S = Σ_i θ_{f_i,f_i}` (exact in finite dimensions).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T: Real> {
    descriptor: AlgebraDescriptor,
    rank: usize,
    vectors: Vec<ModuleVector<T>>,
    bounds: (T, T),
}

impl<T: Real> Frame<T> {
    /// Builds a frame and computes its bounds; errors when the lower bound
    /// is ≤ 1e−10 (the family does not generate the module).
    pub fn new(vectors: Vec<ModuleVector<T>>) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::Frame("a frame needs at least one vector".into()))?;
        let (descriptor, rank) = (first.descriptor().clone(), first.rank());
        for (i, f) in vectors.iter().enumerate() {
            if f.descriptor() != &descriptor || f.rank() != rank {
                return Err(Error::ShapeMismatch(format!(
                    "frame vector {i} lives in a different module"
                )));
            }
        }
        let mut frame = Self {
            descriptor,
            rank,
            vectors,
            bounds: (T::zero(), T::zero()),
        };
        let (c, d) = frame.exact_bounds()?;
        if c <= T::from64(1e-10) {
            return Err(Error::Frame(format!(
                "lower frame bound {:.3e} vanishes; the family is not a frame",
                c.to64()
            )));
        }
        frame.bounds = (c, d);
        Ok(frame)
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.descriptor
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vectors(&self) -> &[ModuleVector<T>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `(C, D)` as computed at construction.
    pub fn bounds(&self) -> (T, T) {
        self.bounds
    }

    /// `C = D = 1` within 1e−8.
    pub fn is_normalized_tight(&self) -> bool {
        let t = T::tol(tol::SAMPLED);
        (self.bounds.0 - T::one()).abs() <= t && (self.bounds.1 - T::one()).abs() <= t
    }

    /// The frame operator `S x = Σ_i f_i⟨f_i,x⟩` as a module operator.
    pub fn frame_operator(&self) -> Result<ModuleOperator<T>> {
        let mut s = ModuleOperator::zero(&self.descriptor, self.rank, self.rank);
        for f in &self.vectors {
            s = s.add(&theta(f, f)?);
        }
        Ok(s)
    }

    fn exact_bounds(&self) -> Result<(T, T)> {
        let s = self.frame_operator()?;
        let mut c = T::from64(f64::INFINITY);
        let mut d = T::zero();
        for b in flatten_operator(&s) {
            let (vals, _) = linalg::herm_eigen(&linalg::hermitian_part(&b))?;
            if let (Some(&hi), Some(&lo)) = (vals.first(), vals.last()) {
                if hi > d {
                    d = hi;
                }
                if lo < c {
                    c = lo;
                }
            }
        }
        Ok((c, d))
    }
}

/// The standard basis frame `(δ_1, …, δ_m)` of `E = A^m` — normalized tight
/// for every unital algebra, since `Σ_i x_i^* x_i = ⟨x,x⟩`.
pub fn standard_frame<T: Real>(descriptor: &AlgebraDescriptor, m: usize) -> Result<Frame<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("module rank must be ≥ 1".into()));
    }
    Frame::new((0..m).map(|i| ModuleVector::basis(descriptor, m, i)).collect())
}

/// Recomputes the exact bounds from the frame operator spectrum and verifies
/// the frame inequality on `trials` sampled unit vectors (PSD margins ≥
/// −1e−8). Errors when the lower bound vanishes or a sample violates the
/// inequality.
pub fn frame_verify<T: Real>(f: &Frame<T>, trials: usize, seed: u64) -> Result<(T, T)> {
    let (c, d) = f.exact_bounds()?;
    if c <= T::from64(1e-10) {
        return Err(Error::Frame(format!(
            "lower frame bound {:.3e} vanishes; the family is not a frame",
            c.to64()
        )));
    }
    let margin = -T::tol(tol::SAMPLED);
    for x in sphere_sample::<T>(f.descriptor(), f.rank(), trials, seed)? {
        let gram = inner_product(&x, &x)?;
        let mut sum = AlgebraElement::zero(f.descriptor());
        for fi in f.vectors() {
            let z = inner_product(fi, &x)?;
            sum = sum.add(&z.adjoint().mul(&z));
        }
        let lo = alg_min_eig(&sum.sub(&gram.scale(linalg::creal(c))))?;
        let hi = alg_min_eig(&gram.scale(linalg::creal(d)).sub(&sum))?;
        if lo < margin || hi < margin {
            return Err(Error::Frame(format!(
                "frame inequality violated on a sample (margins {:.3e}, {:.3e})",
                lo.to64(),
                hi.to64()
            )));
        }
    }
    Ok((c, d))
}

// ---------------------------------------------------------------------------
// π̃₂
// ---------------------------------------------------------------------------

/// How sampled tuples were made admissible for the summing suprema.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Divided by the exact `μ` value (commutative descriptors, where
    /// `μ = μ*` is a closed form).
    ExactMu,
    /// Divided by the certified upper bound `U(xs) = ‖Σ|x_i|²‖^{1/2} ≥ μ`.
    CertifiedUpperBound,
}

/// A summing-norm estimate with its admissibility bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SummingReport<T: Real> {
    pub estimate: NormEstimate<T>,
    pub admissible_tuples_used: u64,
    pub normalization: Normalization,
}

/// Exact `π̃₂(T)` through the frame formula `‖Σ_i ⟨Tf_i, Tf_i⟩‖^{1/2}`,
/// valid for commutative algebras and normalized tight frames. The value is
/// frame-independent there; the frame tuple itself is the optimal admissible
/// witness.
pub fn pi2_frame<T: Real>(t: &ModuleOperator<T>, f: &Frame<T>) -> Result<NormEstimate<T>> {
    let desc = t.descriptor();
    if !desc.is_commutative() {
        return Err(Error::NotCommutative(desc.block_sizes().to_vec()));
    }
    if f.descriptor() != desc || f.rank() != t.domain_rank() {
        return Err(Error::ShapeMismatch(
            "frame does not live on the operator's domain".into(),
        ));
    }
    if !f.is_normalized_tight() {
        let (c, d) = f.bounds();
        return Err(Error::Frame(format!(
            "frame formula needs a normalized tight frame, got bounds ({:.6}, {:.6})",
            c.to64(),
            d.to64()
        )));
    }
    let mut s = AlgebraElement::zero(desc);
    for fi in f.vectors() {
        let tf = apply(t, fi)?;
        s = s.add(&inner_product(&tf, &tf)?);
    }
    let value = alg_norm(&s)?.sqrt();
    Ok(NormEstimate {
        value,
        kind: EstimateKind::Exact,
        witness: Witness::Tuple(f.vectors().to_vec()),
        budget_used: BudgetUsed::default(),
        seed: 0,
    })
}

/// `n_max` tuple lengths of sampled-supremum estimation for `π̃₂(T)`.
///
/// Every evaluated tuple is made genuinely admissible before evaluation —
/// divided by its exact `μ` (commutative) or by the certified upper bound
/// `U(xs) ≥ μ(xs)` (noncommutative) — so the result is a sound lower bound.
/// Structured candidates: the top-singular-vector singleton (value exactly
/// `‖T‖`, the optimum on `E = A`), the previous length's best tuple extended
/// by zero (which makes the estimate monotone in `n_max`), and the standard
/// frame tuple in the commutative square case (the optimum by the frame
/// formula).
pub fn pi2_estimate<T: Real>(
    t: &ModuleOperator<T>,
    n_max: usize,
    budget: &SearchBudget,
    seed: u64,
) -> Result<SummingReport<T>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be ≥ 1".into()));
    }
    let desc = t.descriptor().clone();
    let m = t.domain_rank();
    let commutative = desc.is_commutative();
    let normalization = if commutative {
        Normalization::ExactMu
    } else {
        Normalization::CertifiedUpperBound
    };

    let admissible_scale = |xs: &[ModuleVector<T>]| -> Result<T> {
        if commutative {
            Ok(mu_star(xs)?.value)
        } else {
            Ok(l2_module_norm(xs)?.value)
        }
    };
    let objective = |xs: &[ModuleVector<T>]| -> Result<T> {
        let mut s = AlgebraElement::zero(&desc);
        for x in xs {
            let tx = apply(t, x)?;
            s = s.add(&inner_product(&tx, &tx)?);
        }
        Ok(alg_norm(&s)?.sqrt())
    };

    let mut used = 0u64;
    let mut best: Option<(T, Vec<ModuleVector<T>>)> = None;
    let mut prev_best: Option<Vec<ModuleVector<T>>> = None;
    for n in 1..=n_max {
        let mut candidates: Vec<Vec<ModuleVector<T>>> = Vec::new();
        if n == 1 {
            if let Some(x) = top_singular_vector(t)? {
                candidates.push(vec![x]);
            }
        }
        if let Some(prev) = &prev_best {
            let mut tup = prev.clone();
            tup.resize(n, ModuleVector::zero(&desc, m));
            candidates.push(tup);
        }
        if commutative && n == m {
            candidates.push((0..m).map(|i| ModuleVector::basis(&desc, m, i)).collect());
        }
        for c in 0..budget.samples {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, n as u64, c as u64));
            let tup: Vec<ModuleVector<T>> = (0..n)
                .map(|_| sample_vector_with_rng(&desc, m, &mut rng))
                .collect::<Result<_>>()?;
            candidates.push(tup);
        }

        let mut level_best: Option<(T, Vec<ModuleVector<T>>)> = None;
        for tup in candidates {
            let scale = admissible_scale(&tup)?;
            if scale <= T::from64(1e-10) {
                continue;
            }
            let inv = linalg::creal(T::one() / scale);
            let scaled: Vec<ModuleVector<T>> = tup.iter().map(|x| x.scale(inv)).collect();
            let v = objective(&scaled)?;
            used += 1;
            if level_best.as_ref().is_none_or(|(b, _)| v > *b) {
                level_best = Some((v, scaled));
            }
        }
        if let Some((v, tup)) = level_best {
            prev_best = Some(tup.clone());
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, tup));
            }
        }
    }
    let (value, tuple) = best
        .ok_or_else(|| Error::Verification("no admissible tuple could be formed".into()))?;
    Ok(SummingReport {
        estimate: NormEstimate {
            value,
            kind: EstimateKind::LowerBound,
            witness: Witness::Tuple(tuple),
            budget_used: BudgetUsed {
                samples: used,
                restarts: n_max as u64,
            },
            seed,
        },
        admissible_tuples_used: used,
        normalization,
    })
}

// ---------------------------------------------------------------------------
// π̃₁
// ---------------------------------------------------------------------------

/// Evaluation strategy for `π̃₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pi1Mode {
    /// `‖Σ_i ⟨|T|δ_i, δ_i⟩‖` over the standard frame — exact, commutative
    /// descriptors only.
    FrameExact,
    /// `π̃₂(|T|^{1/2})²` estimated by sampled admissible tuples; sound lower
    /// bound on any descriptor.
    Estimate,
}

/// `|T|^{1/2} = (T^*T)^{1/4}` on the domain module.
fn op_abs_sqrt<T: Real>(t: &ModuleOperator<T>) -> Result<ModuleOperator<T>> {
    let blocks = flatten_operator(t)
        .iter()
        .map(|b| {
            let (_, sigma, v) = linalg::svd_parts(b)?;
            Ok(reconstruct_hermitian(&v, &sigma, |s| s.sqrt()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(unflatten_operator(
        t.descriptor(),
        t.domain_rank(),
        t.domain_rank(),
        &blocks,
    ))
}

/// The 1-summing norm `π̃₁(T) = π̃₂(|T|^{1/2})²`, either through the exact
/// frame formula (commutative) or as a sampled lower bound via Eq-style
/// admissible tuples (`‖Σ⟨|T|x_i,x_i⟩‖ = ‖Σ|  |T|^{1/2}x_i |²‖`).
pub fn pi1<T: Real>(
    t: &ModuleOperator<T>,
    mode: Pi1Mode,
    n_max: usize,
    budget: &SearchBudget,
    seed: u64,
) -> Result<SummingReport<T>> {
    match mode {
        Pi1Mode::FrameExact => {
            let desc = t.descriptor();
            if !desc.is_commutative() {
                return Err(Error::NotCommutative(desc.block_sizes().to_vec()));
            }
            let m = t.domain_rank();
            let abs = op_abs(t)?;
            let mut s = AlgebraElement::zero(desc);
            let basis: Vec<ModuleVector<T>> =
                (0..m).map(|i| ModuleVector::basis(desc, m, i)).collect();
            for d in &basis {
                s = s.add(&inner_product(&apply(&abs, d)?, d)?);
            }
            let value = alg_norm(&s)?;
            Ok(SummingReport {
                estimate: NormEstimate {
                    value,
                    kind: EstimateKind::Exact,
                    witness: Witness::Tuple(basis),
                    budget_used: BudgetUsed::default(),
                    seed,
                },
                admissible_tuples_used: 1,
                normalization: Normalization::ExactMu,
            })
        }
        Pi1Mode::Estimate => {
            let half = op_abs_sqrt(t)?;
            let rep = pi2_estimate(&half, n_max, budget, seed)?;
            let value = rep.estimate.value * rep.estimate.value;
            Ok(SummingReport {
                estimate: NormEstimate {
                    value,
                    kind: EstimateKind::LowerBound,
                    witness: rep.estimate.witness,
                    budget_used: rep.estimate.budget_used,
                    seed,
                },
                admissible_tuples_used: rep.admissible_tuples_used,
                normalization: rep.normalization,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Triangle decomposition
// ---------------------------------------------------------------------------

/// Unitaries `(u, v)` with `|a + b| ⪯ u^*|a|u + v^*|b|v + ε·1`, built per
/// algebra block: polar `a + b = w|a + b|` gives
/// `|a + b| = Re(w^*a) + Re(w^*b)`, and each Hermitian part is dominated by
/// the conjugate of the corresponding absolute value because its descending
/// eigenvalues are dominated by the singular values (so `u` maps the
/// eigenbasis of `|a|` onto the eigenbasis of `Re(w^*a)`, both sorted
/// descending). The inequality is verified at tolerance 1e−9 before
/// returning; a failure is a bug signal.
pub fn triangle_decomposition<T: Real>(
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
    eps: T,
) -> Result<(AlgebraElement<T>, AlgebraElement<T>)> {
    if a.descriptor() != b.descriptor() {
        return Err(Error::ShapeMismatch(
            "decomposing elements of different algebras".into(),
        ));
    }
    if eps < T::zero() {
        return Err(Error::InvalidArgument("eps must be ≥ 0".into()));
    }
    let desc = a.descriptor().clone();

    let conjugator = |w: &CMat<T>, x: &CMat<T>| -> Result<CMat<T>> {
        // Unitary q with q^*|x|q ⪰ Re(w^H x): descending eigenbasis of |x|
        // mapped onto the descending eigenbasis of the Hermitian part.
        let (_, _, vx) = linalg::svd_parts(x)?;
        let re = linalg::hermitian_part(&(w.adjoint() * x));
        let (_, qx) = linalg::herm_eigen(&re)?;
        Ok(vx * qx.adjoint())
    };

    let mut u_blocks = Vec::with_capacity(desc.num_blocks());
    let mut v_blocks = Vec::with_capacity(desc.num_blocks());
    for (ba, bb) in a.blocks().iter().zip(b.blocks()) {
        let s = ba + bb;
        let (us, _, vs) = linalg::svd_parts(&s)?;
        let w = us * vs.adjoint();
        u_blocks.push(conjugator(&w, ba)?);
        v_blocks.push(conjugator(&w, bb)?);
    }
    let u = AlgebraElement::from_blocks(desc.clone(), u_blocks)?;
    let v = AlgebraElement::from_blocks(desc.clone(), v_blocks)?;

    let lhs = crate::algebra::alg_abs(&a.add(b))?;
    let abs_a = crate::algebra::alg_abs(a)?;
    let abs_b = crate::algebra::alg_abs(b)?;
    let rhs = u
        .adjoint()
        .mul(&abs_a)
        .mul(&u)
        .add(&v.adjoint().mul(&abs_b).mul(&v))
        .add(&AlgebraElement::identity(&desc).scale(linalg::creal(eps)));
    let margin = alg_min_eig(&rhs.sub(&lhs))?;
    if margin < -T::tol(tol::EXACT) {
        return Err(Error::CheckFailed(format!(
            "triangle decomposition margin {:.3e} below -1e-9",
            margin.to64()
        )));
    }
    Ok((u, v))
}

// ---------------------------------------------------------------------------
// Adjoint symmetry
// ---------------------------------------------------------------------------

/// Outcome of comparing `π̃₂`/`π̃₁` of `T` against `T*`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointSymmetryReport<T: Real> {
    pub pi2_forward: T,
    pub pi2_backward: T,
    pub pi1_forward: T,
    pub pi1_backward: T,
    /// Exact (commutative frame formula, tol 1e−9) or statistical
    /// (paired-seed estimates, 2% slack).
    pub mode: CheckMode,
    pub tolerance: T,
    pub pass: bool,
}

/// Verifies `π̃₂(T) = π̃₂(T*)` and `π̃₁(T) = π̃₁(T*)`. Commutative
/// descriptors compare the exact frame values; noncommutative ones compare
/// paired-seed lower bounds and record both sides. The polar decomposition
/// of `T` is computed first (the identity rests on it; in finite dimensions
/// it always exists and is verified).
pub fn pi_adjoint_symmetry_check<T: Real>(
    t: &ModuleOperator<T>,
    n_max: usize,
    budget: &SearchBudget,
    seed: u64,
) -> Result<AdjointSymmetryReport<T>> {
    polar_decompose(t, T::tol(tol::EXACT))?;
    let adj = t.adjoint();
    let commutative = t.descriptor().is_commutative();
    let (pi2_f, pi2_b, pi1_f, pi1_b, mode, tolerance) = if commutative {
        let f_dom = standard_frame::<T>(t.descriptor(), t.domain_rank())?;
        let f_cod = standard_frame::<T>(t.descriptor(), t.codomain_rank())?;
        (
            pi2_frame(t, &f_dom)?.value,
            pi2_frame(&adj, &f_cod)?.value,
            pi1(t, Pi1Mode::FrameExact, n_max, budget, seed)?.estimate.value,
            pi1(&adj, Pi1Mode::FrameExact, n_max, budget, seed)?.estimate.value,
            CheckMode::Exact,
            T::tol(tol::EXACT),
        )
    } else {
        (
            pi2_estimate(t, n_max, budget, seed)?.estimate.value,
            pi2_estimate(&adj, n_max, budget, seed)?.estimate.value,
            pi1(t, Pi1Mode::Estimate, n_max, budget, seed)?.estimate.value,
            pi1(&adj, Pi1Mode::Estimate, n_max, budget, seed)?.estimate.value,
            CheckMode::Statistical,
            T::from64(2.0 * tol::PAIRED_REL),
        )
    };
    let gap = |x: T, y: T| -> T {
        let mx = x.max(y);
        match mode {
            CheckMode::Exact => (x - y).abs() / (T::one() + mx),
            CheckMode::Statistical => (x - y).abs() / (mx + T::from64(1e-9)),
        }
    };
    let pass = gap(pi2_f, pi2_b) <= tolerance && gap(pi1_f, pi1_b) <= tolerance;
    Ok(AdjointSymmetryReport {
        pi2_forward: pi2_f,
        pi2_backward: pi2_b,
        pi1_forward: pi1_f,
        pi1_backward: pi1_b,
        mode,
        tolerance,
        pass,
    })
}
