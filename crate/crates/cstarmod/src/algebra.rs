//! Finite-dimensional C*-algebras `A = M_{k_1}(C) ⊕ … ⊕ M_{k_r}(C)`:
//! block-matrix elements, the C*-norm, functional calculus (square roots,
//! absolute values), the positivity order, and classification flags.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scalar::Real;
use crate::tol;

/// Shape of a finite-dimensional C*-algebra: an ordered list of matrix block
/// sizes `(k_1, …, k_r)` describing `A = M_{k_1}(C) ⊕ … ⊕ M_{k_r}(C)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraDescriptor {
    block_sizes: Vec<usize>,
}

impl AlgebraDescriptor {
    /// A descriptor must have at least one block and no zero-sized blocks.
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidDescriptor("no blocks".into()));
        }
        if block_sizes.iter().any(|&k| k == 0) {
            return Err(Error::InvalidDescriptor(format!(
                "zero block size in {block_sizes:?}"
            )));
        }
        Ok(Self { block_sizes })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// The algebra is commutative iff every block is 1×1.
    pub fn is_commutative(&self) -> bool {
        self.block_sizes.iter().all(|&k| k == 1)
    }

    /// Complex dimension `Σ k_j²`.
    pub fn total_dim(&self) -> usize {
        self.block_sizes.iter().map(|&k| k * k).sum()
    }

    /// Sum of block sizes `Σ k_j` (the dimension of the diagonal, used by
    /// flattening-based size heuristics).
    pub fn total_block_size(&self) -> usize {
        self.block_sizes.iter().sum()
    }
}

/// Element of a finite-dimensional C*-algebra: one complex `k_j × k_j` matrix
/// per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<T: Real> {
    descriptor: AlgebraDescriptor,
    blocks: Vec<CMat<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn from_blocks(descriptor: AlgebraDescriptor, blocks: Vec<DMatrix<Complex<T>>>) -> Result<Self> {
        if blocks.len() != descriptor.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                descriptor.num_blocks(),
                blocks.len()
            )));
        }
        for (j, (b, &k)) in blocks.iter().zip(descriptor.block_sizes()).enumerate() {
            if b.nrows() != k || b.ncols() != k {
                return Err(Error::ShapeMismatch(format!(
                    "block {j} is {}x{}, expected {k}x{k}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { descriptor, blocks })
    }

    pub fn zero(descriptor: &AlgebraDescriptor) -> Self {
        let blocks = descriptor
            .block_sizes()
            .iter()
            .map(|&k| CMat::zeros(k, k))
            .collect();
        Self {
            descriptor: descriptor.clone(),
            blocks,
        }
    }

    pub fn identity(descriptor: &AlgebraDescriptor) -> Self {
        let blocks = descriptor
            .block_sizes()
            .iter()
            .map(|&k| CMat::identity(k, k))
            .collect();
        Self {
            descriptor: descriptor.clone(),
            blocks,
        }
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.descriptor
    }

    pub fn blocks(&self) -> &[DMatrix<Complex<T>>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &DMatrix<Complex<T>> {
        &self.blocks[j]
    }

    fn assert_same_algebra(&self, other: &Self) {
        assert_eq!(
            self.descriptor, other.descriptor,
            "algebra elements from different algebras"
        );
    }

    /// Blockwise sum. Panics on descriptor mismatch (programming error; the
    /// validated entry points are the checked operations and the CLI layer).
    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_algebra(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            descriptor: self.descriptor.clone(),
            blocks,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_algebra(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            descriptor: self.descriptor.clone(),
            blocks,
        }
    }

    /// Blockwise product (the algebra multiplication). Panics on mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_algebra(other);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Self {
            descriptor: self.descriptor.clone(),
            blocks,
        }
    }

    /// The involution `a ↦ a*` (blockwise conjugate transpose).
    pub fn adjoint(&self) -> Self {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        Self {
            descriptor: self.descriptor.clone(),
            blocks,
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let blocks = self.blocks.iter().map(|b| b * c).collect();
        Self {
            descriptor: self.descriptor.clone(),
            blocks,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex::new(-T::one(), T::zero()))
    }

    pub fn is_zero(&self, tol: T) -> bool {
        self.blocks.iter().all(|b| linalg::max_abs(b) <= tol)
    }

    /// For commutative descriptors: the diagonal coordinates as plain complex
    /// scalars, block by block.
    pub fn coordinates(&self) -> Result<Vec<Complex<T>>> {
        if !self.descriptor.is_commutative() {
            return Err(Error::NotCommutative(self.descriptor.block_sizes().to_vec()));
        }
        Ok(self.blocks.iter().map(|b| b[(0, 0)]).collect())
    }

    /// Inverse conversion: a commutative element from its coordinates.
    pub fn from_coordinates(descriptor: &AlgebraDescriptor, coords: &[Complex<T>]) -> Result<Self> {
        if !descriptor.is_commutative() {
            return Err(Error::NotCommutative(descriptor.block_sizes().to_vec()));
        }
        if coords.len() != descriptor.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates, got {}",
                descriptor.num_blocks(),
                coords.len()
            )));
        }
        let blocks = coords
            .iter()
            .map(|&c| CMat::from_element(1, 1, c))
            .collect();
        Ok(Self {
            descriptor: descriptor.clone(),
            blocks,
        })
    }
}

/// C*-norm: the maximum over blocks of the largest singular value.
pub fn alg_norm<T: Real>(a: &AlgebraElement<T>) -> Result<T> {
    let mut mx = T::zero();
    for b in &a.blocks {
        let s = linalg::sigma_max(b)?;
        if s > mx {
            mx = s;
        }
    }
    Ok(mx)
}

fn hermitian_residual<T: Real>(a: &AlgebraElement<T>) -> Result<T> {
    alg_norm(&a.sub(&a.adjoint()))
}

/// PSD square root of a Hermitian element, clipping eigenvalues in
/// `[-tol_psd, 0)` to zero. Errors on non-Hermitian input or an eigenvalue
/// below `-tol_psd`.
pub fn alg_sqrt_psd<T: Real>(a: &AlgebraElement<T>, tol_psd: T) -> Result<AlgebraElement<T>> {
    let herm_res = hermitian_residual(a)?;
    if herm_res > tol_psd.max(T::tol(tol::CLASSIFY)) {
        return Err(Error::NotHermitian {
            residual: herm_res.to64(),
            tol: tol_psd.to64(),
        });
    }
    let blocks = a
        .blocks
        .iter()
        .map(|b| linalg::psd_power(b, T::from64(0.5), tol_psd))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgebraElement {
        descriptor: a.descriptor.clone(),
        blocks,
    })
}

/// Default eigenvalue-clipping tolerance `1e-10 * (1 + ‖a‖)`.
pub fn default_psd_tol<T: Real>(a: &AlgebraElement<T>) -> Result<T> {
    Ok(T::tol(tol::STRICT) * (T::one() + alg_norm(a)?))
}

/// Absolute value `|a| = (a*·a)^{1/2}`.
pub fn alg_abs<T: Real>(a: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
    let aa = a.adjoint().mul(a);
    let tol_psd = default_psd_tol(&aa)?;
    alg_sqrt_psd(&aa, tol_psd)
}

/// Hermitian order check: `a ≤ b` iff the minimum eigenvalue of `b − a` is
/// `≥ -tol` on every block. Errors when either input is not Hermitian.
pub fn alg_leq<T: Real>(a: &AlgebraElement<T>, b: &AlgebraElement<T>, tol: T) -> Result<bool> {
    if a.descriptor != b.descriptor {
        return Err(Error::ShapeMismatch(
            "ordering elements of different algebras".into(),
        ));
    }
    let herm_tol = T::tol(tol::CLASSIFY);
    for e in [a, b] {
        let res = hermitian_residual(e)?;
        if res > herm_tol {
            return Err(Error::NotHermitian {
                residual: res.to64(),
                tol: herm_tol.to64(),
            });
        }
    }
    let diff = b.sub(a);
    for blk in &diff.blocks {
        let (vals, _) = linalg::herm_eigen(blk)?;
        if let Some(&min) = vals.last() {
            if min < -tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Classification flags; each is set iff its defining identity holds within
/// `tol` in the C*-norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    pub hermitian: bool,
    pub positive: bool,
    pub projection: bool,
    pub unitary: bool,
    pub partial_isometry: bool,
}

impl Classification {
    pub fn flags(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.hermitian {
            out.push("hermitian");
        }
        if self.positive {
            out.push("positive");
        }
        if self.projection {
            out.push("projection");
        }
        if self.unitary {
            out.push("unitary");
        }
        if self.partial_isometry {
            out.push("partial_isometry");
        }
        out
    }
}

pub fn alg_classify<T: Real>(a: &AlgebraElement<T>, tol: T) -> Result<Classification> {
    let herm = hermitian_residual(a)? <= tol;
    let mut positive = herm;
    if herm {
        'blocks: for blk in &a.blocks {
            let (vals, _) = linalg::herm_eigen(blk)?;
            if let Some(&min) = vals.last() {
                if min < -tol {
                    positive = false;
                    break 'blocks;
                }
            }
        }
    }
    let projection = herm && alg_norm(&a.mul(a).sub(a))? <= tol;
    let id = AlgebraElement::identity(&a.descriptor);
    let astar_a = a.adjoint().mul(a);
    let a_astar = a.mul(&a.adjoint());
    let unitary =
        alg_norm(&astar_a.sub(&id))? <= tol && alg_norm(&a_astar.sub(&id))? <= tol;
    // a*a is Hermitian by construction; a partial isometry needs it to be
    // idempotent.
    let partial_isometry = alg_norm(&astar_a.mul(&astar_a).sub(&astar_a))? <= tol;
    Ok(Classification {
        hermitian: herm,
        positive,
        projection,
        unitary,
        partial_isometry,
    })
}

/// What to sample in [`alg_sample`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleKind {
    Generic,
    Hermitian,
    Positive,
    Unitary,
    /// One target rank per block (entries may be 0 or the full block size).
    Projection(Vec<usize>),
}

/// Deterministic sampling: equal `(descriptor, kind, seed)` gives bit-equal
/// elements. Unitaries are Haar-style (QR of a Gaussian with phase fix);
/// projections conjugate a diagonal 0/1 pattern by such a unitary.
pub fn alg_sample<T: Real>(
    descriptor: &AlgebraDescriptor,
    kind: &SampleKind,
    seed: u64,
) -> Result<AlgebraElement<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    alg_sample_with_rng(descriptor, kind, &mut rng)
}

/// Sampling from a caller-owned stream, so composite samplers (module
/// vectors, operators) stay deterministic off a single seed.
pub(crate) fn alg_sample_with_rng<T: Real, R: rand::Rng>(
    descriptor: &AlgebraDescriptor,
    kind: &SampleKind,
    rng: &mut R,
) -> Result<AlgebraElement<T>> {
    if let SampleKind::Projection(profile) = kind {
        if profile.len() != descriptor.num_blocks() {
            return Err(Error::InvalidArgument(format!(
                "rank profile has {} entries for {} blocks",
                profile.len(),
                descriptor.num_blocks()
            )));
        }
        for (j, (&rank, &k)) in profile.iter().zip(descriptor.block_sizes()).enumerate() {
            if rank > k {
                return Err(Error::InvalidArgument(format!(
                    "rank {rank} exceeds block size {k} in block {j}"
                )));
            }
        }
    }
    let blocks = descriptor
        .block_sizes()
        .iter()
        .enumerate()
        .map(|(j, &k)| match kind {
            SampleKind::Generic => linalg::gaussian_matrix::<T, _>(k, k, rng),
            SampleKind::Hermitian => {
                linalg::hermitian_part(&linalg::gaussian_matrix::<T, _>(k, k, rng))
            }
            SampleKind::Positive => {
                let g = linalg::gaussian_matrix::<T, _>(k, k, rng);
                &g * g.adjoint()
            }
            SampleKind::Unitary => linalg::haar_unitary::<T, _>(k, rng),
            SampleKind::Projection(profile) => {
                let u = linalg::haar_unitary::<T, _>(k, rng);
                let mut d = CMat::<T>::zeros(k, k);
                for i in 0..profile[j] {
                    d[(i, i)] = linalg::cone();
                }
                &u * d * u.adjoint()
            }
        })
        .collect();
    Ok(AlgebraElement {
        descriptor: descriptor.clone(),
        blocks,
    })
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn pool() -> Vec<AlgebraDescriptor> {
        [&[1][..], &[2], &[1, 1], &[1, 1, 1], &[2, 1]]
            .iter()
            .map(|s| AlgebraDescriptor::new(s.to_vec()).unwrap())
            .collect()
    }

    fn sampled(ix: usize, seed: u64) -> AlgebraElement<f64> {
        let pool = pool();
        alg_sample(&pool[ix % pool.len()], &SampleKind::Generic, seed).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// The C*-identity `‖a*a‖ = ‖a‖²` on every block structure.
        #[test]
        fn cstar_identity_holds(ix in 0usize..5, seed in any::<u64>()) {
            let a = sampled(ix, seed);
            let n = alg_norm(&a).unwrap();
            let n2 = alg_norm(&a.adjoint().mul(&a)).unwrap();
            prop_assert!((n2 - n * n).abs() <= 1e-10 * (1.0 + n * n));
        }

        #[test]
        fn norm_is_submultiplicative(ix in 0usize..5, s1 in any::<u64>(), s2 in any::<u64>()) {
            let a = sampled(ix, s1);
            let b = sampled(ix, s2);
            let bound = alg_norm(&a).unwrap() * alg_norm(&b).unwrap();
            prop_assert!(alg_norm(&a.mul(&b)).unwrap() <= bound + 1e-10 * (1.0 + bound));
        }

        #[test]
        fn norm_satisfies_the_triangle_inequality(ix in 0usize..5, s1 in any::<u64>(), s2 in any::<u64>()) {
            let a = sampled(ix, s1);
            let b = sampled(ix, s2);
            let bound = alg_norm(&a).unwrap() + alg_norm(&b).unwrap();
            prop_assert!(alg_norm(&a.add(&b)).unwrap() <= bound + 1e-10 * (1.0 + bound));
        }

        #[test]
        fn scaling_is_absolutely_homogeneous(
            ix in 0usize..5,
            seed in any::<u64>(),
            re in -3.0f64..3.0,
            im in -3.0f64..3.0,
        ) {
            let a = sampled(ix, seed);
            let c = Complex::new(re, im);
            let scaled = alg_norm(&a.scale(c)).unwrap();
            let expect = (re * re + im * im).sqrt() * alg_norm(&a).unwrap();
            prop_assert!((scaled - expect).abs() <= 1e-10 * (1.0 + expect));
        }

        /// `|a|` is positive, has the same norm as `a`, and squares to `a*a`.
        #[test]
        fn absolute_value_contracts(ix in 0usize..5, seed in any::<u64>()) {
            let a = sampled(ix, seed);
            let abs = alg_abs(&a).unwrap();
            let zero = AlgebraElement::zero(a.descriptor());
            prop_assert!(alg_leq(&zero, &abs, 1e-10).unwrap());
            let (na, nabs) = (alg_norm(&a).unwrap(), alg_norm(&abs).unwrap());
            prop_assert!((na - nabs).abs() <= 1e-10 * (1.0 + na));
            let gap = alg_norm(&abs.mul(&abs).sub(&a.adjoint().mul(&a))).unwrap();
            prop_assert!(gap <= 1e-9 * (1.0 + na * na));
        }

        #[test]
        fn psd_square_root_squares_back(ix in 0usize..5, seed in any::<u64>()) {
            let a = sampled(ix, seed);
            let p = a.adjoint().mul(&a);
            let s = alg_sqrt_psd(&p, default_psd_tol(&p).unwrap()).unwrap();
            let gap = alg_norm(&s.mul(&s).sub(&p)).unwrap();
            prop_assert!(gap <= 1e-9 * (1.0 + alg_norm(&p).unwrap()));
        }
    }
}
