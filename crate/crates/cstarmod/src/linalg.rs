//! Internal dense kernels over `Complex<T>` shared by the algebra, module and
//! search layers. Everything here is deterministic: nalgebra's pure-Rust
//! factorizations plus explicit sorting and phase canonicalization, so equal
//! input bits give equal output bits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) type CMat<T> = DMatrix<Complex<T>>;
pub(crate) type CVec<T> = DVector<Complex<T>>;

pub(crate) fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Modulus of a complex scalar for any `RealField` base type.
pub(crate) fn cmod<T: Real>(c: Complex<T>) -> T {
    nalgebra::ComplexField::modulus(c)
}

/// Hermitian part `(m + m^H) / 2`.
pub(crate) fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    let half = creal(T::from64(0.5));
    (m + m.adjoint()) * half
}

/// `max |m_ij|` — cheap residual metric for classification checks.
pub(crate) fn max_abs<T: Real>(m: &CMat<T>) -> T {
    let mut mx = T::zero();
    for v in m.iter() {
        let a = cmod(*v);
        if a > mx {
            mx = a;
        }
    }
    mx
}

/// Largest singular value; 0 for empty matrices.
pub(crate) fn sigma_max<T: Real>(m: &CMat<T>) -> Result<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(T::zero());
    }
    Ok(svd_parts(m)?.1.first().copied().unwrap_or_else(T::zero))
}

/// Jacobi rotation parameters zeroing the off-diagonal of the 2×2 Hermitian
/// Gram piece `[[a_ii, a_ij], [conj(a_ij), a_jj]]`. Returns `(c, s, phase)`
/// for the unitary `J = [[c, s·φ], [−s·conj(φ), c]]` acting on the (i,j)
/// plane.
fn jacobi_rotation<T: Real>(aii: T, ajj: T, aij: Complex<T>) -> (T, T, Complex<T>) {
    let mag = cmod(aij);
    let phase = if mag > T::zero() { aij / creal(mag) } else { cone() };
    let tau = (ajj - aii) / (T::from64(2.0) * mag);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    (c, c * t, phase)
}

/// Thin SVD with singular values sorted in descending order; returns
/// `(u, sigma, v)` with `m = u · diag(sigma) · v^H` and orthonormal columns.
///
/// Implemented as one-sided (Hestenes) Jacobi on the columns: unconditionally
/// convergent, bit-deterministic, and accurate to machine precision even for
/// small singular values — the general-purpose bidiagonalization SVD shipped
/// by the matrix library produced non-reconstructing factors on some complex
/// inputs (see the pinned regression test), and everything in this crate
/// rests on this factorization. Cost is cubic with a modest constant, fine
/// at the flattened dimensions this library works with.
pub(crate) fn svd_parts<T: Real>(m: &CMat<T>) -> Result<(CMat<T>, Vec<T>, CMat<T>)> {
    if m.nrows() == 0 || m.ncols() == 0 {
        let mn = m.nrows().min(m.ncols());
        return Ok((
            CMat::zeros(m.nrows(), mn),
            Vec::new(),
            CMat::zeros(m.ncols(), mn),
        ));
    }
    if m.nrows() < m.ncols() {
        let (u, sigma, v) = svd_parts(&m.adjoint())?;
        return Ok((v, sigma, u));
    }
    let q = m.ncols();
    let mut a = m.clone();
    let mut v = CMat::<T>::identity(q, q);
    let thresh = T::default_epsilon() * T::from64(8.0);
    // Columns at roundoff level relative to the whole matrix carry no
    // reliable direction (they are the debris of cancellations, e.g. when a
    // rotation annihilates a duplicate column) and their mutual correlations
    // never fall below any relative threshold; treat them as zero. Rotations
    // are unitary, so no column can ever grow past the Frobenius norm.
    let tiny2 = {
        let t = a.norm() * T::default_epsilon();
        t * t
    };
    let max_sweeps = 128;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut max_rel = T::zero();
        for i in 0..q {
            for j in (i + 1)..q {
                let ci = a.column(i);
                let cj = a.column(j);
                let aii = ci.norm_squared();
                let ajj = cj.norm_squared();
                if aii <= tiny2 || ajj <= tiny2 {
                    continue;
                }
                let aij: Complex<T> = ci.dotc(&cj);
                let denom = (aii * ajj).sqrt();
                let rel = cmod(aij) / denom;
                if rel > max_rel {
                    max_rel = rel;
                }
                if rel <= thresh {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(aii, ajj, aij);
                let cs = creal(c);
                let sp = phase * creal(s);
                for r in 0..a.nrows() {
                    let x = a[(r, i)];
                    let y = a[(r, j)];
                    a[(r, i)] = x * cs - y * sp.conj();
                    a[(r, j)] = x * sp + y * cs;
                }
                for r in 0..q {
                    let x = v[(r, i)];
                    let y = v[(r, j)];
                    v[(r, i)] = x * cs - y * sp.conj();
                    v[(r, j)] = x * sp + y * cs;
                }
            }
        }
        if max_rel <= thresh {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Factorization("Jacobi SVD did not converge".into()));
    }
    // Extract singular values (column norms), sort descending.
    let mut sigma: Vec<(usize, T)> = (0..q).map(|c| (c, a.column(c).norm())).collect();
    sigma.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
    let smax = sigma.first().map(|p| p.1).unwrap_or_else(T::zero);
    let floor = T::default_epsilon() * T::from64(256.0) * smax;
    let mut u = CMat::<T>::zeros(m.nrows(), q);
    let mut vv = CMat::<T>::zeros(q, q);
    let mut svals = Vec::with_capacity(q);
    let mut normalized = 0usize;
    for (slot, &(col, s)) in sigma.iter().enumerate() {
        svals.push(s);
        vv.set_column(slot, &v.column(col));
        if s > floor {
            let scaled = a.column(col) / creal(s);
            u.set_column(slot, &scaled);
            normalized = slot + 1;
        }
    }
    // Columns whose singular value is at roundoff level carry no reliable
    // direction; fill them with a deterministic orthonormal completion so the
    // returned factor always has orthonormal columns.
    complete_orthonormal(&mut u, normalized);
    Ok((u, svals, vv))
}

/// Extends the first `valid` orthonormal columns of `m` to a full orthonormal
/// set, deterministically (Gram–Schmidt over the standard basis).
fn complete_orthonormal<T: Real>(m: &mut CMat<T>, valid: usize) {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut filled = valid;
    let mut k = 0usize;
    while filled < cols && k < rows {
        let mut w = CVec::<T>::zeros(rows);
        w[k] = cone();
        for _ in 0..2 {
            for c in 0..filled {
                let proj: Complex<T> = m.column(c).dotc(&w);
                let col = m.column(c).into_owned();
                w -= col * proj;
            }
        }
        let n = w.norm();
        if n > T::from64(0.5) {
            m.set_column(filled, &(w / creal(n)));
            filled += 1;
        }
        k += 1;
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// descending order and eigenvector phases canonicalized (the largest-modulus
/// component of each eigenvector is made real positive).
///
/// Two-sided cyclic Jacobi, for the same reliability reasons as
/// [`svd_parts`].
pub(crate) fn herm_eigen<T: Real>(m: &CMat<T>) -> Result<(Vec<T>, CMat<T>)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), m.clone()));
    }
    let q = m.nrows();
    let mut h = hermitian_part(m);
    let mut v = CMat::<T>::identity(q, q);
    let scale = max_abs(&h).max(T::default_epsilon());
    let thresh = T::default_epsilon() * T::from64(8.0) * scale;
    let max_sweeps = 128;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut max_off = T::zero();
        for i in 0..q {
            for j in (i + 1)..q {
                let hij = h[(i, j)];
                let mag = cmod(hij);
                if mag > max_off {
                    max_off = mag;
                }
                if mag <= thresh {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(h[(i, i)].re, h[(j, j)].re, hij);
                let cs = creal(c);
                let sp = phase * creal(s);
                // H ← J^H H J on the (i,j) plane.
                for r in 0..q {
                    let x = h[(r, i)];
                    let y = h[(r, j)];
                    h[(r, i)] = x * cs - y * sp.conj();
                    h[(r, j)] = x * sp + y * cs;
                }
                for col in 0..q {
                    let x = h[(i, col)];
                    let y = h[(j, col)];
                    h[(i, col)] = x * cs - y * sp;
                    h[(j, col)] = x * sp.conj() + y * cs;
                }
                for r in 0..q {
                    let x = v[(r, i)];
                    let y = v[(r, j)];
                    v[(r, i)] = x * cs - y * sp.conj();
                    v[(r, j)] = x * sp + y * cs;
                }
            }
        }
        if max_off <= thresh {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Factorization("Jacobi eigen did not converge".into()));
    }
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&a, &b| h[(b, b)].re.partial_cmp(&h[(a, a)].re).unwrap().then(a.cmp(&b)));
    let vals: Vec<T> = order.iter().map(|&i| h[(i, i)].re).collect();
    let mut vecs = CMat::from_fn(q, q, |r, c| v[(r, order[c])]);
    for c in 0..q {
        let mut best = 0usize;
        let mut mx = T::zero();
        for r in 0..q {
            let a = cmod(vecs[(r, c)]);
            if a > mx {
                mx = a;
                best = r;
            }
        }
        if mx > T::zero() {
            let phase = vecs[(best, c)] / creal(mx);
            let fix = phase.conj();
            for r in 0..q {
                vecs[(r, c)] *= fix;
            }
        }
    }
    Ok((vals, vecs))
}

/// Largest eigenvalue of a Hermitian matrix (0 for empty).
pub(crate) fn lambda_max<T: Real>(m: &CMat<T>) -> Result<T> {
    if m.nrows() == 0 {
        return Ok(T::zero());
    }
    Ok(herm_eigen(m)?.0[0])
}

/// `f(m)` for Hermitian `m` via spectral calculus. Eigenvalues below
/// `-clamp_tol` are an error when `require_positive`; small negatives are
/// clamped to zero before applying `f`.
pub(crate) fn herm_calculus<T: Real>(
    m: &CMat<T>,
    f: impl Fn(T) -> T,
    clamp_tol: T,
    require_positive: bool,
) -> Result<CMat<T>> {
    let (vals, vecs) = herm_eigen(m)?;
    if require_positive {
        if let Some(&min) = vals.last() {
            if min < -clamp_tol {
                return Err(Error::NotPositive {
                    min_eig: min.to64(),
                    tol: clamp_tol.to64(),
                });
            }
        }
    }
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let v = if v < T::zero() { T::zero() } else { v };
        let fv = f(v);
        if fv != T::zero() {
            let col = vecs.column(k);
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += col[r] * col[c].conj() * creal(fv);
                }
            }
        }
    }
    Ok(out)
}

/// Positive-semidefinite power `m^alpha` (clamping eigenvalues at 0).
pub(crate) fn psd_power<T: Real>(m: &CMat<T>, alpha: T, clamp_tol: T) -> Result<CMat<T>> {
    herm_calculus(m, |v| v.powf(alpha), clamp_tol, true)
}

/// Complex Gaussian matrix: independent standard normal real/imag parts.
pub(crate) fn gaussian_matrix<T: Real, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(T::from64(re), T::from64(im))
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian with the R-diagonal
/// phase fix that makes the factorization (and hence the distribution)
/// canonical.
pub(crate) fn haar_unitary<T: Real, R: Rng>(dim: usize, rng: &mut R) -> CMat<T> {
    let g = gaussian_matrix::<T, _>(dim, dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..dim {
        let d = r[(c, c)];
        let n = cmod(d);
        let phase = if n > T::zero() { d / creal(n) } else { cone() };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Random skew-Hermitian matrix with entries scaled by `scale`.
pub(crate) fn skew_hermitian<T: Real, R: Rng>(dim: usize, scale: T, rng: &mut R) -> CMat<T> {
    let g = gaussian_matrix::<T, _>(dim, dim, rng);
    let half = creal(T::from64(0.5) * scale);
    (&g - g.adjoint()) * half
}

/// Cayley transform `(I - X/2)^{-1} (I + X/2)`; unitary when `X` is
/// skew-Hermitian.
pub(crate) fn cayley<T: Real>(x: &CMat<T>) -> Result<CMat<T>> {
    let n = x.nrows();
    let id = CMat::identity(n, n);
    let half = creal(T::from64(0.5));
    let a = &id - x * half;
    let b = &id + x * half;
    a.lu()
        .solve(&b)
        .ok_or_else(|| Error::Factorization("Cayley solve".into()))
}

/// Orthonormal basis of the column space, keeping singular directions with
/// `sigma > rank_tol`.
pub(crate) fn range_basis<T: Real>(m: &CMat<T>, rank_tol: T) -> Result<CMat<T>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(CMat::zeros(m.nrows(), 0));
    }
    let (u, sigma, _) = svd_parts(m)?;
    let rank = sigma.iter().take_while(|&&s| s > rank_tol).count();
    Ok(u.columns(0, rank).into_owned())
}

/// Largest principal angle (radians) between the column spaces of two
/// matrices with orthonormal columns, computed through its sine
/// `‖(I − Q_aQ_a^H) Q_b‖₂` — accurate to machine precision for near-equal
/// subspaces, unlike the arccos of the overlap's singular values. Subspaces
/// of unequal dimension are maximally far apart (`pi/2`).
pub(crate) fn max_principal_angle<T: Real>(qa: &CMat<T>, qb: &CMat<T>) -> Result<T> {
    if qa.ncols() != qb.ncols() {
        return Ok(T::from64(std::f64::consts::FRAC_PI_2));
    }
    if qa.ncols() == 0 {
        return Ok(T::zero());
    }
    let residual = qb - qa * (qa.adjoint() * qb);
    let s = sigma_max(&residual)?.min(T::one());
    Ok(s.asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn svd_sorted_and_reconstructs() {
        let m = CMat::<f64>::from_row_slice(2, 3, &[
            c(1.0, 2.0),
            c(0.0, -1.0),
            c(3.0, 0.5),
            c(-2.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 1.0),
        ]);
        let (u, sigma, v) = svd_parts(&m).unwrap();
        assert!(sigma.windows(2).all(|w| w[0] >= w[1]));
        let mut rec = CMat::<f64>::zeros(2, 3);
        for k in 0..sigma.len() {
            rec += u.column(k) * v.column(k).adjoint() * creal(sigma[k]);
        }
        assert_relative_eq!(max_abs(&(&rec - &m)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn herm_eigen_sorted_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = gaussian_matrix::<f64, _>(4, 4, &mut rng);
        let h = hermitian_part(&g);
        let (vals, vecs) = herm_eigen(&h).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let gram = vecs.adjoint() * &vecs;
        assert_relative_eq!(max_abs(&(&gram - CMat::identity(4, 4))), 0.0, epsilon = 1e-10);
        let mut rec = CMat::<f64>::zeros(4, 4);
        for k in 0..4 {
            rec += vecs.column(k) * vecs.column(k).adjoint() * creal(vals[k]);
        }
        assert_relative_eq!(max_abs(&(&rec - &h)), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn sqrt_of_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1; its square root has entries
        // (sqrt(3)+1)/2 on the diagonal and (sqrt(3)-1)/2 off it.
        let m = CMat::<f64>::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let s = psd_power(&m, 0.5, 1e-10).unwrap();
        let d = (3f64.sqrt() + 1.0) / 2.0;
        let o = (3f64.sqrt() - 1.0) / 2.0;
        assert_relative_eq!(s[(0, 0)].re, d, epsilon = 1e-12);
        assert_relative_eq!(s[(0, 1)].re, o, epsilon = 1e-12);
        assert_relative_eq!(s[(1, 0)].re, o, epsilon = 1e-12);
        assert_relative_eq!(s[(1, 1)].re, d, epsilon = 1e-12);
        assert_relative_eq!(max_abs(&(&s * &s - &m)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_power_rejects_negative() {
        let m = CMat::<f64>::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(psd_power(&m, 0.5, 1e-10).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = haar_unitary::<f64, _>(5, &mut rng);
        let res = max_abs(&(u.adjoint() * &u - CMat::identity(5, 5)));
        assert!(res < 1e-10);
        let mut rng2 = ChaCha8Rng::seed_from_u64(7);
        let u2 = haar_unitary::<f64, _>(5, &mut rng2);
        assert_eq!(u, u2);
    }

    #[test]
    fn cayley_of_skew_hermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = skew_hermitian::<f64, _>(4, 0.3, &mut rng);
        let q = cayley(&x).unwrap();
        let res = max_abs(&(q.adjoint() * &q - CMat::identity(4, 4)));
        assert!(res < 1e-10);
    }

    #[test]
    fn principal_angles_detect_equal_and_orthogonal_ranges() {
        let e1 = CMat::<f64>::from_row_slice(3, 1, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e2 = CMat::<f64>::from_row_slice(3, 1, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(max_principal_angle(&e1, &e1).unwrap() < 1e-12);
        assert_relative_eq!(
            max_principal_angle(&e1, &e2).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-12
        );
        // Phase changes do not move the subspace; the sine-based formula
        // resolves this at machine precision.
        let e1_phase = &e1 * c(0.0, 1.0);
        assert!(max_principal_angle(&e1, &e1_phase).unwrap() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_across_shapes_and_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for &(rows, cols) in &[(4, 4), (6, 3), (3, 6), (8, 2), (1, 5), (5, 1), (6, 6)] {
            for _ in 0..20 {
                let mut m = gaussian_matrix::<f64, _>(rows, cols, &mut rng);
                // Half the time, force rank deficiency via a low-rank product.
                if rng.random::<bool>() {
                    let r = 1 + (rows.min(cols) / 2);
                    let a = gaussian_matrix::<f64, _>(rows, r, &mut rng);
                    let b = gaussian_matrix::<f64, _>(r, cols, &mut rng);
                    m = a * b;
                }
                let (u, sigma, v) = svd_parts(&m).unwrap();
                assert!(sigma.windows(2).all(|w| w[0] >= w[1]));
                let mn = rows.min(cols);
                assert_eq!(u.ncols(), mn);
                assert_eq!(v.ncols(), mn);
                let smax = sigma.first().copied().unwrap_or(0.0);
                let mut rec = CMat::<f64>::zeros(rows, cols);
                for k in 0..mn {
                    rec += u.column(k) * v.column(k).adjoint() * creal(sigma[k]);
                }
                assert!(max_abs(&(&rec - &m)) <= 1e-13 * (1.0 + smax));
                assert!(max_abs(&(u.adjoint() * &u - CMat::identity(mn, mn))) <= 1e-13);
                assert!(max_abs(&(v.adjoint() * &v - CMat::identity(mn, mn))) <= 1e-13);
            }
        }
    }

    #[test]
    fn herm_eigen_handles_rank_deficient_gram_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let g = gaussian_matrix::<f64, _>(6, 2, &mut rng);
            let h = &g * g.adjoint(); // rank 2 PSD 6x6
            let (vals, vecs) = herm_eigen(&h).unwrap();
            assert!(vals[2..].iter().all(|&v| v.abs() <= 1e-12 * vals[0].max(1.0)));
            let mut rec = CMat::<f64>::zeros(6, 6);
            for k in 0..6 {
                rec += vecs.column(k) * vecs.column(k).adjoint() * creal(vals[k]);
            }
            assert!(max_abs(&(&rec - &h)) <= 1e-12 * (1.0 + vals[0]));
        }
    }

    #[test]
    fn range_basis_drops_null_directions() {
        let m = CMat::<f64>::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let q = range_basis(&m, 1e-12).unwrap();
        assert_eq!(q.ncols(), 1);
    }
}
