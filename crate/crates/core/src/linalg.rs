//! Dense Hermitian eigensolves, regularized positive solves and a conjugate
//! gradient method over an arbitrary inner product.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Complex double.
pub type C64 = Complex64;

/// `e^{2πi t}`.
#[inline]
pub fn cis(turns: f64) -> C64 {
    let (s, c) = (std::f64::consts::TAU * turns).sin_cos();
    C64::new(c, s)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors of a
/// Hermitian matrix. Only the lower triangle is read.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Largest relative deviation from Hermitian symmetry,
/// `max |m_ij − conj(m_ji)| / max |m_ij|`.
pub fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

/// Solves `m x = b` for Hermitian positive semidefinite `m`. Cholesky is
/// tried first; if it fails the system is solved in the eigenbasis with
/// eigenvalues below `cutoff · λ_max` discarded.
pub fn solve_psd(m: &DMatrix<C64>, b: &[C64], cutoff: f64) -> Vec<C64> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    if let Some(ch) = m.clone().cholesky() {
        let x = ch.solve(&rhs);
        if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return x.iter().copied().collect();
        }
    }
    solve_truncated(m, b, cutoff)
}

/// Minimum-norm solve of `m x = b` for Hermitian positive semidefinite `m`
/// in its eigenbasis, discarding eigenvalues below `cutoff · λ_max`.
pub fn solve_truncated(m: &DMatrix<C64>, b: &[C64], cutoff: f64) -> Vec<C64> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    let (vals, vecs) = hermitian_eigen(m.clone());
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let coeffs = vecs.adjoint() * rhs;
    let mut x = nalgebra::DVector::<C64>::zeros(m.nrows());
    for (k, &lam) in vals.iter().enumerate() {
        if lam > cutoff * top && lam > 0.0 {
            x += vecs.column(k) * (coeffs[k] / lam);
        }
    }
    x.iter().copied().collect()
}

/// Outcome of [`conjugate_gradient`].
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    /// Final relative residual `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
    pub converged: bool,
    /// Relative residual after each iteration, starting with iteration 0.
    pub history: Vec<f64>,
}

/// Conjugate gradients for an operator that is self-adjoint and positive
/// definite with respect to `inner`. Starts from zero and stops once the
/// relative residual drops to `tol`; the best iterate is returned either way.
pub fn conjugate_gradient<A, I>(apply: A, b: &[C64], inner: I, tol: f64, max_iter: usize) -> CgOutcome
where
    A: Fn(&[C64]) -> Vec<C64>,
    I: Fn(&[C64], &[C64]) -> C64,
{
    let n = b.len();
    let bnorm = inner(b, b).re.max(0.0).sqrt();
    let mut x = vec![C64::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return CgOutcome { x, iterations: 0, residual: 0.0, converged: true, history: vec![0.0] };
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = inner(&r, &r).re;
    let mut history = vec![1.0];
    let mut best = (1.0, x.clone());
    let mut iterations = 0;
    while iterations < max_iter {
        let rel = rr.max(0.0).sqrt() / bnorm;
        if rel <= tol {
            break;
        }
        let ap = apply(&p);
        let pap = inner(&p, &ap).re;
        if !(pap > 0.0) {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let rr_new = inner(&r, &r).re;
        iterations += 1;
        let rel = rr_new.max(0.0).sqrt() / bnorm;
        history.push(rel);
        if rel < best.0 {
            best = (rel, x.clone());
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + p[i] * beta;
        }
    }
    let (residual, x) = best;
    CgOutcome { x, iterations, residual, converged: residual <= tol, history }
}

/// Euclidean inner product `Σ a_i conj(b_i)`.
pub fn dot_c(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Euclidean norm of a complex vector.
pub fn norm_c(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert_like(n: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |i, j| {
            C64::new(1.0 / (1.0 + i as f64 + j as f64), 0.1 * (i as f64 - j as f64))
        }) + DMatrix::identity(n, n) * C64::new(n as f64, 0.0)
    }

    #[test]
    fn cis_is_unit_circle() {
        assert!((cis(0.25) - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((cis(0.5) + C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let m = hilbert_like(6);
        assert!(hermitian_defect(&m) < 1e-15);
        let (vals, vecs) = hermitian_eigen(m.clone());
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(6, vals.iter().map(|&v| C64::new(v, 0.0))));
        let back = &vecs * d * vecs.adjoint();
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn cg_matches_direct_solve() {
        let m = hilbert_like(8);
        let b: Vec<C64> = (0..8).map(|k| C64::new(k as f64, 1.0)).collect();
        let direct = solve_psd(&m, &b, 1e-12);
        let out = conjugate_gradient(
            |v| (&m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect(),
            &b,
            dot_c,
            1e-13,
            100,
        );
        assert!(out.converged);
        let err: f64 = out.x.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn cg_zero_rhs_is_immediate() {
        let out = conjugate_gradient(|v| v.to_vec(), &[C64::new(0.0, 0.0); 3], dot_c, 1e-10, 10);
        assert_eq!(out.iterations, 0);
        assert!(out.converged);
    }

    #[test]
    fn truncated_solve_handles_singular_matrix() {
        let u = nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let m = &u * u.adjoint();
        let x = solve_psd(&m, &[C64::new(2.0, 0.0), C64::new(0.0, 2.0)], 1e-10);
        let mx = &m * nalgebra::DVector::from_vec(x);
        assert!((mx[0] - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert!((mx[1] - C64::new(0.0, 2.0)).norm() < 1e-12);
    }
}
