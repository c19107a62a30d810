//! Matrix-free conjugate gradients on full-grid vectors.

use crate::scalar::{dot, Real};

pub(crate) struct CgOutcome<T> {
    pub iterations: usize,
    /// `||b - A x|| / ||b||` (recursively updated residual).
    pub residual_rel: T,
    pub converged: bool,
}

/// Solves `A x = b` for a symmetric positive (semi)definite `A`, starting from `x`.
///
/// `project` is an orthogonal projector onto the admissible subspace; it is
/// applied to the initial residual and every new residual so the iteration
/// stays in that subspace. Pass a no-op for unconstrained systems.
pub(crate) fn conjugate_gradient<T: Real>(
    apply: impl Fn(&[T], &mut [T]),
    project: impl Fn(&mut [T]),
    b: &[T],
    x: &mut [T],
    tol: T,
    max_iter: usize,
) -> CgOutcome<T> {
    let n = b.len();
    let mut r = vec![T::zero(); n];
    let mut ap = vec![T::zero(); n];
    apply(x, &mut ap);
    for i in 0..n {
        r[i] = b[i] - ap[i];
    }
    project(&mut r);
    let mut bb = b.to_vec();
    project(&mut bb);
    let b_norm = dot(&bb, &bb).sqrt();
    let b_norm = if b_norm > T::zero() { b_norm } else { T::one() };

    let mut rr = dot(&r, &r);
    let mut rel = rr.sqrt() / b_norm;
    if rel <= tol {
        return CgOutcome {
            iterations: 0,
            residual_rel: rel,
            converged: true,
        };
    }
    let mut p = r.clone();
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        project(&mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            return CgOutcome {
                iterations: it,
                residual_rel: rel,
                converged: false,
            };
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        rel = rr_new.sqrt() / b_norm;
        if rel <= tol {
            return CgOutcome {
                iterations: it,
                residual_rel: rel,
                converged: true,
            };
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    CgOutcome {
        iterations: max_iter,
        residual_rel: rel,
        converged: false,
    }
}
