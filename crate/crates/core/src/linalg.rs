//! One-sided Jacobi SVD for complex matrices.
//!
//! The translate systems of the recovery pipeline carry singular values
//! spanning hundreds of orders of magnitude (Gaussian tails), where shifted
//! QR iterations can stagnate. One-sided Jacobi runs a fixed sweep budget,
//! terminates unconditionally, and computes the small singular values of
//! strongly graded matrices to high relative accuracy.

use nalgebra::{DMatrix, DVector};

use crate::Complex64;

/// Factorization `a ≈ u · diag(sigma) · vᴴ` with `min(m, n)` columns in
/// `u` (m×k) and `v` (n×k), `sigma` descending.
pub struct Svd {
    pub u: DMatrix<Complex64>,
    pub sigma: DVector<f64>,
    pub v: DMatrix<Complex64>,
}

const MAX_SWEEPS: usize = 60;

/// One-sided Jacobi (Hestenes) SVD. Columns of the taller side are
/// orthogonalized by complex plane rotations until all pairwise inner
/// products are at rounding level or the sweep budget is exhausted.
pub fn svd_jacobi(a: &DMatrix<Complex64>) -> Svd {
    if a.nrows() >= a.ncols() {
        svd_tall(a.clone())
    } else {
        // A = U Σ Vᴴ  <=>  Aᴴ = V Σ Uᴴ
        let t = svd_tall(a.adjoint());
        Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    }
}

fn svd_tall(mut b: DMatrix<Complex64>) -> Svd {
    let n = b.ncols();
    let m = b.nrows();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let eps = f64::EPSILON;

    // cached squared column norms, updated analytically after each rotation
    let mut colsq: Vec<f64> = (0..n)
        .map(|j| b.column(j).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let global = colsq.iter().cloned().fold(0.0, f64::max);
    // columns this far below the leader only carry singular values beneath
    // any usable truncation threshold; orthogonalizing a pair of them would
    // churn forever on rounding noise
    let dead = global * 1e-32;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let app = colsq[p];
                let aqq = colsq[q];
                if app.max(aqq) <= dead {
                    continue;
                }
                let mut apq = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    apq += b[(r, p)].conj() * b[(r, q)];
                }
                let w = apq.norm();
                if w <= eps * (app * aqq).sqrt() || w == 0.0 {
                    continue;
                }
                rotated = true;
                // phase the pair real, then a classical real Jacobi rotation
                let phase = apq / w;
                let tau = (aqq - app) / (2.0 * w);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // unitary pair rotation J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let sp = s * phase.conj();
                let cp = c * phase.conj();
                for r in 0..m {
                    let bp = b[(r, p)];
                    let bq = b[(r, q)];
                    b[(r, p)] = c * bp - sp * bq;
                    b[(r, q)] = s * bp + cp * bq;
                }
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, q)];
                    v[(r, p)] = c * vp - sp * vq;
                    v[(r, q)] = s * vp + cp * vq;
                }
                colsq[p] = c * c * app + s * s * aqq - 2.0 * c * s * w;
                colsq[q] = s * s * app + c * c * aqq + 2.0 * c * s * w;
            }
        }
        if !rotated {
            break;
        }
    }

    // column norms are the singular values; sort descending
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| b.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let m = b.nrows();
    let mut u = DMatrix::<Complex64>::zeros(m, n);
    let mut vv = DMatrix::<Complex64>::zeros(n, n);
    let mut sigma = DVector::<f64>::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        sigma[dst] = norms[src];
        if norms[src] > 0.0 {
            for r in 0..m {
                u[(r, dst)] = b[(r, src)] / norms[src];
            }
        }
        for r in 0..n {
            vv[(r, dst)] = v[(r, src)];
        }
    }
    Svd { u, sigma, v: vv }
}

/// Minimum-norm truncated solve of `a x = b`: singular values at or below
/// `rel_tol · sigma_max` are dropped. Returns the solution and the relative
/// residual `‖a x - b‖ / ‖b‖` (zero for `b = 0`). `None` when the matrix
/// has no nonzero singular value.
pub fn min_norm_solve(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    rel_tol: f64,
) -> Option<(DVector<Complex64>, f64)> {
    let svd = svd_jacobi(a);
    let smax = svd.sigma[0];
    if !(smax > 0.0) {
        return None;
    }
    let mut y = svd.u.adjoint() * b;
    for i in 0..y.len() {
        let s = svd.sigma[i];
        y[i] = if s > rel_tol * smax {
            y[i] / Complex64::new(s, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let x = &svd.v * y;
    let bnorm = b.norm();
    let residual = if bnorm > 0.0 {
        (a * &x - b).norm() / bnorm
    } else {
        0.0
    };
    Some((x, residual))
}
