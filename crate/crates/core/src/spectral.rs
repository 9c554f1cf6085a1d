//! Largest/smallest eigenvalue computation (dense and matrix-free) and PSD
//! testing, shared by all certificate modules.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default relative tolerance for iterative eigenvalue estimates.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Dense symmetric eigensolves are used up to this dimension.
pub const DENSE_DIM_LIMIT: usize = 4096;

/// Self-adjoint linear map given by its action on vectors.
///
/// Implementations must be linear and symmetric; captured state is only read,
/// so operators can be shared across threads.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[f64], out: &mut [f64]);
}

/// Wraps a dense symmetric matrix as an operator.
pub struct DenseOp<'a>(pub &'a DMatrix<f64>);

impl LinearOperator for DenseOp<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let vv = DVector::from_column_slice(v);
        let r = self.0 * vv;
        out.copy_from_slice(r.as_slice());
    }
}

/// One converged extreme eigenpair estimate.
#[derive(Debug, Clone)]
pub struct EigEstimate {
    pub value: f64,
    pub witness: DVector<f64>,
    pub iterations: usize,
    /// `||A v - value * v||` measured at the returned witness.
    pub residual: f64,
}

/// Both spectrum ends of a symmetric operator via Lanczos with full
/// reorthogonalization. Deterministic given `seed`.
pub fn lanczos_extremes(
    op: &dyn LinearOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(EigEstimate, EigEstimate)> {
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::bad_input("operator of dimension 0"));
    }
    let steps_cap = max_iter.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0f64));
    v /= v.norm();

    let mut basis: Vec<DVector<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut scale: f64 = 0.0;
    let mut w = vec![0.0f64; dim];

    loop {
        let j = alphas.len();
        op.apply(basis[j].as_slice(), &mut w);
        let mut next = DVector::from_column_slice(&w);
        let alpha = basis[j].dot(&next);
        alphas.push(alpha);
        scale = scale.max(alpha.abs());

        // Full reorthogonalization, two passes.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&next);
                next -= b * c;
            }
        }
        let beta = next.norm();

        let (lo, hi) = tridiag_extremes(&alphas, &betas);
        let floor = 1e-300_f64.max(scale * 1e-15);
        let lo_res = beta * lo.1.abs();
        let hi_res = beta * hi.1.abs();
        let done = (lo_res <= tol * lo.0.abs().max(floor) && hi_res <= tol * hi.0.abs().max(floor))
            || beta <= floor
            || j + 1 == steps_cap;
        if done {
            let make = |(value, _last, vec): (f64, f64, DVector<f64>)| -> EigEstimate {
                let mut witness = DVector::zeros(dim);
                for (b, &c) in basis.iter().zip(vec.iter()) {
                    witness += b * c;
                }
                let norm = witness.norm();
                if norm > 0.0 {
                    witness /= norm;
                }
                let mut av = vec![0.0; dim];
                op.apply(witness.as_slice(), &mut av);
                let residual = (DVector::from_column_slice(&av) - &witness * value).norm();
                EigEstimate {
                    value,
                    witness,
                    iterations: alphas.len(),
                    residual,
                }
            };
            let (lo_full, hi_full) = tridiag_extreme_pairs(&alphas, &betas);
            let lo_est = make(lo_full);
            let hi_est = make(hi_full);
            if beta > floor && j + 1 == steps_cap {
                let worst = lo_est.residual.max(hi_est.residual);
                let bound = tol * lo_est.value.abs().max(hi_est.value.abs()).max(floor);
                if worst > bound {
                    return Err(Error::NonConvergence {
                        iterations: alphas.len(),
                        residual: worst,
                        tol,
                    });
                }
            }
            return Ok((lo_est, hi_est));
        }

        betas.push(beta);
        next /= beta;
        basis.push(next);
        scale = scale.max(beta);
    }
}

/// Extreme eigenvalues of the current tridiagonal matrix together with the
/// last component of their eigenvectors (controls the Lanczos residual).
fn tridiag_extremes(alphas: &[f64], betas: &[f64]) -> ((f64, f64), (f64, f64)) {
    let ((lv, ll, _), (hv, hl, _)) = tridiag_extreme_pairs(alphas, betas);
    ((lv, ll), (hv, hl))
}

fn tridiag_extreme_pairs(
    alphas: &[f64],
    betas: &[f64],
) -> ((f64, f64, DVector<f64>), (f64, f64, DVector<f64>)) {
    let j = alphas.len();
    let mut t = DMatrix::zeros(j, j);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = t.symmetric_eigen();
    let mut lo = 0usize;
    let mut hi = 0usize;
    for i in 0..j {
        if eig.eigenvalues[i] < eig.eigenvalues[lo] {
            lo = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[hi] {
            hi = i;
        }
    }
    let pick = |idx: usize| {
        let vec = eig.eigenvectors.column(idx).into_owned();
        (eig.eigenvalues[idx], vec[j - 1], vec)
    };
    (pick(lo), pick(hi))
}

/// Largest eigenvalue of a symmetric operator with witness.
pub fn lambda_max(
    op: &dyn LinearOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigEstimate> {
    lanczos_extremes(op, tol, max_iter, seed).map(|(_, hi)| hi)
}

/// Spectral norm `max(|lambda_min|, |lambda_max|)` of a symmetric operator.
pub fn operator_norm(
    op: &dyn LinearOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(f64, usize)> {
    let (lo, hi) = lanczos_extremes(op, tol, max_iter, seed)?;
    Ok((
        lo.value.abs().max(hi.value.abs()),
        lo.iterations.max(hi.iterations),
    ))
}

fn check_dense_budget(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() > DENSE_DIM_LIMIT {
        return Err(Error::budget(format!(
            "dense eigensolve of dimension {} exceeds limit {DENSE_DIM_LIMIT}",
            m.nrows()
        )));
    }
    Ok(())
}

/// Smallest eigenvalue by full dense symmetric eigensolve.
pub fn lambda_min_dense(m: &DMatrix<f64>) -> Result<f64> {
    check_dense_budget(m)?;
    let eig = m.clone().symmetric_eigen();
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Largest eigenvalue by full dense symmetric eigensolve.
pub fn lambda_max_dense(m: &DMatrix<f64>) -> Result<f64> {
    check_dense_budget(m)?;
    let eig = m.clone().symmetric_eigen();
    Ok(eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone)]
pub struct PsdCheck {
    pub psd: bool,
    pub lambda_min: Option<f64>,
    /// "cholesky" or "dense-eigen".
    pub method: &'static str,
}

/// PSD test with scale-aware tolerance: accepts `lambda_min >= -tol * (1 + ||M||_F)`.
pub fn is_psd(m: &DMatrix<f64>, tol: f64) -> Result<PsdCheck> {
    if m.clone().cholesky().is_some() {
        return Ok(PsdCheck {
            psd: true,
            lambda_min: None,
            method: "cholesky",
        });
    }
    let lmin = lambda_min_dense(m)?;
    let thresh = -tol * (1.0 + m.norm());
    Ok(PsdCheck {
        psd: lmin >= thresh,
        lambda_min: Some(lmin),
        method: "dense-eigen",
    })
}
