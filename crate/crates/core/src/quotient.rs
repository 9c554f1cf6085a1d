//! Quotient matrices of SoS-symmetric matrices and the norm-domination
//! property, giving the `q = d` upper-bound certificate.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::index::{counts_of_linear, orbit_size, MultiIndexTable};
use crate::matrix::{is_sos_symmetric, sos_symmetrize, SymMatrix};
use crate::spectral::{lambda_max_dense, DEFAULT_TOL};
use crate::tensor::{flatten, DenseTensor};

/// Multiindex-indexed compression whose largest eigenvalue dominates that of
/// the SoS-symmetric source matrix.
#[derive(Debug, Clone)]
pub struct QuotientMatrix {
    pub n: usize,
    pub k: usize,
    pub table: MultiIndexTable,
    pub data: DMatrix<f64>,
}

/// `Q[beta, gamma] = M[I, J] * sqrt(|O(beta)| * |O(gamma)|)` for any class
/// representatives `I, J`.
///
/// The class value is taken as the class average rather than a single
/// representative; for exactly SoS-symmetric input these coincide, and the
/// average absorbs float noise from upstream.
pub fn quotient_matrix(m: &SymMatrix, tol: f64) -> Result<QuotientMatrix> {
    if !is_sos_symmetric(m, tol) {
        return Err(Error::bad_input(
            "quotient_matrix needs an SoS-symmetric matrix",
        ));
    }
    let (n, k) = (m.n, m.k);
    let table = MultiIndexTable::new(n, k)?;
    let dim = m.dim();
    let mut pos = vec![0usize; dim];
    for (idx, slot) in pos.iter_mut().enumerate() {
        *slot = table
            .position_of_counts(&counts_of_linear(idx, n, k))
            .expect("table covers all degree-k multi-indices");
    }
    let qdim = table.len();
    let mut sums = DMatrix::<f64>::zeros(qdim, qdim);
    let mut counts = DMatrix::<f64>::zeros(qdim, qdim);
    for i in 0..dim {
        for j in 0..dim {
            sums[(pos[i], pos[j])] += m.data[(i, j)];
            counts[(pos[i], pos[j])] += 1.0;
        }
    }
    let orbit_sqrt: Vec<f64> = table
        .indices
        .iter()
        .map(|a| Ok((orbit_size(a)? as f64).sqrt()))
        .collect::<Result<_>>()?;
    let data = DMatrix::from_fn(qdim, qdim, |b, g| {
        sums[(b, g)] / counts[(b, g)] * orbit_sqrt[b] * orbit_sqrt[g]
    });
    Ok(QuotientMatrix { n, k, table, data })
}

/// Checks quotient domination and returns `(lambda_max(M), lambda_max(Q), ok)`.
///
/// For an SoS-symmetric matrix, columns indexed by tuples of the same orbit
/// are identical, so every vector orthogonal to the orbit-indicator subspace
/// is in the kernel: the spectrum of `M` is the spectrum of `Q` plus zeros.
/// The deterministic domination is therefore on spectral norms,
/// `||M|| <= ||Q||`, together with `lambda_max(M) <= max(lambda_max(Q), 0)`;
/// the bare `lambda_max(M) <= lambda_max(Q)` fails exactly when `Q` is
/// negative definite.
pub fn norm_dominates(m: &SymMatrix, q: &QuotientMatrix, tol: f64) -> Result<(f64, f64, bool)> {
    let lm = lambda_max_dense(&m.data)?;
    let lq = lambda_max_dense(&q.data)?;
    let nm = lm.abs().max(crate::spectral::lambda_min_dense(&m.data)?.abs());
    let nq = lq.abs().max(crate::spectral::lambda_min_dense(&q.data)?.abs());
    let ok = nm <= nq + tol && lm <= lq.max(0.0) + tol;
    Ok((lm, lq, ok))
}

/// The `q = d` certificate for even order: the largest eigenvalue of the
/// quotient of the SoS-symmetrized flattening upper-bounds the relaxation
/// value, hence the sphere maximum.
pub fn cert_upper_qd(t: &DenseTensor) -> Result<f64> {
    if t.order % 2 != 0 {
        return Err(Error::bad_input("cert_upper_qd needs even order"));
    }
    let m = sos_symmetrize(&flatten(t)?)?;
    let q = quotient_matrix(&m, DEFAULT_TOL)?;
    lambda_max_dense(&q.data)
}
