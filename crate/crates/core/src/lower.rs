//! Feasible moment matrices certifying lower bounds on the relaxation value
//! at `q = d`: a calibrated mix of the multilinear coefficient matrix and the
//! Catalan moment matrix, PSD with unit trace by construction.

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::{is_sos_symmetric, merge_sorted, sorted_tuple_table, sos_symmetrize, SymMatrix, SymmetryTag};
use crate::spectral::{is_psd, lambda_min_dense, DEFAULT_TOL};
use crate::tensor::{coefficients, flatten, DenseTensor};
use crate::wigner::{wigner_extend, wigner_hat};

/// A feasible primal witness: PSD, SoS-symmetric, unit trace, whose inner
/// product with a representation of the polynomial lower-bounds the
/// relaxation value.
#[derive(Debug, Clone)]
pub struct MomentCertificate {
    pub n: usize,
    pub q: usize,
    pub m: SymMatrix,
    pub c1: f64,
    pub c2: f64,
    pub trace: f64,
    pub min_eig: f64,
    pub inner_value: f64,
}

/// The multilinear part: entries `f_{alpha(I) + alpha(J)} / q!` at positions
/// where the `q` concatenated indices are pairwise distinct, zero elsewhere.
///
/// The diagonal always repeats indices, so the trace is exactly zero.
pub fn build_multilinear_a(t: &DenseTensor, q: usize) -> Result<SymMatrix> {
    let d = t.order;
    let n = t.dim;
    if q != d || q % 2 != 0 {
        return Err(Error::bad_input("multilinear matrix needs even q = d"));
    }
    if q > n {
        return Err(Error::bad_input(format!(
            "q = {q} > n = {n}: no multilinear support"
        )));
    }
    let k = q / 2;
    let coeff = coefficients(t);
    let table = sorted_tuple_table(n, k);
    let dim = n.pow(k as u32);
    let qfact: f64 = (1..=q as u64).product::<u64>() as f64;
    let mut data = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let key = merge_sorted(&table[i], &table[j]);
            if key.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let mut counts = vec![0u32; n];
            for &e in &key {
                counts[e as usize - 1] += 1;
            }
            let alpha = crate::index::MultiIndex::new(counts);
            if let Some(&f) = coeff.map.get(&alpha) {
                data[(i, j)] = f / qfact;
            }
        }
    }
    Ok(SymMatrix::tuple_indexed(n, k, data, SymmetryTag::SosSymmetric))
}

/// Builds the moment certificate, calibrating `c1` exactly for unit trace and
/// `c2` by doubling search against the PSD oracle.
pub fn calibrate_and_build(t: &DenseTensor, q: usize) -> Result<MomentCertificate> {
    let n = t.dim;
    let a = build_multilinear_a(t, q)?;
    let what = wigner_hat(n, q)?;
    let w = wigner_extend(&what)?;
    let nq2 = (n as f64).powi((q / 2) as i32);
    let c1 = w.data.trace() / nq2;
    let scale_a = (q as f64).powf(3.0 * q as f64 / 4.0) / (n as f64).powf(3.0 * q as f64 / 4.0);

    let mut c2 = 1.0f64;
    loop {
        let data = (&a.data * (scale_a / c2) + &w.data / nq2) / c1;
        let check = is_psd(&data, DEFAULT_TOL)?;
        if check.psd {
            let m = SymMatrix::tuple_indexed(n, q / 2, data, SymmetryTag::SosSymmetric);
            let trace = m.data.trace();
            let min_eig = lambda_min_dense(&m.data)?;
            let rep = sos_symmetrize(&flatten(t)?)?;
            let inner_value = m.data.dot(&rep.data);
            return Ok(MomentCertificate {
                n,
                q,
                m,
                c1,
                c2,
                trace,
                min_eig,
                inner_value,
            });
        }
        c2 *= 2.0;
        if c2 > 2.0f64.powi(64) {
            return Err(Error::budget(
                "c2 doubling search exceeded 2^64: no PSD mix at tolerance",
            ));
        }
    }
}

/// Independent recheck of every certificate invariant. Returns the reasons
/// for failure, empty on success.
pub fn verify_certificate(cert: &MomentCertificate, t: &DenseTensor) -> (bool, Vec<String>) {
    let mut reasons = Vec::new();
    let trace = cert.m.data.trace();
    if (trace - 1.0).abs() > 1e-9 {
        reasons.push(format!("trace {trace} differs from 1"));
    }
    match lambda_min_dense(&cert.m.data) {
        Ok(lmin) => {
            let thresh = -1e-8 * (1.0 + cert.m.data.norm());
            if lmin < thresh {
                reasons.push(format!("min eigenvalue {lmin} below {thresh}"));
            }
        }
        Err(e) => reasons.push(format!("eigensolve failed: {e}")),
    }
    if !is_sos_symmetric(&cert.m, 1e-9) {
        reasons.push("matrix is not SoS-symmetric".into());
    }
    // Inner product must not depend on the representation of f: compare the
    // SoS-symmetric representation against the raw flattening.
    let sym_inner = flatten(t)
        .and_then(|f| sos_symmetrize(&f))
        .map(|rep| cert.m.data.dot(&rep.data));
    let raw_inner = flatten(t).map(|f| cert.m.data.dot(&f.data));
    match (sym_inner, raw_inner) {
        (Ok(a), Ok(b)) => {
            if (a - b).abs() > 1e-8 * (1.0 + a.abs()) {
                reasons.push(format!("inner product representation-dependent: {a} vs {b}"));
            }
            if (a - cert.inner_value).abs() > 1e-8 * (1.0 + a.abs()) {
                reasons.push(format!(
                    "recorded inner value {} differs from recomputed {a}",
                    cert.inner_value
                ));
            }
        }
        _ => reasons.push("could not recompute inner products".into()),
    }
    (reasons.is_empty(), reasons)
}

/// SHA-256 of the matrix entries as little-endian doubles, row-major.
pub fn matrix_hash(m: &SymMatrix) -> String {
    let mut hasher = Sha256::new();
    for i in 0..m.data.nrows() {
        for j in 0..m.data.ncols() {
            hasher.update(m.data[(i, j)].to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// JSON form of a certificate; the matrix payload is replaced by its hash
/// (the matrix is regenerable from the seed).
pub fn certificate_to_json(cert: &MomentCertificate, seed: Option<u64>) -> String {
    serde_json::json!({
        "n": cert.n,
        "q": cert.q,
        "c1": cert.c1,
        "c2": cert.c2,
        "trace": cert.trace,
        "min_eig": cert.min_eig,
        "inner_value": cert.inner_value,
        "seed": seed,
        "matrix_hash": matrix_hash(&cert.m),
    })
    .to_string()
}
