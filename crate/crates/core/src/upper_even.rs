//! Upper-bound certificate for even order: the row-column independent
//! symmetrization of `A^{(x) q/d}` realized matrix-free, and the certified
//! bound `lambda_max^{d/q}` on the relaxation value.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::sorted_tuple_table;
use crate::spectral::{lambda_max, LinearOperator};
use crate::tensor::{flatten, DenseTensor, MAX_ENTRIES};

/// Averages a tuple-indexed vector over coordinate-position permutations.
///
/// The projection is constant on orbits, so it is computed by orbit-averaging
/// with sorted-tuple canonicalization instead of summing `k!` permutations.
pub fn sym_project(v: &[f64], n: usize, k: usize) -> Vec<f64> {
    let (class_of, class_count) = class_map(n, k);
    let means = class_means(v, &class_of, class_count);
    class_of.iter().map(|&c| means[c as usize]).collect()
}

/// Per-class mean as anchor + mean deviation: exact (hence exactly
/// idempotent) when a class is already constant.
fn class_means(v: &[f64], class_of: &[u32], class_count: usize) -> Vec<f64> {
    let mut anchor = vec![f64::NAN; class_count];
    let mut dev = vec![0.0f64; class_count];
    let mut size = vec![0.0f64; class_count];
    for (i, &c) in class_of.iter().enumerate() {
        let c = c as usize;
        if anchor[c].is_nan() {
            anchor[c] = v[i];
        }
        dev[c] += v[i] - anchor[c];
        size[c] += 1.0;
    }
    (0..class_count).map(|c| anchor[c] + dev[c] / size[c]).collect()
}

fn class_map(n: usize, k: usize) -> (Vec<u32>, usize) {
    let table = sorted_tuple_table(n, k);
    let mut ids: HashMap<&[u16], u32> = HashMap::new();
    let mut class_of = Vec::with_capacity(table.len());
    for key in &table {
        let next = ids.len() as u32;
        let id = *ids.entry(key.as_slice()).or_insert(next);
        class_of.push(id);
    }
    (class_of, ids.len())
}

/// `(A^{(x) r}) v` by `r` successive mode contractions; `A^{(x) r}` is never
/// materialized. Cost `O(r * m^{r+1})`.
pub fn kron_power_apply(a: &DMatrix<f64>, r: usize, v: &[f64]) -> Result<Vec<f64>> {
    let m = a.nrows();
    if a.ncols() != m {
        return Err(Error::bad_input("kron_power_apply needs a square matrix"));
    }
    let mut len: usize = 1;
    for _ in 0..r {
        len = len
            .checked_mul(m)
            .filter(|&l| l <= MAX_ENTRIES)
            .ok_or_else(|| Error::budget(format!("Kronecker power dimension {m}^{r}")))?;
    }
    if v.len() != len {
        return Err(Error::bad_input(format!(
            "vector length {} != {m}^{r}",
            v.len()
        )));
    }
    let mut cur = v.to_vec();
    for t in 0..r {
        let prefix = m.pow(t as u32);
        let suffix = m.pow((r - 1 - t) as u32);
        let mut out = vec![0.0f64; len];
        for p in 0..prefix {
            for i in 0..m {
                let obase = (p * m + i) * suffix;
                for j in 0..m {
                    let c = a[(i, j)];
                    if c == 0.0 {
                        continue;
                    }
                    let base = (p * m + j) * suffix;
                    for s in 0..suffix {
                        out[obase + s] += c * cur[base + s];
                    }
                }
            }
        }
        cur = out;
    }
    Ok(cur)
}

/// Matrix-free `v -> P_sym (A^{(x) r} (P_sym v))` over `[n]^k`, `k = r * s`
/// with the base matrix of dimension `n^s`.
pub struct SymmetrizedPowerOp {
    base: DMatrix<f64>,
    r: usize,
    dim: usize,
    class_of: Vec<u32>,
    class_size: Vec<f64>,
}

impl SymmetrizedPowerOp {
    pub fn new(base: DMatrix<f64>, r: usize, n: usize) -> Result<Self> {
        let m = base.nrows();
        if base.ncols() != m {
            return Err(Error::bad_input("base matrix must be square"));
        }
        // m must be a power of n: the rows of the base index [n]^s.
        let mut s = 0usize;
        let mut pw = 1usize;
        while pw < m {
            pw = pw
                .checked_mul(n)
                .ok_or_else(|| Error::bad_input("base dimension not a power of n"))?;
            s += 1;
        }
        if pw != m || (n > 1 && s == 0) {
            return Err(Error::bad_input(format!(
                "base dimension {m} is not a power of n = {n}"
            )));
        }
        let k = r * s;
        let mut dim: usize = 1;
        for _ in 0..r {
            dim = dim
                .checked_mul(m)
                .filter(|&l| l <= MAX_ENTRIES)
                .ok_or_else(|| Error::budget(format!("operator dimension {m}^{r}")))?;
        }
        let (class_of, count) = class_map(n, k);
        let mut class_size = vec![0.0f64; count];
        for &c in &class_of {
            class_size[c as usize] += 1.0;
        }
        Ok(SymmetrizedPowerOp {
            base,
            r,
            dim,
            class_of,
            class_size,
        })
    }

    fn project(&self, v: &[f64]) -> Vec<f64> {
        let means = class_means(v, &self.class_of, self.class_size.len());
        self.class_of.iter().map(|&c| means[c as usize]).collect()
    }
}

impl LinearOperator for SymmetrizedPowerOp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let p = self.project(v);
        let w = kron_power_apply(&self.base, self.r, &p).expect("dims checked at construction");
        out.copy_from_slice(&self.project(&w));
    }
}

/// One even-order certification result.
#[derive(Debug, Clone)]
pub struct EvenCert {
    /// Certified upper bound `lambda_max^{d/q}` on the relaxation value.
    pub bound: f64,
    pub raw_lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub fn cert_upper_even(
    t: &DenseTensor,
    q: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EvenCert> {
    let d = t.order;
    if d % 2 != 0 {
        return Err(Error::bad_input("cert_upper_even needs even order"));
    }
    if q == 0 || q % d != 0 {
        return Err(Error::bad_input(format!("q = {q} must be a positive multiple of d = {d}")));
    }
    let r = q / d;
    let base = flatten(t)?;
    let op = SymmetrizedPowerOp::new(base.data, r, t.dim)?;
    let est = lambda_max(&op, tol, max_iter, seed)?;
    // M represents f^r on the sphere, so its top eigenvalue is nonnegative up
    // to solver noise; clamp before the fractional power.
    let bound = est.value.max(0.0).powf(d as f64 / q as f64);
    Ok(EvenCert {
        bound,
        raw_lambda: est.value,
        residual: est.residual,
        iterations: est.iterations,
    })
}
