//! Seeded random tensor generation, flattening, coefficient extraction, and
//! polynomial evaluation.
//!
//! PRNG stream contract: a tensor is generated from `ChaCha8Rng::seed_from_u64(seed)`.
//! Rademacher entries consume one `u32` each, in row-major entry order, and map
//! the low bit to `{+1, -1}` (bit 1 -> +1). Gaussian entries consume one
//! standard-normal `f64` each from the same stream. This makes tensors
//! bit-identical across runs and machines for a fixed `(n, d, model, seed)`.

use std::collections::HashMap;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{counts_of_linear, MultiIndex};
use crate::matrix::{SymMatrix, SymmetryTag};

/// Cap on materialized entries (`n^d` and flattening dims live under this).
pub const MAX_ENTRIES: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Rademacher,
    Gaussian,
    Explicit,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher" => Ok(Model::Rademacher),
            "gaussian" => Ok(Model::Gaussian),
            "explicit" => Ok(Model::Explicit),
            other => Err(Error::bad_input(format!("unknown model '{other}'"))),
        }
    }
}

/// Order-`d`, dimension-`n` dense real tensor in row-major entry order.
#[derive(Debug, Clone)]
pub struct DenseTensor {
    pub order: usize,
    pub dim: usize,
    pub entries: Vec<f64>,
    pub model: Model,
    pub seed: Option<u64>,
}

fn checked_pow(n: usize, d: usize) -> Result<usize> {
    let mut out: usize = 1;
    for _ in 0..d {
        out = out
            .checked_mul(n)
            .filter(|&v| v <= MAX_ENTRIES)
            .ok_or_else(|| Error::budget(format!("tensor size {n}^{d} exceeds entry budget")))?;
    }
    Ok(out)
}

/// Deterministic sample of the random tensor model.
pub fn sample_tensor(n: usize, d: usize, model: Model, seed: u64) -> Result<DenseTensor> {
    if n < 1 || d < 1 {
        return Err(Error::bad_input("need n >= 1 and d >= 1"));
    }
    let len = checked_pow(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = match model {
        Model::Rademacher => (0..len)
            .map(|_| if rng.next_u32() & 1 == 1 { 1.0 } else { -1.0 })
            .collect(),
        Model::Gaussian => (0..len)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect(),
        Model::Explicit => {
            return Err(Error::bad_input("explicit model cannot be sampled"));
        }
    };
    Ok(DenseTensor {
        order: d,
        dim: n,
        entries,
        model,
        seed: Some(seed),
    })
}

impl DenseTensor {
    pub fn explicit(n: usize, d: usize, entries: Vec<f64>) -> Result<Self> {
        let len = checked_pow(n, d)?;
        if entries.len() != len {
            return Err(Error::bad_input(format!(
                "expected {len} entries, got {}",
                entries.len()
            )));
        }
        Ok(DenseTensor {
            order: d,
            dim: n,
            entries,
            model: Model::Explicit,
            seed: None,
        })
    }

    pub fn zeros(n: usize, d: usize) -> Result<Self> {
        let len = checked_pow(n, d)?;
        Self::explicit(n, d, vec![0.0; len])
    }
}

/// Matrix flattening `A[I, J] = tensor[I (+) J]` for even order.
pub fn flatten(t: &DenseTensor) -> Result<SymMatrix> {
    if t.order % 2 != 0 {
        return Err(Error::bad_input("flatten needs an even-order tensor"));
    }
    let k = t.order / 2;
    let m = t.dim.pow(k as u32);
    // Concatenated tuples index row-major, so flattening is a plain reshape.
    let data = DMatrix::from_fn(m, m, |i, j| t.entries[i * m + j]);
    Ok(SymMatrix::tuple_indexed(t.dim, k, data, SymmetryTag::None))
}

/// Contracts one tensor mode with `x`; `data` is viewed as
/// `(prefix, n, suffix)` in row-major order.
pub(crate) fn contract_mode(data: &[f64], prefix: usize, n: usize, suffix: usize, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; prefix * suffix];
    for p in 0..prefix {
        for (i, &xi) in x.iter().enumerate().take(n) {
            let base = (p * n + i) * suffix;
            let obase = p * suffix;
            for s in 0..suffix {
                out[obase + s] += data[base + s] * xi;
            }
        }
    }
    out
}

/// Full contraction `sum_K tensor[K] prod_l x_{K_l}`.
pub fn evaluate(t: &DenseTensor, x: &[f64]) -> Result<f64> {
    if x.len() != t.dim {
        return Err(Error::bad_input(format!(
            "vector length {} != tensor dimension {}",
            x.len(),
            t.dim
        )));
    }
    // Contract the trailing mode repeatedly.
    let mut cur = t.entries.clone();
    let mut prefix = t.dim.pow(t.order as u32 - 1);
    for _ in 0..t.order {
        cur = contract_mode(&cur, prefix, t.dim, 1, x);
        prefix /= t.dim;
    }
    Ok(cur[0])
}

/// Coefficients of the polynomial `<tensor, x^{(x) d}>` indexed by multi-index:
/// `f_alpha = sum over the orbit of alpha of tensor entries`.
#[derive(Debug, Clone)]
pub struct CoefficientMap {
    pub degree: usize,
    pub map: HashMap<MultiIndex, f64>,
}

pub fn coefficients(t: &DenseTensor) -> CoefficientMap {
    let mut map: HashMap<MultiIndex, f64> = HashMap::new();
    for (idx, &v) in t.entries.iter().enumerate() {
        let alpha = MultiIndex::new(counts_of_linear(idx, t.dim, t.order));
        *map.entry(alpha).or_insert(0.0) += v;
    }
    CoefficientMap {
        degree: t.order,
        map,
    }
}

impl CoefficientMap {
    /// Polynomial evaluation straight from the coefficient map.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.map
            .iter()
            .map(|(alpha, &c)| {
                let mono: f64 = alpha
                    .counts()
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| x[i].powi(e as i32))
                    .product();
                c * mono
            })
            .sum()
    }
}

/// For `d = 3`: symmetric slices `T_l = (Tbar_l + Tbar_l^T) / 2` with
/// `Tbar_l[i, j] = tensor[(l, i, j)]`, so `sum_l x_l (x^T T_l x) = <tensor, x^{(x)3}>`.
pub fn symmetrized_slices(t: &DenseTensor) -> Result<Vec<DMatrix<f64>>> {
    if t.order != 3 {
        return Err(Error::bad_input("symmetrized_slices needs order 3"));
    }
    let n = t.dim;
    let mut out = Vec::with_capacity(n);
    for l in 0..n {
        let slice = DMatrix::from_fn(n, n, |i, j| {
            0.5 * (t.entries[(l * n + i) * n + j] + t.entries[(l * n + j) * n + i])
        });
        out.push(slice);
    }
    Ok(out)
}

/// On-disk form: JSON header plus either the seed alone (regenerable) or a
/// base64 little-endian f64 payload in row-major order.
#[derive(Debug, Serialize, Deserialize)]
struct TensorFile {
    order: usize,
    dim: usize,
    model: Model,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    payload: Option<String>,
}

pub fn save_tensor(t: &DenseTensor, path: &Path, with_payload: bool) -> Result<()> {
    let payload = if with_payload || t.model == Model::Explicit || t.seed.is_none() {
        let mut bytes = Vec::with_capacity(t.entries.len() * 8);
        for v in &t.entries {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        Some(B64.encode(bytes))
    } else {
        None
    };
    let file = TensorFile {
        order: t.order,
        dim: t.dim,
        model: t.model,
        seed: t.seed,
        payload,
    };
    std::fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}

pub fn load_tensor(path: &Path) -> Result<DenseTensor> {
    let file: TensorFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let len = checked_pow(file.dim, file.order)?;
    if let Some(payload) = file.payload {
        let bytes = B64
            .decode(payload)
            .map_err(|e| Error::bad_input(format!("bad payload base64: {e}")))?;
        if bytes.len() != len * 8 {
            return Err(Error::bad_input(format!(
                "payload holds {} bytes, expected {}",
                bytes.len(),
                len * 8
            )));
        }
        let entries = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(DenseTensor {
            order: file.order,
            dim: file.dim,
            entries,
            model: file.model,
            seed: file.seed,
        })
    } else {
        let seed = file
            .seed
            .ok_or_else(|| Error::bad_input("tensor file has neither payload nor seed"))?;
        sample_tensor(file.dim, file.order, file.model, seed)
    }
}
