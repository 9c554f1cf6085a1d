//! Square matrices indexed by tuples or multi-indices, and the
//! symmetrization machinery shared by the certificate pipelines.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::index::MultiIndex;

/// How rows and columns are indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimKind {
    /// Rows/columns run over `[n]^k` in row-major lexicographic order.
    Tuple,
    /// Rows/columns run over degree-`k` multi-indices in graded-lex order.
    MultiIndexed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymmetryTag {
    None,
    Symmetric,
    SosSymmetric,
}

/// Dense square matrix with indexing metadata.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    pub kind: DimKind,
    pub n: usize,
    pub k: usize,
    pub tag: SymmetryTag,
    pub data: DMatrix<f64>,
}

impl SymMatrix {
    pub fn tuple_indexed(n: usize, k: usize, data: DMatrix<f64>, tag: SymmetryTag) -> Self {
        assert_eq!(data.nrows(), n.pow(k as u32));
        assert_eq!(data.ncols(), data.nrows());
        SymMatrix {
            kind: DimKind::Tuple,
            n,
            k,
            tag,
            data,
        }
    }

    pub fn multiindex_indexed(n: usize, k: usize, data: DMatrix<f64>, tag: SymmetryTag) -> Self {
        assert_eq!(data.nrows(), data.ncols());
        SymMatrix {
            kind: DimKind::MultiIndexed,
            n,
            k,
            tag,
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }
}

/// Sorted entries (1-based) of every tuple in `[n]^k`, in linear-index order.
///
/// The sorted entry list of `I \oplus J` is a canonical name for the class
/// `alpha(I) + alpha(J)`, so two rows of this table can be merged to key an
/// SoS-symmetry class without allocating count vectors.
pub(crate) fn sorted_tuple_table(n: usize, k: usize) -> Vec<Vec<u16>> {
    let dim = n.pow(k as u32);
    let mut table = Vec::with_capacity(dim);
    for idx in 0..dim {
        let mut entries = Vec::with_capacity(k);
        let mut rest = idx;
        for _ in 0..k {
            entries.push((rest % n) as u16 + 1);
            rest /= n;
        }
        entries.sort_unstable();
        table.push(entries);
    }
    table
}

pub(crate) fn merge_sorted(a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn require_tuple_indexed(m: &SymMatrix, what: &str) -> Result<()> {
    if m.kind != DimKind::Tuple {
        return Err(Error::bad_input(format!("{what} needs a tuple-indexed matrix")));
    }
    Ok(())
}

/// Checks whether all entries sharing an `alpha(I) + alpha(J)` class agree
/// within `tol`.
pub fn is_sos_symmetric(m: &SymMatrix, tol: f64) -> bool {
    if m.kind != DimKind::Tuple {
        return false;
    }
    let table = sorted_tuple_table(m.n, m.k);
    let dim = m.dim();
    let mut ranges: HashMap<Vec<u16>, (f64, f64)> = HashMap::new();
    for i in 0..dim {
        for j in 0..dim {
            let key = merge_sorted(&table[i], &table[j]);
            let v = m.data[(i, j)];
            let entry = ranges.entry(key).or_insert((v, v));
            entry.0 = entry.0.min(v);
            entry.1 = entry.1.max(v);
        }
    }
    ranges.values().all(|(lo, hi)| hi - lo <= tol)
}

/// Averages a tuple-indexed matrix over each SoS-symmetry class.
///
/// The output represents the same polynomial and is SoS-symmetric by
/// construction; the map is idempotent.
pub fn sos_symmetrize(m: &SymMatrix) -> Result<SymMatrix> {
    require_tuple_indexed(m, "sos_symmetrize")?;
    let table = sorted_tuple_table(m.n, m.k);
    let dim = m.dim();
    // Mean per class as anchor + mean deviation: exact (hence exactly
    // idempotent) when the class is already constant.
    let mut sums: HashMap<Vec<u16>, (f64, f64, u64)> = HashMap::new();
    for i in 0..dim {
        for j in 0..dim {
            let key = merge_sorted(&table[i], &table[j]);
            let v = m.data[(i, j)];
            let entry = sums.entry(key).or_insert((v, 0.0, 0));
            entry.1 += v - entry.0;
            entry.2 += 1;
        }
    }
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let key = merge_sorted(&table[i], &table[j]);
            let (anchor, devsum, count) = sums[&key];
            out[(i, j)] = anchor + devsum / count as f64;
        }
    }
    Ok(SymMatrix::tuple_indexed(m.n, m.k, out, SymmetryTag::SosSymmetric))
}

/// The unique SoS-symmetric representation of a polynomial given by its
/// coefficient map over degree-`2k` multi-indices.
///
/// Each coefficient is spread uniformly over its class of `(I, J)` positions.
pub fn representation_from_coefficients(
    n: usize,
    k: usize,
    coeff: &HashMap<MultiIndex, f64>,
) -> Result<SymMatrix> {
    let table = sorted_tuple_table(n, k);
    let dim = n.pow(k as u32);
    let mut class_size: HashMap<Vec<u16>, u64> = HashMap::new();
    for i in 0..dim {
        for j in 0..dim {
            *class_size.entry(merge_sorted(&table[i], &table[j])).or_insert(0) += 1;
        }
    }
    // Re-key coefficients by sorted entry list.
    let mut by_key: HashMap<Vec<u16>, f64> = HashMap::new();
    for (alpha, &c) in coeff {
        if alpha.degree() as usize != 2 * k {
            return Err(Error::bad_input(format!(
                "coefficient degree {} != {}",
                alpha.degree(),
                2 * k
            )));
        }
        let mut key = Vec::with_capacity(2 * k);
        for (var, &cnt) in alpha.counts().iter().enumerate() {
            for _ in 0..cnt {
                key.push(var as u16 + 1);
            }
        }
        by_key.insert(key, c);
    }
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let key = merge_sorted(&table[i], &table[j]);
            if let Some(&c) = by_key.get(&key) {
                out[(i, j)] = c / class_size[&key] as f64;
            }
        }
    }
    Ok(SymMatrix::tuple_indexed(n, k, out, SymmetryTag::SosSymmetric))
}
