//! Catalan numbers, the parenthesis-counting matrix `R`, the Hankel matrix
//! `H = R^T R`, and the moment matrix built from products of Catalan numbers
//! whose minimum eigenvalue is at least one half.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::index::{binomial, orbit_size, MultiIndexTable};
use crate::matrix::{SymMatrix, SymmetryTag};
use crate::tensor::MAX_ENTRIES;

/// `C_l = binom(2l, l) / (l + 1)`, exact.
pub fn catalan(l: u64) -> Result<u128> {
    Ok(binomial(2 * l, l)? / (l as u128 + 1))
}

/// Upper triangular counting matrix: `R[i, j]` is the number of consistent
/// length-`j` parenthesis strings ending `i` above the ground level.
#[derive(Debug, Clone)]
pub struct ParenMatrix {
    pub k: usize,
    /// Row-major `(k+1) x (k+1)` integer entries.
    pub r: Vec<Vec<u64>>,
}

/// Columns are `T^j e_0` for the bidiagonal 0/1 matrix `T[i,j] = 1` iff `|i-j| = 1`.
pub fn paren_matrix(k: usize) -> ParenMatrix {
    let dim = k + 1;
    let mut r = vec![vec![0u64; dim]; dim];
    r[0][0] = 1;
    for j in 1..dim {
        for i in 0..dim {
            let mut v = 0;
            if i > 0 {
                v += r[i - 1][j - 1];
            }
            if i + 1 < dim {
                v += r[i + 1][j - 1];
            }
            r[i][j] = v;
        }
    }
    ParenMatrix { k, r }
}

/// `H[i, j]` depends only on `i + j`: zero on odd sums, Catalan numbers on even.
#[derive(Debug, Clone)]
pub struct HankelMatrix {
    pub k: usize,
    pub h: Vec<Vec<u64>>,
}

/// `H = R^T R` in exact integer arithmetic.
pub fn hankel_matrix(k: usize) -> HankelMatrix {
    let r = paren_matrix(k);
    let dim = k + 1;
    let mut h = vec![vec![0u64; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            h[i][j] = (0..dim).map(|t| r.r[t][i] * r.r[t][j]).sum();
        }
    }
    HankelMatrix { k, h }
}

/// Moment matrix over degree-`q/2` multi-indices with entries
/// `prod_i C_{(alpha_i + beta_i)/2}` when every component sum is even, else 0.
///
/// The per-variable normalization used to prove the eigenvalue bound cancels,
/// so entries are exact integers.
#[derive(Debug, Clone)]
pub struct WignerMomentMatrix {
    pub n: usize,
    pub q: usize,
    pub table: MultiIndexTable,
    pub data: DMatrix<f64>,
}

pub fn wigner_hat(n: usize, q: usize) -> Result<WignerMomentMatrix> {
    if q % 2 != 0 {
        return Err(Error::bad_input("wigner_hat needs even q"));
    }
    let k = q / 2;
    let count = binomial((n + k - 1) as u64, k as u64)?;
    if count * count > MAX_ENTRIES as u128 {
        return Err(Error::budget(format!(
            "Wigner moment matrix of dimension {count} exceeds entry budget"
        )));
    }
    let table = MultiIndexTable::new(n, k)?;
    let cat: Vec<f64> = (0..=k as u64).map(|l| Ok(catalan(l)? as f64)).collect::<Result<_>>()?;
    let dim = table.len();
    let mut data = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let mut v = 1.0;
            for (&ca, &cb) in table.indices[a]
                .counts()
                .iter()
                .zip(table.indices[b].counts())
            {
                let s = ca + cb;
                if s % 2 != 0 {
                    v = 0.0;
                    break;
                }
                v *= cat[(s / 2) as usize];
            }
            data[(a, b)] = v;
        }
    }
    Ok(WignerMomentMatrix { n, q, table, data })
}

/// Tuple-indexed extension `W[I, J] = What[alpha(I), alpha(J)]`.
pub fn wigner_extend(what: &WignerMomentMatrix) -> Result<SymMatrix> {
    let n = what.n;
    let k = what.q / 2;
    let dim = n
        .checked_pow(k as u32)
        .filter(|&d| d <= MAX_ENTRIES && d * d <= MAX_ENTRIES)
        .ok_or_else(|| Error::budget(format!("tuple extension dimension {n}^{k}")))?;
    let mut pos = vec![0usize; dim];
    for (idx, slot) in pos.iter_mut().enumerate() {
        let counts = crate::index::counts_of_linear(idx, n, k);
        *slot = what
            .table
            .position_of_counts(&counts)
            .expect("table covers all degree-k multi-indices");
    }
    let data = DMatrix::from_fn(dim, dim, |i, j| what.data[(pos[i], pos[j])]);
    Ok(SymMatrix::tuple_indexed(n, k, data, SymmetryTag::SosSymmetric))
}

/// Orbit-weighted diagonal sum of the tuple extension, without building it.
pub fn wigner_extended_trace(what: &WignerMomentMatrix) -> Result<f64> {
    let mut trace = 0.0;
    for (i, alpha) in what.table.indices.iter().enumerate() {
        trace += orbit_size(alpha)? as f64 * what.data[(i, i)];
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lambda_min_dense;

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0).unwrap(), 1);
        assert_eq!(catalan(1).unwrap(), 1);
        assert_eq!(catalan(2).unwrap(), 2);
        assert_eq!(catalan(3).unwrap(), 5);
        assert_eq!(catalan(5).unwrap(), 42);
        assert_eq!(catalan(10).unwrap(), 16796);
    }

    /// Exhaustive enumeration of consistent parenthesis strings.
    fn brute_force_paren(i: usize, j: usize) -> u64 {
        let mut count = 0;
        for mask in 0u32..(1 << j) {
            let mut height: i64 = 0;
            let mut ok = true;
            for b in 0..j {
                if mask >> b & 1 == 1 {
                    height += 1;
                } else {
                    height -= 1;
                }
                if height < 0 {
                    ok = false;
                    break;
                }
            }
            if ok && height == i as i64 {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn paren_matrix_examples() {
        let r = paren_matrix(3);
        assert_eq!(r.r[0][2], 1);
        assert_eq!(r.r[1][2], 0);
        assert_eq!(r.r[2][2], 1);
        // "(()" and "()("
        assert_eq!(r.r[1][3], 2);
    }

    #[test]
    fn paren_matrix_matches_string_enumeration() {
        let r = paren_matrix(8);
        for i in 0..=8 {
            for j in 0..=8 {
                assert_eq!(r.r[i][j], brute_force_paren(i, j), "R[{i},{j}]");
            }
        }
    }

    #[test]
    fn paren_matrix_structure() {
        let r = paren_matrix(10);
        for i in 0..=10 {
            assert_eq!(r.r[i][i], 1);
            for j in 0..=10 {
                if i > j {
                    assert_eq!(r.r[i][j], 0);
                }
                if (i + j) % 2 == 1 {
                    assert_eq!(r.r[i][j], 0);
                }
                if i <= j && (i + j) % 2 == 0 {
                    assert!(r.r[i][j] >= 1);
                }
            }
        }
    }

    #[test]
    fn hankel_examples() {
        let h = hankel_matrix(2);
        assert_eq!(h.h, vec![vec![1, 0, 1], vec![0, 1, 0], vec![1, 0, 2]]);
        let h = hankel_matrix(4);
        assert_eq!(h.h[1][3], 2);
        for i in 0..=4usize {
            for j in 0..=4usize {
                if (i + j) % 2 == 0 {
                    assert_eq!(h.h[i][j] as u128, catalan(((i + j) / 2) as u64).unwrap());
                } else {
                    assert_eq!(h.h[i][j], 0);
                }
            }
        }
    }

    /// Exact integer Cholesky with unit diagonal; panics on non-integral steps.
    fn integer_cholesky(h: &[Vec<u64>]) -> Vec<Vec<i128>> {
        let dim = h.len();
        let mut r = vec![vec![0i128; dim]; dim];
        for i in 0..dim {
            let diag2 = h[i][i] as i128 - (0..i).map(|t| r[t][i] * r[t][i]).sum::<i128>();
            assert_eq!(diag2, 1, "unit diagonal expected");
            r[i][i] = 1;
            for j in (i + 1)..dim {
                let num = h[i][j] as i128 - (0..i).map(|t| r[t][i] * r[t][j]).sum::<i128>();
                r[i][j] = num;
            }
        }
        r
    }

    #[test]
    fn cholesky_factor_is_paren_matrix() {
        for k in 0..=8usize {
            let h = hankel_matrix(k);
            let factor = integer_cholesky(&h.h);
            let r = paren_matrix(k);
            for i in 0..=k {
                for j in 0..=k {
                    assert_eq!(factor[i][j], r.r[i][j] as i128, "k={k} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn hankel_positive_definite() {
        for k in 0..=10usize {
            let h = hankel_matrix(k);
            let m = DMatrix::from_fn(k + 1, k + 1, |i, j| h.h[i][j] as f64);
            assert!(lambda_min_dense(&m).unwrap() > 0.0, "k={k}");
        }
    }

    #[test]
    fn wigner_hat_examples() {
        let w = wigner_hat(2, 2).unwrap();
        assert_eq!(w.data, DMatrix::identity(2, 2));

        let w = wigner_hat(2, 4).unwrap();
        let expect = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 2.0]);
        assert_eq!(w.data, expect);
        assert!(lambda_min_dense(&w.data).unwrap() >= 1.0 - 1e-12);

        let w = wigner_hat(1, 4).unwrap();
        assert_eq!(w.data[(0, 0)], 2.0);
    }

    #[test]
    fn wigner_min_eigenvalue_bound() {
        for n in 1..=5usize {
            for q in [2usize, 4, 6, 8] {
                let w = wigner_hat(n, q).unwrap();
                let lmin = lambda_min_dense(&w.data).unwrap();
                assert!(lmin >= 0.5 - 1e-9, "n={n} q={q} lambda_min={lmin}");
                let cap = 2f64.powi(q as i32);
                for v in w.data.iter() {
                    assert!(*v >= 0.0 && *v <= cap);
                }
                for i in 0..w.data.nrows() {
                    assert!(w.data[(i, i)] >= 1.0);
                }
            }
        }
    }

    #[test]
    fn extension_examples() {
        let w = wigner_hat(2, 2).unwrap();
        let ext = wigner_extend(&w).unwrap();
        assert_eq!(ext.data, DMatrix::identity(2, 2));

        let w = wigner_hat(2, 4).unwrap();
        let ext = wigner_extend(&w).unwrap();
        assert!((ext.data.trace() - 6.0).abs() < 1e-12);
        assert!((wigner_extended_trace(&w).unwrap() - 6.0).abs() < 1e-12);
        assert!(crate::matrix::is_sos_symmetric(&ext, 0.0));
    }
}
