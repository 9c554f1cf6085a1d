//! Cross-module invariant suite at pinned seeds, with per-invariant timing.
//! The CLI `verify` subcommand runs this and fails on any red row.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fmax::heuristic_fmax;
use crate::index::{enumerate_multiindices, orbit_size};
use crate::lower::{calibrate_and_build, verify_certificate};
use crate::matrix::{is_sos_symmetric, sos_symmetrize, SymMatrix, SymmetryTag};
use crate::quotient::{cert_upper_qd, norm_dominates, quotient_matrix};
use crate::spectral::lambda_min_dense;
use crate::tensor::{sample_tensor, Model};
use crate::upper_odd3::cert_upper_odd3;
use crate::wigner::{hankel_matrix, paren_matrix, wigner_hat};

#[derive(Debug, Clone)]
pub struct InvariantResult {
    pub name: &'static str,
    pub passed: bool,
    pub millis: u128,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> std::result::Result<(), String>) -> InvariantResult {
    let start = Instant::now();
    let outcome = f();
    InvariantResult {
        name,
        passed: outcome.is_ok(),
        millis: start.elapsed().as_millis(),
        detail: outcome.err().unwrap_or_default(),
    }
}

/// Runs every invariant; order and seeds are fixed.
pub fn run_invariant_suite() -> Vec<InvariantResult> {
    vec![
        check("orbit-sizes-sum-to-n^k", || {
            for n in 1..=4usize {
                for k in 0..=3usize {
                    let total: u128 = enumerate_multiindices(n, k)
                        .map_err(|e| e.to_string())?
                        .iter()
                        .map(|a| orbit_size(a).unwrap())
                        .sum();
                    if total != (n as u128).pow(k as u32) {
                        return Err(format!("n={n} k={k}: {total}"));
                    }
                }
            }
            Ok(())
        }),
        check("sos-symmetrize-projection", || {
            let mut rng = ChaCha8Rng::seed_from_u64(101);
            let raw = DMatrix::from_fn(8, 8, |_, _| rng.random_range(-1.0..1.0));
            let m = SymMatrix::tuple_indexed(2, 3, raw, SymmetryTag::None);
            let once = sos_symmetrize(&m).map_err(|e| e.to_string())?;
            let twice = sos_symmetrize(&once).map_err(|e| e.to_string())?;
            if once.data != twice.data {
                return Err("not idempotent".into());
            }
            if !is_sos_symmetric(&once, 0.0) {
                return Err("output not SoS-symmetric".into());
            }
            Ok(())
        }),
        check("hankel-catalan-exact", || {
            for k in 0..=8usize {
                let h = hankel_matrix(k);
                let r = paren_matrix(k);
                for i in 0..=k {
                    for j in 0..=k {
                        let prod: u64 = (0..=k).map(|t| r.r[t][i] * r.r[t][j]).sum();
                        if h.h[i][j] != prod {
                            return Err(format!("k={k} ({i},{j})"));
                        }
                    }
                }
            }
            Ok(())
        }),
        check("wigner-min-eigenvalue", || {
            for n in 1..=4usize {
                for q in [2usize, 4, 6] {
                    let w = wigner_hat(n, q).map_err(|e| e.to_string())?;
                    let lmin = lambda_min_dense(&w.data).map_err(|e| e.to_string())?;
                    if lmin < 0.5 - 1e-9 {
                        return Err(format!("n={n} q={q}: {lmin}"));
                    }
                }
            }
            Ok(())
        }),
        check("quotient-domination", || {
            let mut rng = ChaCha8Rng::seed_from_u64(103);
            for trial in 0..40 {
                let n = rng.random_range(2..=4usize);
                let k = rng.random_range(1..=2usize);
                let dim = n.pow(k as u32);
                let raw = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
                let sym = (&raw + raw.transpose()) * 0.5;
                let m = sos_symmetrize(&SymMatrix::tuple_indexed(n, k, sym, SymmetryTag::Symmetric))
                    .map_err(|e| e.to_string())?;
                let q = quotient_matrix(&m, 1e-9).map_err(|e| e.to_string())?;
                let (lm, lq, ok) = norm_dominates(&m, &q, 1e-9).map_err(|e| e.to_string())?;
                if !ok {
                    return Err(format!("trial {trial}: {lm} > {lq}"));
                }
            }
            Ok(())
        }),
        check("sandwich-even-q-equals-d", || {
            for seed in 0..5u64 {
                let t = sample_tensor(5, 4, Model::Rademacher, seed).unwrap();
                let upper = cert_upper_qd(&t).map_err(|e| e.to_string())?;
                let est = heuristic_fmax(&t, 20, 500, 1e-10, seed).map_err(|e| e.to_string())?;
                if est.value > upper + 1e-7 {
                    return Err(format!("seed {seed}: fmax {} > upper {upper}", est.value));
                }
            }
            Ok(())
        }),
        check("sandwich-odd3", || {
            for seed in 0..5u64 {
                let t = sample_tensor(5, 3, Model::Rademacher, seed).unwrap();
                let cert = cert_upper_odd3(&t, 4, 1e-8, 1000, seed).map_err(|e| e.to_string())?;
                let est = heuristic_fmax(&t, 20, 500, 1e-10, seed).map_err(|e| e.to_string())?;
                if est.value > cert.bound + 1e-7 {
                    return Err(format!("seed {seed}: fmax {} > bound {}", est.value, cert.bound));
                }
            }
            Ok(())
        }),
        check("lower-certificates-verify", || {
            for seed in 0..3u64 {
                let t = sample_tensor(5, 4, Model::Rademacher, 50 + seed).unwrap();
                let cert = calibrate_and_build(&t, 4).map_err(|e| e.to_string())?;
                let (ok, reasons) = verify_certificate(&cert, &t);
                if !ok {
                    return Err(format!("seed {seed}: {reasons:?}"));
                }
                let upper = cert_upper_qd(&t).map_err(|e| e.to_string())?;
                if cert.inner_value > upper + 1e-6 {
                    return Err(format!("seed {seed}: lower {} > upper {upper}", cert.inner_value));
                }
            }
            Ok(())
        }),
        check("fmax-monotone-in-restarts", || {
            let t = sample_tensor(5, 4, Model::Rademacher, 77).unwrap();
            let a = heuristic_fmax(&t, 5, 300, 1e-10, 9).map_err(|e| e.to_string())?;
            let b = heuristic_fmax(&t, 10, 300, 1e-10, 9).map_err(|e| e.to_string())?;
            if b.value < a.value {
                return Err(format!("{} < {}", b.value, a.value));
            }
            Ok(())
        }),
    ]
}
