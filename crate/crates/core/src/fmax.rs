//! Heuristic (non-certified) estimate of the sphere maximum, used as the
//! reporting baseline and the lower arm of the sandwich checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::{contract_mode, evaluate, DenseTensor};

/// Best value found, with the witness direction.
#[derive(Debug, Clone)]
pub struct MaxEstimate {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub restarts: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Gradient of `<tensor, x^{(x) d}>`: sum over modes of contracting every
/// other mode with `x`.
pub fn gradient(t: &DenseTensor, x: &[f64]) -> Vec<f64> {
    let n = t.dim;
    let d = t.order;
    let mut grad = vec![0.0f64; n];
    for mode in 0..d {
        // Contract trailing modes down to order mode+1, then leading modes.
        let mut cur = t.entries.clone();
        let mut order = d;
        while order > mode + 1 {
            cur = contract_mode(&cur, n.pow(order as u32 - 1), n, 1, x);
            order -= 1;
        }
        for _ in 0..mode {
            cur = contract_mode(&cur, 1, n, n.pow(order as u32 - 1), x);
            order -= 1;
        }
        for (g, &c) in grad.iter_mut().zip(&cur) {
            *g += c;
        }
    }
    grad
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in v.iter_mut() {
            *a /= norm;
        }
    }
    norm
}

/// Symmetric tensor power iteration with seeded restarts; the objective never
/// decreases across accepted steps (step-halving safeguard). The value is a
/// lower estimate of the true maximum, never a certificate.
pub fn heuristic_fmax(
    t: &DenseTensor,
    restarts: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<MaxEstimate> {
    if restarts == 0 {
        return Err(Error::bad_input("need at least one restart"));
    }
    let n = t.dim;
    let mut best_value = f64::NEG_INFINITY;
    let mut best_x = vec![0.0; n];
    let mut total_iters = 0usize;
    let mut all_converged = true;

    for r in 0..restarts {
        // Independent, prefix-stable stream per restart.
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add((r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if normalize(&mut x) == 0.0 {
            x[0] = 1.0;
        }
        let mut f = evaluate(t, &x)?;
        if t.order % 2 == 1 && f < 0.0 {
            for a in x.iter_mut() {
                *a = -*a;
            }
            f = -f;
        }
        let mut converged = false;
        let mut iters = 0usize;
        while iters < max_iter {
            iters += 1;
            let mut g = gradient(t, &x);
            if normalize(&mut g) == 0.0 {
                converged = true;
                break;
            }
            // Full step first, then halve toward the current point until the
            // objective does not decrease.
            let mut accepted = false;
            let mut step = 1.0f64;
            for _ in 0..30 {
                let mut y: Vec<f64> = x
                    .iter()
                    .zip(&g)
                    .map(|(&xi, &gi)| (1.0 - step) * xi + step * gi)
                    .collect();
                if normalize(&mut y) == 0.0 {
                    step *= 0.5;
                    continue;
                }
                let fy = evaluate(t, &y)?;
                if fy >= f {
                    let delta = fy - f;
                    x = y;
                    f = fy;
                    accepted = true;
                    if delta <= tol * (1.0 + f.abs()) {
                        converged = true;
                    }
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                converged = true;
            }
            if converged {
                break;
            }
        }
        total_iters += iters;
        all_converged &= converged;
        if f > best_value {
            best_value = f;
            best_x = x;
        }
    }
    Ok(MaxEstimate {
        value: best_value,
        argmax: best_x,
        restarts,
        iterations: total_iters,
        converged: all_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{sample_tensor, Model};

    #[test]
    fn rank_one_and_diagonal() {
        let mut entries = vec![0.0; 16];
        entries[0] = 1.0; // (1,1,1,1)
        let t = DenseTensor::explicit(2, 4, entries).unwrap();
        let est = heuristic_fmax(&t, 10, 200, 1e-10, 1).unwrap();
        assert!((est.value - 1.0).abs() < 1e-8);
        assert!(est.argmax[0].abs() > 0.999);

        let t = DenseTensor::explicit(2, 2, vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let est = heuristic_fmax(&t, 10, 200, 1e-10, 1).unwrap();
        assert!((est.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn witness_consistency() {
        let t = sample_tensor(4, 3, Model::Gaussian, 41).unwrap();
        let est = heuristic_fmax(&t, 8, 300, 1e-10, 2).unwrap();
        let norm: f64 = est.argmax.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        let f = evaluate(&t, &est.argmax).unwrap();
        assert!((f - est.value).abs() <= 1e-10 * (1.0 + f.abs()));
    }

    #[test]
    fn matches_circle_grid_oracle_at_n2() {
        // At n = 2 the sphere is a circle; a fine angle grid is an
        // independent maximizer.
        for (d, seed) in [(3usize, 17u64), (4, 18)] {
            let t = sample_tensor(2, d, Model::Gaussian, seed).unwrap();
            let mut grid_best = f64::NEG_INFINITY;
            let steps = 200_000;
            for i in 0..steps {
                let theta = (i as f64) * std::f64::consts::TAU / steps as f64;
                let x = [theta.cos(), theta.sin()];
                grid_best = grid_best.max(evaluate(&t, &x).unwrap());
            }
            let est = heuristic_fmax(&t, 50, 500, 1e-12, 3).unwrap();
            assert!(
                (est.value - grid_best).abs() <= 0.02 * grid_best.abs(),
                "d={d}: {} vs grid {grid_best}",
                est.value
            );
        }
    }

    #[test]
    fn monotone_in_restarts() {
        let t = sample_tensor(5, 4, Model::Rademacher, 23).unwrap();
        let a = heuristic_fmax(&t, 4, 200, 1e-10, 7).unwrap();
        let b = heuristic_fmax(&t, 8, 200, 1e-10, 7).unwrap();
        assert!(b.value >= a.value);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let t = sample_tensor(3, 4, Model::Gaussian, 29).unwrap();
        let x = [0.3, -0.5, 0.8];
        let g = gradient(&t, &x);
        let h = 1e-6;
        for i in 0..3 {
            let mut xp = x;
            xp[i] += h;
            let mut xm = x;
            xm[i] -= h;
            let fd = (evaluate(&t, &xp).unwrap() - evaluate(&t, &xm).unwrap()) / (2.0 * h);
            assert!((g[i] - fd).abs() <= 1e-4 * (1.0 + fd.abs()), "{} vs {fd}", g[i]);
        }
    }
}
