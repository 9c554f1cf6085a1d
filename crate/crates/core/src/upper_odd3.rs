//! Upper-bound certificate for 3-tensors: square the slice decomposition into
//! a degree-4 form, split off the diagonal excess, symmetrize the Kronecker
//! power of the remainder, and combine the two spectral terms.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::operator_norm;
use crate::tensor::{symmetrized_slices, DenseTensor, MAX_ENTRIES};
use crate::upper_even::SymmetrizedPowerOp;

/// Intermediate matrices of the 3-tensor pipeline, all `n^2`-dimensional and
/// indexed by pairs `(i, j)` with linear index `i * n + j` (0-based here).
#[derive(Debug, Clone)]
pub struct OddPipelineState {
    pub n: usize,
    pub q: usize,
    pub slices: Vec<DMatrix<f64>>,
    /// `tcal[(i,j),(k,l)] = sum_l_slice T_l[i,k] * T_l[j,l]`, so the quadratic
    /// form at `x (x) x` is `sum_l (x^T T_l x)^2`.
    pub tcal: DMatrix<f64>,
    /// Nonzero only at `((i,i),(j,j))`, holding `sum_l T_l[i,j]^2`.
    pub e: DMatrix<f64>,
    /// Diagonal of the shifted matrix: `e_prime[(i,j)] = E[(i,i),(j,j)] + E[(j,j),(i,i)]`.
    ///
    /// Its quadratic form at `x (x) x` is twice that of `e`; the certificate
    /// only needs it to dominate, so the factor is conservative.
    pub e_prime: Vec<f64>,
    /// `tcal - e`, the part fed to the symmetrized Kronecker power.
    pub t: DMatrix<f64>,
}

pub fn build_odd_state(tensor: &DenseTensor, q: usize) -> Result<OddPipelineState> {
    if tensor.order != 3 {
        return Err(Error::bad_input("odd pipeline needs order 3"));
    }
    if q == 0 || q % 4 != 0 {
        return Err(Error::bad_input(format!("q = {q} must be a positive multiple of 4")));
    }
    let n = tensor.dim;
    let m = n * n;
    if m * m > MAX_ENTRIES {
        return Err(Error::budget(format!("pipeline matrices of dimension {m}")));
    }
    let slices = symmetrized_slices(tensor)?;
    let mut tcal = DMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v: f64 = slices.iter().map(|s| s[(i, k)] * s[(j, l)]).sum();
                    tcal[(i * n + j, k * n + l)] = v;
                }
            }
        }
    }
    let mut e = DMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            e[(i * n + i, j * n + j)] = slices.iter().map(|s| s[(i, j)] * s[(i, j)]).sum();
        }
    }
    let mut e_prime = vec![0.0f64; m];
    for i in 0..n {
        for j in 0..n {
            e_prime[i * n + j] = e[(i * n + i, j * n + j)] + e[(j * n + j, i * n + i)];
        }
    }
    let t = &tcal - &e;
    Ok(OddPipelineState {
        n,
        q,
        slices,
        tcal,
        e,
        e_prime,
        t,
    })
}

/// One 3-tensor certification result.
#[derive(Debug, Clone)]
pub struct OddCert {
    /// Certified upper bound `sqrt(||B||^{4/q} + max(0, lambda_max(E')))`.
    pub bound: f64,
    pub b_norm: f64,
    /// Max diagonal entry of the diagonal shift matrix.
    pub e_prime_max: f64,
    /// True when the radicand had to be clamped at zero.
    pub clamped: bool,
    /// True when `lambda_max(E') > 5n`, outside the high-probability regime.
    pub e_prime_outlier: bool,
    pub iterations: usize,
}

pub fn cert_upper_odd3(
    tensor: &DenseTensor,
    q: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<OddCert> {
    let state = build_odd_state(tensor, q)?;
    let r = q / 4;
    let op = SymmetrizedPowerOp::new(state.t.clone(), r, state.n)?;
    let (b_norm, iterations) = operator_norm(&op, tol, max_iter, seed)?;
    let e_prime_max = state.e_prime.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let radicand = b_norm.powf(4.0 / q as f64) + e_prime_max.max(0.0);
    let clamped = radicand < 0.0;
    let bound = radicand.max(0.0).sqrt();
    Ok(OddCert {
        bound,
        b_norm,
        e_prime_max,
        clamped,
        e_prime_outlier: e_prime_max > 5.0 * state.n as f64,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DEFAULT_TOL;
    use crate::tensor::{sample_tensor, Model};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quad_form(m: &DMatrix<f64>, x: &[f64]) -> f64 {
        let n = x.len();
        let xx = DVector::from_fn(n * n, |idx, _| x[idx / n] * x[idx % n]);
        (xx.transpose() * m * &xx)[(0, 0)]
    }

    #[test]
    fn scalar_pipeline() {
        let a = 1.7;
        let t = DenseTensor::explicit(1, 3, vec![a]).unwrap();
        let s = build_odd_state(&t, 4).unwrap();
        assert!((s.tcal[(0, 0)] - a * a).abs() < 1e-15);
        assert!((s.e[(0, 0)] - a * a).abs() < 1e-15);
        assert_eq!(s.t[(0, 0)], 0.0);
        assert!((s.e_prime[0] - 2.0 * a * a).abs() < 1e-15);

        let c = cert_upper_odd3(&t, 4, DEFAULT_TOL, 100, 1).unwrap();
        assert!((c.bound - a * 2f64.sqrt()).abs() < 1e-12);
        // fmax of a*x^3 on the 1-sphere is a.
        assert!(c.bound >= a);
    }

    #[test]
    fn g_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let t = sample_tensor(4, 3, Model::Gaussian, 55).unwrap();
        let s = build_odd_state(&t, 4).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let lhs = quad_form(&s.tcal, &x);
            let xv = DVector::from_vec(x.clone());
            let rhs: f64 = s
                .slices
                .iter()
                .map(|sl| {
                    let v = (xv.transpose() * sl * &xv)[(0, 0)];
                    v * v
                })
                .sum();
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn e_prime_form_doubles_e_form() {
        // e_prime collects the symmetric pair E[(i,i),(j,j)] + E[(j,j),(i,i)],
        // and those two source entries are equal, so the diagonal form is
        // exactly twice the form of e.
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let t = sample_tensor(3, 3, Model::Rademacher, 56).unwrap();
        let s = build_odd_state(&t, 4).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let e_form = quad_form(&s.e, &x);
            let ep_form: f64 = (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .map(|(i, j)| s.e_prime[i * 3 + j] * x[i] * x[i] * x[j] * x[j])
                .sum();
            assert!((ep_form - 2.0 * e_form).abs() <= 1e-10 * (1.0 + e_form.abs()));
        }
    }

    #[test]
    fn zero_tensor_and_bad_inputs() {
        let z = DenseTensor::zeros(2, 3).unwrap();
        let c = cert_upper_odd3(&z, 4, DEFAULT_TOL, 100, 1).unwrap();
        assert_eq!(c.bound, 0.0);

        assert!(build_odd_state(&DenseTensor::zeros(2, 4).unwrap(), 4).is_err());
        assert!(build_odd_state(&z, 6).is_err());
    }

    #[test]
    fn bound_dominates_values_on_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for seed in 0..5 {
            let t = sample_tensor(4, 3, Model::Rademacher, 100 + seed).unwrap();
            let c = cert_upper_odd3(&t, 4, DEFAULT_TOL, 400, 1).unwrap();
            for _ in 0..20 {
                let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let x: Vec<f64> = x.iter().map(|v| v / norm).collect();
                let f = crate::tensor::evaluate(&t, &x).unwrap();
                assert!(f <= c.bound + 1e-7, "seed {seed}: {f} > {}", c.bound);
            }
        }
    }
}
