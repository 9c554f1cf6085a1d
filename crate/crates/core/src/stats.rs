//! Small statistics helpers for sweep summaries: medians and log-log slope
//! fits with standard errors.

use crate::error::{Error, Result};

/// Median of a sample; averages the middle pair for even lengths.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::bad_input("median of empty sample"));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN samples"));
    let mid = v.len() / 2;
    Ok(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

/// Ordinary least squares of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::bad_input("need at least two matched points"));
    }
    if xs.iter().chain(ys).any(|&v| v <= 0.0) {
        return Err(Error::bad_input("log-log fit needs positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::bad_input("degenerate abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if lx.len() > 2 {
        let sse: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
            .sum();
        (sse / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit {
        slope,
        intercept,
        stderr,
    })
}
