//! Certification run reports: dispatch to the certificate pipelines and emit
//! a schema-versioned, deterministic JSON record.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fmax::heuristic_fmax;
use crate::lower::{calibrate_and_build, matrix_hash, verify_certificate};
use crate::quotient::cert_upper_qd;
use crate::spectral::DEFAULT_TOL;
use crate::tensor::{DenseTensor, Model};
use crate::upper_even::cert_upper_even;
use crate::upper_odd3::cert_upper_odd3;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Upper,
    Lower,
    Both,
}

impl std::str::FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(Which::Upper),
            "lower" => Ok(Which::Lower),
            "both" => Ok(Which::Both),
            other => Err(Error::bad_input(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub q: usize,
    pub which: Which,
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    /// When set, volatile fields (timestamp, runtimes) are omitted so reports
    /// are byte-stable for fixed seeds and config.
    pub deterministic: bool,
}

impl RunConfig {
    pub fn new(q: usize, which: Which) -> Self {
        RunConfig {
            q,
            which,
            tol: DEFAULT_TOL,
            max_iter: 2000,
            restarts: 50,
            deterministic: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub d: usize,
    pub q: usize,
    pub model: Model,
    pub seed: Option<u64>,
}

/// One certified (or heuristic) bound, tagged with its producing operation
/// and tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundEntry {
    pub value: f64,
    pub method: String,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_even: Option<BoundEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_odd3: Option<BoundEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_qd: Option<BoundEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_qd: Option<BoundEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fmax_est: Option<BoundEntry>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u128>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub run_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub instance: Instance,
    pub results: Results,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_upper: Option<f64>,
    pub diagnostics: Diagnostics,
    pub config: RunConfig,
}

impl CertReport {
    /// Smallest certified upper bound present, if any.
    pub fn best_upper(&self) -> Option<f64> {
        [&self.results.upper_even, &self.results.upper_odd3, &self.results.upper_qd]
            .into_iter()
            .flatten()
            .map(|e| e.value)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

fn run_id(instance: &Instance, cfg: &RunConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(instance).expect("instance serialization"));
    hasher.update(serde_json::to_vec(cfg).expect("config serialization"));
    hasher.update(TOOL_VERSION.as_bytes());
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Dispatches one certification run.
///
/// Upper bounds: even `d` with `q = d` goes through the quotient certificate,
/// even `d` with `q` a larger multiple through the symmetrized power, `d = 3`
/// through the odd pipeline. Lower bounds exist only at even `q = d`.
pub fn run(tensor: &DenseTensor, cfg: &RunConfig) -> Result<CertReport> {
    let started = Instant::now();
    let d = tensor.order;
    let n = tensor.dim;
    let q = cfg.q;
    let instance = Instance {
        n,
        d,
        q,
        model: tensor.model,
        seed: tensor.seed,
    };
    let mut results = Results::default();
    let mut diagnostics = Diagnostics::default();

    let want_upper = matches!(cfg.which, Which::Upper | Which::Both);
    let want_lower = matches!(cfg.which, Which::Lower | Which::Both);

    if want_upper {
        if d % 2 == 0 {
            if q == d {
                let value = cert_upper_qd(tensor)?;
                results.upper_qd = Some(BoundEntry {
                    value,
                    method: "quotient".into(),
                    tol: cfg.tol,
                    iterations: None,
                    residual: None,
                    certified: Some(true),
                });
            } else {
                let c = cert_upper_even(tensor, q, cfg.tol, cfg.max_iter, tensor.seed.unwrap_or(0))?;
                results.upper_even = Some(BoundEntry {
                    value: c.bound,
                    method: "symmetrized-power".into(),
                    tol: cfg.tol,
                    iterations: Some(c.iterations),
                    residual: Some(c.residual),
                    certified: Some(true),
                });
            }
        } else if d == 3 {
            let c = cert_upper_odd3(tensor, q, cfg.tol, cfg.max_iter, tensor.seed.unwrap_or(0))?;
            results.upper_odd3 = Some(BoundEntry {
                value: c.bound,
                method: "odd3-pipeline".into(),
                tol: cfg.tol,
                iterations: Some(c.iterations),
                residual: None,
                certified: Some(true),
            });
        } else {
            return Err(Error::bad_input(format!(
                "no upper-bound certificate for odd d = {d} (only d = 3 is supported)"
            )));
        }
    }

    if want_lower {
        if d % 2 != 0 || q != d {
            return Err(Error::bad_input(format!(
                "lower bounds need even q = d; got d = {d}, q = {q}"
            )));
        }
        let cert = calibrate_and_build(tensor, q)?;
        let (verified, _) = verify_certificate(&cert, tensor);
        results.lower_qd = Some(BoundEntry {
            value: cert.inner_value,
            method: "moment-certificate".into(),
            tol: cfg.tol,
            iterations: None,
            residual: None,
            certified: Some(true),
        });
        diagnostics.c2 = Some(cert.c2);
        diagnostics.certificate_hash = Some(matrix_hash(&cert.m));
        diagnostics.certificate_verified = Some(verified);
    }

    let est = heuristic_fmax(tensor, cfg.restarts, cfg.max_iter, 1e-10, tensor.seed.unwrap_or(0))?;
    results.fmax_est = Some(BoundEntry {
        value: est.value,
        method: "power-iteration".into(),
        tol: 1e-10,
        iterations: Some(est.iterations),
        residual: None,
        certified: Some(false),
    });

    let mut report = CertReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.into(),
        run_id: run_id(&instance, cfg),
        timestamp: if cfg.deterministic {
            None
        } else {
            Some(format!("{:?}", std::time::SystemTime::now()))
        },
        instance,
        results,
        ratio_upper: None,
        diagnostics,
        config: cfg.clone(),
    };
    if let Some(upper) = report.best_upper() {
        if est.value.abs() > 1e-300 {
            report.ratio_upper = Some(upper / est.value);
        }
    }
    if !cfg.deterministic {
        report.diagnostics.runtime_ms = Some(started.elapsed().as_millis());
    }
    Ok(report)
}
