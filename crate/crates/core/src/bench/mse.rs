//! Mean squared error of observable estimates against shot budget.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::UnitaryEnsemble;
use crate::error::{PqstError, Result};
use crate::operators::{expectation, Observable};
use crate::rng;
use crate::shadow::{plan_pqst, ShotDistribution};
use crate::state::DensityMatrix;

pub const DEFAULT_SHOTS: [u64; 4] = [100, 1_000, 10_000, 100_000];
pub const DEFAULT_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Partial ensembles chosen from the observable's activity support.
    Pqst,
    Pauli,
    Clifford,
    Mub,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pqst, Method::Pauli, Method::Clifford, Method::Mub];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pqst => "pqst",
            Method::Pauli => "pauli",
            Method::Clifford => "clifford",
            Method::Mub => "mub",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = PqstError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pqst" | "pqst-auto" => Ok(Method::Pqst),
            "pauli" => Ok(Method::Pauli),
            "clifford" => Ok(Method::Clifford),
            "mub" => Ok(Method::Mub),
            other => Err(PqstError::InvalidArgument(format!(
                "unknown method `{other}` (expected pqst, pqst-auto, pauli, clifford or mub)"
            ))),
        }
    }
}

/// State and observable with the labels written to the results.
#[derive(Debug, Clone)]
pub struct MseProblem {
    pub state_name: String,
    pub state: DensityMatrix,
    pub observable_name: String,
    pub observable: Observable,
    /// The state is known to be an X-state; pqst then uses ζ_X alone.
    pub x_prior: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MseResult {
    pub method: Method,
    pub n_qubits: usize,
    pub state: String,
    pub observable: String,
    pub shots: u64,
    pub trials: usize,
    pub mse: f64,
    pub stderr: f64,
    pub true_value: f64,
    /// Fitted log-log slope of this method over the whole grid, or `n/a`.
    pub slope_tag: String,
    pub seed: u64,
}

/// Shot laws and their share of the budget for one method.
pub struct MethodPlan {
    pub parts: Vec<(String, ShotDistribution)>,
}

impl MethodPlan {
    pub fn new(problem: &MseProblem, method: Method) -> Result<Self> {
        let n = problem.state.n_qubits();
        let single = |e: UnitaryEnsemble| -> Result<Vec<(String, ShotDistribution)>> {
            let d = ShotDistribution::new(&problem.state, &e, &problem.observable)?;
            Ok(vec![(e.name().to_string(), d)])
        };
        let parts = match method {
            Method::Pqst => plan_pqst(&problem.observable, problem.x_prior)?
                .into_iter()
                .map(|p| {
                    let d = ShotDistribution::new(&problem.state, &p.ensemble, &p.observable)?;
                    Ok((p.ensemble.name().to_string(), d))
                })
                .collect::<Result<_>>()?,
            Method::Pauli => single(UnitaryEnsemble::pauli(n)?)?,
            Method::Clifford => single(UnitaryEnsemble::clifford(n)?)?,
            Method::Mub => single(UnitaryEnsemble::mub(n)?)?,
        };
        Ok(Self { parts })
    }

    /// Even split of `shots`; the first parts take the remainder.
    pub fn split(&self, shots: u64) -> Result<Vec<u64>> {
        let k = self.parts.len() as u64;
        if shots < k {
            return Err(PqstError::InvalidArgument(format!(
                "{shots} shots cannot be split over {k} estimators"
            )));
        }
        Ok((0..k)
            .map(|i| shots / k + u64::from(i < shots % k))
            .collect())
    }

    /// Variance of the combined estimate at `shots`.
    pub fn variance(&self, shots: u64) -> Result<f64> {
        let split = self.split(shots)?;
        Ok(self
            .parts
            .iter()
            .zip(split)
            .map(|((_, d), m)| d.variance() / m as f64)
            .sum())
    }

    pub fn sample_estimate<R: rand::Rng + ?Sized>(&self, split: &[u64], rng: &mut R) -> f64 {
        self.parts
            .iter()
            .zip(split)
            .map(|((_, d), &m)| d.sample_mean(m, rng))
            .sum()
    }

    /// One estimate with its standard error, from the per-part sample
    /// variances added in quadrature.
    pub fn sample_with_error<R: rand::Rng + ?Sized>(
        &self,
        split: &[u64],
        rng: &mut R,
    ) -> (f64, f64) {
        let (mut value, mut var) = (0.0, 0.0);
        for ((_, d), &m) in self.parts.iter().zip(split) {
            let (mean, v) = d.sample_moments(m, rng);
            value += mean;
            var += v / m as f64;
        }
        (value, var.sqrt())
    }
}

#[derive(Debug, Clone)]
pub struct MseConfig {
    pub shots: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
}

impl MseConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            shots: DEFAULT_SHOTS.to_vec(),
            trials: DEFAULT_TRIALS,
            seed,
        }
    }
}

/// Squared errors of `trials` independent estimates at one budget. Trial `t`
/// draws from its own stream keyed by (method, shots, t).
pub fn squared_errors(
    plan: &MethodPlan,
    method: Method,
    truth: f64,
    shots: u64,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let split = plan.split(shots)?;
    let key = rng::tag(method.as_str());
    Ok((0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, &[key, shots, t]);
            (plan.sample_estimate(&split, &mut r) - truth).powi(2)
        })
        .collect())
}

pub fn mse_experiment(
    problem: &MseProblem,
    method: Method,
    cfg: &MseConfig,
) -> Result<Vec<MseResult>> {
    if cfg.trials < 2 {
        return Err(PqstError::InvalidArgument(
            "at least 2 trials are needed".into(),
        ));
    }
    if cfg.shots.is_empty() {
        return Err(PqstError::InvalidArgument("empty shot grid".into()));
    }
    let truth = expectation(&problem.observable, problem.state.op())?.value;
    let plan = MethodPlan::new(problem, method)?;
    let mut rows = Vec::with_capacity(cfg.shots.len());
    for &m in &cfg.shots {
        let errs = squared_errors(&plan, method, truth, m, cfg.trials, cfg.seed)?;
        let n = errs.len() as f64;
        let mse = errs.iter().sum::<f64>() / n;
        let var = errs.iter().map(|e| (e - mse).powi(2)).sum::<f64>() / (n - 1.0);
        rows.push(MseResult {
            method,
            n_qubits: problem.state.n_qubits(),
            state: problem.state_name.clone(),
            observable: problem.observable_name.clone(),
            shots: m,
            trials: cfg.trials,
            mse,
            stderr: (var / n).sqrt(),
            true_value: truth,
            slope_tag: String::new(),
            seed: cfg.seed,
        });
    }
    let tag = match fit_scaling(&rows) {
        Ok(fit) => format!("{:.4}", fit.slope),
        Err(_) => "n/a".to_string(),
    };
    rows.iter_mut().for_each(|r| r.slope_tag = tag.clone());
    Ok(rows)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares of `ln(mse)` on `ln(shots)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let mut budgets: Vec<f64> = points.iter().map(|p| p.0).collect();
    budgets.sort_by(f64::total_cmp);
    budgets.dedup();
    if budgets.len() < 4 {
        return Err(PqstError::DegenerateGrid(format!(
            "{} distinct budgets, need at least 4",
            budgets.len()
        )));
    }
    if budgets[budgets.len() - 1] / budgets[0] < 100.0 {
        return Err(PqstError::DegenerateGrid(
            "budgets span less than two decades".into(),
        ));
    }
    if points.iter().any(|&(m, v)| !(m > 0.0 && v > 0.0)) {
        return Err(PqstError::DegenerateGrid(
            "non-positive budget or error".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
    })
}

pub fn fit_scaling(results: &[MseResult]) -> Result<ScalingFit> {
    let points: Vec<(f64, f64)> = results.iter().map(|r| (r.shots as f64, r.mse)).collect();
    fit_power_law(&points)
}

pub fn write_csv<W: Write>(results: &[MseResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
