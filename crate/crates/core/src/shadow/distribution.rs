//! Exact law of the single-shot value `Tr(O·ρ̂_shot)`.
//!
//! A shot estimate takes finitely many values, so its law is a list of
//! atoms. The mean of `M` shots can then be drawn from multinomial counts in
//! time independent of `M`.

use rand::Rng;

use super::shadow_for;
use crate::ensembles::{stabilizer_states, InverseKind, UnitaryEnsemble};
use crate::error::{PqstError, Result};
use crate::linalg::Operator;
use crate::operators::Observable;
use crate::state::{draw_index, sample_counts, DensityMatrix};

const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ShotDistribution {
    probs: Vec<f64>,
    values: Vec<f64>,
    clamped: f64,
}

fn trace_product(a: &Operator, b: &Operator) -> f64 {
    let d = a.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn expect_vec(op: &Operator, v: &[crate::linalg::C64]) -> f64 {
    let ov = op.apply(v);
    v.iter().zip(&ov).map(|(a, b)| (a.conj() * b).re).sum()
}

impl ShotDistribution {
    pub fn new(rho: &DensityMatrix, ensemble: &UnitaryEnsemble, obs: &Observable) -> Result<Self> {
        let n = ensemble.n_qubits();
        if rho.n_qubits() != n || obs.n_qubits() != n {
            return Err(PqstError::DimensionMismatch {
                left: 1 << n,
                right: rho.dim().max(obs.matrix().dim()),
            });
        }
        let d = rho.dim();
        let o = obs.matrix();
        let mut atoms = Vec::new();
        if ensemble.is_explicit() {
            let members = ensemble.members()?;
            let w = 1.0 / members.len() as f64;
            for (i, u) in members.iter().enumerate() {
                let rotated = u.conjugate(rho.op())?;
                for k in 0..d {
                    let value = trace_product(o, &shadow_for(ensemble, Some(i), u, k)?);
                    atoms.push((w * rotated[(k, k)].re, value));
                }
            }
        } else {
            // Uniform Cliffords send basis outcomes uniformly onto stabilizer
            // states, so the shot law only needs those states.
            if ensemble.inverse_kind() != InverseKind::GlobalDepolarizing {
                return Err(PqstError::InvalidArgument(format!(
                    "no shot law for `{}` with a {} inverse",
                    ensemble.name(),
                    ensemble.inverse_kind()
                )));
            }
            let states = stabilizer_states(n)?;
            let w = d as f64 / states.len() as f64;
            let tr_o = o.trace().re;
            for phi in states.iter() {
                let value = (d + 1) as f64 * expect_vec(o, phi) - tr_o;
                atoms.push((w * expect_vec(rho.op(), phi), value));
            }
        }
        Ok(Self::from_atoms(atoms))
    }

    /// Merges equal values and clamps negative mass (from non-physical
    /// printed states) before renormalising.
    fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut probs: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (p, v) in atoms {
            match values.last() {
                Some(&last) if (v - last).abs() <= MERGE_TOL * last.abs().max(1.0) => {
                    *probs.last_mut().expect("paired") += p;
                }
                _ => {
                    probs.push(p);
                    values.push(v);
                }
            }
        }
        let clamped = probs
            .iter()
            .filter(|&&p| p < 0.0)
            .fold(0.0, |acc, p| acc - p);
        probs.iter_mut().for_each(|p| *p = p.max(0.0));
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Self {
            probs,
            values,
            clamped,
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.probs.iter().copied().zip(self.values.iter().copied())
    }

    /// Probability mass removed because it came out negative.
    pub fn clamped_mass(&self) -> f64 {
        self.clamped
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(p, v)| p * v).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.atoms().map(|(p, v)| p * (v - mu).powi(2)).sum()
    }

    pub fn sample_shot<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.values[draw_index(&self.probs, rng.random())]
    }

    /// Mean of `shots` independent shots, drawn through multinomial counts.
    pub fn sample_mean<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> f64 {
        let counts = sample_counts(&self.probs, shots, rng);
        let total: f64 = counts
            .iter()
            .zip(&self.values)
            .map(|(&c, v)| c as f64 * v)
            .sum();
        total / shots as f64
    }

    /// Mean of `shots` shots together with the sample variance of a single
    /// shot. Needs at least two shots for the variance.
    pub fn sample_moments<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> (f64, f64) {
        let counts = sample_counts(&self.probs, shots, rng);
        let m = shots as f64;
        let mean = counts
            .iter()
            .zip(&self.values)
            .map(|(&c, v)| c as f64 * v)
            .sum::<f64>()
            / m;
        let ss: f64 = counts
            .iter()
            .zip(&self.values)
            .map(|(&c, v)| c as f64 * (v - mean).powi(2))
            .sum();
        (mean, if shots > 1 { ss / (m - 1.0) } else { f64::NAN })
    }
}
