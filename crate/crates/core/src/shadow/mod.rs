//! Shadow estimation: single shots, partial shadow estimators (PSEs) in
//! sampled and exact ensemble mode, PSE combination and observable readout.

mod distribution;
mod plan;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use distribution::ShotDistribution;
pub use plan::{plan_pqst, PlannedPse};

use crate::channels::{
    depolarizing_inverse, per_site_pauli_inverse, pseudo_inverse, rotated_projector,
};
use crate::ensembles::{InverseKind, UnitaryEnsemble};
use crate::error::{PqstError, Result};
use crate::linalg::{Operator, C64};
use crate::operators::{activity_support, rotate_to_x_structure, ActivityPattern, Observable};
use crate::state::{
    born_from_operator, conjugate_by_unitary, draw_index, Bitstring, DensityMatrix,
};

const CHUNK: u64 = 4096;

/// One measurement: which unitary was applied and the observed bitstring.
#[derive(Debug, Clone)]
pub struct ShadowRecord {
    /// Member index for explicit ensembles.
    pub member: Option<usize>,
    /// The applied unitary when it was drawn by a sampler.
    pub sampled: Option<Operator>,
    pub outcome: Bitstring,
}

pub fn single_shot<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    ensemble: &UnitaryEnsemble,
    rng: &mut R,
) -> Result<ShadowRecord> {
    check_register(rho, ensemble)?;
    let (member, u) = ensemble.sample_member(rng)?;
    let probs = born_from_operator(&u.conjugate(rho.op())?);
    let outcome = Bitstring::new(ensemble.n_qubits(), draw_index(&probs, rng.random()))?;
    Ok(ShadowRecord {
        member,
        sampled: if member.is_none() { Some(u) } else { None },
        outcome,
    })
}

fn check_register(rho: &DensityMatrix, ensemble: &UnitaryEnsemble) -> Result<()> {
    if rho.n_qubits() != ensemble.n_qubits() {
        return Err(PqstError::DimensionMismatch {
            left: 1 << ensemble.n_qubits(),
            right: rho.dim(),
        });
    }
    Ok(())
}

/// Inverse map applied to `U†|k⟩⟨k|U`, following the ensemble's inverse kind.
fn shadow_for(
    ensemble: &UnitaryEnsemble,
    member: Option<usize>,
    u: &Operator,
    k: usize,
) -> Result<Operator> {
    let n = ensemble.n_qubits();
    match ensemble.inverse_kind() {
        InverseKind::Pseudo => Ok(pseudo_inverse(ensemble.p(), &rotated_projector(u, k))),
        InverseKind::GlobalDepolarizing => Ok(depolarizing_inverse(&rotated_projector(u, k))),
        InverseKind::PerSitePauli => {
            let words = ensemble.local_words().ok_or_else(|| {
                PqstError::InvalidArgument("per-site inverse needs local words".into())
            })?;
            let word = &words[member.expect("local ensembles are explicit")];
            let factors: Vec<Operator> = word
                .iter()
                .enumerate()
                .map(|(q, g)| rotated_projector(&g.matrix(), (k >> (n - 1 - q)) & 1))
                .collect();
            per_site_pauli_inverse(n, &factors)
        }
    }
}

/// Single-shot shadow of a record.
pub fn record_shadow(ensemble: &UnitaryEnsemble, record: &ShadowRecord) -> Result<Operator> {
    let k = record.outcome.index();
    match (record.member, &record.sampled) {
        (Some(i), _) => shadow_for(ensemble, Some(i), &ensemble.members()?[i], k),
        (None, Some(u)) => shadow_for(ensemble, None, u, k),
        (None, None) => Err(PqstError::InvalidArgument(
            "record without a unitary".into(),
        )),
    }
}

/// Per-entry standard errors of a sampled estimate, row-major.
#[derive(Debug, Clone, Serialize)]
pub struct EntryErrors {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PartialShadowEstimator {
    pub estimate: Operator,
    pub ensemble: String,
    pub p: f64,
    /// Number of shots; 0 in exact ensemble mode.
    pub shots: u64,
    pub trusted: BTreeSet<ActivityPattern>,
    pub errors: Option<EntryErrors>,
}

impl PartialShadowEstimator {
    pub fn n_qubits(&self) -> usize {
        self.estimate.n_qubits()
    }

    pub fn is_trusted(&self, i: usize, j: usize) -> bool {
        self.trusted
            .contains(&ActivityPattern::from_mask(self.n_qubits(), i ^ j))
    }
}

/// Exact ensemble-mode PSE: every member once, outcome projectors weighted
/// by their Born probabilities, no sampling.
pub fn ensemble_pse(
    rho: &DensityMatrix,
    ensemble: &UnitaryEnsemble,
) -> Result<PartialShadowEstimator> {
    check_register(rho, ensemble)?;
    let populations = ensemble
        .members()?
        .iter()
        .map(|u| Ok(u.conjugate(rho.op())?.diag().iter().map(|z| z.re).collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    pse_from_populations(ensemble, &populations, 0)
}

/// PSE from measured populations, one row per member in member order, as in
/// diagonal tomography. `shots` is recorded as given.
pub fn pse_from_populations(
    ensemble: &UnitaryEnsemble,
    populations: &[Vec<f64>],
    shots: u64,
) -> Result<PartialShadowEstimator> {
    let members = ensemble.members()?;
    let d = 1usize << ensemble.n_qubits();
    if populations.len() != members.len() || populations.iter().any(|p| p.len() != d) {
        return Err(PqstError::InvalidArgument(format!(
            "expected {} population rows of length {d}",
            members.len()
        )));
    }
    let mut est = Operator::zeros(d)?;
    let w = 1.0 / members.len() as f64;
    for (i, (u, pops)) in members.iter().zip(populations).enumerate() {
        for (k, &pk) in pops.iter().enumerate() {
            if pk != 0.0 {
                est.add_scaled(C64::new(w * pk, 0.0), &shadow_for(ensemble, Some(i), u, k)?);
            }
        }
    }
    Ok(PartialShadowEstimator {
        estimate: est,
        ensemble: ensemble.name().to_string(),
        p: ensemble.p(),
        shots,
        trusted: ensemble.trusted(),
        errors: None,
    })
}

/// Running first and second moments of shot shadows, entrywise.
#[derive(Clone)]
struct Moments {
    sum: Vec<C64>,
    sq_re: Vec<f64>,
    sq_im: Vec<f64>,
}

impl Moments {
    fn new(d: usize) -> Self {
        Self {
            sum: vec![C64::new(0.0, 0.0); d * d],
            sq_re: vec![0.0; d * d],
            sq_im: vec![0.0; d * d],
        }
    }

    fn add(&mut self, s: &Operator, weight: f64) {
        for (idx, z) in s.as_slice().iter().enumerate() {
            self.sum[idx] += z * weight;
            self.sq_re[idx] += weight * z.re * z.re;
            self.sq_im[idx] += weight * z.im * z.im;
        }
    }

    fn merge(&mut self, other: &Moments) {
        for idx in 0..self.sum.len() {
            self.sum[idx] += other.sum[idx];
            self.sq_re[idx] += other.sq_re[idx];
            self.sq_im[idx] += other.sq_im[idx];
        }
    }

    fn finish(self, d: usize, shots: u64) -> Result<(Operator, EntryErrors)> {
        let m = shots as f64;
        let mean: Vec<C64> = self.sum.iter().map(|z| z / m).collect();
        let se = |sq: &[f64], part: fn(&C64) -> f64| -> Vec<f64> {
            sq.iter()
                .zip(&mean)
                .map(|(s, z)| {
                    if shots < 2 {
                        return f64::INFINITY;
                    }
                    let var = (s / m - part(z).powi(2)).max(0.0) * m / (m - 1.0);
                    (var / m).sqrt()
                })
                .collect()
        };
        let errors = EntryErrors {
            re: se(&self.sq_re, |z| z.re),
            im: se(&self.sq_im, |z| z.im),
        };
        Ok((Operator::from_vec(d, mean)?, errors))
    }
}

/// Shot-averaged PSE. Shots are processed in fixed chunks, each on its own
/// stream derived from one draw of `rng`, so the result does not depend on
/// the number of worker threads.
pub fn sampled_pse<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    ensemble: &UnitaryEnsemble,
    shots: u64,
    rng: &mut R,
) -> Result<PartialShadowEstimator> {
    check_register(rho, ensemble)?;
    if shots == 0 {
        return Err(PqstError::InvalidArgument(
            "shots must be at least 1".into(),
        ));
    }
    let seed: u64 = rng.random();
    let d = rho.dim();
    let chunks: Vec<u64> = (0..shots.div_ceil(CHUNK)).collect();
    let chunk_len = |c: u64| CHUNK.min(shots - c * CHUNK);

    let moments = if ensemble.is_explicit() {
        let members = ensemble.members()?;
        let probs: Vec<Vec<f64>> = members
            .iter()
            .map(|u| u.conjugate(rho.op()).map(|r| born_from_operator(&r)))
            .collect::<Result<_>>()?;
        let counts: Vec<Vec<u64>> = chunks
            .par_iter()
            .map(|&c| {
                let mut r = crate::rng::stream(seed, &[c]);
                let mut counts = vec![0u64; members.len() * d];
                for _ in 0..chunk_len(c) {
                    let i = r.random_range(0..members.len());
                    let k = draw_index(&probs[i], r.random());
                    counts[i * d + k] += 1;
                }
                counts
            })
            .collect();
        let mut total = vec![0u64; members.len() * d];
        for c in &counts {
            for (t, x) in total.iter_mut().zip(c) {
                *t += x;
            }
        }
        let mut mom = Moments::new(d);
        for (idx, &c) in total.iter().enumerate() {
            if c > 0 {
                let (i, k) = (idx / d, idx % d);
                mom.add(&shadow_for(ensemble, Some(i), &members[i], k)?, c as f64);
            }
        }
        mom
    } else {
        let parts: Vec<Moments> = chunks
            .par_iter()
            .map(|&c| -> Result<Moments> {
                let mut r = crate::rng::stream(seed, &[c]);
                let mut mom = Moments::new(d);
                for _ in 0..chunk_len(c) {
                    let (_, u) = ensemble.sample_member(&mut r)?;
                    let probs = born_from_operator(&u.conjugate(rho.op())?);
                    let k = draw_index(&probs, r.random());
                    mom.add(&shadow_for(ensemble, None, &u, k)?, 1.0);
                }
                Ok(mom)
            })
            .collect::<Result<_>>()?;
        let mut mom = Moments::new(d);
        for p in &parts {
            mom.merge(p);
        }
        mom
    };
    let (estimate, errors) = moments.finish(d, shots)?;
    Ok(PartialShadowEstimator {
        estimate,
        ensemble: ensemble.name().to_string(),
        p: ensemble.p(),
        shots,
        trusted: ensemble.trusted(),
        errors: Some(errors),
    })
}

/// Owner index for every activity pattern trusted by some PSE.
fn pattern_owners(pses: &[PartialShadowEstimator]) -> Result<BTreeMap<ActivityPattern, usize>> {
    let n = pses
        .first()
        .ok_or_else(|| PqstError::InvalidArgument("no estimators given".into()))?
        .n_qubits();
    if let Some(p) = pses.iter().find(|p| p.n_qubits() != n) {
        return Err(PqstError::DimensionMismatch {
            left: 1 << n,
            right: p.estimate.dim(),
        });
    }
    let mut owners = BTreeMap::new();
    let mut ambiguous = BTreeSet::new();
    for (idx, pse) in pses.iter().enumerate() {
        for &pat in &pse.trusted {
            if owners.insert(pat, idx).is_some() {
                ambiguous.insert(pat);
            }
        }
    }
    if !ambiguous.is_empty() {
        return Err(PqstError::AmbiguousPatterns(
            ambiguous.into_iter().collect(),
        ));
    }
    Ok(owners)
}

/// Full-matrix estimate: each entry from the single PSE trusting its
/// activity pattern, then Hermitised.
pub fn combine_pses(pses: &[PartialShadowEstimator]) -> Result<Operator> {
    let owners = pattern_owners(pses)?;
    let n = pses[0].n_qubits();
    let missing: Vec<ActivityPattern> = ActivityPattern::all(n)
        .into_iter()
        .filter(|p| !owners.contains_key(p))
        .collect();
    if !missing.is_empty() {
        return Err(PqstError::UncoveredPatterns(missing));
    }
    let d = 1usize << n;
    let mut out = Operator::zeros(d)?;
    for i in 0..d {
        for j in 0..d {
            let owner = owners[&ActivityPattern::from_mask(n, i ^ j)];
            out[(i, j)] = pses[owner].estimate[(i, j)];
        }
    }
    Ok(out.hermitian_part())
}

/// `Tr(O ρ̂)`, each term read from the PSE that trusts its pattern.
pub fn estimate_observable(obs: &Observable, pses: &[PartialShadowEstimator]) -> Result<f64> {
    let owners = pattern_owners(pses)?;
    if obs.n_qubits() != pses[0].n_qubits() {
        return Err(PqstError::DimensionMismatch {
            left: 1 << pses[0].n_qubits(),
            right: 1 << obs.n_qubits(),
        });
    }
    let mut unsupported = Vec::new();
    let mut value = 0.0;
    for term in obs.terms() {
        let single = Observable::single(term.clone());
        let pat = *activity_support(&single).iter().next().expect("one term");
        match owners.get(&pat) {
            Some(&o) => value += crate::operators::expectation(&single, &pses[o].estimate)?.value,
            None => unsupported.push(format!("{term} (pattern {pat})")),
        }
    }
    if unsupported.is_empty() {
        Ok(value)
    } else {
        Err(PqstError::UnsupportedObservable(unsupported))
    }
}

/// How a PSE is obtained.
pub enum Mode<'a, R: Rng + ?Sized> {
    Exact,
    Sampled { shots: u64, rng: &'a mut R },
}

/// Rotation path for non-X observables: estimate `P = U O U†` with the ζ_X
/// PSE of `U ρ U†`.
pub fn x_shadow_rotated<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    obs: &Observable,
    mode: Mode<'_, R>,
) -> Result<f64> {
    let rot = rotate_to_x_structure(obs)?;
    let rotated = conjugate_by_unitary(rho, &rot.unitary)?;
    let zx = UnitaryEnsemble::zeta_x(rho.n_qubits())?;
    let pse = match mode {
        Mode::Exact => ensemble_pse(&rotated, &zx)?,
        Mode::Sampled { shots, rng } => sampled_pse(&rotated, &zx, shots, rng)?,
    };
    estimate_observable(&rot.rotated, &[pse])
}
