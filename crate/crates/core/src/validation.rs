//! Self-checks of the closed forms and channel identities against the exact
//! ensemble computation on random states.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{depolarizing_channel, forward_channel_exact, golden, pseudo_inverse};
use crate::ensembles::{InverseKind, UnitaryEnsemble};
use crate::error::Result;
use crate::gates::{hadamard, hs};
use crate::linalg::Operator;
use crate::operators::ActivityPattern;
use crate::shadow::ensemble_pse;
use crate::state::{random_density_matrix, DensityMatrix};

const TOL: f64 = 1e-10;

type ClosedForm = fn(&Operator) -> Operator;

#[derive(Debug, Clone, Serialize)]
pub struct ValidationCheck {
    pub label: String,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Negative controls pass when the residual exceeds the tolerance.
    pub expect_mismatch: bool,
    pub passed: bool,
}

impl ValidationCheck {
    fn new(
        label: impl Into<String>,
        max_residual: f64,
        tolerance: f64,
        expect_mismatch: bool,
    ) -> Self {
        let passed = if expect_mismatch {
            max_residual > tolerance
        } else {
            max_residual <= tolerance
        };
        Self {
            label: label.into(),
            max_residual,
            tolerance,
            expect_mismatch,
            passed,
        }
    }

    fn exact(label: impl Into<String>, ok: bool) -> Self {
        Self::new(label, if ok { 0.0 } else { f64::INFINITY }, 0.0, false)
    }
}

impl fmt::Display for ValidationCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.expect_mismatch { ">" } else { "<=" };
        write!(
            f,
            "{} {}  residual {:.3e} {rel} {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.label,
            self.max_residual,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub states: usize,
    pub seed: u64,
    /// Added to every pseudo-inverse strength in the closed-form checks.
    pub p_offset: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            states: 20,
            seed: 0,
            p_offset: 0.0,
        }
    }
}

fn random_states(n: usize, count: usize, seed: u64) -> Result<Vec<DensityMatrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32));
    (0..count)
        .map(|_| random_density_matrix(n, &mut rng))
        .collect()
}

fn max_over<F>(states: &[DensityMatrix], mut f: F) -> Result<f64>
where
    F: FnMut(&DensityMatrix) -> Result<f64>,
{
    states.iter().try_fold(0.0f64, |m, s| Ok(m.max(f(s)?)))
}

/// Largest deviation on entries whose pattern lies in `patterns`.
pub fn pattern_residual(a: &Operator, b: &Operator, patterns: &[ActivityPattern]) -> f64 {
    let d = a.dim();
    let n = a.n_qubits();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if patterns.contains(&ActivityPattern::from_mask(n, i ^ j)) {
                worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
    }
    worst
}

fn single_unitary_channel(u: &Operator, rho: &Operator) -> Result<Operator> {
    let rotated = u.conjugate(rho)?;
    u.adjoint().conjugate(&Operator::diagonal(&rotated.diag())?)
}

/// Closed forms of the two-qubit sets and single-unitary channels.
pub fn golden_checks(opts: &ValidationOptions) -> Result<Vec<ValidationCheck>> {
    let states = random_states(2, opts.states, opts.seed)?;
    let dp = opts.p_offset;
    let mut out = Vec::new();
    let sets: [(&str, UnitaryEnsemble, ClosedForm); 4] = [
        (
            "zeta-X closed form (p=5)",
            UnitaryEnsemble::zeta_x(2)?,
            golden::zeta_x,
        ),
        (
            "zeta-1 closed form (p=5)",
            UnitaryEnsemble::zeta_m_active(2, 1)?,
            golden::zeta_1,
        ),
        (
            "zeta-1a closed form (p=3)",
            UnitaryEnsemble::zeta_a(2, &[1])?,
            golden::zeta_1a,
        ),
        (
            "zeta-1b closed form (p=3)",
            UnitaryEnsemble::zeta_a(2, &[2])?,
            golden::zeta_1b,
        ),
    ];
    for (label, e, form) in sets {
        let r = max_over(&states, |s| {
            let est = pseudo_inverse(e.p() + dp, &forward_channel_exact(&e, s.op())?);
            Ok(est.max_abs_diff(&form(s.op())))
        })?;
        out.push(ValidationCheck::new(label, r, TOL, false));
    }
    let hh = hadamard().kron(&hadamard())?;
    let hshs = hs().kron(&hs())?;
    for p in [3.0, 5.0, 7.0] {
        for (name, u, kernel) in [
            ("H⊗H", &hh, golden::b_h as fn(&Operator) -> Operator),
            ("HS⊗HS", &hshs, golden::b_hs),
        ] {
            let r = max_over(&states, |s| {
                let est = pseudo_inverse(p + dp, &single_unitary_channel(u, s.op())?);
                Ok(est.max_abs_diff(&golden::single_unitary(p, &kernel(s.op()))))
            })?;
            out.push(ValidationCheck::new(
                format!("single unitary {name} closed form (p={p})"),
                r,
                TOL,
                false,
            ));
        }
    }
    Ok(out)
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    ActivityPattern::all(n)
        .into_iter()
        .rev()
        .filter(|p| p.order() > 0)
        .map(|p| p.qubits())
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn protocol_check(
    label: String,
    e: &UnitaryEnsemble,
    expected_size: usize,
    states: &[DensityMatrix],
) -> Result<Vec<ValidationCheck>> {
    let mut out = vec![ValidationCheck::exact(
        format!("{label}: {expected_size} members, p = {expected_size}"),
        e.member_count() == Some(expected_size) && e.p() == expected_size as f64,
    )];
    let patterns: Vec<ActivityPattern> = e.trusted().into_iter().collect();
    let r = max_over(states, |s| {
        Ok(pattern_residual(
            &ensemble_pse(s, e)?.estimate,
            s.op(),
            &patterns,
        ))
    })?;
    out.push(ValidationCheck::new(
        format!("{label}: trusted entries"),
        r,
        TOL,
        false,
    ));
    Ok(out)
}

/// Sizes, strengths and recovered entries for every set, union and
/// m-active set at `n` qubits.
pub fn protocol_checks(n: usize, opts: &ValidationOptions) -> Result<Vec<ValidationCheck>> {
    let states = random_states(n, opts.states, opts.seed.wrapping_add(1))?;
    let mut out = Vec::new();
    let all = subsets(n);
    for a in &all {
        let e = UnitaryEnsemble::zeta_a(n, a)?;
        out.extend(protocol_check(
            format!("n={n} {}", e.name()),
            &e,
            (1 << a.len()) + 1,
            &states,
        )?);
    }
    for m in 1..=n {
        let same: Vec<&Vec<usize>> = all.iter().filter(|a| a.len() == m).collect();
        for pick in 1usize..1 << same.len() {
            if pick.count_ones() < 2 {
                continue;
            }
            let parts: Vec<Vec<usize>> = (0..same.len())
                .filter(|i| pick & (1 << i) != 0)
                .map(|i| same[i].clone())
                .collect();
            let e = UnitaryEnsemble::zeta_union(n, &parts)?;
            out.extend(protocol_check(
                format!("n={n} {}", e.name()),
                &e,
                parts.len() * (1 << m) + 1,
                &states,
            )?);
        }
        let e = UnitaryEnsemble::zeta_m_active(n, m)?;
        out.extend(protocol_check(
            format!("n={n} {m}-active set"),
            &e,
            binomial(n, m) * (1 << m) + 1,
            &states,
        )?);
    }
    Ok(out)
}

/// Global ensembles against the depolarizing map, and the local Pauli set
/// with its per-site inverse.
pub fn baseline_checks(opts: &ValidationOptions) -> Result<Vec<ValidationCheck>> {
    let mut out = Vec::new();
    let states2 = random_states(2, opts.states, opts.seed.wrapping_add(2))?;
    for e in [UnitaryEnsemble::clifford(2)?, UnitaryEnsemble::mub(2)?] {
        let r = max_over(&states2, |s| {
            Ok(forward_channel_exact(&e, s.op())?.max_abs_diff(&depolarizing_channel(s.op())))
        })?;
        out.push(ValidationCheck::new(
            format!(
                "n=2 {} ({} members) channel is depolarizing",
                e.name(),
                e.member_count().unwrap_or(0)
            ),
            r,
            TOL,
            false,
        ));
    }
    for n in 1..=3 {
        let states = random_states(n, opts.states, opts.seed.wrapping_add(3))?;
        let e = UnitaryEnsemble::pauli(n)?;
        let r = max_over(&states, |s| {
            Ok(ensemble_pse(s, &e)?.estimate.max_abs_diff(s.op()))
        })?;
        out.push(ValidationCheck::new(
            format!("n={n} local Pauli set with per-site inverse reconstructs the state"),
            r,
            TOL,
            false,
        ));
    }
    Ok(out)
}

/// The per-site inverse applied to ζ_X outcomes must miss the trusted entries.
pub fn negative_control(opts: &ValidationOptions) -> Result<ValidationCheck> {
    let states = random_states(2, opts.states, opts.seed.wrapping_add(4))?;
    let e = UnitaryEnsemble::zeta_x(2)?.with_inverse(InverseKind::PerSitePauli)?;
    let patterns: Vec<ActivityPattern> = e.trusted().into_iter().collect();
    let r = max_over(&states, |s| {
        Ok(pattern_residual(
            &ensemble_pse(s, &e)?.estimate,
            s.op(),
            &patterns,
        ))
    })?;
    Ok(ValidationCheck::new(
        "zeta-X with per-site inverse misses trusted entries",
        r,
        0.01,
        true,
    ))
}

pub fn run_validation(opts: &ValidationOptions) -> Result<Vec<ValidationCheck>> {
    let mut out = golden_checks(opts)?;
    for n in 2..=3 {
        out.extend(protocol_checks(n, opts)?);
    }
    out.extend(baseline_checks(opts)?);
    out.push(negative_control(opts)?);
    Ok(out)
}
