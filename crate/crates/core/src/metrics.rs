//! State metrics: fidelity, purity, entanglement entropy, logarithmic negativity.

use serde::Serialize;

use crate::eigen::{eigvalsh, sqrt_psd};
use crate::error::{PqstError, Result};
use crate::linalg::Operator;
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Fidelity {
    pub value: f64,
    /// Total magnitude of negative eigenvalues of `√ρ σ √ρ` that were clamped.
    pub clamped_mass: f64,
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`. `sigma` only needs to be Hermitian;
/// non-physical estimates are handled by clamping.
pub fn fidelity(rho: &DensityMatrix, sigma: &Operator) -> Result<Fidelity> {
    if rho.dim() != sigma.dim() {
        return Err(PqstError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let (root, _) = sqrt_psd(rho.op())?;
    let inner = (&(&root * sigma) * &root).hermitian_part();
    let vals = eigvalsh(&inner)?;
    let clamped_mass = vals
        .iter()
        .filter(|&&x| x < 0.0)
        .fold(0.0, |acc, x| acc - x);
    let s: f64 = vals.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok(Fidelity {
        value: s * s,
        clamped_mass,
    })
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    (rho.op() * rho.op()).trace().re
}

/// Shannon entropy (base 2) of a spectrum, ignoring values below 1e-14.
fn entropy_bits(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&x| x > 1e-14)
        .map(|&x| -x * x.log2())
        .sum()
}

fn subset_mask(n: usize, qubits: &[usize]) -> Result<usize> {
    let mut mask = 0;
    for &q in qubits {
        if q == 0 || q > n {
            return Err(PqstError::InvalidSubset(format!(
                "qubit {q} outside 1..={n}"
            )));
        }
        mask |= 1 << (n - q);
    }
    Ok(mask)
}

/// Reduced state on `keep` (1-based qubit labels).
pub fn partial_trace(op: &Operator, keep: &[usize]) -> Result<Operator> {
    let n = op.n_qubits();
    let keep_mask = subset_mask(n, keep)?;
    let k = keep_mask.count_ones() as usize;
    if k == 0 || k == n {
        if k == n {
            return Ok(op.clone());
        }
        return Err(PqstError::InvalidSubset(
            "cannot trace out every qubit".into(),
        ));
    }
    let compress = |idx: usize| -> usize {
        let mut out = 0;
        for bit in (0..n).rev() {
            if keep_mask & (1 << bit) != 0 {
                out = (out << 1) | ((idx >> bit) & 1);
            }
        }
        out
    };
    let mut out = Operator::zeros(1 << k)?;
    let d = op.dim();
    for i in 0..d {
        for j in 0..d {
            if (i & !keep_mask) == (j & !keep_mask) {
                out[(compress(i), compress(j))] += op[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Transpose on the qubits in `sub` (1-based labels).
pub fn partial_transpose(op: &Operator, sub: &[usize]) -> Result<Operator> {
    let n = op.n_qubits();
    let mask = subset_mask(n, sub)?;
    let d = op.dim();
    let mut out = Operator::zeros(d)?;
    for i in 0..d {
        for j in 0..d {
            let ii = (i & !mask) | (j & mask);
            let jj = (j & !mask) | (i & mask);
            out[(ii, jj)] = op[(i, j)];
        }
    }
    Ok(out)
}

pub fn entanglement_entropy(rho: &DensityMatrix, part: &[usize]) -> Result<f64> {
    let reduced = partial_trace(rho.op(), part)?;
    Ok(entropy_bits(&eigvalsh(&reduced)?))
}

pub fn log_negativity(rho: &DensityMatrix, part: &[usize]) -> Result<f64> {
    let pt = partial_transpose(rho.op(), part)?;
    let trace_norm: f64 = eigvalsh(&pt)?.iter().map(|x| x.abs()).sum();
    Ok(trace_norm.log2())
}

/// Entropy of entanglement for pure states (purity above `1 - 1e-8`),
/// logarithmic negativity otherwise. Base-2 logarithms.
pub fn entanglement_measure(rho: &DensityMatrix, part: &[usize]) -> Result<f64> {
    let n = rho.n_qubits();
    let mask = subset_mask(n, part)?;
    if mask == 0 || mask == (1 << n) - 1 {
        return Err(PqstError::InvalidSubset(
            "bipartition needs qubits on both sides".into(),
        ));
    }
    if purity(rho) > 1.0 - 1e-8 {
        entanglement_entropy(rho, part)
    } else {
        log_negativity(rho, part)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::random_density_matrix;
    use crate::testutil::bell_phi_plus;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density_matrix(2, &mut rng).unwrap();
        assert!((fidelity(&rho, rho.op()).unwrap().value - 1.0).abs() < 1e-10);

        let zero = DensityMatrix::basis(1, 0).unwrap();
        let one = DensityMatrix::basis(1, 1).unwrap();
        assert!(fidelity(&zero, one.op()).unwrap().value.abs() < 1e-14);

        let pure = DensityMatrix::basis(2, 0).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((fidelity(&pure, mixed.op()).unwrap().value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fidelity_reports_clamped_mass_for_non_physical_estimates() {
        let rho = DensityMatrix::maximally_mixed(1).unwrap();
        let sigma = Operator::from_real_rows(&[&[1.2, 0.0], &[0.0, -0.2]]).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        assert!((f.clamped_mass - 0.1).abs() < 1e-12);
        assert!(fidelity(&rho, &Operator::identity(4).unwrap()).is_err());
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&DensityMatrix::maximally_mixed(2).unwrap()) - 0.25).abs() < 1e-15);
        assert!((purity(&bell_phi_plus()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entanglement_examples() {
        let product = DensityMatrix::basis(2, 1).unwrap();
        assert!(entanglement_measure(&product, &[1]).unwrap().abs() < 1e-10);
        let bell = bell_phi_plus();
        assert!((entanglement_measure(&bell, &[1]).unwrap() - 1.0).abs() < 1e-10);
        // Werner-like mixture of Bell and noise is mixed -> log-negativity branch.
        let mix = &bell.op().scale_real(0.5)
            + &DensityMatrix::maximally_mixed(2)
                .unwrap()
                .op()
                .scale_real(0.5);
        let mix = DensityMatrix::new(mix).unwrap();
        // ||ρ^T_B||_1 = 1 + 2·|λ_min| with λ_min = 0.5·(-1/2) + 0.5·(1/4) = -1/8
        assert!((entanglement_measure(&mix, &[1]).unwrap() - 1.25f64.log2()).abs() < 1e-10);
        assert!(entanglement_measure(&bell, &[]).is_err());
        assert!(entanglement_measure(&bell, &[1, 2]).is_err());
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = DensityMatrix::basis(1, 1).unwrap();
        let b = DensityMatrix::maximally_mixed(1).unwrap();
        let ab = a.op().kron(b.op()).unwrap();
        assert!(partial_trace(&ab, &[1]).unwrap().max_abs_diff(a.op()) < 1e-15);
        assert!(partial_trace(&ab, &[2]).unwrap().max_abs_diff(b.op()) < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn fidelity_is_symmetric_and_purity_bounded(seed in any::<u64>(), n in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density_matrix(n, &mut rng).unwrap();
            let sigma = random_density_matrix(n, &mut rng).unwrap();
            let f1 = fidelity(&rho, sigma.op()).unwrap().value;
            let f2 = fidelity(&sigma, rho.op()).unwrap().value;
            prop_assert!((f1 - f2).abs() < 1e-9);
            prop_assert!((-1e-12..=1.0 + 1e-9).contains(&f1));
            let p = purity(&rho);
            let d = (1usize << n) as f64;
            prop_assert!(p >= 1.0 / d - 1e-10 && p <= 1.0 + 1e-10);
        }
    }
}
