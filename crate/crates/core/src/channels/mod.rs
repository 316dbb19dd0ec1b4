//! Forward measurement channels and the inverse maps applied to outcomes.

pub mod golden;

use crate::ensembles::UnitaryEnsemble;
use crate::error::{PqstError, Result};
use crate::linalg::{Operator, C64, ONE};

/// `(1/|ζ|) Σ_U Σ_k ⟨k|U A U†|k⟩ U†|k⟩⟨k|U`, summed exactly. Linear in `a`,
/// so `a` need not be a state.
pub fn forward_channel_exact(ensemble: &UnitaryEnsemble, a: &Operator) -> Result<Operator> {
    let members = ensemble.members()?;
    let d = a.dim();
    if d != 1 << ensemble.n_qubits() {
        return Err(PqstError::DimensionMismatch {
            left: 1 << ensemble.n_qubits(),
            right: d,
        });
    }
    let mut out = Operator::zeros(d)?;
    for u in members {
        let rotated = u.conjugate(a)?;
        let dephased = Operator::diagonal(&rotated.diag())?;
        out.add_scaled(ONE, &u.adjoint().conjugate(&dephased)?);
    }
    Ok(out.scale_real(1.0 / members.len() as f64))
}

/// `p·A − 1`
pub fn pseudo_inverse(p: f64, a: &Operator) -> Operator {
    let mut out = a.scale_real(p);
    out.add_scaled(-ONE, &Operator::identity(a.dim()).expect("valid dimension"));
    out
}

/// `(2^n + 1)·A − Tr(A)·1`
pub fn depolarizing_inverse(a: &Operator) -> Operator {
    let mut out = a.scale_real((a.dim() + 1) as f64);
    out.add_scaled(
        -a.trace(),
        &Operator::identity(a.dim()).expect("valid dimension"),
    );
    out
}

/// `(A + Tr(A)·1) / (2^n + 1)`, the channel that global Cliffords and MUBs
/// produce.
pub fn depolarizing_channel(a: &Operator) -> Operator {
    let mut out = a.clone();
    out.add_scaled(
        a.trace(),
        &Operator::identity(a.dim()).expect("valid dimension"),
    );
    out.scale_real(1.0 / (a.dim() + 1) as f64)
}

/// `⊗_j (3·f_j − Tr(f_j)·1)` over single-qubit factors, qubit 1 first.
pub fn per_site_pauli_inverse(n: usize, factors: &[Operator]) -> Result<Operator> {
    if factors.len() != n {
        return Err(PqstError::InvalidArgument(format!(
            "{} site factors for {n} qubits",
            factors.len()
        )));
    }
    let sites = factors
        .iter()
        .map(|f| {
            if f.dim() != 2 {
                return Err(PqstError::DimensionMismatch {
                    left: 2,
                    right: f.dim(),
                });
            }
            let mut s = f.scale_real(3.0);
            s.add_scaled(-f.trace(), &Operator::identity(2)?);
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    Operator::kron_all(&sites)
}

/// `U†|k⟩⟨k|U`
pub fn rotated_projector(u: &Operator, k: usize) -> Operator {
    let row: Vec<C64> = u.row(k).iter().map(|z| z.conj()).collect();
    Operator::outer(&row).expect("row of a valid operator")
}
