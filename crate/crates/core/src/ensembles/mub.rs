//! Mutually unbiased bases from a partition of the non-identity Paulis into
//! `2^n + 1` maximal commuting classes.

use super::symplectic::{
    phase_canonical_vector, projector_vector, stabilizer_projector, symp, PauliVec,
};
use crate::error::{PqstError, Result};
use crate::linalg::{Operator, C64};

pub const MUB_MAX_QUBITS: usize = 3;

/// A maximal commuting class: the span bitmask over packed Pauli vectors
/// and a reduced row-echelon generating set.
#[derive(Debug, Clone)]
pub(crate) struct Lagrangian {
    pub mask: u64,
    pub generators: Vec<PauliVec>,
}

fn span_mask(gens: &[usize]) -> u64 {
    let mut elems = vec![0usize];
    for &g in gens {
        let extra: Vec<usize> = elems.iter().map(|&e| e ^ g).collect();
        elems.extend(extra);
    }
    elems
        .iter()
        .filter(|&&e| e != 0)
        .fold(0u64, |m, &e| m | (1 << e))
}

fn echelon(n: usize, gens: &[usize]) -> Vec<usize> {
    let mut rows = gens.to_vec();
    let mut out = Vec::new();
    for bit in (0..2 * n).rev() {
        if let Some(pos) = rows.iter().position(|&r| r & (1 << bit) != 0) {
            let pivot = rows.remove(pos);
            for r in rows.iter_mut().chain(out.iter_mut()) {
                if *r & (1 << bit) != 0 {
                    *r ^= pivot;
                }
            }
            out.push(pivot);
        }
    }
    out
}

pub(crate) fn lagrangians(n: usize) -> Vec<Lagrangian> {
    fn extend(n: usize, chosen: &mut Vec<usize>, span: u64, out: &mut Vec<Lagrangian>) {
        if chosen.len() == n {
            if out.iter().all(|l| l.mask != span) {
                let gens = echelon(n, chosen);
                out.push(Lagrangian {
                    mask: span,
                    generators: gens.iter().map(|&g| PauliVec::unpack(n, g)).collect(),
                });
            }
            return;
        }
        let start = chosen.last().map_or(1, |&c| c + 1);
        for v in start..1usize << (2 * n) {
            if span & (1 << v) != 0 {
                continue;
            }
            let pv = PauliVec::unpack(n, v);
            if chosen
                .iter()
                .all(|&c| symp(PauliVec::unpack(n, c), pv) == 0)
            {
                chosen.push(v);
                let s = span_mask(chosen);
                extend(n, chosen, s, out);
                chosen.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, &mut Vec::new(), 0, &mut out);
    out
}

/// First exact cover of the non-identity Paulis, trying the Z-type class
/// first so the computational basis comes out as member 0.
pub(crate) fn pauli_partition(n: usize) -> Vec<Lagrangian> {
    let mut all = lagrangians(n);
    all.sort_by_key(|l| l.generators.iter().any(|g| g.x != 0));
    let full: u64 = ((1u128 << (1usize << (2 * n))) - 2) as u64;

    fn search(all: &[Lagrangian], full: u64, covered: u64, picked: &mut Vec<usize>) -> bool {
        if covered == full {
            return true;
        }
        let lowest = (!covered & full).trailing_zeros();
        for (i, l) in all.iter().enumerate() {
            if l.mask & (1 << lowest) != 0 && l.mask & covered == 0 {
                picked.push(i);
                if search(all, full, covered | l.mask, picked) {
                    return true;
                }
                picked.pop();
            }
        }
        false
    }
    let mut picked = Vec::new();
    assert!(
        search(&all, full, 0, &mut picked),
        "a complete partition exists for n <= 3"
    );
    picked.into_iter().map(|i| all[i].clone()).collect()
}

/// `2^n + 1` bases; vector `k` of a class is its joint eigenvector with
/// eigenvalue `(-1)^{k_j}` on generator `j`.
pub fn mub_bases(n: usize) -> Result<Vec<Vec<Vec<C64>>>> {
    if n == 0 || n > MUB_MAX_QUBITS {
        return Err(PqstError::InvalidArgument(format!(
            "MUB construction supports 1..={MUB_MAX_QUBITS} qubits, got {n}"
        )));
    }
    let d = 1usize << n;
    Ok(pauli_partition(n)
        .iter()
        .map(|l| {
            (0..d)
                .map(|k| {
                    let gens: Vec<(PauliVec, f64)> = l
                        .generators
                        .iter()
                        .enumerate()
                        .map(|(j, &g)| {
                            (
                                g,
                                if k & (1 << (n - 1 - j)) != 0 {
                                    -1.0
                                } else {
                                    1.0
                                },
                            )
                        })
                        .collect();
                    phase_canonical_vector(&projector_vector(&stabilizer_projector(n, &gens)))
                })
                .collect()
        })
        .collect())
}

/// Measurement unitaries: row `k` of member `b` is `⟨ψ_{b,k}|`.
pub fn mub_unitaries(n: usize) -> Result<Vec<Operator>> {
    mub_bases(n)?
        .into_iter()
        .map(|basis| {
            let d = basis.len();
            let data = basis
                .iter()
                .flat_map(|v| v.iter().map(|z| z.conj()))
                .collect();
            Operator::from_vec(d, data)
        })
        .collect()
}
