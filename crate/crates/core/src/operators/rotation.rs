use std::fmt;

use crate::error::{PqstError, Result};
use crate::gates::{hadamard, hsh, identity2};
use crate::linalg::Operator;

use super::pauli::{Observable, Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationGate {
    Id,
    H,
    Hsh,
}

impl RotationGate {
    const ORDER: [RotationGate; 3] = [RotationGate::Id, RotationGate::H, RotationGate::Hsh];

    pub fn matrix(self) -> Operator {
        match self {
            RotationGate::Id => identity2(),
            RotationGate::H => hadamard(),
            RotationGate::Hsh => hsh(),
        }
    }

    /// `g P g†` as a signed Pauli.
    fn conjugate(self, p: Pauli) -> (Pauli, f64) {
        match (self, p) {
            (_, Pauli::I) | (RotationGate::Id, _) => (p, 1.0),
            (RotationGate::H, Pauli::X) => (Pauli::Z, 1.0),
            (RotationGate::H, Pauli::Z) => (Pauli::X, 1.0),
            (RotationGate::H, Pauli::Y) => (Pauli::Y, -1.0),
            (RotationGate::Hsh, Pauli::X) => (Pauli::X, 1.0),
            (RotationGate::Hsh, Pauli::Y) => (Pauli::Z, 1.0),
            (RotationGate::Hsh, Pauli::Z) => (Pauli::Y, -1.0),
        }
    }
}

impl fmt::Display for RotationGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotationGate::Id => "1",
            RotationGate::H => "H",
            RotationGate::Hsh => "HSH",
        })
    }
}

/// Local rotation `U` with `U O U† = rotated`.
#[derive(Debug, Clone)]
pub struct Rotation {
    pub gates: Vec<RotationGate>,
    pub unitary: Operator,
    pub rotated: Observable,
}

impl Rotation {
    pub fn is_identity(&self) -> bool {
        self.gates.iter().all(|&g| g == RotationGate::Id)
    }

    pub fn label(&self) -> String {
        self.gates
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join("⊗")
    }
}

fn rotate_term(gates: &[RotationGate], term: &PauliString) -> PauliString {
    let mut sign = 1.0;
    let letters = gates
        .iter()
        .zip(term.letters())
        .map(|(g, &p)| {
            let (q, s) = g.conjugate(p);
            sign *= s;
            q
        })
        .collect();
    PauliString::new(letters, sign * term.coefficient()).expect("same length as input")
}

/// Searches per-qubit rotations from `{1, H, HSH}` that X-structure every
/// term at once. Candidates are tried by number of non-identity gates, then
/// lexicographically with `1 < H < HSH`, so an already X-structured
/// observable gets the identity.
pub fn rotate_to_x_structure(obs: &Observable) -> Result<Rotation> {
    let n = obs.n_qubits();
    let mut candidates: Vec<Vec<RotationGate>> = vec![Vec::new()];
    for _ in 0..n {
        candidates = candidates
            .into_iter()
            .flat_map(|c| {
                RotationGate::ORDER.iter().map(move |&g| {
                    let mut c = c.clone();
                    c.push(g);
                    c
                })
            })
            .collect();
    }
    // stable sort keeps the lexicographic order inside each weight class
    candidates.sort_by_key(|c| c.iter().filter(|&&g| g != RotationGate::Id).count());

    for gates in candidates {
        let terms: Vec<PauliString> = obs.terms().iter().map(|t| rotate_term(&gates, t)).collect();
        if terms.iter().all(PauliString::is_x_structured) {
            let mats: Vec<Operator> = gates.iter().map(|g| g.matrix()).collect();
            return Ok(Rotation {
                unitary: Operator::kron_all(&mats)?,
                rotated: Observable::new(terms)?,
                gates,
            });
        }
    }
    Err(PqstError::RotationNotFound)
}
