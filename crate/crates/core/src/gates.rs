//! Fixed single- and two-qubit matrices. `H = [[1,1],[1,-1]]/√2`, `S = diag(1, i)`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::{Operator, C64, I, ONE, ZERO};

fn m2(a: C64, b: C64, c: C64, d: C64) -> Operator {
    Operator::from_vec(2, vec![a, b, c, d]).expect("2x2 literal")
}

pub fn identity2() -> Operator {
    m2(ONE, ZERO, ZERO, ONE)
}

pub fn hadamard() -> Operator {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    m2(h, h, h, -h)
}

pub fn phase_s() -> Operator {
    m2(ONE, ZERO, ZERO, I)
}

/// The product `H·S`.
pub fn hs() -> Operator {
    &hadamard() * &phase_s()
}

/// `H·S·H`, which conjugates `Y` to `Z`.
pub fn hsh() -> Operator {
    &hs() * &hadamard()
}

pub fn pauli_x() -> Operator {
    m2(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Operator {
    m2(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Operator {
    m2(ONE, ZERO, ZERO, -ONE)
}

/// CNOT with the control on qubit 1 (most significant bit).
pub fn cnot() -> Operator {
    let mut m = Operator::zeros(4).expect("4x4");
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// Single-qubit rotation used in local measurement words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalGate {
    Id,
    H,
    HS,
}

impl LocalGate {
    pub fn matrix(self) -> Operator {
        match self {
            LocalGate::Id => identity2(),
            LocalGate::H => hadamard(),
            LocalGate::HS => hs(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LocalGate::Id => "1",
            LocalGate::H => "H",
            LocalGate::HS => "HS",
        }
    }
}

/// Tensor word of local gates, qubit 1 first.
pub fn local_word_matrix(word: &[LocalGate]) -> Operator {
    let mats: Vec<Operator> = word.iter().map(|g| g.matrix()).collect();
    Operator::kron_all(&mats).expect("word length within register limit")
}

pub fn local_word_label(word: &[LocalGate]) -> String {
    word.iter().map(|g| g.label()).collect::<Vec<_>>().join("⊗")
}
