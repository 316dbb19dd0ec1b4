use std::fmt;
use std::str::FromStr;

use crate::error::{PqstError, Result};
use crate::gates::{identity2, pauli_x, pauli_y, pauli_z};
use crate::linalg::{Operator, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Operator {
        match self {
            Pauli::I => identity2(),
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }

    /// Flips computational-basis bits (X or Y).
    pub fn is_flip(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Real multiple of a tensor product of Pauli matrices, qubit 1 first.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    letters: Vec<Pauli>,
    coefficient: f64,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, coefficient: f64) -> Result<Self> {
        if letters.is_empty() || letters.len() > 4 {
            return Err(PqstError::InvalidArgument(format!(
                "Pauli word length {} outside 1..=4",
                letters.len()
            )));
        }
        if !coefficient.is_finite() {
            return Err(PqstError::NonFinite);
        }
        Ok(Self {
            letters,
            coefficient,
        })
    }

    pub fn word(word: &str, coefficient: f64) -> Result<Self> {
        let letters = word
            .chars()
            .enumerate()
            .map(|(i, c)| {
                Pauli::from_char(c).ok_or_else(|| PqstError::Parse {
                    position: i,
                    message: format!("`{c}` is not one of I, X, Y, Z"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters, coefficient)
    }

    /// Every unit-coefficient word on `n` qubits, `4^n` of them.
    pub fn all_words(n: usize) -> Vec<PauliString> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w: Vec<Pauli>| {
                    Pauli::ALL.iter().map(move |&p| {
                        let mut w = w.clone();
                        w.push(p);
                        w
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|letters| PauliString {
                letters,
                coefficient: 1.0,
            })
            .collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn with_coefficient(&self, coefficient: f64) -> Self {
        Self {
            letters: self.letters.clone(),
            coefficient,
        }
    }

    pub fn is_x_structured(&self) -> bool {
        let flips = self.letters.iter().filter(|p| p.is_flip()).count();
        flips == 0 || flips == self.letters.len()
    }

    /// 0-based positions carrying X or Y.
    pub fn flip_positions(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_flip())
            .map(|(q, _)| q)
            .collect()
    }

    pub fn word_string(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coefficient, self.word_string())
    }
}

/// `coefficient · P_1 ⊗ … ⊗ P_n`
pub fn pauli_matrix(ps: &PauliString) -> Operator {
    let mats: Vec<Operator> = ps.letters.iter().map(|p| p.matrix()).collect();
    Operator::kron_all(&mats)
        .expect("word length validated on construction")
        .scale_real(ps.coefficient)
}

/// Real linear combination of Pauli strings on a fixed register.
#[derive(Debug, Clone)]
pub struct Observable {
    n: usize,
    terms: Vec<PauliString>,
    matrix: Operator,
}

impl Observable {
    pub fn new(terms: Vec<PauliString>) -> Result<Self> {
        let n = terms
            .first()
            .ok_or_else(|| PqstError::InvalidArgument("observable has no terms".into()))?
            .n_qubits();
        if let Some(t) = terms.iter().find(|t| t.n_qubits() != n) {
            return Err(PqstError::InvalidArgument(format!(
                "term `{t}` has {} qubits, expected {n}",
                t.n_qubits()
            )));
        }
        let mut matrix = Operator::zeros(1 << n)?;
        for t in &terms {
            matrix.add_scaled(C64::new(1.0, 0.0), &pauli_matrix(t));
        }
        Ok(Self { n, terms, matrix })
    }

    pub fn single(term: PauliString) -> Self {
        Self::new(vec![term]).expect("single valid term")
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    /// Sub-observable made of the selected terms.
    pub fn restrict(&self, keep: impl Fn(&PauliString) -> bool) -> Option<Observable> {
        let terms: Vec<_> = self.terms.iter().filter(|t| keep(t)).cloned().collect();
        if terms.is_empty() {
            None
        } else {
            Some(Observable::new(terms).expect("terms share the register"))
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Grammar: `coeff WORD (';' coeff WORD)*`, WORD over `{I,X,Y,Z}`.
impl FromStr for Observable {
    type Err = PqstError;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut offset = 0;
        for chunk in s.split(';') {
            let base = offset;
            offset += chunk.len() + 1;
            let lead = chunk.len() - chunk.trim_start().len();
            let body = chunk.trim();
            if body.is_empty() {
                return Err(PqstError::Parse {
                    position: base + lead,
                    message: "empty term".into(),
                });
            }
            let mut fields = body.split_whitespace();
            let coeff_str = fields.next().expect("non-empty body");
            let word_str = fields.next().ok_or_else(|| PqstError::Parse {
                position: base + lead + coeff_str.len(),
                message: "expected a Pauli word after the coefficient".into(),
            })?;
            if let Some(extra) = fields.next() {
                return Err(PqstError::Parse {
                    position: base + chunk.find(extra).unwrap_or(lead),
                    message: format!("unexpected token `{extra}`"),
                });
            }
            let coeff: f64 = coeff_str.parse().map_err(|_| PqstError::Parse {
                position: base + lead,
                message: format!("`{coeff_str}` is not a number"),
            })?;
            let word_pos = base + chunk.find(word_str).unwrap_or(lead);
            let term = PauliString::word(word_str, coeff).map_err(|e| match e {
                PqstError::Parse { position, message } => PqstError::Parse {
                    position: word_pos + position,
                    message,
                },
                other => other,
            })?;
            if let Some(first) = terms.first() {
                let first: &PauliString = first;
                if first.n_qubits() != term.n_qubits() {
                    return Err(PqstError::Parse {
                        position: word_pos,
                        message: format!(
                            "word `{word_str}` has length {}, expected {}",
                            term.n_qubits(),
                            first.n_qubits()
                        ),
                    });
                }
            }
            terms.push(term);
        }
        Observable::new(terms)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Expectation {
    pub value: f64,
    /// Imaginary part of `Tr(O M)`; only meaningful when above `1e-8`.
    pub imag_residual: f64,
}

/// `Re Tr(O M)`.
pub fn expectation(obs: &Observable, m: &Operator) -> Result<Expectation> {
    let prod = obs.matrix().try_mul(m)?;
    let tr = prod.trace();
    Ok(Expectation {
        value: tr.re,
        imag_residual: tr.im.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::spectral_norm;
    use crate::state::DensityMatrix;
    use crate::testutil::bell_phi_plus;

    #[test]
    fn pauli_matrix_examples() {
        let zz = pauli_matrix(&PauliString::word("ZZ", 1.0).unwrap());
        let expected =
            Operator::diagonal(&[1.0, -1.0, -1.0, 1.0].map(|x| C64::new(x, 0.0))).unwrap();
        assert_eq!(zz, expected);
        let ii = pauli_matrix(&PauliString::word("II", 1.0).unwrap());
        assert_eq!(ii, Operator::identity(4).unwrap());
    }

    #[test]
    fn o2x_spectral_norm() {
        let o: Observable = "8 ZZ; 2 XY; 3 XX; -10 IZ".parse().unwrap();
        assert!((spectral_norm(o.matrix()).unwrap() - 18.630).abs() < 1e-3);
    }

    #[test]
    fn parser_reports_positions() {
        match "8 ZZ; 2 XQ".parse::<Observable>() {
            Err(PqstError::Parse { position, .. }) => assert_eq!(position, 9),
            other => panic!("unexpected {other:?}"),
        }
        match "abc ZZ".parse::<Observable>() {
            Err(PqstError::Parse { position, .. }) => assert_eq!(position, 0),
            other => panic!("unexpected {other:?}"),
        }
        assert!("1 ZZ; 2 Z".parse::<Observable>().is_err());
        assert!("1".parse::<Observable>().is_err());
        assert!("1 ZZ;".parse::<Observable>().is_err());
        assert!("1 ZZ ZZ".parse::<Observable>().is_err());
        assert!("1 ZZZZZ".parse::<Observable>().is_err());
    }

    #[test]
    fn parses_and_displays() {
        let o: Observable = " 8 ZZ ;2 XY;-10 IZ".parse().unwrap();
        assert_eq!(o.terms().len(), 3);
        assert_eq!(o.to_string(), "8 ZZ; 2 XY; -10 IZ");
        assert_eq!(o.n_qubits(), 2);
    }

    #[test]
    fn expectation_examples() {
        let zz: Observable = "1 ZZ".parse().unwrap();
        let e = expectation(&zz, bell_phi_plus().op()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let xx: Observable = "1 XX".parse().unwrap();
        let e = expectation(&xx, DensityMatrix::basis(2, 0).unwrap().op()).unwrap();
        assert!(e.value.abs() < 1e-15);
        assert!(expectation(&xx, &Operator::identity(2).unwrap()).is_err());
    }
}
