use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{PqstError, Result};
use crate::state::Bitstring;

use super::pauli::Observable;

/// Class of matrix elements `(i, j)` whose index bitstrings differ exactly on
/// a fixed qubit set. Bit `n - q` of `mask` stands for qubit `q` (1-based), so
/// the mask lines up with basis indices: element `(i, j)` belongs to the
/// pattern with `mask == i ^ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivityPattern {
    n: usize,
    mask: usize,
}

impl ActivityPattern {
    pub fn from_mask(n: usize, mask: usize) -> Self {
        debug_assert!(mask < (1 << n));
        Self { n, mask }
    }

    /// From 1-based qubit labels.
    pub fn from_qubits(n: usize, qubits: &[usize]) -> Result<Self> {
        let mut mask = 0;
        for &q in qubits {
            if q == 0 || q > n {
                return Err(PqstError::InvalidSubset(format!(
                    "qubit {q} outside 1..={n}"
                )));
            }
            let bit = 1 << (n - q);
            if mask & bit != 0 {
                return Err(PqstError::InvalidSubset(format!("qubit {q} listed twice")));
            }
            mask |= bit;
        }
        Ok(Self { n, mask })
    }

    pub fn diagonal(n: usize) -> Self {
        Self { n, mask: 0 }
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            mask: (1 << n) - 1,
        }
    }

    /// All `2^n` patterns, ordered by mask.
    pub fn all(n: usize) -> Vec<Self> {
        (0..1usize << n).map(|mask| Self { n, mask }).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> usize {
        self.mask
    }

    /// Hamming weight `d`.
    pub fn order(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn qubits(&self) -> Vec<usize> {
        (1..=self.n)
            .filter(|&q| self.mask & (1 << (self.n - q)) != 0)
            .collect()
    }

    pub fn contains_element(&self, i: usize, j: usize) -> bool {
        i ^ j == self.mask
    }
}

impl fmt::Display for ActivityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        write!(f, "{{{}}}", qs.join(","))
    }
}

impl Serialize for ActivityPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn activity_of_element(i: &Bitstring, j: &Bitstring) -> Result<ActivityPattern> {
    if i.n() != j.n() {
        return Err(PqstError::DimensionMismatch {
            left: i.n(),
            right: j.n(),
        });
    }
    Ok(ActivityPattern::from_mask(i.n(), i.index() ^ j.index()))
}

/// Union over terms of the X/Y-position pattern of each word.
pub fn activity_support(obs: &Observable) -> BTreeSet<ActivityPattern> {
    let n = obs.n_qubits();
    obs.terms()
        .iter()
        .map(|t| {
            let qs: Vec<usize> = t.flip_positions().iter().map(|q| q + 1).collect();
            ActivityPattern::from_qubits(n, &qs).expect("positions in range")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{pauli_matrix, PauliString};

    fn bs(s: &str) -> Bitstring {
        let bits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
        Bitstring::from_bits(&bits).unwrap()
    }

    #[test]
    fn element_examples() {
        let a = activity_of_element(&bs("00"), &bs("00")).unwrap();
        assert_eq!(a.order(), 0);
        assert_eq!(a.to_string(), "{}");
        let a = activity_of_element(&bs("00"), &bs("11")).unwrap();
        assert_eq!(a.qubits(), vec![1, 2]);
        let a = activity_of_element(&bs("010"), &bs("011")).unwrap();
        assert_eq!(a.qubits(), vec![3]);
        assert_eq!(a.order(), 1);
        assert!(activity_of_element(&bs("01"), &bs("011")).is_err());
    }

    #[test]
    fn support_examples() {
        let zz: Observable = "1 ZZ".parse().unwrap();
        assert_eq!(activity_support(&zz), [ActivityPattern::diagonal(2)].into());
        let xy: Observable = "1 XY".parse().unwrap();
        assert_eq!(activity_support(&xy), [ActivityPattern::full(2)].into());
        let o2nx: Observable = "7 XZ; 15 YZ; 12 ZX".parse().unwrap();
        let s: Vec<String> = activity_support(&o2nx)
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(s, vec!["{2}", "{1}"]);
    }

    #[test]
    fn words_touch_only_their_pattern() {
        for n in 1..=3 {
            for word in PauliString::all_words(n) {
                let m = pauli_matrix(&word);
                let pat = *activity_support(&Observable::single(word.clone()))
                    .iter()
                    .next()
                    .unwrap();
                for i in 0..1 << n {
                    for j in 0..1 << n {
                        let on = m[(i, j)].norm() > 1e-14;
                        assert_eq!(on, pat.contains_element(i, j), "{word} ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn subset_validation() {
        assert!(ActivityPattern::from_qubits(2, &[3]).is_err());
        assert!(ActivityPattern::from_qubits(2, &[1, 1]).is_err());
        assert_eq!(
            ActivityPattern::from_qubits(3, &[1, 3]).unwrap().mask(),
            0b101
        );
    }
}
