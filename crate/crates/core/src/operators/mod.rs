//! Pauli-string observables, activity classes of matrix elements, and the
//! local-rotation path for observables without X-structure.

mod activity;
mod pauli;
mod rotation;

pub use activity::{activity_of_element, activity_support, ActivityPattern};
pub use pauli::{expectation, pauli_matrix, Expectation, Observable, Pauli, PauliString};
pub use rotation::{rotate_to_x_structure, Rotation};

/// True iff every term is built only from `{I, Z}` or only from `{X, Y}`.
pub fn is_x_structured(obs: &Observable) -> bool {
    obs.terms().iter().all(PauliString::is_x_structured)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_structure_examples() {
        let o2x: Observable = "8 ZZ; 2 XY; 3 XX; -10 IZ".parse().unwrap();
        assert!(is_x_structured(&o2x));
        let o2nx: Observable = "7 XZ; 15 YZ; 12 ZX".parse().unwrap();
        assert!(!is_x_structured(&o2nx));
        let id: Observable = "1 III".parse().unwrap();
        assert!(is_x_structured(&id));
    }

    #[test]
    fn x_structure_matches_matrix_support_for_all_words() {
        for n in 1..=3 {
            for word in PauliString::all_words(n) {
                let m = pauli_matrix(&word);
                let d = 1usize << n;
                let mut on_x = true;
                for i in 0..d {
                    for j in 0..d {
                        if i != j && i + j != d - 1 && m[(i, j)].norm() > 1e-14 {
                            on_x = false;
                        }
                    }
                }
                assert_eq!(on_x, word.is_x_structured(), "{word}");
            }
        }
    }
}
