//! Pauli operators as vectors over GF(2)^{2n}, packed as `(x << n) | z`.
//! Qubit 1 sits on the most significant bit of both halves, like basis indices.

use crate::linalg::{Operator, C64, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct PauliVec {
    pub x: usize,
    pub z: usize,
}

impl PauliVec {
    pub fn unpack(n: usize, v: usize) -> Self {
        let mask = (1 << n) - 1;
        Self {
            x: v >> n,
            z: v & mask,
        }
    }

    #[cfg(test)]
    pub fn pack(self, n: usize) -> usize {
        (self.x << n) | self.z
    }
}

/// Symplectic product; 0 means the two Paulis commute.
pub(crate) fn symp(a: PauliVec, b: PauliVec) -> u32 {
    ((a.x & b.z).count_ones() + (a.z & b.x).count_ones()) & 1
}

/// Hermitian Pauli `i^{x·z} X^x Z^z`.
pub(crate) fn pauli_operator(n: usize, p: PauliVec) -> Operator {
    let d = 1usize << n;
    let mut m = Operator::zeros(d).expect("n within register limit");
    let phase = match (p.x & p.z).count_ones() % 4 {
        0 => ONE,
        1 => C64::new(0.0, 1.0),
        2 => -ONE,
        _ => C64::new(0.0, -1.0),
    };
    for j in 0..d {
        let sign = if (p.z & j).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        m[(j ^ p.x, j)] = phase * sign;
    }
    m
}

/// Normalised column of largest norm of a rank-one projector.
pub(crate) fn projector_vector(proj: &Operator) -> Vec<C64> {
    let d = proj.dim();
    let best = (0..d)
        .max_by(|&a, &b| {
            let na: f64 = proj.column(a).iter().map(|z| z.norm_sqr()).sum();
            let nb: f64 = proj.column(b).iter().map(|z| z.norm_sqr()).sum();
            na.total_cmp(&nb)
        })
        .expect("non-empty");
    let col = proj.column(best);
    let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    col.iter().map(|z| z / norm).collect()
}

/// Rank-one common eigenprojector `∏ (1 + s_j P_j) / 2`.
pub(crate) fn stabilizer_projector(n: usize, gens: &[(PauliVec, f64)]) -> Operator {
    let d = 1usize << n;
    let mut proj = Operator::identity(d).expect("n within register limit");
    for &(g, s) in gens {
        let mut f = Operator::identity(d).expect("n within register limit");
        f.add_scaled(C64::new(s, 0.0), &pauli_operator(n, g));
        proj = (&proj * &f).scale_real(0.5);
    }
    proj
}

/// Global phase fixed so the first entry above `1e-9` is real positive.
pub(crate) fn phase_canonical_vector(v: &[C64]) -> Vec<C64> {
    match v.iter().find(|z| z.norm() > 1e-9) {
        Some(&z) => {
            let ph = z.conj() / z.norm();
            v.iter().map(|w| w * ph).collect()
        }
        None => v.to_vec(),
    }
}

pub(crate) fn rounded_key(entries: &[C64]) -> Vec<i64> {
    entries
        .iter()
        .flat_map(|z| [(z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64])
        .collect()
}
