//! Clifford group: closure enumeration for one and two qubits, a uniform
//! tableau sampler for any register size, and stabilizer-state orbits.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rand::Rng;

use super::symplectic::{
    pauli_operator, phase_canonical_vector, projector_vector, rounded_key, stabilizer_projector,
    symp, PauliVec,
};
use crate::error::{PqstError, Result};
use crate::gates::{hadamard, identity2, phase_s};
use crate::linalg::{Operator, C64, ONE};

/// Largest register for which the group is enumerated explicitly.
pub const ENUMERATED_MAX_QUBITS: usize = 2;
/// Largest register for which sampling is supported.
pub const SAMPLED_MAX_QUBITS: usize = 3;

/// `|Cl(2^n)|` modulo phases: `2^{n²+2n} ∏_{j=1}^{n} (4^j − 1)`.
pub fn clifford_group_order(n: usize) -> u64 {
    let mut order = 1u64 << (n * n + 2 * n);
    for j in 1..=n {
        order *= (1u64 << (2 * j)) - 1;
    }
    order
}

fn embed(n: usize, q: usize, g: &Operator) -> Operator {
    let mats: Vec<Operator> = (1..=n)
        .map(|k| if k == q { g.clone() } else { identity2() })
        .collect();
    Operator::kron_all(&mats).expect("n within register limit")
}

/// CNOT with control qubit `c` and target `t` (1-based).
fn cnot_between(n: usize, c: usize, t: usize) -> Operator {
    let d = 1usize << n;
    let (cb, tb) = (1 << (n - c), 1 << (n - t));
    let mut m = Operator::zeros(d).expect("n within register limit");
    for j in 0..d {
        let i = if j & cb != 0 { j ^ tb } else { j };
        m[(i, j)] = ONE;
    }
    m
}

/// `H_q`, `S_q` for every qubit and CNOT for every ordered pair.
fn generators(n: usize) -> Vec<Operator> {
    let mut gens = Vec::new();
    for q in 1..=n {
        gens.push(embed(n, q, &hadamard()));
        gens.push(embed(n, q, &phase_s()));
    }
    for c in 1..=n {
        for t in 1..=n {
            if c != t {
                gens.push(cnot_between(n, c, t));
            }
        }
    }
    gens
}

fn close_group(n: usize) -> Vec<Operator> {
    let gens = generators(n);
    let start = Operator::identity(1 << n).expect("n within register limit");
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(rounded_key(start.as_slice()), 0);
    let mut elements = vec![start];
    let mut head = 0;
    while head < elements.len() {
        let u = elements[head].clone();
        head += 1;
        for g in &gens {
            let next = (g * &u).phase_canonical();
            let key = rounded_key(next.as_slice());
            if let Entry::Vacant(slot) = seen.entry(key) {
                slot.insert(elements.len());
                elements.push(next);
            }
        }
    }
    elements
}

/// Every Clifford unitary on `n <= 2` qubits, phase-canonical, identity first.
pub fn clifford_group(n: usize) -> Result<Arc<Vec<Operator>>> {
    static ONE_QUBIT: OnceLock<Arc<Vec<Operator>>> = OnceLock::new();
    static TWO_QUBITS: OnceLock<Arc<Vec<Operator>>> = OnceLock::new();
    let cell = match n {
        1 => &ONE_QUBIT,
        2 => &TWO_QUBITS,
        _ => {
            return Err(PqstError::InvalidArgument(format!(
                "Clifford enumeration supports 1..={ENUMERATED_MAX_QUBITS} qubits, got {n}"
            )))
        }
    };
    Ok(cell.get_or_init(|| Arc::new(close_group(n))).clone())
}

/// Images of `X_j` and `Z_j` under a Clifford, each a signed Pauli.
#[derive(Debug, Clone)]
pub struct Tableau {
    n: usize,
    x_images: Vec<(PauliVec, f64)>,
    z_images: Vec<(PauliVec, f64)>,
}

impl Tableau {
    /// Uniform draw: a random symplectic basis built vector by vector with
    /// rejection, plus independent random signs.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > SAMPLED_MAX_QUBITS {
            return Err(PqstError::InvalidArgument(format!(
                "Clifford sampling supports 1..={SAMPLED_MAX_QUBITS} qubits, got {n}"
            )));
        }
        let space = 1usize << (2 * n);
        let mut fixed: Vec<PauliVec> = Vec::with_capacity(2 * n);
        let mut x_images = Vec::with_capacity(n);
        let mut z_images = Vec::with_capacity(n);
        for _ in 0..n {
            let v = loop {
                let v = PauliVec::unpack(n, rng.random_range(1..space));
                if fixed.iter().all(|&b| symp(v, b) == 0) {
                    break v;
                }
            };
            let w = loop {
                let w = PauliVec::unpack(n, rng.random_range(1..space));
                if symp(v, w) == 1 && fixed.iter().all(|&b| symp(w, b) == 0) {
                    break w;
                }
            };
            fixed.push(v);
            fixed.push(w);
            let sx = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let sz = if rng.random::<bool>() { 1.0 } else { -1.0 };
            x_images.push((v, sx));
            z_images.push((w, sz));
        }
        Ok(Self {
            n,
            x_images,
            z_images,
        })
    }

    /// Unitary with `U X_j U† = P_j`, `U Z_j U† = Q_j`, up to global phase.
    /// Column 0 is the joint +1 eigenvector of the `Q_j`; column `k` applies
    /// the `P_j` selected by the bits of `k`.
    pub fn to_unitary(&self) -> Operator {
        let n = self.n;
        let d = 1usize << n;
        let psi0 = projector_vector(&stabilizer_projector(n, &self.z_images));
        let xs: Vec<Operator> = self
            .x_images
            .iter()
            .map(|&(p, s)| pauli_operator(n, p).scale_real(s))
            .collect();
        let mut u = Operator::zeros(d).expect("n within register limit");
        for k in 0..d {
            let mut col = psi0.clone();
            for (j, x) in xs.iter().enumerate() {
                if k & (1 << (n - 1 - j)) != 0 {
                    col = x.apply(&col);
                }
            }
            for (i, z) in col.into_iter().enumerate() {
                u[(i, k)] = z;
            }
        }
        u.phase_canonical()
    }
}

/// Uniformly random Clifford modulo phase. Indexes the enumeration for
/// `n <= 2`, uses a random tableau for `n = 3`.
pub fn sample_global_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Operator> {
    if (1..=ENUMERATED_MAX_QUBITS).contains(&n) {
        let group = clifford_group(n)?;
        Ok(group[rng.random_range(0..group.len())].clone())
    } else {
        Ok(Tableau::random(n, rng)?.to_unitary())
    }
}

fn close_states(n: usize) -> Vec<Vec<C64>> {
    let gens = generators(n);
    let mut start = vec![C64::new(0.0, 0.0); 1 << n];
    start[0] = ONE;
    let mut seen = HashMap::new();
    seen.insert(rounded_key(&start), ());
    let mut states = vec![start];
    let mut head = 0;
    while head < states.len() {
        let psi = states[head].clone();
        head += 1;
        for g in &gens {
            let next = phase_canonical_vector(&g.apply(&psi));
            if seen.insert(rounded_key(&next), ()).is_none() {
                states.push(next);
            }
        }
    }
    states
}

/// All `2^n ∏_{k=1}^{n} (2^k + 1)` stabilizer states, phase-canonical.
pub fn stabilizer_states(n: usize) -> Result<Arc<Vec<Vec<C64>>>> {
    static CACHE: [OnceLock<Arc<Vec<Vec<C64>>>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if n == 0 || n > SAMPLED_MAX_QUBITS {
        return Err(PqstError::InvalidArgument(format!(
            "stabilizer states supported for 1..={SAMPLED_MAX_QUBITS} qubits, got {n}"
        )));
    }
    Ok(CACHE[n - 1]
        .get_or_init(|| Arc::new(close_states(n)))
        .clone())
}
