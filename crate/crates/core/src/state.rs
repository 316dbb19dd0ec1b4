//! Density matrices, computational-basis outcomes and Born sampling.

use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eigen::eigvalsh;
use crate::error::{PqstError, Result};
use crate::linalg::{Operator, C64};

/// Computational-basis outcome. Qubit 1 is the most significant bit of `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    n: usize,
    index: usize,
}

impl Bitstring {
    pub fn new(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > 4 || index >= (1 << n) {
            return Err(PqstError::InvalidArgument(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        Ok(Self { n, index })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0;
        for &b in bits {
            if b > 1 {
                return Err(PqstError::InvalidArgument(format!("bit value {b}")));
            }
            index = (index << 1) | b as usize;
        }
        Self::new(bits.len(), index)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Bit of qubit `q` (0-based, qubit 0 is "qubit 1").
    pub fn bit(&self, q: usize) -> u8 {
        ((self.index >> (self.n - 1 - q)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.n).map(|q| self.bit(q)).collect()
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-9;

/// Tolerances used when validating a density matrix.
#[derive(Debug, Clone, Copy)]
pub struct Validation {
    pub hermitian: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl Validation {
    pub const STRICT: Validation = Validation {
        hermitian: HERMITIAN_TOL,
        trace: TRACE_TOL,
        min_eigenvalue: -EIGEN_TOL,
    };

    /// For matrices transcribed at four printed decimals.
    pub const PRINTED: Validation = Validation {
        hermitian: 1e-10,
        trace: 5e-3,
        min_eigenvalue: -5e-3,
    };
}

/// Residuals recorded at validation time.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DensityResiduals {
    pub hermiticity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: Operator,
    residuals: DensityResiduals,
}

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        Self::with_validation(op, Validation::STRICT)
    }

    pub fn with_validation(op: Operator, v: Validation) -> Result<Self> {
        let hermiticity = op.hermiticity_residual();
        if hermiticity > v.hermitian {
            return Err(PqstError::InvalidDensity(format!(
                "Hermiticity residual {hermiticity:.3e}"
            )));
        }
        let tr = op.trace();
        let trace_error = (tr - C64::new(1.0, 0.0)).norm();
        if trace_error > v.trace {
            return Err(PqstError::InvalidDensity(format!(
                "trace {:.6} differs from 1",
                tr.re
            )));
        }
        let min_eigenvalue = eigvalsh(&op)?[0];
        if min_eigenvalue < v.min_eigenvalue {
            return Err(PqstError::InvalidDensity(format!(
                "negative eigenvalue {min_eigenvalue:.3e}"
            )));
        }
        Ok(Self {
            op,
            residuals: DensityResiduals {
                hermiticity,
                trace_error,
                min_eigenvalue,
            },
        })
    }

    /// `|ψ><ψ|` for a normalised state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::new(Operator::outer(&v)?)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut psi = vec![C64::new(0.0, 0.0); 1 << n];
        *psi.get_mut(index).ok_or_else(|| {
            PqstError::InvalidArgument(format!("basis index {index} out of range"))
        })? = C64::new(1.0, 0.0);
        Self::pure(&psi)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let d = 1usize << n;
        Self::new(Operator::identity(d)?.scale_real(1.0 / d as f64))
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.op.n_qubits()
    }

    pub fn residuals(&self) -> DensityResiduals {
        self.residuals
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        DensityFile::from_json(&text)?.into_density()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, DensityFile::from_operator(&self.op).to_json()?)?;
        Ok(())
    }
}

/// On-disk form: `{ "n_qubits": n, "re": [...], "im": [...] }`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityFile {
    pub n_qubits: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl DensityFile {
    pub fn from_operator(op: &Operator) -> Self {
        Self {
            n_qubits: op.n_qubits(),
            re: op.as_slice().iter().map(|z| z.re).collect(),
            im: op.as_slice().iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_operator(&self) -> Result<Operator> {
        if !(1..=4).contains(&self.n_qubits) {
            return Err(PqstError::InvalidDimension(1 << self.n_qubits.min(8)));
        }
        let d = 1usize << self.n_qubits;
        if self.re.len() != d * d || self.im.len() != d * d {
            return Err(PqstError::InvalidDensity(format!(
                "expected {} entries in `re` and `im`",
                d * d
            )));
        }
        let data = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| C64::new(r, i))
            .collect();
        Operator::from_vec(d, data)
    }

    pub fn into_density(self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_operator()?)
    }
}

/// `U ρ U†`. The unitary must satisfy `‖U†U − 1‖_max <= 1e-10`.
pub fn conjugate_by_unitary(rho: &DensityMatrix, u: &Operator) -> Result<DensityMatrix> {
    let residual = u.unitarity_residual();
    if residual > 1e-10 {
        return Err(PqstError::NotUnitary { residual });
    }
    let out = u.conjugate(rho.op())?;
    Ok(DensityMatrix {
        op: out,
        residuals: rho.residuals,
    })
}

/// Diagonal of `ρ` as a probability vector: real parts, values down to
/// `-1e-10` clamped to zero, then renormalised.
pub fn born_probabilities(rho: &DensityMatrix) -> Vec<f64> {
    born_from_operator(rho.op())
}

pub(crate) fn born_from_operator(op: &Operator) -> Vec<f64> {
    let mut p: Vec<f64> = op.diag().iter().map(|z| z.re.max(0.0)).collect();
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        p.iter_mut().for_each(|x| *x /= total);
    }
    p
}

/// Draws a basis index with probability `probs[k]`.
pub fn sample_outcome<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Result<Bitstring> {
    let d = probs.len();
    if !d.is_power_of_two() || d < 2 {
        return Err(PqstError::InvalidProbabilities(format!("length {d}")));
    }
    if let Some(&neg) = probs.iter().find(|&&x| x < -1e-10 || !x.is_finite()) {
        return Err(PqstError::InvalidProbabilities(format!("entry {neg}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(PqstError::InvalidProbabilities(format!("sum {total}")));
    }
    let n = d.trailing_zeros() as usize;
    Bitstring::new(n, draw_index(probs, rng.random::<f64>()))
}

/// Inverse-CDF lookup with a fallback to the last index carrying mass.
pub(crate) fn draw_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

/// Multinomial outcome counts for `shots` draws, via sequential binomials.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut left = shots;
    let mut mass: f64 = probs.iter().sum();
    for (c, &p) in counts.iter_mut().zip(probs) {
        if left == 0 {
            break;
        }
        *c = if p >= mass {
            left
        } else {
            let q = (p / mass).clamp(0.0, 1.0);
            Binomial::new(left, q)
                .expect("probability in [0, 1]")
                .sample(rng)
        };
        left -= *c;
        mass -= p;
    }
    counts
}

/// Ginibre-distributed random density matrix `G G† / Tr(G G†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DensityMatrix> {
    let d = 1usize << n;
    let g = Operator::from_vec(d, (0..d * d).map(|_| gaussian_c64(rng)).collect())?;
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part())
}

/// Random state supported on the diagonal and anti-diagonal only.
pub fn random_x_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DensityMatrix> {
    // Mixture of pure states each living in a span{|k>, |k̄>} block.
    let d = 1usize << n;
    let mut m = Operator::zeros(d)?;
    for k in 0..d / 2 {
        let kbar = d - 1 - k;
        let a = gaussian_c64(rng);
        let b = gaussian_c64(rng);
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[k] = a;
        v[kbar] = b;
        let w: f64 = rng.random::<f64>() + 0.05;
        m.add_scaled(C64::new(w, 0.0), &Operator::outer(&v)?);
        // A diagonal admixture keeps the blocks full rank.
        m[(k, k)] += C64::new(0.1 * rng.random::<f64>(), 0.0);
        m[(kbar, kbar)] += C64::new(0.1 * rng.random::<f64>(), 0.0);
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part())
}

pub(crate) fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}
