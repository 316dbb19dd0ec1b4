//! Dense complex square matrices for registers of up to four qubits.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{PqstError, Result};

pub type C64 = Complex64;

pub const MAX_DIM: usize = 16;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major dense complex matrix of dimension `2^n`, `1 <= n <= 4`.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim.is_power_of_two() && (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(PqstError::InvalidDimension(dim))
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for i in 0..dim {
            op[(i, i)] = ONE;
        }
        Ok(op)
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(PqstError::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend(row);
        }
        Self::from_vec(dim, data)
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(PqstError::DimensionMismatch {
                left: dim * dim,
                right: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(PqstError::NonFinite);
        }
        Ok(Self { dim, data })
    }

    /// Real-valued constructor, mostly for tests and fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        let mut op = Self::zeros(entries.len())?;
        for (i, &z) in entries.iter().enumerate() {
            op[(i, i)] = z;
        }
        Ok(op)
    }

    /// `|v><v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Result<Self> {
        let dim = v.len();
        let mut op = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                op[(i, j)] = v[i] * v[j].conj();
            }
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `a += s * b`, in place.
    pub fn add_scaled(&mut self, s: C64, other: &Operator) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn try_mul(&self, rhs: &Operator) -> Result<Self> {
        same_dim(self, rhs)?;
        Ok(self.matmul(rhs))
    }

    fn matmul(&self, rhs: &Operator) -> Self {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                let dst = &mut out[i * d..(i + 1) * d];
                for (o, &b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: d, data: out }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| self.data[i * d + j] * v[j]).sum())
            .collect()
    }

    /// `U A U†`
    pub fn conjugate(&self, a: &Operator) -> Result<Self> {
        same_dim(self, a)?;
        Ok(self.matmul(a).matmul(&self.adjoint()))
    }

    /// Kronecker product with `self` on the most significant qubits.
    pub fn kron(&self, rhs: &Operator) -> Result<Self> {
        let (da, db) = (self.dim, rhs.dim);
        let dim = da * db;
        if dim > MAX_DIM {
            return Err(PqstError::InvalidDimension(dim));
        }
        let mut out = Self::zeros(dim)?;
        for i in 0..da {
            for j in 0..da {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out[(i * db + k, j * db + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a Operator>) -> Result<Self> {
        let mut it = factors.into_iter();
        let first = it
            .next()
            .ok_or_else(|| PqstError::InvalidArgument("empty tensor product".into()))?
            .clone();
        it.try_fold(first, |acc, f| acc.kron(f))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.adjoint().matmul(self);
        let id = Self::identity(self.dim).expect("dimension already validated");
        prod.max_abs_diff(&id)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// `(A + A†) / 2`
    pub fn hermitian_part(&self) -> Self {
        let mut out = self.clone();
        out.add_scaled(ONE, &self.adjoint());
        out.scale_real(0.5)
    }

    /// Global phase fixed so the first entry with modulus above `1e-9`
    /// (row-major) is real and positive.
    pub fn phase_canonical(&self) -> Self {
        match self.data.iter().find(|z| z.norm() > 1e-9) {
            Some(&z) => self.scale(z.conj() / z.norm()),
            None => self.clone(),
        }
    }
}

fn same_dim(a: &Operator, b: &Operator) -> Result<()> {
    if a.dim == b.dim {
        Ok(())
    } else {
        Err(PqstError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        })
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

// Operator arithmetic panics on dimension mismatch; the fallible forms are
// `try_mul` and friends.
impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator product");
        self.matmul(rhs)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator sum");
        let mut out = self.clone();
        out.add_scaled(ONE, rhs);
        out
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(
            self.dim, rhs.dim,
            "dimension mismatch in operator difference"
        );
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
