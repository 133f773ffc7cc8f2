use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::QuantumError;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, QuantumError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(QuantumError::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self, QuantumError> {
        Self::from_rows(rows.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect())
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn qubits(&self) -> Option<usize> {
        (self.n.is_power_of_two() && self.n > 0).then(|| self.n.trailing_zeros() as usize)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<Self, QuantumError> {
        self.check_dim(other)?;
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(m)
    }

    /// Kronecker product `self ⊗ other`; `self` acts on the more
    /// significant qubits.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (a, b) = (self.n, other.n);
        let n = a * b;
        let mut m = Self::zeros(n);
        for i in 0..a {
            for j in 0..a {
                let x = self.data[i * a + j];
                if x == ZERO {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        m.data[(i * b + k) * n + j * b + l] = x * other.data[k * b + l];
                    }
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>, QuantumError> {
        if v.len() != self.n {
            return Err(QuantumError::Dimension {
                expected: self.n,
                found: v.len(),
            });
        }
        let n = self.n;
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitary_deviation(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .map(|m| m.max_abs_diff(&Self::identity(self.n)))
            .unwrap_or(f64::INFINITY)
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
            && self.matmul(self).map(|m| m.max_abs_diff(self) <= tol).unwrap_or(false)
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<(), QuantumError> {
        let d = self.hermitian_deviation();
        if d > tol {
            return Err(QuantumError::NotHermitian(d));
        }
        Ok(())
    }

    pub fn require_unitary(&self, tol: f64) -> Result<(), QuantumError> {
        let d = self.unitary_deviation();
        if d > tol {
            return Err(QuantumError::NotUnitary(d));
        }
        Ok(())
    }

    fn check_dim(&self, other: &CMatrix) -> Result<(), QuantumError> {
        if self.n != other.n {
            return Err(QuantumError::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, other: &CMatrix) -> CMatrix {
        self.matmul(other).expect("matrix dimensions differ")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Bit mask of 1-based qubit `q` in a `k`-qubit register; qubit 1 is the
/// most significant bit.
pub fn qubit_bit(q: usize, k: usize) -> usize {
    1 << (k - q)
}

/// `a` acting on the listed qubits (1-based, in the order of `a`'s own
/// tensor factors) and the identity on the others.
pub fn embed_matrix(a: &CMatrix, positions: &[usize], k: usize) -> Result<CMatrix, QuantumError> {
    check_positions(positions, k)?;
    let m = positions.len();
    if a.dim() != 1 << m {
        return Err(QuantumError::Dimension {
            expected: 1 << m,
            found: a.dim(),
        });
    }
    let bits: Vec<usize> = positions.iter().map(|&q| qubit_bit(q, k)).collect();
    let mask: usize = bits.iter().sum();
    let sub = |i: usize| -> usize {
        bits.iter()
            .fold(0, |acc, &b| (acc << 1) | usize::from(i & b != 0))
    };
    let n = 1 << k;
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i & !mask == j & !mask {
                out.set(i, j, a.get(sub(i), sub(j)));
            }
        }
    }
    Ok(out)
}

pub fn check_positions(positions: &[usize], k: usize) -> Result<(), QuantumError> {
    let mut seen = vec![false; k + 1];
    for &q in positions {
        if q == 0 || q > k || seen[q] {
            return Err(QuantumError::Positions {
                positions: positions.to_vec(),
                qubits: k,
            });
        }
        seen[q] = true;
    }
    if positions.is_empty() {
        return Err(QuantumError::Positions {
            positions: Vec::new(),
            qubits: k,
        });
    }
    Ok(())
}
