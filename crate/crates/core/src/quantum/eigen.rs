//! Complex Jacobi diagonalisation of Hermitian matrices.

use crate::error::QuantumError;

use super::linalg::{C64, CMatrix};

pub const MAX_SWEEPS: usize = 100;
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: CMatrix,
    pub sweeps: usize,
}

impl Eigen {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        (0..self.vectors.dim()).map(|i| self.vectors.get(i, j)).collect()
    }

    /// `max |V Λ V† − A|`.
    pub fn reconstruction_residual(&self, a: &CMatrix) -> f64 {
        let lambda = CMatrix::diag(&self.values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let rebuilt = &(&self.vectors * &lambda) * &self.vectors.adjoint();
        rebuilt.max_abs_diff(a)
    }

    /// `max |V† V − 1|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.vectors.dim();
        (&self.vectors.adjoint() * &self.vectors).max_abs_diff(&CMatrix::identity(n))
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn hermitian_eigen(m: &CMatrix) -> Result<Eigen, QuantumError> {
    m.require_hermitian(HERMITIAN_TOLERANCE)?;
    let n = m.dim();
    // Symmetrise so that rounding in the input cannot drift.
    let mut a = (m + &m.adjoint()).scale(C64::new(0.5, 0.0));
    let mut v = CMatrix::identity(n);
    let threshold = 1e-12 * a.frobenius_norm().max(1.0);
    let mut sweeps = 0;
    while off_diagonal_norm(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(QuantumError::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &j) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, col, v.get(i, j));
        }
    }
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}

/// One two-sided rotation `A ← J†AJ`, `V ← VJ` zeroing `a[p][q]`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * g);
    let t = if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on rows/columns p, q.
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    let n = a.dim();
    for k in 0..n {
        let (akp, akq) = (a.get(k, p), a.get(k, q));
        a.set(k, p, akp * jpp + akq * jqp);
        a.set(k, q, akp * jpq + akq * jqq);
        let (vkp, vkq) = (v.get(k, p), v.get(k, q));
        v.set(k, p, vkp * jpp + vkq * jqp);
        v.set(k, q, vkp * jpq + vkq * jqq);
    }
    for k in 0..n {
        let (apk, aqk) = (a.get(p, k), a.get(q, k));
        a.set(p, k, jpp.conj() * apk + jqp.conj() * aqk);
        a.set(q, k, jpq.conj() * apk + jqq.conj() * aqk);
    }
    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    let (app, aqq) = (a.get(p, p).re, a.get(q, q).re);
    a.set(p, p, C64::new(app, 0.0));
    a.set(q, q, C64::new(aqq, 0.0));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{c, r};

    #[test]
    fn diagonalises_pauli_y() {
        let y = CMatrix::from_rows(vec![vec![r(0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), r(0.0)]]).unwrap();
        let e = hermitian_eigen(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0).abs() < 1e-12);
        assert!(e.reconstruction_residual(&y) < 1e-12);
        assert!(e.orthonormality_residual() < 1e-12);
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let d = CMatrix::diag(&[r(3.0), r(-1.0), r(2.0)]);
        let e = hermitian_eigen(&d).unwrap();
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_rows(vec![vec![r(0.0), r(1.0)], vec![r(0.0), r(0.0)]]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(QuantumError::NotHermitian(_))));
    }
}
