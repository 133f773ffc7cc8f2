use std::fmt;

use crate::error::QuantumError;

use super::eigen::{hermitian_eigen, HERMITIAN_TOLERANCE};
use super::linalg::{embed_matrix, CMatrix, C64};
use super::state::PureState;

pub const MAX_QUBITS: usize = 5;
/// Relative tolerance for merging eigenvalues into one outcome.
pub const GROUP_TOLERANCE: f64 = 1e-8;
pub const PROJECTOR_TOLERANCE: f64 = 1e-9;

pub fn same_eigenvalue(a: f64, b: f64) -> bool {
    (a - b).abs() <= GROUP_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub value: f64,
    pub projector: CMatrix,
}

/// A Hermitian operator together with its spectral decomposition.
#[derive(Clone)]
pub struct Observable {
    name: String,
    matrix: CMatrix,
    outcomes: Vec<Outcome>,
}

/// One branch of a projective measurement.
#[derive(Clone, Debug)]
pub struct Branch {
    pub value: f64,
    pub probability: f64,
    pub state: PureState,
}

fn check_size(m: &CMatrix) -> Result<usize, QuantumError> {
    match m.qubits() {
        Some(k) if (1..=MAX_QUBITS).contains(&k) => Ok(k),
        _ => Err(QuantumError::Invalid(format!(
            "operator dimension {} is not 2^k for 1 <= k <= {MAX_QUBITS}",
            m.dim()
        ))),
    }
}

impl Observable {
    /// Diagonalises `matrix`; eigenvalues within [`GROUP_TOLERANCE`] form
    /// one outcome.
    pub fn new(name: impl Into<String>, matrix: CMatrix) -> Result<Self, QuantumError> {
        check_size(&matrix)?;
        let eig = hermitian_eigen(&matrix)?;
        let n = matrix.dim();
        let mut outcomes: Vec<(Vec<f64>, CMatrix)> = Vec::new();
        for (j, &value) in eig.values.iter().enumerate() {
            let v = eig.vector(j);
            let proj = CMatrix::outer(&v, &v);
            match outcomes.last_mut() {
                Some((vals, p)) if same_eigenvalue(vals[0], value) => {
                    vals.push(value);
                    *p = &*p + &proj;
                }
                _ => outcomes.push((vec![value], proj)),
            }
        }
        let outcomes = outcomes
            .into_iter()
            .map(|(vals, projector)| Outcome {
                value: vals.iter().sum::<f64>() / vals.len() as f64,
                projector,
            })
            .collect();
        debug_assert!(n > 0);
        Ok(Self {
            name: name.into(),
            matrix,
            outcomes,
        })
    }

    /// `Σ r_j P_j` from explicit orthogonal projectors summing to the
    /// identity.
    pub fn from_spectrum(
        name: impl Into<String>,
        spectrum: Vec<(f64, CMatrix)>,
    ) -> Result<Self, QuantumError> {
        let first = spectrum
            .first()
            .ok_or_else(|| QuantumError::Invalid("empty spectrum".into()))?;
        let n = first.1.dim();
        check_size(&first.1)?;
        let mut total = CMatrix::zeros(n);
        let mut matrix = CMatrix::zeros(n);
        let mut outcomes: Vec<Outcome> = Vec::new();
        for (value, p) in spectrum {
            if p.dim() != n {
                return Err(QuantumError::Dimension {
                    expected: n,
                    found: p.dim(),
                });
            }
            if !p.is_projector(PROJECTOR_TOLERANCE) {
                return Err(QuantumError::NotProjector);
            }
            total = &total + &p;
            matrix = &matrix + &p.scale(C64::new(value, 0.0));
            if p.trace().re < 0.5 {
                continue;
            }
            match outcomes.iter_mut().find(|o| same_eigenvalue(o.value, value)) {
                Some(o) => o.projector = &o.projector + &p,
                None => outcomes.push(Outcome { value, projector: p }),
            }
        }
        if total.max_abs_diff(&CMatrix::identity(n)) > PROJECTOR_TOLERANCE {
            return Err(QuantumError::Invalid(
                "spectral projectors do not sum to the identity".into(),
            ));
        }
        outcomes.sort_by(|a, b| a.value.total_cmp(&b.value));
        Ok(Self {
            name: name.into(),
            matrix,
            outcomes,
        })
    }

    /// Outcome 1 on the range of `p`, outcome 0 on its complement.
    pub fn projector(name: impl Into<String>, p: CMatrix) -> Result<Self, QuantumError> {
        let n = p.dim();
        let rest = &CMatrix::identity(n) - &p;
        Self::from_spectrum(name, vec![(0.0, rest), (1.0, p)])
    }

    /// Projector onto the ray of `state`.
    pub fn of_state(name: impl Into<String>, state: &PureState) -> Result<Self, QuantumError> {
        let a = state.amplitudes();
        Self::projector(name, CMatrix::outer(a, a))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn qubits(&self) -> usize {
        self.matrix.dim().trailing_zeros() as usize
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn spectrum(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.value).collect()
    }

    pub fn has_eigenvalue(&self, r: f64) -> bool {
        self.outcomes.iter().any(|o| same_eigenvalue(o.value, r))
    }

    /// `max |Σ r_j P_j − A|`.
    pub fn reconstruction_residual(&self) -> f64 {
        let n = self.dim();
        let mut sum = CMatrix::zeros(n);
        for o in &self.outcomes {
            sum = &sum + &o.projector.scale(C64::new(o.value, 0.0));
        }
        sum.max_abs_diff(&self.matrix)
    }

    /// `self` on the listed 1-based qubits of a `k`-qubit register.
    pub fn embed(&self, positions: &[usize], k: usize) -> Result<Observable, QuantumError> {
        if k > MAX_QUBITS {
            return Err(QuantumError::Positions {
                positions: positions.to_vec(),
                qubits: k,
            });
        }
        let list: Vec<String> = positions.iter().map(|q| q.to_string()).collect();
        Ok(Observable {
            name: format!("{}@{{{}}}", self.name, list.join(",")),
            matrix: embed_matrix(&self.matrix, positions, k)?,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| {
                    Ok(Outcome {
                        value: o.value,
                        projector: embed_matrix(&o.projector, positions, k)?,
                    })
                })
                .collect::<Result<_, QuantumError>>()?,
        })
    }

    /// `U† A U`; measuring it at `ψ` has the statistics of measuring `A`
    /// at `Uψ`.
    pub fn conjugate_by(&self, u: &CMatrix, uname: &str) -> Result<Observable, QuantumError> {
        if u.dim() != self.dim() {
            return Err(QuantumError::Dimension {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        u.require_unitary(HERMITIAN_TOLERANCE)?;
        let ud = u.adjoint();
        let conj = |m: &CMatrix| &(&ud * m) * u;
        Ok(Observable {
            name: format!("{}^{uname}", self.name),
            matrix: conj(&self.matrix),
            outcomes: self
                .outcomes
                .iter()
                .map(|o| Outcome {
                    value: o.value,
                    projector: conj(&o.projector),
                })
                .collect(),
        })
    }

    /// Born-rule branches with probability at least `eps`; the kept
    /// probabilities are renormalised.
    pub fn measure(&self, state: &PureState, eps: f64) -> Result<Vec<Branch>, QuantumError> {
        if state.dim() != self.dim() {
            return Err(QuantumError::Dimension {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        let mut branches = Vec::new();
        for o in &self.outcomes {
            let v = o.projector.apply(state.amplitudes())?;
            let p: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            if p < eps {
                continue;
            }
            branches.push(Branch {
                value: o.value,
                probability: p,
                state: PureState::normalized(v)?,
            });
        }
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        for b in &mut branches {
            b.probability /= total;
        }
        Ok(branches)
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Observable({}, spectrum {:?})", self.name, self.spectrum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::r;
    use crate::quantum::state::parse_state;

    #[test]
    fn degenerate_eigenvalues_are_grouped() {
        let m = CMatrix::diag(&[r(1.0), r(2.0), r(1.0), r(2.0 + 1e-12)]);
        let a = Observable::new("a", m).unwrap();
        assert_eq!(a.outcomes().len(), 2);
        assert!(a.reconstruction_residual() < 1e-10);
        assert!((a.outcomes()[0].projector.trace().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn measuring_plus_in_computational_basis() {
        let z = Observable::new("z", CMatrix::diag(&[r(1.0), r(-1.0)])).unwrap();
        let branches = z.measure(&parse_state("+").unwrap(), 1e-9).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
        }
        assert!(branches[0].state.same_ray(&parse_state("1").unwrap()));
    }

    #[test]
    fn embedding_preserves_spectrum() {
        let z = Observable::new("z", CMatrix::diag(&[r(1.0), r(-1.0)])).unwrap();
        let e = z.embed(&[2], 3).unwrap();
        assert_eq!(e.name(), "z@{2}");
        assert_eq!(e.spectrum(), z.spectrum());
        assert!(e.reconstruction_residual() < 1e-12);
        let branches = e.measure(&parse_state("0 * 1 * 0").unwrap(), 1e-9).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].value, -1.0);
    }

    #[test]
    fn projector_observables_need_projectors() {
        let m = CMatrix::diag(&[r(0.5), r(1.0)]);
        assert!(Observable::projector("p", m).is_err());
    }
}
