//! Finite-dimensional quantum backend: pure states of up to five qubits,
//! observables with cached spectral data, and measurement coalgebras.

pub mod eigen;
pub mod gates;
pub mod linalg;
pub mod model;
pub mod observable;
pub mod state;

pub use eigen::{hermitian_eigen, Eigen};
pub use gates::{bell_correction, bell_observable, bell_projector, gate, parse_gate_expr};
pub use linalg::{embed_matrix, CMatrix, C64};
pub use model::{q_object, QuantumCheck, QuantumModel, QuantumSystem, DEFAULT_BUDGET};
pub use observable::{Branch, Observable, Outcome, MAX_QUBITS};
pub use state::{bell_state, parse_complex, parse_state, random_state, PureState};
