//! Fibred coalgebraic logic: typed modality expressions over a fibred modal
//! signature, predicate-lifting semantics on finite coalgebras, and a
//! quantum backend for measurement-based protocol specifications.

pub mod classical;
pub mod error;
pub mod par;
pub mod quantum;
pub mod semantics;
pub mod signature;
pub mod syntax;
