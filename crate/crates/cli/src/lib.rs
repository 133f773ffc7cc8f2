//! Command-line front end: model files, formula files, reports, protocol
//! demos and self-test suites.

pub mod demo;
pub mod error;
pub mod formula_file;
pub mod model_file;
pub mod report;
pub mod selftest;
