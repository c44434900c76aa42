//! Coefficient bounds for bi-univalent function classes defined through
//! Cesàro means.
//!
//! * [`series`]: truncated complex power series (product, composition,
//!   reversion).
//! * [`cesaro`]: the Cesàro mean factors and operator.
//! * [`bounds`]: closed-form `|a_2|`, `|a_3|` bounds for the three classes.
//! * [`class`]: the classes as strategies behind [`class::BiUnivalentClass`],
//!   plus a name registry.
//! * [`construct`]: class members from seed prefixes, membership sampling.
//! * [`search`]: brute-force extremal oracle and consistency reports.
//! * [`report`]: CSV/JSON encodings used by the command-line tool.

pub mod bounds;
pub mod cesaro;
pub mod class;
pub mod cli;
pub mod construct;
pub mod report;
pub mod search;
pub mod series;

pub use num_complex::Complex64;
