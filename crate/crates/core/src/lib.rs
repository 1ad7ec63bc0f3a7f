//! Computational measures of multipartite pure-state entanglement.
//!
//! The crate is organised bottom-up:
//!
//! - [`qstate`]: qustrings (normalized pure states), density operators, qubit
//!   permutations, partial traces, fidelity / trace distance / Bures / L2
//!   metrics, von Neumann and average entropy, and isotopy testing.
//! - [`separability`]: finest tensor factorization (separability index),
//!   best product-state overlap, the k-separability distance and its
//!   brute-force oracle, closeness classification and the entropy-gap check.
//! - [`circuit`]: the fixed gate set `{I, X, H, T, CNOT, CSWAP}`, dense and
//!   hybrid classical/quantum simulation, the unary `1^{σ,m}` prefix codec,
//!   constructor and approximator libraries, permutation networks and the
//!   canonical self-delimiting circuit encoding.
//! - [`distinguish`]: reversal and swap-test distinguishers, prefix-dispatch
//!   combination, worst-case advantage certification, the POVM witness and the
//!   data-processing (indistinguishability) check.
//! - [`descriptive`]: exhaustive circuit enumeration and the size-bounded
//!   approximating / distinguishing complexities under the encoding-length
//!   surrogate for `C(D)`.
//! - [`verify`]: named property suites used by the command-line `verify`
//!   subcommand.
//!
//! Conventions used everywhere: qubit indices are 0-based in the Rust API
//! (1-based in JSON and in the unary prefix codec), qubit 0 is the most
//! significant bit of a basis index, and all logarithms are base 2.

pub mod circuit;
pub mod descriptive;
pub mod distinguish;
mod error;
pub mod io;
pub mod qstate;
pub mod rng;
pub mod separability;
pub mod verify;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Version string embedded in every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
