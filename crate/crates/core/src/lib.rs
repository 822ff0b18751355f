//! Bounded-strength dynamical decoupling from balanced-cycle orthogonal arrays.
//!
//! This crate constructs control schedules that average away the first-order
//! effect of an unknown few-body Hamiltonian on a register of qudits, using
//! only slowly-switched (bounded-strength) controls. The pipeline:
//!
//! 1. [`gf`] — arithmetic in GF(p^e) with deterministic modulus selection,
//!    polynomials, cyclotomic cosets and minimal polynomials.
//! 2. [`codes`] — classical linear codes over GF(q): duals, minimum and dual
//!    distances, the dual-Hamming family and extended BCH codes.
//! 3. [`cayley`] — Eulerian and balanced cycles on Cayley graphs of the
//!    additive group F_q^k.
//! 4. [`boa`] — orthogonal arrays whose columns are the codewords of a linear
//!    code, ordered along an Eulerian cycle so that every few-row restriction
//!    traces a balanced cycle (a *balanced-cycle orthogonal array*).
//! 5. [`pauli`] — projective Weyl–Heisenberg representations mapping GF(q)
//!    labels to qudit unitaries.
//! 6. [`schedule`] — control schedules read off the array columns, their
//!    palindromic symmetrization, and (de)serialization.
//! 7. [`sim`] — numerical verification: first-order average Hamiltonians,
//!    quadrature cross-checks and decoupling residuals.
//!
//! Hot loops (codeword enumeration, subset verification, slot averaging) run
//! on rayon when the default `parallel` feature is enabled and fall back to
//! sequential iteration without it. Accumulation order is fixed either way,
//! so results are bit-for-bit reproducible for a given seed and config.

pub mod boa;
pub mod builtin;
pub mod cayley;
pub mod codes;
pub mod gf;
pub mod linalg;
pub(crate) mod parallel;
pub mod pauli;
pub mod schedule;
pub mod sim;

/// Crate-wide error type. Variants map onto the CLI exit-code contract:
/// budget overruns exit 3, everything else here exits 2 (verification
/// *failures* are reported in result structs, not as errors, and exit 1).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("element of GF({got}) used where GF({expected}) was required")]
    FieldMismatch { expected: u32, got: u32 },

    #[error("division by the zero element")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("generator matrix does not have full column rank")]
    RankDeficient,

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
