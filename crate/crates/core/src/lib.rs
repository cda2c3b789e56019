//! Exact and numerical machinery for optimal universal quantum-cloning
//! fidelity trade-offs.
//!
//! The crate is organised around three layers:
//!
//! * **Exact combinatorics** — [`bitstrings`] (fixed-weight bit strings,
//!   big-integer binomials) and [`gram`] (the rational Gram matrices
//!   `G_y` whose quadratic forms are cloning fidelities, with closed-form
//!   spectra and inverses).
//! * **Dense oracle** — [`hilbert`] builds symmetric projectors, Choi
//!   operators and the special states on `(C^d)^{⊗n}` explicitly, so every
//!   closed form can be cross-checked by brute force.
//! * **Solvers** — [`tradeoff`] (closed-form `1→N` and `N−1→N` solvers, the
//!   rank-1 reduction, kernel consistency conditions and the general
//!   `(1,L,N)` feasibility pipeline) and [`two_to_four`] (the `2→4`, `L=2`,
//!   `d=2` case study).
//!
//! [`verify`] packages the acceptance checks used by the CLI.
//!
//! Matrices are generic over the scalar type through [`scalar::Scalar`];
//! exact work uses [`Rat`], numerics use `f64`/`Complex64`.

pub mod bitstrings;
pub mod error;
pub mod gram;
pub mod hilbert;
pub mod matrix;
pub mod scalar;
pub mod tradeoff;
pub mod two_to_four;
pub mod verify;

/// Arbitrary-precision rational scalar used for all exact linear algebra.
pub type Rat = num_rational::BigRational;
/// Dense matrix over exact rationals.
pub type RatMatrix = matrix::Matrix<Rat>;
/// Dense matrix over `f64`.
pub type RealMatrix = matrix::Matrix<f64>;
/// Dense matrix over `Complex64`.
pub type CplxMatrix = matrix::Matrix<num_complex::Complex64>;

pub use bitstrings::{binom, Binomial, BitString};
pub use error::{Error, Result};
pub use gram::{GramLabel, GramMatrix, SpectrumReport};
pub use hilbert::{ChoiOperator, DenseOperator, DenseState, SymBasis};
pub use matrix::Matrix;
pub use scalar::Scalar;
pub use tradeoff::{
    CloneProblem, ConsistencyMatrix, FidelityVector, Rank1Class, Rank1Reduction, Target,
    TradeoffResult, Verdict,
};
pub use two_to_four::PairFidelities;
pub use verify::CriterionReport;

/// Convenience constructor for an exact rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}
