//! Exact computer algebra for twisted superconformal algebras.
//!
//! The crate builds, entirely over exact arithmetic, the structural data of
//! the minimal quantum-reduction W-algebras in their twisted sectors
//! (Ramond N=1, N=2 Ramond-type and twisted, N=3, N=4 and big N=4
//! families): finite-dimensional Lie superalgebras with their twists,
//! boundary ("s"-value) tables and reduction constants, twisted affine and
//! W-algebra root systems, partition functions, free-field realizations on
//! truncated Fock modules, and the closed-form factorization of the
//! contravariant-form determinant on Verma modules.  For the linear
//! families the closed forms are checked against brute-force Gram
//! determinants computed from the algebra presentations.
//!
//! All core arithmetic is generic over the [`scalar::Scalar`] trait
//! (num-traits based); the pipeline instantiates it with arbitrary-precision
//! rationals ([`Q`]) and with quadratic extensions ([`scalar::Sqrt`]) where
//! square-root normalizations appear in the realizations.  No floating
//! point enters any computation.

pub mod detform;
pub mod fock;
pub mod liealg;
pub mod partition;
pub mod poly;
pub mod report;
pub mod rootdata;
pub mod scalar;
pub mod verma;

/// Arbitrary-precision rational scalar used throughout the pipeline.
pub type Q = num_rational::BigRational;

/// Rationals with one adjoined square root, `Q(sqrt(d))`.
pub type QSqrt = scalar::Sqrt<Q>;

/// A tower with two adjoined square roots, `Q(sqrt(d1), sqrt(d2))`.
pub type QSqrt2 = scalar::Sqrt<QSqrt>;

pub use scalar::{q, qi, Scalar};
