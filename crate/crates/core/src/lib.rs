//! Executable models of finite-dimensional product systems over
//! quasi-lattice ordered monoids.
//!
//! The crate is organised around five layers:
//!
//! * [`monoid`] — the monoids `N^k` and free products of copies of `N`,
//!   with the left-divisibility order, joins and the abelianisation map.
//! * [`system`] — product systems: dimension homomorphisms, fibre vectors,
//!   lexicographic multiplication/factorisation and multiplier twists.
//! * [`fock`] — truncated left regular representations and the projection
//!   calculus on the truncated Fock space.
//! * [`reps`] — generator-level representations, relation compilers and
//!   the faithfulness criterion.
//! * [`crossed`] — the symbolic monomial algebra and the grading/diagonal
//!   expectations, cross-checked against their Fock realisations.
//!
//! [`oracle`] holds independent brute-force implementations of the order
//! operations, used for cross-validation only.

pub mod crossed;
pub mod error;
pub mod fock;
pub mod monoid;
pub mod oracle;
pub mod report;
pub mod reps;
pub mod system;

pub use error::{Error, Result};
