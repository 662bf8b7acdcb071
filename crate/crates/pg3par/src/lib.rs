//! Line geometry of real projective 3-space: Clifford parallelisms, rotational
//! spreads built from hyperboloid reguli, and rotation-group orbit parallelisms,
//! together with numerical verifiers for the spread and parallelism axioms.
//!
//! The main objects:
//!
//! - [`lines`]: oriented lines in Plücker coordinates, the linear split of the
//!   Klein quadric onto a pair of unit 3-vectors, incidence, and induced line
//!   maps of projective transformations.
//! - [`quat`]: quaternion algebra; rotations of 4-space as two-sided unit
//!   quaternion multiplications.
//! - [`clifford`]: left/right Clifford parallelisms as orbit structures of the
//!   one-sided multiplications, and the conjugation map exchanging them.
//! - [`spreads`]: rotational spreads with slope profile `f` and center profile
//!   `g` (the regular complex spread is `f(r) = c/r`, `g ≡ 0`), membership
//!   tests, and point-coverage verification.
//! - [`parallelism`]: orbit families obtained by conjugating the rotation
//!   group by an axial similarity `(x,y,z) ↦ (x,y,sz+t)`, class resolution on
//!   the 2-sphere of axis directions, parallelism-axiom verification,
//!   automorphism tests, and the scale-reduction equivalence.
//! - [`suite`]: the named end-to-end verification battery used by the CLI and
//!   the acceptance tests.

pub mod clifford;
pub mod error;
pub mod lines;
pub mod parallelism;
pub mod quat;
pub mod report;
pub mod sampling;
pub mod sphere;
pub mod spreads;
pub mod suite;

pub use error::{Error, Result};
