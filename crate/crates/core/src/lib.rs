//! Diophantine approximation from the cusp of hyperbolic 2- and 3-orbifolds.
//!
//! The crate covers the modular group PSL₂(ℤ) and the Euclidean Bianchi
//! groups PSL₂(𝒪₋d), d ∈ {1, 2, 3, 7, 11}, together with the moduli space of
//! once-punctured hyperbolic tori:
//!
//! - [`quad_field`]: exact ring arithmetic.
//! - [`moebius`]: matrices, horoballs, depth and height.
//! - [`group`]: double-coset enumeration and bounded conjugate search.
//! - [`ford`]: isometric spheres and the cell structure of the cut locus.
//! - [`approx`]: good approximating sequences and continued sequences.
//! - [`hurwitz`]: height spectra and Hurwitz constant estimates.
//! - [`torus`]: Fenchel–Nielsen computations for punctured tori.

pub mod approx;
pub mod error;
pub mod ford;
pub mod group;
pub mod hurwitz;
pub mod moebius;
pub mod par;
pub mod quad_field;
pub mod torus;

pub use error::{Error, Result};
pub use par::Exec;
pub use quad_field::{QuadInt, QuadRat, RingSpec};
