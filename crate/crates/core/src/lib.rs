//! Exact generating functions, brute-force enumeration and singularity
//! analysis for hairpin-loops, interior-loops and bulges in k-noncrossing,
//! τ-canonical RNA structures.
//!
//! The crate is layered bottom-up:
//!
//! * [`series`]: exact polynomials and truncated power series over big rationals.
//! * [`matchings`]: k-noncrossing perfect matchings via the Bessel determinant,
//!   with a brute-force oracle, the embedded ODE leading-coefficient data and
//!   growth checks.
//! * [`loopgf`]: the bivariate loop generating functions, both in closed form
//!   and re-derived as a sum over shapes.
//! * [`enumerate`]: brute-force structures, loop classification and shape
//!   projection, used as the oracle for everything above.
//! * [`singularity`]: dominant singularities, implicit derivatives, the
//!   central-limit parameters and the empirical checks around them.

pub mod enumerate;
pub mod error;
pub mod limits;
pub mod loopgf;
pub mod matchings;
pub mod numeric;
pub mod reference;
pub mod series;
pub mod singularity;

pub use error::{Error, Result};
pub use loopgf::{GfRequest, LoopKind};
pub use series::{BSeries, BiPoly, ExactRational, Poly, SeriesError, UPoly, USeries};
