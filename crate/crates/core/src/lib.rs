//! Toric surface dynamics: fans, support functions, tropicalizations of toric
//! rational maps, pullback dynamics on toric classes and monomial
//! equidistribution, with an exact symbolic oracle on the projective plane.

pub mod act;
pub mod complex;
pub mod equidist;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod oracle;
pub mod scalar;
pub mod support;
pub mod surface;
pub mod tmap;
pub mod trop;

pub use error::{Error, Result};
pub use exec::Exec;
pub use lattice::{Fan, IntegerMatrix, LatticeVector, PrimitiveRay};
