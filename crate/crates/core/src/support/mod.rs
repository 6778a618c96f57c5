//! Positively homogeneous piecewise-linear functions, numeric convex
//! functions, and the Ronkin/Newton bridge.

mod laurent;
mod numeric;
mod pl;
mod ronkin;

pub use laurent::LaurentPoly;
pub use numeric::{growth_numeric, homogenize, restrict_to_fan, sandwich_constant, Growth, NumericConvexFunction};
pub use pl::PLFunction;
pub use ronkin::{newton_polygon, newton_support, ronkin, ronkin_function, RonkinValue};
pub(crate) use ronkin::{convex_hull as ronkin_hull, polygon_edges as ronkin_edges};
