//! Newton polygons of cyclic covers of the projective line.
//!
//! Monodromy data, Frobenius orbits, μ-ordinary polygons, Kottwitz sets,
//! clutching of covers and certified infinite families built from
//! Moonen's special families.

pub type Rational = num_rational::Ratio<i64>;

mod convex;

pub mod catalog;
pub mod clutch;
pub mod generators;
pub mod monodromy;
pub mod muord;
pub mod orbits;
pub mod polygon;
pub mod strata;

pub use monodromy::{MonodromyDatum, Signature};
pub use polygon::NewtonPolygon;
