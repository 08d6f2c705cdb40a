//! Generalized cluster algebras with reciprocal exchange polynomials and
//! shear coordinates on surfaces with holes and orbifold points.

pub mod cluster;
pub mod fatgraph;
pub mod geodesics;
pub mod lambda;
pub mod laurent;
pub mod mcg;
pub mod ring;

pub use laurent::{LaurentPoly, Monomial, PolyRing};
pub use ring::{CyclotomicField, FieldElem};
