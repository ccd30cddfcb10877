//! Analysis of post-critically finite endomorphisms of complex projective
//! space given by exact rational homogeneous polynomials.

pub mod bigfloat;
pub mod catalog;
pub mod error;
pub mod fatou;
pub mod mpoly;
pub mod linalg;
pub mod pcf;
pub mod periodic;
pub mod poly;
pub mod projmap;
pub mod roots;

pub use error::{Error, Result};
