//! Chain complexes of cellular arrangements in the plane and in space.
//!
//! Input collections of segments (2D) or planar polygons (3D) are fragmented
//! against each other, glued by congruence, and their unknown top-dimensional
//! cells are discovered by topological gift wrapping. The output is a graded
//! set of cell bases with sparse signed boundary operators.

pub mod chain;
pub mod cluster;
pub mod congruence;
pub mod error;
pub mod fragment;
pub mod geom;
pub mod index;
pub mod io;
pub mod lar;
pub mod pipeline;
pub mod planar;
pub mod scene;
pub mod shells;
pub mod tgw;

pub use chain::{Arithmetic, IntegerMatrix, SignedChain, SignedOperator, UnsignedMatrix};
pub use error::{Error, Result};
pub use lar::{ChainComplexResult, GeometricComplex};
