//! Exact homological algebra over finite-dimensional commutative local algebras over
//! finite fields: minimal free resolutions, Ext and Tor dimension tables, trivial
//! extensions, Poincaré series and modules over polynomial extensions `A[x]`.

pub mod algebra;
pub mod error;
pub mod field;
pub mod homology;
pub mod matrix;
pub mod module;
pub mod poly;
pub mod poly_matrix;
pub mod polyext;
pub mod series;
pub mod sparse;

pub use algebra::{AlgebraElement, FiniteAlgebra, LocalData, LocalFactor};
pub use error::{Error, Result};
pub use field::{FieldElement, GaloisField};
pub use homology::{DimKind, DimTable, FreeResolution, PSup};
pub use matrix::Matrix;
pub use module::FiniteModule;
pub use poly::{Poly, PolyRing};
pub use poly_matrix::{InvariantFactorData, PolyMatrix};
pub use polyext::{ExtDecomposition, PolyElement, PolyPresentedModule};
pub use series::TruncatedSeries;
