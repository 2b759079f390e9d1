//! Numerical building blocks shared by the physics modules.

pub mod quadrature;
pub mod roots;
pub mod tridiag;

pub use quadrature::Quadrature;
pub use roots::{bisect_predicate, brent};
pub use tridiag::{GeneralizedTridiagonal, SymTridiagonal};
