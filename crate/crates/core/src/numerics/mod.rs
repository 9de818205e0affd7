//! Numerical building blocks shared by the solvers.

pub mod divided;
pub mod quadrature;
pub mod spherical;
pub mod tridiag;
