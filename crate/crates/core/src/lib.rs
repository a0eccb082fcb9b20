pub mod assembly;
pub mod bubble;
pub mod error;
pub mod fe;
pub mod field;
pub mod green;
pub mod linalg;
pub mod measure2d;
pub mod mesh;
pub mod polyexp;
pub mod problem;
pub mod quadrature;
pub mod solver1d;
pub mod solver2d;
pub mod study;
pub mod tridiag;
pub mod verify;
