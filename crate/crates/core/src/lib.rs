//! Exact laboratory for the boundary crossed product `C(∂F_n) ⋊ F_n`.

pub mod boundary;
pub mod crossed;
pub mod error;
pub mod free_group;
pub mod harness;
pub mod julg_valette;
pub mod limits;
pub mod linalg;
pub mod literal;
pub mod module_calculus;
pub mod operator;
pub mod scalar;

pub use boundary::{chi, chi_tilde, BiCylinderFunction, CylinderFunction, DepthTable, PointwiseOp};
pub use error::{Error, Result};
pub use free_group::{
    bigeodesic, point, ray_geodesic, word, BoundaryPoint, FreeGroup, GeodesicWindow, Letter,
    ReducedWord,
};
pub use limits::Limits;
pub use scalar::Scalar;
