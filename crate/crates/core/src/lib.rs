//! Ideal triangulations of `C^2 s1^p s2^-1` braid closures and of 2-bridge
//! link complements, with the angle-structure machinery needed to show they
//! are geometric.

pub mod angles;
pub mod braid;
pub mod crosscheck;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod lp;
pub mod notation;
pub mod pachner;
pub mod par;
pub mod pipeline;
pub mod tau;
pub mod triangulation;
pub mod twobridge;
pub mod veering;
pub mod volume;

pub use error::{Error, Result};
pub use triangulation::{
    CuspLink, EdgeClass, EdgeSlot, FacePairing, FaceRef, Tet, Triangulation, ValidationReport,
};
