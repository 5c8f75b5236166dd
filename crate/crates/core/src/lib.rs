//! Space-time polytopal discontinuous Galerkin discretization of coupled
//! poro-elastic / visco-elastic wave propagation in two dimensions.
//!
//! Space: symmetric interior penalty dG on polygonal meshes with modal
//! (bounding-box Legendre) bases. Time: discontinuous Galerkin on slabs with
//! Gauss-Lobatto collocation, which coincides with Lobatto IIIC.
//!
//! Unknowns are the elastic displacement `u_e`, the poro-elastic solid
//! displacement `u_p` and the filtration displacement `u_f`, stored in that
//! block order.

pub mod assembly;
pub mod error;
pub mod fespace;
pub mod geometry;
pub mod linalg;
pub mod materials;
pub mod mesh;
pub mod receivers;
pub mod timedg;
pub mod verify;

pub use error::{Error, Result};
