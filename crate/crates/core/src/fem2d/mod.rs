//! P1 finite elements for Neumann eigenvalues of planar domains in the four
//! two-dimensional model spaces, written in conformal coordinates.

mod assemble;
mod eigen;
mod mesh;
mod mesher;
mod model;
pub mod sparse;

pub use assemble::{assemble, mass_total, FemSystem};
pub use eigen::{solve_spectrum, solve_spectrum_with, EigenOptions, SpectrumResult};
pub use mesh::{Mesh, MeshStats};
pub use mesher::{mesh_domain, mesh_domain_with, BoundaryCurve, DomainMesh, MeshOptions};
pub use model::ConformalModel;

pub(crate) use mesher::inside as point_in_polygon;

use crate::geometry::Space;
use crate::Result;

pub fn build_model(space: Space) -> Result<ConformalModel> {
    ConformalModel::new(space)
}

/// Meshes, assembles and solves in one call, filling in mesh metadata.
pub fn domain_spectrum(dm: &DomainMesh, q: usize) -> Result<(FemSystem, SpectrumResult)> {
    let sys = assemble(&dm.model, &dm.mesh)?;
    let mut s = solve_spectrum(&sys, q)?;
    s.model = Some(dm.model);
    s.h_max = Some(dm.mesh.stats(&dm.model).h_max);
    Ok((sys, s))
}
