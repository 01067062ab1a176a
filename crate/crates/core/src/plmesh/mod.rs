//! Piecewise-linear surfaces glued from Euclidean triangles, and their
//! near-equilateral triangulations.
//!
//! The pipeline subdivides every original edge into intervals of a common
//! length `ε`, fills each triangle with the `ε`-lattice triangles that fit
//! strictly inside it, triangulates the leftover annulus by nearest-point
//! matching, refines long annulus edges by partial barycentric subdivision,
//! and finally glues the per-triangle meshes along shared edges.

mod annulus;
mod barycentric;
mod geom;
mod grid;
mod off;
mod pipeline;
mod plan;
mod presets;
mod surface;

use thiserror::Error;

pub use annulus::{annulus_triangulate, AnnulusOutput};
pub use barycentric::{partial_barycentric, GeoMesh};
pub use grid::{grid_fill, realize_triangle, trim_patch, Patch};
pub use off::to_off;
pub use pipeline::{
    balanced_triangulation, balanced_with_plan, mesh_filling_report, report_for_mesh, BalancedMesh, FillingReport,
    MeshStats,
};
pub use plan::{dirichlet_plan, EdgePlan, SubdivisionPlan};
pub use presets::{
    disk_preset, disk_surface, discretized_hemisphere, equilateral_surface, flat_disk_mesh, hemisphere_mesh,
    hemisphere_preset, hemisphere_surface, unit_square, wheel_preset,
};
pub use surface::{heron_area, validate_surface, PLSurface, SurfaceReport, SurfaceTopology, SurfaceViolation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlMeshError {
    #[error("validate_surface: {0}")]
    InvalidSurface(String),
    #[error("heron_area: degenerate triangle ({0}, {1}, {2})")]
    Degenerate(f64, f64, f64),
    #[error("dirichlet_plan: {0}")]
    Plan(String),
    #[error("grid_fill: {0}")]
    Grid(String),
    #[error("annulus_triangulate: {0}")]
    Annulus(String),
    #[error("partial_barycentric: {0}")]
    Barycentric(String),
    #[error("glue: {0}")]
    Glue(String),
    #[error("preset: {0}")]
    Preset(String),
    #[error("report: {0}")]
    Report(String),
}
