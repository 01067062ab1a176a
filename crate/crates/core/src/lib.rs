//! Lipschitz fillings of cycle graphs: triangulated disks, skeleton
//! distances, vertex lower bounds, separator certificates, exhaustive search
//! for small minimal fillings, and PL surface meshing.

pub mod bounds;
pub mod complex;
pub mod metrics;
pub mod plmesh;
pub mod rational;
pub mod search;
pub mod separators;

pub use complex::{AbstractTriangulation, ClosedSurface, VertexId};
pub use metrics::{lipschitz_constant, LipschitzReport};
pub use rational::Rational;
