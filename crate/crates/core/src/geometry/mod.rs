//! Scene geometry, ghost solid seeding and neighbor search.

mod ghosts;
mod neighbors;
mod sdf;

pub use ghosts::{seed_ghost_solids, GhostSolidSet};
pub(crate) use ghosts::for_each_lattice_point;
pub use neighbors::{build_neighbors, mean_min_distance, Adjacency, CellGrid, NeighborTable};
pub use sdf::{Primitive, SignedDistanceField};
