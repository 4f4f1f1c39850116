//! Exact and numeric machinery for Poisson structures on spaces of twisted
//! polygons: the swapping algebra, cross-ratio coordinates, lattice
//! brackets and their compatibility, and large-N mode asymptotics.

pub mod coords;
pub mod poisson;
pub mod ring;
pub mod swapping;
pub mod verify;
pub mod virasoro;
