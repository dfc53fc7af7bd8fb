//! Exterior calculus for differential forms with prescribed singularities
//! along a hypersurface, and verifiers for the singular symplectic, contact,
//! Poisson and folded structures built from them.

pub mod algebroids;
pub mod catalog;
pub mod certificate;
pub mod cohomology;
pub mod expr;
pub mod geometry;
pub mod gluing;
pub mod linalg;
pub mod random;
pub mod settings;
pub mod structures;
