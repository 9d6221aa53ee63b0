//! Integer points on spheres, maximal vanishing orders and observability
//! constants of Laplace eigenfunctions on flat tori, together with the
//! lattice-cluster and Turán-type checks that accompany them.

pub mod cli;
pub mod clusters;
mod ddouble;
pub mod error;
pub mod exact;
pub mod expoly;
pub mod lattice;
pub mod observability;
pub mod report;
pub mod spectral;
pub mod turan;

pub use error::{Error, Result};
