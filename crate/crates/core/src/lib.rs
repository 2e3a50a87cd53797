//! Quivers with relations as executable linear algebra: representation
//! spaces, the moment-map energy and its downward gradient flow,
//! Harder-Narasimhan classification, deformation complexes and negative
//! slices, quiver expansion/restriction, and the integer rank/degree ledger
//! attached to a pair of adjacent critical sets.

pub mod builders;
pub mod deform;
pub mod error;
pub mod expansion;
pub mod flow;
pub mod io;
pub mod ledger;
pub mod linalg;
pub mod quiver;
pub mod rep;
pub mod rng;
pub mod slice;
pub mod verify;

pub use error::{Error, Result};
