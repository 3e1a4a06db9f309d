//! Multisection diagrams of 4-manifolds: free-group words, presentations,
//! cut-system diagrams, gluing constructions and Nielsen-class certificates.

pub mod constructions;
pub mod diagrams;
pub mod error;
pub mod freewords;
pub mod io;
pub mod nielsen;
pub mod presentations;
pub mod render;
pub mod report;
pub mod smith;

pub use error::{Error, Result};
