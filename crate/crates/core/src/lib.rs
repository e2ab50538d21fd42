//! Low-crossing-number perfect matchings for bounded-degree set systems, and
//! the ±1 colorings they induce.

pub mod bench;
pub mod bitset;
pub mod coloring;
pub mod error;
pub mod geometry;
pub mod matching;
pub mod setsystem;

pub use bitset::Bitset;
pub use coloring::{Coloring, DiscrepancyReport};
pub use error::{Error, Result};
pub use matching::{CrossingReport, Matching};
pub use setsystem::{DegreeProfile, PackingCertificate, SetSystem};
