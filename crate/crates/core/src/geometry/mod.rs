//! Point sets, geometric range-space generators, degree enforcement and the
//! family parameter registry.

mod degree;
mod family;
mod points;
pub mod predicates;
mod systems;

pub use degree::{enforce_degree, DegreePolicy};
pub use family::{family_params, known_families, log_star, FamilyParams, GDescriptor};
pub use points::{generate_points, load_points, save_points, PointDistribution, PointSet};
pub use systems::{disk_system, halfplane_system, halfspace3_system, interval_system, orthant_system};

use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

/// Grid resolution: real coordinate `x` is stored as `round(x * SCALE)`.
pub const SCALE: i64 = 1 << 20;

/// Largest grid coordinate magnitude accepted. Keeps 2-D orientation tests
/// inside `i64` and the 3-D and in-circle determinants inside `i128`.
pub const MAX_COORD: i64 = 1 << 29;

/// Builds the range space of `family` over `pts`.
pub fn generate_system(family: &str, pts: &PointSet) -> Result<SetSystem> {
    match family {
        "intervals" => interval_system(pts),
        "halfplanes" => halfplane_system(pts),
        "disks" => disk_system(pts),
        "orthants" | "orthants2" | "orthants3" => orthant_system(pts),
        "halfspaces3" => halfspace3_system(pts),
        other => match family_params(other) {
            Ok(_) => Err(Error::InvalidInput(format!(
                "family `{other}` has no generator; load its incidence matrix from a system file"
            ))),
            Err(e) => Err(e),
        },
    }
}

/// Point dimension a generated family expects.
pub fn family_dimension(family: &str) -> Result<usize> {
    match family {
        "intervals" => Ok(1),
        "halfplanes" | "disks" | "orthants" | "orthants2" => Ok(2),
        "orthants3" | "halfspaces3" => Ok(3),
        other => {
            family_params(other)?;
            Err(Error::InvalidInput(format!("family `{other}` has no generator")))
        }
    }
}
