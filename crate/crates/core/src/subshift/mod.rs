//! Shift spaces over a group with a finite alphabet, cylinder algebra and
//! realizability oracles.

mod coset;
mod cylinder;
mod diameter;
mod local;
mod system;

pub use cylinder::{CylinderSet, PatternSet, MAX_PATTERNS};
pub use diameter::{cylinder_diameter, values_in_system, Diameter, Dyadic};
pub use system::{Alphabet, Budget, ForbiddenPattern, ShiftSystem, Universe, Variant, Verdict};
