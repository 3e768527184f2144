//! Cover entropy, independence density and shattering computations for shift
//! actions of `Z^d` and free groups.

pub mod comb;
pub mod cover;
mod error;
pub mod family;
pub mod group;
pub mod independence;
pub mod logratio;
pub mod report;
pub mod ring;
pub mod scenarios;
pub mod setcover;
pub mod subshift;

pub use error::{Error, Result};
pub use family::{Family, SetTuple};
pub use group::{FiniteSubset, GroupElement, GroupKind, GroupSpec};
pub use logratio::LogRatio;
pub use ring::GroupRingElement;
pub use subshift::{Alphabet, CylinderSet, ShiftSystem, Verdict};
