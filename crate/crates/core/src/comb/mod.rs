//! Finite combinatorics of trace sets: cover numbers over the product cover `𝒲`,
//! full shattering and brute-force checks of the shattering threshold.

mod sweep;
mod trace;

pub use sweep::{
    comb1_sweep, km_bound_check, Comb1Row, KmMode, KmReport, SweepMode, ThresholdForm,
    EXHAUSTIVE_CELLS,
};
pub use trace::{
    full_shatter_max, membership_trace, ns_cover_number, shatters, NsCover, Shatter, TraceSet,
    WCoverTable, WItem, MAX_CELLS,
};
