//! Independence sets, densities, splittings and the doubling and tower constructions.

mod chaos;
mod double;
mod search;
mod split;

pub use chaos::{chaos_tower_step, ChaosStage, ChaosStepReport, GammaCheck};
pub use double::{
    double_family, double_iterate, separated_size, DoubleChain, DoubleWitness, Inequality,
    SEPARATION_RADIUS,
};
pub use search::{
    density_upper_estimate, family_ratio, growth_table, is_independence_set,
    max_independence_subset, verify_witness, Certificate, CertificateBlock, DensityReport,
    DensityRow, FamilyRatio, GrowthRow, IndependenceCheck, IndependenceWitness, MaxIndependence,
    Tri,
};
pub use split::{
    comb2_extract, family_diameter, power_tuple, same_in_system, simple_split, split_until_diam,
    Comb2Outcome, SplitEvent, SplitOutcome,
};
