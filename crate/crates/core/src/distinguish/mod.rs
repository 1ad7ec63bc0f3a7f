//! Distinguishers between a target state and all `k`-separable states:
//! construction from constructors and approximators, prefix dispatch, and
//! certification of the worst-case advantage.

mod advantage;
mod checks;
mod form;
mod spec;

pub use advantage::{
    canonical_pairs, worst_case_advantage, AdvantageOptions, AdvantageReport, PairAdvantage, ADVANTAGE_LIMIT,
};
pub(crate) use advantage::{certify_branch, report_from_branches};
pub use checks::{
    data_processing_gap, estimate_acceptance, indistinguishability_check, optimal_measurement_gap,
    povm_witness, IndistinguishabilityReport, MonteCarloEstimate, PovmWitness,
};
pub use form::{extreme_product_values, ProductExtremes};
pub use spec::{
    build_reversal_distinguisher, build_swap_test_distinguisher, combine_distinguishers,
    conjugate_by_permutation, swap_test_core, DistinguisherSpec, PrefixPair,
};
