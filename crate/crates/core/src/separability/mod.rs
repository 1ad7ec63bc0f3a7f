//! Factorization structure of pure states and the k-separability distance.
//!
//! A state is `k`-separable when some permutation of its qubits makes it a
//! tensor product of `k` factors, so every structural question here is
//! asked over set partitions of the qubit indices.

mod factorize;
mod oracle;
mod overlap;
mod partition;
mod sdis;

pub use factorize::{
    finest_factorization, is_k_separable, SeparabilityReport, FACTORIZE_LIMIT, PURITY_TOLERANCE,
};
pub use oracle::{sdis_oracle, OracleResult, ORACLE_LIMIT};
pub use overlap::{best_product_overlap, OverlapOptions, ProductOverlap};
pub(crate) use overlap::Layout;
pub use partition::{stirling2, BlockPartition};
pub use sdis::{
    classify_closeness, entropy_gap_check, sdis, sdis_with, Closeness, ClosenessReport,
    EntropyGapReport, SdisOptions, SdisResult, SDIS_LIMIT,
};
