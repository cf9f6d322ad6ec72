//! Littlewood-Paley analysis on the lattice: dyadic blocks, homogeneous
//! Besov and Chemin-Lerner norms, and the low/high frequency split.

mod norms;
mod partition;

pub use norms::{
    aggregate, besov_norm, besov_norm_vector, block_lp_norms, block_time_norms, chemin_lerner_norm,
    lebesgue_time_norm, split_low_high, time_lq, validate_critical_p, BesovSpec, LowHigh,
    NormReport,
};
pub use partition::{build_partition, chi, phi, BlockKind, DyadicPartition};

#[cfg(test)]
mod tests;
