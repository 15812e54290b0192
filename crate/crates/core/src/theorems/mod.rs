//! Executable forms of the cover lemmas, the non-small theorem, the decomposition
//! bounds and the partition experiments.

mod bounds;
mod finite;
mod lemmas;
mod partition;

pub use bounds::{double_exp_bound, factorial, phi, phi_real, phi_term, phi_with_argmax, PhiValue, MAX_DOUBLE_EXP_N, MAX_PHI_N};
pub use finite::{
    exhaustive_finite_validation, lemma_large_verify_finite, lemma_union_finite, FiniteLemmaLarge, FiniteUnionTrace,
    FiniteValidationConfig, FiniteValidationReport,
};
pub use lemmas::{
    lemma_large_verify, lemma_union_decompose, lemma_union_decompose_strict, theorem_nonsmall_pipeline, LemmaLargeReport,
    LemmaUnionTrace, PipelineReport, ResidueWitness, CHECK_RADIUS, SHIFT_SEARCH_RADIUS,
};
pub use partition::{partition_experiment, random_partition, PartRow, PartitionReport, PartitionSpec, MAX_PARTITION_MODULUS, MAX_PARTS};
