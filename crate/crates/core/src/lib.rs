//! Entanglement classification of N-qubit states by integer partitions.
//!
//! A state built as a tensor product of `p` fully entangled blocks of sizes
//! `n_1 >= ... >= n_p` (an integer partition of N) has entanglement index
//! `E = sum_j (n_j - 1) = N - p`. This crate enumerates the classes, builds
//! GHZ-block representatives, recovers the block structure of arbitrary
//! pure states from marginal purities, and checks the index against the
//! standard entanglement-measure properties.

pub mod classify;
pub mod construct;
pub mod error;
pub mod io;
pub mod partitions;
pub mod statecore;
pub mod verify;

pub use classify::{
    classify, ensemble_index, entanglement_index, finest_factorization, minimal_pure_subset,
    mixed_product_split, ClassReport, Ensemble, EnsemblePayload, EnsembleTerm,
};
pub use construct::{basis_state, ghz, ghz_product, DressedProductSpec, GhzProduct};
pub use error::{Error, Result};
pub use partitions::{
    class_spectrum, enumerate_partitions, index_of, partition_count, shape_of, IndexValue,
    IntegerPartition, SetPartition,
};
pub use statecore::{DensityMatrix, LocalUnitary, PureState, QubitSet, DEFAULT_TOL};
pub use verify::{run_property_suite, Basis, Property, PropertyReport};
