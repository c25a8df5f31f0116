//! Feature-map circuits, exact statevector simulation and resource counts.
//!
//! Qubit `q` is bit `q` of a basis-state index (little-endian).

mod circuit;
mod resources;
mod statevector;

pub use circuit::{
    build_feature_map, build_pauli_z_feature_map, build_zz_feature_map, Circuit, Entanglement,
    FeatureMapKind, Gate,
};
pub use resources::{closed_form_depth, estimate_resources, ResourceEstimate};
pub use statevector::{simulate, Statevector, MAX_QUBITS};

/// Default feature-map repetitions.
pub const DEFAULT_REPETITIONS: usize = 2;
