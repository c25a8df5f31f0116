use serde::{Deserialize, Serialize};

use super::{build_feature_map, FeatureMapKind};
use crate::error::Result;

/// Exact gate counts and depth of a feature-map circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub map_kind: FeatureMapKind,
    pub n_qubits: usize,
    pub repetitions: usize,
    pub depth: usize,
    pub h_count: usize,
    pub p_count: usize,
    pub cx_count: usize,
    pub total_gates: usize,
    /// `5r` (zz, n = 2), `3n − 1 + 8(r − 1)` (zz, n ≥ 3), `2r` (pauli_z).
    pub closed_form_depth: usize,
    pub closed_form_matches: bool,
}

pub fn closed_form_depth(kind: FeatureMapKind, n: usize, r: usize) -> usize {
    match kind {
        FeatureMapKind::PauliZ => 2 * r,
        FeatureMapKind::Zz if n == 2 => 5 * r,
        FeatureMapKind::Zz => 3 * n - 1 + 8 * (r - 1),
    }
}

pub fn estimate_resources(kind: FeatureMapKind, n: usize, r: usize) -> Result<ResourceEstimate> {
    let circuit = build_feature_map(kind, &vec![0.0; n], r)?;
    let depth = circuit.depth();
    let closed = closed_form_depth(kind, n, r);
    Ok(ResourceEstimate {
        map_kind: kind,
        n_qubits: n,
        repetitions: r,
        depth,
        h_count: circuit.h_count(),
        p_count: circuit.p_count(),
        cx_count: circuit.cx_count(),
        total_gates: circuit.gates().len(),
        closed_form_depth: closed,
        closed_form_matches: depth == closed,
    })
}
