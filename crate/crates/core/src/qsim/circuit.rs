use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    /// Phase gate `diag(1, e^{iθ})`.
    P(usize, f64),
    Cx { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::H(q) | Gate::P(q, _) => ([q, q], 1),
            Gate::Cx { control, target } => ([control, target], 2),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H q{q}"),
            Gate::P(q, theta) => write!(f, "P({theta:.6}) q{q}"),
            Gate::Cx { control, target } => write!(f, "CX q{control}, q{target}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMapKind {
    /// Degree-2 map: single-qubit phases plus `ZZ` phases on neighbour pairs.
    Zz,
    /// Degree-1 map: single-qubit phases only.
    PauliZ,
}

impl FeatureMapKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureMapKind::Zz => "zz",
            FeatureMapKind::PauliZ => "pauli_z",
        }
    }
}

impl fmt::Display for FeatureMapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FeatureMapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zz" => Ok(Self::Zz),
            "pauli_z" | "pauliz" | "z" => Ok(Self::PauliZ),
            other => Err(Error::InvalidInput(format!("unknown feature map {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    #[default]
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    pub map_kind: Option<FeatureMapKind>,
    pub repetitions: usize,
    pub entanglement: Entanglement,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            map_kind: None,
            repetitions: 1,
            entanglement: Entanglement::Linear,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        let ([a, b], arity) = gate.qubits();
        if a >= self.n_qubits || b >= self.n_qubits {
            return Err(Error::InvalidInput(format!(
                "{gate} is outside a {}-qubit register",
                self.n_qubits
            )));
        }
        if arity == 2 && a == b {
            return Err(Error::InvalidInput(format!("{gate} repeats a qubit")));
        }
        if let Gate::P(_, theta) = gate {
            if !theta.is_finite() {
                return Err(Error::InvalidInput(format!("phase angle {theta} is not finite")));
            }
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn h_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::H(_))).count()
    }

    pub fn p_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::P(..))).count()
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cx { .. })).count()
    }

    /// As-soon-as-possible layering with unit cost per gate.
    pub fn depth(&self) -> usize {
        let mut finish = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for gate in &self.gates {
            let ([a, b], _) = gate.qubits();
            let layer = finish[a].max(finish[b]) + 1;
            finish[a] = layer;
            finish[b] = layer;
            depth = depth.max(layer);
        }
        depth
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.map_kind {
            Some(kind) => writeln!(
                f,
                "# {kind} feature map, n={} r={}",
                self.n_qubits, self.repetitions
            )?,
            None => writeln!(f, "# {} qubits", self.n_qubits)?,
        }
        for gate in &self.gates {
            writeln!(f, "{gate}")?;
        }
        Ok(())
    }
}

fn check_angles(x: &[f64], r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidInput("feature maps need at least one repetition".into()));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("feature angle {v} is not finite")));
    }
    Ok(())
}

fn single_qubit_layers(c: &mut Circuit, x: &[f64]) -> Result<()> {
    for q in 0..x.len() {
        c.push(Gate::H(q))?;
    }
    for (q, &xq) in x.iter().enumerate() {
        c.push(Gate::P(q, 2.0 * xq))?;
    }
    Ok(())
}

/// Per repetition: `H` on every qubit, `P(2·x_k)` on every qubit, then for
/// each neighbour pair `CX(i,i+1) · P(2(π−x_i)(π−x_{i+1})) on i+1 · CX(i,i+1)`.
pub fn build_zz_feature_map(x: &[f64], r: usize) -> Result<Circuit> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "zz feature map needs at least 2 qubits, got {n}"
        )));
    }
    check_angles(x, r)?;
    let mut c = Circuit::new(n);
    c.map_kind = Some(FeatureMapKind::Zz);
    c.repetitions = r;
    for _ in 0..r {
        single_qubit_layers(&mut c, x)?;
        for i in 0..n - 1 {
            let phi = (PI - x[i]) * (PI - x[i + 1]);
            c.push(Gate::Cx { control: i, target: i + 1 })?;
            c.push(Gate::P(i + 1, 2.0 * phi))?;
            c.push(Gate::Cx { control: i, target: i + 1 })?;
        }
    }
    Ok(c)
}

/// Per repetition: `H` then `P(2·x_k)` on every qubit.
pub fn build_pauli_z_feature_map(x: &[f64], r: usize) -> Result<Circuit> {
    if x.is_empty() {
        return Err(Error::InvalidInput("pauli_z feature map needs at least 1 qubit".into()));
    }
    check_angles(x, r)?;
    let mut c = Circuit::new(x.len());
    c.map_kind = Some(FeatureMapKind::PauliZ);
    c.repetitions = r;
    for _ in 0..r {
        single_qubit_layers(&mut c, x)?;
    }
    Ok(c)
}

pub fn build_feature_map(kind: FeatureMapKind, x: &[f64], r: usize) -> Result<Circuit> {
    match kind {
        FeatureMapKind::Zz => build_zz_feature_map(x, r),
        FeatureMapKind::PauliZ => build_pauli_z_feature_map(x, r),
    }
}
