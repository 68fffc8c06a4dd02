//! Scenario files.
//!
//! A scenario is a TOML document. Matrices are nested arrays of `[re, im]`
//! pairs, one inner array per row:
//!
//! ```toml
//! mode = "quantum"
//! dim = 2
//!
//! [hamiltonian]
//! preset = "pauli-x"
//!
//! [decay]
//! kind = "constant-identity"
//! gamma0 = 1.0
//!
//! [initial]
//! kind = "pure"
//! vector = [[1.0, 0.0], [0.0, 0.0]]
//!
//! [integrator]
//! dt = 1e-3
//! steps = 5000
//! ```

use std::fmt;
use std::path::Path;

use nhq_core::hermitian::TOL_HERM;
use nhq_core::wigner::{BathPotential, BathSpec, PhaseSpaceGrid};
use nhq_core::{ComplexMatrix, HermitianOperator, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `[re, im]` rows.
pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Quantum,
    #[serde(alias = "wigner")]
    QuantumClassical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub dim: usize,
    #[serde(default)]
    pub units: Units,
    pub hamiltonian: OperatorConfig,
    pub decay: DecayConfig,
    pub initial: InitialConfig,
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub hbar: f64,
    pub kb: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0, kb: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    PauliX,
    PauliY,
    PauliZ,
    /// (gap/2)·σz
    TwoLevelGap,
}

/// A Hermitian operator given either by name or as a matrix literal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixLiteral>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayKind {
    /// Γ = (ħγ₀/2)·I
    ConstantIdentity,
    Matrix,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub kind: DecayKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixLiteral>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Pure,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    /// Amplitudes as `[re, im]`; normalised on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
    /// Phase-space centre (R₀, P₀) of the bath Gaussian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    /// Gaussian widths (σ_R, σ_P); defaults to √(ħ/2) each.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widths: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "one")]
    pub sample_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Harmonic,
    DoubleWell,
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub mass: f64,
    pub potential: PotentialKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// λ in the coupling λR·C.
    #[serde(default)]
    pub coupling_strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<OperatorConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_r: usize,
    pub n_p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_file")]
    pub file: String,
}

fn default_dir() -> String {
    ".".into()
}

fn default_file() -> String {
    "trajectory.csv".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            file: default_file(),
        }
    }
}

/// One failed constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.constraint)
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        Self::from_table(text.parse::<toml::Table>()?, &[])
    }

    /// Reads a scenario file and applies `key=value` overrides before
    /// deserialising.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ReadConfig(path.display().to_string(), e))?;
        Self::from_table(text.parse::<toml::Table>()?, overrides)
    }

    pub fn from_table(mut table: toml::Table, overrides: &[String]) -> Result<Self, CliError> {
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Ok(table.try_into()?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serialisable")
    }

    pub fn grid(&self) -> Option<PhaseSpaceGrid> {
        self.grid.and_then(|g| {
            PhaseSpaceGrid::new((g.r_min, g.r_max), (g.p_min, g.p_max), g.n_r, g.n_p).ok()
        })
    }
}

/// Sets a dotted key such as `integrator.dt=5e-4`. The value is read as a
/// TOML literal and falls back to a bare string.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Override(spec.into(), "expected key=value".into()))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Override(spec.into(), "empty key segment".into()));
    }
    let value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("just inserted"),
        Err(_) => toml::Value::String(raw.trim().into()),
    };
    let (last, parents) = path
        .split_last()
        .expect("split yields at least one segment");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Override(spec.into(), format!("`{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn matrix_from_literal(rows: &MatrixLiteral) -> Option<ComplexMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return None;
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| C64::new(re, im))
        .collect();
    ComplexMatrix::from_vec(n, data).ok()
}

impl OperatorConfig {
    /// Builds the operator; callers run [`validate_config`] first.
    pub fn build(&self) -> Option<HermitianOperator> {
        let m = match (self.preset, &self.matrix) {
            (Some(Preset::PauliX), None) => ComplexMatrix::pauli_x(),
            (Some(Preset::PauliY), None) => ComplexMatrix::pauli_y(),
            (Some(Preset::PauliZ), None) => ComplexMatrix::pauli_z(),
            (Some(Preset::TwoLevelGap), None) => ComplexMatrix::pauli_z().scale(0.5 * self.gap?),
            (None, Some(rows)) => matrix_from_literal(rows)?,
            _ => return None,
        };
        HermitianOperator::new(m).ok()
    }

    fn check(&self, field: &str, dim: usize, out: &mut Vec<Violation>) {
        let mut push = |f: &str, c: String| {
            out.push(Violation {
                field: format!("{field}{f}"),
                constraint: c,
            })
        };
        match (self.preset, &self.matrix) {
            (Some(_), Some(_)) | (None, None) => {
                push("", "give exactly one of `preset` or `matrix`".into())
            }
            (Some(p), None) => {
                if dim != 2 {
                    push(".preset", format!("named presets are 2x2 but dim = {dim}"));
                }
                match (p, self.gap) {
                    (Preset::TwoLevelGap, None) => push(".gap", "required by two-level-gap".into()),
                    (Preset::TwoLevelGap, Some(g)) if !g.is_finite() => {
                        push(".gap", "must be finite".into())
                    }
                    (Preset::TwoLevelGap, _) => {}
                    (_, Some(_)) => push(".gap", "only used by two-level-gap".into()),
                    _ => {}
                }
            }
            (None, Some(rows)) => check_matrix(&format!("{field}.matrix"), rows, dim, out),
        }
    }
}

fn check_matrix(field: &str, rows: &MatrixLiteral, dim: usize, out: &mut Vec<Violation>) {
    let mut push = |c: String| {
        out.push(Violation {
            field: field.into(),
            constraint: c,
        })
    };
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        push(format!("must be {dim}x{dim}"));
        return;
    }
    match matrix_from_literal(rows) {
        None => push("entries must be finite".into()),
        Some(m) => {
            let defect = m.hermiticity_defect();
            if defect > TOL_HERM * m.max_abs().max(1.0) {
                push(format!("must be Hermitian (max |A - A^H| = {defect:e})"));
            }
        }
    }
}

/// Checks everything that can be checked without running. An empty list
/// means the scenario is runnable.
pub fn validate_config(cfg: &ScenarioConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let push = |out: &mut Vec<Violation>, f: &str, c: &str| {
        out.push(Violation {
            field: f.into(),
            constraint: c.into(),
        })
    };
    let n = cfg.dim;
    if n == 0 {
        push(&mut out, "dim", "must be at least 1");
    }
    if !(cfg.units.hbar > 0.0 && cfg.units.hbar.is_finite()) {
        push(&mut out, "units.hbar", "must be positive and finite");
    }
    if !(cfg.units.kb > 0.0 && cfg.units.kb.is_finite()) {
        push(&mut out, "units.kb", "must be positive and finite");
    }
    cfg.hamiltonian.check("hamiltonian", n, &mut out);

    let d = &cfg.decay;
    match d.kind {
        DecayKind::ConstantIdentity => {
            if !d.gamma0.is_some_and(f64::is_finite) {
                push(
                    &mut out,
                    "decay.gamma0",
                    "constant-identity needs a finite gamma0",
                );
            }
            if d.matrix.is_some() {
                push(&mut out, "decay.matrix", "not used by constant-identity");
            }
        }
        DecayKind::Matrix => match &d.matrix {
            Some(rows) => check_matrix("decay.matrix", rows, n, &mut out),
            None => push(&mut out, "decay.matrix", "required by kind = \"matrix\""),
        },
        DecayKind::Zero => {
            if d.gamma0.is_some() || d.matrix.is_some() {
                push(&mut out, "decay", "kind = \"zero\" takes no parameters");
            }
        }
    }

    let init = &cfg.initial;
    match init.kind {
        InitialKind::Pure => match &init.vector {
            None => push(&mut out, "initial.vector", "required by kind = \"pure\""),
            Some(v) if v.len() != n => push(
                &mut out,
                "initial.vector",
                &format!("must have {n} entries"),
            ),
            Some(v) => {
                let norm: f64 = v.iter().map(|[a, b]| a * a + b * b).sum();
                if !(norm > 0.0 && norm.is_finite()) {
                    push(&mut out, "initial.vector", "must be finite and nonzero");
                }
            }
        },
        InitialKind::Diagonal => match &init.probabilities {
            None => push(
                &mut out,
                "initial.probabilities",
                "required by kind = \"diagonal\"",
            ),
            Some(p) if p.len() != n => push(
                &mut out,
                "initial.probabilities",
                &format!("must have {n} entries"),
            ),
            Some(p) => {
                if p.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                    push(
                        &mut out,
                        "initial.probabilities",
                        "entries must be finite and non-negative",
                    );
                }
                let s: f64 = p.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    push(
                        &mut out,
                        "initial.probabilities",
                        &format!("must sum to 1 within 1e-12 (sum = {s})"),
                    );
                }
            }
        },
    }

    let it = &cfg.integrator;
    if !(it.dt > 0.0 && it.dt.is_finite()) {
        push(&mut out, "integrator.dt", "must be positive and finite");
    }
    if it.sample_every == 0 {
        push(&mut out, "integrator.sample_every", "must be at least 1");
    }

    match cfg.mode {
        Mode::Quantum => {
            if cfg.bath.is_some() {
                push(&mut out, "bath", "only used in quantum-classical mode");
            }
            if cfg.grid.is_some() {
                push(&mut out, "grid", "only used in quantum-classical mode");
            }
            if init.center.is_some() || init.widths.is_some() {
                push(
                    &mut out,
                    "initial",
                    "center and widths are only used in quantum-classical mode",
                );
            }
        }
        Mode::QuantumClassical => {
            match &cfg.grid {
                None => push(&mut out, "grid", "required in quantum-classical mode"),
                Some(g) => {
                    if let Err(e) =
                        PhaseSpaceGrid::new((g.r_min, g.r_max), (g.p_min, g.p_max), g.n_r, g.n_p)
                    {
                        push(&mut out, "grid", &e.to_string());
                    }
                }
            }
            match &cfg.bath {
                None => push(&mut out, "bath", "required in quantum-classical mode"),
                Some(b) => check_bath(b, n, &mut out),
            }
            if let Some([a, b]) = init.widths {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    push(&mut out, "initial.widths", "must be positive and finite");
                }
            }
            if let Some([a, b]) = init.center {
                if !(a.is_finite() && b.is_finite()) {
                    push(&mut out, "initial.center", "must be finite");
                }
            }
        }
    }
    out
}

fn check_bath(b: &BathConfig, n: usize, out: &mut Vec<Violation>) {
    let mut push = |f: &str, c: &str| {
        out.push(Violation {
            field: format!("bath.{f}"),
            constraint: c.into(),
        })
    };
    if !(b.mass > 0.0 && b.mass.is_finite()) {
        push("mass", "must be positive and finite");
    }
    match b.potential {
        PotentialKind::Harmonic => {
            if !b.omega.is_some_and(f64::is_finite) {
                push("omega", "harmonic potential needs a finite omega");
            }
        }
        PotentialKind::DoubleWell => {
            if !b.barrier.is_some_and(f64::is_finite) {
                push("barrier", "double-well potential needs a finite barrier");
            }
            if !b.r0.is_some_and(|r| r.is_finite() && r != 0.0) {
                push("r0", "double-well potential needs a finite nonzero r0");
            }
        }
        PotentialKind::Free => {}
    }
    if !b.coupling_strength.is_finite() {
        push("coupling_strength", "must be finite");
    }
    match &b.coupling {
        Some(c) => c.check("bath.coupling", n, out),
        None if b.coupling_strength != 0.0 => out.push(Violation {
            field: "bath.coupling".into(),
            constraint: "required when coupling_strength != 0".into(),
        }),
        None => {}
    }
}

impl BathConfig {
    pub fn build(&self, h_s: HermitianOperator) -> Option<BathSpec> {
        let potential = match self.potential {
            PotentialKind::Harmonic => BathPotential::Harmonic { omega: self.omega? },
            PotentialKind::DoubleWell => BathPotential::DoubleWell {
                barrier: self.barrier?,
                r0: self.r0?,
            },
            PotentialKind::Free => BathPotential::Free,
        };
        let n = h_s.dim();
        let coupling = match &self.coupling {
            Some(c) => c.build()?,
            None => HermitianOperator::zeros(n),
        };
        BathSpec::new(h_s, self.mass, potential, self.coupling_strength, coupling).ok()
    }
}
