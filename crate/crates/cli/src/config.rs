//! Run configurations. Each subcommand reads one flat TOML table; unknown keys
//! are rejected and every field has a default, so an empty file is valid.

use crate::error::CliError;
use ncilw_core::cms::CmsTag;
use ncilw_core::elliptic::EllipticParams;
use ncilw_core::pde::EquationKind;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalFunction {
    Wp1,
    Wp1Prime,
    Zeta1,
    Wp1Shifted,
    CConst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub function: EvalFunction,
    pub x: f64,
    pub x_im: f64,
    pub ell: f64,
    pub delta: f64,
    /// Particle number and coupling, used by `c-const` only.
    pub n: usize,
    pub g: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { function: EvalFunction::Wp1, x: 0.25, x_im: 0.0, ell: 1.0, delta: 1.0, n: 2, g: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorTestConfig {
    pub ell: f64,
    pub delta: f64,
    pub m_points: usize,
    pub refinement: usize,
    /// Spectral-vs-quadrature agreement.
    pub oracle_tol: f64,
    /// Bound on `|σ_T − σ_H|` and `|σ_T̃|`, checked once `δ/ℓ ≥ limit_ratio`.
    pub limit_tol: f64,
    pub limit_ratio: f64,
}

impl Default for OperatorTestConfig {
    fn default() -> Self {
        Self { ell: 1.0, delta: 50.0, m_points: 32, refinement: 4, oracle_tol: 1e-6, limit_tol: 1e-8, limit_ratio: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    SingleMode,
    GaussianBump,
    SolitonApproximant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub equation: EquationKind,
    pub ell: f64,
    pub delta: f64,
    pub m_points: usize,
    pub dt: f64,
    pub t_end: f64,
    pub preset: Preset,
    pub amplitude: f64,
    pub kdv_delta: f64,
    pub coupling: f64,
    pub dealias: bool,
    pub invariant_every: usize,
    pub snapshot_every: usize,
    pub check_guards: bool,
    pub mass_tol: f64,
    pub energy_tol: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            equation: EquationKind::NcIlw,
            ell: std::f64::consts::PI,
            delta: 1.0,
            m_points: 128,
            dt: 1e-3,
            t_end: 1.0,
            preset: Preset::SingleMode,
            amplitude: 0.5,
            kdv_delta: 1.0,
            coupling: 1.0,
            dealias: true,
            invariant_every: 10,
            snapshot_every: 0,
            check_guards: true,
            mass_tol: 1e-10,
            energy_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CmsConfig {
    pub case: CmsTag,
    pub ell: f64,
    pub delta: f64,
    pub g2: f64,
    pub dt: f64,
    pub n_steps: usize,
    pub positions: Vec<f64>,
    pub momenta: Vec<f64>,
    pub record_every: usize,
    pub energy_tol: f64,
    pub momentum_tol: f64,
}

impl Default for CmsConfig {
    fn default() -> Self {
        Self {
            case: CmsTag::Elliptic,
            ell: std::f64::consts::PI,
            delta: 0.9,
            g2: 1.0,
            dt: 1e-4,
            n_steps: 10_000,
            positions: vec![-2.2, -0.8, 0.5, 1.9],
            momenta: vec![0.3, -0.1, 0.2, -0.4],
            record_every: 100,
            energy_tol: 1e-8,
            momentum_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlaneName {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoleCheckConfig {
    pub ell: f64,
    pub offset: f64,
    /// Poles as `[re, im]` pairs.
    pub poles: Vec<[f64; 2]>,
    pub half_plane: HalfPlaneName,
    pub m_points: usize,
    pub pde_dt: f64,
    pub pole_dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub residual_tol: f64,
    pub match_tol: f64,
}

impl Default for PoleCheckConfig {
    fn default() -> Self {
        Self {
            ell: std::f64::consts::PI,
            offset: 0.0,
            poles: vec![[-0.8, 0.5], [0.9, 0.7]],
            half_plane: HalfPlaneName::Upper,
            m_points: 256,
            pde_dt: 1e-4,
            pole_dt: 1e-4,
            t_end: 0.5,
            record_every: 500,
            residual_tol: 1e-5,
            match_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StencilName {
    SecondOrder,
    FourthOrder,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantumConfig {
    pub ell: f64,
    pub delta: f64,
    pub g: f64,
    /// Particle counts `[N₁, M₁, N₂, M₂]`.
    pub counts: [usize; 4],
    pub stencil: StencilName,
    /// Points per axis, coarse to fine.
    pub grids: Vec<usize>,
    pub n_eigen: usize,
    pub symmetry_tol: f64,
    pub residual_tol: f64,
    /// Ground-state change between the two finest grids; unchecked when absent.
    pub convergence_tol: Option<f64>,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        Self {
            ell: 1.0,
            delta: 10.0,
            g: 2.0,
            counts: [2, 0, 0, 0],
            stencil: StencilName::Spectral,
            grids: vec![12, 16, 20],
            n_eigen: 4,
            symmetry_tol: 1e-12,
            residual_tol: 1e-8,
            convergence_tol: Some(1e-6),
        }
    }
}

/// Reads and validates a configuration file.
pub fn parse_config<T: DeserializeOwned + Validate>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    parse_config_str(&text)
}

pub fn parse_config_str<T: DeserializeOwned + Validate>(text: &str) -> Result<T, CliError> {
    let cfg: T = toml::from_str(text).map_err(schema_from_toml)?;
    cfg.validate()?;
    Ok(cfg)
}

fn schema_from_toml(e: toml::de::Error) -> CliError {
    let msg = e.message().to_string();
    // serde reports unknown keys as "unknown field `name`, expected ...".
    let path = msg
        .strip_prefix("unknown field `")
        .and_then(|rest| rest.split('`').next())
        .map(str::to_string)
        .unwrap_or_else(|| "<root>".into());
    CliError::Schema { path, message: msg }
}

pub trait Validate {
    fn validate(&self) -> Result<(), CliError>;
}

fn schema(path: &str, message: impl Into<String>) -> CliError {
    CliError::Schema { path: path.into(), message: message.into() }
}

fn positive(path: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(schema(path, format!("must be positive and finite, got {v}")))
    }
}

fn elliptic(ell: f64, delta: f64) -> Result<EllipticParams, CliError> {
    positive("ell", ell).map_err(|_| schema("ell", format!("EllipticParams requires ell > 0, got {ell}")))?;
    positive("delta", delta).map_err(|_| schema("delta", format!("EllipticParams requires delta > 0, got {delta}")))?;
    EllipticParams::new(ell, delta).map_err(|e| schema("delta", e.to_string()))
}

impl EvalConfig {
    pub fn params(&self) -> Result<EllipticParams, CliError> {
        elliptic(self.ell, self.delta)
    }
}

impl Validate for EvalConfig {
    fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if !(self.x.is_finite() && self.x_im.is_finite()) {
            return Err(schema("x", "must be finite"));
        }
        positive("g", self.g)
    }
}

impl OperatorTestConfig {
    pub fn params(&self) -> Result<EllipticParams, CliError> {
        elliptic(self.ell, self.delta)
    }
}

impl Validate for OperatorTestConfig {
    fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if self.m_points < 4 || !self.m_points.is_multiple_of(2) {
            return Err(schema("m_points", format!("must be even and at least 4, got {}", self.m_points)));
        }
        if self.refinement == 0 {
            return Err(schema("refinement", "must be at least 1"));
        }
        positive("oracle_tol", self.oracle_tol)?;
        positive("limit_tol", self.limit_tol)?;
        positive("limit_ratio", self.limit_ratio)
    }
}

impl SimulateConfig {
    pub fn params(&self) -> Result<EllipticParams, CliError> {
        elliptic(self.ell, self.delta)
    }
}

impl Validate for SimulateConfig {
    fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if self.m_points < 8 || !self.m_points.is_multiple_of(2) {
            return Err(schema("m_points", format!("must be even and at least 8, got {}", self.m_points)));
        }
        positive("dt", self.dt)?;
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(schema("t_end", "must be non-negative"));
        }
        if !self.amplitude.is_finite() {
            return Err(schema("amplitude", "must be finite"));
        }
        positive("kdv_delta", self.kdv_delta)?;
        positive("coupling", self.coupling)?;
        positive("mass_tol", self.mass_tol)?;
        positive("energy_tol", self.energy_tol)
    }
}

impl CmsConfig {
    pub fn params(&self) -> Result<EllipticParams, CliError> {
        elliptic(self.ell, self.delta)
    }
}

impl Validate for CmsConfig {
    fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        if self.positions.is_empty() {
            return Err(schema("positions", "need at least one particle"));
        }
        if self.positions.len() != self.momenta.len() {
            return Err(schema(
                "momenta",
                format!("{} momenta for {} positions", self.momenta.len(), self.positions.len()),
            ));
        }
        if self.positions.iter().chain(&self.momenta).any(|v| !v.is_finite()) {
            return Err(schema("positions", "entries must be finite"));
        }
        if !self.g2.is_finite() {
            return Err(schema("g2", "must be finite"));
        }
        positive("dt", self.dt)?;
        if self.record_every == 0 {
            return Err(schema("record_every", "must be at least 1"));
        }
        positive("energy_tol", self.energy_tol)?;
        positive("momentum_tol", self.momentum_tol)
    }
}

impl Validate for PoleCheckConfig {
    fn validate(&self) -> Result<(), CliError> {
        positive("ell", self.ell)?;
        if !self.offset.is_finite() {
            return Err(schema("offset", "must be finite"));
        }
        if self.poles.is_empty() {
            return Err(schema("poles", "need at least one pole"));
        }
        let s = if self.half_plane == HalfPlaneName::Upper { 1.0 } else { -1.0 };
        for (i, [re, im]) in self.poles.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) || s * im <= 0.0 {
                return Err(schema(&format!("poles[{i}]"), format!("pole must lie in the {:?} half plane", self.half_plane)));
            }
        }
        if self.m_points < 8 || !self.m_points.is_multiple_of(2) {
            return Err(schema("m_points", format!("must be even and at least 8, got {}", self.m_points)));
        }
        positive("pde_dt", self.pde_dt)?;
        positive("pole_dt", self.pole_dt)?;
        positive("t_end", self.t_end)?;
        if self.record_every == 0 {
            return Err(schema("record_every", "must be at least 1"));
        }
        positive("residual_tol", self.residual_tol)?;
        positive("match_tol", self.match_tol)
    }
}

impl QuantumConfig {
    pub fn params(&self) -> Result<EllipticParams, CliError> {
        elliptic(self.ell, self.delta)
    }
}

impl Validate for QuantumConfig {
    fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        positive("g", self.g)?;
        let total: usize = self.counts.iter().sum();
        if total == 0 || total > ncilw_core::quantum::MAX_PARTICLES {
            return Err(schema("counts", format!("total particle number must be 1..=3, got {total}")));
        }
        if self.grids.is_empty() {
            return Err(schema("grids", "need at least one grid"));
        }
        if let Some(i) = self.grids.iter().position(|&m| m < 5) {
            return Err(schema(&format!("grids[{i}]"), "need at least 5 points per axis"));
        }
        if self.stencil == StencilName::Spectral {
            if let Some(i) = self.grids.iter().position(|&m| m % 2 != 0) {
                return Err(schema(&format!("grids[{i}]"), "spectral stencil needs an even point count"));
            }
        }
        if self.n_eigen == 0 {
            return Err(schema("n_eigen", "must be at least 1"));
        }
        positive("symmetry_tol", self.symmetry_tol)?;
        positive("residual_tol", self.residual_tol)?;
        if let Some(t) = self.convergence_tol {
            positive("convergence_tol", t)?;
        }
        Ok(())
    }
}
