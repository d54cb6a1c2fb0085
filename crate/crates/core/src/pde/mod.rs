//! Periodic chiral soliton equations (KdV, BO, ILW) and the coupled
//! non-chiral ILW system, integrated with a fourth-order exponential scheme.

mod etdrk4;
mod model;

pub use etdrk4::{phi_coefficients, RunOutput, Solver, ADVECTIVE_BOUND, BLOWUP_FACTOR, LINEAR_PHASE_BOUND};
pub use model::{rhs_chiral, rhs_ncilw, Invariants, Model};

use crate::elliptic::EllipticParams;
use crate::error::{Error, Result};
use crate::spectral::{Field, PeriodicGrid};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationKind {
    KdV,
    Bo,
    Ilw,
    NcIlw,
}

impl EquationKind {
    pub fn is_chiral(self) -> bool {
        !matches!(self, EquationKind::NcIlw)
    }
}

/// Which equation to integrate and its parameters.
///
/// `kdv_delta` is the depth in the KdV term `(δ/3) u_xxx`; it defaults to
/// `params.delta()`. `coupling` multiplies the dispersive terms of the
/// non-chiral system, i.e. the quantity `½(g − 1)`; classical runs use 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationSpec {
    pub kind: EquationKind,
    pub params: EllipticParams,
    pub kdv_delta: f64,
    pub coupling: f64,
}

impl EquationSpec {
    pub fn new(kind: EquationKind, params: EllipticParams) -> Self {
        Self { kind, params, kdv_delta: params.delta(), coupling: 1.0 }
    }

    pub fn with_kdv_delta(mut self, kdv_delta: f64) -> Result<Self> {
        if !(kdv_delta.is_finite() && kdv_delta > 0.0) {
            return Err(Error::InvalidParameter(format!("kdv_delta must be positive, got {kdv_delta}")));
        }
        self.kdv_delta = kdv_delta;
        Ok(self)
    }

    pub fn with_coupling(mut self, coupling: f64) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling must be finite, got {coupling}")));
        }
        self.coupling = coupling;
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u: Field,
    /// Second field of the non-chiral system; `None` for chiral equations.
    pub v: Option<Field>,
}

impl SimState {
    pub fn chiral(u: Field) -> Self {
        Self { t: 0.0, u, v: None }
    }

    pub fn pair(u: Field, v: Field) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch(format!("u on {}, v on {}", u.grid(), v.grid())));
        }
        Ok(Self { t: 0.0, u, v: Some(v) })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.u.grid()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.as_ref().map_or(0.0, Field::max_abs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Two-thirds truncation of the quadratic term.
    pub dealias: bool,
    /// Steps between invariant records; 0 records only the end points.
    pub invariant_every: usize,
    /// Steps between stored snapshots; 0 stores only the end points.
    pub snapshot_every: usize,
    /// Enforce the step-size guards before integrating.
    pub check_guards: bool,
}

impl SolverConfig {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { dt, n_steps, dealias: true, invariant_every: 0, snapshot_every: 0, check_guards: true })
    }

    /// Step count covering `t_end` with the given step, rounded to nearest.
    pub fn for_duration(t_end: f64, dt: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
        }
        Self::new(dt, (t_end / dt).round() as usize)
    }
}

/// Reflection `f(x) ↦ f(−x)` on the grid (node `j` maps to node `m − j`).
pub fn reflect(f: &Field) -> Field {
    let m = f.grid().m_points();
    let v = f.values();
    let values = (0..m).map(|j| v[(m - j) % m]).collect();
    Field::new(*f.grid(), values).expect("same grid")
}

/// Parity `(u, v) ↦ (v(−x), u(−x))` of the non-chiral system.
pub fn parity(state: &SimState) -> Result<SimState> {
    let v = state
        .v
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("parity needs a (u, v) pair".into()))?;
    Ok(SimState { t: state.t, u: reflect(v), v: Some(reflect(&state.u)) })
}
