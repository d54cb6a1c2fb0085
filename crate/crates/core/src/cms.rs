//! Classical Calogero–Moser–Sutherland particles,
//! `H = Σ ½p_j² + g² Σ_{j<k} V(x_j − x_k)`.
//!
//! | case          | `V(x)`               | `α(x)`, with `V = −α′` |
//! |---------------|----------------------|------------------------|
//! | rational      | `1/x²`               | `1/x`                  |
//! | trigonometric | `κ²/sin²(κx)`        | `κ cot(κx)`            |
//! | hyperbolic    | `κ_δ²/sinh²(κ_δ x)`  | `κ_δ coth(κ_δ x)`      |
//! | elliptic      | `℘₁(x)`              | `ζ₁(x)`                |
//!
//! with `κ = π/2ℓ` and `κ_δ = π/2δ`. Dynamics run on the universal cover; the
//! periodic cases reduce positions modulo `2ℓ` only when asked.

use crate::elliptic::{self, EllipticParams, SeriesControl};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CmsTag {
    Rational,
    Trigonometric,
    Hyperbolic,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CmsCase {
    Rational,
    Trigonometric { ell: f64 },
    Hyperbolic { delta: f64 },
    Elliptic(EllipticParams),
}

/// Minimum admissible separation, relative to the case's length scale.
pub const MIN_GAP: f64 = 1e-10;

/// Bound on `dt·ω_pair` for the fastest pair at the initial configuration.
pub const PAIR_FREQUENCY_BOUND: f64 = 1.0;

impl CmsCase {
    /// Builds a case from its tag; `params` supplies `ℓ` and/or `δ` where needed.
    pub fn new(tag: CmsTag, params: Option<EllipticParams>) -> Result<Self> {
        let need = || params.ok_or_else(|| Error::InvalidParameter(format!("{tag:?} case needs ell/delta")));
        Ok(match tag {
            CmsTag::Rational => CmsCase::Rational,
            CmsTag::Trigonometric => CmsCase::Trigonometric { ell: need()?.ell() },
            CmsTag::Hyperbolic => CmsCase::Hyperbolic { delta: need()?.delta() },
            CmsTag::Elliptic => CmsCase::Elliptic(need()?),
        })
    }

    pub fn tag(&self) -> CmsTag {
        match self {
            CmsCase::Rational => CmsTag::Rational,
            CmsCase::Trigonometric { .. } => CmsTag::Trigonometric,
            CmsCase::Hyperbolic { .. } => CmsTag::Hyperbolic,
            CmsCase::Elliptic(_) => CmsTag::Elliptic,
        }
    }

    /// Real period, if any.
    pub fn period(&self) -> Option<f64> {
        match self {
            CmsCase::Trigonometric { ell } => Some(2.0 * ell),
            CmsCase::Elliptic(p) => Some(2.0 * p.ell()),
            _ => None,
        }
    }

    fn scale(&self) -> f64 {
        match self {
            CmsCase::Rational => 1.0,
            CmsCase::Trigonometric { ell } => *ell,
            CmsCase::Hyperbolic { delta } => *delta,
            CmsCase::Elliptic(p) => p.ell().min(p.delta()),
        }
    }

    /// Distance from `x` to the nearest singularity of `V` on the real axis.
    fn gap(&self, x: f64) -> f64 {
        match self.period() {
            Some(period) => (x - period * (x / period).round()).abs(),
            None => x.abs(),
        }
    }

    fn check(&self, x: f64) -> Result<()> {
        let radius = MIN_GAP * self.scale();
        if !x.is_finite() || self.gap(x) < radius {
            return Err(Error::PoleProximity { arg: format!("{x}"), radius });
        }
        Ok(())
    }
}

pub fn potential(case: &CmsCase, x: f64) -> Result<f64> {
    case.check(x)?;
    Ok(match *case {
        CmsCase::Rational => 1.0 / (x * x),
        CmsCase::Trigonometric { ell } => {
            let k = PI / (2.0 * ell);
            k * k / (k * x).sin().powi(2)
        }
        CmsCase::Hyperbolic { delta } => {
            let k = PI / (2.0 * delta);
            k * k / (k * x).sinh().powi(2)
        }
        CmsCase::Elliptic(p) => elliptic::wp1_real(x, &p, &SeriesControl::default())?,
    })
}

pub fn alpha_kernel(case: &CmsCase, x: f64) -> Result<f64> {
    case.check(x)?;
    Ok(match *case {
        CmsCase::Rational => 1.0 / x,
        CmsCase::Trigonometric { ell } => {
            let k = PI / (2.0 * ell);
            k / (k * x).tan()
        }
        CmsCase::Hyperbolic { delta } => {
            let k = PI / (2.0 * delta);
            k / (k * x).tanh()
        }
        CmsCase::Elliptic(p) => elliptic::zeta1(Complex64::new(x, 0.0), &p, &SeriesControl::default())?.re,
    })
}

/// `V′(x)`.
pub fn potential_prime(case: &CmsCase, x: f64) -> Result<f64> {
    case.check(x)?;
    Ok(match *case {
        CmsCase::Rational => -2.0 / (x * x * x),
        CmsCase::Trigonometric { ell } => {
            let k = PI / (2.0 * ell);
            let s = (k * x).sin();
            -2.0 * k * k * k * (k * x).cos() / (s * s * s)
        }
        CmsCase::Hyperbolic { delta } => {
            let k = PI / (2.0 * delta);
            let s = (k * x).sinh();
            -2.0 * k * k * k * (k * x).cosh() / (s * s * s)
        }
        CmsCase::Elliptic(p) => elliptic::wp1_prime(Complex64::new(x, 0.0), &p, &SeriesControl::default())?.re,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::InvalidParameter(format!("{} positions but {} momenta", x.len(), p.len())));
        }
        if x.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("positions and momenta must be finite".into()));
        }
        Ok(Self { x, p })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn total_momentum(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Positions reduced to `[−ℓ, ℓ)` for the periodic cases.
    pub fn reduced_positions(&self, case: &CmsCase) -> Vec<f64> {
        match case.period() {
            Some(period) => self.x.iter().map(|&x| x - period * ((x + period / 2.0) / period).floor()).collect(),
            None => self.x.clone(),
        }
    }
}

/// Closest pair `(i, j, gap)` in the sense of the case's singularities.
fn closest_pair(state: &PhaseState, case: &CmsCase) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..state.len() {
        for j in i + 1..state.len() {
            let gap = case.gap(state.x[i] - state.x[j]);
            if best.is_none_or(|b| gap < b.2) {
                best = Some((i, j, gap));
            }
        }
    }
    best
}

fn check_collision(state: &PhaseState, case: &CmsCase) -> Result<()> {
    if let Some((i, j, gap)) = closest_pair(state, case) {
        if gap < MIN_GAP * case.scale() {
            return Err(Error::Collision { i, j, gap });
        }
    }
    Ok(())
}

pub fn cms_energy(state: &PhaseState, case: &CmsCase, g2: f64) -> Result<f64> {
    let kinetic: f64 = state.p.iter().map(|p| 0.5 * p * p).sum();
    let mut pot = 0.0;
    for i in 0..state.len() {
        for j in i + 1..state.len() {
            pot += potential(case, state.x[i] - state.x[j])?;
        }
    }
    Ok(kinetic + g2 * pot)
}

/// `F_j = −g² Σ_{k≠j} V′(x_j − x_k)`, accumulated pairwise so the total
/// force cancels to rounding.
pub fn cms_forces(state: &PhaseState, case: &CmsCase, g2: f64) -> Result<Vec<f64>> {
    let n = state.len();
    let mut f = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let fij = -g2 * potential_prime(case, state.x[i] - state.x[j])?;
            f[i] += fij;
            f[j] -= fij;
        }
    }
    Ok(f)
}

/// Small-gap pair frequency `√(6|g²|)/gap²`, from `V ≈ 1/x²` near contact.
pub fn max_pair_frequency(state: &PhaseState, case: &CmsCase, g2: f64) -> f64 {
    closest_pair(state, case).map_or(0.0, |(_, _, gap)| (6.0 * g2.abs()).sqrt() / (gap * gap))
}

/// Velocity-Verlet integration of `n` steps (negative `dt` runs backwards).
pub fn leapfrog(state: &PhaseState, case: &CmsCase, g2: f64, dt: f64, n: usize) -> Result<PhaseState> {
    if !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be finite, got {dt}")));
    }
    check_collision(state, case)?;
    let omega = max_pair_frequency(state, case, g2);
    if dt.abs() * omega > PAIR_FREQUENCY_BOUND {
        return Err(Error::StepGuard(format!(
            "dt·ω_pair = {:.3e} exceeds {PAIR_FREQUENCY_BOUND}",
            dt.abs() * omega
        )));
    }
    let mut s = state.clone();
    let mut f = cms_forces(&s, case, g2)?;
    for _ in 0..n {
        for (p, fi) in s.p.iter_mut().zip(&f) {
            *p += 0.5 * dt * fi;
        }
        for (x, p) in s.x.iter_mut().zip(&s.p) {
            *x += dt * p;
        }
        check_collision(&s, case)?;
        f = cms_forces(&s, case, g2)?;
        for (p, fi) in s.p.iter_mut().zip(&f) {
            *p += 0.5 * dt * fi;
        }
    }
    Ok(s)
}
