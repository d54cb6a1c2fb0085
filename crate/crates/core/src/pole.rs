//! Pole ansatz for the `2ℓ`-periodic Benjamin–Ono equation
//! `u_t + 2uu_x + Hu_xx = 0`.
//!
//! With `α(z) = κ cot(κz)`, `κ = π/2ℓ`, and `N` poles `a_j` all in one half
//! plane (`s = +1` upper, `s = −1` lower),
//!
//! ```text
//! u(x, t) = 2s Σ_j Im α(x − a_j) + C
//! ```
//!
//! solves the equation exactly when the poles obey the first-order system
//!
//! ```text
//! ȧ_k = −2is Σ_{j≠k} α(a_k − a_j) + 2is Σ_j α(a_k − ā_j) + 2C.
//! ```
//!
//! Differentiating once more eliminates the conjugate poles and leaves the
//! complexified trigonometric CMS equations of motion
//! `ä_k = −g² Σ_{j≠k} V′(a_k − a_j)` with `V = κ²/sin²(κ·)` and the complex
//! coupling `g² = 4`. The first-order system is then a constraint that the
//! second-order flow preserves.
//!
//! Both constants follow from matching pole residues in the equation. A
//! single pole has no pair force, so it checks the field normalisation and
//! the speed `2κ coth(2κ Im a) + 2C`. The coupling constant is only
//! exercised at `N ≥ 2`.

use crate::elliptic::{cot, csc2};
use crate::error::{Error, Result};
use crate::pde::{Model, SimState};
use crate::spectral::{Field, PeriodicGrid};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `g²` in the pole equations of motion.
pub const POLE_COUPLING: f64 = 4.0;

/// Poles closer than this (relative to `ℓ`) to each other or to the real axis are rejected.
pub const POLE_TOL: f64 = 1e-8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    pub fn sign(self) -> f64 {
        match self {
            HalfPlane::Upper => 1.0,
            HalfPlane::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleState {
    pub t: f64,
    pub poles: Vec<Complex64>,
    pub velocities: Vec<Complex64>,
    pub half_plane: HalfPlane,
}

/// Trigonometric pole ansatz on `[−ℓ, ℓ)` with field offset `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleAnsatz {
    ell: f64,
    offset: f64,
}

impl PoleAnsatz {
    pub fn new(ell: f64, offset: f64) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidParameter(format!("ell must be positive, got {ell}")));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidParameter("offset must be finite".into()));
        }
        Ok(Self { ell, offset })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn kappa(&self) -> f64 {
        PI / (2.0 * self.ell)
    }

    fn alpha(&self, z: Complex64) -> Complex64 {
        let k = self.kappa();
        cot(z * k) * k
    }

    /// `α′ = −κ² csc²(κz)`.
    fn alpha_prime(&self, z: Complex64) -> Complex64 {
        let k = self.kappa();
        -csc2(z * k) * (k * k)
    }

    /// `V′(z) = −α″(z) = −2κ³ cot(κz) csc²(κz)`.
    fn v_prime(&self, z: Complex64) -> Complex64 {
        let k = self.kappa();
        -2.0 * k * k * k * cot(z * k) * csc2(z * k)
    }

    /// Checks the half-plane condition and pairwise separation.
    pub fn validate(&self, poles: &[Complex64], half_plane: HalfPlane) -> Result<()> {
        let tol = POLE_TOL * self.ell;
        let s = half_plane.sign();
        for (index, a) in poles.iter().enumerate() {
            if !(a.re.is_finite() && a.im.is_finite()) || s * a.im < tol {
                return Err(Error::RealAxisCrossing { index, imag: a.im });
            }
        }
        let period = 2.0 * self.ell;
        for i in 0..poles.len() {
            for j in i + 1..poles.len() {
                let d = poles[i] - poles[j];
                let re = d.re - period * (d.re / period).round();
                let distance = Complex64::new(re, d.im).norm();
                if distance < tol {
                    return Err(Error::PoleCollision { i, j, distance });
                }
            }
        }
        Ok(())
    }

    /// Right-hand side of the first-order pole system.
    pub fn first_order_velocities(&self, poles: &[Complex64], half_plane: HalfPlane) -> Vec<Complex64> {
        let s = half_plane.sign();
        poles
            .iter()
            .enumerate()
            .map(|(k, &ak)| {
                let mut v = Complex64::new(2.0 * self.offset, 0.0);
                for (j, &aj) in poles.iter().enumerate() {
                    if j != k {
                        v -= 2.0 * I * s * self.alpha(ak - aj);
                    }
                    v += 2.0 * I * s * self.alpha(ak - aj.conj());
                }
                v
            })
            .collect()
    }

    /// Pole state on the constraint manifold through `poles`.
    pub fn state(&self, poles: Vec<Complex64>, half_plane: HalfPlane) -> Result<PoleState> {
        self.validate(&poles, half_plane)?;
        let velocities = self.first_order_velocities(&poles, half_plane);
        Ok(PoleState { t: 0.0, poles, velocities, half_plane })
    }

    /// `ä_k = −g² Σ_{j≠k} V′(a_k − a_j)`.
    pub fn accelerations(&self, poles: &[Complex64]) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); poles.len()];
        for k in 0..poles.len() {
            for j in k + 1..poles.len() {
                let f = -POLE_COUPLING * self.v_prime(poles[k] - poles[j]);
                acc[k] += f;
                acc[j] -= f;
            }
        }
        acc
    }

    /// Largest violation of the first-order constraint.
    pub fn constraint_defect(&self, state: &PoleState) -> f64 {
        self.first_order_velocities(&state.poles, state.half_plane)
            .iter()
            .zip(&state.velocities)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Fourth-order symmetric (triple-jump) composition of velocity Verlet
    /// for the complex second-order system; `dt < 0` runs backwards.
    pub fn evolve(&self, state: &PoleState, dt: f64, n: usize) -> Result<PoleState> {
        if !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be finite, got {dt}")));
        }
        self.validate(&state.poles, state.half_plane)?;
        let w1 = 1.0 / (2.0 - 2f64.cbrt());
        let w0 = 1.0 - 2.0 * w1;
        let mut s = state.clone();
        let mut acc = self.accelerations(&s.poles);
        for step in 1..=n {
            for h in [w1 * dt, w0 * dt, w1 * dt] {
                for (v, a) in s.velocities.iter_mut().zip(&acc) {
                    *v += 0.5 * h * a;
                }
                for (p, v) in s.poles.iter_mut().zip(&s.velocities) {
                    *p += h * v;
                }
                self.validate(&s.poles, s.half_plane)?;
                acc = self.accelerations(&s.poles);
                for (v, a) in s.velocities.iter_mut().zip(&acc) {
                    *v += 0.5 * h * a;
                }
            }
            s.t = state.t + step as f64 * dt;
        }
        Ok(s)
    }

    pub fn field_at(&self, state: &PoleState, x: f64) -> f64 {
        let s = state.half_plane.sign();
        let z = Complex64::new(x, 0.0);
        self.offset + 2.0 * s * state.poles.iter().map(|&a| self.alpha(z - a).im).sum::<f64>()
    }

    pub fn field(&self, state: &PoleState, grid: &PeriodicGrid) -> Result<Field> {
        self.check_grid(grid)?;
        Ok(grid.sample(|x| self.field_at(state, x)))
    }

    /// `u_t = −2s Σ Im(α′(x − a_j) ȧ_j)`, using the state's velocities.
    pub fn field_time_derivative(&self, state: &PoleState, grid: &PeriodicGrid) -> Result<Field> {
        self.check_grid(grid)?;
        let s = state.half_plane.sign();
        Ok(grid.sample(|x| {
            let z = Complex64::new(x, 0.0);
            -2.0 * s
                * state
                    .poles
                    .iter()
                    .zip(&state.velocities)
                    .map(|(&a, &v)| (self.alpha_prime(z - a) * v).im)
                    .sum::<f64>()
        }))
    }

    /// Pointwise `max |u_t + 2uu_x + Hu_xx|` of the ansatz, with `u_t` from the
    /// pole velocities and the spatial terms from a BO model on the grid.
    pub fn bo_residual(&self, state: &PoleState, model: &Model) -> Result<f64> {
        let grid = model.grid();
        let u = self.field(state, grid)?;
        let ut = self.field_time_derivative(state, grid)?;
        let rhs = model.rhs_chiral(&u)?;
        Ok(ut.values().iter().zip(rhs.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn initial_sim_state(&self, state: &PoleState, grid: &PeriodicGrid) -> Result<SimState> {
        Ok(SimState { t: state.t, u: self.field(state, grid)?, v: None })
    }

    fn check_grid(&self, grid: &PeriodicGrid) -> Result<()> {
        if (grid.ell() - self.ell).abs() > 1e-14 * self.ell {
            return Err(Error::GridMismatch(format!("ansatz has ell = {}, grid {}", self.ell, grid)));
        }
        Ok(())
    }
}

/// Evolves a pole state with the ansatz's complex CMS dynamics.
pub fn pole_evolve(ansatz: &PoleAnsatz, poles: &PoleState, dt: f64, n: usize) -> Result<PoleState> {
    ansatz.evolve(poles, dt, n)
}

pub fn pole_to_field(ansatz: &PoleAnsatz, poles: &PoleState, grid: &PeriodicGrid) -> Result<Field> {
    ansatz.field(poles, grid)
}
