//! Cox–Matthews fourth-order exponential time differencing.
//!
//! For `û_t = L û + N̂(u)` with step `h`, `z = hL`:
//!
//! ```text
//! a  = E₂ u + Q N(u)            E = e^z, E₂ = e^{z/2}, Q = (h/2) φ₁(z/2)
//! b  = E₂ u + Q N(a)
//! c  = E₂ a + Q (2N(b) − N(u))
//! u⁺ = E u + f₁ N(u) + 2 f₂ (N(a) + N(b)) + f₃ N(c)
//!
//! f₁ = h(φ₁ − 3φ₂ + 4φ₃),  f₂ = h(φ₂ − 2φ₃),  f₃ = h(−φ₂ + 4φ₃)
//! ```
//!
//! For the non-chiral system `L` is a 2×2 block per mode with `L² = μ I`; any
//! analytic `F` then satisfies `F(L) = ½(F(λ) + F(−λ)) I + (F(λ) − F(−λ))/(2λ) L`
//! with `λ = √μ`.

use super::model::{Linear, Mat2, Model};
use super::{SimState, SolverConfig};
use super::model::Invariants;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// The linear part is integrated exactly, so this is not a stability limit:
/// it caps the phase the stiffest mode may turn per step (radians), which
/// catches grids or steps that are off by orders of magnitude.
pub const LINEAR_PHASE_BOUND: f64 = 1.0e3;

/// Bound on `dt · k_max · 2 max|u|` over the retained modes, below the
/// imaginary-axis stability limit (≈ 2.8) of the fourth-order stages.
pub const ADVECTIVE_BOUND: f64 = 2.5;

/// A run fails once `max|field|` exceeds this multiple of its initial value.
pub const BLOWUP_FACTOR: f64 = 1.0e6;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `(φ₁, φ₂, φ₃)(z)` with `φ_j(z) = Σ_n zⁿ/(n+j)!`.
pub fn phi_coefficients(z: Complex64) -> [Complex64; 3] {
    if z.norm() < 0.5 {
        let mut out = [ZERO; 3];
        for (j, o) in out.iter_mut().enumerate() {
            // Horner on Σ zⁿ/(n+j+1)! for n = 0..24.
            let mut acc = ZERO;
            for n in (0..25).rev() {
                acc = acc * z / (n + j + 2) as f64 + 1.0;
            }
            let mut fact = 1.0;
            for i in 1..=(j + 1) {
                fact *= i as f64;
            }
            *o = acc / fact;
        }
        out
    } else {
        let ez = z.exp();
        let p1 = (ez - 1.0) / z;
        let p2 = (ez - 1.0 - z) / (z * z);
        let p3 = (ez - 1.0 - z - z * z / 2.0) / (z * z * z);
        [p1, p2, p3]
    }
}

/// `[E, E₂, Q, f₁, f₂, f₃]` for the scalar rate `lambda`.
fn scalar_coeffs(lambda: Complex64, h: f64) -> [Complex64; 6] {
    let z = lambda * h;
    let [p1, p2, p3] = phi_coefficients(z);
    let [q1, _, _] = phi_coefficients(z / 2.0);
    [
        z.exp(),
        (z / 2.0).exp(),
        q1 * (h / 2.0),
        (p1 - 3.0 * p2 + 4.0 * p3) * h,
        (p2 - 2.0 * p3) * h,
        (-p2 + 4.0 * p3) * h,
    ]
}

fn block_coeffs(b: &Mat2, h: f64) -> [Mat2; 6] {
    let mu = b[0][0] * b[0][0] + b[0][1] * b[1][0];
    let lambda = mu.sqrt();
    let id = |s: Complex64| [[s, ZERO], [ZERO, s]];
    if lambda == ZERO {
        return scalar_coeffs(ZERO, h).map(id);
    }
    let plus = scalar_coeffs(lambda, h);
    let minus = scalar_coeffs(-lambda, h);
    let mut out = [[[ZERO; 2]; 2]; 6];
    for k in 0..6 {
        let even = (plus[k] + minus[k]) / 2.0;
        let odd = (plus[k] - minus[k]) / (2.0 * lambda);
        for r in 0..2 {
            for c in 0..2 {
                out[k][r][c] = odd * b[r][c] + if r == c { even } else { ZERO };
            }
        }
    }
    out
}

fn apply(d: &Linear, x: &[Complex64], out: &mut [Complex64], accumulate: bool) {
    match d {
        Linear::Scalar(s) => {
            for ((o, a), xi) in out.iter_mut().zip(s).zip(x) {
                *o = if accumulate { *o + a * xi } else { a * xi };
            }
        }
        Linear::Block(b) => {
            let m = b.len();
            for i in 0..m {
                let (u, v) = (x[i], x[m + i]);
                let ou = b[i][0][0] * u + b[i][0][1] * v;
                let ov = b[i][1][0] * u + b[i][1][1] * v;
                if accumulate {
                    out[i] += ou;
                    out[m + i] += ov;
                } else {
                    out[i] = ou;
                    out[m + i] = ov;
                }
            }
        }
    }
}

/// Snapshots and invariant records of a run.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub snapshots: Vec<SimState>,
    pub invariants: Vec<Invariants>,
}

#[derive(Debug, Clone)]
pub struct Solver {
    model: Model,
    config: SolverConfig,
    /// `[E, E₂, Q, f₁, f₂, f₃]`.
    coeffs: [Linear; 6],
}

struct Scratch {
    nu: Vec<Complex64>,
    na: Vec<Complex64>,
    nb: Vec<Complex64>,
    nc: Vec<Complex64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
    work: Vec<Complex64>,
    phys: Vec<f64>,
}

impl Scratch {
    fn new(len: usize, m: usize) -> Self {
        let z = || vec![ZERO; len];
        Self { nu: z(), na: z(), nb: z(), nc: z(), a: z(), b: z(), c: z(), work: vec![ZERO; m], phys: vec![0.0; m] }
    }
}

impl Solver {
    pub fn new(model: Model, config: SolverConfig) -> Result<Self> {
        if !(config.dt.is_finite() && config.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", config.dt)));
        }
        let h = config.dt;
        if config.check_guards {
            let phase = h * model.max_linear_rate();
            if phase > LINEAR_PHASE_BOUND {
                return Err(Error::StepGuard(format!(
                    "dt·max|ω| = {phase:.3e} exceeds {LINEAR_PHASE_BOUND:e}"
                )));
            }
        }
        let coeffs = match &model.linear {
            Linear::Scalar(l) => {
                let cs: Vec<[Complex64; 6]> = l.iter().map(|&lam| scalar_coeffs(lam, h)).collect();
                std::array::from_fn(|k| Linear::Scalar(cs.iter().map(|c| c[k]).collect()))
            }
            Linear::Block(b) => {
                let cs: Vec<[Mat2; 6]> = b.iter().map(|m| block_coeffs(m, h)).collect();
                std::array::from_fn(|k| Linear::Block(cs.iter().map(|c| c[k]).collect()))
            }
        };
        Ok(Self { model, config, coeffs })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Largest wavenumber that feeds the quadratic term.
    fn k_retained(&self) -> f64 {
        let g = self.model.grid();
        (0..g.m_points())
            .filter(|&i| !self.config.dealias || self.model.mask[i] > 0.0)
            .map(|i| g.wavenumber(i).abs())
            .fold(0.0, f64::max)
    }

    pub fn check_advective(&self, state: &SimState) -> Result<()> {
        if !self.config.check_guards {
            return Ok(());
        }
        let c = self.config.dt * self.k_retained() * 2.0 * state.max_abs();
        if c > ADVECTIVE_BOUND {
            return Err(Error::StepGuard(format!("dt·k_max·2max|u| = {c:.3} exceeds {ADVECTIVE_BOUND}")));
        }
        Ok(())
    }

    fn step_spectral(&self, x: &mut Vec<Complex64>, s: &mut Scratch) {
        let model = &self.model;
        let dealias = self.config.dealias;
        let [e, e2, q, f1, f2, f3] = &self.coeffs;
        model.nonlinear(x, &mut s.nu, dealias, &mut s.work, &mut s.phys);

        apply(e2, x, &mut s.a, false);
        apply(q, &s.nu, &mut s.a, true);
        model.nonlinear(&s.a, &mut s.na, dealias, &mut s.work, &mut s.phys);

        apply(e2, x, &mut s.b, false);
        apply(q, &s.na, &mut s.b, true);
        model.nonlinear(&s.b, &mut s.nb, dealias, &mut s.work, &mut s.phys);

        // c = E₂ a + Q(2N(b) − N(u)); N(c) reuses nc as scratch first.
        for ((t, nb), nu) in s.nc.iter_mut().zip(&s.nb).zip(&s.nu) {
            *t = 2.0 * nb - nu;
        }
        apply(e2, &s.a, &mut s.c, false);
        apply(q, &s.nc, &mut s.c, true);
        model.nonlinear(&s.c, &mut s.nc, dealias, &mut s.work, &mut s.phys);

        // u⁺ = E u + f₁N(u) + 2f₂(N(a) + N(b)) + f₃N(c); `a` is free now.
        for ((t, na), nb) in s.a.iter_mut().zip(&s.na).zip(&s.nb) {
            *t = 2.0 * (na + nb);
        }
        apply(e, x, &mut s.b, false);
        apply(f1, &s.nu, &mut s.b, true);
        apply(f2, &s.a, &mut s.b, true);
        apply(f3, &s.nc, &mut s.b, true);
        std::mem::swap(x, &mut s.b);
    }

    /// One step of length `dt`.
    pub fn step(&self, state: &SimState) -> Result<SimState> {
        self.check_advective(state)?;
        let mut x = self.model.to_spectral(state)?;
        let mut s = Scratch::new(x.len(), self.model.grid().m_points());
        self.step_spectral(&mut x, &mut s);
        let next = self.model.to_physical(&x, state.t + self.config.dt);
        check_blowup(&next, state.max_abs())?;
        Ok(next)
    }

    /// Integrates `n_steps` steps. On failure the error is returned together
    /// with everything recorded up to the last good step.
    pub fn run_partial(&self, initial: &SimState) -> (RunOutput, Option<Error>) {
        let mut out = RunOutput::default();
        let result = self.run_into(initial, &mut out);
        (out, result.err())
    }

    pub fn run(&self, initial: &SimState) -> Result<RunOutput> {
        let mut out = RunOutput::default();
        self.run_into(initial, &mut out)?;
        Ok(out)
    }

    fn run_into(&self, initial: &SimState, out: &mut RunOutput) -> Result<()> {
        let cfg = &self.config;
        self.check_advective(initial)?;
        let mut x = self.model.to_spectral(initial)?;
        let mut s = Scratch::new(x.len(), self.model.grid().m_points());
        let scale = initial.max_abs();
        out.snapshots.push(initial.clone());
        out.invariants.push(self.model.invariants_spectral(&x, initial));
        for n in 1..=cfg.n_steps {
            self.step_spectral(&mut x, &mut s);
            let t = initial.t + n as f64 * cfg.dt;
            let last = n == cfg.n_steps;
            let snap = last || (cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0);
            let inv = last || (cfg.invariant_every > 0 && n % cfg.invariant_every == 0);
            let state = self.model.to_physical(&x, t);
            check_blowup(&state, scale)?;
            if inv {
                out.invariants.push(self.model.invariants_spectral(&x, &state));
            }
            if snap {
                out.snapshots.push(state);
            }
        }
        Ok(())
    }
}

fn check_blowup(state: &SimState, initial_max: f64) -> Result<()> {
    let max_abs = state.max_abs();
    let finite = state.u.values().iter().chain(state.v.iter().flat_map(|v| v.values())).all(|a| a.is_finite());
    if !finite || max_abs > BLOWUP_FACTOR * initial_max {
        return Err(Error::BlowUp { t: state.t, max_abs: if finite { max_abs } else { f64::INFINITY } });
    }
    Ok(())
}
