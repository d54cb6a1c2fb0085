use super::{EquationKind, EquationSpec, SimState};
use crate::elliptic::SeriesControl;
use crate::error::{Error, Result};
use crate::spectral::{build_multipliers, Field, Fourier, OperatorId, PeriodicGrid};
use num_complex::Complex64;

pub(super) type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Per-mode linear part of `û_t = L û + N̂(u)`.
#[derive(Debug, Clone)]
pub(super) enum Linear {
    Scalar(Vec<Complex64>),
    Block(Vec<Mat2>),
}

/// Conserved quantities of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub t: f64,
    pub mass_u: f64,
    pub mass_v: f64,
    pub momentum: f64,
    pub energy: f64,
}

/// An equation discretised on one grid: linear symbols, the quadratic term
/// and the invariant functionals.
///
/// The quadratic terms are `−∂ₓ(u²)` for `u` and `+∂ₓ(v²)` for `v`. Linear
/// symbols come from the oracle-fitted multiplier tables:
///
/// | kind  | `L(k)`                                   |
/// |-------|------------------------------------------|
/// | KdV   | `i (δ_K/3) k³`                            |
/// | BO    | `σ_H k²`                                  |
/// | ILW   | `σ_T k² − i k/δ`                          |
/// | ncILW | `c k² [[σ_T, σ_T̃], [−σ_T̃, −σ_T]]`          |
///
/// Each system is Hamiltonian, `u_t = −∂ₓ δE/δu` and `v_t = +∂ₓ δE/δv`:
///
/// ```text
/// chiral: E = ∫ u³/3 + ½⟨u, A u⟩,                       Â = i L(k)/k
/// ncILW:  E = ∫ (u³+v³)/3 + c[½⟨u,T u_x⟩ + ½⟨v,T v_x⟩ + ⟨u,T̃ v_x⟩]
/// ```
///
/// The momentum is `½∫u²` (chiral) or `½∫(u² − v²)` (ncILW). The examples
/// directory has a script that recovers these coefficients from a null-space
/// fit of the time derivatives of candidate terms.
#[derive(Debug, Clone)]
pub struct Model {
    spec: EquationSpec,
    fourier: Fourier,
    pub(super) linear: Linear,
    /// `ik` with the Nyquist slot zeroed.
    pub(super) ik: Vec<Complex64>,
    /// Two-thirds mask: `|n| ≤ m/3` kept, Nyquist always dropped.
    pub(super) mask: Vec<f64>,
    /// Real quadratic-form symbols: chiral `Â`, ncILW `(τ_T, τ_T̃)` with `τ = σ·ik`.
    energy_symbols: Vec<(f64, f64)>,
}

impl Model {
    pub fn new(spec: EquationSpec, grid: PeriodicGrid) -> Result<Self> {
        Self::with_control(spec, grid, &SeriesControl::default())
    }

    pub fn with_control(spec: EquationSpec, grid: PeriodicGrid, ctl: &SeriesControl) -> Result<Self> {
        let p = &spec.params;
        if (p.ell() - grid.ell()).abs() > 1e-14 * grid.ell() {
            return Err(Error::GridMismatch(format!("equation has ell = {}, grid has ell = {}", p.ell(), grid.ell())));
        }
        let m = grid.m_points();
        let ks: Vec<f64> = (0..m).map(|i| grid.wavenumber(i)).collect();
        let nyq = grid.nyquist_slot();
        let ik: Vec<Complex64> =
            ks.iter().enumerate().map(|(i, &k)| if i == nyq { ZERO } else { Complex64::new(0.0, k) }).collect();
        let mask = (0..m).map(|i| if i != nyq && 3 * grid.mode(i).unsigned_abs() as usize <= m { 1.0 } else { 0.0 }).collect();

        let linear = match spec.kind {
            EquationKind::KdV => {
                let d = spec.kdv_delta;
                Linear::Scalar(ks.iter().map(|&k| Complex64::new(0.0, d / 3.0 * k * k * k)).collect())
            }
            EquationKind::Bo => {
                let h = build_multipliers(OperatorId::Hilbert, grid, p, ctl)?;
                Linear::Scalar(ks.iter().zip(h.sigma()).map(|(&k, s)| s * k * k).collect())
            }
            EquationKind::Ilw => {
                let t = build_multipliers(OperatorId::T, grid, p, ctl)?;
                let d = p.delta();
                Linear::Scalar(ks.iter().zip(t.sigma()).map(|(&k, s)| s * k * k - Complex64::new(0.0, k / d)).collect())
            }
            EquationKind::NcIlw => {
                let t = build_multipliers(OperatorId::T, grid, p, ctl)?;
                let tt = build_multipliers(OperatorId::TTilde, grid, p, ctl)?;
                let c = spec.coupling;
                Linear::Block(
                    ks.iter()
                        .zip(t.sigma().iter().zip(tt.sigma()))
                        .map(|(&k, (&a, &b))| {
                            let s = c * k * k;
                            [[a * s, b * s], [-b * s, -a * s]]
                        })
                        .collect(),
                )
            }
        };
        let mut linear = linear;
        match &mut linear {
            Linear::Scalar(l) => l[nyq] = ZERO,
            Linear::Block(b) => b[nyq] = [[ZERO; 2]; 2],
        }

        let energy_symbols = match &linear {
            Linear::Scalar(l) => (0..m)
                .map(|i| {
                    let a = if ks[i] == 0.0 {
                        if spec.kind == EquationKind::Ilw { 1.0 / p.delta() } else { 0.0 }
                    } else {
                        (Complex64::new(0.0, 1.0) * l[i] / ks[i]).re
                    };
                    (a, 0.0)
                })
                .collect(),
            Linear::Block(b) => (0..m)
                .map(|i| {
                    // Undo the c k² scaling to recover σ_T, σ_T̃.
                    let s = spec.coupling * ks[i] * ks[i];
                    if s == 0.0 {
                        (0.0, 0.0)
                    } else {
                        ((b[i][0][0] / s * ik[i]).re, (b[i][0][1] / s * ik[i]).re)
                    }
                })
                .collect(),
        };

        Ok(Self { spec, fourier: Fourier::new(grid), linear, ik, mask, energy_symbols })
    }

    pub fn spec(&self) -> &EquationSpec {
        &self.spec
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.fourier.grid()
    }

    pub fn fourier(&self) -> &Fourier {
        &self.fourier
    }

    pub(super) fn n_fields(&self) -> usize {
        if self.spec.kind.is_chiral() { 1 } else { 2 }
    }

    /// Largest `|λ|` of the per-mode linear part.
    pub fn max_linear_rate(&self) -> f64 {
        match &self.linear {
            Linear::Scalar(l) => l.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Linear::Block(b) => b
                .iter()
                .map(|m| {
                    // Eigenvalues of [[a, b], [−b, −a]] are ±sqrt(a² − b²).
                    (m[0][0] * m[0][0] - m[0][1] * m[0][1]).sqrt().norm()
                })
                .fold(0.0, f64::max),
        }
    }

    /// Linear symbol of a chiral equation, FFT order.
    pub fn linear_symbol(&self) -> Option<&[Complex64]> {
        match &self.linear {
            Linear::Scalar(l) => Some(l),
            Linear::Block(_) => None,
        }
    }

    /// `N̂` of the spectral state `x` (one or two stacked fields) into `out`.
    /// `work` and `phys` are scratch of length `m`.
    pub(super) fn nonlinear(
        &self,
        x: &[Complex64],
        out: &mut [Complex64],
        dealias: bool,
        work: &mut [Complex64],
        phys: &mut [f64],
    ) {
        let m = self.grid().m_points();
        for f in 0..self.n_fields() {
            let sign = if f == 0 { -1.0 } else { 1.0 };
            let xs = &x[f * m..(f + 1) * m];
            let os = &mut out[f * m..(f + 1) * m];
            self.fourier.inverse_into(xs, work, phys);
            for p in phys.iter_mut() {
                *p *= *p;
            }
            self.fourier.forward_into(phys, os);
            for i in 0..m {
                let keep = if dealias { self.mask[i] } else { 1.0 };
                os[i] *= self.ik[i] * (sign * keep);
            }
        }
    }

    pub(super) fn linear_apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let m = self.grid().m_points();
        match &self.linear {
            Linear::Scalar(l) => {
                for i in 0..m {
                    out[i] = l[i] * x[i];
                }
            }
            Linear::Block(b) => {
                for i in 0..m {
                    let (u, v) = (x[i], x[m + i]);
                    out[i] = b[i][0][0] * u + b[i][0][1] * v;
                    out[m + i] = b[i][1][0] * u + b[i][1][1] * v;
                }
            }
        }
    }

    pub(super) fn to_spectral(&self, state: &SimState) -> Result<Vec<Complex64>> {
        let m = self.grid().m_points();
        state.u.check_grid(self.grid())?;
        let mut x = vec![ZERO; self.n_fields() * m];
        self.fourier.forward_into(state.u.values(), &mut x[..m]);
        if self.n_fields() == 2 {
            let v = state
                .v
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("non-chiral equation needs a v field".into()))?;
            v.check_grid(self.grid())?;
            self.fourier.forward_into(v.values(), &mut x[m..]);
        }
        Ok(x)
    }

    pub(super) fn to_physical(&self, x: &[Complex64], t: f64) -> SimState {
        let m = self.grid().m_points();
        let mut work = vec![ZERO; m];
        let mut field = |slice: &[Complex64]| {
            let mut vals = vec![0.0; m];
            self.fourier.inverse_into(slice, &mut work, &mut vals);
            Field { grid: *self.grid(), values: vals }
        };
        let u = field(&x[..m]);
        let v = (self.n_fields() == 2).then(|| field(&x[m..]));
        SimState { t, u, v }
    }

    /// Full right-hand side (no dealiasing) of the current equation.
    pub fn rhs(&self, state: &SimState) -> Result<SimState> {
        let m = self.grid().m_points();
        let x = self.to_spectral(state)?;
        let mut lin = vec![ZERO; x.len()];
        let mut nl = vec![ZERO; x.len()];
        let mut work = vec![ZERO; m];
        let mut phys = vec![0.0; m];
        self.linear_apply(&x, &mut lin);
        self.nonlinear(&x, &mut nl, false, &mut work, &mut phys);
        for (a, b) in lin.iter_mut().zip(&nl) {
            *a += b;
        }
        Ok(self.to_physical(&lin, state.t))
    }

    pub fn rhs_chiral(&self, u: &Field) -> Result<Field> {
        if !self.spec.kind.is_chiral() {
            return Err(Error::InvalidParameter("rhs_chiral called on the non-chiral system".into()));
        }
        Ok(self.rhs(&SimState::chiral(u.clone()))?.u)
    }

    pub fn rhs_ncilw(&self, u: &Field, v: &Field) -> Result<(Field, Field)> {
        if self.spec.kind.is_chiral() {
            return Err(Error::InvalidParameter("rhs_ncilw called on a chiral equation".into()));
        }
        let r = self.rhs(&SimState::pair(u.clone(), v.clone())?)?;
        Ok((r.u, r.v.expect("two fields")))
    }

    pub fn invariants(&self, state: &SimState) -> Result<Invariants> {
        let x = self.to_spectral(state)?;
        Ok(self.invariants_spectral(&x, state))
    }

    pub(super) fn invariants_spectral(&self, x: &[Complex64], state: &SimState) -> Invariants {
        let grid = self.grid();
        let m = grid.m_points();
        let two_ell = 2.0 * grid.ell();
        let h = grid.spacing();
        let cube = |f: &Field| f.values().iter().map(|a| a * a * a).sum::<f64>() * h / 3.0;
        let square = |c: &[Complex64]| c.iter().map(|z| z.norm_sqr()).sum::<f64>() * two_ell;
        let u = &x[..m];
        let mass_u = two_ell * u[0].re;
        match &self.linear {
            Linear::Scalar(_) => {
                let quad: f64 = u.iter().zip(&self.energy_symbols).map(|(z, (a, _))| a * z.norm_sqr()).sum();
                Invariants {
                    t: state.t,
                    mass_u,
                    mass_v: 0.0,
                    momentum: 0.5 * square(u),
                    energy: cube(&state.u) + 0.5 * two_ell * quad,
                }
            }
            Linear::Block(_) => {
                let v = &x[m..];
                let mut quad = 0.0;
                for i in 0..m {
                    let (tt, tn) = self.energy_symbols[i];
                    quad += 0.5 * tt * (u[i].norm_sqr() + v[i].norm_sqr()) + tn * (u[i].conj() * v[i]).re;
                }
                let vf = state.v.as_ref().expect("two fields");
                Invariants {
                    t: state.t,
                    mass_u,
                    mass_v: two_ell * v[0].re,
                    momentum: 0.5 * (square(u) - square(v)),
                    energy: cube(&state.u) + cube(vf) + self.spec.coupling * two_ell * quad,
                }
            }
        }
    }
}

/// One-shot chiral right-hand side; builds the operator tables on each call.
pub fn rhs_chiral(u: &Field, spec: &EquationSpec) -> Result<Field> {
    Model::new(*spec, *u.grid())?.rhs_chiral(u)
}

/// One-shot non-chiral right-hand side; builds the operator tables on each call.
pub fn rhs_ncilw(u: &Field, v: &Field, spec: &EquationSpec) -> Result<(Field, Field)> {
    Model::new(*spec, *u.grid())?.rhs_ncilw(u, v)
}
