use super::grid::{derivative_symbol, Field, Fourier, PeriodicGrid};
use super::quadrature::{PvKernel, PvOracle, DEFAULT_REFINEMENT};
use crate::elliptic::{EllipticParams, SeriesControl};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Dispersion families of the chiral equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispersionKind {
    KdV,
    Bo,
    Ilw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorId {
    Hilbert,
    T,
    TTilde,
    Dx,
    Dispersion(DispersionKind),
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorId::Hilbert => f.write_str("H"),
            OperatorId::T => f.write_str("T"),
            OperatorId::TTilde => f.write_str("Ttilde"),
            OperatorId::Dx => f.write_str("Dx"),
            OperatorId::Dispersion(k) => write!(f, "omega_{}", format!("{k:?}").to_lowercase()),
        }
    }
}

/// Agreement required between probe nodes for a fitted multiplier.
pub const DIAGONAL_TOL: f64 = 1e-8;

/// Diagonal symbol of a translation-invariant operator, in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierTable {
    op: OperatorId,
    grid: PeriodicGrid,
    params: EllipticParams,
    sigma: Vec<Complex64>,
}

impl MultiplierTable {
    pub fn op(&self) -> OperatorId {
        self.op
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn params(&self) -> &EllipticParams {
        &self.params
    }

    pub fn sigma(&self) -> &[Complex64] {
        &self.sigma
    }

    /// Multiplier of mode `n`.
    pub fn get(&self, n: i64) -> Complex64 {
        self.sigma[self.grid.slot(n)]
    }

    pub fn apply(&self, fourier: &Fourier, f: &Field) -> Result<Field> {
        if fourier.grid() != &self.grid {
            return Err(Error::GridMismatch(format!("table built for {}, transform is for {}", self.grid, fourier.grid())));
        }
        fourier.apply(f, &self.sigma)
    }

    /// Rows `(n, k, Re σ, Im σ)` ordered by mode number.
    pub fn rows(&self) -> Vec<(i64, f64, f64, f64)> {
        let mut rows: Vec<_> = (0..self.grid.m_points())
            .map(|idx| (self.grid.mode(idx), self.grid.wavenumber(idx), self.sigma[idx].re, self.sigma[idx].im))
            .collect();
        rows.sort_by_key(|r| r.0);
        rows
    }
}

pub fn build_multipliers(
    op: OperatorId,
    grid: PeriodicGrid,
    params: &EllipticParams,
    ctl: &SeriesControl,
) -> Result<MultiplierTable> {
    let sigma = match op {
        OperatorId::Hilbert => fit_odd_kernel(PvKernel::HilbertCot, grid, params, ctl)?,
        OperatorId::T => fit_odd_kernel(PvKernel::Zeta, grid, params, ctl)?,
        OperatorId::TTilde => fit_odd_kernel(PvKernel::ZetaShifted, grid, params, ctl)?,
        OperatorId::Dx => derivative_symbol(&grid),
        OperatorId::Dispersion(kind) => {
            let mut s: Vec<Complex64> = (0..grid.m_points())
                .map(|idx| Complex64::new(dispersion_omega(kind, grid.wavenumber(idx), params), 0.0))
                .collect();
            s[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
            s
        }
    };
    Ok(MultiplierTable { op, grid, params: *params, sigma })
}

/// Fits the diagonal action of a convolution operator from the quadrature
/// oracle, using `cos(k_n x)` and `sin(k_n x)` probed at several nodes.
///
/// With `Q_c = O[cos](x)` and `Q_s = O[sin](x)`, diagonality gives
/// `σ(±n) = (Q_c ± i Q_s) e^{∓ i k_n x}`, which must not depend on `x`.
fn fit_odd_kernel(
    kernel: PvKernel,
    grid: PeriodicGrid,
    params: &EllipticParams,
    ctl: &SeriesControl,
) -> Result<Vec<Complex64>> {
    let oracle = PvOracle::new(kernel, grid, params, ctl, DEFAULT_REFINEMENT)?;
    let m = grid.m_points();
    let probes: Vec<f64> = {
        let mut js = vec![0, m / 3 + 1, m - 1];
        js.retain(|&j| j < m);
        js.dedup();
        js.into_iter().map(|j| grid.node(j)).collect()
    };
    let mut sigma = vec![Complex64::new(0.0, 0.0); m];
    let i = Complex64::new(0.0, 1.0);
    for n in 1..(m / 2) as i64 {
        let k = grid.wavenumber(grid.slot(n));
        let mut fits: Vec<(Complex64, Complex64)> = Vec::with_capacity(probes.len());
        for &x in &probes {
            let qc = oracle.apply_fn(|y| (k * y).cos(), x);
            let qs = oracle.apply_fn(|y| (k * y).sin(), x);
            let phase = Complex64::from_polar(1.0, -k * x);
            fits.push(((qc + i * qs) * phase, (qc - i * qs) * phase.conj()));
        }
        let (plus, minus) = fits[0];
        let scale = plus.norm().max(1.0);
        for (p, q) in &fits[1..] {
            let spread = (p - plus).norm().max((q - minus).norm());
            if spread > DIAGONAL_TOL * scale {
                return Err(Error::OracleInconsistency(format!(
                    "{kernel:?} mode {n}: probe fits differ by {spread:e}"
                )));
            }
        }
        // All three kernels have an odd real part on the real axis, so the
        // symbol must be imaginary and odd in n.
        let asym = (plus + minus).norm();
        if plus.re.abs() > DIAGONAL_TOL * scale || asym > DIAGONAL_TOL * scale {
            return Err(Error::OracleInconsistency(format!(
                "{kernel:?} mode {n}: symbol {plus} / {minus} is not odd and imaginary"
            )));
        }
        let im = 0.5 * (plus.im - minus.im);
        sigma[grid.slot(n)] = Complex64::new(0.0, im);
        sigma[grid.slot(-n)] = Complex64::new(0.0, -im);
    }
    Ok(sigma)
}

/// Closed-form symbols, used only to cross-check the oracle fit:
/// `σ_H = i sign k`, `σ_T = i coth(kδ)`, `σ_T̃ = i / sinh(kδ)`, `σ_∂ = ik`.
pub fn closed_form_symbol(op: OperatorId, k: f64, params: &EllipticParams) -> Complex64 {
    if k == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let d = params.delta();
    let im = match op {
        OperatorId::Hilbert => k.signum(),
        OperatorId::T => 1.0 / (k * d).tanh(),
        OperatorId::TTilde => 1.0 / (k * d).sinh(),
        OperatorId::Dx => k,
        OperatorId::Dispersion(kind) => return Complex64::new(dispersion_omega(kind, k, params), 0.0),
    };
    Complex64::new(0.0, im)
}

/// `x coth x − 1`, accurate for small `x`.
fn x_coth_x_minus_one(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 0.1 {
        let x2 = x * x;
        x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * 2.0 / 93555.0))))
    } else {
        ax / ax.tanh() - 1.0
    }
}

/// Linear frequency `ω(k)` in the convention `û_t = −i ω(k) û`, chosen so that
/// each chiral equation `u_t + 2uu_x + [linear terms] = 0` linearises exactly:
///
/// * KdV, `+ (δ/3) u_xxx`:          `ω = −(δ/3) k³`
/// * BO, `+ H u_xx`:                 `ω = −sign(k) k²`
/// * ILW, `+ u_x/δ + T u_xx`:        `ω = −(k² coth(kδ) − k/δ)`
pub fn dispersion_omega(kind: DispersionKind, k: f64, params: &EllipticParams) -> f64 {
    let d = params.delta();
    match kind {
        DispersionKind::KdV => -(d / 3.0) * k * k * k,
        DispersionKind::Bo => -k.signum() * k * k,
        DispersionKind::Ilw => {
            if k == 0.0 {
                0.0
            } else {
                -(k / d) * x_coth_x_minus_one(k * d)
            }
        }
    }
}
