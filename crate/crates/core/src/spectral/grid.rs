use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Uniform grid on the circle `[−ℓ, ℓ)` with `x_j = −ℓ + 2ℓ j / m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    m_points: usize,
    ell: f64,
}

impl PeriodicGrid {
    pub fn new(m_points: usize, ell: f64) -> Result<Self> {
        if m_points < 2 || !m_points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("m_points must be a positive even integer, got {m_points}")));
        }
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidParameter(format!("ell must be positive and finite, got {ell}")));
        }
        Ok(Self { m_points, ell })
    }

    pub fn m_points(&self) -> usize {
        self.m_points
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.ell / self.m_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.ell + self.spacing() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m_points).map(|j| self.node(j)).collect()
    }

    /// Signed mode number stored at FFT-ordered slot `idx`.
    pub fn mode(&self, idx: usize) -> i64 {
        let m = self.m_points as i64;
        let i = idx as i64;
        if i < m / 2 { i } else { i - m }
    }

    /// FFT-ordered slot holding mode `n`, for `−m/2 ≤ n < m/2`.
    pub fn slot(&self, n: i64) -> usize {
        n.rem_euclid(self.m_points as i64) as usize
    }

    pub fn wavenumber(&self, idx: usize) -> f64 {
        self.mode(idx) as f64 * PI / self.ell
    }

    pub fn nyquist_slot(&self) -> usize {
        self.m_points / 2
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: *self, values: self.nodes().into_iter().map(f).collect() }
    }
}

impl fmt::Display for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} points on [-{}, {})", self.m_points, self.ell, self.ell)
    }
}

/// Real samples at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub(crate) grid: PeriodicGrid,
    pub(crate) values: Vec<f64>,
}

impl Field {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.m_points() {
            return Err(Error::GridMismatch(format!("{} samples for {grid}", values.len())));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample {j} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self { grid, values: vec![0.0; grid.m_points()] }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(mut self, a: f64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= a);
        self
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Trapezoidal `∫ f g dx` over one period.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        self.check_grid(other.grid())?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.grid.spacing())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_grid(&self, grid: &PeriodicGrid) -> Result<()> {
        if &self.grid != grid {
            return Err(Error::GridMismatch(format!("field lives on {}, expected {grid}", self.grid)));
        }
        Ok(())
    }
}

/// Fourier coefficients `c_n = (1/m) Σ_j f_j e^{−i k_n x_j}` in FFT order, so
/// that `f(x_j) = Σ_n c_n e^{i k_n x_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub(crate) grid: PeriodicGrid,
    pub(crate) coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: PeriodicGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.m_points() {
            return Err(Error::GridMismatch(format!("{} coefficients for {grid}", coeffs.len())));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of mode `n`.
    pub fn get(&self, n: i64) -> Complex64 {
        self.coeffs[self.grid.slot(n)]
    }
}

/// Planned forward and inverse transforms for one grid.
///
/// Plans are immutable and shareable; scratch buffers are allocated per call.
#[derive(Clone)]
pub struct Fourier {
    grid: PeriodicGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fourier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fourier").field("grid", &self.grid).finish()
    }
}

impl Fourier {
    pub fn new(grid: PeriodicGrid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.m_points());
        let inverse = planner.plan_fft_inverse(grid.m_points());
        Self { grid, forward, inverse }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Node values to coefficients; `out` has length `m`.
    pub fn forward_into(&self, values: &[f64], out: &mut [Complex64]) {
        let m = self.grid.m_points();
        for (o, &v) in out.iter_mut().zip(values) {
            *o = Complex64::new(v, 0.0);
        }
        self.forward.process(out);
        // x_0 = −ℓ contributes e^{i k_n ℓ} = (−1)^n.
        let scale = 1.0 / m as f64;
        for (idx, c) in out.iter_mut().enumerate() {
            *c *= if idx % 2 == 0 { scale } else { -scale };
        }
    }

    /// Coefficients to node values (real part). `work` is overwritten.
    pub fn inverse_into(&self, coeffs: &[Complex64], work: &mut [Complex64], out: &mut [f64]) {
        for (idx, (w, c)) in work.iter_mut().zip(coeffs).enumerate() {
            *w = if idx % 2 == 0 { *c } else { -*c };
        }
        self.inverse.process(work);
        for (o, w) in out.iter_mut().zip(work.iter()) {
            *o = w.re;
        }
    }

    pub fn to_spectrum(&self, f: &Field) -> Result<Spectrum> {
        f.check_grid(&self.grid)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.grid.m_points()];
        self.forward_into(&f.values, &mut coeffs);
        Ok(Spectrum { grid: self.grid, coeffs })
    }

    pub fn from_spectrum(&self, s: &Spectrum) -> Result<Field> {
        if s.grid != self.grid {
            return Err(Error::GridMismatch(format!("spectrum lives on {}, expected {}", s.grid, self.grid)));
        }
        let m = self.grid.m_points();
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        let mut values = vec![0.0; m];
        self.inverse_into(&s.coeffs, &mut work, &mut values);
        Ok(Field { grid: self.grid, values })
    }

    /// Applies a diagonal multiplier given in FFT order.
    pub fn apply(&self, f: &Field, sigma: &[Complex64]) -> Result<Field> {
        let mut s = self.to_spectrum(f)?;
        for (c, m) in s.coeffs.iter_mut().zip(sigma) {
            *c *= m;
        }
        self.from_spectrum(&s)
    }

    pub fn deriv(&self, f: &Field) -> Result<Field> {
        let sigma = derivative_symbol(&self.grid);
        self.apply(f, &sigma)
    }
}

/// `i k_n` with the Nyquist slot zeroed.
pub(crate) fn derivative_symbol(grid: &PeriodicGrid) -> Vec<Complex64> {
    let mut sigma: Vec<Complex64> =
        (0..grid.m_points()).map(|idx| Complex64::new(0.0, grid.wavenumber(idx))).collect();
    sigma[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
    sigma
}

pub fn to_spectrum(f: &Field) -> Spectrum {
    Fourier::new(f.grid).to_spectrum(f).expect("grid taken from the field")
}

pub fn from_spectrum(s: &Spectrum) -> Field {
    Fourier::new(s.grid).from_spectrum(s).expect("grid taken from the spectrum")
}

pub fn deriv(f: &Field) -> Field {
    Fourier::new(f.grid).deriv(f).expect("grid taken from the field")
}
