//! Grid discretizations of the elliptic Calogero–Sutherland Hamiltonian
//! `H_{N;g}` and its four-species generalization.
//!
//! Every particle lives on the same offset periodic grid
//! `x_i = −ℓ + (i + ½)h`, `h = 2ℓ/M`. Species are described by a mass
//! `m ∈ {1, −1/g}` and a chirality `r = ±`:
//!
//! * kinetic term `−(1/2m) ∂²` per axis,
//! * pair term `g(m+m′)(gmm′−1)/2 · W(x − x′)` with `W = ℘₁` for equal
//!   chirality and `W = ℘₁(· + iδ)` otherwise,
//! * constant `c_{N₁;g} + c_{N₂;g} − g c_{M₁;1/g} − g c_{M₂;1/g}`.
//!
//! Tensor-grid nodes on which two equal-chirality particles coincide sit on
//! the `℘₁` pole. They are removed from the basis (hard-core exclusion, i.e.
//! the wavefunction vanishes there) so the potential stays finite.

use crate::elliptic::{self, EllipticParams, SeriesControl};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Largest operator dimension accepted by [`diagonalize`] and the builders.
pub const DIMENSION_CAP: usize = 4096;

/// Largest total particle number for dense assembly.
pub const MAX_PARTICLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    SecondOrder,
    FourthOrder,
    /// Fourier differentiation matrix on the full periodic axis.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Plus,
    Minus,
}

/// Particle species: mass `1` or `−1/g`, and chirality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    X,
    XTilde,
    Y,
    YTilde,
}

impl Species {
    pub fn mass(self, g: f64) -> f64 {
        match self {
            Species::X | Species::Y => 1.0,
            Species::XTilde | Species::YTilde => -1.0 / g,
        }
    }

    pub fn chirality(self) -> Chirality {
        match self {
            Species::X | Species::XTilde => Chirality::Plus,
            Species::Y | Species::YTilde => Chirality::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpec {
    pub n1: usize,
    pub m1: usize,
    pub n2: usize,
    pub m2: usize,
    pub g: f64,
    pub params: EllipticParams,
}

impl SectorSpec {
    pub fn new(counts: [usize; 4], g: f64, params: EllipticParams) -> Result<Self> {
        let [n1, m1, n2, m2] = counts;
        let s = Self { n1, m1, n2, m2, g, params };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!("coupling g must be positive, got {}", self.g)));
        }
        let total = self.total();
        if total == 0 || total > MAX_PARTICLES {
            return Err(Error::InvalidParameter(format!(
                "total particle number must be in 1..={MAX_PARTICLES}, got {total}"
            )));
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.n1 + self.m1 + self.n2 + self.m2
    }

    /// Species per axis, ordered `x…, x̃…, y…, ỹ…`.
    pub fn axes(&self) -> Vec<Species> {
        [(Species::X, self.n1), (Species::XTilde, self.m1), (Species::Y, self.n2), (Species::YTilde, self.m2)]
            .into_iter()
            .flat_map(|(s, n)| std::iter::repeat_n(s, n))
            .collect()
    }

    /// The sector with the `+` and `−` families exchanged.
    pub fn swapped(&self) -> Self {
        Self { n1: self.n2, m1: self.m2, n2: self.n1, m2: self.m1, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumGrid {
    pub points: usize,
    pub stencil: Stencil,
    /// Drop coincident equal-chirality nodes; without it assembly fails with `PoleOnGrid`.
    pub exclusion: bool,
}

impl QuantumGrid {
    pub fn new(points: usize, stencil: Stencil) -> Result<Self> {
        if points < 5 {
            return Err(Error::InvalidParameter(format!("need at least 5 points per axis, got {points}")));
        }
        if stencil == Stencil::Spectral && !points.is_multiple_of(2) {
            return Err(Error::InvalidParameter("spectral stencil needs an even number of points".into()));
        }
        Ok(Self { points, stencil, exclusion: true })
    }

    pub fn without_exclusion(mut self) -> Self {
        self.exclusion = false;
        self
    }

    pub fn spacing(&self, ell: f64) -> f64 {
        2.0 * ell / self.points as f64
    }

    pub fn node(&self, i: usize, ell: f64) -> f64 {
        -ell + (i as f64 + 0.5) * self.spacing(ell)
    }

    /// Second-derivative weights `(offset, weight)` along one periodic axis, for
    /// offsets taken modulo `points`.
    fn second_derivative(&self, ell: f64) -> Vec<(usize, f64)> {
        let m = self.points;
        let h = self.spacing(ell);
        let wrap = |d: isize| d.rem_euclid(m as isize) as usize;
        match self.stencil {
            Stencil::SecondOrder => {
                let w = 1.0 / (h * h);
                vec![(0, -2.0 * w), (1, w), (wrap(-1), w)]
            }
            Stencil::FourthOrder => {
                let w = 1.0 / (12.0 * h * h);
                vec![(0, -30.0 * w), (1, 16.0 * w), (wrap(-1), 16.0 * w), (2, -w), (wrap(-2), -w)]
            }
            Stencil::Spectral => {
                let th = 2.0 * PI / m as f64;
                let scale = (PI / ell).powi(2);
                (0..m)
                    .map(|k| {
                        let w = if k == 0 {
                            -PI * PI / (3.0 * th * th) - 1.0 / 6.0
                        } else {
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            -sign / (2.0 * (0.5 * k as f64 * th).sin().powi(2))
                        };
                        (k, w * scale)
                    })
                    .collect()
            }
        }
    }
}

/// Dense operator on the retained tensor-grid basis.
#[derive(Debug, Clone)]
pub struct GridOperator {
    pub matrix: DMatrix<f64>,
    /// Grid index tuple of each basis vector, one entry per axis.
    pub basis: Vec<Vec<usize>>,
    pub axes: Vec<Species>,
    pub grid: QuantumGrid,
    pub params: EllipticParams,
    pub constant: f64,
}

impl GridOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn asymmetry(&self) -> f64 {
        let a = &self.matrix;
        (a - a.transpose()).amax()
    }

    /// Applies the operator to a function sampled on the retained nodes.
    pub fn apply_fn(&self, f: impl Fn(&[f64]) -> f64) -> (Vec<f64>, Vec<f64>) {
        let ell = self.params.ell();
        let psi: Vec<f64> = self
            .basis
            .iter()
            .map(|idx| f(&idx.iter().map(|&i| self.grid.node(i, ell)).collect::<Vec<_>>()))
            .collect();
        let h = &self.matrix * nalgebra::DVector::from_column_slice(&psi);
        (psi, h.as_slice().to_vec())
    }
}

/// `g(m+m′)(gmm′−1)/2`.
pub fn coupling_constant(m: f64, m_prime: f64, g: f64) -> f64 {
    g * (m + m_prime) * (g * m * m_prime - 1.0) / 2.0
}

/// `H_{N;g}` on the grid.
pub fn build_ecs(n: usize, g: f64, params: &EllipticParams, grid: &QuantumGrid) -> Result<GridOperator> {
    build_generalized(&SectorSpec::new([n, 0, 0, 0], g, *params)?, grid)
}

pub fn build_generalized(sector: &SectorSpec, grid: &QuantumGrid) -> Result<GridOperator> {
    sector.validate()?;
    let axes = sector.axes();
    let params = sector.params;
    let ctl = SeriesControl::default();
    let g = sector.g;
    let m = grid.points;
    let h = grid.spacing(params.ell());

    let pairs: Vec<(usize, usize, bool, f64)> = (0..axes.len())
        .flat_map(|a| (a + 1..axes.len()).map(move |b| (a, b)))
        .map(|(a, b)| {
            let same = axes[a].chirality() == axes[b].chirality();
            (a, b, same, coupling_constant(axes[a].mass(g), axes[b].mass(g), g))
        })
        .collect();
    if !grid.exclusion {
        if let Some(&(a, b, ..)) = pairs.iter().find(|p| p.2) {
            return Err(Error::PoleOnGrid(format!("axes {a} and {b} share grid nodes on the diagonal")));
        }
    }

    let basis: Vec<Vec<usize>> = tuples(m, axes.len())
        .filter(|idx| pairs.iter().all(|&(a, b, same, _)| !same || idx[a] != idx[b]))
        .collect();
    let dim = basis.len();
    if dim > DIMENSION_CAP {
        return Err(Error::DimensionCap { dim, cap: DIMENSION_CAP });
    }
    let lookup: HashMap<&[usize], usize> = basis.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();

    // Pair potentials depend only on the index difference modulo M.
    let mut wp = vec![0.0; m];
    let mut wp_shift = vec![0.0; m];
    for d in 0..m {
        if d != 0 {
            wp[d] = elliptic::wp1_real(d as f64 * h, &params, &ctl)?;
        }
        wp_shift[d] = elliptic::wp1_shifted(d as f64 * h, &params, &ctl)?;
    }

    let counts = [sector.n1, sector.m1, sector.n2, sector.m2];
    let mut constant = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        if c > 0 {
            constant += if k % 2 == 0 {
                elliptic::c_const(c, g, &params, &ctl)?
            } else {
                -g * elliptic::c_const(c, 1.0 / g, &params, &ctl)?
            };
        }
    }

    let stencil = grid.second_derivative(params.ell());
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut neighbour = vec![0; axes.len()];
    for (row, idx) in basis.iter().enumerate() {
        let mut diag = constant;
        for &(p, q, same, c) in &pairs {
            let d = (idx[p] + m - idx[q]) % m;
            diag += c * if same { wp[d] } else { wp_shift[d] };
        }
        a[(row, row)] += diag;
        for (axis, species) in axes.iter().enumerate() {
            let kin = -0.5 / species.mass(g);
            neighbour.copy_from_slice(idx);
            for &(off, w) in &stencil {
                neighbour[axis] = (idx[axis] + off) % m;
                if let Some(&col) = lookup.get(neighbour.as_slice()) {
                    a[(row, col)] += kin * w;
                }
            }
        }
    }

    Ok(GridOperator { matrix: a, basis, axes, grid: *grid, params, constant })
}

fn tuples(m: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..m.pow(n as u32)).map(move |mut k| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = k % m;
            k /= m;
        }
        t
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapReport {
    pub max_difference: f64,
    pub dim: usize,
}

/// Compares `sector` with its `+ ↔ −` swapped sector after permuting axes.
pub fn swap_symmetry_check(sector: &SectorSpec, grid: &QuantumGrid) -> Result<SwapReport> {
    let a = build_generalized(sector, grid)?;
    let b = build_generalized(&sector.swapped(), grid)?;
    if a.dim() != b.dim() {
        return Err(Error::GridMismatch(format!("swapped sector has dimension {} vs {}", b.dim(), a.dim())));
    }
    // Axis order in `a` is [x, x̃, y, ỹ]; in `b` it is [y, ỹ, x, x̃].
    let plus = sector.n1 + sector.m1;
    let permute = |t: &[usize]| -> Vec<usize> { t[plus..].iter().chain(&t[..plus]).copied().collect() };
    let lookup: HashMap<&[usize], usize> = b.basis.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let map: Vec<usize> = a
        .basis
        .iter()
        .map(|t| lookup.get(permute(t).as_slice()).copied().ok_or_else(|| Error::GridMismatch("basis mismatch".into())))
        .collect::<Result<_>>()?;
    let mut max_difference: f64 = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            max_difference = max_difference.max((a.matrix[(i, j)] - b.matrix[(map[i], map[j])]).abs());
        }
    }
    Ok(SwapReport { max_difference, dim: a.dim() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Lowest eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Largest `‖Aψ − λψ‖/‖ψ‖` over the returned pairs.
    pub max_residual: f64,
}

/// Lowest `k` eigenvalues of the (symmetrized) operator.
pub fn diagonalize(op: &GridOperator, k: usize) -> Result<Spectrum> {
    let dim = op.dim();
    if dim > DIMENSION_CAP {
        return Err(Error::DimensionCap { dim, cap: DIMENSION_CAP });
    }
    let sym = (&op.matrix + op.matrix.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut max_residual: f64 = 0.0;
    let values = order
        .iter()
        .take(k)
        .map(|&i| {
            let v = eig.eigenvectors.column(i);
            let r = (&op.matrix * v - v * eig.eigenvalues[i]).norm() / v.norm();
            max_residual = max_residual.max(r);
            eig.eigenvalues[i]
        })
        .collect();
    Ok(Spectrum { values, max_residual })
}
