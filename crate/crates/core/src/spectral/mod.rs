//! Periodic pseudospectral infrastructure on `[−ℓ, ℓ)`.

mod grid;
mod multipliers;
mod ops;
mod quadrature;

pub use grid::{deriv, from_spectrum, to_spectrum, Field, Fourier, PeriodicGrid, Spectrum};
pub use multipliers::{
    build_multipliers, closed_form_symbol, dispersion_omega, DispersionKind, MultiplierTable, OperatorId,
    DIAGONAL_TOL,
};
pub use ops::{SpectralOps, ZERO_MEAN_TOL};
pub use quadrature::{pv_quadrature, PvKernel, PvOracle, TrigInterpolant, DEFAULT_REFINEMENT};
