use super::grid::{Field, Fourier, PeriodicGrid};
use super::multipliers::{build_multipliers, MultiplierTable, OperatorId};
use crate::elliptic::{EllipticParams, SeriesControl};
use crate::error::{Error, Result};

/// Relative size of the mean tolerated by [`SpectralOps::cal_t`].
pub const ZERO_MEAN_TOL: f64 = 1e-10;

/// The periodic operators `H`, `T`, `T̃` on one grid, tabulated once.
#[derive(Debug, Clone)]
pub struct SpectralOps {
    fourier: Fourier,
    params: EllipticParams,
    hilbert: MultiplierTable,
    t: MultiplierTable,
    ttilde: MultiplierTable,
}

impl SpectralOps {
    pub fn new(grid: PeriodicGrid, params: &EllipticParams, ctl: &SeriesControl) -> Result<Self> {
        Ok(Self {
            fourier: Fourier::new(grid),
            params: *params,
            hilbert: build_multipliers(OperatorId::Hilbert, grid, params, ctl)?,
            t: build_multipliers(OperatorId::T, grid, params, ctl)?,
            ttilde: build_multipliers(OperatorId::TTilde, grid, params, ctl)?,
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.fourier.grid()
    }

    pub fn fourier(&self) -> &Fourier {
        &self.fourier
    }

    pub fn params(&self) -> &EllipticParams {
        &self.params
    }

    pub fn table(&self, op: OperatorId) -> Option<&MultiplierTable> {
        match op {
            OperatorId::Hilbert => Some(&self.hilbert),
            OperatorId::T => Some(&self.t),
            OperatorId::TTilde => Some(&self.ttilde),
            _ => None,
        }
    }

    pub fn deriv(&self, f: &Field) -> Result<Field> {
        self.fourier.deriv(f)
    }

    pub fn hilbert(&self, f: &Field) -> Result<Field> {
        self.hilbert.apply(&self.fourier, f)
    }

    pub fn t_op(&self, f: &Field) -> Result<Field> {
        self.t.apply(&self.fourier, f)
    }

    pub fn ttilde_op(&self, f: &Field) -> Result<Field> {
        self.ttilde.apply(&self.fourier, f)
    }

    /// The block operator `[[T, T̃], [−T̃, −T]]` on a zero-mean pair.
    pub fn cal_t(&self, f: &Field, g: &Field) -> Result<(Field, Field)> {
        for h in [f, g] {
            let mean = h.mean();
            if mean.abs() > ZERO_MEAN_TOL * h.max_abs().max(1.0) {
                return Err(Error::NonZeroMean { mean });
            }
        }
        let (tf, tg) = (self.t_op(f)?, self.t_op(g)?);
        let (sf, sg) = (self.ttilde_op(f)?, self.ttilde_op(g)?);
        let top = tf.values.iter().zip(&sg.values).map(|(a, b)| a + b).collect();
        let bottom = sf.values.iter().zip(&tg.values).map(|(a, b)| -a - b).collect();
        Ok((Field { grid: *self.grid(), values: top }, Field { grid: *self.grid(), values: bottom }))
    }
}
