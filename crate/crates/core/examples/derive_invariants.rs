//! Recovers the conserved quadratic and cubic functionals of the non-chiral
//! system from the equations of motion alone.
//!
//! For each candidate term `F_i` the rate `dF_i/dt = DF_i[u, v]·rhs(u, v)` is
//! taken as a central difference along the right-hand side. Stacking the rates
//! for a set of random states gives a matrix whose null space holds the
//! conserved combinations. The smallest singular vector is printed and
//! compared with the closed form used by `Model::invariants`.
//!
//! Run with `cargo run --release --example derive_invariants`.

use nalgebra::DMatrix;
use ncilw_core::elliptic::{EllipticParams, SeriesControl};
use ncilw_core::pde::{EquationKind, EquationSpec, Model};
use ncilw_core::spectral::{Field, PeriodicGrid, SpectralOps};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

type Term = (&'static str, fn(&SpectralOps, &Field, &Field) -> f64);

fn integral(f: impl Fn(f64, f64) -> f64, u: &Field, v: &Field) -> f64 {
    let h = u.grid().spacing();
    u.values().iter().zip(v.values()).map(|(&a, &b)| f(a, b)).sum::<f64>() * h
}

fn pair(ops: &SpectralOps, a: &Field, op: fn(&SpectralOps, &Field) -> ncilw_core::Result<Field>, b: &Field) -> f64 {
    let bx = ops.deriv(b).unwrap();
    a.inner(&op(ops, &bx).unwrap()).unwrap()
}

const ENERGY_TERMS: [Term; 7] = [
    ("∫u³", |_, u, v| integral(|a, _| a * a * a, u, v)),
    ("∫v³", |_, u, v| integral(|_, b| b * b * b, u, v)),
    ("∫u²v", |_, u, v| integral(|a, b| a * a * b, u, v)),
    ("∫uv²", |_, u, v| integral(|a, b| a * b * b, u, v)),
    ("⟨u,T u_x⟩", |o, u, _| pair(o, u, SpectralOps::t_op, u)),
    ("⟨v,T v_x⟩", |o, _, v| pair(o, v, SpectralOps::t_op, v)),
    ("⟨u,T̃ v_x⟩", |o, u, v| pair(o, u, SpectralOps::ttilde_op, v)),
];

const MOMENTUM_TERMS: [Term; 3] = [
    ("∫u²", |_, u, v| integral(|a, _| a * a, u, v)),
    ("∫v²", |_, u, v| integral(|_, b| b * b, u, v)),
    ("∫uv", |_, u, v| integral(|a, b| a * b, u, v)),
];

fn random_state(grid: PeriodicGrid, rng: &mut ChaCha8Rng) -> (Field, Field) {
    let mut field = || {
        let modes: Vec<(f64, f64)> = (1..=6).map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
        let mean = rng.gen_range(-0.3..0.3);
        grid.sample(|x| {
            mean + modes
                .iter()
                .enumerate()
                .map(|(n, (a, b))| {
                    let k = (n + 1) as f64 * PI / grid.ell();
                    a * (k * x).cos() + b * (k * x).sin()
                })
                .sum::<f64>()
        })
    };
    (field(), field())
}

fn shifted(f: &Field, g: &Field, eps: f64) -> Field {
    Field::new(*f.grid(), f.values().iter().zip(g.values()).map(|(a, b)| a + eps * b).collect()).unwrap()
}

/// Rate of each term along the flow, by a Richardson-extrapolated central difference.
fn rates(terms: &[Term], ops: &SpectralOps, model: &Model, u: &Field, v: &Field) -> Vec<f64> {
    let (ru, rv) = model.rhs_ncilw(u, v).unwrap();
    let central = |f: fn(&SpectralOps, &Field, &Field) -> f64, eps: f64| {
        let plus = f(ops, &shifted(u, &ru, eps), &shifted(v, &rv, eps));
        let minus = f(ops, &shifted(u, &ru, -eps), &shifted(v, &rv, -eps));
        (plus - minus) / (2.0 * eps)
    };
    terms.iter().map(|(_, f)| (4.0 * central(*f, 5e-4) - central(*f, 1e-3)) / 3.0).collect()
}

fn null_vector(terms: &[Term], ops: &SpectralOps, model: &Model, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
    let rows: Vec<Vec<f64>> =
        (0..3 * terms.len()).map(|_| {
            let (u, v) = random_state(*ops.grid(), rng);
            rates(terms, ops, model, &u, &v)
        }).collect();
    let a = DMatrix::from_fn(rows.len(), terms.len(), |i, j| rows[i][j]);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let (idx, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, s)| (i, *s))
        .unwrap();
    let smax = svd.singular_values.max();
    let next = svd.singular_values.iter().copied().filter(|&s| s > smin).fold(f64::INFINITY, f64::min);
    println!("  singular values: smallest {smin:.2e}, next {next:.2e}, largest {smax:.2e}");
    (vt.row(idx).iter().copied().collect(), smin / smax)
}

fn report(title: &str, terms: &[Term], coeffs: &[f64], normalise: usize, expected: &[f64], cond: f64) {
    let scale = expected[normalise] / coeffs[normalise];
    println!("{title}   (σ_min/σ_max = {cond:.2e})");
    for ((name, _), (c, e)) in terms.iter().zip(coeffs.iter().zip(expected)) {
        println!("  {name:<12} fitted {:>+.10}   closed form {e:>+.10}", c * scale);
    }
}

fn main() {
    let (ell, delta, coupling) = (PI, 0.7, 1.0);
    let params = EllipticParams::new(ell, delta).unwrap();
    let grid = PeriodicGrid::new(64, ell).unwrap();
    let spec = EquationSpec::new(EquationKind::NcIlw, params).with_coupling(coupling).unwrap();
    let model = Model::new(spec, grid).unwrap();
    let ops = SpectralOps::new(grid, &params, &SeriesControl::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let (e, cond) = null_vector(&ENERGY_TERMS, &ops, &model, &mut rng);
    let c = coupling;
    report("energy", &ENERGY_TERMS, &e, 0, &[1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, c / 2.0, c / 2.0, c], cond);

    let (p, cond) = null_vector(&MOMENTUM_TERMS, &ops, &model, &mut rng);
    report("momentum", &MOMENTUM_TERMS, &p, 0, &[0.5, -0.5, 0.0], cond);
}
