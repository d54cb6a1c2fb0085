use ncilw_core::elliptic::{EllipticParams, SeriesControl};
use ncilw_core::spectral::*;
use ncilw_core::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

/// Random real field with modes `1..=band` (zero mean).
fn band_limited(grid: PeriodicGrid, band: usize, rng: &mut ChaCha8Rng) -> Field {
    let ell = grid.ell();
    let amps: Vec<(f64, f64)> = (1..=band).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    grid.sample(|x| {
        amps.iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64 * PI / ell;
                a * (k * x).cos() + b * (k * x).sin()
            })
            .sum()
    })
}

fn max_diff(a: &Field, b: &Field) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn cosine_has_single_pair_of_coefficients() {
    let grid = PeriodicGrid::new(32, 2.0).unwrap();
    let s = to_spectrum(&grid.sample(|x| (PI * x / 2.0).cos()));
    for idx in 0..32 {
        let n = grid.mode(idx);
        let expected = if n.abs() == 1 { 0.5 } else { 0.0 };
        assert!((s.coeffs()[idx] - Complex64::new(expected, 0.0)).norm() < 1e-15, "n = {n}");
    }
}

#[test]
fn round_trip_and_parseval() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = PeriodicGrid::new(128, 3.0).unwrap();
    let f = Field::new(grid, (0..128).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    let s = to_spectrum(&f);
    let back = from_spectrum(&s);
    assert!(max_diff(&f, &back) < 1e-13 * f.max_abs());

    // Hermitian symmetry for real input.
    for n in 1..64 {
        assert!((s.get(n) - s.get(-n).conj()).norm() < 1e-15);
    }
    let direct = f.inner(&f).unwrap();
    let coeff: f64 = s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * 2.0 * grid.ell();
    assert!((direct - coeff).abs() < 1e-12 * direct);
}

#[test]
fn spectrum_rejects_wrong_length() {
    let grid = PeriodicGrid::new(8, 1.0).unwrap();
    assert!(matches!(Spectrum::new(grid, vec![Complex64::new(0.0, 0.0); 6]), Err(Error::GridMismatch(_))));
    assert!(matches!(Field::new(grid, vec![0.0; 7]), Err(Error::GridMismatch(_))));
    assert!(PeriodicGrid::new(7, 1.0).is_err());
}

#[test]
fn derivative_basics() {
    let grid = PeriodicGrid::new(64, 1.5).unwrap();
    let k = PI / 1.5;
    let d = deriv(&grid.sample(|x| (k * x).sin()));
    assert!(max_diff(&d, &grid.sample(|x| k * (k * x).cos())) < 1e-12);
    assert!(deriv(&grid.sample(|_| 4.2)).max_abs() < 1e-14);
}

#[test]
fn derivative_matches_sixth_order_difference() {
    // A coarse band on a fine grid keeps the FD truncation error below 1e−8.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = PeriodicGrid::new(1024, 1.0).unwrap();
    let f = band_limited(grid, 4, &mut rng);
    let d = deriv(&f);
    let h = grid.spacing();
    let v = f.values();
    let m = v.len();
    let w = [(1, 45.0), (2, -9.0), (3, 1.0)];
    for j in 0..m {
        let fd: f64 = w.iter().map(|&(s, c)| c * (v[(j + s) % m] - v[(j + m - s) % m])).sum::<f64>() / (60.0 * h);
        assert!((fd - d.values()[j]).abs() < 1e-8, "node {j}");
    }
}

#[test]
fn quadrature_trivial_cases() {
    let p = EllipticParams::new(1.0, 0.5).unwrap();
    let grid = PeriodicGrid::new(16, 1.0).unwrap();
    let one = grid.sample(|_| 1.0);
    for node in [0, 5, 11] {
        let h = pv_quadrature(PvKernel::HilbertCot, &one, node, &p, &ctl()).unwrap();
        assert!(h.abs() < 1e-14);
        let z = pv_quadrature(PvKernel::Zeta, &one, node, &p, &ctl()).unwrap();
        assert!(z.abs() < 1e-13);
    }
    // T̃ maps a constant to −i times that constant.
    let oracle = PvOracle::new(PvKernel::ZetaShifted, grid, &p, &ctl(), 4).unwrap();
    let c = oracle.apply_field(&one, 3).unwrap();
    assert!((c - Complex64::new(0.0, -1.0)).norm() < 1e-12, "{c}");
}

#[test]
fn zeta_quadrature_reference_values() {
    // Pinned by the quadrature itself, checked across refinement levels.
    let p = EllipticParams::new(1.0, 0.5).unwrap();
    let grid = PeriodicGrid::new(16, 1.0).unwrap();
    let f = grid.sample(|x| (PI * x).cos());
    let at_zero = pv_quadrature(PvKernel::Zeta, &f, 8, &p, &ctl()).unwrap();
    assert!(at_zero.abs() < 1e-13, "{at_zero}");
    let at_quarter = pv_quadrature(PvKernel::Zeta, &f, 4, &p, &ctl()).unwrap();
    let refined = PvOracle::new(PvKernel::Zeta, grid, &p, &ctl(), 16).unwrap().apply_field(&f, 4).unwrap().re;
    assert!((at_quarter - refined).abs() < 1e-12);
    assert!((at_quarter - 1.090_331_410_6).abs() < 1e-9, "{at_quarter}");
}

#[test]
fn oracle_fit_matches_closed_forms() {
    for &(ell, delta) in &[(1.0, 0.5), (2.0, 0.3), (1.0, 3.0)] {
        let p = EllipticParams::new(ell, delta).unwrap();
        let grid = PeriodicGrid::new(64, ell).unwrap();
        for op in [OperatorId::Hilbert, OperatorId::T, OperatorId::TTilde] {
            let table = build_multipliers(op, grid, &p, &ctl()).unwrap();
            assert_eq!(table.get(0), Complex64::new(0.0, 0.0));
            assert_eq!(table.get(-32), Complex64::new(0.0, 0.0));
            for n in 1..32 {
                let k = n as f64 * PI / ell;
                let s = table.get(n);
                assert_eq!(s.re, 0.0);
                assert_eq!(table.get(-n), -s);
                let cf = closed_form_symbol(op, k, &p);
                assert!((s - cf).norm() < 1e-10 * cf.norm().max(1.0), "{op} n={n}: {s} vs {cf}");
            }
        }
    }
}

#[test]
fn hilbert_symbol_is_unimodular() {
    let p = EllipticParams::new(1.0, 1.0).unwrap();
    let table = build_multipliers(OperatorId::Hilbert, PeriodicGrid::new(128, 1.0).unwrap(), &p, &ctl()).unwrap();
    for n in 1..64 {
        assert!((table.get(n).norm() - 1.0).abs() < 1e-12);
        assert!(table.get(n).im > 0.0);
    }
}

#[test]
fn involutions_and_antisymmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = EllipticParams::new(1.0, 0.4).unwrap();
    let grid = PeriodicGrid::new(64, 1.0).unwrap();
    let ops = SpectralOps::new(grid, &p, &ctl()).unwrap();
    for _ in 0..10 {
        let f = band_limited(grid, 20, &mut rng);
        let g = band_limited(grid, 20, &mut rng);
        let hh = ops.hilbert(&ops.hilbert(&f).unwrap()).unwrap();
        assert!(hh.values().iter().zip(f.values()).all(|(a, b)| (a + b).abs() < 1e-12));
        let (a, b) = ops.cal_t(&f, &g).unwrap();
        let (aa, bb) = ops.cal_t(&a, &b).unwrap();
        assert!(max_diff(&aa, &f.clone().scaled(-1.0)) < 1e-10);
        assert!(max_diff(&bb, &g.clone().scaled(-1.0)) < 1e-10);

        for apply in [SpectralOps::hilbert, SpectralOps::t_op, SpectralOps::ttilde_op] {
            let lhs = f.inner(&apply(&ops, &g).unwrap()).unwrap();
            let rhs = apply(&ops, &f).unwrap().inner(&g).unwrap();
            assert!((lhs + rhs).abs() < 1e-10);
        }
    }
    let zero = Field::zeros(grid);
    let (a, b) = ops.cal_t(&zero, &zero).unwrap();
    assert_eq!(a.max_abs() + b.max_abs(), 0.0);
    let one = grid.sample(|_| 1.0);
    assert!(matches!(ops.cal_t(&one, &zero), Err(Error::NonZeroMean { .. })));
    assert!(ops.t_op(&one).unwrap().max_abs() < 1e-15);
    assert!(ops.ttilde_op(&ops.deriv(&ops.deriv(&one).unwrap()).unwrap()).unwrap().max_abs() < 1e-15);
}

#[test]
fn operators_commute_with_node_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = EllipticParams::new(1.0, 0.7).unwrap();
    let grid = PeriodicGrid::new(32, 1.0).unwrap();
    let ops = SpectralOps::new(grid, &p, &ctl()).unwrap();
    let f = Field::new(grid, (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    let shift = |f: &Field| {
        let mut v = f.values().to_vec();
        v.rotate_right(1);
        Field::new(grid, v).unwrap()
    };
    for apply in [SpectralOps::hilbert, SpectralOps::t_op, SpectralOps::ttilde_op, SpectralOps::deriv] {
        let a = shift(&apply(&ops, &f).unwrap());
        let b = apply(&ops, &shift(&f)).unwrap();
        assert!(max_diff(&a, &b) < 1e-11);
    }
}

#[test]
fn spectral_agrees_with_quadrature() {
    let p = EllipticParams::new(1.0, 0.5).unwrap();
    let grid = PeriodicGrid::new(32, 1.0).unwrap();
    let ops = SpectralOps::new(grid, &p, &ctl()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = band_limited(grid, 8, &mut rng);
    let oracles = [
        (PvKernel::HilbertCot, ops.hilbert(&f).unwrap()),
        (PvKernel::Zeta, ops.t_op(&f).unwrap()),
        (PvKernel::ZetaShifted, ops.ttilde_op(&f).unwrap()),
    ];
    for (kernel, spectral) in &oracles {
        let oracle = PvOracle::new(*kernel, grid, &p, &ctl(), DEFAULT_REFINEMENT).unwrap();
        for node in 0..32 {
            let q = oracle.apply_field(&f, node).unwrap().re;
            assert!((q - spectral.values()[node]).abs() < 1e-6, "{kernel:?} node {node}");
        }
    }
}

#[test]
fn deep_limit_and_monotone_degeneration() {
    let grid = PeriodicGrid::new(64, 1.0).unwrap();
    let gap = |ratio: f64| {
        let p = EllipticParams::new(1.0, ratio).unwrap();
        let h = build_multipliers(OperatorId::Hilbert, grid, &p, &ctl()).unwrap();
        let t = build_multipliers(OperatorId::T, grid, &p, &ctl()).unwrap();
        let tt = build_multipliers(OperatorId::TTilde, grid, &p, &ctl()).unwrap();
        let dt = (0..64).map(|i| (t.sigma()[i] - h.sigma()[i]).norm()).fold(0.0, f64::max);
        let dtt = tt.sigma().iter().map(|s| s.norm()).fold(0.0, f64::max);
        (dt, dtt)
    };
    let (dt, dtt) = gap(50.0);
    assert!(dt < 1e-8 && dtt < 1e-8, "{dt} {dtt}");

    let gaps: Vec<_> = [2.0, 4.0, 8.0, 16.0].iter().map(|&r| gap(r)).collect();
    for w in gaps.windows(2) {
        // Beyond δ/ℓ ≈ 8 both gaps sit at round-off; only demand no growth there.
        assert!(w[1].0 < w[0].0 || w[1].0 < 1e-14, "{gaps:?}");
        assert!(w[1].1 < w[0].1 || w[1].1 < 1e-14, "{gaps:?}");
    }

    let p = EllipticParams::new(1.0, 50.0).unwrap();
    let ops = SpectralOps::new(grid, &p, &ctl()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = band_limited(grid, 10, &mut rng);
    let (a, b) = ops.cal_t(&f, &Field::zeros(grid)).unwrap();
    assert!(max_diff(&a, &ops.hilbert(&f).unwrap()) < 1e-6);
    assert!(b.max_abs() < 1e-6);
}

#[test]
fn grid_mismatch_is_reported() {
    let p = EllipticParams::new(1.0, 0.5).unwrap();
    let ops = SpectralOps::new(PeriodicGrid::new(16, 1.0).unwrap(), &p, &ctl()).unwrap();
    let other = Field::zeros(PeriodicGrid::new(32, 1.0).unwrap());
    assert!(matches!(ops.hilbert(&other), Err(Error::GridMismatch(_))));
    let wrong_ell = PeriodicGrid::new(16, 2.0).unwrap();
    assert!(matches!(SpectralOps::new(wrong_ell, &p, &ctl()), Err(Error::GridMismatch(_))));
}

#[test]
fn dispersion_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = EllipticParams::new(1.0, 0.8).unwrap();
    for _ in 0..100 {
        let k: f64 = rng.gen_range(-30.0..30.0);
        for kind in [DispersionKind::KdV, DispersionKind::Bo, DispersionKind::Ilw] {
            assert_eq!(dispersion_omega(kind, -k, &p), -dispersion_omega(kind, k, &p));
        }
    }
    // Deep water: the gap to BO is coth(kδ) − 1 − 1/(kδ), i.e. algebraic in kδ.
    for k in [1.0, 3.0, 10.0] {
        for kd in [50.0, 5e3, 5e9] {
            let p = EllipticParams::new(1.0, kd / k).unwrap();
            let ilw = dispersion_omega(DispersionKind::Ilw, k, &p);
            let bo = dispersion_omega(DispersionKind::Bo, k, &p);
            let rel = (ilw - bo).abs() / bo.abs();
            assert!((rel - 1.0 / kd).abs() < 1e-12 + 1e-9 / kd, "k={k} kδ={kd}: {rel}");
        }
    }
    // Shallow water: ILW → KdV at leading order, with relative correction (kδ)²/15.
    for &(k, d) in &[(1.0, 1e-3), (2.0, 1e-2), (-3.0, 1e-4)] {
        let p = EllipticParams::new(1.0, d).unwrap();
        let ilw = dispersion_omega(DispersionKind::Ilw, k, &p);
        let kdv = dispersion_omega(DispersionKind::KdV, k, &p);
        let x: f64 = k * d;
        assert!(((ilw - kdv) / kdv + x * x / 15.0).abs() < 1e-3 * x * x);
        let direct = -(k * k / (k * d).tanh() - k / d);
        assert!((ilw - direct).abs() < 1e-6 * direct.abs());
    }
    assert_eq!(dispersion_omega(DispersionKind::Ilw, 0.0, &p), 0.0);
}

#[test]
fn dispersion_table_has_zero_ends() {
    let p = EllipticParams::new(1.0, 0.5).unwrap();
    let grid = PeriodicGrid::new(16, 1.0).unwrap();
    let t = build_multipliers(OperatorId::Dispersion(DispersionKind::Ilw), grid, &p, &ctl()).unwrap();
    assert_eq!(t.get(0), Complex64::new(0.0, 0.0));
    assert_eq!(t.get(-8), Complex64::new(0.0, 0.0));
    let rows = t.rows();
    assert_eq!(rows.first().unwrap().0, -8);
    assert_eq!(rows.last().unwrap().0, 7);
}
