use ncilw_core::elliptic::{c_const, EllipticParams, SeriesControl};
use ncilw_core::quantum::*;
use ncilw_core::Error;
use std::f64::consts::PI;

fn params(ell: f64, delta: f64) -> EllipticParams {
    EllipticParams::new(ell, delta).unwrap()
}

fn grid(points: usize, stencil: Stencil) -> QuantumGrid {
    QuantumGrid::new(points, stencil).unwrap()
}

#[test]
fn coupling_rule_reproduces_hamiltonian_coefficients() {
    for g in [1.0, 1.5, 2.0, 3.7] {
        let t = -1.0 / g;
        assert!((coupling_constant(1.0, 1.0, g) - g * (g - 1.0)).abs() < 1e-14);
        assert!((coupling_constant(t, t, g) - (1.0 - 1.0 / g)).abs() < 1e-14);
        assert!((coupling_constant(1.0, t, g) - (1.0 - g)).abs() < 1e-14);
        assert_eq!(coupling_constant(1.0, t, g), coupling_constant(t, 1.0, g));
    }
}

#[test]
fn single_particle_is_free_with_constant_zero_mode() {
    let p = params(1.0, 0.4);
    let c = c_const(1, 2.0, &p, &SeriesControl::default()).unwrap();
    for stencil in [Stencil::SecondOrder, Stencil::FourthOrder, Stencil::Spectral] {
        let op = build_ecs(1, 2.0, &p, &grid(32, stencil)).unwrap();
        let s = diagonalize(&op, 3).unwrap();
        assert!((s.values[0] - c).abs() < 1e-10);
        // ± momentum pair at the first circle mode (π/2ℓ·2)²/2.
        assert!((s.values[1] - s.values[2]).abs() < 1e-9);
        let first = 0.5 * (PI / 1.0).powi(2);
        let tol = if stencil == Stencil::SecondOrder { 2e-2 } else { 1e-4 };
        assert!(((s.values[1] - c) - first).abs() < tol * first, "{stencil:?}: {}", s.values[1] - c);
        assert!(s.max_residual < 1e-8);
    }
}

#[test]
fn operators_are_symmetric() {
    let p = params(1.0, 0.5);
    for counts in [[2, 0, 0, 0], [1, 0, 1, 0], [1, 1, 0, 0], [0, 1, 0, 1], [1, 1, 1, 0]] {
        let sector = SectorSpec::new(counts, 2.0, p).unwrap();
        for stencil in [Stencil::SecondOrder, Stencil::FourthOrder, Stencil::Spectral] {
            let op = build_generalized(&sector, &grid(10, stencil)).unwrap();
            assert!(op.asymmetry() < 1e-12, "{counts:?} {stencil:?}: {:.2e}", op.asymmetry());
        }
    }
}

#[test]
fn generalized_reduces_to_ecs_sectors() {
    let p = params(1.0, 0.5);
    let g = 2.5;
    let q = grid(12, Stencil::FourthOrder);
    let ecs = build_ecs(2, g, &p, &q).unwrap();
    let gen = build_generalized(&SectorSpec::new([2, 0, 0, 0], g, p).unwrap(), &q).unwrap();
    assert_eq!(ecs.matrix, gen.matrix);

    let neg = build_generalized(&SectorSpec::new([0, 2, 0, 0], g, p).unwrap(), &q).unwrap();
    let scaled = build_ecs(2, 1.0 / g, &p, &q).unwrap().matrix * -g;
    let scale = scaled.amax();
    assert!((neg.matrix - scaled).amax() < 1e-12 * scale);
}

#[test]
fn opposite_chirality_pair_uses_shifted_potential() {
    let p = params(1.0, 0.5);
    let g = 2.0;
    let q = grid(8, Stencil::SecondOrder);
    let op = build_generalized(&SectorSpec::new([1, 0, 1, 0], g, p).unwrap(), &q).unwrap();
    assert_eq!(op.dim(), 64);
    let ctl = SeriesControl::default();
    let c = 2.0 * c_const(1, g, &p, &ctl).unwrap();
    let h = q.spacing(1.0);
    for (row, idx) in op.basis.iter().enumerate() {
        let d = (idx[0] as f64 - idx[1] as f64) * h;
        let v = ncilw_core::elliptic::wp1_shifted(d, &p, &ctl).unwrap();
        let kinetic = 2.0 * 1.0 / (h * h);
        let expected = kinetic + c + g * (g - 1.0) * v;
        assert!((op.matrix[(row, row)] - expected).abs() < 1e-11 * expected.abs().max(1.0));
    }
}

#[test]
fn swapping_families_leaves_the_operator_unchanged() {
    let p = params(1.0, 0.6);
    for counts in [[1, 0, 1, 0], [2, 0, 1, 0], [1, 1, 1, 0], [0, 1, 1, 1]] {
        let r = swap_symmetry_check(&SectorSpec::new(counts, 1.8, p).unwrap(), &grid(8, Stencil::FourthOrder)).unwrap();
        assert!(r.max_difference < 1e-12, "{counts:?}: {:.2e}", r.max_difference);
    }
}

#[test]
fn identical_particles_commute_with_exchange() {
    let p = params(1.0, 0.5);
    let op = build_ecs(2, 2.0, &p, &grid(12, Stencil::Spectral)).unwrap();
    let swapped: Vec<usize> = op
        .basis
        .iter()
        .map(|t| op.basis.iter().position(|s| s[0] == t[1] && s[1] == t[0]).unwrap())
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..op.dim() {
        for j in 0..op.dim() {
            worst = worst.max((op.matrix[(i, j)] - op.matrix[(swapped[i], swapped[j])]).abs());
        }
    }
    assert!(worst < 1e-12);
}

#[test]
fn trig_limit_ground_state_is_exact_for_spectral_stencil() {
    let (ell, g) = (1.0, 2.0);
    let p = params(ell, 10.0 * ell);
    let kappa = PI / (2.0 * ell);
    let exact = g * g * kappa * kappa + c_const(2, g, &p, &SeriesControl::default()).unwrap();
    let op = build_ecs(2, g, &p, &grid(16, Stencil::Spectral)).unwrap();
    let e0 = diagonalize(&op, 1).unwrap().values[0];
    assert!((e0 - exact).abs() < 1e-9, "{e0} vs {exact}");

    // The sampled |sin κ(x₁−x₂)|^g is an eigenvector of the discrete operator.
    let (psi, h_psi) = op.apply_fn(|x| (kappa * (x[0] - x[1])).sin().abs().powf(g));
    let res: f64 = psi.iter().zip(&h_psi).map(|(a, b)| (b - exact * a).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = psi.iter().map(|a| a * a).sum::<f64>().sqrt();
    assert!(res < 1e-9 * norm);
}

#[test]
fn second_order_stencil_converges_at_second_order() {
    let p = params(1.0, 10.0);
    let g = 2.0;
    let e = |m| diagonalize(&build_ecs(2, g, &p, &grid(m, Stencil::SecondOrder)).unwrap(), 1).unwrap().values[0];
    let (e1, e2, e3) = (e(12), e(24), e(48));
    let rate = ((e2 - e1) / (e3 - e2)).log2();
    assert!((rate - 2.0).abs() < 0.15, "observed rate {rate}");
    // Refinement lowers the eigenvalue monotonically.
    assert!(e1 < e2 && e2 < e3);
}

#[test]
fn builder_errors() {
    let p = params(1.0, 0.5);
    assert!(matches!(build_ecs(2, 2.0, &p, &grid(8, Stencil::SecondOrder).without_exclusion()), Err(Error::PoleOnGrid(_))));
    assert!(build_ecs(1, 2.0, &p, &grid(8, Stencil::SecondOrder).without_exclusion()).is_ok());
    assert!(matches!(build_ecs(3, 2.0, &p, &grid(20, Stencil::SecondOrder)), Err(Error::DimensionCap { .. })));
    assert!(build_ecs(4, 2.0, &p, &grid(6, Stencil::SecondOrder)).is_err());
    assert!(QuantumGrid::new(9, Stencil::Spectral).is_err());
    assert!(SectorSpec::new([1, 0, 0, 0], -1.0, p).is_err());
}
