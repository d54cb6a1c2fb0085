use crate::config::*;
use crate::error::CliError;
use crate::output::{Check, RunWriter, Table};
use ncilw_core::cms::{cms_energy, leapfrog, CmsCase, PhaseState};
use ncilw_core::elliptic::{self, EllipticParams, SeriesControl};
use ncilw_core::pde::{EquationKind, EquationSpec, Invariants, Model, RunOutput, SimState, Solver, SolverConfig};
use ncilw_core::pole::{HalfPlane, PoleAnsatz, PoleState};
use ncilw_core::quantum::{self, QuantumGrid, SectorSpec, Stencil};
use ncilw_core::spectral::{build_multipliers, closed_form_symbol, Field, OperatorId, PeriodicGrid};
use num_complex::Complex64;
use std::f64::consts::PI;

fn invalid(e: ncilw_core::Error) -> CliError {
    match e {
        ncilw_core::Error::InvalidParameter(msg) => CliError::Config(msg),
        other => CliError::Numerical(other),
    }
}

pub fn eval(cfg: &EvalConfig, w: &mut RunWriter) -> Result<(), CliError> {
    let p = cfg.params()?;
    let ctl = SeriesControl::default();
    let z = Complex64::new(cfg.x, cfg.x_im);
    let value = match cfg.function {
        EvalFunction::Wp1 => elliptic::wp1(z, &p, &ctl)?,
        EvalFunction::Wp1Prime => elliptic::wp1_prime(z, &p, &ctl)?,
        EvalFunction::Zeta1 => elliptic::zeta1(z, &p, &ctl)?,
        EvalFunction::Wp1Shifted => Complex64::new(elliptic::wp1_shifted(cfg.x, &p, &ctl)?, 0.0),
        EvalFunction::CConst => Complex64::new(elliptic::c_const(cfg.n, cfg.g, &p, &ctl).map_err(invalid)?, 0.0),
    };
    println!("{:?}(x = {} + {}i; ell = {}, delta = {})", cfg.function, cfg.x, cfg.x_im, cfg.ell, cfg.delta);
    println!("  re = {:.15e}", value.re);
    println!("  im = {:.15e}", value.im);
    w.summarize("re", value.re);
    w.summarize("im", value.im);
    Ok(())
}

pub fn operator_test(cfg: &OperatorTestConfig, w: &mut RunWriter) -> Result<(), CliError> {
    let p = cfg.params()?;
    let ctl = SeriesControl::default();
    let grid = PeriodicGrid::new(cfg.m_points, cfg.ell).map_err(invalid)?;
    let ops = [(OperatorId::Hilbert, "H"), (OperatorId::T, "T"), (OperatorId::TTilde, "Ttilde")];
    for (op, name) in ops {
        let table = build_multipliers(op, grid, &p, &ctl)?;
        let mut csv = Table::new(["n", "k", "re_sigma", "im_sigma"]);
        let mut worst: f64 = 0.0;
        for (n, k, re, im) in table.rows() {
            csv.push(vec![n as f64, k, re, im]);
            // The Nyquist mode is zeroed by convention.
            if 2 * n.unsigned_abs() as usize != cfg.m_points {
                worst = worst.max((Complex64::new(re, im) - closed_form_symbol(op, k, &p)).norm());
            }
        }
        w.table(&format!("multipliers_{name}.csv"), &csv)?;
        w.check(Check::below(format!("oracle_agreement_{name}"), worst, cfg.oracle_tol));
        println!("  {name:<7} max |σ_oracle − σ_closed| = {worst:.3e}");
    }

    let (mut t_minus_h, mut ttilde): (f64, f64) = (0.0, 0.0);
    for idx in 0..cfg.m_points {
        let k = grid.wavenumber(idx);
        if k == 0.0 || idx == grid.nyquist_slot() {
            continue;
        }
        let h = closed_form_symbol(OperatorId::Hilbert, k, &p);
        t_minus_h = t_minus_h.max((closed_form_symbol(OperatorId::T, k, &p) - h).norm());
        ttilde = ttilde.max(closed_form_symbol(OperatorId::TTilde, k, &p).norm());
    }
    let ratio = cfg.delta / cfg.ell;
    println!("  δ/ℓ = {ratio}: max |σ_T − σ_H| = {t_minus_h:.3e}, max |σ_T̃| = {ttilde:.3e}");
    w.summarize("delta_over_ell", ratio);
    w.summarize("t_minus_h", t_minus_h);
    w.summarize("ttilde_max", ttilde);
    if ratio >= cfg.limit_ratio {
        w.check(Check::below("t_to_h", t_minus_h, cfg.limit_tol));
        w.check(Check::below("ttilde_to_zero", ttilde, cfg.limit_tol));
    }
    Ok(())
}

fn preset_fields(cfg: &SimulateConfig, grid: PeriodicGrid) -> (Field, Field) {
    let (a, ell) = (cfg.amplitude, cfg.ell);
    match cfg.preset {
        Preset::SingleMode => {
            let k = PI / ell;
            (grid.sample(|x| a * (k * x).cos()), grid.sample(|x| a * (k * x).sin()))
        }
        Preset::GaussianBump => {
            let w = ell / 6.0;
            (grid.sample(|x| a * (-(x / w).powi(2)).exp()), grid.sample(|x| 0.5 * a * (-(x / w).powi(2)).exp()))
        }
        Preset::SolitonApproximant => {
            let w = ell / 8.0;
            let f = grid.sample(|x| a / (x / w).cosh().powi(2));
            (f.clone(), f)
        }
    }
}

fn invariant_table(inv: &[Invariants]) -> Table {
    let mut t = Table::new(["t", "mass_u", "mass_v", "momentum", "energy"]);
    for i in inv {
        t.push(vec![i.t, i.mass_u, i.mass_v, i.momentum, i.energy]);
    }
    t
}

fn state_table(s: &SimState) -> Table {
    let nodes = s.u.grid().nodes();
    match &s.v {
        Some(v) => {
            let mut t = Table::new(["x", "u", "v"]);
            for ((x, u), v) in nodes.iter().zip(s.u.values()).zip(v.values()) {
                t.push(vec![*x, *u, *v]);
            }
            t
        }
        None => {
            let mut t = Table::new(["x", "u"]);
            for (x, u) in nodes.iter().zip(s.u.values()) {
                t.push(vec![*x, *u]);
            }
            t
        }
    }
}

fn drift_checks(cfg: &SimulateConfig, out: &RunOutput, w: &mut RunWriter) {
    let (Some(first), Some(last)) = (out.invariants.first(), out.invariants.last()) else {
        return;
    };
    let mass = (last.mass_u - first.mass_u).abs().max((last.mass_v - first.mass_v).abs())
        / first.mass_u.abs().max(first.mass_v.abs()).max(1.0);
    let energy = (last.energy - first.energy).abs() / first.energy.abs().max(1.0);
    w.summarize("mass_drift", mass);
    w.summarize("energy_drift", energy);
    w.summarize("momentum_drift", (last.momentum - first.momentum).abs());
    w.check(Check::below("mass_drift", mass, cfg.mass_tol));
    w.check(Check::below("energy_drift", energy, cfg.energy_tol));
    println!("  t = {}: mass drift {mass:.3e}, energy drift {energy:.3e}", last.t);
}

pub fn simulate(cfg: &SimulateConfig, w: &mut RunWriter) -> Result<(), CliError> {
    let p = cfg.params()?;
    let grid = PeriodicGrid::new(cfg.m_points, cfg.ell).map_err(invalid)?;
    let mut spec = EquationSpec::new(cfg.equation, p);
    spec = match cfg.equation {
        EquationKind::KdV => spec.with_kdv_delta(cfg.kdv_delta).map_err(invalid)?,
        EquationKind::NcIlw => spec.with_coupling(cfg.coupling).map_err(invalid)?,
        _ => spec,
    };
    let model = Model::new(spec, grid)?;
    let mut sc = SolverConfig::for_duration(cfg.t_end, cfg.dt).map_err(invalid)?;
    sc.dealias = cfg.dealias;
    sc.invariant_every = cfg.invariant_every;
    sc.snapshot_every = cfg.snapshot_every;
    sc.check_guards = cfg.check_guards;
    let solver = Solver::new(model, sc)?;

    let (u, v) = preset_fields(cfg, grid);
    let initial = if cfg.equation.is_chiral() { SimState::chiral(u) } else { SimState::pair(u, v)? };
    let (out, err) = solver.run_partial(&initial);

    w.table("invariants.csv", &invariant_table(&out.invariants))?;
    if let Some(last) = out.snapshots.last() {
        w.table("final_state.csv", &state_table(last))?;
        w.summarize("t_reached", last.t);
    }
    if cfg.snapshot_every > 0 {
        for (i, s) in out.snapshots.iter().enumerate() {
            w.table(&format!("snapshot_{i:04}.csv"), &state_table(s))?;
        }
    }
    w.summarize("steps_requested", sc.n_steps);
    match err {
        Some(e) => {
            println!("  stopped early: {e}");
            Err(e.into())
        }
        None => {
            drift_checks(cfg, &out, w);
            Ok(())
        }
    }
}

pub fn cms(cfg: &CmsConfig, w: &mut RunWriter) -> Result<(), CliError> {
    let case = CmsCase::new(cfg.case, Some(cfg.params()?)).map_err(invalid)?;
    let mut s = PhaseState::new(cfg.positions.clone(), cfg.momenta.clone()).map_err(invalid)?;
    let n = s.len();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=n).map(|i| format!("x_{i}")))
        .chain((1..=n).map(|i| format!("p_{i}")))
        .chain(std::iter::once("energy".to_string()))
        .collect();
    let mut traj = Table::new(header);
    let e0 = cms_energy(&s, &case, cfg.g2)?;
    let p0 = s.total_momentum();
    let row = |t: f64, s: &PhaseState, e: f64| -> Vec<f64> {
        std::iter::once(t).chain(s.x.iter().copied()).chain(s.p.iter().copied()).chain(std::iter::once(e)).collect()
    };
    traj.push(row(0.0, &s, e0));
    let mut done = 0;
    let mut result = Ok(());
    while done < cfg.n_steps {
        let chunk = cfg.record_every.min(cfg.n_steps - done);
        match leapfrog(&s, &case, cfg.g2, cfg.dt, chunk) {
            Ok(next) => s = next,
            Err(e) => {
                result = Err(e);
                break;
            }
        }
        done += chunk;
        let e = cms_energy(&s, &case, cfg.g2)?;
        traj.push(row(done as f64 * cfg.dt, &s, e));
    }
    w.table("trajectory.csv", &traj)?;
    result?;
    let e1 = cms_energy(&s, &case, cfg.g2)?;
    let drift = (e1 - e0).abs() / e0.abs().max(1e-300);
    let mom = (s.total_momentum() - p0).abs();
    w.summarize("energy_drift", drift);
    w.summarize("momentum_drift", mom);
    w.check(Check::below("energy_drift", drift, cfg.energy_tol));
    w.check(Check::below("momentum_drift", mom, cfg.momentum_tol));
    println!("  {:?}, N = {n}, {} steps: energy drift {drift:.3e}, momentum drift {mom:.3e}", cfg.case, cfg.n_steps);
    Ok(())
}

fn steps(t_end: f64, dt: f64, what: &str) -> Result<usize, CliError> {
    let n = (t_end / dt).round();
    if (n * dt - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(CliError::Schema { path: what.into(), message: format!("t_end = {t_end} is not a multiple of {dt}") });
    }
    Ok(n as usize)
}

pub fn pole_check(cfg: &PoleCheckConfig, w: &mut RunWriter) -> Result<(), CliError> {
    let ansatz = PoleAnsatz::new(cfg.ell, cfg.offset).map_err(invalid)?;
    let half = match cfg.half_plane {
        HalfPlaneName::Upper => HalfPlane::Upper,
        HalfPlaneName::Lower => HalfPlane::Lower,
    };
    let poles: Vec<Complex64> = cfg.poles.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    let state = ansatz.state(poles, half)?;
    // δ does not enter the BO equation.
    let params = EllipticParams::new(cfg.ell, 1.0)?;
    let grid = PeriodicGrid::new(cfg.m_points, cfg.ell).map_err(invalid)?;
    let model = Model::new(EquationSpec::new(EquationKind::Bo, params), grid)?;

    let n_pole = steps(cfg.t_end, cfg.pole_dt, "pole_dt")?;
    let n_pde = steps(cfg.t_end, cfg.pde_dt, "pde_dt")?;

    let npoles = state.poles.len();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=npoles).flat_map(|i| [format!("re_a{i}"), format!("im_a{i}")]))
        .collect();
    let mut traj = Table::new(header);
    let row = |s: &PoleState| -> Vec<f64> {
        std::iter::once(s.t).chain(s.poles.iter().flat_map(|a| [a.re, a.im])).collect()
    };
    traj.push(row(&state));
    let residual0 = ansatz.bo_residual(&state, &model)?;
    let mut s = state.clone();
    let mut done = 0;
    while done < n_pole {
        let chunk = cfg.record_every.min(n_pole - done);
        s = ansatz.evolve(&s, cfg.pole_dt, chunk)?;
        done += chunk;
        traj.push(row(&s));
    }
    w.table("poles.csv", &traj)?;
    let residual1 = ansatz.bo_residual(&s, &model)?;
    let defect = ansatz.constraint_defect(&s);

    let solver = Solver::new(model, SolverConfig::new(cfg.pde_dt, n_pde)?)?;
    let out = solver.run(&SimState::chiral(ansatz.field(&state, &grid)?))?;
    let pde = &out.snapshots.last().expect("final snapshot").u;
    let exact = ansatz.field(&s, &grid)?;
    let mut fields = Table::new(["x", "u_poles", "u_pde"]);
    let mut mismatch: f64 = 0.0;
    for ((x, a), b) in grid.nodes().iter().zip(exact.values()).zip(pde.values()) {
        fields.push(vec![*x, *a, *b]);
        mismatch = mismatch.max((a - b).abs());
    }
    w.table("final_fields.csv", &fields)?;

    let residual = residual0.max(residual1);
    w.summarize("residual_initial", residual0);
    w.summarize("residual_final", residual1);
    w.summarize("constraint_defect", defect);
    w.summarize("pde_mismatch", mismatch);
    w.check(Check::below("bo_residual", residual, cfg.residual_tol));
    w.check(Check::below("pde_match", mismatch, cfg.match_tol));
    println!("  N = {npoles}: BO residual {residual:.3e}, |u_poles − u_pde| = {mismatch:.3e} at t = {}", cfg.t_end);
    Ok(())
}

pub fn quantum(cfg: &QuantumConfig, w: &mut RunWriter) -> Result<(), CliError> {
    let sector = SectorSpec::new(cfg.counts, cfg.g, cfg.params()?).map_err(invalid)?;
    let stencil = match cfg.stencil {
        StencilName::SecondOrder => Stencil::SecondOrder,
        StencilName::FourthOrder => Stencil::FourthOrder,
        StencilName::Spectral => Stencil::Spectral,
    };
    let mut table = Table::new(["points", "dim", "index", "eigenvalue"]);
    let mut ground = Vec::new();
    let mut worst_sym: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for &m in &cfg.grids {
        let grid = QuantumGrid::new(m, stencil).map_err(invalid)?;
        let op = quantum::build_generalized(&sector, &grid)?;
        worst_sym = worst_sym.max(op.asymmetry());
        let spec = quantum::diagonalize(&op, cfg.n_eigen)?;
        worst_res = worst_res.max(spec.max_residual);
        for (i, e) in spec.values.iter().enumerate() {
            table.push(vec![m as f64, op.dim() as f64, i as f64, *e]);
        }
        ground.push((m, spec.values[0]));
        println!("  M = {m:>3} (dim {:>4}): E0 = {:.12}", op.dim(), spec.values[0]);
    }
    w.table("eigenvalues.csv", &table)?;
    w.check(Check::below("symmetry", worst_sym, cfg.symmetry_tol));
    w.check(Check::below("eigen_residual", worst_res, cfg.residual_tol));

    let last_change = (ground.len() >= 2).then(|| (ground[ground.len() - 1].1 - ground[ground.len() - 2].1).abs());
    if let (Some(tol), Some(change)) = (cfg.convergence_tol, last_change) {
        w.check(Check::below("ground_state_convergence", change, tol));
    }
    let swap = quantum::swap_symmetry_check(&sector, &QuantumGrid::new(cfg.grids[0], stencil).map_err(invalid)?)?;
    w.check(Check::below("family_swap", swap.max_difference, cfg.symmetry_tol));
    let report = serde_json::json!({
        "ground_state": ground.iter().map(|(m, e)| serde_json::json!({"points": m, "eigenvalue": e})).collect::<Vec<_>>(),
        "finest_change": last_change,
        "max_asymmetry": worst_sym,
        "max_residual": worst_res,
        "swap_difference": swap.max_difference,
    });
    w.json("convergence.json", &report)?;
    w.summarize("finest_change", last_change);
    Ok(())
}
