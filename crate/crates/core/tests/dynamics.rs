mod common;

use std::f64::consts::PI;

use common::convolve_x;
use dp_core::analysis::criterion_scan;
use dp_core::characteristics::{advance_flow, CharTracker, StageVelocities};
use dp_core::solver::{momentum, rhs, run, run_tracked, DpSystem, OutputSchedule, SolverConfig, SolverState};
use dp_core::spectral::{Grid, Interpolant, PeriodicField};

#[test]
fn rhs_against_quadrature() {
    let (kappa, grid) = (0.7, Grid::new(128).unwrap());
    let u = |x: f64| 0.4 * (2.0 * PI * x).sin() + 0.1 * (4.0 * PI * x).cos();
    let ux = |x: f64| 0.8 * PI * (2.0 * PI * x).cos() - 0.4 * PI * (4.0 * PI * x).sin();
    let source = |x: f64| 1.5 * u(x) * u(x) + 3.0 * kappa * u(x);
    let field = PeriodicField::from_fn(grid, u);
    for dealias in [false, true] {
        let r = rhs(&field, kappa, dealias);
        for (j, x) in grid.points().enumerate() {
            let want = -u(x) * ux(x) - convolve_x(&source, x);
            assert!((r.values()[j] - want).abs() < 1e-10, "dealias={dealias} x={x}");
        }
    }
}

#[test]
fn mean_is_conserved() {
    let grid = Grid::new(128).unwrap();
    let u0 = PeriodicField::from_fn(grid, |x| 0.5 + 0.3 * (2.0 * PI * x).cos());
    let cfg = SolverConfig { n: 128, kappa: -0.4, t_end: 0.5, ..Default::default() };
    let out = run(&u0, &cfg).unwrap();
    for s in &out.snapshots {
        assert!((s.state.u.mean() - u0.mean()).abs() < 1e-13);
    }
}

#[test]
fn positive_momentum_stays_positive() {
    let grid = Grid::new(128).unwrap();
    let y0 = PeriodicField::from_fn(grid, |x| 0.2 + (2.0 * PI * x).sin().powi(2));
    let u0 = dp_core::spectral::helmholtz_inverse(&y0);
    let cfg = SolverConfig { n: 128, t_end: 1.0, ..Default::default() };
    let out = run(&u0, &cfg).unwrap();
    for s in &out.snapshots {
        let y = momentum(&s.state.u);
        assert!(y.values().iter().all(|&v| v > 0.0), "t={}", s.state.t);
    }
}

#[test]
fn flow_map_shifts_by_one_period() {
    let grid = Grid::new(64).unwrap();
    let u = PeriodicField::from_fn(grid, |x| 0.6 * (2.0 * PI * x).sin() + 0.2);
    let flow = StageVelocities::frozen(&u);
    let ip = Interpolant::new(&u);
    let seeds: Vec<CharTracker> = [0.13, 1.13].iter().map(|&a| CharTracker::seed(a, &ip)).collect();
    let mut trackers = seeds;
    for _ in 0..200 {
        trackers = advance_flow(&flow, &trackers, 5e-3).unwrap();
    }
    assert!((trackers[1].q - trackers[0].q - 1.0).abs() < 1e-12);
    assert!((trackers[1].qx - trackers[0].qx).abs() < 1e-12);
    assert!(trackers[0].qx > 0.0);
}

#[test]
fn flow_tracks_momentum_invariant() {
    let grid = Grid::new(128).unwrap();
    let y0 = PeriodicField::from_fn(grid, |x| 1.0 + 0.5 * (4.0 * PI * x).cos());
    let u0 = dp_core::spectral::helmholtz_inverse(&y0);
    let labels = [0.0, 0.2, 0.45, 0.8];
    let cfg = SolverConfig { n: 128, t_end: 0.5, ..Default::default() };
    let out = run_tracked(&u0, &cfg, &OutputSchedule::uniform(0.5), &labels).unwrap();
    let last = out.snapshots.last().unwrap();
    let y_ip = Interpolant::new(&momentum(&last.state.u));
    let y0_ip = Interpolant::new(&y0);
    for tr in &last.trackers {
        let lhs = y_ip.eval(tr.q) * tr.qx.powi(3);
        assert!((lhs - y0_ip.eval(tr.a)).abs() < 1e-6 * y0.max_abs(), "a={}", tr.a);
    }
}

#[test]
fn scan_is_shift_equivariant() {
    let grid = Grid::new(128).unwrap();
    let f = |x: f64| (2.0 * PI * x).sin() + 0.3 * (6.0 * PI * x).cos();
    let shift = 17;
    let s = shift as f64 / 128.0;
    let a = criterion_scan(&PeriodicField::from_fn(grid, f), 0.2);
    let b = criterion_scan(&PeriodicField::from_fn(grid, |x| f(x - s)), 0.2);
    assert_eq!(a.len(), b.len());
    let mut ia: Vec<usize> = a.iter().map(|h| (h.index + shift) % 128).collect();
    let mut ib: Vec<usize> = b.iter().map(|h| h.index).collect();
    ia.sort_unstable();
    ib.sort_unstable();
    assert_eq!(ia, ib);
    assert!((a[0].h0 - b[0].h0).abs() < 1e-9);
}

#[test]
fn single_step_is_deterministic() {
    let grid = Grid::new(64).unwrap();
    let u0 = PeriodicField::from_fn(grid, |x| (2.0 * PI * x).sin());
    let sys = DpSystem::new(0.5);
    let s = SolverState::initial(u0);
    let a = sys.step(&s, 1e-3).unwrap();
    let b = sys.step(&s, 1e-3).unwrap();
    assert_eq!(a, b);
}
