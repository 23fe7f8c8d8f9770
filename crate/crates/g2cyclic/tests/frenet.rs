use g2cyclic::frenet::*;
use g2cyclic::solver::*;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn constant(n: usize) -> SolverProblem {
    SolverProblem { nx: n, ny: n, b: Poly::constant(c(1.0, 0.3)), dd: Poly::constant(c(0.5, -0.2)), ..SolverProblem::default() }
}

fn generic(n: usize) -> SolverProblem {
    SolverProblem {
        nx: n,
        ny: n,
        b: Poly(vec![c(1.0, 0.0), c(0.5, 0.2)]),
        dd: Poly(vec![c(0.8, 0.0), c(0.0, -0.3)]),
        boundary: BoundaryMode::Dirichlet { u1: 0.0, u3: 0.0 },
        ..SolverProblem::default()
    }
}

fn pipeline(p: &SolverProblem) -> (FlatConnection, Curve, CurveChecks) {
    let s = newton_solve(p).unwrap();
    assert!(s.report.converged);
    let (conn, curve) = reconstruct(p, &s.metric).unwrap();
    let ch = curve_checks(p, &conn, &curve, &CheckOptions::default()).unwrap();
    (conn, curve, ch)
}

#[test]
fn constant_pipeline_passes_every_check() {
    let (conn, curve, ch) = pipeline(&constant(64));
    assert!(ch.plaquette_defect < 1e-12);
    assert!(curve.q_defect < 1e-6 && curve.imag_residue < 1e-10);
    assert_eq!(ch.tangency_sign, 1);
    assert!(ch.min_tangent_positivity > 0.0);
    for v in [
        ch.tangency_defect,
        ch.mean_curvature_defect,
        ch.conformal_defect,
        ch.ii_j_defect,
        ch.iii_defect,
        ch.iii_symmetry_defect,
        ch.s2_duality_defect,
        ch.s3_duality_defect,
    ] {
        assert!(v < 1e-5, "{ch:?}");
    }
    assert_eq!(ch.ii_negdef_failures, 0);
    assert!(ch.ii_degenerate.is_empty());
    let (dq, dx) = structure_defects(&conn);
    assert!(dq < 1e-12 && dx < 1e-12);
    assert!(path_dependence(&conn) < 1e-10);
}

#[test]
fn generic_data_reconstructs_with_shrinking_defects() {
    let mut tan = Vec::new();
    let mut plaq = Vec::new();
    for n in [33, 65] {
        let (conn, curve, ch) = pipeline(&generic(n));
        assert!(curve.q_defect < 1e-6);
        assert_eq!(ch.ii_negdef_failures, 0);
        assert!(ch.iii_defect < 1e-3 && ch.ii_j_defect < 1e-3, "{ch:?}");
        let (dq, dx) = structure_defects(&conn);
        assert!(dq < 1e-12 && dx < 1e-12);
        tan.push(ch.tangency_defect);
        plaq.push(ch.plaquette_defect);
    }
    assert!(tan[1] < tan[0]);
    // interior cells see a consistent connection: fourth-order plaquettes
    assert!((plaq[0] / plaq[1]).log2() > 3.0, "{plaq:?}");
}

#[test]
fn corrupted_metric_is_refused_and_not_flat() {
    let mut worst = Vec::new();
    let mut fine = Vec::new();
    for n in [33, 65] {
        let p = generic(n);
        let s = newton_solve(&p).unwrap();
        let mut bad = s.metric.clone();
        bad.u1.iter_mut().for_each(|v| *v += 0.1);
        assert!(matches!(flat_connection(&p, &bad), Err(FrenetError::ResidualAboveTolerance { .. })));
        let h = p.grid().hx();
        let good = interior_plaquette_defect(&connection_unchecked(&p, &s.metric), 0.125) / (h * h);
        let broken = interior_plaquette_defect(&connection_unchecked(&p, &bad), 0.125) / (h * h);
        assert!(broken > 100.0 * good, "{n}: {good} {broken}");
        worst.push(broken);
        fine.push(good);
    }
    // defect / h² does not go to zero for the corrupted metric
    assert!(worst[1] > 0.5 * worst[0], "{worst:?}");
    assert!(fine[1] < 0.5 * fine[0], "{fine:?}");
}

#[test]
fn b_zero_at_centre_degenerates_only_there() {
    let p = SolverProblem {
        nx: 65,
        ny: 65,
        b: Poly(vec![c(0.0, 0.0), c(1.0, 0.0)]),
        dd: Poly::constant(c(0.5, 0.0)),
        boundary: BoundaryMode::Dirichlet { u1: -0.5, u3: 0.0 },
        ..SolverProblem::default()
    };
    let (_, _, ch) = pipeline(&p);
    assert_eq!(ch.ii_negdef_failures, 0);
    assert_eq!(ch.ii_degenerate, vec![(0.0, 0.0)]);
}

#[test]
fn totally_geodesic_run_stays_in_slice() {
    let p = SolverProblem { nx: 65, ny: 65, b: Poly::zero(), dd: Poly::zero(), boundary: BoundaryMode::Fuchsian, ..SolverProblem::default() };
    let s = newton_solve(&p).unwrap();
    let (_, curve) = reconstruct(&p, &s.metric).unwrap();
    assert!(slice_defect(&curve) < 1e-6);
    let geo = geodesic_h32_check(&curve, 1e-7);
    assert_eq!(geo.null_dimension, 4);
    assert!(geo.positive_line.is_some());
}

#[test]
fn parallel_line_for_constant_data() {
    let p = constant(48);
    let s = newton_solve(&p).unwrap();
    let (_, curve) = reconstruct(&p, &s.metric).unwrap();
    let geo = geodesic_h32_check(&curve, 1e-7);
    assert_eq!(geo.null_dimension, 1);
    let v = geo.positive_line.expect("positive line");
    assert!(geo.max_pairing < 1e-5);
    let predicted = predicted_parallel_line(&p).unwrap();
    assert!(line_alignment(&v, &predicted) > 1.0 - 1e-9);
    assert!(qf(&v, &v) > 0.0);
}

#[test]
fn generic_data_has_no_parallel_line() {
    let p = generic(33);
    let s = newton_solve(&p).unwrap();
    let (_, curve) = reconstruct(&p, &s.metric).unwrap();
    let geo = geodesic_h32_check(&curve, 1e-7);
    assert_eq!(geo.null_dimension, 0);
    assert!(geo.positive_line.is_none());
}

#[test]
fn curve_export_has_one_row_per_sample() {
    let p = constant(20);
    let (_, curve, ch) = pipeline(&p);
    let mut buf = Vec::new();
    export_curve(&curve, Some(&ch), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,f1,f2,f3,f4,f5,f6,f7,qf,tangency,mean_curvature"));
    assert_eq!(lines.count(), 400);
}
