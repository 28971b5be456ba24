use helmuc::assembly::interpolate;
use helmuc::problems::Affine;
use helmuc::{
    build_system, solve, ProblemData, StabilizationParams,
    assemble_mass, assemble_stiffness, build_uniform_mesh, classify_elements, error_norms,
    run_convergence_study, star_norm, Error, Geometry, PerturbationLaw, ProblemCase, ProblemKind,
    Quadrature, Quantity, Rect, StudyConfig,
};

#[test]
fn star_norm_grid_converged() {
    for case in [ProblemCase::gaussian_bump(10.0).unwrap(), ProblemCase::hadamard(10.0, 12).unwrap()] {
        let a = star_norm(&case, 512);
        let b = star_norm(&case, 1024);
        assert!((a - b).abs() <= 5e-5 * b, "{}: {a} vs {b}", case.name());
    }
}

#[test]
fn error_norms_agree_with_matrix_forms() {
    let mesh = build_uniform_mesh(Rect::UNIT, 20, 20).unwrap();
    let quad = Quadrature::default();
    let target = classify_elements(&mesh, &Geometry::Convex.target());
    let v = interpolate(&mesh, |p| (3.0 * p[0]).sin() * p[1] * p[1]);
    let zero = Affine { a: 0.0, b: 0.0, c: 0.0 };
    let e = error_norms(&mesh, &target, &v, &zero, &quad).unwrap();

    let m_b = assemble_mass(&mesh, Some(&target)).unwrap();
    let stiffness_b = {
        // stiffness restricted to the target elements, via an element-subset mesh
        let tris: Vec<[usize; 3]> = target.iter().map(|&t| mesh.triangles()[t]).collect();
        let sub = helmuc::Mesh::from_parts(mesh.vertices().to_vec(), tris, Rect::UNIT).unwrap();
        assemble_stiffness(&sub)
    };
    let l2_sq = m_b.quadratic_form(&v).unwrap();
    let h1_sq = l2_sq + stiffness_b.quadratic_form(&v).unwrap();
    assert!((e.l2 * e.l2 - l2_sq).abs() <= 1e-12 * l2_sq);
    assert!((e.h1 * e.h1 - h1_sq).abs() <= 1e-12 * h1_sq);
    assert!(e.exact_l2 == 0.0 && e.rel_l2().is_err());
}

#[test]
fn triangle_inequality_through_interpolant() {
    let case = ProblemCase::gaussian_bump(10.0).unwrap();
    let geometry = Geometry::Convex;
    let mesh = build_uniform_mesh(Rect::UNIT, 16, 16).unwrap();
    let quad = Quadrature::default();
    let q = |p: [f64; 2]| case.u(p);
    let f = |p: [f64; 2]| case.f(p);
    let data = ProblemData { q: &q, f: &f, q_noise: None, f_noise: None, quadrature: &quad };
    let params = StabilizationParams::for_mesh(&mesh, 10.0).unwrap();
    let u_h = solve(&build_system(&mesh, &geometry.omega(), &params, &data).unwrap()).unwrap().u;

    let target = classify_elements(&mesh, &geometry.target());
    let iu = interpolate(&mesh, |p| case.u(p));
    let total = error_norms(&mesh, &target, &u_h, case.solution(), &quad).unwrap().l2;
    let interp = error_norms(&mesh, &target, &iu, case.solution(), &quad).unwrap().l2;
    let diff: Vec<f64> = u_h.iter().zip(&iu).map(|(a, b)| a - b).collect();
    let discrete = assemble_mass(&mesh, Some(&target)).unwrap().quadratic_form(&diff).unwrap().sqrt();
    assert!(total <= discrete + interp + 1e-12);
    assert!(discrete <= total + interp + 1e-12);

    // the study reports the same numbers
    let report = run_convergence_study(&StudyConfig {
        levels: vec![16],
        ..StudyConfig::new(ProblemKind::Gaussian, geometry, 10.0)
    })
    .unwrap();
    assert!((report.levels[0].abs_l2_b - total).abs() <= 1e-12 * total);
}

#[test]
fn study_is_deterministic() {
    let base = StudyConfig {
        levels: vec![8, 16, 32],
        perturbation: PerturbationLaw::OrderH,
        seed: 42,
        ..StudyConfig::new(ProblemKind::Gaussian, Geometry::Convex, 10.0)
    };
    let serial = run_convergence_study(&base).unwrap().to_csv();
    let again = run_convergence_study(&base).unwrap().to_csv();
    let parallel = run_convergence_study(&StudyConfig {
        parallel_levels: true,
        ..base.clone()
    })
    .unwrap()
    .to_csv();
    assert_eq!(serial, again);
    assert_eq!(serial, parallel);

    let other_seed = run_convergence_study(&StudyConfig { seed: 43, ..base }).unwrap().to_csv();
    assert_ne!(serial, other_seed);
}

#[test]
fn csv_rows_round_trip() {
    let config = StudyConfig {
        levels: vec![8, 16, 32],
        ..StudyConfig::new(ProblemKind::Hadamard { n: 3 }, Geometry::HadamardConvex, 2.0)
    };
    let report = run_convergence_study(&config).unwrap();
    let csv = report.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "h,rel_l2_B,rel_h1_B,jump,jump_over_h,z_norm,l2_omega_err");
    for level in &report.levels {
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row[0], level.h);
        for (value, q) in row[1..].iter().zip(Quantity::ALL) {
            assert_eq!(*value, level.get(q));
        }
    }
    let footer = lines.next().unwrap();
    assert!(footer.starts_with("# rates: rel_l2_B="));
    let rate: f64 = footer["# rates: rel_l2_B=".len()..].split(',').next().unwrap().parse().unwrap();
    assert_eq!(rate, report.rate(Quantity::RelL2B).unwrap());
}

#[test]
fn study_validation() {
    let mismatch = StudyConfig::new(ProblemKind::Gaussian, Geometry::HadamardConvex, 10.0);
    assert!(matches!(run_convergence_study(&mismatch), Err(Error::InvalidParameter(_))));
    let unordered = StudyConfig {
        levels: vec![16, 8],
        ..StudyConfig::new(ProblemKind::Gaussian, Geometry::Convex, 10.0)
    };
    assert!(run_convergence_study(&unordered).is_err());
    let bad_gamma = StudyConfig {
        levels: vec![4, 8],
        gamma: -1.0,
        ..StudyConfig::new(ProblemKind::Gaussian, Geometry::Convex, 10.0)
    };
    match run_convergence_study(&bad_gamma) {
        Err(Error::Level { level: 0, n: 4, .. }) => {}
        other => panic!("expected a level error, got {other:?}"),
    }
    // two levels: no rate
    let report = run_convergence_study(&StudyConfig {
        levels: vec![4, 8],
        ..StudyConfig::new(ProblemKind::Gaussian, Geometry::Convex, 10.0)
    })
    .unwrap();
    assert!(report.rate(Quantity::RelL2B).is_none());
    assert!(report.to_csv().contains("rel_l2_B=nan"));
}

#[test]
fn star_norm_recorded_when_requested() {
    let config = StudyConfig {
        levels: vec![8],
        star_norm_grid: Some(64),
        ..StudyConfig::new(ProblemKind::Gaussian, Geometry::Convex, 10.0)
    };
    let report = run_convergence_study(&config).unwrap();
    let expected = star_norm(&ProblemCase::gaussian_bump(10.0).unwrap(), 64);
    assert_eq!(report.levels[0].star_norm, Some(expected));
}
