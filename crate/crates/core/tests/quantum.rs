use proptest::prelude::*;
use spinorbit::classical::PotentialSpec;
use spinorbit::quantum::{
    cam_spectrum, density_grid, is_normalizable, radial_norm_quadrature, spin_equation_residual,
    spin_expectation_dynamics, MacroscopicState, PolarGrid, QuantumError, RadialMode, Spinor,
};
use spinorbit::rational::ExactReal;

fn potential(k: &str, q: f64) -> PotentialSpec {
    PotentialSpec::new(k.parse().unwrap(), 1.0, q, 0.5).unwrap()
}

#[test]
fn normalisability_boundary() {
    assert!(!is_normalizable(1.0, 1));
    assert!(is_normalizable(1.0, 2));
    assert!(is_normalizable(0.5, 3));
    assert!(!is_normalizable(0.5, 2));
    assert!(is_normalizable(-6.0, 1));
    assert!(!is_normalizable(-2.0, 5));
    assert!(matches!(RadialMode::new(1.0, 1, 1.0), Err(QuantumError::NotNormalizable { .. })));
    assert!(cam_spectrum(&potential("4", 0.1), 0..=3).is_err());
}

#[test]
fn closed_form_norms() {
    for (k, nu) in [(1.0, 3), (4.0, 2), (7.0 / 3.0, 2), (-6.0, 2), (-17.0 / 4.0, 1), (9.0 / 2.0, 5)] {
        let mode = RadialMode::new(k, nu, 1.0).unwrap();
        let norm = radial_norm_quadrature(&mode).unwrap();
        assert!((norm - 1.0).abs() < 1e-6, "k = {k}, nu = {nu}: {norm}");
    }
    let stretched = RadialMode::new(4.0, 1, 2.5).unwrap();
    assert!((radial_norm_quadrature(&stretched).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn grid_density_is_nonnegative_and_symmetric() {
    let s = MacroscopicState::new(&potential("5", 0.1), Spinor::plus_x(), 12, None, 0.0).unwrap();
    let grid = PolarGrid::default_for(&s, Some((5, 1))).unwrap();
    let field = density_grid(&s, &grid).unwrap();
    assert_eq!(field.density.len(), grid.n_r * grid.n_phi);
    assert!(field.density.iter().all(|&d| d >= 0.0 && d.is_finite()));
    let marginal = field.angular_marginal();
    let step = grid.n_phi / 5;
    let top = marginal.iter().copied().fold(0.0, f64::max);
    for m in 0..grid.n_phi {
        assert!((marginal[m] - marginal[(m + step) % grid.n_phi]).abs() <= 1e-9 * top);
    }
}

#[test]
fn spin_expectation_precesses() {
    let s = MacroscopicState::new(&potential("7/3", 0.3), Spinor::plus_y(), 10, None, 0.2).unwrap();
    let r = s.peak_radius().unwrap();
    let rows = spin_expectation_dynamics(&s, r, 6.0, 50).unwrap();
    assert!(spin_equation_residual(&s, r, &rows, 1e-5).unwrap() < 1e-8);
    for row in &rows {
        let len = (row[1] * row[1] + row[2] * row[2] + row[3] * row[3]).sqrt();
        assert!((len - 1.0).abs() < 1e-12);
    }
}

#[test]
fn spinor_validation() {
    use num_complex::Complex64;
    assert!(Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
    let s = Spinor::normalized(Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)).unwrap();
    assert!((s.up.norm_sqr() + s.down.norm_sqr() - 1.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn spectrum_spacing(p in 1i64..20, s in 1i64..5, neg in any::<bool>(), q in 0.0f64..1.0) {
        let k = ExactReal::rational(if neg { -p } else { p }, s);
        prop_assume!(k.value() > 0.0 || k.value() < -2.0);
        let spec = PotentialSpec::new(k, 1.0, q, 0.5).unwrap();
        let lo = if k.value() > 0.0 { (1.0 / k.value()).floor() as u32 + 1 } else { 1 };
        let levels = cam_spectrum(&spec, lo..=lo + 4).unwrap();
        prop_assert_eq!(levels.len(), 10);
        for pair in levels.chunks(2) {
            prop_assert!((pair[0].lambda - pair[1].lambda - q).abs() < 1e-12);
        }
        for w in levels.windows(3).step_by(2) {
            prop_assert!((w[2].lambda - w[0].lambda - k.value().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_sum_to_one(n in 1u32..400, k in prop::sample::select(vec!["1", "4", "7/3", "-6", "1/2"])) {
        let spec = potential(k, 0.1);
        match MacroscopicState::new(&spec, Spinor::plus(), n, None, 0.0) {
            Ok(s) => {
                let total: f64 = s.terms.iter().map(|t| t.weight * t.weight).sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
                prop_assert!(s.terms.iter().all(|t| is_normalizable(s.k, t.radial.nu)));
            }
            Err(QuantumError::EmptyModeSet { .. }) => prop_assert!(n < 3),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
