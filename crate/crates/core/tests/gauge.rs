use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinorbit::gauge::{
    covariance_defect, field_strength, field_strength_numeric, gauge_potential, holonomy_phase, FieldParams,
    GaugeError, Mat2, TrigGaugeFunction,
};

#[test]
fn singular_and_bad_inputs() {
    let p = FieldParams::new(0.05, 1.0).unwrap();
    assert!(matches!(gauge_potential(&p, 0.0, 0.0), Err(GaugeError::Singular { .. })));
    assert!(matches!(field_strength_numeric(&p, 1.0, 0.0, 0.6), Err(GaugeError::Step { .. })));
    assert!(matches!(FieldParams::from_q(0.1, 0.0), Err(GaugeError::ZeroCoupling)));
    assert!(FieldParams::new(f64::NAN, 1.0).is_err());
    let loose = field_strength_numeric(&p, 1.0, 0.0, 0.05).unwrap();
    assert!(loose.warning.is_some());
}

#[test]
fn covariance_for_random_gauge_functions() {
    let p = FieldParams::from_q(0.4, 0.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..5 {
        let f = TrigGaugeFunction::random(&mut rng, 3);
        let defect = covariance_defect(&p, &f, 1.0 + 0.3 * i as f64, 0.4 * i as f64, 1e-4).unwrap();
        assert!(defect <= 1e-5, "{defect}");
    }
}

proptest! {
    #[test]
    fn closed_form_field_matches_differences(r in 0.3f64..5.0, phi in -PI..PI, eta in -2.0f64..2.0, beta in 0.1f64..3.0) {
        prop_assume!(eta.abs() > 1e-3);
        let p = FieldParams::new(eta, beta).unwrap();
        let exact = field_strength(&p, r, phi).unwrap();
        let numeric = field_strength_numeric(&p, r, phi, 1e-4 * r).unwrap();
        for (a, b) in exact.iter().zip(&numeric.components) {
            let scale = a.max_abs().max(1.0);
            prop_assert!(a.max_abs_diff(b) <= 1e-6 * scale, "{:?} vs {:?}", a, b);
            prop_assert!(a.is_hermitian(1e-14));
        }
        prop_assert_eq!(exact[0], Mat2::ZERO);
        for a in gauge_potential(&p, r, phi).unwrap() {
            prop_assert!(a.is_hermitian(1e-14));
        }
    }

    #[test]
    fn loop_phase(q in 0.0f64..3.0, radius in 0.1f64..10.0) {
        let p = FieldParams::from_q(q, 1.0).unwrap();
        let h = holonomy_phase(&p, radius).unwrap();
        let want = Mat2::exp_i_pauli([0.0, 0.0, PI * q]);
        let diag_plus = h.0[0][0];
        prop_assert!(h.max_abs_diff(&want) <= 1e-8 || h.max_abs_diff(&want.adjoint()) <= 1e-8, "{:?}", diag_plus);
        prop_assert!(h.is_unitary(1e-12));
    }
}
