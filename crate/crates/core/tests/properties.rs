use std::f64::consts::{PI, TAU};

use decoshield::channels::{apply_channel, gad_channel, GadParams};
use decoshield::entangle::{
    concurrence_lambda2, optimal_parameters, protected_pipeline, protected_state, EntangledInput,
};
use decoshield::linalg::{to_density, wootters_concurrence, DensityMatrix, PureQubit};
use decoshield::qubit::{equatorial_fidelity, optimal_strengths};
use proptest::prelude::*;

fn channel() -> impl Strategy<Value = GadParams> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(p, r)| GadParams::new(p, r).unwrap())
}

fn interior_channel() -> impl Strategy<Value = GadParams> {
    (0.05f64..0.95, 0.0f64..0.95).prop_map(|(p, r)| GadParams::new(p, r).unwrap())
}

proptest! {
    #[test]
    fn channel_output_is_a_state(ch in channel(), theta in 0.0f64..PI, phi in 0.0f64..TAU) {
        let rho = to_density(PureQubit::new(theta, phi).unwrap());
        let out = apply_channel(&gad_channel(ch), &rho).unwrap();
        prop_assert!(DensityMatrix::new(out.matrix().clone()).is_ok());
    }

    #[test]
    fn protected_pair_matches_pipeline(
        ch1 in interior_channel(), ch2 in interior_channel(),
        m1 in 0.05f64..2.0, m2 in 0.05f64..2.0, n1 in 0.05f64..2.0, n2 in 0.05f64..2.0,
        alpha_sq in 0.01f64..0.99,
    ) {
        let input = EntangledInput::from_alpha_sq(alpha_sq).unwrap();
        let (coeffs, prob) = protected_state(&input, ch1, ch2, m1, m2, n1, n2).unwrap();
        let (state, pipe_prob) = protected_pipeline(&input, ch1, ch2, m1, m2, n1, n2).unwrap();
        prop_assert!(coeffs.density(n1, n2).unwrap().max_abs_diff(&state) <= 1e-12);
        prop_assert!((prob - pipe_prob).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&prob));
        let c = wootters_concurrence(&state).unwrap();
        prop_assert!((c - concurrence_lambda2(&coeffs, n1, n2).max(0.0)).abs() <= 1e-10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&c));
    }

    #[test]
    fn closed_form_optimum_dominates_random_strengths(
        p in 0.05f64..1.0, r in 0.0f64..0.95, m in 0.01f64..3.0, n in 0.01f64..3.0,
    ) {
        let params = GadParams::new(p, r).unwrap();
        let opt = optimal_strengths(params).unwrap();
        prop_assert!(equatorial_fidelity(params, m, n) <= opt.f_max + 1e-12);
    }

    #[test]
    fn swapping_channels_preserves_the_optimum(ch1 in interior_channel(), ch2 in interior_channel()) {
        let bell = EntangledInput::bell();
        let a = optimal_parameters(&bell, ch1, ch2).unwrap();
        let b = optimal_parameters(&bell, ch2, ch1).unwrap();
        prop_assert!((a.lambda2_max - b.lambda2_max).abs() <= 1e-12);
        prop_assert!((a.n1_opt - b.n2_opt).abs() <= 1e-9 * a.n1_opt.max(1.0));
        prop_assert!((a.success_prob - b.success_prob).abs() <= 1e-12);
    }
}
