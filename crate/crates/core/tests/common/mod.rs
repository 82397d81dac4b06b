//! Helpers shared by the regression and acceptance test targets.
//!
//! Each helper compares one literal-but-wrong formula and the corrected one
//! against the generic pipeline and returns `(literal deviation, corrected deviation)`.

#![allow(dead_code)]

use decoshield::channels::{apply_local_pair, gad_channel, GadParams};
use decoshield::entangle::{
    channel_degraded_state, protected_state, EntangledInput, PopulationWeights,
};
use decoshield::linalg::{conjugate_by, to_density, ComplexMatrix, DensityMatrix, PureQubit};
use decoshield::qubit::{normalization, protect_pipeline};
use decoshield::weakmeas::{apply_postselected, WeakMeasurement};

pub fn gad(p: f64, r: f64) -> GadParams {
    GadParams::new(p, r).unwrap()
}

/// Reversal written as `diag(n1,0) ⊗ diag(n2,0)` versus `diag(n1,1) ⊗ diag(n2,1)`,
/// both measured against the closed-form protected X-state.
pub fn reversal_operator_deviation(
    ch1: GadParams,
    ch2: GadParams,
    m1: f64,
    n1: f64,
    n2: f64,
) -> (f64, f64) {
    let input = EntangledInput::from_alpha_sq(0.4).unwrap();
    let (coeffs, _) = protected_state(&input, ch1, ch2, m1, 1.0, n1, n2).unwrap();
    let closed = coeffs.density(n1, n2).unwrap();

    let (collapsed, _) = apply_postselected(
        &WeakMeasurement::pre_pair(m1, 1.0).unwrap(),
        &input.density(),
    )
    .unwrap();
    let degraded = apply_local_pair(&gad_channel(ch1), &gad_channel(ch2), &collapsed).unwrap();

    let literal = ComplexMatrix::from_real_diagonal(&[n1 * n2, 0.0, 0.0, 0.0]).unwrap();
    let (out, prob) = conjugate_by(&literal, &degraded).unwrap();
    let literal_state = DensityMatrix::new(out.scale_real(1.0 / prob)).unwrap();

    let (corrected_state, _) =
        apply_postselected(&WeakMeasurement::post_pair(n1, n2).unwrap(), &degraded).unwrap();
    (
        literal_state.max_abs_diff(&closed),
        corrected_state.max_abs_diff(&closed),
    )
}

/// `|11⟩` population weight written with `p₁p₂r₂r₂` versus `p₁p₂r₁r₂`,
/// measured against the pipeline on input `|11⟩`.
pub fn d_coefficient_deviation(ch1: GadParams, ch2: GadParams) -> (f64, f64) {
    let input = EntangledInput::from_alpha_sq(0.0).unwrap();
    let pipeline =
        apply_local_pair(&gad_channel(ch1), &gad_channel(ch2), &input.density()).unwrap();
    let population = pipeline.matrix()[(3, 3)].re;
    let (p1, r1, p2, r2) = (ch1.p(), ch1.r(), ch2.p(), ch2.r());
    let literal = 1.0 - p1 * r1 - p2 * r2 + p1 * p2 * r2 * r2;
    let corrected = PopulationWeights::new(ch1, ch2).d1;
    assert_eq!(channel_degraded_state(&input, ch1, ch2).d, corrected);
    ((literal - population).abs(), (corrected - population).abs())
}

/// Single-qubit success probability with the rescaling charged as `1/c`
/// versus `1/c²`, against the pipeline with strengths `(m, n)`.
pub fn single_qubit_probability_deviation(params: GadParams, m: f64, n: f64) -> (f64, f64) {
    let (_, prob) =
        protect_pipeline(params, m, n, &to_density(PureQubit::equatorial(0.3))).unwrap();
    let half_t = normalization(params, m, n) / 2.0;
    let linear = half_t * (1.0f64).min(1.0 / m) * (1.0f64).min(1.0 / n);
    let squared = half_t * (1.0f64).min(1.0 / (m * m)) * (1.0f64).min(1.0 / (n * n));
    ((linear - prob).abs(), (squared - prob).abs())
}

/// Two-qubit success probability with `1/c` versus `1/c²` rescaling costs.
pub fn two_qubit_probability_deviation(
    ch1: GadParams,
    ch2: GadParams,
    m1: f64,
    n1: f64,
    n2: f64,
) -> (f64, f64) {
    let input = EntangledInput::bell();
    let (_, pipeline) =
        decoshield::entangle::protected_pipeline(&input, ch1, ch2, m1, 1.0, n1, n2).unwrap();
    let (_, closed) = protected_state(&input, ch1, ch2, m1, 1.0, n1, n2).unwrap();
    let cost = |c: f64, k: i32| (1.0f64).min(c.powi(-k));
    let squared = cost(m1, 2) * cost(n1, 2) * cost(n2, 2);
    let linear = cost(m1, 1) * cost(n1, 1) * cost(n2, 1);
    let weight = closed / squared;
    (
        (weight * linear - pipeline).abs(),
        (closed - pipeline).abs(),
    )
}
