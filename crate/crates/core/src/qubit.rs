//! Single-qubit protection: a weak measurement `diag(1, m)` before the GAD
//! channel and a reversal `diag(n, 1)` after it.
//!
//! Closed forms for equatorial inputs live next to [`protect_pipeline`], the
//! generic composition of [`crate::weakmeas`] and [`crate::channels`] that
//! every closed form is checked against.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channels::{apply_channel, gad_channel, GadParams};
use crate::error::{check_positive, Error, Result};
use crate::linalg::{fidelity, to_density, ComplexMatrix, DensityMatrix, PureQubit};
use crate::weakmeas::{apply_postselected, WeakMeasurement, MIN_SUCCESS_PROB};

#[derive(Clone, Debug, PartialEq)]
pub struct ProtectionResult {
    pub fidelity: f64,
    pub success_prob: f64,
    pub output_state: DensityMatrix,
    /// Normalization `T` of the unnormalized output; the raw post-selection
    /// weight is `T / 2`.
    pub normalization: f64,
}

/// Optimal measurement strengths and the value they attain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalStrengths {
    pub m: f64,
    pub n: f64,
    pub f_max: f64,
    /// Set when the optimum is the projective limit `m, n -> 0` (`p = 1`).
    pub projective: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AverageFidelityReport {
    /// Fidelity for input `|0>`.
    pub f0: f64,
    /// Fidelity for input `|1>`.
    pub f1: f64,
    /// Fidelity for any equatorial input.
    pub fe: f64,
    /// `(f0 + f1 + 4 fe) / 6`.
    pub favg: f64,
}

/// Equatorial fidelity without weak measurements: `½(1 + √(1-r))`.
pub fn baseline_fidelity(params: GadParams) -> f64 {
    0.5 * (1.0 + (1.0 - params.r()).sqrt())
}

/// `T = n²(prm² + pr − r + 1) − prm² + m² − pr + r`.
pub fn normalization(params: GadParams, m: f64, n: f64) -> f64 {
    let (p, r) = (params.p(), params.r());
    let pr = p * r;
    let (m2, n2) = (m * m, n * n);
    n2 * (pr * m2 + pr - r + 1.0) - pr * m2 + m2 - pr + r
}

/// Closed-form equatorial fidelity with weak measurement and reversal.
pub fn equatorial_fidelity(params: GadParams, m: f64, n: f64) -> f64 {
    let (p, r) = (params.p(), params.r());
    let pr = p * r;
    let (m2, n2) = (m * m, n * n);
    let denom = n2 * (pr * m2 + pr - r + 1.0) + m2 * (1.0 - pr) + (1.0 - p) * r;
    0.5 + m * n * (1.0 - r).sqrt() / denom
}

/// `min{1, 1/c²}` for each strength: the probability cost of rescaling a raw
/// strength above 1 into a physical measurement operator.
pub(crate) fn rescale_cost(strengths: &[f64]) -> f64 {
    strengths
        .iter()
        .map(|&c| 1.0f64.min(1.0 / (c * c)))
        .product()
}

/// Closed-form protection of the equatorial state `(|0> + e^{iφ}|1>)/√2`.
pub fn protect_equatorial(params: GadParams, m: f64, n: f64, phi: f64) -> Result<ProtectionResult> {
    check_positive("m", m)?;
    check_positive("n", n)?;
    let (p, r) = (params.p(), params.r());
    let pr = p * r;
    let (m2, n2) = (m * m, n * n);
    let t = normalization(params, m, n);
    let success_prob = 0.5 * t * rescale_cost(&[m, n]);
    if success_prob < MIN_SUCCESS_PROB {
        return Err(Error::PostSelectionFailed(success_prob));
    }
    let coherence = Complex64::from_polar(m * n * (1.0 - r).sqrt(), -phi);
    let entries = vec![
        Complex64::new(n2 * (pr * m2 + pr - r + 1.0), 0.0),
        coherence,
        coherence.conj(),
        Complex64::new(-pr * m2 + m2 - pr + r, 0.0),
    ];
    let state = ComplexMatrix::new(2, entries)?.scale_real(1.0 / t);
    Ok(ProtectionResult {
        fidelity: equatorial_fidelity(params, m, n),
        success_prob,
        output_state: DensityMatrix::from_matrix_unchecked(state),
        normalization: t,
    })
}

/// Generic route: post-selected `diag(1, m)`, the GAD channel, then
/// post-selected `diag(n, 1)`. Returns the output state and the overall
/// success probability.
pub fn protect_pipeline(
    params: GadParams,
    m: f64,
    n: f64,
    input: &DensityMatrix,
) -> Result<(DensityMatrix, f64)> {
    let (collapsed, p_pre) = apply_postselected(&WeakMeasurement::pre(m)?, input)?;
    let degraded = apply_channel(&gad_channel(params), &collapsed)?;
    let (out, p_post) = apply_postselected(&WeakMeasurement::post(n)?, &degraded)?;
    let prob = p_pre * p_post;
    if prob < MIN_SUCCESS_PROB {
        return Err(Error::PostSelectionFailed(prob));
    }
    Ok((out, prob))
}

/// `G(p, r) = √((1 − rp)(1 − r + rp)) + r√(p(1 − p))`; lies in `[√(1-r), 1]`.
pub fn g_value(params: GadParams) -> f64 {
    let (p, r) = (params.p(), params.r());
    ((1.0 - r * p) * (1.0 - r + r * p)).sqrt() + r * (p * (1.0 - p)).sqrt()
}

/// Strengths maximizing the equatorial fidelity, with the maximum
/// `½(1 + √(1-r) / G(p, r))`.
pub fn optimal_strengths(params: GadParams) -> Result<OptimalStrengths> {
    let (p, r) = (params.p(), params.r());
    if p <= 0.0 {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "(0, 1]",
        });
    }
    let (keep_g, keep_e) = (params.keep_ground(), params.keep_excited());
    if keep_e <= 0.0 {
        return Err(Error::Degenerate("p = 1 and r = 1: no coherence survives"));
    }
    let m = ((1.0 - p) * keep_g / (p * keep_e)).powf(0.25);
    let n = ((1.0 - p) * keep_e / (p * keep_g)).powf(0.25);
    let f_max = 0.5 * (1.0 + (1.0 - r).sqrt() / g_value(params));
    Ok(OptimalStrengths {
        m,
        n,
        f_max,
        projective: p == 1.0,
    })
}

/// The four BB84 signal states as equatorial phases; `(φ, φ + π)` are
/// conjugate partners.
pub const BB84_PHASES: [f64; 4] = [0.0, PI, PI / 2.0, 3.0 * PI / 2.0];

/// BB84 error rate after the protected channel, computed from the pipeline:
/// for each signal state `|i>`, `<i|ρ_{i⊕1}|i> / (<i|ρ_i|i> + <i|ρ_{i⊕1}|i>)`,
/// averaged over the four states.
pub fn bb84_error_rate(params: GadParams, m: f64, n: f64) -> Result<f64> {
    check_positive("m", m)?;
    check_positive("n", n)?;
    let mut total = 0.0;
    for &phi in &BB84_PHASES {
        let sent = PureQubit::equatorial(phi);
        let partner = PureQubit::equatorial(phi + PI);
        let psi = to_density(sent);
        let (rho_i, _) = protect_pipeline(params, m, n, &psi)?;
        let (rho_flip, _) = protect_pipeline(params, m, n, &to_density(partner))?;
        let right = fidelity(&psi, &rho_i)?;
        let wrong = fidelity(&psi, &rho_flip)?;
        total += wrong / (right + wrong);
    }
    Ok(total / BB84_PHASES.len() as f64)
}

/// Closed-form fidelities for the six cardinal states.
pub fn average_fidelity_six(params: GadParams, m: f64, n: f64) -> Result<AverageFidelityReport> {
    check_positive("m", m)?;
    check_positive("n", n)?;
    let (p, r) = (params.p(), params.r());
    let (n2, rp) = (n * n, r * p);
    let keep_g = params.keep_ground();
    let f0 = n2 * keep_g / (r - rp + n2 * keep_g);
    let f1 = (1.0 - rp) / (1.0 - rp + n2 * rp);
    let fe = equatorial_fidelity(params, m, n);
    Ok(AverageFidelityReport {
        f0,
        f1,
        fe,
        favg: (f0 + f1 + 4.0 * fe) / 6.0,
    })
}

/// The six cardinal states `|0>, |1>, |±>, |±i>`.
pub fn six_states() -> [PureQubit; 6] {
    [
        PureQubit::zero(),
        PureQubit::one(),
        PureQubit::equatorial(0.0),
        PureQubit::equatorial(PI),
        PureQubit::equatorial(PI / 2.0),
        PureQubit::equatorial(3.0 * PI / 2.0),
    ]
}

/// Pipeline fidelities for [`six_states`], in the same order.
pub fn six_state_fidelities_pipeline(params: GadParams, m: f64, n: f64) -> Result<[f64; 6]> {
    let mut out = [0.0; 6];
    for (slot, state) in out.iter_mut().zip(six_states()) {
        let psi = to_density(state);
        let (rho, _) = protect_pipeline(params, m, n, &psi)?;
        *slot = fidelity(&psi, &rho)?;
    }
    Ok(out)
}

/// Strengths maximizing the six-state average fidelity. They coincide with
/// [`optimal_strengths`]; `f_max` is the average fidelity evaluated there.
pub fn optimal_average(params: GadParams) -> Result<OptimalStrengths> {
    let opt = optimal_strengths(params)?;
    if opt.projective {
        // m, n -> 0 with n/m fixed sends every term to 1
        return Ok(OptimalStrengths { f_max: 1.0, ..opt });
    }
    let report = average_fidelity_six(params, opt.m, opt.n)?;
    Ok(OptimalStrengths {
        f_max: report.favg,
        ..opt
    })
}
