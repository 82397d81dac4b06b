//! Oracle cross-checks: every closed form against the generic Kraus pipeline,
//! the dilation, the Wootters formula and numerical search.
//!
//! Each check is sized by its caller. The `verify` subcommand runs a quick
//! deterministic suite; the acceptance tests run the full-size versions.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::channels::{
    apply_channel, apply_local_pair, apply_via_dilation, check_trace_preserving, gad_channel,
    GadParams,
};
use crate::entangle::{
    channel_degraded_state, concurrence_lambda1, concurrence_lambda2, h_value, lambda2_max,
    optimal_parameters, protected_pipeline, protected_state, EntangledInput,
};
use crate::linalg::{fidelity, to_density, wootters_concurrence, DensityMatrix, PureQubit};
use crate::qubit::{
    average_fidelity_six, baseline_fidelity, bb84_error_rate, equatorial_fidelity,
    optimal_strengths, protect_equatorial, protect_pipeline, six_state_fidelities_pipeline,
    six_states,
};
use crate::search::{grid_then_simplex, stationarity_check, SearchBox, SearchResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check {
            name,
            passed,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// One random parameter configuration for the equivalence checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Draw {
    pub ch1: GadParams,
    pub ch2: GadParams,
    pub m1: f64,
    pub m2: f64,
    pub n1: f64,
    pub n2: f64,
    pub theta: f64,
    pub phi: f64,
    pub alpha_sq: f64,
    pub beta_phase: f64,
}

/// Number of uniform coordinates consumed by [`Draw::from_unit`].
pub const DRAW_COORDS: usize = 12;

impl Draw {
    /// Maps uniform samples in `[0, 1)` onto the parameter ranges:
    /// `p ∈ [0.01, 1]`, `r ∈ [0, 0.99]`, strengths in `[0.05, 2]`, a full Bloch
    /// sphere, `|α|² ∈ [0.01, 0.99]` and an arbitrary relative phase.
    pub fn from_unit(u: &[f64; DRAW_COORDS]) -> Self {
        let p = |x: f64| 0.01 + 0.99 * x;
        let r = |x: f64| 0.99 * x;
        let s = |x: f64| 0.05 + 1.95 * x;
        Draw {
            ch1: GadParams::new(p(u[0]), r(u[1])).expect("mapped into range"),
            ch2: GadParams::new(p(u[2]), r(u[3])).expect("mapped into range"),
            m1: s(u[4]),
            m2: s(u[5]),
            n1: s(u[6]),
            n2: s(u[7]),
            theta: PI * u[8],
            phi: 2.0 * PI * u[9],
            alpha_sq: 0.01 + 0.98 * u[10],
            beta_phase: 2.0 * PI * u[11],
        }
    }

    pub fn input(&self) -> EntangledInput {
        EntangledInput::new(
            Complex64::new(self.alpha_sq.sqrt(), 0.0),
            Complex64::from_polar((1.0 - self.alpha_sq).sqrt(), self.beta_phase),
        )
        .expect("normalized by construction")
    }
}

/// Deterministic low-discrepancy draws from a Halton sequence.
pub fn halton_draws(count: usize) -> Vec<Draw> {
    const PRIMES: [u64; DRAW_COORDS] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    (1..=count as u64)
        .map(|i| {
            let mut u = [0.0; DRAW_COORDS];
            for (slot, &base) in u.iter_mut().zip(&PRIMES) {
                *slot = radical_inverse(i, base);
            }
            Draw::from_unit(&u)
        })
        .collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn gad(p: f64, r: f64) -> GadParams {
    GadParams::new(p, r).expect("fixed parameters in range")
}

/// Asymmetric reference channels `(0.9, 0.5)` and `(0.95, 0.3)`.
pub fn reference_channels() -> (GadParams, GadParams) {
    (gad(0.9, 0.5), gad(0.95, 0.3))
}

/// Channels where unprotected entanglement dies suddenly.
pub fn esd_channels() -> (GadParams, GadParams) {
    (gad(0.7, 0.61), gad(0.7, 0.61))
}

/// Single-qubit fidelity `F(m, n)` maximized by grid scan plus simplex over `(m, n)`.
pub fn search_single_qubit(params: GadParams, resolution: usize) -> SearchResult {
    grid_then_simplex(
        |x| equatorial_fidelity(params, x[0], x[1]),
        &SearchBox::strengths(2, resolution),
    )
}

/// `Λ₂(m, n₁, n₂)` (with `m₂ = 1`) maximized by grid scan plus simplex.
pub fn search_two_qubit(
    input: &EntangledInput,
    ch1: GadParams,
    ch2: GadParams,
    resolution: usize,
) -> SearchResult {
    grid_then_simplex(
        |x| match protected_state(input, ch1, ch2, x[0], 1.0, x[1], x[2]) {
            Ok((coeffs, _)) => concurrence_lambda2(&coeffs, x[1], x[2]),
            Err(_) => f64::NEG_INFINITY,
        },
        &SearchBox::strengths(3, resolution),
    )
}

/// Optimal concurrence, strengths and success probability for the reference
/// channels with a Bell input, each within 0.005 of its target.
pub fn reference_optimum() -> Check {
    let (ch1, ch2) = reference_channels();
    let name = "reference-optimum";
    let report = match optimal_parameters(&EntangledInput::bell(), ch1, ch2) {
        Ok(r) => r,
        Err(e) => return Check::new(name, false, e.to_string()),
    };
    let targets = [
        ("concurrence", report.protected_concurrence(), 0.53),
        ("m", report.m_opt, 0.34),
        ("n1", report.n1_opt, 0.50),
        ("n2", report.n2_opt, 0.44),
        ("success_prob", report.success_prob, 0.06),
        ("unprotected", report.unprotected_concurrence(), 0.33),
    ];
    let passed = targets
        .iter()
        .all(|(_, got, want)| (got - want).abs() <= 0.005);
    let detail = targets
        .iter()
        .map(|(label, got, want)| format!("{label}={got:.6} (target {want})"))
        .collect::<Vec<_>>()
        .join(", ");
    Check::new(name, passed, detail)
}

/// Unprotected concurrence vanishes while the protected optimum is positive
/// and agrees with a 3-dimensional simplex oracle to `1e-4`.
pub fn esd_circumvention(resolution: usize) -> Check {
    let (ch1, ch2) = esd_channels();
    let input = EntangledInput::bell();
    let lambda1 = concurrence_lambda1(&channel_degraded_state(&input, ch1, ch2));
    let best = lambda2_max(ch1, ch2);
    let oracle = search_two_qubit(&input, ch1, ch2, resolution);
    let passed =
        lambda1 < 0.0 && best > 0.0 && (best - oracle.value).abs() <= 1e-4 && oracle.converged;
    Check::new(
        "esd-circumvention",
        passed,
        format!(
            "lambda1={lambda1:.6}, lambda2_max={best:.8}, simplex={:.8} at (m={:.5}, n1={:.5}, n2={:.5})",
            oracle.value, oracle.argmax[0], oracle.argmax[1], oracle.argmax[2]
        ),
    )
}

/// Closed-form single-qubit optimum against grid+simplex on every `(p, r)`
/// pair: argmax within `1e-3`, value within `1e-6`, gradient below `1e-6`.
pub fn single_qubit_optimality(ps: &[f64], rs: &[f64], resolution: usize) -> Check {
    let mut worst_arg: f64 = 0.0;
    let mut worst_val: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    let mut failures = Vec::new();
    for &p in ps {
        for &r in rs {
            let params = gad(p, r);
            let opt = match optimal_strengths(params) {
                Ok(o) => o,
                Err(e) => {
                    failures.push(format!("(p={p}, r={r}): {e}"));
                    continue;
                }
            };
            let found = search_single_qubit(params, resolution);
            worst_arg = worst_arg
                .max((found.argmax[0] - opt.m).abs())
                .max((found.argmax[1] - opt.n).abs());
            worst_val = worst_val.max((found.value - opt.f_max).abs());
            let grad = stationarity_check(
                |x| equatorial_fidelity(params, x[0], x[1]),
                &[opt.m, opt.n],
                1e-5,
            );
            worst_grad = worst_grad.max(grad);
        }
    }
    let passed =
        failures.is_empty() && worst_arg <= 1e-3 && worst_val <= 1e-6 && worst_grad <= 1e-6;
    let mut detail = format!(
        "{} points, max |argmax diff|={worst_arg:.2e}, max |value diff|={worst_val:.2e}, max gradient={worst_grad:.2e}",
        ps.len() * rs.len()
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; errors: {}", failures.join("; ")));
    }
    Check::new("single-qubit-optimality", passed, detail)
}

/// No point found by grid+simplex over `(m, n₁, n₂)` yields a concurrence
/// above `max{0, Λ̄₂}` by more than `1e-6`. Where `Λ̄₂ > 0` this is the raw
/// `Λ₂` comparison; where `Λ̄₂ < 0` the closed form is a stationary value, the
/// search only approaches `Λ₂ → 0⁻`, and both concurrences are zero.
pub fn two_qubit_optimality(sets: &[(GadParams, GadParams)], resolution: usize) -> Check {
    let input = EntangledInput::bell();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_gap: f64 = 0.0;
    let mut negative = 0usize;
    for &(ch1, ch2) in sets {
        let best = lambda2_max(ch1, ch2);
        let found = search_two_qubit(&input, ch1, ch2, resolution);
        if best > 0.0 {
            worst_excess = worst_excess.max(found.value - best);
            worst_gap = worst_gap.max(best - found.value);
        } else {
            negative += 1;
            worst_excess = worst_excess.max(found.value.max(0.0));
        }
    }
    Check::new(
        "two-qubit-optimality",
        worst_excess <= 1e-6,
        format!(
            "{} channel sets ({negative} with negative closed form), max (search - closed form)={worst_excess:.2e}, max shortfall={worst_gap:.2e}",
            sets.len()
        ),
    )
}

/// Largest deviation between closed forms and the generic pipeline over one draw.
fn formula_deviation(d: &Draw) -> crate::Result<f64> {
    let mut worst: f64 = 0.0;
    let single = d.ch1;
    // single-qubit state, fidelity and success probability
    let closed = protect_equatorial(single, d.m1, d.n1, d.phi)?;
    let (state, prob) = protect_pipeline(
        single,
        d.m1,
        d.n1,
        &to_density(PureQubit::equatorial(d.phi)),
    )?;
    worst = worst
        .max(closed.output_state.max_abs_diff(&state))
        .max((closed.success_prob - prob).abs())
        .max(
            (closed.fidelity - fidelity(&to_density(PureQubit::equatorial(d.phi)), &state)?).abs(),
        );
    // channel-only X-state
    let input = d.input();
    let degraded = channel_degraded_state(&input, d.ch1, d.ch2).density(1.0, 1.0)?;
    let direct = apply_local_pair(&gad_channel(d.ch1), &gad_channel(d.ch2), &input.density())?;
    worst = worst.max(degraded.max_abs_diff(&direct));
    // protected X-state and its success probability
    let (coeffs, prob) = protected_state(&input, d.ch1, d.ch2, d.m1, d.m2, d.n1, d.n2)?;
    let (state, pipe_prob) = protected_pipeline(&input, d.ch1, d.ch2, d.m1, d.m2, d.n1, d.n2)?;
    worst = worst
        .max(coeffs.density(d.n1, d.n2)?.max_abs_diff(&state))
        .max((prob - pipe_prob).abs());
    Ok(worst)
}

/// Closed-form states, fidelities and success probabilities equal the
/// generic pipeline to `1e-12` on every draw.
pub fn formula_pipeline_equivalence(draws: &[Draw]) -> Check {
    let mut worst: f64 = 0.0;
    let mut errors = 0usize;
    for d in draws {
        match formula_deviation(d) {
            Ok(dev) => worst = worst.max(dev),
            Err(_) => errors += 1,
        }
    }
    Check::new(
        "formula-pipeline-equivalence",
        errors == 0 && worst <= 1e-12,
        format!(
            "{} draws, max deviation={worst:.2e}, failed evaluations={errors}",
            draws.len()
        ),
    )
}

fn oracle_deviations(d: &Draw) -> crate::Result<(f64, f64, f64)> {
    // dilation against Kraus on a pure single-qubit state
    let rho = to_density(PureQubit::new(d.theta, d.phi)?);
    let dil =
        apply_via_dilation(d.ch1, &rho)?.max_abs_diff(&apply_channel(&gad_channel(d.ch1), &rho)?);
    // Wootters against the X-state closed forms, with and without protection
    let input = d.input();
    let degraded = channel_degraded_state(&input, d.ch1, d.ch2);
    let c1 = (wootters_concurrence(&degraded.density(1.0, 1.0)?)?
        - concurrence_lambda1(&degraded).max(0.0))
    .abs();
    let (coeffs, _) = protected_state(&input, d.ch1, d.ch2, d.m1, d.m2, d.n1, d.n2)?;
    let c2 = (wootters_concurrence(&coeffs.density(d.n1, d.n2)?)?
        - concurrence_lambda2(&coeffs, d.n1, d.n2).max(0.0))
    .abs();
    // BB84 error rate against the fidelity complement
    let re =
        (bb84_error_rate(d.ch1, d.m1, d.n1)? + equatorial_fidelity(d.ch1, d.m1, d.n1) - 1.0).abs();
    Ok((dil, c1.max(c2), re))
}

/// Dilation ≡ Kraus (`1e-12`), Wootters ≡ X-state closed forms (`1e-10`),
/// `R_E = 1 − F` (`1e-12`).
pub fn oracle_equivalences(draws: &[Draw]) -> Check {
    let (mut dil, mut conc, mut re) = (0.0f64, 0.0f64, 0.0f64);
    let mut errors = 0usize;
    for d in draws {
        match oracle_deviations(d) {
            Ok((a, b, c)) => {
                dil = dil.max(a);
                conc = conc.max(b);
                re = re.max(c);
            }
            Err(_) => errors += 1,
        }
    }
    Check::new(
        "oracle-equivalences",
        errors == 0 && dil <= 1e-12 && conc <= 1e-10 && re <= 1e-12,
        format!(
            "{} draws, dilation={dil:.2e}, concurrence={conc:.2e}, error-rate={re:.2e}, failed evaluations={errors}",
            draws.len()
        ),
    )
}

/// Completeness, state validity, `F_max ≥ baseline`, α-independence of the
/// two-qubit optimum and the success-probability maximum at `1/(1+h)`.
pub fn invariant_suite(draws: &[Draw], grid: usize, alpha_scan: usize) -> Check {
    let mut problems = Vec::new();

    let mut completeness: f64 = 0.0;
    let mut fmax_violation: f64 = 0.0;
    for i in 0..=grid {
        for j in 0..=grid {
            let (p, r) = (i as f64 / grid as f64, j as f64 / grid as f64);
            let params = gad(p, r);
            completeness = completeness.max(check_trace_preserving(&gad_channel(params)));
            if p > 0.0 && r < 1.0 {
                match optimal_strengths(params) {
                    Ok(opt) => {
                        fmax_violation = fmax_violation.max(baseline_fidelity(params) - opt.f_max)
                    }
                    Err(e) => problems.push(format!("optimal_strengths(p={p}, r={r}): {e}")),
                }
            }
        }
    }
    if completeness > 1e-12 {
        problems.push(format!("completeness defect {completeness:.2e}"));
    }
    if fmax_violation > 1e-15 {
        problems.push(format!("F_max below baseline by {fmax_violation:.2e}"));
    }

    let mut invalid_states = 0usize;
    for d in draws {
        let states = protected_pipeline(&d.input(), d.ch1, d.ch2, d.m1, d.m2, d.n1, d.n2)
            .map(|(s, _)| s)
            .into_iter()
            .chain(
                protect_pipeline(
                    d.ch1,
                    d.m1,
                    d.n1,
                    &to_density(PureQubit::new(d.theta, d.phi).expect("in range")),
                )
                .map(|(s, _)| s),
            );
        for s in states {
            if DensityMatrix::new(s.matrix().clone()).is_err() {
                invalid_states += 1;
            }
        }
    }
    if invalid_states > 0 {
        problems.push(format!("{invalid_states} invalid output states"));
    }

    let (alpha_spread, ps_offset) = alpha_checks(alpha_scan);
    if alpha_spread > 1e-10 {
        problems.push(format!("alpha dependence {alpha_spread:.2e}"));
    }
    if ps_offset > 2.0 / alpha_scan as f64 {
        problems.push(format!("success-probability argmax off by {ps_offset:.2e}"));
    }

    Check::new(
        "invariant-suite",
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "completeness={completeness:.2e}, F_max - baseline >= {:.2e}, alpha spread={alpha_spread:.2e}, P_s argmax offset={ps_offset:.2e}",
                -fmax_violation
            )
        } else {
            problems.join("; ")
        },
    )
}

/// Returns the largest spread of `(Λ̄₂, Λ₂ at optimum, n₁, n₂)` across `|α|²`
/// and the largest distance between the scanned `P_s` argmax and `1/(1+h)`.
fn alpha_checks(scan: usize) -> (f64, f64) {
    let sets = [
        reference_channels(),
        esd_channels(),
        (gad(0.6, 0.2), gad(0.85, 0.45)),
    ];
    let mut spread: f64 = 0.0;
    let mut offset: f64 = 0.0;
    for (ch1, ch2) in sets {
        let reference =
            optimal_parameters(&EntangledInput::bell(), ch1, ch2).expect("interior channels");
        for a in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let rep = optimal_parameters(
                &EntangledInput::from_alpha_sq(a).expect("in range"),
                ch1,
                ch2,
            )
            .expect("interior channels");
            spread = spread
                .max((rep.lambda2_max - reference.lambda2_max).abs())
                .max((rep.lambda2 - reference.lambda2_max).abs())
                .max((rep.n1_opt - reference.n1_opt).abs())
                .max((rep.n2_opt - reference.n2_opt).abs());
        }
        let target = 1.0 / (1.0 + h_value(ch1, ch2).expect("interior channels"));
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 1..scan {
            let a = k as f64 / scan as f64;
            let ps = optimal_parameters(
                &EntangledInput::from_alpha_sq(a).expect("in range"),
                ch1,
                ch2,
            )
            .map(|r| r.success_prob)
            .unwrap_or(f64::NEG_INFINITY);
            if ps > best.0 {
                best = (ps, a);
            }
        }
        offset = offset.max((best.1 - target).abs());
    }
    (spread, offset)
}

/// Six-state fidelities and average fidelity closed forms equal the pipeline.
pub fn six_state_equivalence(draws: &[Draw]) -> Check {
    let mut worst: f64 = 0.0;
    let mut errors = 0usize;
    for d in draws {
        let (Ok(rep), Ok(pipe)) = (
            average_fidelity_six(d.ch1, d.m1, d.n1),
            six_state_fidelities_pipeline(d.ch1, d.m1, d.n1),
        ) else {
            errors += 1;
            continue;
        };
        let closed = [rep.f0, rep.f1, rep.fe, rep.fe, rep.fe, rep.fe];
        for (c, p) in closed.iter().zip(&pipe) {
            worst = worst.max((c - p).abs());
        }
        worst = worst.max((rep.favg - pipe.iter().sum::<f64>() / six_states().len() as f64).abs());
    }
    Check::new(
        "six-state-equivalence",
        errors == 0 && worst <= 1e-12,
        format!(
            "{} draws, max deviation={worst:.2e}, failed evaluations={errors}",
            draws.len()
        ),
    )
}

/// The quick suite run by the `verify` subcommand.
pub fn run_suite() -> Vec<Check> {
    let draws = halton_draws(2000);
    let axis = |lo: f64, hi: f64, k: usize| {
        (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect::<Vec<_>>()
    };
    let sets = [
        reference_channels(),
        esd_channels(),
        (gad(0.6, 0.2), gad(0.85, 0.45)),
        (gad(0.3, 0.7), gad(0.5, 0.5)),
        (gad(0.99, 0.8), gad(0.75, 0.1)),
    ];
    vec![
        reference_optimum(),
        esd_circumvention(30),
        single_qubit_optimality(&axis(0.2, 0.95, 4), &axis(0.05, 0.9, 4), 200),
        two_qubit_optimality(&sets, 30),
        formula_pipeline_equivalence(&draws),
        oracle_equivalences(&draws),
        six_state_equivalence(&draws),
        invariant_suite(&draws[..200], 50, 400),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_draws_are_deterministic_and_in_range() {
        let a = halton_draws(50);
        assert_eq!(a, halton_draws(50));
        for d in &a {
            assert!(d.ch1.p() >= 0.01 && d.ch1.r() <= 0.99);
            assert!((0.05..=2.0).contains(&d.m1) && (0.05..=2.0).contains(&d.n2));
            assert!((0.01..=0.99).contains(&d.alpha_sq));
        }
        assert!((radical_inverse(3, 2) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn individual_checks_pass() {
        let draws = halton_draws(100);
        for check in [
            reference_optimum(),
            formula_pipeline_equivalence(&draws),
            oracle_equivalences(&draws),
            six_state_equivalence(&draws),
        ] {
            assert!(check.passed, "{check}");
        }
    }

    #[test]
    fn display_tags_outcome() {
        let ok = Check::new("x", true, "fine".into());
        assert_eq!(ok.to_string(), "[PASS] x: fine");
        let bad = Check::new("y", false, "off".into());
        assert!(bad.to_string().starts_with("[FAIL]"));
    }
}
