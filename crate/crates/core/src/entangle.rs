//! Two-qubit entanglement protection.
//!
//! The input `α|00> + β|11>` is sent through two independent GAD channels.
//! Before sending, `diag(1, m1) ⊗ diag(1, m2)` is applied; after receipt,
//! `diag(n1, 1) ⊗ diag(n2, 1)`. The output stays an X-state throughout, so
//! everything reduces to the populations `a..d` (or `A..D`) and the
//! coherence `e` (or `E`).

use num_complex::Complex64;

use crate::channels::{apply_local_pair, gad_channel, GadParams};
use crate::error::{check_positive, Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::qubit::rescale_cost;
use crate::weakmeas::{apply_postselected, WeakMeasurement, MIN_SUCCESS_PROB};

const NORM_TOL: f64 = 1e-12;

/// `α|00> + β|11>` with `|α|² + |β|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntangledInput {
    alpha: Complex64,
    beta: Complex64,
}

impl EntangledInput {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(EntangledInput { alpha, beta })
    }

    /// Real amplitudes `√x |00> + √(1-x) |11>` for `x = |α|²`.
    pub fn from_alpha_sq(alpha_sq: f64) -> Result<Self> {
        crate::error::check_range("alpha_sq", alpha_sq, 0.0, 1.0, "[0, 1]")?;
        Ok(EntangledInput {
            alpha: Complex64::new(alpha_sq.sqrt(), 0.0),
            beta: Complex64::new((1.0 - alpha_sq).sqrt(), 0.0),
        })
    }

    pub fn bell() -> Self {
        Self::from_alpha_sq(0.5).expect("0.5 is in range")
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn beta_sq(&self) -> f64 {
        self.beta.norm_sqr()
    }

    pub fn density(&self) -> DensityMatrix {
        let z = Complex64::new(0.0, 0.0);
        DensityMatrix::from_pure(&[self.alpha, z, z, self.beta]).expect("normalized amplitudes")
    }
}

/// Channel-only population weights. The `0` parts multiply `|α|²` and the
/// `1` parts multiply `|β|²` (times `m1²m2²` when a pre-measurement is
/// applied); none of them depend on the input amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationWeights {
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub c0: f64,
    pub c1: f64,
    pub d0: f64,
    pub d1: f64,
}

impl PopulationWeights {
    pub fn new(ch1: GadParams, ch2: GadParams) -> Self {
        let (u1, u2) = (ch1.keep_ground(), ch2.keep_ground());
        let (v1, v2) = (ch1.keep_excited(), ch2.keep_excited());
        let (x1, x2) = (ch1.p() * ch1.r(), ch2.p() * ch2.r());
        let (y1, y2) = ((1.0 - ch1.p()) * ch1.r(), (1.0 - ch2.p()) * ch2.r());
        PopulationWeights {
            a0: u1 * u2,
            a1: x1 * x2,
            b0: u1 * y2,
            b1: x1 * v2,
            c0: y1 * u2,
            c1: v1 * x2,
            d0: y1 * y2,
            d1: v1 * v2,
        }
    }

    /// `√(b₀c₀ / (b₁c₁))`, if defined.
    pub fn h_from_bc(&self) -> Option<f64> {
        ratio_sqrt(self.b0 * self.c0, self.b1 * self.c1)
    }

    /// `√(a₀d₀ / (a₁d₁))`, if defined.
    pub fn h_from_ad(&self) -> Option<f64> {
        ratio_sqrt(self.a0 * self.d0, self.a1 * self.d1)
    }
}

fn ratio_sqrt(num: f64, den: f64) -> Option<f64> {
    (num > 0.0 && den > 0.0).then(|| (num / den).sqrt())
}

/// Coefficients of an X-state
/// `[[a,0,0,e],[0,b,0,0],[0,0,c,0],[e*,0,0,d]]` in the basis `|00>,|01>,|10>,|11>`.
///
/// After the channels alone `a + b + c + d = 1`. After a pre-measurement the
/// same fields hold the unnormalized `A..E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XStateCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: Complex64,
    pub weights: PopulationWeights,
}

impl XStateCoefficients {
    fn assemble(input: &EntangledInput, ch1: GadParams, ch2: GadParams, m_product: f64) -> Self {
        let w = PopulationWeights::new(ch1, ch2);
        let s0 = input.alpha_sq();
        let s1 = input.beta_sq() * m_product * m_product;
        let coherence = ((1.0 - ch1.r()) * (1.0 - ch2.r())).sqrt();
        XStateCoefficients {
            a: w.a0 * s0 + w.a1 * s1,
            b: w.b0 * s0 + w.b1 * s1,
            c: w.c0 * s0 + w.c1 * s1,
            d: w.d0 * s0 + w.d1 * s1,
            e: input.alpha * input.beta.conj() * m_product * coherence,
            weights: w,
        }
    }

    pub fn population_sum(&self) -> f64 {
        self.a + self.b + self.c + self.d
    }

    /// The X-state matrix with the reversal `diag(n1,1) ⊗ diag(n2,1)` applied
    /// and renormalized; `n1 = n2 = 1` gives the state itself.
    pub fn density(&self, n1: f64, n2: f64) -> Result<DensityMatrix> {
        let norm = reversal_weight(self, n1, n2);
        if norm < MIN_SUCCESS_PROB {
            return Err(Error::PostSelectionFailed(norm));
        }
        let z = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x / norm, 0.0);
        let e = self.e * (n1 * n2 / norm);
        #[rustfmt::skip]
        let entries = vec![
            re(n1 * n1 * n2 * n2 * self.a), z, z, e,
            z, re(n1 * n1 * self.b), z, z,
            z, z, re(n2 * n2 * self.c), z,
            e.conj(), z, z, re(self.d),
        ];
        Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::new(
            4, entries,
        )?))
    }

    /// Swaps the roles of the two qubits (`b <-> c`).
    pub fn swapped(&self) -> Self {
        let w = self.weights;
        XStateCoefficients {
            b: self.c,
            c: self.b,
            weights: PopulationWeights {
                b0: w.c0,
                b1: w.c1,
                c0: w.b0,
                c1: w.b1,
                ..w
            },
            ..*self
        }
    }
}

/// `P = n1²n2²A + n1²B + n2²C + D`.
fn reversal_weight(coeffs: &XStateCoefficients, n1: f64, n2: f64) -> f64 {
    let (n1s, n2s) = (n1 * n1, n2 * n2);
    n1s * n2s * coeffs.a + n1s * coeffs.b + n2s * coeffs.c + coeffs.d
}

/// Closed-form state after the two channels, no measurements.
pub fn channel_degraded_state(
    input: &EntangledInput,
    ch1: GadParams,
    ch2: GadParams,
) -> XStateCoefficients {
    XStateCoefficients::assemble(input, ch1, ch2, 1.0)
}

/// `Λ₁ = 2(|e| − √(bc))`; the concurrence is `max{0, Λ₁}`.
pub fn concurrence_lambda1(coeffs: &XStateCoefficients) -> f64 {
    2.0 * (coeffs.e.norm() - (coeffs.b * coeffs.c).sqrt())
}

/// Closed-form protected state. Returns the unnormalized `A..E` and the
/// overall success probability `P · Π min{1, 1/c²}`.
#[allow(clippy::too_many_arguments)]
pub fn protected_state(
    input: &EntangledInput,
    ch1: GadParams,
    ch2: GadParams,
    m1: f64,
    m2: f64,
    n1: f64,
    n2: f64,
) -> Result<(XStateCoefficients, f64)> {
    for (name, v) in [("m1", m1), ("m2", m2), ("n1", n1), ("n2", n2)] {
        check_positive(name, v)?;
    }
    let coeffs = XStateCoefficients::assemble(input, ch1, ch2, m1 * m2);
    let prob = reversal_weight(&coeffs, n1, n2) * rescale_cost(&[m1, n1, m2, n2]);
    if prob < MIN_SUCCESS_PROB {
        return Err(Error::PostSelectionFailed(prob));
    }
    Ok((coeffs, prob))
}

/// Generic route: post-selected pre-measurement, both channels applied qubit
/// by qubit, post-selected reversal.
#[allow(clippy::too_many_arguments)]
pub fn protected_pipeline(
    input: &EntangledInput,
    ch1: GadParams,
    ch2: GadParams,
    m1: f64,
    m2: f64,
    n1: f64,
    n2: f64,
) -> Result<(DensityMatrix, f64)> {
    let (collapsed, p_pre) =
        apply_postselected(&WeakMeasurement::pre_pair(m1, m2)?, &input.density())?;
    let degraded = apply_local_pair(&gad_channel(ch1), &gad_channel(ch2), &collapsed)?;
    let (out, p_post) = apply_postselected(&WeakMeasurement::post_pair(n1, n2)?, &degraded)?;
    let prob = p_pre * p_post;
    if prob < MIN_SUCCESS_PROB {
        return Err(Error::PostSelectionFailed(prob));
    }
    Ok((out, prob))
}

/// `Λ₂ = 2n1n2(|E| − √(BC)) / (n1²n2²A + n1²B + n2²C + D)`.
pub fn concurrence_lambda2(coeffs: &XStateCoefficients, n1: f64, n2: f64) -> f64 {
    2.0 * n1 * n2 * (coeffs.e.norm() - (coeffs.b * coeffs.c).sqrt())
        / reversal_weight(coeffs, n1, n2)
}

/// Reversal strengths maximizing `Λ₂` for fixed pre-measurement:
/// `n1 = (CD/AB)^¼`, `n2 = (BD/AC)^¼`.
///
/// With both channels noiseless `B = C = 0`; only `n1·n2 = √(D/A)` matters
/// then and the symmetric choice is returned.
pub fn optimal_reversal(coeffs: &XStateCoefficients) -> Result<(f64, f64)> {
    let XStateCoefficients { a, b, c, d, .. } = *coeffs;
    if a <= 0.0 || d <= 0.0 {
        return Err(Error::Degenerate(
            "A or D vanishes: reversal strengths undefined",
        ));
    }
    if b == 0.0 && c == 0.0 {
        let n = (d / a).powf(0.25);
        return Ok((n, n));
    }
    if b <= 0.0 || c <= 0.0 {
        return Err(Error::Degenerate(
            "B or C vanishes: reversal strengths undefined",
        ));
    }
    Ok(((c * d / (a * b)).powf(0.25), (b * d / (a * c)).powf(0.25)))
}

/// `h = √(b₀c₀/(b₁c₁)) = √(a₀d₀/(a₁d₁))`, written with the damping strengths
/// cancelled so it stays defined when a channel is noiseless.
pub fn h_value(ch1: GadParams, ch2: GadParams) -> Result<f64> {
    let (p1, p2) = (ch1.p(), ch2.p());
    let den = p1 * p2 * ch1.keep_excited() * ch2.keep_excited();
    let num = (1.0 - p1) * (1.0 - p2) * ch1.keep_ground() * ch2.keep_ground();
    if den <= 0.0 || num <= 0.0 {
        return Err(Error::Degenerate("h is 0 or infinite at p = 0 or p = 1"));
    }
    Ok((num / den).sqrt())
}

/// Pre-measurement strength `m = m1` (with `m2 = 1`) that maximizes the
/// optimal-reversal concurrence: `m = √h · |α|/|β|`.
pub fn optimal_pre_strength(input: &EntangledInput, ch1: GadParams, ch2: GadParams) -> Result<f64> {
    let h = h_value(ch1, ch2)?;
    if input.beta_sq() == 0.0 {
        return Err(Error::Degenerate("beta = 0: no entanglement to protect"));
    }
    Ok(h.sqrt() * (input.alpha_sq() / input.beta_sq()).sqrt())
}

/// Maximal `Λ₂` over all measurement strengths; independent of `α, β`.
///
/// When the result is negative it is only a stationary value: `Λ₂` then
/// approaches `0⁻` at extreme reversal strengths, and the concurrence is 0
/// either way.
pub fn lambda2_max(ch1: GadParams, ch2: GadParams) -> f64 {
    let (p1, r1, p2, r2) = (ch1.p(), ch1.r(), ch2.p(), ch2.r());
    let num = ((1.0 - r1) * (1.0 - r2)).sqrt()
        - r1 * (p1 * (1.0 - p1) * (1.0 - r2 * p2) * (1.0 - r2 + r2 * p2)).sqrt()
        - r2 * (p2 * (1.0 - p2) * (1.0 - r1 * p1) * (1.0 - r1 + r1 * p1)).sqrt();
    let factor =
        |p: f64, r: f64| r * (p * (1.0 - p)).sqrt() + ((1.0 - r * p) * (1.0 - r + r * p)).sqrt();
    num / (factor(p1, r1) * factor(p2, r2))
}

/// How [`optimal_parameters`] resolved the optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Finite optimal strengths.
    Interior,
    /// A channel has `p = 1`: the optimum is the strong-measurement limit
    /// `m, n1, n2 -> 0`, reached with vanishing success probability.
    ProjectiveLimit,
    /// `α = 0` or `β = 0`: the input is a product state and local
    /// operations cannot create entanglement.
    NoEntanglement,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcurrenceReport {
    /// Unprotected `Λ₁`.
    pub lambda1: f64,
    /// `Λ₂` evaluated at the reported strengths.
    pub lambda2: f64,
    /// Closed-form maximum of `Λ₂`.
    pub lambda2_max: f64,
    /// Optimal `m = m1` (with `m2 = 1`).
    pub m_opt: f64,
    pub n1_opt: f64,
    pub n2_opt: f64,
    pub h: f64,
    /// `|α|² = 1/(1+h)` maximizes the success probability at the optimum.
    pub alpha_sq_opt: f64,
    /// Success probability at the reported strengths for the given input.
    pub success_prob: f64,
    pub regime: Regime,
}

impl ConcurrenceReport {
    pub fn unprotected_concurrence(&self) -> f64 {
        self.lambda1.max(0.0)
    }

    pub fn protected_concurrence(&self) -> f64 {
        self.lambda2_max.max(0.0)
    }
}

/// Optimal measurement strengths, maximal concurrence and success probability.
pub fn optimal_parameters(
    input: &EntangledInput,
    ch1: GadParams,
    ch2: GadParams,
) -> Result<ConcurrenceReport> {
    for ch in [ch1, ch2] {
        if ch.p() <= 0.0 {
            return Err(Error::OutOfRange {
                name: "p",
                value: ch.p(),
                range: "(0, 1]",
            });
        }
        if ch.r() >= 1.0 {
            return Err(Error::OutOfRange {
                name: "r",
                value: ch.r(),
                range: "[0, 1)",
            });
        }
    }
    let lambda1 = concurrence_lambda1(&channel_degraded_state(input, ch1, ch2));

    if input.alpha_sq() == 0.0 || input.beta_sq() == 0.0 {
        let h = h_value(ch1, ch2).unwrap_or(0.0);
        return Ok(ConcurrenceReport {
            lambda1,
            lambda2: 0.0,
            lambda2_max: 0.0,
            m_opt: 1.0,
            n1_opt: 1.0,
            n2_opt: 1.0,
            h,
            alpha_sq_opt: 1.0 / (1.0 + h),
            success_prob: 0.0,
            regime: Regime::NoEntanglement,
        });
    }

    let best = lambda2_max(ch1, ch2);
    if ch1.p() == 1.0 || ch2.p() == 1.0 {
        return Ok(ConcurrenceReport {
            lambda1,
            lambda2: best,
            lambda2_max: best,
            m_opt: 0.0,
            n1_opt: 0.0,
            n2_opt: 0.0,
            h: 0.0,
            alpha_sq_opt: 1.0,
            success_prob: 0.0,
            regime: Regime::ProjectiveLimit,
        });
    }

    let h = h_value(ch1, ch2)?;
    let m = optimal_pre_strength(input, ch1, ch2)?;
    let coeffs = XStateCoefficients::assemble(input, ch1, ch2, m);
    let (n1, n2) = optimal_reversal(&coeffs)?;
    let (_, success_prob) = protected_state(input, ch1, ch2, m, 1.0, n1, n2)?;
    Ok(ConcurrenceReport {
        lambda1,
        lambda2: concurrence_lambda2(&coeffs, n1, n2),
        lambda2_max: best,
        m_opt: m,
        n1_opt: n1,
        n2_opt: n2,
        h,
        alpha_sq_opt: 1.0 / (1.0 + h),
        success_prob,
        regime: Regime::Interior,
    })
}

/// `Λ₂` at pre-strength `m` (with `m2 = 1`) and the optimal reversal for that
/// `m`. Used for concurrence-versus-`m` curves.
pub fn lambda2_with_optimal_reversal(
    input: &EntangledInput,
    ch1: GadParams,
    ch2: GadParams,
    m: f64,
) -> Result<(f64, f64, f64, f64)> {
    let coeffs = XStateCoefficients::assemble(input, ch1, ch2, m);
    let (n1, n2) = optimal_reversal(&coeffs)?;
    let prob = reversal_weight(&coeffs, n1, n2) * rescale_cost(&[m, n1, n2]);
    Ok((concurrence_lambda2(&coeffs, n1, n2), n1, n2, prob))
}
