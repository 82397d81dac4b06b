//! Amplitude-damping and generalized-amplitude-damping channels.
//!
//! Channels are applied as Kraus sums. [`apply_via_dilation`] computes the
//! same map from the unitary system-environment interaction followed by a
//! partial trace, and serves as an independent check of the Kraus route.

use num_complex::Complex64;

use crate::error::{check_range, Error, Result};
use crate::linalg::{tensor, ComplexMatrix, DensityMatrix};

/// Parameters `{p, r}` of a generalized amplitude damping channel.
///
/// `p` weights decay toward `|0>` against excitation toward `|1>`; `r` is the
/// damping strength. The channel's fixed point is `diag(p, 1 - p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GadParams {
    p: f64,
    r: f64,
}

impl GadParams {
    pub fn new(p: f64, r: f64) -> Result<Self> {
        check_range("p", p, 0.0, 1.0, "[0, 1]")?;
        check_range("r", r, 0.0, 1.0, "[0, 1]")?;
        Ok(GadParams { p, r })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Population of `|0>` after the channel acts on `|0><0|`: `1 - r + pr`.
    #[inline]
    pub(crate) fn keep_ground(&self) -> f64 {
        1.0 - self.r + self.p * self.r
    }

    /// Population of `|1>` after the channel acts on `|1><1|`: `1 - pr`.
    #[inline]
    pub(crate) fn keep_excited(&self) -> f64 {
        1.0 - self.p * self.r
    }
}

/// Ordered list of Kraus operators of equal dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::Degenerate(
                "a channel needs at least one Kraus operator",
            ));
        };
        let dim = first.dim();
        if let Some(bad) = operators.iter().find(|op| op.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(KrausChannel { operators })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![ComplexMatrix::identity(dim)?])
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    /// Lifts a single-qubit channel to act on one qubit of a pair.
    pub fn on_qubit(&self, target: Qubit) -> Result<KrausChannel> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let id = ComplexMatrix::identity(2)?;
        let ops = self
            .operators
            .iter()
            .map(|e| match target {
                Qubit::First => tensor(e, &id),
                Qubit::Second => tensor(&id, e),
            })
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(ops)
    }
}

/// Which qubit of a two-qubit register an operation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Qubit {
    First,
    Second,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Zero-temperature amplitude damping: `E0 = diag(1, √(1-r))`, `E1 = √r |0><1|`.
pub fn ad_channel(r: f64) -> Result<KrausChannel> {
    check_range("r", r, 0.0, 1.0, "[0, 1]")?;
    KrausChannel::new(vec![
        ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - r).sqrt()])?,
        ComplexMatrix::from_real(2, &[0.0, r.sqrt(), 0.0, 0.0])?,
    ])
}

/// The four Kraus operators of the generalized amplitude damping channel.
/// With `p = 1` the last two vanish and the first two are those of
/// [`ad_channel`].
pub fn gad_channel(params: GadParams) -> KrausChannel {
    let GadParams { p, r } = params;
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let (sr, s1r) = (r.sqrt(), (1.0 - r).sqrt());
    let ops = vec![
        ComplexMatrix::from_real(2, &[sp, 0.0, 0.0, sp * s1r]),
        ComplexMatrix::from_real(2, &[0.0, sp * sr, 0.0, 0.0]),
        ComplexMatrix::from_real(2, &[sq * s1r, 0.0, 0.0, sq]),
        ComplexMatrix::from_real(2, &[0.0, 0.0, sq * sr, 0.0]),
    ]
    .into_iter()
    .collect::<Result<Vec<_>>>()
    .expect("2x2 operators");
    KrausChannel { operators: ops }
}

/// `Σ Eᵢ ρ Eᵢ†`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: rho.dim(),
        });
    }
    let mut acc = ComplexMatrix::zeros(rho.dim())?;
    for e in &ch.operators {
        let term = e.matmul(rho.matrix())?.matmul(&e.adjoint())?;
        acc = &acc + &term;
    }
    Ok(DensityMatrix::from_matrix_unchecked(acc))
}

/// Applies `ch1` to the first qubit and `ch2` to the second qubit of a
/// two-qubit state, one after the other.
pub fn apply_local_pair(
    ch1: &KrausChannel,
    ch2: &KrausChannel,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    let after_first = apply_channel(&ch1.on_qubit(Qubit::First)?, rho)?;
    apply_channel(&ch2.on_qubit(Qubit::Second)?, &after_first)
}

/// `‖Σ Eᵢ†Eᵢ − I‖_max`.
pub fn check_trace_preserving(ch: &KrausChannel) -> f64 {
    let dim = ch.dim();
    let mut acc = ComplexMatrix::zeros(dim).expect("channel dimension is valid");
    for e in &ch.operators {
        acc = &acc + &(&e.adjoint() * e);
    }
    acc.max_abs_diff(&ComplexMatrix::identity(dim).expect("valid dimension"))
}

/// Number of environment basis states (two environment qubits).
const ENV: usize = 4;

/// Isometry `|s>|00>_E -> Σ amplitude |s'>|e>_E` of the system-environment
/// interaction. Row index is `s' * 4 + e` with the environment in binary
/// order `|00>, |01>, |10>, |11>`; column index is the input system state.
fn dilation_isometry(params: GadParams) -> [[Complex64; 2]; 2 * ENV] {
    let GadParams { p, r } = params;
    let mut v = [[Complex64::new(0.0, 0.0); 2]; 2 * ENV];
    let idx = |s: usize, e: usize| s * ENV + e;
    // |0>_S|00>_E
    v[idx(0, 0b00)][0] = real(p.sqrt());
    v[idx(0, 0b01)][0] = real((1.0 - p).sqrt() * (1.0 - r).sqrt());
    v[idx(1, 0b11)][0] = real((1.0 - p).sqrt() * r.sqrt());
    // |1>_S|00>_E
    v[idx(1, 0b00)][1] = real(p.sqrt() * (1.0 - r).sqrt());
    v[idx(0, 0b10)][1] = real((p * r).sqrt());
    v[idx(1, 0b01)][1] = real((1.0 - p).sqrt());
    v
}

/// Applies the GAD channel by evolving system plus a two-qubit environment
/// prepared in `|00>` and tracing the environment out.
pub fn apply_via_dilation(params: GadParams, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let params = GadParams::new(params.p, params.r)?;
    let v = dilation_isometry(params);
    let m = rho.matrix();
    let mut out = vec![Complex64::new(0.0, 0.0); 4];
    for s in 0..2 {
        for t in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..ENV {
                let row = &v[s * ENV + e];
                let col = &v[t * ENV + e];
                for i in 0..2 {
                    for j in 0..2 {
                        acc += row[i] * m[(i, j)] * col[j].conj();
                    }
                }
            }
            out[s * 2 + t] = acc;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(ComplexMatrix::new(
        2, out,
    )?))
}
