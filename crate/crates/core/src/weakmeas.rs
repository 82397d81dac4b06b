//! Diagonal weak measurements and post-selection.
//!
//! A weak measurement is stored as its raw diagonal, e.g. `diag(1, m)` before
//! the channel or `diag(n, 1)` after it. Raw strengths may exceed 1; the
//! physical operator is the raw diagonal divided by `max(1, largest entry)`,
//! and success probabilities are always computed on that physical operator,
//! so a rescaling by `1/c` costs a factor `1/c²` in probability.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{conjugate_by, ComplexMatrix, DensityMatrix};

/// Below this success probability post-selection is treated as impossible.
pub const MIN_SUCCESS_PROB: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct WeakMeasurement {
    diagonal: Vec<f64>,
}

impl WeakMeasurement {
    pub fn from_diagonal(diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.len() != 2 && diagonal.len() != 4 {
            return Err(Error::UnsupportedDimension(diagonal.len()));
        }
        if let Some(&bad) = diagonal.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::OutOfRange {
                name: "strength",
                value: bad,
                range: "[0, inf)",
            });
        }
        Ok(WeakMeasurement { diagonal })
    }

    /// Pre-channel partial collapse `diag(1, m)`.
    pub fn pre(m: f64) -> Result<Self> {
        Self::from_diagonal(vec![1.0, m])
    }

    /// Post-channel reversal `diag(n, 1)`.
    pub fn post(n: f64) -> Result<Self> {
        Self::from_diagonal(vec![n, 1.0])
    }

    /// `diag(1, m1) ⊗ diag(1, m2)`.
    pub fn pre_pair(m1: f64, m2: f64) -> Result<Self> {
        Self::pre(m1)?;
        Self::pre(m2)?;
        Self::from_diagonal(vec![1.0, m2, m1, m1 * m2])
    }

    /// `diag(n1, 1) ⊗ diag(n2, 1)`.
    pub fn post_pair(n1: f64, n2: f64) -> Result<Self> {
        Self::post(n1)?;
        Self::post(n2)?;
        Self::from_diagonal(vec![n1 * n2, n1, n2, 1.0])
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn qubit_count(&self) -> usize {
        if self.diagonal.len() == 2 {
            1
        } else {
            2
        }
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn raw_operator(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.diagonal).expect("dimension 2 or 4")
    }
}

/// Rescales the raw diagonal so its largest entry is at most 1.
/// Returns the physical operator and the applied scale `1 / max(1, largest)`.
pub fn physical_form(wm: &WeakMeasurement) -> (ComplexMatrix, f64) {
    let largest = wm.diagonal.iter().copied().fold(1.0, f64::max);
    let scale = 1.0 / largest;
    let diag: Vec<Complex64> = wm
        .diagonal
        .iter()
        .map(|&x| Complex64::new(x * scale, 0.0))
        .collect();
    (
        ComplexMatrix::from_diagonal(&diag).expect("dimension 2 or 4"),
        scale,
    )
}

/// Applies the physical measurement operator `K` and keeps the desired
/// outcome: returns `KρK† / tr(KρK†)` and the success probability `tr(KρK†)`.
pub fn apply_postselected(
    wm: &WeakMeasurement,
    rho: &DensityMatrix,
) -> Result<(DensityMatrix, f64)> {
    let (op, _) = physical_form(wm);
    let (out, prob) = conjugate_by(&op, rho)?;
    if prob < MIN_SUCCESS_PROB {
        return Err(Error::PostSelectionFailed(prob));
    }
    let state = DensityMatrix::from_matrix_unchecked(out.scale_real(1.0 / prob));
    Ok((state, prob.min(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{to_density, PureQubit};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn physical_form_examples() {
        let (op, scale) = physical_form(&WeakMeasurement::pre(0.5).unwrap());
        assert_eq!(op, ComplexMatrix::from_real_diagonal(&[1.0, 0.5]).unwrap());
        assert_eq!(scale, 1.0);

        let (op, scale) = physical_form(&WeakMeasurement::pre(2.0).unwrap());
        assert_eq!(op, ComplexMatrix::from_real_diagonal(&[0.5, 1.0]).unwrap());
        assert_eq!(scale, 0.5);

        let wm = WeakMeasurement::post_pair(0.5, 0.5).unwrap();
        let (op, scale) = physical_form(&wm);
        assert_eq!(op, wm.raw_operator());
        assert_eq!(scale, 1.0);
        assert_eq!(wm.qubit_count(), 2);
    }

    #[test]
    fn pair_constructors_are_tensor_products() {
        let (m1, m2, n1, n2) = (0.3, 1.7, 0.8, 0.4);
        let pre = WeakMeasurement::pre_pair(m1, m2).unwrap();
        let expected = crate::linalg::tensor(
            &WeakMeasurement::pre(m1).unwrap().raw_operator(),
            &WeakMeasurement::pre(m2).unwrap().raw_operator(),
        )
        .unwrap();
        assert_eq!(pre.raw_operator(), expected);
        let post = WeakMeasurement::post_pair(n1, n2).unwrap();
        let expected = crate::linalg::tensor(
            &WeakMeasurement::post(n1).unwrap().raw_operator(),
            &WeakMeasurement::post(n2).unwrap().raw_operator(),
        )
        .unwrap();
        assert_eq!(post.raw_operator(), expected);
        // scale of the pair equals the product of the per-qubit scales
        let (_, s) = physical_form(&pre);
        assert_abs_diff_eq!(s, 1.0 / 1.7, epsilon = 1e-15);
    }

    #[test]
    fn invalid_strengths() {
        assert!(WeakMeasurement::pre(-0.1).is_err());
        assert!(WeakMeasurement::post(f64::NAN).is_err());
        assert!(WeakMeasurement::from_diagonal(vec![1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn apply_postselected_examples() {
        let rho = to_density(PureQubit::new(1.0, 2.0).unwrap());
        let (state, prob) = apply_postselected(&WeakMeasurement::pre(1.0).unwrap(), &rho).unwrap();
        assert!(state.max_abs_diff(&rho) < 1e-15);
        assert_abs_diff_eq!(prob, 1.0, epsilon = 1e-15);

        let plus = to_density(PureQubit::equatorial(0.0));
        let (state, prob) = apply_postselected(&WeakMeasurement::pre(0.0).unwrap(), &plus).unwrap();
        assert!(state.max_abs_diff(&to_density(PureQubit::zero())) < 1e-15);
        assert_abs_diff_eq!(prob, 0.5, epsilon = 1e-15);

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let (state, prob) =
            apply_postselected(&WeakMeasurement::pre(0.5).unwrap(), &mixed).unwrap();
        let expected =
            DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.8, 0.2]).unwrap()).unwrap();
        assert!(state.max_abs_diff(&expected) < 1e-15);
        assert_abs_diff_eq!(prob, 0.625, epsilon = 1e-15);
    }

    #[test]
    fn impossible_postselection_is_an_error() {
        let one = to_density(PureQubit::one());
        assert!(matches!(
            apply_postselected(&WeakMeasurement::pre(0.0).unwrap(), &one),
            Err(Error::PostSelectionFailed(_))
        ));
    }

    #[test]
    fn unit_probability_only_for_flat_diagonals() {
        let states = [
            to_density(PureQubit::zero()),
            to_density(PureQubit::one()),
            to_density(PureQubit::equatorial(0.4)),
        ];
        for flat in [1.0, 2.5] {
            let wm = WeakMeasurement::from_diagonal(vec![flat, flat]).unwrap();
            for rho in &states {
                let (_, prob) = apply_postselected(&wm, rho).unwrap();
                assert_abs_diff_eq!(prob, 1.0, epsilon = 1e-15);
            }
        }
        // unequal entries lose probability on at least one basis state
        for diag in [[1.0, 0.9], [0.3, 1.0], [2.0, 1.0]] {
            let wm = WeakMeasurement::from_diagonal(diag.to_vec()).unwrap();
            let worst = states
                .iter()
                .map(|rho| apply_postselected(&wm, rho).unwrap().1)
                .fold(1.0, f64::min);
            assert!(worst < 1.0 - 1e-3);
        }
    }

    proptest! {
        #[test]
        fn output_is_state_and_probability_in_unit_interval(
            m in 0.0f64..3.0, theta in 0.0f64..PI, phi in 0.0f64..TAU,
        ) {
            let rho = to_density(PureQubit::new(theta, phi).unwrap());
            if let Ok((state, prob)) = apply_postselected(&WeakMeasurement::pre(m).unwrap(), &rho) {
                prop_assert!((0.0..=1.0).contains(&prob));
                prop_assert!(DensityMatrix::new(state.matrix().clone()).is_ok());
            }
        }

        #[test]
        fn global_rescaling_leaves_state_invariant(
            m in 0.01f64..2.0, c in 0.01f64..3.0, theta in 0.1f64..3.0, phi in 0.0f64..TAU,
        ) {
            let rho = to_density(PureQubit::new(theta, phi).unwrap());
            let base = WeakMeasurement::from_diagonal(vec![1.0, m]).unwrap();
            let scaled = WeakMeasurement::from_diagonal(vec![c, c * m]).unwrap();
            let (s1, p1) = apply_postselected(&base, &rho).unwrap();
            let (s2, p2) = apply_postselected(&scaled, &rho).unwrap();
            prop_assert!(s1.max_abs_diff(&s2) <= 1e-12);
            if m <= 1.0 && c * 1.0f64.max(m) <= 1.0 {
                prop_assert!((p2 - c * c * p1).abs() <= 1e-12);
            }
        }
    }
}
