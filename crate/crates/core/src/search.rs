//! Derivative-free maximization used as an independent check on the closed
//! forms: an exhaustive lattice scan, a bounded Nelder-Mead refinement, and
//! a central-difference stationarity probe.
//!
//! Nothing here is random. Grid scans run in parallel but reduce to the
//! lexicographically smallest argmax, so results are bit-identical across runs.

use std::cell::Cell;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Axis-aligned search region with a lattice resolution per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: Vec<usize>,
}

/// Default strength range `(1e-3, 2]` used when searching measurement strengths.
pub const STRENGTH_LOWER: f64 = 1e-3;
pub const STRENGTH_UPPER: f64 = 2.0;

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() || lower.len() != resolution.len() {
            return Err(Error::Degenerate(
                "search box bounds and resolution must have equal non-zero length",
            ));
        }
        for ((&lo, &hi), &res) in lower.iter().zip(&upper).zip(&resolution) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Degenerate(
                    "search box needs lower < upper in every dimension",
                ));
            }
            if res < 2 {
                return Err(Error::Degenerate(
                    "search box resolution must be at least 2",
                ));
            }
        }
        Ok(SearchBox {
            lower,
            upper,
            resolution,
        })
    }

    /// Same bounds and resolution in every dimension.
    pub fn cube(dim: usize, lower: f64, upper: f64, resolution: usize) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim], vec![resolution; dim])
    }

    /// `(1e-3, 2]^dim` at the given resolution.
    pub fn strengths(dim: usize, resolution: usize) -> Self {
        Self::cube(dim, STRENGTH_LOWER, STRENGTH_UPPER, resolution).expect("valid default box")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    pub fn lattice_size(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Lattice coordinate along one axis.
    pub fn axis_value(&self, axis: usize, i: usize) -> f64 {
        let (lo, hi) = (self.lower[axis], self.upper[axis]);
        let steps = (self.resolution[axis] - 1) as f64;
        if i + 1 == self.resolution[axis] {
            hi
        } else {
            lo + (hi - lo) * i as f64 / steps
        }
    }

    /// Lattice point for a flat index; the first axis varies slowest, so flat
    /// index order is lexicographic order.
    pub fn lattice_point(&self, mut index: usize) -> Vec<f64> {
        let mut point = vec![0.0; self.dim()];
        for axis in (0..self.dim()).rev() {
            let res = self.resolution[axis];
            point[axis] = self.axis_value(axis, index % res);
            index /= res;
        }
        point
    }

    fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// False when the simplex stopped on the evaluation budget.
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Exhaustive scan of every lattice point in `search_box`. Ties go to the
/// lexicographically smallest point. NaN values count as `-inf`.
pub fn grid_maximize<F>(objective: F, search_box: &SearchBox) -> SearchResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let total = search_box.lattice_size();
    let (best_index, value) = (0..total)
        .into_par_iter()
        .map(|k| (k, sanitize(objective(&search_box.lattice_point(k)))))
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    // all -inf: fall back to the first lattice point
    let best_index = if best_index == usize::MAX {
        0
    } else {
        best_index
    };
    SearchResult {
        argmax: search_box.lattice_point(best_index),
        value,
        evaluations: total,
        converged: true,
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
pub const SIMPLEX_DIAMETER_TOL: f64 = 1e-9;
pub const SIMPLEX_MAX_EVALS: usize = 100_000;

/// Nelder-Mead ascent from `start`. Points outside the box evaluate to
/// `-inf`, which keeps the simplex inside. The initial simplex steps 5% of
/// the box width along each axis (backwards if forwards would leave the box).
pub fn simplex_maximize<F>(objective: F, start: &[f64], search_box: &SearchBox) -> SearchResult
where
    F: Fn(&[f64]) -> f64,
{
    let dim = search_box.dim();
    assert_eq!(start.len(), dim, "start point dimension must match the box");
    let evaluations = Cell::new(0usize);
    let eval = |x: &[f64]| -> f64 {
        evaluations.set(evaluations.get() + 1);
        if search_box.contains(x) {
            sanitize(objective(x))
        } else {
            f64::NEG_INFINITY
        }
    };

    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for axis in 0..dim {
        let mut x = start.to_vec();
        let step = 0.05 * search_box.width(axis);
        x[axis] = if x[axis] + step <= search_box.upper[axis] {
            x[axis] + step
        } else {
            x[axis] - step
        };
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
    let mut converged = false;

    loop {
        // best first
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|x| distance(x, &simplex[0]))
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_DIAMETER_TOL {
            converged = true;
            break;
        }
        if evaluations.get() >= SIMPLEX_MAX_EVALS {
            break;
        }

        let worst = dim;
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..worst].iter().map(|x| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |coef: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(&c, &w)| c + coef * (c - w))
                .collect()
        };

        let reflected = toward(REFLECT, &simplex[worst]);
        let f_reflected = eval(&reflected);
        if f_reflected > values[0] {
            let expanded = toward(EXPAND, &simplex[worst]);
            let f_expanded = eval(&expanded);
            if f_expanded > f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected > values[worst - 1] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        // outside contraction when the reflection beat the worst vertex, inside otherwise
        let outside = f_reflected > values[worst];
        let coef = if outside { CONTRACT } else { -CONTRACT };
        let contracted = toward(coef, &simplex[worst]);
        let f_contracted = eval(&contracted);
        let threshold = if outside { f_reflected } else { values[worst] };
        if f_contracted > threshold || (outside && f_contracted == threshold) {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=dim {
            let shrunk: Vec<f64> = best
                .iter()
                .zip(&simplex[i])
                .map(|(&b, &x)| b + SHRINK * (x - b))
                .collect();
            values[i] = eval(&shrunk);
            simplex[i] = shrunk;
        }
    }

    SearchResult {
        argmax: simplex[0].clone(),
        value: values[0],
        evaluations: evaluations.get(),
        converged,
    }
}

/// Grid scan followed by a simplex refinement seeded at the grid argmax.
pub fn grid_then_simplex<F>(objective: F, search_box: &SearchBox) -> SearchResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let seed = grid_maximize(&objective, search_box);
    let mut refined = simplex_maximize(&objective, &seed.argmax, search_box);
    refined.evaluations += seed.evaluations;
    refined
}

/// Largest central-difference gradient component `|f(x+h eᵢ) − f(x−h eᵢ)| / 2h`.
pub fn stationarity_check<F>(objective: F, point: &[f64], step: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut worst: f64 = 0.0;
    let mut x = point.to_vec();
    for i in 0..point.len() {
        x[i] = point[i] + step;
        let plus = objective(&x);
        x[i] = point[i] - step;
        let minus = objective(&x);
        x[i] = point[i];
        worst = worst.max(((plus - minus) / (2.0 * step)).abs());
    }
    worst
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn box_validation() {
        assert!(SearchBox::new(vec![0.0], vec![0.0], vec![5]).is_err());
        assert!(SearchBox::new(vec![0.0], vec![1.0], vec![1]).is_err());
        assert!(SearchBox::new(vec![0.0, 0.0], vec![1.0], vec![5, 5]).is_err());
        assert!(SearchBox::new(vec![], vec![], vec![]).is_err());
        let b = SearchBox::cube(2, 0.0, 1.0, 3).unwrap();
        assert_eq!(b.lattice_point(0), vec![0.0, 0.0]);
        assert_eq!(b.lattice_point(1), vec![0.0, 0.5]);
        assert_eq!(b.lattice_point(8), vec![1.0, 1.0]);
    }

    #[test]
    fn grid_finds_parabola_peak() {
        let b = SearchBox::cube(1, 0.0, 1.0, 101).unwrap();
        let res = grid_maximize(|x| -(x[0] - 0.5).powi(2), &b);
        assert_abs_diff_eq!(res.argmax[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(res.value, 0.0, epsilon = 1e-15);
        assert_eq!(res.evaluations, 101);
    }

    #[test]
    fn grid_tie_break_is_lexicographic() {
        let b = SearchBox::cube(3, -1.0, 2.0, 7).unwrap();
        let res = grid_maximize(|_| 4.2, &b);
        assert_eq!(res.argmax, vec![-1.0, -1.0, -1.0]);
        // two equal maxima: the smaller one wins
        let b = SearchBox::cube(1, -1.0, 1.0, 21).unwrap();
        let res = grid_maximize(|x| -(x[0] * x[0] - 0.25).powi(2), &b);
        assert_abs_diff_eq!(res.argmax[0], -0.5, epsilon = 1e-12);
    }

    #[test]
    fn grid_is_deterministic_and_ignores_nan() {
        let b = SearchBox::cube(2, 0.0, 1.0, 57).unwrap();
        let f = |x: &[f64]| {
            if x[0] > 0.9 {
                f64::NAN
            } else {
                (7.0 * x[0]).sin() * (3.0 * x[1]).cos()
            }
        };
        let first = grid_maximize(f, &b);
        for _ in 0..5 {
            assert_eq!(grid_maximize(f, &b), first);
        }
        assert!(first.argmax[0] <= 0.9);
    }

    #[test]
    fn simplex_converges_on_quadratic_bowl() {
        let b = SearchBox::cube(3, -5.0, 5.0, 2).unwrap();
        let target = [1.25, -0.5, 3.0];
        let f = |x: &[f64]| {
            -x.iter()
                .zip(&target)
                .enumerate()
                .map(|(i, (a, t))| (i + 1) as f64 * (a - t).powi(2))
                .sum::<f64>()
        };
        let res = simplex_maximize(f, &[0.0, 0.0, 0.0], &b);
        assert!(res.converged);
        for (a, t) in res.argmax.iter().zip(&target) {
            assert_abs_diff_eq!(a, t, epsilon = 1e-8);
        }
    }

    #[test]
    fn simplex_is_stationary_at_optimum() {
        let b = SearchBox::cube(2, -2.0, 2.0, 2).unwrap();
        let f = |x: &[f64]| 1.0 - (x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.1).powi(2);
        let res = simplex_maximize(f, &[0.3, -0.1], &b);
        assert!(res.value - 1.0 <= 1e-9);
        assert!(res.value >= 1.0 - 1e-15);
    }

    #[test]
    fn simplex_respects_box() {
        let b = SearchBox::cube(2, 0.0, 1.0, 2).unwrap();
        // unconstrained peak at (3, 3)
        let f = |x: &[f64]| -(x[0] - 3.0).powi(2) - (x[1] - 3.0).powi(2);
        let res = simplex_maximize(f, &[0.5, 0.5], &b);
        assert!(b.contains(&res.argmax));
        assert_abs_diff_eq!(res.argmax[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(res.argmax[1], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn simplex_never_below_seed() {
        let b = SearchBox::cube(2, 0.0, 3.0, 31).unwrap();
        let f = |x: &[f64]| (x[0] * 2.0).sin() + (x[1] * 1.3).cos() * x[0];
        let seed = grid_maximize(f, &b);
        let refined = grid_then_simplex(f, &b);
        assert!(refined.value >= seed.value);
        assert_abs_diff_eq!(refined.value, f(&refined.argmax), epsilon = 1e-14);
    }

    #[test]
    fn stationarity_of_linear_and_quadratic() {
        let slope = stationarity_check(|x| 3.5 * x[0] - 1.25 * x[1], &[0.2, 0.7], 1e-5);
        assert_abs_diff_eq!(slope, 3.5, epsilon = 1e-9);
        let flat = stationarity_check(|x| -(x[0] - 1.0).powi(2), &[1.0], 1e-5);
        assert!(flat <= 1e-9);
    }
}
