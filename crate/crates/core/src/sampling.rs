//! Realization sampling used as an uncertified cross-check of the range.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::lp::Status;
use crate::options::Options;
use crate::problem::{AvlpProblem, Realization};

/// Largest number of realizations a grid may have.
pub const GRID_LIMIT: usize = 1_000_000;

fn draw(iv: Interval, rng: &mut impl Rng) -> f64 {
    if iv.inf < iv.sup {
        rng.random_range(iv.inf..=iv.sup)
    } else {
        iv.inf
    }
}

fn draw_matrix(m: &IntervalMatrix, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut out = m.inf().clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = draw(m.get(i, j), rng);
        }
    }
    out
}

fn draw_vector(v: &IntervalVector, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().map(|iv| draw(iv, rng)))
}

/// Every coefficient independently uniform in its interval.
pub fn sample_realization(p: &AvlpProblem, rng: &mut impl Rng) -> Realization {
    Realization {
        a: draw_matrix(p.a(), rng),
        b: draw_vector(p.b(), rng),
        c: draw_vector(p.c(), rng),
        d: draw_matrix(p.d(), rng),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub samples: usize,
    pub optimal: usize,
    pub infeasible: usize,
    pub unbounded: usize,
    /// Smallest and largest value observed, with `-inf` for infeasible and
    /// `+inf` for unbounded realizations.
    #[serde(serialize_with = "crate::report::serialize_ext")]
    pub min: f64,
    #[serde(serialize_with = "crate::report::serialize_ext")]
    pub max: f64,
    pub argmin: usize,
    pub argmax: usize,
}

fn summarize(values: &[(Status, f64)]) -> OracleSummary {
    let mut s = OracleSummary {
        samples: values.len(),
        optimal: 0,
        infeasible: 0,
        unbounded: 0,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: 0,
        argmax: 0,
    };
    for (k, &(status, v)) in values.iter().enumerate() {
        match status {
            Status::Optimal => s.optimal += 1,
            Status::Infeasible => s.infeasible += 1,
            Status::Unbounded => s.unbounded += 1,
        }
        if v < s.min {
            s.min = v;
            s.argmin = k;
        }
        if v > s.max {
            s.max = v;
            s.argmax = k;
        }
    }
    s
}

/// Solves every realization and summarizes the values.
pub fn oracle_over(realizations: &[Realization], opts: &Options) -> Result<OracleSummary> {
    let values = realizations
        .par_iter()
        .map(|r| r.solve(opts.orthant_cap, opts.tol).map(|o| (o.status, o.value)))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&values))
}

/// `samples` uniformly drawn realizations. The stream is fixed by `seed`.
pub fn sample_realizations(p: &AvlpProblem, samples: usize, seed: u64) -> Vec<Realization> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| sample_realization(p, &mut rng)).collect()
}

pub fn sample_oracle(p: &AvlpProblem, samples: usize, seed: u64, opts: &Options) -> Result<OracleSummary> {
    oracle_over(&sample_realizations(p, samples, seed), opts)
}

/// Coefficient grid: each nondegenerate interval is replaced by `points`
/// equally spaced values, endpoints included, and every combination is solved.
pub fn grid_realizations(p: &AvlpProblem, points: usize) -> Result<Vec<Realization>> {
    if points < 2 {
        return Err(Error::Input("a grid needs at least 2 points per interval".into()));
    }
    let (m, n) = (p.nrows(), p.nvars());
    // (which array, flat row-major position, interval)
    let mut axes: Vec<(u8, usize, Interval)> = Vec::new();
    for i in 0..m {
        for j in 0..n {
            axes.push((0, i * n + j, p.a().get(i, j)));
        }
    }
    for i in 0..m {
        axes.push((1, i, p.b().get(i)));
    }
    for j in 0..n {
        axes.push((2, j, p.c().get(j)));
    }
    for i in 0..m {
        for j in 0..n {
            axes.push((3, i * n + j, p.d().get(i, j)));
        }
    }
    axes.retain(|(_, _, iv)| iv.inf < iv.sup);
    let total = axes
        .iter()
        .try_fold(1usize, |acc, _| acc.checked_mul(points).filter(|&t| t <= GRID_LIMIT))
        .ok_or_else(|| {
            Error::Input(format!(
                "{} uncertain coefficients at {points} points exceed the grid limit of {GRID_LIMIT}",
                axes.len()
            ))
        })?;
    let base = p.midpoint();
    let mut out = Vec::with_capacity(total);
    for k in 0..total {
        let mut r = base.clone();
        let mut rest = k;
        for (which, pos, iv) in axes.iter().rev() {
            let step = rest % points;
            rest /= points;
            let v = iv.inf + (iv.sup - iv.inf) * step as f64 / (points - 1) as f64;
            match which {
                0 => r.a[(pos / n, pos % n)] = v,
                1 => r.b[*pos] = v,
                2 => r.c[*pos] = v,
                _ => r.d[(pos / n, pos % n)] = v,
            }
        }
        out.push(r);
    }
    Ok(out)
}

pub fn grid_oracle(p: &AvlpProblem, points: usize, opts: &Options) -> Result<OracleSummary> {
    oracle_over(&grid_realizations(p, points)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn one_interval() -> AvlpProblem {
        // max x s.t. a x <= 1, x <= 10, a in [0.5, 2]
        AvlpProblem::new(
            IntervalMatrix::new(dmatrix![0.5; 1.0], dmatrix![2.0; 1.0]).unwrap(),
            IntervalVector::point(dvector![1.0, 10.0]),
            IntervalVector::point(dvector![1.0]),
            IntervalMatrix::point(dmatrix![0.0; 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn grid_covers_endpoints() {
        let p = one_interval();
        let grid = grid_realizations(&p, 4).unwrap();
        let a: Vec<f64> = grid.iter().map(|r| r.a[(0, 0)]).collect();
        assert_eq!(a, vec![0.5, 1.0, 1.5, 2.0]);
        let s = grid_oracle(&p, 4, &Options::default()).unwrap();
        assert!((s.min - 0.5).abs() < 1e-12);
        assert!((s.max - 2.0).abs() < 1e-12);
        assert_eq!((s.argmin, s.argmax), (3, 0));
    }

    #[test]
    fn sampling_is_seeded() {
        let p = one_interval();
        let opts = Options::default();
        let a = sample_oracle(&p, 50, 7, &opts).unwrap();
        let b = sample_oracle(&p, 50, 7, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.min >= 0.5 - 1e-12 && a.max <= 2.0 + 1e-12);
        assert_eq!(a.optimal, 50);
    }

    #[test]
    fn grid_limit() {
        let a = IntervalMatrix::new(DMatrix::zeros(3, 3), DMatrix::from_element(3, 3, 1.0)).unwrap();
        let p = AvlpProblem::new(
            a,
            IntervalVector::point(DVector::zeros(3)),
            IntervalVector::point(DVector::zeros(3)),
            IntervalMatrix::point(DMatrix::zeros(3, 3)),
        )
        .unwrap();
        assert!(grid_realizations(&p, 10).is_err());
    }
}
