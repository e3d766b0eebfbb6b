//! Test-side oracles. Nothing here calls the library solvers: linear systems
//! are solved by a separate Gaussian elimination and programs by brute force
//! over vertices and extreme rays.

#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use avlp_range::problem_file::parse_problem;
use avlp_range::{AvlpProblem, IntervalMatrix, IntervalVector, Realization};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> AvlpProblem {
    parse_problem(&fixture_path(name)).expect("fixture parses").problem
}

/// Gaussian elimination with partial pivoting on a dense copy.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k].abs() < 1e-10 * scale {
            return None;
        }
        m.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..=n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (m[k][n] - s) / m[k][k];
    }
    Some(x)
}

pub fn det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(k, p);
            d = -d;
        }
        d *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    d
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub status: OracleStatus,
    pub value: f64,
}

fn rows_of(g: &DMatrix<f64>) -> Vec<Vec<f64>> {
    g.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// `max c·x s.t. G x <= h` by vertex and extreme ray enumeration. The
/// feasible set must be pointed (rank G = n), which callers ensure by
/// including sign or box rows.
pub fn lp_oracle(c: &DVector<f64>, g: &DMatrix<f64>, h: &DVector<f64>) -> OracleValue {
    let (m, n) = g.shape();
    let rows = rows_of(g);
    let feas_tol = |x: &[f64]| {
        (0..m).all(|i| {
            let lhs: f64 = (0..n).map(|j| rows[i][j] * x[j]).sum();
            lhs <= h[i] + 1e-9 * (1.0 + h[i].abs() + x.iter().fold(0.0f64, |a, v| a.max(v.abs())))
        })
    };
    let mut best = f64::NEG_INFINITY;
    for sub in subsets(m, n) {
        let a: Vec<Vec<f64>> = sub.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<f64> = sub.iter().map(|&i| h[i]).collect();
        if let Some(x) = gauss_solve(&a, &b) {
            if feas_tol(&x) {
                best = best.max((0..n).map(|j| c[j] * x[j]).sum());
            }
        }
    }
    if best == f64::NEG_INFINITY {
        return OracleValue { status: OracleStatus::Infeasible, value: best };
    }
    // extreme rays of {d : G d <= 0}: null vectors of n-1 rows
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    if n == 1 {
        dirs.push(vec![1.0]);
    } else {
        for sub in subsets(m, n - 1) {
            let d: Vec<f64> = (0..n)
                .map(|k| {
                    let minor: Vec<Vec<f64>> = sub
                        .iter()
                        .map(|&i| (0..n).filter(|&j| j != k).map(|j| rows[i][j]).collect())
                        .collect();
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * det(&minor)
                })
                .collect();
            let norm = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if norm > 1e-9 {
                dirs.push(d.iter().map(|v| v / norm).collect());
            }
        }
    }
    for d in dirs {
        for sgn in [1.0, -1.0] {
            let d: Vec<f64> = d.iter().map(|v| sgn * v).collect();
            let recedes = rows.iter().all(|r| (0..n).map(|j| r[j] * d[j]).sum::<f64>() <= 1e-9);
            if recedes && (0..n).map(|j| c[j] * d[j]).sum::<f64>() > 1e-9 {
                return OracleValue { status: OracleStatus::Unbounded, value: f64::INFINITY };
            }
        }
    }
    OracleValue { status: OracleStatus::Optimal, value: best }
}

/// Sign vectors of length `n` in lexicographic order, `-1` before `+1`.
pub fn sign_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|k| (0..n).map(|j| if k >> (n - 1 - j) & 1 == 1 { 1.0 } else { -1.0 }).collect())
        .collect()
}

/// `max c·x s.t. A x - D|x| <= b` as the best of the orthant programs.
pub fn avlp_oracle(r: &Realization) -> OracleValue {
    let (m, n) = r.a.shape();
    let mut best = OracleValue { status: OracleStatus::Infeasible, value: f64::NEG_INFINITY };
    for s in sign_vectors(n) {
        let mut g = DMatrix::zeros(m + n, n);
        let mut h = DVector::zeros(m + n);
        for i in 0..m {
            for j in 0..n {
                g[(i, j)] = r.a[(i, j)] - r.d[(i, j)] * s[j];
            }
            h[i] = r.b[i];
        }
        for j in 0..n {
            g[(m + j, j)] = -s[j];
        }
        let v = lp_oracle(&r.c, &g, &h);
        if v.value > best.value {
            best = v;
        }
    }
    best
}

/// Every solution of `M x + F|x| = g`, one linear system per orthant.
pub fn gave_oracle(m: &DMatrix<f64>, f: &DMatrix<f64>, g: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = g.len();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for s in sign_vectors(n) {
        let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] + f[(i, j)] * s[j]).collect()).collect();
        let b: Vec<f64> = g.iter().copied().collect();
        if let Some(x) = gauss_solve(&a, &b) {
            let x = DVector::from_vec(x);
            let tol = 1e-10 * (1.0 + x.amax());
            if (0..n).all(|j| s[j] * x[j] >= -tol) && out.iter().all(|y| (y - &x).amax() > 1e-8 * (1.0 + x.amax())) {
                out.push(x);
            }
        }
    }
    out
}

/// Spectral radius of a square matrix.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Small random interval AVLP: `n <= 3`, `m <= 6`. Some entries of `D` are
/// zero, some data are points.
pub fn random_problem(rng: &mut impl Rng) -> AvlpProblem {
    let n = rng.random_range(1..=3);
    let m = rng.random_range(n..=6);
    let a_mid = DMatrix::from_fn(m, n, |_, _| uniform(rng, -3.0, 3.0));
    let a_rad = DMatrix::from_fn(m, n, |i, j| uniform(rng, 0.0, 0.3) * a_mid[(i, j)].abs());
    let b_mid = DVector::from_fn(m, |_, _| uniform(rng, -1.0, 6.0));
    let b_rad = DVector::from_fn(m, |_, _| if rng.random_bool(0.5) { uniform(rng, 0.0, 0.5) } else { 0.0 });
    let c_mid = DVector::from_fn(n, |_, _| uniform(rng, -2.0, 2.0));
    let c_rad = DVector::from_fn(n, |_, _| if rng.random_bool(0.5) { uniform(rng, 0.0, 0.3) } else { 0.0 });
    let d_inf = DMatrix::from_fn(m, n, |_, _| if rng.random_bool(0.5) { uniform(rng, 0.0, 0.5) } else { 0.0 });
    let d_sup = DMatrix::from_fn(m, n, |i, j| d_inf[(i, j)] + if rng.random_bool(0.5) { uniform(rng, 0.0, 0.3) } else { 0.0 });
    AvlpProblem::new(
        IntervalMatrix::from_mid_rad(&a_mid, &a_rad).unwrap(),
        IntervalVector::from_mid_rad(&b_mid, &b_rad).unwrap(),
        IntervalVector::from_mid_rad(&c_mid, &c_rad).unwrap(),
        IntervalMatrix::new(d_inf, d_sup).unwrap(),
    )
    .unwrap()
}

/// Instance built around a basis `0..n`: the basic rows are tight at a point
/// `x0` away from the coordinate hyperplanes, the nonbasic rows have slack and
/// `c` lies in the cone of the basic rows. Returns the problem and the basis.
pub fn random_stable_candidate(rng: &mut impl Rng) -> (AvlpProblem, Vec<usize>) {
    let n = rng.random_range(2..=3);
    let m = rng.random_range(n + 1..=6);
    let x0 = DVector::from_fn(n, |_, _| {
        let v = uniform(rng, 1.0, 4.0);
        if rng.random_bool(0.5) { v } else { -v }
    });
    let a = DMatrix::from_fn(m, n, |i, j| {
        let v = uniform(rng, -3.0, 3.0);
        if i < n && i == j { v + 4.0 } else { v }
    });
    let d = DMatrix::from_fn(m, n, |_, _| if rng.random_bool(0.5) { uniform(rng, 0.0, 0.3) } else { 0.0 });
    let delta = uniform(rng, 0.0, 0.03);
    let lhs = &a * &x0 - &d * x0.abs();
    let b = DVector::from_fn(m, |i, _| if i < n { lhs[i] } else { lhs[i] + uniform(rng, 2.0, 8.0) });
    let y = DVector::from_fn(n, |_, _| uniform(rng, 0.5, 2.0));
    let c = a.rows(0, n).transpose() * y;
    let p = AvlpProblem::new(
        IntervalMatrix::from_mid_rad(&a, &(a.abs() * delta)).unwrap(),
        IntervalVector::point(b),
        IntervalVector::point(c),
        IntervalMatrix::point(d),
    )
    .unwrap();
    (p, (0..n).collect())
}
