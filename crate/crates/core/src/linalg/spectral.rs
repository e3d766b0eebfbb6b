//! Spectral quantities for the regularity tests: symmetric eigenvalues by
//! cyclic Jacobi rotations, singular values through the Gram matrix, and a
//! Perron bound for nonnegative matrices.

use nalgebra::{DMatrix, DVector};

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "symmetric_eigenvalues needs a square matrix");
    let mut m = a.clone();
    let frob = m.norm();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Singular values, ascending.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let gram = if a.nrows() >= a.ncols() {
        a.transpose() * a
    } else {
        a * a.transpose()
    };
    symmetric_eigenvalues(&gram)
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect()
}

/// Result of [`perron_bound`].
#[derive(Debug, Clone)]
pub struct PerronBound {
    /// Upper bound on the spectral radius.
    pub upper: f64,
    /// Best lower Collatz–Wielandt quotient seen.
    pub lower: f64,
    /// Positive vector `v` with `A v <= upper * v`.
    pub vector: DVector<f64>,
    pub iterations: usize,
}

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITERS: usize = 10_000;

/// Spectral radius bound for a nonnegative square matrix by power iteration
/// from the all-ones vector.
///
/// The iteration is run on `A + I`, which keeps every iterate strictly
/// positive and damps the oscillation of periodic matrices. For any positive
/// `x` the Collatz–Wielandt quotients bracket the spectral radius,
/// `min_i (Ax)_i / x_i <= ρ(A) <= max_i (Ax)_i / x_i`, so `upper` is a valid
/// bound whether or not the iteration converged.
pub fn perron_bound(a: &DMatrix<f64>) -> PerronBound {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "perron_bound needs a square matrix");
    debug_assert!(a.iter().all(|&v| v >= 0.0));
    let mut x = DVector::from_element(n, 1.0);
    if n == 0 || a.amax() == 0.0 {
        return PerronBound {
            upper: 0.0,
            lower: 0.0,
            vector: x,
            iterations: 0,
        };
    }
    let mut best_upper = f64::INFINITY;
    let mut best_vec = x.clone();
    let mut lower = 0.0_f64;
    let mut iterations = 0;
    for k in 0..POWER_MAX_ITERS {
        iterations = k + 1;
        let ax = a * &x;
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..n {
            let q = ax[i] / x[i];
            hi = hi.max(q);
            lo = lo.min(q);
        }
        if hi < best_upper {
            best_upper = hi;
            best_vec = x.clone();
        }
        lower = lower.max(lo);
        if best_upper - lower <= POWER_TOL * best_upper {
            break;
        }
        let y = ax + &x;
        let ymax = y.max();
        x = y / ymax;
    }
    PerronBound {
        upper: best_upper,
        lower,
        vector: best_vec,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn jacobi_matches_known_spectrum() {
        let a = dmatrix![2.0, 1.0, 0.0; 1.0, 2.0, 1.0; 0.0, 1.0, 2.0];
        let eig = symmetric_eigenvalues(&a);
        let s2 = 2f64.sqrt();
        for (got, want) in eig.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn singular_values_of_rank_one_ones() {
        let sv = singular_values(&DMatrix::from_element(2, 2, 1.0));
        assert!(sv[0].abs() < 1e-7);
        assert!((sv[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn perron_bound_on_nilpotent_and_periodic() {
        let nil = dmatrix![0.0, 2.0; 0.0, 0.0];
        let b = perron_bound(&nil);
        assert!(b.upper < 1e-3, "{}", b.upper);
        let per = dmatrix![0.0, 1.0; 1.0, 0.0];
        let b = perron_bound(&per);
        assert!((b.upper - 1.0).abs() < 1e-9);
    }

    #[test]
    fn perron_bound_is_upper() {
        let a = dmatrix![0.2, 0.7; 0.4, 0.1];
        // largest root of λ² - tr·λ + det
        let tr: f64 = 0.3;
        let det: f64 = 0.02 - 0.28;
        let rho = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
        let b = perron_bound(&a);
        assert!(b.upper >= rho - 1e-15);
        assert!(b.upper - rho < 1e-10);
        assert!((&a * &b.vector - &b.vector * b.upper).max() <= 1e-12);
    }
}
