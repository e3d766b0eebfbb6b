//! Square generalized absolute value equations `M x + F |x| = g`.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{IntervalMatrix, SignVector};
use crate::linalg::solve_square;
use crate::regularity::verify_regular;

#[derive(Debug, Clone, PartialEq)]
pub struct GaveSystem {
    pub m: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub g: DVector<f64>,
}

impl GaveSystem {
    pub fn new(m: DMatrix<f64>, f: DMatrix<f64>, g: DVector<f64>) -> Result<Self> {
        let n = m.nrows();
        if !m.is_square() || f.shape() != (n, n) || g.len() != n || n == 0 {
            return Err(Error::dim(format!(
                "GAVE with M {}x{}, F {}x{}, g of length {}",
                m.nrows(),
                m.ncols(),
                f.nrows(),
                f.ncols(),
                g.len()
            )));
        }
        Ok(GaveSystem { m, f, g })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn residual(&self, x: &DVector<f64>) -> f64 {
        (&self.m * x + &self.f * x.abs() - &self.g).amax()
    }

    pub fn residual_bound(&self) -> f64 {
        1e-8 * (1.0 + self.g.amax())
    }

    /// `[M - |F|, M + |F|]`; its regularity makes the solution unique.
    pub fn interval_matrix(&self) -> IntervalMatrix {
        IntervalMatrix::from_mid_rad(&self.m, &self.f.abs()).expect("nonnegative radius")
    }

    /// Solution of the linear system of orthant `s`, if it is nonsingular.
    fn solve_in(&self, s: &SignVector) -> Option<DVector<f64>> {
        let mut a = self.m.clone();
        for j in 0..self.dim() {
            let sj = s.get(j);
            for i in 0..self.dim() {
                a[(i, j)] += self.f[(i, j)] * sj;
            }
        }
        solve_square(&a, &self.g).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaveMethod {
    SignIteration,
    Enumeration,
}

#[derive(Debug, Clone)]
pub struct GaveSolution {
    pub x: DVector<f64>,
    pub sign: SignVector,
    pub method: GaveMethod,
    /// Linear solves performed.
    pub solves: usize,
    pub residual: f64,
    /// Whether uniqueness was established by a regularity test.
    pub unique: bool,
}

fn consistent(s: &SignVector, x: &DVector<f64>) -> bool {
    s.admits(x, 1e-12 * (1.0 + x.amax()))
}

/// Sign fixed-point iteration from `sgn(M⁻¹ g)`, falling back to trying all
/// `2^n` orthants in lexicographic order after `n + 2` distinct signs.
pub fn solve_gave(sys: &GaveSystem, cap: usize) -> Result<GaveSolution> {
    let n = sys.dim();
    let unique = verify_regular(&sys.interval_matrix())?.is_verified();
    if !unique {
        log::warn!("regularity of [M - |F|, M + |F|] not verified; the GAVE solution may not be unique");
    }
    let bound = sys.residual_bound();
    let mut solves = 0;

    let mut s = match solve_square(&sys.m, &sys.g) {
        Ok(x0) => SignVector::of(&x0),
        Err(_) => SignVector::ones(n),
    };
    let mut seen = HashSet::new();
    while seen.len() < n + 2 && seen.insert(s.clone()) {
        solves += 1;
        let Some(x) = sys.solve_in(&s) else { break };
        if consistent(&s, &x) {
            let residual = sys.residual(&x);
            if residual <= bound {
                return Ok(GaveSolution {
                    sign: SignVector::of(&x),
                    x,
                    method: GaveMethod::SignIteration,
                    solves,
                    residual,
                    unique,
                });
            }
            break;
        }
        s = SignVector::of(&x);
    }

    if n > cap || n >= usize::BITS as usize {
        return Err(Error::SizeCap { n, cap });
    }
    for s in SignVector::all(n) {
        solves += 1;
        let Some(x) = sys.solve_in(&s) else { continue };
        if !consistent(&s, &x) {
            continue;
        }
        let residual = sys.residual(&x);
        if residual <= bound {
            return Ok(GaveSolution {
                sign: SignVector::of(&x),
                x,
                method: GaveMethod::Enumeration,
                solves,
                residual,
                unique,
            });
        }
    }
    Err(Error::Gave(if unique {
        "no sign-consistent solution although the solution is unique".into()
    } else {
        "no sign-consistent solution found".into()
    }))
}

/// Every sign-consistent solution, by trying all orthants.
pub fn enumerate_gave(sys: &GaveSystem, cap: usize) -> Result<Vec<DVector<f64>>> {
    let n = sys.dim();
    if n > cap || n >= usize::BITS as usize {
        return Err(Error::SizeCap { n, cap });
    }
    let mut found: Vec<DVector<f64>> = Vec::new();
    for s in SignVector::all(n) {
        if let Some(x) = sys.solve_in(&s) {
            if consistent(&s, &x)
                && sys.residual(&x) <= sys.residual_bound()
                && found.iter().all(|y| (y - &x).amax() > 1e-9 * (1.0 + x.amax()))
            {
                found.push(x);
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn zero_f_is_linear_solve() {
        let sys = GaveSystem::new(dmatrix![2.0, 1.0; 1.0, 3.0], DMatrix::zeros(2, 2), dvector![3.0, -5.0]).unwrap();
        let sol = solve_gave(&sys, 16).unwrap();
        let x = solve_square(&sys.m, &sys.g).unwrap();
        assert!((sol.x - x).amax() < 1e-12);
        assert_eq!(sol.method, GaveMethod::SignIteration);
        assert!(sol.unique);
    }

    #[test]
    fn example4_system() {
        let sys = GaveSystem::new(
            dmatrix![1.0, 1.0; -2.0, 4.0],
            dmatrix![0.05, 0.05; -0.9, -0.8],
            dvector![12.0, 18.0],
        )
        .unwrap();
        let sol = solve_gave(&sys, 16).unwrap();
        assert!((sol.x - dvector![3.0445, 8.3841]).amax() < 1e-3);
        assert!(sol.residual <= sys.residual_bound());
        assert_eq!(enumerate_gave(&sys, 16).unwrap().len(), 1);
    }

    #[test]
    fn scalar_with_negative_root() {
        // x + 0.5|x| = -1  =>  x = -2
        let sys = GaveSystem::new(dmatrix![1.0], dmatrix![0.5], dvector![-1.0]).unwrap();
        let sol = solve_gave(&sys, 16).unwrap();
        assert!((sol.x[0] + 2.0).abs() < 1e-12);
        assert_eq!(sol.sign, SignVector::new(vec![-1]).unwrap());
    }

    #[test]
    fn no_solution_is_an_error() {
        // x - 2|x| = 1 has no solution
        let sys = GaveSystem::new(dmatrix![1.0], dmatrix![-2.0], dvector![1.0]).unwrap();
        assert!(matches!(solve_gave(&sys, 16), Err(Error::Gave(_))));
        assert!(matches!(solve_gave(&sys, 0), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn shape_errors() {
        assert!(GaveSystem::new(DMatrix::zeros(2, 2), DMatrix::zeros(2, 3), DVector::zeros(2)).is_err());
    }
}
