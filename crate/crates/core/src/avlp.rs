//! Generalized absolute value linear programs
//! `maximize p·x + q·|x| subject to G x + H |x| <= g`, solved exactly by
//! enumerating orthants.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::SignVector;
use crate::lp::{solve_lp, LpOutcome, LpProblem, Status};

#[derive(Debug, Clone, PartialEq)]
pub struct GenAvlpProgram {
    /// Linear part of the objective.
    pub p: DVector<f64>,
    /// Coefficients of `|x|` in the objective.
    pub q: DVector<f64>,
    pub g: DMatrix<f64>,
    /// Coefficients of `|x|` in the constraints.
    pub h: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// Rows flagged `true` are equations.
    pub equality: Vec<bool>,
}

impl GenAvlpProgram {
    pub fn new(
        p: DVector<f64>,
        q: DVector<f64>,
        g: DMatrix<f64>,
        h: DMatrix<f64>,
        rhs: DVector<f64>,
    ) -> Result<Self> {
        let m = rhs.len();
        Self::with_equalities(p, q, g, h, rhs, vec![false; m])
    }

    pub fn with_equalities(
        p: DVector<f64>,
        q: DVector<f64>,
        g: DMatrix<f64>,
        h: DMatrix<f64>,
        rhs: DVector<f64>,
        equality: Vec<bool>,
    ) -> Result<Self> {
        let n = p.len();
        let m = rhs.len();
        if n == 0 {
            return Err(Error::dim("a program needs at least one variable"));
        }
        if q.len() != n || g.shape() != (m, n) || h.shape() != (m, n) || equality.len() != m {
            return Err(Error::dim(format!(
                "program with {n} variables and {m} rows: p {}, q {}, G {}x{}, H {}x{}",
                p.len(),
                q.len(),
                g.nrows(),
                g.ncols(),
                h.nrows(),
                h.ncols()
            )));
        }
        Ok(GenAvlpProgram {
            p,
            q,
            g,
            h,
            rhs,
            equality,
        })
    }

    /// Embeds `maximize c·x subject to A x - D|x| <= b`.
    pub fn from_realization(
        a: &DMatrix<f64>,
        b: &DVector<f64>,
        c: &DVector<f64>,
        d: &DMatrix<f64>,
    ) -> Result<Self> {
        if d.shape() != a.shape() {
            return Err(Error::dim(format!(
                "D is {}x{} but A is {}x{}",
                d.nrows(),
                d.ncols(),
                a.nrows(),
                a.ncols()
            )));
        }
        if let Some((k, v)) = d.iter().enumerate().find(|(_, v)| **v < 0.0) {
            let (i, j) = (k % d.nrows(), k / d.nrows());
            return Err(Error::Input(format!(
                "D[{},{}] = {v} is negative",
                i + 1,
                j + 1
            )));
        }
        Self::new(c.clone(), DVector::zeros(c.len()), a.clone(), -d, b.clone())
    }

    pub fn nvars(&self) -> usize {
        self.p.len()
    }

    pub fn nrows(&self) -> usize {
        self.rhs.len()
    }

    /// Reads `self` as `minimize p·x + q·|x| subject to G x + H|x| >= g` and
    /// returns the equivalent maximization. The map is an involution.
    pub fn min_form(&self) -> GenAvlpProgram {
        GenAvlpProgram {
            p: -&self.p,
            q: -&self.q,
            g: -&self.g,
            h: -&self.h,
            rhs: -&self.rhs,
            equality: self.equality.clone(),
        }
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.p.dot(x) + self.q.dot(&x.abs())
    }

    /// Largest violation of the constraints at `x` (negative when strictly feasible).
    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        let lhs = &self.g * x + &self.h * x.abs() - &self.rhs;
        lhs.iter()
            .zip(&self.equality)
            .map(|(&v, &eq)| if eq { v.abs() } else { v })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The linear program describing the program inside orthant `s`.
    pub fn orthant_lp(&self, s: &SignVector) -> Result<LpProblem> {
        let (m, n) = (self.nrows(), self.nvars());
        if s.len() != n {
            return Err(Error::dim("orthant sign of the wrong length"));
        }
        let sv = s.to_vector();
        let objective = &self.p + self.q.component_mul(&sv);
        let mut matrix = DMatrix::zeros(m + n, n);
        for i in 0..m {
            for j in 0..n {
                matrix[(i, j)] = self.g[(i, j)] + self.h[(i, j)] * sv[j];
            }
        }
        for j in 0..n {
            matrix[(m + j, j)] = -sv[j];
        }
        let mut rhs = DVector::zeros(m + n);
        rhs.rows_mut(0, m).copy_from(&self.rhs);
        let mut equality = self.equality.clone();
        equality.extend(std::iter::repeat_n(false, n));
        LpProblem::with_equalities(objective, matrix, rhs, equality)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthantRecord {
    pub orthant: SignVector,
    pub status: Status,
    #[serde(serialize_with = "crate::report::serialize_ext")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: Status,
    /// Optimal value, `-inf` if infeasible, `+inf` if unbounded.
    pub value: f64,
    /// Optimizer, or the start of the unbounded ray.
    pub x: DVector<f64>,
    /// Sign of `x` with `sgn(0) = +1`.
    pub sign: SignVector,
    /// Orthant whose linear program produced `x`.
    pub orthant: Option<SignVector>,
    /// Direction of unboundedness inside `orthant`.
    pub ray: Option<DVector<f64>>,
    /// One record per orthant, in lexicographic order.
    pub orthants: Vec<OrthantRecord>,
}

impl SolveOutcome {
    /// Labels of all orthants whose value ties with the optimum.
    pub fn optimal_orthants(&self, tol: f64) -> Vec<SignVector> {
        if self.status != Status::Optimal {
            return Vec::new();
        }
        let cut = self.value - tol * (1.0 + self.value.abs());
        self.orthants
            .iter()
            .filter(|r| r.status == Status::Optimal && r.value >= cut)
            .map(|r| r.orthant.clone())
            .collect()
    }

    /// Negates the value, for outcomes of a program built with `min_form`.
    pub fn negated(mut self) -> SolveOutcome {
        self.value = -self.value;
        for r in &mut self.orthants {
            r.value = -r.value;
        }
        self
    }
}

/// Solves the LP of one orthant. The optimizer is snapped onto the orthant.
pub fn solve_orthant(prog: &GenAvlpProgram, s: &SignVector, tol: f64) -> Result<LpOutcome> {
    let lp = prog.orthant_lp(s)?;
    let mut out = solve_lp(&lp, tol)?;
    for j in 0..s.len() {
        if s.get(j) * out.x[j] < 0.0 {
            out.x[j] = 0.0;
        }
    }
    Ok(out)
}

/// Maximizes over all `2^n` orthants. Unbounded in any orthant makes the
/// program unbounded; equal values go to the lexicographically smallest
/// orthant.
pub fn solve_gen_avlp(prog: &GenAvlpProgram, orthant_cap: usize, tol: f64) -> Result<SolveOutcome> {
    let n = prog.nvars();
    if n > orthant_cap || n >= usize::BITS as usize {
        return Err(Error::SizeCap { n, cap: orthant_cap });
    }
    let results: Vec<(SignVector, Result<LpOutcome>)> = (0..1usize << n)
        .into_par_iter()
        .map(|k| {
            let s = SignVector::nth(n, k);
            let out = solve_orthant(prog, &s, tol);
            (s, out)
        })
        .collect();

    let mut records = Vec::with_capacity(results.len());
    let mut best: Option<(SignVector, LpOutcome)> = None;
    let mut unbounded: Option<(SignVector, LpOutcome)> = None;
    for (s, res) in results {
        let out = res.map_err(|e| Error::Orthant {
            orthant: s.to_string(),
            source: Box::new(e),
        })?;
        records.push(OrthantRecord {
            orthant: s.clone(),
            status: out.status,
            value: out.value,
        });
        match out.status {
            Status::Infeasible => {}
            Status::Unbounded => {
                if unbounded.is_none() {
                    unbounded = Some((s, out));
                }
            }
            Status::Optimal => {
                let better = match &best {
                    None => true,
                    Some((_, b)) => out.value > b.value + tol * (1.0 + b.value.abs()),
                };
                if better {
                    best = Some((s, out));
                }
            }
        }
    }

    Ok(match (unbounded, best) {
        (Some((s, out)), _) => SolveOutcome {
            status: Status::Unbounded,
            value: f64::INFINITY,
            sign: SignVector::of(&out.x),
            x: out.x,
            orthant: Some(s),
            ray: out.ray,
            orthants: records,
        },
        (None, Some((s, out))) => SolveOutcome {
            status: Status::Optimal,
            value: out.value,
            sign: SignVector::of(&out.x),
            x: out.x,
            orthant: Some(s),
            ray: None,
            orthants: records,
        },
        (None, None) => SolveOutcome {
            status: Status::Infeasible,
            value: f64::NEG_INFINITY,
            x: DVector::zeros(n),
            sign: SignVector::ones(n),
            orthant: None,
            ray: None,
            orthants: records,
        },
    })
}

/// Solves the minimization read of `prog` (see [`GenAvlpProgram::min_form`]).
/// The returned value is the minimum; status refers to the minimization.
pub fn minimize(prog: &GenAvlpProgram, orthant_cap: usize, tol: f64) -> Result<SolveOutcome> {
    Ok(solve_gen_avlp(&prog.min_form(), orthant_cap, tol)?.negated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    const TOL: f64 = 1e-9;

    fn example4() -> GenAvlpProgram {
        let a = dmatrix![1.0, 1.0; -2.0, 4.0; -6.0, 2.0; 4.0, -7.0];
        let d = dmatrix![0.0, 0.0; 1.0, 1.0; 1.0, 1.0; 1.0, 1.0];
        GenAvlpProgram::from_realization(&a, &dvector![12.0, 18.0, 36.0, 26.0], &dvector![1.0, 2.0], &d)
            .unwrap()
    }

    #[test]
    fn example4_nominal() {
        let out = solve_gen_avlp(&example4(), 16, TOL).unwrap();
        assert_eq!(out.status, Status::Optimal);
        assert!((out.value - 21.0).abs() < 1e-9);
        assert!((&out.x - dvector![3.0, 9.0]).amax() < 1e-9);
        assert_eq!(out.sign, SignVector::ones(2));
        assert_eq!(out.orthants.len(), 4);
    }

    #[test]
    fn abs_objective_tie_goes_to_negative_orthant() {
        let prog = GenAvlpProgram::new(
            dvector![0.0],
            dvector![1.0],
            dmatrix![1.0; -1.0],
            dmatrix![0.0; 0.0],
            dvector![1.0, 1.0],
        )
        .unwrap();
        let out = solve_gen_avlp(&prog, 16, TOL).unwrap();
        assert!((out.value - 1.0).abs() < 1e-12);
        assert_eq!(out.sign, SignVector::new(vec![-1]).unwrap());
        assert!((out.x[0] + 1.0).abs() < 1e-12);
        assert_eq!(out.optimal_orthants(TOL).len(), 2);
    }

    #[test]
    fn min_form_round_trip() {
        // min x s.t. x >= 1
        let prog =
            GenAvlpProgram::new(dvector![1.0], dvector![0.0], dmatrix![1.0], dmatrix![0.0], dvector![1.0])
                .unwrap();
        let converted = prog.min_form();
        assert_eq!(converted.g, dmatrix![-1.0]);
        assert_eq!(converted.rhs, dvector![-1.0]);
        let max = solve_gen_avlp(&converted, 16, TOL).unwrap();
        assert!((max.value + 1.0).abs() < 1e-12);
        assert!((minimize(&prog, 16, TOL).unwrap().value - 1.0).abs() < 1e-12);
        assert_eq!(converted.min_form(), prog);
        let twice = minimize(&prog.min_form().min_form(), 16, TOL).unwrap();
        assert_eq!(twice, minimize(&prog, 16, TOL).unwrap());
    }

    #[test]
    fn negative_d_is_rejected() {
        let err = GenAvlpProgram::from_realization(
            &dmatrix![1.0, 0.0],
            &dvector![1.0],
            &dvector![1.0, 1.0],
            &dmatrix![0.0, -0.1],
        )
        .unwrap_err();
        assert!(err.to_string().contains("D[1,2]"), "{err}");
    }

    #[test]
    fn zero_d_is_plain_lp() {
        let a = dmatrix![1.0, 2.0; 3.0, 1.0; -1.0, 0.0; 0.0, -1.0];
        let b = dvector![4.0, 6.0, 0.0, 0.0];
        let c = dvector![1.0, 1.0];
        let prog = GenAvlpProgram::from_realization(&a, &b, &c, &DMatrix::zeros(4, 2)).unwrap();
        let lp = solve_lp(&LpProblem::new(c, a, b).unwrap(), TOL).unwrap();
        let out = solve_gen_avlp(&prog, 16, TOL).unwrap();
        assert!((out.value - lp.value).abs() < 1e-12);
        assert!((out.value - 2.8).abs() < 1e-9);
    }

    #[test]
    fn example1_midpoint_realization() {
        // max x2 s.t. -x1 <= 3, x1 <= 3, x2 - |x1| <= 0, x2 <= 3
        let a = dmatrix![-1.0, 0.0; 1.0, 0.0; 0.0, 1.0; 0.0, 1.0];
        let d = dmatrix![0.0, 0.0; 0.0, 0.0; 1.0, 0.0; 0.0, 0.0];
        let prog =
            GenAvlpProgram::from_realization(&a, &dvector![3.0, 3.0, 0.0, 3.0], &dvector![0.0, 1.0], &d)
                .unwrap();
        let out = solve_gen_avlp(&prog, 16, TOL).unwrap();
        assert!((out.value - 3.0).abs() < 1e-12);
        assert_eq!(out.optimal_orthants(TOL).len(), 2);
    }

    #[test]
    fn infeasible_and_unbounded() {
        // |x| <= -1
        let infeasible =
            GenAvlpProgram::new(dvector![1.0], dvector![0.0], dmatrix![0.0], dmatrix![1.0], dvector![-1.0])
                .unwrap();
        let out = solve_gen_avlp(&infeasible, 16, TOL).unwrap();
        assert_eq!(out.status, Status::Infeasible);
        assert_eq!(out.value, f64::NEG_INFINITY);
        // max x s.t. x - 2|x| <= 1: unbounded for x > 0
        let unbounded =
            GenAvlpProgram::new(dvector![1.0], dvector![0.0], dmatrix![1.0], dmatrix![-2.0], dvector![1.0])
                .unwrap();
        let out = solve_gen_avlp(&unbounded, 16, TOL).unwrap();
        assert_eq!(out.status, Status::Unbounded);
        assert_eq!(out.orthant, Some(SignVector::ones(1)));
        assert!(out.ray.unwrap()[0] > 0.0);
    }

    #[test]
    fn size_cap() {
        let n = 3;
        let prog = GenAvlpProgram::new(
            DVector::zeros(n),
            DVector::zeros(n),
            DMatrix::zeros(0, n),
            DMatrix::zeros(0, n),
            DVector::zeros(0),
        )
        .unwrap();
        assert!(matches!(
            solve_gen_avlp(&prog, 2, TOL),
            Err(Error::SizeCap { n: 3, cap: 2 })
        ));
    }

    #[test]
    fn optimal_orthant_reproduces_value() {
        let prog = example4();
        let out = solve_gen_avlp(&prog, 16, TOL).unwrap();
        let single = solve_orthant(&prog, out.orthant.as_ref().unwrap(), TOL).unwrap();
        assert_eq!(single.value, out.value);
        assert!(prog.violation(&out.x) <= 1e-9);
        assert!((prog.objective(&out.x) - out.value).abs() <= 1e-9);
    }
}
