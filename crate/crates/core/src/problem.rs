//! Interval AVLP instances and their real realizations.

use nalgebra::{DMatrix, DVector};

use crate::avlp::{solve_gen_avlp, GenAvlpProgram, SolveOutcome};
use crate::error::{Error, Result};
use crate::interval::{IntervalMatrix, IntervalVector};

/// `maximize c·x subject to A x - D|x| <= b` with every coefficient ranging
/// over its interval.
#[derive(Debug, Clone, PartialEq)]
pub struct AvlpProblem {
    a: IntervalMatrix,
    b: IntervalVector,
    c: IntervalVector,
    d: IntervalMatrix,
}

impl AvlpProblem {
    pub fn new(a: IntervalMatrix, b: IntervalVector, c: IntervalVector, d: IntervalMatrix) -> Result<Self> {
        let (m, n) = a.shape();
        if n == 0 {
            return Err(Error::dim("A has no columns"));
        }
        if b.len() != m {
            return Err(Error::dim(format!("b has {} entries, A has {m} rows", b.len())));
        }
        if c.len() != n {
            return Err(Error::dim(format!("c has {} entries, A has {n} columns", c.len())));
        }
        if d.shape() != (m, n) {
            return Err(Error::dim(format!(
                "D is {}x{}, A is {m}x{n}",
                d.nrows(),
                d.ncols()
            )));
        }
        for j in 0..n {
            for i in 0..m {
                let v = d.inf()[(i, j)];
                if v < 0.0 {
                    return Err(Error::Input(format!(
                        "D[{},{}] has negative lower bound {v}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(AvlpProblem { a, b, c, d })
    }

    /// A problem whose intervals are all degenerate.
    pub fn point(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>, d: DMatrix<f64>) -> Result<Self> {
        Self::new(
            IntervalMatrix::point(a),
            IntervalVector::point(b),
            IntervalVector::point(c),
            IntervalMatrix::point(d),
        )
    }

    pub fn a(&self) -> &IntervalMatrix {
        &self.a
    }

    pub fn b(&self) -> &IntervalVector {
        &self.b
    }

    pub fn c(&self) -> &IntervalVector {
        &self.c
    }

    pub fn d(&self) -> &IntervalMatrix {
        &self.d
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    pub fn nvars(&self) -> usize {
        self.a.ncols()
    }

    /// The realization taking every midpoint.
    pub fn midpoint(&self) -> Realization {
        Realization {
            a: self.a.mid(),
            b: self.b.mid(),
            c: self.c.mid(),
            d: self.d.mid(),
        }
    }

    pub fn contains(&self, r: &Realization, tol: f64) -> bool {
        self.a.contains(&r.a, tol)
            && self.b.contains(&r.b, tol)
            && self.c.contains(&r.c, tol)
            && self.d.contains(&r.d, tol)
    }

    /// Same problem with every radius of `A` scaled by `factor`.
    pub fn with_scaled_radius_a(&self, factor: f64) -> Result<Self> {
        let a = IntervalMatrix::from_mid_rad(&self.a.mid(), &(self.a.rad() * factor))?;
        Self::new(a, self.b.clone(), self.c.clone(), self.d.clone())
    }
}

/// One real member `(A, b, c, D)` of an interval problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub d: DMatrix<f64>,
}

impl Realization {
    pub fn program(&self) -> Result<GenAvlpProgram> {
        GenAvlpProgram::from_realization(&self.a, &self.b, &self.c, &self.d)
    }

    /// `f(A, b, c, D)` by orthant decomposition.
    pub fn solve(&self, orthant_cap: usize, tol: f64) -> Result<SolveOutcome> {
        solve_gen_avlp(&self.program()?, orthant_cap, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn validates_shapes_and_d() {
        let a = IntervalMatrix::point(dmatrix![1.0, 0.0; 0.0, 1.0]);
        let b = IntervalVector::point(dvector![1.0, 1.0]);
        let c = IntervalVector::point(dvector![1.0, 1.0]);
        let d = IntervalMatrix::point(DMatrix::zeros(2, 2));
        assert!(AvlpProblem::new(a.clone(), b.clone(), c.clone(), d).is_ok());
        let short = IntervalVector::point(dvector![1.0]);
        assert!(matches!(
            AvlpProblem::new(a.clone(), short, c.clone(), IntervalMatrix::point(DMatrix::zeros(2, 2))),
            Err(Error::Dimension(_))
        ));
        let bad_d = IntervalMatrix::new(dmatrix![0.0, 0.0; -0.1, 0.0], dmatrix![0.0, 0.0; 0.5, 0.0]).unwrap();
        let err = AvlpProblem::new(a, b, c, bad_d).unwrap_err();
        assert!(err.to_string().contains("D[2,1]"), "{err}");
    }

    #[test]
    fn midpoint_is_contained() {
        let a = IntervalMatrix::from_mid_rad(&dmatrix![1.0, 2.0], &dmatrix![0.5, 0.0]).unwrap();
        let p = AvlpProblem::new(
            a,
            IntervalVector::point(dvector![1.0]),
            IntervalVector::point(dvector![1.0, 0.0]),
            IntervalMatrix::point(dmatrix![0.0, 1.0]),
        )
        .unwrap();
        assert!(p.contains(&p.midpoint(), 0.0));
        let wider = p.with_scaled_radius_a(2.0).unwrap();
        assert_eq!(wider.a().rad(), dmatrix![1.0, 0.0]);
    }
}
