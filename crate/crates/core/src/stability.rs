//! Basis stability of the relaxed interval LP and the exact best and worst
//! optimal values it yields.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::avlp::{minimize, solve_gen_avlp, GenAvlpProgram};
use crate::error::{Error, Result};
use crate::gave::{solve_gave, GaveSolution, GaveSystem};
use crate::interval::{Interval, IntervalVector, SignVector};
use crate::linalg::enclose_interval_solution;
use crate::lp::{solve_lp, LpProblem, Status};
use crate::options::Options;
use crate::problem::{AvlpProblem, Realization};
use crate::range::relaxed_interval_lp;
use crate::regularity::{verify_regular, Regularity, RegularityCondition};

/// Dual lower bounds above this count as strictly positive.
pub const NONDEGENERACY_MARGIN: f64 = 1e-7;

/// `n` distinct row indices (0-based) of an `m x n` constraint matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    rows: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl Basis {
    pub fn new(rows: Vec<usize>, m: usize, n: usize) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::Input(format!("a basis needs {n} rows, got {}", rows.len())));
        }
        if let Some(&bad) = rows.iter().find(|&&i| i >= m) {
            return Err(Error::Input(format!("basis row {} out of range 1..={m}", bad + 1)));
        }
        let mut sorted = rows.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("basis rows must be distinct".into()));
        }
        let nonbasic = (0..m).filter(|i| !rows.contains(i)).collect();
        Ok(Basis { rows, nonbasic })
    }

    /// Parses 1-based indices.
    pub fn from_one_based(rows: &[usize], m: usize, n: usize) -> Result<Self> {
        if rows.contains(&0) {
            return Err(Error::Input("basis rows are numbered from 1".into()));
        }
        Self::new(rows.iter().map(|i| i - 1).collect(), m, n)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn nonbasic(&self) -> &[usize] {
        &self.nonbasic
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.rows.iter().map(|i| i + 1).collect()
    }
}

fn check_basis(p: &AvlpProblem, b: &Basis) -> Result<()> {
    if b.rows.len() != p.nvars() || b.rows.len() + b.nonbasic.len() != p.nrows() {
        return Err(Error::Input(format!(
            "basis of {} rows does not fit a {}x{} problem",
            b.rows.len(),
            p.nrows(),
            p.nvars()
        )));
    }
    Ok(())
}

fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    m.select_rows(rows.iter())
}

fn select(v: &DVector<f64>, rows: &[usize]) -> DVector<f64> {
    DVector::from_iterator(rows.len(), rows.iter().map(|&i| v[i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityStatus {
    VerifiedNondegenerate,
    Verified,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct StabilityCertificate {
    pub status: StabilityStatus,
    pub regularity: Option<RegularityCondition>,
    /// Enclosure of the basic solutions `A*_B x = b_B`.
    pub primal: Option<IntervalVector>,
    /// `min_i inf(b_i) - sup(A*_i X)` over nonbasic rows.
    pub primal_margin: Option<f64>,
    /// Enclosure of the basic duals `(A*_B)ᵀ y = c`.
    pub dual: Option<IntervalVector>,
    /// `min_i inf(Y_i)`.
    pub dual_margin: Option<f64>,
    /// The first check that did not pass.
    pub failed: Option<String>,
}

impl StabilityCertificate {
    pub fn is_verified(&self) -> bool {
        self.status != StabilityStatus::Unknown
    }

    fn unknown(reason: String) -> Self {
        StabilityCertificate {
            status: StabilityStatus::Unknown,
            regularity: None,
            primal: None,
            primal_margin: None,
            dual: None,
            dual_margin: None,
            failed: Some(reason),
        }
    }
}

/// Sufficient test that `B` is an optimal basis of every realization of
/// `max c·x s.t. A* x <= b`: regularity of `A*_B`, primal feasibility of the
/// nonbasic rows over an enclosure of the basic solutions, and nonnegativity
/// of an enclosure of the basic duals.
pub fn verify_b_stability(p: &AvlpProblem, basis: &Basis, tol: f64) -> Result<StabilityCertificate> {
    check_basis(p, basis)?;
    let relaxed = relaxed_interval_lp(p)?;
    let ab = relaxed.a.select_rows(basis.rows());
    let condition = match verify_regular(&ab)? {
        Regularity::Verified { condition, .. } => condition,
        Regularity::Unknown { reason } => {
            return Ok(StabilityCertificate::unknown(format!("regularity of A*_B: {reason}")))
        }
    };
    let bb = relaxed.b.select(basis.rows());
    let x = match enclose_interval_solution(&ab, &bb) {
        Ok(x) => x,
        Err(e) => return Ok(StabilityCertificate::unknown(format!("primal enclosure: {e}"))),
    };
    let mut primal_margin = f64::INFINITY;
    for &i in basis.nonbasic() {
        let row = (0..p.nvars()).fold(Interval::point(0.0), |acc, j| acc + relaxed.a.get(i, j) * x.get(j));
        primal_margin = primal_margin.min(relaxed.b.get(i).inf - row.sup);
    }
    let y = match enclose_interval_solution(&ab.transpose(), &relaxed.c) {
        Ok(y) => y,
        Err(e) => return Ok(StabilityCertificate::unknown(format!("dual enclosure: {e}"))),
    };
    let dual_margin = y.inf().min();

    let (status, failed) = if primal_margin < -tol {
        (
            StabilityStatus::Unknown,
            Some(format!("primal feasibility: nonbasic margin {primal_margin:.6e}")),
        )
    } else if dual_margin < 0.0 {
        (
            StabilityStatus::Unknown,
            Some(format!("dual feasibility: smallest dual lower bound {dual_margin:.6e}")),
        )
    } else if dual_margin > NONDEGENERACY_MARGIN {
        (StabilityStatus::VerifiedNondegenerate, None)
    } else {
        (StabilityStatus::Verified, None)
    };
    Ok(StabilityCertificate {
        status,
        regularity: Some(condition),
        primal: Some(x),
        primal_margin: Some(primal_margin),
        dual: Some(y),
        dual_margin: Some(dual_margin),
        failed,
    })
}

/// Best-case value as one LP in the basic duals:
/// `max sup(b)_B·y s.t. (mid - rad - sup D)_Bᵀ y <= sup c,
/// (mid + rad + sup D)_Bᵀ y >= inf c, y >= 0`.
pub fn best_case_bstable(p: &AvlpProblem, basis: &Basis, tol: f64) -> Result<f64> {
    check_basis(p, basis)?;
    let n = p.nvars();
    let relaxed = relaxed_interval_lp(p)?;
    let lo = select_rows(relaxed.a.inf(), basis.rows()).transpose();
    let hi = select_rows(relaxed.a.sup(), basis.rows()).transpose();
    let mut g = DMatrix::zeros(3 * n, n);
    g.view_mut((0, 0), (n, n)).copy_from(&lo);
    g.view_mut((n, 0), (n, n)).copy_from(&(-hi));
    g.view_mut((2 * n, 0), (n, n)).copy_from(&(-DMatrix::identity(n, n)));
    let mut rhs = DVector::zeros(3 * n);
    rhs.rows_mut(0, n).copy_from(p.c().sup());
    rhs.rows_mut(n, n).copy_from(&(-p.c().inf()));
    let objective = select(p.b().sup(), basis.rows());
    let out = solve_lp(&LpProblem::new(objective, g, rhs)?, tol)?;
    match out.status {
        Status::Optimal => Ok(out.value),
        other => Err(Error::Inconsistent(format!(
            "best-case dual LP is {}",
            format!("{other:?}").to_lowercase()
        ))),
    }
}

/// `(mid A)_B x + (rad A - inf D)_B |x| = inf(b)_B`.
pub fn gave_system(p: &AvlpProblem, basis: &Basis) -> Result<GaveSystem> {
    check_basis(p, basis)?;
    let rows = basis.rows();
    GaveSystem::new(
        select_rows(&p.a().mid(), rows),
        select_rows(&(p.a().rad() - p.d().inf()), rows),
        select(p.b().inf(), rows),
    )
}

#[derive(Debug, Clone)]
pub struct WorstStable {
    pub value: f64,
    pub x: DVector<f64>,
    pub sign: SignVector,
    /// `c_{-s}`, basic rows of `A_{e,-s}`, `mid(A)` elsewhere, `inf b`, `inf D`.
    pub witness: Realization,
    pub gave: GaveSolution,
}

/// Worst-case value `mid(c)·x* - rad(c)·|x*|` from the solution `x*` of the
/// basic absolute value system. Valid under nondegenerate stability, which
/// the caller must have verified.
pub fn worst_case_bstable(p: &AvlpProblem, basis: &Basis, cap: usize) -> Result<WorstStable> {
    let sys = gave_system(p, basis)?;
    let gave = solve_gave(&sys, cap)?;
    let x = gave.x.clone();
    let value = p.c().mid().dot(&x) - p.c().rad().dot(&x.abs());
    let s = SignVector::of(&x);
    let neg = s.negated().to_vector();
    let corner = p.a().realize(&DVector::from_element(p.nrows(), 1.0), &neg)?;
    let mut a = p.a().mid();
    for &i in basis.rows() {
        a.set_row(i, &corner.row(i));
    }
    let witness = Realization {
        a,
        b: p.b().inf().clone(),
        c: p.c().realize(&neg)?,
        d: p.d().inf().clone(),
    };
    Ok(WorstStable {
        value,
        x,
        sign: s,
        witness,
        gave,
    })
}

/// Values of the four programs characterizing the worst case under stability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Characterizations {
    /// `min` over `(mid A)_B x + (rad A - inf D)_B |x| >= inf(b)_B`.
    #[serde(serialize_with = "crate::report::serialize_ext")]
    pub min_geq: f64,
    /// `max` over the same rows with `<=`.
    #[serde(serialize_with = "crate::report::serialize_ext")]
    pub max_leq: f64,
    /// `max` over the equations.
    #[serde(serialize_with = "crate::report::serialize_ext")]
    pub max_eq: f64,
    /// `min` over the equations.
    #[serde(serialize_with = "crate::report::serialize_ext")]
    pub min_eq: f64,
}

impl Characterizations {
    pub fn values(&self) -> [f64; 4] {
        [self.min_geq, self.max_leq, self.max_eq, self.min_eq]
    }
}

/// Solves all four programs with objective `mid(c)·x - rad(c)·|x|`. Their
/// equality is only expected under nondegenerate stability and is not
/// asserted here.
pub fn bstable_characterizations(p: &AvlpProblem, basis: &Basis, opts: &Options) -> Result<Characterizations> {
    let sys = gave_system(p, basis)?;
    let n = p.nvars();
    let prog = |equality: bool| {
        GenAvlpProgram::with_equalities(
            p.c().mid(),
            -p.c().rad(),
            sys.m.clone(),
            sys.f.clone(),
            sys.g.clone(),
            vec![equality; n],
        )
    };
    let ineq = prog(false)?;
    let eq = prog(true)?;
    let (cap, tol) = (opts.orthant_cap, opts.tol);
    let ((min_geq, max_leq), (max_eq, min_eq)) = rayon::join(
        || rayon::join(|| minimize(&ineq, cap, tol), || solve_gen_avlp(&ineq, cap, tol)),
        || rayon::join(|| solve_gen_avlp(&eq, cap, tol), || minimize(&eq, cap, tol)),
    );
    Ok(Characterizations {
        min_geq: min_geq?.value,
        max_leq: max_leq?.value,
        max_eq: max_eq?.value,
        min_eq: min_eq?.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalMatrix;
    use crate::lp::{check_basis_optimal, BasisStatus};
    use nalgebra::{dmatrix, dvector};

    fn example4() -> AvlpProblem {
        let a = dmatrix![1.0, 1.0; -2.0, 4.0; -6.0, 2.0; 4.0, -7.0];
        let d = dmatrix![0.0, 0.0; 1.0, 1.0; 1.0, 1.0; 1.0, 1.0];
        AvlpProblem::new(
            IntervalMatrix::from_mid_rad(&a, &(a.abs() * 0.05)).unwrap(),
            IntervalVector::point(dvector![12.0, 18.0, 36.0, 26.0]),
            IntervalVector::point(dvector![1.0, 2.0]),
            IntervalMatrix::point(d),
        )
        .unwrap()
    }

    #[test]
    fn basis_validation() {
        assert!(Basis::new(vec![0, 1], 4, 2).is_ok());
        assert!(Basis::new(vec![0, 0], 4, 2).is_err());
        assert!(Basis::new(vec![0, 4], 4, 2).is_err());
        assert!(Basis::new(vec![0], 4, 2).is_err());
        assert!(Basis::from_one_based(&[0, 1], 4, 2).is_err());
        let b = Basis::from_one_based(&[1, 3], 4, 2).unwrap();
        assert_eq!(b.rows(), &[0, 2]);
        assert_eq!(b.nonbasic(), &[1, 3]);
        assert_eq!(b.one_based(), vec![1, 3]);
    }

    #[test]
    fn example4_is_stable() {
        let p = example4();
        let basis = Basis::new(vec![0, 1], 4, 2).unwrap();
        let cert = verify_b_stability(&p, &basis, 1e-9).unwrap();
        assert!(cert.is_verified(), "{cert:?}");
        let x = cert.primal.as_ref().unwrap();
        for v in [
            dvector![2.9439, 9.6878],
            dvector![2.3729, 9.0557],
            dvector![3.0445, 8.3841],
            dvector![3.6756, 8.956],
        ] {
            assert!(x.contains(&v, 1e-3));
        }
    }

    #[test]
    fn example4_other_basis_is_not_certified() {
        let p = example4();
        let basis = Basis::new(vec![0, 2], 4, 2).unwrap();
        let cert = verify_b_stability(&p, &basis, 1e-9).unwrap();
        assert_eq!(cert.status, StabilityStatus::Unknown);
        let mid = p.a().mid() - p.d().mid();
        let status = check_basis_optimal(&mid, &p.b().mid(), &p.c().mid(), &[0, 2], 1e-9).unwrap();
        assert_eq!(status, BasisStatus::NotOptimal);
    }

    #[test]
    fn example4_values() {
        let p = example4();
        let basis = Basis::new(vec![0, 1], 4, 2).unwrap();
        let best = best_case_bstable(&p, &basis, 1e-9).unwrap();
        assert!((best - 22.319).abs() < 1e-3, "{best}");
        let worst = worst_case_bstable(&p, &basis, 16).unwrap();
        assert!((worst.value - 19.813).abs() < 1e-3, "{}", worst.value);
        assert!((&worst.x - dvector![3.0445, 8.3841]).amax() < 1e-3);
        let again = worst.witness.solve(16, 1e-9).unwrap();
        assert!((again.value - worst.value).abs() < 1e-9);
        let chars = bstable_characterizations(&p, &basis, &Options::default()).unwrap();
        for v in chars.values() {
            assert!((v - worst.value).abs() < 1e-6, "{chars:?}");
        }
    }

    #[test]
    fn zero_radius_reduces_to_nominal() {
        let a = dmatrix![1.0, 1.0; -2.0, 4.0; -6.0, 2.0; 4.0, -7.0];
        let p = AvlpProblem::point(a.clone(), dvector![12.0, 18.0, 36.0, 26.0], dvector![1.0, 2.0], DMatrix::zeros(4, 2))
            .unwrap();
        let basis = Basis::new(vec![0, 1], 4, 2).unwrap();
        let cert = verify_b_stability(&p, &basis, 1e-9).unwrap();
        assert_eq!(cert.status, StabilityStatus::VerifiedNondegenerate);
        let nominal = solve_lp(&LpProblem::new(dvector![1.0, 2.0], a, dvector![12.0, 18.0, 36.0, 26.0]).unwrap(), 1e-9)
            .unwrap();
        assert!((best_case_bstable(&p, &basis, 1e-9).unwrap() - nominal.value).abs() < 1e-9);
        assert!((worst_case_bstable(&p, &basis, 16).unwrap().value - nominal.value).abs() < 1e-9);
        let chars = bstable_characterizations(&p, &basis, &Options::default()).unwrap();
        for v in chars.values() {
            assert!((v - nominal.value).abs() < 1e-9);
        }
    }
}
