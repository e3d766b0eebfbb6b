//! Dense two-phase primal simplex for `maximize c·x subject to G x <= g`
//! with free variables.
//!
//! Each row gets a slack `s_i >= 0` (or none, for equality rows) and, when
//! the origin violates it, an artificial variable. The structural columns
//! are free: they may enter the basis in either direction and never leave
//! it, so at a vertex optimum the nonbasic columns are exactly `n` row
//! variables and the optimal basis can be reported as a set of row indices.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LuFactorization;

pub const DEFAULT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `maximize objective·x subject to matrix·x (<= or =) rhs`, `x` free.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: DVector<f64>,
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// Per-row flag: `true` makes the row an equality.
    pub equality: Vec<bool>,
}

impl LpProblem {
    pub fn new(objective: DVector<f64>, matrix: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        let m = matrix.nrows();
        Self::with_equalities(objective, matrix, rhs, vec![false; m])
    }

    pub fn with_equalities(
        objective: DVector<f64>,
        matrix: DMatrix<f64>,
        rhs: DVector<f64>,
        equality: Vec<bool>,
    ) -> Result<Self> {
        if objective.is_empty() {
            return Err(Error::dim("an LP needs at least one variable"));
        }
        if matrix.ncols() != objective.len() || matrix.nrows() != rhs.len() {
            return Err(Error::dim(format!(
                "LP with {} variables, {}x{} matrix and {} right-hand sides",
                objective.len(),
                matrix.nrows(),
                matrix.ncols(),
                rhs.len()
            )));
        }
        if equality.len() != rhs.len() {
            return Err(Error::dim("one equality flag per row"));
        }
        let finite = objective.iter().chain(matrix.iter()).chain(rhs.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Input("LP data must be finite".into()));
        }
        Ok(LpProblem {
            objective,
            matrix,
            rhs,
            equality,
        })
    }

    pub fn nvars(&self) -> usize {
        self.objective.len()
    }

    pub fn nrows(&self) -> usize {
        self.rhs.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: Status,
    /// Optimal value, `-inf` when infeasible, `+inf` when unbounded.
    pub value: f64,
    /// Optimizer; for an unbounded problem, the feasible point the ray starts from.
    pub x: DVector<f64>,
    /// Row multipliers, nonnegative on inequality rows. Zero unless optimal.
    pub dual: DVector<f64>,
    /// Rows whose constraints define the optimal vertex, when there is one.
    pub basis: Option<Vec<usize>>,
    /// Direction `d` with `G d <= 0` (`= 0` on equality rows) and `c·d > 0`.
    pub ray: Option<DVector<f64>>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    reduced: Vec<f64>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
    slack_of: Vec<Option<usize>>,
    artificial_of: Vec<Option<(usize, f64)>>,
    nvars: usize,
    tol: f64,
    iterations: usize,
    max_iterations: usize,
    degenerate_run: usize,
    degenerate_limit: usize,
    bland: bool,
}

enum PhaseEnd {
    Optimal,
    Unbounded { column: usize, direction: f64 },
}

impl Tableau {
    fn build(p: &LpProblem, tol: f64) -> Self {
        let (m, n) = (p.nrows(), p.nvars());
        let mut kinds = vec![Column::Structural; n];
        let mut slack_of = vec![None; m];
        for (i, slot) in slack_of.iter_mut().enumerate() {
            if !p.equality[i] {
                *slot = Some(kinds.len());
                kinds.push(Column::Slack);
            }
        }
        let mut artificial_of = vec![None; m];
        for (i, slot) in artificial_of.iter_mut().enumerate() {
            if p.equality[i] || p.rhs[i] < 0.0 {
                let sigma = if p.rhs[i] < 0.0 { -1.0 } else { 1.0 };
                *slot = Some((kinds.len(), sigma));
                kinds.push(Column::Artificial);
            }
        }
        let width = kinds.len();
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            let mut row = vec![0.0; width + 1];
            for j in 0..n {
                row[j] = p.matrix[(i, j)];
            }
            if let Some(s) = slack_of[i] {
                row[s] = 1.0;
            }
            row[width] = p.rhs[i];
            match artificial_of[i] {
                Some((a, sigma)) => {
                    row[a] = sigma;
                    if sigma < 0.0 {
                        row.iter_mut().for_each(|v| *v = -*v);
                    }
                    basis.push(a);
                }
                None => basis.push(slack_of[i].expect("inequality row has a slack")),
            }
            rows.push(row);
        }
        let size = m + n;
        Tableau {
            rows,
            reduced: vec![0.0; width],
            basis,
            kinds,
            slack_of,
            artificial_of,
            nvars: n,
            tol,
            iterations: 0,
            max_iterations: 50 * size.max(1),
            degenerate_run: 0,
            degenerate_limit: 3 * size.max(1),
            bland: false,
        }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width()]
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let w = self.width();
        for j in 0..w {
            let mut rc = cost[j];
            for (i, row) in self.rows.iter().enumerate() {
                let cb = cost[self.basis[i]];
                if cb != 0.0 {
                    rc -= cb * row[j];
                }
            }
            self.reduced[j] = rc;
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width();
        let piv = self.rows[r][q];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for j in 0..=w {
                    row[j] -= f * pivot_row[j];
                }
                row[q] = 0.0;
            }
        }
        let f = self.reduced[q];
        if f != 0.0 {
            for j in 0..w {
                self.reduced[j] -= f * pivot_row[j];
            }
        }
        self.reduced[q] = 0.0;
        self.basis[r] = q;
    }

    fn choose_entering(&self, allowed: &dyn Fn(usize) -> bool, is_basic: &[bool]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.width() {
            if is_basic[j] || !allowed(j) {
                continue;
            }
            let rc = self.reduced[j];
            let candidate = match self.kinds[j] {
                Column::Structural if rc.abs() > self.tol => Some((rc.signum(), rc.abs())),
                Column::Slack | Column::Artificial if rc > self.tol => Some((1.0, rc)),
                _ => None,
            };
            if let Some((dir, score)) = candidate {
                if self.bland {
                    return Some((j, dir));
                }
                if best.is_none_or(|(_, _, s)| score > s) {
                    best = Some((j, dir, score));
                }
            }
        }
        best.map(|(j, d, _)| (j, d))
    }

    fn choose_leaving(&self, q: usize, dir: f64) -> Option<(usize, f64)> {
        let w = self.width();
        let mut best: Option<(usize, f64, f64)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if self.kinds[self.basis[i]] == Column::Structural {
                continue;
            }
            let alpha = dir * row[q];
            if alpha <= PIVOT_TOL {
                continue;
            }
            let ratio = row[w].max(0.0) / alpha;
            let better = match best {
                None => true,
                Some((bi, br, ba)) => {
                    if ratio < br - 1e-12 {
                        true
                    } else if ratio <= br + 1e-12 {
                        if self.bland {
                            self.basis[i] < self.basis[bi]
                        } else {
                            alpha > ba
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((i, ratio, alpha));
            }
        }
        best.map(|(i, r, _)| (i, r))
    }

    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<PhaseEnd> {
        loop {
            let mut is_basic = vec![false; self.width()];
            for &b in &self.basis {
                is_basic[b] = true;
            }
            let Some((q, dir)) = self.choose_entering(allowed, &is_basic) else {
                return Ok(PhaseEnd::Optimal);
            };
            let Some((r, step)) = self.choose_leaving(q, dir) else {
                return Ok(PhaseEnd::Unbounded { column: q, direction: dir });
            };
            if self.iterations >= self.max_iterations {
                return Err(Error::NumericalFailure {
                    iterations: self.iterations,
                });
            }
            self.iterations += 1;
            if step <= self.tol {
                self.degenerate_run += 1;
                if self.degenerate_run > self.degenerate_limit {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(r, q);
        }
    }

    fn structural_values(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.nvars);
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.nvars {
                x[b] = self.rhs(i);
            }
        }
        x
    }
}

/// Solves `maximize c·x subject to G x <= g` (rows flagged as equalities use `=`).
pub fn solve_lp(p: &LpProblem, tol: f64) -> Result<LpOutcome> {
    let (m, n) = (p.nrows(), p.nvars());
    let mut t = Tableau::build(p, tol);
    let width = t.width();
    let gmax = p.rhs.iter().fold(0.0_f64, |a, v| a.max(v.abs()));

    let needs_phase_one = t.artificial_of.iter().any(Option::is_some);
    if needs_phase_one {
        let cost: Vec<f64> = t
            .kinds
            .iter()
            .map(|k| if *k == Column::Artificial { -1.0 } else { 0.0 })
            .collect();
        t.set_costs(&cost);
        t.run(&|_| true)?;
        let infeasibility: f64 = (0..m)
            .filter(|&i| t.kinds[t.basis[i]] == Column::Artificial)
            .map(|i| t.rhs(i).max(0.0))
            .sum();
        if infeasibility > tol * (1.0 + gmax) {
            return Ok(LpOutcome {
                status: Status::Infeasible,
                value: f64::NEG_INFINITY,
                x: DVector::zeros(n),
                dual: DVector::zeros(m),
                basis: None,
                ray: None,
                iterations: t.iterations,
            });
        }
        // Drive remaining artificials out where a nonzero pivot exists;
        // rows without one are redundant and keep a zero-valued artificial.
        for i in 0..m {
            if t.kinds[t.basis[i]] != Column::Artificial {
                continue;
            }
            let mut is_basic = vec![false; width];
            for &b in &t.basis {
                is_basic[b] = true;
            }
            let candidate = (0..width)
                .filter(|&j| !is_basic[j] && t.kinds[j] != Column::Artificial)
                .map(|j| (j, t.rows[i][j].abs()))
                .filter(|&(_, a)| a > 1e-9)
                .fold(None, |best: Option<(usize, f64)>, cur| match best {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                });
            if let Some((q, _)) = candidate {
                t.pivot(i, q);
            }
        }
    }

    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(p.objective.as_slice());
    t.set_costs(&cost);
    let kinds = t.kinds.clone();
    let end = t.run(&|j| kinds[j] != Column::Artificial)?;
    let x = t.structural_values();

    match end {
        PhaseEnd::Unbounded { column, direction } => {
            let mut d = DVector::zeros(n);
            if column < n {
                d[column] = direction;
            }
            for (i, &b) in t.basis.iter().enumerate() {
                if b < n {
                    d[b] = -direction * t.rows[i][column];
                }
            }
            Ok(LpOutcome {
                status: Status::Unbounded,
                value: f64::INFINITY,
                x,
                dual: DVector::zeros(m),
                basis: None,
                ray: Some(d),
                iterations: t.iterations,
            })
        }
        PhaseEnd::Optimal => {
            let mut dual = DVector::zeros(m);
            for i in 0..m {
                dual[i] = match (t.slack_of[i], t.artificial_of[i]) {
                    (Some(s), _) => -t.reduced[s],
                    (None, Some((a, sigma))) => -t.reduced[a] / sigma,
                    (None, None) => 0.0,
                };
            }
            let mut is_basic = vec![false; width];
            for &b in &t.basis {
                is_basic[b] = true;
            }
            let all_structural_basic = (0..n).all(|j| is_basic[j]);
            let rows: Vec<usize> = (0..m)
                .filter(|&i| {
                    let var = t.slack_of[i].or(t.artificial_of[i].map(|(a, _)| a));
                    var.is_some_and(|v| !is_basic[v])
                })
                .collect();
            let basis = (all_structural_basic && rows.len() == n).then_some(rows);
            Ok(LpOutcome {
                status: Status::Optimal,
                value: p.objective.dot(&x),
                x,
                dual,
                basis,
                ray: None,
                iterations: t.iterations,
            })
        }
    }
}

/// Outcome of testing a basis against the optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisStatus {
    /// Primal feasible and the basic dual is strictly positive.
    OptimalNondegenerate,
    /// Both conditions hold within tolerance.
    Optimal,
    NotOptimal,
}

/// Checks whether the row set `basis` is optimal for `max c·x s.t. A x <= b`:
/// `A_N A_B⁻¹ b_B <= b_N` and `A_B⁻ᵀ c >= 0`.
pub fn check_basis_optimal(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
    basis: &[usize],
    tol: f64,
) -> Result<BasisStatus> {
    let (m, n) = a.shape();
    if b.len() != m || c.len() != n || basis.len() != n || basis.iter().any(|&i| i >= m) {
        return Err(Error::dim("basis check needs |B| = n row indices"));
    }
    let ab = a.select_rows(basis.iter());
    let bb = DVector::from_iterator(n, basis.iter().map(|&i| b[i]));
    let lu = LuFactorization::new(&ab)?;
    let x = lu.solve(&bb);
    let y = lu.solve_transpose(c);
    let primal_ok = (0..m)
        .filter(|i| !basis.contains(i))
        .all(|i| a.row(i).dot(&x.transpose()) <= b[i] + tol * (1.0 + b[i].abs()));
    if !primal_ok || y.iter().any(|&v| v < -tol) {
        return Ok(BasisStatus::NotOptimal);
    }
    Ok(if y.iter().all(|&v| v > tol) {
        BasisStatus::OptimalNondegenerate
    } else {
        BasisStatus::Optimal
    })
}
