//! Best-case optimal value, worst-case lower and upper bounds.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::avlp::{solve_gen_avlp, GenAvlpProgram, SolveOutcome};
use crate::error::{Error, ErrorKind, Result};
use crate::interval::{IntervalMatrix, IntervalVector, SignVector};
use crate::lp::Status;
use crate::options::Options;
use crate::problem::{AvlpProblem, Realization};

/// `(A_{e,s}, b, c_s, D)` for the given `b`, `D`.
fn rohn_realization(
    p: &AvlpProblem,
    s: &SignVector,
    b: &DVector<f64>,
    d: &DMatrix<f64>,
) -> Result<Realization> {
    let sv = s.to_vector();
    let e = DVector::from_element(p.nrows(), 1.0);
    Ok(Realization {
        a: p.a().realize(&e, &sv)?,
        b: b.clone(),
        c: p.c().realize(&sv)?,
        d: d.clone(),
    })
}

/// Orthant in which a solver outcome's point lies: the sign of the optimizer,
/// or the orthant holding the ray when unbounded.
fn outcome_orthant(out: &SolveOutcome) -> SignVector {
    match (out.status, &out.orthant) {
        (Status::Unbounded, Some(s)) => s.clone(),
        _ => out.sign.clone(),
    }
}

#[derive(Debug, Clone)]
pub struct BestCase {
    pub value: f64,
    pub outcome: SolveOutcome,
    pub witness: Realization,
}

/// `maximize mid(c)·x + rad(c)·|x| s.t. mid(A) x - (rad(A) + sup D)|x| <= sup b`.
pub fn best_case_program(p: &AvlpProblem) -> Result<GenAvlpProgram> {
    GenAvlpProgram::new(
        p.c().mid(),
        p.c().rad(),
        p.a().mid(),
        -(p.a().rad() + p.d().sup()),
        p.b().sup().clone(),
    )
}

/// Exact best-case optimal value over all realizations, with a realization
/// attaining it.
pub fn best_case(p: &AvlpProblem, opts: &Options) -> Result<BestCase> {
    let outcome = solve_gen_avlp(&best_case_program(p)?, opts.orthant_cap, opts.tol)?;
    let s = outcome_orthant(&outcome);
    let witness = rohn_realization(p, &s, p.b().sup(), p.d().sup())?;
    Ok(BestCase {
        value: outcome.value,
        outcome,
        witness,
    })
}

/// Interval LP `max c·x s.t. A* x <= b` sharing the best case and the united
/// solution set.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedLp {
    pub a: IntervalMatrix,
    pub b: IntervalVector,
    pub c: IntervalVector,
}

/// `A* = [mid - rad - sup D, mid + rad + sup D]`.
pub fn relaxed_interval_lp(p: &AvlpProblem) -> Result<RelaxedLp> {
    let a = IntervalMatrix::from_mid_rad(&p.a().mid(), &(p.a().rad() + p.d().sup()))?;
    Ok(RelaxedLp {
        a,
        b: p.b().clone(),
        c: p.c().clone(),
    })
}

#[derive(Debug, Clone)]
pub struct WorstLower {
    pub value: f64,
    pub outcome: SolveOutcome,
}

/// `maximize mid(c)·x - rad(c)·|x| s.t. mid(A) x + (rad(A) - inf D)|x| <= inf b`.
pub fn worst_lower_program(p: &AvlpProblem) -> Result<GenAvlpProgram> {
    GenAvlpProgram::new(
        p.c().mid(),
        -p.c().rad(),
        p.a().mid(),
        p.a().rad() - p.d().inf(),
        p.b().inf().clone(),
    )
}

/// Lower bound on the worst-case optimal value; `-inf` when its program is
/// infeasible.
pub fn worst_lower_bound(p: &AvlpProblem, opts: &Options) -> Result<WorstLower> {
    let outcome = solve_gen_avlp(&worst_lower_program(p)?, opts.orthant_cap, opts.tol)?;
    Ok(WorstLower {
        value: outcome.value,
        outcome,
    })
}

#[derive(Debug, Clone)]
pub struct Tightness {
    pub tight: bool,
    pub sign: SignVector,
    /// Optimal value of the test realization, when it was solved.
    pub value: Option<f64>,
    pub reason: String,
}

/// Sign test for exactness of the lower bound: with `s*` the orthant of an
/// optimal solution of the lower-bound program, the bound is the worst case
/// if `f(A_{e,-s*}, inf b, c_{-s*}, inf D)` has an optimal solution in the
/// closed orthant `s*`.
pub fn lower_tightness(p: &AvlpProblem, s_star: &SignVector, opts: &Options) -> Result<Tightness> {
    let lower = worst_lower_bound(p, opts)?;
    tightness_against(p, &lower, s_star, opts)
}

/// As [`lower_tightness`], reusing an already solved lower-bound program.
pub fn tightness_against(
    p: &AvlpProblem,
    lower: &WorstLower,
    s_star: &SignVector,
    opts: &Options,
) -> Result<Tightness> {
    if lower.outcome.status != Status::Optimal {
        return Ok(Tightness {
            tight: false,
            sign: s_star.clone(),
            value: None,
            reason: format!("lower-bound program is {:?}", lower.outcome.status).to_lowercase(),
        });
    }
    let realization = rohn_realization(p, &s_star.negated(), p.b().inf(), p.d().inf())?;
    let out = realization.solve(opts.orthant_cap, opts.tol)?;
    if out.status != Status::Optimal {
        return Ok(Tightness {
            tight: false,
            sign: s_star.clone(),
            value: Some(out.value),
            reason: format!("test realization is {:?}", out.status).to_lowercase(),
        });
    }
    let tight = out.optimal_orthants(opts.tol).contains(s_star);
    let reason = if tight {
        format!("test realization is optimal in orthant {s_star}")
    } else {
        format!("test realization has no optimal solution in orthant {s_star}")
    };
    Ok(Tightness {
        tight,
        sign: s_star.clone(),
        value: Some(out.value),
        reason,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    RepeatedSign,
    NoImprovement,
    Infeasible,
    MaxIterations,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperIterate {
    pub iteration: usize,
    /// Sign `s` defining `A_{e,-s}`, `c_{-s}`; absent for the midpoint start.
    pub update_sign: Option<SignVector>,
    pub status: Status,
    #[serde(serialize_with = "crate::report::serialize_ext")]
    pub value: f64,
    /// Orthant of the optimizer (or of the ray) of this realization.
    pub sign: Option<SignVector>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct UpperBound {
    pub value: f64,
    pub witness: Realization,
    pub log: Vec<UpperIterate>,
    pub stop: StopReason,
}

/// Iterative upper bound on the worst-case optimal value. Starting from the
/// midpoint, each step moves `A`, `c` to the Rohn corner opposite to the sign
/// of the last optimizer and keeps the smallest value seen.
pub fn worst_upper_bound(p: &AvlpProblem, opts: &Options) -> Result<UpperBound> {
    let b = p.b().inf().clone();
    let d = p.d().inf().clone();
    let mut current = Realization {
        a: p.a().mid(),
        b: b.clone(),
        c: p.c().mid(),
        d: d.clone(),
    };
    let mut update_sign: Option<SignVector> = None;
    let mut best = f64::INFINITY;
    let mut witness = current.clone();
    let mut visited: HashSet<SignVector> = HashSet::new();
    let mut log = Vec::new();
    let mut stop = StopReason::MaxIterations;

    for k in 0..opts.max_iters.max(1) {
        let out = current.solve(opts.orthant_cap, opts.tol)?;
        let mut entry = UpperIterate {
            iteration: k,
            update_sign: update_sign.clone(),
            status: out.status,
            value: out.value,
            sign: None,
            note: None,
        };
        if out.status == Status::Infeasible {
            entry.note = Some("infeasible realization: the worst case is -inf".into());
            log.push(entry);
            best = f64::NEG_INFINITY;
            witness = current;
            stop = StopReason::Infeasible;
            break;
        }
        let s = outcome_orthant(&out);
        entry.sign = Some(s.clone());
        if out.status == Status::Unbounded {
            let ray = out.ray.as_ref().map(|r| r.iter().copied().collect::<Vec<_>>());
            entry.note = Some(format!("unbounded along {ray:?} in orthant {s}"));
        }
        log.push(entry);

        let improved = k == 0 || out.value < best - opts.tol * (1.0 + best.abs().min(f64::MAX));
        if out.value < best {
            best = out.value;
            witness = current.clone();
        }
        if !improved {
            stop = StopReason::NoImprovement;
            break;
        }
        if !visited.insert(s.clone()) {
            stop = StopReason::RepeatedSign;
            break;
        }
        current = rohn_realization(p, &s.negated(), &b, &d)?;
        update_sign = Some(s);
    }

    Ok(UpperBound {
        value: best,
        witness,
        log,
        stop,
    })
}

/// Relative gap below which the two worst-case bounds count as equal.
pub const BOUNDS_MEET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct FieldFailure {
    pub field: &'static str,
    #[serde(skip)]
    pub kind: ErrorKind,
    pub message: String,
}

/// All range quantities of one problem. A failing component leaves its
/// field empty and records the error.
#[derive(Debug, Clone)]
pub struct RangeReport {
    pub best: Option<BestCase>,
    pub worst_lower: Option<WorstLower>,
    /// Tightness tests, one per optimal orthant of the lower-bound program.
    pub tightness: Vec<Tightness>,
    pub worst_upper: Option<UpperBound>,
    pub failures: Vec<FieldFailure>,
}

impl RangeReport {
    pub fn lower_tight(&self) -> Option<bool> {
        self.worst_lower.as_ref()?;
        Some(self.tightness.iter().any(|t| t.tight))
    }

    /// The worst-case value when one of the bounds is known to be exact.
    pub fn worst_exact(&self) -> Option<f64> {
        if self.lower_tight() == Some(true) {
            return self.worst_lower.as_ref().map(|w| w.value);
        }
        match (&self.worst_lower, &self.worst_upper) {
            (_, Some(u)) if u.value == f64::NEG_INFINITY => Some(f64::NEG_INFINITY),
            (Some(l), _) if l.value == f64::INFINITY => Some(f64::INFINITY),
            // bounds that meet pin the value down
            (Some(l), Some(u)) if (u.value - l.value).abs() <= BOUNDS_MEET_TOL * (1.0 + l.value.abs()) => {
                Some(l.value)
            }
            _ => None,
        }
    }
}

fn failure(field: &'static str, e: &Error) -> FieldFailure {
    FieldFailure {
        field,
        kind: e.kind(),
        message: e.to_string(),
    }
}

pub fn full_range(p: &AvlpProblem, opts: &Options) -> RangeReport {
    let (best, (lower, upper)) = rayon::join(
        || best_case(p, opts),
        || {
            rayon::join(
                || -> Result<(WorstLower, Vec<Tightness>)> {
                    let lower = worst_lower_bound(p, opts)?;
                    let tests = lower
                        .outcome
                        .optimal_orthants(opts.tol)
                        .iter()
                        .map(|s| tightness_against(p, &lower, s, opts))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((lower, tests))
                },
                || worst_upper_bound(p, opts),
            )
        },
    );
    let mut failures = Vec::new();
    let best = best.map_err(|e| failures.push(failure("best", &e))).ok();
    let (worst_lower, tightness) = match lower {
        Ok((l, t)) => (Some(l), t),
        Err(e) => {
            failures.push(failure("worst_lower", &e));
            (None, Vec::new())
        }
    };
    let worst_upper = upper.map_err(|e| failures.push(failure("worst_upper", &e))).ok();

    let tol = opts.tol;
    if let (Some(l), Some(u)) = (&worst_lower, &worst_upper) {
        if l.value.is_finite() && u.value.is_finite() && l.value > u.value + tol * (1.0 + u.value.abs()) {
            failures.push(FieldFailure {
                field: "worst_lower",
                kind: ErrorKind::Numerical,
                message: format!("lower bound {} exceeds upper bound {}", l.value, u.value),
            });
        }
    }
    if let (Some(b), Some(u)) = (&best, &worst_upper) {
        if b.value < u.value - tol * (1.0 + b.value.abs().min(f64::MAX)) {
            failures.push(FieldFailure {
                field: "best",
                kind: ErrorKind::Numerical,
                message: format!("best case {} is below the worst-case upper bound {}", b.value, u.value),
            });
        }
    }
    RangeReport {
        best,
        worst_lower,
        tightness,
        worst_upper,
        failures,
    }
}
