use nalgebra::{DMatrix, DVector};

use super::{perron_bound, singular_values, solve_square, LuFactorization};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix, IntervalVector, SignVector};
use crate::regularity::{verify_regular, RegularityCondition};

/// Two hull vertices closer than this in the max-norm are merged.
pub const HULL_DEDUP_TOL: f64 = 1e-7;

const MAX_SWEEPS: usize = 100;
const SWEEP_IMPROVEMENT: f64 = 1e-10;

/// Box containing every solution of `M' x = b'` with `M'` in `m`, `b'` in `b`.
///
/// The system is preconditioned by the inverse midpoint and written in
/// residual form around `x0 = mid(M)⁻¹ mid(b)`. An initial box comes from a
/// norm bound (a Perron-weighted max-norm when the Beeck condition holds, the
/// 2-norm under Rex–Rohn), is cut down to the Hansen–Bliek–Rohn hull of the
/// preconditioned system when that exists, and is then tightened by interval
/// Gauss–Seidel sweeps.
pub fn enclose_interval_solution(m: &IntervalMatrix, b: &IntervalVector) -> Result<IntervalVector> {
    if !m.is_square() || m.nrows() != b.len() {
        return Err(Error::dim(format!(
            "interval system {}x{} with right-hand side of length {}",
            m.nrows(),
            m.ncols(),
            b.len()
        )));
    }
    let n = m.nrows();
    let condition = verify_regular(m)?
        .condition()
        .ok_or(Error::UnknownRegularity)?;
    let mid = m.mid();
    let rad = m.rad();
    let precond = LuFactorization::new(&mid)
        .map_err(|_| Error::UnknownRegularity)?
        .inverse();
    let x0 = &precond * b.mid();

    // w = b - M x0 over the whole box
    let center = &mid * &x0;
    let spread = &rad * x0.abs();
    let w = IntervalVector::new(b.inf() - (&center + &spread), b.sup() - (&center - &spread))?;

    let p = m.premul(&precond)?;
    let r_mid = &precond * w.mid();
    let r_rad = precond.abs() * w.rad();
    let r: Vec<Interval> = (0..n)
        .map(|i| Interval {
            inf: r_mid[i] - r_rad[i],
            sup: r_mid[i] + r_rad[i],
        })
        .collect();

    let radius = initial_radius(condition, m, &precond, &r, &w)?;
    let mut e: Vec<Interval> = radius.iter().map(|&v| Interval::symmetric(v)).collect();
    if let Some(hull) = hansen_bliek_rohn(m, b, &precond) {
        for i in 0..n {
            let shifted = Interval {
                inf: hull[i].inf - x0[i],
                sup: hull[i].sup - x0[i],
            };
            if let Some(tight) = shifted.intersect(&e[i]) {
                e[i] = tight;
            }
        }
    }

    let mut width: f64 = e.iter().map(Interval::width).sum();
    for _ in 0..MAX_SWEEPS {
        for i in 0..n {
            let diag = p.get(i, i);
            let updated = if diag.contains_zero() {
                // Krawczyk component: r_i + sum_j (δ_ij - P_ij) e_j
                (0..n).fold(r[i], |acc, j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    acc + (Interval::point(delta) - p.get(i, j)) * e[j]
                })
            } else {
                let rest = (0..n)
                    .filter(|&j| j != i)
                    .fold(r[i], |acc, j| acc - p.get(i, j) * e[j]);
                rest.checked_div(&diag).expect("diagonal excludes zero")
            };
            if let Some(tight) = updated.intersect(&e[i]) {
                e[i] = tight;
            }
        }
        let new_width: f64 = e.iter().map(Interval::width).sum();
        let gain = width - new_width;
        width = new_width;
        if gain <= SWEEP_IMPROVEMENT * (1.0 + width) {
            break;
        }
    }

    let items: Vec<Interval> = (0..n)
        .map(|i| Interval {
            inf: x0[i] + e[i].inf,
            sup: x0[i] + e[i].sup,
        })
        .collect();
    Ok(IntervalVector::from_intervals(&items))
}

/// Hull of the preconditioned system `C M x = C b`, enclosed in
/// `[I - G, I + G] x = [C mid b - |C| rad b, C mid b + |C| rad b]` with
/// `G = |I - C mid| + |C| rad`. Needs `ρ(G) < 1`.
fn hansen_bliek_rohn(m: &IntervalMatrix, b: &IntervalVector, precond: &DMatrix<f64>) -> Option<Vec<Interval>> {
    let n = m.nrows();
    let g = (DMatrix::identity(n, n) - precond * m.mid()).abs() + precond.abs() * m.rad();
    if perron_bound(&g).upper >= 1.0 {
        return None;
    }
    let big_m = LuFactorization::new(&(DMatrix::identity(n, n) - g)).ok()?.inverse();
    if big_m.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return None;
    }
    let bc = precond * b.mid();
    let delta = precond.abs() * b.rad();
    let x_star = &big_m * (bc.abs() + delta);
    let hull = (0..n)
        .map(|i| {
            let mu = big_m[(i, i)];
            let nu = 1.0 / (2.0 * mu - 1.0);
            let lo = -x_star[i] + mu * (bc[i] + bc[i].abs());
            let hi = x_star[i] + mu * (bc[i] - bc[i].abs());
            Interval {
                inf: lo.min(nu * lo),
                sup: hi.max(nu * hi),
            }
        })
        .collect();
    Some(hull)
}

fn initial_radius(
    condition: RegularityCondition,
    m: &IntervalMatrix,
    precond: &DMatrix<f64>,
    r: &[Interval],
    w: &IntervalVector,
) -> Result<Vec<f64>> {
    let n = m.nrows();
    if condition == RegularityCondition::Beeck {
        // |e| <= |r| + G|e| with G = |I - C mid| + |C| rad
        let g = (DMatrix::identity(n, n) - precond * m.mid()).abs() + precond.abs() * m.rad();
        let pb = perron_bound(&g);
        if pb.upper < 1.0 {
            let v = &pb.vector;
            let scaled = (0..n).map(|i| r[i].mag() / v[i]).fold(0.0, f64::max);
            let k = scaled / (1.0 - pb.upper);
            return Ok((0..n).map(|i| v[i] * k).collect());
        }
    }
    let smin = singular_values(&m.mid()).first().copied().unwrap_or(0.0);
    let smax = singular_values(&m.rad()).last().copied().unwrap_or(0.0);
    if smin <= smax {
        return Err(Error::UnknownRegularity);
    }
    let wnorm = w.iter().map(|x| x.mag().powi(2)).sum::<f64>().sqrt();
    Ok(vec![wnorm / (smin - smax); n])
}

/// Extreme solutions of a square interval system inside one orthant.
///
/// Inside the orthant `s` the solution set is the polytope cut out by the
/// Oettli–Prager inequalities, whose vertices solve the `2^n` corner systems
/// `A_{r,s} x = mid(b) + diag(r) rad(b)`. Every corner solution must itself
/// lie in the orthant, otherwise the description is not valid and an
/// `OrthantEscape` error is returned. Output is in lexicographic order of `r`
/// with near-duplicates removed.
pub fn hull_vertices_orthant(
    m: &IntervalMatrix,
    b: &IntervalVector,
    s: &SignVector,
) -> Result<Vec<DVector<f64>>> {
    let n = m.nrows();
    if !m.is_square() || b.len() != n || s.len() != n {
        return Err(Error::dim("orthant hull needs a square system and matching signs"));
    }
    if !verify_regular(m)?.is_verified() {
        return Err(Error::UnknownRegularity);
    }
    let sv = s.to_vector();
    let mut points: Vec<DVector<f64>> = Vec::new();
    for r in SignVector::all(n) {
        let rv = r.to_vector();
        let a = m.realize(&rv, &sv)?;
        let rhs = b.realize(&rv)?;
        let x = solve_square(&a, &rhs)?;
        if !s.admits(&x, 1e-9 * (1.0 + x.amax())) {
            return Err(Error::OrthantEscape {
                orthant: s.to_string(),
                point: x.iter().copied().collect(),
            });
        }
        if points.iter().all(|p| (p - &x).amax() > HULL_DEDUP_TOL) {
            points.push(x);
        }
    }
    Ok(points)
}
