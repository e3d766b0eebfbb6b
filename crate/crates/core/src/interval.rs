//! Interval scalars, vectors and matrices.
//!
//! Intervals are stored by their endpoints. Midpoint and radius are derived
//! views, so `inf = mid - rad` and `sup = mid + rad` hold up to one rounding.
//! No directed rounding is performed anywhere; comparisons that need slack
//! take an explicit absolute tolerance.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// A closed real interval `[inf, sup]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub inf: f64,
    pub sup: f64,
}

impl Interval {
    pub fn new(inf: f64, sup: f64) -> Result<Self> {
        if !(inf <= sup) {
            return Err(Error::Input(format!("interval [{inf}, {sup}] has inf > sup")));
        }
        Ok(Interval { inf, sup })
    }

    pub fn point(x: f64) -> Self {
        Interval { inf: x, sup: x }
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        Interval { inf: -r, sup: r }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.inf + self.sup)
    }

    pub fn rad(&self) -> f64 {
        0.5 * (self.sup - self.inf)
    }

    pub fn width(&self) -> f64 {
        self.sup - self.inf
    }

    /// Magnitude `max(|inf|, |sup|)`.
    pub fn mag(&self) -> f64 {
        self.inf.abs().max(self.sup.abs())
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.inf - tol <= x && x <= self.sup + tol
    }

    pub fn contains_zero(&self) -> bool {
        self.inf <= 0.0 && 0.0 <= self.sup
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let inf = self.inf.max(other.inf);
        let sup = self.sup.min(other.sup);
        (inf <= sup).then_some(Interval { inf, sup })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            inf: self.inf.min(other.inf),
            sup: self.sup.max(other.sup),
        }
    }

    /// Interval quotient; `None` when the divisor contains zero.
    pub fn checked_div(&self, rhs: &Interval) -> Option<Interval> {
        if rhs.contains_zero() {
            return None;
        }
        let recip = Interval {
            inf: 1.0 / rhs.sup,
            sup: 1.0 / rhs.inf,
        };
        Some(*self * recip)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            inf: self.inf + rhs.inf,
            sup: self.sup + rhs.sup,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            inf: self.inf - rhs.sup,
            sup: self.sup - rhs.inf,
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            inf: -self.sup,
            sup: -self.inf,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.inf * rhs.inf,
            self.inf * rhs.sup,
            self.sup * rhs.inf,
            self.sup * rhs.sup,
        ];
        Interval {
            inf: p.iter().copied().fold(f64::INFINITY, f64::min),
            sup: p.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self >= 0.0 {
            Interval {
                inf: self * rhs.inf,
                sup: self * rhs.sup,
            }
        } else {
            Interval {
                inf: self * rhs.sup,
                sup: self * rhs.inf,
            }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.inf, self.sup)
    }
}

/// An entrywise box of real vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalVector {
    inf: DVector<f64>,
    sup: DVector<f64>,
}

impl IntervalVector {
    pub fn new(inf: DVector<f64>, sup: DVector<f64>) -> Result<Self> {
        if inf.len() != sup.len() {
            return Err(Error::dim(format!(
                "interval vector bounds have lengths {} and {}",
                inf.len(),
                sup.len()
            )));
        }
        if let Some(i) = (0..inf.len()).find(|&i| !(inf[i] <= sup[i])) {
            return Err(Error::Input(format!(
                "entry {}: inf {} > sup {}",
                i + 1,
                inf[i],
                sup[i]
            )));
        }
        Ok(IntervalVector { inf, sup })
    }

    pub fn from_mid_rad(mid: &DVector<f64>, rad: &DVector<f64>) -> Result<Self> {
        if rad.iter().any(|&r| r < 0.0) {
            return Err(Error::Input("negative radius".into()));
        }
        Self::new(mid - rad, mid + rad)
    }

    pub fn point(x: DVector<f64>) -> Self {
        IntervalVector {
            inf: x.clone(),
            sup: x,
        }
    }

    pub fn from_intervals(items: &[Interval]) -> Self {
        IntervalVector {
            inf: DVector::from_iterator(items.len(), items.iter().map(|i| i.inf)),
            sup: DVector::from_iterator(items.len(), items.iter().map(|i| i.sup)),
        }
    }

    pub fn len(&self) -> usize {
        self.inf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inf.len() == 0
    }

    pub fn inf(&self) -> &DVector<f64> {
        &self.inf
    }

    pub fn sup(&self) -> &DVector<f64> {
        &self.sup
    }

    pub fn mid(&self) -> DVector<f64> {
        (&self.inf + &self.sup) * 0.5
    }

    pub fn rad(&self) -> DVector<f64> {
        (&self.sup - &self.inf) * 0.5
    }

    pub fn get(&self, i: usize) -> Interval {
        Interval {
            inf: self.inf[i],
            sup: self.sup[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn select(&self, idx: &[usize]) -> IntervalVector {
        IntervalVector {
            inf: DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.inf[i])),
            sup: DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.sup[i])),
        }
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        x.len() == self.len() && (0..self.len()).all(|i| self.get(i).contains(x[i], tol))
    }

    pub fn widths(&self) -> DVector<f64> {
        &self.sup - &self.inf
    }

    /// `c_s = mid + diag(s) * rad` for `s` in `[-1, 1]^n`.
    pub fn realize(&self, s: &DVector<f64>) -> Result<DVector<f64>> {
        if s.len() != self.len() {
            return Err(Error::dim(format!(
                "sign vector of length {} for interval vector of length {}",
                s.len(),
                self.len()
            )));
        }
        check_unit_box(s, "s")?;
        let mid = self.mid();
        let rad = self.rad();
        Ok(DVector::from_fn(self.len(), |i, _| mid[i] + s[i] * rad[i]))
    }
}

/// An entrywise box of real matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMatrix {
    inf: DMatrix<f64>,
    sup: DMatrix<f64>,
}

impl IntervalMatrix {
    pub fn new(inf: DMatrix<f64>, sup: DMatrix<f64>) -> Result<Self> {
        if inf.shape() != sup.shape() {
            return Err(Error::dim(format!(
                "interval matrix bounds have shapes {:?} and {:?}",
                inf.shape(),
                sup.shape()
            )));
        }
        for i in 0..inf.nrows() {
            for j in 0..inf.ncols() {
                if !(inf[(i, j)] <= sup[(i, j)]) {
                    return Err(Error::Input(format!(
                        "entry ({}, {}): inf {} > sup {}",
                        i + 1,
                        j + 1,
                        inf[(i, j)],
                        sup[(i, j)]
                    )));
                }
            }
        }
        Ok(IntervalMatrix { inf, sup })
    }

    pub fn from_mid_rad(mid: &DMatrix<f64>, rad: &DMatrix<f64>) -> Result<Self> {
        if mid.shape() != rad.shape() {
            return Err(Error::dim("midpoint and radius shapes differ"));
        }
        if rad.iter().any(|&r| r < 0.0) {
            return Err(Error::Input("negative radius".into()));
        }
        Self::new(mid - rad, mid + rad)
    }

    pub fn point(m: DMatrix<f64>) -> Self {
        IntervalMatrix {
            inf: m.clone(),
            sup: m,
        }
    }

    pub fn nrows(&self) -> usize {
        self.inf.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.inf.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inf.shape()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn inf(&self) -> &DMatrix<f64> {
        &self.inf
    }

    pub fn sup(&self) -> &DMatrix<f64> {
        &self.sup
    }

    pub fn mid(&self) -> DMatrix<f64> {
        (&self.inf + &self.sup) * 0.5
    }

    pub fn rad(&self) -> DMatrix<f64> {
        (&self.sup - &self.inf) * 0.5
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        Interval {
            inf: self.inf[(i, j)],
            sup: self.sup[(i, j)],
        }
    }

    pub fn transpose(&self) -> IntervalMatrix {
        IntervalMatrix {
            inf: self.inf.transpose(),
            sup: self.sup.transpose(),
        }
    }

    /// Submatrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> IntervalMatrix {
        IntervalMatrix {
            inf: self.inf.select_rows(rows.iter()),
            sup: self.sup.select_rows(rows.iter()),
        }
    }

    pub fn contains(&self, m: &DMatrix<f64>, tol: f64) -> bool {
        m.shape() == self.shape()
            && self
                .inf
                .iter()
                .zip(self.sup.iter())
                .zip(m.iter())
                .all(|((&lo, &hi), &x)| lo - tol <= x && x <= hi + tol)
    }

    /// Rohn's structured member `A_{r,s} = mid - diag(r) * rad * diag(s)`.
    pub fn realize(&self, r: &DVector<f64>, s: &DVector<f64>) -> Result<DMatrix<f64>> {
        if r.len() != self.nrows() || s.len() != self.ncols() {
            return Err(Error::dim(format!(
                "realization signs of lengths ({}, {}) for a {}x{} interval matrix",
                r.len(),
                s.len(),
                self.nrows(),
                self.ncols()
            )));
        }
        check_unit_box(r, "r")?;
        check_unit_box(s, "s")?;
        let mid = self.mid();
        let rad = self.rad();
        Ok(DMatrix::from_fn(self.nrows(), self.ncols(), |i, j| {
            mid[(i, j)] - r[i] * rad[(i, j)] * s[j]
        }))
    }

    /// Product of a real matrix and this interval matrix, `P * M`.
    pub fn premul(&self, p: &DMatrix<f64>) -> Result<IntervalMatrix> {
        if p.ncols() != self.nrows() {
            return Err(Error::dim("premultiplier has the wrong number of columns"));
        }
        let mid = p * self.mid();
        let rad = p.abs() * self.rad();
        Ok(IntervalMatrix {
            inf: &mid - &rad,
            sup: &mid + &rad,
        })
    }

    /// Interval evaluation of `M x` over a box `x`.
    pub fn mul_interval_vector(&self, x: &IntervalVector) -> Result<IntervalVector> {
        if x.len() != self.ncols() {
            return Err(Error::dim("interval matrix-vector product"));
        }
        let items: Vec<Interval> = (0..self.nrows())
            .map(|i| {
                (0..self.ncols()).fold(Interval::point(0.0), |acc, j| {
                    acc + self.get(i, j) * x.get(j)
                })
            })
            .collect();
        Ok(IntervalVector::from_intervals(&items))
    }
}

fn check_unit_box(v: &DVector<f64>, name: &str) -> Result<()> {
    match v.iter().position(|x| !(x.abs() <= 1.0)) {
        Some(i) => Err(Error::Input(format!(
            "{name}[{}] = {} lies outside [-1, 1]",
            i + 1,
            v[i]
        ))),
        None => Ok(()),
    }
}

/// A vector with entries exactly `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::Input("sign entries must be +1 or -1".into()));
        }
        Ok(SignVector(entries))
    }

    pub fn ones(n: usize) -> Self {
        SignVector(vec![1; n])
    }

    /// Entrywise sign, with `sgn(0) = +1`.
    pub fn of(x: &DVector<f64>) -> Self {
        SignVector(x.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect())
    }

    /// The `k`-th sign vector of length `n` in lexicographic order (`-1 < +1`,
    /// first entry most significant).
    pub fn nth(n: usize, k: usize) -> Self {
        SignVector(
            (0..n)
                .map(|j| if (k >> (n - 1 - j)) & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    /// All `2^n` sign vectors in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = SignVector> {
        (0..1usize << n).map(move |k| SignVector::nth(n, k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        f64::from(self.0[i])
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.0.iter().map(|&e| f64::from(e)))
    }

    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|&e| -e).collect())
    }

    /// Whether `diag(s) x >= -tol` holds.
    pub fn admits(&self, x: &DVector<f64>, tol: f64) -> bool {
        x.len() == self.len() && x.iter().zip(&self.0).all(|(&v, &s)| f64::from(s) * v >= -tol)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *e > 0 { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

/// Oettli–Prager test: does `x` solve `M' x = b'` for some `M'` in `m` and
/// `b'` in `b`? Each row inequality gets slack `tol * (1 + row scale)`.
pub fn oettli_prager_member(
    m: &IntervalMatrix,
    b: &IntervalVector,
    x: &DVector<f64>,
    tol: f64,
) -> Result<bool> {
    if m.nrows() != b.len() || m.ncols() != x.len() {
        return Err(Error::dim("Oettli-Prager membership"));
    }
    let mid = m.mid();
    let rad = m.rad();
    let bc = b.mid();
    let br = b.rad();
    let ax = x.abs();
    let residual = &mid * x - &bc;
    let allowed = &rad * &ax + &br;
    let scale = mid.abs() * &ax + bc.abs();
    Ok((0..m.nrows()).all(|i| residual[i].abs() <= allowed[i] + tol * (1.0 + scale[i])))
}
