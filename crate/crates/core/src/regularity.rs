//! Sufficient conditions for regularity of a square interval matrix.
//!
//! Both tests are one-sided: `Verified` means every member is nonsingular,
//! `Unknown` means nothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalMatrix;
use crate::linalg::{perron_bound, singular_values, LuFactorization};

/// Safety margin below 1 for the spectral-radius test.
pub const BEECK_MARGIN: f64 = 1e-9;
/// Relative margin for the singular-value test.
pub const REX_ROHN_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityCondition {
    /// `ρ(|mid⁻¹| rad) < 1`
    Beeck,
    /// `σ_max(rad) < σ_min(mid)`
    RexRohn,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Regularity {
    Verified {
        condition: RegularityCondition,
        /// The quantity that was compared: the spectral radius bound for
        /// Beeck, the ratio `σ_max(rad) / σ_min(mid)` for Rex–Rohn.
        measure: f64,
    },
    Unknown {
        reason: String,
    },
}

impl Regularity {
    pub fn is_verified(&self) -> bool {
        matches!(self, Regularity::Verified { .. })
    }

    pub fn condition(&self) -> Option<RegularityCondition> {
        match self {
            Regularity::Verified { condition, .. } => Some(*condition),
            Regularity::Unknown { .. } => None,
        }
    }
}

fn require_square(m: &IntervalMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::dim(format!(
            "regularity test on a {}x{} interval matrix",
            m.nrows(),
            m.ncols()
        )))
    }
}

pub fn beeck_regular(m: &IntervalMatrix) -> Result<Regularity> {
    require_square(m)?;
    let lu = match LuFactorization::new(&m.mid()) {
        Ok(lu) => lu,
        Err(e) => {
            return Ok(Regularity::Unknown {
                reason: format!("midpoint matrix: {e}"),
            })
        }
    };
    let g = lu.inverse().abs() * m.rad();
    let bound = perron_bound(&g).upper;
    Ok(if bound <= 1.0 - BEECK_MARGIN {
        Regularity::Verified {
            condition: RegularityCondition::Beeck,
            measure: bound,
        }
    } else {
        Regularity::Unknown {
            reason: format!("spectral radius bound {bound:.6} is not below 1"),
        }
    })
}

pub fn rex_rohn_regular(m: &IntervalMatrix) -> Result<Regularity> {
    require_square(m)?;
    let smin_mid = singular_values(&m.mid()).first().copied().unwrap_or(0.0);
    let smax_rad = singular_values(&m.rad()).last().copied().unwrap_or(0.0);
    Ok(if smin_mid > 0.0 && smax_rad <= (1.0 - REX_ROHN_MARGIN) * smin_mid {
        Regularity::Verified {
            condition: RegularityCondition::RexRohn,
            measure: smax_rad / smin_mid,
        }
    } else {
        Regularity::Unknown {
            reason: format!(
                "largest radius singular value {smax_rad:.6} is not below smallest midpoint singular value {smin_mid:.6}"
            ),
        }
    })
}

/// Tries Beeck first, then Rex–Rohn.
pub fn verify_regular(m: &IntervalMatrix) -> Result<Regularity> {
    match beeck_regular(m)? {
        r @ Regularity::Verified { .. } => Ok(r),
        Regularity::Unknown { reason: first } => match rex_rohn_regular(m)? {
            r @ Regularity::Verified { .. } => Ok(r),
            Regularity::Unknown { reason } => Ok(Regularity::Unknown {
                reason: format!("{first}; {reason}"),
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, DMatrix};

    fn corner_determinants_share_sign(m: &IntervalMatrix) -> bool {
        // every matrix whose entries sit at an endpoint
        let n = m.nrows();
        let entries = n * n;
        let mut sign = 0.0;
        for mask in 0..(1usize << entries) {
            let a = DMatrix::from_fn(n, n, |i, j| {
                if mask >> (i * n + j) & 1 == 1 {
                    m.sup()[(i, j)]
                } else {
                    m.inf()[(i, j)]
                }
            });
            let det = a.determinant();
            if det.abs() < 1e-12 {
                return false;
            }
            if sign == 0.0 {
                sign = det.signum();
            } else if det.signum() != sign {
                return false;
            }
        }
        true
    }

    #[test]
    fn point_matrix_is_regular() {
        let m = IntervalMatrix::point(dmatrix![2.0, 1.0; 0.0, 3.0]);
        let r = beeck_regular(&m).unwrap();
        assert_eq!(
            r,
            Regularity::Verified {
                condition: RegularityCondition::Beeck,
                measure: 0.0
            }
        );
        assert!(rex_rohn_regular(&IntervalMatrix::point(DMatrix::identity(2, 2)))
            .unwrap()
            .is_verified());
    }

    #[test]
    fn beeck_on_nilpotent_radius() {
        let m = IntervalMatrix::from_mid_rad(
            &DMatrix::identity(2, 2),
            &dmatrix![0.0, 2.0; 0.0, 0.0],
        )
        .unwrap();
        assert!(beeck_regular(&m).unwrap().is_verified());
        assert!(corner_determinants_share_sign(&m));
        // Rex–Rohn is weaker here: σ_max(rad) = 2 > 1.
        assert!(!rex_rohn_regular(&m).unwrap().is_verified());
    }

    #[test]
    fn rex_rohn_examples() {
        let m = IntervalMatrix::from_mid_rad(
            &(DMatrix::identity(2, 2) * 10.0),
            &DMatrix::from_element(2, 2, 1.0),
        )
        .unwrap();
        match rex_rohn_regular(&m).unwrap() {
            Regularity::Verified { measure, .. } => assert!((measure - 0.2).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let edge = IntervalMatrix::from_mid_rad(
            &DMatrix::identity(2, 2),
            &DMatrix::identity(2, 2),
        )
        .unwrap();
        assert!(!rex_rohn_regular(&edge).unwrap().is_verified());
        assert!(!beeck_regular(&edge).unwrap().is_verified());
    }

    #[test]
    fn singular_midpoint_is_unknown() {
        let m = IntervalMatrix::point(dmatrix![1.0, 1.0; 1.0, 1.0]);
        assert!(matches!(beeck_regular(&m).unwrap(), Regularity::Unknown { .. }));
        assert!(matches!(verify_regular(&m).unwrap(), Regularity::Unknown { .. }));
    }

    #[test]
    fn non_square_is_an_error() {
        let m = IntervalMatrix::point(DMatrix::zeros(2, 3));
        assert!(beeck_regular(&m).is_err());
        assert!(rex_rohn_regular(&m).is_err());
    }
}
