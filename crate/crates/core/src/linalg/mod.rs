//! Dense real linear algebra and enclosures for square interval systems.

mod enclosure;
mod lu;
mod spectral;

pub use enclosure::{enclose_interval_solution, hull_vertices_orthant, HULL_DEDUP_TOL};
pub use lu::{inf_norm, LuFactorization, PIVOT_THRESHOLD};
pub use spectral::{perron_bound, singular_values, symmetric_eigenvalues, PerronBound};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solves `A x = b` for square, numerically nonsingular `A`.
pub fn solve_square(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::dim(format!(
            "right-hand side of length {} for a {}x{} system",
            b.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(LuFactorization::new(a)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};
    use proptest::prelude::*;

    #[test]
    fn identity_system() {
        let b = dvector![1.5, -2.0, 3.0];
        assert_eq!(solve_square(&DMatrix::identity(3, 3), &b).unwrap(), b);
    }

    #[test]
    fn example4_vertex_systems() {
        let b = dvector![12.0, 18.0];
        let x3 = solve_square(&dmatrix![1.05, 1.05; -2.9, 3.2], &b).unwrap();
        assert!((x3 - dvector![3.0445, 8.3841]).amax() < 1e-4);
        let x1 = solve_square(&dmatrix![0.95, 0.95; -3.1, 2.8], &b).unwrap();
        assert!((x1 - dvector![2.9439, 9.6878]).amax() < 1e-4);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            solve_square(&DMatrix::identity(2, 2), &dvector![1.0]),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        #[test]
        fn backward_error_is_small(
            entries in proptest::collection::vec(-1.0f64..1.0, 16),
            rhs in proptest::collection::vec(-10.0f64..10.0, 4),
        ) {
            // diagonally dominant, hence well conditioned
            let mut a = DMatrix::from_vec(4, 4, entries);
            for i in 0..4 {
                a[(i, i)] += 5.0 * if a[(i, i)] >= 0.0 { 1.0 } else { -1.0 };
            }
            let b = DVector::from_vec(rhs);
            let x = solve_square(&a, &b).unwrap();
            let res = (&a * &x - &b).amax();
            prop_assert!(res <= 1e-8 * (inf_norm(&a) * x.amax() + b.amax()));
        }
    }
}
