//! Truncated-SVD least squares shared by the reconstruction routines.

use nalgebra::{ComplexField, DMatrix, DVector, SVD};

use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct LeastSquares<T: ComplexField<RealField = f64>> {
    svd: SVD<T, nalgebra::Dyn, nalgebra::Dyn>,
    /// Nonincreasing.
    sigma: Vec<f64>,
}

impl<T: ComplexField<RealField = f64>> LeastSquares<T> {
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::EmptySet("least-squares system"));
        }
        let svd = SVD::new(m, true, true);
        let mut sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
        sigma.sort_by(|a, b| b.total_cmp(a));
        Ok(LeastSquares { svd, sigma })
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma[0]
    }

    /// Smallest singular value; zero when the system has more unknowns
    /// than equations.
    pub fn sigma_min(&self) -> f64 {
        let cols = self.svd.v_t.as_ref().map_or(0, |v| v.ncols());
        if self.sigma.len() < cols {
            0.0
        } else {
            *self.sigma.last().unwrap_or(&0.0)
        }
    }

    pub fn is_well_posed(&self) -> bool {
        self.sigma_min() >= RANK_CUTOFF * self.sigma_max()
    }

    /// Minimum-norm least-squares solution with truncation at
    /// `RANK_CUTOFF * sigma_max`.
    pub fn solve(&self, b: &DVector<T>) -> DVector<T> {
        self.svd
            .solve(b, RANK_CUTOFF * self.sigma_max())
            .expect("SVD computed with both factors")
    }

    /// The unit right singular vector of the smallest singular value.
    pub fn smallest_right_vector(&self) -> DVector<T> {
        let s = &self.svd.singular_values;
        let j = (0..s.len())
            .min_by(|&a, &b| s[a].total_cmp(&s[b]))
            .unwrap_or(0);
        let vt = self.svd.v_t.as_ref().expect("SVD computed with both factors");
        vt.row(j).adjoint().into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn solves_overdetermined_complex_system() {
        let m = DMatrix::from_fn(5, 2, |i, j| Complex64::new((i + j) as f64, (i * j) as f64 + 1.0));
        let x = DVector::from_vec(vec![Complex64::new(1.0, -1.0), Complex64::new(0.5, 2.0)]);
        let b = &m * &x;
        let ls = LeastSquares::new(m.clone()).unwrap();
        assert!((ls.solve(&b) - x).norm() < 1e-12);
        let v = ls.smallest_right_vector();
        assert!(((&m * &v).norm() - ls.sigma_min()).abs() < 1e-12);
        assert!(ls.is_well_posed());
    }

    #[test]
    fn underdetermined_reports_zero_sigma_min() {
        let m = DMatrix::from_fn(1, 3, |_, j| j as f64 + 1.0);
        let ls = LeastSquares::new(m).unwrap();
        assert_eq!(ls.sigma_min(), 0.0);
        assert!(!ls.is_well_posed());
    }
}
