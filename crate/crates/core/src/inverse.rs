//! Phased inverse source problem: the sampling operator from sources on a
//! bounded domain to far-field amplitudes on a window, its least-squares
//! inverse and stability constant, and sources with vanishing far field.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{amplitude_factor, far_field, sampled_point, window_points, FarFieldSample, Sign};
use crate::geometry::{direction_grid, validate_lambda, SpectralParam};
use crate::lattice::{fourier_norm, LatticeField, Point, SupportDomain};
use crate::linalg::LeastSquares;
use crate::window::SpectralWindow;

/// The map `f |-> (sqrt(w) a(omega, lambda))` restricted to sources on `D`.
#[derive(Clone, Debug)]
pub struct SamplingOperator {
    matrix: DMatrix<Complex64>,
    domain_points: Vec<Point>,
    window: SpectralWindow,
    sign: Sign,
    sqrt_weights: Vec<f64>,
    lsq: LeastSquares<Complex64>,
}

pub fn build_sampling_operator(
    domain: &SupportDomain,
    window: &SpectralWindow,
    sign: Sign,
) -> Result<SamplingOperator> {
    if domain.is_empty() {
        return Err(Error::EmptySet("support domain"));
    }
    if domain.dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            got: domain.dim(),
        });
    }
    let dim = domain.dim();
    let points: Vec<Point> = domain.points().copied().collect();
    let gamma = window_points(window)?;
    let norm = fourier_norm(dim);
    let rows: Vec<Vec<Complex64>> = window
        .samples()
        .par_iter()
        .zip(gamma.par_iter())
        .map(|(s, g)| {
            let k = sampled_point(g, &s.param, sign);
            let pre = amplitude_factor(g, dim, sign) * (norm * s.weight.sqrt());
            points
                .iter()
                .map(|x| pre * Complex64::from_polar(1.0, -x.dot(&k)))
                .collect()
        })
        .collect();
    let m = points.len();
    let matrix = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    let lsq = LeastSquares::new(matrix.clone())?;
    Ok(SamplingOperator {
        matrix,
        domain_points: points,
        window: window.clone(),
        sign,
        sqrt_weights: window.samples().iter().map(|s| s.weight.sqrt()).collect(),
        lsq,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasedDiagnostics {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond: f64,
    /// Weighted residual `||T f - a||`.
    pub residual: f64,
}

impl SamplingOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn domain_points(&self) -> &[Point] {
        &self.domain_points
    }

    pub fn window(&self) -> &SpectralWindow {
        &self.window
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn singular_values(&self) -> &[f64] {
        self.lsq.singular_values()
    }

    pub fn sigma_min(&self) -> f64 {
        self.lsq.sigma_min()
    }

    pub fn sigma_max(&self) -> f64 {
        self.lsq.sigma_max()
    }

    pub fn cond(&self) -> f64 {
        self.sigma_max() / self.sigma_min()
    }

    /// Values of `f` at the domain points, in column order. Entries of `f`
    /// outside the domain are ignored.
    pub fn vectorize(&self, f: &LatticeField) -> DVector<Complex64> {
        DVector::from_iterator(self.domain_points.len(), self.domain_points.iter().map(|x| f.get(x)))
    }

    pub fn field(&self, v: &DVector<Complex64>) -> LatticeField {
        let mut f = LatticeField::zeros(self.window.dim()).expect("valid dimension");
        for (x, c) in self.domain_points.iter().zip(v.iter()) {
            f.insert(*x, *c);
        }
        f
    }

    /// Weighted amplitudes `sqrt(w) a`.
    pub fn apply(&self, f: &LatticeField) -> DVector<Complex64> {
        &self.matrix * self.vectorize(f)
    }

    /// Unweighted far-field amplitudes on the window.
    pub fn amplitudes(&self, f: &LatticeField) -> Vec<Complex64> {
        self.apply(f)
            .iter()
            .zip(&self.sqrt_weights)
            .map(|(v, w)| v / *w)
            .collect()
    }

    fn weighted_data(&self, samples: &[FarFieldSample]) -> Result<DVector<Complex64>> {
        let window = self.window.samples();
        if samples.len() != window.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples for a window of {}",
                samples.len(),
                window.len()
            )));
        }
        for (i, (s, w)) in samples.iter().zip(window).enumerate() {
            let aligned = s.sign == self.sign
                && (s.lambda - w.lambda()).abs() <= 1e-12
                && s.omega.dim() == w.omega.dim()
                && s
                    .omega
                    .as_slice()
                    .iter()
                    .zip(w.omega.as_slice())
                    .all(|(a, b)| (a - b).abs() <= 1e-12);
            if !aligned {
                return Err(Error::InvalidArgument(format!(
                    "sample {i} does not match the window"
                )));
            }
        }
        Ok(DVector::from_iterator(
            samples.len(),
            samples
                .iter()
                .zip(&self.sqrt_weights)
                .map(|(s, w)| s.value * *w),
        ))
    }

    /// Minimum-norm least-squares source on `D` explaining `samples`.
    pub fn reconstruct(&self, samples: &[FarFieldSample]) -> Result<(LatticeField, PhasedDiagnostics)> {
        if !self.lsq.is_well_posed() {
            return Err(Error::IllPosedWindow {
                sigma_min: self.sigma_min(),
                sigma_max: self.sigma_max(),
            });
        }
        let b = self.weighted_data(samples)?;
        let x = self.lsq.solve(&b);
        let residual = (&self.matrix * &x - b).norm();
        Ok((
            self.field(&x),
            PhasedDiagnostics {
                sigma_min: self.sigma_min(),
                sigma_max: self.sigma_max(),
                cond: self.cond(),
                residual,
            },
        ))
    }

    /// `1 / sigma_min`: the best constant in
    /// `||f2 - f1|| <= C ||T f2 - T f1||` over sources on `D`.
    pub fn stability_constant(&self) -> Result<f64> {
        let s = self.sigma_min();
        if s <= 0.0 {
            return Err(Error::IllPosedWindow {
                sigma_min: s,
                sigma_max: self.sigma_max(),
            });
        }
        Ok(1.0 / s)
    }

    /// The unit-norm source attaining the stability bound.
    pub fn extremal_source(&self) -> LatticeField {
        self.field(&self.lsq.smallest_right_vector())
    }
}

/// Builds the operator for `(D, window, sign)` and reconstructs from `samples`.
pub fn reconstruct_phased(
    samples: &[FarFieldSample],
    domain: &SupportDomain,
    window: &SpectralWindow,
    sign: Sign,
) -> Result<(LatticeField, PhasedDiagnostics)> {
    build_sampling_operator(domain, window, sign)?.reconstruct(samples)
}

pub fn stability_constant(op: &SamplingOperator) -> Result<f64> {
    op.stability_constant()
}

/// `prod_j (Delta - lambda_j) u`, a compactly supported source whose far
/// field vanishes at every `lambda_j`.
pub fn nonuniqueness_source(u: &LatticeField, lambdas: &[f64]) -> Result<LatticeField> {
    let mut f = u.clone();
    for &l in lambdas {
        validate_lambda(l, u.dim())?;
        f = f.helmholtz(l);
    }
    Ok(f)
}

/// `max |a(omega, lambda)|` over an `n_dirs` direction grid.
pub fn vanishing_residual(f: &LatticeField, sp: &SpectralParam, sign: Sign, n_dirs: usize) -> Result<f64> {
    let dirs = direction_grid(sp.dim(), n_dirs)?;
    let vals: Vec<f64> = dirs
        .par_iter()
        .map(|w| far_field(f, w, sp, sign).map(|a| a.norm()))
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// `max |d a / d lambda|` over an `n_dirs` direction grid, by central
/// differences with step `h`.
pub fn vanishing_derivative_residual(
    f: &LatticeField,
    lambda: f64,
    sign: Sign,
    n_dirs: usize,
    h: f64,
) -> Result<f64> {
    let lo = validate_lambda(lambda - h, f.dim())?;
    let hi = validate_lambda(lambda + h, f.dim())?;
    let dirs = direction_grid(f.dim(), n_dirs)?;
    let vals: Vec<f64> = dirs
        .par_iter()
        .map(|w| {
            let a = far_field(f, w, &hi, sign)?;
            let b = far_field(f, w, &lo, sign)?;
            Ok(((a - b) / (2.0 * h)).norm())
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::far_field_batch;
    use crate::fourier::{dft, Convention};
    use crate::geometry::{circle_directions, kappa, linspace, phi, Direction};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(domain: &SupportDomain, seed: u64) -> LatticeField {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let vals: Vec<Complex64> = (0..domain.len()).map(|_| c(next(), next())).collect();
        LatticeField::from_values(domain, &vals).unwrap()
    }

    fn window_64x8() -> SpectralWindow {
        SpectralWindow::product(&circle_directions(64, 0.0), &linspace(1.6, 2.4, 8)).unwrap()
    }

    #[test]
    fn singleton_domain_columns_are_flat() {
        let d = SupportDomain::singleton(2, Point::origin()).unwrap();
        let w = window_64x8();
        let op = build_sampling_operator(&d, &w, Sign::Minus).unwrap();
        for (i, s) in w.samples().iter().enumerate() {
            let g = kappa(&s.omega, &s.param).unwrap();
            let want = s.weight.sqrt() * (2.0 * std::f64::consts::PI).sqrt() * fourier_norm(2)
                / g.amplitude_denominator();
            assert!((op.matrix()[(i, 0)].norm() - want).abs() < 1e-14);
        }
        let col = op.matrix().column(0).norm();
        assert!((op.stability_constant().unwrap() - 1.0 / col).abs() < 1e-12 / col);
    }

    #[test]
    fn operator_matches_far_field_batch() {
        let d = SupportDomain::box_domain(&[-1, -1], &[1, 1]).unwrap();
        let w = window_64x8();
        let f = random_field(&d, 3);
        for sign in [Sign::Plus, Sign::Minus] {
            let op = build_sampling_operator(&d, &w, sign).unwrap();
            let a = op.amplitudes(&f);
            let batch = far_field_batch(&f, &w, sign).unwrap();
            for (x, y) in a.iter().zip(&batch) {
                assert!((x - y.value).norm() < 1e-12);
            }
            assert!(op.sigma_min() > 0.0);
        }
    }

    #[test]
    fn noiseless_round_trip() {
        let d = SupportDomain::box_domain(&[0, 0], &[3, 3]).unwrap();
        let w = window_64x8();
        let f = random_field(&d, 11);
        let data = far_field_batch(&f, &w, Sign::Minus).unwrap();
        let (g, diag) = reconstruct_phased(&data, &d, &w, Sign::Minus).unwrap();
        assert!(g.diff_l2(&f) / f.norm_l2() <= 1e-8 * diag.cond);
        assert!(diag.residual < 1e-10);
    }

    #[test]
    fn single_sample_inverts_delta() {
        let d = SupportDomain::singleton(2, Point::origin()).unwrap();
        let w = SpectralWindow::single(Direction::new(vec![1.0, 0.0]).unwrap(), 2.0).unwrap();
        let f = LatticeField::delta(2, Point::origin(), c(0.3, -1.2)).unwrap();
        let data = far_field_batch(&f, &w, Sign::Minus).unwrap();
        let (g, _) = reconstruct_phased(&data, &d, &w, Sign::Minus).unwrap();
        assert!((g.get(&Point::origin()) - c(0.3, -1.2)).norm() < 1e-14);
    }

    #[test]
    fn rejects_underdetermined_window() {
        let d = SupportDomain::box_domain(&[0, 0], &[2, 2]).unwrap();
        let w = SpectralWindow::single(Direction::new(vec![1.0, 0.0]).unwrap(), 2.0).unwrap();
        let data = far_field_batch(&random_field(&d, 1), &w, Sign::Minus).unwrap();
        assert!(matches!(
            reconstruct_phased(&data, &d, &w, Sign::Minus),
            Err(Error::IllPosedWindow { .. })
        ));
    }

    #[test]
    fn extremal_source_attains_bound() {
        let d = SupportDomain::box_domain(&[0, 0], &[2, 2]).unwrap();
        let op = build_sampling_operator(&d, &window_64x8(), Sign::Minus).unwrap();
        let v = op.extremal_source();
        let ratio = v.norm_l2() / op.apply(&v).norm();
        let cst = op.stability_constant().unwrap();
        assert!((ratio - cst).abs() <= 1e-10 * cst);
    }

    #[test]
    fn stencil_by_hand() {
        let u = LatticeField::delta(2, Point::origin(), c(1.0, 0.0)).unwrap();
        let f = nonuniqueness_source(&u, &[2.0]).unwrap();
        assert_eq!(f.get(&Point::origin()), c(-2.0, 0.0));
        for p in Point::origin().neighbours(2) {
            assert_eq!(f.get(&p), c(1.0, 0.0));
        }
        assert_eq!(nonuniqueness_source(&u, &[]).unwrap(), u);
        assert!(nonuniqueness_source(&u, &[4.5]).is_err());
    }

    #[test]
    fn spectrum_picks_up_symbol_factors() {
        let d = SupportDomain::box_domain(&[-1, 0], &[1, 1]).unwrap();
        let u = random_field(&d, 5);
        let f = nonuniqueness_source(&u, &[1.5, -2.5]).unwrap();
        let su = dft(&u, 16, Convention::CenteredAtO).unwrap();
        let sf = dft(&f, 16, Convention::CenteredAtO).unwrap();
        for ((k, a), b) in su.nodes().iter().zip(su.values()).zip(sf.values()) {
            let p = phi(k);
            assert!((a * (p - 1.5) * (p + 2.5) - b).norm() < 1e-12);
        }
    }

    #[test]
    fn far_field_vanishes_at_roots() {
        let d = SupportDomain::box_domain(&[0, 0], &[1, 2]).unwrap();
        let u = random_field(&d, 9);
        let f = nonuniqueness_source(&u, &[2.0, -1.0]).unwrap();
        for l in [2.0, -1.0] {
            let sp = validate_lambda(l, 2).unwrap();
            assert!(vanishing_residual(&f, &sp, Sign::Minus, 256).unwrap() <= 1e-12);
        }
        let sp = validate_lambda(2.3, 2).unwrap();
        assert!(vanishing_residual(&f, &sp, Sign::Minus, 256).unwrap() > 1e-3);
        let delta = LatticeField::delta(2, Point::origin(), c(1.0, 0.0)).unwrap();
        let sp = validate_lambda(2.0, 2).unwrap();
        assert!(vanishing_residual(&delta, &sp, Sign::Minus, 64).unwrap() > 0.1);

        let double = nonuniqueness_source(&u, &[2.0, 2.0]).unwrap();
        assert!(vanishing_derivative_residual(&double, 2.0, Sign::Minus, 64, 1e-5).unwrap() <= 1e-8);
        let single = nonuniqueness_source(&u, &[2.0]).unwrap();
        assert!(vanishing_derivative_residual(&single, 2.0, Sign::Minus, 64, 1e-5).unwrap() > 1e-3);
    }
}
