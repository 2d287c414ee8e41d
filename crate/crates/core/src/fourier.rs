//! Fourier transform between lattice fields and torus samples.
//!
//! The forward transform `F u(k) = (2pi)^(-d/2) sum_x u(x) e^{-ik.x}` is a
//! trigonometric polynomial, so it is sampled exactly on a uniform grid. The
//! inverse uses the periodic trapezoidal rule, which is exact for trigonometric
//! polynomials whose frequencies fit inside the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_dim, fourier_norm, LatticeField, SupportDomain};

/// Which point the torus grid is centred on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Grid spans `[-pi, pi)^d`, used for `lambda > 0`.
    CenteredAtO,
    /// Grid spans `[0, 2pi)^d`, used for `lambda < 0`.
    CenteredAtOPi,
}

impl Convention {
    pub fn offset(self) -> f64 {
        match self {
            Convention::CenteredAtO => -PI,
            Convention::CenteredAtOPi => 0.0,
        }
    }

    pub fn for_lambda(lambda: f64) -> Self {
        if lambda < 0.0 {
            Convention::CenteredAtOPi
        } else {
            Convention::CenteredAtO
        }
    }
}

/// Samples of a function on `T^d` over an `N^d` grid, row-major with the
/// last axis varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusSpectrum {
    dim: usize,
    grid_size: usize,
    convention: Convention,
    values: Vec<Complex64>,
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 4 || grid_size % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "grid size must be even and at least 4, got {grid_size}"
        )));
    }
    Ok(())
}

impl TorusSpectrum {
    pub fn new(
        dim: usize,
        grid_size: usize,
        convention: Convention,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        check_dim(dim)?;
        check_grid(grid_size)?;
        let expected = grid_size.pow(dim as u32);
        if values.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "spectrum has {} values, expected {expected}",
                values.len()
            )));
        }
        Ok(TorusSpectrum {
            dim,
            grid_size,
            convention,
            values,
        })
    }

    /// Samples `g(k)` at every grid node.
    pub fn from_fn(
        dim: usize,
        grid_size: usize,
        convention: Convention,
        g: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        check_dim(dim)?;
        check_grid(grid_size)?;
        let nodes = grid_nodes(dim, grid_size, convention);
        let values = nodes.iter().map(|k| g(k)).collect();
        Ok(TorusSpectrum {
            dim,
            grid_size,
            convention,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Torus coordinates of every node, in storage order.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        grid_nodes(self.dim, self.grid_size, self.convention)
    }

    /// Node spacing `2pi / N`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.grid_size as f64
    }

    /// Pointwise combination of two spectra on the same grid.
    pub fn zip_with(
        &self,
        other: &TorusSpectrum,
        g: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<TorusSpectrum> {
        if self.dim != other.dim
            || self.grid_size != other.grid_size
            || self.convention != other.convention
        {
            return Err(Error::InvalidArgument("spectra live on different grids".into()));
        }
        Ok(TorusSpectrum {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| g(*a, *b))
                .collect(),
            ..self.clone()
        })
    }

    pub fn map(&self, g: impl Fn(Complex64) -> Complex64) -> TorusSpectrum {
        TorusSpectrum {
            values: self.values.iter().map(|v| g(*v)).collect(),
            ..self.clone()
        }
    }

    /// Grid quadrature of `|s|^2`, i.e. `(2pi/N)^d sum |s_j|^2`.
    pub fn quadrature_norm_sqr(&self) -> f64 {
        let cell = self.spacing().powi(self.dim as i32);
        cell * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn max_abs_diff(&self, other: &TorusSpectrum) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Per-axis node coordinates.
pub fn axis_nodes(grid_size: usize, convention: Convention) -> Vec<f64> {
    let h = 2.0 * PI / grid_size as f64;
    (0..grid_size)
        .map(|j| j as f64 * h + convention.offset())
        .collect()
}

fn grid_nodes(dim: usize, grid_size: usize, convention: Convention) -> Vec<Vec<f64>> {
    let axis = axis_nodes(grid_size, convention);
    let total = grid_size.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            let mut k = vec![0.0; dim];
            for a in (0..dim).rev() {
                k[a] = axis[idx % grid_size];
                idx /= grid_size;
            }
            k
        })
        .collect()
}

/// Smallest admissible grid size for a given extent: even, at least 4 and
/// at least `2 * extent + 1`.
pub fn min_grid_size(extent: i64) -> usize {
    let n = (2 * extent + 1).max(4) as usize;
    n + n % 2
}

/// Phase tables `e^{sign * i k_j x}` per axis for the coordinates `xs`.
fn phase_table(axis: &[f64], xs: &[i64], sign: f64) -> Vec<Vec<Complex64>> {
    xs.iter()
        .map(|&x| {
            axis.iter()
                .map(|&k| Complex64::from_polar(1.0, sign * k * x as f64))
                .collect()
        })
        .collect()
}

/// Forward transform sampled on an `N^d` grid.
pub fn dft(u: &LatticeField, grid_size: usize, convention: Convention) -> Result<TorusSpectrum> {
    check_grid(grid_size)?;
    let extent = u.extent();
    let required = (2 * extent + 1) as usize;
    if grid_size < required {
        return Err(Error::UnderResolved {
            grid_size,
            extent,
            required,
        });
    }
    let dim = u.dim();
    let axis = axis_nodes(grid_size, convention);
    let offsets: Vec<i64> = (-extent..=extent).collect();
    let table = phase_table(&axis, &offsets, -1.0);
    let row = |x: i64| &table[(x + extent) as usize];
    let norm = fourier_norm(dim);
    let total = grid_size.pow(dim as u32);
    let mut values = vec![Complex64::default(); total];
    for (x, v) in u.iter() {
        let rows: Vec<&Vec<Complex64>> = (0..dim).map(|a| row(x.get(a))).collect();
        for (idx, out) in values.iter_mut().enumerate() {
            let mut rem = idx;
            let mut ph = *v;
            for a in (0..dim).rev() {
                ph *= rows[a][rem % grid_size];
                rem /= grid_size;
            }
            *out += ph;
        }
    }
    for v in &mut values {
        *v *= norm;
    }
    TorusSpectrum::new(dim, grid_size, convention, values)
}

/// Inverse transform onto the points of `window` by the periodic trapezoidal rule.
pub fn idft(s: &TorusSpectrum, window: &SupportDomain) -> Result<LatticeField> {
    if s.dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: window.dim(),
        });
    }
    let n = s.grid_size();
    let extent = window.extent();
    if (2 * extent + 1) as usize > n {
        return Err(Error::Aliasing {
            grid_size: n,
            extent,
        });
    }
    let dim = s.dim();
    let axis = axis_nodes(n, s.convention());
    let offsets: Vec<i64> = (-extent..=extent).collect();
    let table = phase_table(&axis, &offsets, 1.0);
    let weight = fourier_norm(dim) * s.spacing().powi(dim as i32);
    let mut out = LatticeField::zeros(dim)?;
    for x in window.points() {
        let rows: Vec<&Vec<Complex64>> = (0..dim)
            .map(|a| &table[(x.get(a) + extent) as usize])
            .collect();
        let mut acc = Complex64::default();
        for (idx, v) in s.values().iter().enumerate() {
            let mut rem = idx;
            let mut ph = *v;
            for a in (0..dim).rev() {
                ph *= rows[a][rem % n];
                rem /= n;
            }
            acc += ph;
        }
        out.insert(*x, acc * weight);
    }
    Ok(out)
}

/// `phi(k) * s(k)` nodewise, the spectral action of the lattice Laplacian.
pub fn apply_symbol(s: &TorusSpectrum) -> TorusSpectrum {
    let nodes = s.nodes();
    TorusSpectrum {
        values: s
            .values
            .iter()
            .zip(&nodes)
            .map(|(v, k)| v * crate::geometry::phi(k))
            .collect(),
        ..s.clone()
    }
}

/// The centred box `[-r, r]^d`.
pub fn centred_box(dim: usize, r: i64) -> Result<SupportDomain> {
    SupportDomain::box_domain(&vec![-r; dim], &vec![r; dim])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Point;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let d = LatticeField::delta(2, Point::origin(), c(1.0, 0.0)).unwrap();
        let s = dft(&d, 8, Convention::CenteredAtO).unwrap();
        for v in s.values() {
            assert!((v - c(1.0 / (2.0 * PI), 0.0)).norm() < 1e-15);
        }
        let back = idft(&s, &centred_box(2, 3).unwrap()).unwrap();
        assert!(back.max_abs_diff(&d) < 1e-14);
    }

    #[test]
    fn shifted_delta_is_phase() {
        let x0 = Point::new(&[2, -1]).unwrap();
        let d = LatticeField::delta(2, x0, c(1.0, 0.0)).unwrap();
        let s = dft(&d, 8, Convention::CenteredAtOPi).unwrap();
        for (v, k) in s.values().iter().zip(s.nodes()) {
            let expect = Complex64::from_polar(1.0 / (2.0 * PI), -x0.dot(&k));
            assert!((v - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn five_point_stencil_spectrum() {
        let f = LatticeField::from_entries(
            2,
            vec![
                (vec![0, 0], c(-2.0, 0.0)),
                (vec![1, 0], c(1.0, 0.0)),
                (vec![-1, 0], c(1.0, 0.0)),
                (vec![0, 1], c(1.0, 0.0)),
                (vec![0, -1], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        let s = dft(&f, 10, Convention::CenteredAtO).unwrap();
        for (v, k) in s.values().iter().zip(s.nodes()) {
            // direct summation over the five support points
            let mut direct = c(0.0, 0.0);
            for (x, fx) in f.iter() {
                direct += fx * Complex64::from_polar(1.0, -x.dot(&k));
            }
            direct /= 2.0 * PI;
            let closed = (crate::geometry::phi(&k) - 2.0) / (2.0 * PI);
            assert!((v - direct).norm() < 1e-14);
            assert!((v - c(closed, 0.0)).norm() < 1e-14);
        }
        let spec = TorusSpectrum::from_fn(2, 10, Convention::CenteredAtO, |k| {
            c((crate::geometry::phi(k) - 2.0) / (2.0 * PI), 0.0)
        })
        .unwrap();
        let back = idft(&spec, &centred_box(2, 2).unwrap()).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let d = LatticeField::delta(1, Point::new(&[3]).unwrap(), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            dft(&d, 6, Convention::CenteredAtO),
            Err(Error::UnderResolved { .. })
        ));
        let s = dft(&d, 8, Convention::CenteredAtO).unwrap();
        assert!(matches!(
            idft(&s, &centred_box(1, 4).unwrap()),
            Err(Error::Aliasing { .. })
        ));
        assert!(dft(&d, 9, Convention::CenteredAtO).is_err());
    }

    #[test]
    fn dimension_mismatch_in_idft() {
        let s = TorusSpectrum::from_fn(2, 4, Convention::CenteredAtO, |_| c(1.0, 0.0)).unwrap();
        assert!(matches!(
            idft(&s, &centred_box(1, 1).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn min_grid_size_is_even() {
        assert_eq!(min_grid_size(0), 4);
        assert_eq!(min_grid_size(2), 6);
        assert_eq!(min_grid_size(3), 8);
    }
}
