//! Finite sets of `(omega, lambda)` pairs on which far fields are sampled.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{band, validate_lambda, Direction, SpectralParam};

/// Distance a window keeps from the edges of the convex band, so that the
/// closure of the sampled set stays inside it.
pub const CLOSURE_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct WindowSample {
    pub omega: Direction,
    pub param: SpectralParam,
    pub weight: f64,
}

impl WindowSample {
    pub fn lambda(&self) -> f64 {
        self.param.lambda()
    }
}

/// An ordered list of weighted samples `(omega, lambda)`. Sample order is
/// the row order of every operator built from the window.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralWindow {
    dim: usize,
    samples: Vec<WindowSample>,
}

fn surface_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

impl SpectralWindow {
    /// Builds a window from explicit `(omega, lambda, weight)` triples.
    pub fn new(samples: Vec<(Direction, f64, f64)>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::EmptySet("spectral window"));
        };
        let dim = first.0.dim();
        let (lo, hi) = band(dim);
        let mut out = Vec::with_capacity(samples.len());
        for (omega, lambda, weight) in samples {
            if omega.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: omega.dim(),
                });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "window weight {weight} must be positive"
                )));
            }
            let param = validate_lambda(lambda, dim)?;
            let a = lambda.abs();
            if a < lo + CLOSURE_MARGIN || a > hi - CLOSURE_MARGIN {
                return Err(Error::LambdaOutOfBand {
                    lambda,
                    dim,
                    lower: lo,
                    upper: hi,
                });
            }
            out.push(WindowSample {
                omega,
                param,
                weight,
            });
        }
        Ok(SpectralWindow { dim, samples: out })
    }

    /// Tensor product of directions and spectral parameters, ordered with
    /// `lambda` outermost. Each sample carries the product-cell weight
    /// `|S^{d-1}| / n_dirs * lambda_cell`, with `lambda_cell` the spacing of
    /// the `lambda` list (1 for a single value).
    pub fn product(directions: &[Direction], lambdas: &[f64]) -> Result<Self> {
        if directions.is_empty() || lambdas.is_empty() {
            return Err(Error::EmptySet("spectral window"));
        }
        let dim = directions[0].dim();
        let dir_cell = surface_measure(dim) / directions.len() as f64;
        let lam_cell = if lambdas.len() > 1 {
            let lo = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (hi - lo) / (lambdas.len() - 1) as f64
        } else {
            1.0
        };
        let w = dir_cell * if lam_cell > 0.0 { lam_cell } else { 1.0 };
        let mut samples = Vec::with_capacity(directions.len() * lambdas.len());
        for &l in lambdas {
            for d in directions {
                samples.push((d.clone(), l, w));
            }
        }
        Self::new(samples)
    }

    pub fn single(omega: Direction, lambda: f64) -> Result<Self> {
        Self::new(vec![(omega, lambda, 1.0)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[WindowSample] {
        &self.samples
    }

    /// Appends the samples of `other`, keeping both orders.
    pub fn extend(&self, other: &SpectralWindow) -> Result<SpectralWindow> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut samples = self.samples.clone();
        samples.extend(other.samples.iter().cloned());
        Ok(SpectralWindow {
            dim: self.dim,
            samples,
        })
    }

    /// Distinct spectral parameters in first-appearance order.
    pub fn lambdas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for s in &self.samples {
            if !out.contains(&s.lambda()) {
                out.push(s.lambda());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::circle_directions;

    #[test]
    fn product_order_and_weights() {
        let dirs = circle_directions(4, 0.0);
        let w = SpectralWindow::product(&dirs, &[1.5, 2.0, 2.5]).unwrap();
        assert_eq!(w.len(), 12);
        assert_eq!(w.samples()[4].lambda(), 2.0);
        assert_eq!(w.samples()[5].omega, dirs[1]);
        let cell = 2.0 * PI / 4.0 * 0.5;
        assert!(w.samples().iter().all(|s| (s.weight - cell).abs() < 1e-15));
        assert_eq!(w.lambdas(), vec![1.5, 2.0, 2.5]);
    }

    #[test]
    fn rejects_band_edges_and_exceptional_values() {
        let dirs = circle_directions(2, 0.0);
        assert!(SpectralWindow::product(&dirs, &[4.0 - 1e-9]).is_err());
        assert!(SpectralWindow::product(&dirs, &[0.0]).is_err());
        assert!(SpectralWindow::product(&dirs, &[-2.0]).is_ok());
        assert!(SpectralWindow::new(vec![]).is_err());
        assert!(SpectralWindow::new(vec![(dirs[0].clone(), 2.0, 0.0)]).is_err());
    }
}
