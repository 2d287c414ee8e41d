//! Geometry of the dispersion surfaces `Gamma(lambda) = {phi(k) = lambda}`.
//!
//! The symbol of the lattice Laplacian is `phi(k) = 2 sum_i cos k_i`. In the
//! band `2d - 4 < |lambda| < 2d` the level set is a smooth strictly convex
//! closed surface, centred at the origin for `lambda > 0` and at
//! `O_pi = (pi, ..., pi)` for `lambda < 0`. For every unit direction `omega`
//! there is exactly one point `kappa(omega, lambda)` on it whose normalised
//! gradient equals `omega`; [`kappa`] computes that point together with the
//! quantities entering the far-field amplitude.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::check_dim;

/// Level-set residual accepted for a point of `Gamma(lambda)`.
pub const LEVEL_TOL: f64 = 1e-12;
/// Accepted distance between the normalised gradient and `omega`.
pub const NORMAL_TOL: f64 = 1e-10;
/// Curvatures below this magnitude signal a degenerate (non-convex) surface.
pub const CURVATURE_FLOOR: f64 = 1e-10;
const MAX_NEWTON_STEPS: usize = 60;

/// `phi(k) = 2 sum_i cos k_i`.
pub fn phi(k: &[f64]) -> f64 {
    2.0 * k.iter().map(|x| x.cos()).sum::<f64>()
}

pub fn grad_phi(k: &[f64]) -> Vec<f64> {
    k.iter().map(|x| -2.0 * x.sin()).collect()
}

/// Hessian of `phi`; diagonal `-2 cos k_i`.
pub fn hessian_phi(k: &[f64]) -> DMatrix<f64> {
    let d = k.len();
    DMatrix::from_fn(d, d, |i, j| if i == j { -2.0 * k[i].cos() } else { 0.0 })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian curvature of a level set `{F = c}` from the gradient and Hessian of `F`:
/// `K = -det [[H, g], [g^T, 0]] / |g|^(d+1)`.
///
/// The sign depends on the orientation of `g`; amplitudes only use `|K|`.
pub fn implicit_curvature(grad: &[f64], hessian: &DMatrix<f64>) -> f64 {
    let d = grad.len();
    let mut m = DMatrix::<f64>::zeros(d + 1, d + 1);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = hessian[(i, j)];
        }
        m[(i, d)] = grad[i];
        m[(d, i)] = grad[i];
    }
    -m.determinant() / norm(grad).powi(d as i32 + 1)
}

/// Lower and upper bounds of the convex band for dimension `dim`.
pub fn band(dim: usize) -> (f64, f64) {
    let d = dim as f64;
    (2.0 * d - 4.0, 2.0 * d)
}

/// The exceptional values `S0`: `+-4n` for even `d`, `+-2(2n+1)` for odd `d`,
/// with `2n <= d`.
pub fn exceptional_values(dim: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let d = dim as i64;
    for n in 0..=(d / 2) {
        let v = if d % 2 == 0 { 4 * n } else { 2 * (2 * n + 1) };
        out.push(v as f64);
        out.push(-(v as f64));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Positive,
    Negative,
}

/// A validated spectral parameter inside the convex band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParam {
    lambda: f64,
    dim: usize,
    branch: Branch,
}

impl SpectralParam {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// Symmetry centre of `Gamma(lambda)`: `O` or `O_pi`.
    pub fn center(&self) -> Vec<f64> {
        match self.branch {
            Branch::Positive => vec![0.0; self.dim],
            Branch::Negative => vec![PI; self.dim],
        }
    }

    /// The point symmetric to `k` with respect to the centre of `Gamma(lambda)`.
    pub fn reflect(&self, k: &[f64]) -> Vec<f64> {
        let c = self.center();
        k.iter().zip(&c).map(|(x, c)| 2.0 * c - x).collect()
    }
}

/// Accepts `lambda` iff `2d - 4 < |lambda| < 2d` and `lambda` is not in `S0`.
pub fn validate_lambda(lambda: f64, dim: usize) -> Result<SpectralParam> {
    check_dim(dim)?;
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda = {lambda}")));
    }
    if exceptional_values(dim)
        .iter()
        .any(|s| (lambda - s).abs() < 1e-12)
    {
        return Err(Error::LambdaInExceptionalSet { lambda, dim });
    }
    let (lower, upper) = band(dim);
    if !(lambda.abs() > lower && lambda.abs() < upper) {
        return Err(Error::LambdaOutOfBand {
            lambda,
            dim,
            lower,
            upper,
        });
    }
    let branch = if lambda >= 0.0 {
        Branch::Positive
    } else {
        Branch::Negative
    };
    Ok(SpectralParam {
        lambda,
        dim,
        branch,
    })
}

/// A unit vector `omega` in `S^{d-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps `v`, which must already have unit length to within `1e-14`.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        check_dim(v.len())?;
        let n = norm(&v);
        if (n - 1.0).abs() > 1e-14 {
            return Err(Error::NotUnitDirection { norm: n });
        }
        Ok(Direction(v))
    }

    /// Normalises `v`.
    pub fn normalized(v: &[f64]) -> Result<Self> {
        check_dim(v.len())?;
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotUnitDirection { norm: n });
        }
        Ok(Direction(v.iter().map(|x| x / n).collect()))
    }

    /// Planar direction at angle `theta`.
    pub fn from_angle(theta: f64) -> Self {
        Direction(vec![theta.cos(), theta.sin()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn neg(&self) -> Direction {
        Direction(self.0.iter().map(|x| -x).collect())
    }
}

/// `n` equally spaced directions on the unit circle, starting at angle `phase`.
pub fn circle_directions(n: usize, phase: f64) -> Vec<Direction> {
    (0..n)
        .map(|j| Direction::from_angle(phase + 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// `n` planar directions spread uniformly over the closed arc
/// `[center - half_width, center + half_width]`.
pub fn arc_directions(center: f64, half_width: f64, n: usize) -> Vec<Direction> {
    if n == 1 {
        return vec![Direction::from_angle(center)];
    }
    (0..n)
        .map(|j| {
            let s = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
            Direction::from_angle(center + s * half_width)
        })
        .collect()
}

/// Fibonacci-lattice directions on `S^2`.
pub fn sphere_directions(n: usize) -> Vec<Direction> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|j| {
            let z = 1.0 - (2.0 * j as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * j as f64;
            Direction::normalized(&[r * a.cos(), r * a.sin(), z]).expect("nonzero")
        })
        .collect()
}

/// A direction grid for dimension `dim` with roughly `n` points.
pub fn direction_grid(dim: usize, n: usize) -> Result<Vec<Direction>> {
    match dim {
        1 => Ok(vec![Direction(vec![1.0]), Direction(vec![-1.0])]),
        2 => Ok(circle_directions(n, 0.0)),
        3 => Ok(sphere_directions(n)),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// `n` equally spaced values covering `[lo, hi]` (midpoint rule when `n == 1`).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
        .collect()
}

/// A point `kappa(omega, lambda)` of the dispersion surface with the data
/// entering the far-field amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaPoint {
    pub omega: Vec<f64>,
    pub lambda: f64,
    /// Torus coordinates, in `[-pi, pi]^d` for `lambda > 0` and `[0, 2pi]^d` otherwise.
    pub kappa: Vec<f64>,
    pub grad_norm: f64,
    /// Gaussian curvature of `Gamma(lambda)` at `kappa` (1 by convention when `d = 1`).
    pub curvature: f64,
    pub mu: f64,
}

impl GammaPoint {
    /// `sqrt|K| * |grad phi|`, the denominator of the amplitude formula.
    pub fn amplitude_denominator(&self) -> f64 {
        self.curvature.abs().sqrt() * self.grad_norm
    }
}

fn check_direction(omega: &Direction, sp: &SpectralParam) -> Result<()> {
    if omega.dim() != sp.dim() {
        return Err(Error::DimensionMismatch {
            expected: sp.dim(),
            got: omega.dim(),
        });
    }
    Ok(())
}

/// The inverse Gauss map: the point of `Gamma(lambda)` with outward normalised
/// gradient `omega`.
pub fn kappa(omega: &Direction, sp: &SpectralParam) -> Result<GammaPoint> {
    check_direction(omega, sp)?;
    let w = omega.as_slice();
    let lambda = sp.lambda();
    let k = if sp.dim() == 1 {
        // Gamma is the pair of points +-arccos(lambda/2)
        let a = (lambda / 2.0).acos();
        match sp.branch() {
            Branch::Positive => vec![-w[0] * a],
            Branch::Negative => vec![PI + w[0] * (PI - a)],
        }
    } else {
        solve_gauss_map(w, sp)?
    };
    let g = grad_phi(&k);
    let grad_norm = norm(&g);
    let curvature = if sp.dim() == 1 {
        1.0
    } else {
        implicit_curvature(&g, &hessian_phi(&k))
    };
    if curvature.abs() < CURVATURE_FLOOR {
        return Err(Error::DegenerateCurvature { curvature, lambda });
    }
    let mu = dot(&k, w);
    Ok(GammaPoint {
        omega: w.to_vec(),
        lambda,
        kappa: k,
        grad_norm,
        curvature,
        mu,
    })
}

/// `mu(omega, lambda) = kappa . omega`.
pub fn mu(omega: &Direction, sp: &SpectralParam) -> Result<f64> {
    Ok(kappa(omega, sp)?.mu)
}

/// Gaussian curvature of `Gamma(lambda)` at `kappa(omega, lambda)`.
pub fn gauss_curvature(omega: &Direction, sp: &SpectralParam) -> Result<f64> {
    Ok(kappa(omega, sp)?.curvature)
}

/// `kappa(omega1, lambda) - kappa(omega2, lambda)`, a point of the transfer band.
pub fn born_transfer_point(
    omega1: &Direction,
    omega2: &Direction,
    sp: &SpectralParam,
) -> Result<Vec<f64>> {
    let a = kappa(omega1, sp)?;
    let b = kappa(omega2, sp)?;
    Ok(a.kappa.iter().zip(&b.kappa).map(|(x, y)| x - y).collect())
}

fn residuals(k: &[f64], t: f64, w: &[f64], lambda: f64) -> DVector<f64> {
    let d = k.len();
    let g = grad_phi(k);
    let mut r = DVector::zeros(d + 1);
    for i in 0..d {
        r[i] = g[i] - t * w[i];
    }
    r[d] = phi(k) - lambda;
    r
}

fn alignment_error(k: &[f64], w: &[f64]) -> f64 {
    let g = grad_phi(k);
    let n = norm(&g);
    g.iter()
        .zip(w)
        .map(|(gi, wi)| (gi / n - wi).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Damped Newton on `(k, t)` for `grad phi(k) = t omega`, `phi(k) = lambda`.
fn newton(k0: &[f64], t0: f64, w: &[f64], lambda: f64) -> Option<(Vec<f64>, f64)> {
    let d = k0.len();
    let mut k = k0.to_vec();
    let mut t = t0;
    let mut r = residuals(&k, t, w, lambda);
    let met = |k: &[f64], t: f64, r: &DVector<f64>| {
        t > 0.0 && r[d].abs() <= 1e-13 && alignment_error(k, w) <= 1e-12
    };
    for _ in 0..MAX_NEWTON_STEPS {
        let polish = met(&k, t, &r);
        let mut jac = DMatrix::<f64>::zeros(d + 1, d + 1);
        for i in 0..d {
            jac[(i, i)] = -2.0 * k[i].cos();
            jac[(i, d)] = -w[i];
            jac[(d, i)] = -2.0 * k[i].sin();
        }
        let step = jac.lu().solve(&(-&r))?;
        let merit = r.norm();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let kn: Vec<f64> = (0..d).map(|i| k[i] + alpha * step[i]).collect();
            let tn = t + alpha * step[d];
            let rn = residuals(&kn, tn, w, lambda);
            if rn.norm() <= merit {
                k = kn;
                t = tn;
                r = rn;
                accepted = true;
                break;
            }
            if polish {
                break;
            }
            alpha *= 0.5;
        }
        if polish {
            return Some((k, t));
        }
        if !accepted {
            return None;
        }
    }
    met(&k, t, &r).then_some((k, t))
}

/// Intersection of `Gamma(lambda)` with the ray from the centre along `u`.
fn ray_point(u: &[f64], sp: &SpectralParam) -> Vec<f64> {
    let c = sp.center();
    let umax = u.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let lambda = sp.lambda();
    // phi is monotone along the ray until a coordinate reaches the cube face
    let sign = match sp.branch() {
        Branch::Positive => 1.0,
        Branch::Negative => -1.0,
    };
    let at = |r: f64| -> Vec<f64> { c.iter().zip(u).map(|(ci, ui)| ci + r * ui).collect() };
    let (mut lo, mut hi) = (0.0, PI / umax);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sign * (phi(&at(mid)) - lambda) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    at(0.5 * (lo + hi))
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

fn solve_gauss_map(w: &[f64], sp: &SpectralParam) -> Result<Vec<f64>> {
    let lambda = sp.lambda();
    let inward: Vec<f64> = match sp.branch() {
        Branch::Positive => w.iter().map(|x| -x).collect(),
        Branch::Negative => w.to_vec(),
    };
    let k0 = ray_point(&inward, sp);
    let g0 = grad_phi(&k0);
    let t0 = norm(&g0);

    let solved = newton(&k0, t0, w, lambda).or_else(|| {
        // continuation from the normal at the ray point towards omega
        let n0 = normalize(&g0);
        let mut s = 0.0f64;
        let mut h = 0.125f64;
        let (mut k, mut t) = (k0.clone(), t0);
        while s < 1.0 {
            let sn = (s + h).min(1.0);
            let ws: Vec<f64> = normalize(
                &n0.iter()
                    .zip(w)
                    .map(|(a, b)| (1.0 - sn) * a + sn * b)
                    .collect::<Vec<_>>(),
            );
            match newton(&k, t, &ws, lambda) {
                Some((kn, tn)) => {
                    k = kn;
                    t = tn;
                    s = sn;
                    h = (h * 2.0).min(0.25);
                }
                None => {
                    h *= 0.5;
                    if h < 1e-6 {
                        return None;
                    }
                }
            }
        }
        Some((k, t))
    });

    let fail = |k: &[f64]| Error::GaussMapNonConvergence {
        omega: w.to_vec(),
        lambda,
        residual: (phi(k) - lambda).abs(),
    };
    let (mut k, _) = solved.ok_or_else(|| fail(&k0))?;
    let c = sp.center();
    for (ki, ci) in k.iter_mut().zip(&c) {
        *ki = ci + (*ki - ci + PI).rem_euclid(2.0 * PI) - PI;
    }
    if (phi(&k) - lambda).abs() > LEVEL_TOL || alignment_error(&k, w) > NORMAL_TOL {
        return Err(fail(&k));
    }
    Ok(k)
}
