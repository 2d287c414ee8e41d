//! Limiting-absorption solutions of `(Delta - lambda) psi = f` and their
//! far-field amplitudes.
//!
//! The lattice Green's function `G(x) = lim (2 pi)^{-d} int e^{ik.x} / (phi(k) - nu) dk`
//! is computed by doing the integral along the axis of largest `|x_i|` in
//! closed form: for `t + 1/t = z`, `|t| < 1`,
//!
//! ```text
//! (2 pi)^{-1} int e^{ikn} / (2 cos k - z) dk = t^{|n|} / (t - 1/t).
//! ```
//!
//! What remains is a smooth-except-at-known-points integral over
//! `[0, pi]^{d-1}`. Two routes evaluate it:
//!
//! * [`LimitingAbsorption::Exact`] sets `nu = lambda -+ i0` directly, picking
//!   the boundary value of `t` on the unit circle, and integrates with
//!   tanh-sinh quadrature split at the band-edge points `z = +-2`.
//! * [`LimitingAbsorption::Extrapolated`] keeps `nu = lambda -+ i eps` for a
//!   schedule of `eps`, uses the periodic trapezoid rule, and extrapolates
//!   to `eps = 0` by Neville's scheme.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{kappa, Direction, GammaPoint, SpectralParam};
use crate::lattice::{LatticeField, Point};
use crate::quadrature::{level_for_oscillation, TanhSinh};
use crate::window::SpectralWindow;

/// Which limiting-absorption solution: `nu -> lambda + i0` or `lambda - i0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+", alias = "plus")]
    Plus,
    /// The outgoing solution.
    #[default]
    #[serde(rename = "-", alias = "minus")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::InvalidArgument(format!("sign {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitingAbsorption {
    #[default]
    Exact,
    Extrapolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolventConfig {
    pub method: LimitingAbsorption,
    /// Strictly decreasing absorption parameters for the extrapolated route.
    pub epsilon_schedule: Vec<f64>,
    /// Trapezoid nodes per axis for the extrapolated route; 0 picks
    /// `max(8 max|x| + 32, 40 / eps_min)`.
    pub grid_size: usize,
    pub extrapolation_order: usize,
    /// Relative tolerance of the exact route.
    pub tolerance: f64,
    pub max_level: usize,
}

impl Default for ResolventConfig {
    fn default() -> Self {
        ResolventConfig {
            method: LimitingAbsorption::Exact,
            epsilon_schedule: vec![0.08, 0.04, 0.02, 0.01],
            grid_size: 0,
            extrapolation_order: 2,
            tolerance: 1e-13,
            max_level: 14,
        }
    }
}

impl ResolventConfig {
    pub fn extrapolated(epsilon_schedule: Vec<f64>, extrapolation_order: usize) -> Self {
        ResolventConfig {
            method: LimitingAbsorption::Extrapolated,
            epsilon_schedule,
            extrapolation_order,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1e-2) {
            return Err(Error::Config(format!(
                "resolvent.tolerance = {} must lie in (0, 1e-2)",
                self.tolerance
            )));
        }
        if self.method == LimitingAbsorption::Exact {
            return Ok(());
        }
        let eps = &self.epsilon_schedule;
        if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::Config(
                "resolvent.epsilon_schedule must be positive".into(),
            ));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config(
                "resolvent.epsilon_schedule must be strictly decreasing".into(),
            ));
        }
        if self.extrapolation_order < 1 || self.extrapolation_order >= eps.len() {
            return Err(Error::Config(format!(
                "resolvent.extrapolation_order = {} needs at least {} schedule entries",
                self.extrapolation_order,
                self.extrapolation_order + 1
            )));
        }
        if self.grid_size % 2 == 1 {
            return Err(Error::Config("resolvent.grid_size must be even".into()));
        }
        Ok(())
    }

    fn grid_for(&self, max_abs: i64) -> Result<usize> {
        let bound = 8 * max_abs.max(0) as usize + 32;
        if self.grid_size != 0 {
            if self.grid_size < bound {
                return Err(Error::Config(format!(
                    "resolvent.grid_size = {} below the oscillation bound {bound}",
                    self.grid_size
                )));
            }
            return Ok(self.grid_size);
        }
        let eps_min = self.epsilon_schedule.last().copied().unwrap_or(1.0);
        let n = bound.max((40.0 / eps_min).ceil() as usize);
        Ok(n + n % 2)
    }
}

/// `(1/(2 pi)) int e^{ikn} / (2 cos k - z) dk` for complex `z` off `[-2, 2]`.
fn g1_complex(n: u64, z: Complex64) -> Complex64 {
    let s = (z - 2.0).sqrt() * (z + 2.0).sqrt();
    let a = (z + s) * 0.5;
    let b = (z - s) * 0.5;
    let (t, big) = if a.norm() >= b.norm() { (b, a) } else { (a, b) };
    t.powu(n as u32) / (t - big)
}

/// Boundary value of the 1D kernel on the real axis, from `z - 2` and
/// `z + 2` supplied separately so that band-edge cancellation is avoided.
/// `s = -1` selects `lambda - i0`.
fn g1_real(n: u64, z: f64, zm2: f64, zp2: f64, s: f64) -> Complex64 {
    if zm2 == 0.0 || zp2 == 0.0 {
        // only reached when an endpoint offset underflows; the quadrature
        // weight there is negligible
        return Complex64::default();
    }
    if zm2 < 0.0 && zp2 > 0.0 {
        let sin_t = 0.5 * (-zm2 * zp2).sqrt();
        let theta = sin_t.atan2(0.5 * z);
        // -s: lambda - i0 picks t = e^{i theta}
        Complex64::from_polar(1.0, -s * theta * n as f64) / Complex64::new(0.0, -2.0 * s * sin_t)
    } else if zm2 >= 0.0 {
        let r = (zm2 * zp2).sqrt();
        let t = 2.0 / (z + r);
        Complex64::new(t.powi(n as i32) / -r, 0.0)
    } else {
        let r = (zm2 * zp2).sqrt();
        let t = 2.0 / (z - r);
        Complex64::new(t.powi(n as i32) / r, 0.0)
    }
}

/// `arccos(c)` accurate near `c = +-1`.
fn acos_accurate(c: f64) -> f64 {
    if c > 0.5 {
        2.0 * (0.5 * (1.0 - c)).sqrt().asin()
    } else if c < -0.5 {
        PI - 2.0 * (0.5 * (1.0 + c)).sqrt().asin()
    } else {
        c.acos()
    }
}

/// Splits `[0, pi]` at the points where `cos k = v` for each `v` in `values`
/// with `|v| < 1`. Each breakpoint carries the index of its value.
fn split_points(values: &[f64]) -> Vec<(f64, Option<usize>)> {
    let mut pts = vec![(0.0, None)];
    for (i, &v) in values.iter().enumerate() {
        if v > -1.0 && v < 1.0 {
            pts.push((acos_accurate(v), Some(i)));
        }
    }
    pts.push((PI, None));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

/// `cos(a) - cos(a + s)` without cancellation.
fn cos_gap(a: f64, s: f64) -> f64 {
    2.0 * (a + 0.5 * s).sin() * (0.5 * s).sin()
}

/// A tanh-sinh node inside one piece `[a, b]` of a split interval.
struct Piece {
    a: f64,
    b: f64,
    ta: Option<usize>,
    tb: Option<usize>,
}

impl Piece {
    /// `2 (cos e - cos k)` when the breakpoint `e` with tag `i` bounds the
    /// piece, evaluated from the offset to the nearer tagged end.
    fn gap(&self, i: usize, da: f64, db: f64) -> Option<f64> {
        let at_a = self.ta == Some(i);
        let at_b = self.tb == Some(i);
        if at_a && (!at_b || da <= db) {
            Some(2.0 * cos_gap(self.a, da))
        } else if at_b {
            Some(2.0 * cos_gap(self.b, -db))
        } else {
            None
        }
    }
}

/// `c - 4`, `c` and `c + 4`, each carried to full relative accuracy.
#[derive(Clone, Copy, Debug)]
struct Shifted([f64; 3]);

const SHIFTS: [f64; 3] = [4.0, 0.0, -4.0];

struct Reduced {
    n: u64,
    freqs: Vec<u64>,
    lambda: f64,
    s: f64,
}

impl Reduced {
    fn new(x: &Point, dim: usize, lambda: f64, sign: Sign) -> Reduced {
        let mut c: Vec<u64> = x.coords(dim).iter().map(|v| v.unsigned_abs()).collect();
        c.sort_unstable();
        let n = c.pop().unwrap_or(0);
        Reduced {
            n,
            freqs: c,
            lambda,
            s: sign.factor(),
        }
    }

    fn omega(&self) -> f64 {
        (self.n + self.freqs.iter().sum::<u64>() + 1) as f64
    }

    /// `(1/pi) int_0^pi cos(m k) g1(n; c - 2 cos k) dk` by tanh-sinh.
    fn line(&self, c: Shifted, m: u64, tol: f64, max_level: usize) -> Result<(Complex64, f64, bool)> {
        let [cm4, c0, cp4] = c.0;
        // z - 2 = 0 at cos k = (c - 2)/2, z + 2 = 0 at cos k = (c + 2)/2
        let pts = split_points(&[(c0 - 2.0) / 2.0, (c0 + 2.0) / 2.0]);
        let mut total = Complex64::default();
        let mut err = 0.0;
        let mut converged = true;
        for w in pts.windows(2) {
            let piece = Piece {
                a: w[0].0,
                b: w[1].0,
                ta: w[0].1,
                tb: w[1].1,
            };
            let q = TanhSinh {
                tol,
                min_level: level_for_oscillation(self.omega(), piece.b - piece.a),
                max_level,
            };
            let out = q.integrate(piece.a, piece.b, |k, da, db| {
                let z = c0 - 2.0 * k.cos();
                // distances of k from 0 and pi, exact at the ends of [0, pi]
                let (zm2, zp2) = if k <= 0.5 * PI {
                    let s = if piece.a == 0.0 { da } else { k };
                    let h = 4.0 * (0.5 * s).sin().powi(2);
                    (cm4 + h, c0 + h)
                } else {
                    let s = if piece.b == PI { db } else { PI - k };
                    let h = 4.0 * (0.5 * s).sin().powi(2);
                    (c0 - h, cp4 - h)
                };
                let zm2 = piece.gap(0, da, db).unwrap_or(zm2);
                let zp2 = piece.gap(1, da, db).unwrap_or(zp2);
                let g = g1_real(self.n, z, zm2, zp2, self.s);
                Ok((g * ((m as f64) * k).cos() / PI, 0.0))
            })?;
            converged &= out.converged;
            total += out.value;
            err += out.error;
        }
        Ok((total, err, converged))
    }

    fn target(&self) -> Vec<i64> {
        let mut t: Vec<i64> = self.freqs.iter().map(|&v| v as i64).collect();
        t.push(self.n as i64);
        t
    }

    fn exact(&self, tol: f64, max_level: usize) -> Result<(Complex64, f64)> {
        let l = self.lambda;
        let (value, err, converged) = match self.freqs.len() {
            0 => (g1_real(self.n, l, l - 2.0, l + 2.0, self.s), 0.0, true),
            1 => self.line(Shifted([l - 4.0, l, l + 4.0]), self.freqs[0], tol, max_level)?,
            _ => {
                // the inner band edges reach 0 or pi where c = lambda - 2 cos k
                // crosses 4, 0 or -4
                let (m_out, m_in) = (self.freqs[0], self.freqs[1]);
                let vals: Vec<f64> = SHIFTS.iter().map(|s| (l - s) / 2.0).collect();
                let pts = split_points(&vals);
                let mut total = Complex64::default();
                let mut err = 0.0;
                let mut converged = true;
                for w in pts.windows(2) {
                    let piece = Piece {
                        a: w[0].0,
                        b: w[1].0,
                        ta: w[0].1,
                        tb: w[1].1,
                    };
                    let q = TanhSinh {
                        tol,
                        min_level: level_for_oscillation(self.omega(), piece.b - piece.a),
                        max_level,
                    };
                    let out = q.integrate(piece.a, piece.b, |k, da, db| {
                        let ck = 2.0 * k.cos();
                        let mut c = [0.0; 3];
                        for (i, s) in SHIFTS.iter().enumerate() {
                            c[i] = piece.gap(i, da, db).unwrap_or(l - s - ck);
                        }
                        let (v, e, _) = self.line(Shifted(c), m_in, 0.1 * tol, max_level)?;
                        let w = ((m_out as f64) * k).cos() / PI;
                        Ok((v * w, e * w.abs()))
                    })?;
                    converged &= out.converged;
                    total += out.value;
                    err += out.error;
                }
                (total, err, converged)
            }
        };
        if !converged {
            return Err(Error::QuadratureNonConvergence {
                target: self.target(),
                difference: err,
            });
        }
        Ok((value, err))
    }

    /// The reduced integral at `nu = lambda + s i eps` by the periodic
    /// trapezoid rule with `grid` nodes per period.
    fn absorbed(&self, eps: f64, grid: usize) -> Complex64 {
        let nu = Complex64::new(self.lambda, self.s * eps);
        let half = grid / 2;
        let node = |j: usize| 2.0 * PI * j as f64 / grid as f64;
        let weight = |j: usize| if j == 0 || j == half { 1.0 } else { 2.0 } / grid as f64;
        match self.freqs.len() {
            0 => g1_complex(self.n, nu),
            1 => (0..=half)
                .map(|j| {
                    let k = node(j);
                    g1_complex(self.n, nu - 2.0 * k.cos())
                        * (weight(j) * (self.freqs[0] as f64 * k).cos())
                })
                .sum(),
            _ => (0..=half)
                .into_par_iter()
                .map(|i| {
                    let kb = node(i);
                    let wb = weight(i) * (self.freqs[0] as f64 * kb).cos();
                    (0..=half)
                        .map(|j| {
                            let kc = node(j);
                            g1_complex(self.n, nu - 2.0 * kb.cos() - 2.0 * kc.cos())
                                * (wb * weight(j) * (self.freqs[1] as f64 * kc).cos())
                        })
                        .sum::<Complex64>()
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum(),
        }
    }

    fn extrapolated(&self, cfg: &ResolventConfig) -> Result<(Complex64, f64)> {
        let grid = cfg.grid_for(self.n as i64)?;
        let eps = &cfg.epsilon_schedule;
        let vals: Vec<Complex64> = eps.iter().map(|&e| self.absorbed(e, grid)).collect();
        let order = cfg.extrapolation_order;
        // highest-order extrapolant ending at each schedule entry
        let mut ends = Vec::new();
        for end in order..eps.len() {
            let lo = end - order;
            ends.push(neville_at_zero(&eps[lo..=end], &vals[lo..=end]));
        }
        let best = *ends.last().unwrap_or(&vals[vals.len() - 1]);
        let lower = neville_at_zero(&eps[eps.len() - order..], &vals[vals.len() - order..]);
        let err = (best - lower).norm();
        if ends.len() >= 3 {
            let d1 = (ends[ends.len() - 2] - ends[ends.len() - 3]).norm();
            let d2 = (ends[ends.len() - 1] - ends[ends.len() - 2]).norm();
            if d2 > d1 && d2 > 1e-12 * best.norm().max(1.0) {
                return Err(Error::ExtrapolationFailure {
                    target: self.target(),
                });
            }
        }
        Ok((best, err))
    }
}

/// Value at 0 of the polynomial interpolating `(xs[i], ys[i])`.
fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut p = ys.to_vec();
    let m = xs.len();
    for j in 1..m {
        for i in (j..m).rev() {
            let (xi, xl) = (xs[i], xs[i - j]);
            p[i] = (p[i - 1] * xi - p[i] * xl) / (xi - xl);
        }
    }
    p[m - 1]
}

/// The limiting-absorption Green's function `G(x)` and an absolute error
/// estimate.
pub fn green_function(
    x: &Point,
    sp: &SpectralParam,
    sign: Sign,
    cfg: &ResolventConfig,
) -> Result<(Complex64, f64)> {
    cfg.validate()?;
    let r = Reduced::new(x, sp.dim(), sp.lambda(), sign);
    match cfg.method {
        LimitingAbsorption::Exact => r.exact(cfg.tolerance, cfg.max_level),
        LimitingAbsorption::Extrapolated => r.extrapolated(cfg),
    }
}

/// `G` on a set of difference vectors, sharing work across the lattice
/// symmetries (coordinate signs and permutations).
#[derive(Clone, Debug)]
pub struct GreenTable {
    dim: usize,
    values: BTreeMap<Vec<u64>, (Complex64, f64)>,
}

fn canonical(x: &Point, dim: usize) -> Vec<u64> {
    let mut c: Vec<u64> = x.coords(dim).iter().map(|v| v.unsigned_abs()).collect();
    c.sort_unstable();
    c
}

impl GreenTable {
    pub fn build<'a, I>(sp: &SpectralParam, sign: Sign, cfg: &ResolventConfig, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Point>,
    {
        cfg.validate()?;
        let dim = sp.dim();
        let mut keys: Vec<(Vec<u64>, Point)> = points
            .into_iter()
            .map(|p| (canonical(p, dim), *p))
            .collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0));
        keys.dedup_by(|a, b| a.0 == b.0);
        let computed: Vec<Result<(Complex64, f64)>> = keys
            .par_iter()
            .map(|(_, p)| green_function(p, sp, sign, cfg))
            .collect();
        let mut values = BTreeMap::new();
        for ((k, _), v) in keys.into_iter().zip(computed) {
            values.insert(k, v?);
        }
        Ok(GreenTable { dim, values })
    }

    /// `(G(x), error)`; `x` must have been among the build points up to symmetry.
    pub fn get(&self, x: &Point) -> Option<(Complex64, f64)> {
        self.values.get(&canonical(x, self.dim)).copied()
    }
}

/// A field evaluated on target points together with per-point error estimates.
#[derive(Clone, Debug)]
pub struct ResolventField {
    pub values: LatticeField,
    pub errors: BTreeMap<Point, f64>,
}

impl ResolventField {
    pub fn max_error(&self) -> f64 {
        self.errors.values().cloned().fold(0.0, f64::max)
    }
}

/// `psi(x) = sum_y f(y) G(x - y)` at each target.
pub fn resolvent_apply(
    f: &LatticeField,
    sp: &SpectralParam,
    sign: Sign,
    cfg: &ResolventConfig,
    targets: &[Point],
) -> Result<ResolventField> {
    if f.dim() != sp.dim() {
        return Err(Error::DimensionMismatch {
            expected: sp.dim(),
            got: f.dim(),
        });
    }
    let diffs: Vec<Point> = targets
        .iter()
        .flat_map(|x| f.iter().map(move |(y, _)| *x - *y))
        .collect();
    let table = GreenTable::build(sp, sign, cfg, diffs.iter())?;
    let mut values = LatticeField::zeros(sp.dim())?;
    let mut errors = BTreeMap::new();
    for x in targets {
        let mut acc = Complex64::default();
        let mut err = 0.0;
        for (y, fy) in f.iter() {
            let (g, e) = table.get(&(*x - *y)).expect("difference tabulated");
            acc += fy * g;
            err += fy.norm() * e;
        }
        values.insert(*x, acc);
        errors.insert(*x, err);
    }
    Ok(ResolventField { values, errors })
}

/// `e^{+-i (sigma + 2) pi / 4}` with `sigma = d - 1`.
pub fn far_field_phase(dim: usize, sign: Sign) -> Complex64 {
    Complex64::from_polar(1.0, sign.factor() * (dim as f64 + 1.0) * FRAC_PI_4)
}

/// The point `kappa(+-omega, lambda)` at which the far field samples `f^`.
pub fn sampled_point(g: &GammaPoint, sp: &SpectralParam, sign: Sign) -> Vec<f64> {
    match sign {
        Sign::Plus => g.kappa.clone(),
        Sign::Minus => sp.reflect(&g.kappa),
    }
}

/// The amplitude prefactor `sqrt(2 pi) e^{+-i(sigma+2)pi/4} / (sqrt|K| |grad phi|)`.
pub fn amplitude_factor(g: &GammaPoint, dim: usize, sign: Sign) -> Complex64 {
    far_field_phase(dim, sign) * ((2.0 * PI).sqrt() / g.amplitude_denominator())
}

fn amplitude(f: &LatticeField, g: &GammaPoint, sp: &SpectralParam, sign: Sign) -> Complex64 {
    f.fourier_at(&sampled_point(g, sp, sign)) * amplitude_factor(g, sp.dim(), sign)
}

/// The far-field amplitude `a+-(omega, lambda)` of `psi+-`.
pub fn far_field(
    f: &LatticeField,
    omega: &Direction,
    sp: &SpectralParam,
    sign: Sign,
) -> Result<Complex64> {
    if f.dim() != sp.dim() {
        return Err(Error::DimensionMismatch {
            expected: sp.dim(),
            got: f.dim(),
        });
    }
    let g = kappa(omega, sp)?;
    Ok(amplitude(f, &g, sp, sign))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FarFieldSample {
    pub omega: Direction,
    pub lambda: f64,
    pub sign: Sign,
    pub value: Complex64,
}

/// Gauss-map data for every sample of a window, in window order.
pub fn window_points(window: &SpectralWindow) -> Result<Vec<GammaPoint>> {
    window
        .samples()
        .par_iter()
        .map(|s| kappa(&s.omega, &s.param))
        .collect()
}

/// `far_field` over a window, in the window's sample order.
pub fn far_field_batch(
    f: &LatticeField,
    window: &SpectralWindow,
    sign: Sign,
) -> Result<Vec<FarFieldSample>> {
    if f.dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            got: f.dim(),
        });
    }
    let points = window_points(window)?;
    Ok(window
        .samples()
        .par_iter()
        .zip(points.par_iter())
        .map(|(s, g)| FarFieldSample {
            omega: s.omega.clone(),
            lambda: s.lambda(),
            sign,
            value: amplitude(f, g, &s.param, sign),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticRow {
    pub radius: f64,
    pub point: Point,
    pub psi: Complex64,
    pub predicted: Complex64,
    /// `|psi - predicted| |x|^{(d+1)/2}`.
    pub scaled_residual: f64,
    pub relative_error: f64,
    pub quadrature_error: f64,
}

/// Compares `psi+-(r x0)` with `a+- e^{+-i mu |x|} / |x|^{(d-1)/2}` along the
/// lattice ray through `base`.
pub fn asymptotic_check(
    f: &LatticeField,
    sp: &SpectralParam,
    base: &Point,
    radii: &[i64],
    sign: Sign,
    cfg: &ResolventConfig,
) -> Result<Vec<AsymptoticRow>> {
    let dim = sp.dim();
    if *base == Point::origin() {
        return Err(Error::InvalidArgument("base point must be nonzero".into()));
    }
    if radii.iter().any(|&r| r <= 0) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "radii must be positive and increasing".into(),
        ));
    }
    let coords: Vec<f64> = base.coords(dim).iter().map(|&c| c as f64).collect();
    let omega = Direction::normalized(&coords)?;
    let g = kappa(&omega, sp)?;
    let a = amplitude(f, &g, sp, sign);
    let targets: Vec<Point> = radii.iter().map(|&r| base.scale(r)).collect();
    let psi = resolvent_apply(f, sp, sign, cfg, &targets)?;
    Ok(targets
        .iter()
        .map(|x| {
            let r = x.norm();
            let p = psi.values.get(x);
            let pred = a * Complex64::from_polar(1.0, sign.factor() * g.mu * r)
                / r.powf((dim as f64 - 1.0) / 2.0);
            let res = (p - pred).norm();
            AsymptoticRow {
                radius: r,
                point: *x,
                psi: p,
                predicted: pred,
                scaled_residual: res * r.powf((dim as f64 + 1.0) / 2.0),
                relative_error: if p.norm() > 0.0 { res / p.norm() } else { res },
                quadrature_error: psi.errors[x],
            }
        })
        .collect())
}
