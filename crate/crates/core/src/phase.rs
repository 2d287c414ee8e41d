//! Phase retrieval with a known background source.
//!
//! With `Sigma = (f + f0) * conj(f + f0)(-.)`, the cross term
//! `Sigma_3 = f * conj(f0)(-.)` lives on `D - D0`. When that set does not
//! meet the supports of the other three terms, windowing the inverse
//! transform of `|F(f + f0)|^2` isolates `Sigma_3`, and
//! `Ff = F q / conj(F f0)` follows.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{sampled_point, window_points, Sign};
use crate::fourier::{dft, idft, min_grid_size, Convention, TorusSpectrum};
use crate::geometry::Direction;
use crate::lattice::{fourier_norm, LatticeField, Point, SupportDomain};
use crate::linalg::LeastSquares;
use crate::window::SpectralWindow;

/// Largest fraction of grid nodes on which `|F f0|` may fall below the
/// division threshold.
pub const MAX_SKIPPED_FRACTION: f64 = 0.01;
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryMode {
    /// `dist(D, D0) > diam D`; only `|F(f + f0)|^2` is needed.
    FarApart,
    /// `dist(D, D0) > 0`; `|F f|^2` is needed as well.
    Disjoint,
}

impl GeometryMode {
    fn name(self) -> &'static str {
        match self {
            GeometryMode::FarApart => "far_apart",
            GeometryMode::Disjoint => "disjoint",
        }
    }
}

/// The unknown's support `D`, the background's support `D0`, and which
/// separation condition is in force.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportGeometry {
    pub domain: SupportDomain,
    pub background: SupportDomain,
    pub mode: GeometryMode,
}

impl SupportGeometry {
    /// Checks the separation condition of `mode`. Besides the metric
    /// inequality, the lattice window `D - D0` must miss the supports of the
    /// terms it is meant to exclude; for non-convex point sets the metric
    /// condition alone does not imply this.
    pub fn new(domain: SupportDomain, background: SupportDomain, mode: GeometryMode) -> Result<Self> {
        let g = SupportGeometry::unchecked(domain, background, mode)?;
        let dist = g.domain.dist(&g.background)?;
        let diam = g.domain.diam();
        let fail = |detail: String| Error::Geometry {
            mode: mode.name(),
            detail,
        };
        let window = g.domain.difference(&g.background)?;
        let mirrored = g.background.difference(&g.domain)?;
        match mode {
            GeometryMode::FarApart => {
                if dist <= diam {
                    return Err(fail(format!("dist(D, D0) = {dist} <= diam D = {diam}")));
                }
                if window.intersects(&g.domain.difference(&g.domain)?) {
                    return Err(fail("D - D0 meets D - D".into()));
                }
            }
            GeometryMode::Disjoint => {
                if dist <= 0.0 {
                    return Err(fail("D and D0 share a lattice point".into()));
                }
            }
        }
        if window.intersects(&mirrored) {
            return Err(fail("D - D0 meets D0 - D".into()));
        }
        Ok(g)
    }

    /// Skips the separation checks (for demonstrating what goes wrong
    /// without them).
    pub fn unchecked(domain: SupportDomain, background: SupportDomain, mode: GeometryMode) -> Result<Self> {
        if domain.dim() != background.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: background.dim(),
            });
        }
        Ok(SupportGeometry {
            domain,
            background,
            mode,
        })
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `D - D0`, where the cross term `Sigma_3` lives.
    pub fn window(&self) -> SupportDomain {
        self.domain.difference(&self.background).expect("same dimension")
    }

    /// `(D u D0) - (D u D0)`, the support of the full autocorrelation.
    pub fn autocorrelation_support(&self) -> SupportDomain {
        let u = self.domain.union(&self.background).expect("same dimension");
        u.difference(&u).expect("same dimension")
    }

    /// Smallest grid on which `|F(f + f0)|^2` determines every quantity used.
    pub fn min_grid_size(&self) -> usize {
        min_grid_size(self.autocorrelation_support().extent())
    }
}

/// The four terms of `(f + f0) * (f~ + f0~)` with `g~(x) = conj(g(-x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sigmas {
    /// `f * f~`
    pub s1: LatticeField,
    /// `f0 * f~`
    pub s2: LatticeField,
    /// `f * f0~`
    pub s3: LatticeField,
    /// `f0 * f0~`
    pub s4: LatticeField,
}

impl Sigmas {
    pub fn total(&self) -> LatticeField {
        self.s1
            .add(&self.s2)
            .and_then(|s| s.add(&self.s3))
            .and_then(|s| s.add(&self.s4))
            .expect("same dimension")
    }
}

pub fn sigma_decompose(f: &LatticeField, f0: &LatticeField) -> Result<Sigmas> {
    let ft = f.reflect_conjugate();
    let f0t = f0.reflect_conjugate();
    Ok(Sigmas {
        s1: f.convolve(&ft)?,
        s2: f0.convolve(&ft)?,
        s3: f.convolve(&f0t)?,
        s4: f0.convolve(&f0t)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Retrieval {
    pub field: LatticeField,
    /// The windowed cross term `q`.
    pub q: LatticeField,
    pub skipped_nodes: usize,
    pub total_nodes: usize,
}

fn check_grid(s: &TorusSpectrum, geom: &SupportGeometry) -> Result<()> {
    if s.dim() != geom.dim() {
        return Err(Error::DimensionMismatch {
            expected: geom.dim(),
            got: s.dim(),
        });
    }
    let extent = geom.autocorrelation_support().extent();
    let required = (2 * extent + 1) as usize;
    if s.grid_size() < required {
        return Err(Error::UnderResolved {
            grid_size: s.grid_size(),
            extent,
            required,
        });
    }
    Ok(())
}

/// Recovers `f` on `D` from `|F(f + f0)|^2` (and `|F f|^2` in disjoint
/// mode) sampled on a torus grid.
pub fn retrieve_source(
    intensity_sum: &TorusSpectrum,
    intensity_f: Option<&TorusSpectrum>,
    f0: &LatticeField,
    geom: &SupportGeometry,
    zero_threshold: f64,
) -> Result<Retrieval> {
    check_grid(intensity_sum, geom)?;
    if f0.dim() != geom.dim() {
        return Err(Error::DimensionMismatch {
            expected: geom.dim(),
            got: f0.dim(),
        });
    }
    if f0.norm_inf() == 0.0 {
        return Err(Error::InvalidArgument("background source f0 vanishes".into()));
    }
    if f0.support().iter().any(|x| !geom.background.contains(x)) {
        return Err(Error::InvalidArgument("f0 is not supported in D0".into()));
    }
    let n = intensity_sum.grid_size();
    let conv = intensity_sum.convention();
    let window = geom.window();
    let mut u = idft(intensity_sum, &window)?;
    if geom.mode == GeometryMode::Disjoint {
        let i_f = intensity_f.ok_or_else(|| {
            Error::InvalidArgument("disjoint mode needs the intensity of f alone".into())
        })?;
        check_grid(i_f, geom)?;
        if i_f.grid_size() != n || i_f.convention() != conv {
            return Err(Error::InvalidArgument(
                "intensity grids differ".into(),
            ));
        }
        u = u.sub(&idft(i_f, &window)?)?;
    }
    let s4 = f0.convolve(&f0.reflect_conjugate())?;
    let norm = fourier_norm(geom.dim());
    let q = u
        .sub(&s4.scale(Complex64::new(norm, 0.0)))?
        .window(&window);

    let fq = dft(&q, n, conv)?;
    let ff0 = dft(f0, n, conv)?;
    let total = fq.values().len();
    let mut good = Vec::with_capacity(total);
    let mut values = vec![Complex64::default(); total];
    for (i, (a, b)) in fq.values().iter().zip(ff0.values()).enumerate() {
        if b.norm() >= zero_threshold {
            values[i] = a / b.conj();
            good.push(i);
        }
    }
    let skipped = total - good.len();
    if skipped as f64 > MAX_SKIPPED_FRACTION * total as f64 {
        return Err(Error::BackgroundDegenerate { skipped, total });
    }
    let field = if skipped == 0 {
        idft(&TorusSpectrum::new(geom.dim(), n, conv, values)?, &geom.domain)?
    } else {
        // least-squares trigonometric polynomial on D through the good nodes
        let nodes = fq.nodes();
        let pts: Vec<Point> = geom.domain.points().copied().collect();
        let m = DMatrix::from_fn(good.len(), pts.len(), |r, c| {
            Complex64::from_polar(norm, -pts[c].dot(&nodes[good[r]]))
        });
        let b = DVector::from_iterator(good.len(), good.iter().map(|&i| values[i]));
        let x = LeastSquares::new(m)?.solve(&b);
        LatticeField::from_values(&geom.domain, x.as_slice())?
    };
    Ok(Retrieval {
        field: field.pruned(),
        q,
        skipped_nodes: skipped,
        total_nodes: total,
    })
}

/// A measured far-field intensity `|a+-(omega, lambda)|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensitySample {
    pub omega: Direction,
    pub lambda: f64,
    pub sign: Sign,
    pub value: f64,
}

/// A sample `|F f(k)|^2` at a torus point `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSample {
    pub k: Vec<f64>,
    pub value: f64,
}

/// `|F f(kappa(+-omega, lambda))|^2 = |a|^2 |K| |grad phi|^2 / (2 pi)` for
/// each window sample.
pub fn intensity_from_farfield(
    window: &SpectralWindow,
    intensities: &[f64],
    sign: Sign,
) -> Result<Vec<SpectralSample>> {
    if intensities.len() != window.len() {
        return Err(Error::InvalidArgument(format!(
            "{} intensities for a window of {}",
            intensities.len(),
            window.len()
        )));
    }
    let gamma = window_points(window)?;
    Ok(window
        .samples()
        .iter()
        .zip(&gamma)
        .zip(intensities)
        .map(|((s, g), &i)| SpectralSample {
            k: sampled_point(g, &s.param, sign),
            value: i * g.amplitude_denominator().powi(2) / (2.0 * PI),
        })
        .collect())
}

/// Converts intensity samples with per-sample sign to spectral samples.
pub fn spectral_samples(samples: &[IntensitySample]) -> Result<Vec<SpectralSample>> {
    samples
        .par_iter()
        .map(|s| {
            let w = SpectralWindow::single(s.omega.clone(), s.lambda)?;
            Ok(intensity_from_farfield(&w, &[s.value], s.sign)?.remove(0))
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub unknowns: usize,
    pub samples: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Root-mean-square misfit of the fitted polynomial at the samples.
    pub rms_misfit: f64,
}

/// A real trigonometric polynomial `c_0 + sum_{m > 0} 2 (a_m cos(k.m) + b_m sin(k.m))`,
/// i.e. the Fourier series of a Hermitian sequence supported on `support`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPolynomial {
    dim: usize,
    /// Half of the support (`m > 0` lexicographically), plus the origin first.
    freqs: Vec<Point>,
    coeffs: Vec<f64>,
}

fn half_support(support: &SupportDomain) -> Vec<Point> {
    let mut out = vec![Point::origin()];
    out.extend(support.points().filter(|p| **p > Point::origin()).copied());
    out
}

fn basis_row(freqs: &[Point], k: &[f64], row: &mut [f64]) {
    row[0] = 1.0;
    for (j, m) in freqs[1..].iter().enumerate() {
        let t = m.dot(k);
        row[1 + 2 * j] = 2.0 * t.cos();
        row[2 + 2 * j] = 2.0 * t.sin();
    }
}

impl HermitianPolynomial {
    /// Least-squares fit to `samples`; `support` must be symmetric.
    pub fn fit(support: &SupportDomain, samples: &[SpectralSample]) -> Result<(Self, FitReport)> {
        let dim = support.dim();
        let freqs = half_support(support);
        let unknowns = 2 * freqs.len() - 1;
        if samples.len() < unknowns {
            return Err(Error::InsufficientCoverage {
                sigma_min: 0.0,
                unknowns,
                samples: samples.len(),
            });
        }
        let mut m = DMatrix::<f64>::zeros(samples.len(), unknowns);
        let mut row = vec![0.0; unknowns];
        for (i, s) in samples.iter().enumerate() {
            if s.k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.k.len(),
                });
            }
            basis_row(&freqs, &s.k, &mut row);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.value));
        let ls = LeastSquares::new(m.clone())?;
        if !ls.is_well_posed() {
            return Err(Error::InsufficientCoverage {
                sigma_min: ls.sigma_min(),
                unknowns,
                samples: samples.len(),
            });
        }
        let x = ls.solve(&b);
        let misfit = (&m * &x - &b).norm() / (samples.len() as f64).sqrt();
        let report = FitReport {
            unknowns,
            samples: samples.len(),
            sigma_min: ls.sigma_min(),
            sigma_max: ls.sigma_max(),
            rms_misfit: misfit,
        };
        Ok((
            HermitianPolynomial {
                dim,
                freqs,
                coeffs: x.iter().copied().collect(),
            },
            report,
        ))
    }

    pub fn eval(&self, k: &[f64]) -> f64 {
        let mut row = vec![0.0; self.coeffs.len()];
        basis_row(&self.freqs, k, &mut row);
        row.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn on_grid(&self, grid_size: usize, convention: Convention) -> Result<TorusSpectrum> {
        TorusSpectrum::from_fn(self.dim, grid_size, convention, |k| {
            Complex64::new(self.eval(k), 0.0)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaselessOptions {
    /// Torus grid for the fitted intensities; 0 picks the smallest admissible.
    pub grid_size: usize,
    pub zero_threshold: f64,
}

impl Default for PhaselessOptions {
    fn default() -> Self {
        PhaselessOptions {
            grid_size: 0,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaselessReport {
    pub fit_sum: FitReport,
    pub fit_f: Option<FitReport>,
    pub grid_size: usize,
    pub skipped_nodes: usize,
}

/// Recovers `f` from spectral intensity samples of `f + f0` (and of `f`
/// in disjoint mode) by fitting the band-limited intensities and applying
/// [`retrieve_source`].
pub fn phaseless_from_spectral(
    sum: &[SpectralSample],
    alone: Option<&[SpectralSample]>,
    f0: &LatticeField,
    geom: &SupportGeometry,
    opts: &PhaselessOptions,
) -> Result<(LatticeField, PhaselessReport)> {
    let min = geom.min_grid_size();
    let n = if opts.grid_size == 0 { min } else { opts.grid_size };
    if n < min {
        return Err(Error::UnderResolved {
            grid_size: n,
            extent: geom.autocorrelation_support().extent(),
            required: min,
        });
    }
    let conv = Convention::CenteredAtO;
    let (p_sum, fit_sum) = HermitianPolynomial::fit(&geom.autocorrelation_support(), sum)?;
    let i_sum = p_sum.on_grid(n, conv)?;
    let (i_f, fit_f) = match (geom.mode, alone) {
        (GeometryMode::Disjoint, Some(a)) => {
            let dd = geom.domain.difference(&geom.domain)?;
            let (p, r) = HermitianPolynomial::fit(&dd, a)?;
            (Some(p.on_grid(n, conv)?), Some(r))
        }
        (GeometryMode::Disjoint, None) => {
            return Err(Error::InvalidArgument(
                "disjoint mode needs the intensity of f alone".into(),
            ))
        }
        _ => (None, None),
    };
    let r = retrieve_source(&i_sum, i_f.as_ref(), f0, geom, opts.zero_threshold)?;
    Ok((
        r.field,
        PhaselessReport {
            fit_sum,
            fit_f,
            grid_size: n,
            skipped_nodes: r.skipped_nodes,
        },
    ))
}

/// Far-field version of [`phaseless_from_spectral`]: `|a1|^2` of `f + f0`
/// and optionally `|a|^2` of `f`.
pub fn phaseless_farfield_reconstruct(
    intensity_a1: &[IntensitySample],
    intensity_a: Option<&[IntensitySample]>,
    f0: &LatticeField,
    geom: &SupportGeometry,
    opts: &PhaselessOptions,
) -> Result<(LatticeField, PhaselessReport)> {
    let sum = spectral_samples(intensity_a1)?;
    let alone = intensity_a.map(spectral_samples).transpose()?;
    phaseless_from_spectral(&sum, alone.as_deref(), f0, geom, opts)
}
