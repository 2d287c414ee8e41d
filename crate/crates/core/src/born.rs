//! Scattering by a compactly supported potential `v`: the Born amplitude,
//! the exact Lippmann-Schwinger solution it approximates, and the
//! linearised inverse problems built on it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{amplitude_factor, far_field, resolvent_apply, GreenTable, ResolventConfig, Sign};
use crate::geometry::{kappa, phi, Direction, GammaPoint, SpectralParam};
use crate::inverse::PhasedDiagnostics;
use crate::lattice::{fourier_norm, LatticeField, Point, SupportDomain};
use crate::linalg::LeastSquares;
use crate::phase::{phaseless_from_spectral, PhaselessOptions, PhaselessReport, SpectralSample, SupportGeometry};

/// Tolerance on `|phi(k) - lambda|` for incident wave vectors.
pub const SURFACE_TOL: f64 = 1e-12;

/// The plane wave `psi0(x) = e^{ik.x}` with `k` on `Gamma(lambda)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidentWave {
    k: Vec<f64>,
    sp: SpectralParam,
}

impl IncidentWave {
    pub fn new(k: Vec<f64>, sp: SpectralParam) -> Result<Self> {
        if k.len() != sp.dim() {
            return Err(Error::DimensionMismatch {
                expected: sp.dim(),
                got: k.len(),
            });
        }
        let residual = (phi(&k) - sp.lambda()).abs();
        if !(residual <= SURFACE_TOL) {
            return Err(Error::OffSurface { residual });
        }
        Ok(IncidentWave { k, sp })
    }

    /// `k = kappa(theta, lambda)`.
    pub fn from_direction(theta: &Direction, sp: &SpectralParam) -> Result<Self> {
        let g = kappa(theta, sp)?;
        IncidentWave::new(g.kappa, *sp)
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn param(&self) -> &SpectralParam {
        &self.sp
    }

    pub fn lambda(&self) -> f64 {
        self.sp.lambda()
    }

    pub fn at(&self, x: &Point) -> Complex64 {
        Complex64::from_polar(1.0, x.dot(&self.k))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringSample {
    pub k: Vec<f64>,
    pub lambda: f64,
    pub omega: Direction,
    pub value: Complex64,
}

/// `kappa(-omega, lambda) - k`, where the Born amplitude samples `v^`.
pub fn transfer_point(g: &GammaPoint, inc: &IncidentWave) -> Vec<f64> {
    let back = inc.sp.reflect(&g.kappa);
    back.iter().zip(&inc.k).map(|(a, b)| a - b).collect()
}

fn born_factor(g: &GammaPoint, dim: usize) -> Complex64 {
    -amplitude_factor(g, dim, Sign::Minus)
}

/// The Born approximation `A(k, omega)` of the scattering amplitude.
pub fn born_amplitude(v: &LatticeField, inc: &IncidentWave, omega: &Direction) -> Result<Complex64> {
    if v.dim() != inc.sp.dim() {
        return Err(Error::DimensionMismatch {
            expected: inc.sp.dim(),
            got: v.dim(),
        });
    }
    let g = kappa(omega, &inc.sp)?;
    Ok(v.fourier_at(&transfer_point(&g, inc)) * born_factor(&g, v.dim()))
}

/// Born amplitudes for every `(incident, omega)` pair, incident outermost.
pub fn born_batch(
    v: &LatticeField,
    incidents: &[IncidentWave],
    omegas: &[Direction],
) -> Result<Vec<ScatteringSample>> {
    let pairs: Vec<(&IncidentWave, &Direction)> = incidents
        .iter()
        .flat_map(|i| omegas.iter().map(move |w| (i, w)))
        .collect();
    pairs
        .par_iter()
        .map(|(inc, w)| {
            Ok(ScatteringSample {
                k: inc.k.clone(),
                lambda: inc.lambda(),
                omega: (*w).clone(),
                value: born_amplitude(v, inc, w)?,
            })
        })
        .collect()
}

/// Solution of `psi_sc = -R(v (psi0 + psi_sc))` on `supp v`.
#[derive(Clone, Debug)]
pub struct ScatteringSolution {
    pub incident: IncidentWave,
    pub potential: LatticeField,
    /// `psi_sc` on `supp v`.
    pub scattered: LatticeField,
    pub iterations: usize,
    pub last_update: f64,
}

impl ScatteringSolution {
    /// `-v (psi0 + psi_sc)`, the effective source of the scattered wave.
    pub fn effective_source(&self) -> LatticeField {
        let mut s = LatticeField::zeros(self.potential.dim()).expect("valid dimension");
        for (x, vx) in self.potential.iter() {
            s.insert(*x, -vx * (self.incident.at(x) + self.scattered.get(x)));
        }
        s
    }

    /// Far field of the wave radiated by [`Self::effective_source`]: the exact
    /// `A(k, omega)` once converged, the Born amplitude when `scattered` is 0.
    pub fn amplitude(&self, omega: &Direction) -> Result<Complex64> {
        far_field(&self.effective_source(), omega, &self.incident.sp, Sign::Minus)
    }

    /// `psi_sc` at arbitrary lattice points.
    pub fn scattered_at(&self, targets: &[Point], cfg: &ResolventConfig) -> Result<LatticeField> {
        Ok(resolvent_apply(&self.effective_source(), &self.incident.sp, Sign::Minus, cfg, targets)?.values)
    }
}

struct FixedPoint {
    pts: Vec<Point>,
    g: DMatrix<Complex64>,
    vv: Vec<Complex64>,
    psi0: Vec<Complex64>,
    potential: LatticeField,
}

impl FixedPoint {
    fn new(v: &LatticeField, inc: &IncidentWave, cfg: &ResolventConfig) -> Result<Self> {
        let dim = inc.sp.dim();
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        let potential = v.pruned();
        let pts: Vec<Point> = potential.support().into_iter().collect();
        let diffs: Vec<Point> = pts
            .iter()
            .flat_map(|a| pts.iter().map(move |b| *a - *b))
            .collect();
        let table = GreenTable::build(&inc.sp, Sign::Minus, cfg, diffs.iter())?;
        let n = pts.len();
        let g = DMatrix::from_fn(n, n, |i, j| table.get(&(pts[i] - pts[j])).expect("tabulated").0);
        let vv = pts.iter().map(|x| potential.get(x)).collect();
        let psi0 = pts.iter().map(|x| inc.at(x)).collect();
        Ok(FixedPoint {
            pts,
            g,
            vv,
            psi0,
            potential,
        })
    }

    /// One step `psi_sc <- -R(v (psi0 + psi_sc))`, returning the sup-norm update.
    fn step(&self, sc: &mut DVector<Complex64>) -> f64 {
        let n = self.pts.len();
        let rhs = DVector::from_iterator(n, (0..n).map(|i| self.vv[i] * (self.psi0[i] + sc[i])));
        let next = -(&self.g * rhs);
        let update = (&next - &*sc).iter().map(|z| z.norm()).fold(0.0, f64::max);
        *sc = next;
        update
    }

    fn finish(self, inc: &IncidentWave, sc: &DVector<Complex64>, iterations: usize, last_update: f64) -> ScatteringSolution {
        let mut scattered = LatticeField::zeros(inc.sp.dim()).expect("valid dimension");
        for (x, s) in self.pts.iter().zip(sc.iter()) {
            scattered.insert(*x, *s);
        }
        ScatteringSolution {
            incident: inc.clone(),
            potential: self.potential,
            scattered,
            iterations,
            last_update,
        }
    }
}

/// Fixed-point iteration for the scattered wave. Iteration `n` is the
/// `n`-th partial sum of the Born series; stops when successive iterates
/// differ by less than `tol` (sup norm) and fails when the update grows on
/// three consecutive steps.
pub fn lippmann_schwinger_solve(
    v: &LatticeField,
    inc: &IncidentWave,
    cfg: &ResolventConfig,
    tol: f64,
    max_iter: usize,
) -> Result<ScatteringSolution> {
    let fp = FixedPoint::new(v, inc, cfg)?;
    let n = fp.pts.len();
    let mut sc = DVector::<Complex64>::zeros(n);
    let mut last = f64::INFINITY;
    let mut growth = 0;
    let mut iterations = 0;
    let mut update = if n == 0 { 0.0 } else { f64::INFINITY };
    while update > tol {
        if iterations >= max_iter {
            return Err(Error::ContractionFailure {
                potential_norm: fp.potential.norm_inf(),
                last_update: update,
            });
        }
        update = fp.step(&mut sc);
        iterations += 1;
        growth = if update > last { growth + 1 } else { 0 };
        if growth >= 3 || !update.is_finite() {
            return Err(Error::ContractionFailure {
                potential_norm: fp.potential.norm_inf(),
                last_update: update,
            });
        }
        last = update;
    }
    Ok(fp.finish(inc, &sc, iterations, update))
}

/// Exactly `steps` fixed-point iterations, with no convergence test.
/// One step gives the Born field.
pub fn born_series_partial_sum(
    v: &LatticeField,
    inc: &IncidentWave,
    cfg: &ResolventConfig,
    steps: usize,
) -> Result<ScatteringSolution> {
    let fp = FixedPoint::new(v, inc, cfg)?;
    let mut sc = DVector::<Complex64>::zeros(fp.pts.len());
    let mut update = 0.0;
    for _ in 0..steps {
        update = fp.step(&mut sc);
    }
    Ok(fp.finish(inc, &sc, steps, update))
}

/// The linear map `v |-> A_Born` on potentials supported in `D`, for a
/// fixed list of `(k, omega)` pairs (possibly at several `lambda`).
#[derive(Clone, Debug)]
pub struct BornOperator {
    dim: usize,
    matrix: DMatrix<Complex64>,
    domain_points: Vec<Point>,
    lsq: LeastSquares<Complex64>,
}

pub fn build_born_operator(domain: &SupportDomain, pairs: &[(IncidentWave, Direction)]) -> Result<BornOperator> {
    if pairs.is_empty() {
        return Err(Error::EmptySet("scattering samples"));
    }
    let dim = domain.dim();
    let points: Vec<Point> = domain.points().copied().collect();
    let norm = fourier_norm(dim);
    let rows: Vec<Vec<Complex64>> = pairs
        .par_iter()
        .map(|(inc, w)| {
            if inc.sp.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: inc.sp.dim(),
                });
            }
            let g = kappa(w, &inc.sp)?;
            let p = transfer_point(&g, inc);
            let pre = born_factor(&g, dim) * norm;
            Ok(points
                .iter()
                .map(|x| pre * Complex64::from_polar(1.0, -x.dot(&p)))
                .collect())
        })
        .collect::<Result<_>>()?;
    let matrix = DMatrix::from_fn(rows.len(), points.len(), |i, j| rows[i][j]);
    let lsq = LeastSquares::new(matrix.clone())?;
    Ok(BornOperator {
        dim,
        matrix,
        domain_points: points,
        lsq,
    })
}

impl BornOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
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

    pub fn apply(&self, v: &LatticeField) -> DVector<Complex64> {
        let x = DVector::from_iterator(self.domain_points.len(), self.domain_points.iter().map(|p| v.get(p)));
        &self.matrix * x
    }

    fn field(&self, x: &DVector<Complex64>) -> LatticeField {
        let mut f = LatticeField::zeros(self.dim).expect("valid dimension");
        for (p, c) in self.domain_points.iter().zip(x.iter()) {
            f.insert(*p, *c);
        }
        f
    }

    /// Minimum-norm least-squares potential explaining `values` (in pair order).
    pub fn reconstruct(&self, values: &[Complex64]) -> Result<(LatticeField, PhasedDiagnostics)> {
        if !self.lsq.is_well_posed() {
            return Err(Error::InsufficientCoverage {
                sigma_min: self.sigma_min(),
                unknowns: self.domain_points.len(),
                samples: self.matrix.nrows(),
            });
        }
        if values.len() != self.matrix.nrows() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} scattering pairs",
                values.len(),
                self.matrix.nrows()
            )));
        }
        let b = DVector::from_column_slice(values);
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

    /// The unit-norm potential attaining the stability bound.
    pub fn extremal_source(&self) -> LatticeField {
        self.field(&self.lsq.smallest_right_vector())
    }
}

fn sample_pairs(samples: &[ScatteringSample], dim: usize) -> Result<Vec<(IncidentWave, Direction)>> {
    samples
        .iter()
        .map(|s| {
            let sp = crate::geometry::validate_lambda(s.lambda, dim)?;
            Ok((IncidentWave::new(s.k.clone(), sp)?, s.omega.clone()))
        })
        .collect()
}

/// Recovers `v` on `D` from Born amplitudes.
pub fn born_reconstruct(
    samples: &[ScatteringSample],
    domain: &SupportDomain,
) -> Result<(LatticeField, PhasedDiagnostics)> {
    if domain.dim() < 2 {
        return Err(Error::UnsupportedDimension(domain.dim()));
    }
    let pairs = sample_pairs(samples, domain.dim())?;
    let op = build_born_operator(domain, &pairs)?;
    let values: Vec<Complex64> = samples.iter().map(|s| s.value).collect();
    op.reconstruct(&values)
}

/// `prod_j (L_{k_j} - lambda) u`: a potential whose Born amplitude vanishes
/// for each incident vector `k_j`.
pub fn born_nonuniqueness(u: &LatticeField, incidents: &[IncidentWave]) -> Result<LatticeField> {
    let mut v = u.clone();
    for inc in incidents {
        if inc.sp.dim() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                got: inc.sp.dim(),
            });
        }
        v = v.modulated_helmholtz(&inc.k, inc.lambda());
    }
    Ok(v)
}

/// A measured `|A(k, omega)|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringIntensity {
    pub k: Vec<f64>,
    pub lambda: f64,
    pub omega: Direction,
    pub value: f64,
}

/// `|v^(kappa(-omega) - k)|^2 = |A|^2 |K| |grad phi|^2 / (2 pi)`.
pub fn born_spectral_samples(samples: &[ScatteringIntensity], dim: usize) -> Result<Vec<SpectralSample>> {
    samples
        .par_iter()
        .map(|s| {
            let sp = crate::geometry::validate_lambda(s.lambda, dim)?;
            let inc = IncidentWave::new(s.k.clone(), sp)?;
            let g = kappa(&s.omega, &sp)?;
            Ok(SpectralSample {
                k: transfer_point(&g, &inc),
                value: s.value * g.amplitude_denominator().powi(2) / (2.0 * PI),
            })
        })
        .collect()
}

/// Recovers `v` from `|A|^2` of `v + v0` (and of `v` in disjoint mode)
/// with the background `v0` known.
pub fn born_phaseless_reconstruct(
    intensity_a1: &[ScatteringIntensity],
    intensity_a: Option<&[ScatteringIntensity]>,
    v0: &LatticeField,
    geom: &SupportGeometry,
    opts: &PhaselessOptions,
) -> Result<(LatticeField, PhaselessReport)> {
    let dim = geom.dim();
    let sum = born_spectral_samples(intensity_a1, dim)?;
    let alone = intensity_a.map(|a| born_spectral_samples(a, dim)).transpose()?;
    phaseless_from_spectral(&sum, alone.as_deref(), v0, geom, opts)
}
