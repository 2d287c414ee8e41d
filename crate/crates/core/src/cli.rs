//! Config-driven experiment runner behind the `lhz` binary.
//!
//! A run is `lhz <subcommand> <config.json>`. The config is a single JSON
//! object (schema below); relative paths inside it are resolved against the
//! config file's directory. Every run writes its artifacts, a
//! `manifest.json` (config echo, crate version, artifact list, error
//! metrics) and a separate `timings.json` into `output_dir`. Everything
//! except `timings.json` is byte-identical across runs of the same config.
//!
//! # Randomness
//!
//! Random instances use SplitMix64 seeded with `seed` (the state starts at
//! `seed`; each step adds `0x9E3779B97F4A7C15` and returns the standard
//! mix of the new state). A random value is `2 u - 1` with
//! `u = (x >> 11) * 2^-53`. Random fields draw the real then imaginary
//! part at each point of their domain in lexicographic order; the source is
//! drawn before the background.
//!
//! # Config schema (version 1)
//!
//! ```text
//! schema_version   1
//! subcommand       optional, must match the command line
//! dim              1, 2 or 3
//! seed             u64, default 0
//! output_dir       directory for artifacts
//! lambda | lambdas | band {lo, hi, count}
//! sign             "+" or "-" (default "-")
//! directions       {count, phase} | {center, half_width, count} | {list: [[..]]}
//! window_file      window JSON, instead of directions x lambdas
//! source, background
//!                  {kind: delta, at, value?} | {kind: file, path}
//!                  | {kind: random, domain}
//! domain, background_domain
//!                  {lo, hi} box | {points: [[..]]}
//! data_file        measured data replacing synthesized data (invert, born-invert)
//! targets          lattice points for near-field output (forward)
//! resolvent        {method, epsilon_schedule, grid_size, extrapolation_order,
//!                   tolerance, max_level}
//! asympt           {base, radii}
//! nonuniq          {roots, n_dirs, perturbation}
//! phaseless        {mode, grid_size, zero_threshold, intensity_file,
//!                   intensity_f_file}
//! born             {incidents, exact, tol, max_iter}
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::born::{
    born_amplitude, born_batch, born_phaseless_reconstruct, build_born_operator,
    lippmann_schwinger_solve, IncidentWave, ScatteringIntensity, ScatteringSample,
};
use crate::error::Error;
use crate::forward::{
    asymptotic_check, far_field_batch, resolvent_apply, ResolventConfig, Sign,
};
use crate::geometry::{
    arc_directions, circle_directions, direction_grid, grad_phi, kappa, linspace, phi, validate_lambda,
    Direction, SpectralParam,
};
use crate::inverse::{build_sampling_operator, nonuniqueness_source, vanishing_derivative_residual, vanishing_residual};
use crate::io;
use crate::lattice::{LatticeField, Point, SupportDomain};
use crate::phase::{
    phaseless_farfield_reconstruct, GeometryMode, IntensitySample, PhaselessOptions, SupportGeometry,
    DEFAULT_ZERO_THRESHOLD,
};
use crate::window::SpectralWindow;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    /// Far-field amplitudes (and optional near field) of a source.
    Forward,
    /// Compare the resolvent with its far-field asymptotics along a ray.
    Asympt,
    /// Reconstruct a source from phased far-field data.
    Invert,
    /// Build a source with vanishing far field at given lambdas.
    Nonuniq,
    /// Reconstruct a source from far-field intensities with a known background.
    Phaseless,
    /// Born (and optionally exact) scattering amplitudes.
    BornForward,
    /// Reconstruct a potential from Born amplitudes.
    BornInvert,
    /// Reconstruct a potential from Born intensities with a known background.
    BornPhaseless,
    /// Tabulate the inverse Gauss map over directions and lambdas.
    Geometry,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Forward => "forward",
            Subcommand::Asympt => "asympt",
            Subcommand::Invert => "invert",
            Subcommand::Nonuniq => "nonuniq",
            Subcommand::Phaseless => "phaseless",
            Subcommand::BornForward => "born-forward",
            Subcommand::BornInvert => "born-invert",
            Subcommand::BornPhaseless => "born-phaseless",
            Subcommand::Geometry => "geometry",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum DirectionSpec {
    List { list: Vec<Vec<f64>> },
    Arc { center: f64, half_width: f64, count: usize },
    Uniform {
        count: usize,
        #[serde(default)]
        phase: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum DomainSpec {
    Box { lo: Vec<i64>, hi: Vec<i64> },
    Points { points: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Delta {
        at: Vec<i64>,
        #[serde(default = "unit_value")]
        value: [f64; 2],
    },
    File { path: PathBuf },
    Random { domain: DomainSpec },
}

fn unit_value() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptSpec {
    pub base: Vec<i64>,
    pub radii: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonuniqSpec {
    /// The `lambda_j`, repeated for higher multiplicity.
    pub roots: Vec<f64>,
    pub n_dirs: usize,
    /// Offset of the control spectral parameter; 0 disables the control.
    pub perturbation: f64,
}

impl Default for NonuniqSpec {
    fn default() -> Self {
        NonuniqSpec {
            roots: Vec::new(),
            n_dirs: 256,
            perturbation: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaselessSpec {
    pub mode: GeometryMode,
    pub grid_size: usize,
    pub zero_threshold: f64,
    pub intensity_file: Option<PathBuf>,
    pub intensity_f_file: Option<PathBuf>,
}

impl Default for PhaselessSpec {
    fn default() -> Self {
        PhaselessSpec {
            mode: GeometryMode::FarApart,
            grid_size: 0,
            zero_threshold: DEFAULT_ZERO_THRESHOLD,
            intensity_file: None,
            intensity_f_file: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BornSpec {
    /// Directions `theta` of the incident vectors `k = kappa(theta, lambda)`.
    pub incidents: Option<DirectionSpec>,
    /// Also solve the Lippmann-Schwinger equation (born-forward).
    pub exact: bool,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BornSpec {
    fn default() -> Self {
        BornSpec {
            incidents: None,
            exact: false,
            tol: 1e-13,
            max_iter: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<Subcommand>,
    pub dim: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<BandSpec>,
    #[serde(default)]
    pub sign: Sign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<DirectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<SourceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background_domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<Vec<i64>>,
    #[serde(default)]
    pub resolvent: ResolventConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asympt: Option<AsymptSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonuniq: Option<NonuniqSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phaseless: Option<PhaselessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub born: Option<BornSpec>,
}

/// Failure of a run, split by exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config { field: String, message: String },
    Numerical(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config { field, message } => write!(f, "config error in `{field}`: {message}"),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e)
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

fn bad(field: &str, message: impl fmt::Display) -> RunError {
    RunError::Config {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn at<T>(field: &str, r: crate::error::Result<T>) -> RunResult<T> {
    r.map_err(|e| bad(field, e))
}

/// Seeded generator of uniform values in `[-1, 1)`.
pub struct InstanceRng(SplitMix64);

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        InstanceRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        2.0 * ((self.next_u64() >> 11) as f64 * (-53f64).exp2()) - 1.0
    }

    pub fn complex(&mut self) -> Complex64 {
        let re = self.uniform();
        Complex64::new(re, self.uniform())
    }

    /// Random values on every point of `domain`, in lexicographic order.
    pub fn field(&mut self, domain: &SupportDomain) -> LatticeField {
        let vals: Vec<Complex64> = (0..domain.len()).map(|_| self.complex()).collect();
        LatticeField::from_values(domain, &vals).expect("one value per point")
    }
}

/// Parses a config file and checks everything that does not need numerics.
pub fn load_config(path: &Path) -> RunResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| bad("config", format!("{}: {e}", path.display())))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| bad("config", e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    cfg.resolve_paths(base);
    Ok(cfg)
}

fn join(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl ExperimentConfig {
    fn resolve_paths(&mut self, base: &Path) {
        join(base, &mut self.output_dir);
        for p in [&mut self.window_file, &mut self.data_file].into_iter().flatten() {
            join(base, p);
        }
        for s in [&mut self.source, &mut self.background].into_iter().flatten() {
            if let SourceSpec::File { path } = s {
                join(base, path);
            }
        }
        if let Some(ph) = &mut self.phaseless {
            for p in [&mut ph.intensity_file, &mut ph.intensity_f_file].into_iter().flatten() {
                join(base, p);
            }
        }
    }

    fn check_header(&self, cmd: Subcommand) -> RunResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if let Some(s) = self.subcommand {
            if s != cmd {
                return Err(bad(
                    "subcommand",
                    format!("config is for `{}`, invoked as `{}`", s.name(), cmd.name()),
                ));
            }
        }
        if !(1..=3).contains(&self.dim) {
            return Err(bad("dim", Error::UnsupportedDimension(self.dim)));
        }
        at("resolvent", self.resolvent.validate())
    }

    /// The lambda list from exactly one of `lambda`, `lambdas`, `band`.
    pub fn lambda_list(&self) -> RunResult<Vec<f64>> {
        let (field, list) = match (&self.lambda, &self.lambdas, &self.band) {
            (Some(l), None, None) => ("lambda", vec![*l]),
            (None, Some(ls), None) => ("lambdas", ls.clone()),
            (None, None, Some(b)) => {
                if b.count == 0 {
                    return Err(bad("band.count", "must be positive"));
                }
                ("band", linspace(b.lo, b.hi, b.count))
            }
            (None, None, None) => return Err(bad("lambda", "one of `lambda`, `lambdas`, `band` is required")),
            _ => return Err(bad("lambda", "give only one of `lambda`, `lambdas`, `band`")),
        };
        if list.is_empty() {
            return Err(bad(field, "empty list"));
        }
        for &l in &list {
            at(field, validate_lambda(l, self.dim))?;
        }
        Ok(list)
    }

    fn single_lambda(&self) -> RunResult<SpectralParam> {
        let l = self.lambda_list()?;
        if l.len() != 1 {
            return Err(bad("lambda", "this subcommand takes a single lambda"));
        }
        at("lambda", validate_lambda(l[0], self.dim))
    }

    fn direction_list(&self, field: &str, spec: Option<&DirectionSpec>) -> RunResult<Vec<Direction>> {
        let spec = spec.ok_or_else(|| bad(field, "required"))?;
        let dirs = match spec {
            DirectionSpec::List { list } => list
                .iter()
                .map(|d| {
                    if d.len() != self.dim {
                        return Err(bad(field, format!("direction {d:?} is not {}-dimensional", self.dim)));
                    }
                    at(field, Direction::new(d.clone()))
                })
                .collect::<RunResult<Vec<_>>>()?,
            DirectionSpec::Arc {
                center,
                half_width,
                count,
            } => {
                if self.dim != 2 {
                    return Err(bad(field, "arcs of directions need dim = 2"));
                }
                arc_directions(*center, *half_width, *count)
            }
            DirectionSpec::Uniform { count, phase } => {
                if self.dim == 2 {
                    circle_directions(*count, *phase)
                } else if *phase != 0.0 {
                    return Err(bad(field, "`phase` only applies in dim = 2"));
                } else {
                    at(field, direction_grid(self.dim, *count))?
                }
            }
        };
        if dirs.is_empty() {
            return Err(bad(field, "no directions"));
        }
        Ok(dirs)
    }

    fn window(&self) -> RunResult<(SpectralWindow, Sign)> {
        if let Some(path) = &self.window_file {
            if self.directions.is_some() {
                return Err(bad("window_file", "give either `window_file` or `directions`"));
            }
            let wf: io::WindowFile = at("window_file", io::read_json(path))?;
            let (w, sign) = at("window_file", wf.to_window())?;
            if w.dim() != self.dim {
                return Err(bad("window_file", format!("window has dim {}", w.dim())));
            }
            return Ok((w, sign));
        }
        let dirs = self.direction_list("directions", self.directions.as_ref())?;
        let lambdas = self.lambda_list()?;
        Ok((at("directions", SpectralWindow::product(&dirs, &lambdas))?, self.sign))
    }

    fn domain_of(&self, field: &str, spec: Option<&DomainSpec>) -> RunResult<SupportDomain> {
        let spec = spec.ok_or_else(|| bad(field, "required"))?;
        let d = match spec {
            DomainSpec::Box { lo, hi } => {
                if lo.len() != self.dim || hi.len() != self.dim {
                    return Err(bad(field, format!("box corners must have {} coordinates", self.dim)));
                }
                at(field, SupportDomain::box_domain(lo, hi))?
            }
            DomainSpec::Points { points } => {
                if points.iter().any(|p| p.len() != self.dim) {
                    return Err(bad(field, format!("points must have {} coordinates", self.dim)));
                }
                at(field, SupportDomain::from_coords(self.dim, points))?
            }
        };
        Ok(d)
    }

    fn field_of(&self, field: &str, spec: Option<&SourceSpec>, rng: &mut InstanceRng) -> RunResult<LatticeField> {
        let spec = spec.ok_or_else(|| bad(field, "required"))?;
        match spec {
            SourceSpec::Delta { at: x, value } => {
                if x.len() != self.dim {
                    return Err(bad(field, format!("`at` must have {} coordinates", self.dim)));
                }
                let p = at(field, Point::new(x))?;
                at(field, LatticeField::delta(self.dim, p, Complex64::new(value[0], value[1])))
            }
            SourceSpec::File { path } => {
                let f = at(field, io::read_field(path))?;
                if f.dim() != self.dim {
                    return Err(bad(field, format!("{} holds a {}-dimensional field", path.display(), f.dim())));
                }
                Ok(f)
            }
            SourceSpec::Random { domain } => Ok(rng.field(&self.domain_of(field, Some(domain))?)),
        }
    }

    fn phaseless_spec(&self) -> PhaselessSpec {
        self.phaseless.clone().unwrap_or_default()
    }

    fn born_spec(&self) -> BornSpec {
        self.born.clone().unwrap_or_default()
    }

    fn incidents(&self, sp: &SpectralParam) -> RunResult<Vec<IncidentWave>> {
        let spec = self.born_spec();
        let dirs = self.direction_list("born.incidents", spec.incidents.as_ref())?;
        dirs.iter()
            .map(|t| at("born.incidents", IncidentWave::from_direction(t, sp)))
            .collect()
    }
}

/// Output of a run before it is written to disk.
#[derive(Default)]
struct Outcome {
    artifacts: BTreeMap<String, String>,
    metrics: BTreeMap<String, Value>,
    stages: Vec<(String, f64)>,
}

impl Outcome {
    fn text(&mut self, name: &str, text: String) {
        self.artifacts.insert(name.to_string(), text);
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> RunResult<()> {
        self.text(name, io::to_json(v)?);
        Ok(())
    }

    fn field(&mut self, name: &str, f: &LatticeField) -> RunResult<()> {
        self.json(name, &io::FieldFile::from(f))
    }

    fn metric(&mut self, name: &str, v: impl Into<Value>) {
        self.metrics.insert(name.to_string(), v.into());
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let r = f();
        self.stages.push((name.to_string(), t.elapsed().as_secs_f64()));
        r
    }
}

/// Summary of a finished run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub metrics: BTreeMap<String, Value>,
}

/// Runs `cmd` with a config file and writes all artifacts.
pub fn run_file(cmd: Subcommand, config: &Path) -> RunResult<RunSummary> {
    run(cmd, &load_config(config)?)
}

/// Runs `cmd` with an already loaded config (paths taken as given).
pub fn run(cmd: Subcommand, cfg: &ExperimentConfig) -> RunResult<RunSummary> {
    cfg.check_header(cmd)?;
    let start = Instant::now();
    let mut out = Outcome::default();
    match cmd {
        Subcommand::Forward => forward(cfg, &mut out)?,
        Subcommand::Asympt => asympt(cfg, &mut out)?,
        Subcommand::Invert => invert(cfg, &mut out)?,
        Subcommand::Nonuniq => nonuniq(cfg, &mut out)?,
        Subcommand::Phaseless => phaseless(cfg, &mut out)?,
        Subcommand::BornForward => born_forward(cfg, &mut out)?,
        Subcommand::BornInvert => born_invert(cfg, &mut out)?,
        Subcommand::BornPhaseless => born_phaseless(cfg, &mut out)?,
        Subcommand::Geometry => geometry(cfg, &mut out)?,
    }
    let total = start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| RunError::Numerical(Error::Io(format!("{}: {e}", cfg.output_dir.display()))))?;
    let names: Vec<String> = out.artifacts.keys().cloned().collect();
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "subcommand": cmd.name(),
        "crate_version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "artifacts": names,
        "metrics": out.metrics,
    });
    let timings = json!({
        "total_seconds": total,
        "stages": out.stages.iter().map(|(n, t)| json!({"stage": n, "seconds": t})).collect::<Vec<_>>(),
    });
    for (name, text) in &out.artifacts {
        io::write_text(&cfg.output_dir.join(name), text)?;
    }
    io::write_json(&cfg.output_dir.join("manifest.json"), &manifest)?;
    io::write_json(&cfg.output_dir.join("timings.json"), &timings)?;
    Ok(RunSummary {
        output_dir: cfg.output_dir.clone(),
        artifacts: names,
        metrics: out.metrics,
    })
}

fn relative_error(got: &LatticeField, want: &LatticeField) -> f64 {
    let n = want.norm_l2();
    let d = got.diff_l2(want);
    if n > 0.0 {
        d / n
    } else {
        d
    }
}

fn forward(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let mut rng = InstanceRng::new(cfg.seed);
    let f = cfg.field_of("source", cfg.source.as_ref(), &mut rng)?;
    let (window, sign) = cfg.window()?;
    let data = out.stage("far_field", || far_field_batch(&f, &window, sign))?;
    out.text("farfield.csv", io::farfield_csv(&data)?);
    out.metric("samples", data.len());
    out.metric(
        "max_abs_amplitude",
        data.iter().map(|s| s.value.norm()).fold(0.0, f64::max),
    );
    if !cfg.targets.is_empty() {
        let lambdas = cfg.lambda_list()?;
        if lambdas.len() != 1 {
            return Err(bad("targets", "near-field targets need a single lambda"));
        }
        let sp = validate_lambda(lambdas[0], cfg.dim)?;
        let targets = cfg
            .targets
            .iter()
            .map(|x| {
                if x.len() != cfg.dim {
                    return Err(bad("targets", format!("point {x:?} is not {}-dimensional", cfg.dim)));
                }
                at("targets", Point::new(x))
            })
            .collect::<RunResult<Vec<_>>>()?;
        let near = out.stage("resolvent", || resolvent_apply(&f, &sp, sign, &cfg.resolvent, &targets))?;
        out.field("near_field.json", &near.values)?;
        out.metric("max_quadrature_error", near.max_error());
    }
    Ok(())
}

fn asympt(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let mut rng = InstanceRng::new(cfg.seed);
    let f = cfg.field_of("source", cfg.source.as_ref(), &mut rng)?;
    let sp = cfg.single_lambda()?;
    let spec = cfg.asympt.as_ref().ok_or_else(|| bad("asympt", "required"))?;
    if spec.base.len() != cfg.dim {
        return Err(bad("asympt.base", format!("must have {} coordinates", cfg.dim)));
    }
    if spec.radii.is_empty() || spec.radii.iter().any(|&r| r <= 0) {
        return Err(bad("asympt.radii", "radii must be positive and nonempty"));
    }
    let base = at("asympt.base", Point::new(&spec.base))?;
    let rows = out.stage("asymptotic_check", || {
        asymptotic_check(&f, &sp, &base, &spec.radii, cfg.sign, &cfg.resolvent)
    })?;
    out.text("asymptotic.csv", io::asymptotic_csv(&rows)?);
    let mut scaled: Vec<f64> = rows.iter().map(|r| r.scaled_residual).collect();
    let max = scaled.iter().cloned().fold(0.0, f64::max);
    scaled.sort_by(f64::total_cmp);
    let median = scaled[scaled.len() / 2];
    out.metric("max_scaled_residual", max);
    out.metric("median_scaled_residual", median);
    out.metric("max_over_median", if median > 0.0 { max / median } else { 0.0 });
    let last = rows.iter().max_by(|a, b| a.radius.total_cmp(&b.radius)).expect("nonempty");
    out.metric("relative_error_at_max_radius", last.relative_error);
    out.metric(
        "max_quadrature_error",
        rows.iter().map(|r| r.quadrature_error).fold(0.0, f64::max),
    );
    Ok(())
}

fn invert(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let mut rng = InstanceRng::new(cfg.seed);
    let domain = cfg.domain_of("domain", cfg.domain.as_ref())?;
    let (window, sign) = cfg.window()?;
    let truth = match &cfg.source {
        Some(s) => Some(cfg.field_of("source", Some(s), &mut rng)?),
        None => None,
    };
    let data = match (&cfg.data_file, &truth) {
        (Some(p), _) => at("data_file", io::read_farfield_csv(p))?,
        (None, Some(f)) => {
            let d = far_field_batch(f, &window, sign)?;
            out.text("farfield.csv", io::farfield_csv(&d)?);
            d
        }
        (None, None) => return Err(bad("source", "either `source` or `data_file` is required")),
    };
    let op = out.stage("operator", || build_sampling_operator(&domain, &window, sign))?;
    let (rec, diag) = out.stage("reconstruct", || op.reconstruct(&data))?;
    out.field("reconstruction.json", &rec)?;
    out.json(
        "report.json",
        &json!({
            "sigma_min": diag.sigma_min,
            "sigma_max": diag.sigma_max,
            "cond": diag.cond,
            "residual": diag.residual,
            "field_file": "reconstruction.json",
        }),
    )?;
    out.metric("sigma_min", diag.sigma_min);
    out.metric("sigma_max", diag.sigma_max);
    out.metric("cond", diag.cond);
    out.metric("residual", diag.residual);
    out.metric("stability_constant", op.stability_constant()?);
    out.field("extremal_source.json", &op.extremal_source())?;
    if let Some(f) = &truth {
        out.metric("relative_error", relative_error(&rec, f));
    }
    Ok(())
}

fn nonuniq(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let mut rng = InstanceRng::new(cfg.seed);
    let u = cfg.field_of("source", cfg.source.as_ref(), &mut rng)?;
    let spec = cfg.nonuniq.clone().ok_or_else(|| bad("nonuniq", "required"))?;
    if spec.roots.is_empty() {
        return Err(bad("nonuniq.roots", "at least one root is required"));
    }
    if spec.n_dirs == 0 {
        return Err(bad("nonuniq.n_dirs", "must be positive"));
    }
    for &l in &spec.roots {
        at("nonuniq.roots", validate_lambda(l, cfg.dim))?;
    }
    let f = at("nonuniq.roots", nonuniqueness_source(&u, &spec.roots))?;
    out.field("source.json", &f)?;

    let mut distinct = spec.roots.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let mut rows = vec![vec![
        "lambda".to_string(),
        "kind".into(),
        "sign".into(),
        "max_abs_amplitude".into(),
    ]];
    let mut worst_root = 0.0f64;
    let mut worst_derivative = 0.0f64;
    let mut best_control = f64::INFINITY;
    for &l in &distinct {
        let mult = spec.roots.iter().filter(|&&r| r == l).count();
        let mut cases = vec![(l, "root")];
        if spec.perturbation != 0.0 {
            let lp = l + spec.perturbation;
            at("nonuniq.perturbation", validate_lambda(lp, cfg.dim))?;
            cases.push((lp, "perturbed"));
        }
        for (lam, kind) in cases {
            let sp = validate_lambda(lam, cfg.dim)?;
            for sign in [Sign::Minus, Sign::Plus] {
                let r = out.stage("vanishing_residual", || vanishing_residual(&f, &sp, sign, spec.n_dirs))?;
                if kind == "root" {
                    worst_root = worst_root.max(r);
                } else {
                    best_control = best_control.min(r);
                }
                rows.push(vec![io::fmt_f64(lam), kind.into(), sign.symbol().into(), io::fmt_f64(r)]);
            }
        }
        if mult >= 2 {
            for sign in [Sign::Minus, Sign::Plus] {
                let r = vanishing_derivative_residual(&f, l, sign, spec.n_dirs, 1e-4)?;
                worst_derivative = worst_derivative.max(r);
            }
        }
    }
    out.text("nonuniq.csv", csv_lines(&rows));
    out.metric("max_residual", worst_root);
    if spec.roots.len() > distinct.len() {
        out.metric("max_derivative_residual", worst_derivative);
    }
    if best_control.is_finite() {
        out.metric("min_perturbed_residual", best_control);
    }
    out.metric("source_support", f.pruned().len());
    Ok(())
}

fn csv_lines(rows: &[Vec<String>]) -> String {
    rows.iter().map(|r| r.join(",") + "\n").collect()
}

fn phaseless(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let mut rng = InstanceRng::new(cfg.seed);
    let spec = cfg.phaseless_spec();
    let truth = match &cfg.source {
        Some(s) => Some(cfg.field_of("source", Some(s), &mut rng)?),
        None => None,
    };
    let f0 = cfg.field_of("background", cfg.background.as_ref(), &mut rng)?;
    let domain = cfg.domain_of("domain", cfg.domain.as_ref())?;
    let background = cfg.domain_of("background_domain", cfg.background_domain.as_ref())?;
    let geom = at("phaseless.mode", SupportGeometry::new(domain, background, spec.mode))?;
    let opts = PhaselessOptions {
        grid_size: spec.grid_size,
        zero_threshold: spec.zero_threshold,
    };
    let disjoint = spec.mode == GeometryMode::Disjoint;

    let (sum, alone) = match (&spec.intensity_file, &truth) {
        (Some(p), _) => {
            let sum = at("phaseless.intensity_file", io::read_intensity_csv(p))?;
            let alone = match (&spec.intensity_f_file, disjoint) {
                (Some(q), true) => Some(at("phaseless.intensity_f_file", io::read_intensity_csv(q))?),
                (None, true) => return Err(bad("phaseless.intensity_f_file", "required in disjoint mode")),
                (_, false) => None,
            };
            (sum, alone)
        }
        (None, Some(f)) => {
            let (window, sign) = cfg.window()?;
            let total = at("background", f.add(&f0))?;
            let intensities = |g: &LatticeField| -> RunResult<Vec<IntensitySample>> {
                Ok(far_field_batch(g, &window, sign)?
                    .into_iter()
                    .map(|s| IntensitySample {
                        omega: s.omega,
                        lambda: s.lambda,
                        sign: s.sign,
                        value: s.value.norm_sqr(),
                    })
                    .collect())
            };
            let sum = out.stage("far_field", || intensities(&total))?;
            out.text("intensity_sum.csv", io::intensity_csv(&sum)?);
            let alone = if disjoint {
                let a = intensities(f)?;
                out.text("intensity_f.csv", io::intensity_csv(&a)?);
                Some(a)
            } else {
                None
            };
            (sum, alone)
        }
        (None, None) => return Err(bad("source", "either `source` or `phaseless.intensity_file` is required")),
    };
    let (rec, report) = out.stage("reconstruct", || {
        phaseless_farfield_reconstruct(&sum, alone.as_deref(), &f0, &geom, &opts)
    })?;
    out.field("reconstruction.json", &rec)?;
    let mut report_json = serde_json::to_value(&report).map_err(Error::from)?;
    report_json["field_file"] = json!("reconstruction.json");
    if let Some(f) = &truth {
        let e = relative_error(&rec, f);
        report_json["relative_error"] = json!(e);
        out.metric("relative_error", e);
    }
    out.json("report.json", &report_json)?;
    out.metric("fit_sigma_min", report.fit_sum.sigma_min);
    out.metric("skipped_nodes", report.skipped_nodes);
    out.metric("grid_size", report.grid_size);
    Ok(())
}

fn born_forward(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let mut rng = InstanceRng::new(cfg.seed);
    let v = cfg.field_of("source", cfg.source.as_ref(), &mut rng)?;
    let sp = cfg.single_lambda()?;
    let incidents = cfg.incidents(&sp)?;
    let omegas = cfg.direction_list("directions", cfg.directions.as_ref())?;
    let data = out.stage("born", || born_batch(&v, &incidents, &omegas))?;
    out.text("scattering.csv", io::scattering_csv(&data)?);
    out.metric("samples", data.len());
    out.metric(
        "max_abs_amplitude",
        data.iter().map(|s| s.value.norm()).fold(0.0, f64::max),
    );
    let spec = cfg.born_spec();
    if spec.exact {
        let mut exact = Vec::with_capacity(data.len());
        let mut worst = 0.0f64;
        let mut iterations = 0;
        for inc in &incidents {
            let sol = out.stage("lippmann_schwinger", || {
                lippmann_schwinger_solve(&v, inc, &cfg.resolvent, spec.tol, spec.max_iter)
            })?;
            iterations = iterations.max(sol.iterations);
            for w in &omegas {
                let a = sol.amplitude(w)?;
                worst = worst.max((a - born_amplitude(&v, inc, w)?).norm());
                exact.push(ScatteringSample {
                    k: inc.k().to_vec(),
                    lambda: inc.lambda(),
                    omega: w.clone(),
                    value: a,
                });
            }
        }
        out.text("scattering_exact.csv", io::scattering_csv(&exact)?);
        out.metric("max_born_error", worst);
        out.metric("max_iterations", iterations);
    }
    Ok(())
}

fn pairs_of(samples: &[ScatteringSample], dim: usize) -> RunResult<Vec<(IncidentWave, Direction)>> {
    samples
        .iter()
        .map(|s| {
            let sp = at("data_file", validate_lambda(s.lambda, dim))?;
            Ok((at("data_file", IncidentWave::new(s.k.clone(), sp))?, s.omega.clone()))
        })
        .collect()
}

fn born_invert(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let mut rng = InstanceRng::new(cfg.seed);
    let domain = cfg.domain_of("domain", cfg.domain.as_ref())?;
    let truth = match &cfg.source {
        Some(s) => Some(cfg.field_of("source", Some(s), &mut rng)?),
        None => None,
    };
    let data = match (&cfg.data_file, &truth) {
        (Some(p), _) => at("data_file", io::read_scattering_csv(p))?,
        (None, Some(v)) => {
            let sp = cfg.single_lambda()?;
            let incidents = cfg.incidents(&sp)?;
            let omegas = cfg.direction_list("directions", cfg.directions.as_ref())?;
            let d = born_batch(v, &incidents, &omegas)?;
            out.text("scattering.csv", io::scattering_csv(&d)?);
            d
        }
        (None, None) => return Err(bad("source", "either `source` or `data_file` is required")),
    };
    if data.iter().any(|s| s.k.len() != cfg.dim) {
        return Err(bad("data_file", format!("samples must be {}-dimensional", cfg.dim)));
    }
    let pairs = pairs_of(&data, cfg.dim)?;
    let op = out.stage("operator", || build_born_operator(&domain, &pairs))?;
    let values: Vec<Complex64> = data.iter().map(|s| s.value).collect();
    let (rec, diag) = out.stage("reconstruct", || op.reconstruct(&values))?;
    out.field("reconstruction.json", &rec)?;
    out.json(
        "report.json",
        &json!({
            "sigma_min": diag.sigma_min,
            "sigma_max": diag.sigma_max,
            "cond": diag.cond,
            "residual": diag.residual,
            "field_file": "reconstruction.json",
        }),
    )?;
    out.metric("sigma_min", diag.sigma_min);
    out.metric("cond", diag.cond);
    out.metric("residual", diag.residual);
    out.metric("stability_constant", op.stability_constant()?);
    if let Some(v) = &truth {
        out.metric("relative_error", relative_error(&rec, v));
    }
    Ok(())
}

fn born_phaseless(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let mut rng = InstanceRng::new(cfg.seed);
    let spec = cfg.phaseless_spec();
    let v = cfg.field_of("source", cfg.source.as_ref(), &mut rng)?;
    let v0 = cfg.field_of("background", cfg.background.as_ref(), &mut rng)?;
    let domain = cfg.domain_of("domain", cfg.domain.as_ref())?;
    let background = cfg.domain_of("background_domain", cfg.background_domain.as_ref())?;
    let geom = at("phaseless.mode", SupportGeometry::new(domain, background, spec.mode))?;
    let sp = cfg.single_lambda()?;
    let incidents = cfg.incidents(&sp)?;
    let omegas = cfg.direction_list("directions", cfg.directions.as_ref())?;
    let intensities = |g: &LatticeField| -> RunResult<Vec<ScatteringIntensity>> {
        Ok(born_batch(g, &incidents, &omegas)?
            .into_iter()
            .map(|s| ScatteringIntensity {
                k: s.k,
                lambda: s.lambda,
                omega: s.omega,
                value: s.value.norm_sqr(),
            })
            .collect())
    };
    let total = at("background", v.add(&v0))?;
    let sum = out.stage("born", || intensities(&total))?;
    out.text("intensity_sum.csv", io::scattering_intensity_csv(&sum)?);
    let alone = if spec.mode == GeometryMode::Disjoint {
        let a = intensities(&v)?;
        out.text("intensity_f.csv", io::scattering_intensity_csv(&a)?);
        Some(a)
    } else {
        None
    };
    let opts = PhaselessOptions {
        grid_size: spec.grid_size,
        zero_threshold: spec.zero_threshold,
    };
    let (rec, report) = out.stage("reconstruct", || {
        born_phaseless_reconstruct(&sum, alone.as_deref(), &v0, &geom, &opts)
    })?;
    out.field("reconstruction.json", &rec)?;
    let e = relative_error(&rec, &v);
    let mut report_json = serde_json::to_value(&report).map_err(Error::from)?;
    report_json["field_file"] = json!("reconstruction.json");
    report_json["relative_error"] = json!(e);
    out.json("report.json", &report_json)?;
    out.metric("relative_error", e);
    out.metric("fit_sigma_min", report.fit_sum.sigma_min);
    out.metric("skipped_nodes", report.skipped_nodes);
    Ok(())
}

fn geometry(cfg: &ExperimentConfig, out: &mut Outcome) -> RunResult<()> {
    let dirs = cfg.direction_list("directions", cfg.directions.as_ref())?;
    let lambdas = cfg.lambda_list()?;
    let mut points = Vec::with_capacity(dirs.len() * lambdas.len());
    for &l in &lambdas {
        let sp = validate_lambda(l, cfg.dim)?;
        for w in &dirs {
            points.push(kappa(w, &sp)?);
        }
    }
    out.text("geometry.csv", io::geometry_csv(&points)?);
    let mut level = 0.0f64;
    let mut normal = 0.0f64;
    for g in &points {
        level = level.max((phi(&g.kappa) - g.lambda).abs());
        let grad = grad_phi(&g.kappa);
        let n = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mis = grad
            .iter()
            .zip(&g.omega)
            .map(|(a, w)| (a / n - w).powi(2))
            .sum::<f64>()
            .sqrt();
        normal = normal.max(mis);
    }
    out.metric("points", points.len());
    out.metric("max_level_residual", level);
    out.metric("max_normal_misalignment", normal);
    Ok(())
}
