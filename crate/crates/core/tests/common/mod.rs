//! Instance builders shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use lattice_helmholtz::born::{born_batch, IncidentWave, ScatteringIntensity};
use lattice_helmholtz::cli::InstanceRng;
use lattice_helmholtz::forward::{far_field_batch, Sign};
use lattice_helmholtz::geometry::{circle_directions, linspace, validate_lambda, Direction};
use lattice_helmholtz::lattice::{LatticeField, Point, SupportDomain};
use lattice_helmholtz::phase::{GeometryMode, IntensitySample, SupportGeometry};
use lattice_helmholtz::window::SpectralWindow;
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pt(x: &[i64]) -> Point {
    Point::new(x).unwrap()
}

pub fn delta(dim: usize, x: &[i64]) -> LatticeField {
    LatticeField::delta(dim, pt(x), c(1.0, 0.0)).unwrap()
}

pub fn random_field(rng: &mut InstanceRng, domain: &SupportDomain) -> LatticeField {
    rng.field(domain)
}

pub fn relative_error(got: &LatticeField, want: &LatticeField) -> f64 {
    got.diff_l2(want) / want.norm_l2()
}

/// `n_dirs` directions times `n_lambda` values of `lambda` in `[lo, hi]`.
pub fn band_window(n_dirs: usize, lo: f64, hi: f64, n_lambda: usize) -> SpectralWindow {
    SpectralWindow::product(&circle_directions(n_dirs, 0.0), &linspace(lo, hi, n_lambda)).unwrap()
}

/// `|a(f)|^2` on `window` for each listed branch.
pub fn far_intensities(f: &LatticeField, window: &SpectralWindow, signs: &[Sign]) -> Vec<IntensitySample> {
    signs
        .iter()
        .flat_map(|&s| far_field_batch(f, window, s).unwrap())
        .map(|s| IntensitySample {
            omega: s.omega,
            lambda: s.lambda,
            sign: s.sign,
            value: s.value.norm_sqr(),
        })
        .collect()
}

/// Background `delta_0` and a two-point source along the first axis
/// starting at `(gap, 0)`.
pub fn two_point_setup(gap: i64, mode: GeometryMode) -> SupportGeometry {
    let d = SupportDomain::box_domain(&[gap, 0], &[gap + 1, 0]).unwrap();
    let d0 = SupportDomain::singleton(2, Point::origin()).unwrap();
    SupportGeometry::new(d, d0, mode).unwrap()
}

pub fn incidents(n: usize, lambda: f64, phase: f64) -> Vec<IncidentWave> {
    let sp = validate_lambda(lambda, 2).unwrap();
    circle_directions(n, phase)
        .iter()
        .map(|t| IncidentWave::from_direction(t, &sp).unwrap())
        .collect()
}

pub fn born_intensities(v: &LatticeField, incs: &[IncidentWave], omegas: &[Direction]) -> Vec<ScatteringIntensity> {
    born_batch(v, incs, omegas)
        .unwrap()
        .into_iter()
        .map(|s| ScatteringIntensity {
            k: s.k,
            lambda: s.lambda,
            omega: s.omega,
            value: s.value.norm_sqr(),
        })
        .collect()
}

/// One small config per subcommand, without `output_dir`.
pub fn cli_configs() -> Vec<(&'static str, serde_json::Value)> {
    use serde_json::json;
    let random_box = json!({"kind": "random", "domain": {"lo": [0, 0], "hi": [1, 1]}});
    let pair = json!({"kind": "random", "domain": {"lo": [6, 0], "hi": [7, 0]}});
    let origin = json!({"kind": "delta", "at": [0, 0]});
    vec![
        ("forward", json!({
            "dim": 2, "seed": 3, "lambda": 1.5, "sign": "+",
            "directions": {"count": 16, "phase": 0.1},
            "source": random_box, "targets": [[0, 0], [3, 1]],
        })),
        ("asympt", json!({
            "dim": 2, "lambda": 2.0, "source": origin,
            "asympt": {"base": [1, 0], "radii": [20, 40, 80]},
        })),
        ("invert", json!({
            "dim": 2, "seed": 4, "band": {"lo": 1.0, "hi": 3.0, "count": 4},
            "directions": {"count": 32}, "source": random_box,
            "domain": {"lo": [0, 0], "hi": [1, 1]},
        })),
        ("nonuniq", json!({
            "dim": 2, "seed": 5, "source": random_box,
            "nonuniq": {"roots": [2.0], "n_dirs": 256},
        })),
        ("phaseless", json!({
            "dim": 2, "seed": 6, "band": {"lo": 1.5, "hi": 2.5, "count": 6},
            "directions": {"count": 48}, "source": pair, "background": origin,
            "domain": {"lo": [6, 0], "hi": [7, 0]}, "background_domain": {"points": [[0, 0]]},
            "phaseless": {"mode": "far_apart"},
        })),
        ("born-forward", json!({
            "dim": 2, "seed": 7, "lambda": 2.0, "directions": {"count": 8},
            "source": {"kind": "random", "domain": {"lo": [0, 0], "hi": [1, 0]}},
            "born": {"incidents": {"count": 3}, "exact": true},
        })),
        ("born-invert", json!({
            "dim": 2, "seed": 8, "lambda": 2.0, "directions": {"count": 16},
            "source": random_box, "domain": {"lo": [0, 0], "hi": [1, 1]},
            "born": {"incidents": {"count": 8, "phase": 0.05}},
        })),
        ("born-phaseless", json!({
            "dim": 2, "seed": 9, "lambda": 2.0, "directions": {"count": 24, "phase": 0.05},
            "source": {"kind": "random", "domain": {"lo": [2, 0], "hi": [3, 0]}}, "background": origin,
            "domain": {"lo": [2, 0], "hi": [3, 0]}, "background_domain": {"points": [[0, 0]]},
            "phaseless": {"mode": "disjoint"}, "born": {"incidents": {"count": 24}},
        })),
        ("geometry", json!({
            "dim": 3, "lambdas": [3.0, -4.5], "directions": {"count": 20},
        })),
    ]
}

/// Writes `config` (with `schema_version` and `output_dir` filled in) to `dir`.
pub fn write_config(dir: &std::path::Path, name: &str, config: &serde_json::Value, out: &str) -> std::path::PathBuf {
    let mut cfg = config.clone();
    cfg["schema_version"] = 1.into();
    cfg["output_dir"] = out.into();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

/// Artifact names and bytes in an output directory, excluding timings.
pub fn artifacts(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timings.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}
