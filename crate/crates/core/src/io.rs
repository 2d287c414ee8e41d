//! Interchange formats: JSON for fields, spectra and windows, CSV for
//! sampled datasets and diagnostic tables.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::born::{ScatteringIntensity, ScatteringSample};
use crate::error::{Error, Result};
use crate::forward::{AsymptoticRow, FarFieldSample, Sign};
use crate::fourier::{Convention, TorusSpectrum};
use crate::geometry::{Direction, GammaPoint};
use crate::lattice::LatticeField;
use crate::phase::IntensitySample;
use crate::window::SpectralWindow;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub x: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// `{"dim": d, "entries": [{"x": [..], "re": .., "im": ..}, ..]}`, entries in
/// lexicographic order of `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub dim: usize,
    pub entries: Vec<FieldEntry>,
}

impl From<&LatticeField> for FieldFile {
    fn from(f: &LatticeField) -> Self {
        FieldFile {
            dim: f.dim(),
            entries: f
                .iter()
                .map(|(x, v)| FieldEntry {
                    x: x.coords(f.dim()).to_vec(),
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        }
    }
}

impl FieldFile {
    pub fn to_field(&self) -> Result<LatticeField> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            if e.x.len() != self.dim {
                return Err(Error::Format(format!(
                    "entry {:?} has {} coordinates, field has dim {}",
                    e.x,
                    e.x.len(),
                    self.dim
                )));
            }
            entries.push((e.x.clone(), Complex64::new(e.re, e.im)));
        }
        LatticeField::from_entries(self.dim, entries)
    }
}

/// `{"dim", "grid_size", "convention", "values": [[re, im], ..]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub dim: usize,
    pub grid_size: usize,
    pub convention: Convention,
    pub values: Vec<[f64; 2]>,
}

impl From<&TorusSpectrum> for SpectrumFile {
    fn from(s: &TorusSpectrum) -> Self {
        SpectrumFile {
            dim: s.dim(),
            grid_size: s.grid_size(),
            convention: s.convention(),
            values: s.values().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl SpectrumFile {
    pub fn to_spectrum(&self) -> Result<TorusSpectrum> {
        let values = self.values.iter().map(|v| Complex64::new(v[0], v[1])).collect();
        TorusSpectrum::new(self.dim, self.grid_size, self.convention, values)
    }
}

/// `{"directions": [[..]], "lambdas": [..], "weights": [..], "sign": "-"}`.
///
/// The window is the product of `directions` and `lambdas` with `lambda`
/// outermost. `weights`, if present, holds one weight per product sample in
/// that order; otherwise product-cell weights are used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowFile {
    pub directions: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub sign: Sign,
}

impl WindowFile {
    pub fn to_window(&self) -> Result<(SpectralWindow, Sign)> {
        let dirs = self
            .directions
            .iter()
            .map(|d| Direction::new(d.clone()))
            .collect::<Result<Vec<_>>>()?;
        let product = SpectralWindow::product(&dirs, &self.lambdas)?;
        let window = match &self.weights {
            None => product,
            Some(w) => {
                if w.len() != product.len() {
                    return Err(Error::Format(format!(
                        "window has {} weights for {} samples",
                        w.len(),
                        product.len()
                    )));
                }
                SpectralWindow::new(
                    product
                        .samples()
                        .iter()
                        .zip(w)
                        .map(|(s, &w)| (s.omega.clone(), s.lambda(), w))
                        .collect(),
                )?
            }
        };
        Ok((window, self.sign))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_field(path: &Path) -> Result<LatticeField> {
    read_json::<FieldFile>(path)?.to_field()
}

pub fn write_field(path: &Path, f: &LatticeField) -> Result<()> {
    write_json(path, &FieldFile::from(f))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-4, 1e15)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}_{i}"))
}

fn table(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(|e| Error::Format(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

fn nums(v: &[f64]) -> impl Iterator<Item = String> + '_ {
    v.iter().map(|x| fmt_f64(*x))
}

/// Columns `omega_1..omega_d, lambda, sign, re, im`.
pub fn farfield_csv(samples: &[FarFieldSample]) -> Result<String> {
    let d = samples.first().map_or(0, |s| s.omega.dim());
    let mut header: Vec<String> = indexed("omega", d).collect();
    header.extend(["lambda", "sign", "re", "im"].map(String::from));
    table(
        header,
        samples.iter().map(|s| {
            let mut r: Vec<String> = nums(s.omega.as_slice()).collect();
            r.push(fmt_f64(s.lambda));
            r.push(s.sign.symbol().into());
            r.push(fmt_f64(s.value.re));
            r.push(fmt_f64(s.value.im));
            r
        }),
    )
}

/// Columns `radius, psi_re, psi_im, pred_re, pred_im, scaled_residual`,
/// followed by `relative_error` and `quadrature_error`.
pub fn asymptotic_csv(rows: &[AsymptoticRow]) -> Result<String> {
    let header = [
        "radius",
        "psi_re",
        "psi_im",
        "pred_re",
        "pred_im",
        "scaled_residual",
        "relative_error",
        "quadrature_error",
    ]
    .map(String::from)
    .to_vec();
    table(
        header,
        rows.iter().map(|r| {
            nums(&[
                r.radius,
                r.psi.re,
                r.psi.im,
                r.predicted.re,
                r.predicted.im,
                r.scaled_residual,
                r.relative_error,
                r.quadrature_error,
            ])
            .collect()
        }),
    )
}

/// Columns `omega_*, lambda, kappa_*, mu, grad_norm, curvature`.
pub fn geometry_csv(points: &[GammaPoint]) -> Result<String> {
    let d = points.first().map_or(0, |g| g.omega.len());
    let mut header: Vec<String> = indexed("omega", d).collect();
    header.push("lambda".into());
    header.extend(indexed("kappa", d));
    header.extend(["mu", "grad_norm", "curvature"].map(String::from));
    table(
        header,
        points.iter().map(|g| {
            let mut r: Vec<String> = nums(&g.omega).collect();
            r.push(fmt_f64(g.lambda));
            r.extend(nums(&g.kappa));
            r.extend(nums(&[g.mu, g.grad_norm, g.curvature]));
            r
        }),
    )
}

/// Columns `omega_*, lambda, branch, intensity`.
pub fn intensity_csv(samples: &[IntensitySample]) -> Result<String> {
    let d = samples.first().map_or(0, |s| s.omega.dim());
    let mut header: Vec<String> = indexed("omega", d).collect();
    header.extend(["lambda", "branch", "intensity"].map(String::from));
    table(
        header,
        samples.iter().map(|s| {
            let mut r: Vec<String> = nums(s.omega.as_slice()).collect();
            r.push(fmt_f64(s.lambda));
            r.push(s.sign.symbol().into());
            r.push(fmt_f64(s.value));
            r
        }),
    )
}

/// Columns `k_*, omega_*, lambda, re, im`.
pub fn scattering_csv(samples: &[ScatteringSample]) -> Result<String> {
    let d = samples.first().map_or(0, |s| s.k.len());
    let mut header: Vec<String> = indexed("k", d).collect();
    header.extend(indexed("omega", d));
    header.extend(["lambda", "re", "im"].map(String::from));
    table(
        header,
        samples.iter().map(|s| {
            let mut r: Vec<String> = nums(&s.k).collect();
            r.extend(nums(s.omega.as_slice()));
            r.extend(nums(&[s.lambda, s.value.re, s.value.im]));
            r
        }),
    )
}

/// Columns `k_*, omega_*, lambda, intensity`.
pub fn scattering_intensity_csv(samples: &[ScatteringIntensity]) -> Result<String> {
    let d = samples.first().map_or(0, |s| s.k.len());
    let mut header: Vec<String> = indexed("k", d).collect();
    header.extend(indexed("omega", d));
    header.extend(["lambda", "intensity"].map(String::from));
    table(
        header,
        samples.iter().map(|s| {
            let mut r: Vec<String> = nums(&s.k).collect();
            r.extend(nums(s.omega.as_slice()));
            r.extend(nums(&[s.lambda, s.value]));
            r
        }),
    )
}

fn records(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let header = rdr
        .headers()
        .map_err(|e| Error::Format(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for r in rdr.records() {
        let r = r.map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        rows.push(r.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

fn dim_of(header: &[String], prefix: &str) -> usize {
    header.iter().filter(|h| h.starts_with(prefix)).count()
}

fn num(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("not a number: {s:?}")))
}

fn expect_columns(path: &Path, header: &[String], want: &[String]) -> Result<()> {
    if header != want {
        return Err(Error::Format(format!(
            "{}: expected columns {want:?}, found {header:?}",
            path.display()
        )));
    }
    Ok(())
}

pub fn read_farfield_csv(path: &Path) -> Result<Vec<FarFieldSample>> {
    let (header, rows) = records(path)?;
    let d = dim_of(&header, "omega_");
    let mut want: Vec<String> = indexed("omega", d).collect();
    want.extend(["lambda", "sign", "re", "im"].map(String::from));
    expect_columns(path, &header, &want)?;
    rows.iter()
        .map(|r| {
            let omega = r[..d].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
            Ok(FarFieldSample {
                omega: Direction::new(omega)?,
                lambda: num(&r[d])?,
                sign: Sign::parse(r[d + 1].trim())?,
                value: Complex64::new(num(&r[d + 2])?, num(&r[d + 3])?),
            })
        })
        .collect()
}

pub fn read_intensity_csv(path: &Path) -> Result<Vec<IntensitySample>> {
    let (header, rows) = records(path)?;
    let d = dim_of(&header, "omega_");
    let mut want: Vec<String> = indexed("omega", d).collect();
    want.extend(["lambda", "branch", "intensity"].map(String::from));
    expect_columns(path, &header, &want)?;
    rows.iter()
        .map(|r| {
            let omega = r[..d].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
            Ok(IntensitySample {
                omega: Direction::new(omega)?,
                lambda: num(&r[d])?,
                sign: Sign::parse(r[d + 1].trim())?,
                value: num(&r[d + 2])?,
            })
        })
        .collect()
}

pub fn read_scattering_csv(path: &Path) -> Result<Vec<ScatteringSample>> {
    let (header, rows) = records(path)?;
    let d = dim_of(&header, "k_");
    let mut want: Vec<String> = indexed("k", d).collect();
    want.extend(indexed("omega", d));
    want.extend(["lambda", "re", "im"].map(String::from));
    expect_columns(path, &header, &want)?;
    rows.iter()
        .map(|r| {
            let v = r.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
            Ok(ScatteringSample {
                k: v[..d].to_vec(),
                omega: Direction::new(v[d..2 * d].to_vec())?,
                lambda: v[2 * d],
                value: Complex64::new(v[2 * d + 1], v[2 * d + 2]),
            })
        })
        .collect()
}

pub fn read_scattering_intensity_csv(path: &Path) -> Result<Vec<ScatteringIntensity>> {
    let (header, rows) = records(path)?;
    let d = dim_of(&header, "k_");
    let mut want: Vec<String> = indexed("k", d).collect();
    want.extend(indexed("omega", d));
    want.extend(["lambda", "intensity"].map(String::from));
    expect_columns(path, &header, &want)?;
    rows.iter()
        .map(|r| {
            let v = r.iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
            Ok(ScatteringIntensity {
                k: v[..d].to_vec(),
                omega: Direction::new(v[d..2 * d].to_vec())?,
                lambda: v[2 * d],
                value: v[2 * d + 1],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::far_field_batch;
    use crate::fourier::dft;
    use crate::geometry::circle_directions;

    fn sample_field() -> LatticeField {
        LatticeField::from_entries(
            2,
            [
                (vec![0, 1], Complex64::new(0.1, -2.5)),
                (vec![-3, 2], Complex64::new(1e-20, 7.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn field_json_round_trip() {
        let f = sample_field();
        let text = to_json(&FieldFile::from(&f)).unwrap();
        let back: FieldFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_field().unwrap(), f);
        assert!(text.contains("\"entries\""));
        let bad = r#"{"dim": 2, "entries": [{"x": [1], "re": 0, "im": 0}]}"#;
        let bad: FieldFile = serde_json::from_str(bad).unwrap();
        assert!(matches!(bad.to_field(), Err(Error::Format(_))));
    }

    #[test]
    fn spectrum_json_round_trip() {
        let s = dft(&sample_field(), 8, Convention::CenteredAtO).unwrap();
        let text = to_json(&SpectrumFile::from(&s)).unwrap();
        let back: SpectrumFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_spectrum().unwrap(), s);
    }

    #[test]
    fn window_json_defaults_and_weights() {
        let text = r#"{"directions": [[1, 0], [0, 1]], "lambdas": [1.5, 2.0]}"#;
        let wf: WindowFile = serde_json::from_str(text).unwrap();
        let (w, sign) = wf.to_window().unwrap();
        assert_eq!(sign, Sign::Minus);
        assert_eq!(w.len(), 4);
        let mut wf = wf;
        wf.weights = Some(vec![1.0, 2.0, 3.0]);
        assert!(wf.to_window().is_err());
        wf.weights = Some(vec![1.0, 2.0, 3.0, 4.0]);
        let (w, _) = wf.to_window().unwrap();
        assert_eq!(w.samples()[3].weight, 4.0);
    }

    #[test]
    fn farfield_csv_round_trip() {
        let dirs = circle_directions(5, 0.2);
        let w = SpectralWindow::product(&dirs, &[1.0, -2.5]).unwrap();
        let data = far_field_batch(&sample_field(), &w, Sign::Plus).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ff.csv");
        write_text(&p, &farfield_csv(&data).unwrap()).unwrap();
        assert_eq!(read_farfield_csv(&p).unwrap(), data);
        let first = fs::read_to_string(&p).unwrap();
        assert!(first.starts_with("omega_1,omega_2,lambda,sign,re,im\n"));
    }

    #[test]
    fn float_format_is_round_trip() {
        for v in [0.0, 1.0, -0.1, 1e-20, 6.02e23, 0.30000000000000004, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1e-20), "1e-20");
        assert_eq!(fmt_f64(2.5), "2.5");
    }
}
