//! JSON file formats for specs, measures and reports, and the small text
//! formats used on the command line.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::averaging::{AveragingConfig, ConvergenceReport};
use crate::closed_form::ClosedAutocorrelation;
use crate::error::{Error, Result};
use crate::measure::{DiffractionMeasure, SphericalComponent};
use crate::wave::{WaveSpec, WaveTerm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub re: f64,
    pub im: f64,
    pub plane: Vec<f64>,
    pub radial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpecFile {
    pub dimension: usize,
    pub terms: Vec<TermFile>,
}

impl From<&WaveSpec> for WaveSpecFile {
    fn from(spec: &WaveSpec) -> Self {
        WaveSpecFile {
            dimension: spec.dimension(),
            terms: spec
                .terms()
                .iter()
                .map(|t| TermFile {
                    re: t.coeff.re,
                    im: t.coeff.im,
                    plane: t.plane.clone(),
                    radial: t.radial,
                })
                .collect(),
        }
    }
}

impl WaveSpecFile {
    pub fn into_spec(self) -> Result<WaveSpec> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.plane.len() != d {
                return Err(Error::Input(format!(
                    "term {i}: plane has {} entries, dimension is {d}",
                    t.plane.len()
                )));
            }
        }
        let terms = self
            .terms
            .into_iter()
            .map(|t| WaveTerm::new(Complex64::new(t.re, t.im), t.plane, t.radial))
            .collect();
        WaveSpec::new(d, terms)
    }
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    // serde_json already reports "at line L column C".
    Error::Parse(format!("{what}: {e}"))
}

pub fn parse_wave_spec(text: &str) -> Result<WaveSpec> {
    let file: WaveSpecFile = serde_json::from_str(text).map_err(|e| json_error("wave spec", e))?;
    file.into_spec()
}

pub fn wave_spec_to_json(spec: &WaveSpec) -> String {
    serde_json::to_string_pretty(&WaveSpecFile::from(spec)).expect("plain data serialises")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub dimension: usize,
    pub components: Vec<SphericalComponent>,
}

impl From<&DiffractionMeasure> for MeasureFile {
    fn from(mu: &DiffractionMeasure) -> Self {
        MeasureFile {
            dimension: mu.dimension(),
            components: mu.components().to_vec(),
        }
    }
}

pub fn parse_measure(text: &str) -> Result<DiffractionMeasure> {
    let file: MeasureFile = serde_json::from_str(text).map_err(|e| json_error("measure", e))?;
    DiffractionMeasure::new(file.dimension, file.components)
}

pub fn measure_to_json(mu: &DiffractionMeasure) -> String {
    serde_json::to_string_pretty(&MeasureFile::from(mu)).expect("plain data serialises")
}

fn parse_float(tok: &str, what: &str) -> Result<f64> {
    let tok = tok.trim();
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: {tok:?} is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("{what}: {tok:?} is not finite")))
    }
}

/// Parses a comma-separated, strictly increasing list of positive radii.
pub fn parse_radii(text: &str) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(Error::Parse("radius list is empty".into()));
    }
    let radii = text
        .split(',')
        .enumerate()
        .map(|(i, tok)| parse_float(tok, &format!("radius {i}")))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(i) = radii.iter().position(|&r| r <= 0.0) {
        return Err(Error::Parse(format!("radius {i} must be positive")));
    }
    if let Some(i) = radii.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Parse(format!("radius {} is not larger than the one before it", i + 1)));
    }
    Ok(radii)
}

/// Parses points written as `x,y;x,y;…`, each of dimension `d`.
pub fn parse_points(text: &str, d: usize) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .enumerate()
        .map(|(i, p)| {
            let coords = p
                .split(',')
                .map(|tok| parse_float(tok, &format!("point {i}")))
                .collect::<Result<Vec<f64>>>()?;
            if coords.len() != d {
                return Err(Error::Parse(format!("point {i} has {} coordinates, expected {d}", coords.len())));
            }
            Ok(coords)
        })
        .collect()
}

/// Parses `xmin,ymin,xmax,ymax`.
pub fn parse_window(text: &str) -> Result<([f64; 2], [f64; 2])> {
    let v = text
        .split(',')
        .map(|tok| parse_float(tok, "window"))
        .collect::<Result<Vec<f64>>>()?;
    match v[..] {
        [a, b, c, d] => Ok(([a, b], [c, d])),
        _ => Err(Error::Parse(format!("window needs 4 numbers, got {}", v.len()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceJson {
    pub radii: Vec<f64>,
    pub values: Vec<ComplexJson>,
    pub extrapolated: ComplexJson,
    /// Absent when the schedule has a single radius.
    pub error_estimate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<Vec<ComplexJson>>,
}

impl ConvergenceJson {
    pub fn new(radii: &[f64], rep: &ConvergenceReport) -> Self {
        ConvergenceJson {
            radii: radii.to_vec(),
            values: rep.values.iter().map(|&v| v.into()).collect(),
            extrapolated: rep.extrapolated.into(),
            error_estimate: rep.error_estimate.is_finite().then_some(rep.error_estimate),
            std_errors: rep
                .std_errors
                .as_ref()
                .map(|s| s.iter().map(|&(re, im)| ComplexJson { re, im }).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrTermJson {
    pub weight: f64,
    pub plane: Vec<f64>,
    pub radial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<ComplexJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<ConvergenceJson>,
    /// `|numeric − closed|` at the largest radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffractionSummary {
    pub components: Vec<SphericalComponent>,
    pub total_mass: f64,
    pub radially_concentrated: Vec<SphericalComponent>,
    pub radially_dispersed: Vec<SphericalComponent>,
}

impl From<&DiffractionMeasure> for DiffractionSummary {
    fn from(mu: &DiffractionMeasure) -> Self {
        let (rc, rd) = mu.radial_decompose();
        DiffractionSummary {
            components: mu.components().to_vec(),
            total_mass: mu.total_mass(),
            radially_concentrated: rc.components().to_vec(),
            radially_dispersed: rd.components().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageSummary {
    pub path: String,
    pub width: usize,
    pub height: usize,
    pub window_min: [f64; 2],
    pub window_max: [f64; 2],
    pub sigma: f64,
    pub gamma: f64,
    pub normalize: bool,
    pub max_intensity: f64,
    pub mean_intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: u32,
    pub name: String,
    #[serde(deserialize_with = "null_as_nan")]
    pub measured: f64,
    #[serde(deserialize_with = "null_as_nan")]
    pub bound: f64,
    #[serde(deserialize_with = "null_as_nan")]
    pub margin: f64,
    pub passed: bool,
    /// Omitted from reports that must be reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_s: Option<f64>,
    pub detail: String,
}

/// JSON has no NaN; failed checks serialize their numbers as null.
fn null_as_nan<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::NAN))
}

/// The JSON document every subcommand prints.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub arguments: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<AveragingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub autocorrelation: Option<Vec<AutocorrTermJson>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffraction: Option<DiffractionSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seminorm: Option<ConvergenceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parseval_norm_sqr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<ImageSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: &str, arguments: Vec<String>) -> Self {
        ReportDocument {
            command: command.to_string(),
            arguments,
            ..Default::default()
        }
    }

    pub fn set_autocorrelation(&mut self, eta: &ClosedAutocorrelation) {
        self.autocorrelation = Some(
            eta.terms()
                .iter()
                .map(|t| AutocorrTermJson {
                    weight: t.weight,
                    plane: t.plane.clone(),
                    radial: t.radial,
                })
                .collect(),
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| json_error("report", e))
    }
}
