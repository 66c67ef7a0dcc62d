//! Exact autocorrelations and diffraction measures of wave superpositions,
//! and the inverse construction of a superposition from diffraction data and
//! phases.
//!
//! Distinct merged terms are orthogonal for the mean inner product, so the
//! autocorrelation is the sum of the single-term ones: a term
//! `c·e^{2πi a·x}·e^{2πi r‖x‖}` contributes `|c|²·e^{2πi a·x}·K_d(r, ‖x‖)` and
//! a sphere of radius `|r|` around `a` with mass `|c|²` to the diffraction.
//!
//! In one dimension a plane wave and a spherical wave need not be orthogonal
//! (`e^{2πi|x|}` and `cos(2πx)` have the same autocorrelation), so specs
//! mixing the two kinds are refused there.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::measure::{DiffractionMeasure, SphericalComponent};
use crate::special::sphere_kernel;
use crate::wave::{dot, norm, WaveSpec, WaveTerm};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutocorrTerm {
    pub weight: f64,
    pub plane: Vec<f64>,
    pub radial: f64,
}

impl AutocorrTerm {
    /// Highest frequency present, `‖plane‖ + |radial|`.
    pub fn frequency(&self) -> f64 {
        norm(&self.plane) + self.radial.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedAutocorrelation {
    dimension: usize,
    terms: Vec<AutocorrTerm>,
}

impl ClosedAutocorrelation {
    pub fn new(dimension: usize, terms: Vec<AutocorrTerm>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        for t in &terms {
            check_dim(dimension, t.plane.len())?;
            if !(t.weight.is_finite() && t.weight > 0.0) {
                return Err(Error::Input(format!("weight {} must be positive", t.weight)));
            }
        }
        Ok(ClosedAutocorrelation { dimension, terms })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[AutocorrTerm] {
        &self.terms
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(AutocorrTerm::frequency).fold(0.0, f64::max)
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Complex64 {
        let s = norm(x);
        self.terms
            .iter()
            .map(|t| {
                t.weight
                    * sphere_kernel(self.dimension, t.radial, s)
                    * Complex64::cis(std::f64::consts::TAU * dot(&t.plane, x))
            })
            .sum()
    }
}

/// Refuses one-dimensional specs that mix plane and spherical terms.
fn check_closed_form_licensed(spec: &WaveSpec) -> Result<()> {
    if spec.dimension() != 1 {
        return Ok(());
    }
    let terms = spec.terms();
    if terms.iter().all(WaveTerm::is_plane) || terms.iter().all(WaveTerm::is_centred) {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "no closed form for one-dimensional superpositions of plane and spherical waves".into(),
        ))
    }
}

pub fn autocorrelation(spec: &WaveSpec) -> Result<ClosedAutocorrelation> {
    check_closed_form_licensed(spec)?;
    let terms = spec
        .terms()
        .iter()
        .map(|t| AutocorrTerm {
            weight: t.coeff.norm_sqr(),
            plane: t.plane.clone(),
            radial: t.radial,
        })
        .collect();
    ClosedAutocorrelation::new(spec.dimension(), terms)
}

/// `Σ weight·e^{2πi plane·x}·K_d(radial, ‖x‖)`.
pub fn evaluate_autocorr(eta: &ClosedAutocorrelation, x: &[f64]) -> Result<Complex64> {
    check_dim(eta.dimension, x.len())?;
    Ok(eta.eval_unchecked(x))
}

pub fn diffraction(spec: &WaveSpec) -> Result<DiffractionMeasure> {
    check_closed_form_licensed(spec)?;
    let comps = spec
        .terms()
        .iter()
        .map(|t| SphericalComponent::sphere(t.plane.clone(), t.radial.abs(), t.coeff.norm_sqr()))
        .collect();
    DiffractionMeasure::new(spec.dimension(), comps)
}

/// Uniform bound on `|η_f − η_g|` from the 2-seminorms alone:
/// `‖f−g‖·(‖f−g‖ + 2‖f‖)`.
///
/// The bound is attained at the origin when `f = 0`, so the result is nudged
/// up by a few ulps to dominate the rounding in evaluated autocorrelations.
pub fn autocorr_stability_bound(f: &WaveSpec, g: &WaveSpec) -> Result<f64> {
    check_dim(f.dimension(), g.dimension())?;
    check_closed_form_licensed(f)?;
    check_closed_form_licensed(g)?;
    let diff_sqr = f.difference(g)?.parseval_norm_sqr();
    let nf = f.parseval_norm_sqr().sqrt();
    let bound = diff_sqr + 2.0 * diff_sqr.sqrt() * nf;
    Ok(bound * (1.0 + 16.0 * f64::EPSILON))
}

const PHASE_TOL: f64 = 1e-12;

/// Builds a superposition whose diffraction is `mu`, with the given phase per
/// component.
///
/// In `real_mode` every component must be an origin-centred sphere and every
/// phase `±1`; each component of mass `C` becomes the real radial function
/// `ξ·√(2C)·cos(2πρ‖x‖)`, stored as two terms at radial `±ρ`.
pub fn synthesize_from_diffraction(
    mu: &DiffractionMeasure,
    phases: &[Complex64],
    real_mode: bool,
) -> Result<WaveSpec> {
    let comps = mu.components();
    if phases.len() != comps.len() {
        return Err(Error::Input(format!(
            "{} phases for {} components",
            phases.len(),
            comps.len()
        )));
    }
    let d = mu.dimension();
    let mut terms = Vec::with_capacity(if real_mode { 2 * comps.len() } else { comps.len() });
    for (i, (c, &xi)) in comps.iter().zip(phases).enumerate() {
        if (xi.norm() - 1.0).abs() > PHASE_TOL {
            return Err(Error::Input(format!("phase {i} is not of unit modulus")));
        }
        if !real_mode {
            terms.push(WaveTerm::new(xi * c.mass.sqrt(), c.center.clone(), c.radius));
            continue;
        }
        if c.is_point() || !c.is_centred() {
            return Err(Error::Input(format!(
                "real mode needs origin-centred spheres, component {i} is not one"
            )));
        }
        if xi.im.abs() > PHASE_TOL {
            return Err(Error::Input(format!("real mode needs phases ±1, phase {i} is {xi}")));
        }
        let half = xi.re.signum() * (2.0 * c.mass).sqrt() / 2.0;
        terms.push(WaveTerm::spherical(Complex64::new(half, 0.0), d, c.radius));
        terms.push(WaveTerm::spherical(Complex64::new(half, 0.0), d, -c.radius));
    }
    WaveSpec::new(d, terms)
}
