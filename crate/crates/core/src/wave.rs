//! Unified wave terms `c·e^{2πi a·x}·e^{2πi r‖x‖}` and finite superpositions
//! of them.
//!
//! A term with `radial = 0` is a plane wave, a term with `plane = 0` is a
//! spherical wave centred at the origin, and a term with both nonzero is a
//! spherical wave whose diffraction sphere is shifted to `plane`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Frequencies closer than this (componentwise) are treated as equal.
pub const MERGE_TOL: f64 = 1e-12;
/// Merged coefficients smaller than this in magnitude are dropped.
pub const DROP_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveTerm {
    pub coeff: Complex64,
    pub plane: Vec<f64>,
    pub radial: f64,
}

impl WaveTerm {
    pub fn new(coeff: Complex64, plane: Vec<f64>, radial: f64) -> Self {
        WaveTerm {
            coeff,
            plane,
            radial,
        }
    }

    pub fn plane_wave(coeff: Complex64, plane: Vec<f64>) -> Self {
        WaveTerm::new(coeff, plane, 0.0)
    }

    pub fn spherical(coeff: Complex64, dimension: usize, radial: f64) -> Self {
        WaveTerm::new(coeff, vec![0.0; dimension], radial)
    }

    /// Highest spatial frequency of the term, in cycles per unit length.
    pub fn frequency(&self) -> f64 {
        norm(&self.plane) + self.radial.abs()
    }

    pub fn plane_norm(&self) -> f64 {
        norm(&self.plane)
    }

    /// True when `(plane, radial)` agree with `other` within [`MERGE_TOL`].
    pub fn same_frequency(&self, other: &WaveTerm) -> bool {
        (self.radial - other.radial).abs() <= MERGE_TOL
            && self.plane.len() == other.plane.len()
            && self
                .plane
                .iter()
                .zip(&other.plane)
                .all(|(a, b)| (a - b).abs() <= MERGE_TOL)
    }

    pub fn is_plane(&self) -> bool {
        self.radial.abs() <= MERGE_TOL
    }

    pub fn is_centred(&self) -> bool {
        self.plane.iter().all(|a| a.abs() <= MERGE_TOL)
    }

    #[inline]
    pub(crate) fn eval_at(&self, x: &[f64], r: f64) -> Complex64 {
        let phase = dot(&self.plane, x) + self.radial * r;
        self.coeff * Complex64::cis(TAU * phase)
    }
}

/// A finite, canonically merged superposition of wave terms in dimension `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveSpec {
    dimension: usize,
    terms: Vec<WaveTerm>,
}

impl WaveSpec {
    /// Validates the terms and merges those sharing a `(plane, radial)` pair.
    pub fn new(dimension: usize, terms: Vec<WaveTerm>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            check_dim(dimension, t.plane.len())?;
            let finite = t.coeff.re.is_finite()
                && t.coeff.im.is_finite()
                && t.radial.is_finite()
                && t.plane.iter().all(|a| a.is_finite());
            if !finite {
                return Err(Error::Input(format!("term {i} has a non-finite entry")));
            }
        }
        Ok(WaveSpec {
            dimension,
            terms: merge_terms(terms),
        })
    }

    /// The zero function.
    pub fn zero(dimension: usize) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        WaveSpec {
            dimension,
            terms: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[WaveTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_m c_m·e^{2πi a_m·x}·e^{2πi r_m‖x‖}`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.dimension, x.len())?;
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Complex64 {
        let r = norm(x);
        self.terms.iter().map(|t| t.eval_at(x, r)).sum()
    }

    /// `f(s - shift)` without allocating the difference.
    #[inline]
    pub(crate) fn eval_shifted(&self, s: &[f64], shift: &[f64]) -> Complex64 {
        let r = s
            .iter()
            .zip(shift)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        self.terms
            .iter()
            .map(|t| {
                let phase = s
                    .iter()
                    .zip(shift)
                    .zip(&t.plane)
                    .map(|((a, b), p)| (a - b) * p)
                    .sum::<f64>()
                    + t.radial * r;
                t.coeff * Complex64::cis(TAU * phase)
            })
            .sum()
    }

    /// The spec of `x ↦ conj(f(−x))`.
    pub fn conjugate_reflect(&self) -> WaveSpec {
        let terms = self
            .terms
            .iter()
            .map(|t| WaveTerm::new(t.coeff.conj(), t.plane.clone(), -t.radial))
            .collect();
        WaveSpec {
            dimension: self.dimension,
            terms: merge_terms(terms),
        }
    }

    /// `α·self + β·other`, merged.
    pub fn linear_combination(
        &self,
        alpha: Complex64,
        other: &WaveSpec,
        beta: Complex64,
    ) -> Result<WaveSpec> {
        check_dim(self.dimension, other.dimension)?;
        let scaled = |s: &WaveSpec, k: Complex64| {
            s.terms
                .iter()
                .map(move |t| WaveTerm::new(t.coeff * k, t.plane.clone(), t.radial))
                .collect::<Vec<_>>()
        };
        let mut terms = scaled(self, alpha);
        terms.extend(scaled(other, beta));
        WaveSpec::new(self.dimension, terms)
    }

    pub fn difference(&self, other: &WaveSpec) -> Result<WaveSpec> {
        self.linear_combination(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// Σ|c_m|², the squared Besicovitch 2-seminorm of the superposition.
    pub fn parseval_norm_sqr(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm_sqr()).sum()
    }

    /// Σ|c_m|, a pointwise upper bound on |f|.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Largest `‖a‖ + |r|` over the terms (0 for the empty spec).
    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(WaveTerm::frequency).fold(0.0, f64::max)
    }

    pub fn max_plane_norm(&self) -> f64 {
        self.terms.iter().map(WaveTerm::plane_norm).fold(0.0, f64::max)
    }

    pub fn max_radial(&self) -> f64 {
        self.terms.iter().map(|t| t.radial.abs()).fold(0.0, f64::max)
    }

    pub fn is_radial(&self) -> bool {
        self.terms.iter().all(WaveTerm::is_centred)
    }

    /// The one-dimensional profile `s ↦ Σ c_m e^{2πi r_m s}` of a radial spec.
    pub fn radial_profile(&self) -> Result<RadialProfile> {
        if !self.is_radial() {
            return Err(Error::NotRadial);
        }
        Ok(RadialProfile {
            terms: self.terms.iter().map(|t| (t.coeff, t.radial)).collect(),
        })
    }
}

/// A finite sum `s ↦ Σ c_m e^{2πi r_m s}` on the half line.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub terms: Vec<(Complex64, f64)>,
}

impl RadialProfile {
    pub fn new(terms: Vec<(Complex64, f64)>) -> Self {
        RadialProfile { terms }
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(c, r)| c * Complex64::cis(TAU * r * s))
            .sum()
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.1.abs()).fold(0.0, f64::max)
    }

    /// The rotation-invariant function `x ↦ f(‖x‖)` on `R^d`.
    pub fn lift(&self, dimension: usize) -> Result<WaveSpec> {
        let terms = self
            .terms
            .iter()
            .map(|&(c, r)| WaveTerm::spherical(c, dimension, r))
            .collect();
        WaveSpec::new(dimension, terms)
    }

    /// The even extension `x ↦ f(|x|)` as a one-dimensional spec.
    pub fn even_extension(&self) -> Result<WaveSpec> {
        self.lift(1)
    }
}

fn merge_terms(terms: Vec<WaveTerm>) -> Vec<WaveTerm> {
    let mut merged: Vec<WaveTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match merged.iter_mut().find(|m| m.same_frequency(&t)) {
            Some(m) => m.coeff += t.coeff,
            None => merged.push(t),
        }
    }
    merged.retain(|t| t.coeff.norm() >= DROP_TOL);
    merged
}

#[inline]
pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}
