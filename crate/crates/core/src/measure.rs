//! Finite sums of weighted point masses and uniform sphere measures.
//!
//! This is the class every diffraction measure produced by
//! [`crate::closed_form::diffraction`] lives in. A component with radius 0 is
//! the point mass `mass·δ_center`; a positive radius is `mass` times the
//! uniform probability measure on the sphere of that radius around `center`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::special::sphere_kernel;
use crate::wave::{dot, norm, MERGE_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalComponent {
    pub center: Vec<f64>,
    pub radius: f64,
    pub mass: f64,
}

impl SphericalComponent {
    pub fn point(center: Vec<f64>, mass: f64) -> Self {
        SphericalComponent {
            center,
            radius: 0.0,
            mass,
        }
    }

    pub fn sphere(center: Vec<f64>, radius: f64, mass: f64) -> Self {
        SphericalComponent {
            center,
            radius,
            mass,
        }
    }

    pub fn is_point(&self) -> bool {
        self.radius <= MERGE_TOL
    }

    pub fn is_centred(&self) -> bool {
        self.center.iter().all(|c| c.abs() <= MERGE_TOL)
    }

    fn same_support(&self, other: &SphericalComponent) -> bool {
        (self.radius - other.radius).abs() <= MERGE_TOL
            && self
                .center
                .iter()
                .zip(&other.center)
                .all(|(a, b)| (a - b).abs() <= MERGE_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffractionMeasure {
    dimension: usize,
    components: Vec<SphericalComponent>,
}

impl DiffractionMeasure {
    /// Validates and canonicalises the components.
    ///
    /// In one dimension a sphere of radius `r > 0` is the two-point set
    /// `{c - r, c + r}`, so such components are split into two point masses of
    /// half the mass. Components with a common support are merged.
    pub fn new(dimension: usize, components: Vec<SphericalComponent>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        let mut flat = Vec::with_capacity(components.len());
        for (i, c) in components.into_iter().enumerate() {
            check_dim(dimension, c.center.len())?;
            let finite = c.radius.is_finite() && c.mass.is_finite() && c.center.iter().all(|v| v.is_finite());
            if !finite || c.radius < 0.0 || c.mass <= 0.0 {
                return Err(Error::Input(format!(
                    "component {i} needs finite center, radius >= 0 and mass > 0"
                )));
            }
            if dimension == 1 && !c.is_point() {
                let half = 0.5 * c.mass;
                flat.push(SphericalComponent::point(vec![c.center[0] - c.radius], half));
                flat.push(SphericalComponent::point(vec![c.center[0] + c.radius], half));
            } else if c.is_point() {
                flat.push(SphericalComponent::point(c.center, c.mass));
            } else {
                flat.push(c);
            }
        }
        let mut merged: Vec<SphericalComponent> = Vec::with_capacity(flat.len());
        for c in flat {
            match merged.iter_mut().find(|m| m.same_support(&c)) {
                Some(m) => m.mass += c.mass,
                None => merged.push(c),
            }
        }
        Ok(DiffractionMeasure {
            dimension,
            components: merged,
        })
    }

    pub fn zero(dimension: usize) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        DiffractionMeasure {
            dimension,
            components: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[SphericalComponent] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Sum of two measures, merged.
    pub fn add(&self, other: &DiffractionMeasure) -> Result<DiffractionMeasure> {
        check_dim(self.dimension, other.dimension)?;
        let mut comps = self.components.clone();
        comps.extend(other.components.iter().cloned());
        DiffractionMeasure::new(self.dimension, comps)
    }

    /// `∫ e^{-2πi x·y} dμ(y) = Σ mass·e^{-2πi center·x}·K_d(radius, ‖x‖)`.
    pub fn fourier_at(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(self.dimension, x.len())?;
        let s = norm(x);
        Ok(self
            .components
            .iter()
            .map(|c| {
                let k = if c.is_point() {
                    1.0
                } else {
                    sphere_kernel(self.dimension, c.radius, s)
                };
                c.mass * k * Complex64::cis(-std::f64::consts::TAU * dot(&c.center, x))
            })
            .sum())
    }

    pub fn total_mass(&self) -> f64 {
        self.components.iter().map(|c| c.mass).sum()
    }

    /// Mass carried by the origin-centred sphere of radius `rho`.
    ///
    /// For `d ≥ 2` a sphere with a different centre meets `S_rho` in a set of
    /// lower dimension, which is null for its uniform measure.
    pub fn sphere_mass(&self, rho: f64) -> f64 {
        self.components
            .iter()
            .filter(|c| {
                if c.is_point() {
                    (norm(&c.center) - rho).abs() <= MERGE_TOL
                } else {
                    c.is_centred() && (c.radius - rho).abs() <= MERGE_TOL
                }
            })
            .map(|c| c.mass)
            .sum()
    }

    /// Splits into the radially concentrated part (points and origin-centred
    /// spheres) and the radially dispersed part (off-centre spheres).
    pub fn radial_decompose(&self) -> (DiffractionMeasure, DiffractionMeasure) {
        let (rc, rd): (Vec<_>, Vec<_>) = self
            .components
            .iter()
            .cloned()
            .partition(|c| c.is_point() || c.is_centred());
        (
            DiffractionMeasure {
                dimension: self.dimension,
                components: rc,
            },
            DiffractionMeasure {
                dimension: self.dimension,
                components: rd,
            },
        )
    }

    /// Two measures of this class are mutually singular exactly when no
    /// component of one shares its support with a component of the other.
    pub fn mutually_singular(&self, other: &DiffractionMeasure) -> Result<bool> {
        check_dim(self.dimension, other.dimension)?;
        Ok(!self
            .components
            .iter()
            .any(|a| other.components.iter().any(|b| a.same_support(b))))
    }

    /// Same components up to order and [`MERGE_TOL`], masses within `mass_tol`.
    pub fn approx_eq(&self, other: &DiffractionMeasure, mass_tol: f64) -> bool {
        self.dimension == other.dimension
            && self.components.len() == other.components.len()
            && self.components.iter().all(|a| {
                other
                    .components
                    .iter()
                    .any(|b| a.same_support(b) && (a.mass - b.mass).abs() <= mass_tol)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    use crate::special::{bessel_j_series, BesselEvalConfig};

    fn pt(c: &[f64], m: f64) -> SphericalComponent {
        SphericalComponent::point(c.to_vec(), m)
    }

    fn sph(c: &[f64], r: f64, m: f64) -> SphericalComponent {
        SphericalComponent::sphere(c.to_vec(), r, m)
    }

    #[test]
    fn fourier_examples() {
        let delta = DiffractionMeasure::new(2, vec![pt(&[0.0, 0.0], 1.0)]).unwrap();
        assert_eq!(delta.fourier_at(&[3.0, -1.0]).unwrap(), Complex64::new(1.0, 0.0));

        let theta = DiffractionMeasure::new(2, vec![sph(&[0.0, 0.0], 0.7, 1.0)]).unwrap();
        assert_eq!(theta.fourier_at(&[0.0, 0.0]).unwrap(), Complex64::new(1.0, 0.0));
        let x = [0.6, -0.9];
        let j0 = bessel_j_series(0.0, TAU * 0.7 * norm(&x), &BesselEvalConfig::default()).unwrap();
        assert!((theta.fourier_at(&x).unwrap() - j0).norm() < 1e-13);
    }

    #[test]
    fn invalid_components_are_rejected() {
        assert!(DiffractionMeasure::new(2, vec![pt(&[0.0, 0.0], 0.0)]).is_err());
        assert!(DiffractionMeasure::new(2, vec![sph(&[0.0, 0.0], -1.0, 1.0)]).is_err());
        assert!(matches!(
            DiffractionMeasure::new(2, vec![pt(&[0.0], 1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn one_dimensional_spheres_become_point_pairs() {
        let mu = DiffractionMeasure::new(1, vec![sph(&[0.5], 2.0, 3.0)]).unwrap();
        assert_eq!(mu.components(), &[pt(&[-1.5], 1.5), pt(&[2.5], 1.5)]);
        assert_eq!(mu.sphere_mass(1.5), 1.5);
        assert_eq!(mu.sphere_mass(2.5), 1.5);
    }

    #[test]
    fn lattice_patch_sphere_mass() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        let mu = DiffractionMeasure::new(2, pts.iter().map(|p| pt(p, 1.0)).collect()).unwrap();
        assert_eq!(mu.sphere_mass(1.0), 4.0);
        assert_eq!(mu.sphere_mass(0.0), 1.0);
        assert_eq!(mu.sphere_mass(0.5), 0.0);
    }

    #[test]
    fn centred_and_off_centre_sphere_mass() {
        let mu = DiffractionMeasure::new(2, vec![sph(&[0.0, 0.0], 2.0, 3.0)]).unwrap();
        assert_eq!(mu.sphere_mass(2.0), 3.0);
        let off = DiffractionMeasure::new(2, vec![sph(&[5.0, 0.0], 1.0, 1.0)]).unwrap();
        for i in 0..200 {
            assert_eq!(off.sphere_mass(0.05 * i as f64), 0.0);
        }
        assert_eq!(off.sphere_mass(1.0), 0.0);
    }

    #[test]
    fn decomposition_examples() {
        let mu = DiffractionMeasure::new(2, vec![sph(&[0.0, 0.0], 1.0, 1.0), pt(&[1.0, 0.0], 1.0)]).unwrap();
        let (rc, rd) = mu.radial_decompose();
        assert_eq!(rc, mu);
        assert!(rd.is_empty());

        let off = DiffractionMeasure::new(2, vec![sph(&[3.0, 0.0], 1.0, 1.0)]).unwrap();
        let (rc, rd) = off.radial_decompose();
        assert!(rc.is_empty());
        assert_eq!(rd, off);

        let (rc, rd) = DiffractionMeasure::zero(3).radial_decompose();
        assert!(rc.is_empty() && rd.is_empty());
    }

    #[test]
    fn singularity_examples() {
        let theta = DiffractionMeasure::new(2, vec![sph(&[0.0, 0.0], 1.0, 1.0)]).unwrap();
        let delta = DiffractionMeasure::new(2, vec![pt(&[1.0, 0.0], 1.0)]).unwrap();
        assert!(theta.mutually_singular(&delta).unwrap());
        assert!(!theta.mutually_singular(&theta).unwrap());
        let moved = DiffractionMeasure::new(2, vec![sph(&[0.5, 0.0], 1.0, 1.0)]).unwrap();
        assert!(theta.mutually_singular(&moved).unwrap());
        assert!(theta.mutually_singular(&DiffractionMeasure::zero(3)).is_err());
    }

    #[test]
    fn merging_adds_masses() {
        let mu = DiffractionMeasure::new(2, vec![sph(&[1.0, 1.0], 2.0, 1.0), sph(&[1.0, 1.0], 2.0 + 1e-14, 0.5)]).unwrap();
        assert_eq!(mu.components().len(), 1);
        assert_eq!(mu.total_mass(), 1.5);
    }

    #[test]
    fn conjugate_symmetry_for_symmetric_sets() {
        let mu = DiffractionMeasure::new(
            2,
            vec![
                pt(&[1.0, 2.0], 0.7),
                pt(&[-1.0, -2.0], 0.7),
                sph(&[0.3, 0.0], 1.0, 2.0),
                sph(&[-0.3, 0.0], 1.0, 2.0),
                sph(&[0.0, 0.0], 2.5, 1.0),
            ],
        )
        .unwrap();
        for i in 0..30 {
            let x = [0.1 * i as f64, 0.3 - 0.05 * i as f64];
            let nx = [-x[0], -x[1]];
            let a = mu.fourier_at(&x).unwrap();
            let b = mu.fourier_at(&nx).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
        assert_eq!(mu.fourier_at(&[0.0, 0.0]).unwrap().re, mu.total_mass());
    }
}
