//! Named example specs and the fixed corpora used by the verification
//! harness and the tests.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{DiffractionMeasure, SphericalComponent};
use crate::wave::{WaveSpec, WaveTerm};

pub const BUILTIN_NAMES: [&str; 3] = ["surprised", "olympic", "pinwheel-none"];

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `e^{2πi‖x‖} + e^{6πi‖x‖} + (1 + e^{4√2πi x₁})·e^{−2√2πi(x₁ − x₂)}`:
/// two centred rings and two spots.
pub fn surprised() -> WaveSpec {
    WaveSpec::new(
        2,
        vec![
            WaveTerm::spherical(one(), 2, 1.0),
            WaveTerm::spherical(one(), 2, 3.0),
            WaveTerm::plane_wave(one(), vec![-SQRT_2, SQRT_2]),
            WaveTerm::plane_wave(one(), vec![SQRT_2, SQRT_2]),
        ],
    )
    .expect("valid builtin")
}

/// `(1 + 2cos(4πx₁) + (1 + e^{4πi x₁})·e^{−2πi(x₁ + x₂)})·e^{4πi‖x‖}`: five
/// rings of radius 2 in the familiar interlocking layout.
pub fn olympic() -> WaveSpec {
    let ring = |a: [f64; 2]| WaveTerm::new(one(), a.to_vec(), 2.0);
    WaveSpec::new(
        2,
        vec![
            ring([0.0, 0.0]),
            ring([2.0, 0.0]),
            ring([-2.0, 0.0]),
            ring([-1.0, -1.0]),
            ring([1.0, -1.0]),
        ],
    )
    .expect("valid builtin")
}

/// Looks up a builtin by name.
///
/// `pinwheel-none` stands for the pinwheel tiling, whose circular diffraction
/// has no known representation as a finite wave superposition; asking for it
/// is an unsupported request rather than a missing name.
pub fn builtin(name: &str) -> Result<WaveSpec> {
    match name {
        "surprised" => Ok(surprised()),
        "olympic" => Ok(olympic()),
        "pinwheel-none" => Err(Error::Unsupported(
            "the pinwheel diffraction has no finite plane/spherical wave representation".into(),
        )),
        other => Err(Error::Input(format!(
            "unknown builtin {other:?}; known: {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

/// Measures covering every component kind in dimensions 1 to 3.
pub fn measure_corpus() -> Vec<DiffractionMeasure> {
    let pt = |c: &[f64], m: f64| SphericalComponent::point(c.to_vec(), m);
    let sph = |c: &[f64], r: f64, m: f64| SphericalComponent::sphere(c.to_vec(), r, m);
    let build = |d: usize, comps: Vec<SphericalComponent>| DiffractionMeasure::new(d, comps).expect("valid corpus entry");
    let lattice: Vec<SphericalComponent> = (-2..=2)
        .flat_map(|i| (-2..=2).map(move |j| (i as f64, j as f64)))
        .map(|(i, j)| pt(&[i, j], 1.0))
        .collect();
    vec![
        DiffractionMeasure::zero(2),
        build(2, vec![pt(&[0.0, 0.0], 1.0)]),
        build(2, vec![sph(&[0.0, 0.0], 1.0, 1.0)]),
        build(2, vec![sph(&[3.0, 0.0], 1.0, 1.0)]),
        build(2, vec![sph(&[0.0, 0.0], 1.0, 1.0), pt(&[1.0, 0.0], 1.0)]),
        build(2, lattice),
        build(
            2,
            vec![
                sph(&[0.0, 0.0], 1.0, 1.0),
                sph(&[0.0, 0.0], 3.0, 1.0),
                pt(&[-SQRT_2, SQRT_2], 1.0),
                pt(&[SQRT_2, SQRT_2], 1.0),
            ],
        ),
        build(
            2,
            [[0.0, 0.0], [2.0, 0.0], [-2.0, 0.0], [-1.0, -1.0], [1.0, -1.0]]
                .iter()
                .map(|c| sph(c, 2.0, 1.0))
                .collect(),
        ),
        build(2, vec![sph(&[0.5, 0.5], 2.0, 0.3), sph(&[0.0, 0.0], 2.0, 0.7), pt(&[2.0, 0.0], 0.2)]),
        build(1, vec![sph(&[0.0], 1.0, 2.0), sph(&[0.7], 0.3, 1.0), pt(&[-0.4], 0.5)]),
        build(3, vec![sph(&[0.0, 0.0, 0.0], 1.5, 1.0), sph(&[0.0, 1.0, 0.0], 0.5, 2.0), pt(&[0.0, 0.0, 1.5], 0.25)]),
        build(3, vec![sph(&[1.0, -1.0, 0.5], 2.0, 1.0), sph(&[-1.0, 0.0, 0.0], 0.25, 0.5)]),
    ]
}

/// Wave specs in dimensions 1 to 3 with closed forms, frequencies at most 2.
pub fn spec_corpus() -> Vec<WaveSpec> {
    let c = Complex64::new;
    let t = |k: Complex64, a: &[f64], r: f64| WaveTerm::new(k, a.to_vec(), r);
    let build = |d: usize, terms: Vec<WaveTerm>| WaveSpec::new(d, terms).expect("valid corpus entry");
    vec![
        build(1, vec![t(one(), &[0.0], 1.0)]),
        build(1, vec![t(c(0.6, 0.0), &[0.5], 0.0), t(c(0.0, -0.8), &[-1.25], 0.0), t(c(0.3, 0.3), &[0.0], 0.0)]),
        build(1, vec![t(one(), &[0.0], 0.5), t(c(0.0, 0.5), &[0.0], -1.5)]),
        build(2, vec![t(one(), &[0.0, 0.0], 1.0)]),
        build(2, vec![t(one(), &[0.0, 0.0], 0.5), t(c(-0.4, 0.2), &[0.0, 0.0], 1.5)]),
        build(2, vec![t(one(), &[0.5, 0.0], 1.0), t(c(0.0, 0.7), &[0.0, 0.0], -1.0)]),
        build(2, vec![t(one(), &[0.3, -0.4], 0.0), t(c(0.5, 0.0), &[0.0, 0.0], 1.2)]),
        build(3, vec![t(one(), &[0.0, 0.0, 0.0], 1.0)]),
        build(3, vec![t(one(), &[0.0, 0.0, 0.0], 0.75), t(c(0.0, 0.6), &[0.5, 0.0, 0.0], 0.0)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    use crate::closed_form::diffraction;
    use crate::wave::norm;

    fn direct_surprised(x: [f64; 2]) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let r = norm(&x);
        (2.0 * PI * i * r).exp()
            + (6.0 * PI * i * r).exp()
            + (1.0 + (4.0 * SQRT_2 * PI * i * x[0]).exp()) * (-2.0 * SQRT_2 * PI * i * (x[0] - x[1])).exp()
    }

    fn direct_olympic(x: [f64; 2]) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let r = norm(&x);
        (1.0 + 2.0 * (4.0 * PI * x[0]).cos() + (1.0 + (4.0 * PI * i * x[0]).exp()) * (-TAU * i * (x[0] + x[1])).exp())
            * (4.0 * PI * i * r).exp()
    }

    #[test]
    fn builtins_match_their_formulas() {
        for k in 0..200 {
            let x = [-3.0 + 0.031 * k as f64, 2.0 - 0.027 * k as f64];
            assert!((surprised().evaluate(&x).unwrap() - direct_surprised(x)).norm() < 1e-11);
            assert!((olympic().evaluate(&x).unwrap() - direct_olympic(x)).norm() < 1e-11);
        }
    }

    #[test]
    fn olympic_diffraction_is_five_rings() {
        let mu = diffraction(&olympic()).unwrap();
        assert_eq!(mu.components().len(), 5);
        assert!(mu.components().iter().all(|c| c.radius == 2.0 && c.mass == 1.0));
    }

    #[test]
    fn surprised_diffraction() {
        let mu = diffraction(&surprised()).unwrap();
        let (rc, rd) = mu.radial_decompose();
        assert_eq!(rc.components().len(), 4);
        assert!(rd.is_empty());
        assert_eq!(mu.sphere_mass(2.0), 2.0);
    }

    #[test]
    fn lookup() {
        assert!(builtin("olympic").is_ok());
        assert!(matches!(builtin("pinwheel-none"), Err(Error::Unsupported(_))));
        assert!(matches!(builtin("nope"), Err(Error::Input(_))));
    }

    #[test]
    fn corpora_sizes() {
        assert_eq!(measure_corpus().len(), 12);
        assert!(spec_corpus().iter().all(|s| s.max_frequency() <= 2.0));
    }
}
