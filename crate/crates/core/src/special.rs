//! Gamma function, Bessel functions of the first kind and the Fourier
//! transform of the uniform measure on a sphere.
//!
//! `J_ν` is available through two independent routes, the power series and
//! the Poisson integral representation, so each can serve as the oracle for
//! the other. The sphere kernel
//!
//! ```text
//! K_d(r, s) = Γ(d/2) · J_{d/2-1}(2π|r|s) / (π|r|s)^{d/2-1}
//! ```
//!
//! is evaluated in normalised form so that the removable singularity at
//! `rs = 0` never appears.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, composite_nodes, DoubleDouble};

/// Truncation policy for the Bessel evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEvalConfig {
    pub series_abs_tol: f64,
    pub series_max_terms: usize,
    pub quadrature_tol: f64,
    /// Above this argument magnitude the kernel switches to the integral.
    pub series_cutoff_z: f64,
}

impl Default for BesselEvalConfig {
    fn default() -> Self {
        BesselEvalConfig {
            series_abs_tol: 1e-15,
            series_max_terms: 200,
            quadrature_tol: 1e-12,
            series_cutoff_z: 30.0,
        }
    }
}

impl BesselEvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_abs_tol > 0.0 && self.quadrature_tol > 0.0 && self.series_cutoff_z > 0.0)
        {
            return Err(Error::Input(
                "Bessel tolerances and cutoff must be positive".into(),
            ));
        }
        if self.series_max_terms == 0 {
            return Err(Error::Input("series_max_terms must be positive".into()));
        }
        Ok(())
    }
}

const SIMPSON_MAX_DEPTH: u32 = 40;
/// Below this kernel argument a three-term series is used.
const TINY_Z: f64 = 1e-8;

/// Γ(x) for x > 0.
///
/// Integers and half-integers up to the overflow limit are computed by the
/// exact recurrence from Γ(1) = 1 and Γ(1/2) = √π; everything else uses a
/// Lanczos approximation (g = 7, nine coefficients).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma is only defined here for x > 0, got {x}")));
    }
    let twice = 2.0 * x;
    if twice == twice.round() && x < 171.0 {
        let (mut acc, mut k) = if x.fract() == 0.0 {
            (1.0, 1.0)
        } else {
            (PI.sqrt(), 0.5)
        };
        while k + 0.5 < x {
            acc *= k;
            k += 1.0;
        }
        return Ok(acc);
    }
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        return Ok(PI / ((PI * x).sin() * gamma_fn(1.0 - x)?));
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (TAU).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `Σ_m (-w)^m Γ(ν+1) / (m! Γ(ν+m+1))` with `w = (z/2)²`, summed in
/// double-double so that the cancellation between terms of size up to
/// `~e^z` does not destroy the O(1) result.
///
/// Terms are kept until they have peaked and the next magnitude times
/// `scale` drops below `abs_tol`.
fn normalised_series(nu: f64, z: f64, scale: f64, cfg: &BesselEvalConfig) -> Result<f64> {
    let half = DoubleDouble::from_f64(0.5 * z);
    let w = half.mul(half);
    let mut term = DoubleDouble::from_f64(1.0);
    let mut terms = vec![term];
    let mut m = 0usize;
    loop {
        let mf = m as f64;
        let ratio_den = (mf + 1.0) * (nu + mf + 1.0);
        term = term.mul(w).neg().div_f64(ratio_den);
        m += 1;
        let decreasing = w.to_f64() < ratio_den;
        if decreasing && term.to_f64().abs() * scale < cfg.series_abs_tol {
            break;
        }
        if m >= cfg.series_max_terms {
            return Err(Error::Numeric(format!(
                "Bessel series for nu={nu}, z={z} did not converge in {} terms",
                cfg.series_max_terms
            )));
        }
        terms.push(term);
    }
    terms.sort_by(|a, b| b.hi.abs().total_cmp(&a.hi.abs()));
    let sum = terms
        .into_iter()
        .fold(DoubleDouble::ZERO, DoubleDouble::add);
    Ok(sum.to_f64())
}

fn is_integer(nu: f64) -> bool {
    nu.fract() == 0.0
}

/// `J_ν(z)` from its power series.
///
/// Negative `z` is accepted only for integer order, where
/// `J_n(-z) = (-1)^n J_n(z)`.
pub fn bessel_j_series(nu: f64, z: f64, cfg: &BesselEvalConfig) -> Result<f64> {
    cfg.validate()?;
    if !(nu >= -0.5) {
        return Err(Error::Domain(format!("order must be at least -1/2, got {nu}")));
    }
    if !z.is_finite() || z.abs() > cfg.series_cutoff_z {
        return Err(Error::Domain(format!(
            "|z| = {} exceeds the series cutoff {}",
            z.abs(),
            cfg.series_cutoff_z
        )));
    }
    if z < 0.0 {
        if !is_integer(nu) {
            return Err(Error::Domain(
                "J_nu at negative argument is only exposed for integer order".into(),
            ));
        }
        let sign = if (nu as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * bessel_j_series(nu, -z, cfg)?);
    }
    if z == 0.0 {
        return match nu {
            n if n == 0.0 => Ok(1.0),
            n if n > 0.0 => Ok(0.0),
            _ => Err(Error::Domain("J_{-1/2} is singular at 0".into())),
        };
    }
    let prefactor = (0.5 * z).powf(nu) / gamma_fn(nu + 1.0)?;
    Ok(prefactor * normalised_series(nu, z, prefactor.abs(), cfg)?)
}

/// `∫_0^π e^{iz cos θ} sin^{2ν} θ dθ`, checking that the imaginary part
/// vanishes as it must.
fn poisson_integral(nu: f64, z: f64, tol: f64) -> Result<f64> {
    let integrand = |t: f64| {
        let (s, c) = t.sin_cos();
        let weight = if nu == 0.0 { 1.0 } else { s.abs().powf(2.0 * nu) };
        Complex64::cis(z * c) * weight
    };
    let v = adaptive_simpson(integrand, 0.0, PI, tol, SIMPSON_MAX_DEPTH)?;
    if v.im.abs() > tol.max(1e-15) * 16.0 {
        return Err(Error::Numeric(format!(
            "imaginary part {} of the Bessel integral exceeds tolerance",
            v.im
        )));
    }
    Ok(v.re)
}

/// `J_ν(z)` from the Poisson integral representation, `ν > -1/2`.
pub fn bessel_j_integral(nu: f64, z: f64, cfg: &BesselEvalConfig) -> Result<f64> {
    cfg.validate()?;
    if !(nu > -0.5) {
        return Err(Error::Domain(format!("integral representation needs nu > -1/2, got {nu}")));
    }
    if !z.is_finite() {
        return Err(Error::Domain("non-finite argument".into()));
    }
    if z < 0.0 {
        if !is_integer(nu) {
            return Err(Error::Domain(
                "J_nu at negative argument is only exposed for integer order".into(),
            ));
        }
        let sign = if (nu as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * bessel_j_integral(nu, -z, cfg)?);
    }
    let prefactor = (0.5 * z).powf(nu) / (PI.sqrt() * gamma_fn(nu + 0.5)?);
    if prefactor == 0.0 {
        return Ok(0.0);
    }
    let tol = cfg.quadrature_tol / prefactor.abs().max(1.0);
    Ok(prefactor * poisson_integral(nu, z, tol)?)
}

/// Fourier transform of the uniform probability measure on the sphere of
/// radius `|r|` in `R^d`, evaluated at any point of norm `s`.
///
/// Even in `r`, equal to 1 at `r = 0` or `s = 0`, and `cos(2πrs)` for
/// `d = 1`.
pub fn sphere_kernel(d: usize, r: f64, s: f64) -> f64 {
    sphere_kernel_with(d, r, s, &BesselEvalConfig::default())
}

pub fn sphere_kernel_with(d: usize, r: f64, s: f64, cfg: &BesselEvalConfig) -> f64 {
    assert!(d >= 1, "sphere kernel needs d >= 1");
    let z = TAU * r.abs() * s.abs();
    if d == 1 {
        return z.cos();
    }
    let nu = 0.5 * d as f64 - 1.0;
    if z < TINY_Z {
        let w = 0.25 * z * z;
        return 1.0 - w / (nu + 1.0) + w * w / (2.0 * (nu + 1.0) * (nu + 2.0));
    }
    if d == 3 && z > 1e-3 {
        return z.sin() / z;
    }
    if z <= cfg.series_cutoff_z {
        if let Ok(v) = normalised_series(nu, z, 1.0, cfg) {
            return v;
        }
    }
    // Γ(ν+1) (z/2)^{-ν} J_ν(z) = Γ(ν+1)/(√π Γ(ν+1/2)) ∫_0^π e^{iz cos θ} sin^{2ν} θ dθ.
    let norm = gamma_fn(nu + 1.0).unwrap_or(f64::NAN) / (PI.sqrt() * gamma_fn(nu + 0.5).unwrap_or(f64::NAN));
    let tol = cfg.quadrature_tol / norm.max(1.0);
    match poisson_integral(nu, z, tol) {
        Ok(v) => norm * v,
        Err(_) => {
            // Fixed high-order rule, resolving the oscillation of cos(z cos θ).
            let nodes = composite_nodes(0.0, PI, &[], 64.0 * (z + 1.0));
            let v: f64 = nodes
                .iter()
                .map(|&(t, w)| w * (z * t.cos()).cos() * t.sin().powf(2.0 * nu))
                .sum();
            norm * v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> BesselEvalConfig {
        BesselEvalConfig::default()
    }

    /// √(2/(πz)) sin z.
    fn j_half(z: f64) -> f64 {
        (2.0 / (PI * z)).sqrt() * z.sin()
    }

    #[test]
    fn gamma_reference_values() {
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(2.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(3.0).unwrap(), 2.0);
        assert!(matches!(gamma_fn(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_fn(-1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn gamma_recurrence_holds_off_the_grid() {
        for i in 1..200 {
            let x = 0.013 + 0.07 * i as f64;
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs(), "x={x}");
        }
    }

    #[test]
    fn series_examples() {
        assert_eq!(bessel_j_series(0.0, 0.0, &cfg()).unwrap(), 1.0);
        assert!(bessel_j_series(0.5, PI, &cfg()).unwrap().abs() < 1e-12);
    }

    /// First zero of J_0 by bisection on the series.
    #[test]
    fn first_zero_of_j0() {
        let f = |z: f64| bessel_j_series(0.0, z, &cfg()).unwrap();
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((0.5 * (lo + hi) - 2.404_825_557_7).abs() < 1e-9);
        assert!(f(2.404_825_557_7).abs() < 1e-9);
    }

    #[test]
    fn integral_examples() {
        assert!((bessel_j_integral(0.0, 0.0, &cfg()).unwrap() - 1.0).abs() < 1e-12);
        let s = bessel_j_series(0.0, 1.0, &cfg()).unwrap();
        assert!((bessel_j_integral(0.0, 1.0, &cfg()).unwrap() - s).abs() < 1e-10);
        assert!((bessel_j_integral(0.5, 10.0, &cfg()).unwrap() - j_half(10.0)).abs() < 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_j_series(0.5, -1.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(bessel_j_series(-1.0, 1.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(bessel_j_series(0.0, 31.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(bessel_j_integral(-0.5, 1.0, &cfg()), Err(Error::Domain(_))));
        let j1 = bessel_j_series(1.0, 2.0, &cfg()).unwrap();
        assert_eq!(bessel_j_series(1.0, -2.0, &cfg()).unwrap(), -j1);
    }

    #[test]
    fn series_max_terms_is_enforced() {
        let tight = BesselEvalConfig {
            series_max_terms: 3,
            ..cfg()
        };
        assert!(matches!(bessel_j_series(0.0, 20.0, &tight), Err(Error::Numeric(_))));
    }

    #[test]
    fn half_order_series_matches_closed_form() {
        for i in 1..=60 {
            let z = 0.5 * i as f64;
            let v = bessel_j_series(0.5, z, &cfg()).unwrap();
            assert!((v - j_half(z)).abs() < 1e-13, "z={z}");
        }
        let jm = bessel_j_series(-0.5, 2.0, &cfg()).unwrap();
        assert!((jm - (2.0 / (PI * 2.0)).sqrt() * 2f64.cos()).abs() < 1e-14);
    }

    #[test]
    fn series_and_integral_agree() {
        for nu in [0.0, 0.5, 1.0, 1.5, 2.0] {
            for i in 0..=60 {
                let z = 0.5 * i as f64;
                let s = bessel_j_series(nu, z, &cfg()).unwrap();
                let q = bessel_j_integral(nu, z, &cfg()).unwrap();
                assert!((s - q).abs() < 1e-9, "nu={nu} z={z}: {s} vs {q}");
            }
        }
    }

    #[test]
    fn power_bound_holds() {
        for nu in [0.0, 0.5, 1.0, 1.5, 2.0, 3.5] {
            for i in 0..=120 {
                let z = -30.0 + 0.5 * i as f64;
                if z < 0.0 && !is_integer(nu) {
                    continue;
                }
                let j = bessel_j_series(nu, z, &cfg()).unwrap();
                let bound = (0.5 * z.abs()).powf(nu) / gamma_fn(nu + 1.0).unwrap();
                assert!(j.abs() <= bound + 1e-15, "nu={nu} z={z}");
            }
        }
    }

    #[test]
    fn kernel_examples() {
        for d in 1..6 {
            assert_eq!(sphere_kernel(d, 1.0, 0.0), 1.0);
            assert_eq!(sphere_kernel(d, 0.0, 3.0), 1.0);
        }
        for i in 0..50 {
            let s = 0.1 * i as f64;
            let a = 0.8;
            let j0 = bessel_j_series(0.0, TAU * a * s, &cfg()).unwrap();
            assert!((sphere_kernel(2, a, s) - j0).abs() < 1e-13);
            assert!((sphere_kernel(1, a, s) - (TAU * a * s).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_three_dimensions_is_sinc() {
        for i in 1..200 {
            let s = 0.05 * i as f64;
            let z = TAU * s;
            let want = z.sin() / z;
            assert!((sphere_kernel(3, 1.0, s) - want).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn kernel_uses_integral_beyond_cutoff() {
        // z = 2π·1·8 ≈ 50 > 30, so this exercises the quadrature route.
        let z = TAU * 8.0;
        assert!((sphere_kernel(3, 1.0, 8.0) - z.sin() / z).abs() < 1e-11);
        assert!((sphere_kernel(3, -1.0, 8.0) - z.sin() / z).abs() < 1e-11);
    }

    #[test]
    fn kernel_properties() {
        for d in 1..=5 {
            for i in 0..80 {
                let s = 0.07 * i as f64;
                for r in [0.3, 1.0, 2.2] {
                    let k = sphere_kernel(d, r, s);
                    assert_eq!(k, sphere_kernel(d, -r, s));
                    assert!(k.abs() <= 1.0 + 1e-15, "d={d} r={r} s={s}");
                }
            }
            let mut prev = f64::INFINITY;
            for k in 1..12 {
                let s = 10f64.powi(-k);
                let gap = (sphere_kernel(d, 1.0, s) - 1.0).abs();
                assert!(gap <= prev);
                prev = gap;
            }
            assert!(prev < 1e-15);
        }
    }

    #[test]
    fn tiny_argument_branch_is_continuous() {
        for d in 2..6 {
            let below = sphere_kernel(d, 1.0, 0.999e-8 / TAU);
            let above = sphere_kernel(d, 1.0, 1.001e-8 / TAU);
            assert!((below - above).abs() < 1e-15);
        }
    }
}
