//! Finite-window averages: the numeric counterpart of every mean and
//! autocorrelation computed in closed form elsewhere in the crate.
//!
//! Dimensions 1 and 2 use deterministic quadrature (composite Gauss–Legendre
//! on intervals and squares, Gauss–Legendre × trapezoid on discs). Higher
//! dimensions use Monte Carlo stratified in the radial (or first) coordinate,
//! with one ChaCha stream per (radius, chunk) so results do not depend on
//! thread scheduling.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedAutocorrelation;
use crate::error::{check_dim, Error, Result};
use crate::quad::composite_nodes;
use crate::special::{gamma_fn, sphere_kernel};
use crate::wave::{dot, norm, RadialProfile, WaveSpec, WaveTerm};

/// Required nodes per oscillation period of the fastest single term.
pub const NODES_PER_PERIOD: f64 = 10.0;
/// Hard ceiling on integrand evaluations for one quadrature.
pub const MAX_EVALUATIONS: f64 = 2e10;
const STRATA_PER_CHUNK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Euclidean balls `B_R`.
    Ball,
    /// Cubes `[−R, R]^d`.
    Cube,
    /// Intervals `[0, R]`, one dimension only.
    NonnegInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragingConfig {
    pub window: Window,
    pub radii: Vec<f64>,
    /// Gauss–Legendre nodes per unit length along each quadrature axis.
    pub quad_points_radial: usize,
    /// Minimum trapezoid nodes on each circle of the polar grid.
    pub quad_points_angular: usize,
    /// Monte Carlo samples per radius, rounded up to an even count.
    pub mc_samples: usize,
    pub rng_seed: u64,
}

impl AveragingConfig {
    /// The default schedule for dimension `d`.
    pub fn for_dimension(d: usize) -> Self {
        let radii = if d <= 2 {
            vec![25.0, 50.0, 100.0, 200.0]
        } else {
            vec![10.0, 20.0, 40.0]
        };
        AveragingConfig {
            window: Window::Ball,
            radii,
            quad_points_radial: 32,
            quad_points_angular: 64,
            mc_samples: 4_000_000,
            rng_seed: 0x5eed,
        }
    }

    pub fn with_radii(mut self, radii: Vec<f64>) -> Self {
        self.radii = radii;
        self
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::Input("radius schedule is empty".into()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Input("radii must be positive and finite".into()));
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("radii must be strictly increasing".into()));
        }
        if self.quad_points_radial == 0 || self.quad_points_angular == 0 || self.mc_samples == 0 {
            return Err(Error::Input("quadrature and sample counts must be positive".into()));
        }
        if self.window == Window::NonnegInterval && d != 1 {
            return Err(Error::Input(format!(
                "the nonnegative interval window needs dimension 1, got {d}"
            )));
        }
        Ok(())
    }

    fn last_radius(&self) -> f64 {
        *self.radii.last().expect("validated schedule")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub values: Vec<Complex64>,
    pub extrapolated: Complex64,
    /// `|values[last] − values[last−1]|`, infinite for a single radius.
    pub error_estimate: f64,
    /// Monte Carlo standard errors of the real and imaginary parts per radius;
    /// absent for quadrature.
    pub std_errors: Option<Vec<(f64, f64)>>,
}

impl ConvergenceReport {
    fn new(values: Vec<Complex64>, std_errors: Option<Vec<(f64, f64)>>) -> Self {
        let n = values.len();
        let extrapolated = values[n - 1];
        let error_estimate = if n >= 2 {
            (values[n - 1] - values[n - 2]).norm()
        } else {
            f64::INFINITY
        };
        ConvergenceReport {
            values,
            extrapolated,
            error_estimate,
            std_errors,
        }
    }

    fn map(self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values = self.values.into_iter().map(f).collect();
        ConvergenceReport::new(values, self.std_errors)
    }
}

/// Volume of the window of radius `r` in dimension `d`.
pub fn window_volume(window: Window, d: usize, r: f64) -> f64 {
    match window {
        Window::Cube => (2.0 * r).powi(d as i32),
        Window::NonnegInterval => r,
        Window::Ball => {
            let unit = PI.powf(0.5 * d as f64) / gamma_fn(0.5 * d as f64 + 1.0).expect("positive argument");
            unit * r.powi(d as i32)
        }
    }
}

/// What the integrators need to know about an integrand beyond its values.
struct Shape {
    /// Fastest single-term frequency, for the oscillation guard.
    fastest: f64,
    /// Kink locations along each coordinate axis (tensor rules).
    axis_breaks: Vec<Vec<f64>>,
    /// Kink locations in the radial variable (polar rule).
    radial_breaks: Vec<f64>,
    /// Angular bandwidth on the circle of radius ρ is about
    /// `2π(angular_rate·ρ + angular_offset)`.
    angular_rate: f64,
    angular_offset: f64,
}

/// Windowed mean of `ring(‖s‖)(s)` for each radius of the schedule.
///
/// `ring` is called once per circle of the polar grid, so per-radius work
/// (kernel values) can be hoisted out of the angular loop.
fn average<R, G>(d: usize, cfg: &AveragingConfig, shape: &Shape, ring: &R) -> Result<ConvergenceReport>
where
    R: Fn(f64) -> G + Sync,
    G: Fn(&[f64]) -> Complex64,
{
    cfg.validate(d)?;
    if d <= 2 {
        let need = NODES_PER_PERIOD * shape.fastest;
        if (cfg.quad_points_radial as f64) < need {
            return Err(Error::Budget(format!(
                "quad_points_radial = {} gives fewer than {NODES_PER_PERIOD} nodes per period at frequency {}; need at least {}",
                cfg.quad_points_radial,
                shape.fastest,
                need.ceil()
            )));
        }
    }
    let integrals = match (d, cfg.window) {
        (1, _) => integrate_line(cfg, shape, ring)?,
        (2, Window::Ball) => integrate_disc(cfg, shape, ring)?,
        (2, _) => integrate_square(cfg, shape, ring)?,
        _ => return monte_carlo(d, cfg, ring),
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let values = integrals
        .into_iter()
        .zip(&cfg.radii)
        .map(|(shell, &r)| {
            acc += shell;
            acc / window_volume(cfg.window, d, r)
        })
        .collect();
    Ok(ConvergenceReport::new(values, None))
}

fn check_evaluations(count: f64) -> Result<()> {
    if count > MAX_EVALUATIONS {
        Err(Error::Budget(format!(
            "quadrature would need about {count:.3e} integrand evaluations (limit {MAX_EVALUATIONS:.0e})"
        )))
    } else {
        Ok(())
    }
}

/// Index of the first window containing a point at window-norm `t`. Window
/// edges are panel edges, so nodes never sit on a boundary.
fn shell_of(radii: &[f64], t: f64) -> usize {
    radii.partition_point(|&r| r < t).min(radii.len() - 1)
}

fn axis_nodes(cfg: &AveragingConfig, breaks: &[f64], symmetric: bool) -> Vec<(f64, f64)> {
    let rmax = cfg.last_radius();
    let mut pts: Vec<f64> = breaks.to_vec();
    pts.push(0.0);
    for &r in &cfg.radii {
        pts.push(r);
        pts.push(-r);
    }
    let lo = if symmetric { -rmax } else { 0.0 };
    composite_nodes(lo, rmax, &pts, cfg.quad_points_radial as f64)
}

fn integrate_line<R, G>(cfg: &AveragingConfig, shape: &Shape, ring: &R) -> Result<Vec<Complex64>>
where
    R: Fn(f64) -> G + Sync,
    G: Fn(&[f64]) -> Complex64,
{
    check_evaluations(2.0 * cfg.last_radius() * cfg.quad_points_radial as f64)?;
    let nodes = axis_nodes(cfg, &shape.axis_breaks[0], cfg.window != Window::NonnegInterval);
    let mut shells = vec![Complex64::new(0.0, 0.0); cfg.radii.len()];
    for (s, w) in nodes {
        shells[shell_of(&cfg.radii, s.abs())] += w * ring(s.abs())(&[s]);
    }
    Ok(shells)
}

fn integrate_square<R, G>(cfg: &AveragingConfig, shape: &Shape, ring: &R) -> Result<Vec<Complex64>>
where
    R: Fn(f64) -> G + Sync,
    G: Fn(&[f64]) -> Complex64,
{
    let per_axis = 2.0 * cfg.last_radius() * cfg.quad_points_radial as f64;
    check_evaluations(per_axis * per_axis)?;
    let xs = axis_nodes(cfg, &shape.axis_breaks[0], true);
    let ys = axis_nodes(cfg, &shape.axis_breaks[1], true);
    let n = cfg.radii.len();
    let rows: Vec<Vec<Complex64>> = xs
        .par_iter()
        .map(|&(x, wx)| {
            let mut shells = vec![Complex64::new(0.0, 0.0); n];
            for &(y, wy) in &ys {
                let p = [x, y];
                let v = ring(x.hypot(y))(&p);
                shells[shell_of(&cfg.radii, x.abs().max(y.abs()))] += wx * wy * v;
            }
            shells
        })
        .collect();
    let mut shells = vec![Complex64::new(0.0, 0.0); n];
    for row in rows {
        for (acc, v) in shells.iter_mut().zip(row) {
            *acc += v;
        }
    }
    Ok(shells)
}

fn angular_count(cfg: &AveragingConfig, shape: &Shape, rho: f64) -> usize {
    let band = TAU * (shape.angular_rate * rho + shape.angular_offset);
    cfg.quad_points_angular.max((1.2 * band).ceil() as usize + 32)
}

fn integrate_disc<R, G>(cfg: &AveragingConfig, shape: &Shape, ring: &R) -> Result<Vec<Complex64>>
where
    R: Fn(f64) -> G + Sync,
    G: Fn(&[f64]) -> Complex64,
{
    let rmax = cfg.last_radius();
    let radial_count = rmax * cfg.quad_points_radial as f64;
    check_evaluations(radial_count * angular_count(cfg, shape, rmax) as f64)?;
    let mut breaks = shape.radial_breaks.clone();
    breaks.extend(&cfg.radii);
    let nodes = composite_nodes(0.0, rmax, &breaks, cfg.quad_points_radial as f64);
    let rings: Vec<Complex64> = nodes
        .par_iter()
        .map(|&(rho, w)| {
            let m = angular_count(cfg, shape, rho);
            let g = ring(rho);
            let step = TAU / m as f64;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let (sin, cos) = (step * j as f64).sin_cos();
                sum += g(&[rho * cos, rho * sin]);
            }
            sum * (w * rho * step)
        })
        .collect();
    let mut shells = vec![Complex64::new(0.0, 0.0); cfg.radii.len()];
    for (&(rho, _), v) in nodes.iter().zip(rings) {
        shells[shell_of(&cfg.radii, rho)] += v;
    }
    Ok(shells)
}

#[derive(Clone, Copy)]
struct ChunkSum {
    sum: Complex64,
    spread_re: f64,
    spread_im: f64,
}

/// Stratified Monte Carlo: `H` strata in the radial quantile (balls) or the
/// first coordinate (cubes), two independent samples per stratum. The
/// variance estimate uses the within-stratum differences.
fn monte_carlo<R, G>(d: usize, cfg: &AveragingConfig, ring: &R) -> Result<ConvergenceReport>
where
    R: Fn(f64) -> G + Sync,
    G: Fn(&[f64]) -> Complex64,
{
    let strata = cfg.mc_samples.div_ceil(2);
    let chunks = strata.div_ceil(STRATA_PER_CHUNK);
    let mut values = Vec::with_capacity(cfg.radii.len());
    let mut errors = Vec::with_capacity(cfg.radii.len());
    for (ri, &radius) in cfg.radii.iter().enumerate() {
        let parts: Vec<ChunkSum> = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
                rng.set_stream(((ri as u64) << 32) | chunk as u64);
                let lo = chunk * STRATA_PER_CHUNK;
                let hi = (lo + STRATA_PER_CHUNK).min(strata);
                let mut point = vec![0.0; d];
                let mut part = ChunkSum {
                    sum: Complex64::new(0.0, 0.0),
                    spread_re: 0.0,
                    spread_im: 0.0,
                };
                for h in lo..hi {
                    let mut pair = [Complex64::new(0.0, 0.0); 2];
                    for y in pair.iter_mut() {
                        let u = (h as f64 + rng.random::<f64>()) / strata as f64;
                        let rho = sample_point(d, cfg.window, radius, u, &mut rng, &mut point);
                        *y = ring(rho)(&point);
                    }
                    let diff = pair[0] - pair[1];
                    part.sum += pair[0] + pair[1];
                    part.spread_re += diff.re * diff.re;
                    part.spread_im += diff.im * diff.im;
                }
                part
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        let (mut sre, mut sim) = (0.0, 0.0);
        for p in parts {
            total += p.sum;
            sre += p.spread_re;
            sim += p.spread_im;
        }
        let n = 2.0 * strata as f64;
        values.push(total / n);
        errors.push((sre.sqrt() / n, sim.sqrt() / n));
    }
    Ok(ConvergenceReport::new(values, Some(errors)))
}

/// Fills `point` with a sample whose stratified coordinate has quantile `u`
/// and returns its Euclidean norm.
fn sample_point(d: usize, window: Window, radius: f64, u: f64, rng: &mut ChaCha8Rng, point: &mut [f64]) -> f64 {
    match window {
        Window::Cube => {
            point[0] = radius * (2.0 * u - 1.0);
            for p in point.iter_mut().skip(1) {
                *p = radius * (2.0 * rng.random::<f64>() - 1.0);
            }
            norm(point)
        }
        _ => {
            let rho = radius * u.powf(1.0 / d as f64);
            loop {
                for p in point.iter_mut() {
                    *p = rng.sample(StandardNormal);
                }
                let n = norm(point);
                if n > 1e-300 {
                    for p in point.iter_mut() {
                        *p *= rho / n;
                    }
                    return rho;
                }
            }
        }
    }
}

/// `(1/vol A)·∫_A f(s)·conj(g(s − x)) ds` for each window of the schedule.
pub fn eberlein_numeric(f: &WaveSpec, g: &WaveSpec, x: &[f64], cfg: &AveragingConfig) -> Result<ConvergenceReport> {
    let d = f.dimension();
    check_dim(d, g.dimension())?;
    check_dim(d, x.len())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("shift must be finite".into()));
    }
    let shape = Shape {
        fastest: f.max_frequency().max(g.max_frequency()),
        axis_breaks: x.iter().map(|&xi| vec![0.0, xi]).collect(),
        radial_breaks: vec![norm(x)],
        angular_rate: f.max_plane_norm() + g.max_plane_norm(),
        angular_offset: g.max_radial() * norm(x),
    };
    let ring = |_rho: f64| move |s: &[f64]| f.eval_unchecked(s) * g.eval_shifted(s, x).conj();
    average(d, cfg, &shape, &ring)
}

/// `((1/vol A)·∫_A |f|^p)^{1/p}` for each window of the schedule.
pub fn besicovitch_seminorm_numeric(f: &WaveSpec, p: f64, cfg: &AveragingConfig) -> Result<ConvergenceReport> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::Domain(format!("seminorm exponent must be finite and >= 1, got {p}")));
    }
    let d = f.dimension();
    let shape = Shape {
        fastest: f.max_frequency(),
        axis_breaks: vec![vec![0.0]; d],
        radial_breaks: Vec::new(),
        angular_rate: 2.0 * f.max_plane_norm(),
        angular_offset: 0.0,
    };
    let ring = |_rho: f64| move |s: &[f64]| Complex64::new(f.eval_unchecked(s).norm().powf(p), 0.0);
    Ok(average(d, cfg, &shape, &ring)?.map(|v| Complex64::new(v.re.max(0.0).powf(1.0 / p), 0.0)))
}

/// `(1/vol A)·∫_A f·conj(g)`, the Eberlein convolution at the origin.
pub fn mean_inner_product(f: &WaveSpec, g: &WaveSpec, cfg: &AveragingConfig) -> Result<ConvergenceReport> {
    eberlein_numeric(f, g, &vec![0.0; f.dimension()], cfg)
}

/// `(1/vol A)·∫_A e^{−2πi k·y}·η(y) dy`, the point mass of the diffraction
/// at `k` as seen through a finite window.
pub fn bragg_amplitude_numeric(eta: &ClosedAutocorrelation, k: &[f64], cfg: &AveragingConfig) -> Result<ConvergenceReport> {
    let d = eta.dimension();
    check_dim(d, k.len())?;
    let shifted: Vec<(f64, Vec<f64>, f64)> = eta
        .terms()
        .iter()
        .map(|t| (t.weight, t.plane.iter().zip(k).map(|(a, b)| a - b).collect(), t.radial))
        .collect();
    let shape = Shape {
        fastest: eta.max_frequency().max(norm(k)),
        axis_breaks: vec![vec![0.0]; d],
        radial_breaks: Vec::new(),
        angular_rate: shifted.iter().map(|t| norm(&t.1)).fold(0.0, f64::max),
        angular_offset: 0.0,
    };
    let ring = |rho: f64| {
        let weights: Vec<f64> = shifted.iter().map(|t| t.0 * sphere_kernel(d, t.2, rho)).collect();
        let shifted = &shifted;
        move |y: &[f64]| -> Complex64 {
            shifted
                .iter()
                .zip(&weights)
                .map(|(t, w)| w * Complex64::cis(TAU * dot(&t.1, y)))
                .sum()
        }
    };
    average(d, cfg, &shape, &ring)
}

/// `(1/vol A_R)·|∫_{A_R} f(y)·e^{−2πi k·y} dy|²` at each grid point, with the
/// window shape taken from `cfg` and its radius fixed at `radius`.
pub fn windowed_power_spectrum(f: &WaveSpec, radius: f64, grid: &[Vec<f64>], cfg: &AveragingConfig) -> Result<Vec<f64>> {
    let d = f.dimension();
    let cfg = cfg.clone().with_radii(vec![radius]);
    cfg.validate(d)?;
    let vol = window_volume(cfg.window, d, radius);
    grid.iter()
        .map(|k| {
            check_dim(d, k.len())?;
            let probe = WaveSpec::new(d, vec![WaveTerm::plane_wave(Complex64::new(1.0, 0.0), k.clone())])?;
            let mean = mean_inner_product(f, &probe, &cfg)?.extrapolated;
            Ok(vol * mean.norm_sqr())
        })
        .collect()
}

/// Both finite-`R` sides of the radial averages identity:
/// `(1/R)∫_0^R f·conj(g) dr` and `(d/R^d)∫_0^R f·conj(g)·r^{d−1} dr`.
pub fn radial_mean_identity_check(
    fprof: &RadialProfile,
    gprof: &RadialProfile,
    d: usize,
    radius: f64,
) -> Result<(Complex64, Complex64)> {
    if d == 0 {
        return Err(Error::Input("dimension must be at least 1".into()));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Input(format!("radius must be positive, got {radius}")));
    }
    let per_unit = (NODES_PER_PERIOD * (fprof.max_frequency() + gprof.max_frequency())).max(32.0);
    check_evaluations(per_unit * radius)?;
    let nodes = composite_nodes(0.0, radius, &[], per_unit);
    let (mut plain, mut weighted) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (r, w) in nodes {
        let v = w * fprof.eval(r) * gprof.eval(r).conj();
        plain += v;
        weighted += v * (r / radius).powi(d as i32 - 1);
    }
    if !(plain.is_finite() && weighted.is_finite()) {
        return Err(Error::Numeric("radial quadrature produced a non-finite value".into()));
    }
    Ok((plain / radius, weighted * (d as f64 / radius)))
}
