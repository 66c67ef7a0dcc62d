//! Rasterisation of diffraction measures into grayscale images, PGM
//! encoding and decoding, and recovery of circles from a rendered image.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DiffractionMeasure;

/// Gaussians are truncated beyond this many standard deviations.
const CUTOFF_SIGMAS: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageGrid {
    pub width: usize,
    pub height: usize,
    pub window_min: [f64; 2],
    pub window_max: [f64; 2],
    /// Row-major, row 0 at the top (largest second coordinate).
    pub pixels: Vec<f64>,
}

impl ImageGrid {
    /// Distance between neighbouring pixel centres along each axis.
    pub fn pitch(&self) -> [f64; 2] {
        let step = |lo: f64, hi: f64, n: usize| if n > 1 { (hi - lo) / (n - 1) as f64 } else { hi - lo };
        [
            step(self.window_min[0], self.window_max[0], self.width),
            step(self.window_min[1], self.window_max[1], self.height),
        ]
    }

    /// Physical coordinates of the centre of pixel `(row, col)`.
    ///
    /// Coordinates are measured from the window centre so that a window
    /// symmetric about the origin yields exactly negated coordinates for
    /// mirrored pixels.
    pub fn position(&self, row: usize, col: usize) -> [f64; 2] {
        let [px, py] = self.pitch();
        let cx = 0.5 * (self.window_min[0] + self.window_max[0]);
        let cy = 0.5 * (self.window_min[1] + self.window_max[1]);
        let x = cx + (col as f64 - 0.5 * (self.width as f64 - 1.0)) * px;
        let y = cy - (row as f64 - 0.5 * (self.height as f64 - 1.0)) * py;
        [x, y]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn max_value(&self) -> f64 {
        self.pixels.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    /// Gaussian smoothing width in physical units.
    pub sigma: f64,
    pub gamma: f64,
    pub normalize: bool,
}

impl RenderConfig {
    /// Smoothing of 1.5 pixel pitches, display exponent 0.5, normalised.
    pub fn for_pitch(pitch: f64) -> Self {
        RenderConfig {
            sigma: 1.5 * pitch,
            gamma: 0.5,
            normalize: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Input(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Input(format!("gamma must be positive, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Rasterises `mu` on a `width × height` grid spanning the given window.
///
/// Points deposit `mass` times a normalised Gaussian; circles deposit
/// `mass/(2πρ)` times a one-dimensional Gaussian of the signed distance
/// `‖p − centre‖ − ρ`. One-dimensional measures become a single-row profile.
pub fn rasterize(
    mu: &DiffractionMeasure,
    width: usize,
    height: usize,
    window_min: [f64; 2],
    window_max: [f64; 2],
    cfg: &RenderConfig,
) -> Result<ImageGrid> {
    cfg.validate()?;
    let d = mu.dimension();
    if d > 2 {
        return Err(Error::Unsupported(format!("cannot render a {d}-dimensional measure")));
    }
    let height = if d == 1 { 1 } else { height };
    if width == 0 || height == 0 {
        return Err(Error::Input("image must have at least one pixel".into()));
    }
    let axes = if d == 1 { 1 } else { 2 };
    for k in 0..axes {
        if !(window_min[k].is_finite() && window_max[k].is_finite() && window_min[k] < window_max[k]) {
            return Err(Error::Input(format!(
                "degenerate window [{}, {}] on axis {k}",
                window_min[k], window_max[k]
            )));
        }
    }
    let (window_min, window_max) = if d == 1 {
        ([window_min[0], 0.0], [window_max[0], 0.0])
    } else {
        (window_min, window_max)
    };
    if !mu.components().iter().any(|c| meets_window(d, &c.center, c.radius, window_min, window_max)) {
        return Err(Error::Input("no part of the measure lies inside the window".into()));
    }

    let mut grid = ImageGrid {
        width,
        height,
        window_min,
        window_max,
        pixels: vec![0.0; width * height],
    };
    let s = cfg.sigma;
    let reach = CUTOFF_SIGMAS * s;
    let point_norm = if d == 1 {
        1.0 / ((TAU).sqrt() * s)
    } else {
        1.0 / (TAU * s * s)
    };
    let line_norm = 1.0 / ((TAU).sqrt() * s);
    let comps = mu.components();
    let rows: Vec<Vec<f64>> = (0..height)
        .into_par_iter()
        .map(|row| {
            (0..width)
                .map(|col| {
                    let [x, y] = grid.position(row, col);
                    let mut v = 0.0;
                    for c in comps {
                        let dx = x - c.center[0];
                        let dy = if d == 1 { 0.0 } else { y - c.center[1] };
                        let dist = dx.hypot(dy);
                        let off = if c.is_point() { dist } else { dist - c.radius };
                        if off.abs() > reach {
                            continue;
                        }
                        let g = (-0.5 * (off / s) * (off / s)).exp();
                        v += if c.is_point() {
                            c.mass * point_norm * g
                        } else {
                            c.mass / (TAU * c.radius) * line_norm * g
                        };
                    }
                    v
                })
                .collect()
        })
        .collect();
    grid.pixels = rows.concat();
    if cfg.normalize {
        let max = grid.max_value();
        if max > 0.0 {
            for p in &mut grid.pixels {
                *p = (*p / max).powf(cfg.gamma);
            }
        }
    }
    Ok(grid)
}

fn meets_window(d: usize, center: &[f64], radius: f64, lo: [f64; 2], hi: [f64; 2]) -> bool {
    if d == 1 {
        return center[0] >= lo[0] && center[0] <= hi[0];
    }
    let near = |k: usize| center[k].clamp(lo[k], hi[k]) - center[k];
    let far = |k: usize| (center[k] - lo[k]).abs().max((hi[k] - center[k]).abs());
    let nearest = near(0).hypot(near(1));
    let farthest = far(0).hypot(far(1));
    nearest <= radius && radius <= farthest
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PgmFormat {
    /// Binary graymap.
    P5,
    /// Plain-text graymap.
    P2,
}

fn quantise(v: f64) -> u8 {
    (255.0 * v.clamp(0.0, 1.0) + 0.5).floor() as u8
}

/// Encodes the grid as an 8-bit graymap; pixel values are clamped to `[0, 1]`
/// and rounded half up.
pub fn write_pgm(grid: &ImageGrid, format: PgmFormat) -> Vec<u8> {
    let bytes = grid.pixels.iter().map(|&v| quantise(v));
    match format {
        PgmFormat::P5 => {
            let mut out = format!("P5\n{} {}\n255\n", grid.width, grid.height).into_bytes();
            out.extend(bytes);
            out
        }
        PgmFormat::P2 => {
            let mut out = format!("P2\n{} {}\n255\n", grid.width, grid.height);
            let all: Vec<u8> = bytes.collect();
            for row in all.chunks(grid.width.max(1)) {
                let line: Vec<String> = row.iter().map(u8::to_string).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

/// A decoded graymap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

/// Decodes binary (P5) or plain (P2) graymaps, including `#` comments in the
/// header and 16-bit binary samples.
pub fn parse_pgm(data: &[u8]) -> Result<Pgm> {
    let mut pos = 0usize;
    let magic = next_token(data, &mut pos).ok_or_else(|| Error::Parse("missing magic number".into()))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(Error::Parse(format!(
                "unknown magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let mut header = [0usize; 3];
    for (i, name) in ["width", "height", "maxval"].iter().enumerate() {
        let tok = next_token(data, &mut pos).ok_or_else(|| Error::Parse(format!("missing {name} at byte {pos}")))?;
        header[i] = parse_number(tok).ok_or_else(|| Error::Parse(format!("bad {name} at byte {pos}")))?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 {
        return Err(Error::Parse("zero image dimension".into()));
    }
    if maxval == 0 || maxval > u16::MAX as usize {
        return Err(Error::Parse(format!("maxval {maxval} out of range")));
    }
    let count = width
        .checked_mul(height)
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::Parse("image too large".into()))?;
    let mut samples = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if pos >= data.len() || !data[pos].is_ascii_whitespace() {
            return Err(Error::Parse("missing separator before raster".into()));
        }
        pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        let raster = data
            .get(pos..pos + need)
            .ok_or_else(|| Error::Parse(format!("raster truncated: need {need} bytes after byte {pos}")))?;
        if wide {
            samples.extend(raster.chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]])));
        } else {
            samples.extend(raster.iter().map(|&b| b as u16));
        }
    } else {
        for i in 0..count {
            let tok = next_token(data, &mut pos).ok_or_else(|| Error::Parse(format!("missing sample {i}")))?;
            let v = parse_number(tok).ok_or_else(|| Error::Parse(format!("bad sample {i} at byte {pos}")))?;
            if v > u16::MAX as usize {
                return Err(Error::Parse(format!("sample {i} out of range")));
            }
            samples.push(v as u16);
        }
    }
    if let Some(i) = samples.iter().position(|&v| v as usize > maxval) {
        return Err(Error::Parse(format!("sample {i} exceeds maxval {maxval}")));
    }
    Ok(Pgm {
        width,
        height,
        maxval: maxval as u16,
        samples,
    })
}

fn next_token<'a>(data: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() && data[*pos] != b'#' {
        *pos += 1;
    }
    (start < *pos).then(|| &data[start..*pos])
}

fn parse_number(tok: &[u8]) -> Option<usize> {
    if tok.is_empty() || tok.len() > 9 || !tok.iter().all(u8::is_ascii_digit) {
        return None;
    }
    std::str::from_utf8(tok).ok()?.parse().ok()
}

/// A circle recovered from an image, in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectedRing {
    pub center: [f64; 2],
    pub radius: f64,
    /// Fraction of the circumference supported by ridge pixels.
    pub coverage: f64,
}

/// Settings for [`detect_rings`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSearch {
    /// Pixels dimmer than this are never ridge pixels.
    pub min_intensity: f64,
    /// Smallest radius searched, in pixels.
    pub min_radius_px: usize,
    /// Minimum supported fraction of the circumference for a detection.
    pub min_coverage: f64,
}

impl Default for RingSearch {
    fn default() -> Self {
        RingSearch {
            min_intensity: 0.2,
            min_radius_px: 4,
            min_coverage: 0.5,
        }
    }
}

/// Finds circular intensity ridges in a square-pixel image.
///
/// Ridge pixels are local maxima across the ridge, the across direction being
/// the eigenvector of the most negative Hessian eigenvalue. Each ridge pixel
/// votes for candidate centres at every radius along that direction; peaks of
/// the vote count per unit circumference are refined by a least-squares
/// circle fit to the nearby ridge pixels.
pub fn detect_rings(grid: &ImageGrid, search: &RingSearch) -> Vec<DetectedRing> {
    let (w, h) = (grid.width, grid.height);
    if w < 5 || h < 5 {
        return Vec::new();
    }
    let ridges = ridge_pixels(grid, search.min_intensity);
    let max_r = w.min(h) / 2;
    if max_r <= search.min_radius_px {
        return Vec::new();
    }
    let nr = max_r - search.min_radius_px + 1;
    let mut acc = vec![0f32; nr * w * h];
    let idx = |ri: usize, y: usize, x: usize| (ri * h + y) * w + x;
    for &(row, col, nx, ny) in &ridges {
        for ri in 0..nr {
            let r = (search.min_radius_px + ri) as f64;
            for sign in [-1.0, 1.0] {
                let cx = (col as f64 + sign * r * nx).round();
                let cy = (row as f64 - sign * r * ny).round();
                if cx >= 0.0 && cy >= 0.0 && (cx as usize) < w && (cy as usize) < h {
                    acc[idx(ri, cy as usize, cx as usize)] += 1.0;
                }
            }
        }
    }
    let score = |ri: usize, y: usize, x: usize| {
        let r = (search.min_radius_px + ri) as f64;
        acc[idx(ri, y, x)] as f64 / (TAU * r)
    };
    const NMS: isize = 3;
    let mut peaks = Vec::new();
    for ri in 0..nr {
        for y in 0..h {
            for x in 0..w {
                let s = score(ri, y, x);
                if s < search.min_coverage {
                    continue;
                }
                let mut is_max = true;
                'scan: for dr in -NMS..=NMS {
                    for dy in -NMS..=NMS {
                        for dx in -NMS..=NMS {
                            let (r2, y2, x2) = (ri as isize + dr, y as isize + dy, x as isize + dx);
                            if (dr, dy, dx) == (0, 0, 0)
                                || r2 < 0
                                || y2 < 0
                                || x2 < 0
                                || r2 >= nr as isize
                                || y2 >= h as isize
                                || x2 >= w as isize
                            {
                                continue;
                            }
                            let s2 = score(r2 as usize, y2 as usize, x2 as usize);
                            // Ties are broken towards the earlier cell.
                            let earlier = (r2, y2, x2) < (ri as isize, y as isize, x as isize);
                            if s2 > s || (s2 == s && earlier) {
                                is_max = false;
                                break 'scan;
                            }
                        }
                    }
                }
                if is_max {
                    peaks.push((s, ri, y, x));
                }
            }
        }
    }
    let [pitch, _] = grid.pitch();
    peaks
        .into_iter()
        .map(|(s, ri, y, x)| {
            let r = (search.min_radius_px + ri) as f64;
            let (fx, fy, fr) = refine_circle(&ridges, x as f64, y as f64, r).unwrap_or((x as f64, y as f64, r));
            let [x0, y0] = grid.position(0, 0);
            DetectedRing {
                center: [x0 + fx * pitch, y0 - fy * pitch],
                radius: fr * pitch,
                coverage: s,
            }
        })
        .collect()
}

/// Ridge pixels as `(row, col, nx, ny)`, with `(nx, ny)` the unit normal to
/// the ridge in image axes (`ny` pointing up).
fn ridge_pixels(grid: &ImageGrid, min_intensity: f64) -> Vec<(usize, usize, f64, f64)> {
    let (w, h) = (grid.width, grid.height);
    let at = |r: usize, c: usize| grid.get(r, c);
    let mut out = Vec::new();
    for row in 1..h - 1 {
        for col in 1..w - 1 {
            let v = at(row, col);
            if v < min_intensity {
                continue;
            }
            let hxx = at(row, col + 1) - 2.0 * v + at(row, col - 1);
            let hyy = at(row - 1, col) - 2.0 * v + at(row + 1, col);
            let hxy = 0.25 * (at(row - 1, col + 1) - at(row - 1, col - 1) - at(row + 1, col + 1) + at(row + 1, col - 1));
            let mean = 0.5 * (hxx + hyy);
            let spread = (0.25 * (hxx - hyy) * (hxx - hyy) + hxy * hxy).sqrt();
            let lambda = mean - spread;
            if lambda >= 0.0 {
                continue;
            }
            // Eigenvector of [[hxx, hxy], [hxy, hyy]] for lambda.
            let (mut nx, mut ny) = if hxy.abs() > 1e-300 {
                (hxy, lambda - hxx)
            } else if hxx <= hyy {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            };
            let len = nx.hypot(ny);
            nx /= len;
            ny /= len;
            let sample = |t: f64| bilinear(grid, row as f64 - t * ny, col as f64 + t * nx);
            if v >= sample(1.0) && v >= sample(-1.0) {
                out.push((row, col, nx, ny));
            }
        }
    }
    out
}

fn bilinear(grid: &ImageGrid, row: f64, col: f64) -> f64 {
    let r0 = row.floor().clamp(0.0, (grid.height - 1) as f64);
    let c0 = col.floor().clamp(0.0, (grid.width - 1) as f64);
    let (r1, c1) = ((r0 + 1.0).min((grid.height - 1) as f64), (c0 + 1.0).min((grid.width - 1) as f64));
    let (fr, fc) = ((row - r0).clamp(0.0, 1.0), (col - c0).clamp(0.0, 1.0));
    let g = |r: f64, c: f64| grid.get(r as usize, c as usize);
    (1.0 - fr) * ((1.0 - fc) * g(r0, c0) + fc * g(r0, c1)) + fr * ((1.0 - fc) * g(r1, c0) + fc * g(r1, c1))
}

/// Algebraic least-squares circle through the ridge pixels within two pixels
/// of the candidate, in pixel units (`y` growing downwards).
fn refine_circle(ridges: &[(usize, usize, f64, f64)], cx: f64, cy: f64, r: f64) -> Option<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = ridges
        .iter()
        .map(|&(row, col, _, _)| (col as f64, row as f64))
        .filter(|&(x, y)| ((x - cx).hypot(y - cy) - r).abs() <= 2.0)
        .collect();
    if pts.len() < 8 {
        return None;
    }
    // Solve min Σ (x² + y² + D x + E y + F)² in coordinates relative to the guess.
    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for &(x, y) in &pts {
        let (u, v) = (x - cx, y - cy);
        let row = [u, v, 1.0];
        let rhs = -(u * u + v * v);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            b[i] += row[i] * rhs;
        }
    }
    let [dd, ee, ff] = solve3(m, b)?;
    let (u0, v0) = (-0.5 * dd, -0.5 * ee);
    let rr = u0 * u0 + v0 * v0 - ff;
    (rr > 0.0).then(|| (cx + u0, cy + v0, rr.sqrt()))
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Some(x)
}

/// Mean intensity on circles around `center`, one value per radius step of a
/// pixel pitch, for locating ring maxima.
pub fn radial_profile(grid: &ImageGrid, center: [f64; 2], max_radius: f64) -> Vec<(f64, f64)> {
    let [pitch, _] = grid.pitch();
    let steps = (max_radius / pitch).floor() as usize;
    let [x0, y0] = grid.position(0, 0);
    (0..=steps)
        .map(|k| {
            let r = k as f64 * pitch;
            let n = ((TAU * r / pitch).ceil() as usize).max(8);
            let mean = (0..n)
                .map(|j| {
                    let t = PI * 2.0 * j as f64 / n as f64;
                    let (x, y) = (center[0] + r * t.cos(), center[1] + r * t.sin());
                    bilinear(grid, (y0 - y) / pitch, (x - x0) / pitch)
                })
                .sum::<f64>()
                / n as f64;
            (r, mean)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::SphericalComponent;

    fn raw(sigma: f64) -> RenderConfig {
        RenderConfig {
            sigma,
            gamma: 1.0,
            normalize: false,
        }
    }

    fn argmax(grid: &ImageGrid) -> (usize, usize) {
        let i = (0..grid.pixels.len())
            .max_by(|&a, &b| grid.pixels[a].total_cmp(&grid.pixels[b]))
            .unwrap();
        (i / grid.width, i % grid.width)
    }

    #[test]
    fn central_point_peaks_at_centre() {
        let mu = DiffractionMeasure::new(2, vec![SphericalComponent::point(vec![0.0, 0.0], 1.0)]).unwrap();
        let g = rasterize(&mu, 41, 41, [-1.0, -1.0], [1.0, 1.0], &RenderConfig::for_pitch(0.05)).unwrap();
        assert_eq!(argmax(&g), (20, 20));
        assert_eq!(g.get(20, 20), 1.0);
    }

    #[test]
    fn unit_circle_ridge_at_radius_one() {
        let mu = DiffractionMeasure::new(2, vec![SphericalComponent::sphere(vec![0.0, 0.0], 1.0, 1.0)]).unwrap();
        let g = rasterize(&mu, 81, 81, [-2.0, -2.0], [2.0, 2.0], &RenderConfig::for_pitch(0.05)).unwrap();
        let max = g.max_value();
        for row in 0..81 {
            for col in 0..81 {
                if g.get(row, col) == max {
                    let [x, y] = g.position(row, col);
                    assert!((x.hypot(y) - 1.0).abs() <= 0.5 * 0.05 * 2f64.sqrt());
                }
            }
        }
        let profile = radial_profile(&g, [0.0, 0.0], 1.9);
        let best = profile.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert!((best.0 - 1.0).abs() <= 0.05);
    }

    #[test]
    fn ridge_location_for_various_widths() {
        for (radius, sigma_px) in [(0.73, 0.5), (1.31, 1.0), (1.66, 2.0)] {
            let mu = DiffractionMeasure::new(2, vec![SphericalComponent::sphere(vec![0.0, 0.0], radius, 2.0)]).unwrap();
            let pitch = 0.04;
            let g = rasterize(&mu, 101, 101, [-2.0, -2.0], [2.0, 2.0], &raw(sigma_px * pitch)).unwrap();
            let profile = radial_profile(&g, [0.0, 0.0], 1.95);
            let best = profile.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            assert!((best.0 - radius).abs() <= pitch, "{radius}: {}", best.0);
        }
    }

    #[test]
    fn centred_measures_render_rotation_symmetric() {
        let mu = DiffractionMeasure::new(
            2,
            vec![
                SphericalComponent::sphere(vec![0.0, 0.0], 1.0, 1.0),
                SphericalComponent::sphere(vec![0.0, 0.0], 3.0, 1.0),
                SphericalComponent::point(vec![0.0, 0.0], 0.3),
            ],
        )
        .unwrap();
        for n in [64, 65] {
            let g = rasterize(&mu, n, n, [-4.0, -4.0], [4.0, 4.0], &RenderConfig::for_pitch(8.0 / (n - 1) as f64)).unwrap();
            for row in 0..n {
                for col in 0..n {
                    // (x, y) -> (-y, x) maps pixel (row, col) to (n-1-col, row).
                    let a = g.get(row, col);
                    let b = g.get(n - 1 - col, row);
                    assert!((a - b).abs() <= f64::EPSILON * a.abs().max(1e-300), "{row} {col}");
                }
            }
        }
    }

    #[test]
    fn doubling_masses_doubles_pixels() {
        let comps = vec![
            SphericalComponent::sphere(vec![0.5, -0.2], 1.0, 0.7),
            SphericalComponent::point(vec![1.0, 1.0], 1.3),
        ];
        let doubled = comps
            .iter()
            .map(|c| SphericalComponent { mass: 2.0 * c.mass, ..c.clone() })
            .collect();
        let a = rasterize(&DiffractionMeasure::new(2, comps).unwrap(), 50, 40, [-3.0, -2.0], [3.0, 2.0], &raw(0.1)).unwrap();
        let b = rasterize(&DiffractionMeasure::new(2, doubled).unwrap(), 50, 40, [-3.0, -2.0], [3.0, 2.0], &raw(0.1)).unwrap();
        for (x, y) in a.pixels.iter().zip(&b.pixels) {
            assert_eq!(2.0 * x, *y);
        }
    }

    #[test]
    fn deposited_mass_integrates_to_total() {
        let mu = DiffractionMeasure::new(
            2,
            vec![
                SphericalComponent::sphere(vec![0.2, 0.1], 1.0, 2.0),
                SphericalComponent::point(vec![-0.5, 0.3], 0.5),
            ],
        )
        .unwrap();
        let g = rasterize(&mu, 201, 201, [-2.5, -2.5], [2.5, 2.5], &raw(0.06)).unwrap();
        let [px, py] = g.pitch();
        let total: f64 = g.pixels.iter().sum::<f64>() * px * py;
        assert!((total - 2.5).abs() < 1e-3, "{total}");
    }

    #[test]
    fn one_dimensional_profile() {
        let mu = DiffractionMeasure::new(1, vec![SphericalComponent::sphere(vec![0.0], 1.0, 2.0)]).unwrap();
        let g = rasterize(&mu, 81, 7, [-2.0, 0.0], [2.0, 0.0], &RenderConfig::for_pitch(0.05)).unwrap();
        assert_eq!(g.height, 1);
        assert_eq!(g.get(0, 20), 1.0);
        assert_eq!(g.get(0, 60), 1.0);
        assert!(g.get(0, 40) < 1e-6);
    }

    #[test]
    fn rejections() {
        let mu3 = DiffractionMeasure::new(3, vec![SphericalComponent::point(vec![0.0; 3], 1.0)]).unwrap();
        assert!(matches!(rasterize(&mu3, 8, 8, [-1.0, -1.0], [1.0, 1.0], &raw(0.1)), Err(Error::Unsupported(_))));
        let mu = DiffractionMeasure::new(2, vec![SphericalComponent::point(vec![0.0; 2], 1.0)]).unwrap();
        assert!(rasterize(&mu, 8, 8, [1.0, -1.0], [1.0, 1.0], &raw(0.1)).is_err());
        assert!(rasterize(&mu, 8, 8, [2.0, 2.0], [3.0, 3.0], &raw(0.1)).is_err());
        assert!(rasterize(&mu, 8, 8, [-1.0, -1.0], [1.0, 1.0], &raw(0.0)).is_err());
        // A circle around the window still counts if it crosses it.
        let big = DiffractionMeasure::new(2, vec![SphericalComponent::sphere(vec![0.0; 2], 1.2, 1.0)]).unwrap();
        assert!(rasterize(&big, 8, 8, [-1.0, -1.0], [1.0, 1.0], &raw(0.1)).is_ok());
        let inside = DiffractionMeasure::new(2, vec![SphericalComponent::sphere(vec![0.0; 2], 0.5, 1.0)]).unwrap();
        assert!(rasterize(&inside, 8, 8, [-3.0, -3.0], [3.0, 3.0], &raw(0.1)).is_ok());
        let around = DiffractionMeasure::new(2, vec![SphericalComponent::sphere(vec![0.0; 2], 5.0, 1.0)]).unwrap();
        assert!(rasterize(&around, 8, 8, [-1.0, -1.0], [1.0, 1.0], &raw(0.1)).is_err());
    }

    fn grid(width: usize, height: usize, pixels: Vec<f64>) -> ImageGrid {
        ImageGrid {
            width,
            height,
            window_min: [0.0, 0.0],
            window_max: [1.0, 1.0],
            pixels,
        }
    }

    #[test]
    fn pgm_bytes() {
        assert_eq!(write_pgm(&grid(1, 1, vec![1.0]), PgmFormat::P5), b"P5\n1 1\n255\n\xff".to_vec());
        let two = write_pgm(&grid(1, 2, vec![0.0, 0.5]), PgmFormat::P5);
        assert_eq!(&two[two.len() - 2..], &[0x00, 0x80]);
        assert_eq!(write_pgm(&grid(2, 1, vec![-3.0, 7.0]), PgmFormat::P2), b"P2\n2 1\n255\n0 255\n".to_vec());
    }

    #[test]
    fn pgm_round_trip() {
        let g = grid(3, 2, vec![0.0, 0.1, 0.2, 0.5, 0.9, 1.0]);
        let want: Vec<u16> = vec![0, 26, 51, 128, 230, 255];
        for fmt in [PgmFormat::P5, PgmFormat::P2] {
            let p = parse_pgm(&write_pgm(&g, fmt)).unwrap();
            assert_eq!((p.width, p.height, p.maxval), (3, 2, 255));
            assert_eq!(p.samples, want);
        }
    }

    #[test]
    fn pgm_parser_edge_cases() {
        let p = parse_pgm(b"P5 # c\n2 # w\n1\n65535\n\x01\x02\x03\x04").unwrap();
        assert_eq!(p.samples, vec![0x0102, 0x0304]);
        assert!(parse_pgm(b"P6\n1 1\n255\n\0").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\0").is_err());
        assert!(parse_pgm(b"P2\n1 1\n10\n11\n").is_err());
        assert!(parse_pgm(b"P5\n0 1\n255\n").is_err());
        assert!(parse_pgm(b"").is_err());
        assert!(parse_pgm(b"P5\n99999 99999\n255\n").is_err());
    }

    #[test]
    fn ring_detection_on_two_circles() {
        let mu = DiffractionMeasure::new(
            2,
            vec![
                SphericalComponent::sphere(vec![-0.8, 0.3], 1.5, 1.0),
                SphericalComponent::sphere(vec![1.1, -0.4], 1.0, 1.0),
            ],
        )
        .unwrap();
        let g = rasterize(&mu, 161, 161, [-4.0, -4.0], [4.0, 4.0], &RenderConfig::for_pitch(0.05)).unwrap();
        let rings = detect_rings(&g, &RingSearch::default());
        assert_eq!(rings.len(), 2, "{rings:?}");
        for c in mu.components() {
            assert!(rings.iter().any(|r| {
                (r.center[0] - c.center[0]).hypot(r.center[1] - c.center[1]) <= 0.05 && (r.radius - c.radius).abs() <= 0.05
            }));
        }
    }
}
