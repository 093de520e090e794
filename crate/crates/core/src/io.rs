//! Plain-text and image output: CSV with fixed `%.12e` number formatting
//! and binary PPM heatmaps.

use std::f64::consts::TAU;
use std::io::{self, Write};

use crate::classical::Polyline;
use crate::qcc::RidgeCurve;
use crate::quantum::WaveField;

/// `x` in C's `%.12e` form: twelve fraction digits, signed exponent of at
/// least two digits.
pub fn fmt_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Write a header line and rows of numbers, comma separated, `\n` endings.
pub fn write_csv<W, I, R>(mut w: W, header: &[&str], rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|&v| fmt_e12(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Header of density CSV files.
pub const DENSITY_HEADER: [&str; 7] = ["r", "phi", "density", "re_up", "im_up", "re_down", "im_down"];

/// Every grid node, in grid order.
pub fn write_density_csv<W: Write>(w: W, field: &WaveField) -> io::Result<()> {
    let rows = field.r.iter().enumerate().flat_map(|(i, &r)| {
        field.phi.iter().enumerate().map(move |(m, &phi)| {
            let idx = field.index(i, m);
            let [u, d] = field.values[idx];
            [r, phi, field.density[idx], u.re, u.im, d.re, d.im]
        })
    });
    write_csv(w, &DENSITY_HEADER, rows)
}

/// `phi,r,x,y` in angle order. Pieces of the curve follow each other
/// directly; a new piece starts wherever `phi` jumps by more than one
/// sampling step.
pub fn write_orbit_csv<W: Write>(w: W, line: &Polyline) -> io::Result<()> {
    write_csv(w, &["phi", "r", "x", "y"], line.points.iter().map(|p| [p.phi, p.r, p.x, p.y]))
}

pub fn write_ridge_csv<W: Write>(w: W, ridge: &RidgeCurve) -> io::Result<()> {
    write_csv(w, &["phi", "r_peak", "density_peak"], ridge.points.iter().map(|p| [p.phi, p.r_peak, p.density_peak]))
}

/// Black → red → yellow → white, one entry per 8-bit level.
pub const HOT: [[u8; 3]; 256] = hot_table();

const fn hot_table() -> [[u8; 3]; 256] {
    let mut t = [[0u8; 3]; 256];
    let mut i = 0;
    while i < 256 {
        let v = 3 * i as i32;
        t[i] = [clamp8(v), clamp8(v - 255), clamp8(v - 510)];
        i += 1;
    }
    t
}

const fn clamp8(v: i32) -> u8 {
    if v < 0 {
        0
    } else if v > 255 {
        255
    } else {
        v as u8
    }
}

/// Row-major intensity image in `[0, 1]`, row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl Raster {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, pixels: vec![0.0; width * height] }
    }

    /// Binary P6 through the [`HOT`] table.
    pub fn write_ppm<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        let mut bytes = Vec::with_capacity(3 * self.pixels.len());
        for &p in &self.pixels {
            let level = if p.is_finite() { (p.clamp(0.0, 1.0) * 255.0).round() as usize } else { 0 };
            bytes.extend_from_slice(&HOT[level]);
        }
        w.write_all(&bytes)
    }

    /// Pixel of the Cartesian point `(x, y)` in a square view of half-width
    /// `extent` centred on the origin.
    fn pixel(&self, x: f64, y: f64, extent: f64) -> Option<usize> {
        let col = ((x / extent + 1.0) * 0.5 * self.width as f64).floor();
        let row = ((1.0 - y / extent) * 0.5 * self.height as f64).floor();
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some(row as usize * self.width + col as usize)
    }
}

/// The density in the `x`–`y` plane: each pixel takes the nearest grid
/// node, summed over the angular sheets `φ + 2πm` the grid covers, and the
/// image is scaled to its maximum.
pub fn density_raster(field: &WaveField, size: usize) -> Raster {
    let mut img = Raster::new(size, size);
    let grid = &field.grid;
    let extent = grid.r_max;
    let sheets = (grid.phi_span / TAU).round().max(1.0) as usize;
    let n_phi = field.phi.len();
    let dphi = grid.phi_span / n_phi as f64;
    let nr = field.r.len();
    for row in 0..size {
        for col in 0..size {
            let x = ((col as f64 + 0.5) / size as f64 * 2.0 - 1.0) * extent;
            let y = (1.0 - (row as f64 + 0.5) / size as f64 * 2.0) * extent;
            let r = x.hypot(y);
            if r < grid.r_min || r > grid.r_max {
                continue;
            }
            let i = match field.r.binary_search_by(|v| v.total_cmp(&r)) {
                Ok(i) => i,
                Err(0) => 0,
                Err(i) if i >= nr => nr - 1,
                Err(i) => {
                    if (r - field.r[i - 1]) < (field.r[i] - r) {
                        i - 1
                    } else {
                        i
                    }
                }
            };
            let base = (y.atan2(x) - grid.phi_start).rem_euclid(TAU);
            let mut acc = 0.0;
            for m in 0..sheets {
                let phi = base + TAU * m as f64;
                let j = ((phi / dphi).round() as usize) % n_phi;
                acc += field.density_at(i, j);
            }
            img.pixels[row * size + col] = acc;
        }
    }
    let top = img.pixels.iter().copied().fold(0.0, f64::max);
    if top > 0.0 {
        for p in &mut img.pixels {
            *p /= top;
        }
    }
    img
}

/// Orbit curve drawn at full intensity, densely resampled between points.
pub fn orbit_raster(line: &Polyline, extent: f64, size: usize) -> Raster {
    let mut img = Raster::new(size, size);
    let step = extent / size as f64 * 0.5;
    for seg in &line.segments {
        let pts = &line.points[seg.clone()];
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = ((b.x - a.x).hypot(b.y - a.y) / step).ceil().max(1.0) as usize;
            for s in 0..=n {
                let t = s as f64 / n as f64;
                if let Some(p) = img.pixel(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), extent) {
                    img.pixels[p] = 1.0;
                }
            }
        }
        if let [only] = pts {
            if let Some(p) = img.pixel(only.x, only.y, extent) {
                img.pixels[p] = 1.0;
            }
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponents() {
        assert_eq!(fmt_e12(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e12(1.5), "1.500000000000e+00");
        assert_eq!(fmt_e12(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(fmt_e12(6.02214076e123), "6.022140760000e+123");
        assert_eq!(fmt_e12(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_csv(&mut out, &["a", "b"], [[1.0, 2.0], [3.0, -4.0]]).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "a,b\n1.000000000000e+00,2.000000000000e+00\n3.000000000000e+00,-4.000000000000e+00\n"
        );
    }

    #[test]
    fn colormap_ends() {
        assert_eq!(HOT[0], [0, 0, 0]);
        assert_eq!(HOT[255], [255, 255, 255]);
        assert_eq!(HOT[85], [255, 0, 0]);
        let mut out = Vec::new();
        let mut img = Raster::new(2, 1);
        img.pixels = vec![0.0, 1.0];
        img.write_ppm(&mut out).unwrap();
        assert_eq!(out, b"P6\n2 1\n255\n\x00\x00\x00\xff\xff\xff");
    }
}
