//! Deterministic heatmap rendering: binary PGM (one pixel per cell) and
//! SVG with a fixed five-stop colormap. Row 1 renders at the top, matching
//! the matrix orientation (X index = row, Y index = column); negative
//! entries render as black while the data files keep them.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::infomat::InfoMat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Colormap {
    Grayscale,
    /// Dark-to-bright ramp interpolated between five fixed RGB stops.
    FiveStop,
}

/// How matrix values map to pixel intensity.
#[derive(Debug, Clone, Copy)]
pub struct RenderSpec {
    pub colormap: Colormap,
    /// Value mapped to full intensity; defaults to the matrix maximum.
    pub value_clip: Option<f64>,
    /// Render negative entries as zero (they are estimation noise).
    pub clamp_negative: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            colormap: Colormap::FiveStop,
            value_clip: None,
            clamp_negative: true,
        }
    }
}

impl RenderSpec {
    fn resolve_clip(&self, mat: &InfoMat) -> Result<f64> {
        let clip = match self.value_clip {
            Some(v) => v,
            None => {
                let max = mat.entries().iter().cloned().fold(f64::MIN, f64::max);
                if max > 0.0 {
                    max
                } else {
                    1.0
                }
            }
        };
        if clip <= 0.0 || !clip.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "value clip must be positive, got {clip}"
            )));
        }
        Ok(clip)
    }

    fn normalize(&self, v: f64, clip: f64) -> f64 {
        let v = if self.clamp_negative { v.max(0.0) } else { v };
        (v / clip).clamp(0.0, 1.0)
    }
}

const FIVE_STOPS: [(f64, [u8; 3]); 5] = [
    (0.00, [0, 0, 4]),
    (0.25, [81, 18, 124]),
    (0.50, [183, 55, 121]),
    (0.75, [252, 137, 97]),
    (1.00, [252, 253, 191]),
];

fn five_stop_rgb(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    for pair in FIVE_STOPS.windows(2) {
        let (t0, c0) = pair[0];
        let (t1, c1) = pair[1];
        if t <= t1 {
            let f = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            return [
                (c0[0] as f64 + f * (c1[0] as f64 - c0[0] as f64)).round() as u8,
                (c0[1] as f64 + f * (c1[1] as f64 - c0[1] as f64)).round() as u8,
                (c0[2] as f64 + f * (c1[2] as f64 - c0[2] as f64)).round() as u8,
            ];
        }
    }
    FIVE_STOPS[4].1
}

/// Writes a binary (P5) PGM with one pixel per cell:
/// `intensity = round(255 * clamp(entry, 0, clip) / clip)`.
/// Output is a pure function of the matrix and spec, byte-identical
/// across runs and platforms.
pub fn render_pgm(mat: &InfoMat, spec: &RenderSpec, path: &Path) -> Result<()> {
    let clip = spec.resolve_clip(mat)?;
    let m = mat.m();
    let mut buf = Vec::with_capacity(32 + m * m);
    buf.extend_from_slice(format!("P5\n{m} {m}\n255\n").as_bytes());
    for i in 1..=m {
        for j in 1..=m {
            let t = spec.normalize(mat.entry(i, j), clip);
            buf.push((255.0 * t).round() as u8);
        }
    }
    File::create(path)?.write_all(&buf)?;
    Ok(())
}

const SVG_CELL: usize = 32;
const SVG_MARGIN: usize = 28;

/// Writes an SVG heatmap: exactly `m * m` cell rectangles tagged
/// `class="cell"`, with axis labels `1..m` along the top and left.
pub fn render_svg(mat: &InfoMat, spec: &RenderSpec, path: &Path) -> Result<()> {
    let clip = spec.resolve_clip(mat)?;
    let m = mat.m();
    let size = SVG_MARGIN + m * SVG_CELL;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" \
         viewBox=\"0 0 {size} {size}\">\n"
    ));
    for i in 1..=m {
        for j in 1..=m {
            let t = spec.normalize(mat.entry(i, j), clip);
            let color = match spec.colormap {
                Colormap::Grayscale => {
                    let g = (255.0 * t).round() as u8;
                    format!("#{g:02x}{g:02x}{g:02x}")
                }
                Colormap::FiveStop => {
                    let [r, g, b] = five_stop_rgb(t);
                    format!("#{r:02x}{g:02x}{b:02x}")
                }
            };
            let x = SVG_MARGIN + (j - 1) * SVG_CELL;
            let y = SVG_MARGIN + (i - 1) * SVG_CELL;
            svg.push_str(&format!(
                "<rect class=\"cell\" x=\"{x}\" y=\"{y}\" width=\"{SVG_CELL}\" \
                 height=\"{SVG_CELL}\" fill=\"{color}\"><title>({i},{j}) = {v}</title></rect>\n",
                v = mat.entry(i, j)
            ));
        }
    }
    for k in 1..=m {
        let along = SVG_MARGIN + (k - 1) * SVG_CELL + SVG_CELL / 2;
        svg.push_str(&format!(
            "<text x=\"{along}\" y=\"{y}\" font-size=\"12\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">{k}</text>\n",
            y = SVG_MARGIN - 8
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{dy}\" font-size=\"12\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">{k}</text>\n",
            x = SVG_MARGIN - 12,
            dy = along + 4
        ));
    }
    svg.push_str("</svg>\n");
    File::create(path)?.write_all(svg.as_bytes())?;
    Ok(())
}

/// Writes the matrix in the InfoMat CSV format.
pub fn render_csv(mat: &InfoMat, path: &Path) -> Result<()> {
    mat.write_csv(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infomat::{InfoMatMeta, Provenance};

    fn mat(m: usize, entries: Vec<f64>) -> InfoMat {
        InfoMat::new(m, entries, Provenance::ExactPmf, InfoMatMeta::default()).unwrap()
    }

    #[test]
    fn zero_matrix_renders_black() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("zero.pgm");
        render_pgm(&mat(2, vec![0.0; 4]), &RenderSpec::default(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(&bytes[bytes.len() - 4..], &[0, 0, 0, 0]);
    }

    #[test]
    fn diagonal_matrix_lights_only_diagonal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("diag.pgm");
        render_pgm(
            &mat(2, vec![1.0, 0.0, 0.0, 1.0]),
            &RenderSpec::default(),
            &path,
        )
        .unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let pixels = &bytes[bytes.len() - 4..];
        assert_eq!(pixels, &[255, 0, 0, 255]);
    }

    #[test]
    fn rendering_is_byte_stable_and_scale_invariant() {
        let dir = tempfile::tempdir().unwrap();
        let entries = vec![0.8, 0.1, 0.0, 0.5];
        let a = dir.path().join("a.pgm");
        let b = dir.path().join("b.pgm");
        let spec = RenderSpec {
            value_clip: Some(0.8),
            ..RenderSpec::default()
        };
        render_pgm(&mat(2, entries.clone()), &spec, &a).unwrap();
        render_pgm(&mat(2, entries.clone()), &spec, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

        // scaling values and clip together leaves the image unchanged
        let scaled: Vec<f64> = entries.iter().map(|v| v * 3.5).collect();
        let c = dir.path().join("c.pgm");
        let spec_scaled = RenderSpec {
            value_clip: Some(0.8 * 3.5),
            ..RenderSpec::default()
        };
        render_pgm(&mat(2, scaled), &spec_scaled, &c).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    }

    #[test]
    fn svg_contains_one_rect_per_cell() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mat.svg");
        render_svg(
            &mat(2, vec![0.3, 0.0, 0.1, 0.9]),
            &RenderSpec::default(),
            &path,
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("<rect class=\"cell\"").count(), 4);
        assert!(text.contains(">1<") && text.contains(">2<"));
    }

    #[test]
    fn bad_clip_is_rejected() {
        let spec = RenderSpec {
            value_clip: Some(0.0),
            ..RenderSpec::default()
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(render_pgm(&mat(1, vec![0.5]), &spec, &dir.path().join("x.pgm")).is_err());
    }
}
