use serde::{Deserialize, Serialize};

use super::image::{Rgba, TextureImage};
use super::scanline::RasterPoint;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    Nearest,
    #[default]
    Bilinear,
}

impl std::str::FromStr for Filter {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nearest" => Ok(Filter::Nearest),
            "bilinear" => Ok(Filter::Bilinear),
            _ => Err(format!("unknown filter `{s}` (expected nearest or bilinear)")),
        }
    }
}

/// Color of the source atlas at the point's original UV.
pub fn sample_source(atlases: &[TextureImage], point: &RasterPoint, filter: Filter) -> Result<Rgba> {
    let img = atlases.get(point.texture as usize).ok_or(Error::TextureIndex {
        index: point.texture as usize,
        count: atlases.len(),
    })?;
    Ok(sample(img, point.u_ori, point.v_ori, filter))
}

/// Samples `img` at texture coordinate `(u, v)`; `v = 0` is the bottom row.
pub fn sample(img: &TextureImage, u: f64, v: f64, filter: Filter) -> Rgba {
    let (w, h) = (img.width(), img.height());
    let x = u * w as f64;
    let y = v * h as f64;
    match filter {
        Filter::Nearest => {
            let col = (x.floor() as i64).clamp(0, w as i64 - 1) as u32;
            let row = (y.floor() as i64).clamp(0, h as i64 - 1) as u32;
            img.get(col, h - 1 - row)
        }
        Filter::Bilinear => {
            let fx = x - 0.5;
            let fy = y - 0.5;
            let x0 = fx.floor();
            let y0 = fy.floor();
            let tx = fx - x0;
            let ty = fy - y0;
            let clamp_col = |c: f64| (c as i64).clamp(0, w as i64 - 1) as u32;
            let clamp_row = |r: f64| h - 1 - (r as i64).clamp(0, h as i64 - 1) as u32;
            let (c0, c1) = (clamp_col(x0), clamp_col(x0 + 1.0));
            let (r0, r1) = (clamp_row(y0), clamp_row(y0 + 1.0));
            let p00 = img.get(c0, r0);
            let p10 = img.get(c1, r0);
            let p01 = img.get(c0, r1);
            let p11 = img.get(c1, r1);
            let mut out = [0u8; 4];
            for k in 0..4 {
                let top = p00[k] as f64 * (1.0 - tx) + p10[k] as f64 * tx;
                let bot = p01[k] as f64 * (1.0 - tx) + p11[k] as f64 * tx;
                let val = top * (1.0 - ty) + bot * ty;
                // round half up
                out[k] = (val + 0.5).floor().clamp(0.0, 255.0) as u8;
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gradient() -> TextureImage {
        TextureImage::from_fn(4, 4, |x, y| [x as u8 * 60, y as u8 * 60, 0, 255])
    }

    #[test]
    fn nearest_at_pixel_center() {
        let img = gradient();
        // column 2, image row 0 (top) is v in [0.75, 1]
        assert_eq!(sample(&img, 2.5 / 4.0, 3.5 / 4.0, Filter::Nearest), img.get(2, 0));
        assert_eq!(sample(&img, 0.5 / 4.0, 0.5 / 4.0, Filter::Nearest), img.get(0, 3));
    }

    #[test]
    fn bilinear_midpoint_rounds_half_up() {
        let img = TextureImage::from_fn(2, 1, |x, _| if x == 0 { [0, 0, 0, 255] } else { [255; 4] });
        let c = sample(&img, 0.5, 0.5, Filter::Bilinear);
        assert_eq!(c, [128, 128, 128, 255]);
    }

    #[test]
    fn bilinear_at_corner_center_is_exact() {
        let img = gradient();
        for (u, v, x, y) in [(0.125, 0.125, 0, 3), (0.875, 0.875, 3, 0), (0.125, 0.875, 0, 0)] {
            assert_eq!(sample(&img, u, v, Filter::Bilinear), img.get(x, y));
        }
        // beyond the outermost centers the neighborhood is clamped
        assert_eq!(sample(&img, 0.0, 0.0, Filter::Bilinear), img.get(0, 3));
    }

    #[test]
    fn bad_texture_index() {
        let p = RasterPoint::new([0.5, 0.5], [0.5, 0.5], 2);
        assert!(matches!(
            sample_source(&[gradient()], &p, Filter::Nearest),
            Err(Error::TextureIndex { index: 2, count: 1 })
        ));
    }
}
