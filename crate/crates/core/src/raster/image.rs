use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, RgbImage, RgbaImage};

use crate::error::{Error, Result};

pub type Rgba = [u8; 4];

/// Row-major RGBA8 image. Row 0 is the top of the picture; texture space
/// `v = 0` is the bottom row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextureImage {
    width: u32,
    height: u32,
    pixels: Vec<Rgba>,
    defined: Option<Vec<bool>>,
}

impl TextureImage {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "image must be at least 1x1");
        TextureImage {
            width,
            height,
            pixels: vec![[0, 0, 0, 255]; width as usize * height as usize],
            defined: None,
        }
    }

    /// Output image with every pixel marked undefined.
    pub fn new_undefined(width: u32, height: u32) -> Self {
        let mut img = TextureImage::new(width, height);
        img.defined = Some(vec![false; img.pixels.len()]);
        img
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Rgba) -> Self {
        let mut img = TextureImage::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.pixels[(y * width + x) as usize] = f(x, y);
            }
        }
        img
    }

    pub fn filled(width: u32, height: u32, color: Rgba) -> Self {
        TextureImage::from_fn(width, height, |_, _| color)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [Rgba] {
        &mut self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgba {
        self.pixels[(y * self.width + x) as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, c: Rgba) {
        self.pixels[(y * self.width + x) as usize] = c;
    }

    pub fn defined(&self) -> Option<&[bool]> {
        self.defined.as_deref()
    }

    pub(crate) fn set_defined(&mut self, defined: Option<Vec<bool>>) {
        if let Some(d) = &defined {
            assert_eq!(d.len(), self.pixels.len());
        }
        self.defined = defined;
    }

    pub fn is_defined(&self, x: u32, y: u32) -> bool {
        self.defined
            .as_ref()
            .is_none_or(|d| d[(y * self.width + x) as usize])
    }

    /// Fraction of defined pixels; 1.0 for images without a defined mask.
    pub fn defined_fraction(&self) -> f64 {
        match &self.defined {
            None => 1.0,
            Some(d) => d.iter().filter(|&&b| b).count() as f64 / d.len() as f64,
        }
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
        let rgba = img.to_rgba8();
        let (w, h) = rgba.dimensions();
        Ok(TextureImage {
            width: w,
            height: h,
            pixels: rgba.pixels().map(|p| p.0).collect(),
            defined: None,
        })
    }

    /// PNG bytes, RGB unless `rgba` is set.
    pub fn encode_png(&self, rgba: bool) -> Result<Vec<u8>> {
        let mut out = Cursor::new(Vec::new());
        let res = if rgba {
            let raw: Vec<u8> = self.pixels.iter().flatten().copied().collect();
            RgbaImage::from_raw(self.width, self.height, raw)
                .expect("buffer size matches")
                .write_to(&mut out, ImageFormat::Png)
        } else {
            let raw: Vec<u8> = self.pixels.iter().flat_map(|p| [p[0], p[1], p[2]]).collect();
            RgbImage::from_raw(self.width, self.height, raw)
                .expect("buffer size matches")
                .write_to(&mut out, ImageFormat::Png)
        };
        res.map_err(|source| Error::Image {
            path: "<memory>".into(),
            source,
        })?;
        Ok(out.into_inner())
    }

    pub fn save_png(&self, path: impl AsRef<Path>, rgba: bool) -> Result<()> {
        let path = path.as_ref();
        let bytes = self.encode_png(rgba)?;
        std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip() {
        let img = TextureImage::from_fn(5, 3, |x, y| [x as u8 * 40, y as u8 * 70, 7, 255]);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.png");
        img.save_png(&p, false).unwrap();
        let back = TextureImage::load_png(&p).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn defined_fraction_counts_mask() {
        let mut img = TextureImage::new_undefined(2, 2);
        assert_eq!(img.defined_fraction(), 0.0);
        img.set_defined(Some(vec![true, false, true, true]));
        assert_eq!(img.defined_fraction(), 0.75);
        assert!(!img.is_defined(1, 0));
    }
}
