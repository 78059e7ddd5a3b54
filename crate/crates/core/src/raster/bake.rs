use log::warn;
use rayon::prelude::*;

use super::image::{Rgba, TextureImage};
use super::sample::{sample, Filter};
use super::scanline::ScanTriangle;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Vec2};

/// Rounds of 8-neighbor dilation before leftover pixels are painted gray.
pub const MAX_DILATION_ROUNDS: usize = 16;
pub const FALLBACK_GRAY: Rgba = [128, 128, 128, 255];

const BAND_ROWS: u32 = 32;

#[derive(Clone, Copy, Debug)]
pub struct BakeOptions {
    pub width: u32,
    pub height: u32,
    pub filter: Filter,
    /// 1, 2 or 4; the image is rendered this many times larger per axis and
    /// box-filtered down.
    pub supersample: u32,
}

impl Default for BakeOptions {
    fn default() -> Self {
        BakeOptions {
            width: 4096,
            height: 4096,
            filter: Filter::Bilinear,
            supersample: 1,
        }
    }
}

impl BakeOptions {
    pub fn square(resolution: u32) -> Self {
        BakeOptions {
            width: resolution,
            height: resolution,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct BakeOutput {
    pub image: TextureImage,
    /// Fraction of (supersampled) pixels colored by rasterization, before
    /// dilation.
    pub defined_before_dilation: f64,
    /// Fraction of pixels claimed by some triangle, colored or not.
    pub covered_fraction: f64,
    pub dilation_rounds: usize,
    pub gray_pixels: usize,
    /// Pixels claimed by more than one triangle (only with fold-overs).
    pub overlap_pixels: usize,
    pub degenerate_faces: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PixelState {
    Empty,
    Colored,
    CoveredUndefined,
}

struct Job {
    tri: ScanTriangle,
    texture: Option<u32>,
}

fn face_texture(mesh: &Mesh, f: usize, atlases: &[TextureImage]) -> Result<Option<(u32, [Vec2; 3])>> {
    let cs = mesh.face_corners(f);
    let mut ori = [[0.0; 2]; 3];
    let mut tex = None;
    for (k, c) in cs.iter().enumerate() {
        let (Some(uv), Some(t)) = (c.uv, c.texture) else {
            return Ok(None);
        };
        match tex {
            None => tex = Some(t),
            Some(prev) if prev != t => return Err(Error::MixedTextures(f)),
            _ => {}
        }
        ori[k] = uv;
    }
    let t = tex.expect("three corners");
    if t as usize >= atlases.len() {
        return Err(Error::TextureIndex {
            index: t as usize,
            count: atlases.len(),
        });
    }
    Ok(Some((t, ori)))
}

/// Renders the new texture for a mesh whose vertices carry new UVs in `uv`.
///
/// Every triangle is scan-line filled in the new UV domain; covered pixels
/// take the source color at the interpolated original UV. Triangles without
/// original UVs (filled holes) claim pixels but leave them undefined, and
/// those pixels plus any rasterization cracks are filled by dilation.
pub fn bake_texture(
    mesh: &Mesh,
    uv: &[Vec2],
    atlases: &[TextureImage],
    opts: &BakeOptions,
) -> Result<BakeOutput> {
    if mesh.face_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    if !matches!(opts.supersample, 1 | 2 | 4) {
        return Err(Error::Config(format!(
            "supersample must be 1, 2 or 4, got {}",
            opts.supersample
        )));
    }
    if opts.width == 0 || opts.height == 0 {
        return Err(Error::Config("output resolution must be at least 1".into()));
    }
    assert_eq!(uv.len(), mesh.vertex_count(), "one new UV per vertex");

    let s = opts.supersample;
    let (w, h) = (opts.width * s, opts.height * s);

    let mut jobs = Vec::with_capacity(mesh.face_count());
    let mut degenerate = 0;
    for f in 0..mesh.face_count() {
        let new = mesh.face(f).map(|v| uv[v]);
        let info = face_texture(mesh, f, atlases)?;
        let ori = info.map(|(_, o)| o).unwrap_or([[0.0; 2]; 3]);
        match ScanTriangle::new(new, ori, w, h) {
            Some(tri) => jobs.push(Job {
                tri,
                texture: info.map(|(t, _)| t),
            }),
            None => degenerate += 1,
        }
    }

    let n_bands = h.div_ceil(BAND_ROWS) as usize;
    let mut bins: Vec<Vec<u32>> = vec![Vec::new(); n_bands];
    for (j, job) in jobs.iter().enumerate() {
        if let Some(rows) = job.tri.rows() {
            let first = (rows.start / BAND_ROWS) as usize;
            let last = ((rows.end - 1) / BAND_ROWS) as usize;
            for bin in &mut bins[first..=last] {
                bin.push(j as u32);
            }
        }
    }

    // buffers in texture-row order (row 0 is v = 0)
    let npx = w as usize * h as usize;
    let mut colors = vec![[0u8, 0, 0, 255]; npx];
    let mut state = vec![PixelState::Empty; npx];
    let band_len = (BAND_ROWS * w) as usize;
    let filter = opts.filter;
    let overlap: usize = colors
        .par_chunks_mut(band_len)
        .zip(state.par_chunks_mut(band_len))
        .enumerate()
        .map(|(b, (colors, state))| {
            let row0 = b as u32 * BAND_ROWS;
            let rows = row0..(row0 + BAND_ROWS).min(h);
            let mut overlap = 0;
            for &j in &bins[b] {
                let job = &jobs[j as usize];
                job.tri.scan(rows.clone(), |col, row, _new, ori| {
                    let idx = ((row - row0) * w + col) as usize;
                    if state[idx] != PixelState::Empty {
                        overlap += 1;
                        return;
                    }
                    match job.texture {
                        Some(t) => {
                            let o = [ori[0].clamp(0.0, 1.0), ori[1].clamp(0.0, 1.0)];
                            colors[idx] = sample(&atlases[t as usize], o[0], o[1], filter);
                            state[idx] = PixelState::Colored;
                        }
                        None => state[idx] = PixelState::CoveredUndefined,
                    }
                });
            }
            overlap
        })
        .sum();

    let colored = state.iter().filter(|&&s| s == PixelState::Colored).count();
    let covered = state.iter().filter(|&&s| s != PixelState::Empty).count();
    let mut defined: Vec<bool> = state.iter().map(|&s| s == PixelState::Colored).collect();
    drop(state);

    let (rounds, gray) = dilate(&mut colors, &mut defined, w, h, MAX_DILATION_ROUNDS);
    if gray > 0 {
        warn!("{gray} pixels still undefined after {MAX_DILATION_ROUNDS} dilation rounds; painted gray");
    }

    let (colors, w, h) = if s > 1 {
        (downsample(&colors, w, h, s), opts.width, opts.height)
    } else {
        (colors, w, h)
    };

    let mut image = TextureImage::new(w, h);
    for (row, src) in colors.chunks_exact(w as usize).enumerate() {
        let y = h - 1 - row as u32;
        let start = (y * w) as usize;
        image.pixels_mut()[start..start + w as usize].copy_from_slice(src);
    }
    image.set_defined(Some(vec![true; (w * h) as usize]));

    Ok(BakeOutput {
        image,
        defined_before_dilation: colored as f64 / npx as f64,
        covered_fraction: covered as f64 / npx as f64,
        dilation_rounds: rounds,
        gray_pixels: gray,
        overlap_pixels: overlap,
        degenerate_faces: degenerate,
    })
}

/// Iterative 8-neighbor dilation. Each round assigns every undefined pixel
/// that touches a defined one the rounded mean of its defined neighbors (as
/// of the start of the round). Stops when nothing is undefined or after
/// `max_rounds`; leftovers are set to [`FALLBACK_GRAY`]. Returns the number
/// of rounds run and the number of gray pixels.
pub fn dilate(colors: &mut [Rgba], defined: &mut [bool], w: u32, h: u32, max_rounds: usize) -> (usize, usize) {
    let (w, h) = (w as i64, h as i64);
    let mut pending: Vec<usize> = (0..colors.len()).filter(|&i| !defined[i]).collect();
    let mut rounds = 0;
    let mut updates: Vec<(usize, Rgba)> = Vec::new();
    while !pending.is_empty() && rounds < max_rounds {
        updates.clear();
        for &i in &pending {
            let (x, y) = (i as i64 % w, i as i64 / w);
            let mut sum = [0u32; 4];
            let mut n = 0u32;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let j = (ny * w + nx) as usize;
                    if defined[j] {
                        for k in 0..4 {
                            sum[k] += colors[j][k] as u32;
                        }
                        n += 1;
                    }
                }
            }
            if n > 0 {
                updates.push((i, sum.map(|s| ((s + n / 2) / n) as u8)));
            }
        }
        if updates.is_empty() {
            break;
        }
        for &(i, c) in &updates {
            colors[i] = c;
            defined[i] = true;
        }
        pending.retain(|&i| !defined[i]);
        rounds += 1;
    }
    let gray = pending.len();
    for &i in &pending {
        colors[i] = FALLBACK_GRAY;
        defined[i] = true;
    }
    (rounds, gray)
}

fn downsample(colors: &[Rgba], w: u32, h: u32, s: u32) -> Vec<Rgba> {
    let (ow, oh) = (w / s, h / s);
    let n = s * s;
    let mut out = Vec::with_capacity((ow * oh) as usize);
    for y in 0..oh {
        for x in 0..ow {
            let mut sum = [0u32; 4];
            for dy in 0..s {
                for dx in 0..s {
                    let p = colors[((y * s + dy) * w + x * s + dx) as usize];
                    for k in 0..4 {
                        sum[k] += p[k] as u32;
                    }
                }
            }
            out.push(sum.map(|v| ((v + n / 2) / n) as u8));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Corner;
    use std::path::PathBuf;

    fn unit_square(tex_uv: [[f64; 2]; 4]) -> (Mesh, Vec<Vec2>) {
        let pos = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
        let c = |v: usize| Corner::with_uv(v, tex_uv[v], 0);
        let corners = vec![c(0), c(1), c(2), c(0), c(2), c(3)];
        let m = Mesh::new(pos, corners, vec![PathBuf::from("src.png")], true).unwrap();
        let uv = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        (m, uv)
    }

    #[test]
    fn constant_red_fills_everything() {
        let (m, uv) = unit_square([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let red = TextureImage::filled(8, 8, [255, 0, 0, 255]);
        let out = bake_texture(&m, &uv, &[red], &BakeOptions::square(32)).unwrap();
        assert_eq!(out.defined_before_dilation, 1.0);
        assert_eq!(out.overlap_pixels, 0);
        assert_eq!(out.gray_pixels, 0);
        assert!(out.image.pixels().iter().all(|&p| p == [255, 0, 0, 255]));
    }

    #[test]
    fn image_orientation_matches_source() {
        // identity mapping of a 4x4 source reproduces it with nearest sampling
        let (m, uv) = unit_square([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let src = TextureImage::from_fn(4, 4, |x, y| [x as u8 * 50, y as u8 * 50, 9, 255]);
        let opts = BakeOptions {
            filter: Filter::Nearest,
            ..BakeOptions::square(4)
        };
        let out = bake_texture(&m, &uv, std::slice::from_ref(&src), &opts).unwrap();
        assert_eq!(out.image.pixels(), src.pixels());
    }

    #[test]
    fn supersampled_constant_is_unchanged() {
        let (m, uv) = unit_square([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let c = TextureImage::filled(2, 2, [10, 200, 30, 255]);
        let opts = BakeOptions {
            supersample: 4,
            ..BakeOptions::square(8)
        };
        let out = bake_texture(&m, &uv, &[c], &opts).unwrap();
        assert_eq!((out.image.width(), out.image.height()), (8, 8));
        assert!(out.image.pixels().iter().all(|&p| p == [10, 200, 30, 255]));
    }

    #[test]
    fn no_faces_is_an_error() {
        let m = Mesh::new(vec![[0.0; 3]], vec![], vec![], false).unwrap();
        assert!(matches!(
            bake_texture(&m, &[[0.0, 0.0]], &[], &BakeOptions::square(4)),
            Err(Error::EmptyMesh)
        ));
    }

    #[test]
    fn mixed_textures_rejected() {
        let pos = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let corners = vec![
            Corner::with_uv(0, [0.0, 0.0], 0),
            Corner::with_uv(1, [1.0, 0.0], 1),
            Corner::with_uv(2, [0.0, 1.0], 0),
        ];
        let m = Mesh::new(pos, corners, vec!["a.png".into(), "b.png".into()], true).unwrap();
        let atlases = vec![TextureImage::new(2, 2), TextureImage::new(2, 2)];
        let uv = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(
            bake_texture(&m, &uv, &atlases, &BakeOptions::square(4)),
            Err(Error::MixedTextures(0))
        ));
    }

    #[test]
    fn dilation_fills_from_neighbors_and_caps() {
        let (w, h) = (5u32, 1u32);
        let mut colors = vec![[0u8, 0, 0, 255]; 5];
        colors[0] = [100, 100, 100, 255];
        let mut defined = vec![true, false, false, false, false];
        let (rounds, gray) = dilate(&mut colors, &mut defined, w, h, 2);
        assert_eq!(rounds, 2);
        assert_eq!(gray, 2);
        assert_eq!(colors[1], [100, 100, 100, 255]);
        assert_eq!(colors[2], [100, 100, 100, 255]);
        assert_eq!(colors[3], FALLBACK_GRAY);
        assert!(defined.iter().all(|&d| d));
    }

    #[test]
    fn dilation_averages_defined_neighbors() {
        let mut colors = vec![[0, 0, 0, 255], [0; 4], [255, 255, 255, 255]];
        let mut defined = vec![true, false, true];
        dilate(&mut colors, &mut defined, 3, 1, 16);
        assert_eq!(colors[1], [128, 128, 128, 255]);
    }
}
