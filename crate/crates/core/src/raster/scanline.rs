//! Scan-line polygon filling in texture pixel space.
//!
//! Pixel `(col, row)` has its center at `((col + 0.5) / W, (row + 0.5) / H)`
//! in UV space, with `row` counted from `v = 0` upward. Each scan line is
//! intersected with the polygon edges using a half-open rule (an edge spans
//! `[min y, max y)`), so a vertex lying exactly on a scan line is counted
//! once. Sorted intersections are paired by the odd-even rule.
//!
//! For triangles, pixel centers lying exactly on an edge are resolved by the
//! top-left rule: after orienting the triangle counter-clockwise in UV space,
//! an edge owns its points when it runs downward in v, or is horizontal and
//! runs toward +u. Two triangles sharing an edge traverse it in opposite
//! directions, so exactly one of them owns it and no pixel is written twice.

use std::ops::Range;

use crate::mesh::Vec2;

/// A rasterized sample: position in the new texture space, the matching
/// position in the original atlas, and which atlas it reads from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterPoint {
    pub u_new: f64,
    pub v_new: f64,
    pub u_ori: f64,
    pub v_ori: f64,
    pub texture: u32,
}

fn unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

impl RasterPoint {
    /// Coordinates are clamped into `[0, 1]`.
    pub fn new(new: Vec2, ori: Vec2, texture: u32) -> Self {
        RasterPoint {
            u_new: unit(new[0]),
            v_new: unit(new[1]),
            u_ori: unit(ori[0]),
            v_ori: unit(ori[1]),
            texture,
        }
    }

    pub fn new_uv(&self) -> Vec2 {
        [self.u_new, self.v_new]
    }

    pub fn ori_uv(&self) -> Vec2 {
        [self.u_ori, self.v_ori]
    }
}

/// Odd-even point-in-polygon test: casts a ray toward +x and counts edge
/// crossings. A vertex exactly at the ray's height counts as lying below it.
pub fn odd_even_inside(point: Vec2, polygon: &[Vec2]) -> bool {
    let [px, py] = point;
    let n = polygon.len();
    let mut inside = false;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        if (a[1] <= py) != (b[1] <= py) {
            let x = a[0] + (py - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if px < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Intersection of a scan line with one polygon edge.
#[derive(Clone, Copy, Debug)]
struct Crossing {
    x: f64,
    edge: usize,
    t: f64,
}

fn crossings(poly: &[Vec2], y: f64, out: &mut Vec<Crossing>) {
    out.clear();
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a[1] <= y) != (b[1] <= y) {
            let t = (y - a[1]) / (b[1] - a[1]);
            out.push(Crossing {
                x: a[0] + t * (b[0] - a[0]),
                edge: i,
                t,
            });
        }
    }
    out.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.edge.cmp(&q.edge)));
}

/// Fills an arbitrary (possibly concave) polygon given in pixel coordinates.
/// Returns `(col, row)` for every pixel center inside by the odd-even rule,
/// spans being half-open `[x_left, x_right)`.
pub fn fill_polygon(poly: &[Vec2], width: u32, height: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    if poly.len() < 3 {
        return out;
    }
    let ymin = poly.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
    let ymax = poly.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
    let Some(rows) = row_span(ymin, ymax, height) else {
        return out;
    };
    let mut xs = Vec::new();
    for row in rows {
        let y = row as f64 + 0.5;
        crossings(poly, y, &mut xs);
        for pair in xs.chunks_exact(2) {
            let lo = (pair[0].x - 0.5).ceil().max(0.0);
            let hi = (pair[1].x - 0.5).ceil().min(width as f64);
            let mut col = lo as i64;
            while (col as f64) < hi {
                out.push((col as u32, row));
                col += 1;
            }
        }
    }
    out
}

/// Rows whose pixel centers lie in `[ymin, ymax]`, clipped to the image.
fn row_span(ymin: f64, ymax: f64, height: u32) -> Option<Range<u32>> {
    let lo = (ymin - 0.5).ceil().max(0.0);
    let hi = (ymax - 0.5).floor().min(height as f64 - 1.0);
    if !(lo <= hi) {
        return None;
    }
    Some(lo as u32..hi as u32 + 1)
}

/// A triangle prepared for rasterization: pixel-space corners in
/// counter-clockwise order with their original UVs.
#[derive(Clone, Debug)]
pub(crate) struct ScanTriangle {
    p: [Vec2; 3],
    ori: [Vec2; 3],
    owns: [bool; 3],
    width: u32,
    height: u32,
}

impl ScanTriangle {
    /// `None` for zero-area triangles.
    pub(crate) fn new(new_uv: [Vec2; 3], ori_uv: [Vec2; 3], width: u32, height: u32) -> Option<Self> {
        let (w, h) = (width as f64, height as f64);
        let mut p = new_uv.map(|q| [q[0] * w, q[1] * h]);
        let mut ori = ori_uv;
        let area = edge_fn(p[0], p[1], p[2]);
        if area == 0.0 || !area.is_finite() {
            return None;
        }
        if area < 0.0 {
            p.swap(1, 2);
            ori.swap(1, 2);
        }
        let owns = [0, 1, 2].map(|i| {
            let a = p[i];
            let b = p[(i + 1) % 3];
            let dy = b[1] - a[1];
            dy < 0.0 || (dy == 0.0 && b[0] > a[0])
        });
        Some(ScanTriangle {
            p,
            ori,
            owns,
            width,
            height,
        })
    }

    /// Top-left-rule coverage of a pixel-space point.
    #[inline]
    pub(crate) fn covers(&self, x: f64, y: f64) -> bool {
        (0..3).all(|i| {
            let e = edge_fn(self.p[i], self.p[(i + 1) % 3], [x, y]);
            e > 0.0 || (e == 0.0 && self.owns[i])
        })
    }

    pub(crate) fn rows(&self) -> Option<Range<u32>> {
        let ymin = self.p.iter().map(|q| q[1]).fold(f64::INFINITY, f64::min);
        let ymax = self.p.iter().map(|q| q[1]).fold(f64::NEG_INFINITY, f64::max);
        row_span(ymin, ymax, self.height)
    }

    fn ori_on_edge(&self, edge: usize, t: f64) -> Vec2 {
        let a = self.ori[edge];
        let b = self.ori[(edge + 1) % 3];
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    /// Walks the scan lines in `rows`, calling `emit(col, row, new_uv,
    /// ori_uv)` for every covered pixel center. The original UV of each
    /// sample uses the same interpolation weights as its new UV: first along
    /// the two crossed edges, then along the span between them.
    pub(crate) fn scan(&self, rows: Range<u32>, mut emit: impl FnMut(u32, u32, Vec2, Vec2)) {
        let Some(own) = self.rows() else {
            return;
        };
        let rows = rows.start.max(own.start)..rows.end.min(own.end);
        let (w, h) = (self.width as f64, self.height as f64);
        let mut xs = Vec::with_capacity(3);
        for row in rows {
            let y = row as f64 + 0.5;
            crossings(&self.p, y, &mut xs);
            for pair in xs.chunks_exact(2) {
                let (l, r) = (pair[0], pair[1]);
                let ori_l = self.ori_on_edge(l.edge, l.t);
                let ori_r = self.ori_on_edge(r.edge, r.t);
                let span = r.x - l.x;
                // one extra column each side: exact coverage is decided by
                // the edge functions, the crossings only bound the search
                let lo = ((l.x - 0.5).ceil() - 1.0).max(0.0) as i64;
                let hi = ((r.x - 0.5).floor() + 1.0).min(w - 1.0) as i64;
                for col in lo..=hi {
                    let x = col as f64 + 0.5;
                    if !self.covers(x, y) {
                        continue;
                    }
                    let s = if span > 0.0 { (x - l.x) / span } else { 0.0 };
                    let ori = [
                        ori_l[0] + s * (ori_r[0] - ori_l[0]),
                        ori_l[1] + s * (ori_r[1] - ori_l[1]),
                    ];
                    emit(col as u32, row, [x / w, y / h], ori);
                }
            }
        }
    }
}

#[inline]
fn edge_fn(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

/// Rasterizes one triangle at `resolution x resolution`, returning a point
/// for every covered pixel center. Zero-area triangles produce nothing.
pub fn scanline_fill(tri: &[RasterPoint; 3], resolution: u32) -> Vec<RasterPoint> {
    scanline_fill_rect(tri, resolution, resolution)
}

pub fn scanline_fill_rect(tri: &[RasterPoint; 3], width: u32, height: u32) -> Vec<RasterPoint> {
    let Some(st) = ScanTriangle::new(
        tri.map(|p| p.new_uv()),
        tri.map(|p| p.ori_uv()),
        width,
        height,
    ) else {
        log::debug!("skipping zero-area triangle");
        return Vec::new();
    };
    let texture = tri[0].texture;
    let mut out = Vec::new();
    st.scan(0..height, |_, _, new, ori| out.push(RasterPoint::new(new, ori, texture)));
    out
}
