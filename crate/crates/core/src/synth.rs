//! Synthetic meshes and textures for tests, benchmarks and demos.
//!
//! Meshes that carry original UVs reference a single placeholder texture
//! `src.png` (index 0).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::mesh::{boundary_loops, obj, Corner, Mesh, Vec2, Vec3};
use crate::raster::{Rgba, TextureImage};

pub const PLACEHOLDER_TEXTURE: &str = "src.png";

fn build(positions: Vec<Vec3>, faces: &[[usize; 3]], uv: Option<&[Vec2]>) -> Mesh {
    let corners = faces
        .iter()
        .flatten()
        .map(|&v| match uv {
            Some(uv) => Corner::with_uv(v, uv[v], 0),
            None => Corner::new(v),
        })
        .collect();
    let textures = if uv.is_some() { vec![PathBuf::from(PLACEHOLDER_TEXTURE)] } else { vec![] };
    Mesh::new(positions, corners, textures, uv.is_some()).expect("synthetic mesh is valid")
}

/// Unit right triangle in the z = 0 plane with UVs equal to (x, y).
pub fn triangle() -> Mesh {
    let p = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    let uv = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    build(p, &[[0, 1, 2]], Some(&uv))
}

/// Regular tetrahedron, outward oriented, no UVs.
pub fn tetrahedron() -> Mesh {
    let p = vec![
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    build(p, &[[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]], None)
}

/// `nx * ny` vertices on the unit square (`nx, ny >= 2`), UVs equal to
/// (x, y). Vertex `j * nx + i` sits at `(i / (nx - 1), j / (ny - 1))`; every
/// cell is split along its rising diagonal.
pub fn grid(nx: usize, ny: usize) -> Mesh {
    assert!(nx >= 2 && ny >= 2);
    let mut p = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            p.push([i as f64 / (nx - 1) as f64, j as f64 / (ny - 1) as f64, 0.0]);
        }
    }
    let uv: Vec<Vec2> = p.iter().map(|q| [q[0], q[1]]).collect();
    let mut faces = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v00 = j * nx + i;
            let (v10, v01, v11) = (v00 + 1, v00 + nx, v00 + nx + 1);
            faces.push([v00, v10, v11]);
            faces.push([v00, v11, v01]);
        }
    }
    build(p, &faces, Some(&uv))
}

/// Three triangles sharing the edge 0-1.
pub fn fin_edge() -> Mesh {
    let p = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 1.0, 0.0],
        [0.5, -1.0, 0.0],
        [0.5, 0.0, 1.0],
    ];
    build(p, &[[0, 1, 2], [1, 0, 3], [0, 1, 4]], None)
}

/// Two triangles touching at vertex 0 only.
pub fn bowtie() -> Mesh {
    let p = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [-1.0, 0.0, 0.0],
        [-1.0, -1.0, 0.0],
    ];
    build(p, &[[0, 1, 2], [0, 3, 4]], None)
}

/// Torus with `m` segments around the main circle of radius `big_r` and `n`
/// around the tube of radius `small_r`. Vertex `i * n + j` is at main angle
/// `2 pi i / m` and tube angle `2 pi j / n`.
pub fn torus(m: usize, n: usize, big_r: f64, small_r: f64) -> Mesh {
    assert!(m >= 3 && n >= 3);
    let mut p = Vec::with_capacity(m * n);
    for i in 0..m {
        let th = 2.0 * PI * i as f64 / m as f64;
        for j in 0..n {
            let ph = 2.0 * PI * j as f64 / n as f64;
            let r = big_r + small_r * ph.cos();
            p.push([r * th.cos(), r * th.sin(), small_r * ph.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % m) * n + (j % n);
    let mut faces = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    build(p, &faces, None)
}

/// Genus-2 surface: two unit tori side by side, each with one quad removed
/// on the facing side, joined by a short tube.
pub fn double_torus(m: usize, n: usize) -> Mesh {
    let (big_r, small_r) = (1.0, 0.35);
    let a = torus(m, n, big_r, small_r);
    let b = translated(&torus(m, n, big_r, small_r), [2.0 * (big_r + small_r) + 0.3, 0.0, 0.0]);
    // quad (0, 0) faces +x on the first torus; quad (m/2 - 1, 0) faces -x
    let a = drop_faces(&a, &[0, 1]);
    let q = (m / 2 - 1) * n;
    let b = drop_faces(&b, &[2 * q, 2 * q + 1]);
    let joined = merge(&a, &b);
    let loops = boundary_loops(&joined).expect("manifold");
    assert_eq!(loops.len(), 2);
    bridge(&joined, &loops[0].vertices, &loops[1].vertices)
}

/// Same mesh without the listed faces; vertices keep their ids.
pub fn drop_faces(mesh: &Mesh, faces: &[usize]) -> Mesh {
    let corners = (0..mesh.face_count())
        .filter(|f| !faces.contains(f))
        .flat_map(|f| mesh.face_corners(f).to_vec())
        .collect();
    Mesh::new(mesh.positions().to_vec(), corners, mesh.textures().to_vec(), mesh.has_uvs()).expect("valid")
}

/// Connects two equally long boundary loops with a ring of triangles,
/// matching vertices to minimize total distance.
fn bridge(mesh: &Mesh, a: &[usize], b: &[usize]) -> Mesh {
    let n = a.len();
    assert_eq!(n, b.len());
    let dist = |x: usize, y: usize| crate::mesh::distance(mesh.position(x), mesh.position(y));
    // b is walked backwards against a so the new faces match both loops'
    // orientation
    let m = |c: usize, i: usize| b[(c + n - i % n) % n];
    let c = (0..n)
        .min_by(|&c1, &c2| {
            let f = |c: usize| (0..n).map(|i| dist(a[i], m(c, i))).sum::<f64>();
            f(c1).total_cmp(&f(c2))
        })
        .expect("non-empty loop");
    let mut corners = mesh.corners().to_vec();
    for i in 0..n {
        let (a0, a1) = (a[i], a[(i + 1) % n]);
        let (b0, b1) = (m(c, i), m(c, i + 1));
        for v in [a1, a0, b0, a1, b0, b1] {
            corners.push(Corner::new(v));
        }
    }
    Mesh::new(mesh.positions().to_vec(), corners, mesh.textures().to_vec(), mesh.has_uvs()).expect("valid")
}

/// Upper unit hemisphere, open at the equator: a pole plus `rings` latitude
/// rings of `segments` vertices. UVs are the orthographic projection
/// `((x + 1) / 2, (y + 1) / 2)`.
pub fn hemisphere(rings: usize, segments: usize) -> Mesh {
    assert!(rings >= 1 && segments >= 3);
    let mut p = vec![[0.0, 0.0, 1.0]];
    for k in 1..=rings {
        let phi = 0.5 * PI * k as f64 / rings as f64;
        for j in 0..segments {
            let th = 2.0 * PI * j as f64 / segments as f64;
            p.push([phi.sin() * th.cos(), phi.sin() * th.sin(), phi.cos()]);
        }
    }
    let ring = |k: usize, j: usize| 1 + (k - 1) * segments + j % segments;
    let mut faces = Vec::new();
    for j in 0..segments {
        faces.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for k in 1..rings {
        for j in 0..segments {
            let (a0, a1, b0, b1) = (ring(k, j), ring(k, j + 1), ring(k + 1, j), ring(k + 1, j + 1));
            faces.push([a0, b0, b1]);
            faces.push([a0, b1, a1]);
        }
    }
    let uv: Vec<Vec2> = p.iter().map(|q| [(q[0] + 1.0) / 2.0, (q[1] + 1.0) / 2.0]).collect();
    build(p, &faces, Some(&uv))
}

/// Vase-like surface of revolution: a closed base at the pole and an open
/// rim, so the surface is a disk. UVs are cylindrical `(angle, height)`
/// squeezed into `[0.05, 0.95]`, with a seam column of duplicate corners.
pub fn vase(rings: usize, segments: usize) -> Mesh {
    assert!(rings >= 2 && segments >= 3);
    let radius = |t: f64| 0.35 + 0.25 * (PI * (1.5 * t + 0.1)).sin() + 0.15 * t;
    let mut p = vec![[0.0, 0.0, 0.0]];
    for k in 1..=rings {
        let t = k as f64 / rings as f64;
        for j in 0..segments {
            let th = 2.0 * PI * j as f64 / segments as f64;
            let r = radius(t) * (k as f64 / 2.0).min(1.0);
            p.push([r * th.cos(), r * th.sin(), 1.5 * t]);
        }
    }
    let ring = |k: usize, j: usize| 1 + (k - 1) * segments + j % segments;
    let uv = |k: usize, j: usize| -> Vec2 {
        let s = 0.05 + 0.9 * j as f64 / segments as f64;
        let t = 0.05 + 0.9 * k as f64 / rings as f64;
        [s, t]
    };
    let mut corners = Vec::new();
    let mut push = |v: usize, k: usize, j: usize| corners.push(Corner::with_uv(v, uv(k, j), 0));
    for j in 0..segments {
        push(0, 0, j);
        push(ring(1, j + 1), 1, j + 1);
        push(ring(1, j), 1, j);
    }
    for k in 1..rings {
        for j in 0..segments {
            let (a0, a1, b0, b1) = (ring(k, j), ring(k, j + 1), ring(k + 1, j), ring(k + 1, j + 1));
            for (v, kk, jj) in [(a0, k, j), (a1, k, j + 1), (b1, k + 1, j + 1), (a0, k, j), (b1, k + 1, j + 1), (b0, k + 1, j)] {
                push(v, kk, jj);
            }
        }
    }
    Mesh::new(p, corners, vec![PathBuf::from(PLACEHOLDER_TEXTURE)], true).expect("synthetic mesh is valid")
}

/// Flat annulus between radii 1 and 2 with `rings + 1` circles of `segments`
/// vertices, UVs from the planar position.
pub fn annulus(segments: usize, rings: usize) -> Mesh {
    assert!(rings >= 1 && segments >= 3);
    let mut p = Vec::new();
    for k in 0..=rings {
        let r = 1.0 + k as f64 / rings as f64;
        for j in 0..segments {
            let th = 2.0 * PI * j as f64 / segments as f64;
            p.push([r * th.cos(), r * th.sin(), 0.0]);
        }
    }
    let id = |k: usize, j: usize| k * segments + j % segments;
    let mut faces = Vec::new();
    for k in 0..rings {
        for j in 0..segments {
            faces.push([id(k, j), id(k + 1, j), id(k + 1, j + 1)]);
            faces.push([id(k, j), id(k + 1, j + 1), id(k, j + 1)]);
        }
    }
    let uv: Vec<Vec2> = p.iter().map(|q| [(q[0] + 2.0) / 4.0, (q[1] + 2.0) / 4.0]).collect();
    build(p, &faces, Some(&uv))
}

/// Random disk with about `target` vertices: a jittered grid on the unit
/// square with random cell diagonals, lifted onto a random smooth height
/// field. UVs are the planar (x, y).
pub fn random_disk(seed: u64, target: usize) -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = ((target as f64).sqrt().round() as usize).max(3);
    let h = 1.0 / (k - 1) as f64;
    let (f1, f2) = (rng.random_range(1.0..4.0), rng.random_range(1.0..4.0));
    let (p1, p2) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
    let amp = rng.random_range(0.0..0.3);
    let mut p = Vec::with_capacity(k * k);
    let mut uv = Vec::with_capacity(k * k);
    for j in 0..k {
        for i in 0..k {
            let mut x = i as f64 * h;
            let mut y = j as f64 * h;
            // boundary vertices only slide along their side
            if i != 0 && i != k - 1 {
                x += rng.random_range(-0.2..0.2) * h;
            }
            if j != 0 && j != k - 1 {
                y += rng.random_range(-0.2..0.2) * h;
            }
            let z = amp * (f1 * x + p1).sin() * (f2 * y + p2).cos();
            p.push([x, y, z]);
            uv.push([x, y]);
        }
    }
    let mut faces = Vec::with_capacity(2 * (k - 1) * (k - 1));
    for j in 0..k - 1 {
        for i in 0..k - 1 {
            let v00 = j * k + i;
            let (v10, v01, v11) = (v00 + 1, v00 + k, v00 + k + 1);
            if rng.random_bool(0.5) {
                faces.push([v00, v10, v11]);
                faces.push([v00, v11, v01]);
            } else {
                faces.push([v00, v10, v01]);
                faces.push([v10, v11, v01]);
            }
        }
    }
    build(p, &faces, Some(&uv))
}

/// Disjoint union; `b`'s vertices follow `a`'s. Texture tables are
/// concatenated.
pub fn merge(a: &Mesh, b: &Mesh) -> Mesh {
    let mut p = a.positions().to_vec();
    p.extend_from_slice(b.positions());
    let nv = a.vertex_count();
    let nt = a.textures().len() as u32;
    let mut corners = a.corners().to_vec();
    corners.extend(b.corners().iter().map(|c| Corner {
        vertex: c.vertex + nv,
        uv: c.uv,
        texture: c.texture.map(|t| t + nt),
    }));
    let mut textures = a.textures().to_vec();
    textures.extend_from_slice(b.textures());
    Mesh::new(p, corners, textures, a.has_uvs() || b.has_uvs()).expect("valid")
}

pub fn translated(mesh: &Mesh, d: Vec3) -> Mesh {
    transformed(mesh, |q| [q[0] + d[0], q[1] + d[1], q[2] + d[2]])
}

pub fn scaled(mesh: &Mesh, s: f64) -> Mesh {
    transformed(mesh, |q| q.map(|x| x * s))
}

fn transformed(mesh: &Mesh, f: impl Fn(Vec3) -> Vec3) -> Mesh {
    let p = mesh.positions().iter().map(|&q| f(q)).collect();
    Mesh::new(p, mesh.corners().to_vec(), mesh.textures().to_vec(), mesh.has_uvs()).expect("valid")
}

/// Same mesh with every corner pointing at texture 0 of a new table.
pub fn with_texture(mesh: &Mesh, path: impl Into<PathBuf>) -> Mesh {
    let corners = mesh
        .corners()
        .iter()
        .map(|c| Corner {
            texture: c.uv.map(|_| 0),
            ..*c
        })
        .collect();
    Mesh::new(mesh.positions().to_vec(), corners, vec![path.into()], mesh.has_uvs()).expect("valid")
}

/// `size x size` checkerboard with `cells x cells` squares; the square
/// holding texture coordinate (0, 0) is `a`.
pub fn checkerboard(size: u32, cells: u32, a: Rgba, b: Rgba) -> TextureImage {
    TextureImage::from_fn(size, size, |x, y| {
        let row_from_bottom = size - 1 - y;
        let (cx, cy) = (x * cells / size, row_from_bottom * cells / size);
        if (cx + cy) % 2 == 0 {
            a
        } else {
            b
        }
    })
}

/// Smooth color ramp, handy for eyeballing distortions.
pub fn gradient(size: u32) -> TextureImage {
    let d = size.saturating_sub(1).max(1);
    TextureImage::from_fn(size, size, |x, y| [(x * 255 / d) as u8, (y * 255 / d) as u8, 96, 255])
}

/// Writes `mesh` to `dir/name.obj` with its material library and `atlas` as
/// the single source texture `dir/name.png`. Returns the OBJ path.
pub fn write_textured(dir: &Path, name: &str, mesh: &Mesh, atlas: &TextureImage) -> Result<PathBuf> {
    let png = dir.join(format!("{name}.png"));
    atlas.save_png(&png, false)?;
    let mesh = with_texture(mesh, &png);
    let path = dir.join(format!("{name}.obj"));
    obj::save_mesh(&path, &mesh)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::genus;

    #[test]
    fn shapes_have_expected_topology() {
        assert_eq!(genus(&torus(12, 6, 1.0, 0.3)).unwrap(), 1);
        assert_eq!(genus(&double_torus(12, 6)).unwrap(), 2);
        assert!(double_torus(12, 6).is_closed());
        assert_eq!(boundary_loops(&hemisphere(4, 8)).unwrap().len(), 1);
        assert_eq!(boundary_loops(&annulus(8, 2)).unwrap().len(), 2);
        let v = vase(6, 12);
        assert!(v.is_manifold());
        assert_eq!(genus(&v).unwrap(), 0);
        assert_eq!(boundary_loops(&v).unwrap().len(), 1);
        let d = random_disk(1, 400);
        assert_eq!(d.vertex_count(), 400);
        assert_eq!(genus(&d).unwrap(), 0);
        assert_eq!(boundary_loops(&d).unwrap().len(), 1);
    }

    #[test]
    fn random_disk_is_reproducible_and_unfolded() {
        let a = random_disk(42, 900);
        let b = random_disk(42, 900);
        assert_eq!(a.positions(), b.positions());
        let uv: Vec<Vec2> = a.positions().iter().map(|q| [q[0], q[1]]).collect();
        assert_eq!(crate::param::count_flips(&a, &uv), 0);
        for f in 0..a.face_count() {
            assert!(crate::param::uv_signed_area(&a, &uv, f) > 0.0);
        }
    }

    #[test]
    fn checkerboard_origin_cell() {
        let img = checkerboard(8, 2, [0, 0, 0, 255], [255; 4]);
        assert_eq!(img.get(0, 7), [0, 0, 0, 255]);
        assert_eq!(img.get(4, 7), [255; 4]);
        assert_eq!(img.get(4, 0), [0, 0, 0, 255]);
    }
}
