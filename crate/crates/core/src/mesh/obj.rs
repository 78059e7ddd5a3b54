//! Wavefront OBJ/MTL reading and writing.
//!
//! Reading resolves `usemtl` names through every `mtllib` in the file and
//! assigns one source-texture index per distinct `map_Kd` image path.
//! Polygons are fan-triangulated. Writing uses Rust's shortest round-trip
//! float formatting, so positions and UVs reload bit-exactly.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use log::{debug, warn};

use super::{Corner, Mesh, Vec2, Vec3};
use crate::error::{Error, Result};

#[derive(Default)]
struct Material {
    texture: Option<PathBuf>,
}

struct FaceRecord {
    line: usize,
    number: usize,
    corners: Vec<(usize, Option<usize>)>,
    material: Option<(String, usize)>,
}

/// Loads an OBJ file and the material libraries it references.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_obj(&text, &path.display().to_string(), base)
}

/// Parses OBJ text. Material libraries and texture paths are resolved
/// relative to `base_dir`; `name` is used in error messages.
pub fn parse_obj(text: &str, name: &str, base_dir: &Path) -> Result<Mesh> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: name.to_string(),
        line,
        msg,
    };

    let mut positions: Vec<Vec3> = Vec::new();
    let mut uvs: Vec<Vec2> = Vec::new();
    let mut faces: Vec<FaceRecord> = Vec::new();
    let mut materials: HashMap<String, Material> = HashMap::new();
    let mut current_material: Option<(String, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap_or("");
        match keyword {
            "v" => {
                let p = parse_floats::<3>(&mut tokens)
                    .ok_or_else(|| parse_err(line_no, format!("bad vertex `{line}`")))?;
                positions.push(p);
            }
            "vt" => {
                let mut vals = tokens.map(str::parse::<f64>);
                let u = vals.next();
                let v = vals.next().unwrap_or(Ok(0.0));
                match (u, v) {
                    (Some(Ok(u)), Ok(v)) if u.is_finite() && v.is_finite() => uvs.push([u, v]),
                    _ => return Err(parse_err(line_no, format!("bad texture coordinate `{line}`"))),
                }
            }
            "f" => {
                let mut corners = Vec::new();
                for tok in tokens {
                    corners.push(parse_face_vertex(tok, positions.len(), uvs.len()).ok_or_else(
                        || parse_err(line_no, format!("bad face vertex `{tok}`")),
                    )?);
                }
                if corners.len() < 3 {
                    return Err(parse_err(line_no, "face with fewer than 3 vertices".into()));
                }
                faces.push(FaceRecord {
                    line: line_no,
                    number: faces.len() + 1,
                    corners,
                    material: current_material.clone(),
                });
            }
            "usemtl" => {
                let rest = line[keyword.len()..].trim();
                current_material = Some((rest.to_string(), line_no));
            }
            "mtllib" => {
                let rest = line[keyword.len()..].trim();
                for lib in rest.split_whitespace() {
                    let lib_path = base_dir.join(lib);
                    let lib_text =
                        fs::read_to_string(&lib_path).map_err(|e| Error::io(&lib_path, e))?;
                    let lib_dir = lib_path.parent().unwrap_or(base_dir);
                    parse_mtl(&lib_text, lib_dir, &mut materials);
                }
            }
            "vn" | "vp" | "o" | "g" | "s" | "l" | "p" => {}
            other => debug!("{name}:{line_no}: ignoring `{other}`"),
        }
    }

    let with_uv = faces
        .iter()
        .flat_map(|f| &f.corners)
        .filter(|c| c.1.is_some())
        .count();
    let has_uvs = with_uv > 0;
    if has_uvs {
        if let Some(f) = faces.iter().find(|f| f.corners.iter().any(|c| c.1.is_none())) {
            return Err(Error::MissingUv {
                path: name.to_string(),
                line: f.line,
                face: f.number,
            });
        }
    }

    let mut texture_paths: Vec<PathBuf> = Vec::new();
    let mut texture_index: HashMap<PathBuf, u32> = HashMap::new();
    let mut resolved: HashMap<String, Option<u32>> = HashMap::new();

    let mut corners = Vec::with_capacity(faces.len() * 3);
    let mut clamped = 0usize;
    let mut skipped = 0usize;
    for face in &faces {
        let texture = match &face.material {
            None => None,
            Some((mat, line)) => {
                if let Some(t) = resolved.get(mat) {
                    *t
                } else {
                    let m = materials.get(mat).ok_or_else(|| Error::UnknownMaterial {
                        path: name.to_string(),
                        line: *line,
                        name: mat.clone(),
                    })?;
                    let t = m.texture.as_ref().map(|p| {
                        *texture_index.entry(p.clone()).or_insert_with(|| {
                            texture_paths.push(p.clone());
                            (texture_paths.len() - 1) as u32
                        })
                    });
                    resolved.insert(mat.clone(), t);
                    t
                }
            }
        };
        let make = |(v, t): (usize, Option<usize>), clamped: &mut usize| {
            let uv = t.map(|t| {
                let [u, v] = uvs[t];
                let c = [u.clamp(0.0, 1.0), v.clamp(0.0, 1.0)];
                if c != [u, v] {
                    *clamped += 1;
                }
                c
            });
            Corner {
                vertex: v,
                uv,
                texture: if uv.is_some() { texture } else { None },
            }
        };
        for i in 1..face.corners.len() - 1 {
            let tri = [face.corners[0], face.corners[i], face.corners[i + 1]];
            if tri[0].0 == tri[1].0 || tri[1].0 == tri[2].0 || tri[0].0 == tri[2].0 {
                skipped += 1;
                continue;
            }
            for c in tri {
                corners.push(make(c, &mut clamped));
            }
        }
    }
    if clamped > 0 {
        warn!("{name}: clamped {clamped} texture coordinates into [0,1]");
    }
    if skipped > 0 {
        warn!("{name}: skipped {skipped} triangles with repeated vertices");
    }

    Mesh::new(positions, corners, texture_paths, has_uvs)
}

fn parse_floats<const N: usize>(tokens: &mut std::str::SplitWhitespace<'_>) -> Option<[f64; N]> {
    let mut out = [0.0; N];
    for slot in out.iter_mut() {
        let v: f64 = tokens.next()?.parse().ok()?;
        if !v.is_finite() {
            return None;
        }
        *slot = v;
    }
    Some(out)
}

fn resolve_index(raw: &str, count: usize) -> Option<usize> {
    let i: i64 = raw.parse().ok()?;
    let idx = if i > 0 {
        i - 1
    } else if i < 0 {
        count as i64 + i
    } else {
        return None;
    };
    (0..count as i64).contains(&idx).then_some(idx as usize)
}

fn parse_face_vertex(tok: &str, nv: usize, nt: usize) -> Option<(usize, Option<usize>)> {
    let mut parts = tok.split('/');
    let v = resolve_index(parts.next()?, nv)?;
    let t = match parts.next() {
        None | Some("") => None,
        Some(s) => Some(resolve_index(s, nt)?),
    };
    Some((v, t))
}

fn parse_mtl(text: &str, dir: &Path, out: &mut HashMap<String, Material>) {
    let mut current: Option<String> = None;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let Some(keyword) = line.split_whitespace().next() else {
            continue;
        };
        let rest = line[keyword.len()..].trim();
        match keyword {
            "newmtl" => {
                current = Some(rest.to_string());
                out.insert(rest.to_string(), Material::default());
            }
            "map_Kd" => {
                if let Some(m) = current.as_ref().and_then(|n| out.get_mut(n)) {
                    // options such as `-s 1 1 1` precede the file name
                    let file = if rest.starts_with('-') {
                        rest.split_whitespace().last().unwrap_or("")
                    } else {
                        rest
                    };
                    if !file.is_empty() {
                        m.texture = Some(dir.join(file));
                    }
                }
            }
            _ => {}
        }
    }
}

/// Which texture coordinates to emit for a part.
#[derive(Clone, Copy, Debug)]
pub enum UvSource<'a> {
    /// Per-corner original UVs, grouped by source texture.
    Original,
    /// One UV per vertex (e.g. a computed parameterization).
    PerVertex(&'a [Vec2]),
    None,
}

pub struct ObjPart<'a> {
    pub mesh: &'a Mesh,
    pub uvs: UvSource<'a>,
    /// Material used for the whole part when `uvs` is `PerVertex`.
    pub material: Option<&'a str>,
}

/// Writes several meshes into one OBJ stream, vertex ids offset per part.
/// Parts with `UvSource::Original` switch between materials named `tex<i>`
/// (source texture `i`) and `untextured`.
pub fn write_obj<W: Write>(mut w: W, mtllib: Option<&str>, parts: &[ObjPart<'_>]) -> io::Result<()> {
    let mut buf = String::new();
    if let Some(lib) = mtllib {
        writeln!(buf, "mtllib {lib}").unwrap();
    }
    let mut v_off = 0usize;
    let mut t_off = 0usize;
    for (k, part) in parts.iter().enumerate() {
        let m = part.mesh;
        writeln!(buf, "o part{k}").unwrap();
        for p in m.positions() {
            writeln!(buf, "v {} {} {}", p[0], p[1], p[2]).unwrap();
        }
        match part.uvs {
            UvSource::PerVertex(uv) => {
                assert_eq!(uv.len(), m.vertex_count(), "one UV per vertex");
                for t in uv {
                    writeln!(buf, "vt {} {}", t[0], t[1]).unwrap();
                }
                if let Some(mat) = part.material {
                    writeln!(buf, "usemtl {mat}").unwrap();
                }
                for f in m.faces() {
                    let [a, b, c] = f.map(|i| i + 1);
                    writeln!(
                        buf,
                        "f {}/{} {}/{} {}/{}",
                        a + v_off,
                        a + t_off,
                        b + v_off,
                        b + t_off,
                        c + v_off,
                        c + t_off
                    )
                    .unwrap();
                }
                t_off += uv.len();
            }
            UvSource::Original => {
                let mut ids: HashMap<[u64; 2], usize> = HashMap::new();
                let mut order = Vec::new();
                let mut corner_t = Vec::with_capacity(m.halfedge_count());
                for c in m.corners() {
                    let uv = c.uv.unwrap_or([0.0, 0.0]);
                    let key = [uv[0].to_bits(), uv[1].to_bits()];
                    let id = *ids.entry(key).or_insert_with(|| {
                        order.push(uv);
                        order.len() - 1
                    });
                    corner_t.push(id);
                }
                for t in &order {
                    writeln!(buf, "vt {} {}", t[0], t[1]).unwrap();
                }
                let mut current: Option<Option<u32>> = None;
                for f in 0..m.face_count() {
                    let cs = m.face_corners(f);
                    let tex = cs[0].texture;
                    if current != Some(tex) {
                        match tex {
                            Some(i) => writeln!(buf, "usemtl tex{i}").unwrap(),
                            None => writeln!(buf, "usemtl untextured").unwrap(),
                        }
                        current = Some(tex);
                    }
                    buf.push('f');
                    for (k, c) in cs.iter().enumerate() {
                        write!(buf, " {}/{}", c.vertex + 1 + v_off, corner_t[3 * f + k] + 1 + t_off)
                            .unwrap();
                    }
                    buf.push('\n');
                }
                t_off += order.len();
            }
            UvSource::None => {
                for f in m.faces() {
                    let [a, b, c] = f.map(|i| i + 1 + v_off);
                    writeln!(buf, "f {a} {b} {c}").unwrap();
                }
            }
        }
        v_off += m.vertex_count();
        w.write_all(buf.as_bytes())?;
        buf.clear();
    }
    w.write_all(buf.as_bytes())
}

/// Saves a mesh with its original UVs next to a material library naming the
/// source textures.
pub fn save_mesh(path: impl AsRef<Path>, mesh: &Mesh) -> Result<()> {
    let path = path.as_ref();
    let mtl_path = path.with_extension("mtl");
    let mtl_name = mtl_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let uvs = if mesh.has_uvs() { UvSource::Original } else { UvSource::None };
    let mut out = Vec::new();
    write_obj(
        &mut out,
        mesh.has_uvs().then_some(mtl_name.as_str()),
        &[ObjPart { mesh, uvs, material: None }],
    )
    .map_err(|e| Error::io(path, e))?;
    fs::write(path, out).map_err(|e| Error::io(path, e))?;

    if mesh.has_uvs() {
        let mut mtl = String::from("newmtl untextured\nKd 1 1 1\n");
        let dir = path.parent().unwrap_or(Path::new(""));
        for (i, tex) in mesh.textures().iter().enumerate() {
            let tex = tex.strip_prefix(dir).unwrap_or(tex);
            writeln!(mtl, "newmtl tex{i}\nKd 1 1 1\nmap_Kd {}", tex.display()).unwrap();
        }
        fs::write(&mtl_path, mtl).map_err(|e| Error::io(&mtl_path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Mesh> {
        parse_obj(text, "test.obj", Path::new("."))
    }

    #[test]
    fn single_triangle() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nf 1/1 2/2 3/3\n").unwrap();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.face_count(), 1);
        assert!(m.has_uvs());
        assert!(m.corners().iter().all(|c| c.uv.is_some()));
        assert_eq!(m.corners()[2].uv, Some([0.0, 1.0]));
    }

    #[test]
    fn quad_is_fan_split() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
        assert_eq!(m.face_count(), 2);
        assert_eq!(m.face(0), [0, 1, 2]);
        assert_eq!(m.face(1), [0, 2, 3]);
        assert!(!m.has_uvs());
    }

    #[test]
    fn negative_indices_and_normals() {
        let m = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nvn 0 0 1\nf -3/-3/1 -2/-2/1 -1/-1/1\n")
            .unwrap();
        assert_eq!(m.face(0), [0, 1, 2]);
        assert_eq!(m.corners()[1].uv, Some([1.0, 0.0]));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse("v 0 0 0\nv 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn missing_uv_names_face() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nvt 0 0\nvt 1 0\nvt 0 1\n\
                    f 1/1 2/2 3/3\nf 2 4 3\n";
        match parse(text).unwrap_err() {
            Error::MissingUv { face, line, .. } => {
                assert_eq!(face, 2);
                assert_eq!(line, 9);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_material_is_an_error() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nusemtl nope\nf 1 2 3\n";
        assert!(matches!(parse(text), Err(Error::UnknownMaterial { line: 4, .. })));
    }

    #[test]
    fn nine_textures_get_nine_indices() {
        let dir = tempfile::tempdir().unwrap();
        let mut mtl = String::new();
        let mut obj = String::from("mtllib scene.mtl\n");
        for i in 0..9 {
            writeln!(mtl, "newmtl m{i}\nmap_Kd atlas_{i}.png").unwrap();
            let x = i as f64 * 2.0;
            writeln!(obj, "v {x} 0 0\nv {} 0 0\nv {x} 1 0", x + 1.0).unwrap();
        }
        obj.push_str("vt 0 0\nvt 1 0\nvt 0 1\n");
        for i in 0..9 {
            let b = 3 * i + 1;
            writeln!(obj, "usemtl m{i}\nf {}/1 {}/2 {}/3", b, b + 1, b + 2).unwrap();
        }
        fs::write(dir.path().join("scene.mtl"), mtl).unwrap();
        fs::write(dir.path().join("scene.obj"), obj).unwrap();
        let m = load_mesh(dir.path().join("scene.obj")).unwrap();
        assert_eq!(m.textures().len(), 9);
        let mut seen: Vec<u32> = m.corners().iter().filter_map(|c| c.texture).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen, (0..9).collect::<Vec<_>>());
        assert_eq!(m.textures()[4], dir.path().join("atlas_4.png"));
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut text = String::from("mtllib a.mtl\nusemtl a\n");
        let vals = [0.1, 1.0 / 3.0, 2.0f64.sqrt() - 1.0, 1e-7, 0.999999999999];
        for (i, x) in vals.iter().enumerate() {
            writeln!(text, "v {x} {} {}", x * 7.0, -(i as f64)).unwrap();
            writeln!(text, "vt {x} {}", 1.0 - x).unwrap();
        }
        text.push_str("f 1/1 2/2 3/3\nf 3/3 4/4 5/5\n");
        fs::write(dir.path().join("a.mtl"), "newmtl a\nmap_Kd a.png\n").unwrap();
        fs::write(dir.path().join("in.obj"), text).unwrap();

        let a = load_mesh(dir.path().join("in.obj")).unwrap();
        save_mesh(dir.path().join("out.obj"), &a).unwrap();
        let b = load_mesh(dir.path().join("out.obj")).unwrap();
        assert_eq!(a.vertex_count(), b.vertex_count());
        assert_eq!(a.face_count(), b.face_count());
        assert_eq!(a.positions(), b.positions());
        assert_eq!(a.corners(), b.corners());
        assert_eq!(a.textures(), b.textures());
    }
}
