//! End-to-end run: load, split into components, repair, parameterize, bake
//! and save.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::obj::{load_mesh, write_obj, ObjPart, UvSource};
use crate::mesh::{boundary_loops, split_components, Component, Corner, Mesh};
use crate::param::{parameterize, split_boundary_chords, ParamOptions, Parameterization, WeightScheme};
use crate::raster::{bake_texture, fill_polygon, BakeOptions, BakeOutput, Filter, TextureImage};
use crate::repair::{fix_nonmanifold, repair_component, RepairOptions, RepairStats};

pub const MIN_RESOLUTION: u32 = 16;
pub const MAX_RESOLUTION: u32 = 16384;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Longer side of each output texture in pixels.
    pub resolution: u32,
    /// Output image aspect ratio `(w, h)`; UVs still span the unit square.
    pub aspect: Option<(u32, u32)>,
    pub repair: RepairOptions,
    pub param: ParamOptions,
    pub filter: Filter,
    pub supersample: u32,
    pub rgba: bool,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            resolution: 4096,
            aspect: None,
            repair: RepairOptions::default(),
            param: ParamOptions::default(),
            filter: Filter::Bilinear,
            supersample: 1,
            rgba: false,
            threads: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&self.resolution) {
            return Err(Error::Config(format!(
                "resolution must be in [{MIN_RESOLUTION}, {MAX_RESOLUTION}], got {}",
                self.resolution
            )));
        }
        if let Some((w, h)) = self.aspect {
            if w == 0 || h == 0 {
                return Err(Error::Config(format!("aspect ratio {w}:{h} must be positive")));
            }
        }
        let t = self.repair.handle_threshold;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidThreshold(t));
        }
        if self.repair.max_hole_edges == 0 {
            return Err(Error::Config("max hole edges must be positive".into()));
        }
        let tol = self.param.solve.tol;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidThreshold(tol));
        }
        if !matches!(self.supersample, 1 | 2 | 4) {
            return Err(Error::Config(format!(
                "supersample must be 1, 2 or 4, got {}",
                self.supersample
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be positive".into()));
        }
        Ok(())
    }

    /// Output image size: the longer side is `resolution`.
    pub fn image_size(&self) -> (u32, u32) {
        let r = self.resolution;
        match self.aspect {
            None => (r, r),
            Some((w, h)) if w >= h => (r, scale_side(r, h, w)),
            Some((w, h)) => (scale_side(r, w, h), r),
        }
    }
}

fn scale_side(r: u32, num: u32, den: u32) -> u32 {
    ((r as f64 * num as f64 / den as f64).round() as u32).max(1)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub repair: f64,
    pub parameterize: f64,
    pub bake: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub index: usize,
    pub input_vertices: usize,
    pub input_faces: usize,
    pub input_genus: usize,
    pub input_boundaries: usize,
    pub holes_filled: usize,
    pub handles_removed: usize,
    pub output_vertices: usize,
    pub output_faces: usize,
    pub weights: WeightScheme,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub flips: usize,
    /// `None` when the input has no texture coordinates.
    pub texture: Option<String>,
    pub defined_before_dilation: f64,
    pub defined_after_dilation: f64,
    pub dilation_rounds: usize,
    /// Edges on a texture-chart border: mesh boundary edges plus interior
    /// edges whose two sides use different texture coordinates.
    pub input_seam_edges: usize,
    pub output_seam_edges: usize,
    /// Fraction of source-atlas pixels covered by this component's charts.
    pub input_atlas_utilization: f64,
    pub seconds: StageTimings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input: String,
    pub output_mesh: String,
    pub image_width: u32,
    pub image_height: u32,
    pub components: Vec<ComponentReport>,
    pub total_seconds: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        report_to_json(self)
    }
}

/// Pretty JSON with fields in declaration order; floats use the shortest
/// representation that parses back to the same value.
pub fn report_to_json(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// Per-component result before anything is written.
struct Processed {
    mesh: Mesh,
    param: Parameterization,
    bake: Option<BakeOutput>,
    report: ComponentReport,
}

/// Runs the whole pipeline and writes `<stem>.obj`, `<stem>.mtl` and one
/// `<stem>_<i>.png` per component into `out_dir`. On error, files written by
/// this call are removed.
pub fn run(input: &Path, out_dir: &Path, cfg: &PipelineConfig) -> Result<RunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mesh = load_mesh(input).map_err(|e| e.in_stage("load"))?;
    if mesh.face_count() == 0 {
        return Err(Error::EmptyMesh.in_stage("load"));
    }
    let atlases: Vec<TextureImage> = if mesh.has_uvs() {
        mesh.textures()
            .iter()
            .map(TextureImage::load_png)
            .collect::<Result<_>>()
            .map_err(|e| e.in_stage("load"))?
    } else {
        Vec::new()
    };

    let mesh = fix_nonmanifold(&mesh);
    let components = split_components(&mesh);
    info!("{} component(s)", components.len());

    let (w, h) = cfg.image_size();
    let work = || -> Result<Vec<Processed>> {
        components
            .par_iter()
            .enumerate()
            .map(|(i, c)| process(i, c, &atlases, cfg, w, h))
            .collect()
    };
    let processed = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(work),
        None => work(),
    }?;

    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let mut written = Vec::new();
    let result = write_outputs(out_dir, &stem, &processed, cfg.rgba, &mut written);
    if let Err(e) = result {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        return Err(e.in_stage("save"));
    }

    let mut components: Vec<ComponentReport> = processed.into_iter().map(|p| {
        let mut r = p.report;
        if p.bake.is_some() {
            r.texture = Some(texture_name(&stem, r.index));
        }
        r
    }).collect();
    components.sort_by_key(|r| r.index);
    Ok(RunReport {
        input: input.display().to_string(),
        output_mesh: out_dir.join(format!("{stem}.obj")).display().to_string(),
        image_width: w,
        image_height: h,
        components,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

fn process(index: usize, comp: &Component, atlases: &[TextureImage], cfg: &PipelineConfig, w: u32, h: u32) -> Result<Processed> {
    let input = &comp.mesh;
    let t = Instant::now();
    let repaired = repair_component(input, &cfg.repair).map_err(|e| e.in_stage("repair"))?;
    let mesh = ensure_four_boundary_vertices(&repaired.mesh)
        .and_then(|m| split_boundary_chords(&m))
        .map_err(|e| e.in_stage("repair"))?;
    let t_repair = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let param = parameterize(&mesh, &cfg.param).map_err(|e| e.in_stage("parameterize"))?;
    let t_param = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let bake = if mesh.has_uvs() {
        let opts = BakeOptions {
            width: w,
            height: h,
            filter: cfg.filter,
            supersample: cfg.supersample,
        };
        Some(bake_texture(&mesh, &param.uv, atlases, &opts).map_err(|e| e.in_stage("bake"))?)
    } else {
        None
    };
    let t_bake = t.elapsed().as_secs_f64();

    let RepairStats {
        input_genus,
        input_boundaries,
        holes_filled,
        handles_removed,
    } = repaired.stats;
    let output_seams = boundary_loops(&mesh).map(|l| l.iter().map(|lp| lp.len()).sum()).unwrap_or(0);
    let report = ComponentReport {
        index,
        input_vertices: input.vertex_count(),
        input_faces: input.face_count(),
        input_genus,
        input_boundaries,
        holes_filled,
        handles_removed,
        output_vertices: mesh.vertex_count(),
        output_faces: mesh.face_count(),
        weights: param.scheme,
        energy: param.energy,
        residual: param.residual,
        iterations: param.iterations,
        flips: param.flips,
        texture: None,
        defined_before_dilation: bake.as_ref().map_or(0.0, |b| b.defined_before_dilation),
        defined_after_dilation: bake.as_ref().map_or(0.0, |b| b.image.defined_fraction()),
        dilation_rounds: bake.as_ref().map_or(0, |b| b.dilation_rounds),
        input_seam_edges: seam_edges(input),
        output_seam_edges: output_seams,
        input_atlas_utilization: atlas_utilization(input, atlases),
        seconds: StageTimings {
            repair: t_repair,
            parameterize: t_param,
            bake: t_bake,
        },
    };
    if param.flips > 0 {
        warn!("component {index}: {} flipped triangles in the parameterization", param.flips);
    }
    Ok(Processed {
        mesh,
        param,
        bake,
        report,
    })
}

/// The square map needs four boundary vertices. A disk bounded by a
/// triangle gets its longest boundary edge split at the midpoint.
fn ensure_four_boundary_vertices(mesh: &Mesh) -> Result<Mesh> {
    let loops = boundary_loops(mesh)?;
    let Some(lp) = loops.first() else {
        return Ok(mesh.clone());
    };
    if lp.len() >= 4 {
        return Ok(mesh.clone());
    }
    let lens = lp.edge_lengths(mesh);
    let i = (0..lens.len()).max_by(|&a, &b| lens[a].total_cmp(&lens[b])).expect("loop");
    let h = lp.halfedges[i];
    let f = mesh.face_of(h);
    let k = h % 3;
    let cs = mesh.face_corners(f);
    let (a, b, c) = (cs[k], cs[(k + 1) % 3], cs[(k + 2) % 3]);
    let (pa, pb) = (mesh.position(a.vertex), mesh.position(b.vertex));
    let mut positions = mesh.positions().to_vec();
    positions.push([0, 1, 2].map(|d| 0.5 * (pa[d] + pb[d])));
    let mid = Corner {
        vertex: positions.len() - 1,
        uv: match (a.uv, b.uv) {
            (Some(x), Some(y)) => Some([0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])]),
            _ => None,
        },
        texture: if a.texture == b.texture { a.texture } else { None },
    };
    let mut corners = mesh.corners().to_vec();
    corners[3 * f..3 * f + 3].copy_from_slice(&[a, mid, c]);
    corners.extend_from_slice(&[mid, b, c]);
    mesh.with_corners(positions, corners)
}

fn seam_edges(mesh: &Mesh) -> usize {
    (0..mesh.edge_count())
        .filter(|&e| {
            let h = mesh.edge_halfedge(e);
            let Some(t) = mesh.twin(h) else {
                return true;
            };
            // corners at each end on both sides
            let c = mesh.corners();
            let (h_next, t_next) = (mesh.next(h), mesh.next(t));
            let same = |x: &Corner, y: &Corner| x.uv == y.uv && x.texture == y.texture;
            !(same(&c[h], &c[t_next]) && same(&c[h_next], &c[t]))
        })
        .count()
}

/// Coverage of the source atlases by the mesh's original UV triangles,
/// measured on a grid of at most 1024 x 1024 cells per atlas.
fn atlas_utilization(mesh: &Mesh, atlases: &[TextureImage]) -> f64 {
    if atlases.is_empty() {
        return 0.0;
    }
    let mut covered = 0usize;
    let mut total = 0usize;
    for (t, atlas) in atlases.iter().enumerate() {
        let tris: Vec<[[f64; 2]; 3]> = (0..mesh.face_count())
            .filter_map(|f| {
                let cs = mesh.face_corners(f);
                if cs.iter().all(|c| c.texture == Some(t as u32)) {
                    Some([0, 1, 2].map(|k| cs[k].uv.unwrap_or([0.0, 0.0])))
                } else {
                    None
                }
            })
            .collect();
        if tris.is_empty() {
            continue;
        }
        let (w, h) = (atlas.width().min(1024), atlas.height().min(1024));
        let mut mask = vec![false; (w * h) as usize];
        for tri in &tris {
            let px = tri.map(|q| [q[0] * w as f64, q[1] * h as f64]);
            for (x, y) in fill_polygon(&px, w, h) {
                mask[(y * w + x) as usize] = true;
            }
        }
        covered += mask.iter().filter(|&&m| m).count();
        total += mask.len();
    }
    if total == 0 {
        0.0
    } else {
        covered as f64 / total as f64
    }
}

fn write_outputs(out_dir: &Path, stem: &str, processed: &[Processed], rgba: bool, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mtl_name = format!("{stem}.mtl");
    let names: Vec<String> = (0..processed.len()).map(|i| format!("component{i}")).collect();
    let parts: Vec<ObjPart<'_>> = processed
        .iter()
        .zip(&names)
        .map(|(p, name)| ObjPart {
            mesh: &p.mesh,
            uvs: UvSource::PerVertex(&p.param.uv),
            material: Some(name.as_str()),
        })
        .collect();
    let mut obj = Vec::new();
    write_obj(&mut obj, Some(&mtl_name), &parts).expect("writing to memory");
    let obj_path = out_dir.join(format!("{stem}.obj"));
    written.push(obj_path.clone());
    fs::write(&obj_path, obj).map_err(|e| Error::io(&obj_path, e))?;

    let mut mtl = String::new();
    for (i, p) in processed.iter().enumerate() {
        mtl.push_str(&format!("newmtl {}\nKd 1 1 1\n", names[i]));
        if let Some(b) = &p.bake {
            let png = texture_name(stem, i);
            mtl.push_str(&format!("map_Kd {png}\n"));
            let path = out_dir.join(&png);
            written.push(path.clone());
            b.image.save_png(&path, rgba)?;
        }
    }
    let mtl_path = out_dir.join(&mtl_name);
    written.push(mtl_path.clone());
    fs::write(&mtl_path, mtl).map_err(|e| Error::io(&mtl_path, e))?;
    Ok(())
}

/// Texture file name written for component `i` of input `stem`.
pub fn texture_name(stem: &str, i: usize) -> String {
    format!("{stem}_{i}.png")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn small_cfg() -> PipelineConfig {
        PipelineConfig {
            resolution: 64,
            ..Default::default()
        }
    }

    #[test]
    fn validation() {
        assert!(small_cfg().validate().is_ok());
        for r in [15, 16385] {
            let c = PipelineConfig {
                resolution: r,
                ..Default::default()
            };
            assert!(matches!(c.validate(), Err(Error::Config(_))));
        }
        let mut c = small_cfg();
        c.repair.handle_threshold = -1.0;
        assert!(matches!(c.validate(), Err(Error::InvalidThreshold(_))));
    }

    #[test]
    fn aspect_sets_image_size() {
        let mut c = small_cfg();
        c.resolution = 1024;
        c.aspect = Some((2, 1));
        assert_eq!(c.image_size(), (1024, 512));
        c.aspect = Some((3, 4));
        assert_eq!(c.image_size(), (768, 1024));
    }

    #[test]
    fn triangle_component_gets_a_fourth_boundary_vertex() {
        let m = ensure_four_boundary_vertices(&synth::triangle()).unwrap();
        assert_eq!(m.face_count(), 2);
        assert_eq!(boundary_loops(&m).unwrap()[0].len(), 4);
        assert!(m.corners().iter().all(|c| c.uv.is_some()));
    }

    #[test]
    fn seams_of_a_plain_grid_are_its_rim() {
        let g = synth::grid(4, 4);
        assert_eq!(seam_edges(&g), 12);
    }

    #[test]
    fn two_components_give_two_textures() {
        let dir = tempfile::tempdir().unwrap();
        let a = synth::grid(5, 5);
        let b = synth::translated(&synth::grid(4, 4), [3.0, 0.0, 0.0]);
        let both = synth::merge(&a, &b);
        let path = synth::write_textured(dir.path(), "pair", &both, &synth::gradient(32)).unwrap();
        let out = dir.path().join("out");
        let report = run(&path, &out, &small_cfg()).unwrap();
        assert_eq!(report.components.len(), 2);
        assert!(out.join("pair_0.png").exists());
        assert!(out.join("pair_1.png").exists());
        let back = crate::mesh::obj::load_mesh(out.join("pair.obj")).unwrap();
        assert_eq!(back.face_count(), a.face_count() + b.face_count());
        assert_eq!(back.textures().len(), 2);
    }

    #[test]
    fn report_json_round_trip() {
        let r = RunReport {
            input: "in.obj".into(),
            output_mesh: "out/in.obj".into(),
            image_width: 16,
            image_height: 16,
            components: vec![],
            total_seconds: 0.5,
        };
        let s = report_to_json(&r);
        let back: RunReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(report_to_json(&back), s);
    }

    #[test]
    fn missing_input_names_the_stage() {
        let dir = tempfile::tempdir().unwrap();
        let err = run(&dir.path().join("nope.obj"), &dir.path().join("o"), &small_cfg()).unwrap_err();
        assert!(err.to_string().starts_with("load failed"), "{err}");
        assert!(!dir.path().join("o").exists());
    }
}
