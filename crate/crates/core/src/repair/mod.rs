//! Topology repair: turns an arbitrary mesh component into a topological
//! disk that can be mapped onto the unit square.

mod cut;
mod fill;
mod handles;
mod homology;
mod nonmanifold;

use log::{debug, warn};
use serde::Serialize;

pub use cut::{cut_graph, cut_to_disk, CutGraph};
pub use fill::{fill_hole, fill_holes};
pub use handles::remove_small_handles;
pub use homology::{homology_basis, HomologyLoop};
pub use nonmanifold::{fix_nonmanifold, slice_edges};

use crate::error::{Error, Result};
use crate::mesh::{boundary_loops, genus, genus_with_boundaries, split_components, Corner, Mesh};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepairOptions {
    /// Holes with at most this many boundary edges are filled.
    pub max_hole_edges: usize,
    /// Handles whose generator is shorter than this fraction of the bounding
    /// box diagonal are removed.
    pub handle_threshold: f64,
    pub denoise: bool,
    pub fill: bool,
}

impl Default for RepairOptions {
    fn default() -> Self {
        RepairOptions {
            max_hole_edges: 100,
            handle_threshold: 0.02,
            denoise: true,
            fill: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RepairStats {
    pub input_genus: usize,
    pub input_boundaries: usize,
    pub holes_filled: usize,
    pub handles_removed: usize,
}

#[derive(Clone, Debug)]
pub struct Repaired {
    pub mesh: Mesh,
    pub stats: RepairStats,
}

/// Runs the full repair sequence on one connected component: non-manifold
/// slicing, small-hole filling, small-handle removal, and cutting to a disk.
pub fn repair_component(mesh: &Mesh, opts: &RepairOptions) -> Result<Repaired> {
    if !(opts.handle_threshold > 0.0 && opts.handle_threshold.is_finite()) {
        return Err(Error::InvalidThreshold(opts.handle_threshold));
    }
    if mesh.face_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    let mut cur = fix_nonmanifold(mesh);
    let n = split_components(&cur).len();
    if n != 1 {
        return Err(Error::Disconnected(n));
    }

    let loops = boundary_loops(&cur)?;
    let mut stats = RepairStats {
        input_genus: genus_with_boundaries(&cur, loops.len() as i64)?,
        input_boundaries: loops.len(),
        ..Default::default()
    };

    if opts.fill && loops.len() > 1 {
        // loops[0] is the longest and always stays open
        let small: Vec<_> = loops[1..]
            .iter()
            .filter(|lp| lp.len() <= opts.max_hole_edges)
            .collect();
        if !small.is_empty() {
            cur = fill_holes(&cur, &small)?;
            stats.holes_filled = small.len();
        }
    }

    let g = genus(&cur)?;
    if opts.denoise && g > 0 {
        let threshold = opts.handle_threshold * cur.bbox_diagonal();
        match denoise(&cur, threshold) {
            Ok(out) => {
                let g2 = genus(&out)?;
                stats.handles_removed = g - g2;
                cur = out;
            }
            Err(e) => warn!("handle removal skipped: {e}"),
        }
    }

    let mesh = cut_to_disk(&cur)?;
    debug!("repair stats: {stats:?}");
    Ok(Repaired { mesh, stats })
}

/// Small-handle removal for closed or open meshes. Open meshes are coned off
/// first; generators through a cone apex are ignored and the cones are
/// removed again afterwards.
fn denoise(mesh: &Mesh, threshold: f64) -> Result<Mesh> {
    let loops = boundary_loops(mesh)?;
    if loops.is_empty() {
        return handles::remove_with_mask(mesh, threshold, &vec![false; mesh.vertex_count()]);
    }
    let refs: Vec<_> = loops.iter().collect();
    let closed = fill_holes(mesh, &refs)?;
    let nv = mesh.vertex_count();
    let mut forbidden = vec![false; closed.vertex_count()];
    for f in forbidden.iter_mut().skip(nv) {
        *f = true;
    }
    let out = handles::remove_with_mask(&closed, threshold, &forbidden)?;

    let corners: Vec<Corner> = out
        .corners()
        .chunks_exact(3)
        .filter(|tri| !tri.iter().any(|c| (nv..closed.vertex_count()).contains(&c.vertex)))
        .flatten()
        .copied()
        .collect();
    let stripped = out.with_corners(out.positions().to_vec(), corners)?;
    let (stripped, _) = fix_nonmanifold(&stripped).compact()?;
    let n = split_components(&stripped).len();
    if n != 1 {
        return Err(Error::Disconnected(n));
    }
    Ok(stripped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn assert_disk(m: &Mesh) {
        assert_eq!(boundary_loops(m).unwrap().len(), 1);
        assert_eq!(genus(m).unwrap(), 0);
    }

    #[test]
    fn thin_torus_repairs_to_disk_with_handle_removed() {
        let m = synth::torus(48, 8, 1.0, 0.005);
        let r = repair_component(&m, &RepairOptions::default()).unwrap();
        assert_disk(&r.mesh);
        assert_eq!(r.stats.input_genus, 1);
        assert_eq!(r.stats.handles_removed, 1);
    }

    #[test]
    fn small_holes_are_filled_but_not_the_rim() {
        let m = synth::annulus(16, 4);
        let r = repair_component(&m, &RepairOptions::default()).unwrap();
        assert_disk(&r.mesh);
        assert_eq!(r.stats.holes_filled, 1);
        assert_eq!(r.stats.input_boundaries, 2);
    }

    #[test]
    fn no_fill_still_produces_a_disk() {
        let m = synth::annulus(16, 4);
        let opts = RepairOptions {
            fill: false,
            ..Default::default()
        };
        let r = repair_component(&m, &opts).unwrap();
        assert_disk(&r.mesh);
        assert_eq!(r.stats.holes_filled, 0);
    }

    #[test]
    fn open_thin_torus_is_denoised() {
        let t = synth::torus(48, 8, 1.0, 0.005);
        let corners = t.corners()[3..].to_vec();
        let m = Mesh::new(t.positions().to_vec(), corners, t.textures().to_vec(), t.has_uvs()).unwrap();
        let r = repair_component(&m, &RepairOptions::default()).unwrap();
        assert_disk(&r.mesh);
        assert_eq!(r.stats.handles_removed, 1);
    }

    #[test]
    fn bowtie_needs_splitting_first() {
        assert!(matches!(
            repair_component(&synth::bowtie(), &RepairOptions::default()),
            Err(Error::Disconnected(2))
        ));
    }

    #[test]
    fn rejects_bad_threshold() {
        let opts = RepairOptions {
            handle_threshold: 0.0,
            ..Default::default()
        };
        assert!(repair_component(&synth::tetrahedron(), &opts).is_err());
    }
}
