use log::debug;

use super::fill::fill_holes;
use super::homology::{loops_through, sort_loops, HomologyLoop};
use super::nonmanifold::slice_edges;
use crate::error::{Error, Result};
use crate::mesh::{boundary_loops, genus, Mesh};

/// Roots used to search for short generators. Generators through a single
/// root are shortest only among loops through that root, so several
/// well-spread roots are tried.
const MAX_ROOTS: usize = 16;

/// Removes handles whose shortest generator is shorter than `fraction` of
/// the bounding-box diagonal: the mesh is cut along the loop and both new
/// boundaries are filled. Repeats until no short generator is left.
pub fn remove_small_handles(mesh: &Mesh, fraction: f64) -> Result<Mesh> {
    if !(fraction > 0.0 && fraction.is_finite()) {
        return Err(Error::InvalidThreshold(fraction));
    }
    let b = boundary_loops(mesh)?.len();
    if b > 0 {
        return Err(Error::OpenMesh(b));
    }
    let threshold = fraction * mesh.bbox_diagonal();
    remove_with_mask(mesh, threshold, &vec![false; mesh.vertex_count()])
}

/// Core loop. Generators through vertices flagged in `forbidden` are
/// ignored; flags persist for existing ids across rebuilds.
pub(crate) fn remove_with_mask(mesh: &Mesh, threshold: f64, forbidden: &[bool]) -> Result<Mesh> {
    let mut cur = mesh.clone();
    let mut g = genus(&cur)?;
    while g > 0 {
        let is_forbidden = |v: usize| forbidden.get(v).copied().unwrap_or(false);
        let candidates: Vec<HomologyLoop> = short_loops(&cur, threshold)
            .into_iter()
            .filter(|lp| !lp.vertices.iter().any(|&v| is_forbidden(v)))
            .collect();
        let mut removed = false;
        for lp in &candidates {
            let (cut, _) = slice_edges(&cur, &lp.edges);
            let Ok(loops) = boundary_loops(&cut) else {
                continue;
            };
            let refs: Vec<_> = loops.iter().collect();
            let Ok(filled) = fill_holes(&cut, &refs) else {
                continue;
            };
            if filled.is_closed() && genus(&filled).ok() == Some(g - 1) {
                debug!("removed handle with generator length {:.4e}", lp.length);
                cur = filled;
                g -= 1;
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
    }
    Ok(cur)
}

/// Generators shorter than `threshold` from several farthest-point roots,
/// ascending by length.
fn short_loops(mesh: &Mesh, threshold: f64) -> Vec<HomologyLoop> {
    let Some(first) = mesh.vertex_nearest_bbox_center() else {
        return Vec::new();
    };
    let cost = |e: usize| mesh.edge_length(e);
    let mut min_dist = vec![f64::INFINITY; mesh.vertex_count()];
    let mut root = first;
    let mut out = Vec::new();
    for _ in 0..MAX_ROOTS {
        let (loops, tree) = loops_through(mesh, root, cost);
        out.extend(loops.into_iter().filter(|lp| lp.length < threshold));
        for (m, d) in min_dist.iter_mut().zip(&tree.dist) {
            *m = m.min(*d);
        }
        let next = (0..mesh.vertex_count())
            .filter(|&v| mesh.is_referenced(v) && min_dist[v].is_finite())
            .max_by(|&a, &b| min_dist[a].total_cmp(&min_dist[b]).then(b.cmp(&a)));
        match next {
            Some(v) if min_dist[v] > 0.0 => root = v,
            _ => break,
        }
    }
    sort_loops(&mut out);
    out.dedup_by(|a, b| a.vertices == b.vertices);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn thin_handle_is_removed() {
        // tube circumference 2*pi*0.005 against a bbox diagonal near 2.8
        let m = synth::torus(48, 8, 1.0, 0.005);
        let out = remove_small_handles(&m, 0.05).unwrap();
        assert_eq!(genus(&out).unwrap(), 0);
        assert!(out.is_closed());
        assert!(out.is_manifold());
    }

    #[test]
    fn fat_torus_is_unchanged() {
        let m = synth::torus(24, 12, 1.0, 0.4);
        let out = remove_small_handles(&m, 0.02).unwrap();
        assert_eq!(genus(&out).unwrap(), 1);
        assert_eq!(out.face_count(), m.face_count());
    }

    #[test]
    fn genus_zero_is_unchanged() {
        let m = synth::tetrahedron();
        let out = remove_small_handles(&m, 0.5).unwrap();
        assert_eq!(out.corners(), m.corners());
    }

    #[test]
    fn bad_threshold() {
        let m = synth::tetrahedron();
        for t in [0.0, -1.0, f64::NAN] {
            assert!(matches!(remove_small_handles(&m, t), Err(Error::InvalidThreshold(_))));
        }
    }
}
