use std::collections::HashMap;

use crate::error::Result;
use crate::mesh::{boundary_loops, Corner, Mesh};

use super::boundary::ear_tips;

/// Interior edges joining two boundary vertices. With a convex boundary such
/// an edge lies on the square's perimeter or cuts it, and the faces it cuts
/// off collapse unless a corner separates its ends.
pub fn boundary_chords(mesh: &Mesh) -> Result<Vec<usize>> {
    let mut on = vec![false; mesh.vertex_count()];
    for lp in boundary_loops(mesh)? {
        for v in lp.vertices {
            on[v] = true;
        }
    }
    Ok((0..mesh.edge_count())
        .filter(|&e| {
            let [a, b] = mesh.edge_vertices(e);
            !mesh.is_boundary_edge(e) && on[a] && on[b]
        })
        .collect())
}

/// Splits at its midpoint every boundary chord the corner placement cannot
/// resolve: all chords that do not cut off an ear, and the ear chords too
/// when there are more than four ears. The surface is unchanged; each split
/// adds one interior vertex.
pub fn split_boundary_chords(mesh: &Mesh) -> Result<Mesh> {
    let chords = boundary_chords(mesh)?;
    if chords.is_empty() {
        return Ok(mesh.clone());
    }
    let loops = boundary_loops(mesh)?;
    let tips: Vec<usize> = loops.iter().flat_map(|lp| ear_tips(mesh, lp)).collect();
    let keep_ears = tips.len() <= 4;
    let ear_chord = |e: usize| {
        let h = mesh.edge_halfedge(e);
        let tip = |h: usize| mesh.origin(mesh.prev(h));
        tips.contains(&tip(h)) || mesh.twin(h).is_some_and(|t| tips.contains(&tip(t)))
    };
    let split: Vec<usize> = chords.into_iter().filter(|&e| !(keep_ears && ear_chord(e))).collect();
    split_edges(mesh, &split)
}

/// Midpoint subdivision of the given edges; each face is re-triangulated
/// according to how many of its edges were split.
pub(crate) fn split_edges(mesh: &Mesh, edges: &[usize]) -> Result<Mesh> {
    if edges.is_empty() {
        return Ok(mesh.clone());
    }
    let mut positions = mesh.positions().to_vec();
    let mut mid: HashMap<usize, usize> = HashMap::new();
    for &e in edges {
        let [a, b] = mesh.edge_vertices(e);
        let (pa, pb) = (mesh.position(a), mesh.position(b));
        mid.insert(e, positions.len());
        positions.push([0, 1, 2].map(|d| 0.5 * (pa[d] + pb[d])));
    }

    let mut corners = Vec::with_capacity(mesh.corners().len() + 9 * edges.len());
    for f in 0..mesh.face_count() {
        let c: [Corner; 3] = std::array::from_fn(|k| mesh.face_corners(f)[k]);
        // m[k]: midpoint corner of the edge from corner k to corner k + 1
        let m: [Option<Corner>; 3] = std::array::from_fn(|k| {
            let e = mesh.edge_of(3 * f + k);
            mid.get(&e).map(|&v| midpoint_corner(v, &c[k], &c[(k + 1) % 3]))
        });
        match m.iter().filter(|x| x.is_some()).count() {
            0 => corners.extend_from_slice(&c),
            1 => {
                let k = (0..3).find(|&k| m[k].is_some()).expect("one split");
                let (c0, c1, c2, mk) = (c[k], c[(k + 1) % 3], c[(k + 2) % 3], m[k].unwrap());
                corners.extend_from_slice(&[c0, mk, c2, mk, c1, c2]);
            }
            2 => {
                // edges k and k + 1 are split
                let k = (0..3).find(|&k| m[k].is_some() && m[(k + 1) % 3].is_some()).expect("two splits");
                let (c0, c1, c2) = (c[k], c[(k + 1) % 3], c[(k + 2) % 3]);
                let (m0, m1) = (m[k].unwrap(), m[(k + 1) % 3].unwrap());
                corners.extend_from_slice(&[m0, c1, m1, c0, m0, m1, c0, m1, c2]);
            }
            _ => {
                let [m0, m1, m2] = m.map(Option::unwrap);
                corners.extend_from_slice(&[c[0], m0, m2, m0, c[1], m1, m2, m1, c[2], m0, m1, m2]);
            }
        }
    }
    mesh.with_corners(positions, corners)
}

fn midpoint_corner(vertex: usize, a: &Corner, b: &Corner) -> Corner {
    let (uv, texture) = match (a.uv, b.uv) {
        (Some(x), Some(y)) if a.texture == b.texture => (Some([0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])]), a.texture),
        _ => (None, None),
    };
    Corner { vertex, uv, texture }
}
