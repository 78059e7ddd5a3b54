use log::{debug, warn};

use crate::mesh::{Corner, Mesh};

/// Rebuilds `mesh` so that every vertex wedge under the given twin table
/// gets its own vertex. Wedge 0 keeps the original id, further wedges are
/// appended. Returns the new mesh and, per new vertex, the source vertex.
pub(crate) fn split_wedges(mesh: &Mesh, twin: &[Option<usize>]) -> (Mesh, Vec<usize>) {
    let wedges = mesh.vertex_wedges(twin);
    let mut positions = mesh.positions().to_vec();
    let mut source: Vec<usize> = (0..mesh.vertex_count()).collect();
    let mut corners = mesh.corners().to_vec();
    for v in 0..mesh.vertex_count() {
        let hs = mesh.vertex_halfedges(v);
        let n_wedges = hs.iter().map(|&c| wedges[c] + 1).max().unwrap_or(0);
        if n_wedges <= 1 {
            continue;
        }
        let base = positions.len();
        for _ in 1..n_wedges {
            positions.push(mesh.position(v));
            source.push(v);
        }
        for &c in hs {
            if wedges[c] > 0 {
                corners[c].vertex = base + wedges[c] - 1;
            }
        }
    }
    let out = mesh
        .with_corners(positions, corners)
        .expect("splitting vertices keeps the mesh valid");
    (out, source)
}

/// Separates every non-manifold edge into per-face-pair copies and every
/// non-manifold vertex into one copy per fan. Manifold input is returned
/// unchanged.
pub fn fix_nonmanifold(mesh: &Mesh) -> Mesh {
    let mut cur = mesh.clone();
    let mut rounds = 0;
    loop {
        let defects = cur.manifold_defects();
        if defects == (0, 0) {
            if rounds > 0 {
                debug!("non-manifold repair finished after {rounds} rounds");
            }
            return cur;
        }
        rounds += 1;

        // pair oppositely oriented half-edges inside each overfull group
        let mut twin = cur.twins().to_vec();
        for group in cur.nonmanifold_groups() {
            let mut used = vec![false; group.len()];
            for i in 0..group.len() {
                if used[i] {
                    continue;
                }
                for j in i + 1..group.len() {
                    if !used[j] && cur.origin(group[i]) == cur.dest(group[j]) {
                        twin[group[i]] = Some(group[j]);
                        twin[group[j]] = Some(group[i]);
                        used[i] = true;
                        used[j] = true;
                        break;
                    }
                }
            }
        }
        let (next, _) = split_wedges(&cur, &twin);
        if next.manifold_defects() != defects || next.vertex_count() != cur.vertex_count() {
            cur = next;
            continue;
        }

        // no progress: the offending faces are stitched to the rest through
        // other edges, so detach each unpaired half-edge at its origin
        warn!(
            "detaching faces around {} non-manifold half-edges (likely inconsistent orientation)",
            defects.0
        );
        let mut positions = cur.positions().to_vec();
        let mut corners = cur.corners().to_vec();
        for group in cur.nonmanifold_groups() {
            for &h in group {
                if twin[h].is_none() {
                    positions.push(cur.position(cur.origin(h)));
                    corners[h] = Corner {
                        vertex: positions.len() - 1,
                        ..corners[h]
                    };
                }
            }
        }
        cur = cur
            .with_corners(positions, corners)
            .expect("detaching corners keeps the mesh valid");
    }
}

/// Slices the mesh open along the given undirected edges: their faces stop
/// being adjacent and vertices are duplicated wherever that splits a fan.
/// Returns the sliced mesh and the source vertex of every new vertex.
pub fn slice_edges(mesh: &Mesh, edges: &[usize]) -> (Mesh, Vec<usize>) {
    let mut twin = mesh.twins().to_vec();
    for &e in edges {
        let h = mesh.edge_halfedge(e);
        if let Some(t) = twin[h] {
            twin[t] = None;
        }
        twin[h] = None;
    }
    split_wedges(mesh, &twin)
}
