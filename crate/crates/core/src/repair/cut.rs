use std::collections::VecDeque;

use log::debug;

use super::fill::fill_holes;
use super::homology::leftover_edges;
use super::nonmanifold::slice_edges;
use crate::error::{Error, Result};
use crate::mesh::{boundary_loops, genus_with_boundaries, Mesh};

/// A set of mesh edges along which a surface is sliced into a disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutGraph {
    /// Edge ids, ascending.
    pub edges: Vec<usize>,
    /// Edges left over by the tree-cotree split before pruning (2g).
    pub generators: usize,
}

impl CutGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of cut edges incident to each vertex.
    pub fn degrees(&self, mesh: &Mesh) -> Vec<usize> {
        let mut deg = vec![0; mesh.vertex_count()];
        for &e in &self.edges {
            for v in mesh.edge_vertices(e) {
                deg[v] += 1;
            }
        }
        deg
    }
}

/// Hop distance from the seed vertices over mesh edges.
fn bfs_hops(mesh: &Mesh, seeds: &[usize]) -> Vec<usize> {
    let mut hops = vec![usize::MAX; mesh.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in seeds {
        hops[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for u in mesh.vertex_neighbors(v) {
            if hops[u] == usize::MAX {
                hops[u] = hops[v] + 1;
                queue.push_back(u);
            }
        }
    }
    hops
}

/// Cut graph of a closed manifold mesh: a BFS spanning tree from `seeds`
/// plus the edges left over by a dual spanning tree, pruned of leaves.
/// Vertices flagged in `keep` are never pruned.
fn closed_cut_graph(mesh: &Mesh, seeds: &[usize], keep: &[bool]) -> CutGraph {
    let hops = bfs_hops(mesh, seeds);
    let mut order: Vec<usize> = (0..mesh.edge_count()).collect();
    let key = |e: usize| {
        let [a, b] = mesh.edge_vertices(e);
        (hops[a].max(hops[b]), hops[a].min(hops[b]), e)
    };
    order.sort_by_key(|&e| key(e));
    let mut uf = crate::mesh::UnionFind::new(mesh.vertex_count());
    let mut in_tree = vec![false; mesh.edge_count()];
    // seeds are joined first so that several seeds act as one root
    for w in seeds.windows(2) {
        uf.union(w[0], w[1]);
    }
    for e in order {
        let [a, b] = mesh.edge_vertices(e);
        if uf.union(a, b) {
            in_tree[e] = true;
        }
    }
    // dual tree prefers edges far from the seeds, so leftovers stay close
    let leftover = leftover_edges(mesh, &in_tree, |e| key(e).0 as f64);
    let generators = leftover.len();
    let mut cut = in_tree;
    for &e in &leftover {
        cut[e] = true;
    }

    let mut deg = vec![0usize; mesh.vertex_count()];
    for e in 0..mesh.edge_count() {
        if cut[e] {
            for v in mesh.edge_vertices(e) {
                deg[v] += 1;
            }
        }
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); mesh.vertex_count()];
    for e in (0..mesh.edge_count()).filter(|&e| cut[e]) {
        for v in mesh.edge_vertices(e) {
            incident[v].push(e);
        }
    }
    let mut stack: Vec<usize> = (0..mesh.vertex_count()).filter(|&v| deg[v] == 1 && !keep[v]).collect();
    while let Some(v) = stack.pop() {
        if deg[v] != 1 {
            continue;
        }
        let Some(&e) = incident[v].iter().find(|&&e| cut[e]) else {
            continue;
        };
        let [a, b] = mesh.edge_vertices(e);
        let other = if a == v { b } else { a };
        if keep[other] && deg[other] == 1 {
            continue;
        }
        cut[e] = false;
        for u in mesh.edge_vertices(e) {
            deg[u] -= 1;
            if deg[u] == 1 && !keep[u] {
                stack.push(u);
            }
        }
    }
    CutGraph {
        edges: (0..mesh.edge_count()).filter(|&e| cut[e]).collect(),
        generators,
    }
}

/// Cut graph of a connected manifold mesh with genus > 0. Boundaries are
/// temporarily coned off; each cone apex is kept on the graph so that the
/// real boundary joins the cut once the cone edges are dropped.
pub fn cut_graph(mesh: &Mesh) -> Result<CutGraph> {
    let loops = boundary_loops(mesh)?;
    let refs: Vec<_> = loops.iter().collect();
    let closed = fill_holes(mesh, &refs)?;
    let nv = mesh.vertex_count();
    let apexes: Vec<usize> = (nv..closed.vertex_count()).collect();
    let seeds = if apexes.is_empty() {
        vec![closed.vertex_nearest_bbox_center().ok_or(Error::EmptyMesh)?]
    } else {
        apexes.clone()
    };
    let mut keep = vec![false; closed.vertex_count()];
    for &a in &apexes {
        keep[a] = true;
    }
    let graph = closed_cut_graph(&closed, &seeds, &keep);
    let mut edges: Vec<usize> = graph
        .edges
        .iter()
        .filter_map(|&e| {
            let [a, b] = closed.edge_vertices(e);
            if a >= nv || b >= nv {
                None
            } else {
                mesh.edge_between(a, b)
            }
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(CutGraph {
        edges,
        generators: graph.generators,
    })
}

/// Turns a connected manifold mesh into a topological disk (genus 0, one
/// boundary loop).
///
/// - disk: returned unchanged;
/// - genus 0 with several boundaries: all but the longest are filled;
/// - closed genus 0: a two-edge slit is opened at the vertex nearest the
///   bounding-box center;
/// - genus > 0: sliced along its cut graph.
pub fn cut_to_disk(mesh: &Mesh) -> Result<Mesh> {
    let n = crate::mesh::split_components(mesh).len();
    if n != 1 {
        return Err(Error::Disconnected(n));
    }
    let loops = boundary_loops(mesh)?;
    let b = loops.len();
    let g = genus_with_boundaries(mesh, b as i64)?;
    let out = match (g, b) {
        (0, 1) => return Ok(mesh.clone()),
        (0, 0) => slit(mesh)?,
        (0, _) => {
            let refs: Vec<_> = loops[1..].iter().collect();
            fill_holes(mesh, &refs)?
        }
        _ => {
            let graph = cut_graph(mesh)?;
            debug!(
                "cut graph: {} edges from {} generators",
                graph.edge_count(),
                graph.generators
            );
            slice_edges(mesh, &graph.edges).0
        }
    };
    let b = boundary_loops(&out)?.len();
    let genus = genus_with_boundaries(&out, b as i64)?;
    if (genus, b) != (0, 1) {
        return Err(Error::NotADisk {
            genus,
            boundaries: b,
        });
    }
    Ok(out)
}

/// Opens a closed genus-0 mesh along the path `a - m - b`, where `m` is the
/// vertex nearest the bounding-box center and `a`, `b` are its two most
/// distant neighbors. A single-edge slit would leave both endpoints shared by
/// the two sides, which the vertex-pair adjacency cannot represent.
fn slit(mesh: &Mesh) -> Result<Mesh> {
    let m = mesh.vertex_nearest_bbox_center().ok_or(Error::EmptyMesh)?;
    let nbrs = mesh.vertex_neighbors(m);
    let mut best: Option<(f64, usize, usize)> = None;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            let d = crate::mesh::distance(mesh.position(a), mesh.position(b));
            if best.is_none_or(|(bd, _, _)| d > bd) {
                best = Some((d, a, b));
            }
        }
    }
    let (_, a, b) = best.ok_or_else(|| Error::Topology(format!("vertex {m} has fewer than two neighbors")))?;
    let e1 = mesh.edge_between(a, m).expect("neighbor edge");
    let e2 = mesh.edge_between(m, b).expect("neighbor edge");
    Ok(slice_edges(mesh, &[e1, e2]).0)
}
