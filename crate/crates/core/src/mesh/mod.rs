//! Indexed triangle mesh with half-edge connectivity.
//!
//! Faces are stored as runs of three [`Corner`]s. Half-edge `h = 3 * f + k`
//! runs from corner `k` of face `f` to corner `(k + 1) % 3`, so `next`,
//! `prev` and `face` are pure index arithmetic. Twins are derived from
//! vertex pairs when the mesh is built: an undirected edge carried by exactly
//! two oppositely oriented half-edges is paired, anything else (three or more
//! faces on one edge, or two faces traversing it in the same direction) is
//! recorded as a non-manifold group and left unpaired.

mod boundary;
mod components;
pub mod obj;

use std::collections::HashMap;
use std::path::PathBuf;

pub use boundary::{boundary_loops, euler_characteristic, genus, BoundaryLoop};
pub use components::{split_components, Component};
pub(crate) use boundary::genus_with_boundaries;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Vec2 = [f64; 2];

/// One face corner: the vertex it references plus the original texture
/// coordinate and source-texture index. A corner with `uv == None` is
/// color-undefined (e.g. geometry created by hole filling).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corner {
    pub vertex: usize,
    pub uv: Option<Vec2>,
    pub texture: Option<u32>,
}

impl Corner {
    pub fn new(vertex: usize) -> Self {
        Corner {
            vertex,
            uv: None,
            texture: None,
        }
    }

    pub fn with_uv(vertex: usize, uv: Vec2, texture: u32) -> Self {
        Corner {
            vertex,
            uv: Some(uv),
            texture: Some(texture),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    positions: Vec<Vec3>,
    corners: Vec<Corner>,
    textures: Vec<PathBuf>,
    has_uvs: bool,

    twin: Vec<Option<usize>>,
    edge_of: Vec<usize>,
    edges: Vec<usize>,
    nonmanifold_groups: Vec<Vec<usize>>,
    vertex_offsets: Vec<usize>,
    vertex_corners: Vec<usize>,
}

impl Mesh {
    /// Builds a mesh from positions and face corners (three per face).
    ///
    /// `textures` lists the source texture images that corner texture indices
    /// point into. `has_uvs` is false for geometry-only input, which disables
    /// color transfer downstream.
    pub fn new(
        positions: Vec<Vec3>,
        corners: Vec<Corner>,
        textures: Vec<PathBuf>,
        has_uvs: bool,
    ) -> Result<Self> {
        if !corners.len().is_multiple_of(3) {
            return Err(Error::InvalidMesh(format!(
                "corner count {} is not a multiple of 3",
                corners.len()
            )));
        }
        for (f, tri) in corners.chunks_exact(3).enumerate() {
            for c in tri {
                if c.vertex >= positions.len() {
                    return Err(Error::InvalidMesh(format!(
                        "face {f} references vertex {} but there are only {} vertices",
                        c.vertex,
                        positions.len()
                    )));
                }
                if let Some(t) = c.texture {
                    if t as usize >= textures.len() {
                        return Err(Error::TextureIndex {
                            index: t as usize,
                            count: textures.len(),
                        });
                    }
                }
            }
            if tri[0].vertex == tri[1].vertex
                || tri[1].vertex == tri[2].vertex
                || tri[0].vertex == tri[2].vertex
            {
                return Err(Error::InvalidMesh(format!(
                    "face {f} repeats a vertex"
                )));
            }
        }
        for (i, p) in positions.iter().enumerate() {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMesh(format!(
                    "vertex {i} has a non-finite coordinate"
                )));
            }
        }

        let mut mesh = Mesh {
            positions,
            corners,
            textures,
            has_uvs,
            twin: Vec::new(),
            edge_of: Vec::new(),
            edges: Vec::new(),
            nonmanifold_groups: Vec::new(),
            vertex_offsets: Vec::new(),
            vertex_corners: Vec::new(),
        };
        mesh.build_connectivity();
        Ok(mesh)
    }

    /// Same geometry with a different corner list; texture table and uv flag
    /// are kept.
    pub(crate) fn with_corners(&self, positions: Vec<Vec3>, corners: Vec<Corner>) -> Result<Self> {
        Mesh::new(positions, corners, self.textures.clone(), self.has_uvs)
    }

    fn build_connectivity(&mut self) {
        let n_he = self.corners.len();
        let mut groups: HashMap<(usize, usize), Vec<usize>> = HashMap::with_capacity(n_he);
        for h in 0..n_he {
            let a = self.origin(h);
            let b = self.dest(h);
            groups.entry((a.min(b), a.max(b))).or_default().push(h);
        }

        let mut twin = vec![None; n_he];
        let mut nonmanifold = Vec::new();
        for hs in groups.into_values() {
            match hs.as_slice() {
                [_] => {}
                &[h0, h1] if self.origin(h0) == self.dest(h1) => {
                    twin[h0] = Some(h1);
                    twin[h1] = Some(h0);
                }
                _ => {
                    let mut hs = hs;
                    hs.sort_unstable();
                    nonmanifold.push(hs);
                }
            }
        }
        nonmanifold.sort_unstable();

        let mut edge_of = vec![usize::MAX; n_he];
        let mut edges = Vec::with_capacity(n_he / 2 + 1);
        for h in 0..n_he {
            if edge_of[h] != usize::MAX {
                continue;
            }
            let e = edges.len();
            edges.push(h);
            edge_of[h] = e;
            if let Some(t) = twin[h] {
                edge_of[t] = e;
            }
        }

        let nv = self.positions.len();
        let mut offsets = vec![0usize; nv + 1];
        for c in &self.corners {
            offsets[c.vertex + 1] += 1;
        }
        for i in 0..nv {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut vc = vec![0usize; n_he];
        for (h, c) in self.corners.iter().enumerate() {
            vc[fill[c.vertex]] = h;
            fill[c.vertex] += 1;
        }

        self.twin = twin;
        self.edge_of = edge_of;
        self.edges = edges;
        self.nonmanifold_groups = nonmanifold;
        self.vertex_offsets = offsets;
        self.vertex_corners = vc;
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn face_count(&self) -> usize {
        self.corners.len() / 3
    }

    pub fn halfedge_count(&self) -> usize {
        self.corners.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> Vec3 {
        self.positions[v]
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn textures(&self) -> &[PathBuf] {
        &self.textures
    }

    pub fn has_uvs(&self) -> bool {
        self.has_uvs
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        let c = &self.corners[3 * f..3 * f + 3];
        [c[0].vertex, c[1].vertex, c[2].vertex]
    }

    pub fn face_corners(&self, f: usize) -> &[Corner] {
        &self.corners[3 * f..3 * f + 3]
    }

    pub fn faces(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        (0..self.face_count()).map(move |f| self.face(f))
    }

    #[inline]
    pub fn next(&self, h: usize) -> usize {
        if h % 3 == 2 {
            h - 2
        } else {
            h + 1
        }
    }

    #[inline]
    pub fn prev(&self, h: usize) -> usize {
        if h.is_multiple_of(3) {
            h + 2
        } else {
            h - 1
        }
    }

    #[inline]
    pub fn face_of(&self, h: usize) -> usize {
        h / 3
    }

    #[inline]
    pub fn origin(&self, h: usize) -> usize {
        self.corners[h].vertex
    }

    #[inline]
    pub fn dest(&self, h: usize) -> usize {
        self.corners[self.next(h)].vertex
    }

    #[inline]
    pub fn twin(&self, h: usize) -> Option<usize> {
        self.twin[h]
    }

    pub(crate) fn twins(&self) -> &[Option<usize>] {
        &self.twin
    }

    #[inline]
    pub fn is_boundary_halfedge(&self, h: usize) -> bool {
        self.twin[h].is_none()
    }

    /// Undirected edge id of a half-edge.
    #[inline]
    pub fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    /// Representative half-edge of an undirected edge.
    #[inline]
    pub fn edge_halfedge(&self, e: usize) -> usize {
        self.edges[e]
    }

    pub fn edge_vertices(&self, e: usize) -> [usize; 2] {
        let h = self.edges[e];
        [self.origin(h), self.dest(h)]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edge_vertices(e);
        distance(self.positions[a], self.positions[b])
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.twin[self.edges[e]].is_none()
    }

    /// Half-edges (equivalently, corners) whose origin is `v`.
    pub fn vertex_halfedges(&self, v: usize) -> &[usize] {
        &self.vertex_corners[self.vertex_offsets[v]..self.vertex_offsets[v + 1]]
    }

    pub fn is_referenced(&self, v: usize) -> bool {
        self.vertex_offsets[v] != self.vertex_offsets[v + 1]
    }

    pub fn referenced_vertex_count(&self) -> usize {
        (0..self.vertex_count()).filter(|&v| self.is_referenced(v)).count()
    }

    /// Half-edge running from `a` to `b`, if any face carries one.
    pub fn halfedge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.vertex_halfedges(a)
            .iter()
            .copied()
            .find(|&h| self.dest(h) == b)
    }

    /// Undirected edge joining `a` and `b`, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.halfedge_between(a, b)
            .or_else(|| self.halfedge_between(b, a))
            .map(|h| self.edge_of(h))
    }

    /// Distinct neighbors of `v` over the edges of its incident faces.
    pub fn vertex_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .vertex_halfedges(v)
            .iter()
            .flat_map(|&h| [self.dest(h), self.origin(self.prev(h))])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn nonmanifold_groups(&self) -> &[Vec<usize>] {
        &self.nonmanifold_groups
    }

    /// Partitions each vertex's corners into wedges: corners connected by
    /// crossing twin-linked edges around the vertex. Returns a wedge label per
    /// corner, labels are dense per vertex starting at 0 (the wedge holding
    /// the vertex's lowest corner).
    pub(crate) fn vertex_wedges(&self, twin: &[Option<usize>]) -> Vec<usize> {
        let n = self.corners.len();
        let mut uf = UnionFind::new(n);
        for h in 0..n {
            if let Some(t) = twin[h] {
                // corner at origin(h) in the twin's face
                uf.union(h, self.next(t));
            }
        }
        let mut label = vec![usize::MAX; n];
        for v in 0..self.vertex_count() {
            let mut roots: Vec<usize> = Vec::new();
            for &c in self.vertex_halfedges(v) {
                let r = uf.find(c);
                let idx = match roots.iter().position(|&x| x == r) {
                    Some(i) => i,
                    None => {
                        roots.push(r);
                        roots.len() - 1
                    }
                };
                label[c] = idx;
            }
        }
        label
    }

    /// Counts of non-manifold half-edges and non-manifold vertices (vertices
    /// whose incident faces form more than one fan).
    pub fn manifold_defects(&self) -> (usize, usize) {
        let edges: usize = self.nonmanifold_groups.iter().map(Vec::len).sum();
        let wedges = self.vertex_wedges(&self.twin);
        let vertices = (0..self.vertex_count())
            .filter(|&v| self.vertex_halfedges(v).iter().any(|&c| wedges[c] > 0))
            .count();
        (edges, vertices)
    }

    pub fn is_manifold(&self) -> bool {
        self.manifold_defects() == (0, 0)
    }

    pub(crate) fn require_manifold(&self) -> Result<()> {
        match self.manifold_defects() {
            (0, 0) => Ok(()),
            (edges, vertices) => Err(Error::NonManifold { edges, vertices }),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.twin.iter().all(Option::is_some)
    }

    pub fn bbox(&self) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for (v, p) in self.positions.iter().enumerate() {
            if !self.is_referenced(v) {
                continue;
            }
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bbox();
        if lo[0] > hi[0] {
            return 0.0;
        }
        distance(lo, hi)
    }

    /// Referenced vertex closest to the center of the bounding box; ties go to
    /// the lowest id.
    pub fn vertex_nearest_bbox_center(&self) -> Option<usize> {
        let (lo, hi) = self.bbox();
        let c = [
            0.5 * (lo[0] + hi[0]),
            0.5 * (lo[1] + hi[1]),
            0.5 * (lo[2] + hi[2]),
        ];
        (0..self.vertex_count())
            .filter(|&v| self.is_referenced(v))
            .min_by(|&a, &b| {
                distance(self.positions[a], c)
                    .total_cmp(&distance(self.positions[b], c))
                    .then(a.cmp(&b))
            })
    }

    /// Drops unreferenced vertices. Returns the compacted mesh and, for each
    /// new vertex, its id in `self`.
    pub fn compact(&self) -> Result<(Mesh, Vec<usize>)> {
        let mut remap = vec![usize::MAX; self.vertex_count()];
        let mut back = Vec::new();
        let mut positions = Vec::new();
        for v in 0..self.vertex_count() {
            if self.is_referenced(v) {
                remap[v] = back.len();
                back.push(v);
                positions.push(self.positions[v]);
            }
        }
        let corners = self
            .corners
            .iter()
            .map(|c| Corner {
                vertex: remap[c.vertex],
                ..*c
            })
            .collect();
        Ok((self.with_corners(positions, corners)?, back))
    }
}

pub(crate) fn distance(a: Vec3, b: Vec3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        // smaller root wins, keeps labels deterministic
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn single_triangle() {
        let m = synth::triangle();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.face_count(), 1);
        assert_eq!(m.edge_count(), 3);
        assert!(m.corners().iter().all(|c| c.uv.is_some()));
        assert!(m.is_manifold());
        assert!(!m.is_closed());
    }

    #[test]
    fn tetrahedron_twins_are_involutive() {
        let m = synth::tetrahedron();
        assert!(m.is_closed());
        assert_eq!(m.edge_count(), 6);
        for h in 0..m.halfedge_count() {
            let t = m.twin(h).unwrap();
            assert_eq!(m.twin(t), Some(h));
            assert_eq!(m.origin(t), m.dest(h));
            assert_eq!(m.next(m.next(m.next(h))), h);
        }
    }

    #[test]
    fn rejects_bad_faces() {
        let p = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let bad = vec![Corner::new(0), Corner::new(1), Corner::new(7)];
        assert!(Mesh::new(p.clone(), bad, vec![], false).is_err());
        let rep = vec![Corner::new(0), Corner::new(1), Corner::new(1)];
        assert!(Mesh::new(p, rep, vec![], false).is_err());
    }

    #[test]
    fn three_faces_on_one_edge_is_nonmanifold() {
        let m = synth::fin_edge();
        let (edges, _) = m.manifold_defects();
        assert_eq!(edges, 3);
        assert!(!m.is_manifold());
    }

    #[test]
    fn bowtie_vertex_is_nonmanifold() {
        let m = synth::bowtie();
        let (edges, vertices) = m.manifold_defects();
        assert_eq!(edges, 0);
        assert_eq!(vertices, 1);
    }
}
