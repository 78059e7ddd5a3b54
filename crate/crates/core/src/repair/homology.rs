use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::mesh::{boundary_loops, euler_characteristic, Mesh, UnionFind};

/// A closed, vertex-simple edge cycle. `edges[i]` joins `vertices[i]` and
/// `vertices[(i + 1) % n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologyLoop {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub length: f64,
}

impl HomologyLoop {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn from_vertices(mesh: &Mesh, vertices: Vec<usize>) -> Self {
        let n = vertices.len();
        let edges: Vec<usize> = (0..n)
            .map(|i| {
                mesh.edge_between(vertices[i], vertices[(i + 1) % n])
                    .expect("consecutive loop vertices are adjacent")
            })
            .collect();
        let length = edges.iter().map(|&e| mesh.edge_length(e)).sum();
        HomologyLoop {
            vertices,
            edges,
            length,
        }
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then vertex id
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path tree over mesh edges. Unreachable vertices keep an
/// infinite distance.
pub(crate) struct PathTree {
    pub dist: Vec<f64>,
    pub parent_edge: Vec<Option<usize>>,
    pub depth: Vec<usize>,
}

impl PathTree {
    fn parent(&self, mesh: &Mesh, v: usize) -> Option<usize> {
        self.parent_edge[v].map(|e| {
            let [a, b] = mesh.edge_vertices(e);
            if a == v {
                b
            } else {
                a
            }
        })
    }
}

/// Dijkstra from `root` with per-edge cost `cost(e)`.
pub(crate) fn shortest_path_tree(mesh: &Mesh, root: usize, cost: impl Fn(usize) -> f64) -> PathTree {
    let n = mesh.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent_edge = vec![None; n];
    let mut depth = vec![0; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(Entry(0.0, root));
    while let Some(Entry(d, v)) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &h in mesh.vertex_halfedges(v) {
            // both the outgoing half-edge and the incoming one of this corner
            for (e, u) in [
                (mesh.edge_of(h), mesh.dest(h)),
                (mesh.edge_of(mesh.prev(h)), mesh.origin(mesh.prev(h))),
            ] {
                if done[u] {
                    continue;
                }
                let nd = d + cost(e);
                if nd < dist[u] || (nd == dist[u] && parent_edge[u].is_some_and(|p| e < p)) {
                    dist[u] = nd;
                    parent_edge[u] = Some(e);
                    depth[u] = depth[v] + 1;
                    heap.push(Entry(nd, u));
                }
            }
        }
    }
    PathTree {
        dist,
        parent_edge,
        depth,
    }
}

/// Edges of a closed mesh that lie neither in the primal tree nor in a
/// dual spanning tree over the faces that avoids primal-tree edges. The dual
/// tree is grown greedily by descending `priority`, so the leftover edges are
/// those with the smallest priorities the topology allows.
pub(crate) fn leftover_edges(mesh: &Mesh, in_tree: &[bool], priority: impl Fn(usize) -> f64) -> Vec<usize> {
    let mut candidates: Vec<usize> = (0..mesh.edge_count()).filter(|&e| !in_tree[e]).collect();
    let keys: Vec<f64> = (0..mesh.edge_count()).map(&priority).collect();
    candidates.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    let mut uf = UnionFind::new(mesh.face_count());
    let mut leftover = Vec::new();
    for e in candidates {
        let h = mesh.edge_halfedge(e);
        let t = mesh.twin(h).expect("closed mesh");
        if !uf.union(mesh.face_of(h), mesh.face_of(t)) {
            leftover.push(e);
        }
    }
    leftover
}

/// Greedy homology generators through one root: shortest-path tree from
/// `root`, maximum dual spanning tree by loop length, one cycle per leftover
/// edge, each shortened locally. Loops are not sorted.
pub(crate) fn loops_through(mesh: &Mesh, root: usize, cost: impl Fn(usize) -> f64 + Copy) -> (Vec<HomologyLoop>, PathTree) {
    let tree = shortest_path_tree(mesh, root, cost);
    let mut in_tree = vec![false; mesh.edge_count()];
    for e in tree.parent_edge.iter().flatten() {
        in_tree[*e] = true;
    }
    let leftover = leftover_edges(mesh, &in_tree, |e| {
        let [a, b] = mesh.edge_vertices(e);
        tree.dist[a] + cost(e) + tree.dist[b]
    });
    let loops = leftover
        .into_iter()
        .map(|e| {
            let [a, b] = mesh.edge_vertices(e);
            let cycle = tree_cycle(mesh, &tree, a, b);
            HomologyLoop::from_vertices(mesh, shorten(mesh, cycle))
        })
        .collect();
    (loops, tree)
}

/// Vertices of the cycle `a -> ... -> lca -> ... -> b -> a` through the tree.
fn tree_cycle(mesh: &Mesh, tree: &PathTree, a: usize, b: usize) -> Vec<usize> {
    let (mut x, mut y) = (a, b);
    let mut left = Vec::new();
    let mut right = Vec::new();
    while x != y {
        if tree.depth[x] >= tree.depth[y] {
            left.push(x);
            x = tree.parent(mesh, x).expect("connected tree");
        } else {
            right.push(y);
            y = tree.parent(mesh, y).expect("connected tree");
        }
    }
    left.push(x);
    left.extend(right.into_iter().rev());
    left
}

fn shares_face(mesh: &Mesh, a: usize, b: usize, c: usize) -> bool {
    mesh.vertex_halfedges(b).iter().any(|&h| {
        let (d, o) = (mesh.dest(h), mesh.origin(mesh.prev(h)));
        (d == a && o == c) || (d == c && o == a)
    })
}

/// Removes corners `b` of `a -> b -> c` where `(a, b, c)` is a face and the
/// chord is shorter, and collapses backtracks, until neither applies.
fn shorten(mesh: &Mesh, mut cyc: Vec<usize>) -> Vec<usize> {
    let pos = |v: usize| mesh.position(v);
    let len = |a: usize, b: usize| crate::mesh::distance(pos(a), pos(b));
    let mut changed = true;
    while changed && cyc.len() > 3 {
        changed = false;
        let mut i = 0;
        while i < cyc.len() && cyc.len() > 3 {
            let n = cyc.len();
            let a = cyc[(i + n - 1) % n];
            let b = cyc[i];
            let c = cyc[(i + 1) % n];
            if a == c {
                // backtrack a -> b -> a
                let hi = i.max((i + 1) % n);
                let lo = i.min((i + 1) % n);
                cyc.remove(hi);
                cyc.remove(lo);
                changed = true;
                continue;
            }
            if len(a, c) < len(a, b) + len(b, c) && shares_face(mesh, a, b, c) {
                cyc.remove(i);
                changed = true;
                continue;
            }
            i += 1;
        }
    }
    cyc
}

/// A basis of 2g generator loops of a closed, connected, manifold mesh,
/// sorted by ascending length.
pub fn homology_basis(mesh: &Mesh) -> Result<Vec<HomologyLoop>> {
    let b = boundary_loops(mesh)?.len();
    if b > 0 {
        return Err(Error::OpenMesh(b));
    }
    let Some(root) = mesh.vertex_nearest_bbox_center() else {
        return Ok(Vec::new());
    };
    let (mut loops, tree) = loops_through(mesh, root, |e| mesh.edge_length(e));
    let unreached = (0..mesh.vertex_count()).any(|v| mesh.is_referenced(v) && tree.dist[v].is_infinite());
    if unreached {
        return Err(Error::Disconnected(crate::mesh::split_components(mesh).len()));
    }
    let twice_g = 2 - euler_characteristic(mesh);
    if loops.len() as i64 != twice_g {
        return Err(Error::Topology(format!(
            "found {} generators, Euler characteristic implies {}",
            loops.len(),
            twice_g
        )));
    }
    sort_loops(&mut loops);
    Ok(loops)
}

pub(crate) fn sort_loops(loops: &mut [HomologyLoop]) {
    loops.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.vertices.cmp(&b.vertices)));
}
