use super::{distance, Mesh};
use crate::error::{Error, Result};

/// A closed cycle of boundary half-edges. `vertices[i]` is the origin of
/// `halfedges[i]` and the cycle closes back to `vertices[0]`. The traversal
/// follows face orientation, so for a consistently oriented disk the loop runs
/// counter-clockwise around the surface.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLoop {
    pub vertices: Vec<usize>,
    pub halfedges: Vec<usize>,
    pub length: f64,
}

impl BoundaryLoop {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// 3D length of each loop edge, `edge_lengths[i]` joins vertex `i` to
    /// vertex `i + 1`.
    pub fn edge_lengths(&self, mesh: &Mesh) -> Vec<f64> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                distance(
                    mesh.position(self.vertices[i]),
                    mesh.position(self.vertices[(i + 1) % n]),
                )
            })
            .collect()
    }
}

/// All boundary loops of a manifold mesh, longest first.
pub fn boundary_loops(mesh: &Mesh) -> Result<Vec<BoundaryLoop>> {
    mesh.require_manifold()?;

    let mut out_he = vec![usize::MAX; mesh.vertex_count()];
    for h in 0..mesh.halfedge_count() {
        if mesh.is_boundary_halfedge(h) {
            let v = mesh.origin(h);
            if out_he[v] != usize::MAX {
                return Err(Error::Topology(format!(
                    "vertex {v} starts two boundary half-edges"
                )));
            }
            out_he[v] = h;
        }
    }

    let mut seen = vec![false; mesh.halfedge_count()];
    let mut loops = Vec::new();
    for start in 0..mesh.halfedge_count() {
        if !mesh.is_boundary_halfedge(start) || seen[start] {
            continue;
        }
        let mut vertices = Vec::new();
        let mut halfedges = Vec::new();
        let mut length = 0.0;
        let mut h = start;
        loop {
            seen[h] = true;
            vertices.push(mesh.origin(h));
            halfedges.push(h);
            length += distance(mesh.position(mesh.origin(h)), mesh.position(mesh.dest(h)));
            let next = out_he[mesh.dest(h)];
            if next == usize::MAX {
                return Err(Error::Topology(format!(
                    "boundary chain breaks at vertex {}",
                    mesh.dest(h)
                )));
            }
            if next == start {
                break;
            }
            if seen[next] {
                return Err(Error::Topology("boundary chains merge".into()));
            }
            h = next;
        }
        loops.push(BoundaryLoop {
            vertices,
            halfedges,
            length,
        });
    }
    // stable: equal lengths keep discovery order
    loops.sort_by(|a, b| b.length.total_cmp(&a.length));
    Ok(loops)
}

/// V - E + F over referenced vertices.
pub fn euler_characteristic(mesh: &Mesh) -> i64 {
    mesh.referenced_vertex_count() as i64 - mesh.edge_count() as i64 + mesh.face_count() as i64
}

/// Genus from V - E + F = 2 - 2g - b for a connected manifold mesh.
pub fn genus(mesh: &Mesh) -> Result<usize> {
    let n = super::components::count_components(mesh);
    if n != 1 {
        return Err(Error::Disconnected(n));
    }
    let b = boundary_loops(mesh)?.len() as i64;
    genus_with_boundaries(mesh, b)
}

pub(crate) fn genus_with_boundaries(mesh: &Mesh, b: i64) -> Result<usize> {
    let twice_g = 2 - b - euler_characteristic(mesh);
    if twice_g < 0 || twice_g % 2 != 0 {
        return Err(Error::Topology(format!(
            "Euler characteristic {} with {b} boundaries gives non-integer or negative genus",
            euler_characteristic(mesh)
        )));
    }
    Ok((twice_g / 2) as usize)
}
