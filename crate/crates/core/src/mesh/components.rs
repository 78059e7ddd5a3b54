use super::{Corner, Mesh, UnionFind};

/// A face-connected piece of a larger mesh, with maps back to the parent's
/// vertex and face ids.
#[derive(Clone, Debug)]
pub struct Component {
    pub mesh: Mesh,
    pub source_vertices: Vec<usize>,
    pub source_faces: Vec<usize>,
}

fn face_labels(mesh: &Mesh) -> (Vec<usize>, usize) {
    let nf = mesh.face_count();
    let mut uf = UnionFind::new(nf);
    for h in 0..mesh.halfedge_count() {
        if let Some(t) = mesh.twin(h) {
            uf.union(mesh.face_of(h), mesh.face_of(t));
        }
    }
    // faces on a non-manifold edge still share that edge
    for group in mesh.nonmanifold_groups() {
        for w in group.windows(2) {
            uf.union(mesh.face_of(w[0]), mesh.face_of(w[1]));
        }
    }
    let mut label = vec![usize::MAX; nf];
    let mut root_label = vec![usize::MAX; nf];
    let mut n = 0;
    for f in 0..nf {
        let r = uf.find(f);
        if root_label[r] == usize::MAX {
            root_label[r] = n;
            n += 1;
        }
        label[f] = root_label[r];
    }
    (label, n)
}

pub(crate) fn count_components(mesh: &Mesh) -> usize {
    face_labels(mesh).1
}

/// Splits a mesh into its edge-connected components, numbered by lowest face
/// id. Vertex ids are remapped densely; unreferenced vertices are dropped.
pub fn split_components(mesh: &Mesh) -> Vec<Component> {
    let (label, n) = face_labels(mesh);
    let mut parts: Vec<Component> = Vec::with_capacity(n);
    let mut remap = vec![usize::MAX; mesh.vertex_count()];
    let mut faces_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (f, &l) in label.iter().enumerate() {
        faces_of[l].push(f);
    }
    for faces in faces_of {
        let mut positions = Vec::new();
        let mut source_vertices = Vec::new();
        let mut corners = Vec::with_capacity(faces.len() * 3);
        for &f in &faces {
            for c in mesh.face_corners(f) {
                if remap[c.vertex] == usize::MAX {
                    remap[c.vertex] = source_vertices.len();
                    source_vertices.push(c.vertex);
                    positions.push(mesh.position(c.vertex));
                }
                corners.push(Corner {
                    vertex: remap[c.vertex],
                    ..*c
                });
            }
        }
        for &v in &source_vertices {
            remap[v] = usize::MAX;
        }
        let sub = mesh
            .with_corners(positions, corners)
            .expect("component of a valid mesh is valid");
        parts.push(Component {
            mesh: sub,
            source_vertices,
            source_faces: faces,
        });
    }
    parts
}
