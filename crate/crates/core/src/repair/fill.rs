use crate::error::{Error, Result};
use crate::mesh::{BoundaryLoop, Corner, Mesh};

/// Closes a boundary loop with a fan around a new vertex at the loop's
/// centroid. The new corners carry no original UV, so the patch is
/// color-undefined.
pub fn fill_hole(mesh: &Mesh, lp: &BoundaryLoop) -> Result<Mesh> {
    fill_holes(mesh, &[lp])
}

/// Fills several boundary loops of the same mesh in one rebuild. Existing
/// vertex and face ids are preserved; the `i`-th loop's centroid vertex gets
/// id `mesh.vertex_count() + i`.
pub fn fill_holes(mesh: &Mesh, loops: &[&BoundaryLoop]) -> Result<Mesh> {
    let mut positions = mesh.positions().to_vec();
    let mut corners = mesh.corners().to_vec();
    for lp in loops {
        let n = lp.vertices.len();
        if n < 3 {
            return Err(Error::LoopTooShort(n, 3));
        }
        if lp.halfedges.len() != n {
            return Err(Error::LoopNotFound);
        }
        for i in 0..n {
            let h = lp.halfedges[i];
            if h >= mesh.halfedge_count()
                || !mesh.is_boundary_halfedge(h)
                || mesh.origin(h) != lp.vertices[i]
                || mesh.dest(h) != lp.vertices[(i + 1) % n]
            {
                return Err(Error::LoopNotFound);
            }
        }
        let mut c = [0.0; 3];
        for &v in &lp.vertices {
            let p = mesh.position(v);
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        let apex = positions.len();
        positions.push(c.map(|x| x / n as f64));
        // boundary half-edges run v_i -> v_{i+1} inside the existing faces,
        // so the new face must traverse v_{i+1} -> v_i
        for i in 0..n {
            corners.push(Corner::new(apex));
            corners.push(Corner::new(lp.vertices[(i + 1) % n]));
            corners.push(Corner::new(lp.vertices[i]));
        }
    }
    mesh.with_corners(positions, corners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{boundary_loops, euler_characteristic, genus};
    use crate::synth;

    #[test]
    fn triangle_hole_centroid() {
        let m = synth::triangle();
        let lp = &boundary_loops(&m).unwrap()[0];
        let out = fill_hole(&m, lp).unwrap();
        let p = out.position(3);
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-15 && (p[1] - 1.0 / 3.0).abs() < 1e-15 && p[2] == 0.0);
        assert_eq!(out.face_count(), 4);
        assert!(out.is_closed());
        assert!(out.is_manifold());
        for f in 1..4 {
            assert!(out.face_corners(f).iter().all(|c| c.uv.is_none() && c.texture.is_none()));
        }
    }

    #[test]
    fn square_hole_centroid() {
        let m = synth::grid(2, 2);
        let lp = &boundary_loops(&m).unwrap()[0];
        let out = fill_hole(&m, lp).unwrap();
        assert_eq!(out.position(4), [0.5, 0.5, 0.0]);
        assert_eq!(out.face_count(), m.face_count() + 4);
    }

    #[test]
    fn filling_a_disk_gives_a_sphere() {
        let m = synth::hemisphere(6, 12);
        let loops = boundary_loops(&m).unwrap();
        let n = loops[0].len() as i64;
        let out = fill_hole(&m, &loops[0]).unwrap();
        assert_eq!(euler_characteristic(&out), euler_characteristic(&m) + 1);
        assert_eq!(out.edge_count() as i64, m.edge_count() as i64 + n);
        assert!(boundary_loops(&out).unwrap().is_empty());
        assert_eq!(genus(&out).unwrap(), genus(&m).unwrap());
    }

    #[test]
    fn foreign_loop_is_rejected() {
        let m = synth::grid(3, 3);
        let mut lp = boundary_loops(&m).unwrap().remove(0);
        lp.halfedges.rotate_left(1);
        assert!(matches!(fill_hole(&m, &lp), Err(Error::LoopNotFound)));
        let closed = synth::tetrahedron();
        let fake = BoundaryLoop {
            vertices: vec![0, 1, 2],
            halfedges: vec![0, 1, 2],
            length: 1.0,
        };
        assert!(matches!(fill_hole(&closed, &fake), Err(Error::LoopNotFound)));
    }
}
