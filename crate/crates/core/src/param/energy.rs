use super::weights::EdgeWeights;
use crate::mesh::{Mesh, Vec2};

/// Discrete harmonic energy: sum over edges of `w * |H(a) - H(b)|^2`.
pub fn harmonic_energy(mesh: &Mesh, weights: &EdgeWeights, uv: &[Vec2]) -> f64 {
    (0..mesh.edge_count())
        .map(|e| {
            let [a, b] = mesh.edge_vertices(e);
            let d = [uv[a][0] - uv[b][0], uv[a][1] - uv[b][1]];
            weights.get(e) * (d[0] * d[0] + d[1] * d[1])
        })
        .sum()
}

/// Signed UV area of face `f` (positive when counter-clockwise).
pub fn uv_signed_area(mesh: &Mesh, uv: &[Vec2], f: usize) -> f64 {
    let [a, b, c] = mesh.face(f).map(|v| uv[v]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Faces whose UV orientation disagrees with the majority. Zero-area faces
/// count for neither side.
pub fn count_flips(mesh: &Mesh, uv: &[Vec2]) -> usize {
    let (mut pos, mut neg) = (0, 0);
    for f in 0..mesh.face_count() {
        let a = uv_signed_area(mesh, uv, f);
        if a > 0.0 {
            pos += 1;
        } else if a < 0.0 {
            neg += 1;
        }
    }
    pos.min(neg)
}

/// Sum of absolute UV face areas; 1 for a fold-free map onto the unit
/// square.
pub fn uv_area_sum(mesh: &Mesh, uv: &[Vec2]) -> f64 {
    (0..mesh.face_count()).map(|f| uv_signed_area(mesh, uv, f).abs()).sum()
}
