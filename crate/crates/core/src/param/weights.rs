use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{distance, Mesh};

/// Cotangents are clamped to this magnitude to survive slivers.
pub const COT_CLAMP: f64 = 1e4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    #[default]
    Cotangent,
    Uniform,
}

impl std::str::FromStr for WeightScheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cotangent" | "cot" => Ok(WeightScheme::Cotangent),
            "uniform" => Ok(WeightScheme::Uniform),
            _ => Err(format!("unknown weight scheme `{s}` (expected cotangent or uniform)")),
        }
    }
}

impl std::fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightScheme::Cotangent => "cotangent",
            WeightScheme::Uniform => "uniform",
        })
    }
}

/// One weight per undirected mesh edge.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeights {
    pub scheme: WeightScheme,
    pub values: Vec<f64>,
}

impl EdgeWeights {
    #[inline]
    pub fn get(&self, e: usize) -> f64 {
        self.values[e]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, w| m.max(w.abs()))
    }
}

/// Cotangent of the angle between sides `b` and `c` of a triangle whose
/// third side is `a`, from the law of cosines.
pub(crate) fn cot_from_lengths(a: f64, b: f64, c: f64) -> f64 {
    let cos = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0);
    let sin = (1.0 - cos * cos).sqrt();
    if sin == 0.0 {
        return if cos > 0.0 { COT_CLAMP } else { -COT_CLAMP };
    }
    (cos / sin).clamp(-COT_CLAMP, COT_CLAMP)
}

/// Edge weights for the chosen scheme. Cotangent weights are half the sum of
/// the cotangents of the angles opposite the edge (one angle on boundary
/// edges) and may be negative.
pub fn compute_weights(mesh: &Mesh, scheme: WeightScheme) -> Result<EdgeWeights> {
    let values = match scheme {
        WeightScheme::Uniform => vec![1.0; mesh.edge_count()],
        WeightScheme::Cotangent => {
            let mut w = vec![0.0; mesh.edge_count()];
            for f in 0..mesh.face_count() {
                let p = mesh.face(f).map(|v| mesh.position(v));
                // len[k] is the edge from corner k to corner k + 1
                let len = [0, 1, 2].map(|k| distance(p[k], p[(k + 1) % 3]));
                let u = [p[1][0] - p[0][0], p[1][1] - p[0][1], p[1][2] - p[0][2]];
                let v = [p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]];
                let cross = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let area2 = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
                if len.contains(&0.0) || area2 == 0.0 {
                    return Err(Error::DegenerateFace(f));
                }
                for k in 0..3 {
                    // the angle opposite edge k sits at corner k + 2
                    let cot = cot_from_lengths(len[k], len[(k + 1) % 3], len[(k + 2) % 3]);
                    w[mesh.edge_of(3 * f + k)] += 0.5 * cot;
                }
            }
            w
        }
    };
    Ok(EdgeWeights { scheme, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Corner;

    fn mesh(pos: Vec<[f64; 3]>, faces: &[[usize; 3]]) -> Mesh {
        let corners = faces.iter().flatten().map(|&v| Corner::new(v)).collect();
        Mesh::new(pos, corners, vec![], false).unwrap()
    }

    #[test]
    fn equilateral_pair() {
        let h = 3f64.sqrt() / 2.0;
        let m = mesh(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, h, 0.0], [0.5, -h, 0.0]],
            &[[0, 1, 2], [1, 0, 3]],
        );
        let w = compute_weights(&m, WeightScheme::Cotangent).unwrap();
        let e = m.edge_between(0, 1).unwrap();
        assert!((w.get(e) - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn boundary_edge_with_45_degrees() {
        // right isosceles triangle: the hypotenuse faces the right angle, the
        // legs face 45 degrees
        let m = mesh(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[0, 1, 2]]);
        let w = compute_weights(&m, WeightScheme::Cotangent).unwrap();
        let leg = m.edge_between(0, 1).unwrap();
        let hyp = m.edge_between(1, 2).unwrap();
        assert!((w.get(leg) - 0.5).abs() < 1e-12);
        assert!(w.get(hyp).abs() < 1e-12);
    }

    #[test]
    fn right_angles_on_both_sides_give_zero() {
        // square split along its diagonal twice over: the diagonal 0-2 faces
        // two right angles
        let m = mesh(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
            &[[0, 1, 2], [0, 2, 3]],
        );
        let w = compute_weights(&m, WeightScheme::Cotangent).unwrap();
        assert!(w.get(m.edge_between(0, 2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn uniform_is_all_ones() {
        let m = mesh(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[0, 1, 2]]);
        let w = compute_weights(&m, WeightScheme::Uniform).unwrap();
        assert_eq!(w.values, vec![1.0; 3]);
    }

    #[test]
    fn degenerate_face_is_named() {
        let m = mesh(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0, 0.0, 0.0]],
            &[[0, 1, 2], [0, 3, 1]],
        );
        assert!(matches!(
            compute_weights(&m, WeightScheme::Cotangent),
            Err(Error::DegenerateFace(1))
        ));
        assert!(compute_weights(&m, WeightScheme::Uniform).is_ok());
    }

    #[test]
    fn sliver_cotangent_is_clamped() {
        assert_eq!(cot_from_lengths(1e-12, 1.0, 1.0), COT_CLAMP);
        assert!(cot_from_lengths(2.0, 1.0, 1.0) <= -COT_CLAMP + 1e-9);
    }
}
