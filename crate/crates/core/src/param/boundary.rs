use crate::error::{Error, Result};
use crate::mesh::{BoundaryLoop, Mesh, Vec2};

/// Unit-square images of the four corners, in loop order.
pub const SQUARE_CORNERS: [Vec2; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

/// Arc length from the loop's first vertex to each vertex, plus the total.
fn cumulative(lp: &BoundaryLoop, mesh: &Mesh, start: usize) -> (Vec<f64>, f64) {
    let n = lp.len();
    let lens = lp.edge_lengths(mesh);
    let mut cum = Vec::with_capacity(n);
    let mut acc = 0.0;
    for i in 0..n {
        cum.push(acc);
        acc += lens[(start + i) % n];
    }
    (cum, acc)
}

/// Boundary vertices with a single incident face. Such a face has all three
/// vertices on the boundary and collapses to a segment unless its tip is a
/// corner of the square.
pub fn ear_tips(mesh: &Mesh, lp: &BoundaryLoop) -> Vec<usize> {
    lp.vertices
        .iter()
        .copied()
        .filter(|&v| mesh.vertex_halfedges(v).len() == 1)
        .collect()
}

/// Four boundary vertices splitting the loop into sides of near-equal arc
/// length, returned in loop order. Ear tips must be corners when there are
/// at most four of them; otherwise they are ignored. The first corner is the
/// boundary vertex with the lexicographically smallest position, or the
/// smallest ear tip when the ears do not fit among the other three. The
/// others minimize the total deviation of their arc-length offsets from a
/// quarter, half and three quarters of the perimeter, ties going to earlier
/// vertices.
pub fn pick_corners(mesh: &Mesh, lp: &BoundaryLoop) -> Result<[usize; 4]> {
    let n = lp.len();
    if n < 4 {
        return Err(Error::LoopTooShort(n, 4));
    }
    let mut ear: Vec<bool> = lp.vertices.iter().map(|&v| mesh.vertex_halfedges(v).len() == 1).collect();
    if ear.iter().filter(|&&e| e).count() > 4 {
        ear.fill(false);
    }
    let smallest = |only_ears: bool| {
        (0..n)
            .filter(|&i| !only_ears || ear[i])
            .min_by(|&a, &b| {
                let (pa, pb) = (mesh.position(lp.vertices[a]), mesh.position(lp.vertices[b]));
                pa[0].total_cmp(&pb[0])
                    .then(pa[1].total_cmp(&pb[1]))
                    .then(pa[2].total_cmp(&pb[2]))
                    .then(a.cmp(&b))
            })
            .expect("non-empty loop")
    };
    let start = smallest(false);
    let (start, [i1, i2, i3]) = match split_sides(mesh, lp, &ear, start) {
        Some(r) => (start, r),
        None => {
            let start = smallest(true);
            (start, split_sides(mesh, lp, &ear, start).ok_or(Error::BadCorners)?)
        }
    };
    let at = |i: usize| lp.vertices[(start + i) % n];
    Ok([at(0), at(i1), at(i2), at(i3)])
}

/// Offsets of corners 1 to 3 from `start`, or `None` when some ear tip
/// cannot be made a corner.
fn split_sides(mesh: &Mesh, lp: &BoundaryLoop, ear: &[bool], start: usize) -> Option<[usize; 3]> {
    let n = lp.len();
    let (cum, total) = cumulative(lp, mesh, start);
    let is_ear = |i: usize| ear[(start + i) % n];

    // dp[k][i]: best cost with corner k + 1 at rotated index i; no ear tip
    // may lie strictly between consecutive corners
    let mut dp = vec![vec![f64::INFINITY; n]; 3];
    let mut from = vec![vec![usize::MAX; n]; 3];
    for i in 1..n {
        dp[0][i] = (cum[i] - total / 4.0).abs();
        if is_ear(i) {
            break;
        }
    }
    for k in 1..3 {
        let target = total * (k + 1) as f64 / 4.0;
        let mut best = f64::INFINITY;
        let mut arg = usize::MAX;
        for i in 1..n {
            let j = i - 1;
            if is_ear(j) {
                best = f64::INFINITY;
                arg = usize::MAX;
            }
            if dp[k - 1][j] < best {
                best = dp[k - 1][j];
                arg = j;
            }
            if arg != usize::MAX {
                dp[k][i] = best + (cum[i] - target).abs();
                from[k][i] = arg;
            }
        }
    }
    let last_ear = (1..n).rev().find(|&i| is_ear(i)).unwrap_or(1);
    let mut i3 = usize::MAX;
    let mut best = f64::INFINITY;
    for i in last_ear..n {
        if dp[2][i] < best {
            best = dp[2][i];
            i3 = i;
        }
    }
    if i3 == usize::MAX {
        return None;
    }
    let i2 = from[2][i3];
    Some([from[1][i2], i2, i3])
}

/// Maps the boundary onto the unit-square perimeter: corners go to
/// [`SQUARE_CORNERS`] exactly and every vertex between two corners is placed
/// by its 3D arc-length fraction along that side. Returns `(vertex, uv)` in
/// loop order starting at the first corner.
pub fn square_boundary_map(mesh: &Mesh, lp: &BoundaryLoop, corners: [usize; 4]) -> Result<Vec<(usize, Vec2)>> {
    let n = lp.len();
    let mut idx = [0usize; 4];
    for (k, &c) in corners.iter().enumerate() {
        idx[k] = lp.vertices.iter().position(|&v| v == c).ok_or(Error::BadCorners)?;
    }
    let start = idx[0];
    let rel = idx.map(|i| (i + n - start) % n);
    if !(rel[0] < rel[1] && rel[1] < rel[2] && rel[2] < rel[3]) {
        return Err(Error::BadCorners);
    }
    let (cum, total) = cumulative(lp, mesh, start);
    let mut out = Vec::with_capacity(n);
    for k in 0..4 {
        let (i0, i1) = (rel[k], if k == 3 { n } else { rel[k + 1] });
        let c1 = if k == 3 { total } else { cum[i1] };
        let side = c1 - cum[i0];
        if side <= 0.0 {
            return Err(Error::ZeroLengthSide(k));
        }
        let (a, b) = (SQUARE_CORNERS[k], SQUARE_CORNERS[(k + 1) % 4]);
        out.push((lp.vertices[(start + i0) % n], a));
        for i in i0 + 1..i1 {
            let t = (cum[i] - cum[i0]) / side;
            let uv = [(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]];
            out.push((lp.vertices[(start + i) % n], uv));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Corner;

    /// Fan disk around a center vertex whose rim is the given polygon.
    fn fan(rim: &[[f64; 3]]) -> (Mesh, BoundaryLoop) {
        let mut pos = rim.to_vec();
        let c = pos.len();
        let mut center = [0.0; 3];
        for p in rim {
            for k in 0..3 {
                center[k] += p[k] / rim.len() as f64;
            }
        }
        pos.push(center);
        let n = rim.len();
        let corners = (0..n)
            .flat_map(|i| [Corner::new(c), Corner::new(i), Corner::new((i + 1) % n)])
            .collect();
        let m = Mesh::new(pos, corners, vec![], false).unwrap();
        let lp = crate::mesh::boundary_loops(&m).unwrap().remove(0);
        (m, lp)
    }

    fn octagon_square() -> Vec<[f64; 3]> {
        vec![
            [0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 0.5, 0.0],
            [1.0, 1.0, 0.0],
            [0.5, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.5, 0.0],
        ]
    }

    #[test]
    fn uniform_octagon_corners() {
        let (m, lp) = fan(&octagon_square());
        let c = pick_corners(&m, &lp).unwrap();
        assert_eq!(c[0], 0);
        let pos: Vec<usize> = c.iter().map(|v| lp.vertices.iter().position(|x| x == v).unwrap()).collect();
        let s = pos[0];
        let rel: Vec<usize> = pos.iter().map(|p| (p + 8 - s) % 8).collect();
        assert_eq!(rel, vec![0, 2, 4, 6]);
    }

    #[test]
    fn four_vertex_loop_uses_all() {
        let (m, lp) = fan(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]);
        let mut c = pick_corners(&m, &lp).unwrap().to_vec();
        c.sort_unstable();
        assert_eq!(c, vec![0, 1, 2, 3]);
    }

    #[test]
    fn short_loop_is_rejected() {
        let (m, lp) = fan(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert!(matches!(pick_corners(&m, &lp), Err(Error::LoopTooShort(3, 4))));
    }

    #[test]
    fn corners_and_midpoints() {
        let (m, lp) = fan(&octagon_square());
        let corners = pick_corners(&m, &lp).unwrap();
        let map = square_boundary_map(&m, &lp, corners).unwrap();
        assert_eq!(map.len(), 8);
        for (k, &c) in corners.iter().enumerate() {
            let uv = map.iter().find(|(v, _)| *v == c).unwrap().1;
            assert_eq!(uv, SQUARE_CORNERS[k]);
        }
        // vertices between corners sit at side midpoints
        for (v, uv) in &map {
            if !corners.contains(v) {
                let on_mid = [[0.5, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 0.5]].contains(uv);
                assert!(on_mid, "{uv:?}");
            }
        }
    }

    #[test]
    fn left_side_thirty_percent() {
        // the side c3 -> c0 has vertices at 30% and 60% of its length
        let rim = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.7, 0.0],
            [0.0, 0.4, 0.0],
        ];
        let (m, lp) = fan(&rim);
        let map = square_boundary_map(&m, &lp, [0, 1, 2, 3]).unwrap();
        let uv_of = |v: usize| map.iter().find(|(x, _)| *x == v).unwrap().1;
        let p = uv_of(4);
        assert!((p[0]).abs() < 1e-15 && (p[1] - 0.7).abs() < 1e-12, "{p:?}");
    }

    #[test]
    fn bad_corner_order() {
        let (m, lp) = fan(&octagon_square());
        let c = pick_corners(&m, &lp).unwrap();
        assert!(matches!(
            square_boundary_map(&m, &lp, [c[0], c[2], c[1], c[3]]),
            Err(Error::BadCorners)
        ));
    }

    #[test]
    fn lopsided_loop_matches_enumeration() {
        // one edge is half the perimeter
        let rim = vec![
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 6.0],
            [0.0, 1.0, 6.0],
            [0.0, 2.0, 6.0],
            [0.0, 3.0, 6.0],
            [0.0, 3.0, 3.0],
        ];
        let (m, lp) = fan(&rim);
        let c = pick_corners(&m, &lp).unwrap();
        let n = lp.len();
        let s = lp.vertices.iter().position(|&v| v == c[0]).unwrap();
        let lens = lp.edge_lengths(&m);
        let mut cum = vec![0.0];
        for i in 0..n - 1 {
            cum.push(cum[i] + lens[(s + i) % n]);
        }
        let total: f64 = lens.iter().sum();
        let mut best = (f64::INFINITY, [0, 0, 0]);
        for a in 1..n {
            for b in a + 1..n {
                for d in b + 1..n {
                    let cost: f64 = [a, b, d]
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| (cum[i] - total * (k + 1) as f64 / 4.0).abs())
                        .sum();
                    if cost < best.0 {
                        best = (cost, [a, b, d]);
                    }
                }
            }
        }
        let got: Vec<usize> = c[1..]
            .iter()
            .map(|v| (lp.vertices.iter().position(|x| x == v).unwrap() + n - s) % n)
            .collect();
        assert_eq!(got, best.1.to_vec());
    }

    #[test]
    fn ear_tips_become_corners() {
        // this disk has an ear next to a corner picked by arc length alone
        let m = crate::synth::random_disk(402, 260);
        let lp = crate::mesh::boundary_loops(&m).unwrap().remove(0);
        let tips = ear_tips(&m, &lp);
        assert!(!tips.is_empty());
        let c = pick_corners(&m, &lp).unwrap();
        assert!(tips.iter().all(|t| c.contains(t)), "{tips:?} {c:?}");
    }
}
