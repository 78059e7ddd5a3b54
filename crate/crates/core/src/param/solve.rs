use log::{debug, warn};

use super::weights::EdgeWeights;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Vec2};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Solver {
    /// Conjugate gradients, with a dense fallback for small systems that do
    /// not converge.
    #[default]
    Auto,
    Pcg,
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Relative residual `|b - Ax| / |b|` at which CG stops.
    pub tol: f64,
    /// CG iteration cap as a multiple of the number of unknowns.
    pub max_iter_factor: usize,
    /// Systems below this many unknowns may fall back to dense elimination.
    pub dense_limit: usize,
    pub solver: Solver,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter_factor: 10,
            dense_limit: 2000,
            solver: Solver::Auto,
        }
    }
}

/// Per-vertex UVs from a harmonic solve.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamCoords {
    pub uv: Vec<Vec2>,
    /// Max over interior vertices and both coordinates of
    /// `|sum_j w_ij (H_j - H_i)|`.
    pub residual: f64,
    /// CG iterations (the larger of the two solves); 0 for dense solves.
    pub iterations: usize,
}

/// Symmetric sparse matrix in compressed rows.
#[derive(Clone, Debug)]
pub(crate) struct Csr {
    pub n: usize,
    pub offsets: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.offsets[i]..self.offsets[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.offsets[i]..self.offsets[i + 1])
                    .find(|&k| self.cols[k] == i)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for k in self.offsets[i]..self.offsets[i + 1] {
                a[i * self.n + self.cols[k]] += self.vals[k];
            }
        }
        a
    }
}

/// The interior Laplace system `A x = b` for both coordinates.
pub(crate) struct System {
    pub matrix: Csr,
    pub rhs: [Vec<f64>; 2],
    /// Mesh vertex of each unknown.
    pub vertex: Vec<usize>,
}

/// Assembles the system with boundary values moved to the right-hand side.
/// `fixed[v]` holds the prescribed UV of boundary vertices.
pub(crate) fn assemble(mesh: &Mesh, weights: &EdgeWeights, fixed: &[Option<Vec2>]) -> Result<System> {
    let nv = mesh.vertex_count();
    let mut index = vec![usize::MAX; nv];
    let mut vertex = Vec::new();
    for v in 0..nv {
        if fixed[v].is_none() && mesh.is_referenced(v) {
            index[v] = vertex.len();
            vertex.push(v);
        }
    }
    let n = vertex.len();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut rhs = [vec![0.0; n], vec![0.0; n]];
    offsets.push(0);
    let mut row: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in vertex.iter().enumerate() {
        row.clear();
        let mut diag = 0.0;
        for u in mesh.vertex_neighbors(v) {
            let e = mesh.edge_between(v, u).expect("neighbor edge");
            let w = weights.get(e);
            diag += w;
            match fixed[u] {
                Some(uv) => {
                    rhs[0][i] += w * uv[0];
                    rhs[1][i] += w * uv[1];
                }
                None => row.push((index[u], -w)),
            }
        }
        if !(diag > 0.0) {
            return Err(Error::Singular(v));
        }
        row.push((i, diag));
        row.sort_unstable_by_key(|&(c, _)| c);
        for &(c, w) in &row {
            cols.push(c);
            vals.push(w);
        }
        offsets.push(cols.len());
    }
    Ok(System {
        matrix: Csr {
            n,
            offsets,
            cols,
            vals,
        },
        rhs,
        vertex,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients. Returns the solution and the
/// iteration count, or `NoConvergence` with the last relative residual.
pub(crate) fn pcg(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let n = a.n;
    let mut x = vec![0.0; n];
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok((x, 0));
    }
    let inv: Vec<f64> = a.diag().iter().map(|d| 1.0 / d).collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut it = 0;
    let mut rel = 1.0;
    while it < max_iter {
        a.mul(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        it += 1;
        rel = dot(&r, &r).sqrt() / bnorm;
        if rel <= tol {
            // confirm with the true residual, restart from it if drifted
            a.mul(&x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            rel = dot(&r, &r).sqrt() / bnorm;
            if rel <= tol {
                return Ok((x, it));
            }
            for i in 0..n {
                z[i] = r[i] * inv[i];
            }
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        for i in 0..n {
            z[i] = r[i] * inv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        iterations: it,
        residual: rel,
    })
}

/// Gaussian elimination with partial pivoting on a dense copy, solving for
/// several right-hand sides at once.
pub(crate) fn dense_solve(a: &Csr, rhs: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    let n = a.n;
    let m = rhs.len();
    let mut mat = a.to_dense();
    let mut b: Vec<Vec<f64>> = rhs.iter().map(|r| r.to_vec()).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| mat[i * n + col].abs().total_cmp(&mat[j * n + col].abs()))
            .expect("non-empty range");
        if mat[piv * n + col] == 0.0 {
            return Err(Error::Singular(col));
        }
        if piv != col {
            for k in 0..n {
                mat.swap(piv * n + k, col * n + k);
            }
            for r in b.iter_mut() {
                r.swap(piv, col);
            }
        }
        let d = mat[col * n + col];
        for i in col + 1..n {
            let f = mat[i * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                mat[i * n + k] -= f * mat[col * n + k];
            }
            for r in b.iter_mut() {
                r[i] -= f * r[col];
            }
        }
    }
    let mut out = vec![vec![0.0; n]; m];
    for (r, x) in b.iter().zip(out.iter_mut()) {
        for i in (0..n).rev() {
            let mut s = r[i];
            for k in i + 1..n {
                s -= mat[i * n + k] * x[k];
            }
            x[i] = s / mat[i * n + i];
        }
    }
    Ok(out)
}

/// Max over interior vertices of `|sum_j w_ij (H_j - H_i)|`, per coordinate.
pub fn laplace_residual(mesh: &Mesh, weights: &EdgeWeights, uv: &[Vec2], interior: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for &v in interior {
        let mut s = [0.0; 2];
        for u in mesh.vertex_neighbors(v) {
            let w = weights.get(mesh.edge_between(v, u).expect("neighbor edge"));
            s[0] += w * (uv[u][0] - uv[v][0]);
            s[1] += w * (uv[u][1] - uv[v][1]);
        }
        worst = worst.max(s[0].abs()).max(s[1].abs());
    }
    worst
}

/// Solves the discrete Laplace equation for every vertex not in `boundary`.
/// Boundary vertices keep their prescribed UVs bit-for-bit; the u and v
/// systems share one matrix and are solved concurrently.
pub fn solve_harmonic(
    mesh: &Mesh,
    weights: &EdgeWeights,
    boundary: &[(usize, Vec2)],
    opts: &SolveOptions,
) -> Result<ParamCoords> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidThreshold(opts.tol));
    }
    let nv = mesh.vertex_count();
    let mut fixed = vec![None; nv];
    for &(v, uv) in boundary {
        fixed[v] = Some(uv);
    }
    let sys = assemble(mesh, weights, &fixed)?;
    let n = sys.matrix.n;
    let max_iter = (opts.max_iter_factor * n).max(1);

    let dense = |sys: &System| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut sol = dense_solve(&sys.matrix, &[&sys.rhs[0], &sys.rhs[1]]).map_err(|e| match e {
            Error::Singular(i) => Error::Singular(sys.vertex[i]),
            e => e,
        })?;
        let v = sol.pop().expect("two solutions");
        let u = sol.pop().expect("two solutions");
        Ok((u, v))
    };
    let (u, v, iterations) = match opts.solver {
        Solver::Dense => {
            let (u, v) = dense(&sys)?;
            (u, v, 0)
        }
        Solver::Pcg | Solver::Auto => {
            let (ru, rv) = rayon::join(
                || pcg(&sys.matrix, &sys.rhs[0], opts.tol, max_iter),
                || pcg(&sys.matrix, &sys.rhs[1], opts.tol, max_iter),
            );
            match (ru, rv) {
                (Ok((u, iu)), Ok((v, iv))) => (u, v, iu.max(iv)),
                (Err(e), _) | (_, Err(e)) => {
                    if opts.solver == Solver::Auto && n < opts.dense_limit {
                        warn!("{e}; falling back to dense elimination");
                        let (u, v) = dense(&sys)?;
                        (u, v, 0)
                    } else {
                        return Err(e);
                    }
                }
            }
        }
    };

    let mut uv = vec![[0.0, 0.0]; nv];
    for (v, f) in fixed.iter().enumerate() {
        if let Some(p) = f {
            uv[v] = *p;
        }
    }
    for (i, &vtx) in sys.vertex.iter().enumerate() {
        uv[vtx] = [u[i], v[i]];
    }
    let residual = laplace_residual(mesh, weights, &uv, &sys.vertex);
    debug!("harmonic solve: {n} unknowns, {iterations} iterations, residual {residual:e}");
    Ok(ParamCoords {
        uv,
        residual,
        iterations,
    })
}
