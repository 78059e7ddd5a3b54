//! Square harmonic parameterization of disk-topology meshes.

mod boundary;
mod chords;
mod energy;
mod solve;
mod weights;

use log::warn;
use serde::Serialize;

pub use chords::{boundary_chords, split_boundary_chords};
pub use boundary::{ear_tips, pick_corners, square_boundary_map, SQUARE_CORNERS};
pub use energy::{count_flips, harmonic_energy, uv_area_sum, uv_signed_area};
pub use solve::{laplace_residual, solve_harmonic, ParamCoords, SolveOptions, Solver};
pub use weights::{compute_weights, EdgeWeights, WeightScheme, COT_CLAMP};

use crate::error::{Error, Result};
use crate::mesh::{boundary_loops, genus_with_boundaries, Mesh, Vec2};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ParamOptions {
    pub scheme: WeightScheme,
    /// Retry with uniform weights when the requested scheme folds triangles
    /// or cannot be evaluated.
    pub auto_fallback: bool,
    pub solve: SolveOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Parameterization {
    pub uv: Vec<Vec2>,
    pub corners: [usize; 4],
    /// Scheme actually used for the returned map.
    pub scheme: WeightScheme,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub flips: usize,
}

/// Maps a topological disk onto the unit square: boundary by arc length
/// onto the square's sides, interior by the harmonic solve.
pub fn parameterize(mesh: &Mesh, opts: &ParamOptions) -> Result<Parameterization> {
    let loops = boundary_loops(mesh)?;
    let genus = genus_with_boundaries(mesh, loops.len() as i64)?;
    if loops.len() != 1 || genus != 0 {
        return Err(Error::NotADisk {
            genus,
            boundaries: loops.len(),
        });
    }
    let lp = &loops[0];
    let corners = pick_corners(mesh, lp)?;
    let fixed = square_boundary_map(mesh, lp, corners)?;

    let run = |scheme: WeightScheme| -> Result<Parameterization> {
        let w = compute_weights(mesh, scheme)?;
        let coords = solve_harmonic(mesh, &w, &fixed, &opts.solve)?;
        Ok(Parameterization {
            energy: harmonic_energy(mesh, &w, &coords.uv),
            flips: count_flips(mesh, &coords.uv),
            uv: coords.uv,
            corners,
            scheme,
            residual: coords.residual,
            iterations: coords.iterations,
        })
    };

    let can_retry = opts.auto_fallback && opts.scheme != WeightScheme::Uniform;
    match run(opts.scheme) {
        Ok(p) if p.flips > 0 && can_retry => {
            warn!("{} flipped triangles with {} weights; retrying with uniform weights", p.flips, p.scheme);
            run(WeightScheme::Uniform)
        }
        Err(e @ (Error::DegenerateFace(_) | Error::Singular(_) | Error::NoConvergence { .. })) if can_retry => {
            warn!("{e}; retrying with uniform weights");
            run(WeightScheme::Uniform)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn grid_maps_to_itself() {
        let m = synth::grid(6, 6);
        let p = parameterize(&m, &ParamOptions::default()).unwrap();
        assert_eq!(p.flips, 0);
        for v in 0..m.vertex_count() {
            let x = m.position(v);
            assert!((p.uv[v][0] - x[0]).abs() < 1e-8 && (p.uv[v][1] - x[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn closed_mesh_is_not_a_disk() {
        assert!(matches!(
            parameterize(&synth::tetrahedron(), &ParamOptions::default()),
            Err(Error::NotADisk { genus: 0, boundaries: 0 })
        ));
    }

    #[test]
    fn energy_is_minimal_under_perturbation() {
        let m = synth::random_disk(5, 300);
        let p = parameterize(&m, &ParamOptions::default()).unwrap();
        let w = compute_weights(&m, p.scheme).unwrap();
        let lp = &boundary_loops(&m).unwrap()[0];
        let e0 = harmonic_energy(&m, &w, &p.uv);
        for v in (0..m.vertex_count()).filter(|v| !lp.vertices.contains(v)).take(20) {
            for d in [[1e-3, 0.0], [0.0, -1e-3], [7e-4, 7e-4]] {
                let mut uv = p.uv.clone();
                uv[v][0] += d[0];
                uv[v][1] += d[1];
                assert!(harmonic_energy(&m, &w, &uv) > e0);
            }
        }
    }

    #[test]
    fn uniform_weights_respect_the_maximum_principle() {
        let m = synth::random_disk(9, 500);
        let opts = ParamOptions {
            scheme: WeightScheme::Uniform,
            ..Default::default()
        };
        let p = parameterize(&m, &opts).unwrap();
        assert_eq!(p.flips, 0);
        for uv in &p.uv {
            assert!((0.0..=1.0).contains(&uv[0]) && (0.0..=1.0).contains(&uv[1]));
        }
        assert!((uv_area_sum(&m, &p.uv) - 1.0).abs() < 1e-9);
    }
}
