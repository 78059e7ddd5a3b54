//! Texture-space optimization for textured triangle meshes: topological
//! repair, square harmonic parameterization and texture regeneration.

pub mod error;
pub mod mesh;
pub mod param;
pub mod pipeline;
pub mod raster;
pub mod repair;
pub mod synth;

pub use error::{Error, Result};
pub use mesh::obj::{load_mesh, parse_obj, save_mesh};
pub use mesh::{boundary_loops, genus, split_components, BoundaryLoop, Component, Corner, Mesh, Vec2, Vec3};
pub use param::{parameterize, ParamOptions, Parameterization, SolveOptions, Solver, WeightScheme};
pub use pipeline::{report_to_json, run, ComponentReport, PipelineConfig, RunReport};
pub use raster::{bake_texture, BakeOptions, BakeOutput, Filter, TextureImage};
pub use repair::{repair_component, RepairOptions, RepairStats, Repaired};
