use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use log::info;

use texpack_core::pipeline::{report_to_json, run, PipelineConfig, RunReport};
use texpack_core::{Filter, WeightScheme};

/// Re-parameterizes each component of a textured mesh onto the unit square
/// and bakes one texture per component.
#[derive(Parser, Debug)]
#[command(name = "texpack", version, about, long_about = None)]
struct Args {
    /// Input mesh (.obj, with .mtl and textures next to it)
    input: PathBuf,

    /// Output directory
    #[arg(short, long)]
    out: PathBuf,

    /// Longer side of each output texture in pixels (16..=16384)
    #[arg(long, default_value_t = 4096)]
    resolution: u32,

    /// Edge weights for the harmonic map: cotangent or uniform
    #[arg(long, default_value = "cotangent")]
    weights: WeightScheme,

    /// Retry with uniform weights when the map folds triangles
    #[arg(long)]
    auto_fallback: bool,

    /// Source sampling: nearest or bilinear
    #[arg(long, default_value = "bilinear")]
    filter: Filter,

    /// Holes with at most this many boundary edges are filled
    #[arg(long, default_value_t = 100)]
    max_hole_edges: usize,

    /// Handles shorter than this fraction of the bounding-box diagonal are cut
    #[arg(long, default_value_t = 0.02)]
    handle_threshold: f64,

    /// Output image aspect ratio, e.g. 2:1
    #[arg(long, value_parser = parse_aspect)]
    aspect: Option<(u32, u32)>,

    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,

    /// Write the run report as JSON to this file
    #[arg(long)]
    report: Option<PathBuf>,

    /// Keep small handles
    #[arg(long)]
    no_denoise: bool,

    /// Keep holes open (only the longest boundary is kept as the rim anyway)
    #[arg(long)]
    no_fill: bool,

    /// Write RGBA instead of RGB textures
    #[arg(long)]
    rgba: bool,

    /// Samples per pixel side, box filtered: 1, 2 or 4
    #[arg(long, default_value_t = 1)]
    supersample: u32,

    /// Relative residual at which the iterative solver stops
    #[arg(long, default_value_t = 1e-10)]
    solver_tol: f64,
}

fn parse_aspect(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once(':').ok_or_else(|| format!("expected W:H, got `{s}`"))?;
    let w: u32 = w.trim().parse().map_err(|_| format!("bad width in `{s}`"))?;
    let h: u32 = h.trim().parse().map_err(|_| format!("bad height in `{s}`"))?;
    if w == 0 || h == 0 {
        return Err(format!("aspect ratio `{s}` must be positive"));
    }
    Ok((w, h))
}

fn config(args: &Args) -> PipelineConfig {
    let mut cfg = PipelineConfig {
        resolution: args.resolution,
        aspect: args.aspect,
        filter: args.filter,
        supersample: args.supersample,
        rgba: args.rgba,
        threads: args.threads,
        ..Default::default()
    };
    cfg.repair.max_hole_edges = args.max_hole_edges;
    cfg.repair.handle_threshold = args.handle_threshold;
    cfg.repair.denoise = !args.no_denoise;
    cfg.repair.fill = !args.no_fill;
    cfg.param.scheme = args.weights;
    cfg.param.auto_fallback = args.auto_fallback;
    cfg.param.solve.tol = args.solver_tol;
    cfg
}

fn summary(report: &RunReport) -> String {
    let mut s = format!(
        "{} component(s), {}x{} textures, {:.2}s\n",
        report.components.len(),
        report.image_width,
        report.image_height,
        report.total_seconds
    );
    for c in &report.components {
        s.push_str(&format!(
            "  [{}] V {} F {} genus {} boundaries {} | filled {} handles {} | {} weights, energy {:.6}, residual {:.1e}, flips {} | defined {:.4} -> {:.4} | {}\n",
            c.index,
            c.input_vertices,
            c.input_faces,
            c.input_genus,
            c.input_boundaries,
            c.holes_filled,
            c.handles_removed,
            c.weights,
            c.energy,
            c.residual,
            c.flips,
            c.defined_before_dilation,
            c.defined_after_dilation,
            c.texture.as_deref().unwrap_or("no texture"),
        ));
    }
    s.push_str(&format!("mesh: {}", report.output_mesh));
    s
}

fn try_main(args: Args) -> Result<()> {
    if args.input.as_os_str().is_empty() || args.out.as_os_str().is_empty() {
        bail!("input and output paths must be non-empty");
    }
    let cfg = config(&args);
    info!("processing {}", args.input.display());
    let report = run(&args.input, &args.out, &cfg)?;
    if let Some(path) = &args.report {
        std::fs::write(path, report_to_json(&report) + "\n")
            .with_context(|| format!("cannot write report {}", path.display()))?;
    }
    println!("{}", summary(&report));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match try_main(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("texpack: {e:#}");
            ExitCode::FAILURE
        }
    }
}
