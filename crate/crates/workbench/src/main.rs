use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use lulc_core::{memory_footprint, MaskingMethod, SeedPalette};
use lulc_workbench::pipeline::{run_pipeline, stats_json, write_artifacts, PipelineOptions, PipelineOutput};
use lulc_workbench::{formats, http, imageio, SessionStore};

#[derive(Parser)]
#[command(name = "lulc-miner", version, about = "Seeded land-use/land-cover segmentation and feature-space mining")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify and write per-cluster masks, colormaps and the clustered pair.
    Segment(Inputs),
    /// Write stats.json and print the area report.
    Stats(Inputs),
    /// Write feature-space meshes and training samples for clusters 2..k.
    Mesh {
        #[command(flatten)]
        inputs: Inputs,
        /// Also write Wavefront OBJ files.
        #[arg(long)]
        obj: bool,
    },
    /// Print the area report of an existing output directory.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage and write the full artifact set.
    Run(Inputs),
    /// Index/colormap element counts for a k-cluster image.
    Footprint {
        #[arg(long)]
        width: u64,
        #[arg(long)]
        height: u64,
        #[arg(long)]
        k: u64,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "LULC_MINER_DATA_DIR", default_value = "lulc-data")]
        data_dir: PathBuf,
        #[arg(long, env = "LULC_MINER_PORT", default_value_t = 8080)]
        port: u16,
        /// Directory with a static UI bundle to serve at `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    image: PathBuf,
    /// JSON `[{"label": ..., "rgb": [r, g, b]}, ...]`, background first.
    #[arg(long)]
    palette: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Refine class means with K-means over all foreground pixels (default).
    #[arg(long, conflicts_with = "freeze_assignments")]
    refine_means: bool,
    /// Keep nearest-seed assignments; means are per-class centroids.
    #[arg(long)]
    freeze_assignments: bool,
    #[arg(long, default_value_t = 32)]
    bins: usize,
    #[arg(long, default_value_t = 0.1)]
    iso_frac: f64,
    #[arg(long, default_value_t = 160)]
    sample_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Inputs {
    fn options(&self) -> PipelineOptions {
        PipelineOptions {
            refine_means: !self.freeze_assignments,
            bins_per_axis: self.bins,
            iso_level_fraction: self.iso_frac,
            sample_n: self.sample_n,
            rng_seed: self.seed,
            ..Default::default()
        }
    }

    fn run(&self) -> Result<PipelineOutput> {
        let img = imageio::load_image_path(&self.image).with_context(|| format!("reading {}", self.image.display()))?;
        let palette: SeedPalette = formats::parse_palette(
            &fs::read(&self.palette).with_context(|| format!("reading {}", self.palette.display()))?,
        )?;
        let out = run_pipeline(&img, &palette, &self.options())?;
        fs::create_dir_all(&self.out)?;
        Ok(out)
    }
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn segment(inputs: &Inputs, out: &PipelineOutput) -> Result<()> {
    for (i, (mask, map)) in out.masks.iter().zip(&out.colormaps).enumerate() {
        write(&inputs.out, &formats::mask_file(i + 1), &imageio::encode_mask_png(mask)?)?;
        write(&inputs.out, &formats::colormap_file(i + 1), &formats::colormap_json(map)?)?;
    }
    write(&inputs.out, formats::CLUSTERED_PNG, &imageio::encode_label_png(&out.indexed)?)?;
    write(&inputs.out, formats::CLUSTERED_MAP, &formats::colormap_json(out.indexed.colormap())?)
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();

    match Cli::parse().command {
        Command::Segment(inputs) => segment(&inputs, &inputs.run()?)?,
        Command::Stats(inputs) => {
            let out = inputs.run()?;
            write(&inputs.out, formats::STATS_JSON, &stats_json(&out.stats)?)?;
            print!("{}", out.stats.format_report());
        }
        Command::Mesh { inputs, obj } => {
            let out = inputs.run()?;
            for (mesh, samples) in out.meshes.iter().zip(&out.samples) {
                write(&inputs.out, &formats::mesh_file(mesh.cluster), &formats::mesh_json(mesh)?)?;
                write(
                    &inputs.out,
                    &format!("samples_{}.json", mesh.cluster),
                    &serde_json::to_vec(samples)?,
                )?;
                if obj {
                    write(&inputs.out, &format!("mesh_{}.obj", mesh.cluster), formats::mesh_obj(mesh).as_bytes())?;
                }
            }
        }
        Command::Report { out } => {
            let path = out.join(formats::STATS_JSON);
            let stats: lulc_core::ClusterStats = serde_json::from_slice(
                &fs::read(&path).with_context(|| format!("reading {}", path.display()))?,
            )?;
            print!("{}", stats.format_report());
        }
        Command::Run(inputs) => {
            let out = inputs.run()?;
            write_artifacts(&inputs.out, &out)?;
            print!("{}", out.stats.format_report());
        }
        Command::Footprint { width, height, k } => {
            let images = memory_footprint(width, height, k, MaskingMethod::PerClusterImages)?;
            let maps = memory_footprint(width, height, k, MaskingMethod::PerClusterColormaps)?;
            println!("per-cluster images:    {} elements", images.total);
            println!("per-cluster colormaps: {} elements", maps.total);
            println!("ratio: {:.3}", images.ratio_to(&maps));
        }
        Command::Serve { data_dir, port, static_dir } => {
            let store = Arc::new(SessionStore::open(&data_dir)?);
            tokio::runtime::Runtime::new()?.block_on(http::serve(store, static_dir, port))?;
        }
    }
    Ok(())
}
