use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use qjulia_cli::{load_config, run_render, run_slice, run_sweep, Overrides};

/// Renders three-dimensional slices of quaternionic Julia sets.
#[derive(Parser)]
#[command(name = "qjulia", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ray-cast the configured view to a PPM image.
    Render(Job),
    /// Draw the complex-plane slice of the map as a PGM bitmap.
    Slice(Job),
    /// Render a grid of escape radii and iteration counts.
    Sweep(Job),
}

#[derive(Args)]
struct Job {
    /// JSON job description.
    config: PathBuf,
    /// Worker threads (default: config value, then all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output file, or output directory for `sweep`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the classification field; `.csv` selects CSV, anything else the raw format.
    #[arg(long)]
    dump_field: Option<PathBuf>,
}

impl Job {
    fn overrides(&self) -> Result<Overrides> {
        if self.workers == Some(0) {
            anyhow::bail!("--workers must be at least 1");
        }
        Ok(Overrides { workers: self.workers, out: self.out.clone(), dump_field: self.dump_field.clone() })
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Render(job) => {
            let config = load_config(&job.config)?;
            let summary = run_render(&config, &job.overrides()?)?;
            println!("wrote {} ({} lit pixels)", summary.image_path.display(), summary.hit_pixels);
            if let (Some(path), Some(stats)) = (summary.field_path, summary.field_stats) {
                println!("wrote {} ({} of {} voxels plotted)", path.display(), stats.plotted, stats.total);
            }
        }
        Command::Slice(job) => {
            let config = load_config(&job.config)?;
            let (path, bitmap) = run_slice(&config, &job.overrides()?)?;
            println!("wrote {} ({} plotted pixels)", path.display(), bitmap.count());
        }
        Command::Sweep(job) => {
            let config = load_config(&job.config)?;
            let rows = run_sweep(&config, &job.overrides()?)?;
            for row in rows {
                println!(
                    "radius={} maxIter={} plotted={:.4}",
                    row.radius,
                    row.max_iter,
                    row.stats.frac(row.stats.plotted)
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
