//! The `render`, `slice` and `sweep` jobs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use qjulia::field::FieldStats;
use qjulia::parallel::default_workers;
use qjulia::render::{Image, RenderOptions, Scene};
use qjulia::{render_image, render_slice2d, scan, ClassifierParams, ComplexRationalMap, SliceBitmap};

use crate::config::RenderConfig;

/// Command-line settings that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub dump_field: Option<PathBuf>,
}

impl Overrides {
    fn workers(&self, config: &RenderConfig) -> usize {
        self.workers.or(config.workers).unwrap_or_else(default_workers).max(1)
    }
}

/// What a render produced.
#[derive(Clone, Debug)]
pub struct RenderSummary {
    pub image_path: PathBuf,
    pub hit_pixels: usize,
    pub field_path: Option<PathBuf>,
    pub field_stats: Option<FieldStats>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn finish(mut out: BufWriter<File>, path: &Path) -> Result<()> {
    out.flush().with_context(|| format!("writing {}", path.display()))
}

fn render_with(config: &RenderConfig, params: &ClassifierParams<f64>, workers: usize) -> Result<Image> {
    let map = config.build_map()?;
    let embedding = config.embedding()?;
    let camera = config.camera()?;
    let lighting = config.lighting()?;
    let scene = Scene { map: &map, embedding: &embedding, params, camera: &camera };
    let opts = RenderOptions { refine_steps: config.refine, workers, coloring: config.coloring() };
    Ok(render_image(&scene, &lighting, &opts))
}

fn write_image(image: &Image, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    image.write_ppm(&mut out).with_context(|| format!("writing {}", path.display()))?;
    finish(out, path)
}

/// Writes the classification field; `.csv` paths get CSV, anything else the raw format.
fn dump_field(
    config: &RenderConfig,
    params: &ClassifierParams<f64>,
    workers: usize,
    path: &Path,
) -> Result<FieldStats> {
    let map = config.build_map()?;
    let field = scan(&map, &config.region()?, &config.embedding()?, params, workers);
    let mut out = create(path)?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv { field.write_csv(&mut out) } else { field.write_raw(&mut out) }
        .with_context(|| format!("writing {}", path.display()))?;
    finish(out, path)?;
    Ok(field.stats())
}

/// Renders the configured view to a PPM and optionally dumps the field.
pub fn run_render(config: &RenderConfig, overrides: &Overrides) -> Result<RenderSummary> {
    let workers = overrides.workers(config);
    let params = config.params()?;
    let image_path = overrides.out.clone().unwrap_or_else(|| config.output.clone());
    let image = render_with(config, &params, workers)?;
    write_image(&image, &image_path)?;
    let field_path = overrides.dump_field.clone().or_else(|| config.field_dump.clone());
    let field_stats = match &field_path {
        Some(path) => Some(dump_field(config, &params, workers, path)?),
        None => None,
    };
    Ok(RenderSummary { image_path, hit_pixels: image.lit_pixels(), field_path, field_stats })
}

/// Classifies the complex slice of a map with complex coefficients and writes a PGM.
///
/// Without `--out` the image goes next to `output` with a `.pgm` extension.
pub fn run_slice(config: &RenderConfig, overrides: &Overrides) -> Result<(PathBuf, SliceBitmap)> {
    let map = config.build_map()?;
    let complex = ComplexRationalMap::from_quaternion_map(&map)
        .context("the slice command needs a map whose coefficients have zero n and p components")?;
    let window = config.window()?;
    let [w, h] = config.slice.resolution;
    let bitmap = render_slice2d(&complex, &window, w, h, &config.params()?);
    let path = overrides.out.clone().unwrap_or_else(|| config.output.with_extension("pgm"));
    let mut out = create(&path)?;
    bitmap.write_pgm(&mut out).with_context(|| format!("writing {}", path.display()))?;
    finish(out, &path)?;
    Ok((path, bitmap))
}

/// One cell of a parameter sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub radius: f64,
    pub max_iter: u32,
    pub stats: FieldStats,
}

/// Gap in pixels between contact sheet tiles.
const SHEET_GAP: usize = 2;

/// Renders every (radius, iteration count) pair of the sweep section.
///
/// Cells are ordered radius-major, duplicates included. The output directory
/// receives `sweep.csv`, one PPM per cell and `contact_sheet.ppm`, whose rows
/// are radii and columns iteration counts. Each cell keeps the configured
/// `cutoffCount`, clamped into `1..=maxIter`.
pub fn run_sweep(config: &RenderConfig, overrides: &Overrides) -> Result<Vec<SweepRow>> {
    let sweep = config.sweep.as_ref().context("the config has no \"sweep\" section")?;
    let dir = overrides.out.clone().unwrap_or_else(|| sweep.output_dir.clone());
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let workers = overrides.workers(config);
    let map = config.build_map()?;
    let region = config.region()?;
    let embedding = config.embedding()?;

    let (tw, th) = (config.camera.width, config.camera.height);
    let cols = sweep.iteration_counts.len();
    let rows = sweep.radii.len();
    let mut sheet = Image::black(cols * tw + (cols - 1) * SHEET_GAP, rows * th + (rows - 1) * SHEET_GAP);

    let csv_path = dir.join("sweep.csv");
    let mut csv = csv::Writer::from_writer(create(&csv_path)?);
    csv.write_record(["radius", "maxIter", "fracPlotted", "fracEscaped", "fracConverged", "meanSteps"])?;

    let mut results = Vec::with_capacity(rows * cols);
    for (row, &radius) in sweep.radii.iter().enumerate() {
        for (col, &max_iter) in sweep.iteration_counts.iter().enumerate() {
            let cutoff = config.cutoff_count.clamp(1, max_iter);
            let params = ClassifierParams::new(config.method.into(), radius, max_iter, cutoff)
                .with_context(|| format!("sweep cell radius={radius} maxIter={max_iter}"))?;
            let stats = scan(&map, &region, &embedding, &params, workers).stats();
            csv.write_record([
                radius.to_string(),
                max_iter.to_string(),
                stats.frac(stats.plotted).to_string(),
                stats.frac(stats.escaped).to_string(),
                stats.frac(stats.converged).to_string(),
                stats.mean_steps.to_string(),
            ])?;

            let image = render_with(config, &params, workers)?;
            let index = results.len();
            write_image(&image, &dir.join(format!("cell_{index:03}_r{radius}_n{max_iter}.ppm")))?;
            sheet.blit(&image, col * (tw + SHEET_GAP), row * (th + SHEET_GAP));
            results.push(SweepRow { radius, max_iter, stats });
        }
    }
    let out = csv.into_inner().map_err(|e| anyhow::anyhow!("writing {}: {}", csv_path.display(), e.error()))?;
    finish(out, &csv_path)?;
    write_image(&sheet, &dir.join("contact_sheet.ppm"))?;
    Ok(results)
}
