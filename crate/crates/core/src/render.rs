//! First-hit ray casting of the plotted set, depth-gradient normals and
//! Lambertian / Phong shading.
//!
//! The camera is orthographic and looks along one coordinate axis of the
//! scanned box. Each pixel's ray is sampled at the grid spacing of that axis;
//! the first plotted sample ends the march and the crossing between it and
//! the previous sample is refined by bisection.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::dynamics::{classify, ClassifierParams, OrbitOutcome, QRationalMap};
use crate::error::{Error, Result};
use crate::field::{refine_bisect, Embedding, Region3};
use crate::parallel::{default_workers, with_workers};
use crate::quat::Quaternion;
use crate::scalar::{grid_coord, Real};

/// Direction the rays travel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViewAxis {
    PosX,
    NegX,
    PosY,
    NegY,
    PosZ,
    NegZ,
}

impl ViewAxis {
    pub const ALL: [ViewAxis; 6] =
        [ViewAxis::PosX, ViewAxis::NegX, ViewAxis::PosY, ViewAxis::NegY, ViewAxis::PosZ, ViewAxis::NegZ];

    /// Index of the depth axis.
    pub fn depth_axis(self) -> usize {
        match self {
            ViewAxis::PosX | ViewAxis::NegX => 0,
            ViewAxis::PosY | ViewAxis::NegY => 1,
            ViewAxis::PosZ | ViewAxis::NegZ => 2,
        }
    }

    /// Indices of the horizontal and vertical screen axes.
    pub fn screen_axes(self) -> (usize, usize) {
        match self.depth_axis() {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, ViewAxis::PosX | ViewAxis::PosY | ViewAxis::PosZ)
    }

    pub fn name(self) -> &'static str {
        match self {
            ViewAxis::PosX => "+x",
            ViewAxis::NegX => "-x",
            ViewAxis::PosY => "+y",
            ViewAxis::NegY => "-y",
            ViewAxis::PosZ => "+z",
            ViewAxis::NegZ => "-z",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// Orthographic axis-aligned camera framing `region`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera<T> {
    pub view_axis: ViewAxis,
    pub width: usize,
    pub height: usize,
    pub region: Region3<T>,
}

impl<T: Real> Camera<T> {
    pub fn new(view_axis: ViewAxis, width: usize, height: usize, region: Region3<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidCamera("image size must be at least 1x1"));
        }
        Ok(Self { view_axis, width, height, region })
    }

    /// Screen-plane coordinates of the center of pixel `(px, py)`; row 0 is the top.
    pub fn pixel_center(&self, px: usize, py: usize) -> (T, T) {
        let (ua, va) = self.view_axis.screen_axes();
        let r = &self.region;
        let half = T::lit(0.5);
        let u = r.min[ua] + (T::from_count(px) + half) * (r.max[ua] - r.min[ua]) / T::from_count(self.width);
        let v = r.max[va] - (T::from_count(py) + half) * (r.max[va] - r.min[va]) / T::from_count(self.height);
        (u, v)
    }

    /// Pixel footprint `(du, dv)` in world units.
    pub fn pixel_size(&self) -> (T, T) {
        let (ua, va) = self.view_axis.screen_axes();
        let r = &self.region;
        ((r.max[ua] - r.min[ua]) / T::from_count(self.width), (r.max[va] - r.min[va]) / T::from_count(self.height))
    }

    /// Number of samples along each ray.
    pub fn depth_samples(&self) -> usize {
        self.region.resolution[self.view_axis.depth_axis()]
    }

    /// Coordinate on the depth axis of sample `j`, counted from the front face.
    pub fn depth_coord(&self, j: usize) -> T {
        let d = self.view_axis.depth_axis();
        let n = self.depth_samples();
        let idx = if self.view_axis.is_positive() { j } else { n - 1 - j };
        grid_coord(self.region.min[d], self.region.max[d], idx, n)
    }

    /// Coordinate of the face the rays enter through.
    pub fn front(&self) -> T {
        let d = self.view_axis.depth_axis();
        if self.view_axis.is_positive() {
            self.region.min[d]
        } else {
            self.region.max[d]
        }
    }

    /// Region extent along the view axis.
    pub fn extent(&self) -> T {
        let d = self.view_axis.depth_axis();
        self.region.max[d] - self.region.min[d]
    }

    fn point(&self, u: T, v: T, depth_coord: T) -> [T; 3] {
        let (ua, va) = self.view_axis.screen_axes();
        let mut xyz = [T::zero(); 3];
        xyz[ua] = u;
        xyz[va] = v;
        xyz[self.view_axis.depth_axis()] = depth_coord;
        xyz
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LightingModel {
    /// `max(0, N·L)`.
    SimpleLambertian,
    /// `k_a + k_d max(0, N·L)`.
    Lambertian,
    /// `k_a + k_d max(0, N·L) + k_s max(0, R·V)^α`.
    Phong,
}

/// Light and material. `light_dir` points from the surface toward the light,
/// in camera coordinates (`+x` right, `+y` up, `+z` toward the viewer).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LightingParams<T> {
    pub model: LightingModel,
    pub light_dir: [T; 3],
    pub ambient: T,
    pub diffuse: T,
    pub specular: T,
    pub shininess: T,
}

impl<T: Real> LightingParams<T> {
    pub fn new(
        model: LightingModel,
        light_dir: [T; 3],
        ambient: T,
        diffuse: T,
        specular: T,
        shininess: T,
    ) -> Result<Self> {
        let len = dot(light_dir, light_dir).sqrt();
        if !len.is_finite() || (len - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::InvalidLighting("light direction must be a unit vector"));
        }
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !(unit(ambient) && unit(diffuse) && unit(specular)) {
            return Err(Error::InvalidLighting("coefficients must lie in [0, 1]"));
        }
        if !shininess.is_finite() || shininess < T::one() {
            return Err(Error::InvalidLighting("shininess must be at least 1"));
        }
        Ok(Self { model, light_dir, ambient, diffuse, specular, shininess })
    }

    /// Phong lighting from the upper left front.
    pub fn phong_default() -> Self {
        let l = normalize([T::lit(-1.0), T::lit(1.0), T::lit(2.0)]);
        Self::new(LightingModel::Phong, l, T::lit(0.1), T::lit(0.7), T::lit(0.3), T::lit(20.0)).expect("valid")
    }
}

impl<T: Real> Default for LightingParams<T> {
    fn default() -> Self {
        Self::phong_default()
    }
}

fn dot<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Scales `v` to unit length.
pub fn normalize<T: Real>(v: [T; 3]) -> [T; 3] {
    let len = dot(v, v).sqrt();
    v.map(|c| c / len)
}

/// One pixel of a [`DepthMap`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthSample<T> {
    pub hit: bool,
    /// Distance from the front face along the view axis.
    pub depth: T,
    /// Refined surface point.
    pub point: Quaternion<T>,
    /// Steps of the orbit at the first plotted sample.
    pub steps: u32,
}

impl<T: Real> DepthSample<T> {
    fn miss() -> Self {
        Self { hit: false, depth: T::zero(), point: Quaternion::zero(), steps: 0 }
    }
}

/// Per-pixel first-hit data, row-major with the top row first.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMap<T> {
    pub width: usize,
    pub height: usize,
    /// Pixel footprint in world units along the screen axes.
    pub pixel_size: (T, T),
    pub samples: Vec<DepthSample<T>>,
}

impl<T: Real> DepthMap<T> {
    pub fn get(&self, px: usize, py: usize) -> &DepthSample<T> {
        &self.samples[py * self.width + px]
    }

    pub fn hit_count(&self) -> usize {
        self.samples.iter().filter(|s| s.hit).count()
    }

    fn depth_at(&self, px: isize, py: isize) -> Option<T> {
        if px < 0 || py < 0 || px as usize >= self.width || py as usize >= self.height {
            return None;
        }
        let s = self.get(px as usize, py as usize);
        s.hit.then_some(s.depth)
    }
}

/// Map, embedding, classifier and camera of one render.
#[derive(Clone, Copy, Debug)]
pub struct Scene<'a, T> {
    pub map: &'a QRationalMap<T>,
    pub embedding: &'a Embedding<T>,
    pub params: &'a ClassifierParams<T>,
    pub camera: &'a Camera<T>,
}

fn trace_ray<T: Real>(scene: &Scene<'_, T>, px: usize, py: usize, k_refine: u32) -> DepthSample<T> {
    let cam = scene.camera;
    let (u, v) = cam.pixel_center(px, py);
    let front = cam.front();
    let d = cam.view_axis.depth_axis();
    let mut prev: Option<Quaternion<T>> = None;
    for j in 0..cam.depth_samples() {
        let seed = scene.embedding.lift(cam.point(u, v, cam.depth_coord(j)));
        let outcome = classify(scene.map, seed, scene.params);
        if !outcome.is_plotted(scene.params) {
            prev = Some(seed);
            continue;
        }
        let point = match prev {
            Some(outside) => refine_bisect(scene.map, outside, seed, scene.params, k_refine)
                .expect("bracket endpoints differ in fate"),
            None => seed,
        };
        let depth = (scene.embedding.project(point)[d] - front).abs();
        let steps = match outcome {
            OrbitOutcome::Converged { steps, .. } | OrbitOutcome::Indeterminate { steps, .. } => steps,
            _ => 0,
        };
        return DepthSample { hit: true, depth, point, steps };
    }
    DepthSample::miss()
}

/// Marches every pixel's ray and records its first plotted crossing.
///
/// Rays stop at the first plotted sample, so nothing behind the visible
/// surface is drawn. The crossing is refined with `k_refine` bisection steps
/// between the last unplotted and the first plotted sample; a ray whose very
/// first sample is plotted hits the front face.
pub fn cast_rays<T: Real>(scene: &Scene<'_, T>, k_refine: u32, workers: usize) -> DepthMap<T> {
    let cam = scene.camera;
    let mut samples = vec![DepthSample::miss(); cam.width * cam.height];
    with_workers(workers, || {
        samples.par_chunks_mut(cam.width).enumerate().for_each(|(py, row)| {
            for (px, s) in row.iter_mut().enumerate() {
                *s = trace_ray(scene, px, py, k_refine);
            }
        });
    });
    DepthMap { width: cam.width, height: cam.height, pixel_size: cam.pixel_size(), samples }
}

fn slope<T: Real>(before: Option<T>, here: T, after: Option<T>, spacing: T) -> T {
    match (before, after) {
        (Some(b), Some(a)) => (a - b) / (spacing + spacing),
        (Some(b), None) => (here - b) / spacing,
        (None, Some(a)) => (a - here) / spacing,
        (None, None) => T::zero(),
    }
}

/// Surface normal at a hit pixel from the depth gradient, in camera
/// coordinates and facing the viewer.
///
/// Depth grows away from the viewer, so the visible surface is the graph
/// `w = -t(u, v)` and its normal is `(∂t/∂u, ∂t/∂v, 1)` normalized. Central
/// differences are used where both neighbours hit, one-sided differences
/// otherwise; a pixel without hit neighbours faces the viewer.
pub fn estimate_normal<T: Real>(depth: &DepthMap<T>, px: usize, py: usize) -> [T; 3] {
    let here = depth.get(px, py);
    if !here.hit {
        return [T::zero(), T::zero(), T::one()];
    }
    let (x, y) = (px as isize, py as isize);
    let (du, dv) = depth.pixel_size;
    let dt_du = slope(depth.depth_at(x - 1, y), here.depth, depth.depth_at(x + 1, y), du);
    // Screen up is decreasing row index.
    let dt_dv = slope(depth.depth_at(x, y + 1), here.depth, depth.depth_at(x, y - 1), dv);
    normalize([dt_du, dt_dv, T::one()])
}

/// Intensity in `[0, 1]` of a surface with unit normal `normal`.
pub fn shade<T: Real>(normal: [T; 3], lighting: &LightingParams<T>) -> T {
    let l = lighting.light_dir;
    let n_dot_l = dot(normal, l);
    let lambert = n_dot_l.max(T::zero());
    let value = match lighting.model {
        LightingModel::SimpleLambertian => lambert,
        LightingModel::Lambertian => lighting.ambient + lighting.diffuse * lambert,
        LightingModel::Phong => {
            let two = T::lit(2.0);
            let reflect =
                [two * n_dot_l * normal[0] - l[0], two * n_dot_l * normal[1] - l[1], two * n_dot_l * normal[2] - l[2]];
            // The viewer sits at +z.
            let r_dot_v = reflect[2].max(T::zero());
            lighting.ambient + lighting.diffuse * lambert + lighting.specular * r_dot_v.powf(lighting.shininess)
        }
    };
    value.max(T::zero()).min(T::one())
}

/// Pixel coloring.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Coloring {
    /// Shaded intensity replicated into all three channels.
    #[default]
    Grayscale,
    /// Hue chosen from the orbit step count, scaled by the shaded intensity.
    StepsPalette,
}

/// 8-bit RGB raster, row-major with the top row first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
}

impl Image {
    pub fn black(width: usize, height: usize) -> Self {
        Self { width, height, rgb: vec![0; 3 * width * height] }
    }

    pub fn pixel(&self, px: usize, py: usize) -> [u8; 3] {
        let i = 3 * (py * self.width + px);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    /// Count of pixels that are not pure black.
    pub fn lit_pixels(&self) -> usize {
        self.rgb.chunks_exact(3).filter(|p| p.iter().any(|&c| c != 0)).count()
    }

    /// Binary PPM: `P6\n<w> <h>\n255\n` followed by the RGB triples.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.rgb)
    }

    /// Copies `other` into this image with its top-left corner at `(x, y)`.
    pub fn blit(&mut self, other: &Image, x: usize, y: usize) {
        for row in 0..other.height.min(self.height.saturating_sub(y)) {
            let w = other.width.min(self.width.saturating_sub(x));
            let dst = 3 * ((y + row) * self.width + x);
            let src = 3 * row * other.width;
            self.rgb[dst..dst + 3 * w].copy_from_slice(&other.rgb[src..src + 3 * w]);
        }
    }
}

fn to_byte<T: Real>(x: T) -> u8 {
    let scaled = (x.max(T::zero()).min(T::one()) * T::lit(255.0)).round();
    scaled.to_u8().unwrap_or(255)
}

fn palette<T: Real>(steps: u32, intensity: T) -> [u8; 3] {
    // Six-sector hue wheel, 37 degrees per step.
    let hue = f64::from((steps.wrapping_mul(37)) % 360) / 60.0;
    let x = 1.0 - (hue % 2.0 - 1.0).abs();
    let (r, g, b) = match hue as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    [r, g, b].map(|c| to_byte(T::lit(c) * intensity))
}

/// Shades a depth map; pixels without a hit stay black.
pub fn shade_depth_map<T: Real>(depth: &DepthMap<T>, lighting: &LightingParams<T>, coloring: Coloring) -> Image {
    let mut img = Image::black(depth.width, depth.height);
    for py in 0..depth.height {
        for px in 0..depth.width {
            let s = depth.get(px, py);
            if !s.hit {
                continue;
            }
            let intensity = shade(estimate_normal(depth, px, py), lighting);
            let rgb = match coloring {
                Coloring::Grayscale => [to_byte(intensity); 3],
                Coloring::StepsPalette => palette(s.steps, intensity),
            };
            let i = 3 * (py * depth.width + px);
            img.rgb[i..i + 3].copy_from_slice(&rgb);
        }
    }
    img
}

/// Settings of [`render_image`] beyond the scene and lighting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    /// Bisection steps per hit.
    pub refine_steps: u32,
    pub workers: usize,
    pub coloring: Coloring,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { refine_steps: 20, workers: default_workers(), coloring: Coloring::Grayscale }
    }
}

/// Casts rays, estimates normals and shades.
pub fn render_image<T: Real>(scene: &Scene<'_, T>, lighting: &LightingParams<T>, opts: &RenderOptions) -> Image {
    let depth = cast_rays(scene, opts.refine_steps, opts.workers);
    shade_depth_map(&depth, lighting, opts.coloring)
}
