//! JSON job configuration.
//!
//! Quaternions are `[r, m, n, p]` arrays and polynomials are coefficient
//! arrays in ascending degree. Every field except `map` and `method` has a
//! default; [`parse_config`] fills them in, so a parsed config always
//! serializes back to a complete document. The schema lives in
//! `configs/schema.json`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use qjulia::oracle2d::Window2;
use qjulia::render::{Camera, Coloring, LightingModel, LightingParams, ViewAxis};
use qjulia::{ClassifierParams, Complex, Component, Embedding, Method, QPolynomial, QRationalMap, Quaternion, Region3};

pub type Quat4 = [f64; 4];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid value for \"{key}\": {message}")]
    Invalid { key: String, message: String },
}

impl ConfigError {
    fn invalid(key: &str, message: impl ToString) -> Self {
        Self::Invalid { key: key.to_owned(), message: message.to_string() }
    }

    /// The offending key for validation errors.
    pub fn key(&self) -> Option<&str> {
        match self {
            Self::Invalid { key, .. } => Some(key),
            Self::Json(_) => None,
        }
    }
}

/// The iterated map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    /// `p h² + q`.
    Quadratic {
        p: Quat4,
        q: Quat4,
    },
    Rational {
        numerator: Vec<Quat4>,
        denominator: Vec<Quat4>,
    },
    /// Newton's method for a real polynomial.
    Newton {
        polynomial: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodSpec {
    Escape,
    Cutoff,
}

impl From<MethodSpec> for Method {
    fn from(m: MethodSpec) -> Self {
        match m {
            MethodSpec::Escape => Method::EscapeTime,
            MethodSpec::Cutoff => Method::CutoffRate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RegionSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub resolution: [usize; 3],
}

impl Default for RegionSpec {
    fn default() -> Self {
        Self { min: [-2.0; 3], max: [2.0; 3], resolution: [65; 3] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EmbeddingSpec {
    /// Components receiving x, y, z: any three distinct of `"r"`, `"m"`, `"n"`, `"p"`.
    pub axes: [String; 3],
    pub fixed: f64,
}

impl Default for EmbeddingSpec {
    fn default() -> Self {
        Self { axes: ["r".into(), "m".into(), "n".into()], fixed: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CameraSpec {
    /// Ray direction: `"+x"`, `"-x"`, `"+y"`, `"-y"`, `"+z"` or `"-z"`.
    pub view_axis: String,
    pub width: usize,
    pub height: usize,
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self { view_axis: "+z".into(), width: 128, height: 128 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LightingModelSpec {
    SimpleLambertian,
    Lambertian,
    Phong,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LightingSpec {
    pub model: LightingModelSpec,
    /// Direction toward the light in camera space; normalized on use.
    pub light_dir: [f64; 3],
    pub ambient: f64,
    pub diffuse: f64,
    pub specular: f64,
    pub shininess: f64,
}

impl Default for LightingSpec {
    fn default() -> Self {
        Self {
            model: LightingModelSpec::Phong,
            light_dir: [-1.0, 1.0, 2.0],
            ambient: 0.1,
            diffuse: 0.7,
            specular: 0.3,
            shininess: 20.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColoringSpec {
    #[default]
    Grayscale,
    Steps,
}

/// Complex-plane window for the `slice` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SliceSpec {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub resolution: [usize; 2],
}

/// Parameter grid for the `sweep` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SweepSpec {
    pub radii: Vec<f64>,
    pub iteration_counts: Vec<u32>,
    pub output_dir: PathBuf,
}

/// A validated job description with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RenderConfig {
    pub map: MapSpec,
    pub method: MethodSpec,
    pub radius: f64,
    pub max_iter: u32,
    pub cutoff_count: u32,
    pub region: RegionSpec,
    pub embedding: EmbeddingSpec,
    pub camera: CameraSpec,
    pub lighting: LightingSpec,
    pub coloring: ColoringSpec,
    pub refine: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub output: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_dump: Option<PathBuf>,
    pub slice: SliceSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawConfig {
    map: MapSpec,
    method: MethodSpec,
    radius: Option<f64>,
    max_iter: Option<u32>,
    cutoff_count: Option<u32>,
    region: Option<RegionSpec>,
    embedding: Option<EmbeddingSpec>,
    camera: Option<CameraSpec>,
    lighting: Option<LightingSpec>,
    coloring: Option<ColoringSpec>,
    refine: Option<u32>,
    workers: Option<usize>,
    output: Option<PathBuf>,
    field_dump: Option<PathBuf>,
    slice: Option<SliceSpec>,
    sweep: Option<RawSweep>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawSweep {
    radii: Vec<f64>,
    iteration_counts: Vec<u32>,
    output_dir: Option<PathBuf>,
}

pub const DEFAULT_CUTOFF_RADIUS: f64 = 1e-3;
pub const DEFAULT_ESCAPE_RADIUS: f64 = 4.0;
pub const DEFAULT_MAX_ITER: u32 = 50;
pub const DEFAULT_REFINE: u32 = 20;

/// Parses and validates a JSON config, applying defaults.
pub fn parse_config(text: &str) -> Result<RenderConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text)?;
    let radius = raw.radius.unwrap_or(match raw.method {
        MethodSpec::Cutoff => DEFAULT_CUTOFF_RADIUS,
        MethodSpec::Escape => DEFAULT_ESCAPE_RADIUS,
    });
    let max_iter = raw.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let region = raw.region.unwrap_or_default();
    let camera = raw.camera.unwrap_or_default();
    let slice = raw.slice.unwrap_or_else(|| SliceSpec {
        min: [region.min[0], region.min[1]],
        max: [region.max[0], region.max[1]],
        resolution: [camera.width, camera.height],
    });
    let sweep = raw.sweep.map(|s| SweepSpec {
        radii: s.radii,
        iteration_counts: s.iteration_counts,
        output_dir: s.output_dir.unwrap_or_else(|| PathBuf::from("sweep")),
    });
    let config = RenderConfig {
        map: raw.map,
        method: raw.method,
        radius,
        max_iter,
        cutoff_count: raw.cutoff_count.unwrap_or((max_iter / 2).max(1)),
        region,
        embedding: raw.embedding.unwrap_or_default(),
        camera,
        lighting: raw.lighting.unwrap_or_default(),
        coloring: raw.coloring.unwrap_or_default(),
        refine: raw.refine.unwrap_or(DEFAULT_REFINE),
        workers: raw.workers,
        output: raw.output.unwrap_or_else(|| PathBuf::from("out.ppm")),
        field_dump: raw.field_dump,
        slice,
        sweep,
    };
    config.validate()?;
    Ok(config)
}

/// Pretty-printed JSON of a config; parses back to an equal config.
pub fn serialize_config(config: &RenderConfig) -> String {
    serde_json::to_string_pretty(config).expect("config is always serializable")
}

fn component(name: &str) -> Option<Component> {
    Component::ALL.into_iter().find(|c| c.name() == name)
}

fn quat(c: &Quat4) -> Quaternion<f64> {
    Quaternion::from(*c)
}

impl RenderConfig {
    /// Checks every field; errors name the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.build_map()?;
        self.params()?;
        self.region()?;
        self.embedding()?;
        self.camera()?;
        self.lighting()?;
        if self.workers == Some(0) {
            return Err(ConfigError::invalid("workers", "must be at least 1"));
        }
        self.window()?;
        if let Some(sweep) = &self.sweep {
            self.validate_sweep(sweep)?;
        }
        Ok(())
    }

    fn validate_sweep(&self, sweep: &SweepSpec) -> Result<(), ConfigError> {
        if sweep.radii.is_empty() {
            return Err(ConfigError::invalid("sweep.radii", "must not be empty"));
        }
        if sweep.iteration_counts.is_empty() {
            return Err(ConfigError::invalid("sweep.iterationCounts", "must not be empty"));
        }
        if let Some(r) = sweep.radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(ConfigError::invalid("sweep.radii", format!("{r} is not a positive radius")));
        }
        if sweep.iteration_counts.contains(&0) {
            return Err(ConfigError::invalid("sweep.iterationCounts", "counts must be at least 1"));
        }
        Ok(())
    }

    pub fn build_map(&self) -> Result<QRationalMap<f64>, ConfigError> {
        let poly = |key: &str, coeffs: &[Quat4]| {
            QPolynomial::new(coeffs.iter().map(quat).collect()).map_err(|e| ConfigError::invalid(key, e))
        };
        match &self.map {
            MapSpec::Quadratic { p, q } => {
                QRationalMap::quadratic(quat(p), quat(q)).map_err(|e| ConfigError::invalid("map.p", e))
            }
            MapSpec::Rational { numerator, denominator } => {
                Ok(QRationalMap::new(poly("map.numerator", numerator)?, poly("map.denominator", denominator)?))
            }
            MapSpec::Newton { polynomial } => {
                let f = QPolynomial::from_real(polynomial).map_err(|e| ConfigError::invalid("map.polynomial", e))?;
                QRationalMap::newton(&f).map_err(|e| ConfigError::invalid("map.polynomial", e))
            }
        }
    }

    pub fn params(&self) -> Result<ClassifierParams<f64>, ConfigError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(ConfigError::invalid("radius", "must be a positive number"));
        }
        if self.max_iter == 0 {
            return Err(ConfigError::invalid("maxIter", "must be at least 1"));
        }
        if self.cutoff_count == 0 || self.cutoff_count > self.max_iter {
            return Err(ConfigError::invalid("cutoffCount", "must lie in 1..=maxIter"));
        }
        ClassifierParams::new(self.method.into(), self.radius, self.max_iter, self.cutoff_count)
            .map_err(|e| ConfigError::invalid("radius", e))
    }

    pub fn region(&self) -> Result<Region3<f64>, ConfigError> {
        let r = &self.region;
        if r.resolution.iter().any(|&n| n < 2) {
            return Err(ConfigError::invalid("region.resolution", "every axis needs at least 2 samples"));
        }
        Region3::new(r.min, r.max, r.resolution).map_err(|e| ConfigError::invalid("region.min", e))
    }

    pub fn embedding(&self) -> Result<Embedding<f64>, ConfigError> {
        let mut axes = [Component::R; 3];
        for (slot, name) in axes.iter_mut().zip(&self.embedding.axes) {
            *slot = component(name)
                .ok_or_else(|| ConfigError::invalid("embedding.axes", format!("unknown component {name:?}")))?;
        }
        Embedding::new(axes, self.embedding.fixed).map_err(|e| ConfigError::invalid("embedding.axes", e))
    }

    pub fn camera(&self) -> Result<Camera<f64>, ConfigError> {
        let axis = ViewAxis::parse(&self.camera.view_axis).ok_or_else(|| {
            ConfigError::invalid(
                "camera.viewAxis",
                format!("{:?} is not one of +x -x +y -y +z -z", self.camera.view_axis),
            )
        })?;
        if self.camera.width == 0 {
            return Err(ConfigError::invalid("camera.width", "must be at least 1"));
        }
        if self.camera.height == 0 {
            return Err(ConfigError::invalid("camera.height", "must be at least 1"));
        }
        Camera::new(axis, self.camera.width, self.camera.height, self.region()?)
            .map_err(|e| ConfigError::invalid("camera", e))
    }

    pub fn lighting(&self) -> Result<LightingParams<f64>, ConfigError> {
        let l = &self.lighting;
        let len = l.light_dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(len.is_finite() && len > 0.0) {
            return Err(ConfigError::invalid("lighting.lightDir", "must be a non-zero finite vector"));
        }
        for (key, v) in
            [("lighting.ambient", l.ambient), ("lighting.diffuse", l.diffuse), ("lighting.specular", l.specular)]
        {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::invalid(key, "must lie in [0, 1]"));
            }
        }
        if !(l.shininess.is_finite() && l.shininess >= 1.0) {
            return Err(ConfigError::invalid("lighting.shininess", "must be at least 1"));
        }
        let model = match l.model {
            LightingModelSpec::SimpleLambertian => LightingModel::SimpleLambertian,
            LightingModelSpec::Lambertian => LightingModel::Lambertian,
            LightingModelSpec::Phong => LightingModel::Phong,
        };
        let dir = l.light_dir.map(|c| c / len);
        LightingParams::new(model, dir, l.ambient, l.diffuse, l.specular, l.shininess)
            .map_err(|e| ConfigError::invalid("lighting", e))
    }

    pub fn coloring(&self) -> Coloring {
        match self.coloring {
            ColoringSpec::Grayscale => Coloring::Grayscale,
            ColoringSpec::Steps => Coloring::StepsPalette,
        }
    }

    pub fn window(&self) -> Result<Window2<f64>, ConfigError> {
        let s = &self.slice;
        if s.resolution.contains(&0) {
            return Err(ConfigError::invalid("slice.resolution", "must be at least 1x1"));
        }
        Window2::new(Complex::new(s.min[0], s.min[1]), Complex::new(s.max[0], s.max[1]))
            .map_err(|e| ConfigError::invalid("slice.min", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c =
            parse_config(r#"{"map": {"kind": "newton", "polynomial": [-1, 0, 0, 1]}, "method": "cutoff"}"#).unwrap();
        assert_eq!(c.region, RegionSpec { min: [-2.0; 3], max: [2.0; 3], resolution: [65; 3] });
        assert_eq!(c.radius, 1e-3);
        assert_eq!(c.max_iter, 50);
        assert_eq!(c.cutoff_count, 25);
        assert_eq!(c.refine, 20);
        assert_eq!(c.embedding, EmbeddingSpec::default());
        assert_eq!(c.slice.resolution, [128, 128]);
        assert!(c.sweep.is_none());
        let map = c.build_map().unwrap();
        assert_eq!(map.denominator().coeffs().len(), 3);
    }

    #[test]
    fn escape_default_radius() {
        let c = parse_config(r#"{"map": {"kind": "quadratic", "p": [1,0,0,0], "q": [-1,0,0,0]}, "method": "escape"}"#)
            .unwrap();
        assert_eq!(c.radius, DEFAULT_ESCAPE_RADIUS);
    }

    #[test]
    fn negative_radius_names_the_key() {
        let err = parse_config(
            r#"{"map": {"kind": "newton", "polynomial": [-1, 0, 0, 1]}, "method": "cutoff", "radius": -1}"#,
        )
        .unwrap_err();
        assert_eq!(err.key(), Some("radius"));
        assert!(err.to_string().contains("\"radius\""));
    }

    #[test]
    fn validation_errors_name_keys() {
        let base = r#""map": {"kind": "newton", "polynomial": [-1, 0, 0, 1]}, "method": "cutoff""#;
        let cases = [
            (r#""cutoffCount": 60"#, "cutoffCount"),
            (r#""maxIter": 0"#, "maxIter"),
            (r#""region": {"min": [2,-2,-2], "max": [-2,2,2], "resolution": [9,9,9]}"#, "region.min"),
            (r#""region": {"min": [-2,-2,-2], "max": [2,2,2], "resolution": [9,1,9]}"#, "region.resolution"),
            (r#""embedding": {"axes": ["r","r","n"], "fixed": 0}"#, "embedding.axes"),
            (r#""embedding": {"axes": ["r","q","n"], "fixed": 0}"#, "embedding.axes"),
            (r#""camera": {"viewAxis": "z", "width": 8, "height": 8}"#, "camera.viewAxis"),
            (r#""camera": {"viewAxis": "+z", "width": 0, "height": 8}"#, "camera.width"),
            (r#""workers": 0"#, "workers"),
            (r#""sweep": {"radii": [], "iterationCounts": [5]}"#, "sweep.radii"),
            (r#""sweep": {"radii": [1.0], "iterationCounts": []}"#, "sweep.iterationCounts"),
        ];
        for (extra, key) in cases {
            let err = parse_config(&format!("{{{base}, {extra}}}")).unwrap_err();
            assert_eq!(err.key(), Some(key), "{extra}");
        }
        let err =
            parse_config(r#"{"map": {"kind": "newton", "polynomial": [1, 0, 0]}, "method": "cutoff"}"#).unwrap_err();
        assert_eq!(err.key(), Some("map.polynomial"));
    }

    #[test]
    fn malformed_json_is_reported() {
        assert!(matches!(parse_config("{"), Err(ConfigError::Json(_))));
        let err =
            parse_config(r#"{"map": {"kind": "newton", "polynomial": [-1,0,0,1]}, "method": "cutoff", "bogus": 1}"#)
                .unwrap_err();
        assert!(err.to_string().contains("bogus"));
        assert!(parse_config(r#"{"map": {"kind": "spiral"}, "method": "cutoff"}"#).is_err());
        assert!(parse_config(r#"{"map": {"kind": "newton", "polynomial": [-1,0,0,1]}}"#).is_err());
    }

    #[test]
    fn quadratic_round_trip() {
        let c = parse_config(r#"{"map": {"kind": "quadratic", "p": [1,0,0,0], "q": [-1,0,0,0]}, "method": "escape"}"#)
            .unwrap();
        let again = parse_config(&serialize_config(&c)).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.map, MapSpec::Quadratic { p: [1.0, 0.0, 0.0, 0.0], q: [-1.0, 0.0, 0.0, 0.0] });
    }
}
