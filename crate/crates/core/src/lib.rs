//! Rendering of three-dimensional slices of quaternionic Julia sets.
//!
//! The pipeline scans a box of ℝ³, embeds each grid point as a quaternion,
//! iterates a rational map from it and classifies the orbit. Two classifiers
//! are provided: the classic escape-time test, which only works for filled-in
//! Julia sets, and the cut-off rate test, which marks slowly converging seeds
//! and therefore also handles sets that extend to infinity (Newton maps).
//!
//! Everything numeric is generic over [`Real`]; the aliases at the crate root
//! fix the scalar to `f64`, which is what the bisection refinement needs.

pub mod dynamics;
pub mod error;
pub mod field;
pub mod oracle2d;
pub mod parallel;
pub mod quat;
pub mod render;
pub mod scalar;

pub use dynamics::{classify, is_plotted, ClassifierParams, Method, OrbitOutcome, QPolynomial, QRationalMap};
pub use error::{Error, Result};
pub use field::{embed, refine_bisect, scan, ClassificationField, Component, Embedding, FieldStats, Region3};
pub use oracle2d::{classify2d, render_slice2d, Complex, ComplexRationalMap, SliceBitmap, Window2};
pub use quat::Quaternion;
pub use render::{
    cast_rays, estimate_normal, render_image, shade, Camera, Coloring, DepthMap, Image, LightingModel, LightingParams,
    RenderOptions, Scene, ViewAxis,
};
pub use scalar::Real;

/// Double-precision quaternion.
pub type Quat = Quaternion<f64>;
pub type Polynomial = QPolynomial<f64>;
pub type RationalMap = QRationalMap<f64>;
pub type Params = ClassifierParams<f64>;
pub type Outcome = OrbitOutcome<Quat>;
pub type Region = Region3<f64>;
pub type Field = ClassificationField<f64>;
pub type Complex64 = Complex<f64>;
