//! Complex-plane reference implementation of both classifiers.
//!
//! Nothing here calls into the quaternion arithmetic or the iteration loop of
//! [`crate::dynamics`]; the complex arithmetic, map evaluation and orbit loop
//! are written out separately so this module can serve as an independent
//! check of the complex slice `n = p = 0`.

use std::io::{self, Write};
use std::ops::{Add, Mul, Sub};

use crate::dynamics::{ClassifierParams, Method, OrbitOutcome, QRationalMap};
use crate::error::{Error, Result};
use crate::scalar::{grid_coord, Real};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Complex<T> {
    pub const fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn abs(self) -> T {
        self.re.hypot(self.im)
    }

    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// `self / d` by the textbook formula; `None` when `|d|²` is at or below
    /// the pole threshold.
    fn checked_div(self, d: Self) -> Option<Self> {
        let den = d.re * d.re + d.im * d.im;
        if den <= T::div_epsilon() {
            return None;
        }
        Some(Self::new((self.re * d.re + self.im * d.im) / den, (self.im * d.re - self.re * d.im) / den))
    }
}

impl<T: Real> Add for Complex<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl<T: Real> Sub for Complex<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl<T: Real> Mul for Complex<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

/// `N(z) / D(z)` with complex coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRationalMap<T> {
    pub numerator: Vec<Complex<T>>,
    pub denominator: Vec<Complex<T>>,
}

impl<T: Real> ComplexRationalMap<T> {
    pub fn new(numerator: Vec<Complex<T>>, denominator: Vec<Complex<T>>) -> Result<Self> {
        if numerator.is_empty() || denominator.is_empty() {
            return Err(Error::InvalidPolynomial("no coefficients"));
        }
        if denominator.iter().all(|c| c.re.is_zero() && c.im.is_zero()) {
            return Err(Error::InvalidPolynomial("zero denominator"));
        }
        Ok(Self { numerator, denominator })
    }

    /// Map with real coefficients.
    pub fn from_real(numerator: &[T], denominator: &[T]) -> Result<Self> {
        let lift = |c: &[T]| c.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::new(lift(numerator), lift(denominator))
    }

    /// `z² + c`.
    pub fn square_plus(c: Complex<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        Self::new(vec![c, zero, one], vec![one]).expect("valid")
    }

    /// The complex counterpart of a quaternion map whose coefficients all lie
    /// in the plane spanned by `1` and `i`.
    pub fn from_quaternion_map(map: &QRationalMap<T>) -> Result<Self> {
        let convert = |coeffs: &[crate::Quaternion<T>], offset: usize| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, q)| {
                    if q.n.is_zero() && q.p.is_zero() {
                        Ok(Complex::new(q.r, q.m))
                    } else {
                        Err(Error::NotComplex { index: offset + k })
                    }
                })
                .collect::<Result<Vec<_>>>()
        };
        let num = convert(map.numerator().coeffs(), 0)?;
        let den = convert(map.denominator().coeffs(), map.numerator().coeffs().len())?;
        Self::new(num, den)
    }

    fn poly(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// `None` at a pole.
    pub fn eval(&self, z: Complex<T>) -> Option<Complex<T>> {
        Self::poly(&self.numerator, z).checked_div(Self::poly(&self.denominator, z))
    }
}

/// Classifies the orbit of `seed` with the same rules as
/// [`crate::dynamics::classify`].
pub fn classify2d<T: Real>(
    map: &ComplexRationalMap<T>,
    seed: Complex<T>,
    params: &ClassifierParams<T>,
) -> OrbitOutcome<Complex<T>> {
    let mut z = seed;
    let mut escaped_at = 0u32;
    let mut n = 0u32;
    while n < params.max_iter {
        n += 1;
        let Some(w) = map.eval(z) else {
            return OrbitOutcome::PoleHit { steps: n };
        };
        if !w.is_finite() {
            let steps = if escaped_at > 0 { escaped_at } else { n };
            return OrbitOutcome::Escaped { steps };
        }
        if params.method == Method::CutoffRate && (w - z).abs() < params.radius {
            return OrbitOutcome::Converged { steps: n, last: w };
        }
        if params.method == Method::EscapeTime && escaped_at == 0 && w.abs() > params.radius {
            escaped_at = n;
        }
        z = w;
    }
    if params.method == Method::EscapeTime && z.abs() > params.radius {
        OrbitOutcome::Escaped { steps: escaped_at }
    } else {
        OrbitOutcome::Indeterminate { steps: params.max_iter, last: z }
    }
}

/// Smallest gap between a tested quantity and its threshold along the orbit
/// of `seed`: `|z_n|` against the bailout radius for escape time, successive
/// distances against the cut-off radius for cut-off rate.
///
/// Seeds with a small margin may legitimately be classified differently by
/// two implementations that differ only in rounding.
pub fn threshold_margin<T: Real>(map: &ComplexRationalMap<T>, seed: Complex<T>, params: &ClassifierParams<T>) -> T {
    let mut z = seed;
    let mut margin = T::infinity();
    for _ in 0..params.max_iter {
        let Some(w) = map.eval(z) else { break };
        if !w.is_finite() {
            break;
        }
        let tested = match params.method {
            Method::EscapeTime => w.abs(),
            Method::CutoffRate => (w - z).abs(),
        };
        margin = margin.min((tested - params.radius).abs());
        if params.method == Method::CutoffRate && tested < params.radius {
            break;
        }
        z = w;
    }
    margin
}

/// Axis-aligned rectangle of the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window2<T> {
    pub min: Complex<T>,
    pub max: Complex<T>,
}

impl<T: Real> Window2<T> {
    pub fn new(min: Complex<T>, max: Complex<T>) -> Result<Self> {
        if !(min.re < max.re && min.im < max.im) {
            return Err(Error::InvalidRegion("window min must be below max"));
        }
        Ok(Self { min, max })
    }

    /// Grid point `(ix, iy)` of a `width × height` corner-sampled grid.
    pub fn point(&self, width: usize, height: usize, ix: usize, iy: usize) -> Complex<T> {
        Complex::new(grid_coord(self.min.re, self.max.re, ix, width), grid_coord(self.min.im, self.max.im, iy, height))
    }
}

/// Plotted bits of a slice; row `iy` holds imaginary part `min.im + iy·Δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceBitmap {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl SliceBitmap {
    pub fn get(&self, ix: usize, iy: usize) -> bool {
        self.bits[iy * self.width + ix]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Binary PGM (P5): plotted pixels white, top row is the largest imaginary part.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        let mut row = vec![0u8; self.width];
        for iy in (0..self.height).rev() {
            for (ix, px) in row.iter_mut().enumerate() {
                *px = if self.get(ix, iy) { 255 } else { 0 };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }
}

/// Classifies every grid point of `window`.
pub fn render_slice2d<T: Real>(
    map: &ComplexRationalMap<T>,
    window: &Window2<T>,
    width: usize,
    height: usize,
    params: &ClassifierParams<T>,
) -> SliceBitmap {
    let mut bits = Vec::with_capacity(width * height);
    for iy in 0..height {
        for ix in 0..width {
            let z = window.point(width, height, ix, iy);
            bits.push(classify2d(map, z, params).is_plotted(params));
        }
    }
    SliceBitmap { width, height, bits }
}
