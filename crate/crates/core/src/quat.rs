//! Hamilton quaternions `r + m i + n j + p k` with `i² = j² = k² = ijk = -1`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A quaternion with components on the basis `1, i, j, k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion<T> {
    pub r: T,
    pub m: T,
    pub n: T,
    pub p: T,
}

impl<T: Real> Quaternion<T> {
    #[inline]
    pub const fn new(r: T, m: T, n: T, p: T) -> Self {
        Self { r, m, n, p }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::real(T::one())
    }

    /// Embeds a real number.
    #[inline]
    pub fn real(x: T) -> Self {
        Self::new(x, T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    #[inline]
    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    #[inline]
    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Components in `[r, m, n, p]` order.
    #[inline]
    pub fn to_array(self) -> [T; 4] {
        [self.r, self.m, self.n, self.p]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.r, -self.m, -self.n, -self.p)
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.r * self.r + self.m * self.m + self.n * self.n + self.p * self.p
    }

    /// Euclidean norm, rescaled when `|q|²` would overflow or underflow.
    #[inline]
    pub fn norm(self) -> T {
        let ns = self.norm_sq();
        if ns.is_normal() && ns.is_finite() {
            return ns.sqrt();
        }
        let big = self.r.abs().max(self.m.abs()).max(self.n.abs()).max(self.p.abs());
        if big.is_zero() || !big.is_finite() {
            return big;
        }
        self.scale(big.recip()).norm_sq().sqrt() * big
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.r * s, self.m * s, self.n * s, self.p * s)
    }

    /// `conj(q) / |q|²`.
    ///
    /// Fails with [`Error::DivisionByNearZero`] when `|q|²` is at or below
    /// [`Real::div_epsilon`], which is how iteration detects a pole.
    #[inline]
    pub fn inverse(self) -> Result<Self> {
        let ns = self.norm_sq();
        if ns <= T::div_epsilon() {
            return Err(Error::DivisionByNearZero);
        }
        Ok(self.conj().scale(ns.recip()))
    }

    /// `k`-fold Hamilton product of `self` with itself; `q⁰ = 1`.
    pub fn powi(self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }

    /// Euclidean distance `|self - other|` in ℝ⁴.
    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.r.is_finite() && self.m.is_finite() && self.n.is_finite() && self.p.is_finite()
    }

    /// True when the `i`, `j` and `k` parts are all exactly zero.
    #[inline]
    pub fn is_real(self) -> bool {
        self.m.is_zero() && self.n.is_zero() && self.p.is_zero()
    }
}

impl<T: Real> From<[T; 4]> for Quaternion<T> {
    fn from(c: [T; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl<T: Real> From<Quaternion<T>> for [T; 4] {
    fn from(q: Quaternion<T>) -> Self {
        q.to_array()
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.r + o.r, self.m + o.m, self.n + o.n, self.p + o.p)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.r - o.r, self.m - o.m, self.n - o.n, self.p - o.p)
    }
}

impl<T: Real> AddAssign for Quaternion<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Quaternion<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.r, -self.m, -self.n, -self.p)
    }
}

/// Hamilton product.
impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.r, self.m, self.n, self.p);
        let (a2, b2, c2, d2) = (o.r, o.m, o.n, o.p);
        Self::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl<T: Real> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.r, self.m, self.n, self.p)
    }
}
