//! Iterated quaternion maps and the two orbit classifiers.
//!
//! A map is a quotient `P(h) · Q(h)⁻¹` of two polynomials whose coefficients
//! multiply powers of `h` from the left. Orbits are classified either by the
//! escape-time rule (is the iterate outside a ball after the iteration budget)
//! or by the cut-off rate rule (how many steps until successive iterates come
//! within `radius` of each other).

use crate::error::{Error, Result};
use crate::quat::Quaternion;
use crate::scalar::Real;

/// Polynomial `Σ c_k h^k` with left coefficients, stored in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct QPolynomial<T> {
    coeffs: Vec<Quaternion<T>>,
}

impl<T: Real> QPolynomial<T> {
    /// Fails on an empty list or a zero leading coefficient.
    pub fn new(coeffs: Vec<Quaternion<T>>) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::InvalidPolynomial("no coefficients")),
            Some(c) if c.norm_sq().is_zero() => Err(Error::InvalidPolynomial("leading coefficient is zero")),
            Some(_) => Ok(Self { coeffs }),
        }
    }

    /// Builds a polynomial from real coefficients, dropping trailing zeros.
    pub fn from_real(coeffs: &[T]) -> Result<Self> {
        let len = coeffs.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
        Self::new(coeffs[..len].iter().map(|&c| Quaternion::real(c)).collect())
    }

    pub fn constant(c: Quaternion<T>) -> Result<Self> {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Quaternion<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_real())
    }

    /// Evaluates the polynomial at `h`.
    ///
    /// Uses Horner's scheme with right multiplication by `h`; powers of `h`
    /// commute with each other, so this equals `Σ c_k · h^k`. Overflow shows up
    /// as a non-finite result.
    pub fn eval(&self, h: Quaternion<T>) -> Quaternion<T> {
        let mut it = self.coeffs.iter().rev();
        let mut acc = *it.next().expect("non-empty");
        for &c in it {
            acc = acc * h + c;
        }
        acc
    }
}

/// Rational map `h ↦ P(h) · Q(h)⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct QRationalMap<T> {
    numerator: QPolynomial<T>,
    denominator: QPolynomial<T>,
}

impl<T: Real> QRationalMap<T> {
    pub fn new(numerator: QPolynomial<T>, denominator: QPolynomial<T>) -> Self {
        Self { numerator, denominator }
    }

    /// A polynomial map, i.e. denominator `1`.
    pub fn polynomial(p: QPolynomial<T>) -> Self {
        Self::new(p, QPolynomial::constant(Quaternion::one()).expect("one is non-zero"))
    }

    /// The quadratic family `p h² + q`.
    pub fn quadratic(p: Quaternion<T>, q: Quaternion<T>) -> Result<Self> {
        Ok(Self::polynomial(QPolynomial::new(vec![q, Quaternion::zero(), p])?))
    }

    /// Newton's method for a real-coefficient polynomial `f`:
    /// `h - f(h) f'(h)⁻¹ = (h f'(h) - f(h)) / f'(h)`.
    ///
    /// Real coefficients commute with everything, so the classical algebra
    /// carries over. Coefficients with a non-zero `i`, `j` or `k` part are refused.
    pub fn newton(f: &QPolynomial<T>) -> Result<Self> {
        if let Some(index) = f.coeffs().iter().position(|c| !c.is_real()) {
            return Err(Error::NonRealCoefficients { index });
        }
        if f.degree() < 2 {
            return Err(Error::InvalidPolynomial("Newton transform needs degree >= 2"));
        }
        let a: Vec<T> = f.coeffs().iter().map(|c| c.r).collect();
        let deriv: Vec<T> = (1..a.len()).map(|k| T::from_count(k) * a[k]).collect();
        // h f'(h) - f(h) has coefficient (k - 1) a_k at degree k.
        let numer: Vec<T> = a.iter().enumerate().map(|(k, &ak)| (T::from_count(k) - T::one()) * ak).collect();
        Ok(Self::new(QPolynomial::from_real(&numer)?, QPolynomial::from_real(&deriv)?))
    }

    pub fn numerator(&self) -> &QPolynomial<T> {
        &self.numerator
    }

    pub fn denominator(&self) -> &QPolynomial<T> {
        &self.denominator
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.numerator.has_real_coeffs() && self.denominator.has_real_coeffs()
    }

    /// Iterates of `seed`, starting with `f(seed)`; ends after a pole.
    pub fn orbit(&self, seed: Quaternion<T>) -> Orbit<'_, T> {
        Orbit { map: self, current: Some(seed) }
    }

    /// `P(h) · Q(h)⁻¹`; a near-zero denominator is reported as
    /// [`Error::DivisionByNearZero`].
    pub fn eval(&self, h: Quaternion<T>) -> Result<Quaternion<T>> {
        let num = self.numerator.eval(h);
        let den = self.denominator.eval(h);
        Ok(num * den.inverse()?)
    }
}

/// Iterator over the orbit of a seed; see [`QRationalMap::orbit`].
#[derive(Clone, Debug)]
pub struct Orbit<'a, T> {
    map: &'a QRationalMap<T>,
    current: Option<Quaternion<T>>,
}

impl<T: Real> Iterator for Orbit<'_, T> {
    type Item = Result<Quaternion<T>>;

    fn next(&mut self) -> Option<Self::Item> {
        let h = self.current.take()?;
        let next = self.map.eval(h);
        if let Ok(v) = next {
            self.current = Some(v);
        }
        Some(next)
    }
}

/// Orbit classification rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Bounded-orbit test against a bailout ball of the given radius.
    EscapeTime,
    /// Step count until successive iterates are closer than the given radius.
    CutoffRate,
}

/// Parameters shared by both classifiers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifierParams<T> {
    pub method: Method,
    /// Bailout radius (escape time) or cut-off distance (cut-off rate).
    pub radius: T,
    pub max_iter: u32,
    /// Cut-off rate only: a converged orbit is plotted when it needed at
    /// least this many steps.
    pub cutoff_count: u32,
}

impl<T: Real> ClassifierParams<T> {
    pub fn new(method: Method, radius: T, max_iter: u32, cutoff_count: u32) -> Result<Self> {
        if !radius.is_finite() || radius <= T::zero() {
            return Err(Error::InvalidParams("radius must be positive and finite"));
        }
        if max_iter == 0 {
            return Err(Error::InvalidParams("maxIter must be at least 1"));
        }
        if cutoff_count == 0 || cutoff_count > max_iter {
            return Err(Error::InvalidParams("cutoffCount must lie in 1..=maxIter"));
        }
        Ok(Self { method, radius, max_iter, cutoff_count })
    }

    pub fn escape_time(radius: T, max_iter: u32) -> Result<Self> {
        Self::new(Method::EscapeTime, radius, max_iter, max_iter.max(1))
    }

    pub fn cutoff_rate(radius: T, max_iter: u32, cutoff_count: u32) -> Result<Self> {
        Self::new(Method::CutoffRate, radius, max_iter, cutoff_count)
    }
}

/// Fate of one seed. `P` is the iterated point type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrbitOutcome<P> {
    /// Left the bailout ball (first exit at `steps`) or overflowed at `steps`.
    Escaped { steps: u32 },
    /// `|p_steps - p_{steps-1}| < radius`.
    Converged { steps: u32, last: P },
    /// Neither escaped nor converged within `maxIter` steps.
    Indeterminate { steps: u32, last: P },
    /// The denominator vanished while computing iterate `steps`.
    PoleHit { steps: u32 },
}

impl<P> OrbitOutcome<P> {
    pub fn steps(&self) -> u32 {
        match *self {
            Self::Escaped { steps }
            | Self::Converged { steps, .. }
            | Self::Indeterminate { steps, .. }
            | Self::PoleHit { steps } => steps,
        }
    }

    /// Stable numeric tag: escaped 0, converged 1, indeterminate 2, pole 3.
    pub fn tag(&self) -> u8 {
        match self {
            Self::Escaped { .. } => 0,
            Self::Converged { .. } => 1,
            Self::Indeterminate { .. } => 2,
            Self::PoleHit { .. } => 3,
        }
    }

    pub fn tag_name(&self) -> &'static str {
        match self {
            Self::Escaped { .. } => "escaped",
            Self::Converged { .. } => "converged",
            Self::Indeterminate { .. } => "indeterminate",
            Self::PoleHit { .. } => "pole",
        }
    }

    /// Whether the seed belongs to the drawn set under `params`.
    pub fn is_plotted<T: Real>(&self, params: &ClassifierParams<T>) -> bool {
        match (params.method, self) {
            (_, Self::Indeterminate { .. }) => true,
            (Method::CutoffRate, Self::Converged { steps, .. }) => *steps >= params.cutoff_count,
            _ => false,
        }
    }
}

pub type QOutcome<T> = OrbitOutcome<Quaternion<T>>;

/// Free-function form of [`OrbitOutcome::is_plotted`].
pub fn is_plotted<P, T: Real>(outcome: &OrbitOutcome<P>, params: &ClassifierParams<T>) -> bool {
    outcome.is_plotted(params)
}

/// Iterates `map` from `seed` and classifies the orbit.
///
/// Escape time runs the full `maxIter` budget and tests the final iterate
/// against the bailout ball; an escaped orbit reports the step at which it
/// first left the ball. Cut-off rate stops at the first step whose distance
/// to the previous iterate is below `radius`. A non-finite iterate ends the
/// orbit as escaped under both rules.
pub fn classify<T: Real>(map: &QRationalMap<T>, seed: Quaternion<T>, params: &ClassifierParams<T>) -> QOutcome<T> {
    let mut prev = seed;
    let mut first_exit: Option<u32> = None;
    for step in 1..=params.max_iter {
        let next = match map.eval(prev) {
            Ok(v) => v,
            Err(_) => return OrbitOutcome::PoleHit { steps: step },
        };
        if !next.is_finite() {
            return OrbitOutcome::Escaped { steps: first_exit.unwrap_or(step) };
        }
        match params.method {
            Method::EscapeTime => {
                if first_exit.is_none() && next.norm() > params.radius {
                    first_exit = Some(step);
                }
            }
            Method::CutoffRate => {
                if next.distance(prev) < params.radius {
                    return OrbitOutcome::Converged { steps: step, last: next };
                }
            }
        }
        prev = next;
    }
    match params.method {
        Method::EscapeTime if prev.norm() > params.radius => {
            OrbitOutcome::Escaped { steps: first_exit.expect("final iterate is outside") }
        }
        _ => OrbitOutcome::Indeterminate { steps: params.max_iter, last: prev },
    }
}
