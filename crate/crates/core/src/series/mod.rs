//! Truncated multivariate power series over exact complex rationals.
//!
//! A [`SeriesTX`] is a polynomial in `t` and `x = (x₁,…,xₙ)` together with two
//! independent caps: the largest `t`-degree and the largest total `x`-degree
//! whose coefficients are known. Every operation returns the caps it can
//! actually guarantee, so a coefficient inside the caps is always exact.

mod index;
mod txz;

pub use index::{factorial, Lambda, MultiIndex, ZIndex, ZPowers};
pub use txz::{SeriesTXZ, SubstOrder, TxzKey};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::num::{c_int, c_one, coeff_to_c64, fmt_coeff, Coeff};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("no value supplied for z{0}")]
    MissingZValue(ZIndex),
    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,
    #[error("series depends on t; expected a function of x only")]
    NotTimeFree,
    #[error("composition does not terminate within the truncation: substituted values have a nonzero constant term")]
    UnboundedComposition,
    #[error("axis {axis} out of range for dimension {n}")]
    AxisOutOfRange { axis: usize, n: usize },
    #[error("x-truncation exhausted: cannot differentiate a series known only to x-degree {0}")]
    XTruncationExhausted(u32),
}

/// Monomial key `t^k x^α`.
pub type TxKey = (u32, MultiIndex);

/// Truncated power series in `(t, x)`.
///
/// Canonical: no stored zero coefficient, no stored key outside the caps.
#[derive(Clone, PartialEq, Eq)]
pub struct SeriesTX {
    n: usize,
    cap_t: u32,
    cap_x: u32,
    terms: BTreeMap<TxKey, Coeff>,
}

impl SeriesTX {
    pub fn zero(n: usize, cap_t: u32, cap_x: u32) -> Self {
        SeriesTX { n, cap_t, cap_x, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, cap_t: u32, cap_x: u32, c: Coeff) -> Self {
        Self::monomial(n, cap_t, cap_x, 0, MultiIndex::zero(n), c)
    }

    pub fn one(n: usize, cap_t: u32, cap_x: u32) -> Self {
        Self::constant(n, cap_t, cap_x, c_one())
    }

    pub fn monomial(n: usize, cap_t: u32, cap_x: u32, k: u32, alpha: MultiIndex, c: Coeff) -> Self {
        Self::from_terms(n, cap_t, cap_x, [((k, alpha), c)])
    }

    /// `t`
    pub fn t(n: usize, cap_t: u32, cap_x: u32) -> Self {
        Self::monomial(n, cap_t, cap_x, 1, MultiIndex::zero(n), c_one())
    }

    /// `x_axis` (zero-based axis)
    pub fn x(n: usize, cap_t: u32, cap_x: u32, axis: usize) -> Self {
        Self::monomial(n, cap_t, cap_x, 0, MultiIndex::unit(n, axis), c_one())
    }

    /// Builds a series from `(key, coefficient)` pairs. Repeated keys are
    /// summed; keys outside the caps and zero sums are dropped.
    pub fn from_terms<I>(n: usize, cap_t: u32, cap_x: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (TxKey, Coeff)>,
    {
        let mut map: BTreeMap<TxKey, Coeff> = BTreeMap::new();
        for ((k, alpha), c) in terms {
            assert_eq!(alpha.dim(), n, "multi-index dimension does not match series dimension");
            if k > cap_t || alpha.degree() > cap_x {
                continue;
            }
            let slot = map.entry((k, alpha)).or_insert_with(Coeff::zero);
            *slot = &*slot + c;
        }
        map.retain(|_, c| !c.is_zero());
        SeriesTX { n, cap_t, cap_x, terms: map }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cap_t(&self) -> u32 {
        self.cap_t
    }

    pub fn cap_x(&self) -> u32 {
        self.cap_x
    }

    pub fn caps(&self) -> (u32, u32) {
        (self.cap_t, self.cap_x)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded order of `(k, α)`.
    pub fn terms(&self) -> impl Iterator<Item = (&TxKey, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: u32, alpha: &MultiIndex) -> Coeff {
        self.terms.get(&(k, alpha.clone())).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Lowest `t`-degree carrying a nonzero coefficient.
    pub fn t_order(&self) -> Option<u32> {
        self.terms.keys().map(|(k, _)| *k).min()
    }

    /// Lowest total `x`-degree carrying a nonzero coefficient.
    pub fn x_order(&self) -> Option<u32> {
        self.terms.keys().map(|(_, a)| a.degree()).min()
    }

    pub fn max_t_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(k, _)| *k).max()
    }

    pub fn is_time_free(&self) -> bool {
        self.terms.keys().all(|(k, _)| *k == 0)
    }

    /// Lowers the caps (never raises them) and drops terms outside.
    pub fn truncate(&self, cap_t: u32, cap_x: u32) -> Self {
        let cap_t = cap_t.min(self.cap_t);
        let cap_x = cap_x.min(self.cap_x);
        let terms = self
            .terms
            .iter()
            .filter(|((k, a), _)| *k <= cap_t && a.degree() <= cap_x)
            .map(|(key, c)| (key.clone(), c.clone()))
            .collect();
        SeriesTX { n: self.n, cap_t, cap_x, terms }
    }

    /// Replaces the caps without touching the terms. The caller vouches that
    /// the new caps are valid; terms outside them are dropped.
    pub fn with_caps(&self, cap_t: u32, cap_x: u32) -> Self {
        Self::from_terms(self.n, cap_t, cap_x, self.terms.iter().map(|(k, c)| (k.clone(), c.clone())))
    }

    /// The coefficient of `t^k` as a `t`-free series.
    pub fn t_slice(&self, k: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|((kk, _), _)| *kk == k)
            .map(|((_, a), c)| ((0, a.clone()), c.clone()));
        Self::from_terms(self.n, self.cap_t, self.cap_x, terms)
    }

    /// Multiplies by `t^shift`.
    pub fn shift_t(&self, shift: u32) -> Self {
        let terms = self.terms.iter().map(|((k, a), c)| ((k + shift, a.clone()), c.clone()));
        Self::from_terms(self.n, self.cap_t, self.cap_x, terms)
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        if s.is_zero() {
            return Self::zero(self.n, self.cap_t, self.cap_x);
        }
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect();
        SeriesTX { n: self.n, cap_t: self.cap_t, cap_x: self.cap_x, terms }
    }

    fn check_dims(&self, other: &Self) -> Result<(), SeriesError> {
        if self.n != other.n {
            return Err(SeriesError::DimensionMismatch { left: (self.n, 0), right: (other.n, 0) });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_dims(other)?;
        let cap_t = self.cap_t.min(other.cap_t);
        let cap_x = self.cap_x.min(other.cap_x);
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(k, c)| (k.clone(), c.clone()));
        Ok(Self::from_terms(self.n, cap_t, cap_x, terms))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.checked_add(&other.neg_ref())
    }

    /// Cauchy product truncated to the joined caps.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_dims(other)?;
        let cap_t = self.cap_t.min(other.cap_t);
        let cap_x = self.cap_x.min(other.cap_x);
        let mut acc: HashMap<TxKey, Coeff> = HashMap::new();
        for ((k1, a1), c1) in &self.terms {
            if *k1 > cap_t || a1.degree() > cap_x {
                continue;
            }
            for ((k2, a2), c2) in &other.terms {
                let k = k1 + k2;
                if k > cap_t || a1.degree() + a2.degree() > cap_x {
                    continue;
                }
                let slot = acc.entry((k, a1.add(a2))).or_insert_with(Coeff::zero);
                *slot = &*slot + c1 * c2;
            }
        }
        let mut terms: BTreeMap<TxKey, Coeff> = acc.into_iter().collect();
        terms.retain(|_, c| !c.is_zero());
        Ok(SeriesTX { n: self.n, cap_t, cap_x, terms })
    }

    fn neg_ref(&self) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect();
        SeriesTX { n: self.n, cap_t: self.cap_t, cap_x: self.cap_x, terms }
    }

    /// `self^p` with truncation applied at every step.
    pub fn pow(&self, p: u32) -> Self {
        let mut acc = Self::one(self.n, self.cap_t, self.cap_x);
        for _ in 0..p {
            acc = &acc * self;
        }
        acc
    }

    /// ∂/∂x_axis (zero-based). The x-cap drops by one: a coefficient of
    /// degree `K_x` in the result would need degree `K_x + 1` of the input.
    pub fn dx(&self, axis: usize) -> Result<Self, SeriesError> {
        if axis >= self.n {
            return Err(SeriesError::AxisOutOfRange { axis, n: self.n });
        }
        if self.cap_x == 0 {
            return Err(SeriesError::XTruncationExhausted(self.cap_x));
        }
        let terms = self.terms.iter().filter_map(|((k, a), c)| {
            let e = a.get(axis);
            if e == 0 {
                return None;
            }
            let lowered = a.decrement(axis);
            Some(((*k, lowered), c * c_int(i64::from(e))))
        });
        Ok(Self::from_terms(self.n, self.cap_t, self.cap_x - 1, terms))
    }

    /// (∂/∂x)^α.
    pub fn dx_multi(&self, alpha: &MultiIndex) -> Result<Self, SeriesError> {
        let mut out = self.clone();
        for (axis, &e) in alpha.as_slice().iter().enumerate() {
            for _ in 0..e {
                out = out.dx(axis)?;
            }
        }
        Ok(out)
    }

    /// Euler operator `t ∂/∂t`: `t^k x^α ↦ k t^k x^α`. Caps unchanged.
    pub fn euler_t(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|((k, _), _)| *k > 0)
            .map(|((k, a), c)| ((*k, a.clone()), c * c_int(i64::from(*k))))
            .collect();
        SeriesTX { n: self.n, cap_t: self.cap_t, cap_x: self.cap_x, terms }
    }

    /// `(t∂t − λ)` applied to `self`.
    pub fn euler_shift(&self, lambda: &Coeff) -> Self {
        let terms = self.terms.iter().map(|((k, a), c)| {
            let factor = c_int(i64::from(*k)) - lambda;
            ((*k, a.clone()), c * factor)
        });
        Self::from_terms(self.n, self.cap_t, self.cap_x, terms)
    }

    /// Multiplicative inverse of a `t`-free series with nonzero constant
    /// term, exact through x-degree `K_x`.
    pub fn invert_unit(&self) -> Result<Self, SeriesError> {
        if !self.is_time_free() {
            return Err(SeriesError::NotTimeFree);
        }
        let zero_idx = MultiIndex::zero(self.n);
        let p0 = self.coeff(0, &zero_idx);
        if p0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let inv0 = c_one() / &p0;
        // p = p0 (1 - e)  ⇒  1/p = (1/p0) Σ_{i ≤ K_x} e^i  (e has no constant term)
        let e = SeriesTX::from_terms(
            self.n,
            self.cap_t,
            self.cap_x,
            self.terms
                .iter()
                .filter(|((_, a), _)| a.degree() > 0)
                .map(|(k, c)| (k.clone(), -(c * &inv0))),
        );
        let mut sum = Self::one(self.n, self.cap_t, self.cap_x);
        let mut power = sum.clone();
        for _ in 0..self.cap_x {
            power = &power * &e;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum.scale(&inv0))
    }

    /// Floating evaluation. Terms are summed in the canonical key order, so
    /// the result is deterministic.
    pub fn eval_numeric(&self, t: Complex<f64>, x: &[Complex<f64>]) -> Complex<f64> {
        assert_eq!(x.len(), self.n, "point dimension does not match series dimension");
        let t_pows = power_table(t, self.max_t_degree().unwrap_or(0));
        let max_x = self.terms.keys().flat_map(|(_, a)| a.as_slice().iter().copied()).max().unwrap_or(0);
        let x_pows: Vec<Vec<Complex<f64>>> = x.iter().map(|&xi| power_table(xi, max_x)).collect();
        let mut acc = Complex::new(0.0, 0.0);
        for ((k, a), c) in &self.terms {
            let mut m = t_pows[*k as usize];
            for (axis, &e) in a.as_slice().iter().enumerate() {
                m *= x_pows[axis][e as usize];
            }
            acc += coeff_to_c64(c) * m;
        }
        acc
    }
}

pub(crate) fn power_table(base: Complex<f64>, max: u32) -> Vec<Complex<f64>> {
    let mut v = Vec::with_capacity(max as usize + 1);
    let mut acc = Complex::new(1.0, 0.0);
    v.push(acc);
    for _ in 0..max {
        acc *= base;
        v.push(acc);
    }
    v
}

impl<'a> Add<&'a SeriesTX> for &'a SeriesTX {
    type Output = SeriesTX;
    fn add(self, rhs: &'a SeriesTX) -> SeriesTX {
        self.checked_add(rhs).expect("series dimensions must agree")
    }
}

impl<'a> Sub<&'a SeriesTX> for &'a SeriesTX {
    type Output = SeriesTX;
    fn sub(self, rhs: &'a SeriesTX) -> SeriesTX {
        self.checked_sub(rhs).expect("series dimensions must agree")
    }
}

impl<'a> Mul<&'a SeriesTX> for &'a SeriesTX {
    type Output = SeriesTX;
    fn mul(self, rhs: &'a SeriesTX) -> SeriesTX {
        self.checked_mul(rhs).expect("series dimensions must agree")
    }
}

impl Neg for &SeriesTX {
    type Output = SeriesTX;
    fn neg(self) -> SeriesTX {
        self.neg_ref()
    }
}

impl fmt::Debug for SeriesTX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(t^{}, |x|^{})", self, self.cap_t + 1, self.cap_x + 1)
    }
}

impl fmt::Display for SeriesTX {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((k, a), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_coeff(c))?;
            if *k > 0 {
                write!(f, "·t^{}", k)?;
            }
            for (axis, &e) in a.as_slice().iter().enumerate() {
                if e > 0 {
                    write!(f, "·x{}^{}", axis + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

/// True when the series is `1` up to its caps.
pub fn is_one(s: &SeriesTX) -> bool {
    s.len() == 1 && s.coeff(0, &MultiIndex::zero(s.dim())).is_one()
}
