//! The ρ-norm calculus: `‖f(t)‖_ρ = Σ_α |f_α(t)| (α!/|α|!) ρ^{|α|}`, the
//! coefficientwise order `≪`, and the integral transform
//! `g ↦ ∫₀ᵗ (τ/t)^a g(τ) dτ/τ` that builds the φ family.
//!
//! Everything here has nonnegative exact rational coefficients. The modulus
//! of a `t`-dependent coefficient is replaced by the coefficientwise majorant
//! `Σ_k |f_{k,α}| t^k`, which dominates it for `t > 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::num::{modulus_upper, rational_to_f64};
use crate::series::{factorial as index_factorial, Lambda, SeriesTX, SeriesTXZ, ZPowers};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MajorantError {
    #[error("integral transform needs a positive exponent, got {0}")]
    NonpositiveExponent(BigRational),
}

/// Polynomial in ρ with nonnegative rational coefficients; index = power.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RhoPolynomial(Vec<BigRational>);

impl RhoPolynomial {
    pub fn zero() -> Self {
        RhoPolynomial(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        assert!(coeffs.iter().all(|c| !c.is_negative()), "ρ-coefficients must be nonnegative");
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RhoPolynomial(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn coeff(&self, j: usize) -> BigRational {
        self.0.get(j).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        Self::from_coeffs((0..len).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::from_coeffs(self.0.iter().map(|c| c * s).collect())
    }

    pub fn d_rho(&self) -> Self {
        Self::from_coeffs(self.0.iter().enumerate().skip(1).map(|(j, c)| c * BigInt::from(j)).collect())
    }

    /// `self ≪ other`
    pub fn dominated_by(&self, other: &Self) -> bool {
        (0..self.0.len()).all(|j| self.0[j] <= other.coeff(j))
    }

    pub fn eval(&self, rho: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * rho + rational_to_f64(c))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational_to_f64).collect()
    }
}

/// `Σ_k p_k(ρ) t^k` with nonnegative ρ-polynomials.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SectorMajorant {
    terms: BTreeMap<u32, RhoPolynomial>,
}

impl SectorMajorant {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, RhoPolynomial)>>(terms: I) -> Self {
        let mut map: BTreeMap<u32, RhoPolynomial> = BTreeMap::new();
        for (k, p) in terms {
            let slot = map.entry(k).or_default();
            *slot = slot.add(&p);
        }
        map.retain(|_, p| !p.is_zero());
        SectorMajorant { terms: map }
    }

    /// Single term `c t^k ρ^j`.
    pub fn monomial(k: u32, j: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); j + 1];
        coeffs[j] = c;
        Self::from_terms([(k, RhoPolynomial::from_coeffs(coeffs))])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &RhoPolynomial)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `t^k ρ^j`.
    pub fn coeff(&self, k: u32, j: usize) -> BigRational {
        self.terms.get(&k).map(|p| p.coeff(j)).unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).map(|(k, p)| (*k, p.clone())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for (k1, p1) in &self.terms {
            for (k2, p2) in &other.terms {
                out.push((k1 + k2, p1.mul(p2)));
            }
        }
        Self::from_terms(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, p)| (*k, p.scale(s))))
    }

    pub fn d_rho(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, p)| (*k, p.d_rho())))
    }

    /// `t ∂/∂t`, termwise `k`.
    pub fn euler_t(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, p)| (*k, p.scale(&BigRational::from_integer(BigInt::from(*k))))))
    }

    /// `∫₀ᵗ (τ/t)^a g(τ, ρ) dτ/τ`, termwise `t^k ↦ t^k / (k + a)`.
    pub fn integral_transform(&self, a: &BigRational) -> Result<Self, MajorantError> {
        if !a.is_positive() {
            return Err(MajorantError::NonpositiveExponent(a.clone()));
        }
        Ok(Self::from_terms(self.terms.iter().map(|(k, p)| {
            let denom = BigRational::from_integer(BigInt::from(*k)) + a;
            (*k, p.scale(&(BigRational::from_integer(BigInt::from(1)) / denom)))
        })))
    }

    /// `self ≪ other`, coefficient by coefficient.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.terms.iter().all(|(k, p)| match other.terms.get(k) {
            Some(q) => p.dominated_by(q),
            None => p.is_zero(),
        })
    }

    pub fn eval(&self, t: f64, rho: f64) -> f64 {
        self.terms.iter().map(|(k, p)| t.powi(*k as i32) * p.eval(rho)).sum()
    }

    pub fn to_eval(&self) -> MajorantEval {
        MajorantEval { terms: self.terms.iter().map(|(k, p)| (*k as i32, p.to_f64())).collect() }
    }
}

/// Floating copy of a [`SectorMajorant`] for grid work.
#[derive(Clone, Debug, Default)]
pub struct MajorantEval {
    terms: Vec<(i32, Vec<f64>)>,
}

impl MajorantEval {
    pub fn eval(&self, t: f64, rho: f64) -> f64 {
        self.terms.iter().map(|(k, c)| t.powi(*k) * horner(c, rho)).sum()
    }

    /// `t ∂/∂t` of the majorant, evaluated.
    pub fn eval_euler(&self, t: f64, rho: f64) -> f64 {
        self.terms.iter().map(|(k, c)| f64::from(*k) * t.powi(*k) * horner(c, rho)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn horner(c: &[f64], rho: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * rho + v)
}

/// `α!/|α|!`
fn multinomial_weight(alpha: &crate::series::MultiIndex) -> BigRational {
    BigRational::new(alpha.factorial(), index_factorial(alpha.degree()))
}

/// `‖f(t)‖_ρ` with the coefficientwise modulus in `t`.
pub fn norm_x(f: &SeriesTX) -> SectorMajorant {
    let mut per_k: BTreeMap<u32, Vec<BigRational>> = BTreeMap::new();
    for ((k, alpha), c) in f.terms() {
        let deg = alpha.degree() as usize;
        let v = per_k.entry(*k).or_default();
        if v.len() <= deg {
            v.resize(deg + 1, BigRational::zero());
        }
        v[deg] += modulus_upper(c) * multinomial_weight(alpha);
    }
    SectorMajorant::from_terms(per_k.into_iter().map(|(k, v)| (k, RhoPolynomial::from_coeffs(v))))
}

/// `‖f‖_ρ(t, z) = Σ ‖f_{i,ν}‖_ρ t^i z^ν`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormProfileZ {
    lambda: Lambda,
    terms: BTreeMap<(u32, ZPowers), RhoPolynomial>,
}

impl NormProfileZ {
    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, ZPowers), &RhoPolynomial)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: u32, nu: &ZPowers) -> RhoPolynomial {
        self.terms.get(&(k, nu.clone())).cloned().unwrap_or_default()
    }

    pub fn to_eval(&self) -> NormProfileEval {
        NormProfileEval {
            terms: self
                .terms
                .iter()
                .map(|((k, nu), p)| (*k as i32, nu.as_slice().to_vec(), p.to_f64()))
                .collect(),
        }
    }
}

/// Floating copy of a [`NormProfileZ`].
#[derive(Clone, Debug, Default)]
pub struct NormProfileEval {
    terms: Vec<(i32, Vec<u32>, Vec<f64>)>,
}

impl NormProfileEval {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at `(t, ρ, z)` with `z ≥ 0`.
    pub fn eval(&self, t: f64, rho: f64, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, nu, c)| t.powi(*k) * horner(c, rho) * zpow(nu, z))
            .sum()
    }

    /// Total ρ-derivative of `ρ ↦ ‖f‖_ρ(t, z(ρ))`, given `z` and `dz/dρ`.
    pub fn eval_d_rho_total(&self, t: f64, rho: f64, z: &[f64], dz: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, nu, c) in &self.terms {
            let tk = t.powi(*k);
            let p = horner(c, rho);
            let dp: f64 = c.iter().enumerate().skip(1).rev().fold(0.0, |a, (j, v)| a * rho + j as f64 * v);
            let zn = zpow(nu, z);
            // ∂ρ z^ν = Σ_p ν_p z^{ν−e_p} ∂ρ z_p
            let mut dzn = 0.0;
            for (p, &e) in nu.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut term = f64::from(e) * dz[p];
                for (q, &eq) in nu.iter().enumerate() {
                    let ee = if q == p { e - 1 } else { eq };
                    term *= z[q].powi(ee as i32);
                }
                dzn += term;
            }
            acc += tk * (dp * zn + p * dzn);
        }
        acc
    }
}

fn zpow(nu: &[u32], z: &[f64]) -> f64 {
    nu.iter().zip(z).map(|(&e, &v)| if e == 0 { 1.0 } else { v.powi(e as i32) }).product()
}

/// Applies [`norm_x`] to every `(t^k, z^ν)` slice.
pub fn norm_xz(f: &SeriesTXZ) -> NormProfileZ {
    let mut acc: BTreeMap<(u32, ZPowers), Vec<BigRational>> = BTreeMap::new();
    for (key, c) in f.terms() {
        let deg = key.alpha.degree() as usize;
        let v = acc.entry((key.k, key.nu.clone())).or_default();
        if v.len() <= deg {
            v.resize(deg + 1, BigRational::zero());
        }
        v[deg] += modulus_upper(c) * multinomial_weight(&key.alpha);
    }
    NormProfileZ {
        lambda: f.lambda().clone(),
        terms: acc
            .into_iter()
            .map(|(k, v)| (k, RhoPolynomial::from_coeffs(v)))
            .filter(|(_, p)| !p.is_zero())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{c_int, c_real, int, rat};
    use crate::series::{MultiIndex, SeriesTXZ, ZIndex};

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_x(&SeriesTX::one(1, 2, 2)), SectorMajorant::monomial(0, 0, int(1)));
        let x1x2 = SeriesTX::monomial(2, 2, 4, 0, mi(&[1, 1]), c_int(1));
        assert_eq!(norm_x(&x1x2), SectorMajorant::monomial(0, 2, rat(1, 2)));
        let f = &SeriesTX::monomial(2, 2, 4, 0, mi(&[2, 0]), c_int(2)) + &SeriesTX::x(2, 2, 4, 1);
        let expected = SectorMajorant::monomial(0, 1, int(1)).add(&SectorMajorant::monomial(0, 2, int(2)));
        assert_eq!(norm_x(&f), expected);
        // complex modulus
        let g = SeriesTX::constant(1, 2, 2, crate::num::c_rat(int(3), int(-4)));
        assert_eq!(norm_x(&g), SectorMajorant::monomial(0, 0, int(5)));
    }

    #[test]
    fn norm_xz_examples() {
        let lam = crate::series::Lambda::new(2, 1);
        let z00 = ZIndex::new(0, mi(&[0]));
        let z10 = ZIndex::new(1, mi(&[0]));
        let p00 = lam.position(&z00).unwrap();
        let p10 = lam.position(&z10).unwrap();
        let f = SeriesTXZ::z(lam.clone(), 4, 4, 4, &z00);
        let nf = norm_xz(&f);
        assert_eq!(nf.coeff(0, &ZPowers::unit(lam.len(), p00)), RhoPolynomial::constant(int(1)));
        let g = SeriesTXZ::z(lam.clone(), 4, 4, 4, &z10)
            .mul_tx(&SeriesTX::monomial(1, 4, 4, 1, mi(&[1]), c_real(-1, 1)));
        let ng = norm_xz(&g);
        assert_eq!(ng.terms().count(), 1);
        assert_eq!(ng.coeff(1, &ZPowers::unit(lam.len(), p10)), RhoPolynomial::from_coeffs(vec![int(0), int(1)]));
        assert!(norm_xz(&SeriesTXZ::zero(lam, 4, 4, 4)).is_zero());
    }

    #[test]
    fn integral_transform_examples() {
        assert!(SectorMajorant::zero().integral_transform(&int(1)).unwrap().is_zero());
        let g = SectorMajorant::monomial(2, 1, int(1));
        assert_eq!(g.integral_transform(&int(1)).unwrap(), SectorMajorant::monomial(2, 1, rat(1, 3)));
        // ∫₀ᵗ (τ/t)² 2τ dτ/τ = 2t/3
        let g = SectorMajorant::monomial(1, 2, int(2));
        assert_eq!(g.integral_transform(&int(2)).unwrap(), SectorMajorant::monomial(1, 2, rat(2, 3)));
        assert!(matches!(g.integral_transform(&int(0)), Err(MajorantError::NonpositiveExponent(_))));
        assert!(g.integral_transform(&rat(-1, 2)).is_err());
    }

    #[test]
    fn d_rho_and_eval_examples() {
        let g = SectorMajorant::monomial(1, 2, int(1));
        assert_eq!(g.d_rho(), SectorMajorant::monomial(1, 1, int(2)));
        assert!(SectorMajorant::monomial(0, 0, int(7)).d_rho().is_zero());
        assert_eq!(SectorMajorant::monomial(1, 2, rat(1, 2)).d_rho(), SectorMajorant::monomial(1, 1, int(1)));

        assert_eq!(g.eval(1.0, 2.0), 4.0);
        assert_eq!(SectorMajorant::zero().eval(0.3, 0.4), 0.0);
        let h = SectorMajorant::monomial(2, 1, rat(1, 3));
        assert!((h.eval(0.3, 0.5) - 0.015).abs() < 1e-15);
        assert!((h.to_eval().eval(0.3, 0.5) - 0.015).abs() < 1e-15);
    }

    #[test]
    fn dominance_is_coefficientwise() {
        let a = SectorMajorant::monomial(1, 1, int(1));
        let b = a.add(&SectorMajorant::monomial(2, 0, int(1)));
        assert!(a.dominated_by(&b));
        assert!(!b.dominated_by(&a));
        assert!(SectorMajorant::zero().dominated_by(&a));
    }

    #[test]
    fn total_rho_derivative() {
        // ‖f‖ = ρ z₀², z₀(ρ) = ρ² ⇒ d/dρ (ρ·ρ⁴) = 5ρ⁴
        let lam = crate::series::Lambda::new(1, 1);
        let mut nu = vec![0; lam.len()];
        nu[0] = 2;
        let prof = NormProfileEval { terms: vec![(0, nu, vec![0.0, 1.0])] };
        let rho: f64 = 0.7;
        let z = vec![rho * rho, 0.0];
        let dz = vec![2.0 * rho, 0.0];
        let v = prof.eval_d_rho_total(0.5, rho, &z, &dz);
        assert!((v - 5.0 * rho.powi(4)).abs() < 1e-14);
    }
}
