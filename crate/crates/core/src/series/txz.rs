use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::Zero;

use super::index::factorial;
use super::{power_table, Lambda, MultiIndex, SeriesError, SeriesTX, ZIndex, ZPowers};
use crate::num::{coeff_to_c64, fmt_coeff, from_big, Coeff};

/// Monomial key `t^k x^α z^ν`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TxzKey {
    pub k: u32,
    pub alpha: MultiIndex,
    pub nu: ZPowers,
}

impl TxzKey {
    pub fn new(k: u32, alpha: MultiIndex, nu: ZPowers) -> Self {
        TxzKey { k, alpha, nu }
    }
}

/// Accumulation order used by [`SeriesTXZ::substitute_z_with`]. Both orders
/// give the same exact result; the choice only exists so callers can check it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SubstOrder {
    #[default]
    Forward,
    Reverse,
}

/// Truncated power series in `(t, x, z)` with `z = {z_{i,α}}` indexed by Λ.
///
/// Caps: `t`-degree, total `x`-degree and total `z`-degree.
#[derive(Clone, PartialEq, Eq)]
pub struct SeriesTXZ {
    lambda: Lambda,
    cap_t: u32,
    cap_x: u32,
    cap_z: u32,
    terms: BTreeMap<TxzKey, Coeff>,
}

impl SeriesTXZ {
    pub fn zero(lambda: Lambda, cap_t: u32, cap_x: u32, cap_z: u32) -> Self {
        SeriesTXZ { lambda, cap_t, cap_x, cap_z, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(lambda: Lambda, cap_t: u32, cap_x: u32, cap_z: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (TxzKey, Coeff)>,
    {
        let mut map: BTreeMap<TxzKey, Coeff> = BTreeMap::new();
        for (key, c) in terms {
            assert_eq!(key.alpha.dim(), lambda.n(), "x multi-index has wrong dimension");
            assert_eq!(key.nu.len(), lambda.len(), "z exponent vector has wrong length");
            if key.k > cap_t || key.alpha.degree() > cap_x || key.nu.degree() > cap_z {
                continue;
            }
            let slot = map.entry(key).or_insert_with(Coeff::zero);
            *slot = &*slot + c;
        }
        map.retain(|_, c| !c.is_zero());
        SeriesTXZ { lambda, cap_t, cap_x, cap_z, terms: map }
    }

    /// The variable `z_{i,α}`.
    pub fn z(lambda: Lambda, cap_t: u32, cap_x: u32, cap_z: u32, index: &ZIndex) -> Self {
        let pos = lambda.position(index).expect("index must lie in Λ");
        let n = lambda.n();
        let key = TxzKey::new(0, MultiIndex::zero(n), ZPowers::unit(lambda.len(), pos));
        Self::from_terms(lambda, cap_t, cap_x, cap_z, [(key, crate::num::c_one())])
    }

    /// Embeds a `z`-free series.
    pub fn from_tx(lambda: Lambda, s: &SeriesTX, cap_z: u32) -> Self {
        let len = lambda.len();
        let terms = s.terms().map(|((k, a), c)| (TxzKey::new(*k, a.clone(), ZPowers::zero(len)), c.clone()));
        Self::from_terms(lambda, s.cap_t(), s.cap_x(), cap_z, terms)
    }

    pub fn lambda(&self) -> &Lambda {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.lambda.n()
    }

    pub fn m(&self) -> u32 {
        self.lambda.m()
    }

    pub fn caps(&self) -> (u32, u32, u32) {
        (self.cap_t, self.cap_x, self.cap_z)
    }

    pub fn cap_t(&self) -> u32 {
        self.cap_t
    }

    pub fn cap_x(&self) -> u32 {
        self.cap_x
    }

    pub fn cap_z(&self) -> u32 {
        self.cap_z
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TxzKey, &Coeff)> {
        self.terms.iter()
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

    pub fn coeff(&self, key: &TxzKey) -> Coeff {
        self.terms.get(key).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn truncate(&self, cap_t: u32, cap_x: u32, cap_z: u32) -> Self {
        let (ct, cx, cz) = (cap_t.min(self.cap_t), cap_x.min(self.cap_x), cap_z.min(self.cap_z));
        Self::from_terms(self.lambda.clone(), ct, cx, cz, self.terms.iter().map(|(k, c)| (k.clone(), c.clone())))
    }

    /// Coefficient of `z^ν` as a `(t, x)` series.
    pub fn nu_slice(&self, nu: &ZPowers) -> SeriesTX {
        let terms = self
            .terms
            .iter()
            .filter(|(key, _)| &key.nu == nu)
            .map(|(key, c)| ((key.k, key.alpha.clone()), c.clone()));
        SeriesTX::from_terms(self.n(), self.cap_t, self.cap_x, terms)
    }

    /// `F(t, x, 0)`.
    pub fn z_free_part(&self) -> SeriesTX {
        self.nu_slice(&ZPowers::zero(self.lambda.len()))
    }

    /// Groups terms by their `z`-exponent.
    pub fn group_by_nu(&self) -> BTreeMap<ZPowers, SeriesTX> {
        let mut groups: BTreeMap<ZPowers, Vec<((u32, MultiIndex), Coeff)>> = BTreeMap::new();
        for (key, c) in &self.terms {
            groups.entry(key.nu.clone()).or_default().push(((key.k, key.alpha.clone()), c.clone()));
        }
        groups
            .into_iter()
            .map(|(nu, ts)| (nu, SeriesTX::from_terms(self.n(), self.cap_t, self.cap_x, ts)))
            .collect()
    }

    fn compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.lambda != other.lambda {
            return Err(SeriesError::DimensionMismatch {
                left: (self.n(), self.m() as usize),
                right: (other.n(), other.m() as usize),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.compatible(other)?;
        let terms = self.terms.iter().chain(other.terms.iter()).map(|(k, c)| (k.clone(), c.clone()));
        Ok(Self::from_terms(
            self.lambda.clone(),
            self.cap_t.min(other.cap_t),
            self.cap_x.min(other.cap_x),
            self.cap_z.min(other.cap_z),
            terms,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.compatible(other)?;
        let cap_t = self.cap_t.min(other.cap_t);
        let cap_x = self.cap_x.min(other.cap_x);
        let cap_z = self.cap_z.min(other.cap_z);
        let mut acc: HashMap<TxzKey, Coeff> = HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let k = a.k + b.k;
                if k > cap_t
                    || a.alpha.degree() + b.alpha.degree() > cap_x
                    || a.nu.degree() + b.nu.degree() > cap_z
                {
                    continue;
                }
                let key = TxzKey::new(k, a.alpha.add(&b.alpha), a.nu.add(&b.nu));
                let slot = acc.entry(key).or_insert_with(Coeff::zero);
                *slot = &*slot + ca * cb;
            }
        }
        let mut terms: BTreeMap<TxzKey, Coeff> = acc.into_iter().collect();
        terms.retain(|_, c| !c.is_zero());
        Ok(SeriesTXZ { lambda: self.lambda.clone(), cap_t, cap_x, cap_z, terms })
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), c * s));
        Self::from_terms(self.lambda.clone(), self.cap_t, self.cap_x, self.cap_z, terms)
    }

    /// Multiplies by a `(t, x)` series.
    pub fn mul_tx(&self, s: &SeriesTX) -> Self {
        let lifted = Self::from_tx(self.lambda.clone(), s, self.cap_z);
        self * &lifted
    }

    /// Substitutes `z_{i,α} := vals[(i,α)]` and expands. Exact within the
    /// returned caps.
    pub fn substitute_z(&self, vals: &BTreeMap<ZIndex, SeriesTX>) -> Result<SeriesTX, SeriesError> {
        self.substitute_z_with(vals, SubstOrder::Forward)
    }

    pub fn substitute_z_with(
        &self,
        vals: &BTreeMap<ZIndex, SeriesTX>,
        order: SubstOrder,
    ) -> Result<SeriesTX, SeriesError> {
        let n = self.n();
        let len = self.lambda.len();
        let mut used = vec![false; len];
        for key in self.terms.keys() {
            for p in key.nu.support() {
                used[p] = true;
            }
        }
        let mut per_pos: Vec<Option<&SeriesTX>> = vec![None; len];
        let mut cap_t = self.cap_t;
        let mut cap_x = self.cap_x;
        let mut min_t_order: Option<u32> = None;
        let mut min_x_order: Option<u32> = None;
        for (p, &is_used) in used.iter().enumerate() {
            if !is_used {
                continue;
            }
            let zi = self.lambda.get(p);
            let v = vals.get(zi).ok_or_else(|| SeriesError::MissingZValue(zi.clone()))?;
            if v.dim() != n {
                return Err(SeriesError::DimensionMismatch { left: (n, 0), right: (v.dim(), 0) });
            }
            cap_t = cap_t.min(v.cap_t());
            cap_x = cap_x.min(v.cap_x());
            if let Some(o) = v.t_order() {
                min_t_order = Some(min_t_order.map_or(o, |m| m.min(o)));
            }
            if let Some(o) = v.x_order() {
                min_x_order = Some(min_x_order.map_or(o, |m| m.min(o)));
            }
            per_pos[p] = Some(v);
        }
        // Unknown z-monomials of degree > K_z may still contribute unless the
        // substituted values push them past the caps.
        match (min_t_order, min_x_order) {
            (None, _) => {}
            (Some(ot), _) if ot >= 1 => cap_t = cap_t.min((self.cap_z + 1) * ot - 1),
            (Some(_), Some(ox)) if ox >= 1 => cap_x = cap_x.min((self.cap_z + 1) * ox - 1),
            _ => return Err(SeriesError::UnboundedComposition),
        }

        let mut powers: HashMap<(usize, u32), SeriesTX> = HashMap::new();
        let mut groups: Vec<(ZPowers, SeriesTX)> = self.group_by_nu().into_iter().collect();
        if order == SubstOrder::Reverse {
            groups.reverse();
        }
        let mut acc = SeriesTX::zero(n, cap_t, cap_x);
        for (nu, coeff) in groups {
            let mut factors: Vec<(usize, u32)> = nu.support().map(|p| (p, nu.get(p))).collect();
            if order == SubstOrder::Reverse {
                factors.reverse();
            }
            let mut term = coeff.truncate(cap_t, cap_x);
            for (p, e) in factors {
                if term.is_zero() {
                    break;
                }
                let pw = powers.entry((p, e)).or_insert_with(|| {
                    per_pos[p].expect("value present for used index").truncate(cap_t, cap_x).pow(e)
                });
                term = &term * pw;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Shifts the `z` variables: `z_{i,α} ↦ z_{i,α} + shifts[(i,α)]`.
    ///
    /// The result keeps `z`-degree at most `cap_z_out`. When some shift is
    /// nonzero its `t`-order must be positive; unknown monomials of `z`-degree
    /// above `K_z` then only reach `t`-degree `(K_z + 1 − cap_z_out)·o_t` or
    /// more, which bounds the returned `t`-cap.
    pub fn translate_z(
        &self,
        shifts: &BTreeMap<ZIndex, SeriesTX>,
        cap_z_out: u32,
    ) -> Result<SeriesTXZ, SeriesError> {
        let len = self.lambda.len();
        let n = self.n();
        let cap_z_out = cap_z_out.min(self.cap_z);
        let mut cap_t = self.cap_t;
        let mut cap_x = self.cap_x;
        let mut per_pos: Vec<Option<&SeriesTX>> = vec![None; len];
        let mut min_t_order: Option<u32> = None;
        for (p, zi) in self.lambda.entries().iter().enumerate() {
            if let Some(v) = shifts.get(zi) {
                if v.dim() != n {
                    return Err(SeriesError::DimensionMismatch { left: (n, 0), right: (v.dim(), 0) });
                }
                if v.is_zero() {
                    continue;
                }
                cap_t = cap_t.min(v.cap_t());
                cap_x = cap_x.min(v.cap_x());
                let o = v.t_order().expect("nonzero");
                min_t_order = Some(min_t_order.map_or(o, |m| m.min(o)));
                per_pos[p] = Some(v);
            }
        }
        if let Some(ot) = min_t_order {
            if ot == 0 {
                return Err(SeriesError::UnboundedComposition);
            }
            cap_t = cap_t.min((self.cap_z + 1 - cap_z_out) * ot - 1);
        }

        let mut powers: HashMap<(usize, u32), SeriesTX> = HashMap::new();
        let mut acc: BTreeMap<TxzKey, Coeff> = BTreeMap::new();
        for (key, c) in &self.terms {
            if key.k > cap_t || key.alpha.degree() > cap_x {
                continue;
            }
            let base = SeriesTX::monomial(n, cap_t, cap_x, key.k, key.alpha.clone(), c.clone());
            // Enumerate μ ≤ ν with |μ| ≤ cap_z_out.
            let support: Vec<usize> = key.nu.support().collect();
            let mut mu = vec![0u32; len];
            expand_binomial(
                &support,
                0,
                &key.nu,
                &mut mu,
                cap_z_out,
                &mut |mu: &[u32]| {
                    let mut term = base.clone();
                    let mut binom = BigInt::from(1);
                    for &p in &support {
                        let e_total = key.nu.get(p);
                        let e_z = mu[p];
                        binom *= binomial(e_total, e_z);
                        let rest = e_total - e_z;
                        if rest > 0 {
                            match per_pos[p] {
                                Some(v) => {
                                    let pw = powers
                                        .entry((p, rest))
                                        .or_insert_with(|| v.truncate(cap_t, cap_x).pow(rest));
                                    term = &term * pw;
                                }
                                None => return,
                            }
                        }
                    }
                    let scale = from_big(&binom);
                    let nu_out = ZPowers::from_vec(mu.to_vec());
                    for ((k, a), cc) in term.terms() {
                        let slot = acc.entry(TxzKey::new(*k, a.clone(), nu_out.clone())).or_insert_with(Coeff::zero);
                        *slot = &*slot + cc * &scale;
                    }
                },
            );
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(SeriesTXZ { lambda: self.lambda.clone(), cap_t, cap_x, cap_z: cap_z_out, terms: acc })
    }

    /// Linear change of the `z` variables: `z_p ↦ Σ_q c_{p,q} z_q`, given
    /// per Λ position as a list of `(q, c)`. Homogeneous in `z`, so the caps
    /// are unchanged.
    pub fn substitute_z_linear(&self, images: &[Vec<(usize, Coeff)>]) -> SeriesTXZ {
        let len = self.lambda.len();
        assert_eq!(images.len(), len);
        let lin: Vec<SeriesTXZ> = images
            .iter()
            .map(|img| {
                let terms = img
                    .iter()
                    .map(|(q, c)| (TxzKey::new(0, MultiIndex::zero(self.n()), ZPowers::unit(len, *q)), c.clone()));
                Self::from_terms(self.lambda.clone(), self.cap_t, self.cap_x, self.cap_z, terms)
            })
            .collect();
        let mut powers: HashMap<(usize, u32), SeriesTXZ> = HashMap::new();
        let mut acc = Self::zero(self.lambda.clone(), self.cap_t, self.cap_x, self.cap_z);
        for (key, c) in &self.terms {
            let mono = TxzKey::new(key.k, key.alpha.clone(), ZPowers::zero(len));
            let mut term = Self::from_terms(self.lambda.clone(), self.cap_t, self.cap_x, self.cap_z, [(mono, c.clone())]);
            for p in key.nu.support() {
                let e = key.nu.get(p);
                let pw = powers.entry((p, e)).or_insert_with(|| {
                    let mut r = lin[p].clone();
                    for _ in 1..e {
                        r = &r * &lin[p];
                    }
                    r
                });
                term = &term * pw;
            }
            acc = &acc + &term;
        }
        acc
    }

    pub fn eval_numeric(&self, t: Complex<f64>, x: &[Complex<f64>], z: &[Complex<f64>]) -> Complex<f64> {
        assert_eq!(x.len(), self.n());
        assert_eq!(z.len(), self.lambda.len());
        let max_t = self.terms.keys().map(|k| k.k).max().unwrap_or(0);
        let max_x = self.terms.keys().flat_map(|k| k.alpha.as_slice().iter().copied()).max().unwrap_or(0);
        let max_z = self.terms.keys().flat_map(|k| k.nu.as_slice().iter().copied()).max().unwrap_or(0);
        let tp = power_table(t, max_t);
        let xp: Vec<_> = x.iter().map(|&v| power_table(v, max_x)).collect();
        let zp: Vec<_> = z.iter().map(|&v| power_table(v, max_z)).collect();
        let mut acc = Complex::new(0.0, 0.0);
        for (key, c) in &self.terms {
            let mut m = tp[key.k as usize];
            for (axis, &e) in key.alpha.as_slice().iter().enumerate() {
                m *= xp[axis][e as usize];
            }
            for (p, &e) in key.nu.as_slice().iter().enumerate() {
                m *= zp[p][e as usize];
            }
            acc += coeff_to_c64(c) * m;
        }
        acc
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn expand_binomial(
    support: &[usize],
    idx: usize,
    nu: &ZPowers,
    mu: &mut Vec<u32>,
    budget: u32,
    visit: &mut dyn FnMut(&[u32]),
) {
    if idx == support.len() {
        visit(mu);
        return;
    }
    let p = support[idx];
    for e in 0..=nu.get(p).min(budget) {
        mu[p] = e;
        expand_binomial(support, idx + 1, nu, mu, budget - e, visit);
    }
    mu[p] = 0;
}

impl<'a> Add<&'a SeriesTXZ> for &'a SeriesTXZ {
    type Output = SeriesTXZ;
    fn add(self, rhs: &'a SeriesTXZ) -> SeriesTXZ {
        self.checked_add(rhs).expect("series index sets must agree")
    }
}

impl<'a> Sub<&'a SeriesTXZ> for &'a SeriesTXZ {
    type Output = SeriesTXZ;
    fn sub(self, rhs: &'a SeriesTXZ) -> SeriesTXZ {
        self.checked_sub(rhs).expect("series index sets must agree")
    }
}

impl<'a> Mul<&'a SeriesTXZ> for &'a SeriesTXZ {
    type Output = SeriesTXZ;
    fn mul(self, rhs: &'a SeriesTXZ) -> SeriesTXZ {
        self.checked_mul(rhs).expect("series index sets must agree")
    }
}

impl Neg for &SeriesTXZ {
    type Output = SeriesTXZ;
    fn neg(self) -> SeriesTXZ {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect();
        SeriesTXZ { lambda: self.lambda.clone(), cap_t: self.cap_t, cap_x: self.cap_x, cap_z: self.cap_z, terms }
    }
}

impl fmt::Display for SeriesTXZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_coeff(c))?;
            if key.k > 0 {
                write!(f, "·t^{}", key.k)?;
            }
            for (axis, &e) in key.alpha.as_slice().iter().enumerate() {
                if e > 0 {
                    write!(f, "·x{}^{}", axis + 1, e)?;
                }
            }
            for p in key.nu.support() {
                write!(f, "·z{}^{}", self.lambda.get(p), key.nu.get(p))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SeriesTXZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(t^{}, |x|^{}, |z|^{})", self, self.cap_t + 1, self.cap_x + 1, self.cap_z + 1)
    }
}
