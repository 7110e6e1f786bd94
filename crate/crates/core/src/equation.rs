//! Equation ingestion: the assumptions on `F`, the linear part
//! `β*ᵢ(x) = ∂F/∂z_{i,0}(0,x,0)`, characteristic exponents at `x = 0`, and
//! which of the existence/uniqueness statements apply.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::num::{c_zero, coeff_to_c64, complex_sqrt_exact, fmt_coeff, int, rational_to_f64, Coeff};
use crate::series::{Lambda, MultiIndex, SeriesTX, SeriesTXZ, TxzKey, ZIndex, ZPowers};

/// One broken assumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `F(0,x,0)` has the nonzero coefficient `coeff` at `x^alpha`.
    A2 { alpha: MultiIndex, coeff: Coeff },
    /// `∂F/∂z_{i,α}(0,x,0)` with `|α| > 0` has a nonzero `x^alpha` term.
    A3 { var: ZIndex, alpha: MultiIndex, coeff: Coeff },
    /// `z_{i,α}` with `(i,α) ∉ Λ` for the declared `(m, n)`.
    IndexOutOfLambda { i: u32, alpha: Vec<u32> },
    /// Malformed shape: wrong vector lengths, `m = 0`, zero denominators.
    Shape(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::A2 { alpha, coeff } => {
                write!(f, "A2: F(0,x,0) has coefficient {} at x^{:?}", fmt_coeff(coeff), alpha)
            }
            Violation::A3 { var, alpha, coeff } => write!(
                f,
                "A3: t-free linear term {}·x^{:?}·z{} with |alpha| > 0",
                fmt_coeff(coeff),
                alpha,
                var
            ),
            Violation::IndexOutOfLambda { i, alpha } => write!(f, "z index ({i}, {alpha:?}) is outside Lambda"),
            Violation::Shape(msg) => write!(f, "malformed equation: {msg}"),
        }
    }
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::A2 { .. } => "A2Violation",
            Violation::A3 { .. } => "A3Violation",
            Violation::IndexOutOfLambda { .. } => "IndexOutOfLambda",
            Violation::Shape(_) => "Shape",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("equation violates its assumptions: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidEquation(pub Vec<Violation>);

/// A monomial `c·t^k·x^α·Π z_{i,β}^p` in raw form, as read from input files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTerm {
    pub coeff: Coeff,
    pub t_pow: u32,
    pub x_pows: Vec<u32>,
    /// `(i, β, power)`
    pub z_pows: Vec<(u32, Vec<u32>, u32)>,
}

/// Validated `(t∂t)^m u = F(t, x, {(t∂t)^i ∂x^α u})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuchsianEquation {
    f: SeriesTXZ,
}

impl FuchsianEquation {
    /// Checks A₂, A₃ and that `F` lives over `Λ(m, n)`.
    pub fn validate(f: SeriesTXZ, m: u32, n: usize) -> Result<Self, InvalidEquation> {
        if m == 0 {
            return Err(InvalidEquation(vec![Violation::Shape("order m must be at least 1".into())]));
        }
        if f.lambda() != &Lambda::new(m, n) {
            return Err(InvalidEquation(vec![Violation::Shape(format!(
                "series is over Lambda(m={}, n={}), expected Lambda(m={m}, n={n})",
                f.m(),
                f.n()
            ))]));
        }
        let mut violations = Vec::new();
        let lambda = f.lambda();
        for (key, c) in f.terms() {
            if key.k != 0 {
                continue;
            }
            match key.nu.degree() {
                0 => violations.push(Violation::A2 { alpha: key.alpha.clone(), coeff: c.clone() }),
                1 => {
                    let p = key.nu.support().next().expect("degree one");
                    let var = lambda.get(p);
                    if var.alpha.degree() > 0 {
                        violations.push(Violation::A3 { var: var.clone(), alpha: key.alpha.clone(), coeff: c.clone() });
                    }
                }
                _ => {}
            }
        }
        if violations.is_empty() {
            Ok(FuchsianEquation { f })
        } else {
            Err(InvalidEquation(violations))
        }
    }

    /// Assembles `F` from raw terms, then validates.
    pub fn from_raw(m: u32, n: usize, caps: (u32, u32, u32), terms: &[RawTerm]) -> Result<Self, InvalidEquation> {
        if m == 0 {
            return Err(InvalidEquation(vec![Violation::Shape("order m must be at least 1".into())]));
        }
        let lambda = Lambda::new(m, n);
        let mut violations = Vec::new();
        let mut keys = Vec::new();
        for (idx, term) in terms.iter().enumerate() {
            if term.x_pows.len() != n {
                violations.push(Violation::Shape(format!("term {idx}: x_pows has length {}, expected {n}", term.x_pows.len())));
                continue;
            }
            let mut nu = vec![0u32; lambda.len()];
            let mut ok = true;
            for (i, beta, p) in &term.z_pows {
                if beta.len() != n {
                    violations.push(Violation::Shape(format!("term {idx}: z alpha has length {}, expected {n}", beta.len())));
                    ok = false;
                    continue;
                }
                let zi = ZIndex::new(*i, MultiIndex::new(beta.clone()));
                match lambda.position(&zi) {
                    Some(pos) => nu[pos] += p,
                    None => {
                        violations.push(Violation::IndexOutOfLambda { i: *i, alpha: beta.clone() });
                        ok = false;
                    }
                }
            }
            if ok {
                keys.push((
                    TxzKey::new(term.t_pow, MultiIndex::new(term.x_pows.clone()), ZPowers::from_vec(nu)),
                    term.coeff.clone(),
                ));
            }
        }
        if !violations.is_empty() {
            return Err(InvalidEquation(violations));
        }
        let f = SeriesTXZ::from_terms(lambda, caps.0, caps.1, caps.2, keys);
        Self::validate(f, m, n)
    }

    pub fn m(&self) -> u32 {
        self.f.m()
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    pub fn lambda(&self) -> &Lambda {
        self.f.lambda()
    }

    pub fn f(&self) -> &SeriesTXZ {
        &self.f
    }

    /// `β*ᵢ(x) = ∂F/∂z_{i,0}(0,x,0)` for `i = 0..m`.
    pub fn betas(&self) -> Vec<SeriesTX> {
        let lambda = self.lambda();
        (0..self.m())
            .map(|i| {
                let pos = lambda.position(&ZIndex::new(i, MultiIndex::zero(self.n()))).expect("(i,0) ∈ Λ");
                self.f.nu_slice(&ZPowers::unit(lambda.len(), pos)).t_slice(0)
            })
            .collect()
    }
}

/// Linear part and characteristic exponents at `x = 0`.
#[derive(Debug, Clone)]
pub struct CharData {
    pub m: u32,
    /// `β*ᵢ(x)`, `i = 0..m`.
    pub betas: Vec<SeriesTX>,
    /// `β*ᵢ(0)`.
    pub betas_at_origin: Vec<Coeff>,
    /// `λᵢ(0)` sorted by `(Re, Im)` ascending.
    pub roots: Vec<Complex<f64>>,
    /// The same roots in `ℚ(i)` when they are exactly representable.
    pub exact_roots: Option<Vec<Coeff>>,
    /// `0.45·minᵢ(−Re λᵢ(0))` when every real part is negative.
    pub h: Option<f64>,
}

impl CharData {
    /// `P_k(0) = k^m − Σᵢ β*ᵢ(0) kⁱ`, exact.
    pub fn indicial_at_origin(&self, k: u32) -> Coeff {
        let kk = int(i64::from(k));
        let mut pow = int(1);
        let mut acc = c_zero();
        for b in &self.betas_at_origin {
            acc = acc - b * Complex::new(pow.clone(), BigRational::zero());
            pow = &pow * &kk;
        }
        acc + Complex::new(pow, BigRational::zero())
    }

    /// `P_k(x) = k^m − Σᵢ β*ᵢ(x) kⁱ` as a time-free series.
    pub fn indicial(&self, k: u32) -> SeriesTX {
        let first = &self.betas[0];
        let (n, cap_t, cap_x) = (first.dim(), first.cap_t(), first.cap_x());
        let kk = int(i64::from(k));
        let mut pow = int(1);
        let mut acc = SeriesTX::zero(n, cap_t, cap_x);
        for b in &self.betas {
            acc = &acc - &b.scale(&Complex::new(pow.clone(), BigRational::zero()));
            pow = &pow * &kk;
        }
        &acc + &SeriesTX::constant(n, cap_t, cap_x, Complex::new(pow, BigRational::zero()))
    }

    /// Indicial polynomial `λ^m − Σ β*ᵢ(0) λⁱ` at a float point.
    pub fn indicial_poly_f64(&self, lam: Complex<f64>) -> Complex<f64> {
        let b: Vec<Complex<f64>> = self.betas_at_origin.iter().map(coeff_to_c64).collect();
        indicial_poly(&b, lam)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.re).collect()
    }
}

fn indicial_poly(b: &[Complex<f64>], lam: Complex<f64>) -> Complex<f64> {
    let mut acc = Complex::new(1.0, 0.0);
    for bi in b.iter().rev() {
        acc = acc * lam - bi;
    }
    acc
}

fn indicial_derivative(b: &[Complex<f64>], lam: Complex<f64>) -> Complex<f64> {
    let m = b.len();
    let mut acc = Complex::new(m as f64, 0.0);
    for i in (1..m).rev() {
        acc = acc * lam - b[i] * i as f64;
    }
    acc
}

fn cmp_exact(a: &Coeff, b: &Coeff) -> Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

fn cmp_f64(a: &Complex<f64>, b: &Complex<f64>) -> Ordering {
    a.re.total_cmp(&b.re).then_with(|| a.im.total_cmp(&b.im))
}

/// Roots of the indicial polynomial at the origin.
pub fn char_exponents(eq: &FuchsianEquation) -> CharData {
    let betas = eq.betas();
    let b0: Vec<Coeff> = betas.iter().map(|b| b.coeff(0, &MultiIndex::zero(eq.n()))).collect();
    let m = eq.m();
    let exact: Option<Vec<Coeff>> = match m {
        1 => Some(vec![b0[0].clone()]),
        2 => {
            // λ² − β₁λ − β₀ = 0
            let disc = &b0[1] * &b0[1] + &b0[0] * Complex::new(int(4), BigRational::zero());
            complex_sqrt_exact(&disc).map(|s| {
                let half = Complex::new(BigRational::new(BigInt::from(1), BigInt::from(2)), BigRational::zero());
                vec![(&b0[1] - &s) * &half, (&b0[1] + &s) * &half]
            })
        }
        _ => None,
    };
    let roots: Vec<Complex<f64>> = match &exact {
        Some(rs) => {
            let mut rs = rs.clone();
            rs.sort_by(cmp_exact);
            rs.iter().map(coeff_to_c64).collect()
        }
        None => float_roots(&b0.iter().map(coeff_to_c64).collect::<Vec<_>>()),
    };
    let exact = exact.map(|mut rs| {
        rs.sort_by(cmp_exact);
        rs
    });
    let h = if roots.iter().all(|r| r.re < 0.0) {
        let min_neg = roots.iter().map(|r| -r.re).fold(f64::INFINITY, f64::min);
        Some(0.45 * min_neg)
    } else {
        None
    };
    CharData { m, betas, betas_at_origin: b0, roots, exact_roots: exact, h }
}

/// Roots of `λ^m − Σ bᵢ λⁱ` through the companion matrix, then polished by
/// a few Newton steps.
fn float_roots(b: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let m = b.len();
    let mut roots: Vec<Complex<f64>> = if m == 2 {
        let s = (b[1] * b[1] + b[0] * 4.0).sqrt();
        vec![(b[1] - s) * 0.5, (b[1] + s) * 0.5]
    } else {
        let mut comp = DMatrix::<Complex<f64>>::zeros(m, m);
        for i in 1..m {
            comp[(i, i - 1)] = Complex::new(1.0, 0.0);
        }
        for i in 0..m {
            comp[(i, m - 1)] = b[i];
        }
        let schur = comp.schur();
        let (_, t) = schur.unpack();
        (0..m).map(|i| t[(i, i)]).collect()
    };
    for r in &mut roots {
        for _ in 0..4 {
            let d = indicial_derivative(b, *r);
            if d.norm() == 0.0 {
                break;
            }
            let step = indicial_poly(b, *r) / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots.sort_by(cmp_f64);
    roots
}

/// Which statements apply to the equation at recursion depth `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Applicability {
    /// `P_k(0) ≠ 0` for `k = 1..=K`.
    pub theorem1_ok: bool,
    /// First `k` with `P_k(0) = 0`.
    pub indicial_zero_at: Option<u32>,
    /// `Re λᵢ(0) < 0` for every `i`.
    pub theorem2_ok: bool,
    pub h: Option<f64>,
    pub warnings: Vec<String>,
}

pub fn applicability(cd: &CharData, depth: u32) -> Applicability {
    let indicial_zero_at = (1..=depth).find(|&k| cd.indicial_at_origin(k).is_zero());
    let mut warnings = Vec::new();
    let limit = depth.saturating_mul(10);
    for r in &cd.roots {
        if r.im.abs() >= 1e-9 {
            continue;
        }
        let nearest = r.re.round();
        if nearest >= 1.0 && nearest <= f64::from(limit) && (r.re - nearest).abs() < 1e-9 {
            let k = nearest as u32;
            if !cd.indicial_at_origin(k).is_zero() || k > depth {
                warnings.push(format!("exponent {} lies within 1e-9 of the positive integer {k}", r.re));
            }
        }
    }
    let theorem2_ok = cd.roots.iter().all(|r| r.re < 0.0);
    Applicability { theorem1_ok: indicial_zero_at.is_none(), indicial_zero_at, theorem2_ok, h: cd.h, warnings }
}

/// `h` as an exact rational, when the exponents are exact: `(9/20)·min(−Re λᵢ)`.
pub fn h_exact(cd: &CharData) -> Option<BigRational> {
    let roots = cd.exact_roots.as_ref()?;
    if !roots.iter().all(|r| r.re.is_negative()) {
        return None;
    }
    let min = roots.iter().map(|r| -r.re.clone()).min()?;
    Some(min * BigRational::new(BigInt::from(9), BigInt::from(20)))
}

/// Real part helper for reporting.
pub fn root_real_parts_exact(cd: &CharData) -> Option<Vec<f64>> {
    cd.exact_roots.as_ref().map(|rs| rs.iter().map(|r| rational_to_f64(&r.re)).collect())
}

/// The two equations with explicit extra solutions, `n = 1`, `m = 2`.
pub mod examples {
    use super::*;
    use crate::num::c_int;

    fn z(i: u32, a: u32) -> (u32, Vec<u32>, u32) {
        (i, vec![a], 1)
    }

    fn term(c: i64, zs: Vec<(u32, Vec<u32>, u32)>) -> RawTerm {
        RawTerm { coeff: c_int(c), t_pow: 0, x_pows: vec![0], z_pows: zs }
    }

    /// `F = −z_{1,0} + z_{0,(1)}² + 8 z_{0,0} z_{0,(2)}²`.
    pub fn remark2(caps: (u32, u32, u32)) -> FuchsianEquation {
        let terms = vec![
            term(-1, vec![z(1, 0)]),
            term(1, vec![(0, vec![1], 2)]),
            term(8, vec![z(0, 0), (0, vec![2], 2)]),
        ];
        FuchsianEquation::from_raw(2, 1, caps, &terms).expect("valid")
    }

    /// `F = −3 z_{1,0} − 2 z_{0,0} + z_{0,(2)}²`.
    pub fn remark3(caps: (u32, u32, u32)) -> FuchsianEquation {
        let terms = vec![term(-3, vec![z(1, 0)]), term(-2, vec![z(0, 0)]), term(1, vec![(0, vec![2], 2)])];
        FuchsianEquation::from_raw(2, 1, caps, &terms).expect("valid")
    }

    pub fn remark3_raw() -> Vec<RawTerm> {
        vec![term(-3, vec![z(1, 0)]), term(-2, vec![z(0, 0)]), term(1, vec![(0, vec![2], 2)])]
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::num::{c_int, c_real};
    use proptest::prelude::*;

    const CAPS: (u32, u32, u32) = (8, 16, 8);

    fn raw(c: i64, k: u32, x: Vec<u32>, zs: Vec<(u32, Vec<u32>, u32)>) -> RawTerm {
        RawTerm { coeff: c_int(c), t_pow: k, x_pows: x, z_pows: zs }
    }

    #[test]
    fn validation_examples() {
        let eq = remark3(CAPS);
        assert_eq!(eq.m(), 2);
        let err = FuchsianEquation::from_raw(2, 1, CAPS, &[raw(1, 0, vec![1], vec![])]).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].kind(), "A2Violation");
        let err = FuchsianEquation::from_raw(2, 1, CAPS, &[raw(1, 0, vec![0], vec![(0, vec![1], 1)])]).unwrap_err();
        assert_eq!(err.0[0].kind(), "A3Violation");
        // x-dependent coefficients count as well
        let err = FuchsianEquation::from_raw(2, 1, CAPS, &[raw(1, 0, vec![3], vec![(1, vec![1], 1)])]).unwrap_err();
        assert_eq!(err.0[0].kind(), "A3Violation");
        let err = FuchsianEquation::from_raw(2, 1, CAPS, &[raw(1, 0, vec![0], vec![(2, vec![0], 1)])]).unwrap_err();
        assert_eq!(err.0[0].kind(), "IndexOutOfLambda");
        // a t-multiple of a linear |α|>0 term is allowed, so is a t-forcing
        assert!(FuchsianEquation::from_raw(2, 1, CAPS, &[raw(1, 1, vec![0], vec![(0, vec![1], 1)]), raw(1, 1, vec![0], vec![])]).is_ok());
    }

    #[test]
    fn exponents_of_the_remarks() {
        let cd = char_exponents(&remark2(CAPS));
        assert_eq!(cd.exact_roots.as_ref().unwrap(), &vec![c_int(-1), c_int(0)]);
        assert_eq!(cd.h, None);
        let cd3 = char_exponents(&remark3(CAPS));
        assert_eq!(cd3.exact_roots.as_ref().unwrap(), &vec![c_int(-2), c_int(-1)]);
        assert!((cd3.h.unwrap() - 0.45).abs() < 1e-15);
        assert_eq!(h_exact(&cd3).unwrap(), BigRational::new(BigInt::from(9), BigInt::from(20)));
        let trivial = FuchsianEquation::from_raw(2, 1, CAPS, &[raw(1, 0, vec![0], vec![(0, vec![0], 2)])]).unwrap();
        assert_eq!(char_exponents(&trivial).exact_roots.unwrap(), vec![c_zero(), c_zero()]);
    }

    #[test]
    fn applicability_examples() {
        let a3 = applicability(&char_exponents(&remark3(CAPS)), 10);
        assert!(a3.theorem1_ok && a3.theorem2_ok);
        let a2 = applicability(&char_exponents(&remark2(CAPS)), 10);
        assert!(a2.theorem1_ok && !a2.theorem2_ok);
        // β*₀(0) = 1, β*₁(0) = 0 gives λ = ±1 and P₁(0) = 0
        let eq = FuchsianEquation::from_raw(2, 1, CAPS, &[raw(1, 0, vec![0], vec![(0, vec![0], 1)])]).unwrap();
        let a = applicability(&char_exponents(&eq), 10);
        assert!(!a.theorem1_ok);
        assert_eq!(a.indicial_zero_at, Some(1));
    }

    #[test]
    fn complex_and_irrational_roots() {
        // λ² + 2λ + 5 = 0 ⇒ λ = −1 ± 2i
        let eq = FuchsianEquation::from_raw(
            2,
            1,
            CAPS,
            &[raw(-2, 0, vec![0], vec![(1, vec![0], 1)]), raw(-5, 0, vec![0], vec![(0, vec![0], 1)])],
        )
        .unwrap();
        let cd = char_exponents(&eq);
        let exact = cd.exact_roots.clone().unwrap();
        assert_eq!(exact[0], crate::num::c_rat(int(-1), int(-2)));
        assert_eq!(exact[1], crate::num::c_rat(int(-1), int(2)));
        // λ² + λ − 1 = 0 has irrational roots
        let eq = FuchsianEquation::from_raw(
            2,
            1,
            CAPS,
            &[raw(-1, 0, vec![0], vec![(1, vec![0], 1)]), raw(1, 0, vec![0], vec![(0, vec![0], 1)])],
        )
        .unwrap();
        let cd = char_exponents(&eq);
        assert!(cd.exact_roots.is_none());
        let s5 = 5f64.sqrt();
        assert!((cd.roots[0].re - (-1.0 - s5) / 2.0).abs() < 1e-14);
        assert!((cd.roots[1].re - (-1.0 + s5) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn third_order_companion_roots() {
        // (λ+1)(λ+2)(λ+3) = λ³ + 6λ² + 11λ + 6
        let eq = FuchsianEquation::from_raw(
            3,
            1,
            CAPS,
            &[
                raw(-6, 0, vec![0], vec![(2, vec![0], 1)]),
                raw(-11, 0, vec![0], vec![(1, vec![0], 1)]),
                raw(-6, 0, vec![0], vec![(0, vec![0], 1)]),
            ],
        )
        .unwrap();
        let cd = char_exponents(&eq);
        for (r, e) in cd.roots.iter().zip([-3.0, -2.0, -1.0]) {
            assert!((r - Complex::new(e, 0.0)).norm() < 1e-12, "{r} vs {e}");
        }
        assert_eq!(cd.indicial_at_origin(1), c_int(24));
        let one = FuchsianEquation::from_raw(1, 2, CAPS, &[RawTerm {
            coeff: c_real(-1, 2),
            t_pow: 0,
            x_pows: vec![0, 0],
            z_pows: vec![(0, vec![0, 0], 1)],
        }])
        .unwrap();
        assert_eq!(char_exponents(&one).exact_roots.unwrap(), vec![c_real(-1, 2)]);
    }

    #[test]
    fn indicial_series_carries_x_dependence() {
        // β*₀(x) = −2 + x, β*₁ = −3 ⇒ P_1(x) = 1 + 3 + 2 − x
        let mut terms = remark3_raw();
        terms.push(raw(1, 0, vec![1], vec![(0, vec![0], 1)]));
        let eq = FuchsianEquation::from_raw(2, 1, CAPS, &terms).unwrap();
        let cd = char_exponents(&eq);
        let p1 = cd.indicial(1);
        assert_eq!(p1.coeff(0, &MultiIndex::new(vec![0])), c_int(6));
        assert_eq!(p1.coeff(0, &MultiIndex::new(vec![1])), c_int(-1));
    }

    proptest! {
        #[test]
        fn indicial_flag_matches_brute_force(b0 in -30i64..30, b1 in -30i64..30, depth in 1u32..12) {
            let eq = FuchsianEquation::from_raw(
                2,
                1,
                CAPS,
                &[raw(b1, 0, vec![0], vec![(1, vec![0], 1)]), raw(b0, 0, vec![0], vec![(0, vec![0], 1)])],
            )
            .unwrap();
            let a = applicability(&char_exponents(&eq), depth);
            let brute = (1..=i64::from(depth)).all(|k| k * k - b1 * k - b0 != 0);
            prop_assert_eq!(a.theorem1_ok, brute);
        }

        #[test]
        fn roots_satisfy_indicial_polynomial(b0 in -50i64..50, b1 in -50i64..50, b2 in -50i64..50, third in proptest::bool::ANY) {
            let mut terms = vec![raw(b1, 0, vec![0], vec![(1, vec![0], 1)]), raw(b0, 0, vec![0], vec![(0, vec![0], 1)])];
            let m = if third { terms.push(raw(b2, 0, vec![0], vec![(2, vec![0], 1)])); 3 } else { 2 };
            let eq = FuchsianEquation::from_raw(m, 1, CAPS, &terms).unwrap();
            let cd = char_exponents(&eq);
            prop_assert_eq!(cd.roots.len(), m as usize);
            for r in &cd.roots {
                let res = cd.indicial_poly_f64(*r).norm();
                prop_assert!(res <= 1e-12 * (1.0 + r.norm().powi(m as i32)), "residual {} at {}", res, r);
            }
            prop_assert!(cd.roots.windows(2).all(|w| cmp_f64(&w[0], &w[1]) != Ordering::Greater));
        }
    }
}
