//! Second-order uniqueness machinery: the shifted nonlinearity `H`, its
//! normal form in the Θ-basis, the φ family of majorants and the barrier
//! function `q` with the coefficients `A`, `B` of its differential
//! inequality.

mod barrier;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::equation::{h_exact, CharData, FuchsianEquation};
use crate::majorant::{norm_x, MajorantError, SectorMajorant};
use crate::num::{c_one, fmt_coeff, Coeff};
use crate::series::{Lambda, MultiIndex, SeriesError, SeriesTX, SeriesTXZ, TxzKey, ZIndex, ZPowers};
use crate::solver::derivative_tuple;

pub use barrier::{
    choose_params, evaluate_grid, fit_constants, phi_decay_table, require_h, verify_barrier, BarrierModel, BarrierReport, Check, Constants,
    EpsilonParams, Grid, PhiDecayRow, ParamOptions, ParamSearch, PointEval, Witness, SLACK,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("the uniqueness machinery needs m = 2, got m = {0}")]
    NotSecondOrder(u32),
    #[error("characteristic exponents are not exact in Q(i); the Θ-basis change needs them exactly")]
    InexactExponents,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("parameter search exhausted: {0}")]
    SearchExhausted(String),
    #[error("term {0} cannot be placed in the normal form")]
    UnsplittableTerm(String),
    #[error("candidate w must vanish at t = 0")]
    CandidateNotFlat,
    #[error("post-check failed: {0}")]
    PostCheck(String),
    #[error(transparent)]
    Majorant(#[from] MajorantError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `Θ₁ = t∂t − λ₁(0)`, `Θ₂ = (t∂t − λ₂(0))Θ₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaOperators {
    pub lambda1: Coeff,
    pub lambda2: Coeff,
}

impl ThetaOperators {
    pub fn new(cd: &CharData) -> Result<Self, CertError> {
        if cd.m != 2 {
            return Err(CertError::NotSecondOrder(cd.m));
        }
        let roots = cd.exact_roots.as_ref().ok_or(CertError::InexactExponents)?;
        Ok(ThetaOperators { lambda1: roots[0].clone(), lambda2: roots[1].clone() })
    }

    pub fn theta1(&self, w: &SeriesTX) -> SeriesTX {
        w.euler_shift(&self.lambda1)
    }

    pub fn theta2(&self, w: &SeriesTX) -> SeriesTX {
        self.theta1(w).euler_shift(&self.lambda2)
    }

    /// `(s, p)` with `Θ₂ = (t∂t)² − s·(t∂t) + p`.
    pub fn expanded(&self) -> (Coeff, Coeff) {
        (&self.lambda1 + &self.lambda2, &self.lambda1 * &self.lambda2)
    }
}

/// `H(t,x,z) = F(t,x,z + U₀) − F(t,x,U₀)` with `U₀` the derivative tuple of
/// `u₀`. The `z`-degree of the result is capped at `⌊K_z/2⌋` so that the
/// shift leaves a positive `t`-cap.
pub fn build_h(eq: &FuchsianEquation, u0: &SeriesTX) -> Result<SeriesTXZ, CertError> {
    if eq.m() != 2 {
        return Err(CertError::NotSecondOrder(eq.m()));
    }
    let f = eq.f();
    let shifts = derivative_tuple(u0, eq.lambda())?;
    let shifted = f.translate_z(&shifts, f.cap_z() / 2)?;
    let zero = ZPowers::zero(eq.lambda().len());
    let (ct, cx, cz) = shifted.caps();
    let h = SeriesTXZ::from_terms(
        eq.lambda().clone(),
        ct,
        cx,
        cz,
        shifted.terms().filter(|(k, _)| k.nu != zero).map(|(k, c)| (k.clone(), c.clone())),
    );
    Ok(h)
}

/// Normal form of the shifted equation in the variables `d_{i,α} = D_{i,α}w`:
///
/// `Θ₂w = β₀ d₀₀ + β₁ d₁₀ + t Σ a_{i,α} d_{i,α} + Σ_{|α|≤1} b_{i,α} d_{i,α}
///        + Σ_{|α|=|β|=2} c_{α,β} d_{0,α} d_{0,β}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HDecomposition {
    pub theta: ThetaOperators,
    pub beta0: SeriesTX,
    pub beta1: SeriesTX,
    pub a: BTreeMap<ZIndex, SeriesTXZ>,
    pub b: BTreeMap<ZIndex, SeriesTXZ>,
    pub c: BTreeMap<(MultiIndex, MultiIndex), SeriesTXZ>,
    /// `H(z(d)) − (λ₁+λ₂) d₁₀ − λ₁² d₀₀`, the right side before splitting.
    pub theta_form: SeriesTXZ,
}

impl HDecomposition {
    pub fn lambda(&self) -> &Lambda {
        self.theta_form.lambda()
    }

    /// Recombines the pieces; equals `theta_form` exactly.
    pub fn reconstruct(&self) -> SeriesTXZ {
        let lambda = self.lambda().clone();
        let (ct, cx, cz) = self.theta_form.caps();
        let n = lambda.n();
        let var = |zi: &ZIndex| SeriesTXZ::z(lambda.clone(), ct, cx, cz, zi);
        let z00 = ZIndex::new(0, MultiIndex::zero(n));
        let z10 = ZIndex::new(1, MultiIndex::zero(n));
        let mut acc = var(&z00).mul_tx(&self.beta0);
        acc = &acc + &var(&z10).mul_tx(&self.beta1);
        let t = SeriesTX::t(n, ct, cx);
        for (zi, s) in &self.a {
            acc = &acc + &(s * &var(zi)).mul_tx(&t);
        }
        for (zi, s) in &self.b {
            acc = &acc + &(s * &var(zi));
        }
        for ((al, be), s) in &self.c {
            let p = var(&ZIndex::new(0, al.clone()));
            let q = var(&ZIndex::new(0, be.clone()));
            acc = &acc + &(&(s * &p) * &q);
        }
        acc
    }
}

/// Passes to the Θ-basis and splits by the host-variable rule: `t`-multiples
/// go to `a` under their smallest variable; `t`-free terms touching some
/// `|α| ≤ 1` variable go to `b` under the smallest such variable; the rest
/// are quadratic in second-order variables and go to `c` under their two
/// smallest ones.
pub fn theta_normal_form(h: &SeriesTXZ, cd: &CharData) -> Result<HDecomposition, CertError> {
    let theta = ThetaOperators::new(cd)?;
    let lambda = h.lambda().clone();
    let n = lambda.n();
    let len = lambda.len();
    let (ct, cx, cz) = h.caps();
    let zero_alpha = MultiIndex::zero(n);
    let pos = |i: u32, a: &MultiIndex| lambda.position(&ZIndex::new(i, a.clone())).expect("in Λ");
    let p00 = pos(0, &zero_alpha);
    let p10 = pos(1, &zero_alpha);

    // z_{1,α} = d_{1,α} + λ₁ d_{0,α}
    let images: Vec<Vec<(usize, Coeff)>> = lambda
        .entries()
        .iter()
        .enumerate()
        .map(|(p, zi)| {
            if zi.i == 1 {
                vec![(p, c_one()), (pos(0, &zi.alpha), theta.lambda1.clone())]
            } else {
                vec![(p, c_one())]
            }
        })
        .collect();
    let in_d = h.substitute_z_linear(&images);
    let (s, _) = theta.expanded();
    let lin = |p: usize, c: Coeff| {
        SeriesTXZ::from_terms(lambda.clone(), ct, cx, cz, [(TxzKey::new(0, zero_alpha.clone(), ZPowers::unit(len, p)), c)])
    };
    let l1sq = &theta.lambda1 * &theta.lambda1;
    let theta_form = &(&in_d - &lin(p10, s)) - &lin(p00, l1sq);

    let mut beta0 = Vec::new();
    let mut beta1 = Vec::new();
    let mut a: BTreeMap<ZIndex, Vec<(TxzKey, Coeff)>> = BTreeMap::new();
    let mut b: BTreeMap<ZIndex, Vec<(TxzKey, Coeff)>> = BTreeMap::new();
    let mut c: BTreeMap<(MultiIndex, MultiIndex), Vec<(TxzKey, Coeff)>> = BTreeMap::new();
    for (key, coeff) in theta_form.terms() {
        let support: Vec<usize> = key.nu.support().collect();
        let describe = || format!("{}·t^{}·x^{:?}·d^{:?}", fmt_coeff(coeff), key.k, key.alpha, key.nu.as_slice());
        if key.k == 0 && key.nu.degree() == 1 && (support[0] == p00 || support[0] == p10) {
            let target = if support[0] == p00 { &mut beta0 } else { &mut beta1 };
            target.push(((0, key.alpha.clone()), coeff.clone()));
            continue;
        }
        if support.is_empty() {
            return Err(CertError::UnsplittableTerm(describe()));
        }
        if key.k >= 1 {
            let host = support[0];
            let rest = TxzKey::new(key.k - 1, key.alpha.clone(), key.nu.decrement(host));
            a.entry(lambda.get(host).clone()).or_default().push((rest, coeff.clone()));
            continue;
        }
        if key.nu.degree() < 2 {
            return Err(CertError::UnsplittableTerm(describe()));
        }
        if let Some(&host) = support.iter().find(|&&p| lambda.get(p).alpha.degree() <= 1) {
            let rest = TxzKey::new(0, key.alpha.clone(), key.nu.decrement(host));
            b.entry(lambda.get(host).clone()).or_default().push((rest, coeff.clone()));
            continue;
        }
        let first = support[0];
        let reduced = key.nu.decrement(first);
        let second = reduced.support().next().expect("degree at least two");
        let rest = TxzKey::new(0, key.alpha.clone(), reduced.decrement(second));
        let pair = (lambda.get(first).alpha.clone(), lambda.get(second).alpha.clone());
        c.entry(pair).or_default().push((rest, coeff.clone()));
    }
    let mk = |terms: Vec<(TxzKey, Coeff)>| SeriesTXZ::from_terms(lambda.clone(), ct, cx, cz, terms);
    let dec = HDecomposition {
        theta,
        beta0: SeriesTX::from_terms(n, ct, cx, beta0),
        beta1: SeriesTX::from_terms(n, ct, cx, beta1),
        a: a.into_iter().map(|(k, v)| (k, mk(v))).collect(),
        b: b.into_iter().map(|(k, v)| (k, mk(v))).collect(),
        c: c.into_iter().map(|(k, v)| (k, mk(v))).collect(),
        theta_form,
    };
    if !dec.beta0.coeff(0, &zero_alpha).is_zero() || !dec.beta1.coeff(0, &zero_alpha).is_zero() {
        return Err(CertError::PostCheck("β₀(0) or β₁(0) is nonzero".into()));
    }
    if dec.b.values().any(|s| !s.z_free_part().is_zero()) {
        return Err(CertError::PostCheck("some b_{i,α}(x,0) is not identically zero".into()));
    }
    Ok(dec)
}

/// `φ_{i,j}` for `(i,j) ∈ J`, plus the two further ρ-derivatives the
/// barrier calculus needs (`φ₀₃ = ∂ρφ₀₂`, `φ₁₂ = ∂ρφ₁₁`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhiFamily {
    pub phi00: SectorMajorant,
    pub phi10: SectorMajorant,
    pub phi01: SectorMajorant,
    pub phi11: SectorMajorant,
    pub phi02: SectorMajorant,
    pub phi03: SectorMajorant,
    pub phi12: SectorMajorant,
}

impl PhiFamily {
    /// `φ_{i,j}` for any `i ∈ {0,1}`, `j ≤ 3 − i`.
    pub fn get(&self, i: u32, j: u32) -> &SectorMajorant {
        match (i, j) {
            (0, 0) => &self.phi00,
            (0, 1) => &self.phi01,
            (0, 2) => &self.phi02,
            (0, 3) => &self.phi03,
            (1, 0) => &self.phi10,
            (1, 1) => &self.phi11,
            (1, 2) => &self.phi12,
            _ => panic!("φ_({i},{j}) is not part of the family"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phi00.is_zero() && self.phi10.is_zero()
    }
}

fn neg_real_part(lam: &Coeff) -> Result<BigRational, CertError> {
    let a = -lam.re.clone();
    if !a.is_positive() {
        return Err(CertError::Majorant(MajorantError::NonpositiveExponent(a)));
    }
    Ok(a)
}

/// Builds the φ family from a candidate `w` with `w(0,x) ≡ 0` and checks
/// `‖D_{i,α}w‖_ρ ≪ φ_{i,|α|}` on Λ and `(t∂t + 2h)φ₀₀ ≪ φ₁₀`.
pub fn phi_family(w: &SeriesTX, cd: &CharData) -> Result<PhiFamily, CertError> {
    let theta = ThetaOperators::new(cd)?;
    if !w.t_slice(0).is_zero() {
        return Err(CertError::CandidateNotFlat);
    }
    let a1 = neg_real_part(&theta.lambda1)?;
    let a2 = neg_real_part(&theta.lambda2)?;
    let th1 = theta.theta1(w);
    let th2 = th1.euler_shift(&theta.lambda2);
    let phi00 = norm_x(&th1).integral_transform(&a1)?;
    let phi10 = norm_x(&th2).integral_transform(&a2)?;
    let phi01 = phi00.d_rho();
    let phi02 = phi01.d_rho();
    let phi11 = phi10.d_rho();
    let fam = PhiFamily { phi03: phi02.d_rho(), phi12: phi11.d_rho(), phi00, phi10, phi01, phi11, phi02 };

    let lambda = Lambda::new(2, w.dim());
    for zi in lambda.entries() {
        let dw = w.dx_multi(&zi.alpha)?;
        let dw = if zi.i == 1 { theta.theta1(&dw) } else { dw };
        if !norm_x(&dw).dominated_by(fam.get(zi.i, zi.alpha.degree())) {
            return Err(CertError::PostCheck(format!("‖D{zi} w‖ is not dominated by φ_{{{},{}}}", zi.i, zi.alpha.degree())));
        }
    }
    let h = h_exact(cd).ok_or_else(|| CertError::HypothesisViolated("Re λᵢ(0) < 0 fails".into()))?;
    let lhs = fam.phi00.euler_t().add(&fam.phi00.scale(&(h * BigRational::from_integer(2.into()))));
    if !lhs.dominated_by(&fam.phi10) {
        return Err(CertError::PostCheck("(t∂t + 2h)φ₀₀ is not dominated by φ₁₀".into()));
    }
    Ok(fam)
}
