//! The formal solution `u₀` with `u₀(0,x) ≡ 0`, order by order in `t`.
//!
//! At order `k` the unknown `u_k(x)` enters `F` only through the linear
//! `t`-free part, which gives `P_k(x)·u_k = G_k(x)` where `G_k` is the `t^k`
//! coefficient of `F` evaluated on the partial sum through order `k − 1`.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::equation::{char_exponents, CharData, FuchsianEquation, InvalidEquation};
use crate::series::{Lambda, SeriesError, SeriesTX, SeriesTXZ, SubstOrder, ZIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("indicial value P_{0}(0) vanishes; the recursion cannot divide by it")]
    IndicialZero(u32),
    #[error("truncation exhausted: {0}")]
    TruncationExhausted(String),
    #[error("order {0}: residual of the partial sum is not zero after solving")]
    RecursionMismatch(u32),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Invalid(#[from] InvalidEquation),
    #[error("target series has a t^0 term; manufactured forcing would violate A2")]
    TargetNotFlat,
}

/// `{(t∂t)^i ∂x^α u}` over Λ.
pub type DerivativeTuple = BTreeMap<ZIndex, SeriesTX>;

pub fn derivative_tuple(u: &SeriesTX, lambda: &Lambda) -> Result<DerivativeTuple, SeriesError> {
    let mut euler_powers = vec![u.clone()];
    for i in 1..lambda.m() {
        let next = euler_powers[i as usize - 1].euler_t();
        euler_powers.push(next);
    }
    lambda
        .entries()
        .iter()
        .map(|zi| Ok((zi.clone(), euler_powers[zi.i as usize].dx_multi(&zi.alpha)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    /// Highest `t`-order `K` to compute.
    pub order: u32,
    /// x-degree through which the result must be exact; defaults to
    /// `K_x − m·K`.
    pub x_order: Option<u32>,
    /// Substitute with the reversed accumulation order (determinism checks).
    pub reverse: bool,
}

impl SolveOptions {
    pub fn order(order: u32) -> Self {
        SolveOptions { order, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormalSolution {
    /// `Σ_{k=1}^{K} u_k(x) t^k`, caps `(K, x_order)`.
    pub u0: SeriesTX,
    pub order: u32,
    pub x_order: u32,
    /// `P_k(x)` for `k = 1..=K`, kept for audit.
    pub indicial: Vec<SeriesTX>,
}

pub fn solve_formal(eq: &FuchsianEquation, opts: SolveOptions) -> Result<FormalSolution, SolveError> {
    let cd = char_exponents(eq);
    solve_with(eq, &cd, opts)
}

pub fn solve_with(eq: &FuchsianEquation, cd: &CharData, opts: SolveOptions) -> Result<FormalSolution, SolveError> {
    let f = eq.f();
    let m = eq.m();
    let order = opts.order;
    let (cap_t, cap_x, cap_z) = f.caps();
    if cap_t < order {
        return Err(SolveError::TruncationExhausted(format!("F has K_t = {cap_t} < order {order}")));
    }
    if cap_z < order {
        return Err(SolveError::TruncationExhausted(format!("F has K_z = {cap_z} < order {order}")));
    }
    let budget = m * order;
    let x_order = match opts.x_order {
        Some(x) => x,
        None => cap_x.checked_sub(budget).ok_or_else(|| {
            SolveError::TruncationExhausted(format!("K_x = {cap_x} is below m·K = {budget}"))
        })?,
    };
    if cap_x < x_order + budget {
        return Err(SolveError::TruncationExhausted(format!(
            "K_x = {cap_x} is below x_order + m·K = {}",
            x_order + budget
        )));
    }
    if let Some(k) = (1..=order).find(|&k| cd.indicial_at_origin(k).is_zero()) {
        return Err(SolveError::IndicialZero(k));
    }
    let subst = if opts.reverse { SubstOrder::Reverse } else { SubstOrder::Forward };
    let n = eq.n();
    let lambda = eq.lambda();

    let mut u = SeriesTX::zero(n, order, cap_x);
    let mut indicial = Vec::with_capacity(order as usize);
    // F on the partial sum through order k − 1.
    let mut rhs = f.substitute_z_with(&derivative_tuple(&u, lambda)?, subst)?;
    for k in 1..=order {
        let g_k = rhs.t_slice(k);
        let p_k = cd.indicial(k).truncate(order, g_k.cap_x());
        let u_k = &p_k.invert_unit()? * &g_k;
        indicial.push(p_k);
        u = &u + &u_k.shift_t(k);
        rhs = f.substitute_z_with(&derivative_tuple(&u, lambda)?, subst)?;
        let lhs_k = euler_power(&u, m).t_slice(k);
        let res_k = lhs_k.truncate(0, rhs.cap_x()).checked_sub(&rhs.t_slice(k))?;
        if !res_k.is_zero() {
            return Err(SolveError::RecursionMismatch(k));
        }
    }
    debug_assert!(u.cap_x() >= x_order);
    Ok(FormalSolution { u0: u.truncate(order, x_order), order, x_order, indicial })
}

fn euler_power(u: &SeriesTX, m: u32) -> SeriesTX {
    (0..m).fold(u.clone(), |acc, _| acc.euler_t())
}

/// `(t∂t)^m u − F(·, tuple(u))` through `t`-order `K`, exact within the
/// returned caps.
pub fn residual(eq: &FuchsianEquation, u: &SeriesTX, order: u32) -> Result<SeriesTX, SeriesError> {
    let rhs = eq.f().substitute_z(&derivative_tuple(u, eq.lambda())?)?;
    let lhs = euler_power(u, eq.m());
    let cap_t = order.min(rhs.cap_t()).min(lhs.cap_t());
    lhs.truncate(cap_t, rhs.cap_x()).checked_sub(&rhs.truncate(cap_t, rhs.cap_x()))
}

/// Adds to the template's forcing so that `u_target` solves the equation
/// exactly within the template's caps. The template is read as the
/// polynomial it stores.
pub fn manufactured(template: &FuchsianEquation, u_target: &SeriesTX) -> Result<FuchsianEquation, SolveError> {
    if u_target.terms().any(|((k, _), _)| *k == 0) {
        return Err(SolveError::TargetNotFlat);
    }
    let f = template.f();
    let (cap_t, cap_x, cap_z) = f.caps();
    let m = template.m();
    let lifted_cap_x = cap_x + m;
    let lifted_cap_z = cap_z.max(cap_t);
    let f_lifted = SeriesTXZ::from_terms(
        f.lambda().clone(),
        cap_t,
        lifted_cap_x,
        lifted_cap_z,
        f.terms().map(|(k, c)| (k.clone(), c.clone())),
    );
    let u = u_target.with_caps(cap_t, lifted_cap_x);
    let rhs = f_lifted.substitute_z(&derivative_tuple(&u, f.lambda())?)?;
    let forcing = (&euler_power(&u, m) - &rhs).truncate(cap_t, cap_x);
    debug_assert!(rhs.cap_t() >= cap_t && rhs.cap_x() >= cap_x);
    assert!(forcing.t_slice(0).is_zero(), "forcing with t^0 terms from a flat target");
    let new_f = f.checked_add(&SeriesTXZ::from_tx(f.lambda().clone(), &forcing, cap_z))?;
    Ok(FuchsianEquation::validate(new_f, m, template.n())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::examples::remark3_raw;
    use crate::equation::RawTerm;
    use crate::num::{c_int, c_real};
    use crate::series::MultiIndex;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn remark3_with(extra: Vec<RawTerm>, caps: (u32, u32, u32)) -> FuchsianEquation {
        let mut terms = remark3_raw();
        terms.extend(extra);
        FuchsianEquation::from_raw(2, 1, caps, &terms).unwrap()
    }

    fn forcing(k: u32, x: u32) -> RawTerm {
        RawTerm { coeff: c_int(1), t_pow: k, x_pows: vec![x], z_pows: vec![] }
    }

    #[test]
    fn derivative_tuple_examples() {
        let lam = Lambda::new(2, 1);
        let u = SeriesTX::monomial(1, 4, 6, 1, mi(&[2]), c_int(1));
        let tup = derivative_tuple(&u, &lam).unwrap();
        assert_eq!(tup[&ZIndex::new(0, mi(&[2]))], SeriesTX::monomial(1, 4, 4, 1, mi(&[0]), c_int(2)));
        assert_eq!(tup[&ZIndex::new(1, mi(&[1]))], SeriesTX::monomial(1, 4, 5, 1, mi(&[1]), c_int(2)));
        let v = SeriesTX::monomial(1, 4, 6, 1, mi(&[0]), c_real(1, 6));
        let tv = derivative_tuple(&v, &lam).unwrap();
        assert_eq!(tv[&ZIndex::new(1, mi(&[0]))], v);
    }

    #[test]
    fn forced_remark3_gives_t_over_6() {
        let eq = remark3_with(vec![forcing(1, 0)], (8, 20, 8));
        let sol = solve_formal(&eq, SolveOptions::order(6)).unwrap();
        assert_eq!(sol.u0, SeriesTX::monomial(1, 6, sol.x_order, 1, mi(&[0]), c_real(1, 6)));
        assert!(residual(&eq, &sol.u0, 6).unwrap().is_zero());
    }

    #[test]
    fn x_forcing_gives_tx_over_6() {
        let eq = remark3_with(vec![forcing(1, 1)], (8, 20, 8));
        let sol = solve_formal(&eq, SolveOptions::order(6)).unwrap();
        assert_eq!(sol.u0, SeriesTX::monomial(1, 6, sol.x_order, 1, mi(&[1]), c_real(1, 6)));
    }

    #[test]
    fn unforced_remark3_gives_zero() {
        let eq = crate::equation::examples::remark3((8, 20, 8));
        let sol = solve_formal(&eq, SolveOptions::order(6)).unwrap();
        assert!(sol.u0.is_zero());
        assert_eq!(sol.x_order, 8);
    }

    #[test]
    fn residual_of_t_on_remark3() {
        // (t∂t)² t = t, F = −3t − 2t ⇒ residual 6t
        let eq = crate::equation::examples::remark3((8, 20, 8));
        let u = SeriesTX::t(1, 8, 20);
        let r = residual(&eq, &u, 8).unwrap();
        assert_eq!(r.terms().count(), 1);
        assert_eq!(r.coeff(1, &mi(&[0])), c_int(6));
    }

    #[test]
    fn manufactured_examples() {
        let template = remark3_with(vec![], (8, 20, 8));
        let u = SeriesTX::monomial(1, 8, 20, 1, mi(&[0]), c_real(1, 6));
        let eq = manufactured(&template, &u).unwrap();
        assert_eq!(eq, remark3_with(vec![forcing(1, 0)], (8, 20, 8)));
        assert_eq!(manufactured(&template, &SeriesTX::zero(1, 8, 20)).unwrap(), template);

        // linear template: forcing 6tx² (the (u_xx)² term contributes 4t²)
        let linear = FuchsianEquation::from_raw(2, 1, (8, 20, 8), &remark3_raw()[..2]).unwrap();
        let u = SeriesTX::monomial(1, 8, 20, 1, mi(&[2]), c_int(1));
        let eq = manufactured(&linear, &u).unwrap();
        let forcing = eq.f().z_free_part();
        assert_eq!(forcing, SeriesTX::monomial(1, 8, 20, 1, mi(&[2]), c_int(6)));
        let sol = solve_formal(&eq, SolveOptions::order(8)).unwrap();
        assert_eq!(sol.u0, u.truncate(8, sol.x_order));

        assert!(matches!(manufactured(&template, &SeriesTX::one(1, 8, 20)), Err(SolveError::TargetNotFlat)));
    }

    #[test]
    fn errors() {
        let eq = remark3_with(vec![], (4, 20, 8));
        assert!(matches!(solve_formal(&eq, SolveOptions::order(6)), Err(SolveError::TruncationExhausted(_))));
        let eq = remark3_with(vec![], (8, 10, 8));
        assert!(matches!(solve_formal(&eq, SolveOptions::order(6)), Err(SolveError::TruncationExhausted(_))));
        // λ = ±1 ⇒ P₁(0) = 0
        let eq = FuchsianEquation::from_raw(
            2,
            1,
            (8, 20, 8),
            &[RawTerm { coeff: c_int(1), t_pow: 0, x_pows: vec![0], z_pows: vec![(0, vec![0], 1)] }],
        )
        .unwrap();
        assert_eq!(solve_formal(&eq, SolveOptions::order(3)), Err(SolveError::IndicialZero(1)));
    }

    #[test]
    fn nonlinear_feedback_is_consistent() {
        // forcing t + t x², nonlinear (u_xx)² and t·u_x terms
        let mut extra = vec![forcing(1, 0), forcing(1, 2)];
        extra.push(RawTerm { coeff: c_int(1), t_pow: 1, x_pows: vec![0], z_pows: vec![(0, vec![1], 1)] });
        extra.push(RawTerm { coeff: c_real(1, 3), t_pow: 0, x_pows: vec![1], z_pows: vec![(0, vec![0], 2)] });
        let eq = remark3_with(extra, (10, 30, 10));
        let short = solve_formal(&eq, SolveOptions { order: 5, x_order: Some(6), reverse: false }).unwrap();
        let long = solve_formal(&eq, SolveOptions { order: 8, x_order: Some(6), reverse: false }).unwrap();
        assert_eq!(short.u0, long.u0.truncate(5, 6));
        let rev = solve_formal(&eq, SolveOptions { order: 8, x_order: Some(6), reverse: true }).unwrap();
        assert_eq!(rev.u0, long.u0);
        let r = residual(&eq, &long.u0, 8).unwrap();
        assert!(r.truncate(8, 6 - 2).is_zero());
    }
}
