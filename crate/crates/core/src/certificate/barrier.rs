use super::{CertError, HDecomposition, PhiFamily};
use crate::equation::CharData;
use crate::majorant::{norm_x, norm_xz, MajorantEval, NormProfileEval, NormProfileZ};

/// Relative slack allowed in every pointwise inequality.
pub const SLACK: f64 = 1e-9;

/// The weights of the barrier and the box `(0,σ₀] × [0,R₀]`. `ε₁₀ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonParams {
    pub h: f64,
    pub eps00: f64,
    pub eps01: f64,
    pub eps11: f64,
    pub kappa: f64,
    pub sigma0: f64,
    pub r0: f64,
}

impl EpsilonParams {
    /// `ε_{i,j}` for `i, j ∈ {0, 1}`.
    pub fn eps(&self, i: u32, j: u32) -> f64 {
        match (i, j) {
            (0, 0) => self.eps00,
            (0, 1) => self.eps01,
            (1, 0) => 1.0,
            (1, 1) => self.eps11,
            _ => panic!("ε_({i},{j}) is not a barrier weight"),
        }
    }
}

/// Verification grid: log-spaced `t ∈ [10⁻⁶σ₀, σ₀]`, linear `ρ ∈ [0, R₀]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub ts: Vec<f64>,
    pub rhos: Vec<f64>,
}

impl Grid {
    pub fn new(sigma0: f64, r0: f64, size: usize) -> Self {
        assert!(size >= 2, "grid needs at least two points per axis");
        let lo = (sigma0 * 1e-6).ln();
        let hi = sigma0.ln();
        let step = (hi - lo) / (size - 1) as f64;
        let mut ts: Vec<f64> = (0..size).map(|i| (lo + step * i as f64).exp()).collect();
        ts[size - 1] = sigma0;
        let rhos = (0..size).map(|j| r0 * j as f64 / (size - 1) as f64).collect();
        Grid { ts, rhos }
    }

    pub fn for_params(p: &EpsilonParams, size: usize) -> Self {
        Self::new(p.sigma0, p.r0, size)
    }

    /// Points in `t`-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.ts.iter().flat_map(|&t| self.rhos.iter().map(move |&r| (t, r))).collect()
    }
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Index of `φ_{i,j}` in [`PointEval::phi`].
fn phi_slot(i: u32, j: u32) -> usize {
    match (i, j) {
        (0, j) if j <= 3 => j as usize,
        (1, j) if j <= 2 => 4 + j as usize,
        _ => panic!("φ_({i},{j}) is not tracked"),
    }
}

/// Norm profile of a normal-form coefficient with its weight.
#[derive(Debug, Clone)]
struct Weighted {
    weight: f64,
    profile: NormProfileEval,
}

/// Pointwise evaluator for `q`, its derivatives, `A` and `B`.
#[derive(Debug, Clone)]
pub struct BarrierModel {
    pub params: EpsilonParams,
    n: usize,
    /// φ₀₀, φ₀₁, φ₀₂, φ₀₃, φ₁₀, φ₁₁, φ₁₂
    phi: Vec<MajorantEval>,
    /// `(value slot, ρ-derivative slot)` of `Φ` for each Λ position.
    z_slots: Vec<(usize, usize)>,
    beta0: MajorantEval,
    beta1: MajorantEval,
    d_beta0: MajorantEval,
    d_beta1: MajorantEval,
    /// `a_{i,α}`, `|α| ≤ 1`, weighted by `1/ε_{i,|α|}`.
    a_low: Vec<Weighted>,
    /// `a_{0,α}`, `|α| = 2`.
    a_high: Vec<NormProfileEval>,
    /// `b_{i,α}`, weighted by `1/ε_{i,|α|}`, with the exact profile for the
    /// linear-bound constants.
    b: Vec<(Weighted, NormProfileZ)>,
    c: Vec<NormProfileEval>,
    beta_exact: [crate::majorant::SectorMajorant; 2],
}

/// Everything computed at one `(t, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    pub t: f64,
    pub rho: f64,
    /// φ₀₀, φ₀₁, φ₀₂, φ₀₃, φ₁₀, φ₁₁, φ₁₂
    pub phi: [f64; 7],
    /// `t∂t` of φ₀₀, φ₀₁, φ₀₂, φ₁₀, φ₁₁
    pub euler: [f64; 5],
    pub q: f64,
    pub dq: f64,
    pub euler_q: f64,
    pub a: f64,
    pub b: f64,
    /// `|Φ| = Σ_Λ φ_{i,|α|}`
    pub phi_abs: f64,
    /// `Σ_{|α|≤1} ε_{i,|α|}⁻¹ ‖a_{i,α}‖(t,Φ)`
    pub sum_a_low: f64,
    /// `Σ_{|α|=2} ‖a_{0,α}‖(t,Φ)`
    pub sum_a_high: f64,
    /// `Σ ‖c_{α,β}‖(Φ')`
    pub sum_c: f64,
}

impl BarrierModel {
    pub fn new(params: EpsilonParams, phis: &PhiFamily, dec: &HDecomposition) -> Self {
        let lambda = dec.lambda();
        let phi = [
            &phis.phi00,
            &phis.phi01,
            &phis.phi02,
            &phis.phi03,
            &phis.phi10,
            &phis.phi11,
            &phis.phi12,
        ]
        .iter()
        .map(|p| p.to_eval())
        .collect();
        let z_slots = lambda
            .entries()
            .iter()
            .map(|zi| {
                let j = zi.alpha.degree();
                (phi_slot(zi.i, j), phi_slot(zi.i, j + 1))
            })
            .collect();
        let nb0 = norm_x(&dec.beta0);
        let nb1 = norm_x(&dec.beta1);
        let mut model = BarrierModel {
            params,
            n: lambda.n(),
            phi,
            z_slots,
            beta0: nb0.to_eval(),
            beta1: nb1.to_eval(),
            d_beta0: nb0.d_rho().to_eval(),
            d_beta1: nb1.d_rho().to_eval(),
            a_low: Vec::new(),
            a_high: Vec::new(),
            b: Vec::new(),
            c: dec.c.values().map(|s| norm_xz(s).to_eval()).collect(),
            beta_exact: [nb0, nb1],
        };
        for (zi, s) in &dec.a {
            let prof = norm_xz(s).to_eval();
            if zi.alpha.degree() <= 1 {
                model.a_low.push(Weighted { weight: 1.0 / params.eps(zi.i, zi.alpha.degree()), profile: prof });
            } else {
                model.a_high.push(prof);
            }
        }
        for (zi, s) in &dec.b {
            let exact = norm_xz(s);
            let w = Weighted { weight: 1.0 / params.eps(zi.i, zi.alpha.degree()), profile: exact.to_eval() };
            model.b.push((w, exact));
        }
        model.reweigh(dec);
        model
    }

    fn reweigh(&mut self, dec: &HDecomposition) {
        let p = self.params;
        let low = dec.a.keys().filter(|zi| zi.alpha.degree() <= 1);
        for (w, zi) in self.a_low.iter_mut().zip(low) {
            w.weight = 1.0 / p.eps(zi.i, zi.alpha.degree());
        }
        for ((w, _), zi) in self.b.iter_mut().zip(dec.b.keys()) {
            w.weight = 1.0 / p.eps(zi.i, zi.alpha.degree());
        }
    }

    /// Same model with other weights or box.
    pub fn with_params(&self, params: EpsilonParams, dec: &HDecomposition) -> Self {
        let mut m = self.clone();
        m.params = params;
        m.reweigh(dec);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, t: f64, rho: f64) -> PointEval {
        let p = &self.params;
        let mut phi = [0.0; 7];
        for (slot, e) in self.phi.iter().enumerate() {
            phi[slot] = e.eval(t, rho);
        }
        let euler = [
            self.phi[0].eval_euler(t, rho),
            self.phi[1].eval_euler(t, rho),
            self.phi[2].eval_euler(t, rho),
            self.phi[4].eval_euler(t, rho),
            self.phi[5].eval_euler(t, rho),
        ];
        let [f00, f01, f02, f03, f10, f11, f12] = phi;
        let [e00, e01, e02, e10, e11] = euler;
        let tk = t.powf(p.kappa);
        let s02 = f02.sqrt();

        let q = p.eps00 * f00 + f10 + tk * f02 + p.eps01 * f01 + p.eps11 * f11 + f02 * s02;
        let dq = p.eps00 * f01 + f11 + tk * f03 + p.eps01 * f02 + p.eps11 * f12 + 1.5 * s02 * f03;
        let euler_q = p.eps00 * e00 + e10 + tk * (p.kappa * f02 + e02) + p.eps01 * e01 + p.eps11 * e11 + 1.5 * s02 * e02;

        let z: Vec<f64> = self.z_slots.iter().map(|&(v, _)| phi[v]).collect();
        let dz: Vec<f64> = self.z_slots.iter().map(|&(_, d)| phi[d]).collect();
        let phi_abs: f64 = z.iter().sum();

        let (mut sa, mut dsa) = (0.0, 0.0);
        for w in &self.a_low {
            sa += w.weight * w.profile.eval(t, rho, &z);
            dsa += w.weight * w.profile.eval_d_rho_total(t, rho, &z, &dz);
        }
        let (mut sah, mut dsah) = (0.0, 0.0);
        for prof in &self.a_high {
            sah += prof.eval(t, rho, &z);
            dsah += prof.eval_d_rho_total(t, rho, &z, &dz);
        }
        let (mut sb, mut dsb) = (0.0, 0.0);
        for (w, _) in &self.b {
            sb += w.weight * w.profile.eval(t, rho, &z);
            dsb += w.weight * w.profile.eval_d_rho_total(t, rho, &z, &dz);
        }
        let (mut sc, mut dsc) = (0.0, 0.0);
        for prof in &self.c {
            sc += prof.eval(t, rho, &z);
            dsc += prof.eval_d_rho_total(t, rho, &z, &dz);
        }
        let nb0 = self.beta0.eval(t, rho);
        let nb1 = self.beta1.eval(t, rho);
        let dnb0 = self.d_beta0.eval(t, rho);
        let dnb1 = self.d_beta1.eval(t, rho);
        let t1k = t.powf(1.0 - p.kappa);

        let a = p.eps00
            + (nb0 / p.eps00 + nb1)
            + t * sa
            + t1k * sah
            + sb
            + sc * s02
            + p.kappa
            + p.eps01 / p.eps11
            + p.eps11 * (dnb0 / p.eps00 + dnb1)
            + p.eps11 * (nb0 / p.eps01 + nb1 / p.eps11)
            + p.eps11 * t * dsa
            + p.eps11 * t1k * dsah
            + p.eps11 * dsb
            + p.eps11 * dsc * s02;
        let b = tk / p.eps11
            + p.eps11 * t * sa
            + p.eps11 * t1k * sah
            + p.eps11 * sb
            + 4.0 * p.eps11 / 3.0 * sc * s02
            + 1.5 / p.eps11 * s02;
        PointEval {
            t,
            rho,
            phi,
            euler,
            q,
            dq,
            euler_q,
            a,
            b,
            phi_abs,
            sum_a_low: sa,
            sum_a_high: sah,
            sum_c: sc,
        }
    }

    pub fn q(&self, t: f64, rho: f64) -> f64 {
        self.eval(t, rho).q
    }

    pub fn b(&self, t: f64, rho: f64) -> f64 {
        self.eval(t, rho).b
    }

    /// Largest `‖β_i‖/ρ` slope on `[0, R]` (the `Hᵢ` constants).
    pub fn beta_slopes(&self, r: f64) -> [f64; 2] {
        self.beta_exact.clone().map(|nb| {
            nb.terms()
                .map(|(_, poly)| {
                    poly.to_f64().iter().enumerate().skip(1).map(|(j, c)| c * r.powi(j as i32 - 1)).sum::<f64>()
                })
                .sum()
        })
    }
}

/// Knobs of the parameter search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamOptions {
    pub grid: usize,
    pub sigma0: f64,
    pub r0: f64,
    pub max_halvings: u32,
    pub kappa: Option<f64>,
}

impl Default for ParamOptions {
    fn default() -> Self {
        ParamOptions { grid: 50, sigma0: 0.5, r0: 0.5, max_halvings: 60, kappa: None }
    }
}

#[derive(Debug, Clone)]
pub struct ParamSearch {
    pub params: EpsilonParams,
    pub model: BarrierModel,
    pub eps11_halvings: u32,
    pub box_halvings: u32,
    /// `max A` on the final grid.
    pub max_a: f64,
}

/// `h = 0.45·min(−Re λᵢ(0))`, which exists only when every exponent has
/// negative real part.
pub fn require_h(cd: &CharData) -> Result<f64, CertError> {
    cd.h.ok_or_else(|| {
        CertError::HypothesisViolated(format!(
            "Re λᵢ(0) < 0 fails: exponents have real parts {:?}",
            cd.real_parts()
        ))
    })
}

/// The four-step weight selection: `ε₀₀ = h/4`; `ε₁₁` halved from 1 until
/// the β-derivative terms of `A` are at most `h/4`; `κ = min(1/4, hε₁₁/8)`
/// and `ε₀₁ = ε₁₁(h/4 − κ)`; then the box is halved until `A ≤ h` on the
/// verification grid.
pub fn choose_params(
    cd: &CharData,
    dec: &HDecomposition,
    phis: &PhiFamily,
    opts: ParamOptions,
) -> Result<ParamSearch, CertError> {
    let h = require_h(cd)?;
    let eps00 = h / 4.0;
    let nb0 = norm_x(&dec.beta0).d_rho();
    let nb1 = norm_x(&dec.beta1).d_rho();
    // ∂ρ‖βᵢ‖ is time-free and increasing in ρ: its sup on the box is at R₀.
    let slope = nb0.eval(1.0, opts.r0) / eps00 + nb1.eval(1.0, opts.r0);
    let mut eps11 = 1.0;
    let mut eps11_halvings = 0;
    while eps11 * slope > h / 4.0 {
        if eps11_halvings >= opts.max_halvings {
            return Err(CertError::SearchExhausted(format!(
                "ε₁₁ still too large after {} halvings",
                opts.max_halvings
            )));
        }
        eps11 /= 2.0;
        eps11_halvings += 1;
    }
    let kappa = opts.kappa.unwrap_or_else(|| (0.25f64).min(h * eps11 / 8.0));
    if !(kappa > 0.0 && kappa < 0.5 && kappa < h / 4.0) {
        return Err(CertError::HypothesisViolated(format!("κ = {kappa} must lie in (0, min(1/2, h/4))")));
    }
    let eps01 = eps11 * (h / 4.0 - kappa);
    let mut params = EpsilonParams { h, eps00, eps01, eps11, kappa, sigma0: opts.sigma0, r0: opts.r0 };
    let mut model = BarrierModel::new(params, phis, dec);
    for halvings in 0..=opts.max_halvings {
        let grid = Grid::for_params(&params, opts.grid);
        let values = par_map(&grid.points(), |&(t, r)| model.eval(t, r).a);
        let max_a = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max_a <= h && max_a.is_finite() {
            return Ok(ParamSearch { params, model, eps11_halvings, box_halvings: halvings, max_a });
        }
        params.sigma0 /= 2.0;
        params.r0 /= 2.0;
        model = model.with_params(params, dec);
    }
    Err(CertError::SearchExhausted(format!(
        "A(t,ρ) ≤ h not reached after {} halvings of (σ₀, R₀)",
        opts.max_halvings
    )))
}

/// Constants of the bound `B ≤ C₁t^κ + C₂q + C₃q^{2/3} + C₄q^{1/3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub c: [f64; 4],
    /// `L = 2·max |Φ|` over the grid.
    pub l: f64,
    /// `Hᵢ` in `‖βᵢ‖ ≤ Hᵢρ`.
    pub h_beta: [f64; 2],
    /// `B_{i,α}` in `‖b_{i,α}‖(z) ≤ B_{i,α}|z|`, in key order.
    pub b_linear: Vec<f64>,
}

/// Fits the constants from sups over the grid, following the recipe
/// `B ≤ K₁t^κ + K₂|Φ| + K₃φ₀₂^{1/2}` and then the pointwise φ bounds on `|Φ|`.
pub fn fit_constants(model: &BarrierModel, evals: &[PointEval]) -> Constants {
    let p = model.params;
    let n = model.n as f64;
    let sup = |f: fn(&PointEval) -> f64| evals.iter().map(f).fold(0.0, f64::max);
    let sup_a_low = sup(|e| e.sum_a_low);
    let sup_a_high = sup(|e| e.sum_a_high);
    let sup_c = sup(|e| e.sum_c);
    let l = 2.0 * sup(|e| e.phi_abs);

    let k1 = 1.0 / p.eps11
        + p.sigma0.powf(1.0 - p.kappa) * p.eps11 * sup_a_low
        + p.eps11 * p.sigma0.powf(1.0 - 2.0 * p.kappa) * sup_a_high;
    let b_linear: Vec<f64> = model
        .b
        .iter()
        .map(|(_, exact)| {
            exact
                .terms()
                .map(|((k, nu), poly)| {
                    debug_assert_eq!(*k, 0);
                    poly.eval(p.r0) * l.powi(nu.degree() as i32 - 1)
                })
                .sum()
        })
        .collect();
    let k2 = p.eps11 * model.b.iter().zip(&b_linear).map(|((w, _), bl)| w.weight * bl).sum::<f64>();
    let k3 = 1.5 / p.eps11 + 4.0 * p.eps11 / 3.0 * sup_c;
    let c2 = k2 * (1.0 / p.eps00 + 1.0 + n / p.eps01 + n / p.eps11);
    let c3 = k2 * n * (n + 1.0) / 2.0;
    Constants { k1, k2, k3, c: [k1, c2, c3, k3], l, h_beta: model.beta_slopes(p.r0), b_linear }
}

/// A violated (or closest-to-violated) inequality instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub t: f64,
    pub rho: f64,
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of one family of pointwise inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub evaluated: usize,
    pub violations: usize,
    /// `max (lhs − rhs)/(1 + |rhs|)`; negative when every instance holds with room.
    pub max_excess: f64,
    /// `max lhs/rhs` over instances with `rhs > 0`; scale-free.
    pub max_ratio: f64,
    pub worst: Option<Witness>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, evaluated: 0, violations: 0, max_excess: f64::NEG_INFINITY, max_ratio: 0.0, worst: None }
    }

    fn record(&mut self, t: f64, rho: f64, label: &'static str, lhs: f64, rhs: f64) {
        self.evaluated += 1;
        let excess = (lhs - rhs) / (1.0 + rhs.abs());
        let violated = !(lhs <= rhs + SLACK * (1.0 + rhs.abs()));
        if violated {
            self.violations += 1;
        }
        if rhs > 0.0 {
            self.max_ratio = self.max_ratio.max(lhs / rhs);
        }
        if excess > self.max_excess || (violated && self.worst.is_none()) || excess.is_nan() {
            self.max_excess = if excess.is_nan() { f64::INFINITY } else { excess.max(self.max_excess) };
            self.worst = Some(Witness { t, rho, label, lhs, rhs });
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct BarrierReport {
    pub params: EpsilonParams,
    pub grid: usize,
    pub checks: Vec<Check>,
    pub constants: Constants,
    pub max_a: f64,
    pub max_q: f64,
}

impl BarrierReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> &Check {
        self.checks.iter().find(|c| c.name == name).expect("known check")
    }
}

/// Evaluates every point of the grid, in order.
pub fn evaluate_grid(model: &BarrierModel, grid: &Grid) -> Vec<PointEval> {
    par_map(&grid.points(), |&(t, r)| model.eval(t, r))
}

/// Checks every barrier inequality at every grid point.
pub fn verify_barrier(model: &BarrierModel, grid_size: usize) -> BarrierReport {
    let p = model.params;
    let grid = Grid::for_params(&p, grid_size);
    let evals = evaluate_grid(model, &grid);
    let constants = fit_constants(model, &evals);
    let [c1, c2, c3, c4] = constants.c;

    let mut ineq = Check::new("barrier_inequality");
    let mut a_le_h = Check::new("a_below_h");
    let mut pw = Check::new("phi_bounds");
    let mut dpw = Check::new("phi_rho_derivative_bounds");
    let mut bfit = Check::new("b_growth_fit");
    for e in &evals {
        let (t, r) = (e.t, e.rho);
        let [f00, f01, f02, f03, f10, f11, f12] = e.phi;
        let tk = t.powf(p.kappa);
        ineq.record(t, r, "(t∂t+2h)q ≤ Aq + B∂ρq", e.euler_q + 2.0 * p.h * e.q, e.a * e.q + e.b * e.dq);
        a_le_h.record(t, r, "A ≤ h", e.a, p.h);

        pw.record(t, r, "φ00 ≤ q/ε00", f00, e.q / p.eps00);
        pw.record(t, r, "φ01 ≤ q/ε01", f01, e.q / p.eps01);
        pw.record(t, r, "φ10 ≤ q", f10, e.q);
        pw.record(t, r, "φ11 ≤ q/ε11", f11, e.q / p.eps11);
        pw.record(t, r, "φ02 ≤ q^(2/3)", f02, e.q.powf(2.0 / 3.0));
        pw.record(t, r, "t^κ φ02 ≤ q", tk * f02, e.q);

        dpw.record(t, r, "∂ρφ00 ≤ ∂ρq/ε00", f01, e.dq / p.eps00);
        dpw.record(t, r, "∂ρφ01 ≤ ∂ρq/ε01", f02, e.dq / p.eps01);
        dpw.record(t, r, "∂ρφ10 ≤ ∂ρq", f11, e.dq);
        dpw.record(t, r, "∂ρφ11 ≤ ∂ρq/ε11", f12, e.dq / p.eps11);
        dpw.record(t, r, "φ02^(1/2) ∂ρφ02 ≤ (2/3)∂ρq", f02.sqrt() * f03, 2.0 / 3.0 * e.dq);
        dpw.record(t, r, "t^κ ∂ρφ02 ≤ ∂ρq", tk * f03, e.dq);

        let bound = c1 * tk + c2 * e.q + c3 * e.q.powf(2.0 / 3.0) + c4 * e.q.powf(1.0 / 3.0);
        bfit.record(t, r, "B ≤ C1 t^κ + C2 q + C3 q^(2/3) + C4 q^(1/3)", e.b, bound);
    }
    let max_a = evals.iter().map(|e| e.a).fold(f64::NEG_INFINITY, f64::max);
    let max_q = evals.iter().map(|e| e.q).fold(0.0, f64::max);
    BarrierReport { params: p, grid: grid_size, checks: vec![ineq, pw, dpw, a_le_h, bfit], constants, max_a, max_q }
}

/// One row of the `φ_{i,j}` decay table: `sup φ_{i,j} / R^{4−j}` over
/// `(0,σ] × [0,R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiDecayRow {
    pub sigma: f64,
    pub r: f64,
    /// Keyed by `(i, j) ∈ J` in the order 00, 10, 01, 11, 02.
    pub ratios: Vec<((u32, u32), f64)>,
}

/// Every `φ` has nonnegative coefficients, so its sup over the box is its
/// value at the corner `(σ, R)`.
pub fn phi_decay_table(phis: &PhiFamily, boxes: &[(f64, f64)]) -> Vec<PhiDecayRow> {
    const J: [(u32, u32); 5] = [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2)];
    boxes
        .iter()
        .map(|&(sigma, r)| PhiDecayRow {
            sigma,
            r,
            ratios: J
                .iter()
                .map(|&(i, j)| ((i, j), phis.get(i, j).eval(sigma, r) / r.powi(4 - j as i32)))
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{build_h, phi_family, theta_normal_form};
    use super::*;
    use crate::equation::char_exponents;
    use crate::equation::examples::{remark2, remark3};
    use crate::num::c_int;
    use crate::series::{MultiIndex, SeriesTX};

    const CAPS: (u32, u32, u32) = (12, 24, 12);

    fn setup(w: &SeriesTX) -> (CharData, HDecomposition, PhiFamily) {
        let eq = remark3(CAPS);
        let cd = char_exponents(&eq);
        let h = build_h(&eq, &SeriesTX::zero(1, 12, 24)).unwrap();
        let dec = theta_normal_form(&h, &cd).unwrap();
        let phis = phi_family(w, &cd).unwrap();
        (cd, dec, phis)
    }

    fn tx2() -> SeriesTX {
        SeriesTX::monomial(1, 8, 8, 1, MultiIndex::new(vec![2]), c_int(1))
    }

    #[test]
    fn zero_candidate_is_trivial() {
        let (cd, dec, phis) = setup(&SeriesTX::zero(1, 8, 8));
        let search = choose_params(&cd, &dec, &phis, ParamOptions::default()).unwrap();
        let p = search.params;
        let e = search.model.eval(0.01, 0.1);
        assert_eq!(e.q, 0.0);
        assert!((e.b - 0.01f64.powf(p.kappa) / p.eps11).abs() < 1e-15);
        assert!((e.a - (p.eps00 + p.kappa + p.eps01 / p.eps11)).abs() < 1e-15);
        assert!(verify_barrier(&search.model, 20).passed());
    }

    #[test]
    fn remark3_parameter_choice() {
        let (cd, dec, phis) = setup(&tx2());
        let search = choose_params(&cd, &dec, &phis, ParamOptions::default()).unwrap();
        let p = search.params;
        assert!((p.h - 0.45).abs() < 1e-15);
        assert!((p.eps00 - 0.1125).abs() < 1e-15);
        assert_eq!(search.eps11_halvings, 0);
        assert!(p.kappa + p.eps01 / p.eps11 <= p.h / 4.0 + 1e-15);
        assert!(p.kappa > 0.0 && p.kappa < 0.5);
    }

    #[test]
    fn remark3_q_matches_hand_assembly() {
        let (cd, dec, phis) = setup(&tx2());
        let p = choose_params(&cd, &dec, &phis, ParamOptions::default()).unwrap();
        let m = p.model;
        let p = p.params;
        let (t, r) = (0.1f64, 0.1f64);
        // φ₀₀ = tρ², φ₁₀ = 3tρ², φ₀₁ = 2tρ, φ₁₁ = 6tρ, φ₀₂ = 2t
        let hand = p.eps00 * t * r * r
            + 3.0 * t * r * r
            + t.powf(p.kappa) * 2.0 * t
            + p.eps01 * 2.0 * t * r
            + p.eps11 * 6.0 * t * r
            + (2.0 * t).powf(1.5);
        assert!((m.q(t, r) - hand).abs() < 1e-15);
    }

    #[test]
    fn corrupted_eps00_breaks_a_bound() {
        let (cd, dec, phis) = setup(&tx2());
        let search = choose_params(&cd, &dec, &phis, ParamOptions::default()).unwrap();
        let mut bad = search.params;
        bad.eps00 = 10.0 * bad.h;
        let report = verify_barrier(&search.model.with_params(bad, &dec), 10);
        assert_eq!(report.check("a_below_h").violations, 100);
    }

    #[test]
    fn remark2_has_no_h() {
        let eq = remark2(CAPS);
        let cd = char_exponents(&eq);
        let h = build_h(&eq, &SeriesTX::zero(1, 12, 24)).unwrap();
        let dec = theta_normal_form(&h, &cd).unwrap();
        let phis = PhiFamily {
            phi00: Default::default(),
            phi10: Default::default(),
            phi01: Default::default(),
            phi11: Default::default(),
            phi02: Default::default(),
            phi03: Default::default(),
            phi12: Default::default(),
        };
        assert!(matches!(
            choose_params(&cd, &dec, &phis, ParamOptions::default()),
            Err(CertError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn remark3_tx2_barrier_holds() {
        let (cd, dec, phis) = setup(&tx2());
        let search = choose_params(&cd, &dec, &phis, ParamOptions::default()).unwrap();
        assert_eq!(search.box_halvings, 5);
        let rep = verify_barrier(&search.model, 50);
        for c in &rep.checks {
            assert!(c.passed(), "{c:?}");
            assert_eq!(c.evaluated % 2500, 0);
            assert!(c.max_ratio <= 1.0, "{c:?}");
        }
    }

    #[test]
    fn grid_layout() {
        let g = Grid::new(0.5, 0.25, 50);
        assert_eq!(g.ts.len(), 50);
        assert!((g.ts[0] - 0.5e-6).abs() < 1e-18);
        assert_eq!(g.ts[49], 0.5);
        assert_eq!(g.rhos[0], 0.0);
        assert_eq!(g.rhos[49], 0.25);
        assert!(g.ts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn phi_decay_rows_shrink_for_tx2() {
        let (_, _, phis) = setup(&tx2());
        let rows = phi_decay_table(&phis, &[(1e-2, 0.5), (1e-4, 0.25), (1e-6, 0.125)]);
        assert_eq!(rows.len(), 3);
        // φ₀₀ = tρ² ⇒ ratio σ/R²
        assert!((rows[1].ratios[0].1 - 1e-4 / 0.0625).abs() < 1e-15);
    }
}
