//! Backward integration of `dρ/dt = −B(t,ρ)/t`, `ρ(t₀) = ξ`, and the checks
//! that transport decay of `q` along the resulting path.
//!
//! The ODE is solved in `s = −log t`, where it reads `dρ/ds = B(e^{−s}, ρ)`
//! and the singularity at `t = 0` moves to `s = +∞`.

use num_complex::Complex;
use thiserror::Error;

use crate::certificate::{BarrierModel, Constants, Grid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("σ still too large after {0} halvings")]
    SmallnessNotReached(u32),
    #[error("evaluator failed: {0}")]
    Evaluator(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathStatus {
    ExtendedToFloor,
    LeftDomain,
    StepFailure(String),
}

impl PathStatus {
    pub fn label(&self) -> &'static str {
        match self {
            PathStatus::ExtendedToFloor => "extended-to-floor",
            PathStatus::LeftDomain => "left-domain",
            PathStatus::StepFailure(_) => "step-failure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub rho: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicPath {
    /// Strictly decreasing in `t`, starting at `(t₀, ξ)`.
    pub samples: Vec<Sample>,
    pub t0: f64,
    pub xi: f64,
    pub r_domain: f64,
    pub t_min_reached: f64,
    pub status: PathStatus,
}

impl CharacteristicPath {
    pub fn rho_max(&self) -> f64 {
        self.samples.iter().map(|s| s.rho).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("path has its initial sample")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOptions {
    pub t0: f64,
    pub xi: f64,
    /// Domain bound: integration stops once `ρ ≥ R`.
    pub r: f64,
    pub t_floor: f64,
    pub tol: f64,
    /// Largest step in `log t`, which also sets the sample density.
    pub max_step: f64,
    pub max_steps: usize,
}

impl PathOptions {
    pub fn new(t0: f64, xi: f64, r: f64) -> Self {
        PathOptions { t0, xi, r, t_floor: 1e-6 * t0, tol: 1e-10, max_step: 0.25, max_steps: 200_000 }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the fifth-order value and the error
/// estimate.
fn dopri_step(f: &impl Fn(f64, f64) -> f64, s: f64, y: f64, h: f64) -> (f64, f64) {
    let mut k = [0.0; 7];
    for i in 0..7 {
        let yi = y + h * (0..i).map(|j| A[i][j] * k[j]).sum::<f64>();
        k[i] = f(s + C[i] * h, yi);
    }
    let y5 = y + h * (0..7).map(|i| B5[i] * k[i]).sum::<f64>();
    let y4 = y + h * (0..7).map(|i| B4[i] * k[i]).sum::<f64>();
    (y5, (y5 - y4).abs())
}

/// Fixed-step Dormand–Prince for `y' = f(s, y)` on `[s0, s1]`.
pub fn dopri5_fixed(f: impl Fn(f64, f64) -> f64, y0: f64, s0: f64, s1: f64, steps: usize) -> f64 {
    let h = (s1 - s0) / steps as f64;
    (0..steps).fold(y0, |y, i| dopri_step(&f, s0 + h * i as f64, y, h).0)
}

/// Integrates `dρ/dt = −B(t,ρ)/t` from `t₀` toward `t_floor` with adaptive steps in
/// `log t`, recording `q* = q(t, ρ(t))` at every accepted step.
pub fn integrate(
    b: impl Fn(f64, f64) -> f64,
    q: impl Fn(f64, f64) -> f64,
    opts: PathOptions,
) -> Result<CharacteristicPath, CharError> {
    let PathOptions { t0, xi, r, t_floor, tol, max_step, max_steps } = opts;
    if !(0.0 < t_floor && t_floor < t0) {
        return Err(CharError::Precondition(format!("need 0 < t_floor < t₀, got t_floor = {t_floor}, t₀ = {t0}")));
    }
    if !(0.0 < xi && xi < r) {
        return Err(CharError::Precondition(format!("need 0 < ξ < R, got ξ = {xi}, R = {r}")));
    }
    let rhs = |s: f64, rho: f64| b((-s).exp(), rho);
    let s_start = -t0.ln();
    let s_end = -t_floor.ln();
    let mut s = s_start;
    let mut rho = xi;
    let mut samples = vec![Sample { t: t0, rho, q: q(t0, rho) }];
    let mut h = max_step.min(s_end - s_start);
    let mut status = PathStatus::StepFailure(format!("step budget of {max_steps} exhausted"));
    let mut steps = 0;
    while steps < max_steps {
        steps += 1;
        let last = s + h >= s_end;
        let step = if last { s_end - s } else { h };
        let (y, err) = dopri_step(&rhs, s, rho, step);
        if !y.is_finite() || !err.is_finite() {
            status = PathStatus::StepFailure(format!("non-finite value at t = {:e}", (-s).exp()));
            break;
        }
        let scale = tol * (1.0 + y.abs());
        if err <= scale {
            s = if last { s_end } else { s + step };
            rho = y;
            let t = if last { t_floor } else { (-s).exp() };
            samples.push(Sample { t, rho, q: q(t, rho) });
            if rho >= r {
                status = PathStatus::LeftDomain;
                break;
            }
            if last {
                status = PathStatus::ExtendedToFloor;
                break;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0) };
        h = (step * factor).min(max_step);
        if h < 1e-14 * (1.0 + s.abs()) {
            status = PathStatus::StepFailure(format!("step size underflow at t = {:e}", (-s).exp()));
            break;
        }
    }
    Ok(CharacteristicPath { t_min_reached: samples.last().map(|x| x.t).unwrap_or(t0), samples, t0, xi, r_domain: r, status })
}

/// Outcome of the monotonicity check on `t^h q*`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub h: f64,
    pub consecutive_violations: usize,
    /// Violations of `q*(τ) ≤ (t₁/τ)^h q*(t₁)` over all pairs `t₁ < τ`.
    pub pair_violations: usize,
    pub pairs_checked: usize,
    /// Largest `([t^h q*]_later − [t^h q*]_earlier)/[t^h q*]_earlier`, where
    /// "earlier" is the smaller `t`; a scale-free diagnostic.
    pub max_relative_increase: f64,
    /// `(t_earlier, t_later)` at the worst consecutive pair.
    pub worst: Option<(f64, f64)>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.consecutive_violations == 0 && self.pair_violations == 0
    }
}

/// `t^h q*(t)` must be nonincreasing in `t` up to a relative `10⁻⁹`. On the
/// machinery paths `q*` is far below 1, where an absolute slack would accept
/// anything.
pub fn check_lemma7(path: &CharacteristicPath, h: f64) -> MonotonicityReport {
    let v: Vec<f64> = path.samples.iter().map(|s| s.t.powf(h) * s.q).collect();
    let mut rep = MonotonicityReport {
        h,
        consecutive_violations: 0,
        pair_violations: 0,
        pairs_checked: 0,
        max_relative_increase: f64::NEG_INFINITY,
        worst: None,
    };
    // Samples run from large t to small t, so index i is "later" than i + 1.
    for i in 0..v.len().saturating_sub(1) {
        let (later, earlier) = (v[i], v[i + 1]);
        if later - earlier > 1e-9 * earlier.abs() {
            rep.consecutive_violations += 1;
        }
        if earlier > 0.0 {
            let rel = (later - earlier) / earlier;
            if rel > rep.max_relative_increase {
                rep.max_relative_increase = rel;
                rep.worst = Some((path.samples[i + 1].t, path.samples[i].t));
            }
        }
    }
    for (i, tau) in path.samples.iter().enumerate() {
        for t1 in &path.samples[i + 1..] {
            rep.pairs_checked += 1;
            let rhs = (t1.t / tau.t).powf(h) * t1.q;
            if tau.q - rhs > 1e-9 * rhs.abs() {
                rep.pair_violations += 1;
            }
        }
    }
    rep
}

/// `C₂r/h + 3C₃r^{2/3}/(2h) + 3C₄r^{1/3}/h`, the `q`-part of the path cap.
pub fn q_cap(c: &[f64; 4], h: f64, r: f64) -> f64 {
    c[1] * r / h + 1.5 * c[2] * r.powf(2.0 / 3.0) / h + 3.0 * c[3] * r.powf(1.0 / 3.0) / h
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharBoundsReport {
    pub samples: usize,
    pub left_violations: usize,
    pub right_violations: usize,
    /// Smallest `rhs − ρ(t₁)` over samples.
    pub min_right_margin: f64,
}

impl CharBoundsReport {
    pub fn passed(&self) -> bool {
        self.left_violations == 0 && self.right_violations == 0
    }
}

/// Both sides of `ξ ≤ ρ(t₁) ≤ ξ + (C₁/κ)(t₀^κ − t₁^κ) + q_cap` at every sample.
pub fn check_lemma8(path: &CharacteristicPath, c: &[f64; 4], kappa: f64, h: f64, r: f64) -> CharBoundsReport {
    let cap = q_cap(c, h, r);
    let mut rep = CharBoundsReport { samples: 0, left_violations: 0, right_violations: 0, min_right_margin: f64::INFINITY };
    for s in &path.samples {
        rep.samples += 1;
        if s.rho < path.xi {
            rep.left_violations += 1;
        }
        let rhs = path.xi + c[0] / kappa * (path.t0.powf(kappa) - s.t.powf(kappa)) + cap;
        if s.rho > rhs + 1e-9 * (1.0 + rhs.abs()) {
            rep.right_violations += 1;
        }
        rep.min_right_margin = rep.min_right_margin.min(rhs - s.rho);
    }
    rep
}

/// The box from the smallness condition on `(C₁/κ)σ^κ + q_cap(r) < R/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallBox {
    pub sigma: f64,
    pub r_domain: f64,
    /// `1.05 ×` grid max of `q` on `(0,σ] × [0,R]`; an estimate, not a bound.
    pub r_sup: f64,
    pub lhs: f64,
    pub halvings: u32,
}

/// Halves `σ` from `σ₀` until the smallness condition holds with `R = R₀`.
pub fn small_box(
    model: &BarrierModel,
    constants: &Constants,
    grid_size: usize,
    max_halvings: u32,
) -> Result<SmallBox, CharError> {
    let p = model.params;
    let mut sigma = p.sigma0;
    for halvings in 0..=max_halvings {
        let grid = Grid::new(sigma, p.r0, grid_size);
        let qmax = crate::certificate::evaluate_grid(model, &grid).iter().map(|e| e.q).fold(0.0, f64::max);
        let r_sup = 1.05 * qmax;
        let lhs = constants.c[0] / p.kappa * sigma.powf(p.kappa) + q_cap(&constants.c, p.h, r_sup);
        if lhs < p.r0 / 2.0 {
            return Ok(SmallBox { sigma, r_domain: p.r0, r_sup, lhs, halvings });
        }
        sigma /= 2.0;
    }
    Err(CharError::SmallnessNotReached(max_halvings))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    pub status: &'static str,
    pub reached_floor: bool,
    pub rho_max: f64,
    /// `ξ + (C₁/κ)t₀^κ + q_cap(r)`.
    pub r1: f64,
    pub r_domain: f64,
    /// `(t_floor/t₀)^h · r`, the bound on `q*(t₀) = q(t₀, ξ)`.
    pub terminal_bound: f64,
    pub q_at_t0: f64,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.reached_floor
            && self.rho_max <= self.r1 + 1e-9 * (1.0 + self.r1)
            && self.r1 < self.r_domain
            && self.q_at_t0 <= self.terminal_bound * (1.0 + 1e-9)
    }
}

pub fn check_corollary2(
    path: &CharacteristicPath,
    c: &[f64; 4],
    kappa: f64,
    h: f64,
    r_sup: f64,
) -> Result<ExtensionReport, CharError> {
    if path.xi >= path.r_domain / 2.0 {
        return Err(CharError::Precondition(format!(
            "ξ = {} is not below R/2 = {}; extension to t = 0 is only claimed for ξ ∈ (0, R/2)",
            path.xi,
            path.r_domain / 2.0
        )));
    }
    let r1 = path.xi + c[0] / kappa * path.t0.powf(kappa) + q_cap(c, h, r_sup);
    Ok(ExtensionReport {
        status: path.status.label(),
        reached_floor: path.status == PathStatus::ExtendedToFloor,
        rho_max: path.rho_max(),
        r1,
        r_domain: path.r_domain,
        terminal_bound: (path.t_min_reached / path.t0).powf(h) * r_sup,
        q_at_t0: path.samples[0].q,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub r: f64,
    pub big_r: f64,
    /// `sup |u| / R^p` over the sample grid.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    pub exponent: i32,
    pub rows: Vec<DecayRow>,
    /// Per `R`: the value at the smallest `r`, approximating the inner limit.
    pub inner: Vec<(f64, f64)>,
    /// Inner value at the smallest `R`.
    pub outer: f64,
}

/// Tabulates `sup_{(0,r]×D_R} |u| / R^p` on 64 log-spaced `t ∈ [10⁻⁶r, r]`
/// and the distinguished boundary `|xᵢ| = R` (32 angles per axis, at most
/// two axes sampled independently), where the maximum modulus sits.
pub fn decay_profile<E: std::fmt::Display>(
    n: usize,
    u_eval: impl Fn(f64, &[Complex<f64>]) -> Result<Complex<f64>, E>,
    p: i32,
    r_list: &[f64],
    big_r_list: &[f64],
) -> Result<DecayProfile, CharError> {
    const NT: usize = 64;
    const NA: usize = 32;
    let axes = n.min(2);
    let angles: Vec<f64> = (0..NA).map(|k| std::f64::consts::TAU * k as f64 / NA as f64).collect();
    let mut rows = Vec::new();
    let mut inner = Vec::new();
    for &big_r in big_r_list {
        let mut last = 0.0;
        for &r in r_list {
            let mut sup = 0.0f64;
            for it in 0..NT {
                let t = r * 10f64.powf(-6.0 * (1.0 - it as f64 / (NT - 1) as f64));
                for idx in 0..NA.pow(axes as u32) {
                    let mut x = vec![Complex::new(big_r, 0.0); n];
                    let mut rest = idx;
                    for xi in x.iter_mut().take(axes) {
                        *xi = Complex::from_polar(big_r, angles[rest % NA]);
                        rest /= NA;
                    }
                    let val = u_eval(t, &x).map_err(|e| CharError::Evaluator(e.to_string()))?;
                    sup = sup.max(val.norm());
                }
            }
            last = sup / big_r.powi(p);
            rows.push(DecayRow { r, big_r, value: last });
        }
        inner.push((big_r, last));
    }
    let outer = inner.last().map(|x| x.1).unwrap_or(0.0);
    Ok(DecayProfile { exponent: p, rows, inner, outer })
}

/// The two closed-form solutions of the worked counterexamples.
pub mod closed_forms {
    use num_complex::Complex;

    use crate::equation::FuchsianEquation;
    use crate::num::c_real;
    use crate::series::{MultiIndex, SeriesError, SeriesTX};
    use crate::solver::residual;

    /// `u = −x²/(4 log t)`.
    pub fn remark2_u(t: f64, x: Complex<f64>) -> Complex<f64> {
        -x * x / (4.0 * t.ln())
    }

    /// `{(t∂t)^i ∂x^j u}` for `u = −x²/(4 log t)`, in Λ order
    /// `(0,0), (0,1), (0,2), (1,0), (1,1)`, and `(t∂t)²u`.
    pub fn remark2_tuple(t: f64, x: Complex<f64>) -> ([Complex<f64>; 5], Complex<f64>) {
        let l = t.ln();
        let tuple = [-x * x / (4.0 * l), -x / (2.0 * l), Complex::new(-1.0 / (2.0 * l), 0.0), x * x / (4.0 * l * l), x / (2.0 * l * l)];
        (tuple, -x * x / (2.0 * l * l * l))
    }

    /// `(t∂t)²u − F(t, x, tuple(u))` at one point.
    pub fn remark2_residual(eq: &FuchsianEquation, t: f64, x: Complex<f64>) -> Complex<f64> {
        let (tuple, lhs) = remark2_tuple(t, x);
        let order: Vec<usize> = eq
            .lambda()
            .entries()
            .iter()
            .map(|zi| match (zi.i, zi.alpha.degree()) {
                (0, j) => j as usize,
                (1, j) => 3 + j as usize,
                _ => unreachable!("second order in one variable"),
            })
            .collect();
        let z: Vec<Complex<f64>> = order.iter().map(|&k| tuple[k]).collect();
        lhs - eq.f().eval_numeric(Complex::new(t, 0.0), &[x], &z)
    }

    /// `u = x⁴/72` as a `t`-free series.
    pub fn remark3_u(cap_t: u32, cap_x: u32) -> SeriesTX {
        SeriesTX::monomial(1, cap_t, cap_x, 0, MultiIndex::new(vec![4]), c_real(1, 72))
    }

    /// Exact residual of `x⁴/72`; the equation's `t`-free solution space is
    /// not flat, so the solver's flatness assumption is bypassed here.
    pub fn remark3_residual(eq: &FuchsianEquation) -> Result<SeriesTX, SeriesError> {
        let (ct, cx, _) = eq.f().caps();
        residual(eq, &remark3_u(ct, cx), ct)
    }
}

#[cfg(test)]
mod tests {
    use super::closed_forms::*;
    use super::*;
    use crate::equation::examples::{remark2, remark3};

    #[test]
    fn zero_b_keeps_rho() {
        let path = integrate(|_, _| 0.0, |_, _| 0.0, PathOptions::new(0.1, 0.2, 1.0)).unwrap();
        assert_eq!(path.status, PathStatus::ExtendedToFloor);
        assert!(path.samples.iter().all(|s| s.rho == 0.2));
        assert!((path.t_min_reached - 1e-7).abs() < 1e-20);
        assert!(path.samples.windows(2).all(|w| w[0].t > w[1].t));
    }

    #[test]
    fn power_b_matches_antiderivative() {
        let (c1, kappa, t0, xi) = (0.7, 0.3, 0.5, 0.1);
        let mut opts = PathOptions::new(t0, xi, 10.0);
        opts.tol = 1e-12;
        let path = integrate(|t, _| c1 * t.powf(kappa), |_, _| 0.0, opts).unwrap();
        for s in &path.samples {
            let exact = xi + c1 / kappa * (t0.powf(kappa) - s.t.powf(kappa));
            assert!((s.rho - exact).abs() <= 1e-8 * exact, "{s:?} vs {exact}");
        }
        let rep = check_lemma8(&path, &[c1, 0.0, 0.0, 0.0], kappa, 0.45, 0.0);
        assert!(rep.passed());
        assert!(rep.min_right_margin.abs() < 1e-8);
    }

    #[test]
    fn fixed_step_order_is_at_least_four() {
        let (c1, kappa) = (1.0, 0.5);
        let f = |s: f64, _: f64| c1 * (-s).exp().powf(kappa);
        let (s0, s1) = (0.0, 4.0);
        let exact = c1 / kappa * (1.0 - (-s1 * kappa).exp());
        let err = |n| (dopri5_fixed(f, 0.0, s0, s1, n) - exact).abs();
        let (e1, e2) = (err(4), err(8));
        assert!(e1 / e2 >= 16.0, "{e1} / {e2}");
    }

    #[test]
    fn domain_exit_and_preconditions() {
        let path = integrate(|_, _| 1.0, |_, _| 0.0, PathOptions::new(0.1, 0.5, 1.0)).unwrap();
        assert_eq!(path.status, PathStatus::LeftDomain);
        assert!(path.last().rho >= 1.0);
        assert!(integrate(|_, _| 0.0, |_, _| 0.0, PathOptions::new(0.1, 1.5, 1.0)).is_err());
        let mut bad = PathOptions::new(0.1, 0.5, 1.0);
        bad.t_floor = 0.2;
        assert!(integrate(|_, _| 0.0, |_, _| 0.0, bad).is_err());
    }

    #[test]
    fn nan_is_a_step_failure() {
        let path = integrate(|t, _| if t < 1e-3 { f64::NAN } else { 0.0 }, |_, _| 0.0, PathOptions::new(0.1, 0.5, 1.0)).unwrap();
        assert!(matches!(path.status, PathStatus::StepFailure(_)));
    }

    fn synthetic(q: impl Fn(f64) -> f64) -> CharacteristicPath {
        integrate(|_, _| 0.0, |t, _| q(t), PathOptions::new(0.5, 0.1, 1.0)).unwrap()
    }

    #[test]
    fn monotonicity_direction() {
        let h = 0.45;
        assert!(check_lemma7(&synthetic(|_| 0.0), h).passed());
        // t^h·t^{−2h} = t^{−h} decreases in t.
        assert!(check_lemma7(&synthetic(|t| t.powf(-2.0 * h)), h).passed());
        // t^h·t^{2h} = t^{3h} increases in t.
        let rep = check_lemma7(&synthetic(|t| t.powf(2.0 * h)), h);
        assert!(!rep.passed());
        assert!(rep.consecutive_violations > 0 && rep.pair_violations > 0);
    }

    #[test]
    fn extension_rejects_large_xi() {
        let path = integrate(|_, _| 0.0, |_, _| 0.0, PathOptions::new(0.5, 0.6, 1.0)).unwrap();
        assert!(matches!(check_corollary2(&path, &[0.0; 4], 0.1, 0.45, 0.0), Err(CharError::Precondition(_))));
        let path = integrate(|_, _| 0.0, |_, _| 0.0, PathOptions::new(0.5, 0.25, 1.0)).unwrap();
        let rep = check_corollary2(&path, &[0.0; 4], 0.1, 0.45, 2.0).unwrap();
        assert!(rep.passed());
        assert!((rep.terminal_bound - 10f64.powf(-2.7) * 2.0).abs() < 1e-15);
    }

    #[test]
    fn remark3_closed_form_is_exact() {
        let eq = remark3((8, 8, 8));
        assert!(remark3_residual(&eq).unwrap().is_zero());
    }

    #[test]
    fn remark2_closed_form_residual() {
        let eq = remark2((8, 8, 8));
        for &t in &[1e-6, 1e-3, 0.3] {
            for &x in &[0.5, -0.25, 0.1] {
                assert!(remark2_residual(&eq, t, Complex::new(x, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn decay_profiles() {
        let prof = decay_profile(1, |_, x| Ok::<_, String>(x[0].powi(4) / 72.0), 4, &[0.1, 0.01], &[0.5, 0.1]).unwrap();
        assert!(prof.rows.iter().all(|r| (r.value - 1.0 / 72.0).abs() < 1e-12));
        let zero = decay_profile(2, |_, _| Ok::<_, String>(Complex::new(0.0, 0.0)), 4, &[0.1], &[0.5]).unwrap();
        assert_eq!(zero.outer, 0.0);
        let rs = [0.3, 1e-2, 1e-4, 1e-8];
        let log = decay_profile(1, |t, x| Ok::<_, String>(remark2_u(t, x[0])), 4, &rs, &[0.5]).unwrap();
        assert!(log.rows.windows(2).all(|w| w[1].value < w[0].value));
        let bound = 0.25 / (4.0 * 1e8f64.ln()) / 0.5f64.powi(4);
        assert!((log.rows[3].value - bound).abs() < 1e-12);
    }
}
