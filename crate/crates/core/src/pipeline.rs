//! End-to-end certification of one candidate `w` against one equation.

use thiserror::Error;

use crate::certificate::{
    build_h, choose_params, phi_decay_table, phi_family, require_h, theta_normal_form, verify_barrier, BarrierReport,
    CertError, HDecomposition, PhiDecayRow, ParamOptions, ParamSearch, PhiFamily,
};
use crate::characteristics::{
    check_corollary2, check_lemma7, check_lemma8, integrate, small_box, CharError, CharacteristicPath,
    ExtensionReport, MonotonicityReport, CharBoundsReport, PathOptions, SmallBox,
};
use crate::equation::{char_exponents, CharData, FuchsianEquation};
use crate::series::SeriesTX;
use crate::solver::{solve_with, FormalSolution, SolveError, SolveOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Char(#[from] CharError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// `t`-order of the formal solution `u₀`.
    pub order: u32,
    pub grid: usize,
    /// `t_floor = tfloor·t₀`.
    pub tfloor: f64,
    pub tol: f64,
    pub params: ParamOptions,
    /// Replaces `ε₀₀` after the search; used to demonstrate failing checks.
    pub eps00_override: Option<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { order: 4, grid: 50, tfloor: 1e-6, tol: 1e-10, params: ParamOptions::default(), eps00_override: None }
    }
}

/// The path bounds need the fitted constants and the small box; they are
/// skipped when the barrier checks already failed.
#[derive(Debug, Clone)]
pub struct PathStage {
    pub small_box: SmallBox,
    pub path: CharacteristicPath,
    pub monotonicity: MonotonicityReport,
    pub char_bounds: CharBoundsReport,
    pub extension: ExtensionReport,
    /// Largest `((t∂t + h)q − B∂ρq)/(B∂ρq)` over path samples with
    /// `B∂ρq > 0`. Positive values mean `(t∂t + h)q ≤ B∂ρq` fails in relative terms
    /// off the verification grid; reported, not gated.
    pub relative_decay_excess: f64,
}

impl PathStage {
    pub fn passed(&self) -> bool {
        self.monotonicity.passed() && self.char_bounds.passed() && self.extension.passed()
    }
}

#[derive(Debug, Clone)]
pub struct Certification {
    pub char_data: CharData,
    pub solution: FormalSolution,
    pub decomposition: HDecomposition,
    pub phis: PhiFamily,
    pub search: ParamSearch,
    pub barrier: BarrierReport,
    pub phi_decay: Vec<PhiDecayRow>,
    pub path: Option<PathStage>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.barrier.passed() && self.path.as_ref().is_some_and(PathStage::passed)
    }
}

pub fn certify(eq: &FuchsianEquation, w: &SeriesTX, opts: &CertifyOptions) -> Result<Certification, PipelineError> {
    let cd = char_exponents(eq);
    let solution = solve_with(eq, &cd, SolveOptions::order(opts.order))?;
    let h_series = build_h(eq, &solution.u0)?;
    let dec = theta_normal_form(&h_series, &cd)?;
    require_h(&cd)?;
    let phis = phi_family(w, &cd)?;
    let mut search = choose_params(&cd, &dec, &phis, opts.params)?;
    if let Some(e) = opts.eps00_override {
        search.params.eps00 = e;
        search.model = search.model.with_params(search.params, &dec);
    }
    let barrier = verify_barrier(&search.model, opts.grid);
    let p = search.params;
    let boxes: Vec<(f64, f64)> = (0..4).map(|k| (p.sigma0 * 0.1f64.powi(k), p.r0 * 0.5f64.powi(k))).collect();
    let phi_decay = phi_decay_table(&phis, &boxes);

    let path = if barrier.passed() {
        let sb = small_box(&search.model, &barrier.constants, opts.grid, 1000)?;
        let model = &search.model;
        let mut po = PathOptions::new(sb.sigma, sb.r_domain / 4.0, sb.r_domain);
        po.t_floor = opts.tfloor * sb.sigma;
        po.tol = opts.tol;
        let path = integrate(|t, r| model.b(t, r), |t, r| model.q(t, r), po)?;
        let c = &barrier.constants.c;
        let monotonicity = check_lemma7(&path, p.h);
        let char_bounds = check_lemma8(&path, c, p.kappa, p.h, sb.r_sup);
        let extension = check_corollary2(&path, c, p.kappa, p.h, sb.r_sup)?;
        let relative_decay_excess = path
            .samples
            .iter()
            .map(|s| model.eval(s.t, s.rho))
            .filter(|e| e.b * e.dq > 0.0)
            .map(|e| (e.euler_q + p.h * e.q - e.b * e.dq) / (e.b * e.dq))
            .fold(f64::NEG_INFINITY, f64::max);
        Some(PathStage { small_box: sb, path, monotonicity, char_bounds, extension, relative_decay_excess })
    } else {
        None
    };
    Ok(Certification { char_data: cd, solution, decomposition: dec, phis, search, barrier, phi_decay, path })
}
