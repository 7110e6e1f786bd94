use std::path::Path;

use fuchsian_core::certificate::{
    choose_params, evaluate_grid, BarrierReport, CertError, Check, Grid, ParamOptions, PhiFamily, Witness,
};
use fuchsian_core::characteristics::closed_forms::{remark2_residual, remark2_u, remark3_residual};
use fuchsian_core::characteristics::{decay_profile, DecayProfile};
use fuchsian_core::equation::{applicability, char_exponents, h_exact, CharData, FuchsianEquation, InvalidEquation};
use fuchsian_core::num::fmt_coeff;
use fuchsian_core::pipeline::{certify as run_certify, Certification, CertifyOptions, PipelineError};
use fuchsian_core::sampling::random_candidate;
use fuchsian_core::series::SeriesTX;
use fuchsian_core::solver::{residual, solve_with, SolveError, SolveOptions};
use num_complex::Complex;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thiserror::Error;

use crate::report::{check, digest, float, floats, fmt17, Obj, Report};
use crate::spec::{read_file, EquationSpec, InputError, SeriesSpec};

pub const REMARK2_JSON: &str = include_str!("../data/remark2.json");
pub const REMARK3_JSON: &str = include_str!("../data/remark3.json");

/// Failures that are the caller's fault; exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

fn parse_equation(text: &str) -> Result<(String, EquationSpec), CliError> {
    Ok((digest(text.as_bytes()), EquationSpec::parse(text)?))
}

fn violations_report(command: &str, dg: String, err: &InvalidEquation) -> Report {
    let list: Vec<Value> = err
        .0
        .iter()
        .map(|v| Obj::new().set("kind", v.kind()).set("detail", v.to_string()).into())
        .collect();
    let results = Obj::new().set("violations", Value::Array(list));
    Report::new(command, dg, results.into(), vec![check("assumptions", false, err.to_string())])
}

fn exponents_json(cd: &CharData) -> Value {
    let exact = cd.exact_roots.as_ref();
    Value::Array(
        cd.roots
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let o = Obj::new().f("re", r.re).f("im", r.im);
                match exact {
                    Some(ex) => o.set("exact", fmt_coeff(&ex[i])),
                    None => o.set("exact", Value::Null),
                }
                .into()
            })
            .collect(),
    )
}

fn char_json(cd: &CharData, depth: u32) -> (Value, bool) {
    let app = applicability(cd, depth);
    let h = h_exact(cd).map(|q| Value::String(q.to_string())).unwrap_or(Value::Null);
    let v = Obj::new()
        .set("exponents", exponents_json(cd))
        .set("theorem1_ok", app.theorem1_ok)
        .set("indicial_zero_at", app.indicial_zero_at.map(Value::from).unwrap_or(Value::Null))
        .set("theorem2_ok", app.theorem2_ok)
        .set("h", app.h.map(float).unwrap_or(Value::Null))
        .set("h_exact", h)
        .set("warnings", app.warnings.clone());
    (v.into(), app.theorem1_ok)
}

pub fn check_cmd(path: &str, depth: u32) -> Result<Report, CliError> {
    check_text(&read_file(path)?, depth)
}

pub fn check_text(text: &str, depth: u32) -> Result<Report, CliError> {
    let (dg, spec) = parse_equation(text)?;
    let eq = match spec.to_equation()? {
        Ok(eq) => eq,
        Err(e) => return Ok(violations_report("check", dg, &e)),
    };
    let cd = char_exponents(&eq);
    let (results, t1) = char_json(&cd, depth);
    let checks = vec![
        check("assumptions", true, "A1-A3 hold"),
        check("indicial_nonvanishing", t1, format!("P_k(0) != 0 for k = 1..={depth}")),
    ];
    Ok(Report::new("check", dg, Obj::new().set("m", eq.m()).set("n", eq.n()).set("characteristic", results).into(), checks))
}

fn solve_error(command: &str, dg: String, e: SolveError) -> Result<Report, CliError> {
    match e {
        SolveError::TruncationExhausted(msg) => Err(CliError::Usage(format!("truncation too small: {msg}"))),
        other => {
            let results = Obj::new().set("error", other.to_string());
            Ok(Report::new(command, dg, results.into(), vec![check("solve", false, other.to_string())]))
        }
    }
}

pub fn solve_cmd(path: &str, order: u32, out: Option<&Path>) -> Result<Report, CliError> {
    let (report, dump) = solve_text(&read_file(path)?, order)?;
    if let (Some(p), Some(dump)) = (out, dump) {
        let text = serde_json::to_string_pretty(&dump).expect("serializable") + "\n";
        std::fs::write(p, text).map_err(|e| CliError::Output(e.to_string()))?;
    }
    Ok(report)
}

/// The report and, when solving succeeded, the series dump of `u₀`.
pub fn solve_text(text: &str, order: u32) -> Result<(Report, Option<SeriesSpec>), CliError> {
    let (dg, spec) = parse_equation(text)?;
    let eq = match spec.to_equation()? {
        Ok(eq) => eq,
        Err(e) => return Ok((violations_report("solve", dg, &e), None)),
    };
    let cd = char_exponents(&eq);
    let sol = match solve_with(&eq, &cd, SolveOptions::order(order)) {
        Ok(s) => s,
        Err(e) => return solve_error("solve", dg, e).map(|r| (r, None)),
    };
    let res = residual(&eq, &sol.u0, order).map_err(|e| CliError::Usage(e.to_string()))?;
    let dump = SeriesSpec::from_series(&sol.u0);
    let indicial: Vec<String> = (1..=order).map(|k| fmt_coeff(&cd.indicial_at_origin(k))).collect();
    let results = Obj::new()
        .set("order", sol.order)
        .set("x_order", sol.x_order)
        .set("u0", serde_json::to_value(&dump).expect("serializable"))
        .set("u0_display", sol.u0.to_string())
        .set("indicial_at_origin", indicial)
        .set("residual_caps", vec![res.cap_t(), res.cap_x()]);
    let checks = vec![check("residual_exact_zero", res.is_zero(), format!("through t^{order}"))];
    Ok((Report::new("solve", dg, results.into(), checks), Some(dump)))
}

#[derive(Debug, Clone)]
pub struct CertifyArgs {
    pub w: Option<String>,
    pub w_random: bool,
    pub seed: u64,
    pub order: u32,
    pub grid: usize,
    pub tfloor: f64,
    pub tol: f64,
    pub kappa: Option<f64>,
    pub eps00: Option<f64>,
    pub out: Option<String>,
}

impl Default for CertifyArgs {
    fn default() -> Self {
        CertifyArgs {
            w: None,
            w_random: false,
            seed: 0,
            order: 4,
            grid: 50,
            tfloor: 1e-6,
            tol: 1e-10,
            kappa: None,
            eps00: None,
            out: None,
        }
    }
}

fn witness_json(w: &Option<Witness>) -> Value {
    match w {
        None => Value::Null,
        Some(w) => Obj::new().f("t", w.t).f("rho", w.rho).set("label", w.label).f("lhs", w.lhs).f("rhs", w.rhs).into(),
    }
}

fn barrier_check(c: &Check) -> Value {
    let detail = Obj::new()
        .set("evaluated", c.evaluated)
        .set("violations", c.violations)
        .f("max_excess", c.max_excess)
        .f("max_ratio", c.max_ratio)
        .set("worst", witness_json(&c.worst));
    check(c.name, c.passed(), detail)
}

fn barrier_json(b: &BarrierReport) -> Value {
    let p = b.params;
    let c = &b.constants;
    Obj::new()
        .set(
            "params",
            Obj::new()
                .f("h", p.h)
                .f("eps00", p.eps00)
                .f("eps01", p.eps01)
                .f("eps10", 1.0)
                .f("eps11", p.eps11)
                .f("kappa", p.kappa)
                .f("sigma0", p.sigma0)
                .f("R0", p.r0),
        )
        .set("grid", b.grid)
        .f("max_A", b.max_a)
        .f("max_q", b.max_q)
        .set(
            "constants",
            Obj::new()
                .f("K1", c.k1)
                .f("K2", c.k2)
                .f("K3", c.k3)
                .set("C", floats(&c.c))
                .f("L", c.l)
                .set("H", floats(&c.h_beta))
                .set("B_linear", floats(&c.b_linear)),
        )
        .into()
}

fn certification_json(cert: &Certification, w: &SeriesTX) -> (Value, Vec<Value>) {
    let dec = &cert.decomposition;
    let reconstructs = dec.reconstruct() == dec.theta_form;
    let mut checks = vec![check("reconstruction", reconstructs, "normal form recombines to H exactly")];
    checks.extend(cert.barrier.checks.iter().map(barrier_check));
    let phi_decay: Vec<Value> = cert
        .phi_decay
        .iter()
        .map(|row| {
            let ratios: Vec<Value> = row
                .ratios
                .iter()
                .map(|((i, j), v)| Obj::new().set("ij", format!("{i}{j}")).f("ratio", *v).into())
                .collect();
            Obj::new().f("sigma", row.sigma).f("R", row.r).set("ratios", ratios).into()
        })
        .collect();
    let mut results = Obj::new()
        .set("candidate", w.to_string())
        .set("exponents", exponents_json(&cert.char_data))
        .set("u0", cert.solution.u0.to_string())
        .set(
            "normal_form",
            Obj::new()
                .set("beta0", dec.beta0.to_string())
                .set("beta1", dec.beta1.to_string())
                .set("a_terms", dec.a.len())
                .set("b_terms", dec.b.len())
                .set("c_terms", dec.c.len()),
        )
        .set("barrier", barrier_json(&cert.barrier))
        .set("search", Obj::new().set("eps11_halvings", cert.search.eps11_halvings).set("box_halvings", cert.search.box_halvings))
        .set("decay_table", phi_decay);
    match &cert.path {
        None => {
            checks.push(check("characteristics", false, "skipped: barrier checks failed"));
        }
        Some(stage) => {
            let sb = &stage.small_box;
            let path = &stage.path;
            let l7 = &stage.monotonicity;
            let l8 = &stage.char_bounds;
            let c2 = &stage.extension;
            results.insert(
                "characteristics",
                Obj::new()
                    .set(
                        "small_box",
                        Obj::new().f("sigma", sb.sigma).f("R", sb.r_domain).f("r", sb.r_sup).f("lhs", sb.lhs).set("halvings", sb.halvings),
                    )
                    .f("t0", path.t0)
                    .f("xi", path.xi)
                    .f("t_floor", path.t_min_reached)
                    .set("status", path.status.label())
                    .set("samples", path.samples.len())
                    .f("rho_max", path.rho_max())
                    .f("relative_decay_excess", stage.relative_decay_excess),
            );
            checks.push(check(
                "decay_monotonicity",
                l7.passed(),
                Obj::new()
                    .set("consecutive_violations", l7.consecutive_violations)
                    .set("pair_violations", l7.pair_violations)
                    .set("pairs_checked", l7.pairs_checked)
                    .f("max_relative_increase", l7.max_relative_increase),
            ));
            checks.push(check(
                "characteristic_bounds",
                l8.passed(),
                Obj::new()
                    .set("samples", l8.samples)
                    .set("left_violations", l8.left_violations)
                    .set("right_violations", l8.right_violations)
                    .f("min_right_margin", l8.min_right_margin),
            ));
            checks.push(check(
                "extension_to_floor",
                c2.passed(),
                Obj::new()
                    .set("status", c2.status)
                    .f("rho_max", c2.rho_max)
                    .f("R1", c2.r1)
                    .f("R", c2.r_domain)
                    .f("terminal_bound", c2.terminal_bound)
                    .f("q_at_t0", c2.q_at_t0),
            ));
        }
    }
    (results.into(), checks)
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_path(path).map_err(|e| CliError::Output(e.to_string()))?;
    wtr.write_record(header).map_err(|e| CliError::Output(e.to_string()))?;
    for row in rows {
        wtr.write_record(row.iter().map(|&x| fmt17(x))).map_err(|e| CliError::Output(e.to_string()))?;
    }
    wtr.flush().map_err(|e| CliError::Output(e.to_string()))
}

fn dump_certification(dir: &Path, cert: &Certification) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(e.to_string()))?;
    let model = &cert.search.model;
    let grid = Grid::for_params(&model.params, cert.barrier.grid);
    let evals = evaluate_grid(model, &grid);
    write_csv(
        &dir.join("grid.csv"),
        &["t", "rho", "q", "d_rho_q", "euler_q", "A", "B"],
        evals.iter().map(|e| vec![e.t, e.rho, e.q, e.dq, e.euler_q, e.a, e.b]),
    )?;
    if let Some(stage) = &cert.path {
        let h = model.params.h;
        write_csv(
            &dir.join("path.csv"),
            &["t", "rho", "q_star", "t_h_q_star"],
            stage.path.samples.iter().map(|s| vec![s.t, s.rho, s.q, s.t.powf(h) * s.q]),
        )?;
    }
    Ok(())
}

fn pipeline_failure(dg: String, stage: &str, e: &PipelineError) -> Report {
    let kind = match e {
        PipelineError::Cert(CertError::HypothesisViolated(_)) => "HypothesisViolated",
        PipelineError::Cert(CertError::SearchExhausted(_)) => "SearchExhausted",
        PipelineError::Cert(_) => "CertificateError",
        PipelineError::Solve(_) => "SolveError",
        PipelineError::Char(_) => "CharacteristicsError",
    };
    let results = Obj::new().set("stage", stage).set("error", kind).set("message", e.to_string());
    Report::new("certify", dg, results.into(), vec![check(kind, false, e.to_string())])
}

pub fn certify_cmd(path: &str, args: &CertifyArgs) -> Result<Report, CliError> {
    let w_text = match &args.w {
        Some(p) => Some(read_file(p)?),
        None => None,
    };
    let (report, cert) = certify_text(&read_file(path)?, w_text.as_deref(), args)?;
    if let (Some(dir), Some(cert)) = (&args.out, cert) {
        dump_certification(Path::new(dir), &cert)?;
    }
    Ok(report)
}

/// `w_text` is the candidate series JSON; `None` draws it from `args.seed`
/// when `args.w_random` is set.
pub fn certify_text(
    eq_text: &str,
    w_text: Option<&str>,
    args: &CertifyArgs,
) -> Result<(Report, Option<Certification>), CliError> {
    let (eq_digest, spec) = parse_equation(eq_text)?;
    let eq = match spec.to_equation()? {
        Ok(eq) => eq,
        Err(e) => return Ok((violations_report("certify", eq_digest, &e), None)),
    };
    let (w, w_digest) = match (w_text, args.w_random) {
        (Some(text), false) => (SeriesSpec::parse(text)?.to_series()?, digest(text.as_bytes())),
        (None, true) => {
            let w = random_candidate(&mut ChaCha8Rng::seed_from_u64(args.seed), 8, 8);
            (w, digest(format!("random:{}", args.seed).as_bytes()))
        }
        _ => return Err(CliError::Usage("certify needs exactly one of --w FILE or --w-random".into())),
    };
    if w.dim() != eq.n() {
        return Err(CliError::Usage(format!("candidate has n = {}, equation has n = {}", w.dim(), eq.n())));
    }
    let dg = digest(format!("{eq_digest}:{w_digest}").as_bytes());
    let opts = CertifyOptions {
        order: args.order,
        grid: args.grid,
        tfloor: args.tfloor,
        tol: args.tol,
        params: ParamOptions { grid: args.grid, kappa: args.kappa, ..Default::default() },
        eps00_override: args.eps00,
    };
    let cert = match run_certify(&eq, &w, &opts) {
        Ok(c) => c,
        Err(PipelineError::Solve(SolveError::TruncationExhausted(m))) => {
            return Err(CliError::Usage(format!("truncation too small: {m}")))
        }
        Err(e @ PipelineError::Cert(CertError::HypothesisViolated(_))) => {
            return Ok((pipeline_failure(dg, "choose_params", &e), None));
        }
        Err(e) => return Ok((pipeline_failure(dg, "pipeline", &e), None)),
    };
    let (results, checks) = certification_json(&cert, &w);
    Ok((Report::new("certify", dg, results, checks), Some(cert)))
}

fn profile_json(p: &DecayProfile) -> Value {
    let rows: Vec<Value> = p.rows.iter().map(|r| Obj::new().f("r", r.r).f("R", r.big_r).f("value", r.value).into()).collect();
    let inner: Vec<Value> = p.inner.iter().map(|(r, v)| Obj::new().f("R", *r).f("inner", *v).into()).collect();
    Obj::new().set("exponent", p.exponent).set("rows", rows).set("inner", inner).f("outer", p.outer).into()
}

const R_LIST: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const BIG_R_LIST: [f64; 4] = [0.5, 0.25, 0.125, 0.0625];

fn remark3_example(p: i32) -> Result<Report, CliError> {
    let eq = EquationSpec::parse(REMARK3_JSON)?.to_equation()?.map_err(|e| CliError::Usage(e.to_string()))?;
    let cd = char_exponents(&eq);
    let exact: Vec<String> = cd.exact_roots.iter().flatten().map(fmt_coeff).collect();
    let res = remark3_residual(&eq).map_err(|e| CliError::Usage(e.to_string()))?;
    let prof = decay_profile(1, |_, x: &[Complex<f64>]| Ok::<_, String>(x[0].powi(4) / 72.0), p, &R_LIST, &BIG_R_LIST)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let max_dev = prof.rows.iter().map(|r| (r.value - 1.0 / 72.0).abs()).fold(0.0, f64::max);
    let checks = vec![
        check("exponents", exact == ["-2", "-1"], Value::from(exact.clone())),
        check("residual_exact_zero", res.is_zero(), "u = x^4/72"),
        check("decay_constant", p == 4 && max_dev <= 1e-12, Obj::new().f("expected", 1.0 / 72.0).f("max_deviation", max_dev)),
    ];
    let results = Obj::new().set("exponents", exponents_json(&cd)).set("solution", "x^4/72").set("decay_profile", profile_json(&prof));
    Ok(Report::new("verify-example", digest(REMARK3_JSON.as_bytes()), results.into(), checks))
}

fn remark2_example(p: i32) -> Result<Report, CliError> {
    let eq = EquationSpec::parse(REMARK2_JSON)?.to_equation()?.map_err(|e| CliError::Usage(e.to_string()))?;
    let cd = char_exponents(&eq);
    let exact: Vec<String> = cd.exact_roots.iter().flatten().map(fmt_coeff).collect();
    // 40 log-spaced |t| in [1e-6, 1/e] by 25 real x in [-1/2, 1/2]
    let (lo, hi) = ((1e-6f64).ln(), -1.0f64);
    let mut max_res = 0.0f64;
    let mut points = 0;
    for i in 0..40 {
        let t = (lo + (hi - lo) * i as f64 / 39.0).exp();
        for j in 0..25 {
            let x = -0.5 + j as f64 / 24.0;
            max_res = max_res.max(remark2_residual(&eq, t, Complex::new(x, 0.0)).norm());
            points += 1;
        }
    }
    let r_list = [(-1.0f64).exp(), 1e-2, 1e-4, 1e-8];
    let prof = decay_profile(1, |t, x: &[Complex<f64>]| Ok::<_, String>(remark2_u(t, x[0])), p, &r_list, &BIG_R_LIST)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let decreasing = BIG_R_LIST.iter().all(|&big_r| {
        let vals: Vec<f64> = prof.rows.iter().filter(|r| r.big_r == big_r).map(|r| r.value).collect();
        vals.windows(2).all(|w| w[1] < w[0])
    });
    let dec_err = match choose_params(&cd, &dummy_decomposition(&eq, &cd)?, &PhiFamily::default(), ParamOptions::default()) {
        Err(CertError::HypothesisViolated(m)) => Some(m),
        _ => None,
    };
    let checks = vec![
        check("exponents", exact == ["-1", "0"], Value::from(exact.clone())),
        check("residual", max_res < 1e-10, Obj::new().set("points", points).f("max_abs", max_res)),
        check("decay_inner_limits_decrease", decreasing, "sup|u|/R^p shrinks as r -> 0 for each R"),
        check(
            "choose_params_rejects",
            dec_err.is_some(),
            dec_err.clone().map(Value::from).unwrap_or(Value::String("accepted".into())),
        ),
    ];
    let results = Obj::new()
        .set("exponents", exponents_json(&cd))
        .set("solution", "-x^2/(4 log t)")
        .set("decay_profile", profile_json(&prof));
    Ok(Report::new("verify-example", digest(REMARK2_JSON.as_bytes()), results.into(), checks))
}

fn dummy_decomposition(
    eq: &FuchsianEquation,
    cd: &CharData,
) -> Result<fuchsian_core::certificate::HDecomposition, CliError> {
    use fuchsian_core::certificate::{build_h, theta_normal_form};
    let (ct, cx, _) = eq.f().caps();
    let h = build_h(eq, &SeriesTX::zero(eq.n(), ct, cx)).map_err(|e| CliError::Usage(e.to_string()))?;
    theta_normal_form(&h, cd).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn verify_example_cmd(name: &str, p: i32) -> Result<Report, CliError> {
    match name {
        "remark2" => remark2_example(p),
        "remark3" => remark3_example(p),
        other => Err(CliError::Usage(format!("unknown example {other:?}; expected remark2 or remark3"))),
    }
}
