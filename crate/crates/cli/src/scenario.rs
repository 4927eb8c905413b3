//! Scenario orchestration.

use std::path::{Path, PathBuf};
use std::time::Instant;

use blowup_core::diagnostics::{ss_representation, stability_verdict};
use blowup_core::evolve::{run_to_blowup, Adaptation, RunOutput};
use blowup_core::exact::{fundamental_length, semi_width, zk_multibump};
use blowup_core::medium::RegimeKind;
use blowup_core::selfsim::{convergence_study, solve_profile, CanmOptions};
use blowup_core::{classify, solution_count, ElementKind, GridFunction, Mesh1D, SelfSimilarSolution};
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, Initial, Scenario};
use crate::error::CliError;
use crate::output::{fmt_f64, Outputs, Summary, SummaryParams, CONVERGENCE_HEADER};

/// Where a finished run left its summary, and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub summary: PathBuf,
    pub exit_code: i32,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    out: Outputs,
    errors: Vec<String>,
    timings: Map<String, Value>,
}

impl Context<'_> {
    fn timed<R>(&mut self, label: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let start = Instant::now();
        let r = f(self);
        self.timings
            .insert(label.to_string(), json!(start.elapsed().as_secs_f64()));
        r
    }

    fn dir(&self) -> &Path {
        &self.cfg.output
    }

    fn mesh(&self, kind: ElementKind) -> Result<Mesh1D, CliError> {
        Mesh1D::uniform(self.cfg.length, self.cfg.elements, kind)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    fn profile(&mut self, k: usize, mesh: &Mesh1D) -> Option<SelfSimilarSolution> {
        match solve_profile(&self.cfg.params, k, mesh, &CanmOptions::default()) {
            Ok(s) => Some(s),
            Err(e) => {
                self.errors.push(format!("profile k = {k}: {e}"));
                None
            }
        }
    }
}

/// Runs one validated experiment and writes its outputs and summary.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let mut ctx = Context {
        cfg,
        out: Outputs::default(),
        errors: Vec::new(),
        timings: Map::new(),
    };
    let results = match cfg.scenario {
        Scenario::Classify => classify_results(cfg),
        Scenario::Selfsim => ctx.timed("selfsim", selfsim)?,
        Scenario::Evolve => ctx.timed("evolve", evolve)?,
        Scenario::Stability => ctx.timed("stability", stability)?,
        Scenario::Convergence => ctx.timed("convergence", convergence)?,
    };
    ctx.out.validate()?;
    let p = &cfg.params;
    let summary = Summary {
        scenario: cfg.scenario.as_str().to_string(),
        status: if ctx.errors.is_empty() { "ok" } else { "solver_failure" },
        params: SummaryParams {
            sigma: p.sigma,
            beta: p.beta,
            dim: p.dim,
            t0: p.t0,
        },
        regime: classify(p).kind.to_string(),
        results,
        outputs: ctx
            .out
            .paths()
            .map(|f| f.strip_prefix(ctx.dir()).unwrap_or(f).display().to_string())
            .collect(),
        errors: ctx.errors.clone(),
        timings_seconds: ctx.timings,
    };
    let path = summary.write(&cfg.output)?;
    Ok(RunReport {
        summary: path,
        exit_code: if ctx.errors.is_empty() { 0 } else { 2 },
    })
}

fn classify_results(cfg: &ExperimentConfig) -> Value {
    let p = &cfg.params;
    let r = classify(p);
    let mut v = json!({
        "regime": r.kind.as_str(),
        "m": p.m(),
        "theta_h": p.theta_h(),
        "beta_fujita": p.beta_fujita(),
        "beta_sobolev": p.beta_sobolev(),
        "beta_u": p.beta_u(),
        "beta_p": p.beta_p(),
        "beyond_sobolev": r.beyond_sobolev,
        "beyond_u": r.beyond_u,
        "beyond_p": r.beyond_p,
    });
    if let Ok(c) = solution_count(p) {
        v["solution_count"] = json!({ "a": c.a, "K": c.lower_bound, "K_refined": c.refined });
    }
    if r.kind == RegimeKind::S {
        v["fundamental_length"] = json!(fundamental_length(p.sigma));
        v["semi_width"] = json!(semi_width(p.sigma));
    }
    v
}

fn solution_json(s: &SelfSimilarSolution) -> Value {
    json!({
        "k": s.k,
        "iterations": s.iterations,
        "residual": s.residual_norm,
        "theta0": s.theta[0],
        "amplitude": s.amplitude(),
        "crossings": s.crossings(),
        "support_edge": s.support_edge(1e-3 * s.amplitude()),
    })
}

fn selfsim(ctx: &mut Context) -> Result<Value, CliError> {
    let mesh = ctx.mesh(ctx.cfg.element_kind)?;
    let x = mesh.dof_coords();
    let mut profiles = Vec::new();
    for &k in &ctx.cfg.ks {
        let start = Instant::now();
        if let Some(s) = ctx.profile(k, &mesh) {
            let path = ctx.dir().join(format!("profile_k{k}.csv"));
            ctx.out.profile(&path, &x, &s.theta)?;
            let mut v = solution_json(&s);
            v["seconds"] = json!(start.elapsed().as_secs_f64());
            profiles.push(v);
        }
    }
    Ok(json!({ "profiles": profiles }))
}

/// Initial data and reference profile of an evolution run.
fn initial_data(ctx: &mut Context, mesh: &Mesh1D) -> Result<Option<(Vec<f64>, GridFunction)>, CliError> {
    let x = mesh.dof_coords();
    let k = ctx.cfg.ks[0];
    let (u, reference, name) = match ctx.cfg.initial {
        Initial::Exact => {
            let p = ctx.cfg.params;
            let u: Vec<f64> = x.iter().map(|&xi| p.theta_h() * zk_multibump(p.sigma, k, xi)).collect();
            (u.clone(), GridFunction::new(x.clone(), u), "initial.csv".to_string())
        }
        Initial::Profile => match ctx.profile(k, mesh) {
            Some(s) => (s.theta.clone(), s.profile(), format!("profile_k{k}.csv")),
            None => return Ok(None),
        },
    };
    ctx.out.profile(&ctx.dir().join(name), &x, &u)?;
    Ok(Some((u, reference)))
}

fn run_json(out: &RunOutput<f64>, expected_t0: f64) -> Value {
    let doublings = out.adaptations.iter().filter(|a| a.kind == Adaptation::Doubled).count();
    let refinements = out.adaptations.len() - doublings;
    let last = out.series.last();
    json!({
        "stop": out.estimate.stop.as_str(),
        "t_stop": out.estimate.t_stop,
        "fit_t0": out.estimate.fit_t0,
        "expected_t0": expected_t0,
        "exponent_fit": out.estimate.exponent_fit,
        "final_u_max": out.final_state.u_max(),
        "final_gamma": last.map(|r| r.gamma),
        "final_semi_width": last.map(|r| r.semi_width),
        "final_front": last.map(|r| r.front),
        "support_estimate": last.map(|r| r.front),
        "final_nodes": out.final_state.mesh.n_dofs(),
        "steps": out.steps,
        "rejections": out.rejections,
        "refinements": refinements,
        "doublings": doublings,
        "mesh_law_excess": out.mesh_law_excess,
        "min_value": out.min_value,
    })
}

/// Series, snapshots and representations of one run in `dir`.
fn write_run(
    ctx: &mut Context,
    dir: &Path,
    out: &RunOutput<f64>,
    reference: &GridFunction,
) -> Result<(), CliError> {
    ctx.out.series(&dir.join("series.csv"), &out.series.records)?;
    for (i, s) in out.snapshots.iter().enumerate() {
        ctx.out
            .snapshot(&dir.join(format!("snapshot_{i}.csv")), &s.profile.xi, &s.profile.values)?;
        let rep = ss_representation(&s.profile.xi, &s.profile.values, reference, &ctx.cfg.params);
        ctx.out
            .profile(&dir.join(format!("representation_{i}.csv")), &rep.xi, &rep.values)?;
    }
    Ok(())
}

fn snapshot_json(out: &RunOutput<f64>) -> Value {
    out.snapshots
        .iter()
        .enumerate()
        .map(|(i, s)| json!({ "index": i, "t": s.t, "gamma": s.gamma }))
        .collect()
}

fn evolve(ctx: &mut Context) -> Result<Value, CliError> {
    let mesh = ctx.mesh(ElementKind::Linear)?;
    let Some((u0, reference)) = initial_data(ctx, &mesh)? else {
        return Ok(json!({}));
    };
    let p = ctx.cfg.params;
    let run = run_to_blowup(&p, &mesh, &u0, &ctx.cfg.evolve, Some(&reference));
    let out = match run {
        Ok(o) => o,
        Err(e) => {
            ctx.errors.push(format!("evolution: {e}"));
            return Ok(json!({}));
        }
    };
    let dir = ctx.dir().to_path_buf();
    write_run(ctx, &dir, &out, &reference)?;
    let mut v = run_json(&out, p.t0);
    v["snapshots"] = snapshot_json(&out);
    v["verdict"] = verdict_json(ctx, &out);
    Ok(v)
}

fn verdict_json(ctx: &Context, out: &RunOutput<f64>) -> Value {
    match stability_verdict(&out.series, &ctx.cfg.thresholds) {
        Ok(v) => json!({
            "kind": v.kind.as_str(),
            "hold_until_gamma": v.hold_until_gamma,
            "final_deviation": v.final_deviation,
            "epsilon": ctx.cfg.thresholds.epsilon,
            "gamma_hold": ctx.cfg.thresholds.gamma_hold,
            "note": "gamma_hold is a proxy for the metastability time scale",
        }),
        Err(e) => json!({ "kind": "undetermined", "reason": e.to_string() }),
    }
}

fn stability(ctx: &mut Context) -> Result<Value, CliError> {
    let mesh = ctx.mesh(ElementKind::Linear)?;
    let k = ctx.cfg.ks[0];
    let Some(sol) = ctx.profile(k, &mesh) else {
        return Ok(json!({}));
    };
    let x = mesh.dof_coords();
    ctx.out.profile(&ctx.dir().join(format!("profile_k{k}.csv")), &x, &sol.theta)?;
    let reference = sol.profile();
    let mut cases: Vec<(String, Value, Vec<f64>)> = ctx
        .cfg
        .factors
        .iter()
        .map(|&f| {
            (
                format!("factor_{}", fmt_f64(f)),
                json!({ "factor": f }),
                sol.theta.iter().map(|v| f * v).collect(),
            )
        })
        .collect();
    if ctx.cfg.widen > 0.0 {
        let w = 1.0 + ctx.cfg.widen;
        let mut u: Vec<f64> = x.iter().map(|&xi| reference.eval(xi / w)).collect();
        *u.last_mut().expect("nonempty mesh") = 0.0;
        cases.push((format!("widen_{}", fmt_f64(ctx.cfg.widen)), json!({ "widen": ctx.cfg.widen }), u));
    }
    let p = ctx.cfg.params;
    let mut runs = Vec::new();
    for (label, perturbation, u0) in cases {
        let start = Instant::now();
        let out = match run_to_blowup(&p, &mesh, &u0, &ctx.cfg.evolve, Some(&reference)) {
            Ok(o) => o,
            Err(e) => {
                ctx.errors.push(format!("{label}: {e}"));
                continue;
            }
        };
        let dir = ctx.dir().join(&label);
        write_run(ctx, &dir, &out, &reference)?;
        let mut v = run_json(&out, p.t0);
        v["label"] = json!(label);
        v["perturbation"] = perturbation;
        v["snapshots"] = snapshot_json(&out);
        v["verdict"] = verdict_json(ctx, &out);
        v["seconds"] = json!(start.elapsed().as_secs_f64());
        runs.push(v);
    }
    Ok(json!({ "reference": solution_json(&sol), "runs": runs }))
}

fn convergence(ctx: &mut Context) -> Result<Value, CliError> {
    let cfg = ctx.cfg;
    let k = cfg.ks[0];
    let meshes = (0..cfg.levels)
        .map(|i| Mesh1D::uniform(cfg.length, cfg.elements << i, cfg.element_kind))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let Some(coarse) = ctx.profile(k, &meshes[0]) else {
        return Ok(json!({}));
    };
    let start = coarse.profile();
    let p = cfg.params;
    let exact_available = p.is_s_regime() && p.dim == 1;
    let th = p.theta_h();
    let exact = move |x: f64| th * zk_multibump(p.sigma, k, x);
    let opts = CanmOptions {
        tolerance: 1e-11,
        ..CanmOptions::default()
    };
    let guess = |m: &Mesh1D| m.dof_coords().iter().map(|&x| start.eval(x)).collect();
    let exact_ref: Option<&dyn Fn(f64) -> f64> = if exact_available { Some(&exact) } else { None };
    let study = match convergence_study(&p, k, &meshes, guess, exact_ref, &opts) {
        Ok(s) => s,
        Err(e) => {
            ctx.errors.push(format!("convergence study: {e}"));
            return Ok(json!({}));
        }
    };
    let rows = study
        .h
        .iter()
        .zip(&study.errors)
        .zip(&study.interior_errors)
        .map(|((&h, &e), &i)| vec![fmt_f64(h), fmt_f64(e), fmt_f64(i)]);
    ctx.out
        .write(&ctx.dir().join("convergence.csv"), CONVERGENCE_HEADER, rows)?;
    Ok(json!({
        "k": k,
        "element_kind": cfg.element_kind.as_str(),
        "reference": if exact_available { "exact" } else { "finest mesh" },
        "orders": study.orders,
        "interior_orders": study.interior_orders,
        "conclusive": study.conclusive,
        "iterations": study.iterations,
    }))
}
