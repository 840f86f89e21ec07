use std::path::Path;

use anyhow::{bail, Context, Result};
use perimetry_core::boolean::{hprime_check, BooleanModelSpec, BooleanSampling};
use perimetry_core::checks::{run_suite, Level};
use perimetry_core::dilation::{
    counterexample, covariogram_derivative, derivative_report, dilation_rhs, qvariation, CounterexampleConfig, ExcessMethod, RSchedule,
    SamplerConfig,
};
use perimetry_core::geom::{circumradius, inradius_in_span, span_basis, sphere_quadrature};
use perimetry_core::{Estimate, Shape, StructuringElement, Vector};
use serde_json::{json, Value};

use crate::config::{CommandKind, ExperimentConfig, MethodName, Points};
use crate::output::Table;
use crate::Invalid;

const BALL_ATOMS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A result whose precision could not be established (exit 3).
    Flagged,
    /// A suite with failed invariants (exit 1).
    Failed,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Flagged => "flagged",
            Status::Failed => "failed",
        }
    }
}

pub struct Outcome {
    pub table: Table,
    pub result: Value,
    pub status: Status,
    /// Human-readable lines for stdout, if the command has them.
    pub lines: Vec<String>,
}

/// Input files read by a command, parsed, so the run record and the config
/// hash cover their contents.
pub struct Inputs {
    pub doc: Value,
    shape: Option<Shape>,
    spec: Option<BooleanModelSpec>,
}

/// Fills in defaults and checks that every key the command needs is set.
pub fn resolve(mut cfg: ExperimentConfig) -> Result<(ExperimentConfig, Inputs)> {
    let command = cfg.command.ok_or_else(|| Invalid("no command given".into()))?;
    cfg.seed.get_or_insert(0);
    let mut inputs = Inputs { doc: json!({}), shape: None, spec: None };
    let needs = |key: &str, present: bool| -> Result<()> {
        if present {
            Ok(())
        } else {
            Err(Invalid(format!("{command} needs `{key}`")).into())
        }
    };
    match command {
        CommandKind::Derivative | CommandKind::Covariogram | CommandKind::Qvariation => {
            let path = cfg.shape.clone().ok_or_else(|| Invalid(format!("{command} needs `shape`")))?;
            let (text, doc) = read_json(&path)?;
            inputs.shape = Some(Shape::from_json_str(&text).with_context(|| path.display().to_string())?);
            inputs.doc = json!({ "shape": doc });
            if command == CommandKind::Covariogram {
                needs("u", cfg.u.is_some())?;
            } else {
                needs("q", cfg.q.is_some())?;
            }
            if command != CommandKind::Qvariation {
                let d = RSchedule::default();
                cfg.ratio.get_or_insert(d.ratio);
                cfg.count.get_or_insert(d.count);
                let method = *cfg.method.get_or_insert(MethodName::Auto);
                if method == MethodName::Grid {
                    needs("h", cfg.h.is_some())?;
                }
                cfg.samples.get_or_insert(SamplerConfig::default().samples);
            }
        }
        CommandKind::Contact => {
            let path = cfg.spec.clone().ok_or_else(|| Invalid("contact needs `spec`".into()))?;
            let (text, doc) = read_json(&path)?;
            inputs.spec = Some(BooleanModelSpec::from_json_str(&text).with_context(|| path.display().to_string())?);
            inputs.doc = json!({ "spec": doc });
            needs("q", cfg.q.is_some())?;
            let d = BooleanSampling::default();
            cfg.realizations.get_or_insert(d.realizations);
            cfg.points.get_or_insert(d.points);
            cfg.shell_samples.get_or_insert(d.shell_samples);
        }
        CommandKind::Counterexample => {
            let d = CounterexampleConfig::default();
            cfg.m_max.get_or_insert(d.m_max);
            cfg.samples.get_or_insert(d.samples);
        }
        CommandKind::Suite => {
            cfg.level.get_or_insert(Level::Smoke);
            cfg.inject.get_or_insert_with(Vec::new);
        }
    }
    Ok((cfg.normalized()?, inputs))
}

fn read_json(path: &Path) -> Result<(String, Value)> {
    let text = std::fs::read_to_string(path).map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
    let doc = serde_json::from_str(&text).map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
    Ok((text, doc))
}

pub fn execute(cfg: &ExperimentConfig, inputs: &Inputs) -> Result<Outcome> {
    match cfg.command.expect("resolved") {
        CommandKind::Derivative => derivative(cfg, inputs.shape.as_ref().expect("resolved")),
        CommandKind::Covariogram => covariogram(cfg, inputs.shape.as_ref().expect("resolved")),
        CommandKind::Qvariation => qvar(cfg, inputs.shape.as_ref().expect("resolved")),
        CommandKind::Contact => contact(cfg, inputs.spec.as_ref().expect("resolved")),
        CommandKind::Counterexample => counter(cfg),
        CommandKind::Suite => suite(cfg),
    }
}

fn seed(cfg: &ExperimentConfig) -> u64 {
    cfg.seed.unwrap_or(0)
}

fn structuring_element(q: &Option<Points>) -> Result<StructuringElement> {
    let pts = q.as_ref().expect("resolved").to_list().map_err(Invalid)?;
    Ok(StructuringElement::new(pts.into_iter().map(Vector::new).collect())?)
}

fn schedule(cfg: &ExperimentConfig) -> RSchedule {
    RSchedule { r0: cfg.r0, ratio: cfg.ratio.expect("resolved"), count: cfg.count.expect("resolved") }
}

fn sampler(cfg: &ExperimentConfig) -> SamplerConfig {
    let method = match cfg.method.expect("resolved") {
        MethodName::Auto => ExcessMethod::Auto,
        MethodName::Exact => ExcessMethod::Exact,
        MethodName::MonteCarlo => ExcessMethod::MonteCarlo,
        MethodName::Grid => ExcessMethod::Grid { h: cfg.h.expect("resolved") },
    };
    SamplerConfig { method, samples: cfg.samples.expect("resolved"), seed: seed(cfg) }
}

fn estimate(e: &Estimate) -> Value {
    json!({ "value": e.value, "std_err": e.std_err, "method": e.method })
}

fn derivative(cfg: &ExperimentConfig, a: &Shape) -> Result<Outcome> {
    let q = structuring_element(&cfg.q)?;
    let rep = derivative_report(a, &q, &schedule(cfg), &sampler(cfg))?;
    let mut table = Table::new(&["r", "ratio", "std_err", "rhs"]);
    for (r, e) in rep.r_values.iter().zip(&rep.ratios) {
        table.push(vec![(*r).into(), e.value.into(), e.std_err.into(), rep.rhs_exact.into()]);
    }
    let result = json!({
        "extrapolated": estimate(&rep.extrapolated),
        "rhs": rep.rhs_exact,
        "z": z(rep.extrapolated.value - rep.rhs_exact, rep.extrapolated.std_err),
        "slope": rep.slope,
        "fit_points": rep.fit_points,
        "flagged": rep.flagged,
    });
    let status = if rep.flagged { Status::Flagged } else { Status::Ok };
    Ok(Outcome { table, result, status, lines: Vec::new() })
}

fn covariogram(cfg: &ExperimentConfig, a: &Shape) -> Result<Outcome> {
    let u = Vector::new(cfg.u.clone().expect("resolved"));
    let rep = covariogram_derivative(a, &u, &schedule(cfg), &sampler(cfg))?;
    let mut table = Table::new(&["r", "slope", "std_err", "rhs"]);
    for (r, e) in rep.r_values.iter().zip(&rep.slopes) {
        table.push(vec![(*r).into(), e.value.into(), e.std_err.into(), rep.cosine_rhs.into()]);
    }
    let result = json!({
        "extrapolated": estimate(&rep.extrapolated),
        "rhs": rep.cosine_rhs,
        "z": z(rep.extrapolated.value - rep.cosine_rhs, rep.extrapolated.std_err),
        "flagged": rep.flagged,
    });
    let status = if rep.flagged { Status::Flagged } else { Status::Ok };
    Ok(Outcome { table, result, status, lines: Vec::new() })
}

fn qvar(cfg: &ExperimentConfig, a: &Shape) -> Result<Outcome> {
    let q = structuring_element(&cfg.q)?;
    let s = a.surface_measure(BALL_ATOMS)?;
    let v = qvariation(&s, &q)?;
    let rhs = dilation_rhs(&s, &q)?;
    let quad = sphere_quadrature(a.dim(), if a.dim() == 2 { 256 } else { 4096 })?;
    let (inr, _) = inradius_in_span(&q, &quad)?;
    let vl = s.projected_variation(&span_basis(&q));
    let rad = circumradius(&q);
    let per = a.perimeter();
    let (lower, upper) = (inr * vl, rad * per);
    let mut table = Table::new(&["q_variation", "rhs", "inradius", "projected_variation", "circumradius", "perimeter", "lower", "upper"]);
    table.push(vec![v.into(), rhs.into(), inr.into(), vl.into(), rad.into(), per.into(), lower.into(), upper.into()]);
    let result = json!({
        "q_variation": v,
        "rhs": rhs,
        "ladder": { "lower": lower, "upper": upper, "holds": lower <= v + 1e-12 && v <= upper + 1e-12 },
        "inradius": inr,
        "projected_variation": vl,
        "circumradius": rad,
        "perimeter": per,
    });
    Ok(Outcome { table, result, status: Status::Ok, lines: Vec::new() })
}

fn contact(cfg: &ExperimentConfig, spec: &BooleanModelSpec) -> Result<Outcome> {
    let q = structuring_element(&cfg.q)?;
    let sampling = BooleanSampling {
        realizations: cfg.realizations.expect("resolved"),
        points: cfg.points.expect("resolved"),
        shell_samples: cfg.shell_samples.expect("resolved"),
        seed: seed(cfg),
    };
    let rep = hprime_check(spec, &q, cfg.r_values.as_deref(), &sampling)?;
    let c = &rep.contact;
    let mut table = Table::new(&["r", "h", "h_std_err", "f", "f_std_err", "f_analytic"]);
    for (k, r) in c.r_values.iter().enumerate() {
        let analytic = rep.analytic_f.as_ref().map_or(f64::NAN, |f| f[k]);
        table.push(vec![
            (*r).into(),
            c.h[k].value.into(),
            c.h[k].std_err.into(),
            c.f[k].value.into(),
            c.f[k].std_err.into(),
            analytic.into(),
        ]);
    }
    let an = &rep.analytic;
    let vf = &c.volume_fraction;
    let sp = &rep.specific_perimeter;
    let mut result = json!({
        "volume_fraction": { "estimate": estimate(vf), "analytic": an.volume_fraction, "z": z(vf.value - an.volume_fraction, vf.std_err) },
        "specific_perimeter": { "estimate": estimate(sp), "analytic": an.specific_perimeter, "z": z(sp.value - an.specific_perimeter, sp.std_err) },
        "slope": estimate(&rep.slope),
        "rose_form": { "estimate": estimate(&rep.rose_form), "analytic": an.rose_form, "z": rep.z_rose },
        "perimeter_path": rep.perimeter_path,
    });
    if let (Some(m), Some(zm)) = (&rep.mean_width_form, rep.z_mean_width) {
        result["mean_width_form"] = json!({ "estimate": estimate(m), "analytic": an.mean_width_form, "z": zm });
    }
    Ok(Outcome { table, result, status: Status::Ok, lines: Vec::new() })
}

fn counter(cfg: &ExperimentConfig) -> Result<Outcome> {
    let ccfg = CounterexampleConfig { m_max: cfg.m_max.expect("resolved"), samples: cfg.samples.expect("resolved"), seed: seed(cfg) };
    let rep = counterexample(&ccfg)?;
    let mut table = Table::new(&["m", "r", "ratio", "std_err", "lower_bound", "ring_ratio", "ring_std_err", "unresolved"]);
    for p in &rep.points {
        table.push(vec![
            p.m.into(),
            p.r.into(),
            p.ratio.value.into(),
            p.ratio.std_err.into(),
            p.lower_bound.into(),
            p.ring_ratio.value.into(),
            p.ring_ratio.std_err.into(),
            p.unresolved.into(),
        ]);
    }
    let at = |m: usize| rep.points.iter().find(|p| p.m == m);
    let growth = match (at(6), at(12)) {
        (Some(a), Some(b)) => json!(b.ratio.value / a.ratio.value),
        _ => Value::Null,
    };
    let result = json!({
        "m_max": rep.m_max,
        "perimeter_bound": rep.perimeter_bound,
        "circumradius": rep.circumradius,
        "vq_bound": rep.vq_bound,
        "growth_12_over_6": growth,
        "rings": rep.rings,
    });
    Ok(Outcome { table, result, status: Status::Ok, lines: Vec::new() })
}

fn suite(cfg: &ExperimentConfig) -> Result<Outcome> {
    let level = cfg.level.expect("resolved");
    let faults = cfg.inject.clone().unwrap_or_default();
    let results = run_suite(level, &faults, seed(cfg));
    let mut table = Table::new(&["check", "passed"]);
    let mut lines = Vec::new();
    for r in &results {
        table.push(vec![r.name.as_str().into(), r.passed.into()]);
        let tag = if r.passed { "PASS" } else { "FAIL" };
        lines.push(format!("[{tag}] {} ({:.2}s): {}", r.name, r.seconds, r.detail));
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    lines.push(format!("{} checks, {} failed", results.len(), failed.len()));
    let status = if failed.is_empty() { Status::Ok } else { Status::Failed };
    let result = json!({ "checks": results, "failed": failed });
    Ok(Outcome { table, result, status, lines })
}

fn z(diff: f64, sigma: f64) -> Value {
    if sigma > 0.0 {
        json!(diff / sigma)
    } else {
        Value::Null
    }
}

/// Checks that a command read from a file matches the subcommand used.
pub fn check_command(sub: Option<CommandKind>, file: Option<CommandKind>) -> Result<()> {
    if let (Some(a), Some(b)) = (sub, file) {
        if a != b {
            bail!(Invalid(format!("config file is for `{b}` but the `{a}` subcommand was used")));
        }
    }
    Ok(())
}
