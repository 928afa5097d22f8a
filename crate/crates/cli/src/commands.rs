use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rug::Complex;
use serde_json::{json, Map, Value};

use sextic::darboux::{
    crum_potential, enumerate_darboux_set, simple_zero_audit, DarbouxDescendant, Family,
};
use sextic::dynamics::{
    closed_form_nu7, closed_form_nu7_square, integrate, DynamicsState, IntegrateOptions,
    Trajectory,
};
use sextic::exactnum::{abs_f64, sub};
use sextic::locus::{
    homotopy_continue, locus_residual, solve_locus_newton, trivial_monodromy_check, LocusReport,
    PoleConfiguration, Termination,
};
use sextic::qes::{qes_spectrum, Branch, QesProblem};
use sextic::quasi::ExpSign;
use sextic::repro::{run_all, run_criterion};
use sextic::stieltjes::{
    implied_potential, shape_sweep, solve_stieltjes, stieltjes_implies_locus, stieltjes_residual,
};
use sextic::Error;

use crate::io::{
    complex_json, complex_list, config_from_json, config_json, emit, eps_json, float_str, num,
    parse_complex, parse_float, poly_json, potential_from_json, potential_json, psi_from_json,
    psi_json, read_json, state_from_json, state_json,
};
use crate::{
    BranchArg, Cli, Command, DarbouxArgs, DynamicsArgs, ExpArg, LocusAction, ProblemArgs,
    RunConfig, StieltjesArgs,
};

/// Non-zero exit carrying its own status.
#[derive(Debug)]
pub struct Status {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Status {}

fn status(code: u8, message: impl Into<String>) -> anyhow::Error {
    Status {
        code,
        message: message.into(),
    }
    .into()
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = &cli.run;
    match &cli.command {
        Command::Qes(a) => cmd_qes(cfg, a),
        Command::Darboux(a) => cmd_darboux(cfg, a),
        Command::Locus { action } => cmd_locus(cfg, action),
        Command::Stieltjes(a) => cmd_stieltjes(cfg, a),
        Command::Dynamics(a) => cmd_dynamics(cfg, a),
        Command::Repro { criterion } => cmd_repro(cfg, *criterion),
    }
}

fn problem(cfg: &RunConfig, a: &ProblemArgs) -> Result<QesProblem> {
    let nu = parse_float(&a.nu, cfg.prec)?;
    let ell = parse_float(&a.ell, cfg.prec)?;
    if let Some(label) = &a.family {
        let Some(f) = Family::parse(label) else {
            bail!("unknown family {label:?}; expected one of D+-, D++, D-+, D--");
        };
        return Ok(f.problem(&nu, &ell));
    }
    let eps = match a.exp {
        ExpArg::Minus => ExpSign::Minus,
        ExpArg::Plus => ExpSign::Plus,
    };
    let branch = match a.branch {
        BranchArg::MinusL => Branch::MinusL,
        BranchArg::LPlusOne => Branch::LPlusOne,
    };
    Ok(QesProblem::new(nu, ell, eps, branch))
}

fn branch_label(b: Branch) -> &'static str {
    match b {
        Branch::MinusL => "minus-l",
        Branch::LPlusOne => "l-plus-one",
    }
}

fn problem_json(pr: &QesProblem) -> Value {
    json!({
        "nu": float_str(&pr.nu),
        "ell": float_str(&pr.ell),
        "eps": eps_json(pr.eps),
        "branch": branch_label(pr.branch),
        "mu": float_str(&pr.mu()),
        "family": Family::from_parts(pr.eps, pr.branch).label(),
    })
}

fn cmd_qes(cfg: &RunConfig, a: &ProblemArgs) -> Result<()> {
    let pr = problem(cfg, a)?;
    let spec = qes_spectrum(&pr, cfg.zero_tol())?;
    let functions: Vec<Value> = (0..spec.eigenvalues.len())
        .map(|j| {
            json!({
                "index": j + 1,
                "eigenvalue": complex_json(&spec.eigenvalues[j]),
                "poly": poly_json(&spec.polynomial(j)),
                "renormalized": spec.renormalized[j],
            })
        })
        .collect();
    let out = json!({
        "problem": problem_json(&pr),
        "m": spec.m,
        "char_poly": poly_json(&spec.char_poly),
        "eigenvalues": complex_list(&spec.eigenvalues),
        "eigenfunctions": functions,
    });
    emit(&out, cfg.out.as_deref())
}

fn parse_subset(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().with_context(|| format!("bad subset index {t:?}")))
        .collect()
}

fn monodromy_json(r: &LocusReport) -> Value {
    json!({ "satisfied": r.satisfied, "max_abs": num(r.max_abs) })
}

fn descendant_json(d: &DarbouxDescendant, tol: f64) -> Result<Value> {
    let w = &d.wronskian;
    let audit = simple_zero_audit(w, tol)?;
    let histogram: Map<String, Value> = audit
        .histogram
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let mono = trivial_monodromy_check(&d.potential, tol)?;
    let mut meta = Map::new();
    meta.insert("family".into(), json!(d.family.label()));
    meta.insert("subset".into(), json!(d.subset));
    meta.insert(
        "parent".into(),
        json!({ "nu": float_str(&d.parent.nu), "ell": float_str(&d.parent.ell) }),
    );
    meta.insert("new_nu".into(), json!(float_str(&d.new_nu)));
    meta.insert("new_ell".into(), json!(float_str(&d.new_ell)));
    meta.insert(
        "wronskian".into(),
        json!({
            "origin_exponent": float_str(&w.origin_exponent),
            "exp_multiplier": w.exp_multiplier,
            "p_i": poly_json(&w.p_i),
            "degree": w.degree(),
            "expected_degree": w.expected_degree,
            "even": w.even,
            "nonzero_at_origin": w.nonzero_at_origin,
            "structure_ok": w.structure_ok(),
        }),
    );
    meta.insert(
        "simple_zero_audit".into(),
        json!({
            "degree": audit.degree,
            "histogram": histogram,
            "min_distance": audit.min_distance.map(num),
            "all_simple": audit.all_simple,
        }),
    );
    meta.insert("monodromy".into(), monodromy_json(&mono));
    meta.insert("representation_defect".into(), num(d.representation_defect));
    Ok(potential_json(&d.potential, meta))
}

fn subset_label(s: &[usize]) -> String {
    if s.is_empty() {
        "none".into()
    } else {
        s.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
    }
}

fn cmd_darboux(cfg: &RunConfig, a: &DarbouxArgs) -> Result<()> {
    let pr = problem(cfg, &a.problem)?;
    let tol = cfg.zero_tol();
    if !a.enumerate {
        let subset = parse_subset(a.subset.as_deref().unwrap_or(""))?;
        let spec = qes_spectrum(&pr, tol)?;
        let d = crum_potential(&pr.potential(), &subset, &spec, tol)?;
        return emit(&descendant_json(&d, tol)?, cfg.out.as_deref());
    }
    let dir = a.out_dir.as_deref().context("--enumerate needs --out-dir")?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let family = Family::from_parts(pr.eps, pr.branch);
    let all = enumerate_darboux_set(&pr.nu, &pr.ell, family, tol)?;
    let mut rows = Vec::new();
    println!("{:<12} {:>10} {:>8} {:>6} {:>6} {:>10} {:>7}", "subset", "nu", "l", "deg", "poles", "monodromy", "simple");
    for d in &all {
        let v = descendant_json(d, tol)?;
        let file = format!("subset-{}.json", subset_label(&d.subset));
        emit(&v, Some(&dir.join(&file)))?;
        let meta = &v["meta"];
        let ok = meta["monodromy"]["satisfied"].as_bool().unwrap_or(false);
        let simple = meta["simple_zero_audit"]["all_simple"].as_bool().unwrap_or(false);
        println!(
            "{:<12} {:>10} {:>8} {:>6} {:>6} {:>10} {:>7}",
            format!("{{{}}}", subset_label(&d.subset).replace('-', ",").replace("none", "")),
            d.new_nu.to_f64(),
            d.new_ell.to_f64(),
            d.wronskian.degree(),
            d.potential.poles.len(),
            if ok { "ok" } else { "FAIL" },
            if simple { "yes" } else { "no" },
        );
        rows.push(json!({
            "file": file,
            "subset": d.subset,
            "new_nu": float_str(&d.new_nu),
            "new_ell": float_str(&d.new_ell),
            "degree": d.wronskian.degree(),
            "poles": d.potential.poles.len(),
            "monodromy_satisfied": ok,
            "all_simple": simple,
        }));
    }
    let summary = json!({
        "problem": problem_json(&pr),
        "count": all.len(),
        "descendants": rows,
    });
    emit(&summary, Some(&dir.join("summary.json")))
}

fn locus_report_json(r: &LocusReport) -> Value {
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            let res: Vec<Value> = e
                .residuals
                .iter()
                .map(|(k, v)| json!({ "order": k, "value": complex_json(v) }))
                .collect();
            json!({
                "location": complex_json(&e.location),
                "mult": e.mult,
                "leading": complex_json(&e.leading),
                "leading_ok": e.leading_ok,
                "residuals": res,
            })
        })
        .collect();
    json!({ "satisfied": r.satisfied, "max_abs": num(r.max_abs), "entries": entries })
}

fn with_points(c: &PoleConfiguration, xs: &[Complex]) -> PoleConfiguration {
    let mut out = c.clone();
    for (p, x) in out.points.iter_mut().zip(xs) {
        p.0 = x.clone();
    }
    out
}

/// Writes the non-convergence dump, then hands the error back.
fn dump_iteration_cap(cfg: &RunConfig, e: Error, last: impl FnOnce(&[Complex]) -> Value) -> anyhow::Error {
    if let Error::IterationCap {
        max_iter,
        residual,
        last: ref xs,
    } = e
    {
        let out = json!({
            "converged": false,
            "iterations": max_iter,
            "residual": num(residual),
            "last_iterate": last(xs),
        });
        if let Err(w) = emit(&out, cfg.out.as_deref()) {
            return w;
        }
    }
    e.into()
}

fn cmd_locus(cfg: &RunConfig, action: &LocusAction) -> Result<()> {
    let tol = cfg.zero_tol();
    match action {
        LocusAction::Check { input } => {
            let v = read_json(input)?;
            let pot = if v.get("poly").is_some() {
                potential_from_json(&v, cfg.prec)?
            } else {
                config_from_json(&v, cfg.prec)?.to_potential()
            };
            let r = trivial_monodromy_check(&pot, tol)?;
            emit(&locus_report_json(&r), cfg.out.as_deref())
        }
        LocusAction::Solve { input, max_iter } => {
            let init = config_from_json(&read_json(input)?, cfg.prec)?;
            let sol = solve_locus_newton(&init, cfg.newton_tol(), *max_iter)
                .map_err(|e| dump_iteration_cap(cfg, e, |xs| config_json(&with_points(&init, xs))))?;
            let out = json!({
                "converged": true,
                "iterations": sol.iterations,
                "residual": num(sol.residual),
                "history": sol.history.iter().map(|&h| num(h)).collect::<Vec<_>>(),
                "config": config_json(&sol.config),
                "residuals": complex_list(&locus_residual(&sol.config)?),
                "potential": potential_json(&sol.config.to_potential(), Map::new()),
            });
            emit(&out, cfg.out.as_deref())
        }
        LocusAction::Continue {
            input,
            nu_to,
            steps,
            geometric,
            csv,
        } => {
            let start = config_from_json(&read_json(input)?, cfg.prec)?;
            let nu0 = start.nu.to_f64();
            let n = (*steps).max(1);
            if *geometric && (nu0 * nu_to <= 0.0) {
                bail!("--geometric needs nu and --nu-to of the same sign");
            }
            let path: Vec<f64> = (0..=n)
                .map(|k| {
                    let s = k as f64 / n as f64;
                    if *geometric {
                        nu0 * (nu_to / nu0).powf(s)
                    } else {
                        nu0 + (nu_to - nu0) * s
                    }
                })
                .collect();
            let branch = homotopy_continue(&start, &path, cfg.newton_tol())?;
            write_branch_csv(csv, &branch.samples)?;
            let (kind, code, extra) = match &branch.termination {
                Termination::Completed => ("completed", 0, json!(null)),
                Termination::Collision {
                    nu,
                    distance,
                    threshold,
                } => (
                    "collision",
                    4,
                    json!({ "nu": num(*nu), "distance": num(*distance), "threshold": num(*threshold) }),
                ),
                Termination::StepUnderflow { nu } => ("step_underflow", 3, json!({ "nu": num(*nu) })),
            };
            let out = json!({
                "samples": branch.samples.len(),
                "termination": kind,
                "detail": extra,
                "last_good": config_json(&branch.last_good),
            });
            emit(&out, cfg.out.as_deref())?;
            if code != 0 {
                return Err(status(code, format!("continuation stopped: {kind}")));
            }
            Ok(())
        }
    }
}

fn write_branch_csv(path: &Path, samples: &[PoleConfiguration]) -> Result<()> {
    let width = samples.first().map(|s| s.points.len()).unwrap_or(0);
    let mut text = String::from("nu");
    for j in 0..width {
        text.push_str(&format!(",x{j}_re,x{j}_im"));
    }
    text.push('\n');
    for s in samples {
        text.push_str(&format!("{:e}", s.nu.to_f64()));
        for (x, _) in &s.points {
            text.push_str(&format!(",{:e},{:e}", x.real().to_f64(), x.imag().to_f64()));
        }
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_stieltjes(cfg: &RunConfig, a: &StieltjesArgs) -> Result<()> {
    let tol = cfg.zero_tol();
    let v = read_json(&a.input)?;
    if a.shape_sweep {
        let c = config_from_json(&v, cfg.prec)?;
        let sweep = shape_sweep(&c.locations(), &c.nu, &c.ell, a.starts, cfg.seed, tol);
        let shapes: Vec<Value> = sweep
            .shapes
            .iter()
            .map(|s| {
                json!({
                    "eps": eps_json(s.eps),
                    "mu": float_str(&s.mu),
                    "k": s.k,
                    "best_residual": num(s.best_residual),
                    "best_zeros": complex_list(&s.best_zeros),
                })
            })
            .collect();
        let out = json!({
            "poles": complex_list(&c.locations()),
            "nu": float_str(&c.nu),
            "ell": float_str(&c.ell),
            "starts": a.starts,
            "seed": cfg.seed,
            "shapes": shapes,
            "min_over_shapes": num(sweep.min_over_shapes),
        });
        return emit(&out, cfg.out.as_deref());
    }
    let mut psi = psi_from_json(&v, cfg.prec)?;
    if a.solve {
        let init = psi.clone();
        psi = solve_stieltjes(
            init.zeros.len(),
            init.poles.len(),
            &init.mu,
            init.eps,
            &init,
            a.symmetric,
            cfg.newton_tol(),
        )
        .map_err(|e| dump_iteration_cap(cfg, e, complex_list))?;
    }
    let rel = stieltjes_residual(&psi)?;
    let imp = stieltjes_implies_locus(&psi, tol)?;
    let out = json!({
        "psi": psi_json(&psi),
        "stieltjes": {
            "max_abs": num(rel.max_abs),
            "zero_residuals": complex_list(&rel.zero_residuals),
            "pole_residuals": complex_list(&rel.pole_residuals),
        },
        "implication": {
            "stieltjes_max": num(imp.stieltjes_max),
            "monodromy": monodromy_json(&imp.monodromy),
            "locus_max": imp.locus_max.map(num),
            "riccati_residual": num(imp.riccati_residual),
            "lambda": complex_json(&imp.lambda),
            "nu": complex_json(&imp.nu),
            "passed": imp.passed,
        },
        "potential": potential_json(&implied_potential(&psi), Map::new()),
    });
    emit(&out, cfg.out.as_deref())
}

fn initial_state(cfg: &RunConfig, a: &DynamicsArgs) -> Result<(DynamicsState, Option<(Complex, Complex)>)> {
    if let Some(path) = &a.state {
        return Ok((state_from_json(&read_json(path)?, cfg.prec)?, None));
    }
    let spec = a.closed_form_nu7.as_deref().unwrap_or_default();
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        bail!("--closed-form-nu7 expects c1,c2");
    }
    let c1 = parse_complex(parts[0], cfg.prec)?;
    let c2 = parse_complex(parts[1], cfg.prec)?;
    let s = closed_form_nu7(a.t0, &c1, &c2)?;
    Ok((s, Some((c1, c2))))
}

fn write_trajectory_csv(path: &Path, tr: &Trajectory) -> Result<()> {
    let width = tr.states.first().map(|s| s.points.len()).unwrap_or(0);
    let mut f = std::io::BufWriter::new(
        fs::File::create(path).with_context(|| format!("writing {}", path.display()))?,
    );
    write!(f, "t")?;
    for j in 0..width {
        write!(f, ",z{j}_re,z{j}_im")?;
    }
    writeln!(f, ",f_re,f_im,h_re,h_im,ht_re,ht_im,cm_max")?;
    for ((t, s), d) in tr.times.iter().zip(&tr.states).zip(&tr.diagnostics) {
        write!(f, "{t:e}")?;
        for (z, _) in &s.points {
            write!(f, ",{:e},{:e}", z.real().to_f64(), z.imag().to_f64())?;
        }
        let cm = match (d.cm_zero, d.cm_pole) {
            (None, None) => String::new(),
            (a, b) => format!("{:e}", a.unwrap_or(0.0).max(b.unwrap_or(0.0))),
        };
        writeln!(
            f,
            ",{:e},{:e},{:e},{:e},{:e},{:e},{cm}",
            s.phase.real().to_f64(),
            s.phase.imag().to_f64(),
            d.h.real().to_f64(),
            d.h.imag().to_f64(),
            d.h_tilde.real().to_f64(),
            d.h_tilde.imag().to_f64(),
        )?;
    }
    f.flush()?;
    Ok(())
}

fn cmd_dynamics(cfg: &RunConfig, a: &DynamicsArgs) -> Result<()> {
    let (state, closed) = initial_state(cfg, a)?;
    let opts = IntegrateOptions {
        rtol: a.rtol,
        atol: a.atol,
        max_step: a.max_step,
        ..IntegrateOptions::default()
    };
    let (tr, failure) = match integrate(&state, a.t_end, &opts) {
        Ok(tr) => (tr, None),
        Err(Error::Integration(f)) => (f.partial.clone(), Some(f)),
        Err(e) => return Err(e.into()),
    };
    write_trajectory_csv(&a.csv, &tr)?;

    let d0 = &tr.diagnostics[0];
    let scale = abs_f64(&d0.h).max(abs_f64(&d0.h_tilde)).max(1.0);
    let (mut drift_h, mut drift_ht, mut cm_max, mut max_energy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for d in &tr.diagnostics {
        drift_h = drift_h.max(abs_f64(&sub(&d.h, &d0.h)));
        drift_ht = drift_ht.max(abs_f64(&sub(&d.h_tilde, &d0.h_tilde)));
        max_energy = max_energy.max(abs_f64(&d.h)).max(abs_f64(&d.h_tilde));
        cm_max = cm_max.max(d.cm_zero.unwrap_or(0.0)).max(d.cm_pole.unwrap_or(0.0));
    }
    let balance = state.charge_balance();
    let charge_constant = tr.states.iter().all(|s| s.charge_balance() == balance);
    let bound = 10.0 * opts.rtol;
    let mut out = json!({
        "status": match &failure {
            None => "completed",
            Some(f) => match f.kind {
                sextic::dynamics::FailureKind::Collision => "collision",
                sextic::dynamics::FailureKind::StepUnderflow => "step_underflow",
                sextic::dynamics::FailureKind::BlowUp => "blow_up",
            },
        },
        "failure": failure.as_ref().map(|f| json!({
            "t": num(f.t),
            "distance": num(f.distance),
            "threshold": num(f.threshold),
            "message": f.to_string(),
        })),
        "t_start": num(state.t),
        "t_reached": num(tr.times.last().copied().unwrap_or(state.t)),
        "steps": tr.states.len() - 1,
        "rejected_steps": tr.rejected_steps,
        "charge_balance": balance,
        "charge_constant": charge_constant,
        "h_initial": complex_json(&d0.h),
        "h_tilde_initial": complex_json(&d0.h_tilde),
        "max_h_drift": num(drift_h),
        "max_h_tilde_drift": num(drift_ht),
        "conserved": drift_h.max(drift_ht) <= bound * scale,
        "max_energy": num(max_energy),
        "zero_energy": max_energy <= bound,
        "max_cm_residual": num(cm_max),
        "initial_state": state_json(&state),
        "final_state": state_json(tr.last()),
    });
    if let Some((c1, c2)) = closed {
        let mut err = 0.0f64;
        for s in &tr.states {
            let x2 = Complex::with_val(cfg.prec, s.points[0].0.square_ref());
            let want = closed_form_nu7_square(s.t, &c1, &c2);
            err = err.max(abs_f64(&sub(&x2, &want)) / abs_f64(&want).max(1.0));
        }
        out["closed_form"] = json!({
            "c1": complex_json(&c1),
            "c2": complex_json(&c2),
            "max_x2_error": num(err),
        });
    }
    emit(&out, cfg.out.as_deref())?;
    match failure {
        Some(f) => Err(Error::Integration(f).into()),
        None => Ok(()),
    }
}

fn cmd_repro(cfg: &RunConfig, criterion: Option<u8>) -> Result<()> {
    let results = match criterion {
        Some(id) => match run_criterion(id, cfg.prec, cfg.seed) {
            Some(r) => vec![r],
            None => bail!("no criterion {id}; expected 1..=7"),
        },
        None => run_all(cfg.prec, cfg.seed),
    };
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if let Some(path) = &cfg.out {
        let rows: Vec<Value> = results
            .iter()
            .map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed, "detail": r.detail }))
            .collect();
        emit(&json!({ "criteria": rows, "failed": failed }), Some(path))?;
    }
    if failed > 0 {
        return Err(status(1, format!("{failed} criteria failed")));
    }
    Ok(())
}
