//! One function per subcommand. Each returns a [`Report`]; nothing is written
//! to disk here, so a failed command never leaves partial files behind.

use std::f64::consts::PI;
use std::path::Path;

use serde_json::{json, Value};

use qsl_core::bounds::{
    analyze_ensemble_at_qsl, mixed_state_bound, qsl_time, separable_pure_bound, BoundResult,
    BoundTime, Verdict, DEFAULT_STRUCTURE_TOL,
};
use qsl_core::constructions::{
    grouped_t_perp_with, make_grouped, make_mixture_demo, make_psi_ent, EntangledChainSpec,
    GroupedSpec,
};
use qsl_core::dynamics::{first_orthogonal_time, SearchOptions, SurvivalCurve};
use qsl_core::qcore::{energy_stats, ground_shift, EnergyStats, Hamiltonian, QuantumState, SubsystemLayout};

use crate::error::{CliError, CliResult};
use crate::input::{parse_system, InputState};
use crate::output::{cell, num, CsvTable};
use crate::svg::sweep_svg;
use crate::sweep::{run_sweep, sweep_table, SweepConfig};

/// Ratios below `1 - RATIO_FLOOR_SLACK` would put a measured time inside the
/// region forbidden by the speed limit.
pub const RATIO_FLOOR_SLACK: f64 = 1e-9;

/// Largest dimension for the numerical check in `ent-scan`.
pub const ENT_VERIFY_DIM: usize = 1024;

/// Largest dimension for the dense cross-check in `groups`.
pub const GROUPS_DENSE_DIM: usize = 512;

/// Relative agreement required between measured and closed-form times.
pub const ANALYTIC_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

fn bound_text(b: &BoundResult) -> String {
    match b.time {
        BoundTime::Finite(t) => num(t),
        BoundTime::Unbounded => "unbounded".into(),
    }
}

fn bound_json(b: &BoundResult) -> Value {
    json!({ "time": b.time.finite(), "unbounded": b.time.finite().is_none(), "branch": b.branch.to_string() })
}

fn check_floor(what: &str, ratio: f64) -> CliResult<()> {
    if ratio < 1.0 - RATIO_FLOOR_SLACK {
        return Err(CliError::Numerical(format!(
            "{what}: measured time is {ratio} times the speed limit, below the floor"
        )));
    }
    Ok(())
}

pub fn cmd_bound(energy: f64, spread: f64) -> CliResult<Report> {
    let stats = EnergyStats::new(energy, spread).map_err(|_| {
        CliError::Usage(format!(
            "--energy and --spread must be finite and >= 0 (got {energy}, {spread})"
        ))
    })?;
    let b = qsl_time(&stats);
    let text = match b.time {
        BoundTime::Finite(t) => format!("{}, branch={}\n", num(t), b.branch),
        BoundTime::Unbounded => format!("unbounded, branch={}\n", b.branch),
    };
    Ok(Report {
        text,
        json: json!({ "energy": energy, "spread": spread, "bound": bound_json(&b) }),
        ..Report::default()
    })
}

pub fn cmd_tperp(path: &Path, shift: bool, opts: &SearchOptions) -> CliResult<Report> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let system = parse_system(&text)?;
    let h = if shift {
        ground_shift(&system.hamiltonian)
    } else {
        system.hamiltonian.require_ground_shifted().map_err(|e| {
            CliError::Invariant(format!("{e} (pass --shift to subtract it)"))
        })?;
        system.hamiltonian
    };
    match &system.state {
        InputState::Pure(p) => tperp_report(p, &h, opts, None),
        InputState::Mixed(rho) => {
            let mixed = mixed_state_bound(rho, &h)?;
            tperp_report(rho, &h, opts, Some(mixed))
        }
    }
}

fn tperp_report<S: QuantumState>(
    state: &S,
    h: &Hamiltonian,
    opts: &SearchOptions,
    mixed: Option<qsl_core::bounds::MixedStateBound>,
) -> CliResult<Report> {
    let stats = energy_stats(state, h)?;
    let bound = qsl_time(&stats);
    let out = first_orthogonal_time(state, h, opts)?;
    let mut text = match out.t_perp {
        Some(t) => {
            let ratio = t / bound.time.as_f64();
            check_floor("tperp", ratio)?;
            format!(
                "Found t_perp={} bound={} ratio={:.6} branch={}\n",
                num(t),
                bound_text(&bound),
                ratio,
                bound.branch
            )
        }
        None => format!(
            "NotFound min_overlap={} t_at_min={} horizon={} bound={}\n",
            num(out.min_overlap),
            num(out.t_at_min),
            num(out.horizon),
            bound_text(&bound)
        ),
    };
    text.push_str(&format!("energy={} spread={}\n", num(stats.energy()), num(stats.spread())));
    let mixed_json = mixed.map(|m| {
        text.push_str(&format!(
            "mixed_bound={} components={} degenerate={}\n",
            bound_text(&m.bound),
            m.components.len(),
            m.degenerate
        ));
        json!({ "bound": bound_json(&m.bound), "energy_min": m.energy_min, "spread_min": m.spread_min,
                "components": m.components.len(), "degenerate": m.degenerate })
    });
    Ok(Report {
        text,
        json: json!({
            "status": if out.is_found() { "Found" } else { "NotFound" },
            "t_perp": out.t_perp,
            "min_overlap": out.min_overlap,
            "t_at_min": out.t_at_min,
            "horizon": out.horizon,
            "energy": stats.energy(),
            "spread": stats.spread(),
            "bound": bound_json(&bound),
            "mixed_bound": mixed_json,
        }),
        ..Report::default()
    })
}

pub fn cmd_fig1(cfg: &SweepConfig, opts: &SearchOptions, want_svg: bool) -> CliResult<Report> {
    let rows = run_sweep(cfg, opts)?;
    for row in &rows {
        if let Some(r) = row.ratio() {
            check_floor(&format!("fig1 at omega_ratio={}", row.omega_ratio), r)?;
        }
    }
    let not_found = rows.iter().filter(|r| r.t_perp.is_none()).count();
    let text = format!("rows={} not_found={}\n", rows.len(), not_found);
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "omega_ratio": if r.omega_ratio.is_finite() { json!(r.omega_ratio) } else { json!("inf") },
                "t_perp": r.t_perp, "t_qsl": r.t_qsl, "ratio": r.ratio(),
            })
        })
        .collect();
    Ok(Report {
        text,
        json: json!({ "m": cfg.m, "omega0": cfg.omega0, "rows": json_rows }),
        csv: Some(sweep_table(&rows).render()),
        svg: want_svg.then(|| sweep_svg(&rows, cfg.m)),
    })
}

pub fn cmd_ent_scan(levels: &[usize], subsystems: &[usize], omega0: f64, opts: &SearchOptions) -> CliResult<Report> {
    if levels.is_empty() || subsystems.is_empty() {
        return Err(CliError::Usage("--n and --m need at least one value each".into()));
    }
    let mut table = CsvTable::new(&["N", "M", "t_perp_entangled", "separable_bound", "qsl_time"]);
    let mut text = String::new();
    let mut json_rows = Vec::new();
    for &n in levels {
        for &m in subsystems {
            let spec = EntangledChainSpec::new(n, m, omega0)?;
            let analytic = spec.analytic_t_perp();
            let dim = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
            let verified = dim <= ENT_VERIFY_DIM as u128;
            let t = if verified {
                let chain = make_psi_ent(&spec)?;
                let out = first_orthogonal_time(&chain.state, &chain.hamiltonian, opts)?;
                let t = out.t_perp.ok_or_else(|| {
                    CliError::Numerical(format!("N={n} M={m}: no orthogonal time within the horizon"))
                })?;
                if (t - analytic).abs() > ANALYTIC_AGREEMENT * analytic {
                    return Err(CliError::Numerical(format!(
                        "N={n} M={m}: measured {t} disagrees with 2pi/(N M omega0) = {analytic}"
                    )));
                }
                t
            } else {
                analytic
            };
            let sep = separable_pure_bound(&vec![spec.local_stats(); m])?.time.as_f64();
            let qsl = qsl_time(&spec.global_stats()).time.as_f64();
            check_floor(&format!("ent-scan N={n} M={m}"), t / qsl)?;
            table.push(vec![n.to_string(), m.to_string(), cell(t), cell(sep), cell(qsl)]);
            text.push_str(&format!(
                "N={n} M={m} t_perp={} separable_bound={} qsl_time={} speedup={:.6}{}\n",
                num(t),
                num(sep),
                num(qsl),
                sep / t,
                if verified { "" } else { " (closed form only)" }
            ));
            json_rows.push(json!({ "N": n, "M": m, "t_perp_entangled": t, "separable_bound": sep,
                                   "qsl_time": qsl, "verified": verified }));
        }
    }
    Ok(Report {
        text,
        json: json!({ "omega0": omega0, "rows": json_rows }),
        csv: Some(table.render()),
        svg: None,
    })
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::SaturatingStructure => "SaturatingStructure".into(),
        Verdict::Violation(why) => format!("Violation ({why})"),
    }
}

pub fn cmd_mixture_demo(omega: f64, samples: usize, opts: &SearchOptions) -> CliResult<Report> {
    if samples < 2 {
        return Err(CliError::Usage("--samples must be >= 2".into()));
    }
    let demo = make_mixture_demo(omega)?;
    let analysis = analyze_ensemble_at_qsl(&demo.ensemble, &demo.locals, DEFAULT_STRUCTURE_TOL)?;
    let rho = demo.assembled();
    let h = demo.global_hamiltonian()?;
    let out = first_orthogonal_time(&rho, &h, opts)?;
    let bound = analysis.bound.time.as_f64();
    let t = out
        .t_perp
        .ok_or_else(|| CliError::Numerical("mixture never reaches an orthogonal state".into()))?;
    let expected = PI / omega;
    if (t - expected).abs() > ANALYTIC_AGREEMENT * expected
        || (bound - expected).abs() > ANALYTIC_AGREEMENT * expected
    {
        return Err(CliError::Numerical(format!(
            "t_perp={t} and bound={bound} should both equal pi/omega={expected}"
        )));
    }

    let mut text = format!(
        "{}, t_perp={}=bound (bound={})\n",
        verdict_text(&analysis.verdict),
        num(t),
        num(bound)
    );
    text.push_str(&format!(
        "energy={} spread={}\n",
        num(analysis.stats.energy()),
        num(analysis.stats.spread())
    ));
    for (i, (record, w)) in analysis.terms.iter().zip(demo.ensemble.weights()).enumerate() {
        let k = record
            .evolving_index
            .map(|k| (k + 1).to_string())
            .unwrap_or_else(|| "none".into());
        text.push_str(&format!("term {}: weight={} k_n={}\n", i + 1, num(*w), k));
    }

    let curve = SurvivalCurve::new(&rho, &h)?;
    let t_end = 2.0 * PI / omega;
    let mut table = CsvTable::new(&["t", "survival"]);
    for i in 0..samples {
        let ti = t_end * i as f64 / (samples - 1) as f64;
        table.push(vec![cell(ti), cell(curve.eval(ti))]);
    }
    let terms: Vec<Value> = analysis
        .terms
        .iter()
        .map(|r| json!({ "k_n": r.evolving_index.map(|k| k + 1), "evolving": r.evolving, "stationary": r.stationary }))
        .collect();
    Ok(Report {
        text,
        json: json!({
            "omega": omega,
            "verdict": verdict_text(&analysis.verdict),
            "saturating": analysis.verdict.is_saturating(),
            "t_perp": t,
            "bound": bound,
            "energy": analysis.stats.energy(),
            "spread": analysis.stats.spread(),
            "terms": terms,
        }),
        csv: Some(table.render()),
        svg: None,
    })
}

pub fn cmd_groups(groups: usize, per_group: usize, omega0: f64, omega: f64, opts: &SearchOptions) -> CliResult<Report> {
    let spec = GroupedSpec::new(groups, per_group, omega0, omega)?;
    let layout = SubsystemLayout::qubits(spec.total_qubits())?;
    let out = grouped_t_perp_with(&spec, opts)?;
    let t_qsl = spec.qsl_time();
    let factor = spec.lower_bound_factor();

    let dense = if layout.total_dim() <= GROUPS_DENSE_DIM {
        let (psi, h) = make_grouped(&spec)?;
        let curve = SurvivalCurve::new(&psi, &h)?;
        Some(out.t_perp.map(|t| curve.eval(t)))
    } else {
        None
    };
    if let Some(Some(s)) = dense {
        if s > opts.ortho_tol.max(qsl_core::dynamics::DEFAULT_ORTHO_TOL) {
            return Err(CliError::Numerical(format!(
                "dense survival at t_perp is {s}, not orthogonal"
            )));
        }
    }

    let mut text = match out.t_perp {
        Some(t) => {
            let ratio = t / t_qsl;
            check_floor("groups", ratio)?;
            format!(
                "t_perp={} t_qsl={} ratio={} sqrt(M/Q)={}\n",
                num(t),
                num(t_qsl),
                num(ratio),
                num(factor)
            )
        }
        None => format!(
            "NotFound min_overlap={} horizon={} t_qsl={} sqrt(M/Q)={}\n",
            num(out.min_overlap),
            num(out.horizon),
            num(t_qsl),
            num(factor)
        ),
    };
    match dense {
        Some(Some(s)) => text.push_str(&format!("dense check: survival(t_perp)={}\n", num(s))),
        Some(None) => {}
        None => text.push_str(&format!(
            "dense check skipped (dimension {} > {GROUPS_DENSE_DIM})\n",
            layout.total_dim()
        )),
    }
    Ok(Report {
        text,
        json: json!({
            "groups": groups, "per_group": per_group, "omega0": omega0, "omega": omega,
            "t_perp": out.t_perp, "t_qsl": t_qsl, "ratio": out.t_perp.map(|t| t / t_qsl),
            "sqrt_m_over_q": factor, "min_overlap": out.min_overlap,
            "dense_survival_at_t_perp": dense.flatten(),
        }),
        ..Report::default()
    })
}
