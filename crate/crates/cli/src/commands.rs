use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use qcpower_core::cluster::verify_propagation_oracle;
use qcpower_core::grid::parse_range;
use qcpower_core::models::{analytic_ground_energy, analytic_ground_state, cached_eigensystem, detect_transition, spectrum};
use qcpower_core::pauli::{write_table_csv, write_table_report};
use qcpower_core::percolation::{
    k_curve, site_threshold, spanning_curve, write_spanning_csv, zero_t_boundary, KCurve, KCurveConfig, LatticeSpec,
};
use qcpower_core::phase::{cluster_rates, sweep, Dim};
use qcpower_core::{Model, ModelParams, SpectrumSummary};
use serde::Serialize;
use serde_json::json;

use crate::cli::{
    Cli, Command, Common, ErrorsArgs, Format, KcurveArgs, KcurveOptions, ParamArgs, PercolationArgs, PhaseArgs,
    SpectrumArgs, ZeroTArgs,
};
use crate::output::{emit, sci, Metadata};
use crate::Validation;

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Validation(msg.into()).into()
}

/// The model and its parameter values from `--delta`/`--dz` or a range.
fn resolve_params(p: &ParamArgs) -> Result<(Model, Vec<f64>)> {
    let (value, range, other) = match p.model {
        Model::Xxz => (p.delta, &p.delta_range, p.dz.is_some() || p.dz_range.is_some()),
        Model::Aniso => (p.dz, &p.dz_range, p.delta.is_some() || p.delta_range.is_some()),
    };
    if other {
        let flag = if p.model == Model::Xxz { "--dz" } else { "--delta" };
        return Err(invalid(format!("{flag} does not apply to --model {}", p.model)));
    }
    let name = p.model.param_name();
    match (value, range) {
        (Some(v), None) => Ok((p.model, vec![v])),
        (None, Some(r)) => Ok((p.model, parse_range(r)?)),
        _ => Err(invalid(format!("give --{name} or --{name}-range for --model {}", p.model))),
    }
}

fn single_param(p: &ParamArgs) -> Result<ModelParams> {
    let (model, values) = resolve_params(p)?;
    match values.as_slice() {
        [v] if p.delta_range.is_none() && p.dz_range.is_none() => Ok(ModelParams::new(model, *v)),
        _ => Err(invalid("this command takes a single parameter value, not a range")),
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let common = &cli.common;
    match &cli.command {
        Command::Spectrum(a) => spectrum_cmd(common, a),
        Command::GroundCheck(a) => ground_check(common, a),
        Command::Errors(a) => errors_cmd(common, a),
        Command::Percolation(a) => percolation_cmd(common, a),
        Command::Kcurve(a) => kcurve_cmd(common, a),
        Command::ZeroTBoundary(a) => zero_t_cmd(common, a),
        Command::Phase2d(a) => phase_cmd(common, a, Dim::Two),
        Command::Phase3d(a) => phase_cmd(common, a, Dim::Three),
        Command::VerifyPropagation => verify_cmd(common),
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    param: f64,
    #[serde(flatten)]
    summary: SpectrumSummary,
    e0_analytic: f64,
}

fn spectrum_cmd(common: &Common, a: &SpectrumArgs) -> Result<ExitCode> {
    let (model, values) = resolve_params(&a.params)?;
    let rows = values
        .iter()
        .map(|&v| {
            let p = ModelParams::new(model, v);
            Ok(SpectrumRow {
                param: v,
                summary: spectrum(&p)?,
                e0_analytic: analytic_ground_energy(&p),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let scan = if values.len() >= 3 {
        Some(detect_transition(model, &values, a.kink_threshold)?)
    } else {
        None
    };
    if let Some(s) = &scan {
        for k in &s.kinks {
            eprintln!("kink at {} = {:.4} (slope jump {:.4})", model.param_name(), k.location, k.slope_jump);
        }
        eprintln!("{} kink(s), scan status {:?}", s.kinks.len(), s.status);
    }
    let meta = Metadata::new(
        "spectrum",
        json!({ "model": model, "kink_threshold": a.kink_threshold }),
    );
    let data = json!({ "rows": rows, "transition": scan });
    emit(common.output.as_deref(), common.format, &meta, &data, |out| {
        writeln!(out, "model,param,e0,e0_analytic,e1,gap,ground_degeneracy")?;
        for r in &rows {
            let m = &r.summary;
            writeln!(
                out,
                "{model},{},{},{},{},{},{}",
                sci(r.param),
                sci(m.e0),
                sci(r.e0_analytic),
                sci(m.e1),
                sci(m.gap),
                m.ground_degeneracy
            )?;
        }
        Ok(())
    })?;
    Ok(ExitCode::SUCCESS)
}

fn ground_check(common: &Common, a: &ParamArgs) -> Result<ExitCode> {
    let (model, values) = resolve_params(a)?;
    let mut rows = Vec::new();
    for v in values {
        let p = ModelParams::new(model, v);
        let psi = analytic_ground_state(&p)?;
        let eig = cached_eigensystem(&p)?;
        let numeric = eig.vectors.column(0);
        let overlap = psi.dotc(&numeric).norm();
        let h = qcpower_core::models::build_unit_hamiltonian(&p)?.matrix;
        let e0 = analytic_ground_energy(&p);
        let residual = (&h * &psi - psi.map(|z| z * e0)).norm();
        rows.push((v, eig.ground_energy(), e0, overlap, residual));
    }
    let meta = Metadata::new("ground-check", json!({ "model": model }));
    let data: Vec<_> = rows
        .iter()
        .map(|r| json!({ "param": r.0, "e0_numeric": r.1, "e0_analytic": r.2, "overlap": r.3, "residual": r.4 }))
        .collect();
    emit(common.output.as_deref(), common.format, &meta, &data, |out| {
        writeln!(out, "model,param,e0_numeric,e0_analytic,overlap,residual")?;
        for r in &rows {
            writeln!(out, "{model},{},{},{},{},{}", sci(r.0), sci(r.1), sci(r.2), sci(r.3), sci(r.4))?;
        }
        Ok(())
    })?;
    Ok(ExitCode::SUCCESS)
}

fn errors_cmd(common: &Common, a: &ErrorsArgs) -> Result<ExitCode> {
    let params = single_param(&a.params)?;
    if !params.has_entangled_ground_state() {
        return Err(invalid(format!("{params}: ground space has no entangled resource to distill")));
    }
    let (dist, rates) = cluster_rates(&params, a.temp)?;
    let meta = Metadata::new("errors", json!({ "model": params.model, "param": params.param, "temp": a.temp }));
    let data = json!({ "distribution": dist, "cluster": rates });
    if common.output.is_some() || common.format == Format::Json {
        emit(common.output.as_deref(), common.format, &meta, &data, |out| {
            write_table_csv(&dist, &mut *out)?;
            Ok(())
        })?;
    }
    if common.output.is_some() || common.format == Format::Csv {
        let mut stdout = std::io::stdout().lock();
        writeln!(stdout, "# {params} T={} p_s={:.6}", a.temp, dist.p_s)?;
        write_table_report(&dist, &mut stdout)?;
        writeln!(stdout, "# p_z={:.3e} p_l={:.4}", rates.p_z, rates.p_l)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn percolation_cmd(common: &Common, a: &PercolationArgs) -> Result<ExitCode> {
    let spec = LatticeSpec::new(a.lattice, a.size)?;
    let est = site_threshold(&spec, a.trials, a.seed.seed)?;
    eprintln!(
        "{} L={} p_th = {:.5} ± {:.5} ({} replicas x {} trials)",
        a.lattice,
        a.size,
        est.p_th,
        est.stderr,
        est.replicas.len(),
        a.trials
    );
    let meta = Metadata::new(
        "percolation",
        json!({ "lattice": a.lattice, "size": a.size, "trials": a.trials, "p_range": a.p_range }),
    )
    .seed(a.seed.seed);
    match &a.p_range {
        Some(r) => {
            let ps = parse_range(r)?;
            let curve = spanning_curve(&spec, &ps, a.trials, a.seed.seed)?;
            let data = json!({ "estimate": est, "p": ps, "spanning_probability": curve });
            emit(common.output.as_deref(), common.format, &meta, &data, |out| {
                write_spanning_csv(&ps, &curve, &mut *out)?;
                Ok(())
            })?;
        }
        None => {
            emit(common.output.as_deref(), common.format, &meta, &est, |out| {
                writeln!(out, "lattice,size,trials,p_th,stderr")?;
                writeln!(out, "{},{},{},{},{}", est.lattice, est.size, est.trials, sci(est.p_th), sci(est.stderr))?;
                Ok(())
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn kcurve_config(o: &KcurveOptions) -> KCurveConfig {
    KCurveConfig {
        size: o.size,
        trials: o.trials,
        seed: o.seed.seed,
        c0: o.c0,
    }
}

fn kcurve_cmd(common: &Common, a: &KcurveArgs) -> Result<ExitCode> {
    let grid = parse_range(&a.loss_range)?;
    let curve = k_curve(&grid, &kcurve_config(&a.options))?;
    let meta = Metadata::new(
        "kcurve",
        json!({ "loss_range": a.loss_range, "size": a.options.size, "trials": a.options.trials, "c0": a.options.c0 }),
    )
    .seed(a.options.seed.seed)
    .k_source(Some(curve.source.tag()));
    emit(common.output.as_deref(), common.format, &meta, &curve, |out| {
        curve.write_csv(&mut *out)?;
        Ok(())
    })?;
    Ok(ExitCode::SUCCESS)
}

fn zero_t_cmd(common: &Common, a: &ZeroTArgs) -> Result<ExitCode> {
    let (p_th, lattice, seed) = match (a.p_th, a.estimate) {
        (Some(p), _) => (p, "custom".to_string(), None),
        (None, true) => {
            let spec = LatticeSpec::new(a.lattice, a.size)?;
            (site_threshold(&spec, a.trials, a.seed.seed)?.p_th, a.lattice.to_string(), Some(a.seed.seed))
        }
        (None, false) => (a.lattice.known_threshold(), a.lattice.to_string(), None),
    };
    let b = zero_t_boundary(p_th, a.model)?;
    eprintln!("{} >= {:.4} (a*^2 = {:.4}, p_th = {:.5})", a.model.param_name(), b.param, b.a_squared, b.p_th);
    let mut meta = Metadata::new(
        "zero-t-boundary",
        json!({ "model": a.model, "lattice": lattice, "estimate": a.estimate, "trials": a.trials, "size": a.size }),
    );
    if let Some(s) = seed {
        meta = meta.seed(s);
    }
    emit(common.output.as_deref(), common.format, &meta, &b, |out| {
        writeln!(out, "model,lattice,p_th,a_squared,param")?;
        writeln!(out, "{},{lattice},{},{},{}", b.model, sci(b.p_th), sci(b.a_squared), sci(b.param))?;
        Ok(())
    })?;
    Ok(ExitCode::SUCCESS)
}

fn phase_cmd(common: &Common, a: &PhaseArgs, dim: Dim) -> Result<ExitCode> {
    let (model, params) = resolve_params(&a.params)?;
    let temps = match (&a.temp, &a.temp_range) {
        (Some(t), _) => vec![*t],
        (None, Some(r)) => parse_range(r)?,
        (None, None) => Vec::new(),
    };
    let kcurve: Option<KCurve> = match (dim, &a.k_table) {
        (Dim::Three, _) => None,
        (Dim::Two, Some(path)) => Some(KCurve::from_csv_path(path)?),
        (Dim::Two, None) => {
            let grid = parse_range("0:0.44:0.02")?;
            Some(k_curve(&grid, &kcurve_config(&a.kcurve)).context("estimating k(p_l)")?)
        }
    };
    let diagram = sweep(model, &params, &temps, dim, kcurve.as_ref(), a.tol)?;
    let found = diagram.boundary_curve().len();
    eprintln!("{dim} {model}: boundary located for {found} of {} parameter values", params.len());
    let command = if dim == Dim::Two { "phase2d" } else { "phase3d" };
    let mut meta = Metadata::new(
        command,
        json!({
            "model": model,
            "params": a.params.delta_range.as_ref().or(a.params.dz_range.as_ref()),
            "temp": a.temp,
            "temp_range": a.temp_range,
            "tol": a.tol,
            "t_max": qcpower_core::phase::T_MAX,
        }),
    )
    .k_source(diagram.k_source.clone());
    if dim == Dim::Two && a.k_table.is_none() {
        meta = meta.seed(a.kcurve.seed.seed);
    }
    emit(common.output.as_deref(), common.format, &meta, &diagram, |out| {
        diagram.write_csv(&mut *out)?;
        Ok(())
    })?;
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(common: &Common) -> Result<ExitCode> {
    let report = verify_propagation_oracle();
    println!("{report}");
    if common.output.is_some() {
        let meta = Metadata::new("verify-propagation", json!({}));
        emit(common.output.as_deref(), common.format, &meta, &report, |out| {
            writeln!(out, "rule,expected,found,branches,passed")?;
            for r in report.rules.iter().chain(&report.correlated) {
                let found: Vec<String> = r.found.iter().map(|(s, p)| format!("{s}:{p}")).collect();
                writeln!(out, "{},{},{},{},{}", r.label, r.expected, found.join(" "), r.branches, r.passed)?;
            }
            Ok(())
        })?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
