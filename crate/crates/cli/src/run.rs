//! Command execution.

use std::io::Write;

use rayon::prelude::*;
use serde_json::{json, Value};

use qring::model::{derive_state_quantities, sample_potential, ModelParams, QuantityKind, QuantumNumbers, UnitScale};
use qring::observables::{total_magnetization, EnsembleResult};
use qring::oracle::{validate, Tolerances, ValidationReport};
use qring::spectrum::enumerate_states;
use qring::wavefunction::{density_samples, Coordinate};

use crate::args::{CommandKind, Format, RunConfig, SweepParam};
use crate::output::{scale, spectrum_row, Cell, Table, SPECTRUM_COLUMNS};
use crate::CliError;

/// Rendered result of one command plus the exit code it asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub table: Table,
    pub json: Value,
    pub exit_code: i32,
}

impl Rendered {
    pub fn bytes(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.table.to_csv().into_bytes(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s.into_bytes()
            }
        }
    }
}

fn header(command: CommandKind, params: &ModelParams) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command_name(command)));
    m.insert("units".into(), json!(params.units()));
    m.insert("params".into(), json!(params));
    m
}

fn command_name(c: CommandKind) -> &'static str {
    match c {
        CommandKind::Spectrum => "spectrum",
        CommandKind::Potential => "potential",
        CommandKind::Wavefunction => "wavefunction",
        CommandKind::Magnetization => "magnetization",
        CommandKind::Current => "current",
        CommandKind::Sweep => "sweep",
        CommandKind::Validate => "validate",
    }
}

fn plain(command: CommandKind, params: &ModelParams, table: Table) -> Rendered {
    let mut m = header(command, params);
    m.insert("rows".into(), table.json_rows());
    Rendered {
        json: Value::Object(m),
        table,
        exit_code: 0,
    }
}

/// Runs the configured command and returns its output without writing it.
pub fn execute(config: &RunConfig) -> Result<Rendered, CliError> {
    match config.command {
        CommandKind::Spectrum => spectrum(config, &config.params).map(|t| plain(config.command, &config.params, t)),
        CommandKind::Potential => potential(config).map(|t| plain(config.command, &config.params, t)),
        CommandKind::Wavefunction => wavefunction(config).map(|t| plain(config.command, &config.params, t)),
        CommandKind::Magnetization | CommandKind::Current => {
            ensemble(config, &config.params, config.command, config.per_state)
                .map(|t| plain(config.command, &config.params, t))
        }
        CommandKind::Validate => {
            let report = run_validation(config, &config.params)?;
            Ok(render_validation(config, report))
        }
        CommandKind::Sweep => sweep(config),
    }
}

/// Executes and writes the output; returns the process exit code.
pub fn run(config: &RunConfig) -> Result<i32, CliError> {
    let rendered = execute(config)?;
    let bytes = rendered.bytes(config.output.format);
    match &config.output.path {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes).and_then(|_| out.flush()).map_err(CliError::Write)?;
        }
    }
    Ok(rendered.exit_code)
}

fn spectrum(config: &RunConfig, params: &ModelParams) -> Result<Table, CliError> {
    let table = enumerate_states(params, &config.enumeration)?;
    if table.is_empty() {
        return Err(CliError::EmptySpectrum);
    }
    let units = params.units();
    let mut t = Table::new(SPECTRUM_COLUMNS);
    for r in &table.rows {
        t.push(spectrum_row(r, &units));
    }
    Ok(t)
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let last = (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / last })
        .collect()
}

fn potential(config: &RunConfig) -> Result<Table, CliError> {
    let p = &config.params;
    let rho0 = p.confinement_scales().rho0;
    let top = config.sampling.range_max.unwrap_or(if rho0 > 0.0 {
        3.0 * rho0
    } else {
        p.geometry().radius().unwrap_or(1.0)
    });
    let n = config.sampling.samples;
    // ρ = 0 is singular for λ₂ > 0, so the grid starts one step out
    let grid: Vec<f64> = (1..=n).map(|i| top * i as f64 / n as f64).collect();
    let values = sample_potential(p, &grid)?;
    let units = p.units();
    let mut t = Table::new(["rho", "V"]);
    for (r, v) in grid.iter().zip(values) {
        t.push(vec![
            scale(*r, QuantityKind::Length, &units).into(),
            scale(v, QuantityKind::Energy, &units).into(),
        ]);
    }
    Ok(t)
}

fn wavefunction(config: &RunConfig) -> Result<Table, CliError> {
    let p = &config.params;
    let qn = config.state.unwrap_or(QuantumNumbers::new(0, 0));
    let s = config.sampling;
    let (name, lo, hi) = match s.coordinate {
        Coordinate::Rho => {
            let d = derive_state_quantities(p, qn);
            let reach = d.rho_m.or((d.rho0 > 0.0).then_some(d.rho0));
            let default = reach.map_or(p.geometry().radius().unwrap_or(1.0), |r| 4.0 * r);
            ("rho", 0.0, s.range_max.unwrap_or(default))
        }
        Coordinate::Theta => ("theta", 0.0, s.range_max.unwrap_or(std::f64::consts::PI)),
        Coordinate::X => ("x", 0.0, s.range_max.unwrap_or(1.0)),
    };
    let grid = linspace(lo, hi, s.samples);
    let samples = density_samples(p, qn, s.coordinate, &grid)?;
    let units = p.units();
    let mut t = Table::new([name, "density"]);
    for (c, d) in samples {
        let row = if s.coordinate == Coordinate::Rho {
            vec![
                scale(c, QuantityKind::Length, &units).into(),
                (d / units.length_unit).into(),
            ]
        } else {
            vec![c.into(), d.into()]
        };
        t.push(row);
    }
    Ok(t)
}

fn ensemble_result(config: &RunConfig, params: &ModelParams) -> Result<EnsembleResult, CliError> {
    let spec = config.ensemble.ok_or_else(|| CliError::Usage("ensemble settings missing".into()))?;
    Ok(total_magnetization(params, &spec, &config.enumeration)?)
}

fn quantity(command: CommandKind) -> (&'static str, QuantityKind) {
    if command == CommandKind::Current {
        ("current", QuantityKind::Current)
    } else {
        ("moment", QuantityKind::Moment)
    }
}

fn ensemble(config: &RunConfig, params: &ModelParams, command: CommandKind, per_state: bool) -> Result<Table, CliError> {
    let r = ensemble_result(config, params)?;
    let units = params.units();
    let (name, kind) = quantity(command);
    let total = if command == CommandKind::Current {
        r.total_current
    } else {
        r.total_moment
    };
    if per_state {
        let mut t = Table::new(["n", "m", "energy", "weight", name, "flags"]);
        for s in &r.states {
            let v = if command == CommandKind::Current {
                s.current
            } else {
                s.record.moment
            };
            let mut flags = s.record.flags.labels();
            if command == CommandKind::Current && s.numeric_current {
                flags.push("numeric");
            }
            t.push(vec![
                Cell::Int(s.record.qn.n.into()),
                Cell::Int(s.record.qn.m.into()),
                scale(s.record.energy, QuantityKind::Energy, &units).into(),
                s.weight.into(),
                scale(v, kind, &units).into(),
                flags.join(";").into(),
            ]);
        }
        let weight: f64 = r.states.iter().map(|s| s.weight).sum();
        t.push(vec![
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            weight.into(),
            scale(total, kind, &units).into(),
            "total".into(),
        ]);
        Ok(t)
    } else {
        let mut t = Table::new(["electrons", "temperature", "chemical_potential", name, "open_shell"]);
        t.push(vec![
            Cell::Int(r.spec.electrons as i64),
            scale(r.spec.temperature, QuantityKind::Energy, &units).into(),
            r.chemical_potential.map(|mu| scale(mu, QuantityKind::Energy, &units)).into(),
            scale(total, kind, &units).into(),
            r.open_shell.into(),
        ]);
        Ok(t)
    }
}

fn run_validation(config: &RunConfig, params: &ModelParams) -> Result<ValidationReport, CliError> {
    let states: Vec<QuantumNumbers> = match config.state {
        Some(qn) => vec![qn],
        None => {
            let table = enumerate_states(params, &config.enumeration)?;
            table.rows.iter().map(|r| r.qn).collect()
        }
    };
    if states.is_empty() {
        return Err(CliError::EmptySpectrum);
    }
    let mut report = validate(params, &states, &Tolerances::default(), &config.grid);
    convert_report(&mut report, &params.units());
    Ok(report)
}

fn convert_report(report: &mut ValidationReport, units: &UnitScale) {
    let e = |v: f64| scale(v, QuantityKind::Energy, units);
    for row in &mut report.rows {
        row.e_closed_half = e(row.e_closed_half);
        row.e_closed_full = e(row.e_closed_full);
        row.e_oracle = row.e_oracle.map(e);
    }
    for c in &mut report.derivative_checks {
        let m = |v: f64| scale(v, QuantityKind::Moment, units);
        let i = |v: f64| scale(v, QuantityKind::Current, units);
        c.moment = c.moment.map(m);
        c.moment_numeric = c.moment_numeric.map(m);
        c.current = c.current.map(i);
        c.current_numeric = c.current_numeric.map(i);
    }
}

fn verdict_name(report: &ValidationReport) -> String {
    json!(report.summary.verdict).as_str().unwrap_or_default().to_owned()
}

fn validation_exit(report: &ValidationReport) -> i32 {
    if report.summary.neither_within() {
        4
    } else {
        0
    }
}

fn render_validation(config: &RunConfig, report: ValidationReport) -> Rendered {
    let verdict = verdict_name(&report);
    let mut t = Table::new([
        "n",
        "m",
        "E_closed_half",
        "E_closed_full",
        "E_oracle",
        "rel_err_half",
        "rel_err_full",
        "beyond_bound",
        "slow_convergence",
        "derivatives_ok",
        "verdict",
    ]);
    for (row, check) in report.rows.iter().zip(&report.derivative_checks) {
        t.push(vec![
            Cell::Int(row.qn.n.into()),
            Cell::Int(row.qn.m.into()),
            row.e_closed_half.into(),
            row.e_closed_full.into(),
            row.e_oracle.into(),
            row.rel_err_half.into(),
            row.rel_err_full.into(),
            row.beyond_bound.into(),
            row.slow_convergence.into(),
            check.passed.into(),
            verdict.clone().into(),
        ]);
    }
    let mut m = header(config.command, &config.params);
    if let Value::Object(r) = json!(report) {
        m.extend(r);
    }
    Rendered {
        table: t,
        exit_code: validation_exit(&report),
        json: Value::Object(m),
    }
}

fn with_param(params: &ModelParams, param: SweepParam, v: f64) -> Result<ModelParams, CliError> {
    let b = params.to_builder();
    let b = match param {
        SweepParam::B => b.field(v),
        SweepParam::Flux => b.flux(v),
        SweepParam::A => b.radius(v),
    };
    b.build().map_err(|e| CliError::Usage(e.to_string()))
}

/// One summary row of `of` at one parameter point, with its exit code.
fn sweep_point(config: &RunConfig, params: &ModelParams, of: CommandKind) -> Result<(Table, i32), CliError> {
    match of {
        CommandKind::Spectrum => {
            let mut t = spectrum(config, params)?;
            t.rows.truncate(1);
            Ok((t, 0))
        }
        CommandKind::Validate => {
            let report = run_validation(config, params)?;
            let s = &report.summary;
            let mut t = Table::new([
                "max_rel_err_half",
                "max_rel_err_full",
                "compared_rows",
                "derivatives_ok",
                "verdict",
            ]);
            t.push(vec![
                s.max_rel_err_half.into(),
                s.max_rel_err_full.into(),
                Cell::Int(s.compared_rows as i64),
                s.derivative_checks_passed.into(),
                verdict_name(&report).into(),
            ]);
            Ok((t, validation_exit(&report)))
        }
        other => Ok((ensemble(config, params, other, false)?, 0)),
    }
}

fn sweep(config: &RunConfig) -> Result<Rendered, CliError> {
    let spec = config.sweep.ok_or_else(|| CliError::Usage("sweep settings missing".into()))?;
    let points = spec.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<(Table, i32), CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|&v| {
                let p = with_param(&config.params, spec.param, v)?;
                sweep_point(config, &p, spec.of)
            })
            .collect()
    });

    let units = config.params.units();
    let mut table: Option<Table> = None;
    let mut exit_code = 0;
    for r in results {
        let (t, code) = r?;
        exit_code = exit_code.max(code);
        match &mut table {
            None => table = Some(t),
            Some(acc) => acc.rows.extend(t.rows),
        }
    }
    let leading: Vec<Cell> = points
        .iter()
        .map(|&v| match spec.param {
            SweepParam::B => scale(v, QuantityKind::Field, &units).into(),
            SweepParam::A => scale(v, QuantityKind::Length, &units).into(),
            SweepParam::Flux => v.into(),
        })
        .collect();
    let table = table.unwrap_or_default().with_leading(spec.param.column(), &leading);
    let mut m = header(config.command, &config.params);
    m.insert("of".into(), json!(command_name(spec.of)));
    m.insert("parameter".into(), json!(spec.param.column()));
    m.insert("rows".into(), table.json_rows());
    Ok(Rendered {
        table,
        json: Value::Object(m),
        exit_code,
    })
}
