// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line driver. Every subcommand writes one primary table (CSV or JSON)
//! and a run manifest into the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::budget::{budget_table, model_curves, multi_gate_error, multi_gate_study, CHANNELS};
use crate::config::{builtin_profile, load, ExperimentConfig, ResultEnvelope, PROFILE_NAMES};
use crate::error::{Error, Result};
use crate::gate::dynamics::t_r_grid;
use crate::gate::{
    calibrated, population_dynamics, population_dynamics_analytic, GateConfig, SequenceOptions, ShapeKind,
};
use crate::rbm::{fit_decay, simulate_rb};
use crate::readout::{
    estimate_spam, optimize_thresholds, shelf_decay_bias, spam_exact, uncorrected_inflation, GateRunEmulation,
};
use crate::spinecho::simulate_epsilon_se;
use crate::tomography::{
    bell_fidelity, bias_study, fit_least_squares, fit_ml_binomial, synthesize_parity_seeded, uniform_phases,
    Corrections, FitResult, FringeParams, Measured, ParityDataset,
};
use crate::validate::run_validation;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "IONGATE_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "iongate", version, about = "Trapped-ion phase gate simulations and analyses")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; overrides --profile.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in profile name.
    #[arg(long, global = true, default_value = "table1-100us")]
    pub profile: String,
    /// Seed for all stochastic studies; defaults to the configuration seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "iongate-out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for sweeps and ensembles (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-channel error budget of the configured gate.
    Budget,
    /// Per-channel model errors against gate duration.
    Curves,
    /// Populations against total Raman duration, numeric and closed form.
    Dynamics {
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Include the configured noise channels in the numeric run.
        #[arg(long)]
        noisy: bool,
    },
    /// Synthesize (or read) a parity fringe, fit it and compose the fidelity.
    Parity {
        /// Parity data CSV (phase_rad, even_counts, shots) to fit instead of synthetic data.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Ensemble bias of the ML and LS contrast estimators.
    BiasStudy {
        #[arg(long)]
        datasets: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        contrast: Option<f64>,
    },
    /// Spin-echo error against gate duration.
    Spinecho {
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 520e-6)]
        t_max: f64,
        #[arg(long, default_value_t = 521)]
        points: usize,
    },
    /// Error of N successive gates.
    Multigate,
    /// SPAM estimation, replica bias and shelf-decay bias.
    Readout {
        #[arg(long, default_value_t = 80_000)]
        shots: u64,
        #[arg(long, default_value_t = 100)]
        replicas: u64,
    },
    /// Single-qubit randomized benchmarking simulation and fit.
    Rbm,
    /// Run the invariant suite and write per-check results.
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Budget => "budget",
            Command::Curves => "curves",
            Command::Dynamics { .. } => "dynamics",
            Command::Parity { .. } => "parity",
            Command::BiasStudy { .. } => "bias-study",
            Command::Spinecho { .. } => "spinecho",
            Command::Multigate => "multigate",
            Command::Readout { .. } => "readout",
            Command::Rbm => "rbm",
            Command::Validate => "validate",
        }
    }
}

/// Table cell; floats print with 17 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::I(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.into())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::S(b.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::text))?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Serde(e.to_string()))?)
            .map_err(|e| Error::Serde(e.to_string()))
    }
}

/// Output of one subcommand: the primary table plus summary metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyOutput {
    pub table: Table,
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_hash: String,
    pub seed: u64,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
    pub version: String,
}

/// Configuration selected by `--config` or `--profile`, with `--seed` applied.
pub fn resolve_config(g: &GlobalArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(p) => load(p)?,
        None => {
            if !PROFILE_NAMES.contains(&g.profile.as_str()) {
                return Err(Error::Config(format!(
                    "unknown profile {:?}; expected one of {PROFILE_NAMES:?}",
                    g.profile
                )));
            }
            builtin_profile(&g.profile)?
        }
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
        cfg.rb.seed = s;
    }
    cfg.check()?;
    Ok(cfg)
}

/// Run one subcommand against a resolved configuration.
pub fn run_study(cmd: &Command, cfg: &ExperimentConfig) -> Result<StudyOutput> {
    match cmd {
        Command::Budget => budget(cfg),
        Command::Curves => curves(cfg),
        Command::Dynamics { points, noisy } => dynamics(cfg, *points, *noisy),
        Command::Parity { data } => parity(cfg, data.as_deref()),
        Command::BiasStudy { datasets, shots, contrast } => bias(cfg, *datasets, *shots, *contrast),
        Command::Spinecho { t_min, t_max, points } => spinecho(cfg, *t_min, *t_max, *points),
        Command::Multigate => multigate(cfg),
        Command::Readout { shots, replicas } => readout(cfg, *shots, *replicas),
        Command::Rbm => rbm(cfg),
        Command::Validate => validate(cfg),
    }
}

fn budget(cfg: &ExperimentConfig) -> Result<StudyOutput> {
    let b = budget_table(&cfg.noise, &cfg.gate, &cfg.alphas)?;
    let mut t = Table::new(&["channel", "error"]);
    for (k, v) in &b.entries {
        t.push(vec![k.as_str().into(), (*v).into()]);
    }
    t.push(vec!["total".into(), b.total.into()]);
    let rows: serde_json::Map<String, serde_json::Value> =
        b.table_rows().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    Ok(StudyOutput { table: t, summary: json!({ "rows": rows, "total": b.total }) })
}

fn curves(cfg: &ExperimentConfig) -> Result<StudyOutput> {
    let pts = model_curves(&cfg.noise, &cfg.gate, &cfg.scattering_model(), &cfg.alphas, &cfg.sweep.grid())?;
    let mut cols = vec!["t_g"];
    cols.extend(CHANNELS);
    cols.push("total");
    let mut t = Table::new(&cols);
    for p in &pts {
        let mut row = vec![Cell::F(p.t_g)];
        row.extend(CHANNELS.iter().map(|c| Cell::F(p.budget.get(c).unwrap_or(0.0))));
        row.push(p.budget.total.into());
        t.push(row);
    }
    Ok(StudyOutput { table: t, summary: json!({ "points": pts.len(), "loops": cfg.gate.loops }) })
}

fn dynamics(cfg: &ExperimentConfig, points: usize, noisy: bool) -> Result<StudyOutput> {
    let opts = SequenceOptions::default();
    let rect =
        GateConfig { shape: ShapeKind::Rectangular, lightshift_amp: 0.0, detuning_trim: 0.0, ..cfg.gate.clone() };
    let gate = calibrated(&rect, &opts)?;
    let grid = t_r_grid(gate.t_g, points);
    let noise = if noisy { cfg.noise.clone() } else { crate::budget::NoiseParams::zero() };
    let num = population_dynamics(&gate, &noise, &grid, &opts)?;
    let ana = population_dynamics_analytic(&gate, &grid, &opts)?;
    let mut t =
        Table::new(&["t_r", "down_down", "flip", "up_up", "down_down_analytic", "flip_analytic", "up_up_analytic"]);
    let mut dev: f64 = 0.0;
    for (a, b) in num.iter().zip(&ana) {
        dev = dev.max((a.down_down - b.down_down).abs()).max((a.flip - b.flip).abs()).max((a.up_up - b.up_up).abs());
        t.push(vec![
            a.t_r.into(),
            a.down_down.into(),
            a.flip.into(),
            a.up_up.into(),
            b.down_down.into(),
            b.flip.into(),
            b.up_up.into(),
        ]);
    }
    Ok(StudyOutput { table: t, summary: json!({ "rabi": gate.rabi, "max_deviation": dev, "noisy": noisy }) })
}

fn fit_row(f: &FitResult) -> Vec<Cell> {
    vec![
        format!("{:?}", f.method).as_str().into(),
        f.c.into(),
        f.c_err.into(),
        f.c0.into(),
        f.c0_err.into(),
        f.phi0.into(),
        f.phi0_err.into(),
        f.log_likelihood.into(),
        f.reduced_chi2.into(),
        f.at_boundary.into(),
    ]
}

fn parity(cfg: &ExperimentConfig, data: Option<&Path>) -> Result<StudyOutput> {
    let p = &cfg.parity;
    let ds = match data {
        Some(path) => ParityDataset::read_csv(path)?,
        None => synthesize_parity_seeded(p.contrast, p.c0, p.phi0, &uniform_phases(p.n_phases), p.shots, cfg.seed)?,
    };
    let ml = fit_ml_binomial(&ds)?;
    let ls = fit_least_squares(&ds)?;
    let corr = Corrections { spam: None, se: Some(Measured::new(p.epsilon_se, p.epsilon_se_err)) };
    let fid = bell_fidelity(Measured::new(ml.c, ml.c_err), Measured::exact(p.psum), corr);
    let mut t = Table::new(&[
        "method",
        "contrast",
        "contrast_err",
        "c0",
        "c0_err",
        "phi0",
        "phi0_err",
        "log_likelihood",
        "reduced_chi2",
        "at_boundary",
    ]);
    t.push(fit_row(&ml));
    t.push(fit_row(&ls));
    let fringe: Vec<_> = ds
        .phases
        .iter()
        .zip(ds.even_counts.iter().zip(&ds.total_shots))
        .map(|(&phi, (&k, &n))| json!({ "phase_rad": phi, "even_counts": k, "shots": n, "ml_model": ml.probability(phi) }))
        .collect();
    Ok(StudyOutput { table: t, summary: json!({ "fidelity": fid, "fringe": fringe }) })
}

fn bias(
    cfg: &ExperimentConfig,
    datasets: Option<usize>,
    shots: Option<u64>,
    contrast: Option<f64>,
) -> Result<StudyOutput> {
    let p = &cfg.parity;
    let params = FringeParams {
        c: contrast.unwrap_or(0.995),
        c0: 0.0,
        phi0: 0.0,
        phases: uniform_phases(p.n_phases),
        shots_per_point: shots.unwrap_or(p.shots),
    };
    let n = datasets.unwrap_or(p.n_datasets);
    let s = bias_study(&params, n, cfg.seed)?;
    let mut t = Table::new(&["method", "bias", "bias_std_err", "failures", "datasets"]);
    for (m, b) in [("ml", &s.ml_bias), ("ls", &s.ls_bias)] {
        t.push(vec![m.into(), b.mean.into(), b.std_err.into(), (b.failures as u64).into(), (n as u64).into()]);
    }
    Ok(StudyOutput {
        table: t,
        summary: json!({ "params": params, "ml_consistent_with_zero": s.ml_bias.consistent_with_zero(2.0) }),
    })
}

fn spinecho(cfg: &ExperimentConfig, t_min: f64, t_max: f64, points: usize) -> Result<StudyOutput> {
    if !(t_max > t_min && t_min >= 0.0 && points >= 2) {
        return Err(Error::InvalidParameter("spinecho sweep needs 0 <= t_min < t_max and points >= 2".into()));
    }
    let grid: Vec<f64> = (0..points).map(|i| t_min + (t_max - t_min) * i as f64 / (points - 1) as f64).collect();
    let eps = simulate_epsilon_se(&cfg.spin_echo, &grid)?;
    let mut t = Table::new(&["t_g", "epsilon_se"]);
    for (&tg, &e) in grid.iter().zip(&eps) {
        t.push(vec![tg.into(), e.into()]);
    }
    let (imax, emax) =
        eps.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &e)| if e > b.1 { (i, e) } else { b });
    Ok(StudyOutput { table: t, summary: json!({ "max_epsilon_se": emax, "t_at_max": grid[imax] }) })
}

fn multigate(cfg: &ExperimentConfig) -> Result<StudyOutput> {
    let m = &cfg.multigate;
    let s = multi_gate_study(m.max_gates as u32, m.per_gate_error, m.drift_frac)?;
    let mut t = Table::new(&["n_gates", "simulated", "model", "linear_only"]);
    for (i, &n) in s.n_gates.iter().enumerate() {
        t.push(vec![
            u64::from(n).into(),
            s.simulated[i].into(),
            s.model[i].into(),
            multi_gate_error(n, m.per_gate_error, 0.0).into(),
        ]);
    }
    Ok(StudyOutput { table: t, summary: json!({ "fit": s.fit, "predicted_quadratic": s.predicted_quadratic }) })
}

fn readout(cfg: &ExperimentConfig, shots: u64, replicas: u64) -> Result<StudyOutput> {
    let m = &cfg.readout;
    let (d, u) = spam_exact(m);
    let est = estimate_spam(m, shots, cfg.seed)?;
    let reps: Vec<f64> = (0..replicas)
        .map(|i| estimate_spam(m, shots, cfg.seed.wrapping_add(1 + i)).map(|e| e.eps_spam))
        .collect::<Result<_>>()?;
    let n = reps.len().max(1) as f64;
    let mean = reps.iter().sum::<f64>() / n;
    let sd = (reps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    let emu = GateRunEmulation::default();
    let with_decay = shelf_decay_bias(m, &emu)?;
    let mut stable = m.clone();
    stable.shelf_lifetime = f64::INFINITY;
    stable.thresholds = optimize_thresholds(&stable)?;
    let no_decay = shelf_decay_bias(&stable, &emu)?;
    let inflation = uncorrected_inflation(m, &emu)?;
    let mut t = Table::new(&["quantity", "value", "std_err"]);
    let rows: [(&str, f64, f64); 12] = [
        ("decay_probability", m.decay_probability(), 0.0),
        ("eps_down_exact", d, 0.0),
        ("eps_up_exact", u, 0.0),
        ("eps_spam_exact", 0.5 * (d + u), 0.0),
        ("eps_down", est.eps_down, est.eps_down_err),
        ("eps_up", est.eps_up, est.eps_up_err),
        ("eps_spam", est.eps_spam, est.eps_spam_err),
        ("eps_spam_replica_mean", mean, sd / n.sqrt()),
        ("eps_spam_replica_sd", sd, 0.0),
        ("shelf_decay_bias", with_decay.bias, 0.0),
        ("no_decay_bias", no_decay.bias, 0.0),
        ("uncorrected_inflation", inflation, 0.0),
    ];
    for (k, v, e) in rows {
        t.push(vec![k.into(), v.into(), e.into()]);
    }
    Ok(StudyOutput {
        table: t,
        summary: json!({ "shots_per_state": shots, "replicas": replicas, "thresholds": m.thresholds }),
    })
}

fn rbm(cfg: &ExperimentConfig) -> Result<StudyOutput> {
    let records = simulate_rb(&cfg.rb, &cfg.rb_noise)?;
    let fit = fit_decay(&records)?;
    let mut t = Table::new(&["length", "survival", "survival_err", "fit"]);
    for (i, &l) in fit.lengths.iter().enumerate() {
        t.push(vec![
            u64::from(l).into(),
            fit.survival[i].into(),
            fit.survival_err[i].into(),
            (fit.a * fit.p.powi(l as i32) + fit.b).into(),
        ]);
    }
    Ok(StudyOutput {
        table: t,
        summary: json!({
            "error_per_gate": fit.error_per_gate,
            "error_per_gate_err": fit.error_per_gate_err,
            "a": fit.a,
            "p": fit.p,
            "reduced_chi2": fit.reduced_chi2,
            "records": records,
        }),
    })
}

fn validate(cfg: &ExperimentConfig) -> Result<StudyOutput> {
    let r = run_validation(cfg.seed)?;
    let mut t = Table::new(&["id", "module", "rule", "value", "target", "tolerance", "passed", "description"]);
    for c in &r.checks {
        let rule = serde_json::to_value(c.rule)?.as_str().unwrap_or_default().to_string();
        t.push(vec![
            c.id.as_str().into(),
            c.module.as_str().into(),
            rule.as_str().into(),
            c.value.into(),
            c.target.into(),
            c.tolerance.into(),
            c.passed.into(),
            c.description.as_str().into(),
        ]);
    }
    let failed: Vec<&str> = r.failures().iter().map(|c| c.id.as_str()).collect();
    Ok(StudyOutput { table: t, summary: json!({ "passed": r.passed(), "failed": failed, "coverage": r.coverage }) })
}

/// Write the primary file and summary; returns the written paths.
pub fn write_outputs(
    out: &Path,
    name: &str,
    format: Format,
    cfg: &ExperimentConfig,
    study: &StudyOutput,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let primary = out.join(format!("{name}.{}", format.extension()));
    match format {
        Format::Csv => fs::write(&primary, study.table.to_csv()?)?,
        Format::Json => {
            let env = ResultEnvelope::new(cfg, &json!({ "table": study.table, "summary": study.summary }))?;
            fs::write(&primary, serde_json::to_string_pretty(&env)? + "\n")?;
        }
    }
    let mut paths = vec![primary];
    if format == Format::Csv {
        let summary = out.join(format!("{name}-summary.json"));
        let env = ResultEnvelope::new(cfg, &study.summary)?;
        fs::write(&summary, serde_json::to_string_pretty(&env)? + "\n")?;
        paths.push(summary);
    }
    Ok(paths)
}

fn diagnostics(kind: &str, messages: &[String]) {
    eprintln!("{}", json!({ "error": kind, "messages": messages }));
}

fn exec(cli: &Cli) -> Result<i32> {
    let start = Instant::now();
    let cfg = resolve_config(&cli.global)?;
    let name = cli.command.name();
    let study = run_study(&cli.command, &cfg)?;
    let mut outputs = write_outputs(&cli.global.out, name, cli.global.format, &cfg, &study)?;
    let manifest_path = cli.global.out.join(format!("{name}-manifest.json"));
    outputs.push(manifest_path.clone());
    let manifest = RunManifest {
        subcommand: name.into(),
        config_hash: cfg.hash()?,
        seed: cfg.seed,
        outputs,
        wall_time_s: start.elapsed().as_secs_f64(),
        version: crate::VERSION.into(),
    };
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;

    if let Command::Validate = cli.command {
        for row in &study.table.rows {
            let txt: Vec<String> = row.iter().map(Cell::text).collect();
            println!(
                "{} {:<30} value={} target={}  {}",
                if txt[6] == "true" { "PASS" } else { "FAIL" },
                txt[0],
                txt[3],
                txt[4],
                txt[7]
            );
        }
        if study.summary["passed"] != json!(true) {
            let failed: Vec<String> = serde_json::from_value(study.summary["failed"].clone())?;
            diagnostics("validation", &failed);
            return Ok(EXIT_VALIDATION);
        }
    } else {
        println!("{}", serde_json::to_string(&study.summary)?.chars().take(2000).collect::<String>());
    }
    println!("wrote {}", manifest.outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "));
    Ok(EXIT_OK)
}

/// Parse arguments, run, and map errors to exit codes.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if cli.global.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build_global() {
            diagnostics("runtime", &[e.to_string()]);
            return EXIT_FAILURE;
        }
    }
    match exec(&cli) {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::Validation(_))) => {
            let msgs = match &e {
                Error::Validation(v) => v.clone(),
                other => vec![other.to_string()],
            };
            diagnostics("config", &msgs);
            EXIT_CONFIG
        }
        Err(e) => {
            diagnostics("runtime", &[e.to_string()]);
            EXIT_FAILURE
        }
    }
}
