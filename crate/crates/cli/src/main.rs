use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use debtsim::disaster::ScenarioMode;
use debtsim::econometrics::{lp_estimate, qr_estimate, CoefficientTable, ModelKind, Outcome, MAX_HORIZON};
use debtsim::ingest::{backtest, coefficient_rows, load_panel, write_coefficients, write_plot_data, Manifest};
use debtsim::pipeline::{
    run_baseline, run_counterfactual, run_fan, run_scenario, BaselineConfig, CounterfactualConfig, FanConfig,
    ScenarioConfig,
};
use debtsim::report::{
    baseline_report, counterfactual_report, scenario_report, text_table, BacktestReport, FanReport, ReportMeta,
};
use debtsim::stochastic::band_summary;
use debtsim::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_COMPUTATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "debtsim",
    version,
    about = "Public debt projections and disaster stress tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format of the report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of standard output. For `estimate`,
    /// the coefficient file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct Data {
    /// Dataset manifest (TOML).
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Baseline path, driver decomposition and threshold crossing.
    Baseline {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Last projection year; later years repeat the final assumptions.
        #[arg(long)]
        horizon_end: Option<i32>,
    },
    /// One disaster scenario against the baseline.
    Scenario {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        config: PathBuf,
        /// one_off, per_period, local_projection (lp) or quantile_regression (qr).
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon_end: Option<i32>,
        /// Add the inflation and interest channels.
        #[arg(long)]
        appendix_four_channel: bool,
    },
    /// Monte Carlo fan chart around the baseline.
    Fan {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Percentile levels in percent, e.g. 10,25,50,75,90.
        #[arg(long, value_delimiter = ',')]
        percentiles: Option<Vec<f64>>,
        /// Debt thresholds in percent of GDP for exceedance probabilities.
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        #[arg(long)]
        horizon_end: Option<i32>,
        /// Write (year, level, value) plot triples here.
        #[arg(long)]
        plot_data: Option<PathBuf>,
        /// Write every simulated path here, one row per iteration and year.
        #[arg(long)]
        paths: Option<PathBuf>,
    },
    /// Estimate impact regressions on the manifest's panel.
    Estimate {
        #[command(flatten)]
        data: Data,
        /// lp or qr.
        #[arg(long, default_value = "lp")]
        model: String,
        /// Outcome column; repeat for several. Defaults to every outcome the panel carries.
        #[arg(long)]
        outcome: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        horizons: Vec<usize>,
        /// Quantile for qr.
        #[arg(long, default_value_t = 0.95)]
        tau: f64,
    },
    /// Two regression scenarios and the difference between them.
    Counterfactual {
        #[command(flatten)]
        data: Data,
        /// Paired config with [a] and [b] sections.
        #[arg(long, conflicts_with_all = ["config_a", "config_b"])]
        config: Option<PathBuf>,
        #[arg(long, requires = "config_b")]
        config_a: Option<PathBuf>,
        #[arg(long, requires = "config_a")]
        config_b: Option<PathBuf>,
        #[arg(long)]
        horizon_end: Option<i32>,
        #[arg(long)]
        appendix_four_channel: bool,
    },
    /// Replays the accounting identity over the observed history.
    Backtest {
        #[command(flatten)]
        data: Data,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Output {
    format: Format,
    out: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: &str) -> CliResult<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text).map_err(|e| Error::Io {
                path: p.display().to_string(),
                source: e,
            })?,
            None => {
                let mut so = std::io::stdout().lock();
                let _ = so.write_all(text.as_bytes());
            }
        }
        Ok(())
    }

    fn report<T: serde::Serialize>(
        &self,
        value: &T,
        table: impl FnOnce() -> String,
        csv: impl FnOnce() -> String,
    ) -> CliResult<()> {
        let text = match self.format {
            Format::Table => table(),
            Format::Csv => csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
                s.push('\n');
                s
            }
        };
        self.emit(&text)
    }
}

fn load_manifest(data: &Data) -> CliResult<Manifest> {
    Ok(Manifest::load(&data.manifest)?)
}

fn settings(pairs: &[(&str, Option<String>)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
        .collect()
}

fn config_text(path: Option<&Path>) -> CliResult<Option<String>> {
    path.map(|p| {
        std::fs::read_to_string(p).map_err(|e| {
            Failure::Core(Error::Io {
                path: p.display().to_string(),
                source: e,
            })
        })
    })
    .transpose()
}

fn meta(manifest: &Manifest, seed: Option<u64>, pairs: &[(&str, Option<String>)]) -> CliResult<ReportMeta> {
    Ok(ReportMeta::new(manifest.digest()?, seed, settings(pairs)))
}

fn parse_mode(s: &str) -> CliResult<ScenarioMode> {
    Ok(s.parse()?)
}

fn run(cli: Cli) -> CliResult<()> {
    let output = Output {
        format: cli.format,
        out: cli.out.clone(),
    };
    match cli.command {
        Command::Baseline {
            data,
            config,
            horizon_end,
        } => {
            let m = load_manifest(&data)?;
            let cfg = match &config {
                Some(p) => BaselineConfig::load(p)?,
                None => BaselineConfig::default(),
            };
            let end = horizon_end.or(cfg.horizon_end);
            let run = run_baseline(&m, end)?;
            let meta = meta(
                &m,
                None,
                &[
                    ("command", Some("baseline".into())),
                    ("horizon_end", end.map(|y| y.to_string())),
                    ("config", config_text(config.as_deref())?),
                ],
            )?;
            let r = baseline_report(meta, &run.history.debt, &run.assumptions, run.provenance)?;
            output.report(&r, || r.render(), || r.to_csv())
        }
        Command::Scenario {
            data,
            config,
            mode,
            seed,
            horizon_end,
            appendix_four_channel,
        } => {
            let m = load_manifest(&data)?;
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(s) = &mode {
                cfg.mode = parse_mode(s)?;
            }
            if let Some(s) = seed {
                cfg.scenario.seed = Some(s);
            }
            if horizon_end.is_some() {
                cfg.horizon_end = horizon_end;
            }
            cfg.four_channel |= appendix_four_channel;
            let run = run_scenario(&m, &cfg)?;
            let seed = (cfg.mode == ScenarioMode::PerPeriod).then_some(run.spec.seed);
            let meta = meta(
                &m,
                seed,
                &[
                    ("command", Some("scenario".into())),
                    ("mode", Some(format!("{:?}", cfg.mode))),
                    ("config_file", Some(config.display().to_string())),
                    ("config", config_text(Some(&config))?),
                    ("lcompshock", run.inputs.map(|i| i.lcompshock.to_string())),
                ],
            )?;
            let r = scenario_report(
                meta,
                cfg.mode,
                run.baseline.d0,
                &run.baseline.path,
                &run.outcome,
                run.warnings,
                cfg.four_channel,
            )?;
            output.report(&r, || r.render(), || r.to_csv())
        }
        Command::Fan {
            data,
            config,
            iterations,
            seed,
            percentiles,
            thresholds,
            horizon_end,
            plot_data,
            paths,
        } => {
            let m = load_manifest(&data)?;
            let mut cfg = match &config {
                Some(p) => FanConfig::load(p)?,
                None => FanConfig::default(),
            };
            cfg.iterations = iterations.or(cfg.iterations);
            cfg.seed = seed.or(cfg.seed);
            if let Some(p) = percentiles {
                cfg.levels = Some(p.iter().map(|v| v / 100.0).collect());
            }
            if let Some(t) = thresholds {
                cfg.thresholds = Some(t.iter().map(|v| v / 100.0).collect());
            }
            cfg.horizon_end = horizon_end.or(cfg.horizon_end);
            let opts = cfg.options();
            let run = run_fan(&m, &opts, cfg.horizon_end)?;
            let exceedance = band_summary(&run.chart, &cfg.thresholds())?;
            let meta = meta(
                &m,
                Some(opts.seed),
                &[
                    ("command", Some("fan".into())),
                    ("iterations", Some(opts.iterations.to_string())),
                    ("ar1", Some(opts.ar1.to_string())),
                    ("config", config_text(config.as_deref())?),
                ],
            )?;
            let r = FanReport {
                meta,
                anchor: (run.baseline.anchor_year, run.baseline.d0),
                chart: run.chart,
                exceedance,
            };
            if let Some(p) = &plot_data {
                write_plot_data(p, &r.plot_points())?;
            }
            if let Some(p) = &paths {
                let mut s = String::from("iteration,year,d\n");
                for (k, path) in r.chart.paths.iter().enumerate() {
                    for (y, d) in r.chart.years.iter().zip(path) {
                        s.push_str(&format!("{k},{y},{d:?}\n"));
                    }
                }
                std::fs::write(p, s).map_err(|e| Error::Io {
                    path: p.display().to_string(),
                    source: e,
                })?;
            }
            output.report(&r, || r.render(), || r.to_csv())
        }
        Command::Estimate {
            data,
            model,
            outcome,
            horizons,
            tau,
        } => {
            let m = load_manifest(&data)?;
            let kind: ModelKind = model.parse()?;
            let (panel, _) = load_panel(&m)?;
            let outcomes: Vec<Outcome> = if outcome.is_empty() {
                Outcome::ALL
                    .into_iter()
                    .filter(|o| panel.rows().iter().any(|r| r.outcome(*o).is_some()))
                    .collect()
            } else {
                outcome.iter().map(|o| o.parse()).collect::<debtsim::Result<_>>()?
            };
            if let Some(h) = horizons.iter().find(|h| **h > MAX_HORIZON) {
                return Err(Failure::Usage(format!("horizon {h} above {MAX_HORIZON}")));
            }
            let mut table = CoefficientTable::new();
            for o in &outcomes {
                for &h in &horizons {
                    let set = match kind {
                        ModelKind::Lp => lp_estimate(&panel, *o, h)?,
                        ModelKind::Qr => qr_estimate(&panel, *o, h, tau)?,
                    };
                    table.insert(set)?;
                }
            }
            let rows = coefficient_rows(&table);
            if let Some(p) = &cli.out {
                write_coefficients(p, &table)?;
            }
            let text = match cli.format {
                Format::Json => {
                    let sets: Vec<_> = table.iter().collect();
                    serde_json::to_string_pretty(&sets).map_err(|e| Failure::Usage(e.to_string()))? + "\n"
                }
                Format::Csv => rows.to_csv_string(),
                Format::Table => {
                    let headers: Vec<&str> = rows.headers.iter().map(String::as_str).collect();
                    text_table(&headers, &rows.rows)
                }
            };
            let mut so = std::io::stdout().lock();
            let _ = so.write_all(text.as_bytes());
            Ok(())
        }
        Command::Counterfactual {
            data,
            config,
            config_a,
            config_b,
            horizon_end,
            appendix_four_channel,
        } => {
            let m = load_manifest(&data)?;
            let mut cfg = match (&config, &config_a, &config_b) {
                (Some(p), _, _) => CounterfactualConfig::load(p)?,
                (None, Some(a), Some(b)) => {
                    CounterfactualConfig::from_pair(&ScenarioConfig::load(a)?, &ScenarioConfig::load(b)?)?
                }
                _ => return Err(Failure::Usage("give --config or both --config-a and --config-b".into())),
            };
            if horizon_end.is_some() {
                cfg.horizon_end = horizon_end;
            }
            cfg.four_channel |= appendix_four_channel;
            let run = run_counterfactual(&m, &cfg)?;
            let text_of = |p: &Option<PathBuf>| config_text(p.as_deref());
            let meta = meta(
                &m,
                None,
                &[
                    ("command", Some("counterfactual".into())),
                    ("mode", Some(format!("{:?}", cfg.mode))),
                    ("config", text_of(&config)?),
                    ("config_a", text_of(&config_a)?),
                    ("config_b", text_of(&config_b)?),
                ],
            )?;
            let r = counterfactual_report(
                meta,
                run.a.spec.shock_start_year,
                run.a.outcome.path,
                run.b.outcome.path,
                run.paths.difference,
                cfg.four_channel,
            );
            output.report(&r, || r.render(), || r.to_csv())
        }
        Command::Backtest { data } => {
            let m = load_manifest(&data)?;
            let h = debtsim::ingest::load_history(&m)?;
            let rows = backtest(&h.assumptions, &h.debt)?;
            let meta = meta(&m, None, &[("command", Some("backtest".into()))])?;
            let r = BacktestReport { meta, rows };
            output.report(&r, || r.render(), || r.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_COMPUTATION
            })
        }
    }
}
