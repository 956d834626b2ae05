use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use jnd_core::sur::{qp_for_target, GaussianJnd};
use jnd_core::Procedure;
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::http;
use crate::partition::{partition_packages, synthetic_sets, PackageAssignment};
use crate::pipeline::{self, FitRow, DEFAULT_NORMALITY_ALPHA, DEFAULT_TARGET_P};
use crate::samples;
use crate::service::{ServiceConfig, SessionService};

#[derive(Debug, Parser)]
#[command(
    name = "jnd",
    version,
    about = "JND campaign simulation, analysis and session service"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Flat key-value config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split sequence sets into test packages.
    Partition {
        /// Number of sequence sets (default 880).
        #[arg(long)]
        sets: Option<usize>,
        /// Number of packages (default 58).
        #[arg(long)]
        packages: Option<u32>,
    },
    /// Simulate a campaign and write its samples.
    Simulate {
        /// Number of subjects (default 32).
        #[arg(long)]
        subjects: Option<usize>,
        /// Number of sequence sets (default 14).
        #[arg(long)]
        sequences: Option<u32>,
        /// Probability that a response is flipped (default 0).
        #[arg(long)]
        lapse: Option<f64>,
        #[arg(long)]
        procedure: Option<ProcedureArg>,
    },
    /// Remove outlying subjects and samples.
    Postprocess {
        /// Sample CSV.
        #[arg(long)]
        input: PathBuf,
    },
    /// Fit a Gaussian JND model per sequence and level.
    Fit {
        /// Sample CSV, usually `cleaned.csv`.
        #[arg(long)]
        input: PathBuf,
    },
    /// QP reaching a target satisfied-user ratio.
    Sur {
        /// Mean of the JND model.
        #[arg(long, requires = "sigma", conflicts_with = "fits")]
        mu: Option<f64>,
        /// Standard deviation of the JND model.
        #[arg(long, requires = "mu")]
        sigma: Option<f64>,
        /// Fits written by `fit`.
        #[arg(long)]
        fits: Option<PathBuf>,
        /// Target satisfied-user ratio (default 0.75).
        #[arg(long)]
        p: Option<f64>,
        /// Print the SUR of every QP instead of the target QP.
        #[arg(long, requires = "mu")]
        table: bool,
    },
    /// Summary tables and plot data.
    Report {
        /// Sample CSV.
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the session API. The listen address comes from JND_LISTEN.
    Serve {
        /// Packages written by `partition`.
        #[arg(long)]
        packages: PathBuf,
        #[arg(long)]
        procedure: Option<ProcedureArg>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ProcedureArg {
    Robust,
    Legacy,
}

impl From<ProcedureArg> for Procedure {
    fn from(p: ProcedureArg) -> Self {
        match p {
            ProcedureArg::Robust => Procedure::Robust,
            ProcedureArg::Legacy => Procedure::LegacyAggressive,
        }
    }
}

fn out_dir(common: &Common) -> Result<PathBuf> {
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_csv<W: Write>(mut w: W, header: &str, lines: impl IntoIterator<Item = String>) -> std::io::Result<()> {
    writeln!(w, "{header}")?;
    for line in lines {
        writeln!(w, "{line}")?;
    }
    Ok(())
}

fn write_csv_file(path: &Path, header: &str, lines: impl IntoIterator<Item = String>) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, lines).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Names of the files a command wrote, printed on stdout.
#[derive(Serialize)]
struct Written {
    written: Vec<PathBuf>,
}

fn announce(stdout: &mut dyn Write, written: Vec<PathBuf>) -> Result<()> {
    let text = serde_json::to_string(&Written { written })?;
    writeln!(stdout, "{text}").map_err(|e| Error::io("<stdout>", e))
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let config = match &cli.common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = cli.common.seed.or(config.seed).unwrap_or(0);
    let put = |stdout: &mut dyn Write, s: String| writeln!(stdout, "{s}").map_err(|e| Error::io("<stdout>", e));

    match cli.command {
        Command::Partition { sets, packages } => {
            let sets = sets.or(config.sets).unwrap_or(880);
            let packages = packages.or(config.packages).unwrap_or(58);
            let assignment = partition_packages(&synthetic_sets(sets), packages, seed)?;
            let dir = out_dir(&cli.common)?;
            let path = dir.join("packages.json");
            write_json(&path, &assignment)?;
            announce(stdout, vec![path])
        }
        Command::Simulate {
            subjects,
            sequences,
            lapse,
            procedure,
        } => {
            let config = Config {
                subjects: subjects.or(config.subjects),
                sequences: sequences.or(config.sequences),
                lapse_rate: lapse.or(config.lapse_rate),
                ..config
            };
            let procedure = procedure
                .map(Procedure::from)
                .or(config.procedure)
                .unwrap_or(Procedure::Robust);
            let spec = pipeline::population_spec(&config, seed)?;
            let campaign = pipeline::simulate(&spec, procedure)?;
            let dir = out_dir(&cli.common)?;
            let samples_path = dir.join("samples.csv");
            samples::write_dataset(&samples_path, &campaign.dataset)?;
            let campaign_path = dir.join("campaign.json");
            write_json(
                &campaign_path,
                &serde_json::json!({
                    "procedure": procedure,
                    "spec": spec,
                    "rounds": campaign.rounds,
                    "halted": campaign.halted,
                    "monotonicity_redraws": campaign.monotonicity_redraws,
                    "censored": campaign.censored_count(),
                }),
            )?;
            announce(stdout, vec![samples_path, campaign_path])
        }
        Command::Postprocess { input } => {
            let dataset = samples::read_dataset(&input)?;
            let (cleaned, reports) = pipeline::clean(&dataset, &config.postprocess())?;
            let dir = out_dir(&cli.common)?;
            let cleaned_path = dir.join("cleaned.csv");
            samples::write_dataset(&cleaned_path, &cleaned)?;
            let report_path = dir.join("outliers.json");
            write_json(&report_path, &reports)?;
            announce(stdout, vec![cleaned_path, report_path])
        }
        Command::Fit { input } => {
            let dataset = samples::read_dataset(&input)?;
            let dir = out_dir(&cli.common)?;
            let path = dir.join("fits.json");
            write_json(&path, &pipeline::fit(&dataset))?;
            announce(stdout, vec![path])
        }
        Command::Sur {
            mu,
            sigma,
            fits,
            p,
            table,
        } => {
            let p = p.or(config.target_p).unwrap_or(DEFAULT_TARGET_P);
            match (mu, sigma, fits) {
                (Some(mu), Some(sigma), None) => {
                    let model = GaussianJnd::new(mu, sigma)?;
                    if table {
                        let mut buf = Vec::new();
                        write_csv(
                            &mut buf,
                            "qp,sur",
                            pipeline::sur_table(&model)
                                .into_iter()
                                .map(|(qp, s)| format!("{qp},{s:.6}")),
                        )
                        .map_err(|e| Error::io("<stdout>", e))?;
                        stdout.write_all(&buf).map_err(|e| Error::io("<stdout>", e))
                    } else {
                        put(stdout, qp_for_target(&model, p)?.to_string())
                    }
                }
                (None, None, Some(path)) => {
                    let fits: Vec<FitRow> = read_json(&path)?;
                    let rows = pipeline::sur_targets(&fits, p)?;
                    let dir = out_dir(&cli.common)?;
                    let path = dir.join("sur.csv");
                    write_csv_file(
                        &path,
                        "jnd_index,content_id,resolution,mean,sd,p,qp",
                        rows.iter().map(|r| {
                            format!(
                                "{},{},{},{:.4},{:.4},{},{}",
                                r.jnd_index, r.content_id, r.resolution, r.mean, r.sd, r.p, r.qp
                            )
                        }),
                    )?;
                    announce(stdout, vec![path])
                }
                _ => Err(Error::Validation("give either --mu and --sigma, or --fits".into())),
            }
        }
        Command::Report { input } => {
            let dataset = samples::read_dataset(&input)?;
            let alpha = config.normality_alpha.unwrap_or(DEFAULT_NORMALITY_ALPHA);
            let report = pipeline::report(&dataset, alpha);
            let dir = out_dir(&cli.common)?;
            let s = &report.summary;
            let summary_path = dir.join("summary.json");
            write_json(&summary_path, &report)?;
            let boxplot = dir.join("boxplot.csv");
            write_csv_file(
                &boxplot,
                "jnd_index,content_id,resolution,n,censored,mean,sd,q1,median,q3,whisker_low,whisker_high",
                s.boxplots.iter().map(|b| {
                    format!(
                        "{},{},{},{},{},{:.4},{:.4},{},{},{},{:.4},{:.4}",
                        b.jnd_index,
                        b.sequence.content,
                        b.sequence.resolution,
                        b.n,
                        b.censored,
                        b.mean,
                        b.sd,
                        b.q1,
                        b.median,
                        b.q3,
                        b.whisker_low,
                        b.whisker_high
                    )
                }),
            )?;
            let histogram = dir.join("histogram.csv");
            write_csv_file(
                &histogram,
                "jnd_index,qp,count",
                s.histograms.iter().flat_map(|h| {
                    h.counts
                        .iter()
                        .enumerate()
                        .map(move |(qp, c)| format!("{},{qp},{c}", h.jnd_index))
                }),
            )?;
            let scatter = dir.join("scatter.csv");
            write_csv_file(
                &scatter,
                "resolution,jnd_index,content_id,mean,sd",
                s.scatter.iter().map(|p| {
                    format!(
                        "{},{},{},{:.4},{:.4}",
                        p.resolution, p.jnd_index, p.sequence.content, p.mean, p.sd
                    )
                }),
            )?;
            let normality = dir.join("normality.csv");
            write_csv_file(
                &normality,
                "resolution,jnd_index,tested,jb_passed,beta2_passed,pass_rate",
                s.normality.iter().map(|r| {
                    format!(
                        "{},{},{},{},{},{:.4}",
                        r.resolution, r.jnd_index, r.tested, r.jb_passed, r.beta2_passed, r.pass_rate
                    )
                }),
            )?;
            announce(stdout, vec![summary_path, boxplot, histogram, scatter, normality])
        }
        Command::Serve { packages, procedure } => {
            let packages: Vec<PackageAssignment> = read_json(&packages)?;
            let service = SessionService::open(
                packages,
                ServiceConfig {
                    procedure: procedure
                        .map(Procedure::from)
                        .or(config.procedure)
                        .unwrap_or(Procedure::Robust),
                    clip_template: config
                        .clip_template
                        .clone()
                        .unwrap_or_else(|| crate::session::DEFAULT_CLIP_TEMPLATE.into()),
                    seed,
                    data_dir: Some(out_dir(&cli.common)?),
                },
            )?;
            let addr = http::listen_addr();
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
            eprintln!("listening on {addr}");
            runtime
                .block_on(http::serve(Arc::new(service), &addr))
                .map_err(|e| Error::io(addr, e))
        }
    }
}
