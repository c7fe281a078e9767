//! Command-line interface: sampling, density evaluation, estimation, the
//! uniformity transform and simulation studies over CSV files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use arcop::estimators::{estimate, pobs, EstimatorConfig, Method};
use arcop::families::{log_density, tau_inv, DensityContext};
use arcop::io::{read_csv_path, write_file_atomic};
use arcop::sampling::{sample_copula, Purpose, RngStream};
use arcop::study::{
    emit_table, run_study, MarginsMode, Metric, StudyConfig, StudyReport, TableFormat,
};
use arcop::transform::hh_transform;
use arcop::{DataMatrix, Error, Family, FamilySpec};

#[derive(Parser)]
#[command(
    name = "arcop",
    version,
    about = "Archimedean copulas: sampling, estimation and simulation studies",
    propagate_version = true
)]
struct Cli {
    /// Worker thread count (overrides the ARCOP_THREADS environment variable)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FamilyArg {
    /// Family tag: A, C, F, G or J
    #[arg(long, value_parser = parse_family)]
    family: Family,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ParamArg {
    /// Copula parameter θ
    #[arg(long)]
    theta: Option<f64>,
    /// Kendall's tau; converted to θ through the family's tau inverse
    #[arg(long)]
    tau: Option<f64>,
}

impl ParamArg {
    fn resolve(&self, family: Family) -> Result<f64, Error> {
        match (self.theta, self.tau) {
            (Some(t), None) => Ok(t),
            (None, Some(tau)) => tau_inv(family, tau),
            _ => Err(Error::InvalidArgument(
                "exactly one of --theta/--tau is required".into(),
            )),
        }
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Family::from_code(c).map_err(|e| e.to_string()),
        _ => Err(format!("expected a single family letter, got '{s}'")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw exact copula samples and write them as CSV
    Sample {
        #[command(flatten)]
        family: FamilyArg,
        #[command(flatten)]
        param: ParamArg,
        /// Number of rows
        #[arg(long)]
        n: usize,
        /// Dimension
        #[arg(long)]
        d: usize,
        /// Master seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate per-row log-densities of a CSV matrix
    Density {
        #[command(flatten)]
        family: FamilyArg,
        #[command(flatten)]
        param: ParamArg,
        /// Input CSV matrix with entries in (0,1)
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the copula parameter from a CSV matrix
    Estimate {
        #[command(flatten)]
        family: FamilyArg,
        /// Method tag (tau-tau-bar, tau-theta-bar, beta, mde-chi-cvm,
        /// mde-chi-ks, mde-gamma-cvm, mde-gamma-ks, mle, smle, dmle)
        #[arg(long, value_parser = Method::parse)]
        method: Method,
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Replace the data by pseudo-observations (column ranks / (n+1))
        #[arg(long)]
        pobs: bool,
        /// Latent block size for the simulated likelihood
        #[arg(long, default_value_t = 10_000)]
        smle_m: usize,
        /// Seed for the simulated likelihood's latent draws
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Include the Kendall component in the uniformity transform
        /// (defaults to on for d <= 5)
        #[arg(long)]
        include_k: Option<bool>,
        /// Output format: csv or jsonl
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Apply the uniformity transform; writes U' columns plus the two
    /// univariate reductions
    GofTransform {
        #[command(flatten)]
        family: FamilyArg,
        #[command(flatten)]
        param: ParamArg,
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Include the Kendall component (defaults to on for d <= 5)
        #[arg(long)]
        include_k: Option<bool>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a simulation study and write per-metric tables plus raw records
    Simulate {
        /// Flat key = value configuration file ('#' comments allowed); any
        /// flag given on the command line overrides the file
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Comma-separated family tags, e.g. C,G
        #[arg(long)]
        families: Option<String>,
        /// Comma-separated dimensions, e.g. 5,20,100
        #[arg(long)]
        d: Option<String>,
        /// Comma-separated Kendall's tau targets, e.g. 0.25,0.75
        #[arg(long)]
        tau: Option<String>,
        /// Sample size per replication
        #[arg(long)]
        n: Option<usize>,
        /// Replication count
        #[arg(long, value_name = "N")]
        replications: Option<usize>,
        /// Margins mode: known, pobs or both
        #[arg(long)]
        margins: Option<String>,
        /// Comma-separated method tags (default: all ten)
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        smle_m: Option<usize>,
        /// Warn when the projected wall time exceeds this many seconds
        #[arg(long)]
        wall_cap: Option<f64>,
        /// Output directory for rmse.csv, bias.csv, time.csv and raw.csv
        #[arg(long, default_value = "study-out")]
        out_dir: PathBuf,
    },
    /// Aggregate a raw record file into a per-metric table
    Tables {
        /// raw.csv produced by the simulate subcommand
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Metric: rmse, bias or time
        #[arg(long, default_value = "rmse")]
        metric: String,
        /// Format: aligned-text or csv
        #[arg(long, default_value = "aligned-text")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("ARCOP_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("arcop: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Error> {
    match out {
        Some(path) => write_file_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn matrix_csv(header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = String::new();
    if !header.is_empty() {
        s.push_str(&header.join(","));
        s.push('\n');
    }
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

fn read_matrix(path: &Path) -> Result<DataMatrix, Error> {
    read_csv_path(path)?.into_data_matrix()
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidArgument(format!("bad {what} entry '{tok}'")))
        })
        .collect()
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Sample {
            family,
            param,
            n,
            d,
            seed,
            out,
        } => {
            let theta = param.resolve(family.family)?;
            let spec = FamilySpec::new(family.family, theta)?;
            let mut rng = RngStream::new(seed, 0, Purpose::Data);
            let m = sample_copula(&spec, n, d, &mut rng)?;
            let header: Vec<String> = (1..=d).map(|j| format!("u{j}")).collect();
            emit(
                out.as_deref(),
                &matrix_csv(&header, m.rows().map(|r| r.to_vec())),
            )
        }
        Command::Density {
            family,
            param,
            input,
            out,
        } => {
            let theta = param.resolve(family.family)?;
            let spec = FamilySpec::new(family.family, theta)?;
            let m = read_matrix(&input)?;
            let ctx = DensityContext::new(spec, m.ncols())?;
            let mut rows = Vec::with_capacity(m.nrows());
            for row in m.rows() {
                rows.push(vec![log_density(&ctx, row)?.log()]);
            }
            emit(
                out.as_deref(),
                &matrix_csv(&["log_density".into()], rows.into_iter()),
            )
        }
        Command::Estimate {
            family,
            method,
            input,
            pobs: use_pobs,
            smle_m,
            seed,
            include_k,
            format,
        } => {
            let m = read_matrix(&input)?;
            let data = if use_pobs { pobs(&m)? } else { m };
            data.validate_open_unit()?;
            let cfg = EstimatorConfig {
                smle_m,
                mde_include_k: include_k,
                ..EstimatorConfig::default()
            };
            let mut rng = RngStream::new(seed, 0, Purpose::Smle);
            let r = estimate(family.family, &data, method, &cfg, &mut rng)?;
            let line = match format.as_str() {
                "csv" => format!(
                    "{},{},{},{},{},{}\n",
                    r.method.tag(),
                    r.theta_hat,
                    r.converged,
                    r.clamped,
                    r.objective,
                    r.user_time
                ),
                "jsonl" => format!(
                    "{{\"method\":\"{}\",\"theta_hat\":{},\"converged\":{},\"clamped\":{},\"objective\":{},\"user_time\":{}}}\n",
                    r.method.tag(),
                    r.theta_hat,
                    r.converged,
                    r.clamped,
                    if r.objective.is_finite() {
                        r.objective.to_string()
                    } else {
                        "null".into()
                    },
                    r.user_time
                ),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown format '{other}', expected csv or jsonl"
                    )))
                }
            };
            print!("{line}");
            Ok(())
        }
        Command::GofTransform {
            family,
            param,
            input,
            include_k,
            out,
        } => {
            let theta = param.resolve(family.family)?;
            let spec = FamilySpec::new(family.family, theta)?;
            let m = read_matrix(&input)?;
            let with_k = include_k.unwrap_or(m.ncols() <= 5);
            let t = hh_transform(&spec, &m, with_k)?;
            let mut header: Vec<String> =
                (1..=t.dprime()).map(|j| format!("uprime{j}")).collect();
            header.push("y_n".into());
            header.push("y_l".into());
            let rows = (0..t.uprime.nrows()).map(|i| {
                let mut row = t.uprime.row(i).to_vec();
                row.push(t.y_n[i]);
                row.push(t.y_l[i]);
                row
            });
            emit(out.as_deref(), &matrix_csv(&header, rows))
        }
        Command::Simulate {
            config,
            families,
            d,
            tau,
            n,
            replications,
            margins,
            methods,
            seed,
            smle_m,
            wall_cap,
            out_dir,
        } => {
            let mut cfg = StudyConfig {
                families: vec![Family::Clayton],
                d_list: vec![5],
                tau_targets: vec![0.25],
                n: 100,
                replications: 250,
                margins: MarginsMode::Known,
                methods: Method::ALL.to_vec(),
                master_seed: 42,
                estimator: EstimatorConfig::default(),
                wall_cap_secs: None,
            };
            if let Some(path) = config {
                apply_config_file(&mut cfg, &path)?;
            }
            if let Some(s) = families {
                cfg.families = parse_families(&s)?;
            }
            if let Some(s) = d {
                cfg.d_list = parse_list(&s, "dimension")?;
            }
            if let Some(s) = tau {
                cfg.tau_targets = parse_list(&s, "tau")?;
            }
            if let Some(v) = n {
                cfg.n = v;
            }
            if let Some(v) = replications {
                cfg.replications = v;
            }
            if let Some(s) = margins {
                cfg.margins = parse_margins(&s)?;
            }
            if let Some(s) = methods {
                cfg.methods = parse_methods(&s)?;
            }
            if let Some(v) = seed {
                cfg.master_seed = v;
            }
            if let Some(v) = smle_m {
                cfg.estimator.smle_m = v;
            }
            if let Some(v) = wall_cap {
                cfg.wall_cap_secs = Some(v);
            }

            let report = run_study(&cfg)?;
            std::fs::create_dir_all(&out_dir)?;
            let rows = report.aggregate();
            write_file_atomic(&out_dir.join("raw.csv"), &report.records_csv())?;
            for (metric, name) in [
                (Metric::Bias, "bias.csv"),
                (Metric::Rmse, "rmse.csv"),
                (Metric::Time, "time.csv"),
            ] {
                write_file_atomic(
                    &out_dir.join(name),
                    &emit_table(&rows, metric, TableFormat::Csv),
                )?;
            }
            println!(
                "wrote {} records over {} cells to {}",
                report.records.len(),
                rows.len(),
                out_dir.display()
            );
            Ok(())
        }
        Command::Tables {
            input,
            metric,
            format,
            out,
        } => {
            let text = std::fs::read_to_string(&input)?;
            let report = StudyReport::from_records_csv(&text)?;
            let rows = report.aggregate();
            let fmt = match format.as_str() {
                "csv" => TableFormat::Csv,
                "aligned-text" => TableFormat::AlignedText,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown format '{other}', expected aligned-text or csv"
                    )))
                }
            };
            emit(
                out.as_deref(),
                &emit_table(&rows, Metric::parse(&metric)?, fmt),
            )
        }
    }
}

fn parse_families(s: &str) -> Result<Vec<Family>, Error> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let mut chars = tok.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Family::from_code(c),
                _ => Err(Error::InvalidArgument(format!("bad family '{tok}'"))),
            }
        })
        .collect()
}

fn parse_methods(s: &str) -> Result<Vec<Method>, Error> {
    s.split(',').map(|tok| Method::parse(tok.trim())).collect()
}

fn parse_margins(s: &str) -> Result<MarginsMode, Error> {
    match s {
        "known" => Ok(MarginsMode::Known),
        "pobs" => Ok(MarginsMode::Pobs),
        "both" => Ok(MarginsMode::Both),
        other => Err(Error::InvalidArgument(format!(
            "unknown margins mode '{other}', expected known, pobs or both"
        ))),
    }
}

/// `key = value` lines, '#' comments.
fn apply_config_file(cfg: &mut StudyConfig, path: &Path) -> Result<(), Error> {
    let text = std::fs::read_to_string(path)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected key = value, got '{raw}'"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::Parse {
            line: lineno + 1,
            msg: format!("bad {what} value '{value}'"),
        };
        match key {
            "families" => cfg.families = parse_families(value)?,
            "d" => cfg.d_list = parse_list(value, "dimension")?,
            "tau" => cfg.tau_targets = parse_list(value, "tau")?,
            "n" => cfg.n = value.parse().map_err(|_| bad("n"))?,
            "replications" => {
                cfg.replications = value.parse().map_err(|_| bad("replications"))?
            }
            "margins" => cfg.margins = parse_margins(value)?,
            "methods" => cfg.methods = parse_methods(value)?,
            "seed" => cfg.master_seed = value.parse().map_err(|_| bad("seed"))?,
            "smle_m" => cfg.estimator.smle_m = value.parse().map_err(|_| bad("smle_m"))?,
            "wall_cap" => {
                cfg.wall_cap_secs = Some(value.parse().map_err(|_| bad("wall_cap"))?)
            }
            other => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("unknown configuration key '{other}'"),
                })
            }
        }
    }
    Ok(())
}
