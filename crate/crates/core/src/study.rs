//! The simulation harness: replicate, estimate, aggregate.
//!
//! For each cell (family, dimension, tau target) the harness derives the
//! true parameter from the tau target, generates N samples, runs the
//! configured estimators under known margins and/or pseudo-observations,
//! and aggregates bias, RMSE and mean user time — the layout of the
//! appendix tables, with every cell carrying its factor relative to the MLE.
//!
//! Streams are addressed by (cell, replication, purpose), so the report is
//! byte-identical for a given seed regardless of thread count, and any
//! replication's data is independent of whether the others ran.

use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::estimators::{estimate, pobs, EstimatorConfig, Method};
use crate::families::{tau_inv, Family, FamilySpec};
use crate::sampling::{sample_copula, RngStream};

/// Which margins variants a study runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginsMode {
    Known,
    Pobs,
    Both,
}

impl MarginsMode {
    fn variants(self) -> &'static [Margins] {
        match self {
            MarginsMode::Known => &[Margins::Known],
            MarginsMode::Pobs => &[Margins::Pobs],
            MarginsMode::Both => &[Margins::Known, Margins::Pobs],
        }
    }
}

/// Margins variant of a single record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Margins {
    Known,
    Pobs,
}

impl Margins {
    pub fn tag(self) -> &'static str {
        match self {
            Margins::Known => "known",
            Margins::Pobs => "pobs",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "known" => Ok(Margins::Known),
            "pobs" => Ok(Margins::Pobs),
            other => Err(Error::InvalidArgument(format!(
                "unknown margins tag '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub families: Vec<Family>,
    pub d_list: Vec<usize>,
    pub tau_targets: Vec<f64>,
    pub n: usize,
    pub replications: usize,
    pub margins: MarginsMode,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    pub estimator: EstimatorConfig,
    /// Projected-wall-time guard: the harness pilots 3 replications per cell
    /// and warns on stderr when the projection exceeds this cap.
    pub wall_cap_secs: Option<f64>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            families: vec![Family::Clayton],
            d_list: vec![5],
            tau_targets: vec![0.25],
            n: 100,
            replications: 250,
            margins: MarginsMode::Known,
            methods: vec![Method::Mle],
            master_seed: 42,
            estimator: EstimatorConfig::default(),
            wall_cap_secs: None,
        }
    }
}

/// One estimator outcome inside the study.
#[derive(Clone, Debug)]
pub struct RawRecord {
    pub family: Family,
    pub d: usize,
    pub tau: f64,
    pub method: Method,
    pub margins: Margins,
    pub rep: usize,
    pub theta0: f64,
    pub theta_hat: f64,
    pub converged: bool,
    pub clamped: bool,
    pub user_time: f64,
}

/// Aggregates for one (family, d, tau, method, margins) cell.
#[derive(Clone, Debug)]
pub struct ReportRow {
    pub family: Family,
    pub d: usize,
    pub tau: f64,
    pub method: Method,
    pub margins: Margins,
    pub n_rep: usize,
    pub bias: f64,
    pub rmse: f64,
    pub mean_user_time: f64,
    pub n_fail: usize,
    pub n_clamped: usize,
    /// Metric ratios against the MLE cell of the same coordinates, when the
    /// study includes the MLE.
    pub bias_factor: f64,
    pub rmse_factor: f64,
    pub time_factor: f64,
}

#[derive(Clone, Debug)]
pub struct StudyReport {
    pub records: Vec<RawRecord>,
}

const DATA_TAG: u64 = 0x6461_7461;
const SMLE_TAG: u64 = 0x736d_6c65;

fn cell_words(family: Family, d: usize, tau: f64, rep: usize) -> [u64; 4] {
    [family.code() as u64, d as u64, tau.to_bits(), rep as u64]
}

fn run_replication(
    cfg: &StudyConfig,
    family: Family,
    d: usize,
    tau: f64,
    theta0: f64,
    rep: usize,
) -> Vec<RawRecord> {
    let spec = FamilySpec::new(family, theta0).expect("theta0 from tau_inv is admissible");
    let w = cell_words(family, d, tau, rep);
    let mut data_rng = RngStream::from_words(cfg.master_seed, &[w[0], w[1], w[2], w[3], DATA_TAG]);
    let data = sample_copula(&spec, cfg.n, d, &mut data_rng).expect("sampling cannot fail");

    let mut out = Vec::with_capacity(cfg.methods.len() * 2);
    for (mi, &margins) in cfg.margins.variants().iter().enumerate() {
        // the pobs variant ranks the same generated matrices (paired design)
        let input: DataMatrix = match margins {
            Margins::Known => data.clone(),
            Margins::Pobs => pobs(&data).expect("n >= 2"),
        };
        for (ki, &method) in cfg.methods.iter().enumerate() {
            let mut smle_rng = RngStream::from_words(
                cfg.master_seed,
                &[w[0], w[1], w[2], w[3], SMLE_TAG, mi as u64, ki as u64],
            );
            let rec = match estimate(family, &input, method, &cfg.estimator, &mut smle_rng) {
                Ok(r) => RawRecord {
                    family,
                    d,
                    tau,
                    method,
                    margins,
                    rep,
                    theta0,
                    theta_hat: r.theta_hat,
                    converged: r.converged,
                    clamped: r.clamped,
                    user_time: r.user_time,
                },
                Err(_) => RawRecord {
                    family,
                    d,
                    tau,
                    method,
                    margins,
                    rep,
                    theta0,
                    theta_hat: f64::NAN,
                    converged: false,
                    clamped: false,
                    user_time: 0.0,
                },
            };
            out.push(rec);
        }
    }
    out
}

/// Runs the full study. Replications execute in parallel; the record order
/// is deterministic (cell order, then replication index).
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    let mut records = Vec::new();
    let mut projected_total = 0.0;
    let mut warned = false;
    for &family in &cfg.families {
        for &d in &cfg.d_list {
            for &tau in &cfg.tau_targets {
                // the A family does not attain tau >= 1/3
                if family == Family::AliMikhailHaq && tau >= 1.0 / 3.0 {
                    continue;
                }
                let theta0 = tau_inv(family, tau)?;

                let pilot_n = cfg.replications.min(3);
                let pilot_start = std::time::Instant::now();
                let mut cell: Vec<Vec<RawRecord>> = (0..pilot_n)
                    .map(|rep| run_replication(cfg, family, d, tau, theta0, rep))
                    .collect();
                if let Some(cap) = cfg.wall_cap_secs {
                    let per_rep = pilot_start.elapsed().as_secs_f64() / pilot_n.max(1) as f64;
                    let threads = rayon::current_num_threads().max(1) as f64;
                    projected_total += per_rep * cfg.replications as f64 / threads;
                    if projected_total > cap && !warned {
                        warned = true;
                        eprintln!(
                            "warning: projected study wall time {projected_total:.0}s \
                             exceeds the configured cap of {cap:.0}s"
                        );
                    }
                }

                let rest: Vec<Vec<RawRecord>> = (pilot_n..cfg.replications)
                    .into_par_iter()
                    .map(|rep| run_replication(cfg, family, d, tau, theta0, rep))
                    .collect();
                cell.extend(rest);
                for recs in cell {
                    records.extend(recs);
                }
            }
        }
    }
    Ok(StudyReport { records })
}

impl StudyReport {
    /// Cell keys in first-appearance order.
    fn cells(&self) -> Vec<(Family, usize, f64, Method, Margins)> {
        let mut keys = Vec::new();
        for r in &self.records {
            let key = (r.family, r.d, r.tau, r.method, r.margins);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys
    }

    pub fn cell_records(
        &self,
        family: Family,
        d: usize,
        tau: f64,
        method: Method,
        margins: Margins,
    ) -> Vec<&RawRecord> {
        self.records
            .iter()
            .filter(|r| {
                r.family == family
                    && r.d == d
                    && r.tau == tau
                    && r.method == method
                    && r.margins == margins
            })
            .collect()
    }

    /// Aggregated rows with MLE-relative factors.
    pub fn aggregate(&self) -> Vec<ReportRow> {
        let mut rows: Vec<ReportRow> = self
            .cells()
            .into_iter()
            .map(|(family, d, tau, method, margins)| {
                let recs = self.cell_records(family, d, tau, method, margins);
                let valid: Vec<f64> = recs
                    .iter()
                    .filter(|r| r.theta_hat.is_finite())
                    .map(|r| r.theta_hat - r.theta0)
                    .collect();
                let n_valid = valid.len().max(1) as f64;
                let bias = valid.iter().sum::<f64>() / n_valid;
                let rmse =
                    (valid.iter().map(|e| e * e).sum::<f64>() / n_valid).sqrt();
                let mean_user_time =
                    recs.iter().map(|r| r.user_time).sum::<f64>() / recs.len().max(1) as f64;
                ReportRow {
                    family,
                    d,
                    tau,
                    method,
                    margins,
                    n_rep: recs.len(),
                    bias,
                    rmse,
                    mean_user_time,
                    n_fail: recs.iter().filter(|r| !r.converged).count(),
                    n_clamped: recs.iter().filter(|r| r.clamped).count(),
                    bias_factor: f64::NAN,
                    rmse_factor: f64::NAN,
                    time_factor: f64::NAN,
                }
            })
            .collect();
        // factors relative to the MLE row of the same coordinates
        let mle: Vec<(Family, usize, f64, Margins, f64, f64, f64)> = rows
            .iter()
            .filter(|r| r.method == Method::Mle)
            .map(|r| (r.family, r.d, r.tau, r.margins, r.bias, r.rmse, r.mean_user_time))
            .collect();
        for row in &mut rows {
            if let Some(m) = mle.iter().find(|(f, d, t, mg, ..)| {
                *f == row.family && *d == row.d && *t == row.tau && *mg == row.margins
            }) {
                row.bias_factor = row.bias / m.4;
                row.rmse_factor = row.rmse / m.5;
                // coarse CPU clocks can report zero for fast cells
                row.time_factor = if m.6 > 0.0 {
                    row.mean_user_time / m.6
                } else {
                    f64::NAN
                };
            }
        }
        rows
    }

    /// Five-number summaries of √|θ̂ − θ₀| per cell (the data behind the
    /// error box plots).
    pub fn sqrt_abs_error_summary(&self) -> Vec<(Family, usize, f64, Method, Margins, [f64; 5])> {
        self.cells()
            .into_iter()
            .map(|(family, d, tau, method, margins)| {
                let mut errs: Vec<f64> = self
                    .cell_records(family, d, tau, method, margins)
                    .iter()
                    .filter(|r| r.theta_hat.is_finite())
                    .map(|r| (r.theta_hat - r.theta0).abs().sqrt())
                    .collect();
                errs.sort_by(|a, b| a.partial_cmp(b).expect("finite errors"));
                let q = |p: f64| -> f64 {
                    if errs.is_empty() {
                        return f64::NAN;
                    }
                    let h = p * (errs.len() - 1) as f64;
                    let lo = h.floor() as usize;
                    let hi = h.ceil() as usize;
                    errs[lo] + (errs[hi] - errs[lo]) * (h - lo as f64)
                };
                (
                    family,
                    d,
                    tau,
                    method,
                    margins,
                    [q(0.0), q(0.25), q(0.5), q(0.75), q(1.0)],
                )
            })
            .collect()
    }

    /// Parses a raw record file produced by [`StudyReport::records_csv`].
    pub fn from_records_csv(text: &str) -> Result<StudyReport> {
        let mut records = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with("family,") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 11 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected 11 fields, found {}", fields.len()),
                });
            }
            let parse_err = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: msg.into(),
            };
            records.push(RawRecord {
                family: Family::from_code(
                    fields[0].chars().next().ok_or_else(|| parse_err("empty family"))?,
                )?,
                d: fields[1].parse().map_err(|_| parse_err("bad d"))?,
                tau: fields[2].parse().map_err(|_| parse_err("bad tau"))?,
                method: Method::parse(fields[3])?,
                margins: Margins::parse(fields[4])?,
                rep: fields[5].parse().map_err(|_| parse_err("bad rep"))?,
                theta0: fields[6].parse().map_err(|_| parse_err("bad theta0"))?,
                theta_hat: fields[7].parse().map_err(|_| parse_err("bad theta_hat"))?,
                converged: fields[8].parse().map_err(|_| parse_err("bad converged"))?,
                clamped: fields[9].parse().map_err(|_| parse_err("bad clamped"))?,
                user_time: fields[10].parse().map_err(|_| parse_err("bad user_time"))?,
            });
        }
        Ok(StudyReport { records })
    }

    /// Raw records as CSV (one line per estimator run).
    pub fn records_csv(&self) -> String {
        let mut out = String::from(
            "family,d,tau,method,margins,rep,theta0,theta_hat,converged,clamped,user_time\n",
        );
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.family.code(),
                r.d,
                r.tau,
                r.method.tag(),
                r.margins.tag(),
                r.rep,
                r.theta0,
                r.theta_hat,
                r.converged,
                r.clamped,
                r.user_time
            ));
        }
        out
    }
}

/// Metric selector for the emitted tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Bias,
    Rmse,
    Time,
}

impl Metric {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bias" => Ok(Metric::Bias),
            "rmse" => Ok(Metric::Rmse),
            "time" => Ok(Metric::Time),
            other => Err(Error::InvalidArgument(format!("unknown metric '{other}'"))),
        }
    }
}

/// Output format of the emitted tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    AlignedText,
}

/// One table per metric, rows (tau, family, d), method columns paired with
/// their MLE-relative factors. Bias and RMSE cells are multiplied by 1000;
/// times are reported in milliseconds (the same scaling).
pub fn emit_table(rows: &[ReportRow], metric: Metric, format: TableFormat) -> String {
    let mut methods: Vec<Method> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let mut coords: Vec<(f64, Family, usize, Margins)> = Vec::new();
    for r in rows {
        let c = (r.tau, r.family, r.d, r.margins);
        if !coords.contains(&c) {
            coords.push(c);
        }
    }
    coords.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.code().cmp(&b.1.code()))
            .then(a.2.cmp(&b.2))
            .then(a.3.tag().cmp(b.3.tag()))
    });

    let mut header: Vec<String> = vec![
        "tau".into(),
        "family".into(),
        "d".into(),
        "margins".into(),
    ];
    for m in &methods {
        header.push(m.tag().into());
        header.push(format!("{}_factor", m.tag()));
    }
    let mut table: Vec<Vec<String>> = vec![header];
    for (tau, family, d, margins) in coords {
        let mut line = vec![
            tau.to_string(),
            family.code().to_string(),
            d.to_string(),
            margins.tag().to_string(),
        ];
        for &m in &methods {
            let cell = rows.iter().find(|r| {
                r.tau == tau && r.family == family && r.d == d && r.margins == margins && r.method == m
            });
            match cell {
                Some(r) => {
                    let (v, f) = match metric {
                        Metric::Bias => (r.bias * 1000.0, r.bias_factor),
                        Metric::Rmse => (r.rmse * 1000.0, r.rmse_factor),
                        Metric::Time => (r.mean_user_time * 1000.0, r.time_factor),
                    };
                    line.push(format!("{v:.1}"));
                    line.push(if f.is_finite() {
                        format!("{f:.1}")
                    } else {
                        "NA".into()
                    });
                }
                None => {
                    line.push("NA".into());
                    line.push("NA".into());
                }
            }
        }
        table.push(line);
    }

    match format {
        TableFormat::Csv => table
            .iter()
            .map(|row| row.join(","))
            .collect::<Vec<_>>()
            .join("\n")
            + "\n",
        TableFormat::AlignedText => {
            let ncol = table[0].len();
            let mut widths = vec![0usize; ncol];
            for row in &table {
                for (i, cell) in row.iter().enumerate() {
                    widths[i] = widths[i].max(cell.len());
                }
            }
            let mut out = String::new();
            for row in &table {
                let mut line = String::new();
                for (i, cell) in row.iter().enumerate() {
                    if i > 0 {
                        line.push_str("  ");
                    }
                    line.push_str(&format!("{:>width$}", cell, width = widths[i]));
                }
                out.push_str(line.trim_end());
                out.push('\n');
            }
            out
        }
    }
}
