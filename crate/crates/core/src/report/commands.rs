use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::storm_report::{format_penalty, save_report, BinormalSummary, StormReport, SummaryRow};
use super::{load_report, svg};
use crate::cluster::{cut_dendrogram, event_features, single_linkage, DEFAULT_JUMP_THRESHOLD};
use crate::error::{Error, Result};
use crate::event::HailEvent;
use crate::fit::{
    fit_chi, fit_lognormal, fit_lognormal_euclidean, goodness_of_fit, radial_series_with, BinormalFit,
    DistanceMetric, FitError,
};
use crate::ingest::{parse_csv, write_csv, Dataset, ParseOptions, SwdiClient, DEFAULT_SWDI_BASE, DEFAULT_SWDI_PRODUCT};
use crate::storm::{sample_events, Velocity2};

pub const DEFAULT_CONTOUR_LEVELS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

/// Which fits `cmd_fit` runs and how storms are formed.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub metric: DistanceMetric,
    pub run_chi: bool,
    pub run_lognormal: bool,
    /// Treat all input events as one storm instead of clustering.
    pub single_storm: bool,
    /// Use a previously written `clusters.json` instead of clustering.
    pub clusters: Option<PathBuf>,
    pub contour_levels: Vec<f64>,
    pub plots: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            metric: DistanceMetric::Mahalanobis,
            run_chi: true,
            run_lognormal: true,
            single_storm: false,
            clusters: None,
            contour_levels: DEFAULT_CONTOUR_LEVELS.to_vec(),
            plots: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub time_scale: f64,
    pub jump_threshold: f64,
    pub seed: u64,
    /// Date applied to `HH:MM:SS` time stamps in the inputs.
    pub date: Option<NaiveDate>,
    pub velocity: [f64; 2],
    pub count: usize,
    pub swdi_base: String,
    pub swdi_product: String,
    pub fit: FitOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            out_dir: PathBuf::from("."),
            time_scale: 0.0,
            jump_threshold: DEFAULT_JUMP_THRESHOLD,
            seed: 0,
            date: None,
            velocity: [0.0, 0.0],
            count: 1000,
            swdi_base: DEFAULT_SWDI_BASE.to_string(),
            swdi_product: DEFAULT_SWDI_PRODUCT.to_string(),
            fit: FitOptions::default(),
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if !(self.time_scale >= 0.0) || !self.time_scale.is_finite() {
            return Err(Error::Usage(format!("time scale {} must be finite and nonnegative", self.time_scale)));
        }
        if !(self.jump_threshold > 1.0) || !self.jump_threshold.is_finite() {
            return Err(Error::Usage(format!("jump threshold {} must exceed 1", self.jump_threshold)));
        }
        Ok(())
    }
}

/// Contents of `clusters.json`. Storm ids start at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterFile {
    pub storm_count: usize,
    pub jump_threshold: f64,
    pub jump_ratio: f64,
    pub time_scale: f64,
    /// Storm id of each input event, in input order.
    pub assignments: Vec<usize>,
    /// Event count per storm; entry `k` belongs to storm `k + 1`.
    pub counts: Vec<usize>,
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })?;
    write_atomic(path, json.as_bytes())
}

/// Reads and concatenates every input CSV, in order.
pub fn load_events(inputs: &[PathBuf], date: Option<NaiveDate>) -> Result<Vec<HailEvent>> {
    if inputs.is_empty() {
        return Err(Error::Usage("no input files given".into()));
    }
    let mut events = Vec::new();
    for path in inputs {
        let file = fs::File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let options = ParseOptions {
            date,
            source: path.display().to_string(),
        };
        let dataset = parse_csv(file, &options)?;
        for row in &dataset.skipped {
            log_skip(&dataset.source, row.line_number, row.reason.as_str());
        }
        events.extend(dataset.events);
    }
    Ok(events)
}

fn log_skip(source: &str, line: u64, reason: &str) {
    eprintln!("warning: {source}:{line}: skipped ({reason})");
}

fn cluster_events(events: &[HailEvent], config: &RunConfig) -> Result<ClusterFile> {
    let features = event_features(events, config.time_scale)?;
    let dendrogram = single_linkage(&features)?;
    let cut = cut_dendrogram(&dendrogram, config.jump_threshold)?;
    let mut counts = vec![0; cut.cluster_count];
    for &label in &cut.assignments {
        counts[label] += 1;
    }
    Ok(ClusterFile {
        storm_count: cut.cluster_count,
        jump_threshold: config.jump_threshold,
        jump_ratio: cut.jump_ratio,
        time_scale: config.time_scale,
        assignments: cut.assignments.iter().map(|l| l + 1).collect(),
        counts,
    })
}

/// Clusters the input events into storms and writes `clusters.json`.
pub fn cmd_cluster(config: &RunConfig) -> Result<ClusterFile> {
    config.validate()?;
    let events = load_events(&config.inputs, config.date)?;
    let clusters = cluster_events(&events, config)?;
    ensure_dir(&config.out_dir)?;
    write_json(&clusters, &config.out_dir.join("clusters.json"))?;
    Ok(clusters)
}

fn load_clusters(path: &Path) -> Result<ClusterFile> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

fn group_storms(events: Vec<HailEvent>, config: &RunConfig) -> Result<Vec<Vec<HailEvent>>> {
    if config.fit.single_storm {
        return Ok(vec![events]);
    }
    let clusters = match &config.fit.clusters {
        Some(path) => {
            let file = load_clusters(path)?;
            if file.assignments.len() != events.len() {
                return Err(Error::Usage(format!(
                    "{} assigns {} events but the input has {}",
                    path.display(),
                    file.assignments.len(),
                    events.len()
                )));
            }
            file
        }
        None => cluster_events(&events, config)?,
    };
    let storm_count = clusters.assignments.iter().copied().max().unwrap_or(0);
    let mut storms = vec![Vec::new(); storm_count];
    for (event, &id) in events.into_iter().zip(&clusters.assignments) {
        if id == 0 {
            return Err(Error::Usage("storm ids in a cluster file start at 1".into()));
        }
        storms[id - 1].push(event);
    }
    Ok(storms)
}

/// A finished storm analysis: the report plus plot files keyed by name.
pub struct StormAnalysis {
    pub report: StormReport,
    pub artifacts: Vec<(String, String)>,
}

/// Runs the full per-storm pipeline. Failures of individual steps are
/// recorded in the report notes instead of aborting.
pub fn analyze_storm(storm_id: usize, events: &[HailEvent], options: &FitOptions) -> StormAnalysis {
    let mut report = StormReport {
        storm_id,
        event_count: events.len(),
        metric: options.metric,
        skipped: None,
        binormal: None,
        chi: None,
        lognormal_d: None,
        lognormal_euclidean: None,
        gof: None,
        notes: Vec::new(),
    };
    let mut artifacts = Vec::new();

    let fit = match BinormalFit::from_events(events) {
        Ok(fit) => fit,
        Err(err) => {
            report.skipped = Some(err.to_string());
            return StormAnalysis { report, artifacts };
        }
    };
    report.binormal = Some(BinormalSummary::from(&fit));

    let series = match radial_series_with(events, &fit, options.metric) {
        Ok(series) => series,
        Err(err) => {
            report.skipped = Some(err.to_string());
            return StormAnalysis { report, artifacts };
        }
    };

    let mut note = |what: &str, err: FitError| report_note(&mut report.notes, what, err);
    let chi = if options.run_chi {
        fit_chi(&series).map_err(|e| note("chi fit", e)).ok()
    } else {
        None
    };
    let (lognormal_d, lognormal_euclidean) = if options.run_lognormal {
        (
            fit_lognormal(&series).map_err(|e| note("log-normal fit", e)).ok(),
            fit_lognormal_euclidean(events, &fit)
                .map_err(|e| note("Euclidean log-normal fit", e))
                .ok(),
        )
    } else {
        (None, None)
    };
    if let (Some(c), Some(l)) = (&chi, &lognormal_d) {
        match goodness_of_fit(&series, c, l) {
            Ok(gof) => {
                report.notes.push(format!(
                    "F statistic = (S_F / {}) / (S_G^d / {}); chi fit has one parameter, log-normal two",
                    gof.dof.0, gof.dof.1
                ));
                report.gof = Some(gof);
            }
            Err(err) => report_note(&mut report.notes, "goodness of fit", err),
        }
    }
    for ln in [&lognormal_d, &lognormal_euclidean].into_iter().flatten() {
        if ln.degenerate {
            report.notes.push("log-normal fit degenerate: all distances equal".into());
        }
    }

    if options.plots {
        let title = format!("storm {storm_id}");
        artifacts.push((
            format!("cdf{storm_id}.svg"),
            svg::cdf_plot(&series, chi.as_ref(), lognormal_d.as_ref(), &title),
        ));
        let (qq_chi, qq_ln) = report
            .gof
            .as_ref()
            .map(|g| (g.qq_chi.clone(), g.qq_lognormal.clone()))
            .unwrap_or_default();
        artifacts.push((format!("qq{storm_id}.svg"), svg::qq_plot(&qq_chi, &qq_ln, &title)));
        match svg::contour_plot(events, &fit, &options.contour_levels, &title) {
            Ok(text) => artifacts.push((format!("contours{storm_id}.svg"), text)),
            Err(err) => report_note(&mut report.notes, "contour plot", err),
        }
    }

    report.chi = chi;
    report.lognormal_d = lognormal_d;
    report.lognormal_euclidean = lognormal_euclidean;
    StormAnalysis { report, artifacts }
}

fn report_note(notes: &mut Vec<String>, what: &str, err: FitError) {
    notes.push(format!("{what} failed: {err}"));
}

/// Fits every storm and writes `storm<k>.json` plus its plots. Storms whose
/// covariance is degenerate are reported with `skipped` set.
pub fn cmd_fit(config: &RunConfig) -> Result<Vec<StormReport>> {
    config.validate()?;
    let events = load_events(&config.inputs, config.date)?;
    let storms = group_storms(events, config)?;
    ensure_dir(&config.out_dir)?;
    let mut reports = Vec::with_capacity(storms.len());
    for (k, storm) in storms.iter().enumerate() {
        let analysis = analyze_storm(k + 1, storm, &config.fit);
        save_report(&analysis.report, &config.out_dir.join(format!("storm{}.json", k + 1)))?;
        for (name, text) in &analysis.artifacts {
            write_atomic(&config.out_dir.join(name), text.as_bytes())?;
        }
        reports.push(analysis.report);
    }
    Ok(reports)
}

/// Samples `config.count` events from the traveling storm model and writes
/// them to `simulated.csv` (or to `out_dir` itself when it names a `.csv`).
pub fn cmd_simulate(config: &RunConfig) -> Result<PathBuf> {
    if config.count == 0 {
        return Err(Error::Usage("count must be at least 1".into()));
    }
    let velocity = Velocity2::new(config.velocity[0], config.velocity[1])?;
    let events = sample_events(config.count, velocity, config.seed)?;
    let path = if config.out_dir.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        if let Some(parent) = config.out_dir.parent().filter(|p| !p.as_os_str().is_empty()) {
            ensure_dir(parent)?;
        }
        config.out_dir.clone()
    } else {
        ensure_dir(&config.out_dir)?;
        config.out_dir.join("simulated.csv")
    };
    let dataset = Dataset {
        events,
        source: "simulation".into(),
        skipped: Vec::new(),
    };
    write_atomic(&path, write_csv(&dataset)?.as_bytes())?;
    Ok(path)
}

/// Rows and the printable table produced by [`cmd_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub rows: Vec<SummaryRow>,
    pub table: String,
}

fn is_report_file(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.starts_with("storm") && name.ends_with(".json")
}

fn collect_report_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = fs::read_dir(input).map_err(|source| Error::Io {
                path: input.display().to_string(),
                source,
            })?;
            for entry in entries {
                let path = entry
                    .map_err(|source| Error::Io {
                        path: input.display().to_string(),
                        source,
                    })?
                    .path();
                if is_report_file(&path) {
                    paths.push(path);
                }
            }
        } else {
            paths.push(input.clone());
        }
    }
    Ok(paths)
}

/// Collects storm reports (files or directories of `storm*.json`), prints a
/// penalty table and writes `summary.csv`.
pub fn cmd_report(config: &RunConfig) -> Result<ReportSummary> {
    let paths = collect_report_paths(&config.inputs)?;
    let mut reports = paths.iter().map(|p| load_report(p)).collect::<Result<Vec<_>>>()?;
    if reports.is_empty() {
        let joined: Vec<String> = config.inputs.iter().map(|p| p.display().to_string()).collect();
        return Err(Error::NoReports(joined.join(", ")));
    }
    reports.sort_by_key(|r| r.storm_id);
    let rows: Vec<SummaryRow> = reports.iter().map(StormReport::summary_row).collect();

    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), format_penalty);
    let mut table = format!("{:>6} {:>7} {:>8} {:>8} {:>8}\n", "storm", "events", "S_F", "S_G", "S_G^d");
    let mut csv = String::from("storm,events,S_F,S_G,S_G_d\n");
    let raw = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    for row in &rows {
        table.push_str(&format!(
            "{:>6} {:>7} {:>8} {:>8} {:>8}\n",
            row.storm_id,
            row.events,
            cell(row.s_f),
            cell(row.s_g),
            cell(row.s_g_d)
        ));
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.storm_id,
            row.events,
            raw(row.s_f),
            raw(row.s_g),
            raw(row.s_g_d)
        ));
    }
    ensure_dir(&config.out_dir)?;
    write_atomic(&config.out_dir.join("summary.csv"), csv.as_bytes())?;
    Ok(ReportSummary { rows, table })
}

/// Downloads hail events for `start..=end` and writes them as ingest CSV.
/// `out_dir` may name a `.csv` file; otherwise `swdi_<start>_<end>.csv` is
/// created inside it.
pub fn cmd_fetch(config: &RunConfig, start: NaiveDate, end: NaiveDate) -> Result<(PathBuf, Dataset)> {
    let client = SwdiClient::new(config.swdi_base.clone()).with_product(config.swdi_product.clone());
    let body = client.fetch(start, end)?;
    let options = ParseOptions {
        date: Some(start),
        source: format!("{}..{}", start, end),
    };
    let dataset = parse_csv(body.as_bytes(), &options)?;
    let path = if config.out_dir.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        config.out_dir.clone()
    } else {
        ensure_dir(&config.out_dir)?;
        config
            .out_dir
            .join(format!("swdi_{}_{}.csv", start.format("%Y%m%d"), end.format("%Y%m%d")))
    };
    write_atomic(&path, write_csv(&dataset)?.as_bytes())?;
    Ok((path, dataset))
}
