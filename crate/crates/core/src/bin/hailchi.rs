use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use hailchi::cluster::DEFAULT_JUMP_THRESHOLD;
use hailchi::fit::DistanceMetric;
use hailchi::ingest::{DEFAULT_SWDI_BASE, DEFAULT_SWDI_PRODUCT};
use hailchi::report::{cmd_cluster, cmd_fetch, cmd_fit, cmd_report, cmd_simulate, FitOptions, RunConfig};
use hailchi::Error;

#[derive(Parser)]
#[command(name = "hailchi", version, about = "Cluster hail events into storms and fit radial damage distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group events into storms and write clusters.json
    Cluster(CommonArgs),
    /// Fit every storm and write storm<k>.json with SVG plots
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// Distance used for the radial series: mahalanobis, euclidean or covariance-form
        #[arg(long, default_value = "mahalanobis")]
        metric: DistanceMetric,
        /// Treat all input events as a single storm
        #[arg(long, conflicts_with = "clusters")]
        single_storm: bool,
        /// Storm assignments written by `hailchi cluster`
        #[arg(long)]
        clusters: Option<PathBuf>,
        #[arg(long)]
        no_chi: bool,
        #[arg(long)]
        no_lognormal: bool,
        #[arg(long)]
        no_plots: bool,
        /// Mahalanobis levels of the contour ellipses
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2")]
        contour_levels: Vec<f64>,
    },
    /// Sample synthetic events from the traveling storm model
    Simulate {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Storm velocity as vx,vy
        #[arg(long, value_parser = parse_velocity, allow_hyphen_values = true, default_value = "0,0")]
        velocity: (f64, f64),
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a penalty table from storm reports and write summary.csv
    Report {
        /// Report files or directories containing storm*.json
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Download hail events from the Severe Weather Data Inventory
    Fetch {
        #[arg(long)]
        start: NaiveDate,
        #[arg(long)]
        end: NaiveDate,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value = DEFAULT_SWDI_BASE)]
        swdi_base: String,
        #[arg(long, default_value = DEFAULT_SWDI_PRODUCT)]
        product: String,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Event CSV files
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Weight of seconds-since-first-event in the clustering metric
    #[arg(long, default_value_t = 0.0)]
    time_scale: f64,
    #[arg(long, default_value_t = DEFAULT_JUMP_THRESHOLD)]
    jump_threshold: f64,
    /// Date for inputs whose time column holds only HH:MM:SS
    #[arg(long)]
    date: Option<NaiveDate>,
}

impl CommonArgs {
    fn config(self) -> RunConfig {
        RunConfig {
            inputs: self.input,
            out_dir: self.out,
            time_scale: self.time_scale,
            jump_threshold: self.jump_threshold,
            date: self.date,
            ..RunConfig::default()
        }
    }
}

fn parse_velocity(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [vx, vy] => {
            let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
            Ok((parse(vx)?, parse(vy)?))
        }
        _ => Err(format!("expected vx,vy but got {text:?}")),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Cluster(common) => {
            let clusters = cmd_cluster(&common.config())?;
            println!("{} storm(s), jump ratio {:.3}", clusters.storm_count, clusters.jump_ratio);
            for (k, count) in clusters.counts.iter().enumerate() {
                println!("storm {:>3}: {count} events", k + 1);
            }
        }
        Command::Fit {
            common,
            metric,
            single_storm,
            clusters,
            no_chi,
            no_lognormal,
            no_plots,
            contour_levels,
        } => {
            let mut config = common.config();
            config.fit = FitOptions {
                metric,
                run_chi: !no_chi,
                run_lognormal: !no_lognormal,
                single_storm,
                clusters,
                contour_levels,
                plots: !no_plots,
            };
            for report in cmd_fit(&config)? {
                match (&report.skipped, &report.chi) {
                    (Some(reason), _) => println!("storm {}: skipped ({reason})", report.storm_id),
                    (None, Some(chi)) => println!(
                        "storm {}: {} events, lambda {:.4}, S_F {:.4}",
                        report.storm_id, report.event_count, chi.lambda_hat, chi.sse
                    ),
                    (None, None) => println!("storm {}: {} events", report.storm_id, report.event_count),
                }
                for note in &report.notes {
                    println!("  note: {note}");
                }
            }
        }
        Command::Simulate {
            out,
            velocity,
            count,
            seed,
        } => {
            let config = RunConfig {
                out_dir: out,
                velocity: [velocity.0, velocity.1],
                count,
                seed,
                ..RunConfig::default()
            };
            let path = cmd_simulate(&config)?;
            println!("wrote {count} events to {}", path.display());
        }
        Command::Report { input, out } => {
            let config = RunConfig {
                inputs: input,
                out_dir: out,
                ..RunConfig::default()
            };
            print!("{}", cmd_report(&config)?.table);
        }
        Command::Fetch {
            start,
            end,
            out,
            swdi_base,
            product,
        } => {
            let config = RunConfig {
                out_dir: out,
                swdi_base,
                swdi_product: product,
                ..RunConfig::default()
            };
            let (path, dataset) = cmd_fetch(&config, start, end)?;
            println!(
                "wrote {} events to {} ({} rows skipped)",
                dataset.events.len(),
                path.display(),
                dataset.skipped.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
