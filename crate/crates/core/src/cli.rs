//! The `cocoonsim` command line.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, ExperimentConfig};
use crate::dynamics::run;
use crate::empirical::{compare_to_empirical, ingest_empirical};
use crate::ensemble::{adaptability_suite, ra_sweep, run_ensemble, write_sweep_csv};
use crate::error::{Error, Result};
use crate::io::export_graph;
use crate::metrics::{comment_network_summary, emotion_range};

#[derive(Parser)]
#[command(
    name = "cocoonsim",
    version,
    about = "Spreading and emotion dynamics under recommendation cocoons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// key = value config file; absent keys use defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// master seed, overrides the config
    #[arg(long)]
    seed: Option<u64>,
    /// output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// ensemble size, overrides the config
    #[arg(long)]
    runs: Option<usize>,
    /// recommendation accuracy; a comma-separated list for ra-sweep
    #[arg(long, value_delimiter = ',')]
    ra: Vec<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// One trajectory: trajectory.csv, summary.csv, histogram.csv
    Run(Common),
    /// Monte Carlo ensemble: ensemble.csv, ranges.csv, summary.csv
    Ensemble(Common),
    /// Emotion range per RA value over shared initial graphs: sweep.csv
    RaSweep(Common),
    /// Size, topology, degree and seeding variations: report.txt, curves.csv
    Adapt(Common),
    /// RMSE of the ensemble density curve against an observed `t,count` CSV
    Compare {
        #[command(flatten)]
        common: Common,
        /// cumulative counts with header `t,count`
        #[arg(long)]
        empirical: PathBuf,
    },
    /// Write edges.csv and nodes.csv for one run (or the initial graph)
    Export {
        #[command(flatten)]
        common: Common,
        /// export the generated graph before any dynamics
        #[arg(long)]
        initial: bool,
    },
}

fn load(common: &Common, single_ra: bool) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => parse_config(&fs::read_to_string(p)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(r) = common.runs {
        cfg.runs = r;
    }
    if single_ra {
        match common.ra.as_slice() {
            [] => {}
            [ra] => cfg.ra = Some(*ra),
            _ => {
                return Err(Error::Parameter {
                    name: "ra",
                    reason: "expected a single value".into(),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_metrics(dir: &Path, rows: &[(&str, String)]) -> Result<()> {
    let mut w = create(dir, "summary.csv")?;
    writeln!(w, "metric,value")?;
    for (k, v) in rows {
        writeln!(w, "{k},{v}")?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_run(common: &Common) -> Result<()> {
    let cfg = load(common, true)?;
    let params = cfg.spread_params()?;
    let out = run(cfg.build_graph(cfg.seed)?, &params, cfg.seed)?;
    let mut w = create(&common.out, "trajectory.csv")?;
    out.trajectory.write_csv(&mut w)?;
    w.flush()?;

    let range = emotion_range(&out.trajectory)?;
    let net = comment_network_summary(&out.graph, true);
    let last = out.trajectory.steps.last().map_or(0.0, |s| s.i);
    write_metrics(
        &common.out,
        &[
            ("steps", out.trajectory.len().to_string()),
            ("final_i", last.to_string()),
            ("initial_m", range.initial.to_string()),
            ("min_m", range.minimum.to_string()),
            ("max_m", range.maximum.to_string()),
            ("difference", range.difference.to_string()),
            ("comment_nodes", net.node_count.to_string()),
            ("comment_edges", net.edge_count.to_string()),
            ("comment_mean_degree", net.mean_degree.to_string()),
            ("comment_max_degree", net.max_degree.to_string()),
        ],
    )?;
    let mut h = create(&common.out, "histogram.csv")?;
    net.write_histogram_csv(&mut h)?;
    h.flush()?;
    println!(
        "steps={} final_i={last} difference={} comment_edges={}",
        out.trajectory.len(),
        range.difference,
        net.edge_count
    );
    Ok(())
}

fn cmd_ensemble(common: &Common) -> Result<()> {
    let cfg = load(common, true)?;
    let stats = run_ensemble(&cfg)?;
    let mut w = create(&common.out, "ensemble.csv")?;
    stats.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&common.out, "ranges.csv")?;
    stats.write_ranges_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&common.out, "summary.csv")?;
    stats.write_summary_csv(&mut w)?;
    w.flush()?;
    println!(
        "runs={} mean_difference={}",
        stats.runs, stats.mean_difference
    );
    Ok(())
}

fn cmd_sweep(common: &Common) -> Result<()> {
    let cfg = load(common, false)?;
    let ras = if common.ra.is_empty() {
        vec![0.0, 0.2, 0.5, 0.85, 1.0]
    } else {
        common.ra.clone()
    };
    let rows = ra_sweep(&cfg, &ras)?;
    let mut w = create(&common.out, "sweep.csv")?;
    write_sweep_csv(&rows, &mut w)?;
    w.flush()?;
    for r in &rows {
        println!("ra={} mean_difference={}", r.ra, r.mean_difference);
    }
    Ok(())
}

fn cmd_adapt(common: &Common) -> Result<()> {
    let cfg = load(common, true)?;
    let report = adaptability_suite(&cfg)?;
    let mut w = create(&common.out, "report.txt")?;
    writeln!(w, "{report}")?;
    w.flush()?;
    let mut w = create(&common.out, "curves.csv")?;
    report.write_curves_csv(&mut w)?;
    w.flush()?;
    println!(
        "adaptability: {}",
        if report.all_passed() { "PASS" } else { "FAIL" }
    );
    Ok(())
}

fn cmd_compare(common: &Common, empirical: &Path) -> Result<()> {
    let cfg = load(common, true)?;
    let label = empirical
        .file_stem()
        .map_or("empirical".into(), |s| s.to_string_lossy().into_owned());
    let emp = ingest_empirical(File::open(empirical)?, &label)?;
    let stats = run_ensemble(&cfg)?;
    let rmse = compare_to_empirical(&stats, &emp)?;
    write_metrics(
        &common.out,
        &[
            ("rmse", rmse.to_string()),
            ("points", emp.points.len().to_string()),
            ("runs", stats.runs.to_string()),
        ],
    )?;
    println!("rmse={rmse}");
    Ok(())
}

fn cmd_export(common: &Common, initial: bool) -> Result<()> {
    let cfg = load(common, true)?;
    let graph = cfg.build_graph(cfg.seed)?;
    let graph = if initial {
        graph
    } else {
        run(graph, &cfg.spread_params()?, cfg.seed)?.graph
    };
    export_graph(&graph, &common.out)?;
    println!("nodes={} out={}", graph.len(), common.out.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(c) => cmd_run(c),
        Command::Ensemble(c) => cmd_ensemble(c),
        Command::RaSweep(c) => cmd_sweep(c),
        Command::Adapt(c) => cmd_adapt(c),
        Command::Compare { common, empirical } => cmd_compare(common, empirical),
        Command::Export { common, initial } => cmd_export(common, *initial),
    }
}

/// Run the command line given in `args` (program name first).
pub fn run_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli =
        Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string().trim().to_string()))?;
    dispatch(&cli)
}

/// Entry point of the `cocoonsim` binary.
pub fn main() -> ExitCode {
    match dispatch(&Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
