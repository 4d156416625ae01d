//! Monte Carlo ensembles and the experiment suites built on them.
//!
//! Member `i` of an ensemble uses seed `master + i` for both its graph and
//! its dynamics, so members are independent of scheduling and the parallel
//! and serial drivers give identical results.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, Topology};
use crate::dynamics::{run, Run, SpreadParams};
use crate::error::{Error, Result};
use crate::metrics::{emotion_range, EmotionRange, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleStep {
    pub t: usize,
    pub mean_i: f64,
    pub std_i: f64,
    pub mean_m: f64,
    pub std_m: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub runs: usize,
    /// Runs that stopped early contribute their final values to later steps.
    pub steps: Vec<EnsembleStep>,
    pub ranges: Vec<EmotionRange>,
    pub mean_difference: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// First (linearly interpolated) time at which `curve` reaches `level`.
pub fn crossing_time(curve: &[f64], level: f64) -> Option<f64> {
    let first = *curve.first()?;
    if first >= level {
        return Some(0.0);
    }
    curve
        .windows(2)
        .enumerate()
        .find_map(|(t, w)| (w[1] >= level).then(|| t as f64 + (level - w[0]) / (w[1] - w[0])))
}

impl EnsembleStats {
    pub fn mean_density(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.mean_i).collect()
    }

    pub fn mean_emotion(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.mean_m).collect()
    }

    pub fn time_to_density(&self, level: f64) -> Option<f64> {
        crossing_time(&self.mean_density(), level)
    }

    /// `t,mean_i,std_i,mean_m,std_m`
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,mean_i,std_i,mean_m,std_m")?;
        for s in &self.steps {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.t, s.mean_i, s.std_i, s.mean_m, s.std_m
            )?;
        }
        Ok(())
    }

    /// `run,initial,minimum,maximum,difference`
    pub fn write_ranges_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "run,initial,minimum,maximum,difference")?;
        for (k, r) in self.ranges.iter().enumerate() {
            writeln!(
                w,
                "{k},{},{},{},{}",
                r.initial, r.minimum, r.maximum, r.difference
            )?;
        }
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let last = self.steps.last();
        writeln!(w, "metric,value")?;
        writeln!(w, "runs,{}", self.runs)?;
        writeln!(w, "steps,{}", self.steps.len())?;
        writeln!(w, "mean_difference,{}", self.mean_difference)?;
        writeln!(w, "final_mean_i,{}", last.map_or(0.0, |s| s.mean_i))?;
        writeln!(w, "final_mean_m,{}", last.map_or(0.0, |s| s.mean_m))?;
        match self.time_to_density(0.5) {
            Some(t) => writeln!(w, "t_half,{t}"),
            None => writeln!(w, "t_half,"),
        }
    }
}

/// Per-step mean and standard deviation over a set of trajectories.
pub fn aggregate(trajectories: &[Trajectory]) -> Result<EnsembleStats> {
    if trajectories.is_empty() {
        return Err(Error::EmptyInput("no trajectories to aggregate"));
    }
    if trajectories.iter().any(|t| t.is_empty()) {
        return Err(Error::EmptyInput("trajectory without steps"));
    }
    let ranges = trajectories
        .iter()
        .map(emotion_range)
        .collect::<Result<Vec<_>>>()?;
    let len = trajectories.iter().map(Trajectory::len).max().unwrap_or(0);
    let mut steps = Vec::with_capacity(len);
    let mut is = vec![0.0; trajectories.len()];
    let mut ms = vec![0.0; trajectories.len()];
    for t in 0..len {
        for (k, tr) in trajectories.iter().enumerate() {
            let s = &tr.steps[t.min(tr.len() - 1)];
            is[k] = s.i;
            ms[k] = s.mean_m;
        }
        let (mean_i, std_i) = mean_std(&is);
        let (mean_m, std_m) = mean_std(&ms);
        steps.push(EnsembleStep {
            t,
            mean_i,
            std_i,
            mean_m,
            std_m,
        });
    }
    let mean_difference = ranges.iter().map(|r| r.difference).sum::<f64>() / ranges.len() as f64;
    Ok(EnsembleStats {
        runs: trajectories.len(),
        steps,
        ranges,
        mean_difference,
    })
}

/// Build and run ensemble member `index`.
pub fn run_member(config: &ExperimentConfig, params: &SpreadParams, index: usize) -> Result<Run> {
    let seed = config.run_seed(index);
    run(config.build_graph(seed)?, params, seed)
}

/// Apply `f` to every ensemble member, in parallel, results in index order.
pub fn map_runs<T, F>(config: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, Run) -> T + Sync,
{
    let params = config.spread_params()?;
    (0..config.runs)
        .into_par_iter()
        .map(|k| run_member(config, &params, k).map(|r| f(k, r)))
        .collect()
}

/// Same as [`map_runs`] on the calling thread.
pub fn map_runs_serial<T, F>(config: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    F: Fn(usize, Run) -> T,
{
    let params = config.spread_params()?;
    (0..config.runs)
        .map(|k| run_member(config, &params, k).map(|r| f(k, r)))
        .collect()
}

pub fn run_ensemble(config: &ExperimentConfig) -> Result<EnsembleStats> {
    aggregate(&map_runs(config, |_, r| r.trajectory)?)
}

pub fn run_ensemble_serial(config: &ExperimentConfig) -> Result<EnsembleStats> {
    aggregate(&map_runs_serial(config, |_, r| r.trajectory)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub ra: f64,
    /// Ensemble mean of the initial population emotion.
    pub initial_m: f64,
    pub mean_difference: f64,
    /// Ensemble means of each run's lowest and highest population emotion.
    pub min_m: f64,
    pub max_m: f64,
}

/// One ensemble per RA value. Member `i` starts from the same graph and the
/// same seed under every RA, so only the recommender differs between rows.
pub fn ra_sweep(config: &ExperimentConfig, ra_values: &[f64]) -> Result<Vec<SweepRow>> {
    if ra_values.is_empty() {
        return Err(Error::EmptyInput("no ra values to sweep"));
    }
    config.validate()?;
    let params: Vec<SpreadParams> = ra_values
        .iter()
        .map(|&ra| {
            let cfg = ExperimentConfig {
                ra: Some(ra),
                ..config.clone()
            };
            cfg.spread_params()
        })
        .collect::<Result<_>>()?;

    // per member: one EmotionRange per ra value
    let per_member: Vec<Vec<EmotionRange>> = (0..config.runs)
        .into_par_iter()
        .map(|k| {
            let seed = config.run_seed(k);
            let graph = config.build_graph(seed)?;
            params
                .iter()
                .map(|p| emotion_range(&run(graph.clone(), p, seed)?.trajectory))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let n = config.runs as f64;
    Ok(ra_values
        .iter()
        .enumerate()
        .map(|(j, &ra)| {
            let col = || per_member.iter().map(move |row| row[j]);
            SweepRow {
                ra,
                initial_m: col().map(|r| r.initial).sum::<f64>() / n,
                mean_difference: col().map(|r| r.difference).sum::<f64>() / n,
                min_m: col().map(|r| r.minimum).sum::<f64>() / n,
                max_m: col().map(|r| r.maximum).sum::<f64>() / n,
            }
        })
        .collect())
}

/// `ra,mean_difference,min_m,max_m`
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "ra,mean_difference,min_m,max_m")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.ra, r.mean_difference, r.min_m, r.max_m)?;
    }
    Ok(())
}

/// Final mean density a curve must reach to count as saturated.
pub const SATURATION_LEVEL: f64 = 0.95;

/// Largest spread of final densities within a section that still counts as
/// a common plateau.
pub const PLATEAU_SPREAD: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub mean_i: Vec<f64>,
    pub t_half: Option<f64>,
    pub non_decreasing: bool,
    pub saturating: bool,
}

impl Curve {
    fn from_stats(label: String, stats: &EnsembleStats) -> Curve {
        let mean_i = stats.mean_density();
        Curve {
            t_half: crossing_time(&mean_i, 0.5),
            non_decreasing: mean_i.windows(2).all(|w| w[1] >= w[0]),
            saturating: mean_i.last().is_some_and(|&v| v >= SATURATION_LEVEL),
            label,
            mean_i,
        }
    }

    pub fn final_density(&self) -> f64 {
        self.mean_i.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub description: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub title: String,
    pub curves: Vec<Curve>,
    pub checks: Vec<Check>,
}

impl Section {
    fn new(title: &str, curves: Vec<Curve>) -> Section {
        let mut checks = Vec::new();
        for c in &curves {
            checks.push(Check {
                description: format!("{}: non-decreasing", c.label),
                passed: c.non_decreasing,
            });
            checks.push(Check {
                description: format!("{}: final density >= {SATURATION_LEVEL}", c.label),
                passed: c.saturating,
            });
        }
        let finals = curves.iter().map(Curve::final_density);
        let spread =
            finals.clone().fold(f64::NEG_INFINITY, f64::max) - finals.fold(f64::INFINITY, f64::min);
        checks.push(Check {
            description: format!(
                "common plateau: final densities within {PLATEAU_SPREAD} (spread {spread:.4})"
            ),
            passed: spread <= PLATEAU_SPREAD,
        });
        Section {
            title: title.to_string(),
            curves,
            checks,
        }
    }

    fn later(&mut self, slow: usize, fast: usize) {
        let (s, f) = (&self.curves[slow], &self.curves[fast]);
        let passed = matches!((s.t_half, f.t_half), (Some(a), Some(b)) if a > b);
        let fmt_t = |t: Option<f64>| t.map_or("never".to_string(), |v| format!("{v:.2}"));
        self.checks.push(Check {
            description: format!(
                "{} reaches i=0.5 after {} ({} vs {})",
                s.label,
                f.label,
                fmt_t(s.t_half),
                fmt_t(f.t_half)
            ),
            passed,
        });
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptabilityReport {
    pub sections: Vec<Section>,
}

impl AdaptabilityReport {
    pub fn all_passed(&self) -> bool {
        self.sections
            .iter()
            .flat_map(|s| &s.checks)
            .all(|c| c.passed)
    }

    /// `section,label,t,mean_i`
    pub fn write_curves_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "section,label,t,mean_i")?;
        for (k, s) in self.sections.iter().enumerate() {
            for c in &s.curves {
                for (t, v) in c.mean_i.iter().enumerate() {
                    writeln!(w, "{k},{},{t},{v}", c.label)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for AdaptabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sections {
            writeln!(f, "== {}", s.title)?;
            for c in &s.curves {
                let th = c.t_half.map_or("never".to_string(), |v| format!("{v:.2}"));
                writeln!(
                    f,
                    "  {:<16} t_half={th:<8} final_i={:.4}",
                    c.label,
                    c.final_density()
                )?;
            }
            for c in &s.checks {
                writeln!(
                    f,
                    "  [{}] {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.description
                )?;
            }
        }
        write!(
            f,
            "overall: {}",
            if self.all_passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn curve(
    base: &ExperimentConfig,
    label: String,
    tweak: impl FnOnce(&mut ExperimentConfig),
) -> Result<Curve> {
    let mut cfg = base.clone();
    tweak(&mut cfg);
    Ok(Curve::from_stats(label, &run_ensemble(&cfg)?))
}

/// Ensembles under varied network size, topology, mean degree and initial
/// spreader density. Topology and degree variations use BA unless stated.
pub fn adaptability_suite(base: &ExperimentConfig) -> Result<AdaptabilityReport> {
    base.require_ra()?;
    let mut sections = Vec::new();

    let sizes = [500usize, 1000, 3000]
        .iter()
        .map(|&n| curve(base, format!("n={n}"), |c| c.n = n))
        .collect::<Result<Vec<_>>>()?;
    sections.push(Section::new("network size", sizes));

    let k_even = ((base.target_mean_degree / 2.0).floor() * 2.0).max(2.0);
    let topo = vec![
        curve(base, format!("BA k={k_even}"), |c| {
            c.topology = Topology::BarabasiAlbert;
            c.target_mean_degree = k_even;
        })?,
        curve(base, format!("WS k={k_even}"), |c| {
            c.topology = Topology::WattsStrogatz;
            c.target_mean_degree = k_even;
        })?,
    ];
    let mut topo = Section::new("topology", topo);
    topo.later(1, 0);
    sections.push(topo);

    let degrees = [3.0, 5.0, 8.0]
        .iter()
        .map(|&k| {
            curve(base, format!("<k>={k}"), |c| {
                c.topology = Topology::BarabasiAlbert;
                c.target_mean_degree = k;
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sections.push(Section::new("mean degree", degrees));

    let seeds = [0.002, 0.006, 0.02]
        .iter()
        .map(|&i0| curve(base, format!("i0={i0}"), |c| c.i0 = i0))
        .collect::<Result<Vec<_>>>()?;
    let mut seeds = Section::new("initial spreaders", seeds);
    seeds.later(0, 1);
    seeds.later(1, 2);
    sections.push(seeds);

    Ok(AdaptabilityReport { sections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::StepRecord;

    fn traj(points: &[(f64, f64)]) -> Trajectory {
        Trajectory {
            steps: points
                .iter()
                .enumerate()
                .map(|(t, &(i, m))| StepRecord {
                    t,
                    i,
                    mean_m: m,
                    delta_m: None,
                    new_comments: 0,
                    rewired: 0,
                })
                .collect(),
        }
    }

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n: 300,
            i0: 0.02,
            ra: Some(0.5),
            horizon: 40,
            runs: 4,
            seed: 11,
            ..Default::default()
        }
    }

    #[test]
    fn aggregate_pads_short_runs() {
        let a = traj(&[(0.1, 0.0), (0.5, 0.2), (1.0, 0.4)]);
        let b = traj(&[(0.3, 0.0), (1.0, 0.0)]);
        let s = aggregate(&[a, b]).unwrap();
        assert_eq!(s.steps.len(), 3);
        assert!((s.steps[0].mean_i - 0.2).abs() < 1e-15);
        assert!((s.steps[0].std_i - 0.1).abs() < 1e-15);
        assert_eq!(s.steps[2].mean_i, 1.0);
        assert_eq!(s.steps[2].std_i, 0.0);
        assert!((s.steps[2].mean_m - 0.2).abs() < 1e-15);
        assert!((s.mean_difference - 0.2).abs() < 1e-15);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn singleton_ensemble_is_the_run() {
        let cfg = ExperimentConfig { runs: 1, ..small() };
        let stats = run_ensemble(&cfg).unwrap();
        let params = cfg.spread_params().unwrap();
        let r = run_member(&cfg, &params, 0).unwrap();
        assert_eq!(stats.mean_density(), r.trajectory.densities());
        assert_eq!(stats.mean_emotion(), r.trajectory.mean_emotions());
        assert!(stats.steps.iter().all(|s| s.std_i == 0.0 && s.std_m == 0.0));
    }

    #[test]
    fn parallel_matches_serial() {
        let cfg = small();
        assert_eq!(
            run_ensemble(&cfg).unwrap(),
            run_ensemble_serial(&cfg).unwrap()
        );
    }

    #[test]
    fn sweep_shares_initial_state() {
        let cfg = small();
        let rows = ra_sweep(&cfg, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.initial_m == rows[0].initial_m));
        assert_eq!(rows[2].mean_difference, 0.0);
        assert!(ra_sweep(&cfg, &[1.2]).is_err());
        assert!(ra_sweep(&cfg, &[]).is_err());
    }

    #[test]
    fn crossing_interpolates() {
        assert_eq!(crossing_time(&[0.0, 0.4, 0.6, 1.0], 0.5), Some(1.5));
        assert_eq!(crossing_time(&[0.7, 0.8], 0.5), Some(0.0));
        assert_eq!(crossing_time(&[0.1, 0.2], 0.5), None);
        assert_eq!(crossing_time(&[], 0.5), None);
    }

    #[test]
    fn sweep_csv_shape() {
        let rows = [SweepRow {
            ra: 0.85,
            initial_m: 0.0,
            mean_difference: 0.5,
            min_m: -0.25,
            max_m: 0.25,
        }];
        let mut out = Vec::new();
        write_sweep_csv(&rows, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "ra,mean_difference,min_m,max_m\n0.85,0.5,-0.25,0.25\n"
        );
    }
}
