//! Experiment configuration in a flat `key = value` format.
//!
//! ```text
//! # headline setup
//! n = 3000
//! ra = 0.85
//! ```
//!
//! Blank lines and `#` comments are ignored, absent keys take their
//! defaults, and unknown or repeated keys are rejected.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::SpreadParams;
use crate::error::{Error, Result};
use crate::graph::{generate_ba, generate_ws, SocialGraph};
use crate::recommend::RecommendationAccuracy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    BarabasiAlbert,
    WattsStrogatz,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::BarabasiAlbert => "ba",
            Topology::WattsStrogatz => "ws",
        }
    }
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ba" => Ok(Topology::BarabasiAlbert),
            "ws" => Ok(Topology::WattsStrogatz),
            other => Err(format!("unknown topology `{other}` (expected ba or ws)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub topology: Topology,
    pub target_mean_degree: f64,
    /// Lattice rewiring probability, used only for small-world graphs.
    pub ws_beta: f64,
    pub i0: f64,
    pub lambda: f64,
    pub theta0: f64,
    pub alpha0: f64,
    /// Has no default; must be set before anything is simulated.
    pub ra: Option<f64>,
    pub horizon: usize,
    pub runs: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 3000,
            topology: Topology::BarabasiAlbert,
            target_mean_degree: 5.0,
            ws_beta: 0.1,
            i0: 0.006,
            lambda: 0.1,
            theta0: 8.62e-3,
            alpha0: 1.0,
            ra: None,
            horizon: 200,
            runs: 20,
            seed: 0,
        }
    }
}

pub const KEYS: [&str; 12] = [
    "n",
    "topology",
    "mean_degree",
    "ws_beta",
    "i0",
    "lambda",
    "theta0",
    "alpha0",
    "ra",
    "horizon",
    "runs",
    "seed",
];

fn parse_value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>().map_err(|e| Error::Parse {
        line,
        msg: format!("bad value `{raw}` for `{key}`: {e}"),
    })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen = [false; KEYS.len()];
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("unknown key `{key}`"),
            })?;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                msg: format!("missing value for `{key}`"),
            });
        }
        match key {
            "n" => cfg.n = parse_value(line, key, value)?,
            "topology" => cfg.topology = parse_value(line, key, value)?,
            "mean_degree" => cfg.target_mean_degree = parse_value(line, key, value)?,
            "ws_beta" => cfg.ws_beta = parse_value(line, key, value)?,
            "i0" => cfg.i0 = parse_value(line, key, value)?,
            "lambda" => cfg.lambda = parse_value(line, key, value)?,
            "theta0" => cfg.theta0 = parse_value(line, key, value)?,
            "alpha0" => cfg.alpha0 = parse_value(line, key, value)?,
            "ra" => cfg.ra = Some(parse_value(line, key, value)?),
            "horizon" => cfg.horizon = parse_value(line, key, value)?,
            "runs" => cfg.runs = parse_value(line, key, value)?,
            "seed" => cfg.seed = parse_value(line, key, value)?,
            _ => unreachable!("key table and match arms disagree"),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn unit(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be in [0,1], got {v}")))
    }
}

impl ExperimentConfig {
    /// Range checks on every field. A missing `ra` is not an error here.
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::param(
                "n",
                format!("must be at least 3, got {}", self.n),
            ));
        }
        let k = self.target_mean_degree;
        if !(k >= 2.0 && k < self.n as f64) {
            return Err(Error::param(
                "mean_degree",
                format!("must be in [2, n) = [2, {}), got {k}", self.n),
            ));
        }
        if self.topology == Topology::WattsStrogatz
            && (k.fract() != 0.0 || !(k as usize).is_multiple_of(2))
        {
            return Err(Error::param(
                "mean_degree",
                format!("small-world graphs need an even integer degree, got {k}"),
            ));
        }
        unit("ws_beta", self.ws_beta)?;
        if !(self.i0 > 0.0 && self.i0 < 1.0) {
            return Err(Error::param(
                "i0",
                format!("must be in (0,1), got {}", self.i0),
            ));
        }
        if (self.i0 * self.n as f64).floor() < 1.0 {
            return Err(Error::param(
                "i0",
                format!("i0 * n = {} seeds no spreader", self.i0 * self.n as f64),
            ));
        }
        unit("lambda", self.lambda)?;
        unit("theta0", self.theta0)?;
        unit("alpha0", self.alpha0)?;
        if let Some(ra) = self.ra {
            unit("ra", ra)?;
        }
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if self.runs == 0 {
            return Err(Error::param("runs", "must be at least 1"));
        }
        Ok(())
    }

    pub fn require_ra(&self) -> Result<RecommendationAccuracy> {
        let ra = self.ra.ok_or_else(|| {
            Error::param("ra", "no value given; set `ra` in the config or pass --ra")
        })?;
        RecommendationAccuracy::new(ra)
    }

    pub fn spread_params(&self) -> Result<SpreadParams> {
        self.validate()?;
        Ok(SpreadParams {
            alpha0: self.alpha0,
            theta0: self.theta0,
            lambda: self.lambda,
            i0: self.i0,
            ra: self.require_ra()?,
            horizon: self.horizon,
        })
    }

    pub fn build_graph(&self, seed: u64) -> Result<SocialGraph> {
        match self.topology {
            Topology::BarabasiAlbert => generate_ba(self.n, self.target_mean_degree, seed),
            Topology::WattsStrogatz => {
                generate_ws(self.n, self.target_mean_degree as usize, self.ws_beta, seed)
            }
        }
    }

    /// Seed of ensemble member `index`.
    pub fn run_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }
}

/// Renders in the same format [`parse_config`] reads.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "topology = {}", self.topology.name())?;
        writeln!(f, "mean_degree = {}", self.target_mean_degree)?;
        writeln!(f, "ws_beta = {}", self.ws_beta)?;
        writeln!(f, "i0 = {}", self.i0)?;
        writeln!(f, "lambda = {}", self.lambda)?;
        writeln!(f, "theta0 = {}", self.theta0)?;
        writeln!(f, "alpha0 = {}", self.alpha0)?;
        match self.ra {
            Some(ra) => writeln!(f, "ra = {ra}")?,
            None => writeln!(f, "# ra not set")?,
        }
        writeln!(f, "horizon = {}", self.horizon)?;
        writeln!(f, "runs = {}", self.runs)?;
        writeln!(f, "seed = {}", self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(e: Error) -> &'static str {
        match e {
            Error::Parameter { name, .. } => name,
            other => panic!("expected a parameter error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.n, 3000);
        assert_eq!(c.target_mean_degree, 5.0);
        assert_eq!(c.i0, 0.006);
        assert_eq!(c.lambda, 0.1);
        assert_eq!(c.theta0, 8.62e-3);
        assert_eq!(c.horizon, 200);
        assert_eq!(c.ra, None);
        assert_eq!(field_of(c.spread_params().unwrap_err()), "ra");
    }

    #[test]
    fn headline_setup() {
        let c = parse_config("# headline\nn = 3000\n\nra = 0.85   # recommendation\n").unwrap();
        assert_eq!(c.n, 3000);
        assert_eq!(c.ra, Some(0.85));
        assert_eq!(c.spread_params().unwrap().ra.value(), 0.85);
    }

    #[test]
    fn range_errors_name_the_field() {
        assert_eq!(field_of(parse_config("ra = 1.5").unwrap_err()), "ra");
        assert_eq!(
            field_of(parse_config("lambda = -0.1").unwrap_err()),
            "lambda"
        );
        assert_eq!(field_of(parse_config("i0 = 0").unwrap_err()), "i0");
        assert_eq!(
            field_of(parse_config("n = 100\ni0 = 0.006").unwrap_err()),
            "i0"
        );
        assert_eq!(field_of(parse_config("runs = 0").unwrap_err()), "runs");
        assert_eq!(
            field_of(parse_config("topology = ws\nmean_degree = 5").unwrap_err()),
            "mean_degree"
        );
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let line_of = |text: &str| match parse_config(text).unwrap_err() {
            Error::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("n = 10\nbogus = 1"), 2);
        assert_eq!(line_of("# c\n\nn 3000"), 3);
        assert_eq!(line_of("n = ten"), 1);
        assert_eq!(line_of("n = 10\nn = 20"), 2);
        assert_eq!(line_of("ra ="), 1);
        assert_eq!(line_of("topology = er"), 1);
    }

    #[test]
    fn display_round_trips() {
        let c =
            parse_config("n = 500\ntopology = WS\nmean_degree = 4\nra = 0.2\nseed = 99").unwrap();
        assert_eq!(c.topology, Topology::WattsStrogatz);
        assert_eq!(parse_config(&c.to_string()).unwrap(), c);
        let d = ExperimentConfig::default();
        assert_eq!(parse_config(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn run_seeds_offset_master() {
        let c = ExperimentConfig {
            seed: 40,
            ..Default::default()
        };
        assert_eq!(c.run_seed(0), 40);
        assert_eq!(c.run_seed(7), 47);
    }
}
