//! Observed cumulative spreading curves and their distance to simulated ones.

use std::io::Read;

use crate::ensemble::EnsembleStats;
use crate::error::{Error, Result};

/// Normalised cumulative curve: `t_norm` strictly increasing, density
/// non-decreasing, both in `[0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl EmpiricalSeries {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("empirical series has no points"));
        }
        for &(t, d) in &points {
            if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&d) {
                return Err(Error::Data(format!("point ({t}, {d}) outside [0,1]")));
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Data(format!(
                    "normalised times not strictly increasing at {}",
                    w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::Data(format!("density decreases at t = {}", w[1].0)));
            }
        }
        Ok(EmpiricalSeries {
            label: label.into(),
            points,
        })
    }
}

fn min_max(values: &[f64], what: &str) -> Result<Vec<f64>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return Err(Error::Data(format!("{what} column is constant")));
    }
    Ok(values.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

/// Read a `t,count` CSV of cumulative counts and min-max normalise both axes.
pub fn ingest_empirical<R: Read>(reader: R, label: &str) -> Result<EmpiricalSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Data(e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "count" {
        return Err(Error::Data(format!(
            "expected header `t,count`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut ts, mut cs) = (Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Data(e.to_string()))?;
        let field = |k: usize| -> Result<f64> {
            rec[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Data(format!("row {}: bad number `{}`", row + 1, &rec[k])))
        };
        ts.push(field(0)?);
        cs.push(field(1)?);
    }
    if ts.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 rows, got {}",
            ts.len()
        )));
    }
    for k in 1..ts.len() {
        if ts[k] <= ts[k - 1] {
            return Err(Error::Data(format!(
                "row {}: time {} does not increase",
                k + 1,
                ts[k]
            )));
        }
        if cs[k] < cs[k - 1] {
            return Err(Error::Data(format!(
                "row {}: cumulative count {} drops below {}",
                k + 1,
                cs[k],
                cs[k - 1]
            )));
        }
    }
    let t = min_max(&ts, "t")?;
    let c = min_max(&cs, "count")?;
    EmpiricalSeries::new(label, t.into_iter().zip(c).collect())
}

/// Value of a curve sampled at `0, 1, ..., len-1` and stretched onto
/// `[0,1]`, read at `x` by linear interpolation.
fn sample(curve: &[f64], x: f64) -> f64 {
    if curve.len() == 1 {
        return curve[0];
    }
    let pos = x.clamp(0.0, 1.0) * (curve.len() - 1) as f64;
    let k = (pos.floor() as usize).min(curve.len() - 2);
    let frac = pos - k as f64;
    curve[k] + frac * (curve[k + 1] - curve[k])
}

/// RMSE between a density curve (one value per step) and an empirical series
/// after mapping the curve's time axis onto `[0,1]`.
pub fn curve_rmse(curve: &[f64], emp: &EmpiricalSeries) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::EmptyInput("simulated curve has no points"));
    }
    if emp.points.is_empty() {
        return Err(Error::EmptyInput("empirical series has no points"));
    }
    let sq: f64 = emp
        .points
        .iter()
        .map(|&(t, d)| (sample(curve, t) - d).powi(2))
        .sum();
    Ok((sq / emp.points.len() as f64).sqrt())
}

pub fn compare_to_empirical(sim: &EnsembleStats, emp: &EmpiricalSeries) -> Result<f64> {
    curve_rmse(&sim.mean_density(), emp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::logistic_density;

    #[test]
    fn min_max_example() {
        let s = ingest_empirical("t,count\n0,0\n10,50\n20,100\n".as_bytes(), "x").unwrap();
        assert_eq!(s.points, vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
        assert_eq!(s.label, "x");
    }

    #[test]
    fn already_normalised_is_unchanged() {
        let s = ingest_empirical("t,count\n0,0\n0.25,0.1\n0.5,0.7\n1,1\n".as_bytes(), "x").unwrap();
        assert_eq!(
            s.points,
            vec![(0.0, 0.0), (0.25, 0.1), (0.5, 0.7), (1.0, 1.0)]
        );
    }

    #[test]
    fn rejects_bad_input() {
        let bad = |text: &str| ingest_empirical(text.as_bytes(), "x").unwrap_err();
        assert!(matches!(bad("t,count\n0,1\n0,2\n"), Error::Data(_)));
        assert!(matches!(bad("t,count\n0,5\n1,3\n"), Error::Data(_)));
        assert!(matches!(bad("t,count\n0,5\n"), Error::Data(_)));
        assert!(matches!(bad("time,n\n0,1\n1,2\n"), Error::Data(_)));
        assert!(matches!(bad("t,count\n0,x\n1,2\n"), Error::Data(_)));
        assert!(matches!(bad("t,count\n0,4\n1,4\n"), Error::Data(_)));
    }

    #[test]
    fn rmse_extremes() {
        let emp = EmpiricalSeries::new("ones", vec![(0.0, 1.0), (0.5, 1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(curve_rmse(&[0.0; 20], &emp).unwrap(), 1.0);

        let pts: Vec<(f64, f64)> = (0..=10)
            .map(|k| (k as f64 / 10.0, k as f64 / 10.0))
            .collect();
        let emp = EmpiricalSeries::new("line", pts).unwrap();
        let curve: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        assert!(curve_rmse(&curve, &emp).unwrap() < 1e-15);
        assert!(curve_rmse(&[], &emp).is_err());
    }

    #[test]
    fn logistic_against_sampled_logistic() {
        let (i0, r) = (0.006, 0.25);
        let curve: Vec<f64> = (0..=60)
            .map(|t| logistic_density(t as f64, i0, r))
            .collect();
        // coarse irregular samples of the same law
        let ts = [0.0, 7.5, 13.0, 18.2, 21.0, 26.4, 33.3, 41.0, 52.5, 60.0];
        let pts: Vec<(f64, f64)> = ts
            .iter()
            .map(|&t| (t / 60.0, logistic_density(t, i0, r)))
            .collect();
        let emp = EmpiricalSeries::new("logistic", pts).unwrap();
        assert!(curve_rmse(&curve, &emp).unwrap() < 0.02);
    }
}
