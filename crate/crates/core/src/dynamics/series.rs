use std::fmt::Write;

use serde::Serialize;

use super::{evolve_gaussian, GaussianMoments, InteractionParams, Tag};
use crate::entanglement::{gaussian_mutual_information, log_negativity, reduce_to_qq_prime};
use crate::{exec, Error, Result};

/// Moments at one time plus the derived correlation measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRecord {
    pub time: f64,
    pub mean: [f64; 6],
    /// Upper triangle of the covariance, row by row.
    pub cov: [f64; 21],
    /// `None` for classically tagged runs.
    pub log_negativity: Option<f64>,
    pub mutual_information: f64,
}

pub const VARIABLES: [&str; 6] = ["q", "p", "q'", "p'", "x", "k"];

/// Time series of moment records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub g1: f64,
    pub g2: f64,
    pub tag: Tag,
    pub records: Vec<MomentRecord>,
}

/// Evolves `initial` to every time in `times`, which must be strictly increasing and
/// nonnegative.
pub fn gaussian_time_series(
    initial: &GaussianMoments,
    g1: f64,
    g2: f64,
    times: &[f64],
) -> Result<TimeSeries> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("times must be strictly increasing".into()));
    }
    let params: Vec<InteractionParams> = times
        .iter()
        .map(|&t| InteractionParams::new(g1, g2, t))
        .collect::<Result<_>>()?;
    let records = exec::map_range(params.len(), |i| {
        let g = evolve_gaussian(initial, &params[i]);
        let mut cov = [0.0; 21];
        let mut n = 0;
        for r in 0..6 {
            for c in r..6 {
                cov[n] = g.covariance(r, c);
                n += 1;
            }
        }
        let log_negativity = match reduce_to_qq_prime(&g) {
            Ok(c) => Some(log_negativity(&c)),
            Err(Error::TagRefusal) => None,
            Err(e) => return Err(e),
        };
        Ok(MomentRecord {
            time: params[i].t,
            mean: std::array::from_fn(|a| g.mean()[a]),
            cov,
            log_negativity,
            mutual_information: gaussian_mutual_information(&g)?,
        })
    });
    Ok(TimeSeries {
        g1,
        g2,
        tag: initial.tag(),
        records: records.into_iter().collect::<Result<_>>()?,
    })
}

impl TimeSeries {
    /// Comma-separated table with a header row. Columns: `time`, `mean_<v>` for the six
    /// variables, `cov_<a>_<b>` for the upper triangle, `log_negativity` (empty when
    /// refused) and `mutual_information`. Floats use the shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for v in VARIABLES {
            write!(out, ",mean_{v}").unwrap();
        }
        for r in 0..6 {
            for c in r..6 {
                write!(out, ",cov_{}_{}", VARIABLES[r], VARIABLES[c]).unwrap();
            }
        }
        out.push_str(",log_negativity,mutual_information\n");
        for rec in &self.records {
            write!(out, "{}", rec.time).unwrap();
            for v in rec.mean.iter().chain(&rec.cov) {
                write!(out, ",{v}").unwrap();
            }
            match rec.log_negativity {
                Some(e) => write!(out, ",{e}").unwrap(),
                None => out.push(','),
            }
            writeln!(out, ",{}", rec.mutual_information).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_rows_and_refusal() {
        let times = [0.0, 0.5, 1.0];
        let q = gaussian_time_series(&GaussianMoments::vacuum(), 1.0, 1.0, &times).unwrap();
        assert_eq!(q.records.len(), 3);
        assert_eq!(q.records[0].log_negativity, Some(0.0));
        assert_eq!(q.records[0].mutual_information, 0.0);
        // index of (q, q') in the upper triangle
        assert!((q.records[2].cov[2] - 0.25).abs() < 1e-12);
        let c = gaussian_time_series(
            &GaussianMoments::vacuum().with_tag(Tag::Classical),
            1.0,
            1.0,
            &times,
        )
        .unwrap();
        assert!(c.records.iter().all(|r| r.log_negativity.is_none()));
        assert_eq!(q.records[2].cov, c.records[2].cov);
        let csv = c.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().contains(",,"));
    }

    #[test]
    fn times_must_increase() {
        assert!(gaussian_time_series(&GaussianMoments::vacuum(), 1.0, 1.0, &[0.5, 0.5]).is_err());
    }
}
