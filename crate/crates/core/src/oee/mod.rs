//! Finite-horizon open-endedness diagnostics over complexity series.
//!
//! Nothing here decides open-ended evolution; every quantity describes only
//! the observed prefix.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexity::{
    csoph_hat, depth_bb_hat, depth_c_hat, k_hat, soph_hat, ComplexityError, Measure, MeasureKind,
    TotalityBounds,
};
use crate::dynsys::Trajectory;
use crate::enumerate::EnumTable;

#[derive(Debug, Error)]
pub enum OeeError {
    #[error("every entry of the series is beyond the bounds")]
    AllUnbounded,
    #[error("empty series")]
    Empty,
    #[error("series file: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Complexity(#[from] ComplexityError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexitySeries {
    /// Finite values, in order.
    pub values: Vec<i64>,
    /// Trajectory time of each value.
    pub times: Vec<usize>,
    /// Times whose measure was infinite or unavailable under the bounds.
    pub excluded: Vec<usize>,
    pub measure_kind: Option<MeasureKind>,
    pub source: String,
}

impl ComplexitySeries {
    pub fn from_values(values: Vec<i64>, source: impl Into<String>) -> Result<Self, OeeError> {
        if values.is_empty() {
            return Err(OeeError::Empty);
        }
        let times = (0..values.len()).collect();
        Ok(ComplexitySeries {
            values,
            times,
            excluded: Vec::new(),
            measure_kind: None,
            source: source.into(),
        })
    }
}

fn kind_of(measure: Measure) -> MeasureKind {
    match measure {
        Measure::K => MeasureKind::K,
        Measure::Soph { .. } => MeasureKind::Soph,
        Measure::Csoph => MeasureKind::Csoph,
        Measure::DepthBb => MeasureKind::DepthBb,
        Measure::DepthC { .. } => MeasureKind::DepthC,
    }
}

/// The measure of every state of a trajectory. States whose value is
/// beyond the bounds are left out and listed in `excluded`.
pub fn complexity_series(
    trajectory: &Trajectory,
    measure: Measure,
    table: &EnumTable,
    totality: TotalityBounds,
    source: impl Into<String>,
) -> Result<ComplexitySeries, OeeError> {
    let soph = match measure {
        Measure::Soph { .. } | Measure::Csoph => {
            Some(crate::complexity::Sophistication::new(table, totality)?)
        }
        _ => None,
    };
    let mut series = ComplexitySeries {
        values: Vec::new(),
        times: Vec::new(),
        excluded: Vec::new(),
        measure_kind: Some(kind_of(measure)),
        source: source.into(),
    };
    for (t, x) in trajectory.states.iter().enumerate() {
        let est = match measure {
            Measure::K => Ok(k_hat(x, table, None)),
            Measure::Soph { c } => {
                soph.as_ref().map_or_else(|| soph_hat(x, c, table, totality), |s| s.soph_hat(x, c))
            }
            Measure::Csoph => soph.as_ref().map_or_else(|| csoph_hat(x, table, totality), |s| s.csoph_hat(x)),
            Measure::DepthBb => depth_bb_hat(x, table),
            Measure::DepthC { c } => depth_c_hat(x, c, table),
        };
        match est.ok().and_then(|e| e.value) {
            Some(v) => {
                series.values.push(v);
                series.times.push(t);
            }
            None => series.excluded.push(t),
        }
    }
    if series.values.is_empty() {
        return Err(OeeError::AllUnbounded);
    }
    Ok(series)
}

/// Largest `i` such that every value up to index `i` is exceeded somewhere
/// later; `None` when even the first value never is.
pub fn oee_witness(values: &[i64]) -> Option<usize> {
    let mut later_max = i64::MIN;
    let mut exceeded = vec![false; values.len()];
    for i in (0..values.len()).rev() {
        exceeded[i] = later_max > values[i];
        later_max = later_max.max(values[i]);
    }
    exceeded.iter().take_while(|&&e| e).count().checked_sub(1)
}

/// Pointwise-minimal nonnegative `g` with `C_i <= C_j + g(j)` for `i <= j`.
pub fn gamma_star(values: &[i64]) -> Vec<i64> {
    let mut running = i64::MIN;
    values
        .iter()
        .map(|&c| {
            running = running.max(c);
            running - c
        })
        .collect()
}

pub const VERDICT_NOTE: &str = "finite-horizon diagnostic only: the adjusted series and its new-maxima count describe the observed prefix and cannot establish strong open-ended evolution";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OeeReport {
    pub oee_witness_prefix: Option<usize>,
    pub gamma_star: Vec<i64>,
    pub adjusted: Vec<i64>,
    pub new_maxima_count: usize,
    pub verdict_note: String,
}

pub fn strong_oee_report(values: &[i64]) -> Result<OeeReport, OeeError> {
    if values.is_empty() {
        return Err(OeeError::Empty);
    }
    let gamma = gamma_star(values);
    let adjusted: Vec<i64> = values.iter().zip(&gamma).map(|(c, g)| c - g).collect();
    let mut best = adjusted[0];
    let mut new_maxima_count = 0;
    for &a in &adjusted[1..] {
        if a > best {
            new_maxima_count += 1;
            best = a;
        }
    }
    Ok(OeeReport {
        oee_witness_prefix: oee_witness(values),
        gamma_star: gamma,
        adjusted,
        new_maxima_count,
        verdict_note: VERDICT_NOTE.to_string(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct SeriesRow {
    index: usize,
    value: i64,
}

/// Reads an `index,value` CSV. Rows are taken in file order.
pub fn read_series_csv<R: Read>(source: R, name: &str) -> Result<ComplexitySeries, OeeError> {
    let mut values = Vec::new();
    let mut times = Vec::new();
    for row in csv::Reader::from_reader(source).deserialize() {
        let row: SeriesRow = row?;
        times.push(row.index);
        values.push(row.value);
    }
    let mut series = ComplexitySeries::from_values(values, name)?;
    series.times = times;
    Ok(series)
}

pub fn write_series_csv<W: Write>(dest: W, series: &ComplexitySeries) -> Result<(), OeeError> {
    let mut w = csv::Writer::from_writer(dest);
    for (&index, &value) in series.times.iter().zip(&series.values) {
        w.serialize(SeriesRow { index, value })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One row per index: `index,value,gamma_star,adjusted`.
pub fn write_report_csv<W: Write>(
    dest: W,
    series: &ComplexitySeries,
    report: &OeeReport,
) -> Result<(), OeeError> {
    let mut w = csv::Writer::from_writer(dest);
    w.write_record(["index", "value", "gamma_star", "adjusted"])?;
    for i in 0..series.values.len() {
        w.write_record([
            series.times[i].to_string(),
            series.values[i].to_string(),
            report.gamma_star[i].to_string(),
            report.adjusted[i].to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
