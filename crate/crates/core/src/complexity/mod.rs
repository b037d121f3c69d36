//! Complexity measures read off an enumeration table: K̂ and its conditional
//! form, incompressibility deficiency, sophistication (soph_c and csoph),
//! busy-beaver and time-bounded logical depth, the execution-time scan and a
//! profiler over computable sequences.

mod soph;

use std::fmt;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::bits::{nat_to_string, BitString};
use crate::enumerate::{bb_hat, shortest_printer, Bounds, EnumError, EnumTable};
use crate::vm;

pub use soph::{is_bounded_total, shortest_input, Sophistication, TotalityBounds};

/// Length of [`vm::copy_program`]: `k_hat(x | x) <= C_COPY` for every
/// non-empty `x` the step bound lets it copy.
pub const C_COPY: usize = vm::COPY_PROGRAM_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MeasureKind {
    K,
    KConditional,
    Soph,
    Csoph,
    DepthBb,
    DepthC,
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::K => "K",
            MeasureKind::KConditional => "K_conditional",
            MeasureKind::Soph => "soph",
            MeasureKind::Csoph => "csoph",
            MeasureKind::DepthBb => "depth_bb",
            MeasureKind::DepthC => "depth_c",
        })
    }
}

#[derive(Debug, Error)]
pub enum ComplexityError {
    #[error("k_hat({x}) is infinite under {bounds}")]
    Unbounded { x: BitString, bounds: Bounds },
    #[error("no {kind} estimate for {x} is available under {bounds}")]
    NoneAvailable { kind: MeasureKind, x: BitString, bounds: Bounds },
    #[error(transparent)]
    Enumeration(#[from] EnumError),
}

/// The program (and input) realizing an estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub program: BitString,
    /// The input the program reads: the condition of a conditional K̂, or
    /// the `y` of a sophistication witness.
    pub input: Option<BitString>,
    pub steps: u64,
    /// Busy-beaver index of a depth_bb witness.
    pub j: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub kind: MeasureKind,
    /// `None` is the infinite marker: nothing qualifies within the bounds.
    pub value: Option<i64>,
    pub witness: Option<Witness>,
    pub bounds: Bounds,
    /// Set for soph and csoph.
    pub totality: Option<TotalityBounds>,
}

impl ComplexityEstimate {
    fn infinite(kind: MeasureKind, bounds: &Bounds) -> Self {
        ComplexityEstimate { kind, value: None, witness: None, bounds: bounds.clone(), totality: None }
    }

    fn finite(kind: MeasureKind, value: i64, witness: Witness, bounds: &Bounds) -> Self {
        ComplexityEstimate {
            kind,
            value: Some(value),
            witness: Some(witness),
            bounds: bounds.clone(),
            totality: None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_some()
    }
}

/// Shortest description of `x` under the table's bounds; with `input`, the
/// conditional form where programs read `input`.
///
/// Without an input (or with the table's own input), the first printer in
/// the table is the answer. Other inputs need a fresh search over every
/// program within the bounds, since a program can be valid on one input
/// and not on another.
pub fn k_hat(x: &BitString, table: &EnumTable, input: Option<&BitString>) -> ComplexityEstimate {
    let bounds = &table.bounds;
    let own_input = bounds.input_profile.bits();
    match input {
        Some(s) if s.bits() != own_input => {
            let row = shortest_printer(x, s.bits(), bounds.max_len, bounds.step_bound);
            match row {
                Some(row) => ComplexityEstimate::finite(
                    MeasureKind::KConditional,
                    row.program.len() as i64,
                    Witness { program: row.program, input: Some(s.clone()), steps: row.steps, j: None },
                    bounds,
                ),
                None => ComplexityEstimate::infinite(MeasureKind::KConditional, bounds),
            }
        }
        _ => {
            let kind = if input.is_some() { MeasureKind::KConditional } else { MeasureKind::K };
            match table.first_printer(x) {
                Some(row) => ComplexityEstimate::finite(
                    kind,
                    row.program.len() as i64,
                    Witness {
                        program: row.program.clone(),
                        input: input.cloned(),
                        steps: row.steps,
                        j: None,
                    },
                    bounds,
                ),
                None => ComplexityEstimate::infinite(kind, bounds),
            }
        }
    }
}

/// Finite K̂ of `x`, or the unbounded error.
pub(crate) fn k_value(x: &BitString, table: &EnumTable) -> Result<usize, ComplexityError> {
    table
        .first_printer(x)
        .map(|r| r.program.len())
        .ok_or_else(|| ComplexityError::Unbounded { x: x.clone(), bounds: table.bounds.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Deficiency {
    pub literal_cost: usize,
    pub k_hat: usize,
    pub deficiency: i64,
}

impl Deficiency {
    /// `x` is r-incompressible when its deficiency is at most `r`.
    pub fn is_incompressible(&self, r: i64) -> bool {
        self.deficiency <= r
    }
}

/// How far K̂ falls below the cost of printing `x` verbatim.
pub fn deficiency(x: &BitString, table: &EnumTable) -> Result<Deficiency, ComplexityError> {
    let k = k_value(x, table)?;
    let literal_cost = vm::literal_cost(x.len());
    Ok(Deficiency { literal_cost, k_hat: k, deficiency: literal_cost as i64 - k as i64 })
}

/// `soph_c(x)` with the given totality bounds. Builds a [`Sophistication`]
/// index; reuse one directly for many queries.
pub fn soph_hat(
    x: &BitString,
    c: usize,
    table: &EnumTable,
    totality: TotalityBounds,
) -> Result<ComplexityEstimate, ComplexityError> {
    Sophistication::new(table, totality)?.soph_hat(x, c)
}

pub fn csoph_hat(
    x: &BitString,
    table: &EnumTable,
    totality: TotalityBounds,
) -> Result<ComplexityEstimate, ComplexityError> {
    Sophistication::new(table, totality)?.csoph_hat(x)
}

/// Smallest `j` with `bb_hat(j) >= steps`, searching `j <= L`.
fn bb_index(table: &EnumTable, steps: u64) -> Option<usize> {
    (0..=table.bounds.max_len).find(|&j| bb_hat(table, j).is_some_and(|bb| bb >= steps))
}

/// Busy-beaver depth: the least `|p| - K̂(x) + j` over printers `p` of `x`
/// and `j` with `T(p) <= BB̂(j)`.
pub fn depth_bb_hat(x: &BitString, table: &EnumTable) -> Result<ComplexityEstimate, ComplexityError> {
    let k = k_value(x, table)? as i64;
    let mut best: Option<(i64, Witness)> = None;
    for row in table.printers(x) {
        let Some(j) = bb_index(table, row.steps) else { continue };
        let value = row.program.len() as i64 - k + j as i64;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            let w = Witness { program: row.program.clone(), input: None, steps: row.steps, j: Some(j) };
            best = Some((value, w));
        }
    }
    let (value, w) = best.ok_or_else(|| ComplexityError::NoneAvailable {
        kind: MeasureKind::DepthBb,
        x: x.clone(),
        bounds: table.bounds.clone(),
    })?;
    Ok(ComplexityEstimate::finite(MeasureKind::DepthBb, value, w, &table.bounds))
}

/// Logical depth at significance `c`: the fewest steps of a printer of `x`
/// at most `c - 1` bits longer than K̂(x).
pub fn depth_c_hat(
    x: &BitString,
    c: usize,
    table: &EnumTable,
) -> Result<ComplexityEstimate, ComplexityError> {
    let k = k_value(x, table)?;
    let row =
        table.printers(x).filter(|r| r.program.len() - k < c).min_by_key(|r| r.steps).ok_or_else(|| {
            ComplexityError::NoneAvailable {
                kind: MeasureKind::DepthC,
                x: x.clone(),
                bounds: table.bounds.clone(),
            }
        })?;
    let w = Witness { program: row.program.clone(), input: None, steps: row.steps, j: None };
    Ok(ComplexityEstimate::finite(MeasureKind::DepthC, row.steps as i64, w, &table.bounds))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecTimeRow {
    pub program: BitString,
    pub program_len: usize,
    pub steps: u64,
    /// K̂ of the step count read as a string; `None` when infinite.
    pub k_steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecTimeReport {
    pub rows: Vec<ExecTimeRow>,
    /// Largest `K̂(T(p)) - |p|` over rows with a finite K̂.
    pub max_gap: Option<i64>,
    pub unbounded_rows: usize,
}

/// Compares each program's running time with its length: for every row,
/// the K̂ of its step count.
pub fn exec_time_scan(table: &EnumTable) -> ExecTimeReport {
    let rows: Vec<ExecTimeRow> = table
        .rows()
        .iter()
        .map(|r| ExecTimeRow {
            program: r.program.clone(),
            program_len: r.program.len(),
            steps: r.steps,
            k_steps: table.first_printer(&nat_to_string(r.steps)).map(|p| p.program.len()),
        })
        .collect();
    let max_gap = rows.iter().filter_map(|r| r.k_steps.map(|k| k as i64 - r.program_len as i64)).max();
    let unbounded_rows = rows.iter().filter(|r| r.k_steps.is_none()).count();
    ExecTimeReport { rows, max_gap, unbounded_rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceRule {
    PowersOfTwo,
    Squares,
    Identity,
}

impl SequenceRule {
    pub fn term(self, i: u64) -> u64 {
        match self {
            SequenceRule::PowersOfTwo => 1u64.checked_shl(i as u32).unwrap_or(u64::MAX),
            SequenceRule::Squares => i.saturating_mul(i),
            SequenceRule::Identity => i,
        }
    }
}

impl std::str::FromStr for SequenceRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "powers_of_two" => Ok(SequenceRule::PowersOfTwo),
            "squares" => Ok(SequenceRule::Squares),
            "identity" => Ok(SequenceRule::Identity),
            _ => Err(format!("unknown sequence rule {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    K,
    Soph { c: usize },
    Csoph,
    DepthBb,
    DepthC { c: usize },
}

/// `measure(nat_to_string(rule(i)))` for `i = 1..=n_max`; `None` marks
/// entries that are infinite or unavailable under the bounds.
pub fn sequence_complexity_profile(
    rule: SequenceRule,
    n_max: u64,
    measure: Measure,
    table: &EnumTable,
    totality: TotalityBounds,
) -> Result<Vec<Option<i64>>, ComplexityError> {
    let soph = match measure {
        Measure::Soph { .. } | Measure::Csoph => Some(Sophistication::new(table, totality)?),
        _ => None,
    };
    let value = |x: &BitString| -> Option<i64> {
        let est = match measure {
            Measure::K => Ok(k_hat(x, table, None)),
            Measure::Soph { c } => soph.as_ref().unwrap().soph_hat(x, c),
            Measure::Csoph => soph.as_ref().unwrap().csoph_hat(x),
            Measure::DepthBb => depth_bb_hat(x, table),
            Measure::DepthC { c } => depth_c_hat(x, c, table),
        };
        est.ok().and_then(|e| e.value)
    };
    Ok((1..=n_max).map(|i| value(&nat_to_string(rule.term(i)))).collect())
}

/// Writes estimates as CSV with columns `kind,x,value,witness,L,tau,extra`.
/// Infinite values print as `inf`; `extra` always names the machine.
pub fn write_estimates_csv<W: Write>(
    dest: W,
    rows: &[(BitString, ComplexityEstimate)],
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(dest);
    w.write_record(["kind", "x", "value", "witness", "L", "tau", "extra"])?;
    for (x, e) in rows {
        let value = e.value.map_or("inf".to_string(), |v| v.to_string());
        let witness = e.witness.as_ref().map_or(String::new(), |w| w.program.to_string());
        let mut extra = vec![format!("machine={}", vm::MACHINE_ID)];
        if let Some(w) = &e.witness {
            if let Some(y) = &w.input {
                extra.push(format!("y={y}"));
            }
            if let Some(j) = w.j {
                extra.push(format!("j={j}"));
            }
            extra.push(format!("steps={}", w.steps));
        }
        if let Some(t) = &e.totality {
            extra.push(format!("total_inputs<={}", t.input_len_max));
            extra.push(format!("total_tau={}", t.step_bound));
        }
        w.write_record([
            e.kind.to_string(),
            x.to_string(),
            value,
            witness,
            e.bounds.max_len.to_string(),
            e.bounds.step_bound.to_string(),
            extra.join(";"),
        ])?;
    }
    w.flush()
}
