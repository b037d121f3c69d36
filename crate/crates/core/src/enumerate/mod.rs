//! Exhaustive tables of valid programs under explicit bounds, and the
//! quantities read directly off them: the partial halting probability and
//! the bounded busy-beaver function.

pub(crate) mod search;
mod store;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::vm::machine::LAZY_MAX_LEN;
use crate::vm::MACHINE_ID;

pub use search::shortest_printer;
pub use store::{load_table, save_table, TableCache, CACHE_DIR_ENV, DEFAULT_CACHE_DIR};

pub const DEFAULT_ROW_CAP: usize = 100_000_000;

#[derive(Debug, Error)]
pub enum EnumError {
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("table would exceed the row cap of {cap}")]
    RowCap { cap: usize },
    #[error("corrupt table header: {0}")]
    CorruptHeader(String),
    #[error("corrupt table row at line {line}: {reason}")]
    CorruptRow { line: usize, reason: String },
    #[error("table invariant violated: {0}")]
    InvariantViolation(String),
    #[error("version mismatch: {0}")]
    VersionMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// The input stream every program sees during enumeration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub enum InputProfile {
    #[default]
    Empty,
    Fixed(BitString),
}

impl InputProfile {
    pub fn bits(&self) -> &[bool] {
        match self {
            InputProfile::Empty => &[],
            InputProfile::Fixed(b) => b.bits(),
        }
    }
}

impl fmt::Display for InputProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputProfile::Empty => f.write_str("empty"),
            InputProfile::Fixed(b) => write!(f, "fixed:{b}"),
        }
    }
}

impl FromStr for InputProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "empty" {
            return Ok(InputProfile::Empty);
        }
        s.strip_prefix("fixed:")
            .and_then(|b| b.parse().ok())
            .map(InputProfile::Fixed)
            .ok_or_else(|| format!("unknown input profile {s:?}"))
    }
}

/// Resource bounds: program length `max_len` (bits) and `step_bound`
/// executed instructions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub max_len: usize,
    pub step_bound: u64,
    pub input_profile: InputProfile,
}

impl Bounds {
    pub fn new(max_len: usize, step_bound: u64) -> Self {
        Bounds { max_len, step_bound, input_profile: InputProfile::Empty }
    }

    pub fn validate(&self) -> Result<(), EnumError> {
        if self.max_len < 1 || self.step_bound < 1 {
            return Err(EnumError::InvalidBounds(format!(
                "max_len and step_bound must be positive (got L={}, tau={})",
                self.max_len, self.step_bound
            )));
        }
        if self.max_len > LAZY_MAX_LEN {
            return Err(EnumError::InvalidBounds(format!(
                "max_len {} exceeds the supported {LAZY_MAX_LEN}",
                self.max_len
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={} tau={} input={}", self.max_len, self.step_bound, self.input_profile)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumRow {
    pub program: BitString,
    pub output: BitString,
    pub steps: u64,
}

/// Every valid program under some [`Bounds`], in length-lex program order.
#[derive(Debug)]
pub struct EnumTable {
    pub machine_id: String,
    pub bounds: Bounds,
    rows: Vec<EnumRow>,
    by_output: OnceLock<HashMap<BitString, usize>>,
}

impl EnumTable {
    pub(crate) fn from_rows(bounds: Bounds, rows: Vec<EnumRow>) -> Self {
        EnumTable { machine_id: MACHINE_ID.to_string(), bounds, rows, by_output: OnceLock::new() }
    }

    pub fn rows(&self) -> &[EnumRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// First row (length-lex) whose program prints `output`.
    pub fn first_printer(&self, output: &BitString) -> Option<&EnumRow> {
        let index = self.by_output.get_or_init(|| {
            let mut map = HashMap::new();
            for (i, row) in self.rows.iter().enumerate() {
                map.entry(row.output.clone()).or_insert(i);
            }
            map
        });
        index.get(output).map(|&i| &self.rows[i])
    }

    /// All rows printing `output`, in table order.
    pub fn printers<'a>(&'a self, output: &'a BitString) -> impl Iterator<Item = &'a EnumRow> + 'a {
        self.rows.iter().filter(move |r| &r.output == output)
    }

    /// `sum 2^-|p|` over the rows.
    pub fn kraft_sum(&self) -> Dyadic {
        kraft_sum(&self.rows, self.bounds.max_len)
    }
}

impl PartialEq for EnumTable {
    fn eq(&self, other: &Self) -> bool {
        self.machine_id == other.machine_id && self.bounds == other.bounds && self.rows == other.rows
    }
}

impl Eq for EnumTable {}

impl Clone for EnumTable {
    fn clone(&self) -> Self {
        EnumTable {
            machine_id: self.machine_id.clone(),
            bounds: self.bounds.clone(),
            rows: self.rows.clone(),
            by_output: OnceLock::new(),
        }
    }
}

pub(crate) fn kraft_sum(rows: &[EnumRow], max_len: usize) -> Dyadic {
    let exponent = rows.iter().map(|r| r.program.len()).max().unwrap_or(0).max(max_len) as u32;
    let mut sum = Dyadic::zero(exponent);
    for row in rows {
        sum.add_pow2_neg(row.program.len() as u32);
    }
    sum
}

/// Builds the table with the default row cap.
pub fn enumerate_valid(bounds: &Bounds) -> Result<EnumTable, EnumError> {
    enumerate_with_cap(bounds, DEFAULT_ROW_CAP)
}

pub fn enumerate_with_cap(bounds: &Bounds, row_cap: usize) -> Result<EnumTable, EnumError> {
    bounds.validate()?;
    let rows = search::all_valid(bounds.max_len, bounds.step_bound, bounds.input_profile.bits(), row_cap)
        .map_err(|_| EnumError::RowCap { cap: row_cap })?;
    Ok(EnumTable::from_rows(bounds.clone(), rows))
}

/// Partial halting probability: `sum 2^-|p|` over the table, over the
/// denominator `2^L`.
pub fn omega_hat(table: &EnumTable) -> Dyadic {
    table.kraft_sum()
}

/// Longest running time among rows with `|p| <= n`.
pub fn bb_hat(table: &EnumTable, n: usize) -> Option<u64> {
    table.rows.iter().filter(|r| r.program.len() <= n).map(|r| r.steps).max()
}
