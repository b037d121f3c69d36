//! JSON Lines persistence for enumeration tables and the on-disk cache.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::vm::MACHINE_ID;

use super::{enumerate_valid, kraft_sum, Bounds, EnumError, EnumRow, EnumTable, InputProfile};

pub const FORMAT: &str = "OEELAB-ENUM";
pub const VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "OEELAB_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = "./.oeelab";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    machine: String,
    max_len: usize,
    step_bound: u64,
    input_profile: String,
}

#[derive(Serialize, Deserialize)]
struct Line {
    p: BitString,
    out: BitString,
    t: u64,
}

/// Writes `table` as JSON Lines: one header object, then one row per line.
pub fn save_table<W: Write>(table: &EnumTable, dest: W) -> Result<(), EnumError> {
    let mut w = BufWriter::new(dest);
    let header = Header {
        format: FORMAT.into(),
        version: VERSION,
        machine: table.machine_id.clone(),
        max_len: table.bounds.max_len,
        step_bound: table.bounds.step_bound,
        input_profile: table.bounds.input_profile.to_string(),
    };
    serde_json::to_writer(&mut w, &header).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    for row in table.rows() {
        let line = Line { p: row.program.clone(), out: row.output.clone(), t: row.steps };
        serde_json::to_writer(&mut w, &line).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`save_table`], checking the header and the
/// table invariants (order, bounds, prefix-freeness, Kraft sum).
pub fn load_table<R: Read>(source: R) -> Result<EnumTable, EnumError> {
    let mut lines = BufReader::new(source).lines();
    let first = lines.next().ok_or_else(|| EnumError::CorruptHeader("empty file".into()))??;
    let header: Header = serde_json::from_str(&first).map_err(|e| EnumError::CorruptHeader(e.to_string()))?;
    if header.format != FORMAT {
        return Err(EnumError::CorruptHeader(format!("unknown format {:?}", header.format)));
    }
    if header.version != VERSION {
        return Err(EnumError::VersionMismatch(format!(
            "file version {}, expected {VERSION}",
            header.version
        )));
    }
    if header.machine != MACHINE_ID {
        return Err(EnumError::VersionMismatch(format!(
            "file machine {:?}, expected {MACHINE_ID:?}",
            header.machine
        )));
    }
    let input_profile: InputProfile = header.input_profile.parse().map_err(EnumError::CorruptHeader)?;
    let bounds = Bounds { max_len: header.max_len, step_bound: header.step_bound, input_profile };
    bounds.validate().map_err(|e| EnumError::CorruptHeader(e.to_string()))?;

    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line)
            .map_err(|e| EnumError::CorruptRow { line: i + 2, reason: e.to_string() })?;
        rows.push(EnumRow { program: parsed.p, output: parsed.out, steps: parsed.t });
    }
    check_invariants(&bounds, &rows)?;
    Ok(EnumTable::from_rows(bounds, rows))
}

fn check_invariants(bounds: &Bounds, rows: &[EnumRow]) -> Result<(), EnumError> {
    let violation = |msg: String| Err(EnumError::InvariantViolation(msg));
    if kraft_sum(rows, bounds.max_len) > Dyadic::integer(1) {
        return violation("Kraft sum exceeds 1".into());
    }
    for r in rows {
        if r.program.len() > bounds.max_len || r.steps > bounds.step_bound || r.steps == 0 {
            return violation(format!("row {} lies outside the declared bounds", r.program));
        }
    }
    if !rows.windows(2).all(|w| w[0].program < w[1].program) {
        return violation("rows are not in strict length-lex order".into());
    }
    // In plain lexicographic order every extension of a string follows it
    // directly, so checking neighbours suffices.
    let mut lex: Vec<&[bool]> = rows.iter().map(|r| r.program.bits()).collect();
    lex.sort();
    if let Some(w) = lex.windows(2).find(|w| w[1].starts_with(w[0])) {
        return violation(format!(
            "{} is a prefix of {}",
            BitString::from(w[0].to_vec()),
            BitString::from(w[1].to_vec())
        ));
    }
    Ok(())
}

/// Directory of persisted tables keyed by (machine, L, tau, input profile).
#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into() }
    }

    /// `$OEELAB_CACHE_DIR`, or `./.oeelab`.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        TableCache::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, bounds: &Bounds) -> PathBuf {
        let profile = bounds.input_profile.to_string().replace(':', "-");
        self.dir.join(format!("{MACHINE_ID}_L{}_T{}_{profile}.jsonl", bounds.max_len, bounds.step_bound))
    }

    /// Loads the cached table for `bounds`, or `None` when absent.
    pub fn load(&self, bounds: &Bounds) -> Result<Option<EnumTable>, EnumError> {
        let path = self.path_for(bounds);
        match fs::File::open(&path) {
            Ok(f) => {
                let table = load_table(f)?;
                if &table.bounds != bounds {
                    return Err(EnumError::CorruptHeader(format!(
                        "{} holds a table for {}",
                        path.display(),
                        table.bounds
                    )));
                }
                Ok(Some(table))
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Writes through a temporary file and renames it into place.
    pub fn store(&self, table: &EnumTable) -> Result<PathBuf, EnumError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&table.bounds);
        let tmp = path.with_extension(format!("jsonl.tmp{}", std::process::id()));
        save_table(table, fs::File::create(&tmp)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Cached table for `bounds`, enumerating and persisting it on a miss.
    pub fn get_or_build(&self, bounds: &Bounds) -> Result<EnumTable, EnumError> {
        if let Some(table) = self.load(bounds)? {
            return Ok(table);
        }
        let table = enumerate_valid(bounds)?;
        self.store(&table)?;
        Ok(table)
    }
}
