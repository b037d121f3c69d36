//! Two-part descriptions: bounded totality, shortest inputs, soph_c and csoph.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::Serialize;

use crate::bits::BitString;
use crate::enumerate::search::all_valid;
use crate::enumerate::{EnumError, EnumRow, EnumTable, DEFAULT_ROW_CAP};
use crate::vm::machine::{Acc, Core, FixedProgram, OpenInput, PrefixOf, Tick};
use crate::vm::self_delim_len;

use super::{k_value, ComplexityError, ComplexityEstimate, MeasureKind, Witness};

/// A program is bounded-total when it is valid within `step_bound` steps
/// on every input of length at most `input_len_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TotalityBounds {
    pub input_len_max: usize,
    pub step_bound: u64,
}

impl TotalityBounds {
    pub fn new(input_len_max: usize, step_bound: u64) -> Self {
        TotalityBounds { input_len_max, step_bound }
    }

    /// Inputs up to 4 bits, the table's own step bound.
    pub fn for_table(table: &EnumTable) -> Self {
        TotalityBounds::new(4, table.bounds.step_bound)
    }
}

/// Explores the input tree depth first, so one halting run covers every
/// input sharing the prefix it read.
pub fn is_bounded_total(program: &BitString, bounds: TotalityBounds) -> bool {
    fn walk(
        core: Core<BitString>,
        prog: FixedProgram<'_>,
        input: &mut Vec<bool>,
        ended: bool,
        bounds: TotalityBounds,
    ) -> bool {
        let (mut core, mut prog) = (core, prog);
        loop {
            if core.steps >= bounds.step_bound {
                return false;
            }
            let tape = OpenInput { bits: input, ended };
            match core.tick(&mut prog, &tape) {
                Tick::Running => {}
                Tick::Halted => return prog.all_visited(),
                Tick::NeedInput => break,
                _ => return false,
            }
        }
        if !walk(core.clone(), prog.clone(), input, true, bounds) {
            return false;
        }
        if input.len() == bounds.input_len_max {
            return true;
        }
        for bit in [false, true] {
            input.push(bit);
            let ok = walk(core.clone(), prog.clone(), input, false, bounds);
            input.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    let prog = FixedProgram::new(program.bits());
    walk(Core::with_output(BitString::new()), prog, &mut Vec::new(), false, bounds)
}

type StateKey = (usize, Acc, usize, u64, Vec<u64>);

struct Probe<'a> {
    core: Core<PrefixOf<'a>>,
    prog: FixedProgram<'a>,
}

enum Outcome<'a> {
    Printed(u64),
    Failed,
    Needs(Probe<'a>),
}

impl<'a> Probe<'a> {
    fn run(mut self, input: &[bool], ended: bool, step_bound: u64) -> Outcome<'a> {
        loop {
            if self.core.steps >= step_bound {
                return Outcome::Failed;
            }
            let tape = OpenInput { bits: input, ended };
            match self.core.tick(&mut self.prog, &tape) {
                Tick::Running => {}
                Tick::Halted if self.prog.all_visited() && self.core.output.complete() => {
                    return Outcome::Printed(self.core.steps)
                }
                Tick::NeedInput => return Outcome::Needs(self),
                _ => return Outcome::Failed,
            }
        }
    }

    fn key(&self) -> StateKey {
        let c = &self.core;
        (c.pc, c.acc, c.output.len, c.steps, self.prog.visited_words().to_vec())
    }
}

/// Shortest input (length-lex first among the shortest, at most
/// `max_input` bits) on which `program` validly prints `x` within
/// `step_bound` steps, with the steps taken.
pub fn shortest_input(
    program: &BitString,
    x: &BitString,
    step_bound: u64,
    max_input: usize,
) -> Option<(BitString, u64)> {
    let start =
        Probe { core: Core::with_output(PrefixOf::new(x.bits())), prog: FixedProgram::new(program.bits()) };
    // Runs that have read exactly one layer's worth of bits, in lex order
    // of those bits. `Err` holds a run that halted without asking for more.
    let mut layer: Vec<(Vec<bool>, Result<Probe<'_>, u64>)> = vec![(Vec::new(), Ok(start))];
    let mut first = true;
    loop {
        let mut pending = Vec::new();
        for (read, entry) in layer {
            let probe = match entry {
                Err(steps) => return Some((BitString::from_bits(read), steps)),
                Ok(p) if first => match p.run(&read, false, step_bound) {
                    Outcome::Printed(steps) => return Some((BitString::new(), steps)),
                    Outcome::Failed => continue,
                    Outcome::Needs(p) => p,
                },
                Ok(p) => p,
            };
            let fork = Probe { core: probe.core, prog: probe.prog.clone() };
            if let Outcome::Printed(steps) = fork.run(&read, true, step_bound) {
                return Some((BitString::from_bits(read), steps));
            }
            pending.push((read, probe));
        }
        first = false;
        if pending.first().is_none_or(|(read, _)| read.len() == max_input) {
            return None;
        }
        let mut seen = HashSet::new();
        layer = Vec::new();
        for (read, probe) in pending {
            for bit in [false, true] {
                let mut y = read.clone();
                y.push(bit);
                let fork = Probe { core: probe.core, prog: probe.prog.clone() };
                match fork.run(&y, false, step_bound) {
                    Outcome::Printed(steps) => layer.push((y, Err(steps))),
                    Outcome::Failed => {}
                    Outcome::Needs(p) => {
                        if seen.insert(p.key()) {
                            layer.push((y, Ok(p)));
                        }
                    }
                }
            }
        }
    }
}

/// Bounded-total candidates for one table and one set of totality bounds.
/// Totality is decided lazily and remembered, so many queries share it.
pub struct Sophistication<'t> {
    table: &'t EnumTable,
    totality: TotalityBounds,
    candidates: Vec<EnumRow>,
    total: Vec<OnceLock<bool>>,
}

impl<'t> Sophistication<'t> {
    pub fn new(table: &'t EnumTable, totality: TotalityBounds) -> Result<Self, ComplexityError> {
        let b = &table.bounds;
        // Totality includes the empty input, so only programs valid there
        // are candidates.
        let candidates = all_valid(b.max_len, totality.step_bound, &[], DEFAULT_ROW_CAP)
            .map_err(|_| EnumError::RowCap { cap: DEFAULT_ROW_CAP })?;
        let total = candidates.iter().map(|_| OnceLock::new()).collect();
        Ok(Sophistication { table, totality, candidates, total })
    }

    fn is_total(&self, i: usize) -> bool {
        *self.total[i].get_or_init(|| is_bounded_total(&self.candidates[i].program, self.totality))
    }

    fn estimate(&self, kind: MeasureKind, value: Option<(i64, Witness)>) -> ComplexityEstimate {
        let (value, witness) = match value {
            Some((v, w)) => (Some(v), Some(w)),
            None => (None, None),
        };
        ComplexityEstimate {
            kind,
            value,
            witness,
            bounds: self.table.bounds.clone(),
            totality: Some(self.totality),
        }
    }

    /// Smallest bounded-total `p` with some `y`, `p(y) = x` and
    /// `|p| + |y| <= k_hat(x) + c`.
    pub fn soph_hat(&self, x: &BitString, c: usize) -> Result<ComplexityEstimate, ComplexityError> {
        let budget = k_value(x, self.table)? + c;
        for (i, row) in self.candidates.iter().enumerate() {
            let len = row.program.len();
            if len > budget {
                break;
            }
            if !self.is_total(i) {
                continue;
            }
            if let Some((y, steps)) = shortest_input(&row.program, x, self.totality.step_bound, budget - len)
            {
                let w = Witness { program: row.program.clone(), input: Some(y), steps, j: None };
                return Ok(self.estimate(MeasureKind::Soph, Some((len as i64, w))));
            }
        }
        Ok(self.estimate(MeasureKind::Soph, None))
    }

    /// Least `2|p| + |encode_self_delim(y)| - k_hat(x)` over bounded-total
    /// `p` and inputs `y` with `p(y) = x`.
    pub fn csoph_hat(&self, x: &BitString) -> Result<ComplexityEstimate, ComplexityError> {
        let k = k_value(x, self.table)? as i64;
        let tau = self.totality.step_bound;
        let mut best: Option<(i64, Witness)> = None;
        for (i, row) in self.candidates.iter().enumerate() {
            let twice = 2 * row.program.len() as i64;
            let max_input = match &best {
                Some((b, _)) => {
                    if twice + 1 - k >= *b {
                        break;
                    }
                    // Longest y whose code still beats the best so far.
                    let room = b - twice + k;
                    (0..).take_while(|&n| (self_delim_len(n) as i64) < room).last().unwrap_or(0)
                }
                None => tau as usize,
            };
            if !self.is_total(i) {
                continue;
            }
            if let Some((y, steps)) = shortest_input(&row.program, x, tau, max_input) {
                let value = twice + self_delim_len(y.len()) as i64 - k;
                if best.as_ref().is_none_or(|(b, _)| value < *b) {
                    let w = Witness { program: row.program.clone(), input: Some(y), steps, j: None };
                    best = Some((value, w));
                }
            }
        }
        Ok(self.estimate(MeasureKind::Csoph, best))
    }
}
