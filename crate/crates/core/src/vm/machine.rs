//! Interpreter core shared by plain runs, execution-tree search and
//! on-demand sampling.
//!
//! A [`Core::tick`] either completes one instruction or reports which bit it
//! is missing, leaving the core untouched so the caller can fill the bit in
//! (or fork on it) and tick again.

use crate::bits::BitString;

use super::{Direction, Instruction, Opcode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cell {
    Bit(bool),
    /// Inside the addressable range but not yet materialized.
    Unknown,
    /// Past the end of the program (or of the input).
    End,
}

pub(crate) trait ProgramTape {
    fn cell(&self, pos: usize) -> Cell;
    /// Called when a forward jump lands at `target`; `false` aborts the run.
    fn land(&mut self, target: usize) -> bool;
    fn visit(&mut self, start: usize, end: usize);
}

pub(crate) trait InputTape {
    fn cell(&self, pos: usize) -> Cell;
}

/// Accumulator. Exact below 2^63; above that only the low 64 bits are kept
/// together with a flag, which preserves parity and the zero test for any
/// run shorter than 2^62 steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub(crate) struct Acc {
    low: u64,
    huge: bool,
}

const EXACT_LIMIT: u64 = 1 << 63;

impl Acc {
    pub fn small(v: u64) -> Self {
        Acc { low: v, huge: false }
    }

    fn inc(&mut self) {
        self.low = self.low.wrapping_add(1);
        if self.low >= EXACT_LIMIT {
            self.huge = true;
        }
    }

    fn dbl(&mut self) {
        if self.low >= EXACT_LIMIT / 2 {
            self.huge = true;
        }
        self.low = self.low.wrapping_mul(2);
    }

    fn dec(&mut self) {
        self.low = self.low.wrapping_sub(1);
    }

    pub fn is_zero(&self) -> bool {
        !self.huge && self.low == 0
    }

    fn parity(&self) -> bool {
        self.low & 1 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DecodeStop {
    /// The program cannot complete an instruction here.
    Fail,
    /// Bit `pos` must be materialized before decoding can continue.
    Demand(usize),
}

pub(crate) fn decode<P: ProgramTape>(prog: &P, pos: usize) -> Result<Instruction, DecodeStop> {
    let bit = |i: usize| match prog.cell(pos + i) {
        Cell::Bit(b) => Ok(b),
        Cell::Unknown => Err(DecodeStop::Demand(pos + i)),
        Cell::End => Err(DecodeStop::Fail),
    };
    let fixed = |opcode, len| Ok(Instruction { opcode, encoded_length: len });
    let (b0, b1, b2) = (bit(0)?, bit(1)?, bit(2)?);
    match (b0, b1, b2) {
        (false, false, false) => fixed(Opcode::Zero, 3),
        (false, false, true) => fixed(Opcode::Inc, 3),
        (false, true, false) => fixed(Opcode::Dbl, 3),
        (false, true, true) => fixed(Opcode::OutB, 3),
        (true, false, false) => fixed(Opcode::Out0, 3),
        (true, false, true) => fixed(Opcode::Out1, 3),
        (true, true, true) => {
            if bit(3)? {
                fixed(Opcode::Halt, 4)
            } else {
                fixed(Opcode::Read, 4)
            }
        }
        (true, true, false) => {
            let direction = if bit(3)? { Direction::Forward } else { Direction::Backward };
            let mut zeros = 0usize;
            while !bit(4 + zeros)? {
                zeros += 1;
                if zeros >= 64 {
                    return Err(DecodeStop::Fail);
                }
            }
            let mut offset = 1u64;
            for i in 0..zeros {
                offset = (offset << 1) | bit(5 + zeros + i)? as u64;
            }
            fixed(Opcode::Jnz { direction, offset }, 5 + 2 * zeros)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tick {
    Running,
    Halted,
    OutOfRange,
    NeedProgram(usize),
    NeedInput,
    /// The output sink refused the emitted bit.
    Rejected,
}

/// Where emitted bits go.
pub(crate) trait OutputSink {
    /// Records `bit`; `false` rejects it and stops the run.
    fn emit(&mut self, bit: bool) -> bool;
}

impl OutputSink for BitString {
    fn emit(&mut self, bit: bool) -> bool {
        self.push(bit);
        true
    }
}

/// Accepts only output that stays a prefix of `target`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PrefixOf<'a> {
    pub target: &'a [bool],
    pub len: usize,
}

impl<'a> PrefixOf<'a> {
    pub fn new(target: &'a [bool]) -> Self {
        PrefixOf { target, len: 0 }
    }

    pub fn complete(&self) -> bool {
        self.len == self.target.len()
    }

    pub fn remaining(&self) -> usize {
        self.target.len() - self.len
    }
}

impl OutputSink for PrefixOf<'_> {
    fn emit(&mut self, bit: bool) -> bool {
        if self.target.get(self.len) == Some(&bit) {
            self.len += 1;
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Core<O> {
    pub pc: usize,
    pub acc: Acc,
    pub output: O,
    pub steps: u64,
    pub cursor: usize,
    pub max_bit: i64,
    /// Some jump has been taken; until then execution was straight-line.
    pub jumped: bool,
}

impl<O: OutputSink> Core<O> {
    pub fn with_output(output: O) -> Self {
        Core { pc: 0, acc: Acc::default(), output, steps: 0, cursor: 0, max_bit: -1, jumped: false }
    }

    /// Executes one instruction. Returns without side effects when a
    /// program or input bit is missing.
    pub fn tick<P: ProgramTape, I: InputTape>(&mut self, prog: &mut P, input: &I) -> Tick {
        let ins = match decode(prog, self.pc) {
            Ok(ins) => ins,
            Err(DecodeStop::Fail) => return Tick::OutOfRange,
            Err(DecodeStop::Demand(pos)) => return Tick::NeedProgram(pos),
        };
        let after = self.pc + ins.encoded_length;
        let read = if ins.opcode == Opcode::Read {
            match input.cell(self.cursor) {
                Cell::Unknown => return Tick::NeedInput,
                c => Some(c),
            }
        } else {
            None
        };

        prog.visit(self.pc, after);
        self.max_bit = self.max_bit.max(after as i64 - 1);
        self.steps += 1;
        self.pc = after;
        match ins.opcode {
            Opcode::Zero => self.acc = Acc::small(0),
            Opcode::Inc => self.acc.inc(),
            Opcode::Dbl => self.acc.dbl(),
            Opcode::OutB | Opcode::Out0 | Opcode::Out1 => {
                let bit = match ins.opcode {
                    Opcode::OutB => self.acc.parity(),
                    Opcode::Out0 => false,
                    _ => true,
                };
                if !self.output.emit(bit) {
                    return Tick::Rejected;
                }
            }
            Opcode::Read => match read {
                Some(Cell::Bit(b)) => {
                    self.acc = Acc::small(1 + b as u64);
                    self.cursor += 1;
                }
                _ => self.acc = Acc::small(0),
            },
            Opcode::Halt => return Tick::Halted,
            Opcode::Jnz { direction, offset } => {
                if !self.acc.is_zero() {
                    self.acc.dec();
                    self.jumped = true;
                    let offset = offset as usize;
                    match direction {
                        Direction::Backward => {
                            if offset > after {
                                return Tick::OutOfRange;
                            }
                            self.pc = after - offset;
                        }
                        Direction::Forward => {
                            let target = after.saturating_add(offset);
                            if !prog.land(target) {
                                return Tick::OutOfRange;
                            }
                            self.pc = target;
                        }
                    }
                }
            }
        }
        Tick::Running
    }
}

/// A fully known program.
#[derive(Clone)]
pub(crate) struct FixedProgram<'a> {
    bits: &'a [bool],
    visited: Vec<u64>,
    visited_count: usize,
}

impl<'a> FixedProgram<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        FixedProgram { bits, visited: vec![0; bits.len().div_ceil(64)], visited_count: 0 }
    }

    pub fn all_visited(&self) -> bool {
        self.visited_count == self.bits.len()
    }

    pub fn visited_words(&self) -> &[u64] {
        &self.visited
    }
}

impl ProgramTape for FixedProgram<'_> {
    fn cell(&self, pos: usize) -> Cell {
        match self.bits.get(pos) {
            Some(&b) => Cell::Bit(b),
            None => Cell::End,
        }
    }

    fn land(&mut self, target: usize) -> bool {
        target <= self.bits.len()
    }

    fn visit(&mut self, start: usize, end: usize) {
        for i in start..end {
            let (w, m) = (i / 64, 1u64 << (i % 64));
            if self.visited[w] & m == 0 {
                self.visited[w] |= m;
                self.visited_count += 1;
            }
        }
    }
}

/// Longest program a [`LazyProgram`] can describe.
pub const LAZY_MAX_LEN: usize = 64;

/// A program whose bits are materialized on demand, with total length at
/// most `max_len`. `extent` is the minimal length consistent with what the
/// run has seen so far; positions below it may still be unknown after a
/// forward jump skipped them.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LazyProgram {
    values: u64,
    known: u64,
    visited: u64,
    extent: usize,
    max_len: usize,
}

impl LazyProgram {
    pub fn new(max_len: usize) -> Self {
        assert!(max_len <= LAZY_MAX_LEN);
        LazyProgram { values: 0, known: 0, visited: 0, extent: 0, max_len }
    }

    pub fn set(&mut self, pos: usize, bit: bool) {
        debug_assert!(pos < self.max_len);
        self.known |= 1 << pos;
        if bit {
            self.values |= 1 << pos;
        }
        self.extent = self.extent.max(pos + 1);
    }

    /// Some window of four bits, at any alignment, is or can still become
    /// a HALT.
    pub fn halt_possible(&self) -> bool {
        if self.max_len < 4 {
            return false;
        }
        let ones = self.values | !self.known;
        let windows = ones & (ones >> 1) & (ones >> 2) & (ones >> 3);
        let starts = u64::MAX >> (64 - (self.max_len - 3));
        windows & starts != 0
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    fn full_mask(&self) -> u64 {
        if self.extent == 64 {
            u64::MAX
        } else {
            (1u64 << self.extent) - 1
        }
    }

    /// Every position below `extent` has been decoded.
    pub fn all_visited(&self) -> bool {
        self.visited == self.full_mask()
    }

    pub fn to_bits(self) -> BitString {
        (0..self.extent).map(|i| (self.values >> i) & 1 == 1).collect()
    }
}

impl ProgramTape for LazyProgram {
    fn cell(&self, pos: usize) -> Cell {
        if pos < self.extent && (self.known >> pos) & 1 == 1 {
            Cell::Bit((self.values >> pos) & 1 == 1)
        } else if pos < self.max_len {
            Cell::Unknown
        } else {
            Cell::End
        }
    }

    fn land(&mut self, target: usize) -> bool {
        if target > self.max_len {
            return false;
        }
        self.extent = self.extent.max(target);
        true
    }

    fn visit(&mut self, start: usize, end: usize) {
        for i in start..end {
            self.visited |= 1 << i;
        }
    }
}

pub(crate) struct FixedInput<'a>(pub &'a [bool]);

impl InputTape for FixedInput<'_> {
    fn cell(&self, pos: usize) -> Cell {
        match self.0.get(pos) {
            Some(&b) => Cell::Bit(b),
            None => Cell::End,
        }
    }
}

/// An input stream chosen on demand: `bits` so far, then either more bits
/// or the end once `ended` is set.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OpenInput<'a> {
    pub bits: &'a [bool],
    pub ended: bool,
}

impl InputTape for OpenInput<'_> {
    fn cell(&self, pos: usize) -> Cell {
        if let Some(&b) = self.bits.get(pos) {
            Cell::Bit(b)
        } else if self.ended {
            Cell::End
        } else {
            Cell::Unknown
        }
    }
}
