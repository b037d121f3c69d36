//! SBM-1: a single-accumulator, prefix-free reference machine.
//!
//! Program bits are decoded on demand, so a program is *valid* only when
//! it halts and every one of its bit positions was decoded at least once.
//! That requirement makes the set of valid programs prefix-free.
//!
//! | bits            | op   | effect                                            |
//! |-----------------|------|---------------------------------------------------|
//! | `000`           | ZERO | `A <- 0`                                          |
//! | `001`           | INC  | `A <- A + 1`                                      |
//! | `010`           | DBL  | `A <- 2A`                                         |
//! | `011`           | OUTB | emit `A mod 2`                                    |
//! | `100`           | OUT0 | emit 0                                            |
//! | `101`           | OUT1 | emit 1                                            |
//! | `110 d gamma(n)`| JNZ  | if `A != 0`: `A <- A - 1`, jump `n` bits (d=0 back, d=1 forward) from the end of the instruction |
//! | `1110`          | READ | `A <- 1 + next input bit`, or `A <- 0` once input is exhausted |
//! | `1111`          | HALT |                                                   |

pub mod codec;
pub(crate) mod machine;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use machine::{Core, FixedInput, FixedProgram, Tick};

pub use codec::{
    decode_self_delim, encode_self_delim, gamma_decode, gamma_encode, self_delim_len, CodecError,
};

/// Identifier carried by every persisted artifact.
pub const MACHINE_ID: &str = "SBM-1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Backward,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    Zero,
    Inc,
    Dbl,
    OutB,
    Out0,
    Out1,
    Jnz { direction: Direction, offset: u64 },
    Read,
    Halt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub opcode: Opcode,
    pub encoded_length: usize,
}

impl Instruction {
    /// Bit encoding of this instruction.
    pub fn encode(&self) -> BitString {
        encode_opcode(self.opcode)
    }
}

pub fn encode_opcode(op: Opcode) -> BitString {
    let fixed = |s: &str| BitString::lit(s);
    match op {
        Opcode::Zero => fixed("000"),
        Opcode::Inc => fixed("001"),
        Opcode::Dbl => fixed("010"),
        Opcode::OutB => fixed("011"),
        Opcode::Out0 => fixed("100"),
        Opcode::Out1 => fixed("101"),
        Opcode::Read => fixed("1110"),
        Opcode::Halt => fixed("1111"),
        Opcode::Jnz { direction, offset } => {
            let mut bits = fixed("110");
            bits.push(direction == Direction::Forward);
            bits.extend_from(&gamma_encode(offset));
            bits
        }
    }
}

/// Concatenates the encodings of `ops`.
pub fn assemble(ops: &[Opcode]) -> BitString {
    ops.iter().fold(BitString::new(), |mut acc, &op| {
        acc.extend_from(&encode_opcode(op));
        acc
    })
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("cannot decode an instruction at bit {pos}")]
pub struct DecodeError {
    pub pos: usize,
}

/// Decodes the instruction starting at bit `pos` of `program`.
pub fn decode_instruction(program: &BitString, pos: usize) -> Result<Instruction, DecodeError> {
    let prog = FixedProgram::new(program.bits());
    match machine::decode(&prog, pos) {
        Ok(ins) => Ok(ins),
        Err(_) => Err(DecodeError { pos }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Halted,
    OutOfRange,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunOutcome {
    pub status: Status,
    pub output: BitString,
    pub steps: u64,
    /// Highest program bit position decoded, `-1` when none was.
    pub max_bit_index: i64,
    pub all_bits_visited: bool,
    pub valid: bool,
}

/// Runs `program` for at most `step_bound` instructions.
///
/// `input` feeds READ; `None` is the empty stream.
pub fn run(program: &BitString, input: Option<&BitString>, step_bound: u64) -> RunOutcome {
    assert!(step_bound >= 1, "step bound must be positive");
    let mut prog = FixedProgram::new(program.bits());
    let input = FixedInput(input.map(|b| b.bits()).unwrap_or(&[]));
    let mut core = Core::with_output(BitString::new());
    let status = loop {
        if core.steps >= step_bound {
            break Status::Timeout;
        }
        match core.tick(&mut prog, &input) {
            Tick::Running => {}
            Tick::Halted => break Status::Halted,
            Tick::OutOfRange => break Status::OutOfRange,
            Tick::NeedProgram(_) | Tick::NeedInput | Tick::Rejected => {
                unreachable!("fixed tapes never demand bits")
            }
        }
    };
    let all_bits_visited = prog.all_visited();
    RunOutcome {
        status,
        valid: status == Status::Halted && all_bits_visited,
        output: core.output,
        steps: core.steps,
        max_bit_index: core.max_bit,
        all_bits_visited,
    }
}

/// Shorthand for `run(..).valid`.
pub fn is_valid(program: &BitString, input: Option<&BitString>, step_bound: u64) -> bool {
    run(program, input, step_bound).valid
}

/// The literal printer for `x`: one OUT0/OUT1 per bit followed by HALT.
pub fn literal_printer(x: &BitString) -> BitString {
    let mut ops: Vec<Opcode> =
        x.bits().iter().map(|&b| if b { Opcode::Out1 } else { Opcode::Out0 }).collect();
    ops.push(Opcode::Halt);
    assemble(&ops)
}

/// Cost in bits of [`literal_printer`] for a string of `len` bits.
pub fn literal_cost(len: usize) -> usize {
    3 * len + 4
}

/// Loop that echoes its input stream to the output and halts when the input
/// is exhausted:
///
/// ```text
/// top:  READ
///       JNZ +4      ; skip HALT when a bit was read (A becomes that bit)
///       HALT
///       OUTB
///       INC
///       JNZ -38     ; back to top
/// ```
///
/// On the empty input the loop body is never decoded, so this program is
/// valid only on non-empty inputs.
pub fn copy_program() -> BitString {
    assemble(&[
        Opcode::Read,
        Opcode::Jnz { direction: Direction::Forward, offset: 4 },
        Opcode::Halt,
        Opcode::OutB,
        Opcode::Inc,
        Opcode::Jnz { direction: Direction::Backward, offset: COPY_PROGRAM_LEN as u64 },
    ])
}

/// Length of [`copy_program`] in bits. The conditional complexity of any
/// string given itself is at most this.
pub const COPY_PROGRAM_LEN: usize = 38;
