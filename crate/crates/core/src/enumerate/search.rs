//! Execution-tree search: simulate SBM-1 over a partially materialized
//! program and fork on 0/1 whenever a not-yet-materialized bit is decoded.
//! Each leaf is exactly one valid program, so the leaves coincide with the
//! valid programs a scan over every candidate string would find.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::bits::BitString;
use crate::vm::machine::{Cell, Core, FixedInput, LazyProgram, OutputSink, PrefixOf, ProgramTape, Tick};

use super::EnumRow;

#[derive(Clone)]
struct Node<O> {
    core: Core<O>,
    prog: LazyProgram,
}

enum Advance {
    Leaf,
    Dead,
    Fork(usize),
}

/// How a search treats emitted output.
trait Mode: Sync {
    type Out: OutputSink + Clone + Send;
    fn root(&self) -> Self::Out;
    /// Output bits still owed, when the search has a fixed target.
    fn remaining(&self, _out: &Self::Out) -> Option<usize> {
        None
    }
    fn accept(&self, out: &Self::Out) -> bool;
    fn output(&self, out: &Self::Out) -> BitString;
}

struct Collect;

impl Mode for Collect {
    type Out = BitString;
    fn root(&self) -> BitString {
        BitString::new()
    }
    fn accept(&self, _: &BitString) -> bool {
        true
    }
    fn output(&self, out: &BitString) -> BitString {
        out.clone()
    }
}

struct Target<'a>(&'a BitString);

impl<'a> Mode for Target<'a> {
    type Out = PrefixOf<'a>;
    fn root(&self) -> PrefixOf<'a> {
        PrefixOf::new(self.0.bits())
    }
    fn remaining(&self, out: &PrefixOf<'a>) -> Option<usize> {
        Some(out.remaining())
    }
    fn accept(&self, out: &PrefixOf<'a>) -> bool {
        out.complete()
    }
    fn output(&self, _: &PrefixOf<'a>) -> BitString {
        self.0.clone()
    }
}

/// Fewest bits of new straight-line code that can finish a run owing
/// `owed` output bits, from an accumulator that is zero or not: a HALT once
/// nothing is owed, or a JNZ that jumps (it may land anywhere, even
/// mid-instruction in code already run, so nothing more can be said).
fn tail(zero: bool, owed: usize) -> usize {
    match (zero, owed) {
        (_, 0) => 4,
        (false, _) => 5,
        // OUT then HALT, or INC then JNZ.
        (true, 1) => 7,
        (true, _) => 8,
    }
}

/// Whether a node that has not taken a jump yet can still halt validly
/// within the length bound. Until the first taken jump, execution walks
/// straight through code it has never decoded. `owed` is `None` when any
/// output is acceptable.
fn has_room<O>(core: &Core<O>, prog: &LazyProgram, owed: Option<usize>, read_gives_bit: bool) -> bool {
    // No bound below exceeds a JNZ that falls through plus `tail`.
    if core.jumped || core.pc + 13 <= prog.max_len() {
        return true;
    }
    let may = |i: usize, b: bool| match prog.cell(core.pc + i) {
        Cell::Bit(x) => x == b,
        Cell::Unknown => true,
        Cell::End => false,
    };
    let fits = |b0, b1, b2| may(0, b0) && may(1, b1) && may(2, b2);
    let may_emit = owed.is_none_or(|r| r > 0);
    let owed = owed.unwrap_or(0);
    let zero = core.acc.is_zero();
    let mut need = usize::MAX;
    let mut consider = |ok: bool, n: usize| {
        if ok {
            need = need.min(n);
        }
    };
    consider(fits(false, false, false), 3 + tail(true, owed));
    consider(fits(false, false, true), 3 + tail(false, owed));
    consider(fits(false, true, false), 3 + tail(zero, owed));
    let emits = fits(false, true, true) || fits(true, false, false) || fits(true, false, true);
    consider(emits && may_emit, 3 + tail(zero, owed.saturating_sub(1)));
    consider(fits(true, true, false), if zero { 5 + tail(true, owed) } else { 5 });
    let wide = fits(true, true, true);
    consider(wide && may(3, false), 4 + tail(!read_gives_bit, owed));
    consider(wide && may(3, true) && owed == 0, 4);
    core.pc.saturating_add(need) <= prog.max_len()
}

/// Exploration aborted because more than the allowed number of rows would
/// be produced.
#[derive(Debug)]
pub(crate) struct CapExceeded;

struct Explorer<'a, M> {
    max_len: usize,
    step_bound: u64,
    input: &'a [bool],
    mode: M,
}

impl<M: Mode> Explorer<'_, M> {
    fn advance(&self, node: &mut Node<M::Out>) -> Advance {
        let input = FixedInput(self.input);
        loop {
            if node.core.steps >= self.step_bound {
                return Advance::Dead;
            }
            match node.core.tick(&mut node.prog, &input) {
                Tick::Running => {
                    if !self.viable(node) {
                        return Advance::Dead;
                    }
                }
                Tick::Halted => {
                    return if node.prog.all_visited() && self.mode.accept(&node.core.output) {
                        Advance::Leaf
                    } else {
                        Advance::Dead
                    };
                }
                Tick::OutOfRange | Tick::Rejected => return Advance::Dead,
                Tick::NeedProgram(pos) => {
                    return if self.viable(node) { Advance::Fork(pos) } else { Advance::Dead };
                }
                Tick::NeedInput => unreachable!("fixed input never demands bits"),
            }
        }
    }

    fn viable(&self, node: &Node<M::Out>) -> bool {
        let remaining = self.mode.remaining(&node.core.output);
        // Each owed bit and the final HALT take a step.
        node.core.steps + (remaining.unwrap_or(0) as u64) < self.step_bound
            && node.prog.halt_possible()
            && has_room(&node.core, &node.prog, remaining, node.core.cursor < self.input.len())
    }

    fn row(&self, node: &Node<M::Out>) -> EnumRow {
        EnumRow {
            program: node.prog.to_bits(),
            output: self.mode.output(&node.core.output),
            steps: node.core.steps,
        }
    }

    fn children(node: Node<M::Out>, pos: usize) -> [Node<M::Out>; 2] {
        let mut zero = node.clone();
        zero.prog.set(pos, false);
        let mut one = node;
        one.prog.set(pos, true);
        [zero, one]
    }

    fn dfs(
        &self,
        root: Node<M::Out>,
        rows: &mut Vec<EnumRow>,
        count: &AtomicUsize,
        cap: usize,
    ) -> Result<(), CapExceeded> {
        let mut stack = vec![root];
        while let Some(mut node) = stack.pop() {
            match self.advance(&mut node) {
                Advance::Dead => {}
                Advance::Leaf => {
                    if count.fetch_add(1, Ordering::Relaxed) >= cap {
                        return Err(CapExceeded);
                    }
                    rows.push(self.row(&node));
                }
                Advance::Fork(pos) => {
                    let [zero, one] = Self::children(node, pos);
                    stack.push(one);
                    stack.push(zero);
                }
            }
        }
        Ok(())
    }

    /// All accepted programs of length at most `max_len`, in length-lex order.
    fn run(&self, cap: usize) -> Result<Vec<EnumRow>, CapExceeded> {
        const FRONTIER: usize = 512;
        let count = AtomicUsize::new(0);
        let mut rows = Vec::new();

        // Breadth-first until there is enough independent work to fan out.
        let root = Node { core: Core::with_output(self.mode.root()), prog: LazyProgram::new(self.max_len) };
        let mut frontier = vec![root];
        while !frontier.is_empty() && frontier.len() < FRONTIER {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for mut node in frontier {
                match self.advance(&mut node) {
                    Advance::Dead => {}
                    Advance::Leaf => {
                        if count.fetch_add(1, Ordering::Relaxed) >= cap {
                            return Err(CapExceeded);
                        }
                        rows.push(self.row(&node));
                    }
                    Advance::Fork(pos) => next.extend(Self::children(node, pos)),
                }
            }
            frontier = next;
        }

        let parts: Vec<Vec<EnumRow>> = frontier
            .into_par_iter()
            .map(|node| {
                let mut part = Vec::new();
                self.dfs(node, &mut part, &count, cap).map(|_| part)
            })
            .collect::<Result<_, _>>()?;
        rows.extend(parts.into_iter().flatten());
        rows.sort_by(|a, b| a.program.cmp(&b.program));
        Ok(rows)
    }
}

/// Every valid program of length at most `max_len` on `input`.
pub(crate) fn all_valid(
    max_len: usize,
    step_bound: u64,
    input: &[bool],
    cap: usize,
) -> Result<Vec<EnumRow>, CapExceeded> {
    Explorer { max_len, step_bound, input, mode: Collect }.run(cap)
}

/// Every valid program of length at most `max_len` that prints exactly
/// `target` on `input`.
pub(crate) fn all_printers(
    target: &BitString,
    input: &[bool],
    max_len: usize,
    step_bound: u64,
) -> Vec<EnumRow> {
    Explorer { max_len, step_bound, input, mode: Target(target) }.run(usize::MAX).expect("uncapped search")
}

/// Shortest program of length at most `max_len` that prints `target` on
/// `input` within `step_bound` steps; ties go to the length-lex first.
///
/// The length bound grows in strides so the search stops soon after the
/// first length that has a solution.
pub fn shortest_printer(
    target: &BitString,
    input: &[bool],
    max_len: usize,
    step_bound: u64,
) -> Option<EnumRow> {
    const STRIDE: usize = 6;
    let mut len = 0;
    while len < max_len {
        len = (len + STRIDE).min(max_len);
        if let Some(first) = all_printers(target, input, len, step_bound).into_iter().next() {
            return Some(first);
        }
    }
    None
}
