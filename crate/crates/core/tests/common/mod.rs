//! Brute-force reference implementations shared by the integration and
//! acceptance tests. Nothing here calls into the optimized search code; the
//! interpreter is written from the instruction table alone.
#![allow(dead_code)]

use std::collections::HashMap;

use oeelab::bits::BitString;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Acc {
    Small(u128),
    /// Above 2^127. Runs are far too short to bring it back to zero.
    Huge {
        odd: bool,
    },
}

impl Acc {
    fn inc(self) -> Acc {
        match self {
            Acc::Small(v) if v < u128::MAX / 2 => Acc::Small(v + 1),
            Acc::Small(v) => Acc::Huge { odd: v % 2 == 0 },
            Acc::Huge { odd } => Acc::Huge { odd: !odd },
        }
    }

    fn dbl(self) -> Acc {
        match self {
            Acc::Small(v) if v < u128::MAX / 4 => Acc::Small(2 * v),
            Acc::Small(_) | Acc::Huge { .. } => Acc::Huge { odd: false },
        }
    }

    fn dec(self) -> Acc {
        match self {
            Acc::Small(v) => Acc::Small(v - 1),
            Acc::Huge { odd } => Acc::Huge { odd: !odd },
        }
    }

    fn odd(self) -> bool {
        match self {
            Acc::Small(v) => v % 2 == 1,
            Acc::Huge { odd } => odd,
        }
    }

    fn zero(self) -> bool {
        self == Acc::Small(0)
    }
}

enum Op {
    Zero,
    Inc,
    Dbl,
    OutB,
    Out0,
    Out1,
    Jnz(bool, usize),
    Read,
    Halt,
}

fn decode(p: &[bool], pc: usize) -> Option<(Op, usize)> {
    let b = |i: usize| p.get(pc + i).copied();
    let op = match (b(0)?, b(1)?, b(2)?) {
        (false, false, false) => (Op::Zero, 3),
        (false, false, true) => (Op::Inc, 3),
        (false, true, false) => (Op::Dbl, 3),
        (false, true, true) => (Op::OutB, 3),
        (true, false, false) => (Op::Out0, 3),
        (true, false, true) => (Op::Out1, 3),
        (true, true, true) => (if b(3)? { Op::Halt } else { Op::Read }, 4),
        (true, true, false) => {
            let forward = b(3)?;
            let mut z = 0;
            while !b(4 + z)? {
                z += 1;
            }
            let mut n = 0usize;
            for i in 0..=z {
                n = 2 * n + b(4 + z + i)? as usize;
            }
            (Op::Jnz(forward, n), 5 + 2 * z)
        }
    };
    Some(op)
}

/// Output and step count of `p` on `input` when it is valid within `tau`.
pub fn naive_run(p: &[bool], input: &[bool], tau: u64) -> Option<(BitString, u64)> {
    let mut seen = vec![false; p.len()];
    let (mut pc, mut acc, mut cursor, mut steps) = (0usize, Acc::Small(0), 0usize, 0u64);
    let mut out = Vec::new();
    loop {
        if steps == tau {
            return None;
        }
        let (op, len) = decode(p, pc)?;
        seen[pc..pc + len].iter_mut().for_each(|s| *s = true);
        steps += 1;
        pc += len;
        match op {
            Op::Zero => acc = Acc::Small(0),
            Op::Inc => acc = acc.inc(),
            Op::Dbl => acc = acc.dbl(),
            Op::OutB => out.push(acc.odd()),
            Op::Out0 => out.push(false),
            Op::Out1 => out.push(true),
            Op::Read => {
                acc = match input.get(cursor) {
                    Some(&bit) => {
                        cursor += 1;
                        Acc::Small(1 + bit as u128)
                    }
                    None => Acc::Small(0),
                }
            }
            Op::Halt => {
                return seen.iter().all(|&s| s).then(|| (BitString::from_bits(out), steps));
            }
            Op::Jnz(forward, n) => {
                if !acc.zero() {
                    acc = acc.dec();
                    if forward {
                        pc = pc.checked_add(n).filter(|&t| t <= p.len())?;
                    } else {
                        pc = pc.checked_sub(n)?;
                    }
                }
            }
        }
    }
}

/// Every nonempty string of length at most `max_len`, length-lex.
pub fn all_strings(max_len: usize) -> impl Iterator<Item = BitString> {
    (1..=max_len).flat_map(|n| (0..1u64 << n).map(move |v| BitString::from_u64(v, n)))
}

/// Every string of length exactly `n`.
pub fn strings_of_len(n: usize) -> impl Iterator<Item = BitString> {
    (0..1u64 << n).map(move |v| BitString::from_u64(v, n))
}

/// Every string of length at most `max_len`, the empty one first.
pub fn strings_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
    std::iter::once(BitString::new()).chain(all_strings(max_len))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub program: BitString,
    pub output: BitString,
    pub steps: u64,
}

/// Full scan of every string up to `max_len`.
pub fn naive_table(max_len: usize, tau: u64, input: &BitString) -> Vec<Row> {
    all_strings(max_len)
        .filter_map(|p| {
            naive_run(p.bits(), input.bits(), tau).map(|(output, steps)| Row { program: p, output, steps })
        })
        .collect()
}

/// Shortest printer of each output in `rows` (rows are length-lex).
pub fn naive_k_map(rows: &[Row]) -> HashMap<BitString, &Row> {
    let mut map = HashMap::new();
    for r in rows {
        map.entry(r.output.clone()).or_insert(r);
    }
    map
}

pub fn naive_k(rows: &[Row], x: &BitString) -> Option<usize> {
    rows.iter().find(|r| &r.output == x).map(|r| r.program.len())
}

/// Shortest printer of `x` on `input`, scanning lengths upward.
pub fn naive_shortest(x: &BitString, input: &BitString, max_len: usize, tau: u64) -> Option<Row> {
    all_strings(max_len).find_map(|p| match naive_run(p.bits(), input.bits(), tau) {
        Some((out, steps)) if &out == x => Some(Row { program: p, output: out, steps }),
        _ => None,
    })
}

pub fn naive_bb(rows: &[Row], n: usize) -> Option<u64> {
    rows.iter().filter(|r| r.program.len() <= n).map(|r| r.steps).max()
}

/// Numerator of the Kraft sum over the denominator `2^max_len`.
pub fn naive_omega_numerator(rows: &[Row], max_len: usize) -> u128 {
    rows.iter().map(|r| 1u128 << (max_len - r.program.len())).sum()
}

/// Largest `i` such that every entry up to `i` is exceeded later.
pub fn naive_oee_witness(c: &[i64]) -> Option<usize> {
    let exceeded = |k: usize| (k + 1..c.len()).any(|j| c[j] > c[k]);
    (0..c.len()).take_while(|&i| (0..=i).all(exceeded)).last()
}

/// Least `g(j) >= 0` with `c[i] <= c[j] + g(j)` for all `i <= j`, found by
/// counting up.
pub fn naive_gamma_star(c: &[i64]) -> Vec<i64> {
    (0..c.len()).map(|j| (0..).find(|&g| (0..=j).all(|i| c[i] <= c[j] + g)).unwrap()).collect()
}

pub fn naive_levenshtein(a: &[bool], b: &[bool]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, &x) in a.iter().enumerate() {
        let mut row = vec![i + 1];
        for (j, &y) in b.iter().enumerate() {
            row.push((prev[j] + (x != y) as usize).min(prev[j + 1] + 1).min(row[j] + 1));
        }
        prev = row;
    }
    prev[b.len()]
}
