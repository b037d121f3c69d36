//! Evolving programs: a deterministic hill climber over edit-distance
//! neighbourhoods, and a random walk whose mutations are programs drawn
//! from the machine's own universal distribution.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::enumerate::{enumerate_valid, omega_hat, Bounds, EnumError, EnumRow, EnumTable};
use crate::vm::machine::{Core, FixedInput, LazyProgram, Tick, LAZY_MAX_LEN};
use crate::vm::{self, MACHINE_ID};

#[derive(Debug, Error)]
pub enum MetabioError {
    #[error("no valid candidate within distance {w} under the length cap")]
    SearchExhausted { w: usize, next: Box<MetabioState> },
    #[error("sampling cap {0} exceeds the supported {LAZY_MAX_LEN}")]
    BadCap(usize),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
}

/// Oracle value. Only values from the same oracle are ever compared.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fitness {
    Steps(u64),
    Fraction(Dyadic),
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fitness::Steps(n) => write!(f, "{n}"),
            Fitness::Fraction(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for Fitness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitnessOracle {
    /// Running time of a valid program.
    Time { step_bound: u64 },
    /// Output read as a binary fraction, when it does not exceed Ω̂ of the
    /// reference table.
    Omega { step_bound: u64, reference: Dyadic },
}

impl FitnessOracle {
    pub fn time(step_bound: u64) -> Self {
        FitnessOracle::Time { step_bound }
    }

    pub fn omega(step_bound: u64, reference: &EnumTable) -> Self {
        FitnessOracle::Omega { step_bound, reference: omega_hat(reference) }
    }

    pub fn step_bound(&self) -> u64 {
        match self {
            FitnessOracle::Time { step_bound } | FitnessOracle::Omega { step_bound, .. } => *step_bound,
        }
    }

    fn score(&self, output: &BitString, steps: u64) -> Option<Fitness> {
        match self {
            FitnessOracle::Time { .. } => Some(Fitness::Steps(steps)),
            FitnessOracle::Omega { reference, .. } => {
                let v = Dyadic::from_binary_fraction(output);
                (v <= *reference).then_some(Fitness::Fraction(v))
            }
        }
    }

    /// `None` marks an unfit organism: invalid, too slow, or (for Ω) an
    /// output that is not a certified lower bound.
    pub fn fitness(&self, program: &BitString) -> Option<Fitness> {
        let out = vm::run(program, None, self.step_bound());
        if out.valid {
            self.score(&out.output, out.steps)
        } else {
            None
        }
    }

    fn fitness_of_row(&self, row: &EnumRow) -> Option<Fitness> {
        self.score(&row.output, row.steps)
    }
}

impl fmt::Display for FitnessOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitnessOracle::Time { step_bound } => write!(f, "time_fitness(tau={step_bound})"),
            FitnessOracle::Omega { step_bound, reference } => {
                write!(f, "omega_fitness(tau={step_bound}, omega_hat={reference})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetabioState {
    pub organism: BitString,
    pub fitness: Option<Fitness>,
    pub w: usize,
    pub t: u64,
    pub mutation_count: u64,
}

impl MetabioState {
    pub fn new(organism: BitString, oracle: &FitnessOracle) -> Self {
        let fitness = oracle.fitness(&organism);
        MetabioState { organism, fitness, w: 1, t: 0, mutation_count: 0 }
    }
}

/// Bit-level edit distance.
pub fn levenshtein(a: &BitString, b: &BitString) -> usize {
    strsim::generic_levenshtein(&a.bits().to_vec(), &b.bits().to_vec())
}

/// The candidate pool for [`det_step`]: every valid program up to the
/// length cap, under the oracle's step bound.
pub fn det_candidates(oracle: &FitnessOracle, search_len_cap: usize) -> Result<EnumTable, MetabioError> {
    Ok(enumerate_valid(&Bounds::new(search_len_cap, oracle.step_bound()))?)
}

/// One step of the deterministic system: move to the fittest program within
/// edit distance `w`, or widen the neighbourhood.
pub fn det_step(
    state: &MetabioState,
    oracle: &FitnessOracle,
    candidates: &EnumTable,
) -> Result<MetabioState, MetabioError> {
    let mut best: Option<(&EnumRow, Fitness)> = None;
    let mut evaluated = 0;
    for row in candidates.rows() {
        if levenshtein(&state.organism, &row.program) > state.w {
            continue;
        }
        evaluated += 1;
        if let Some(f) = oracle.fitness_of_row(row) {
            if best.as_ref().is_none_or(|(_, b)| f > *b) {
                best = Some((row, f));
            }
        }
    }
    let mut next = state.clone();
    next.t += 1;
    next.mutation_count += evaluated;
    match best {
        Some((row, f)) if Some(&f) > state.fitness.as_ref() => {
            next.organism = row.program.clone();
            next.fitness = Some(f);
            next.w = 1;
        }
        Some(_) => next.w += 1,
        None => {
            next.w += 1;
            return Err(MetabioError::SearchExhausted { w: state.w, next: Box::new(next) });
        }
    }
    Ok(next)
}

/// Limits on drawing and applying a mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MutationCaps {
    /// Longest mutation program drawn.
    pub max_len: usize,
    /// Steps allowed to the mutation program, on the organism as input.
    pub step_bound: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleAbort {
    /// Decoding ran past the length cap or jumped outside the program.
    OutOfRange,
    Timeout,
    /// Halted without reading every program bit.
    Unread,
}

/// Draws a program by feeding fair coin flips as program bits on demand,
/// running it on `input`. A valid program `p` comes out with probability
/// `2^-|p|`; every other outcome is an abort.
pub fn sample_mutation<R: Rng>(
    rng: &mut R,
    input: &BitString,
    caps: MutationCaps,
) -> Result<BitString, SampleAbort> {
    let mut prog = LazyProgram::new(caps.max_len);
    let tape = FixedInput(input.bits());
    let mut core = Core::with_output(BitString::new());
    loop {
        if core.steps >= caps.step_bound {
            return Err(SampleAbort::Timeout);
        }
        match core.tick(&mut prog, &tape) {
            Tick::Running => {}
            Tick::NeedProgram(pos) => prog.set(pos, rng.gen()),
            Tick::Halted if prog.all_visited() => return Ok(prog.to_bits()),
            Tick::Halted => return Err(SampleAbort::Unread),
            Tick::OutOfRange => return Err(SampleAbort::OutOfRange),
            Tick::NeedInput | Tick::Rejected => unreachable!("fixed input, unrestricted output"),
        }
    }
}

/// Retries [`sample_mutation`] until it succeeds; also returns the number
/// of aborted draws.
pub fn sample_valid<R: Rng>(rng: &mut R, input: &BitString, caps: MutationCaps) -> (BitString, u64) {
    let mut aborts = 0;
    loop {
        match sample_mutation(rng, input, caps) {
            Ok(p) => return (p, aborts),
            Err(_) => aborts += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub t: u64,
    pub organism: BitString,
    pub fitness: Option<Fitness>,
    pub w: usize,
    pub accepted: bool,
    pub mutation: Option<BitString>,
    pub attempts_so_far: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceHeader {
    pub machine_id: String,
    pub seed: u64,
    pub budget: u64,
    pub oracle: String,
    pub caps: MutationCaps,
    pub aborted_draws: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub header: TraceHeader,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("a trace starts with its initial state")
    }

    /// Attempts spent before the organism first reached `milestone`.
    pub fn attempts_to(&self, milestone: &Fitness) -> Option<u64> {
        self.rows
            .iter()
            .find(|r| r.fitness.as_ref().is_some_and(|f| f >= milestone))
            .map(|r| r.attempts_so_far)
    }

    /// `t,organism,fitness,w,accepted,mutation,attempts_so_far`.
    pub fn write_csv<W: Write>(&self, dest: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(dest);
        w.write_record(["t", "organism", "fitness", "w", "accepted", "mutation", "attempts_so_far"])?;
        for r in &self.rows {
            w.write_record([
                r.t.to_string(),
                r.organism.to_string(),
                r.fitness.as_ref().map_or("unfit".into(), |f| f.to_string()),
                r.w.to_string(),
                r.accepted.to_string(),
                r.mutation.as_ref().map_or(String::new(), |m| m.to_string()),
                r.attempts_so_far.to_string(),
            ])?;
        }
        w.flush()
    }

    pub fn header_json(&self) -> String {
        serde_json::to_string_pretty(&self.header).expect("plain data")
    }
}

/// The random walk: each attempt draws a mutation, runs it on the current
/// organism and keeps the result when it is strictly fitter. Stops after
/// `budget` attempts.
pub fn stochastic_run(
    initial: &MetabioState,
    oracle: &FitnessOracle,
    budget: u64,
    seed: u64,
    caps: MutationCaps,
) -> Result<Trace, MetabioError> {
    if caps.max_len > LAZY_MAX_LEN {
        return Err(MetabioError::BadCap(caps.max_len));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = initial.clone();
    let mut rows = vec![TraceRow {
        t: state.t,
        organism: state.organism.clone(),
        fitness: state.fitness.clone(),
        w: state.w,
        accepted: false,
        mutation: None,
        attempts_so_far: state.mutation_count,
    }];
    let mut aborted_draws = 0;
    for _ in 0..budget {
        let (m, aborts) = sample_valid(&mut rng, &state.organism, caps);
        aborted_draws += aborts;
        let candidate = vm::run(&m, Some(&state.organism), caps.step_bound).output;
        let fitness = oracle.fitness(&candidate);
        let accepted = fitness.is_some() && fitness > state.fitness;
        state.t += 1;
        state.mutation_count += 1;
        if accepted {
            state.organism = candidate;
            state.fitness = fitness;
        }
        rows.push(TraceRow {
            t: state.t,
            organism: state.organism.clone(),
            fitness: state.fitness.clone(),
            w: state.w,
            accepted,
            mutation: Some(m),
            attempts_so_far: state.mutation_count,
        });
    }
    let header = TraceHeader {
        machine_id: MACHINE_ID.to_string(),
        seed,
        budget,
        oracle: oracle.to_string(),
        caps,
        aborted_draws,
    };
    Ok(Trace { header, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Stochastic,
    Exhaustive,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Stochastic => "stochastic",
            Strategy::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub strategy: Strategy,
    pub milestone: Fitness,
    /// Median attempts (stochastic) or candidates evaluated (exhaustive);
    /// `None` when the milestone was not reached.
    pub attempts: Option<u64>,
    /// Runs that reached the milestone, out of `runs`.
    pub reached: usize,
    pub runs: usize,
}

/// Candidates a length-lex scan of every string up to `max_len` evaluates
/// before meeting one of fitness at least `milestone`.
pub fn exhaustive_attempts(oracle: &FitnessOracle, milestone: &Fitness, max_len: usize) -> Option<u64> {
    let mut count = 0;
    for len in 0..=max_len {
        for v in 0..1u64 << len {
            count += 1;
            let p = BitString::from_u64(v, len);
            if oracle.fitness(&p).is_some_and(|f| f >= *milestone) {
                return Some(count);
            }
        }
    }
    None
}

/// Attempts-to-milestone for the random walk (median over `runs` seeds
/// starting at `seed`, unreached runs counting as infinite) against the
/// exhaustive scan over strings up to `caps.max_len`.
pub fn benchmark(
    oracle: &FitnessOracle,
    milestones: &[Fitness],
    budget: u64,
    seed: u64,
    runs: usize,
    caps: MutationCaps,
) -> Result<Vec<BenchRow>, MetabioError> {
    let start = MetabioState::new(BitString::new(), oracle);
    let traces = (0..runs as u64)
        .map(|i| stochastic_run(&start, oracle, budget, seed.wrapping_add(i), caps))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for m in milestones {
        let mut hits: Vec<Option<u64>> = traces.iter().map(|t| t.attempts_to(m)).collect();
        hits.sort_by_key(|h| h.unwrap_or(u64::MAX));
        let reached = hits.iter().filter(|h| h.is_some()).count();
        let median = if runs == 0 { None } else { hits[(runs - 1) / 2] };
        rows.push(BenchRow {
            strategy: Strategy::Stochastic,
            milestone: m.clone(),
            attempts: median,
            reached,
            runs,
        });
        let ex = exhaustive_attempts(oracle, m, caps.max_len);
        rows.push(BenchRow {
            strategy: Strategy::Exhaustive,
            milestone: m.clone(),
            attempts: ex,
            reached: ex.is_some() as usize,
            runs: 1,
        });
    }
    Ok(rows)
}
