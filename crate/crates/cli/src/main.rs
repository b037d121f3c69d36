use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use oeelab::bits::BitString;
use oeelab::complexity::{self, ComplexityEstimate, Measure, TotalityBounds, C_COPY};
use oeelab::dynsys::{self, ConditionalK, EnvSpec, Epsilon, SystemSpec};
use oeelab::enumerate::{bb_hat, omega_hat, Bounds, EnumError, EnumTable, TableCache};
use oeelab::metabio::{self, Fitness, FitnessOracle, MetabioError, MetabioState, MutationCaps};
use oeelab::oee;
use oeelab::vm::MACHINE_ID;

#[derive(Parser)]
#[command(name = "oeelab", version, about = "Resource-bounded algorithmic information on the SBM-1 machine")]
struct Cli {
    /// Program length bound L, in bits.
    #[arg(long, global = true, default_value_t = 12)]
    max_len: usize,
    /// Step bound tau.
    #[arg(long, global = true, default_value_t = 64)]
    steps: u64,
    /// Table cache directory (default: $OEELAB_CACHE_DIR or ./.oeelab).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Totality {
    /// Inputs up to this length must be accepted for a program to count as total.
    #[arg(long, default_value_t = 4)]
    total_len: usize,
    /// Step bound for totality checks (default: --steps).
    #[arg(long)]
    total_steps: Option<u64>,
}

#[derive(Args)]
struct System {
    /// counter, repeater, sbm_rule or halting_probe.
    #[arg(long)]
    system: Option<String>,
    /// Rule parameters and initial_state, as a JSON object.
    #[arg(long, default_value = "{}")]
    params: String,
    /// Environment: a bit string, or an environment JSON object.
    #[arg(long)]
    env: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    #[value(name = "K")]
    K,
    Soph,
    Csoph,
    DepthBb,
    DepthC,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Det,
    Rand,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Time,
    Omega,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or load) the table of valid programs.
    Enumerate {
        /// Also list every row.
        #[arg(long)]
        rows: bool,
    },
    /// Shortest description, optionally given an input.
    K {
        #[arg(long)]
        target: BitString,
        #[arg(long)]
        input: Option<BitString>,
    },
    /// Sophistication at significance --sig.
    Soph {
        #[arg(long)]
        target: BitString,
        #[arg(long, default_value_t = C_COPY)]
        sig: usize,
        #[command(flatten)]
        totality: Totality,
    },
    /// Coarse sophistication.
    Csoph {
        #[arg(long)]
        target: BitString,
        #[command(flatten)]
        totality: Totality,
    },
    /// Busy-beaver depth, or time-bounded depth when --sig is given.
    Depth {
        #[arg(long)]
        target: BitString,
        #[arg(long)]
        sig: Option<usize>,
    },
    /// Longest running time among programs of length at most --n.
    Bb {
        #[arg(long)]
        n: usize,
    },
    /// Partial halting probability.
    Omega,
    /// States of a system up to --horizon.
    DynsysRun {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        horizon: u64,
    },
    /// Adaptation at every time up to --horizon.
    Adapt {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        epsilon: Epsilon,
        #[arg(long)]
        horizon: u64,
    },
    /// First time after which the system stays adapted.
    Converge {
        #[command(flatten)]
        system: System,
        #[arg(long)]
        epsilon: Epsilon,
        #[arg(long)]
        horizon: u64,
    },
    /// Open-endedness diagnostics for a series file or a system trajectory.
    Oee {
        /// CSV with header index,value.
        #[arg(long)]
        series: Option<PathBuf>,
        #[command(flatten)]
        system: System,
        #[arg(long, value_enum, default_value = "K")]
        measure: MeasureArg,
        #[arg(long, default_value_t = 0)]
        sig: usize,
        #[arg(long, default_value_t = 16)]
        horizon: u64,
    },
    /// Evolve programs: neighbourhood hill climbing or a random walk.
    Metabio {
        #[arg(long, value_enum, default_value = "rand")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "time")]
        oracle: OracleArg,
        /// Initial organism.
        #[arg(long, default_value = "")]
        target: BitString,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the trace here, with its header in <file>.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Attempts to reach fitness milestones: random walk against exhaustive scan.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        milestones: Vec<u64>,
        #[arg(long, default_value_t = 20000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random-walk repetitions.
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
}

fn compute(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

struct Ctx {
    bounds: Bounds,
    cache: TableCache,
    json: bool,
}

impl Ctx {
    fn table(&self) -> Result<EnumTable, Failure> {
        self.cache.get_or_build(&self.bounds).map_err(|e| match e {
            EnumError::InvalidBounds(m) => Failure::Usage(format!("--max-len/--steps: {m}")),
            e => compute(e),
        })
    }

    fn frame(&self) -> Vec<String> {
        vec![MACHINE_ID.to_string(), self.bounds.max_len.to_string(), self.bounds.step_bound.to_string()]
    }

    fn frame_json(&self, mut body: Value) -> Value {
        let obj = body.as_object_mut().expect("report objects");
        obj.insert("machine_id".into(), json!(MACHINE_ID));
        obj.insert("L".into(), json!(self.bounds.max_len));
        obj.insert("tau".into(), json!(self.bounds.step_bound));
        body
    }

    /// A CSV report whose rows all start with machine_id, L, tau.
    fn csv(&self, header: &[&str], rows: Vec<Vec<String>>) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut h = vec!["machine_id", "L", "tau"];
        h.extend_from_slice(header);
        w.write_record(&h).expect("in-memory write");
        for r in rows {
            let mut full = self.frame();
            full.extend(r);
            w.write_record(&full).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields")
    }

    fn totality(&self, t: &Totality) -> TotalityBounds {
        TotalityBounds::new(t.total_len, t.total_steps.unwrap_or(self.bounds.step_bound))
    }
}

fn opt<T: ToString>(v: Option<T>, none: &str) -> String {
    v.map_or(none.to_string(), |v| v.to_string())
}

fn estimate_report(ctx: &Ctx, x: &BitString, e: &ComplexityEstimate) -> String {
    if ctx.json {
        let w = e.witness.as_ref();
        let body = json!({
            "kind": e.kind.to_string(),
            "x": x.to_string(),
            "value": e.value,
            "witness": w.map(|w| w.program.to_string()),
            "input": w.and_then(|w| w.input.as_ref()).map(|y| y.to_string()),
            "steps": w.map(|w| w.steps),
            "j": w.and_then(|w| w.j),
            "totality": e.totality.map(|t| json!({"input_len_max": t.input_len_max, "tau": t.step_bound})),
        });
        return ctx.frame_json(body).to_string() + "\n";
    }
    let mut buf = Vec::new();
    complexity::write_estimates_csv(&mut buf, &[(x.clone(), e.clone())]).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8 fields")
}

fn system_spec(s: &System) -> Result<SystemSpec, Failure> {
    let name = s.system.as_deref().ok_or_else(|| Failure::Usage("--system is required".into()))?;
    let mut params: Value =
        serde_json::from_str(&s.params).map_err(|e| Failure::Usage(format!("--params: {e}")))?;
    let obj =
        params.as_object_mut().ok_or_else(|| Failure::Usage("--params must be a JSON object".into()))?;
    obj.insert("rule".into(), json!(name));
    if let Some(env) = &s.env {
        let env = match env.parse::<BitString>() {
            Ok(bits) => EnvSpec::Static(bits),
            Err(_) => serde_json::from_str(env).map_err(|e| Failure::Usage(format!("--env: {e}")))?,
        };
        obj.insert("env".into(), serde_json::to_value(env).expect("plain data"));
    }
    let spec: SystemSpec =
        serde_json::from_value(params).map_err(|e| Failure::Usage(format!("--system/--params: {e}")))?;
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(spec)
}

fn dyn_failure(e: dynsys::DynError) -> Failure {
    match e {
        dynsys::DynError::InvalidSpec(m) => Failure::Usage(m),
        e => compute(e),
    }
}

fn measure(m: MeasureArg, sig: usize) -> Measure {
    match m {
        MeasureArg::K => Measure::K,
        MeasureArg::Soph => Measure::Soph { c: sig },
        MeasureArg::Csoph => Measure::Csoph,
        MeasureArg::DepthBb => Measure::DepthBb,
        MeasureArg::DepthC => Measure::DepthC { c: sig },
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let ctx = Ctx {
        bounds: Bounds::new(cli.max_len, cli.steps),
        cache: cli.cache_dir.map(TableCache::new).unwrap_or_else(TableCache::from_env),
        json: cli.json,
    };
    match cli.command {
        Command::Enumerate { rows } => {
            let table = ctx.table()?;
            let path = ctx.cache.path_for(&table.bounds).display().to_string();
            if ctx.json {
                let mut body = json!({
                    "input": table.bounds.input_profile.to_string(),
                    "rows": table.len(),
                    "omega_hat": omega_hat(&table).to_string(),
                    "cache": path,
                });
                if rows {
                    body["programs"] = table
                        .rows()
                        .iter()
                        .map(|r| json!({"program": r.program, "output": r.output, "steps": r.steps}))
                        .collect();
                }
                return Ok(ctx.frame_json(body).to_string() + "\n");
            }
            if rows {
                let body = table
                    .rows()
                    .iter()
                    .map(|r| vec![r.program.to_string(), r.output.to_string(), r.steps.to_string()])
                    .collect();
                return Ok(ctx.csv(&["program", "output", "steps"], body));
            }
            let row = vec![
                table.bounds.input_profile.to_string(),
                table.len().to_string(),
                omega_hat(&table).to_string(),
                path,
            ];
            Ok(ctx.csv(&["input", "rows", "omega_hat", "cache"], vec![row]))
        }
        Command::K { target, input } => {
            let table = ctx.table()?;
            let e = complexity::k_hat(&target, &table, input.as_ref());
            Ok(estimate_report(&ctx, &target, &e))
        }
        Command::Soph { target, sig, totality } => {
            let table = ctx.table()?;
            let e = complexity::soph_hat(&target, sig, &table, ctx.totality(&totality)).map_err(compute)?;
            Ok(estimate_report(&ctx, &target, &e))
        }
        Command::Csoph { target, totality } => {
            let table = ctx.table()?;
            let e = complexity::csoph_hat(&target, &table, ctx.totality(&totality)).map_err(compute)?;
            Ok(estimate_report(&ctx, &target, &e))
        }
        Command::Depth { target, sig } => {
            let table = ctx.table()?;
            let e = match sig {
                Some(c) => complexity::depth_c_hat(&target, c, &table),
                None => complexity::depth_bb_hat(&target, &table),
            }
            .map_err(compute)?;
            Ok(estimate_report(&ctx, &target, &e))
        }
        Command::Bb { n } => {
            let table = ctx.table()?;
            let bb = bb_hat(&table, n);
            if ctx.json {
                return Ok(ctx.frame_json(json!({"n": n, "bb_hat": bb})).to_string() + "\n");
            }
            Ok(ctx.csv(&["n", "bb_hat"], vec![vec![n.to_string(), opt(bb, "none")]]))
        }
        Command::Omega => {
            let table = ctx.table()?;
            let omega = omega_hat(&table);
            if ctx.json {
                let body = json!({"omega_hat": omega.to_string(), "approx": omega.to_f64()});
                return Ok(ctx.frame_json(body).to_string() + "\n");
            }
            Ok(ctx.csv(&["omega_hat"], vec![vec![omega.to_string()]]))
        }
        Command::DynsysRun { system, horizon } => {
            let spec = system_spec(&system)?;
            let traj = dynsys::trajectory(&spec, horizon).map_err(dyn_failure)?;
            if ctx.json {
                let body = json!({"system": spec, "trajectory": traj});
                return Ok(ctx.frame_json(body).to_string() + "\n");
            }
            let rows = traj
                .states
                .iter()
                .zip(&traj.cumulative_steps)
                .enumerate()
                .map(|(t, (s, c))| vec![t.to_string(), s.to_string(), c.to_string()])
                .collect();
            Ok(ctx.csv(&["t", "state", "cumulative_steps"], rows))
        }
        Command::Adapt { system, epsilon, horizon } => {
            let spec = system_spec(&system)?;
            let table = ctx.table()?;
            let k = ConditionalK::from_table(&table);
            let report = dynsys::weak_convergence_times(&spec, epsilon, horizon, &k).map_err(dyn_failure)?;
            if ctx.json {
                return Ok(ctx.frame_json(json!({"report": report})).to_string() + "\n");
            }
            let rows = report
                .rows
                .iter()
                .map(|r| {
                    let a = &r.adaptation;
                    vec![
                        epsilon.to_string(),
                        r.t.to_string(),
                        r.state.to_string(),
                        r.env.to_string(),
                        a.adapted.to_string(),
                        opt(a.k_cond, "inf"),
                        opt(a.witness.as_ref(), ""),
                    ]
                })
                .collect();
            Ok(ctx.csv(&["epsilon", "t", "state", "env", "adapted", "k_cond", "witness"], rows))
        }
        Command::Converge { system, epsilon, horizon } => {
            let spec = system_spec(&system)?;
            let table = ctx.table()?;
            let k = ConditionalK::from_table(&table);
            let delta = dynsys::first_convergence(&spec, epsilon, horizon, &k).map_err(dyn_failure)?;
            if ctx.json {
                let body =
                    json!({"epsilon": epsilon.to_string(), "horizon": horizon, "first_convergence": delta});
                return Ok(ctx.frame_json(body).to_string() + "\n");
            }
            let row = vec![epsilon.to_string(), horizon.to_string(), opt(delta, "none")];
            Ok(ctx.csv(&["epsilon", "horizon", "first_convergence"], vec![row]))
        }
        Command::Oee { series, system, measure: m, sig, horizon } => {
            let series = match series {
                Some(path) => {
                    let f = fs::File::open(&path)
                        .map_err(|e| Failure::Usage(format!("--series {}: {e}", path.display())))?;
                    oee::read_series_csv(f, &path.display().to_string()).map_err(compute)?
                }
                None => {
                    let spec = system_spec(&system)?;
                    let traj = dynsys::trajectory(&spec, horizon).map_err(dyn_failure)?;
                    let table = ctx.table()?;
                    let tot = TotalityBounds::for_table(&table);
                    oee::complexity_series(&traj, measure(m, sig), &table, tot, spec.rule.name())
                        .map_err(compute)?
                }
            };
            let report = oee::strong_oee_report(&series.values).map_err(compute)?;
            if ctx.json {
                return Ok(ctx.frame_json(json!({"series": series, "report": report})).to_string() + "\n");
            }
            let prefix = report.oee_witness_prefix.map_or("-1".to_string(), |i| i.to_string());
            let rows = (0..series.values.len())
                .map(|i| {
                    vec![
                        series.times[i].to_string(),
                        series.values[i].to_string(),
                        report.gamma_star[i].to_string(),
                        report.adjusted[i].to_string(),
                        prefix.clone(),
                        report.new_maxima_count.to_string(),
                    ]
                })
                .collect();
            Ok(ctx.csv(
                &["index", "value", "gamma_star", "adjusted", "oee_witness_prefix", "new_maxima_count"],
                rows,
            ))
        }
        Command::Metabio { mode, oracle, target, budget, seed, out } => {
            let oracle = match oracle {
                OracleArg::Time => FitnessOracle::time(ctx.bounds.step_bound),
                OracleArg::Omega => FitnessOracle::omega(ctx.bounds.step_bound, &ctx.table()?),
            };
            let start = MetabioState::new(target, &oracle);
            match mode {
                Mode::Det => {
                    let pool = metabio::det_candidates(&oracle, ctx.bounds.max_len).map_err(compute)?;
                    let mut states = vec![start];
                    for _ in 0..budget {
                        let next = match metabio::det_step(states.last().unwrap(), &oracle, &pool) {
                            Ok(s) => s,
                            Err(MetabioError::SearchExhausted { next, .. }) => *next,
                            Err(e) => return Err(compute(e)),
                        };
                        states.push(next);
                    }
                    if ctx.json {
                        return Ok(ctx
                            .frame_json(json!({"oracle": oracle.to_string(), "states": states}))
                            .to_string()
                            + "\n");
                    }
                    let rows = states
                        .iter()
                        .map(|s| {
                            vec![
                                s.t.to_string(),
                                s.organism.to_string(),
                                opt(s.fitness.as_ref(), "unfit"),
                                s.w.to_string(),
                                s.mutation_count.to_string(),
                            ]
                        })
                        .collect();
                    Ok(ctx.csv(&["t", "organism", "fitness", "w", "mutation_count"], rows))
                }
                Mode::Rand => {
                    let caps =
                        MutationCaps { max_len: ctx.bounds.max_len, step_bound: ctx.bounds.step_bound };
                    let trace = metabio::stochastic_run(&start, &oracle, budget, seed, caps)
                        .map_err(|e| Failure::Usage(e.to_string()))?;
                    if let Some(path) = out {
                        let f = fs::File::create(&path).map_err(compute)?;
                        trace.write_csv(f).map_err(compute)?;
                        let mut side = path.into_os_string();
                        side.push(".json");
                        fs::write(side, trace.header_json() + "\n").map_err(compute)?;
                    }
                    if ctx.json {
                        return Ok(ctx.frame_json(json!({"trace": trace})).to_string() + "\n");
                    }
                    let rows = trace
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.t.to_string(),
                                r.organism.to_string(),
                                opt(r.fitness.as_ref(), "unfit"),
                                r.w.to_string(),
                                r.accepted.to_string(),
                                opt(r.mutation.as_ref(), ""),
                                r.attempts_so_far.to_string(),
                            ]
                        })
                        .collect();
                    Ok(ctx.csv(
                        &["t", "organism", "fitness", "w", "accepted", "mutation", "attempts_so_far"],
                        rows,
                    ))
                }
            }
        }
        Command::Bench { milestones, budget, seed, n } => {
            let oracle = FitnessOracle::time(ctx.bounds.step_bound);
            let caps = MutationCaps { max_len: ctx.bounds.max_len, step_bound: ctx.bounds.step_bound };
            let goals: Vec<Fitness> = milestones.iter().map(|&m| Fitness::Steps(m)).collect();
            let rows = metabio::benchmark(&oracle, &goals, budget, seed, n, caps)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            if ctx.json {
                return Ok(
                    ctx.frame_json(json!({"seed": seed, "budget": budget, "rows": rows})).to_string() + "\n"
                );
            }
            let body = rows
                .iter()
                .map(|r| {
                    vec![
                        r.strategy.to_string(),
                        r.milestone.to_string(),
                        opt(r.attempts, "unreached"),
                        r.reached.to_string(),
                        r.runs.to_string(),
                    ]
                })
                .collect();
            Ok(ctx.csv(&["strategy", "milestone", "attempts", "reached", "runs"], body))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
