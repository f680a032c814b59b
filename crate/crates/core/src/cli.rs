//! Command-line front end. `main.rs` only parses arguments and calls [`run`].

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::compat::{build_compat_matrix, BoxStructured};
use crate::deplete::{deplete_observed, DepleteOptions, DepletionObserver, IterationSchema, StepRecord};
use crate::error::{Error, Result};
use crate::formula::{cnf_to_system, parse_dimacs, repair_normality, CnfFormula};
use crate::grids::{count_grids, glue, Verdict};
use crate::harness::{bench_scaling, fuzz_compare, BenchConfig, FuzzConfig};
use crate::pipeline::{cook_reduce, find_implicant, lex_survival, solve_cnf, solve_lex, SolveOptions};

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_CLAIM_VIOLATED: i32 = 30;
pub const EXIT_ERROR: i32 = 1;

/// Environment variable overriding the truth-table guard.
pub const MAX_VARS_ENV: &str = "COMPAT_SAT_MAX_VARS";

#[derive(Parser, Debug)]
#[command(name = "compat-sat", version, about = "Compatibility-matrix depletion SAT solver and oracle harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    pub format: Format,

    /// Treat DIMACS header mismatches as errors.
    #[arg(long, global = true)]
    pub strict_dimacs: bool,

    /// Merge repeated literals and drop duplicate clauses instead of rejecting the input.
    #[arg(long, global = true)]
    pub repair: bool,

    /// Largest equation arity (and oracle variable count) that may be enumerated.
    #[arg(long, global = true, env = MAX_VARS_ENV, default_value_t = 24)]
    pub max_vars: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemaArg {
    Roundrobin,
    Worklist,
}

impl From<SchemaArg> for IterationSchema {
    fn from(s: SchemaArg) -> Self {
        match s {
            SchemaArg::Roundrobin => IterationSchema::RoundRobin,
            SchemaArg::Worklist => IterationSchema::Worklist,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct InputArg {
    /// DIMACS CNF file; stdin when omitted or `-`.
    pub input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide satisfiability and print a witness.
    Solve {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = SchemaArg::Worklist)]
        schema: SchemaArg,
        /// Stop as soon as a box is emptied.
        #[arg(long)]
        early_stop: bool,
        /// Split clauses wider than three literals before building the matrix.
        #[arg(long)]
        cook: bool,
        /// Where to write the evidence of a claim violation.
        #[arg(long, default_value = "claim-evidence.json")]
        evidence: PathBuf,
    },
    /// Run depletion to the fixpoint and report counters.
    Deplete {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = SchemaArg::Worklist)]
        schema: SchemaArg,
        #[arg(long)]
        early_stop: bool,
        /// Stream one JSON line per depletion step to this file (`-` for stdout).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Also dump the depleted matrix.
        #[arg(long, conflicts_with = "early_stop")]
        snapshot: bool,
    },
    /// Split clauses to width at most three and print DIMACS.
    Reduce {
        #[command(flatten)]
        input: InputArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Literal-level matrix: implicant search and the exactly-one encoding.
    Lex {
        #[command(flatten)]
        input: InputArg,
    },
    /// Count solution grids.
    Count {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Cross-check the solver against brute force on random formulas.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        min_vars: u32,
        #[arg(long, default_value_t = 12)]
        max_vars_per_instance: u32,
        #[arg(long, default_value_t = 30)]
        max_clauses: usize,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, value_enum, default_value_t = SchemaArg::Worklist)]
        schema: SchemaArg,
        /// Directory for minimized DIMACS reproducers.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Measure depletion work on random formulas of growing size.
    Bench {
        #[arg(long = "m", value_delimiter = ',', default_values_t = vec![10usize, 20, 40, 80])]
        clause_counts: Vec<usize>,
        #[arg(long, default_value_t = 4.0)]
        ratio: f64,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SchemaArg::Worklist)]
        schema: SchemaArg,
    },
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Execute a parsed command line. Returns the process exit status.
pub fn run(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut io = Io { stdin, out, err };
    match dispatch(cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn read_formula(cli: &Cli, input: &InputArg, io: &mut Io) -> Result<CnfFormula> {
    let text = match &input.input {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            io.stdin.read_to_string(&mut s)?;
            s
        }
    };
    let parsed = parse_dimacs(&text, cli.strict_dimacs)?;
    for w in &parsed.warnings {
        writeln!(io.err, "warning: {w}")?;
    }
    if cli.repair {
        repair_normality(&parsed.formula)
    } else {
        Ok(parsed.formula)
    }
}

fn emit_json(io: &mut Io, value: serde_json::Value) -> Result<()> {
    writeln!(io.out, "{}", serde_json::to_string(&value)?)?;
    Ok(())
}

fn dispatch(cli: &Cli, io: &mut Io) -> Result<i32> {
    let structured = cli.format == Format::Structured;
    match &cli.command {
        Command::Solve { input, schema, early_stop, cook, evidence } => {
            let f = read_formula(cli, input, io)?;
            solve(cli, io, &f, (*schema).into(), *early_stop, *cook, evidence)
        }
        Command::Deplete { input, schema, early_stop, trace, snapshot } => {
            let f = read_formula(cli, input, io)?;
            let system = cnf_to_system(&f)?;
            let mut matrix = build_compat_matrix(&system, cli.max_vars)?;
            let opts = DepleteOptions {
                schema: (*schema).into(),
                early_stop: *early_stop,
                trace: false,
            };
            let outcome = match trace {
                Some(path) if path.as_os_str() == "-" => {
                    let mut sink = TraceSink::new(&mut *io.out);
                    let o = deplete_observed(&mut matrix, &opts, &mut sink);
                    sink.finish()?;
                    o
                }
                Some(path) => {
                    let mut file = BufWriter::new(fs::File::create(path)?);
                    let mut sink = TraceSink::new(&mut file);
                    let o = deplete_observed(&mut matrix, &opts, &mut sink);
                    sink.finish()?;
                    file.flush()?;
                    o
                }
                None => deplete_observed(&mut matrix, &opts, &mut ()),
            };
            if structured {
                let mut v = json!({ "outcome": outcome });
                if *snapshot {
                    v["snapshot"] = serde_json::to_value(matrix.grid().snapshot())?;
                }
                emit_json(io, v)?;
            } else {
                writeln!(io.out, "sweeps:        {}", outcome.sweeps)?;
                writeln!(io.out, "triplet steps: {}", outcome.steps)?;
                writeln!(io.out, "flips:         {}", outcome.flips)?;
                writeln!(io.out, "true cells:    {} -> {}", outcome.initial_true, outcome.final_true)?;
                match outcome.early_stop {
                    Some((i, j)) => writeln!(io.out, "first empty box: ({}, {})", i + 1, j + 1)?,
                    None => writeln!(io.out, "first empty box: none")?,
                }
                if outcome.stopped_early {
                    writeln!(io.out, "stopped early")?;
                }
                if *snapshot {
                    writeln!(io.out, "{}", serde_json::to_string_pretty(&matrix.grid().snapshot())?)?;
                }
            }
            Ok(0)
        }
        Command::Reduce { input, output } => {
            let f = read_formula(cli, input, io)?;
            let text = cook_reduce(&f).to_dimacs();
            match output {
                Some(p) => fs::write(p, text)?,
                None => io.out.write_all(text.as_bytes())?,
            }
            Ok(0)
        }
        Command::Lex { input } => {
            let f = read_formula(cli, input, io)?;
            let implicant = find_implicant(&f);
            let opts = SolveOptions { max_local_vars: cli.max_vars, ..Default::default() };
            let (enc, solved) = solve_lex(&f, &opts)?;
            let survival = lex_survival(&f);
            let encoded = solved.decision.verdict.name();
            if structured {
                emit_json(io, json!({
                    "implicant": implicant.as_ref().map(|i| i.literals.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>()),
                    "encoded_variables": enc.system.variable_count(),
                    "encoded_equations": enc.system.equations().len(),
                    "encoded_verdict": encoded,
                    "survival": { "initial_true": survival.initial_true, "final_true": survival.final_true, "ratio": survival.ratio() },
                }))?;
            } else {
                match &implicant {
                    Some(i) => {
                        let lits: Vec<String> = i.literals.iter().map(|l| l.to_dimacs().to_string()).collect();
                        writeln!(io.out, "implicant: {}", lits.join(" "))?;
                    }
                    None => writeln!(io.out, "implicant: none")?,
                }
                writeln!(
                    io.out,
                    "exactly-one encoding: {} indicators, {} equations, verdict {}",
                    enc.system.variable_count(),
                    enc.system.equations().len(),
                    encoded
                )?;
                writeln!(
                    io.out,
                    "literal matrix survival: {} of {} cells ({:.3})",
                    survival.final_true,
                    survival.initial_true,
                    survival.ratio()
                )?;
            }
            Ok(if implicant.is_some() { EXIT_SAT } else { EXIT_UNSAT })
        }
        Command::Count { input, cap } => {
            let f = read_formula(cli, input, io)?;
            let opts = SolveOptions { max_local_vars: cli.max_vars, ..Default::default() };
            let solved = solve_cnf(&f, &opts)?;
            let (count, truncated) = count_grids(&solved.matrix, *cap);
            if structured {
                emit_json(io, json!({ "count": count, "truncated": truncated }))?;
            } else if truncated {
                writeln!(io.out, "more than {count} (truncated at cap)")?;
            } else {
                writeln!(io.out, "{count}")?;
            }
            Ok(0)
        }
        Command::Fuzz {
            instances,
            seed,
            min_vars,
            max_vars_per_instance,
            max_clauses,
            width,
            schema,
            out_dir,
        } => {
            let config = FuzzConfig {
                instances: *instances,
                seed: *seed,
                min_vars: *min_vars,
                max_vars: *max_vars_per_instance,
                max_clauses: *max_clauses,
                width: *width,
                schema: (*schema).into(),
                oracle_vars: cli.max_vars,
                max_local_vars: cli.max_vars,
                ..Default::default()
            };
            let report = fuzz_compare(&config)?;
            if let Some(dir) = out_dir {
                write_reproducers(dir, &report.violations)?;
            }
            if structured {
                io.out.write_all(report.to_jsonl()?.as_bytes())?;
            } else {
                write!(io.out, "{report}")?;
            }
            Ok(0)
        }
        Command::Bench { clause_counts, ratio, width, repetitions, seed, schema } => {
            let config = BenchConfig {
                clause_counts: clause_counts.clone(),
                ratio: *ratio,
                width: *width,
                repetitions: *repetitions,
                seed: *seed,
                schema: (*schema).into(),
            };
            let report = bench_scaling(&config)?;
            if structured {
                io.out.write_all(report.to_jsonl()?.as_bytes())?;
            } else {
                writeln!(io.out, "{report}")?;
            }
            Ok(0)
        }
    }
}

fn write_reproducers(dir: &Path, violations: &[crate::harness::ClaimViolation]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for v in violations {
        fs::write(dir.join(format!("violation-{:06}.cnf", v.index)), v.reproducer())?;
    }
    Ok(())
}

fn solve(
    cli: &Cli,
    io: &mut Io,
    f: &CnfFormula,
    schema: IterationSchema,
    early_stop: bool,
    cook: bool,
    evidence_path: &Path,
) -> Result<i32> {
    let structured = cli.format == Format::Structured;
    let opts = SolveOptions {
        deplete: DepleteOptions { schema, early_stop, trace: false },
        max_local_vars: cli.max_vars,
    };
    let reduction = cook.then(|| cook_reduce(f));
    let target = reduction.as_ref().map_or(f, |r| &r.reduced);
    let solved = solve_cnf(target, &opts)?;
    let verdict = &solved.decision.verdict;
    match verdict {
        Verdict::Sat { witness, grid } => {
            let mut witness = witness.clone();
            if let Some(r) = &reduction {
                witness.values = r.restrict(&witness.values);
                witness.free.retain(|&v| v <= r.original_vars);
            }
            if !f.eval(&witness.values) {
                return Err(Error::Contract("glued witness does not satisfy the input".into()));
            }
            // re-check that the reported grid glues on the solved matrix
            glue(grid, &solved.matrix)?;
            if structured {
                emit_json(io, json!({
                    "status": "SATISFIABLE",
                    "witness": witness.values.iter().enumerate().map(|(k, &b)| if b { k as i64 + 1 } else { -(k as i64 + 1) }).collect::<Vec<_>>(),
                    "free": witness.free,
                    "backtracks": solved.decision.search.backtracks,
                    "sweeps": solved.depletion.sweeps,
                }))?;
            } else {
                writeln!(io.out, "s SATISFIABLE")?;
                for line in witness.v_lines() {
                    writeln!(io.out, "{line}")?;
                }
                if !witness.free.is_empty() {
                    let free: Vec<String> = witness.free.iter().map(u32::to_string).collect();
                    writeln!(io.out, "c free variables (set false): {}", free.join(" "))?;
                }
            }
            Ok(EXIT_SAT)
        }
        Verdict::Unsat => {
            if structured {
                emit_json(io, json!({ "status": "UNSATISFIABLE", "sweeps": solved.depletion.sweeps }))?;
            } else {
                writeln!(io.out, "s UNSATISFIABLE")?;
            }
            Ok(EXIT_UNSAT)
        }
        Verdict::ClaimViolated { evidence } => {
            let doc = json!({
                "formula": target.to_dimacs(),
                "evidence": evidence,
                "snapshot": solved.matrix.grid().snapshot(),
            });
            fs::write(evidence_path, serde_json::to_string_pretty(&doc)?)?;
            if structured {
                emit_json(io, json!({
                    "status": "CLAIM-VIOLATED",
                    "surviving_true": evidence.true_cells,
                    "evidence_path": evidence_path,
                }))?;
            } else {
                writeln!(io.out, "s UNKNOWN (CLAIM-VIOLATED)")?;
                writeln!(io.out, "c {} true cells survive depletion without a solution grid", evidence.true_cells)?;
                writeln!(io.out, "c evidence written to {}", evidence_path.display())?;
            }
            Ok(EXIT_CLAIM_VIOLATED)
        }
    }
}

/// Writes one JSON line per step.
struct TraceSink<'w> {
    out: &'w mut dyn Write,
    error: Option<std::io::Error>,
}

impl<'w> TraceSink<'w> {
    fn new(out: &'w mut dyn Write) -> Self {
        TraceSink { out, error: None }
    }

    fn finish(self) -> Result<()> {
        match self.error {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    }
}

impl DepletionObserver for TraceSink<'_> {
    fn on_step(&mut self, record: &StepRecord) {
        if self.error.is_some() {
            return;
        }
        let (i, mu, j) = record.triplet;
        let line = format!(
            "{{\"triplet\":[{},{},{}],\"flips\":{},\"true_count\":{}}}",
            i, mu, j, record.flips, record.true_count
        );
        if let Err(e) = writeln!(self.out, "{line}") {
            self.error = Some(e);
        }
    }
}
