//! Ground truth and falsification: brute-force oracle, seeded random CNF,
//! cross-validation fuzzing with counterexample minimization, and scaling
//! measurements of the depletion engine.

use std::collections::HashSet;
use std::fmt;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::compat::{BoxGrid, BoxStructured};
use crate::deplete::{deplete_observed, DepleteOptions, DepletionObserver, IterationSchema, SweepRecord};
use crate::error::{Error, Result};
use crate::formula::{cnf_to_system, Clause, CnfFormula, Literal, DEFAULT_MAX_LOCAL_VARS};
use crate::grids::{count_grids, decide, Verdict};
use crate::compat::build_compat_matrix;
use crate::pipeline::{solve_cnf, SolveOptions};

/// Largest number of occurring variables the oracle will enumerate by default.
pub const DEFAULT_ORACLE_VARS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub satisfiable: bool,
    /// Models counted over the occurring variables only.
    pub model_count: u64,
    /// First model in enumeration order; non-occurring variables are false.
    pub model: Option<Vec<bool>>,
}

/// Occurring variables plus per-clause positive/negative masks over them.
struct Masks {
    vars: Vec<u32>,
    clauses: Vec<(u64, u64)>,
}

impl Masks {
    fn new(f: &CnfFormula, max_vars: usize) -> Result<Self> {
        let vars = f.occurring_variables();
        let limit = max_vars.min(63);
        if vars.len() > limit {
            return Err(Error::Capacity {
                what: "oracle variables",
                actual: vars.len(),
                limit,
            });
        }
        let clauses = f
            .clauses()
            .iter()
            .map(|c| {
                c.literals().iter().fold((0u64, 0u64), |(pos, neg), l| {
                    let bit = 1u64 << vars.binary_search(&l.var()).unwrap();
                    if l.is_negated() {
                        (pos, neg | bit)
                    } else {
                        (pos | bit, neg)
                    }
                })
            })
            .collect();
        Ok(Masks { vars, clauses })
    }

    fn satisfies(&self, bits: u64) -> bool {
        self.clauses
            .iter()
            .all(|&(pos, neg)| (bits & pos) | (!bits & neg) != 0)
    }

    fn expand(&self, bits: u64, variable_count: u32) -> Vec<bool> {
        let mut values = vec![false; variable_count as usize];
        for (k, &v) in self.vars.iter().enumerate() {
            values[v as usize - 1] = bits >> k & 1 == 1;
        }
        values
    }

    fn assignments(&self) -> std::ops::Range<u64> {
        0..1u64 << self.vars.len()
    }
}

/// Exhaustive enumeration over the occurring variables.
pub fn brute_force(f: &CnfFormula, max_vars: usize) -> Result<OracleResult> {
    let masks = Masks::new(f, max_vars)?;
    let mut count = 0;
    let mut first = None;
    for bits in masks.assignments() {
        if masks.satisfies(bits) {
            count += 1;
            first.get_or_insert(bits);
        }
    }
    Ok(OracleResult {
        satisfiable: count > 0,
        model_count: count,
        model: first.map(|b| masks.expand(b, f.variable_count())),
    })
}

/// Every model over the occurring variables, expanded to total assignments.
pub fn all_models(f: &CnfFormula, max_vars: usize) -> Result<Vec<Vec<bool>>> {
    let masks = Masks::new(f, max_vars)?;
    Ok(masks
        .assignments()
        .filter(|&b| masks.satisfies(b))
        .map(|b| masks.expand(b, f.variable_count()))
        .collect())
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Random formula with `clauses` distinct clauses over `vars` variables,
/// each of `width` distinct variables with uniform signs.
pub fn random_cnf(vars: u32, clauses: usize, width: usize, seed: u64) -> Result<CnfFormula> {
    random_cnf_widths(vars, clauses, width..=width, seed)
}

/// As [`random_cnf`], with each clause's width drawn uniformly from `widths`.
pub fn random_cnf_widths(
    vars: u32,
    clauses: usize,
    widths: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Result<CnfFormula> {
    let (lo, hi) = (*widths.start(), *widths.end());
    if lo == 0 || lo > hi || hi > vars as usize {
        return Err(Error::Generation(format!(
            "clause widths {lo}..={hi} impossible over {vars} variables"
        )));
    }
    if clauses == 0 {
        return Err(Error::Generation("at least one clause is required".into()));
    }
    let available: u128 = (lo..=hi)
        .map(|w| binomial(vars as u128, w as u128) << w)
        .sum();
    if (clauses as u128) > available {
        return Err(Error::Generation(format!(
            "{clauses} distinct clauses requested, only {available} exist"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(clauses);
    let mut attempts = 0usize;
    while out.len() < clauses {
        attempts += 1;
        if attempts > 1000 * clauses + 10_000 {
            return Err(Error::Generation("too many rejected samples".into()));
        }
        let width = rng.gen_range(lo..=hi);
        let mut chosen: Vec<u32> = sample(&mut rng, vars as usize, width)
            .into_iter()
            .map(|v| v as u32 + 1)
            .collect();
        chosen.sort_unstable();
        let literals: Vec<Literal> = chosen
            .into_iter()
            .map(|v| Literal::new(v, rng.gen_bool(0.5)))
            .collect();
        if seen.insert(literals.clone()) {
            out.push(Clause::new(literals));
        }
    }
    CnfFormula::new(vars, out)
}

/// Independent per-instance seed (splitmix64 of the run seed and index).
pub fn instance_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub instances: usize,
    pub seed: u64,
    pub min_vars: u32,
    pub max_vars: u32,
    pub max_clauses: usize,
    /// Clause width (`K`); capped by the instance's variable count.
    pub width: usize,
    pub schema: IterationSchema,
    /// Check symmetry and non-increasing true count after every sweep.
    pub check_sweeps: bool,
    /// Compare grid counts with model counts when there are at most this many models.
    pub grid_count_cap: usize,
    pub oracle_vars: usize,
    pub max_local_vars: usize,
    pub minimize: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            instances: 1000,
            seed: 0,
            min_vars: 3,
            max_vars: 12,
            max_clauses: 30,
            width: 3,
            schema: IterationSchema::Worklist,
            check_sweeps: true,
            grid_count_cap: 4096,
            oracle_vars: DEFAULT_ORACLE_VARS,
            max_local_vars: DEFAULT_MAX_LOCAL_VARS,
            minimize: true,
        }
    }
}

impl FuzzConfig {
    /// The instance at `index` of this run.
    pub fn instance(&self, index: usize) -> Result<(u64, CnfFormula)> {
        let seed = instance_seed(self.seed, index as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = rng.gen_range(self.min_vars..=self.max_vars.max(self.min_vars));
        let width = self.width.min(vars as usize).max(1);
        let capacity = binomial(vars as u128, width as u128) << width;
        let max_m = (self.max_clauses as u128).min(capacity) as usize;
        let m = rng.gen_range(1..=max_m.max(1));
        Ok((seed, random_cnf(vars, m, width, rng.gen())?))
    }
}

/// A surviving-cells-without-grid instance and its minimized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimViolation {
    pub index: usize,
    pub seed: u64,
    pub dimacs: String,
    pub surviving_true: usize,
    pub oracle_satisfiable: bool,
    pub minimized_dimacs: String,
    pub minimized_clauses: usize,
    pub minimized_oracle_satisfiable: bool,
    pub minimized_still_violates: bool,
}

impl ClaimViolation {
    /// Reproducer file with seed metadata in comments.
    pub fn reproducer(&self) -> String {
        let header = format!(
            "c claim violation: fuzz instance {} seed {}\nc oracle satisfiable: {}\n",
            self.index, self.seed, self.minimized_oracle_satisfiable
        );
        header + &self.minimized_dimacs
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub config: Option<FuzzConfig>,
    pub instances: usize,
    /// SAT/UNSAT verdicts that matched the oracle.
    pub agreements: usize,
    pub sat: usize,
    pub unsat: usize,
    pub capacity_skips: usize,
    pub violations: Vec<ClaimViolation>,
    /// The diagonal resolution bit said satisfiable on an unsatisfiable instance.
    pub resolution_bit_false_positives: usize,
    pub grid_counts_checked: usize,
    pub sweep_invariant_failures: usize,
    pub diagonal_support_failures: usize,
    /// SAT instances whose first grid was found without backtracking.
    pub backtrack_free_sat: usize,
    pub total_backtracks: usize,
    pub max_backtracks: usize,
}

impl FuzzReport {
    /// Tally invariant: every instance is accounted for exactly once.
    pub fn is_consistent(&self) -> bool {
        self.agreements + self.violations.len() + self.capacity_skips == self.instances
    }

    /// One JSON object per line: each violation, then the summary.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&serde_json::to_string(&serde_json::json!({ "claim_violation": v }))?);
            out.push('\n');
        }
        let mut summary = self.clone();
        summary.violations.clear();
        out.push_str(&serde_json::to_string(&serde_json::json!({
            "summary": summary,
            "violation_count": self.violations.len(),
        }))?);
        out.push('\n');
        Ok(out)
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances:            {}", self.instances)?;
        writeln!(f, "oracle agreements:    {} ({} SAT, {} UNSAT)", self.agreements, self.sat, self.unsat)?;
        writeln!(f, "claim violations:     {}", self.violations.len())?;
        writeln!(f, "capacity skips:       {}", self.capacity_skips)?;
        writeln!(f, "resolution bit wrong: {}", self.resolution_bit_false_positives)?;
        writeln!(f, "grid counts checked:  {}", self.grid_counts_checked)?;
        writeln!(f, "sweep check failures: {}", self.sweep_invariant_failures)?;
        writeln!(f, "diag support failures:{}", self.diagonal_support_failures)?;
        writeln!(
            f,
            "backtracking:         {} SAT without backtracks, total {}, max {}",
            self.backtrack_free_sat, self.total_backtracks, self.max_backtracks
        )?;
        for v in &self.violations {
            writeln!(
                f,
                "  violation at instance {} (seed {}): {} cells survive, oracle sat={}, minimized to {} clauses",
                v.index, v.seed, v.surviving_true, v.oracle_satisfiable, v.minimized_clauses
            )?;
        }
        Ok(())
    }
}

/// Checks symmetry and non-increasing true count at each sweep boundary.
#[derive(Default)]
pub struct SweepChecker {
    last: Option<usize>,
    pub failures: usize,
    pub sweeps: usize,
}

impl DepletionObserver for SweepChecker {
    fn on_sweep(&mut self, record: &SweepRecord, grid: &BoxGrid) {
        self.sweeps += 1;
        let count = grid.count_true();
        let increased = self.last.is_some_and(|prev| count > prev);
        if !grid.verify_symmetry() || increased || count != record.true_count {
            self.failures += 1;
        }
        self.last = Some(count);
    }
}

/// Cells whose diagonal supports are gone. Zero at any fixpoint.
pub fn diagonal_support_failures(grid: &BoxGrid) -> usize {
    grid.true_cells()
        .filter(|c| !grid.diag(c.i, c.alpha) || !grid.diag(c.j, c.beta))
        .count()
}

/// Depleting `f` to its fixpoint leaves true cells but no grid. False on non-normal input.
fn violates_claim(f: &CnfFormula, max_local_vars: usize) -> bool {
    let opts = SolveOptions {
        max_local_vars,
        ..Default::default()
    };
    matches!(
        solve_cnf(f, &opts).map(|s| s.decision.verdict),
        Ok(Verdict::ClaimViolated { .. })
    )
}

/// Greedy clause deletion, then literal deletion, keeping `still_fails` true.
pub fn minimize(f: &CnfFormula, still_fails: impl Fn(&CnfFormula) -> bool) -> CnfFormula {
    let mut best = f.clone();
    let mut changed = true;
    while changed {
        changed = false;
        let mut i = 0;
        while i < best.num_clauses() {
            match best.without_clause(i) {
                Some(candidate) if still_fails(&candidate) => {
                    best = candidate;
                    changed = true;
                }
                _ => i += 1,
            }
        }
    }
    changed = true;
    while changed {
        changed = false;
        'outer: for c in 0..best.num_clauses() {
            for l in 0..best.clauses()[c].len() {
                if let Some(candidate) = best.without_literal(c, l) {
                    if still_fails(&candidate) {
                        best = candidate;
                        changed = true;
                        break 'outer;
                    }
                }
            }
        }
    }
    best
}

enum Outcome {
    Skip,
    Agree {
        sat: bool,
        backtracks: usize,
        grid_count_checked: bool,
        sweep_failures: usize,
        diag_failures: usize,
        resolution_false_positive: bool,
    },
    Violation(ClaimViolation, usize, usize),
}

fn run_instance(config: &FuzzConfig, index: usize) -> Result<Outcome> {
    let (seed, f) = config.instance(index)?;
    let mismatch = |detail: String| Error::OracleMismatch {
        index,
        detail,
        dimacs: f.to_dimacs_with_comments(&[format!("fuzz instance {index} seed {seed}")]),
    };
    let oracle = match brute_force(&f, config.oracle_vars) {
        Ok(o) => o,
        Err(Error::Capacity { .. }) => return Ok(Outcome::Skip),
        Err(e) => return Err(e),
    };
    let system = cnf_to_system(&f)?;
    let mut matrix = match build_compat_matrix(&system, config.max_local_vars) {
        Ok(t) => t,
        Err(Error::Capacity { .. }) => return Ok(Outcome::Skip),
        Err(e) => return Err(e),
    };
    let mut checker = SweepChecker::default();
    let opts = DepleteOptions {
        schema: config.schema,
        ..Default::default()
    };
    if config.check_sweeps {
        deplete_observed(&mut matrix, &opts, &mut checker);
    } else {
        deplete_observed(&mut matrix, &opts, &mut ());
    }
    let grid = matrix.grid();
    let diag_failures = diagonal_support_failures(grid);
    let decision = decide(&matrix);
    if !decision.tests_agree() {
        return Err(mismatch("any-true and diagonal tests disagree at the fixpoint".into()));
    }
    let resolution_false_positive = decision.diagonal_true && !oracle.satisfiable;
    match &decision.verdict {
        Verdict::Sat { witness, .. } => {
            if !oracle.satisfiable {
                return Err(mismatch("decided SAT, oracle says UNSAT".into()));
            }
            if !f.eval(&witness.values) {
                return Err(mismatch("witness does not satisfy the formula".into()));
            }
        }
        Verdict::Unsat => {
            if oracle.satisfiable {
                return Err(mismatch("decided UNSAT, oracle says SAT".into()));
            }
        }
        Verdict::ClaimViolated { evidence } => {
            let minimized = if config.minimize {
                minimize(&f, |g| violates_claim(g, config.max_local_vars))
            } else {
                f.clone()
            };
            let min_oracle = brute_force(&minimized, config.oracle_vars)?;
            let violation = ClaimViolation {
                index,
                seed,
                dimacs: f.to_dimacs(),
                surviving_true: evidence.true_cells,
                oracle_satisfiable: oracle.satisfiable,
                minimized_clauses: minimized.num_clauses(),
                minimized_dimacs: minimized.to_dimacs(),
                minimized_oracle_satisfiable: min_oracle.satisfiable,
                minimized_still_violates: violates_claim(&minimized, config.max_local_vars),
            };
            return Ok(Outcome::Violation(violation, checker.failures, diag_failures));
        }
    }
    let mut grid_count_checked = false;
    if oracle.model_count <= config.grid_count_cap as u64 {
        let (count, truncated) = count_grids(&matrix, config.grid_count_cap);
        if truncated || count as u64 != oracle.model_count {
            return Err(mismatch(format!(
                "{count} grids but {} models",
                oracle.model_count
            )));
        }
        grid_count_checked = true;
    }
    Ok(Outcome::Agree {
        sat: oracle.satisfiable,
        backtracks: decision.search.backtracks,
        grid_count_checked,
        sweep_failures: checker.failures,
        diag_failures,
        resolution_false_positive,
    })
}

/// Run the pipeline and the oracle on `config.instances` random formulas.
///
/// Any SAT/UNSAT disagreement with brute force is an error carrying the
/// offending instance. Claim violations are collected, not treated as errors.
pub fn fuzz_compare(config: &FuzzConfig) -> Result<FuzzReport> {
    let outcomes: Vec<Result<Outcome>> = (0..config.instances)
        .into_par_iter()
        .map(|i| run_instance(config, i))
        .collect();
    let mut report = FuzzReport {
        config: Some(config.clone()),
        instances: config.instances,
        ..Default::default()
    };
    for outcome in outcomes {
        match outcome? {
            Outcome::Skip => report.capacity_skips += 1,
            Outcome::Agree {
                sat,
                backtracks,
                grid_count_checked,
                sweep_failures,
                diag_failures,
                resolution_false_positive,
            } => {
                report.agreements += 1;
                if sat {
                    report.sat += 1;
                    if backtracks == 0 {
                        report.backtrack_free_sat += 1;
                    }
                } else {
                    report.unsat += 1;
                }
                report.total_backtracks += backtracks;
                report.max_backtracks = report.max_backtracks.max(backtracks);
                report.grid_counts_checked += grid_count_checked as usize;
                report.sweep_invariant_failures += sweep_failures;
                report.diagonal_support_failures += diag_failures;
                report.resolution_bit_false_positives += resolution_false_positive as usize;
            }
            Outcome::Violation(v, sweep_failures, diag_failures) => {
                report.sweep_invariant_failures += sweep_failures;
                report.diagonal_support_failures += diag_failures;
                report.resolution_bit_false_positives += !v.oracle_satisfiable as usize;
                report.violations.push(v);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchConfig {
    pub clause_counts: Vec<usize>,
    /// Clauses per variable.
    pub ratio: f64,
    pub width: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub schema: IterationSchema,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            clause_counts: vec![10, 20, 40, 80],
            ratio: 4.0,
            width: 3,
            repetitions: 5,
            seed: 0,
            schema: IterationSchema::Worklist,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRecord {
    pub vars: u32,
    pub clauses: usize,
    pub width: usize,
    pub seed: u64,
    pub wall_ms: f64,
    pub sweeps: usize,
    pub flips: usize,
    pub steps: usize,
    pub initial_true: usize,
    pub final_true: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub records: Vec<ScalingRecord>,
    /// Least-squares slope of log(mean triplet steps) against log(m).
    pub steps_slope: Option<f64>,
    /// Least-squares slope of log(mean wall time) against log(m).
    pub time_slope: Option<f64>,
}

/// Variables for `m` clauses at the given ratio, raised until `m` distinct
/// clauses of `width` literals exist.
pub fn bench_vars(m: usize, ratio: f64, width: usize) -> u32 {
    let mut vars = ((m as f64 / ratio).ceil() as u32).max(width as u32).max(1);
    while binomial(vars as u128, width as u128) << width < m as u128 {
        vars += 1;
    }
    vars
}

pub fn bench_scaling(config: &BenchConfig) -> Result<BenchReport> {
    let mut records = Vec::new();
    for &m in &config.clause_counts {
        let vars = bench_vars(m, config.ratio, config.width);
        for rep in 0..config.repetitions {
            let seed = instance_seed(config.seed ^ m as u64, rep as u64);
            let f = random_cnf(vars, m, config.width, seed)?;
            let system = cnf_to_system(&f)?;
            let start = Instant::now();
            let mut matrix = build_compat_matrix(&system, DEFAULT_MAX_LOCAL_VARS)?;
            let out = deplete_observed(
                &mut matrix,
                &DepleteOptions {
                    schema: config.schema,
                    ..Default::default()
                },
                &mut (),
            );
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            records.push(ScalingRecord {
                vars,
                clauses: m,
                width: config.width,
                seed,
                wall_ms,
                sweeps: out.sweeps,
                flips: out.flips,
                steps: out.steps,
                initial_true: out.initial_true,
                final_true: out.final_true,
            });
        }
    }
    let mean_by_m = |value: &dyn Fn(&ScalingRecord) -> f64| -> Vec<(f64, f64)> {
        config
            .clause_counts
            .iter()
            .filter_map(|&m| {
                let vals: Vec<f64> = records.iter().filter(|r| r.clauses == m).map(value).collect();
                (!vals.is_empty()).then(|| (m as f64, vals.iter().sum::<f64>() / vals.len() as f64))
            })
            .collect()
    };
    let steps_slope = log_log_slope(&mean_by_m(&|r| r.steps as f64));
    let time_slope = log_log_slope(&mean_by_m(&|r| r.wall_ms));
    Ok(BenchReport {
        records,
        steps_slope,
        time_slope,
    })
}

/// Least-squares slope of `ln y` on `ln x`; needs two distinct positive x values.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

impl BenchReport {
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(&serde_json::json!({ "record": r }))?);
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&serde_json::json!({
            "steps_slope": self.steps_slope,
            "time_slope": self.time_slope,
        }))?);
        out.push('\n');
        Ok(out)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>5} {:>5} {:>20} {:>7} {:>8} {:>12} {:>10}",
            "m", "vars", "seed", "sweeps", "flips", "steps", "ms"
        )?;
        for r in &self.records {
            writeln!(
                f,
                "{:>5} {:>5} {:>20} {:>7} {:>8} {:>12} {:>10.3}",
                r.clauses, r.vars, r.seed, r.sweeps, r.flips, r.steps, r.wall_ms
            )?;
        }
        let fmt_slope = |s: Option<f64>| s.map_or("n/a".to_string(), |v| format!("{v:.3}"));
        writeln!(f, "log-log slope, triplet steps vs m: {}", fmt_slope(self.steps_slope))?;
        write!(f, "log-log slope, wall time vs m:     {}", fmt_slope(self.time_slope))
    }
}
