//! Depletion: the fixpoint iteration `T_ij <- T_ij & (T_iu * T_uj)` over
//! index triplets of a box grid.
//!
//! Every step is monotone (cells only go from true to false) and keeps the
//! grid symmetric, so all fair schedules reach the same fixpoint.

use std::collections::VecDeque;
use std::str::FromStr;

use serde::Serialize;

use crate::compat::{BoxGrid, BoxStructured};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterationSchema {
    /// Full tours over every `(i, u, j)` in lexicographic order until a tour changes nothing.
    RoundRobin,
    /// Round-robin with the tour visited in reverse order.
    ReversedRoundRobin,
    /// Seeded with every triplet; a changed box re-enqueues the triplets that read it.
    #[default]
    Worklist,
}

impl FromStr for IterationSchema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "roundrobin" | "round-robin" => Ok(IterationSchema::RoundRobin),
            "reversed" | "reversed-round-robin" => Ok(IterationSchema::ReversedRoundRobin),
            "worklist" => Ok(IterationSchema::Worklist),
            other => Err(format!("unknown schema `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DepleteOptions {
    pub schema: IterationSchema,
    /// Return as soon as some box is all-false instead of running to the fixpoint.
    pub early_stop: bool,
    /// Keep every step in [`DepletionOutcome::trace`].
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub triplet: (usize, usize, usize),
    pub flips: usize,
    /// True cells left in the whole grid (both halves) after this step.
    pub true_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub flips: usize,
    pub steps: usize,
    pub true_count: usize,
}

/// Hooks called during depletion. Both methods default to no-ops.
pub trait DepletionObserver {
    fn on_step(&mut self, _record: &StepRecord) {}
    fn on_sweep(&mut self, _record: &SweepRecord, _grid: &BoxGrid) {}
}

impl DepletionObserver for () {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepletionOutcome {
    /// Round-robin tours, or worklist epochs, including the final quiet one.
    pub sweeps: usize,
    /// Cells inverted in the target boxes, not counting mirror writes.
    pub flips: usize,
    /// Triplet steps executed.
    pub steps: usize,
    /// First box pair (i <= j) seen all-false, either at entry or after a step.
    pub early_stop: Option<(usize, usize)>,
    /// Whether the run returned before reaching the fixpoint.
    pub stopped_early: bool,
    pub initial_true: usize,
    pub final_true: usize,
    pub trace: Option<Vec<StepRecord>>,
}

/// One depletion step on `(i, mu, j)`. Returns the number of cells of
/// `box(i, j)` flipped to false; the mirror box is updated to match.
pub fn deplete_step(grid: &mut BoxGrid, (i, mu, j): (usize, usize, usize)) -> usize {
    let path = grid.get_box(i, mu).product_unchecked(grid.get_box(mu, j));
    let mut target = grid.get_box(i, j).clone();
    let flips = target
        .conjoin_in_place(&path)
        .expect("box dimensions agree by construction");
    if flips > 0 {
        grid.set_box(i, j, target);
    }
    flips
}

/// First `(i, j)` in row-major order whose box has no true cell.
pub fn detect_unsat_pattern(grid: &BoxGrid) -> Option<(usize, usize)> {
    let m = grid.equation_count();
    (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .find(|&(i, j)| grid.get_box(i, j).is_all_false())
}

/// True iff no triplet would change the grid.
pub fn is_fixpoint(grid: &BoxGrid) -> bool {
    let m = grid.equation_count();
    for i in 0..m {
        for j in 0..m {
            let target = grid.get_box(i, j);
            for mu in 0..m {
                let path = grid.get_box(i, mu).product_unchecked(grid.get_box(mu, j));
                if !target.is_subset_of(&path) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn deplete<T: BoxStructured + ?Sized>(t: &mut T, opts: &DepleteOptions) -> DepletionOutcome {
    deplete_observed(t, opts, &mut ())
}

pub fn deplete_observed<T: BoxStructured + ?Sized>(
    t: &mut T,
    opts: &DepleteOptions,
    observer: &mut dyn DepletionObserver,
) -> DepletionOutcome {
    let mut engine = Engine::new(t.grid_mut(), opts, observer);
    engine.run();
    engine.finish()
}

struct Engine<'a> {
    grid: &'a mut BoxGrid,
    opts: DepleteOptions,
    observer: &'a mut dyn DepletionObserver,
    true_count: usize,
    outcome: DepletionOutcome,
}

impl<'a> Engine<'a> {
    fn new(
        grid: &'a mut BoxGrid,
        opts: &DepleteOptions,
        observer: &'a mut dyn DepletionObserver,
    ) -> Self {
        let true_count = grid.count_true();
        let early_stop = detect_unsat_pattern(grid).map(|(i, j)| (i.min(j), i.max(j)));
        Engine {
            grid,
            opts: *opts,
            observer,
            true_count,
            outcome: DepletionOutcome {
                sweeps: 0,
                flips: 0,
                steps: 0,
                early_stop,
                stopped_early: false,
                initial_true: true_count,
                final_true: true_count,
                trace: opts.trace.then(Vec::new),
            },
        }
    }

    fn should_stop(&self) -> bool {
        self.opts.early_stop && self.outcome.early_stop.is_some()
    }

    /// Apply one triplet; returns the flips.
    fn step(&mut self, triplet: (usize, usize, usize)) -> usize {
        let flips = deplete_step(self.grid, triplet);
        let (i, _, j) = triplet;
        self.outcome.steps += 1;
        if flips > 0 {
            self.outcome.flips += flips;
            self.true_count -= if i == j { flips } else { 2 * flips };
            if self.outcome.early_stop.is_none() && self.grid.get_box(i, j).is_all_false() {
                self.outcome.early_stop = Some((i.min(j), i.max(j)));
            }
        }
        let record = StepRecord {
            triplet,
            flips,
            true_count: self.true_count,
        };
        self.observer.on_step(&record);
        if let Some(trace) = &mut self.outcome.trace {
            trace.push(record);
        }
        flips
    }

    fn end_sweep(&mut self, flips: usize, steps: usize) {
        self.outcome.sweeps += 1;
        let record = SweepRecord {
            sweep: self.outcome.sweeps,
            flips,
            steps,
            true_count: self.true_count,
        };
        self.observer.on_sweep(&record, self.grid);
    }

    fn run(&mut self) {
        if self.should_stop() {
            self.outcome.stopped_early = true;
            return;
        }
        match self.opts.schema {
            IterationSchema::RoundRobin => self.round_robin(false),
            IterationSchema::ReversedRoundRobin => self.round_robin(true),
            IterationSchema::Worklist => self.worklist(),
        }
    }

    fn round_robin(&mut self, reversed: bool) {
        let m = self.grid.equation_count();
        let total = m * m * m;
        loop {
            let (mut flips, mut steps) = (0, 0);
            for k in 0..total {
                let k = if reversed { total - 1 - k } else { k };
                flips += self.step((k / (m * m), (k / m) % m, k % m));
                steps += 1;
                if self.should_stop() {
                    self.end_sweep(flips, steps);
                    self.outcome.stopped_early = true;
                    return;
                }
            }
            self.end_sweep(flips, steps);
            if flips == 0 {
                return;
            }
        }
    }

    // Targets are restricted to i <= j: (j, u, i) computes the transpose of
    // (i, u, j), which the mirrored write already covers.
    fn worklist(&mut self) {
        let m = self.grid.equation_count();
        let index = |(i, mu, j): (usize, usize, usize)| (i * m + mu) * m + j;
        let mut queued = vec![false; m * m * m];
        let mut current: VecDeque<(usize, usize, usize)> = VecDeque::new();
        for i in 0..m {
            for mu in 0..m {
                for j in i..m {
                    queued[index((i, mu, j))] = true;
                    current.push_back((i, mu, j));
                }
            }
        }
        while !current.is_empty() {
            let mut next = VecDeque::new();
            let (mut flips, mut steps) = (0, 0);
            while let Some(triplet) = current.pop_front() {
                queued[index(triplet)] = false;
                let f = self.step(triplet);
                flips += f;
                steps += 1;
                if self.should_stop() {
                    self.end_sweep(flips, steps);
                    self.outcome.stopped_early = true;
                    return;
                }
                if f == 0 {
                    continue;
                }
                let (i, _, j) = triplet;
                let mut push = |(a, mu, b): (usize, usize, usize)| {
                    let t = (a.min(b), mu, a.max(b));
                    let k = index(t);
                    if !queued[k] {
                        queued[k] = true;
                        next.push_back(t);
                    }
                };
                // box(i, j) or its mirror appears as a factor of these
                for x in 0..m {
                    push((i, j, x));
                    push((j, i, x));
                    push((x, i, j));
                    push((x, j, i));
                }
            }
            self.end_sweep(flips, steps);
            current = next;
        }
    }

    fn finish(mut self) -> DepletionOutcome {
        self.outcome.final_true = self.true_count;
        debug_assert_eq!(self.true_count, self.grid.count_true());
        self.outcome
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolmat::BoolMatrix;
    use crate::compat::{build_compat_matrix, CompatMatrix};
    use crate::formula::{cnf_to_system, CnfFormula};

    fn build(clauses: &[&[i64]]) -> (CnfFormula, CompatMatrix) {
        let f = CnfFormula::from_dimacs_clauses(clauses).unwrap();
        let t = build_compat_matrix(&cnf_to_system(&f).unwrap(), 24).unwrap();
        (f, t)
    }

    #[test]
    fn zero_factor_annihilates() {
        let mut g = BoxGrid::from_fn(vec![2, 2, 3], |i, j, a, b| i == j && a == b || i != j);
        g.set_box(0, 1, BoolMatrix::new(2, 2));
        let flips = deplete_step(&mut g, (0, 1, 2));
        assert_eq!(flips, 6);
        assert!(g.get_box(0, 2).is_all_false());
        assert!(g.get_box(2, 0).is_all_false());
        assert!(g.verify_symmetry());
    }

    #[test]
    fn contradiction_step_clears_diagonal() {
        let (_, mut t) = build(&[&[1], &[-1]]);
        // box(0,0) & box(0,1) * box(1,0) = [T] & [F] * [F]
        let flips = deplete_step(t.grid_mut(), (0, 1, 0));
        assert_eq!(flips, 1);
        assert!(!t.grid().diag(0, 0));
        assert!(t.grid().diag(1, 0));
    }

    #[test]
    fn diagonal_filter_step() {
        let mut g = BoxGrid::from_fn(vec![3, 2], |i, j, a, b| if i == j { a == b } else { true });
        g.set_box(0, 0, BoolMatrix::diagonal(&[true, false, true]));
        let flips = deplete_step(&mut g, (0, 0, 1));
        assert_eq!(flips, 2);
        let b = g.get_box(0, 1);
        assert!(b.get(0, 0) && b.get(0, 1) && !b.get(1, 0) && !b.get(1, 1) && b.get(2, 0));
    }

    #[test]
    fn contradiction_depletes_to_all_false() {
        let (_, mut t) = build(&[&[1], &[-1]]);
        let out = deplete(&mut t, &DepleteOptions::default());
        assert_eq!(out.early_stop, Some((0, 1)));
        assert!(!out.stopped_early);
        assert!(!t.grid().any_true());
        assert_eq!(out.flips, 2);
        assert_eq!(out.initial_true, 2);
        assert_eq!(out.final_true, 0);
    }

    #[test]
    fn early_stop_returns_immediately_on_entry_pattern() {
        let (_, mut t) = build(&[&[1], &[-1]]);
        let before = t.clone();
        let out = deplete(
            &mut t,
            &DepleteOptions { early_stop: true, ..Default::default() },
        );
        assert!(out.stopped_early);
        assert_eq!(out.steps, 0);
        assert_eq!(t, before);
    }

    #[test]
    fn early_stop_mid_run() {
        // no pair is contradictory on entry, but the whole is unsat
        let (_, mut t) = build(&[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        assert_eq!(detect_unsat_pattern(t.grid()), None);
        let out = deplete(
            &mut t,
            &DepleteOptions { schema: IterationSchema::RoundRobin, early_stop: true, trace: false },
        );
        assert!(out.stopped_early);
        let (i, j) = out.early_stop.unwrap();
        assert!(t.grid().get_box(i, j).is_all_false());
    }

    #[test]
    fn single_clause_is_already_fixed() {
        for schema in [IterationSchema::RoundRobin, IterationSchema::Worklist] {
            let (_, mut t) = build(&[&[1, 2]]);
            let before = t.clone();
            let out = deplete(&mut t, &DepleteOptions { schema, ..Default::default() });
            assert_eq!(t, before);
            assert_eq!((out.sweeps, out.flips, out.steps), (1, 0, 1));
        }
    }

    #[test]
    fn satisfiable_keeps_model_grids() {
        let (f, mut t) = build(&[&[1, 2], &[-1, 2]]);
        deplete(&mut t, &DepleteOptions::default());
        assert!(is_fixpoint(t.grid()));
        let mut models = 0;
        for bits in 0..4u32 {
            let a = [bits & 1 == 1, bits & 2 == 2];
            if f.eval(&a) {
                models += 1;
                let grid = t.induced_grid(&a).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        assert!(t.grid().get_box(i, j).get(grid[i], grid[j]));
                    }
                }
            }
        }
        assert_eq!(models, 2);
    }

    #[test]
    fn unsat_pattern_after_depletion() {
        let (_, mut t) = build(&[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        deplete(&mut t, &DepleteOptions::default());
        assert!(detect_unsat_pattern(t.grid()).is_some());
        assert!(!t.grid().any_true());
    }

    #[test]
    fn satisfiable_without_contradictions_has_no_pattern() {
        let (_, t) = build(&[&[1, 2], &[2, 3], &[1, 3]]);
        assert_eq!(detect_unsat_pattern(t.grid()), None);
    }

    #[test]
    fn trace_accounts_for_every_step() {
        let (_, mut t) = build(&[&[1, -2], &[2, 3], &[-1, -3], &[-3, 2]]);
        let out = deplete(
            &mut t,
            &DepleteOptions { schema: IterationSchema::RoundRobin, early_stop: false, trace: true },
        );
        let trace = out.trace.as_ref().unwrap();
        assert_eq!(trace.len(), out.steps);
        assert_eq!(trace.iter().map(|r| r.flips).sum::<usize>(), out.flips);
        assert_eq!(trace.last().unwrap().true_count, t.grid().count_true());
    }

    struct SweepCheck {
        last: usize,
        sweeps: usize,
    }

    impl DepletionObserver for SweepCheck {
        fn on_sweep(&mut self, record: &SweepRecord, grid: &BoxGrid) {
            assert!(grid.verify_symmetry());
            assert!(record.true_count <= self.last);
            assert_eq!(record.true_count, grid.count_true());
            self.last = record.true_count;
            self.sweeps += 1;
        }
    }

    #[test]
    fn schemas_agree_and_sweeps_are_monotone() {
        let (_, base) = build(&[&[1, -2, 3], &[-1, 2], &[2, -3], &[-2, 3, 4], &[-4, -3], &[1, 4]]);
        let mut results = Vec::new();
        for schema in [
            IterationSchema::RoundRobin,
            IterationSchema::ReversedRoundRobin,
            IterationSchema::Worklist,
        ] {
            let mut t = base.clone();
            let mut check = SweepCheck { last: t.grid().count_true(), sweeps: 0 };
            let out = deplete_observed(&mut t, &DepleteOptions { schema, ..Default::default() }, &mut check);
            assert_eq!(check.sweeps, out.sweeps);
            assert!(t.grid().is_subset_of(base.grid()));
            assert!(is_fixpoint(t.grid()));
            results.push(t);
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[0], results[2]);
    }

    #[test]
    fn schema_parsing() {
        assert_eq!("roundrobin".parse(), Ok(IterationSchema::RoundRobin));
        assert_eq!("worklist".parse(), Ok(IterationSchema::Worklist));
        assert!("bogus".parse::<IterationSchema>().is_err());
    }
}
