//! Solution grids: one surviving row per equation, pairwise compatible in
//! every box. Grid search is a complete backtracking search, so the final
//! verdict never depends on whether depletion alone was enough.

use serde::Serialize;

use crate::compat::{BoxGrid, BoxStructured, CompatMatrix};
use crate::error::{Error, Result};

/// `gamma[i]` is the chosen row of equation `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SolutionGrid(pub Vec<usize>);

impl SolutionGrid {
    pub fn rows(&self) -> &[usize] {
        &self.0
    }

    /// Full check that every `box(i, j)(gamma[i], gamma[j])` is true.
    pub fn verify(&self, grid: &BoxGrid) -> bool {
        let m = grid.equation_count();
        if self.0.len() != m {
            return false;
        }
        (0..m).all(|i| {
            self.0[i] < grid.sizes()[i]
                && (0..m).all(|j| grid.get_box(i, j).get(self.0[i], self.0[j]))
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Row choices tried.
    pub nodes: usize,
    /// Choices undone because nothing below them extended to a grid.
    pub backtracks: usize,
}

struct Search<'a> {
    grid: &'a BoxGrid,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    gamma: Vec<usize>,
    solutions: usize,
    stats: SearchStats,
}

impl<'a> Search<'a> {
    fn new(grid: &'a BoxGrid) -> Self {
        let m = grid.equation_count();
        let candidates: Vec<Vec<usize>> = (0..m)
            .map(|i| (0..grid.sizes()[i]).filter(|&a| grid.diag(i, a)).collect())
            .collect();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| (candidates[i].len(), i));
        Search {
            grid,
            order,
            candidates,
            gamma: vec![usize::MAX; m],
            solutions: 0,
            stats: SearchStats::default(),
        }
    }

    /// Visit grids in backtracking order; `visit` returns false to stop.
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if depth == self.order.len() {
            self.solutions += 1;
            return visit(&self.gamma);
        }
        let e = self.order[depth];
        for k in 0..self.candidates[e].len() {
            let alpha = self.candidates[e][k];
            let consistent = self.order[..depth].iter().all(|&prev| {
                self.grid.get_box(e, prev).get(alpha, self.gamma[prev])
            });
            if !consistent {
                continue;
            }
            self.stats.nodes += 1;
            self.gamma[e] = alpha;
            let solutions_before = self.solutions;
            if !self.run(depth + 1, visit) {
                return false;
            }
            if self.solutions == solutions_before {
                self.stats.backtracks += 1;
            }
        }
        self.gamma[e] = usize::MAX;
        true
    }
}

/// First grid in backtracking order, if any exists.
pub fn find_grid<T: BoxStructured + ?Sized>(t: &T) -> Option<SolutionGrid> {
    find_grid_with_stats(t).0
}

pub fn find_grid_with_stats<T: BoxStructured + ?Sized>(t: &T) -> (Option<SolutionGrid>, SearchStats) {
    let mut search = Search::new(t.grid());
    let mut found = None;
    search.run(0, &mut |gamma| {
        found = Some(SolutionGrid(gamma.to_vec()));
        false
    });
    (found, search.stats)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridEnumeration {
    pub grids: Vec<SolutionGrid>,
    /// More grids exist beyond `cap`.
    pub truncated: bool,
}

/// Up to `cap` grids in backtracking order.
pub fn enumerate_grids<T: BoxStructured + ?Sized>(t: &T, cap: usize) -> GridEnumeration {
    let mut search = Search::new(t.grid());
    let mut grids = Vec::new();
    let mut truncated = false;
    search.run(0, &mut |gamma| {
        if grids.len() == cap {
            truncated = true;
            return false;
        }
        grids.push(SolutionGrid(gamma.to_vec()));
        true
    });
    GridEnumeration { grids, truncated }
}

/// Number of grids, stopping at `cap` (returns `(count, truncated)`).
pub fn count_grids<T: BoxStructured + ?Sized>(t: &T, cap: usize) -> (usize, bool) {
    let mut search = Search::new(t.grid());
    let mut count = 0;
    let mut truncated = false;
    search.run(0, &mut |_| {
        if count == cap {
            truncated = true;
            return false;
        }
        count += 1;
        true
    });
    (count, truncated)
}

/// Total assignment glued from a grid. Variables that occur in no equation
/// are set to false and listed in `free`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Indexed by `var - 1`.
    pub values: Vec<bool>,
    pub free: Vec<u32>,
}

impl Witness {
    pub fn value(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    /// DIMACS `v` lines, ten literals per line, closed by `0`.
    pub fn v_lines(&self) -> Vec<String> {
        let lits: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &b)| {
                let v = k as i64 + 1;
                (if b { v } else { -v }).to_string()
            })
            .collect();
        let mut lines: Vec<String> = lits
            .chunks(10)
            .map(|chunk| format!("v {}", chunk.join(" ")))
            .collect();
        match lines.last_mut() {
            Some(last) => last.push_str(" 0"),
            None => lines.push("v 0".into()),
        }
        lines
    }
}

pub fn glue(grid: &SolutionGrid, t: &CompatMatrix) -> Result<Witness> {
    let n = t.variable_count() as usize;
    if grid.rows().len() != t.equation_count() {
        return Err(Error::Contract(format!(
            "grid has {} rows for {} equations",
            grid.rows().len(),
            t.equation_count()
        )));
    }
    let mut values: Vec<Option<bool>> = vec![None; n];
    for (i, &alpha) in grid.rows().iter().enumerate() {
        let row = t.rows(i).get(alpha).ok_or_else(|| {
            Error::Contract(format!("row {alpha} out of range for equation {i}"))
        })?;
        for (var, b) in row.iter() {
            let slot = &mut values[var as usize - 1];
            match *slot {
                Some(prev) if prev != b => {
                    return Err(Error::Contract(format!(
                        "grid rows disagree on x{var} (equation {i}, row {alpha})"
                    )))
                }
                _ => *slot = Some(b),
            }
        }
    }
    let free = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_none())
        .map(|(k, _)| k as u32 + 1)
        .collect();
    Ok(Witness {
        values: values.into_iter().map(|v| v.unwrap_or(false)).collect(),
        free,
    })
}

/// Surviving true cells with no grid through them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimEvidence {
    pub true_cells: usize,
    /// Diagonal cells still true, per equation.
    pub surviving_rows: Vec<usize>,
    /// `(i, j, true cells)` for every non-empty box with `i <= j`.
    pub box_census: Vec<(usize, usize, usize)>,
}

impl ClaimEvidence {
    pub fn from_grid(grid: &BoxGrid) -> Self {
        let m = grid.equation_count();
        let mut box_census = Vec::new();
        for i in 0..m {
            for j in i..m {
                let c = grid.get_box(i, j).count_true();
                if c > 0 {
                    box_census.push((i, j, c));
                }
            }
        }
        ClaimEvidence {
            true_cells: grid.count_true(),
            surviving_rows: (0..m)
                .map(|i| (0..grid.sizes()[i]).filter(|&a| grid.diag(i, a)).count())
                .collect(),
            box_census,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Unsat,
    Sat { witness: Witness, grid: SolutionGrid },
    /// Cells survived depletion but no grid extends them.
    ClaimViolated { evidence: ClaimEvidence },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Unsat => "UNSAT",
            Verdict::Sat { .. } => "SAT",
            Verdict::ClaimViolated { .. } => "CLAIM_VIOLATED",
        }
    }

    /// `Some(true)` for SAT, `Some(false)` for UNSAT, `None` when the claim failed.
    pub fn satisfiable(&self) -> Option<bool> {
        match self {
            Verdict::Unsat => Some(false),
            Verdict::Sat { .. } => Some(true),
            Verdict::ClaimViolated { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub verdict: Verdict,
    /// Some cell of the matrix is true.
    pub any_true: bool,
    /// Some diagonal cell is true (the OR-of-diagonal resolution bit).
    pub diagonal_true: bool,
    pub search: SearchStats,
}

impl Decision {
    /// At a fixpoint the two emptiness tests must agree.
    pub fn tests_agree(&self) -> bool {
        self.any_true == self.diagonal_true
    }
}

/// Classify a depleted matrix.
///
/// All-false is UNSAT (depletion never removes a grid cell). Otherwise a
/// grid is searched for; if none exists the surviving cells are reported
/// as [`Verdict::ClaimViolated`].
pub fn decide(t: &CompatMatrix) -> Decision {
    let grid = t.grid();
    let any_true = grid.any_true();
    let diagonal_true = grid.any_diagonal_true();
    if t.equation_count() == 0 {
        let witness = glue(&SolutionGrid(Vec::new()), t).expect("empty grid glues");
        return Decision {
            verdict: Verdict::Sat { witness, grid: SolutionGrid(Vec::new()) },
            any_true,
            diagonal_true,
            search: SearchStats::default(),
        };
    }
    if !any_true {
        return Decision {
            verdict: Verdict::Unsat,
            any_true,
            diagonal_true,
            search: SearchStats::default(),
        };
    }
    let (found, search) = find_grid_with_stats(t);
    let verdict = match found {
        Some(g) => {
            let witness = glue(&g, t).expect("a verified grid is pairwise compatible");
            Verdict::Sat { witness, grid: g }
        }
        None => Verdict::ClaimViolated {
            evidence: ClaimEvidence::from_grid(grid),
        },
    };
    Decision {
        verdict,
        any_true,
        diagonal_true,
        search,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::build_compat_matrix;
    use crate::deplete::{deplete, DepleteOptions};
    use crate::formula::{cnf_to_system, CnfFormula};

    fn depleted(clauses: &[&[i64]]) -> (CnfFormula, CompatMatrix) {
        let f = CnfFormula::from_dimacs_clauses(clauses).unwrap();
        let mut t = build_compat_matrix(&cnf_to_system(&f).unwrap(), 24).unwrap();
        deplete(&mut t, &DepleteOptions::default());
        (f, t)
    }

    fn models(f: &CnfFormula) -> Vec<Vec<bool>> {
        let n = f.variable_count() as usize;
        (0..1u32 << n)
            .map(|bits| (0..n).map(|k| bits >> k & 1 == 1).collect::<Vec<_>>())
            .filter(|a| f.eval(a))
            .collect()
    }

    #[test]
    fn all_false_has_no_grid() {
        let g = BoxGrid::from_fn(vec![2, 2], |_, _, _, _| false);
        assert_eq!(find_grid(&g), None);
    }

    #[test]
    fn single_equation_grid_is_diagonal_row() {
        let g = BoxGrid::from_fn(vec![4], |_, _, a, b| a == b && a == 2);
        assert_eq!(find_grid(&g), Some(SolutionGrid(vec![2])));
    }

    #[test]
    fn found_grid_glues_to_model() {
        let (f, t) = depleted(&[&[1, 2], &[-1, 2]]);
        let g = find_grid(&t).unwrap();
        assert!(g.verify(t.grid()));
        let w = glue(&g, &t).unwrap();
        assert!(f.eval(&w.values));
        assert!(models(&f).contains(&w.values));
    }

    #[test]
    fn glue_cases() {
        let (_, t) = depleted(&[&[1], &[2]]);
        let w = glue(&find_grid(&t).unwrap(), &t).unwrap();
        assert_eq!(w.values, vec![true, true]);
        assert!(w.free.is_empty());

        let (f, t) = depleted(&[&[1, 2], &[1, -2]]);
        // pick the rows with x1 = T in both tables
        let rows: Vec<usize> = (0..2)
            .map(|i| t.rows(i).iter().position(|r| r.get(1) == Some(true)).unwrap())
            .collect();
        let g = SolutionGrid(rows);
        assert!(g.verify(t.grid()));
        let w = glue(&g, &t).unwrap();
        assert!(w.value(1) && f.eval(&w.values));

        let (_, t) = depleted(&[&[1, -2, 3]]);
        let w = glue(&SolutionGrid(vec![4]), &t).unwrap();
        let row = &t.rows(0)[4];
        assert!(row.iter().all(|(v, b)| w.value(v) == b));
    }

    #[test]
    fn glue_rejects_incompatible_rows() {
        let f = CnfFormula::from_dimacs_clauses(&[&[1], &[-1]]).unwrap();
        let t = build_compat_matrix(&cnf_to_system(&f).unwrap(), 24).unwrap();
        assert!(matches!(glue(&SolutionGrid(vec![0, 0]), &t), Err(Error::Contract(_))));
    }

    #[test]
    fn free_variables_are_reported() {
        let f = CnfFormula::new(4, vec![crate::formula::Clause::from_dimacs(&[2, -3])]).unwrap();
        let t = build_compat_matrix(&cnf_to_system(&f).unwrap(), 24).unwrap();
        let d = decide(&t);
        let Verdict::Sat { witness, .. } = d.verdict else { panic!() };
        assert_eq!(witness.free, vec![1, 4]);
        assert!(!witness.value(1) && !witness.value(4));
        let sign = |v: u32| if witness.value(v) { v.to_string() } else { format!("-{v}") };
        assert_eq!(witness.v_lines(), vec![format!("v -1 {} {} -4 0", sign(2), sign(3))]);
    }

    #[test]
    fn enumeration_counts() {
        let (_, t) = depleted(&[&[1, 2]]);
        let e = enumerate_grids(&t, 100);
        assert_eq!(e.grids.len(), 3);
        assert!(!e.truncated);
        let e = enumerate_grids(&t, 2);
        assert_eq!(e.grids.len(), 2);
        assert!(e.truncated);
        assert_eq!(count_grids(&t, 3), (3, false));

        let (_, t) = depleted(&[&[1], &[-1]]);
        assert_eq!(enumerate_grids(&t, 100).grids.len(), 0);
    }

    #[test]
    fn grid_count_matches_model_count_and_survives_depletion() {
        let f = CnfFormula::from_dimacs_clauses(&[&[1, -2], &[2, 3], &[-1, -3, 2], &[3, 1]]).unwrap();
        let fresh = build_compat_matrix(&cnf_to_system(&f).unwrap(), 24).unwrap();
        let (_, t) = depleted(&[&[1, -2], &[2, 3], &[-1, -3, 2], &[3, 1]]);
        let expected = models(&f).len();
        assert_eq!(enumerate_grids(&fresh, 1000).grids, enumerate_grids(&t, 1000).grids);
        assert_eq!(count_grids(&t, 1000).0, expected);
    }

    #[test]
    fn decide_cases() {
        let (_, t) = depleted(&[&[1], &[-1]]);
        let d = decide(&t);
        assert_eq!(d.verdict, Verdict::Unsat);
        assert!(d.tests_agree());

        let (f, t) = depleted(&[&[1, 2]]);
        let d = decide(&t);
        let Verdict::Sat { witness, grid } = &d.verdict else { panic!("{d:?}") };
        assert!(f.eval(&witness.values));
        assert!(grid.verify(t.grid()));
        assert_eq!(d.search.backtracks, 0);
    }

    #[test]
    fn claim_violation_is_reported_when_no_grid_extends() {
        // 3-colouring K4: every triplet is path-consistent, yet no grid exists
        let g = BoxGrid::from_fn(vec![3; 4], |i, j, a, b| if i == j { a == b } else { a != b });
        assert!(crate::deplete::is_fixpoint(&g));
        assert_eq!(find_grid(&g), None);
        let ev = ClaimEvidence::from_grid(&g);
        assert_eq!(ev.true_cells, 4 * 3 + 12 * 6);
        assert_eq!(ev.surviving_rows, vec![3; 4]);
    }
}
