//! End-to-end constructions on CNF: clause splitting to width three, the
//! OR-of-diagonal resolution bit, the literal-level (lexicographical)
//! compatibility matrix, implicant search and its exactly-one re-encoding.

use std::ops::Range;

use serde::Serialize;

use crate::compat::{build_compat_matrix, BoxGrid, BoxStructured, CompatMatrix};
use crate::deplete::{deplete, DepleteOptions, DepletionOutcome};
use crate::error::Result;
use crate::formula::{
    cnf_to_system, BooleanEquation, BooleanSystem, Clause, CnfFormula, Literal,
    DEFAULT_MAX_LOCAL_VARS,
};
use crate::grids::{decide, enumerate_grids, find_grid, Decision, Verdict};

/// Result of splitting every clause wider than three literals into a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionMap {
    pub reduced: CnfFormula,
    /// Variables `1..=original_vars` are the source's; the rest are auxiliary.
    pub original_vars: u32,
    pub aux_vars: Range<u32>,
    /// Produced clause indexes for each source clause.
    pub produced: Vec<Range<usize>>,
}

impl ReductionMap {
    /// Restrict a model of the reduced formula to the source variables.
    pub fn restrict(&self, model: &[bool]) -> Vec<bool> {
        model[..self.original_vars as usize].to_vec()
    }

    /// DIMACS text with the auxiliary-variable map in the comment header.
    pub fn to_dimacs(&self) -> String {
        let mut comments = vec![format!(
            "reduced from {} clauses over {} variables",
            self.produced.len(),
            self.original_vars
        )];
        if self.aux_vars.is_empty() {
            comments.push("no auxiliary variables".into());
        } else {
            comments.push(format!(
                "auxiliary variables {}..{}",
                self.aux_vars.start,
                self.aux_vars.end - 1
            ));
        }
        let mut aux = self.aux_vars.start;
        for (source, range) in self.produced.iter().enumerate() {
            let count = range.len().saturating_sub(1) as u32;
            if count > 0 {
                comments.push(format!(
                    "aux {}..{} split source clause {}",
                    aux,
                    aux + count - 1,
                    source + 1
                ));
                aux += count;
            }
        }
        self.reduced.to_dimacs_with_comments(&comments)
    }
}

/// Split clauses with more than three literals:
/// `(q1 | .. | qk)` becomes `(q1 | q2 | y1) & (-y1 | q3 | y2) & .. & (-y(k-3) | q(k-1) | qk)`.
pub fn cook_reduce(f: &CnfFormula) -> ReductionMap {
    let original_vars = f.variable_count();
    let mut next = original_vars + 1;
    let mut clauses = Vec::new();
    let mut produced = Vec::with_capacity(f.num_clauses());
    for clause in f.clauses() {
        let start = clauses.len();
        let q = clause.literals();
        if q.len() <= 3 {
            clauses.push(clause.clone());
        } else {
            let k = q.len();
            let mut y = next;
            clauses.push(Clause::new(vec![q[0], q[1], Literal::pos(y)]));
            for lit in &q[2..k - 2] {
                clauses.push(Clause::new(vec![Literal::neg(y), *lit, Literal::pos(y + 1)]));
                y += 1;
            }
            clauses.push(Clause::new(vec![Literal::neg(y), q[k - 2], q[k - 1]]));
            next = y + 1;
        }
        produced.push(start..clauses.len());
    }
    let reduced = CnfFormula::new(next - 1, clauses).expect("reduction keeps at least one clause");
    ReductionMap {
        reduced,
        original_vars,
        aux_vars: original_vars + 1..next,
        produced,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub deplete: DepleteOptions,
    pub max_local_vars: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            deplete: DepleteOptions::default(),
            max_local_vars: DEFAULT_MAX_LOCAL_VARS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solved {
    pub matrix: CompatMatrix,
    pub depletion: DepletionOutcome,
    pub decision: Decision,
}

/// Build, deplete and decide a CNF formula (one equation per clause).
///
/// With early stop enabled the matrix may be returned before the fixpoint;
/// `decide` then falls back to grid search over whatever survived.
pub fn solve_cnf(f: &CnfFormula, opts: &SolveOptions) -> Result<Solved> {
    let system = cnf_to_system(f)?;
    solve_system(&system, opts)
}

pub fn solve_system(system: &BooleanSystem, opts: &SolveOptions) -> Result<Solved> {
    let mut matrix = build_compat_matrix(system, opts.max_local_vars)?;
    let depletion = deplete(&mut matrix, &opts.deplete);
    let decision = if depletion.stopped_early {
        Decision {
            verdict: Verdict::Unsat,
            any_true: matrix.grid().any_true(),
            diagonal_true: matrix.grid().any_diagonal_true(),
            search: Default::default(),
        }
    } else {
        decide(&matrix)
    };
    Ok(Solved {
        matrix,
        depletion,
        decision,
    })
}

/// OR of the diagonal of the general solution of the width-three reduction.
/// This is the method's own satisfiability bit; [`decide`] stays authoritative.
pub fn resolution_function(f: &CnfFormula, max_local_vars: usize) -> Result<bool> {
    let reduction = cook_reduce(f);
    let system = cnf_to_system(&reduction.reduced)?;
    let mut matrix = build_compat_matrix(&system, max_local_vars)?;
    deplete(&mut matrix, &DepleteOptions::default());
    Ok(matrix.grid().any_diagonal_true())
}

/// Literal-level compatibility matrix: box `(p, q)` is `k_p x k_q`, a cell is
/// true when the two literals are not complementary, diagonal boxes are identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexMatrix {
    grid: BoxGrid,
    literals: Vec<Vec<Literal>>,
}

impl BoxStructured for LexMatrix {
    fn grid(&self) -> &BoxGrid {
        &self.grid
    }
    fn grid_mut(&mut self) -> &mut BoxGrid {
        &mut self.grid
    }
}

impl LexMatrix {
    pub fn literals(&self, clause: usize) -> &[Literal] {
        &self.literals[clause]
    }

    /// Total cell count, `(sum k_p)^2`.
    pub fn cell_count(&self) -> usize {
        let total: usize = self.grid.sizes().iter().sum();
        total * total
    }

    pub fn implicant(&self, selection: &[usize]) -> Implicant {
        Implicant {
            selection: selection.to_vec(),
            literals: selection
                .iter()
                .enumerate()
                .map(|(p, &a)| self.literals[p][a])
                .collect(),
        }
    }
}

pub fn build_lex_matrix(f: &CnfFormula) -> LexMatrix {
    let literals: Vec<Vec<Literal>> = f.clauses().iter().map(|c| c.literals().to_vec()).collect();
    let sizes = literals.iter().map(Vec::len).collect();
    let grid = BoxGrid::from_fn(sizes, |p, q, a, b| {
        if p == q {
            a == b
        } else {
            literals[p][a] != literals[q][b].complement()
        }
    });
    LexMatrix { grid, literals }
}

/// One literal chosen per clause, no two complementary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Implicant {
    pub selection: Vec<usize>,
    pub literals: Vec<Literal>,
}

impl Implicant {
    /// Extend to a total assignment (indexed by `var - 1`); unconstrained variables are false.
    pub fn to_assignment(&self, variable_count: u32) -> Vec<bool> {
        let mut values = vec![false; variable_count as usize];
        for l in &self.literals {
            values[l.var() as usize - 1] = !l.is_negated();
        }
        values
    }
}

pub fn find_implicant(f: &CnfFormula) -> Option<Implicant> {
    let lex = build_lex_matrix(f);
    find_grid(&lex).map(|g| lex.implicant(g.rows()))
}

/// All selections, up to `cap`.
pub fn enumerate_implicants(f: &CnfFormula, cap: usize) -> (Vec<Implicant>, bool) {
    let lex = build_lex_matrix(f);
    let e = enumerate_grids(&lex, cap);
    (
        e.grids.iter().map(|g| lex.implicant(g.rows())).collect(),
        e.truncated,
    )
}

/// Exactly-one encoding of the implicant search as a Boolean system.
#[derive(Clone, Debug)]
pub struct LexEncoding {
    pub system: BooleanSystem,
    /// `indicators[p][u]` is the variable standing for literal `u` of clause `p`.
    pub indicators: Vec<Vec<u32>>,
    pub exclusions: usize,
}

impl LexEncoding {
    /// Read the selection back out of a model of the encoded system.
    pub fn selection(&self, model: &[bool]) -> Option<Vec<usize>> {
        self.indicators
            .iter()
            .map(|vars| {
                let mut chosen = vars.iter().enumerate().filter(|(_, &v)| model[v as usize - 1]);
                match (chosen.next(), chosen.next()) {
                    (Some((u, _)), None) => Some(u),
                    _ => None,
                }
            })
            .collect()
    }
}

/// One indicator per literal occurrence, an exactly-one equation per clause
/// and `!a | !b` for each complementary pair across clauses.
pub fn lex_xor_encode(f: &CnfFormula) -> Result<LexEncoding> {
    let lex = build_lex_matrix(f);
    let mut next = 1u32;
    let indicators: Vec<Vec<u32>> = f
        .clauses()
        .iter()
        .map(|c| {
            let ids = (next..next + c.len() as u32).collect();
            next += c.len() as u32;
            ids
        })
        .collect();
    let mut equations = Vec::new();
    for ids in &indicators {
        equations.push(BooleanEquation::exactly_one(ids.clone())?);
    }
    let m = indicators.len();
    let mut exclusions = 0;
    for p in 0..m {
        for q in p + 1..m {
            let b = lex.grid().get_box(p, q);
            for a in 0..b.rows() {
                for c in 0..b.cols() {
                    if !b.get(a, c) {
                        let clause = Clause::new(vec![
                            Literal::neg(indicators[p][a]),
                            Literal::neg(indicators[q][c]),
                        ]);
                        equations.push(BooleanEquation::from_clause(&clause)?);
                        exclusions += 1;
                    }
                }
            }
        }
    }
    Ok(LexEncoding {
        system: BooleanSystem::new(next - 1, equations)?,
        indicators,
        exclusions,
    })
}

/// How much of the literal matrix survives depletion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LexSurvival {
    pub initial_true: usize,
    pub final_true: usize,
    pub sweeps: usize,
}

impl LexSurvival {
    pub fn ratio(&self) -> f64 {
        if self.initial_true == 0 {
            1.0
        } else {
            self.final_true as f64 / self.initial_true as f64
        }
    }
}

pub fn lex_survival(f: &CnfFormula) -> LexSurvival {
    let mut lex = build_lex_matrix(f);
    let out = deplete(&mut lex, &DepleteOptions::default());
    LexSurvival {
        initial_true: out.initial_true,
        final_true: out.final_true,
        sweeps: out.sweeps,
    }
}

/// Solve via the exactly-one encoding and map the verdict back to `f`.
pub fn solve_lex(f: &CnfFormula, opts: &SolveOptions) -> Result<(LexEncoding, Solved)> {
    let enc = lex_xor_encode(f)?;
    let solved = solve_system(&enc.system, opts)?;
    Ok((enc, solved))
}
