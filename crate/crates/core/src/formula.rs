//! CNF formulas, general Boolean systems, DIMACS I/O and truth-table rows.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of local variables whose truth table may be enumerated.
pub const DEFAULT_MAX_LOCAL_VARS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Self {
        assert!(var >= 1, "variable ids start at 1");
        Literal { var, negated }
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, false)
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, true)
    }

    /// `3` is `x3`, `-3` is `not x3`. Zero is rejected.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 {
            return None;
        }
        let var = u32::try_from(value.unsigned_abs()).ok()?;
        Some(Literal::new(var, value < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn complement(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Truth value of the literal when its variable takes `value`.
    pub fn eval(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        assert!(!literals.is_empty(), "clauses must have at least one literal");
        Clause(literals)
    }

    pub fn from_dimacs(values: &[i64]) -> Self {
        Clause::new(
            values
                .iter()
                .map(|&v| Literal::from_dimacs(v).expect("zero is not a literal"))
                .collect(),
        )
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Evaluate under a total assignment indexed by `var - 1`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(assignment[l.var as usize - 1]))
    }

    fn literal_set(&self) -> BTreeSet<Literal> {
        self.0.iter().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfFormula {
    clauses: Vec<Clause>,
    variable_count: u32,
}

impl CnfFormula {
    pub fn new(variable_count: u32, clauses: Vec<Clause>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::Contract("a formula needs at least one clause".into()));
        }
        if let Some(l) = clauses
            .iter()
            .flat_map(|c| c.literals())
            .find(|l| l.var > variable_count)
        {
            return Err(Error::Contract(format!(
                "literal {l} exceeds variable count {variable_count}"
            )));
        }
        Ok(CnfFormula {
            clauses,
            variable_count,
        })
    }

    /// Convenience constructor from DIMACS-style integers; the variable count is the max id.
    pub fn from_dimacs_clauses(clauses: &[&[i64]]) -> Result<Self> {
        let clauses: Vec<Clause> = clauses.iter().map(|c| Clause::from_dimacs(c)).collect();
        let vars = clauses
            .iter()
            .flat_map(|c| c.literals())
            .map(|l| l.var)
            .max()
            .unwrap_or(0);
        Self::new(vars, clauses)
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Widest clause (`K`).
    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::len).max().unwrap_or(0)
    }

    /// Total number of literal occurrences.
    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn occurring_variables(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self
            .clauses
            .iter()
            .flat_map(|c| c.literals())
            .map(|l| l.var)
            .collect();
        set.into_iter().collect()
    }

    /// Evaluate under a total assignment indexed by `var - 1`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        assert!(assignment.len() >= self.variable_count as usize);
        self.clauses.iter().all(|c| c.eval(assignment))
    }

    /// Copy with the clause at `index` removed; `None` if it was the last clause.
    pub fn without_clause(&self, index: usize) -> Option<CnfFormula> {
        if self.clauses.len() <= 1 {
            return None;
        }
        let mut clauses = self.clauses.clone();
        clauses.remove(index);
        Some(CnfFormula {
            clauses,
            variable_count: self.variable_count,
        })
    }

    /// Copy with one literal dropped; `None` if that would empty the clause.
    pub fn without_literal(&self, clause: usize, literal: usize) -> Option<CnfFormula> {
        if self.clauses[clause].len() <= 1 {
            return None;
        }
        let mut clauses = self.clauses.clone();
        clauses[clause].0.remove(literal);
        Some(CnfFormula {
            clauses,
            variable_count: self.variable_count,
        })
    }

    pub fn to_dimacs(&self) -> String {
        self.to_dimacs_with_comments(&[])
    }

    pub fn to_dimacs_with_comments(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            for line in c.lines() {
                out.push_str("c ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out.push_str(&format!(
            "p cnf {} {}\n",
            self.variable_count,
            self.clauses.len()
        ));
        for clause in &self.clauses {
            for l in clause.literals() {
                out.push_str(&l.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> = c.literals().iter().map(Literal::to_string).collect();
                format!("({})", lits.join(" | "))
            })
            .collect();
        f.write_str(&parts.join(" & "))
    }
}

#[derive(Clone, Debug)]
pub struct ParsedDimacs {
    pub formula: CnfFormula,
    pub warnings: Vec<String>,
}

/// Parse DIMACS CNF. Header/body disagreements are warnings unless `strict`.
pub fn parse_dimacs(text: &str, strict: bool) -> Result<ParsedDimacs> {
    let mut header: Option<(u32, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut pending_line = 0;
    let mut warnings = Vec::new();

    let err = |line: usize, message: String| Error::Parse { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            // SATLIB end marker
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate problem line".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(err(line_no, format!("malformed problem line `{line}`")));
            }
            let vars = fields[2]
                .parse::<u32>()
                .map_err(|_| err(line_no, format!("bad variable count `{}`", fields[2])))?;
            let n = fields[3]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad clause count `{}`", fields[3])))?;
            header = Some((vars, n, line_no));
            continue;
        }
        if header.is_none() {
            return Err(err(line_no, "clause before problem line".into()));
        }
        for token in line.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| err(line_no, format!("malformed token `{token}`")))?;
            if value == 0 {
                if pending.is_empty() {
                    return Err(err(line_no, "empty clause".into()));
                }
                clauses.push(Clause::new(std::mem::take(&mut pending)));
            } else {
                if pending.is_empty() {
                    pending_line = line_no;
                }
                let lit = Literal::from_dimacs(value)
                    .ok_or_else(|| err(line_no, format!("variable id out of range `{token}`")))?;
                pending.push(lit);
            }
        }
    }

    let Some((header_vars, header_clauses, header_line)) = header else {
        return Err(err(text.lines().count().max(1), "missing problem line".into()));
    };
    if !pending.is_empty() {
        let msg = "clause not terminated by 0".to_string();
        if strict {
            return Err(err(pending_line, msg));
        }
        warnings.push(format!("line {pending_line}: {msg}"));
        clauses.push(Clause::new(pending));
    }
    if clauses.is_empty() {
        return Err(err(header_line, "formula has no clauses".into()));
    }
    let max_var = clauses
        .iter()
        .flat_map(|c| c.literals())
        .map(|l| l.var)
        .max()
        .unwrap_or(0);
    if clauses.len() != header_clauses {
        let msg = format!(
            "header declares {header_clauses} clauses, found {}",
            clauses.len()
        );
        if strict {
            return Err(err(header_line, msg));
        }
        warnings.push(format!("line {header_line}: {msg}"));
    }
    if max_var > header_vars {
        let msg = format!("header declares {header_vars} variables, found id {max_var}");
        if strict {
            return Err(err(header_line, msg));
        }
        warnings.push(format!("line {header_line}: {msg}"));
    }
    let formula = CnfFormula::new(header_vars.max(max_var), clauses)?;
    Ok(ParsedDimacs { formula, warnings })
}

/// Violations of the two normality conditions (distinct clauses, distinct
/// variables within each clause). Clause indexes are 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NormalityReport {
    pub duplicate_clauses: Vec<(usize, usize)>,
    pub repeated_literals: Vec<usize>,
    pub complementary_literals: Vec<usize>,
}

impl NormalityReport {
    pub fn is_clean(&self) -> bool {
        self.duplicate_clauses.is_empty()
            && self.repeated_literals.is_empty()
            && self.complementary_literals.is_empty()
    }
}

impl fmt::Display for NormalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return f.write_str("normal");
        }
        let mut parts = Vec::new();
        for (a, b) in &self.duplicate_clauses {
            parts.push(format!("clauses {} and {} are duplicates", a + 1, b + 1));
        }
        for c in &self.repeated_literals {
            parts.push(format!("clause {} repeats a literal", c + 1));
        }
        for c in &self.complementary_literals {
            parts.push(format!("clause {} contains complementary literals", c + 1));
        }
        f.write_str(&parts.join("; "))
    }
}

pub fn validate_normality(f: &CnfFormula) -> NormalityReport {
    let mut report = NormalityReport::default();
    let mut seen: HashMap<BTreeSet<Literal>, usize> = HashMap::new();
    for (i, clause) in f.clauses().iter().enumerate() {
        let mut polarity: HashMap<u32, bool> = HashMap::new();
        let mut repeated = false;
        let mut complementary = false;
        for l in clause.literals() {
            match polarity.insert(l.var, l.negated) {
                Some(prev) if prev == l.negated => repeated = true,
                Some(_) => complementary = true,
                None => {}
            }
        }
        if repeated {
            report.repeated_literals.push(i);
        }
        if complementary {
            report.complementary_literals.push(i);
        }
        if let Some(&first) = seen.get(&clause.literal_set()) {
            report.duplicate_clauses.push((first, i));
        } else {
            seen.insert(clause.literal_set(), i);
        }
    }
    report
}

/// Merge repeated literals and drop duplicate clauses. Tautological clauses
/// are not repaired; they are reported as an error.
pub fn repair_normality(f: &CnfFormula) -> Result<CnfFormula> {
    let report = validate_normality(f);
    if !report.complementary_literals.is_empty() {
        return Err(Error::NotNormal(NormalityReport {
            complementary_literals: report.complementary_literals,
            ..Default::default()
        }));
    }
    let mut seen = BTreeSet::new();
    let mut clauses = Vec::new();
    for clause in f.clauses() {
        let mut lits = Vec::new();
        for &l in clause.literals() {
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        let clause = Clause::new(lits);
        if seen.insert(clause.literal_set()) {
            clauses.push(clause);
        }
    }
    CnfFormula::new(f.variable_count(), clauses)
}

fn require_normal(f: &CnfFormula) -> Result<()> {
    let report = validate_normality(f);
    if report.is_clean() {
        Ok(())
    } else {
        Err(Error::NotNormal(report))
    }
}

type Predicate = Arc<dyn Fn(&[bool]) -> bool + Send + Sync>;

/// One equation `g_i(vars) = h_i(vars)` of a Boolean system, kept as an
/// oracle over its local variables. The predicate receives values aligned
/// with [`BooleanEquation::variables`], which are sorted ascending.
#[derive(Clone)]
pub struct BooleanEquation {
    variables: Vec<u32>,
    predicate: Predicate,
    label: String,
}

impl BooleanEquation {
    pub fn new(
        variables: Vec<u32>,
        label: impl Into<String>,
        predicate: impl Fn(&[bool]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::Contract("an equation needs at least one variable".into()));
        }
        if variables.contains(&0) {
            return Err(Error::Contract("variable ids start at 1".into()));
        }
        if variables.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Contract(format!(
                "equation variables must be strictly ascending, got {variables:?}"
            )));
        }
        Ok(BooleanEquation {
            variables,
            predicate: Arc::new(predicate),
            label: label.into(),
        })
    }

    /// `clause = true`. The clause must not mention a variable twice.
    pub fn from_clause(clause: &Clause) -> Result<Self> {
        let mut vars: Vec<u32> = clause.literals().iter().map(|l| l.var).collect();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() != clause.len() {
            return Err(Error::Contract(format!(
                "clause mentions a variable twice: {clause:?}"
            )));
        }
        let polarity: Vec<(usize, bool)> = clause
            .literals()
            .iter()
            .map(|l| (vars.binary_search(&l.var).unwrap(), l.negated))
            .collect();
        let label = clause
            .literals()
            .iter()
            .map(|l| l.to_dimacs().to_string())
            .collect::<Vec<_>>()
            .join(" ");
        Self::new(vars, format!("clause({label})"), move |values| {
            polarity.iter().any(|&(pos, neg)| values[pos] != neg)
        })
    }

    /// Exactly one of the (ascending) variables is true.
    pub fn exactly_one(variables: Vec<u32>) -> Result<Self> {
        let label = format!("exactly-one{variables:?}");
        Self::new(variables, label, |values| {
            values.iter().filter(|&&v| v).count() == 1
        })
    }

    pub fn variables(&self) -> &[u32] {
        &self.variables
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn holds(&self, values: &[bool]) -> bool {
        debug_assert_eq!(values.len(), self.variables.len());
        (self.predicate)(values)
    }

    /// Evaluate under a total assignment indexed by `var - 1`.
    pub fn holds_under(&self, assignment: &[bool]) -> bool {
        let values: Vec<bool> = self
            .variables
            .iter()
            .map(|&v| assignment[v as usize - 1])
            .collect();
        self.holds(&values)
    }
}

impl fmt::Debug for BooleanEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BooleanEquation")
            .field("variables", &self.variables)
            .field("label", &self.label)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub struct BooleanSystem {
    equations: Vec<BooleanEquation>,
    variable_count: u32,
}

impl BooleanSystem {
    pub fn new(variable_count: u32, equations: Vec<BooleanEquation>) -> Result<Self> {
        if let Some(eq) = equations
            .iter()
            .find(|e| e.variables.iter().any(|&v| v > variable_count))
        {
            return Err(Error::Contract(format!(
                "equation {} uses a variable above {variable_count}",
                eq.label
            )));
        }
        Ok(BooleanSystem {
            equations,
            variable_count,
        })
    }

    pub fn equations(&self) -> &[BooleanEquation] {
        &self.equations
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    /// Largest equation arity (`n`).
    pub fn max_arity(&self) -> usize {
        self.equations.iter().map(BooleanEquation::arity).max().unwrap_or(0)
    }

    pub fn occurring_variables(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self
            .equations
            .iter()
            .flat_map(|e| e.variables.iter().copied())
            .collect();
        set.into_iter().collect()
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.equations.iter().all(|e| e.holds_under(assignment))
    }
}

/// One equation per clause. Rejects formulas violating normality.
pub fn cnf_to_system(f: &CnfFormula) -> Result<BooleanSystem> {
    require_normal(f)?;
    let equations = f
        .clauses()
        .iter()
        .map(BooleanEquation::from_clause)
        .collect::<Result<Vec<_>>>()?;
    BooleanSystem::new(f.variable_count(), equations)
}

/// Values for exactly one equation's local variables (one truth-table row).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PartialAssignment {
    variables: Vec<u32>,
    values: Vec<bool>,
}

impl PartialAssignment {
    /// `variables` must be strictly ascending and match `values` in length.
    pub fn new(variables: Vec<u32>, values: Vec<bool>) -> Self {
        assert_eq!(variables.len(), values.len());
        debug_assert!(variables.windows(2).all(|w| w[0] < w[1]));
        PartialAssignment { variables, values }
    }

    pub fn variables(&self) -> &[u32] {
        &self.variables
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, var: u32) -> Option<bool> {
        self.variables
            .binary_search(&var)
            .ok()
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.variables.iter().copied().zip(self.values.iter().copied())
    }

    /// True iff every variable defined in both has the same value.
    pub fn compatible_with(&self, other: &PartialAssignment) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.variables.len() && j < other.variables.len() {
            match self.variables[i].cmp(&other.variables[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if self.values[i] != other.values[j] {
                        return false;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        true
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(v, b)| format!("x{v}={}", if b { 'T' } else { 'F' }))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The rows of the equation's truth table on which it holds, in
/// lexicographic order over its sorted variables (false before true).
pub fn satisfying_rows(e: &BooleanEquation, max_local_vars: usize) -> Result<Vec<PartialAssignment>> {
    let n = e.arity();
    if n > max_local_vars {
        return Err(Error::Capacity {
            what: "equation arity",
            actual: n,
            limit: max_local_vars,
        });
    }
    let mut rows = Vec::new();
    let mut values = vec![false; n];
    for index in 0u64..(1u64 << n) {
        for (k, v) in values.iter_mut().enumerate() {
            *v = (index >> (n - 1 - k)) & 1 == 1;
        }
        if e.holds(&values) {
            rows.push(PartialAssignment::new(e.variables.clone(), values.clone()));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> CnfFormula {
        parse_dimacs(text, true).unwrap().formula
    }

    #[test]
    fn parse_smallest() {
        let f = parse("p cnf 1 1\n1 0");
        assert_eq!(f.variable_count(), 1);
        assert_eq!(f.clauses(), &[Clause::from_dimacs(&[1])]);
    }

    #[test]
    fn parse_contradiction() {
        let f = parse("c comment\np cnf 1 2\n1 0\n-1 0\n");
        assert_eq!(f.clauses(), &[Clause::from_dimacs(&[1]), Clause::from_dimacs(&[-1])]);
    }

    #[test]
    fn parse_round_trip() {
        let text = "p cnf 3 2\n1 -2 3 0\n2 3 0\n";
        let f = parse(text);
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.max_width(), 3);
        assert_eq!(f.to_dimacs().replace(" 0", "0").replace(' ', ""),
            text.replace(" 0", "0").replace(' ', ""));
        assert_eq!(parse(&f.to_dimacs()), f);
    }

    #[test]
    fn parse_clause_spanning_lines() {
        let f = parse("p cnf 3 1\n1 2\n3 0\n");
        assert_eq!(f.clauses()[0].len(), 3);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("p cnf 2 1\n1 x 0\n", 2, "malformed token"),
            ("p cnf 2 2\n1 0\n0\n", 3, "empty clause"),
            ("1 0\n", 1, "before problem line"),
            ("p cnf two 1\n1 0\n", 1, "bad variable count"),
        ];
        for (text, line, needle) in cases {
            match parse_dimacs(text, false) {
                Err(Error::Parse { line: l, message }) => {
                    assert_eq!(l, line, "{text:?}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn header_mismatch_warns_or_fails() {
        let text = "p cnf 2 3\n1 0\n-2 0\n";
        let parsed = parse_dimacs(text, false).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.formula.num_clauses(), 2);
        assert!(matches!(parse_dimacs(text, true), Err(Error::Parse { line: 1, .. })));

        let parsed = parse_dimacs("p cnf 1 1\n3 0\n", false).unwrap();
        assert_eq!(parsed.formula.variable_count(), 3);
        assert!(parse_dimacs("p cnf 1 1\n3 0\n", true).is_err());
    }

    #[test]
    fn normality_reports() {
        let clean = CnfFormula::from_dimacs_clauses(&[&[1, 2], &[-1]]).unwrap();
        assert!(validate_normality(&clean).is_clean());

        let dup = CnfFormula::from_dimacs_clauses(&[&[1], &[1]]).unwrap();
        assert_eq!(validate_normality(&dup).duplicate_clauses, vec![(0, 1)]);

        let dup_reordered = CnfFormula::from_dimacs_clauses(&[&[1, -2], &[-2, 1]]).unwrap();
        assert_eq!(validate_normality(&dup_reordered).duplicate_clauses, vec![(0, 1)]);

        let taut = CnfFormula::from_dimacs_clauses(&[&[1, -1, 2]]).unwrap();
        let report = validate_normality(&taut);
        assert_eq!(report.complementary_literals, vec![0]);
        assert!(cnf_to_system(&taut).is_err());
    }

    #[test]
    fn repair_merges_and_rejects_tautologies() {
        let f = CnfFormula::from_dimacs_clauses(&[&[1, 1, 2], &[2, 1], &[-3]]).unwrap();
        let repaired = repair_normality(&f).unwrap();
        assert_eq!(
            repaired.clauses(),
            &[Clause::from_dimacs(&[1, 2]), Clause::from_dimacs(&[-3])]
        );
        let taut = CnfFormula::from_dimacs_clauses(&[&[1, -1]]).unwrap();
        assert!(matches!(repair_normality(&taut), Err(Error::NotNormal(_))));
    }

    #[test]
    fn cnf_to_system_rows() {
        let sys = cnf_to_system(&CnfFormula::from_dimacs_clauses(&[&[1]]).unwrap()).unwrap();
        let rows = satisfying_rows(&sys.equations()[0], 24).unwrap();
        assert_eq!(rows, vec![PartialAssignment::new(vec![1], vec![true])]);

        let sys = cnf_to_system(&CnfFormula::from_dimacs_clauses(&[&[2, 1]]).unwrap()).unwrap();
        assert_eq!(sys.max_arity(), 2);
        let rows = satisfying_rows(&sys.equations()[0], 24).unwrap();
        let values: Vec<_> = rows.iter().map(|r| r.values().to_vec()).collect();
        assert_eq!(values, vec![vec![false, true], vec![true, false], vec![true, true]]);

        let f = CnfFormula::from_dimacs_clauses(&[&[1, -2, 3]]).unwrap();
        let sys = cnf_to_system(&f).unwrap();
        let eq = &sys.equations()[0];
        let brute = (0..8u32)
            .filter(|bits| {
                let a: Vec<bool> = (0..3).map(|k| bits >> k & 1 == 1).collect();
                f.eval(&a)
            })
            .count();
        assert_eq!(brute, 7);
        assert_eq!(satisfying_rows(eq, 24).unwrap().len(), brute);
    }

    #[test]
    fn tautology_and_exactly_one_rows() {
        let taut = BooleanEquation::new(vec![1], "x|!x", |v| v[0] || !v[0]).unwrap();
        assert_eq!(satisfying_rows(&taut, 24).unwrap().len(), 2);

        let eo = BooleanEquation::exactly_one(vec![1, 2, 3]).unwrap();
        let rows = satisfying_rows(&eo, 24).unwrap();
        let values: Vec<_> = rows.iter().map(|r| r.values().to_vec()).collect();
        assert_eq!(
            values,
            vec![vec![false, false, true], vec![false, true, false], vec![true, false, false]]
        );
    }

    #[test]
    fn satisfying_rows_guard() {
        let eq = BooleanEquation::exactly_one((1..=5).collect()).unwrap();
        assert!(matches!(
            satisfying_rows(&eq, 4),
            Err(Error::Capacity { actual: 5, limit: 4, .. })
        ));
    }

    #[test]
    fn equation_validation() {
        assert!(BooleanEquation::new(vec![], "empty", |_| true).is_err());
        assert!(BooleanEquation::new(vec![2, 1], "unsorted", |_| true).is_err());
        assert!(BooleanEquation::new(vec![1, 1], "dup", |_| true).is_err());
        let eq = BooleanEquation::exactly_one(vec![1, 5]).unwrap();
        assert!(BooleanSystem::new(4, vec![eq]).is_err());
    }

    #[test]
    fn compatibility_of_rows() {
        let a = PartialAssignment::new(vec![1], vec![true]);
        let b = PartialAssignment::new(vec![2], vec![false]);
        let c = PartialAssignment::new(vec![1], vec![false]);
        assert!(a.compatible_with(&b));
        assert!(!a.compatible_with(&c));
        let d = PartialAssignment::new(vec![1, 2], vec![true, false]);
        let e = PartialAssignment::new(vec![2, 3], vec![false, true]);
        assert!(d.compatible_with(&e));
        assert_eq!(d.get(2), Some(false));
        assert_eq!(d.get(3), None);
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        proptest::collection::vec(
            proptest::collection::btree_map(1u32..=6, any::<bool>(), 1..=4),
            1..8,
        )
        .prop_map(|clauses| {
            let clauses = clauses
                .into_iter()
                .map(|m| Clause::new(m.into_iter().map(|(v, n)| Literal::new(v, n)).collect()))
                .collect();
            CnfFormula::new(6, clauses).unwrap()
        })
    }

    proptest! {
        #[test]
        fn dimacs_round_trip(f in arb_formula()) {
            prop_assert_eq!(parse(&f.to_dimacs()), f);
        }

        #[test]
        fn rows_partition_truth_table(vars in 1usize..=6, table in any::<u64>()) {
            let eq = BooleanEquation::new((1..=vars as u32).collect(), "table", move |v| {
                let idx = v.iter().fold(0usize, |acc, &b| acc * 2 + b as usize);
                table >> idx & 1 == 1
            }).unwrap();
            let rows = satisfying_rows(&eq, 24).unwrap();
            let falsifying = (0..1usize << vars).filter(|i| table >> i & 1 == 0).count();
            prop_assert_eq!(rows.len() + falsifying, 1 << vars);
            prop_assert!(rows.windows(2).all(|w| w[0].values() < w[1].values()));
        }
    }
}
