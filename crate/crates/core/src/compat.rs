//! The compatibility matrix: an m x m grid of boxes relating the satisfying
//! rows of every pair of equations.

use serde::Serialize;

use crate::boolmat::BoolMatrix;
use crate::error::Result;
use crate::formula::{satisfying_rows, BooleanSystem, PartialAssignment};

/// Square grid of Boolean boxes, `box(i, j)` sized `sizes[i] x sizes[j]`.
///
/// Both halves are stored. Writers go through [`BoxGrid::set_box`], which
/// keeps `box(j, i) == transpose(box(i, j))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxGrid {
    sizes: Vec<usize>,
    boxes: Vec<BoolMatrix>,
}

/// Address of one cell: row `alpha` of block row `i`, column `beta` of block column `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BoxCoord {
    pub i: usize,
    pub j: usize,
    pub alpha: usize,
    pub beta: usize,
}

impl BoxGrid {
    /// Build from a cell predicate evaluated on `i <= j`; the lower half is mirrored.
    pub fn from_fn(
        sizes: Vec<usize>,
        mut cell: impl FnMut(usize, usize, usize, usize) -> bool,
    ) -> Self {
        let m = sizes.len();
        let mut boxes = vec![BoolMatrix::new(0, 0); m * m];
        for i in 0..m {
            for j in i..m {
                let b = BoolMatrix::from_fn(sizes[i], sizes[j], |a, c| cell(i, j, a, c));
                if i != j {
                    boxes[j * m + i] = b.transpose();
                }
                boxes[i * m + j] = b;
            }
        }
        BoxGrid { sizes, boxes }
    }

    pub fn equation_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    #[inline]
    pub fn get_box(&self, i: usize, j: usize) -> &BoolMatrix {
        &self.boxes[i * self.sizes.len() + j]
    }

    /// Replace `box(i, j)` and its mirror.
    pub fn set_box(&mut self, i: usize, j: usize, value: BoolMatrix) {
        let m = self.sizes.len();
        assert_eq!(value.dims(), (self.sizes[i], self.sizes[j]), "box ({i}, {j}) dims");
        if i != j {
            self.boxes[j * m + i] = value.transpose();
        }
        self.boxes[i * m + j] = value;
    }

    /// Raw write to one stored box, bypassing the mirror. Test hook for
    /// exercising [`BoxGrid::verify_symmetry`].
    #[doc(hidden)]
    pub fn set_cell_unmirrored(&mut self, c: BoxCoord, value: bool) {
        let m = self.sizes.len();
        self.boxes[c.i * m + c.j].set(c.alpha, c.beta, value);
    }

    pub fn cell(&self, c: BoxCoord) -> bool {
        self.get_box(c.i, c.j).get(c.alpha, c.beta)
    }

    /// Diagonal cell `box(i, i)(alpha, alpha)`.
    pub fn diag(&self, i: usize, alpha: usize) -> bool {
        self.get_box(i, i).get(alpha, alpha)
    }

    pub fn count_true(&self) -> usize {
        self.boxes.iter().map(BoolMatrix::count_true).sum()
    }

    pub fn any_true(&self) -> bool {
        self.boxes.iter().any(|b| !b.is_all_false())
    }

    /// OR of all diagonal cells of all diagonal boxes.
    pub fn any_diagonal_true(&self) -> bool {
        (0..self.sizes.len()).any(|i| (0..self.sizes[i]).any(|a| self.diag(i, a)))
    }

    /// `box(j, i) == transpose(box(i, j))` for all pairs and every diagonal box is diagonal.
    pub fn verify_symmetry(&self) -> bool {
        let m = self.sizes.len();
        for i in 0..m {
            let d = self.get_box(i, i);
            if d.iter_true().any(|(a, b)| a != b) {
                return false;
            }
            for j in i + 1..m {
                if *self.get_box(j, i) != self.get_box(i, j).transpose() {
                    return false;
                }
            }
        }
        true
    }

    /// Cell-wise `self <= other`.
    pub fn is_subset_of(&self, other: &BoxGrid) -> bool {
        self.sizes == other.sizes
            && self
                .boxes
                .iter()
                .zip(&other.boxes)
                .all(|(a, b)| a.is_subset_of(b))
    }

    /// All true cells, ordered by `(i, j)` then row-major within the box.
    pub fn true_cells(&self) -> impl Iterator<Item = BoxCoord> + '_ {
        let m = self.sizes.len();
        (0..m * m).flat_map(move |k| {
            let (i, j) = (k / m, k % m);
            self.boxes[k]
                .iter_true()
                .map(move |(alpha, beta)| BoxCoord { i, j, alpha, beta })
        })
    }

    /// Structured dump of box dimensions and true cells (upper triangle only;
    /// the lower half is its transpose).
    pub fn snapshot(&self) -> Snapshot {
        let m = self.sizes.len();
        let mut boxes = Vec::new();
        for i in 0..m {
            for j in i..m {
                let b = self.get_box(i, j);
                boxes.push(BoxSnapshot {
                    i,
                    j,
                    rows: b.rows(),
                    cols: b.cols(),
                    true_cells: b.iter_true().collect(),
                });
            }
        }
        Snapshot {
            equation_count: m,
            row_counts: self.sizes.clone(),
            true_count: self.count_true(),
            boxes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub equation_count: usize,
    pub row_counts: Vec<usize>,
    pub true_count: usize,
    pub boxes: Vec<BoxSnapshot>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxSnapshot {
    pub i: usize,
    pub j: usize,
    pub rows: usize,
    pub cols: usize,
    pub true_cells: Vec<(usize, usize)>,
}

/// Access to the box grid of a structured matrix; implemented by both the
/// truth-assignment matrix and the lexicographical literal matrix so the
/// depletion engine and grid search can run on either.
pub trait BoxStructured {
    fn grid(&self) -> &BoxGrid;
    fn grid_mut(&mut self) -> &mut BoxGrid;
}

impl BoxStructured for BoxGrid {
    fn grid(&self) -> &BoxGrid {
        self
    }
    fn grid_mut(&mut self) -> &mut BoxGrid {
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatMatrix {
    grid: BoxGrid,
    row_tables: Vec<Vec<PartialAssignment>>,
    variable_count: u32,
}

impl BoxStructured for CompatMatrix {
    fn grid(&self) -> &BoxGrid {
        &self.grid
    }
    fn grid_mut(&mut self) -> &mut BoxGrid {
        &mut self.grid
    }
}

impl CompatMatrix {
    pub fn equation_count(&self) -> usize {
        self.grid.equation_count()
    }

    pub fn rows(&self, i: usize) -> &[PartialAssignment] {
        &self.row_tables[i]
    }

    pub fn row_tables(&self) -> &[Vec<PartialAssignment>] {
        &self.row_tables
    }

    pub fn variable_count(&self) -> u32 {
        self.variable_count
    }

    pub fn verify_symmetry(&self) -> bool {
        self.grid.verify_symmetry()
    }

    /// Equations without any satisfying row. Any such equation makes the system inconsistent.
    pub fn empty_equations(&self) -> Vec<usize> {
        (0..self.equation_count())
            .filter(|&i| self.row_tables[i].is_empty())
            .collect()
    }

    /// Row index of `assignment` (indexed by `var - 1`) in each equation's table.
    pub fn induced_grid(&self, assignment: &[bool]) -> Option<Vec<usize>> {
        self.row_tables
            .iter()
            .map(|rows| {
                rows.iter().position(|r| {
                    r.iter().all(|(v, b)| assignment[v as usize - 1] == b)
                })
            })
            .collect()
    }
}

pub fn rows_compatible(a: &PartialAssignment, b: &PartialAssignment) -> bool {
    a.compatible_with(b)
}

pub fn build_compat_matrix(system: &BooleanSystem, max_local_vars: usize) -> Result<CompatMatrix> {
    let row_tables = system
        .equations()
        .iter()
        .map(|e| satisfying_rows(e, max_local_vars))
        .collect::<Result<Vec<_>>>()?;
    let sizes = row_tables.iter().map(Vec::len).collect();
    let grid = BoxGrid::from_fn(sizes, |i, j, a, b| {
        if i == j {
            a == b
        } else {
            rows_compatible(&row_tables[i][a], &row_tables[j][b])
        }
    });
    Ok(CompatMatrix {
        grid,
        row_tables,
        variable_count: system.variable_count(),
    })
}
