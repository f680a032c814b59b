//! Dense Boolean matrices with AND-OR algebra.
//!
//! Each row is packed into 64-bit words so the inner loop of the product is
//! a word-wise OR of rows of the right operand.

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BoolMatrix {
    /// All-false matrix. Either dimension may be zero.
    pub fn new(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD_BITS);
        BoolMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: bool) -> Self {
        let mut m = Self::new(rows, cols);
        if value {
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Square matrix with `diag` on the diagonal and false elsewhere.
    pub fn diagonal(diag: &[bool]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |r, c| r == c && diag[r])
    }

    /// Build from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "ragged rows in BoolMatrix::from_rows"
        );
        Self::from_fn(rows.len(), cols, |r, c| rows[r][c])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    fn check(&self, r: usize, c: usize) {
        assert!(
            r < self.rows && c < self.cols,
            "cell ({r}, {c}) out of bounds for {}x{} matrix",
            self.rows,
            self.cols
        );
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.check(r, c);
        let w = self.data[r * self.words_per_row + c / WORD_BITS];
        (w >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.check(r, c);
        let w = &mut self.data[r * self.words_per_row + c / WORD_BITS];
        let bit = 1u64 << (c % WORD_BITS);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// Boolean product: `(a*b)(i,j) = OR_v a(i,v) AND b(v,j)`.
    pub fn product(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        if self.cols != other.rows {
            return Err(self.mismatch("product", other));
        }
        Ok(self.product_unchecked(other))
    }

    pub(crate) fn product_unchecked(&self, other: &BoolMatrix) -> BoolMatrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = BoolMatrix::new(self.rows, other.cols);
        let wpr = out.words_per_row;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * wpr..(i + 1) * wpr];
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let v = wi * WORD_BITS + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    for (o, b) in out_row.iter_mut().zip(other.row_words(v)) {
                        *o |= *b;
                    }
                }
            }
        }
        out
    }

    /// Elementwise AND of two equally sized matrices.
    pub fn conjoin(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        let mut out = self.clone();
        out.conjoin_in_place(other)?;
        Ok(out)
    }

    /// `self &= other`, returning how many cells flipped from true to false.
    pub fn conjoin_in_place(&mut self, other: &BoolMatrix) -> Result<usize> {
        if self.dims() != other.dims() {
            return Err(self.mismatch("conjoin", other));
        }
        let mut flips = 0;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            let next = *a & *b;
            flips += (*a ^ next).count_ones() as usize;
            *a = next;
        }
        Ok(flips)
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut out = BoolMatrix::new(self.cols, self.rows);
        for (r, c) in self.iter_true() {
            out.set(c, r, true);
        }
        out
    }

    /// True iff no cell is set. Vacuously true for zero-dimension matrices.
    pub fn is_all_false(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_true(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// True cells in row-major order.
    pub fn iter_true(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| {
            self.row_words(r)
                .iter()
                .enumerate()
                .flat_map(move |(wi, &word)| {
                    let mut bits = word;
                    std::iter::from_fn(move || {
                        if bits == 0 {
                            return None;
                        }
                        let c = wi * WORD_BITS + bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        Some((r, c))
                    })
                })
        })
    }

    /// Cell-wise `self <= other`.
    pub fn is_subset_of(&self, other: &BoolMatrix) -> bool {
        self.dims() == other.dims() && self.data.iter().zip(&other.data).all(|(a, b)| a & !b == 0)
    }

    fn mismatch(&self, op: &'static str, other: &BoolMatrix) -> Error {
        Error::DimensionMismatch {
            op,
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: other.rows,
            right_cols: other.cols,
        }
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const T: bool = true;
    const F: bool = false;

    fn naive_product(a: &BoolMatrix, b: &BoolMatrix) -> BoolMatrix {
        BoolMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).any(|v| a.get(i, v) && b.get(v, j))
        })
    }

    fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = BoolMatrix> {
        proptest::collection::vec(any::<bool>(), rows * cols)
            .prop_map(move |cells| BoolMatrix::from_fn(rows, cols, |r, c| cells[r * cols + c]))
    }

    #[test]
    fn identity_product() {
        let id = BoolMatrix::diagonal(&[T, T]);
        let m = BoolMatrix::from_rows(&[vec![T, F, T], vec![F, F, T]]);
        assert_eq!(id.product(&m).unwrap(), m);
    }

    #[test]
    fn zero_product() {
        let z = BoolMatrix::filled(3, 3, false);
        let o = BoolMatrix::filled(3, 3, true);
        assert_eq!(z.product(&o).unwrap(), z);
    }

    #[test]
    fn permutation_product() {
        let a = BoolMatrix::from_rows(&[vec![T, F], vec![F, T]]);
        let b = BoolMatrix::from_rows(&[vec![F, T], vec![T, F]]);
        let expected = naive_product(&a, &b);
        assert_eq!(expected, BoolMatrix::from_rows(&[vec![F, T], vec![T, F]]));
        assert_eq!(a.product(&b).unwrap(), expected);
    }

    #[test]
    fn product_shape_mismatch() {
        let a = BoolMatrix::new(2, 3);
        let b = BoolMatrix::new(2, 3);
        let err = a.product(&b).unwrap_err();
        assert!(err.to_string().contains("2x3 vs 2x3"), "{err}");
    }

    #[test]
    fn conjoin_cases() {
        let m = BoolMatrix::from_rows(&[vec![T, F], vec![T, T]]);
        assert_eq!(m.conjoin(&m).unwrap(), m);
        assert_eq!(m.conjoin(&BoolMatrix::filled(2, 2, true)).unwrap(), m);
        let n = BoolMatrix::from_rows(&[vec![T, T], vec![F, T]]);
        assert_eq!(
            m.conjoin(&n).unwrap(),
            BoolMatrix::from_rows(&[vec![T, F], vec![F, T]])
        );
        assert!(m.conjoin(&BoolMatrix::new(2, 3)).is_err());
    }

    #[test]
    fn conjoin_in_place_counts_flips() {
        let mut m = BoolMatrix::filled(3, 70, true);
        let mask = BoolMatrix::from_fn(3, 70, |r, c| (r + c) % 2 == 0);
        let flips = m.conjoin_in_place(&mask).unwrap();
        assert_eq!(flips, 3 * 70 - mask.count_true());
        assert_eq!(m, mask);
    }

    #[test]
    fn transpose_cases() {
        let m = BoolMatrix::from_rows(&[vec![T, F], vec![F, F]]);
        assert_eq!(m.transpose(), m);
        let row = BoolMatrix::from_rows(&[vec![T, F, T]]);
        let col = row.transpose();
        assert_eq!(col.dims(), (3, 1));
        assert!(col.get(0, 0) && !col.get(1, 0) && col.get(2, 0));
        assert_eq!(col.transpose(), row);
    }

    #[test]
    fn all_false_cases() {
        assert!(BoolMatrix::new(4, 2).is_all_false());
        let mut m = BoolMatrix::new(4, 2);
        m.set(3, 1, true);
        assert!(!m.is_all_false());
        assert!(BoolMatrix::new(0, 5).is_all_false());
        assert!(BoolMatrix::new(5, 0).is_all_false());
    }

    #[test]
    fn zero_dimension_products() {
        let a = BoolMatrix::new(3, 0);
        let b = BoolMatrix::new(0, 4);
        let p = a.product(&b).unwrap();
        assert_eq!(p.dims(), (3, 4));
        assert!(p.is_all_false());
        assert_eq!(b.product(&a.transpose().transpose().transpose()).unwrap_err().to_string(),
            "dimension mismatch in product: 0x4 vs 0x3");
    }

    #[test]
    #[should_panic(expected = "out of bounds")]
    fn out_of_bounds_panics() {
        // 64 columns would fit in one word, so this would otherwise wrap
        BoolMatrix::new(2, 3).get(0, 3);
    }

    #[test]
    fn iter_true_row_major() {
        let m = BoolMatrix::from_fn(2, 130, |r, c| c == 129 - r || c == 64);
        let cells: Vec<_> = m.iter_true().collect();
        assert_eq!(cells, vec![(0, 64), (0, 129), (1, 64), (1, 128)]);
    }

    proptest! {
        #[test]
        fn product_matches_naive(a in matrix(5, 70), b in matrix(70, 3)) {
            prop_assert_eq!(a.product(&b).unwrap(), naive_product(&a, &b));
        }

        #[test]
        fn product_associative(a in matrix(3, 4), b in matrix(4, 5), c in matrix(5, 2)) {
            let left = a.product(&b).unwrap().product(&c).unwrap();
            let right = a.product(&b.product(&c).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(left, naive_product(&naive_product(&a, &b), &c));
        }

        #[test]
        fn transpose_reverses_product(a in matrix(3, 6), b in matrix(6, 4)) {
            prop_assert_eq!(
                a.product(&b).unwrap().transpose(),
                b.transpose().product(&a.transpose()).unwrap()
            );
        }

        #[test]
        fn conjoin_laws(a in matrix(4, 4), b in matrix(4, 4), c in matrix(4, 4)) {
            prop_assert_eq!(a.conjoin(&b).unwrap(), b.conjoin(&a).unwrap());
            prop_assert_eq!(
                a.conjoin(&b).unwrap().conjoin(&c).unwrap(),
                a.conjoin(&b.conjoin(&c).unwrap()).unwrap()
            );
            prop_assert_eq!(a.conjoin(&a).unwrap(), a);
        }

        #[test]
        fn operations_are_monotone(a in matrix(4, 5), b in matrix(5, 4), r in 0usize..4, c in 0usize..5) {
            let mut lowered = a.clone();
            lowered.set(r, c, false);
            prop_assert!(lowered.product(&b).unwrap().is_subset_of(&a.product(&b).unwrap()));
            let bt = b.transpose();
            prop_assert!(lowered.conjoin(&bt).unwrap().is_subset_of(&a.conjoin(&bt).unwrap()));
        }
    }
}
