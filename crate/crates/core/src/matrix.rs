//! Dense row-major matrices, index selectors and the per-pair index tables
//! (witnesses, successors) used throughout the solvers.

use std::fmt;

use crate::error::{ApspError, Result};
use crate::weight::Weight;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type WeightMatrix = Matrix<Weight>;

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(ApspError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    /// The `|rows| x |cols|` submatrix picked out by two selectors.
    pub fn select(&self, rows: &Selector, cols: &Selector) -> Result<Matrix<T>> {
        rows.check(self.rows)?;
        cols.check(self.cols)?;
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows.indices() {
            let row = self.row(r);
            data.extend(cols.indices().iter().map(|&c| row[c].clone()));
        }
        Ok(Matrix { rows: rows.len(), cols: cols.len(), data })
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            data.extend((0..self.rows).map(|r| self.data[r * self.cols + c].clone()));
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T> Matrix<T> {
    /// Wraps row-major data. Panics if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut T {
        &mut self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |r| self.row(r))
    }
}

impl Matrix<Weight> {
    /// Largest finite absolute value, 0 when there is none.
    pub fn max_abs_finite(&self) -> i64 {
        self.data.iter().filter_map(|w| w.value()).map(i64::abs).max().unwrap_or(0)
    }

    pub fn contains_neg_inf(&self) -> bool {
        self.data.iter().any(|w| w.is_neg_inf())
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|c| format!("{c:?}")).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Strictly increasing list of 0-based indices into one matrix dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    indices: Vec<usize>,
}

impl Selector {
    pub fn new(indices: Vec<usize>) -> Result<Selector> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ApspError::Contract("selector indices must be strictly increasing".into()));
        }
        Ok(Selector { indices })
    }

    pub fn all(n: usize) -> Selector {
        Selector { indices: (0..n).collect() }
    }

    /// Builds a selector from 1-based indices.
    pub fn from_one_based(indices: &[usize]) -> Result<Selector> {
        if indices.contains(&0) {
            return Err(ApspError::OutOfRange("index 0 in a 1-based selector".into()));
        }
        Selector::new(indices.iter().map(|i| i - 1).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `self ∘ inner`: the indices of `self` at the positions listed by `inner`.
    pub fn compose(&self, inner: &Selector) -> Result<Selector> {
        inner.check(self.len())?;
        Ok(Selector { indices: inner.indices.iter().map(|&p| self.indices[p]).collect() })
    }

    fn check(&self, bound: usize) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last >= bound => Err(ApspError::OutOfRange(format!(
                "selector index {} outside dimension {bound}",
                last + 1
            ))),
            _ => Ok(()),
        }
    }
}

/// Per-pair optional vertex index. Stored as `0` for none and `k + 1` for
/// vertex `k`, which is also the external (1-based) convention.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexMatrix(Matrix<u32>);

/// Witnesses: `w(i, j) = Some(k)` means `f(i, j)` was last obtained through `k`.
pub type WitnessMatrix = IndexMatrix;
/// Successors: `s(i, j) = Some(k)` means `k` is the next hop from `i` towards `j`.
pub type SuccessorMatrix = IndexMatrix;

impl IndexMatrix {
    pub fn empty(rows: usize, cols: usize) -> Self {
        IndexMatrix(Matrix::filled(rows, cols, 0))
    }

    pub fn rows(&self) -> usize {
        self.0.rows
    }

    pub fn cols(&self) -> usize {
        self.0.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Option<usize> {
        match *self.0.get(r, c) {
            0 => None,
            k => Some(k as usize - 1),
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Option<usize>) {
        self.0.set(r, c, v.map_or(0, |k| k as u32 + 1));
    }

    /// Raw 1-based entries (0 = none).
    pub fn raw(&self) -> &Matrix<u32> {
        &self.0
    }

    pub fn from_raw(raw: Matrix<u32>) -> Self {
        IndexMatrix(raw)
    }

    pub fn count_set(&self) -> usize {
        self.0.data.iter().filter(|&&k| k != 0).count()
    }
}

impl fmt::Debug for IndexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wm(rows: &[&[i64]]) -> WeightMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| Weight::of(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn select_column() {
        let m = wm(&[&[0, 5], &[7, 0]]);
        let s = m.select(&Selector::from_one_based(&[1, 2]).unwrap(), &Selector::from_one_based(&[2]).unwrap());
        assert_eq!(s.unwrap(), wm(&[&[5], &[0]]));
    }

    #[test]
    fn select_rows_and_column() {
        let m = wm(&[&[0, 1, 2], &[3, 0, 4], &[5, 6, 0]]);
        let r = Selector::from_one_based(&[1, 3]).unwrap();
        let c = Selector::from_one_based(&[2]).unwrap();
        assert_eq!(m.select(&r, &c).unwrap(), wm(&[&[1], &[6]]));
        assert_eq!(m.select(&Selector::all(3), &Selector::all(3)).unwrap(), m);
    }

    #[test]
    fn selector_validation() {
        assert!(Selector::new(vec![2, 1]).is_err());
        assert!(Selector::new(vec![1, 1]).is_err());
        let m = wm(&[&[0]]);
        assert!(matches!(
            m.select(&Selector::new(vec![1]).unwrap(), &Selector::all(1)),
            Err(ApspError::OutOfRange(_))
        ));
    }

    #[test]
    fn index_matrix_round_trip() {
        let mut w = IndexMatrix::empty(2, 2);
        w.set(0, 1, Some(0));
        assert_eq!(w.get(0, 1), Some(0));
        assert_eq!(w.get(1, 0), None);
        assert_eq!(*w.raw().get(0, 1), 1);
    }
}
