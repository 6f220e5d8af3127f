//! Compressed sparse row storage for the lattice operators.

use std::ops::{AddAssign, Mul};

use faer::Mat;

#[derive(Clone, Debug, PartialEq)]
pub struct Csr<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T> Csr<T>
where
    T: Copy + Default + PartialEq + AddAssign + Mul<Output = T>,
{
    /// Builds from `(row, col, value)` triplets; duplicates are summed and exact zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut out = Self { rows, cols, row_ptr, col_idx, values };
        out.prune();
        out
    }

    fn prune(&mut self) {
        let zero = T::default();
        let mut row_ptr = vec![0usize; self.rows + 1];
        let mut col_idx = Vec::with_capacity(self.values.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[k] != zero {
                    col_idx.push(self.col_idx[k]);
                    values.push(self.values[k]);
                }
            }
            row_ptr[r + 1] = values.len();
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::default(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = T::default();
                for (c, v) in self.row(r) {
                    acc += v * x[c];
                }
                acc
            })
            .collect()
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> Csr<U> {
        Csr {
            rows: self.rows,
            cols: self.cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_dense(&self) -> Mat<T>
    where
        T: faer::traits::ComplexField,
    {
        let mut m = Mat::<T>::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }
}

impl<T: Copy> Csr<T> {
    /// Largest absolute row sum under the given magnitude.
    pub fn norm_inf_by(&self, abs: impl Fn(T) -> f64) -> f64 {
        (0..self.rows)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| abs(self.values[k])).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
