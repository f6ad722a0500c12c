//! Compressed sparse row storage shared by the influence matrices, value
//! graphs and transition matrices.

use rayon::prelude::*;

/// Square CSR matrix over `f64`. Column indices within a row are strictly
/// increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from per-row `(column, value)` lists. Zero values are
    /// dropped; columns are sorted, duplicates summed.
    pub fn from_rows(n: usize, rows: Vec<Vec<(u32, f64)>>) -> Self {
        assert_eq!(rows.len(), n, "row count must equal dimension");
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let start = cols.len();
            for (c, v) in row {
                assert!((c as usize) < n, "column {c} out of range");
                if cols.len() > start && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            // drop explicit zeros
            let mut w = start;
            for r in start..cols.len() {
                if vals[r] != 0.0 {
                    cols[w] = cols[r];
                    vals[w] = vals[r];
                    w += 1;
                }
            }
            cols.truncate(w);
            vals.truncate(w);
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Builds from a dense row-major matrix, keeping nonzero entries.
    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let n = dense.len();
        let rows = dense
            .iter()
            .map(|r| {
                assert_eq!(r.len(), n, "dense matrix must be square");
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(c, v)| (c as u32, *v))
                    .collect()
            })
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.row_ptr[u], self.row_ptr[u + 1]);
        self.cols[s..e]
            .iter()
            .zip(&self.vals[s..e])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn row_len(&self, u: usize) -> usize {
        self.row_ptr[u + 1] - self.row_ptr[u]
    }

    pub fn row_sum(&self, u: usize) -> f64 {
        self.vals[self.row_ptr[u]..self.row_ptr[u + 1]].iter().sum()
    }

    /// Entry lookup; absent entries are zero.
    pub fn get(&self, u: usize, v: usize) -> f64 {
        let (s, e) = (self.row_ptr[u], self.row_ptr[u + 1]);
        match self.cols[s..e].binary_search(&(v as u32)) {
            Ok(k) => self.vals[s + k],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| self.row(u).map(move |(v, w)| (u, v, w)))
    }

    /// Returns a matrix with the same sparsity pattern and `f(row, col, value)`
    /// applied to every stored entry.
    pub fn map_entries(&self, f: impl Fn(usize, usize, f64) -> f64) -> Self {
        let mut vals = self.vals.clone();
        for u in 0..self.n {
            for k in self.row_ptr[u]..self.row_ptr[u + 1] {
                vals[k] = f(u, self.cols[k] as usize, self.vals[k]);
            }
        }
        let out = Self {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals,
        };
        if out.vals.iter().any(|&v| v == 0.0) {
            // re-pack to keep the no-explicit-zero invariant
            let rows = (0..out.n).map(|u| out.row(u).map(|(c, v)| (c as u32, v)).collect());
            return Self::from_rows(out.n, rows.collect());
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n + 1];
        for &c in &self.cols {
            counts[c as usize + 1] += 1;
        }
        for i in 0..self.n {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut cols = vec![0u32; self.nnz()];
        let mut vals = vec![0.0; self.nnz()];
        for u in 0..self.n {
            for k in self.row_ptr[u]..self.row_ptr[u + 1] {
                let c = self.cols[k] as usize;
                let dst = next[c];
                cols[dst] = u as u32;
                vals[dst] = self.vals[k];
                next[c] += 1;
            }
        }
        Self {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Largest `|a(u,v) - a(v,u)|` over all pairs.
    pub fn max_asymmetry(&self) -> f64 {
        self.iter()
            .map(|(u, v, w)| (w - self.get(v, u)).abs())
            .fold(0.0, f64::max)
    }

    /// `y = x^T A`, i.e. `y(v) = sum_u x(u) a(u,v)`, computed on the transpose
    /// so each output is a fixed-order gather.
    pub fn left_multiply_with_transpose(transpose: &SparseMatrix, x: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().for_each(|(v, slot)| {
            *slot = transpose.row(v).map(|(u, w)| x[u] * w).sum();
        });
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (u, v, w) in self.iter() {
            d[u][v] = w;
        }
        d
    }
}
