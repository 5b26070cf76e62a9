//! Minimal CSR matrix used by the verification backends.

use nalgebra::{Complex, DMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Copy + Default + std::ops::AddAssign + std::ops::Mul<Output = T>> CsrMatrix<T> {
    /// Builds the matrix row by row; `row_fn` pushes `(col, value)` pairs for
    /// one row. Duplicate columns within a row are summed.
    pub fn from_rows(dim: usize, mut row_fn: impl FnMut(usize, &mut Vec<(usize, T)>)) -> Self {
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut scratch = Vec::new();
        indptr.push(0);
        for r in 0..dim {
            scratch.clear();
            row_fn(r, &mut scratch);
            scratch.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for &(c, v) in &scratch {
                debug_assert!(c < dim);
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            dim,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r)
            .find(|(cc, _)| *cc == c)
            .map(|(_, v)| v)
            .unwrap_or_default()
    }

    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = T::default();
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<T>
    where
        T: nalgebra::Scalar,
    {
        let mut m = DMatrix::from_element(self.dim, self.dim, T::default());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

impl CsrMatrix<Complex<f64>> {
    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r).conj()).norm());
            }
        }
        worst
    }
}

impl CsrMatrix<f64> {
    pub fn symmetry_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }
}
