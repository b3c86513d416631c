//! Sparse superoperators acting on row-major vectorised density matrices.
//!
//! Entry `(a·M + b, c·M + d)` of a superoperator is the coefficient of `ρ_cd`
//! in `∂_t ρ_ab`, with `M` the Hilbert-space dimension.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::operator::Operator;

/// Deterministic coordinate accumulator. Repeated entries are summed in
/// insertion order, so identical term sequences give bitwise-identical output.
#[derive(Debug, Clone)]
pub struct SuperOpBuilder {
    hilbert_dim: usize,
    slots: HashMap<(usize, usize), usize>,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SuperOpBuilder {
    pub fn new(hilbert_dim: usize) -> Self {
        Self {
            hilbert_dim,
            slots: HashMap::new(),
            entries: Vec::new(),
        }
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        match self.slots.get(&(row, col)) {
            Some(&k) => self.entries[k].2 += value,
            None => {
                self.slots.insert((row, col), self.entries.len());
                self.entries.push((row, col, value));
            }
        }
    }

    /// `ρ ↦ coeff · X ρ`.
    pub fn add_left(&mut self, x: &Operator, coeff: Complex64) {
        let m = self.hilbert_dim;
        for &(a, c, v) in x.entries() {
            for b in 0..m {
                self.add(a * m + b, c * m + b, coeff * v);
            }
        }
    }

    /// `ρ ↦ coeff · ρ Y`.
    pub fn add_right(&mut self, y: &Operator, coeff: Complex64) {
        let m = self.hilbert_dim;
        for &(d, b, v) in y.entries() {
            for a in 0..m {
                self.add(a * m + b, a * m + d, coeff * v);
            }
        }
    }

    /// `ρ ↦ coeff · X ρ Y`.
    pub fn add_sandwich(&mut self, x: &Operator, y: &Operator, coeff: Complex64) {
        let m = self.hilbert_dim;
        for &(a, c, xv) in x.entries() {
            for &(d, b, yv) in y.entries() {
                self.add(a * m + b, c * m + d, coeff * xv * yv);
            }
        }
    }

    pub fn add_matrix(&mut self, other: &CsrMatrix, coeff: Complex64) {
        for (r, c, v) in other.iter() {
            self.add(r, c, coeff * v);
        }
    }

    pub fn build(self) -> CsrMatrix {
        let n = self.hilbert_dim * self.hilbert_dim;
        CsrMatrix::from_triplets(n, self.entries)
    }
}

/// Square compressed-sparse-row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            indptr: vec![0; n + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Triplets must be free of duplicates; exact zeros are dropped.
    fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.retain(|t| t.2 != Complex64::ZERO);
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; n + 1];
        for &(r, _, _) in &triplets {
            indptr[r + 1] += 1;
        }
        for k in 0..n {
            indptr[k + 1] += indptr[k];
        }
        Self {
            n,
            indptr,
            indices: triplets.iter().map(|t| t.1).collect(),
            values: triplets.iter().map(|t| t.2).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.n).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => Complex64::ZERO,
        }
    }

    pub fn matvec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.n);
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *slot = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::ZERO; self.n];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn linear_combination(&self, a: Complex64, other: &CsrMatrix, b: Complex64) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.n {
            let mut lhs = self.row(r).peekable();
            let mut rhs = other.row(r).peekable();
            loop {
                let next = match (lhs.peek(), rhs.peek()) {
                    (None, None) => break,
                    (Some(&(c, v)), None) => {
                        lhs.next();
                        (c, a * v)
                    }
                    (None, Some(&(c, w))) => {
                        rhs.next();
                        (c, b * w)
                    }
                    (Some(&(c, v)), Some(&(d, w))) => {
                        if c < d {
                            lhs.next();
                            (c, a * v)
                        } else if d < c {
                            rhs.next();
                            (d, b * w)
                        } else {
                            lhs.next();
                            rhs.next();
                            (c, a * v + b * w)
                        }
                    }
                };
                triplets.push((r, next.0, next.1));
            }
        }
        CsrMatrix::from_triplets(self.n, triplets)
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        self.linear_combination(Complex64::ONE, other, Complex64::ONE)
    }

    pub fn sub(&self, other: &CsrMatrix) -> CsrMatrix {
        self.linear_combination(Complex64::ONE, other, -Complex64::ONE)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Principal submatrix on `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> CsrMatrix {
        let mut position = vec![usize::MAX; self.n];
        for (k, &i) in indices.iter().enumerate() {
            position[i] = k;
        }
        let triplets = indices
            .iter()
            .enumerate()
            .flat_map(|(k, &r)| {
                let position = &position;
                self.row(r)
                    .filter(move |(c, _)| position[*c] != usize::MAX)
                    .map(move |(c, v)| (k, position[c], v))
            })
            .collect();
        CsrMatrix::from_triplets(indices.len(), triplets)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(dim: usize, entries: &[(usize, usize, f64)]) -> Operator {
        Operator::from_entries(
            dim,
            entries
                .iter()
                .map(|&(r, c, v)| (r, c, Complex64::new(v, 0.0))),
        )
    }

    fn apply(l: &CsrMatrix, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let m = rho.nrows();
        let v: Vec<_> = (0..m * m).map(|k| rho[(k / m, k % m)]).collect();
        let out = l.matvec(&v);
        DMatrix::from_fn(m, m, |a, b| out[a * m + b])
    }

    #[test]
    fn left_right_sandwich_match_dense_products() {
        let x = op(3, &[(0, 1, 2.0), (2, 2, -1.0), (1, 0, 0.5)]);
        let y = op(3, &[(1, 2, 3.0), (0, 0, 1.5)]);
        let rho = DMatrix::from_fn(3, 3, |a, b| {
            Complex64::new(a as f64 + 0.3, b as f64 - 0.7 * a as f64)
        });
        let (xd, yd) = (x.to_dense(), y.to_dense());

        let mut left = SuperOpBuilder::new(3);
        left.add_left(&x, Complex64::ONE);
        assert!((apply(&left.build(), &rho) - &xd * &rho).norm() < 1e-13);

        let mut right = SuperOpBuilder::new(3);
        right.add_right(&y, Complex64::ONE);
        assert!((apply(&right.build(), &rho) - &rho * &yd).norm() < 1e-13);

        let mut sand = SuperOpBuilder::new(3);
        sand.add_sandwich(&x, &y, Complex64::new(0.0, 2.0));
        let expected = (&xd * &rho * &yd) * Complex64::new(0.0, 2.0);
        assert!((apply(&sand.build(), &rho) - expected).norm() < 1e-13);
    }

    #[test]
    fn restrict_and_arithmetic() {
        let mut b = SuperOpBuilder::new(2);
        b.add(0, 0, Complex64::ONE);
        b.add(0, 3, Complex64::new(2.0, 0.0));
        b.add(3, 0, Complex64::new(0.0, 1.0));
        b.add(1, 1, Complex64::new(5.0, 0.0));
        let m = b.build();
        let r = m.restrict(&[3, 0]);
        assert_eq!(r.get(0, 1), Complex64::new(0.0, 1.0));
        assert_eq!(r.get(1, 0), Complex64::new(2.0, 0.0));
        assert_eq!(r.nnz(), 3);
        assert_eq!(m.sub(&m).nnz(), 0);
        assert_eq!(m.add(&m).get(1, 1), Complex64::new(10.0, 0.0));
    }
}
