//! Sparse operators on the single-excitation manifold.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::model::{ModelBasis, StateLabel};

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    /// Sorted by `(row, col)`, no duplicates, no exact zeros.
    entries: Vec<(usize, usize, Complex64)>,
}

impl Operator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Self {
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (r, c, v) in entries {
            assert!(
                r < dim && c < dim,
                "entry ({r}, {c}) outside dimension {dim}"
            );
            *map.entry((r, c)).or_default() += v;
        }
        Self {
            dim,
            entries: map
                .into_iter()
                .filter(|(_, v)| *v != Complex64::ZERO)
                .map(|((r, c), v)| (r, c, v))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries
            .binary_search_by(|(r, c, _)| (*r, *c).cmp(&(row, col)))
            .map(|k| self.entries[k].2)
            .unwrap_or_default()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_entries(
            self.dim,
            self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())),
        )
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_entries(
            self.dim,
            self.entries.iter().map(|&(r, c, v)| (r, c, v * factor)),
        )
    }

    pub fn matmul(&self, other: &Operator) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); other.dim];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let products = self
            .entries
            .iter()
            .flat_map(|&(r, k, a)| by_row[k].iter().map(move |&(c, b)| (r, c, a * b)));
        Self::from_entries(self.dim, products.collect::<Vec<_>>())
    }

    pub fn add(&self, other: &Operator) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_entries(
            self.dim,
            self.entries
                .iter()
                .chain(&other.entries)
                .copied()
                .collect::<Vec<_>>(),
        )
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        Self::from_entries(
            n,
            (0..n)
                .flat_map(|r| (0..n).map(move |c| (r, c, m[(r, c)])))
                .collect::<Vec<_>>(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max)
    }
}

/// `σ_ab = |a⟩⟨b|`.
pub fn sigma(basis: &ModelBasis, a: StateLabel, b: StateLabel) -> Operator {
    Operator::from_entries(
        basis.dim(),
        [(basis.index(a), basis.index(b), Complex64::ONE)],
    )
}

/// Dark-subspace projector `𝒟 = Σ_d σ_dd`.
pub fn dark_projector(basis: &ModelBasis) -> Operator {
    Operator::from_entries(
        basis.dim(),
        basis.dark_states().map(|d| {
            let k = basis.index(d);
            (k, k, Complex64::ONE)
        }),
    )
}

/// Site number operator `c_i†c_i` expressed in the eigenbasis.
pub fn site_number(basis: &ModelBasis, site: usize) -> Operator {
    let states = basis.states();
    Operator::from_entries(
        basis.dim(),
        states
            .iter()
            .flat_map(|&p| states.iter().map(move |&q| (p, q)))
            .map(|(p, q)| {
                (
                    basis.index(p),
                    basis.index(q),
                    basis.site_element(site, p, q),
                )
            })
            .collect::<Vec<_>>(),
    )
}

/// Dark-projected site number operator `𝒟 c_i†c_i 𝒟`.
pub fn dark_site_number(basis: &ModelBasis, site: usize) -> Operator {
    let dark = dark_projector(basis);
    dark.matmul(&site_number(basis, site)).matmul(&dark)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_basis, ModelParams};
    use std::f64::consts::PI;

    #[test]
    fn sigma_products() {
        let b = build_basis(ModelParams::new(3, 1.0, 0.2).unwrap()).unwrap();
        use StateLabel::*;
        let pm = sigma(&b, Plus, Minus);
        let mp = sigma(&b, Minus, Plus);
        assert_eq!(pm.matmul(&mp), sigma(&b, Plus, Plus));
        assert!(pm.matmul(&pm).is_zero());
        assert_eq!(pm.adjoint(), mp);
    }

    #[test]
    fn dark_site_number_elements() {
        let n = 5;
        let b = build_basis(ModelParams::new(n, 1.0, 0.2).unwrap()).unwrap();
        for site in 1..=n {
            let v = dark_site_number(&b, site);
            // ⟨d|i⟩⟨i|d'⟩ = e^{-i2π(d-d')i/N} / N
            for d in 1..n {
                for dp in 1..n {
                    let phase = -2.0 * PI * (d as f64 - dp as f64) * site as f64 / n as f64;
                    let expected = Complex64::from_polar(1.0 / n as f64, phase);
                    let got = v.get(d + 1, dp + 1);
                    assert!(
                        (got - expected).norm() < 1e-14,
                        "site {site} ({d},{dp}): {got}"
                    );
                }
                assert!(v.get(0, d + 1).norm() < 1e-15);
            }
        }
    }
}
