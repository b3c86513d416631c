#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use polariton_core::generators::{devectorize, vectorize};
use polariton_core::{build_basis, Liouvillian, ModelBasis, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn basis(n: usize) -> ModelBasis {
    build_basis(ModelParams::new(n, 1.0, 0.2).unwrap()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(m: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, m, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `G G† / tr(G G†)` for a random complex `G`.
pub fn random_density(m: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = random_matrix(m, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn apply(l: &Liouvillian, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    devectorize(&l.dissipative().matvec(&vectorize(rho)), rho.nrows())
}

/// `|tr 𝓛(X)|` for an arbitrary (not necessarily Hermitian) `X`.
pub fn trace_defect(l: &Liouvillian, x: &DMatrix<Complex64>) -> f64 {
    apply(l, x).trace().norm()
}

/// `max |𝓛(X†) − 𝓛(X)†|`.
pub fn hermiticity_defect(l: &Liouvillian, x: &DMatrix<Complex64>) -> f64 {
    let lhs = apply(l, &x.adjoint());
    let rhs = apply(l, x).adjoint();
    (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Number of stored entries coupling elements at different transition frequencies.
pub fn secular_violations(l: &Liouvillian) -> usize {
    let b = l.basis();
    let tick = |k: usize| {
        let (p, q) = b.vec_pair(k);
        b.transition_frequency(p, q).ticks
    };
    l.dissipative()
        .iter()
        .filter(|&(r, c, _)| tick(r) != tick(c))
        .count()
}
