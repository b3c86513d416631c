//! Closed-form secular Lindblad generators for the common-bath and
//! independent-bath models, in the corrected form and in the Del Pino et al.
//! form that lacks the pure-dephasing cross terms and the polariton/dark
//! coherence-transfer terms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{validate_rates, BathTopology, RateSet};
use crate::error::{Error, Result};
use crate::model::{ModelBasis, StateLabel};
use crate::operator::{dark_projector, sigma, Operator};
use crate::superop::{CsrMatrix, SuperOpBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Corrected,
    Dp,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Corrected => "corrected",
            Variant::Dp => "dp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    ClosedForm(Variant),
    /// Assembled term by term from the secular Redfield equation.
    SecularRedfield,
}

/// Superoperator on density matrices of the single-excitation manifold, split
/// into `−i[H_S, ·]` and the dissipator.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    basis: ModelBasis,
    kind: GeneratorKind,
    topology: BathTopology,
    rates: RateSet,
    coherent: CsrMatrix,
    dissipative: CsrMatrix,
}

impl Liouvillian {
    pub fn new(
        basis: &ModelBasis,
        kind: GeneratorKind,
        topology: BathTopology,
        rates: RateSet,
        dissipative: CsrMatrix,
    ) -> Self {
        assert_eq!(dissipative.dim(), basis.dim() * basis.dim());
        Self {
            basis: basis.clone(),
            kind,
            topology,
            rates,
            coherent: coherent_part(basis),
            dissipative,
        }
    }

    pub fn basis(&self) -> &ModelBasis {
        &self.basis
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn topology(&self) -> BathTopology {
        self.topology
    }

    pub fn rates(&self) -> &RateSet {
        &self.rates
    }

    /// Superoperator dimension `(N+1)²`.
    pub fn dim(&self) -> usize {
        self.dissipative.dim()
    }

    pub fn coherent(&self) -> &CsrMatrix {
        &self.coherent
    }

    pub fn dissipative(&self) -> &CsrMatrix {
        &self.dissipative
    }

    pub fn full(&self) -> CsrMatrix {
        self.coherent.add(&self.dissipative)
    }

    /// `L_D[ρ]` for a dense density matrix.
    pub fn apply_dissipative(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let m = self.basis.dim();
        devectorize(&self.dissipative.matvec(&vectorize(rho)), m)
    }
}

pub fn vectorize(rho: &DMatrix<Complex64>) -> Vec<Complex64> {
    let m = rho.nrows();
    (0..m * m).map(|k| rho[(k / m, k % m)]).collect()
}

pub fn devectorize(v: &[Complex64], m: usize) -> DMatrix<Complex64> {
    assert_eq!(v.len(), m * m);
    DMatrix::from_fn(m, m, |a, b| v[a * m + b])
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `rate · (AρA† − ½A†Aρ − ½ρA†A)`.
pub fn dissipator_term(builder: &mut SuperOpBuilder, a: &Operator, rate: f64) {
    let a_dag = a.adjoint();
    let number = a_dag.matmul(a);
    builder.add_sandwich(a, &a_dag, real(rate));
    builder.add_left(&number, real(-0.5 * rate));
    builder.add_right(&number, real(-0.5 * rate));
}

/// `rate · (AρB† + BρA†)`; requires `B†A = 0` so the term is traceless.
pub fn sandwich_term(
    builder: &mut SuperOpBuilder,
    a: &Operator,
    b: &Operator,
    rate: f64,
) -> Result<()> {
    if !b.adjoint().matmul(a).is_zero() || !a.adjoint().matmul(b).is_zero() {
        return Err(Error::NonOrthogonalSandwich);
    }
    builder.add_sandwich(a, &b.adjoint(), real(rate));
    builder.add_sandwich(b, &a.adjoint(), real(rate));
    Ok(())
}

/// `coeff · [Xρ, Y] + h.c.`
pub fn commutator_term(builder: &mut SuperOpBuilder, x: &Operator, y: &Operator, coeff: Complex64) {
    let (x_dag, y_dag) = (x.adjoint(), y.adjoint());
    builder.add_sandwich(x, y, coeff);
    builder.add_left(&y.matmul(x), -coeff);
    builder.add_sandwich(&y_dag, &x_dag, coeff.conj());
    builder.add_right(&x_dag.matmul(&y_dag), -coeff.conj());
}

/// `rate · Σ_i 𝓛_{𝒟c_i†c_i𝒟}`.
///
/// With `⟨d|c_i†c_i|d′⟩ = e^{−i2π(d−d′)i/N}/N` the site sums collapse by
/// quasimomentum conservation: `Σ_i (V_i)_{ac}(V_i)_{db} = δ_{a−c+d−b ≡ 0}/N`
/// and `Σ_i V_i² = (N−1)/N · 𝒟`.
pub fn site_dephasing_term(builder: &mut SuperOpBuilder, basis: &ModelBasis, rate: f64) {
    let n = basis.n_molecules();
    let m = basis.dim();
    let inv_n = real(rate / n as f64);
    for a in 1..n {
        for b in 1..n {
            let row = basis.index(StateLabel::Dark(a)) * m + basis.index(StateLabel::Dark(b));
            for c in 1..n {
                let d = (c + b + n - a) % n;
                if d == 0 {
                    continue;
                }
                let col = basis.index(StateLabel::Dark(c)) * m + basis.index(StateLabel::Dark(d));
                builder.add(row, col, inv_n);
            }
        }
    }
    let dark = dark_projector(basis);
    let anti = -0.5 * rate * (n - 1) as f64 / n as f64;
    builder.add_left(&dark, real(anti));
    builder.add_right(&dark, real(anti));
}

/// Terms present in both the corrected and the DP generator.
fn shared_terms(
    builder: &mut SuperOpBuilder,
    topology: BathTopology,
    basis: &ModelBasis,
    rates: &RateSet,
) {
    use StateLabel::{Minus, Plus};
    let s = |a, b| sigma(basis, a, b);
    match topology {
        BathTopology::Common => {
            dissipator_term(builder, &s(Plus, Minus), rates.gamma_a / 4.0);
            dissipator_term(builder, &s(Minus, Plus), rates.gamma_e / 4.0);
            dissipator_term(builder, &s(Plus, Plus), rates.gamma_phi / 4.0);
            dissipator_term(builder, &s(Minus, Minus), rates.gamma_phi / 4.0);
            dissipator_term(builder, &dark_projector(basis), rates.gamma_phi);
        }
        BathTopology::Independent => {
            let n = basis.n_molecules() as f64;
            dissipator_term(builder, &s(Plus, Minus), rates.gamma_a / (4.0 * n));
            dissipator_term(builder, &s(Minus, Plus), rates.gamma_e / (4.0 * n));
            for d in basis.dark_states() {
                dissipator_term(builder, &s(d, Minus), rates.big_gamma_a / (2.0 * n));
                dissipator_term(builder, &s(Plus, d), rates.big_gamma_a / (2.0 * n));
            }
            for d in basis.dark_states() {
                dissipator_term(builder, &s(d, Plus), rates.big_gamma_e / (2.0 * n));
                dissipator_term(builder, &s(Minus, d), rates.big_gamma_e / (2.0 * n));
            }
            dissipator_term(builder, &s(Plus, Plus), rates.gamma_phi / (4.0 * n));
            dissipator_term(builder, &s(Minus, Minus), rates.gamma_phi / (4.0 * n));
            site_dephasing_term(builder, basis, rates.gamma_phi);
        }
    }
}

/// Terms missing from (or cancelling in) the DP generator.
fn correction_terms_into(
    builder: &mut SuperOpBuilder,
    topology: BathTopology,
    basis: &ModelBasis,
    rates: &RateSet,
) {
    use StateLabel::{Minus, Plus};
    let s = |a, b| sigma(basis, a, b);
    let scale = match topology {
        BathTopology::Common => 1.0,
        BathTopology::Independent => 1.0 / basis.n_molecules() as f64,
    };

    if topology == BathTopology::Independent {
        let ga = real(-rates.big_gamma_a * scale / 4.0);
        let ge = real(-rates.big_gamma_e * scale / 4.0);
        for d in basis.dark_states() {
            let StateLabel::Dark(k) = d else {
                unreachable!()
            };
            let bar = StateLabel::Dark(basis.n_molecules() - k);
            commutator_term(builder, &s(bar, Minus), &s(d, Plus), ga);
            commutator_term(builder, &s(Plus, bar), &s(Minus, d), ga);
        }
        for d in basis.dark_states() {
            let StateLabel::Dark(k) = d else {
                unreachable!()
            };
            let bar = StateLabel::Dark(basis.n_molecules() - k);
            commutator_term(builder, &s(bar, Plus), &s(d, Minus), ge);
            commutator_term(builder, &s(Minus, bar), &s(Plus, d), ge);
        }
    }

    let gphi = rates.gamma_phi * scale;
    // Projector pairs are orthogonal by construction.
    let pairs = std::iter::once((Plus, Minus, gphi / 4.0))
        .chain(basis.dark_states().map(|d| (Plus, d, gphi / 2.0)))
        .chain(basis.dark_states().map(|d| (Minus, d, gphi / 2.0)));
    for (p, r, rate) in pairs {
        sandwich_term(builder, &s(p, p), &s(r, r), rate).expect("orthogonal projectors");
    }
}

/// The dissipator entries by which the corrected generator differs from DP.
pub fn correction_terms(topology: BathTopology, basis: &ModelBasis, rates: &RateSet) -> CsrMatrix {
    let mut builder = SuperOpBuilder::new(basis.dim());
    correction_terms_into(&mut builder, topology, basis, rates);
    builder.build()
}

pub fn assemble_generator(
    variant: Variant,
    topology: BathTopology,
    basis: &ModelBasis,
    rates: &RateSet,
) -> Result<Liouvillian> {
    basis.params().validate()?;
    validate_rates(rates)?;
    let mut builder = SuperOpBuilder::new(basis.dim());
    shared_terms(&mut builder, topology, basis, rates);
    if variant == Variant::Corrected {
        correction_terms_into(&mut builder, topology, basis, rates);
    }
    Ok(Liouvillian::new(
        basis,
        GeneratorKind::ClosedForm(variant),
        topology,
        *rates,
        builder.build(),
    ))
}

/// `ρ ↦ −i[H_S, ρ]` with `H_S = diag(ω_p)`.
pub fn coherent_part(basis: &ModelBasis) -> CsrMatrix {
    let m = basis.dim();
    let mut builder = SuperOpBuilder::new(m);
    for &a in basis.states() {
        for &b in basis.states() {
            let k = basis.vec_index(a, b);
            let omega = basis.transition_frequency(a, b).value;
            builder.add(k, k, Complex64::new(0.0, -omega));
        }
    }
    builder.build()
}
