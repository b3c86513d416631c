//! Secular Redfield generator assembled directly from the interaction-picture
//! equation
//!
//! ```text
//! ∂ρ̃ = Σ_ij Σ_pqrs u_ip u_qi u_jr u_sj ∫₀^∞ e^{iω_sr τ} φ_ij(τ) dτ [|r⟩⟨s|ρ̃, |p⟩⟨q|] + h.c.
//! ```
//!
//! keeping every quadruple with `ω_pq = ω_sr` and the real part `S(ω_sr)` of
//! the half-sided transform. Nothing here is shared with [`crate::generators`]
//! beyond the storage layout; the two are compared entry by entry.

use num_complex::Complex64;

use crate::bath::{validate_rates, BathTopology, RateSet};
use crate::error::Result;
use crate::generators::{GeneratorKind, Liouvillian};
use crate::model::{ModelBasis, StateLabel};
use crate::operator::sigma;
use crate::superop::SuperOpBuilder;

/// Index quadruple `{p, q, r, s}` satisfying the secular condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecularCombo {
    pub p: StateLabel,
    pub q: StateLabel,
    pub r: StateLabel,
    pub s: StateLabel,
    pub tick_pq: i64,
    pub tick_sr: i64,
}

/// Exhaustive scan of all `(N+1)⁴` quadruples.
pub fn enumerate_secular(basis: &ModelBasis) -> Vec<SecularCombo> {
    let states = basis.states();
    let mut combos = Vec::new();
    for &p in states {
        for &q in states {
            let tick_pq = basis.transition_frequency(p, q).ticks;
            for &r in states {
                for &s in states {
                    let tick_sr = basis.transition_frequency(s, r).ticks;
                    if tick_pq == tick_sr {
                        combos.push(SecularCombo {
                            p,
                            q,
                            r,
                            s,
                            tick_pq,
                            tick_sr,
                        });
                    }
                }
            }
        }
    }
    combos
}

/// `Σ_ij u_ip u_qi u_jr u_sj φ_ij / φ`, where `u_ip u_qi = ⟨p|i⟩⟨i|q⟩`.
pub fn combo_weight(combo: &SecularCombo, basis: &ModelBasis, topology: BathTopology) -> Complex64 {
    let sites = 1..=basis.n_molecules();
    match topology {
        BathTopology::Common => {
            let left: Complex64 = sites
                .clone()
                .map(|i| basis.site_element(i, combo.p, combo.q))
                .sum();
            let right: Complex64 = sites.map(|j| basis.site_element(j, combo.r, combo.s)).sum();
            left * right
        }
        BathTopology::Independent => sites
            .map(|i| {
                basis.site_element(i, combo.p, combo.q) * basis.site_element(i, combo.r, combo.s)
            })
            .sum(),
    }
}

pub fn assemble_redfield(
    basis: &ModelBasis,
    rates: &RateSet,
    topology: BathTopology,
) -> Result<Liouvillian> {
    basis.params().validate()?;
    validate_rates(rates)?;
    let mut builder = SuperOpBuilder::new(basis.dim());
    for combo in enumerate_secular(basis) {
        let weight = combo_weight(&combo, basis, topology);
        // S(ω_sr) = 2S/2, with 2S read off the rate set by frequency.
        let spectral = 0.5 * rates.rate_for_ticks(combo.tick_sr);
        let coeff = weight * spectral;
        let a = sigma(basis, combo.r, combo.s);
        let b = sigma(basis, combo.p, combo.q);
        let (a_dag, b_dag) = (a.adjoint(), b.adjoint());
        // coeff·(AρB − BAρ) + h.c.
        builder.add_sandwich(&a, &b, coeff);
        builder.add_left(&b.matmul(&a), -coeff);
        builder.add_sandwich(&b_dag, &a_dag, coeff.conj());
        builder.add_right(&a_dag.matmul(&b_dag), -coeff.conj());
    }
    Ok(Liouvillian::new(
        basis,
        GeneratorKind::SecularRedfield,
        topology,
        *rates,
        builder.build(),
    ))
}
