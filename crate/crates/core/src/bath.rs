//! Bath spectral function and the five relaxation rates derived from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelBasis;

/// How the vibrational sites see the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathTopology {
    /// All sites share one bath: `φ_ij = φ`.
    Common,
    /// Each site has its own statistically identical bath: `φ_ij = δ_ij φ`.
    Independent,
}

impl BathTopology {
    pub fn as_str(self) -> &'static str {
        match self {
            BathTopology::Common => "common",
            BathTopology::Independent => "independent",
        }
    }
}

/// Real part of the half-sided Fourier transform of the bath correlation function.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralFunction {
    Constant(f64),
    /// Zero-temperature ohmic density `η ω e^{−ω/ω_c}` for `ω > 0`, zero otherwise.
    Ohmic {
        eta: f64,
        cutoff: f64,
    },
    /// Piecewise-linear interpolation between `(ω, S)` samples, held constant
    /// beyond the end points.
    Table(Vec<(f64, f64)>),
}

impl SpectralFunction {
    pub fn table(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSpectrum("empty table".into()));
        }
        if samples
            .iter()
            .any(|(w, s)| !w.is_finite() || !s.is_finite())
        {
            return Err(Error::InvalidSpectrum("non-finite table entry".into()));
        }
        if let Some((w, s)) = samples.iter().find(|(_, s)| *s < 0.0) {
            return Err(Error::InvalidSpectrum(format!("S({w}) = {s} is negative")));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidSpectrum(
                "duplicate frequency in table".into(),
            ));
        }
        Ok(SpectralFunction::Table(samples))
    }

    pub fn ohmic(eta: f64, cutoff: f64) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("eta = {eta}")));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("cutoff = {cutoff}")));
        }
        Ok(SpectralFunction::Ohmic { eta, cutoff })
    }

    pub fn eval(&self, omega: f64) -> f64 {
        match self {
            SpectralFunction::Constant(c) => *c,
            SpectralFunction::Ohmic { eta, cutoff } => {
                if omega > 0.0 {
                    eta * omega * (-omega / cutoff).exp()
                } else {
                    0.0
                }
            }
            SpectralFunction::Table(samples) => {
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if omega <= first.0 {
                    return first.1;
                }
                if omega >= last.0 {
                    return last.1;
                }
                let k = samples.partition_point(|(w, _)| *w <= omega);
                let (w0, s0) = samples[k - 1];
                let (w1, s1) = samples[k];
                if omega == w0 {
                    return s0;
                }
                s0 + (s1 - s0) * (omega - w0) / (w1 - w0)
            }
        }
    }
}

/// The five physical rates entering the secular generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    /// Polariton absorption `− → +`, `2S(−Ω_R)`.
    pub gamma_a: f64,
    /// Polariton emission `+ → −`, `2S(Ω_R)`.
    pub gamma_e: f64,
    /// Pure dephasing, `2S(0)`.
    pub gamma_phi: f64,
    /// Dark → upper and lower → dark, `2S(−Ω_R/2)`.
    #[serde(rename = "Gamma_a")]
    pub big_gamma_a: f64,
    /// Upper → dark and dark → lower, `2S(Ω_R/2)`.
    #[serde(rename = "Gamma_e")]
    pub big_gamma_e: f64,
}

impl RateSet {
    pub const ZERO: RateSet = RateSet {
        gamma_a: 0.0,
        gamma_e: 0.0,
        gamma_phi: 0.0,
        big_gamma_a: 0.0,
        big_gamma_e: 0.0,
    };

    pub fn new(
        gamma_a: f64,
        gamma_e: f64,
        gamma_phi: f64,
        big_gamma_a: f64,
        big_gamma_e: f64,
    ) -> Result<Self> {
        let rates = Self {
            gamma_a,
            gamma_e,
            gamma_phi,
            big_gamma_a,
            big_gamma_e,
        };
        validate_rates(&rates)?;
        Ok(rates)
    }

    pub fn uniform(rate: f64) -> Result<Self> {
        Self::new(rate, rate, rate, rate, rate)
    }

    /// Independent uniform draws in `[0.05, 1)` from a ChaCha8 stream.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || rng.random_range(0.05..1.0);
        Self {
            gamma_a: draw(),
            gamma_e: draw(),
            gamma_phi: draw(),
            big_gamma_a: draw(),
            big_gamma_e: draw(),
        }
    }

    /// Exchanges absorption and emission rates (the `+ ↔ −` mirror of the model).
    pub fn swapped(&self) -> Self {
        Self {
            gamma_a: self.gamma_e,
            gamma_e: self.gamma_a,
            gamma_phi: self.gamma_phi,
            big_gamma_a: self.big_gamma_e,
            big_gamma_e: self.big_gamma_a,
        }
    }

    pub fn fields(&self) -> [(&'static str, f64); 5] {
        [
            ("gamma_a", self.gamma_a),
            ("gamma_e", self.gamma_e),
            ("gamma_phi", self.gamma_phi),
            ("Gamma_a", self.big_gamma_a),
            ("Gamma_e", self.big_gamma_e),
        ]
    }

    pub fn max_rate(&self) -> f64 {
        self.fields().iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    /// `2S(ω)` at the transition frequency `ticks · Ω_R/2`.
    ///
    /// Positive frequencies are emission, negative ones absorption.
    pub fn rate_for_ticks(&self, ticks: i64) -> f64 {
        match ticks {
            0 => self.gamma_phi,
            1 => self.big_gamma_e,
            -1 => self.big_gamma_a,
            2 => self.gamma_e,
            -2 => self.gamma_a,
            _ => panic!("no transition of {ticks} ticks in the single-excitation manifold"),
        }
    }
}

pub fn validate_rates(rates: &RateSet) -> Result<()> {
    for (field, value) in rates.fields() {
        if !value.is_finite() {
            return Err(Error::NonFiniteRate { field });
        }
        if value < 0.0 {
            return Err(Error::NegativeRate { field });
        }
    }
    Ok(())
}

pub fn rates_from_spectrum(spectrum: &SpectralFunction, basis: &ModelBasis) -> Result<RateSet> {
    let tick = basis.frequency_tick();
    let two_s = |ticks: f64| 2.0 * spectrum.eval(ticks * tick);
    let rates = RateSet {
        gamma_a: two_s(-2.0),
        gamma_e: two_s(2.0),
        gamma_phi: two_s(0.0),
        big_gamma_a: two_s(-1.0),
        big_gamma_e: two_s(1.0),
    };
    validate_rates(&rates)?;
    Ok(rates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_basis, ModelParams};

    fn basis() -> ModelBasis {
        build_basis(ModelParams::new(4, 1.0, 0.2).unwrap()).unwrap()
    }

    #[test]
    fn zero_and_constant_spectra() {
        let b = basis();
        assert_eq!(
            rates_from_spectrum(&SpectralFunction::Constant(0.0), &b).unwrap(),
            RateSet::ZERO
        );
        let r = rates_from_spectrum(&SpectralFunction::Constant(0.3), &b).unwrap();
        assert_eq!(r, RateSet::uniform(0.6).unwrap());
    }

    #[test]
    fn table_spectrum_samples_five_frequencies() {
        let b = basis();
        let s = SpectralFunction::table(vec![
            (-0.2, 0.05),
            (-0.1, 0.1),
            (0.0, 0.25),
            (0.1, 0.2),
            (0.2, 0.15),
        ])
        .unwrap();
        let r = rates_from_spectrum(&s, &b).unwrap();
        // 2·S at −Ω_R, Ω_R, 0, −Ω_R/2, Ω_R/2
        let expected = [0.1, 0.3, 0.5, 0.2, 0.4];
        let got = [
            r.gamma_a,
            r.gamma_e,
            r.gamma_phi,
            r.big_gamma_a,
            r.big_gamma_e,
        ];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-15, "{got:?}");
        }
    }

    #[test]
    fn direct_and_spectrum_rates_are_bitwise_identical() {
        let b = basis();
        let s = SpectralFunction::table(vec![
            (-0.2, 0.05),
            (-0.1, 0.1),
            (0.0, 0.25),
            (0.1, 0.2),
            (0.2, 0.15),
        ])
        .unwrap();
        let direct =
            RateSet::new(2.0 * 0.05, 2.0 * 0.15, 2.0 * 0.25, 2.0 * 0.1, 2.0 * 0.2).unwrap();
        assert_eq!(rates_from_spectrum(&s, &b).unwrap(), direct);
    }

    #[test]
    fn table_interpolation() {
        let s = SpectralFunction::table(vec![(1.0, 2.0), (0.0, 0.0)]).unwrap();
        assert_eq!(s.eval(0.25), 0.5);
        assert_eq!(s.eval(-3.0), 0.0);
        assert_eq!(s.eval(7.0), 2.0);
        assert!(SpectralFunction::table(vec![(0.0, -1.0)]).is_err());
        assert!(SpectralFunction::table(vec![]).is_err());
    }

    #[test]
    fn ohmic_is_emission_only() {
        let s = SpectralFunction::ohmic(0.5, 1.0).unwrap();
        let r = rates_from_spectrum(&s, &basis()).unwrap();
        assert_eq!(r.gamma_phi, 0.0);
        assert_eq!(r.gamma_a, 0.0);
        assert_eq!(r.big_gamma_a, 0.0);
        assert!((r.big_gamma_e - 2.0 * 0.5 * 0.1 * (-0.1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn validation_errors_name_the_field() {
        assert!(validate_rates(&RateSet::uniform(0.1).unwrap()).is_ok());
        assert!(validate_rates(&RateSet::ZERO).is_ok());
        let bad = RateSet {
            gamma_phi: -0.1,
            ..RateSet::ZERO
        };
        assert_eq!(
            validate_rates(&bad).unwrap_err().to_string(),
            "gamma_phi negative"
        );
        let nan = RateSet {
            big_gamma_e: f64::NAN,
            ..RateSet::ZERO
        };
        assert!(validate_rates(&nan).is_err());
    }

    #[test]
    fn rate_lookup_by_ticks() {
        let r = RateSet::new(0.1, 0.2, 0.3, 0.4, 0.5).unwrap();
        assert_eq!(r.rate_for_ticks(-2), 0.1);
        assert_eq!(r.rate_for_ticks(2), 0.2);
        assert_eq!(r.rate_for_ticks(0), 0.3);
        assert_eq!(r.rate_for_ticks(-1), 0.4);
        assert_eq!(r.rate_for_ticks(1), 0.5);
        assert_eq!(r.swapped().swapped(), r);
    }

    proptest::proptest! {
        #[test]
        fn nonnegative_tables_always_validate(values in proptest::collection::vec(0.0f64..10.0, 1..8)) {
            let samples = values.iter().enumerate().map(|(k, s)| (k as f64 * 0.07 - 0.2, *s)).collect();
            let s = SpectralFunction::table(samples).unwrap();
            let r = rates_from_spectrum(&s, &basis()).unwrap();
            proptest::prop_assert!(validate_rates(&r).is_ok());
        }
    }
}
