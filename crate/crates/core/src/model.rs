//! Single-excitation eigenbasis of N resonant vibrational modes coupled to one
//! cavity mode.
//!
//! The manifold holds the two polaritons `|±⟩ = (a†|0⟩ ± |B⟩)/√2` and the
//! `N − 1` dark states `|d⟩ = Σ_n e^{i2πdn/N} c_n†|0⟩ / √N`. All transition
//! frequencies are integer multiples of half the Rabi splitting, so they are
//! stored as integer "ticks" and secular comparisons are exact.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_molecules: usize,
    pub omega0: f64,
    pub rabi_splitting: f64,
}

impl ModelParams {
    pub fn new(n_molecules: usize, omega0: f64, rabi_splitting: f64) -> Result<Self> {
        let params = Self {
            n_molecules,
            omega0,
            rabi_splitting,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_molecules < 2 {
            return Err(Error::InvalidModel(format!(
                "n_molecules must be at least 2, got {}",
                self.n_molecules
            )));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if !(self.rabi_splitting > 0.0 && self.rabi_splitting.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "rabi_splitting must be positive, got {}",
                self.rabi_splitting
            )));
        }
        Ok(())
    }
}

/// Eigenstate of the single-excitation manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateLabel {
    Plus,
    Minus,
    /// Dark state with quasimomentum `d ∈ 1..N`.
    Dark(usize),
}

impl StateLabel {
    /// Energy above `ω₀` in units of `Ω_R/2`.
    pub fn ticks(self) -> i64 {
        match self {
            StateLabel::Plus => 1,
            StateLabel::Minus => -1,
            StateLabel::Dark(_) => 0,
        }
    }

    pub fn is_dark(self) -> bool {
        matches!(self, StateLabel::Dark(_))
    }

    /// Exchanges `|+⟩` and `|−⟩`, leaving dark states untouched.
    pub fn flip_polariton(self) -> Self {
        match self {
            StateLabel::Plus => StateLabel::Minus,
            StateLabel::Minus => StateLabel::Plus,
            dark => dark,
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Plus => f.write_str("+"),
            StateLabel::Minus => f.write_str("-"),
            StateLabel::Dark(d) => write!(f, "d{d}"),
        }
    }
}

impl FromStr for StateLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "+" | "plus" | "Plus" => return Ok(StateLabel::Plus),
            "-" | "minus" | "Minus" => return Ok(StateLabel::Minus),
            _ => {}
        }
        let digits = s
            .strip_prefix("dark:")
            .or_else(|| s.strip_prefix('d'))
            .ok_or_else(|| format!("unknown state label `{s}`"))?;
        digits
            .parse::<usize>()
            .map(StateLabel::Dark)
            .map_err(|_| format!("bad dark index in `{s}`"))
    }
}

impl Serialize for StateLabel {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StateLabel::Plus => serializer.serialize_str("plus"),
            StateLabel::Minus => serializer.serialize_str("minus"),
            StateLabel::Dark(d) => serializer.serialize_str(&format!("dark:{d}")),
        }
    }
}

impl<'de> Deserialize<'de> for StateLabel {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `ω_p − ω_q`, both as a float and as an exact tick count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionFrequency {
    pub ticks: i64,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ModelBasis {
    params: ModelParams,
    states: Vec<StateLabel>,
    /// `overlaps[(i, p)] = ⟨p|i⟩` for site `i + 1`.
    overlaps: DMatrix<Complex64>,
}

pub fn build_basis(params: ModelParams) -> Result<ModelBasis> {
    params.validate()?;
    let n = params.n_molecules;
    let mut states = vec![StateLabel::Plus, StateLabel::Minus];
    states.extend((1..n).map(StateLabel::Dark));

    let pol = 1.0 / (2.0 * n as f64).sqrt();
    let dark = 1.0 / (n as f64).sqrt();
    let overlaps = DMatrix::from_fn(n, n + 1, |row, col| {
        let site = (row + 1) as f64;
        match col {
            0 => Complex64::new(pol, 0.0),
            1 => Complex64::new(-pol, 0.0),
            _ => {
                let d = (col - 1) as f64;
                Complex64::from_polar(dark, -2.0 * PI * d * site / n as f64)
            }
        }
    });

    Ok(ModelBasis {
        params,
        states,
        overlaps,
    })
}

impl ModelBasis {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_molecules(&self) -> usize {
        self.params.n_molecules
    }

    /// Hilbert-space dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[StateLabel] {
        &self.states
    }

    pub fn dark_states(&self) -> impl Iterator<Item = StateLabel> + '_ {
        self.states[2..].iter().copied()
    }

    pub fn label(&self, index: usize) -> StateLabel {
        self.states[index]
    }

    pub fn contains(&self, label: StateLabel) -> bool {
        match label {
            StateLabel::Dark(d) => (1..self.n_molecules()).contains(&d),
            _ => true,
        }
    }

    /// Position of `label` in the canonical order `+, −, d1, …, d(N−1)`.
    pub fn index(&self, label: StateLabel) -> usize {
        debug_assert!(self.contains(label), "{label} not in basis");
        match label {
            StateLabel::Plus => 0,
            StateLabel::Minus => 1,
            StateLabel::Dark(d) => d + 1,
        }
    }

    pub fn try_index(&self, label: StateLabel) -> Result<usize> {
        if let StateLabel::Dark(d) = label {
            self.check_dark(d)?;
        }
        Ok(self.index(label))
    }

    /// Row-major position of `ρ_ab` in the vectorised density matrix.
    pub fn vec_index(&self, a: StateLabel, b: StateLabel) -> usize {
        self.index(a) * self.dim() + self.index(b)
    }

    pub fn vec_pair(&self, index: usize) -> (StateLabel, StateLabel) {
        let m = self.dim();
        (self.states[index / m], self.states[index % m])
    }

    /// Half the Rabi splitting: every transition frequency is an integer multiple of it.
    pub fn frequency_tick(&self) -> f64 {
        0.5 * self.params.rabi_splitting
    }

    pub fn frequency(&self, label: StateLabel) -> f64 {
        self.params.omega0 + label.ticks() as f64 * self.frequency_tick()
    }

    pub fn transition_frequency(&self, p: StateLabel, q: StateLabel) -> TransitionFrequency {
        let ticks = p.ticks() - q.ticks();
        TransitionFrequency {
            ticks,
            value: ticks as f64 * self.frequency_tick(),
        }
    }

    fn check_dark(&self, d: usize) -> Result<()> {
        let max = self.n_molecules() - 1;
        if d == 0 || d > max {
            return Err(Error::DarkIndexOutOfRange { d, max });
        }
        Ok(())
    }

    /// Quasimomentum partner `d̄ = N − d`.
    pub fn conjugate_dark(&self, d: usize) -> Result<usize> {
        self.check_dark(d)?;
        Ok(self.n_molecules() - d)
    }

    /// `⟨p|i⟩` for site `i ∈ 1..=N`.
    pub fn overlap(&self, site: usize, p: StateLabel) -> Complex64 {
        self.overlaps[(site - 1, self.index(p))]
    }

    pub fn overlaps(&self) -> &DMatrix<Complex64> {
        &self.overlaps
    }

    /// `⟨p|i⟩⟨i|q⟩`: matrix element of the site-`i` number operator.
    pub fn site_element(&self, site: usize, p: StateLabel, q: StateLabel) -> Complex64 {
        self.overlap(site, p) * self.overlap(site, q).conj()
    }

    /// `⟨p|P_vib|q⟩ = Σ_i ⟨p|i⟩⟨i|q⟩`.
    pub fn vib_projector_element(&self, p: StateLabel, q: StateLabel) -> Complex64 {
        (1..=self.n_molecules())
            .map(|i| self.site_element(i, p, q))
            .sum()
    }
}
