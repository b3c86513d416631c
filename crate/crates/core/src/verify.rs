//! Equation-of-motion extraction, the closed-form rate table, generator
//! comparison and the site-sum identities.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::bath::{BathTopology, RateSet};
use crate::error::{Error, Result};
use crate::generators::{assemble_generator, Liouvillian, Variant};
use crate::model::{ModelBasis, StateLabel};

pub type Pair = (StateLabel, StateLabel);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    SelfDecay,
    CoherenceTransfer,
    PopulationTransfer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EomEntry {
    pub source: Pair,
    pub coefficient: Complex64,
    pub kind: EntryKind,
}

/// Coefficients of `∂_t ρ̃_ab` in the interaction picture.
#[derive(Debug, Clone, PartialEq)]
pub struct EomRow {
    pub target: Pair,
    pub entries: Vec<EomEntry>,
}

impl EomRow {
    pub fn get(&self, c: StateLabel, d: StateLabel) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.source == (c, d))
            .map_or(Complex64::ZERO, |e| e.coefficient)
    }

    pub fn self_coefficient(&self) -> Complex64 {
        self.get(self.target.0, self.target.1)
    }

    /// Population rows couple only to populations, coherence rows only to
    /// coherences at the same transition frequency.
    pub fn is_consistent(&self, basis: &ModelBasis) -> bool {
        let (a, b) = self.target;
        let tick = basis.transition_frequency(a, b).ticks;
        self.entries.iter().all(|e| {
            let (c, d) = e.source;
            if a == b {
                c == d
            } else {
                c != d && basis.transition_frequency(c, d).ticks == tick
            }
        })
    }

    pub fn to_map(&self) -> BTreeMap<Pair, Complex64> {
        self.entries
            .iter()
            .map(|e| (e.source, e.coefficient))
            .collect()
    }
}

fn classify(target: Pair, source: Pair) -> EntryKind {
    if source == target {
        EntryKind::SelfDecay
    } else if source.0 == source.1 && target.0 == target.1 {
        EntryKind::PopulationTransfer
    } else {
        EntryKind::CoherenceTransfer
    }
}

/// Reads the dissipative row for `(a, b)`; the coherent part is excluded.
pub fn eom_row(l: &Liouvillian, a: StateLabel, b: StateLabel) -> EomRow {
    let basis = l.basis();
    let entries = l
        .dissipative()
        .row(basis.vec_index(a, b))
        .map(|(col, v)| {
            let source = basis.vec_pair(col);
            EomEntry {
                source,
                coefficient: v,
                kind: classify((a, b), source),
            }
        })
        .collect();
    EomRow {
        target: (a, b),
        entries,
    }
}

/// The ten row families of the rate table, including their conjugate and
/// `+ ↔ −` partners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    PlusMinus,
    MinusPlus,
    PlusDark,
    MinusDark,
    DarkPlus,
    DarkMinus,
    DarkDark,
    PlusPlus,
    MinusMinus,
    DarkPop,
}

impl RowKind {
    pub const ALL: [RowKind; 10] = [
        RowKind::PlusMinus,
        RowKind::MinusPlus,
        RowKind::PlusDark,
        RowKind::MinusDark,
        RowKind::DarkPlus,
        RowKind::DarkMinus,
        RowKind::DarkDark,
        RowKind::PlusPlus,
        RowKind::MinusMinus,
        RowKind::DarkPop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RowKind::PlusMinus => "rho_+-",
            RowKind::MinusPlus => "rho_-+",
            RowKind::PlusDark => "rho_+d",
            RowKind::MinusDark => "rho_-d",
            RowKind::DarkPlus => "rho_d+",
            RowKind::DarkMinus => "rho_d-",
            RowKind::DarkDark => "rho_d1d2",
            RowKind::PlusPlus => "rho_++",
            RowKind::MinusMinus => "rho_--",
            RowKind::DarkPop => "rho_dd",
        }
    }

    /// Every concrete target element of this family for `N` molecules.
    pub fn targets(self, n: usize) -> Vec<Pair> {
        use StateLabel::*;
        let darks = 1..n;
        match self {
            RowKind::PlusMinus => vec![(Plus, Minus)],
            RowKind::MinusPlus => vec![(Minus, Plus)],
            RowKind::PlusDark => darks.map(|d| (Plus, Dark(d))).collect(),
            RowKind::MinusDark => darks.map(|d| (Minus, Dark(d))).collect(),
            RowKind::DarkPlus => darks.map(|d| (Dark(d), Plus)).collect(),
            RowKind::DarkMinus => darks.map(|d| (Dark(d), Minus)).collect(),
            RowKind::DarkDark => darks
                .clone()
                .flat_map(|d1| {
                    (1..n)
                        .filter(move |&d2| d2 != d1)
                        .map(move |d2| (Dark(d1), Dark(d2)))
                })
                .collect(),
            RowKind::PlusPlus => vec![(Plus, Plus)],
            RowKind::MinusMinus => vec![(Minus, Minus)],
            RowKind::DarkPop => darks.map(|d| (Dark(d), Dark(d))).collect(),
        }
    }
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

type Coefficients = BTreeMap<Pair, f64>;

fn dark_of(label: StateLabel) -> usize {
    match label {
        StateLabel::Dark(d) => d,
        other => panic!("{other} is not a dark state"),
    }
}

fn flip(label: StateLabel) -> StateLabel {
    label.flip_polariton()
}

fn flipped(map: Coefficients) -> Coefficients {
    map.into_iter()
        .map(|((c, d), v)| ((flip(c), flip(d)), v))
        .collect()
}

fn transposed(map: Coefficients) -> Coefficients {
    map.into_iter().map(|((c, d), v)| ((d, c), v)).collect()
}

/// Closed-form coefficients of the five base rows.
fn base_row(
    kind: RowKind,
    variant: Variant,
    topology: BathTopology,
    n: usize,
    r: &RateSet,
    target: Pair,
) -> Coefficients {
    use StateLabel::*;
    let nf = n as f64;
    let (ga, ge, gp, bga, bge) = (
        r.gamma_a,
        r.gamma_e,
        r.gamma_phi,
        r.big_gamma_a,
        r.big_gamma_e,
    );
    let dp = variant == Variant::Dp;
    let mut out = Coefficients::new();
    match (kind, topology) {
        (RowKind::PlusMinus, BathTopology::Common) => {
            let extra = if dp { -gp / 4.0 } else { 0.0 };
            out.insert((Plus, Minus), -(ge + ga) / 8.0 + extra);
        }
        (RowKind::PlusMinus, BathTopology::Independent) => {
            let base = -(ge / (8.0 * nf)
                + bge * (nf - 1.0) / (4.0 * nf)
                + ga / (8.0 * nf)
                + bga * (nf - 1.0) / (4.0 * nf));
            let extra = if dp { -gp / (8.0 * nf) } else { 0.0 };
            out.insert((Plus, Minus), base + extra);
        }
        (RowKind::PlusDark, BathTopology::Common) => {
            let extra = if dp { -gp / 2.0 } else { 0.0 };
            out.insert(target, -ge / 8.0 - gp / 8.0 + extra);
        }
        (RowKind::PlusDark, BathTopology::Independent) => {
            let d = dark_of(target.1);
            if dp {
                let lead = ge / (8.0 * nf) + bga / (4.0 * nf) + bge * (nf - 1.0) / (4.0 * nf);
                let rest = bge / (4.0 * nf) + gp / (8.0 * nf) + gp * (nf - 1.0) / (2.0 * nf);
                out.insert(target, -lead - rest);
            } else {
                let lead = ge / (8.0 * nf)
                    + bge * (nf - 1.0) / (4.0 * nf)
                    + bga / (4.0 * nf)
                    + bge / (4.0 * nf)
                    + gp * (nf - 2.0) / (2.0 * nf);
                out.insert(target, -lead - gp / (8.0 * nf));
                *out.entry((Dark((n - d) % n), Minus)).or_default() += -bga / (2.0 * nf);
            }
        }
        (RowKind::DarkDark, BathTopology::Common) | (RowKind::DarkPop, BathTopology::Common) => {}
        (RowKind::DarkDark, BathTopology::Independent) => {
            let (d1, d2) = (dark_of(target.0), dark_of(target.1));
            out.insert(
                target,
                -(bga / (2.0 * nf) + bge / (2.0 * nf) + gp * (nf - 2.0) / nf),
            );
            let shift = (d1 + n - d2) % n;
            for d in 1..n {
                for dprime in 1..n {
                    if (d, dprime) != (d1, d2) && (d + n - dprime) % n == shift {
                        out.insert((Dark(d), Dark(dprime)), gp / nf);
                    }
                }
            }
        }
        (RowKind::PlusPlus, BathTopology::Common) => {
            out.insert((Plus, Plus), -ge / 4.0);
            out.insert((Minus, Minus), ga / 4.0);
        }
        (RowKind::PlusPlus, BathTopology::Independent) => {
            out.insert(
                (Plus, Plus),
                -ge / (4.0 * nf) - bge * (nf - 1.0) / (2.0 * nf),
            );
            out.insert((Minus, Minus), ga / (4.0 * nf));
            for d in 1..n {
                out.insert((Dark(d), Dark(d)), bga / (2.0 * nf));
            }
        }
        (RowKind::DarkPop, BathTopology::Independent) => {
            out.insert((Plus, Plus), bge / (2.0 * nf));
            out.insert((Minus, Minus), bga / (2.0 * nf));
            out.insert(
                target,
                -bga / (2.0 * nf) - bge / (2.0 * nf) - gp * (nf - 2.0) / nf,
            );
            for d in 1..n {
                if Dark(d) != target.0 {
                    out.insert((Dark(d), Dark(d)), gp / nf);
                }
            }
        }
        _ => unreachable!("{kind} is a partner row"),
    }
    out
}

/// Closed-form coefficients of `∂_t ρ̃_target` for any row family.
///
/// Partner rows follow from the base rows by complex conjugation (real
/// coefficients, transposed sources) or by the `+ ↔ −`, `γ_a ↔ γ_e`,
/// `Γ_a ↔ Γ_e` substitution.
pub fn analytic_row(
    kind: RowKind,
    variant: Variant,
    topology: BathTopology,
    n: usize,
    rates: &RateSet,
    target: Pair,
) -> BTreeMap<Pair, f64> {
    let swapped = rates.swapped();
    let t = (target.1, target.0);
    let f = (flip(target.0), flip(target.1));
    match kind {
        RowKind::PlusMinus
        | RowKind::PlusDark
        | RowKind::DarkDark
        | RowKind::PlusPlus
        | RowKind::DarkPop => base_row(kind, variant, topology, n, rates, target),
        RowKind::MinusPlus => {
            transposed(base_row(RowKind::PlusMinus, variant, topology, n, rates, t))
        }
        RowKind::DarkPlus => {
            transposed(base_row(RowKind::PlusDark, variant, topology, n, rates, t))
        }
        RowKind::MinusDark => flipped(base_row(
            RowKind::PlusDark,
            variant,
            topology,
            n,
            &swapped,
            f,
        )),
        RowKind::DarkMinus => {
            let ft = (flip(target.1), flip(target.0));
            transposed(flipped(base_row(
                RowKind::PlusDark,
                variant,
                topology,
                n,
                &swapped,
                ft,
            )))
        }
        RowKind::MinusMinus => flipped(base_row(
            RowKind::PlusPlus,
            variant,
            topology,
            n,
            &swapped,
            f,
        )),
    }
}

fn pair_label((a, b): Pair) -> String {
    format!("{a},{b}")
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientEntry {
    pub source: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Cell {
    pub row: RowKind,
    pub target: String,
    pub variant: Variant,
    pub bath: BathTopology,
    pub extracted: Vec<CoefficientEntry>,
    pub analytic: Vec<CoefficientEntry>,
    pub abs_diff: f64,
    /// Source with the largest discrepancy.
    pub worst_source: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Report {
    pub n: usize,
    pub rates: RateSet,
    pub cells: Vec<Table1Cell>,
    /// `∂ρ_{−x}` against `∂ρ_{+x}` of the generator with swapped rates.
    pub symmetry_max_diff: f64,
}

pub const TABLE1_TOLERANCE: f64 = 1e-10;

impl Table1Report {
    pub fn max_diff(&self) -> f64 {
        self.cells.iter().map(|c| c.abs_diff).fold(0.0, f64::max)
    }

    pub fn failures(&self, tol: f64) -> impl Iterator<Item = &Table1Cell> {
        self.cells
            .iter()
            .filter(move |c| c.abs_diff.is_nan() || c.abs_diff > tol)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.failures(tol).next().is_none()
    }

    /// Aligned text table, one line per (row family, bath, variant) with the
    /// worst target of that family.
    pub fn render(&self) -> String {
        let mut grouped: BTreeMap<(RowKind, &'static str, &'static str), &Table1Cell> =
            BTreeMap::new();
        for cell in &self.cells {
            let key = (cell.row, cell.bath.as_str(), cell.variant.as_str());
            let slot = grouped.entry(key).or_insert(cell);
            if cell.abs_diff > slot.abs_diff {
                *slot = cell;
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "N = {}", self.n);
        let r = &self.rates;
        let _ = writeln!(
            out,
            "gamma_a = {}, gamma_e = {}, gamma_phi = {}, Gamma_a = {}, Gamma_e = {}",
            r.gamma_a, r.gamma_e, r.gamma_phi, r.big_gamma_a, r.big_gamma_e
        );
        let _ = writeln!(
            out,
            "{:<10} {:<12} {:<10} {:<8} {:>10}  status",
            "row", "bath", "variant", "target", "abs_diff"
        );
        for ((row, bath, variant), cell) in grouped {
            let status = if cell.abs_diff <= TABLE1_TOLERANCE {
                "ok"
            } else {
                "FAIL"
            };
            let _ = writeln!(
                out,
                "{:<10} {:<12} {:<10} {:<8} {:>10.2e}  {status}",
                row.as_str(),
                bath,
                variant,
                cell.target,
                cell.abs_diff
            );
        }
        let _ = writeln!(
            out,
            "symmetry partner max diff {:.2e}",
            self.symmetry_max_diff
        );
        out
    }
}

fn entries_of(map: impl IntoIterator<Item = (Pair, Complex64)>) -> Vec<CoefficientEntry> {
    map.into_iter()
        .map(|(p, v)| CoefficientEntry {
            source: pair_label(p),
            re: v.re,
            im: v.im,
        })
        .collect()
}

fn row_difference(
    extracted: &BTreeMap<Pair, Complex64>,
    analytic: &BTreeMap<Pair, f64>,
) -> (f64, Option<Pair>) {
    let mut worst = (0.0, None);
    for key in extracted.keys().chain(analytic.keys()) {
        let x = extracted.get(key).copied().unwrap_or_default();
        let y = Complex64::new(analytic.get(key).copied().unwrap_or_default(), 0.0);
        let d = (x - y).norm();
        if d > worst.0 || worst.1.is_none() {
            worst = (d, Some(*key));
        }
    }
    worst
}

/// Compares every row family, both variants and both bath topologies.
pub fn table1_report(basis: &ModelBasis, rates: &RateSet) -> Result<Table1Report> {
    let n = basis.n_molecules();
    let mut cells = Vec::new();
    let mut symmetry_max_diff: f64 = 0.0;
    for topology in [BathTopology::Common, BathTopology::Independent] {
        for variant in [Variant::Corrected, Variant::Dp] {
            let l = assemble_generator(variant, topology, basis, rates)?;
            for kind in RowKind::ALL {
                for target in kind.targets(n) {
                    let row = eom_row(&l, target.0, target.1);
                    let extracted = row.to_map();
                    let analytic = analytic_row(kind, variant, topology, n, rates, target);
                    let (abs_diff, worst) = row_difference(&extracted, &analytic);
                    cells.push(Table1Cell {
                        row: kind,
                        target: pair_label(target),
                        variant,
                        bath: topology,
                        extracted: entries_of(extracted),
                        analytic: entries_of(
                            analytic
                                .into_iter()
                                .map(|(k, v)| (k, Complex64::new(v, 0.0))),
                        ),
                        abs_diff,
                        worst_source: worst.map(pair_label),
                    });
                }
            }
            symmetry_max_diff =
                symmetry_max_diff.max(symmetry_partner_diff(basis, variant, topology, rates)?);
        }
    }
    Ok(Table1Report {
        n,
        rates: *rates,
        cells,
        symmetry_max_diff,
    })
}

/// Largest mismatch between extracted `−` rows and `+` rows of the generator
/// with swapped rates, relabelled.
pub fn symmetry_partner_diff(
    basis: &ModelBasis,
    variant: Variant,
    topology: BathTopology,
    rates: &RateSet,
) -> Result<f64> {
    use StateLabel::*;
    let l = assemble_generator(variant, topology, basis, rates)?;
    let ls = assemble_generator(variant, topology, basis, &rates.swapped())?;
    let mut worst: f64 = 0.0;
    let mut targets = vec![(Plus, Minus), (Plus, Plus)];
    targets.extend(basis.dark_states().map(|d| (Plus, d)));
    for (a, b) in targets {
        let partner = eom_row(&l, flip(a), flip(b)).to_map();
        let reference: BTreeMap<Pair, Complex64> = eom_row(&ls, a, b)
            .to_map()
            .into_iter()
            .map(|((c, d), v)| ((flip(c), flip(d)), v))
            .collect();
        for key in partner.keys().chain(reference.keys()) {
            let x = partner.get(key).copied().unwrap_or_default();
            let y = reference.get(key).copied().unwrap_or_default();
            worst = worst.max((x - y).norm());
        }
    }
    Ok(worst)
}

/// `d/dγ_φ` of the `ρ_{+−}` self-coefficient by finite differences.
pub fn dephasing_derivative(
    basis: &ModelBasis,
    variant: Variant,
    topology: BathTopology,
    rates: &RateSet,
) -> Result<f64> {
    use StateLabel::*;
    let coefficient = |gamma_phi: f64| -> Result<f64> {
        let r = RateSet {
            gamma_phi,
            ..*rates
        };
        let l = assemble_generator(variant, topology, basis, &r)?;
        Ok(eom_row(&l, Plus, Minus).self_coefficient().re)
    };
    let g = rates.gamma_phi;
    if g > 0.0 {
        let h = 1e-4 * g;
        Ok((coefficient(g + h)? - coefficient(g - h)?) / (2.0 * h))
    } else {
        let h = 1e-6;
        Ok((coefficient(h)? - coefficient(0.0)?) / h)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffEntry {
    pub target: String,
    pub source: String,
    pub row: usize,
    pub col: usize,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorDiff {
    pub max_abs: f64,
    pub entries: Vec<DiffEntry>,
}

pub const DIFF_LISTING_THRESHOLD: f64 = 1e-12;

/// Entrywise comparison of the dissipative parts; lists differences above `1e−12`.
pub fn compare_generators(l1: &Liouvillian, l2: &Liouvillian) -> Result<GeneratorDiff> {
    if l1.dim() != l2.dim() {
        return Err(Error::DimensionMismatch {
            expected: l1.dim(),
            found: l2.dim(),
        });
    }
    let (a, b) = (l1.dissipative(), l2.dissipative());
    let diff = a.sub(b);
    let basis = l1.basis();
    let mut entries = Vec::new();
    let mut max_abs: f64 = 0.0;
    for (r, c, v) in diff.iter() {
        let d = v.norm();
        max_abs = max_abs.max(d);
        if d > DIFF_LISTING_THRESHOLD {
            let (x, y) = (a.get(r, c), b.get(r, c));
            entries.push(DiffEntry {
                target: pair_label(basis.vec_pair(r)),
                source: pair_label(basis.vec_pair(c)),
                row: r,
                col: c,
                lhs: [x.re, x.im],
                rhs: [y.re, y.im],
                abs_diff: d,
            });
        }
    }
    Ok(GeneratorDiff { max_abs, entries })
}

impl GeneratorDiff {
    pub fn render(&self) -> String {
        let mut out = format!("max abs difference {:.3e}\n", self.max_abs);
        for e in &self.entries {
            let _ = writeln!(
                out,
                "d rho({}) <- rho({}): {:+.6e}{:+.6e}i vs {:+.6e}{:+.6e}i (|diff| {:.3e})",
                e.target, e.source, e.lhs[0], e.lhs[1], e.rhs[0], e.rhs[1], e.abs_diff
            );
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub max_deviation: f64,
    pub worst_pair: (usize, usize),
    pub pairs_checked: usize,
}

pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// `Σ_i ⟨±|i⟩⟨i|d₁⟩⟨∓|i⟩⟨i|d₂⟩ = −δ_{d₂, N−d₁} / 2N` over all dark pairs.
pub fn quasimomentum_identity(basis: &ModelBasis) -> IdentityReport {
    use StateLabel::*;
    let n = basis.n_molecules();
    let mut report = IdentityReport {
        n,
        max_deviation: 0.0,
        worst_pair: (1, 1),
        pairs_checked: 0,
    };
    for d1 in 1..n {
        for d2 in 1..n {
            let expected = if (d1 + d2) % n == 0 {
                -1.0 / (2.0 * n as f64)
            } else {
                0.0
            };
            for (p, q) in [(Plus, Minus), (Minus, Plus)] {
                let sum: Complex64 = (1..=n)
                    .map(|i| {
                        basis.site_element(i, p, Dark(d1)) * basis.site_element(i, q, Dark(d2))
                    })
                    .sum();
                let dev = (sum - expected).norm();
                if dev > report.max_deviation {
                    report.max_deviation = dev;
                    report.worst_pair = (d1, d2);
                }
            }
            report.pairs_checked += 1;
        }
    }
    report
}

impl IdentityReport {
    pub fn passes(&self) -> bool {
        self.max_deviation <= IDENTITY_TOLERANCE
    }
}

const MAX_KOSSAKOWSKI_DIM: usize = 700;

#[derive(Debug, Clone, Serialize)]
pub struct KossakowskiReport {
    pub ticks: i64,
    pub operators: Vec<String>,
    /// Hermitian eigenvalues of the identity-projected matrix, ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
    #[serde(skip)]
    pub matrix: DMatrix<Complex64>,
}

impl KossakowskiReport {
    pub fn second_largest(&self) -> f64 {
        let k = self.eigenvalues.len();
        if k < 2 {
            0.0
        } else {
            self.eigenvalues[k - 2]
        }
    }
}

/// Matrix units `|a⟩⟨i|` with `ω_a − ω_i` equal to `ticks` half Rabi splittings.
pub fn sector_operators(basis: &ModelBasis, ticks: i64) -> Vec<Pair> {
    let states = basis.states();
    states
        .iter()
        .flat_map(|&a| states.iter().map(move |&i| (a, i)))
        .filter(|&(a, i)| basis.transition_frequency(a, i).ticks == ticks)
        .collect()
}

/// Coefficient matrix of the dissipator over the matrix units of one
/// frequency sector, `χ_{(a,i),(b,j)} = 𝓛_{(a,b),(i,j)}`.
///
/// In the zero-frequency sector the directions `|K⟩⟩⟨⟨1| + h.c.` carry the
/// anticommutator and Hamiltonian parts, so the identity component is
/// projected out before diagonalising.
pub fn kossakowski_sector(l: &Liouvillian, ticks: i64) -> Result<KossakowskiReport> {
    let basis = l.basis();
    let ops = sector_operators(basis, ticks);
    let k = ops.len();
    if k > MAX_KOSSAKOWSKI_DIM {
        return Err(Error::TooLarge(format!(
            "sector of {k} operators exceeds {MAX_KOSSAKOWSKI_DIM}"
        )));
    }
    let sup = l.dissipative();
    let mut chi = DMatrix::<Complex64>::from_fn(k, k, |x, y| {
        let ((a, i), (b, j)) = (ops[x], ops[y]);
        sup.get(basis.vec_index(a, b), basis.vec_index(i, j))
    });
    let hermiticity_defect = (&chi - chi.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    chi = (&chi + chi.adjoint()) * Complex64::new(0.5, 0.0);
    if ticks == 0 {
        let mut u = DVector::<Complex64>::from_fn(k, |x, _| {
            if ops[x].0 == ops[x].1 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        let norm = u.norm();
        u /= Complex64::new(norm, 0.0);
        let proj = DMatrix::<Complex64>::identity(k, k) - &u * u.adjoint();
        chi = &proj * chi * &proj;
    }
    let mut eigenvalues: Vec<f64> = if k == 0 {
        Vec::new()
    } else {
        chi.clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect()
    };
    eigenvalues.sort_by(f64::total_cmp);
    Ok(KossakowskiReport {
        ticks,
        operators: ops.into_iter().map(pair_label).collect(),
        min_eigenvalue: eigenvalues.first().copied().unwrap_or(0.0),
        eigenvalues,
        hermiticity_defect,
        matrix: chi,
    })
}

/// Zero-frequency (dephasing) sector.
pub fn kossakowski_check(l: &Liouvillian) -> Result<KossakowskiReport> {
    kossakowski_sector(l, 0)
}

pub fn kossakowski_all_sectors(l: &Liouvillian) -> Result<Vec<KossakowskiReport>> {
    (-2..=2).map(|t| kossakowski_sector(l, t)).collect()
}

/// `(½, ½, 1, …, 1)` over the projectors `σ_{++}, σ_{−−}, σ_{dd}`.
pub fn common_dephasing_vector(n: usize) -> DVector<f64> {
    DVector::from_fn(n + 1, |k, _| if k < 2 { 0.5 } else { 1.0 })
}

/// Largest mismatch between the generator's coherence-dephasing entries and
/// those of `Σ c_kl (P_k ρ P_l − ½{P_l P_k, ρ})` over the basis projectors,
/// `𝓛_{(a,b),(a,b)} = c_ab − ½(c_aa + c_bb)`, for `a ≠ b` at equal frequency.
pub fn projector_representation_residual(l: &Liouvillian, c: &DMatrix<f64>) -> f64 {
    let basis = l.basis();
    let m = basis.dim();
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let (la, lb) = (basis.label(a), basis.label(b));
            if a == b || basis.transition_frequency(la, lb).ticks != 0 {
                continue;
            }
            let expected = c[(a, b)] - 0.5 * (c[(a, a)] + c[(b, b)]);
            let idx = basis.vec_index(la, lb);
            worst = worst.max((l.dissipative().get(idx, idx) - expected).norm());
        }
    }
    worst
}
