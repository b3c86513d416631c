//! Density-matrix propagation, observables, decay-rate fits and steady states.

use std::collections::VecDeque;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{devectorize, vectorize, Liouvillian};
use crate::model::{ModelBasis, StateLabel};
use crate::superop::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Schroedinger,
    /// Dissipator only: `H_S` is diagonal and every secular block couples
    /// equal-frequency elements, so the two pictures differ by one phase per block.
    Interaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Rk4,
    /// Dense `exp(L Δt)` stepping, superoperator dimension ≤ 81.
    MatrixExponential,
}

pub const MAX_EXPM_DIM: usize = 81;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        let grid = Self {
            t_start,
            t_end,
            n_steps,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite()) || self.t_end <= self.t_start {
            return Err(Error::InvalidGrid(format!(
                "need t_end > t_start, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if self.n_steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "n_steps must be at least 2, got {}",
                self.n_steps
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / self.n_steps as f64
    }

    /// The `n_steps + 1` sample times, end points included.
    pub fn times(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.n_steps)
            .map(|k| self.t_start + k as f64 * h)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub integrator: Integrator,
    /// Largest internal RK4 step. Defaults to `0.01 / max |L_kk|`.
    pub max_step: Option<f64>,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::Rk4,
            max_step: None,
        }
    }
}

/// `0.01 / max |L_kk|`, or `None` for a generator with empty diagonal.
pub fn default_step(matrix: &CsrMatrix) -> Option<f64> {
    let largest = (0..matrix.dim())
        .map(|k| matrix.get(k, k).norm())
        .fold(0.0, f64::max);
    (largest > 0.0).then(|| 0.01 / largest)
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryData {
    Full(Vec<DMatrix<Complex64>>),
    Reduced {
        tracked: Vec<(StateLabel, StateLabel)>,
        values: Vec<Vec<Complex64>>,
    },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub picture: Picture,
    pub times: Vec<f64>,
    pub data: TrajectoryData,
    basis: ModelBasis,
}

impl Trajectory {
    pub fn basis(&self) -> &ModelBasis {
        &self.basis
    }

    pub fn states(&self) -> Option<&[DMatrix<Complex64>]> {
        match &self.data {
            TrajectoryData::Full(states) => Some(states),
            TrajectoryData::Reduced { .. } => None,
        }
    }

    /// Time series of `⟨a|ρ|b⟩`; `None` for elements not tracked in reduced mode.
    pub fn element(&self, a: StateLabel, b: StateLabel) -> Option<Vec<(f64, Complex64)>> {
        match &self.data {
            TrajectoryData::Full(states) => {
                let (i, j) = (self.basis.index(a), self.basis.index(b));
                Some(
                    self.times
                        .iter()
                        .zip(states)
                        .map(|(&t, rho)| (t, rho[(i, j)]))
                        .collect(),
                )
            }
            TrajectoryData::Reduced { tracked, values } => {
                let k = tracked.iter().position(|&p| p == (a, b))?;
                Some(
                    self.times
                        .iter()
                        .zip(values)
                        .map(|(&t, v)| (t, v[k]))
                        .collect(),
                )
            }
        }
    }

    /// CSV with header `t,re(<a|rho|b>),im(<a|rho|b>),…`.
    pub fn write_csv<W: Write>(
        &self,
        tracked: &[(StateLabel, StateLabel)],
        mut out: W,
    ) -> io::Result<()> {
        let series: Vec<Vec<(f64, Complex64)>> = tracked
            .iter()
            .map(|&(a, b)| {
                self.element(a, b).ok_or_else(|| {
                    io::Error::new(
                        io::ErrorKind::InvalidInput,
                        format!("<{a}|rho|{b}> not tracked"),
                    )
                })
            })
            .collect::<io::Result<_>>()?;
        write!(out, "t")?;
        for (a, b) in tracked {
            write!(out, ",re(<{a}|rho|{b}>),im(<{a}|rho|{b}>)")?;
        }
        writeln!(out)?;
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{}", format_number(*t))?;
            for s in &series {
                write!(
                    out,
                    ",{},{}",
                    format_number(s[k].1.re),
                    format_number(s[k].1.im)
                )?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn observable(
    basis: &ModelBasis,
    rho: &DMatrix<Complex64>,
    a: StateLabel,
    b: StateLabel,
) -> Complex64 {
    rho[(basis.index(a), basis.index(b))]
}

pub fn min_eigenvalue(rho: &DMatrix<Complex64>) -> f64 {
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn hermiticity_defect(rho: &DMatrix<Complex64>) -> f64 {
    (rho - rho.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Checks Hermiticity, unit trace and positivity to `1e−10`.
pub fn validate_density_matrix(basis: &ModelBasis, rho: &DMatrix<Complex64>) -> Result<()> {
    let m = basis.dim();
    if rho.nrows() != m || rho.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: rho.nrows(),
        });
    }
    if hermiticity_defect(rho) > 1e-10 {
        return Err(Error::InvalidState("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr - Complex64::ONE).norm() > 1e-10 {
        return Err(Error::InvalidState(format!("trace {tr} != 1")));
    }
    let lo = min_eigenvalue(rho);
    if lo < -1e-10 {
        return Err(Error::InvalidState(format!("negative eigenvalue {lo:e}")));
    }
    Ok(())
}

/// `|ψ⟩⟨ψ|` for `ψ ∝ Σ amp·|label⟩`, normalised.
pub fn pure_state(
    basis: &ModelBasis,
    amplitudes: &[(StateLabel, Complex64)],
) -> Result<DMatrix<Complex64>> {
    let mut psi = nalgebra::DVector::<Complex64>::zeros(basis.dim());
    for &(label, amp) in amplitudes {
        psi[basis.try_index(label)?] += amp;
    }
    let norm = psi.norm();
    if norm == 0.0 {
        return Err(Error::InvalidState("zero state vector".into()));
    }
    psi /= Complex64::new(norm, 0.0);
    Ok(&psi * psi.adjoint())
}

/// Equal mixture of all `N + 1` single-excitation states.
pub fn maximally_mixed(basis: &ModelBasis) -> DMatrix<Complex64> {
    let m = basis.dim();
    DMatrix::identity(m, m) * Complex64::new(1.0 / m as f64, 0.0)
}

fn generator_for(l: &Liouvillian, picture: Picture) -> CsrMatrix {
    match picture {
        Picture::Interaction => l.dissipative().clone(),
        Picture::Schroedinger => l.full(),
    }
}

/// Classical fourth-order Runge–Kutta for `ẋ = A x` with reusable buffers.
struct Rk4 {
    matrix: CsrMatrix,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4 {
    fn new(matrix: CsrMatrix) -> Self {
        let n = matrix.dim();
        let z = || vec![Complex64::ZERO; n];
        Self {
            matrix,
            k: [z(), z(), z(), z()],
            tmp: z(),
        }
    }

    fn step(&mut self, x: &mut [Complex64], h: f64) {
        let half = Complex64::new(0.5 * h, 0.0);
        let full = Complex64::new(h, 0.0);
        self.matrix.matvec_into(x, &mut self.k[0]);
        for stage in 1..4 {
            let scale = if stage == 3 { full } else { half };
            let (prev, rest) = self.k.split_at_mut(stage);
            for ((t, xi), ki) in self.tmp.iter_mut().zip(x.iter()).zip(&prev[stage - 1]) {
                *t = xi + scale * ki;
            }
            self.matrix.matvec_into(&self.tmp, &mut rest[0]);
        }
        let w = Complex64::new(h / 6.0, 0.0);
        for (i, xi) in x.iter_mut().enumerate() {
            let k = &self.k;
            *xi += w * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
    }
}

enum Stepper {
    Rk4 { rk: Rk4, substeps: usize, h: f64 },
    Exp(DMatrix<Complex64>),
}

impl Stepper {
    fn new(
        matrix: CsrMatrix,
        interval: f64,
        options: &PropagationOptions,
        fallback_step: Option<f64>,
    ) -> Result<Self> {
        match options.integrator {
            Integrator::Rk4 => {
                let max_step = options.max_step.or(fallback_step).unwrap_or(interval);
                let substeps = (interval / max_step).ceil().max(1.0) as usize;
                Ok(Stepper::Rk4 {
                    rk: Rk4::new(matrix),
                    substeps,
                    h: interval / substeps as f64,
                })
            }
            Integrator::MatrixExponential => {
                if matrix.dim() > MAX_EXPM_DIM {
                    return Err(Error::TooLarge(format!(
                        "matrix-exponential stepping needs dimension <= {MAX_EXPM_DIM}, got {}",
                        matrix.dim()
                    )));
                }
                Ok(Stepper::Exp(
                    (matrix.to_dense() * Complex64::new(interval, 0.0)).exp(),
                ))
            }
        }
    }

    fn advance(&mut self, x: &mut [Complex64]) {
        match self {
            Stepper::Rk4 { rk, substeps, h } => {
                for _ in 0..*substeps {
                    rk.step(x, *h);
                }
            }
            Stepper::Exp(prop) => {
                let v = nalgebra::DVector::from_column_slice(x);
                let out = &*prop * v;
                x.copy_from_slice(out.as_slice());
            }
        }
    }
}

const TRACE_DRIFT_LIMIT: f64 = 1e-6;

fn trace_of(x: &[Complex64], diagonal: &[usize]) -> Complex64 {
    diagonal.iter().map(|&k| x[k]).sum()
}

pub fn propagate(
    l: &Liouvillian,
    rho0: &DMatrix<Complex64>,
    grid: TimeGrid,
    picture: Picture,
    options: PropagationOptions,
) -> Result<Trajectory> {
    grid.validate()?;
    let basis = l.basis();
    validate_density_matrix(basis, rho0)?;
    let m = basis.dim();
    let times = grid.times();
    let diagonal: Vec<usize> = (0..m).map(|a| a * m + a).collect();

    let generator = generator_for(l, picture);
    let fallback = default_step(&generator);
    let mut stepper = Stepper::new(generator, grid.step(), &options, fallback)?;
    let mut x = vectorize(rho0);
    let tr0 = trace_of(&x, &diagonal);
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for &t in &times[1..] {
        stepper.advance(&mut x);
        let drift = (trace_of(&x, &diagonal) - tr0).norm();
        if drift.is_nan() || drift > TRACE_DRIFT_LIMIT {
            return Err(Error::StepInstability { t, drift });
        }
        states.push(devectorize(&x, m));
    }
    Ok(Trajectory {
        grid,
        picture,
        times,
        data: TrajectoryData::Full(states),
        basis: basis.clone(),
    })
}

/// Vectorised indices that `seeds` depend on, closed under the generator's
/// couplings, in ascending order.
pub fn coupling_closure(matrix: &CsrMatrix, seeds: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; matrix.dim()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(r) = queue.pop_front() {
        for (c, _) in matrix.row(r) {
            if !seen[c] {
                seen[c] = true;
                queue.push_back(c);
            }
        }
    }
    (0..matrix.dim()).filter(|&k| seen[k]).collect()
}

/// Propagates only the secular block that feeds the tracked elements.
///
/// Exact: rows in the coupling closure depend on nothing outside it. Memory
/// holds just the tracked values per time point.
pub fn propagate_reduced(
    l: &Liouvillian,
    rho0: &DMatrix<Complex64>,
    grid: TimeGrid,
    picture: Picture,
    tracked: &[(StateLabel, StateLabel)],
    options: PropagationOptions,
) -> Result<Trajectory> {
    grid.validate()?;
    let basis = l.basis();
    validate_density_matrix(basis, rho0)?;
    for &(a, b) in tracked {
        basis.try_index(a)?;
        basis.try_index(b)?;
    }
    let m = basis.dim();
    let generator = generator_for(l, picture);
    let seeds: Vec<usize> = tracked
        .iter()
        .map(|&(a, b)| basis.vec_index(a, b))
        .collect();
    let block = coupling_closure(&generator, &seeds);
    let local = |global: usize| block.binary_search(&global).expect("seed in closure");
    let tracked_local: Vec<usize> = seeds.iter().map(|&g| local(g)).collect();
    let diagonal: Vec<usize> = block
        .iter()
        .enumerate()
        .filter(|(_, &g)| g / m == g % m)
        .map(|(k, _)| k)
        .collect();

    let full0 = vectorize(rho0);
    let mut x: Vec<Complex64> = block.iter().map(|&g| full0[g]).collect();
    let fallback = default_step(&generator);
    let mut stepper = Stepper::new(generator.restrict(&block), grid.step(), &options, fallback)?;
    let tr0 = trace_of(&x, &diagonal);
    let times = grid.times();
    let mut values = Vec::with_capacity(times.len());
    values.push(tracked_local.iter().map(|&k| x[k]).collect());
    for &t in &times[1..] {
        stepper.advance(&mut x);
        let drift = (trace_of(&x, &diagonal) - tr0).norm();
        if drift.is_nan() || drift > TRACE_DRIFT_LIMIT {
            return Err(Error::StepInstability { t, drift });
        }
        values.push(tracked_local.iter().map(|&k| x[k]).collect());
    }
    Ok(Trajectory {
        grid,
        picture,
        times,
        data: TrajectoryData::Reduced {
            tracked: tracked.to_vec(),
            values,
        },
        basis: basis.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    /// `|value|` increased somewhere in the series (coherence transfer or oscillation).
    pub non_monotonic: bool,
}

/// Least-squares slope of `ln|value|` against `t` over the window where
/// `|value|` falls from 90 % to 10 % of its initial magnitude.
pub fn fit_decay_rate(series: &[(f64, Complex64)]) -> Result<DecayFit> {
    if series.len() < 3 {
        return Err(Error::InvalidGrid("need at least 3 samples to fit".into()));
    }
    let mags: Vec<f64> = series.iter().map(|(_, v)| v.norm()).collect();
    let a0 = mags[0];
    if a0.is_nan() || a0 <= 0.0 {
        return Err(Error::InvalidState("initial value is zero".into()));
    }
    let non_monotonic = mags.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12));

    let start = mags.iter().position(|&a| a <= 0.9 * a0).unwrap_or(0);
    let end = mags
        .iter()
        .position(|&a| a < 0.1 * a0)
        .unwrap_or(mags.len());
    let (start, end) = if end > start + 2 {
        (start, end)
    } else {
        (0, end.max(3).min(mags.len()))
    };

    let pts: Vec<(f64, f64)> = (start..end)
        .filter(|&k| mags[k] > 0.0)
        .map(|k| (series[k].0, mags[k].ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidState(
            "no positive samples in fit window".into(),
        ));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - ym).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - ym - slope * (p.0 - tm)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(DecayFit {
        rate: -slope,
        r_squared,
        window: (pts[0].0, pts[pts.len() - 1].0),
        non_monotonic,
    })
}

/// Eigenvalues of a small dense complex matrix.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    if m.is_empty() {
        return Vec::new();
    }
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}

/// Eigenvalues of the dissipator restricted to the listed elements.
pub fn block_eigenvalues(l: &Liouvillian, pairs: &[(StateLabel, StateLabel)]) -> Vec<Complex64> {
    let basis = l.basis();
    let idx: Vec<usize> = pairs.iter().map(|&(a, b)| basis.vec_index(a, b)).collect();
    eigenvalues(&l.dissipative().restrict(&idx).to_dense())
}

/// Generator eigenvalues of a coupled block recovered from trajectories
/// alone: with `X(t)` the tracked vectors of the runs as columns,
/// `Φ = X(T) X(0)⁻¹` and `λ = ln(μ_Φ) / T`.
pub fn block_rates_from_trajectories(
    runs: &[Trajectory],
    pairs: &[(StateLabel, StateLabel)],
    sample: usize,
) -> Result<Vec<Complex64>> {
    let k = pairs.len();
    if runs.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: runs.len(),
        });
    }
    let mut x0 = DMatrix::<Complex64>::zeros(k, k);
    let mut xt = DMatrix::<Complex64>::zeros(k, k);
    for (col, run) in runs.iter().enumerate() {
        for (row, &(a, b)) in pairs.iter().enumerate() {
            let series = run
                .element(a, b)
                .ok_or_else(|| Error::InvalidState(format!("<{a}|rho|{b}> not tracked")))?;
            x0[(row, col)] = series[0].1;
            xt[(row, col)] = series[sample].1;
        }
    }
    let inv = x0.try_inverse().ok_or_else(|| {
        Error::InvalidState("initial block vectors are linearly dependent".into())
    })?;
    let dt = runs[0].times[sample] - runs[0].times[0];
    Ok(eigenvalues(&(xt * inv))
        .into_iter()
        .map(|mu| mu.ln() / dt)
        .collect())
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    /// Orthonormal kernel basis of the full Liouvillian, as matrices.
    pub kernel: Vec<DMatrix<Complex64>>,
    /// Unit-trace positive semidefinite elements found in the kernel.
    pub states: Vec<DMatrix<Complex64>>,
    pub singular_values: Vec<f64>,
    pub warning: Option<String>,
}

impl SteadyState {
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    /// Distance of `rho` from the span of the kernel.
    pub fn residual(&self, rho: &DMatrix<Complex64>) -> f64 {
        let mut rem = rho.clone();
        for k in &self.kernel {
            let overlap = k
                .iter()
                .zip(rho.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>();
            rem -= k * overlap;
        }
        rem.norm()
    }
}

pub const KERNEL_THRESHOLD: f64 = 1e-10;
pub const MAX_STEADY_DIM: usize = 441;

pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    let dim = l.dim();
    if dim > MAX_STEADY_DIM {
        return Err(Error::TooLarge(format!(
            "dense kernel search limited to dimension {MAX_STEADY_DIM}, got {dim}"
        )));
    }
    let m = l.basis().dim();
    let svd = l.full().to_dense().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();

    let mut kernel = Vec::new();
    let mut ambiguous = 0;
    for (k, &s) in singular_values.iter().enumerate() {
        if s <= KERNEL_THRESHOLD {
            let v: Vec<Complex64> = v_t.row(k).iter().map(|z| z.conj()).collect();
            kernel.push(devectorize(&v, m));
        } else if s <= 10.0 * KERNEL_THRESHOLD {
            ambiguous += 1;
        }
    }
    let warning = (ambiguous > 0).then(|| {
        format!(
            "{ambiguous} singular value(s) within 10x of the kernel threshold {KERNEL_THRESHOLD:e}"
        )
    });

    let half = Complex64::new(0.5, 0.0);
    let mut states = Vec::new();
    for k in &kernel {
        let herm = (k + k.adjoint()) * half;
        let anti = (k - k.adjoint()) * Complex64::new(0.0, -0.5);
        for candidate in [herm, anti] {
            let tr = candidate.trace().re;
            if tr.abs() < 1e-8 {
                continue;
            }
            let rho = candidate / Complex64::new(tr, 0.0);
            let seen = states
                .iter()
                .any(|s: &DMatrix<Complex64>| (s - &rho).norm() < 1e-8);
            if !seen && min_eigenvalue(&rho) >= -1e-8 {
                states.push(rho);
            }
        }
    }
    Ok(SteadyState {
        kernel,
        states,
        singular_values,
        warning,
    })
}
