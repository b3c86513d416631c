//! Acceptance criteria, one line each.
//!
//! Criteria listed in `EXPECTED_FAILURES` are computed in full and reported
//! as FAIL; the harness only errors if the observed outcome of any criterion
//! differs from its expectation.

mod common;

use std::time::Instant;

use common::*;
use num_complex::Complex64;
use polariton_core::dynamics::{
    block_eigenvalues, block_rates_from_trajectories, default_step, fit_decay_rate, min_eigenvalue,
    pure_state, Picture, PropagationOptions, TimeGrid,
};
use polariton_core::generators::correction_terms;
use polariton_core::verify::{
    analytic_row, dephasing_derivative, eom_row, quasimomentum_identity, table1_report, RowKind,
};
use polariton_core::{
    assemble_generator, assemble_redfield, compare_generators, propagate, propagate_reduced,
    BathTopology, RateSet, StateLabel, Variant,
};
use StateLabel::*;

const TABLE_TOL: f64 = 1e-10;
const DERIVATIVE_ZERO_TOL: f64 = 1e-9;
const DERIVATIVE_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-10;
const STRAY_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-12;
const TRANSFER_ENTRY_TOL: f64 = 1e-12;
const TRANSFER_VISIBLE: f64 = 1e-4;
const DP_TRANSFER_LIMIT: f64 = 1e-12;
const RATE_REL_TOL: f64 = 0.01;
const INVARIANT_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = -1e-7;
const POPULATION_TOL: f64 = 1e-12;
const SCALE_BUDGET_S: f64 = 60.0;

const SEEDS: [u64; 3] = [11, 23, 47];

/// The dp column prints an extra `−γ_φ/8N` on the localized `ρ_{+−}` row;
/// removing the cross-dephasing sandwich from the corrected generator gives
/// `−γ_φ/4N`. The encoded expression keeps the printed value.
const EXPECTED_FAILURES: [u32; 2] = [1, 2];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion_1() -> Outcome {
    let mut worst = (0.0, String::new());
    let mut failing = 0usize;
    let mut cells = 0usize;
    for n in [3, 4, 6, 8] {
        let b = basis(n);
        for seed in SEEDS {
            let report = table1_report(&b, &RateSet::random(seed)).unwrap();
            cells += report.cells.len();
            for cell in &report.cells {
                if cell.abs_diff > TABLE_TOL {
                    failing += 1;
                }
                if cell.abs_diff > worst.0 {
                    worst = (
                        cell.abs_diff,
                        format!(
                            "{} {}/{} at N={n}",
                            cell.row,
                            cell.bath.as_str(),
                            cell.variant.as_str()
                        ),
                    );
                }
            }
            if report.symmetry_max_diff > 1e-12 {
                failing += 1;
            }
        }
    }
    Outcome {
        pass: failing == 0,
        detail: format!(
            "{failing}/{cells} cells above {TABLE_TOL:e}; worst {:.2e} ({})",
            worst.0, worst.1
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for seed in SEEDS {
        let r = RateSet::random(seed);
        for n in [3, 4, 8] {
            let b = basis(n);
            for t in [BathTopology::Common, BathTopology::Independent] {
                let d = dephasing_derivative(&b, Variant::Corrected, t, &r).unwrap();
                if d.abs() > DERIVATIVE_ZERO_TOL {
                    pass = false;
                    notes.push(format!("corrected/{} N={n}: {d:e}", t.as_str()));
                }
                let expected = match t {
                    BathTopology::Common => -0.25,
                    BathTopology::Independent => -1.0 / (8.0 * n as f64),
                };
                let d = dephasing_derivative(&b, Variant::Dp, t, &r).unwrap();
                if (d - expected).abs() > DERIVATIVE_TOL {
                    pass = false;
                    if seed == SEEDS[0] {
                        notes.push(format!("dp/{} N={n}: {d:.6} vs {expected:.6}", t.as_str()));
                    }
                }
            }
        }
    }
    let detail = if notes.is_empty() {
        "corrected slope 0, dp slopes -1/4 and -1/(8N)".to_string()
    } else {
        notes.join("; ")
    };
    Outcome { pass, detail }
}

fn criterion_3() -> Outcome {
    let mut worst_oracle: f64 = 0.0;
    let mut stray = 0usize;
    let mut missing = 0usize;
    for n in [2, 3, 4, 6] {
        let b = basis(n);
        for seed in SEEDS {
            let r = RateSet::random(seed);
            for t in [BathTopology::Common, BathTopology::Independent] {
                let oracle = assemble_redfield(&b, &r, t).unwrap();
                let corrected = assemble_generator(Variant::Corrected, t, &b, &r).unwrap();
                let dp = assemble_generator(Variant::Dp, t, &b, &r).unwrap();
                worst_oracle =
                    worst_oracle.max(compare_generators(&corrected, &oracle).unwrap().max_abs);
                let diff = oracle.dissipative().sub(dp.dissipative());
                let corr = correction_terms(t, &b, &r);
                stray += diff
                    .iter()
                    .filter(|&(i, j, v)| v.norm() > STRAY_TOL && corr.get(i, j).norm() <= STRAY_TOL)
                    .count();
                missing += corr
                    .iter()
                    .filter(|&(i, j, v)| v.norm() > STRAY_TOL && diff.get(i, j).norm() <= STRAY_TOL)
                    .count();
            }
        }
    }
    Outcome {
        pass: worst_oracle <= ORACLE_TOL && stray == 0 && missing == 0,
        detail: format!(
            "oracle max diff {worst_oracle:.2e}; dp gap: {stray} stray, {missing} missing entries"
        ),
    }
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=32 {
        worst = worst.max(quasimomentum_identity(&basis(n)).max_deviation);
    }
    Outcome {
        pass: worst <= IDENTITY_TOL,
        detail: format!("max deviation {worst:.1e} for N = 2..32"),
    }
}

fn criterion_5() -> Outcome {
    let n = 4;
    let b = basis(n);
    let r = RateSet::random(SEEDS[0]);
    let corrected =
        assemble_generator(Variant::Corrected, BathTopology::Independent, &b, &r).unwrap();
    let dp = assemble_generator(Variant::Dp, BathTopology::Independent, &b, &r).unwrap();
    let up = eom_row(&corrected, Plus, Dark(1)).get(Dark(3), Minus);
    let down = eom_row(&corrected, Dark(3), Minus).get(Plus, Dark(1));
    let entries_ok = (up.re + r.big_gamma_a / 8.0).abs() <= TRANSFER_ENTRY_TOL
        && (down.re + r.big_gamma_e / 8.0).abs() <= TRANSFER_ENTRY_TOL
        && up.im.abs() <= TRANSFER_ENTRY_TOL
        && down.im.abs() <= TRANSFER_ENTRY_TOL;

    let rho0 = pure_state(&b, &[(Plus, Complex64::ONE), (Dark(1), Complex64::ONE)]).unwrap();
    let t_probe = 1.0 / r.big_gamma_a;
    let grid = TimeGrid::new(0.0, t_probe, 200).unwrap();
    let at_probe = |l: &polariton_core::Liouvillian| {
        let traj = propagate(l, &rho0, grid, Picture::Interaction, Default::default()).unwrap();
        let series = traj.element(Dark(3), Minus).unwrap();
        (
            series[0].1.norm(),
            series.last().unwrap().1.norm(),
            series.iter().map(|s| s.1.norm()).fold(0.0, f64::max),
        )
    };
    let (start, corrected_end, _) = at_probe(&corrected);
    let (_, _, dp_max) = at_probe(&dp);
    Outcome {
        pass: entries_ok && start == 0.0 && corrected_end > TRANSFER_VISIBLE && dp_max <= DP_TRANSFER_LIMIT,
        detail: format!(
            "block entries {:.4e}/{:.4e} (expect {:.4e}/{:.4e}); |rho_3-(1/Gamma_a)| = {corrected_end:.3e} corrected, max {dp_max:.1e} dp",
            up.re,
            down.re,
            -r.big_gamma_a / 8.0,
            -r.big_gamma_e / 8.0
        ),
    }
}

fn relative(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn closest_rel_error(found: &[Complex64], expected: &[Complex64]) -> f64 {
    expected
        .iter()
        .map(|e| {
            found
                .iter()
                .map(|f| (f - e).norm() / e.norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn criterion_6() -> Outcome {
    let r = RateSet::random(SEEDS[1]);
    let mut worst: f64 = 0.0;
    let mut label = String::new();
    let mut track = |err: f64, what: String| {
        if err > worst {
            worst = err;
            label = what;
        }
    };
    for n in [2, 4, 8] {
        let b = basis(n);
        for t in [BathTopology::Common, BathTopology::Independent] {
            let l = assemble_generator(Variant::Corrected, t, &b, &r).unwrap();
            let rate_of =
                |kind, target| -analytic_row(kind, Variant::Corrected, t, n, &r, target)[&target];

            let expected = rate_of(RowKind::PlusMinus, (Plus, Minus));
            let rho0 = pure_state(&b, &[(Plus, Complex64::ONE), (Minus, Complex64::ONE)]).unwrap();
            let grid = TimeGrid::new(0.0, 3.0 / expected, 300).unwrap();
            let traj = propagate_reduced(
                &l,
                &rho0,
                grid,
                Picture::Interaction,
                &[(Plus, Minus)],
                Default::default(),
            )
            .unwrap();
            let fit = fit_decay_rate(&traj.element(Plus, Minus).unwrap()).unwrap();
            track(
                relative(fit.rate, expected),
                format!("rho_+- {} N={n}", t.as_str()),
            );

            for d in 1..n {
                let target = (Plus, Dark(d));
                match t {
                    BathTopology::Common => {
                        let expected = rate_of(RowKind::PlusDark, target);
                        let rho0 =
                            pure_state(&b, &[(Plus, Complex64::ONE), (Dark(d), Complex64::ONE)])
                                .unwrap();
                        let grid = TimeGrid::new(0.0, 3.0 / expected, 300).unwrap();
                        let traj = propagate_reduced(
                            &l,
                            &rho0,
                            grid,
                            Picture::Interaction,
                            &[target],
                            Default::default(),
                        )
                        .unwrap();
                        let fit = fit_decay_rate(&traj.element(Plus, Dark(d)).unwrap()).unwrap();
                        track(
                            relative(fit.rate, expected),
                            format!("rho_+d{d} common N={n}"),
                        );
                    }
                    BathTopology::Independent => {
                        let partner = (Dark(n - d), Minus);
                        let pairs = [target, partner];
                        let a =
                            analytic_row(RowKind::PlusDark, Variant::Corrected, t, n, &r, target);
                        let c =
                            analytic_row(RowKind::DarkMinus, Variant::Corrected, t, n, &r, partner);
                        let m = nalgebra::DMatrix::from_row_slice(
                            2,
                            2,
                            &[
                                Complex64::new(a[&target], 0.0),
                                Complex64::new(a.get(&partner).copied().unwrap_or(0.0), 0.0),
                                Complex64::new(c.get(&target).copied().unwrap_or(0.0), 0.0),
                                Complex64::new(c[&partner], 0.0),
                            ],
                        );
                        let expected = polariton_core::dynamics::eigenvalues(&m);
                        let slowest = expected
                            .iter()
                            .map(|e| e.norm())
                            .fold(f64::INFINITY, f64::min);
                        let grid = TimeGrid::new(0.0, 1.0 / slowest, 200).unwrap();
                        let runs: Vec<_> = [
                            pure_state(&b, &[(Plus, Complex64::ONE), (Dark(d), Complex64::ONE)])
                                .unwrap(),
                            pure_state(
                                &b,
                                &[(Dark(n - d), Complex64::ONE), (Minus, Complex64::ONE)],
                            )
                            .unwrap(),
                        ]
                        .iter()
                        .map(|rho0| {
                            propagate_reduced(
                                &l,
                                rho0,
                                grid,
                                Picture::Interaction,
                                &pairs,
                                Default::default(),
                            )
                            .unwrap()
                        })
                        .collect();
                        let found =
                            block_rates_from_trajectories(&runs, &pairs, grid.n_steps).unwrap();
                        track(
                            closest_rel_error(&found, &expected),
                            format!("rho_+d{d} block independent N={n}"),
                        );
                        let direct = block_eigenvalues(&l, &pairs);
                        track(
                            closest_rel_error(&direct, &expected),
                            format!("rho_+d{d} generator block N={n}"),
                        );
                    }
                }
            }
        }
    }
    Outcome {
        pass: worst <= RATE_REL_TOL,
        detail: format!("worst relative error {worst:.2e} ({label})"),
    }
}

fn criterion_7() -> Outcome {
    let mut trace: f64 = 0.0;
    let mut herm: f64 = 0.0;
    let mut sparsity = 0usize;
    let mut positivity = f64::INFINITY;
    let mut draws = rng(7);
    for n in [2, 3, 4, 6] {
        let b = basis(n);
        for seed in SEEDS {
            let r = RateSet::random(seed);
            for t in [BathTopology::Common, BathTopology::Independent] {
                let mut generators = vec![
                    assemble_generator(Variant::Corrected, t, &b, &r).unwrap(),
                    assemble_generator(Variant::Dp, t, &b, &r).unwrap(),
                ];
                generators.push(assemble_redfield(&b, &r, t).unwrap());
                for l in &generators {
                    sparsity += secular_violations(l);
                    for _ in 0..100 {
                        let rho = random_density(b.dim(), &mut draws);
                        trace = trace.max(trace_defect(l, &rho));
                        herm = herm.max(hermiticity_defect(l, &rho));
                    }
                }
                if n <= 4 {
                    let rho0 = random_density(b.dim(), &mut draws);
                    let grid = TimeGrid::new(0.0, 30.0, 300).unwrap();
                    let traj = propagate(
                        &generators[0],
                        &rho0,
                        grid,
                        Picture::Schroedinger,
                        Default::default(),
                    )
                    .unwrap();
                    for rho in traj.states().unwrap() {
                        positivity = positivity.min(min_eigenvalue(rho));
                    }
                }
            }
        }
    }
    Outcome {
        pass: trace <= INVARIANT_TOL && herm <= INVARIANT_TOL && sparsity == 0 && positivity >= POSITIVITY_TOL,
        detail: format!("trace {trace:.1e}, hermiticity {herm:.1e}, secular violations {sparsity}, min eigenvalue {positivity:.2e}"),
    }
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4, 6, 8] {
        let b = basis(n);
        for seed in SEEDS {
            let r = RateSet::random(seed);
            for t in [BathTopology::Common, BathTopology::Independent] {
                let c = assemble_generator(Variant::Corrected, t, &b, &r).unwrap();
                let d = assemble_generator(Variant::Dp, t, &b, &r).unwrap();
                let diff = c.dissipative().sub(d.dissipative());
                for &a in b.states() {
                    for (_, v) in diff.row(b.vec_index(a, a)) {
                        worst = worst.max(v.norm());
                    }
                }
            }
        }
    }
    Outcome {
        pass: worst <= POPULATION_TOL,
        detail: format!("max population-row difference {worst:.1e}"),
    }
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let n = 50;
    let b = basis(n);
    let r = RateSet::random(SEEDS[2]);
    let l = assemble_generator(Variant::Corrected, BathTopology::Independent, &b, &r).unwrap();
    let assembled = start.elapsed().as_secs_f64();
    let h = default_step(l.dissipative()).unwrap();
    let grid = TimeGrid::new(0.0, 1000.0 * h, 1000).unwrap();
    let rho0 = pure_state(
        &b,
        &[
            (Plus, Complex64::ONE),
            (Dark(1), Complex64::ONE),
            (Minus, Complex64::new(0.5, 0.0)),
        ],
    )
    .unwrap();
    let tracked = [
        (Plus, Dark(1)),
        (Dark(n - 1), Minus),
        (Plus, Minus),
        (Plus, Plus),
        (Dark(7), Dark(7)),
    ];
    let options = PropagationOptions {
        max_step: Some(h),
        ..Default::default()
    };
    let traj =
        propagate_reduced(&l, &rho0, grid, Picture::Schroedinger, &tracked, options).unwrap();
    let total = start.elapsed().as_secs_f64();
    let final_pp = traj.element(Plus, Plus).unwrap().last().unwrap().1.re;
    Outcome {
        pass: total < SCALE_BUDGET_S && final_pp.is_finite(),
        detail: format!(
            "dimension {}^2, nnz {}, assembly {assembled:.2}s, total {total:.2}s",
            b.dim() * b.dim(),
            l.dissipative().nnz()
        ),
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "rate-table regression", criterion_1),
        (2, "pure-dephasing cancellation", criterion_2),
        (3, "oracle equivalence", criterion_3),
        (4, "quasimomentum identity", criterion_4),
        (5, "coherence-transfer dynamics", criterion_5),
        (6, "trajectory rate recovery", criterion_6),
        (7, "structural invariants", criterion_7),
        (8, "population-sector equivalence", criterion_8),
        (9, "N = 50 scale run", criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let expected_fail = EXPECTED_FAILURES.contains(&id);
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        let note = if expected_fail {
            " [expected failure]"
        } else {
            ""
        };
        println!(
            "criterion {id} {name}: {status}{note} ({secs:.2}s) {}",
            outcome.detail
        );
        if outcome.pass == expected_fail {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("criteria with unexpected outcome: {unexpected:?}");
        std::process::exit(1);
    }
}
