use std::path::PathBuf;
use std::process::{Command, Output};

use polariton_cli::config::{
    self, BathConfig, DynamicsConfig, InitialStateConfig, ModelConfig, OutputConfig, OutputFormat,
    RatesConfig, RunConfig, SpectrumConfig,
};
use polariton_core::dynamics::{Integrator, Picture};
use polariton_core::{BathTopology, StateLabel, Variant};
use proptest::prelude::*;

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn polariton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polariton"))
        .args(args)
        .env_remove("POLARITON_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rates_config(gamma_phi: f64) -> String {
    format!(
        r#"{{
  "model": {{ "n_molecules": 3, "omega0": 1.0, "rabi_splitting": 0.2 }},
  "bath": {{ "topology": "independent",
    "rates": {{ "gamma_a": 0.1, "gamma_e": 0.3, "gamma_phi": {gamma_phi}, "Gamma_a": 0.2, "Gamma_e": 0.4 }} }}
}}"#
    )
}

#[test]
fn identity_reports_deviation() {
    let out = polariton(&["identity", "--n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let first = stdout(&out).lines().next().unwrap().to_string();
    let value: f64 = first
        .strip_prefix("max deviation ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(value <= 1e-12);
}

#[test]
fn sample_configs_parse_and_round_trip() {
    for name in ["n4_seeded.json", "transfer.json", "spectrum_common.json"] {
        let text = std::fs::read_to_string(sample(name)).unwrap();
        let parsed = config::parse(&text).unwrap();
        assert_eq!(
            config::parse(&config::to_string(&parsed)).unwrap(),
            parsed,
            "{name}"
        );
    }
}

#[test]
fn malformed_config_exits_2_with_path() {
    let bad = scratch(
        "bad_type.json",
        r#"{"model": {"n_molecules": 3, "omega0": 1, "rabi_splitting": 0.2}, "bath": {"topology": "common", "rates": {"gamma_e": [1]}}}"#,
    );
    let out = polariton(&["table1", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bath.rates.gamma_e"));

    let both = scratch(
        "both.json",
        r#"{"model": {"n_molecules": 3, "omega0": 1, "rabi_splitting": 0.2}, "bath": {"topology": "common", "rates": {"seed": 1}, "spectrum": {"constant": 0.1}}}"#,
    );
    assert_eq!(
        polariton(&["table1", "--config", both.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let unknown = scratch(
        "unknown.json",
        r#"{"model": {"n_molecules": 3, "omega0": 1, "rabi_splitting": 0.2, "spin": 1}, "bath": {"topology": "common", "rates": {"seed": 1}}}"#,
    );
    let out = polariton(&["table1", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model"));
}

#[test]
fn evolve_is_deterministic() {
    let path = sample("transfer.json");
    let a = polariton(&["evolve", "--config", path.to_str().unwrap()]);
    let b = polariton(&["evolve", "--config", path.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("t,re(<+|rho|d1>),im(<+|rho|d1>),re(<d3|rho|->)"));
    assert_eq!(text.lines().count(), 102);
}

#[test]
fn seeded_output_is_reproducible_and_recorded() {
    let path = sample("n4_seeded.json");
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_polariton"))
            .args(["table1", "--json", "--config", path.to_str().unwrap()])
            .env("POLARITON_SEED", seed)
            .output()
            .unwrap()
    };
    let (a, b, c) = (run("5"), run("5"), run("6"));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["seed"], 5);
    let cell = &doc["report"]["cells"][0];
    for key in [
        "row",
        "variant",
        "bath",
        "extracted",
        "analytic",
        "abs_diff",
    ] {
        assert!(cell.get(key).is_some(), "{key}");
    }
}

#[test]
fn zero_rates_give_constant_columns() {
    let cfg = scratch(
        "zero.json",
        r#"{
  "model": { "n_molecules": 3, "omega0": 1.0, "rabi_splitting": 0.2 },
  "bath": { "topology": "common", "rates": { "gamma_a": 0, "gamma_e": 0, "gamma_phi": 0, "Gamma_a": 0, "Gamma_e": 0 } },
  "dynamics": { "t_end": 5.0, "n_steps": 10, "initial_state": "plus_minus_superposition" }
}"#,
    );
    let out = polariton(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r == &rows[0]));
}

#[test]
fn unstable_steps_exit_3() {
    let cfg = scratch(
        "unstable.json",
        r#"{
  "model": { "n_molecules": 2, "omega0": 1.0, "rabi_splitting": 0.2 },
  "bath": { "topology": "independent", "rates": { "gamma_a": 5, "gamma_e": 5, "gamma_phi": 5, "Gamma_a": 5, "Gamma_e": 5 } },
  "dynamics": { "t_end": 50.0, "n_steps": 10, "max_step": 5.0, "initial_state": "plus" }
}"#,
    );
    let out = polariton(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn compare_against_oracle_and_dp() {
    let path = sample("n4_seeded.json");
    let out = polariton(&[
        "compare",
        "--config",
        path.to_str().unwrap(),
        "--against",
        "oracle",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = polariton(&[
        "compare",
        "--config",
        path.to_str().unwrap(),
        "--against",
        "dp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("d rho(+,-) <- rho(+,-)"));
}

#[test]
fn table1_exit_reflects_dp_localized_entry() {
    // Only the dp/independent rho_+- cells disagree, and only through gamma_phi.
    let with = scratch("t1_with.json", &rates_config(0.25));
    let out = polariton(&["table1", "--config", with.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let fails: Vec<String> = stdout(&out)
        .lines()
        .filter(|l| l.starts_with("FAIL"))
        .map(String::from)
        .collect();
    assert_eq!(fails.len(), 2, "{fails:?}");
    assert!(fails
        .iter()
        .all(|l| l.contains("independent/dp") && l.contains("rho_")));

    let without = scratch("t1_without.json", &rates_config(0.0));
    assert_eq!(
        polariton(&["table1", "--config", without.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn steady_and_kossakowski_run() {
    let path = sample("n4_seeded.json");
    let out = polariton(&["steady", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("kernel dimension 1"));
    let out = polariton(&[
        "kossakowski",
        "--config",
        path.to_str().unwrap(),
        "--all-sectors",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out)
            .lines()
            .filter(|l| l.starts_with("sector"))
            .count(),
        5
    );
}

fn label() -> impl Strategy<Value = StateLabel> {
    prop_oneof![
        Just(StateLabel::Plus),
        Just(StateLabel::Minus),
        (1usize..6).prop_map(StateLabel::Dark)
    ]
}

fn rate() -> impl Strategy<Value = Option<f64>> {
    (0.0f64..2.0).prop_map(Some)
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    let rates = prop_oneof![
        (rate(), rate(), rate(), rate(), rate()).prop_map(|(a, b, c, d, e)| RatesConfig {
            gamma_a: a,
            gamma_e: b,
            gamma_phi: c,
            big_gamma_a: d,
            big_gamma_e: e,
            seed: None,
        }),
        any::<u64>().prop_map(|s| RatesConfig {
            seed: Some(s),
            ..Default::default()
        }),
    ];
    let bath = (
        prop_oneof![Just(BathTopology::Common), Just(BathTopology::Independent)],
        prop::option::of(rates),
        prop::option::of((0.0f64..1.0).prop_map(SpectrumConfig::Constant)),
    )
        .prop_map(|(topology, rates, spectrum)| BathConfig {
            topology,
            rates,
            spectrum,
        });
    let initial = prop_oneof![
        Just(InitialStateConfig::Named("plus".into())),
        Just(InitialStateConfig::Named("maximally_mixed_excited".into())),
        prop::collection::vec(
            (
                label(),
                (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| [a, b])
            ),
            1..4
        )
        .prop_map(|superposition| InitialStateConfig::Superposition { superposition }),
    ];
    let dynamics = (
        0.0f64..1.0,
        1.0f64..50.0,
        2usize..500,
        initial,
        prop::collection::vec((label(), label()), 0..4),
        prop::option::of(0.001f64..0.5),
    )
        .prop_map(
            |(t0, span, n, initial_state, tracked, max_step)| DynamicsConfig {
                t_start: t0,
                t_end: t0 + span,
                n_steps: n,
                picture: Picture::Schroedinger,
                initial_state,
                tracked,
                integrator: Integrator::Rk4,
                max_step,
            },
        );
    (
        2usize..40,
        0.1f64..5.0,
        0.01f64..1.0,
        bath,
        prop_oneof![Just(Variant::Corrected), Just(Variant::Dp)],
        prop::option::of(dynamics),
        any::<bool>(),
    )
        .prop_map(|(n, w, r, bath, variant, dynamics, json)| RunConfig {
            model: ModelConfig {
                n_molecules: n,
                omega0: w,
                rabi_splitting: r,
            },
            bath,
            variant,
            dynamics,
            output: json.then(|| OutputConfig {
                format: OutputFormat::Json,
                path: Some("out.json".into()),
            }),
        })
}

proptest! {
    #[test]
    fn config_round_trip(cfg in run_config()) {
        let text = config::to_string(&cfg);
        prop_assert_eq!(config::parse(&text).unwrap(), cfg);
    }
}
