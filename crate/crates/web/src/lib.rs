//! WebAssembly bindings for the browser demo. Every export takes and returns
//! JSON strings; the `*_json` functions hold the logic and run natively too.

use num_complex::Complex64;
use polariton_core::dynamics::{pure_state, Picture, PropagationOptions, TimeGrid};
use polariton_core::verify::{analytic_row, eom_row, quasimomentum_identity, RowKind};
use polariton_core::{
    assemble_generator, build_basis, propagate_reduced, BathTopology, ModelBasis, ModelParams,
    RateSet, StateLabel, Variant,
};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

const MAX_N: usize = 200;

fn basis(n: usize) -> Result<ModelBasis, String> {
    if n > MAX_N {
        return Err(format!("N is limited to {MAX_N} in the demo"));
    }
    ModelParams::new(n, 1.0, 0.2)
        .and_then(build_basis)
        .map_err(|e| e.to_string())
}

#[derive(Debug, Deserialize)]
pub struct SimulateRequest {
    pub n: usize,
    pub topology: BathTopology,
    pub rates: RateSet,
    pub t_end: f64,
    pub n_steps: usize,
    #[serde(default = "first_dark")]
    pub dark: usize,
}

fn first_dark() -> usize {
    1
}

#[derive(Debug, Serialize)]
pub struct Series {
    pub label: String,
    pub abs: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SimulateResponse {
    pub t: Vec<f64>,
    pub corrected: Vec<Series>,
    pub dp: Vec<Series>,
}

/// Propagates `(|+⟩ + |d⟩ + |−⟩)/√3` under both variants and returns the
/// magnitudes of `ρ_{+d}`, `ρ_{d̄−}`, `ρ_{+−}` and `ρ_{++}`.
pub fn simulate_json(request: &str) -> Result<String, String> {
    use StateLabel::*;
    let req: SimulateRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let b = basis(req.n)?;
    let d = req.dark;
    if d == 0 || d >= req.n {
        return Err(format!("dark index must be in 1..{}", req.n - 1));
    }
    let tracked = [
        (Plus, Dark(d)),
        (Dark(req.n - d), Minus),
        (Plus, Minus),
        (Plus, Plus),
    ];
    let rho0 = pure_state(
        &b,
        &[
            (Plus, Complex64::ONE),
            (Dark(d), Complex64::ONE),
            (Minus, Complex64::ONE),
        ],
    )
    .map_err(|e| e.to_string())?;
    let grid = TimeGrid::new(0.0, req.t_end, req.n_steps).map_err(|e| e.to_string())?;
    let run = |variant| -> Result<Vec<Series>, String> {
        let l =
            assemble_generator(variant, req.topology, &b, &req.rates).map_err(|e| e.to_string())?;
        let traj = propagate_reduced(
            &l,
            &rho0,
            grid,
            Picture::Interaction,
            &tracked,
            PropagationOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        Ok(tracked
            .iter()
            .map(|&(x, y)| Series {
                label: format!("|<{x}|rho|{y}>|"),
                abs: traj
                    .element(x, y)
                    .unwrap()
                    .iter()
                    .map(|v| v.1.norm())
                    .collect(),
            })
            .collect())
    };
    let response = SimulateResponse {
        t: grid.times(),
        corrected: run(Variant::Corrected)?,
        dp: run(Variant::Dp)?,
    };
    Ok(serde_json::to_string(&response).expect("response serialises"))
}

#[derive(Debug, Deserialize)]
pub struct TableRequest {
    pub n: usize,
    pub topology: BathTopology,
    pub rates: RateSet,
}

#[derive(Debug, Serialize)]
pub struct TableEntry {
    pub row: String,
    pub target: String,
    pub source: String,
    pub corrected: f64,
    pub dp: f64,
    pub closed_form_corrected: f64,
    pub closed_form_dp: f64,
}

/// Self and transfer coefficients of the first instance of every row family,
/// extracted from both variants next to their closed forms.
pub fn rate_table_json(request: &str) -> Result<String, String> {
    let req: TableRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let b = basis(req.n)?;
    let corrected = assemble_generator(Variant::Corrected, req.topology, &b, &req.rates)
        .map_err(|e| e.to_string())?;
    let dp =
        assemble_generator(Variant::Dp, req.topology, &b, &req.rates).map_err(|e| e.to_string())?;
    let mut entries = Vec::new();
    for kind in RowKind::ALL {
        let Some(&target) = kind.targets(req.n).first() else {
            continue;
        };
        let ac = analytic_row(
            kind,
            Variant::Corrected,
            req.topology,
            req.n,
            &req.rates,
            target,
        );
        let ad = analytic_row(kind, Variant::Dp, req.topology, req.n, &req.rates, target);
        let rc = eom_row(&corrected, target.0, target.1);
        let rd = eom_row(&dp, target.0, target.1);
        let mut sources: Vec<_> = rc
            .to_map()
            .into_keys()
            .chain(rd.to_map().into_keys())
            .chain(ac.keys().copied())
            .chain(ad.keys().copied())
            .collect();
        sources.sort();
        sources.dedup();
        for source in sources {
            entries.push(TableEntry {
                row: kind.as_str().to_string(),
                target: format!("{},{}", target.0, target.1),
                source: format!("{},{}", source.0, source.1),
                corrected: rc.get(source.0, source.1).re,
                dp: rd.get(source.0, source.1).re,
                closed_form_corrected: ac.get(&source).copied().unwrap_or(0.0),
                closed_form_dp: ad.get(&source).copied().unwrap_or(0.0),
            });
        }
    }
    Ok(serde_json::to_string(&entries).expect("table serialises"))
}

#[derive(Debug, Serialize)]
pub struct IdentityGrid {
    pub n: usize,
    /// `values[d₁−1][d₂−1] = Re Σ_i ⟨+|i⟩⟨i|d₁⟩⟨−|i⟩⟨i|d₂⟩`.
    pub values: Vec<Vec<f64>>,
    pub max_deviation: f64,
}

pub fn identity_grid_json(n: usize) -> Result<String, String> {
    use StateLabel::*;
    let b = basis(n)?;
    let values = (1..n)
        .map(|d1| {
            (1..n)
                .map(|d2| {
                    (1..=n)
                        .map(|i| {
                            b.site_element(i, Plus, Dark(d1)) * b.site_element(i, Minus, Dark(d2))
                        })
                        .sum::<Complex64>()
                        .re
                })
                .collect()
        })
        .collect();
    let grid = IdentityGrid {
        n,
        values,
        max_deviation: quasimomentum_identity(&b).max_deviation,
    };
    Ok(serde_json::to_string(&grid).expect("grid serialises"))
}

#[wasm_bindgen]
pub fn simulate(request: &str) -> Result<String, JsValue> {
    simulate_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn rate_table(request: &str) -> Result<String, JsValue> {
    rate_table_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn identity_grid(n: usize) -> Result<String, JsValue> {
    identity_grid_json(n).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const RATES: &str =
        r#"{"gamma_a":0.2,"gamma_e":0.3,"gamma_phi":0.4,"Gamma_a":0.5,"Gamma_e":0.6}"#;

    #[test]
    fn simulate_shows_transfer_only_in_corrected() {
        let req = format!(
            r#"{{"n":4,"topology":"independent","rates":{RATES},"t_end":4.0,"n_steps":40}}"#
        );
        let v: Value = serde_json::from_str(&simulate_json(&req).unwrap()).unwrap();
        assert_eq!(v["t"].as_array().unwrap().len(), 41);
        let partner = |variant: &str| {
            v[variant][1]["abs"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect::<Vec<_>>()
        };
        let max = |xs: Vec<f64>| xs.into_iter().fold(0.0, f64::max);
        assert!(max(partner("corrected")) > 1e-3);
        assert!(max(partner("dp")) < 1e-12);
    }

    #[test]
    fn rate_table_rows() {
        let req = format!(r#"{{"n":3,"topology":"common","rates":{RATES}}}"#);
        let entries: Vec<Value> = serde_json::from_str(&rate_table_json(&req).unwrap()).unwrap();
        let pm = entries.iter().find(|e| e["row"] == "rho_+-").unwrap();
        assert!((pm["corrected"].as_f64().unwrap() + 0.5 / 8.0).abs() < 1e-15);
        assert!(
            (pm["dp"].as_f64().unwrap() - pm["closed_form_dp"].as_f64().unwrap()).abs() < 1e-15
        );
    }

    #[test]
    fn identity_grid_values() {
        let v: Value = serde_json::from_str(&identity_grid_json(4).unwrap()).unwrap();
        assert!((v["values"][0][2].as_f64().unwrap() + 0.125).abs() < 1e-15);
        assert!(v["values"][0][1].as_f64().unwrap().abs() < 1e-15);
        assert!(identity_grid_json(MAX_N + 1).is_err());
    }

    #[test]
    fn bad_requests_are_reported() {
        assert!(simulate_json("{}").is_err());
        let req = format!(
            r#"{{"n":4,"topology":"independent","rates":{RATES},"t_end":4.0,"n_steps":40,"dark":4}}"#
        );
        assert!(simulate_json(&req).is_err());
    }
}
