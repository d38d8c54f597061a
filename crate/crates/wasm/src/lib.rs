//! Browser bindings: three interactive operations over the run-configuration
//! schema, each returning a JSON string for the static demo page to plot.
//!
//! The logic lives in [`api`] as plain string-in/string-out functions (also
//! testable on native targets); the `#[wasm_bindgen]` exports are thin
//! wrappers converting errors to JS values.

use wasm_bindgen::prelude::*;

/// Names and descriptions of the shipped presets, as JSON.
#[wasm_bindgen]
pub fn list_presets() -> String {
    api::list_presets()
}

/// An editable run configuration for a named preset, as pretty JSON.
#[wasm_bindgen]
pub fn preset_config(name: &str) -> Result<String, JsValue> {
    api::preset_config(name).map_err(|e| JsValue::from_str(&e))
}

/// Solves/validates the pair and classifies it. Returns curves for `F`, `H`,
/// `z` and the survival function on a quantile grid, plus the verdicts.
#[wasm_bindgen]
pub fn solve_curve(config: &str, points: usize) -> Result<String, JsValue> {
    api::solve_curve(config, points).map_err(|e| JsValue::from_str(&e))
}

/// Monte Carlo means with standard-error bands, plus a few sample paths
/// (jump time and post-jump level; the pre-jump curve is `F`).
#[wasm_bindgen]
pub fn simulate_curve(config: &str, n_paths: usize, seed: u64) -> Result<String, JsValue> {
    api::simulate_curve(config, n_paths, seed).map_err(|e| JsValue::from_str(&e))
}

/// Compensator curve of the configured mark, with the survival function for
/// context.
#[wasm_bindgen]
pub fn compensator_curve(config: &str, points: usize) -> Result<String, JsValue> {
    api::compensator_curve(config, points).map_err(|e| JsValue::from_str(&e))
}

pub mod api {
    use serde_json::json;

    use sjf_core::compensator::{check_locally_integrable, compensate};
    use sjf_core::config::{parse_config, RunConfig};
    use sjf_core::error::Error;
    use sjf_core::measure::Distribution;
    use sjf_core::options::NumericOptions;
    use sjf_core::preset::{run_config, Preset};
    use sjf_core::simulate::{sample_path, simulate, PathRng};
    use sjf_core::solver::{
        classify, sigma_status, solve_f_from_h, verify_condition_m, ConditionMPair, NoiseSpec,
    };

    type ApiResult = Result<String, String>;

    fn load(config: &str) -> Result<(RunConfig, NumericOptions), String> {
        let cfg = parse_config(config).map_err(|e| e.to_string())?;
        let opts = cfg.options.clone().unwrap_or_default();
        Ok((cfg, opts))
    }

    fn build_inputs(
        cfg: &RunConfig,
        opts: &NumericOptions,
    ) -> Result<(Distribution, ConditionMPair, NoiseSpec), String> {
        let d = cfg
            .distribution
            .as_ref()
            .ok_or("config needs a \"distribution\" block")?
            .build()
            .map_err(|e| e.to_string())?;
        let cm = match (&cfg.pair, &cfg.h) {
            (Some(pair), _) => pair.build(&d, opts).map_err(|e| e.to_string())?,
            (None, Some(h)) => solve_f_from_h(
                h.build().map_err(|e| e.to_string())?,
                d.clone(),
                cfg.f0,
                opts,
            )
            .map_err(|e| e.to_string())?,
            (None, None) => return Err("config needs a \"pair\" block or an \"H\" block".into()),
        };
        let noise = match &cfg.noise {
            Some(n) => n.build().map_err(|e| e.to_string())?,
            None => NoiseSpec::Zero,
        };
        Ok((d, cm, noise))
    }

    pub fn list_presets() -> String {
        let items: Vec<_> = Preset::ALL
            .iter()
            .map(|p| json!({"name": p.name(), "description": p.description()}))
            .collect();
        json!(items).to_string()
    }

    pub fn preset_config(name: &str) -> ApiResult {
        let preset = Preset::from_name(name).ok_or_else(|| format!("unknown preset \"{name}\""))?;
        serde_json::to_string_pretty(&run_config(preset)).map_err(|e| e.to_string())
    }

    pub fn solve_curve(config: &str, points: usize) -> ApiResult {
        let (cfg, opts) = load(config)?;
        let (d, cm, noise) = build_inputs(&cfg, &opts)?;

        let ts = d.support_grid(points.clamp(8, 512), 1e-6);
        let f: Vec<f64> = ts.iter().map(|&t| cm.pair.f(t)).collect();
        let h: Vec<f64> = ts.iter().map(|&t| cm.h.eval(t)).collect();
        let z: Vec<f64> = ts.iter().map(|&t| cm.pair.z().eval(t)).collect();
        let survival: Vec<f64> = ts.iter().map(|&t| d.survival(t)).collect();

        let report = verify_condition_m(&cm, opts.grid_size, opts.condition_m_tol, &opts)
            .map_err(|e| e.to_string())?;
        let class = match classify(&cm, &noise, &opts) {
            Ok(c) => json!({"tag": c.tag.to_string(), "notes": c.notes}),
            Err(e @ Error::IndeterminateLimit { .. }) => {
                json!({"tag": "indeterminate", "notes": [e.to_string()]})
            }
            Err(e) => return Err(e.to_string()),
        };
        let sigma = sigma_status(&cm, &noise, &opts).map_err(|e| e.to_string())?;

        Ok(json!({
            "case": cm.case().to_string(),
            "f0": cm.pair.f0(),
            "ts": ts,
            "f": f,
            "h": h,
            "z": z,
            "survival": survival,
            "residual": report.max_residual,
            "residual_pass": report.passes(),
            "classification": class,
            "sigma": sigma.to_string(),
        })
        .to_string())
    }

    pub fn simulate_curve(config: &str, n_paths: usize, seed: u64) -> ApiResult {
        let (cfg, opts) = load(config)?;
        let (d, cm, noise) = build_inputs(&cfg, &opts)?;
        let grid = match &cfg.grid {
            Some(g) => g.clone(),
            None => d.support_grid(24, opts.survival_floor),
        };
        let report =
            simulate(&cm, &noise, &grid, n_paths.max(100), seed, &opts).map_err(|e| e.to_string())?;

        let n_show = 24.min(n_paths);
        let mut paths = Vec::with_capacity(n_show);
        for p in 0..n_show {
            let mut rng = PathRng::new(seed, p as u64);
            let u1 = rng.next_f64_open();
            let u2 = rng.next_f64_open();
            let path = sample_path(&cm, &noise, &grid, u1, u2).map_err(|e| e.to_string())?;
            paths.push(json!({
                "gamma": if path.gamma.is_finite() { Some(path.gamma) } else { None },
                "level": if path.level.is_finite() { Some(path.level) } else { None },
            }));
        }

        let curve_ts = d.support_grid(128, 1e-6);
        let curve_f: Vec<f64> = curve_ts.iter().map(|&t| cm.pair.f(t)).collect();

        Ok(json!({
            "grid": report.grid,
            "mean": report.mean,
            "se": report.se,
            "target": report.target_mean,
            "e_sup": report.e_sup,
            "e_variation": report.e_variation,
            "e_m_inf": report.e_m_inf,
            "curve_ts": curve_ts,
            "curve_f": curve_f,
            "paths": paths,
        })
        .to_string())
    }

    pub fn compensator_curve(config: &str, points: usize) -> ApiResult {
        let (cfg, opts) = load(config)?;
        let d = cfg
            .distribution
            .as_ref()
            .ok_or("config needs a \"distribution\" block")?
            .build()
            .map_err(|e| e.to_string())?;
        let mark = cfg
            .mark
            .as_ref()
            .ok_or("config needs a \"mark\" block")?
            .build(&d, &opts)
            .map_err(|e| e.to_string())?;
        if !check_locally_integrable(&mark, &d, &opts).map_err(|e| e.to_string())? {
            return Err("mark does not have locally integrable variation".into());
        }
        let res = compensate(&mark, &d, &opts).map_err(|e| e.to_string())?;
        let ts = d.support_grid(points.clamp(8, 512), 1e-6);
        let f: Vec<f64> = ts.iter().map(|&t| res.pair.f(t)).collect();
        let survival: Vec<f64> = ts.iter().map(|&t| d.survival(t)).collect();
        Ok(json!({
            "case": res.case.to_string(),
            "case_b_jump": res.case_b_jump,
            "ts": ts,
            "f": f,
            "survival": survival,
        })
        .to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::api::*;
    use sjf_core::options::NumericOptions;
    use sjf_core::preset::{bundle, Preset};

    #[test]
    fn presets_round_trip_through_the_bindings() {
        let listed: serde_json::Value = serde_json::from_str(&list_presets()).unwrap();
        assert_eq!(listed.as_array().unwrap().len(), 5);

        for p in Preset::ALL {
            let cfg = preset_config(p.name()).unwrap();
            let solved: serde_json::Value =
                serde_json::from_str(&solve_curve(&cfg, 64).unwrap()).unwrap();
            assert!(solved["residual_pass"].as_bool().unwrap(), "{}", p.name());

            let sim: serde_json::Value =
                serde_json::from_str(&simulate_curve(&cfg, 500, 7).unwrap()).unwrap();
            assert!(sim["grid"].as_array().unwrap().len() >= 3);
        }
    }

    #[test]
    fn verdicts_match_the_library() {
        let opts = NumericOptions::default();
        let cfg = preset_config("usualcond").unwrap();
        let solved: serde_json::Value =
            serde_json::from_str(&solve_curve(&cfg, 64).unwrap()).unwrap();
        assert_eq!(solved["classification"]["tag"], "Type2a");

        let emery = preset_config("emery").unwrap();
        let solved: serde_json::Value =
            serde_json::from_str(&solve_curve(&emery, 64).unwrap()).unwrap();
        assert_eq!(solved["sigma"], "StrictlySigma");

        let b = bundle(Preset::Dellacherie, &opts).unwrap();
        let comp: serde_json::Value = serde_json::from_str(
            &compensator_curve(&preset_config("dellacherie").unwrap(), 32).unwrap(),
        )
        .unwrap();
        let ts = comp["ts"].as_array().unwrap();
        let fs = comp["f"].as_array().unwrap();
        for (t, f) in ts.iter().zip(fs) {
            let (t, f) = (t.as_f64().unwrap(), f.as_f64().unwrap());
            assert!((f - b.pair.pair.f(t)).abs() <= 1e-9);
            assert!((f - t).abs() <= 1e-8);
        }
    }

    #[test]
    fn bad_configs_surface_as_errors() {
        assert!(solve_curve("{", 32).is_err());
        assert!(solve_curve(r#"{"mode": "classify"}"#, 32).is_err());
        assert!(preset_config("nope").is_err());
    }
}
