//! Browser demo: score pasted trial data, sweep the 20-D weight of the 2022
//! competition table, and plot the simulated miss-rate curves.
//!
//! Every export returns a JSON string; the page in `www/` does the drawing.

use serde_json::json;
use uscore::fixtures::competition_2022_subtotals;
use uscore::ingest::{build_tables, read_csv_rows};
use uscore::{
    ranks_at_weight, run_experiment, score_competition, tie_possible, weight_sensitivity, HalfInt, ScoringConfig,
    SimConfig,
};
use wasm_bindgen::prelude::*;

/// Keeps a browser tab responsive; the CLI has no such limit.
pub const MAX_DEMO_RUNS: u64 = 200_000;

fn fail(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// Competition report for a trial CSV and a TOML config.
pub fn score_json(trials_csv: &str, config_toml: &str) -> Result<String, String> {
    let cfg = ScoringConfig::from_toml_str(config_toml).map_err(fail)?;
    let rows = read_csv_rows(trials_csv.as_bytes()).map_err(fail)?;
    let tables = build_tables(&rows, &cfg).map_err(fail)?;
    let report = score_competition(&tables, &cfg.weight_list()).map_err(fail)?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

/// Ranks of the 13 competition entrants when the 20-D group gets weight `w`,
/// with the crossovers in [1, 1000] for the slider's tick marks.
pub fn weights_json(w: f64) -> Result<String, String> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(fail(format!("weight must be positive, got {w}")));
    }
    let data = competition_2022_subtotals();
    let algorithms: Vec<String> = data.iter().map(|d| d.algorithm.to_string()).collect();
    let base: Vec<HalfInt> = data.iter().map(|d| d.base).collect();
    let weighted: Vec<HalfInt> = data.iter().map(|d| d.weighted).collect();
    let ranks = ranks_at_weight(&base, &weighted, w);
    let sweep = weight_sensitivity(&algorithms, &base, &weighted, 1.0, 1000.0).map_err(fail)?;
    let rows: Vec<_> = (0..data.len())
        .map(|j| {
            json!({
                "algorithm": algorithms[j],
                "base": base[j],
                "weighted": weighted[j],
                "total": base[j].to_f64() + w * weighted[j].to_f64(),
                "rank": ranks[j],
                "unweighted_rank": j + 1,
            })
        })
        .collect();
    let crossovers: Vec<_> = sweep
        .crossovers
        .iter()
        .map(|c| json!({ "weight": c.weight, "first": algorithms[c.first], "second": algorithms[c.second] }))
        .collect();
    Ok(json!({ "weight": w, "rows": rows, "crossovers": crossovers, "freeze_weight": sweep.freeze_weight }).to_string())
}

/// Miss rates of U-scores and dominance over the default separation grid.
pub fn simulate_json(n: usize, runs: u64, seed: u64) -> Result<String, String> {
    if runs > MAX_DEMO_RUNS {
        return Err(fail(format!("at most {MAX_DEMO_RUNS} runs in the browser")));
    }
    let curve = run_experiment(&SimConfig::new(n, runs, seed)).map_err(fail)?;
    let ties = tie_possible(2, n as u64).map_err(fail)?;
    Ok(json!({ "curve": curve, "tie_free": ties.tie_free }).to_string())
}

#[wasm_bindgen]
pub fn score(trials_csv: &str, config_toml: &str) -> Result<String, JsValue> {
    score_json(trials_csv, config_toml).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn weights(w: f64) -> Result<String, JsValue> {
    weights_json(w).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(n: usize, runs: u32, seed: u32) -> Result<String, JsValue> {
    simulate_json(n, runs.into(), seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn score_pasted_data() {
        let csv = "function,dimension,algorithm,trial,status,fe_used,ev_final
f,2,A,1,success,10,0
f,2,A,2,success,30,0
f,2,B,1,success,20,0
f,2,B,2,exhausted,100,4
";
        let cfg = "[[function]]\nid = \"f\"\ndimension = 2\nev_min = 1e-8\nfe_max = 100\n";
        let v = parse(&score_json(csv, cfg).unwrap());
        assert_eq!(v["totals"], json!([3.0, 1.0]));
        assert_eq!(v["ranks"], json!([1, 2]));

        let err = parse(&score_json("nonsense", cfg).unwrap_err());
        assert!(err["error"].as_str().unwrap().contains("schema"));
    }

    #[test]
    fn weight_one_keeps_published_order() {
        let v = parse(&weights_json(1.0).unwrap());
        let ranks: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["rank"].as_u64().unwrap()).collect();
        assert_eq!(ranks, (1..=13).collect::<Vec<_>>());
        assert_eq!(v["rows"][0]["total"], 186378.5);
        assert_eq!(v["crossovers"].as_array().unwrap().len(), 3);
        assert!(weights_json(0.0).is_err());
    }

    #[test]
    fn heavy_weight_swaps_third_place() {
        let v = parse(&weights_json(10.0).unwrap());
        let rows = v["rows"].as_array().unwrap();
        let rank_of = |name: &str| rows.iter().find(|r| r["algorithm"] == name).unwrap()["rank"].as_u64().unwrap();
        assert_eq!(rank_of("S-DP"), 3);
        assert_eq!(rank_of("NL-MID"), 5);
    }

    #[test]
    fn small_simulation() {
        let v = parse(&simulate_json(11, 200, 1).unwrap());
        assert_eq!(v["curve"]["points"].as_array().unwrap().len(), 21);
        assert_eq!(v["tie_free"], true);
        assert_eq!(simulate_json(11, 200, 1).unwrap(), simulate_json(11, 200, 1).unwrap());
        assert!(simulate_json(11, MAX_DEMO_RUNS + 1, 1).is_err());
    }
}
