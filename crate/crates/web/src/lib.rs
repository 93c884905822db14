//! Browser bindings: run a config in the page and hand the artifacts back as JSON.

use serde_json::{Map, Value};
use spinlab::experiment::{self, ExperimentConfig, Overrides};
use wasm_bindgen::prelude::*;

fn js_err(e: spinlab::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Runs a TOML config and returns `{ "summary.json": {...}, "<name>.csv": "..." }`.
#[wasm_bindgen]
pub fn run_config(text: &str) -> Result<String, JsValue> {
    let config = ExperimentConfig::parse(text).map_err(js_err)?;
    let artifacts = experiment::run_in_current_pool(&config).map_err(js_err)?;
    let mut out = Map::new();
    for (name, contents) in artifacts.files {
        let value = if name.ends_with(".json") {
            serde_json::from_str(&contents).unwrap_or(Value::String(contents))
        } else {
            Value::String(contents)
        };
        out.insert(name, value);
    }
    Ok(Value::Object(out).to_string())
}

/// Errors and warnings for a config, as JSON.
#[wasm_bindgen]
pub fn validate_config(text: &str) -> String {
    serde_json::to_string(&experiment::validate(text, &Overrides::default())).unwrap_or_default()
}

#[wasm_bindgen]
pub fn version() -> String {
    experiment::VERSION.to_string()
}
