//! Machine-readable reports. Every numeric output carries the identifier
//! of the formula that produced it, so results stay traceable.

use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// A numeric output together with its formula provenance tag.
#[derive(Debug, Clone, Serialize)]
pub struct Tagged {
    pub value: Value,
    pub formula: &'static str,
}

pub fn tag(value: impl Serialize, formula: &'static str) -> Tagged {
    Tagged { value: serde_json::to_value(value).expect("serializable"), formula }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub outputs: Map<String, Value>,
    pub residuals: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub pass: bool,
    /// Omitted (None) in sweep outputs so repeated runs are byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            inputs,
            outputs: Map::new(),
            residuals: Map::new(),
            tolerances: Map::new(),
            pass: true,
            runtime_ms: None,
        }
    }

    pub fn output(&mut self, name: &str, t: Tagged) {
        self.outputs.insert(name.into(), serde_json::to_value(t).unwrap());
    }

    pub fn residual(&mut self, name: &str, value: f64, tolerance: f64) {
        self.residuals.insert(name.into(), json!(value));
        self.tolerances.insert(name.into(), json!(tolerance));
        if !(value <= tolerance) {
            self.pass = false;
        }
    }

    pub fn note_residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.into(), json!(value));
    }

    pub fn to_json(&self, quiet: bool) -> Value {
        let mut v = serde_json::to_value(self).unwrap();
        if quiet {
            let obj = v.as_object_mut().unwrap();
            obj.remove("residuals");
            obj.remove("tolerances");
        }
        v
    }

    pub fn print(&self, quiet: bool) {
        println!("{}", serde_json::to_string_pretty(&self.to_json(quiet)).unwrap());
    }
}

/// Minimal structural validation against the shipped schema subset:
/// required keys and primitive types. Used by the tests and by `sweep`
/// before writing each file.
pub fn validate(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report must be an object")?;
    for key in ["schema_version", "command", "inputs", "outputs", "pass"] {
        if !obj.contains_key(key) {
            return Err(format!("missing required key {key}"));
        }
    }
    if !obj["schema_version"].is_u64() {
        return Err("schema_version must be an unsigned integer".into());
    }
    if !obj["command"].is_string() {
        return Err("command must be a string".into());
    }
    if !obj["outputs"].is_object() {
        return Err("outputs must be an object".into());
    }
    for (k, out) in obj["outputs"].as_object().unwrap() {
        let o = out.as_object().ok_or_else(|| format!("output {k} must be an object"))?;
        if !o.contains_key("value") || !o.get("formula").map(|f| f.is_string()).unwrap_or(false) {
            return Err(format!("output {k} needs value and formula tag"));
        }
    }
    if !obj["pass"].is_boolean() {
        return Err("pass must be a boolean".into());
    }
    Ok(())
}
