use serde::Serialize;
use serde_json::Value;

/// Version of `schema/report.schema.json`; bumped on any incompatible change.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// The JSON report envelope.
#[derive(Serialize)]
pub struct Document {
    pub schema_version: &'static str,
    pub tool_version: &'static str,
    pub command: Vec<String>,
    pub verb: &'static str,
    pub genus: usize,
    pub verdict: &'static str,
    pub wall_ms: f64,
    pub result: Value,
}
