//! Machine-readable verification reports: a fixed schema, a content hash of
//! the instance, the verdict, and the bounds every window-limited search
//! ran under. Timestamps are deliberately absent so that identical inputs
//! produce byte-identical reports.

use serde::Serialize;

pub const REPORT_SCHEMA: &str = "logpar-report/1";

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Incomplete,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::Refuted => 2,
            Verdict::Incomplete => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub operation: String,
    pub instance_hash: String,
    pub verdict: Verdict,
    pub bounds: crate::Bounds,
    pub body: serde_json::Value,
}

impl Report {
    pub fn new(
        operation: &str,
        instance_hash: String,
        verdict: Verdict,
        bounds: &crate::Bounds,
        body: serde_json::Value,
    ) -> Self {
        Report {
            schema: REPORT_SCHEMA,
            operation: operation.to_string(),
            instance_hash,
            verdict,
            bounds: bounds.clone(),
            body,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// FNV-1a over the canonical byte serialization; enough to pin instances
/// in reports.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}
