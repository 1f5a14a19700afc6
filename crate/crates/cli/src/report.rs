//! Report envelope and output plumbing shared by all subcommands.

use std::io::Write;
use std::path::PathBuf;

use boundlab_core::Error as CoreError;

/// Stable exit codes: 0 success, 2 input error, 3 numerical-validation
/// failure.
pub fn exit_code_for(err: &CoreError) -> i32 {
    match err {
        CoreError::Parse(_)
        | CoreError::InvalidParameter(_)
        | CoreError::Unsupported(_)
        | CoreError::DimensionMismatch(_)
        | CoreError::InvalidSubsystem { .. } => 2,
        CoreError::NotHermitian { .. }
        | CoreError::TraceNotOne { .. }
        | CoreError::NotPositive { .. }
        | CoreError::NotNormalized { .. }
        | CoreError::ValidationFailed(_)
        | CoreError::Backend(_) => 3,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub struct Output {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timing: bool,
    started: std::time::Instant,
}

impl Output {
    pub fn new(format: Format, out: Option<PathBuf>, timing: bool) -> Self {
        Self {
            format,
            out,
            timing,
            started: std::time::Instant::now(),
        }
    }

    /// Emit a report: a JSON envelope `{request, version, payload}` (the
    /// wall time is attached only with --timing so that equal requests
    /// produce byte-identical reports), or the bare CSV payload.
    pub fn emit(&self, request: &str, json_payload: &str, csv_payload: &str) -> anyhow::Result<()> {
        let text = match self.format {
            Format::Csv => csv_payload.to_string(),
            Format::Json => {
                let timing = if self.timing {
                    format!(",\"wall_time_ms\":{}", self.started.elapsed().as_millis())
                } else {
                    String::new()
                };
                format!(
                    "{{\"request\":{},\"version\":\"{}\"{},\"payload\":{}}}",
                    serde_json::to_string(request)?,
                    boundlab_core::VERSION,
                    timing,
                    json_payload
                )
            }
        };
        match &self.out {
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.write_all(b"\n")?;
            }
            Some(path) => {
                std::fs::write(path, text)?;
            }
        }
        Ok(())
    }
}

/// Key=value CSV fallback for payloads that are naturally JSON objects.
pub fn kv_csv(pairs: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in pairs {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}
