//! JSON front end: one request object in, one result object out.

mod commands;
pub mod golden;
mod render;
pub mod request;

use serde_json::{json, Value};

use spectral_pairs::Error;

pub use request::Request;

/// Values from command-line flags, used when a request leaves a field out.
#[derive(Clone, Debug, Default)]
pub struct Defaults {
    pub tol: Option<f64>,
    pub radius: Option<f64>,
    pub n_max: Option<i64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Refuted,
    None,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Refuted => "refuted",
            Status::None => "none",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CommandResult {
    pub cmd: &'static str,
    pub status: Status,
    pub provenance: &'static str,
    pub payload: Value,
    /// The hypothesis or identity that failed, for refutations.
    pub clause: Option<String>,
    /// Raw scan data for `--dump-csv`.
    pub csv: Option<String>,
}

impl CommandResult {
    fn new(cmd: &'static str, provenance: &'static str, status: Status, payload: Value) -> Self {
        CommandResult {
            cmd,
            status,
            provenance,
            payload,
            clause: None,
            csv: None,
        }
    }

    fn refuted(mut self, clause: impl Into<String>) -> Self {
        self.status = Status::Refuted;
        self.clause = Some(clause.into());
        self
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "status": self.status.as_str(),
            "cmd": self.cmd,
            "provenance": self.provenance,
            "payload": self.payload,
        });
        if let Some(c) = &self.clause {
            v["clause"] = json!(c);
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    Malformed(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Malformed(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, msg) = match self {
            Failure::Malformed(m) => ("malformed-input", m),
            Failure::Internal(m) => ("internal", m),
        };
        json!({ "status": "error", "kind": kind, "message": msg })
    }
}

/// Library errors either refute the request's mathematical claim or
/// reject the request itself.
enum Classified {
    Refutation(String),
    Failure(Failure),
}

fn classify(e: Error) -> Classified {
    match e {
        Error::EmptySet | Error::DimensionMismatch { .. } | Error::InvalidTolerance(_) | Error::Precondition(_) => {
            Classified::Failure(Failure::Malformed(e.to_string()))
        }
        Error::Internal(m) => Classified::Failure(Failure::Internal(m)),
        Error::Hypothesis { clause, detail } => Classified::Refutation(format!("{clause}: {detail}")),
        other => Classified::Refutation(other.to_string()),
    }
}

pub fn parse_request(input: &str) -> Result<Request, Failure> {
    serde_json::from_str(input).map_err(|e| Failure::Malformed(e.to_string()))
}

pub fn run(request: &Request, defaults: &Defaults) -> Result<CommandResult, Failure> {
    let cmd = request.name();
    match commands::dispatch(request, defaults) {
        Ok(r) => Ok(r),
        Err(e) => match classify(e) {
            Classified::Refutation(clause) => {
                Ok(CommandResult::new(cmd, commands::provenance(request), Status::Refuted, Value::Null).refuted(clause))
            }
            Classified::Failure(f) => Err(f),
        },
    }
}

/// Rendered output of one invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub json: Value,
    pub exit_code: i32,
    pub csv: Option<String>,
}

pub fn run_str(input: &str, defaults: &Defaults) -> Outcome {
    match parse_request(input).and_then(|r| run(&r, defaults)) {
        Ok(r) => Outcome {
            json: r.to_json(),
            exit_code: 0,
            csv: r.csv,
        },
        Err(f) => Outcome {
            json: f.to_json(),
            exit_code: f.exit_code(),
            csv: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(e: Error) -> i32 {
        match classify(e) {
            Classified::Refutation(_) => 0,
            Classified::Failure(f) => f.exit_code(),
        }
    }

    #[test]
    fn error_classes() {
        assert_eq!(code(Error::EmptySet), 2);
        assert_eq!(code(Error::InvalidTolerance(-1.0)), 2);
        assert_eq!(code(Error::Internal("x".into())), 3);
        assert_eq!(code(Error::Singular), 0);
        assert_eq!(code(Error::Unsupported("x".into())), 0);
        match classify(Error::Hypothesis { clause: "#B < A".into(), detail: "#B = 4".into() }) {
            Classified::Refutation(c) => assert_eq!(c, "#B < A: #B = 4"),
            Classified::Failure(f) => panic!("{f:?}"),
        }
    }
}
