use crate::{Cli, Format};
use serde::Serialize;
use std::io::Write;
use std::process::ExitCode;
use trimis::Error;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_VIOLATION: u8 = 4;
pub const EXIT_OTHER: u8 = 1;

#[derive(Debug, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip)]
    pub code: u8,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { kind: "invalid_argument", message: msg.into(), code: EXIT_USAGE }
    }

    pub fn violation(msg: impl Into<String>) -> Self {
        Failure { kind: "audit_violation", message: msg.into(), code: EXIT_VIOLATION }
    }

    pub fn io(e: std::io::Error) -> Self {
        Failure { kind: "io", message: e.to_string(), code: EXIT_OTHER }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, code) = match &e {
            Error::InvalidArgument(_) => ("invalid_argument", EXIT_USAGE),
            Error::Parse { .. } => ("parse", EXIT_USAGE),
            Error::BudgetExceeded(_) => ("budget_exceeded", EXIT_BUDGET),
            Error::Precondition(_) => ("precondition", EXIT_OTHER),
            Error::NotMaximal(_) => ("not_maximal", EXIT_OTHER),
            Error::OutOfRange { .. } => ("out_of_range", EXIT_OTHER),
            Error::EmptyConditioning => ("empty_conditioning", EXIT_OTHER),
            Error::Corrupted { .. } => ("corrupted", EXIT_OTHER),
            Error::Construction(_) => ("construction", EXIT_OTHER),
        };
        Failure { kind, message: e.to_string(), code }
    }
}

pub fn report_failure(f: &Failure, format: Format) -> ExitCode {
    match format {
        Format::Json => eprintln!("{}", serde_json::json!({ "error": f.kind, "message": f.message })),
        Format::Csv => eprintln!("error[{}]: {}", f.kind, f.message),
    }
    ExitCode::from(f.code)
}

/// Writes the finished output in one piece, to the `--out` file or standard output.
pub fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(Failure::io),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(Failure::io)?;
            out.flush().map_err(Failure::io)
        }
    }
}

pub fn emit_bytes(cli: &Cli, bytes: &[u8]) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, bytes).map_err(Failure::io),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).map_err(Failure::io)?;
            out.flush().map_err(Failure::io)
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

/// Builds CSV text from a header and rows; fields are written as given.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Table { text: format!("{header}\n") }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}
