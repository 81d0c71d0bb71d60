use std::io::Write;

use bmres::Budget;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Negative = 1,
    InputError = 2,
    BudgetExhausted = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Precedence when a corpus mixes outcomes: input errors, then budget, then negatives.
    pub fn severity(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Negative => 1,
            Status::BudgetExhausted => 2,
            Status::InputError => 3,
        }
    }
}

impl From<&bmres::Error> for Status {
    fn from(e: &bmres::Error) -> Self {
        match e {
            bmres::Error::BudgetExceeded | bmres::Error::PathBudget { .. } => Status::BudgetExhausted,
            _ => Status::InputError,
        }
    }
}

/// What a command produced for one item.
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub orders_tested: u64,
}

impl Outcome {
    pub fn new(status: Status, result: Value) -> Self {
        Outcome {
            status,
            result,
            orders_tested: 0,
        }
    }

    pub fn error(e: &bmres::Error) -> Self {
        Outcome::new(Status::from(e), serde_json::json!({ "error": e.to_string() }))
    }
}

#[derive(Serialize)]
struct InputRecord<'a> {
    name: &'a str,
    sha256: String,
}

#[derive(Serialize)]
struct Spent {
    orders: u64,
}

#[derive(Serialize)]
pub struct Record<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    input: InputRecord<'a>,
    seed: u64,
    budget: Budget,
    budget_spent: Spent,
    status: &'static str,
    result: Value,
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn record<'a>(command: &'a str, name: &'a str, text: &str, seed: u64, budget: Budget, o: Outcome) -> Record<'a> {
    Record {
        tool: "bmres",
        version: env!("CARGO_PKG_VERSION"),
        command,
        input: InputRecord {
            name,
            sha256: sha256_hex(text),
        },
        seed,
        budget,
        budget_spent: Spent {
            orders: o.orders_tested,
        },
        status: match o.status {
            Status::Ok => "ok",
            Status::Negative => "negative",
            Status::InputError => "input_error",
            Status::BudgetExhausted => "budget_exhausted",
        },
        result: o.result,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// One pretty-printed document; an array for several inputs.
    Json,
    /// One compact record per line.
    Jsonl,
}

pub fn emit(records: &[Record], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Json => {
            if let [single] = records {
                serde_json::to_writer_pretty(&mut *out, single)?;
            } else {
                serde_json::to_writer_pretty(&mut *out, records)?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}
