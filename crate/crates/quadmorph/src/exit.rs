//! Process exit codes.

use quadmorph_core::Error;

use crate::io::ParseError;

pub const OK: i32 = 0;
pub const OTHER: i32 = 1;
pub const USAGE: i32 = 2;
pub const PARSE: i32 = 3;
pub const SIZE_MISMATCH: i32 = 4;
pub const LINEAR: i32 = 5;
pub const SEARCH_EXHAUSTED: i32 = 6;
pub const SCHEDULE_FAILURE: i32 = 7;
pub const BUDGET_EXCEEDED: i32 = 8;
pub const VALIDATION_FAILED: i32 = 9;
pub const INVALID_CONFIGURATION: i32 = 10;

pub const HELP: &str = "\
Exit codes:
   0  success
   1  I/O or other failure
   2  usage error
   3  input file does not parse
   4  start and goal differ in module count
   5  start or goal is a straight line
   6  no isomorphism chain within the sample budget
   7  no dependency-respecting schedule
   8  computation budget exceeded
   9  plan failed validation
  10  invalid or disconnected configuration";

pub fn for_core(e: &Error) -> i32 {
    match e {
        Error::SizeMismatch { .. } => SIZE_MISMATCH,
        Error::LinearConfiguration => LINEAR,
        Error::SearchExhausted { .. } => SEARCH_EXHAUSTED,
        Error::ScheduleFailure => SCHEDULE_FAILURE,
        Error::BudgetExceeded(_) => BUDGET_EXCEEDED,
        Error::InvalidConfiguration(_) | Error::DisconnectedConfiguration => INVALID_CONFIGURATION,
        Error::NoEmbedding | Error::MappingInvalid | Error::Precondition(_) => OTHER,
    }
}

pub fn for_parse(e: &ParseError) -> i32 {
    match e {
        ParseError::Io { .. } => OTHER,
        ParseError::Json(_) | ParseError::Step(_) => PARSE,
        ParseError::Configuration(c) => for_core(c),
    }
}

/// Maps any error raised by the CLI to its exit code.
pub fn code(e: &anyhow::Error) -> i32 {
    if let Some(p) = e.downcast_ref::<ParseError>() {
        return for_parse(p);
    }
    if let Some(c) = e.downcast_ref::<Error>() {
        return for_core(c);
    }
    OTHER
}
