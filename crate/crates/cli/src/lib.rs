//! Front end for `tsing-core`: input documents, JSON reports and the
//! `tsing` command dispatcher.

pub mod app;
pub mod input;
pub mod random;
pub mod report;

pub use app::{evaluate, run, run_batch, Command, Flags, GroupQuery, Outcome};
pub use input::{parse_divisor, parse_document, serialize_divisor, InputDocument, InputError};
