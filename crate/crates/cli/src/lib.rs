//! Command-line front end for `sobolev-curves`: the JSON measure document
//! format, the commands and their report envelope.

pub mod doc;
pub mod output;
pub mod run;

pub use doc::{load, parse_document, Document, InputError, Loaded, MeasureDoc};
pub use run::{main_with_args, Cli, Command};
