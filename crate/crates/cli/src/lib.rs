//! Configuration parsing, potential expressions and report emission for the
//! `fewbody` command-line tool.

pub mod config;
pub mod error;
pub mod expr;
pub mod report;
pub mod run;

pub use config::{parse_config, parse_config_in, to_canonical_json, Format, Problem, RunSpec};
pub use error::CliError;
pub use expr::{parse_potential_expr, Expr, ParseError};
pub use report::{emit_report, BenchReport, Report};
pub use run::{bench, run};
