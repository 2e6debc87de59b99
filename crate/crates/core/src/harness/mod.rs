//! Fixture files of known curves and the verification pipeline behind the
//! `verify` subcommand.

mod fixtures;
mod verify;

pub use fixtures::{load_fixtures, parse_fixtures, to_toml, FixtureEntry, FixtureFile, FixtureKind};
pub use verify::{verify, EntryReport, Verdict, VerificationReport};

/// The shipped fixture file.
pub const TABLES: &str = include_str!("../../fixtures/tables.toml");
