//! Command-line front end: input formats, reports and the four commands.

pub mod commands;
pub mod report;
pub mod spec;
