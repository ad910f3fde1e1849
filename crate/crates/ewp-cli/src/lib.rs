//! Library surface of the `ewp` command line tool, exposed so integration
//! tests can drive the commands and share the frozen suite constants.

pub mod commands;
pub mod csvio;
pub mod report;
