//! Library side of the `electctl` command-line tool: file formats and
//! command implementations.

pub mod commands;
pub mod format;
