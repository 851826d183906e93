//! Library side of the `vatgame` command: configuration layering, table
//! rendering and one function per subcommand.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use config::{Format, RunConfig};
pub use error::{CliError, ConfigError};
pub use table::{fixed, Cell, Table};
