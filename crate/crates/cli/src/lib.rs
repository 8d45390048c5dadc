//! Command implementations for the `idfawe` binary.

pub mod commands;
pub mod config;

use config::UsageError;

pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Exit status for a failed command: 2 for usage or configuration
/// problems, 1 for anything wrong with the data.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if cause.downcast_ref::<idfawe_core::Error>().is_some_and(|e| e.is_config()) {
            return EXIT_USAGE;
        }
    }
    EXIT_DATA
}
