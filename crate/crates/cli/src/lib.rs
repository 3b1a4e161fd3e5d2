//! Library side of the `mfourier` command: problems, scenario files and
//! task execution.

pub mod error;
pub mod output;
pub mod problem;
pub mod scenario;
pub mod tasks;

pub use error::CliError;
pub use problem::{FieldDef, Problem, Task};
pub use tasks::{execute, Outcome, Property};
