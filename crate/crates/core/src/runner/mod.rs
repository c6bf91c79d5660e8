//! Configuration, checkpointing and the run driver behind the CLI.

mod checkpoint;
mod config;
mod driver;

pub use checkpoint::{checkpoint_name, checkpoint_path, read_checkpoint, write_checkpoint, Checkpoint, MAGIC};
pub use config::{parse_config, parse_modes, InitialCondition, SimConfig, MAX_N};
/// Number of steps of size `dt` spanning `t`, if `dt` divides `t`.
pub fn steps_for_time(t: f64, dt: f64) -> Option<u64> {
    config::steps_for(t, dt)
}

pub use driver::{budget_for, initial_state, RunSummary, Simulation, SIN_X_L2};
