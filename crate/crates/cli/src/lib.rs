//! Run configuration, branch sweeps, comparison tables, figures and acceptance checks.

pub mod compare;
pub mod config;
pub mod error;
pub mod figure;
pub mod sweep;
pub mod verify;
