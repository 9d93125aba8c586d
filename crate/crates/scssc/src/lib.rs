//! Files, configuration, thread pool and command-line support around
//! [`scssc_core`].
//!
//! | module     | contents                                             |
//! |------------|------------------------------------------------------|
//! | [`envi`]   | ENVI header + raw payload read/write                 |
//! | [`csv`]    | label grids, ground truth, coefficient/exemplar dumps |
//! | [`ppm`]    | cluster maps and superpixel overlays                 |
//! | [`config`] | JSON parameters and scene presets                    |
//! | [`report`] | metrics and timing sidecars                          |
//! | [`synth`]  | planted-subspace scenes                              |
//! | [`bench`]  | scaling benchmark                                    |

pub mod bench;
pub mod config;
pub mod csv;
pub mod envi;
mod error;
pub mod exec;
pub mod ppm;
pub mod report;
pub mod run;
pub mod synth;

pub use error::{Error, Result};
pub use exec::{RayonExecutor, StdClock};
pub use scssc_core;
