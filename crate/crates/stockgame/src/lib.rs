//! File formats, reports, the command-line tool and the HTTP game service
//! around [`stockgame_core`].

pub mod batch;
pub mod csvio;
mod error;
pub mod report;
pub mod runlog;
pub mod scenario;
pub mod service;
pub mod wire;

pub use error::{Error, Result};
pub use stockgame_core as core;
