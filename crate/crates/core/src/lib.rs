//! Rule-based multi-agent stock market simulation.
//!
//! The crate is `no_std` (with `alloc`) and contains everything that is pure
//! computation: market state and clearing, the trading agents, volume/price
//! signal detection, portfolio accounting, the tick loop, tournaments and the
//! trade critic. File formats, the CLI and the game service live in the
//! `stockgame` crate.
//!
//! All currency amounts are fixed-point [`Money`] values (micro-units), so
//! cash and share conservation hold exactly rather than up to rounding.
#![no_std]

extern crate alloc;

pub mod accounting;
pub mod agents;
pub mod engine;
mod error;
pub mod market;
mod money;
pub mod signals;
pub mod synthetic;

pub use error::Error;
pub use money::{Money, ParseMoneyError, ParticipantId, Symbol};

pub type Result<T, E = Error> = core::result::Result<T, E>;
