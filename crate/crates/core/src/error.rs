use alloc::string::String;

use crate::money::{ParticipantId, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty market")]
    EmptyMarket,
    #[error("unknown symbol {0}")]
    UnknownSymbol(Symbol),
    #[error("unknown participant {0}")]
    UnknownParticipant(ParticipantId),
    #[error("non-positive quantity for {0}")]
    NonPositiveQuantity(Symbol),
    #[error("insufficient cash: need {need}, have {have}")]
    InsufficientCash { need: crate::Money, have: crate::Money },
    #[error("insufficient holdings of {symbol}: need {need}, have {have}")]
    InsufficientHoldings { symbol: Symbol, need: u64, have: u64 },
    #[error("missing price bar for {symbol} at tick {tick}")]
    MissingBar { symbol: Symbol, tick: u64 },
    #[error("window too short: need at least {need} bars, got {got}")]
    WindowTooShort { need: usize, got: usize },
    #[error("infeasible generator config: {0}")]
    Infeasible(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("participant {0} does not place orders manually")]
    NotManual(ParticipantId),
    #[error("session finished")]
    Finished,
}
