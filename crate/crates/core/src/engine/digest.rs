use alloc::string::String;
use core::fmt::Write;

use sha2::{Digest, Sha256};

use crate::market::MarketSnapshot;

/// Hex SHA-256 (first 16 bytes) over a canonical little-endian encoding of the
/// snapshot. Stable across platforms and runs.
pub fn snapshot_digest(snapshot: &MarketSnapshot) -> String {
    let mut h = Sha256::new();
    h.update(snapshot.tick.to_le_bytes());
    h.update(snapshot.index_level.to_bits().to_le_bytes());
    for stock in snapshot.stocks.values() {
        let sym = stock.symbol.as_str().as_bytes();
        h.update((sym.len() as u64).to_le_bytes());
        h.update(sym);
        for m in [
            stock.price,
            stock.earnings_per_share,
            stock.book_value_per_share,
            stock.debt,
            stock.equity,
            stock.annual_dividend_per_share,
        ] {
            h.update(m.micros().to_le_bytes());
        }
        h.update(stock.shares_outstanding.to_le_bytes());
        h.update(stock.last_volume.to_le_bytes());
    }
    let bytes = h.finalize();
    let mut out = String::with_capacity(32);
    for b in &bytes[..16] {
        let _ = write!(out, "{b:02x}");
    }
    out
}
