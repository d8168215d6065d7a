//! CSV files: price bars, sparse fundamentals, trade logs and signal
//! violations. UTF-8, comma separated, dot decimals, one header row.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use csv::{ReaderBuilder, StringRecord, WriterBuilder};
use stockgame_core::accounting::TradeRecord;
use stockgame_core::market::{FundamentalsOverride, PriceBar, Side};
use stockgame_core::signals::Violation;
use stockgame_core::{Money, Symbol};

use crate::error::{Error, Result};

pub const BARS_HEADER: [&str; 4] = ["tick", "symbol", "close", "volume"];
pub const FUNDAMENTALS_HEADER: [&str; 8] = ["tick", "symbol", "eps", "book", "debt", "equity", "dividend", "shares_out"];
pub const TRADES_HEADER: [&str; 7] = ["tick", "participant", "symbol", "side", "qty", "price", "fee"];
pub const VIOLATIONS_HEADER: [&str; 4] = ["rule_id", "tick", "expected", "observed"];

pub type Bars = BTreeMap<Symbol, Vec<PriceBar>>;

/// Column positions of a header, by name.
struct Columns<const N: usize>([usize; N]);

impl<const N: usize> Columns<N> {
    fn new(header: &StringRecord, names: [&str; N]) -> Result<Self> {
        let mut idx = [0; N];
        for (i, name) in names.iter().enumerate() {
            idx[i] = header
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| Error::Row { line: 1, msg: format!("missing column `{name}`") })?;
        }
        if header.len() != N {
            return Err(Error::Row { line: 1, msg: format!("expected columns {}", names.join(",")) });
        }
        Ok(Columns(idx))
    }
}

struct Row<'a> {
    record: &'a StringRecord,
    line: u64,
}

impl Row<'_> {
    fn raw(&self, col: usize) -> &str {
        self.record.get(col).unwrap_or("").trim()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Row { line: self.line, msg: msg.into() }
    }

    fn parse<T: FromStr>(&self, col: usize, what: &str) -> Result<T> {
        let s = self.raw(col);
        s.parse().map_err(|_| self.err(format!("bad {what} `{s}`")))
    }

    fn optional<T: FromStr>(&self, col: usize, what: &str) -> Result<Option<T>> {
        if self.raw(col).is_empty() {
            Ok(None)
        } else {
            self.parse(col, what).map(Some)
        }
    }

    fn symbol(&self, col: usize) -> Result<Symbol> {
        match self.raw(col) {
            "" => Err(self.err("empty symbol")),
            s => Ok(Symbol::from(s)),
        }
    }
}

fn rows<R: Read, const N: usize>(
    reader: R,
    names: [&str; N],
    mut each: impl FnMut(&Row<'_>, &[usize; N]) -> Result<()>,
) -> Result<()> {
    let mut rdr = ReaderBuilder::new().flexible(true).from_reader(reader);
    let cols = Columns::new(rdr.headers()?, names)?;
    let mut record = StringRecord::new();
    while rdr.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        let row = Row { record: &record, line };
        if record.len() != N {
            return Err(row.err(format!("expected {N} fields, got {}", record.len())));
        }
        each(&row, &cols.0)?;
    }
    Ok(())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(Error::io(path))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(Error::io(path))
}

/// Bars per symbol. Rows of different symbols may interleave, but each
/// symbol's ticks must strictly increase. `open` is the previous close.
pub fn read_bars<R: Read>(reader: R) -> Result<Bars> {
    let mut bars = Bars::new();
    rows(reader, BARS_HEADER, |row, c| {
        let tick: u64 = row.parse(c[0], "tick")?;
        let symbol = row.symbol(c[1])?;
        let close: Money = row.parse(c[2], "close")?;
        let volume: u64 = row.parse(c[3], "volume")?;
        if !close.is_positive() {
            return Err(row.err(format!("non-positive close {close}")));
        }
        let series = bars.entry(symbol.clone()).or_default();
        let open = match series.last() {
            Some(prev) if prev.tick >= tick => {
                return Err(row.err(format!("tick {tick} for {symbol} does not follow tick {}", prev.tick)))
            }
            Some(prev) => prev.close,
            None => close,
        };
        series.push(PriceBar { tick, open, close, volume });
        Ok(())
    })?;
    Ok(bars)
}

pub fn load_bars(path: impl AsRef<Path>) -> Result<Bars> {
    read_bars(open(path.as_ref())?)
}

/// Writes bars ordered by tick, then symbol.
pub fn write_bars<W: Write>(writer: W, bars: &Bars) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(writer);
    w.write_record(BARS_HEADER)?;
    let mut all: Vec<(&Symbol, &PriceBar)> = bars.iter().flat_map(|(s, bs)| bs.iter().map(move |b| (s, b))).collect();
    all.sort_by_key(|(s, b)| (b.tick, *s));
    for (symbol, b) in all {
        w.write_record([b.tick.to_string(), symbol.to_string(), b.close.to_string(), b.volume.to_string()])?;
    }
    w.flush().map_err(Error::io("<bars>"))?;
    Ok(())
}

pub fn save_bars(path: impl AsRef<Path>, bars: &Bars) -> Result<()> {
    write_bars(create(path.as_ref())?, bars)
}

/// Sparse fundamentals; an empty cell keeps the previous value.
pub fn read_fundamentals<R: Read>(reader: R) -> Result<Vec<FundamentalsOverride>> {
    let mut out = Vec::new();
    let mut last: BTreeMap<Symbol, u64> = BTreeMap::new();
    rows(reader, FUNDAMENTALS_HEADER, |row, c| {
        let tick: u64 = row.parse(c[0], "tick")?;
        let symbol = row.symbol(c[1])?;
        if let Some(prev) = last.insert(symbol.clone(), tick) {
            if prev >= tick {
                return Err(row.err(format!("tick {tick} for {symbol} does not follow tick {prev}")));
            }
        }
        out.push(FundamentalsOverride {
            tick,
            symbol,
            price: None,
            eps: row.optional(c[2], "eps")?,
            book: row.optional(c[3], "book")?,
            debt: row.optional(c[4], "debt")?,
            equity: row.optional(c[5], "equity")?,
            dividend: row.optional(c[6], "dividend")?,
            shares_out: row.optional(c[7], "shares_out")?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn load_fundamentals(path: impl AsRef<Path>) -> Result<Vec<FundamentalsOverride>> {
    read_fundamentals(open(path.as_ref())?)
}

pub fn write_fundamentals<W: Write>(writer: W, rows: &[FundamentalsOverride]) -> Result<()> {
    fn cell<T: ToString>(v: Option<T>) -> String {
        v.map(|v| v.to_string()).unwrap_or_default()
    }
    let mut w = WriterBuilder::new().from_writer(writer);
    w.write_record(FUNDAMENTALS_HEADER)?;
    for o in rows {
        w.write_record([
            o.tick.to_string(),
            o.symbol.to_string(),
            cell(o.eps),
            cell(o.book),
            cell(o.debt),
            cell(o.equity),
            cell(o.dividend),
            cell(o.shares_out),
        ])?;
    }
    w.flush().map_err(Error::io("<fundamentals>"))?;
    Ok(())
}

pub fn write_trades<W: Write>(writer: W, trades: &[TradeRecord]) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(writer);
    w.write_record(TRADES_HEADER)?;
    for t in trades {
        w.write_record([
            t.tick.to_string(),
            t.participant.to_string(),
            t.symbol.to_string(),
            t.side.as_str().to_string(),
            t.quantity.to_string(),
            t.price.to_string(),
            t.fee.to_string(),
        ])?;
    }
    w.flush().map_err(Error::io("<trades>"))?;
    Ok(())
}

pub fn read_trades<R: Read>(reader: R) -> Result<Vec<TradeRecord>> {
    let mut out = Vec::new();
    rows(reader, TRADES_HEADER, |row, c| {
        let side = match row.raw(c[3]) {
            "buy" => Side::Buy,
            "sell" => Side::Sell,
            s => return Err(row.err(format!("bad side `{s}`"))),
        };
        out.push(TradeRecord {
            tick: row.parse(c[0], "tick")?,
            participant: row.raw(c[1]).into(),
            symbol: row.symbol(c[2])?,
            side,
            quantity: row.parse(c[4], "qty")?,
            price: row.parse(c[5], "price")?,
            fee: row.parse(c[6], "fee")?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn write_violations<W: Write>(writer: W, violations: &[Violation]) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(writer);
    w.write_record(VIOLATIONS_HEADER)?;
    for v in violations {
        w.write_record([v.rule_id.to_string(), v.tick.to_string(), v.expected.to_string(), v.observed.to_string()])?;
    }
    w.flush().map_err(Error::io("<violations>"))?;
    Ok(())
}
