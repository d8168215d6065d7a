//! Newline-delimited JSON: one record per line, no trailing commas, no
//! pretty printing. Identical runs give identical bytes.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;
use stockgame_core::engine::{HumanOrder, TickRecord};

use crate::error::{Error, Result};

pub fn write_ndjson<W: Write, T: Serialize>(mut w: W, records: &[T]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(Error::io("<ndjson>"))?;
    }
    w.flush().map_err(Error::io("<ndjson>"))
}

pub fn read_ndjson<R: BufRead, T: DeserializeOwned>(r: R) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(Error::io("<ndjson>"))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Row { line: i as u64 + 1, msg: e.to_string() })?);
    }
    Ok(out)
}

pub fn to_ndjson<T: Serialize>(records: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_ndjson(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("json is utf-8"))
}

pub fn log_to_string(log: &[TickRecord]) -> Result<String> {
    to_ndjson(log)
}

pub fn read_log<R: BufRead>(r: R) -> Result<Vec<TickRecord>> {
    read_ndjson(r)
}

pub fn read_orders<R: BufRead>(r: R) -> Result<Vec<HumanOrder>> {
    read_ndjson(r)
}
