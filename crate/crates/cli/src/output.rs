use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use rabi2p_core::EvalFlags;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Fixed 17-significant-digit rendering used in every CSV column.
pub fn float(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn flags_json(flags: EvalFlags) -> Value {
    json!({
        "near_pole": flags.near_pole,
        "overflow": flags.overflow,
        "not_converged": flags.not_converged,
        "huge": flags.huge,
    })
}

/// Opens the destination, stdout when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink(path)?))
}

/// Writes `data` wrapped in the versioned envelope.
pub fn write_json(path: Option<&Path>, command: &str, data: Value) -> Result<()> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "data": data,
    });
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
