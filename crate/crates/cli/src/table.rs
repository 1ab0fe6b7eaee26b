//! Plot-ready CSV tables.

use std::path::Path;

use anyhow::{bail, Result};
use fracdim::dims::BoxCount;
use fracdim::equihom::EquihomRow;
use fracdim::ProfileRow;

pub enum LogLogTable<'a> {
    Counts(&'a [BoxCount]),
    Profile(&'a [ProfileRow]),
    Equihom(&'a [EquihomRow]),
}

impl LogLogTable<'_> {
    fn is_empty(&self) -> bool {
        match self {
            LogLogTable::Counts(r) => r.is_empty(),
            LogLogTable::Profile(r) => r.is_empty(),
            LogLogTable::Equihom(r) => r.is_empty(),
        }
    }
}

/// Write `table` as CSV. Nothing is written for an empty table.
pub fn emit_loglog_table(table: LogLogTable<'_>, path: &Path) -> Result<()> {
    if table.is_empty() {
        bail!("nothing to write to {}", path.display());
    }
    let mut w = csv::Writer::from_path(path)?;
    match table {
        LogLogTable::Counts(rows) => {
            w.write_record(["delta", "count", "log10_inv_delta", "log10_count"])?;
            for r in rows {
                let inv = -r.delta.ln() / std::f64::consts::LN_10;
                let count = (r.count as f64).log10();
                w.write_record([r.delta.to_string(), r.count.to_string(), inv.to_string(), count.to_string()])?;
            }
        }
        LogLogTable::Profile(rows) => {
            w.write_record(["delta", "rho", "sup_count", "inf_count", "ratio"])?;
            for r in rows {
                let ratio = r.sup_count as f64 / r.inf_count as f64;
                w.write_record([
                    r.delta.to_string(),
                    r.rho.to_string(),
                    r.sup_count.to_string(),
                    r.inf_count.to_string(),
                    ratio.to_string(),
                ])?;
            }
        }
        LogLogTable::Equihom(rows) => {
            w.write_record(["delta", "rho", "sup_count", "inf_count", "ratio"])?;
            for r in rows {
                w.write_record([
                    r.delta.to_string(),
                    r.rho.to_string(),
                    r.sup_count.to_string(),
                    r.inf_count.to_string(),
                    r.ratio.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
