//! Diagram enumeration dumps: all partitions of a slot table under the
//! declared constraints, as a count plus an optional block listing.

use anyhow::Result;
use fejer_core::wick::{enumerate_diagrams, DiagramConstraints, DiagramTable};
use serde::Serialize;

use crate::artifact::RunDir;
use crate::config::DiagramsConfig;

#[derive(Serialize)]
struct DiagramsReport {
    rows: Vec<usize>,
    gaussian: bool,
    connected: bool,
    no_flat: bool,
    no_singletons: bool,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagrams: Option<Vec<Vec<Vec<usize>>>>,
}

pub fn run(cfg: &DiagramsConfig, run: &mut RunDir) -> Result<bool> {
    let table =
        DiagramTable::new(&cfg.rows).map_err(|e| anyhow::anyhow!("table: {e}"))?;
    let constraints = DiagramConstraints {
        connected: cfg.connected,
        no_flat: cfg.no_flat,
        gaussian: cfg.gaussian,
        no_singletons: cfg.no_singletons,
    };
    let list =
        enumerate_diagrams(&table, constraints).map_err(|e| anyhow::anyhow!("enumeration: {e}"))?;

    let report = DiagramsReport {
        rows: cfg.rows.clone(),
        gaussian: cfg.gaussian,
        connected: cfg.connected,
        no_flat: cfg.no_flat,
        no_singletons: cfg.no_singletons,
        count: list.len(),
        diagrams: cfg.list.then(|| list.iter().map(|d| d.blocks.clone()).collect()),
    };
    run.write_json("diagrams.json", &report)?;

    println!("diagrams: {} under the declared constraints", report.count);
    Ok(true)
}
