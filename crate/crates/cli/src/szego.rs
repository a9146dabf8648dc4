//! Trace-limit convergence runs: a T ladder of normalized graph integrals
//! against the limiting integral, written as one CSV row per T.

use anyhow::{bail, Result};
use fejer_core::fejer::{szego_limit_check, SpectralSymbol};
use fejer_core::SpectralDomain;
use serde::Serialize;

use crate::artifact::RunDir;
use crate::config::SzegoConfig;

#[derive(Serialize)]
struct SzegoSummary {
    domain: &'static str,
    edges: usize,
    window_constant: f64,
    limit_integral: f64,
    target: f64,
    tail_decreasing: bool,
    final_rel_error: f64,
}

pub fn run(cfg: &SzegoConfig, run: &mut RunDir) -> Result<bool> {
    let matrix = cfg.graph.build()?;
    if cfg.t_ladder.is_empty() {
        bail!("t_ladder must be nonempty");
    }
    let domain: SpectralDomain = cfg.domain.into();
    if domain == SpectralDomain::Line && cfg.nystrom == 0 {
        bail!("line-domain traces need nystrom > 0");
    }
    if cfg.symbols.is_empty() {
        bail!("symbols must be nonempty");
    }
    if cfg.symbols.len() != 1 && cfg.symbols.len() != matrix.e() {
        bail!(
            "need one symbol per edge ({}) or a single repeated symbol, got {}",
            matrix.e(),
            cfg.symbols.len()
        );
    }
    let mut symbols: Vec<SpectralSymbol> = Vec::with_capacity(matrix.e());
    for e in 0..matrix.e() {
        let sc = if cfg.symbols.len() == 1 { &cfg.symbols[0] } else { &cfg.symbols[e] };
        let sym = sc.build()?;
        if !sym.validate(512) {
            bail!("symbol {} ({}) fails its declared contract", e, sc.label());
        }
        symbols.push(sym);
    }

    let report = szego_limit_check(&matrix, &symbols, domain, &cfg.t_ladder, cfg.grid, cfg.nystrom)
        .map_err(|e| anyhow::anyhow!("trace ladder: {e:?}"))?;

    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                format!("{}", r.t),
                format!("{}", r.ratio),
                format!("{}", r.target),
                format!("{}", r.rel_error),
            ]
        })
        .collect();
    run.write_csv("szego.csv", &["t", "ratio", "target", "rel_error"], &rows)?;

    let last = report.rows.last().expect("nonempty ladder");
    let summary = SzegoSummary {
        domain: match domain {
            SpectralDomain::Torus => "torus",
            SpectralDomain::Line => "line",
        },
        edges: matrix.e(),
        window_constant: report.k_m,
        limit_integral: report.limit,
        target: report.target,
        tail_decreasing: report.tail_decreasing,
        final_rel_error: last.rel_error,
    };
    run.write_json("szego.json", &summary)?;

    println!(
        "szego: target {:.6e}, final ratio {:.6e} (rel error {:.3e} at T={}), tail {}",
        report.target,
        last.ratio,
        last.rel_error,
        last.t,
        if report.tail_decreasing { "decreasing" } else { "not decreasing" }
    );

    if let Some(max) = cfg.max_tail_rel_error {
        if !(last.rel_error <= max) {
            println!("szego: threshold failure: rel error {} > {max}", last.rel_error);
            return Ok(false);
        }
    }
    Ok(true)
}
