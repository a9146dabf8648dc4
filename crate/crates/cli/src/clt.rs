//! Replica experiments for the normalized-functional limit theorems:
//! simulate, evaluate, normalize by the window, and compare the replica
//! variance to the exact target.

use anyhow::{bail, Result};
use fejer_core::processes::mc_clt_experiment;
use serde::Serialize;

use crate::artifact::RunDir;
use crate::config::CltConfig;

#[derive(Serialize)]
struct CltSummary {
    n: usize,
    replicas: usize,
    seed: u64,
    target_variance: f64,
    mean: f64,
    variance: f64,
    variance_ratio: f64,
    ratio_std_error: f64,
    skewness: f64,
    excess_kurtosis: f64,
    kolmogorov: f64,
}

pub fn run(cfg: &CltConfig, run: &mut RunDir, seed: Option<u64>) -> Result<bool> {
    let Some(seed) = seed else {
        bail!("clt is stochastic: supply a seed (--seed, FEJER_SEED, or `seed =` in the config)");
    };
    let model = cfg.model.build()?;
    let functional = cfg.build_functional()?;

    let report = mc_clt_experiment(&model, &functional, cfg.n, cfg.replicas, seed)
        .map_err(|e| anyhow::anyhow!("experiment: {e}"))?;

    let rows: Vec<Vec<String>> = report
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![format!("{i}"), format!("{v}")])
        .collect();
    run.write_csv("replicas.csv", &["replica", "value"], &rows)?;

    let summary = CltSummary {
        n: cfg.n,
        replicas: report.replicas,
        seed,
        target_variance: report.target_variance,
        mean: report.mean,
        variance: report.variance,
        variance_ratio: report.variance_ratio,
        ratio_std_error: report.ratio_std_error,
        skewness: report.skewness,
        excess_kurtosis: report.excess_kurtosis,
        kolmogorov: report.kolmogorov,
    };
    run.write_json("clt_report.json", &summary)?;

    println!(
        "clt: variance {:.6e} vs target {:.6e} (ratio {:.4} ± {:.4}), skew {:.3}, exkurt {:.3}",
        report.variance,
        report.target_variance,
        report.variance_ratio,
        report.ratio_std_error,
        report.skewness,
        report.excess_kurtosis
    );

    if let Some([lo, hi]) = cfg.variance_ratio_band {
        if !(report.variance_ratio >= lo && report.variance_ratio <= hi) {
            println!(
                "clt: threshold failure: ratio {} outside [{lo}, {hi}]",
                report.variance_ratio
            );
            return Ok(false);
        }
    }
    Ok(true)
}
