//! Window-kernel diagnostics: p-norm ladders (quadrature vs closed-form
//! bound), the p = 1 log asymptotic, and concentration of the normalized
//! kernel against a cosine test function.

use anyhow::{bail, Result};
use fejer_core::kernels::{
    dirichlet_l1_asymptotic, kernel_norm, verify_kernel_property, NormMethod,
};
use fejer_core::SpectralDomain;
use serde::Serialize;

use crate::artifact::RunDir;
use crate::config::KernelsConfig;

#[derive(Serialize)]
struct L1Row {
    t: f64,
    norm: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct PropertyRow {
    t: f64,
    value: f64,
    deviation: f64,
    tail_bound: f64,
}

#[derive(Serialize)]
struct KernelsSummary {
    domain: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    l1: Option<Vec<L1Row>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    property: Option<Vec<PropertyRow>>,
}

pub fn run(cfg: &KernelsConfig, run: &mut RunDir) -> Result<bool> {
    if cfg.t_ladder.is_empty() {
        bail!("t_ladder must be nonempty");
    }
    let domain: SpectralDomain = cfg.domain.into();
    for &p in &cfg.p {
        if !(p > 1.0) {
            bail!("p-norm exponents need p > 1 (the p = 1 report is the `l1` flag)");
        }
    }
    if domain == SpectralDomain::Torus {
        for &t in &cfg.t_ladder {
            if t < 1.0 || t != t.floor() {
                bail!("torus ladder entries must be integers >= 1, got {t}");
            }
        }
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    for &t in &cfg.t_ladder {
        for &p in &cfg.p {
            for (method, name) in
                [(NormMethod::Quadrature, "quadrature"), (NormMethod::Bound, "bound")]
            {
                let v = kernel_norm(t, p, 1, domain, method);
                rows.push(vec![
                    format!("{t}"),
                    format!("{p}"),
                    name.to_string(),
                    format!("{v}"),
                ]);
            }
        }
    }
    if !rows.is_empty() {
        run.write_csv("kernels.csv", &["t", "p", "method", "value"], &rows)?;
    }

    let l1 = if cfg.l1 {
        if domain != SpectralDomain::Torus {
            bail!("the p = 1 asymptotic report is a torus quantity");
        }
        Some(
            cfg.t_ladder
                .iter()
                .map(|&t| {
                    let r = dirichlet_l1_asymptotic(t as u64);
                    L1Row { t, norm: r.norm, ratio: r.ratio }
                })
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };

    let property = match &cfg.property {
        Some(pc) => {
            if pc.n < 2 || pc.d < 1 {
                bail!("property check needs n >= 2 and d >= 1");
            }
            match domain {
                SpectralDomain::Torus => {
                    for &t in &cfg.t_ladder {
                        if (t as u64) % 2 != 0 {
                            bail!("torus property ladder entries must be even, got {t}");
                        }
                    }
                }
                SpectralDomain::Line => {
                    if pc.n != 2 || pc.d != 1 {
                        bail!("the line property check supports n = 2, d = 1 only");
                    }
                }
            }
            // product-cosine test function: C(u) = prod_i cos(u_i), C(0) = 1
            let c = |u: &[f64]| u.iter().map(|&x| x.cos()).product::<f64>();
            let out = verify_kernel_property(&c, &cfg.t_ladder, pc.n, pc.d, domain);
            Some(
                out.iter()
                    .map(|r| PropertyRow {
                        t: r.t,
                        value: r.value,
                        deviation: r.deviation,
                        tail_bound: r.tail_bound,
                    })
                    .collect::<Vec<_>>(),
            )
        }
        None => None,
    };

    let summary = KernelsSummary {
        domain: match domain {
            SpectralDomain::Torus => "torus",
            SpectralDomain::Line => "line",
        },
        l1,
        property,
    };
    run.write_json("kernels.json", &summary)?;

    let parts: Vec<String> = [
        (!rows.is_empty()).then(|| format!("{} norm rows", rows.len())),
        summary.l1.as_ref().map(|v| format!("{} l1 rows", v.len())),
        summary.property.as_ref().map(|v| format!("{} property rows", v.len())),
    ]
    .into_iter()
    .flatten()
    .collect();
    println!("kernels: wrote {}", parts.join(", "));
    Ok(true)
}
