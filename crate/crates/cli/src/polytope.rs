//! Power-counting reports: membership of an exponent vector in the
//! polytope of a given matrix, its 0/1 vertices, the growth exponent, and
//! cumulant-growth sweeps over generated multigraph families.

use anyhow::{bail, Result};
use fejer_core::graphs::{
    alpha_discrete_forms, alpha_exponent, cumulant_inequality_check, pcp_membership,
    pcp_vertices, PcpCase,
};
use serde::Serialize;

use crate::artifact::RunDir;
use crate::config::{parse_rat, rat_str, PolytopeConfig};

#[derive(Serialize)]
struct ViolationOut {
    /// Bitmask of the violating column subset; null flags the total-sum
    /// equality of the Lebesgue case.
    subset: Option<u32>,
    lhs: String,
    rhs: String,
}

#[derive(Serialize)]
struct MembershipOut {
    member: bool,
    violation: Option<ViolationOut>,
}

#[derive(Serialize)]
struct FamilyRowOut {
    k: usize,
    graphs: usize,
    alpha: Option<String>,
    bound: String,
    holds: bool,
    strict: bool,
}

#[derive(Serialize)]
struct FamilyOut {
    rows: Vec<FamilyRowOut>,
    all_hold: bool,
    facets_hold: bool,
}

#[derive(Serialize)]
struct PolytopeReport {
    case: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    columns: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    membership: Option<MembershipOut>,
    /// Growth exponent; the two exhaustive forms agree by construction and
    /// are reported once.
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<FamilyOut>,
}

pub fn run(cfg: &PolytopeConfig, run: &mut RunDir) -> Result<bool> {
    let case: PcpCase = cfg.case.into();
    let case_name = match cfg.case {
        crate::config::CaseKind::Torus => "torus",
        crate::config::CaseKind::Counting => "counting",
        crate::config::CaseKind::Lebesgue => "lebesgue",
    };

    let mut report = PolytopeReport {
        case: case_name,
        columns: None,
        rank: None,
        z: None,
        membership: None,
        alpha: None,
        vertices: None,
        family: None,
    };

    match (&cfg.graph, &cfg.family) {
        (Some(graph), None) => {
            let m = graph.build()?;
            report.columns = Some(m.e());
            report.rank = Some(m.rank());
            if let Some(zs) = &cfg.z {
                let z: Vec<_> = zs.iter().map(|s| parse_rat(s)).collect::<Result<_>>()?;
                let mem = pcp_membership(&m, &z, case)
                    .map_err(|e| anyhow::anyhow!("membership: {e:?}"))?;
                report.z = Some(zs.clone());
                report.membership = Some(MembershipOut {
                    member: mem.member,
                    violation: mem.violation.map(|v| ViolationOut {
                        subset: v.subset,
                        lhs: rat_str(v.lhs),
                        rhs: rat_str(v.rhs),
                    }),
                });
                if cfg.alpha {
                    let a = alpha_exponent(&m, &z, case)
                        .map_err(|e| anyhow::anyhow!("alpha: {e:?}"))?;
                    if case != PcpCase::Lebesgue {
                        // belt-and-braces: the two discrete forms must agree
                        let (r, c) = alpha_discrete_forms(&m, &z)
                            .map_err(|e| anyhow::anyhow!("alpha forms: {e:?}"))?;
                        if r != c {
                            bail!("internal: discrete alpha forms disagree ({r} vs {c})");
                        }
                    }
                    report.alpha = Some(rat_str(a));
                }
            } else if cfg.alpha {
                bail!("alpha report needs an exponent vector z");
            }
            if cfg.vertices {
                let verts =
                    pcp_vertices(&m, case).map_err(|e| anyhow::anyhow!("vertices: {e:?}"))?;
                report.vertices =
                    Some(verts.iter().map(|v| v.iter().map(|r| rat_str(*r)).collect()).collect());
            }
        }
        (None, Some(spec)) => {
            let z = spec.exponents()?;
            let rep = cumulant_inequality_check(&spec.gamma_family(), &z, spec.k_max())
                .map_err(|e| anyhow::anyhow!("family sweep: {e:?}"))?;
            report.z = Some(z.iter().map(|r| rat_str(*r)).collect());
            report.family = Some(FamilyOut {
                rows: rep
                    .rows
                    .iter()
                    .map(|r| FamilyRowOut {
                        k: r.k,
                        graphs: r.graphs,
                        alpha: r.alpha.map(rat_str),
                        bound: rat_str(r.bound),
                        holds: r.holds,
                        strict: r.strict,
                    })
                    .collect(),
                all_hold: rep.all_hold,
                facets_hold: rep.facets_hold,
            });
        }
        _ => bail!("polytope needs exactly one of `graph` / `family`"),
    }

    run.write_json("polytope.json", &report)?;

    match (&report.membership, &report.family) {
        (Some(m), _) => println!(
            "polytope: member = {}{}",
            m.member,
            report.alpha.as_ref().map(|a| format!(", alpha = {a}")).unwrap_or_default()
        ),
        (_, Some(f)) => println!(
            "polytope: family bounds {} (facets {})",
            if f.all_hold { "hold" } else { "violated" },
            if f.facets_hold { "hold" } else { "violated" }
        ),
        _ => {}
    }
    Ok(true)
}
