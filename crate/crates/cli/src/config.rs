//! The experiment file schema and the builders that turn declared sections
//! into core-library objects.
//!
//! Format: TOML, `schema = 1` at the top, one section named after the
//! subcommand it configures (`[szego]`, `[polytope]`, `[clt]`, `[fit]`,
//! `[diagrams]`, `[kernels]`). Unknown keys are rejected so typos surface
//! as schema errors with the offending line. A top-level `seed` supplies
//! the master seed for stochastic commands; `--seed` and the `FEJER_SEED`
//! environment variable override it, in that order of precedence.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use fejer_core::estimation::{FitConfig, SpectralModelFamily, WeightFunction};
use fejer_core::fejer::SpectralSymbol;
use fejer_core::graphs::{GammaFamily, IncidenceMatrix, PcpCase};
use fejer_core::processes::{InnovationFamily, LagKernel, LinearProcessModel};
use fejer_core::{Rat, SpectralDomain};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub seed: Option<u64>,
    pub szego: Option<SzegoConfig>,
    pub polytope: Option<PolytopeConfig>,
    pub clt: Option<CltConfig>,
    pub fit: Option<FitCommandConfig>,
    pub diagrams: Option<DiagramsConfig>,
    pub kernels: Option<KernelsConfig>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("schema error")?;
        if cfg.schema != SCHEMA_VERSION {
            bail!("config schema {} is not the supported version {SCHEMA_VERSION}", cfg.schema);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Torus,
    Line,
}

impl From<DomainKind> for SpectralDomain {
    fn from(d: DomainKind) -> Self {
        match d {
            DomainKind::Torus => SpectralDomain::Torus,
            DomainKind::Line => SpectralDomain::Line,
        }
    }
}

// ---------------------------------------------------------------------------
// shared building blocks

/// Graph/matrix input: a directed n-cycle, an explicit edge list, or raw
/// integer rows (general matrices included).
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphConfig {
    Cycle { n: usize },
    Edges { edges: Vec<(usize, usize)> },
    Rows { rows: Vec<Vec<i64>> },
}

impl GraphConfig {
    pub fn build(&self) -> Result<IncidenceMatrix> {
        let m = match self {
            GraphConfig::Cycle { n } => {
                if *n < 2 {
                    bail!("cycle length must be at least 2");
                }
                let edges: Vec<(usize, usize)> = (0..*n).map(|i| (i, (i + 1) % n)).collect();
                IncidenceMatrix::from_edge_list(*n, &edges)
            }
            GraphConfig::Edges { edges } => {
                let v = edges
                    .iter()
                    .map(|&(t, h)| t.max(h) + 1)
                    .max()
                    .unwrap_or(0);
                IncidenceMatrix::from_edge_list(v, edges)
            }
            GraphConfig::Rows { rows } => IncidenceMatrix::from_rows(rows.clone()),
        };
        m.map_err(|e| anyhow::anyhow!("graph section: {e:?}"))
    }
}

/// Built-in spectral symbols. `frbm` carries a pole at zero when alpha > 0;
/// the half-offset evaluation grids never touch it.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymbolConfig {
    Constant { value: f64 },
    CosineBand { coeffs: Vec<f64> },
    Ar1 { phi: f64 },
    Frbm { gamma: f64, alpha: f64, c: f64 },
}

impl SymbolConfig {
    pub fn build(&self) -> Result<SpectralSymbol> {
        match self {
            SymbolConfig::Constant { value } => {
                if !value.is_finite() {
                    bail!("constant symbol needs a finite value");
                }
                Ok(SpectralSymbol::constant(*value))
            }
            SymbolConfig::CosineBand { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    bail!("cosine-band symbol needs nonempty finite coefficients");
                }
                Ok(SpectralSymbol::cosine_band(coeffs))
            }
            SymbolConfig::Ar1 { phi } => {
                if !(phi.abs() < 1.0) {
                    bail!("ar1 symbol needs |phi| < 1, got {phi}");
                }
                Ok(SpectralSymbol::ar1(*phi))
            }
            SymbolConfig::Frbm { gamma, alpha, c } => {
                if !(*c > 0.0) || !(*alpha >= 0.0) || *alpha >= 0.5 || gamma + alpha <= 0.5 {
                    bail!(
                        "frbm symbol needs c > 0, 0 <= alpha < 1/2, gamma + alpha > 1/2 \
                         (got gamma={gamma}, alpha={alpha}, c={c})"
                    );
                }
                let (g, a, c) = (*gamma, *alpha, *c);
                Ok(SpectralSymbol::new(
                    move |lam| {
                        let l2 = lam * lam;
                        if l2 == 0.0 {
                            return if a == 0.0 { c } else { f64::INFINITY };
                        }
                        c * l2.powf(-a) * (1.0 + l2).powf(-g)
                    },
                    1.0,
                    true,
                ))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SymbolConfig::Constant { value } => format!("constant({value})"),
            SymbolConfig::CosineBand { coeffs } => format!("cosine-band({} lags)", coeffs.len()),
            SymbolConfig::Ar1 { phi } => format!("ar1({phi})"),
            SymbolConfig::Frbm { gamma, alpha, c } => format!("frbm({gamma},{alpha},{c})"),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InnovationConfig {
    Gaussian { variance: f64 },
    CenteredGamma { shape: f64, rate: f64 },
    TwoPoint { scale: f64 },
}

impl InnovationConfig {
    pub fn build(&self) -> InnovationFamily {
        match self {
            InnovationConfig::Gaussian { variance } => {
                InnovationFamily::Gaussian { variance: *variance }
            }
            InnovationConfig::CenteredGamma { shape, rate } => {
                InnovationFamily::CenteredGamma { shape: *shape, rate: *rate }
            }
            InnovationConfig::TwoPoint { scale } => InnovationFamily::TwoPoint { scale: *scale },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    WhiteNoise { innovation: InnovationConfig },
    Geometric { phi: f64, innovation: InnovationConfig },
    Coefficients {
        weights: Vec<f64>,
        #[serde(default)]
        offset: i64,
        #[serde(default = "default_step")]
        step: f64,
        innovation: InnovationConfig,
    },
}

fn default_step() -> f64 {
    1.0
}

impl ModelConfig {
    pub fn build(&self) -> Result<LinearProcessModel> {
        let model = match self {
            ModelConfig::WhiteNoise { innovation } => {
                LinearProcessModel::white_noise(innovation.build())
            }
            ModelConfig::Geometric { phi, innovation } => {
                LinearProcessModel::geometric(*phi, innovation.build())
            }
            ModelConfig::Coefficients { weights, offset, step, innovation } => {
                LinearProcessModel::from_coefficients(
                    weights.clone(),
                    *offset,
                    innovation.build(),
                    *step,
                )
            }
        };
        model.map_err(|e| anyhow::anyhow!("model section: {e}"))
    }
}

// ---------------------------------------------------------------------------
// szego

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SzegoConfig {
    pub domain: DomainKind,
    pub t_ladder: Vec<f64>,
    /// Quadrature resolution of the limiting integral.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Nystrom rank for line-domain trace products; unused on the torus.
    #[serde(default)]
    pub nystrom: usize,
    /// Optional acceptance threshold on the final ladder row (exit 1).
    pub max_tail_rel_error: Option<f64>,
    pub graph: GraphConfig,
    /// One symbol per edge, or a single symbol repeated across all edges.
    pub symbols: Vec<SymbolConfig>,
}

fn default_grid() -> usize {
    1024
}

// ---------------------------------------------------------------------------
// polytope

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    Torus,
    Counting,
    Lebesgue,
}

impl From<CaseKind> for PcpCase {
    fn from(c: CaseKind) -> Self {
        match c {
            CaseKind::Torus => PcpCase::Torus,
            CaseKind::Counting => PcpCase::Counting,
            CaseKind::Lebesgue => PcpCase::Lebesgue,
        }
    }
}

/// Generated multigraph family for cumulant-growth reports: `sum` needs one
/// exponent, `bilinear` two.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Sum { m: u32, k_max: usize, z: Vec<String> },
    Bilinear { m: u32, n: u32, k_max: usize, z: Vec<String> },
}

impl FamilySpec {
    pub fn gamma_family(&self) -> GammaFamily {
        match self {
            FamilySpec::Sum { m, .. } => GammaFamily::Sum { m: *m },
            FamilySpec::Bilinear { m, n, .. } => GammaFamily::Bilinear { m: *m, n: *n },
        }
    }

    pub fn exponents(&self) -> Result<Vec<Rat>> {
        let z = match self {
            FamilySpec::Sum { z, .. } | FamilySpec::Bilinear { z, .. } => z,
        };
        z.iter().map(|s| parse_rat(s)).collect()
    }

    pub fn k_max(&self) -> usize {
        match self {
            FamilySpec::Sum { k_max, .. } | FamilySpec::Bilinear { k_max, .. } => *k_max,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeConfig {
    #[serde(default = "default_case")]
    pub case: CaseKind,
    /// Inverse-integrability exponents as rational strings, one per column.
    pub z: Option<Vec<String>>,
    #[serde(default)]
    pub vertices: bool,
    #[serde(default)]
    pub alpha: bool,
    pub graph: Option<GraphConfig>,
    pub family: Option<FamilySpec>,
}

fn default_case() -> CaseKind {
    CaseKind::Torus
}

/// Parses "p/q" or a plain integer into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().with_context(|| format!("rational {s:?}"))?;
        let d: i64 = den.trim().parse().with_context(|| format!("rational {s:?}"))?;
        if d == 0 {
            bail!("rational {s:?} has zero denominator");
        }
        Ok(Rat::new(n, d))
    } else {
        let n: i64 = s.parse().with_context(|| format!("rational {s:?}"))?;
        Ok(Rat::from_integer(n))
    }
}

/// Renders an exact rational as "n" or "p/q" for reports.
pub fn rat_str(r: Rat) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// clt

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionalConfig {
    /// Wick-centered quadratic form with the given symmetric lag
    /// coefficients b(0), b(1), ...
    Quadratic { kernel: Vec<f64> },
    AppellSum { l: u32 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CltConfig {
    pub n: usize,
    pub replicas: usize,
    pub functional: FunctionalConfig,
    pub model: ModelConfig,
    /// Optional acceptance band on variance/target (exit 1 outside).
    pub variance_ratio_band: Option<[f64; 2]>,
}

impl CltConfig {
    pub fn build_functional(&self) -> Result<fejer_core::processes::CltFunctional> {
        match &self.functional {
            FunctionalConfig::Quadratic { kernel } => {
                let k = LagKernel::new(kernel.clone())
                    .map_err(|e| anyhow::anyhow!("functional section: {e}"))?;
                Ok(fejer_core::processes::CltFunctional::Quadratic { kernel: k })
            }
            FunctionalConfig::AppellSum { l } => {
                if *l == 0 {
                    bail!("appell-sum order must be at least 1");
                }
                Ok(fejer_core::processes::CltFunctional::AppellSum { l: *l })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// fit

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    Whittle,
    Ibragimov,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Full three-parameter model (gamma, alpha, c).
    Frbm,
    /// Shape family (gamma, alpha) with the scale pinned to 1; the scale is
    /// recovered from the weighted mean intensity after the fit.
    FrbmShape,
}

impl FamilyConfig {
    pub fn build(&self) -> Result<SpectralModelFamily> {
        let fam = match self.kind {
            FamilyKind::Frbm => {
                let lo: [f64; 3] = to_array(&self.lower, "family.lower")?;
                let hi: [f64; 3] = to_array(&self.upper, "family.upper")?;
                SpectralModelFamily::frbm(lo, hi)
            }
            FamilyKind::FrbmShape => {
                let lo: [f64; 2] = to_array(&self.lower, "family.lower")?;
                let hi: [f64; 2] = to_array(&self.upper, "family.upper")?;
                SpectralModelFamily::frbm_shape(lo, hi)
            }
        };
        fam.map_err(|e| anyhow::anyhow!("family section: {e}"))
    }
}

fn to_array<const N: usize>(v: &[f64], what: &str) -> Result<[f64; N]> {
    if v.len() != N {
        bail!("{what} needs exactly {N} entries, got {}", v.len());
    }
    let mut out = [0.0; N];
    out.copy_from_slice(v);
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightConfig {
    /// 1/(1 + lambda^2).
    Consistency,
    /// lambda^(2b) / (1 + lambda^2)^a.
    Rational { b: f64, a: f64 },
}

impl WeightConfig {
    pub fn build(&self) -> Result<WeightFunction> {
        match self {
            WeightConfig::Consistency => Ok(WeightFunction::consistency()),
            WeightConfig::Rational { b, a } => WeightFunction::rational(*b, *a)
                .map_err(|e| anyhow::anyhow!("weight section: {e}")),
        }
    }

    pub fn exponents(&self) -> Option<(f64, f64)> {
        match self {
            WeightConfig::Consistency => None,
            WeightConfig::Rational { b, a } => Some((*b, *a)),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub starts: Option<usize>,
}

impl OptimizerConfig {
    pub fn build(&self) -> FitConfig {
        let d = FitConfig::default();
        FitConfig {
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            tol: self.tol.unwrap_or(d.tol),
            starts: self.starts.unwrap_or(d.starts),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    /// Truth (gamma, alpha, c) driving the spectral synthesis.
    pub theta0: Vec<f64>,
    pub n: usize,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
}

fn default_oversample() -> usize {
    4
}

fn default_replicas() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasConfig {
    pub theta0: Vec<f64>,
    pub sizes: Vec<usize>,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsConfig {
    pub theta_sample: Vec<Vec<f64>>,
    pub declared_pq: Option<(f64, f64)>,
    pub bias: Option<BiasConfig>,
    pub lmax: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitCommandConfig {
    pub method: FitMethod,
    /// Path to a CSV series file (header "value", one sample per row).
    /// Exactly one of `series` / `synthetic` must be present.
    pub series: Option<PathBuf>,
    #[serde(default = "default_step")]
    pub step: f64,
    pub synthetic: Option<SyntheticConfig>,
    pub family: FamilyConfig,
    pub weight: WeightConfig,
    pub optimizer: Option<OptimizerConfig>,
    pub conditions: Option<ConditionsConfig>,
    /// Optional thresholds (exit 1 when violated; outputs still written).
    pub max_mean_rel_error: Option<f64>,
    #[serde(default)]
    pub require_conditions: bool,
}

// ---------------------------------------------------------------------------
// diagrams

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramsConfig {
    /// Slot counts per table row.
    pub rows: Vec<usize>,
    #[serde(default)]
    pub gaussian: bool,
    #[serde(default)]
    pub connected: bool,
    #[serde(default)]
    pub no_flat: bool,
    #[serde(default)]
    pub no_singletons: bool,
    /// Dump the block structure of every diagram, not just the count.
    #[serde(default)]
    pub list: bool,
}

// ---------------------------------------------------------------------------
// kernels

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyConfig {
    #[serde(default = "default_property_n")]
    pub n: usize,
    #[serde(default = "default_property_d")]
    pub d: usize,
}

fn default_property_n() -> usize {
    2
}

fn default_property_d() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelsConfig {
    pub domain: DomainKind,
    pub t_ladder: Vec<f64>,
    /// Exponents p > 1; each is reported by quadrature and by the closed
    /// form bound.
    #[serde(default)]
    pub p: Vec<f64>,
    /// Include the p = 1 torus log-asymptotic report.
    #[serde(default)]
    pub l1: bool,
    /// Concentration check of the normalized kernel against the product
    /// cosine test function.
    pub property: Option<PropertyConfig>,
}
