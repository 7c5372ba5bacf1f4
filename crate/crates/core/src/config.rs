//! JSON run configuration, check orchestration and report assembly.
//!
//! The canonical report section is deterministic byte-for-byte for a fixed
//! config and build; wall time lives outside it.

use crate::compactness::{assess_compactness, CompactnessError, CompactnessReport, TailBound};
use crate::comparison::{
    check_bishop_gromov, check_bounded_density, check_cut_value, check_diameter,
    check_hypothesis, check_laplacian, check_riccati, check_volume_element, CheckResult,
    CompareError, HypothesisMode, Tolerances, Verdict,
};
use crate::model_functions::{
    default_domain_max, solve_model, KappaProfile, ModelFnError, ModelFunctions,
};
use crate::model_space::{ModelError, RadialFunction, Weight, WeightedModel};
use crate::parameters::{
    base_point_constant, validate_range, CpMode, EpsParams, ExtendedN, ParamError,
};
use crate::rigidity::{
    check_max_diameter, check_volume_growth_rigidity, MaxDiameterReport, RigidityError,
    VolumeGrowthReport,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("parameter error: {0}")]
    Param(#[from] ParamError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    ModelFn(#[from] ModelFnError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Compactness(#[from] CompactnessError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum BigNSpec {
    Num(f64),
    Str(String),
}

impl BigNSpec {
    fn resolve(&self) -> Result<ExtendedN, RunError> {
        match self {
            BigNSpec::Num(v) => Ok(ExtendedN::Finite(*v)),
            BigNSpec::Str(s) if s == "inf" => Ok(ExtendedN::Infinity),
            BigNSpec::Str(s) => Err(RunError::Config(format!(
                "params.N must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub n: u32,
    #[serde(rename = "N")]
    pub big_n: BigNSpec,
    pub eps: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnSpec {
    Zero,
    Constant { value: f64 },
    Identity,
    Linear { slope: f64 },
    Quadratic { coeff: f64 },
    Sin { amp: f64, freq: f64 },
    SinSq { amp: f64, freq: f64 },
    Log1p { coeff: f64 },
    PolyBump { eta: f64, t_max: f64 },
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl FnSpec {
    fn to_radial(&self) -> Result<RadialFunction, RunError> {
        Ok(match self {
            FnSpec::Zero => RadialFunction::Zero,
            FnSpec::Constant { value } => RadialFunction::Constant(*value),
            FnSpec::Identity => RadialFunction::Identity,
            FnSpec::Linear { slope } => RadialFunction::Linear { slope: *slope },
            FnSpec::Quadratic { coeff } => RadialFunction::Quadratic { coeff: *coeff },
            FnSpec::Sin { amp, freq } => RadialFunction::Sin {
                amp: *amp,
                freq: *freq,
            },
            FnSpec::SinSq { amp, freq } => RadialFunction::SinSq {
                amp: *amp,
                freq: *freq,
            },
            FnSpec::Log1p { coeff } => RadialFunction::Log1p { coeff: *coeff },
            FnSpec::PolyBump { eta, t_max } => RadialFunction::PolyBump {
                eta: *eta,
                t_max: *t_max,
            },
            FnSpec::Sampled { grid, values } => {
                if grid.len() < 3 || grid.len() != values.len() {
                    return Err(RunError::Config(
                        "sampled function needs matching grids of at least 3 nodes".into(),
                    ));
                }
                RadialFunction::Sampled(Arc::new(crate::numerics::CubicSpline::new(
                    grid.clone(),
                    values.clone(),
                    None,
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Sphere {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        t_max: Option<f64>,
        #[serde(default)]
        two_pole: Option<bool>,
    },
    Euclidean {
        #[serde(default)]
        t_max: Option<f64>,
    },
    Hyperbolic {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        t_max: Option<f64>,
    },
    PerturbedSphere {
        eta: f64,
        #[serde(default)]
        t_max: Option<f64>,
    },
    Custom {
        grid: Vec<f64>,
        values: Vec<f64>,
        #[serde(default)]
        end_slope: Option<f64>,
        #[serde(default)]
        t_max: Option<f64>,
        #[serde(default)]
        two_pole: Option<bool>,
    },
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    /// (warping function, t_max, two_pole)
    fn resolve(&self) -> Result<(RadialFunction, f64, bool), RunError> {
        use std::f64::consts::PI;
        Ok(match self {
            ModelSpec::Sphere {
                radius,
                t_max,
                two_pole,
            } => {
                let t = t_max.unwrap_or(PI * radius);
                (
                    RadialFunction::ScaledSin { radius: *radius },
                    t,
                    two_pole.unwrap_or((t - PI * radius).abs() < 1e-12),
                )
            }
            ModelSpec::Euclidean { t_max } => {
                (RadialFunction::Identity, t_max.unwrap_or(3.0), false)
            }
            ModelSpec::Hyperbolic { radius, t_max } => (
                RadialFunction::ScaledSinh { radius: *radius },
                t_max.unwrap_or(3.0),
                false,
            ),
            ModelSpec::PerturbedSphere { eta, t_max } => {
                let t = t_max.unwrap_or(PI);
                (
                    RadialFunction::Sum(
                        Box::new(RadialFunction::ScaledSin { radius: 1.0 }),
                        Box::new(RadialFunction::PolyBump { eta: *eta, t_max: t }),
                    ),
                    t,
                    true,
                )
            }
            ModelSpec::Custom {
                grid,
                values,
                end_slope,
                t_max,
                two_pole,
            } => {
                if grid.len() < 4 || grid.len() != values.len() {
                    return Err(RunError::Config(
                        "custom profile needs matching grids of at least 4 nodes".into(),
                    ));
                }
                let derivs = Some((1.0, end_slope.unwrap_or((values[grid.len() - 1]
                    - values[grid.len() - 2])
                    / (grid[grid.len() - 1] - grid[grid.len() - 2]))));
                let spline = crate::numerics::CubicSpline::new(grid.clone(), values.clone(), derivs);
                let t = t_max.unwrap_or(*grid.last().unwrap());
                (
                    RadialFunction::Sampled(Arc::new(spline)),
                    t,
                    two_pole.unwrap_or(false),
                )
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    #[default]
    Zero,
    Gradient {
        f: FnSpec,
        #[serde(default)]
        killing_tangential: bool,
    },
    RadialField {
        a: FnSpec,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum CpSpec {
    #[default]
    Gradient,
    Free {
        value: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KappaSpec {
    Constant { value: f64 },
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl KappaSpec {
    fn resolve(&self) -> Result<KappaProfile, RunError> {
        Ok(match self {
            KappaSpec::Constant { value } => KappaProfile::constant(*value),
            KappaSpec::Sampled { grid, values } => {
                KappaProfile::sampled(grid.clone(), values.clone())?
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ChecksSpec {
    All(String),
    List(Vec<String>),
}

impl Default for ChecksSpec {
    fn default() -> Self {
        ChecksSpec::All("all".into())
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TolSpec {
    #[serde(default)]
    pub check_tol: Option<f64>,
    #[serde(default)]
    pub eq_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RigiditySpec {
    #[serde(default)]
    pub max_diameter: bool,
    #[serde(default)]
    pub volume_growth: bool,
}

#[derive(Debug, Clone, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CompactnessSpec {
    #[serde(default)]
    pub eps_tail: Option<TailBound>,
    #[serde(default)]
    pub ambrose_tail: Option<TailBound>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamSpec,
    pub model: ModelSpec,
    #[serde(default)]
    pub weight: WeightSpec,
    #[serde(default)]
    pub c_p: CpSpec,
    pub kappa: KappaSpec,
    #[serde(default)]
    pub domain_max: Option<f64>,
    #[serde(default)]
    pub checks: ChecksSpec,
    #[serde(default)]
    pub tolerances: TolSpec,
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    /// Expected verdict per check name ("holds", "violated", "vacuous");
    /// undeclared vacuous or violated verdicts fail the run.
    #[serde(default)]
    pub expect: BTreeMap<String, String>,
    #[serde(default)]
    pub rigidity: Option<RigiditySpec>,
    #[serde(default)]
    pub compactness: Option<CompactnessSpec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalReport {
    pub version: String,
    pub config: RunConfig,
    pub tolerances: Tolerances,
    pub resolved: ResolvedInfo,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_diameter: Option<MaxDiameterReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume_growth: Option<VolumeGrowthReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compactness: Option<CompactnessReport>,
    pub exit_code: i32,
    pub summary: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedInfo {
    pub c: f64,
    pub eps0: f64,
    pub beta: f64,
    pub c_p: f64,
    pub t_max: f64,
    pub tau_v: f64,
    pub cut_value: Option<f64>,
    pub radii: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub canonical: CanonicalReport,
    pub wall_time_ms: u128,
}

const ALL_CHECKS: &[&str] = &[
    "hypothesis",
    "riccati",
    "laplacian",
    "cut_value",
    "diameter",
    "volume_element",
    "bishop_gromov",
];

pub fn build_model(cfg: &RunConfig) -> Result<(WeightedModel, ModelFunctions), RunError> {
    let params: EpsParams = validate_range(
        cfg.params.n,
        cfg.params.big_n.resolve()?,
        cfg.params.eps,
    )?;
    let (phi, t_max, two_pole) = cfg.model.resolve()?;
    let (weight, killing) = match &cfg.weight {
        WeightSpec::Zero => (Weight::Zero, false),
        WeightSpec::Gradient {
            f,
            killing_tangential,
        } => (Weight::Gradient(f.to_radial()?), *killing_tangential),
        WeightSpec::RadialField { a } => (Weight::RadialField(a.to_radial()?), false),
    };
    let f_at_p = match &weight {
        Weight::Gradient(f) => f.eval(0.0).0,
        _ => 0.0,
    };
    let cp_mode = match &cfg.c_p {
        CpSpec::Gradient => CpMode::Gradient,
        CpSpec::Free { value } => CpMode::Free(*value),
    };
    let c_p = base_point_constant(&params, f_at_p, cp_mode)?;
    let model = WeightedModel::new(
        params.n, phi, weight, killing, t_max, two_pole, params, c_p,
    )?;
    let kappa = cfg.kappa.resolve()?;
    let radii_max = cfg.radii.iter().cloned().fold(0.0f64, f64::max);
    let fallback = (1.2 * model.tau_v())
        .max(1.2 * c_p * t_max)
        .max(1.1 * radii_max)
        .max(6.0);
    let domain = cfg
        .domain_max
        .unwrap_or_else(|| default_domain_max(&kappa, fallback).max(fallback));
    let mf = solve_model(kappa, params.c, domain)?;
    Ok((model, mf))
}

fn merged_tolerances(cfg: &RunConfig) -> Tolerances {
    let mut t = Tolerances::default();
    if let Some(v) = cfg.tolerances.check_tol {
        t.check_tol = v;
    }
    if let Some(v) = cfg.tolerances.eq_tol {
        t.eq_tol = v;
    }
    t
}

fn default_radii(model: &WeightedModel, mf: &ModelFunctions) -> Vec<f64> {
    let hi = match mf.cut_value() {
        Some(c) => model.tau_v().min(c),
        None => model.tau_v(),
    };
    [0.25, 0.5, 0.75, 1.0].iter().map(|f| f * hi).collect()
}

pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let start = std::time::Instant::now();
    let (model, mf) = build_model(cfg)?;
    let tol = merged_tolerances(cfg);
    let radii = if cfg.radii.is_empty() {
        default_radii(&model, &mf)
    } else {
        cfg.radii.clone()
    };

    let names: Vec<String> = match &cfg.checks {
        ChecksSpec::All(s) if s == "all" => {
            let mut v: Vec<String> = ALL_CHECKS.iter().map(|s| s.to_string()).collect();
            if cfg.delta.is_some() {
                v.push("bounded_density".into());
            }
            v
        }
        ChecksSpec::All(s) => {
            return Err(RunError::Config(format!(
                "checks must be \"all\" or a list of names, got {s:?}"
            )))
        }
        ChecksSpec::List(v) => v.clone(),
    };

    let mut checks = Vec::new();
    for name in &names {
        let result = match name.as_str() {
            "hypothesis" => {
                let mode = match model.weight() {
                    Weight::RadialField(_) => HypothesisMode::Radial,
                    _ => HypothesisMode::FullTensor,
                };
                check_hypothesis(&model, &mf, mode, &tol)?
            }
            "hypothesis_radial" => check_hypothesis(&model, &mf, HypothesisMode::Radial, &tol)?,
            "hypothesis_full" => check_hypothesis(&model, &mf, HypothesisMode::FullTensor, &tol)?,
            "riccati" => check_riccati(&model, &mf, &tol)?,
            "laplacian" => check_laplacian(&model, &mf, &tol)?,
            "cut_value" => check_cut_value(&model, &mf, &tol)?,
            "diameter" => check_diameter(&model, &mf, &tol)?,
            "volume_element" => check_volume_element(&model, &mf, &tol)?,
            "bishop_gromov" => check_bishop_gromov(&model, &mf, &radii, &tol)?,
            "bounded_density" => {
                let delta = cfg.delta.ok_or_else(|| {
                    RunError::Config("bounded_density needs a delta value".into())
                })?;
                check_bounded_density(&model, &mf, delta, &tol)?
            }
            other => {
                return Err(RunError::Config(format!("unknown check name {other:?}")))
            }
        };
        checks.push(result);
    }

    let mut max_diameter = None;
    let mut volume_growth = None;
    if let Some(r) = &cfg.rigidity {
        if r.max_diameter {
            match check_max_diameter(&model, &mf, cfg.delta, &tol) {
                Ok(rep) => max_diameter = Some(rep),
                Err(RigidityError::NotMaximal { tau, cut }) => {
                    checks.push(CheckResult {
                        name: "max_diameter".into(),
                        verdict: Verdict::Vacuous,
                        margin: vec![(tau, cut - tau)],
                        equality_locus: Vec::new(),
                        hypothesis_verified: true,
                        notes: vec![format!(
                            "diameter {tau:.6} below the first zero {cut:.6}; no classification"
                        )],
                    });
                }
                Err(e) => return Err(e.into()),
            }
        }
        if r.volume_growth {
            volume_growth = Some(check_volume_growth_rigidity(&model, &mf, &radii, &tol)?);
        }
    }

    let compactness = match &cfg.compactness {
        Some(c) => Some(assess_compactness(
            &model,
            c.eps_tail.as_ref(),
            c.ambrose_tail.as_ref(),
        )?),
        None => None,
    };

    // exit-code contract: violations always fail; vacuous verdicts pass only
    // when declared; a declared expectation that disagrees also fails
    let mut exit_code = 0;
    let mut summary = Vec::new();
    let mut judge = |r: &CheckResult| {
        let verdict_str = match r.verdict {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Vacuous => "vacuous",
        };
        let expected = cfg.expect.get(&r.name).map(|s| s.as_str());
        let ok = match (r.verdict, expected) {
            (Verdict::Violated, _) => false,
            (_, Some(e)) => e == verdict_str,
            (Verdict::Holds, None) => true,
            (Verdict::Vacuous, None) => false,
        };
        if !ok {
            exit_code = 2;
        }
        summary.push(format!(
            "{}: {}{}",
            r.name,
            verdict_str,
            match expected {
                Some(e) if e != verdict_str => format!(" (expected {e})"),
                _ => String::new(),
            }
        ));
    };
    for r in &checks {
        judge(r);
    }
    if let Some(m) = &max_diameter {
        judge(&m.result);
    }
    if let Some(v) = &volume_growth {
        judge(&v.result);
    }

    let resolved = ResolvedInfo {
        c: model.params().c,
        eps0: model.params().eps0,
        beta: model.params().beta(),
        c_p: model.c_p(),
        t_max: model.t_max(),
        tau_v: model.tau_v(),
        cut_value: mf.cut_value(),
        radii,
        warnings: model.warnings.clone(),
    };
    Ok(Report {
        canonical: CanonicalReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            tolerances: tol,
            resolved,
            checks,
            max_diameter,
            volume_growth,
            compactness,
            exit_code,
            summary,
        },
        wall_time_ms: start.elapsed().as_millis(),
    })
}

/// Writes bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp-write");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

/// One CSV per check with the margin curve.
pub fn write_margin_csvs(report: &Report, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for check in &report.canonical.checks {
        let mut out = String::from("probe,slack\n");
        for &(p, s) in &check.margin {
            out.push_str(&format!("{p},{s}\n"));
        }
        write_atomic(&dir.join(format!("{}.csv", check.name)), out.as_bytes())?;
    }
    Ok(())
}
