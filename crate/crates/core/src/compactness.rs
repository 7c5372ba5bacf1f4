//! Completeness and compactness machinery: divergence of the re-parametrized
//! length, the curvature-integral criterion, and the forward Riccati blow-up
//! argument that underlies it.

use crate::model_space::{ModelError, WeightedModel};
use crate::numerics::{adaptive_simpson, brent_root, integrate_dense, NumericsError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompactnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Tail certificate for an improper integral; divergence or convergence is
/// never inferred from partial sums alone.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailBound {
    /// integrand >= c0 > 0 for t >= from: diverges linearly.
    LowerConstant { c0: f64, from: f64 },
    /// integrand >= c0 (1+t)^{-p} for t >= from with p <= 1: diverges.
    LowerPower { c0: f64, p: f64, from: f64 },
    /// |integrand| <= c0 (1+t)^{-p} for t >= from with p > 1: converges.
    UpperPower { c0: f64, p: f64, from: f64 },
    /// |integrand| <= c0 e^{-a t} for t >= from with a > 0: converges.
    UpperExponential { c0: f64, a: f64, from: f64 },
}

impl TailBound {
    fn certifies_divergence(&self) -> Result<bool, CompactnessError> {
        match *self {
            TailBound::LowerConstant { c0, .. } => {
                if c0 <= 0.0 {
                    return Err(CompactnessError::Invalid(
                        "constant lower bound must be positive".into(),
                    ));
                }
                Ok(true)
            }
            TailBound::LowerPower { c0, p, .. } => {
                if c0 <= 0.0 || p > 1.0 {
                    return Err(CompactnessError::Invalid(
                        "power lower bound needs c0 > 0 and p <= 1".into(),
                    ));
                }
                Ok(true)
            }
            TailBound::UpperPower { p, .. } => {
                if p <= 1.0 {
                    return Err(CompactnessError::Invalid(
                        "power upper bound certifies convergence only for p > 1".into(),
                    ));
                }
                Ok(false)
            }
            TailBound::UpperExponential { a, .. } => {
                if a <= 0.0 {
                    return Err(CompactnessError::Invalid(
                        "exponential upper bound needs a positive rate".into(),
                    ));
                }
                Ok(false)
            }
        }
    }

    /// True iff the certified bound holds for the sampled integrand on
    /// [from, t_max].
    fn supported_by<F: Fn(f64) -> f64>(&self, integrand: F, t_max: f64) -> bool {
        let (from, check): (f64, Box<dyn Fn(f64, f64) -> bool>) = match *self {
            TailBound::LowerConstant { c0, from } => {
                (from, Box::new(move |_t, v| v >= c0 - 1e-9))
            }
            TailBound::LowerPower { c0, p, from } => (
                from,
                Box::new(move |t, v| v >= c0 * (1.0 + t).powf(-p) - 1e-9),
            ),
            TailBound::UpperPower { c0, p, from } => (
                from,
                Box::new(move |t, v| v.abs() <= c0 * (1.0 + t).powf(-p) + 1e-9),
            ),
            TailBound::UpperExponential { c0, a, from } => (
                from,
                Box::new(move |t, v| v.abs() <= c0 * (-a * t).exp() + 1e-9),
            ),
        };
        if from >= t_max {
            return false;
        }
        (0..=200).all(|i| {
            let t = from + (t_max - from) * i as f64 / 200.0;
            check(t, integrand(t))
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EpsCompleteStatus {
    Yes,
    No,
    Undetermined { partial: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AmbroseStatus {
    Diverges { rate: f64 },
    Converges { partial: f64 },
    Undetermined { partial: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BlowupStatus {
    Blowup { radius: f64 },
    NoneWithinDomain,
}

/// Divergence of the conformal length integral along the ray, decided by a
/// tail certificate on the integrand e^{-beta f_Vp}.
pub fn check_eps_complete(
    model: &WeightedModel,
    tail: Option<&TailBound>,
) -> Result<(EpsCompleteStatus, Vec<String>), CompactnessError> {
    let partial = model.s_v(model.t_max()) / model.c_p();
    let mut notes = Vec::new();
    let beta = model.params().beta();
    let integrand = |t: f64| (-beta * model.f_vp(t)).exp();
    let status = match tail {
        None => EpsCompleteStatus::Undetermined { partial },
        Some(tb) => {
            let diverges = tb.certifies_divergence()?;
            if !tb.supported_by(integrand, model.t_max()) {
                notes.push("tail certificate not supported by the sampled integrand".into());
                EpsCompleteStatus::Undetermined { partial }
            } else if diverges {
                // the certified growth makes the conformal clock unbounded
                notes.push(format!(
                    "partial conformal length {partial:.6} with certified divergent tail"
                ));
                EpsCompleteStatus::Yes
            } else {
                notes.push(format!(
                    "partial conformal length {partial:.6} with certified convergent tail"
                ));
                EpsCompleteStatus::No
            }
        }
    };
    Ok((status, notes))
}

/// Divergence of the weighted curvature integral from parameter 1 outward,
/// decided by a tail certificate on e^{beta f_Vp} Ric (radial).
pub fn ambrose_integral(
    model: &WeightedModel,
    tail: Option<&TailBound>,
) -> Result<(AmbroseStatus, Vec<String>), CompactnessError> {
    let beta = model.params().beta();
    let mut notes = Vec::new();
    let t_max = model.t_max();
    if t_max <= 1.0 {
        notes.push("domain does not extend past parameter 1; nothing to integrate".into());
        return Ok((AmbroseStatus::Undetermined { partial: 0.0 }, notes));
    }
    let integrand = |t: f64| {
        (beta * model.f_vp(t)).exp()
            * model
                .curvature_radial_at(t)
                .expect("interior curvature evaluation")
    };
    let hi = if model.two_pole() { 0.999 * t_max } else { t_max };
    let partial = adaptive_simpson(&integrand, 1.0, hi, 1e-9, 1e-12);
    let status = match tail {
        None => AmbroseStatus::Undetermined { partial },
        Some(tb) => {
            let diverges = tb.certifies_divergence()?;
            if !tb.supported_by(&integrand, hi) {
                notes.push("tail certificate not supported by the sampled integrand".into());
                AmbroseStatus::Undetermined { partial }
            } else if diverges {
                let rate = match *tb {
                    TailBound::LowerConstant { c0, .. } => c0,
                    TailBound::LowerPower { c0, .. } => c0,
                    _ => unreachable!(),
                };
                AmbroseStatus::Diverges { rate }
            } else {
                AmbroseStatus::Converges { partial }
            }
        }
    };
    Ok((status, notes))
}

/// Forward comparison Riccati flow lambda' = -e^w Ric - c e^{-w} lambda^2
/// with w = beta f_Vp. The flow is the logarithmic derivative of a linear
/// second-order equation, u'' + w' u' + c Ric u = 0 with
/// lambda = (e^w / c) u'/u, so a blow-up to -infinity is exactly the first
/// zero of u; that zero is located on the dense output.
pub fn riccati_blowup_with<W, DW, R>(
    w: W,
    w_prime: DW,
    ric: R,
    c: f64,
    t_start: f64,
    lambda_start: f64,
    t_end: f64,
) -> Result<BlowupStatus, CompactnessError>
where
    W: Fn(f64) -> f64,
    DW: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    if !(c > 0.0) {
        return Err(CompactnessError::Invalid(format!(
            "constant c must be positive, got {c}"
        )));
    }
    if !(t_end > t_start) {
        return Err(CompactnessError::Invalid(
            "integration span must be positive".into(),
        ));
    }
    let u0 = 1.0;
    let du0 = c * (-w(t_start)).exp() * lambda_start;
    let sol = integrate_dense(
        |t, y, dy| {
            dy[0] = y[1];
            dy[1] = -w_prime(t) * y[1] - c * ric(t) * y[0];
        },
        t_start,
        t_end,
        &[u0, du0],
        1e-12,
        1e-14,
    )?;
    for step in sol.steps() {
        let lo = step.t0;
        let hi = step.t0 + step.h;
        if sol.component(lo, 0) > 0.0 && sol.component(hi, 0) <= 0.0 {
            let root = brent_root(|t| sol.component(t, 0), lo, hi, 1e-12)?;
            return Ok(BlowupStatus::Blowup { radius: root });
        }
    }
    Ok(BlowupStatus::NoneWithinDomain)
}

/// Model wrapper: starts the comparison flow from the model's own mean
/// curvature data at t_start and runs to the end of the domain.
pub fn riccati_blowup(
    model: &WeightedModel,
    lambda_start: f64,
    t_start: f64,
) -> Result<BlowupStatus, CompactnessError> {
    let beta = model.params().beta();
    let c = model.params().c;
    riccati_blowup_with(
        |t| beta * model.f_vp(t),
        |t| beta * model.a(t),
        |t| {
            model
                .curvature_radial_at(t)
                .expect("interior curvature evaluation")
        },
        c,
        t_start,
        lambda_start,
        model.t_max(),
    )
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum CompactnessVerdict {
    CompactPredicted,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompactnessReport {
    pub eps_complete: EpsCompleteStatus,
    pub ambrose: AmbroseStatus,
    pub blowup: BlowupStatus,
    pub verdict: CompactnessVerdict,
    pub notes: Vec<String>,
}

/// Full criterion: compactness is predicted exactly when the conformal
/// length diverges and the curvature integral is certified divergent.
pub fn assess_compactness(
    model: &WeightedModel,
    eps_tail: Option<&TailBound>,
    ambrose_tail: Option<&TailBound>,
) -> Result<CompactnessReport, CompactnessError> {
    let mut notes = Vec::new();
    if model.two_pole() {
        notes.push("model is already two-pole; the criterion is informational".into());
    }
    let (eps_complete, n1) = check_eps_complete(model, eps_tail)?;
    let (ambrose, n2) = ambrose_integral(model, ambrose_tail)?;
    notes.extend(n1);
    notes.extend(n2);
    let t_start = 0.1 * model.t_max();
    let lambda_start =
        (model.params().beta() * model.f_vp(t_start)).exp() * model.weighted_laplacian_at(t_start);
    let blowup = riccati_blowup(model, lambda_start, t_start)?;
    let verdict = if eps_complete == EpsCompleteStatus::Yes
        && matches!(ambrose, AmbroseStatus::Diverges { .. })
    {
        CompactnessVerdict::CompactPredicted
    } else {
        CompactnessVerdict::Inconclusive
    };
    Ok(CompactnessReport {
        eps_complete,
        ambrose,
        blowup,
        verdict,
        notes,
    })
}
