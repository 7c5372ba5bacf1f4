//! Comparison checks on a weighted model: curvature hypothesis, Riccati
//! differential inequality, Laplacian comparison with its regularized margin,
//! cut-value and diameter bounds, bounded-density variants, and the volume
//! element / Bishop-Gromov inequalities.
//!
//! Sign convention throughout: slack >= 0 means the asserted inequality
//! holds at that probe.

use crate::model_functions::{solve_model, ModelFnError, ModelFunctions};
use crate::model_space::{ModelError, Weight, WeightedModel};
use crate::numerics::chebyshev_probes;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    ModelFn(#[from] ModelFnError),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    /// Slack below -check_tol counts as a violation.
    pub check_tol: f64,
    /// |slack| below eq_tol counts as equality.
    pub eq_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            check_tol: 1e-6,
            eq_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Vacuous,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    /// (probe point, slack) samples.
    pub margin: Vec<(f64, f64)>,
    /// Probe points where the inequality is an equality to tolerance.
    pub equality_locus: Vec<f64>,
    pub hypothesis_verified: bool,
    pub notes: Vec<String>,
}

impl CheckResult {
    pub fn min_slack(&self) -> f64 {
        self.margin
            .iter()
            .map(|&(_, s)| s)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_slack(&self) -> f64 {
        self.margin.iter().map(|&(_, s)| s.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisMode {
    Radial,
    FullTensor,
}

/// Probe grid in t, Chebyshev-distributed, avoiding a window around a
/// profile kink when the model carries one.
fn t_probes(model: &WeightedModel, lo_frac: f64, hi_frac: f64, count: usize) -> Vec<f64> {
    let t_max = model.t_max();
    let mut pts = chebyshev_probes(lo_frac * t_max, hi_frac * t_max, count);
    if let Some(k) = model.kink {
        pts.retain(|t| (t - k).abs() > 0.02 * t_max);
    }
    pts
}

/// Right-hand side of the curvature hypothesis at parameter t.
pub fn hypothesis_bound(model: &WeightedModel, mf: &ModelFunctions, t: f64) -> f64 {
    let p = model.params();
    let cp = model.c_p();
    mf.kappa().eval(model.s_v(t)) * cp * cp * (-2.0 * p.beta() * model.f_vp(t)).exp() / p.c
}

pub fn check_hypothesis(
    model: &WeightedModel,
    mf: &ModelFunctions,
    mode: HypothesisMode,
    tol: &Tolerances,
) -> Result<CheckResult, CompareError> {
    let probes = t_probes(model, 1e-3, 1.0 - 1e-3, 150);
    let mut margin = Vec::with_capacity(probes.len());
    let mut locus = Vec::new();
    for &t in &probes {
        let bound = hypothesis_bound(model, mf, t);
        let mut slack = model.curvature_radial_at(t)? - bound;
        if mode == HypothesisMode::FullTensor {
            slack = slack.min(model.curvature_tangential_at(t)? - bound);
        }
        if slack.abs() < tol.eq_tol {
            locus.push(t);
        }
        margin.push((t, slack));
    }
    let min = margin.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
    let verdict = if min >= -tol.check_tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let mut notes = Vec::new();
    if model.killing_tangential {
        notes.push(
            "tangential weight component flagged as Killing; it drops out of the \
             symmetrized derivative and the bound is unchanged"
                .into(),
        );
    }
    Ok(CheckResult {
        name: match mode {
            HypothesisMode::Radial => "hypothesis_radial".into(),
            HypothesisMode::FullTensor => "hypothesis_full".into(),
        },
        verdict,
        margin,
        equality_locus: locus,
        hypothesis_verified: verdict == Verdict::Holds,
        notes,
    })
}

/// Strongest hypothesis check the model supports: full-tensor for gradient
/// and zero weights, radial (with a note) for general radial fields.
pub fn verify_hypothesis(
    model: &WeightedModel,
    mf: &ModelFunctions,
    tol: &Tolerances,
) -> Result<(bool, Option<String>), CompareError> {
    let mode = match model.weight() {
        Weight::RadialField(_) => HypothesisMode::Radial,
        _ => HypothesisMode::FullTensor,
    };
    let r = check_hypothesis(model, mf, mode, tol)?;
    let note = match mode {
        HypothesisMode::Radial => Some(
            "hypothesis verified along the ray only; tangential directions are \
             unavailable for a general radial field"
                .to_string(),
        ),
        HypothesisMode::FullTensor => None,
    };
    Ok((r.verdict == Verdict::Holds, note))
}

fn vacuous(name: &str, why: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        verdict: Verdict::Vacuous,
        margin: Vec::new(),
        equality_locus: Vec::new(),
        hypothesis_verified: false,
        notes: vec![why],
    }
}

/// The conformally weighted mean curvature lambda(t) = e^{beta f_Vp} Delta_V d_p.
fn lambda(model: &WeightedModel, t: f64) -> f64 {
    (model.params().beta() * model.f_vp(t)).exp() * model.weighted_laplacian_at(t)
}

pub fn check_riccati(
    model: &WeightedModel,
    _mf: &ModelFunctions,
    tol: &Tolerances,
) -> Result<CheckResult, CompareError> {
    let t_max = model.t_max();
    let mut probes = t_probes(model, 0.05, 0.95, 80);
    if let Some(k) = model.kink {
        probes.retain(|t| (t - k).abs() > 0.06 * t_max);
    }
    let p = *model.params();
    let mut margin = Vec::with_capacity(probes.len());
    let mut locus = Vec::new();
    let mut min_rel = f64::INFINITY;
    for &t in &probes {
        // five-point stencil; step shrinks near the poles where lambda is
        // steep, keeping the truncation error well under the check tolerance
        let h = 5e-3 * t.min(t_max - t).min(1.0);
        let d = (-lambda(model, t + 2.0 * h) + 8.0 * lambda(model, t + h)
            - 8.0 * lambda(model, t - h)
            + lambda(model, t - 2.0 * h))
            / (12.0 * h);
        let e = (p.beta() * model.f_vp(t)).exp();
        let l = lambda(model, t);
        let rhs = -e * model.curvature_radial_at(t)? - p.c / e * l * l;
        // both sides diverge at the poles, so tolerances scale with the RHS
        let scale = 1.0 + rhs.abs();
        let slack = rhs - d;
        min_rel = min_rel.min(slack / scale);
        if slack.abs() <= tol.eq_tol * scale {
            locus.push(t);
        }
        margin.push((t, slack));
    }
    let verdict = if min_rel >= -tol.check_tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    Ok(CheckResult {
        name: "riccati".into(),
        verdict,
        margin,
        equality_locus: locus,
        // the differential inequality is unconditional
        hypothesis_verified: true,
        notes: Vec::new(),
    })
}

/// Upper end of the comparison window in the re-parametrized clock.
fn s_window(model: &WeightedModel, mf: &ModelFunctions) -> f64 {
    let tau = model.tau_v();
    match mf.cut_value() {
        Some(c) => tau.min(c * (1.0 - 1e-9)),
        None => tau,
    }
}

pub fn check_laplacian(
    model: &WeightedModel,
    mf: &ModelFunctions,
    tol: &Tolerances,
) -> Result<CheckResult, CompareError> {
    let (hyp, hyp_note) = verify_hypothesis(model, mf, tol)?;
    if !hyp {
        return Ok(vacuous(
            "laplacian",
            "curvature hypothesis fails on the model".into(),
        ));
    }
    let s_hi = s_window(model, mf);
    let beta = model.params().beta();
    let cp = model.c_p();
    let mut s_probes = chebyshev_probes(0.0, s_hi, 120);
    if let Some(k) = model.kink {
        s_probes.retain(|&s| (model.t_of_s(s) - k).abs() > 0.02 * model.t_max());
    }
    let mut margin = Vec::with_capacity(s_probes.len());
    let mut locus = Vec::new();
    let mut notes = Vec::new();
    if let Some(n) = hyp_note {
        notes.push(n);
    }
    let mut prev_g = f64::INFINITY;
    let mut max_increase = 0.0f64;
    for &s in &s_probes {
        let t = model.t_of_s(s);
        let f_hat = (beta * model.f_vp(t)).exp() * model.weighted_laplacian_at(t) / cp;
        let g = mf.s_kappa(s).powi(2) * (f_hat - mf.h_kappa(s)?);
        if g - prev_g > max_increase {
            max_increase = g - prev_g;
        }
        prev_g = g;
        if g.abs() < tol.eq_tol {
            locus.push(s);
        }
        margin.push((s, -g));
    }
    if max_increase > 1e-6 {
        notes.push(format!(
            "regularized margin increased by {max_increase:.3e} between probes"
        ));
    }
    let mut verdict = if margin.iter().all(|&(_, s)| s >= -tol.check_tol) {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    // downward propagation of equality: touching the bound at s0 forces
    // equality on all of ]0, s0]
    if let Some(&s0) = locus.last() {
        let band = 10.0 * tol.eq_tol;
        for &(s, neg_g) in &margin {
            if s < s0 && neg_g.abs() > band {
                verdict = Verdict::Violated;
                notes.push(format!(
                    "equality at s = {s0:.6} does not propagate down to s = {s:.6}"
                ));
                break;
            }
        }
    }
    // raw (unregularized) slack away from the pole, for reporting
    let mut raw_min = f64::INFINITY;
    for &(s, _) in margin.iter().filter(|&&(s, _)| s > 0.05 * s_hi) {
        let t = model.t_of_s(s);
        let raw =
            cp * mf.h_kappa(s)? * (-beta * model.f_vp(t)).exp() - model.weighted_laplacian_at(t);
        raw_min = raw_min.min(raw);
    }
    notes.push(format!("raw slack minimum away from the pole: {raw_min:.6e}"));
    Ok(CheckResult {
        name: "laplacian".into(),
        verdict,
        margin,
        equality_locus: locus,
        hypothesis_verified: true,
        notes,
    })
}

pub fn check_cut_value(
    model: &WeightedModel,
    mf: &ModelFunctions,
    tol: &Tolerances,
) -> Result<CheckResult, CompareError> {
    let cut = match mf.cut_value() {
        Some(c) => c,
        None => {
            return Ok(vacuous(
                "cut_value",
                "model function has no finite first zero".into(),
            ))
        }
    };
    let (hyp, hyp_note) = verify_hypothesis(model, mf, tol)?;
    if !hyp {
        return Ok(vacuous(
            "cut_value",
            "curvature hypothesis fails on the model".into(),
        ));
    }
    let tau = model.tau_v();
    let slack = cut - tau;
    let mut notes = hyp_note.into_iter().collect::<Vec<_>>();
    if model.truncated {
        notes.push("one-pole model: tau_V is a lower estimate of the true cut value".into());
    }
    Ok(CheckResult {
        name: "cut_value".into(),
        verdict: if slack >= -tol.check_tol {
            Verdict::Holds
        } else {
            Verdict::Violated
        },
        margin: vec![(tau, slack)],
        equality_locus: if slack.abs() < tol.eq_tol {
            vec![tau]
        } else {
            Vec::new()
        },
        hypothesis_verified: true,
        notes,
    })
}

pub fn check_diameter(
    model: &WeightedModel,
    mf: &ModelFunctions,
    tol: &Tolerances,
) -> Result<CheckResult, CompareError> {
    let mut r = check_cut_value(model, mf, tol)?;
    r.name = "diameter".into();
    if r.verdict != Verdict::Vacuous && model.truncated {
        r.notes
            .push("sup over the truncated ray; a lower estimate of the global sup".into());
    }
    Ok(r)
}

pub fn check_bounded_density(
    model: &WeightedModel,
    mf: &ModelFunctions,
    delta: f64,
    tol: &Tolerances,
) -> Result<CheckResult, CompareError> {
    let name = "bounded_density";
    if model.density(0.0).is_none() {
        return Ok(vacuous(
            name,
            "bounded-density checks need a density weight".into(),
        ));
    }
    let p = *model.params();
    let nm1 = (p.n - 1) as f64;
    let probes = t_probes(model, 1e-3, 1.0 - 1e-3, 120);
    for &t in &probes {
        let f = model.density(t).unwrap();
        if (1.0 - p.eps) * f > nm1 * delta + 1e-12 {
            return Ok(vacuous(
                name,
                format!("density bound (1-eps) f <= (n-1) delta fails at t = {t:.6}"),
            ));
        }
    }
    let stretch = (2.0 * delta).exp();
    let mf_d = solve_model(
        mf.kappa().rescaled(delta),
        p.c,
        stretch * mf.domain_max(),
    )?;
    let mut notes = Vec::new();
    // cross-check the rescaling against the closed-form identities
    if let (Some(c0), Some(cd)) = (mf.cut_value(), mf_d.cut_value()) {
        let dev = (cd - stretch * c0).abs();
        notes.push(format!(
            "rescaled first zero deviates from the scaling identity by {dev:.3e}"
        ));
    }
    let mut id_dev = 0.0f64;
    for i in 1..=8 {
        let t = mf_d.domain_max() * 0.5 * i as f64 / 8.0;
        id_dev =
            id_dev.max((mf_d.s_kappa(t) - stretch * mf.s_kappa(t / stretch)).abs());
    }
    notes.push(format!(
        "rescaled solution deviates from the scaling identity by {id_dev:.3e}"
    ));

    let mut verdict = Verdict::Holds;
    // cut value in the original clock against the rescaled first zero
    match mf_d.cut_value() {
        Some(cd) => {
            let slack = cd - model.t_max();
            notes.push(format!("cut-value slack against the rescaled bound: {slack:.6e}"));
            if slack < -tol.check_tol {
                verdict = Verdict::Violated;
            }
        }
        None => notes.push("rescaled model function has no finite first zero".into()),
    }

    // Laplacian variant needs a decreasing H for the rescaled profile
    let t_hi = match mf_d.cut_value() {
        Some(cd) => model.t_max().min(cd * (1.0 - 1e-9)),
        None => model.t_max(),
    };
    let h_probes = chebyshev_probes(0.0, t_hi, 60);
    let mut h_decreasing = true;
    let mut prev = f64::INFINITY;
    for &t in &h_probes {
        let h = mf_d.h_kappa(t)?;
        if h > prev + 1e-9 {
            h_decreasing = false;
        }
        prev = h;
    }
    let mut margin = Vec::new();
    let mut locus = Vec::new();
    if h_decreasing {
        for &t in h_probes.iter().filter(|&&t| t > 0.05 * t_hi) {
            if let Some(k) = model.kink {
                if (t - k).abs() <= 0.02 * model.t_max() {
                    continue;
                }
            }
            let f = model.density(t).unwrap();
            let slack = stretch * mf_d.h_kappa(t)? * (-p.beta() * f).exp()
                - model.weighted_laplacian_at(t);
            if slack.abs() < tol.eq_tol {
                locus.push(t);
            }
            margin.push((t, slack));
        }
        if margin.iter().any(|&(_, s)| s < -tol.check_tol) {
            verdict = Verdict::Violated;
        }
    } else {
        notes.push("rescaled H not decreasing; Laplacian variant skipped".into());
    }
    Ok(CheckResult {
        name: name.into(),
        verdict,
        margin,
        equality_locus: locus,
        hypothesis_verified: true,
        notes,
    })
}

pub fn check_volume_element(
    model: &WeightedModel,
    mf: &ModelFunctions,
    tol: &Tolerances,
) -> Result<CheckResult, CompareError> {
    let (hyp, hyp_note) = verify_hypothesis(model, mf, tol)?;
    if !hyp {
        return Ok(vacuous(
            "volume_element",
            "curvature hypothesis fails on the model".into(),
        ));
    }
    let p = *model.params();
    let nm1 = (p.n - 1) as f64;
    let s_hi = 0.98 * s_window(model, mf);
    let mut s_probes = chebyshev_probes(0.0, s_hi, 40);
    if let Some(k) = model.kink {
        s_probes.retain(|&s| (model.t_of_s(s) - k).abs() > 0.02 * model.t_max());
    }
    // the ratio bound says q(s) = log(theta_hat / s_kappa^{1/c}) is nonincreasing
    let q: Vec<f64> = s_probes
        .iter()
        .map(|&s| model.theta_hat(s).ln() - mf.s_kappa(s).ln() / p.c)
        .collect();
    let mut min_pair = f64::INFINITY;
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            min_pair = min_pair.min(q[i] - q[j]);
        }
    }
    let mut margin: Vec<(f64, f64)> = s_probes
        .iter()
        .zip(&q)
        .skip(1)
        .map(|(&s, &qs)| (s, q[0] - qs))
        .collect();
    let mut locus: Vec<f64> = margin
        .iter()
        .filter(|&&(_, sl)| sl.abs() < tol.eq_tol)
        .map(|&(s, _)| s)
        .collect();
    let mut verdict = if min_pair >= -tol.check_tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let mut notes = hyp_note.into_iter().collect::<Vec<_>>();
    if (p.c - 1.0 / nm1).abs() < 1e-12 {
        // absolute bound; the base-point constant enters through the s -> 0
        // normalization of theta_hat
        let cap = model.c_p().powi(-(p.n as i32 - 1));
        locus.clear();
        for (&s, m) in s_probes.iter().zip(margin.iter_mut()) {
            let bound = cap * mf.s_kappa(s).powf(nm1);
            let slack = bound - model.theta_hat(s);
            if slack < -tol.check_tol * (1.0 + bound) {
                verdict = Verdict::Violated;
            }
            if slack.abs() < tol.eq_tol * (1.0 + bound) {
                locus.push(s);
            }
            *m = (s, slack);
        }
    } else {
        notes.push("absolute volume-element bound skipped: c differs from 1/(n-1)".into());
    }
    Ok(CheckResult {
        name: "volume_element".into(),
        verdict,
        margin,
        equality_locus: locus,
        hypothesis_verified: true,
        notes,
    })
}

pub fn check_bishop_gromov(
    model: &WeightedModel,
    mf: &ModelFunctions,
    radii: &[f64],
    tol: &Tolerances,
) -> Result<CheckResult, CompareError> {
    let (hyp, hyp_note) = verify_hypothesis(model, mf, tol)?;
    if !hyp {
        return Ok(vacuous(
            "bishop_gromov",
            "curvature hypothesis fails on the model".into(),
        ));
    }
    let p = *model.params();
    let nm1 = (p.n - 1) as f64;
    let absolute_ok = (p.c - 1.0 / nm1).abs() < 1e-12;
    let cap = model.c_p().powi(-(p.n as i32 - 1));
    let omega = model.omega();
    let mut notes = hyp_note.into_iter().collect::<Vec<_>>();
    let mut margin = Vec::new();
    let mut locus = Vec::new();
    let mut verdict = Verdict::Holds;
    let note_min = |label: &str, v: f64, notes: &mut Vec<String>| {
        notes.push(format!("{label} slack minimum: {v:.6e}"));
    };

    // absolute bound on the re-parametrized balls
    if absolute_ok {
        let mut min_abs = f64::INFINITY;
        for &r in radii {
            let bound = omega * cap * mf.model_volume(r)?;
            let v = model.nu_ball(r);
            let slack = bound - v;
            if slack < -tol.check_tol * (1.0 + bound) {
                verdict = Verdict::Violated;
            }
            if slack.abs() < tol.eq_tol * (1.0 + bound) {
                locus.push(r);
            }
            min_abs = min_abs.min(slack);
            margin.push((r, slack));
        }
        note_min("absolute ball", min_abs, &mut notes);
    } else {
        notes.push("absolute ball bounds skipped: c differs from 1/(n-1)".into());
    }

    // relative bound on all ordered pairs from the radii list
    let mut min_rel = f64::INFINITY;
    for (i, &r) in radii.iter().enumerate() {
        for &bigr in radii.iter().skip(i + 1) {
            let lhs = model.nu_ball(bigr).ln() - model.nu_ball(r).ln();
            let rhs = mf.model_volume(bigr)?.ln() - mf.model_volume(r)?.ln();
            min_rel = min_rel.min(rhs - lhs);
        }
    }
    if radii.len() > 1 {
        if min_rel < -tol.check_tol {
            verdict = Verdict::Violated;
        }
        note_min("relative ball", min_rel, &mut notes);
    }

    // radial variants when a density is available
    if model.density(0.0).is_some() {
        if absolute_ok {
            let mut min_mu = f64::INFINITY;
            for &r in radii {
                let r_t = r.min(model.t_max());
                let bound = omega * cap * model.s_kv(r_t, mf);
                min_mu = min_mu.min((bound - model.mu_ball(r_t)) / (1.0 + bound));
            }
            if min_mu < -tol.check_tol {
                verdict = Verdict::Violated;
            }
            note_min("radial absolute ball", min_mu, &mut notes);
        }
        let mut min_mu_rel = f64::INFINITY;
        for (i, &r) in radii.iter().enumerate() {
            for &bigr in radii.iter().skip(i + 1) {
                let (rt, bigrt) = (r.min(model.t_max()), bigr.min(model.t_max()));
                if bigrt <= rt {
                    continue;
                }
                let lhs = model.mu_ball(bigrt).ln() - model.mu_ball(rt).ln();
                let rhs = model.s_kv(bigrt, mf).ln() - model.s_kv(rt, mf).ln();
                min_mu_rel = min_mu_rel.min(rhs - lhs);
            }
        }
        if min_mu_rel < f64::INFINITY {
            if min_mu_rel < -tol.check_tol {
                verdict = Verdict::Violated;
            }
            note_min("radial relative ball", min_mu_rel, &mut notes);
        }
    }

    // monotonicity of r -> nu(B_{V,r}) / model volume over a fixed 50-point scan
    let r_hi = s_window(model, mf);
    let mut prev = f64::INFINITY;
    let mut worst_rise = 0.0f64;
    for i in 1..=50 {
        let r = r_hi * (0.02 + 0.98 * (i as f64 - 1.0) / 49.0);
        let ratio = model.nu_ball(r) / mf.model_volume(r)?;
        if ratio - prev > worst_rise {
            worst_rise = ratio - prev;
        }
        prev = ratio;
    }
    if worst_rise > 1e-7 {
        verdict = Verdict::Violated;
        notes.push(format!(
            "volume ratio increased by {worst_rise:.3e} along the radius scan"
        ));
    } else {
        notes.push(format!("volume ratio monotone; worst rise {worst_rise:.3e}"));
    }

    Ok(CheckResult {
        name: "bishop_gromov".into(),
        verdict,
        margin,
        equality_locus: locus,
        hypothesis_verified: true,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_functions::KappaProfile;
    use crate::model_space::RadialFunction;
    use crate::parameters::{validate_range, ExtendedN};
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn sphere() -> WeightedModel {
        WeightedModel::new(
            3,
            RadialFunction::ScaledSin { radius: 1.0 },
            Weight::Zero,
            false,
            PI,
            true,
            validate_range(3, ExtendedN::Finite(3.0), 0.0).unwrap(),
            1.0,
        )
        .unwrap()
    }

    fn euclidean(t_max: f64) -> WeightedModel {
        WeightedModel::new(
            3,
            RadialFunction::Identity,
            Weight::Zero,
            false,
            t_max,
            false,
            validate_range(3, ExtendedN::Finite(3.0), 0.0).unwrap(),
            1.0,
        )
        .unwrap()
    }

    fn mf_const(k: f64, max: f64) -> ModelFunctions {
        solve_model(KappaProfile::constant(k), 0.5, max).unwrap()
    }

    #[test]
    fn hypothesis_sphere_equality() {
        let m = sphere();
        let mf = mf_const(1.0, 6.0);
        let r = check_hypothesis(&m, &mf, HypothesisMode::FullTensor, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.max_abs_slack() < 1e-8);
        assert_eq!(r.equality_locus.len(), r.margin.len());
    }

    #[test]
    fn hypothesis_euclidean_cases() {
        let m = euclidean(3.0);
        let neg = mf_const(-1.0, 6.0);
        let r = check_hypothesis(&m, &neg, HypothesisMode::FullTensor, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.min_slack() - 2.0).abs() < 1e-9);
        let pos = mf_const(1.0, 6.0);
        let r = check_hypothesis(&m, &pos, HypothesisMode::FullTensor, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn riccati_sphere_equality() {
        let m = sphere();
        let mf = mf_const(1.0, 6.0);
        let r = check_riccati(&m, &mf, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.equality_locus.len(), r.margin.len());
    }

    #[test]
    fn riccati_gaussian_slack() {
        // gradient f = t^2/2 at infinite effective dimension: the slack is
        // e^{f} (f')^2 / (n-1) in closed form
        let m = WeightedModel::new(
            3,
            RadialFunction::Identity,
            Weight::Gradient(RadialFunction::Quadratic { coeff: 0.5 }),
            false,
            3.0,
            false,
            validate_range(3, ExtendedN::Infinity, 0.0).unwrap(),
            1.0,
        )
        .unwrap();
        let mf = mf_const(0.0, 6.0);
        let r = check_riccati(&m, &mf, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        for &(t, s) in &r.margin {
            let expect = (t * t / 2.0f64).exp() * t * t / 2.0;
            assert!(
                (s - expect).abs() < 1e-5 * (1.0 + expect),
                "t={t} s={s} expect={expect}"
            );
        }
    }

    #[test]
    fn laplacian_sphere_full_equality() {
        let m = sphere();
        let mf = mf_const(1.0, 6.0);
        let r = check_laplacian(&m, &mf, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.equality_locus.len(), r.margin.len());
    }

    #[test]
    fn laplacian_euclidean_vs_hyperbolic_model() {
        // 2/t against 2 coth t: strict slack in the regularized margin
        let m = euclidean(3.0);
        let mf = mf_const(-1.0, 6.0);
        let r = check_laplacian(&m, &mf, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        for &(s, slack) in r.margin.iter().filter(|&&(s, _)| s > 0.3) {
            // G = sinh^2(s) (2/s - 2 coth s) is negative, so -G > 0
            let g = s.sinh().powi(2) * (2.0 / s - 2.0 / s.tanh());
            assert!((slack + g).abs() < 1e-7 * (1.0 + g.abs()), "s={s}");
            assert!(slack > 0.0);
        }
    }

    #[test]
    fn laplacian_vacuous_when_hypothesis_fails() {
        let m = euclidean(3.0);
        let mf = mf_const(1.0, 6.0);
        let r = check_laplacian(&m, &mf, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Vacuous);
        assert!(!r.hypothesis_verified);
    }

    #[test]
    fn cut_value_cases() {
        let m = sphere();
        let mf = mf_const(1.0, 6.0);
        let r = check_cut_value(&m, &mf, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(!r.equality_locus.is_empty());
        // half sphere phi = sin(2t)/2: s_V = t, T = pi/2 < pi
        let half = WeightedModel::new(
            3,
            RadialFunction::Sin { amp: 0.5, freq: 2.0 },
            Weight::Zero,
            false,
            PI / 2.0,
            true,
            validate_range(3, ExtendedN::Finite(3.0), 0.0).unwrap(),
            1.0,
        )
        .unwrap();
        let r = check_cut_value(&half, &mf, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.margin[0].1 - PI / 2.0).abs() < 1e-9);
        assert!(r.equality_locus.is_empty());
        // no finite first zero
        let flat = mf_const(0.0, 6.0);
        let r = check_cut_value(&m, &flat, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Vacuous);
    }

    #[test]
    fn bounded_density_reduces_to_plain_at_delta_zero() {
        let m = sphere();
        let mf = mf_const(1.0, 6.0);
        let r = check_bounded_density(&m, &mf, 0.0, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        // sphere with zero weight: Laplacian variant is an equality
        assert!(r.max_abs_slack() < 1e-8);
    }

    #[test]
    fn bounded_density_vacuous_on_bound_failure() {
        let m = WeightedModel::new(
            3,
            RadialFunction::Identity,
            Weight::Gradient(RadialFunction::Linear { slope: 1.0 }),
            false,
            3.0,
            false,
            validate_range(3, ExtendedN::Infinity, 0.0).unwrap(),
            1.0,
        )
        .unwrap();
        let mf = mf_const(-1.0, 6.0);
        let r = check_bounded_density(&m, &mf, 0.1, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Vacuous);
    }

    #[test]
    fn volume_element_cases() {
        let mf1 = mf_const(1.0, 6.0);
        let r = check_volume_element(&sphere(), &mf1, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.equality_locus.len(), r.margin.len());
        // Euclidean against the hyperbolic model: theta_hat = s^2 <= sinh^2 s
        let mfn = mf_const(-1.0, 6.0);
        let r = check_volume_element(&euclidean(3.0), &mfn, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        // hyperbolic model case: equality
        let hyp = WeightedModel::new(
            3,
            RadialFunction::ScaledSinh { radius: 1.0 },
            Weight::Zero,
            false,
            3.0,
            false,
            validate_range(3, ExtendedN::Finite(3.0), 0.0).unwrap(),
            1.0,
        )
        .unwrap();
        let r = check_volume_element(&hyp, &mfn, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.equality_locus.len(), r.margin.len());
    }

    #[test]
    fn bishop_gromov_sphere_equality() {
        let m = sphere();
        let mf = mf_const(1.0, 6.0);
        let radii = [PI / 4.0, PI / 2.0, PI];
        let r = check_bishop_gromov(&m, &mf, &radii, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        for &(_, slack) in &r.margin {
            assert!(slack.abs() < 1e-7);
        }
        // exact value at the full radius
        let v = m.nu_ball(PI);
        assert!((v - 2.0 * PI * PI).abs() < 1e-7);
    }

    #[test]
    fn bishop_gromov_euclidean_vs_hyperbolic() {
        let m = euclidean(3.0);
        let mf = mf_const(-1.0, 6.0);
        let r = check_bishop_gromov(&m, &mf, &[1.0, 2.0], &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        // closed-form relative bound: (R/r)^3 = 8 <= S(2)/S(1)
        let lhs = (m.nu_ball(2.0) / m.nu_ball(1.0)).ln();
        let rhs = (mf.model_volume(2.0).unwrap() / mf.model_volume(1.0).unwrap()).ln();
        assert!((lhs - 3.0 * (2.0f64).ln()).abs() < 1e-8);
        assert!(rhs >= lhs);
    }

    #[test]
    fn radial_variant_with_density() {
        // gradient f(t) = t against kappa = -1: hypothesis holds at infinite N
        let m = WeightedModel::new(
            3,
            RadialFunction::Identity,
            Weight::Gradient(RadialFunction::Linear { slope: 1.0 }),
            false,
            3.0,
            false,
            validate_range(3, ExtendedN::Infinity, 0.0).unwrap(),
            1.0,
        )
        .unwrap();
        let mf = mf_const(-1.0, 6.0);
        let r = check_bishop_gromov(&m, &mf, &[0.3, 0.6, 0.9], &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }
}
