//! Equality-case model construction and rigidity classification: builds the
//! warped metrics on which the comparison inequalities are equalities, checks
//! maximal-diameter models against the asserted structure, and handles the
//! volume-growth rigidity criterion.

use crate::comparison::{verify_hypothesis, CheckResult, CompareError, Tolerances, Verdict};
use crate::model_functions::{ModelFnError, ModelFunctions};
use crate::model_space::{
    EqualityWarp, ModelError, RadialFunction, Weight, WeightedModel,
};
use crate::numerics::{
    brent_root, chebyshev_probes, integrate_dense, DenseSolution, NumericsError,
};
use crate::parameters::EpsParams;
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RigidityError {
    #[error("construction failure: {0}")]
    ConstructionFailure(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("model not maximal: tau_V = {tau} < first zero {cut}")]
    NotMaximal { tau: f64, cut: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    ModelFn(#[from] ModelFnError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Compare(#[from] CompareError),
}

/// The three structural cases of the equality classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityCase {
    /// N = n: vanishing field, phi(t) = s_{c_p^2 kappa}(t).
    NEqN,
    /// N = 1: eps = 0, phi(t) = c_p^{-1} e^{f_Vp(t)/(n-1)} s_kappa(s_V(t)).
    NEq1,
    /// N outside {1, n}: eps = 0, radial field component vanishes,
    /// phi(t) = s_{c_p^2 kappa}(t).
    NOther,
}

fn solve_s_ode(
    f: &RadialFunction,
    f0: f64,
    beta: f64,
    c_p: f64,
    t_end: f64,
) -> Result<DenseSolution, NumericsError> {
    let f = f.clone();
    integrate_dense(
        move |t, _y, dy| {
            dy[0] = c_p * (-beta * (f.eval(t).0 - f0)).exp();
        },
        0.0,
        t_end,
        &[0.0],
        1e-12,
        1e-14,
    )
}

fn is_constant_profile(f: &RadialFunction, span: f64) -> bool {
    (0..=64).all(|i| f.eval(span * i as f64 / 64.0).1.abs() < 1e-12)
}

/// Builds the model whose warping function realizes the equality case:
/// phi(t) = c_p^{-1} e^{f_Vp(t)/(n-1)} s_kappa(s(t)) with s solved jointly
/// from s'(t) = c_p e^{-beta f_Vp(t)}.
///
/// Two-pole construction mirrors the density about the parameter where s
/// reaches half the first zero; it needs a finite first zero and a symmetric
/// curvature profile. One-pole construction needs `t_max`.
pub fn build_equality_model(
    case: RigidityCase,
    params: EpsParams,
    mf: &ModelFunctions,
    f: RadialFunction,
    two_pole: bool,
    t_max: Option<f64>,
) -> Result<WeightedModel, RigidityError> {
    let beta = params.beta();
    let f0 = f.eval(0.0).0;
    let c_p = (-beta * f0).exp();
    match case {
        RigidityCase::NEq1 => {
            if !params.big_n.is_one() {
                return Err(RigidityError::Precondition(
                    "this construction needs N = 1".into(),
                ));
            }
            if f.eval(0.0).1.abs() > 1e-10 {
                return Err(RigidityError::Precondition(
                    "density slope must vanish at the pole".into(),
                ));
            }
        }
        RigidityCase::NEqN | RigidityCase::NOther => {
            let span = t_max.unwrap_or(1.0).max(1.0);
            if !is_constant_profile(&f, span) {
                return Err(RigidityError::Precondition(
                    "the sphere-type cases need a constant density".into(),
                ));
            }
            if case == RigidityCase::NEqN && !params.requires_zero_v {
                return Err(RigidityError::Precondition(
                    "this construction needs N = n".into(),
                ));
            }
            if case == RigidityCase::NOther && params.eps != 0.0 {
                return Err(RigidityError::Precondition(
                    "this construction needs eps = 0".into(),
                ));
            }
        }
    }

    let constant_f = is_constant_profile(&f, t_max.unwrap_or(1.0).max(1.0));
    let (density, t_total, kink) = if two_pole {
        let cut = mf.cut_value().ok_or_else(|| {
            RigidityError::Precondition("two-pole construction needs a finite first zero".into())
        })?;
        if !mf.check_symmetry()? {
            return Err(RigidityError::Precondition(
                "two-pole construction needs a symmetric curvature profile".into(),
            ));
        }
        // grow the span until s crosses half the first zero, then locate the
        // equator
        let mut t_end = cut / (2.0 * c_p);
        let mut t_eq = None;
        for _ in 0..48 {
            let sol = solve_s_ode(&f, f0, beta, c_p, t_end)?;
            if sol.component(t_end, 0) >= 0.5 * cut {
                t_eq = Some(brent_root(
                    |t| sol.component(t, 0) - 0.5 * cut,
                    0.0,
                    t_end,
                    1e-13,
                )?);
                break;
            }
            t_end *= 1.5;
        }
        let t_eq = t_eq.ok_or_else(|| {
            RigidityError::ConstructionFailure(
                "re-parametrized distance never reaches half the first zero".into(),
            )
        })?;
        let mirrored = RadialFunction::Mirrored {
            base: Box::new(f),
            center: t_eq,
        };
        let kink = if constant_f { None } else { Some(t_eq) };
        (mirrored, 2.0 * t_eq, kink)
    } else {
        let t = t_max.ok_or_else(|| {
            RigidityError::Precondition("one-pole construction needs t_max".into())
        })?;
        (f, t, None)
    };

    let s_of_t = solve_s_ode(&density, f0, beta, c_p, t_total)?;
    if let Some(cut) = mf.cut_value() {
        let s_end = s_of_t.component(t_total, 0);
        if !two_pole && s_end >= cut * (1.0 - 1e-9) {
            return Err(RigidityError::ConstructionFailure(format!(
                "re-parametrized span {s_end:.6} reaches the first zero {cut:.6}"
            )));
        }
    }
    let warp = EqualityWarp {
        c_p,
        n: params.n,
        beta,
        f: density.clone(),
        f_at_p: f0,
        mf: mf.clone(),
        s_of_t,
        t_max: t_total,
    };
    let phi = RadialFunction::EqualityWarp(Arc::new(warp));
    let killing = case == RigidityCase::NOther;
    let model = WeightedModel::new(
        params.n,
        phi,
        Weight::Gradient(density),
        killing,
        t_total,
        two_pole,
        params,
        c_p,
    )
    .map_err(|e| RigidityError::ConstructionFailure(e.to_string()))?;
    Ok(match kink {
        Some(k) => model.with_kink(k),
        None => model,
    })
}

/// Supremum deviation of the model's warping function from the structural
/// law asserted by the given case.
pub fn warping_law_deviation(
    model: &WeightedModel,
    mf: &ModelFunctions,
    case: RigidityCase,
) -> f64 {
    let cp = model.c_p();
    let nm1 = (model.n() - 1) as f64;
    let mut worst = 0.0f64;
    for t in chebyshev_probes(0.0, model.t_max(), 80) {
        let law = match case {
            RigidityCase::NEqN | RigidityCase::NOther => mf.s_kappa(cp * t) / cp,
            RigidityCase::NEq1 => {
                (model.f_vp(t) / nm1).exp() * mf.s_kappa(model.s_v(t)) / cp
            }
        };
        worst = worst.max((model.phi(t).0 - law).abs());
    }
    worst
}

fn expected_case(params: &EpsParams) -> Result<RigidityCase, String> {
    if params.requires_zero_v {
        Ok(RigidityCase::NEqN)
    } else if params.big_n.is_one() {
        Ok(RigidityCase::NEq1)
    } else if params.eps == 0.0 {
        Ok(RigidityCase::NOther)
    } else {
        Err("equality with N outside {1, n} forces eps = 0; no case applies".into())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxDiameterReport {
    pub result: CheckResult,
    pub case: Option<RigidityCase>,
    /// Supremum deviation of phi from the case's structural law.
    pub law_deviation: f64,
    /// Supremum deviation of the two-pole compatibility condition.
    pub compatibility_deviation: f64,
    /// Whether the bounded-density rigidity (diameter equal to the rescaled
    /// first zero forcing a constant density) was triggered and verified.
    pub bounded_density_rigid: Option<bool>,
}

/// Classifies a two-pole model attaining the maximal diameter.
pub fn check_max_diameter(
    model: &WeightedModel,
    mf: &ModelFunctions,
    delta: Option<f64>,
    tol: &Tolerances,
) -> Result<MaxDiameterReport, RigidityError> {
    if !model.two_pole() {
        return Err(RigidityError::Precondition(
            "maximal-diameter classification needs a two-pole model".into(),
        ));
    }
    let cut = mf.cut_value().ok_or_else(|| {
        RigidityError::Precondition("maximal-diameter classification needs a finite first zero".into())
    })?;
    if !mf.check_symmetry()? {
        return Err(RigidityError::Precondition(
            "curvature profile must be symmetric about the midpoint".into(),
        ));
    }
    for i in 0..=64 {
        let s = cut * i as f64 / 64.0;
        if mf.kappa().eval(s) <= 0.0 {
            return Err(RigidityError::Precondition(format!(
                "curvature profile must be positive; fails at s = {s:.6}"
            )));
        }
    }
    let mut notes = Vec::new();
    let (hyp, hyp_note) = verify_hypothesis(model, mf, tol)?;
    notes.extend(hyp_note);
    if !hyp {
        return Ok(MaxDiameterReport {
            result: CheckResult {
                name: "max_diameter".into(),
                verdict: Verdict::Vacuous,
                margin: Vec::new(),
                equality_locus: Vec::new(),
                hypothesis_verified: false,
                notes: vec!["curvature hypothesis fails on the model".into()],
            },
            case: None,
            law_deviation: f64::NAN,
            compatibility_deviation: f64::NAN,
            bounded_density_rigid: None,
        });
    }
    let tau = model.tau_v();
    if tau < cut - tol.eq_tol {
        return Err(RigidityError::NotMaximal { tau, cut });
    }

    // compatibility between the two poles: the conformal factor computed from
    // the far pole must match the one computed from the base point
    let beta = model.params().beta();
    let c_q = model.c_p() * (-beta * model.f_vp(model.t_max())).exp();
    let mut compat = 0.0f64;
    for t in chebyshev_probes(0.0, model.t_max(), 40) {
        let f_vq = model.f_vp(t) - model.f_vp(model.t_max());
        let from_q = c_q * (-beta * f_vq).exp();
        let from_p = model.c_p() * (-beta * model.f_vp(t)).exp();
        compat = compat.max((from_q - from_p).abs());
    }

    let mut case = None;
    let mut law_dev = f64::NAN;
    match expected_case(model.params()) {
        Ok(c) => {
            let max_a = (0..=128)
                .map(|i| model.a(model.t_max() * i as f64 / 128.0).abs())
                .fold(0.0f64, f64::max);
            let field_ok = match c {
                RigidityCase::NEq1 => true,
                // the sphere cases assert no radial field component
                RigidityCase::NEqN | RigidityCase::NOther => max_a < 1e-10,
            };
            law_dev = warping_law_deviation(model, mf, c);
            if field_ok && law_dev <= 1e-7 {
                case = Some(c);
            } else if !field_ok {
                notes.push("radial field component does not vanish; declining to classify".into());
            } else {
                notes.push(format!(
                    "warping law deviates by {law_dev:.3e}; declining to classify"
                ));
            }
        }
        Err(msg) => notes.push(msg),
    }

    // bounded-density rigidity: the diameter attaining the rescaled first
    // zero forces a constant density and the rescaled sphere profile
    let mut bd_rigid = None;
    if let Some(d) = delta {
        if model.density(0.0).is_some() {
            let stretch = (2.0 * d).exp();
            let cut_d = stretch * cut;
            if (model.t_max() - cut_d).abs() <= 1e-6 {
                let nm1 = (model.n() - 1) as f64;
                let eps = model.params().eps;
                let mut f_dev = 0.0f64;
                let mut phi_dev = 0.0f64;
                for t in chebyshev_probes(0.0, model.t_max(), 60) {
                    let f = model.density(t).unwrap();
                    f_dev = f_dev.max(((1.0 - eps) * f - nm1 * d).abs());
                    phi_dev = phi_dev
                        .max((model.phi(t).0 - stretch * mf.s_kappa(t / stretch)).abs());
                }
                notes.push(format!(
                    "bounded-density rigidity: density deviation {f_dev:.3e}, profile deviation {phi_dev:.3e}"
                ));
                bd_rigid = Some(f_dev <= 1e-7 && phi_dev <= 1e-7);
            } else {
                notes.push(format!(
                    "diameter {:.6} below the rescaled first zero {cut_d:.6}; bounded-density rigidity not triggered",
                    model.t_max()
                ));
            }
        }
    }

    let slack = cut - tau;
    Ok(MaxDiameterReport {
        result: CheckResult {
            name: "max_diameter".into(),
            verdict: Verdict::Holds,
            margin: vec![(tau, slack)],
            equality_locus: if slack.abs() < tol.eq_tol {
                vec![tau]
            } else {
                Vec::new()
            },
            hypothesis_verified: true,
            notes,
        },
        case,
        law_deviation: law_dev,
        compatibility_deviation: compat,
        bounded_density_rigid: bd_rigid,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeGrowthReport {
    pub result: CheckResult,
    pub case: Option<RigidityCase>,
    /// Minimum of the ball-volume ratio over the unit-sphere area.
    pub min_ratio: f64,
    pub law_deviation: Option<f64>,
}

/// Volume-growth rigidity: when the first zero is infinite and the ball
/// volumes attain the model growth, the warping law must hold. Vacuous when
/// the first zero is finite (whether an analogue holds there is open).
pub fn check_volume_growth_rigidity(
    model: &WeightedModel,
    mf: &ModelFunctions,
    radii: &[f64],
    tol: &Tolerances,
) -> Result<VolumeGrowthReport, RigidityError> {
    let vac = |why: String| VolumeGrowthReport {
        result: CheckResult {
            name: "volume_growth_rigidity".into(),
            verdict: Verdict::Vacuous,
            margin: Vec::new(),
            equality_locus: Vec::new(),
            hypothesis_verified: false,
            notes: vec![why],
        },
        case: None,
        min_ratio: f64::NAN,
        law_deviation: None,
    };
    if mf.cut_value().is_some() {
        return Ok(vac(
            "first zero is finite; no rigidity conclusion is available there".into(),
        ));
    }
    let (hyp, hyp_note) = verify_hypothesis(model, mf, tol)?;
    if !hyp {
        return Ok(vac("curvature hypothesis fails on the model".into()));
    }
    let omega = model.omega();
    let mut margin = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for &r in radii {
        let ratio = model.nu_ball(r) / mf.model_volume(r)?;
        min_ratio = min_ratio.min(ratio / omega);
        margin.push((r, ratio / omega - 1.0));
    }
    let mut notes = hyp_note.into_iter().collect::<Vec<_>>();
    let mut case = None;
    let mut law = None;
    let mut verdict = Verdict::Holds;
    if min_ratio >= 1.0 - tol.eq_tol {
        match expected_case(model.params()) {
            Ok(c) => {
                let dev = warping_law_deviation(model, mf, c);
                law = Some(dev);
                if dev <= 1e-7 {
                    case = Some(c);
                } else {
                    verdict = Verdict::Violated;
                    notes.push(format!(
                        "model growth attained but the warping law deviates by {dev:.3e}"
                    ));
                }
            }
            Err(msg) => {
                verdict = Verdict::Violated;
                notes.push(msg);
            }
        }
    } else {
        notes.push(format!(
            "growth ratio minimum {min_ratio:.6} below the model value; no rigidity asserted"
        ));
    }
    Ok(VolumeGrowthReport {
        result: CheckResult {
            name: "volume_growth_rigidity".into(),
            verdict,
            margin,
            equality_locus: Vec::new(),
            hypothesis_verified: true,
            notes,
        },
        case,
        min_ratio,
        law_deviation: law,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::{check_laplacian, check_hypothesis, HypothesisMode};
    use crate::model_functions::{solve_model, KappaProfile};
    use crate::parameters::{validate_range, ExtendedN};
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn mf_const(k: f64, c: f64, max: f64) -> ModelFunctions {
        solve_model(KappaProfile::constant(k), c, max).unwrap()
    }

    #[test]
    fn sphere_reconstruction() {
        // N = n, constant density zero: the construction returns phi = sin
        let p = validate_range(3, ExtendedN::Finite(3.0), 0.0).unwrap();
        let mf = mf_const(1.0, p.c, 6.0);
        let m = build_equality_model(
            RigidityCase::NEqN,
            p,
            &mf,
            RadialFunction::Constant(0.0),
            true,
            None,
        )
        .unwrap();
        assert!((m.t_max() - PI).abs() < 1e-9);
        for i in 1..20 {
            let t = PI * i as f64 / 20.0;
            assert!((m.phi(t).0 - t.sin()).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn constant_density_scaling_law() {
        // N = 1, f constant: phi = c_p^{-1} s_kappa(c_p t)
        let p = validate_range(3, ExtendedN::Finite(1.0), 0.0).unwrap();
        let mf = mf_const(1.0, p.c, 6.0);
        let f0 = 0.4f64;
        let m = build_equality_model(
            RigidityCase::NEq1,
            p,
            &mf,
            RadialFunction::Constant(f0),
            true,
            None,
        )
        .unwrap();
        let cp = (-f0).exp(); // beta = 1 at n = 3, eps = 0
        assert!((m.c_p() - cp).abs() < 1e-14);
        assert!((m.t_max() - PI / cp).abs() < 1e-8);
        for i in 1..20 {
            let t = m.t_max() * i as f64 / 20.0;
            assert!(((m.phi(t).0) - (cp * t).sin() / cp).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn nonconstant_density_equality_family() {
        let p = validate_range(3, ExtendedN::Finite(1.0), 0.0).unwrap();
        let mf = mf_const(1.0, p.c, 6.0);
        let m = build_equality_model(
            RigidityCase::NEq1,
            p,
            &mf,
            RadialFunction::SinSq { amp: 0.2, freq: 1.0 },
            true,
            None,
        )
        .unwrap();
        // maximal by construction
        assert!((m.tau_v() - PI).abs() < 1e-8);
        // the hypothesis is an equality on this model
        let h = check_hypothesis(&m, &mf, HypothesisMode::Radial, &tol()).unwrap();
        assert_eq!(h.verdict, Verdict::Holds);
        assert!(h.max_abs_slack() < 1e-6, "max={}", h.max_abs_slack());
        // the Laplacian comparison is an equality
        let l = check_laplacian(&m, &mf, &tol()).unwrap();
        assert_eq!(l.verdict, Verdict::Holds);
        assert!(l.max_abs_slack() < 1e-7, "max={}", l.max_abs_slack());
        // classification returns the constructed case with the law matched
        let r = check_max_diameter(&m, &mf, None, &tol()).unwrap();
        assert_eq!(r.case, Some(RigidityCase::NEq1));
        assert!(r.law_deviation <= 1e-7);
        assert!(r.compatibility_deviation < 1e-10);
    }

    #[test]
    fn not_maximal_detection() {
        let p = validate_range(3, ExtendedN::Finite(3.0), 0.0).unwrap();
        let mf = mf_const(1.0, p.c, 6.0);
        let half = WeightedModel::new(
            3,
            RadialFunction::Sin { amp: 0.5, freq: 2.0 },
            Weight::Zero,
            false,
            PI / 2.0,
            true,
            p,
            1.0,
        )
        .unwrap();
        match check_max_diameter(&half, &mf, None, &tol()) {
            Err(RigidityError::NotMaximal { tau, cut }) => {
                assert!((tau - PI / 2.0).abs() < 1e-9);
                assert!((cut - PI).abs() < 1e-9);
            }
            other => panic!("expected NotMaximal, got {other:?}"),
        }
    }

    #[test]
    fn construction_rejections() {
        let p1 = validate_range(3, ExtendedN::Finite(1.0), 0.0).unwrap();
        let mf = mf_const(1.0, p1.c, 6.0);
        // density with nonzero slope at the pole
        assert!(matches!(
            build_equality_model(
                RigidityCase::NEq1,
                p1,
                &mf,
                RadialFunction::Linear { slope: 1.0 },
                true,
                None,
            ),
            Err(RigidityError::Precondition(_))
        ));
        // sphere case with nonconstant density
        let p3 = validate_range(3, ExtendedN::Finite(3.0), 0.0).unwrap();
        let mf3 = mf_const(1.0, p3.c, 6.0);
        assert!(matches!(
            build_equality_model(
                RigidityCase::NEqN,
                p3,
                &mf3,
                RadialFunction::SinSq { amp: 0.2, freq: 1.0 },
                true,
                None,
            ),
            Err(RigidityError::Precondition(_))
        ));
        // two-pole with no finite first zero
        let mf0 = mf_const(0.0, p3.c, 6.0);
        assert!(build_equality_model(
            RigidityCase::NEqN,
            p3,
            &mf0,
            RadialFunction::Constant(0.0),
            true,
            None,
        )
        .is_err());
    }

    #[test]
    fn killing_part_invisibility() {
        // the N-other case: zero radial field with the tangential Killing
        // flag produces the same check outputs as the plain sphere
        let p = validate_range(3, ExtendedN::Finite(5.0), 0.0).unwrap();
        let mf = mf_const(1.0, p.c, 8.0);
        let m = build_equality_model(
            RigidityCase::NOther,
            p,
            &mf,
            RadialFunction::Constant(0.0),
            true,
            None,
        )
        .unwrap();
        assert!(m.killing_tangential);
        let r = check_max_diameter(&m, &mf, None, &tol()).unwrap();
        assert_eq!(r.case, Some(RigidityCase::NOther));
        assert!(r.law_deviation <= 1e-8);
    }

    #[test]
    fn volume_growth_cases() {
        let p = validate_range(3, ExtendedN::Finite(3.0), 0.0).unwrap();
        // Euclidean against the flat model: ratio 1, law phi = t confirmed
        let mf0 = mf_const(0.0, p.c, 12.0);
        let e = WeightedModel::new(
            3,
            RadialFunction::Identity,
            Weight::Zero,
            false,
            10.0,
            false,
            p,
            1.0,
        )
        .unwrap();
        let r = check_volume_growth_rigidity(&e, &mf0, &[1.0, 2.0, 4.0], &tol()).unwrap();
        assert_eq!(r.case, Some(RigidityCase::NEqN));
        assert!((r.min_ratio - 1.0).abs() < 1e-8);
        // hyperbolic against its own model
        let mfn = mf_const(-1.0, p.c, 12.0);
        let h = WeightedModel::new(
            3,
            RadialFunction::ScaledSinh { radius: 1.0 },
            Weight::Zero,
            false,
            6.0,
            false,
            p,
            1.0,
        )
        .unwrap();
        let r = check_volume_growth_rigidity(&h, &mfn, &[1.0, 2.0, 4.0], &tol()).unwrap();
        assert_eq!(r.case, Some(RigidityCase::NEqN));
        // Euclidean against the hyperbolic model: polynomial vs exponential
        let r = check_volume_growth_rigidity(&e, &mfn, &[1.0, 4.0, 8.0], &tol()).unwrap();
        assert_eq!(r.case, None);
        assert!(r.min_ratio < 1.0);
        assert_eq!(r.result.verdict, Verdict::Holds);
        // finite first zero: refuse
        let mf1 = mf_const(1.0, p.c, 6.0);
        let r = check_volume_growth_rigidity(&e, &mf1, &[1.0], &tol()).unwrap();
        assert_eq!(r.result.verdict, Verdict::Vacuous);
    }
}
