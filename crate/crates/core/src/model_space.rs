//! Rotationally symmetric weighted models g = dt^2 + phi(t)^2 g_{S^{n-1}}
//! with radial density or radial vector-field weight, and every along-ray
//! quantity the comparison checks consume.

use crate::model_functions::ModelFunctions;
use crate::numerics::{
    adaptive_simpson, brent_root, integrate_dense, unit_sphere_area, CubicSpline, DenseSolution,
    NumericsError,
};
use crate::parameters::EpsParams;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("solver failure: {0}")]
    Solver(#[from] NumericsError),
}

/// Radial profile with joint (value, d1, d2) evaluation.
#[derive(Debug, Clone)]
pub enum RadialFunction {
    Zero,
    Constant(f64),
    /// t
    Identity,
    /// slope * t
    Linear { slope: f64 },
    /// coeff * t^2
    Quadratic { coeff: f64 },
    /// amp * sin(freq * t)
    Sin { amp: f64, freq: f64 },
    /// amp * sin^2(freq * t)
    SinSq { amp: f64, freq: f64 },
    /// R sin(t/R): warping of the sphere of radius R
    ScaledSin { radius: f64 },
    /// R sinh(t/R): warping of hyperbolic space of curvature -1/R^2
    ScaledSinh { radius: f64 },
    /// coeff * ln(1 + t)
    Log1p { coeff: f64 },
    /// eta * t^2 (t_max - t)^2, the pole-respecting bump
    PolyBump { eta: f64, t_max: f64 },
    Sum(Box<RadialFunction>, Box<RadialFunction>),
    /// Reflection about `center`: base(t) for t <= center, base(2 center - t) after.
    Mirrored { base: Box<RadialFunction>, center: f64 },
    /// Clamped cubic spline through sampled values.
    Sampled(Arc<CubicSpline>),
    /// Warping realized by the rigidity construction (see `rigidity`).
    EqualityWarp(Arc<EqualityWarp>),
}

impl RadialFunction {
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self {
            RadialFunction::Zero => (0.0, 0.0, 0.0),
            RadialFunction::Constant(v) => (*v, 0.0, 0.0),
            RadialFunction::Identity => (t, 1.0, 0.0),
            RadialFunction::Linear { slope } => (slope * t, *slope, 0.0),
            RadialFunction::Quadratic { coeff } => (coeff * t * t, 2.0 * coeff * t, 2.0 * coeff),
            RadialFunction::Sin { amp, freq } => (
                amp * (freq * t).sin(),
                amp * freq * (freq * t).cos(),
                -amp * freq * freq * (freq * t).sin(),
            ),
            RadialFunction::SinSq { amp, freq } => {
                let (s, c) = (freq * t).sin_cos();
                (
                    amp * s * s,
                    2.0 * amp * freq * s * c,
                    2.0 * amp * freq * freq * (c * c - s * s),
                )
            }
            RadialFunction::ScaledSin { radius } => {
                let x = t / radius;
                (radius * x.sin(), x.cos(), -x.sin() / radius)
            }
            RadialFunction::ScaledSinh { radius } => {
                let x = t / radius;
                (radius * x.sinh(), x.cosh(), x.sinh() / radius)
            }
            RadialFunction::Log1p { coeff } => {
                let d = 1.0 + t;
                (coeff * d.ln(), coeff / d, -coeff / (d * d))
            }
            RadialFunction::PolyBump { eta, t_max } => {
                let w = t_max - t;
                (
                    eta * t * t * w * w,
                    eta * (2.0 * t * w * w - 2.0 * t * t * w),
                    eta * (2.0 * w * w - 8.0 * t * w + 2.0 * t * t),
                )
            }
            RadialFunction::Sum(a, b) => {
                let (v1, d1, dd1) = a.eval(t);
                let (v2, d2, dd2) = b.eval(t);
                (v1 + v2, d1 + d2, dd1 + dd2)
            }
            RadialFunction::Mirrored { base, center } => {
                if t <= *center {
                    base.eval(t)
                } else {
                    let (v, d1, d2) = base.eval(2.0 * center - t);
                    (v, -d1, d2)
                }
            }
            RadialFunction::Sampled(sp) => sp.eval(t),
            RadialFunction::EqualityWarp(w) => w.eval(t),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }
}

/// Warping function phi(t) = c_p^{-1} e^{u(t)/(n-1)} psi(s(t)) produced by the
/// equality-case construction, with s solved jointly rather than by iterated
/// quadrature.
#[derive(Debug)]
pub struct EqualityWarp {
    pub c_p: f64,
    pub n: u32,
    pub beta: f64,
    pub f: RadialFunction,
    pub f_at_p: f64,
    pub mf: ModelFunctions,
    pub s_of_t: DenseSolution,
    pub t_max: f64,
}

impl EqualityWarp {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let nm1 = (self.n - 1) as f64;
        let (fv, fd1, fd2) = self.f.eval(t);
        let u = fv - self.f_at_p;
        let (up, upp) = (fd1, fd2);
        let s = self.s_of_t.component(t, 0);
        let sp = self.c_p * (-self.beta * u).exp();
        let spp = -self.beta * up * sp;
        let psi = self.mf.s_kappa(s);
        let dpsi = self.mf.ds_kappa(s);
        let kap = self.mf.kappa().eval(s);
        let pref = (u / nm1).exp() / self.c_p;
        let a = up / nm1 * psi + dpsi * sp;
        let da = upp / nm1 * psi + up / nm1 * dpsi * sp - kap * psi * sp * sp + dpsi * spp;
        (pref * psi, pref * a, pref * (up / nm1 * a + da))
    }
}

/// Weight structure of the model.
#[derive(Debug, Clone)]
pub enum Weight {
    Zero,
    /// V = grad f with the density profile f(t) (absolute values; f(0) is the
    /// density at the base point).
    Gradient(RadialFunction),
    /// Radial vector field V = a(t) d/dt given by its coefficient.
    RadialField(RadialFunction),
}

/// Rotationally symmetric weighted model, immutable after construction.
#[derive(Debug)]
pub struct WeightedModel {
    n: u32,
    phi: RadialFunction,
    weight: Weight,
    pub killing_tangential: bool,
    t_max: f64,
    two_pole: bool,
    pub truncated: bool,
    params: EpsParams,
    c_p: f64,
    /// Location where a mirrored profile is only C^0 (equality two-pole
    /// completions); probe grids avoid a small window around it.
    pub kink: Option<f64>,
    pub warnings: Vec<String>,
    ray: DenseSolution, // y = [f_vp, s_v]
}

const POLE_TOL: f64 = 1e-8;
const TWO_POLE_TOL: f64 = 1e-6;

impl WeightedModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: u32,
        phi: RadialFunction,
        weight: Weight,
        killing_tangential: bool,
        t_max: f64,
        two_pole: bool,
        params: EpsParams,
        c_p: f64,
    ) -> Result<Self, ModelError> {
        if t_max <= 0.0 {
            return Err(ModelError::InvalidModel("t_max must be positive".into()));
        }
        if c_p <= 0.0 {
            return Err(ModelError::InvalidModel("c_p must be positive".into()));
        }
        if n != params.n {
            return Err(ModelError::InvalidModel(format!(
                "model dimension {n} disagrees with validated parameters (n = {})",
                params.n
            )));
        }
        let (p0, dp0, _) = phi.eval(0.0);
        if p0.abs() > POLE_TOL || (dp0 - 1.0).abs() > POLE_TOL {
            return Err(ModelError::InvalidModel(format!(
                "pole regularity failed: phi(0) = {p0:.3e}, phi'(0) = {dp0:.6}"
            )));
        }
        let mut warnings = Vec::new();
        for i in 1..400 {
            let t = t_max * i as f64 / 400.0;
            if t < t_max - 1e-9 && phi.value(t) <= 0.0 {
                return Err(ModelError::InvalidModel(format!(
                    "warping function vanishes at interior point t = {t}"
                )));
            }
        }
        if two_pole {
            let (pt, dpt, _) = phi.eval(t_max);
            if pt.abs() > TWO_POLE_TOL || (dpt + 1.0).abs() > TWO_POLE_TOL {
                return Err(ModelError::InvalidModel(format!(
                    "two-pole closure failed: phi(T) = {pt:.3e}, phi'(T) = {dpt:.6}"
                )));
            }
            // flag competing-geodesic risk for manual review
            let half = 0.5 * t_max;
            let mut mono = true;
            let mut prev = 0.0;
            for i in 1..=100 {
                let v = phi.value(half * i as f64 / 100.0);
                if v < prev - 1e-12 {
                    mono = false;
                }
                prev = v;
            }
            if !mono {
                warnings.push(
                    "warping function non-monotone on the first half of a two-pole model; \
                     radial geodesic from the pole assumed minimal"
                        .into(),
                );
            }
        }
        match &weight {
            Weight::Gradient(f) => {
                if f.eval(0.0).1.abs() > 1e-10 {
                    warnings.push("gradient density has f'(0) != 0 at the pole".into());
                }
            }
            Weight::RadialField(a) => {
                if a.value(0.0).abs() > 1e-10 {
                    warnings.push("radial field does not vanish at the pole".into());
                }
            }
            Weight::Zero => {}
        }
        if params.requires_zero_v {
            let max_a = (0..=200)
                .map(|i| weight_a(&weight, t_max * i as f64 / 200.0).abs())
                .fold(0.0f64, f64::max);
            if max_a > 1e-10 {
                return Err(ModelError::InvalidModel(
                    "N = n requires a vanishing vector field".into(),
                ));
            }
        }

        let beta = params.beta();
        let w = weight.clone();
        let ray = integrate_dense(
            move |t, y, dy| {
                dy[0] = weight_a(&w, t);
                dy[1] = c_p * (-beta * y[0]).exp();
            },
            0.0,
            t_max,
            &[0.0, 0.0],
            1e-12,
            1e-14,
        )?;

        Ok(WeightedModel {
            n,
            phi,
            weight,
            killing_tangential,
            t_max,
            two_pole,
            truncated: !two_pole,
            params,
            c_p,
            kink: None,
            warnings,
            ray,
        })
    }

    pub fn with_kink(mut self, t: f64) -> Self {
        self.kink = Some(t);
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn params(&self) -> &EpsParams {
        &self.params
    }

    pub fn c_p(&self) -> f64 {
        self.c_p
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn two_pole(&self) -> bool {
        self.two_pole
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn phi(&self, t: f64) -> (f64, f64, f64) {
        self.phi.eval(t)
    }

    /// Radial component a(t) = g(V, gamma') along the ray.
    pub fn a(&self, t: f64) -> f64 {
        weight_a(&self.weight, t)
    }

    pub fn a_prime(&self, t: f64) -> f64 {
        match &self.weight {
            Weight::Zero => 0.0,
            Weight::Gradient(f) => f.eval(t).2,
            Weight::RadialField(a) => a.eval(t).1,
        }
    }

    /// Absolute density f(t) when the weight carries one (gradient or zero).
    pub fn density(&self, t: f64) -> Option<f64> {
        match &self.weight {
            Weight::Zero => Some(0.0),
            Weight::Gradient(f) => Some(f.value(t)),
            Weight::RadialField(_) => None,
        }
    }

    /// Relative density f_{V,p} along the ray.
    pub fn f_vp(&self, t: f64) -> f64 {
        self.ray.component(t.clamp(0.0, self.t_max), 0)
    }

    /// Re-parametrized distance s_V(t).
    pub fn s_v(&self, t: f64) -> f64 {
        self.ray.component(t.clamp(0.0, self.t_max), 1)
    }

    /// Derivative of the re-parametrized distance.
    pub fn s_v_prime(&self, t: f64) -> f64 {
        self.c_p * (-self.params.beta() * self.f_vp(t)).exp()
    }

    /// Re-parametrized cut value tau_V = s_V(T).
    pub fn tau_v(&self) -> f64 {
        self.s_v(self.t_max)
    }

    /// Inverse map t_V(s) by monotone bracketing.
    pub fn t_of_s(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.tau_v());
        if s <= 0.0 {
            return 0.0;
        }
        if s >= self.tau_v() {
            return self.t_max;
        }
        brent_root(|t| self.s_v(t) - s, 0.0, self.t_max, 1e-13).expect("s_v is monotone")
    }

    pub fn ray_weight(&self, grid: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (
            grid.iter().map(|&t| self.f_vp(t)).collect(),
            grid.iter().map(|&t| self.a(t)).collect(),
        )
    }

    pub fn reparametrize(&self, grid: &[f64]) -> (Vec<f64>, f64) {
        (grid.iter().map(|&t| self.s_v(t)).collect(), self.tau_v())
    }

    /// Radial weighted Ricci curvature Ric_V^N(gamma') along the ray.
    pub fn curvature_radial_at(&self, t: f64) -> Result<f64, ModelError> {
        let (p, _, ddp) = self.phi.eval(t);
        if t > 0.0 && t < self.t_max && p <= 0.0 {
            return Err(ModelError::DomainError(format!(
                "warping function non-positive at t = {t}"
            )));
        }
        let nm1 = (self.n - 1) as f64;
        let a = self.a(t);
        let base = -nm1 * ddp / p + self.a_prime(t);
        Ok(base - self.v_sq_term(a))
    }

    fn v_sq_term(&self, v_component: f64) -> f64 {
        use crate::parameters::ExtendedN;
        match self.params.big_n {
            ExtendedN::Infinity => 0.0,
            ExtendedN::Finite(nn) if nn == self.n as f64 => 0.0, // V = 0 enforced
            ExtendedN::Finite(nn) => v_component * v_component / (nn - self.n as f64),
        }
    }

    pub fn curvature_radial(&self, grid: &[f64]) -> Result<Vec<f64>, ModelError> {
        grid.iter().map(|&t| self.curvature_radial_at(t)).collect()
    }

    /// Tangential weighted Ricci curvature for a unit direction orthogonal to
    /// the ray. Only gradient and zero weights carry the full-tensor formula.
    pub fn curvature_tangential_at(&self, t: f64) -> Result<f64, ModelError> {
        if matches!(self.weight, Weight::RadialField(_)) {
            return Err(ModelError::Unsupported(
                "tangential curvature with a general radial field is out of scope; \
                 use the radial hypothesis mode"
                    .into(),
            ));
        }
        let (p, dp, ddp) = self.phi.eval(t);
        let nm2 = (self.n - 2) as f64;
        let a = self.a(t);
        // tangential V* component vanishes for radial V
        Ok(-ddp / p + nm2 * (1.0 - dp * dp) / (p * p) + a * dp / p)
    }

    pub fn curvature_tangential(&self, grid: &[f64]) -> Result<Vec<f64>, ModelError> {
        grid.iter()
            .map(|&t| self.curvature_tangential_at(t))
            .collect()
    }

    /// Weighted Laplacian of the distance function along the ray.
    pub fn weighted_laplacian_at(&self, t: f64) -> f64 {
        let (p, dp, _) = self.phi.eval(t);
        (self.n - 1) as f64 * dp / p - self.a(t)
    }

    pub fn weighted_laplacian(&self, grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|&t| self.weighted_laplacian_at(t)).collect()
    }

    pub fn omega(&self) -> f64 {
        unit_sphere_area(self.n as usize - 1)
    }

    /// Weighted area element theta_V(t) = e^{-f_Vp} phi^{n-1}.
    pub fn theta_v(&self, t: f64) -> f64 {
        (-self.f_vp(t)).exp() * self.phi.value(t).powi(self.n as i32 - 1)
    }

    /// theta_V in the re-parametrized clock.
    pub fn theta_hat(&self, s: f64) -> f64 {
        self.theta_v(self.t_of_s(s))
    }

    /// Measure of the re-parametrized ball B_{V,r} (r in s-units).
    pub fn nu_ball(&self, r: f64) -> f64 {
        let t_up = self.t_of_s(r.min(self.tau_v()));
        self.omega()
            * adaptive_simpson(
                |t| self.theta_v(t) * self.s_v_prime(t),
                0.0,
                t_up,
                1e-10,
                1e-14,
            )
    }

    /// Measure of the metric ball B_r (r in t-units) for the radial case.
    pub fn mu_ball(&self, r: f64) -> f64 {
        self.omega() * adaptive_simpson(|t| self.theta_v(t), 0.0, r.min(self.t_max), 1e-10, 1e-14)
    }

    /// Radial-case model volume integral of the truncated model function
    /// composed with s_V.
    pub fn s_kv(&self, r: f64, mf: &ModelFunctions) -> f64 {
        let p = 1.0 / self.params.c;
        adaptive_simpson(
            |t| mf.s_kappa_truncated(self.s_v(t)).powf(p),
            0.0,
            r.min(self.t_max),
            1e-10,
            1e-14,
        )
    }

    /// Distance from the pole in the conformally deformed metric; the radial
    /// path is minimizing, so this is the re-parametrized distance.
    pub fn conformal_distance(&self, t: f64) -> f64 {
        self.s_v(t)
    }
}

fn weight_a(weight: &Weight, t: f64) -> f64 {
    match weight {
        Weight::Zero => 0.0,
        Weight::Gradient(f) => f.eval(t).1,
        Weight::RadialField(a) => a.value(t),
    }
}
