//! One-dimensional model objects: the Jacobi-equation solution, its first
//! positive zero, the cotangent-type ratio and the model volume integral.

use crate::numerics::{
    adaptive_simpson, brent_root, integrate_dense, CubicSpline, DenseSolution, NumericsError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelFnError {
    #[error("solver failure: {0}")]
    SolverFailure(#[from] NumericsError),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

/// Switch point below which singular ratios use their Taylor series.
pub const SERIES_SWITCH: f64 = 1e-4;

/// Lower-bound profile kappa(s), constant or sampled-with-cubic-interpolation.
#[derive(Debug, Clone)]
pub enum KappaProfile {
    Constant(f64),
    Sampled {
        grid: Vec<f64>,
        values: Vec<f64>,
        spline: CubicSpline,
    },
}

impl KappaProfile {
    pub fn constant(v: f64) -> Self {
        KappaProfile::Constant(v)
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<f64>) -> Result<Self, ModelFnError> {
        if grid.len() < 4 {
            return Err(ModelFnError::InvalidProfile(
                "sampled profile needs at least 4 nodes".into(),
            ));
        }
        if grid[0] != 0.0 {
            return Err(ModelFnError::InvalidProfile(
                "sampled grid must start at s = 0".into(),
            ));
        }
        if !grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(ModelFnError::InvalidProfile(
                "sampled grid must be strictly increasing".into(),
            ));
        }
        if grid.len() != values.len() {
            return Err(ModelFnError::InvalidProfile(
                "grid and values must have equal length".into(),
            ));
        }
        let spline = CubicSpline::new(grid.clone(), values.clone(), None);
        Ok(KappaProfile::Sampled {
            grid,
            values,
            spline,
        })
    }

    /// Evaluation clamps to the last sampled value past the end of the grid.
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            KappaProfile::Constant(v) => *v,
            KappaProfile::Sampled { spline, .. } => spline.eval(s.max(0.0)).0,
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            KappaProfile::Constant(v) => Some(*v),
            KappaProfile::Sampled { .. } => None,
        }
    }

    /// Minimum over the representable data (exact for constants, nodal
    /// minimum for sampled profiles).
    pub fn min_value(&self) -> f64 {
        match self {
            KappaProfile::Constant(v) => *v,
            KappaProfile::Sampled { values, .. } => values.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    /// The delta-rescaled profile s -> e^{-4 delta} kappa(e^{-2 delta} s).
    pub fn rescaled(&self, delta: f64) -> Self {
        let down = (-4.0 * delta).exp();
        let stretch = (2.0 * delta).exp();
        match self {
            KappaProfile::Constant(v) => KappaProfile::Constant(v * down),
            KappaProfile::Sampled { grid, values, .. } => {
                let g: Vec<f64> = grid.iter().map(|s| s * stretch).collect();
                let v: Vec<f64> = values.iter().map(|k| k * down).collect();
                KappaProfile::sampled(g, v).expect("rescaling preserves validity")
            }
        }
    }
}

/// Dense solution of psi'' + kappa psi = 0, psi(0) = 0, psi'(0) = 1, together
/// with its first positive zero (the conjugate value of the model).
#[derive(Debug, Clone)]
pub struct ModelFunctions {
    kappa: KappaProfile,
    c: f64,
    domain_max: f64,
    sol: DenseSolution,
    /// First positive zero, `None` when no zero exists within `domain_max`.
    cut: Option<f64>,
}

/// Default solve domain: guarantees capture of the first zero when kappa has
/// a positive lower bound, otherwise falls back to the caller's span.
pub fn default_domain_max(kappa: &KappaProfile, fallback: f64) -> f64 {
    let eps_floor = 1e-12;
    let kmin = kappa.min_value();
    if kmin > eps_floor {
        4.0 * std::f64::consts::PI / kmin.sqrt()
    } else {
        fallback
    }
}

pub fn solve_model(
    kappa: KappaProfile,
    c: f64,
    domain_max: f64,
) -> Result<ModelFunctions, ModelFnError> {
    if !(domain_max > 0.0) {
        return Err(ModelFnError::DomainError(format!(
            "domain_max must be positive, got {domain_max}"
        )));
    }
    if !(c > 0.0) {
        return Err(ModelFnError::DomainError(format!(
            "constant c must be positive, got {c}"
        )));
    }
    let k = kappa.clone();
    let sol = integrate_dense(
        move |s, y, dy| {
            dy[0] = y[1];
            dy[1] = -k.eval(s) * y[0];
        },
        0.0,
        domain_max,
        &[0.0, 1.0],
        1e-12,
        1e-14,
    )?;

    // First positive zero: bracket on accepted steps, refine by Brent on the
    // dense output.
    let mut cut = None;
    for step in sol.steps() {
        if step.t0 + step.h < 1e-10 {
            continue;
        }
        let lo = step.t0.max(1e-10);
        let hi = step.t0 + step.h;
        let f_lo = sol.component(lo, 0);
        let f_hi = sol.component(hi, 0);
        if f_lo > 0.0 && f_hi <= 0.0 {
            let root = brent_root(|s| sol.component(s, 0), lo, hi, 1e-12)
                .map_err(NumericsError::from)?;
            cut = Some(root);
            break;
        }
    }

    Ok(ModelFunctions {
        kappa,
        c,
        domain_max,
        sol,
        cut,
    })
}

impl ModelFunctions {
    pub fn kappa(&self) -> &KappaProfile {
        &self.kappa
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    /// First positive zero of the solution; `None` means none within
    /// `domain_max` (reported as +infinity).
    pub fn cut_value(&self) -> Option<f64> {
        self.cut
    }

    pub fn s_kappa(&self, s: f64) -> f64 {
        self.sol.component(s, 0)
    }

    pub fn ds_kappa(&self, s: f64) -> f64 {
        self.sol.component(s, 1)
    }

    /// Truncated solution: exact zero at and past the first zero.
    pub fn s_kappa_truncated(&self, s: f64) -> f64 {
        match self.cut {
            Some(c) if s >= c => 0.0,
            _ => self.s_kappa(s).max(0.0),
        }
    }

    fn check_domain(&self, s: f64) -> Result<(), ModelFnError> {
        if s <= 0.0 {
            return Err(ModelFnError::DomainError(format!("s = {s} <= 0")));
        }
        if let Some(c) = self.cut {
            if s >= c {
                return Err(ModelFnError::DomainError(format!(
                    "s = {s} >= first zero {c}"
                )));
            }
        }
        if s > self.domain_max {
            return Err(ModelFnError::DomainError(format!(
                "s = {s} beyond solved domain {0}",
                self.domain_max
            )));
        }
        Ok(())
    }

    /// The ratio psi'/psi; a Taylor series takes over below the switch point
    /// to avoid the 0/0 at the pole.
    pub fn cot_kappa(&self, s: f64) -> Result<f64, ModelFnError> {
        self.check_domain(s)?;
        if s < SERIES_SWITCH {
            Ok(1.0 / s - self.kappa.eval(0.0) * s / 3.0)
        } else {
            let y = self.sol.eval(s);
            Ok(y[1] / y[0])
        }
    }

    /// c^{-1}-scaled ratio.
    pub fn h_kappa(&self, s: f64) -> Result<f64, ModelFnError> {
        Ok(self.cot_kappa(s)? / self.c)
    }

    /// Integral of the truncated solution raised to 1/c over [0, r].
    pub fn model_volume(&self, r: f64) -> Result<f64, ModelFnError> {
        if r < 0.0 {
            return Err(ModelFnError::DomainError(format!("radius {r} < 0")));
        }
        let upper = match self.cut {
            Some(c) => r.min(c),
            None => r,
        };
        if upper > self.domain_max + 1e-12 {
            return Err(ModelFnError::DomainError(format!(
                "radius {r} beyond solved domain {0} with no zero found",
                self.domain_max
            )));
        }
        let p = 1.0 / self.c;
        let v = adaptive_simpson(
            |s| self.s_kappa_truncated(s).powf(p),
            0.0,
            upper.min(self.domain_max),
            1e-10,
            1e-14,
        );
        Ok(v)
    }

    /// True iff both kappa and the solution are symmetric about the midpoint
    /// of [0, first zero] on a probe grid, to tolerance 1e-8.
    pub fn check_symmetry(&self) -> Result<bool, ModelFnError> {
        let cut = self.cut.ok_or_else(|| {
            ModelFnError::DomainError("symmetry check needs a finite first zero".into())
        })?;
        let tol = 1e-8;
        let m = 257;
        for i in 0..=m {
            let s = cut * i as f64 / m as f64;
            if (self.kappa.eval(s) - self.kappa.eval(cut - s)).abs() > tol {
                return Ok(false);
            }
            if (self.s_kappa(s) - self.s_kappa(cut - s)).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
