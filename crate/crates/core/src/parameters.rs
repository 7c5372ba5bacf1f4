//! Admissible parameter ranges for the effective-dimension parameter and the
//! interpolation exponent, plus the derived constants that scale every
//! comparison formula.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("parameter range violation: {0}")]
    RangeViolation(String),
    #[error("base-point constant must be positive, got {0}")]
    NonPositive(f64),
}

/// Effective dimension: a finite real in ]-inf,1] u [n,+inf[, or +infinity
/// as a first-class state (never a sentinel float).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedN {
    Finite(f64),
    Infinity,
}

impl ExtendedN {
    pub fn is_one(&self) -> bool {
        matches!(self, ExtendedN::Finite(v) if *v == 1.0)
    }

    pub fn equals(&self, v: f64) -> bool {
        matches!(self, ExtendedN::Finite(x) if *x == v)
    }
}

impl std::fmt::Display for ExtendedN {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedN::Finite(v) => write!(f, "{v}"),
            ExtendedN::Infinity => write!(f, "inf"),
        }
    }
}

/// Validated parameter tuple with the derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsParams {
    pub n: u32,
    pub big_n: ExtendedN,
    pub eps: f64,
    /// (N-1)/(N-n), the square of the admissible half-width; 1 at N = +inf.
    pub eps0: f64,
    /// The scaling constant in ]0,1]: (1/(n-1)) (1 - eps^2 (N-n)/(N-1)).
    pub c: f64,
    /// N = n forces the vector field to vanish downstream.
    pub requires_zero_v: bool,
}

impl EpsParams {
    /// Interpolation-exponent weight 2(1-eps)/(n-1) that multiplies the
    /// density in every conformal factor.
    pub fn beta(&self) -> f64 {
        2.0 * (1.0 - self.eps) / (self.n as f64 - 1.0)
    }
}

/// Validates (n, N, eps) against the admissible range and derives eps0 and c.
pub fn validate_range(n: u32, big_n: ExtendedN, eps: f64) -> Result<EpsParams, ParamError> {
    if n < 2 {
        return Err(ParamError::RangeViolation(format!(
            "dimension must be >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    if let ExtendedN::Finite(v) = big_n {
        if !v.is_finite() {
            return Err(ParamError::RangeViolation(
                "finite N must be a finite real (use \"inf\" for +infinity)".into(),
            ));
        }
        if v > 1.0 && v < nf {
            return Err(ParamError::RangeViolation(format!(
                "N = {v} lies in the excluded interval ]1, {nf}["
            )));
        }
    }

    let is_n = big_n.equals(nf);
    let is_one = big_n.is_one();

    let eps0 = match big_n {
        ExtendedN::Infinity => 1.0,
        // eps is pinned to 0 at N = 1 and unrestricted at N = n.
        ExtendedN::Finite(_) if is_one => 0.0,
        ExtendedN::Finite(_) if is_n => f64::INFINITY,
        ExtendedN::Finite(v) => (v - 1.0) / (v - nf),
    };

    if is_one {
        if eps != 0.0 {
            return Err(ParamError::RangeViolation(format!(
                "eps must be 0 when N = 1, got {eps}"
            )));
        }
    } else if !is_n {
        // open interval ]-sqrt(eps0), sqrt(eps0)[
        if !(eps.abs() < eps0.sqrt()) {
            return Err(ParamError::RangeViolation(format!(
                "eps = {eps} outside the open interval ]-{0}, {0}[ for N = {big_n}",
                eps0.sqrt()
            )));
        }
    }
    // N = n: eps unrestricted.

    let c = if is_one || is_n {
        1.0 / (nf - 1.0)
    } else {
        let factor = match big_n {
            ExtendedN::Infinity => 1.0,
            ExtendedN::Finite(v) => (v - nf) / (v - 1.0),
        };
        (1.0 - eps * eps * factor) / (nf - 1.0)
    };
    if !(c > 0.0) {
        return Err(ParamError::RangeViolation(format!(
            "derived constant c = {c} is not positive"
        )));
    }

    Ok(EpsParams {
        n,
        big_n,
        eps,
        eps0,
        c,
        requires_zero_v: is_n,
    })
}

/// How the base-point constant is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CpMode {
    /// exp(-2(1-eps) f(p) / (n-1)), the canonical choice for gradient weights.
    Gradient,
    /// Any positive constant supplied by the user.
    Free(f64),
}

pub fn base_point_constant(params: &EpsParams, f_at_p: f64, mode: CpMode) -> Result<f64, ParamError> {
    match mode {
        CpMode::Gradient => Ok((-params.beta() * f_at_p).exp()),
        CpMode::Free(v) => {
            if v > 0.0 {
                Ok(v)
            } else {
                Err(ParamError::NonPositive(v))
            }
        }
    }
}
