//! Shared numerical kernels: adaptive Dormand-Prince integration with dense
//! output, adaptive Simpson quadrature, Brent root bracketing, cubic splines
//! and probe-grid helpers.
//!
//! Everything downstream (model functions, ray data, comparison margins)
//! inherits its accuracy from this module, so tolerances here are kept one
//! to two orders tighter than the check tolerances used by callers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("ODE solver failed: {0}")]
    SolverFailure(String),
    #[error("quadrature failed to converge on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64 },
    #[error("root not bracketed on [{a}, {b}]")]
    NoBracket { a: f64, b: f64 },
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];
// Dense-output weights (Hairer-Norsett-Wanner, DOPRI5 CONTD5).
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step with its order-4 continuous extension.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    rcont: [Vec<f64>; 5],
}

impl DenseStep {
    fn eval_into(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t0) / self.h;
        let th1 = 1.0 - theta;
        for i in 0..out.len() {
            out[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + th1
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + th1 * self.rcont[4][i])));
        }
    }
}

/// Dense-output solution of an ODE system on [t0, t_end].
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub t0: f64,
    pub t_end: f64,
    steps: Vec<DenseStep>,
    dim: usize,
}

impl DenseSolution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> &[DenseStep] {
        &self.steps
    }

    /// Evaluate the interpolated solution; `t` is clamped to the solved span.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let t = t.clamp(self.t0.min(self.t_end), self.t0.max(self.t_end));
        let idx = match self
            .steps
            .binary_search_by(|s| s.t0.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        self.steps[idx].eval_into(t, out);
    }

    pub fn component(&self, t: f64, i: usize) -> f64 {
        self.eval(t)[i]
    }
}

/// Adaptive Dormand-Prince 5(4) with FSAL and dense output.
pub fn integrate_dense<F>(
    f: F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<DenseSolution, NumericsError>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let span = t_end - t0;
    assert!(span > 0.0, "integration span must be positive");
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    f(t, &y, &mut k[0]);
    let mut h = (span * 1e-4).clamp(1e-10, span);
    let mut steps = Vec::new();
    let mut ytmp = vec![0.0; dim];
    let mut y1 = vec![0.0; dim];
    let max_steps = 2_000_000usize;
    let mut nsteps = 0usize;

    while t < t_end {
        nsteps += 1;
        if nsteps > max_steps {
            return Err(NumericsError::SolverFailure(format!(
                "step budget exhausted at t = {t}"
            )));
        }
        if t + h > t_end {
            h = t_end - t;
        }
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            f(t + C[s] * h, &ytmp, &mut k[s]);
        }
        for i in 0..dim {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate() {
                acc += B[j] * kj[i];
            }
            y1[i] = y[i] + h * acc;
        }
        // k[6] was evaluated at (t+h, y1) because A[6] row equals B.
        let mut err = 0.0f64;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += (B[j] - B4[j]) * kj[i];
            }
            let sc = atol + rtol * y[i].abs().max(y1[i].abs());
            let r = h * e / sc;
            err += r * r;
        }
        err = (err / dim as f64).sqrt();

        if err <= 1.0 {
            // accept: build continuous extension
            let mut rcont: [Vec<f64>; 5] = [
                y.clone(),
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
                vec![0.0; dim],
            ];
            for i in 0..dim {
                let ydiff = y1[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k[6][i] - bspl;
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    acc += D[j] * kj[i];
                }
                rcont[4][i] = h * acc;
            }
            steps.push(DenseStep {
                t0: t,
                h,
                y0: y.clone(),
                y1: y1.clone(),
                rcont,
            });
            t += h;
            y.copy_from_slice(&y1);
            k.swap(0, 6); // FSAL
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            h *= fac;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= fac;
            if h < 1e-14 * span.abs().max(1.0) {
                return Err(NumericsError::SolverFailure(format!(
                    "step size underflow at t = {t}"
                )));
            }
        }
    }

    Ok(DenseSolution {
        t0,
        t_end,
        steps,
        dim,
    })
}

/// Adaptive Simpson quadrature with interval-local error control.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth >= 52 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
        }
    }
    // First pass with a crude estimate to seed the relative tolerance.
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let tol = abs_tol.max(rel_tol * whole.abs());
    recurse(&f, a, b, fa, fm, fb, whole, tol.max(1e-300), 0)
}

/// Brent's method on a bracketing interval.
pub fn brent_root<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(NumericsError::NoBracket { a, b });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    let mut s = b;
    for _ in 0..200 {
        s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let cond_range = {
            let lo = (3.0 * a + b) / 4.0;
            !((lo.min(b) < s) && (s < lo.max(b)))
        };
        let cond_flag = if mflag {
            (s - b).abs() >= (b - c).abs() / 2.0
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0
        };
        if cond_range || cond_flag {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
        if fb == 0.0 || (b - a).abs() < tol {
            return Ok(b);
        }
    }
    Ok(s)
}

/// Clamped or natural cubic spline with joint (value, d1, d2) evaluation.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at nodes
}

impl CubicSpline {
    /// `endpoint_derivs = Some((d0, dn))` clamps the boundary slopes;
    /// `None` uses the natural spline.
    pub fn new(x: Vec<f64>, y: Vec<f64>, endpoint_derivs: Option<(f64, f64)>) -> Self {
        let n = x.len();
        assert!(n >= 3, "spline needs at least 3 nodes");
        assert_eq!(n, y.len());
        assert!(
            x.windows(2).all(|w| w[1] > w[0]),
            "spline nodes must be strictly increasing"
        );
        // Tridiagonal system for second derivatives.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            sub[i] = h0;
            diag[i] = 2.0 * (h0 + h1);
            sup[i] = h1;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        match endpoint_derivs {
            Some((d0, dn)) => {
                let h0 = x[1] - x[0];
                diag[0] = 2.0 * h0;
                sup[0] = h0;
                rhs[0] = 6.0 * ((y[1] - y[0]) / h0 - d0);
                let hn = x[n - 1] - x[n - 2];
                sub[n - 1] = hn;
                diag[n - 1] = 2.0 * hn;
                rhs[n - 1] = 6.0 * (dn - (y[n - 1] - y[n - 2]) / hn);
            }
            None => {
                diag[0] = 1.0;
                diag[n - 1] = 1.0;
            }
        }
        // Thomas algorithm.
        let mut m = vec![0.0; n];
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = sup[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for i in 1..n {
            let den = diag[i] - sub[i] * cp[i - 1];
            cp[i] = sup[i] / den;
            dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / den;
        }
        m[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = dp[i] - cp[i] * m[i + 1];
        }
        CubicSpline { x, y, m }
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    /// Returns (value, first derivative, second derivative).
    /// Evaluation outside the node span clamps to the nearest endpoint value.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        if t <= self.x[0] {
            if t < self.x[0] {
                return (self.y[0], 0.0, 0.0);
            }
        } else if t >= self.x[n - 1] {
            if t > self.x[n - 1] {
                return (self.y[n - 1], 0.0, 0.0);
            }
        }
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let v = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0;
        let d1 = (self.y[i + 1] - self.y[i]) / h
            - (3.0 * a * a - 1.0) / 6.0 * h * self.m[i]
            + (3.0 * b * b - 1.0) / 6.0 * h * self.m[i + 1];
        let d2 = a * self.m[i] + b * self.m[i + 1];
        (v, d1, d2)
    }
}

/// Interior Chebyshev points on [lo, hi]: dense near both endpoints,
/// never touching them.
pub fn chebyshev_probes(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let n = count + 1;
    (1..n)
        .map(|j| {
            let theta = std::f64::consts::PI * j as f64 / n as f64;
            lo + (hi - lo) * 0.5 * (1.0 - theta.cos())
        })
        .collect()
}

/// Surface area of the unit (d)-sphere in R^{d+1}.
pub fn unit_sphere_area(d: usize) -> f64 {
    // s_0 = 2, s_1 = 2*pi, s_d = 2*pi/(d-1) * s_{d-2}
    match d {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (d as f64 - 1.0) * unit_sphere_area(d - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dopri5_exponential() {
        let sol = integrate_dense(|_, y, dy| dy[0] = y[0], 0.0, 2.0, &[1.0], 1e-12, 1e-12).unwrap();
        for &t in &[0.1, 0.5, 1.0, 1.7, 2.0] {
            assert!((sol.component(t, 0) - t.exp()).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn dopri5_harmonic_dense_output() {
        let sol = integrate_dense(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            10.0,
            &[0.0, 1.0],
            1e-12,
            1e-12,
        )
        .unwrap();
        let mut max_err = 0.0f64;
        for k in 0..=1000 {
            let t = 10.0 * k as f64 / 1000.0;
            let y = sol.eval(t);
            max_err = max_err.max((y[0] - t.sin()).abs()).max((y[1] - t.cos()).abs());
        }
        assert!(max_err < 1e-10, "max_err={max_err:.3e}");
    }

    #[test]
    fn simpson_smooth() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 1e-14);
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(|x| (-x).exp(), 0.0, 30.0, 1e-11, 1e-14);
        assert!((v - (1.0 - (-30.0f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn brent_cosine() {
        let r = brent_root(|x| x.cos(), 1.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn spline_reproduces_cubic() {
        let x: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|&t| t * t * t - t).collect();
        let sp = CubicSpline::new(x, y, Some((-1.0, 3.0 * 4.0 - 1.0)));
        for &t in &[0.05, 0.55, 1.23, 1.91] {
            let (v, d1, _) = sp.eval(t);
            assert!((v - (t * t * t - t)).abs() < 5e-4);
            assert!((d1 - (3.0 * t * t - 1.0)).abs() < 5e-3);
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 2.0 * std::f64::consts::PI * std::f64::consts::PI).abs() < 1e-13);
    }
}
