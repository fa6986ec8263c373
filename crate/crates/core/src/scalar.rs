//! Complex scalars, the tolerance policy, and the small root finders the
//! classification pipeline leans on.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// All algebra in the crate runs over double precision complex numbers.
pub type Scalar = num_complex::Complex64;

pub const ZERO: Scalar = Scalar::new(0.0, 0.0);
pub const ONE: Scalar = Scalar::new(1.0, 0.0);
pub const I: Scalar = Scalar::new(0.0, 1.0);

#[inline]
pub fn real(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// Tolerance policy. Every field is strictly positive.
///
/// `eq_tol` is relative: two values agree when `|x - y| <= eq_tol * max(1, |x|, |y|)`.
/// `rank_tol` is a ratio to the largest singular value.
/// `residual_tol` is the pass threshold for verification residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub rank_tol: f64,
    pub root_tol: f64,
    pub residual_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_tol: 1e-9,
            rank_tol: 1e-8,
            root_tol: 1e-12,
            residual_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, rank_tol: f64, root_tol: f64, residual_tol: f64) -> Result<Self> {
        let t = Tolerance {
            eq_tol,
            rank_tol,
            root_tol,
            residual_tol,
        };
        t.validate()?;
        Ok(t)
    }

    /// Scale the equality and residual thresholds together, keeping the others.
    pub fn with_eq(self, eq_tol: f64) -> Result<Self> {
        Tolerance::new(eq_tol, self.rank_tol, self.root_tol, eq_tol.max(self.residual_tol))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eq_tol", self.eq_tol),
            ("rank_tol", self.rank_tol),
            ("root_tol", self.root_tol),
            ("residual_tol", self.residual_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!("{name} = {v}")));
            }
        }
        Ok(())
    }

    pub fn close(&self, x: Scalar, y: Scalar) -> bool {
        (x - y).norm() <= self.eq_tol * 1f64.max(x.norm()).max(y.norm())
    }

    /// Zero test against an explicit scale.
    pub fn negligible(&self, x: Scalar, scale: f64) -> bool {
        x.norm() <= self.eq_tol * scale.max(1.0)
    }
}

pub fn finite(x: Scalar, ctx: &'static str) -> Result<Scalar> {
    if x.re.is_finite() && x.im.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(ctx))
    }
}

/// Division that refuses to hand back a NaN or infinity.
pub fn div(num: Scalar, den: Scalar, ctx: &'static str) -> Result<Scalar> {
    if den.norm() == 0.0 {
        return Err(Error::NonFinite(ctx));
    }
    finite(num / den, ctx)
}

/// Horner evaluation, coefficients from the leading term down.
pub fn horner(coeffs: &[Scalar], x: Scalar) -> Scalar {
    coeffs.iter().fold(ZERO, |acc, &c| acc * x + c)
}

fn derivative(coeffs: &[Scalar]) -> Vec<Scalar> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(k, &c)| c * (n - k) as f64)
        .collect()
}

fn newton(coeffs: &[Scalar], mut x: Scalar, steps: usize) -> Scalar {
    let d = derivative(coeffs);
    for _ in 0..steps {
        let fx = horner(coeffs, x);
        let dx = horner(&d, x);
        if dx.norm() == 0.0 {
            break;
        }
        let step = fx / dx;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        let next = x - step;
        if horner(coeffs, next).norm() > fx.norm() {
            break;
        }
        x = next;
        if step.norm() <= f64::EPSILON * x.norm().max(1.0) {
            break;
        }
    }
    x
}

fn by_re_im(a: &Scalar, b: &Scalar) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Roots of `c2 x^2 + c1 x + c0`, sorted by real part then imaginary part.
pub fn solve_quadratic(c2: Scalar, c1: Scalar, c0: Scalar, tol: &Tolerance) -> Result<(Scalar, Scalar)> {
    let scale = c2.norm() + c1.norm() + c0.norm();
    if c2.norm() <= tol.eq_tol * scale || scale == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    let s = if (c1 + disc).norm() >= (c1 - disc).norm() {
        c1 + disc
    } else {
        c1 - disc
    };
    let m = -0.5 * s;
    let (r1, r2) = if m.norm() == 0.0 {
        (ZERO, ZERO)
    } else {
        (m / c2, c0 / m)
    };
    let coeffs = [c2, c1, c0];
    let mut roots = [
        newton(&coeffs, finite(r1, "quadratic root")?, 3),
        newton(&coeffs, finite(r2, "quadratic root")?, 3),
    ];
    roots.sort_by(by_re_im);
    Ok((roots[0], roots[1]))
}

/// Solve `q^2 + q^-2 = c` for real `c` with the normalization `Re q >= 0`, `Im q >= 0`.
///
/// For `-2 <= c <= 2` the root sits on the unit circle, for `c > 2` it is real and at least 1.
/// Below -2 the answer is `i * sqrt(t)` with `t >= 1`.
pub fn principal_q_from_c(c: Scalar, tol: &Tolerance) -> Result<Scalar> {
    if c.im.abs() > tol.eq_tol * c.norm().max(1.0) {
        return Err(Error::NonRealInput(format!("{c}")));
    }
    let x = c.re;
    if !x.is_finite() {
        return Err(Error::NonFinite("principal_q_from_c"));
    }
    if (x - 2.0).abs() <= tol.eq_tol * x.abs().max(1.0) {
        return Ok(ONE);
    }
    if x.abs() <= 2.0 {
        let theta = (x / 2.0).acos();
        return Ok(Scalar::from_polar(1.0, theta / 2.0));
    }
    let t = (x.abs() + (x * x - 4.0).sqrt()) / 2.0;
    Ok(if x > 2.0 { real(t.sqrt()) } else { I * t.sqrt() })
}

/// Largest real root of a polynomial given from its leading coefficient down.
pub fn largest_real_root(coeffs: &[Scalar], tol: &Tolerance) -> Result<Scalar> {
    let scale: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let start = coeffs
        .iter()
        .position(|c| c.norm() > tol.root_tol * scale)
        .ok_or(Error::NoRealRoot)?;
    let p = &coeffs[start..];
    let n = p.len() - 1;
    if n == 0 {
        return Err(Error::NoRealRoot);
    }
    let lead = p[0];
    let mut comp = DMatrix::<Complex<f64>>::zeros(n, n);
    for j in 0..n {
        comp[(0, j)] = -p[j + 1] / lead;
    }
    for i in 1..n {
        comp[(i, i - 1)] = ONE;
    }
    let eig = comp
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::InvariantViolation("companion Schur form not triangular".into()))?;
    eig.iter()
        .map(|&z| newton(p, z, 50))
        .filter(|z| z.im.abs() <= 1e-7 * z.norm().max(1.0))
        .map(|z| newton(p, real(z.re), 50))
        .map(|z| real(z.re))
        .max_by(|a, b| a.re.total_cmp(&b.re))
        .ok_or(Error::NoRealRoot)
}

/// The loop value of the depth-3 point: largest root of `d^3 - 2 d^2 - d + 1`.
pub fn depth3_delta() -> f64 {
    let tol = Tolerance::default();
    largest_real_root(&[ONE, real(-2.0), real(-1.0), ONE], &tol)
        .map(|z| z.re)
        .unwrap_or(2.246_979_603_717_467)
}
