//! The three dimensional 2-box spaces: structure constants, rotation,
//! caps, and the BMW braid element built from them.
//!
//! Basis order is `(e, P1, P2)` with `tr(P1) <= tr(P2)`. The two shadings share
//! one set of constants; [`BoxVec`] carries a [`Side`] tag for bookkeeping.

use std::ops::{Add, Mul, Neg, Sub};

use crate::classify::{self, Case};
use crate::error::{Error, Result};
use crate::scalar::{self, real, Scalar, Tolerance, ONE, ZERO};

/// Shading of the region next to the `$` marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    /// Flip `n` times.
    pub fn flip_by(self, n: usize) -> Side {
        if n.is_multiple_of(2) {
            self
        } else {
            self.flip()
        }
    }
}

/// Chirality sign of the rotation on the uncappable line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_int(s: i32) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// 3x3 complex matrix acting on coefficient triples.
pub type Mat3 = [[Scalar; 3]; 3];

pub fn mat_vec(m: &Mat3, v: &[Scalar; 3]) -> [Scalar; 3] {
    std::array::from_fn(|i| (0..3).map(|j| m[i][j] * v[j]).sum())
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub const IDENTITY3: Mat3 = [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]];

/// An element of a 2-box space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxVec {
    pub side: Side,
    pub coeffs: [Scalar; 3],
}

impl BoxVec {
    pub fn new(side: Side, coeffs: [Scalar; 3]) -> Self {
        BoxVec { side, coeffs }
    }

    pub fn zero(side: Side) -> Self {
        BoxVec::new(side, [ZERO; 3])
    }

    pub fn e(side: Side) -> Self {
        BoxVec::new(side, [ONE, ZERO, ZERO])
    }

    pub fn p1(side: Side) -> Self {
        BoxVec::new(side, [ZERO, ONE, ZERO])
    }

    pub fn p2(side: Side) -> Self {
        BoxVec::new(side, [ZERO, ZERO, ONE])
    }

    pub fn id(side: Side) -> Self {
        BoxVec::new(side, [ONE; 3])
    }

    pub fn basis(side: Side, i: usize) -> Self {
        let mut c = [ZERO; 3];
        c[i] = ONE;
        BoxVec::new(side, c)
    }

    pub fn scale(self, s: Scalar) -> Self {
        BoxVec::new(self.side, self.coeffs.map(|c| c * s))
    }

    pub fn on_side(self, side: Side) -> Self {
        BoxVec::new(side, self.coeffs)
    }

    pub fn conj_coeffs(self) -> Self {
        BoxVec::new(self.side, self.coeffs.map(|c| c.conj()))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check(&self, other: &BoxVec) -> Result<()> {
        if self.side == other.side {
            Ok(())
        } else {
            Err(Error::SideMismatch)
        }
    }

    pub fn try_add(self, other: BoxVec) -> Result<BoxVec> {
        self.check(&other)?;
        Ok(self + other)
    }
}

impl Add for BoxVec {
    type Output = BoxVec;
    /// Panics in debug builds on a side mismatch; use [`BoxVec::try_add`] for checked addition.
    fn add(self, o: BoxVec) -> BoxVec {
        debug_assert_eq!(self.side, o.side);
        BoxVec::new(self.side, std::array::from_fn(|i| self.coeffs[i] + o.coeffs[i]))
    }
}

impl Sub for BoxVec {
    type Output = BoxVec;
    fn sub(self, o: BoxVec) -> BoxVec {
        self + (-o)
    }
}

impl Neg for BoxVec {
    type Output = BoxVec;
    fn neg(self) -> BoxVec {
        self.scale(-ONE)
    }
}

impl Mul<BoxVec> for Scalar {
    type Output = BoxVec;
    fn mul(self, v: BoxVec) -> BoxVec {
        v.scale(self)
    }
}

/// Structure constants of the 2-box spaces at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBoxModel {
    delta: Scalar,
    a: Scalar,
    b: Scalar,
    sigma: Sign,
    product_table: [[[Scalar; 3]; 3]; 3],
    coproduct_table: [[[Scalar; 3]; 3]; 3],
    trace_vec: [Scalar; 3],
    rotation: Mat3,
    conj: Mat3,
    tol: Tolerance,
}

impl TwoBoxModel {
    /// Model at a classification point: traces from the chirality branch.
    pub fn from_classification_data(delta: f64, sigma: Sign, tol: &Tolerance) -> Result<Self> {
        if !(delta.is_finite() && delta > 1.0) {
            return Err(Error::InadmissibleDelta(delta));
        }
        match (sigma, classify::admissible_check(delta, tol)) {
            (Sign::Plus, Ok(Case::Depth3)) => {}
            (Sign::Plus, _) => return Err(Error::ChiralityMismatch(delta)),
            (Sign::Minus, Ok(Case::Sp4 { .. })) => {}
            (Sign::Minus, _) => return Err(Error::InadmissibleDelta(delta)),
        }
        let sol = classify::solve_delta(delta, sigma, tol)?;
        TwoBoxModel::from_traces(real(delta), sol.a, sol.b, sigma, tol)
    }

    /// Model from raw data `(delta, a, b, sigma)` with no locus checks.
    ///
    /// Off the locus the tables are still well defined; the chirality
    /// residual then measures how far the point is from consistency.
    pub fn from_traces(delta: Scalar, a: Scalar, b: Scalar, sigma: Sign, tol: &Tolerance) -> Result<Self> {
        tol.validate()?;
        let d = delta;
        let bad = |s: &str| Error::DegenerateParameters(s.to_string());
        if d.norm() == 0.0 || b.norm() == 0.0 || (a + b).norm() == 0.0 {
            return Err(bad("delta, b and a+b must be nonzero"));
        }
        let s = real(sigma.value());
        let db = d * b;

        let mut product_table = [[[ZERO; 3]; 3]; 3];
        for (i, row) in product_table.iter_mut().enumerate() {
            row[i][i] = ONE;
        }

        let mut cop = [[[ZERO; 3]; 3]; 3];
        let unit = ONE / d;
        for (i, row) in cop.iter_mut().enumerate() {
            row[0][i] = unit;
        }
        for (i, cell) in cop[0].iter_mut().enumerate() {
            cell[i] = unit;
        }
        cop[1][1] = [a / d, ZERO, (a * a - a) / db];
        let p12 = [ZERO, (a - ONE) / d, (a * b - a * a + a) / db];
        cop[1][2] = p12;
        cop[2][1] = p12;
        cop[2][2] = [b / d, (b - a + ONE) / d, (b * b - b - a * b + a * a - a) / db];

        let ab = a + b;
        let dd = d - ONE / d;
        let rotation: Mat3 = [
            [ONE / d, a * dd / ab, b * dd / ab],
            [ONE / d, (-a / d + s * b) / ab, (-b / d - s * b) / ab],
            [ONE / d, (-a / d - s * a) / ab, (-b / d + s * a) / ab],
        ];
        let conj = mat_mul(&rotation, &rotation);
        let m = TwoBoxModel {
            delta,
            a,
            b,
            sigma,
            product_table,
            coproduct_table: cop,
            trace_vec: [ONE, a, b],
            rotation,
            conj,
            tol: *tol,
        };
        for row in m.rotation.iter().chain(m.coproduct_table.iter().flatten()) {
            for &c in row {
                scalar::finite(c, "two-box tables")?;
            }
        }
        Ok(m)
    }

    pub fn delta(&self) -> Scalar {
        self.delta
    }
    pub fn a(&self) -> Scalar {
        self.a
    }
    pub fn b(&self) -> Scalar {
        self.b
    }
    pub fn sigma(&self) -> Sign {
        self.sigma
    }
    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }
    pub fn trace_vec(&self) -> [Scalar; 3] {
        self.trace_vec
    }
    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }
    pub fn conj_matrix(&self) -> &Mat3 {
        &self.conj
    }
    pub fn product_table(&self) -> &[[[Scalar; 3]; 3]; 3] {
        &self.product_table
    }
    pub fn coproduct_table(&self) -> &[[[Scalar; 3]; 3]; 3] {
        &self.coproduct_table
    }

    fn bilinear(table: &[[[Scalar; 3]; 3]; 3], x: &BoxVec, y: &BoxVec) -> Result<BoxVec> {
        x.check(y)?;
        let mut out = [ZERO; 3];
        for (xi, row) in x.coeffs.iter().zip(table) {
            for (yj, cell) in y.coeffs.iter().zip(row) {
                let c = xi * yj;
                if c != ZERO {
                    for (o, t) in out.iter_mut().zip(cell) {
                        *o += c * t;
                    }
                }
            }
        }
        Ok(BoxVec::new(x.side, out))
    }

    pub fn product(&self, x: &BoxVec, y: &BoxVec) -> Result<BoxVec> {
        Self::bilinear(&self.product_table, x, y)
    }

    pub fn coproduct(&self, x: &BoxVec, y: &BoxVec) -> Result<BoxVec> {
        Self::bilinear(&self.coproduct_table, x, y)
    }

    /// One click of the rotation; flips the side.
    pub fn rotate(&self, x: &BoxVec) -> BoxVec {
        BoxVec::new(x.side.flip(), mat_vec(&self.rotation, &x.coeffs))
    }

    pub fn rotate_by(&self, x: &BoxVec, clicks: usize) -> BoxVec {
        (0..clicks % 4).fold(*x, |acc, _| self.rotate(&acc))
    }

    /// Two clicks.
    pub fn conjugate(&self, x: &BoxVec) -> BoxVec {
        BoxVec::new(x.side, mat_vec(&self.conj, &x.coeffs))
    }

    pub fn trace(&self, x: &BoxVec) -> Scalar {
        (0..3).map(|i| x.coeffs[i] * self.trace_vec[i]).sum()
    }

    /// Coefficient-level trace for raw triples.
    pub fn trace_coeffs(&self, c: &[Scalar; 3]) -> Scalar {
        (0..3).map(|i| c[i] * self.trace_vec[i]).sum()
    }

    /// Close the boundary pair sitting in gap `pair` (gaps counted
    /// counterclockwise from the `$` region, gap `g` between points `g-1` and `g`).
    ///
    /// Gap 2 is the right closure, `tr(x)/delta`.
    pub fn cap(&self, x: &BoxVec, pair: usize) -> Result<Scalar> {
        if pair > 3 {
            return Err(Error::BadCapPair(pair));
        }
        Ok(self.cap_coeffs(&x.coeffs, pair))
    }

    pub(crate) fn cap_coeffs(&self, c: &[Scalar; 3], pair: usize) -> Scalar {
        let v = if pair.is_multiple_of(2) {
            *c
        } else {
            mat_vec(&self.rotation, c)
        };
        self.trace_coeffs(&v) / self.delta
    }

    /// `sqrt(tr(x* x))` using the trace weights.
    pub fn norm(&self, x: &BoxVec) -> f64 {
        (0..3)
            .map(|i| x.coeffs[i].norm_sqr() * self.trace_vec[i].norm())
            .sum::<f64>()
            .sqrt()
    }

    /// `T = b P1 - a P2`, the uncappable element.
    pub fn t_element(&self, side: Side) -> BoxVec {
        BoxVec::new(side, [ZERO, self.b, -self.a])
    }

    /// Normalized generator `G = T / sqrt(a b (a + b))`, an eigenvector of the rotation.
    pub fn generator(&self, side: Side) -> BoxVec {
        self.t_element(side).scale(ONE / self.g_scale())
    }

    pub(crate) fn g_scale(&self) -> Scalar {
        (self.a * self.b * (self.a + self.b)).sqrt()
    }

    /// Coordinates of `x` over `(id, e, G)`.
    pub fn decompose(&self, x: &BoxVec) -> [Scalar; 3] {
        let [ce, c1, c2] = x.coeffs;
        let s = self.a + self.b;
        let alpha = (self.a * c1 + self.b * c2) / s;
        let gamma_t = (c1 - c2) / s;
        [alpha, ce - alpha, gamma_t * self.g_scale()]
    }

    /// Inverse of [`TwoBoxModel::decompose`].
    pub fn compose(&self, side: Side, idg: [Scalar; 3]) -> BoxVec {
        BoxVec::id(side).scale(idg[0]) + BoxVec::e(side).scale(idg[1]) + self.generator(side).scale(idg[2])
    }

    /// `|| T*T - [ab(delta e - delta^-1 id) + sigma (b - a) T] ||`.
    pub fn chirality_residual(&self) -> f64 {
        let side = Side::Plus;
        let t = self.t_element(side);
        let lhs = self.coproduct(&t, &t).expect("same side");
        let d = self.delta;
        let rhs = (BoxVec::e(side).scale(d) - BoxVec::id(side).scale(ONE / d)).scale(self.a * self.b)
            + t.scale(real(self.sigma.value()) * (self.b - self.a));
        self.norm(&(lhs - rhs))
    }

    /// `tr((P1 * P1) P1)`, the closed triangle of three `P1` vertices.
    pub fn null_triangle_scalar(&self) -> Scalar {
        let p1 = BoxVec::p1(Side::Plus);
        let c = self.coproduct(&p1, &p1).expect("same side");
        self.trace(&self.product(&c, &p1).expect("same side"))
    }
}

/// Sign convention for the braid relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Jones projection replaced by its negative; used on the Sp(4) family.
    Switched,
    /// Plain convention; used at the depth-3 point.
    Unswitched,
}

impl Convention {
    fn s(self) -> f64 {
        match self {
            Convention::Switched => -1.0,
            Convention::Unswitched => 1.0,
        }
    }
}

/// Braid generator `U`, its inverse `V`, and the data that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct BraidPair {
    pub u: BoxVec,
    pub v: BoxVec,
    pub q: Scalar,
    pub r: Scalar,
    pub z1: Scalar,
    pub z2: Scalar,
    pub convention: Convention,
}

fn product_inverse(u: &BoxVec) -> Result<BoxVec> {
    let mut c = [ZERO; 3];
    for (o, &x) in c.iter_mut().zip(u.coeffs.iter()) {
        *o = scalar::div(ONE, x, "braid inverse")?;
    }
    Ok(BoxVec::new(u.side, c))
}

/// Unchecked Sp(4) construction from `q` alone: `U = z1 e + q P1 - q^-1 P2`, `r = z1^-1`.
pub fn braid_from_q(model: &TwoBoxModel, q: Scalar) -> Result<BraidPair> {
    let (d, a, b) = (model.delta, model.a, model.b);
    let qi = scalar::div(ONE, q, "q inverse")?;
    let ab = a + b;
    let z1 = ((d * b + a) * q - (d * a + b) * qi) / ab;
    let z2 = ((d * a + b) * q - (d * b + a) * qi) / ab;
    let u = BoxVec::new(Side::Plus, [z1, q, -qi]);
    let v = product_inverse(&u)?;
    Ok(BraidPair {
        u,
        v,
        q,
        r: scalar::div(ONE, z1, "twist")?,
        z1,
        z2,
        convention: Convention::Switched,
    })
}

/// Coefficients `(mu1, mu2, mu3)` with `U = mu1 id + mu2 delta e + mu3 T`.
pub fn mu_coefficients(model: &TwoBoxModel, bp: &BraidPair) -> [Scalar; 3] {
    let (d, ab) = (model.delta, model.a + model.b);
    let qi = ONE / bp.q;
    [(d * bp.z2 - bp.z1) / ab, (d * bp.z1 - bp.z2) / ab, (bp.q + qi) / ab]
}

/// Sp(4) braid pair at `(q, r)`, checked against the model.
pub fn braid_pair(model: &TwoBoxModel, q: Scalar, r: Scalar) -> Result<BraidPair> {
    if model.sigma != Sign::Minus {
        return Err(Error::ParameterMismatch("braid_pair needs chirality -1".into()));
    }
    let bp = braid_from_q(model, q)?;
    let tol = &model.tol;
    let ri = scalar::div(ONE, r, "r inverse")?;
    if !tol.close(bp.z1, ri) {
        return Err(Error::ParameterMismatch(format!("z1 = {} but r^-1 = {}", bp.z1, ri)));
    }
    Ok(BraidPair { r, ..bp })
}

/// The SO(3) braid at the depth-3 point: `q = exp(2 pi i / 7)`, `r = q^2`, unswitched.
pub fn so3_braid_pair(model: &TwoBoxModel) -> Result<BraidPair> {
    so3_braid_pair_at(model, Scalar::from_polar(1.0, 2.0 * std::f64::consts::PI / 7.0))
}

/// Same shape at an arbitrary `q`, with `r = q^2`; off the root of unity it is not a braiding.
pub fn so3_braid_pair_at(model: &TwoBoxModel, q: Scalar) -> Result<BraidPair> {
    if model.sigma != Sign::Plus {
        return Err(Error::ParameterMismatch("SO(3) braid needs chirality +1".into()));
    }
    let r = q * q;
    let u = BoxVec::new(Side::Plus, [ONE / r, q, -ONE / q]);
    let v = product_inverse(&u)?;
    Ok(BraidPair {
        u,
        v,
        q,
        r,
        z1: ONE / r,
        z2: -r,
        convention: Convention::Unswitched,
    })
}

/// Residuals of the twist, inverse, and quadratic relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relations {
    pub r1: f64,
    pub r2: f64,
    pub quad: f64,
}

/// Twist, inverse and skein residuals, computed from the 2-box tables alone.
///
/// `r1` checks the four caps of `U` and `V`: even gaps give `s r` (resp. `s r^-1`),
/// odd gaps give `r^-1` (resp. `r`), where `s = -1` in the switched convention.
pub fn relation_residuals(model: &TwoBoxModel, bp: &BraidPair) -> Result<Relations> {
    let s = real(bp.convention.s());
    let ri = ONE / bp.r;
    let mut r1: f64 = 0.0;
    for p in 0..4 {
        let (eu, ev) = if p % 2 == 0 { (s * bp.r, s * ri) } else { (ri, bp.r) };
        r1 = r1.max((model.cap(&bp.u, p)? - eu).norm());
        r1 = r1.max((model.cap(&bp.v, p)? - ev).norm());
    }
    let side = bp.u.side;
    let id = BoxVec::id(side);
    let de = BoxVec::e(side).scale(model.delta);
    let uv = model.product(&bp.u, &bp.v)?;
    let cv = model.coproduct(&bp.u, &model.conjugate(&bp.v))?;
    let r2 = model.norm(&(uv - id)).max(model.norm(&(cv - de)));
    let qq = bp.q - ONE / bp.q;
    let quad = model.norm(&(bp.u - bp.v - (id - de.scale(s)).scale(qq)));
    Ok(Relations { r1, r2, quad })
}

/// Loop value and 2-box traces of the BMW algebra `C(r, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmwTraces {
    pub delta_prime: Scalar,
    pub tr_p1: Scalar,
    pub tr_p2: Scalar,
}

pub fn bmw_two_box_traces(q: Scalar, r: Scalar, tol: &Tolerance) -> Result<BmwTraces> {
    let qi = ONE / q;
    let bad = |s: &str| Error::DegenerateParameters(s.to_string());
    if r.norm() == 0.0 || q.norm() == 0.0 {
        return Err(bad("q and r must be nonzero"));
    }
    let d1 = q - qi;
    let d2 = q * q - qi * qi;
    if tol.negligible(d1, q.norm().max(qi.norm())) || tol.negligible(d2, q.norm_sqr().max(qi.norm_sqr())) {
        return Err(bad("q^2 is +-1"));
    }
    let ri = ONE / r;
    let rr = r - ri;
    let delta_prime = rr / d1 + ONE;
    let tr_p1 = (r * q - ri * qi + d2) * rr / (d2 * d1);
    let tr_p2 = (r * qi - ri * q + d2) * rr / (d2 * d1);
    for v in [delta_prime, tr_p1, tr_p2] {
        scalar::finite(v, "BMW traces")?;
    }
    Ok(BmwTraces {
        delta_prime,
        tr_p1,
        tr_p2,
    })
}

/// Sp(4) traces written as Laurent polynomials in `q` (taking `r = q^-5`).
/// Regular at `q = 1`.
pub fn sp4_polynomial_traces(q: Scalar) -> BmwTraces {
    let p = |k: i32| q.powi(k) + q.powi(-k);
    let delta_prime = -(p(4) + p(2));
    let dm = delta_prime - ONE;
    BmwTraces {
        delta_prime,
        tr_p1: (ONE - p(2)) * dm,
        tr_p2: -p(4) * dm,
    }
}

/// Among `(c1, c2)` in `{q, -q^-1}^2`, the unique pair with
/// `delta' r - r^-1 = c1 tr(P1) + c2 tr(P2)`.
pub fn unique_braid_check(q: Scalar, r: Scalar, tol: &Tolerance) -> Result<(Scalar, Scalar)> {
    let q2 = q * q;
    if tol.close(q2, ONE) || tol.close(q2, -ONE) {
        return Err(Error::MultipleSolutions(4));
    }
    let t = bmw_two_box_traces(q, r, tol)?;
    let lhs = t.delta_prime * r - ONE / r;
    let cands = [q, -ONE / q];
    let hits: Vec<(Scalar, Scalar)> = cands
        .iter()
        .flat_map(|&c1| cands.iter().map(move |&c2| (c1, c2)))
        .filter(|&(c1, c2)| {
            let rhs = c1 * t.tr_p1 + c2 * t.tr_p2;
            let scale = lhs.norm().max((c1 * t.tr_p1).norm()).max((c2 * t.tr_p2).norm());
            (lhs - rhs).norm() <= tol.eq_tol * scale.max(1.0)
        })
        .collect();
    match hits.len() {
        0 => Err(Error::NoSolution),
        1 => Ok(hits[0]),
        n => Err(Error::MultipleSolutions(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::depth3_delta;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn l12() -> TwoBoxModel {
        TwoBoxModel::from_classification_data(1.0 + 3f64.sqrt(), Sign::Minus, &tol()).unwrap()
    }

    fn depth3() -> TwoBoxModel {
        TwoBoxModel::from_classification_data(depth3_delta(), Sign::Plus, &tol()).unwrap()
    }

    fn models() -> Vec<TwoBoxModel> {
        let mut v = vec![depth3(), l12()];
        for d in [4.0, 4.5, 5.0] {
            v.push(TwoBoxModel::from_classification_data(d, Sign::Minus, &tol()).unwrap());
        }
        v
    }

    fn close_vec(x: &BoxVec, y: &BoxVec, eps: f64) -> bool {
        x.side == y.side && (0..3).all(|i| (x.coeffs[i] - y.coeffs[i]).norm() < eps)
    }

    fn rand_vec(rng: &mut ChaCha8Rng) -> BoxVec {
        BoxVec::new(
            Side::Plus,
            std::array::from_fn(|_| Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
        )
    }

    #[test]
    fn depth3_traces() {
        let m = depth3();
        let d = depth3_delta();
        assert!((m.a() - d / (d - 1.0)).norm() < 1e-12);
        assert!((m.b() - d).norm() < 1e-12);
    }

    #[test]
    fn l12_and_brauer_traces() {
        let s3 = 3f64.sqrt();
        let m = l12();
        assert!((m.a() - (1.0 + s3)).norm() < 1e-12);
        assert!((m.b() - (2.0 + s3)).norm() < 1e-12);
        let m = TwoBoxModel::from_classification_data(4.0, Sign::Minus, &tol()).unwrap();
        assert!((m.a() - 5.0).norm() < 1e-12 && (m.b() - 10.0).norm() < 1e-12);
    }

    #[test]
    fn l12_matches_polynomial_route() {
        let t = sp4_polynomial_traces(Scalar::from_polar(1.0, PI / 12.0));
        let m = l12();
        assert!((t.delta_prime + m.delta()).norm() < 1e-12);
        assert!((t.tr_p1 - m.a()).norm() < 1e-12);
        assert!((t.tr_p2 - m.b()).norm() < 1e-12);
    }

    #[test]
    fn wrong_chirality_rejected() {
        assert!(matches!(
            TwoBoxModel::from_classification_data(4.0, Sign::Plus, &tol()),
            Err(Error::ChiralityMismatch(_))
        ));
        assert!(matches!(
            TwoBoxModel::from_classification_data(3.0, Sign::Minus, &tol()),
            Err(Error::InadmissibleDelta(_))
        ));
    }

    #[test]
    fn product_examples() {
        let m = l12();
        let s = Side::Plus;
        assert_eq!(m.product(&BoxVec::p1(s), &BoxVec::p1(s)).unwrap(), BoxVec::p1(s));
        assert_eq!(m.product(&BoxVec::p1(s), &BoxVec::p2(s)).unwrap(), BoxVec::zero(s));
        let x = BoxVec::new(s, [real(2.0), real(-1.0), Scalar::new(0.5, 3.0)]);
        assert_eq!(m.product(&BoxVec::id(s), &x).unwrap(), x);
        assert_eq!(m.product(&x, &BoxVec::e(Side::Minus)), Err(Error::SideMismatch));
    }

    #[test]
    fn coproduct_examples() {
        for m in models() {
            let s = Side::Plus;
            let (d, a, b) = (m.delta(), m.a(), m.b());
            let pp = m.coproduct(&BoxVec::p1(s), &BoxVec::p1(s)).unwrap();
            let want = BoxVec::new(s, [a / d, ZERO, (a * a - a) / (d * b)]);
            assert!(close_vec(&pp, &want, 1e-14));
            assert_eq!(pp.coeffs[1], ZERO);
            for i in 0..3 {
                let x = BoxVec::basis(s, i);
                assert!(close_vec(&m.coproduct(&BoxVec::e(s).scale(d), &x).unwrap(), &x, 1e-13));
            }
            let ii = m.coproduct(&BoxVec::id(s), &BoxVec::id(s)).unwrap();
            assert!(close_vec(&ii, &BoxVec::id(s).scale(d), 1e-12), "{ii:?}");
        }
    }

    #[test]
    fn associativity() {
        for m in models() {
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let (x, y, z) = (
                            BoxVec::basis(Side::Plus, i),
                            BoxVec::basis(Side::Plus, j),
                            BoxVec::basis(Side::Plus, k),
                        );
                        let l = m.coproduct(&m.coproduct(&x, &y).unwrap(), &z).unwrap();
                        let r = m.coproduct(&x, &m.coproduct(&y, &z).unwrap()).unwrap();
                        assert!(close_vec(&l, &r, 1e-12), "{i}{j}{k}");
                        let l = m.product(&m.product(&x, &y).unwrap(), &z).unwrap();
                        let r = m.product(&x, &m.product(&y, &z).unwrap()).unwrap();
                        assert!(close_vec(&l, &r, 1e-15));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in models() {
            for _ in 0..20 {
                let (x, y) = (rand_vec(&mut rng), rand_vec(&mut rng));
                let xy = m.trace(&m.product(&x, &y).unwrap());
                let yx = m.trace(&m.product(&y, &x).unwrap());
                assert!((xy - yx).norm() < 1e-12);
                let c = m.trace(&m.coproduct(&x, &y).unwrap());
                assert!((c - m.trace(&x) * m.trace(&y) / m.delta()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rotation_intertwines_product_and_coproduct() {
        for m in models() {
            for i in 0..3 {
                for j in 0..3 {
                    let (x, y) = (BoxVec::basis(Side::Plus, i), BoxVec::basis(Side::Plus, j));
                    let lhs = m.rotate(&m.product(&x, &y).unwrap());
                    let rhs = m.coproduct(&m.rotate(&x), &m.rotate(&y)).unwrap();
                    assert!(close_vec(&lhs, &rhs, 1e-12), "{i}{j}");
                }
            }
        }
    }

    #[test]
    fn wrong_chirality_breaks_intertwining() {
        let good = l12();
        let bad = TwoBoxModel::from_traces(good.delta(), good.a(), good.b(), Sign::Plus, &tol()).unwrap();
        let x = BoxVec::p1(Side::Plus);
        let lhs = bad.rotate(&bad.product(&x, &x).unwrap());
        let rhs = bad.coproduct(&bad.rotate(&x), &bad.rotate(&x)).unwrap();
        assert!(!close_vec(&lhs, &rhs, 1e-3));
    }

    #[test]
    fn rotation_facts() {
        for m in models() {
            let s = Side::Plus;
            let d = m.delta();
            assert!(close_vec(
                &m.rotate(&BoxVec::id(s)),
                &BoxVec::e(Side::Minus).scale(d),
                1e-13
            ));
            assert!(close_vec(
                &m.rotate(&BoxVec::e(s)),
                &BoxVec::id(Side::Minus).scale(ONE / d),
                1e-13
            ));
            let t = m.t_element(s);
            let ft = m.rotate(&t);
            assert!(close_vec(
                &ft,
                &t.scale(real(m.sigma().value())).on_side(Side::Minus),
                1e-12
            ));
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { ONE } else { ZERO };
                    assert!((m.conj_matrix()[i][j] - want).norm() < 1e-12);
                }
            }
            let x = BoxVec::new(s, [real(0.3), real(-2.0), real(1.1)]);
            assert!((m.trace(&m.conjugate(&x)) - m.trace(&x)).norm() < 1e-12);
            assert!(close_vec(&m.rotate_by(&x, 2), &m.conjugate(&x), 1e-12));
        }
    }

    #[test]
    fn caps() {
        let m = l12();
        let s = Side::Plus;
        assert_eq!(m.trace(&BoxVec::p1(s)), m.a());
        assert!((m.cap(&BoxVec::e(s), 2).unwrap() - ONE / m.delta()).norm() < 1e-15);
        assert!((m.cap(&BoxVec::e(s), 1).unwrap() - ONE).norm() < 1e-12);
        assert!(m.cap(&BoxVec::e(s), 4).is_err());
    }

    #[test]
    fn uncappable_line() {
        for m in models() {
            let t = m.t_element(Side::Plus);
            for p in 0..4 {
                assert!(m.cap(&t, p).unwrap().norm() < 1e-12);
            }
            let rows: Vec<[Scalar; 3]> = (0..4)
                .map(|p| std::array::from_fn(|i| m.cap(&BoxVec::basis(Side::Plus, i), p).unwrap()))
                .collect();
            let cross = |u: &[Scalar; 3], v: &[Scalar; 3]| -> [Scalar; 3] {
                [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ]
            };
            let c = cross(&rows[0], &rows[1]);
            assert!(c.iter().map(|z| z.norm()).sum::<f64>() > 1e-6);
        }
    }

    #[test]
    fn null_triangle_scalar_vanishes() {
        for m in models() {
            assert!(m.null_triangle_scalar().norm() < 1e-12);
        }
    }

    #[test]
    fn chirality_residuals() {
        for m in models() {
            assert!(m.chirality_residual() < 1e-10, "{}", m.chirality_residual());
        }
        let m = l12();
        let off = TwoBoxModel::from_traces(m.delta(), m.a() + 1e-2, m.b() - 1e-2, Sign::Minus, &tol()).unwrap();
        assert!(off.chirality_residual() > 1e-3);
    }

    #[test]
    fn decomposition_roundtrip() {
        let m = l12();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x = rand_vec(&mut rng);
            assert!(close_vec(&m.compose(Side::Plus, m.decompose(&x)), &x, 1e-12));
        }
        let g = m.generator(Side::Plus);
        assert!((m.norm(&g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l12_braid() {
        let m = l12();
        let q = Scalar::from_polar(1.0, PI / 12.0);
        let bp = braid_pair(&m, q, q.powi(-5)).unwrap();
        assert!((bp.z1 * bp.z2 + 1.0).norm() < 1e-12);
        assert!((bp.z1 + bp.z2 - (m.delta() + 1.0) * (q - 1.0 / q)).norm() < 1e-12);
        let rel = relation_residuals(&m, &bp).unwrap();
        assert!(rel.r1 < 1e-10 && rel.r2 < 1e-10 && rel.quad < 1e-10, "{rel:?}");
        let mu = mu_coefficients(&m, &bp);
        let rebuilt = BoxVec::id(Side::Plus).scale(mu[0])
            + BoxVec::e(Side::Plus).scale(mu[1] * m.delta())
            + m.t_element(Side::Plus).scale(mu[2]);
        assert!(close_vec(&rebuilt, &bp.u, 1e-12));
        assert!(matches!(
            braid_pair(&m, q, -q.powi(-5)),
            Err(Error::ParameterMismatch(_))
        ));
    }

    #[test]
    fn braid_twist_sign_control() {
        let m = l12();
        let q = Scalar::from_polar(1.0, PI / 12.0);
        let mut bp = braid_pair(&m, q, q.powi(-5)).unwrap();
        bp.r = -bp.r;
        assert!(relation_residuals(&m, &bp).unwrap().r1 > 1e-3);
    }

    #[test]
    fn brauer_limit() {
        let m = TwoBoxModel::from_classification_data(4.0, Sign::Minus, &tol()).unwrap();
        let bp = braid_pair(&m, ONE, ONE).unwrap();
        let s = Side::Plus;
        assert!(close_vec(&bp.u, &(BoxVec::e(s) + BoxVec::p1(s) - BoxVec::p2(s)), 1e-12));
        let u2 = m.product(&bp.u, &bp.u).unwrap();
        assert!(close_vec(&u2, &BoxVec::id(s), 1e-12));
        let rel = relation_residuals(&m, &bp).unwrap();
        assert!(rel.r1 < 1e-10 && rel.r2 < 1e-10 && rel.quad < 1e-10);
    }

    #[test]
    fn so3_braid() {
        let m = depth3();
        let bp = so3_braid_pair(&m).unwrap();
        let rel = relation_residuals(&m, &bp).unwrap();
        assert!(rel.r1 < 1e-9 && rel.r2 < 1e-9 && rel.quad < 1e-9, "{rel:?}");
        assert!(close_vec(&m.rotate(&bp.u), &bp.v.on_side(Side::Minus), 1e-10));
    }

    #[test]
    fn bmw_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let q = Scalar::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.1..1.4));
            let r = Scalar::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-3.0..3.0));
            let t = bmw_two_box_traces(q, r, &tol()).unwrap();
            assert!((ONE + t.tr_p1 + t.tr_p2 - t.delta_prime * t.delta_prime).norm() < 1e-9);
        }
        let q = Scalar::from_polar(1.0, 0.4);
        assert!(bmw_two_box_traces(q, ONE / q, &tol()).unwrap().delta_prime.norm() < 1e-12);
        let q = Scalar::from_polar(1.0, PI / 12.0);
        let t = bmw_two_box_traces(q, q.powi(-5), &tol()).unwrap();
        assert!((t.delta_prime + 1.0 + 3f64.sqrt()).norm() < 1e-12);
        assert!(matches!(
            bmw_two_box_traces(ONE, ONE, &tol()),
            Err(Error::DegenerateParameters(_))
        ));
        assert!(matches!(
            bmw_two_box_traces(scalar::I, ONE, &tol()),
            Err(Error::DegenerateParameters(_))
        ));
    }

    #[test]
    fn braid_uniqueness() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let q = Scalar::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.1..1.4));
            let r = Scalar::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-3.0..3.0));
            let (c1, c2) = unique_braid_check(q, r, &tol()).unwrap();
            assert!((c1 - q).norm() < 1e-15 && (c2 + ONE / q).norm() < 1e-15);
        }
        assert_eq!(
            unique_braid_check(ONE, real(2.0), &tol()),
            Err(Error::MultipleSolutions(4))
        );
    }
}
