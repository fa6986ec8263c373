//! The classification pipeline: admissibility of a loop value, the chirality
//! quadratics, recovery of the BMW parameters, the principal graph prefix,
//! and a verification report.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scalar::{self, depth3_delta, real, Scalar, Tolerance, ONE};
use crate::threebox::{self, Basis14};
use crate::twobox::{self, BoxVec, Side, Sign, TwoBoxModel};

/// Default largest `l` searched in the root-of-unity series.
pub const DEFAULT_L_CAP: u32 = 200;

/// Which family a loop value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Depth3,
    /// `l` is set on the root-of-unity series, `None` on the continuum `delta >= 4`.
    Sp4 {
        l: Option<u32>,
    },
}

impl Case {
    pub fn sigma(self) -> Sign {
        match self {
            Case::Depth3 => Sign::Plus,
            Case::Sp4 { .. } => Sign::Minus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Depth3 => "Depth3",
            Case::Sp4 { .. } => "Sp4",
        }
    }
}

/// Why a loop value was turned away.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub delta: f64,
    pub reason: String,
}

/// `q^4 + q^2 + q^-2 + q^-4` at `q = exp(i pi / l)`.
pub fn sp4_delta(l: u32) -> f64 {
    let l = f64::from(l);
    2.0 * (4.0 * PI / l).cos() + 2.0 * (2.0 * PI / l).cos()
}

pub fn admissible_check(delta: f64, tol: &Tolerance) -> std::result::Result<Case, Rejection> {
    admissible_check_with_cap(delta, tol, DEFAULT_L_CAP)
}

pub fn admissible_check_with_cap(delta: f64, tol: &Tolerance, l_cap: u32) -> std::result::Result<Case, Rejection> {
    let reject = |reason: String| Err(Rejection { delta, reason });
    if !delta.is_finite() || delta <= 1.0 {
        return reject("loop value must exceed 1".into());
    }
    let near = |x: f64| (delta - x).abs() <= tol.eq_tol * x.abs().max(1.0);
    if near(depth3_delta()) {
        return Ok(Case::Depth3);
    }
    if delta >= 4.0 || near(4.0) {
        return Ok(Case::Sp4 { l: None });
    }
    if let Some(l) = (12..=l_cap).step_by(2).find(|&l| near(sp4_delta(l))) {
        return Ok(Case::Sp4 { l: Some(l) });
    }
    let top = sp4_delta(l_cap - l_cap % 2);
    if delta > top {
        reject(format!(
            "between the l = {l_cap} series value {top:.12} and 4; raise the l cap to search further"
        ))
    } else {
        reject("not the depth-3 value and not on the Sp(4) series".into())
    }
}

/// Ratio `y = b / a` and the traces it determines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSolution {
    pub y: Scalar,
    pub a: Scalar,
    pub b: Scalar,
}

pub fn solve_delta(delta: f64, sigma: Sign, tol: &Tolerance) -> Result<DeltaSolution> {
    if !(delta.is_finite() && delta > 1.0) {
        return Err(Error::InadmissibleDelta(delta));
    }
    let y = match sigma {
        Sign::Plus => {
            if delta > 2.25 * (1.0 + tol.eq_tol) {
                return Err(Error::ChiralityInfeasible(delta));
            }
            let (lo, hi) = scalar::solve_quadratic(real(delta), real(-(delta + 3.0)), real(delta * delta - 2.0), tol)?;
            let pick = if hi.re >= lo.re { hi } else { lo };
            real(pick.re)
        }
        Sign::Minus => real((delta - 3.0 + (delta - 1.0) * (4.0 * delta + 9.0).sqrt()) / (2.0 * delta)),
    };
    if y.re <= 0.0 {
        return Err(Error::NoPositiveRoot);
    }
    let a = real(delta * delta - 1.0) / (y + 1.0);
    Ok(DeltaSolution { y, a, b: y * a })
}

/// Recover `(q, r)` from `(delta', a, b)`.
///
/// `q^2 + q^-2 = (2D^4 - 4D^2 + 2(b-a)^2) / (D^4 - (b-a)^2)` with `D = delta' - 1`, then
/// `r = (D^2 (q - q^-1) + (a - b)(q + q^-1)) / (2D)`.
pub fn recover_qr_with(delta_prime: Scalar, a: Scalar, b: Scalar, tol: &Tolerance) -> Result<(Scalar, Scalar)> {
    let d = delta_prime - ONE;
    let d2 = d * d;
    let d4 = d2 * d2;
    let w = b - a;
    let den = d4 - w * w;
    if tol.negligible(den, d4.norm()) || tol.negligible(d, 1.0) {
        return Err(Error::DegenerateDenominator);
    }
    let c = (2.0 * d4 - 4.0 * d2 + 2.0 * w * w) / den;
    let q = scalar::principal_q_from_c(c, tol)?;
    let qi = ONE / q;
    let r = (d2 * (q - qi) - w * (q + qi)) / (2.0 * d);
    Ok((q, scalar::finite(r, "recover r")?))
}

/// Sp(4) recovery: `delta' = -delta`.
pub fn recover_qr(delta: Scalar, a: Scalar, b: Scalar, tol: &Tolerance) -> Result<(Scalar, Scalar)> {
    recover_qr_with(-delta, a, b, tol)
}

/// Pick the orbit representative of `(r, q)` under
/// `(r,q) -> (-r,-q), (r^-1,q^-1), (-r^-1,q)`.
///
/// On the unit circle: `Re q, Im q, Re r >= 0`. Real case: `q >= 1`, `r >= 0`.
pub fn normalize_bmw_params(r: Scalar, q: Scalar, tol: &Tolerance) -> Result<(Scalar, Scalar)> {
    if r.norm() == 0.0 || q.norm() == 0.0 {
        return Err(Error::NoCanonicalRepresentative);
    }
    type Move = fn(Scalar, Scalar) -> (Scalar, Scalar);
    let moves: [Move; 3] = [|r, q| (-r, -q), |r, q| (ONE / r, ONE / q), |r, q| (-ONE / r, q)];
    let mut orbit = vec![(r, q)];
    let mut i = 0;
    while i < orbit.len() {
        let (rr, qq) = orbit[i];
        for m in moves {
            let next = m(rr, qq);
            if !orbit.iter().any(|&(a, b)| tol.close(a, next.0) && tol.close(b, next.1)) {
                orbit.push(next);
            }
        }
        i += 1;
    }
    let eps = tol.eq_tol;
    let good = |&(r, q): &(Scalar, Scalar)| {
        let unit = (q.norm() - 1.0).abs() <= eps && q.re >= -eps && q.im >= -eps && r.re >= -eps;
        let realq = q.im.abs() <= eps * q.norm() && r.im.abs() <= eps * r.norm().max(1.0);
        unit || (realq && q.re >= 1.0 - eps && r.re >= -eps)
    };
    if good(&orbit[0]) {
        return Ok(orbit[0]);
    }
    orbit
        .into_iter()
        .filter(good)
        .min_by(|x, y| {
            x.1.re
                .total_cmp(&y.1.re)
                .then(x.1.im.total_cmp(&y.1.im))
                .then(x.0.re.total_cmp(&y.0.re))
                .then(x.0.im.total_cmp(&y.0.im))
        })
        .ok_or(Error::NoCanonicalRepresentative)
}

/// The principal graph up to depth 3, as read off the coproduct supports.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalGraphPrefix {
    /// Traces of the two depth-2 vertices `P1`, `P2`.
    pub depth2_weights: [Scalar; 2],
    /// Depth-2 neighbours (0 for `P1`, 1 for `P2`) of each depth-3 vertex.
    pub depth3_neighbors: Vec<Vec<usize>>,
    /// Supports of `P1*P1`, `P1*P2`, `P2*P2` as basis indices (0 = e, 1 = P1, 2 = P2).
    pub supports: [Vec<usize>; 3],
    /// Dimension of the 3-box space implied by the graph.
    pub dim3: usize,
}

impl PrincipalGraphPrefix {
    /// Two depth-3 vertices, one adjacent to both depth-2 vertices, one to `P2` only.
    pub fn is_hat(&self) -> bool {
        let mut n = self.depth3_neighbors.clone();
        n.sort();
        n == vec![vec![0, 1], vec![1]]
    }
}

fn support(model: &TwoBoxModel, i: usize, j: usize) -> Result<Vec<usize>> {
    let tol = model.tolerance();
    let c = model.coproduct(&BoxVec::basis(Side::Plus, i), &BoxVec::basis(Side::Plus, j))?;
    let s = c.max_abs();
    let mut out = Vec::new();
    for (k, z) in c.coeffs.iter().enumerate() {
        let v = z.norm();
        if v <= tol.eq_tol * s {
            continue;
        }
        if v <= 1e3 * tol.eq_tol * s {
            return Err(Error::SupportAmbiguous(format!(
                "coefficient {k} of basis pair ({i},{j}) is {v:e}"
            )));
        }
        out.push(k);
    }
    Ok(out)
}

pub fn principal_graph_prefix(model: &TwoBoxModel) -> Result<PrincipalGraphPrefix> {
    let supports = [support(model, 1, 1)?, support(model, 1, 2)?, support(model, 2, 2)?];
    let shared = supports[1]
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::InvariantViolation("P1*P2 has empty support".into()))?;
    let p1_only = supports[0].len().saturating_sub(1 + shared);
    let p2_only = supports[2].len().saturating_sub(1 + shared);
    let depth3_neighbors: Vec<Vec<usize>> = std::iter::repeat_n(vec![0, 1], shared)
        .chain(std::iter::repeat_n(vec![0], p1_only))
        .chain(std::iter::repeat_n(vec![1], p2_only))
        .collect();
    // paths of length 3 from the root: 3 to the depth-1 vertex, |N(v)| to each depth-3 v
    let dim3 = 9 + depth3_neighbors.iter().map(|n| n.len() * n.len()).sum::<usize>();
    if dim3 != 14 {
        return Err(Error::InvariantViolation(format!(
            "graph prefix gives dim 3-box = {dim3}"
        )));
    }
    Ok(PrincipalGraphPrefix {
        depth2_weights: [model.a(), model.b()],
        depth3_neighbors,
        supports,
        dim3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Full output of a successful pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub case: Case,
    pub delta: f64,
    pub y: Scalar,
    pub a: Scalar,
    pub b: Scalar,
    pub q: Scalar,
    pub r: Scalar,
    pub sigma: Sign,
    pub l: Option<u32>,
    pub gram_rank: usize,
    pub gram_min_eigenvalue: f64,
    pub gram_max_eigenvalue: f64,
    pub residuals: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Classified(Box<ClassificationResult>),
    Rejected(Rejection),
}

/// Residual of the trace roundtrip `(q, r) -> (delta', a, b)`.
fn qr_roundtrip(case: Case, delta: f64, a: Scalar, b: Scalar, q: Scalar, r: Scalar, tol: &Tolerance) -> f64 {
    let dp = match case {
        Case::Depth3 => real(delta),
        Case::Sp4 { .. } => real(-delta),
    };
    let (t, extra) = match twobox::bmw_two_box_traces(q, r, tol) {
        Ok(t) => (t, 0.0),
        Err(_) => (twobox::sp4_polynomial_traces(q), (r - q.powi(-5)).norm()),
    };
    [
        (t.delta_prime - dp).norm(),
        (t.tr_p1 - a).norm(),
        (t.tr_p2 - b).norm(),
        extra,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

pub fn classify(delta: f64, tol: &Tolerance) -> Result<Outcome> {
    let case = match admissible_check(delta, tol) {
        Ok(c) => c,
        Err(rej) => return Ok(Outcome::Rejected(rej)),
    };
    let sigma = case.sigma();
    let sol = solve_delta(delta, sigma, tol)?;
    let model = TwoBoxModel::from_traces(real(delta), sol.a, sol.b, sigma, tol)?;
    let (q, r, braid) = match case {
        Case::Depth3 => {
            let (q, r) = recover_qr_with(real(delta), sol.a, sol.b, tol)?;
            (q, r, twobox::so3_braid_pair(&model)?)
        }
        Case::Sp4 { .. } => {
            let (q, r) = recover_qr(real(delta), sol.a, sol.b, tol)?;
            (q, r, twobox::braid_pair(&model, q, r)?)
        }
    };
    let basis = Basis14::new()?;
    let gram = threebox::gram(&model, &basis)?;
    let spectrum = gram.spectrum(tol);
    let table = threebox::solve_triangle(&model, &basis, &gram)?;
    let rel = threebox::reidemeister_residuals(&model, &braid, &table)?;
    let ybe = threebox::ybe_residual(&model, &braid, &table)?;

    let mut residuals = BTreeMap::new();
    let mut thresholds = BTreeMap::new();
    let mut put = |name: &str, v: f64, t: f64| {
        residuals.insert(name.to_string(), v);
        thresholds.insert(name.to_string(), t);
    };
    let rt = tol.residual_tol;
    put("chirality", model.chirality_residual(), rt);
    put("gram_psd_min_eigenvalue", spectrum.psd_violation(), tol.rank_tol);
    put("gram_rank_deficit", (14 - spectrum.rank.min(14)) as f64, 0.5);
    put("triangle_solve", table.max_residual(), rt);
    put("ybe", ybe, rt);
    put("r1", rel.r1, rt);
    put("r2", rel.r2, rt);
    put("quad", rel.quad, rt);
    put(
        "qr_roundtrip",
        qr_roundtrip(case, delta, sol.a, sol.b, q, r, tol),
        tol.eq_tol.max(rt),
    );

    let pass = residuals.iter().all(|(k, v)| v.is_finite() && *v < thresholds[k]);
    Ok(Outcome::Classified(Box::new(ClassificationResult {
        case,
        delta,
        y: sol.y,
        a: sol.a,
        b: sol.b,
        q,
        r,
        sigma,
        l: match case {
            Case::Sp4 { l } => l,
            Case::Depth3 => None,
        },
        gram_rank: spectrum.rank,
        gram_min_eigenvalue: spectrum.min,
        gram_max_eigenvalue: spectrum.max,
        residuals,
        thresholds,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    })))
}
