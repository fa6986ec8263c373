//! The 3-box space: its 14-diagram basis, Gram matrix, triangle table, and
//! the Yang-Baxter and Reidemeister residuals measured in basis coordinates.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance, ONE, ZERO};
use crate::skein::{self, canonicalize, compose, CanonKey, Diagram, End, Label, TriangleExpansion, Vertex};
use crate::twobox::{self, BoxVec, BraidPair, Relations, Side, TwoBoxModel};

pub const DIM: usize = 14;

/// Face-free 3-box diagrams with at most two generator vertices.
#[derive(Debug, Clone)]
pub struct Basis14 {
    diagrams: Vec<Diagram>,
    counts: (usize, usize, usize),
    keys: HashMap<CanonKey, usize>,
}

/// All perfect matchings of `0..n`, skipping pairs inside one vertex.
fn matchings(n: usize, forbid: &dyn Fn(usize, usize) -> bool, out: &mut Vec<Vec<(usize, usize)>>) {
    fn go(
        free: &mut [usize],
        cur: &mut Vec<(usize, usize)>,
        forbid: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some(&a) = free.first() else {
            out.push(cur.clone());
            return;
        };
        for i in 1..free.len() {
            let b = free[i];
            if forbid(a, b) {
                continue;
            }
            let mut rest: Vec<usize> = free.iter().copied().filter(|&x| x != a && x != b).collect();
            cur.push((a, b));
            go(&mut rest, cur, forbid, out);
            cur.pop();
        }
    }
    let mut free: Vec<usize> = (0..n).collect();
    go(&mut free, &mut Vec::new(), forbid, out);
}

impl Basis14 {
    /// Enumerate, deduplicate by canonical form, and order: TL, one vertex, two vertices.
    pub fn new() -> Result<Self> {
        let probe = TwoBoxModel::from_traces(
            Scalar::new(2.0, 0.0),
            Scalar::new(1.0, 0.0),
            Scalar::new(2.0, 0.0),
            twobox::Sign::Plus,
            &Tolerance::default(),
        )?;
        let mut groups: Vec<Vec<(CanonKey, Diagram)>> = vec![vec![]; 3];
        for (k, group) in groups.iter_mut().enumerate() {
            let n = 6 + 4 * k;
            let end = |x: usize| {
                if x < 6 {
                    End::B(x)
                } else {
                    End::V((x - 6) / 4, (x - 6) % 4)
                }
            };
            let forbid = |a: usize, b: usize| a >= 6 && b >= 6 && (a - 6) / 4 == (b - 6) / 4;
            let mut all = Vec::new();
            matchings(n, &forbid, &mut all);
            let mut seen: HashMap<CanonKey, Diagram> = HashMap::new();
            for m in all {
                let edges: Vec<(End, End)> = m.iter().map(|&(a, b)| (end(a), end(b))).collect();
                let vs = vec![Vertex::generator(Side::Plus); k];
                let Ok(d) = Diagram::from_edges(vs, 6, Side::Plus, &edges, 0) else {
                    continue;
                };
                if d.faces().iter().any(|f| f.internal) || d.components().len() > 1 {
                    continue;
                }
                let c = canonicalize(&d, &probe);
                seen.entry(c.key).or_insert(c.diagram);
            }
            let mut g: Vec<(CanonKey, Diagram)> = seen.into_iter().collect();
            g.sort_by(|a, b| a.0.cmp(&b.0));
            *group = g;
        }
        let counts = (groups[0].len(), groups[1].len(), groups[2].len());
        if counts != (5, 6, 3) {
            return Err(Error::InternalEnumerationMismatch(counts));
        }
        let mut keys = HashMap::new();
        let mut diagrams = Vec::new();
        for (key, d) in groups.into_iter().flatten() {
            keys.insert(key, diagrams.len());
            diagrams.push(d);
        }
        Ok(Basis14 { diagrams, counts, keys })
    }

    pub fn diagrams(&self) -> &[Diagram] {
        &self.diagrams
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        self.counts
    }

    pub fn index_of(&self, key: &CanonKey) -> Option<usize> {
        self.keys.get(key).copied()
    }

    /// Position of the identity 3-box.
    pub fn identity_index(&self) -> usize {
        let probe = self.keys.keys().next().map(|_| ());
        debug_assert!(probe.is_some());
        let id = compose::identity(3, Side::Plus);
        (0..5)
            .find(|&i| self.diagrams[i].pairing == id.pairing)
            .expect("identity is a TL diagram")
    }
}

/// Same as [`Basis14::new`]; the basis does not depend on the model.
pub fn enumerate_basis(_model: &TwoBoxModel) -> Result<Basis14> {
    Basis14::new()
}

/// `entries[(i, j)] = <D_i, D_j> = tr(D_j* D_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub entries: DMatrix<Scalar>,
}

/// Eigenvalue and rank summary of a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub rank: usize,
    pub hermitian_defect: f64,
}

impl Spectrum {
    /// `max(0, -min / max)`; zero when positive semidefinite.
    pub fn psd_violation(&self) -> f64 {
        if self.max <= 0.0 {
            return f64::INFINITY;
        }
        (-self.min / self.max).max(0.0)
    }
}

impl GramMatrix {
    pub fn spectrum(&self, tol: &Tolerance) -> Spectrum {
        let g = &self.entries;
        let herm = (g + g.adjoint()) * Scalar::new(0.5, 0.0);
        let hermitian_defect = (g - g.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut eigenvalues: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        let mut singular_values: Vec<f64> = g.clone().svd(false, false).singular_values.iter().copied().collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let top = singular_values.first().copied().unwrap_or(0.0);
        let rank = singular_values.iter().filter(|&&s| s > tol.rank_tol * top).count();
        Spectrum {
            min: eigenvalues.first().copied().unwrap_or(0.0),
            max: eigenvalues.last().copied().unwrap_or(0.0),
            eigenvalues,
            singular_values,
            rank,
            hermitian_defect,
        }
    }

    /// `sqrt(d^T G conj(d))`, the norm of `sum d_i D_i`.
    pub fn norm_of(&self, d: &[Scalar]) -> f64 {
        let v = DVector::from_column_slice(d);
        let q = (v.transpose() * &self.entries * v.map(|z| z.conj()))[(0, 0)];
        q.re.max(0.0).sqrt()
    }

    /// Solve `G^T c = v` and return `c` with the relative residual.
    pub fn solve(&self, v: &[Scalar], tol: &Tolerance) -> Result<(Vec<Scalar>, f64)> {
        let gt = self.entries.transpose();
        let svd = gt.clone().svd(true, true);
        let top = svd.singular_values.max();
        let rank = svd.singular_values.iter().filter(|&&s| s > tol.rank_tol * top).count();
        if rank < DIM {
            return Err(Error::GramRankDeficient(rank));
        }
        let rhs = DVector::from_column_slice(v);
        let c = svd
            .solve(&rhs, tol.rank_tol * top)
            .map_err(|e| Error::InvariantViolation(format!("SVD solve failed: {e}")))?;
        let res = (&gt * &c - &rhs).norm() / rhs.norm().max(1.0);
        Ok((c.iter().copied().collect(), res))
    }
}

pub fn gram(model: &TwoBoxModel, basis: &Basis14) -> Result<GramMatrix> {
    let n = basis.diagrams.len();
    let mut m = DMatrix::from_element(n, n, ZERO);
    for i in 0..n {
        for j in 0..n {
            let d = compose::pair_closure(&basis.diagrams[i], &basis.diagrams[j])?;
            m[(i, j)] = skein::evaluate(&d, model, None)?;
        }
    }
    Ok(GramMatrix { entries: m })
}

/// `<x, D_i>` for every basis diagram.
pub fn inner_products(
    model: &TwoBoxModel,
    basis: &Basis14,
    x: &Diagram,
    triangle: Option<&dyn TriangleExpansion>,
) -> Result<Vec<Scalar>> {
    basis
        .diagrams
        .iter()
        .map(|d| skein::evaluate(&compose::pair_closure(x, d)?, model, triangle))
        .collect()
}

/// Coordinates of an open 3-box through inner products: `G^T c = <x, D_i>`.
pub fn project(model: &TwoBoxModel, basis: &Basis14, gram: &GramMatrix, x: &Diagram) -> Result<(Vec<Scalar>, f64)> {
    let v = inner_products(model, basis, x, None)?;
    gram.solve(&v, model.tolerance())
}

/// The two generator triangles: `G1 G2 G1` and `G2 G1 G2`.
pub fn triangle_patterns() -> [Diagram; 2] {
    let g = Label::Generator;
    [
        compose::stack(3, &[(0, g.clone()), (1, g.clone()), (0, g.clone())], Side::Plus).expect("planar"),
        compose::stack(3, &[(1, g.clone()), (0, g.clone()), (1, g)], Side::Plus).expect("planar"),
    ]
}

#[derive(Debug, Clone)]
struct Entry {
    factor: Scalar,
    terms: Vec<(Scalar, Diagram)>,
}

/// Expansions of both generator triangles over the basis.
#[derive(Debug, Clone)]
pub struct TriangleTable {
    pub left_coeffs: Vec<Scalar>,
    pub right_coeffs: Vec<Scalar>,
    pub residual_left: f64,
    pub residual_right: f64,
    basis: Basis14,
    gram: GramMatrix,
    entries: HashMap<CanonKey, Entry>,
}

impl TriangleTable {
    pub fn max_residual(&self) -> f64 {
        self.residual_left.max(self.residual_right)
    }

    pub fn basis(&self) -> &Basis14 {
        &self.basis
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }
}

impl TriangleExpansion for TriangleTable {
    fn expansion(&self, key: &CanonKey) -> Option<(Scalar, &[(Scalar, Diagram)])> {
        self.entries.get(key).map(|e| (e.factor, e.terms.as_slice()))
    }
}

pub fn solve_triangle(model: &TwoBoxModel, basis: &Basis14, gram: &GramMatrix) -> Result<TriangleTable> {
    let tol = model.tolerance();
    let [left, right] = triangle_patterns();
    let (lc, lr) = gram.solve(&inner_products(model, basis, &left, None)?, tol)?;
    let (rc, rr) = gram.solve(&inner_products(model, basis, &right, None)?, tol)?;
    let mut entries = HashMap::new();
    for (pattern, coeffs) in [(&left, &lc), (&right, &rc)] {
        // all three even rotations of each pattern
        for clicks in [0, 2, 4] {
            let p = compose::rotate(pattern, clicks);
            let c = canonicalize(&p, model);
            let terms = coeffs
                .iter()
                .zip(basis.diagrams.iter())
                .map(|(&k, d)| (k, compose::rotate(d, clicks)))
                .collect();
            entries.entry(c.key).or_insert(Entry {
                factor: c.factor,
                terms,
            });
        }
    }
    Ok(TriangleTable {
        left_coeffs: lc,
        right_coeffs: rc,
        residual_left: lr,
        residual_right: rr,
        basis: basis.clone(),
        gram: gram.clone(),
        entries,
    })
}

/// Coordinates of an open 3-box by reduction: faces are removed, labels
/// expanded over `(id, e, G)`, and the face-free remainder matched to the basis.
pub fn coordinates(model: &TwoBoxModel, table: &TriangleTable, x: &Diagram) -> Result<Vec<Scalar>> {
    let mut out = vec![ZERO; DIM];
    let mut work: Vec<(Scalar, Diagram)> = skein::reduce_open(x, model, Some(table))?.into_terms();
    while let Some((c, d)) = work.pop() {
        if let Some(v) = d.vertices.iter().position(|v| matches!(v.label, Label::Box(_))) {
            for (k, e) in skein::expand_vertex(&d, v, model)? {
                for (k2, f) in skein::reduce_open(&e, model, Some(table))?.into_terms() {
                    work.push((c * k * k2, f));
                }
            }
            continue;
        }
        let canon = canonicalize(&d, model);
        let i = table
            .basis
            .index_of(&canon.key)
            .ok_or_else(|| Error::InvariantViolation("reduced diagram is not a basis element".into()))?;
        out[i] += c * canon.factor;
    }
    Ok(out)
}

fn braid_label(x: &BoxVec) -> Label {
    Label::Box(x.coeffs)
}

/// `|| c(U1 U2 U1) - c(U2 U1 U2) ||` in the Gram norm.
pub fn ybe_residual(model: &TwoBoxModel, braid: &BraidPair, table: &TriangleTable) -> Result<f64> {
    let u = braid_label(&braid.u);
    let a = compose::stack(3, &[(0, u.clone()), (1, u.clone()), (0, u.clone())], Side::Plus)?;
    let b = compose::stack(3, &[(1, u.clone()), (0, u.clone()), (1, u)], Side::Plus)?;
    let ca = coordinates(model, table, &a)?;
    let cb = coordinates(model, table, &b)?;
    let d: Vec<Scalar> = ca.iter().zip(cb.iter()).map(|(x, y)| x - y).collect();
    Ok(table.gram.norm_of(&d))
}

/// Twist, inverse and skein residuals; the inverse relation is checked both
/// in the 2-box tables and on each strand pair of the 3-box space.
pub fn reidemeister_residuals(model: &TwoBoxModel, braid: &BraidPair, table: &TriangleTable) -> Result<Relations> {
    let mut rel = twobox::relation_residuals(model, braid)?;
    let (u, v) = (braid_label(&braid.u), braid_label(&braid.v));
    let id = table.basis.identity_index();
    for p in 0..2 {
        let s = compose::stack(3, &[(p, u.clone()), (p, v.clone())], Side::Plus)?;
        let mut c = coordinates(model, table, &s)?;
        c[id] -= ONE;
        rel.r2 = rel.r2.max(table.gram.norm_of(&c));
    }
    Ok(rel)
}

/// Open 3-box: three `P1` vertices around a triangle.
pub fn null_triangle() -> Diagram {
    let p1 = || Vertex::new(Label::Box(BoxVec::p1(Side::Plus).coeffs), Side::Plus);
    let (a, b, c) = (0, 1, 2);
    let edges = [
        (End::V(a, 1), End::V(b, 0)),
        (End::V(b, 1), End::V(c, 2)),
        (End::V(c, 3), End::V(a, 0)),
        (End::B(0), End::V(a, 2)),
        (End::B(1), End::V(a, 3)),
        (End::B(2), End::V(c, 0)),
        (End::B(3), End::V(c, 1)),
        (End::B(4), End::V(b, 2)),
        (End::B(5), End::V(b, 3)),
    ];
    Diagram::from_edges(vec![p1(), p1(), p1()], 6, Side::Plus, &edges, 0).expect("null triangle is planar")
}

/// Closed diagram `tr((P1 * P1) P1)`.
pub fn null_closed_diagram() -> Diagram {
    let p1 = compose::single_box(Label::Box(BoxVec::p1(Side::Plus).coeffs), Side::Plus);
    let cp = compose::coproduct2(&p1, &p1).expect("2-boxes");
    compose::trace_closure(&compose::product(&cp, &p1).expect("2-boxes")).expect("closable")
}
