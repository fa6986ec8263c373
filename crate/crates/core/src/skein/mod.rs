//! Planar diagrams with 4-valent labelled vertices, stored as combinatorial
//! maps, and their evaluation by face reduction.
//!
//! Darts are numbered `4v + s` for slot `s` of vertex `v`, followed by one dart
//! per boundary point. Slots run counterclockwise from the `$` marker, which
//! sits in the region between slot 3 and slot 0.

mod builder;
mod canonical;
pub mod compose;
mod reduce;

pub use canonical::{canonicalize, CanonKey, Canonical};
pub use reduce::{
    evaluate, evaluate_traced, evaluate_with, find_small_face, reduce_once, reduce_open, rewrite, small_faces,
    Evaluation, FaceKind, SmallFace,
};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::twobox::{BoxVec, Side, TwoBoxModel};

pub(crate) use builder::{Builder, Node};
pub(crate) use reduce::expand_vertex;

/// Two `(vertex, slot)` ends joined by a strand.
pub type SlotPair = ((usize, usize), (usize, usize));

/// Vertex label: the normalized generator or an explicit 2-box.
#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    Generator,
    Box([Scalar; 3]),
}

impl Label {
    /// Coefficients over `(e, P1, P2)`.
    pub fn coeffs(&self, model: &TwoBoxModel) -> [Scalar; 3] {
        match self {
            Label::Generator => model.generator(Side::Plus).coeffs,
            Label::Box(c) => *c,
        }
    }
}

impl From<BoxVec> for Label {
    fn from(b: BoxVec) -> Self {
        Label::Box(b.coeffs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub label: Label,
    /// Shading of the `$` region.
    pub side: Side,
}

impl Vertex {
    pub fn new(label: Label, side: Side) -> Self {
        Vertex { label, side }
    }

    pub fn generator(side: Side) -> Self {
        Vertex::new(Label::Generator, side)
    }
}

/// Where a dart lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    /// Vertex and slot.
    V(usize, usize),
    /// Boundary point.
    B(usize),
}

/// A planar diagram, closed when `boundary == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub vertices: Vec<Vertex>,
    pub boundary: usize,
    /// Shading of the boundary region between the last point and point 0.
    pub boundary_side: Side,
    pub pairing: Vec<usize>,
    pub free_loops: usize,
}

/// A face: its corners as dart ids, in traversal order.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub corners: Vec<usize>,
    pub internal: bool,
}

impl Diagram {
    /// Closed diagram made of `n` loops.
    pub fn loops(n: usize) -> Self {
        Diagram {
            vertices: vec![],
            boundary: 0,
            boundary_side: Side::Plus,
            pairing: vec![],
            free_loops: n,
        }
    }

    /// Build and validate from explicit edges.
    pub fn from_edges(
        vertices: Vec<Vertex>,
        boundary: usize,
        boundary_side: Side,
        edges: &[(End, End)],
        free_loops: usize,
    ) -> Result<Self> {
        let nd = 4 * vertices.len() + boundary;
        let mut pairing = vec![usize::MAX; nd];
        let mut d = Diagram {
            vertices,
            boundary,
            boundary_side,
            pairing: vec![],
            free_loops,
        };
        for &(x, y) in edges {
            let (i, j) = (d.dart_of(x)?, d.dart_of(y)?);
            if i == j || pairing[i] != usize::MAX || pairing[j] != usize::MAX {
                return Err(Error::MalformedPairing(format!("{x:?} - {y:?} reuses a dart")));
            }
            pairing[i] = j;
            pairing[j] = i;
        }
        d.pairing = pairing;
        d.validate()?;
        Ok(d)
    }

    /// Closed diagram from `((v, slot), (w, slot))` edges.
    pub fn closed(vertices: Vec<Vertex>, edges: &[SlotPair], free_loops: usize) -> Result<Self> {
        let e: Vec<(End, End)> = edges
            .iter()
            .map(|&((v, s), (w, t))| (End::V(v, s), End::V(w, t)))
            .collect();
        Diagram::from_edges(vertices, 0, Side::Plus, &e, free_loops)
    }

    pub fn n_darts(&self) -> usize {
        4 * self.vertices.len() + self.boundary
    }

    pub fn is_closed(&self) -> bool {
        self.boundary == 0
    }

    pub fn dart(v: usize, s: usize) -> usize {
        4 * v + s % 4
    }

    pub fn boundary_dart(&self, k: usize) -> usize {
        4 * self.vertices.len() + k
    }

    fn dart_of(&self, e: End) -> Result<usize> {
        match e {
            End::V(v, s) if v < self.vertices.len() && s < 4 => Ok(Diagram::dart(v, s)),
            End::B(k) if k < self.boundary => Ok(self.boundary_dart(k)),
            _ => Err(Error::MalformedPairing(format!("endpoint {e:?} out of range"))),
        }
    }

    pub fn end(&self, d: usize) -> End {
        let nv = 4 * self.vertices.len();
        if d < nv {
            End::V(d / 4, d % 4)
        } else {
            End::B(d - nv)
        }
    }

    pub fn partner(&self, e: End) -> End {
        let d = match e {
            End::V(v, s) => Diagram::dart(v, s),
            End::B(k) => self.boundary_dart(k),
        };
        self.end(self.pairing[d])
    }

    /// Rotation around a vertex, or clockwise step around the outer boundary.
    fn sigma(&self, d: usize) -> usize {
        let nv = 4 * self.vertices.len();
        if d < nv {
            4 * (d / 4) + (d + 1) % 4
        } else {
            let k = d - nv;
            nv + (k + self.boundary - 1) % self.boundary
        }
    }

    /// Next corner around the same face.
    pub fn face_step(&self, d: usize) -> usize {
        self.pairing[self.sigma(d)]
    }

    /// Shading of the corner whose first dart is `d`.
    pub fn corner_side(&self, d: usize) -> Side {
        match self.end(d) {
            End::V(v, s) => self.vertices[v].side.flip_by(s + 1),
            End::B(k) => self.boundary_side.flip_by(k),
        }
    }

    pub fn faces(&self) -> Vec<Face> {
        let n = self.n_darts();
        let nv = 4 * self.vertices.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut corners = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                corners.push(d);
                d = self.face_step(d);
            }
            let internal = corners.iter().all(|&c| c < nv);
            out.push(Face { corners, internal });
        }
        out
    }

    /// Connected components as vertex lists; the boundary joins its own component.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let nvx = self.vertices.len();
        let infinity = nvx;
        let mut parent: Vec<usize> = (0..=nvx).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let owner = |d: usize| if d < 4 * nvx { d / 4 } else { infinity };
        for d in 0..self.n_darts() {
            let (a, b) = (find(&mut parent, owner(d)), find(&mut parent, owner(self.pairing[d])));
            parent[a] = b;
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..nvx {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Check the pairing, planarity per component, and shading.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_darts();
        if self.pairing.len() != n {
            return Err(Error::MalformedPairing(format!(
                "{} darts but pairing has {}",
                n,
                self.pairing.len()
            )));
        }
        if !self.boundary.is_multiple_of(2) {
            return Err(Error::ShadingInconsistent(format!(
                "odd boundary size {}",
                self.boundary
            )));
        }
        for (d, &p) in self.pairing.iter().enumerate() {
            if p >= n || p == d || self.pairing[p] != d {
                return Err(Error::MalformedPairing(format!(
                    "dart {d} -> {p} is not a fixed-point-free involution"
                )));
            }
        }
        let faces = self.faces();
        for f in &faces {
            let s = self.corner_side(f.corners[0]);
            if f.corners.iter().any(|&c| self.corner_side(c) != s) {
                return Err(Error::ShadingInconsistent(format!(
                    "face through darts {:?}",
                    f.corners
                )));
            }
        }
        let nv = self.vertices.len();
        let comp_of: Vec<usize> = {
            let mut c = vec![usize::MAX; nv];
            for (i, g) in self.components().iter().enumerate() {
                for &v in g {
                    c[v] = i;
                }
            }
            c
        };
        let ncomp = comp_of.iter().filter(|&&c| c != usize::MAX).max().map_or(0, |m| m + 1);
        // index ncomp stands for the component holding the boundary
        let mut vcount = vec![0i64; ncomp + 1];
        let mut dcount = vec![0i64; ncomp + 1];
        let mut fcount = vec![0i64; ncomp + 1];
        let mut boundary_comp = None;
        for d in 0..4 * nv {
            if let End::B(_) = self.end(self.pairing[d]) {
                boundary_comp = Some(comp_of[d / 4]);
            }
        }
        let bc = boundary_comp.unwrap_or(ncomp);
        let comp_of_dart = |d: usize| if d < 4 * nv { comp_of[d / 4] } else { bc };
        for v in 0..nv {
            vcount[comp_of[v]] += 1;
        }
        if self.boundary > 0 {
            vcount[bc] += 1;
        }
        for d in 0..n {
            dcount[comp_of_dart(d)] += 1;
        }
        for f in &faces {
            fcount[comp_of_dart(f.corners[0])] += 1;
        }
        for c in 0..=ncomp {
            if vcount[c] == 0 {
                continue;
            }
            let chi = vcount[c] - dcount[c] / 2 + fcount[c];
            if chi != 2 {
                return Err(Error::NonPlanar(format!(
                    "component {c} has Euler characteristic {chi}"
                )));
            }
        }
        Ok(())
    }
}

/// Expansion of the two triangle patterns over some fixed set of open diagrams.
pub trait TriangleExpansion {
    /// Look up a triangle by its canonical key. Returns the factor relating the
    /// canonical form to the stored pattern and the pattern's expansion.
    fn expansion(&self, key: &CanonKey) -> Option<(Scalar, &[(Scalar, Diagram)])>;
}

/// Scalar-weighted sum of diagrams, deduplicated by canonical form.
#[derive(Debug, Clone, Default)]
pub struct FormalSum {
    terms: Vec<(Scalar, Diagram)>,
    index: HashMap<CanonKey, usize>,
}

impl FormalSum {
    pub fn new() -> Self {
        FormalSum::default()
    }

    pub fn single(d: Diagram, model: &TwoBoxModel) -> Self {
        let mut s = FormalSum::new();
        s.push(Scalar::new(1.0, 0.0), d, model);
        s
    }

    pub fn push(&mut self, coeff: Scalar, d: Diagram, model: &TwoBoxModel) {
        if coeff == Scalar::new(0.0, 0.0) {
            return;
        }
        let c = canonicalize(&d, model);
        let coeff = coeff * c.factor;
        match self.index.get(&c.key) {
            Some(&i) => self.terms[i].0 += coeff,
            None => {
                self.index.insert(c.key, self.terms.len());
                self.terms.push((coeff, c.diagram));
            }
        }
    }

    pub fn terms(&self) -> &[(Scalar, Diagram)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Scalar, Diagram)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drop terms whose coefficient is below `rel` times the largest one.
    pub fn prune(self, rel: f64, model: &TwoBoxModel) -> Self {
        let top = self.terms.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max);
        let mut out = FormalSum::new();
        for (c, d) in self.terms {
            if c.norm() > rel * top {
                out.push(c, d, model);
            }
        }
        out
    }

    /// Total scalar when every term is empty.
    pub fn scalar_part(&self) -> Option<Scalar> {
        self.terms
            .iter()
            .map(|(c, d)| (d.vertices.is_empty() && d.free_loops == 0 && d.boundary == 0).then_some(*c))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(side: Side) -> Vertex {
        Vertex::generator(side)
    }

    #[test]
    fn circle_is_valid() {
        assert!(Diagram::loops(1).validate().is_ok());
    }

    #[test]
    fn double_cap_vertex() {
        let d = Diagram::closed(vec![g(Side::Plus)], &[((0, 0), (0, 1)), ((0, 2), (0, 3))], 0).unwrap();
        let f = d.faces();
        assert_eq!(f.iter().filter(|f| f.corners.len() == 1).count(), 2);
    }

    #[test]
    fn crossing_self_loop_is_nonplanar() {
        // slots 0-2 and 1-3 on one vertex: a figure eight on the torus
        let e = Diagram::closed(vec![g(Side::Plus)], &[((0, 0), (0, 2)), ((0, 1), (0, 3))], 0);
        assert!(
            matches!(e, Err(Error::NonPlanar(_)) | Err(Error::ShadingInconsistent(_))),
            "{e:?}"
        );
    }

    #[test]
    fn shading_mismatch_detected() {
        // theta graph with both vertices on opposite sides but glued slot-to-slot
        let ok = Diagram::closed(
            vec![g(Side::Plus), g(Side::Plus)],
            &[((0, 0), (1, 1)), ((0, 1), (1, 0)), ((0, 2), (1, 3)), ((0, 3), (1, 2))],
            0,
        );
        assert!(ok.is_ok(), "{ok:?}");
        let bad = Diagram::closed(
            vec![g(Side::Plus), g(Side::Minus)],
            &[((0, 0), (1, 1)), ((0, 1), (1, 0)), ((0, 2), (1, 3)), ((0, 3), (1, 2))],
            0,
        );
        assert!(matches!(bad, Err(Error::ShadingInconsistent(_))));
    }

    #[test]
    fn malformed_pairing() {
        let d = Diagram {
            vertices: vec![g(Side::Plus)],
            boundary: 0,
            boundary_side: Side::Plus,
            pairing: vec![1, 0, 2, 3],
            free_loops: 0,
        };
        assert!(matches!(d.validate(), Err(Error::MalformedPairing(_))));
        let e = Diagram::closed(vec![g(Side::Plus)], &[((0, 0), (0, 1)), ((0, 1), (0, 2))], 0);
        assert!(matches!(e, Err(Error::MalformedPairing(_))));
    }

    #[test]
    fn open_strands() {
        let d = Diagram::from_edges(
            vec![],
            4,
            Side::Plus,
            &[(End::B(0), End::B(3)), (End::B(1), End::B(2))],
            0,
        );
        assert!(d.is_ok());
        let crossing = Diagram::from_edges(
            vec![],
            4,
            Side::Plus,
            &[(End::B(0), End::B(2)), (End::B(1), End::B(3))],
            0,
        );
        assert!(crossing.is_err());
    }
}
