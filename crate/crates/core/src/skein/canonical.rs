//! Canonical relabeling of diagrams.
//!
//! Open diagrams are anchored at the boundary: vertices are numbered in
//! breadth-first order starting from boundary point 0, and each vertex frame
//! is rotated so that its discovering dart becomes slot 0. Closed components
//! take the least encoding over every starting dart and are then sorted.
//! Rotating a generator frame by one click multiplies it by the chirality sign;
//! that sign is returned separately as `factor`.

use super::{Diagram, End, Label, Vertex};
use crate::scalar::{real, Scalar, ONE};
use crate::twobox::{mat_vec, TwoBoxModel};

/// Hashable encoding of a canonical diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonKey(pub Vec<u64>);

/// `diagram` times `factor` equals the input.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub key: CanonKey,
    pub factor: Scalar,
    pub diagram: Diagram,
}

fn bits(x: f64) -> u64 {
    (x + 0.0).to_bits()
}

fn label_code(label: &Label, off: usize, model: &TwoBoxModel, out: &mut Vec<u64>) {
    match label {
        Label::Generator => out.push(0),
        Label::Box(c) => {
            let c = if off % 2 == 1 { mat_vec(model.rotation(), c) } else { *c };
            out.push(1);
            out.extend(c.iter().flat_map(|z| [bits(z.re), bits(z.im)]));
        }
    }
}

/// BFS numbering from a seed list of `(vertex, offset)` discoveries.
struct Walk {
    order: Vec<usize>,
    off: Vec<Option<usize>>,
}

impl Walk {
    fn new(nv: usize) -> Self {
        Walk {
            order: vec![],
            off: vec![None; nv],
        }
    }

    fn visit(&mut self, v: usize, s: usize) {
        if self.off[v].is_none() {
            self.off[v] = Some(s);
            self.order.push(v);
        }
    }

    fn run(&mut self, d: &Diagram, from: usize) {
        let mut i = from;
        while i < self.order.len() {
            let v = self.order[i];
            let o = self.off[v].unwrap_or(0);
            for m in 0..4 {
                if let End::V(w, t) = d.partner(End::V(v, (o + m) % 4)) {
                    self.visit(w, t);
                }
            }
            i += 1;
        }
    }
}

fn code(end: End, pos: &[usize], off: &[Option<usize>]) -> u64 {
    match end {
        End::B(k) => 2 * k as u64 + 1,
        End::V(w, t) => {
            let o = off[w].unwrap_or(0);
            2 * (4 * pos[w] + (t + 4 - o) % 4) as u64
        }
    }
}

/// Encode the vertices in `order` with frames `off`; `pos` must map them to 0..
fn encode_vertices(
    d: &Diagram,
    order: &[usize],
    off: &[Option<usize>],
    pos: &[usize],
    model: &TwoBoxModel,
    out: &mut Vec<u64>,
) {
    for &v in order {
        let o = off[v].unwrap_or(0);
        let vx = &d.vertices[v];
        out.push(vx.side.flip_by(o) as u64);
        label_code(&vx.label, o, model, out);
        for m in 0..4 {
            out.push(code(d.partner(End::V(v, (o + m) % 4)), pos, off));
        }
    }
}

fn component_encoding(
    d: &Diagram,
    comp: &[usize],
    v: usize,
    s: usize,
    model: &TwoBoxModel,
) -> (Vec<u64>, Vec<usize>, Vec<Option<usize>>) {
    let mut w = Walk::new(d.vertices.len());
    w.visit(v, s);
    w.run(d, 0);
    debug_assert_eq!(w.order.len(), comp.len());
    let mut pos = vec![0; d.vertices.len()];
    for (i, &x) in w.order.iter().enumerate() {
        pos[x] = i;
    }
    let mut enc = vec![comp.len() as u64];
    encode_vertices(d, &w.order, &w.off, &pos, model, &mut enc);
    (enc, w.order, w.off)
}

pub fn canonicalize(d: &Diagram, model: &TwoBoxModel) -> Canonical {
    let nv = d.vertices.len();
    let mut walk = Walk::new(nv);
    for k in 0..d.boundary {
        if let End::V(v, s) = d.partner(End::B(k)) {
            walk.visit(v, s);
            walk.run(d, walk.order.len() - 1);
        }
    }
    let mut order = walk.order.clone();
    let mut off = walk.off.clone();

    // closed components, each in its least rotation, then sorted
    // (code, dart order, frame offsets)
    type Encoded = (Vec<u64>, Vec<usize>, Vec<Option<usize>>);
    let mut comps: Vec<Encoded> = d
        .components()
        .into_iter()
        .filter(|c| off[c[0]].is_none())
        .map(|c| {
            (0..c.len() * 4)
                .map(|i| component_encoding(d, &c, c[i / 4], i % 4, model))
                .min_by(|a, b| a.0.cmp(&b.0))
                .expect("component has a vertex")
        })
        .collect();
    comps.sort_by(|a, b| a.0.cmp(&b.0));
    for (_, o, f) in &comps {
        for &v in o {
            order.push(v);
            off[v] = f[v];
        }
    }

    let mut pos = vec![0; nv];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut key = vec![
        d.boundary as u64,
        d.boundary_side as u64,
        nv as u64,
        d.free_loops as u64,
    ];
    for k in 0..d.boundary {
        key.push(code(d.partner(End::B(k)), &pos, &off));
    }
    encode_vertices(d, &order, &off, &pos, model, &mut key);

    let sigma = real(model.sigma().value());
    let mut factor = ONE;
    let vertices: Vec<Vertex> = order
        .iter()
        .map(|&v| {
            let o = off[v].unwrap_or(0);
            let vx = &d.vertices[v];
            let label = match &vx.label {
                Label::Generator => {
                    if o % 2 == 1 {
                        factor *= sigma;
                    }
                    Label::Generator
                }
                Label::Box(c) => Label::Box(if o % 2 == 1 { mat_vec(model.rotation(), c) } else { *c }),
            };
            Vertex::new(label, vx.side.flip_by(o))
        })
        .collect();
    let remap = |dart: usize| -> usize {
        match d.end(dart) {
            End::V(v, s) => 4 * pos[v] + (s + 4 - off[v].unwrap_or(0)) % 4,
            End::B(k) => 4 * nv + k,
        }
    };
    let mut pairing = vec![0; d.n_darts()];
    for dart in 0..d.n_darts() {
        pairing[remap(dart)] = remap(d.pairing[dart]);
    }
    let diagram = Diagram {
        vertices,
        boundary: d.boundary,
        boundary_side: d.boundary_side,
        pairing,
        free_loops: d.free_loops,
    };
    Canonical {
        key: CanonKey(key),
        factor,
        diagram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Tolerance;
    use crate::skein::compose;
    use crate::twobox::{Side, Sign};

    fn model() -> TwoBoxModel {
        TwoBoxModel::from_classification_data(1.0 + 3f64.sqrt(), Sign::Minus, &Tolerance::default()).unwrap()
    }

    fn relabel(d: &Diagram, perm: &[usize], rot: &[usize]) -> Diagram {
        let nv = d.vertices.len();
        let mut vertices = vec![d.vertices[0].clone(); nv];
        for v in 0..nv {
            vertices[perm[v]] = Vertex::new(d.vertices[v].label.clone(), d.vertices[v].side.flip_by(rot[v]));
        }
        let m = |dart: usize| match d.end(dart) {
            End::V(v, s) => 4 * perm[v] + (s + 4 - rot[v]) % 4,
            End::B(k) => 4 * nv + k,
        };
        let mut pairing = vec![0; d.n_darts()];
        for x in 0..d.n_darts() {
            pairing[m(x)] = m(d.pairing[x]);
        }
        Diagram {
            vertices,
            pairing,
            ..d.clone()
        }
    }

    #[test]
    fn invariant_under_relabeling() {
        let m = model();
        let g = Label::Generator;
        let d = compose::stack(3, &[(0, g.clone()), (1, g.clone()), (0, g)], Side::Plus).unwrap();
        let c0 = canonicalize(&d, &m);
        for (perm, rot) in [([2, 0, 1], [0, 0, 0]), ([1, 2, 0], [1, 2, 3]), ([0, 1, 2], [2, 2, 1])] {
            let e = relabel(&d, &perm, &rot);
            e.validate().unwrap();
            let c = canonicalize(&e, &m);
            assert_eq!(c.key, c0.key);
            let sign: i32 = rot.iter().map(|r| (r % 2) as i32).sum();
            let expect = if sign % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(c.factor / c0.factor, real(expect));
        }
    }

    #[test]
    fn closed_components_sorted() {
        let m = model();
        let a = Diagram::closed(
            vec![Vertex::generator(Side::Plus), Vertex::generator(Side::Plus)],
            &[((0, 0), (1, 1)), ((0, 1), (1, 0)), ((0, 2), (1, 3)), ((0, 3), (1, 2))],
            0,
        )
        .unwrap();
        let c1 = canonicalize(&a, &m);
        let b = relabel(&a, &[1, 0], &[1, 3]);
        assert_eq!(canonicalize(&b, &m).key, c1.key);
        assert!(canonicalize(&c1.diagram, &m).factor == ONE);
    }
}
