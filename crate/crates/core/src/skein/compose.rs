//! Boxes as open diagrams and the planar operations on them.
//!
//! An `n`-box has `2n` boundary points: bottom points `0..n` left to right, then
//! top points `n..2n` right to left, so strand `j` ends at top point `2n - 1 - j`.
//! The `$` region is the left edge.

use super::{Builder, Diagram, End, Label, Node, SlotPair, Vertex};
use crate::error::{Error, Result};
use crate::twobox::Side;

/// A single labelled 2-box.
pub fn single_box(label: Label, side: Side) -> Diagram {
    let edges: Vec<(End, End)> = (0..4).map(|k| (End::B(k), End::V(0, k))).collect();
    Diagram::from_edges(vec![Vertex::new(label, side)], 4, side, &edges, 0).expect("single box is planar")
}

/// Vertex-free diagram on `points` boundary points with the given pairs.
pub fn tl(points: usize, pairs: &[(usize, usize)], side: Side) -> Result<Diagram> {
    let edges: Vec<(End, End)> = pairs.iter().map(|&(a, b)| (End::B(a), End::B(b))).collect();
    Diagram::from_edges(vec![], points, side, &edges, 0)
}

/// Identity `n`-box.
pub fn identity(n: usize, side: Side) -> Diagram {
    let pairs: Vec<(usize, usize)> = (0..n).map(|j| (j, 2 * n - 1 - j)).collect();
    tl(2 * n, &pairs, side).expect("identity is planar")
}

/// Product of 2-box vertices stacked bottom to top on `n` strands.
/// `(p, label)` acts on strands `p` and `p + 1`; vertex slots are
/// bottom-left, bottom-right, top-right, top-left.
pub fn stack(n: usize, gens: &[(usize, Label)], side: Side) -> Result<Diagram> {
    let mut ends: Vec<End> = (0..n).map(End::B).collect();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (p, label) in gens {
        let p = *p;
        if p + 1 >= n {
            return Err(Error::MalformedPairing(format!(
                "generator position {p} on {n} strands"
            )));
        }
        let v = vertices.len();
        vertices.push(Vertex::new(label.clone(), side.flip_by(p)));
        edges.push((ends[p], End::V(v, 0)));
        edges.push((ends[p + 1], End::V(v, 1)));
        ends[p] = End::V(v, 3);
        ends[p + 1] = End::V(v, 2);
    }
    for (j, e) in ends.into_iter().enumerate() {
        edges.push((e, End::B(2 * n - 1 - j)));
    }
    Diagram::from_edges(vertices, 2 * n, side, &edges, 0)
}

/// Reflection exchanging top and bottom; labels are conjugated.
pub fn mirror(d: &Diagram) -> Diagram {
    let nv = d.vertices.len();
    let n = d.boundary;
    let vertices = d
        .vertices
        .iter()
        .map(|v| {
            let label = match &v.label {
                Label::Generator => Label::Generator,
                Label::Box(c) => Label::Box(c.map(|z| z.conj())),
            };
            Vertex::new(label, v.side)
        })
        .collect();
    let m = |dart: usize| match d.end(dart) {
        End::V(v, s) => 4 * v + 3 - s,
        End::B(k) => 4 * nv + (n - 1 - k),
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

/// Rotate the boundary labels: new point `k` is old point `k + clicks`.
pub fn rotate(d: &Diagram, clicks: usize) -> Diagram {
    let n = d.boundary;
    if n == 0 {
        return d.clone();
    }
    let nv4 = 4 * d.vertices.len();
    let m = |dart: usize| {
        if dart < nv4 {
            dart
        } else {
            nv4 + (dart - nv4 + n - clicks % n) % n
        }
    };
    let mut pairing = vec![0; d.n_darts()];
    for x in 0..d.n_darts() {
        pairing[m(x)] = m(d.pairing[x]);
    }
    Diagram {
        pairing,
        boundary_side: d.boundary_side.flip_by(clicks),
        ..d.clone()
    }
}

/// Glue boundary points of several parts together.
///
/// `joins` pairs `(part, point)` with `(part, point)`; `outer` lists the points
/// that become the new boundary, in order.
pub fn glue(parts: &[&Diagram], joins: &[SlotPair], outer: &[(usize, usize)], side: Side) -> Result<Diagram> {
    let mut b = Builder::new(outer.len(), side);
    let maps: Vec<_> = parts.iter().map(|p| b.import(p, &[], &[], true)).collect();
    let port = |(p, k): (usize, usize)| -> Result<Node> {
        let part = parts
            .get(p)
            .ok_or_else(|| Error::MalformedPairing(format!("no part {p}")))?;
        if k >= part.boundary {
            return Err(Error::MalformedPairing(format!("part {p} has no point {k}")));
        }
        Ok(maps[p].node(part.boundary_dart(k)))
    };
    for &(x, y) in joins {
        let (a, c) = (port(x)?, port(y)?);
        b.link(a, c);
    }
    for (k, &x) in outer.iter().enumerate() {
        let a = port(x)?;
        b.link(Node::B(k), a);
    }
    let d = b.build()?;
    d.validate()?;
    Ok(d)
}

fn half(d: &Diagram) -> Result<usize> {
    if d.boundary.is_multiple_of(2) {
        Ok(d.boundary / 2)
    } else {
        Err(Error::MalformedPairing("odd boundary".into()))
    }
}

/// `x` below `y`.
pub fn product(x: &Diagram, y: &Diagram) -> Result<Diagram> {
    let n = half(x)?;
    if half(y)? != n || x.boundary_side != y.boundary_side {
        return Err(Error::MalformedPairing("product of boxes of different type".into()));
    }
    let joins: Vec<_> = (0..n).map(|j| ((0, 2 * n - 1 - j), (1, j))).collect();
    let outer: Vec<_> = (0..n).map(|j| (0, j)).chain((n..2 * n).map(|j| (1, j))).collect();
    glue(&[x, y], &joins, &outer, x.boundary_side)
}

/// Markov trace closure: point `j` joined to `2n - 1 - j`.
pub fn trace_closure(x: &Diagram) -> Result<Diagram> {
    let n = half(x)?;
    let joins: Vec<_> = (0..n).map(|j| ((0, j), (0, 2 * n - 1 - j))).collect();
    glue(&[x], &joins, &[], Side::Plus)
}

/// Closed diagram for `<x, y> = tr(y* x)`.
pub fn pair_closure(x: &Diagram, y: &Diagram) -> Result<Diagram> {
    if x.boundary != y.boundary || x.boundary_side != y.boundary_side {
        return Err(Error::MalformedPairing(
            "inner product of boxes of different type".into(),
        ));
    }
    let ym = mirror(y);
    let n = x.boundary;
    // point k of x meets point k of y; the mirror renumbered it n - 1 - k
    let joins: Vec<_> = (0..n).map(|k| ((0, k), (1, n - 1 - k))).collect();
    glue(&[x, &ym], &joins, &[], Side::Plus)
}

/// Coproduct of 2-boxes: side by side, inner strands joined.
pub fn coproduct2(x: &Diagram, y: &Diagram) -> Result<Diagram> {
    if x.boundary != 4 || y.boundary != 4 {
        return Err(Error::MalformedPairing("coproduct needs 2-boxes".into()));
    }
    glue(
        &[x, y],
        &[((0, 1), (1, 0)), ((0, 2), (1, 3))],
        &[(0, 0), (1, 1), (1, 2), (0, 3)],
        x.boundary_side,
    )
}

/// The Jones 2-box picture (without its `1/delta`).
pub fn cup_cap(side: Side) -> Diagram {
    tl(4, &[(0, 1), (2, 3)], side).expect("planar")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{real, Scalar, Tolerance};
    use crate::skein::{canonicalize, evaluate};
    use crate::twobox::{BoxVec, Sign, TwoBoxModel};

    fn models() -> Vec<TwoBoxModel> {
        let t = Tolerance::default();
        vec![
            TwoBoxModel::from_classification_data(crate::scalar::depth3_delta(), Sign::Plus, &t).unwrap(),
            TwoBoxModel::from_classification_data(1.0 + 3f64.sqrt(), Sign::Minus, &t).unwrap(),
            TwoBoxModel::from_classification_data(4.5, Sign::Minus, &t).unwrap(),
        ]
    }

    fn bx(i: usize) -> Diagram {
        single_box(Label::Box(BoxVec::basis(Side::Plus, i).coeffs), Side::Plus)
    }

    #[test]
    fn mirror_involution() {
        let g = Label::Generator;
        let s = stack(3, &[(0, g.clone()), (1, g)], Side::Plus).unwrap();
        let m = mirror(&mirror(&s));
        assert_eq!(m, s);
        mirror(&s).validate().unwrap();
    }

    #[test]
    fn identity_traces() {
        let m = &models()[1];
        let d = m.delta();
        let id3 = identity(3, Side::Plus);
        assert!((evaluate(&trace_closure(&id3).unwrap(), m, None).unwrap() - d.powi(3)).norm() < 1e-12);
        assert!((evaluate(&pair_closure(&id3, &id3).unwrap(), m, None).unwrap() - d.powi(3)).norm() < 1e-12);
    }

    #[test]
    fn product_trace_matches_table() {
        for m in models() {
            for i in 0..3 {
                for j in 0..3 {
                    let d = trace_closure(&product(&bx(i), &bx(j)).unwrap()).unwrap();
                    let want = m.trace(
                        &m.product(&BoxVec::basis(Side::Plus, i), &BoxVec::basis(Side::Plus, j))
                            .unwrap(),
                    );
                    let got = evaluate(&d, &m, None).unwrap();
                    assert!((got - want).norm() < 1e-10, "{i}{j}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn coproduct_trace_matches_table() {
        for m in models() {
            for i in 0..3 {
                for j in 0..3 {
                    let d = trace_closure(&coproduct2(&bx(i), &bx(j)).unwrap()).unwrap();
                    let want = m.trace(
                        &m.coproduct(&BoxVec::basis(Side::Plus, i), &BoxVec::basis(Side::Plus, j))
                            .unwrap(),
                    );
                    let got = evaluate(&d, &m, None).unwrap();
                    assert!((got - want).norm() < 1e-10, "{i}{j}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn coproduct_coefficients_match_table() {
        // pair the coproduct diagram against each basis box
        for m in models() {
            for i in 0..3 {
                for j in 0..3 {
                    let cp = coproduct2(&bx(i), &bx(j)).unwrap();
                    let table = m
                        .coproduct(&BoxVec::basis(Side::Plus, i), &BoxVec::basis(Side::Plus, j))
                        .unwrap();
                    for k in 0..3 {
                        let got = evaluate(&pair_closure(&cp, &bx(k)).unwrap(), &m, None).unwrap();
                        let want = table.coeffs[k] * m.trace_vec()[k];
                        assert!((got - want).norm() < 1e-10, "{i}{j}{k}: {got} vs {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_matches_matrix() {
        for m in models() {
            for i in 0..3 {
                let r = rotate(&bx(i), 1);
                let want = m.rotate(&BoxVec::basis(Side::Plus, i));
                for k in 0..3 {
                    let probe = single_box(Label::Box(BoxVec::basis(Side::Minus, k).coeffs), Side::Minus);
                    let got = evaluate(&pair_closure(&r, &probe).unwrap(), &m, None).unwrap();
                    let w = want.coeffs[k] * m.trace_vec()[k];
                    assert!((got - w).norm() < 1e-10, "{i}{k}: {got} vs {w}");
                }
            }
        }
    }

    #[test]
    fn jones_projection_is_coproduct_unit() {
        let m = &models()[1];
        let x = single_box(Label::Box([real(0.3), real(1.0), real(-2.0)]), Side::Plus);
        let e = cup_cap(Side::Plus);
        let cp = coproduct2(&e, &x).unwrap();
        let c = canonicalize(&cp, m);
        assert_eq!(c.key, canonicalize(&x, m).key);
        let _ = Scalar::new(0.0, 0.0);
    }
}
