//! Face reduction: loops, 1-gons, 2-gons and (with a table) 3-gons.

use super::{canonicalize, Builder, Diagram, End, FormalSum, Label, Node, TriangleExpansion, Vertex};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ONE, ZERO};
use crate::twobox::{mat_vec, BoxVec, Side, TwoBoxModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FaceKind {
    OneGon,
    TwoGon,
    ThreeGon,
}

/// An internal face with at most three distinct vertices, as `(vertex, slot)` corners.
///
/// Corner `(v, s)` is the region between slots `s` and `s + 1` of `v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SmallFace {
    pub kind: FaceKind,
    pub min_vertex: usize,
    pub corners: Vec<(usize, usize)>,
}

/// Result of a full evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Scalar,
    /// Number of rewrites applied.
    pub steps: usize,
}

/// All reducible internal faces, best first: size, then least vertex id.
pub fn small_faces(d: &Diagram) -> Vec<SmallFace> {
    let mut out: Vec<SmallFace> = d
        .faces()
        .into_iter()
        .filter(|f| f.internal && f.corners.len() <= 3)
        .filter_map(|f| {
            let corners: Vec<(usize, usize)> = f.corners.iter().map(|&c| (c / 4, c % 4)).collect();
            let mut vs: Vec<usize> = corners.iter().map(|c| c.0).collect();
            vs.sort();
            vs.dedup();
            if vs.len() != corners.len() {
                return None;
            }
            let kind = match corners.len() {
                1 => FaceKind::OneGon,
                2 => FaceKind::TwoGon,
                _ => FaceKind::ThreeGon,
            };
            Some(SmallFace {
                kind,
                min_vertex: vs[0],
                corners,
            })
        })
        .collect();
    out.sort();
    out
}

pub fn find_small_face(d: &Diagram) -> Result<SmallFace> {
    small_faces(d)
        .into_iter()
        .next()
        .ok_or_else(|| Error::InvariantViolation("no face with at most 3 sides".into()))
}

/// Label coefficients in the frame whose slot 0 is the old slot `off`.
fn frame_coeffs(model: &TwoBoxModel, label: &Label, off: usize) -> [Scalar; 3] {
    let c = label.coeffs(model);
    if off % 2 == 1 {
        mat_vec(model.rotation(), &c)
    } else {
        c
    }
}

/// Replace vertex `x` (frame offset `off`) by one of its three pictures.
///
/// `choice` 0 is the identity (slots 0-3, 1-2), 1 is the Jones picture
/// (slots 0-1, 2-3, coefficient not included), 2 is a generator vertex.
fn picture(b: &mut Builder, node: impl Fn(usize) -> Node, x: usize, side: Side, off: usize, choice: usize) {
    let d = |m: usize| node(Diagram::dart(x, off + m));
    match choice {
        0 => {
            b.link(d(0), d(3));
            b.link(d(1), d(2));
        }
        1 => {
            b.link(d(0), d(1));
            b.link(d(2), d(3));
        }
        _ => {
            let n = b.add_vertex(Vertex::generator(side.flip_by(off)));
            for m in 0..4 {
                b.link(Node::V(n, m), d(m));
            }
        }
    }
}

/// Expand the label of vertex `v` over `(id, e, G)` in its own frame.
pub(crate) fn expand_vertex(d: &Diagram, v: usize, model: &TwoBoxModel) -> Result<Vec<(Scalar, Diagram)>> {
    let idg = model.decompose(&BoxVec::new(Side::Plus, d.vertices[v].label.coeffs(model)));
    let weights = [idg[0], idg[1] / model.delta(), idg[2]];
    let mut out = Vec::new();
    for (choice, &w) in weights.iter().enumerate() {
        if w == ZERO {
            continue;
        }
        let mut b = Builder::new(d.boundary, d.boundary_side);
        let host = b.import(d, &[v], &[], false);
        picture(&mut b, |x| host.node(x), v, d.vertices[v].side, 0, choice);
        out.push((w, b.build()?));
    }
    Ok(out)
}

/// Apply the rewrite rule for one small face.
pub fn rewrite(
    d: &Diagram,
    face: &SmallFace,
    model: &TwoBoxModel,
    triangle: Option<&dyn TriangleExpansion>,
) -> Result<Vec<(Scalar, Diagram)>> {
    let dart = Diagram::dart;
    match face.corners[..] {
        [(v, s)] => {
            let c = model.cap_coeffs(&d.vertices[v].label.coeffs(model), (s + 1) % 4);
            if c == ZERO {
                return Ok(vec![]);
            }
            let mut b = Builder::new(d.boundary, d.boundary_side);
            let host = b.import(d, &[v], &[dart(v, s), dart(v, s + 1)], false);
            b.link(host.node(dart(v, s + 2)), host.node(dart(v, s + 3)));
            Ok(vec![(c, b.build()?)])
        }
        [(v, s), (w, t)] => {
            let cv = frame_coeffs(model, &d.vertices[v].label, s);
            let cw = frame_coeffs(model, &d.vertices[w].label, t);
            let side = d.vertices[v].side.flip_by(s);
            if d.vertices[w].side.flip_by(t) != side {
                return Err(Error::InvariantViolation(
                    "2-gon joins vertices of different shading".into(),
                ));
            }
            let fused: [Scalar; 3] = std::array::from_fn(|k| cv[k] * cw[k]);
            if fused.iter().all(|&z| z == ZERO) {
                return Ok(vec![]);
            }
            let mut b = Builder::new(d.boundary, d.boundary_side);
            let host = b.import(
                d,
                &[v, w],
                &[dart(v, s), dart(v, s + 1), dart(w, t), dart(w, t + 1)],
                false,
            );
            let n = b.add_vertex(Vertex::new(Label::Box(fused), side));
            for (m, x) in [dart(v, s + 2), dart(v, s + 3), dart(w, t + 2), dart(w, t + 3)]
                .into_iter()
                .enumerate()
            {
                b.link(Node::V(n, m), host.node(x));
            }
            Ok(vec![(ONE, b.build()?)])
        }
        [(u, i), (v, j), (w, k)] => triangle_rewrite(d, [(u, i), (w, k), (v, j)], model, triangle),
        _ => Err(Error::InvariantViolation("face handle has more than 3 corners".into())),
    }
}

/// 3-gon rule. `ccw` lists the corners so that the external darts in
/// counterclockwise order are slots 2, 3 of each corner's frame in turn.
fn triangle_rewrite(
    d: &Diagram,
    ccw: [(usize, usize); 3],
    model: &TwoBoxModel,
    triangle: Option<&dyn TriangleExpansion>,
) -> Result<Vec<(Scalar, Diagram)>> {
    let dart = Diagram::dart;
    let verts = [ccw[0].0, ccw[1].0, ccw[2].0];
    let dec: Vec<[Scalar; 3]> = ccw
        .iter()
        .map(|&(x, o)| model.decompose(&BoxVec::new(Side::Plus, frame_coeffs(model, &d.vertices[x].label, o))))
        .collect();
    let inv_delta = ONE / model.delta();
    let mut out = Vec::new();
    for code in 0..26 {
        let ch = [code % 3, (code / 3) % 3, code / 9];
        let mut coef = ONE;
        for (x, &c) in ch.iter().enumerate() {
            coef *= dec[x][c] * if c == 1 { inv_delta } else { ONE };
        }
        if coef == ZERO {
            continue;
        }
        let mut b = Builder::new(d.boundary, d.boundary_side);
        let host = b.import(d, &verts, &[], false);
        for (x, &c) in ch.iter().enumerate() {
            let (v, o) = ccw[x];
            picture(&mut b, |y| host.node(y), v, d.vertices[v].side, o, c);
        }
        out.push((coef, b.build()?));
    }

    let ggg = dec[0][2] * dec[1][2] * dec[2][2];
    if ggg == ZERO {
        return Ok(out);
    }
    let table = triangle.ok_or(Error::TriangleTableRequired)?;
    let ext: Vec<usize> = ccw
        .iter()
        .flat_map(|&(x, o)| [dart(x, o + 2), dart(x, o + 3)])
        .collect();
    let first_side = d.vertices[ccw[0].0].side.flip_by(ccw[0].1);
    let start = if first_side == Side::Plus { 0 } else { 1 };

    // the triangle alone, as an open 3-box in the frames of its corners
    let sides: Vec<Vertex> = ccw
        .iter()
        .map(|&(x, o)| Vertex::generator(d.vertices[x].side.flip_by(o)))
        .collect();
    let mut edges = vec![
        (End::V(0, 0), End::V(1, 1)),
        (End::V(1, 0), End::V(2, 1)),
        (End::V(2, 0), End::V(0, 1)),
    ];
    for bpt in 0..6 {
        let e = (start + bpt) % 6;
        edges.push((End::B(bpt), End::V(e / 2, 2 + e % 2)));
    }
    let tri = Diagram::from_edges(sides, 6, Side::Plus, &edges, 0)?;
    let canon = canonicalize(&tri, model);
    let (pattern_factor, terms) = table
        .expansion(&canon.key)
        .ok_or_else(|| Error::InvariantViolation("triangle does not match a stored pattern".into()))?;
    let coef = ggg * canon.factor / pattern_factor;

    let internal: Vec<usize> = ccw.iter().flat_map(|&(x, o)| [dart(x, o), dart(x, o + 1)]).collect();
    for (c, basis) in terms {
        if *c == ZERO {
            continue;
        }
        let mut b = Builder::new(d.boundary, d.boundary_side);
        let host = b.import(d, &verts, &internal, false);
        let inner = b.import(basis, &[], &[], true);
        for bpt in 0..6 {
            b.link(inner.node(basis.boundary_dart(bpt)), host.node(ext[(start + bpt) % 6]));
        }
        out.push((coef * c, b.build()?));
    }
    Ok(out)
}

fn reduce_counted(
    s: &FormalSum,
    model: &TwoBoxModel,
    triangle: Option<&dyn TriangleExpansion>,
) -> Result<(FormalSum, usize)> {
    let mut out = FormalSum::new();
    let mut steps = 0;
    for (c, d) in s.terms() {
        if d.free_loops > 0 {
            let mut e = d.clone();
            e.free_loops = 0;
            out.push(c * model.delta().powu(d.free_loops as u32), e, model);
            steps += 1;
            continue;
        }
        if d.vertices.is_empty() {
            out.push(*c, d.clone(), model);
            continue;
        }
        match small_faces(d).first() {
            Some(f) => {
                for (k, e) in rewrite(d, f, model, triangle)? {
                    out.push(c * k, e, model);
                }
                steps += 1;
            }
            None if d.is_closed() => {
                return Err(Error::InvariantViolation("closed diagram without a small face".into()))
            }
            None => out.push(*c, d.clone(), model),
        }
    }
    Ok((out.prune(model.tolerance().eq_tol * 1e-6, model), steps))
}

/// One rewrite on every term that admits one.
pub fn reduce_once(s: &FormalSum, model: &TwoBoxModel, triangle: Option<&dyn TriangleExpansion>) -> Result<FormalSum> {
    reduce_counted(s, model, triangle).map(|(f, _)| f)
}

/// Reduce until no term has a loop or a small internal face.
pub fn reduce_open(d: &Diagram, model: &TwoBoxModel, triangle: Option<&dyn TriangleExpansion>) -> Result<FormalSum> {
    let mut s = FormalSum::single(d.clone(), model);
    loop {
        let (next, steps) = reduce_counted(&s, model, triangle)?;
        s = next;
        if steps == 0 {
            return Ok(s);
        }
    }
}

pub fn evaluate_traced(
    d: &Diagram,
    model: &TwoBoxModel,
    triangle: Option<&dyn TriangleExpansion>,
) -> Result<Evaluation> {
    if !d.is_closed() {
        return Err(Error::NotClosed);
    }
    d.validate()?;
    let mut s = FormalSum::single(d.clone(), model);
    let mut total = 0;
    loop {
        if let Some(value) = s.scalar_part() {
            return Ok(Evaluation { value, steps: total });
        }
        let (next, steps) = reduce_counted(&s, model, triangle)?;
        s = next;
        total += steps;
    }
}

/// Evaluate a closed diagram to a scalar.
pub fn evaluate(d: &Diagram, model: &TwoBoxModel, triangle: Option<&dyn TriangleExpansion>) -> Result<Scalar> {
    evaluate_traced(d, model, triangle).map(|e| e.value)
}

/// Depth-first evaluation where `choose` picks which small face to reduce.
pub fn evaluate_with(
    d: &Diagram,
    model: &TwoBoxModel,
    triangle: Option<&dyn TriangleExpansion>,
    choose: &mut dyn FnMut(&[SmallFace]) -> usize,
) -> Result<Evaluation> {
    fn rec(
        d: &Diagram,
        model: &TwoBoxModel,
        triangle: Option<&dyn TriangleExpansion>,
        choose: &mut dyn FnMut(&[SmallFace]) -> usize,
        steps: &mut usize,
    ) -> Result<Scalar> {
        if d.free_loops > 0 {
            *steps += 1;
            let mut e = d.clone();
            e.free_loops = 0;
            return Ok(model.delta().powu(d.free_loops as u32) * rec(&e, model, triangle, choose, steps)?);
        }
        if d.vertices.is_empty() {
            return Ok(ONE);
        }
        let faces = small_faces(d);
        if faces.is_empty() {
            return Err(Error::InvariantViolation("closed diagram without a small face".into()));
        }
        let pick = choose(&faces) % faces.len();
        *steps += 1;
        let mut total = ZERO;
        for (c, e) in rewrite(d, &faces[pick], model, triangle)? {
            total += c * rec(&e, model, triangle, choose, steps)?;
        }
        Ok(total)
    }
    if !d.is_closed() {
        return Err(Error::NotClosed);
    }
    d.validate()?;
    let mut steps = 0;
    let value = rec(d, model, triangle, choose, &mut steps)?;
    Ok(Evaluation { value, steps })
}
