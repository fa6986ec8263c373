#![allow(dead_code)]

use rand::Rng;
use skeinlab::skein::{compose, Diagram, Label};
use skeinlab::twobox::Side;
use skeinlab::Scalar;

pub fn random_label<R: Rng>(rng: &mut R) -> Label {
    if rng.gen_bool(0.35) {
        return Label::Generator;
    }
    Label::Box(std::array::from_fn(|_| {
        Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }))
}

fn random_stack<R: Rng>(rng: &mut R, n: usize, count: usize) -> Diagram {
    let gens: Vec<(usize, Label)> = (0..count)
        .map(|_| (rng.gen_range(0..n - 1), random_label(rng)))
        .collect();
    compose::stack(n, &gens, Side::Plus).expect("stacks are planar")
}

/// Closed diagram with between 1 and `max_vertices` labelled vertices:
/// two random stacks of 2- or 3-boxes, one rotated, paired against each other.
pub fn random_closed<R: Rng>(rng: &mut R, max_vertices: usize) -> Diagram {
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(1..=max_vertices);
    let k1 = rng.gen_range(0..=k);
    let x = random_stack(rng, n, k1);
    let y = random_stack(rng, n, k - k1);
    let x = compose::rotate(&x, 2 * rng.gen_range(0..n));
    compose::pair_closure(&x, &y).expect("same size")
}

pub fn rel_diff(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}
