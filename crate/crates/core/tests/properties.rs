mod common;

use proptest::prelude::*;
use skeinlab::skein::{self, compose, Diagram, Label};
use skeinlab::twobox::{BoxVec, Side, Sign, TwoBoxModel};
use skeinlab::{Scalar, Tolerance};

fn model(which: usize) -> TwoBoxModel {
    let t = Tolerance::default();
    match which {
        0 => TwoBoxModel::from_classification_data(1.0 + 3f64.sqrt(), Sign::Minus, &t),
        1 => TwoBoxModel::from_classification_data(skeinlab::scalar::depth3_delta(), Sign::Plus, &t),
        _ => TwoBoxModel::from_classification_data(5.0, Sign::Minus, &t),
    }
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = [Scalar; 3]> {
    proptest::array::uniform3((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Scalar::new(re, im)))
}

fn label() -> impl Strategy<Value = Label> {
    prop_oneof![Just(Label::Generator), coeffs().prop_map(Label::Box)]
}

fn stack3(max: usize) -> impl Strategy<Value = Vec<(usize, Label)>> {
    proptest::collection::vec((0..2usize, label()), 0..=max)
}

fn eval(d: &Diagram, m: &TwoBoxModel) -> Scalar {
    skein::evaluate(d, m, None).unwrap()
}

fn close(a: Scalar, b: Scalar) -> bool {
    common::rel_diff(a, b) < 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_stack_is_algebra_trace(w in 0..3usize, x in coeffs(), y in coeffs(), z in coeffs()) {
        let m = model(w);
        let d = compose::stack(2, &[(0, Label::Box(x)), (0, Label::Box(y)), (0, Label::Box(z))], Side::Plus).unwrap();
        let v = eval(&compose::trace_closure(&d).unwrap(), &m);
        let bx = |c| BoxVec::new(Side::Plus, c);
        let p = m.product(&m.product(&bx(x), &bx(y)).unwrap(), &bx(z)).unwrap();
        prop_assert!(close(v, m.trace(&p)), "{} vs {}", v, m.trace(&p));
    }

    #[test]
    fn evaluation_is_linear_in_a_label(w in 0..3usize, x in coeffs(), y in coeffs(), rest in stack3(3),
                                       s in -2.0..2.0f64) {
        let m = model(w);
        let build = |c: [Scalar; 3]| {
            let mut g = vec![(0, Label::Box(c))];
            g.extend(rest.iter().cloned());
            compose::trace_closure(&compose::stack(3, &g, Side::Plus).unwrap()).unwrap()
        };
        let mix: [Scalar; 3] = std::array::from_fn(|k| x[k] + y[k] * s);
        let lhs = eval(&build(mix), &m);
        let rhs = eval(&build(x), &m) + eval(&build(y), &m) * s;
        prop_assert!(close(lhs, rhs), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn pairing_is_rotation_invariant(w in 0..3usize, a in stack3(2), b in stack3(2), k in 0..3usize) {
        let m = model(w);
        let x = compose::stack(3, &a, Side::Plus).unwrap();
        let y = compose::stack(3, &b, Side::Plus).unwrap();
        let v0 = eval(&compose::pair_closure(&x, &y).unwrap(), &m);
        let v1 = eval(&compose::pair_closure(&compose::rotate(&x, 2 * k), &compose::rotate(&y, 2 * k)).unwrap(), &m);
        prop_assert!(close(v0, v1), "{} vs {}", v0, v1);
    }

    #[test]
    fn pairing_is_hermitian(w in 0..3usize, a in stack3(2), b in stack3(2)) {
        let m = model(w);
        let x = compose::stack(3, &a, Side::Plus).unwrap();
        let y = compose::stack(3, &b, Side::Plus).unwrap();
        let xy = eval(&compose::pair_closure(&x, &y).unwrap(), &m);
        let yx = eval(&compose::pair_closure(&y, &x).unwrap(), &m);
        prop_assert!(close(xy, yx.conj()), "{} vs {}", xy, yx);
    }

    #[test]
    fn random_closed_diagrams_agree_across_orders(seed in any::<u64>(), w in 0..3usize) {
        use rand::{Rng, SeedableRng};
        let m = model(w);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_closed(&mut rng, 4);
        let base = eval(&d, &m);
        let mut choose = |f: &[skein::SmallFace]| rng.gen_range(0..f.len());
        let b = skeinlab::threebox::Basis14::new().unwrap();
        let g = skeinlab::threebox::gram(&m, &b).unwrap();
        let t = skeinlab::threebox::solve_triangle(&m, &b, &g).unwrap();
        let v = skein::evaluate_with(&d, &m, Some(&t), &mut choose).unwrap().value;
        prop_assert!(close(base, v), "{} vs {}", base, v);
    }
}
