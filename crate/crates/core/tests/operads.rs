use std::sync::Arc;

use hoalg::complex::{Complex, Window, FULL};
use hoalg::lin::{Color, Label, Lin};
use hoalg::operad::builtin::{random_operad, Assoc};
use hoalg::operad::collection::{check_odot_associativity, odot, NCollection};
use hoalg::operad::free::{extend_from_collection, free_operad};
use hoalg::operad::unital::red;
use hoalg::operad::{check_morphism, check_operad, ColorSet, Operad, Sig};
use proptest::prelude::*;

/// One-colored collection concentrated in degree 0 with the given dimension per arity 0, 1, 2, ...
fn collection(dims: &[usize], w: Window) -> NCollection {
    let mut v = NCollection::new(ColorSet::single(), w);
    let mut k = 0;
    for (a, &d) in dims.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let elems: Vec<(Label, i64)> = (0..d).map(|_| {
            k += 1;
            (Label::Int(k), 0)
        }).collect();
        v.insert(Sig::new(vec![0; a], 0), Complex::new(elems, |_| Lin::zero(), FULL).unwrap());
    }
    v
}

fn catalan(n: usize) -> usize {
    (0..n).fold(1, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn odot_in_arity_two(a in 0usize..3, b in 0usize..3) {
        let w = Window::new(2, 3);
        let v = collection(&[0, a, b], w);
        prop_assert_eq!(odot(&v, &v).unwrap().dim(&Sig::new(vec![0, 0], 0)), b * a * a + a * b);
    }

    #[test]
    fn odot_is_associative(x in proptest::collection::vec(0usize..2, 3), y in proptest::collection::vec(0usize..2, 3)) {
        let w = Window::new(3, 3);
        let (v, u) = (collection(&x[1..], w), collection(&y[1..], w));
        let e = collection(&[0, 1], w);
        check_odot_associativity(&v, &u, &e).unwrap();
        check_odot_associativity(&v, &u, &v).unwrap();
    }

    #[test]
    fn random_operads_satisfy_the_operad_axioms(seed in 0u64..1000) {
        check_operad(&random_operad(seed), &Window::new(3, 3), 3).unwrap();
    }

    #[test]
    fn red_is_idempotent_and_keeps_non_units(seq in proptest::collection::vec(0 as Color..4, 1..12)) {
        let r = red(&seq, Some(0)).unwrap();
        prop_assert_eq!(red(&r, Some(0)).unwrap(), r.clone());
        let kept: Vec<Color> = seq.iter().copied().filter(|&c| c != 0).collect();
        if kept.is_empty() {
            prop_assert_eq!(r, vec![0]);
        } else {
            prop_assert_eq!(r, kept);
        }
    }
}

#[test]
fn red_examples() {
    // s e t r e e v u e with e = 0
    let (s, e, t, r, v, u) = (1, 0, 2, 3, 4, 5);
    assert_eq!(red(&[s, e, t, r, e, e, v, u, e], Some(e)).unwrap(), vec![s, t, r, v, u]);
    assert_eq!(red(&[e, e, e], Some(e)).unwrap(), vec![e]);
    assert!(red(&[s], None).is_err());
}

#[test]
fn free_binary_operad_counts_binary_trees() {
    let w = Window::new(4, 3);
    let f = free_operad(&collection(&[0, 0, 1], w), &w);
    for n in 2..=4 {
        let count = f.elements(0, n, 3).into_iter().filter(|x| f.sig(x).arity() == n).count();
        assert_eq!(count, catalan(n - 1), "arity {n}");
    }
}

#[test]
fn extension_to_as_is_a_morphism() {
    let w = Window::new(4, 3);
    let f = Arc::new(free_operad(&collection(&[0, 0, 1], w), &w));
    let m2 = Label::Int(2);
    let phi = extend_from_collection(f.clone(), Arc::new(Assoc), vec![0], move |_| Lin::single(m2.clone()));
    check_morphism(&phi, f.as_ref(), &Assoc, &w, 3).unwrap();
    // every binary tree goes to the single arity-n operation
    let m4 = Label::Int(4);
    for x in f.elements(0, 4, 3).into_iter().filter(|x| f.sig(x).arity() == 4) {
        assert_eq!(hoalg::operad::OperadMap::apply(&phi, &x), Lin::single(m4.clone()));
    }
}
