use std::sync::Arc;

use hoalg::barcobar::{check_bar, check_cobar, cobar, round_trip, Bar, Cooperad, Twisting};
use hoalg::complex::Window;
use hoalg::lin::Lin;
use hoalg::linalg::q;
use hoalg::operad::builtin::{random_operad, Assoc};
use hoalg::operad::unital::arity_scaling;
use hoalg::operad::Operad;
use hoalg::tree::enumerate_trees;
use proptest::prelude::*;

fn as_bar(w: &Window, size: usize) -> Arc<Bar> {
    Arc::new(Bar::reduced(Arc::new(Assoc), w, size).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bar_and_cobar_of_random_operads_square_to_zero(seed in 0u64..10_000) {
        let w = Window::new(3, 2);
        let b = Arc::new(Bar::reduced(Arc::new(random_operad(seed)), &w, 2).unwrap());
        check_bar(&b, &w, 2, false).unwrap();
        check_cobar(&cobar(b, &w, 2).unwrap(), &w, 2, false).unwrap();
    }

    #[test]
    fn arity_scalings_of_as_transport_the_universal_twisting(t in prop_oneof![-3i64..=-1, 1i64..=3]) {
        let w = Window::new(3, 3);
        let b = as_bar(&w, 3);
        let phi = Arc::new(arity_scaling(1, t).on(Arc::new(Assoc)));
        let tw = Twisting::universal(b.clone()).post_compose(phi.clone(), Arc::new(Assoc));
        prop_assert!(tw.is_twisting(&w, 3));
        prop_assert!(round_trip(b, phi, &w, 3).unwrap().ok());
    }
}

#[test]
fn bar_of_as_has_one_element_per_reduced_planar_tree() {
    let w = Window::new(4, 4);
    let b = as_bar(&w, 4);
    for n in 2..=4 {
        let count = b.elements(0, n, 4, 4).into_iter().filter(|x| Cooperad::sig(b.as_ref(), x).arity() == n).count();
        let trees: usize = (1..n).map(|v| enumerate_trees(n, v, 2).len()).sum();
        assert_eq!(count, trees);
    }
}

#[test]
fn rescaled_universal_cochain_is_not_twisting() {
    let w = Window::new(3, 3);
    let b = as_bar(&w, 3);
    let u = Twisting::universal(b.clone());
    let doubled = Twisting::new(b, Arc::new(Assoc), move |x| u.apply(x).scaled(&q(2)));
    assert!(!doubled.is_twisting(&w, 3));
    assert!(doubled.check(&w, 3).is_err());
    let _ = Lin::zero();
    let _ = Operad::name(&Assoc);
}
