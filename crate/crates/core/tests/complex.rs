use std::collections::BTreeMap;

use hoalg::complex::{is_quasi_iso, ChainMap, Complex, FULL};
use hoalg::linalg::Field;
use proptest::prelude::*;

/// A direct sum of spheres and disks at the given degrees.
fn spheres_and_disks(parts: &[(bool, i64)]) -> Complex {
    let cs: Vec<Complex> = parts.iter().map(|&(disk, n)| if disk { Complex::disk(n) } else { Complex::sphere(n) }).collect();
    Complex::direct_sum(&cs.iter().collect::<Vec<_>>())
}

fn expected_homology(parts: &[(bool, i64)]) -> BTreeMap<i64, usize> {
    let mut h = BTreeMap::new();
    for &(disk, n) in parts {
        if !disk {
            *h.entry(n).or_insert(0) += 1;
        }
    }
    h
}

fn nonzero(h: BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    h.into_iter().filter(|&(_, v)| v > 0).collect()
}

fn parts() -> impl Strategy<Value = Vec<(bool, i64)>> {
    proptest::collection::vec((any::<bool>(), -3i64..=3), 0..5)
}

proptest! {
    #[test]
    fn homology_counts_spheres(p in parts()) {
        let c = spheres_and_disks(&p);
        prop_assert_eq!(nonzero(c.homology(Field::Rational).unwrap()), expected_homology(&p));
    }

    #[test]
    fn kunneth_over_a_field(p in parts(), r in parts()) {
        let (a, b) = (spheres_and_disks(&p), spheres_and_disks(&r));
        let mut want = BTreeMap::new();
        for (i, x) in expected_homology(&p) {
            for (j, y) in expected_homology(&r) {
                *want.entry(i + j).or_insert(0) += x * y;
            }
        }
        prop_assert_eq!(nonzero(a.tensor(&b).homology(Field::Rational).unwrap()), want);
        prop_assert_eq!(a.tensor(&b).dim(), a.dim() * b.dim());
    }

    #[test]
    fn shift_moves_homology(p in parts(), k in -2i64..=2) {
        let c = spheres_and_disks(&p);
        let moved: BTreeMap<i64, usize> = expected_homology(&p).into_iter().map(|(d, n)| (d - k, n)).collect();
        prop_assert_eq!(nonzero(c.shift(k).homology(Field::Rational).unwrap()), moved);
        prop_assert_eq!(c.shift(k).shift(-k).dims(), c.dims());
    }

    #[test]
    fn cone_of_identity_is_acyclic_and_identity_is_quasi_iso(p in parts()) {
        let c = spheres_and_disks(&p);
        let id = ChainMap::identity(&c);
        prop_assert!(id.cone().is_acyclic(Field::Rational).unwrap());
        prop_assert!(is_quasi_iso(&id, (-6, 6), Field::Rational).unwrap().is_quasi_iso);
    }
}

#[test]
fn sphere_into_disk_is_not_a_quasi_iso() {
    use hoalg::lin::{Label, Lin};
    let f = ChainMap::new(Complex::sphere(1), Complex::disk(1), |_| Lin::single(Label::Gen(1))).unwrap();
    let cert = is_quasi_iso(&f, (-1, 2), Field::Rational).unwrap();
    assert!(!cert.is_quasi_iso);
    assert_eq!(cert.per_degree[&1], (1, 0, 0));
    assert!(ChainMap::new(Complex::sphere(0), Complex::disk(1), |_| Lin::single(Label::Gen(1))).is_err());
    let _ = FULL;
}
