use std::sync::Arc;

use hoalg::adjunction::*;
use hoalg::barcobar::Cooperad;
use hoalg::coh::{DgCat, Words};
use hoalg::complex::Window;
use hoalg::lin::{Label, Lin};
use hoalg::linalg::q;
use hoalg::operad::builtin::{a_category, Tabulated};
use hoalg::operad::{ColorSet, Operad, Sig};
use hoalg::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn objects(max: usize) -> Vec<AdjObj> {
    KINDS.iter().flat_map(|&k| (0..=max).map(move |n| AdjObj { kind: k, n })).collect()
}

/// Every function between the underlying sets, filtered by monotonicity and endpoints.
fn brute_count(x: AdjObj, y: AdjObj) -> usize {
    let (n, m) = (x.len(), y.len());
    if n == 0 {
        return 1;
    }
    if m == 0 {
        return 0;
    }
    let mut count = 0;
    let total = m.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let f: Vec<usize> = (0..n)
            .map(|_| {
                let v = c % m;
                c /= m;
                v
            })
            .collect();
        let mono = (1..n).all(|i| f[i - 1] <= f[i]);
        let first = !matches!(x.kind, Kind::First | Kind::Nabla) || f[0] == 0;
        let last = !matches!(x.kind, Kind::Last | Kind::Nabla) || f[n - 1] == m - 1;
        if mono && first && last {
            count += 1;
        }
    }
    count
}

#[test]
fn hom_basis_counts_match_brute_force() {
    for x in objects(6) {
        for y in objects(6) {
            if x.kind == y.kind {
                let b = hom_basis(x, y).unwrap();
                assert_eq!(b.len(), brute_count(x, y), "{x} → {y}");
                let mut d = b.clone();
                d.dedup();
                assert_eq!(d.len(), b.len());
            } else {
                assert!(matches!(hom_basis(x, y), Err(Error::InvalidObject(_))));
            }
        }
    }
}

#[test]
fn composition_of_maps_is_associative_and_unital() {
    for x in objects(3) {
        for y in objects(3).into_iter().filter(|y| y.kind == x.kind) {
            for f in hom_basis(x, y).unwrap() {
                assert_eq!(compose_maps(&OrdMap::identity(y), &f).unwrap(), f);
                assert_eq!(compose_maps(&f, &OrdMap::identity(x)).unwrap(), f);
                for z in objects(3).into_iter().filter(|z| z.kind == x.kind) {
                    for g in hom_basis(y, z).unwrap() {
                        let gf = compose_maps(&g, &f).unwrap();
                        assert!(gf.is_valid());
                        for w in objects(2).into_iter().filter(|w| w.kind == x.kind) {
                            for h in hom_basis(z, w).unwrap() {
                                let a = compose_maps(&h, &gf).unwrap();
                                let b = compose_maps(&compose_maps(&h, &g).unwrap(), &f).unwrap();
                                assert_eq!(a, b);
                            }
                        }
                    }
                }
            }
        }
    }
    let f = OrdMap::identity(AdjObj::parse("(1)").unwrap());
    let g = OrdMap::identity(AdjObj::parse("(2)").unwrap());
    assert!(matches!(compose_maps(&g, &f), Err(Error::NotComposable(_))));
}

#[test]
fn structure_maps_are_functorial() {
    for s in STRUCTURE_MAPS {
        let (kx, ky) = s.arg_kinds();
        let xs: Vec<AdjObj> = (0..=3).map(|n| AdjObj { kind: kx, n }).collect();
        let ys: Vec<AdjObj> = (0..=3).map(|n| AdjObj { kind: ky, n }).collect();
        // identities go to identities
        for &x in &xs {
            for &y in &ys {
                let id = s.map(&OrdMap::identity(x), &OrdMap::identity(y)).unwrap();
                assert_eq!(id, OrdMap::identity(s.object(x, y).unwrap()), "{s:?}");
            }
        }
        // (f' ∘ f) ⊗ (g' ∘ g) = (f' ⊗ g') ∘ (f ⊗ g), exhaustively on objects of size ≤ 3
        for &x in &xs {
            for &x1 in &xs {
                for &x2 in &xs {
                    let fs = hom_basis(x, x1).unwrap();
                    let f2s = hom_basis(x1, x2).unwrap();
                    for &y in &ys[..3] {
                        for &y1 in &ys[..3] {
                            for &y2 in &ys[..3] {
                                for f in &fs {
                                    for f2 in &f2s {
                                        for g in hom_basis(y, y1).unwrap() {
                                            for g2 in hom_basis(y1, y2).unwrap() {
                                                let lhs = s
                                                    .map(&compose_maps(f2, f).unwrap(), &compose_maps(&g2, &g).unwrap())
                                                    .unwrap();
                                                let rhs = compose_maps(&s.map(f2, &g2).unwrap(), &s.map(f, &g).unwrap()).unwrap();
                                                assert_eq!(lhs, rhs, "{s:?}");
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let x = AdjObj::parse("(1)").unwrap();
    assert!(StructureMap::GlueToNabla.object(x, x).is_err());
}

#[test]
fn adj_validates_as_a_two_cat_object() {
    let adj = Arc::new(build_adj(1));
    adj.two_cat_object().validate(&Window::new(3, 1), 1).unwrap();
    // Adj₀₀ hom (1) → (1) is a single map
    let c = adj.color_of(AdjObj::parse("(1)").unwrap()).unwrap();
    assert_eq!(adj.all_elements(1, 1).iter().filter(|x| adj.sig(x) == Sig::new(vec![c], c)).count(), 1);
    for x in adj.all_elements(3, 1) {
        assert!(adj.diff(&x).is_zero());
        assert_eq!(adj.degree(&x), 0);
    }
}

#[test]
fn cell_composition_matches_map_composition() {
    let adj = build_adj(2);
    let elems = adj.all_elements(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 20 {
        let x = &elems[rng.gen_range(0..elems.len())];
        let sx = adj.sig(x);
        let i = rng.gen_range(0..sx.arity());
        let ys: Vec<&Label> = elems.iter().filter(|y| adj.sig(y).out == sx.ins[i]).collect();
        if ys.is_empty() {
            continue;
        }
        let y = ys[rng.gen_range(0..ys.len())];
        let got = adj.compose(x, i, y);
        let (fx, fy) = (adj.map_of(x), adj.map_of(y));
        let mut parts: Vec<OrdMap> = sx.ins.iter().map(|&c| OrdMap::identity(adj.obj(c))).collect();
        parts[i] = fy;
        let expect = compose_maps(&fx, &concat_maps(&parts).unwrap()).unwrap();
        let t = got.labels().next().unwrap();
        assert_eq!(adj.map_of(t), expect);
        done += 1;
    }
}

fn small_window() -> Window {
    Window::new(2, 2)
}

#[test]
fn identity_adjunction_is_the_terminal_example() {
    let a: DgCat = Arc::new(a_category());
    let data = identity_adjunction(a);
    let sf = strict_2functor(&data, 1, &Window::new(3, 1), 1).unwrap();
    // every 2-cell goes to an identity transformation
    for x in sf.adj.all_elements(2, 1) {
        let img = hoalg::operad::OperadMap::apply(sf.phi.as_ref(), &x);
        let tau = sf.target.cochain_of(&img);
        let sp = sf.target.space(&sf.adj.sig(&x));
        assert_eq!(tau, sp.identity(), "{x}");
    }
    let h = sf.induced();
    homotopy_adjunction_check(&h, &small_window(), 1).unwrap();
}

#[test]
fn retract_adjunction_is_a_two_functor() {
    let data = retract_adjunction();
    data.check(1).unwrap();
    let sf = strict_2functor(&data, 1, &Window::new(3, 1), 1).unwrap();
    // F₀₀ on (1) is G ∘ F, F₀₁ on (0] is F
    let c1 = sf.adj.color_of(AdjObj::parse("(1)").unwrap()).unwrap();
    assert_eq!(sf.functor_of(c1).name, "GF");
    let c0 = sf.adj.color_of(AdjObj::parse("(0]").unwrap()).unwrap();
    assert_eq!(sf.functor_of(c0).name, "F");
    let h = sf.induced();
    let n = homotopy_adjunction_check(&h, &small_window(), 1).unwrap();
    assert!(n > 0);
    let (monad, _) = h.monad().unwrap();
    homotopy_monad_check(&monad, &small_window(), 1).unwrap();
}

#[test]
fn triangle_violation_is_reported() {
    let mut data = retract_adjunction();
    // η_a = i∘p is still natural but breaks (Gε)(ηG) only if … take η_b = 2·1_b instead
    data.eta[1] = Lin::term(data.a1.unit(1), q(2));
    assert!(data.check(1).is_err());
    let a: DgCat = Arc::new(a_category());
    let mut id = identity_adjunction(a.clone());
    id.eta = vec![Lin::term(a.unit(0), q(2))];
    assert!(matches!(id.check(1), Err(Error::TriangleViolation(_))));
    assert!(strict_2functor(&id, 1, &Window::new(2, 1), 1).is_err());
}

#[test]
fn perturbed_monad_fails() {
    let a: DgCat = Arc::new(a_category());
    let sf = strict_2functor(&identity_adjunction(a), 1, &Window::new(2, 1), 1).unwrap();
    let h = sf.induced();
    let (monad, _) = h.monad().unwrap();
    homotopy_monad_check(&monad, &small_window(), 1).unwrap();
    // double the image of the multiplication (2) → (1) on its one-vertex bar element
    let delta = build_delta(1);
    let c1 = delta.color_of(AdjObj::parse("(1)").unwrap()).unwrap();
    let mu = delta.element(&[c1, c1], c1, &[0, 0]);
    let bad = h.with_tau(move |old, x| {
        let v = old.apply(x);
        let t = x.as_tree().unwrap();
        if t.vertices() == 1 && t.dec == mu {
            v.scaled(&q(2))
        } else {
            v
        }
    });
    let (bad_monad, _) = bad.monad().unwrap();
    assert!(matches!(homotopy_monad_check(&bad_monad, &small_window(), 1), Err(Error::MCViolation { .. })));
    assert!(homotopy_adjunction_check(&bad, &small_window(), 1).is_err());
}

/// One object, u in degree −2 and v = du in degree −1, all products zero.
fn shifted_acyclic() -> (DgCat, Label, Label) {
    let mut c = Tabulated::new("A+D2", ColorSet::single());
    let u = c.add("u", Sig::new(vec![0], 0), -2);
    let v = c.add("v", Sig::new(vec![0], 0), -1);
    c.set_diff(&u, Lin::single(v.clone()));
    (Arc::new(c), u, v)
}

#[test]
fn higher_corrections_exact_and_not_closed() {
    let (cat, u, _) = shifted_acyclic();
    let sf = strict_2functor(&identity_adjunction(cat.clone()), 1, &Window::new(2, 1), 1).unwrap();
    let h = sf.induced();
    let w = small_window();
    homotopy_adjunction_check(&h, &w, 1).unwrap();
    // a weight-two bar element; τ on it has degree −1
    let x = h.bar.all_elements(&w, 1).into_iter().find(|x| h.bar.weight(x) == 2).unwrap();
    assert_eq!(h.bar.degree(&x), -2);
    let sig = h.bar.sig(&x);
    let sp = h.target.space(&sig);
    let exact = sp.d(&sp.from_components(&[(0, Lin::single(u.clone()))]));
    assert!(!exact.is_zero());
    let one = Words::word(&[cat.unit(0)], 0);
    let not_closed = Lin::single(Label::seq(vec![one, u.clone()]));
    assert!(!sp.d(&not_closed).is_zero());
    let (t_exact, t_bad) = (h.target.element(&sig, &exact), h.target.element(&sig, &not_closed));
    let (x1, x2) = (x.clone(), x.clone());
    let good = h.with_tau(move |old, y| {
        let mut v = old.apply(y);
        if *y == x1 {
            v.add(&t_exact);
        }
        v
    });
    homotopy_adjunction_check(&good, &w, 1).unwrap();
    let bad = h.with_tau(move |old, y| {
        let mut v = old.apply(y);
        if *y == x2 {
            v.add(&t_bad);
        }
        v
    });
    assert!(matches!(homotopy_adjunction_check(&bad, &w, 1), Err(Error::MCViolation { .. })));
}

#[test]
fn zero_cochain_into_a_trivial_target_is_a_monad() {
    let a: DgCat = Arc::new(a_category());
    let sf = strict_2functor(&identity_adjunction(a), 1, &Window::new(2, 1), 1).unwrap();
    let (monad, target) = sf.induced().monad().unwrap();
    let zero = hoalg::barcobar::Twisting::new(monad.c.clone(), target, |_| Lin::zero());
    assert!(homotopy_monad_check(&zero, &small_window(), 1).unwrap() > 0);
}
