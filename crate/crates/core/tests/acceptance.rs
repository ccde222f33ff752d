//! Exit criteria. Each test prints one `PASS`/`FAIL` line on stderr (bypassing output capture)
//! and then asserts. All comparisons are exact; expected values come from oracles in this file.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use hoalg::adjunction::{
    hom_basis, homotopy_adjunction_check, homotopy_monad_check, identity_adjunction, retract_adjunction,
    strict_2functor, AdjObj, KINDS,
};
use hoalg::barcobar::{cobar, counit_certificate, round_trip, Bar, Cooperad};
use hoalg::coh::{coh_complex, comodule_form, compose_coh, from_comodule, CohSpace, DgCat, DgFunctor, Words};
use hoalg::complex::{Complex, Window, FULL};
use hoalg::diagram::{enumerate_diagrams, Cell, Shape};
use hoalg::lin::{Color, Label, Lin};
use hoalg::linalg::{q, rank, Field, SparseMatrix};
use hoalg::operad::builtin::{a_category, ar, h0_category, h_category, random_operad, triangle_category, Assoc, Tabulated};
use hoalg::operad::collection::odot;
use hoalg::operad::free::free_operad;
use hoalg::operad::h0::h0_table;
use hoalg::operad::unital::{arity_scaling, map_bijection_check, red, unitalize};
use hoalg::operad::{augmentation_violation, component_complex, FnMap, Operad, OperadMap, Sig};
use hoalg::tree::{contract_edge, det_complex, edge_after_contraction, enumerate_trees, PlanarTree};
use hoalg::twocat::{
    bar_twocat, collections_agree, counit_twocat, enumerate_cells, free_set_counts, free_twocat, nseq_odot,
    underlying_nseq, NSeq, TwoCatObject,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: usize, title: &str, failures: &[String]) {
    let tag = if failures.is_empty() { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} {tag}  {title}");
    assert!(failures.is_empty(), "criterion {n} ({title}): {} failures, first: {:?}", failures.len(), &failures[..failures.len().min(5)]);
}

/// d applied twice, term by term.
fn dd(d: &dyn Fn(&Label) -> Lin, x: &Label) -> Lin {
    let mut out = Lin::zero();
    for (y, c) in d(x).iter() {
        out.axpy(c, &d(y));
    }
    out
}

/// The fleet: As, A, H with words of size ≤ 4, Ar₃(S(2)), two seeded random 2-color operads.
fn fleet() -> Vec<(&'static str, Arc<dyn Operad>, usize)> {
    vec![
        ("As", Arc::new(Assoc), 4),
        ("A", Arc::new(a_category()), 4),
        ("H", Arc::new(h_category()), 4),
        ("Ar3(S(2))", Arc::new(ar(3, &Complex::sphere(2))), 4),
        ("rand0", Arc::new(random_operad(0)), 4),
        ("rand1", Arc::new(random_operad(1)), 4),
    ]
}

/// Reduced bar where the augmentation exists on the window, unreduced otherwise.
fn bar_of(p: Arc<dyn Operad>, w: &Window, size: usize) -> Bar {
    if augmentation_violation(p.as_ref(), w, size).is_none() {
        Bar::reduced(p, w, size).unwrap()
    } else {
        Bar::unreduced(p)
    }
}

#[test]
fn c01_bar_cobar_square_zero_on_fleet() {
    let w = Window::new(4, 4);
    let mut failures = Vec::new();
    for (name, p, size) in fleet() {
        let b = Arc::new(bar_of(p, &w, size));
        let be = b.all_elements(&w, size);
        if be.is_empty() && name != "A" {
            failures.push(format!("{name}: empty bar"));
        }
        for x in &be {
            let r = dd(&|y| b.diff(y), x);
            if !r.is_zero() {
                failures.push(format!("{name} bar {x}: {r}"));
            }
        }
        let o = match cobar(b.clone(), &w, size) {
            Ok(o) => o,
            Err(e) => {
                failures.push(format!("{name} cobar: {e}"));
                continue;
            }
        };
        for x in o.all_elements(w.max_arity, size) {
            let r = dd(&|y| o.diff(y), &x);
            if !r.is_zero() {
                failures.push(format!("{name} cobar {x}: {r}"));
            }
        }
    }
    verdict(1, "bar and cobar differentials square to zero on the fleet (arity ≤ 4, weight ≤ 4)", &failures);
}

/// Cohomology dimensions of the complex spanned by `basis` under `d`, by ranks of matrices
/// assembled here.
fn homology_by_ranks(basis: &[(Label, i64)], d: &dyn Fn(&Label) -> Lin) -> BTreeMap<i64, usize> {
    let mut by_deg: BTreeMap<i64, Vec<&Label>> = BTreeMap::new();
    for (l, k) in basis {
        by_deg.entry(*k).or_default().push(l);
    }
    let matrix = |k: i64| -> usize {
        let (Some(src), Some(tgt)) = (by_deg.get(&k), by_deg.get(&(k + 1))) else { return 0 };
        let index: BTreeMap<&Label, usize> = tgt.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let mut entries = Vec::new();
        for (j, x) in src.iter().enumerate() {
            for (y, c) in d(x).iter() {
                entries.push((index[y], j, c.clone()));
            }
        }
        let m = SparseMatrix::from_q_entries(Field::Rational, tgt.len(), src.len(), entries.iter().map(|(i, j, c)| (*i, *j, c))).unwrap();
        rank(&m)
    };
    by_deg
        .iter()
        .map(|(&k, v)| (k, v.len() - matrix(k) - matrix(k - 1)))
        .filter(|&(_, h)| h > 0)
        .collect()
}

#[test]
fn c02_counit_is_quasi_isomorphism_for_as() {
    let w = Window::new(3, 3);
    let size = 3;
    let p: Arc<dyn Operad> = Arc::new(Assoc);
    let mut failures = Vec::new();
    let certs = counit_certificate(p.clone(), &w, size, FULL, Field::Rational).unwrap();
    for (s, c) in &certs {
        if !c.is_quasi_iso {
            failures.push(format!("counit not a quasi-iso at {s:?}: {:?}", c.per_degree));
        }
    }
    let arities: Vec<usize> = certs.iter().map(|(s, _)| s.arity()).collect();
    if arities != vec![1, 2, 3] {
        failures.push(format!("signatures covered: {arities:?}"));
    }
    // independent homology of ΩB(As)(n): k in degree 0, the degree of As
    let b = Arc::new(Bar::reduced(p, &w, size).unwrap());
    let o = cobar(b, &w, size).unwrap();
    let elems = o.all_elements(w.max_arity, size);
    for n in 1..=3 {
        let basis: Vec<(Label, i64)> =
            elems.iter().filter(|x| o.sig(x).arity() == n).map(|x| (x.clone(), o.degree(x))).collect();
        let h = homology_by_ranks(&basis, &|x| o.diff(x));
        if h != BTreeMap::from([(0, 1)]) {
            failures.push(format!("H(ΩB(As)({n})) = {h:?}"));
        }
    }
    verdict(2, "counit ΩB(As) → As is a quasi-isomorphism in arities ≤ 3", &failures);
}

/// Planar trees with every vertex of arity ≥ 2 and at most `edges` internal edges, built here
/// by grafting corollas onto leaves; deduplicated by structure.
fn trees_by_grafting(edges: usize, extra: usize) -> Vec<PlanarTree> {
    let mut all: std::collections::BTreeSet<String> = Default::default();
    let mut out = Vec::new();
    let mut layer: Vec<PlanarTree> = (2..=2 + extra).map(|a| PlanarTree::corolla((), a)).collect();
    for t in &layer {
        all.insert(format!("{t:?}"));
    }
    out.extend(layer.clone());
    for _ in 0..edges {
        let mut next = Vec::new();
        for t in &layer {
            for leaf in 0..t.leaves() {
                for a in 2..=2 + extra {
                    let g = t.graft(leaf, &PlanarTree::corolla((), a));
                    if g.leaves() <= g.vertices() + 1 + extra && all.insert(format!("{g:?}")) {
                        next.push(g);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[test]
fn c03_det_complex_is_k_in_degree_zero() {
    let mut failures = Vec::new();
    let trees = trees_by_grafting(6, 1);
    for t in &trees {
        let h = det_complex(t).homology(Field::Rational).unwrap();
        if h != BTreeMap::from([(0, 1)]) {
            failures.push(format!("{} internal edges: {h:?}", t.internal_edges()));
        }
    }
    verdict(3, "det_complex(T) has homology k in degree 0 for all T with ≤ 6 internal edges", &failures);
}

#[test]
fn c04_contraction_signs_anticommute() {
    let mut failures = Vec::new();
    let mut pairs = 0;
    for t in trees_by_grafting(5, 1) {
        let m = t.internal_edges();
        for e in 0..m {
            for f in (0..m).filter(|&f| f != e) {
                let (t1, s1) = contract_edge(&t, e).unwrap();
                let (t12, s2) = contract_edge(&t1, edge_after_contraction(e, f)).unwrap();
                let (u1, r1) = contract_edge(&t, f).unwrap();
                let (u12, r2) = contract_edge(&u1, edge_after_contraction(f, e)).unwrap();
                pairs += 1;
                if t12 != u12 || s1 * s2 != -(r1 * r2) {
                    failures.push(format!("{t:?}: edges {e}, {f}"));
                }
            }
        }
    }
    if pairs < 1000 {
        failures.push(format!("only {pairs} edge pairs"));
    }
    verdict(4, "composite contraction signs anticommute on trees with ≤ 5 internal edges", &failures);
}

fn catalan_rec(n: usize) -> usize {
    let mut c = vec![1usize; n + 1];
    for i in 1..=n {
        c[i] = (0..i).map(|j| c[j] * c[i - 1 - j]).sum();
    }
    c[n]
}

/// Order-preserving maps between ordered sets of sizes n and m, optionally fixing the first
/// and/or last element, by listing nondecreasing sequences.
fn monotone_maps(n: usize, m: usize, first: bool, last: bool) -> usize {
    fn go(pos: usize, lo: usize, n: usize, m: usize, first: bool, last: bool) -> usize {
        if pos == n {
            return 1;
        }
        (lo..m)
            .filter(|&v| !(first && pos == 0) || v == 0)
            .filter(|&v| !(last && pos == n - 1) || v == m - 1)
            .map(|v| go(pos + 1, v, n, m, first, last))
            .sum()
    }
    go(0, 0, n, m, first, last)
}

/// Labeled dissections of the polygon over `verts` into at most `max_cells` regions, counted
/// by the region adjacent to the bottom side. A stack of s parallel chords over one span
/// bounds s − 1 bigons; the region under its innermost chord is proper (no chord over its
/// whole top).
fn dissections(shape: &Shape, verts: &[u32], max_cells: usize) -> usize {
    fn stacked(l: usize, proper: &[usize]) -> Vec<usize> {
        // s chords, then a proper region: s − 1 + k regions
        let cap = proper.len() - 1;
        let mut out = vec![0usize; cap + 1];
        for s in 1..=cap {
            for k in 1..=cap + 1 - s {
                out[k + s - 1] += l.pow(s as u32) * proper[k];
            }
        }
        out
    }
    // proper[k]: dissections with exactly k regions and no chord over the whole top
    fn proper(shape: &Shape, verts: &[u32], cap: usize, memo: &mut BTreeMap<Vec<u32>, Vec<usize>>) -> Vec<usize> {
        if let Some(v) = memo.get(verts) {
            return v.clone();
        }
        let n = verts.len() - 1;
        // parts[j][k]: the top sides 0..j split into bare edges and covered spans, k regions
        let mut parts = vec![vec![0usize; cap + 1]; n + 1];
        parts[0][0] = 1;
        for j in 1..=n {
            for i in 0..j {
                let mut piece = vec![0usize; cap + 1];
                piece[0] = usize::from(j - i == 1);
                if (i, j) != (0, n) {
                    let inner = proper(shape, &verts[i..=j], cap, memo);
                    let l = shape.edges_between(verts[i], verts[j]).len();
                    for (k, c) in stacked(l, &inner).into_iter().enumerate() {
                        piece[k] += c;
                    }
                }
                for a in 0..=cap {
                    for b in 0..=cap - a {
                        parts[j][a + b] += parts[i][a] * piece[b];
                    }
                }
            }
        }
        let mut out = vec![0usize; cap + 1];
        out[1..].copy_from_slice(&parts[n][..cap]);
        memo.insert(verts.to_vec(), out.clone());
        out
    }
    let mut memo = BTreeMap::new();
    let p = proper(shape, verts, max_cells, &mut memo);
    let l = shape.edges_between(verts[0], *verts.last().unwrap()).len();
    // the root is proper, or a bigon under a stack over the whole top
    let s = stacked(l, &p);
    (1..=max_cells).map(|k| p[k] + if k >= 2 { s[k - 1] } else { 0 }).sum()
}

fn two_objects() -> Shape {
    Shape {
        objects: vec!["0".into(), "1".into()],
        edges: vec![("a".into(), 0, 1), ("b".into(), 1, 0), ("u".into(), 0, 0)],
        units: None,
    }
}

#[test]
fn c05_counting_oracles() {
    let mut failures = Vec::new();
    for n in 2..=8 {
        let got = enumerate_trees(n, n - 1, 2).len();
        if got != catalan_rec(n - 1) {
            failures.push(format!("binary trees with {n} leaves: {got} vs {}", catalan_rec(n - 1)));
        }
    }
    use hoalg::adjunction::Kind;
    for &k in KINDS.iter() {
        for i in 0..=6 {
            for j in 0..=6 {
                let (x, y) = (AdjObj::new(k, i).unwrap(), AdjObj::new(k, j).unwrap());
                let first = matches!(k, Kind::First | Kind::Nabla);
                let last = matches!(k, Kind::Last | Kind::Nabla);
                let want = monotone_maps(x.len(), y.len(), first, last);
                let got = hom_basis(x, y).unwrap().len();
                if got != want {
                    failures.push(format!("hom({x}, {y}): {got} vs {want}"));
                }
            }
        }
    }
    let max_cells = 4;
    for shape in [Shape::single(&["e"]), Shape::single(&["e", "f"]), two_objects()] {
        let glued = free_set_counts(&shape, 5, max_cells);
        for n in 1..=5 {
            for cell in enumerate_cells(&shape, n) {
                let direct = enumerate_diagrams(&shape, &cell, max_cells).len();
                let oracle = dissections(&shape, &cell.vertex_labels(&shape), max_cells);
                let free = glued.get(&cell).copied().unwrap_or(0);
                if !(direct == oracle && free == oracle) {
                    failures.push(format!("{cell:?}: glued {free}, direct {direct}, oracle {oracle}"));
                }
            }
        }
    }
    verdict(5, "Catalan, hom-basis and diagram counts match their oracles", &failures);
}

fn scalars(seed: u64, n: usize) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)]).collect()
}

#[test]
fn c06_bar_cobar_adjunction_round_trips() {
    let w = Window::new(3, 3);
    let mut failures = Vec::new();
    let ops: Vec<(&str, Arc<dyn Operad>)> = vec![("As", Arc::new(Assoc)), ("rand0", Arc::new(random_operad(0)))];
    for (name, p) in ops {
        let b = Arc::new(Bar::reduced(p.clone(), &w, 3).unwrap());
        for (k, t) in scalars(7, 20).into_iter().enumerate() {
            let phi: Arc<dyn OperadMap> = Arc::new(arity_scaling(p.colors().len(), t).on(p.clone()));
            let rt = round_trip(b.clone(), phi, &w, 3).unwrap();
            if !rt.ok() || rt.checked == 0 {
                failures.push(format!("{name} instance {k} (t = {t}): {rt:?}"));
            }
        }
    }
    verdict(6, "bar-cobar adjunction round trips are identities on 20 seeded instances", &failures);
}

#[test]
fn c07_h0_of_h_is_the_iso_category() {
    let mut failures = Vec::new();
    let h = h_category();
    let t = h0_table(&h, 6).unwrap();
    for s in 0..2 {
        for u in 0..2 {
            if t.dim(s, u) != 1 {
                failures.push(format!("dim H0({s},{u}) = {}", t.dim(s, u)));
            }
        }
    }
    let f = h.gen(&Label::Gen(0));
    let g = h.gen(&Label::Gen(1));
    let after = |a: &Label, b: &Label| hoalg::operad::compose_lin(&h, &Lin::single(a.clone()), 0, &Lin::single(b.clone()));
    let gf_id = after(&g, &f).sub(&Lin::single(Label::Unit(0)));
    let fg_id = after(&f, &g).sub(&Lin::single(Label::Unit(1)));
    if !t.is_exact(0, 0, &gf_id).unwrap() {
        failures.push("gf − Id is not exact".into());
    }
    if !t.is_exact(1, 1, &fg_id).unwrap() {
        failures.push("fg − Id is not exact".into());
    }
    // H₀ = k·Id ⊕ ker ε with ε the augmentation to H⁰ = k: H(H₀) = k in degree 0, carried by Id
    let h0 = h0_category();
    let cx = component_complex(&h0, &Sig::new(vec![0], 0), 6, FULL).unwrap();
    let basis: Vec<(Label, i64)> = cx.labels().map(|(l, d)| (l.clone(), d)).collect();
    let hom = homology_by_ranks(&basis, &|x| h0.diff(x));
    if hom != BTreeMap::from([(0, 1)]) {
        failures.push(format!("H(H₀) = {hom:?}"));
    }
    let t0 = h0_table(&h0, 6).unwrap();
    if t0.dim(0, 0) != 1 || t0.is_exact(0, 0, &Lin::single(h0.unit(0))).unwrap() {
        failures.push("Id does not span H⁰(H₀)".into());
    }
    // ker ε: w − Id for degree-0 words w ≠ Id, and every word of nonzero degree
    let ker: Vec<(Label, i64)> = basis.iter().filter(|(l, _)| !h0.is_unit(l)).cloned().collect();
    let unit = h0.unit(0);
    // ε is a chain map: every d(x) has coefficient sum zero over degree-0 words and Id
    for (x, d) in &basis {
        let v = h0.diff(x);
        if *d == -1 && v.iter().fold(q(0), |acc, (_, c)| acc + c) != q(0) {
            failures.push(format!("ε(d {x}) ≠ 0"));
        }
    }
    // with b_w = w − Id, d(x) = Σ c_w w + c Id = Σ c_w b_w, so drop the Id term
    let d_ker = |x: &Label| -> Lin {
        let mut v = h0.diff(x);
        let c = v.coeff(&unit);
        v.add_term(unit.clone(), -c);
        v
    };
    let hk = homology_by_ranks(&ker, &d_ker);
    if !hk.is_empty() {
        failures.push(format!("ker ε has homology {hk:?}"));
    }
    verdict(7, "H⁰(H) is the iso category and H₀ splits as k ⊕ acyclic", &failures);
}

#[test]
fn c08_unitalization_adjunction() {
    let w = Window::new(3, 2);
    let mut failures = Vec::new();
    let ops: Vec<(&str, Arc<dyn Operad>)> = vec![("As", Arc::new(Assoc)), ("rand0", Arc::new(random_operad(0)))];
    for (name, p) in ops {
        let n = p.colors().len();
        let b: Arc<dyn Operad> = Arc::new(unitalize(p.clone()));
        let mut maps: Vec<FnMap> = scalars(11, 9).into_iter().map(|t| arity_scaling(n, t).on(p.clone())).collect();
        maps.push(FnMap::new((0..n as Color).collect(), |x| match x {
            Label::Unit(_) => Lin::single(x.clone()),
            _ => Lin::zero(),
        }));
        if maps.len() != 10 || !map_bijection_check(p.clone(), b, &maps, &w, 2).unwrap() {
            failures.push(format!("{name}: extension/restriction is not a bijection on the samples"));
        }
    }
    // red: drop units, keep a lone unit for an all-unit word; idempotent
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let e: Color = 2;
    for _ in 0..1000 {
        let len = rng.gen_range(1..12);
        let seq: Vec<Color> = (0..len).map(|_| rng.gen_range(0..=e)).collect();
        let r = red(&seq, Some(e)).unwrap();
        let want: Vec<Color> = if seq.iter().all(|&c| c == e) { vec![e] } else { seq.iter().copied().filter(|&c| c != e).collect() };
        if r != want || red(&r, Some(e)).unwrap() != r {
            failures.push(format!("red({seq:?}) = {r:?}"));
        }
    }
    verdict(8, "unital extension and restriction are inverse; red is idempotent", &failures);
}

#[test]
fn c09_strict_adjunctions_are_two_functors() {
    let mut failures = Vec::new();
    let small = Window::new(2, 2);
    let a: DgCat = Arc::new(a_category());
    for (name, data) in [("identity", identity_adjunction(a)), ("retract", retract_adjunction())] {
        let r = strict_2functor(&data, 1, &Window::new(3, 1), 1).and_then(|sf| {
            sf.morphism.check(&Window::new(3, 1), 1)?;
            let h = sf.induced();
            let n = homotopy_adjunction_check(&h, &small, 1)?;
            let (monad, _) = h.monad()?;
            let m = homotopy_monad_check(&monad, &small, 1)?;
            Ok((n, m))
        });
        match r {
            Ok((n, m)) if n > 0 && m > 0 => {}
            Ok((n, m)) => failures.push(format!("{name}: checked {n} adjunction and {m} monad elements")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    verdict(9, "strict adjunctions give 2-functors, homotopy adjunctions and homotopy monads", &failures);
}

#[test]
fn c10_one_object_twocat_is_operads() {
    let w = Window::new(3, 3);
    let size = 3;
    let mut failures = Vec::new();
    for (name, p, _) in fleet() {
        let names: Vec<&str> = p.colors().names.iter().map(|s| s.as_str()).collect();
        let obj = TwoCatObject::new(Shape::single(&names), p.clone()).unwrap();
        let small = Window { max_weight: 2, ..w };
        let v = underlying_nseq(&obj, &small, 2).unwrap();
        let u = NSeq::unit(obj.shape.clone(), w);
        if !collections_agree(&nseq_odot(&v, &v).unwrap().coll, &odot(&v.coll, &v.coll).unwrap())
            || !collections_agree(&nseq_odot(&v, &u).unwrap().coll, &odot(&v.coll, &u.coll).unwrap())
        {
            failures.push(format!("{name}: odot"));
        }
        let (f2, _) = free_twocat(&v, w).unwrap();
        let f1 = free_operad(&v.coll, &w);
        let mut sigs: Vec<Sig> = f1.all_elements(w.max_arity, size).iter().map(|x| f1.sig(x)).collect();
        sigs.sort();
        sigs.dedup();
        for s in &sigs {
            let x = component_complex(f2.op.as_ref(), s, size, FULL).unwrap();
            let y = component_complex(&f1, s, size, FULL).unwrap();
            if x.dims() != y.dims() {
                failures.push(format!("{name}: free at {s:?}"));
            }
        }
        match (bar_twocat(&obj, &w, size), Bar::reduced(p.clone(), &w, size)) {
            (Ok(b2), Ok(b1)) => {
                let e2 = b2.all_elements(&w, size);
                if e2 != b1.all_elements(&w, size) || e2.iter().any(|x| b2.diff(x) != b1.diff(x)) {
                    failures.push(format!("{name}: bar"));
                }
            }
            (Err(e1), Err(e2)) if e1 == e2 => {}
            (x, y) => failures.push(format!("{name}: bar {:?} vs {:?}", x.err(), y.err())),
        }
        match (counit_twocat(&obj, &w, size, FULL, Field::Rational), counit_certificate(p.clone(), &w, size, FULL, Field::Rational)) {
            (Ok(x), Ok(y)) if x == y => {}
            (Err(e1), Err(e2)) if e1 == e2 => {}
            _ => failures.push(format!("{name}: counit")),
        }
    }
    verdict(10, "one-object 2-Cat_I constructions agree with operad constructions on the fleet", &failures);
}

/// Scaling automorphism of the triangle category: a ↦ λa, b ↦ μb.
fn tri_scaling(cat: &DgCat, tri: Arc<Tabulated>, l: i64, m: i64, k: usize) -> DgFunctor {
    DgFunctor::scaling(&format!("S({l},{m})#{k}"), cat.clone(), move |x| match tri.show(x).as_str() {
        "a" => q(l),
        "b" => q(m),
        _ => q(l * m),
    })
}

#[test]
fn c11_coherent_transformations() {
    let mut failures = Vec::new();
    let tri = Arc::new(triangle_category());
    let cat: DgCat = tri.clone();
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fs: Vec<DgFunctor> = (0..4)
            .map(|k| tri_scaling(&cat, tri.clone(), [1, -1, 2, 3][rng.gen_range(0..4)], [1, -2, 2, 5][rng.gen_range(0..4)], k))
            .collect();
        let words = Arc::new(Words::new(cat.clone(), 3, 1));
        let sp = |i: usize, j: usize| CohSpace::new(&fs[i], &fs[j], words.clone(), 1).unwrap();
        let (s01, s12, s23, s02, s13, s03) = (sp(0, 1), sp(1, 2), sp(2, 3), sp(0, 2), sp(1, 3), sp(0, 3));
        // D² = 0 as a matrix product in each degree
        for s in [&s01, &s12, &s23] {
            let cx = coh_complex(s).unwrap();
            for d in cx.degrees() {
                let m = cx.matrix(d + 1, Field::Rational).unwrap().mul(&cx.matrix(d, Field::Rational).unwrap());
                if !m.is_zero() {
                    failures.push(format!("seed {seed}: D² ≠ 0 from degree {d}"));
                }
            }
        }
        let mut random = |s: &CohSpace| -> Lin {
            let basis = s.basis();
            let deg = basis[rng.gen_range(0..basis.len())].1;
            let mut v = Lin::zero();
            for (l, d) in basis {
                if d == deg && rng.gen_bool(0.6) {
                    v.add_term(l, q(rng.gen_range(-3..=3)));
                }
            }
            v
        };
        let (t1, t2, t3) = (random(&s01), random(&s12), random(&s23));
        for (s, t) in [(&s01, &t1), (&s12, &t2), (&s23, &t3)] {
            if from_comodule(s, &comodule_form(s, t)) != *t {
                failures.push(format!("seed {seed}: comodule round trip"));
            }
        }
        let all = compose_coh(&[(&s23, &t3), (&s12, &t2), (&s01, &t1)], &s03).unwrap();
        let c21 = compose_coh(&[(&s12, &t2), (&s01, &t1)], &s02).unwrap();
        let c32 = compose_coh(&[(&s23, &t3), (&s12, &t2)], &s13).unwrap();
        let left = compose_coh(&[(&s13, &c32), (&s01, &t1)], &s03).unwrap();
        let right = compose_coh(&[(&s23, &t3), (&s02, &c21)], &s03).unwrap();
        if left != all || right != all {
            failures.push(format!("seed {seed}: composition is not associative"));
        }
    }
    verdict(11, "Hochschild D² = 0, comodule round trips and associative composition", &failures);
}

#[test]
fn diagram_oracle_matches_known_dissection_counts() {
    let sh = Shape::single(&["e"]);
    let cell = Cell::new(vec![0, 0], 0);
    assert_eq!(dissections(&sh, &cell.vertex_labels(&sh), 1), 1);
    // triangle, two regions: one chord over any of the three spans
    assert_eq!(dissections(&sh, &cell.vertex_labels(&sh), 2), 4);
    assert_eq!(enumerate_diagrams(&sh, &cell, 2).len(), 4);
}
