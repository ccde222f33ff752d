//! H⁰ of DG-categories, and the weak-equivalence and fibration predicates on operad
//! morphisms. H⁰ isomorphisms are certified by caller-supplied witnesses, never searched.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::complex::{is_quasi_iso, ChainMap, Complex, QisoCertificate, Window};
use crate::error::{Error, Result};
use crate::lin::{Color, Label, Lin};
use crate::linalg::{kernel_basis, rank, solve, Field, Scalar};
use crate::operad::{compose_lin, component_complex, Operad, OperadMap, Sig};

/// Degree-zero cohomology of every hom complex C(s, t) of a DG-category.
pub struct H0Table {
    pub field: Field,
    pub objects: Vec<Color>,
    pub dims: BTreeMap<(Color, Color), usize>,
    reps: BTreeMap<(Color, Color), Vec<Lin>>,
    complexes: BTreeMap<(Color, Color), Complex>,
}

fn lin_of(c: &Complex, deg: i64, v: &[Scalar]) -> Lin {
    let mut out = Lin::zero();
    for (l, x) in c.basis_in(deg).iter().zip(v) {
        if let Scalar::Q(qv) = x {
            out.add_term(l.clone(), qv.clone());
        }
    }
    out
}

/// H⁰ table of the arity-one part of `c`, tabulated to size `wordlen`.
pub fn h0_table(c: &dyn Operad, wordlen: usize) -> Result<H0Table> {
    if wordlen < 2 {
        return Err(Error::WindowTooNarrow(format!("word length {wordlen} leaves no margin for degree-0 boundaries")));
    }
    let field = Field::Rational;
    let objects: Vec<Color> = c.colors().all().collect();
    let mut dims = BTreeMap::new();
    let mut reps = BTreeMap::new();
    let mut complexes = BTreeMap::new();
    for &s in &objects {
        for &t in &objects {
            let cx = component_complex(c, &Sig::new(vec![s], t), wordlen, (-1, 1))?;
            let z = kernel_basis(&cx.matrix(0, field)?);
            let b = cx.matrix(-1, field)?;
            let n = cx.basis_in(0).len();
            let mut cols: Vec<Vec<Scalar>> = (0..b.cols).map(|j| b.column(j)).collect();
            let mut r = Vec::new();
            let mut cur = crate::linalg::rank_of_columns(field, n, &cols);
            for v in z {
                cols.push(v.clone());
                let nr = crate::linalg::rank_of_columns(field, n, &cols);
                if nr > cur {
                    cur = nr;
                    r.push(lin_of(&cx, 0, &v));
                } else {
                    cols.pop();
                }
            }
            dims.insert((s, t), r.len());
            reps.insert((s, t), r);
            complexes.insert((s, t), cx);
        }
    }
    Ok(H0Table { field, objects, dims, reps, complexes })
}

impl H0Table {
    pub fn dim(&self, s: Color, t: Color) -> usize {
        self.dims[&(s, t)]
    }

    /// Coordinates of the class of a degree-0 cycle z ∈ C(s, t) in the chosen H⁰ basis.
    pub fn class_of(&self, s: Color, t: Color, z: &Lin) -> Result<Vec<Scalar>> {
        let cx = &self.complexes[&(s, t)];
        let f = self.field;
        let zc = cx.coords(0, z, f)?;
        let d0 = cx.matrix(0, f)?;
        if !d0.apply(&zc).iter().all(|x| x.is_zero()) {
            return Err(Error::Validation(format!("{z} is not a cycle")));
        }
        let n = cx.basis_in(0).len();
        let reps = &self.reps[&(s, t)];
        let mut cols: Vec<Vec<Scalar>> = reps.iter().map(|r| cx.coords(0, r, f)).collect::<Result<_>>()?;
        let b = cx.matrix(-1, f)?;
        cols.extend((0..b.cols).map(|j| b.column(j)));
        let sol = solve(f, n, &cols, &zc).ok_or_else(|| Error::Validation(format!("{z} outside Z⁰")))?;
        Ok(sol[..reps.len()].to_vec())
    }

    pub fn is_exact(&self, s: Color, t: Color, z: &Lin) -> Result<bool> {
        Ok(self.class_of(s, t, z)?.iter().all(|x| x.is_zero()))
    }

    /// Whether a: s→t and b: t→s are inverse in H⁰ (a, b in C(s;t), C(t;s)).
    pub fn are_inverse(&self, c: &dyn Operad, s: Color, t: Color, a: &Lin, b: &Lin) -> Result<bool> {
        let ba = compose_lin(c, b, 0, a);
        let ab = compose_lin(c, a, 0, b);
        let mut x = ba.clone();
        x.add_term(c.unit(s), -crate::linalg::q(1));
        let mut y = ab.clone();
        y.add_term(c.unit(t), -crate::linalg::q(1));
        Ok(self.is_exact(s, s, &x)? && self.is_exact(t, t, &y)?)
    }

    /// The class of [a]∘[b] for classes given by representatives.
    pub fn compose(&self, c: &dyn Operad, s: Color, t: Color, u: Color, a: &Lin, b: &Lin) -> Result<Vec<Scalar>> {
        let _ = t;
        self.class_of(s, u, &compose_lin(c, a, 0, b))
    }
}

/// Essential-surjectivity witness: the object `target` of Q is isomorphic in H⁰ to F(`source`)
/// via `iso`: F(source) → target with inverse `inverse`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub target: Color,
    pub source: Color,
    pub iso: Lin,
    pub inverse: Lin,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeqReport {
    pub components: Vec<(Sig, QisoCertificate)>,
    pub witnesses_ok: bool,
    pub is_weak_equivalence: bool,
}

/// Component map P(σ) → Q(Fσ).
pub fn component_map(f: &dyn OperadMap, p: &dyn Operad, q: &dyn Operad, sig: &Sig, max_size: usize, complete: (i64, i64)) -> Result<ChainMap> {
    let src = component_complex(p, sig, max_size, complete)?;
    let tsig = Sig::new(sig.ins.iter().map(|&c| f.color(c)).collect(), f.color(sig.out));
    let tgt = component_complex(q, &tsig, max_size, complete)?;
    ChainMap::new(src, tgt, |l| f.apply(l))
}

fn signatures(p: &dyn Operad, max_arity: usize) -> Vec<Sig> {
    let n = p.colors().len() as Color;
    let mut out = Vec::new();
    let mut cur: Vec<Vec<Color>> = vec![vec![]];
    for _ in 0..max_arity {
        cur = cur.into_iter().flat_map(|s| (0..n).map(move |c| [s.clone(), vec![c]].concat())).collect();
        for ins in &cur {
            for t in 0..n {
                out.push(Sig::new(ins.clone(), t));
            }
        }
    }
    out
}

/// Every polyhom map is a quasi-isomorphism on the window's degrees, and every object of
/// H⁰(Q(1)) has a verified witness.
pub fn weak_equiv_check(
    f: &dyn OperadMap,
    p: &dyn Operad,
    q: &dyn Operad,
    window: &Window,
    max_size: usize,
    complete: (i64, i64),
    witnesses: &[Witness],
) -> Result<WeqReport> {
    let safe = (window.min_degree, window.max_degree);
    let mut components = Vec::new();
    let mut ok = true;
    for sig in signatures(p, window.max_arity) {
        let m = component_map(f, p, q, &sig, max_size, complete)?;
        if m.src.dim() == 0 && m.tgt.dim() == 0 {
            continue;
        }
        let cert = is_quasi_iso(&m, safe, Field::Rational)?;
        ok &= cert.is_quasi_iso;
        components.push((sig, cert));
    }
    let table = h0_table(q, max_size.max(2))?;
    let mut witnesses_ok = true;
    for c in q.colors().all() {
        let Some(w) = witnesses.iter().find(|w| w.target == c) else {
            return Err(Error::BadWitness(format!("no witness for object {c}")));
        };
        let fs = f.color(w.source);
        for (v, s, t) in [(&w.iso, fs, c), (&w.inverse, c, fs)] {
            if v.labels().any(|l| q.sig(l) != Sig::new(vec![s], t) || q.degree(l) != 0) {
                return Err(Error::BadWitness(format!("witness for {c} has the wrong signature")));
            }
        }
        if !table.are_inverse(q, fs, c, &w.iso, &w.inverse)? {
            witnesses_ok = false;
        }
    }
    Ok(WeqReport { components, witnesses_ok, is_weak_equivalence: ok && witnesses_ok })
}

/// A lift of the H⁰-iso `iso`: F(source) → `target` to `lift`: source → `lifted` in P.
#[derive(Clone, Debug)]
pub struct IsoLift {
    pub source: Color,
    pub target: Color,
    pub iso: Lin,
    pub lifted: Color,
    pub lift: Lin,
    pub lift_inverse: Lin,
}

/// Termwise surjectivity on every tabulated polyhom, plus verification of the supplied lifts.
pub fn fibration_check(
    f: &dyn OperadMap,
    p: &dyn Operad,
    q: &dyn Operad,
    window: &Window,
    max_size: usize,
    lifts: &[IsoLift],
) -> Result<bool> {
    let field = Field::Rational;
    for sig in signatures(p, window.max_arity) {
        let m = component_map(f, p, q, &sig, max_size, crate::complex::FULL)?;
        for deg in m.tgt.degrees() {
            let fm = m.matrix(deg, field)?;
            if rank(&fm) != m.tgt.basis_in(deg).len() {
                return Ok(false);
            }
        }
    }
    if lifts.is_empty() {
        return Ok(true);
    }
    let table = h0_table(p, max_size.max(2))?;
    for l in lifts {
        if f.color(l.lifted) != l.target {
            return Ok(false);
        }
        let image = l.lift.bind(|x| f.apply(x));
        if image != l.iso {
            return Ok(false);
        }
        if !table.are_inverse(p, l.source, l.lifted, &l.lift, &l.lift_inverse)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The standard inclusion S(n) → D(n) as a map of Ar_m operads.
pub fn sphere_to_disk(m: usize) -> impl OperadMap {
    crate::operad::FnMap::new((0..=m as Color).collect(), |x| match x {
        Label::Unit(_) => Lin::single(x.clone()),
        // the single basis vector of S(n) goes to the top cell of D(n)
        _ => Lin::single(Label::Gen(1)),
    })
}
