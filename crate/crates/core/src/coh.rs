//! DG-functors between DG-categories (operads concentrated in arity one), the bimodule
//! _fB_g, coherent transformations as Hochschild cochains truncated by word length, their
//! strictly associative composition, and the operad DGFun_∞ colored by a list of functors.
//!
//! Words are elements of the unreduced bar construction of the source category: chains
//! [sa_n | … | sa_1] with a_n outermost, |w| = Σ(|a_k| − 1). The empty word at an object s
//! is `Tag(EMPTY, s)`. A cochain τ ∈ Coh(f, g) is a combination of `Seq[w, b]` meaning
//! w ↦ b with b ∈ B(f(src w), g(tgt w)); its degree is |b| − |w|.
//!
//! Conventions, forced by D² = 0 and checked in tests:
//! - vertical composite (α ⋆ β)(w) = Σ_{w = w₁w₂} (−1)^{|β||w₁|} α(w₁) ∘ β(w₂), w₁ outer;
//! - Dτ = d_B τ − (−1)^{|τ|} τ d_W + φ_g ⋆ τ − (−1)^{|τ|} τ ⋆ φ_f, φ_f([a]) = f(a).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::barcobar::{Bar, Cooperad};
use crate::complex::{Complex, Window};
use crate::diagram::Shape;
use crate::error::{Error, Result};
use crate::lin::{is_odd, sign, Color, Label, Lin};
use crate::linalg::Q;
use crate::operad::{check_morphism, ColorSet, FnMap, Operad, OperadMap, Sig};
use crate::tree::Tr;

const EMPTY: u32 = 11;

pub type DgCat = Arc<dyn Operad>;

fn same_cat(a: &DgCat, b: &DgCat) -> bool {
    std::ptr::addr_eq(Arc::as_ptr(a), Arc::as_ptr(b))
}

/// x ∘ y in a DG-category: first y, then x.
fn comp(c: &dyn Operad, x: &Lin, y: &Lin) -> Lin {
    crate::operad::compose_lin(c, x, 0, y)
}

/// Basis of the hom complex C(s, t), unit included.
pub fn hom_basis(c: &dyn Operad, s: Color, t: Color, max_size: usize) -> Vec<Label> {
    let mut v: Vec<Label> = c.elements(t, 1, max_size).into_iter().filter(|x| c.sig(x).ins == [s]).collect();
    if s == t {
        v.insert(0, c.unit(s));
    }
    v
}

/// A DG-functor: object map and a degree-0 map on basis elements; units go to units.
#[derive(Clone)]
pub struct DgFunctor {
    pub name: String,
    pub src: DgCat,
    pub tgt: DgCat,
    pub map: FnMap,
}

impl DgFunctor {
    pub fn new(name: &str, src: DgCat, tgt: DgCat, map: FnMap) -> DgFunctor {
        DgFunctor { name: name.into(), src, tgt, map }
    }

    pub fn identity(a: DgCat) -> DgFunctor {
        let n = a.colors().len();
        DgFunctor::new("Id", a.clone(), a, FnMap::identity(n))
    }

    /// Identity on objects, x ↦ scale(x)·x on basis elements; a functor iff `scale` is
    /// multiplicative along composition and constant along d.
    pub fn scaling(name: &str, cat: DgCat, scale: impl Fn(&Label) -> Q + Send + Sync + 'static) -> DgFunctor {
        let n = cat.colors().len();
        DgFunctor::new(name, cat.clone(), cat, FnMap::new((0..n as Color).collect(), move |x| Lin::term(x.clone(), scale(x))))
    }

    pub fn obj(&self, s: Color) -> Color {
        self.map.color(s)
    }

    pub fn apply(&self, x: &Label) -> Lin {
        match x {
            Label::Unit(c) => Lin::single(self.tgt.unit(self.obj(*c))),
            _ => self.map.apply(x),
        }
    }

    pub fn apply_lin(&self, v: &Lin) -> Lin {
        v.bind(|x| self.apply(x))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &DgFunctor) -> Result<DgFunctor> {
        if !same_cat(&self.tgt, &next.src) {
            return Err(Error::NotComposable(format!("{} then {}", self.name, next.name)));
        }
        let (a, b) = (self.clone(), next.clone());
        let colors = self.map.colors.iter().map(|&c| next.obj(c)).collect();
        let name = format!("{}{}", next.name, self.name);
        Ok(DgFunctor::new(&name, self.src.clone(), next.tgt.clone(), FnMap::new(colors, move |x| b.apply_lin(&a.apply(x)))))
    }

    /// Strict compatibility with differentials, composition and units.
    pub fn check(&self, max_size: usize) -> Result<()> {
        let me = self.clone();
        let f = FnMap::new(self.map.colors.clone(), move |x| me.apply(x));
        check_morphism(&f, self.src.as_ref(), self.tgt.as_ref(), &Window::new(1, max_size), max_size)
    }
}

/// Words of length ≤ `max_len` over a DG-category, with deconcatenation and the bar differential.
pub struct Words {
    pub cat: DgCat,
    bar: Bar,
    pub max_len: usize,
    pub max_size: usize,
    all: Vec<Label>,
    /// w ↦ [(v, c)] with c = coefficient of w in d_W v.
    d_inverse: HashMap<Label, Vec<(Label, Q)>>,
}

pub fn empty_word(s: Color) -> Label {
    Label::tag(EMPTY, Label::Int(s as i64))
}

fn chain(letters: &[Label]) -> Tr<Label> {
    let mut t: Option<Tr<Label>> = None;
    for a in letters.iter().rev() {
        t = Some(Tr { dec: a.clone(), ins: vec![t] });
    }
    t.expect("nonempty word")
}

impl Words {
    pub fn new(cat: DgCat, max_len: usize, max_size: usize) -> Words {
        let bar = Bar::unreduced(cat.clone());
        let mut all: Vec<Label> = cat.colors().all().map(empty_word).collect();
        if max_len > 0 {
            for c in cat.colors().all() {
                all.extend(bar.elements(c, 1, max_len, max_len * max_size));
            }
        }
        let mut d_inverse: HashMap<Label, Vec<(Label, Q)>> = HashMap::new();
        for v in &all {
            if v.as_tree().is_some() {
                for (w, c) in bar.diff(v).iter() {
                    d_inverse.entry(w.clone()).or_default().push((v.clone(), c.clone()));
                }
            }
        }
        Words { cat, bar, max_len, max_size, all, d_inverse }
    }

    pub fn all(&self) -> &[Label] {
        &self.all
    }

    pub fn letters(w: &Label) -> Vec<Label> {
        let mut out = Vec::new();
        let mut cur = w.as_tree();
        while let Some(t) = cur {
            out.push(t.dec.clone());
            cur = t.ins[0].as_ref();
        }
        out
    }

    /// The word with the given letters (outermost first), or the empty word at `at`.
    pub fn word(letters: &[Label], at: Color) -> Label {
        if letters.is_empty() {
            empty_word(at)
        } else {
            Label::tree(chain(letters))
        }
    }

    pub fn len(w: &Label) -> usize {
        Self::letters(w).len()
    }

    pub fn src(&self, w: &Label) -> Color {
        match w.untag() {
            Some((EMPTY, s)) => s.as_int().unwrap() as Color,
            _ => self.bar.sig(w).ins[0],
        }
    }

    pub fn tgt(&self, w: &Label) -> Color {
        match w.untag() {
            Some((EMPTY, s)) => s.as_int().unwrap() as Color,
            _ => self.bar.sig(w).out,
        }
    }

    pub fn degree(&self, w: &Label) -> i64 {
        Self::letters(w).iter().map(|a| self.cat.degree(a) - 1).sum()
    }

    pub fn d(&self, w: &Label) -> Lin {
        if w.as_tree().is_some() {
            self.bar.diff(w)
        } else {
            Lin::zero()
        }
    }

    fn d_inverse(&self, w: &Label) -> &[(Label, Q)] {
        self.d_inverse.get(w).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// All deconcatenations w = w₁·w₂ (w₁ outer), empty parts included.
    pub fn splits(&self, w: &Label) -> Vec<(Label, Label)> {
        let ls = Self::letters(w);
        let (s, t) = (self.src(w), self.tgt(w));
        (0..=ls.len())
            .map(|k| {
                let mid = if k == ls.len() { s } else { self.tgt(&Self::word(&ls[k..], 0)) };
                let w1 = Self::word(&ls[..k], if k == 0 { t } else { mid });
                let w2 = Self::word(&ls[k..], s);
                (w1, w2)
            })
            .collect()
    }

    /// w₁·w₂ when composable and within the length bound.
    pub fn concat(&self, w1: &Label, w2: &Label) -> Option<Label> {
        if self.src(w1) != self.tgt(w2) {
            return None;
        }
        let mut ls = Self::letters(w1);
        ls.extend(Self::letters(w2));
        if ls.len() > self.max_len {
            return None;
        }
        Some(Self::word(&ls, self.src(w2)))
    }

    /// Letters in the source category A: basis elements and units of size ≤ max_size.
    pub fn alphabet(&self) -> Vec<Label> {
        self.cat.all_elements(1, self.max_size)
    }
}

/// B(F) on words: every letter mapped, the product expanded.
pub fn map_word(f: &DgFunctor, w: &Label) -> Lin {
    let ls = Words::letters(w);
    if ls.is_empty() {
        let s = match w.untag() {
            Some((EMPTY, s)) => s.as_int().unwrap() as Color,
            _ => unreachable!(),
        };
        return Lin::single(empty_word(f.obj(s)));
    }
    let mut acc: Vec<(Vec<Label>, Q)> = vec![(Vec::new(), Q::from_integer(1.into()))];
    for a in &ls {
        let img = f.apply(a);
        let mut next = Vec::new();
        for (p, c) in &acc {
            for (t, ct) in img.iter() {
                let mut p2 = p.clone();
                p2.push(t.clone());
                next.push((p2, c * ct));
            }
        }
        acc = next;
    }
    Lin::from_terms(acc.into_iter().map(|(p, c)| (Label::tree(chain(&p)), c)))
}

/// The A-A bimodule _fB_g: components B(f(s), g(t)), a·m·a' = g(a) ∘ m ∘ f(a').
pub struct Bimodule {
    pub f: DgFunctor,
    pub g: DgFunctor,
    pub components: BTreeMap<(Color, Color), Vec<Label>>,
}

pub fn bimodule(f: &DgFunctor, g: &DgFunctor, max_size: usize) -> Result<Bimodule> {
    if !same_cat(&f.src, &g.src) || !same_cat(&f.tgt, &g.tgt) {
        return Err(Error::SourceMismatch(format!("{} and {} have different source or target", f.name, g.name)));
    }
    let mut components = BTreeMap::new();
    for s in f.src.colors().all() {
        for t in f.src.colors().all() {
            components.insert((s, t), hom_basis(f.tgt.as_ref(), f.obj(s), g.obj(t), max_size));
        }
    }
    Ok(Bimodule { f: f.clone(), g: g.clone(), components })
}

impl Bimodule {
    pub fn act_left(&self, a: &Label, m: &Lin) -> Lin {
        comp(self.f.tgt.as_ref(), &self.g.apply(a), m)
    }

    pub fn act_right(&self, m: &Lin, a: &Label) -> Lin {
        comp(self.f.tgt.as_ref(), m, &self.f.apply(a))
    }
}

/// The truncated Hochschild complex Coh(f, g) = Hom(B(A), _fB_g) on words of length ≤ L.
pub struct CohSpace {
    pub f: DgFunctor,
    pub g: DgFunctor,
    pub words: Arc<Words>,
    homs: HashMap<(Color, Color), Vec<Label>>,
    pub max_size: usize,
}

fn cochain(w: &Label, b: &Label) -> Label {
    Label::seq(vec![w.clone(), b.clone()])
}

fn parts(l: &Label) -> (&Label, &Label) {
    let s = l.as_seq().expect("cochain basis element");
    (&s[0], &s[1])
}

impl CohSpace {
    pub fn new(f: &DgFunctor, g: &DgFunctor, words: Arc<Words>, max_size: usize) -> Result<CohSpace> {
        if !same_cat(&f.src, &g.src) || !same_cat(&f.tgt, &g.tgt) {
            return Err(Error::SourceMismatch(format!("{} and {} have different source or target", f.name, g.name)));
        }
        if !same_cat(&words.cat, &f.src) {
            return Err(Error::SourceMismatch("words over a different category".into()));
        }
        let b = f.tgt.as_ref();
        let mut homs = HashMap::new();
        for x in b.colors().all() {
            for y in b.colors().all() {
                homs.insert((x, y), hom_basis(b, x, y, max_size));
            }
        }
        Ok(CohSpace { f: f.clone(), g: g.clone(), words, homs, max_size })
    }

    fn b(&self) -> &dyn Operad {
        self.f.tgt.as_ref()
    }

    fn hom(&self, x: Color, y: Color) -> &[Label] {
        &self.homs[&(x, y)]
    }

    pub fn basis(&self) -> Vec<(Label, i64)> {
        let mut out = Vec::new();
        for w in self.words.all() {
            let dw = self.words.degree(w);
            for b in self.hom(self.f.obj(self.words.src(w)), self.g.obj(self.words.tgt(w))) {
                out.push((cochain(w, b), self.b().degree(b) - dw));
            }
        }
        out
    }

    pub fn degree(&self, l: &Label) -> i64 {
        let (w, b) = parts(l);
        self.b().degree(b) - self.words.degree(w)
    }

    /// τ(w) ∈ B.
    pub fn value(&self, tau: &Lin, w: &Label) -> Lin {
        let mut out = Lin::zero();
        for (l, c) in tau.iter() {
            let (v, b) = parts(l);
            if v == w {
                out.add_term(b.clone(), c.clone());
            }
        }
        out
    }

    fn lift(w: &Label, v: &Lin) -> Lin {
        Lin::from_terms(v.iter().map(|(b, c)| (cochain(w, b), c.clone())))
    }

    /// The Hochschild differential on one basis cochain.
    pub fn d_basis(&self, l: &Label) -> Lin {
        let (w, b) = parts(l);
        let words = &self.words;
        let t = self.degree(l);
        let st = sign(is_odd(t));
        let bl = Lin::single(b.clone());
        let mut out = Self::lift(w, &self.b().diff(b));
        for (v, c) in words.d_inverse(w) {
            out.add_term(cochain(v, b), -(c * &st));
        }
        if Words::len(w) < words.max_len {
            for a in words.alphabet() {
                let sa = words.cat.sig(&a);
                let la = words.cat.degree(&a) - 1;
                if sa.out == words.src(w) {
                    let v = words.concat(w, &Words::word(&[a.clone()], sa.ins[0])).expect("composable");
                    let s = -(&st * sign(is_odd(words.degree(w))));
                    out.axpy(&s, &Self::lift(&v, &comp(self.b(), &bl, &self.f.apply(&a))));
                }
                if sa.ins[0] == words.tgt(w) {
                    let v = words.concat(&Words::word(&[a.clone()], sa.out), w).expect("composable");
                    let s = sign(is_odd(t * la));
                    out.axpy(&s, &Self::lift(&v, &comp(self.b(), &self.g.apply(&a), &bl)));
                }
            }
        }
        out
    }

    pub fn d(&self, tau: &Lin) -> Lin {
        tau.bind(|l| self.d_basis(l))
    }

    /// id_f: the empty word at s goes to 1_{f(s)}.
    pub fn identity(&self) -> Lin {
        Lin::from_terms(
            self.f.src.colors().all().map(|s| (cochain(&empty_word(s), &self.b().unit(self.f.obj(s))), Q::from_integer(1.into()))),
        )
    }

    /// Weight-0 part: the components on empty words.
    pub fn weight_zero(&self, tau: &Lin) -> Lin {
        Lin::from_terms(tau.iter().filter(|(l, _)| Words::len(parts(l).0) == 0).map(|(l, c)| (l.clone(), c.clone())))
    }

    /// The cochain with the given components on empty words.
    pub fn from_components(&self, eta: &[(Color, Lin)]) -> Lin {
        let mut out = Lin::zero();
        for (s, v) in eta {
            out.add(&Self::lift(&empty_word(*s), v));
        }
        out
    }
}

/// The truncated Hochschild complex of Coh(f, g).
pub fn coh_complex(space: &CohSpace) -> Result<Complex> {
    let basis = space.basis();
    let words = &space.words;
    let max_a = words.alphabet().iter().map(|a| words.cat.degree(a)).max().unwrap_or(0);
    let min_b = basis.iter().map(|(l, _)| space.b().degree(parts(l).1)).min().unwrap_or(0);
    // a word of length > L has degree ≤ −(L+1)(1 − max_a); cochains on it start above hi + 1
    let hi = if max_a <= 0 { min_b + words.max_len as i64 - 1 } else { i64::MIN / 4 };
    if hi < min_b {
        return Err(Error::WindowTooNarrow(format!("word length {} leaves no exact degree", words.max_len)));
    }
    Complex::new(basis, |l| space.d_basis(l), (i64::MIN / 4, hi))
}

/// Vertical composite α ⋆ β for α ∈ Coh(g, h), β ∈ Coh(f, g), by the convolution formula.
pub fn convolve(out: &CohSpace, alpha: &Lin, a_space: &CohSpace, beta: &Lin, b_space: &CohSpace) -> Lin {
    let words = &out.words;
    let mut res = Lin::zero();
    for (la, ca) in alpha.iter() {
        let (w1, b1) = parts(la);
        for (lb, cb) in beta.iter() {
            let (w2, b2) = parts(lb);
            let Some(w) = words.concat(w1, w2) else { continue };
            let s = sign(is_odd(b_space.degree(lb) * words.degree(w1)));
            let prod = comp(out.b(), &Lin::single(b1.clone()), &Lin::single(b2.clone()));
            res.axpy(&(ca * cb * s), &CohSpace::lift(&w, &prod));
        }
    }
    let _ = a_space;
    res
}

/// A map of B(A)-comodules and right B-modules B(A) ⊗ _fB → B(A) ⊗ _gB, tabulated on the
/// basis (w, b), b ∈ B(y, f(src w)), of the truncated source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComoduleMap {
    pub table: BTreeMap<Label, Lin>,
}

/// Basis of the truncated free comodule B(A) ⊗ _fB.
pub fn free_comodule_basis(words: &Words, f: &DgFunctor, max_size: usize) -> Vec<Label> {
    let b = f.tgt.as_ref();
    let mut out = Vec::new();
    for w in words.all() {
        for y in b.colors().all() {
            for x in hom_basis(b, y, f.obj(words.src(w)), max_size) {
                out.push(cochain(w, &x));
            }
        }
    }
    out
}

/// Φ_τ(w, b) = Σ_{w = w₁w₂} (−1)^{|τ||w₁|} (w₁, τ(w₂) ∘ b).
pub fn comodule_form(space: &CohSpace, tau: &Lin) -> ComoduleMap {
    let words = &space.words;
    let mut table = BTreeMap::new();
    for m in free_comodule_basis(words, &space.f, space.max_size) {
        let (w, b) = parts(&m);
        let bl = Lin::single(b.clone());
        let mut img = Lin::zero();
        for (w1, w2) in words.splits(w) {
            for (l, c) in tau.iter() {
                let (v, x) = parts(l);
                if *v != w2 {
                    continue;
                }
                let s = sign(is_odd(space.degree(l) * words.degree(&w1)));
                img.axpy(&(c * s), &CohSpace::lift(&w1, &comp(space.b(), &Lin::single(x.clone()), &bl)));
            }
        }
        table.insert(m, img);
    }
    ComoduleMap { table }
}

/// Inverse of `comodule_form`: τ(w) = counit part of Φ(w, 1).
pub fn from_comodule(space: &CohSpace, phi: &ComoduleMap) -> Lin {
    let words = &space.words;
    let mut tau = Lin::zero();
    for w in words.all() {
        let one = cochain(w, &space.b().unit(space.f.obj(words.src(w))));
        if let Some(img) = phi.table.get(&one) {
            for (l, c) in img.iter() {
                let (w1, x) = parts(l);
                if Words::len(w1) == 0 {
                    tau.add_term(cochain(w, x), c.clone());
                }
            }
        }
    }
    tau
}

impl ComoduleMap {
    pub fn apply(&self, v: &Lin) -> Lin {
        v.bind(|m| self.table.get(m).cloned().unwrap_or_else(|| panic!("{m} outside the tabulated comodule")))
    }

    /// `self ∘ other` (first other).
    pub fn after(&self, other: &ComoduleMap) -> ComoduleMap {
        ComoduleMap { table: other.table.iter().map(|(m, v)| (m.clone(), self.apply(v))).collect() }
    }

    /// Coaction compatibility Δ Φ = (1 ⊗ Φ) Δ with the Koszul sign of passing Φ (degree
    /// `deg`) over the outer factor, and right B-linearity.
    pub fn is_comodule_map(&self, words: &Words, b: &dyn Operad, deg: i64) -> bool {
        let coact = |m: &Label| -> Vec<(Label, Label)> {
            let (w, x) = parts(m);
            words.splits(w).into_iter().map(|(w1, w2)| (w1, cochain(&w2, x))).collect()
        };
        for (m, img) in &self.table {
            let mut lhs: BTreeMap<Label, Lin> = BTreeMap::new();
            for (t, c) in img.iter() {
                for (w1, rest) in coact(t) {
                    lhs.entry(w1).or_default().add_term(rest, c.clone());
                }
            }
            let mut rhs: BTreeMap<Label, Lin> = BTreeMap::new();
            for (w1, rest) in coact(m) {
                let s = sign(is_odd(deg * words.degree(&w1)));
                let Some(v) = self.table.get(&rest) else { return false };
                rhs.entry(w1).or_default().axpy(&s, v);
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            if lhs != rhs {
                return false;
            }
            // Φ(w, x) = Φ(w, 1) · x
            let (w, x) = parts(m);
            let one = cochain(w, &b.unit(b.sig(x).out));
            if let Some(base) = self.table.get(&one) {
                let moved = base.bind(|t| {
                    let (u, y) = parts(t);
                    CohSpace::lift(u, &comp(b, &Lin::single(y.clone()), &Lin::single(x.clone())))
                });
                if moved != *img {
                    return false;
                }
            }
        }
        true
    }
}

/// Twisted differential of B(A) ⊗_{φ_f} B on a basis element (w, b).
pub fn comodule_d(words: &Words, f: &DgFunctor, m: &Label) -> Lin {
    let b = f.tgt.as_ref();
    let (w, x) = parts(m);
    let xl = Lin::single(x.clone());
    let mut out = Lin::zero();
    for (v, c) in words.d(w).iter() {
        out.add_term(cochain(v, x), c.clone());
    }
    out.axpy(&sign(is_odd(words.degree(w))), &CohSpace::lift(w, &b.diff(x)));
    let ls = Words::letters(w);
    if let Some((a, rest)) = ls.split_last() {
        let w1 = Words::word(rest, words.cat.sig(a).out);
        out.axpy(&sign(is_odd(words.degree(&w1))), &CohSpace::lift(&w1, &comp(b, &f.apply(a), &xl)));
    }
    out
}

/// D(Φ) = d Φ − (−1)^{|Φ|} Φ d on the tabulated basis.
pub fn comodule_map_d(space: &CohSpace, phi: &ComoduleMap, deg: i64) -> ComoduleMap {
    let words = &space.words;
    let s = sign(is_odd(deg));
    let table = phi
        .table
        .iter()
        .map(|(m, v)| {
            let mut out = v.bind(|t| comodule_d(words, &space.g, t));
            out.axpy(&-s.clone(), &phi.apply(&comodule_d(words, &space.f, m)));
            (m.clone(), out)
        })
        .collect();
    ComoduleMap { table }
}

/// n-ary composite ∘_n(τ_n, …, τ_1), computed as the composite of comodule maps. `chain`
/// lists (space, τ) outermost first; consecutive functors must match.
pub fn compose_coh(chain: &[(&CohSpace, &Lin)], out: &CohSpace) -> Result<Lin> {
    if chain.is_empty() {
        return Err(Error::NotComposable("empty chain".into()));
    }
    for pair in chain.windows(2) {
        if pair[0].0.f.name != pair[1].0.g.name {
            return Err(Error::NotComposable(format!("{} after {}", pair[0].0.f.name, pair[1].0.g.name)));
        }
    }
    if out.f.name != chain.last().unwrap().0.f.name || out.g.name != chain[0].0.g.name {
        return Err(Error::NotComposable("output space does not match the chain".into()));
    }
    let mut total = comodule_form(chain.last().unwrap().0, chain.last().unwrap().1);
    for (space, tau) in chain.iter().rev().skip(1) {
        total = comodule_form(space, tau).after(&total);
    }
    Ok(from_comodule(out, &total))
}

/// DGFun_∞: colors are the given functors (1-cells of `shape`, functor k between the
/// categories at its endpoints); the cell (f_1, …, f_n; g) carries Coh(f_n ∘ … ∘ f_1, g).
/// Basis labels are `Seq[ins, out, w, b]`.
pub struct DgFunInfty {
    pub shape: Shape,
    pub cats: Vec<DgCat>,
    pub functors: Vec<DgFunctor>,
    colors: ColorSet,
    words: Vec<Arc<Words>>,
    pub max_len: usize,
    pub max_size: usize,
    spaces: Mutex<HashMap<Sig, Arc<CohSpace>>>,
}

pub fn dgfun_infty(shape: Shape, cats: Vec<DgCat>, functors: Vec<DgFunctor>, max_len: usize, max_size: usize) -> Result<DgFunInfty> {
    if functors.len() != shape.edges.len() || cats.len() != shape.objects.len() {
        return Err(Error::ShapeMismatch("one functor per 1-cell and one category per object".into()));
    }
    for (k, f) in functors.iter().enumerate() {
        let (i, j) = (shape.edges[k].1 as usize, shape.edges[k].2 as usize);
        if !same_cat(&f.src, &cats[i]) || !same_cat(&f.tgt, &cats[j]) {
            return Err(Error::ShapeMismatch(format!("functor {} does not go between its endpoints", f.name)));
        }
    }
    let names: Vec<&str> = shape.edges.iter().map(|e| e.0.as_str()).collect();
    let colors = ColorSet::new(&names);
    let words = cats.iter().map(|c| Arc::new(Words::new(c.clone(), max_len, max_size))).collect();
    Ok(DgFunInfty { shape, cats, functors, colors, words, max_len, max_size, spaces: Mutex::new(HashMap::new()) })
}

fn ints(l: &Label) -> Vec<Color> {
    l.as_seq().unwrap().iter().map(|x| x.as_int().unwrap() as Color).collect()
}

impl DgFunInfty {
    /// The composite functor of a path (identity on the empty path at object i).
    pub fn path_functor(&self, path: &[Color], at: u32) -> DgFunctor {
        let mut f = DgFunctor::identity(self.cats[at as usize].clone());
        f.name = format!("Id{at}");
        for (k, &e) in path.iter().enumerate() {
            let next = &self.functors[e as usize];
            f = if k == 0 { next.clone() } else { f.then(next).expect("composable path") };
        }
        f
    }

    pub fn space(&self, sig: &Sig) -> Arc<CohSpace> {
        if let Some(s) = self.spaces.lock().unwrap().get(sig) {
            return s.clone();
        }
        let i = self.shape.src(sig.ins[0]);
        let f = self.path_functor(&sig.ins, i);
        let g = self.functors[sig.out as usize].clone();
        let s = Arc::new(CohSpace::new(&f, &g, self.words[i as usize].clone(), self.max_size).expect("cell endpoints agree"));
        self.spaces.lock().unwrap().insert(sig.clone(), s.clone());
        s
    }

    fn raw_tag(sig: &Sig, w: &Label, b: &Label) -> Label {
        let ins: Vec<i64> = sig.ins.iter().map(|&c| c as i64).collect();
        Label::seq(vec![Label::ints(&ins), Label::Int(sig.out as i64), w.clone(), b.clone()])
    }

    /// On a diagonal cell (c; c) the basis element ∅₀ ↦ 1 is replaced by the unit, which
    /// stands for the identity cochain Σ_s (∅_s ↦ 1).
    fn replaced(&self, sig: &Sig) -> Option<Label> {
        (sig.ins == [sig.out]).then(|| {
            let sp = self.space(sig);
            let s0 = self.cats[self.shape.src(sig.out) as usize].colors().all().next().unwrap();
            Self::raw_tag(sig, &empty_word(s0), &sp.b().unit(sp.f.obj(s0)))
        })
    }

    fn tag(&self, sig: &Sig, v: &Lin) -> Lin {
        let mut out = Lin::from_terms(v.iter().map(|(l, c)| {
            let (w, b) = parts(l);
            (Self::raw_tag(sig, w, b), c.clone())
        }));
        if let Some(k) = self.replaced(sig) {
            let c = out.coeff(&k);
            if c != Q::from_integer(0.into()) {
                let id = self.space(sig).identity();
                for (l, _) in id.iter() {
                    let (w, b) = parts(l);
                    out.add_term(Self::raw_tag(sig, w, b), -c.clone());
                }
                out.add_term(Label::Unit(sig.out), c);
            }
        }
        out
    }

    fn untag(&self, x: &Label) -> (Sig, Label) {
        let s = x.as_seq().expect("DGFun element");
        (Sig::new(ints(&s[0]), s[1].as_int().unwrap() as Color), cochain(&s[2], &s[3]))
    }

    /// Embeds a cochain of Coh(path functor, g) as an element on the cell `sig`.
    pub fn element(&self, sig: &Sig, tau: &Lin) -> Lin {
        self.tag(sig, tau)
    }

    /// The cochain underlying an element on one cell.
    pub fn cochain_of(&self, v: &Lin) -> Lin {
        let mut out = Lin::zero();
        for (l, c) in v.iter() {
            match l {
                Label::Unit(k) => out.axpy(c, &self.space(&Sig::new(vec![*k], *k)).identity()),
                _ => out.add_term(self.untag(l).1, c.clone()),
            }
        }
        out
    }

    /// (L y R)(w) = L(y(R(w))): y whiskered by functors after (L) and before (R).
    fn whisker(&self, y_space: &CohSpace, y: &Label, left: &DgFunctor, right: &DgFunctor, words: &Words) -> Vec<(Label, Label, Q)> {
        let (u, c) = parts(y);
        let n = Words::len(u);
        let mut out = Vec::new();
        for w in words.all() {
            if Words::len(w) != n || right.obj(words.src(w)) != y_space.words.src(u) || right.obj(words.tgt(w)) != y_space.words.tgt(u) {
                continue;
            }
            let k = map_word(right, w).coeff(u);
            if k == Q::from_integer(0.into()) {
                continue;
            }
            for (b, cb) in left.apply(c).iter() {
                out.push((w.clone(), b.clone(), &k * cb));
            }
        }
        out
    }
}

impl Operad for DgFunInfty {
    fn name(&self) -> String {
        "DGFun_inf".into()
    }

    fn colors(&self) -> &ColorSet {
        &self.colors
    }

    fn sig(&self, x: &Label) -> Sig {
        match x {
            Label::Unit(c) => Sig::new(vec![*c], *c),
            _ => self.untag(x).0,
        }
    }

    fn degree(&self, x: &Label) -> i64 {
        match x {
            Label::Unit(_) => 0,
            _ => {
                let (sig, l) = self.untag(x);
                self.space(&sig).degree(&l)
            }
        }
    }

    fn size(&self, x: &Label) -> usize {
        match x {
            Label::Unit(_) => 0,
            _ => Words::len(parts(&self.untag(x).1).0) + 1,
        }
    }

    fn diff_raw(&self, x: &Label) -> Lin {
        let (sig, l) = self.untag(x);
        self.tag(&sig, &self.space(&sig).d_basis(&l))
    }

    fn compose_raw(&self, x: &Label, i: usize, y: &Label) -> Lin {
        let (sx, lx) = self.untag(x);
        let (sy, ly) = self.untag(y);
        let sig = sx.compose(i, &sy);
        let out_space = self.space(&sig);
        let x_space = self.space(&sx);
        let y_space = self.space(&sy);
        let at = self.shape.src(sx.ins[0]);
        let right = self.path_functor(&sx.ins[..i], at);
        let left = self.path_functor(&sx.ins[i + 1..], self.shape.tgt(sx.ins[i]));
        let words = &out_space.words;
        let z: Lin = Lin::from_terms(
            self.whisker(&y_space, &ly, &left, &right, words).into_iter().map(|(w, b, c)| (cochain(&w, &b), c)),
        );
        let (w1, b1) = parts(&lx);
        let zdeg = y_space.degree(&ly);
        let mut res = Lin::zero();
        for (lz, cz) in z.iter() {
            let (w2, b2) = parts(lz);
            let Some(w) = words.concat(w1, w2) else { continue };
            let s = sign(is_odd(zdeg * words.degree(w1)));
            let prod = comp(out_space.b(), &Lin::single(b1.clone()), &Lin::single(b2.clone()));
            res.axpy(&(cz * s), &CohSpace::lift(&w, &prod));
        }
        let _ = x_space;
        self.tag(&sig, &res)
    }

    fn elements(&self, out: Color, max_arity: usize, _max_size: usize) -> Vec<Label> {
        let mut v = Vec::new();
        let i = self.shape.src(out);
        let j = self.shape.tgt(out);
        for n in 1..=max_arity {
            for p in crate::twocat::enumerate_paths(&self.shape, n, i, j) {
                let sig = Sig::new(p, out);
                let sp = self.space(&sig);
                let skip = self.replaced(&sig);
                for (l, _) in sp.basis() {
                    let (w, b) = parts(&l);
                    let t = Self::raw_tag(&sig, w, b);
                    if Some(&t) != skip.as_ref() {
                        v.push(t);
                    }
                }
            }
        }
        v
    }
}
