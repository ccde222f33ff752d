//! Bar B(P) as a cooperad of P-decorated trees, cobar Ω(C) as the quasi-free operad on σC,
//! twisting cochains, and the transport between Ω(C) → P, C → B(P) and C → P.
//!
//! Grading is cohomological. The suspension lowers degree: |sx| = |x| − 1, so a bar tree
//! has degree Σ(|x_v| − 1) and a cobar generator σc has degree |c| + 1. Bar decorations
//! are stored in preorder; every sign below is the Koszul sign of moving suspended labels.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{is_quasi_iso, ChainMap, QisoCertificate, Window};
use crate::error::{Error, Result};
use crate::linalg::{q, Field, Q};
use crate::lin::{is_odd, sign, Color, Label, Lin};
use crate::operad::free::{corolla, FreeOperad, GenSource};
use crate::operad::{
    augmentation_violation, compose_lin, component_complex, diff_lin, enumerate_decorated, evaluate, ColorSet, FnMap,
    Operad, OperadMap, PoolItem, Sig,
};
use crate::tree::Tr;

/// A coaugmented cooperad, described by its coideal C̄ (the counit part is implicit).
pub trait Cooperad: Send + Sync {
    fn name(&self) -> String;
    fn colors(&self) -> &ColorSet;
    fn sig(&self, x: &Label) -> Sig;
    fn degree(&self, x: &Label) -> i64;
    /// Coradical weight; connectedness means every coideal element has weight ≥ 1.
    fn weight(&self, x: &Label) -> usize;
    fn size(&self, x: &Label) -> usize;
    fn diff(&self, x: &Label) -> Lin;
    /// Infinitesimal decomposition, dual to ∘_i: terms c · x1 ⊗_i x2 with both factors in C̄.
    fn delta1(&self, x: &Label) -> Vec<(Label, usize, Label, Q)>;
    fn elements(&self, out: Color, max_arity: usize, max_weight: usize, max_size: usize) -> Vec<Label>;

    fn all_elements(&self, window: &Window, max_size: usize) -> Vec<Label> {
        let mut v = Vec::new();
        for c in self.colors().all() {
            v.extend(self.elements(c, window.max_arity, window.max_weight, max_size));
        }
        v
    }
}

/// Δ_(1) as a vector: x1 ⊗_i x2 is encoded as `Seq[x1, Int(i), x2]`.
pub fn delta1_lin(c: &dyn Cooperad, x: &Label) -> Lin {
    Lin::from_terms(c.delta1(x).into_iter().map(|(a, i, b, k)| (Label::seq(vec![a, Label::Int(i as i64), b]), k)))
}

pub fn tree_sig(t: &Tr<Label>, sig: &dyn Fn(&Label) -> Sig) -> Sig {
    fn go(t: &Tr<Label>, sig: &dyn Fn(&Label) -> Sig, ins: &mut Vec<Color>) -> Color {
        let s = sig(&t.dec);
        for (j, slot) in t.ins.iter().enumerate() {
            match slot {
                None => ins.push(s.ins[j]),
                Some(c) => {
                    go(c, sig, ins);
                }
            }
        }
        s.out
    }
    let mut ins = Vec::new();
    let out = go(t, sig, &mut ins);
    Sig::new(ins, out)
}

/// Multilinear expansion of a tree of vectors into a vector of trees.
pub fn expand(t: &Tr<Lin>) -> Vec<(Tr<Label>, Q)> {
    let mut out: Vec<(Tr<Label>, Q)> = Vec::new();
    let kids: Vec<Option<Vec<(Tr<Label>, Q)>>> = t.ins.iter().map(|s| s.as_ref().map(expand)).collect();
    for (d, c) in t.dec.iter() {
        let mut partial: Vec<(Vec<Option<Tr<Label>>>, Q)> = vec![(Vec::new(), c.clone())];
        for k in &kids {
            let mut next = Vec::new();
            for (slots, cc) in partial {
                match k {
                    None => {
                        let mut s = slots.clone();
                        s.push(None);
                        next.push((s, cc));
                    }
                    Some(opts) => {
                        for (st, c2) in opts {
                            let mut s = slots.clone();
                            s.push(Some(st.clone()));
                            next.push((s, &cc * c2));
                        }
                    }
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|(ins, cc)| (Tr { dec: d.clone(), ins }, cc)));
    }
    out
}

fn expand_lin(t: &Tr<Lin>) -> Lin {
    Lin::from_terms(expand(t).into_iter().map(|(t, c)| (Label::tree(t), c)))
}

/// Bar construction: trees with at least one vertex, vertices decorated by P̄ (reduced) or by
/// all of P including units (unreduced, for operads without augmentation).
pub struct Bar {
    pub p: Arc<dyn Operad>,
    pub reduced: bool,
    cache: Mutex<HashMap<(Color, usize, usize, usize), Arc<Vec<Label>>>>,
}

impl Bar {
    /// Reduced bar; the augmentation is checked on the window.
    pub fn reduced(p: Arc<dyn Operad>, window: &Window, max_size: usize) -> Result<Bar> {
        if let Some(v) = augmentation_violation(p.as_ref(), window, max_size) {
            return Err(Error::NotAugmented(format!("{}: {v}", p.name())));
        }
        Ok(Bar { p, reduced: true, cache: Mutex::new(HashMap::new()) })
    }

    /// Unreduced bar; units are allowed as decorations and carry weight 1.
    pub fn unreduced(p: Arc<dyn Operad>) -> Bar {
        Bar { p, reduced: false, cache: Mutex::new(HashMap::new()) }
    }

    fn tree<'a>(&self, x: &'a Label) -> &'a Tr<Label> {
        x.as_tree().unwrap_or_else(|| panic!("{x} is not a bar element"))
    }

    fn sdeg(&self, y: &Label) -> i64 {
        self.p.degree(y) - 1
    }

    /// sy as a one-vertex bar element.
    pub fn suspend(&self, y: &Label) -> Label {
        corolla(y.clone(), self.p.sig(y).arity())
    }

    /// B(φ): applies an operad morphism to every vertex. Degree 0, so no signs.
    pub fn map_of(&self, phi: Arc<dyn OperadMap>) -> LinMap {
        Arc::new(move |x: &Label| {
            let t = x.as_tree().expect("bar element");
            expand_lin(&t.map(&mut |d| phi.apply(d)))
        })
    }
}

impl Cooperad for Bar {
    fn name(&self) -> String {
        if self.reduced {
            format!("B({})", self.p.name())
        } else {
            format!("B+({})", self.p.name())
        }
    }

    fn colors(&self) -> &ColorSet {
        self.p.colors()
    }

    fn sig(&self, x: &Label) -> Sig {
        tree_sig(self.tree(x), &|d| self.p.sig(d))
    }

    fn degree(&self, x: &Label) -> i64 {
        self.tree(x).preorder().iter().map(|d| self.sdeg(d)).sum()
    }

    fn weight(&self, x: &Label) -> usize {
        self.tree(x).vertices()
    }

    fn size(&self, x: &Label) -> usize {
        self.tree(x).preorder().iter().map(|d| self.p.size(d)).sum()
    }

    fn diff(&self, x: &Label) -> Lin {
        let t = self.tree(x);
        let decs = t.preorder();
        let k = decs.len();
        let sd: Vec<i64> = decs.iter().map(|d| self.sdeg(d)).collect();
        let mut out = Lin::zero();
        // internal part: d(s x_v) = −s(d x_v), past the suspended labels before v
        let mut prefix = 0i64;
        for v in 0..k {
            let s = -sign(is_odd(prefix));
            for (z, c) in self.p.diff(decs[v]).iter() {
                let nt = t
                    .replace_at(v, &mut |n| Some(Tr { dec: z.clone(), ins: n.ins.clone() }))
                    .expect("vertex exists");
                out.add_term(Label::tree(nt), c * &s);
            }
            prefix += sd[v];
        }
        // contraction of each internal edge a → b at slot i of a
        let parents = t.parents();
        for b in 1..k {
            let (a, i) = parents[b].expect("non-root vertex has a parent");
            let between: i64 = sd[a + 1..b].iter().sum();
            let before: i64 = sd[..a].iter().sum();
            let odd = is_odd(sd[b] * between) ^ is_odd(before) ^ is_odd(self.p.degree(decs[a]));
            let s = sign(odd);
            for (z, c) in self.p.compose(decs[a], i, decs[b]).iter() {
                let nt = t.contract_with(b - 1, |_, _, _| z.clone()).expect("internal edge");
                out.add_term(Label::tree(nt), c * &s);
            }
        }
        out
    }

    fn delta1(&self, x: &Label) -> Vec<(Label, usize, Label, Q)> {
        let t = self.tree(x);
        let sd: Vec<i64> = t.preorder().iter().map(|d| self.sdeg(d)).collect();
        let mut out = Vec::new();
        for b in 1..sd.len() {
            let (low, pos, sub) = t.cut(b - 1).expect("internal edge");
            let n2 = sub.vertices();
            let x2: i64 = sd[b..b + n2].iter().sum();
            let after: i64 = sd[b + n2..].iter().sum();
            out.push((Label::tree(low), pos, Label::tree(sub), sign(is_odd(x2 * after))));
        }
        out
    }

    fn elements(&self, out: Color, max_arity: usize, max_weight: usize, max_size: usize) -> Vec<Label> {
        let key = (out, max_arity, max_weight, max_size);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.as_ref().clone();
        }
        let pool = |c: Color| -> Vec<PoolItem> {
            let mut items: Vec<PoolItem> = self
                .p
                .elements(c, max_arity, max_size)
                .into_iter()
                .filter(|y| !self.p.is_unit(y))
                .map(|y| PoolItem { sig: self.p.sig(&y), weight: 1, size: self.p.size(&y), label: y })
                .collect();
            if !self.reduced {
                let u = self.p.unit(c);
                items.push(PoolItem { sig: Sig::new(vec![c], c), weight: 1, size: 0, label: u });
            }
            items
        };
        let v: Vec<Label> = enumerate_decorated(&pool, out, max_arity, max_weight, max_size)
            .into_iter()
            .map(|d| Label::tree(d.tree))
            .collect();
        self.cache.lock().unwrap().insert(key, Arc::new(v.clone()));
        v
    }
}

/// A finite cooperad given by tables, for small hand-made examples.
#[derive(Clone, Debug, Default)]
pub struct TabCooperad {
    pub name: String,
    pub colors: ColorSet,
    elems: Vec<(Label, Sig, i64, usize)>,
    diffs: HashMap<Label, Lin>,
    deltas: HashMap<Label, Vec<(Label, usize, Label, Q)>>,
}

impl TabCooperad {
    pub fn new(name: &str, colors: ColorSet) -> TabCooperad {
        TabCooperad { name: name.into(), colors, ..Default::default() }
    }

    pub fn add(&mut self, sig: Sig, degree: i64, weight: usize) -> Label {
        let l = Label::Gen(self.elems.len() as u32);
        self.elems.push((l.clone(), sig, degree, weight));
        l
    }

    pub fn set_diff(&mut self, x: &Label, d: Lin) {
        self.diffs.insert(x.clone(), d);
    }

    pub fn set_delta(&mut self, x: &Label, d: Vec<(Label, usize, Label, Q)>) {
        self.deltas.insert(x.clone(), d);
    }

    fn entry(&self, x: &Label) -> &(Label, Sig, i64, usize) {
        self.elems.iter().find(|e| &e.0 == x).unwrap_or_else(|| panic!("{x} not in {}", self.name))
    }
}

impl Cooperad for TabCooperad {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn colors(&self) -> &ColorSet {
        &self.colors
    }
    fn sig(&self, x: &Label) -> Sig {
        self.entry(x).1.clone()
    }
    fn degree(&self, x: &Label) -> i64 {
        self.entry(x).2
    }
    fn weight(&self, x: &Label) -> usize {
        self.entry(x).3
    }
    fn size(&self, x: &Label) -> usize {
        self.entry(x).3
    }
    fn diff(&self, x: &Label) -> Lin {
        self.diffs.get(x).cloned().unwrap_or_default()
    }
    fn delta1(&self, x: &Label) -> Vec<(Label, usize, Label, Q)> {
        self.deltas.get(x).cloned().unwrap_or_default()
    }
    fn elements(&self, out: Color, max_arity: usize, max_weight: usize, max_size: usize) -> Vec<Label> {
        self.elems
            .iter()
            .filter(|e| e.1.out == out && e.1.arity() <= max_arity && e.3 <= max_weight && e.3 <= max_size)
            .map(|e| e.0.clone())
            .collect()
    }
}

/// Connected and conilpotent on the window: weights are positive and Δ_(1) splits weight.
pub fn check_connected(c: &dyn Cooperad, window: &Window, max_size: usize) -> Result<()> {
    for x in c.all_elements(window, max_size) {
        let w = c.weight(&x);
        if w == 0 {
            return Err(Error::NotConnected(format!("{x} in {} has coradical weight 0", c.name())));
        }
        for (a, _, b, _) in c.delta1(&x) {
            if c.weight(&a) + c.weight(&b) > w || c.weight(&a) == 0 || c.weight(&b) == 0 {
                return Err(Error::NotConnected(format!("Δ_(1)({x}) does not lower weight")));
            }
        }
    }
    Ok(())
}

/// Generators σc of the cobar construction.
pub struct CobarGens {
    pub c: Arc<dyn Cooperad>,
}

impl GenSource for CobarGens {
    fn name(&self) -> String {
        format!("Ω{}", self.c.name())
    }

    fn colors(&self) -> &ColorSet {
        self.c.colors()
    }

    fn gen_sig(&self, g: &Label) -> Sig {
        self.c.sig(g)
    }

    fn gen_degree(&self, g: &Label) -> i64 {
        self.c.degree(g) + 1
    }

    fn gen_size(&self, g: &Label) -> usize {
        self.c.size(g)
    }

    fn gen_weight(&self, g: &Label) -> usize {
        self.c.weight(g)
    }

    /// d(σc) = −σ(d c) − Σ k (−1)^{|c1|} σc1 ∘_i σc2.
    fn gen_diff(&self, g: &Label) -> Lin {
        let mut out = Lin::zero();
        for (t, k) in self.c.diff(g).iter() {
            out.add_term(corolla(t.clone(), self.c.sig(t).arity()), -k.clone());
        }
        for (a, i, b, k) in self.c.delta1(g) {
            let mut t = Tr::corolla(a.clone(), self.c.sig(&a).arity());
            t.ins[i] = Some(Tr::corolla(b.clone(), self.c.sig(&b).arity()));
            out.add_term(Label::tree(t), -(k * sign(is_odd(self.c.degree(&a)))));
        }
        out
    }

    fn gens(&self, out: Color, max_arity: usize, max_size: usize, max_weight: usize) -> Vec<Label> {
        self.c.elements(out, max_arity, max_weight, max_size)
    }
}

pub type Cobar = FreeOperad<CobarGens>;

/// Ω(C), enumerated up to the window weight; C must be connected.
pub fn cobar(c: Arc<dyn Cooperad>, window: &Window, max_size: usize) -> Result<Cobar> {
    check_connected(c.as_ref(), window, max_size)?;
    Ok(FreeOperad::with_weight_cap(CobarGens { c }, window.max_weight))
}

/// Checks d² = 0 on every listed element. Returns the number of elements checked.
pub fn check_square_zero(elems: &[Label], d: &(dyn Fn(&Label) -> Lin + Sync), parallel: bool) -> Result<usize> {
    let bad = |x: &Label| -> Option<String> {
        let dd = d(x).bind(d);
        (!dd.is_zero()).then(|| format!("{x}: {dd}"))
    };
    let found = if parallel { elems.par_iter().find_map_any(bad) } else { elems.iter().find_map(bad) };
    match found {
        Some(m) => Err(Error::DifferentialSquare(m)),
        None => Ok(elems.len()),
    }
}

/// d² = 0 on the bar elements of the window.
pub fn check_bar(b: &Bar, window: &Window, max_size: usize, parallel: bool) -> Result<usize> {
    let elems = b.all_elements(window, max_size);
    check_square_zero(&elems, &|x| b.diff(x), parallel)
}

/// d² = 0 on the cobar elements of the window.
pub fn check_cobar(o: &Cobar, window: &Window, max_size: usize, parallel: bool) -> Result<usize> {
    let elems = o.all_elements(window.max_arity, max_size);
    check_square_zero(&elems, &|x| o.diff(x), parallel)
}

/// The differential of Ω(C) never raises the total coradical weight.
pub fn check_weight_filtration(o: &Cobar, window: &Window, max_size: usize) -> Result<usize> {
    let elems = o.all_elements(window.max_arity, max_size);
    for x in &elems {
        let w = o.filtration_weight(x);
        if let Some(t) = o.diff(x).labels().find(|t| o.filtration_weight(t) > w) {
            return Err(Error::Validation(format!("d({x}) contains {t} of higher weight")));
        }
    }
    Ok(elems.len())
}

/// The counit ΩB(P) → P: σ(sy) ↦ y on one-vertex bar trees, zero on larger trees.
pub fn counit(b: Arc<Bar>) -> FnMap {
    let p = b.p.clone();
    FnMap::new(p.colors().all().collect(), move |x| match x {
        Label::Unit(c) => Lin::single(p.unit(*c)),
        _ => {
            let t = x.as_tree().expect("cobar element");
            let vals = t.map(&mut |g| {
                let bt = g.as_tree().expect("bar element");
                if bt.vertices() == 1 {
                    Lin::single(bt.dec.clone())
                } else {
                    Lin::zero()
                }
            });
            evaluate(p.as_ref(), &vals)
        }
    })
}

/// Counit ΩB(P)(σ) → P(σ) on every signature of the window, with quasi-isomorphism data.
/// `complete` is the degree range in which both sides are tabulated exactly.
pub fn counit_certificate(
    p: Arc<dyn Operad>,
    window: &Window,
    max_size: usize,
    complete: (i64, i64),
    field: Field,
) -> Result<Vec<(Sig, QisoCertificate)>> {
    let b = Arc::new(Bar::reduced(p.clone(), window, max_size)?);
    let o = cobar(b.clone(), window, max_size)?;
    let eps = counit(b);
    let mut sigs: Vec<Sig> = p.all_elements(window.max_arity, max_size).iter().map(|x| p.sig(x)).collect();
    for c in p.colors().all() {
        sigs.push(Sig::new(vec![c], c));
    }
    sigs.sort();
    sigs.dedup();
    let mut out = Vec::new();
    for s in sigs {
        let src = component_complex(&o, &s, max_size, complete)?;
        let tgt = component_complex(p.as_ref(), &s, max_size, complete)?;
        let degs: Vec<i64> = src.degrees().into_iter().chain(tgt.degrees()).collect();
        let lo = degs.iter().copied().min().unwrap_or(0);
        let hi = degs.iter().copied().max().unwrap_or(0);
        let safe = (lo.max(complete.0 + 1), hi.min(complete.1 - 1));
        let f = ChainMap::new(src, tgt, |x| eps.apply(x))?;
        out.push((s, is_quasi_iso(&f, safe, field)?));
    }
    Ok(out)
}

/// Degree-0 linear map on basis labels.
pub type LinMap = Arc<dyn Fn(&Label) -> Lin + Send + Sync>;

/// A degree +1 map τ: C̄ → P; it is twisting when d_P τ + τ d_C + τ ⋆ τ = 0.
#[derive(Clone)]
pub struct Twisting {
    pub c: Arc<dyn Cooperad>,
    pub p: Arc<dyn Operad>,
    map: LinMap,
}

/// Mismatches found by a round trip through the twisting cochain.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct RoundTrip {
    pub checked: usize,
    pub twisting: bool,
    pub cobar_side: bool,
    pub bar_side: bool,
    pub cobar_round_trip: bool,
    pub bar_round_trip: bool,
}

impl RoundTrip {
    pub fn ok(&self) -> bool {
        self.twisting && self.cobar_side && self.bar_side && self.cobar_round_trip && self.bar_round_trip
    }
}

impl Twisting {
    pub fn new(c: Arc<dyn Cooperad>, p: Arc<dyn Operad>, f: impl Fn(&Label) -> Lin + Send + Sync + 'static) -> Twisting {
        Twisting { c, p, map: Arc::new(f) }
    }

    /// τ(sy) = y on one-vertex trees of B(P).
    pub fn universal(b: Arc<Bar>) -> Twisting {
        let c: Arc<dyn Cooperad> = b.clone();
        Twisting::new(c, b.p.clone(), |x| {
            let t = x.as_tree().expect("bar element");
            if t.vertices() == 1 {
                Lin::single(t.dec.clone())
            } else {
                Lin::zero()
            }
        })
    }

    pub fn apply(&self, x: &Label) -> Lin {
        (self.map)(x)
    }

    pub fn apply_lin(&self, v: &Lin) -> Lin {
        v.bind(|x| self.apply(x))
    }

    /// d_P τ(x) + τ(d x) + Σ k (−1)^{|x1|} τ(x1) ∘_i τ(x2).
    pub fn residual(&self, x: &Label) -> Lin {
        let mut r = diff_lin(self.p.as_ref(), &self.apply(x));
        r.add(&self.apply_lin(&self.c.diff(x)));
        for (a, i, b, k) in self.c.delta1(x) {
            let s = k * sign(is_odd(self.c.degree(&a)));
            r.axpy(&s, &compose_lin(self.p.as_ref(), &self.apply(&a), i, &self.apply(&b)));
        }
        r
    }

    /// Degree, signature and Maurer-Cartan checks on the window.
    pub fn check(&self, window: &Window, max_size: usize) -> Result<usize> {
        let elems = self.c.all_elements(window, max_size);
        for x in &elems {
            let tx = self.apply(x);
            let sx = self.c.sig(x);
            let dx = self.c.degree(x) + 1;
            if let Some(t) = tx.labels().find(|t| self.p.degree(t) != dx || self.p.sig(t) != sx) {
                return Err(Error::DegreeMismatch(format!("τ({x}) contains {t}")));
            }
            let r = self.residual(x);
            if !r.is_zero() {
                return Err(Error::MCViolation { element: x.to_string(), residual: r.to_string() });
            }
        }
        Ok(elems.len())
    }

    pub fn is_twisting(&self, window: &Window, max_size: usize) -> bool {
        self.check(window, max_size).is_ok()
    }

    /// f_τ: Ω(C) → P, the operad morphism extending σx ↦ τ(x).
    pub fn to_cobar_map(&self) -> FnMap {
        let p = self.p.clone();
        let tau = self.map.clone();
        FnMap::new(p.colors().all().collect(), move |x| match x {
            Label::Unit(c) => Lin::single(p.unit(*c)),
            _ => {
                let t = x.as_tree().expect("cobar element");
                evaluate(p.as_ref(), &t.map(&mut |g| tau(g)))
            }
        })
    }

    /// τ_f(x) = f(σx).
    pub fn from_cobar_map(c: Arc<dyn Cooperad>, p: Arc<dyn Operad>, f: Arc<dyn OperadMap>) -> Twisting {
        let cc = c.clone();
        Twisting::new(c, p, move |x| f.apply(&corolla(x.clone(), cc.sig(x).arity())))
    }

    /// g_τ: C → B(P), x ↦ Σ_T (sτ)^{⊗T} Δ_T(x); sτ has degree 0 so no signs arise.
    pub fn to_bar_map(&self) -> LinMap {
        let c = self.c.clone();
        let tau = self.map.clone();
        Arc::new(move |x: &Label| {
            let mut memo = HashMap::new();
            let mut out = Lin::zero();
            for (t, k) in decompositions(c.as_ref(), x, &mut memo).iter() {
                out.axpy(k, &expand_lin(&t.map(&mut |d| tau(d))));
            }
            out
        })
    }

    /// τ_g = s⁻¹ ∘ (one-vertex part) ∘ g.
    pub fn from_bar_map(c: Arc<dyn Cooperad>, b: Arc<Bar>, g: LinMap) -> Twisting {
        Twisting::new(c, b.p.clone(), move |x| {
            let mut out = Lin::zero();
            for (t, k) in g(x).iter() {
                let tr = t.as_tree().expect("bar element");
                if tr.vertices() == 1 {
                    out.add_term(tr.dec.clone(), k.clone());
                }
            }
            out
        })
    }

    /// φ ∘ τ for a strict morphism φ: P → R.
    pub fn post_compose(&self, phi: Arc<dyn OperadMap>, r: Arc<dyn Operad>) -> Twisting {
        let tau = self.map.clone();
        Twisting::new(self.c.clone(), r, move |x| tau(x).bind(|y| phi.apply(y)))
    }

    /// τ ∘ g for a strict cooperad morphism g: C' → C.
    pub fn pre_compose(&self, g: LinMap, c2: Arc<dyn Cooperad>) -> Twisting {
        let tau = self.map.clone();
        Twisting::new(c2, self.p.clone(), move |x| g(x).bind(|y| tau(y)))
    }
}

/// All T-shaped decompositions Δ_T(x), each as a tree of coideal labels in preorder.
/// Every tree arises once: its last vertex in preorder is split off first.
fn decompositions(c: &dyn Cooperad, x: &Label, memo: &mut HashMap<Label, Vec<(Tr<Label>, Q)>>) -> Vec<(Tr<Label>, Q)> {
    if let Some(v) = memo.get(x) {
        return v.clone();
    }
    let mut out = vec![(Tr::corolla(x.clone(), c.sig(x).arity()), q(1))];
    for (a, i, b, k) in c.delta1(x) {
        let arb = c.sig(&b).arity();
        for (t, k2) in decompositions(c, &a, memo) {
            let n = t.vertices();
            let num = t.numbered();
            let g = num.graft(i, &Tr::corolla(n, arb));
            if **g.preorder().last().unwrap() != n {
                continue;
            }
            let mut table: Vec<Label> = t.preorder().into_iter().cloned().collect();
            table.push(b.clone());
            out.push((g.map(&mut |&j| table[j].clone()), &k * &k2));
        }
    }
    memo.insert(x.clone(), out.clone());
    out
}

/// g ∘ d = d ∘ g and Δ_(1) ∘ g = (g ⊗ g) ∘ Δ_(1) on the window.
pub fn check_cooperad_morphism(g: &LinMap, src: &dyn Cooperad, tgt: &dyn Cooperad, window: &Window, max_size: usize) -> Result<usize> {
    let elems = src.all_elements(window, max_size);
    for x in &elems {
        let gx = g(x);
        if let Some(t) = gx.labels().find(|t| tgt.degree(t) != src.degree(x) || tgt.sig(t) != src.sig(x)) {
            return Err(Error::DegreeMismatch(format!("g({x}) contains {t}")));
        }
        if gx.bind(|t| tgt.diff(t)) != src.diff(x).bind(|t| g(t)) {
            return Err(Error::NotChainMap(format!("g does not commute with d at {x}")));
        }
        let lhs = gx.bind(|t| delta1_lin(tgt, t));
        let mut rhs = Lin::zero();
        for (a, i, b, k) in src.delta1(x) {
            for (ga, ka) in g(&a).iter() {
                for (gb, kb) in g(&b).iter() {
                    rhs.add_term(Label::seq(vec![ga.clone(), Label::Int(i as i64), gb.clone()]), &k * ka * kb);
                }
            }
        }
        if lhs != rhs {
            return Err(Error::Validation(format!("g does not commute with Δ_(1) at {x}")));
        }
    }
    Ok(elems.len())
}

/// Starting from τ = φ ∘ (universal τ) on B(P): compares f_τ with φ ∘ ε and g_τ with B(φ)
/// (independent routes), and checks both round trips back to τ.
pub fn round_trip(b: Arc<Bar>, phi: Arc<dyn OperadMap>, window: &Window, max_size: usize) -> Result<RoundTrip> {
    let p = b.p.clone();
    let c: Arc<dyn Cooperad> = b.clone();
    let tau = Twisting::universal(b.clone()).post_compose(phi.clone(), p.clone());
    let mut rt = RoundTrip { twisting: tau.is_twisting(window, max_size), ..Default::default() };
    let o = cobar(c.clone(), window, max_size)?;
    let f = tau.to_cobar_map();
    let eps = counit(b.clone());
    let cob_elems = o.all_elements(window.max_arity, max_size);
    rt.cobar_side = cob_elems.iter().all(|x| f.apply(x) == eps.apply(x).bind(|y| phi.apply(y)))
        && crate::operad::check_morphism(&f, &o, p.as_ref(), window, max_size).is_ok();
    let f_arc: Arc<dyn OperadMap> = Arc::new(f);
    let tau_f = Twisting::from_cobar_map(c.clone(), p.clone(), f_arc);
    let bar_elems = b.all_elements(window, max_size);
    rt.cobar_round_trip = bar_elems.iter().all(|x| tau_f.apply(x) == tau.apply(x));
    let g = tau.to_bar_map();
    let bphi = b.map_of(phi);
    rt.bar_side = bar_elems.iter().all(|x| g(x) == bphi(x))
        && check_cooperad_morphism(&g, b.as_ref(), b.as_ref(), window, max_size).is_ok();
    let tau_g = Twisting::from_bar_map(c, b.clone(), g);
    rt.bar_round_trip = bar_elems.iter().all(|x| tau_g.apply(x) == tau.apply(x));
    rt.checked = bar_elems.len() + cob_elems.len();
    Ok(rt)
}

/// The strong homotopy map B(As) → Q where Q is free on a binary M and a ternary h with
/// dh = M∘_0M − M∘_1M: μ2 ↦ M, μ3 ↦ M∘_1M, the left comb ↦ h and the right comb ↦ 0.
/// Without h the square of M commutes only up to homotopy and the check fails.
pub fn homotopy_square(with_h: bool) -> Result<(Twisting, Arc<crate::operad::free::PresentedOperad>)> {
    use crate::operad::builtin::Assoc;
    use crate::operad::free::Presented;
    let mut pres = Presented::new("Q", ColorSet::single());
    let m = pres.add("M", Sig::new(vec![0, 0], 0), 0, 1);
    let h = pres.add("h", Sig::new(vec![0, 0, 0], 0), -1, 2);
    let mm = |i: usize| {
        let mut t = Tr::corolla(m.clone(), 2);
        t.ins[i] = Some(Tr::corolla(m.clone(), 2));
        Label::tree(t)
    };
    let (left, right) = (mm(0), mm(1));
    pres.set_diff(&h, Lin::from_terms([(left.clone(), q(1)), (right.clone(), q(-1))]));
    let qop = Arc::new(FreeOperad::new(pres));
    let w = Window::new(3, 2);
    let b = Arc::new(Bar::reduced(Arc::new(Assoc), &w, 2)?);
    let (mc, hc) = (corolla(m, 2), corolla(h, 3));
    let c: Arc<dyn Cooperad> = b;
    let target: Arc<dyn Operad> = qop.clone();
    let tau = Twisting::new(c, target, move |x| {
        let t = x.as_tree().expect("bar element");
        let ar = |d: &Label| d.as_int().unwrap();
        match t.vertices() {
            1 if ar(&t.dec) == 2 => Lin::single(mc.clone()),
            1 if ar(&t.dec) == 3 => Lin::single(right.clone()),
            2 if t.ins[0].is_some() && ar(&t.dec) == 2 && with_h => Lin::single(hc.clone()),
            _ => Lin::zero(),
        }
    });
    Ok((tau, qop))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::builtin::{h_category, random_operad, Assoc};
    use crate::tree::enumerate_trees;

    #[test]
    fn bar_of_as_dims() {
        let w = Window::new(4, 4);
        let b = Bar::reduced(Arc::new(Assoc), &w, 4).unwrap();
        // one element per planar tree with all vertices of arity ≥ 2
        for n in 2..=4 {
            let count = b.elements(0, n, 4, 4).into_iter().filter(|x| b.sig(x).arity() == n).count();
            let trees: usize = (1..n).map(|v| enumerate_trees(n, v, 2).len()).sum();
            assert_eq!(count, trees, "arity {n}");
        }
        check_bar(&b, &w, 4, false).unwrap();
    }

    #[test]
    fn cobar_bar_as_dims() {
        let w = Window::new(4, 4);
        let b: Arc<dyn Cooperad> = Arc::new(Bar::reduced(Arc::new(Assoc), &w, 4).unwrap());
        let o = cobar(b, &w, 4).unwrap();
        let count = |n: usize| o.elements(0, n, 4).into_iter().filter(|x| o.sig(x).arity() == n).count();
        // Σ over planar trees T of 2^{internal edges of T}
        let expect = |n: usize| -> usize {
            (1..n).map(|v| enumerate_trees(n, v, 2).len() << (v - 1)).sum()
        };
        for n in 2..=4 {
            assert_eq!(count(n), expect(n));
        }
        assert_eq!(count(3), 5);
        check_cobar(&o, &w, 4, true).unwrap();
        check_weight_filtration(&o, &w, 4).unwrap();
    }

    #[test]
    fn random_bar_cobar_square_zero() {
        let w = Window::new(3, 3);
        for seed in 0..3 {
            let p: Arc<dyn Operad> = Arc::new(random_operad(seed));
            let b = Arc::new(Bar::reduced(p, &w, 3).unwrap());
            check_bar(&b, &w, 3, false).unwrap();
            let o = cobar(b, &w, 3).unwrap();
            check_cobar(&o, &w, 3, false).unwrap();
        }
    }

    #[test]
    fn unreduced_bar_of_h() {
        let w = Window::new(1, 3);
        let h: Arc<dyn Operad> = Arc::new(h_category());
        assert!(matches!(Bar::reduced(h.clone(), &w, 4), Err(Error::NotAugmented(_))));
        let b = Arc::new(Bar::unreduced(h));
        check_bar(&b, &w, 4, false).unwrap();
        let o = cobar(b, &w, 4).unwrap();
        check_cobar(&o, &w, 4, false).unwrap();
    }

    #[test]
    fn disconnected_cooperad_is_rejected() {
        let mut c = TabCooperad::new("C", ColorSet::single());
        c.add(Sig::new(vec![0, 0], 0), 0, 0);
        let w = Window::new(2, 2);
        assert!(matches!(cobar(Arc::new(c), &w, 2), Err(Error::NotConnected(_))));
    }

    #[test]
    fn universal_twisting_and_counit() {
        let w = Window::new(4, 3);
        let b = Arc::new(Bar::reduced(Arc::new(Assoc), &w, 3).unwrap());
        Twisting::universal(b.clone()).check(&w, 3).unwrap();
        let certs = counit_certificate(Arc::new(Assoc), &Window::new(3, 3), 3, crate::complex::FULL, Field::Rational).unwrap();
        assert!(certs.iter().all(|(_, c)| c.is_quasi_iso));
    }

    #[test]
    fn identity_round_trip() {
        let w = Window::new(3, 3);
        let b = Arc::new(Bar::reduced(Arc::new(Assoc), &w, 3).unwrap());
        let rt = round_trip(b, Arc::new(FnMap::identity(1)), &w, 3).unwrap();
        assert!(rt.ok(), "{rt:?}");
    }

    #[test]
    fn strong_homotopy_square() {
        let w = Window::new(3, 2);
        let (tau, _) = homotopy_square(true).unwrap();
        tau.check(&w, 2).unwrap();
        let (bad, _) = homotopy_square(false).unwrap();
        assert!(matches!(bad.check(&w, 2), Err(Error::MCViolation { .. })));
    }
}
