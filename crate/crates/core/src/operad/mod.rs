//! Colored non-symmetric DG-operads given by structure constants on basis labels.
//!
//! Partial compositions are 0-based: `x ∘_i y` plugs `y` into input `i` of `x`.
//! Koszul convention for the parallel axiom:
//! `(x ∘_i y) ∘_{k+|y|_ar−1} z = (−1)^{|y||z|} (x ∘_k z) ∘_i y` for `i < k`.

pub mod builtin;
pub mod collection;
pub mod free;
pub mod h0;
pub mod unital;

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use serde::Serialize;

use crate::complex::{Complex, Window};
use crate::error::{Error, Result};
use crate::lin::{is_odd, sign, Color, Label, Lin};
use crate::tree::Tr;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Sig {
    pub ins: Vec<Color>,
    pub out: Color,
}

impl Sig {
    pub fn new(ins: Vec<Color>, out: Color) -> Sig {
        Sig { ins, out }
    }

    pub fn arity(&self) -> usize {
        self.ins.len()
    }

    /// Signature of `x ∘_i y`.
    pub fn compose(&self, i: usize, other: &Sig) -> Sig {
        let mut ins = self.ins[..i].to_vec();
        ins.extend(&other.ins);
        ins.extend(&self.ins[i + 1..]);
        Sig { ins, out: self.out }
    }
}

impl fmt::Display for Sig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.ins.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ";{})", self.out)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ColorSet {
    pub names: Vec<String>,
    pub unit: Option<Color>,
}

impl ColorSet {
    pub fn new(names: &[&str]) -> ColorSet {
        ColorSet { names: names.iter().map(|s| s.to_string()).collect(), unit: None }
    }

    pub fn single() -> ColorSet {
        ColorSet::new(&["*"])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn all(&self) -> impl Iterator<Item = Color> {
        0..self.names.len() as Color
    }

    pub fn index(&self, name: &str) -> Option<Color> {
        self.names.iter().position(|n| n == name).map(|p| p as Color)
    }
}

/// A colored non-symmetric DG-operad. Units are `Label::Unit(c)` unless overridden;
/// `compose` handles them and delegates the rest to `compose_raw`.
pub trait Operad: Send + Sync {
    fn name(&self) -> String;
    fn colors(&self) -> &ColorSet;
    fn sig(&self, x: &Label) -> Sig;
    fn degree(&self, x: &Label) -> i64;
    /// Tabulation size (word length for presented operads). Units have size 0.
    fn size(&self, x: &Label) -> usize {
        usize::from(!self.is_unit(x))
    }
    /// Number of generating vertices; 1 for tabulated elements, 0 for units.
    fn weight(&self, x: &Label) -> usize {
        usize::from(!self.is_unit(x))
    }
    fn diff_raw(&self, x: &Label) -> Lin;
    /// `x ∘_i y` for non-unit x, y with matching colors.
    fn compose_raw(&self, x: &Label, i: usize, y: &Label) -> Lin;
    /// Non-unit basis elements with output `out`, arity ≤ `max_arity`, size ≤ `max_size`.
    fn elements(&self, out: Color, max_arity: usize, max_size: usize) -> Vec<Label>;

    fn unit(&self, c: Color) -> Label {
        Label::Unit(c)
    }

    /// Image of x under the identification A(σ; t) ≅ A(red σ; t) of a unital operad.
    fn absorb(&self, x: &Label) -> Option<Lin> {
        let _ = x;
        None
    }

    /// Inverse of `absorb`: the element of A(ins; t) corresponding to x ∈ A(red ins; t).
    fn pad(&self, x: &Label, ins: &[Color]) -> Option<Lin> {
        let _ = (x, ins);
        None
    }

    fn is_unit(&self, x: &Label) -> bool {
        matches!(x, Label::Unit(_))
    }

    fn diff(&self, x: &Label) -> Lin {
        if self.is_unit(x) {
            Lin::zero()
        } else {
            self.diff_raw(x)
        }
    }

    fn compose(&self, x: &Label, i: usize, y: &Label) -> Lin {
        if self.is_unit(x) {
            debug_assert_eq!(i, 0);
            Lin::single(y.clone())
        } else if self.is_unit(y) {
            Lin::single(x.clone())
        } else {
            self.compose_raw(x, i, y)
        }
    }

    /// Unit plus elements, arity ≤ max_arity, size ≤ max_size, for every output color.
    fn all_elements(&self, max_arity: usize, max_size: usize) -> Vec<Label> {
        let mut v = Vec::new();
        for c in self.colors().all() {
            v.push(self.unit(c));
            v.extend(self.elements(c, max_arity, max_size));
        }
        v
    }
}

/// Bilinear extension of ∘_i.
pub fn compose_lin(p: &dyn Operad, a: &Lin, i: usize, b: &Lin) -> Lin {
    let mut out = Lin::zero();
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            out.axpy(&(cx * cy), &p.compose(x, i, y));
        }
    }
    out
}

pub fn diff_lin(p: &dyn Operad, a: &Lin) -> Lin {
    a.bind(|x| p.diff(x))
}

/// Evaluates a tree whose vertices carry elements of `p` by iterated partial composition,
/// children left to right. No signs arise: decorations are already in preorder.
pub fn evaluate(p: &dyn Operad, t: &Tr<Lin>) -> Lin {
    let mut cur = t.dec.clone();
    let mut offset = 0usize;
    for (i, s) in t.ins.iter().enumerate() {
        if let Some(c) = s {
            let v = evaluate(p, c);
            cur = compose_lin(p, &cur, i + offset, &v);
            offset += c.leaves() - 1;
        }
    }
    cur
}

/// Item of a decoration pool used for tree enumeration.
#[derive(Clone, Debug)]
pub struct PoolItem {
    pub label: Label,
    pub sig: Sig,
    pub weight: usize,
    pub size: usize,
}

/// An enumerated decorated tree with its signature, total weight and total size.
#[derive(Clone, Debug)]
pub struct DecTree {
    pub tree: Tr<Label>,
    pub sig: Sig,
    pub weight: usize,
    pub size: usize,
}

/// All trees with output `out` whose vertices are pool items (each of weight ≥ 1),
/// with at most `max_arity` leaves, total weight ≤ `max_weight` and total size ≤ `max_size`.
pub fn enumerate_decorated(
    pool: &dyn Fn(Color) -> Vec<PoolItem>,
    out: Color,
    max_arity: usize,
    max_weight: usize,
    max_size: usize,
) -> Vec<DecTree> {
    let mut pools: HashMap<Color, Rc<Vec<PoolItem>>> = HashMap::new();
    let mut memo: HashMap<(Color, usize, usize, usize), Rc<Vec<DecTree>>> = HashMap::new();
    let r = dec_rec(pool, &mut pools, &mut memo, out, max_arity, max_weight, max_size);
    r.as_ref().clone()
}

type Memo = HashMap<(Color, usize, usize, usize), Rc<Vec<DecTree>>>;

fn dec_rec(
    pool: &dyn Fn(Color) -> Vec<PoolItem>,
    pools: &mut HashMap<Color, Rc<Vec<PoolItem>>>,
    memo: &mut Memo,
    c: Color,
    a: usize,
    w: usize,
    s: usize,
) -> Rc<Vec<DecTree>> {
    if let Some(r) = memo.get(&(c, a, w, s)) {
        return r.clone();
    }
    let items = pools.entry(c).or_insert_with(|| Rc::new(pool(c))).clone();
    let mut out = Vec::new();
    if w > 0 && a > 0 {
        for x in items.iter() {
            assert!(x.weight >= 1, "pool items must have positive weight");
            let k = x.sig.arity();
            if x.weight > w || x.size > s || k > a || k == 0 {
                continue;
            }
            // (slots, leaf colors, weight, size, leaves)
            let mut partial: Vec<(Vec<Option<Tr<Label>>>, Vec<Color>, usize, usize)> =
                vec![(Vec::new(), Vec::new(), x.weight, x.size)];
            for j in 0..k {
                let remaining_after = k - j - 1;
                let mut next = Vec::new();
                for (slots, leaves, ww, ss) in partial {
                    if leaves.len() + 1 + remaining_after <= a {
                        let mut sl = slots.clone();
                        sl.push(None);
                        let mut lv = leaves.clone();
                        lv.push(x.sig.ins[j]);
                        next.push((sl, lv, ww, ss));
                    }
                    let room = a.saturating_sub(leaves.len() + remaining_after);
                    if room >= 1 && ww < w {
                        let subs = dec_rec(pool, pools, memo, x.sig.ins[j], room, w - ww, s - ss);
                        for st in subs.iter() {
                            let mut sl = slots.clone();
                            sl.push(Some(st.tree.clone()));
                            let mut lv = leaves.clone();
                            lv.extend(&st.sig.ins);
                            next.push((sl, lv, ww + st.weight, ss + st.size));
                        }
                    }
                }
                partial = next;
            }
            for (slots, leaves, ww, ss) in partial {
                out.push(DecTree {
                    tree: Tr { dec: x.label.clone(), ins: slots },
                    sig: Sig::new(leaves, c),
                    weight: ww,
                    size: ss,
                });
            }
        }
    }
    let r = Rc::new(out);
    memo.insert((c, a, w, s), r.clone());
    r
}

/// A morphism of operads on basis labels.
pub trait OperadMap: Send + Sync {
    fn color(&self, c: Color) -> Color;
    fn apply(&self, x: &Label) -> Lin;
}

/// Morphism given by a color table and a closure.
#[derive(Clone)]
pub struct FnMap {
    pub colors: Vec<Color>,
    f: Arc<dyn Fn(&Label) -> Lin + Send + Sync>,
}

impl FnMap {
    pub fn new(colors: Vec<Color>, f: impl Fn(&Label) -> Lin + Send + Sync + 'static) -> FnMap {
        FnMap { colors, f: Arc::new(f) }
    }

    pub fn identity(n: usize) -> FnMap {
        FnMap::new((0..n as Color).collect(), |x| Lin::single(x.clone()))
    }
}

impl OperadMap for FnMap {
    fn color(&self, c: Color) -> Color {
        self.colors[c as usize]
    }

    fn apply(&self, x: &Label) -> Lin {
        (self.f)(x)
    }
}

pub fn apply_lin(f: &dyn OperadMap, v: &Lin) -> Lin {
    v.bind(|x| f.apply(x))
}

/// Checks d² = 0, degrees, signatures, unitality, Leibniz and both associativity patterns
/// on basis elements of arity ≤ window.max_arity and size ≤ `max_size`.
pub fn check_operad(p: &dyn Operad, window: &Window, max_size: usize) -> Result<()> {
    let a = window.max_arity;
    let elems = p.all_elements(a, max_size);
    let fail = |m: String| Err(Error::Validation(format!("{}: {m}", p.name())));
    let deg_ok = |v: &Lin, d: i64| v.labels().all(|t| p.degree(t) == d);
    let sig_ok = |v: &Lin, s: &Sig| v.labels().all(|t| p.sig(t) == *s);
    for x in &elems {
        let dx = p.diff(x);
        if !deg_ok(&dx, p.degree(x) + 1) || !sig_ok(&dx, &p.sig(x)) {
            return fail(format!("d({x}) has wrong degree or signature"));
        }
        if !diff_lin(p, &dx).is_zero() {
            return fail(format!("d^2({x}) != 0"));
        }
        let sx = p.sig(x);
        let u = p.unit(sx.out);
        if p.compose(&u, 0, x) != Lin::single(x.clone()) {
            return fail(format!("left unit fails on {x}"));
        }
        for i in 0..sx.arity() {
            if p.compose(x, i, &p.unit(sx.ins[i])) != Lin::single(x.clone()) {
                return fail(format!("right unit fails on {x} at {i}"));
            }
        }
    }
    let by_out = |c: Color| elems.iter().filter(move |y| p.sig(y).out == c);
    for x in &elems {
        let sx = p.sig(x);
        for i in 0..sx.arity() {
            for y in by_out(sx.ins[i]) {
                let sy = p.sig(y);
                if sx.arity() + sy.arity() - 1 > a || p.size(x) + p.size(y) > max_size {
                    continue;
                }
                let xy = p.compose(x, i, y);
                let sxy = sx.compose(i, &sy);
                if !deg_ok(&xy, p.degree(x) + p.degree(y)) || !sig_ok(&xy, &sxy) {
                    return fail(format!("{x} ∘_{i} {y} has wrong degree or signature"));
                }
                let mut rhs = compose_lin(p, &p.diff(x), i, &Lin::single(y.clone()));
                rhs.axpy(&sign(is_odd(p.degree(x))), &compose_lin(p, &Lin::single(x.clone()), i, &p.diff(y)));
                if diff_lin(p, &xy) != rhs {
                    return fail(format!("Leibniz fails on {x} ∘_{i} {y}"));
                }
                // third element z
                for z in elems.iter() {
                    let sz = p.sig(z);
                    if sxy.arity() + sz.arity() - 1 > a || p.size(x) + p.size(y) + p.size(z) > max_size {
                        continue;
                    }
                    let zl = Lin::single(z.clone());
                    // sequential: z into an input of y
                    for j in 0..sy.arity() {
                        if sy.ins[j] != sz.out {
                            continue;
                        }
                        let lhs = compose_lin(p, &xy, i + j, &zl);
                        let rhs = compose_lin(p, &Lin::single(x.clone()), i, &p.compose(y, j, z));
                        if lhs != rhs {
                            return fail(format!("sequential associativity fails on {x},{y},{z} at {i},{j}"));
                        }
                    }
                    // parallel: z into input k > i of x
                    for k in i + 1..sx.arity() {
                        if sx.ins[k] != sz.out {
                            continue;
                        }
                        let lhs = compose_lin(p, &xy, k + sy.arity() - 1, &zl);
                        let xz = p.compose(x, k, z);
                        let mut rhs = compose_lin(p, &xz, i, &Lin::single(y.clone()));
                        rhs = rhs.scaled(&sign(is_odd(p.degree(y)) && is_odd(p.degree(z))));
                        if lhs != rhs {
                            return fail(format!("parallel associativity fails on {x},{y},{z} at {i},{k}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks that `f: p → q` preserves units, degrees, differentials and partial compositions.
pub fn check_morphism(f: &dyn OperadMap, p: &dyn Operad, q: &dyn Operad, window: &Window, max_size: usize) -> Result<()> {
    let elems = p.all_elements(window.max_arity, max_size);
    let fail = |m: String| Err(Error::Validation(format!("morphism {} → {}: {m}", p.name(), q.name())));
    for c in p.colors().all() {
        if f.apply(&p.unit(c)) != Lin::single(q.unit(f.color(c))) {
            return fail(format!("unit of color {c} not preserved"));
        }
    }
    for x in &elems {
        let fx = f.apply(x);
        let sx = p.sig(x);
        let want = Sig::new(sx.ins.iter().map(|&c| f.color(c)).collect(), f.color(sx.out));
        if fx.labels().any(|t| q.sig(t) != want || q.degree(t) != p.degree(x)) {
            return fail(format!("{x} ↦ {fx} breaks signature or degree"));
        }
        if apply_lin(f, &p.diff(x)) != diff_lin(q, &fx) {
            return fail(format!("not a chain map at {x}"));
        }
        for i in 0..sx.arity() {
            for y in elems.iter().filter(|y| p.sig(y).out == sx.ins[i]) {
                if sx.arity() + p.sig(y).arity() - 1 > window.max_arity || p.size(x) + p.size(y) > max_size {
                    continue;
                }
                let lhs = apply_lin(f, &p.compose(x, i, y));
                let rhs = compose_lin(q, &fx, i, &f.apply(y));
                if lhs != rhs {
                    return fail(format!("F({x} ∘_{i} {y}) != F({x}) ∘_{i} F({y})"));
                }
            }
        }
    }
    Ok(())
}

/// Component complex P(sig) over the listed elements; d must stay inside.
pub fn component_complex(p: &dyn Operad, sig: &Sig, max_size: usize, complete: (i64, i64)) -> Result<Complex> {
    let mut elems: Vec<(Label, i64)> = p
        .elements(sig.out, sig.arity(), max_size)
        .into_iter()
        .filter(|x| p.sig(x) == *sig)
        .map(|x| {
            let d = p.degree(&x);
            (x, d)
        })
        .collect();
    if sig.arity() == 1 && sig.ins[0] == sig.out {
        elems.push((p.unit(sig.out), 0));
    }
    Complex::new_truncated(elems, |x| p.diff(x), complete)
}

/// Whether the non-unit part is closed under d and ∘_i on the window, i.e. P = k·1 ⊕ P̄ as operads.
pub fn augmentation_violation(p: &dyn Operad, window: &Window, max_size: usize) -> Option<String> {
    let mut elems = Vec::new();
    for c in p.colors().all() {
        elems.extend(p.elements(c, window.max_arity, max_size));
    }
    for x in &elems {
        if p.diff(x).labels().any(|t| p.is_unit(t)) {
            return Some(format!("d({x}) has a unit component"));
        }
        let sx = p.sig(x);
        for i in 0..sx.arity() {
            for y in elems.iter().filter(|y| p.sig(y).out == sx.ins[i]) {
                if p.size(x) + p.size(y) > max_size {
                    continue;
                }
                if p.compose(x, i, y).labels().any(|t| p.is_unit(t)) {
                    return Some(format!("{x} ∘_{i} {y} has a unit component"));
                }
            }
        }
    }
    None
}
