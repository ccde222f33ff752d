//! The categories Δ_k, ∇_k and the two lens categories as hom-bases of constrained monotone
//! maps; the free adjunction 2-category Adj as an operad colored by its 1-cells; strict
//! adjunctions as 2-functors Adj → DGFun_∞ and the homotopy monad / adjunction checks.
//!
//! Objects, with their sets of elements:
//! - `(n)`: n elements, 0 → 0 (Δ), no constraint;
//! - `(n]`: n + 1 elements, 0 → 1, last element fixed;
//! - `[n)`: n + 1 elements, 1 → 0, first element fixed;
//! - `[n]`: n + 1 elements, 1 → 1 (∇), first and last fixed.
//!
//! A path of 1-cells is listed in application order; its composite is the ordinal
//! concatenation, merging the two fixed endpoints at every junction on object 1. The
//! functor word of a 1-cell assigns each element a block of letters: F unless the element
//! is first-fixed, followed by G unless it is last-fixed. So (n) ↦ (GF)ⁿ, (n] ↦ F(GF)ⁿ,
//! [n) ↦ G(FG)ⁿ and [n] ↦ (FG)ⁿ.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::barcobar::{Bar, Twisting};
use crate::coh::{dgfun_infty, DgCat, DgFunInfty, DgFunctor};
use crate::complex::Window;
use crate::diagram::Shape;
use crate::error::{Error, Result};
use crate::lin::{Color, Label, Lin};
use crate::operad::{compose_lin, ColorSet, FnMap, Operad, Sig};
use crate::twocat::{enumerate_paths, TwoCatMorphism, TwoCatObject};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    /// (n), the simplex category Δ_k.
    Delta,
    /// (n], last element preserved.
    Last,
    /// [n), first element preserved.
    First,
    /// [n], ∇_k.
    Nabla,
}

pub const KINDS: [Kind; 4] = [Kind::Delta, Kind::Last, Kind::First, Kind::Nabla];

impl Kind {
    pub fn src(self) -> u32 {
        match self {
            Kind::Delta | Kind::Last => 0,
            Kind::First | Kind::Nabla => 1,
        }
    }

    pub fn tgt(self) -> u32 {
        match self {
            Kind::Delta | Kind::First => 0,
            Kind::Last | Kind::Nabla => 1,
        }
    }

    pub fn from_ends(i: u32, j: u32) -> Kind {
        match (i, j) {
            (0, 0) => Kind::Delta,
            (0, _) => Kind::Last,
            (_, 0) => Kind::First,
            _ => Kind::Nabla,
        }
    }

    pub fn first_fixed(self) -> bool {
        self.src() == 1
    }

    pub fn last_fixed(self) -> bool {
        self.tgt() == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjObj {
    pub kind: Kind,
    pub n: usize,
}

impl AdjObj {
    pub fn new(kind: Kind, n: i64) -> Result<AdjObj> {
        if n < 0 {
            return Err(Error::InvalidObject(format!("negative size {n}")));
        }
        Ok(AdjObj { kind, n: n as usize })
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        match self.kind {
            Kind::Delta => self.n,
            _ => self.n + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn with_len(kind: Kind, len: usize) -> AdjObj {
        AdjObj { kind, n: if kind == Kind::Delta { len } else { len - 1 } }
    }

    pub fn parse(s: &str) -> Result<AdjObj> {
        let s = s.trim();
        let bad = || Error::InvalidObject(format!("cannot read object {s:?}"));
        if s.len() < 3 {
            return Err(bad());
        }
        let (open, close) = (s.as_bytes()[0], s.as_bytes()[s.len() - 1]);
        let kind = match (open, close) {
            (b'(', b')') => Kind::Delta,
            (b'(', b']') => Kind::Last,
            (b'[', b')') => Kind::First,
            (b'[', b']') => Kind::Nabla,
            _ => return Err(bad()),
        };
        let n: i64 = s[1..s.len() - 1].trim().parse().map_err(|_| bad())?;
        AdjObj::new(kind, n)
    }

    /// Letters of the functor word in application order.
    pub fn word(&self) -> Vec<Letter> {
        (0..self.len()).flat_map(|e| self.block(e)).collect()
    }

    fn block(&self, e: usize) -> Vec<Letter> {
        let mut b = Vec::new();
        if !(e == 0 && self.kind.first_fixed()) {
            b.push(Letter::F);
        }
        if !(e + 1 == self.len() && self.kind.last_fixed()) {
            b.push(Letter::G);
        }
        b
    }
}

impl fmt::Display for AdjObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Delta => write!(f, "({})", self.n),
            Kind::Last => write!(f, "({}]", self.n),
            Kind::First => write!(f, "[{})", self.n),
            Kind::Nabla => write!(f, "[{}]", self.n),
        }
    }
}

/// A monotone map between objects of one kind, preserving the fixed endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrdMap {
    pub src: AdjObj,
    pub tgt: AdjObj,
    pub images: Vec<usize>,
}

impl OrdMap {
    pub fn identity(x: AdjObj) -> OrdMap {
        OrdMap { src: x, tgt: x, images: (0..x.len()).collect() }
    }

    pub fn is_valid(&self) -> bool {
        let (n, m) = (self.src.len(), self.tgt.len());
        self.src.kind == self.tgt.kind
            && self.images.len() == n
            && self.images.iter().all(|&v| v < m)
            && self.images.windows(2).all(|w| w[0] <= w[1])
            && (!self.src.kind.first_fixed() || self.images[0] == 0)
            && (!self.src.kind.last_fixed() || self.images[n - 1] == m - 1)
    }
}

impl fmt::Display for OrdMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{}:{:?}", self.src, self.tgt, self.images)
    }
}

/// All constrained monotone maps x → y, in lexicographic order of images.
pub fn hom_basis(x: AdjObj, y: AdjObj) -> Result<Vec<OrdMap>> {
    if x.kind != y.kind {
        return Err(Error::InvalidObject(format!("{x} and {y} live in different categories")));
    }
    let (n, m) = (x.len(), y.len());
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, m: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in lo..m {
            cur.push(v);
            rec(n, m, v, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(n, m, 0, &mut cur, &mut raw);
    for images in raw {
        let f = OrdMap { src: x, tgt: y, images };
        if f.is_valid() {
            out.push(f);
        }
    }
    Ok(out)
}

/// g ∘ f (first f).
pub fn compose_maps(g: &OrdMap, f: &OrdMap) -> Result<OrdMap> {
    if f.tgt != g.src {
        return Err(Error::NotComposable(format!("{g} after {f}")));
    }
    Ok(OrdMap { src: f.src, tgt: g.tgt, images: f.images.iter().map(|&v| g.images[v]).collect() })
}

/// The composite 1-cell of a path (application order).
pub fn concat_objects(path: &[AdjObj]) -> Result<AdjObj> {
    let first = path.first().ok_or_else(|| Error::NotComposable("empty path".into()))?;
    let mut len = first.len();
    for w in path.windows(2) {
        if w[0].kind.tgt() != w[1].kind.src() {
            return Err(Error::NotComposable(format!("{} then {}", w[0], w[1])));
        }
        len += w[1].len() - usize::from(w[0].kind.tgt() == 1);
    }
    Ok(AdjObj::with_len(Kind::from_ends(first.kind.src(), path.last().unwrap().kind.tgt()), len))
}

/// Horizontal composite of maps along a path: elements shifted, junctions on object 1 merged.
pub fn concat_maps(maps: &[OrdMap]) -> Result<OrdMap> {
    let src = concat_objects(&maps.iter().map(|m| m.src).collect::<Vec<_>>())?;
    let tgt = concat_objects(&maps.iter().map(|m| m.tgt).collect::<Vec<_>>())?;
    let mut images: Vec<usize> = Vec::with_capacity(src.len());
    let mut offset = 0usize;
    for (k, m) in maps.iter().enumerate() {
        let merge = k > 0 && maps[k - 1].src.kind.tgt() == 1;
        let skip = usize::from(merge);
        for &v in &m.images[skip..] {
            images.push(offset + v - skip);
        }
        offset += m.tgt.len() - skip;
    }
    let out = OrdMap { src, tgt, images };
    debug_assert!(out.is_valid(), "{out}");
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureMap {
    /// (n)·(m) = (n+m).
    DeltaMonoidal,
    /// [n] ⊗ [m] = [n+m].
    NablaMonoidal,
    /// (n), (m] ↦ (n+m].
    LeftAction,
    /// [n), [m] ↦ [n+m); the ∇ factor is applied first.
    RightAction,
    /// (n], [m) ↦ (n+m+1).
    GlueToDelta,
    /// [n), (m] ↦ [n+m+1].
    GlueToNabla,
}

pub const STRUCTURE_MAPS: [StructureMap; 6] = [
    StructureMap::DeltaMonoidal,
    StructureMap::NablaMonoidal,
    StructureMap::LeftAction,
    StructureMap::RightAction,
    StructureMap::GlueToDelta,
    StructureMap::GlueToNabla,
];

impl StructureMap {
    pub fn arg_kinds(self) -> (Kind, Kind) {
        match self {
            StructureMap::DeltaMonoidal => (Kind::Delta, Kind::Delta),
            StructureMap::NablaMonoidal => (Kind::Nabla, Kind::Nabla),
            StructureMap::LeftAction => (Kind::Delta, Kind::Last),
            StructureMap::RightAction => (Kind::First, Kind::Nabla),
            StructureMap::GlueToDelta => (Kind::Last, Kind::First),
            StructureMap::GlueToNabla => (Kind::First, Kind::Last),
        }
    }

    fn order<T: Clone>(self, x: T, y: T) -> Vec<T> {
        if self == StructureMap::RightAction {
            vec![y, x]
        } else {
            vec![x, y]
        }
    }

    fn check(self, x: Kind, y: Kind) -> Result<()> {
        if self.arg_kinds() != (x, y) {
            return Err(Error::InvalidObject(format!("{self:?} takes {:?}", self.arg_kinds())));
        }
        Ok(())
    }

    pub fn object(self, x: AdjObj, y: AdjObj) -> Result<AdjObj> {
        self.check(x.kind, y.kind)?;
        concat_objects(&self.order(x, y))
    }

    pub fn map(self, f: &OrdMap, g: &OrdMap) -> Result<OrdMap> {
        self.check(f.src.kind, g.src.kind)?;
        concat_maps(&self.order(f.clone(), g.clone()))
    }
}

/// Adj truncated to 1-cells of size ≤ `max_n`: colors (0..N), (0..N], [0..N), [0..N] in
/// this order, so the Δ colors come first. Elements are maps composite(ins) → out, labelled
/// `Seq[ins, out, images]`; identity maps on (c; c) are the units.
pub struct AdjOperad {
    pub max_n: usize,
    pub kinds: Vec<Kind>,
    pub shape: Shape,
    objs: Vec<AdjObj>,
    colors: ColorSet,
}

pub fn build_adj(max_n: usize) -> AdjOperad {
    AdjOperad::new(max_n, &KINDS)
}

/// The (0,0) corner: Δ_k alone, with the same labels as in Adj.
pub fn build_delta(max_n: usize) -> AdjOperad {
    AdjOperad::new(max_n, &[Kind::Delta])
}

fn ints(l: &Label) -> Vec<usize> {
    l.as_seq().expect("integer list").iter().map(|x| x.as_int().unwrap() as usize).collect()
}

fn int_label(v: &[usize]) -> Label {
    Label::ints(&v.iter().map(|&x| x as i64).collect::<Vec<_>>())
}

impl AdjOperad {
    fn new(max_n: usize, kinds: &[Kind]) -> AdjOperad {
        let objs: Vec<AdjObj> = kinds.iter().flat_map(|&k| (0..=max_n).map(move |n| AdjObj { kind: k, n })).collect();
        let names: Vec<String> = objs.iter().map(|o| o.to_string()).collect();
        let objects = if kinds.len() == 1 { vec!["0".into()] } else { vec!["0".into(), "1".into()] };
        let edges = objs.iter().zip(&names).map(|(o, s)| (s.clone(), o.kind.src(), o.kind.tgt())).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        AdjOperad { max_n, kinds: kinds.to_vec(), shape: Shape { objects, edges, units: None }, objs, colors: ColorSet::new(&refs) }
    }

    pub fn obj(&self, c: Color) -> AdjObj {
        self.objs[c as usize]
    }

    pub fn color_of(&self, x: AdjObj) -> Option<Color> {
        self.objs.iter().position(|o| *o == x).map(|p| p as Color)
    }

    pub fn source_of(&self, ins: &[Color]) -> AdjObj {
        concat_objects(&ins.iter().map(|&c| self.obj(c)).collect::<Vec<_>>()).expect("path")
    }

    /// The basis element for a map composite(ins) → out.
    pub fn element(&self, ins: &[Color], out: Color, images: &[usize]) -> Label {
        if ins == [out] && images.iter().enumerate().all(|(k, &v)| k == v) {
            return Label::Unit(out);
        }
        Label::seq(vec![Label::ints(&ins.iter().map(|&c| c as i64).collect::<Vec<_>>()), Label::Int(out as i64), int_label(images)])
    }

    /// The map underlying an element (units included).
    pub fn map_of(&self, x: &Label) -> OrdMap {
        match x {
            Label::Unit(c) => OrdMap::identity(self.obj(*c)),
            _ => {
                let s = x.as_seq().expect("Adj element");
                let ins: Vec<Color> = ints(&s[0]).into_iter().map(|c| c as Color).collect();
                OrdMap { src: self.source_of(&ins), tgt: self.obj(s[1].as_int().unwrap() as Color), images: ints(&s[2]) }
            }
        }
    }

    pub fn two_cat_object(self: &Arc<Self>) -> TwoCatObject {
        TwoCatObject::new(self.shape.clone(), self.clone()).expect("one color per 1-cell")
    }
}

impl Operad for AdjOperad {
    fn name(&self) -> String {
        if self.kinds.len() == 1 {
            format!("Delta_{}", self.max_n)
        } else {
            format!("Adj_{}", self.max_n)
        }
    }

    fn colors(&self) -> &ColorSet {
        &self.colors
    }

    fn sig(&self, x: &Label) -> Sig {
        match x {
            Label::Unit(c) => Sig::new(vec![*c], *c),
            _ => {
                let s = x.as_seq().expect("Adj element");
                Sig::new(ints(&s[0]).into_iter().map(|c| c as Color).collect(), s[1].as_int().unwrap() as Color)
            }
        }
    }

    fn degree(&self, _x: &Label) -> i64 {
        0
    }

    /// Adj is finite in each arity; the window alone bounds bar trees.
    fn size(&self, _x: &Label) -> usize {
        0
    }

    fn diff_raw(&self, _x: &Label) -> Lin {
        Lin::zero()
    }

    fn compose_raw(&self, x: &Label, i: usize, y: &Label) -> Lin {
        let (sx, sy) = (self.sig(x), self.sig(y));
        let (fx, fy) = (self.map_of(x), self.map_of(y));
        let mut parts: Vec<OrdMap> = sx.ins.iter().map(|&c| OrdMap::identity(self.obj(c))).collect();
        parts[i] = fy;
        let whiskered = concat_maps(&parts).expect("composable cells");
        let m = compose_maps(&fx, &whiskered).expect("composable maps");
        let sig = sx.compose(i, &sy);
        Lin::single(self.element(&sig.ins, sig.out, &m.images))
    }

    fn elements(&self, out: Color, max_arity: usize, _max_size: usize) -> Vec<Label> {
        let o = self.obj(out);
        let mut v = Vec::new();
        for n in 1..=max_arity {
            for p in enumerate_paths(&self.shape, n, o.kind.src(), o.kind.tgt()) {
                for m in hom_basis(self.source_of(&p), o).expect("same kind") {
                    let x = self.element(&p, out, &m.images);
                    if !matches!(x, Label::Unit(_)) {
                        v.push(x);
                    }
                }
            }
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    F,
    G,
}

/// F: A₁ → A₂ ⊣ G: A₂ → A₁ with η: Id → GF (components η_x ∈ A₁(x, GFx)) and
/// ε: FG → Id (components ε_y ∈ A₂(FGy, y)).
#[derive(Clone)]
pub struct StrictAdjunctionData {
    pub a1: DgCat,
    pub a2: DgCat,
    pub f: DgFunctor,
    pub g: DgFunctor,
    pub eta: Vec<Lin>,
    pub eps: Vec<Lin>,
}

impl StrictAdjunctionData {
    fn cat(&self, side: u32) -> &DgCat {
        if side == 0 {
            &self.a1
        } else {
            &self.a2
        }
    }

    fn functor(&self, l: Letter) -> &DgFunctor {
        match l {
            Letter::F => &self.f,
            Letter::G => &self.g,
        }
    }

    /// A word (application order) on an object of the category at `side`.
    pub fn word_obj(&self, word: &[Letter], x: Color) -> Color {
        word.iter().fold(x, |o, &l| self.functor(l).obj(o))
    }

    pub fn word_map(&self, word: &[Letter], v: &Lin) -> Lin {
        word.iter().fold(v.clone(), |acc, &l| self.functor(l).apply_lin(&acc))
    }

    fn comp(&self, side: u32, a: &Lin, b: &Lin) -> Lin {
        compose_lin(self.cat(side).as_ref(), a, 0, b)
    }

    /// Degrees, closedness, naturality of η and ε and both triangle identities.
    pub fn check(&self, max_size: usize) -> Result<()> {
        self.f.check(max_size)?;
        self.g.check(max_size)?;
        let gf = self.f.then(&self.g)?;
        let fg = self.g.then(&self.f)?;
        let comps = [(&self.a1, &self.eta, DgFunctor::identity(self.a1.clone()), gf, "η"), (&self.a2, &self.eps, fg, DgFunctor::identity(self.a2.clone()), "ε")];
        for (cat, comp, src, tgt, name) in comps {
            if comp.len() != cat.colors().len() {
                return Err(Error::Validation(format!("{name} needs one component per object")));
            }
            for s in cat.colors().all() {
                let v = &comp[s as usize];
                for t in v.labels() {
                    let sg = cat.sig(t);
                    if cat.degree(t) != 0 || sg.ins != [src.obj(s)] || sg.out != tgt.obj(s) {
                        return Err(Error::Validation(format!("{name}_{s} contains {t} of the wrong type")));
                    }
                }
                if !crate::operad::diff_lin(cat.as_ref(), v).is_zero() {
                    return Err(Error::Validation(format!("{name}_{s} is not closed")));
                }
            }
            for a in cat.all_elements(1, max_size) {
                let sg = cat.sig(&a);
                let (s, t) = (sg.ins[0], sg.out);
                let lhs = compose_lin(cat.as_ref(), &comp[t as usize], 0, &src.apply(&a));
                let rhs = compose_lin(cat.as_ref(), &tgt.apply(&a), 0, &comp[s as usize]);
                if lhs != rhs {
                    return Err(Error::Validation(format!("{name} is not natural at {a}")));
                }
            }
        }
        for x in self.a1.colors().all() {
            // ε_{Fx} ∘ F(η_x) = 1_{Fx}
            let fx = self.f.obj(x);
            let lhs = self.comp(1, &self.eps[fx as usize], &self.f.apply_lin(&self.eta[x as usize]));
            if lhs != Lin::single(self.a2.unit(fx)) {
                return Err(Error::TriangleViolation(format!("(εF)(Fη) ≠ 1 at {x}: {lhs}")));
            }
        }
        for y in self.a2.colors().all() {
            // G(ε_y) ∘ η_{Gy} = 1_{Gy}
            let gy = self.g.obj(y);
            let lhs = self.comp(0, &self.g.apply_lin(&self.eps[y as usize]), &self.eta[gy as usize]);
            if lhs != Lin::single(self.a1.unit(gy)) {
                return Err(Error::TriangleViolation(format!("(Gε)(ηG) ≠ 1 at {y}: {lhs}")));
            }
        }
        Ok(())
    }

    /// The DG-functor of a word starting on `side`.
    pub fn word_functor(&self, side: u32, word: &[Letter]) -> DgFunctor {
        let mut f = DgFunctor::identity(self.cat(side).clone());
        f.name = format!("Id{side}");
        for (k, &l) in word.iter().enumerate() {
            let next = self.functor(l);
            f = if k == 0 { next.clone() } else { f.then(next).expect("alternating word") };
        }
        f
    }

    /// Components at x of the transformation word(m.src) ⇒ word(m.tgt) induced by m:
    /// merges act by whiskered ε, inserted elements by whiskered η.
    pub fn two_cell(&self, m: &OrdMap, x: Color) -> Lin {
        let side = m.src.kind.src();
        let end = m.src.kind.tgt();
        let mut blocks: Vec<Vec<Letter>> = (0..m.src.len()).map(|e| m.src.block(e)).collect();
        let flat = |b: &[Vec<Letter>]| -> Vec<Letter> { b.iter().flatten().copied().collect() };
        let mut comp = Lin::single(self.cat(end).unit(self.word_obj(&flat(&blocks), x)));
        // merges, left to right
        let mut e = 0;
        let mut img = m.images.clone();
        while e + 1 < blocks.len() {
            if img[e] != img[e + 1] {
                e += 1;
                continue;
            }
            let w = flat(&blocks);
            let p: usize = blocks[..e].iter().map(|b| b.len()).sum::<usize>() + blocks[e].len() - 1;
            debug_assert_eq!((w[p], w[p + 1]), (Letter::G, Letter::F));
            let y = self.word_obj(&w[..p], x);
            let step = self.word_map(&w[p + 2..], &self.eps[y as usize]);
            comp = self.comp(end, &step, &comp);
            let mut merged = blocks[e][..blocks[e].len() - 1].to_vec();
            merged.extend_from_slice(&blocks[e + 1][1..]);
            blocks[e] = merged;
            blocks.remove(e + 1);
            img.remove(e + 1);
        }
        // insertions of the target elements outside the image
        for t in 0..m.tgt.len() {
            if img.contains(&t) {
                continue;
            }
            let pos = img.iter().filter(|&&v| v < t).count();
            let w = flat(&blocks);
            let p: usize = blocks[..pos].iter().map(|b| b.len()).sum();
            let y = self.word_obj(&w[..p], x);
            let step = self.word_map(&w[p..], &self.eta[y as usize]);
            comp = self.comp(end, &step, &comp);
            blocks.insert(pos, vec![Letter::F, Letter::G]);
            img.insert(pos, t);
        }
        debug_assert_eq!(flat(&blocks), m.tgt.word());
        let _ = side;
        comp
    }
}

/// The 2-functor Adj → DGFun_∞(A₁, A₂) of a strict adjunction.
pub struct StrictTwoFunctor {
    pub data: StrictAdjunctionData,
    pub adj: Arc<AdjOperad>,
    pub target: Arc<DgFunInfty>,
    pub phi: Arc<FnMap>,
    pub morphism: TwoCatMorphism,
}

/// Builds the four component functors from F, G, η, ε and checks functoriality on all
/// cells of the window. `max_n` bounds the 1-cells of Adj.
pub fn strict_2functor(data: &StrictAdjunctionData, max_n: usize, window: &Window, max_size: usize) -> Result<StrictTwoFunctor> {
    data.check(max_size)?;
    let adj = Arc::new(build_adj(max_n));
    let target = Arc::new(image_target(data, &adj, max_size)?);
    let phi = Arc::new(image_map(data, &adj, &target));
    let tgt_obj = TwoCatObject::new(adj.shape.clone(), target.clone())?;
    let morphism = TwoCatMorphism::new(adj.two_cat_object(), tgt_obj, phi.clone())?;
    morphism.check(window, max_size)?;
    Ok(StrictTwoFunctor { data: data.clone(), adj, target, phi, morphism })
}

fn image_target(data: &StrictAdjunctionData, adj: &AdjOperad, max_size: usize) -> Result<DgFunInfty> {
    let cats: Vec<DgCat> = if adj.kinds.len() == 1 { vec![data.a1.clone()] } else { vec![data.a1.clone(), data.a2.clone()] };
    let functors = adj.objs.iter().map(|o| data.word_functor(o.kind.src(), &o.word())).collect();
    dgfun_infty(adj.shape.clone(), cats, functors, 1, max_size)
}

fn image_map(data: &StrictAdjunctionData, adj: &Arc<AdjOperad>, target: &Arc<DgFunInfty>) -> FnMap {
    let (d, a, t) = (data.clone(), adj.clone(), target.clone());
    FnMap::new((0..adj.colors().len() as Color).collect(), move |x| {
        if let Label::Unit(c) = x {
            return Lin::single(Label::Unit(*c));
        }
        let sig = a.sig(x);
        let m = a.map_of(x);
        let side = m.src.kind.src();
        let comps: Vec<(Color, Lin)> = d.cat(side).colors().all().map(|s| (s, d.two_cell(&m, s))).collect();
        let sp = t.space(&sig);
        t.element(&sig, &sp.from_components(&comps))
    })
}

impl StrictTwoFunctor {
    /// F₀₀ on the 1-cell (n), etc.: the functor word of a color.
    pub fn functor_of(&self, c: Color) -> &DgFunctor {
        &self.target.functors[c as usize]
    }

    /// τ = Φ ∘ τ_univ on the unreduced bar of Adj.
    pub fn induced(&self) -> HomotopyAdjunctionData {
        let bar = Arc::new(Bar::unreduced(self.adj.clone()));
        let tau = Twisting::universal(bar.clone()).post_compose(self.phi.clone(), self.target.clone());
        HomotopyAdjunctionData { data: self.data.clone(), adj: self.adj.clone(), bar, target: self.target.clone(), tau }
    }
}

/// A twisting cochain bar(Adj) → DGFun_∞(A₁, A₂) together with the strict data fixing the
/// 1-cell functors.
#[derive(Clone)]
pub struct HomotopyAdjunctionData {
    pub data: StrictAdjunctionData,
    pub adj: Arc<AdjOperad>,
    pub bar: Arc<Bar>,
    pub target: Arc<DgFunInfty>,
    pub tau: Twisting,
}

impl HomotopyAdjunctionData {
    /// The same data with τ replaced.
    pub fn with_tau(&self, f: impl Fn(&Twisting, &Label) -> Lin + Send + Sync + 'static) -> HomotopyAdjunctionData {
        let old = self.tau.clone();
        let tau = Twisting::new(self.bar.clone(), self.target.clone(), move |x| f(&old, x));
        HomotopyAdjunctionData { tau, ..self.clone() }
    }

    /// The (0,0) corner: bar(Δ_k) → DGFun_∞(A₁, A₁).
    pub fn monad(&self) -> Result<(Twisting, Arc<DgFunInfty>)> {
        let delta = Arc::new(build_delta(self.adj.max_n));
        let target = Arc::new(image_target(&self.data, &delta, self.target.max_size)?);
        let bar = Arc::new(Bar::unreduced(delta));
        let full = self.tau.clone();
        Ok((Twisting::new(bar, target.clone(), move |x| full.apply(x)), target))
    }
}

/// The Maurer-Cartan condition of a twisting cochain out of bar(Δ_k), on the window.
pub fn homotopy_monad_check(tau: &Twisting, window: &Window, max_size: usize) -> Result<usize> {
    tau.check(window, max_size)
}

/// Maurer-Cartan on bar(Adj) and the restriction to the (0,0) corner.
pub fn homotopy_adjunction_check(data: &HomotopyAdjunctionData, window: &Window, max_size: usize) -> Result<usize> {
    let n = data.tau.check(window, max_size)?;
    let (monad, _) = data.monad()?;
    Ok(n + homotopy_monad_check(&monad, window, max_size)?)
}

/// Counts of Adj elements per cell, for reports.
pub fn cell_counts(adj: &AdjOperad, max_arity: usize) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for c in adj.colors().all() {
        for x in adj.all_elements(max_arity, 1) {
            if adj.sig(&x).out == c {
                let s = adj.sig(&x);
                let key = format!(
                    "{}; {}",
                    s.ins.iter().map(|&k| adj.obj(k).to_string()).collect::<Vec<_>>().join(","),
                    adj.obj(c)
                );
                *out.entry(key).or_insert(0) += 1;
            }
        }
    }
    out
}

/// The identity adjunction Id ⊣ Id on a category with η = ε = 1.
pub fn identity_adjunction(a: DgCat) -> StrictAdjunctionData {
    let id = DgFunctor::identity(a.clone());
    let mut f = id.clone();
    f.name = "F".into();
    let mut g = id;
    g.name = "G".into();
    let units: Vec<Lin> = a.colors().all().map(|c| Lin::single(a.unit(c))).collect();
    StrictAdjunctionData { a1: a.clone(), a2: a, f, g, eta: units.clone(), eps: units }
}

/// A toy adjunction F ⊣ G between the retract category (objects a, b; p: a → b, i: b → a,
/// pi = 1_b) and the one-object category k: F collapses to the point, G picks out b,
/// η_a = p, η_b = 1_b, ε = 1.
pub fn retract_adjunction() -> StrictAdjunctionData {
    let ret = crate::operad::builtin::retract_category();
    let p = ret.by_name("p").expect("p");
    let a1: DgCat = Arc::new(ret);
    let a2: DgCat = Arc::new(crate::operad::builtin::a_category());
    let pt = a2.clone();
    let f = DgFunctor::new("F", a1.clone(), a2.clone(), FnMap::new(vec![0, 0], move |_| Lin::single(pt.unit(0))));
    let a1c = a1.clone();
    let g = DgFunctor::new("G", a2.clone(), a1.clone(), FnMap::new(vec![1], move |_| Lin::single(a1c.unit(1))));
    let eta = vec![Lin::single(p), Lin::single(a1.unit(1))];
    let eps = vec![Lin::single(a2.unit(0))];
    StrictAdjunctionData { a1, a2, f, g, eta, eps }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> AdjObj {
        AdjObj::parse(s).unwrap()
    }

    #[test]
    fn hom_counts_from_the_definitions() {
        assert_eq!(hom_basis(o("(2)"), o("(2)")).unwrap().len(), 3);
        assert_eq!(hom_basis(o("[1]"), o("[1]")).unwrap().len(), 1);
        assert_eq!(hom_basis(o("[2]"), o("[1]")).unwrap().len(), 2);
        assert_eq!(hom_basis(o("(0)"), o("(3)")).unwrap().len(), 1);
        assert_eq!(hom_basis(o("(2)"), o("(0)")).unwrap().len(), 0);
        assert!(hom_basis(o("(2)"), o("[2]")).is_err());
        assert!(AdjObj::new(Kind::Delta, -1).is_err());
    }

    #[test]
    fn structure_map_objects() {
        use StructureMap::*;
        assert_eq!(DeltaMonoidal.object(o("(2)"), o("(3)")).unwrap(), o("(5)"));
        assert_eq!(GlueToDelta.object(o("(1]"), o("[1)")).unwrap(), o("(3)"));
        assert_eq!(GlueToNabla.object(o("[1)"), o("(1]")).unwrap(), o("[3]"));
        assert_eq!(NablaMonoidal.object(o("[2]"), o("[1]")).unwrap(), o("[3]"));
        assert_eq!(LeftAction.object(o("(2)"), o("(1]")).unwrap(), o("(3]"));
        assert_eq!(RightAction.object(o("[1)"), o("[2]")).unwrap(), o("[3)"));
        assert_eq!(DeltaMonoidal.object(o("(0)"), o("(4)")).unwrap(), o("(4)"));
    }

    #[test]
    fn words_of_generating_cells() {
        use Letter::*;
        assert_eq!(o("(1)").word(), vec![F, G]);
        assert_eq!(o("(0]").word(), vec![F]);
        assert_eq!(o("[0)").word(), vec![G]);
        assert_eq!(o("[1]").word(), vec![G, F]);
        assert_eq!(o("[0]").word(), vec![]);
        for x in [o("(2]"), o("[1)"), o("(3)")] {
            for y in [o("[2)"), o("[0]"), o("(1]")] {
                if x.kind.tgt() == y.kind.src() {
                    let mut w = x.word();
                    w.extend(y.word());
                    assert_eq!(concat_objects(&[x, y]).unwrap().word(), w);
                }
            }
        }
    }

    #[test]
    fn adj_is_an_operad() {
        let adj = build_adj(1);
        crate::operad::check_operad(&adj, &Window::new(3, 1), 1).unwrap();
    }
}
