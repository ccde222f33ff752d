//! Unit colors: red(), the unitalization Ã, the unital check and the extension of
//! maps A → For(B) to unital maps Ã → B.
//!
//! Elements of Ã with unit-color inputs are stored as `Tag(PAD, Seq[x, ins])`, where x is
//! the underlying element of A (or the unit of e) and `ins` the full input colors. The
//! absorption A(σ; t) ≅ A(red σ; t) strips the padding.

use std::sync::Arc;

use crate::complex::Window;
use crate::error::{Error, Result};
use crate::lin::{Color, Label, Lin};
use crate::linalg::{rank_of_columns, Field, Scalar};
use crate::operad::{check_morphism, ColorSet, FnMap, Operad, OperadMap, Sig};

pub(crate) const PAD: u32 = 7;

/// Removes every occurrence of the unit color; a nonempty all-unit input gives `[e]`.
pub fn red(seq: &[Color], unit: Option<Color>) -> Result<Vec<Color>> {
    let e = unit.ok_or(Error::NoUnitColor)?;
    Ok(red_units(seq, &[e]))
}

/// Removes every identity 1-cell of a path. A path made only of identities is a loop at
/// one object, so its reduction is that object's identity (the first entry).
pub fn red_units(seq: &[Color], units: &[Color]) -> Vec<Color> {
    let r: Vec<Color> = seq.iter().copied().filter(|c| !units.contains(c)).collect();
    if r.is_empty() {
        seq[..seq.len().min(1)].to_vec()
    } else {
        r
    }
}

/// The unitalization Ã: colors E ∪ {e}.
pub struct Unitalized {
    pub base: Arc<dyn Operad>,
    colors: ColorSet,
    pub e: Color,
}

pub fn unitalize(base: Arc<dyn Operad>) -> Unitalized {
    let mut names = base.colors().names.clone();
    names.push("e".into());
    let e = (names.len() - 1) as Color;
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut colors = ColorSet::new(&refs);
    colors.unit = Some(e);
    Unitalized { base, colors, e }
}

impl Unitalized {
    /// Element with underlying `x` and full input colors `ins`.
    pub fn make(&self, x: &Label, ins: &[Color]) -> Label {
        let plain = !ins.contains(&self.e) || (ins.len() == 1 && *x == Label::Unit(self.e));
        if plain {
            x.clone()
        } else {
            let ints: Vec<i64> = ins.iter().map(|&c| c as i64).collect();
            Label::tag(PAD, Label::seq(vec![x.clone(), Label::ints(&ints)]))
        }
    }

    /// (underlying element, full input colors).
    pub fn split(&self, x: &Label) -> (Label, Vec<Color>) {
        match x.untag() {
            Some((PAD, inner)) => {
                let s = inner.as_seq().unwrap();
                let ins = s[1].as_seq().unwrap().iter().map(|c| c.as_int().unwrap() as Color).collect();
                (s[0].clone(), ins)
            }
            _ => {
                if *x == Label::Unit(self.e) {
                    (x.clone(), vec![self.e])
                } else {
                    let s = self.base.sig(x);
                    (x.clone(), s.ins)
                }
            }
        }
    }

    fn is_e_unit(&self, b: &Label) -> bool {
        *b == Label::Unit(self.e)
    }

    fn pad_lin(&self, v: &Lin, ins: &[Color]) -> Lin {
        v.bind(|t| Lin::single(self.make(t, ins)))
    }
}

/// All ways of inserting `extra` copies of `e` among `ins`.
fn interleavings(ins: &[Color], extra: usize, e: Color) -> Vec<Vec<Color>> {
    if extra == 0 {
        return vec![ins.to_vec()];
    }
    if ins.is_empty() {
        return vec![vec![e; extra]];
    }
    let mut out = Vec::new();
    for mut rest in interleavings(&ins[1..], extra, e) {
        rest.insert(0, ins[0]);
        out.push(rest);
    }
    for mut rest in interleavings(ins, extra - 1, e) {
        rest.insert(0, e);
        out.push(rest);
    }
    out
}

impl Operad for Unitalized {
    fn name(&self) -> String {
        format!("{}~", self.base.name())
    }

    fn colors(&self) -> &ColorSet {
        &self.colors
    }

    fn sig(&self, x: &Label) -> Sig {
        let (b, ins) = self.split(x);
        let out = if self.is_e_unit(&b) { self.e } else { self.base.sig(&b).out };
        Sig::new(ins, out)
    }

    fn degree(&self, x: &Label) -> i64 {
        let (b, _) = self.split(x);
        if self.is_e_unit(&b) {
            0
        } else {
            self.base.degree(&b)
        }
    }

    fn size(&self, x: &Label) -> usize {
        let (b, _) = self.split(x);
        if self.is_e_unit(&b) {
            0
        } else {
            self.base.size(&b)
        }
    }

    fn weight(&self, x: &Label) -> usize {
        usize::from(!self.is_unit(x))
    }

    fn diff_raw(&self, x: &Label) -> Lin {
        let (b, ins) = self.split(x);
        if self.is_e_unit(&b) {
            return Lin::zero();
        }
        self.pad_lin(&self.base.diff(&b), &ins)
    }

    fn compose_raw(&self, x: &Label, i: usize, y: &Label) -> Lin {
        let (bx, fx) = self.split(x);
        let (by, fy) = self.split(y);
        let mut ins = fx[..i].to_vec();
        ins.extend(&fy);
        ins.extend(&fx[i + 1..]);
        if fx[i] == self.e {
            // y is a (padded) unit of e: only the padding grows
            debug_assert!(self.is_e_unit(&by));
            return Lin::single(self.make(&bx, &ins));
        }
        let j = fx[..i].iter().filter(|&&c| c != self.e).count();
        self.pad_lin(&self.base.compose(&bx, j, &by), &ins)
    }

    fn elements(&self, out: Color, max_arity: usize, max_size: usize) -> Vec<Label> {
        let mut v = Vec::new();
        if out == self.e {
            for n in 2..=max_arity {
                v.push(self.make(&Label::Unit(self.e), &vec![self.e; n]));
            }
            return v;
        }
        let mut base: Vec<Label> = vec![self.base.unit(out)];
        base.extend(self.base.elements(out, max_arity, max_size));
        for b in base {
            let s = self.base.sig(&b);
            for extra in 0..=max_arity - s.arity() {
                for ins in interleavings(&s.ins, extra, self.e) {
                    let l = self.make(&b, &ins);
                    if !self.is_unit(&l) {
                        v.push(l);
                    }
                }
            }
        }
        v
    }

    fn absorb(&self, x: &Label) -> Option<Lin> {
        let (b, ins) = self.split(x);
        let r = red(&ins, Some(self.e)).ok()?;
        Some(Lin::single(self.make(&b, &r)))
    }

    fn pad(&self, x: &Label, ins: &[Color]) -> Option<Lin> {
        let (b, own) = self.split(x);
        if red(&own, Some(self.e)).ok()? != red(ins, Some(self.e)).ok()? {
            return None;
        }
        Some(Lin::single(self.make(&b, ins)))
    }
}

fn coords(v: &Lin, basis: &[Label]) -> Option<Vec<Scalar>> {
    let f = Field::Rational;
    let mut out = vec![f.zero(); basis.len()];
    for (t, c) in v.iter() {
        let k = basis.iter().position(|b| b == t)?;
        out[k] = Scalar::Q(c.clone());
    }
    Some(out)
}

/// Whether every unit-absorption map is an isomorphism of complexes on signatures of arity
/// ≤ window.max_arity: A(σ; e) = 0 unless red σ = e, A(e…e; t) = 0 for t ≠ e, A(e…e; e) = k,
/// and A(σ; t) ≅ A(red σ; t) via `absorb`.
pub fn check_unital(p: &dyn Operad, window: &Window, max_size: usize) -> bool {
    let Some(e) = p.colors().unit else { return false };
    check_unital_units(p, &[e], window, max_size)
}

/// `check_unital` with several identity colors, one per object; absorption is `red_units`.
pub fn check_unital_units(p: &dyn Operad, units: &[Color], window: &Window, max_size: usize) -> bool {
    let a = window.max_arity;
    let elems = p.all_elements(a, max_size);
    let mut by_sig: std::collections::BTreeMap<Sig, Vec<Label>> = Default::default();
    for x in &elems {
        by_sig.entry(p.sig(x)).or_default().push(x.clone());
    }
    for (sig, xs) in &by_sig {
        let r = red_units(&sig.ins, units);
        let all_e = units.contains(&r[0]);
        if sig.ins.is_empty() {
            return false;
        }
        match (units.contains(&sig.out), all_e) {
            (true, false) | (false, true) => return false,
            (true, true) => {
                if sig.out != r[0] || xs.len() != 1 || p.degree(&xs[0]) != 0 || !p.diff(&xs[0]).is_zero() {
                    return false;
                }
            }
            (false, false) => {
                if !sig.ins.iter().any(|c| units.contains(c)) {
                    continue;
                }
                let rsig = Sig::new(r, sig.out);
                let Some(target) = by_sig.get(&rsig) else { return false };
                if target.len() != xs.len() {
                    return false;
                }
                let mut cols = Vec::new();
                for x in xs {
                    let Some(ax) = p.absorb(x) else { return false };
                    if ax.labels().any(|t| p.sig(t) != rsig || p.degree(t) != p.degree(x)) {
                        return false;
                    }
                    let lhs = p.diff(x).bind(|t| p.absorb(t).unwrap_or_default());
                    let rhs = ax.bind(|t| p.diff(t));
                    if lhs != rhs {
                        return false;
                    }
                    let Some(c) = coords(&ax, target) else { return false };
                    cols.push(c);
                }
                if rank_of_columns(Field::Rational, target.len(), &cols) != target.len() {
                    return false;
                }
            }
        }
    }
    true
}

/// Extends F: A → For(B) to the unital map Ã → B, B unital with `pad`.
pub fn extend_unital(at: Arc<Unitalized>, b: Arc<dyn Operad>, f: FnMap) -> Result<FnMap> {
    let eb = b.colors().unit.ok_or(Error::NoUnitColor)?;
    let mut cmap: Vec<Color> = (0..at.base.colors().len() as Color).map(|c| f.color(c)).collect();
    cmap.push(eb);
    let cm = cmap.clone();
    Ok(FnMap::new(cmap, move |x| {
        let (bx, ins) = at.split(x);
        let mapped: Vec<Color> = ins.iter().map(|&c| cm[c as usize]).collect();
        let img = if bx == Label::Unit(at.e) { Lin::single(b.unit(eb)) } else { f.apply(&bx) };
        if !ins.contains(&at.e) {
            return img;
        }
        img.bind(|t| b.pad(t, &mapped).expect("target is unital"))
    }))
}

/// For each sample F: A → For(B): the extension is a unital morphism Ã → B, restricting it
/// gives F back, and samples that differ on A have different extensions.
pub fn map_bijection_check(
    a: Arc<dyn Operad>,
    b: Arc<dyn Operad>,
    samples: &[FnMap],
    window: &Window,
    max_size: usize,
) -> Result<bool> {
    let eb = b.colors().unit.ok_or(Error::NoUnitColor)?;
    let at = Arc::new(unitalize(a.clone()));
    let a_elems = a.all_elements(window.max_arity, max_size);
    let at_elems = at.all_elements(window.max_arity, max_size);
    let mut exts = Vec::new();
    for f in samples {
        let ext = extend_unital(at.clone(), b.clone(), f.clone())?;
        if check_morphism(&ext, at.as_ref(), b.as_ref(), window, max_size).is_err() {
            return Ok(false);
        }
        if ext.apply(&Label::Unit(at.e)) != Lin::single(b.unit(eb)) {
            return Ok(false);
        }
        if a_elems.iter().any(|x| ext.apply(x) != f.apply(x)) {
            return Ok(false);
        }
        exts.push(ext);
    }
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let differ_a = a_elems.iter().any(|x| samples[i].apply(x) != samples[j].apply(x));
            let differ_ext = at_elems.iter().any(|x| exts[i].apply(x) != exts[j].apply(x));
            if differ_a != differ_ext {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// x ↦ t^{arity−1} x, an automorphism of any operad.
pub fn arity_scaling(ncolors: usize, t: i64) -> ScaledMap {
    use crate::linalg::q;
    FnMap::new((0..ncolors as Color).collect(), move |x| Lin::single(x.clone()))
        .with_scalar(move |sig: &Sig| q(t).pow(sig.arity() as i32 - 1))
}

impl FnMap {
    /// Multiplies the image of x by a scalar depending on the signature of x.
    pub fn with_scalar(self, s: impl Fn(&Sig) -> crate::linalg::Q + Send + Sync + 'static) -> ScaledMap {
        ScaledMap { inner: self, s: Arc::new(s) }
    }
}

/// A morphism multiplied by a signature-dependent scalar; needs the source signature.
#[derive(Clone)]
pub struct ScaledMap {
    inner: FnMap,
    s: Arc<dyn Fn(&Sig) -> crate::linalg::Q + Send + Sync>,
}

impl ScaledMap {
    /// Binds the source operad so that signatures can be read off labels.
    pub fn on(self, src: Arc<dyn Operad>) -> FnMap {
        let inner = self.inner.clone();
        let s = self.s.clone();
        FnMap::new(inner.colors.clone(), move |x| {
            let c = if src.is_unit(x) { crate::linalg::q(1) } else { s(&src.sig(x)) };
            inner.apply(x).scaled(&c)
        })
    }
}
