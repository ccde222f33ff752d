//! Colored N-collections, the ⊙ product, and pullback along color maps.
//!
//! A basis element of (V ⊙ W)(s₁…sₙ; t) is `Seq[w, v₁, …, v_m]` with w ∈ W(u₁…u_m; t)
//! and v_j ∈ V(block_j; u_j), the blocks cutting s₁…sₙ into consecutive nonempty runs.
//! Koszul signs follow the tensor rule in the written order w, v₁, …, v_m.

use std::collections::BTreeMap;

use crate::complex::{ChainMap, Complex, DgSpace, Window, FULL};
use crate::error::{Error, Result};
use crate::lin::{is_odd, sign, Color, Label, Lin};
use crate::operad::{ColorSet, Sig};
use crate::tree::reorder_odd;

#[derive(Clone, Debug)]
pub struct NCollection {
    pub colors: ColorSet,
    pub components: BTreeMap<Sig, Complex>,
    pub window: Window,
}

impl NCollection {
    pub fn new(colors: ColorSet, window: Window) -> NCollection {
        NCollection { colors, components: BTreeMap::new(), window }
    }

    pub fn insert(&mut self, sig: Sig, c: Complex) {
        if c.dim() > 0 && sig.arity() <= self.window.max_arity {
            self.components.insert(sig, c);
        }
    }

    /// k·1_s in each diagonal arity-one signature.
    pub fn unit(colors: ColorSet, window: Window) -> NCollection {
        let mut v = NCollection::new(colors.clone(), window);
        for c in colors.all() {
            let cx = Complex::new([(Label::Unit(c), 0)], |_| Lin::zero(), FULL).unwrap();
            v.insert(Sig::new(vec![c], c), cx);
        }
        v
    }

    pub fn component(&self, sig: &Sig) -> Option<&Complex> {
        self.components.get(sig)
    }

    pub fn dim(&self, sig: &Sig) -> usize {
        self.components.get(sig).map_or(0, |c| c.dim())
    }

    /// Dimension table: signature → total dimension.
    pub fn dims(&self) -> BTreeMap<Sig, usize> {
        self.components.iter().map(|(s, c)| (s.clone(), c.dim())).collect()
    }

    /// Signature and degree of a label; labels are assumed distinct across components.
    fn find(&self, l: &Label) -> Option<(&Sig, i64)> {
        self.components.iter().find(|(_, c)| c.contains(l)).map(|(s, c)| (s, c.degree(l)))
    }
}

fn tensor_d(parts: &[(&Complex, &Label)]) -> Lin {
    let mut out = Lin::zero();
    let mut prefix = 0i64;
    for (k, (c, l)) in parts.iter().enumerate() {
        let s = sign(is_odd(prefix));
        for (t, coef) in c.d(l).iter() {
            let mut items: Vec<Label> = parts.iter().map(|(_, l)| (*l).clone()).collect();
            items[k] = t.clone();
            out.add_term(Label::seq(items), coef * &s);
        }
        prefix += c.degree(l);
    }
    out
}

/// (V ⊙ W)(n) = ⊕ W(m) ⊗ V(n₁) ⊠ … ⊠ V(n_m), truncated to V's window.
pub fn odot(v: &NCollection, w: &NCollection) -> Result<NCollection> {
    if v.colors != w.colors {
        return Err(Error::ColorMismatch(format!("{:?} vs {:?}", v.colors.names, w.colors.names)));
    }
    let window = v.window;
    let mut by_out: BTreeMap<Color, Vec<(&Sig, &Complex)>> = BTreeMap::new();
    for (s, c) in &v.components {
        by_out.entry(s.out).or_default().push((s, c));
    }
    let mut acc: BTreeMap<Sig, Vec<(Label, i64, Vec<(Sig, Label)>)>> = BTreeMap::new();
    for (ws, wc) in &w.components {
        // choose for each input u_j of w a V component with output u_j
        let mut partial: Vec<(Vec<Color>, Vec<(&Sig, &Complex)>)> = vec![(vec![], vec![])];
        for &u in &ws.ins {
            let mut next = Vec::new();
            for (ins, chosen) in &partial {
                for &(vs, vc) in by_out.get(&u).map(|x| x.as_slice()).unwrap_or(&[]) {
                    if ins.len() + vs.arity() > window.max_arity {
                        continue;
                    }
                    let mut i2 = ins.clone();
                    i2.extend(&vs.ins);
                    let mut c2 = chosen.clone();
                    c2.push((vs, vc));
                    next.push((i2, c2));
                }
            }
            partial = next;
        }
        for (ins, chosen) in partial {
            let sig = Sig::new(ins, ws.out);
            // all basis tuples
            let mut tuples: Vec<(Vec<Label>, i64)> = wc.labels().map(|(l, d)| (vec![l.clone()], d)).collect();
            for (_, vc) in &chosen {
                let mut next = Vec::new();
                for (t, d) in &tuples {
                    for (l, dl) in vc.labels() {
                        let mut t2 = t.clone();
                        t2.push(l.clone());
                        next.push((t2, d + dl));
                    }
                }
                tuples = next;
            }
            let comps: Vec<Sig> = std::iter::once(ws.clone()).chain(chosen.iter().map(|(s, _)| (*s).clone())).collect();
            for (t, d) in tuples {
                let tagged: Vec<(Sig, Label)> = comps.iter().cloned().zip(t.iter().cloned()).collect();
                acc.entry(sig.clone()).or_default().push((Label::seq(t), d, tagged));
            }
        }
    }
    let mut out = NCollection::new(v.colors.clone(), window);
    for (sig, elems) in acc {
        let lookup: std::collections::HashMap<Label, Vec<(Sig, Label)>> =
            elems.iter().map(|(l, _, t)| (l.clone(), t.clone())).collect();
        let c = Complex::new(
            elems.iter().map(|(l, d, _)| (l.clone(), *d)),
            |l| {
                let parts = &lookup[l];
                let cs: Vec<(&Complex, &Label)> = parts
                    .iter()
                    .enumerate()
                    .map(|(k, (s, x))| (if k == 0 { &w.components[s] } else { &v.components[s] }, x))
                    .collect();
                tensor_d(&cs)
            },
            FULL,
        )?;
        out.insert(sig, c);
    }
    Ok(out)
}

/// The canonical reassociation (V ⊙ W) ⊙ U → V ⊙ (W ⊙ U) on one signature, with Koszul sign.
/// Left labels `Seq[u, Seq[w₁, v…], …]`, right labels `Seq[Seq[u, w₁, …], v…]`.
pub fn reassociate(left: &Label, degree: &dyn Fn(&Label) -> i64) -> (Label, bool) {
    let items = left.as_seq().unwrap();
    let u = items[0].clone();
    let mut ws = vec![u.clone()];
    let mut vs = Vec::new();
    // ids in left order: u, w1, v1.., w2, v2..
    let mut flat: Vec<Label> = vec![u];
    let mut before = vec![0usize];
    let mut w_ids = Vec::new();
    let mut v_ids = Vec::new();
    for x in &items[1..] {
        let inner = x.as_seq().unwrap();
        ws.push(inner[0].clone());
        w_ids.push(flat.len());
        before.push(flat.len());
        flat.push(inner[0].clone());
        for v in &inner[1..] {
            vs.push(v.clone());
            v_ids.push(flat.len());
            before.push(flat.len());
            flat.push(v.clone());
        }
    }
    let mut after = vec![0usize];
    after.extend(&w_ids);
    after.extend(&v_ids);
    let odd = reorder_odd(&before, &after, |i| degree(&flat[i]));
    let mut right = vec![Label::seq(ws)];
    right.extend(vs);
    (Label::seq(right), odd)
}

/// Checks that (V⊙W)⊙U and V⊙(W⊙U) have equal dimension tables and that the reassociation
/// is an isomorphism of complexes on every signature.
pub fn check_odot_associativity(v: &NCollection, w: &NCollection, u: &NCollection) -> Result<()> {
    let lhs = odot(&odot(v, w)?, u)?;
    let rhs = odot(v, &odot(w, u)?)?;
    if lhs.dims() != rhs.dims() {
        return Err(Error::Validation(format!("⊙ dims differ: {:?} vs {:?}", lhs.dims(), rhs.dims())));
    }
    let deg_of = |l: &Label| -> i64 {
        for col in [v, w, u] {
            if let Some((_, d)) = col.find(l) {
                return d;
            }
        }
        panic!("{l} not found")
    };
    for (sig, lc) in &lhs.components {
        let rc = &rhs.components[sig];
        let f = ChainMap::new(lc.clone(), rc.clone(), |l| {
            let (r, odd) = reassociate(l, &deg_of);
            Lin::term(r, sign(odd))
        })?;
        let mut images: Vec<Label> = lc.labels().map(|(l, _)| f.at(l).labels().next().unwrap().clone()).collect();
        images.sort();
        images.dedup();
        if images.len() != rc.dim() {
            return Err(Error::Validation(format!("reassociation not bijective on {sig}")));
        }
    }
    Ok(())
}

fn sig_label(s: &Sig) -> Label {
    let mut v: Vec<i64> = s.ins.iter().map(|&c| c as i64).collect();
    v.push(s.out as i64);
    Label::ints(&v)
}

/// f*(V)(s₁…sₙ; t) = V(f s₁ … f sₙ; f t), for all signatures over `colors` inside V's window.
/// Labels become `Seq[sig, l]` so that summands over different colorings stay distinct.
pub fn pullback(f: &[Color], colors: &ColorSet, v: &NCollection) -> NCollection {
    let mut out = NCollection::new(colors.clone(), v.window);
    let n = colors.len() as Color;
    for arity in 1..=v.window.max_arity {
        let mut sigs: Vec<Vec<Color>> = vec![vec![]];
        for _ in 0..arity {
            sigs = sigs.into_iter().flat_map(|s| (0..n).map(move |c| [s.clone(), vec![c]].concat())).collect();
        }
        for ins in sigs {
            for t in 0..n {
                let image = Sig::new(ins.iter().map(|&c| f[c as usize]).collect(), f[t as usize]);
                if let Some(c) = v.components.get(&image) {
                    let sig = Sig::new(ins.clone(), t);
                    let tag = sig_label(&sig);
                    let wrap = |l: &Label| Label::seq(vec![tag.clone(), l.clone()]);
                    let rc = Complex::new(
                        c.labels().map(|(l, d)| (wrap(l), d)),
                        |l| c.d(&l.as_seq().unwrap()[1]).bind(|t| Lin::single(wrap(t))),
                        c.complete,
                    )
                    .expect("relabeled complex");
                    out.insert(sig, rc);
                }
            }
        }
    }
    out
}

/// The lax comparison f*V ⊙ f*W → f*(V ⊙ W), the inclusion of summands, per signature.
/// Injective; a summand is hit once per coloring of the middle inputs.
pub fn lax_comparison(f: &[Color], colors: &ColorSet, v: &NCollection, w: &NCollection) -> Result<Vec<(Sig, ChainMap)>> {
    let src = odot(&pullback(f, colors, v), &pullback(f, colors, w))?;
    let tgt = pullback(f, colors, &odot(v, w)?);
    let mut out = Vec::new();
    for (sig, c) in &src.components {
        let t = tgt
            .components
            .get(sig)
            .ok_or_else(|| Error::Validation(format!("comparison target missing {sig}")))?;
        let tag = sig_label(sig);
        let f = ChainMap::new(c.clone(), t.clone(), |l| {
            let strip: Vec<Label> = l.as_seq().unwrap().iter().map(|x| x.as_seq().unwrap()[1].clone()).collect();
            Lin::single(Label::seq(vec![tag.clone(), Label::seq(strip)]))
        })?;
        out.push((sig.clone(), f));
    }
    Ok(out)
}
