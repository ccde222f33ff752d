//! Free (quasi-free) operads on a graded collection of generators.
//!
//! Elements are trees whose vertices carry generator labels, in preorder. Grafting
//! and the derivation extending the generator differential pick up the Koszul sign of
//! moving generator labels into the new preorder.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::complex::Window;
use crate::error::{Error, Result};
use crate::lin::{is_odd, sign, Color, Label, Lin};
use crate::operad::collection::NCollection;
use crate::operad::{enumerate_decorated, evaluate, ColorSet, FnMap, Operad, PoolItem, Sig};
use crate::tree::{reorder_odd, Tr};

/// Generators of a free operad with their (already shifted) degrees and differentials.
pub trait GenSource: Send + Sync {
    fn name(&self) -> String;
    fn colors(&self) -> &ColorSet;
    fn gen_sig(&self, g: &Label) -> Sig;
    fn gen_degree(&self, g: &Label) -> i64;
    /// Contribution to the tabulation size.
    fn gen_size(&self, g: &Label) -> usize {
        let _ = g;
        1
    }
    /// Contribution to the filtration weight; at least 1.
    fn gen_weight(&self, g: &Label) -> usize {
        let _ = g;
        1
    }
    /// Differential of a generator as a combination of free-operad elements.
    fn gen_diff(&self, g: &Label) -> Lin;
    /// Generators with output `out`, arity ≤ max_arity, size ≤ max_size, weight ≤ max_weight.
    fn gens(&self, out: Color, max_arity: usize, max_size: usize, max_weight: usize) -> Vec<Label>;
}

pub struct FreeOperad<G: GenSource> {
    pub gens: G,
    /// Cap on total generator weight during enumeration (the window weight).
    pub weight_cap: usize,
    cache: Mutex<HashMap<(Color, usize, usize), Arc<Vec<Label>>>>,
}

pub fn corolla(g: Label, arity: usize) -> Label {
    Label::tree(Tr::corolla(g, arity))
}

fn relabel(t: &Tr<usize>, table: &[Label]) -> Tr<Label> {
    t.map(&mut |&i| table[i].clone())
}

impl<G: GenSource> FreeOperad<G> {
    pub fn new(gens: G) -> Self {
        FreeOperad { gens, weight_cap: usize::MAX / 4, cache: Mutex::new(HashMap::new()) }
    }

    pub fn with_weight_cap(gens: G, cap: usize) -> Self {
        FreeOperad { gens, weight_cap: cap, cache: Mutex::new(HashMap::new()) }
    }

    /// The generator as a one-vertex element.
    pub fn gen(&self, g: &Label) -> Label {
        corolla(g.clone(), self.gens.gen_sig(g).arity())
    }

    fn tree_of<'a>(&self, x: &'a Label) -> &'a Tr<Label> {
        x.as_tree().unwrap_or_else(|| panic!("{x} is not a free-operad element"))
    }

    /// Σ over vertices of the generator weights.
    pub fn filtration_weight(&self, x: &Label) -> usize {
        match x {
            Label::Unit(_) => 0,
            _ => self.tree_of(x).preorder().iter().map(|g| self.gens.gen_weight(g)).sum(),
        }
    }

    /// Applies the generator differential at vertex `v` of `t`, without the prefix sign.
    fn derive_at(&self, t: &Tr<Label>, decs: &[&Label], degs: &[i64], v: usize) -> Lin {
        let k = decs.len();
        let mut out = Lin::zero();
        let numbered = t.numbered();
        for (term, c) in self.gens.gen_diff(decs[v]).iter() {
            match term {
                Label::Unit(col) => {
                    // removes the unary vertex v
                    let node = t.vertex(v);
                    assert_eq!(node.ins.len(), 1, "unit term in d of a non-unary generator");
                    let child = node.ins[0].clone();
                    let res = if v == 0 {
                        match child {
                            None => Label::Unit(*col),
                            Some(ct) => Label::tree(ct),
                        }
                    } else {
                        Label::tree(t.replace_at(v, &mut |_| child.clone()).unwrap())
                    };
                    out.add_term(res, c.clone());
                }
                Label::Tree(s) => {
                    let sn = s.numbered().map(&mut |&i| i + k);
                    let new_ids = numbered.substitute(v, &sn);
                    let mut table: Vec<Label> = decs.iter().map(|&d| d.clone()).collect();
                    let sdecs: Vec<&Label> = s.preorder();
                    table.extend(sdecs.iter().map(|&d| d.clone()));
                    let mut before: Vec<usize> = (0..v).collect();
                    before.extend(k..k + sdecs.len());
                    before.extend(v + 1..k);
                    let after: Vec<usize> = new_ids.preorder().into_iter().copied().collect();
                    let odd = reorder_odd(&before, &after, |id| {
                        if id < k {
                            degs[id]
                        } else {
                            self.gens.gen_degree(sdecs[id - k])
                        }
                    });
                    out.add_term(Label::tree(relabel(&new_ids, &table)), c * sign(odd));
                }
                other => panic!("generator differential term {other} is not a free-operad element"),
            }
        }
        out
    }
}

impl<G: GenSource> Operad for FreeOperad<G> {
    fn name(&self) -> String {
        self.gens.name()
    }

    fn colors(&self) -> &ColorSet {
        self.gens.colors()
    }

    fn sig(&self, x: &Label) -> Sig {
        match x {
            Label::Unit(c) => Sig::new(vec![*c], *c),
            _ => {
                fn go<G: GenSource>(g: &G, t: &Tr<Label>, ins: &mut Vec<Color>) -> Color {
                    let s = g.gen_sig(&t.dec);
                    for (j, slot) in t.ins.iter().enumerate() {
                        match slot {
                            None => ins.push(s.ins[j]),
                            Some(c) => {
                                go(g, c, ins);
                            }
                        }
                    }
                    s.out
                }
                let mut ins = Vec::new();
                let out = go(&self.gens, self.tree_of(x), &mut ins);
                Sig::new(ins, out)
            }
        }
    }

    fn degree(&self, x: &Label) -> i64 {
        match x {
            Label::Unit(_) => 0,
            _ => self.tree_of(x).preorder().iter().map(|g| self.gens.gen_degree(g)).sum(),
        }
    }

    fn size(&self, x: &Label) -> usize {
        match x {
            Label::Unit(_) => 0,
            _ => self.tree_of(x).preorder().iter().map(|g| self.gens.gen_size(g)).sum(),
        }
    }

    fn weight(&self, x: &Label) -> usize {
        self.filtration_weight(x)
    }

    fn diff_raw(&self, x: &Label) -> Lin {
        let t = self.tree_of(x);
        let decs = t.preorder();
        let degs: Vec<i64> = decs.iter().map(|g| self.gens.gen_degree(g)).collect();
        let mut out = Lin::zero();
        let mut prefix = 0i64;
        for v in 0..decs.len() {
            let term = self.derive_at(t, &decs, &degs, v);
            out.axpy(&sign(is_odd(prefix)), &term);
            prefix += degs[v];
        }
        out
    }

    fn compose_raw(&self, x: &Label, i: usize, y: &Label) -> Lin {
        let tx = self.tree_of(x);
        let ty = self.tree_of(y);
        let k1 = tx.vertices();
        let k2 = ty.vertices();
        let nx = tx.numbered();
        let ny = ty.numbered().map(&mut |&j| j + k1);
        let g = nx.graft(i, &ny);
        let mut table: Vec<Label> = tx.preorder().into_iter().cloned().collect();
        table.extend(ty.preorder().into_iter().cloned());
        let before: Vec<usize> = (0..k1 + k2).collect();
        let after: Vec<usize> = g.preorder().into_iter().copied().collect();
        let odd = reorder_odd(&before, &after, |id| self.gens.gen_degree(&table[id]));
        Lin::term(Label::tree(relabel(&g, &table)), sign(odd))
    }

    fn elements(&self, out: Color, max_arity: usize, max_size: usize) -> Vec<Label> {
        let key = (out, max_arity, max_size);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.as_ref().clone();
        }
        let cap = self.weight_cap;
        let pool = |c: Color| -> Vec<PoolItem> {
            self.gens
                .gens(c, max_arity, max_size, cap)
                .into_iter()
                .map(|g| PoolItem {
                    sig: self.gens.gen_sig(&g),
                    weight: self.gens.gen_weight(&g),
                    size: self.gens.gen_size(&g),
                    label: g,
                })
                .collect()
        };
        let weight_budget = if cap >= usize::MAX / 8 { max_size } else { cap };
        let v: Vec<Label> = enumerate_decorated(&pool, out, max_arity, weight_budget, max_size)
            .into_iter()
            .map(|d| Label::tree(d.tree))
            .collect();
        self.cache.lock().unwrap().insert(key, Arc::new(v.clone()));
        v
    }
}

/// A finite table of generators `Gen(k)` with signatures, degrees, sizes and differentials.
#[derive(Clone, Debug, PartialEq)]
pub struct Presented {
    pub name: String,
    pub colors: ColorSet,
    pub names: Vec<String>,
    pub sigs: Vec<Sig>,
    pub degrees: Vec<i64>,
    pub sizes: Vec<usize>,
    pub diffs: Vec<Lin>,
}

impl Presented {
    pub fn new(name: &str, colors: ColorSet) -> Presented {
        Presented {
            name: name.into(),
            colors,
            names: vec![],
            sigs: vec![],
            degrees: vec![],
            sizes: vec![],
            diffs: vec![],
        }
    }

    /// Adds a generator and returns its label.
    pub fn add(&mut self, name: &str, sig: Sig, degree: i64, size: usize) -> Label {
        self.names.push(name.into());
        self.sigs.push(sig);
        self.degrees.push(degree);
        self.sizes.push(size.max(1));
        self.diffs.push(Lin::zero());
        Label::Gen(self.names.len() as u32 - 1)
    }

    pub fn set_diff(&mut self, g: &Label, d: Lin) {
        let Label::Gen(k) = g else { panic!("not a generator") };
        self.diffs[*k as usize] = d;
    }

    pub fn index(&self, name: &str) -> Option<Label> {
        self.names.iter().position(|n| n == name).map(|k| Label::Gen(k as u32))
    }

    fn k(g: &Label) -> usize {
        match g {
            Label::Gen(k) => *k as usize,
            _ => panic!("{g} is not a presented generator"),
        }
    }
}

impl GenSource for Presented {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn colors(&self) -> &ColorSet {
        &self.colors
    }

    fn gen_sig(&self, g: &Label) -> Sig {
        self.sigs[Self::k(g)].clone()
    }

    fn gen_degree(&self, g: &Label) -> i64 {
        self.degrees[Self::k(g)]
    }

    fn gen_size(&self, g: &Label) -> usize {
        self.sizes[Self::k(g)]
    }

    fn gen_diff(&self, g: &Label) -> Lin {
        self.diffs[Self::k(g)].clone()
    }

    fn gens(&self, out: Color, max_arity: usize, max_size: usize, _max_weight: usize) -> Vec<Label> {
        (0..self.names.len())
            .filter(|&k| self.sigs[k].out == out && self.sigs[k].arity() <= max_arity && self.sizes[k] <= max_size)
            .map(|k| Label::Gen(k as u32))
            .collect()
    }
}

pub type PresentedOperad = FreeOperad<Presented>;

/// Pretty form of a presented element using generator names.
pub fn show_presented(p: &Presented, x: &Label) -> String {
    match x {
        Label::Tree(t) => t.map(&mut |g| p.names[Presented::k(g)].clone()).to_string(),
        Label::Unit(c) => format!("Id_{}", p.colors.names[*c as usize]),
        other => other.to_string(),
    }
}

/// Free operad on the basis of a collection; the generator differential is the linear one of V.
pub fn free_operad(v: &NCollection, w: &Window) -> PresentedOperad {
    let mut pres = Presented::new("free", v.colors.clone());
    let mut idx: HashMap<(Sig, Label), Label> = HashMap::new();
    for (sig, c) in &v.components {
        if sig.arity() > w.max_arity {
            continue;
        }
        for (l, deg) in c.labels() {
            let g = pres.add(&format!("{l}"), sig.clone(), deg, 1);
            idx.insert((sig.clone(), l.clone()), g);
        }
    }
    for (sig, c) in &v.components {
        if sig.arity() > w.max_arity {
            continue;
        }
        for (l, _) in c.labels() {
            let g = idx[&(sig.clone(), l.clone())].clone();
            let d = c.d(l).bind(|t| Lin::single(corolla(idx[&(sig.clone(), t.clone())].clone(), sig.arity())));
            pres.set_diff(&g, d);
        }
    }
    FreeOperad::with_weight_cap(pres, w.max_weight)
}

use crate::complex::DgSpace;

/// The unique operad morphism free(V) → A restricting to φ on generators.
pub fn extend_from_collection<G: GenSource + 'static>(
    free: Arc<FreeOperad<G>>,
    target: Arc<dyn Operad>,
    color_map: Vec<Color>,
    phi: impl Fn(&Label) -> Lin + Send + Sync + 'static,
) -> FnMap {
    let phi = Arc::new(phi);
    FnMap::new(color_map.clone(), move |x| match x {
        Label::Unit(c) => Lin::single(target.unit(color_map[*c as usize])),
        Label::Tree(t) => {
            let _ = &free;
            let valued = t.map(&mut |g| phi(g));
            evaluate(target.as_ref(), &valued)
        }
        other => panic!("{other} is not a free-operad element"),
    })
}

/// Restriction of a morphism out of a free operad to its generators.
pub fn restrict_to_generators<G: GenSource>(free: &FreeOperad<G>, f: &dyn crate::operad::OperadMap, g: &Label) -> Lin {
    f.apply(&free.gen(g))
}

/// Verifies that the generator differentials square to zero in the free operad.
pub fn check_presentation<G: GenSource>(free: &FreeOperad<G>, max_arity: usize, max_size: usize) -> Result<()> {
    for c in free.colors().all() {
        for g in free.gens.gens(c, max_arity, max_size, free.weight_cap) {
            let x = free.gen(&g);
            let dd = free.diff(&x).bind(|t| free.diff(t));
            if !dd.is_zero() {
                return Err(Error::Validation(format!("d^2 != 0 on generator {g} of {}", free.name())));
            }
            for t in free.diff(&x).labels() {
                if free.degree(t) != free.degree(&x) + 1 || free.sig(t) != free.sig(&x) {
                    return Err(Error::Validation(format!("d of generator {g} has a term of wrong degree or signature")));
                }
            }
        }
    }
    Ok(())
}
