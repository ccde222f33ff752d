//! 2-categories with a fixed object set I, encoded as operads colored by the 1-cells E
//! whose components sit on cells (top path; bottom 1-cell with the same endpoints).
//!
//! The coordinate rings of paths and cells are kept implicit: a component is indexed by its
//! cell, and the concatenation pullback is `glue_cells`. Free and bar constructions are
//! computed on chord diagrams, with regions listed in the preorder of the dual tree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::barcobar::{cobar, counit_certificate, tree_sig, Bar, Cooperad};
use crate::complex::{Complex, DgSpace, QisoCertificate, Window, FULL};
use crate::diagram::{diagram_to_tree, enumerate_diagrams, glue_cells, tree_to_diagram, Cell, ChordDiagram, Shape, TopItem};
use crate::error::{Error, Result};
use crate::lin::{is_odd, sign, Color, Label, Lin};
use crate::linalg::{Field, Q};
use crate::operad::collection::NCollection;
use crate::operad::unital::{red_units, PAD};
use crate::operad::{check_morphism, check_operad, evaluate, ColorSet, FnMap, Operad, OperadMap, Sig};
use crate::tree::{reorder_odd, Tr};

const DIAG: u32 = 12;

type ChordKey = Option<(usize, usize, usize)>;

/// Composable sequences of n 1-cells from object i to object j, in lexicographic order.
pub fn enumerate_paths(shape: &Shape, n: usize, i: u32, j: u32) -> Vec<Vec<Color>> {
    let mut acc: Vec<(Vec<Color>, u32)> = vec![(Vec::new(), i)];
    for _ in 0..n {
        let mut next = Vec::new();
        for (p, at) in acc {
            for e in 0..shape.edges.len() as Color {
                if shape.src(e) == at {
                    let mut q = p.clone();
                    q.push(e);
                    next.push((q, shape.tgt(e)));
                }
            }
        }
        acc = next;
    }
    acc.into_iter().filter(|(_, at)| *at == j).map(|(p, _)| p).collect()
}

/// Cells with a top path of length n ≥ 1.
pub fn enumerate_cells(shape: &Shape, n: usize) -> Vec<Cell> {
    let mut out = Vec::new();
    let k = shape.objects.len() as u32;
    for i in 0..k {
        for j in 0..k {
            for p in enumerate_paths(shape, n, i, j) {
                for b in shape.edges_between(i, j) {
                    out.push(Cell::new(p.clone(), b));
                }
            }
        }
    }
    out.sort();
    out
}

pub fn sig_cell(s: &Sig) -> Cell {
    Cell::new(s.ins.clone(), s.out)
}

pub fn cell_sig(c: &Cell) -> Sig {
    Sig::new(c.top.clone(), c.bot)
}

/// Colors named after the 1-cells; on one object the identity becomes the unit color.
pub fn shape_colors(shape: &Shape) -> ColorSet {
    let names: Vec<&str> = shape.edges.iter().map(|e| e.0.as_str()).collect();
    let mut c = ColorSet::new(&names);
    if shape.objects.len() == 1 {
        c.unit = shape.units.as_ref().map(|u| u[0]);
    }
    c
}

/// A collection whose components all sit on cells of a shape.
#[derive(Clone, Debug)]
pub struct NSeq {
    pub shape: Shape,
    pub coll: NCollection,
}

impl NSeq {
    pub fn new(shape: Shape, window: Window) -> NSeq {
        let colors = shape_colors(&shape);
        NSeq { shape, coll: NCollection::new(colors, window) }
    }

    pub fn from_collection(shape: Shape, coll: NCollection) -> Result<NSeq> {
        if coll.colors.len() != shape.edges.len() {
            return Err(Error::ShapeMismatch(format!("{} colors for {} 1-cells", coll.colors.len(), shape.edges.len())));
        }
        for sig in coll.components.keys() {
            if !sig_cell(sig).is_valid(&shape) {
                return Err(Error::ShapeMismatch(format!("component {sig} is not a cell")));
            }
        }
        Ok(NSeq { shape, coll })
    }

    pub fn insert(&mut self, cell: &Cell, c: Complex) -> Result<()> {
        if !cell.is_valid(&self.shape) {
            return Err(Error::ShapeMismatch(format!("{cell:?} is not a cell")));
        }
        self.coll.insert(cell_sig(cell), c);
        Ok(())
    }

    /// k·1_e on every cell (e; e).
    pub fn unit(shape: Shape, window: Window) -> NSeq {
        let coll = NCollection::unit(shape_colors(&shape), window);
        NSeq { shape, coll }
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

/// (A ⊙ B)(m): a cell of B with a cell of A glued into each top 1-cell. Basis labels are
/// `Seq[b, a₁, …, a_n]` with the tensor Koszul rule in that order.
pub fn nseq_odot(a: &NSeq, b: &NSeq) -> Result<NSeq> {
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch("N-seq product of objects over different shapes".into()));
    }
    let window = a.coll.window;
    let mut by_bot: BTreeMap<Color, Vec<(&Sig, &Complex)>> = BTreeMap::new();
    for (s, c) in &a.coll.components {
        by_bot.entry(s.out).or_default().push((s, c));
    }
    type Partial<'a> = (Cell, usize, Vec<(&'a Sig, &'a Complex)>);
    let mut acc: BTreeMap<Sig, Vec<(Label, i64, Vec<(bool, Sig, Label)>)>> = BTreeMap::new();
    for (bs, bc) in &b.coll.components {
        let outer = sig_cell(bs);
        let mut partial: Vec<Partial> = vec![(outer, 1, Vec::new())];
        for &u in &bs.ins {
            let mut next = Vec::new();
            for (cell, pos, chosen) in &partial {
                for &(s, c) in by_bot.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if cell.top.len() - 1 + s.arity() > window.max_arity {
                        continue;
                    }
                    let glued = glue_cells(cell, &sig_cell(s), *pos)?;
                    let mut ch = chosen.clone();
                    ch.push((s, c));
                    next.push((glued, pos + s.arity(), ch));
                }
            }
            partial = next;
        }
        for (cell, _, chosen) in partial {
            let mut tuples: Vec<(Vec<Label>, i64)> = bc.labels().map(|(l, d)| (vec![l.clone()], d)).collect();
            for (_, c) in &chosen {
                let mut next = Vec::new();
                for (t, d) in &tuples {
                    for (l, dl) in c.labels() {
                        let mut t2 = t.clone();
                        t2.push(l.clone());
                        next.push((t2, d + dl));
                    }
                }
                tuples = next;
            }
            let comps: Vec<(bool, Sig)> =
                std::iter::once((true, bs.clone())).chain(chosen.iter().map(|(s, _)| (false, (*s).clone()))).collect();
            for (t, d) in tuples {
                let tagged = comps.iter().zip(&t).map(|((o, s), l)| (*o, s.clone(), l.clone())).collect();
                acc.entry(cell_sig(&cell)).or_default().push((Label::seq(t), d, tagged));
            }
        }
    }
    let mut out = NSeq::new(a.shape.clone(), window);
    for (sig, elems) in acc {
        let lookup: HashMap<Label, Vec<(bool, Sig, Label)>> = elems.iter().map(|(l, _, t)| (l.clone(), t.clone())).collect();
        let c = Complex::new(
            elems.iter().map(|(l, d, _)| (l.clone(), *d)),
            |l| {
                let parts: Vec<(&Complex, &Label)> = lookup[l]
                    .iter()
                    .map(|(outer, s, x)| (if *outer { &b.coll.components[s] } else { &a.coll.components[s] }, x))
                    .collect();
                tensor_d(&parts)
            },
            FULL,
        )?;
        out.coll.insert(sig, c);
    }
    Ok(out)
}

/// Exact equality of two collections: same components, same labeled bases with degrees,
/// same differentials.
pub fn collections_agree(x: &NCollection, y: &NCollection) -> bool {
    if x.components.len() != y.components.len() {
        return false;
    }
    for (s, cx) in &x.components {
        let Some(cy) = y.components.get(s) else { return false };
        let lx: BTreeMap<Label, i64> = cx.labels().map(|(l, d)| (l.clone(), d)).collect();
        let ly: BTreeMap<Label, i64> = cy.labels().map(|(l, d)| (l.clone(), d)).collect();
        if lx != ly || lx.keys().any(|l| cx.d(l) != cy.d(l)) {
            return false;
        }
    }
    true
}

/// An operad colored by the 1-cells of a shape, all of whose components are cells.
#[derive(Clone)]
pub struct TwoCatObject {
    pub shape: Shape,
    pub op: Arc<dyn Operad>,
}

impl TwoCatObject {
    pub fn new(shape: Shape, op: Arc<dyn Operad>) -> Result<TwoCatObject> {
        if op.colors().len() != shape.edges.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} has {} colors, the shape {} 1-cells",
                op.name(),
                op.colors().len(),
                shape.edges.len()
            )));
        }
        Ok(TwoCatObject { shape, op })
    }

    pub fn cell_of(&self, x: &Label) -> Cell {
        sig_cell(&self.op.sig(x))
    }

    /// Component on a cell, as a complex over the basis within `max_size`.
    pub fn component(&self, cell: &Cell, max_size: usize, complete: (i64, i64)) -> Result<Complex> {
        crate::operad::component_complex(self.op.as_ref(), &cell_sig(cell), max_size, complete)
    }

    /// Cells of all elements, the operad axioms, and agreement of composition with the
    /// concatenation pullback: the cell of x ∘_i y is x's cell with y's glued into slot i.
    pub fn validate(&self, window: &Window, max_size: usize) -> Result<()> {
        let elems = self.op.all_elements(window.max_arity, max_size);
        for x in &elems {
            if !self.cell_of(x).is_valid(&self.shape) {
                return Err(Error::ShapeMismatch(format!("{x} sits on {}, not a cell", self.op.sig(x))));
            }
        }
        check_operad(self.op.as_ref(), window, max_size)?;
        let mut by_out: HashMap<Color, Vec<&Label>> = HashMap::new();
        for y in &elems {
            by_out.entry(self.op.sig(y).out).or_default().push(y);
        }
        for x in &elems {
            let cx = self.cell_of(x);
            for (i, c) in cx.top.iter().enumerate() {
                for &y in by_out.get(c).map(|v| v.as_slice()).unwrap_or(&[]) {
                    let cy = self.cell_of(y);
                    if cx.top.len() + cy.top.len() - 1 > window.max_arity {
                        continue;
                    }
                    let glued = glue_cells(&cx, &cy, i + 1)?;
                    for t in self.op.compose(x, i, y).labels() {
                        if self.cell_of(t) != glued {
                            return Err(Error::Validation(format!("{x} ∘_{i} {y} leaves the glued cell")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The underlying N-seq of an object: one component complex per occupied cell.
pub fn underlying_nseq(a: &TwoCatObject, window: &Window, max_size: usize) -> Result<NSeq> {
    let mut out = NSeq::new(a.shape.clone(), *window);
    let mut sigs: Vec<Sig> = a.op.all_elements(window.max_arity, max_size).iter().map(|x| a.op.sig(x)).collect();
    sigs.sort();
    sigs.dedup();
    for s in sigs {
        let c = crate::operad::component_complex(a.op.as_ref(), &s, max_size, FULL)?;
        out.insert(&sig_cell(&s), c)?;
    }
    Ok(out)
}

/// A map of 2-Cat_I objects over the identity of I: F_E on 1-cells and an operad map.
#[derive(Clone)]
pub struct TwoCatMorphism {
    pub src: TwoCatObject,
    pub tgt: TwoCatObject,
    pub map: Arc<dyn OperadMap>,
}

impl TwoCatMorphism {
    pub fn new(src: TwoCatObject, tgt: TwoCatObject, map: Arc<dyn OperadMap>) -> Result<TwoCatMorphism> {
        for e in 0..src.shape.edges.len() as Color {
            let f = map.color(e);
            if tgt.shape.src(f) != src.shape.src(e) || tgt.shape.tgt(f) != src.shape.tgt(e) {
                return Err(Error::ShapeMismatch(format!("1-cell {e} changes endpoints under F_E")));
            }
            if src.shape.is_unit(e) && !tgt.shape.is_unit(f) {
                return Err(Error::ShapeMismatch(format!("identity 1-cell {e} is not sent to an identity")));
            }
        }
        Ok(TwoCatMorphism { src, tgt, map })
    }

    /// Compatibility with composition, differentials and units on the window.
    pub fn check(&self, window: &Window, max_size: usize) -> Result<()> {
        check_morphism(self.map.as_ref(), self.src.op.as_ref(), self.tgt.op.as_ref(), window, max_size)
    }
}

/// Glues `d2` into top slot `k0` (0-based) of `d1`. Returns the diagram and, for each region
/// of the result in order, its index in (regions of d1) ++ (regions of d2).
pub fn glue_diagrams(d1: &ChordDiagram, k0: usize, d2: &ChordDiagram) -> Result<(ChordDiagram, Vec<usize>)> {
    let n2 = d2.cell.top.len();
    let cell = glue_cells(&d1.cell, &d2.cell, k0 + 1)?;
    let s = |p: usize| if p <= k0 { p } else { p + n2 - 1 };
    let mut chords: BTreeMap<(usize, usize), Vec<Color>> = BTreeMap::new();
    let mut key1: HashMap<ChordKey, ChordKey> = HashMap::new();
    let mut key2: HashMap<ChordKey, ChordKey> = HashMap::new();
    key1.insert(None, None);
    for (&(a, b), st) in &d1.chords {
        let span = (s(a), s(b));
        for (l, &c) in st.iter().enumerate() {
            chords.entry(span).or_default().push(c);
            key1.insert(Some((a, b, l)), Some((span.0, span.1, l)));
        }
    }
    let span = (k0, k0 + n2);
    let base = chords.get(&span).map_or(0, |v| v.len());
    chords.entry(span).or_default().push(d2.cell.bot);
    key2.insert(None, Some((span.0, span.1, base)));
    for (&(a, b), st) in &d2.chords {
        for (l, &c) in st.iter().enumerate() {
            if (a, b) == (0, n2) {
                chords.entry(span).or_default().push(c);
                key2.insert(Some((a, b, l)), Some((span.0, span.1, base + 1 + l)));
            } else {
                chords.entry((a + k0, b + k0)).or_default().push(c);
                key2.insert(Some((a, b, l)), Some((a + k0, b + k0, l)));
            }
        }
    }
    let glued = ChordDiagram { cell, chords };
    let mut id_of: HashMap<ChordKey, usize> = HashMap::new();
    let r1 = d1.regions();
    for (i, r) in r1.iter().enumerate() {
        id_of.insert(key1[&r.bottom], i);
    }
    for (i, r) in d2.regions().iter().enumerate() {
        id_of.insert(key2[&r.bottom], r1.len() + i);
    }
    let order = glued.regions().iter().map(|r| id_of[&r.bottom]).collect();
    Ok((glued, order))
}

/// A chord diagram whose regions carry labels, listed in region order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedDiagram {
    pub diagram: ChordDiagram,
    pub decs: Vec<Label>,
}

impl DecoratedDiagram {
    pub fn to_label(&self) -> Label {
        let d = &self.diagram;
        let top: Vec<i64> = d.cell.top.iter().map(|&c| c as i64).collect();
        let chords: Vec<Label> = d
            .chords
            .iter()
            .map(|(&(a, b), st)| {
                let mut v = vec![a as i64, b as i64];
                v.extend(st.iter().map(|&c| c as i64));
                Label::ints(&v)
            })
            .collect();
        Label::tag(
            DIAG,
            Label::seq(vec![Label::ints(&top), Label::Int(d.cell.bot as i64), Label::seq(chords), Label::seq(self.decs.clone())]),
        )
    }

    pub fn from_label(l: &Label) -> Option<DecoratedDiagram> {
        let (DIAG, inner) = l.untag()? else { return None };
        let s = inner.as_seq()?;
        let ints = |x: &Label| -> Option<Vec<usize>> { x.as_seq()?.iter().map(|i| i.as_int().map(|v| v as usize)).collect() };
        let top: Vec<Color> = ints(&s[0])?.into_iter().map(|c| c as Color).collect();
        let bot = s[1].as_int()? as Color;
        let mut chords = BTreeMap::new();
        for c in s[2].as_seq()? {
            let v = ints(c)?;
            chords.insert((v[0], v[1]), v[2..].iter().map(|&x| x as Color).collect());
        }
        Some(DecoratedDiagram { diagram: ChordDiagram { cell: Cell::new(top, bot), chords }, decs: s[3].as_seq()?.to_vec() })
    }

    /// Diagram of an operad-decorated tree: a chord for every internal edge.
    pub fn from_tree(shape: &Shape, p: &dyn Operad, t: &Tr<Label>) -> Result<DecoratedDiagram> {
        let colors = t.map(&mut |d| p.sig(d).out);
        let leaves = tree_sig(t, &|d| p.sig(d)).ins;
        let diagram = tree_to_diagram(shape, &colors, &leaves)?;
        Ok(DecoratedDiagram { diagram, decs: t.preorder().into_iter().cloned().collect() })
    }

    pub fn to_tree(&self) -> Tr<Label> {
        let (t, _) = diagram_to_tree(&self.diagram);
        t.numbered().map(&mut |&i| self.decs[i].clone())
    }

    /// Gluing with the Koszul sign of moving the decorations into the new region order.
    pub fn glue(&self, k0: usize, other: &DecoratedDiagram, degree: &dyn Fn(&Label) -> i64) -> Result<(DecoratedDiagram, Q)> {
        let (d, order) = glue_diagrams(&self.diagram, k0, &other.diagram)?;
        let table: Vec<&Label> = self.decs.iter().chain(&other.decs).collect();
        let before: Vec<usize> = (0..table.len()).collect();
        let odd = reorder_odd(&before, &order, |i| degree(table[i]));
        Ok((DecoratedDiagram { diagram: d, decs: order.iter().map(|&i| table[i].clone()).collect() }, sign(odd)))
    }
}

/// Number of diagrams on each cell obtained from bare cells by repeated gluing, with at most
/// `max_top` top 1-cells and `max_cells` regions: the free 2-Cat_I object in sets on Cell.
pub fn free_set_counts(shape: &Shape, max_top: usize, max_cells: usize) -> BTreeMap<Cell, usize> {
    let mut all: BTreeSet<ChordDiagram> = BTreeSet::new();
    let mut gens = Vec::new();
    for n in 1..=max_top {
        for c in enumerate_cells(shape, n) {
            gens.push(ChordDiagram::trivial(c));
        }
    }
    let mut frontier: Vec<ChordDiagram> = gens.clone();
    all.extend(gens.iter().cloned());
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for d1 in &frontier {
            for k0 in 0..d1.cell.top.len() {
                for g in &gens {
                    if g.cell.bot != d1.cell.top[k0]
                        || d1.cell.top.len() + g.cell.top.len() - 1 > max_top
                        || d1.cell_count() + 1 > max_cells
                    {
                        continue;
                    }
                    let (d, _) = glue_diagrams(d1, k0, g).expect("matching bottom");
                    if all.insert(d.clone()) {
                        next.push(d);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut counts = BTreeMap::new();
    for d in all {
        *counts.entry(d.cell).or_insert(0) += 1;
    }
    counts
}

/// The free 2-Cat_I object on an N-seq: diagrams whose regions carry basis elements of the
/// N-seq on the region's cell. Weight = number of regions.
pub struct FreeDiagrams {
    pub shape: Shape,
    colors: ColorSet,
    gens: HashMap<Label, (Sig, i64)>,
    diffs: HashMap<Label, Lin>,
    by_cell: HashMap<Cell, Vec<Label>>,
    pub window: Window,
}

impl FreeDiagrams {
    pub fn new(a: &NSeq, window: Window) -> FreeDiagrams {
        let mut gens = HashMap::new();
        let mut diffs = HashMap::new();
        let mut by_cell: HashMap<Cell, Vec<Label>> = HashMap::new();
        for (sig, c) in &a.coll.components {
            for (l, d) in c.labels() {
                gens.insert(l.clone(), (sig.clone(), d));
                diffs.insert(l.clone(), c.d(l));
                by_cell.entry(sig_cell(sig)).or_default().push(l.clone());
            }
        }
        FreeDiagrams { shape: a.shape.clone(), colors: a.coll.colors.clone(), gens, diffs, by_cell, window }
    }

    fn dd(&self, x: &Label) -> DecoratedDiagram {
        DecoratedDiagram::from_label(x).unwrap_or_else(|| panic!("{x} is not a decorated diagram"))
    }

    fn gdeg(&self, g: &Label) -> i64 {
        self.gens[g].1
    }

    /// A single generator as a one-region diagram.
    pub fn gen(&self, g: &Label) -> Label {
        let cell = sig_cell(&self.gens[g].0);
        DecoratedDiagram { diagram: ChordDiagram::trivial(cell), decs: vec![g.clone()] }.to_label()
    }

    /// The unique map to `target` extending `phi` on generators, by evaluating the dual tree.
    pub fn extend(
        self: &Arc<Self>,
        target: Arc<dyn Operad>,
        color_map: Vec<Color>,
        phi: impl Fn(&Label) -> Lin + Send + Sync + 'static,
    ) -> FnMap {
        let me = self.clone();
        FnMap::new(color_map.clone(), move |x| match x {
            Label::Unit(c) => Lin::single(target.unit(color_map[*c as usize])),
            _ => evaluate(target.as_ref(), &me.dd(x).to_tree().map(&mut |g| phi(g))),
        })
    }
}

impl Operad for FreeDiagrams {
    fn name(&self) -> String {
        "free2".into()
    }

    fn colors(&self) -> &ColorSet {
        &self.colors
    }

    fn sig(&self, x: &Label) -> Sig {
        match x {
            Label::Unit(c) => Sig::new(vec![*c], *c),
            _ => cell_sig(&self.dd(x).diagram.cell),
        }
    }

    fn degree(&self, x: &Label) -> i64 {
        match x {
            Label::Unit(_) => 0,
            _ => self.dd(x).decs.iter().map(|g| self.gdeg(g)).sum(),
        }
    }

    fn size(&self, x: &Label) -> usize {
        self.weight(x)
    }

    fn weight(&self, x: &Label) -> usize {
        match x {
            Label::Unit(_) => 0,
            _ => self.dd(x).decs.len(),
        }
    }

    fn diff_raw(&self, x: &Label) -> Lin {
        let d = self.dd(x);
        let mut out = Lin::zero();
        let mut prefix = 0i64;
        for v in 0..d.decs.len() {
            let s = sign(is_odd(prefix));
            for (z, c) in self.diffs[&d.decs[v]].iter() {
                let mut e = d.clone();
                e.decs[v] = z.clone();
                out.add_term(e.to_label(), c * &s);
            }
            prefix += self.gdeg(&d.decs[v]);
        }
        out
    }

    fn compose_raw(&self, x: &Label, i: usize, y: &Label) -> Lin {
        let (g, s) = self.dd(x).glue(i, &self.dd(y), &|l| self.gdeg(l)).expect("matching 1-cells");
        Lin::term(g.to_label(), s)
    }

    fn elements(&self, out: Color, max_arity: usize, max_size: usize) -> Vec<Label> {
        let cap = max_size.min(self.window.max_weight);
        let mut v = Vec::new();
        for n in 1..=max_arity {
            for cell in enumerate_cells(&self.shape, n) {
                if cell.bot != out {
                    continue;
                }
                for d in enumerate_diagrams(&self.shape, &cell, cap) {
                    let mut choices: Vec<Vec<Label>> = vec![Vec::new()];
                    for r in d.regions() {
                        let pool = self.by_cell.get(&r.cell).map(|v| v.as_slice()).unwrap_or(&[]);
                        choices = choices
                            .into_iter()
                            .flat_map(|c| {
                                pool.iter().map(move |g| {
                                    let mut c2 = c.clone();
                                    c2.push(g.clone());
                                    c2
                                })
                            })
                            .collect();
                    }
                    for decs in choices {
                        v.push(DecoratedDiagram { diagram: d.clone(), decs }.to_label());
                    }
                }
            }
        }
        v
    }
}

/// Free 2-Cat_I object on `a`, diagrams of at most `w.max_weight` regions.
pub fn free_twocat(a: &NSeq, w: Window) -> Result<(TwoCatObject, Arc<FreeDiagrams>)> {
    let f = Arc::new(FreeDiagrams::new(a, w));
    Ok((TwoCatObject::new(a.shape.clone(), f.clone())?, f))
}

/// Bar construction of a 2-Cat_I object. Elements are those of the operadic bar (trees of
/// suspended elements); the differential is computed on the dual chord diagrams, the
/// combinatorial part by removing one chord at a time.
pub struct BarTwoCat {
    pub shape: Shape,
    pub bar: Bar,
}

pub fn bar_twocat(a: &TwoCatObject, window: &Window, max_size: usize) -> Result<BarTwoCat> {
    Ok(BarTwoCat { shape: a.shape.clone(), bar: Bar::reduced(a.op.clone(), window, max_size)? })
}

impl BarTwoCat {
    fn sdeg(&self, y: &Label) -> i64 {
        self.bar.p.degree(y) - 1
    }

    /// Chord-removal plus internal differential, computed on the decorated diagram.
    pub fn diagram_diff(&self, x: &Label) -> Lin {
        let p = self.bar.p.as_ref();
        let t = x.as_tree().expect("bar element");
        let dd = DecoratedDiagram::from_tree(&self.shape, p, t).expect("bar element over the shape");
        let sd: Vec<i64> = dd.decs.iter().map(|d| self.sdeg(d)).collect();
        let mut out = Lin::zero();
        let mut prefix = 0i64;
        for v in 0..dd.decs.len() {
            let s = -sign(is_odd(prefix));
            for (z, c) in p.diff(&dd.decs[v]).iter() {
                let mut e = dd.clone();
                e.decs[v] = z.clone();
                out.add_term(Label::tree(e.to_tree()), c * &s);
            }
            prefix += sd[v];
        }
        let regions = dd.diagram.regions();
        for (b, rb) in regions.iter().enumerate().skip(1) {
            let c = rb.bottom.expect("non-root region");
            let (a, i) = regions
                .iter()
                .enumerate()
                .find_map(|(a, r)| r.top.iter().position(|it| *it == TopItem::Chord(c.0, c.1, c.2)).map(|i| (a, i)))
                .expect("chord bounds a lower region");
            let merged = dd.diagram.remove_chord(c);
            let rekey = |k: ChordKey| -> ChordKey {
                k.map(|(x, y, l)| if (x, y) == (c.0, c.1) && l > c.2 { (x, y, l - 1) } else { (x, y, l) })
            };
            let id_of: HashMap<ChordKey, usize> =
                regions.iter().enumerate().filter(|(j, _)| *j != b).map(|(j, r)| (rekey(r.bottom), j)).collect();
            let order: Vec<usize> = merged.regions().iter().map(|r| id_of[&r.bottom]).collect();
            let between: i64 = sd[a + 1..b].iter().sum();
            let before: i64 = sd[..a].iter().sum();
            let s = sign(is_odd(sd[b] * between) ^ is_odd(before) ^ is_odd(p.degree(&dd.decs[a])));
            for (z, coef) in p.compose(&dd.decs[a], i, &dd.decs[b]).iter() {
                let decs = order.iter().map(|&j| if j == a { z.clone() } else { dd.decs[j].clone() }).collect();
                let e = DecoratedDiagram { diagram: merged.clone(), decs };
                out.add_term(Label::tree(e.to_tree()), coef * &s);
            }
        }
        out
    }
}

impl Cooperad for BarTwoCat {
    fn name(&self) -> String {
        format!("B2({})", self.bar.p.name())
    }

    fn colors(&self) -> &ColorSet {
        self.bar.colors()
    }

    fn sig(&self, x: &Label) -> Sig {
        self.bar.sig(x)
    }

    fn degree(&self, x: &Label) -> i64 {
        self.bar.degree(x)
    }

    fn weight(&self, x: &Label) -> usize {
        self.bar.weight(x)
    }

    fn size(&self, x: &Label) -> usize {
        self.bar.size(x)
    }

    fn diff(&self, x: &Label) -> Lin {
        self.diagram_diff(x)
    }

    fn delta1(&self, x: &Label) -> Vec<(Label, usize, Label, Q)> {
        self.bar.delta1(x)
    }

    fn elements(&self, out: Color, max_arity: usize, max_weight: usize, max_size: usize) -> Vec<Label> {
        self.bar.elements(out, max_arity, max_weight, max_size)
    }
}

fn check_cells_of(shape: &Shape, sigs: impl Iterator<Item = Sig>) -> Result<()> {
    for s in sigs {
        if !sig_cell(&s).is_valid(shape) {
            return Err(Error::ShapeMismatch(format!("{s} is not a cell")));
        }
    }
    Ok(())
}

/// Cobar construction of a connected cooperad over the shape, as a 2-Cat_I object.
pub fn cobar_twocat(shape: &Shape, q: Arc<dyn Cooperad>, window: &Window, max_size: usize) -> Result<TwoCatObject> {
    check_cells_of(shape, q.all_elements(window, max_size).iter().map(|x| q.sig(x)))?;
    let o = cobar(q, window, max_size)?;
    TwoCatObject::new(shape.clone(), Arc::new(o))
}

/// Quasi-isomorphism certificates of the counit B*B(A) → A, one per cell in the window.
pub fn counit_twocat(
    a: &TwoCatObject,
    window: &Window,
    max_size: usize,
    complete: (i64, i64),
    field: Field,
) -> Result<Vec<(Sig, QisoCertificate)>> {
    check_cells_of(&a.shape, a.op.all_elements(window.max_arity, max_size).iter().map(|x| a.op.sig(x)))?;
    counit_certificate(a.op.clone(), window, max_size, complete, field)
}

/// The unitalization Ā: one identity 1-cell Id_i per object adjoined. Elements with identity
/// inputs are padded copies of A(red s; t); Ā(Id_i…Id_i; Id_i) = k. On one object the labels
/// coincide with those of the operadic unitalization.
pub struct UnitalizedTwo {
    pub base: Arc<dyn Operad>,
    pub shape: Shape,
    colors: ColorSet,
    pub units: Vec<Color>,
}

pub fn unitalize_twocat(a: &TwoCatObject) -> Result<TwoCatObject> {
    let u = Arc::new(UnitalizedTwo::new(a.base_shape_check()?, a.op.clone()));
    TwoCatObject::new(u.shape.clone(), u)
}

impl TwoCatObject {
    fn base_shape_check(&self) -> Result<Shape> {
        if self.shape.units.is_some() {
            return Err(Error::ShapeMismatch("shape already has identity 1-cells".into()));
        }
        Ok(self.shape.clone())
    }
}

impl UnitalizedTwo {
    pub fn new(shape: Shape, base: Arc<dyn Operad>) -> UnitalizedTwo {
        let mut sh = shape;
        let n0 = sh.edges.len() as Color;
        let single = sh.objects.len() == 1;
        for (i, o) in sh.objects.clone().iter().enumerate() {
            let name = if single { "e".to_string() } else { format!("Id_{o}") };
            sh.edges.push((name, i as u32, i as u32));
        }
        let units: Vec<Color> = (0..sh.objects.len() as Color).map(|i| n0 + i).collect();
        sh.units = Some(units.clone());
        let colors = shape_colors(&sh);
        UnitalizedTwo { base, shape: sh, colors, units }
    }

    fn is_unit_color(&self, c: Color) -> bool {
        self.units.contains(&c)
    }

    fn is_id(&self, b: &Label) -> bool {
        matches!(b, Label::Unit(c) if self.is_unit_color(*c))
    }

    pub fn make(&self, x: &Label, ins: &[Color]) -> Label {
        let plain = !ins.iter().any(|&c| self.is_unit_color(c)) || (ins.len() == 1 && *x == Label::Unit(ins[0]));
        if plain {
            x.clone()
        } else {
            let ints: Vec<i64> = ins.iter().map(|&c| c as i64).collect();
            Label::tag(PAD, Label::seq(vec![x.clone(), Label::ints(&ints)]))
        }
    }

    pub fn split(&self, x: &Label) -> (Label, Vec<Color>) {
        match x.untag() {
            Some((PAD, inner)) => {
                let s = inner.as_seq().unwrap();
                let ins = s[1].as_seq().unwrap().iter().map(|c| c.as_int().unwrap() as Color).collect();
                (s[0].clone(), ins)
            }
            _ => match x {
                Label::Unit(c) if self.is_unit_color(*c) => (x.clone(), vec![*c]),
                _ => (x.clone(), self.base.sig(x).ins),
            },
        }
    }

    fn pad_lin(&self, v: &Lin, ins: &[Color]) -> Lin {
        v.bind(|t| Lin::single(self.make(t, ins)))
    }

    /// All ways of inserting `extra` identities into the path `ins` starting at `at`; an
    /// identity inserted at a vertex of the path is that vertex's identity.
    fn interleavings(&self, ins: &[Color], extra: usize, at: u32) -> Vec<Vec<Color>> {
        if extra == 0 {
            return vec![ins.to_vec()];
        }
        let id = self.units[at as usize];
        if ins.is_empty() {
            return vec![vec![id; extra]];
        }
        let mut out = Vec::new();
        for mut rest in self.interleavings(&ins[1..], extra, self.shape.tgt(ins[0])) {
            rest.insert(0, ins[0]);
            out.push(rest);
        }
        for mut rest in self.interleavings(ins, extra - 1, at) {
            rest.insert(0, id);
            out.push(rest);
        }
        out
    }
}

impl Operad for UnitalizedTwo {
    fn name(&self) -> String {
        format!("{}~", self.base.name())
    }

    fn colors(&self) -> &ColorSet {
        &self.colors
    }

    fn sig(&self, x: &Label) -> Sig {
        let (b, ins) = self.split(x);
        let out = match b {
            Label::Unit(c) if self.is_unit_color(c) => c,
            _ => self.base.sig(&b).out,
        };
        Sig::new(ins, out)
    }

    fn degree(&self, x: &Label) -> i64 {
        let (b, _) = self.split(x);
        if self.is_id(&b) {
            0
        } else {
            self.base.degree(&b)
        }
    }

    fn size(&self, x: &Label) -> usize {
        let (b, _) = self.split(x);
        if self.is_id(&b) {
            0
        } else {
            self.base.size(&b)
        }
    }

    fn diff_raw(&self, x: &Label) -> Lin {
        let (b, ins) = self.split(x);
        if self.is_id(&b) {
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
        if self.is_unit_color(fx[i]) {
            debug_assert!(self.is_id(&by));
            return Lin::single(self.make(&bx, &ins));
        }
        let j = fx[..i].iter().filter(|&&c| !self.is_unit_color(c)).count();
        self.pad_lin(&self.base.compose(&bx, j, &by), &ins)
    }

    fn elements(&self, out: Color, max_arity: usize, max_size: usize) -> Vec<Label> {
        let mut v = Vec::new();
        if self.is_unit_color(out) {
            for n in 2..=max_arity {
                v.push(self.make(&Label::Unit(out), &vec![out; n]));
            }
            return v;
        }
        let mut base: Vec<Label> = vec![self.base.unit(out)];
        base.extend(self.base.elements(out, max_arity, max_size));
        for b in base {
            let s = self.base.sig(&b);
            let start = self.shape.src(s.ins[0]);
            for extra in 0..=max_arity - s.arity() {
                for ins in self.interleavings(&s.ins, extra, start) {
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
        Some(Lin::single(self.make(&b, &red_units(&ins, &self.units))))
    }

    fn pad(&self, x: &Label, ins: &[Color]) -> Option<Lin> {
        let (b, own) = self.split(x);
        if red_units(&own, &self.units) != red_units(ins, &self.units) {
            return None;
        }
        Some(Lin::single(self.make(&b, ins)))
    }
}
