//! Chord diagrams on rooted labeled polygons, cells, gluing and the tree↔diagram bijection.
//!
//! A cell (e_1,…,e_n; b) is drawn as a polygon with vertices p_0,…,p_n, top edges
//! e_k: p_{k−1} → p_k and the bottom edge b: p_0 → p_n. A chord joins p_a and p_b
//! (a < b); several chords may join the same pair, stacked from the bottom side up.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lin::Color;
use crate::tree::Tr;

/// 0-cells, 1-cells with source and target, optional identity 1-cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub objects: Vec<String>,
    pub edges: Vec<(String, u32, u32)>,
    /// `units[i]` is the identity 1-cell of object i, when designated.
    pub units: Option<Vec<Color>>,
}

impl Shape {
    /// One object, the given 1-cell names all loops on it.
    pub fn single(names: &[&str]) -> Shape {
        Shape {
            objects: vec!["*".into()],
            edges: names.iter().map(|n| (n.to_string(), 0, 0)).collect(),
            units: None,
        }
    }

    pub fn src(&self, e: Color) -> u32 {
        self.edges[e as usize].1
    }

    pub fn tgt(&self, e: Color) -> u32 {
        self.edges[e as usize].2
    }

    pub fn edges_between(&self, i: u32, j: u32) -> Vec<Color> {
        (0..self.edges.len() as Color).filter(|&e| self.src(e) == i && self.tgt(e) == j).collect()
    }

    pub fn edge_by_name(&self, n: &str) -> Option<Color> {
        self.edges.iter().position(|e| e.0 == n).map(|p| p as Color)
    }

    pub fn is_path(&self, p: &[Color]) -> bool {
        p.windows(2).all(|w| self.tgt(w[0]) == self.src(w[1]))
    }

    pub fn is_unit(&self, e: Color) -> bool {
        self.units.as_ref().is_some_and(|u| u.contains(&e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cell {
    pub top: Vec<Color>,
    pub bot: Color,
}

impl Cell {
    pub fn new(top: Vec<Color>, bot: Color) -> Cell {
        Cell { top, bot }
    }

    pub fn is_valid(&self, shape: &Shape) -> bool {
        !self.top.is_empty()
            && shape.is_path(&self.top)
            && shape.src(self.top[0]) == shape.src(self.bot)
            && shape.tgt(*self.top.last().unwrap()) == shape.tgt(self.bot)
    }

    /// Polygon vertex labels p_0..p_n.
    pub fn vertex_labels(&self, shape: &Shape) -> Vec<u32> {
        let mut v = vec![shape.src(self.top[0])];
        v.extend(self.top.iter().map(|&e| shape.tgt(e)));
        v
    }
}

/// Splices `inner.top` into position k (1-based) of `outer.top`.
pub fn glue_cells(outer: &Cell, inner: &Cell, k: usize) -> Result<Cell> {
    if k == 0 || k > outer.top.len() || outer.top[k - 1] != inner.bot {
        return Err(Error::MismatchedEdge(format!("slot {k} of {:?} against bottom {}", outer.top, inner.bot)));
    }
    let mut top = outer.top[..k - 1].to_vec();
    top.extend(&inner.top);
    top.extend(&outer.top[k..]);
    Ok(Cell { top, bot: outer.bot })
}

/// Piece of a region's upper boundary: a top edge of the polygon or the lowest chord on a span.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopItem {
    Edge(usize),
    Chord(usize, usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    /// None for the root region (bounded below by the bottom edge).
    pub bottom: Option<(usize, usize, usize)>,
    pub top: Vec<TopItem>,
    pub cell: Cell,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChordDiagram {
    pub cell: Cell,
    /// span (a,b) ↦ labels of the stacked chords, bottom first.
    pub chords: BTreeMap<(usize, usize), Vec<Color>>,
}

impl ChordDiagram {
    pub fn trivial(cell: Cell) -> ChordDiagram {
        ChordDiagram { cell, chords: BTreeMap::new() }
    }

    pub fn chord_count(&self) -> usize {
        self.chords.values().map(|v| v.len()).sum()
    }

    pub fn cell_count(&self) -> usize {
        self.chord_count() + 1
    }

    /// Chords in canonical order: left endpoint ascending, right endpoint descending, stack bottom first.
    pub fn ordered_chords(&self) -> Vec<(usize, usize, usize)> {
        let mut v: Vec<(usize, usize, usize)> =
            self.chords.iter().flat_map(|(&(a, b), s)| (0..s.len()).map(move |l| (a, b, l))).collect();
        v.sort_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)).then(x.2.cmp(&y.2)));
        v
    }

    pub fn validate(&self, shape: &Shape) -> Result<()> {
        if !self.cell.is_valid(shape) {
            return Err(Error::InconsistentLabels(format!("cell {:?} is not a cell of the shape", self.cell)));
        }
        let n = self.cell.top.len();
        let pv = self.cell.vertex_labels(shape);
        for (&(a, b), stack) in &self.chords {
            if a >= b || b > n || stack.is_empty() {
                return Err(Error::InconsistentLabels(format!("bad chord span ({a},{b})")));
            }
            for &e in stack {
                if shape.src(e) != pv[a] || shape.tgt(e) != pv[b] {
                    return Err(Error::InconsistentLabels(format!("chord ({a},{b}) labeled {e}")));
                }
            }
        }
        for &(a, b) in self.chords.keys() {
            for &(c, d) in self.chords.keys() {
                if a < c && c < b && b < d {
                    return Err(Error::InconsistentLabels(format!("chords ({a},{b}) and ({c},{d}) cross")));
                }
            }
        }
        Ok(())
    }

    /// Regions in the preorder of the dual tree.
    pub fn regions(&self) -> Vec<Region> {
        let mut out = Vec::new();
        let n = self.cell.top.len();
        self.region_rec(None, 0, n, &mut out);
        out
    }

    fn top_items(&self, a: usize, b: usize, above: Option<usize>) -> Vec<TopItem> {
        let stack_len = self.chords.get(&(a, b)).map_or(0, |s| s.len());
        let next = above.map_or(0, |l| l + 1);
        if next < stack_len {
            return vec![TopItem::Chord(a, b, next)];
        }
        let mut items = Vec::new();
        let mut x = a;
        while x < b {
            let y = self
                .chords
                .range((x, x + 1)..=(x, b))
                .filter(|(&span, _)| span != (a, b))
                .map(|(&(_, y), _)| y)
                .max();
            match y {
                Some(y) => {
                    items.push(TopItem::Chord(x, y, 0));
                    x = y;
                }
                None => {
                    items.push(TopItem::Edge(x));
                    x += 1;
                }
            }
        }
        items
    }

    fn region_rec(&self, bottom: Option<(usize, usize, usize)>, a: usize, b: usize, out: &mut Vec<Region>) {
        let top = self.top_items(a, b, bottom.map(|c| c.2));
        let label = |it: &TopItem| match *it {
            TopItem::Edge(k) => self.cell.top[k],
            TopItem::Chord(x, y, l) => self.chords[&(x, y)][l],
        };
        let bot = match bottom {
            None => self.cell.bot,
            Some((x, y, l)) => self.chords[&(x, y)][l],
        };
        let cell = Cell { top: top.iter().map(label).collect(), bot };
        out.push(Region { bottom, top: top.clone(), cell });
        for it in top {
            if let TopItem::Chord(x, y, l) = it {
                self.region_rec(Some((x, y, l)), x, y, out);
            }
        }
    }

    /// Diagram with the given chord removed (regions on both sides merge).
    pub fn remove_chord(&self, c: (usize, usize, usize)) -> ChordDiagram {
        let mut d = self.clone();
        let stack = d.chords.get_mut(&(c.0, c.1)).unwrap();
        stack.remove(c.2);
        if stack.is_empty() {
            d.chords.remove(&(c.0, c.1));
        }
        d
    }

    /// Whether `other` arises by deleting chords of `self` (stacks as subsequences).
    pub fn refines(&self, other: &ChordDiagram) -> bool {
        self.cell == other.cell
            && other.chords.iter().all(|(span, sub)| {
                self.chords.get(span).is_some_and(|full| {
                    let mut it = full.iter();
                    sub.iter().all(|x| it.any(|y| y == x))
                })
            })
    }
}

impl fmt::Display for ChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?};{}[", self.cell.top, self.cell.bot)?;
        for (i, (a, b, l)) in self.ordered_chords().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}-{b}:{}", self.chords[&(a, b)][l])?;
        }
        write!(f, "]")
    }
}

/// Checks that an edge-labeled tree (vertex decoration = label of its output edge) is
/// consistent with the shape; leaves carry `leaves` left to right.
fn check_tree_labels(shape: &Shape, t: &Tr<Color>, leaves: &[Color]) -> Result<()> {
    let mut k = 0;
    fn go(shape: &Shape, t: &Tr<Color>, leaves: &[Color], k: &mut usize) -> Result<()> {
        let mut ins = Vec::new();
        for s in &t.ins {
            match s {
                None => {
                    let l = *leaves.get(*k).ok_or_else(|| Error::InconsistentLabels("too few leaf labels".into()))?;
                    *k += 1;
                    ins.push(l);
                }
                Some(c) => {
                    go(shape, c, leaves, k)?;
                    ins.push(c.dec);
                }
            }
        }
        if !Cell::new(ins.clone(), t.dec).is_valid(shape) {
            return Err(Error::InconsistentLabels(format!("vertex with inputs {ins:?} and output {}", t.dec)));
        }
        Ok(())
    }
    go(shape, t, leaves, &mut k)?;
    if k != leaves.len() {
        return Err(Error::InconsistentLabels("too many leaf labels".into()));
    }
    Ok(())
}

pub fn tree_to_diagram(shape: &Shape, t: &Tr<Color>, leaves: &[Color]) -> Result<ChordDiagram> {
    check_tree_labels(shape, t, leaves)?;
    let mut chords: BTreeMap<(usize, usize), Vec<Color>> = BTreeMap::new();
    for k in 1..t.vertices() {
        let a = t.leaves_before(k);
        let v = t.vertex(k);
        chords.entry((a, a + v.leaves())).or_default().push(v.dec);
    }
    let d = ChordDiagram { cell: Cell::new(leaves.to_vec(), t.dec), chords };
    d.validate(shape)?;
    Ok(d)
}

/// Inverse of `tree_to_diagram`: returns the edge-labeled tree and its leaf labels.
pub fn diagram_to_tree(d: &ChordDiagram) -> (Tr<Color>, Vec<Color>) {
    let regions = d.regions();
    let mut idx = 0;
    fn build(d: &ChordDiagram, regions: &[Region], idx: &mut usize) -> Tr<Color> {
        let r = &regions[*idx];
        *idx += 1;
        let ins = r
            .top
            .iter()
            .map(|it| match it {
                TopItem::Edge(_) => None,
                TopItem::Chord(..) => Some(build(d, regions, idx)),
            })
            .collect();
        Tr { dec: r.cell.bot, ins }
    }
    (build(d, &regions, &mut idx), d.cell.top.clone())
}

/// All decompositions of the cell's polygon into at most `max_cells` cells, by direct
/// enumeration of non-crossing labeled chord stacks.
pub fn enumerate_diagrams(shape: &Shape, cell: &Cell, max_cells: usize) -> Vec<ChordDiagram> {
    if !cell.is_valid(shape) || max_cells == 0 {
        return Vec::new();
    }
    let n = cell.top.len();
    let pv = cell.vertex_labels(shape);
    let spans: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
    let budget = max_cells - 1;
    let mut out = Vec::new();
    let mut cur: BTreeMap<(usize, usize), Vec<Color>> = BTreeMap::new();
    fn stacks(labels: &[Color], len: usize) -> Vec<Vec<Color>> {
        let mut acc = vec![Vec::new()];
        for _ in 0..len {
            acc = acc
                .into_iter()
                .flat_map(|s: Vec<Color>| {
                    labels.iter().map(move |&l| {
                        let mut t = s.clone();
                        t.push(l);
                        t
                    })
                })
                .collect();
        }
        acc
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        shape: &Shape,
        cell: &Cell,
        pv: &[u32],
        spans: &[(usize, usize)],
        k: usize,
        budget: usize,
        cur: &mut BTreeMap<(usize, usize), Vec<Color>>,
        out: &mut Vec<ChordDiagram>,
    ) {
        if k == spans.len() {
            out.push(ChordDiagram { cell: cell.clone(), chords: cur.clone() });
            return;
        }
        rec(shape, cell, pv, spans, k + 1, budget, cur, out);
        let (a, b) = spans[k];
        let crosses = cur.keys().any(|&(c, d)| (c < a && a < d && d < b) || (a < c && c < b && b < d));
        if crosses {
            return;
        }
        let labels = shape.edges_between(pv[a], pv[b]);
        for len in 1..=budget {
            for st in stacks(&labels, len) {
                cur.insert((a, b), st);
                rec(shape, cell, pv, spans, k + 1, budget - len, cur, out);
                cur.remove(&(a, b));
            }
        }
    }
    rec(shape, cell, &pv, &spans, 0, budget, &mut cur, &mut out);
    out.sort();
    out
}

/// Decomposition poset: the diagrams and all pairs (i, j) with diagrams[i] ≥ diagrams[j].
pub fn decompositions(shape: &Shape, cell: &Cell, max_cells: usize) -> (Vec<ChordDiagram>, Vec<(usize, usize)>) {
    let ds = enumerate_diagrams(shape, cell, max_cells);
    let mut rel = Vec::new();
    for (i, d) in ds.iter().enumerate() {
        for (j, e) in ds.iter().enumerate() {
            if d.refines(e) {
                rel.push((i, j));
            }
        }
    }
    (ds, rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_object() -> Shape {
        Shape {
            objects: vec!["0".into(), "1".into()],
            edges: vec![("a".into(), 0, 1), ("b".into(), 1, 0), ("u".into(), 0, 0), ("v".into(), 1, 1)],
            units: None,
        }
    }

    #[test]
    fn corolla_is_polygon() {
        let sh = Shape::single(&["s1", "s2", "s3", "t"]);
        let t = Tr { dec: 3, ins: vec![None, None, None] };
        let d = tree_to_diagram(&sh, &t, &[0, 1, 2]).unwrap();
        assert_eq!(d.cell, Cell::new(vec![0, 1, 2], 3));
        assert_eq!(d.chord_count(), 0);
        let u = Tr { dec: 1, ins: vec![None] };
        let b = tree_to_diagram(&sh, &u, &[0]).unwrap();
        assert_eq!(b.cell.top.len(), 1);
    }

    #[test]
    fn nested_example_round_trip() {
        // root u with inputs (t1, t2); t1 has inputs s1, s2; t2 has inputs s3, s4
        let sh = Shape::single(&["u", "t1", "t2", "s1", "s2", "s3", "s4"]);
        let t = Tr {
            dec: 0,
            ins: vec![Some(Tr { dec: 1, ins: vec![None, None] }), Some(Tr { dec: 2, ins: vec![None, None] })],
        };
        let d = tree_to_diagram(&sh, &t, &[3, 4, 5, 6]).unwrap();
        assert_eq!(d.chord_count(), 2);
        assert_eq!(d.cell.top.len(), 4);
        assert_eq!(diagram_to_tree(&d), (t, vec![3, 4, 5, 6]));
    }

    #[test]
    fn glue_example() {
        let sh = Shape::single(&["a", "b", "c", "d", "x", "y"]);
        let _ = sh;
        let g = glue_cells(&Cell::new(vec![0, 1, 2], 3), &Cell::new(vec![4, 5], 1), 2).unwrap();
        assert_eq!(g, Cell::new(vec![0, 4, 5, 2], 3));
        assert!(glue_cells(&Cell::new(vec![0, 1, 2], 3), &Cell::new(vec![4, 5], 0), 2).is_err());
        let same = glue_cells(&Cell::new(vec![0, 1, 2], 3), &Cell::new(vec![1], 1), 2).unwrap();
        assert_eq!(same, Cell::new(vec![0, 1, 2], 3));
    }

    #[test]
    fn diagrams_round_trip() {
        let sh = two_object();
        let cell = Cell::new(vec![0, 1, 0], 0);
        for d in enumerate_diagrams(&sh, &cell, 3) {
            let (t, leaves) = diagram_to_tree(&d);
            assert_eq!(tree_to_diagram(&sh, &t, &leaves).unwrap(), d);
        }
    }

    #[test]
    fn single_cell_bound() {
        let sh = two_object();
        let cell = Cell::new(vec![0, 1], 2);
        assert_eq!(enumerate_diagrams(&sh, &cell, 1).len(), 1);
    }
}
