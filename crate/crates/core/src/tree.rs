//! Planar rooted trees: enumeration, grafting, edge contraction and cutting with
//! Koszul bookkeeping, and the determinant complex of a tree.
//!
//! Internal edges are ordered by depth-first traversal from the root, children
//! left to right. The internal edge with index k is the output edge of the
//! (k+1)-th vertex in preorder.

use std::collections::HashMap;
use std::fmt;

use crate::complex::{Complex, FULL};
use crate::error::{Error, Result};
use crate::lin::{koszul_odd, sign, Label, Lin};

/// A planar tree; `None` slots are leaves.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Tr<D> {
    pub dec: D,
    pub ins: Vec<Option<Tr<D>>>,
}

pub type PlanarTree = Tr<()>;

impl<D: Clone> Tr<D> {
    pub fn corolla(dec: D, arity: usize) -> Tr<D> {
        Tr { dec, ins: vec![None; arity] }
    }

    pub fn leaves(&self) -> usize {
        self.ins.iter().map(|s| s.as_ref().map_or(1, |t| t.leaves())).sum()
    }

    pub fn vertices(&self) -> usize {
        1 + self.ins.iter().flatten().map(|t| t.vertices()).sum::<usize>()
    }

    pub fn internal_edges(&self) -> usize {
        self.vertices() - 1
    }

    pub fn preorder(&self) -> Vec<&D> {
        let mut out = Vec::new();
        self.walk(&mut |t| out.push(&t.dec));
        out
    }

    pub fn nodes(&self) -> Vec<&Tr<D>> {
        let mut out = Vec::new();
        self.walk(&mut |t| out.push(t));
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Tr<D>)) {
        f(self);
        for t in self.ins.iter().flatten() {
            t.walk(f);
        }
    }

    pub fn map<E>(&self, f: &mut impl FnMut(&D) -> E) -> Tr<E> {
        let dec = f(&self.dec);
        Tr { dec, ins: self.ins.iter().map(|s| s.as_ref().map(|t| t.map(f))).collect() }
    }

    pub fn shape(&self) -> PlanarTree {
        self.map(&mut |_| ())
    }

    /// Vertices numbered by preorder index.
    pub fn numbered(&self) -> Tr<usize> {
        let mut k = 0;
        self.map(&mut |_| {
            k += 1;
            k - 1
        })
    }

    /// Replaces leaf `leaf` (0-based, left to right) by `other`.
    pub fn graft(&self, leaf: usize, other: &Tr<D>) -> Tr<D> {
        let mut t = self.clone();
        let mut k = leaf;
        assert!(t.graft_mut(&mut k, other), "leaf index out of range");
        t
    }

    fn graft_mut(&mut self, k: &mut usize, other: &Tr<D>) -> bool {
        for slot in self.ins.iter_mut() {
            match slot {
                None => {
                    if *k == 0 {
                        *slot = Some(other.clone());
                        return true;
                    }
                    *k -= 1;
                }
                Some(t) => {
                    if t.graft_mut(k, other) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Parent preorder index and input slot of every non-root vertex, indexed by the child's preorder index.
    pub fn parents(&self) -> Vec<Option<(usize, usize)>> {
        let mut out = vec![None];
        fn go<D>(t: &Tr<D>, me: usize, out: &mut Vec<Option<(usize, usize)>>) {
            for (i, s) in t.ins.iter().enumerate() {
                if let Some(c) = s {
                    let id = out.len();
                    out.push(Some((me, i)));
                    go(c, id, out);
                }
            }
        }
        go(self, 0, &mut out);
        out
    }

    /// Subtree rooted at preorder index k.
    pub fn vertex(&self, k: usize) -> &Tr<D> {
        self.nodes()[k]
    }

    /// Leaves strictly before vertex k's subtree, in the planar order.
    pub fn leaves_before(&self, k: usize) -> usize {
        fn go<D: Clone>(t: &Tr<D>, target: usize, next: &mut usize, acc: &mut usize) -> bool {
            if *next == target {
                return true;
            }
            *next += 1;
            for s in &t.ins {
                match s {
                    None => *acc += 1,
                    Some(c) => {
                        if go(c, target, next, acc) {
                            return true;
                        }
                    }
                }
            }
            false
        }
        let (mut next, mut acc) = (0, 0);
        assert!(go(self, k, &mut next, &mut acc), "vertex index out of range");
        acc
    }

    /// Rebuilds the tree with the subtree at preorder index k replaced by `f(subtree)`.
    pub fn replace_at(&self, k: usize, f: &mut dyn FnMut(&Tr<D>) -> Option<Tr<D>>) -> Option<Tr<D>> {
        fn go<D: Clone>(
            t: &Tr<D>,
            target: usize,
            next: &mut usize,
            f: &mut dyn FnMut(&Tr<D>) -> Option<Tr<D>>,
        ) -> Option<Tr<D>> {
            if *next == target {
                *next += t.vertices();
                return f(t);
            }
            *next += 1;
            let mut ins = Vec::with_capacity(t.ins.len());
            for s in &t.ins {
                ins.push(match s {
                    None => None,
                    Some(c) => go(c, target, next, f),
                });
            }
            Some(Tr { dec: t.dec.clone(), ins })
        }
        let mut next = 0;
        go(self, k, &mut next, f)
    }

    /// Contracts internal edge `e` (the output edge of vertex e+1), merging the parent's and
    /// child's decorations with `merge(parent, slot, child)`.
    pub fn contract_with(&self, e: usize, merge: impl FnOnce(&D, usize, &D) -> D) -> Result<Tr<D>> {
        let parents = self.parents();
        let child = e + 1;
        let Some(Some((p, slot))) = parents.get(child).cloned() else {
            return Err(Error::ExternalEdge(e));
        };
        let c = self.vertex(child).clone();
        let mut merge = Some(merge);
        let out = self.replace_at(p, &mut |pt| {
            let mut ins = Vec::new();
            ins.extend(pt.ins[..slot].iter().cloned());
            ins.extend(c.ins.iter().cloned());
            ins.extend(pt.ins[slot + 1..].iter().cloned());
            let m = merge.take().unwrap();
            Some(Tr { dec: m(&pt.dec, slot, &c.dec), ins })
        });
        Ok(out.unwrap())
    }

    /// Cuts internal edge `e`: returns (lower tree with a leaf in place of the subtree,
    /// that leaf's index, the subtree).
    pub fn cut(&self, e: usize) -> Result<(Tr<D>, usize, Tr<D>)> {
        let child = e + 1;
        if child >= self.vertices() {
            return Err(Error::ExternalEdge(e));
        }
        let sub = self.vertex(child).clone();
        let pos = self.leaves_before(child);
        let low = self.replace_at(child, &mut |_| None).unwrap();
        Ok((low, pos, sub))
    }

    /// Replaces vertex k by the tree `s`, whose leaves receive k's inputs in order.
    pub fn substitute(&self, k: usize, s: &Tr<D>) -> Tr<D> {
        self.replace_at(k, &mut |v| {
            assert_eq!(v.ins.len(), s.leaves(), "substituted tree has wrong arity");
            let mut inputs = v.ins.iter().cloned();
            Some(fill_leaves(s, &mut inputs))
        })
        .unwrap()
    }
}

fn fill_leaves<D: Clone>(s: &Tr<D>, inputs: &mut impl Iterator<Item = Option<Tr<D>>>) -> Tr<D> {
    Tr {
        dec: s.dec.clone(),
        ins: s
            .ins
            .iter()
            .map(|slot| match slot {
                None => inputs.next().unwrap(),
                Some(c) => Some(fill_leaves(c, inputs)),
            })
            .collect(),
    }
}

impl<D: fmt::Display> fmt::Display for Tr<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dec)?;
        if !self.ins.is_empty() {
            write!(f, "(")?;
            for (i, s) in self.ins.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                match s {
                    None => write!(f, "|")?,
                    Some(t) => write!(f, "{t}")?,
                }
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}


/// Koszul parity of moving from the `before` id sequence to the `after` id sequence.
pub fn reorder_odd(before: &[usize], after: &[usize], degree: impl Fn(usize) -> i64) -> bool {
    let pos: HashMap<usize, usize> = before.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let degs: Vec<i64> = before.iter().map(|&x| degree(x)).collect();
    let order: Vec<usize> = after.iter().map(|x| pos[x]).collect();
    koszul_odd(&degs, &order)
}

/// All planar trees with the given numbers of leaves and vertices, every vertex of
/// arity ≥ `min_arity`, in a deterministic order.
pub fn enumerate_trees(n_leaves: usize, n_vertices: usize, min_arity: usize) -> Vec<PlanarTree> {
    let mut memo = HashMap::new();
    trees_rec(n_leaves, n_vertices, min_arity.max(1), &mut memo)
}

fn trees_rec(
    n: usize,
    v: usize,
    min_arity: usize,
    memo: &mut HashMap<(usize, usize), Vec<PlanarTree>>,
) -> Vec<PlanarTree> {
    if v == 0 || n == 0 {
        return Vec::new();
    }
    if let Some(r) = memo.get(&(n, v)) {
        return r.clone();
    }
    let mut out = Vec::new();
    for a in min_arity..=n {
        // distribute (leaves, vertices) among a slots; a slot is a leaf (1,0) or a tree
        let mut partial: Vec<(Vec<Option<PlanarTree>>, usize, usize)> = vec![(Vec::new(), 0, 0)];
        for _ in 0..a {
            let mut next = Vec::new();
            for (slots, ln, vn) in &partial {
                if ln + 1 <= n {
                    let mut s = slots.clone();
                    s.push(None);
                    next.push((s, ln + 1, *vn));
                }
                for sl in 1..=(n - ln) {
                    for sv in 1..=(v - 1 - vn).min(v) {
                        if vn + sv > v - 1 {
                            break;
                        }
                        for t in trees_rec(sl, sv, min_arity, memo) {
                            let mut s = slots.clone();
                            s.push(Some(t));
                            next.push((s, ln + sl, vn + sv));
                        }
                    }
                }
            }
            partial = next;
        }
        for (slots, ln, vn) in partial {
            if ln == n && vn == v - 1 {
                out.push(Tr { dec: (), ins: slots });
            }
        }
    }
    memo.insert((n, v), out.clone());
    out
}

/// Contraction of internal edge e with sign (−1)^e.
pub fn contract_edge(t: &PlanarTree, e: usize) -> Result<(PlanarTree, i64)> {
    let c = t.contract_with(e, |_, _, _| ())?;
    Ok((c, if e % 2 == 0 { 1 } else { -1 }))
}

/// Index that edge `f` of `t` receives in `t` with edge `e` contracted.
pub fn edge_after_contraction(e: usize, f: usize) -> usize {
    assert_ne!(e, f);
    if f > e {
        f - 1
    } else {
        f
    }
}

/// Subsets of internal edges of `t`, degree −|S|, d(S) = Σ_k (−1)^k (S \ s_k) over the
/// elements s_0 < s_1 < … of S.
pub fn det_complex(t: &PlanarTree) -> Complex {
    let m = t.internal_edges();
    let label = |s: u64| -> Label { Label::ints(&(0..m as i64).filter(|&e| s >> e & 1 == 1).collect::<Vec<_>>()) };
    let elems: Vec<(Label, i64)> = (0..1u64 << m).map(|s| (label(s), -(s.count_ones() as i64))).collect();
    Complex::new(
        elems,
        |l| {
            let es: Vec<i64> = l.as_seq().unwrap().iter().map(|x| x.as_int().unwrap()).collect();
            let mut out = Lin::zero();
            for k in 0..es.len() {
                let rest: Vec<i64> = es.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &e)| e).collect();
                out.add_term(Label::ints(&rest), sign(k % 2 == 1));
            }
            out
        },
        FULL,
    )
    .expect("simplex face complex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    fn catalan(n: usize) -> usize {
        let mut c = vec![1usize; n + 1];
        for i in 1..=n {
            c[i] = (0..i).map(|j| c[j] * c[i - 1 - j]).sum();
        }
        c[n]
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_trees(2, 1, 1).len(), 1);
        assert_eq!(enumerate_trees(4, 3, 2).len(), 5);
        assert_eq!(enumerate_trees(3, 2, 2).len(), 2);
        for n in 2..=7 {
            assert_eq!(enumerate_trees(n, n - 1, 2).len(), catalan(n - 1));
        }
        // unary vertices allowed at min_arity 1
        assert_eq!(enumerate_trees(1, 3, 1).len(), 1);
    }

    #[test]
    fn single_edge_contraction() {
        let t = Tr::corolla((), 2).graft(0, &Tr::corolla((), 2));
        let (c, s) = contract_edge(&t, 0).unwrap();
        assert_eq!(c, Tr::corolla((), 3));
        assert_eq!(s, 1);
        assert!(matches!(contract_edge(&t, 1), Err(Error::ExternalEdge(1))));
    }

    #[test]
    fn cut_and_graft_inverse() {
        for t in enumerate_trees(5, 3, 1) {
            for e in 0..t.internal_edges() {
                let (low, pos, sub) = t.cut(e).unwrap();
                assert_eq!(low.graft(pos, &sub), t);
            }
        }
    }

    #[test]
    fn det_complex_shapes() {
        let c = det_complex(&Tr::corolla((), 3));
        assert_eq!(c.homology(Field::Rational).unwrap(), [(0, 1)].into());
        let t = enumerate_trees(4, 4, 1).into_iter().next().unwrap();
        let d = det_complex(&t);
        assert_eq!(d.dims(), [(-3, 1), (-2, 3), (-1, 3), (0, 1)].into());
    }
}
