//! Basis labels, finite linear combinations and Koszul signs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::linalg::{q, Q};
use crate::tree::Tr;

pub type Color = u32;

/// Opaque structured basis label. The derived total order fixes every matrix ordering.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    Unit(Color),
    Gen(u32),
    Int(i64),
    Seq(Arc<[Label]>),
    Tree(Arc<Tr<Label>>),
    Tag(u32, Arc<Label>),
}

impl Label {
    pub fn seq(items: Vec<Label>) -> Label {
        Label::Seq(items.into())
    }

    pub fn tree(t: Tr<Label>) -> Label {
        Label::Tree(Arc::new(t))
    }

    pub fn tag(k: u32, l: Label) -> Label {
        Label::Tag(k, Arc::new(l))
    }

    pub fn ints(v: &[i64]) -> Label {
        Label::seq(v.iter().map(|&x| Label::Int(x)).collect())
    }

    pub fn as_seq(&self) -> Option<&[Label]> {
        match self {
            Label::Seq(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_tree(&self) -> Option<&Tr<Label>> {
        match self {
            Label::Tree(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Label::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn untag(&self) -> Option<(u32, &Label)> {
        match self {
            Label::Tag(k, l) => Some((*k, l)),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Unit(c) => write!(f, "1_{c}"),
            Label::Gen(g) => write!(f, "g{g}"),
            Label::Int(n) => write!(f, "{n}"),
            Label::Seq(s) => {
                write!(f, "<")?;
                for (i, x) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ">")
            }
            Label::Tree(t) => write!(f, "{t}"),
            Label::Tag(k, l) => write!(f, "#{k}:{l}"),
        }
    }
}

/// Finite linear combination of labels with rational coefficients; zero terms never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lin(BTreeMap<Label, Q>);

impl Lin {
    pub fn zero() -> Lin {
        Lin(BTreeMap::new())
    }

    pub fn single(l: Label) -> Lin {
        Lin::term(l, Q::one())
    }

    pub fn term(l: Label, c: Q) -> Lin {
        let mut m = Lin::zero();
        m.add_term(l, c);
        m
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Label, Q)>) -> Lin {
        let mut m = Lin::zero();
        for (l, c) in terms {
            m.add_term(l, c);
        }
        m
    }

    pub fn add_term(&mut self, l: Label, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&l) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.0.remove(&l);
                }
            }
            None => {
                self.0.insert(l, c);
            }
        }
    }

    /// self += c * other
    pub fn axpy(&mut self, c: &Q, other: &Lin) {
        if c.is_zero() {
            return;
        }
        for (l, v) in &other.0 {
            self.add_term(l.clone(), c * v);
        }
    }

    pub fn add(&mut self, other: &Lin) {
        self.axpy(&Q::one(), other);
    }

    pub fn scaled(&self, c: &Q) -> Lin {
        let mut m = Lin::zero();
        m.axpy(c, self);
        m
    }

    pub fn neg(&self) -> Lin {
        self.scaled(&q(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, l: &Label) -> Q {
        self.0.get(l).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Q)> {
        self.0.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.0.keys()
    }

    /// Linear extension of a map on labels.
    pub fn bind(&self, mut f: impl FnMut(&Label) -> Lin) -> Lin {
        let mut out = Lin::zero();
        for (l, c) in &self.0 {
            out.axpy(c, &f(l));
        }
        out
    }

    pub fn sub(&self, other: &Lin) -> Lin {
        let mut m = self.clone();
        m.axpy(&q(-1), other);
        m
    }
}

impl fmt::Display for Lin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (l, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{l}")?;
        }
        Ok(())
    }
}

pub fn sign(odd: bool) -> Q {
    if odd {
        q(-1)
    } else {
        q(1)
    }
}

pub fn is_odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

/// Koszul sign of reordering items of the given degrees: `order[k]` is the
/// source index of the item placed at position `k`. Returns true when odd.
pub fn koszul_odd(degrees: &[i64], order: &[usize]) -> bool {
    debug_assert_eq!(degrees.len(), order.len());
    let mut odd = false;
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            // order[a] now precedes order[b]; an inversion swaps them.
            if order[a] > order[b] && is_odd(degrees[order[a]]) && is_odd(degrees[order[b]]) {
                odd = !odd;
            }
        }
    }
    odd
}
