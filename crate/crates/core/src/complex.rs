//! Finite cochain complexes on labeled bases (cohomological: d has degree +1).

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lin::{is_odd, sign, Label, Lin};
use crate::linalg::{self, kernel_basis, q, Field, Scalar, SparseMatrix, Q};

/// Degrees in which a truncated construction is known to be exact.
pub const FULL: (i64, i64) = (i64::MIN / 4, i64::MAX / 4);

/// Desk-scale truncation bounds shared by all infinite constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub min_degree: i64,
    pub max_degree: i64,
    pub max_arity: usize,
    pub max_weight: usize,
}

impl Window {
    pub fn new(max_arity: usize, max_weight: usize) -> Window {
        Window { min_degree: -64, max_degree: 64, max_arity, max_weight }
    }

    /// Parses `a:wmin:wmax:dmin:dmax`; `wmin` is accepted for symmetry and must be ≤ `wmax`.
    pub fn parse(s: &str) -> Option<Window> {
        let p: Vec<&str> = s.split(':').collect();
        if p.len() != 5 {
            return None;
        }
        let a: usize = p[0].parse().ok()?;
        let wmin: usize = p[1].parse().ok()?;
        let wmax: usize = p[2].parse().ok()?;
        let dmin: i64 = p[3].parse().ok()?;
        let dmax: i64 = p[4].parse().ok()?;
        if a == 0 || wmax == 0 || wmin > wmax || dmin > dmax {
            return None;
        }
        Some(Window { min_degree: dmin, max_degree: dmax, max_arity: a, max_weight: wmax })
    }
}

/// Anything with a degree and a differential on labels.
pub trait DgSpace {
    fn degree(&self, l: &Label) -> i64;
    fn d(&self, l: &Label) -> Lin;
}

#[derive(Clone, Debug)]
pub struct Complex {
    basis: BTreeMap<i64, Vec<Label>>,
    index: HashMap<Label, (i64, usize)>,
    diff: HashMap<Label, Lin>,
    /// Degree range in which basis and differential are exact.
    pub complete: (i64, i64),
}

impl Complex {
    /// Builds a complex and checks that d stays in the basis, raises degree by one and squares to zero.
    pub fn new(
        elems: impl IntoIterator<Item = (Label, i64)>,
        d: impl Fn(&Label) -> Lin,
        complete: (i64, i64),
    ) -> Result<Complex> {
        Self::build(elems, d, complete, false)
    }

    /// Like `new`, but terms of d outside the basis are dropped (a quotient by the unlisted part).
    pub fn new_truncated(
        elems: impl IntoIterator<Item = (Label, i64)>,
        d: impl Fn(&Label) -> Lin,
        complete: (i64, i64),
    ) -> Result<Complex> {
        Self::build(elems, d, complete, true)
    }

    fn build(
        elems: impl IntoIterator<Item = (Label, i64)>,
        d: impl Fn(&Label) -> Lin,
        complete: (i64, i64),
        truncate: bool,
    ) -> Result<Complex> {
        let mut basis: BTreeMap<i64, Vec<Label>> = BTreeMap::new();
        let mut seen: HashMap<Label, i64> = HashMap::new();
        for (l, deg) in elems {
            if let Some(&old) = seen.get(&l) {
                if old != deg {
                    return Err(Error::DegreeMismatch(format!("{l} listed in degrees {old} and {deg}")));
                }
                continue;
            }
            seen.insert(l.clone(), deg);
            basis.entry(deg).or_default().push(l);
        }
        let mut index = HashMap::new();
        for (deg, ls) in basis.iter_mut() {
            ls.sort();
            for (i, l) in ls.iter().enumerate() {
                index.insert(l.clone(), (*deg, i));
            }
        }
        let mut diff = HashMap::new();
        for (l, &(deg, _)) in &index {
            let mut dl = Lin::zero();
            for (t, c) in d(l).iter() {
                match index.get(t) {
                    Some(&(dt, _)) if dt == deg + 1 => dl.add_term(t.clone(), c.clone()),
                    Some(&(dt, _)) => {
                        return Err(Error::DegreeMismatch(format!("d({l}) has term {t} in degree {dt}, expected {}", deg + 1)))
                    }
                    None if truncate => {}
                    None => return Err(Error::Validation(format!("d({l}) leaves the basis at {t}"))),
                }
            }
            if !dl.is_zero() {
                diff.insert(l.clone(), dl);
            }
        }
        let c = Complex { basis, index, diff, complete };
        for l in c.index.keys() {
            let dd = c.d(l).bind(|t| c.d(t));
            if !dd.is_zero() {
                return Err(Error::DifferentialSquare(format!("{l}: d^2 = {dd}")));
            }
        }
        Ok(c)
    }

    pub fn zero() -> Complex {
        Complex { basis: BTreeMap::new(), index: HashMap::new(), diff: HashMap::new(), complete: FULL }
    }

    /// k in degree n.
    pub fn sphere(n: i64) -> Complex {
        Complex::new([(Label::Gen(0), n)], |_| Lin::zero(), FULL).expect("S(n) is a complex")
    }

    /// id: k → k from degree n−1 to degree n.
    pub fn disk(n: i64) -> Complex {
        Complex::new(
            [(Label::Gen(0), n - 1), (Label::Gen(1), n)],
            |l| if *l == Label::Gen(0) { Lin::single(Label::Gen(1)) } else { Lin::zero() },
            FULL,
        )
        .expect("D(n) is a complex")
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.basis.iter().map(|(&d, v)| (d, v.len())).collect()
    }

    pub fn basis_in(&self, deg: i64) -> &[Label] {
        self.basis.get(&deg).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn labels(&self) -> impl Iterator<Item = (&Label, i64)> {
        self.basis.iter().flat_map(|(&d, v)| v.iter().map(move |l| (l, d)))
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.index.contains_key(l)
    }

    pub fn degree_of(&self, l: &Label) -> Option<i64> {
        self.index.get(l).map(|x| x.0)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.basis.keys().copied().collect()
    }

    /// Coordinate vector of a combination of degree-`deg` labels.
    pub fn coords(&self, deg: i64, v: &Lin, field: Field) -> Result<Vec<Scalar>> {
        let mut out = vec![field.zero(); self.basis_in(deg).len()];
        for (l, c) in v.iter() {
            match self.index.get(l) {
                Some(&(dd, i)) if dd == deg => out[i] = out[i].add(&field.from_q(c)?),
                _ => return Err(Error::Validation(format!("{l} is not a degree-{deg} basis element"))),
            }
        }
        Ok(out)
    }

    /// Matrix of d: C^deg → C^{deg+1}.
    pub fn matrix(&self, deg: i64, field: Field) -> Result<SparseMatrix> {
        let src = self.basis_in(deg);
        let tgt = self.basis_in(deg + 1);
        let mut m = SparseMatrix::zero(tgt.len(), src.len(), field);
        for (j, l) in src.iter().enumerate() {
            for (t, c) in self.d(l).iter() {
                let (_, i) = self.index[t];
                m.add_to(i, j, &field.from_q(c)?);
            }
        }
        Ok(m)
    }

    pub fn homology_in(&self, deg: i64, field: Field) -> Result<usize> {
        linalg::homology_dims(&self.matrix(deg - 1, field)?, &self.matrix(deg, field)?)
    }

    /// Homology dimensions in every degree that carries basis elements.
    pub fn homology(&self, field: Field) -> Result<BTreeMap<i64, usize>> {
        let mut out = BTreeMap::new();
        for deg in self.degrees() {
            out.insert(deg, self.homology_in(deg, field)?);
        }
        Ok(out)
    }

    pub fn is_acyclic(&self, field: Field) -> Result<bool> {
        Ok(self.homology(field)?.values().all(|&h| h == 0))
    }

    /// (ΣᵏC)^i = C^{i+k}, with d multiplied by (−1)^k.
    pub fn shift(&self, k: i64) -> Complex {
        let s = sign(is_odd(k));
        let elems: Vec<(Label, i64)> = self.labels().map(|(l, d)| (l.clone(), d - k)).collect();
        let lo = self.complete.0.saturating_sub(k);
        let hi = self.complete.1.saturating_sub(k);
        Complex::new(elems, |l| self.d(l).scaled(&s), (lo, hi)).expect("shift preserves d^2 = 0")
    }

    /// Tensor product with labels ⟨a,b⟩ and d(a⊗b) = da⊗b + (−1)^{|a|} a⊗db.
    pub fn tensor(&self, other: &Complex) -> Complex {
        let mut elems = Vec::new();
        for (a, da) in self.labels() {
            for (b, db) in other.labels() {
                elems.push((Label::seq(vec![a.clone(), b.clone()]), da + db));
            }
        }
        let complete = if self.complete == FULL && other.complete == FULL { FULL } else { (0, -1) };
        Complex::new(
            elems,
            |l| {
                let s = l.as_seq().unwrap();
                let (a, b) = (&s[0], &s[1]);
                let mut out = Lin::zero();
                for (x, c) in self.d(a).iter() {
                    out.add_term(Label::seq(vec![x.clone(), b.clone()]), c.clone());
                }
                let e = sign(is_odd(self.index[a].0));
                for (y, c) in other.d(b).iter() {
                    out.add_term(Label::seq(vec![a.clone(), y.clone()]), &e * c);
                }
                out
            },
            complete,
        )
        .expect("tensor of complexes is a complex")
    }

    /// Direct sum, summand k tagged by k.
    pub fn direct_sum(parts: &[&Complex]) -> Complex {
        let mut elems = Vec::new();
        let mut lo = FULL.0;
        let mut hi = FULL.1;
        for (k, p) in parts.iter().enumerate() {
            for (l, d) in p.labels() {
                elems.push((Label::tag(k as u32, l.clone()), d));
            }
            lo = lo.max(p.complete.0);
            hi = hi.min(p.complete.1);
        }
        Complex::new(
            elems,
            |l| {
                let (k, x) = l.untag().unwrap();
                let mut out = Lin::zero();
                for (y, c) in parts[k as usize].d(x).iter() {
                    out.add_term(Label::tag(k, y.clone()), c.clone());
                }
                out
            },
            (lo, hi),
        )
        .expect("direct sum of complexes is a complex")
    }
}

impl DgSpace for Complex {
    fn degree(&self, l: &Label) -> i64 {
        self.index.get(l).map(|x| x.0).unwrap_or_else(|| panic!("{l} not in complex"))
    }

    fn d(&self, l: &Label) -> Lin {
        self.diff.get(l).cloned().unwrap_or_default()
    }
}

/// Degree-0 map between complexes commuting with the differentials.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub src: Complex,
    pub tgt: Complex,
    f: BTreeMap<Label, Lin>,
}

impl ChainMap {
    pub fn new(src: Complex, tgt: Complex, f: impl Fn(&Label) -> Lin) -> Result<ChainMap> {
        let mut map = BTreeMap::new();
        for (l, deg) in src.labels() {
            let v = f(l);
            for t in v.labels() {
                match tgt.degree_of(t) {
                    Some(dt) if dt == deg => {}
                    Some(dt) => return Err(Error::DegreeMismatch(format!("{l} ↦ {t} changes degree {deg} → {dt}"))),
                    None => return Err(Error::Validation(format!("{l} ↦ {t} outside target"))),
                }
            }
            if !v.is_zero() {
                map.insert(l.clone(), v);
            }
        }
        let m = ChainMap { src, tgt, f: map };
        for (l, _) in m.src.labels() {
            let lhs = m.tgt_d_apply(l);
            let rhs = m.apply(&m.src.d(l));
            if lhs != rhs {
                return Err(Error::NotChainMap(format!("at {l}: d f = {lhs}, f d = {rhs}")));
            }
        }
        Ok(m)
    }

    pub fn identity(c: &Complex) -> ChainMap {
        ChainMap::new(c.clone(), c.clone(), |l| Lin::single(l.clone())).expect("identity is a chain map")
    }

    fn tgt_d_apply(&self, l: &Label) -> Lin {
        self.at(l).bind(|t| self.tgt.d(t))
    }

    pub fn at(&self, l: &Label) -> Lin {
        self.f.get(l).cloned().unwrap_or_default()
    }

    pub fn apply(&self, v: &Lin) -> Lin {
        v.bind(|l| self.at(l))
    }

    pub fn matrix(&self, deg: i64, field: Field) -> Result<SparseMatrix> {
        let src = self.src.basis_in(deg);
        let tgt = self.tgt.basis_in(deg);
        let mut m = SparseMatrix::zero(tgt.len(), src.len(), field);
        for (j, l) in src.iter().enumerate() {
            let col = self.tgt.coords(deg, &self.at(l), field)?;
            for (i, x) in col.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    /// Cone(f)^n = K^{n+1} ⊕ L^n, D(k,l) = (−d_K k, f(k) + d_L l); summands tagged 0 and 1.
    pub fn cone(&self) -> Complex {
        let mut elems = Vec::new();
        for (k, d) in self.src.labels() {
            elems.push((Label::tag(0, k.clone()), d - 1));
        }
        for (l, d) in self.tgt.labels() {
            elems.push((Label::tag(1, l.clone()), d));
        }
        let lo = self.src.complete.0.saturating_sub(1).max(self.tgt.complete.0);
        let hi = self.src.complete.1.saturating_sub(1).min(self.tgt.complete.1);
        Complex::new(
            elems,
            |x| {
                let (tag, y) = x.untag().unwrap();
                let mut out = Lin::zero();
                if tag == 0 {
                    for (t, c) in self.src.d(y).iter() {
                        out.add_term(Label::tag(0, t.clone()), -c.clone());
                    }
                    for (t, c) in self.at(y).iter() {
                        out.add_term(Label::tag(1, t.clone()), c.clone());
                    }
                } else {
                    for (t, c) in self.tgt.d(y).iter() {
                        out.add_term(Label::tag(1, t.clone()), c.clone());
                    }
                }
                out
            },
            (lo, hi),
        )
        .expect("cone of a chain map is a complex")
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct QisoCertificate {
    /// degree → (dim H source, dim H target, rank of induced map)
    pub per_degree: BTreeMap<i64, (usize, usize, usize)>,
    pub is_quasi_iso: bool,
}

/// Decides whether f induces an isomorphism on homology in degrees lo..=hi.
pub fn is_quasi_iso(f: &ChainMap, safe: (i64, i64), field: Field) -> Result<QisoCertificate> {
    let (lo, hi) = safe;
    for (name, c) in [("source", &f.src), ("target", &f.tgt)] {
        if c.complete.0 > lo - 1 || c.complete.1 < hi + 1 {
            return Err(Error::WindowTooNarrow(format!(
                "{name} is exact on {:?}, need [{}, {}]",
                c.complete,
                lo - 1,
                hi + 1
            )));
        }
    }
    let mut per_degree = BTreeMap::new();
    let mut ok = true;
    for deg in lo..=hi {
        let hs = f.src.homology_in(deg, field)?;
        let ht = f.tgt.homology_in(deg, field)?;
        let z = kernel_basis(&f.src.matrix(deg, field)?);
        let fm = f.matrix(deg, field)?;
        let bt = f.tgt.matrix(deg - 1, field)?;
        let n = f.tgt.basis_in(deg).len();
        let mut cols: Vec<Vec<Scalar>> = (0..bt.cols).map(|j| bt.column(j)).collect();
        let rb = linalg::rank_of_columns(field, n, &cols);
        cols.extend(z.iter().map(|v| fm.apply(v)));
        let rank = linalg::rank_of_columns(field, n, &cols) - rb;
        if !(hs == ht && ht == rank) {
            ok = false;
        }
        per_degree.insert(deg, (hs, ht, rank));
    }
    Ok(QisoCertificate { per_degree, is_quasi_iso: ok })
}

/// Homogeneous linear map given on basis labels.
pub struct GradedMap<'a> {
    pub degree: i64,
    pub f: Box<dyn Fn(&Label) -> Lin + 'a>,
}

impl<'a> GradedMap<'a> {
    pub fn new(degree: i64, f: impl Fn(&Label) -> Lin + 'a) -> Self {
        GradedMap { degree, f: Box::new(f) }
    }

    pub fn zero(degree: i64) -> Self {
        GradedMap::new(degree, |_| Lin::zero())
    }

    pub fn apply(&self, v: &Lin) -> Lin {
        v.bind(|l| (self.f)(l))
    }
}

/// Checks df = dg = 0, dr1 = gf − Id, dr2 = fg − Id, dr12 = f r1 − r2 f on the given test bases,
/// where f: C1→C2, g: C2→C1, r1 on C1, r2 on C2, r12: C1→C2.
#[allow(clippy::too_many_arguments)]
pub fn verify_homotopy_data(
    c1: &dyn DgSpace,
    b1: &[Label],
    c2: &dyn DgSpace,
    b2: &[Label],
    f: &GradedMap,
    g: &GradedMap,
    r1: &GradedMap,
    r2: &GradedMap,
    r12: &GradedMap,
) -> Result<bool> {
    for (name, m, want) in [("f", f, 0), ("g", g, 0), ("r1", r1, -1), ("r2", r2, -1), ("r12", r12, -2)] {
        if m.degree != want {
            return Err(Error::DegreeMismatch(format!("{name} has degree {}, expected {want}", m.degree)));
        }
    }
    let check_deg = |name: &str, m: &GradedMap, src: &dyn DgSpace, tgt: &dyn DgSpace, basis: &[Label]| -> Result<()> {
        for x in basis {
            for t in (m.f)(x).labels() {
                if tgt.degree(t) != src.degree(x) + m.degree {
                    return Err(Error::DegreeMismatch(format!("{name}({x}) contains {t}")));
                }
            }
        }
        Ok(())
    };
    check_deg("f", f, c1, c2, b1)?;
    check_deg("g", g, c2, c1, b2)?;
    check_deg("r1", r1, c1, c1, b1)?;
    check_deg("r2", r2, c2, c2, b2)?;
    check_deg("r12", r12, c1, c2, b1)?;
    // d_Hom(h) = d∘h − (−1)^{|h|} h∘d
    let dhom = |m: &GradedMap, src: &dyn DgSpace, tgt: &dyn DgSpace, x: &Label| -> Lin {
        let mut v = (m.f)(x).bind(|t| tgt.d(t));
        v.axpy(&-sign(is_odd(m.degree)), &m.apply(&src.d(x)));
        v
    };
    let one = q(1);
    for x in b1 {
        if !dhom(f, c1, c2, x).is_zero() {
            return Ok(false);
        }
        let mut want = g.apply(&(f.f)(x));
        want.add_term(x.clone(), -one.clone());
        if dhom(r1, c1, c1, x) != want {
            return Ok(false);
        }
        let mut want = f.apply(&(r1.f)(x));
        want.axpy(&q(-1), &r2.apply(&(f.f)(x)));
        if dhom(r12, c1, c2, x) != want {
            return Ok(false);
        }
    }
    for y in b2 {
        if !dhom(g, c2, c1, y).is_zero() {
            return Ok(false);
        }
        let mut want = f.apply(&(g.f)(y));
        want.add_term(y.clone(), -one.clone());
        if dhom(r2, c2, c2, y) != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Scalar multiple of the identity as a chain map.
pub fn scalar_map(c: &Complex, s: &Q) -> ChainMap {
    ChainMap::new(c.clone(), c.clone(), |l| Lin::term(l.clone(), s.clone())).expect("scalar map is a chain map")
}

pub fn zero_map(src: &Complex, tgt: &Complex) -> ChainMap {
    ChainMap::new(src.clone(), tgt.clone(), |_| Lin::zero()).expect("zero map is a chain map")
}

pub fn is_zero_q(x: &Q) -> bool {
    x.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    const QF: Field = Field::Rational;

    #[test]
    fn spheres_and_disks() {
        let s = Complex::sphere(3);
        assert_eq!(s.homology(QF).unwrap(), BTreeMap::from([(3, 1)]));
        let d = Complex::disk(2);
        assert!(d.is_acyclic(QF).unwrap());
        assert_eq!(d.dims(), BTreeMap::from([(1, 1), (2, 1)]));
    }

    #[test]
    fn shift_examples() {
        let s = Complex::sphere(2).shift(1);
        assert_eq!(s.dims(), BTreeMap::from([(1, 1)]));
        let d = Complex::disk(1);
        let back = d.shift(1).shift(-1);
        assert_eq!(back.dims(), d.dims());
        assert_eq!(back.d(&Label::Gen(0)), d.d(&Label::Gen(0)));
        assert_eq!(d.shift(0).d(&Label::Gen(0)), d.d(&Label::Gen(0)));
    }

    #[test]
    fn cone_examples() {
        let s = Complex::sphere(0);
        assert!(ChainMap::identity(&s).cone().is_acyclic(QF).unwrap());
        assert!(scalar_map(&s, &q(2)).cone().is_acyclic(QF).unwrap());
        let z = zero_map(&s, &s).cone();
        assert_eq!(z.homology(QF).unwrap(), BTreeMap::from([(-1, 1), (0, 1)]));
    }

    #[test]
    fn tensor_examples() {
        let t = Complex::sphere(2).tensor(&Complex::sphere(-5));
        assert_eq!(t.homology(QF).unwrap(), BTreeMap::from([(-3, 1)]));
        let dd = Complex::disk(1).tensor(&Complex::disk(1));
        assert_eq!(dd.dim(), 4);
        assert!(dd.is_acyclic(QF).unwrap());
        // |v| = 1 in the left factor: coefficient −1 on v ⊗ dw
        let v = Label::Gen(1);
        let w = Label::Gen(0);
        let dv = dd.d(&Label::seq(vec![v.clone(), w]));
        assert_eq!(dv.coeff(&Label::seq(vec![v, Label::Gen(1)])), q(-1));
    }

    #[test]
    fn d_squared_rejected() {
        let r = Complex::new(
            [(Label::Gen(0), 0), (Label::Gen(1), 1), (Label::Gen(2), 2)],
            |l| match l {
                Label::Gen(0) => Lin::single(Label::Gen(1)),
                Label::Gen(1) => Lin::single(Label::Gen(2)),
                _ => Lin::zero(),
            },
            FULL,
        );
        assert!(matches!(r, Err(Error::DifferentialSquare(_))));
    }

    #[test]
    fn quasi_iso_examples() {
        let s = Complex::sphere(0);
        let c = is_quasi_iso(&ChainMap::identity(&s), (-1, 1), QF).unwrap();
        assert!(c.is_quasi_iso);
        let d = Complex::disk(1);
        let z = zero_map(&s, &d);
        assert!(!is_quasi_iso(&z, (-1, 1), QF).unwrap().is_quasi_iso);
        let mut narrow = s.clone();
        narrow.complete = (0, 0);
        assert!(matches!(
            is_quasi_iso(&ChainMap::identity(&narrow), (0, 0), QF),
            Err(Error::WindowTooNarrow(_))
        ));
    }

    #[test]
    fn homotopy_data_identity() {
        let c = Complex::disk(1).tensor(&Complex::sphere(0));
        let b: Vec<Label> = c.labels().map(|(l, _)| l.clone()).collect();
        let id = GradedMap::new(0, |l| Lin::single(l.clone()));
        let id2 = GradedMap::new(0, |l| Lin::single(l.clone()));
        let ok = verify_homotopy_data(
            &c,
            &b,
            &c,
            &b,
            &id,
            &id2,
            &GradedMap::zero(-1),
            &GradedMap::zero(-1),
            &GradedMap::zero(-2),
        )
        .unwrap();
        assert!(ok);
        let bad = verify_homotopy_data(
            &c,
            &b,
            &c,
            &b,
            &GradedMap::zero(1),
            &id2,
            &GradedMap::zero(-1),
            &GradedMap::zero(-1),
            &GradedMap::zero(-2),
        );
        assert!(matches!(bad, Err(Error::DegreeMismatch(_))));
    }
}
