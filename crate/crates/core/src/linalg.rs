//! Exact scalars over ℚ or 𝔽_p, sparse matrices and Gaussian elimination.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rational coefficients of all structure constants.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Field {
    #[default]
    Rational,
    Prime(u64),
}

impl Field {
    pub const DEFAULT_PRIME: u64 = 32003;

    /// Accepts `Q`, `Fp` and `Fp:p`.
    pub fn parse(s: &str) -> Option<Field> {
        match s {
            "Q" | "q" => Some(Field::Rational),
            "Fp" | "fp" => Some(Field::Prime(Self::DEFAULT_PRIME)),
            _ => {
                let p = s.strip_prefix("Fp:").or_else(|| s.strip_prefix("fp:"))?;
                let p: u64 = p.parse().ok()?;
                if p >= 2 && (2..).take_while(|k: &u64| k * k <= p).all(|k| p % k != 0) {
                    Some(Field::Prime(p))
                } else {
                    None
                }
            }
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(Q::zero()),
            Field::Prime(p) => Scalar::Fp(0, p),
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(Q::one()),
            Field::Prime(p) => Scalar::Fp(1 % p, p),
        }
    }

    pub fn int(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(q(n)),
            Field::Prime(p) => Scalar::Fp(n.rem_euclid(p as i64) as u64, p),
        }
    }

    /// Image of a rational number; fails if the denominator vanishes mod p.
    pub fn from_q(self, x: &Q) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Q(x.clone())),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let modp = |b: &BigInt| -> u64 {
                    let r = ((b % &pb) + &pb) % &pb;
                    r.to_u64().unwrap_or(0)
                };
                let n = modp(x.numer());
                let d = modp(x.denom());
                if d == 0 {
                    return Err(Error::NotInField(x.to_string()));
                }
                Ok(Scalar::Fp(mul_mod(n, inv_mod(d, p), p), p))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime.
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// A field element. `Fp(v, p)` keeps `0 <= v < p`; rationals are always reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(Q),
    Fp(u64, u64),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(x) => x.is_zero(),
            Scalar::Fp(v, _) => *v == 0,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::Fp(_, p) => Field::Prime(*p),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp(a, p), Scalar::Fp(b, _)) => Scalar::Fp((a + b) % p, *p),
            _ => panic!("mixed fields"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp(a, p) => Scalar::Fp((p - a) % p, *p),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp(a, p), Scalar::Fp(b, _)) => Scalar::Fp(mul_mod(*a, *b, *p), *p),
            _ => panic!("mixed fields"),
        }
    }

    /// Multiplicative inverse; `None` on zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::Fp(a, p) => Scalar::Fp(inv_mod(*a, *p), *p),
        })
    }

    /// Pivot preference: smaller is better (|numerator|, then denominator).
    fn pivot_cost(&self) -> (BigInt, BigInt) {
        match self {
            Scalar::Q(a) => (a.numer().abs(), a.denom().clone()),
            Scalar::Fp(_, _) => (BigInt::zero(), BigInt::zero()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(a) => write!(f, "{a}"),
            Scalar::Fp(a, _) => write!(f, "{a}"),
        }
    }
}

/// Sparse matrix; absent entries are zero and no zero is ever stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub field: Field,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize, field: Field) -> Self {
        SparseMatrix { rows, cols, field, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        let mut m = Self::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_ints(field: Field, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zero(rows.len(), cols, field);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, field.int(v));
            }
        }
        m
    }

    /// Builds a matrix from rational entries, converting into `field`.
    pub fn from_q_entries<'a>(
        field: Field,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, &'a Q)>,
    ) -> Result<Self> {
        let mut m = Self::zero(rows, cols, field);
        for (i, j, v) in entries {
            let s = field.from_q(v)?;
            m.add_to(i, j, &s);
        }
        Ok(m)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) {
        let cur = self.get(r, c);
        self.set(r, c, cur.add(v));
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (&(r, c), v) in &rhs.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = SparseMatrix::zero(self.rows, rhs.cols, self.field);
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add_to(i, j, &a.mul(b));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = SparseMatrix::zero(self.cols, self.rows, self.field);
        for (&(r, c), v) in &self.entries {
            out.entries.insert((c, r), v.clone());
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.rows];
        for (&(r, cc), x) in &self.entries {
            if cc == c {
                v[r] = x.clone();
            }
        }
        v
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![self.field.zero(); self.rows];
        for (&(r, c), x) in &self.entries {
            out[r] = out[r].add(&x.mul(&v[c]));
        }
        out
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, rows: usize, cols: &[Vec<Scalar>]) -> SparseMatrix {
        let mut m = SparseMatrix::zero(rows, cols.len(), field);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    fn sparse_rows(&self) -> Vec<BTreeMap<usize, Scalar>> {
        let mut rows = vec![BTreeMap::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].insert(c, v.clone());
        }
        rows
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest |numerator| among candidate rows (ties: smallest denominator, then lowest row).
    SmallestNumerator,
    /// Lowest-index candidate row.
    FirstNonzero,
    /// Highest-index candidate row.
    LastNonzero,
}

/// Reduced row echelon form. Returns pivot columns and the nonzero reduced rows.
fn rref(m: &SparseMatrix, rule: PivotRule, full: bool) -> (Vec<usize>, Vec<BTreeMap<usize, Scalar>>) {
    let mut rows: Vec<BTreeMap<usize, Scalar>> =
        m.sparse_rows().into_iter().filter(|r| !r.is_empty()).collect();
    let mut pivots = Vec::new();
    let mut done = 0usize;
    for col in 0..m.cols {
        let cands: Vec<usize> = (done..rows.len()).filter(|&r| rows[r].contains_key(&col)).collect();
        if cands.is_empty() {
            continue;
        }
        let pick = match rule {
            PivotRule::FirstNonzero => cands[0],
            PivotRule::LastNonzero => *cands.last().unwrap(),
            PivotRule::SmallestNumerator => *cands
                .iter()
                .min_by_key(|&&r| rows[r][&col].pivot_cost())
                .unwrap(),
        };
        rows.swap(done, pick);
        let inv = rows[done][&col].inv().expect("pivot is nonzero");
        let prow: BTreeMap<usize, Scalar> =
            rows[done].iter().map(|(&c, v)| (c, v.mul(&inv))).collect();
        rows[done] = prow.clone();
        let range: Vec<usize> = if full { (0..rows.len()).collect() } else { (done + 1..rows.len()).collect() };
        for r in range {
            if r == done {
                continue;
            }
            if let Some(f) = rows[r].get(&col).cloned() {
                for (&c, v) in &prow {
                    let nv = rows[r].get(&c).cloned().unwrap_or_else(|| m.field.zero()).sub(&f.mul(v));
                    if nv.is_zero() {
                        rows[r].remove(&c);
                    } else {
                        rows[r].insert(c, nv);
                    }
                }
            }
        }
        pivots.push(col);
        done += 1;
    }
    rows.truncate(done);
    (pivots, rows)
}

pub fn rank(m: &SparseMatrix) -> usize {
    rank_with(m, PivotRule::SmallestNumerator)
}

pub fn rank_with(m: &SparseMatrix, rule: PivotRule) -> usize {
    rref(m, rule, false).0.len()
}

/// Basis of ker(M) as dense column vectors; exactly `cols - rank` of them.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vec<Scalar>> {
    let (pivots, rows) = rref(m, PivotRule::SmallestNumerator, true);
    let is_pivot: BTreeMap<usize, usize> = pivots.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|c| !is_pivot.contains_key(c)) {
        let mut v = vec![m.field.zero(); m.cols];
        v[free] = m.field.one();
        for (ri, &pc) in pivots.iter().enumerate() {
            if let Some(x) = rows[ri].get(&free) {
                v[pc] = x.neg();
            }
        }
        out.push(v);
    }
    out
}

/// dim ker(d_out) − rank(d_in), after checking d_out ∘ d_in = 0.
pub fn homology_dims(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize> {
    if d_in.rows != d_out.cols {
        return Err(Error::CompositionNonzero(format!(
            "shape mismatch: d_in is {}x{}, d_out is {}x{}",
            d_in.rows, d_in.cols, d_out.rows, d_out.cols
        )));
    }
    let comp = d_out.mul(d_in);
    if !comp.is_zero() {
        let ((r, c), v) = comp.entries().next().map(|(k, v)| (*k, v.clone())).unwrap();
        return Err(Error::CompositionNonzero(format!("entry ({r},{c}) = {v}")));
    }
    Ok(d_out.cols - rank(d_out) - rank(d_in))
}

/// Rank of the span of a list of vectors of length `len`.
pub fn rank_of_columns(field: Field, len: usize, cols: &[Vec<Scalar>]) -> usize {
    rank(&SparseMatrix::from_columns(field, len, cols))
}

/// Solves `A x = b` where `A` is given by columns; `None` if inconsistent.
pub fn solve(field: Field, len: usize, cols: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let mut aug = SparseMatrix::from_columns(field, len, cols);
    aug.cols += 1;
    for (i, x) in b.iter().enumerate() {
        aug.set(i, cols.len(), x.clone());
    }
    let (pivots, rows) = rref(&aug, PivotRule::SmallestNumerator, true);
    if pivots.last() == Some(&cols.len()) {
        return None;
    }
    let mut x = vec![field.zero(); cols.len()];
    for (ri, &pc) in pivots.iter().enumerate() {
        x[pc] = rows[ri].get(&cols.len()).cloned().unwrap_or_else(|| field.zero());
    }
    Some(x)
}
