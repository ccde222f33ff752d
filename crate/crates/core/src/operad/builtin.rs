//! Named operads and DG-categories: As, A, Ar_m(X), H, H₀, Triv(B), the retract
//! category and seeded random free 2-color operads.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Complex, DgSpace};
use crate::error::{Error, Result};
use crate::lin::{Color, Label, Lin};
use crate::linalg::q;
use crate::operad::free::{corolla, FreeOperad, Presented, PresentedOperad};
use crate::operad::{ColorSet, Operad, Sig};
use crate::tree::Tr;

/// The associative operad: one color, μ_n = `Int(n)` in arity n ≥ 2, μ_n ∘_i μ_m = μ_{n+m−1}.
#[derive(Clone, Copy, Debug, Default)]
pub struct Assoc;

static SINGLE: std::sync::OnceLock<ColorSet> = std::sync::OnceLock::new();

impl Operad for Assoc {
    fn name(&self) -> String {
        "As".into()
    }

    fn colors(&self) -> &ColorSet {
        SINGLE.get_or_init(ColorSet::single)
    }

    fn sig(&self, x: &Label) -> Sig {
        match x {
            Label::Unit(_) => Sig::new(vec![0], 0),
            Label::Int(n) => Sig::new(vec![0; *n as usize], 0),
            _ => panic!("{x} is not in As"),
        }
    }

    fn degree(&self, _x: &Label) -> i64 {
        0
    }

    /// μ_n has size n − 1, the number of binary products it takes.
    fn size(&self, x: &Label) -> usize {
        match x {
            Label::Int(n) => *n as usize - 1,
            _ => 0,
        }
    }

    fn diff_raw(&self, _x: &Label) -> Lin {
        Lin::zero()
    }

    fn compose_raw(&self, x: &Label, _i: usize, y: &Label) -> Lin {
        let (n, m) = (x.as_int().unwrap(), y.as_int().unwrap());
        Lin::single(Label::Int(n + m - 1))
    }

    fn elements(&self, _out: Color, max_arity: usize, max_size: usize) -> Vec<Label> {
        (2..=max_arity.min(max_size + 1)).map(|n| Label::Int(n as i64)).collect()
    }
}

/// A finite operad given by explicit basis, differential and composition tables.
/// Missing composition entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    pub name: String,
    pub colors: ColorSet,
    pub elems: Vec<(Label, Sig, i64)>,
    pub names: HashMap<Label, String>,
    index: HashMap<Label, usize>,
    pub diff: HashMap<Label, Lin>,
    pub comp: HashMap<(Label, usize, Label), Lin>,
}

impl Tabulated {
    pub fn new(name: &str, colors: ColorSet) -> Tabulated {
        Tabulated {
            name: name.into(),
            colors,
            elems: vec![],
            names: HashMap::new(),
            index: HashMap::new(),
            diff: HashMap::new(),
            comp: HashMap::new(),
        }
    }

    pub fn add(&mut self, name: &str, sig: Sig, degree: i64) -> Label {
        let l = Label::Gen(self.elems.len() as u32);
        self.index.insert(l.clone(), self.elems.len());
        self.elems.push((l.clone(), sig, degree));
        self.names.insert(l.clone(), name.into());
        l
    }

    pub fn set_diff(&mut self, x: &Label, d: Lin) {
        self.diff.insert(x.clone(), d);
    }

    pub fn set_comp(&mut self, x: &Label, i: usize, y: &Label, v: Lin) {
        self.comp.insert((x.clone(), i, y.clone()), v);
    }

    pub fn by_name(&self, name: &str) -> Option<Label> {
        self.elems.iter().find(|e| self.names[&e.0] == name).map(|e| e.0.clone())
    }

    pub fn show(&self, x: &Label) -> String {
        match x {
            Label::Unit(c) => format!("Id_{}", self.colors.names[*c as usize]),
            _ => self.names.get(x).cloned().unwrap_or_else(|| x.to_string()),
        }
    }
}

impl Operad for Tabulated {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn colors(&self) -> &ColorSet {
        &self.colors
    }

    fn sig(&self, x: &Label) -> Sig {
        match x {
            Label::Unit(c) => Sig::new(vec![*c], *c),
            _ => self.elems[self.index[x]].1.clone(),
        }
    }

    fn degree(&self, x: &Label) -> i64 {
        match x {
            Label::Unit(_) => 0,
            _ => self.elems[self.index[x]].2,
        }
    }

    fn diff_raw(&self, x: &Label) -> Lin {
        self.diff.get(x).cloned().unwrap_or_default()
    }

    fn compose_raw(&self, x: &Label, i: usize, y: &Label) -> Lin {
        self.comp.get(&(x.clone(), i, y.clone())).cloned().unwrap_or_default()
    }

    fn elements(&self, out: Color, max_arity: usize, max_size: usize) -> Vec<Label> {
        if max_size == 0 {
            return vec![];
        }
        self.elems
            .iter()
            .filter(|(_, s, _)| s.out == out && s.arity() <= max_arity)
            .map(|e| e.0.clone())
            .collect()
    }
}

/// The DG-category with one object and End(*) = k.
pub fn a_category() -> Tabulated {
    Tabulated::new("A", ColorSet::single())
}

/// Ar_m(X): colors s_1..s_m, t; the single polyhom (s_1..s_m; t) is X, plus units.
pub fn ar(m: usize, x: &Complex) -> Tabulated {
    let mut names: Vec<String> = (1..=m).map(|i| format!("s{i}")).collect();
    names.push("t".into());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut a = Tabulated::new(&format!("Ar_{m}"), ColorSet::new(&refs));
    let sig = Sig::new((0..m as Color).collect(), m as Color);
    let mut map = HashMap::new();
    for (l, deg) in x.labels() {
        let g = a.add(&l.to_string(), sig.clone(), deg);
        map.insert(l.clone(), g);
    }
    for (l, _) in x.labels() {
        let d = x.d(l).bind(|t| Lin::single(map[t].clone()));
        a.set_diff(&map[l], d);
    }
    a
}

/// Triv(B) of a DG-category given in arity one: the same data, nothing in higher arity.
pub fn triv(b: &Tabulated) -> Result<Tabulated> {
    if b.elems.iter().any(|(_, s, _)| s.arity() != 1) {
        return Err(Error::Validation("Triv expects a DG-category (arity one only)".into()));
    }
    let mut t = b.clone();
    t.name = format!("Triv({})", b.name);
    Ok(t)
}

/// The free DG-category H on f: 1→2, g: 2→1, r₁, r₂, r₁₂ with
/// dr₁ = gf − Id₁, dr₂ = fg − Id₂, dr₁₂ = f r₁ − r₂ f.
/// Sizes 1, 1, 2, 2, 3 bound words so that each generator's differential stays inside.
pub fn h_presented() -> Presented {
    let mut p = Presented::new("H", ColorSet::new(&["1", "2"]));
    let f = p.add("f", Sig::new(vec![0], 1), 0, 1);
    let g = p.add("g", Sig::new(vec![1], 0), 0, 1);
    let r1 = p.add("r1", Sig::new(vec![0], 0), -1, 2);
    let r2 = p.add("r2", Sig::new(vec![1], 1), -1, 2);
    let r12 = p.add("r12", Sig::new(vec![0], 1), -2, 3);
    let comp = |a: &Label, b: &Label| Label::tree(Tr { dec: a.clone(), ins: vec![Some(Tr::corolla(b.clone(), 1))] });
    p.set_diff(&r1, Lin::from_terms([(comp(&g, &f), q(1)), (Label::Unit(0), q(-1))]));
    p.set_diff(&r2, Lin::from_terms([(comp(&f, &g), q(1)), (Label::Unit(1), q(-1))]));
    p.set_diff(&r12, Lin::from_terms([(comp(&f, &r1), q(1)), (comp(&r2, &f), q(-1))]));
    p
}

pub fn h_category() -> PresentedOperad {
    FreeOperad::new(h_presented())
}

/// Restriction of an operad to a subset of its colors (full suboperad).
pub struct Restricted {
    pub base: Arc<dyn Operad>,
    /// new color → old color
    pub keep: Vec<Color>,
    colors: ColorSet,
    back: HashMap<Color, Color>,
}

impl Restricted {
    pub fn new(base: Arc<dyn Operad>, keep: Vec<Color>, name_suffix: &str) -> Restricted {
        let names: Vec<&str> = keep.iter().map(|&c| base.colors().names[c as usize].as_str()).collect();
        let mut colors = ColorSet::new(&names);
        colors.unit = base.colors().unit.and_then(|u| keep.iter().position(|&c| c == u).map(|p| p as Color));
        let back = keep.iter().enumerate().map(|(i, &c)| (c, i as Color)).collect();
        let _ = name_suffix;
        Restricted { base, keep, colors, back }
    }

    fn wrap(&self, x: &Label) -> Label {
        match x {
            Label::Unit(c) => Label::Unit(self.back[c]),
            _ => x.clone(),
        }
    }

    fn unwrap(&self, x: &Label) -> Label {
        match x {
            Label::Unit(c) => Label::Unit(self.keep[*c as usize]),
            _ => x.clone(),
        }
    }

    fn lin(&self, v: Lin) -> Lin {
        v.bind(|t| Lin::single(self.wrap(t)))
    }
}

impl Operad for Restricted {
    fn name(&self) -> String {
        format!("{}|{:?}", self.base.name(), self.keep)
    }

    fn colors(&self) -> &ColorSet {
        &self.colors
    }

    fn sig(&self, x: &Label) -> Sig {
        let s = self.base.sig(&self.unwrap(x));
        Sig::new(s.ins.iter().map(|c| self.back[c]).collect(), self.back[&s.out])
    }

    fn degree(&self, x: &Label) -> i64 {
        self.base.degree(&self.unwrap(x))
    }

    fn size(&self, x: &Label) -> usize {
        self.base.size(&self.unwrap(x))
    }

    fn weight(&self, x: &Label) -> usize {
        self.base.weight(&self.unwrap(x))
    }

    fn diff_raw(&self, x: &Label) -> Lin {
        self.lin(self.base.diff(&self.unwrap(x)))
    }

    fn compose_raw(&self, x: &Label, i: usize, y: &Label) -> Lin {
        self.lin(self.base.compose(&self.unwrap(x), i, &self.unwrap(y)))
    }

    fn elements(&self, out: Color, max_arity: usize, max_size: usize) -> Vec<Label> {
        self.base
            .elements(self.keep[out as usize], max_arity, max_size)
            .into_iter()
            .filter(|x| self.base.sig(x).ins.iter().all(|c| self.back.contains_key(c)))
            .collect()
    }
}

/// H₀: the one-object DG-category with End(*) = H(1,1).
pub fn h0_category() -> Restricted {
    Restricted::new(Arc::new(h_category()), vec![0], "H0")
}

/// Seeded random free 2-color operad. Generators split into cycles and non-cycles; a non-cycle's
/// differential combines cycles and compositions of two cycles, so d² = 0 holds by construction.
pub fn random_operad(seed: u64) -> PresentedOperad {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Presented::new(&format!("rand{seed}"), ColorSet::new(&["a", "b"]));
    let n_cycles = 3 + rng.gen_range(0..2);
    let mut cycles = Vec::new();
    for k in 0..n_cycles {
        let arity = if k == 0 { 2 } else { rng.gen_range(1..=3) };
        let ins: Vec<Color> = (0..arity).map(|_| rng.gen_range(0..2)).collect();
        let out = rng.gen_range(0..2);
        let deg = rng.gen_range(-1..=1);
        let g = p.add(&format!("c{k}"), Sig::new(ins, out), deg, 1);
        cycles.push(g);
    }
    let n_non = 2;
    for k in 0..n_non {
        // pick a composable pair of cycles
        let mut pairs = Vec::new();
        for a in &cycles {
            for b in &cycles {
                let sa = p.gen_sig_of(a);
                let sb = p.gen_sig_of(b);
                for i in 0..sa.arity() {
                    if sa.ins[i] == sb.out && sa.arity() + sb.arity() - 1 <= 4 {
                        pairs.push((a.clone(), i, b.clone()));
                    }
                }
            }
        }
        if pairs.is_empty() {
            let sig = p.gen_sig_of(&cycles[0]);
            let deg = p.degrees[0] - 1;
            let g = p.add(&format!("n{k}"), sig.clone(), deg, 1);
            p.set_diff(&g, Lin::term(corolla(cycles[0].clone(), sig.arity()), q(1)));
            continue;
        }
        let (a, i, b) = pairs[rng.gen_range(0..pairs.len())].clone();
        let sa = p.gen_sig_of(&a);
        let sb = p.gen_sig_of(&b);
        let sig = sa.compose(i, &sb);
        let deg = p.gen_degree_of(&a) + p.gen_degree_of(&b) - 1;
        let mut slots: Vec<Option<Tr<Label>>> = vec![None; sa.arity()];
        slots[i] = Some(Tr::corolla(b.clone(), sb.arity()));
        let mut d = Lin::term(Label::tree(Tr { dec: a.clone(), ins: slots }), q(rng.gen_range(1..=3)));
        for c in &cycles {
            if p.gen_sig_of(c) == sig && p.gen_degree_of(c) == deg + 1 {
                d.add_term(corolla(c.clone(), sig.arity()), q(rng.gen_range(-2..=2)));
            }
        }
        let g = p.add(&format!("n{k}"), sig, deg, 1);
        p.set_diff(&g, d);
    }
    FreeOperad::new(p)
}

impl Presented {
    pub fn gen_sig_of(&self, g: &Label) -> Sig {
        let Label::Gen(k) = g else { panic!("not a generator") };
        self.sigs[*k as usize].clone()
    }

    pub fn gen_degree_of(&self, g: &Label) -> i64 {
        let Label::Gen(k) = g else { panic!("not a generator") };
        self.degrees[*k as usize]
    }
}

/// The retract category: objects a, b with p: a→b, i: b→a, p∘i = id_b; basis id_a, id_b, p, i, ip.
pub fn retract_category() -> Tabulated {
    let mut c = Tabulated::new("Ret", ColorSet::new(&["a", "b"]));
    let p = c.add("p", Sig::new(vec![0], 1), 0);
    let i = c.add("i", Sig::new(vec![1], 0), 0);
    let e = c.add("ip", Sig::new(vec![0], 0), 0);
    // composition in arity one: x ∘_0 y = x·y (first y, then x)
    c.set_comp(&p, 0, &i, Lin::single(Label::Unit(1)));
    c.set_comp(&i, 0, &p, Lin::single(e.clone()));
    c.set_comp(&e, 0, &e, Lin::single(e.clone()));
    c.set_comp(&p, 0, &e, Lin::single(p.clone()));
    c.set_comp(&e, 0, &i, Lin::single(i.clone()));
    c
}

/// Objects 0, 1, 2; a: 0 → 1, b: 1 → 2, ba = b ∘ a, and h: 0 → 2 of degree −1 with dh = ba.
pub fn triangle_category() -> Tabulated {
    let mut c = Tabulated::new("Tri", ColorSet::new(&["0", "1", "2"]));
    let a = c.add("a", Sig::new(vec![0], 1), 0);
    let b = c.add("b", Sig::new(vec![1], 2), 0);
    let ba = c.add("ba", Sig::new(vec![0], 2), 0);
    let h = c.add("h", Sig::new(vec![0], 2), -1);
    c.set_comp(&b, 0, &a, Lin::single(ba.clone()));
    c.set_diff(&h, Lin::single(ba));
    c
}

/// A ⊕ (acyclic): one object, End = k·1 ⊕ ⟨u, v⟩ with du = v, all products of u, v zero.
pub fn a_plus_acyclic() -> Tabulated {
    let mut c = Tabulated::new("A+D", ColorSet::single());
    let u = c.add("u", Sig::new(vec![0], 0), -1);
    let v = c.add("v", Sig::new(vec![0], 0), 0);
    c.set_diff(&u, Lin::single(v));
    c
}

/// Builtins by name: `A`, `As`, `H`, `H0`, `Ar_m` (X = S(n) or D(n)), `Ret`, `Tri`, `Acyc`, `rand:<seed>`.
pub fn builtin(name: &str, m: usize, x: Option<&Complex>) -> Result<Arc<dyn Operad>> {
    Ok(match name {
        "A" => Arc::new(a_category()),
        "As" => Arc::new(Assoc),
        "H" => Arc::new(h_category()),
        "H0" => Arc::new(h0_category()),
        "Ret" => Arc::new(retract_category()),
        "Tri" => Arc::new(triangle_category()),
        "Acyc" => Arc::new(a_plus_acyclic()),
        "Ar" => {
            let x = x.ok_or_else(|| Error::UnknownName("Ar needs a complex".into()))?;
            Arc::new(ar(m, x))
        }
        s if s.starts_with("rand:") => {
            let seed: u64 = s[5..].parse().map_err(|_| Error::UnknownName(s.into()))?;
            Arc::new(random_operad(seed))
        }
        other => return Err(Error::UnknownName(other.into())),
    })
}
