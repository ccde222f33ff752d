//! Text format for operads, shapes, maps, adjunction data and task lists.
//!
//! One directive per line. `#` starts a comment. Blocks open with a keyword line and close
//! with `end`. Names of generators, elements, operads, maps and shapes are identifiers
//! `[A-Za-z_][A-Za-z0-9_']*`; color and object names may also start with a digit or
//! contain `*`.
//!
//! ```text
//! field Q | field Fp:<p>
//! window <a>:<wmin>:<wmax>:<dmin>:<dmax>
//! seed <n>
//!
//! shape <S>
//!   objects <o>...
//!   edge <e> : <o> -> <o>
//!   units <e>...                         # one identity 1-cell per object, in object order
//! end
//!
//! operad <P> = builtin <B> [<m> S<n> | <m> D<n>]
//! operad <P>
//!   colors <c>... | shape <S>           # a shape's 1-cells become the colors
//!   unit <c>
//!   gen <g> : <c>... -> <c> deg <k> [size <s>]     # free on generators, or
//!   elem <x> : <c>... -> <c> deg <k>              # a finite table of basis elements
//!   d <g|x> = <sum>
//!   comp <x> <i> <y> = <sum>                      # tables only; missing entries are 0
//! end
//!
//! map <f> : <P> -> <Q> = sphere-to-disk <m>
//! map <f> : <P> -> <Q>
//!   object <c> -> <c>                   # defaults to the color of the same name
//!   image <g|x> = <sum>                 # generators of a free source, elements of a table
//! end
//!
//! adjunction <R> = identity <P> | retract
//! adjunction <R>
//!   categories <A1> <A2>
//!   left <F>                            # a map A1 -> A2
//!   right <G>                           # a map A2 -> A1
//!   unit <c> = <sum>                    # η_c in A1(c; GFc), one line per object of A1
//!   counit <c> = <sum>                  # ε_c in A2(FGc; c), one line per object of A2
//! end
//!
//! task <kind> <arg>...
//!
//! sum  := 0 | ['-'] term (('+' | '-') term)*
//! term := [<int>['/'<int>] ['*']] mono
//! mono := Id_<c> | <name> | <name> '(' slot (',' slot)* ')'
//! slot := '|' | mono
//! ```
//!
//! A bare generator name is its corolla; `|` is a leaf. The printer emits every optional
//! field, so printing and reparsing gives back an equal [`Presentation`] up to line anchors.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::adjunction::{identity_adjunction, retract_adjunction, StrictAdjunctionData};
use crate::coh::{DgCat, DgFunctor};
use crate::complex::{Complex, Window};
use crate::diagram::Shape;
use crate::error::{Error, Result};
use crate::lin::{Color, Label, Lin};
use crate::linalg::{Field, Q};
use crate::operad::builtin::{
    a_category, a_plus_acyclic, ar, h0_category, h_category, random_operad, retract_category, triangle_category,
    Assoc, Tabulated,
};
use crate::operad::free::{extend_from_collection, show_presented, FreeOperad, Presented, PresentedOperad};
use crate::operad::h0::sphere_to_disk;
use crate::operad::{check_morphism, check_operad, ColorSet, FnMap, Operad, OperadMap, Sig};
use crate::tree::Tr;
use crate::twocat::shape_colors;

pub const TASK_KINDS: &[&str] = &[
    "trees",
    "diagrams",
    "bar",
    "cobar",
    "counit-verify",
    "homology",
    "mc-check",
    "adj-build",
    "adj-verify",
    "h0",
    "weq-check",
    "fib-check",
    "unital",
    "twocat",
    "coh",
];

#[derive(Clone, Debug, PartialEq)]
pub enum OperadBody {
    /// `x` is the complex of `Ar`: ('S' | 'D', n).
    Builtin { name: String, m: usize, x: Option<(char, i64)> },
    Free { shape: Option<String>, pres: Presented },
    Table { shape: Option<String>, tab: Tabulated },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperadDecl {
    pub name: String,
    pub line: usize,
    pub body: OperadBody,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapBody {
    SphereToDisk(usize),
    /// Color table and images of generators (free source) or elements (table source).
    Explicit { colors: Vec<Color>, images: Vec<(Label, Lin)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapDecl {
    pub name: String,
    pub line: usize,
    pub src: String,
    pub tgt: String,
    pub body: MapBody,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AdjBody {
    Identity(String),
    Retract,
    Explicit { a1: String, a2: String, left: String, right: String, eta: Vec<Lin>, eps: Vec<Lin> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdjDecl {
    pub name: String,
    pub line: usize,
    pub body: AdjBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub kind: String,
    pub args: Vec<String>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    pub field: Field,
    pub window: Window,
    pub seed: u64,
    pub shapes: Vec<(String, Shape)>,
    pub operads: Vec<OperadDecl>,
    pub maps: Vec<MapDecl>,
    pub adjunctions: Vec<AdjDecl>,
    pub tasks: Vec<Task>,
}

impl Default for Presentation {
    fn default() -> Self {
        Presentation {
            field: Field::Rational,
            window: Window { min_degree: -8, max_degree: 8, max_arity: 3, max_weight: 3 },
            seed: 0,
            shapes: vec![],
            operads: vec![],
            maps: vec![],
            adjunctions: vec![],
            tasks: vec![],
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && cs.all(name_char)
}

fn is_color_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(color_char)
}

fn color_char(c: char) -> bool {
    name_char(c) || c == '*'
}

fn name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Parsed but unresolved monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Mono {
    pub name: String,
    pub slots: Option<Vec<Option<Mono>>>,
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> &str {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && f(self.s[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).expect("ascii slice")
    }

    fn mono(&mut self) -> std::result::Result<Mono, String> {
        let name = self.take_while(|c| color_char(c as char)).to_string();
        let unit = name.strip_prefix("Id_").is_some_and(is_color_name);
        if !unit && !is_ident(&name) {
            return Err(format!("expected a name at column {}", self.pos + 1));
        }
        if !self.eat(b'(') {
            return Ok(Mono { name, slots: None });
        }
        let mut slots = Vec::new();
        loop {
            if self.eat(b'|') {
                slots.push(None);
            } else {
                slots.push(Some(self.mono()?));
            }
            if self.eat(b')') {
                break;
            }
            if !self.eat(b',') {
                return Err(format!("expected ',' or ')' at column {}", self.pos + 1));
            }
        }
        Ok(Mono { name, slots: Some(slots) })
    }
}

/// Parses `sum` into coefficient and monomial pairs (repeated monomials are kept apart).
pub fn parse_sum(text: &str) -> std::result::Result<Vec<(Q, Mono)>, String> {
    if text.trim() == "0" {
        return Ok(vec![]);
    }
    let mut c = Cursor { s: text.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let negative = if c.eat(b'-') {
            true
        } else if c.eat(b'+') || first {
            false
        } else {
            return Err(format!("expected '+' or '-' at column {}", c.pos + 1));
        };
        let num = c.take_while(|b| b.is_ascii_digit() || b == b'/').to_string();
        let mut coef: Q = if num.is_empty() {
            Q::from_integer(1.into())
        } else {
            num.parse().map_err(|_| format!("bad coefficient '{num}'"))?
        };
        if !num.is_empty() {
            c.eat(b'*');
        }
        if negative {
            coef = -coef;
        }
        out.push((coef, c.mono()?));
        first = false;
        if c.peek().is_none() {
            return Ok(out);
        }
    }
}

fn show_mono_q(c: &Q, first: bool) -> String {
    use num_traits::Signed;
    match (first, c.is_negative()) {
        (true, false) => format!("{c}"),
        (true, true) => format!("-{}", -c),
        (false, false) => format!(" + {c}"),
        (false, true) => format!(" - {}", -c),
    }
}

/// Prints a combination in the `sum` grammar using `show` for labels.
pub fn show_sum(v: &Lin, show: &dyn Fn(&Label) -> String) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (l, c)) in v.iter().enumerate() {
        write!(s, "{} {}", show_mono_q(c, i == 0), show(l)).unwrap();
    }
    s
}

fn color_index(colors: &ColorSet, name: &str) -> std::result::Result<Color, String> {
    colors.index(name).ok_or_else(|| format!("unknown color {name}"))
}

fn unit_of(colors: &ColorSet, m: &Mono) -> Option<std::result::Result<Label, String>> {
    let c = m.name.strip_prefix("Id_")?;
    if m.slots.is_some() {
        return Some(Err(format!("{} takes no inputs", m.name)));
    }
    Some(color_index(colors, c).map(Label::Unit))
}

fn free_tree(p: &Presented, m: &Mono) -> std::result::Result<Tr<Label>, String> {
    if m.name.starts_with("Id_") {
        return Err(format!("{} cannot sit inside a tree", m.name));
    }
    let g = p.index(&m.name).ok_or_else(|| format!("unknown generator {}", m.name))?;
    let sig = p.gen_sig_of(&g);
    let ins = match &m.slots {
        None => vec![None; sig.arity()],
        Some(slots) => {
            if slots.len() != sig.arity() {
                return Err(format!("{} has arity {}, got {} inputs", m.name, sig.arity(), slots.len()));
            }
            let mut ins = Vec::new();
            for (i, s) in slots.iter().enumerate() {
                ins.push(match s {
                    None => None,
                    Some(child) => {
                        let t = free_tree(p, child)?;
                        let out = p.gen_sig_of(&t.dec).out;
                        if out != sig.ins[i] {
                            return Err(format!("{} does not fit input {i} of {}", child.name, m.name));
                        }
                        Some(t)
                    }
                });
            }
            ins
        }
    };
    Ok(Tr { dec: g, ins })
}

fn resolve_free(p: &Presented, m: &Mono) -> std::result::Result<Label, String> {
    if let Some(u) = unit_of(&p.colors, m) {
        return u;
    }
    free_tree(p, m).map(Label::tree)
}

fn resolve_table(t: &Tabulated, m: &Mono) -> std::result::Result<Label, String> {
    if let Some(u) = unit_of(&t.colors, m) {
        return u;
    }
    if m.slots.is_some() {
        return Err(format!("table element {} takes no inputs", m.name));
    }
    t.by_name(&m.name).ok_or_else(|| format!("unknown element {}", m.name))
}

/// An operad declaration turned into a live operad, keeping name resolution.
#[derive(Clone)]
pub enum Model {
    Table(Arc<Tabulated>),
    Free(Arc<PresentedOperad>),
    Opaque(Arc<dyn Operad>),
}

impl Model {
    pub fn op(&self) -> DgCat {
        match self {
            Model::Table(t) => t.clone(),
            Model::Free(f) => f.clone(),
            Model::Opaque(o) => o.clone(),
        }
    }

    pub fn colors(&self) -> ColorSet {
        self.op().colors().clone()
    }

    pub fn resolve(&self, m: &Mono) -> std::result::Result<Label, String> {
        match self {
            Model::Table(t) => resolve_table(t, m),
            Model::Free(f) => resolve_free(&f.gens, m),
            Model::Opaque(o) => Err(format!("elements of {} cannot be named", o.name())),
        }
    }

    pub fn resolve_sum(&self, text: &str) -> std::result::Result<Lin, String> {
        let mut v = Lin::zero();
        for (c, m) in parse_sum(text)? {
            v.add_term(self.resolve(&m)?, c);
        }
        Ok(v)
    }

    pub fn show(&self, x: &Label) -> String {
        match self {
            Model::Table(t) => t.show(x),
            Model::Free(f) => show_presented(&f.gens, x),
            Model::Opaque(o) => match x {
                Label::Unit(c) => format!("Id_{}", o.colors().names[*c as usize]),
                _ => x.to_string(),
            },
        }
    }

    pub fn show_sum(&self, v: &Lin) -> String {
        show_sum(v, &|l| self.show(l))
    }
}

fn builtin_model(name: &str, m: usize, x: Option<(char, i64)>) -> std::result::Result<Model, String> {
    Ok(match name {
        "A" => Model::Table(Arc::new(a_category())),
        "Ret" => Model::Table(Arc::new(retract_category())),
        "Tri" => Model::Table(Arc::new(triangle_category())),
        "Acyc" => Model::Table(Arc::new(a_plus_acyclic())),
        "As" => Model::Opaque(Arc::new(Assoc)),
        "H" => Model::Free(Arc::new(h_category())),
        "H0" => Model::Opaque(Arc::new(h0_category())),
        "Ar" => {
            let (k, n) = x.ok_or("Ar needs an arity and S<n> or D<n>")?;
            let cx = if k == 'S' { Complex::sphere(n) } else { Complex::disk(n) };
            Model::Table(Arc::new(ar(m, &cx)))
        }
        s if s.starts_with("rand:") => {
            let seed: u64 = s[5..].parse().map_err(|_| format!("bad seed in {s}"))?;
            Model::Free(Arc::new(random_operad(seed)))
        }
        other => return Err(format!("unknown builtin {other}")),
    })
}

fn body_model(body: &OperadBody) -> std::result::Result<Model, String> {
    match body {
        OperadBody::Builtin { name, m, x } => builtin_model(name, *m, *x),
        OperadBody::Free { pres, .. } => Ok(Model::Free(Arc::new(FreeOperad::new(pres.clone())))),
        OperadBody::Table { tab, .. } => Ok(Model::Table(Arc::new(tab.clone()))),
    }
}

/// Line source: (1-based line number, text without comment), blank lines dropped.
fn lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim().to_string()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

/// Splits `lhs = rhs` once.
fn split_eq(line: usize, s: &str) -> Result<(String, String)> {
    let (a, b) = s.split_once('=').ok_or_else(|| perr(line, "expected '='"))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

/// `<c>... -> <c> deg <k> [size <s>]` after the `:`.
fn parse_sig(line: usize, colors: &ColorSet, rest: &str) -> Result<(Sig, i64, Option<usize>)> {
    let toks: Vec<&str> = rest.split_whitespace().collect();
    let arrow = toks.iter().position(|t| *t == "->").ok_or_else(|| perr(line, "expected '->'"))?;
    let col = |n: &str| color_index(colors, n).map_err(|m| perr(line, m));
    let ins = toks[..arrow].iter().map(|n| col(n)).collect::<Result<Vec<_>>>()?;
    let tail = &toks[arrow + 1..];
    if tail.len() < 3 || tail[1] != "deg" {
        return Err(perr(line, "expected '-> <color> deg <k>'"));
    }
    let out = col(tail[0])?;
    let deg: i64 = tail[2].parse().map_err(|_| perr(line, format!("bad degree '{}'", tail[2])))?;
    let size = match &tail[3..] {
        [] => None,
        ["size", s] => Some(s.parse().map_err(|_| perr(line, format!("bad size '{s}'")))?),
        _ => return Err(perr(line, "trailing tokens after degree")),
    };
    Ok((Sig::new(ins, out), deg, size))
}

fn show_sig(colors: &ColorSet, s: &Sig) -> String {
    let mut out = String::new();
    for c in &s.ins {
        write!(out, "{} ", colors.names[*c as usize]).unwrap();
    }
    write!(out, "-> {}", colors.names[s.out as usize]).unwrap();
    out
}

struct Parser {
    src: Vec<(usize, String)>,
    at: usize,
    pres: Presentation,
    models: HashMap<String, Model>,
}

impl Parser {
    fn next_line(&mut self, opened: usize) -> Result<(usize, String)> {
        let l = self.src.get(self.at).cloned().ok_or_else(|| perr(opened, "block is not closed with 'end'"))?;
        self.at += 1;
        Ok(l)
    }

    fn check_fresh(&self, line: usize, name: &str) -> Result<()> {
        if !is_ident(name) {
            return Err(perr(line, format!("'{name}' is not a valid name")));
        }
        let taken = self.models.contains_key(name)
            || self.pres.shapes.iter().any(|(n, _)| n == name)
            || self.pres.maps.iter().any(|m| m.name == name)
            || self.pres.adjunctions.iter().any(|a| a.name == name);
        if taken {
            return Err(perr(line, format!("'{name}' is already declared")));
        }
        Ok(())
    }

    fn model(&self, line: usize, name: &str) -> Result<&Model> {
        self.models.get(name).ok_or_else(|| perr(line, format!("unknown operad {name}")))
    }

    fn shape(&self, line: usize, name: &str) -> Result<&Shape> {
        self.pres.shapes.iter().find(|(n, _)| n == name).map(|(_, s)| s).ok_or_else(|| perr(line, format!("unknown shape {name}")))
    }

    fn run(&mut self) -> Result<()> {
        while self.at < self.src.len() {
            let (line, text) = self.src[self.at].clone();
            self.at += 1;
            let toks: Vec<&str> = text.split_whitespace().collect();
            match toks[0] {
                "field" => {
                    let f = toks.get(1).and_then(|s| Field::parse(s)).filter(|_| toks.len() == 2);
                    self.pres.field = f.ok_or_else(|| perr(line, "expected 'field Q' or 'field Fp:<p>'"))?;
                }
                "window" => {
                    let w = toks.get(1).and_then(|s| Window::parse(s)).filter(|_| toks.len() == 2);
                    self.pres.window = w.ok_or_else(|| perr(line, "expected 'window a:wmin:wmax:dmin:dmax'"))?;
                }
                "seed" => {
                    let s = toks.get(1).and_then(|s| s.parse().ok()).filter(|_| toks.len() == 2);
                    self.pres.seed = s.ok_or_else(|| perr(line, "expected 'seed <n>'"))?;
                }
                "shape" if toks.len() == 2 => self.shape_block(line, toks[1])?,
                "operad" => self.operad(line, &toks)?,
                "map" => self.map(line, &text)?,
                "adjunction" => self.adjunction(line, &toks)?,
                "task" => {
                    let kind = toks.get(1).ok_or_else(|| perr(line, "expected a task kind"))?;
                    if !TASK_KINDS.contains(kind) {
                        return Err(perr(line, format!("unknown task '{kind}'")));
                    }
                    let args = toks[2..].iter().map(|s| s.to_string()).collect();
                    self.pres.tasks.push(Task { kind: kind.to_string(), args, line });
                }
                other => return Err(perr(line, format!("unexpected '{other}'"))),
            }
        }
        Ok(())
    }

    fn shape_block(&mut self, opened: usize, name: &str) -> Result<()> {
        self.check_fresh(opened, name)?;
        let mut sh = Shape { objects: vec![], edges: vec![], units: None };
        loop {
            let (line, text) = self.next_line(opened)?;
            let toks: Vec<&str> = text.split_whitespace().collect();
            let obj = |sh: &Shape, n: &str| {
                sh.objects.iter().position(|o| o == n).map(|p| p as u32).ok_or_else(|| perr(line, format!("unknown object {n}")))
            };
            match toks[0] {
                "end" => break,
                "objects" => {
                    if !sh.objects.is_empty() {
                        return Err(perr(line, "objects already declared"));
                    }
                    for o in &toks[1..] {
                        if !is_color_name(o) || sh.objects.iter().any(|x| x == o) {
                            return Err(perr(line, format!("bad or repeated object '{o}'")));
                        }
                        sh.objects.push(o.to_string());
                    }
                }
                "edge" => {
                    let [_, e, ":", s, "->", t] = toks[..] else {
                        return Err(perr(line, "expected 'edge <e> : <o> -> <o>'"));
                    };
                    if !is_color_name(e) || sh.edge_by_name(e).is_some() {
                        return Err(perr(line, format!("bad or repeated edge '{e}'")));
                    }
                    let (s, t) = (obj(&sh, s)?, obj(&sh, t)?);
                    sh.edges.push((e.to_string(), s, t));
                }
                "units" => {
                    if toks.len() - 1 != sh.objects.len() {
                        return Err(perr(line, "one unit edge per object expected"));
                    }
                    let mut us = Vec::new();
                    for (i, u) in toks[1..].iter().enumerate() {
                        let e = sh.edge_by_name(u).ok_or_else(|| perr(line, format!("unknown edge {u}")))?;
                        if sh.src(e) != i as u32 || sh.tgt(e) != i as u32 {
                            return Err(perr(line, format!("{u} is not a loop on object {}", sh.objects[i])));
                        }
                        us.push(e);
                    }
                    sh.units = Some(us);
                }
                other => return Err(perr(line, format!("unexpected '{other}' in shape block"))),
            }
        }
        if sh.objects.is_empty() {
            return Err(perr(opened, "shape without objects"));
        }
        self.pres.shapes.push((name.to_string(), sh));
        Ok(())
    }

    fn operad(&mut self, line: usize, toks: &[&str]) -> Result<()> {
        let name = *toks.get(1).ok_or_else(|| perr(line, "expected an operad name"))?;
        self.check_fresh(line, name)?;
        let body = if toks.get(2) == Some(&"=") {
            if toks.get(3) != Some(&"builtin") || toks.len() < 5 {
                return Err(perr(line, "expected 'operad <P> = builtin <B>'"));
            }
            let b = toks[4].to_string();
            let (m, x) = match &toks[5..] {
                [] => (0, None),
                [m, x] => {
                    let m: usize = m.parse().map_err(|_| perr(line, format!("bad arity '{m}'")))?;
                    let (k, n) = x.split_at(1);
                    let k = k.chars().next().unwrap();
                    let n: i64 = n.parse().map_err(|_| perr(line, format!("bad complex '{x}'")))?;
                    if !matches!(k, 'S' | 'D') {
                        return Err(perr(line, format!("bad complex '{x}', expected S<n> or D<n>")));
                    }
                    (m, Some((k, n)))
                }
                _ => return Err(perr(line, "expected 'builtin <B> [<m> S<n>|D<n>]'")),
            };
            OperadBody::Builtin { name: b, m, x }
        } else if toks.len() == 2 {
            self.operad_block(line, name)?
        } else {
            return Err(perr(line, "expected 'operad <P>' or 'operad <P> = builtin <B>'"));
        };
        let model = body_model(&body).map_err(|m| perr(line, m))?;
        self.models.insert(name.to_string(), model);
        self.pres.operads.push(OperadDecl { name: name.to_string(), line, body });
        Ok(())
    }

    fn operad_block(&mut self, opened: usize, name: &str) -> Result<OperadBody> {
        let mut colors: Option<ColorSet> = None;
        let mut shape: Option<String> = None;
        let mut unit: Option<(usize, String)> = None;
        let mut free: Option<bool> = None;
        let mut pres = Presented::new(name, ColorSet::default());
        let mut tab = Tabulated::new(name, ColorSet::default());
        let mut sizes: Vec<Option<usize>> = Vec::new();
        let mut pending: Vec<(usize, String)> = Vec::new();
        loop {
            let (line, text) = self.next_line(opened)?;
            let toks: Vec<&str> = text.split_whitespace().collect();
            match toks[0] {
                "end" => break,
                "colors" | "shape" => {
                    if colors.is_some() {
                        return Err(perr(line, "colors already declared"));
                    }
                    if toks[0] == "shape" {
                        let [_, s] = toks[..] else { return Err(perr(line, "expected 'shape <S>'")) };
                        colors = Some(shape_colors(self.shape(line, s)?));
                        shape = Some(s.to_string());
                    } else {
                        let names = &toks[1..];
                        if names.is_empty() || names.iter().any(|n| !is_color_name(n)) {
                            return Err(perr(line, "expected one or more color names"));
                        }
                        for (i, n) in names.iter().enumerate() {
                            if names[..i].contains(n) {
                                return Err(perr(line, format!("repeated color {n}")));
                            }
                        }
                        colors = Some(ColorSet::new(names));
                    }
                }
                "unit" => {
                    let [_, c] = toks[..] else { return Err(perr(line, "expected 'unit <c>'")) };
                    unit = Some((line, c.to_string()));
                }
                "gen" | "elem" => {
                    let is_gen = toks[0] == "gen";
                    if *free.get_or_insert(is_gen) != is_gen {
                        return Err(perr(line, "an operad block holds either 'gen' or 'elem' lines"));
                    }
                    let cs = colors.as_ref().ok_or_else(|| perr(line, "declare colors first"))?;
                    let (head, rest) = text.split_once(':').ok_or_else(|| perr(line, "expected ':'"))?;
                    let g = head.split_whitespace().nth(1).ok_or_else(|| perr(line, "expected a name"))?;
                    if !is_ident(g) || g.starts_with("Id_") {
                        return Err(perr(line, format!("'{g}' is not a valid generator name")));
                    }
                    if pres.index(g).is_some() || tab.by_name(g).is_some() {
                        return Err(perr(line, format!("'{g}' is already declared")));
                    }
                    let (sig, deg, size) = parse_sig(line, cs, rest)?;
                    if is_gen {
                        pres.add(g, sig, deg, 1);
                        sizes.push(size);
                    } else {
                        if size.is_some() {
                            return Err(perr(line, "table elements have no size"));
                        }
                        tab.add(g, sig, deg);
                    }
                }
                "d" | "comp" => pending.push((line, text.clone())),
                other => return Err(perr(line, format!("unexpected '{other}' in operad block"))),
            }
        }
        let mut cs = colors.ok_or_else(|| perr(opened, "operad block without colors"))?;
        if let Some((line, u)) = unit {
            cs.unit = Some(color_index(&cs, &u).map_err(|m| perr(line, m))?);
        }
        pres.colors = cs.clone();
        tab.colors = cs;
        if free.unwrap_or(true) {
            for (line, text) in pending {
                let (lhs, rhs) = split_eq(line, &text)?;
                let lt: Vec<&str> = lhs.split_whitespace().collect();
                let ["d", g] = lt[..] else { return Err(perr(line, "free operads take 'd <g> = <sum>' only")) };
                let gl = pres.index(g).ok_or_else(|| perr(line, format!("unknown generator {g}")))?;
                let v = Model::resolve_sum_with(&rhs, |m| resolve_free(&pres, m)).map_err(|m| perr(line, m))?;
                pres.set_diff(&gl, v);
            }
            // default size: the largest word in the differential, at least 1
            for (k, s) in sizes.iter().enumerate() {
                pres.sizes[k] = match s {
                    Some(s) => (*s).max(1),
                    None => pres.diffs[k].labels().map(|t| word_size(&pres, t)).max().unwrap_or(1).max(1),
                };
            }
            Ok(OperadBody::Free { shape, pres })
        } else {
            for (line, text) in pending {
                let (lhs, rhs) = split_eq(line, &text)?;
                let v = Model::resolve_sum_with(&rhs, |m| resolve_table(&tab, m)).map_err(|m| perr(line, m))?;
                let lt: Vec<&str> = lhs.split_whitespace().collect();
                let el = |n: &str| tab.by_name(n).ok_or_else(|| perr(line, format!("unknown element {n}")));
                match lt[..] {
                    ["d", x] => {
                        let x = el(x)?;
                        tab.set_diff(&x, v);
                    }
                    ["comp", x, i, y] => {
                        let (x, y) = (el(x)?, el(y)?);
                        let i: usize = i.parse().map_err(|_| perr(line, format!("bad slot '{i}'")))?;
                        if i >= tab.sig(&x).arity() {
                            return Err(perr(line, format!("slot {i} out of range")));
                        }
                        tab.set_comp(&x, i, &y, v);
                    }
                    _ => return Err(perr(line, "expected 'd <x> = <sum>' or 'comp <x> <i> <y> = <sum>'")),
                }
            }
            Ok(OperadBody::Table { shape, tab })
        }
    }

    fn map(&mut self, line: usize, text: &str) -> Result<()> {
        let (head, tail) = match text.split_once('=') {
            Some((h, t)) => (h.trim(), Some(t.trim())),
            None => (text, None),
        };
        let toks: Vec<&str> = head.split_whitespace().collect();
        let [_, name, ":", src, "->", tgt] = toks[..] else {
            return Err(perr(line, "expected 'map <f> : <P> -> <Q>'"));
        };
        self.check_fresh(line, name)?;
        let sm = self.model(line, src)?.clone();
        let tm = self.model(line, tgt)?.clone();
        let body = match tail {
            Some(t) => {
                let tt: Vec<&str> = t.split_whitespace().collect();
                let ["sphere-to-disk", m] = tt[..] else { return Err(perr(line, "expected '= sphere-to-disk <m>'")) };
                MapBody::SphereToDisk(m.parse().map_err(|_| perr(line, format!("bad arity '{m}'")))?)
            }
            None => {
                let (sc, tc) = (sm.colors(), tm.colors());
                let mut colors: Vec<Option<Color>> = sc.names.iter().map(|n| tc.index(n)).collect();
                let mut images: BTreeMap<Label, Lin> = BTreeMap::new();
                loop {
                    let (l, text) = self.next_line(line)?;
                    let toks: Vec<&str> = text.split_whitespace().collect();
                    match toks[0] {
                        "end" => break,
                        "object" => {
                            let [_, a, "->", b] = toks[..] else { return Err(perr(l, "expected 'object <c> -> <c>'")) };
                            let a = color_index(&sc, a).map_err(|m| perr(l, m))?;
                            colors[a as usize] = Some(color_index(&tc, b).map_err(|m| perr(l, m))?);
                        }
                        "image" => {
                            let (lhs, rhs) = split_eq(l, &text)?;
                            let lt: Vec<&str> = lhs.split_whitespace().collect();
                            let ["image", x] = lt[..] else { return Err(perr(l, "expected 'image <x> = <sum>'")) };
                            let x = match &sm {
                                Model::Free(f) => f.gens.index(x),
                                Model::Table(t) => t.by_name(x),
                                Model::Opaque(_) => None,
                            }
                            .ok_or_else(|| perr(l, format!("{x} is not a generator or element of {src}")))?;
                            images.insert(x, tm.resolve_sum(&rhs).map_err(|m| perr(l, m))?);
                        }
                        other => return Err(perr(l, format!("unexpected '{other}' in map block"))),
                    }
                }
                if matches!(sm, Model::Opaque(_)) {
                    return Err(perr(line, format!("maps out of {src} cannot be declared")));
                }
                let colors = colors
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.ok_or_else(|| perr(line, format!("object {} has no image", sc.names[i]))))
                    .collect::<Result<Vec<_>>>()?;
                MapBody::Explicit { colors, images: images.into_iter().collect() }
            }
        };
        self.pres.maps.push(MapDecl { name: name.into(), line, src: src.into(), tgt: tgt.into(), body });
        Ok(())
    }

    fn adjunction(&mut self, line: usize, toks: &[&str]) -> Result<()> {
        let name = *toks.get(1).ok_or_else(|| perr(line, "expected an adjunction name"))?;
        self.check_fresh(line, name)?;
        let body = match toks[2..] {
            ["=", "identity", p] => {
                self.model(line, p)?;
                AdjBody::Identity(p.into())
            }
            ["=", "retract"] => AdjBody::Retract,
            [] => self.adjunction_block(line)?,
            _ => return Err(perr(line, "expected 'adjunction <R> = identity <P>', '= retract' or a block")),
        };
        self.pres.adjunctions.push(AdjDecl { name: name.into(), line, body });
        Ok(())
    }

    fn adjunction_block(&mut self, opened: usize) -> Result<AdjBody> {
        let mut cats: Option<(String, String)> = None;
        let (mut left, mut right) = (None, None);
        let mut eta: Vec<(usize, String)> = Vec::new();
        let mut eps: Vec<(usize, String)> = Vec::new();
        loop {
            let (line, text) = self.next_line(opened)?;
            let toks: Vec<&str> = text.split_whitespace().collect();
            match toks[0] {
                "end" => break,
                "categories" => {
                    let [_, a, b] = toks[..] else { return Err(perr(line, "expected 'categories <A1> <A2>'")) };
                    self.model(line, a)?;
                    self.model(line, b)?;
                    cats = Some((a.into(), b.into()));
                }
                "left" | "right" => {
                    let [k, f] = toks[..] else { return Err(perr(line, "expected a map name")) };
                    let m = self.pres.maps.iter().find(|m| m.name == f).ok_or_else(|| perr(line, format!("unknown map {f}")))?;
                    let (a, b) = cats.clone().ok_or_else(|| perr(line, "declare categories first"))?;
                    let want = if k == "left" { (&a, &b) } else { (&b, &a) };
                    if (&m.src, &m.tgt) != want {
                        return Err(perr(line, format!("{f} goes {} -> {}, expected {} -> {}", m.src, m.tgt, want.0, want.1)));
                    }
                    if k == "left" {
                        left = Some(f.to_string());
                    } else {
                        right = Some(f.to_string());
                    }
                }
                "unit" | "counit" => {
                    let (lhs, rhs) = split_eq(line, &text)?;
                    let lt: Vec<&str> = lhs.split_whitespace().collect();
                    let [_, c] = lt[..] else { return Err(perr(line, "expected '<unit|counit> <c> = <sum>'")) };
                    let target = if toks[0] == "unit" { &mut eta } else { &mut eps };
                    target.push((line, format!("{c}={rhs}")));
                }
                other => return Err(perr(line, format!("unexpected '{other}' in adjunction block"))),
            }
        }
        let (a1, a2) = cats.ok_or_else(|| perr(opened, "adjunction block without categories"))?;
        let left = left.ok_or_else(|| perr(opened, "adjunction block without 'left'"))?;
        let right = right.ok_or_else(|| perr(opened, "adjunction block without 'right'"))?;
        let components = |cat: &str, entries: &[(usize, String)], what: &str| -> Result<Vec<Lin>> {
            let m = self.model(opened, cat)?;
            let cs = m.colors();
            let mut out: Vec<Option<Lin>> = vec![None; cs.len()];
            for (line, e) in entries {
                let (c, rhs) = e.split_once('=').expect("stored as c=rhs");
                let k = color_index(&cs, c).map_err(|m| perr(*line, m))? as usize;
                if out[k].is_some() {
                    return Err(perr(*line, format!("{what} at {c} given twice")));
                }
                out[k] = Some(m.resolve_sum(rhs).map_err(|m| perr(*line, m))?);
            }
            out.into_iter()
                .enumerate()
                .map(|(k, v)| v.ok_or_else(|| perr(opened, format!("missing {what} at {}", cs.names[k]))))
                .collect()
        };
        let eta = components(&a1, &eta, "unit")?;
        let eps = components(&a2, &eps, "counit")?;
        Ok(AdjBody::Explicit { a1, a2, left, right, eta, eps })
    }
}

impl Model {
    fn resolve_sum_with(text: &str, f: impl Fn(&Mono) -> std::result::Result<Label, String>) -> std::result::Result<Lin, String> {
        let mut v = Lin::zero();
        for (c, m) in parse_sum(text)? {
            v.add_term(f(&m)?, c);
        }
        Ok(v)
    }
}

fn word_size(p: &Presented, t: &Label) -> usize {
    match t {
        Label::Tree(t) => t.preorder().iter().map(|g| p.sizes[gen_index(g)]).sum(),
        _ => 0,
    }
}

fn gen_index(g: &Label) -> usize {
    match g {
        Label::Gen(k) => *k as usize,
        _ => unreachable!("free trees carry generators"),
    }
}

impl Presentation {
    /// Parses without semantic validation; see [`Session::new`].
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut p = Parser { src: lines(text), at: 0, pres: Presentation::default(), models: HashMap::new() };
        p.run()?;
        Ok(p.pres)
    }

    /// The same declarations with every line anchor set to 0, for comparing content.
    pub fn without_lines(&self) -> Presentation {
        let mut p = self.clone();
        p.operads.iter_mut().for_each(|d| d.line = 0);
        p.maps.iter_mut().for_each(|d| d.line = 0);
        p.adjunctions.iter_mut().for_each(|d| d.line = 0);
        p.tasks.iter_mut().for_each(|d| d.line = 0);
        p
    }

    fn models(&self) -> HashMap<String, Model> {
        self.operads.iter().map(|d| (d.name.clone(), body_model(&d.body).expect("parsed builtins resolve"))).collect()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.window;
        let field = match self.field {
            Field::Rational => "Q".to_string(),
            Field::Prime(p) => format!("Fp:{p}"),
        };
        writeln!(f, "field {field}")?;
        writeln!(f, "window {}:1:{}:{}:{}", w.max_arity, w.max_weight, w.min_degree, w.max_degree)?;
        writeln!(f, "seed {}", self.seed)?;
        for (name, sh) in &self.shapes {
            writeln!(f, "\nshape {name}\n  objects {}", sh.objects.join(" "))?;
            for (e, s, t) in &sh.edges {
                writeln!(f, "  edge {e} : {} -> {}", sh.objects[*s as usize], sh.objects[*t as usize])?;
            }
            if let Some(us) = &sh.units {
                let names: Vec<&str> = us.iter().map(|&u| sh.edges[u as usize].0.as_str()).collect();
                writeln!(f, "  units {}", names.join(" "))?;
            }
            writeln!(f, "end")?;
        }
        let models = self.models();
        for d in &self.operads {
            match &d.body {
                OperadBody::Builtin { name, m, x } => {
                    write!(f, "\noperad {} = builtin {name}", d.name)?;
                    if let Some((k, n)) = x {
                        write!(f, " {m} {k}{n}")?;
                    }
                    writeln!(f)?;
                }
                OperadBody::Free { shape, pres } => {
                    writeln!(f, "\noperad {}", d.name)?;
                    write_colors(f, shape, &pres.colors)?;
                    for k in 0..pres.names.len() {
                        writeln!(
                            f,
                            "  gen {} : {} deg {} size {}",
                            pres.names[k],
                            show_sig(&pres.colors, &pres.sigs[k]),
                            pres.degrees[k],
                            pres.sizes[k]
                        )?;
                    }
                    for k in 0..pres.names.len() {
                        if !pres.diffs[k].is_zero() {
                            writeln!(f, "  d {} = {}", pres.names[k], show_sum(&pres.diffs[k], &|l| show_presented(pres, l)))?;
                        }
                    }
                    writeln!(f, "end")?;
                }
                OperadBody::Table { shape, tab } => {
                    writeln!(f, "\noperad {}", d.name)?;
                    write_colors(f, shape, &tab.colors)?;
                    for (x, sig, deg) in &tab.elems {
                        writeln!(f, "  elem {} : {} deg {deg}", tab.show(x), show_sig(&tab.colors, sig))?;
                    }
                    let show = |l: &Label| tab.show(l);
                    for (x, _, _) in &tab.elems {
                        if let Some(v) = tab.diff.get(x).filter(|v| !v.is_zero()) {
                            writeln!(f, "  d {} = {}", tab.show(x), show_sum(v, &show))?;
                        }
                    }
                    let mut comps: Vec<_> = tab.comp.iter().filter(|(_, v)| !v.is_zero()).collect();
                    comps.sort_by(|a, b| a.0.cmp(b.0));
                    for ((x, i, y), v) in comps {
                        writeln!(f, "  comp {} {i} {} = {}", tab.show(x), tab.show(y), show_sum(v, &show))?;
                    }
                    writeln!(f, "end")?;
                }
            }
        }
        for m in &self.maps {
            match &m.body {
                MapBody::SphereToDisk(k) => writeln!(f, "\nmap {} : {} -> {} = sphere-to-disk {k}", m.name, m.src, m.tgt)?,
                MapBody::Explicit { colors, images } => {
                    let (sm, tm) = (&models[&m.src], &models[&m.tgt]);
                    let (sc, tc) = (sm.colors(), tm.colors());
                    writeln!(f, "\nmap {} : {} -> {}", m.name, m.src, m.tgt)?;
                    for (i, c) in colors.iter().enumerate() {
                        writeln!(f, "  object {} -> {}", sc.names[i], tc.names[*c as usize])?;
                    }
                    for (x, v) in images {
                        let name = match sm {
                            Model::Free(fr) => fr.gens.names[gen_index(x)].clone(),
                            _ => sm.show(x),
                        };
                        writeln!(f, "  image {name} = {}", tm.show_sum(v))?;
                    }
                    writeln!(f, "end")?;
                }
            }
        }
        for a in &self.adjunctions {
            match &a.body {
                AdjBody::Identity(p) => writeln!(f, "\nadjunction {} = identity {p}", a.name)?,
                AdjBody::Retract => writeln!(f, "\nadjunction {} = retract", a.name)?,
                AdjBody::Explicit { a1, a2, left, right, eta, eps } => {
                    writeln!(f, "\nadjunction {}\n  categories {a1} {a2}\n  left {left}\n  right {right}", a.name)?;
                    for (key, cat, comps) in [("unit", a1, eta), ("counit", a2, eps)] {
                        let m = &models[cat];
                        let cs = m.colors();
                        for (k, v) in comps.iter().enumerate() {
                            writeln!(f, "  {key} {} = {}", cs.names[k], m.show_sum(v))?;
                        }
                    }
                    writeln!(f, "end")?;
                }
            }
        }
        if !self.tasks.is_empty() {
            writeln!(f)?;
        }
        for t in &self.tasks {
            write!(f, "task {}", t.kind)?;
            for a in &t.args {
                write!(f, " {a}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn write_colors(f: &mut fmt::Formatter<'_>, shape: &Option<String>, cs: &ColorSet) -> fmt::Result {
    match shape {
        Some(s) => writeln!(f, "  shape {s}")?,
        None => writeln!(f, "  colors {}", cs.names.join(" "))?,
    }
    // a shape on one object fixes the unit color already
    if let (Some(u), None) = (cs.unit, shape) {
        writeln!(f, "  unit {}", cs.names[u as usize])?;
    }
    Ok(())
}

/// A validated presentation with its operads, maps and adjunction data built.
pub struct Session {
    pub pres: Presentation,
    pub models: BTreeMap<String, Model>,
    pub maps: BTreeMap<String, (String, String, FnMap)>,
    pub adjunctions: BTreeMap<String, StrictAdjunctionData>,
}

fn verr(line: usize, msg: impl fmt::Display) -> Error {
    Error::Validation(format!("line {line}: {msg}"))
}

impl Session {
    pub fn load(text: &str) -> Result<Session> {
        Session::new(Presentation::parse(text)?)
    }

    /// Checks every declaration within the window: d² = 0 on each generator, the operad
    /// axioms on tables, morphism axioms on maps and the adjunction identities.
    pub fn new(pres: Presentation) -> Result<Session> {
        let w = pres.window;
        let size = w.max_weight;
        let mut models = BTreeMap::new();
        for d in &pres.operads {
            let m = body_model(&d.body).map_err(|e| verr(d.line, e))?;
            match &m {
                Model::Free(fr) => validate_free(fr, d.line)?,
                Model::Table(t) if !matches!(d.body, OperadBody::Builtin { .. }) => {
                    check_operad(t.as_ref(), &w, size).map_err(|e| verr(d.line, format!("{}: {e}", d.name)))?;
                }
                _ => {}
            }
            models.insert(d.name.clone(), m);
        }
        let mut maps = BTreeMap::new();
        for d in &pres.maps {
            let (sm, tm) = (&models[&d.src], &models[&d.tgt]);
            let f = build_map(d, sm, tm).map_err(|e| verr(d.line, e))?;
            check_morphism(&f, sm.op().as_ref(), tm.op().as_ref(), &w, size)
                .map_err(|e| verr(d.line, format!("{} is not a morphism: {e}", d.name)))?;
            maps.insert(d.name.clone(), (d.src.clone(), d.tgt.clone(), f));
        }
        let mut adjunctions = BTreeMap::new();
        for a in &pres.adjunctions {
            let data = match &a.body {
                AdjBody::Identity(p) => identity_adjunction(models[p].op()),
                AdjBody::Retract => retract_adjunction(),
                AdjBody::Explicit { a1, a2, left, right, eta, eps } => {
                    let (c1, c2) = (models[a1].op(), models[a2].op());
                    let f = DgFunctor::new(left, c1.clone(), c2.clone(), maps[left].2.clone());
                    let g = DgFunctor::new(right, c2.clone(), c1.clone(), maps[right].2.clone());
                    StrictAdjunctionData { a1: c1, a2: c2, f, g, eta: eta.clone(), eps: eps.clone() }
                }
            };
            data.check(size).map_err(|e| verr(a.line, format!("{}: {e}", a.name)))?;
            adjunctions.insert(a.name.clone(), data);
        }
        Ok(Session { pres, models, maps, adjunctions })
    }

    pub fn operad(&self, name: &str, line: usize) -> Result<DgCat> {
        self.models.get(name).map(|m| m.op()).ok_or_else(|| verr(line, format!("unknown operad {name}")))
    }
}

/// Degrees and signatures of each generator's differential, then d² = 0, naming the generator.
fn validate_free(fr: &PresentedOperad, line: usize) -> Result<()> {
    let p = &fr.gens;
    for k in 0..p.names.len() {
        let g = fr.gen(&Label::Gen(k as u32));
        let d = fr.diff(&g);
        for t in d.labels() {
            if fr.sig(t) != p.sigs[k] || fr.degree(t) != p.degrees[k] + 1 {
                return Err(verr(
                    line,
                    format!("d {} has the term {} of the wrong degree or signature", p.names[k], show_presented(p, t)),
                ));
            }
        }
        let dd = d.bind(|t| fr.diff(t));
        if !dd.is_zero() {
            return Err(verr(line, format!("d^2 != 0 on generator {}: {}", p.names[k], show_sum(&dd, &|l| show_presented(p, l)))));
        }
    }
    Ok(())
}

fn build_map(d: &MapDecl, sm: &Model, tm: &Model) -> std::result::Result<FnMap, String> {
    match &d.body {
        MapBody::SphereToDisk(m) => {
            let f = sphere_to_disk(*m);
            let n = sm.colors().len();
            if n != m + 1 || tm.colors().len() != m + 1 {
                return Err(format!("sphere-to-disk {m} needs Ar {m} on both sides"));
            }
            Ok(FnMap::new((0..n as Color).map(|c| f.color(c)).collect(), move |x| f.apply(x)))
        }
        MapBody::Explicit { colors, images } => {
            let table: HashMap<Label, Lin> = images.iter().cloned().collect();
            let target = tm.op();
            match sm {
                Model::Free(fr) => {
                    Ok(extend_from_collection(fr.clone(), target, colors.clone(), move |g| table.get(g).cloned().unwrap_or_default()))
                }
                Model::Table(_) => {
                    let cols = colors.clone();
                    Ok(FnMap::new(colors.clone(), move |x| match x {
                        Label::Unit(c) => Lin::single(target.unit(cols[*c as usize])),
                        _ => table.get(x).cloned().unwrap_or_default(),
                    }))
                }
                Model::Opaque(_) => Err(format!("maps out of {} cannot be declared", d.src)),
            }
        }
    }
}
