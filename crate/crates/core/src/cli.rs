//! Task runner behind the `hoalg` binary: one JSON report per invocation.
//!
//! Report schema (keys sorted, so output is byte-stable for a fixed file, flags and seed):
//!
//! ```text
//! { "field": "Q" | "Fp:p", "window": {..}, "seed": n, "status": "pass" | "fail",
//!   "tasks": [ { "id": "<index>:<kind>[:<args>]", "kind", "line", "args": [..],
//!                "status": "pass" | "fail", "certificates": {..}, "wall_time_ms": n | null } ] }
//! ```
//!
//! `wall_time_ms` is `null` unless timing is requested, which keeps reports reproducible.
//! Certificates hold dimension tables, counts and, on failure, the offending elements.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::adjunction::{
    build_adj, cell_counts, hom_basis, homotopy_adjunction_check, homotopy_monad_check, strict_2functor, AdjObj,
    Kind, KINDS,
};
use crate::barcobar::{Cooperad, check_bar, check_cobar, check_weight_filtration, cobar, counit_certificate, round_trip, Bar};
use crate::coh::{coh_complex, comodule_form, compose_coh, convolve, from_comodule, CohSpace, DgCat, DgFunctor, Words};
use crate::complex::{Window, FULL};
use crate::diagram::{enumerate_diagrams, Shape};
use crate::error::{Error, Result};
use crate::lin::{Color, Label, Lin};
use crate::linalg::{q, Field};
use crate::operad::collection::odot;
use crate::operad::free::free_operad;
use crate::operad::h0::{fibration_check, h0_table, weak_equiv_check, Witness};
use crate::operad::unital::{arity_scaling, map_bijection_check, red, unitalize};
use crate::operad::{component_complex, FnMap, Operad, OperadMap, Sig};
use crate::presentation::{Session, Task};
use crate::tree::{contract_edge, det_complex, edge_after_contraction, enumerate_trees};
use crate::twocat::{
    bar_twocat, collections_agree, counit_twocat, enumerate_cells, free_set_counts, free_twocat, nseq_odot,
    underlying_nseq, NSeq, TwoCatObject,
};

/// Command-line overrides of the file's settings.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub field: Option<Field>,
    pub window: Option<Window>,
    pub seed: Option<u64>,
    pub parallel: bool,
    pub timing: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub id: String,
    pub kind: String,
    pub line: usize,
    pub args: Vec<String>,
    pub status: Status,
    pub certificates: Value,
    pub wall_time_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub field: String,
    pub window: Window,
    pub seed: u64,
    pub status: Status,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One `PASS`/`FAIL` line per task.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for t in &self.tasks {
            let tag = if t.status == Status::Pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {} (line {})\n", t.id, t.line));
        }
        s.push_str(&format!("{} of {} tasks passed\n", self.tasks.iter().filter(|t| t.status == Status::Pass).count(), self.tasks.len()));
        s
    }
}

pub fn field_name(f: Field) -> String {
    match f {
        Field::Rational => "Q".into(),
        Field::Prime(p) => format!("Fp:{p}"),
    }
}

/// Settings shared by all tasks of a run.
struct Ctx<'a> {
    s: &'a Session,
    field: Field,
    window: Window,
    seed: u64,
    parallel: bool,
}

/// Positional names plus `key=value` options of a task line.
struct Args<'a> {
    names: Vec<&'a str>,
    kv: BTreeMap<&'a str, &'a str>,
    line: usize,
}

impl<'a> Args<'a> {
    fn new(t: &'a Task) -> Args<'a> {
        let mut names = Vec::new();
        let mut kv = BTreeMap::new();
        for a in &t.args {
            match a.split_once('=') {
                Some((k, v)) => {
                    kv.insert(k, v);
                }
                None => names.push(a.as_str()),
            }
        }
        Args { names, kv, line: t.line }
    }

    fn num(&self, key: &str, default: usize) -> Result<usize> {
        match self.kv.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(self.line, format!("{key}={v} is not a count"))),
        }
    }

    fn names_or(&self, all: Vec<String>) -> Vec<String> {
        if self.names.is_empty() {
            all
        } else {
            self.names.iter().map(|s| s.to_string()).collect()
        }
    }
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Validation(format!("line {line}: {msg}"))
}

/// Rejects tasks whose arguments name nothing declared, before any work is done.
pub fn check_tasks(s: &Session, tasks: &[Task]) -> Result<()> {
    for t in tasks {
        let a = Args::new(t);
        for n in &a.names {
            let known = match t.kind.as_str() {
                "diagrams" => s.pres.shapes.iter().any(|(m, _)| m == n),
                "weq-check" | "fib-check" => s.maps.contains_key(*n),
                "adj-build" | "adj-verify" => s.adjunctions.contains_key(*n),
                "homology" => *n == "det" || s.models.contains_key(*n),
                "coh" => s.models.contains_key(*n) || s.maps.contains_key(*n),
                "trees" => false,
                _ => s.models.contains_key(*n),
            };
            if !known {
                return Err(bad(t.line, format!("task {} does not know '{n}'", t.kind)));
            }
        }
        for (k, v) in &a.kv {
            if v.parse::<usize>().is_err() && *k != "iso" {
                return Err(bad(t.line, format!("{k}={v} is not a count")));
            }
        }
    }
    Ok(())
}

/// Runs `tasks` (the file's own list when `None`) and collects the report.
pub fn run(s: &Session, tasks: Option<&[Task]>, opts: &Options) -> Result<Report> {
    let tasks = tasks.unwrap_or(&s.pres.tasks);
    check_tasks(s, tasks)?;
    let ctx = Ctx {
        s,
        field: opts.field.unwrap_or(s.pres.field),
        window: opts.window.unwrap_or(s.pres.window),
        seed: opts.seed.unwrap_or(s.pres.seed),
        parallel: opts.parallel,
    };
    let mut reports = Vec::new();
    for (i, t) in tasks.iter().enumerate() {
        let start = Instant::now();
        let (ok, certificates) = match run_task(&ctx, t) {
            Ok(r) => r,
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        let mut id = format!("{i}:{}", t.kind);
        if !t.args.is_empty() {
            id.push(':');
            id.push_str(&t.args.join(","));
        }
        reports.push(TaskReport {
            id,
            kind: t.kind.clone(),
            line: t.line,
            args: t.args.clone(),
            status: if ok { Status::Pass } else { Status::Fail },
            certificates,
            wall_time_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
        });
    }
    let ok = reports.iter().all(|r| r.status == Status::Pass);
    Ok(Report {
        field: field_name(ctx.field),
        window: ctx.window,
        seed: ctx.seed,
        status: if ok { Status::Pass } else { Status::Fail },
        tasks: reports,
    })
}

fn run_task(c: &Ctx, t: &Task) -> Result<(bool, Value)> {
    let a = Args::new(t);
    match t.kind.as_str() {
        "trees" => trees(&a),
        "diagrams" => diagrams(c, &a),
        "bar" => bar(c, &a),
        "cobar" => cobar_task(c, &a),
        "counit-verify" => counit_verify(c, &a),
        "homology" => homology(c, &a),
        "mc-check" => mc_check(c, &a),
        "adj-build" => adj_build(c, &a),
        "adj-verify" => adj_verify(c, &a),
        "h0" => h0(c, &a),
        "weq-check" => weq(c, &a),
        "fib-check" => fib(c, &a),
        "unital" => unital(c, &a),
        "twocat" => twocat(c, &a),
        "coh" => coh(c, &a),
        other => Err(bad(t.line, format!("unknown task {other}"))),
    }
}

fn operads(c: &Ctx, a: &Args) -> Result<Vec<(String, DgCat)>> {
    a.names_or(c.s.models.keys().cloned().collect())
        .into_iter()
        .map(|n| c.s.operad(&n, a.line).map(|p| (n, p)))
        .collect()
}

fn window_of(c: &Ctx, a: &Args) -> Result<Window> {
    let mut w = c.window;
    w.max_arity = a.num("arity", w.max_arity)?;
    w.max_weight = a.num("weight", w.max_weight)?;
    Ok(w)
}

fn catalan(n: usize) -> u128 {
    // C(2n, n) / (n + 1), by the multiplicative formula
    let mut c: u128 = 1;
    for k in 0..n as u128 {
        c = c * (2 * n as u128 - k) / (k + 1);
    }
    c / (n as u128 + 1)
}

/// Binary tree counts, and for every tree with ≤ `edges` internal edges (vertex arity ≥ 2,
/// at most one vertex above binary) the anticommutation of edge contractions.
fn trees(a: &Args) -> Result<(bool, Value)> {
    let leaves = a.num("leaves", 8)?;
    let edges = a.num("edges", 5)?;
    let mut counts = BTreeMap::new();
    let mut ok = true;
    for n in 2..=leaves {
        let got = enumerate_trees(n, n - 1, 2).len() as u128;
        let want = catalan(n - 1);
        ok &= got == want;
        counts.insert(n.to_string(), json!({ "trees": got, "catalan": want }));
    }
    let (mut pairs, mut bad_pairs, mut seen) = (0usize, Vec::new(), 0usize);
    for t in trees_up_to(edges) {
        seen += 1;
        let m = t.internal_edges();
        for e in 0..m {
            for f in (0..m).filter(|&f| f != e) {
                let (t1, s1) = contract_edge(&t, e)?;
                let (t12, s2) = contract_edge(&t1, edge_after_contraction(e, f))?;
                let (u1, r1) = contract_edge(&t, f)?;
                let (u12, r2) = contract_edge(&u1, edge_after_contraction(f, e))?;
                pairs += 1;
                if t12 != u12 || s1 * s2 != -(r1 * r2) {
                    bad_pairs.push(format!("{t:?} edges {e},{f}"));
                }
            }
        }
    }
    ok &= bad_pairs.is_empty();
    bad_pairs.truncate(5);
    Ok((ok, json!({ "binary_counts": counts, "trees": seen, "edge_pairs": pairs, "sign_failures": bad_pairs })))
}

/// Planar trees with v ≤ edges + 1 vertices, all arities ≥ 2 and v + 1 or v + 2 leaves.
pub fn trees_up_to(edges: usize) -> Vec<crate::tree::PlanarTree> {
    let mut out = Vec::new();
    for v in 1..=edges + 1 {
        for n in v + 1..=v + 2 {
            out.extend(enumerate_trees(n, v, 2));
        }
    }
    out
}

fn diagrams(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let top = a.num("top", 5)?;
    let cells = a.num("cells", 4)?;
    let shapes: Vec<(String, Shape)> = if a.names.is_empty() {
        c.s.pres.shapes.clone()
    } else {
        c.s.pres.shapes.iter().filter(|(n, _)| a.names.contains(&n.as_str())).cloned().collect()
    };
    let mut ok = true;
    let mut out = BTreeMap::new();
    for (name, sh) in shapes {
        let counts = free_set_counts(&sh, top, cells);
        let mut per_n = BTreeMap::new();
        let mut mismatches = Vec::new();
        for n in 1..=top {
            let mut total = 0;
            for cell in enumerate_cells(&sh, n) {
                let direct = enumerate_diagrams(&sh, &cell, cells).len();
                total += direct;
                if counts.get(&cell).copied().unwrap_or(0) != direct {
                    mismatches.push(format!("{cell:?}"));
                }
            }
            per_n.insert(n.to_string(), total);
        }
        ok &= mismatches.is_empty();
        out.insert(name, json!({ "diagrams_by_top_length": per_n, "mismatches": mismatches }));
    }
    Ok((ok, json!(out)))
}

/// Reduced bar when the operad is augmented on the window, otherwise the unreduced bar
/// (H: dr₁ = gf − Id leaves the augmentation ideal).
fn bar_of(p: Arc<dyn Operad>, w: &Window, size: usize) -> Result<(Bar, &'static str)> {
    match Bar::reduced(p.clone(), w, size) {
        Ok(b) => Ok((b, "reduced")),
        Err(Error::NotAugmented(_)) => Ok((Bar::unreduced(p), "unreduced")),
        Err(e) => Err(e),
    }
}

fn bar(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let mut out = BTreeMap::new();
    let mut ok = true;
    for (name, p) in operads(c, a)? {
        let v = match bar_of(p, &w, size).and_then(|(b, kind)| Ok((check_bar(&b, &w, size, c.parallel)?, kind))) {
            Ok((n, kind)) => json!({ "construction": kind, "elements": n, "d_squared_zero": true }),
            Err(e) => {
                ok = false;
                json!({ "error": e.to_string() })
            }
        };
        out.insert(name, v);
    }
    Ok((ok, json!(out)))
}

fn cobar_task(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let mut out = BTreeMap::new();
    let mut ok = true;
    for (name, p) in operads(c, a)? {
        let r = bar_of(p, &w, size).and_then(|(b, kind)| {
            let o = cobar(Arc::new(b), &w, size)?;
            Ok((check_cobar(&o, &w, size, c.parallel)?, check_weight_filtration(&o, &w, size)?, kind))
        });
        let v = match r {
            Ok((n, f, kind)) => json!({ "construction": kind, "elements": n, "d_squared_zero": true, "filtration_checked": f }),
            Err(e) => {
                ok = false;
                json!({ "error": e.to_string() })
            }
        };
        out.insert(name, v);
    }
    Ok((ok, json!(out)))
}

fn sig_name(p: &dyn Operad, s: &Sig) -> String {
    let names = &p.colors().names;
    let ins: Vec<&str> = s.ins.iter().map(|&k| names[k as usize].as_str()).collect();
    format!("{};{}", ins.join(","), names[s.out as usize])
}

fn counit_verify(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let mut out = BTreeMap::new();
    let mut ok = true;
    for (name, p) in operads(c, a)? {
        match counit_certificate(p.clone(), &w, size, FULL, c.field) {
            Ok(certs) => {
                let mut table = BTreeMap::new();
                for (s, cert) in certs {
                    ok &= cert.is_quasi_iso;
                    let rows: BTreeMap<String, [usize; 3]> =
                        cert.per_degree.iter().filter(|(_, v)| v.0 + v.1 > 0).map(|(d, v)| (d.to_string(), [v.0, v.1, v.2])).collect();
                    table.insert(sig_name(p.as_ref(), &s), json!({ "quasi_iso": cert.is_quasi_iso, "homology_src_tgt_rank": rows }));
                }
                out.insert(name, json!(table));
            }
            Err(e) => {
                ok = false;
                out.insert(name, json!({ "error": e.to_string() }));
            }
        }
    }
    Ok((ok, json!(out)))
}

fn homology(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    if a.names.first() == Some(&"det") {
        let edges = a.num("edges", 6)?;
        let (mut checked, mut failures) = (0usize, Vec::new());
        let mut failing = 0usize;
        for t in trees_up_to(edges) {
            checked += 1;
            let h = det_complex(&t).homology(c.field)?;
            let expect: BTreeMap<i64, usize> = [(0, 1)].into();
            if h != expect {
                failing += 1;
                if failures.len() < 5 {
                    failures.push(json!({ "internal_edges": t.internal_edges(), "homology": h }));
                }
            }
        }
        return Ok((failing == 0, json!({ "trees": checked, "not_k_in_degree_0": failing, "examples": failures })));
    }
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let mut out = BTreeMap::new();
    for (name, p) in operads(c, a)? {
        let mut sigs: Vec<Sig> = p.all_elements(w.max_arity, size).iter().map(|x| p.sig(x)).collect();
        sigs.sort();
        sigs.dedup();
        let mut table = BTreeMap::new();
        for s in sigs {
            let cx = component_complex(p.as_ref(), &s, size, FULL)?;
            let h: BTreeMap<String, usize> = cx.homology(c.field)?.into_iter().map(|(d, n)| (d.to_string(), n)).collect();
            table.insert(sig_name(p.as_ref(), &s), json!({ "dims": cx.dims().into_iter().map(|(d, n)| (d.to_string(), n)).collect::<BTreeMap<_, _>>(), "homology": h }));
        }
        out.insert(name, json!(table));
    }
    Ok((true, json!(out)))
}

/// Seeded nonzero scalars; sample 0 is the identity.
fn scalars(seed: u64, n: usize) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|k| if k == 0 { 1 } else { [-3, -2, -1, 2, 3][rng.gen_range(0..5)] }).collect()
}

fn mc_check(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let samples = a.num("samples", 20)?;
    let mut out = BTreeMap::new();
    let mut ok = true;
    for (name, p) in operads(c, a)? {
        let b = match Bar::reduced(p.clone(), &w, size) {
            Ok(b) => Arc::new(b),
            Err(e) => {
                ok = false;
                out.insert(name, json!({ "error": e.to_string() }));
                continue;
            }
        };
        let mut rows = Vec::new();
        for t in scalars(c.seed, samples) {
            let phi: Arc<dyn OperadMap> = Arc::new(arity_scaling(p.colors().len(), t).on(p.clone()));
            let rt = round_trip(b.clone(), phi, &w, size)?;
            ok &= rt.ok();
            rows.push(json!({ "scalar": t, "ok": rt.ok(), "detail": rt }));
        }
        out.insert(name, json!(rows));
    }
    Ok((ok, json!(out)))
}

/// Order-preserving maps between the underlying sets, counted by listing every function.
pub fn brute_hom_count(x: AdjObj, y: AdjObj) -> usize {
    let (n, m) = (x.len(), y.len());
    if n == 0 {
        return 1;
    }
    let mut count = 0;
    let mut f = vec![0usize; n];
    if m == 0 {
        return 0;
    }
    loop {
        let mono = f.windows(2).all(|p| p[0] <= p[1]);
        let first = !matches!(x.kind, Kind::First | Kind::Nabla) || f[0] == 0;
        let last = !matches!(x.kind, Kind::Last | Kind::Nabla) || f[n - 1] == m - 1;
        count += usize::from(mono && first && last);
        let mut k = 0;
        while k < n && f[k] == m - 1 {
            f[k] = 0;
            k += 1;
        }
        if k == n {
            return count;
        }
        f[k] += 1;
    }
}

fn adj_build(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let n = a.num("n", 1)?;
    let homs = a.num("homs", 6)?;
    let adj = Arc::new(build_adj(n));
    let valid = adj.two_cat_object().validate(&Window::new(3, 1), 1);
    let mut ok = valid.is_ok();
    let mut mismatches = Vec::new();
    let mut counted = 0;
    for &k in KINDS.iter() {
        for i in 0..=homs as i64 {
            for j in 0..=homs as i64 {
                let (x, y) = (AdjObj::new(k, i)?, AdjObj::new(k, j)?);
                counted += 1;
                if hom_basis(x, y)?.len() != brute_hom_count(x, y) {
                    mismatches.push(format!("{x} -> {y}"));
                }
            }
        }
    }
    ok &= mismatches.is_empty();
    let mut v = json!({
        "objects": adj.colors().names,
        "cells": cell_counts(&adj, 2),
        "validates": valid.map_err(|e| e.to_string()).err(),
        "hom_pairs_counted": counted,
        "hom_count_mismatches": mismatches,
    });
    let mut functors = BTreeMap::new();
    for name in &a.names {
        let data = &c.s.adjunctions[*name];
        match strict_2functor(data, n, &Window::new(3, 1), 1) {
            Ok(sf) => {
                let fs: BTreeMap<String, String> =
                    adj.colors().all().map(|k| (adj.obj(k).to_string(), sf.functor_of(k).name.clone())).collect();
                functors.insert(name.to_string(), json!({ "two_functor": true, "functors": fs }));
            }
            Err(e) => {
                ok = false;
                functors.insert(name.to_string(), json!({ "two_functor": false, "error": e.to_string() }));
            }
        }
    }
    v["adjunctions"] = json!(functors);
    Ok((ok, v))
}

fn adj_verify(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let n = a.num("n", 1)?;
    let size = a.num("size", 1)?;
    let w = Window::new(a.num("arity", 2)?, a.num("weight", 2)?);
    let mut ok = true;
    let mut out = BTreeMap::new();
    for name in a.names_or(c.s.adjunctions.keys().cloned().collect()) {
        let data = &c.s.adjunctions[&name];
        let r = strict_2functor(data, n, &Window::new(3, 1), size).and_then(|sf| {
            let h = sf.induced();
            let full = homotopy_adjunction_check(&h, &w, size)?;
            let (monad, _) = h.monad()?;
            Ok((full, homotopy_monad_check(&monad, &w, size)?))
        });
        let v = match r {
            Ok((full, monad)) => json!({ "two_functor": true, "adjunction_elements": full, "monad_elements": monad }),
            Err(e) => {
                ok = false;
                json!({ "error": e.to_string() })
            }
        };
        out.insert(name, v);
    }
    Ok((ok, json!(out)))
}

fn h0(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let len = a.num("len", 6)?;
    let mut ok = true;
    let mut out = BTreeMap::new();
    for (name, p) in operads(c, a)? {
        let table = h0_table(p.as_ref(), len)?;
        let names = &p.colors().names;
        let dims: BTreeMap<String, usize> =
            table.dims.iter().map(|((s, t), d)| (format!("{}->{}", names[*s as usize], names[*t as usize]), *d)).collect();
        let mut v = json!({ "dims": dims });
        if let Some(pair) = a.kv.get("iso") {
            let model = &c.s.models[&name];
            let (x, y) = pair.split_once(',').ok_or_else(|| bad(a.line, "iso expects <x>,<y>"))?;
            let xl = model.resolve_sum(x).map_err(|m| bad(a.line, m))?;
            let yl = model.resolve_sum(y).map_err(|m| bad(a.line, m))?;
            let sx = xl.labels().next().map(|l| p.sig(l)).ok_or_else(|| bad(a.line, "iso needs nonzero elements"))?;
            let inverse = table.are_inverse(p.as_ref(), sx.ins[0], sx.out, &xl, &yl)?;
            ok &= inverse;
            v["iso"] = json!({ "pair": pair, "inverse_in_h0": inverse });
        }
        out.insert(name, v);
    }
    Ok((ok, json!(out)))
}

fn map_named<'a>(c: &'a Ctx, a: &Args) -> Result<Vec<(String, &'a (String, String, FnMap))>> {
    Ok(a.names_or(c.s.maps.keys().cloned().collect()).into_iter().map(|n| {
        let m = &c.s.maps[&n];
        (n, m)
    }).collect())
}

fn weq(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let mut ok = true;
    let mut out = BTreeMap::new();
    for (name, (src, tgt, f)) in map_named(c, a)? {
        let (p, qo) = (c.s.operad(src, a.line)?, c.s.operad(tgt, a.line)?);
        // identity witnesses at objects hit by f
        let witnesses: Vec<Witness> = qo
            .colors()
            .all()
            .filter_map(|t| {
                p.colors().all().find(|&s| f.color(s) == t).map(|s| Witness {
                    target: t,
                    source: s,
                    iso: Lin::single(qo.unit(t)),
                    inverse: Lin::single(qo.unit(t)),
                })
            })
            .collect();
        let v = match weak_equiv_check(f, p.as_ref(), qo.as_ref(), &w, size, FULL, &witnesses) {
            Ok(r) => {
                ok &= r.is_weak_equivalence;
                let comps: BTreeMap<String, bool> =
                    r.components.iter().map(|(s, cert)| (sig_name(p.as_ref(), s), cert.is_quasi_iso)).collect();
                json!({ "weak_equivalence": r.is_weak_equivalence, "witnesses_ok": r.witnesses_ok, "components": comps })
            }
            Err(e) => {
                ok = false;
                json!({ "error": e.to_string() })
            }
        };
        out.insert(name, v);
    }
    Ok((ok, json!(out)))
}

fn fib(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let mut ok = true;
    let mut out = BTreeMap::new();
    for (name, (src, tgt, f)) in map_named(c, a)? {
        let (p, qo) = (c.s.operad(src, a.line)?, c.s.operad(tgt, a.line)?);
        let r = fibration_check(f, p.as_ref(), qo.as_ref(), &w, size, &[])?;
        ok &= r;
        out.insert(name, json!({ "fibration": r }));
    }
    Ok((ok, json!(out)))
}

fn unital(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let samples = a.num("samples", 10)?;
    let sequences = a.num("sequences", 1000)?;
    let mut ok = true;
    let mut out = BTreeMap::new();
    for (name, p) in operads(c, a)? {
        let n = p.colors().len();
        let b: Arc<dyn Operad> = Arc::new(unitalize(p.clone()));
        let mut maps: Vec<FnMap> = scalars(c.seed, samples.saturating_sub(1))
            .into_iter()
            .map(|t| arity_scaling(n, t).on(p.clone()))
            .collect();
        maps.push(FnMap::new((0..n as Color).collect(), |x| match x {
            Label::Unit(_) => Lin::single(x.clone()),
            _ => Lin::zero(),
        }));
        let bij = map_bijection_check(p.clone(), b, &maps, &w, size)?;
        // red is idempotent on random words over the colors and the unit color n
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        let mut idem = 0;
        for _ in 0..sequences {
            let len = rng.gen_range(1..12);
            let seq: Vec<Color> = (0..len).map(|_| rng.gen_range(0..=n as Color)).collect();
            let r = red(&seq, Some(n as Color))?;
            idem += usize::from(red(&r, Some(n as Color))? == r);
        }
        ok &= bij && idem == sequences;
        out.insert(name, json!({ "samples": maps.len(), "extension_restriction_bijective": bij, "red_idempotent": idem, "sequences": sequences }));
    }
    Ok((ok, json!(out)))
}

fn twocat(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let w = window_of(c, a)?;
    let size = a.num("size", w.max_weight)?;
    let mut ok = true;
    let mut out = BTreeMap::new();
    for (name, p) in operads(c, a)? {
        let names: Vec<&str> = p.colors().names.iter().map(|s| s.as_str()).collect();
        let obj = TwoCatObject::new(Shape::single(&names), p.clone())?;
        let small = Window { max_weight: w.max_weight.min(2), ..w };
        let v = underlying_nseq(&obj, &small, size.min(2))?;
        let u = NSeq::unit(obj.shape.clone(), w);
        let odot_ok = collections_agree(&nseq_odot(&v, &v)?.coll, &odot(&v.coll, &v.coll)?)
            && collections_agree(&nseq_odot(&v, &u)?.coll, &odot(&v.coll, &u.coll)?);
        let (f2, _) = free_twocat(&v, w)?;
        let f1 = free_operad(&v.coll, &w);
        let mut free_ok = true;
        let mut sigs: Vec<Sig> = f1.all_elements(w.max_arity, size).iter().map(|x| f1.sig(x)).collect();
        sigs.sort();
        sigs.dedup();
        for s in &sigs {
            let x = component_complex(f2.op.as_ref(), s, size, FULL)?;
            let y = component_complex(&f1, s, size, FULL)?;
            free_ok &= x.dims() == y.dims();
        }
        let bar_ok = match (bar_twocat(&obj, &w, size), Bar::reduced(p.clone(), &w, size)) {
            (Ok(b2), Ok(b1)) => {
                let e2 = b2.all_elements(&w, size);
                e2 == b1.all_elements(&w, size) && e2.iter().all(|x| b2.diff(x) == b1.diff(x))
            }
            (Err(e1), Err(e2)) => e1 == e2,
            _ => false,
        };
        let counit_ok = match (counit_twocat(&obj, &w, size, FULL, c.field), counit_certificate(p.clone(), &w, size, FULL, c.field)) {
            (Ok(x), Ok(y)) => x == y,
            (Err(e1), Err(e2)) => e1 == e2,
            _ => false,
        };
        ok &= odot_ok && free_ok && bar_ok && counit_ok;
        out.insert(name, json!({ "odot": odot_ok, "free": free_ok, "free_signatures": sigs.len(), "bar": bar_ok, "counit": counit_ok }));
    }
    Ok((ok, json!(out)))
}

/// Hochschild D² = 0, comodule round trips and strict associativity of composition for a
/// chain of endofunctors f₀ ⇒ f₁ ⇒ f₂ ⇒ f₃ (missing ones are identities).
fn coh(c: &Ctx, a: &Args) -> Result<(bool, Value)> {
    let len = a.num("len", 3)?;
    let samples = a.num("samples", 10)?;
    let cats: Vec<&str> = a.names.iter().copied().filter(|n| c.s.models.contains_key(*n)).collect();
    let [cat_name] = cats[..] else { return Err(bad(a.line, "coh expects exactly one category")) };
    let cat = c.s.operad(cat_name, a.line)?;
    let mut fs: Vec<DgFunctor> = Vec::new();
    for n in a.names.iter().filter(|n| c.s.maps.contains_key(**n)) {
        let (src, tgt, f) = &c.s.maps[*n];
        if src != cat_name || tgt != cat_name {
            return Err(bad(a.line, format!("{n} is not an endofunctor of {cat_name}")));
        }
        fs.push(DgFunctor::new(n, cat.clone(), cat.clone(), f.clone()));
    }
    while fs.len() < 4 {
        fs.push(DgFunctor::identity(cat.clone()));
    }
    let words = Arc::new(Words::new(cat.clone(), len, 1));
    let sp = |i: usize, j: usize| CohSpace::new(&fs[i], &fs[j], words.clone(), 1);
    let (s01, s12, s23) = (sp(0, 1)?, sp(1, 2)?, sp(2, 3)?);
    let (s02, s13, s03) = (sp(0, 2)?, sp(1, 3)?, sp(0, 3)?);
    let mut dd_fail = Vec::new();
    let mut dims = BTreeMap::new();
    for (k, s) in [&s01, &s12, &s23].into_iter().enumerate() {
        for (l, _) in s.basis() {
            if !s.d(&s.d_basis(&l)).is_zero() {
                dd_fail.push(l.to_string());
            }
        }
        let cx = coh_complex(s)?;
        dims.insert(format!("{}=>{}", fs[k].name, fs[k + 1].name), cx.dims().into_iter().map(|(d, n)| (d.to_string(), n)).collect::<BTreeMap<_, _>>());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut random = |s: &CohSpace| -> Lin {
        let basis = s.basis();
        let deg = basis[rng.gen_range(0..basis.len())].1;
        let mut v = Lin::zero();
        for (l, d) in basis {
            if d == deg && rng.gen_bool(0.6) {
                v.add_term(l, q(rng.gen_range(-3..=3)));
            }
        }
        v
    };
    let (mut comodule_ok, mut assoc_ok) = (0, 0);
    for _ in 0..samples {
        let (t1, t2, t3) = (random(&s01), random(&s12), random(&s23));
        comodule_ok += usize::from([(&s01, &t1), (&s12, &t2), (&s23, &t3)].iter().all(|(s, t)| from_comodule(s, &comodule_form(s, t)) == **t));
        let all = compose_coh(&[(&s23, &t3), (&s12, &t2), (&s01, &t1)], &s03)?;
        let c21 = compose_coh(&[(&s12, &t2), (&s01, &t1)], &s02)?;
        let c32 = compose_coh(&[(&s23, &t3), (&s12, &t2)], &s13)?;
        let left = compose_coh(&[(&s13, &c32), (&s01, &t1)], &s03)?;
        let right = compose_coh(&[(&s23, &t3), (&s02, &c21)], &s03)?;
        let conv = convolve(&s03, &t3, &s23, &convolve(&s02, &t2, &s12, &t1, &s01), &s02);
        assoc_ok += usize::from(left == all && right == all && conv == all);
    }
    let ok = dd_fail.is_empty() && comodule_ok == samples && assoc_ok == samples;
    dd_fail.truncate(5);
    Ok((
        ok,
        json!({
            "functors": fs.iter().map(|f| f.name.clone()).collect::<Vec<_>>(),
            "word_length": len,
            "complex_dims": dims,
            "d_squared_failures": dd_fail,
            "comodule_round_trips": comodule_ok,
            "associative_samples": assoc_ok,
            "samples": samples,
        }),
    ))
}
