use std::path::Path;

use hoalg::presentation::{parse_sum, Presentation, Session};
use hoalg::Error;

fn examples() -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("presentations");
    let mut out: Vec<(String, String)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "hoalg"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn every_example_prints_and_reparses_to_itself() {
    let files = examples();
    assert!(files.len() >= 10);
    for (name, text) in files {
        let p = Presentation::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = p.to_string();
        let q = Presentation::parse(&printed).unwrap_or_else(|e| panic!("{name} reprinted: {e}\n{printed}"));
        assert_eq!(p.without_lines(), q.without_lines(), "{name}");
        // printing is a fixed point after one round
        assert_eq!(q.to_string(), printed, "{name}");
    }
}

#[test]
fn every_example_but_the_bad_one_validates() {
    for (name, text) in examples() {
        let r = Session::load(&text);
        if name == "bad_square.hoalg" {
            match r {
                Err(Error::Validation(m)) => {
                    assert!(m.starts_with("line 2:"), "{m}");
                    assert!(m.contains("generator c"), "{m}");
                }
                Err(e) => panic!("wrong error {e}"),
                Ok(_) => panic!("d² ≠ 0 accepted"),
            }
        } else {
            r.unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn empty_file_has_defaults() {
    let p = Presentation::parse("").unwrap();
    assert!(p.tasks.is_empty() && p.operads.is_empty());
    assert_eq!(p.seed, 0);
    assert_eq!(p.window.max_arity, 3);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let cases = [
        ("field Q\nwindow 3:1\n", 2),
        ("operad P = builtin Nope\n", 1),
        ("\n\noperad P\n  colors x\n  gen a : x -> y deg 0\nend\n", 5),
        ("operad P\n  colors x\n", 1),
        ("task frobnicate\n", 1),
        ("seed -3\n", 1),
    ];
    for (text, line) in cases {
        match Presentation::parse(text).and_then(Session::new) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            Err(Error::Validation(m)) => assert!(m.starts_with(&format!("line {line}:")), "{text:?}: {m}"),
            Err(e) => panic!("{text:?}: unexpected {e}"),
            Ok(_) => panic!("{text:?} accepted"),
        }
    }
}

#[test]
fn sums_accept_coefficients_leaves_and_nesting() {
    let s = parse_sum("2 m(|,m) - 1/3*m(m(|,|),|) + Id_x").unwrap();
    assert_eq!(s.len(), 3);
    assert!(parse_sum("0").unwrap().is_empty());
    assert!(parse_sum("m(|,").is_err());
    assert!(parse_sum("2 +").is_err());
}

#[test]
fn unknown_task_operand_is_a_validation_error() {
    let s = Session::load("operad A = builtin A\ntask bar A B\n").unwrap();
    let r = hoalg::cli::run(&s, None, &Default::default());
    assert!(matches!(r, Err(Error::Validation(m)) if m.starts_with("line 2")));
}
