use std::process::Command as Process;

use orbilift_cli::ast::*;
use orbilift_cli::{parse, parse_expr, run, RunOptions};
use proptest::prelude::*;
use serde_json::Value;

fn results(src: &str) -> Vec<Value> {
    let session = parse(src).unwrap();
    let report = run(&session, &RunOptions::default()).unwrap();
    report.records.iter().map(|r| r.to_json()).collect()
}

#[test]
fn spec_examples() {
    let out = results(
        "group S3 = symmetric(3)\n\
         group Z2 = [[-1]]\n\
         analyze S3\n\
         lift d(y) over Z2\n\
         lift ddy(y) over Z2\n",
    );
    let a = &out[0]["result"];
    assert_eq!(a["order"], 6);
    assert_eq!(a["reflections"], 3);
    assert_eq!(a["is_reflection_group"], true);
    let hs = a["hyperplanes"].as_array().unwrap();
    assert_eq!(hs.len(), 3);
    assert!(hs.iter().all(|h| h["e_H"] == 2));

    assert_eq!(out[1]["result"]["verdict"], "lifts");
    assert_eq!(out[1]["result"]["lifted"], "2*z*d(z)");
    assert_eq!(out[2]["result"]["verdict"], "fails");
    assert_eq!(out[2]["result"]["mu_S"], -1);
}

#[test]
fn invariant_degrees_and_jacobian() {
    let out = results(
        "group Z4 = cyclic(4)\n\
         group S2 = symmetric(2)\n\
         group PM = scalar(2, 2)\n\
         invariants Z4\n\
         invariants S2\n\
         invariants PM\n",
    );
    let degrees: Vec<&Value> = out.iter().map(|r| &r["result"]["degrees"]).collect();
    assert_eq!(degrees[0], &serde_json::json!([4]));
    assert_eq!(degrees[1], &serde_json::json!([1, 2]));
    assert_eq!(degrees[2], &serde_json::json!([2, 2, 2]));
    assert_eq!(out[0]["result"]["matches_reflection_divisor"], true);
    assert_eq!(out[1]["result"]["matches_reflection_divisor"], true);
    assert_eq!(out[2]["result"]["jacobian_det"], Value::Null);
}

#[test]
fn connections_and_forms() {
    let out = results(
        "group D = [[1, 0], [0, zeta(3)]] on (u, v)\n\
         group S3 = symmetric(3)\n\
         connection C = { [y2; y2, y2] = -2/(3*y2), [y1; y1, y1] = y1^2 }\n\
         lift-connection C over D\n\
         lift-connection {} over D\n\
         form W = d(z1) ^ d(z2) ^ d(z3)\n\
         solomon (z1 - z2)*(z1 - z3)*(z2 - z3)*W over S3\n\
         solomon W over S3\n",
    );
    assert_eq!(out[0]["result"]["liftable"], true);
    assert_eq!(out[0]["result"]["lifted"], "{ [u; u, u] = u^2 }");
    assert_eq!(out[1]["result"]["liftable"], false);
    assert_eq!(out[1]["result"]["violations"][0]["index"], "[y2; y2, y2]");
    parse_expr(out[2]["result"]["phi"].as_str().unwrap()).unwrap();
    assert!(out[2]["result"]["phi"].as_str().unwrap().starts_with("d(y1) (x) d(y2) (x) d(y3)"));
    assert!(out[3]["error"]["message"].as_str().unwrap().contains("not G-invariant"));
}

#[test]
fn diffeomorphism_conditions() {
    let out = results(
        "group Z2 = cyclic(2)\n\
         group Z3 = cyclic(3)\n\
         check-diffeo (y) inverse (y) from Z2 to Z2\n\
         check-diffeo (3*y) inverse (y/3) from Z3 to Z3\n\
         check-diffeo (y) inverse (y) from Z2 to Z3\n\
         check-diffeo (y) inverse (2*y) from Z2 to Z2\n",
    );
    assert_eq!(out[0]["result"]["passes"], true);
    assert_eq!(out[1]["result"]["passes"], true);
    assert_eq!(out[2]["result"]["passes"], false);
    assert!(out[3]["error"]["message"].as_str().unwrap().contains("inverse"));
}

#[test]
fn engine_errors_keep_going_and_carry_locations() {
    let session = parse(
        "group Z2 = cyclic(2)\n\
         lift d(w) over Z2\n\
         lift d(y) over Z2\n",
    )
    .unwrap();
    let report = run(&session, &RunOptions::default()).unwrap();
    assert!(report.has_errors());
    let e = report.records[0].outcome.as_ref().unwrap_err();
    assert_eq!((e.span.line, e.span.column), (2, 8));
    assert!(e.message.contains("unknown coordinate `w`"));
    assert!(report.records[1].outcome.is_ok());
}

#[test]
fn resolution_errors() {
    let cases = [
        ("lift d(y) over G\n", (1, 16), "unknown name"),
        ("tensor T = d(y)\nanalyze T\n", (2, 9), "is a tensor"),
        ("group G = cyclic(2)\ngroup G = cyclic(3)\n", (2, 7), "already defined"),
        ("group G = [[1, 0], [0]]\n", (1, 11), "2x2"),
        ("group G = [[y]]\n", (1, 13), "constants"),
        ("group G = cyclic(2) on (a, b)\n", (1, 25), "dimension 1"),
        ("group G = dihedral(4)\n", (1, 11), "unknown group constructor"),
        ("lift T over G\ntensor T = d(y)\ngroup G = cyclic(2)\n", (1, 13), "before its definition"),
    ];
    for (src, (line, column), needle) in cases {
        let e = run(&parse(src).unwrap(), &RunOptions::default()).unwrap_err();
        assert_eq!((e.span.line, e.span.column), (line, column), "{src}: {e}");
        assert!(e.message.contains(needle), "{src}: {e}");
    }
}

#[test]
fn closure_limits_are_honored() {
    let src = "group G = [[zeta(7)]]\nanalyze G\n";
    let mut opts = RunOptions::default();
    opts.closure.cap = 5;
    let report = run(&parse(src).unwrap(), &opts).unwrap();
    assert!(report.records[0].to_json()["error"]["message"].as_str().unwrap().contains("cap of 5"));
    opts.closure.cap = 100;
    opts.closure.conductor_max = 6;
    let report = run(&parse(src).unwrap(), &opts).unwrap();
    assert!(report.records[0].to_json()["error"]["message"].as_str().unwrap().contains("conductor 7"));
}

#[test]
fn reports_are_deterministic() {
    let src = include_str!("data/tour.orb");
    let a = run(&parse(src).unwrap(), &RunOptions::default()).unwrap();
    let b = run(&parse(src).unwrap(), &RunOptions::default()).unwrap();
    assert_eq!(a.to_json_lines(), b.to_json_lines());
    assert_eq!(a.to_text(), b.to_text());
    for line in a.to_json_lines().lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(line.find("\"command\"").unwrap() < line.find("\"index\"").unwrap());
    }
}

#[test]
fn printed_results_parse_back() {
    let out = results(include_str!("data/tour.orb"));
    for r in &out {
        let Some(res) = r.get("result") else { continue };
        for key in ["tensor", "lifted", "phi", "form"] {
            if let Some(s) = res.get(key).and_then(Value::as_str) {
                if !s.starts_with('{') {
                    parse_expr(s).unwrap_or_else(|e| panic!("{s}: {e}"));
                }
            }
        }
    }
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_orbilift"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let ok = write("ok.orb", "group Z2 = cyclic(2)\nlift d(y) over Z2\n");
    let engine = write("engine.orb", "group Z2 = cyclic(2)\nsolomon d(q) over Z2\n");
    let syntax = write("syntax.orb", "group Z2 = cyclic(2\n");
    let unresolved = write("unresolved.orb", "analyze G\n");

    let out = binary().arg("run").arg(&ok).arg("--json").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["lifted"], "2*z*d(z)");

    assert_eq!(binary().arg("run").arg(&engine).output().unwrap().status.code(), Some(1));
    let out = binary().arg("run").arg(&syntax).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("line 2, column 1") && msg.contains("expected"), "{msg}");
    assert_eq!(binary().arg("run").arg(&unresolved).output().unwrap().status.code(), Some(2));

    let out = binary()
        .args(["validate", "thm37", "--rmax", "3", "--pqmax", "1", "--mrange", "-2..2", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["cases"], 2 * 4 * 5 * 3);
    assert_eq!(v["result"]["passed"], true);
}

fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y1", "y2", "z", "T", "u_1"]).prop_map(str::to_string)
}

fn name() -> impl Strategy<Value = Name> {
    ident().prop_map(|text| Name {
        text,
        span: Default::default(),
    })
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..20).prop_map(|n| ExprKind::Int(n.into())),
        ident().prop_map(ExprKind::Var),
        (1u32..13).prop_map(ExprKind::Zeta),
        (prop::bool::ANY, name()).prop_map(|(co, x)| {
            ExprKind::Slot(if co { SlotKind::Covariant } else { SlotKind::Contravariant }, x)
        }),
    ]
    .prop_map(|kind| Expr {
        kind,
        span: Default::default(),
    });
    leaf.prop_recursive(5, 40, 2, |inner| {
        let op = prop::sample::select(vec![
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Div,
            BinOp::Otimes,
            BinOp::Wedge,
        ]);
        prop_oneof![
            inner.clone().prop_map(|e| ExprKind::Neg(Box::new(e))),
            (inner.clone(), 0u32..5).prop_map(|(e, k)| ExprKind::Pow(Box::new(e), k)),
            (op, inner.clone(), inner).prop_map(|(op, a, b)| ExprKind::Binary(op, Box::new(a), Box::new(b))),
        ]
        .prop_map(|kind| Expr {
            kind,
            span: Default::default(),
        })
    })
}

fn command() -> impl Strategy<Value = CommandKind> {
    let exprs = || prop::collection::vec(expr(), 0..3);
    prop_oneof![
        name().prop_map(|group| CommandKind::Analyze { group }),
        (expr(), prop::bool::ANY, name(), exprs()).prop_map(|(expr, on, group, along)| {
            CommandKind::Divisor {
                expr,
                side: if on { Side::Source } else { Side::Orbit },
                group,
                along,
            }
        }),
        (expr(), name(), exprs()).prop_map(|(expr, group, off)| CommandKind::Lift { expr, group, off }),
        (
            prop::option::of(0u32..9),
            prop::option::of(0u32..4),
            prop::option::of((-5i64..0, 0i64..5))
        )
            .prop_map(|(rmax, pqmax, mrange)| CommandKind::ValidateThm37 { rmax, pqmax, mrange }),
        (prop::collection::vec(expr(), 1..3), name(), name(), name()).prop_map(|(comps, inv, from, to)| {
            CommandKind::CheckDiffeo {
                map: MapRef::Literal(MapLit {
                    components: comps,
                    span: Default::default(),
                }),
                inverse: MapRef::Named(inv),
                from,
                to,
            }
        }),
        (prop::collection::vec((name(), name(), name(), expr()), 0..3), name()).prop_map(|(entries, group)| {
            CommandKind::LiftConnection {
                connection: ConnectionRef::Literal(ConnectionLit {
                    entries: entries
                        .into_iter()
                        .map(|(upper, b, c, value)| ConnectionEntry {
                            upper,
                            lower: (b, c),
                            value,
                        })
                        .collect(),
                    span: Default::default(),
                }),
                group,
            }
        }),
    ]
}

fn statement() -> impl Strategy<Value = StmtKind> {
    let matrix = (1usize..3).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(expr(), n), n).prop_map(|rows| MatrixLit {
            rows,
            span: Default::default(),
        })
    });
    prop_oneof![
        (name(), prop::collection::vec(matrix, 1..3), prop::option::of(prop::collection::vec(name(), 1..3)))
            .prop_map(|(name, ms, coords)| StmtKind::Group {
                name,
                def: GroupDef::Generators(ms),
                coords,
            }),
        (name(), name(), prop::collection::vec(1u32..7, 1..3)).prop_map(|(name, b, args)| StmtKind::Group {
            name,
            def: GroupDef::Builtin {
                name: b,
                args: args.into_iter().map(|a| (a, Default::default())).collect(),
            },
            coords: None,
        }),
        (prop::bool::ANY, name(), expr()).prop_map(|(t, name, expr)| StmtKind::Object {
            kind: if t { ObjectKind::Tensor } else { ObjectKind::Form },
            name,
            expr,
        }),
        (name(), prop::collection::vec(expr(), 1..3)).prop_map(|(name, components)| StmtKind::Map {
            name,
            value: MapLit {
                components,
                span: Default::default(),
            },
        }),
        command().prop_map(|kind| StmtKind::Command(Command {
            kind,
            span: Default::default(),
        })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expressions_print_and_parse_back(e in expr()) {
        let printed = e.to_string();
        let again = parse_expr(&printed).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        prop_assert_eq!(&again, &e, "{}", printed);
    }

    #[test]
    fn sessions_print_and_parse_back(stmts in prop::collection::vec(statement(), 0..6)) {
        let session = Session {
            statements: stmts
                .into_iter()
                .map(|kind| Stmt { kind, span: Default::default() })
                .collect(),
        };
        let printed = session.to_string();
        let again = parse(&printed).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        prop_assert_eq!(&again, &session, "{}", printed);
        prop_assert_eq!(again.to_string(), printed);
    }
}
