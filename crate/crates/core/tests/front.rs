use nqverify::error::Span;
use nqverify::front::pretty::print_stmt;
use nqverify::front::{parse, parse_stmts, Stmt};
use proptest::prelude::*;

const VARS: [&str; 3] = ["q", "r", "s"];

fn vars() -> impl Strategy<Value = Vec<String>> {
    proptest::sample::subsequence(VARS.to_vec(), 1..=3)
        .prop_shuffle()
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn leaf() -> impl Strategy<Value = Stmt> {
    prop_oneof![
        Just(Stmt::Skip(Span::default())),
        Just(Stmt::Abort(Span::default())),
        vars().prop_map(|vars| Stmt::Init {
            vars,
            span: Span::default()
        }),
        (vars(), prop_oneof![Just("X"), Just("H"), Just("CX"), Just("W1")]).prop_map(|(vars, op)| Stmt::Unitary {
            vars,
            op: op.to_string(),
            span: Span::default()
        }),
    ]
}

fn stmt() -> impl Strategy<Value = Stmt> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Stmt::seq),
            proptest::collection::vec(inner.clone(), 2..4).prop_map(|b| Stmt::ndet(b, Span::default())),
            (vars(), inner.clone(), inner.clone()).prop_map(|(vars, t, e)| Stmt::If {
                meas: "M01".into(),
                vars,
                then_branch: Box::new(t),
                else_branch: Box::new(e),
                span: Span::default(),
            }),
            (vars(), inner).prop_map(|(vars, body)| Stmt::While {
                meas: "M01".into(),
                vars,
                body: Box::new(body),
                invariant: None,
                span: Span::default(),
            }),
        ]
    })
}

/// Variable tuples of every statement, gathered by walking the printed text.
fn vars_in_text(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('[') {
        let close = rest[open..].find(']').unwrap() + open;
        for v in rest[open + 1..close].split_whitespace() {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        }
        rest = &rest[close + 1..];
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(s in stmt()) {
        let text = print_stmt(&s);
        let back = parse_stmts(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(print_stmt(&back), text);
    }

    #[test]
    fn quantum_vars_are_the_union_of_tuples(s in stmt()) {
        let mut got = s.quantum_vars();
        let mut expected = vars_in_text(&print_stmt(&s));
        got.sort();
        expected.sort();
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn choice_nesting_is_flattened() {
    let a = parse_stmts("( [q] *= X # ( [q] *= H # skip ) )").unwrap();
    let b = parse_stmts("( ( [q] *= X # [q] *= H ) # skip )").unwrap();
    let c = parse_stmts("( [q] *= X □ [q] *= H □ skip )").unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(matches!(a, Stmt::NDet(ref bs, _) if bs.len() == 3));
}

#[test]
fn declarations_round_trip() {
    let src = "def W := load \"w.qmat.json\" end\n\
               def p := proof[q r] : { I[q] }; [q r] :=0; if M01[q] then [q r] *= W end; { P0[r] } end\n\
               show p end";
    let file = parse(src).unwrap();
    let printed = nqverify::front::pretty::print_file(&file);
    assert_eq!(parse(&printed).unwrap(), file);
}
