use clock_basic::ast::{ArithOp, CmpOp, Expr, LcdArg, Program, Stmt};
use clock_basic::{compile, parse, run, tokenize, Env, LcdMachine, Pin, RuntimeError, ScriptedPins};
use clock_core::glyphs::{program_cgram, Digit, GlyphSet, SlotLoad};
use clock_core::lcd::{self, LcdState};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["hh", "mm", "ss", "x", "count_1"]).prop_map(String::from)
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        any::<i16>().prop_map(Expr::Int),
        name().prop_map(Expr::Var),
        (0u8..4, 0u8..8).prop_map(|(port, bit)| Expr::Pin(Pin { port, bit })),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (prop::sample::select(vec![ArithOp::Add, ArithOp::Sub]), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Expr::Arith(op, Box::new(a), Box::new(b))),
            (
                prop::sample::select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Gt]),
                inner.clone(),
                inner
            )
                .prop_map(|(op, a, b)| Expr::Cmp(op, Box::new(a), Box::new(b))),
        ]
    })
}

fn simple_stmt() -> impl Strategy<Value = Stmt> {
    prop_oneof![
        (name(), expr()).prop_map(|(n, e)| Stmt::Assign(n, e)),
        name().prop_map(Stmt::Incr),
        name().prop_map(Stmt::Decr),
        Just(Stmt::Cls),
        expr().prop_map(Stmt::Waitms),
        (expr(), expr()).prop_map(|(r, c)| Stmt::LcdLocate(r, c)),
        prop::collection::vec(
            prop_oneof![
                "[a-zA-Z0-9 :=]{0,8}".prop_map(LcdArg::Text),
                expr().prop_map(LcdArg::Chr),
                expr().prop_map(LcdArg::Number),
            ],
            1..4
        )
        .prop_map(Stmt::LcdPrint),
        (expr(), prop::array::uniform8(expr()))
            .prop_map(|(s, rows)| Stmt::DefChar(s, Box::new(rows))),
    ]
}

/// Well-formed statements: Exit only generated inside a loop body.
fn stmt(in_loop: bool) -> BoxedStrategy<Stmt> {
    let base = if in_loop {
        prop_oneof![4 => simple_stmt(), 1 => Just(Stmt::ExitLoop)].boxed()
    } else {
        simple_stmt().boxed()
    };
    base.prop_recursive(3, 24, 4, move |_| {
        prop_oneof![
            (expr(), prop::collection::vec(stmt_leaf(in_loop), 0..3), prop::option::of(prop::collection::vec(stmt_leaf(in_loop), 0..3)))
                .prop_map(|(cond, then_block, else_block)| Stmt::If { cond, then_block, else_block }),
            prop::collection::vec(stmt_leaf(true), 0..3).prop_map(Stmt::DoLoop),
        ]
    })
    .boxed()
}

fn stmt_leaf(in_loop: bool) -> BoxedStrategy<Stmt> {
    if in_loop {
        prop_oneof![4 => simple_stmt(), 1 => Just(Stmt::ExitLoop)].boxed()
    } else {
        simple_stmt().boxed()
    }
}

fn program() -> impl Strategy<Value = Program> {
    prop::collection::vec(stmt(false), 0..6).prop_map(|body| Program { body })
}

proptest! {
    #[test]
    fn print_parse_round_trip(p in program()) {
        let printed = p.to_string();
        let reparsed = parse(&tokenize(&printed).unwrap()).unwrap();
        prop_assert_eq!(&reparsed, &p, "printed:\n{}", printed);
        prop_assert_eq!(reparsed.to_string(), printed);
    }

    #[test]
    fn runs_are_deterministic(levels in prop::collection::vec(any::<u8>(), 1..60), fuel in 1u64..5_000) {
        let program = clock_basic::listings::adjustment_loop();
        let once = || {
            let mut env = Env::new().bind_machine(ScriptedPins::port3(levels.clone()));
            env.set("hh", 12);
            let r = run(&program, &mut env, fuel);
            (r, env)
        };
        prop_assert_eq!(once(), once());
    }

    #[test]
    fn more_fuel_same_result(levels in prop::collection::vec(any::<u8>(), 1..60), extra in 0u64..10_000) {
        let program = clock_basic::listings::adjustment_loop();
        let mut env = Env::new().bind_machine(ScriptedPins::port3(levels.clone()));
        let first = run(&program, &mut env, 1_000_000).unwrap();
        let mut again = Env::new().bind_machine(ScriptedPins::port3(levels));
        let second = run(&program, &mut again, first.steps + extra).unwrap();
        prop_assert_eq!(first, second);
        prop_assert_eq!(env, again);
    }
}

#[test]
fn listing_text_round_trips_through_printer() {
    for (_, source) in clock_basic::listings::ALL {
        let program = compile(source).unwrap();
        assert_eq!(compile(&program.to_string()).unwrap(), program);
    }
}

#[test]
fn too_little_fuel_is_reported() {
    let program = clock_basic::listings::adjustment_loop();
    let mut env = Env::new().bind_machine(ScriptedPins::port3(vec![0xFF; 10]));
    let full = run(&program, &mut env, 1_000_000).unwrap();
    let mut short = Env::new().bind_machine(ScriptedPins::port3(vec![0xFF; 10]));
    assert_eq!(
        run(&program, &mut short, full.steps - 1),
        Err(RuntimeError::FuelExhausted(full.steps - 1))
    );
}

#[test]
fn defchar_matches_direct_cgram_programming() {
    let glyphs = GlyphSet::shipped();
    let digit = Digit::new(8).unwrap();
    let rows = glyphs.get(digit).rows();
    let src = format!(
        "Cls\nDeflcdchar 0, {}\nLocate 1 , 1\nLcd Chr(0)\n",
        rows.map(|r| r.to_string()).join(", ")
    );
    let mut env = Env::new().bind_machine(LcdMachine::default());
    run(&compile(&src).unwrap(), &mut env, 100).unwrap();
    let via_basic = env.machine().lcd().clone();

    let mut direct = LcdState::reset();
    lcd::init_4bit(&mut direct).unwrap();
    direct.command(lcd::cmd::CLEAR).unwrap();
    for w in program_cgram(&[SlotLoad { slot: 0, digit }], &glyphs) {
        direct.apply(w).unwrap();
    }
    direct.command(0x80).unwrap();
    direct.write_data(0).unwrap();

    assert_eq!(via_basic.render_cell(0, 0).rows(), rows);
    assert_eq!(via_basic.render_screen(), direct.render_screen());
    assert_eq!(via_basic.cgram(), direct.cgram());
}

#[test]
fn lcd_text_and_numbers() {
    let mut env = Env::new().bind_machine(LcdMachine::default());
    env.set("hh", 7);
    run(&compile("Locate 2 , 3\nLcd \"H=\" ; Hh").unwrap(), &mut env, 100).unwrap();
    let lcd = env.machine().lcd();
    assert_eq!(&lcd.visible_codes()[1][2..5], b"H=7");
}
