//! Named fixture automata used throughout the test suites and exposed by
//! the CLI `fixtures` command. Each Boolean fixture `A_f` has `f` as the
//! only one of the six Schaefer operations preserving its language.

use crate::automaton::{Automaton, Transition};
use crate::domain::Domain;

fn build(states: &[&str], initial: &[&str], accepting: &[&str], trans: &[(&str, u16, &str)]) -> Automaton {
    let id = |name: &str| states.iter().position(|s| *s == name).unwrap() as u32;
    Automaton::new(
        Domain::boolean(),
        states.iter().map(|s| s.to_string()).collect(),
        initial.iter().map(|s| id(s)).collect(),
        accepting.iter().map(|s| id(s)).collect(),
        trans.iter().map(|&(f, d, t)| Transition { from: id(f), sym: d, to: id(t) }).collect(),
    )
    .expect("fixture automata are well formed")
}

/// `A_NAE`: words containing both a 0 and a 1, the complement of `0* + 1*`.
pub fn nae() -> Automaton {
    build(
        &["s", "z", "o", "b"],
        &["s"],
        &["b"],
        &[
            ("s", 0, "z"),
            ("s", 1, "o"),
            ("z", 0, "z"),
            ("z", 1, "b"),
            ("o", 0, "b"),
            ("o", 1, "o"),
            ("b", 0, "b"),
            ("b", 1, "b"),
        ],
    )
}

/// `A_ODD`: words with an odd number of 1s.
pub fn odd() -> Automaton {
    build(
        &["e", "d"],
        &["e"],
        &["d"],
        &[("e", 0, "e"), ("e", 1, "d"), ("d", 0, "d"), ("d", 1, "e")],
    )
}

/// `A_Maj`: the language `(001 + 010 + 110)*`.
pub fn maj() -> Automaton {
    build(
        &["r", "a", "b", "c", "d", "e"],
        &["r"],
        &["r"],
        &[
            ("r", 0, "a"),
            ("a", 0, "b"),
            ("b", 1, "r"),
            ("a", 1, "c"),
            ("c", 0, "r"),
            ("r", 1, "d"),
            ("d", 1, "e"),
            ("e", 0, "r"),
        ],
    )
}

/// `A_Minor`: the ODD language, whose slices are affine over GF(2).
pub fn minor() -> Automaton {
    odd()
}

/// `A_∧`: `1(000 + 001 + ... + 110)⁺`, 3-bit blocks excluding 111 behind a
/// forced leading 1.
pub fn and_fixture() -> Automaton {
    build(
        &["s", "b0", "p1", "p0", "q11", "qok", "acc"],
        &["s"],
        &["acc"],
        &[
            ("s", 1, "b0"),
            ("b0", 1, "p1"),
            ("b0", 0, "p0"),
            ("p1", 1, "q11"),
            ("p1", 0, "qok"),
            ("p0", 0, "qok"),
            ("p0", 1, "qok"),
            ("q11", 0, "acc"),
            ("qok", 0, "acc"),
            ("qok", 1, "acc"),
            ("acc", 1, "p1"),
            ("acc", 0, "p0"),
        ],
    )
}

/// `A_∨`: `0(001 + ... + 111)⁺`, 3-bit blocks excluding 000 behind a forced
/// leading 0.
pub fn or_fixture() -> Automaton {
    build(
        &["s", "b0", "p0", "pk", "q00", "qok", "acc"],
        &["s"],
        &["acc"],
        &[
            ("s", 0, "b0"),
            ("b0", 0, "p0"),
            ("b0", 1, "pk"),
            ("p0", 0, "q00"),
            ("p0", 1, "qok"),
            ("pk", 0, "qok"),
            ("pk", 1, "qok"),
            ("q00", 1, "acc"),
            ("qok", 0, "acc"),
            ("qok", 1, "acc"),
            ("acc", 0, "p0"),
            ("acc", 1, "pk"),
        ],
    )
}

/// `A_0`: `(000 + 011 + 101)*`.
pub fn const0_fixture() -> Automaton {
    build(
        &["m", "x", "y00", "y01", "z1", "z10"],
        &["m"],
        &["m"],
        &[
            ("m", 0, "x"),
            ("x", 0, "y00"),
            ("y00", 0, "m"),
            ("x", 1, "y01"),
            ("y01", 1, "m"),
            ("m", 1, "z1"),
            ("z1", 0, "z10"),
            ("z10", 1, "m"),
        ],
    )
}

/// `A_1`: `(111 + 100 + 010)*`.
pub fn const1_fixture() -> Automaton {
    build(
        &["m", "p", "p11", "p10", "q0", "q01"],
        &["m"],
        &["m"],
        &[
            ("m", 1, "p"),
            ("p", 1, "p11"),
            ("p11", 1, "m"),
            ("p", 0, "p10"),
            ("p10", 0, "m"),
            ("m", 0, "q0"),
            ("q0", 1, "q01"),
            ("q01", 0, "m"),
        ],
    )
}

/// `NAE₃*`: `(D³ \ {000, 111})*`, the single-constraint reduction target.
pub fn nae3_star() -> Automaton {
    build(
        &["r", "s0", "s1", "t00", "t11", "tm"],
        &["r"],
        &["r"],
        &[
            ("r", 0, "s0"),
            ("r", 1, "s1"),
            ("s0", 0, "t00"),
            ("s0", 1, "tm"),
            ("s1", 0, "tm"),
            ("s1", 1, "t11"),
            ("t00", 1, "r"),
            ("t11", 0, "r"),
            ("tm", 0, "r"),
            ("tm", 1, "r"),
        ],
    )
}

/// All named fixtures in a fixed order, keyed by their file-safe names.
pub fn all() -> Vec<(&'static str, Automaton)> {
    vec![
        ("A_NAE", nae()),
        ("A_ODD", odd()),
        ("A_Maj", maj()),
        ("A_Minor", minor()),
        ("A_and", and_fixture()),
        ("A_or", or_fixture()),
        ("A_0", const0_fixture()),
        ("A_1", const1_fixture()),
    ]
}
