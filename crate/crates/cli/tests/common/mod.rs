#![allow(dead_code)]

use rand::Rng;

const TOKENS: [&str; 22] = [
    "r", "exp", "sqrt", "(", ")", "+", "-", "*", "/", "^", "1", "2.5", "1e-3", "0", ".", " ", "e",
    "x", "((", "))", "--", "3E+2",
];

/// Random input for the expression parser: token soup that is often almost valid,
/// or arbitrary characters including multibyte ones.
pub fn fuzz_input(rng: &mut impl Rng) -> String {
    if rng.random_bool(0.6) {
        let n = rng.random_range(0..24);
        (0..n)
            .map(|_| TOKENS[rng.random_range(0..TOKENS.len())])
            .collect()
    } else {
        let n = rng.random_range(0..40);
        (0..n)
            .map(|_| match rng.random_range(0..10) {
                0 => char::from_u32(rng.random_range(0x80..0x3000)).unwrap_or('?'),
                _ => char::from(rng.random_range(0x20u8..0x7f)),
            })
            .collect()
    }
}

pub fn coulomb_config() -> &'static str {
    r#"{
        "problem": "two_body",
        "phys": { "mur": 1.0, "potentials": [{ "type": "expr", "expr": "-1/r" }] },
        "num": { "nmax": 10, "r1": 0.1, "rnmax": 30.0 }
    }"#
}
