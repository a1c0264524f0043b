//! A handful of small lattices used throughout the tests and the CLI.

use std::sync::Arc;

use crate::lattice::FiniteLattice;

fn build(name: &str, elements: &[&str], covers: &[(&str, &str)]) -> Arc<FiniteLattice> {
    Arc::new(FiniteLattice::build(name, elements, covers).expect("built-in lattice is valid"))
}

/// The two-element chain `0 < 1`.
pub fn c2() -> Arc<FiniteLattice> {
    build("C2", &["0", "1"], &[("0", "1")])
}

/// The three-element chain `0 < a < 1`.
pub fn c3() -> Arc<FiniteLattice> {
    build("C3", &["0", "a", "1"], &[("0", "a"), ("a", "1")])
}

/// The four-element chain `0 < a < b < 1`.
pub fn c4() -> Arc<FiniteLattice> {
    build("C4", &["0", "a", "b", "1"], &[("0", "a"), ("a", "b"), ("b", "1")])
}

/// The Boolean algebra on two atoms.
pub fn b2() -> Arc<FiniteLattice> {
    build(
        "B2",
        &["0", "p", "q", "1"],
        &[("0", "p"), ("0", "q"), ("p", "1"), ("q", "1")],
    )
}

/// The diamond: three pairwise incomparable atoms under a common top.
pub fn m3() -> Arc<FiniteLattice> {
    build(
        "M3",
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
    )
}

/// The pentagon `0 < a < b < 1`, `0 < c < 1`.
pub fn n5() -> Arc<FiniteLattice> {
    build(
        "N5",
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
    )
}

pub fn all() -> Vec<Arc<FiniteLattice>> {
    vec![c2(), c3(), c4(), b2(), m3(), n5()]
}

/// Looks up a built-in lattice by name.
pub fn builtin(name: &str) -> Option<Arc<FiniteLattice>> {
    all().into_iter().find(|l| l.name() == name)
}
