//! Finite complete lattices.
//!
//! A [`FiniteLattice`] is built from a cover relation over named elements. The
//! reflexive-transitive closure is computed here, then the poset is checked for
//! antisymmetry, a bottom, a top and binary joins and meets. Since the lattice
//! is finite and bounded, binary joins and meets make it complete.
//!
//! Elements are identified by their declaration index; every enumeration in
//! this crate runs in increasing index order.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of elements so that subsets fit in an [`ElemSet`].
pub const MAX_ELEMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice has no elements")]
    Empty,
    #[error("lattice has {0} elements, at most {MAX_ELEMENTS} are supported")]
    TooLarge(usize),
    #[error("element `{0}` is declared twice")]
    DuplicateElement(String),
    #[error("element `{0}` is not declared")]
    UnknownElement(String),
    #[error("covers do not define a partial order: `{0}` and `{1}` lie on a cycle")]
    NotAPartialOrder(String, String),
    #[error("no least element")]
    NoBottom,
    #[error("no greatest element")]
    NoTop,
    #[error("`{0}` and `{1}` have no unique {2}")]
    NotALattice(String, String, &'static str),
    #[error("bottom and top coincide; a lattice needs 0 != 1")]
    TrivialLattice,
    #[error("element index {0} is out of range")]
    ElementNotInLattice(usize),
}

/// A subset of lattice elements, stored as a bitmask over element indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElemSet(u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ElemSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        ElemSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn union(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = ElemSet> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            // Standard submask successor: increment within the holes of `mask`.
            next = if cur == mask {
                None
            } else {
                Some((cur | !mask).wrapping_add(1) & mask)
            };
            Some(ElemSet(cur))
        })
    }

    /// The `k`-th subset of `self` in increasing bitmask order: the bits of `k`
    /// are deposited into the member positions of `self`.
    pub fn nth_subset(self, mut k: u64) -> ElemSet {
        let mut out = 0u64;
        for i in self.iter() {
            if k == 0 {
                break;
            }
            if k & 1 == 1 {
                out |= 1 << i;
            }
            k >>= 1;
        }
        ElemSet(out)
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A validated finite lattice with distinct bottom and top.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteLattice {
    name: String,
    elements: Vec<String>,
    // leq[x * n + y] is true iff x <= y
    leq: Vec<bool>,
    bottom: usize,
    top: usize,
    join: Vec<usize>,
    meet: Vec<usize>,
}

impl FiniteLattice {
    /// Builds a lattice from element names and `(lower, upper)` cover pairs.
    pub fn build<S: AsRef<str>>(name: &str, elements: &[S], covers: &[(S, S)]) -> Result<Self, LatticeError> {
        let elements: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        let n = elements.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if n > MAX_ELEMENTS {
            return Err(LatticeError::TooLarge(n));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(LatticeError::DuplicateElement(e.clone()));
            }
        }
        let index = |s: &str| {
            elements
                .iter()
                .position(|e| e == s)
                .ok_or_else(|| LatticeError::UnknownElement(s.to_string()))
        };

        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (lo, hi) in covers {
            let (lo, hi) = (index(lo.as_ref())?, index(hi.as_ref())?);
            if lo == hi {
                return Err(LatticeError::NotAPartialOrder(
                    elements[lo].clone(),
                    elements[hi].clone(),
                ));
            }
            leq[lo * n + hi] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(LatticeError::NotAPartialOrder(elements[i].clone(), elements[j].clone()));
                }
            }
        }

        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| leq[b * n + x]))
            .ok_or(LatticeError::NoBottom)?;
        let top = (0..n)
            .find(|&t| (0..n).all(|x| leq[x * n + t]))
            .ok_or(LatticeError::NoTop)?;
        if bottom == top {
            return Err(LatticeError::TrivialLattice);
        }

        let least = |cands: Vec<usize>, up: bool| {
            cands
                .iter()
                .copied()
                .find(|&u| cands.iter().all(|&v| if up { leq[u * n + v] } else { leq[v * n + u] }))
        };
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                let upper = (0..n).filter(|&u| leq[x * n + u] && leq[y * n + u]).collect();
                join[x * n + y] = least(upper, true)
                    .ok_or_else(|| LatticeError::NotALattice(elements[x].clone(), elements[y].clone(), "join"))?;
                let lower = (0..n).filter(|&u| leq[u * n + x] && leq[u * n + y]).collect();
                meet[x * n + y] = least(lower, false)
                    .ok_or_else(|| LatticeError::NotALattice(elements[x].clone(), elements[y].clone(), "meet"))?;
            }
        }

        Ok(FiniteLattice {
            name: name.to_string(),
            elements,
            leq,
            bottom,
            top,
            join,
            meet,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.len() + y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.len() + y]
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.len() + y]
    }

    /// All elements.
    pub fn universe(&self) -> ElemSet {
        (0..self.len()).collect()
    }

    /// The nonzero elements, i.e. the carrier `L \ {0}` of the underlying set.
    pub fn nonzero(&self) -> ElemSet {
        let mut s = self.universe();
        s.remove(self.bottom);
        s
    }

    /// Least upper bound of a subset; the empty join is the bottom.
    pub fn join_of(&self, subset: ElemSet) -> Result<usize, LatticeError> {
        if let Some(bad) = subset.iter().find(|&i| i >= self.len()) {
            return Err(LatticeError::ElementNotInLattice(bad));
        }
        Ok(self.join_all(subset))
    }

    /// `join_of` for subsets already known to lie in the lattice.
    pub(crate) fn join_all(&self, subset: ElemSet) -> usize {
        subset.iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn format_set(&self, s: ElemSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.element_name(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// The same elements with the order reversed; joins and meets swap roles.
    pub fn dual(&self) -> FiniteLattice {
        let n = self.len();
        let mut leq = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                leq[x * n + y] = self.leq(y, x);
            }
        }
        FiniteLattice {
            name: format!("{}^op", self.name),
            elements: self.elements.clone(),
            leq,
            bottom: self.top,
            top: self.bottom,
            join: self.meet.clone(),
            meet: self.join.clone(),
        }
    }

    /// Elements covering the bottom.
    pub fn atoms(&self) -> ElemSet {
        let n = self.nonzero();
        n.iter().filter(|&x| n.iter().all(|y| !self.lt(y, x))).collect()
    }

    /// Pairs `(x, y)` with `x < y` and nothing strictly between them.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.lt(x, y) && !(0..n).any(|z| self.lt(x, z) && self.lt(z, y)) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Nonzero elements that are not the join of the elements strictly below them.
    pub fn join_irreducibles(&self) -> ElemSet {
        self.nonzero()
            .iter()
            .filter(|&x| {
                let below: ElemSet = (0..self.len()).filter(|&y| self.lt(y, x)).collect();
                self.join_all(below) != x
            })
            .collect()
    }

    pub fn is_atomistic(&self) -> bool {
        let atoms = self.atoms();
        self.nonzero().iter().all(|x| {
            let below: ElemSet = atoms.iter().filter(|&a| self.leq(a, x)).collect();
            self.join_all(below) == x
        })
    }

    /// An element `u != 1` dominating every element other than the top.
    pub fn fixed_top_coatom(&self) -> Option<usize> {
        (0..self.len()).find(|&u| u != self.top && (0..self.len()).all(|v| v == self.top || self.leq(v, u)))
    }

    /// First (by index) order-reversing involution `x -> x'` with
    /// `x v x' = 1` and `x ^ x' = 0`, found by exhaustive backtracking.
    pub fn orthocomplement(&self) -> Option<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.len()];
        if self.assign_complement(0, &mut comp) {
            Some(comp)
        } else {
            None
        }
    }

    fn assign_complement(&self, x: usize, comp: &mut [usize]) -> bool {
        let n = self.len();
        if x == n {
            return true;
        }
        if comp[x] != usize::MAX {
            return self.assign_complement(x + 1, comp);
        }
        for y in 0..n {
            if comp[y] != usize::MAX || self.join(x, y) != self.top || self.meet(x, y) != self.bottom {
                continue;
            }
            comp[x] = y;
            comp[y] = x;
            let antitone = (0..n).all(|u| {
                (0..n).all(|v| {
                    comp[u] == usize::MAX || comp[v] == usize::MAX || !self.leq(u, v) || self.leq(comp[v], comp[u])
                })
            });
            if antitone && self.assign_complement(x + 1, comp) {
                return true;
            }
            comp[x] = usize::MAX;
            comp[y] = usize::MAX;
        }
        false
    }

    /// Lexicographically first triple `(a, b, c)` with `a < b v c`,
    /// `a` not below `b` and `a` not below `c`.
    pub fn witness_triple(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if self.leq(a, b) {
                    continue;
                }
                for c in 0..n {
                    if !self.leq(a, c) && self.lt(a, self.join(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_two_chain(&self) -> bool {
        self.len() == 2
    }

    pub fn classify(&self) -> LatticeProfile {
        LatticeProfile {
            is_two_chain: self.is_two_chain(),
            atoms: self.atoms(),
            join_irreducibles: self.join_irreducibles(),
            is_atomistic: self.is_atomistic(),
            is_orthocomplemented: self.orthocomplement().is_some(),
            witness_triple: self.witness_triple(),
        }
    }
}

/// Structural summary of a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeProfile {
    pub is_two_chain: bool,
    pub atoms: ElemSet,
    pub join_irreducibles: ElemSet,
    pub is_atomistic: bool,
    pub is_orthocomplemented: bool,
    pub witness_triple: Option<(usize, usize, usize)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;

    #[test]
    fn two_chain() {
        let c2 = FiniteLattice::build("C2", &["0", "1"], &[("0", "1")]).unwrap();
        assert_eq!(c2.len(), 2);
        assert_eq!((c2.bottom(), c2.top()), (0, 1));
        let p = c2.classify();
        assert!(p.is_two_chain);
        assert_eq!(p.witness_triple, None);
    }

    #[test]
    fn m3_structure() {
        let m3 = library::m3();
        let idx = |s| m3.index_of(s).unwrap();
        assert_eq!(m3.join(idx("b"), idx("c")), idx("1"));
        assert!(m3.lt(idx("a"), idx("1")));
        assert!(!m3.leq(idx("a"), idx("b")));
        assert!(!m3.leq(idx("a"), idx("c")));
        let p = m3.classify();
        assert_eq!(p.witness_triple, Some((idx("a"), idx("b"), idx("c"))));
        assert!(p.is_atomistic);
        assert!(!p.is_orthocomplemented);
        assert_eq!(p.atoms, [1, 2, 3].into_iter().collect());
    }

    #[test]
    fn c3_profile() {
        let c3 = library::c3();
        let p = c3.classify();
        assert!(!p.is_two_chain);
        assert_eq!(p.witness_triple, None);
        assert!(!p.is_atomistic);
        assert_eq!(p.join_irreducibles, c3.nonzero());
    }

    #[test]
    fn b2_is_orthocomplemented_without_triple() {
        let b2 = library::b2();
        let p = b2.classify();
        assert!(p.is_orthocomplemented);
        assert!(p.is_atomistic);
        assert_eq!(p.witness_triple, None);
        let comp = b2.orthocomplement().unwrap();
        assert_eq!(comp, vec![3, 2, 1, 0]);
    }

    #[test]
    fn no_top() {
        let err = FiniteLattice::build("N", &["0", "x", "y"], &[("0", "x"), ("0", "y")]);
        assert_eq!(err, Err(LatticeError::NoTop));
    }

    #[test]
    fn no_bottom() {
        let err = FiniteLattice::build("V", &["x", "y", "1"], &[("x", "1"), ("y", "1")]);
        assert_eq!(err, Err(LatticeError::NoBottom));
    }

    #[test]
    fn cycle_and_self_loop() {
        let err = FiniteLattice::build("Z", &["0", "a", "1"], &[("0", "a"), ("a", "0"), ("a", "1")]);
        assert!(matches!(err, Err(LatticeError::NotAPartialOrder(..))));
        let err = FiniteLattice::build("Z", &["0", "a"], &[("a", "a")]);
        assert!(matches!(err, Err(LatticeError::NotAPartialOrder(..))));
    }

    #[test]
    fn missing_join_reported() {
        // 0 < a, b < c, d < 1: a and b have two minimal upper bounds.
        let err = FiniteLattice::build(
            "W",
            &["0", "a", "b", "c", "d", "1"],
            &[
                ("0", "a"),
                ("0", "b"),
                ("a", "c"),
                ("b", "c"),
                ("a", "d"),
                ("b", "d"),
                ("c", "1"),
                ("d", "1"),
            ],
        );
        assert_eq!(err, Err(LatticeError::NotALattice("a".into(), "b".into(), "join")));
    }

    #[test]
    fn trivial_and_bad_input() {
        assert_eq!(
            FiniteLattice::build::<&str>("T", &["0"], &[]),
            Err(LatticeError::TrivialLattice)
        );
        assert_eq!(FiniteLattice::build::<&str>("E", &[], &[]), Err(LatticeError::Empty));
        assert_eq!(
            FiniteLattice::build("D", &["0", "0"], &[]),
            Err(LatticeError::DuplicateElement("0".into()))
        );
        assert_eq!(
            FiniteLattice::build("U", &["0", "1"], &[("0", "2")]),
            Err(LatticeError::UnknownElement("2".into()))
        );
    }

    #[test]
    fn join_of_examples() {
        let c3 = library::c3();
        assert_eq!(c3.join_of([1, 2].into_iter().collect()), Ok(2));
        let m3 = library::m3();
        assert_eq!(m3.join_of([2, 3].into_iter().collect()), Ok(4));
        for l in library::all() {
            assert_eq!(l.join_of(ElemSet::EMPTY), Ok(l.bottom()));
        }
        assert_eq!(
            c3.join_of(ElemSet::singleton(7)),
            Err(LatticeError::ElementNotInLattice(7))
        );
    }

    #[test]
    fn dual_meets_are_joins() {
        for l in library::all() {
            let d = l.dual();
            for x in 0..l.len() {
                for y in 0..l.len() {
                    assert_eq!(l.meet(x, y), d.join(x, y));
                }
            }
        }
    }

    #[test]
    fn subset_enumeration() {
        let s: ElemSet = [1, 3, 4].into_iter().collect();
        let subs: Vec<ElemSet> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.windows(2).all(|w| w[0] < w[1]));
        for (k, t) in subs.iter().enumerate() {
            assert_eq!(s.nth_subset(k as u64), *t);
        }
    }

    #[test]
    fn fixed_top_coatoms() {
        assert_eq!(library::c3().fixed_top_coatom(), Some(1));
        assert_eq!(library::c2().fixed_top_coatom(), Some(0));
        assert_eq!(library::m3().fixed_top_coatom(), None);
    }
}
