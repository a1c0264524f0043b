//! The four morphism classes between finite lattices.
//!
//! * [`JoinMap`]: join-preserving maps `L -> M`.
//! * [`MonotoneZeroMap`]: isotone maps sending `0` to `0`.
//! * [`PartialFunction`]: partially defined maps `L0 \ K -> M0` between the
//!   nonzero carriers, `K` being the kernel.
//! * [`PowerMap`]: union-preserving maps `2^L0 -> 2^M0`, stored by their values
//!   on singletons. Union preservation is therefore structural.
//!
//! For a finite lattice, preserving the bottom and all binary joins is the same
//! as preserving every join: a join of a nonempty finite family is an iterated
//! binary join, and the empty join is the bottom.
//!
//! A [`PartialFunction`] is ordered (and joined) by reading it as the
//! zero-preserving table `L -> M` that sends the kernel to `0`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{ElemSet, FiniteLattice};

pub type LatticeRef = Arc<FiniteLattice>;

/// Default ceiling on the size of an enumerated hom-set.
pub const DEFAULT_GUARD: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("table has {found} entries, expected {expected}")]
    WrongArity { expected: usize, found: usize },
    #[error("element index {0} is out of range")]
    ElementOutOfRange(usize),
    #[error("bottom is not sent to bottom")]
    BottomNotPreserved,
    #[error("join of `{0}` and `{1}` is not preserved")]
    NotJoinPreserving(String, String),
    #[error("`{0}` <= `{1}` but their images are not ordered")]
    NotMonotone(String, String),
    #[error("partial function touches the bottom element at `{0}`")]
    ZeroInPartialFunction(String),
    #[error("image of `{0}` leaves the nonzero carrier")]
    ImageOutsideCarrier(String),
    #[error("subset {0:?} is not contained in the nonzero carrier")]
    ElementNotInCarrier(ElemSet),
    #[error("cannot compose: inner map ends in `{inner_target}`, outer map starts at `{outer_source}`")]
    CompositionMismatch { inner_target: String, outer_source: String },
    #[error("maps are not parallel")]
    ParallelismViolation,
    #[error("maps belong to different classes")]
    MixedClasses,
    #[error("cannot join an empty family without a source and target")]
    EmptyFamily,
    #[error("enumeration of {count} maps exceeds the size guard {guard}")]
    SizeGuardExceeded { count: u128, guard: u64 },
}

fn same_lattice(a: &LatticeRef, b: &LatticeRef) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn ensure_parallel(s1: &LatticeRef, t1: &LatticeRef, s2: &LatticeRef, t2: &LatticeRef) -> Result<(), MorphismError> {
    if same_lattice(s1, s2) && same_lattice(t1, t2) {
        Ok(())
    } else {
        Err(MorphismError::ParallelismViolation)
    }
}

fn ensure_composable(inner_target: &LatticeRef, outer_source: &LatticeRef) -> Result<(), MorphismError> {
    if same_lattice(inner_target, outer_source) {
        Ok(())
    } else {
        Err(MorphismError::CompositionMismatch {
            inner_target: inner_target.name().to_string(),
            outer_source: outer_source.name().to_string(),
        })
    }
}

fn check_table(source: &FiniteLattice, target: &FiniteLattice, table: &[usize]) -> Result<(), MorphismError> {
    if table.len() != source.len() {
        return Err(MorphismError::WrongArity {
            expected: source.len(),
            found: table.len(),
        });
    }
    if let Some(&bad) = table.iter().find(|&&y| y >= target.len()) {
        return Err(MorphismError::ElementOutOfRange(bad));
    }
    if table[source.bottom()] != target.bottom() {
        return Err(MorphismError::BottomNotPreserved);
    }
    Ok(())
}

fn first_join_violation(source: &FiniteLattice, target: &FiniteLattice, table: &[usize]) -> Option<(usize, usize)> {
    let n = source.len();
    (0..n)
        .flat_map(|x| (x..n).map(move |y| (x, y)))
        .find(|&(x, y)| table[source.join(x, y)] != target.join(table[x], table[y]))
}

fn first_monotone_violation(source: &FiniteLattice, target: &FiniteLattice, table: &[usize]) -> Option<(usize, usize)> {
    let n = source.len();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| source.leq(x, y) && !target.leq(table[x], table[y]))
}

fn table_partial(source: &LatticeRef, target: &LatticeRef, table: &[usize]) -> PartialFunction {
    let table = table
        .iter()
        .enumerate()
        .map(|(x, &y)| (x != source.bottom() && y != target.bottom()).then_some(y))
        .collect();
    PartialFunction {
        source: source.clone(),
        target: target.clone(),
        table,
    }
}

fn join_tables<'a>(target: &FiniteLattice, len: usize, tables: impl Iterator<Item = &'a [usize]>) -> Vec<usize> {
    let mut out = vec![target.bottom(); len];
    for t in tables {
        for (o, &y) in out.iter_mut().zip(t) {
            *o = target.join(*o, y);
        }
    }
    out
}

macro_rules! table_map_accessors {
    ($ty:ident) => {
        impl $ty {
            pub fn source(&self) -> &LatticeRef {
                &self.source
            }

            pub fn target(&self) -> &LatticeRef {
                &self.target
            }

            pub fn table(&self) -> &[usize] {
                &self.table
            }

            pub fn apply(&self, x: usize) -> usize {
                self.table[x]
            }

            /// The forgetful image: defined exactly where the value is nonzero.
            pub fn underlying_partial(&self) -> PartialFunction {
                table_partial(&self.source, &self.target, &self.table)
            }

            /// `self ∘ inner`.
            pub fn compose(&self, inner: &$ty) -> Result<$ty, MorphismError> {
                ensure_composable(&inner.target, &self.source)?;
                let table = inner.table.iter().map(|&y| self.table[y]).collect();
                $ty::new(inner.source.clone(), self.target.clone(), table)
            }

            /// Pointwise order in the target lattice.
            pub fn leq(&self, other: &$ty) -> Result<bool, MorphismError> {
                ensure_parallel(&self.source, &self.target, &other.source, &other.target)?;
                Ok(self
                    .table
                    .iter()
                    .zip(&other.table)
                    .all(|(&x, &y)| self.target.leq(x, y)))
            }

            /// Pointwise join of a nonempty parallel family; the result is
            /// re-validated.
            pub fn pointwise_join(maps: &[$ty]) -> Result<$ty, MorphismError> {
                let first = maps.first().ok_or(MorphismError::EmptyFamily)?;
                for m in maps {
                    ensure_parallel(&first.source, &first.target, &m.source, &m.target)?;
                }
                let table = join_tables(
                    &first.target,
                    first.table.len(),
                    maps.iter().map(|m| m.table.as_slice()),
                );
                $ty::new(first.source.clone(), first.target.clone(), table)
            }

            pub fn identity(l: &LatticeRef) -> $ty {
                $ty {
                    source: l.clone(),
                    target: l.clone(),
                    table: (0..l.len()).collect(),
                }
            }

            /// The constant-bottom map.
            pub fn zero(source: &LatticeRef, target: &LatticeRef) -> $ty {
                $ty {
                    source: source.clone(),
                    target: target.clone(),
                    table: vec![target.bottom(); source.len()],
                }
            }
        }
    };
}

/// A join-preserving map between finite lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinMap {
    source: LatticeRef,
    target: LatticeRef,
    table: Vec<usize>,
}

impl JoinMap {
    pub fn new(source: LatticeRef, target: LatticeRef, table: Vec<usize>) -> Result<Self, MorphismError> {
        check_table(&source, &target, &table)?;
        if let Some((x, y)) = first_join_violation(&source, &target, &table) {
            return Err(MorphismError::NotJoinPreserving(
                source.element_name(x).to_string(),
                source.element_name(y).to_string(),
            ));
        }
        debug_assert!(first_monotone_violation(&source, &target, &table).is_none());
        Ok(JoinMap { source, target, table })
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&y| y == self.target.bottom())
    }

    pub fn is_identity(&self) -> bool {
        same_lattice(&self.source, &self.target) && self.table.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// The same table seen as an isotone zero-preserving map.
    pub fn to_monotone(&self) -> MonotoneZeroMap {
        MonotoneZeroMap {
            source: self.source.clone(),
            target: self.target.clone(),
            table: self.table.clone(),
        }
    }
}

table_map_accessors!(JoinMap);

/// An isotone map that sends bottom to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneZeroMap {
    source: LatticeRef,
    target: LatticeRef,
    table: Vec<usize>,
}

impl MonotoneZeroMap {
    pub fn new(source: LatticeRef, target: LatticeRef, table: Vec<usize>) -> Result<Self, MorphismError> {
        check_table(&source, &target, &table)?;
        if let Some((x, y)) = first_monotone_violation(&source, &target, &table) {
            return Err(MorphismError::NotMonotone(
                source.element_name(x).to_string(),
                source.element_name(y).to_string(),
            ));
        }
        Ok(MonotoneZeroMap { source, target, table })
    }

    pub fn is_join_preserving(&self) -> bool {
        first_join_violation(&self.source, &self.target, &self.table).is_none()
    }
}

table_map_accessors!(MonotoneZeroMap);

/// A partial map from the nonzero elements of `source` to the nonzero
/// elements of `target`. `table[x]` is `None` on the kernel and at the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFunction {
    source: LatticeRef,
    target: LatticeRef,
    table: Vec<Option<usize>>,
}

impl PartialFunction {
    pub fn new(source: LatticeRef, target: LatticeRef, table: Vec<Option<usize>>) -> Result<Self, MorphismError> {
        if table.len() != source.len() {
            return Err(MorphismError::WrongArity {
                expected: source.len(),
                found: table.len(),
            });
        }
        if table[source.bottom()].is_some() {
            return Err(MorphismError::ZeroInPartialFunction(
                source.element_name(source.bottom()).to_string(),
            ));
        }
        for y in table.iter().flatten() {
            if *y >= target.len() {
                return Err(MorphismError::ElementOutOfRange(*y));
            }
            if *y == target.bottom() {
                return Err(MorphismError::ZeroInPartialFunction(
                    target.element_name(*y).to_string(),
                ));
            }
        }
        Ok(PartialFunction { source, target, table })
    }

    pub fn identity(l: &LatticeRef) -> Self {
        let table = (0..l.len()).map(|x| (x != l.bottom()).then_some(x)).collect();
        PartialFunction {
            source: l.clone(),
            target: l.clone(),
            table,
        }
    }

    pub fn source(&self) -> &LatticeRef {
        &self.source
    }

    pub fn target(&self) -> &LatticeRef {
        &self.target
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.table
    }

    pub fn apply(&self, t: usize) -> Option<usize> {
        self.table.get(t).copied().flatten()
    }

    /// Nonzero source elements on which the function is undefined.
    pub fn kernel(&self) -> ElemSet {
        self.source
            .nonzero()
            .iter()
            .filter(|&t| self.table[t].is_none())
            .collect()
    }

    /// Empty kernel: the map lies in the total-function subcategory, whose
    /// direct images send only the empty set to the empty set.
    pub fn is_total(&self) -> bool {
        self.kernel().is_empty()
    }

    fn as_zero_table(&self) -> Vec<usize> {
        self.table.iter().map(|y| y.unwrap_or(self.target.bottom())).collect()
    }

    /// `self ∘ inner`, defined where `inner` is defined and lands in the
    /// domain of definition of `self`.
    pub fn compose(&self, inner: &PartialFunction) -> Result<PartialFunction, MorphismError> {
        ensure_composable(&inner.target, &self.source)?;
        let table = inner.table.iter().map(|y| y.and_then(|y| self.table[y])).collect();
        Ok(PartialFunction {
            source: inner.source.clone(),
            target: self.target.clone(),
            table,
        })
    }

    pub fn leq(&self, other: &PartialFunction) -> Result<bool, MorphismError> {
        ensure_parallel(&self.source, &self.target, &other.source, &other.target)?;
        let (a, b) = (self.as_zero_table(), other.as_zero_table());
        Ok(a.iter().zip(&b).all(|(&x, &y)| self.target.leq(x, y)))
    }

    pub fn pointwise_join(maps: &[PartialFunction]) -> Result<PartialFunction, MorphismError> {
        let first = maps.first().ok_or(MorphismError::EmptyFamily)?;
        for m in maps {
            ensure_parallel(&first.source, &first.target, &m.source, &m.target)?;
        }
        let tables: Vec<Vec<usize>> = maps.iter().map(|m| m.as_zero_table()).collect();
        let joined = join_tables(&first.target, first.table.len(), tables.iter().map(|t| t.as_slice()));
        let bottom = first.target.bottom();
        let table = joined.into_iter().map(|y| (y != bottom).then_some(y)).collect();
        Ok(PartialFunction {
            source: first.source.clone(),
            target: first.target.clone(),
            table,
        })
    }

    /// Direct image map `T -> { f(t) | t in T \ ker f }`.
    pub fn power_image(&self) -> PowerMap {
        let images = self
            .table
            .iter()
            .map(|y| y.map_or(ElemSet::EMPTY, ElemSet::singleton))
            .collect();
        PowerMap {
            source: self.source.clone(),
            target: self.target.clone(),
            images,
        }
    }
}

/// The power functor on morphisms.
pub fn power_functor(f: &PartialFunction) -> PowerMap {
    f.power_image()
}

/// A union-preserving map `2^L0 -> 2^M0`, determined by the images of
/// singletons. `images[t]` is the image of `{t}`; the bottom slot is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PowerMap {
    source: LatticeRef,
    target: LatticeRef,
    images: Vec<ElemSet>,
}

impl PowerMap {
    pub fn new(source: LatticeRef, target: LatticeRef, images: Vec<ElemSet>) -> Result<Self, MorphismError> {
        if images.len() != source.len() {
            return Err(MorphismError::WrongArity {
                expected: source.len(),
                found: images.len(),
            });
        }
        if !images[source.bottom()].is_empty() {
            return Err(MorphismError::ImageOutsideCarrier(
                source.element_name(source.bottom()).to_string(),
            ));
        }
        let carrier = target.nonzero();
        for (t, img) in images.iter().enumerate() {
            if !img.is_subset(carrier) {
                return Err(MorphismError::ImageOutsideCarrier(source.element_name(t).to_string()));
            }
        }
        Ok(PowerMap { source, target, images })
    }

    /// Builds a power map from a singleton-image function on the source carrier.
    pub fn from_fn(
        source: &LatticeRef,
        target: &LatticeRef,
        f: impl Fn(usize) -> ElemSet,
    ) -> Result<Self, MorphismError> {
        let images = (0..source.len())
            .map(|t| if t == source.bottom() { ElemSet::EMPTY } else { f(t) })
            .collect();
        PowerMap::new(source.clone(), target.clone(), images)
    }

    pub fn identity(l: &LatticeRef) -> Self {
        PartialFunction::identity(l).power_image()
    }

    /// The constant-empty map, bottom of the hom-lattice.
    pub fn empty(source: &LatticeRef, target: &LatticeRef) -> Self {
        PowerMap {
            source: source.clone(),
            target: target.clone(),
            images: vec![ElemSet::EMPTY; source.len()],
        }
    }

    pub fn source(&self) -> &LatticeRef {
        &self.source
    }

    pub fn target(&self) -> &LatticeRef {
        &self.target
    }

    pub fn singleton_images(&self) -> &[ElemSet] {
        &self.images
    }

    pub fn image(&self, t: usize) -> ElemSet {
        self.images[t]
    }

    /// Image of a subset of the source carrier.
    pub fn apply(&self, subset: ElemSet) -> Result<ElemSet, MorphismError> {
        if !subset.is_subset(self.source.nonzero()) {
            return Err(MorphismError::ElementNotInCarrier(subset));
        }
        Ok(self.apply_unchecked(subset))
    }

    pub(crate) fn apply_unchecked(&self, subset: ElemSet) -> ElemSet {
        subset.iter().fold(ElemSet::EMPTY, |acc, t| acc.union(self.images[t]))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PowerMap) -> Result<PowerMap, MorphismError> {
        ensure_composable(&inner.target, &self.source)?;
        let images = inner.images.iter().map(|&s| self.apply_unchecked(s)).collect();
        Ok(PowerMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            images,
        })
    }

    pub fn leq(&self, other: &PowerMap) -> Result<bool, MorphismError> {
        ensure_parallel(&self.source, &self.target, &other.source, &other.target)?;
        Ok(self.leq_unchecked(other))
    }

    pub(crate) fn leq_unchecked(&self, other: &PowerMap) -> bool {
        self.images.iter().zip(&other.images).all(|(a, b)| a.is_subset(*b))
    }

    /// Pointwise union. Unlike the table classes, the empty family has a
    /// meaningful join here only once source and target are known, see
    /// [`PowerMap::join_in`].
    pub fn pointwise_join(maps: &[PowerMap]) -> Result<PowerMap, MorphismError> {
        let first = maps.first().ok_or(MorphismError::EmptyFamily)?;
        PowerMap::join_in(&first.source, &first.target, maps)
    }

    /// Pointwise union of a possibly empty family of maps `source -> target`.
    pub fn join_in(source: &LatticeRef, target: &LatticeRef, maps: &[PowerMap]) -> Result<PowerMap, MorphismError> {
        let mut out = PowerMap::empty(source, target);
        for m in maps {
            ensure_parallel(source, target, &m.source, &m.target)?;
            out.union_with(m);
        }
        Ok(out)
    }

    pub(crate) fn union_with(&mut self, other: &PowerMap) {
        for (a, b) in self.images.iter_mut().zip(&other.images) {
            *a = a.union(*b);
        }
    }
}

/// Morphism class selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MorphismClass {
    Join,
    MonotoneZero,
    Partial,
    Power,
}

impl MorphismClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MorphismClass::Join => "join",
            MorphismClass::MonotoneZero => "monotone",
            MorphismClass::Partial => "partial",
            MorphismClass::Power => "power",
        }
    }
}

impl fmt::Display for MorphismClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MorphismClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "join" => Ok(MorphismClass::Join),
            "monotone" => Ok(MorphismClass::MonotoneZero),
            "partial" => Ok(MorphismClass::Partial),
            "power" => Ok(MorphismClass::Power),
            other => Err(format!("unknown morphism class `{other}`")),
        }
    }
}

/// A morphism of any of the four classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeMorphism {
    Join(JoinMap),
    MonotoneZero(MonotoneZeroMap),
    Partial(PartialFunction),
    Power(PowerMap),
}

impl LatticeMorphism {
    pub fn class(&self) -> MorphismClass {
        match self {
            LatticeMorphism::Join(_) => MorphismClass::Join,
            LatticeMorphism::MonotoneZero(_) => MorphismClass::MonotoneZero,
            LatticeMorphism::Partial(_) => MorphismClass::Partial,
            LatticeMorphism::Power(_) => MorphismClass::Power,
        }
    }

    pub fn source(&self) -> &LatticeRef {
        match self {
            LatticeMorphism::Join(m) => m.source(),
            LatticeMorphism::MonotoneZero(m) => m.source(),
            LatticeMorphism::Partial(m) => m.source(),
            LatticeMorphism::Power(m) => m.source(),
        }
    }

    pub fn target(&self) -> &LatticeRef {
        match self {
            LatticeMorphism::Join(m) => m.target(),
            LatticeMorphism::MonotoneZero(m) => m.target(),
            LatticeMorphism::Partial(m) => m.target(),
            LatticeMorphism::Power(m) => m.target(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LatticeMorphism) -> Result<LatticeMorphism, MorphismError> {
        use LatticeMorphism::*;
        Ok(match (self, inner) {
            (Join(g), Join(f)) => Join(g.compose(f)?),
            (MonotoneZero(g), MonotoneZero(f)) => MonotoneZero(g.compose(f)?),
            (Partial(g), Partial(f)) => Partial(g.compose(f)?),
            (Power(g), Power(f)) => Power(g.compose(f)?),
            _ => return Err(MorphismError::MixedClasses),
        })
    }

    pub fn leq(&self, other: &LatticeMorphism) -> Result<bool, MorphismError> {
        use LatticeMorphism::*;
        match (self, other) {
            (Join(g), Join(f)) => g.leq(f),
            (MonotoneZero(g), MonotoneZero(f)) => g.leq(f),
            (Partial(g), Partial(f)) => g.leq(f),
            (Power(g), Power(f)) => g.leq(f),
            _ => Err(MorphismError::MixedClasses),
        }
    }

    pub fn pointwise_join(maps: &[LatticeMorphism]) -> Result<LatticeMorphism, MorphismError> {
        let first = maps.first().ok_or(MorphismError::EmptyFamily)?;
        if maps.iter().any(|m| m.class() != first.class()) {
            return Err(MorphismError::MixedClasses);
        }
        macro_rules! collect {
            ($variant:ident) => {
                maps.iter()
                    .filter_map(|m| match m {
                        LatticeMorphism::$variant(x) => Some(x.clone()),
                        _ => None,
                    })
                    .collect::<Vec<_>>()
            };
        }
        Ok(match first.class() {
            MorphismClass::Join => LatticeMorphism::Join(JoinMap::pointwise_join(&collect!(Join))?),
            MorphismClass::MonotoneZero => {
                LatticeMorphism::MonotoneZero(MonotoneZeroMap::pointwise_join(&collect!(MonotoneZero))?)
            }
            MorphismClass::Partial => LatticeMorphism::Partial(PartialFunction::pointwise_join(&collect!(Partial))?),
            MorphismClass::Power => LatticeMorphism::Power(PowerMap::pointwise_join(&collect!(Power))?),
        })
    }

    /// The union-preserving map this morphism induces: `𝒫U f` for table maps,
    /// `𝒫 f` for partial functions, the map itself for power maps.
    pub fn to_power_map(&self) -> PowerMap {
        match self {
            LatticeMorphism::Join(m) => m.underlying_partial().power_image(),
            LatticeMorphism::MonotoneZero(m) => m.underlying_partial().power_image(),
            LatticeMorphism::Partial(m) => m.power_image(),
            LatticeMorphism::Power(m) => m.clone(),
        }
    }
}

fn guard_count(count: Option<u128>, guard: u64) -> Result<u64, MorphismError> {
    match count {
        Some(c) if c <= guard as u128 => Ok(c as u64),
        Some(c) => Err(MorphismError::SizeGuardExceeded { count: c, guard }),
        None => Err(MorphismError::SizeGuardExceeded {
            count: u128::MAX,
            guard,
        }),
    }
}

/// Backtracking enumeration of bottom-preserving tables in lexicographic
/// order, pruning with `consistent(table, x)` once positions `0..=x` are set.
fn search_tables(
    source: &FiniteLattice,
    target: &FiniteLattice,
    guard: u64,
    consistent: &dyn Fn(&[usize], usize) -> bool,
) -> Result<Vec<Vec<usize>>, MorphismError> {
    fn go(
        x: usize,
        table: &mut Vec<usize>,
        source: &FiniteLattice,
        target: &FiniteLattice,
        guard: u64,
        consistent: &dyn Fn(&[usize], usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), MorphismError> {
        if x == source.len() {
            if out.len() as u64 >= guard {
                return Err(MorphismError::SizeGuardExceeded {
                    count: out.len() as u128 + 1,
                    guard,
                });
            }
            out.push(table.clone());
            return Ok(());
        }
        let candidates: Vec<usize> = if x == source.bottom() {
            vec![target.bottom()]
        } else {
            (0..target.len()).collect()
        };
        for y in candidates {
            table[x] = y;
            if consistent(table, x) {
                go(x + 1, table, source, target, guard, consistent, out)?;
            }
        }
        Ok(())
    }
    let mut table = vec![target.bottom(); source.len()];
    let mut out = Vec::new();
    go(0, &mut table, source, target, guard, consistent, &mut out)?;
    Ok(out)
}

fn assigned(source: &FiniteLattice, x: usize, upto: usize) -> bool {
    x <= upto || x == source.bottom()
}

/// All join-preserving maps `source -> target`, lexicographic by table.
pub fn enumerate_join_maps(
    source: &LatticeRef,
    target: &LatticeRef,
    guard: u64,
) -> Result<Vec<JoinMap>, MorphismError> {
    let consistent = |table: &[usize], x: usize| {
        (0..=x).all(|y| {
            (0..=x).all(|z| {
                let j = source.join(y, z);
                !assigned(source, j, x) || table[j] == target.join(table[y], table[z])
            })
        })
    };
    let tables = search_tables(source, target, guard, &consistent)?;
    Ok(tables
        .into_iter()
        .map(|table| JoinMap {
            source: source.clone(),
            target: target.clone(),
            table,
        })
        .collect())
}

/// All isotone zero-preserving maps `source -> target`, lexicographic by table.
pub fn enumerate_monotone_zero_maps(
    source: &LatticeRef,
    target: &LatticeRef,
    guard: u64,
) -> Result<Vec<MonotoneZeroMap>, MorphismError> {
    let consistent = |table: &[usize], x: usize| {
        (0..source.len()).all(|y| {
            !assigned(source, y, x)
                || (!source.leq(x, y) || target.leq(table[x], table[y]))
                    && (!source.leq(y, x) || target.leq(table[y], table[x]))
        })
    };
    let tables = search_tables(source, target, guard, &consistent)?;
    Ok(tables
        .into_iter()
        .map(|table| MonotoneZeroMap {
            source: source.clone(),
            target: target.clone(),
            table,
        })
        .collect())
}

/// All partial functions between the nonzero carriers. Each position runs
/// through "undefined" first, then the target carrier in index order.
pub fn enumerate_partial_functions(
    source: &LatticeRef,
    target: &LatticeRef,
    guard: u64,
) -> Result<Vec<PartialFunction>, MorphismError> {
    let carrier = source.nonzero();
    let options: Vec<Option<usize>> = std::iter::once(None).chain(target.nonzero().iter().map(Some)).collect();
    let count = (options.len() as u128).checked_pow(carrier.len() as u32);
    let count = guard_count(count, guard)?;
    let positions: Vec<usize> = carrier.iter().collect();
    let mut out = Vec::with_capacity(count as usize);
    for mut k in 0..count {
        let mut table = vec![None; source.len()];
        for &p in positions.iter().rev() {
            table[p] = options[(k % options.len() as u64) as usize];
            k /= options.len() as u64;
        }
        out.push(PartialFunction {
            source: source.clone(),
            target: target.clone(),
            table,
        });
    }
    Ok(out)
}

/// The full hom-set of union-preserving maps `2^L0 -> 2^M0` as an indexable
/// space. Index `k` decodes in mixed radix `2^|M0|`, the last source element
/// being least significant, so increasing `k` is lexicographic order in
/// (source element index, target subset bitmask).
#[derive(Debug, Clone)]
pub struct PowerMapSpace {
    source: LatticeRef,
    target: LatticeRef,
    positions: Vec<usize>,
    radix_bits: u32,
    len: u64,
}

impl PowerMapSpace {
    pub fn new(source: &LatticeRef, target: &LatticeRef, guard: u64) -> Result<Self, MorphismError> {
        let positions: Vec<usize> = source.nonzero().iter().collect();
        let radix_bits = target.nonzero().len() as u32;
        let total_bits = radix_bits as u64 * positions.len() as u64;
        let count = if total_bits < 127 {
            Some(1u128 << total_bits)
        } else {
            None
        };
        let len = guard_count(count, guard)?;
        Ok(PowerMapSpace {
            source: source.clone(),
            target: target.clone(),
            positions,
            radix_bits,
            len,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn source(&self) -> &LatticeRef {
        &self.source
    }

    pub fn target(&self) -> &LatticeRef {
        &self.target
    }

    pub fn get(&self, mut k: u64) -> PowerMap {
        let carrier = self.target.nonzero();
        let mask = (1u64 << self.radix_bits) - 1;
        let mut images = vec![ElemSet::EMPTY; self.source.len()];
        for &p in self.positions.iter().rev() {
            images[p] = carrier.nth_subset(k & mask);
            k >>= self.radix_bits;
        }
        PowerMap {
            source: self.source.clone(),
            target: self.target.clone(),
            images,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = PowerMap> + '_ {
        (0..self.len).map(move |k| self.get(k))
    }
}

/// Exhaustive, duplicate-free enumeration of a hom-set of the given class.
pub fn enumerate_morphisms(
    source: &LatticeRef,
    target: &LatticeRef,
    class: MorphismClass,
    guard: u64,
) -> Result<Vec<LatticeMorphism>, MorphismError> {
    Ok(match class {
        MorphismClass::Join => enumerate_join_maps(source, target, guard)?
            .into_iter()
            .map(LatticeMorphism::Join)
            .collect(),
        MorphismClass::MonotoneZero => enumerate_monotone_zero_maps(source, target, guard)?
            .into_iter()
            .map(LatticeMorphism::MonotoneZero)
            .collect(),
        MorphismClass::Partial => enumerate_partial_functions(source, target, guard)?
            .into_iter()
            .map(LatticeMorphism::Partial)
            .collect(),
        MorphismClass::Power => PowerMapSpace::new(source, target, guard)?
            .iter()
            .map(LatticeMorphism::Power)
            .collect(),
    })
}
