//! State transitions, property transitions and the three enrichments of a
//! concrete category of lattices.
//!
//! For lattices `L`, `M` every union-preserving map `g : 2^L0 -> 2^M0` lies in
//! the contextual enrichment `Q+`. It is a *state transition* with respect to a
//! category `A` when `T -> ∨g(T)` factors through `T -> ∨T` by an `A`-morphism
//! `L -> M`, its *property transition*. The functorial enrichment `Q-` holds
//! the pointwise unions of direct images of `A`-morphisms. With `A` closed
//! under pointwise joins, `Q- ⊆ Qst ⊆ Q+`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{ElemSet, FiniteLattice, LatticeError};
use crate::morphisms::{JoinMap, LatticeRef, MorphismError, PowerMap, PowerMapSpace};
use crate::subcategory::{ConcreteCategory, SubcategoryKind};

/// Largest source carrier the subset-pair oracle accepts by default.
pub const DEFAULT_ORACLE_BOUND: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantaloidError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error("lattice `{0}` is not an object of the subcategory: {1}")]
    ObjectNotInSubcategory(String, String),
    #[error("hom-set `{0}` -> `{1}` has no map with nonempty image")]
    Degenerate(String, String),
    #[error("pre-enrichment needs a generated subcategory, got `{0}`")]
    NotGenerated(SubcategoryKind),
    #[error("join closure is not closed under composition")]
    CompositionNotClosed,
    #[error("lattice `{0}` has no element strictly between bottom and top")]
    NoInteriorElement(String),
    #[error("`{0}` is not strictly between bottom and top")]
    NotInterior(String),
    #[error("triple ({0}, {1}, {2}) does not satisfy a < b v c, a !<= b, a !<= c")]
    TripleHypothesisViolated(String, String, String),
    #[error("lattice `{0}` has no triple a < b v c with a !<= b and a !<= c")]
    NoWitnessTriple(String),
    #[error("carrier of size {size} exceeds the oracle bound {bound}")]
    OracleBoundExceeded { size: usize, bound: usize },
}

/// `x -> ∨g({x})`, with `0 -> 0`. Because `∨{x} = x`, this is the only
/// candidate for a property transition of `g`.
pub fn property_transition_table(g: &PowerMap) -> Vec<usize> {
    let target = g.target();
    g.singleton_images().iter().map(|&s| target.join_all(s)).collect()
}

/// The property transition of `g` when it is join-preserving.
pub fn property_transition(g: &PowerMap) -> Option<JoinMap> {
    JoinMap::new(g.source().clone(), g.target().clone(), property_transition_table(g)).ok()
}

/// Returns the property transition when `g` is a state transition with
/// respect to `category`, `None` otherwise.
pub fn is_state_transition<C: ConcreteCategory + ?Sized>(
    g: &PowerMap,
    category: &C,
) -> Result<Option<JoinMap>, QuantaloidError> {
    category.admit_object(g.source())?;
    category.admit_object(g.target())?;
    Ok(property_transition(g).filter(|f| category.contains_join_map(f)))
}

/// The canonical state transition over a join-preserving map: the direct
/// image of its forgetful image.
pub fn direct_image(f: &JoinMap) -> PowerMap {
    f.underlying_partial().power_image()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleVerdict {
    pub holds: bool,
    /// First pair `(T, T')` with `∨T = ∨T'` but `∨g(T) != ∨g(T')`. `T` is the
    /// first subset met with that join, `T'` the first later one that disagrees.
    pub witness: Option<(ElemSet, ElemSet)>,
}

/// Decides whether `∨T = ∨T'` implies `∨g(T) = ∨g(T')` for all subsets of the
/// source carrier, by grouping subsets by their join.
pub fn state_transition_oracle(g: &PowerMap, bound: usize) -> Result<OracleVerdict, QuantaloidError> {
    let (source, target) = (g.source(), g.target());
    let carrier = source.nonzero();
    if carrier.len() > bound {
        return Err(QuantaloidError::OracleBoundExceeded {
            size: carrier.len(),
            bound,
        });
    }
    let mut first: HashMap<usize, (ElemSet, usize)> = HashMap::new();
    for t in carrier.subsets() {
        let image_join = target.join_all(g.apply_unchecked(t));
        let (rep, rep_join) = *first.entry(source.join_all(t)).or_insert((t, image_join));
        if rep_join != image_join {
            return Ok(OracleVerdict {
                holds: false,
                witness: Some((rep, t)),
            });
        }
    }
    Ok(OracleVerdict {
        holds: true,
        witness: None,
    })
}

/// Direct images of all morphisms `source -> target` of a category; the
/// generators of a hom-set of `Q-`.
#[derive(Debug, Clone)]
pub struct QMinusBasis {
    source: LatticeRef,
    target: LatticeRef,
    images: Vec<PowerMap>,
}

impl QMinusBasis {
    pub fn new<C: ConcreteCategory + ?Sized>(
        category: &C,
        source: &LatticeRef,
        target: &LatticeRef,
        guard: u64,
    ) -> Result<Self, QuantaloidError> {
        category.admit_object(source)?;
        category.admit_object(target)?;
        let mut images: Vec<PowerMap> = Vec::new();
        for f in category.underlying_hom(source, target, guard)? {
            let img = f.power_image();
            if !images.contains(&img) {
                images.push(img);
            }
        }
        Ok(QMinusBasis {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// Distinct direct images, in enumeration order of their first preimage.
    pub fn images(&self) -> &[PowerMap] {
        &self.images
    }

    /// Join of every generator below `g`: the largest `Q-` member below `g`.
    pub fn hull(&self, g: &PowerMap) -> Result<PowerMap, QuantaloidError> {
        let mut out = PowerMap::empty(&self.source, &self.target);
        for img in &self.images {
            if img.leq(g)? {
                out.union_with(img);
            }
        }
        Ok(out)
    }

    pub fn contains(&self, g: &PowerMap) -> Result<bool, QuantaloidError> {
        Ok(self.hull(g)? == *g)
    }
}

/// The largest member of `Q-` below `g`.
pub fn q_minus_hull<C: ConcreteCategory + ?Sized>(
    g: &PowerMap,
    category: &C,
    guard: u64,
) -> Result<PowerMap, QuantaloidError> {
    QMinusBasis::new(category, g.source(), g.target(), guard)?.hull(g)
}

/// A hom-set tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    /// Direct images of category morphisms.
    PA,
    QMinus,
    QSt,
    QPlus,
}

impl Tier {
    pub const ALL: [Tier; 4] = [Tier::PA, Tier::QMinus, Tier::QSt, Tier::QPlus];

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::PA => "pA",
            Tier::QMinus => "qminus",
            Tier::QSt => "qst",
            Tier::QPlus => "qplus",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tier::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown tier `{s}`"))
    }
}

/// Members of a tier's hom-set, in power-map enumeration order (for `PA`, in
/// order of first preimage).
pub fn hom_set<C: ConcreteCategory + ?Sized>(
    source: &LatticeRef,
    target: &LatticeRef,
    tier: Tier,
    category: &C,
    guard: u64,
) -> Result<Vec<PowerMap>, QuantaloidError> {
    if tier == Tier::PA {
        return Ok(QMinusBasis::new(category, source, target, guard)?.images);
    }
    let space = PowerMapSpace::new(source, target, guard)?;
    let member = tier_predicate(&space, tier, category, guard)?;
    (0..space.len() as usize)
        .into_par_iter()
        .filter_map(|k| {
            let g = space.get(k as u64);
            match member(&g) {
                Ok(true) => Some(Ok(g)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .collect()
}

/// Cardinality of a tier's hom-set by exhaustive classification.
pub fn hom_set_count<C: ConcreteCategory + ?Sized>(
    source: &LatticeRef,
    target: &LatticeRef,
    tier: Tier,
    category: &C,
    guard: u64,
) -> Result<u64, QuantaloidError> {
    if tier == Tier::PA {
        return Ok(QMinusBasis::new(category, source, target, guard)?.images.len() as u64);
    }
    let space = PowerMapSpace::new(source, target, guard)?;
    let member = tier_predicate(&space, tier, category, guard)?;
    (0..space.len() as usize)
        .into_par_iter()
        .map(|k| member(&space.get(k as u64)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

type Predicate<'a> = Box<dyn Fn(&PowerMap) -> Result<bool, QuantaloidError> + Send + Sync + 'a>;

fn tier_predicate<'a, C: ConcreteCategory + ?Sized>(
    space: &PowerMapSpace,
    tier: Tier,
    category: &'a C,
    guard: u64,
) -> Result<Predicate<'a>, QuantaloidError> {
    Ok(match tier {
        Tier::QPlus => Box::new(|_| Ok(true)),
        Tier::QSt => {
            category.admit_object(space.source())?;
            category.admit_object(space.target())?;
            Box::new(move |g| Ok(is_state_transition(g, category)?.is_some()))
        }
        Tier::QMinus => {
            let basis = QMinusBasis::new(category, space.source(), space.target(), guard)?;
            Box::new(move |g| basis.contains(g))
        }
        Tier::PA => unreachable!("direct images are listed, not filtered"),
    })
}

/// Where a union-preserving map sits among the enrichments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TierReport {
    pub in_q_plus: bool,
    pub is_state_transition: bool,
    pub property_transition: Option<JoinMap>,
    pub in_q_minus: bool,
    pub q_minus_hull: PowerMap,
}

pub fn classify_power_map<C: ConcreteCategory + ?Sized>(
    g: &PowerMap,
    category: &C,
    guard: u64,
) -> Result<TierReport, QuantaloidError> {
    let property_transition = is_state_transition(g, category)?;
    let hull = q_minus_hull(g, category, guard)?;
    Ok(TierReport {
        in_q_plus: true,
        is_state_transition: property_transition.is_some(),
        property_transition,
        in_q_minus: hull == *g,
        q_minus_hull: hull,
    })
}

fn ensure_interior(l: &FiniteLattice, a: usize) -> Result<(), QuantaloidError> {
    if a >= l.len() {
        return Err(LatticeError::ElementNotInLattice(a).into());
    }
    if a == l.bottom() || a == l.top() {
        return Err(QuantaloidError::NotInterior(l.element_name(a).to_string()));
    }
    Ok(())
}

/// First element strictly between bottom and top.
pub fn first_interior(l: &FiniteLattice) -> Option<usize> {
    (0..l.len()).find(|&x| x != l.bottom() && x != l.top())
}

/// `T -> {a}` when `a ∈ T`, `T -> ∅` otherwise. Union-preserving, but its
/// candidate property transition sends `a` to `a` and the top to `0`.
pub fn counterexample_q_plus(l: &LatticeRef, a: usize) -> Result<PowerMap, QuantaloidError> {
    if first_interior(l).is_none() {
        return Err(QuantaloidError::NoInteriorElement(l.name().to_string()));
    }
    ensure_interior(l, a)?;
    Ok(PowerMap::from_fn(l, l, |t| {
        if t == a {
            ElemSet::singleton(a)
        } else {
            ElemSet::EMPTY
        }
    })?)
}

/// `{t} -> {t}` for `t != b v c` and `{b v c} -> {a, b, c}`. A state transition
/// over the identity whose image of `{a}` no join of direct images can reach.
pub fn counterexample_state(l: &LatticeRef, (a, b, c): (usize, usize, usize)) -> Result<PowerMap, QuantaloidError> {
    if [a, b, c].iter().any(|&x| x >= l.len()) {
        return Err(LatticeError::ElementNotInLattice(a.max(b).max(c)).into());
    }
    let top = l.join(b, c);
    if !(l.lt(a, top) && !l.leq(a, b) && !l.leq(a, c)) {
        return Err(QuantaloidError::TripleHypothesisViolated(
            l.element_name(a).to_string(),
            l.element_name(b).to_string(),
            l.element_name(c).to_string(),
        ));
    }
    Ok(PowerMap::from_fn(l, l, |t| {
        if t == top {
            [a, b, c].into_iter().filter(|&x| x != l.bottom()).collect()
        } else {
            ElemSet::singleton(t)
        }
    })?)
}
