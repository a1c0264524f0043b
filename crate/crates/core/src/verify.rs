//! Executable checks for the structural results on the three enrichments,
//! each producing a [`CheckRecord`] with counts and witness maps.
//!
//! Checks whose hypothesis does not hold on the given lattice report
//! `not-applicable`; checks that run into the size guard report `skipped`.
//! Sampled checks draw from a ChaCha8 generator seeded with
//! [`VerifyConfig::seed`], so every record is reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{ElemSet, FiniteLattice};
use crate::library;
use crate::morphisms::{
    enumerate_join_maps, enumerate_partial_functions, power_functor, JoinMap, LatticeRef, MorphismError,
    PartialFunction, PowerMap, PowerMapSpace, DEFAULT_GUARD,
};
use crate::quantaloid::{
    counterexample_q_plus, counterexample_state, direct_image, first_interior, hom_set, hom_set_count,
    is_state_transition, property_transition, property_transition_table, q_minus_hull, state_transition_oracle,
    QMinusBasis, QuantaloidError, Tier, DEFAULT_ORACLE_BOUND,
};
use crate::subcategory::{IsotoneZero, SubcategorySpec};
use crate::text::write_power_map;

/// Check identifiers, in report order.
pub mod check_id {
    /// Functorial and contextual enrichments of the isotone category agree
    /// exactly on two-element chains.
    pub const MINUS_PLUS_COLLAPSE: &str = "minus-plus-collapse";
    /// Direct images have their generating map as property transition.
    pub const DIRECT_IMAGE_TRANSITION: &str = "direct-image-transition";
    /// Join-respecting union-preserving maps are exactly the state transitions.
    pub const TRANSITION_CRITERION: &str = "transition-criterion";
    /// State transitions exhaust the contextual enrichment exactly on two-element chains.
    pub const STATE_PLUS_COLLAPSE: &str = "state-plus-collapse";
    /// A state transition outside the functorial enrichment.
    pub const STATE_OUTSIDE_MINUS: &str = "state-outside-minus";
    /// `|Q-| < |Qst| < |Q+|` with the inclusions checked map by map.
    pub const STRICT_INCLUSIONS: &str = "strict-inclusions";
    pub const QUANTALOID_LAWS: &str = "quantaloid-laws";
    pub const FUNCTOR_LAWS: &str = "functor-laws";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
    Skipped,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::NotApplicable => "not-applicable",
            CheckStatus::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: CheckStatus,
    pub lattices: Vec<String>,
    pub counts: BTreeMap<String, u64>,
    /// Maps in the text map format.
    pub witnesses: Vec<String>,
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl CheckRecord {
    fn new(id: &str, lattices: &[&FiniteLattice]) -> Self {
        CheckRecord {
            id: id.to_string(),
            status: CheckStatus::Pass,
            lattices: lattices.iter().map(|l| l.name().to_string()).collect(),
            counts: BTreeMap::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
            elapsed_ms: 0,
        }
    }

    fn count(&mut self, key: &str, value: u64) {
        self.counts.insert(key.to_string(), value);
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Records a failed condition; the status never recovers from `fail`.
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.status = CheckStatus::Fail;
            self.notes.push(format!("violated: {}", what.into()));
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub guard: u64,
    pub oracle_bound: usize,
    /// Random samples drawn when a hom-set is too large to sweep.
    pub sample_budget: usize,
    pub seed: u64,
}

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_2000;

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            guard: DEFAULT_GUARD,
            oracle_bound: DEFAULT_ORACLE_BOUND,
            sample_budget: 500,
            seed: DEFAULT_SEED,
        }
    }
}

/// Hom-sets up to this size are swept exhaustively by the law batteries.
pub const EXHAUSTIVE_LIMIT: usize = 100;
/// Hom-sets up to this size have every subfamily joined.
const SUBFAMILY_LIMIT: usize = 16;

type Expectations = BTreeMap<String, BTreeMap<String, u64>>;

/// Frozen endo-hom-set sizes for the built-in lattices.
pub fn expectations() -> &'static Expectations {
    static CELL: OnceLock<Expectations> = OnceLock::new();
    CELL.get_or_init(|| toml::from_str(include_str!("../data/expectations.toml")).expect("valid expectations file"))
}

/// The frozen count for a tier of `l`'s endo-hom-set, if `l` is a built-in.
pub fn expected_count(l: &FiniteLattice, tier: Tier) -> Option<u64> {
    let builtin = library::builtin(l.name())?;
    if *builtin != *l {
        return None;
    }
    expectations().get(l.name())?.get(tier.as_str()).copied()
}

fn timed(record: impl FnOnce() -> Result<CheckRecord, QuantaloidError>) -> Result<CheckRecord, QuantaloidError> {
    let start = Instant::now();
    let mut r = record()?;
    r.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(r)
}

/// `Q- = Q+` for the isotone zero-preserving category exactly on two-element
/// chains. On a chain of two the hom-set counts are compared; otherwise the map
/// `T -> {a}` (for `a ∈ T`) must fall outside `Q-`, since every isotone `h`
/// with `𝒫Uh` below it kills the top and so cannot fix `a`.
pub fn verify_minus_plus_collapse(l: &LatticeRef, cfg: &VerifyConfig) -> Result<CheckRecord, QuantaloidError> {
    timed(|| {
        let mut r = CheckRecord::new(check_id::MINUS_PLUS_COLLAPSE, &[l]);
        let Some(a) = first_interior(l) else {
            let minus = hom_set_count(l, l, Tier::QMinus, &IsotoneZero, cfg.guard)?;
            let plus = hom_set_count(l, l, Tier::QPlus, &IsotoneZero, cfg.guard)?;
            r.count("qminus", minus);
            r.count("qplus", plus);
            r.require(minus == plus, "two-element chain has |Q-| = |Q+|");
            return Ok(r);
        };
        let cx = counterexample_q_plus(l, a)?;
        r.witnesses.push(write_power_map("interior_point", &cx));
        let basis = QMinusBasis::new(&IsotoneZero, l, l, cfg.guard)?;
        let hull = basis.hull(&cx)?;
        r.require(hull != cx, "interior-point map lies outside Q-");
        let monotone = crate::morphisms::enumerate_monotone_zero_maps(l, l, cfg.guard)?;
        let dominated: Vec<_> = monotone
            .iter()
            .filter(|h| direct_image_leq(&h.underlying_partial(), &cx))
            .collect();
        r.count("isotone-maps", monotone.len() as u64);
        r.count("dominated", dominated.len() as u64);
        r.require(
            dominated.iter().all(|h| h.apply(l.top()) == l.bottom()),
            "dominated maps send top to 0",
        );
        r.require(
            dominated.iter().all(|h| h.apply(a) != a),
            "no dominated map fixes the interior point",
        );
        Ok(r)
    })
}

fn direct_image_leq(f: &PartialFunction, g: &PowerMap) -> bool {
    power_functor(f).leq(g).unwrap_or(false)
}

/// `is_state_transition(·, all)` agrees with the subset-pair oracle on every
/// union-preserving map `l -> m`.
pub fn verify_transition_criterion(
    l: &LatticeRef,
    m: &LatticeRef,
    cfg: &VerifyConfig,
) -> Result<CheckRecord, QuantaloidError> {
    timed(|| {
        let mut r = CheckRecord::new(check_id::TRANSITION_CRITERION, &[l, m]);
        let space = PowerMapSpace::new(l, m, cfg.guard)?;
        let all = SubcategorySpec::All;
        let outcomes: Vec<(bool, bool)> = (0..space.len() as usize)
            .into_par_iter()
            .map(|k| {
                let g = space.get(k as u64);
                let direct = is_state_transition(&g, &all)?.is_some();
                let oracle = state_transition_oracle(&g, cfg.oracle_bound)?.holds;
                Ok((direct, oracle))
            })
            .collect::<Result<_, QuantaloidError>>()?;
        let positives = outcomes.iter().filter(|(d, _)| *d).count() as u64;
        let disagreements: Vec<usize> = outcomes
            .iter()
            .enumerate()
            .filter(|(_, (d, o))| d != o)
            .map(|(k, _)| k)
            .collect();
        r.count("maps", space.len());
        r.count("positives", positives);
        r.count("disagreements", disagreements.len() as u64);
        if let Some(&k) = disagreements.first() {
            r.witnesses.push(write_power_map("disagreement", &space.get(k as u64)));
        }
        r.require(
            disagreements.is_empty(),
            "join-respecting maps coincide with state transitions",
        );
        if l == m {
            if let Some(expected) = expected_count(l, Tier::QSt) {
                r.require(positives == expected, format!("frozen count |Qst| = {expected}"));
            }
        }
        Ok(r)
    })
}

/// `Qst = Q+` exactly on two-element chains. Otherwise the interior-point map
/// breaks join respect on the pair `({1}, {a, 1})`.
pub fn verify_state_plus_collapse(l: &LatticeRef, cfg: &VerifyConfig) -> Result<CheckRecord, QuantaloidError> {
    timed(|| {
        let mut r = CheckRecord::new(check_id::STATE_PLUS_COLLAPSE, &[l]);
        let all = SubcategorySpec::All;
        let Some(a) = first_interior(l) else {
            let st = hom_set_count(l, l, Tier::QSt, &all, cfg.guard)?;
            let plus = hom_set_count(l, l, Tier::QPlus, &all, cfg.guard)?;
            r.count("qst", st);
            r.count("qplus", plus);
            r.require(st == plus, "two-element chain has |Qst| = |Q+|");
            return Ok(r);
        };
        let cx = counterexample_q_plus(l, a)?;
        r.witnesses.push(write_power_map("interior_point", &cx));
        let verdict = state_transition_oracle(&cx, cfg.oracle_bound)?;
        r.require(!verdict.holds, "interior-point map is not join-respecting");
        if let Some((t, u)) = verdict.witness {
            r.note(format!(
                "first violating pair: {} / {}",
                l.format_set(t),
                l.format_set(u)
            ));
        }
        let top_only = ElemSet::singleton(l.top());
        let with_a = top_only.union(ElemSet::singleton(a));
        let (j1, j2) = (l.join_all(cx.apply(top_only)?), l.join_all(cx.apply(with_a)?));
        r.require(
            l.join_all(top_only) == l.join_all(with_a) && j1 == l.bottom() && j2 == a,
            "images of {1} and {a,1} join to 0 and a",
        );
        r.require(is_state_transition(&cx, &all)?.is_none(), "not a state transition");
        Ok(r)
    })
}

/// On a lattice with `a < b v c`, `a !<= b`, `a !<= c`: the map splitting
/// `b v c` into `{a, b, c}` is a state transition over the identity, yet every
/// join map whose direct image lies below it kills `a`, so it is not in `Q-`.
pub fn verify_state_outside_minus(l: &LatticeRef, cfg: &VerifyConfig) -> Result<CheckRecord, QuantaloidError> {
    let triple = l
        .witness_triple()
        .ok_or_else(|| QuantaloidError::NoWitnessTriple(l.name().to_string()))?;
    timed(|| {
        let mut r = CheckRecord::new(check_id::STATE_OUTSIDE_MINUS, &[l]);
        let (a, b, c) = triple;
        r.note(format!(
            "triple ({}, {}, {})",
            l.element_name(a),
            l.element_name(b),
            l.element_name(c)
        ));
        let all = SubcategorySpec::All;
        let st = counterexample_state(l, triple)?;
        r.witnesses.push(write_power_map("split_join", &st));
        let pt = is_state_transition(&st, &all)?;
        r.require(
            pt.as_ref().is_some_and(JoinMap::is_identity),
            "state transition with identity property transition",
        );
        let hull = q_minus_hull(&st, &all, cfg.guard)?;
        r.require(hull != st, "strictly above its Q- hull");
        r.require(!hull.image(a).contains(a), "hull image of {a} lacks a");
        let maps = enumerate_join_maps(l, l, cfg.guard)?;
        let dominated: Vec<&JoinMap> = maps.iter().filter(|g| direct_image(g).leq_unchecked(&st)).collect();
        r.count("join-maps", maps.len() as u64);
        r.count("dominated", dominated.len() as u64);
        r.require(
            dominated.iter().all(|g| g.apply(a) == l.bottom()),
            "dominated join maps send a to 0",
        );
        Ok(r)
    })
}

/// `|pA| <= |Q-| < |Qst| < |Q+|` for the endo-hom-set of `l` with respect to
/// all join maps (a subquantaloid, hence its own pre-enrichment). Strictness is
/// asserted only when `l` has a witness triple; the inclusions are checked map
/// by map regardless.
pub fn verify_strict_inclusions(l: &LatticeRef, cfg: &VerifyConfig) -> Result<CheckRecord, QuantaloidError> {
    timed(|| {
        let mut r = CheckRecord::new(check_id::STRICT_INCLUSIONS, &[l]);
        let all = SubcategorySpec::All;
        let space = PowerMapSpace::new(l, l, cfg.guard)?;
        let basis = QMinusBasis::new(&all, l, l, cfg.guard)?;
        let (minus, st, minus_not_st) = (0..space.len() as usize)
            .into_par_iter()
            .map(|k| {
                let g = space.get(k as u64);
                let in_minus = basis.contains(&g)?;
                let in_st = is_state_transition(&g, &all)?.is_some();
                Ok::<_, QuantaloidError>((in_minus as u64, in_st as u64, (in_minus && !in_st) as u64))
            })
            .try_reduce(|| (0, 0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1, x.2 + y.2)))?;
        let plus = space.len();
        let pa = basis.images().len() as u64;
        r.count("pA", pa);
        r.count("qminus", minus);
        r.count("qst", st);
        r.count("qplus", plus);
        r.require(minus_not_st == 0, "every Q- member is a state transition");
        for (tier, got) in [
            (Tier::PA, pa),
            (Tier::QMinus, minus),
            (Tier::QSt, st),
            (Tier::QPlus, plus),
        ] {
            if let Some(expected) = expected_count(l, tier) {
                r.require(got == expected, format!("frozen count |{tier}| = {expected}"));
            }
        }
        let relation = |x: u64, y: u64| {
            if x < y {
                "<"
            } else if x == y {
                "="
            } else {
                ">"
            }
        };
        r.note(format!(
            "measured: qminus {} qst {} qplus",
            relation(minus, st),
            relation(st, plus)
        ));
        if l.witness_triple().is_some() {
            r.require(minus < st && st < plus, "|Q-| < |Qst| < |Q+|");
        } else if r.status == CheckStatus::Pass {
            r.status = CheckStatus::NotApplicable;
            r.note("no witness triple; strictness not asserted");
        }
        Ok(r)
    })
}

fn sample<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

/// Two-sided distributivity of composition over pointwise joins on the power
/// endo-hom-set, plus associativity and identities. Returns the number of
/// checked instances and the first failing triple.
pub fn check_quantaloid_laws(
    l: &LatticeRef,
    cfg: &VerifyConfig,
) -> Result<(u64, Option<[PowerMap; 3]>), QuantaloidError> {
    let space = PowerMapSpace::new(l, l, cfg.guard)?;
    let id = PowerMap::identity(l);
    let bottom = PowerMap::empty(l, l);
    let triple_ok = |h: &PowerMap, g1: &PowerMap, g2: &PowerMap| -> Result<bool, MorphismError> {
        let joined = PowerMap::pointwise_join(&[g1.clone(), g2.clone()])?;
        let left = h.compose(&joined)? == PowerMap::pointwise_join(&[h.compose(g1)?, h.compose(g2)?])?;
        let right = joined.compose(h)? == PowerMap::pointwise_join(&[g1.compose(h)?, g2.compose(h)?])?;
        let assoc = h.compose(&g1.compose(g2)?)? == h.compose(g1)?.compose(g2)?;
        let unit = id.compose(h)? == *h && h.compose(&id)? == *h;
        let empty = h.compose(&bottom)? == bottom && bottom.compose(h)? == bottom;
        Ok(left && right && assoc && unit && empty)
    };

    let mut checked = 0u64;
    if space.len() as usize <= EXHAUSTIVE_LIMIT {
        let maps: Vec<PowerMap> = space.iter().collect();
        for h in &maps {
            for g1 in &maps {
                for g2 in &maps {
                    checked += 1;
                    if !triple_ok(h, g1, g2)? {
                        return Ok((checked, Some([h.clone(), g1.clone(), g2.clone()])));
                    }
                }
            }
        }
        if maps.len() <= SUBFAMILY_LIMIT {
            // arbitrary subfamilies, each joined in one go
            let after: Vec<Vec<PowerMap>> = maps
                .iter()
                .map(|h| maps.iter().map(|g| h.compose(g)).collect())
                .collect::<Result<_, _>>()?;
            let before: Vec<Vec<PowerMap>> = maps
                .iter()
                .map(|h| maps.iter().map(|g| g.compose(h)).collect())
                .collect::<Result<_, _>>()?;
            for mask in 0u64..1 << maps.len() {
                let family = ElemSet::from_bits(mask);
                let mut joined = bottom.clone();
                family.iter().for_each(|i| joined.union_with(&maps[i]));
                for (k, h) in maps.iter().enumerate() {
                    checked += 1;
                    let (mut left, mut right) = (bottom.clone(), bottom.clone());
                    for i in family.iter() {
                        left.union_with(&after[k][i]);
                        right.union_with(&before[k][i]);
                    }
                    if h.compose(&joined)? != left || joined.compose(h)? != right {
                        return Ok((checked, Some([h.clone(), joined.clone(), bottom.clone()])));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.sample_budget {
            let pick = |rng: &mut ChaCha8Rng| space.get(rng.gen_range(0..space.len()));
            let (h, g1, g2) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            checked += 1;
            if !triple_ok(&h, &g1, &g2)? {
                return Ok((checked, Some([h, g1, g2])));
            }
        }
    }
    Ok((checked, None))
}

/// The power functor on partial functions between the carriers of `objects`:
/// identities, every composable pair (sampled above [`EXHAUSTIVE_LIMIT`]
/// maps per hom-set), and injectivity on each hom-set.
pub fn check_power_functor(
    objects: &[LatticeRef],
    cfg: &VerifyConfig,
) -> Result<(u64, Option<String>), QuantaloidError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checked = 0u64;
    let mut homs: BTreeMap<(usize, usize), Vec<PartialFunction>> = BTreeMap::new();
    for (i, x) in objects.iter().enumerate() {
        checked += 1;
        if power_functor(&PartialFunction::identity(x)) != PowerMap::identity(x) {
            return Ok((checked, Some(format!("identity on {}", x.name()))));
        }
        for (j, y) in objects.iter().enumerate() {
            let fs = enumerate_partial_functions(x, y, cfg.guard)?;
            let images: BTreeSet<Vec<ElemSet>> = fs
                .iter()
                .map(|f| power_functor(f).singleton_images().to_vec())
                .collect();
            checked += 1;
            if images.len() != fs.len() {
                return Ok((checked, Some(format!("not injective on {} -> {}", x.name(), y.name()))));
            }
            homs.insert((i, j), fs);
        }
    }
    let n = objects.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (first, second) = (&homs[&(i, j)], &homs[&(j, k)]);
                let exhaustive = first.len() <= EXHAUSTIVE_LIMIT && second.len() <= EXHAUSTIVE_LIMIT;
                let pairs: Vec<(&PartialFunction, &PartialFunction)> = if exhaustive {
                    first.iter().flat_map(|f| second.iter().map(move |g| (f, g))).collect()
                } else {
                    (0..cfg.sample_budget)
                        .map(|_| (sample(&mut rng, first), sample(&mut rng, second)))
                        .collect()
                };
                for (f, g) in pairs {
                    checked += 1;
                    if power_functor(&g.compose(f)?) != power_functor(g).compose(&power_functor(f))? {
                        return Ok((
                            checked,
                            Some(format!(
                                "composition {} -> {} -> {}",
                                objects[i].name(),
                                objects[j].name(),
                                objects[k].name()
                            )),
                        ));
                    }
                }
            }
        }
    }
    Ok((checked, None))
}

/// Property transitions compose: `(g∘f)_pr = g_pr ∘ f_pr` on state transitions,
/// `(id)_pr = id`, and every join map is the property transition of its direct
/// image.
pub fn check_property_functor(
    l: &LatticeRef,
    cfg: &VerifyConfig,
) -> Result<(u64, Option<[PowerMap; 2]>), QuantaloidError> {
    let all = SubcategorySpec::All;
    let mut checked = 1u64;
    if !property_transition(&PowerMap::identity(l)).is_some_and(|f| f.is_identity()) {
        return Ok((checked, Some([PowerMap::identity(l), PowerMap::identity(l)])));
    }
    for f in enumerate_join_maps(l, l, cfg.guard)? {
        checked += 1;
        let img = direct_image(&f);
        if is_state_transition(&img, &all)?.as_ref() != Some(&f) {
            return Ok((checked, Some([img.clone(), img])));
        }
    }
    let transitions = hom_set(l, l, Tier::QSt, &all, cfg.guard)?;
    let pairs: Vec<(&PowerMap, &PowerMap)> = if transitions.len() <= EXHAUSTIVE_LIMIT {
        transitions
            .iter()
            .flat_map(|f| transitions.iter().map(move |g| (f, g)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.sample_budget)
            .map(|_| (sample(&mut rng, &transitions), sample(&mut rng, &transitions)))
            .collect()
    };
    for (f, g) in pairs {
        checked += 1;
        let composite = property_transition(&g.compose(f)?);
        let expected = match (property_transition(g), property_transition(f)) {
            (Some(gp), Some(fp)) => Some(gp.compose(&fp)?),
            _ => None,
        };
        if composite.is_none() || composite != expected {
            return Ok((checked, Some([g.clone(), f.clone()])));
        }
    }
    Ok((checked, None))
}

/// `(𝒫Uf)_pr = f` for every join endomap and `(⋃ 𝒫Uf_i)_pr = ∨ f_i` for every
/// subfamily (sampled subfamilies above 16 maps).
pub fn check_direct_image_transitions(
    l: &LatticeRef,
    cfg: &VerifyConfig,
) -> Result<(u64, Option<PowerMap>), QuantaloidError> {
    let maps = enumerate_join_maps(l, l, cfg.guard)?;
    let mut checked = 0u64;
    for f in &maps {
        checked += 1;
        let img = direct_image(f);
        if property_transition_table(&img) != f.table() {
            return Ok((checked, Some(img)));
        }
    }
    let families: Vec<Vec<usize>> = if maps.len() <= SUBFAMILY_LIMIT {
        (0u64..1 << maps.len())
            .map(|mask| ElemSet::from_bits(mask).iter().collect())
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.sample_budget)
            .map(|_| {
                let size = rng.gen_range(0..=maps.len().min(8));
                (0..size).map(|_| rng.gen_range(0..maps.len())).collect()
            })
            .collect()
    };
    for family in families {
        checked += 1;
        let images: Vec<PowerMap> = family.iter().map(|&i| direct_image(&maps[i])).collect();
        let union = PowerMap::join_in(l, l, &images)?;
        let join = if family.is_empty() {
            JoinMap::zero(l, l)
        } else {
            JoinMap::pointwise_join(&family.iter().map(|&i| maps[i].clone()).collect::<Vec<_>>())?
        };
        if property_transition_table(&union) != join.table() {
            return Ok((checked, Some(union)));
        }
    }
    Ok((checked, None))
}

/// Law batteries on `l`: quantaloid laws, functor laws and direct-image
/// property transitions, exhaustive on hom-sets of at most
/// [`EXHAUSTIVE_LIMIT`] maps and sampled otherwise.
pub fn verify_laws(l: &LatticeRef, cfg: &VerifyConfig) -> Result<Vec<CheckRecord>, QuantaloidError> {
    let quantaloid = timed(|| {
        let mut r = CheckRecord::new(check_id::QUANTALOID_LAWS, &[l]);
        let (checked, failure) = check_quantaloid_laws(l, cfg)?;
        r.count("instances", checked);
        if let Some(maps) = failure {
            for (name, m) in ["h", "g1", "g2"].iter().zip(&maps) {
                r.witnesses.push(write_power_map(name, m));
            }
        }
        r.require(
            r.witnesses.is_empty(),
            "composition distributes over joins on both sides",
        );
        Ok(r)
    })?;
    let functor = timed(|| {
        let mut r = CheckRecord::new(check_id::FUNCTOR_LAWS, &[l]);
        let (power_checked, power_failure) = check_power_functor(std::slice::from_ref(l), cfg)?;
        r.count("power-instances", power_checked);
        if let Some(what) = power_failure {
            r.require(false, format!("power functor: {what}"));
        }
        let (pr_checked, pr_failure) = check_property_functor(l, cfg)?;
        r.count("property-instances", pr_checked);
        if let Some([g, f]) = pr_failure {
            r.witnesses.push(write_power_map("g", &g));
            r.witnesses.push(write_power_map("f", &f));
            r.require(false, "property transitions compose");
        }
        Ok(r)
    })?;
    let direct = timed(|| {
        let mut r = CheckRecord::new(check_id::DIRECT_IMAGE_TRANSITION, &[l]);
        let (checked, failure) = check_direct_image_transitions(l, cfg)?;
        r.count("instances", checked);
        if let Some(g) = failure {
            r.witnesses.push(write_power_map("direct_image", &g));
            r.require(false, "property transition of a union of direct images is the join");
        }
        Ok(r)
    })?;
    Ok(vec![quantaloid, functor, direct])
}

/// All checks on one lattice (and on its endo-hom-sets).
pub fn verify_lattice(l: &LatticeRef, cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let skip = |id: &str, e: QuantaloidError| {
        let mut r = CheckRecord::new(id, &[l]);
        r.status = match e {
            QuantaloidError::NoWitnessTriple(_) => CheckStatus::NotApplicable,
            QuantaloidError::Morphism(MorphismError::SizeGuardExceeded { .. })
            | QuantaloidError::OracleBoundExceeded { .. } => CheckStatus::Skipped,
            _ => CheckStatus::Fail,
        };
        r.note(e.to_string());
        r
    };
    let mut out = Vec::new();
    type Single = fn(&LatticeRef, &VerifyConfig) -> Result<CheckRecord, QuantaloidError>;
    let singles: [(&str, Single); 4] = [
        (check_id::MINUS_PLUS_COLLAPSE, verify_minus_plus_collapse),
        (check_id::STATE_PLUS_COLLAPSE, verify_state_plus_collapse),
        (check_id::STATE_OUTSIDE_MINUS, verify_state_outside_minus),
        (check_id::STRICT_INCLUSIONS, verify_strict_inclusions),
    ];
    for (id, check) in singles {
        out.push(check(l, cfg).unwrap_or_else(|e| skip(id, e)));
    }
    out.push(verify_transition_criterion(l, l, cfg).unwrap_or_else(|e| skip(check_id::TRANSITION_CRITERION, e)));
    match verify_laws(l, cfg) {
        Ok(records) => out.extend(records),
        Err(e) => out.push(skip(check_id::QUANTALOID_LAWS, e)),
    }
    out
}

/// Aggregated records, sorted by check id then lattices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(mut records: Vec<CheckRecord>) -> Self {
        records.sort_by(|a, b| (&a.id, &a.lattices).cmp(&(&b.id, &b.lattices)));
        VerificationReport { records }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed())
    }

    /// One line per check, followed by indented notes and witnesses.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let counts: Vec<String> = r.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(
                out,
                "{:<15} {:<24} {:<8} {} ({} ms)",
                r.status.as_str(),
                r.id,
                r.lattices.join(","),
                counts.join(" "),
                r.elapsed_ms
            );
            for n in &r.notes {
                let _ = writeln!(out, "    note: {n}");
            }
            for w in &r.witnesses {
                for line in w.lines() {
                    let _ = writeln!(out, "    | {line}");
                }
            }
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.records.len(), failed);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Every applicable check on every lattice, lattices processed in parallel.
pub fn run_suite(lattices: &[LatticeRef], cfg: &VerifyConfig) -> VerificationReport {
    let records: Vec<CheckRecord> = lattices.par_iter().flat_map_iter(|l| verify_lattice(l, cfg)).collect();
    VerificationReport::new(records)
}
