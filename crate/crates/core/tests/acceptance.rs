//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Counts marked frozen were produced by an independent brute-force
//! enumeration and are compared exactly.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use quantaloid_core::library::{b2, c2, c3, c4, m3};
use quantaloid_core::morphisms::{enumerate_join_maps, enumerate_partial_functions, power_functor, PowerMapSpace};
use quantaloid_core::quantaloid::{
    counterexample_q_plus, counterexample_state, direct_image, hom_set_count, is_state_transition,
    property_transition_table, q_minus_hull, state_transition_oracle, DEFAULT_ORACLE_BOUND,
};
use quantaloid_core::verify::{
    check_direct_image_transitions, check_power_functor, check_property_functor, check_quantaloid_laws,
};
use quantaloid_core::{
    ElemSet, GeneratedSubcategory, IsotoneZero, JoinMap, SubcategorySpec, Tier, VerifyConfig, DEFAULT_GUARD,
};

const GUARD: u64 = DEFAULT_GUARD;

/// Frozen endo-hom-set sizes on M3 for all join maps.
const M3_QMINUS: u64 = 9568;
const M3_QST: u64 = 44149;
const M3_QPLUS: u64 = 65536;

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn interior_point_map() -> Outcome {
    let l = c3();
    let a = l.index_of("a").unwrap();
    let g = counterexample_q_plus(&l, a).map_err(err)?;
    ensure(
        g.image(a) == ElemSet::singleton(a) && g.image(l.top()).is_empty(),
        "map is a -> {a}, 1 -> ∅",
    )?;
    let hull = q_minus_hull(&g, &IsotoneZero, GUARD).map_err(err)?;
    ensure(hull != g, "map is a fixed point of the Q- hull")?;
    let minus = hom_set_count(&c2(), &c2(), Tier::QMinus, &IsotoneZero, GUARD).map_err(err)?;
    let plus = hom_set_count(&c2(), &c2(), Tier::QPlus, &IsotoneZero, GUARD).map_err(err)?;
    ensure(
        minus == 2 && plus == 2,
        format!("C2: |Q-| = {minus}, |Q+| = {plus}, expected 2 = 2"),
    )?;
    Ok(format!("C3 hull = {:?}; C2 |Q-| = |Q+| = 2", hull.singleton_images()))
}

fn interior_point_oracle_witness() -> Outcome {
    let l = c3();
    let (a, top) = (l.index_of("a").unwrap(), l.top());
    let g = counterexample_q_plus(&l, a).map_err(err)?;
    let verdict = state_transition_oracle(&g, DEFAULT_ORACLE_BOUND).map_err(err)?;
    let expected = (ElemSet::singleton(top), [a, top].into_iter().collect::<ElemSet>());
    ensure(!verdict.holds, "oracle accepts the map")?;
    ensure(
        verdict.witness == Some(expected),
        format!("witness {:?}, expected ({{1}}, {{a,1}})", verdict.witness),
    )?;
    let (t, u) = expected;
    let joins = (l.join_of(t).map_err(err)?, l.join_of(u).map_err(err)?);
    let images = (
        l.join_of(g.apply(t).map_err(err)?).map_err(err)?,
        l.join_of(g.apply(u).map_err(err)?).map_err(err)?,
    );
    ensure(joins == (top, top), "both subsets join to 1")?;
    ensure(images == (l.bottom(), a), "image joins are 0 and a")?;
    Ok("witness ({1}, {a,1}): joins 1 = 1, image joins 0 != a".to_string())
}

fn split_join_outside_minus() -> Outcome {
    let l = m3();
    let (a, b, c) = (
        l.index_of("a").unwrap(),
        l.index_of("b").unwrap(),
        l.index_of("c").unwrap(),
    );
    let f = counterexample_state(&l, (a, b, c)).map_err(err)?;
    let all = SubcategorySpec::All;
    let pr = is_state_transition(&f, &all).map_err(err)?;
    ensure(
        pr.as_ref().is_some_and(JoinMap::is_identity),
        "not a state transition over the identity",
    )?;
    let hull = q_minus_hull(&f, &all, GUARD).map_err(err)?;
    ensure(
        hull.leq(&f).map_err(err)? && hull != f,
        "hull not strictly below the map",
    )?;
    ensure(!hull.image(a).contains(a), "hull image of {a} contains a")?;
    let maps = enumerate_join_maps(&l, &l, GUARD).map_err(err)?;
    let mut dominated = 0;
    for g in &maps {
        if direct_image(g).leq(&f).map_err(err)? {
            dominated += 1;
            ensure(
                g.apply(a) == l.bottom(),
                format!("dominated join map {:?} has g(a) != 0", g.table()),
            )?;
        }
    }
    Ok(format!(
        "f_pr = id; {} join maps, {dominated} below the map, all with g(a) = 0",
        maps.len()
    ))
}

fn strict_chain_on_m3() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(err)?;
    let l = m3();
    let all = SubcategorySpec::All;
    let counts = pool
        .install(|| [Tier::QMinus, Tier::QSt, Tier::QPlus].map(|t| hom_set_count(&l, &l, t, &all, GUARD).map_err(err)));
    let [minus, st, plus] = [counts[0].clone()?, counts[1].clone()?, counts[2].clone()?];
    ensure(
        minus < st && st < plus,
        format!("{minus} < {st} < {plus} is not strict"),
    )?;
    ensure(
        (minus, st, plus) == (M3_QMINUS, M3_QST, M3_QPLUS),
        format!("counts ({minus}, {st}, {plus}), frozen ({M3_QMINUS}, {M3_QST}, {M3_QPLUS})"),
    )?;
    Ok(format!("|Q-| = {minus} < |Qst| = {st} < |Q+| = {plus} (one thread)"))
}

fn criterion_agrees_with_oracle() -> Outcome {
    let mut detail = Vec::new();
    for (l, positives_expected) in [(c3(), 11u64), (m3(), M3_QST)] {
        let space = PowerMapSpace::new(&l, &l, GUARD).map_err(err)?;
        let (mut disagreements, mut positives) = (0u64, 0u64);
        for g in space.iter() {
            let direct = is_state_transition(&g, &SubcategorySpec::All).map_err(err)?.is_some();
            let oracle = state_transition_oracle(&g, DEFAULT_ORACLE_BOUND).map_err(err)?.holds;
            disagreements += u64::from(direct != oracle);
            positives += u64::from(direct);
        }
        ensure(
            disagreements == 0,
            format!("{}: {disagreements} disagreements", l.name()),
        )?;
        ensure(
            positives == positives_expected,
            format!("{}: {positives} positives", l.name()),
        )?;
        detail.push(format!("{}: {} maps, {positives} positives", l.name(), space.len()));
    }
    Ok(format!("{}; 0 disagreements", detail.join(", ")))
}

fn direct_images_recover_join_maps() -> Outcome {
    let cfg = VerifyConfig::default();
    let maps = enumerate_join_maps(&m3(), &m3(), GUARD).map_err(err)?;
    for f in &maps {
        ensure(
            property_transition_table(&direct_image(f)) == f.table(),
            format!("M3 map {:?}", f.table()),
        )?;
    }
    let c3_maps = enumerate_join_maps(&c3(), &c3(), GUARD).map_err(err)?;
    ensure(c3_maps.len() == 6, format!("C3 has {} join endomaps", c3_maps.len()))?;
    let (checked, failure) = check_direct_image_transitions(&c3(), &cfg).map_err(err)?;
    ensure(failure.is_none(), format!("C3 failure {failure:?}"))?;
    ensure(
        checked == 6 + 64,
        format!("C3: {checked} instances, expected 6 maps + 64 subfamilies"),
    )?;
    Ok(format!("M3: {} maps; C3: 6 maps and 64 subfamilies", maps.len()))
}

fn quantaloid_laws() -> Outcome {
    let cfg = VerifyConfig::default();
    let (checked, failure) = check_quantaloid_laws(&c3(), &cfg).map_err(err)?;
    ensure(failure.is_none(), format!("C3 failing triple {failure:?}"))?;
    ensure(checked >= 16 * 16 * 16, format!("C3: only {checked} instances"))?;
    let (sampled, failure) = check_quantaloid_laws(&m3(), &cfg).map_err(err)?;
    ensure(failure.is_none(), format!("M3 failing triple {failure:?}"))?;
    ensure(sampled >= 500, format!("M3: only {sampled} sampled triples"))?;
    Ok(format!(
        "C3 exhaustive ({checked} instances); M3 {sampled} seeded triples"
    ))
}

fn functoriality() -> Outcome {
    let cfg = VerifyConfig::default();
    // carriers of size 1, 2, 3, 3
    let objects = [c2(), c3(), c4(), b2()];
    let (checked, failure) = check_power_functor(&objects, &cfg).map_err(err)?;
    ensure(failure.is_none(), format!("power functor: {failure:?}"))?;
    let (pr_checked, failure) = check_property_functor(&c3(), &cfg).map_err(err)?;
    ensure(failure.is_none(), format!("property transitions: {failure:?}"))?;
    ensure(
        pr_checked >= 11 * 11,
        format!("only {pr_checked} property-transition instances on C3"),
    )?;
    Ok(format!(
        "power functor {checked} instances; property transitions {pr_checked} instances"
    ))
}

fn power_functor_not_full() -> Outcome {
    let l = c3();
    let partial = enumerate_partial_functions(&l, &l, GUARD).map_err(err)?;
    let images: BTreeSet<Vec<ElemSet>> = partial
        .iter()
        .map(|f| power_functor(f).singleton_images().to_vec())
        .collect();
    let power = PowerMapSpace::new(&l, &l, GUARD).map_err(err)?;
    ensure(
        partial.len() == 9 && images.len() == 9,
        format!("{} partial functions, {} images", partial.len(), images.len()),
    )?;
    ensure(power.len() == 16, format!("{} union-preserving maps", power.len()))?;
    Ok(format!(
        "{} direct images vs {} union-preserving maps",
        images.len(),
        power.len()
    ))
}

/// Join closure of `tables` computed from scratch over all subfamilies.
fn join_closure_oracle(
    target: &quantaloid_core::FiniteLattice,
    tables: &[Vec<usize>],
    n: usize,
) -> BTreeSet<Vec<usize>> {
    (0u64..1 << tables.len())
        .map(|mask| {
            (0..n)
                .map(|x| {
                    (0..tables.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .fold(target.bottom(), |acc, i| target.join(acc, tables[i][x]))
                })
                .collect()
        })
        .collect()
}

fn pre_enrichment() -> Outcome {
    let l = c3();
    let maps = enumerate_join_maps(&l, &l, GUARD).map_err(err)?;
    let (mut specs, mut closed_inputs) = (0, 0);
    for mask in 0u64..1 << maps.len() {
        let generators: Vec<JoinMap> = ElemSet::from_bits(mask).iter().map(|i| maps[i].clone()).collect();
        let spec = GeneratedSubcategory::new(vec![l.clone()], generators, GUARD).map_err(err)?;
        let input = SubcategorySpec::Generated(spec.clone());
        let enriched = input.pre_enrich(GUARD).map_err(err)?;
        let again = enriched.pre_enrich(GUARD).map_err(err)?;
        ensure(again == enriched, format!("not idempotent on generators {mask:#b}"))?;
        if spec.is_join_closed() {
            closed_inputs += 1;
            ensure(enriched == input, format!("join-closed input {mask:#b} changed"))?;
        }
        let SubcategorySpec::Generated(out) = &enriched else {
            return Err("enrichment changed the subcategory kind".to_string());
        };
        let hom = out.hom(&l, &l).map_err(err)?;
        for f in &hom {
            for g in &hom {
                ensure(
                    out.contains(&g.compose(f).map_err(err)?),
                    format!("not composition-closed on {mask:#b}"),
                )?;
            }
        }
        let input_tables: Vec<Vec<usize>> = spec
            .hom(&l, &l)
            .map_err(err)?
            .iter()
            .map(|f| f.table().to_vec())
            .collect();
        let expected = join_closure_oracle(&l, &input_tables, l.len());
        let got: BTreeSet<Vec<usize>> = hom.iter().map(|f| f.table().to_vec()).collect();
        ensure(
            got == expected,
            format!("closure of {mask:#b} differs from the subfamily-join oracle"),
        )?;
        specs += 1;
    }
    let full = SubcategorySpec::All.materialize(std::slice::from_ref(&l), GUARD).map_err(err)?;
    ensure(full.is_join_closed(), "full hom-set of C3 is not join-closed")?;
    Ok(format!(
        "{specs} generated specs over C3, {closed_inputs} already join-closed"
    ))
}

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            name: "isotone interior-point map outside Q-; C2 collapse",
            limit: secs(1),
            run: interior_point_map,
        },
        Criterion {
            name: "interior-point map fails the oracle on ({1}, {a,1})",
            limit: secs(1),
            run: interior_point_oracle_witness,
        },
        Criterion {
            name: "split-join map on M3: state transition outside Q-",
            limit: secs(5),
            run: split_join_outside_minus,
        },
        Criterion {
            name: "strict chain |Q-| < |Qst| < |Q+| on M3",
            limit: secs(30),
            run: strict_chain_on_m3,
        },
        Criterion {
            name: "state-transition test agrees with the subset oracle",
            limit: None,
            run: criterion_agrees_with_oracle,
        },
        Criterion {
            name: "direct images recover join maps and their joins",
            limit: None,
            run: direct_images_recover_join_maps,
        },
        Criterion {
            name: "composition distributes over joins",
            limit: None,
            run: quantaloid_laws,
        },
        Criterion {
            name: "power functor and property transitions are functorial",
            limit: None,
            run: functoriality,
        },
        Criterion {
            name: "power functor is not full on a 2-element carrier",
            limit: None,
            run: power_functor_not_full,
        },
        Criterion {
            name: "pre-enrichment over C3",
            limit: None,
            run: pre_enrichment,
        },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(outcome.is_err());
        println!("{tag} [{:>2}] {} ({elapsed:.2?}): {detail}", i + 1, c.name);
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
