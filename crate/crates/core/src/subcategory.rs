//! Subcategories of the category of finite lattices and join-preserving maps,
//! together with the isotone zero-preserving category used as a second
//! concrete category.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lattice::FiniteLattice;
use crate::morphisms::{
    enumerate_join_maps, enumerate_monotone_zero_maps, JoinMap, LatticeRef, MorphismError, PartialFunction,
};
use crate::quantaloid::QuantaloidError;

/// A category concrete over sets and partial maps through the forgetful
/// functor that drops the bottom element.
pub trait ConcreteCategory: Send + Sync {
    fn describe(&self) -> String;

    fn admit_object(&self, l: &FiniteLattice) -> Result<(), QuantaloidError>;

    /// The forgetful image of every morphism `source -> target`, in
    /// enumeration order.
    fn underlying_hom(
        &self,
        source: &LatticeRef,
        target: &LatticeRef,
        guard: u64,
    ) -> Result<Vec<PartialFunction>, QuantaloidError>;

    /// Whether a join-preserving map is a morphism of this category.
    fn contains_join_map(&self, f: &JoinMap) -> bool;
}

/// Bounded lattices with isotone maps sending `0` to `0`. Every
/// join-preserving map is such a map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IsotoneZero;

impl ConcreteCategory for IsotoneZero {
    fn describe(&self) -> String {
        "isotone zero-preserving maps".to_string()
    }

    fn admit_object(&self, _l: &FiniteLattice) -> Result<(), QuantaloidError> {
        Ok(())
    }

    fn underlying_hom(
        &self,
        source: &LatticeRef,
        target: &LatticeRef,
        guard: u64,
    ) -> Result<Vec<PartialFunction>, QuantaloidError> {
        Ok(enumerate_monotone_zero_maps(source, target, guard)?
            .iter()
            .map(|f| f.underlying_partial())
            .collect())
    }

    fn contains_join_map(&self, _f: &JoinMap) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcategoryKind {
    All,
    FixedTop,
    Atomistic,
    Generated,
}

impl fmt::Display for SubcategoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubcategoryKind::All => "all",
            SubcategoryKind::FixedTop => "fixedtop",
            SubcategoryKind::Atomistic => "atomistic",
            SubcategoryKind::Generated => "generated",
        })
    }
}

/// A decidable subcategory of finite lattices and join-preserving maps.
///
/// * `All`: every join-preserving map.
/// * `FixedTop`: objects carry an element below which every non-top element
///   lies; morphisms send top to top or everything to bottom.
/// * `Atomistic`: atomistic objects; morphisms send atoms to atoms or bottom.
/// * `Generated`: finitely many objects and the composition closure of a
///   finite family of maps, identities included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubcategorySpec {
    All,
    FixedTop,
    Atomistic,
    Generated(GeneratedSubcategory),
}

impl SubcategorySpec {
    pub fn kind(&self) -> SubcategoryKind {
        match self {
            SubcategorySpec::All => SubcategoryKind::All,
            SubcategorySpec::FixedTop => SubcategoryKind::FixedTop,
            SubcategorySpec::Atomistic => SubcategoryKind::Atomistic,
            SubcategorySpec::Generated(_) => SubcategoryKind::Generated,
        }
    }

    pub fn contains(&self, f: &JoinMap) -> bool {
        match self {
            SubcategorySpec::All => true,
            SubcategorySpec::FixedTop => f.apply(f.source().top()) == f.target().top() || f.is_zero(),
            SubcategorySpec::Atomistic => {
                let targets = f.target().atoms();
                f.source().atoms().iter().all(|a| {
                    let y = f.apply(a);
                    y == f.target().bottom() || targets.contains(y)
                })
            }
            SubcategorySpec::Generated(g) => g.contains(f),
        }
    }

    /// Morphisms `source -> target` in lexicographic table order.
    pub fn hom_set(
        &self,
        source: &LatticeRef,
        target: &LatticeRef,
        guard: u64,
    ) -> Result<Vec<JoinMap>, QuantaloidError> {
        self.admit_object(source)?;
        self.admit_object(target)?;
        match self {
            SubcategorySpec::Generated(g) => g.hom(source, target),
            _ => Ok(enumerate_join_maps(source, target, guard)?
                .into_iter()
                .filter(|f| self.contains(f))
                .collect()),
        }
    }

    /// Admits every object and checks that each hom-set between them holds a
    /// map with nonempty partial image.
    pub fn check_objects(&self, objects: &[LatticeRef], guard: u64) -> Result<(), QuantaloidError> {
        for l in objects {
            self.admit_object(l)?;
        }
        for l in objects {
            for m in objects {
                if self.hom_set(l, m, guard)?.iter().all(JoinMap::is_zero) {
                    return Err(QuantaloidError::Degenerate(l.name().to_string(), m.name().to_string()));
                }
            }
        }
        Ok(())
    }

    /// Writes the subcategory out over the given objects as a generated one.
    pub fn materialize(&self, objects: &[LatticeRef], guard: u64) -> Result<GeneratedSubcategory, QuantaloidError> {
        let mut generators = Vec::new();
        for l in objects {
            for m in objects {
                generators.extend(self.hom_set(l, m, guard)?);
            }
        }
        GeneratedSubcategory::new(objects.to_vec(), generators, guard)
    }

    /// The least subquantaloid of join-preserving maps containing this
    /// subcategory: every hom-set is closed under pointwise joins of arbitrary
    /// subfamilies, the empty join (the constant-bottom map) included.
    ///
    /// `All` and `FixedTop` are already closed and come back unchanged; an
    /// `Atomistic` spec must be materialized over concrete objects first.
    pub fn pre_enrich(&self, guard: u64) -> Result<SubcategorySpec, QuantaloidError> {
        match self {
            SubcategorySpec::All | SubcategorySpec::FixedTop => Ok(self.clone()),
            SubcategorySpec::Atomistic => Err(QuantaloidError::NotGenerated(self.kind())),
            SubcategorySpec::Generated(g) => Ok(SubcategorySpec::Generated(g.join_closure(guard)?)),
        }
    }
}

impl ConcreteCategory for SubcategorySpec {
    fn describe(&self) -> String {
        match self {
            SubcategorySpec::Generated(g) => format!("generated over {} objects", g.objects.len()),
            other => other.kind().to_string(),
        }
    }

    fn admit_object(&self, l: &FiniteLattice) -> Result<(), QuantaloidError> {
        let reject = |reason: &str| {
            Err(QuantaloidError::ObjectNotInSubcategory(
                l.name().to_string(),
                reason.to_string(),
            ))
        };
        match self {
            SubcategorySpec::All => Ok(()),
            SubcategorySpec::FixedTop if l.fixed_top_coatom().is_none() => {
                reject("no element lies above every non-top element")
            }
            SubcategorySpec::Atomistic if !l.is_atomistic() => reject("not atomistic"),
            SubcategorySpec::Generated(g) if g.object_index(l).is_none() => reject("not a listed object"),
            _ => Ok(()),
        }
    }

    fn underlying_hom(
        &self,
        source: &LatticeRef,
        target: &LatticeRef,
        guard: u64,
    ) -> Result<Vec<PartialFunction>, QuantaloidError> {
        Ok(self
            .hom_set(source, target, guard)?
            .iter()
            .map(JoinMap::underlying_partial)
            .collect())
    }

    fn contains_join_map(&self, f: &JoinMap) -> bool {
        self.contains(f)
    }
}

/// Finitely many objects with explicit hom-sets, closed under composition and
/// containing all identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSubcategory {
    objects: Vec<LatticeRef>,
    homs: BTreeMap<(usize, usize), BTreeSet<Vec<usize>>>,
}

impl GeneratedSubcategory {
    pub fn new(objects: Vec<LatticeRef>, generators: Vec<JoinMap>, guard: u64) -> Result<Self, QuantaloidError> {
        let mut unique: Vec<LatticeRef> = Vec::new();
        for o in objects {
            if !unique.iter().any(|u| **u == *o) {
                unique.push(o);
            }
        }
        let mut sub = GeneratedSubcategory {
            objects: unique,
            homs: BTreeMap::new(),
        };
        for i in 0..sub.objects.len() {
            sub.homs
                .entry((i, i))
                .or_default()
                .insert((0..sub.objects[i].len()).collect());
        }
        for f in generators {
            let (i, j) = sub.endpoints(&f)?;
            sub.homs.entry((i, j)).or_default().insert(f.table().to_vec());
        }
        sub.close_under_composition(guard)?;
        for i in 0..sub.objects.len() {
            for j in 0..sub.objects.len() {
                let nondegenerate = sub
                    .homs
                    .get(&(i, j))
                    .is_some_and(|set| set.iter().any(|t| t.iter().any(|&y| y != sub.objects[j].bottom())));
                if !nondegenerate {
                    return Err(QuantaloidError::Degenerate(
                        sub.objects[i].name().to_string(),
                        sub.objects[j].name().to_string(),
                    ));
                }
            }
        }
        Ok(sub)
    }

    pub fn objects(&self) -> &[LatticeRef] {
        &self.objects
    }

    pub fn object_index(&self, l: &FiniteLattice) -> Option<usize> {
        self.objects.iter().position(|o| **o == *l)
    }

    fn endpoints(&self, f: &JoinMap) -> Result<(usize, usize), QuantaloidError> {
        let find = |l: &LatticeRef| {
            self.object_index(l).ok_or_else(|| {
                QuantaloidError::ObjectNotInSubcategory(l.name().to_string(), "not a listed object".to_string())
            })
        };
        Ok((find(f.source())?, find(f.target())?))
    }

    pub fn contains(&self, f: &JoinMap) -> bool {
        match self.endpoints(f) {
            Ok(key) => self.homs.get(&key).is_some_and(|set| set.contains(f.table())),
            Err(_) => false,
        }
    }

    pub fn hom(&self, source: &LatticeRef, target: &LatticeRef) -> Result<Vec<JoinMap>, QuantaloidError> {
        let (i, j) = (self.index_or_err(source)?, self.index_or_err(target)?);
        let tables = self.homs.get(&(i, j)).into_iter().flatten();
        Ok(tables
            .map(|t| JoinMap::new(self.objects[i].clone(), self.objects[j].clone(), t.clone()))
            .collect::<Result<_, MorphismError>>()?)
    }

    fn index_or_err(&self, l: &LatticeRef) -> Result<usize, QuantaloidError> {
        self.object_index(l).ok_or_else(|| {
            QuantaloidError::ObjectNotInSubcategory(l.name().to_string(), "not a listed object".to_string())
        })
    }

    pub fn morphism_count(&self) -> usize {
        self.homs.values().map(BTreeSet::len).sum()
    }

    fn check_size(&self, guard: u64) -> Result<(), QuantaloidError> {
        let count = self.morphism_count() as u64;
        if count > guard {
            return Err(MorphismError::SizeGuardExceeded {
                count: count as u128,
                guard,
            }
            .into());
        }
        Ok(())
    }

    /// Adds composites until nothing new appears; returns whether anything was added.
    fn close_under_composition(&mut self, guard: u64) -> Result<bool, QuantaloidError> {
        let n = self.objects.len();
        let mut grew = false;
        loop {
            let mut added = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let (Some(first), Some(second)) = (self.homs.get(&(i, j)), self.homs.get(&(j, k))) else {
                            continue;
                        };
                        let existing = self.homs.get(&(i, k));
                        for f in first {
                            for g in second {
                                let gf: Vec<usize> = f.iter().map(|&y| g[y]).collect();
                                if !existing.is_some_and(|s| s.contains(&gf)) {
                                    added.push(((i, k), gf));
                                }
                            }
                        }
                    }
                }
            }
            if added.is_empty() {
                return Ok(grew);
            }
            grew = true;
            for (key, t) in added {
                self.homs.entry(key).or_default().insert(t);
            }
            self.check_size(guard)?;
        }
    }

    /// Whether every hom-set contains the constant-bottom map and is closed
    /// under binary pointwise joins.
    pub fn is_join_closed(&self) -> bool {
        self.homs.iter().all(|(&(i, j), set)| {
            let target = &self.objects[j];
            set.contains(&vec![target.bottom(); self.objects[i].len()])
                && set.iter().all(|f| {
                    set.iter()
                        .all(|g| set.contains(&f.iter().zip(g).map(|(&x, &y)| target.join(x, y)).collect::<Vec<_>>()))
                })
        })
    }

    fn join_closure(&self, guard: u64) -> Result<GeneratedSubcategory, QuantaloidError> {
        let mut out = self.clone();
        for (&(i, j), set) in out.homs.iter_mut() {
            let target = &self.objects[j];
            let generators: Vec<Vec<usize>> = set.iter().cloned().collect();
            set.insert(vec![target.bottom(); self.objects[i].len()]);
            let mut frontier: Vec<Vec<usize>> = set.iter().cloned().collect();
            while let Some(f) = frontier.pop() {
                for g in &generators {
                    let joined: Vec<usize> = f.iter().zip(g).map(|(&x, &y)| target.join(x, y)).collect();
                    if set.insert(joined.clone()) {
                        frontier.push(joined);
                    }
                }
                if set.len() as u64 > guard {
                    return Err(MorphismError::SizeGuardExceeded {
                        count: set.len() as u128,
                        guard,
                    }
                    .into());
                }
            }
        }
        // Composition distributes over pointwise joins, so no new composites can appear.
        let mut check = out.clone();
        if check.close_under_composition(guard)? {
            return Err(QuantaloidError::CompositionNotClosed);
        }
        Ok(out)
    }
}
