//! Finite categories given by an explicit composition table, and sieves on
//! their objects.
//!
//! Composition follows the diagrammatic convention used throughout the
//! crate: for `g: C → B` and `f: B → A`, [`FiniteCategory::compose`] takes
//! `(g, f)` and returns the composite `f∘g: C → A`.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{malformed, Error, Result};
use crate::report::{Report, Violation};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MorId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub label: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// A set of morphisms of one category, stored as a bitset over morphism ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorphismSet(FixedBitSet);

impl MorphismSet {
    pub fn with_capacity(morphisms: usize) -> Self {
        MorphismSet(FixedBitSet::with_capacity(morphisms))
    }

    pub fn insert(&mut self, m: MorId) -> bool {
        let fresh = !self.0.contains(m.0);
        self.0.insert(m.0);
        fresh
    }

    pub fn remove(&mut self, m: MorId) {
        self.0.set(m.0, false);
    }

    pub fn contains(&self, m: MorId) -> bool {
        self.0.contains(m.0)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = MorId> + '_ {
        self.0.ones().map(MorId)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        out.union_with(&other.0);
        MorphismSet(out)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        out.intersect_with(&other.0);
        MorphismSet(out)
    }
}

/// A set of morphisms into `at`, closed under precomposition.
///
/// Values built through [`FiniteCategory`] are always closed; the unchecked
/// constructor exists so that checkers can be fed deliberately broken data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    at: ObjId,
    members: MorphismSet,
}

impl Sieve {
    pub fn new_unchecked(at: ObjId, members: MorphismSet) -> Self {
        Sieve { at, members }
    }

    pub fn empty(cat: &FiniteCategory, at: ObjId) -> Self {
        Sieve { at, members: cat.empty_set() }
    }

    pub fn at(&self) -> ObjId {
        self.at
    }

    pub fn members(&self) -> &MorphismSet {
        &self.members
    }

    pub fn contains(&self, m: MorId) -> bool {
        self.members.contains(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = MorId> + '_ {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.at == other.at && self.members.is_subset(&other.members)
    }

    /// Member labels, sorted. This is the serialized form of a sieve.
    pub fn labels(&self, cat: &FiniteCategory) -> Vec<String> {
        let mut out: Vec<String> = self.iter().map(|m| cat.label(m).to_owned()).collect();
        out.sort();
        out
    }

    pub fn display<'a>(&'a self, cat: &'a FiniteCategory) -> SieveDisplay<'a> {
        SieveDisplay { sieve: self, cat }
    }
}

pub struct SieveDisplay<'a> {
    sieve: &'a Sieve,
    cat: &'a FiniteCategory,
}

impl fmt::Display for SieveDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.sieve.labels(self.cat).join(", "))
    }
}

/// A category with finitely many objects and morphisms and an explicit
/// composition table.
#[derive(Clone, Debug)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    /// `table[g * m + f]` holds `f∘g`.
    table: Vec<Option<MorId>>,
    incoming: Vec<Vec<MorId>>,
    outgoing: Vec<Vec<MorId>>,
}

impl FiniteCategory {
    /// Assembles a category from raw parts without checking any law.
    /// Run [`FiniteCategory::validate`] on the result.
    pub fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<MorId>,
        composites: impl IntoIterator<Item = (MorId, MorId, MorId)>,
    ) -> Result<Self> {
        let n = morphisms.len();
        if identities.len() != objects.len() {
            return Err(malformed("one identity per object is required"));
        }
        for m in &morphisms {
            if m.dom.0 >= objects.len() || m.cod.0 >= objects.len() {
                return Err(malformed(format!("morphism `{}` has an unknown endpoint", m.label)));
            }
        }
        let mut table = vec![None; n * n];
        for (g, f, h) in composites {
            if g.0 >= n || f.0 >= n || h.0 >= n {
                return Err(malformed("composition entry refers to an unknown morphism"));
            }
            table[g.0 * n + f.0] = Some(h);
        }
        let mut incoming = vec![Vec::new(); objects.len()];
        let mut outgoing = vec![Vec::new(); objects.len()];
        for (i, m) in morphisms.iter().enumerate() {
            incoming[m.cod.0].push(MorId(i));
            outgoing[m.dom.0].push(MorId(i));
        }
        Ok(FiniteCategory { objects, morphisms, identities, table, incoming, outgoing })
    }

    /// The category on `labels` with identities only.
    pub fn discrete(labels: &[&str]) -> Self {
        let mut b = CategoryBuilder::new();
        for l in labels {
            b = b.object(*l);
        }
        b.build().expect("discrete category is well formed")
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + Clone {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn morphisms(&self) -> impl Iterator<Item = MorId> + Clone {
        (0..self.morphisms.len()).map(MorId)
    }

    pub fn object_label(&self, a: ObjId) -> &str {
        &self.objects[a.0]
    }

    pub fn morphism(&self, m: MorId) -> &Morphism {
        &self.morphisms[m.0]
    }

    pub fn label(&self, m: MorId) -> &str {
        &self.morphisms[m.0].label
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.morphisms[m.0].dom
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.morphisms[m.0].cod
    }

    pub fn identity(&self, a: ObjId) -> MorId {
        self.identities[a.0]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identities[self.dom(m).0] == m
    }

    pub fn object_by_label(&self, label: &str) -> Result<ObjId> {
        self.objects
            .iter()
            .position(|o| o == label)
            .map(ObjId)
            .ok_or_else(|| Error::NotFound(format!("object `{label}`")))
    }

    pub fn morphism_by_label(&self, label: &str) -> Result<MorId> {
        self.morphisms
            .iter()
            .position(|m| m.label == label)
            .map(MorId)
            .ok_or_else(|| Error::NotFound(format!("morphism `{label}`")))
    }

    /// Morphisms whose codomain is `a`.
    pub fn into(&self, a: ObjId) -> &[MorId] {
        &self.incoming[a.0]
    }

    /// Morphisms whose domain is `a`.
    pub fn out_of(&self, a: ObjId) -> &[MorId] {
        &self.outgoing[a.0]
    }

    pub fn hom(&self, b: ObjId, a: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.incoming[a.0].iter().copied().filter(move |&m| self.dom(m) == b)
    }

    /// At most one morphism between any ordered pair of objects.
    pub fn is_thin(&self) -> bool {
        self.objects().all(|a| {
            let mut seen = vec![false; self.object_count()];
            self.into(a).iter().all(|&m| !std::mem::replace(&mut seen[self.dom(m).0], true))
        })
    }

    pub fn empty_set(&self) -> MorphismSet {
        MorphismSet::with_capacity(self.morphisms.len())
    }

    /// Raw table lookup for `f∘g`.
    pub fn entry(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.table[g.0 * self.morphisms.len() + f.0]
    }

    /// The composite `f∘g` of `g: C → B` followed by `f: B → A`.
    pub fn compose(&self, g: MorId, f: MorId) -> Result<MorId> {
        if self.cod(g) != self.dom(f) {
            return Err(Error::CompositionMismatch {
                g: self.label(g).to_owned(),
                f: self.label(f).to_owned(),
            });
        }
        self.entry(g, f).ok_or_else(|| Error::MissingComposite {
            g: self.label(g).to_owned(),
            f: self.label(f).to_owned(),
        })
    }

    /// Composite of a pair already known to be composable in a validated
    /// category.
    pub(crate) fn comp(&self, g: MorId, f: MorId) -> MorId {
        self.entry(g, f).expect("validated category has all composites")
    }

    /// Copy of this category with one composition entry overwritten.
    pub fn with_composite(&self, g: MorId, f: MorId, h: MorId) -> Self {
        let mut out = self.clone();
        let n = out.morphisms.len();
        out.table[g.0 * n + f.0] = Some(h);
        out
    }

    /// Checks identity laws, closure of the composition table and
    /// associativity. An empty report means `self` is a category.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        for a in self.objects() {
            let id = self.identity(a);
            if self.dom(id) != a || self.cod(id) != a {
                report.push(
                    Violation::new("identity")
                        .object(self.object_label(a))
                        .morphism(self.label(id))
                        .expected(format!("endomorphism of {}", self.object_label(a)))
                        .actual(format!(
                            "{} -> {}",
                            self.object_label(self.dom(id)),
                            self.object_label(self.cod(id))
                        )),
                );
            }
        }
        for g in self.morphisms() {
            for &f in self.out_of(self.cod(g)) {
                match self.entry(g, f) {
                    None => report.push(
                        Violation::new("closure")
                            .morphism(self.label(g))
                            .morphism(self.label(f))
                            .expected("a composite")
                            .actual("missing"),
                    ),
                    Some(h) if self.dom(h) != self.dom(g) || self.cod(h) != self.cod(f) => report.push(
                        Violation::new("closure")
                            .morphism(self.label(g))
                            .morphism(self.label(f))
                            .expected(format!(
                                "{} -> {}",
                                self.object_label(self.dom(g)),
                                self.object_label(self.cod(f))
                            ))
                            .actual(format!(
                                "{}: {} -> {}",
                                self.label(h),
                                self.object_label(self.dom(h)),
                                self.object_label(self.cod(h))
                            )),
                    ),
                    Some(_) => {}
                }
            }
        }
        for f in self.morphisms() {
            let left = self.identity(self.dom(f));
            let right = self.identity(self.cod(f));
            if let Some(h) = self.entry(left, f) {
                if h != f {
                    report.push(
                        Violation::new("identity")
                            .morphism(self.label(f))
                            .morphism(self.label(left))
                            .expected(self.label(f))
                            .actual(self.label(h)),
                    );
                }
            }
            if let Some(h) = self.entry(f, right) {
                if h != f {
                    report.push(
                        Violation::new("identity")
                            .morphism(self.label(right))
                            .morphism(self.label(f))
                            .expected(self.label(f))
                            .actual(self.label(h)),
                    );
                }
            }
        }
        // h: D → C, g: C → B, f: B → A
        for h in self.morphisms() {
            for &g in self.out_of(self.cod(h)) {
                let Some(gh) = self.entry(h, g) else { continue };
                for &f in self.out_of(self.cod(g)) {
                    let Some(fg) = self.entry(g, f) else { continue };
                    if self.cod(gh) != self.dom(f) || self.dom(fg) != self.cod(h) {
                        continue; // already reported as a closure failure
                    }
                    let (Some(left), Some(right)) = (self.entry(gh, f), self.entry(h, fg)) else {
                        continue;
                    };
                    if left != right {
                        report.push(
                            Violation::new("associativity")
                                .morphism(self.label(h))
                                .morphism(self.label(g))
                                .morphism(self.label(f))
                                .expected(self.label(right))
                                .actual(self.label(left)),
                        );
                    }
                }
            }
        }
        report
    }

    fn check_codomain(&self, at: ObjId, members: &MorphismSet) -> Result<()> {
        if at.0 >= self.object_count() {
            return Err(Error::NotFound(format!("object #{}", at.0)));
        }
        for m in members.iter() {
            if m.0 >= self.morphism_count() {
                return Err(malformed(format!("unknown morphism #{}", m.0)));
            }
            if self.cod(m) != at {
                return Err(malformed(format!(
                    "`{}` does not have codomain `{}`",
                    self.label(m),
                    self.object_label(at)
                )));
            }
        }
        Ok(())
    }

    /// Whether `members` (all with codomain `at`) is closed under
    /// precomposition.
    pub fn is_sieve(&self, at: ObjId, members: &MorphismSet) -> Result<bool> {
        self.check_codomain(at, members)?;
        Ok(members
            .iter()
            .all(|f| self.into(self.dom(f)).iter().all(|&g| members.contains(self.comp(g, f)))))
    }

    /// The smallest sieve on `at` containing `seed`.
    pub fn sieve_closure(&self, at: ObjId, seed: &MorphismSet) -> Result<Sieve> {
        self.check_codomain(at, seed)?;
        let mut members = seed.clone();
        let mut stack: Vec<MorId> = seed.iter().collect();
        while let Some(f) = stack.pop() {
            for &g in self.into(self.dom(f)) {
                let fg = self.comp(g, f);
                if members.insert(fg) {
                    stack.push(fg);
                }
            }
        }
        Ok(Sieve { at, members })
    }

    /// All morphisms into `at`.
    pub fn principal_sieve(&self, at: ObjId) -> Result<Sieve> {
        if at.0 >= self.object_count() {
            return Err(Error::NotFound(format!("object #{}", at.0)));
        }
        let mut members = self.empty_set();
        for &m in self.into(at) {
            members.insert(m);
        }
        Ok(Sieve { at, members })
    }

    pub(crate) fn top(&self, at: ObjId) -> Sieve {
        self.principal_sieve(at).expect("object of this category")
    }

    /// Pull-back `f*(s) = { h: C → B | f∘h ∈ s }` of a sieve on `A` along
    /// `f: B → A`.
    pub fn pullback_sieve(&self, s: &Sieve, f: MorId) -> Result<Sieve> {
        if self.cod(f) != s.at {
            return Err(malformed(format!(
                "cannot pull back a sieve on `{}` along `{}`",
                self.object_label(s.at),
                self.label(f)
            )));
        }
        Ok(self.pullback(s, f))
    }

    pub(crate) fn pullback(&self, s: &Sieve, f: MorId) -> Sieve {
        let b = self.dom(f);
        let mut members = self.empty_set();
        for &h in self.into(b) {
            if s.contains(self.comp(h, f)) {
                members.insert(h);
            }
        }
        Sieve { at: b, members }
    }

    /// Builds a sieve from labels, checking closure.
    pub fn sieve_from_labels(&self, at: ObjId, labels: &[&str]) -> Result<Sieve> {
        let mut members = self.empty_set();
        for l in labels {
            members.insert(self.morphism_by_label(l)?);
        }
        if !self.is_sieve(at, &members)? {
            return Err(malformed(format!("{labels:?} is not closed under precomposition")));
        }
        Ok(Sieve { at, members })
    }
}

/// Label-based construction of a [`FiniteCategory`].
///
/// Identities are synthesized as `id_<object>` unless declared, and the
/// identity entries of the composition table are filled in automatically.
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    morphisms: Vec<(String, String, String)>,
    composites: Vec<(String, String, String)>,
    infer_thin: bool,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(mut self, label: impl Into<String>) -> Self {
        self.objects.push(label.into());
        self
    }

    pub fn morphism(mut self, label: impl Into<String>, dom: impl Into<String>, cod: impl Into<String>) -> Self {
        self.morphisms.push((label.into(), dom.into(), cod.into()));
        self
    }

    /// Declares `gf = f∘g`.
    pub fn composite(mut self, g: impl Into<String>, f: impl Into<String>, gf: impl Into<String>) -> Self {
        self.composites.push((g.into(), f.into(), gf.into()));
        self
    }

    /// Fill every undeclared composite whose hom-set has exactly one
    /// morphism with that morphism.
    pub fn infer_thin_composites(mut self, on: bool) -> Self {
        self.infer_thin = on;
        self
    }

    pub fn build(self) -> Result<FiniteCategory> {
        let mut obj_index: HashMap<&str, ObjId> = HashMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            if obj_index.insert(o.as_str(), ObjId(i)).is_some() {
                return Err(malformed(format!("duplicate object `{o}`")));
            }
        }
        let lookup = |l: &str| obj_index.get(l).copied().ok_or_else(|| Error::NotFound(format!("object `{l}`")));

        let mut morphisms: Vec<Morphism> = Vec::new();
        let mut mor_index: HashMap<String, MorId> = HashMap::new();
        let mut identities: Vec<Option<MorId>> = vec![None; self.objects.len()];
        for (label, dom, cod) in &self.morphisms {
            let (dom, cod) = (lookup(dom)?, lookup(cod)?);
            let id = MorId(morphisms.len());
            if mor_index.insert(label.clone(), id).is_some() {
                return Err(malformed(format!("duplicate morphism `{label}`")));
            }
            if dom == cod && *label == format!("id_{}", self.objects[dom.0]) {
                identities[dom.0] = Some(id);
            }
            morphisms.push(Morphism { label: label.clone(), dom, cod });
        }
        for (i, slot) in identities.iter_mut().enumerate() {
            if slot.is_none() {
                let label = format!("id_{}", self.objects[i]);
                let id = MorId(morphisms.len());
                if mor_index.insert(label.clone(), id).is_some() {
                    return Err(malformed(format!("`{label}` is reserved for an identity")));
                }
                morphisms.push(Morphism { label, dom: ObjId(i), cod: ObjId(i) });
                *slot = Some(id);
            }
        }
        let identities: Vec<MorId> = identities.into_iter().map(Option::unwrap).collect();

        let n = morphisms.len();
        let mut table: Vec<Option<MorId>> = vec![None; n * n];
        let mlookup =
            |l: &str| mor_index.get(l).copied().ok_or_else(|| Error::NotFound(format!("morphism `{l}`")));
        for (g, f, gf) in &self.composites {
            let (gi, fi, hi) = (mlookup(g)?, mlookup(f)?, mlookup(gf)?);
            if morphisms[gi.0].cod != morphisms[fi.0].dom {
                return Err(Error::CompositionMismatch { g: g.clone(), f: f.clone() });
            }
            let slot = &mut table[gi.0 * n + fi.0];
            if slot.is_some_and(|h| h != hi) {
                return Err(malformed(format!("conflicting composites for `{f}` after `{g}`")));
            }
            *slot = Some(hi);
        }
        for (i, m) in morphisms.iter().enumerate() {
            let left = identities[m.dom.0];
            let right = identities[m.cod.0];
            table[left.0 * n + i].get_or_insert(MorId(i));
            table[i * n + right.0].get_or_insert(MorId(i));
        }
        if self.infer_thin {
            for g in 0..n {
                for f in 0..n {
                    if morphisms[g].cod != morphisms[f].dom || table[g * n + f].is_some() {
                        continue;
                    }
                    let (d, c) = (morphisms[g].dom, morphisms[f].cod);
                    let mut candidates = morphisms.iter().enumerate().filter(|(_, h)| h.dom == d && h.cod == c);
                    if let (Some((h, _)), None) = (candidates.next(), candidates.next()) {
                        table[g * n + f] = Some(MorId(h));
                    }
                }
            }
        }
        let composites: Vec<(MorId, MorId, MorId)> = (0..n)
            .flat_map(|g| (0..n).map(move |f| (g, f)))
            .filter_map(|(g, f)| table[g * n + f].map(|h| (MorId(g), MorId(f), h)))
            .collect();
        FiniteCategory::from_parts(self.objects, morphisms, identities, composites)
    }
}
