//! Presheaves of finite sets, natural transformations between them,
//! subobjects with their characteristic morphisms, and section search.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde_json::{json, Map, Value};

use crate::error::{malformed, Result};
use crate::fincat::{FiniteCategory, MorId, ObjId};
use crate::omega::Omega;
use crate::report::{Report, Violation};

/// A contravariant functor from a finite category to finite sets.
///
/// Elements of `X(A)` are indices `0..X(A).len()` carrying display labels.
/// For `f: B → A` the transition `X(f)` is stored as a table indexed by
/// elements of `X(A)` giving elements of `X(B)`.
#[derive(Clone, Debug)]
pub struct Presheaf {
    base: Arc<FiniteCategory>,
    sets: Vec<Vec<String>>,
    maps: Vec<Vec<usize>>,
}

impl Presheaf {
    /// Checks only that every transition table is total and in range.
    pub fn new(base: Arc<FiniteCategory>, sets: Vec<Vec<String>>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if sets.len() != base.object_count() {
            return Err(malformed(format!(
                "presheaf gives {} sets for {} objects",
                sets.len(),
                base.object_count()
            )));
        }
        if maps.len() != base.morphism_count() {
            return Err(malformed(format!(
                "presheaf gives {} transitions for {} morphisms",
                maps.len(),
                base.morphism_count()
            )));
        }
        for m in base.morphisms() {
            let (src, dst) = (base.cod(m), base.dom(m));
            let table = &maps[m.0];
            if table.len() != sets[src.0].len() {
                return Err(malformed(format!("transition along `{}` is not total", base.label(m))));
            }
            if let Some(&bad) = table.iter().find(|&&y| y >= sets[dst.0].len()) {
                return Err(malformed(format!(
                    "transition along `{}` hits element #{bad} outside {}",
                    base.label(m),
                    base.object_label(dst)
                )));
            }
        }
        Ok(Presheaf { base, sets, maps })
    }

    /// Builds a presheaf from labels. Identity transitions may be omitted.
    pub fn from_labels(
        base: Arc<FiniteCategory>,
        sets: &[(&str, Vec<&str>)],
        transitions: &[(&str, Vec<(&str, &str)>)],
    ) -> Result<Self> {
        let mut elems: Vec<Option<Vec<String>>> = vec![None; base.object_count()];
        for (obj, members) in sets {
            let a = base.object_by_label(obj)?;
            elems[a.0] = Some(members.iter().map(|s| s.to_string()).collect());
        }
        let sets: Vec<Vec<String>> = elems
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| malformed(format!("no set for `{}`", base.object_label(ObjId(i))))))
            .collect::<Result<_>>()?;
        let index = |a: ObjId, l: &str| {
            sets[a.0]
                .iter()
                .position(|e| e == l)
                .ok_or_else(|| malformed(format!("`{l}` is not an element at `{}`", base.object_label(a))))
        };
        let mut maps: Vec<Option<Vec<usize>>> = vec![None; base.morphism_count()];
        for (mor, pairs) in transitions {
            let m = base.morphism_by_label(mor)?;
            let mut table = vec![usize::MAX; sets[base.cod(m).0].len()];
            for (from, to) in pairs {
                table[index(base.cod(m), from)?] = index(base.dom(m), to)?;
            }
            maps[m.0] = Some(table);
        }
        let maps = maps
            .into_iter()
            .enumerate()
            .map(|(i, t)| match t {
                Some(t) => Ok(t),
                None if base.is_identity(MorId(i)) => Ok((0..sets[base.dom(MorId(i)).0].len()).collect()),
                None => Err(malformed(format!("no transition for `{}`", base.label(MorId(i))))),
            })
            .collect::<Result<Vec<_>>>()?;
        Presheaf::new(base, sets, maps)
    }

    /// The terminal presheaf: a singleton at every object.
    pub fn terminal(base: Arc<FiniteCategory>) -> Self {
        let sets = vec![vec!["*".to_owned()]; base.object_count()];
        let maps = vec![vec![0]; base.morphism_count()];
        Presheaf { base, sets, maps }
    }

    pub fn base(&self) -> &FiniteCategory {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn size(&self, a: ObjId) -> usize {
        self.sets[a.0].len()
    }

    pub fn elements(&self, a: ObjId) -> &[String] {
        &self.sets[a.0]
    }

    pub fn element_label(&self, a: ObjId, x: usize) -> &str {
        &self.sets[a.0][x]
    }

    pub fn element_by_label(&self, a: ObjId, label: &str) -> Result<usize> {
        self.sets[a.0]
            .iter()
            .position(|e| e == label)
            .ok_or_else(|| malformed(format!("`{label}` is not an element at `{}`", self.base.object_label(a))))
    }

    /// `X(f)(x)` for `f: B → A`, `x ∈ X(A)`.
    pub fn apply(&self, f: MorId, x: usize) -> usize {
        self.maps[f.0][x]
    }

    pub fn transition(&self, f: MorId) -> &[usize] {
        &self.maps[f.0]
    }

    /// Copy with one transition entry overwritten; the result may violate
    /// the presheaf laws.
    pub fn with_transition(&self, f: MorId, x: usize, y: usize) -> Self {
        let mut out = self.clone();
        out.maps[f.0][x] = y;
        out
    }

    fn same_shape(&self, other: &Presheaf) -> bool {
        (Arc::ptr_eq(&self.base, &other.base)
            || (self.base.object_count() == other.base.object_count()
                && self.base.morphism_count() == other.base.morphism_count()))
            && self.base.morphisms().all(|m| {
                self.base.dom(m) == other.base.dom(m) && self.base.cod(m) == other.base.cod(m)
            })
    }

    /// Identity and contravariant functoriality checks.
    pub fn validate(&self) -> Report {
        let cat = &*self.base;
        let mut report = Report::new();
        for a in cat.objects() {
            let id = cat.identity(a);
            for x in 0..self.size(a) {
                let y = self.apply(id, x);
                if y != x {
                    report.push(
                        Violation::new("identity")
                            .object(cat.object_label(a))
                            .element(self.element_label(a, x))
                            .expected(self.element_label(a, x))
                            .actual(self.element_label(a, y)),
                    );
                }
            }
        }
        // g: C → B, f: B → A; X(f∘g) = X(g)∘X(f)
        for g in cat.morphisms() {
            for &f in cat.out_of(cat.cod(g)) {
                let Some(fg) = cat.entry(g, f) else { continue };
                let (a, c) = (cat.cod(f), cat.dom(g));
                if cat.dom(fg) != c || cat.cod(fg) != a {
                    continue;
                }
                for x in 0..self.size(a) {
                    let direct = self.apply(fg, x);
                    let stepwise = self.apply(g, self.apply(f, x));
                    if direct != stepwise {
                        report.push(
                            Violation::new("functoriality")
                                .morphism(cat.label(g))
                                .morphism(cat.label(f))
                                .element(self.element_label(a, x))
                                .expected(self.element_label(c, stepwise))
                                .actual(self.element_label(c, direct)),
                        );
                    }
                }
            }
        }
        report
    }

    /// Checks the invariants of a (partial or global) section.
    pub fn check_section(&self, s: &Section) -> Report {
        let cat = &*self.base;
        let mut report = Report::new();
        if s.choice.len() != cat.object_count() {
            report.push(Violation::new("shape").expected(cat.object_count().to_string()).actual(s.choice.len().to_string()));
            return report;
        }
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            let Some(xa) = s.choice[a.0] else { continue };
            match s.choice[b.0] {
                None => report.push(
                    Violation::new("down-closure")
                        .morphism(cat.label(f))
                        .expected(format!("{} in domain", cat.object_label(b)))
                        .actual("missing"),
                ),
                Some(xb) if self.apply(f, xa) != xb => report.push(
                    Violation::new("matching")
                        .morphism(cat.label(f))
                        .expected(self.element_label(b, self.apply(f, xa)))
                        .actual(self.element_label(b, xb)),
                ),
                Some(_) => {}
            }
        }
        report
    }

    /// Every global section, sorted by the per-object choice vector.
    pub fn global_sections(&self) -> Vec<Section> {
        SectionSearch::new(self).all()
    }

    /// Global sections agreeing with `partial` on its domain.
    pub fn extensions(&self, partial: &Section) -> Vec<Section> {
        let mut search = SectionSearch::new(self);
        for a in self.base.objects() {
            if let Some(x) = partial.get(a) {
                search.fix(a, x);
            }
        }
        search.all()
    }

    /// All partial elements that cannot be enlarged.
    ///
    /// Objects that admit morphisms to each other in both directions must
    /// enter a down-closed domain together; such a group is added as one
    /// step. For thin skeletal bases every group is a single object.
    pub fn maximal_partial_elements(&self) -> Vec<Section> {
        let groups = object_groups(&self.base);
        let mut out = Vec::new();
        let mut choice = vec![None; self.base.object_count()];
        self.extend_maximal(&groups, 0, &mut choice, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn extend_maximal(
        &self,
        groups: &[Vec<ObjId>],
        next: usize,
        choice: &mut Vec<Option<usize>>,
        out: &mut Vec<Section>,
    ) {
        if next == groups.len() {
            out.push(Section { choice: choice.clone() });
            return;
        }
        let cat = &*self.base;
        let group = &groups[next];
        let below_ready = group.iter().all(|&a| {
            cat.into(a)
                .iter()
                .all(|&f| group.contains(&cat.dom(f)) || choice[cat.dom(f).0].is_some())
        });
        let assignments = if below_ready { self.group_assignments(group, choice) } else { Vec::new() };
        if assignments.is_empty() {
            self.extend_maximal(groups, next + 1, choice, out);
            return;
        }
        for values in assignments {
            for (&a, &x) in group.iter().zip(&values) {
                choice[a.0] = Some(x);
            }
            self.extend_maximal(groups, next + 1, choice, out);
        }
        for &a in group {
            choice[a.0] = None;
        }
    }

    fn group_assignments(&self, group: &[ObjId], choice: &[Option<usize>]) -> Vec<Vec<usize>> {
        let cat = &*self.base;
        let mut out = Vec::new();
        let mut values = vec![0usize; group.len()];
        if group.iter().any(|&a| self.size(a) == 0) {
            return out;
        }
        loop {
            let value_of = |o: ObjId| -> Option<usize> {
                group.iter().position(|&g| g == o).map(|i| values[i]).or(choice[o.0])
            };
            let consistent = group.iter().zip(&values).all(|(&a, &x)| {
                cat.into(a).iter().all(|&f| value_of(cat.dom(f)) == Some(self.apply(f, x)))
            });
            if consistent {
                out.push(values.clone());
            }
            // odometer
            let mut i = 0;
            loop {
                if i == group.len() {
                    return out;
                }
                values[i] += 1;
                if values[i] < self.size(group[i]) {
                    break;
                }
                values[i] = 0;
                i += 1;
            }
        }
    }
}

/// Groups of mutually reachable objects, ordered so that every group comes
/// after all groups with morphisms into it.
fn object_groups(cat: &FiniteCategory) -> Vec<Vec<ObjId>> {
    let n = cat.object_count();
    let mut below = vec![vec![false; n]; n];
    for f in cat.morphisms() {
        below[cat.dom(f).0][cat.cod(f).0] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if below[i][k] {
                for j in 0..n {
                    if below[k][j] {
                        below[i][j] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut groups: Vec<Vec<ObjId>> = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let group: Vec<ObjId> = (0..n).filter(|&j| j == i || (below[i][j] && below[j][i])).map(ObjId).collect();
        for o in &group {
            assigned[o.0] = true;
        }
        groups.push(group);
    }
    // number of strictly-lower objects gives a topological order
    groups.sort_by_key(|g| {
        let a = g[0].0;
        ((0..n).filter(|&j| below[j][a] && !below[a][j]).count(), a)
    });
    groups
}

/// A choice of element at each object of a down-closed domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Section {
    choice: Vec<Option<usize>>,
}

impl Section {
    pub fn new(choice: Vec<Option<usize>>) -> Self {
        Section { choice }
    }

    pub fn global(choice: Vec<usize>) -> Self {
        Section { choice: choice.into_iter().map(Some).collect() }
    }

    pub fn get(&self, a: ObjId) -> Option<usize> {
        self.choice[a.0]
    }

    pub fn choices(&self) -> &[Option<usize>] {
        &self.choice
    }

    pub fn is_global(&self) -> bool {
        self.choice.iter().all(Option::is_some)
    }

    pub fn domain(&self) -> impl Iterator<Item = ObjId> + '_ {
        self.choice.iter().enumerate().filter(|(_, c)| c.is_some()).map(|(i, _)| ObjId(i))
    }

    /// Restriction to the objects selected by `keep`.
    pub fn restrict(&self, keep: impl Fn(ObjId) -> bool) -> Section {
        Section {
            choice: self.choice.iter().enumerate().map(|(i, c)| if keep(ObjId(i)) { *c } else { None }).collect(),
        }
    }

    /// `{"global": bool, "values": {object: element}}`.
    pub fn to_json(&self, x: &Presheaf) -> Value {
        let mut values = Map::new();
        for a in self.domain() {
            let label = x.element_label(a, self.choice[a.0].unwrap());
            values.insert(x.base().object_label(a).to_owned(), Value::String(label.to_owned()));
        }
        json!({ "global": self.is_global(), "values": values })
    }

    pub fn labels(&self, x: &Presheaf) -> Vec<(String, String)> {
        self.domain()
            .map(|a| (x.base().object_label(a).to_owned(), x.element_label(a, self.choice[a.0].unwrap()).to_owned()))
            .collect()
    }
}

/// Statistics from an exhaustive search, used as an exhaustion certificate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub dead_ends: u64,
}

/// Backtracking search for global sections with forward propagation along
/// transitions.
pub struct SectionSearch<'a> {
    x: &'a Presheaf,
    order: Vec<ObjId>,
    initial: Vec<FixedBitSet>,
    stats: SearchStats,
}

impl<'a> SectionSearch<'a> {
    pub fn new(x: &'a Presheaf) -> Self {
        let cat = x.base();
        let mut order: Vec<ObjId> = cat.objects().collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(cat.into(a).len()), a));
        let initial = cat
            .objects()
            .map(|a| {
                let mut d = FixedBitSet::with_capacity(x.size(a));
                d.insert_range(..);
                d
            })
            .collect();
        SectionSearch { x, order, initial, stats: SearchStats::default() }
    }

    pub fn fix(&mut self, a: ObjId, value: usize) {
        let d = &mut self.initial[a.0];
        let keep = d.contains(value);
        d.clear();
        if keep {
            d.insert(value);
        }
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn all(&mut self) -> Vec<Section> {
        let mut out = Vec::new();
        self.run(None, &mut out);
        out.sort();
        out
    }

    pub fn first(&mut self) -> Option<Section> {
        let mut out = Vec::new();
        self.run(Some(1), &mut out);
        out.pop()
    }

    fn run(&mut self, limit: Option<usize>, out: &mut Vec<Section>) {
        let domains = self.initial.clone();
        self.branch(domains, limit, out);
    }

    /// Narrows domains until every transition constraint is arc-consistent.
    /// Returns false when some domain becomes empty.
    fn propagate(&self, domains: &mut [FixedBitSet]) -> bool {
        let x = self.x;
        let cat = x.base();
        loop {
            let mut changed = false;
            for f in cat.morphisms() {
                let (b, a) = (cat.dom(f), cat.cod(f));
                if a == b {
                    let fixed: Vec<usize> = domains[a.0].ones().filter(|&v| x.apply(f, v) != v).collect();
                    for v in fixed {
                        domains[a.0].set(v, false);
                        changed = true;
                    }
                } else {
                    let mut image = FixedBitSet::with_capacity(x.size(b));
                    for v in domains[a.0].ones() {
                        image.insert(x.apply(f, v));
                    }
                    let mut narrowed = domains[b.0].clone();
                    narrowed.intersect_with(&image);
                    if narrowed != domains[b.0] {
                        domains[b.0] = narrowed;
                        changed = true;
                    }
                    let drop: Vec<usize> =
                        domains[a.0].ones().filter(|&v| !domains[b.0].contains(x.apply(f, v))).collect();
                    for v in drop {
                        domains[a.0].set(v, false);
                        changed = true;
                    }
                }
                if domains[a.0].is_clear() || domains[b.0].is_clear() {
                    return false;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn branch(&mut self, mut domains: Vec<FixedBitSet>, limit: Option<usize>, out: &mut Vec<Section>) {
        self.stats.nodes += 1;
        if domains.iter().any(|d| d.is_clear()) || !self.propagate(&mut domains) {
            self.stats.dead_ends += 1;
            return;
        }
        let open = self.order.iter().copied().find(|a| domains[a.0].count_ones(..) > 1);
        match open {
            None => out.push(Section::global(domains.iter().map(|d| d.ones().next().unwrap()).collect())),
            Some(a) => {
                let values: Vec<usize> = domains[a.0].ones().collect();
                for v in values {
                    if limit.is_some_and(|l| out.len() >= l) {
                        return;
                    }
                    let mut next = domains.clone();
                    next[a.0].clear();
                    next[a.0].insert(v);
                    self.branch(next, limit, out);
                }
            }
        }
    }
}

/// A family of functions `N_A: X(A) → Y(A)`.
#[derive(Clone, Debug)]
pub struct NaturalTransformation {
    source: Presheaf,
    target: Presheaf,
    components: Vec<Vec<usize>>,
}

impl NaturalTransformation {
    /// Checks that source and target share a base and that every component
    /// is total; naturality is checked separately by
    /// [`NaturalTransformation::check_natural`].
    pub fn new(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> Result<Self> {
        if !source.same_shape(&target) {
            return Err(malformed("source and target are presheaves over different bases"));
        }
        if components.len() != source.base.object_count() {
            return Err(malformed("one component per object is required"));
        }
        for a in source.base.objects() {
            let c = &components[a.0];
            if c.len() != source.size(a) || c.iter().any(|&y| y >= target.size(a)) {
                return Err(malformed(format!(
                    "component at `{}` is not a total function",
                    source.base.object_label(a)
                )));
            }
        }
        Ok(NaturalTransformation { source, target, components })
    }

    pub fn identity(x: &Presheaf) -> Self {
        let components = x.base.objects().map(|a| (0..x.size(a)).collect()).collect();
        NaturalTransformation { source: x.clone(), target: x.clone(), components }
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn component(&self, a: ObjId) -> &[usize] {
        &self.components[a.0]
    }

    pub fn apply(&self, a: ObjId, x: usize) -> usize {
        self.components[a.0][x]
    }

    /// Every naturality square `Y(f)∘N_A = N_B∘X(f)` that fails, in
    /// morphism-then-element order.
    pub fn check_natural(&self) -> Report {
        let cat = self.source.base();
        let (x, y) = (&self.source, &self.target);
        let mut report = Report::new();
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            for d in 0..x.size(a) {
                let across_then_down = y.apply(f, self.apply(a, d));
                let down_then_across = self.apply(b, x.apply(f, d));
                if across_then_down != down_then_across {
                    report.push(
                        Violation::new("naturality")
                            .object(cat.object_label(a))
                            .morphism(cat.label(f))
                            .element(x.element_label(a, d))
                            .expected(y.element_label(b, down_then_across))
                            .actual(y.element_label(b, across_then_down)),
                    );
                }
            }
        }
        report
    }
}

impl PartialEq for NaturalTransformation {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

/// A sub-presheaf: a subset `K(A) ⊆ X(A)` at every object, closed under the
/// transitions of `X`.
#[derive(Clone, Debug)]
pub struct Subobject {
    of: Presheaf,
    members: Vec<Vec<bool>>,
}

impl Subobject {
    pub fn new(of: Presheaf, members: Vec<Vec<bool>>) -> Result<Self> {
        let k = Subobject::new_unchecked(of, members)?;
        let report = k.check_closure();
        if !report.is_empty() {
            return Err(malformed(format!("not a subobject: {}", report.violations[0])));
        }
        Ok(k)
    }

    pub fn new_unchecked(of: Presheaf, members: Vec<Vec<bool>>) -> Result<Self> {
        if members.len() != of.base.object_count()
            || of.base.objects().any(|a| members[a.0].len() != of.size(a))
        {
            return Err(malformed("subobject shape does not match its presheaf"));
        }
        Ok(Subobject { of, members })
    }

    pub fn from_labels(of: Presheaf, members: &[(&str, Vec<&str>)]) -> Result<Self> {
        let mut m: Vec<Vec<bool>> = of.base.objects().map(|a| vec![false; of.size(a)]).collect();
        for (obj, elems) in members {
            let a = of.base.object_by_label(obj)?;
            for e in elems {
                m[a.0][of.element_by_label(a, e)?] = true;
            }
        }
        Subobject::new(of, m)
    }

    pub fn whole(of: &Presheaf) -> Self {
        let members = of.base.objects().map(|a| vec![true; of.size(a)]).collect();
        Subobject { of: of.clone(), members }
    }

    pub fn empty(of: &Presheaf) -> Self {
        let members = of.base.objects().map(|a| vec![false; of.size(a)]).collect();
        Subobject { of: of.clone(), members }
    }

    pub fn presheaf(&self) -> &Presheaf {
        &self.of
    }

    pub fn contains(&self, a: ObjId, x: usize) -> bool {
        self.members[a.0][x]
    }

    pub fn check_closure(&self) -> Report {
        let x = &self.of;
        let cat = x.base();
        let mut report = Report::new();
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            for d in (0..x.size(a)).filter(|&d| self.members[a.0][d]) {
                let image = x.apply(f, d);
                if !self.members[b.0][image] {
                    report.push(
                        Violation::new("restriction")
                            .morphism(cat.label(f))
                            .element(x.element_label(a, d))
                            .expected(format!("{} in K({})", x.element_label(b, image), cat.object_label(b)))
                            .actual("outside"),
                    );
                }
            }
        }
        report
    }

    /// `χ_A(x) = { f: B → A | X(f)(x) ∈ K(B) }`.
    pub fn characteristic_morphism(&self, omega: &Omega) -> Result<NaturalTransformation> {
        let report = self.check_closure();
        if !report.is_empty() {
            return Err(malformed(format!("not a subobject: {}", report.violations[0])));
        }
        let x = &self.of;
        let cat = x.base();
        let components = cat
            .objects()
            .map(|a| {
                (0..x.size(a))
                    .map(|d| {
                        let mut members = cat.empty_set();
                        for &f in cat.into(a) {
                            if self.members[cat.dom(f).0][x.apply(f, d)] {
                                members.insert(f);
                            }
                        }
                        omega.at(a).index_of_members(&members)
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        NaturalTransformation::new(x.clone(), omega.presheaf().clone(), components)
    }

    /// `K(A) = { x | χ_A(x) = ↓A }` for a natural `χ: X → Ω`.
    pub fn from_characteristic(chi: &NaturalTransformation, omega: &Omega) -> Result<Self> {
        let x = chi.source();
        let cat = x.base();
        if cat.objects().any(|a| chi.target().size(a) != omega.at(a).len()) {
            return Err(malformed("characteristic map does not land in the subobject classifier"));
        }
        let report = chi.check_natural();
        if !report.is_empty() {
            return Err(malformed(format!("characteristic map is not natural: {}", report.violations[0])));
        }
        let members = cat
            .objects()
            .map(|a| {
                let top = omega.at(a).top_index();
                (0..x.size(a)).map(|d| chi.apply(a, d) == top).collect()
            })
            .collect();
        Subobject::new(x.clone(), members)
    }
}

impl PartialEq for Subobject {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}
