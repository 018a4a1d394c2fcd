//! Sieve-valued valuations on an arbitrary presheaf of propositions.
//!
//! A [`PropositionPresheaf`] `G` is a presheaf whose sets are bounded posets;
//! its transitions `G(f)` weaken a proposition at `A` to one at the domain of
//! `f`. A [`GeneralisedValuation`] assigns a sieve on `A` to every
//! proposition in `G(A)`. The checks in this module cover:
//!
//! * functional composition, `ν(B, G(f)(d)) = f*(ν(A, d))`;
//! * the equivalence of functional composition with naturality of the
//!   induced map `G → Ω`;
//! * coarse-graining conditions relating `G` to a covariant
//!   [`ComparisonFunctor`];
//! * local valuation conditions (null, monotonicity, exclusivity);
//! * the partial-truth conditions (a)–(c) tying a valuation to its set of
//!   totally true propositions.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{malformed, Result};
use crate::fincat::{FiniteCategory, MorId, ObjId, Sieve};
use crate::omega::Omega;
use crate::presheaf::{NaturalTransformation, Presheaf};
use crate::report::{Report, Violation};

/// A presheaf whose every `G(A)` carries a partial order with 0 and 1.
#[derive(Clone, Debug)]
pub struct PropositionPresheaf {
    presheaf: Presheaf,
    /// `leq[A][d][e]` iff `d ≤ e` in `G(A)`.
    leq: Vec<Vec<Vec<bool>>>,
    bottom: Vec<usize>,
    top: Vec<usize>,
}

impl PropositionPresheaf {
    /// Validates the presheaf laws and that every order is a bounded
    /// partial order.
    pub fn new(presheaf: Presheaf, leq: Vec<Vec<Vec<bool>>>) -> Result<Self> {
        let report = presheaf.validate();
        if !report.is_empty() {
            return Err(malformed(format!("not a presheaf: {}", report.violations[0])));
        }
        let cat = presheaf.base();
        if leq.len() != cat.object_count() {
            return Err(malformed("one order per object is required"));
        }
        let mut bottom = Vec::new();
        let mut top = Vec::new();
        for a in cat.objects() {
            let n = presheaf.size(a);
            let le = &leq[a.0];
            let name = cat.object_label(a);
            if n == 0 {
                return Err(malformed(format!("G({name}) is empty and has no 0 or 1")));
            }
            if le.len() != n || le.iter().any(|row| row.len() != n) {
                return Err(malformed(format!("order on G({name}) has the wrong shape")));
            }
            for d in 0..n {
                if !le[d][d] {
                    return Err(malformed(format!("order on G({name}) is not reflexive")));
                }
                for e in 0..n {
                    if d != e && le[d][e] && le[e][d] {
                        return Err(malformed(format!("order on G({name}) is not antisymmetric")));
                    }
                    for h in 0..n {
                        if le[d][e] && le[e][h] && !le[d][h] {
                            return Err(malformed(format!("order on G({name}) is not transitive")));
                        }
                    }
                }
            }
            let b = (0..n).find(|&d| (0..n).all(|e| le[d][e]));
            let t = (0..n).find(|&d| (0..n).all(|e| le[e][d]));
            match (b, t) {
                (Some(b), Some(t)) => {
                    bottom.push(b);
                    top.push(t);
                }
                _ => return Err(malformed(format!("G({name}) lacks a least or greatest element"))),
            }
        }
        Ok(PropositionPresheaf { presheaf, leq, bottom, top })
    }

    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }

    pub fn base(&self) -> &FiniteCategory {
        self.presheaf.base()
    }

    pub fn size(&self, a: ObjId) -> usize {
        self.presheaf.size(a)
    }

    pub fn leq(&self, a: ObjId, d: usize, e: usize) -> bool {
        self.leq[a.0][d][e]
    }

    pub fn bottom(&self, a: ObjId) -> usize {
        self.bottom[a.0]
    }

    pub fn top(&self, a: ObjId) -> usize {
        self.top[a.0]
    }

    /// Greatest lower bound in the stored order, if it exists.
    pub fn meet(&self, a: ObjId, d: usize, e: usize) -> Option<usize> {
        let n = self.size(a);
        let le = &self.leq[a.0];
        let lower: Vec<usize> = (0..n).filter(|&h| le[h][d] && le[h][e]).collect();
        lower.iter().copied().find(|&m| lower.iter().all(|&h| le[h][m]))
    }

    /// `G(f)(d)` for `f: B → A`.
    pub fn weaken(&self, f: MorId, d: usize) -> usize {
        self.presheaf.apply(f, d)
    }

    pub fn label(&self, a: ObjId, d: usize) -> &str {
        self.presheaf.element_label(a, d)
    }
}

/// A covariant functor with the same object sets as a proposition presheaf:
/// for `f: B → A`, `C(f)` maps `G(B)` into `G(A)`.
#[derive(Clone, Debug)]
pub struct ComparisonFunctor {
    maps: Vec<Vec<usize>>,
}

impl ComparisonFunctor {
    pub fn new(g: &PropositionPresheaf, maps: Vec<Vec<usize>>) -> Result<Self> {
        let cat = g.base();
        if maps.len() != cat.morphism_count() {
            return Err(malformed("one comparison map per morphism is required"));
        }
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            let m = &maps[f.0];
            if m.len() != g.size(b) || m.iter().any(|&x| x >= g.size(a)) {
                return Err(malformed(format!("comparison map along `{}` is not total", cat.label(f))));
            }
        }
        Ok(ComparisonFunctor { maps })
    }

    pub fn from_fn(g: &PropositionPresheaf, map: impl Fn(MorId, usize) -> usize) -> Result<Self> {
        let cat = g.base();
        let maps = cat.morphisms().map(|f| (0..g.size(cat.dom(f))).map(|x| map(f, x)).collect()).collect();
        ComparisonFunctor::new(g, maps)
    }

    /// `C(f)(x)` for `f: B → A`, `x ∈ G(B)`.
    pub fn apply(&self, f: MorId, x: usize) -> usize {
        self.maps[f.0][x]
    }

    pub fn with_map(&self, f: MorId, map: Vec<usize>) -> Self {
        let mut out = self.clone();
        out.maps[f.0] = map;
        out
    }

    /// `C(id) = id` and `C(f∘g) = C(f)∘C(g)`.
    pub fn check_functor(&self, g: &PropositionPresheaf) -> Report {
        let cat = g.base();
        let mut report = Report::new();
        for a in cat.objects() {
            let id = cat.identity(a);
            for x in 0..g.size(a) {
                if self.apply(id, x) != x {
                    report.push(
                        Violation::new("comparison identity")
                            .object(cat.object_label(a))
                            .element(g.label(a, x))
                            .expected(g.label(a, x))
                            .actual(g.label(a, self.apply(id, x))),
                    );
                }
            }
        }
        for h in cat.morphisms() {
            for &f in cat.out_of(cat.cod(h)) {
                let Some(fh) = cat.entry(h, f) else { continue };
                let (c, a) = (cat.dom(h), cat.cod(f));
                for x in 0..g.size(c) {
                    let direct = self.apply(fh, x);
                    let stepwise = self.apply(f, self.apply(h, x));
                    if direct != stepwise {
                        report.push(
                            Violation::new("comparison functoriality")
                                .morphism(cat.label(h))
                                .morphism(cat.label(f))
                                .element(g.label(c, x))
                                .expected(g.label(a, stepwise))
                                .actual(g.label(a, direct)),
                        );
                    }
                }
            }
        }
        report
    }
}

/// Result of [`check_coarse_graining`]. Coarse-graining and monotonicity
/// are required; retraction is optional and reported on its own.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CoarseGrainingReport {
    pub required: Report,
    pub retraction: Report,
    /// Per non-identity morphism: whether `C(f)` is injective.
    pub injective: Vec<(String, bool)>,
}

impl CoarseGrainingReport {
    pub fn holds(&self) -> bool {
        self.required.is_empty()
    }

    pub fn retraction_holds(&self) -> bool {
        self.retraction.is_empty()
    }
}

/// Checks `d ≤ C(f)[G(f)(d)]`, monotonicity of each `G(f)`, and the
/// retraction `G(f)[C(f)(x)] = x`.
pub fn check_coarse_graining(g: &PropositionPresheaf, c: &ComparisonFunctor) -> CoarseGrainingReport {
    let cat = g.base();
    let mut out = CoarseGrainingReport::default();
    for f in cat.morphisms() {
        let (b, a) = (cat.dom(f), cat.cod(f));
        for d in 0..g.size(a) {
            let round = c.apply(f, g.weaken(f, d));
            if !g.leq(a, d, round) {
                out.required.push(
                    Violation::new("coarse-graining")
                        .morphism(cat.label(f))
                        .element(g.label(a, d))
                        .expected(format!("{} <= C(f)(G(f)(d))", g.label(a, d)))
                        .actual(g.label(a, round)),
                );
            }
            for e in 0..g.size(a) {
                if g.leq(a, d, e) && !g.leq(b, g.weaken(f, d), g.weaken(f, e)) {
                    out.required.push(
                        Violation::new("monotonicity")
                            .morphism(cat.label(f))
                            .element(g.label(a, d))
                            .element(g.label(a, e))
                            .expected(format!("{} <= {}", g.label(b, g.weaken(f, d)), g.label(b, g.weaken(f, e))))
                            .actual("incomparable or reversed"),
                    );
                }
            }
        }
        for x in 0..g.size(b) {
            let back = g.weaken(f, c.apply(f, x));
            if back != x {
                out.retraction.push(
                    Violation::new("retraction")
                        .morphism(cat.label(f))
                        .element(g.label(b, x))
                        .expected(g.label(b, x))
                        .actual(g.label(b, back)),
                );
            }
        }
        if !cat.is_identity(f) {
            let mut seen = vec![false; g.size(a)];
            let injective = (0..g.size(b)).all(|x| !std::mem::replace(&mut seen[c.apply(f, x)], true));
            out.injective.push((cat.label(f).to_owned(), injective));
        }
    }
    out
}

/// Null, monotonicity and exclusivity for a map `φ: G(A) → Ω(A)`.
///
/// Exclusivity needs `d ∧ e`; pairs whose meet does not exist in the stored
/// order are skipped and counted in the report notes.
pub fn check_local_valuation(g: &PropositionPresheaf, a: ObjId, phi: &[Sieve]) -> Result<Report> {
    let cat = g.base();
    let n = g.size(a);
    if phi.len() != n {
        return Err(malformed(format!(
            "local valuation at `{}` has {} values for {} propositions",
            cat.object_label(a),
            phi.len(),
            n
        )));
    }
    if let Some(s) = phi.iter().find(|s| s.at() != a) {
        return Err(malformed(format!(
            "local valuation at `{}` returns a sieve on `{}`",
            cat.object_label(a),
            cat.object_label(s.at())
        )));
    }
    let top = cat.top(a);
    let name = cat.object_label(a);
    let mut report = Report::new();
    let zero = g.bottom(a);
    if !phi[zero].is_empty() {
        report.push(
            Violation::new("null")
                .object(name)
                .element(g.label(a, zero))
                .expected("{}")
                .actual(phi[zero].display(cat).to_string()),
        );
    }
    for d in 0..n {
        for e in 0..n {
            if g.leq(a, d, e) && !phi[d].is_subset(&phi[e]) {
                report.push(
                    Violation::new("monotonicity")
                        .object(name)
                        .element(g.label(a, d))
                        .element(g.label(a, e))
                        .expected(format!("{} within {}", phi[d].display(cat), phi[e].display(cat)))
                        .actual("not contained"),
                );
            }
        }
    }
    let mut skipped = 0usize;
    for d in 0..n {
        if phi[d] != top {
            continue;
        }
        for e in 0..n {
            match g.meet(a, d, e) {
                None => skipped += 1,
                Some(m) if m == zero && phi[e] == top => report.push(
                    Violation::new("exclusivity")
                        .object(name)
                        .element(g.label(a, d))
                        .element(g.label(a, e))
                        .expected("second proposition below total truth")
                        .actual(phi[e].display(cat).to_string()),
                ),
                Some(_) => {}
            }
        }
    }
    if skipped > 0 {
        report.note(format!("exclusivity at {name}: {skipped} pair(s) without a meet skipped"));
    }
    Ok(report)
}

/// An assignment of a set of morphisms into `A` to every `(A, d ∈ G(A))`.
///
/// Values are meant to be sieves; [`GeneralisedValuation::check_sieves`]
/// reports any that are not, so that deliberately broken valuations can be
/// represented and diagnosed.
#[derive(Clone, Debug)]
pub struct GeneralisedValuation {
    over: Arc<PropositionPresheaf>,
    assign: Vec<Vec<Sieve>>,
}

impl GeneralisedValuation {
    pub fn new(over: Arc<PropositionPresheaf>, assign: Vec<Vec<Sieve>>) -> Result<Self> {
        let cat = over.base();
        if assign.len() != cat.object_count() {
            return Err(malformed("valuation needs one table per object"));
        }
        for a in cat.objects() {
            if assign[a.0].len() != over.size(a) {
                return Err(malformed(format!("valuation table at `{}` is not total", cat.object_label(a))));
            }
            if assign[a.0].iter().any(|s| s.at() != a || s.iter().any(|m| cat.cod(m) != a)) {
                return Err(malformed(format!("valuation at `{}` contains a foreign morphism", cat.object_label(a))));
            }
        }
        Ok(GeneralisedValuation { over, assign })
    }

    pub fn from_fn(over: Arc<PropositionPresheaf>, value: impl Fn(ObjId, usize) -> Sieve) -> Result<Self> {
        let assign = over.base().objects().map(|a| (0..over.size(a)).map(|d| value(a, d)).collect()).collect();
        GeneralisedValuation::new(over, assign)
    }

    pub fn over(&self) -> &PropositionPresheaf {
        &self.over
    }

    pub fn over_arc(&self) -> &Arc<PropositionPresheaf> {
        &self.over
    }

    pub fn base(&self) -> &FiniteCategory {
        self.over.base()
    }

    pub fn value(&self, a: ObjId, d: usize) -> &Sieve {
        &self.assign[a.0][d]
    }

    /// The local valuation `φ_A`.
    pub fn local(&self, a: ObjId) -> &[Sieve] {
        &self.assign[a.0]
    }

    pub fn with_value(&self, a: ObjId, d: usize, s: Sieve) -> Self {
        let mut out = self.clone();
        out.assign[a.0][d] = s;
        out
    }

    pub fn is_totally_true(&self, a: ObjId, d: usize) -> bool {
        let id = self.base().identity(a);
        // a sieve containing the identity is principal; compare in full to
        // stay honest on non-sieve inputs
        self.assign[a.0][d].contains(id) && self.assign[a.0][d] == self.base().top(a)
    }

    pub fn check_sieves(&self) -> Report {
        let cat = self.base();
        let mut report = Report::new();
        for a in cat.objects() {
            for (d, s) in self.assign[a.0].iter().enumerate() {
                if !cat.is_sieve(a, s.members()).unwrap_or(false) {
                    report.push(
                        Violation::new("sieve")
                            .object(cat.object_label(a))
                            .element(self.over.label(a, d))
                            .expected("closed under precomposition")
                            .actual(s.display(cat).to_string()),
                    );
                }
            }
        }
        report
    }

    /// Functional composition: `ν(B, G(f)(d)) = f*(ν(A, d))` for every
    /// `f: B → A` and `d ∈ G(A)`.
    pub fn check_func(&self) -> Report {
        let cat = self.base();
        let g = &*self.over;
        let mut report = Report::new();
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            for d in 0..g.size(a) {
                let pulled = cat.pullback(&self.assign[a.0][d], f);
                let weakened = &self.assign[b.0][g.weaken(f, d)];
                if &pulled != weakened {
                    report.push(
                        Violation::new("FUNC")
                            .object(cat.object_label(a))
                            .morphism(cat.label(f))
                            .element(g.label(a, d))
                            .expected(pulled.display(cat).to_string())
                            .actual(weakened.display(cat).to_string()),
                    );
                }
            }
        }
        report
    }

    /// The map `N_A(d) = ν(A, d)` as a natural transformation `G → Ω`, or
    /// the first square that fails to commute.
    pub fn natural_transformation(&self, omega: &Omega) -> std::result::Result<NaturalTransformation, FuncWitness> {
        let cat = self.base();
        let g = &*self.over;
        let mut components = Vec::with_capacity(cat.object_count());
        for a in cat.objects() {
            let mut comp = Vec::with_capacity(g.size(a));
            for d in 0..g.size(a) {
                match omega.at(a).index_of_members(self.assign[a.0][d].members()) {
                    Ok(i) => comp.push(i),
                    Err(_) => {
                        return Err(FuncWitness {
                            kind: WitnessKind::NotASieve,
                            object: cat.object_label(a).to_owned(),
                            morphism: None,
                            element: g.label(a, d).to_owned(),
                        })
                    }
                }
            }
            components.push(comp);
        }
        let n = NaturalTransformation::new(g.presheaf().clone(), omega.presheaf().clone(), components)
            .expect("components are total by construction");
        match n.check_natural().violations.into_iter().next() {
            None => Ok(n),
            Some(v) => Err(FuncWitness {
                kind: WitnessKind::SquareFails,
                object: v.objects.into_iter().next().unwrap_or_default(),
                morphism: v.morphisms.into_iter().next(),
                element: v.elements.into_iter().next().unwrap_or_default(),
            }),
        }
    }

    /// Conditions (a)–(c) relating `ν` to its totally true propositions,
    /// plus sieve-hood of every value.
    ///
    /// * (a) `ν(A,d) = ↓A` forces `ν(B, G(f)(d)) = ↓B` for every `f`; also,
    ///   any `f ∈ ν(A,d)` forces `ν(B, G(f)(d)) = ↓B` (so an identity
    ///   inside a value forces that value to be principal).
    /// * (b) if every totally true weakening of `d` is matched by a totally
    ///   true weakening of `e` along the same morphism, `ν(A,d) ⊆ ν(A,e)`.
    /// * (c) `ν` is recovered from its totally true set by
    ///   [`valuation_from_truth_set`].
    pub fn check_partial_truth_axioms(&self) -> Report {
        let cat = self.base();
        let g = &*self.over;
        let mut report = self.check_sieves();
        let total: Vec<Vec<bool>> =
            cat.objects().map(|a| (0..g.size(a)).map(|d| self.is_totally_true(a, d)).collect()).collect();
        for a in cat.objects() {
            for d in 0..g.size(a) {
                for &f in cat.into(a) {
                    let b = cat.dom(f);
                    let w = g.weaken(f, d);
                    if total[a.0][d] && !total[b.0][w] {
                        report.push(
                            Violation::new("(a)")
                                .object(cat.object_label(a))
                                .morphism(cat.label(f))
                                .element(g.label(a, d))
                                .expected(format!("{} totally true", g.label(b, w)))
                                .actual(self.assign[b.0][w].display(cat).to_string()),
                        );
                    } else if self.assign[a.0][d].contains(f) && !total[b.0][w] {
                        report.push(
                            Violation::new("(a)")
                                .object(cat.object_label(a))
                                .morphism(cat.label(f))
                                .element(g.label(a, d))
                                .expected(format!("member forces {} totally true", g.label(b, w)))
                                .actual(self.assign[b.0][w].display(cat).to_string()),
                        );
                    }
                }
            }
        }
        for a in cat.objects() {
            let witness = |d: usize| -> Vec<bool> {
                cat.into(a).iter().map(|&f| total[cat.dom(f).0][g.weaken(f, d)]).collect()
            };
            let sets: Vec<Vec<bool>> = (0..g.size(a)).map(witness).collect();
            for d in 0..g.size(a) {
                for e in 0..g.size(a) {
                    let contained = sets[d].iter().zip(&sets[e]).all(|(&x, &y)| !x || y);
                    if contained && !self.assign[a.0][d].is_subset(&self.assign[a.0][e]) {
                        report.push(
                            Violation::new("(b)")
                                .object(cat.object_label(a))
                                .element(g.label(a, d))
                                .element(g.label(a, e))
                                .expected(format!(
                                    "{} within {}",
                                    self.assign[a.0][d].display(cat),
                                    self.assign[a.0][e].display(cat)
                                ))
                                .actual("not contained"),
                        );
                    }
                }
            }
        }
        let rebuilt = valuation_from_truth_set(self.over.clone(), |b, e| total[b.0][e]);
        for a in cat.objects() {
            for d in 0..g.size(a) {
                let r = rebuilt.valuation.value(a, d);
                if r != self.value(a, d) {
                    report.push(
                        Violation::new("(c)")
                            .object(cat.object_label(a))
                            .element(g.label(a, d))
                            .expected(r.display(cat).to_string())
                            .actual(self.value(a, d).display(cat).to_string()),
                    );
                }
            }
        }
        report
    }

    /// FUNC against `G`, plus null, monotonicity and exclusivity at every
    /// object. Empty means `ν` is a generalised valuation.
    pub fn verify(&self) -> Report {
        let mut report = self.check_sieves();
        report.extend(self.check_func());
        for a in self.base().objects() {
            report.extend(check_local_valuation(&self.over, a, self.local(a)).expect("shape checked at construction"));
        }
        report
    }

    /// Sorted member labels per `(object, proposition)`.
    pub fn table(&self) -> Vec<(String, String, Vec<String>)> {
        let cat = self.base();
        cat.objects()
            .flat_map(|a| {
                (0..self.over.size(a)).map(move |d| {
                    (cat.object_label(a).to_owned(), self.over.label(a, d).to_owned(), self.assign[a.0][d].labels(cat))
                })
            })
            .collect()
    }
}

impl PartialEq for GeneralisedValuation {
    fn eq(&self, other: &Self) -> bool {
        self.assign == other.assign
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessKind {
    NotASieve,
    SquareFails,
}

/// Why a valuation does not define a natural transformation into `Ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuncWitness {
    pub kind: WitnessKind,
    pub object: String,
    pub morphism: Option<String>,
    pub element: String,
}

/// Output of [`valuation_from_truth_set`].
#[derive(Clone, Debug)]
pub struct TruthSetValuation {
    pub valuation: GeneralisedValuation,
    /// Weakening-closure failures of the predicate and non-sieve values.
    pub report: Report,
}

/// `ν(A, d) = { f: B → A | totally_true(B, G(f)(d)) }`.
///
/// The values are sieves whenever the predicate is closed under weakening;
/// closure failures are reported rather than repaired.
pub fn valuation_from_truth_set(
    g: Arc<PropositionPresheaf>,
    totally_true: impl Fn(ObjId, usize) -> bool,
) -> TruthSetValuation {
    let cat = g.base();
    let truth: Vec<Vec<bool>> = cat.objects().map(|a| (0..g.size(a)).map(|d| totally_true(a, d)).collect()).collect();
    let mut report = Report::new();
    for f in cat.morphisms() {
        let (b, a) = (cat.dom(f), cat.cod(f));
        for d in 0..g.size(a) {
            if truth[a.0][d] && !truth[b.0][g.weaken(f, d)] {
                report.push(
                    Violation::new("weakening-closure")
                        .object(cat.object_label(a))
                        .morphism(cat.label(f))
                        .element(g.label(a, d))
                        .expected(format!("{} totally true", g.label(b, g.weaken(f, d))))
                        .actual("not totally true"),
                );
            }
        }
    }
    let assign = cat
        .objects()
        .map(|a| {
            (0..g.size(a))
                .map(|d| {
                    let mut members = cat.empty_set();
                    for &f in cat.into(a) {
                        if truth[cat.dom(f).0][g.weaken(f, d)] {
                            members.insert(f);
                        }
                    }
                    Sieve::new_unchecked(a, members)
                })
                .collect()
        })
        .collect();
    let valuation = GeneralisedValuation { over: g, assign };
    report.extend(valuation.check_sieves());
    TruthSetValuation { valuation, report }
}

/// Convenience wrapper building `Ω` for the valuation's base.
pub fn nat_trans_of_valuation(nu: &GeneralisedValuation) -> std::result::Result<NaturalTransformation, FuncWitness> {
    let omega = Omega::new(nu.over.presheaf().base_arc().clone());
    nu.natural_transformation(&omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::CategoryBuilder;

    /// Two-element chain 0 < 1 on a single object.
    fn one_object_booleans() -> Arc<PropositionPresheaf> {
        let cat = Arc::new(FiniteCategory::discrete(&["O"]));
        let x = Presheaf::from_labels(cat, &[("O", vec!["0", "1"])], &[]).unwrap();
        Arc::new(PropositionPresheaf::new(x, vec![vec![vec![true, true], vec![false, true]]]).unwrap())
    }

    #[test]
    fn order_must_be_bounded() {
        let cat = Arc::new(FiniteCategory::discrete(&["O"]));
        let x = Presheaf::from_labels(cat, &[("O", vec!["a", "b"])], &[]).unwrap();
        let antichain = vec![vec![vec![true, false], vec![false, true]]];
        assert!(PropositionPresheaf::new(x, antichain).is_err());
    }

    #[test]
    fn identity_presheaf_is_coarse_graining() {
        let g = one_object_booleans();
        let c = ComparisonFunctor::from_fn(&g, |_, x| x).unwrap();
        let r = check_coarse_graining(&g, &c);
        assert!(r.holds());
        assert!(r.retraction_holds());
        assert!(c.check_functor(&g).is_empty());
    }

    #[test]
    fn local_valuation_examples() {
        let g = one_object_booleans();
        let cat = g.base();
        let o = ObjId(0);
        let top = cat.top(o);
        let bot = Sieve::empty(cat, o);

        let constant_top = vec![top.clone(), top.clone()];
        let r = check_local_valuation(&g, o, &constant_top).unwrap();
        assert!(r.has_condition("null"));
        assert!(r.has_condition("exclusivity"));

        let constant_bottom = vec![bot.clone(), bot.clone()];
        assert!(check_local_valuation(&g, o, &constant_bottom).unwrap().is_empty());

        assert!(check_local_valuation(&g, o, &[bot]).is_err());
    }

    #[test]
    fn missing_meets_are_skipped_and_counted() {
        // 0 < a, b, c < 1 with a, b having two maximal lower bounds is not
        // possible with a 0; use 0 < a,b < x,y < 1 so a∧b = 0 but x∧y has
        // no meet.
        let cat = Arc::new(FiniteCategory::discrete(&["O"]));
        let names = vec!["0", "a", "b", "x", "y", "1"];
        let x = Presheaf::from_labels(cat.clone(), &[("O", names.clone())], &[]).unwrap();
        let below = |d: usize, e: usize| -> bool {
            d == e
                || d == 0
                || e == 5
                || (matches!(d, 1 | 2) && matches!(e, 3 | 4))
        };
        let leq = vec![(0..6).map(|d| (0..6).map(|e| below(d, e)).collect()).collect()];
        let g = PropositionPresheaf::new(x, leq).unwrap();
        assert_eq!(g.meet(ObjId(0), 3, 4), None);
        assert_eq!(g.meet(ObjId(0), 1, 2), Some(0));
        let o = ObjId(0);
        let top = cat.top(o);
        let bot = Sieve::empty(&cat, o);
        let phi: Vec<Sieve> = (0..6).map(|d| if d == 3 || d == 5 { top.clone() } else { bot.clone() }).collect();
        let r = check_local_valuation(&g, o, &phi).unwrap();
        assert!(r.is_empty(), "{r}");
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn truth_set_extremes() {
        let cat = Arc::new(
            CategoryBuilder::new().object("A").object("B").morphism("f", "B", "A").build().unwrap(),
        );
        let x = Presheaf::from_labels(
            cat.clone(),
            &[("A", vec!["0", "1"]), ("B", vec!["0", "1"])],
            &[("f", vec![("0", "0"), ("1", "1")])],
        )
        .unwrap();
        let chain = vec![vec![true, true], vec![false, true]];
        let g = Arc::new(PropositionPresheaf::new(x, vec![chain.clone(), chain]).unwrap());
        let none = valuation_from_truth_set(g.clone(), |_, _| false);
        assert!(none.report.is_empty());
        assert!(cat.objects().all(|a| none.valuation.local(a).iter().all(|s| s.is_empty())));
        let all = valuation_from_truth_set(g.clone(), |_, _| true);
        assert!(all.report.is_empty());
        assert!(cat.objects().all(|a| all.valuation.local(a).iter().all(|s| *s == cat.top(a))));
        assert!(all.valuation.check_func().is_empty());

        // true at A but not at B: closure failure reported
        let a = cat.object_by_label("A").unwrap();
        let broken = valuation_from_truth_set(g, |o, d| o == a && d == 1);
        assert!(broken.report.has_condition("weakening-closure"));
        assert!(broken.report.has_condition("sieve"));
    }

    #[test]
    fn one_object_valuation_is_natural() {
        let g = one_object_booleans();
        let cat = g.base();
        let o = ObjId(0);
        let nu = GeneralisedValuation::new(g.clone(), vec![vec![Sieve::empty(cat, o), cat.top(o)]]).unwrap();
        assert!(nu.check_func().is_empty());
        assert!(nat_trans_of_valuation(&nu).is_ok());
        assert!(nu.check_partial_truth_axioms().is_empty());
        assert!(nu.verify().is_empty());
    }
}
