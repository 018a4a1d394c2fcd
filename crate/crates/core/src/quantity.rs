//! Thin categories of physical quantities shared by the quantum and
//! classical backends.
//!
//! Each object is a quantity with a finite list of possible values. A
//! morphism `B → A` exists when `B` is a function of `A`, and carries that
//! function as a table from the values of `A` to the values of `B`. Both
//! backends build the value presheaf, the coarse-graining presheaf of
//! propositions `A ∈ Δ` and partial valuations from this one structure.
//!
//! A proposition `A ∈ Δ` is encoded as the bitmask of `Δ` over the value
//! list of `A`, and that bitmask is also its element index in `G(A)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{malformed, Result};
use crate::fincat::{CategoryBuilder, FiniteCategory, MorId, ObjId, Sieve};
use crate::genval::{ComparisonFunctor, GeneralisedValuation, PropositionPresheaf};
use crate::presheaf::{Presheaf, Section};
use crate::report::{Report, Violation};

/// Largest value list for which the power set `G(A)` is materialised.
pub const MAX_VALUES: usize = 16;

#[derive(Clone, Debug)]
pub struct QuantityCategory {
    cat: Arc<FiniteCategory>,
    values: Vec<Vec<String>>,
    funcs: Vec<Vec<usize>>,
}

impl QuantityCategory {
    pub fn new(cat: Arc<FiniteCategory>, values: Vec<Vec<String>>, funcs: Vec<Vec<usize>>) -> Result<Self> {
        if values.len() != cat.object_count() || funcs.len() != cat.morphism_count() {
            return Err(malformed("quantity category shape mismatch"));
        }
        if let Some(a) = cat.objects().find(|a| values[a.0].is_empty() || values[a.0].len() > MAX_VALUES) {
            return Err(malformed(format!(
                "`{}` must have between 1 and {MAX_VALUES} values",
                cat.object_label(a)
            )));
        }
        if !cat.is_thin() {
            return Err(malformed("categories of quantities are thin"));
        }
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            let t = &funcs[f.0];
            if t.len() != values[a.0].len() || t.iter().any(|&y| y >= values[b.0].len()) {
                return Err(malformed(format!("function carried by `{}` is not total", cat.label(f))));
            }
        }
        let q = QuantityCategory { cat, values, funcs };
        let report = q.value_presheaf().validate();
        if !report.is_empty() {
            return Err(malformed(format!("carried functions do not compose: {}", report.violations[0])));
        }
        Ok(q)
    }

    /// Builds the thin category from the detected relations. `arrows` maps
    /// `(domain, codomain)` object indices to a morphism label and the carried
    /// function; composites are the unique morphism between their endpoints.
    pub fn from_relations(
        names: &[String],
        values: Vec<Vec<String>>,
        arrows: &BTreeMap<(usize, usize), (String, Vec<usize>)>,
    ) -> Result<Self> {
        let mut builder = CategoryBuilder::new().infer_thin_composites(true);
        for n in names {
            builder = builder.object(n.clone());
        }
        for (&(b, a), (label, _)) in arrows {
            builder = builder.morphism(label.clone(), names[b].clone(), names[a].clone());
        }
        let cat = builder.build()?;
        if let Some(v) = cat.validate().violations.first() {
            return Err(malformed(format!("relations are not transitive: {v}")));
        }
        let funcs = cat
            .morphisms()
            .map(|m| {
                let (b, a) = (cat.dom(m).0, cat.cod(m).0);
                if cat.is_identity(m) {
                    (0..values[a].len()).collect()
                } else {
                    arrows[&(b, a)].1.clone()
                }
            })
            .collect();
        QuantityCategory::new(Arc::new(cat), values, funcs)
    }

    pub fn category(&self) -> &FiniteCategory {
        &self.cat
    }

    pub fn category_arc(&self) -> &Arc<FiniteCategory> {
        &self.cat
    }

    pub fn values(&self, a: ObjId) -> &[String] {
        &self.values[a.0]
    }

    /// The function `σ(A) → σ(B)` carried by `f: B → A`, as indices.
    pub fn func(&self, f: MorId) -> &[usize] {
        &self.funcs[f.0]
    }

    pub fn full_mask(&self, a: ObjId) -> u32 {
        (1u32 << self.values[a.0].len()) - 1
    }

    /// `f(Δ)` as a mask over the values of the domain of `f`.
    pub fn image(&self, f: MorId, delta: u32) -> u32 {
        self.funcs[f.0]
            .iter()
            .enumerate()
            .filter(|(i, _)| delta & (1 << i) != 0)
            .fold(0, |acc, (_, &j)| acc | (1 << j))
    }

    /// `f⁻¹(Λ)` as a mask over the values of the codomain of `f`.
    pub fn preimage(&self, f: MorId, lambda: u32) -> u32 {
        self.funcs[f.0]
            .iter()
            .enumerate()
            .filter(|(_, &j)| lambda & (1 << j) != 0)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    pub fn subset_label(&self, a: ObjId, mask: u32) -> String {
        let parts: Vec<&str> = self.values[a.0]
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v.as_str())
            .collect();
        format!("{{{}}}", parts.join(","))
    }

    /// `Σ(A) = σ(A)`, transitions given by the carried functions.
    pub fn value_presheaf(&self) -> Presheaf {
        Presheaf::new(self.cat.clone(), self.values.clone(), self.funcs.clone()).expect("shape checked")
    }

    /// `G(A)` = subsets of `σ(A)` under inclusion, `G(f)(Δ) = f(Δ)`, and the
    /// comparison functor `C(f)(Λ) = f⁻¹(Λ)`.
    pub fn coarse_graining(&self) -> (Arc<PropositionPresheaf>, ComparisonFunctor) {
        let cat = &self.cat;
        let sets: Vec<Vec<String>> = cat
            .objects()
            .map(|a| (0..=self.full_mask(a)).map(|m| self.subset_label(a, m)).collect())
            .collect();
        let maps: Vec<Vec<usize>> = cat
            .morphisms()
            .map(|f| (0..=self.full_mask(cat.cod(f))).map(|d| self.image(f, d) as usize).collect())
            .collect();
        let presheaf = Presheaf::new(cat.clone(), sets, maps).expect("images stay in range");
        let leq = cat
            .objects()
            .map(|a| {
                let n = self.full_mask(a) + 1;
                (0..n).map(|d| (0..n).map(|e| d & e == d).collect()).collect()
            })
            .collect();
        let g = PropositionPresheaf::new(presheaf, leq).expect("power sets are bounded posets");
        let c = ComparisonFunctor::from_fn(&g, |f, x| self.preimage(f, x as u32) as usize).expect("total");
        (Arc::new(g), c)
    }

    /// `ν(A ∈ Δ) = { f: B → A | holds(B, f(Δ)) }`, with `f(Δ)` computed
    /// from the carried function.
    pub(crate) fn valuation_by_weakening(
        &self,
        g: &Arc<PropositionPresheaf>,
        holds: impl Fn(ObjId, u32) -> bool,
    ) -> GeneralisedValuation {
        let cat = &*self.cat;
        GeneralisedValuation::from_fn(g.clone(), |a, delta| {
            let mut members = cat.empty_set();
            for &f in cat.into(a) {
                if holds(cat.dom(f), self.image(f, delta as u32)) {
                    members.insert(f);
                }
            }
            Sieve::new_unchecked(a, members)
        })
        .expect("one value per proposition")
    }
}

/// A value assignment on a coarse-graining-closed set of quantities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialValuation {
    values: Vec<Option<usize>>,
}

impl PartialValuation {
    pub fn new(values: Vec<Option<usize>>) -> Self {
        PartialValuation { values }
    }

    /// Reads a valuation off a (partial or global) section of the value
    /// presheaf.
    pub fn from_section(s: &Section) -> Self {
        PartialValuation { values: s.choices().to_vec() }
    }

    pub fn to_section(&self) -> Section {
        Section::new(self.values.clone())
    }

    pub fn get(&self, a: ObjId) -> Option<usize> {
        self.values[a.0]
    }

    pub fn in_domain(&self, a: ObjId) -> bool {
        self.values[a.0].is_some()
    }

    /// Closure under coarse-graining and `V(B) = f(V(A))`.
    pub fn check(&self, q: &QuantityCategory) -> Report {
        let cat = q.category();
        let mut report = Report::new();
        if self.values.len() != cat.object_count() {
            report.push(Violation::new("shape").expected(cat.object_count().to_string()).actual(self.values.len().to_string()));
            return report;
        }
        for a in cat.objects() {
            if let Some(v) = self.values[a.0] {
                if v >= q.values(a).len() {
                    report.push(Violation::new("value").object(cat.object_label(a)).expected("a listed value").actual(v.to_string()));
                    return report;
                }
            }
        }
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            let Some(va) = self.values[a.0] else { continue };
            let expected = q.func(f)[va];
            match self.values[b.0] {
                None => report.push(
                    Violation::new("coarse-graining closure")
                        .morphism(cat.label(f))
                        .expected(format!("{} in domain", cat.object_label(b)))
                        .actual("missing"),
                ),
                Some(vb) if vb != expected => report.push(
                    Violation::new("FUNC")
                        .morphism(cat.label(f))
                        .expected(q.values(b)[expected].clone())
                        .actual(q.values(b)[vb].clone()),
                ),
                Some(_) => {}
            }
        }
        report
    }
}

/// `ν^V(A ∈ Δ) = { f: B → A | B ∈ dom V, V(B) ∈ f(Δ) }`.
pub fn nu_from_partial_valuation(
    q: &QuantityCategory,
    g: &Arc<PropositionPresheaf>,
    v: &PartialValuation,
) -> Result<GeneralisedValuation> {
    let report = v.check(q);
    if let Some(first) = report.violations.first() {
        return Err(malformed(format!("invalid partial valuation: {first}")));
    }
    Ok(q.valuation_by_weakening(g, |b, lambda| v.get(b).is_some_and(|x| lambda & (1 << x) != 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn q3_coarse_graining_presheaf() {
        let q = fixtures::q3();
        let qc = q.quantities();
        let cat = qc.category();
        let p = cat.morphism_by_label("p").unwrap();
        let u = cat.morphism_by_label("u").unwrap();
        // σ(A) = [1, 2], σ(P) = [0, 1]
        assert_eq!(qc.image(p, 0b01), 0b01);
        assert_eq!(qc.preimage(p, 0b01), 0b01);
        for delta in 1..=3 {
            assert_eq!(qc.image(u, delta), 0b1);
        }
        let (g, c) = qc.coarse_graining();
        let report = crate::genval::check_coarse_graining(&g, &c);
        assert!(report.holds());
        assert!(report.retraction_holds());
        assert!(report.injective.iter().all(|(_, inj)| *inj));
        // retraction instance G(p)(C(p)({0})) = {0}
        assert_eq!(g.weaken(p, c.apply(p, 0b01)), 0b01);
    }

    #[test]
    fn constant_comparison_breaks_retraction_only() {
        let q = fixtures::q3();
        let qc = q.quantities();
        let cat = qc.category();
        let (g, c) = qc.coarse_graining();
        let p = cat.morphism_by_label("p").unwrap();
        let a = cat.cod(p);
        let top = qc.full_mask(a) as usize;
        let mutated = c.with_map(p, vec![top; g.size(cat.dom(p))]);
        let report = crate::genval::check_coarse_graining(&g, &mutated);
        assert!(report.holds(), "{}", report.required);
        assert!(!report.retraction_holds());
        assert!(report.retraction.violations.iter().all(|v| v.morphisms == vec!["p"]));
        let inj = report.injective.iter().find(|(l, _)| l == "p").unwrap().1;
        assert!(!inj);
    }

    #[test]
    fn partial_valuation_must_be_closed() {
        let q = fixtures::q3();
        let qc = q.quantities();
        let cat = qc.category();
        let (g, _) = qc.coarse_graining();
        let a = cat.object_by_label("A").unwrap();
        let mut values = vec![None; cat.object_count()];
        values[a.0] = Some(0);
        let v = PartialValuation::new(values);
        assert!(v.check(qc).has_condition("coarse-graining closure"));
        assert!(nu_from_partial_valuation(qc, &g, &v).is_err());
    }
}
