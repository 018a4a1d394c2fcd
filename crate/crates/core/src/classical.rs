//! Classical backend: finite state spaces, the category of quantities under
//! functional dependence, the value presheaf, and valuations from
//! microstates, macrostates and probability measures.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{malformed, Error, Result};
use crate::fincat::{FiniteCategory, ObjId};
use crate::genval::{ComparisonFunctor, GeneralisedValuation, PropositionPresheaf};
use crate::linalg::{rational_label, Matrix, Rational, Scalar};
use crate::presheaf::{Presheaf, Section};
use crate::quantity::{nu_from_partial_valuation, PartialValuation, QuantityCategory};
use crate::quantum::OperatorCategory;
use crate::report::{Report, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    states: Vec<String>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(states: impl IntoIterator<Item = S>) -> Result<Self> {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.is_empty() {
            return Err(malformed("a state space needs at least one state"));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(malformed(format!("duplicate state `{s}`")));
            }
        }
        Ok(StateSpace { states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn index(&self, state: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == state)
            .ok_or_else(|| Error::NotFound(format!("state `{state}`")))
    }

    pub fn macrostate(&self, states: &[&str]) -> Result<Macrostate> {
        let mut region = vec![false; self.len()];
        for s in states {
            region[self.index(s)?] = true;
        }
        Macrostate::new(region)
    }
}

/// A real function on the state space, one rational value per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalQuantity {
    pub name: String,
    pub values: Vec<Rational>,
}

impl ClassicalQuantity {
    pub fn new(name: impl Into<String>, values: Vec<Rational>) -> Self {
        ClassicalQuantity { name: name.into(), values }
    }
}

/// A nonempty region of the state space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Macrostate {
    region: Vec<bool>,
}

impl Macrostate {
    pub fn new(region: Vec<bool>) -> Result<Self> {
        if !region.contains(&true) {
            return Err(malformed("a macrostate must contain at least one state"));
        }
        Ok(Macrostate { region })
    }

    pub fn contains(&self, s: usize) -> bool {
        self.region[s]
    }

    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        self.region.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }
}

/// A probability measure: nonnegative weights summing exactly to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalMeasure {
    weights: Vec<Rational>,
}

impl ClassicalMeasure {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        let zero = Rational::from_integer(0.into());
        if weights.iter().any(|w| *w < zero) {
            return Err(malformed("measure weights must be nonnegative"));
        }
        let total = weights.iter().fold(zero, |acc, w| acc + w);
        if total != Rational::from_integer(1.into()) {
            return Err(malformed(format!("measure weights sum to {}, not 1", rational_label(&total))));
        }
        Ok(ClassicalMeasure { weights })
    }

    pub fn point_mass(n: usize, s: usize) -> Self {
        let weights = (0..n).map(|i| Rational::from_integer(((i == s) as i64).into())).collect();
        ClassicalMeasure { weights }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }
}

/// The category of quantities on a state space: a morphism `B → A` exists
/// when `B` factors through `A`.
#[derive(Clone, Debug)]
pub struct FunctionCategory {
    space: StateSpace,
    quantities: Vec<ClassicalQuantity>,
    /// `S(A)` in increasing order.
    images: Vec<Vec<Rational>>,
    /// `A(s)` as an index into `images[A]`.
    at_state: Vec<Vec<usize>>,
    q: QuantityCategory,
}

/// Builds the function category. Morphisms are labelled from `labels`
/// (keyed by `(domain, codomain)` names), defaulting to `B->A`.
pub fn build_function_category(
    space: StateSpace,
    quantities: Vec<ClassicalQuantity>,
    labels: &BTreeMap<(String, String), String>,
) -> Result<FunctionCategory> {
    if quantities.is_empty() {
        return Err(malformed("no quantities"));
    }
    for (i, q) in quantities.iter().enumerate() {
        if quantities[..i].iter().any(|p| p.name == q.name) {
            return Err(malformed(format!("duplicate quantity `{}`", q.name)));
        }
        if q.values.len() != space.len() {
            return Err(malformed(format!("`{}` has {} values for {} states", q.name, q.values.len(), space.len())));
        }
    }
    let images: Vec<Vec<Rational>> = quantities
        .iter()
        .map(|q| {
            let mut v = q.values.clone();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    let at_state: Vec<Vec<usize>> = quantities
        .iter()
        .zip(&images)
        .map(|(q, img)| q.values.iter().map(|x| img.binary_search(x).expect("value in image")).collect())
        .collect();
    let mut arrows = BTreeMap::new();
    for a in 0..quantities.len() {
        for b in 0..quantities.len() {
            if a == b {
                continue;
            }
            let mut f = vec![None; images[a].len()];
            let factors = (0..space.len()).all(|s| {
                let slot = &mut f[at_state[a][s]];
                *slot.get_or_insert(at_state[b][s]) == at_state[b][s]
            });
            if factors {
                let (bn, an) = (&quantities[b].name, &quantities[a].name);
                let label = labels.get(&(bn.clone(), an.clone())).cloned().unwrap_or_else(|| format!("{bn}->{an}"));
                arrows.insert((b, a), (label, f.into_iter().map(|x| x.expect("image is covered")).collect()));
            }
        }
    }
    let names: Vec<String> = quantities.iter().map(|q| q.name.clone()).collect();
    let values = images.iter().map(|img| img.iter().map(rational_label).collect()).collect();
    let q = QuantityCategory::from_relations(&names, values, &arrows)?;
    Ok(FunctionCategory { space, quantities, images, at_state, q })
}

impl FunctionCategory {
    pub fn category(&self) -> &FiniteCategory {
        self.q.category()
    }

    pub fn category_arc(&self) -> &Arc<FiniteCategory> {
        self.q.category_arc()
    }

    pub fn quantities(&self) -> &QuantityCategory {
        &self.q
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn quantity(&self, a: ObjId) -> &ClassicalQuantity {
        &self.quantities[a.0]
    }

    /// `S(A)`, the set of values taken by `A`.
    pub fn image(&self, a: ObjId) -> &[Rational] {
        &self.images[a.0]
    }

    pub fn object(&self, name: &str) -> Result<ObjId> {
        self.category().object_by_label(name)
    }

    /// The proposition `A ∈ Δ` as `(object, mask)`. Every value of `Δ`
    /// must lie in `S(A)`.
    pub fn proposition(&self, name: &str, delta: &[Rational]) -> Result<(ObjId, u32)> {
        let a = self.object(name)?;
        let mut mask = 0;
        for v in delta {
            let i = self.images[a.0]
                .binary_search(v)
                .map_err(|_| malformed(format!("{} is not a value of `{name}`", rational_label(v))))?;
            mask |= 1 << i;
        }
        Ok((a, mask))
    }

    /// `Υ(A) = S(A)`, `Υ(f)(λ) = f(λ)`.
    pub fn value_presheaf(&self) -> Presheaf {
        self.q.value_presheaf()
    }

    pub fn coarse_graining_presheaf(&self) -> (Arc<PropositionPresheaf>, ComparisonFunctor) {
        self.q.coarse_graining()
    }

    /// `γ^s_A = A(s)`.
    pub fn section_from_microstate(&self, state: &str) -> Result<Section> {
        let s = self.space.index(state)?;
        Ok(Section::global(self.at_state.iter().map(|v| v[s]).collect()))
    }

    /// Defined on the quantities constant on the region, with the common value.
    pub fn partial_valuation_from_macrostate(&self, r: &Macrostate) -> PartialValuation {
        let values = self
            .at_state
            .iter()
            .map(|v| {
                let mut it = r.states().map(|s| v[s]);
                let first = it.next().expect("macrostates are nonempty");
                it.all(|x| x == first).then_some(first)
            })
            .collect();
        PartialValuation::new(values)
    }

    /// `B(R)` as a mask over `S(B)`.
    fn region_image(&self, b: ObjId, r: &Macrostate) -> u32 {
        r.states().fold(0, |acc, s| acc | (1 << self.at_state[b.0][s]))
    }

    /// `ν^R(A ∈ Δ) = { f: B → A | B(R) ⊆ f(Δ) }`.
    pub fn nu_macrostate(&self, g: &Arc<PropositionPresheaf>, r: &Macrostate) -> Result<GeneralisedValuation> {
        self.check_region(r)?;
        Ok(self.q.valuation_by_weakening(g, |b, lambda| self.region_image(b, r) & !lambda == 0))
    }

    /// `R ∩ A⁻¹(Δ)` as state indices.
    pub fn upsilon_macrostate(&self, r: &Macrostate, a: ObjId, delta: u32) -> Result<Vec<usize>> {
        self.check_region(r)?;
        Ok(r.states().filter(|&s| delta & (1 << self.at_state[a.0][s]) != 0).collect())
    }

    /// `ν^s(A ∈ Δ) = { f: B → A | f(A(s)) ∈ f(Δ) }`; note `f(A(s)) = B(s)`.
    pub fn nu_microstate(&self, g: &Arc<PropositionPresheaf>, state: &str) -> Result<GeneralisedValuation> {
        let s = self.space.index(state)?;
        Ok(self.q.valuation_by_weakening(g, |b, lambda| lambda & (1 << self.at_state[b.0][s]) != 0))
    }

    /// `ν^ρ(A ∈ Δ) = { f: B → A | ρ(B⁻¹(f(Δ))) = 1 }`.
    pub fn nu_measure(&self, g: &Arc<PropositionPresheaf>, rho: &ClassicalMeasure) -> Result<GeneralisedValuation> {
        if rho.weights.len() != self.space.len() {
            return Err(malformed(format!("measure has {} weights for {} states", rho.weights.len(), self.space.len())));
        }
        Ok(self.q.valuation_by_weakening(g, |b, lambda| self.probability(rho, b, lambda) == Rational::from_integer(1.into())))
    }

    /// `ρ(B⁻¹(Λ))`.
    pub fn probability(&self, rho: &ClassicalMeasure, b: ObjId, lambda: u32) -> Rational {
        (0..self.space.len())
            .filter(|&s| lambda & (1 << self.at_state[b.0][s]) != 0)
            .fold(Rational::from_integer(0.into()), |acc, s| acc + &rho.weights[s])
    }

    pub fn nu_from_partial_valuation(&self, g: &Arc<PropositionPresheaf>, v: &PartialValuation) -> Result<GeneralisedValuation> {
        nu_from_partial_valuation(&self.q, g, v)
    }

    fn check_region(&self, r: &Macrostate) -> Result<()> {
        if r.region.len() != self.space.len() {
            return Err(malformed("macrostate over a different state space"));
        }
        Ok(())
    }
}

/// Checks that `Q(B) = f(Q(A))` with the carried `f` whenever `B = f(A)`.
///
/// `mapping` sends quantity names to operator names and must cover every
/// quantity. `f` is applied through the spectral decomposition of `Q(A)`,
/// so every eigenvalue of `Q(A)` must lie in `S(A)`.
pub fn check_quantisation_functor<S: Scalar>(
    m: &FunctionCategory,
    o: &OperatorCategory<S>,
    mapping: &BTreeMap<String, String>,
) -> Result<Report> {
    let cat = m.category();
    let image_of = |a: ObjId| -> Result<ObjId> {
        let name = &m.quantity(a).name;
        let op = mapping.get(name).ok_or_else(|| malformed(format!("quantity `{name}` is not mapped")))?;
        o.object(op)
    };
    let eps = o.epsilon();
    let mut report = Report::new();
    for f in cat.morphisms() {
        if cat.is_identity(f) {
            continue;
        }
        let (b, a) = (cat.dom(f), cat.cod(f));
        let (qb, qa) = (o.operator(image_of(b)?), o.operator(image_of(a)?));
        let table = m.quantities().func(f);
        let mut expected = Matrix::<S>::zeros(qa.dim());
        let mut covered = true;
        for (lambda, p) in qa.eigenvalues().iter().zip(qa.projectors()) {
            let hit = m.image(a).iter().position(|v| S::real_approx_eq(&S::real_from_rational(v), lambda, eps));
            match hit {
                Some(i) => {
                    let value = S::from_rational(&m.image(b)[table[i]]);
                    expected = expected.add(&p.scale(&value));
                }
                None => {
                    covered = false;
                    report.push(
                        Violation::new("spectrum")
                            .morphism(cat.label(f))
                            .object(qa.name())
                            .expected(format!("eigenvalues within S({})", m.quantity(a).name))
                            .actual(S::real_label(lambda)),
                    );
                }
            }
        }
        if covered && !expected.approx_eq(&qb.matrix(), eps) {
            report.push(
                Violation::new("quantisation")
                    .morphism(cat.label(f))
                    .object(qb.name())
                    .expected(format!("{}({}) = {}", cat.label(f), qa.name(), matrix_label(&expected)))
                    .actual(matrix_label(&qb.matrix())),
            );
        }
    }
    Ok(report)
}

fn matrix_label<S: Scalar>(m: &Matrix<S>) -> String {
    let n = m.dim();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m.get(i, j).is_zero_within(1e-12)));
    let entry = |x: &S| {
        if x.im().partial_cmp(&S::zero().im()) == Some(std::cmp::Ordering::Equal) {
            S::real_label(&x.re())
        } else {
            format!("{}+{}i", S::real_label(&x.re()), S::real_label(&x.im()))
        }
    };
    if diagonal {
        let d: Vec<String> = (0..n).map(|i| entry(m.get(i, i))).collect();
        format!("diag({})", d.join(","))
    } else {
        let rows: Vec<String> = m.rows().iter().map(|r| format!("[{}]", r.iter().map(entry).collect::<Vec<_>>().join(","))).collect();
        format!("[{}]", rows.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::int;

    fn labels(cat: &FiniteCategory, nu: &GeneralisedValuation, a: ObjId, d: u32) -> Vec<String> {
        nu.value(a, d as usize).labels(cat)
    }

    #[test]
    fn c3_category_and_value_presheaf() {
        let m = fixtures::c3();
        let cat = m.category();
        let mut non_id: Vec<_> = cat.morphisms().filter(|&f| !cat.is_identity(f)).map(|f| cat.label(f).to_owned()).collect();
        non_id.sort();
        assert_eq!(non_id, ["b", "e", "e'"]);
        let b = cat.morphism_by_label("b").unwrap();
        assert_eq!(m.quantities().func(b), &[0, 0, 1]);
        let (e, e2) = (cat.morphism_by_label("e").unwrap(), cat.morphism_by_label("e'").unwrap());
        assert_eq!(cat.compose(e2, b).unwrap(), e);
        let ups = m.value_presheaf();
        assert_eq!(ups.elements(m.object("A").unwrap()), ["1", "2", "3"]);
        assert_eq!(ups.elements(m.object("B").unwrap()), ["0", "1"]);
        assert_eq!(ups.global_sections().len(), 3);
    }

    #[test]
    fn microstate_sections() {
        let m = fixtures::c3();
        let ups = m.value_presheaf();
        let s2 = m.section_from_microstate("s2").unwrap();
        assert!(ups.check_section(&s2).is_empty());
        let got: Vec<_> = s2.labels(&ups).into_iter().map(|(_, v)| v).collect();
        assert_eq!(got, ["2", "0", "1"]);
        assert!(matches!(m.section_from_microstate("s9"), Err(Error::NotFound(_))));
    }

    #[test]
    fn macrostate_partial_valuation() {
        let m = fixtures::c3();
        let r = m.space().macrostate(&["s1", "s2"]).unwrap();
        let v = m.partial_valuation_from_macrostate(&r);
        assert!(v.check(m.quantities()).is_empty());
        assert_eq!(v.get(m.object("A").unwrap()), None);
        assert_eq!(v.get(m.object("B").unwrap()), Some(0));
        assert_eq!(v.get(m.object("I").unwrap()), Some(0));
        let all = m.space().macrostate(&["s1", "s2", "s3"]).unwrap();
        let v = m.partial_valuation_from_macrostate(&all);
        assert!(!v.in_domain(m.object("B").unwrap()));
        assert!(v.in_domain(m.object("I").unwrap()));
    }

    #[test]
    fn macrostate_valuation_examples() {
        let m = fixtures::c3();
        let cat = m.category();
        let (g, _) = m.coarse_graining_presheaf();
        let r = m.space().macrostate(&["s1", "s2"]).unwrap();
        let nu = m.nu_macrostate(&g, &r).unwrap();
        let (a, d) = m.proposition("A", &[int(1)]).unwrap();
        assert_eq!(labels(cat, &nu, a, d), ["b", "e"]);
        assert!(labels(cat, &nu, a, 0).is_empty());
        assert!(nu.verify().is_empty());
        let r3 = m.space().macrostate(&["s3"]).unwrap();
        let (_, d3) = m.proposition("A", &[int(3)]).unwrap();
        assert!(m.nu_macrostate(&g, &r3).unwrap().is_totally_true(a, d3 as usize));
        assert_eq!(m.upsilon_macrostate(&r, a, d).unwrap(), [0]);
        let (_, d12) = m.proposition("A", &[int(1), int(2)]).unwrap();
        assert_eq!(m.upsilon_macrostate(&r, a, d12).unwrap(), [0, 1]);
    }

    #[test]
    fn containment_is_strict_on_c3() {
        let m = fixtures::c3();
        let cat = m.category();
        let (g, _) = m.coarse_graining_presheaf();
        let r = m.space().macrostate(&["s1", "s3"]).unwrap();
        let nu_r = m.nu_macrostate(&g, &r).unwrap();
        let nu_v = m.nu_from_partial_valuation(&g, &m.partial_valuation_from_macrostate(&r)).unwrap();
        for a in cat.objects() {
            for d in 0..g.size(a) {
                assert!(nu_v.value(a, d).is_subset(nu_r.value(a, d)));
            }
        }
        let (a, d) = m.proposition("A", &[int(1), int(3)]).unwrap();
        let b = cat.morphism_by_label("b").unwrap();
        assert!(nu_r.value(a, d as usize).contains(b));
        assert!(!nu_v.value(a, d as usize).contains(b));
    }

    #[test]
    fn microstate_and_measure_valuations() {
        let m = fixtures::c3();
        let cat = m.category();
        let (g, _) = m.coarse_graining_presheaf();
        let (a, d1) = m.proposition("A", &[int(1)]).unwrap();
        assert!(m.nu_microstate(&g, "s1").unwrap().is_totally_true(a, d1 as usize));
        assert_eq!(labels(cat, &m.nu_microstate(&g, "s3").unwrap(), a, d1), ["e"]);

        let half = crate::linalg::rat(1, 2);
        let rho = ClassicalMeasure::new(vec![half.clone(), half, int(0)]).unwrap();
        let nu = m.nu_measure(&g, &rho).unwrap();
        let (_, d12) = m.proposition("A", &[int(1), int(2)]).unwrap();
        assert!(nu.is_totally_true(a, d12 as usize));
        assert_eq!(labels(cat, &nu, a, d1), ["b", "e"]);
        assert!(ClassicalMeasure::new(vec![int(1), int(1), int(-1)]).is_err());
    }

    #[test]
    fn point_mass_and_singleton_coincide_with_microstate() {
        let m = fixtures::c3();
        let (g, _) = m.coarse_graining_presheaf();
        for (i, s) in m.space().states().iter().enumerate() {
            let micro = m.nu_microstate(&g, s).unwrap();
            let macro_ = m.nu_macrostate(&g, &m.space().macrostate(&[s]).unwrap()).unwrap();
            let point = m.nu_measure(&g, &ClassicalMeasure::point_mass(3, i)).unwrap();
            assert_eq!(micro, macro_);
            assert_eq!(micro, point);
        }
    }

    #[test]
    fn quantisation_functor() {
        let m = fixtures::c3();
        let o = fixtures::c3_operators(false);
        let mapping: BTreeMap<String, String> =
            [("A", "A"), ("B", "B"), ("I", "I")].into_iter().map(|(a, b)| (a.to_owned(), b.to_owned())).collect();
        assert!(check_quantisation_functor(&m, &o, &mapping).unwrap().is_empty());
        let bad = fixtures::c3_operators(true);
        let report = check_quantisation_functor(&m, &bad, &mapping).unwrap();
        let v: Vec<_> = report.with_condition("quantisation").collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].morphisms, ["b"]);
        assert_eq!(v[0].expected, "b(A) = diag(0,0,1)");
        assert_eq!(v[0].actual, "diag(0,1,0)");
    }
}
