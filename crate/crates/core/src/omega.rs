//! The subobject classifier: sieves at each object, their Heyting algebra,
//! and the presheaf `Ω` whose transitions are pull-backs.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{malformed, Result};
use crate::fincat::{FiniteCategory, MorphismSet, ObjId, Sieve};
use crate::presheaf::Presheaf;

/// All sieves on one object, enumerated once, with the Heyting operations.
#[derive(Clone, Debug)]
pub struct OmegaAt {
    base: Arc<FiniteCategory>,
    at: ObjId,
    sieves: Vec<Sieve>,
    index: HashMap<MorphismSet, usize>,
}

impl OmegaAt {
    pub fn new(base: Arc<FiniteCategory>, at: ObjId) -> Self {
        let sieves = enumerate_sieves(&base, at);
        let index = sieves.iter().enumerate().map(|(i, s)| (s.members().clone(), i)).collect();
        OmegaAt { base, at, sieves, index }
    }

    pub fn at(&self) -> ObjId {
        self.at
    }

    pub fn len(&self) -> usize {
        self.sieves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sieves.is_empty()
    }

    pub fn sieves(&self) -> &[Sieve] {
        &self.sieves
    }

    pub fn sieve(&self, i: usize) -> &Sieve {
        &self.sieves[i]
    }

    /// Position of `members` in the enumeration; fails when `members` is not
    /// a sieve on this object.
    pub fn index_of_members(&self, members: &MorphismSet) -> Result<usize> {
        self.index.get(members).copied().ok_or_else(|| {
            malformed(format!(
                "{{{}}} is not a sieve on `{}`",
                members.iter().map(|m| self.base.label(m)).collect::<Vec<_>>().join(", "),
                self.base.object_label(self.at)
            ))
        })
    }

    pub fn index_of(&self, s: &Sieve) -> Result<usize> {
        self.same_object(s)?;
        self.index_of_members(s.members())
    }

    /// Index of the empty sieve, `0_Ω(A)`.
    pub fn bottom_index(&self) -> usize {
        0
    }

    /// Index of the principal sieve, `1_Ω(A)`.
    pub fn top_index(&self) -> usize {
        self.sieves.len() - 1
    }

    pub fn bottom(&self) -> &Sieve {
        &self.sieves[0]
    }

    pub fn top(&self) -> &Sieve {
        &self.sieves[self.top_index()]
    }

    fn same_object(&self, s: &Sieve) -> Result<()> {
        if s.at() != self.at {
            return Err(malformed(format!(
                "sieve on `{}` used at `{}`",
                self.base.object_label(s.at()),
                self.base.object_label(self.at)
            )));
        }
        Ok(())
    }

    pub fn meet(&self, s1: &Sieve, s2: &Sieve) -> Result<Sieve> {
        self.same_object(s1)?;
        self.same_object(s2)?;
        Ok(Sieve::new_unchecked(self.at, s1.members().intersection(s2.members())))
    }

    pub fn join(&self, s1: &Sieve, s2: &Sieve) -> Result<Sieve> {
        self.same_object(s1)?;
        self.same_object(s2)?;
        Ok(Sieve::new_unchecked(self.at, s1.members().union(s2.members())))
    }

    /// Relative pseudo-complement: the morphisms `f` such that every
    /// precomposite `f∘g` lying in `s1` also lies in `s2`.
    pub fn implies(&self, s1: &Sieve, s2: &Sieve) -> Result<Sieve> {
        self.same_object(s1)?;
        self.same_object(s2)?;
        let cat = &*self.base;
        let mut members = cat.empty_set();
        for &f in cat.into(self.at) {
            let ok = cat.into(cat.dom(f)).iter().all(|&g| {
                let fg = cat.comp(g, f);
                !s1.contains(fg) || s2.contains(fg)
            });
            if ok {
                members.insert(f);
            }
        }
        Ok(Sieve::new_unchecked(self.at, members))
    }

    /// `¬S = S ⇒ ∅`.
    pub fn neg(&self, s: &Sieve) -> Result<Sieve> {
        self.implies(s, self.bottom())
    }

    pub fn labels(&self) -> Vec<Vec<String>> {
        self.sieves.iter().map(|s| s.labels(&self.base)).collect()
    }
}

/// Down-closed subsets of the precomposition order on morphisms into `at`,
/// sorted by size and then by member bitset (so `∅` is first and `↓at` last).
fn enumerate_sieves(cat: &FiniteCategory, at: ObjId) -> Vec<Sieve> {
    let generated: Vec<MorphismSet> = cat
        .into(at)
        .iter()
        .map(|&f| {
            let mut seed = cat.empty_set();
            seed.insert(f);
            cat.sieve_closure(at, &seed).expect("seed has the right codomain").members().clone()
        })
        .collect();
    let mut seen: HashMap<MorphismSet, ()> = HashMap::new();
    let mut queue: VecDeque<MorphismSet> = VecDeque::new();
    let empty = cat.empty_set();
    seen.insert(empty.clone(), ());
    queue.push_back(empty);
    while let Some(s) = queue.pop_front() {
        for (&f, down) in cat.into(at).iter().zip(&generated) {
            if s.contains(f) {
                continue;
            }
            let bigger = s.union(down);
            if !seen.contains_key(&bigger) {
                seen.insert(bigger.clone(), ());
                queue.push_back(bigger);
            }
        }
    }
    let mut sieves: Vec<Sieve> = seen.into_keys().map(|m| Sieve::new_unchecked(at, m)).collect();
    sieves.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sieves
}

/// `Ω` over a finite category: every `Ω(A)` plus the pull-back presheaf.
#[derive(Clone, Debug)]
pub struct Omega {
    base: Arc<FiniteCategory>,
    per_object: Vec<OmegaAt>,
    presheaf: Presheaf,
}

impl Omega {
    pub fn new(base: Arc<FiniteCategory>) -> Self {
        let per_object: Vec<OmegaAt> = base.objects().map(|a| OmegaAt::new(base.clone(), a)).collect();
        let sets = per_object
            .iter()
            .map(|o| o.sieves.iter().map(|s| s.display(&base).to_string()).collect())
            .collect();
        let maps = base
            .morphisms()
            .map(|f| {
                let (b, a) = (base.dom(f), base.cod(f));
                per_object[a.0]
                    .sieves
                    .iter()
                    .map(|s| {
                        let pulled = base.pullback(s, f);
                        per_object[b.0].index_of_members(pulled.members()).expect("pull-back of a sieve is a sieve")
                    })
                    .collect()
            })
            .collect();
        let presheaf = Presheaf::new(base.clone(), sets, maps).expect("pull-back tables are total");
        Omega { base, per_object, presheaf }
    }

    pub fn base(&self) -> &FiniteCategory {
        &self.base
    }

    pub fn at(&self, a: ObjId) -> &OmegaAt {
        &self.per_object[a.0]
    }

    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn omega_of(cat: FiniteCategory) -> Omega {
        Omega::new(Arc::new(cat))
    }

    #[test]
    fn p2_truth_values() {
        let omega = omega_of(fixtures::p2());
        let cat = omega.base();
        let (a, b) = (cat.object_by_label("A").unwrap(), cat.object_by_label("B").unwrap());
        let labels = omega.at(a).labels();
        assert_eq!(labels, vec![vec![], vec!["f".to_owned()], vec!["f".to_owned(), "id_A".to_owned()]]);
        assert_eq!(omega.at(b).len(), 2);
        assert!(omega.presheaf().validate().is_empty());
    }

    #[test]
    fn one_object_has_two_truth_values() {
        let omega = omega_of(FiniteCategory::discrete(&["O"]));
        assert_eq!(omega.at(ObjId(0)).len(), 2);
    }

    #[test]
    fn q3_truth_values_exclude_unclosed_sets() {
        let omega = omega_of(fixtures::q3_category());
        let cat = omega.base();
        let a = cat.object_by_label("A").unwrap();
        let mut labels = omega.at(a).labels();
        labels.sort();
        assert_eq!(
            labels,
            vec![
                vec![],
                vec!["id_A".to_owned(), "p".to_owned(), "u".to_owned()],
                vec!["p".to_owned(), "u".to_owned()],
                vec!["u".to_owned()],
            ]
        );
    }

    #[test]
    fn heyting_operations_on_p2() {
        let cat = Arc::new(fixtures::p2());
        let omega = Omega::new(cat.clone());
        let a = cat.object_by_label("A").unwrap();
        let oa = omega.at(a);
        let f = cat.sieve_from_labels(a, &["f"]).unwrap();
        let top = oa.top().clone();
        let bot = oa.bottom().clone();

        assert_eq!(oa.meet(&f, &top).unwrap(), f);
        assert_eq!(oa.meet(&f, &bot).unwrap(), bot);
        assert_eq!(oa.implies(&f, &f).unwrap(), top);
        assert_eq!(oa.implies(&top, &f).unwrap(), f);
        assert_eq!(oa.implies(&f, &bot).unwrap(), bot);
        assert_eq!(oa.neg(&bot).unwrap(), top);
        assert_eq!(oa.neg(&top).unwrap(), bot);
        assert_eq!(oa.neg(&f).unwrap(), bot);
        // excluded middle fails
        let lem = oa.join(&f, &oa.neg(&f).unwrap()).unwrap();
        assert_eq!(lem, f);
        assert_ne!(lem, top);
    }

    #[test]
    fn join_on_q3() {
        let cat = Arc::new(fixtures::q3_category());
        let omega = Omega::new(cat.clone());
        let a = cat.object_by_label("A").unwrap();
        let u = cat.sieve_from_labels(a, &["u"]).unwrap();
        let pu = cat.sieve_from_labels(a, &["p", "u"]).unwrap();
        assert_eq!(omega.at(a).join(&u, &pu).unwrap(), pu);
    }

    #[test]
    fn mismatched_objects_are_rejected() {
        let cat = Arc::new(fixtures::p2());
        let omega = Omega::new(cat.clone());
        let (a, b) = (cat.object_by_label("A").unwrap(), cat.object_by_label("B").unwrap());
        let sb = omega.at(b).top().clone();
        let sa = omega.at(a).top().clone();
        assert!(omega.at(a).meet(&sa, &sb).is_err());
        assert!(omega.at(a).implies(&sb, &sa).is_err());
    }
}
