//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

pub mod ks;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use toposval::classical::{build_function_category, ClassicalMeasure, ClassicalQuantity, FunctionCategory, Macrostate, StateSpace};
use toposval::fincat::{CategoryBuilder, FiniteCategory, MorId, ObjId};
use toposval::genval::PropositionPresheaf;
use toposval::linalg::{gq, int, rat, GaussianRational, Matrix, Rational, Scalar};
use toposval::omega::Omega;
use toposval::presheaf::{NaturalTransformation, Presheaf, Subobject};
use toposval::quantity::PartialValuation;
use toposval::quantum::{BuildOptions, DensityMatrix, OperatorCategory, SpectralOperator, StateVector};

pub type Q = GaussianRational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random category together with, for free categories, the edge path
/// behind every morphism (empty for identities).
pub struct RandomCategory {
    pub cat: Arc<FiniteCategory>,
    pub paths: Option<Vec<Vec<usize>>>,
}

/// Free category on a random acyclic multigraph: morphisms are paths.
/// Edges run from higher to lower object index.
pub fn free_category(rng: &mut ChaCha8Rng, max_objects: usize, max_morphisms: usize) -> RandomCategory {
    let n = rng.gen_range(1..=max_objects);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    if n > 1 {
        for _ in 0..rng.gen_range(0..=2 * n) {
            let dom = rng.gen_range(1..n);
            let cod = rng.gen_range(0..dom);
            edges.push((dom, cod));
        }
    }
    loop {
        let paths = enumerate_paths(n, &edges);
        if paths.len() + n <= max_morphisms || edges.is_empty() {
            return build_free(n, &edges, &paths);
        }
        edges.pop();
    }
}

fn enumerate_paths(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    // Paths listed in travel order: first edge leaves the domain.
    let mut out: Vec<Vec<usize>> = edges.iter().enumerate().map(|(i, _)| vec![i]).collect();
    let mut frontier = out.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            let end = edges[*p.last().unwrap()].1;
            for (i, e) in edges.iter().enumerate() {
                if e.0 == end {
                    let mut q = p.clone();
                    q.push(i);
                    next.push(q);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
        if out.len() > 64 {
            break;
        }
    }
    let _ = n;
    out
}

fn path_label(p: &[usize]) -> String {
    p.iter().rev().map(|e| format!("e{e}")).collect::<Vec<_>>().join(".")
}

fn build_free(n: usize, edges: &[(usize, usize)], paths: &[Vec<usize>]) -> RandomCategory {
    let obj = |i: usize| format!("O{i}");
    let mut b = CategoryBuilder::new();
    for i in 0..n {
        b = b.object(obj(i));
    }
    for p in paths {
        let dom = edges[p[0]].0;
        let cod = edges[*p.last().unwrap()].1;
        b = b.morphism(path_label(p), obj(dom), obj(cod));
    }
    for g in paths {
        for f in paths {
            if edges[*g.last().unwrap()].1 == edges[f[0]].0 {
                let mut gf = g.clone();
                gf.extend(f);
                b = b.composite(path_label(g), path_label(f), path_label(&gf));
            }
        }
    }
    let cat = Arc::new(b.build().expect("free categories are well formed"));
    let by_label: BTreeMap<String, Vec<usize>> = paths.iter().map(|p| (path_label(p), p.clone())).collect();
    let mor_paths = cat.morphisms().map(|m| by_label.get(cat.label(m)).cloned().unwrap_or_default()).collect();
    RandomCategory { cat, paths: Some(mor_paths) }
}

/// A random partial order on objects, closed transitively, as a thin
/// category. Denser draws are retried at lower edge probability until the
/// morphism bound holds.
pub fn poset_category(rng: &mut ChaCha8Rng, max_objects: usize, max_morphisms: usize) -> RandomCategory {
    let n = rng.gen_range(1..=max_objects);
    let mut p = 0.5;
    let below = loop {
        let mut below = vec![vec![false; n]; n];
        for b in 1..n {
            for a in 0..b {
                below[b][a] = rng.gen_bool(p);
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if below[i][k] && below[k][j] {
                        below[i][j] = true;
                    }
                }
            }
        }
        if below.iter().flatten().filter(|&&x| x).count() + n <= max_morphisms {
            break below;
        }
        p *= 0.8;
    };
    let obj = |i: usize| format!("O{i}");
    let mut b = CategoryBuilder::new().infer_thin_composites(true);
    for i in 0..n {
        b = b.object(obj(i));
    }
    for i in 0..n {
        for j in 0..n {
            if below[i][j] {
                b = b.morphism(format!("{i}<{j}"), obj(i), obj(j));
            }
        }
    }
    RandomCategory { cat: Arc::new(b.build().expect("posets are thin categories")), paths: None }
}

pub fn random_category(rng: &mut ChaCha8Rng, max_objects: usize, max_morphisms: usize) -> RandomCategory {
    if rng.gen_bool(0.5) {
        free_category(rng, max_objects, max_morphisms)
    } else {
        poset_category(rng, max_objects, max_morphisms)
    }
}

/// Two one-object categories with non-identity endomorphisms: an
/// idempotent `e∘e = e` and an involution `s∘s = id`.
pub fn monoid_categories() -> Vec<FiniteCategory> {
    let idem = CategoryBuilder::new().object("M").morphism("e", "M", "M").composite("e", "e", "e").build().unwrap();
    let inv = CategoryBuilder::new().object("M").morphism("s", "M", "M").composite("s", "s", "id_M").build().unwrap();
    vec![idem, inv]
}

fn named_sets(sizes: &[usize]) -> Vec<Vec<String>> {
    sizes.iter().enumerate().map(|(a, &k)| (0..k).map(|i| format!("x{a}_{i}")).collect()).collect()
}

/// A random presheaf with at most `max_size` elements per object and at
/// least `min_size`. Free bases take random edge maps; thin bases use
/// rejection sampling, falling back to a representable presheaf.
pub fn random_presheaf(rng: &mut ChaCha8Rng, rc: &RandomCategory, min_size: usize, max_size: usize) -> Presheaf {
    let cat = &rc.cat;
    let n = cat.object_count();
    if let Some(paths) = &rc.paths {
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(min_size..=max_size)).collect();
        // edge maps keyed by the edge index appearing in single-edge paths
        let mut edge_maps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for m in cat.morphisms() {
            if paths[m.0].len() == 1 {
                let (dom, cod) = (cat.dom(m).0, cat.cod(m).0);
                edge_maps.insert(paths[m.0][0], (0..sizes[cod]).map(|_| rng.gen_range(0..sizes[dom])).collect());
            }
        }
        let maps = cat
            .morphisms()
            .map(|m| {
                let p = &paths[m.0];
                (0..sizes[cat.cod(m).0])
                    .map(|x| p.iter().rev().fold(x, |y, e| edge_maps[e][y]))
                    .collect()
            })
            .collect();
        return Presheaf::new(cat.clone(), named_sets(&sizes), maps).unwrap();
    }
    for _ in 0..500 {
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(min_size..=max_size.min(3))).collect();
        let maps: Vec<Vec<usize>> = cat
            .morphisms()
            .map(|m| {
                let (dom, cod) = (cat.dom(m).0, cat.cod(m).0);
                if cat.is_identity(m) {
                    (0..sizes[cod]).collect()
                } else {
                    (0..sizes[cod]).map(|_| rng.gen_range(0..sizes[dom])).collect()
                }
            })
            .collect();
        let x = Presheaf::new(cat.clone(), named_sets(&sizes), maps).unwrap();
        if x.validate().is_empty() {
            return x;
        }
    }
    let c = ObjId(rng.gen_range(0..n));
    match representable(cat, c) {
        Some(x) if cat.objects().all(|a| x.size(a) >= min_size) => x,
        _ => Presheaf::terminal(cat.clone()),
    }
}

/// `Hom(-, c)`, if every hom-set has at most four elements.
fn representable(cat: &Arc<FiniteCategory>, c: ObjId) -> Option<Presheaf> {
    let homs: Vec<Vec<MorId>> = cat.objects().map(|a| cat.hom(a, c).collect()).collect();
    if homs.iter().any(|h| h.len() > 4) {
        return None;
    }
    let sizes: Vec<usize> = homs.iter().map(Vec::len).collect();
    let maps = cat
        .morphisms()
        .map(|f| {
            let b = cat.dom(f);
            homs[cat.cod(f).0]
                .iter()
                .map(|&h| {
                    let hf = cat.compose(f, h).unwrap();
                    homs[b.0].iter().position(|&k| k == hf).unwrap()
                })
                .collect()
        })
        .collect();
    Presheaf::new(cat.clone(), named_sets(&sizes), maps).ok()
}

/// Random subset of every `X(A)`, then closed under the transitions.
pub fn random_subobject(rng: &mut ChaCha8Rng, x: &Presheaf) -> Subobject {
    let cat = x.base();
    let mut members: Vec<Vec<bool>> = cat.objects().map(|a| (0..x.size(a)).map(|_| rng.gen_bool(0.35)).collect()).collect();
    loop {
        let mut changed = false;
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            for d in 0..x.size(a) {
                if members[a.0][d] && !members[b.0][x.apply(f, d)] {
                    members[b.0][x.apply(f, d)] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Subobject::new(x.clone(), members).unwrap()
}

/// A natural transformation `X → Ω` found by a depth-first search that
/// tries candidate sieves in random order. Choosing `χ_A(x)` forces
/// `χ_B(X(f)x) = f*(χ_A(x))` for every `f: B → A`; forced values are
/// propagated and conflicts backtrack.
pub fn random_characteristic(rng: &mut ChaCha8Rng, x: &Presheaf, omega: &Omega) -> Option<NaturalTransformation> {
    let cat = x.base();
    let slots: Vec<(ObjId, usize)> = cat.objects().flat_map(|a| (0..x.size(a)).map(move |d| (a, d))).collect();
    let index: BTreeMap<(usize, usize), usize> = slots.iter().enumerate().map(|(i, &(a, d))| ((a.0, d), i)).collect();
    let orders: Vec<Vec<usize>> = slots
        .iter()
        .map(|&(a, _)| {
            let mut v: Vec<usize> = (0..omega.at(a).len()).collect();
            v.shuffle(rng);
            v
        })
        .collect();

    struct Ctx<'a> {
        cat: &'a FiniteCategory,
        x: &'a Presheaf,
        omega: &'a Omega,
        slots: Vec<(ObjId, usize)>,
        index: BTreeMap<(usize, usize), usize>,
        orders: Vec<Vec<usize>>,
    }

    fn assign(ctx: &Ctx, chosen: &mut [Option<usize>], slot: usize, value: usize) -> bool {
        let mut work = vec![(slot, value)];
        while let Some((i, v)) = work.pop() {
            match chosen[i] {
                Some(w) if w == v => continue,
                Some(_) => return false,
                None => chosen[i] = Some(v),
            }
            let (a, d) = ctx.slots[i];
            let s = ctx.omega.at(a).sieve(v);
            for &f in ctx.cat.into(a) {
                let b = ctx.cat.dom(f);
                let pulled = ctx.cat.pullback_sieve(s, f).unwrap();
                let j = ctx.index[&(b.0, ctx.x.apply(f, d))];
                work.push((j, ctx.omega.at(b).index_of(&pulled).unwrap()));
            }
        }
        true
    }

    fn go(ctx: &Ctx, chosen: Vec<Option<usize>>, budget: &mut usize) -> Option<Vec<Option<usize>>> {
        let Some(i) = chosen.iter().position(Option::is_none) else { return Some(chosen) };
        for &v in &ctx.orders[i] {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let mut next = chosen.clone();
            if assign(ctx, &mut next, i, v) {
                if let Some(done) = go(ctx, next, budget) {
                    return Some(done);
                }
            }
        }
        None
    }

    let ctx = Ctx { cat, x, omega, slots, index, orders };
    let mut budget = 100_000usize;
    let chosen = go(&ctx, vec![None; ctx.slots.len()], &mut budget)?;
    let components =
        cat.objects().map(|a| (0..x.size(a)).map(|d| chosen[ctx.index[&(a.0, d)]].unwrap()).collect()).collect();
    Some(NaturalTransformation::new(x.clone(), omega.presheaf().clone(), components).unwrap())
}

/// A presheaf with each `G(A)` ordered as the chain of its indices.
pub fn chain_propositions(x: Presheaf) -> Arc<PropositionPresheaf> {
    let leq = x.base().objects().map(|a| (0..x.size(a)).map(|d| (0..x.size(a)).map(|e| d <= e).collect()).collect()).collect();
    Arc::new(PropositionPresheaf::new(x, leq).unwrap())
}

/// A random truth set closed under weakening.
pub fn closed_truth_set(rng: &mut ChaCha8Rng, g: &PropositionPresheaf) -> Vec<Vec<bool>> {
    let cat = g.base();
    let mut t: Vec<Vec<bool>> = cat.objects().map(|a| (0..g.size(a)).map(|_| rng.gen_bool(0.3)).collect()).collect();
    loop {
        let mut changed = false;
        for f in cat.morphisms() {
            let (b, a) = (cat.dom(f), cat.cod(f));
            for d in 0..g.size(a) {
                let w = g.weaken(f, d);
                if t[a.0][d] && !t[b.0][w] {
                    t[b.0][w] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return t;
        }
    }
}

// ---------------------------------------------------------------- quantum

/// `Q = (I - K)(I + K)⁻¹` for a random integer skew-symmetric `K`: a
/// rational orthogonal matrix. Returns its columns.
pub fn cayley_basis(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<Q>> {
    let mut k = Matrix::<Q>::zeros(dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let v = rng.gen_range(-2i64..=2);
            k.set(i, j, gq(int(v)));
            k.set(j, i, gq(int(-v)));
        }
    }
    let id = Matrix::<Q>::identity(dim);
    let inv = id.add(&k).inverse(0.0).expect("I + K is invertible for skew-symmetric K");
    let q = id.sub(&k).mul(&inv);
    (0..dim).map(|c| (0..dim).map(|r| q.get(r, c).clone()).collect()).collect()
}

/// An operator diagonal in `basis` with eigenvalue `values[i]` on column `i`.
pub fn operator_in_basis(name: &str, basis: &[Vec<Q>], values: &[i64]) -> SpectralOperator<Q> {
    let mut distinct: Vec<i64> = values.to_vec();
    distinct.sort();
    distinct.dedup();
    let dim = basis.len();
    let projectors = distinct
        .iter()
        .map(|&v| {
            basis
                .iter()
                .zip(values)
                .filter(|(_, &x)| x == v)
                .fold(Matrix::zeros(dim), |acc, (u, _)| acc.add(&Matrix::projector_onto(u)))
        })
        .collect();
    SpectralOperator::new(name, distinct.iter().map(|&v| int(v)).collect(), projectors, 0.0).unwrap()
}

pub struct RandomQuantum {
    pub cat: OperatorCategory<Q>,
    pub bases: Vec<Vec<Vec<Q>>>,
}

/// Up to `max_ops` operators on `C^dim` (dim ≤ `max_dim`) diagonal in one
/// or two Cayley bases, with eigenvalues drawn from a small range so that
/// functional relations are common.
pub fn random_operator_category(rng: &mut ChaCha8Rng, max_dim: usize, max_ops: usize) -> RandomQuantum {
    let dim = rng.gen_range(1..=max_dim);
    let bases: Vec<Vec<Vec<Q>>> = (0..rng.gen_range(1..=2)).map(|_| cayley_basis(rng, dim)).collect();
    let count = rng.gen_range(1..=max_ops);
    let ops: Vec<SpectralOperator<Q>> = (0..count)
        .map(|i| {
            let basis = bases.choose(rng).unwrap();
            let values: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=2)).collect();
            operator_in_basis(&format!("O{i}"), basis, &values)
        })
        .collect();
    let options = BuildOptions { epsilon: 0.0, ..BuildOptions::default() };
    RandomQuantum { cat: OperatorCategory::build(ops, &options).unwrap(), bases }
}

/// A basis vector, a sum of two basis vectors, or a random integer vector.
pub fn random_state(rng: &mut ChaCha8Rng, rq: &RandomQuantum) -> StateVector<Q> {
    let basis = rq.bases.choose(rng).unwrap();
    let dim = basis.len();
    let v: Vec<Q> = match rng.gen_range(0..3) {
        0 => basis.choose(rng).unwrap().clone(),
        1 => {
            let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
            if i == j {
                basis[i].clone()
            } else {
                basis[i].iter().zip(&basis[j]).map(|(a, b)| a.add(b)).collect()
            }
        }
        _ => loop {
            let v: Vec<Q> = (0..dim).map(|_| gq(int(rng.gen_range(-2..=2)))).collect();
            if v.iter().any(|x| !x.is_zero_within(0.0)) {
                break v;
            }
        },
    };
    StateVector::ray(v, 0.0).unwrap()
}

/// A convex mixture of one to three random pure states.
pub fn random_density(rng: &mut ChaCha8Rng, rq: &RandomQuantum) -> DensityMatrix<Q> {
    let k = rng.gen_range(1..=3);
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
    let total: i64 = weights.iter().sum();
    let dim = rq.cat.dim();
    let mut m = Matrix::<Q>::zeros(dim);
    for &w in &weights {
        let psi = random_state(rng, rq);
        m = m.add(&DensityMatrix::pure(&psi).matrix().scale(&gq(rat(w, total))));
    }
    DensityMatrix::new(m, 0.0).unwrap()
}

/// A value at one object propagated to every coarse-graining of it.
pub fn random_partial_valuation(rng: &mut ChaCha8Rng, q: &toposval::quantity::QuantityCategory) -> PartialValuation {
    let cat = q.category();
    let a = ObjId(rng.gen_range(0..cat.object_count()));
    let x = rng.gen_range(0..q.values(a).len());
    let mut values = vec![None; cat.object_count()];
    for &f in cat.into(a) {
        values[cat.dom(f).0] = Some(q.func(f)[x]);
    }
    PartialValuation::new(values)
}

/// Every consistent partial valuation of a small quantity category.
pub fn all_partial_valuations(q: &toposval::quantity::QuantityCategory) -> Vec<PartialValuation> {
    let cat = q.category();
    let n = cat.object_count();
    let mut out = Vec::new();
    let mut current: Vec<Option<usize>> = vec![None; n];
    fn go(i: usize, q: &toposval::quantity::QuantityCategory, current: &mut Vec<Option<usize>>, out: &mut Vec<PartialValuation>) {
        if i == current.len() {
            let v = PartialValuation::new(current.clone());
            if v.check(q).is_empty() {
                out.push(v);
            }
            return;
        }
        current[i] = None;
        go(i + 1, q, current, out);
        for x in 0..q.values(ObjId(i)).len() {
            current[i] = Some(x);
            go(i + 1, q, current, out);
        }
        current[i] = None;
    }
    go(0, q, &mut current, &mut out);
    out
}

// -------------------------------------------------------------- classical

pub struct RandomClassical {
    pub cat: FunctionCategory,
    pub values: Vec<Vec<Rational>>,
}

pub fn random_classical(rng: &mut ChaCha8Rng, max_states: usize, max_quantities: usize) -> RandomClassical {
    let n = rng.gen_range(1..=max_states);
    let space = StateSpace::new((0..n).map(|i| format!("s{i}"))).unwrap();
    let k = rng.gen_range(1..=max_quantities);
    let values: Vec<Vec<Rational>> = (0..k)
        .map(|_| {
            let range = rng.gen_range(1..=3);
            (0..n).map(|_| rat(rng.gen_range(0..range), rng.gen_range(1..=2))).collect()
        })
        .collect();
    let quantities = values.iter().enumerate().map(|(i, v)| ClassicalQuantity::new(format!("Q{i}"), v.clone())).collect();
    let cat = build_function_category(space, quantities, &BTreeMap::new()).unwrap();
    RandomClassical { cat, values }
}

pub fn random_macrostate(rng: &mut ChaCha8Rng, n: usize) -> Macrostate {
    loop {
        let region: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        if region.iter().any(|&b| b) {
            return Macrostate::new(region).unwrap();
        }
    }
}

pub fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> ClassicalMeasure {
    loop {
        let w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..=3) }).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return ClassicalMeasure::new(w.iter().map(|&x| rat(x, total)).collect()).unwrap();
        }
    }
}
