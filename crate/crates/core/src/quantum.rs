//! Quantum backend: operators with finite spectra on a finite-dimensional
//! Hilbert space, the category of their functional relations, and the
//! valuations induced by partial valuations and by states.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{malformed, Error, Result};
use crate::fincat::{FiniteCategory, ObjId};
use crate::genval::{ComparisonFunctor, GeneralisedValuation, PropositionPresheaf};
use crate::linalg::{inner, vectors_approx_eq, Complex64, Matrix, Scalar};
use crate::presheaf::{Presheaf, SearchStats, Section, SectionSearch};
use crate::quantity::{nu_from_partial_valuation, PartialValuation, QuantityCategory};
use crate::report::Report;

pub const DEFAULT_EPSILON: f64 = 1e-9;

/// A self-adjoint operator in spectral form: distinct eigenvalues in
/// increasing order with one projector each.
#[derive(Clone, Debug)]
pub struct SpectralOperator<S: Scalar> {
    name: String,
    eigenvalues: Vec<S::Real>,
    projectors: Vec<Matrix<S>>,
}

impl<S: Scalar> SpectralOperator<S> {
    /// Validates the spectral data: increasing eigenvalues, and nonzero
    /// projectors that are idempotent, self-adjoint, mutually orthogonal and
    /// sum to the identity.
    pub fn new(name: impl Into<String>, eigenvalues: Vec<S::Real>, projectors: Vec<Matrix<S>>, eps: f64) -> Result<Self> {
        let name = name.into();
        if eigenvalues.is_empty() || eigenvalues.len() != projectors.len() {
            return Err(malformed(format!("`{name}`: one projector per eigenvalue is required")));
        }
        if eigenvalues.windows(2).any(|w| w[0] >= w[1] || S::real_approx_eq(&w[0], &w[1], eps)) {
            return Err(malformed(format!("`{name}`: eigenvalues must be distinct and increasing")));
        }
        let dim = projectors[0].dim();
        if projectors.iter().any(|p| p.dim() != dim) {
            return Err(malformed(format!("`{name}`: projectors of different dimensions")));
        }
        let mut sum = Matrix::zeros(dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.is_zero(eps) {
                return Err(malformed(format!("`{name}`: projector {i} is zero")));
            }
            if !p.is_self_adjoint(eps) || !p.mul(p).approx_eq(p, eps) {
                return Err(malformed(format!("`{name}`: projector {i} is not an orthogonal projector")));
            }
            for q in &projectors[i + 1..] {
                if !p.mul(q).is_zero(eps) {
                    return Err(malformed(format!("`{name}`: projectors are not mutually orthogonal")));
                }
            }
            sum = sum.add(p);
        }
        if !sum.approx_eq(&Matrix::identity(dim), eps) {
            return Err(malformed(format!("`{name}`: projectors do not sum to the identity")));
        }
        Ok(SpectralOperator { name, eigenvalues, projectors })
    }

    /// `Σ_i values[i] · P_i` for a partition of the identity into
    /// projectors with possibly repeated values; equal values are merged.
    pub fn from_projector_values(
        name: impl Into<String>,
        parts: Vec<(S::Real, Matrix<S>)>,
        eps: f64,
    ) -> Result<Self> {
        let mut merged: Vec<(S::Real, Matrix<S>)> = Vec::new();
        for (v, p) in parts {
            match merged.iter_mut().find(|(w, _)| S::real_approx_eq(w, &v, eps)) {
                Some((_, q)) => *q = q.add(&p),
                None => merged.push((v, p)),
            }
        }
        merged.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable eigenvalues"));
        let (eigs, projs) = merged.into_iter().unzip();
        SpectralOperator::new(name, eigs, projs, eps)
    }

    /// `diag(values)` in spectral form.
    pub fn diagonal(name: impl Into<String>, values: &[S::Real], eps: f64) -> Result<Self> {
        let n = values.len();
        let parts = values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut p = Matrix::zeros(n);
                p.set(i, i, S::one());
                (v.clone(), p)
            })
            .collect();
        SpectralOperator::from_projector_values(name, parts, eps)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn eigenvalues(&self) -> &[S::Real] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[Matrix<S>] {
        &self.projectors
    }

    pub fn eigenvalue_labels(&self) -> Vec<String> {
        self.eigenvalues.iter().map(S::real_label).collect()
    }

    pub fn eigen_index(&self, value: &S::Real, eps: f64) -> Option<usize> {
        self.eigenvalues.iter().position(|e| S::real_approx_eq(e, value, eps))
    }

    /// `Σ λ P_λ`.
    pub fn matrix(&self) -> Matrix<S> {
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(Matrix::zeros(self.dim()), |acc, (l, p)| acc.add(&p.scale(&S::from_real(l))))
    }

    /// `Ê[A ∈ Δ]` for `Δ` given as a mask over the eigenvalue list.
    pub fn spectral_projector(&self, delta: u32) -> Matrix<S> {
        self.projectors
            .iter()
            .enumerate()
            .filter(|(i, _)| delta & (1 << i) != 0)
            .fold(Matrix::zeros(self.dim()), |acc, (_, p)| acc.add(p))
    }

    /// Multiple of the identity.
    pub fn is_unit_multiple(&self) -> bool {
        self.eigenvalues.len() == 1
    }
}

/// Diagonalises a Hermitian matrix numerically.
///
/// Sorted eigenvalues closer than `eps` are merged into one cluster. A
/// cluster whose overall spread exceeds `eps` (a chain of near-equal values)
/// is rejected as ill-conditioned, as is a decomposition that fails to
/// reproduce the input within `eps`.
pub fn spectral_decompose(name: &str, matrix: &Matrix<Complex64>, eps: f64) -> Result<SpectralOperator<Complex64>> {
    if !matrix.is_self_adjoint(eps) {
        return Err(malformed(format!("`{name}` is not self-adjoint")));
    }
    let n = matrix.dim();
    let m = DMatrix::from_fn(n, n, |i, j| *matrix.get(i, j));
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(c) if (eig.eigenvalues[i] - eig.eigenvalues[*c.last().unwrap()]).abs() <= eps => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    for c in &clusters {
        let lo = eig.eigenvalues[c[0]];
        let hi = eig.eigenvalues[*c.last().unwrap()];
        if hi - lo > eps {
            return Err(Error::IllConditioned(format!(
                "`{name}`: eigenvalues {lo}..{hi} chain together within tolerance {eps}"
            )));
        }
        let mean = c.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / c.len() as f64;
        let mut p = Matrix::zeros(n);
        for &k in c {
            let v: Vec<Complex64> = (0..n).map(|i| eig.eigenvectors[(i, k)]).collect();
            p = p.add(&Matrix::projector_onto(&v));
        }
        eigenvalues.push(mean);
        projectors.push(p);
    }
    let op = SpectralOperator { name: name.to_owned(), eigenvalues, projectors };
    if !op.matrix().approx_eq(matrix, eps.max(1e-12) * 10.0) {
        return Err(Error::IllConditioned(format!("`{name}`: decomposition does not reproduce the matrix")));
    }
    SpectralOperator::new(op.name, op.eigenvalues, op.projectors, eps * 10.0)
}

/// The function `f: σ(A) → σ(B)` with `B = f(A)`, if one exists.
///
/// For every eigenprojector `P_λ` of `A`, the compression `P_λ B P_λ` must
/// equal `μ P_λ` for an eigenvalue `μ` of `B`; then `f(λ) = μ`, and
/// `Σ f(λ) P_λ` must reproduce `B`.
pub fn detect_morphism<S: Scalar>(b: &SpectralOperator<S>, a: &SpectralOperator<S>, eps: f64) -> Result<Option<Vec<usize>>> {
    if a.dim() != b.dim() {
        return Err(malformed(format!("`{}` and `{}` act on different spaces", b.name, a.name)));
    }
    let bm = b.matrix();
    let mut f = Vec::with_capacity(a.eigenvalues.len());
    for p in &a.projectors {
        let compressed = p.mul(&bm).mul(p);
        let mu = compressed.trace().div(&p.trace());
        if !S::real_approx_eq(&mu.im(), &S::zero().im(), eps) {
            return Ok(None);
        }
        let Some(j) = b.eigen_index(&mu.re(), eps) else { return Ok(None) };
        if !compressed.approx_eq(&p.scale(&S::from_real(&b.eigenvalues[j])), eps) {
            return Ok(None);
        }
        f.push(j);
    }
    let rebuilt = a
        .projectors
        .iter()
        .zip(&f)
        .fold(Matrix::zeros(a.dim()), |acc, (p, &j)| acc.add(&p.scale(&S::from_real(&b.eigenvalues[j]))));
    Ok(rebuilt.approx_eq(&bm, eps).then_some(f))
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub epsilon: f64,
    /// Drop multiples of the identity before building.
    pub strip_units: bool,
    /// Labels for morphisms keyed by `(domain, codomain)` operator names.
    /// Unlisted morphisms are labelled `B->A`; identities `id_A`.
    pub labels: BTreeMap<(String, String), String>,
    /// Keep only these `(domain, codomain)` relations. Each must still be
    /// detected; the result is a subcategory of the full operator category.
    pub restrict: Option<BTreeSet<(String, String)>>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { epsilon: DEFAULT_EPSILON, strip_units: false, labels: BTreeMap::new(), restrict: None }
    }
}

impl BuildOptions {
    pub fn label(mut self, dom: &str, cod: &str, label: &str) -> Self {
        self.labels.insert((dom.to_owned(), cod.to_owned()), label.to_owned());
        self
    }

    pub fn only(mut self, dom: &str, cod: &str) -> Self {
        self.restrict.get_or_insert_with(BTreeSet::new).insert((dom.to_owned(), cod.to_owned()));
        self
    }
}

/// The thin category whose morphisms `B → A` witness `B = f(A)`.
#[derive(Clone, Debug)]
pub struct OperatorCategory<S: Scalar> {
    operators: Vec<SpectralOperator<S>>,
    quantities: QuantityCategory,
    epsilon: f64,
    warnings: Vec<String>,
}

impl<S: Scalar> OperatorCategory<S> {
    pub fn build(ops: Vec<SpectralOperator<S>>, options: &BuildOptions) -> Result<Self> {
        let eps = options.epsilon;
        let ops: Vec<SpectralOperator<S>> =
            ops.into_iter().filter(|o| !(options.strip_units && o.is_unit_multiple())).collect();
        if ops.is_empty() {
            return Err(malformed("no operators"));
        }
        let dim = ops[0].dim();
        if ops.iter().any(|o| o.dim() != dim) {
            return Err(malformed("operators act on spaces of different dimension"));
        }
        for (i, o) in ops.iter().enumerate() {
            if ops[..i].iter().any(|p| p.name == o.name) {
                return Err(malformed(format!("duplicate operator name `{}`", o.name)));
            }
        }
        let mut warnings = Vec::new();
        // (dom, cod) -> (label, function σ(cod) → σ(dom))
        let mut arrows: BTreeMap<(usize, usize), (String, Vec<usize>)> = BTreeMap::new();
        for (ai, a) in ops.iter().enumerate() {
            for (bi, b) in ops.iter().enumerate() {
                if ai == bi {
                    continue;
                }
                let key = (b.name.clone(), a.name.clone());
                let wanted = options.restrict.as_ref().is_none_or(|r| r.contains(&key));
                if !wanted {
                    continue;
                }
                if let Some(f) = detect_morphism(b, a, eps)? {
                    let label = options
                        .labels
                        .get(&(b.name.clone(), a.name.clone()))
                        .cloned()
                        .unwrap_or_else(|| format!("{}->{}", b.name, a.name));
                    arrows.insert((bi, ai), (label, f));
                }
            }
        }
        if let Some(r) = &options.restrict {
            for (b, a) in r {
                let found = arrows.keys().any(|&(bi, ai)| &ops[bi].name == b && &ops[ai].name == a);
                if !found {
                    return Err(malformed(format!("`{b}` is not a function of `{a}`")));
                }
            }
        }
        for &(bi, ai) in arrows.keys() {
            if bi < ai && arrows.contains_key(&(ai, bi)) {
                warnings.push(format!(
                    "`{}` and `{}` are functions of each other; they stay distinct objects",
                    ops[bi].name, ops[ai].name
                ));
            }
        }
        let names: Vec<String> = ops.iter().map(|o| o.name.clone()).collect();
        let values = ops.iter().map(|o| o.eigenvalue_labels()).collect();
        let quantities = QuantityCategory::from_relations(&names, values, &arrows)?;
        Ok(OperatorCategory { operators: ops, quantities, epsilon: eps, warnings })
    }

    pub fn category(&self) -> &FiniteCategory {
        self.quantities.category()
    }

    pub fn quantities(&self) -> &QuantityCategory {
        &self.quantities
    }

    pub fn operators(&self) -> &[SpectralOperator<S>] {
        &self.operators
    }

    pub fn operator(&self, a: ObjId) -> &SpectralOperator<S> {
        &self.operators[a.0]
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn object(&self, name: &str) -> Result<ObjId> {
        self.category().object_by_label(name)
    }

    /// The proposition `A ∈ Δ` as `(object, mask)`; values are matched
    /// exactly in exact mode and within ε otherwise.
    pub fn proposition(&self, name: &str, delta: &[S::Real]) -> Result<(ObjId, u32)> {
        let a = self.object(name)?;
        let op = self.operator(a);
        let mut mask = 0u32;
        for v in delta {
            let i = op
                .eigen_index(v, self.epsilon)
                .ok_or_else(|| malformed(format!("{v:?} is not an eigenvalue of `{name}`")))?;
            mask |= 1 << i;
        }
        Ok((a, mask))
    }

    /// `Σ(A) = σ(A)`, `Σ(f)(λ) = f(λ)`.
    pub fn spectral_presheaf(&self) -> Presheaf {
        self.quantities.value_presheaf()
    }

    pub fn coarse_graining_presheaf(&self) -> (Arc<PropositionPresheaf>, ComparisonFunctor) {
        self.quantities.coarse_graining()
    }

    /// Reads a partial valuation from `(operator name, eigenvalue)` pairs.
    pub fn partial_valuation(&self, values: &[(&str, S::Real)]) -> Result<PartialValuation> {
        let mut out = vec![None; self.category().object_count()];
        for (name, v) in values {
            let a = self.object(name)?;
            let i = self
                .operator(a)
                .eigen_index(v, self.epsilon)
                .ok_or_else(|| malformed(format!("{v:?} is not an eigenvalue of `{name}`")))?;
            out[a.0] = Some(i);
        }
        Ok(PartialValuation::new(out))
    }

    /// `ν^V(A ∈ Δ) = { f: B → A | B ∈ dom V, V(B) ∈ f(Δ) }`.
    pub fn nu_from_partial_valuation(&self, g: &Arc<PropositionPresheaf>, v: &PartialValuation) -> Result<GeneralisedValuation> {
        nu_from_partial_valuation(&self.quantities, g, v)
    }

    /// `ν^ψ(A ∈ Δ) = { f: B → A | Ê[B ∈ f(Δ)]ψ = ψ }`.
    pub fn nu_psi(&self, g: &Arc<PropositionPresheaf>, psi: &StateVector<S>) -> Result<GeneralisedValuation> {
        self.check_dim(psi.dim())?;
        let eps = self.epsilon;
        let fixed = self.truth_table(|op, lambda| {
            let e = op.spectral_projector(lambda);
            vectors_approx_eq(&e.apply(&psi.components), &psi.components, eps)
        });
        Ok(self.quantities.valuation_by_weakening(g, |b, lambda| fixed[b.0][lambda as usize]))
    }

    /// `ν^ρ(A ∈ Δ) = { f: B → A | tr(ρ Ê[B ∈ f(Δ)]) = 1 }`.
    pub fn nu_rho(&self, g: &Arc<PropositionPresheaf>, rho: &DensityMatrix<S>) -> Result<GeneralisedValuation> {
        self.check_dim(rho.matrix.dim())?;
        let eps = self.epsilon;
        let certain = self.truth_table(|op, lambda| {
            let t = rho.matrix.mul(&op.spectral_projector(lambda)).trace();
            t.approx_eq(&S::one(), eps)
        });
        Ok(self.quantities.valuation_by_weakening(g, |b, lambda| certain[b.0][lambda as usize]))
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(malformed(format!("state of dimension {dim} on a {}-dimensional space", self.dim())));
        }
        Ok(())
    }

    /// Evaluates `test(B, Λ)` once per operator and value subset.
    fn truth_table(&self, test: impl Fn(&SpectralOperator<S>, u32) -> bool) -> Vec<Vec<bool>> {
        self.category()
            .objects()
            .map(|b| {
                let op = self.operator(b);
                (0..=self.quantities.full_mask(b)).map(|lambda| test(op, lambda)).collect()
            })
            .collect()
    }

    /// Global sections of the spectral presheaf, or a certificate that the
    /// exhaustive search found none.
    pub fn ks_section_search(&self) -> KsOutcome {
        let sigma = self.spectral_presheaf();
        let mut search = SectionSearch::new(&sigma);
        match search.first() {
            Some(s) => KsOutcome::Section(s),
            None => KsOutcome::Exhausted(search.stats()),
        }
    }
}

/// Answer of the Kochen-Specker section search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KsOutcome {
    Section(Section),
    Exhausted(SearchStats),
}

impl KsOutcome {
    pub fn is_exhausted(&self) -> bool {
        matches!(self, KsOutcome::Exhausted(_))
    }
}

/// A pure state. Built with [`StateVector::new`] the vector has unit norm;
/// [`StateVector::ray`] accepts any nonzero representative of the ray,
/// which is all the eigenvector test `Êψ = ψ` depends on.
#[derive(Clone, Debug)]
pub struct StateVector<S: Scalar> {
    components: Vec<S>,
}

impl<S: Scalar> StateVector<S> {
    pub fn new(components: Vec<S>, eps: f64) -> Result<Self> {
        let norm = inner(&components, &components);
        if !norm.approx_eq(&S::one(), eps) {
            return Err(malformed(format!("state vector is not normalised (squared norm {norm:?})")));
        }
        Ok(StateVector { components })
    }

    pub fn ray(components: Vec<S>, eps: f64) -> Result<Self> {
        if inner(&components, &components).is_zero_within(eps) {
            return Err(malformed("zero vector does not represent a state"));
        }
        Ok(StateVector { components })
    }

    pub fn components(&self) -> &[S] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// A mixed state: self-adjoint, positive semidefinite, unit trace.
#[derive(Clone, Debug)]
pub struct DensityMatrix<S: Scalar> {
    matrix: Matrix<S>,
}

impl<S: Scalar> DensityMatrix<S> {
    pub fn new(matrix: Matrix<S>, eps: f64) -> Result<Self> {
        if !matrix.is_self_adjoint(eps) {
            return Err(malformed("density matrix is not self-adjoint"));
        }
        if !matrix.trace().approx_eq(&S::one(), eps) {
            return Err(malformed("density matrix does not have unit trace"));
        }
        if !is_positive_semidefinite(&matrix, eps) {
            return Err(malformed("density matrix is not positive semidefinite"));
        }
        Ok(DensityMatrix { matrix })
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(psi: &StateVector<S>) -> Self {
        DensityMatrix { matrix: Matrix::projector_onto(&psi.components) }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }
}

/// Every principal minor is nonnegative (exact), or every eigenvalue is at
/// least `-eps` (numeric).
fn is_positive_semidefinite<S: Scalar>(m: &Matrix<S>, eps: f64) -> bool {
    let n = m.dim();
    if S::EXACT {
        (1u32..(1 << n)).all(|subset| {
            let idx: Vec<usize> = (0..n).filter(|i| subset & (1 << i) != 0).collect();
            let det = determinant(&idx, m);
            det.im() == S::zero().im() && det.re() >= S::zero().re()
        })
    } else {
        let d = DMatrix::from_fn(n, n, |i, j| {
            let x = m.get(i, j);
            Complex64::new(S::real_to_f64(&x.re()), S::real_to_f64(&x.im()))
        });
        d.symmetric_eigenvalues().iter().all(|&l| l >= -eps)
    }
}

/// Determinant of the principal submatrix on `idx` by exact elimination.
fn determinant<S: Scalar>(idx: &[usize], m: &Matrix<S>) -> S {
    let k = idx.len();
    let mut a: Vec<Vec<S>> = idx.iter().map(|&i| idx.iter().map(|&j| m.get(i, j).clone()).collect()).collect();
    let mut det = S::one();
    for col in 0..k {
        let Some(p) = (col..k).find(|&r| !a[r][col].is_zero_within(0.0)) else { return S::zero() };
        if p != col {
            a.swap(p, col);
            det = S::zero().sub(&det);
        }
        let pivot = a[col][col].clone();
        det = det.mul(&pivot);
        for r in col + 1..k {
            let factor = a[r][col].div(&pivot);
            for c in col..k {
                let d = factor.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&d);
            }
        }
    }
    det
}

/// Operators for a Kochen-Specker test: for every basis a nondegenerate
/// operator `B<i>` with eigenvalue `k` on the `k`-th vector (1-based), the
/// rank-one projector `P<j>` of every distinct ray, and the unit `I`.
///
/// Every basis must consist of `dim` pairwise orthogonal nonzero vectors.
pub fn ks_operators<S: Scalar>(dim: usize, bases: &[Vec<Vec<S>>], eps: f64) -> Result<Vec<SpectralOperator<S>>> {
    let mut rays: Vec<Matrix<S>> = Vec::new();
    let mut ops = Vec::new();
    let mut basis_ops = Vec::new();
    for (bi, basis) in bases.iter().enumerate() {
        if basis.len() != dim || basis.iter().any(|v| v.len() != dim) {
            return Err(malformed(format!("basis {} does not have {dim} vectors of length {dim}", bi + 1)));
        }
        for (i, u) in basis.iter().enumerate() {
            if inner(u, u).is_zero_within(eps) {
                return Err(malformed(format!("basis {} contains a zero vector", bi + 1)));
            }
            for v in &basis[i + 1..] {
                if !inner(u, v).is_zero_within(eps) {
                    return Err(malformed(format!("basis {} is not orthogonal", bi + 1)));
                }
            }
        }
        let projectors: Vec<Matrix<S>> = basis.iter().map(|v| Matrix::projector_onto(v)).collect();
        for p in &projectors {
            if !rays.iter().any(|q| q.approx_eq(p, eps)) {
                rays.push(p.clone());
            }
        }
        let eigenvalues = (1..=dim).map(|k| S::real_from_rational(&crate::linalg::int(k as i64))).collect();
        basis_ops.push(SpectralOperator::new(format!("B{}", bi + 1), eigenvalues, projectors, eps)?);
    }
    ops.extend(basis_ops);
    let zero = S::real_from_rational(&crate::linalg::int(0));
    let one = S::real_from_rational(&crate::linalg::int(1));
    for (j, p) in rays.iter().enumerate() {
        let complement = Matrix::identity(dim).sub(p);
        ops.push(SpectralOperator::new(
            format!("P{}", j + 1),
            vec![zero.clone(), one.clone()],
            vec![complement, p.clone()],
            eps,
        )?);
    }
    ops.push(SpectralOperator::new("I", vec![one], vec![Matrix::identity(dim)], eps)?);
    Ok(ops)
}

/// Violations of the generalised-valuation properties relative to the
/// operator category's coarse-graining presheaf.
pub fn verify_generalised_valuation<S: Scalar>(cat: &OperatorCategory<S>, nu: &GeneralisedValuation) -> Report {
    let mut report = Report::new();
    let (g, _) = cat.coarse_graining_presheaf();
    let shape_ok = cat.category().objects().all(|a| g.size(a) == nu.over().size(a))
        && cat.category().object_count() == nu.base().object_count();
    if !shape_ok {
        report.push(
            crate::report::Violation::new("shape")
                .expected("valuation over this category's coarse-graining presheaf")
                .actual("different propositions"),
        );
        return report;
    }
    report.extend(nu.verify());
    report
}
