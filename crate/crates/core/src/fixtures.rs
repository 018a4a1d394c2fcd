//! Small categories, presheaves and physical systems shared by tests,
//! examples and scenario files.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::classical::{build_function_category, ClassicalQuantity, FunctionCategory, StateSpace};
use crate::fincat::{CategoryBuilder, FiniteCategory};
use crate::linalg::{gq, int, rat, GaussianRational, Matrix};
use crate::presheaf::Presheaf;
use crate::quantum::{ks_operators, BuildOptions, OperatorCategory, SpectralOperator};

/// `f: B → A`.
pub fn p2() -> FiniteCategory {
    CategoryBuilder::new()
        .object("A")
        .object("B")
        .morphism("f", "B", "A")
        .build()
        .expect("P2 is well formed")
}

/// `C --g--> B --f--> A` with `k = f∘g`.
pub fn p3() -> FiniteCategory {
    CategoryBuilder::new()
        .object("A")
        .object("B")
        .object("C")
        .morphism("f", "B", "A")
        .morphism("g", "C", "B")
        .morphism("k", "C", "A")
        .composite("g", "f", "k")
        .build()
        .expect("P3 is well formed")
}

/// Over P2: `X(A) = {x, y}`, `X(B) = {z}`.
pub fn x2() -> Presheaf {
    Presheaf::from_labels(
        Arc::new(p2()),
        &[("A", vec!["x", "y"]), ("B", vec!["z"])],
        &[("f", vec![("x", "z"), ("y", "z")])],
    )
    .expect("X2 is well formed")
}

/// The shape of Q3: `p: P → A`, `u: I → A`, `u': I → P`, `u = p∘u'`.
pub fn q3_category() -> FiniteCategory {
    CategoryBuilder::new()
        .object("A")
        .object("P")
        .object("I")
        .morphism("p", "P", "A")
        .morphism("u", "I", "A")
        .morphism("u'", "I", "P")
        .composite("u'", "p", "u")
        .build()
        .expect("Q3 is well formed")
}

fn q3_labels() -> BuildOptions {
    BuildOptions::default().label("P", "A", "p").label("I", "A", "u").label("I", "P", "u'")
}

fn q3_operators() -> Vec<SpectralOperator<GaussianRational>> {
    let eps = 0.0;
    vec![
        SpectralOperator::diagonal("A", &[int(1), int(2)], eps).unwrap(),
        SpectralOperator::diagonal("P", &[int(0), int(1)], eps).unwrap(),
        SpectralOperator::diagonal("I", &[int(1), int(1)], eps).unwrap(),
    ]
}

/// `A = diag(1, 2)`, `P = diag(0, 1)` and the unit on `C²`, exactly, with
/// the relations `P = f(A)`, `I = f(A)`, `I = f(P)`.
///
/// `A = P + 1` is also a function of `P`; that arrow is left out so the
/// category has the shape of [`q3_category`]. See [`q3_full`].
pub fn q3() -> OperatorCategory<GaussianRational> {
    let options = q3_labels().only("P", "A").only("I", "A").only("I", "P");
    OperatorCategory::build(q3_operators(), &options).expect("Q3 builds")
}

/// Q3's operators with every detected relation, including `A->P`.
pub fn q3_full() -> OperatorCategory<GaussianRational> {
    OperatorCategory::build(q3_operators(), &q3_labels()).expect("Q3 builds")
}

/// `Z = diag(1, -1)`, `X = [[0, 1], [1, 0]]`, `Π = (1 + X)/2` and the unit:
/// a two-dimensional family with non-commuting operators.
pub fn qubit() -> OperatorCategory<GaussianRational> {
    let eps = 0.0;
    let h = || gq(rat(1, 2));
    let plus = Matrix::from_rows(vec![vec![h(), h()], vec![h(), h()]]).unwrap();
    let minus = Matrix::identity(2).sub(&plus);
    let ops = vec![
        SpectralOperator::diagonal("Z", &[int(1), int(-1)], eps).unwrap(),
        SpectralOperator::new("X", vec![int(-1), int(1)], vec![minus.clone(), plus.clone()], eps).unwrap(),
        SpectralOperator::new("Pi", vec![int(0), int(1)], vec![minus, plus], eps).unwrap(),
        SpectralOperator::diagonal("I", &[int(1), int(1)], eps).unwrap(),
    ];
    OperatorCategory::build(ops, &BuildOptions::default()).expect("qubit family builds")
}

/// Cabello's 18 rays in `C⁴` grouped into 9 orthogonal bases; every ray
/// lies in exactly two bases.
pub fn ks18_bases() -> Vec<Vec<Vec<i64>>> {
    const BASES: [[[i64; 4]; 4]; 9] = [
        [[0, 0, 0, 1], [0, 0, 1, 0], [1, 1, 0, 0], [1, -1, 0, 0]],
        [[0, 0, 0, 1], [0, 1, 0, 0], [1, 0, 1, 0], [1, 0, -1, 0]],
        [[1, -1, 1, -1], [1, -1, -1, 1], [1, 1, 0, 0], [0, 0, 1, 1]],
        [[1, -1, 1, -1], [1, 1, 1, 1], [1, 0, -1, 0], [0, 1, 0, -1]],
        [[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 1], [1, 0, 0, -1]],
        [[1, -1, -1, 1], [1, 1, 1, 1], [1, 0, 0, -1], [0, 1, -1, 0]],
        [[1, 1, -1, 1], [1, 1, 1, -1], [1, -1, 0, 0], [0, 0, 1, 1]],
        [[1, 1, -1, 1], [-1, 1, 1, 1], [1, 0, 1, 0], [0, 1, 0, -1]],
        [[1, 1, 1, -1], [-1, 1, 1, 1], [1, 0, 0, 1], [0, 1, -1, 0]],
    ];
    BASES.iter().map(|b| b.iter().map(|v| v.to_vec()).collect()).collect()
}

pub fn ks18_operators() -> Vec<SpectralOperator<GaussianRational>> {
    let bases: Vec<Vec<Vec<GaussianRational>>> = ks18_bases()
        .into_iter()
        .map(|b| b.into_iter().map(|v| v.into_iter().map(|x| gq(int(x))).collect()).collect())
        .collect();
    ks_operators(4, &bases, 0.0).expect("the 18-ray set is orthogonal")
}

/// One operator per basis, the 18 ray projectors and the unit on `C⁴`.
pub fn ks18() -> OperatorCategory<GaussianRational> {
    OperatorCategory::build(ks18_operators(), &BuildOptions::default()).expect("KS family builds")
}

fn c3_labels() -> BTreeMap<(String, String), String> {
    [("B", "A", "b"), ("I", "A", "e"), ("I", "B", "e'")]
        .into_iter()
        .map(|(d, c, l)| ((d.to_owned(), c.to_owned()), l.to_owned()))
        .collect()
}

/// States `s1, s2, s3` with `A = (1, 2, 3)`, `B = (0, 0, 1)`, `I = (1, 1, 1)`.
pub fn c3() -> FunctionCategory {
    let space = StateSpace::new(["s1", "s2", "s3"]).unwrap();
    let q = |name: &str, v: [i64; 3]| ClassicalQuantity::new(name, v.iter().map(|&x| int(x)).collect());
    let quantities = vec![q("A", [1, 2, 3]), q("B", [0, 0, 1]), q("I", [1, 1, 1])];
    build_function_category(space, quantities, &c3_labels()).expect("C3 builds")
}

/// The diagonal images of C3's quantities on `C³`; `wrong_b` replaces
/// `B` by `diag(0, 1, 0)`.
pub fn c3_operators(wrong_b: bool) -> OperatorCategory<GaussianRational> {
    let b = if wrong_b { [0, 1, 0] } else { [0, 0, 1] };
    let d = |name: &str, v: [i64; 3]| SpectralOperator::diagonal(name, &v.map(int), 0.0).unwrap();
    let ops = vec![d("A", [1, 2, 3]), d("B", b), d("I", [1, 1, 1])];
    let labels = BuildOptions { labels: c3_labels(), ..BuildOptions::default() };
    OperatorCategory::build(ops, &labels).expect("C3 operators build")
}
