//! Small dense complex matrices over either exact Gaussian rationals or
//! `f64`, with tolerance-aware comparison.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type GaussianRational = Complex<BigRational>;
pub type Complex64 = Complex<f64>;

/// Scalar field used by the quantum backend.
///
/// Exact scalars ignore the tolerance argument of the comparison methods.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Real: Clone + Debug + PartialOrd + Send + Sync + 'static;

    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn conj(&self) -> Self;
    fn from_real(r: &Self::Real) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn approx_eq(&self, other: &Self, eps: f64) -> bool;

    fn real_from_rational(q: &Rational) -> Self::Real;
    fn real_approx_eq(a: &Self::Real, b: &Self::Real, eps: f64) -> bool;
    fn real_to_f64(r: &Self::Real) -> f64;
    fn real_label(r: &Self::Real) -> String;

    fn is_zero_within(&self, eps: f64) -> bool {
        self.approx_eq(&Self::zero(), eps)
    }
}

impl Scalar for GaussianRational {
    type Real = Rational;
    const EXACT: bool = true;

    fn zero() -> Self {
        Complex::new(Rational::zero(), Rational::zero())
    }
    fn one() -> Self {
        Complex::new(Rational::one(), Rational::zero())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn from_real(r: &Rational) -> Self {
        Complex::new(r.clone(), Rational::zero())
    }
    fn from_rational(q: &Rational) -> Self {
        Self::from_real(q)
    }
    fn re(&self) -> Rational {
        self.re.clone()
    }
    fn im(&self) -> Rational {
        self.im.clone()
    }
    fn approx_eq(&self, other: &Self, _eps: f64) -> bool {
        self == other
    }
    fn real_from_rational(q: &Rational) -> Rational {
        q.clone()
    }
    fn real_approx_eq(a: &Rational, b: &Rational, _eps: f64) -> bool {
        a == b
    }
    fn real_to_f64(r: &Rational) -> f64 {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn real_label(r: &Rational) -> String {
        rational_label(r)
    }
}

impl Scalar for Complex64 {
    type Real = f64;
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn from_real(r: &f64) -> Self {
        Complex::new(*r, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
    fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        (self - other).norm() <= eps
    }
    fn real_from_rational(q: &Rational) -> f64 {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn real_approx_eq(a: &f64, b: &f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }
    fn real_to_f64(r: &f64) -> f64 {
        *r
    }
    fn real_label(r: &f64) -> String {
        float_label(*r)
    }
}

/// `3`, `-1/2`.
pub fn rational_label(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Shortest decimal that survives rounding to nine places.
pub fn float_label(x: f64) -> String {
    let rounded = (x * 1e9).round() / 1e9;
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

/// Parses `"3"`, `"-1/2"` or `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Some(if negative { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Matrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(values: &[S]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = v.clone();
        }
        m
    }

    /// `v v† / ⟨v, v⟩`.
    pub fn projector_onto(v: &[S]) -> Self {
        let n = v.len();
        let norm = inner(v, v);
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = v[i].mul(&v[j].conj()).div(&norm);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Matrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        Matrix { n: self.n, data: self.data.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero_within(0.0) {
                    continue;
                }
                for j in 0..n {
                    let prod = a.mul(&other.data[k * n + j]);
                    out.data[i * n + j] = out.data[i * n + j].add(&prod);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc.add(&self.data[i * self.n + i]))
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).fold(S::zero(), |acc, j| acc.add(&self.data[i * n + j].mul(&v[j]))))
            .collect()
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.n == other.n && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, eps))
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.data.iter().all(|a| a.is_zero_within(eps))
    }

    pub fn is_self_adjoint(&self, eps: f64) -> bool {
        self.approx_eq(&self.adjoint(), eps)
    }

    /// Inverse by Gauss-Jordan elimination with largest-pivot selection in
    /// numeric mode and first-nonzero pivot in exact mode.
    pub fn inverse(&self, eps: f64) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = if S::EXACT {
                (col..n).find(|&r| !a.get(r, col).is_zero_within(0.0))
            } else {
                (col..n)
                    .filter(|&r| !a.get(r, col).is_zero_within(eps))
                    .max_by(|&r, &s| {
                        let x = S::real_to_f64(&a.get(r, col).mul(&a.get(r, col).conj()).re());
                        let y = S::real_to_f64(&a.get(s, col).mul(&a.get(s, col).conj()).re());
                        x.total_cmp(&y)
                    })
            }?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                a.data[col * n + j] = a.data[col * n + j].div(&p);
                inv.data[col * n + j] = inv.data[col * n + j].div(&p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero_within(0.0) {
                    continue;
                }
                for j in 0..n {
                    let da = a.data[col * n + j].mul(&factor);
                    let di = inv.data[col * n + j].mul(&factor);
                    a.data[r * n + j] = a.data[r * n + j].sub(&da);
                    inv.data[r * n + j] = inv.data[r * n + j].sub(&di);
                }
            }
        }
        Some(inv)
    }
}

/// `⟨u, v⟩ = Σ conj(u_i) v_i`.
pub fn inner<S: Scalar>(u: &[S], v: &[S]) -> S {
    u.iter().zip(v).fold(S::zero(), |acc, (a, b)| acc.add(&a.conj().mul(b)))
}

pub fn vectors_approx_eq<S: Scalar>(u: &[S], v: &[S], eps: f64) -> bool {
    u.len() == v.len() && u.iter().zip(v).all(|(a, b)| a.approx_eq(b, eps))
}

/// Exact rational entry helper for tests and fixtures.
pub fn gq(re: Rational) -> GaussianRational {
    Complex::new(re, Rational::zero())
}

/// Whether a rational is strictly positive.
pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}
