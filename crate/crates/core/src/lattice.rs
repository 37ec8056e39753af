//! Exact rational vectors, full-rank lattices with a rational metric, and
//! canonical points of the torus `R^n / Λ`.
//!
//! Nothing in this module touches floating point once a value has been
//! constructed: every coordinate is a `BigRational`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(value: f64) -> Result<Rational> {
    Rational::from_float(value).ok_or(Error::InvalidBound)
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// A point of `R^n` with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coordinates: Vec<Rational>) -> Self {
        Self(coordinates)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Rational::zero(); dim])
    }

    pub fn from_ratios(values: &[(i64, i64)]) -> Self {
        Self(values.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Self(values.iter().map(|&v| int(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coordinates(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector add");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector sub");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|a| -a).collect())
    }
}

/// Dense square rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Rational::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Rational::one();
        }
        Self { n, data }
    }

    pub fn from_integer_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.data[row * self.n + col]
    }

    pub fn column(&self, col: usize) -> RationalVector {
        RationalVector((0..self.n).map(|r| self.get(r, col).clone()).collect())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let data = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        Self { n, data }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Rational::zero();
                for k in 0..n {
                    acc += self.get(i, k) * rhs.get(k, j);
                }
                data.push(acc);
            }
        }
        Self { n, data }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| {
                let mut acc = Rational::zero();
                for (k, vk) in v.iter().enumerate() {
                    if !vk.is_zero() {
                        acc += self.get(i, k) * vk;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Determinant by fraction-exact Gaussian elimination.
    pub fn determinant(&self) -> Rational {
        let n = self.n;
        let mut m = self.data.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                for k in 0..n {
                    m.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = m[col * n + col].clone();
            det *= &p;
            for r in col + 1..n {
                let factor = &m[r * n + col] / &p;
                if factor.is_zero() {
                    continue;
                }
                for k in col..n {
                    let delta = &factor * &m[col * n + k];
                    m[r * n + k] -= delta;
                }
            }
        }
        det
    }

    /// Exact inverse, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                    inv.swap(pivot * n + k, col * n + k);
                }
            }
            let p = a[col * n + col].clone();
            for k in 0..n {
                a[col * n + k] = &a[col * n + k] / &p;
                inv[col * n + k] = &inv[col * n + k] / &p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r * n + col].clone();
                if factor.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let da = &factor * &a[col * n + k];
                    a[r * n + k] -= da;
                    let di = &factor * &inv[col * n + k];
                    inv[r * n + k] -= di;
                }
            }
        }
        Some(Self { n, data: inv })
    }

    /// Quadratic form `v^T M v`.
    pub fn quadratic_form(&self, v: &[Rational]) -> Rational {
        let mv = self.mul_vec(v);
        v.iter().zip(&mv).map(|(a, b)| a * b).sum()
    }

    /// Sylvester's criterion on the leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.n).all(|k| {
            let rows = (0..k)
                .map(|i| (0..k).map(|j| self.get(i, j).clone()).collect())
                .collect();
            let minor = Self::from_rows(rows).expect("square minor");
            minor.determinant().is_positive()
        })
    }
}

/// A full-rank lattice `Λ = B·Z^n` in `R^n` together with the inner product
/// `<u, v> = u^T G v` on ambient coordinates.
#[derive(Clone, Debug)]
pub struct Lattice {
    basis: RationalMatrix,
    gram: RationalMatrix,
    basis_inv: RationalMatrix,
    /// `B^T G B`, the metric in lattice coordinates.
    coord_gram: RationalMatrix,
    coord_gram_inv: RationalMatrix,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.gram == other.gram
    }
}

impl Eq for Lattice {}

impl Lattice {
    /// Builds a lattice from generator columns and a gram matrix.
    pub fn new(basis: RationalMatrix, gram: RationalMatrix) -> Result<Self> {
        if basis.dim() != gram.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: gram.dim(),
            });
        }
        if !gram.is_symmetric() || !gram.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let basis_inv = basis.inverse().ok_or(Error::SingularBasis)?;
        let coord_gram = basis.transpose().mul(&gram).mul(&basis);
        let coord_gram_inv = coord_gram.inverse().ok_or(Error::NotPositiveDefinite)?;
        Ok(Self {
            basis,
            gram,
            basis_inv,
            coord_gram,
            coord_gram_inv,
        })
    }

    /// `Z^n` with the euclidean metric.
    pub fn standard(n: usize) -> Self {
        Self::new(RationalMatrix::identity(n), RationalMatrix::identity(n))
            .expect("identity lattice")
    }

    pub fn with_basis(basis: RationalMatrix) -> Result<Self> {
        let n = basis.dim();
        Self::new(basis, RationalMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    /// Covolume `|det B|`.
    pub fn covolume(&self) -> Rational {
        self.basis.determinant().abs()
    }

    pub fn check_dim(&self, v: &RationalVector) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        Ok(())
    }

    /// Coordinates of `v` with respect to the basis (`B^{-1} v`).
    pub fn to_lattice_coords(&self, v: &RationalVector) -> Vec<Rational> {
        self.basis_inv.mul_vec(&v.0)
    }

    pub fn from_lattice_coords(&self, c: &[Rational]) -> RationalVector {
        RationalVector(self.basis.mul_vec(c))
    }

    /// Ambient vector of the lattice element with integer coefficients `k`.
    pub fn lattice_vector(&self, k: &[i64]) -> RationalVector {
        let c: Vec<Rational> = k.iter().map(|&v| int(v)).collect();
        self.from_lattice_coords(&c)
    }

    pub fn contains(&self, v: &RationalVector) -> bool {
        v.dim() == self.dim() && self.to_lattice_coords(v).iter().all(|c| c.is_integer())
    }
}

/// `v^T G v`, exact.
pub fn squared_norm(v: &RationalVector, lattice: &Lattice) -> Result<Rational> {
    lattice.check_dim(v)?;
    Ok(lattice.gram.quadratic_form(&v.0))
}

/// Fractional part in `[0, 1)`.
pub(crate) fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// A point of the torus `R^n / Λ`, stored as its canonical representative:
/// the unique lift whose lattice coordinates lie in `[0, 1)^n`.
#[derive(Clone, Debug)]
pub struct TorusPoint {
    rep: RationalVector,
    lattice: Arc<Lattice>,
}

impl PartialEq for TorusPoint {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep && same_lattice(&self.lattice, &other.lattice)
    }
}

impl Eq for TorusPoint {}

impl std::hash::Hash for TorusPoint {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rep.hash(state);
    }
}

impl PartialOrd for TorusPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TorusPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rep.cmp(&other.rep)
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

pub(crate) fn same_lattice(a: &Arc<Lattice>, b: &Arc<Lattice>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl TorusPoint {
    pub fn rep(&self) -> &RationalVector {
        &self.rep
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn lattice_coords(&self) -> Vec<Rational> {
        self.lattice.to_lattice_coords(&self.rep)
    }

    /// Builds the point whose lattice coordinates are `c` (reduced mod 1).
    pub fn from_lattice_coords(c: &[Rational], lattice: &Arc<Lattice>) -> Self {
        let reduced: Vec<Rational> = c.iter().map(frac).collect();
        Self {
            rep: lattice.from_lattice_coords(&reduced),
            lattice: Arc::clone(lattice),
        }
    }

    pub fn origin(lattice: &Arc<Lattice>) -> Self {
        Self {
            rep: RationalVector::zeros(lattice.dim()),
            lattice: Arc::clone(lattice),
        }
    }

    /// Translate by an ambient vector and reduce.
    pub fn translate(&self, v: &RationalVector) -> Result<Self> {
        reduce(&(&self.rep + v), &self.lattice)
    }
}

/// Projects `v` to the torus, returning its canonical representative.
pub fn reduce(v: &RationalVector, lattice: &Arc<Lattice>) -> Result<TorusPoint> {
    lattice.check_dim(v)?;
    Ok(TorusPoint::from_lattice_coords(
        &lattice.to_lattice_coords(v),
        lattice,
    ))
}

/// A positive finite radius, stored exactly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LengthBound(Rational);

impl LengthBound {
    pub fn new(value: Rational) -> Result<Self> {
        if !value.is_positive() {
            return Err(Error::InvalidBound);
        }
        Ok(Self(value))
    }

    /// Uses the exact dyadic value of the double.
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidBound);
        }
        Self::new(rational_from_f64(value)?)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn squared(&self) -> Rational {
        &self.0 * &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for LengthBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().bits() > 32 {
            write!(f, "{}", self.to_f64())
        } else {
            write!(f, "{}", format_rational(&self.0))
        }
    }
}

fn ceil_sqrt(value: &Rational) -> BigInt {
    let c = value.ceil().to_integer();
    if c.is_negative() {
        return BigInt::zero();
    }
    let s = c.sqrt();
    if &s * &s < c {
        s + 1
    } else {
        s
    }
}

/// All lattice vectors `z` with `|center + z|^2 <= R^2`, as integer
/// coefficient vectors in lexicographic order.
///
/// The search box comes from the exact bound
/// `|u_i|^2 <= R^2 (Q^{-1})_{ii}` on lattice coordinates of any `u` with
/// `u^T Q u <= R^2`.
pub fn lattice_ball(
    lattice: &Lattice,
    center: &RationalVector,
    radius: &LengthBound,
) -> Result<Vec<Vec<i64>>> {
    lattice.check_dim(center)?;
    let n = lattice.dim();
    let r2 = radius.squared();
    let c = lattice.to_lattice_coords(center);
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for (i, ci) in c.iter().enumerate() {
        let reach = Rational::from_integer(ceil_sqrt(&(&r2 * lattice.coord_gram_inv.get(i, i))));
        let l = (-ci - &reach).floor().to_integer();
        let h = (-ci + &reach).ceil().to_integer();
        let (Some(l), Some(h)) = (l.to_i64(), h.to_i64()) else {
            return Err(Error::InvalidInput("lattice ball radius too large".into()));
        };
        lo.push(l);
        hi.push(h);
    }
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let mut k = lo.clone();
    let mut u: Vec<Rational> = vec![Rational::zero(); n];
    loop {
        for i in 0..n {
            u[i] = &c[i] + int(k[i]);
        }
        if lattice.coord_gram.quadratic_form(&u) <= r2 {
            out.push(k.clone());
        }
        // odometer, last coordinate fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if k[i] < hi[i] {
                k[i] += 1;
                for j in i + 1..n {
                    k[j] = lo[j];
                }
                break;
            }
        }
    }
}
