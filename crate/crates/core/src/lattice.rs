//! Exact arithmetic substrate.
//!
//! Everything here works over `BigRational`: dense matrices, fully symmetric
//! 3-tensors (the cup-product ring of a 6-manifold in H_4 coordinates) and
//! univariate polynomials in a formal parameter ε. Determinants use Bareiss
//! elimination; signatures use symmetric congruence reduction, so no floating
//! point is involved anywhere.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare(what.into(), self.rows, self.cols))
        }
    }

    /// Exact determinant.
    ///
    /// Each row is scaled to integers by the lcm of its denominators, the
    /// resulting integer matrix goes through Bareiss fraction-free
    /// elimination, and the scale factors are divided back out.
    pub fn det(&self) -> Result<Rational> {
        self.require_square("det")?;
        let n = self.rows;
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let l = self
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            a.push(
                self.row(i)
                    .iter()
                    .map(|x| x.numer() * (&l / x.denom()))
                    .collect(),
            );
        }
        let d = bareiss(&mut a);
        Ok(Rational::new(d, scale))
    }

    /// Rank over Q by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.to_rows();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in rank + 1..self.rows {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &a[rank][col];
                for c in col..self.cols {
                    let delta = &f * &a[rank][c];
                    a[r][c] -= delta;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inertia `(positive, negative, zero)` of a symmetric matrix.
    ///
    /// Congruence reduction: a nonzero diagonal pivot is split off as a 1×1
    /// block; if the whole remaining diagonal vanishes but some off-diagonal
    /// entry `a_ij` does not, the basis change `e_i ↦ e_i + e_j` produces the
    /// diagonal entry `2·a_ij` and the reduction continues.
    pub fn signature(&self) -> Result<Signature> {
        self.require_square("signature")?;
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let mut a = self.to_rows();
        let mut sig = Signature::default();
        while !a.is_empty() {
            let n = a.len();
            let pivot = match (0..n).find(|&i| !a[i][i].is_zero()) {
                Some(p) => p,
                None => {
                    let Some((i, j)) = (0..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .find(|&(i, j)| !a[i][j].is_zero())
                    else {
                        sig.zero += n;
                        break;
                    };
                    for k in 0..n {
                        let v = a[j][k].clone();
                        a[i][k] += v;
                    }
                    for k in 0..n {
                        let v = a[k][j].clone();
                        a[k][i] += v;
                    }
                    i
                }
            };
            let p = a[pivot][pivot].clone();
            if p.is_positive() {
                sig.pos += 1;
            } else {
                sig.neg += 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&k| k != pivot).collect();
            let next: Vec<Vec<Rational>> = rest
                .iter()
                .map(|&r| {
                    rest.iter()
                        .map(|&c| &a[r][c] - &a[r][pivot] * &a[pivot][c] / &p)
                        .collect()
                })
                .collect();
            a = next;
        }
        Ok(sig)
    }
}

/// Bareiss elimination on an integer matrix, consuming it. Returns the determinant.
fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Inertia of a real symmetric form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Signature {
    pub fn new(pos: usize, neg: usize, zero: usize) -> Self {
        Self { pos, neg, zero }
    }
}

/// Entry of a [`SymTensor3`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Known(Rational),
    Unknown,
}

/// Fully symmetric 3-tensor; only sorted index triples are stored.
///
/// Entries may be marked unknown (products involving classes created by a
/// surgery). Any computation that would multiply an unknown entry by a
/// nonzero weight fails with [`Error::UnknownProducts`] instead of guessing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymTensor3 {
    dim: usize,
    entries: BTreeMap<[usize; 3], Rational>,
    unknown: BTreeSet<[usize; 3]>,
}

fn sorted(i: usize, j: usize, k: usize) -> [usize; 3] {
    let mut key = [i, j, k];
    key.sort_unstable();
    key
}

impl SymTensor3 {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
            unknown: BTreeSet::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_index(&self, i: usize, j: usize, k: usize) -> Result<()> {
        if i.max(j).max(k) >= self.dim {
            return Err(Error::Dimension(format!(
                "index ({i},{j},{k}) out of range for tensor of dim {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// Sets a known entry; a zero value clears it.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Rational) -> Result<()> {
        self.check_index(i, j, k)?;
        let key = sorted(i, j, k);
        self.unknown.remove(&key);
        if v.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, v);
        }
        Ok(())
    }

    pub fn set_unknown(&mut self, i: usize, j: usize, k: usize) -> Result<()> {
        self.check_index(i, j, k)?;
        let key = sorted(i, j, k);
        self.entries.remove(&key);
        self.unknown.insert(key);
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Entry {
        let key = sorted(i, j, k);
        if self.unknown.contains(&key) {
            return Entry::Unknown;
        }
        Entry::Known(self.entries.get(&key).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn has_unknowns(&self) -> bool {
        !self.unknown.is_empty()
    }

    pub fn unknown_entries(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.unknown.iter().copied()
    }

    /// Nonzero known entries, in sorted-key order.
    pub fn known_entries(&self) -> impl Iterator<Item = ([usize; 3], &Rational)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Copy of this tensor in a larger dimension; the new slots are zero.
    pub fn extended(&self, dim: usize) -> Self {
        assert!(dim >= self.dim);
        Self {
            dim,
            entries: self.entries.clone(),
            unknown: self.unknown.clone(),
        }
    }

    /// `M[i][j] = Σ_k t(i,j,k)·w[k]`.
    pub fn contract(&self, w: &[Rational]) -> Result<RatMatrix> {
        if w.len() != self.dim {
            return Err(Error::Dimension(format!(
                "weight vector of length {} against tensor of dim {}",
                w.len(),
                self.dim
            )));
        }
        let n = self.dim;
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Rational::zero();
                for (k, wk) in w.iter().enumerate() {
                    if wk.is_zero() {
                        continue;
                    }
                    match self.get(i, j, k) {
                        Entry::Known(v) => acc += v * wk,
                        Entry::Unknown => {
                            return Err(Error::UnknownProducts(sorted(i, j, k)));
                        }
                    }
                }
                m.set(i, j, acc.clone());
                m.set(j, i, acc);
            }
        }
        Ok(m)
    }

    /// Contraction against a vector of polynomials in ε.
    pub fn contract_poly(&self, w: &[UniPoly]) -> Result<PolyMatrix> {
        if w.len() != self.dim {
            return Err(Error::Dimension(format!(
                "weight vector of length {} against tensor of dim {}",
                w.len(),
                self.dim
            )));
        }
        let n = self.dim;
        let mut rows = vec![vec![UniPoly::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut acc = UniPoly::zero();
                for (k, wk) in w.iter().enumerate() {
                    if wk.is_zero() {
                        continue;
                    }
                    match self.get(i, j, k) {
                        Entry::Known(v) => acc = &acc + &wk.scale(&v),
                        Entry::Unknown => return Err(Error::UnknownProducts(sorted(i, j, k))),
                    }
                }
                rows[i][j] = acc.clone();
                rows[j][i] = acc;
            }
        }
        PolyMatrix::from_rows(rows)
    }

    /// The cubic form `t(x, x, x)`. Only entries on the support of `x` are
    /// read, so unknown products against zero coordinates are harmless.
    pub fn cube(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "vector of length {} against tensor of dim {}",
                x.len(),
                self.dim
            )));
        }
        let support: Vec<usize> = (0..self.dim).filter(|&i| !x[i].is_zero()).collect();
        let mut acc = Rational::zero();
        for &i in &support {
            for &j in &support {
                for &k in &support {
                    match self.get(i, j, k) {
                        Entry::Known(v) => acc += v * &x[i] * &x[j] * &x[k],
                        Entry::Unknown => return Err(Error::UnknownProducts(sorted(i, j, k))),
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Polynomial in one formal variable with rational coefficients,
/// `coeffs[i]` multiplying `ε^i`. The highest stored coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The formal variable ε.
    pub fn var() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Exact quotient; fails if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        let Some(dd) = divisor.degree() else {
            return Err(Error::Arithmetic("polynomial division by zero".into()));
        };
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Ok(Self::zero());
        };
        if nd < dd {
            return Err(Error::Arithmetic("inexact polynomial division".into()));
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for shift in (0..=nd - dd).rev() {
            let q = &rem[shift + dd] / lead;
            if q.is_zero() {
                continue;
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &q * c;
            }
            quot[shift] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::Arithmetic("inexact polynomial division".into()));
        }
        Ok(Self::new(quot))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: Self) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: Self) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: Self) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format_rational(c),
                1 => format!("({})·ε", format_rational(c)),
                _ => format!("({})·ε^{i}", format_rational(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Square or rectangular matrix of [`UniPoly`] entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: Vec<Vec<UniPoly>>,
}

impl PolyMatrix {
    pub fn from_rows(rows: Vec<Vec<UniPoly>>) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Self { rows })
    }

    pub fn get(&self, i: usize, j: usize) -> &UniPoly {
        &self.rows[i][j]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows.len(), self.rows.first().map_or(0, Vec::len))
    }

    /// Entrywise evaluation at `ε = x`.
    pub fn eval(&self, x: &Rational) -> RatMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|p| p.eval(x)).collect())
            .collect();
        RatMatrix::from_rows(rows).expect("rectangular by construction")
    }

    /// Determinant as a polynomial in ε, by Bareiss elimination over Q[ε].
    pub fn det(&self) -> Result<UniPoly> {
        let (r, c) = self.dims();
        if r != c {
            return Err(Error::NotSquare("poly_det".into(), r, c));
        }
        let n = r;
        if n == 0 {
            return Ok(UniPoly::constant(Rational::one()));
        }
        let mut a = self.rows.clone();
        let mut negate = false;
        let mut prev = UniPoly::constant(Rational::one());
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        negate = !negate;
                    }
                    None => return Ok(UniPoly::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.div_exact(&prev)?;
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if negate { -&d } else { d })
    }
}

/// Floating-point view of a rational, for display only.
pub fn approx(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
