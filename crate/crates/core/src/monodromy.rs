//! Dehn twists on the 2-torus as SL(2,Z) matrices.
//!
//! A class `pa + qb` in H_1(T²) is the column vector `(p, q)`. With the
//! pairing `⟨x, c⟩ = p·x₂ − q·x₁`, the twist along `c` acts by
//! `x ↦ x + ⟨x, c⟩·c`, giving `[[1 − pq, p²], [−q², 1 + pq]]`.
//! A word is evaluated as the matrix product of its letters in word order.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct H1Class {
    pub p: i64,
    pub q: i64,
}

impl H1Class {
    pub const A: H1Class = H1Class { p: 1, q: 0 };
    pub const B: H1Class = H1Class { p: 0, q: 1 };

    pub fn new(p: i64, q: i64) -> Self {
        Self { p, q }
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0 && self.q == 0
    }
}

impl fmt::Display for H1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SL2Matrix {
    pub m: [[i64; 2]; 2],
}

impl SL2Matrix {
    pub const IDENTITY: SL2Matrix = SL2Matrix { m: [[1, 0], [0, 1]] };

    /// Fails unless the determinant is 1.
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let s = Self { m };
        if s.det() != 1 {
            return Err(Error::Invalid(format!("determinant {} is not 1", s.det())));
        }
        Ok(s)
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Self { m: [[d, -b], [-c, a]] }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { *self };
        (0..e.unsigned_abs()).fold(Self::IDENTITY, |acc, _| acc * base)
    }

    pub fn apply(&self, c: H1Class) -> H1Class {
        let [[a, b], [cc, d]] = self.m;
        H1Class::new(a * c.p + b * c.q, cc * c.p + d * c.q)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

impl Mul for SL2Matrix {
    type Output = SL2Matrix;
    fn mul(self, rhs: SL2Matrix) -> SL2Matrix {
        let (a, b) = (self.m, rhs.m);
        let mut out = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SL2Matrix { m: out }
    }
}

impl fmt::Display for SL2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

pub fn dehn_twist(c: H1Class) -> Result<SL2Matrix> {
    if c.is_zero() {
        return Err(Error::Invalid("Dehn twist along the zero class".into()));
    }
    let (p, q) = (c.p, c.q);
    Ok(SL2Matrix {
        m: [[1 - p * q, p * p], [-q * q, 1 + p * q]],
    })
}

/// One letter `t(cls)^e` of a twist word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistLetter {
    #[serde(flatten)]
    pub cls: H1Class,
    pub e: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TwistWord {
    letters: Vec<TwistLetter>,
}

impl TwistWord {
    pub fn new(letters: Vec<TwistLetter>) -> Result<Self> {
        if let Some(l) = letters.iter().find(|l| l.e == 0) {
            return Err(Error::Invalid(format!("zero exponent on {}", l.cls)));
        }
        if let Some(l) = letters.iter().find(|l| l.cls.is_zero()) {
            return Err(Error::Invalid(format!("zero class in letter with exponent {}", l.e)));
        }
        Ok(Self { letters })
    }

    pub fn from_pairs(pairs: &[((i64, i64), i64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&((p, q), e)| TwistLetter { cls: H1Class::new(p, q), e })
                .collect(),
        )
    }

    /// `t(a)³ t(b)³ t(a+b)³ t(2a+b)³`: monodromy of the rational elliptic
    /// surface with four I₃ fibres.
    pub fn four_i3() -> Self {
        Self::from_pairs(&[((1, 0), 3), ((0, 1), 3), ((1, 1), 3), ((2, 1), 3)]).expect("valid")
    }

    pub fn letters(&self) -> &[TwistLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self {
            letters: self.letters.iter().chain(&other.letters).copied().collect(),
        }
    }

    /// Every letter `t(c)^e` replaced by |e| letters `t(c)^±1`.
    pub fn flattened(&self) -> Self {
        Self {
            letters: self
                .letters
                .iter()
                .flat_map(|l| {
                    std::iter::repeat_n(TwistLetter { cls: l.cls, e: l.e.signum() }, l.e.unsigned_abs() as usize)
                })
                .collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let letters: Vec<TwistLetter> = serde_json::from_str(s)?;
        Self::new(letters)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(&self.letters).expect("plain data")
    }
}

pub fn word_product(w: &TwistWord) -> SL2Matrix {
    w.letters.iter().fold(SL2Matrix::IDENTITY, |acc, l| {
        acc * dehn_twist(l.cls).expect("nonzero by construction").pow(l.e)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FibrationReport {
    pub closed: bool,
    /// Number of I₁ nodes, one per single twist.
    pub euler: u64,
}

pub fn validate_fibration(w: &TwistWord) -> FibrationReport {
    FibrationReport {
        closed: word_product(w).is_identity(),
        euler: w.letters.iter().map(|l| l.e.unsigned_abs()).sum(),
    }
}

/// Splits `t(C)^n` at `index` into `t(C)^j · t(C)^(n−j)`, e.g. an I₃ fibre
/// into I₁ + I₂. Signs follow the exponent.
pub fn split_fibre(w: &TwistWord, index: usize, j: u64) -> Result<TwistWord> {
    let l = *w
        .letters
        .get(index)
        .ok_or_else(|| Error::Invalid(format!("no letter at index {index}")))?;
    let n = l.e.unsigned_abs();
    if n < 2 {
        return Err(Error::Invalid(format!("letter {index} has |exponent| {n} < 2")));
    }
    if j == 0 || j >= n {
        return Err(Error::Invalid(format!("split point {j} outside 1..{n}")));
    }
    let s = l.e.signum();
    let mut letters = w.letters.clone();
    letters.splice(
        index..=index,
        [
            TwistLetter { cls: l.cls, e: s * j as i64 },
            TwistLetter { cls: l.cls, e: s * (n - j) as i64 },
        ],
    );
    Ok(TwistWord { letters })
}

/// Classes of letters `i` and `i+1`, wrapping around.
pub fn adjacent_classes(w: &TwistWord, i: usize) -> Result<(H1Class, H1Class)> {
    let n = w.len();
    if n < 2 {
        return Err(Error::Invalid("need at least two letters".into()));
    }
    if i >= n {
        return Err(Error::Invalid(format!("index {i} out of range for {n} letters")));
    }
    Ok((w.letters[i].cls, w.letters[(i + 1) % n].cls))
}

/// Hurwitz move at position `i`: `(t(c)^e, t(d)^f) ↦ (t(d)^f, t(M⁻¹c)^e)`
/// with `M = t(d)^f`. Uses `M⁻¹·t(c)·M = t(M⁻¹c)`, so the product is unchanged.
pub fn hurwitz_move(w: &TwistWord, i: usize) -> Result<TwistWord> {
    if i + 1 >= w.len() {
        return Err(Error::Invalid(format!("no letters at {i}, {}", i + 1)));
    }
    let (x, y) = (w.letters[i], w.letters[i + 1]);
    let m = dehn_twist(y.cls)?.pow(y.e);
    let mut letters = w.letters.clone();
    letters[i] = y;
    letters[i + 1] = TwistLetter { cls: m.inverse().apply(x.cls), e: x.e };
    Ok(TwistWord { letters })
}

/// Inverse of [`hurwitz_move`]: `(t(c)^e, t(d)^f) ↦ (t(Md)^f, t(c)^e)` with
/// `M = t(c)^e`.
pub fn inverse_hurwitz_move(w: &TwistWord, i: usize) -> Result<TwistWord> {
    if i + 1 >= w.len() {
        return Err(Error::Invalid(format!("no letters at {i}, {}", i + 1)));
    }
    let (x, y) = (w.letters[i], w.letters[i + 1]);
    let m = dehn_twist(x.cls)?.pow(x.e);
    let mut letters = w.letters.clone();
    letters[i] = TwistLetter { cls: m.apply(y.cls), e: y.e };
    letters[i + 1] = x;
    Ok(TwistWord { letters })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(m: [[i64; 2]; 2]) -> SL2Matrix {
        SL2Matrix::new(m).unwrap()
    }

    #[test]
    fn displayed_twist_matrices() {
        assert_eq!(dehn_twist(H1Class::new(1, 0)).unwrap(), mat([[1, 1], [0, 1]]));
        assert_eq!(dehn_twist(H1Class::new(0, 1)).unwrap(), mat([[1, 0], [-1, 1]]));
        assert_eq!(dehn_twist(H1Class::new(1, 1)).unwrap(), mat([[0, 1], [-1, 2]]));
        assert_eq!(dehn_twist(H1Class::new(2, 1)).unwrap(), mat([[-1, 4], [-1, 3]]));
        assert!(dehn_twist(H1Class::new(0, 0)).is_err());
    }

    #[test]
    fn word_products() {
        assert!(word_product(&TwistWord::four_i3()).is_identity());
        assert!(word_product(&TwistWord::default()).is_identity());
        let w = TwistWord::from_pairs(&[((1, 0), 1), ((1, 0), -1)]).unwrap();
        assert!(word_product(&w).is_identity());
        assert!(TwistWord::from_pairs(&[((1, 0), 0)]).is_err());
    }

    #[test]
    fn reversed_order_is_not_identity() {
        let mut letters = TwistWord::four_i3().letters().to_vec();
        letters.reverse();
        assert!(!word_product(&TwistWord::new(letters).unwrap()).is_identity());
    }

    #[test]
    fn fibration_reports() {
        assert_eq!(
            validate_fibration(&TwistWord::four_i3()),
            FibrationReport { closed: true, euler: 12 }
        );
        assert_eq!(
            validate_fibration(&TwistWord::default()),
            FibrationReport { closed: true, euler: 0 }
        );
        let a = TwistWord::from_pairs(&[((1, 0), 1)]).unwrap();
        assert_eq!(validate_fibration(&a), FibrationReport { closed: false, euler: 1 });
    }

    #[test]
    fn split_examples() {
        let w = TwistWord::four_i3();
        let s = split_fibre(&w, 1, 1).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.letters()[1], TwistLetter { cls: H1Class::B, e: 1 });
        assert_eq!(s.letters()[2], TwistLetter { cls: H1Class::B, e: 2 });
        assert!(word_product(&s).is_identity());
        let i2 = TwistWord::from_pairs(&[((1, 1), 2)]).unwrap();
        let s = split_fibre(&i2, 0, 1).unwrap();
        assert_eq!(word_product(&s), word_product(&i2));
        assert!(split_fibre(&w, 0, 3).is_err());
        assert!(split_fibre(&w, 0, 0).is_err());
        assert!(split_fibre(&s, 0, 1).is_err());
        assert!(split_fibre(&w, 9, 1).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let w = TwistWord::four_i3();
        assert_eq!(adjacent_classes(&w, 0).unwrap(), (H1Class::A, H1Class::B));
        assert_eq!(adjacent_classes(&w, 3).unwrap(), (H1Class::new(2, 1), H1Class::A));
        let single = TwistWord::from_pairs(&[((1, 0), 1)]).unwrap();
        assert!(adjacent_classes(&single, 0).is_err());
        assert!(adjacent_classes(&w, 4).is_err());
    }

    #[test]
    fn hurwitz_examples() {
        let flat = TwistWord::four_i3().flattened();
        assert_eq!(flat.len(), 12);
        for i in 0..11 {
            let moved = hurwitz_move(&flat, i).unwrap();
            assert!(word_product(&moved).is_identity());
            assert_eq!(inverse_hurwitz_move(&moved, i).unwrap(), flat);
        }
        let ab = TwistWord::from_pairs(&[((1, 0), 1), ((0, 1), 1)]).unwrap();
        let moved = hurwitz_move(&ab, 0).unwrap();
        assert_eq!(word_product(&moved), word_product(&ab));
        assert!(hurwitz_move(&ab, 1).is_err());
    }

    #[test]
    fn word_json() {
        let w = TwistWord::from_json_str(r#"[{"p":1,"q":0,"e":3},{"p":0,"q":1,"e":-1}]"#).unwrap();
        assert_eq!(w.letters()[1], TwistLetter { cls: H1Class::B, e: -1 });
        assert_eq!(TwistWord::from_json_str(&w.to_json_value().to_string()).unwrap(), w);
        assert!(TwistWord::from_json_str(r#"[{"p":1,"q":0,"e":0}]"#).is_err());
    }
}
