//! Cohomological profile of a closed oriented 6-manifold and the Kähler
//! obstruction tests run on it.
//!
//! Degree-2 classes (c1, the symplectic class) are stored in H_4 coordinates
//! through Poincaré duality, so the cup-product ring is a single symmetric
//! 3-tensor on one H_4 basis. The pairing `(A, B) ↦ A·B·PD[ω]` is
//! `triple.contract(ω)`.

use std::fmt;
use std::path::Path;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{format_rational, int, parse_rational, Entry, Rational, SymTensor3, UniPoly};
use crate::{Error, Result};

/// Result of one test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped(String),
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Skipped(_) => "skipped",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Skipped(why) => write!(f, "skipped ({why})"),
            other => f.write_str(other.label()),
        }
    }
}

fn skipped_unknown(e: Error) -> Result<Outcome> {
    match e {
        Error::UnknownProducts(key) => Ok(Outcome::Skipped(format!(
            "unknown products: t{key:?} is not determined"
        ))),
        other => Err(other),
    }
}

/// A degree-2 class in H_4 coordinates of a named basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    pub basis_id: String,
    pub coords: Vec<Rational>,
}

impl CohomologyClass {
    pub fn scaled(&self, c: &Rational) -> Self {
        Self {
            basis_id: self.basis_id.clone(),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantProfile {
    pub name: String,
    pub b1: u32,
    pub b2: u32,
    pub b3: u32,
    pub h4_basis: Vec<String>,
    pub triple: SymTensor3,
    pub c1: Option<CohomologyClass>,
    pub omega: Option<CohomologyClass>,
    pub h20: Option<u32>,
    pub h11: Option<u32>,
}

impl InvariantProfile {
    /// Builds and validates a profile. The basis id of `c1`/`omega` is the
    /// profile name.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        b1: u32,
        b2: u32,
        b3: u32,
        h4_basis: Vec<String>,
        triple: SymTensor3,
        c1: Option<Vec<Rational>>,
        omega: Option<Vec<Rational>>,
        h20: Option<u32>,
        h11: Option<u32>,
    ) -> Result<Self> {
        let name = name.into();
        let n = b2 as usize;
        if h4_basis.len() != n {
            return Err(Error::Dimension(format!(
                "h4_basis has {} labels but b2 = {b2}",
                h4_basis.len()
            )));
        }
        if triple.dim() != n {
            return Err(Error::Dimension(format!(
                "triple tensor has dim {} but b2 = {b2}",
                triple.dim()
            )));
        }
        for (what, v) in [("c1", &c1), ("omega", &omega)] {
            if let Some(v) = v {
                if v.len() != n {
                    return Err(Error::Dimension(format!(
                        "{what} has {} coordinates but b2 = {b2}",
                        v.len()
                    )));
                }
            }
        }
        if let Some(h11) = h11 {
            if h11 > b2 {
                return Err(Error::Invalid(format!("h11 = {h11} exceeds b2 = {b2}")));
            }
        }
        let class = |coords| CohomologyClass {
            basis_id: name.clone(),
            coords,
        };
        Ok(Self {
            b1,
            b2,
            b3,
            h4_basis,
            triple,
            c1: c1.map(class),
            omega: omega.map(class),
            h20,
            h11,
            name,
        })
    }

    /// A class in this profile's basis.
    pub fn class(&self, coords: Vec<Rational>) -> Result<CohomologyClass> {
        if coords.len() != self.b2 as usize {
            return Err(Error::Dimension(format!(
                "class has {} coordinates but b2 = {}",
                coords.len(),
                self.b2
            )));
        }
        Ok(CohomologyClass {
            basis_id: self.name.clone(),
            coords,
        })
    }

    fn check_class(&self, w: &CohomologyClass) -> Result<()> {
        if w.coords.len() != self.b2 as usize {
            return Err(Error::Dimension(format!(
                "class has {} coordinates but b2 = {}",
                w.coords.len(),
                self.b2
            )));
        }
        if w.basis_id != self.name {
            return Err(Error::Dimension(format!(
                "class is in basis {:?}, profile basis is {:?}",
                w.basis_id, self.name
            )));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: ProfileJson = serde_json::from_str(s)?;
        raw.into_profile()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> ProfileJson {
        ProfileJson::from(self)
    }
}

/// Hard Lefschetz: `A·B·PD[w]` is nondegenerate on H_4.
pub fn hard_lefschetz_test(p: &InvariantProfile, w: &CohomologyClass) -> Result<Outcome> {
    p.check_class(w)?;
    match p.triple.contract(&w.coords) {
        Ok(m) => Ok(Outcome::from_bool(!m.det()?.is_zero())),
        Err(e) => skipped_unknown(e),
    }
}

/// Hodge–Riemann: the pairing has signature `(1 + 2·h20, h11 − 1)` and no kernel.
pub fn hodge_riemann_signature_test(p: &InvariantProfile, w: &CohomologyClass) -> Result<Outcome> {
    p.check_class(w)?;
    let (Some(h20), Some(h11)) = (p.h20, p.h11) else {
        return Ok(Outcome::Skipped("h20/h11 not declared".into()));
    };
    let m = match p.triple.contract(&w.coords) {
        Ok(m) => m,
        Err(e) => return skipped_unknown(e),
    };
    let sig = m.signature()?;
    let Some(expected_neg) = (h11 as usize).checked_sub(1) else {
        return Ok(Outcome::Fail);
    };
    Ok(Outcome::from_bool(
        sig.pos == 1 + 2 * h20 as usize && sig.neg == expected_neg && sig.zero == 0,
    ))
}

/// For b2 = 3: the pairing has positive determinant and an odd number of
/// positive eigenvalues. Both conditions are checked.
pub fn det_positivity_b2_3(p: &InvariantProfile, w: &CohomologyClass) -> Result<Outcome> {
    p.check_class(w)?;
    if p.b2 != 3 {
        return Ok(Outcome::Skipped(format!("b2 = {} (test needs b2 = 3)", p.b2)));
    }
    let m = match p.triple.contract(&w.coords) {
        Ok(m) => m,
        Err(e) => return skipped_unknown(e),
    };
    let det = m.det()?;
    let sig = m.signature()?;
    Ok(Outcome::from_bool(det.is_positive() && sig.pos % 2 == 1))
}

pub fn c1_cubed(p: &InvariantProfile) -> Result<Rational> {
    let c1 = p.c1.as_ref().ok_or(Error::Missing("c1"))?;
    p.triple.cube(&c1.coords)
}

/// Rigid Calabi–Yau: b3 = 2.
pub fn rigid_cy_check(p: &InvariantProfile) -> bool {
    p.b3 == 2
}

/// A Kähler Calabi–Yau 3-fold has a nonzero class of a holomorphic volume
/// form, so b3 ≥ 2; b3 = 0 rules out a Kähler CY structure.
pub fn b3_rules_out_kahler_cy(p: &InvariantProfile) -> bool {
    p.b3 == 0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingCycleVerdict {
    Obstructed,
    NoObstruction,
}

/// An essential Lagrangian sphere in a rigid Calabi–Yau is never a vanishing cycle.
pub fn vanishing_cycle_obstruction(p: &InvariantProfile, sphere_class_essential: bool) -> VanishingCycleVerdict {
    if rigid_cy_check(p) && sphere_class_essential {
        VanishingCycleVerdict::Obstructed
    } else {
        VanishingCycleVerdict::NoObstruction
    }
}

/// Aggregate of the Kähler tests for one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KahlerVerdict {
    pub hard_lefschetz: Outcome,
    pub signature_test: Outcome,
    pub det_positivity: Outcome,
    pub rigid_cy: bool,
    pub notes: Vec<String>,
}

pub fn kahler_verdict(p: &InvariantProfile, w: &CohomologyClass) -> Result<KahlerVerdict> {
    let mut notes = Vec::new();
    if b3_rules_out_kahler_cy(p) {
        notes.push("b3 = 0: no holomorphic volume form class, so not a Kähler Calabi-Yau".into());
    }
    if p.triple.has_unknowns() {
        notes.push(format!(
            "{} triple products are unknown",
            p.triple.unknown_entries().count()
        ));
    }
    Ok(KahlerVerdict {
        hard_lefschetz: hard_lefschetz_test(p, w)?,
        signature_test: hodge_riemann_signature_test(p, w)?,
        det_positivity: det_positivity_b2_3(p, w)?,
        rigid_cy: rigid_cy_check(p),
        notes,
    })
}

/// Basis labels of the conifold transition of P²×P¹ along the Hopf-graph sphere.
pub const SALVAGE_BASIS: [&str; 3] = ["|P2|", "|P1xP1|", "|R|"];

fn salvage_tensor(a_sign: i64, b: i64) -> SymTensor3 {
    const P2: usize = 0;
    const Q: usize = 1;
    const R: usize = 2;
    let mut t = SymTensor3::new(3);
    let mut put = |i, j, k, v: i64| t.set(i, j, k, int(v)).expect("indices < 3");
    put(P2, P2, P2, 0);
    put(Q, Q, Q, 0);
    put(Q, Q, P2, 1);
    put(Q, P2, P2, 0);
    put(Q, R, R, 0);
    put(Q, Q, R, 0);
    put(P2, Q, R, 0);
    put(R, R, P2, -1);
    put(P2, P2, R, a_sign);
    put(R, R, R, b);
    t
}

fn check_salvage_args(alpha: &Rational, beta: &Rational, a_sign: i64, sign: i64) -> Result<()> {
    if !alpha.is_positive() || !beta.is_positive() {
        return Err(Error::Invalid("alpha and beta must be positive".into()));
    }
    if a_sign.abs() != 1 || sign.abs() != 1 {
        return Err(Error::Invalid("A and sign must be ±1".into()));
    }
    Ok(())
}

/// Profile of the conifold transition of P²×P¹ in basis
/// (|P²|, |P¹×P¹|, |R|), with the class `α|P²| − β|P¹×P¹| + sign·ε|R|`.
///
/// `a_sign` is the product |P²|²·|R| = ±1 and `b` the undetermined |R|³.
pub fn salvage_profile(
    alpha: &Rational,
    beta: &Rational,
    eps: &Rational,
    a_sign: i64,
    b: i64,
    sign: i64,
) -> Result<(InvariantProfile, CohomologyClass)> {
    check_salvage_args(alpha, beta, a_sign, sign)?;
    if eps.is_negative() {
        return Err(Error::Invalid("eps must be non-negative".into()));
    }
    let name = format!(
        "p2xp1-conifold(A={a_sign},B={b},sign={})",
        if sign > 0 { '+' } else { '-' }
    );
    let p = InvariantProfile::new(
        name,
        0,
        3,
        0,
        SALVAGE_BASIS.iter().map(|s| s.to_string()).collect(),
        salvage_tensor(a_sign, b),
        Some(vec![int(2), int(3), int(0)]),
        None,
        None,
        None,
    )?;
    let w = p.class(vec![alpha.clone(), -beta.clone(), eps * int(sign)])?;
    Ok((p, w))
}

/// Determinant of the pairing of [`salvage_profile`] as a polynomial in ε.
pub fn salvage_det_poly(alpha: &Rational, beta: &Rational, a_sign: i64, b: i64, sign: i64) -> Result<UniPoly> {
    check_salvage_args(alpha, beta, a_sign, sign)?;
    let w = [
        UniPoly::constant(alpha.clone()),
        UniPoly::constant(-beta.clone()),
        UniPoly::var().scale(&int(sign)),
    ];
    salvage_tensor(a_sign, b).contract_poly(&w)?.det()
}

/// One row of the Fano 3-fold classification table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanoEntry {
    pub b2: u32,
    pub c1cubed: i64,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoTable {
    entries: Vec<FanoEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanoLookup {
    Found(Vec<String>),
    Absent,
}

impl FanoTable {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let entries: Vec<FanoEntry> = serde_json::from_str(s)?;
        if entries.is_empty() {
            return Err(Error::Invalid("Fano table is empty".into()));
        }
        if let Some(e) = entries.iter().find(|e| e.b2 == 0 || e.c1cubed <= 0) {
            return Err(Error::Invalid(format!("bad Fano table row {e:?}")));
        }
        Ok(Self { entries })
    }

    /// Reads the table; a missing file is an error, never an empty table.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn entries(&self) -> &[FanoEntry] {
        &self.entries
    }
}

pub fn mori_mukai_lookup(table: &FanoTable, b2: u32, c1cubed: i64) -> Result<FanoLookup> {
    if b2 == 0 {
        return Err(Error::Invalid("b2 must be at least 1".into()));
    }
    let labels: Vec<String> = table
        .entries
        .iter()
        .filter(|e| e.b2 == b2 && e.c1cubed == c1cubed)
        .map(|e| e.label.clone())
        .collect();
    Ok(if labels.is_empty() {
        FanoLookup::Absent
    } else {
        FanoLookup::Found(labels)
    })
}

/// `c1_cubed` as an integer, when it is one.
pub fn integral(r: &Rational) -> Option<i64> {
    r.is_integer().then(|| r.numer().to_i64()).flatten()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleEntryJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `"p/q"`, or `"?"` for an unknown product.
    pub v: String,
}

/// On-disk profile format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub name: String,
    pub b1: u32,
    pub b2: u32,
    pub b3: u32,
    pub h4_basis: Vec<String>,
    pub triple: Vec<TripleEntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h20: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h11: Option<u32>,
}

pub const UNKNOWN_MARK: &str = "?";

fn parse_coords(v: &Option<Vec<String>>) -> Result<Option<Vec<Rational>>> {
    v.as_ref()
        .map(|xs| xs.iter().map(|s| parse_rational(s)).collect())
        .transpose()
}

impl ProfileJson {
    pub fn into_profile(self) -> Result<InvariantProfile> {
        let mut t = SymTensor3::new(self.b2 as usize);
        for e in &self.triple {
            if e.v.trim() == UNKNOWN_MARK {
                t.set_unknown(e.i, e.j, e.k)?;
            } else {
                t.set(e.i, e.j, e.k, parse_rational(&e.v)?)?;
            }
        }
        InvariantProfile::new(
            self.name,
            self.b1,
            self.b2,
            self.b3,
            self.h4_basis,
            t,
            parse_coords(&self.c1)?,
            parse_coords(&self.omega)?,
            self.h20,
            self.h11,
        )
    }
}

impl From<&InvariantProfile> for ProfileJson {
    fn from(p: &InvariantProfile) -> Self {
        let mut triple: Vec<TripleEntryJson> = p
            .triple
            .known_entries()
            .map(|([i, j, k], v)| TripleEntryJson {
                i,
                j,
                k,
                v: format_rational(v),
            })
            .chain(p.triple.unknown_entries().map(|[i, j, k]| TripleEntryJson {
                i,
                j,
                k,
                v: UNKNOWN_MARK.into(),
            }))
            .collect();
        triple.sort_by_key(|e| (e.i, e.j, e.k));
        let coords = |c: &Option<CohomologyClass>| {
            c.as_ref()
                .map(|c| c.coords.iter().map(format_rational).collect())
        };
        Self {
            name: p.name.clone(),
            b1: p.b1,
            b2: p.b2,
            b3: p.b3,
            h4_basis: p.h4_basis.clone(),
            triple,
            c1: coords(&p.c1),
            omega: coords(&p.omega),
            h20: p.h20,
            h11: p.h11,
        }
    }
}

/// The product t(i,j,k) if known.
pub fn known_product(p: &InvariantProfile, i: usize, j: usize, k: usize) -> Option<Rational> {
    match p.triple.get(i, j, k) {
        Entry::Known(v) => Some(v),
        Entry::Unknown => None,
    }
}
