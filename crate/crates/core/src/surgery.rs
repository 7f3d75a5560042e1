//! Surgeries on Lagrangian spheres as exact transformations of profiles.
//!
//! Betti bookkeeping for a 6-manifold with b1 fixed: χ = 2 − 2b1 + 2b2 − b3,
//! so every record satisfies `2·Δb2 − Δb3 = Δχ`. Vanishing cycles spanning
//! a rank-r subspace of H_3 remove 2r from b3.
//!
//! Area and radius parameters are in π-normalized units (a line in P² has
//! area 1): the blow-up parameter is `a = πλ²`, a squared ball radius is
//! `r̂² = πr²`, and a disc-bundle radius is `μ̂ = 2πμ`.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::lattice::{format_rational, int, RatMatrix, Rational};
use crate::profile::{CohomologyClass, InvariantProfile};
use crate::{Error, Result};

/// Labelled Lagrangian spheres with their H_3 classes and geometric
/// intersection counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereConfiguration {
    pub sphere_ids: Vec<String>,
    pub h3_classes: Vec<Vec<i64>>,
    pub adjacency: Vec<Vec<u32>>,
    /// All intersections are transverse.
    pub transverse: bool,
    tree_flag: bool,
}

impl SphereConfiguration {
    pub fn new(
        sphere_ids: Vec<String>,
        h3_classes: Vec<Vec<i64>>,
        adjacency: Vec<Vec<u32>>,
        transverse: bool,
    ) -> Result<Self> {
        let n = sphere_ids.len();
        if h3_classes.len() != n {
            return Err(Error::Dimension(format!(
                "{} H_3 class rows for {n} spheres",
                h3_classes.len()
            )));
        }
        if let Some(first) = h3_classes.first() {
            if h3_classes.iter().any(|r| r.len() != first.len()) {
                return Err(Error::Dimension("ragged H_3 class rows".into()));
            }
        }
        check_adjacency(&adjacency, n)?;
        let tree_flag = is_forest(&adjacency);
        Ok(Self {
            sphere_ids,
            h3_classes,
            adjacency,
            transverse,
            tree_flag,
        })
    }

    /// A_n chain: `n` spheres meeting consecutively once.
    pub fn an_chain(n: usize, h3_classes: Vec<Vec<i64>>) -> Result<Self> {
        let mut adj = vec![vec![0; n]; n];
        for i in 1..n {
            adj[i - 1][i] = 1;
            adj[i][i - 1] = 1;
        }
        Self::new((1..=n).map(|i| format!("L{i}")).collect(), h3_classes, adj, true)
    }

    pub fn len(&self) -> usize {
        self.sphere_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sphere_ids.is_empty()
    }

    pub fn tree_flag(&self) -> bool {
        self.tree_flag
    }

    /// Rank over Q of the span of the sphere classes.
    pub fn class_rank(&self) -> usize {
        let rows = self
            .h3_classes
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        match RatMatrix::from_rows(rows) {
            Ok(m) => m.rank(),
            Err(_) => 0,
        }
    }
}

fn check_adjacency(adj: &[Vec<u32>], n: usize) -> Result<()> {
    if adj.len() != n || adj.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("adjacency must be {n}x{n}")));
    }
    for i in 0..n {
        if adj[i][i] != 0 {
            return Err(Error::Invalid(format!("adjacency diagonal entry {i} is nonzero")));
        }
        for j in 0..i {
            if adj[i][j] != adj[j][i] {
                return Err(Error::Invalid(format!("adjacency not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

/// Acyclicity of the multigraph; a double edge is a cycle.
fn is_forest(adj: &[Vec<u32>]) -> bool {
    let n = adj.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            match adj[i][j] {
                0 => continue,
                1 => {}
                _ => return false,
            }
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri == rj {
                return false;
            }
            parent[ri] = rj;
        }
    }
    true
}

/// `Σ λ_i [L_i] = 0` in H_3, all λ_i nonzero.
pub fn relation_check(cfg: &SphereConfiguration, lambdas: &[i64]) -> Result<bool> {
    if lambdas.len() != cfg.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} spheres",
            lambdas.len(),
            cfg.len()
        )));
    }
    if lambdas.contains(&0) {
        return Err(Error::Invalid("relation coefficients must be nonzero".into()));
    }
    let width = cfg.h3_classes.first().map_or(0, Vec::len);
    Ok((0..width).all(|c| {
        cfg.h3_classes
            .iter()
            .zip(lambdas)
            .map(|(row, &l)| row[c] as i128 * l as i128)
            .sum::<i128>()
            == 0
    }))
}

/// The multigraph of the configuration is a tree (forest) and all
/// intersections are transverse.
pub fn tree_uniqueness_applicable(cfg: &SphereConfiguration) -> Result<bool> {
    check_adjacency(&cfg.adjacency, cfg.len())?;
    Ok(cfg.transverse && is_forest(&cfg.adjacency))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurgeryKind {
    OdpFullBlowup,
    ConifoldTransition,
    TriplePointTransition,
    AnChain,
}

impl fmt::Display for SurgeryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurgeryKind::OdpFullBlowup => "odp_full_blowup",
            SurgeryKind::ConifoldTransition => "conifold_transition",
            SurgeryKind::TriplePointTransition => "triple_point_transition",
            SurgeryKind::AnChain => "an_chain",
        })
    }
}

/// One applied surgery. `delta_chi` is always `2·delta_b2 − delta_b3`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurgeryRecord {
    pub kind: SurgeryKind,
    pub params: BTreeMap<String, Value>,
    pub delta_b2: i64,
    pub delta_b3: i64,
    pub delta_chi: i64,
    pub valid: bool,
    pub notes: Vec<String>,
}

impl SurgeryRecord {
    fn new(kind: SurgeryKind, params: BTreeMap<String, Value>, delta_b2: i64, delta_b3: i64) -> Self {
        Self {
            kind,
            params,
            delta_b2,
            delta_b3,
            delta_chi: 2 * delta_b2 - delta_b3,
            valid: true,
            notes: Vec::new(),
        }
    }

    fn invalid(mut self, note: impl Into<String>) -> Self {
        self.valid = false;
        self.notes.push(note.into());
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_consistent(&self) -> bool {
        2 * self.delta_b2 - self.delta_b3 == self.delta_chi
    }
}

pub fn euler_char(p: &InvariantProfile) -> i64 {
    2 - 2 * p.b1 as i64 + 2 * p.b2 as i64 - p.b3 as i64
}

fn shifted(value: u32, delta: i64, what: &str) -> Result<u32> {
    let v = value as i64 + delta;
    u32::try_from(v).map_err(|_| Error::Invalid(format!("{what} would become {v}")))
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Appends `labels` to the H_4 basis. Products listed in `known` are set,
/// every other product touching a new class is marked unknown. Degree-2
/// classes get the given coordinates on the new classes.
struct Extension<'a> {
    name: String,
    labels: Vec<String>,
    known: Vec<([usize; 3], Rational)>,
    c1_tail: Vec<Rational>,
    omega_tail: Vec<Rational>,
    delta_b3: i64,
    base: &'a InvariantProfile,
}

impl Extension<'_> {
    fn apply(self) -> Result<InvariantProfile> {
        let p = self.base;
        let old = p.b2 as usize;
        let new = old + self.labels.len();
        let mut t = p.triple.extended(new);
        for i in 0..new {
            for j in i..new {
                for k in j.max(old)..new {
                    t.set_unknown(i, j, k)?;
                }
            }
        }
        for ([i, j, k], v) in self.known {
            t.set(i, j, k, v)?;
        }
        let tail = |c: &Option<CohomologyClass>, tail: Vec<Rational>| {
            c.as_ref().map(|c| c.coords.iter().cloned().chain(tail).collect())
        };
        let mut basis = p.h4_basis.clone();
        basis.extend(self.labels);
        InvariantProfile::new(
            self.name,
            p.b1,
            new as u32,
            shifted(p.b3, self.delta_b3, "b3")?,
            basis,
            t,
            tail(&p.c1, self.c1_tail),
            tail(&p.omega, self.omega_tail),
            None,
            None,
        )
    }
}

/// Conifold transition along `n` spheres whose classes span rank `r` in H_3:
/// b2 += n − r, b3 −= 2r. c1 and ω keep their old coordinates and vanish on
/// the new classes; all products of new classes are unknown.
pub fn conifold_transition(p: &InvariantProfile, n: u32, r: u32) -> Result<(InvariantProfile, SurgeryRecord)> {
    if r > n {
        return Err(Error::Invalid(format!("rank r = {r} exceeds sphere count n = {n}")));
    }
    if 2 * r > p.b3 {
        return Err(Error::Invalid(format!("2r = {} exceeds b3 = {}", 2 * r, p.b3)));
    }
    let db2 = (n - r) as i64;
    let db3 = -2 * r as i64;
    let mut rec = SurgeryRecord::new(
        SurgeryKind::ConifoldTransition,
        params(&[("n", json!(n)), ("r", json!(r))]),
        db2,
        db3,
    );
    if n > 0 && r == n {
        rec = rec.invalid("no homology relation among the spheres: the existence hypothesis fails");
    }
    if n == 0 {
        return Ok((p.clone(), rec.note("no spheres: profile unchanged")));
    }
    let k = (n - r) as usize;
    let out = Extension {
        name: format!("{}#conifold(n={n},r={r})", p.name),
        labels: (1..=k).map(|i| format!("D{i}")).collect(),
        known: Vec::new(),
        c1_tail: vec![Rational::zero(); k],
        omega_tail: vec![Rational::zero(); k],
        delta_b3: db3,
        base: p,
    }
    .apply()?;
    let rec = if k > 0 {
        rec.note(format!("{k} new H_4 classes with unknown triple products"))
    } else {
        rec
    };
    Ok((out, rec))
}

/// Conifold transition with `n` and `r` read off a sphere configuration and a
/// relation `Σ λ_i [L_i] = 0`.
pub fn conifold_from_spheres(
    p: &InvariantProfile,
    cfg: &SphereConfiguration,
    lambdas: &[i64],
) -> Result<(InvariantProfile, SurgeryRecord)> {
    let related = relation_check(cfg, lambdas)?;
    let (out, mut rec) = conifold_transition(p, cfg.len() as u32, cfg.class_rank() as u32)?;
    if !related {
        rec = rec.invalid("the given coefficients are not a relation in H_3");
    }
    Ok((out, rec))
}

/// Blow-up of the node obtained by collapsing one Lagrangian sphere.
///
/// `r` is the rank of the sphere's class (0 or 1). The exceptional divisor
/// E ≅ P¹×P¹ is appended, followed (when r = 0) by the lift R of a 4-chain
/// bounding the sphere. c1 becomes c1 − E; ω becomes ω − a·E with `a = πλ²`.
/// E has normal bundle O(−1,−1), so E³ = 2, and old cycles miss E; products
/// with R are unknown.
pub fn odp_full_blowup(p: &InvariantProfile, r: u32, a: &Rational) -> Result<(InvariantProfile, SurgeryRecord)> {
    if r > 1 {
        return Err(Error::Invalid(format!("class rank of one sphere is 0 or 1, got {r}")));
    }
    if !a.is_positive() {
        return Err(Error::Invalid("blow-up size a = πλ² must be positive".into()));
    }
    let old = p.b2 as usize;
    let e = old;
    let mut labels = vec!["E".to_string()];
    let mut c1_tail = vec![int(-1)];
    let mut omega_tail = vec![-a.clone()];
    if r == 0 {
        labels.push("R".into());
        c1_tail.push(Rational::zero());
        omega_tail.push(Rational::zero());
    }
    let mut known = vec![([e, e, e], int(2))];
    for i in 0..old {
        known.push(([i, e, e], Rational::zero()));
        for j in i..old {
            known.push(([i, j, e], Rational::zero()));
        }
    }
    let db2 = labels.len() as i64;
    let db3 = -2 * r as i64;
    let out = Extension {
        name: format!("{}#blowup(r={r})", p.name),
        labels,
        known,
        c1_tail,
        omega_tail,
        delta_b3: db3,
        base: p,
    }
    .apply()?;
    let mut rec = SurgeryRecord::new(
        SurgeryKind::OdpFullBlowup,
        params(&[("r", json!(r)), ("a", json!(format_rational(a)))]),
        db2,
        db3,
    );
    if r == 0 {
        rec = rec.note("products involving the lifted 4-chain class R are unknown");
    }
    Ok((out, rec))
}

/// Whether the symplectic class equals c1.
pub fn is_fano_class(p: &InvariantProfile) -> bool {
    match (&p.c1, &p.omega) {
        (Some(c), Some(w)) => c.coords == w.coords,
        _ => false,
    }
}

/// Milnor number of the triple point x³+y³+z³+w³.
pub const TRIPLE_POINT_MILNOR: u32 = 16;

/// Replacing a triple point's Milnor fibre (a wedge of 16 three-spheres,
/// χ = −15) by the resolving cubic surface (χ = 9) adds 24 to χ.
pub const TRIPLE_POINT_DELTA_CHI: i64 = 24;

/// Betti deltas of the triple-point transition when the 16 vanishing cycles
/// span rank `r`: Δb3 = −2r, Δb2 = 12 − r, Δχ = 24.
pub fn triple_point_record(r: u32) -> Result<SurgeryRecord> {
    if r > TRIPLE_POINT_MILNOR {
        return Err(Error::Invalid(format!(
            "rank r = {r} exceeds the Milnor number {TRIPLE_POINT_MILNOR}"
        )));
    }
    let db3 = -2 * r as i64;
    let db2 = (TRIPLE_POINT_DELTA_CHI + db3) / 2;
    Ok(SurgeryRecord::new(
        SurgeryKind::TriplePointTransition,
        params(&[("r", json!(r))]),
        db2,
        db3,
    ))
}

/// Triple-point transition (collapse 16 spheres, blow up the triple point).
/// Calabi–Yau to Calabi–Yau, so c1 vanishes on the new classes.
pub fn triple_point_transition(p: &InvariantProfile, r: u32) -> Result<(InvariantProfile, SurgeryRecord)> {
    let rec = triple_point_record(r)?;
    if 2 * r > p.b3 {
        return Err(Error::Invalid(format!("2r = {} exceeds b3 = {}", 2 * r, p.b3)));
    }
    if rec.delta_b2 < 0 {
        return Err(Error::Invalid(format!(
            "r = {r} gives Δb2 = {}; removing H_4 classes is not tracked",
            rec.delta_b2
        )));
    }
    let k = rec.delta_b2 as usize;
    let out = Extension {
        name: format!("{}#triple_point(r={r})", p.name),
        labels: (1..=k).map(|i| format!("T{i}")).collect(),
        known: Vec::new(),
        c1_tail: vec![Rational::zero(); k],
        omega_tail: vec![Rational::zero(); k],
        delta_b3: rec.delta_b3,
        base: p,
    }
    .apply()?;
    let rec = rec.note(format!("{k} new H_4 classes with unknown triple products"));
    Ok((out, rec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LinkType {
    S5,
    S2xS3,
}

impl fmt::Display for LinkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkType::S5 => "S5",
            LinkType::S2xS3 => "S2xS3",
        })
    }
}

fn check_chain_len(n: i64) -> Result<()> {
    if n <= 0 {
        return Err(Error::Invalid(format!("chain length must be positive, got {n}")));
    }
    Ok(())
}

/// Link of the A_n singularity x²+y²+z²+w^(n+1) = 0.
pub fn an_chain_link(n: i64) -> Result<LinkType> {
    check_chain_len(n)?;
    Ok(if n % 2 == 0 { LinkType::S5 } else { LinkType::S2xS3 })
}

pub fn an_small_resolution_exists(n: i64) -> Result<bool> {
    check_chain_len(n)?;
    Ok(n % 2 == 1)
}

/// Record for collapsing an A_n chain. Betti deltas are not tracked here;
/// the record carries the link and small-resolution verdicts.
pub fn an_chain_record(n: i64) -> Result<SurgeryRecord> {
    let link = an_chain_link(n)?;
    let small = an_small_resolution_exists(n)?;
    let mut p = vec![
        ("n", json!(n)),
        ("link", json!(link.to_string())),
        ("small_resolution", json!(small)),
    ];
    if small {
        p.push(("k (n = 2k+1)", json!((n - 1) / 2)));
    }
    let rec = SurgeryRecord::new(SurgeryKind::AnChain, params(&p), 0, 0)
        .note("Betti deltas of A_n collapses are not tracked");
    Ok(if small {
        rec.note("exceptional locus: a thickened P1")
    } else {
        rec.invalid("even n: no small resolution")
    })
}

/// Curve contracted by the degree-d surgery on a 4-manifold: genus
/// (d−1)(d−2)/2 and self-intersection −d.
pub fn degree_d_surface_surgery(d: i64) -> Result<(i64, i64)> {
    if d < 2 {
        return Err(Error::Invalid(format!("degree must be at least 2, got {d}")));
    }
    Ok(((d - 1) * (d - 2) / 2, -d))
}

/// P²×P¹ with split form β·ω_{P²} ⊕ α·ω_{P¹} contains the Hopf-graph
/// Lagrangian sphere exactly when β > α.
pub fn hopf_lagrangian_exists(alpha: &Rational, beta: &Rational) -> Result<bool> {
    if !alpha.is_positive() || !beta.is_positive() {
        return Err(Error::Invalid("alpha and beta must be positive".into()));
    }
    Ok(beta > alpha)
}

/// A ball of squared radius `r2` maps into the disc bundle of radius r2/2,
/// since |z|² ≤ R implies |Re z||Im z| ≤ R/2.
pub fn ball_to_disc_bundle(r2: &Rational) -> Result<Rational> {
    if r2.is_negative() {
        return Err(Error::Invalid("squared radius must be non-negative".into()));
    }
    Ok(r2 / int(2))
}

/// Surgery yields a symplectic Fano when a disc bundle of normalized radius
/// `mu_hat = 2πμ` strictly greater than 1 embeds.
pub fn fano_surgery_criterion(mu_hat: &Rational) -> Result<bool> {
    if mu_hat.is_negative() {
        return Err(Error::Invalid("mu_hat must be non-negative".into()));
    }
    Ok(*mu_hat > int(1))
}
