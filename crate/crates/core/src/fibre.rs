//! Fibre products of fibred surfaces over a common base.
//!
//! A [`FibrationSketch`] records only combinatorics: integer labels for the
//! critical values and, over each, the vanishing cycles in H_1 of the torus
//! fibre. Matching two sketches at a shared critical value gives nodes of the
//! fibre product; pairs of cycles give fibred Lagrangian 3-spheres.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{int, Rational};
use crate::monodromy::{H1Class, TwistWord};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPoint {
    pub position: i64,
    pub cycles: Vec<H1Class>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationSketch {
    pub name: String,
    pub critical_points: Vec<CriticalPoint>,
}

impl FibrationSketch {
    pub fn new(name: impl Into<String>, critical_points: Vec<CriticalPoint>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for cp in &critical_points {
            if !seen.insert(cp.position) {
                return Err(Error::Invalid(format!("duplicate critical position {}", cp.position)));
            }
            if cp.cycles.iter().any(H1Class::is_zero) {
                return Err(Error::Invalid(format!("zero vanishing cycle at position {}", cp.position)));
            }
        }
        Ok(Self {
            name: name.into(),
            critical_points,
        })
    }

    /// One critical value per letter, carrying |e| copies of the letter's class.
    pub fn from_word(name: impl Into<String>, w: &TwistWord) -> Result<Self> {
        let cps = w
            .letters()
            .iter()
            .enumerate()
            .map(|(i, l)| CriticalPoint {
                position: i as i64,
                cycles: vec![l.cls; l.e.unsigned_abs() as usize],
            })
            .collect();
        Self::new(name, cps)
    }

    /// Morsification of the triple-point fibre xy(x+y) = t: three parallel
    /// cycles over one value and a fourth cycle γ meeting each once.
    pub fn triple_point() -> Self {
        Self::new(
            "triple_point",
            vec![
                CriticalPoint {
                    position: 0,
                    cycles: vec![H1Class::A; 3],
                },
                CriticalPoint {
                    position: 1,
                    cycles: vec![H1Class::B],
                },
            ],
        )
        .expect("valid")
    }

    pub fn flat_cycles(&self) -> Vec<H1Class> {
        self.critical_points.iter().flat_map(|c| c.cycles.iter().copied()).collect()
    }

    pub fn cycle_count(&self) -> usize {
        self.critical_points.iter().map(|c| c.cycles.len()).sum()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: SketchJson = serde_json::from_str(s)?;
        Self::new(
            raw.name,
            raw.critical_points
                .into_iter()
                .map(|c| CriticalPoint {
                    position: c.position,
                    cycles: c.cycles.into_iter().map(|[p, q]| H1Class::new(p, q)).collect(),
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> SketchJson {
        SketchJson {
            name: self.name.clone(),
            critical_points: self
                .critical_points
                .iter()
                .map(|c| CriticalPointJson {
                    position: c.position,
                    cycles: c.cycles.iter().map(|h| [h.p, h.q]).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SketchJson {
    pub name: String,
    pub critical_points: Vec<CriticalPointJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalPointJson {
    pub position: i64,
    pub cycles: Vec<[i64; 2]>,
}

/// Nodes of the fibre product: Σ over shared critical values of the product
/// of the node counts on each side.
pub fn count_fibre_product_nodes(f1: &FibrationSketch, f2: &FibrationSketch) -> u64 {
    let other: HashMap<i64, usize> = f2
        .critical_points
        .iter()
        .map(|c| (c.position, c.cycles.len()))
        .collect();
    f1.critical_points
        .iter()
        .filter_map(|c| other.get(&c.position).map(|&m| (c.cycles.len() * m) as u64))
        .sum()
}

/// Quasi-homogeneous weights, each strictly between 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    weights: Vec<Rational>,
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| **w <= Rational::zero() || **w >= Rational::one()) {
            return Err(Error::Invalid(format!("weight {w} outside (0, 1)")));
        }
        Ok(Self { weights })
    }

    /// `count` copies of `1/d`, the Brieskorn–Pham case `Σ z_i^d`.
    pub fn uniform(d: i64, count: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("degree must be nonzero".into()));
        }
        Self::new(vec![Rational::new(1.into(), d.into()); count])
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }
}

/// Milnor–Orlik: μ = ∏ (1/w_i − 1).
pub fn milnor_number(w: &WeightVector) -> Result<u64> {
    let mu = w
        .weights
        .iter()
        .fold(Rational::one(), |acc, x| acc * (x.recip() - int(1)));
    if !mu.is_integer() {
        return Err(Error::Invalid(format!("Milnor product {mu} is not an integer")));
    }
    mu.to_integer()
        .to_u64()
        .ok_or_else(|| Error::Arithmetic(format!("Milnor number {mu} out of range")))
}

/// A fibred sphere: (index into the first sketch's flat cycle list, index
/// into the second's).
pub type SphereVertex = (usize, usize);

/// Cartesian product of the flattened cycle lists.
pub fn enumerate_fibred_spheres(f1: &FibrationSketch, f2: &FibrationSketch) -> Result<Vec<SphereVertex>> {
    let (n1, n2) = (f1.cycle_count(), f2.cycle_count());
    if n1 == 0 || n2 == 0 {
        return Err(Error::Invalid("sketch without vanishing cycles".into()));
    }
    Ok((0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).collect())
}

/// |p_c·q_d − q_c·p_d|.
pub fn fibre_intersection(c: H1Class, d: H1Class) -> u64 {
    (c.p as i128 * d.q as i128 - c.q as i128 * d.p as i128).unsigned_abs() as u64
}

/// How two fibred spheres intersect, given their cycle indices.
pub trait IntersectionRule {
    fn id(&self) -> &'static str;
    fn multiplicity(&self, a: SphereVertex, b: SphereVertex, left: &[H1Class], right: &[H1Class]) -> u64;
}

/// Spheres sharing an endpoint cycle meet through the other factor; spheres
/// with distinct cycles in both factors meet in the product of the fibre
/// intersection numbers.
pub struct MatchingCalculus;

impl IntersectionRule for MatchingCalculus {
    fn id(&self) -> &'static str {
        "matching-calculus"
    }

    fn multiplicity(&self, (c, c2): SphereVertex, (d, d2): SphereVertex, left: &[H1Class], right: &[H1Class]) -> u64 {
        let first = fibre_intersection(left[c], left[d]);
        let second = fibre_intersection(right[c2], right[d2]);
        match (c == d, c2 == d2) {
            (true, true) => 0,
            (true, false) => second,
            (false, true) => first,
            (false, false) => first * second,
        }
    }
}

/// Variant where spheres sharing an endpoint cycle are perturbed apart and
/// only pairs with distinct cycles in both factors meet.
pub struct SharedEndpointDisjoint;

impl IntersectionRule for SharedEndpointDisjoint {
    fn id(&self) -> &'static str {
        "shared-endpoint-disjoint"
    }

    fn multiplicity(&self, (c, c2): SphereVertex, (d, d2): SphereVertex, left: &[H1Class], right: &[H1Class]) -> u64 {
        if c == d || c2 == d2 {
            return 0;
        }
        fibre_intersection(left[c], left[d]) * fibre_intersection(right[c2], right[d2])
    }
}

pub const DEFAULT_RULE: &str = "matching-calculus";

pub fn registered_rules() -> Vec<Box<dyn IntersectionRule>> {
    vec![Box::new(MatchingCalculus), Box::new(SharedEndpointDisjoint)]
}

pub fn rule_by_id(id: &str) -> Result<Box<dyn IntersectionRule>> {
    registered_rules()
        .into_iter()
        .find(|r| r.id() == id)
        .ok_or_else(|| Error::UnknownRule(id.to_string()))
}

/// Candidate intersection graph of fibred spheres, labelled by the rule that
/// produced it. Edges are stored with the smaller vertex index first and only
/// when the multiplicity is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereGraph {
    pub vertices: Vec<SphereVertex>,
    pub edges: BTreeMap<(usize, usize), u64>,
    pub rule_id: String,
}

impl SphereGraph {
    pub fn multiplicity(&self, a: usize, b: usize) -> u64 {
        let key = (a.min(b), a.max(b));
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn set_multiplicity(&mut self, a: usize, b: usize, m: u64) {
        let key = (a.min(b), a.max(b));
        if m == 0 || a == b {
            self.edges.remove(&key);
        } else {
            self.edges.insert(key, m);
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rule_id": self.rule_id,
            "vertices": self.vertices.iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|(&(a, b), &m)| serde_json::json!({"a": a, "b": b, "m": m})).collect::<Vec<_>>(),
        })
    }
}

pub fn intersection_graph(f1: &FibrationSketch, f2: &FibrationSketch, rule: &str) -> Result<SphereGraph> {
    let rule = rule_by_id(rule)?;
    let vertices = enumerate_fibred_spheres(f1, f2)?;
    let (left, right) = (f1.flat_cycles(), f2.flat_cycles());
    let mut g = SphereGraph {
        vertices: vertices.clone(),
        edges: BTreeMap::new(),
        rule_id: rule.id().to_string(),
    };
    for (a, &va) in vertices.iter().enumerate() {
        for (b, &vb) in vertices.iter().enumerate().skip(a + 1) {
            g.set_multiplicity(a, b, rule.multiplicity(va, vb, &left, &right));
        }
    }
    Ok(g)
}

/// Invariance of a 16-vertex graph on the 4×4 grid of cycle pairs under
/// permutations of cycles 0, 1, 2 in each factor and under swapping factors.
pub fn graph_symmetry_check(g: &SphereGraph) -> Result<bool> {
    const SIDE: usize = 4;
    if g.vertices.len() != SIDE * SIDE {
        return Err(Error::Invalid(format!(
            "expected {} vertices, got {}",
            SIDE * SIDE,
            g.vertices.len()
        )));
    }
    let index: HashMap<SphereVertex, usize> = g.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if index.len() != g.vertices.len() || g.vertices.iter().any(|&(i, j)| i >= SIDE || j >= SIDE) {
        return Err(Error::Invalid("vertices are not the 4x4 grid of cycle pairs".into()));
    }
    let swap01 = |x: usize| [1, 0, 2, 3][x];
    let swap12 = |x: usize| [0, 2, 1, 3][x];
    let generators: Vec<Box<dyn Fn(SphereVertex) -> SphereVertex>> = vec![
        Box::new(move |(i, j)| (swap01(i), j)),
        Box::new(move |(i, j)| (swap12(i), j)),
        Box::new(move |(i, j)| (i, swap01(j))),
        Box::new(move |(i, j)| (i, swap12(j))),
        Box::new(|(i, j)| (j, i)),
    ];
    let n = g.vertices.len();
    for act in &generators {
        for a in 0..n {
            for b in a + 1..n {
                let (ga, gb) = (index[&act(g.vertices[a])], index[&act(g.vertices[b])]);
                if g.multiplicity(a, b) != g.multiplicity(ga, gb) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
