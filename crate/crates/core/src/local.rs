//! Numerical checks of the local coordinate maps around a node.
//!
//! The smoothing `{Σ z_j² = t} ⊂ C^(n+1)` is identified with `T*S^n` by
//! `z = a + ib ↦ (u, v) = (a/|a|, −|a|·b)`. That map pulls `Σ dv_j∧du_j`
//! back to the standard form `Σ da_j∧db_j`; the check below compares the two
//! on tangent vectors pushed through a central-difference Jacobian.
//!
//! Real vectors on C^(n+1) are laid out as `[a_0 … a_n, b_0 … b_n]`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Result};

pub const QUADRIC_TOL: f64 = 1e-9;
pub const JACOBIAN_STEP: f64 = 1e-5;
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const PACKING_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CPoint {
    pub components: Vec<Complex64>,
}

impl CPoint {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid("non-finite coordinate".into()));
        }
        Ok(Self { components })
    }

    pub fn from_parts(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension("real and imaginary parts differ in length".into()));
        }
        Self::new(a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect())
    }

    pub fn re(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.im).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ z_j²`.
    pub fn quadric_value(&self) -> Complex64 {
        self.components.iter().map(|c| c * c).sum()
    }

    fn flat(&self) -> Vec<f64> {
        let mut x = self.re();
        x.extend(self.im());
        x
    }
}

/// Point `(u, v)` of `T*S^n` in the round model `|u| = 1`, `⟨u, v⟩ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentPoint {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl CotangentPoint {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::Dimension("u and v differ in length".into()));
        }
        if (1.0 - norm(&u)).abs() > QUADRIC_TOL {
            return Err(Error::Invalid(format!("|u| = {} is not 1", norm(&u))));
        }
        if dot(&u, &v).abs() > QUADRIC_TOL * (1.0 + norm(&v)) {
            return Err(Error::Invalid("v is not orthogonal to u".into()));
        }
        Ok(Self { u, v })
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

fn check_on_quadric(z: &CPoint, t: f64) -> Result<()> {
    let off = (z.quadric_value() - Complex64::new(t, 0.0)).norm();
    if off > QUADRIC_TOL * z.norm_sqr().max(1.0) {
        return Err(Error::Invalid(format!("point is off the quadric Σz² = {t} by {off:e}")));
    }
    Ok(())
}

/// The coordinate map on flat real coordinates, without any checks.
fn node_map_flat(x: &[f64]) -> Vec<f64> {
    let m = x.len() / 2;
    let (a, b) = x.split_at(m);
    let na = norm(a);
    a.iter().map(|ai| ai / na).chain(b.iter().map(|bi| -na * bi)).collect()
}

pub fn node_to_cotangent(z: &CPoint, t: f64) -> Result<CotangentPoint> {
    if t < 0.0 {
        return Err(Error::Invalid("t must be non-negative".into()));
    }
    check_on_quadric(z, t)?;
    let a = z.re();
    if norm(&a) == 0.0 {
        return Err(Error::Invalid("Re z = 0: point is not in the domain of the map".into()));
    }
    let out = node_map_flat(&z.flat());
    let (u, v) = out.split_at(a.len());
    Ok(CotangentPoint {
        u: u.to_vec(),
        v: v.to_vec(),
    })
}

/// Inverse map: `|a|² = (t + √(t² + 4|v|²))/2`, `a = |a|u`, `b = −v/|a|`.
pub fn cotangent_to_node(p: &CotangentPoint, t: f64) -> Result<CPoint> {
    if t < 0.0 {
        return Err(Error::Invalid("t must be non-negative".into()));
    }
    let v2 = dot(&p.v, &p.v);
    if t == 0.0 && v2 == 0.0 {
        return Err(Error::Invalid("zero-section point has no preimage on the singular quadric".into()));
    }
    let na = ((t + (t * t + 4.0 * v2).sqrt()) / 2.0).sqrt();
    let a: Vec<f64> = p.u.iter().map(|x| na * x).collect();
    let b: Vec<f64> = p.v.iter().map(|x| -x / na).collect();
    CPoint::from_parts(&a, &b)
}

/// `z ↦ (√(|z|² + λ²)/|z|)·z`.
pub fn radial_map(z: &CPoint, lambda: f64) -> Result<CPoint> {
    if lambda <= 0.0 {
        return Err(Error::Invalid("lambda must be positive".into()));
    }
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        return Err(Error::Invalid("radial map is undefined at 0".into()));
    }
    let s = ((r2 + lambda * lambda) / r2).sqrt();
    CPoint::new(z.components.iter().map(|c| c * s).collect())
}

/// Inner and outer radius of the shell `B(√(λ²+δ²)) \ B(λ)`.
pub fn shell_radii(lambda: f64, delta: f64) -> Result<(f64, f64)> {
    if delta <= 0.0 {
        return Err(Error::Invalid("delta must be positive".into()));
    }
    if lambda < 0.0 {
        return Err(Error::Invalid("lambda must be non-negative".into()));
    }
    Ok((lambda, lambda.hypot(delta)))
}

/// Orthonormal basis of the tangent space of `{Σ z² = const}` at `z`:
/// the real orthogonal complement of `z̄` and `i·z̄`.
pub fn tangent_basis(z: &CPoint) -> Vec<Vec<f64>> {
    let (a, b) = (z.re(), z.im());
    let normals = [
        a.iter().copied().chain(b.iter().map(|x| -x)).collect::<Vec<_>>(),
        b.iter().copied().chain(a.iter().copied()).collect::<Vec<_>>(),
    ];
    let dim = 2 * a.len();
    let mut found: Vec<Vec<f64>> = Vec::new();
    for v in normals.iter() {
        orthonormal_push(&mut found, v.clone());
    }
    let fixed = found.len();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        orthonormal_push(&mut found, e);
        if found.len() == dim {
            break;
        }
    }
    found.split_off(fixed)
}

fn orthonormal_push(basis: &mut Vec<Vec<f64>>, mut v: Vec<f64>) {
    // two passes of Gram–Schmidt for stability
    for _ in 0..2 {
        for w in basis.iter() {
            let c = dot(&v, w);
            v.iter_mut().zip(w).for_each(|(x, y)| *x -= c * y);
        }
    }
    let n = norm(&v);
    if n > 1e-8 {
        basis.push(v.into_iter().map(|x| x / n).collect());
    }
}

fn std_form(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() / 2;
    (0..m).map(|j| x[j] * y[m + j] - x[m + j] * y[j]).sum()
}

/// `Σ dv∧du` on flat `(u, v)` vectors.
fn cotangent_form(x: &[f64], y: &[f64]) -> f64 {
    -std_form(x, y)
}

fn push_forward(z: &[f64], x: &[f64], h: f64) -> Vec<f64> {
    let plus: Vec<f64> = z.iter().zip(x).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - h * b).collect();
    node_map_flat(&plus)
        .iter()
        .zip(node_map_flat(&minus))
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect()
}

/// Signed difference `ω_std(X, Y) − (Σ dv∧du)(dF·X, dF·Y)` at `z`.
pub fn pullback_discrepancy(z: &CPoint, x: &[f64], y: &[f64], h: f64) -> f64 {
    let flat = z.flat();
    let (fx, fy) = (push_forward(&flat, x, h), push_forward(&flat, y, h));
    std_form(x, y) - cotangent_form(&fx, &fy)
}

pub fn symplectic_pullback_residual_with_step(samples: &[CPoint], t: f64, h: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in samples {
        check_on_quadric(z, t)?;
        if norm(&z.re()) == 0.0 {
            return Err(Error::Invalid("sample with Re z = 0".into()));
        }
        let basis = tangent_basis(z);
        let flat = z.flat();
        let images: Vec<Vec<f64>> = basis.iter().map(|x| push_forward(&flat, x, h)).collect();
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let d = std_form(&basis[i], &basis[j]) - cotangent_form(&images[i], &images[j]);
                worst = worst.max(d.abs());
            }
        }
    }
    Ok(worst)
}

/// Max over samples and tangent-basis pairs of the form discrepancy, with
/// the default central-difference step.
pub fn symplectic_pullback_residual(samples: &[CPoint], t: f64) -> Result<f64> {
    symplectic_pullback_residual_with_step(samples, t, JACOBIAN_STEP)
}

/// Max of `|Re z|·|Im z| / |z|²`; never more than 1/2, and exactly 1/2 on
/// the singular quadric.
pub fn packing_inequality_check(samples: &[CPoint]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in samples {
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            return Err(Error::Invalid("zero sample".into()));
        }
        worst = worst.max(norm(&z.re()) * norm(&z.im()) / r2);
    }
    Ok(worst)
}

/// Round-trip error `|cotangent_to_node(node_to_cotangent(z)) − z|`.
pub fn round_trip_error(z: &CPoint, t: f64) -> Result<f64> {
    let back = cotangent_to_node(&node_to_cotangent(z, t)?, t)?;
    Ok(back
        .components
        .iter()
        .zip(&z.components)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

fn random_unit(rng: &mut impl Rng, dim: usize, avoid: Option<&[f64]>) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Some(w) = avoid {
            let c = dot(&v, w);
            v.iter_mut().zip(w).for_each(|(x, y)| *x -= c * y);
        }
        let n = norm(&v);
        if n > 0.1 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random point of `{Σ z_j² = t} ⊂ C^(n+1)`: orthogonal `a ⊥ b` with
/// `|b| ∈ [1/2, 2]` and `|a|² = t + |b|²`.
pub fn sample_quadric(rng: &mut impl Rng, n: usize, t: f64) -> CPoint {
    let dim = n + 1;
    let a_dir = random_unit(rng, dim, None);
    let b_dir = random_unit(rng, dim, Some(&a_dir));
    let nb = rng.gen_range(0.5..2.0);
    let na = (t + nb * nb).sqrt();
    let a: Vec<f64> = a_dir.iter().map(|x| na * x).collect();
    let b: Vec<f64> = b_dir.iter().map(|x| nb * x).collect();
    CPoint::from_parts(&a, &b).expect("finite")
}

pub fn seeded_samples(seed: u64, count: usize, n: usize, t: f64) -> Vec<CPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_quadric(&mut rng, n, t)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub quadric: f64,
    pub jacobian_step: f64,
    pub residual: f64,
    pub round_trip: f64,
    pub packing: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadric: QUADRIC_TOL,
            jacobian_step: JACOBIAN_STEP,
            residual: RESIDUAL_TOL,
            round_trip: ROUND_TRIP_TOL,
            packing: PACKING_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalModelReport {
    pub seed: u64,
    pub samples: usize,
    pub n: usize,
    pub max_residual: f64,
    pub max_residual_smoothing: f64,
    pub max_round_trip: f64,
    pub max_packing_ratio: f64,
    /// `(h, residual)` on the singular quadric for h = 1e−3, 1e−4, 1e−5.
    pub convergence: Vec<(f64, f64)>,
    pub tolerances: Tolerances,
}

impl LocalModelReport {
    pub fn residual_ok(&self) -> bool {
        self.max_residual <= RESIDUAL_TOL && self.max_residual_smoothing <= RESIDUAL_TOL
    }

    pub fn round_trip_ok(&self) -> bool {
        self.max_round_trip <= ROUND_TRIP_TOL
    }

    pub fn packing_ok(&self) -> bool {
        self.max_packing_ratio <= 0.5 + PACKING_TOL && (self.max_packing_ratio - 0.5).abs() <= 1e-9
    }

    /// Each tenfold step reduction cuts the residual by at least 50×.
    pub fn second_order(&self) -> bool {
        self.convergence.windows(2).all(|w| w[0].1 >= 50.0 * w[1].1)
    }
}

/// Runs every local-model check on seeded samples in `C^(n+1)`: on the
/// singular quadric t = 0 and on the smoothing t = 1.
pub fn run_local_models(seed: u64, samples: usize, n: usize) -> Result<LocalModelReport> {
    let singular = seeded_samples(seed, samples, n, 0.0);
    let smooth = seeded_samples(seed.wrapping_add(1), samples, n, 1.0);
    let mut max_round_trip: f64 = 0.0;
    for z in &singular {
        max_round_trip = max_round_trip.max(round_trip_error(z, 0.0)?);
    }
    for z in &smooth {
        max_round_trip = max_round_trip.max(round_trip_error(z, 1.0)?);
    }
    let convergence = [1e-3, 1e-4, 1e-5]
        .into_iter()
        .map(|h| Ok((h, symplectic_pullback_residual_with_step(&singular, 0.0, h)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalModelReport {
        seed,
        samples,
        n,
        max_residual: symplectic_pullback_residual(&singular, 0.0)?,
        max_residual_smoothing: symplectic_pullback_residual(&smooth, 1.0)?,
        max_round_trip,
        max_packing_ratio: packing_inequality_check(&singular)?,
        convergence,
        tolerances: Tolerances::default(),
    })
}
