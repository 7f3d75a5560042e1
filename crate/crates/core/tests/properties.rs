//! Property suites for every module, with a fixed RNG seed so failures
//! reproduce exactly.

use lagrangian_surgery::fibre::{
    count_fibre_product_nodes, enumerate_fibred_spheres, fibre_intersection, intersection_graph, milnor_number,
    CriticalPoint, FibrationSketch, WeightVector, DEFAULT_RULE,
};
use lagrangian_surgery::lattice::{int, rat, PolyMatrix, RatMatrix, Rational, SymTensor3, UniPoly};
use lagrangian_surgery::local::{
    cotangent_to_node, node_to_cotangent, radial_map, round_trip_error, seeded_samples,
    symplectic_pullback_residual_with_step, CPoint, CotangentPoint, ROUND_TRIP_TOL,
};
use lagrangian_surgery::monodromy::{
    dehn_twist, hurwitz_move, inverse_hurwitz_move, split_fibre, word_product, H1Class, SL2Matrix, TwistLetter,
    TwistWord,
};
use lagrangian_surgery::profile::{
    c1_cubed, hard_lefschetz_test, hodge_riemann_signature_test, salvage_det_poly, InvariantProfile, Outcome,
};
use lagrangian_surgery::surgery::{
    an_chain_link, an_small_resolution_exists, conifold_transition, hopf_lagrangian_exists, odp_full_blowup,
    triple_point_record, triple_point_transition, LinkType, SurgeryRecord,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x1a6_5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

// ---------- strategies ----------

fn small_rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn pos_rat() -> impl Strategy<Value = Rational> {
    (1i64..=12, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn rat_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(prop::collection::vec(small_rat(), n), n)
        .prop_map(|rows| RatMatrix::from_rows(rows).unwrap())
}

fn sym_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
    rat_matrix(n).prop_map(|m| {
        let t = m.transpose();
        let mut s = RatMatrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                s.set(i, j, m.get(i, j) + t.get(i, j));
            }
        }
        s
    })
}

fn int_matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), n)
        .prop_map(|rows| RatMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect()).unwrap())
}

fn poly() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(small_rat(), 0..=3).prop_map(UniPoly::new)
}

fn sorted_triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                out.push((i, j, k));
            }
        }
    }
    out
}

fn tensor(n: usize) -> impl Strategy<Value = SymTensor3> {
    let count = sorted_triples(n).len();
    prop::collection::vec(-3i64..=3, count).prop_map(move |vals| {
        let mut t = SymTensor3::new(n);
        for ((i, j, k), v) in sorted_triples(n).into_iter().zip(vals) {
            t.set(i, j, k, int(v)).unwrap();
        }
        t
    })
}

fn rat_vec(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rat(), n)
}

/// A profile with b2 ∈ 1..=4, random triple products and c1.
fn profile() -> impl Strategy<Value = InvariantProfile> {
    (1usize..=4).prop_flat_map(|n| {
        (tensor(n), rat_vec(n), 0u32..=3, 0u32..=n as u32).prop_map(move |(t, c1, b3half, h11)| {
            InvariantProfile::new(
                "random",
                0,
                n as u32,
                2 * b3half,
                (0..n).map(|i| format!("e{i}")).collect(),
                t,
                Some(c1),
                None,
                Some(0),
                Some(h11),
            )
            .unwrap()
        })
    })
}

fn profile_and_class() -> impl Strategy<Value = (InvariantProfile, Vec<Rational>)> {
    profile().prop_flat_map(|p| {
        let n = p.b2 as usize;
        (Just(p), rat_vec(n))
    })
}

fn h1_class() -> impl Strategy<Value = H1Class> {
    (-5i64..=5, -5i64..=5)
        .prop_filter("nonzero class", |&(p, q)| p != 0 || q != 0)
        .prop_map(|(p, q)| H1Class::new(p, q))
}

fn twist_word(max: usize) -> impl Strategy<Value = TwistWord> {
    prop::collection::vec(
        (h1_class(), prop_oneof![-4i64..=-1, 1i64..=4]).prop_map(|(cls, e)| TwistLetter { cls, e }),
        1..=max,
    )
    .prop_map(|ls| TwistWord::new(ls).unwrap())
}

fn sketch() -> impl Strategy<Value = FibrationSketch> {
    prop::collection::btree_map(-4i64..=4, prop::collection::vec(h1_class(), 1..=3), 1..=4).prop_map(|m| {
        FibrationSketch::new(
            "random",
            m.into_iter()
                .map(|(position, cycles)| CriticalPoint { position, cycles })
                .collect(),
        )
        .unwrap()
    })
}

fn unit_gaussian_free(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim).prop_filter("not tiny", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.05)
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------- lattice_algebra ----------

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn det_is_multiplicative(m in rat_matrix(3), n in rat_matrix(3)) {
        let mn = m.matmul(&n).unwrap();
        prop_assert_eq!(mn.det().unwrap(), m.det().unwrap() * n.det().unwrap());
    }

    #[test]
    fn signature_is_congruence_invariant(m in sym_matrix(3), s in int_matrix(3)) {
        prop_assume!(s.det().unwrap() != int(0));
        let congruent = s.transpose().matmul(&m).unwrap().matmul(&s).unwrap();
        prop_assert_eq!(congruent.signature().unwrap(), m.signature().unwrap());
    }

    #[test]
    fn poly_det_commutes_with_evaluation(
        entries in prop::collection::vec(prop::collection::vec(poly(), 3), 3),
        q in small_rat(),
    ) {
        let m = PolyMatrix::from_rows(entries).unwrap();
        prop_assert_eq!(m.det().unwrap().eval(&q), m.eval(&q).det().unwrap());
    }

    #[test]
    fn contract_is_linear_and_symmetric(
        t in tensor(3), w1 in rat_vec(3), w2 in rat_vec(3), a in small_rat(), b in small_rat(),
    ) {
        let combo: Vec<Rational> = w1.iter().zip(&w2).map(|(x, y)| &a * x + &b * y).collect();
        let lhs = t.contract(&combo).unwrap();
        let (m1, m2) = (t.contract(&w1).unwrap(), t.contract(&w2).unwrap());
        prop_assert!(lhs.is_symmetric());
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(lhs.get(i, j).clone(), &a * m1.get(i, j) + &b * m2.get(i, j));
            }
        }
    }
}

// ---------- invariant_profile ----------

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn contract_symmetric_and_lefschetz_scale_invariant((p, w) in profile_and_class(), c in small_rat()) {
        prop_assume!(c != int(0));
        let w = p.class(w).unwrap();
        prop_assert!(p.triple.contract(&w.coords).unwrap().is_symmetric());
        prop_assert_eq!(
            hard_lefschetz_test(&p, &w).unwrap(),
            hard_lefschetz_test(&p, &w.scaled(&c)).unwrap()
        );
    }

    #[test]
    fn salvage_constant_term(
        alpha in pos_rat(), beta in pos_rat(), a in prop_oneof![Just(-1i64), Just(1)],
        b in -5i64..=5, sign in prop_oneof![Just(-1i64), Just(1)],
    ) {
        let poly = salvage_det_poly(&alpha, &beta, a, b, sign).unwrap();
        prop_assert_eq!(poly.coeff(0), &alpha * (&beta * &beta - &alpha * &alpha));
    }

    #[test]
    fn signature_pass_implies_lefschetz_pass((p, w) in profile_and_class()) {
        let w = p.class(w).unwrap();
        if hodge_riemann_signature_test(&p, &w).unwrap() == Outcome::Pass {
            prop_assert_eq!(hard_lefschetz_test(&p, &w).unwrap(), Outcome::Pass);
        }
    }

    #[test]
    fn c1_cubed_is_cubic(p in profile(), k in small_rat()) {
        let c1 = p.c1.clone().unwrap().coords;
        let mut scaled = p.clone();
        scaled.c1 = Some(p.class(c1.iter().map(|x| &k * x).collect()).unwrap());
        prop_assert_eq!(c1_cubed(&scaled).unwrap(), &k * &k * &k * c1_cubed(&p).unwrap());
    }
}

#[test]
fn salvage_constant_term_grid() {
    let vals = [rat(1, 2), int(1), rat(3, 2), int(2), int(3)];
    for alpha in &vals {
        for beta in &vals {
            for a in [-1, 1] {
                for b in -2..=2 {
                    for sign in [-1, 1] {
                        let poly = salvage_det_poly(alpha, beta, a, b, sign).unwrap();
                        assert_eq!(poly.coeff(0), alpha * (beta * beta - alpha * alpha));
                    }
                }
            }
        }
    }
}

// ---------- surgery_engine ----------

fn assert_record(rec: &SurgeryRecord) {
    assert_eq!(2 * rec.delta_b2 - rec.delta_b3, rec.delta_chi, "{rec:?}");
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn conifold_records_consistent_and_reversible(p in profile(), n in 0u32..=6, r in 0u32..=6) {
        match conifold_transition(&p, n, r) {
            Ok((out, rec)) => {
                assert_record(&rec);
                prop_assert_eq!(out.b2 as i64 - rec.delta_b2, p.b2 as i64);
                prop_assert_eq!(out.b3 as i64 - rec.delta_b3, p.b3 as i64);
                prop_assert_eq!(out.b1, p.b1);
            }
            // Refusals happen exactly when the output would be meaningless.
            Err(_) => prop_assert!(r > n || 2 * r > p.b3),
        }
    }

    #[test]
    fn blowup_and_triple_point_records(p in profile(), r in 0u32..=14) {
        if let Ok((out, rec)) = odp_full_blowup(&p, r, &int(1)) {
            assert_record(&rec);
            prop_assert_eq!(out.b2 as i64, p.b2 as i64 + rec.delta_b2);
        }
        let rec = triple_point_record(r).unwrap();
        assert_record(&rec);
        prop_assert_eq!(rec.delta_chi, 24);
        match triple_point_transition(&p, r) {
            Ok((out, rec)) => {
                prop_assert_eq!(out.b2 as i64, p.b2 as i64 + rec.delta_b2);
                prop_assert_eq!(out.b3 as i64, p.b3 as i64 + rec.delta_b3);
            }
            Err(_) => prop_assert!(r > 12 || 2 * r > p.b3),
        }
    }

    #[test]
    fn negative_betti_is_an_error(p in profile(), extra in 1u32..=4) {
        let r = p.b3 / 2 + extra;
        prop_assert!(conifold_transition(&p, r + 1, r).is_err());
    }

    #[test]
    fn link_parity_complementary(n in 1i64..=10_000) {
        let s5 = an_chain_link(n).unwrap() == LinkType::S5;
        prop_assert_eq!(s5, !an_small_resolution_exists(n).unwrap());
    }

    #[test]
    fn hopf_existence_scale_invariant(alpha in pos_rat(), beta in pos_rat(), c in pos_rat()) {
        prop_assert_eq!(
            hopf_lagrangian_exists(&alpha, &beta).unwrap(),
            hopf_lagrangian_exists(&(&c * &alpha), &(&c * &beta)).unwrap()
        );
    }
}

// ---------- monodromy ----------

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn twists_are_parabolic_and_fix_their_class(c in h1_class()) {
        let t = dehn_twist(c).unwrap();
        prop_assert_eq!(t.det(), 1);
        prop_assert_eq!(t.trace(), 2);
        prop_assert_eq!(t.apply(c), c);
        prop_assert_eq!(dehn_twist(H1Class::new(-c.p, -c.q)).unwrap(), t);
    }

    #[test]
    fn product_of_concatenation(w1 in twist_word(5), w2 in twist_word(5)) {
        prop_assert_eq!(word_product(&w1.concat(&w2)), word_product(&w1) * word_product(&w2));
    }

    #[test]
    fn split_and_hurwitz_preserve_product(w in twist_word(6), i in 0usize..6, j in 1u64..4) {
        let i = i % w.len();
        let before = word_product(&w);
        let n = w.letters()[i].e.unsigned_abs();
        if n >= 2 {
            let j = 1 + (j - 1) % (n - 1);
            prop_assert_eq!(word_product(&split_fibre(&w, i, j).unwrap()), before);
        }
        if i + 1 < w.len() {
            let moved = hurwitz_move(&w, i).unwrap();
            prop_assert_eq!(word_product(&moved), before);
            prop_assert_eq!(inverse_hurwitz_move(&moved, i).unwrap(), w.clone());
            prop_assert_eq!(word_product(&inverse_hurwitz_move(&w, i).unwrap()), before);
        }
    }
}

#[test]
fn identity_matrix_is_neutral() {
    let w = TwistWord::four_i3();
    assert_eq!(word_product(&w) * SL2Matrix::IDENTITY, word_product(&w));
}

// ---------- fibre_products ----------

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn node_count_symmetric(f1 in sketch(), f2 in sketch()) {
        prop_assert_eq!(count_fibre_product_nodes(&f1, &f2), count_fibre_product_nodes(&f2, &f1));
    }

    #[test]
    fn milnor_permutation_symmetric(ds in prop::collection::vec(2i64..=7, 1..=5), rot in 0usize..5) {
        let ws: Vec<Rational> = ds.iter().map(|&d| rat(1, d)).collect();
        let mut permuted = ws.clone();
        permuted.reverse();
        let len = permuted.len();
        permuted.rotate_left(rot % len);
        let a = milnor_number(&WeightVector::new(ws).unwrap()).unwrap();
        let b = milnor_number(&WeightVector::new(permuted).unwrap()).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, ds.iter().map(|&d| (d - 1) as u64).product::<u64>());
    }

    #[test]
    fn fibre_intersection_symmetric_and_detects_proportionality(c in h1_class(), d in h1_class()) {
        let m = fibre_intersection(c, d);
        prop_assert_eq!(m, fibre_intersection(d, c));
        let proportional = c.p * d.q == c.q * d.p;
        prop_assert_eq!(m == 0, proportional);
    }
}

#[test]
fn milnor_of_quadrics_is_one() {
    for n in 0..=30 {
        assert_eq!(milnor_number(&WeightVector::uniform(2, n + 1).unwrap()).unwrap(), 1);
    }
}

#[test]
fn triple_point_vertices_match_milnor_number() {
    let tp = FibrationSketch::triple_point();
    let g = intersection_graph(&tp, &tp, DEFAULT_RULE).unwrap();
    let mu = milnor_number(&WeightVector::uniform(3, 4).unwrap()).unwrap();
    assert_eq!(g.vertices.len() as u64, mu);
    assert_eq!(enumerate_fibred_spheres(&tp, &tp).unwrap().len() as u64, mu);
    assert_eq!((tp.cycle_count() * tp.cycle_count()) as u64, mu);
}

// ---------- local_models ----------

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn cotangent_round_trip(
        u in unit_gaussian_free(4), v in unit_gaussian_free(4), scale in 0.1f64..3.0, t in prop_oneof![Just(0.0), 0.1f64..2.0],
    ) {
        let u = normalize(&u);
        let proj = dot(&v, &u);
        let v: Vec<f64> = v.iter().zip(&u).map(|(x, y)| scale * (x - proj * y)).collect();
        prop_assume!(dot(&v, &v) > 1e-6);
        let p = CotangentPoint::new(u.clone(), v.clone()).unwrap();
        let z = cotangent_to_node(&p, t).unwrap();
        prop_assert!((z.quadric_value() - Complex64::new(t, 0.0)).norm() < 1e-9);
        let back = node_to_cotangent(&z, t).unwrap();
        let err = back.u.iter().zip(&u).chain(back.v.iter().zip(&v)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < ROUND_TRIP_TOL, "error {err}");
        prop_assert!(round_trip_error(&z, t).unwrap() < ROUND_TRIP_TOL);
    }

    #[test]
    fn radial_map_adds_lambda_squared(
        re in unit_gaussian_free(4), im in prop::collection::vec(-1.0f64..1.0, 4), lambda in 0.01f64..5.0,
    ) {
        let z = CPoint::from_parts(&re, &im).unwrap();
        let f = radial_map(&z, lambda).unwrap();
        let lhs = f.norm_sqr() - z.norm_sqr();
        prop_assert!((lhs - lambda * lambda).abs() <= 1e-12 * (1.0 + f.norm_sqr()));
    }

    #[test]
    fn sampler_lands_on_the_cone(seed in any::<u64>(), n in 1usize..=5) {
        for z in seeded_samples(seed, 8, n, 0.0) {
            let (a, b) = (z.re(), z.im());
            prop_assert!((dot(&a, &a).sqrt() - dot(&b, &b).sqrt()).abs() < 1e-12);
            prop_assert!(dot(&a, &b).abs() < 1e-12);
            prop_assert!(z.quadric_value().norm() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn residual_converges_quadratically(seed in any::<u64>(), t in prop_oneof![Just(0.0), Just(1.0)]) {
        let samples = seeded_samples(seed, 5, 3, t);
        let coarse = symplectic_pullback_residual_with_step(&samples, t, 1e-3).unwrap();
        let fine = symplectic_pullback_residual_with_step(&samples, t, 1e-4).unwrap();
        prop_assert!(coarse / fine > 50.0, "coarse {coarse:e}, fine {fine:e}");
    }
}
