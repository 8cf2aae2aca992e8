use flagsurge::dynamics::{directed_hausdorff, hausdorff, lipschitz_estimate};
use flagsurge::export::{flags_from_csv, flags_to_csv};
use flagsurge::fixtures::{diag_421, rank_one_schottky};
use flagsurge::flag::{dist_to_alpha_circle, dist_to_beta_circle};
use flagsurge::holonomy::{covering_parity, density_check, eval_deformed, DeformedRep, SurfaceGen, SurfaceLetter, SurfaceWord};
use flagsurge::sample::{alpha_circle, beta_circle, bouquet, random_flag, rng_from_seed, tube_sample, uniform_sample};
use flagsurge::schottky::{fundamental_domain_reduce, reduce_word, word_image, Letter, Word};
use flagsurge::surgery::gluing_map;
use flagsurge::{
    act, classify, ext_act, ext_compose, flag_distance, kappa, make_flag, theta, ExtElem, Flag, GroupElem, Mat3, Tube,
    Vec3,
};
use proptest::prelude::*;

fn flag() -> impl Strategy<Value = Flag> {
    any::<u64>().prop_map(|s| random_flag(&mut rng_from_seed(s)))
}

fn group_elem() -> impl Strategy<Value = GroupElem> {
    prop::array::uniform9(-3.0f64..3.0).prop_filter_map("near-singular", |e| {
        let m = Mat3::from_row_major(e);
        (m.det().abs() > 1e-2 * m.frobenius().powi(3)).then(|| GroupElem::from_row_major(e).unwrap())
    })
}

fn rotation(q: [f64; 4]) -> Mat3 {
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|c| c / n);
    Mat3::from_row_major([
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    ])
}

fn quaternion() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter("degenerate", |q| q.iter().map(|x| x * x).sum::<f64>() > 0.05)
}

/// Condition number at most 16.
fn conditioned() -> impl Strategy<Value = GroupElem> {
    (quaternion(), quaternion(), prop::array::uniform3(0.5f64..2.0)).prop_map(|(a, b, d)| {
        GroupElem::from_matrix(rotation(a) * Mat3::diag(d[0], d[1], d[2]) * rotation(b)).unwrap()
    })
}

/// `h diag(±e^{u+v}, ±e^u, ±1) h⁻¹` with log-gaps in `[0.4, 1]`.
fn loxodromic() -> impl Strategy<Value = GroupElem> {
    (conditioned(), 0.4f64..1.0, 0.4f64..1.0, prop::array::uniform3(any::<bool>())).prop_map(|(h, u, v, s)| {
        let sg = |b: bool| if b { -1.0 } else { 1.0 };
        let d = GroupElem::diag(sg(s[0]) * (u + v).exp(), sg(s[1]) * u.exp(), sg(s[2])).unwrap();
        h.compose(&d).compose(&h.inverse())
    })
}

fn surface_word() -> impl Strategy<Value = SurfaceWord> {
    prop::collection::vec((0usize..4, any::<bool>()), 0..7)
        .prop_map(|v| SurfaceWord::new(v.into_iter().map(|(i, inv)| SurfaceLetter::new(SurfaceGen::ALL[i], inv))))
}

fn incident(x: &Flag) -> bool {
    x.incidence_residual() <= 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn operations_preserve_incidence(g in group_elem(), x in flag(), t in -4.0f64..4.0) {
        prop_assert!(incident(&x));
        prop_assert!(incident(&act(&g, &x)));
        prop_assert!(incident(&ext_act(&ExtElem::kappa(), &x)));
        prop_assert!(incident(&act(&theta(&g), &x)));
        prop_assert!(incident(&x.alpha_rotate(t)));
        prop_assert!(incident(&x.beta_rotate(t)));
        let y = make_flag(x.p() + Vec3::new(1e-3, 0.0, 0.0), x.n());
        if let Ok(y) = y {
            prop_assert!(incident(&y));
        }
    }

    #[test]
    fn kappa_and_theta_intertwine(g in group_elem(), h in group_elem(), x in flag()) {
        prop_assert!(theta(&theta(&g)).distance(&g) <= 1e-12);
        prop_assert!(theta(&g.compose(&h)).distance(&theta(&g).compose(&theta(&h))) <= 1e-12);
        prop_assert!(flag_distance(&kappa(&kappa(&x)), &x) <= 1e-12);
        let lhs = kappa(&act(&g, &x));
        let rhs = act(&theta(&g), &kappa(&x));
        prop_assert!(flag_distance(&lhs, &rhs) <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn distance_is_a_metric(x in flag(), y in flag(), z in flag()) {
        prop_assert_eq!(flag_distance(&x, &y), flag_distance(&y, &x));
        prop_assert!(flag_distance(&x, &z) <= flag_distance(&x, &y) + flag_distance(&y, &z) + 1e-12);
        prop_assert!(flag_distance(&x, &x) <= 1e-9);
        prop_assert!(flag_distance(&x, &y) > 1e-9);
    }

    #[test]
    fn extended_action_is_compatible(g in group_elem(), h in group_elem(), sg: bool, sh: bool, x in flag()) {
        let a = ExtElem { g, swap: sg };
        let b = ExtElem { g: h, swap: sh };
        let lhs = ext_act(&ext_compose(&a, &b), &x);
        let rhs = ext_act(&a, &ext_act(&b, &x));
        let scale = g.matrix().frobenius() * h.matrix().frobenius();
        prop_assert!(flag_distance(&lhs, &rhs) <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn csv_round_trip(x in flag()) {
        let back = flags_from_csv(flags_to_csv(&[x]).as_bytes()).unwrap();
        prop_assert_eq!(back[0].to_array(), x.to_array());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn circles_meet_only_at_basepoint(x in flag(), m in 3usize..40) {
        let a = alpha_circle(&x, m).unwrap();
        let b = beta_circle(&x, m).unwrap();
        let off = |y: &&Flag| flag_distance(y, &x) > 1e-12;
        let min = a.iter().filter(off)
            .flat_map(|y| b.iter().filter(off).map(move |z| flag_distance(y, z)))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(min > 0.0);
    }

    #[test]
    fn tubes_contain_their_bouquets(c in flag(), ra in 0.01f64..1.5, rb in 0.01f64..1.5, m in 3usize..100) {
        let t = Tube::new(c, ra, rb).unwrap();
        prop_assert!(bouquet(&c, m).unwrap().iter().all(|y| t.contains(y)));
        prop_assert!(tube_sample(&t, 50, m as u64).iter().all(|y| t.contains(y) && incident(y)));
    }

    #[test]
    fn kappa_exchanges_foliations(x in flag(), m in 3usize..64) {
        let kx = kappa(&x);
        let a = alpha_circle(&x, m).unwrap();
        let b = beta_circle(&x, m).unwrap();
        let res = a.resolution.unwrap();
        prop_assert!(a.iter().all(|y| dist_to_beta_circle(&kappa(y), &kx) <= res));
        prop_assert!(b.iter().all(|y| dist_to_alpha_circle(&kappa(y), &kx) <= res));
    }

    #[test]
    fn loxodromic_fixed_flags(g in loxodromic(), k in conditioned()) {
        let spec = classify(&g).unwrap();
        let lox = spec.loxodromic().unwrap();
        prop_assert!(flag_distance(&act(&g, &lox.x_plus), &lox.x_plus) <= 1e-9);
        prop_assert!(flag_distance(&act(&g, &lox.x_minus), &lox.x_minus) <= 1e-9);

        let inv = classify(&g.inverse()).unwrap();
        let inv = inv.loxodromic().unwrap();
        prop_assert!(flag_distance(&inv.x_plus, &lox.x_minus) <= 1e-8);
        prop_assert!(flag_distance(&inv.x_minus, &lox.x_plus) <= 1e-8);

        let c = classify(&k.compose(&g).compose(&k.inverse())).unwrap();
        let c = c.loxodromic().unwrap();
        prop_assert!(flag_distance(&c.x_plus, &act(&k, &lox.x_plus)) <= 1e-8);
    }

    #[test]
    fn hausdorff_is_lipschitz(g in conditioned(), s1: u64, s2: u64) {
        let a = uniform_sample(25, s1);
        let b = uniform_sample(25, s2);
        let ga = flagsurge::dynamics::iterate_set(&g, &a, 1);
        let gb = flagsurge::dynamics::iterate_set(&g, &b, 1);
        let l = lipschitz_estimate(&g, &a, &b).max(lipschitz_estimate(&g, &b, &a));
        prop_assert!(hausdorff(&ga, &gb).unwrap() <= l * hausdorff(&a, &b).unwrap() + 1e-12);
        prop_assert!(directed_hausdorff(&a, &b).unwrap() <= hausdorff(&a, &b).unwrap());
    }

    #[test]
    fn gluing_maps_are_involutions(g in loxodromic(), n in 1usize..4) {
        let phi = gluing_map(&g, n);
        prop_assert!(phi.swap);
        let sq = ext_compose(&phi, &phi);
        prop_assert!(!sq.swap);
        prop_assert!(sq.g.distance_to_identity() <= 1e-10);
    }

    #[test]
    fn reduction_word_returns_to_input(z in flag()) {
        let cfg = rank_one_schottky();
        let r = fundamental_domain_reduce(&z, &cfg, 500).unwrap();
        let back = act(&word_image(&r.word, &cfg).unwrap().inverse(), &r.representative);
        prop_assert!(flag_distance(&back, &z) <= 1e-8);
    }

    #[test]
    fn free_reduction(letters in prop::collection::vec((0usize..3, any::<bool>()), 0..12)) {
        let w = Word::new(letters.into_iter().map(|(i, s)| Letter::new(i, s)).collect());
        let r = reduce_word(&w);
        prop_assert!(r.is_reduced());
        prop_assert!(reduce_word(&r.concat(&r.inverse())).is_empty());
    }

    #[test]
    fn deformed_rep_is_a_homomorphism(
        eps in prop::array::uniform4(-1.0f64..1.0),
        w1 in surface_word(), w2 in surface_word(),
        n1 in -3i64..3, n2 in -3i64..3,
    ) {
        let rep = DeformedRep::new(diag_421(), eps).unwrap();
        let lhs = eval_deformed(&rep, &w1.concat(&w2), n1 + n2);
        let rhs = eval_deformed(&rep, &w1, n1).compose(&eval_deformed(&rep, &w2, n2));
        prop_assert!(lhs.distance(&rhs) <= 1e-9);
        prop_assert!(eval_deformed(&rep, &SurfaceWord::relator(), 0).distance_to_identity() <= 1e-10);
        prop_assert!(rep.letterwise_image(&SurfaceWord::relator()).distance_to_identity() <= 1e-10);
    }

    #[test]
    fn parity_is_a_homomorphism(w1 in surface_word(), w2 in surface_word()) {
        prop_assert_eq!(covering_parity(&w1.concat(&w2)), covering_parity(&w1) ^ covering_parity(&w2));
        prop_assert_eq!(covering_parity(&w1.inverse()), covering_parity(&w1));
    }

    #[test]
    fn free_reduction_of_surface_words(w in surface_word()) {
        prop_assert!(w.letters().windows(2).all(|p| p[1] != p[0].inv()));
        prop_assert!(w.concat(&w.inverse()).is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_is_monotone_in_the_bound(eps in prop::array::uniform4(-1.0f64..1.0), n in 1u32..4) {
        let a = density_check(&eps, n, 1e-3).min_positive;
        let b = density_check(&eps, n + 1, 1e-3).min_positive;
        prop_assert!(b <= a);
    }
}

#[test]
fn bouquet_and_its_kappa_image_are_disjoint() {
    let mut rng = rng_from_seed(11);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let x = random_flag(&mut rng);
        let b = bouquet(&x, 32).unwrap();
        let kb: Vec<Flag> = b.iter().map(kappa).collect();
        let d = b
            .iter()
            .flat_map(|y| kb.iter().map(move |z| flag_distance(y, z)))
            .fold(f64::INFINITY, f64::min);
        worst = worst.min(d);
    }
    eprintln!("min distance between B(x) and kappa(B(x)) over 1000 flags: {worst:.6}");
    assert!(worst > 1e-3);
}
