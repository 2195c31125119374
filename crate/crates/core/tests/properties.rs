use greedy_lab::constants::{
    estimate, replay, set_pair_constant, sigma_brute_force, sigma_for_set, EstimateOptions, SetPairOptions, SetRelation,
    Side,
};
use greedy_lab::norms::{
    dual_norm_polyhedral, LpExponent, LpSpace, ModularSpace, PartialSumSpace, SpreadingFamily, DEFAULT_TOL_MOD,
};
use greedy_lab::sampler::SamplerSpec;
use greedy_lab::tga::{greedy_run, greedy_sets, is_greedy_set, truncate};
use greedy_lab::verify::{find_claim, run_claim, ClaimOptions};
use greedy_lab::weights::weight_of;
use greedy_lab::*;
use itertools::Itertools;
use num_traits::Zero;
use proptest::prelude::*;

fn q(k: i64) -> Rational {
    Rational::new(k.into(), 8.into())
}

/// Nonzero multiples of 1/8 in [-3, 3] on indices in [1, window].
fn vector(window: usize, max_support: usize) -> impl Strategy<Value = SparseVector<Rational>> {
    prop::collection::btree_map(1..=window, (1i64..=24, any::<bool>()), 0..=max_support).prop_map(|m| {
        SparseVector::from_entries(m.into_iter().map(|(i, (k, neg))| (i, q(if neg { -k } else { k })))).unwrap()
    })
}

/// Coefficients from a small grid so that ties are common.
fn tied_vector(window: usize, max_support: usize) -> impl Strategy<Value = SparseVector<Rational>> {
    prop::collection::btree_map(1..=window, prop::sample::select(vec![-2i64, -1, 1, 2]), 1..=max_support).prop_map(|m| {
        SparseVector::from_entries(m.into_iter().map(|(i, c)| (i, Rational::from_i64(c)))).unwrap()
    })
}

fn set(window: usize) -> impl Strategy<Value = IndexSet> {
    prop::collection::btree_set(1..=window, 0..=window).prop_map(|s| IndexSet::new(s).unwrap())
}

fn exact_engines() -> Vec<Box<dyn NormEngine>> {
    vec![
        Box::new(LpSpace::new(LpExponent::One)),
        Box::new(LpSpace::new(LpExponent::Infinity)),
        Box::new(SpreadingFamily::new(3).unwrap()),
        Box::new(PartialSumSpace::new(Some(12))),
    ]
}

fn float_engines() -> Vec<Box<dyn NormEngine>> {
    vec![
        Box::new(LpSpace::new(LpExponent::new(2.0).unwrap())),
        Box::new(LpSpace::new(LpExponent::new(3.5).unwrap())),
        Box::new(ModularSpace::arithmetic(12)),
    ]
}

fn unconditional_engines() -> Vec<Box<dyn NormEngine>> {
    vec![
        Box::new(LpSpace::new(LpExponent::One)),
        Box::new(LpSpace::new(LpExponent::Infinity)),
        Box::new(SpreadingFamily::new(3).unwrap()),
    ]
}

fn weights() -> impl Strategy<Value = WeightSequence> {
    prop::sample::select(vec!["ones", "harmonic", "alternating_half", "one_plus_harmonic", "linear"])
        .prop_map(|s| WeightSequence::parse(s).unwrap())
}

proptest! {
    #[test]
    fn projection_identities(x in vector(16, 8), a in set(16)) {
        let p = x.project(&a);
        prop_assert_eq!(p.project(&a), p.clone());
        let rest = x.support().difference(&a);
        prop_assert_eq!(p.add(&x.project(&rest)), x.clone());
        prop_assert_eq!(x.project_complement(&a), x.project(&rest));
    }

    #[test]
    fn weight_is_additive(a in set(20), b in set(20), w in weights()) {
        let b = b.difference(&a);
        let lhs: Rational = weight_of(&w, &a.union(&b));
        let rhs: Rational = weight_of::<Rational>(&w, &a) + weight_of::<Rational>(&w, &b);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exact_encodings_round_trip(x in vector(30, 10), a in set(30)) {
        prop_assert_eq!(SparseVector::<Rational>::decode(&x.encode()).unwrap(), x.clone());
        prop_assert_eq!(a.to_string().parse::<IndexSet>().unwrap(), a.clone());
        for (_, c) in x.iter() {
            prop_assert_eq!(&Rational::decode(&c.encode()).unwrap(), c);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn norm_axioms_exact(x in vector(12, 8), y in vector(12, 8), k in -24i64..=24) {
        let c = q(k);
        for e in exact_engines() {
            let nx: Rational = norm(e.as_ref(), &x).unwrap();
            let ny: Rational = norm(e.as_ref(), &y).unwrap();
            prop_assert!(nx >= Rational::from_i64(0));
            prop_assert_eq!(nx.is_zero(), x.is_zero());
            let scaled: Rational = norm(e.as_ref(), &x.scale(&c)).unwrap();
            prop_assert_eq!(scaled, num_traits::Signed::abs(&c) * nx.clone(), "homogeneity on {}", e.name());
            let sum: Rational = norm(e.as_ref(), &x.add(&y)).unwrap();
            prop_assert!(sum <= nx + ny, "triangle inequality on {}", e.name());
        }
    }

    #[test]
    fn norm_axioms_float(x in vector(12, 8), y in vector(12, 8), k in -24i64..=24) {
        let (x, y) = (x.to_float(), y.to_float());
        let c = k as f64 / 8.0;
        for e in float_engines() {
            let nx: f64 = norm(e.as_ref(), &x).unwrap();
            let ny: f64 = norm(e.as_ref(), &y).unwrap();
            let tol = 1e-9 * (1.0 + nx + ny);
            let scaled: f64 = norm(e.as_ref(), &x.scale(&c)).unwrap();
            prop_assert!((scaled - c.abs() * nx).abs() <= tol * (1.0 + c.abs()), "homogeneity on {}", e.name());
            let sum: f64 = norm(e.as_ref(), &x.add(&y)).unwrap();
            prop_assert!(sum <= nx + ny + tol, "triangle inequality on {}", e.name());
        }
    }
}

proptest! {
    #[test]
    fn spreading_norm_grows_under_spreads(
        pairs in prop::collection::btree_set(1usize..=12, 1..=6),
        shift in prop::collection::btree_set(1usize..=12, 6),
        coeffs in prop::collection::vec((1i64..=24, any::<bool>()), 6),
    ) {
        let s: Vec<usize> = pairs.into_iter().collect();
        let t: Vec<usize> = shift.into_iter().take(s.len()).collect();
        let spread: Vec<usize> = s.iter().zip(&t).map(|(a, b)| *a.max(b)).collect();
        let c: Vec<Rational> = coeffs.iter().take(s.len()).map(|(k, neg)| q(if *neg { -k } else { *k })).collect();
        let x = SparseVector::from_entries(s.iter().copied().zip(c.iter().cloned())).unwrap();
        let y = SparseVector::from_entries(spread.iter().copied().zip(c)).unwrap();
        let e = SpreadingFamily::new(3).unwrap();
        let (nx, ny): (Rational, Rational) = (norm(&e, &x).unwrap(), norm(&e, &y).unwrap());
        prop_assert!(nx <= ny);
    }

    #[test]
    fn modular_bisection_lands_in_its_band(x in vector(12, 8)) {
        prop_assume!(!x.is_zero());
        let e = ModularSpace::arithmetic(12);
        let x = x.to_float();
        let lambda: f64 = norm(&e, &x).unwrap();
        let m = e.modular(&x, lambda);
        prop_assert!((1.0 - 10.0 * DEFAULT_TOL_MOD..=1.0).contains(&m), "modular value {}", m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dual_pairing(f in vector(12, 6), x in vector(12, 8)) {
        let e = SpreadingFamily::new(3).unwrap();
        let sol = dual_norm_polyhedral(&e, &f).unwrap();
        let nx: Rational = norm(&e, &x).unwrap();
        prop_assert!(f.dot(&x) <= sol.value.clone() * nx);
        let np: Rational = norm(&e, &sol.primal).unwrap();
        prop_assert!(np <= Rational::from_i64(1));
        prop_assert_eq!(f.dot(&sol.primal), sol.value);
    }
}

#[test]
fn closed_forms() {
    for n in 2..=3u32 {
        let e = SpreadingFamily::new(n).unwrap();
        let f: usize = (1..=n as usize).product();
        let first: Rational = norm(&e, &vector::indicator::<Rational>(&IndexSet::range(1, f))).unwrap();
        let second: Rational = norm(&e, &vector::indicator::<Rational>(&IndexSet::range(f + 1, 2 * f))).unwrap();
        assert_eq!(first, Rational::from_i64((f / n as usize) as i64));
        assert_eq!(second, Rational::from_i64(f as i64));
    }
    for n in (2..=12).step_by(2) {
        let e = PartialSumSpace::new(Some(4 * n));
        let (l, r) = constants::interleaved_tuple::<Rational>(n).sides().unwrap();
        let (nl, nr): (Rational, Rational) = (norm(&e, &l).unwrap(), norm(&e, &r).unwrap());
        assert_eq!(nl, Rational::from_i64((n / 2 * (3 * n / 2 + 1)) as i64));
        assert_eq!(nr, Rational::from_i64(2 * n as i64));
    }
}

/// Every `m`-subset with `min` inside at least `max` outside, by plain filtering.
fn brute_greedy_sets(x: &SparseVector<Rational>, m: usize) -> Vec<IndexSet> {
    let supp: Vec<usize> = x.support().iter().collect();
    let modulus = |i: usize| num_traits::Signed::abs(&x.coef(i));
    supp.iter()
        .copied()
        .combinations(m)
        .filter(|pick| {
            let inside = pick.iter().map(|&i| modulus(i)).min();
            let outside = supp.iter().filter(|i| !pick.contains(i)).map(|&i| modulus(i)).max();
            match (inside, outside) {
                (Some(a), Some(b)) => a >= b,
                _ => true,
            }
        })
        .map(|p| IndexSet::new(p).unwrap())
        .collect()
}

proptest! {
    #[test]
    fn greedy_runs_are_nested_projections(x in vector(16, 10)) {
        let run = greedy_run(&x, x.support_len());
        for step in &run {
            prop_assert_eq!(step.approximant.clone(), x.project(&step.lambda));
            prop_assert!(is_greedy_set(&x, &step.lambda));
        }
        for pair in run.windows(2) {
            prop_assert!(pair[0].lambda.is_subset(&pair[1].lambda));
            prop_assert_eq!(pair[1].lambda.len(), pair[0].lambda.len() + 1);
        }
    }

    #[test]
    fn enumerate_all_matches_subset_filtering(x in tied_vector(14, 12)) {
        for m in 0..=x.support_len() {
            prop_assert_eq!(greedy_sets(&x, m).unwrap(), brute_greedy_sets(&x, m), "m = {}", m);
        }
    }

    #[test]
    fn residual_identity_below_alpha(x in tied_vector(14, 10), pick in any::<prop::sample::Index>(), mask in any::<u64>()) {
        let m = 1 + pick.index(x.support_len());
        let step = greedy_run(&x, m).pop().unwrap();
        let alpha = step.alpha.unwrap();
        let a = IndexSet::new((1..alpha).filter(|i| mask >> (i % 64) & 1 == 1)).unwrap();
        let reduced = x.project_complement(&a);
        let again = greedy_run(&reduced, m).pop().unwrap();
        prop_assert_eq!(again.approximant, step.approximant.clone());
        for lambda in greedy_sets(&x, m).unwrap() {
            if lambda.first().unwrap() > a.last().unwrap_or(0) {
                prop_assert!(is_greedy_set(&reduced, &lambda));
                prop_assert_eq!(reduced.project(&lambda), x.project(&lambda));
            }
        }
    }

    #[test]
    fn truncation_is_idempotent_and_contractive(x in vector(12, 8), k in 1i64..=24) {
        let lambda = q(k);
        let t = truncate(&x, &lambda).unwrap();
        prop_assert_eq!(truncate(&t, &lambda).unwrap(), t.clone());
        for e in unconditional_engines() {
            let (nt, nx): (Rational, Rational) = (norm(e.as_ref(), &t).unwrap(), norm(e.as_ref(), &x).unwrap());
            prop_assert!(nt <= nx, "{}", e.name());
        }
    }
}

/// `min ‖x − P_A x‖` over `A` beside `Λ` with `|A| <= |Λ|`.
fn cardinality_sigma(e: &dyn NormEngine, x: &SparseVector<Rational>, lambda: &IndexSet, side: Side, window: usize) -> Rational {
    let pool: Vec<usize> = match side {
        Side::Left => (1..lambda.first().unwrap()).collect(),
        Side::Right => (lambda.last().unwrap() + 1..=window).collect(),
    };
    (0..=lambda.len().min(pool.len()))
        .flat_map(|k| pool.iter().copied().combinations(k))
        .map(|a| norm(e, &x.project_complement(&IndexSet::new(a).unwrap())).unwrap())
        .min()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sigma_properties(x in vector(10, 7), pick in any::<prop::sample::Index>(), w in weights()) {
        prop_assume!(!x.is_zero());
        let e = PartialSumSpace::new(Some(10));
        let m = 1 + pick.index(x.support_len());
        let nx: Rational = norm(&e, &x).unwrap();
        for lambda in greedy_sets(&x, m).unwrap() {
            for side in [Side::Left, Side::Right] {
                let s = sigma_for_set(&e, &w, &x, &lambda, side, Some(10)).unwrap();
                prop_assert!(s.value <= nx);
                prop_assert_eq!(s.value.clone(), sigma_brute_force(&e, &w, &x, &lambda, side, 10).unwrap());
                let unit = sigma_for_set(&e, &WeightSequence::ones(), &x, &lambda, side, Some(10)).unwrap();
                prop_assert_eq!(unit.value, cardinality_sigma(&e, &x, &lambda, side, 10));
            }
        }
    }

    #[test]
    fn democracy_dominates_one_sided_constants(window in 3usize..=8, which in 0usize..4, w in weights()) {
        let engines: Vec<Box<dyn NormEngine>> = vec![
            Box::new(LpSpace::new(LpExponent::One)),
            Box::new(SpreadingFamily::with_window(3, 8).unwrap()),
            Box::new(PartialSumSpace::new(Some(8))),
            Box::new(LpSpace::new(LpExponent::Infinity)),
        ];
        let e = engines[which].as_ref();
        let opts = SetPairOptions::default();
        let c = |name, rel| set_pair_constant::<Rational>(name, e, &w, rel, window, &opts).unwrap().value;
        let d = c(ConstantName::WDemocracy, SetRelation::Disjoint);
        prop_assert!(d >= c(ConstantName::WConservative, SetRelation::Precedes));
        prop_assert!(d >= c(ConstantName::WReverseConservative, SetRelation::Follows));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn witnesses_replay(seed in any::<u64>(), which in 0usize..3) {
        let engines: Vec<Box<dyn NormEngine>> = vec![
            Box::new(SpreadingFamily::new(2).unwrap()),
            Box::new(PartialSumSpace::new(Some(6))),
            Box::new(LpSpace::new(LpExponent::Infinity)),
        ];
        let e = engines[which].as_ref();
        let w = WeightSequence::parse("alternating_half").unwrap();
        let opts = EstimateOptions {
            window: Some(6),
            search_window: Some(6),
            sampler: SamplerSpec::with_seed(seed).scaled(0.05),
            set_pairs: SetPairOptions { seed, ..Default::default() },
        };
        for name in ConstantName::ALL {
            let est = estimate::<Rational>(name, e, &w, &opts).unwrap();
            prop_assert_eq!(replay(&est, e, &w).unwrap(), est.value.clone(), "{} on {}", name, e.name());
            let f = estimate::<f64>(name, e, &w, &opts).unwrap();
            prop_assert!((replay(&f, e, &w).unwrap() - f.value).abs() <= 1e-12 * f.value.abs().max(1.0));
        }
    }

    #[test]
    fn claim_reports_are_reproducible_and_flag_lower_bounds(
        seed in any::<u64>(),
        id in prop::sample::select(vec!["L1", "L38", "P36", "T39b", "L311", "P41a", "T47"]),
    ) {
        let claim = find_claim(id).unwrap();
        let e = PartialSumSpace::new(Some(8));
        let w = WeightSequence::parse(claim.default_weight).unwrap();
        let opts = ClaimOptions {
            window: Some(8),
            samples: 60,
            seed,
            sampler: SamplerSpec::with_seed(seed).scaled(0.02),
            ..Default::default()
        };
        let a = run_claim::<Rational>(claim, &e, &w, &opts).unwrap();
        let b = run_claim::<Rational>(claim, &e, &w, &opts).unwrap();
        prop_assert_eq!(&a, &b);
        let lower = a.constants.iter().any(|c| c.estimate.kind == BoundKind::WitnessLowerBound);
        prop_assert_eq!(a.soundness_caveat, lower);
        prop_assert_eq!(a.passed, a.violation_count == 0);
    }
}
