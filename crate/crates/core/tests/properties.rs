use std::collections::HashSet;

use proptest::prelude::*;

use pointless::algebra::field::prime_power;
use pointless::algebra::{Fe, FiniteField, MPoly, Poly, RationalFunction};
use pointless::curves::{ArtinSchreierCurve, PlaneQuartic};
use pointless::density::{montecarlo_pointless_rate, DensityProblem, Perm};
use pointless::elliptic::{EllipticCurve, EllipticFunction, EllipticPoint};
use pointless::harness::{parse_fixtures, to_toml, verify, TABLES};
use pointless::search::{self, Family, Klein4OddEngine, Mode, QuarticChar2Engine, SearchConfig};
use pointless::zeta;
use pointless::Error;

fn field(q: u64) -> FiniteField {
    let (p, n) = prime_power(q).unwrap();
    FiniteField::standard(p, n).unwrap()
}

const ODD: [u64; 8] = [3, 5, 7, 9, 11, 13, 25, 27];
const EVEN: [u64; 5] = [2, 4, 8, 16, 32];
const ANY: [u64; 10] = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27];

fn fe(k: &FiniteField, raw: u64) -> Fe {
    Fe(raw % k.q())
}

fn poly(k: &FiniteField, raw: &[u64]) -> Poly {
    Poly::new(k, raw.iter().map(|&c| fe(k, c)).collect())
}

#[test]
fn squares_are_half_of_each_odd_field() {
    for q in ODD {
        let k = field(q);
        assert_eq!(k.elements().filter(|&v| k.is_square(v)).count() as u64, q.div_ceil(2));
    }
}

#[test]
fn frobenius_fixes_the_base_field() {
    for q in ANY {
        let k = field(q);
        assert!(k.elements().all(|v| k.pow(v, q) == v));
    }
}

#[test]
fn char2_square_roots() {
    for q in EVEN {
        let k = field(q);
        for v in k.elements() {
            let r = k.sqrt(v).unwrap();
            assert_eq!(k.mul(r, r), v);
        }
    }
}

proptest! {
    #[test]
    fn interpolation_roundtrips(qi in 0..ANY.len(), values in prop::collection::vec(any::<u64>(), 1..8)) {
        let k = field(ANY[qi]);
        let nodes: Vec<(Fe, Fe)> = k.elements().zip(values).map(|(x, v)| (x, fe(&k, v))).collect();
        let p = Poly::interpolate(&k, &nodes).unwrap();
        for (x, v) in nodes {
            prop_assert_eq!(p.eval(x), v);
        }
    }

    #[test]
    fn quartic_chart_and_lines_agree(qi in 0..3usize, raw in prop::collection::vec(any::<u64>(), 15)) {
        let k = field([3, 5, 4][qi]);
        let mut f = MPoly::zero(&k);
        let mut it = raw.iter();
        for a in 0..=4u32 {
            for b in 0..=4 - a {
                f.add_term([a, b, 4 - a - b], fe(&k, *it.next().unwrap()));
            }
        }
        let Ok(c) = PlaneQuartic::new(f) else { return Ok(()) };
        prop_assume!(c.is_smooth().unwrap());
        for i in 1..=2 {
            prop_assert_eq!(c.count_chart(i).unwrap(), c.count_lines(i).unwrap());
        }
    }

    #[test]
    fn artin_schreier_parity(qi in 0..4usize, num in prop::collection::vec(any::<u64>(), 1..6), den in prop::collection::vec(any::<u64>(), 2..5)) {
        let k = field(EVEN[qi]);
        let Ok(r) = RationalFunction::new(poly(&k, &num), poly(&k, &den)) else { return Ok(()) };
        let Ok(c) = ArtinSchreierCurve::new(r) else { return Ok(()) };
        let rational_poles = c.conductor().iter().filter(|p| p.0 == 1).count() as u64;
        prop_assert_eq!(c.count(1).unwrap() % 2, rational_poles % 2);
    }

    #[test]
    fn hasse_bound(qi in 0..ODD.len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let k = field(ODD[qi]);
        let Ok(e) = EllipticCurve::new(&k, fe(&k, a), fe(&k, b), fe(&k, c)) else { return Ok(()) };
        let q = k.q() as i64;
        let t = q + 1 - e.order() as i64;
        prop_assert!(t * t <= 4 * q);
    }

    #[test]
    fn quotient_reps_are_a_transversal(qi in 0..ODD.len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), m in 2u32..=3) {
        let k = field(ODD[qi]);
        let Ok(e) = EllipticCurve::new(&k, fe(&k, a), fe(&k, b), fe(&k, c)) else { return Ok(()) };
        let reps = e.quotient_reps(m, false).unwrap();
        let (n1, n2) = e.group_structure().unwrap();
        let gcd = |x: u64, y: u64| num_integer::Integer::gcd(&x, &y);
        prop_assert_eq!(reps.len() as u64, gcd(m as u64, n1) * gcd(m as u64, n2));
        let points = e.points().unwrap();
        let multiples: HashSet<EllipticPoint> = points.iter().map(|&p| e.smul(m as i64, p)).collect();
        for (i, &r) in reps.iter().enumerate() {
            for &s in &reps[..i] {
                prop_assert!(!multiples.contains(&e.add(r, e.neg(s))));
            }
        }
    }

    #[test]
    fn vanishing_orders_add(qi in 0..4usize, curve in prop::collection::vec(any::<u64>(), 3), f in prop::collection::vec(any::<u64>(), 6), g in prop::collection::vec(any::<u64>(), 6), pick in any::<prop::sample::Index>()) {
        let k = field([5, 7, 9, 11][qi]);
        let Ok(e) = EllipticCurve::new(&k, fe(&k, curve[0]), fe(&k, curve[1]), fe(&k, curve[2])) else { return Ok(()) };
        let f = EllipticFunction::new(6, f.iter().map(|&c| fe(&k, c)).collect()).unwrap();
        let g = EllipticFunction::new(6, g.iter().map(|&c| fe(&k, c)).collect()).unwrap();
        prop_assume!(!f.is_zero() && !g.is_zero());
        let (a1, b1) = f.parts(&e);
        let (a2, b2) = g.parts(&e);
        let a = a1.mul(&a2).add(&b1.mul(&b2).mul(&e.cubic()));
        let b = a1.mul(&b2).add(&a2.mul(&b1));
        let fg = EllipticFunction::from_parts(&a, &b).unwrap();
        let points = e.points().unwrap();
        let p = points[pick.index(points.len())];
        prop_assume!(!p.is_infinity());
        let order = |h: &EllipticFunction| h.vanishing_order(&e, p).unwrap();
        prop_assert_eq!(order(&fg), order(&f) + order(&g));
    }

    #[test]
    fn principal_divisors_have_degree_zero(qi in 0..3usize, curve in prop::collection::vec(any::<u64>(), 3), f in prop::collection::vec(any::<u64>(), 6)) {
        let k = field([5, 7, 11][qi]);
        let Ok(e) = EllipticCurve::new(&k, fe(&k, curve[0]), fe(&k, curve[1]), fe(&k, curve[2])) else { return Ok(()) };
        let f = EllipticFunction::new(6, f.iter().map(|&c| fe(&k, c)).collect()).unwrap();
        prop_assume!(!f.is_zero());
        let s = f.divisor_shape(&e, EllipticPoint::Infinity, 6).unwrap();
        let zeros: u32 = s.zeros.iter().map(|&(deg, ord)| deg * ord).sum();
        prop_assert_eq!(zeros, s.pole_order_at_inf);
    }

    #[test]
    fn counts_either_roundtrip_or_are_rejected(q in prop::sample::select(vec![3u64, 4, 5, 7, 8, 9]), g in 1usize..=3, raw in prop::collection::vec(0u64..2000, 3)) {
        let counts = &raw[..g];
        match zeta::l_from_counts(q, g, counts) {
            Ok(l) => {
                for (i, &n) in counts.iter().enumerate() {
                    prop_assert_eq!(zeta::predicted_counts(&l, q, i + 1), num_bigint::BigInt::from(n));
                }
            }
            Err(e) => prop_assert!(matches!(e, Error::NonIntegralResult(_)), "{e:?}"),
        }
    }
}

#[test]
fn half_integral_counts_are_rejected() {
    // a_2 = (s_1^2 - s_2)/2 with s_1 = 0 and s_2 = q^2 + 1 - N_2 odd
    assert!(matches!(zeta::l_from_counts(3, 2, &[4, 11]), Err(Error::NonIntegralResult(_))));
}

#[test]
fn fixture_weil_polynomials_are_valid() {
    let r = verify(&parse_fixtures(TABLES).unwrap(), 3);
    for e in r.entries.iter().filter(|e| e.counts.len() >= e.claimed_genus as usize) {
        assert!(e.real_weil.is_some(), "{}", e.id);
        assert!(e.failures.is_empty(), "{}: {:?}", e.id, e.failures);
    }
}

#[test]
fn towers_have_genus_four_zeta() {
    let towers: Vec<_> = parse_fixtures(TABLES).unwrap().into_iter().filter(|e| e.id.starts_with("tower-")).collect();
    let r = verify(&towers, 4);
    for e in &r.entries {
        assert_eq!(e.counts.len(), 4, "{}", e.id);
        assert!(e.real_weil.is_some() && e.failures.is_empty(), "{}: {:?}", e.id, e.failures);
    }
}

#[test]
fn trigonal_rows_match_fiber_rows() {
    let entries = parse_fixtures(TABLES).unwrap();
    let r = verify(&entries, 1);
    for t in r.entries.iter().filter(|e| e.id.starts_with("trigonal-")) {
        let twin = t.id.replace("trigonal-", "fiber-");
        let f = r.entries.iter().find(|e| e.id == twin).expect("fiber row for the same q");
        assert_eq!((t.counts[0], f.counts[0]), (0, 0), "{}", t.id);
    }
}

fn random_transitive(seed: u64, degree: usize) -> Option<DensityProblem> {
    let mut rng = seed;
    let mut next = || {
        rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        rng >> 33
    };
    let gens: Vec<Perm> = (0..2)
        .map(|_| {
            let mut p: Perm = (0..degree as u32).collect();
            for i in (1..degree).rev() {
                p.swap(i, (next() % (i as u64 + 1)) as usize);
            }
            p
        })
        .collect();
    DensityProblem::new(degree, gens).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn density_bounds_and_regularity(seed in any::<u64>(), degree in 2usize..=8) {
        let Some(g) = random_transitive(seed, degree) else { return Ok(()) };
        let r = g.density().unwrap();
        let d = degree as u64;
        prop_assert!(num_rational::Ratio::new(1, d) <= r.delta);
        prop_assert!(r.delta <= num_rational::Ratio::new(r.group_order - (d - 1), r.group_order));
        prop_assert_eq!(r.delta == num_rational::Ratio::new(1, d), r.group_order == d);
    }

    #[test]
    fn density_ignores_relabeling(seed in any::<u64>(), degree in 2usize..=7, relabel_seed in any::<u64>()) {
        let Some(g) = random_transitive(seed, degree) else { return Ok(()) };
        let mut relabel: Perm = (0..degree as u32).collect();
        let mut state = relabel_seed;
        for i in (1..degree).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            relabel.swap(i, ((state >> 33) % (i as u64 + 1)) as usize);
        }
        let inverse = {
            let mut inv = vec![0u32; degree];
            for (i, &v) in relabel.iter().enumerate() {
                inv[v as usize] = i as u32;
            }
            inv
        };
        let conj: Vec<Perm> = g
            .generators()
            .iter()
            .map(|p| (0..degree).map(|i| relabel[p[inverse[i] as usize] as usize]).collect())
            .collect();
        let h = DensityProblem::new(degree, conj).unwrap();
        prop_assert_eq!(g.density().unwrap(), h.density().unwrap());
    }
}

#[test]
fn montecarlo_is_reproducible() {
    let k = field(7);
    let a = montecarlo_pointless_rate(Family::Klein4HyperOdd, &k, 3000, 11).unwrap();
    let b = montecarlo_pointless_rate(Family::Klein4HyperOdd, &k, 3000, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fixture_serialization_is_idempotent() {
    let once = to_toml(&parse_fixtures(TABLES).unwrap());
    let twice = to_toml(&parse_fixtures(&once).unwrap());
    assert_eq!(once, twice);
}

#[test]
fn verify_ignores_order_and_threads() {
    let entries = parse_fixtures(TABLES).unwrap();
    let forward = verify(&entries, 1);
    let mut reversed_entries = entries.clone();
    reversed_entries.reverse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let reversed = pool.install(|| verify(&reversed_entries, 1));
    let key = |r: &pointless::harness::VerificationReport| {
        let mut v: Vec<_> = r.entries.iter().map(|e| (e.id.clone(), e.counts.clone(), e.verdict)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    };
    assert_eq!(key(&forward), key(&reversed));
    assert_eq!(forward.exit_status, reversed.exit_status);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn census_is_invariant_under_jobs(qi in 0..3usize, jobs in 2usize..=5) {
        let k = field([5, 7, 9][qi]);
        let e = Klein4OddEngine::new(&k, Fe::ONE).unwrap();
        let one = search::run(&e, &SearchConfig::census()).unwrap();
        let many = search::run(&e, &SearchConfig::census().with_jobs(jobs)).unwrap();
        prop_assert_eq!(&one.survivors, &many.survivors);
        prop_assert_eq!(&one.stats, &many.stats);
        prop_assert_eq!((one.candidates, one.classes), (many.candidates, many.classes));
        for s in &one.survivors {
            prop_assert_eq!(s.counts[0], 0);
            prop_assert_eq!(s.genus, 3);
        }
    }
}

#[test]
fn first_find_is_the_earliest_survivor() {
    let k = field(8);
    let e = QuarticChar2Engine::new(&k).unwrap();
    let census = search::run(&e, &SearchConfig::census()).unwrap();
    for jobs in [1, 3] {
        let first = search::run(&e, &SearchConfig { mode: Mode::FirstFind, ..SearchConfig::default() }.with_jobs(jobs))
            .unwrap();
        assert_eq!(first.survivors[0].key, census.survivors[0].key);
    }
}
