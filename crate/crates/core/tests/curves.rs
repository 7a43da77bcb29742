use std::collections::BTreeMap;

use avlift::ec_arith::{
    analyze, count_points, derived_equivalent, is_prime, legendre, parse_curve, within_hasse_bound, CurveSpec,
};

/// Affine solutions counted by trying every pair `(x, y)`, plus infinity.
fn count_by_pairs(p: u64, a: u64, b: u64) -> u64 {
    let mut n = 1;
    for x in 0..p {
        let rhs = (x * x % p * x + a * x + b) % p;
        n += (0..p).filter(|y| y * y % p == rhs).count() as u64;
    }
    n
}

fn curves_over(p: u64) -> impl Iterator<Item = CurveSpec> {
    (0..p).flat_map(move |a| (0..p).filter_map(move |b| parse_curve(p as i64, a as i64, b as i64).ok()))
}

fn primes(lo: u64, hi: u64) -> impl Iterator<Item = u64> {
    (lo..=hi).filter(|&n| is_prime(n))
}

#[test]
fn counts_match_pair_enumeration() {
    for p in primes(5, 31) {
        for c in curves_over(p) {
            assert_eq!(count_points(&c).unwrap(), count_by_pairs(p, c.a(), c.b()), "{c:?}");
        }
    }
}

#[test]
fn hasse_bound_up_to_200() {
    for p in primes(5, 200) {
        for c in curves_over(p) {
            let t = analyze(&c).unwrap().trace;
            assert!(within_hasse_bound(t, p), "{c:?} t={t}");
        }
    }
}

#[test]
fn p_rank_is_constant_on_j_classes() {
    for p in primes(5, 50) {
        let mut by_j: BTreeMap<u64, u8> = BTreeMap::new();
        let curves: Vec<_> = curves_over(p).collect();
        for c in &curves {
            let an = analyze(c).unwrap();
            let seen = *by_j.entry(an.j).or_insert(an.p_rank);
            assert_eq!(seen, an.p_rank, "p={p} j={}", an.j);
        }
        // pairwise form of the same statement on a sample
        for e in curves.iter().step_by(7) {
            for f in curves.iter().step_by(11) {
                if derived_equivalent(e, f).unwrap() {
                    assert_eq!(analyze(e).unwrap().p_rank, analyze(f).unwrap().p_rank);
                }
            }
        }
    }
}

#[test]
fn quadratic_twist_negates_trace() {
    for p in primes(5, 60) {
        let nonresidue = (2..p).find(|&c| legendre(c, p) == -1).unwrap();
        for c in curves_over(p) {
            let twist = c.scaled(nonresidue).unwrap();
            assert_eq!(analyze(&twist).unwrap().trace, -analyze(&c).unwrap().trace, "{c:?}");
            // a square scaling is an F_p-isomorphism and keeps the trace
            let same = c.scaled(nonresidue * nonresidue % p).unwrap();
            assert_eq!(analyze(&same).unwrap().trace, analyze(&c).unwrap().trace);
        }
    }
}

#[test]
fn supersingular_j_values_small_primes() {
    // j = 1728 is supersingular iff p = 3 mod 4, j = 0 iff p = 2 mod 3
    for p in primes(5, 97) {
        let j1728 = analyze(&parse_curve(p as i64, 1, 0).unwrap()).unwrap();
        assert_eq!(j1728.ordinary, p % 4 == 1, "p={p}");
        let j0 = analyze(&parse_curve(p as i64, 0, 1).unwrap()).unwrap();
        assert_eq!(j0.ordinary, p % 3 == 1, "p={p}");
    }
}

#[test]
fn j_invariant_range_is_the_whole_field() {
    // every j in F_p occurs for some curve
    for p in primes(5, 40) {
        let mut js: Vec<u64> = curves_over(p).map(|c| analyze(&c).unwrap().j).collect();
        js.sort_unstable();
        js.dedup();
        assert_eq!(js.len() as u64, p);
    }
}
