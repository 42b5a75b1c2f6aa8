use proptest::prelude::*;
use riesz::arith::*;
use riesz::characters::{character_group, Character};
use riesz::Error;

fn disc(d: i64) -> FundamentalDiscriminant {
    FundamentalDiscriminant::new(d).unwrap()
}

fn naive_divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn pow_mod(b: i64, e: u64, p: i64) -> i64 {
    let mut r = 1i64;
    let b = b.rem_euclid(p);
    for _ in 0..e {
        r = r * b % p;
    }
    r
}

/// Legendre symbol by Euler's criterion.
fn euler_legendre(d: i64, p: i64) -> i8 {
    match pow_mod(d, ((p - 1) / 2) as u64, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

fn lattice_count(n: u64) -> i64 {
    let r = (n as f64).sqrt() as i64 + 1;
    let mut c = 0;
    for a in -r..=r {
        for b in -r..=r {
            if (a * a + b * b) as u64 == n {
                c += 1;
            }
        }
    }
    c
}

#[test]
fn divisors_match_naive() {
    for n in 1..=400 {
        assert_eq!(divisors(n).unwrap(), naive_divisors(n), "n = {n}");
    }
    assert!(matches!(divisors(0), Err(Error::InvalidArgument(_))));
}

#[test]
fn factorize_rebuilds_n() {
    for n in 2..=2000u64 {
        let f = factorize(n);
        assert_eq!(f.iter().map(|&(p, k)| p.pow(k)).product::<u64>(), n);
        assert!(f.iter().all(|&(p, _)| naive_divisors(p).len() == 2));
    }
}

#[test]
fn kronecker_matches_euler_criterion_on_odd_primes() {
    for p in [3i64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        for d in [-8i64, -7, -4, -3, 5, 8, 12, 13, 17, 21] {
            assert_eq!(kronecker(d, p), euler_legendre(d, p), "({d}/{p})");
        }
    }
}

#[test]
fn kronecker_at_two() {
    // (d/2) = 0 for even d, +1 for d = +-1 mod 8, -1 for d = +-3 mod 8
    assert_eq!(kronecker(5, 2), -1);
    assert_eq!(kronecker(-7, 2), 1);
    assert_eq!(kronecker(17, 2), 1);
    assert_eq!(kronecker(8, 2), 0);
    assert_eq!(kronecker(-3, 2), -1);
}

#[test]
fn fundamental_discriminants() {
    let listed = [-3, -4, -7, -8, -11, 5, 8, 12, 13, 17, 21, 24, 28, 29];
    for d in listed {
        assert!(is_fundamental_discriminant(d), "{d}");
    }
    for d in [0, 2, 3, 4, 9, 16, 20, -12 * 4, 25, -1] {
        assert!(!is_fundamental_discriminant(d), "{d}");
    }
    assert_eq!(FundamentalDiscriminant::from_radicand(5).unwrap().value(), 5);
    assert_eq!(FundamentalDiscriminant::from_radicand(2).unwrap().value(), 8);
    assert_eq!(FundamentalDiscriminant::from_radicand(3).unwrap().value(), 12);
    assert_eq!(FundamentalDiscriminant::from_radicand(-1).unwrap().value(), -4);
    assert!(FundamentalDiscriminant::from_radicand(4).is_err());
}

#[test]
fn ideal_counts_match_prime_splitting() {
    for d in [5, 8, 12, 13] {
        let ctx = FieldContext::real_quadratic(d).unwrap();
        let table = tables::f_k(&ctx, 10_000);
        for n in 1..=10_000u64 {
            let oracle = f_k_oracle(disc(d), n);
            assert_eq!(f_k(&ctx, n), oracle, "D = {d}, n = {n}");
            assert_eq!(table[n as usize], oracle, "table D = {d}, n = {n}");
        }
    }
}

#[test]
fn rational_field_counts_are_one() {
    let ctx = FieldContext::rational();
    assert!((1..50).all(|n| f_k(&ctx, n) == 1));
    assert_eq!(big_d_k(&ctx, 12), 6);
    assert_eq!(ctx.r1, 1);
    assert_eq!(ctx.kernel_order(), 2);
}

#[test]
fn two_squares_counts() {
    let d = disc(-4);
    for n in 1..=500u64 {
        let brute = lattice_count(n);
        assert_eq!(r_d_permissive(d, n), brute, "n = {n}");
        if n % 2 == 1 {
            assert_eq!(r_d(d, n).unwrap() as i64, brute, "n = {n}");
        } else {
            assert!(matches!(r_d(d, n), Err(Error::Hypothesis(_))));
        }
    }
}

#[test]
fn root_of_unity_counts() {
    assert_eq!(w_d(disc(-3)).unwrap(), 6);
    assert_eq!(w_d(disc(-4)).unwrap(), 4);
    assert_eq!(w_d(disc(-7)).unwrap(), 2);
    assert!(w_d(disc(5)).is_err());
    assert_eq!(corollary_weight(disc(5)), (2, true));
    assert_eq!(corollary_weight(disc(-3)), (6, false));
}

#[test]
fn convolution_tables_match_pointwise() {
    let ctx = FieldContext::real_quadratic(13).unwrap();
    let f = tables::f_k(&ctx, 300);
    let big = tables::sum_over_divisors(&f);
    let chi = &character_group(7).unwrap()[2];
    let tw = tables::twist(&f, chi);
    for n in 1..=300u64 {
        assert_eq!(big[n as usize], big_d_k(&ctx, n));
        assert!((tw[n as usize] - big_d_k_chi(&ctx, chi, n)).norm() < 1e-12);
        assert_eq!(script_d(disc(13), n), big_d_k(&ctx, n));
        assert!((script_d_chi(disc(13), chi, n) - big_d_k_chi(&ctx, chi, n)).norm() < 1e-12);
        let dc = d_chi(&riesz::characters::kronecker_character(13).unwrap(), n);
        assert_eq!(dc.re as i64, f[n as usize]);
    }
}

proptest! {
    #[test]
    fn ideal_count_is_multiplicative(a in 1u64..300, b in 1u64..300) {
        prop_assume!(gcd(a, b) == 1);
        let ctx = FieldContext::real_quadratic(5).unwrap();
        prop_assert_eq!(f_k(&ctx, a * b), f_k(&ctx, a) * f_k(&ctx, b));
    }

    #[test]
    fn kronecker_is_completely_multiplicative_in_n(a in 1i64..500, b in 1i64..500) {
        for d in [-4i64, 5, 8, 12, 13] {
            prop_assert_eq!(kronecker(d, a * b), kronecker(d, a) * kronecker(d, b));
        }
    }

    #[test]
    fn kronecker_periodic_mod_disc(n in 1i64..2000) {
        for d in [5i64, 8, 12, 13, -3, -4] {
            let chi = riesz::characters::kronecker_character(d).unwrap();
            prop_assert_eq!(chi.value(n).re as i8, kronecker(d, n));
            prop_assert_eq!(kronecker(d, n), kronecker(d, n + d.abs()));
        }
    }

    #[test]
    fn gcd_divides_both(a in 1u64..100_000, b in 1u64..100_000) {
        let g = gcd(a, b);
        prop_assert!(a % g == 0 && b % g == 0);
        prop_assert_eq!(gcd(a / g, b / g), 1);
    }
}
