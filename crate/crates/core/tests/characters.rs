use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use riesz::characters::*;

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

#[test]
fn group_has_q_minus_one_characters() {
    for q in PRIMES {
        let g = character_group(q).unwrap();
        assert_eq!(g.len() as u64, q - 1);
        assert!(g[0].is_principal());
        assert_eq!(even_characters(q).unwrap().len() as u64, (q - 1) / 2);
    }
}

#[test]
fn composite_or_small_modulus_rejected() {
    for q in [0, 1, 2, 4, 9, 15] {
        assert!(character_group(q).is_err(), "q = {q}");
    }
}

#[test]
fn primitive_roots_generate() {
    for q in PRIMES.into_iter().chain([17, 19, 23, 101]) {
        let g = primitive_root(q).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut a = 1;
        for _ in 0..q - 1 {
            a = a * g % q;
            seen.insert(a);
        }
        assert_eq!(seen.len() as u64, q - 1, "q = {q}, g = {g}");
    }
}

#[test]
fn even_orthogonality_is_exact() {
    for q in PRIMES {
        let half = ((q - 1) / 2) as f64;
        for h in 1..q as i64 {
            for a in 1..q as i64 {
                let s = even_orthogonality(q, h, a).unwrap();
                let want = if (a - h).rem_euclid(q as i64) == 0 || (a + h).rem_euclid(q as i64) == 0 {
                    half
                } else {
                    0.0
                };
                assert!((s - want).abs() <= 1e-12, "q={q} h={h} a={a}: {s}");
            }
        }
    }
}

#[test]
fn gauss_sum_modulus() {
    for q in PRIMES {
        for chi in character_group(q).unwrap().iter().filter(|c| !c.is_principal()) {
            let g = gauss_sum(chi);
            assert!((g.norm_sqr() - q as f64).abs() <= 1e-10, "q={q} j={}", chi.index());
        }
        assert!((gauss_sum(&character_group(q).unwrap()[0]) + 1.0).norm() < 1e-12);
    }
}

#[test]
fn gauss_sum_of_even_character_conjugate_relation() {
    // chi even: G(conj chi) = conj G(chi)
    for q in PRIMES {
        for chi in even_characters(q).unwrap() {
            let a = gauss_sum(&chi.conj());
            let b = gauss_sum(&chi).conj();
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn sine_product_equals_q() {
    for q in 2..=13u64 {
        let p: f64 = (1..q).map(|n| 2.0 * (PI * n as f64 / q as f64).sin()).product();
        assert!((p - q as f64).abs() <= 1e-12, "q = {q}: {p}");
        assert!((riesz::lfunc::log_sine_sum(q) - (q as f64).ln()).abs() <= 1e-12);
    }
}

#[test]
fn cosine_from_characters() {
    for q in PRIMES {
        for h in 1..q as i64 {
            for a in 1..q as i64 {
                let direct = (2.0 * PI * (h * a) as f64 / q as f64).cos();
                assert!((cos_via_characters(q, h, a).unwrap() - direct).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn real_characters() {
    let g = character_group(7).unwrap();
    let real: Vec<u64> = g.iter().filter(|c| c.is_real()).map(|c| c.index()).collect();
    assert_eq!(real, vec![0, 3]);
    // the quadratic character mod 7 is the Legendre symbol, which is odd
    let legendre = &g[3];
    for n in 1..7 {
        assert_eq!(legendre.value(n).re.round() as i8, riesz::arith::kronecker(-7, n));
    }
    assert!(!legendre.is_even());
}

#[test]
fn kronecker_character_parity() {
    assert!(kronecker_character(5).unwrap().is_even());
    assert!(!kronecker_character(-4).unwrap().is_even());
    assert!(kronecker_character(1).is_err());
    assert!(kronecker_character(6).is_err());
    let chi = kronecker_character(12).unwrap();
    assert_eq!(chi.modulus(), 12);
    assert!((gauss_sum(&chi) - Complex64::new(12f64.sqrt(), 0.0)).norm() < 1e-12);
}

proptest! {
    #[test]
    fn characters_are_multiplicative(qi in 0usize..5, j in 0u64..12, a in 1i64..200, b in 1i64..200) {
        let q = PRIMES[qi];
        let chi = &character_group(q).unwrap()[(j % (q - 1)) as usize];
        let lhs = chi.value(a * b);
        let rhs = chi.value(a) * chi.value(b);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!((chi.value(a) * chi.conj().value(a) - Complex64::new((a % q as i64 != 0) as i64 as f64, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn parity_matches_value_at_minus_one(qi in 0usize..5, j in 0u64..12) {
        let q = PRIMES[qi];
        let chi = &character_group(q).unwrap()[(j % (q - 1)) as usize];
        let sign = chi.value(-1).re;
        prop_assert_eq!(chi.is_even(), sign > 0.0);
    }
}
