//! Exact integer arithmetic for the divisor-type coefficients.

use num_complex::Complex64;

use crate::characters::{Character, KroneckerCharacter};
use crate::error::{Error, Result};
use crate::specfun::EULER_GAMMA;

/// Ascending list of the positive divisors of `n`.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("divisors of 0".into()));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn jacobi(mut a: i64, mut n: i64) -> i8 {
    // n odd and positive
    a = a.rem_euclid(n);
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        (a, n) = (n, a);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(d / n)`.
pub fn kronecker(d: i64, n: i64) -> i8 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    result * jacobi(d, n)
}

fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, k)| k == 1)
}

/// True iff `d` is 1 or the discriminant of a quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A validated fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FundamentalDiscriminant(i64);

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if is_fundamental_discriminant(d) {
            Ok(FundamentalDiscriminant(d))
        } else {
            Err(Error::InvalidArgument(format!("{d} is not a fundamental discriminant")))
        }
    }

    /// Discriminant of `Q(sqrt(d))` for a squarefree radicand `d != 0, 1`.
    pub fn from_radicand(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d.unsigned_abs()) {
            return Err(Error::InvalidArgument(format!("radicand {d} must be squarefree and not 0 or 1")));
        }
        Self::new(if d.rem_euclid(4) == 1 { d } else { 4 * d })
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    RealQuadratic,
}

/// Arithmetic and analytic data of `Q` or a real quadratic field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldContext {
    pub kind: FieldKind,
    pub r1: u32,
    pub disc: Option<FundamentalDiscriminant>,
    pub gamma_minus1: f64,
    pub gamma_0: f64,
}

impl FieldContext {
    pub fn rational() -> Self {
        FieldContext {
            kind: FieldKind::Rational,
            r1: 1,
            disc: None,
            gamma_minus1: 1.0,
            gamma_0: EULER_GAMMA,
        }
    }

    /// `Q(sqrt(D))` from its discriminant `D > 1`.
    pub fn real_quadratic(disc: i64) -> Result<Self> {
        let d = FundamentalDiscriminant::new(disc)?;
        if disc <= 1 {
            return Err(Error::InvalidArgument(format!(
                "real quadratic field needs discriminant > 1, got {disc}"
            )));
        }
        let laurent = crate::lfunc::quadratic_laurent(d)?;
        Ok(FieldContext {
            kind: FieldKind::RealQuadratic,
            r1: 2,
            disc: Some(d),
            gamma_minus1: laurent.residue,
            gamma_0: laurent.const_term,
        })
    }

    /// `Q(sqrt(d))` from a squarefree radicand `d > 1`.
    pub fn from_radicand(d: i64) -> Result<Self> {
        if d <= 1 {
            return Err(Error::InvalidArgument(format!("radicand must exceed 1, got {d}")));
        }
        Self::real_quadratic(FundamentalDiscriminant::from_radicand(d)?.value())
    }

    /// `|Delta_K|`: 1 for `Q`, `D` otherwise.
    pub fn abs_disc(&self) -> u64 {
        self.disc.map_or(1, |d| d.abs())
    }

    /// Order `m = r1 + 1` of the attached G-kernel.
    pub fn kernel_order(&self) -> u32 {
        self.r1 + 1
    }

    pub fn label(&self) -> String {
        match self.disc {
            None => "Q".into(),
            Some(d) => format!("Q(sqrt) disc {}", d.value()),
        }
    }
}

/// Number of ideals of norm `n`.
pub fn f_k(ctx: &FieldContext, n: u64) -> i64 {
    match ctx.disc {
        None => 1,
        Some(d) => d_kronecker(d.value(), n),
    }
}

/// Ideal count from prime splitting, independent of the convolution route.
pub fn f_k_oracle(d: FundamentalDiscriminant, n: u64) -> i64 {
    factorize(n)
        .into_iter()
        .map(|(p, k)| match kronecker(d.value(), p as i64) {
            1 => k as i64 + 1,
            -1 => (k % 2 == 0) as i64,
            _ => 1,
        })
        .product()
}

fn d_kronecker(d: i64, n: u64) -> i64 {
    let mut s = 0;
    for k in divisors(n).expect("n >= 1") {
        s += kronecker(d, k as i64) as i64;
    }
    s
}

/// `sum_{k | n} chi(k)`.
pub fn d_chi<C: Character + ?Sized>(chi: &C, n: u64) -> Complex64 {
    divisors(n)
        .expect("n >= 1")
        .into_iter()
        .map(|k| chi.value(k as i64))
        .sum()
}

/// `D_K(n) = sum_{d | n} f_K(d)`.
pub fn big_d_k(ctx: &FieldContext, n: u64) -> i64 {
    divisors(n).expect("n >= 1").into_iter().map(|d| f_k(ctx, d)).sum()
}

/// `D_{K,chi}(n) = sum_{d | n} f_K(d) chi(n/d)`.
pub fn big_d_k_chi<C: Character + ?Sized>(ctx: &FieldContext, chi: &C, n: u64) -> Complex64 {
    divisors(n)
        .expect("n >= 1")
        .into_iter()
        .map(|d| chi.value((n / d) as i64) * f_k(ctx, d) as f64)
        .sum()
}

/// `script D_D(n) = sum_{k | n} d_{chi_D}(k)`.
pub fn script_d(d: FundamentalDiscriminant, n: u64) -> i64 {
    divisors(n)
        .expect("n >= 1")
        .into_iter()
        .map(|k| d_kronecker(d.value(), k))
        .sum()
}

/// `script D_{D,chi}(n) = sum_{k | n} d_{chi_D}(k) chi(n/k)`.
pub fn script_d_chi<C: Character + ?Sized>(d: FundamentalDiscriminant, chi: &C, n: u64) -> Complex64 {
    divisors(n)
        .expect("n >= 1")
        .into_iter()
        .map(|k| chi.value((n / k) as i64) * d_kronecker(d.value(), k) as f64)
        .sum()
}

/// Number of roots of unity `w_D` for a negative discriminant.
pub fn w_d(d: FundamentalDiscriminant) -> Result<u32> {
    match d.value() {
        -3 => Ok(6),
        -4 => Ok(4),
        v if v < -4 => Ok(2),
        v => Err(Error::InvalidArgument(format!("w_D is tabulated only for D < 0, got {v}"))),
    }
}

/// Weight used when scaling an identity by `w_D`; the flag is set when `D > 0`
/// falls outside the tabulated range and the `D < -4` value 2 is used.
pub fn corollary_weight(d: FundamentalDiscriminant) -> (u32, bool) {
    match w_d(d) {
        Ok(w) => (w, false),
        Err(_) => (2, true),
    }
}

/// Representation count `R_D(n) = w_D d_{chi_D}(n)`, requiring `gcd(n, D) = 1`.
pub fn r_d(d: FundamentalDiscriminant, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("r_D needs n >= 1".into()));
    }
    let w = w_d(d)?;
    if gcd(n, d.abs()) != 1 {
        return Err(Error::Hypothesis(format!(
            "r_D needs n coprime with the discriminant: gcd({n}, {}) > 1",
            d.value()
        )));
    }
    Ok(w as u64 * d_kronecker(d.value(), n) as u64)
}

/// `w_D d_{chi_D}(n)` without the coprimality check; `D > 0` uses weight 2.
pub fn r_d_permissive(d: FundamentalDiscriminant, n: u64) -> i64 {
    corollary_weight(d).0 as i64 * d_kronecker(d.value(), n)
}

/// Sieved coefficient tables on `1..=n_max` (index 0 unused).
pub mod tables {
    use super::*;

    /// `f_K(n)` for all `n <= n_max`.
    pub fn f_k(ctx: &FieldContext, n_max: usize) -> Vec<i64> {
        match ctx.disc {
            None => {
                let mut v = vec![1; n_max + 1];
                v[0] = 0;
                v
            }
            Some(d) => d_kronecker_table(d, n_max),
        }
    }

    /// `d_{chi_D}(n)` for all `n <= n_max`.
    pub fn d_kronecker_table(d: FundamentalDiscriminant, n_max: usize) -> Vec<i64> {
        let chi = KroneckerCharacter::new(d).expect("validated discriminant");
        let mut v = vec![0i64; n_max + 1];
        for k in 1..=n_max {
            let c = chi.value_i8(k as i64) as i64;
            if c != 0 {
                let mut j = k;
                while j <= n_max {
                    v[j] += c;
                    j += k;
                }
            }
        }
        v
    }

    /// Dirichlet convolution with the constant function 1.
    pub fn sum_over_divisors(a: &[i64]) -> Vec<i64> {
        let n_max = a.len().saturating_sub(1);
        let mut v = vec![0i64; a.len()];
        for d in 1..=n_max {
            if a[d] != 0 {
                let mut j = d;
                while j <= n_max {
                    v[j] += a[d];
                    j += d;
                }
            }
        }
        v
    }

    /// `(a * chi)(n) = sum_{d | n} a(d) chi(n/d)`.
    pub fn twist<C: Character + ?Sized>(a: &[i64], chi: &C) -> Vec<Complex64> {
        let n_max = a.len().saturating_sub(1);
        let mut v = vec![Complex64::new(0.0, 0.0); a.len()];
        for d in 1..=n_max {
            if a[d] == 0 {
                continue;
            }
            let mut k = 1;
            while d * k <= n_max {
                v[d * k] += chi.value(k as i64) * a[d] as f64;
                k += 1;
            }
        }
        v
    }
}
