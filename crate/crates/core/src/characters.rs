//! Dirichlet characters modulo a prime, Kronecker characters, Gauss sums.

use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{factorize, kronecker, FundamentalDiscriminant};
use crate::error::{Error, Result};

/// Pointwise interface shared by the character types.
pub trait Character: Sync {
    fn modulus(&self) -> u64;
    fn value(&self, n: i64) -> Complex64;
    fn is_even(&self) -> bool;
    fn is_principal(&self) -> bool;
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).first() == Some(&(n, 1))
}

/// Smallest primitive root modulo the prime `q`.
pub fn primitive_root(q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::InvalidArgument(format!("q must be prime, got {q}")));
    }
    if q == 2 {
        return Ok(1);
    }
    let order = q - 1;
    let primes: Vec<u64> = factorize(order).into_iter().map(|(p, _)| p).collect();
    (2..q)
        .find(|&g| primes.iter().all(|&p| pow_mod(g, order / p, q) != 1))
        .ok_or_else(|| Error::Domain(format!("no primitive root mod {q}")))
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

#[derive(Debug)]
struct GroupTables {
    generator: u64,
    /// Discrete log base `generator` of each residue; `u32::MAX` at 0.
    dlog: Vec<u32>,
    /// `exp(2 pi i k / (q - 1))`.
    roots: Vec<Complex64>,
}

/// A character modulo a prime `q`, `chi(g^k) = exp(2 pi i j k / (q - 1))`.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    index: u64,
    tables: Arc<GroupTables>,
    values: Vec<Complex64>,
}

impl DirichletCharacter {
    fn build(index: u64, tables: Arc<GroupTables>) -> Self {
        let q = tables.dlog.len() as u64;
        let order = q - 1;
        let values = (0..q as usize)
            .map(|a| match tables.dlog[a] {
                u32::MAX => Complex64::new(0.0, 0.0),
                k => tables.roots[((index * k as u64) % order) as usize],
            })
            .collect();
        DirichletCharacter {
            modulus: q,
            index,
            tables,
            values,
        }
    }

    /// Exponent `j` in `[0, q - 2]`.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn generator(&self) -> u64 {
        self.tables.generator
    }

    /// Value table on residues `0..q`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn conj(&self) -> DirichletCharacter {
        let order = self.modulus - 1;
        Self::build((order - self.index) % order, self.tables.clone())
    }

    /// True when `chi` takes only the values 0 and +-1.
    pub fn is_real(&self) -> bool {
        (2 * self.index) % (self.modulus - 1) == 0
    }
}

impl Character for DirichletCharacter {
    fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    fn value(&self, n: i64) -> Complex64 {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    fn is_even(&self) -> bool {
        self.index % 2 == 0
    }

    fn is_principal(&self) -> bool {
        self.index == 0
    }
}

/// All `q - 1` characters modulo the prime `q >= 3`, ordered by index.
pub fn character_group(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q < 3 || !is_prime(q) {
        return Err(Error::InvalidArgument(format!("q must be prime and at least 3, got {q}")));
    }
    let g = primitive_root(q)?;
    let order = q - 1;
    let mut dlog = vec![u32::MAX; q as usize];
    let mut a = 1u64;
    for k in 0..order {
        dlog[a as usize] = k as u32;
        a = a * g % q;
    }
    let roots = (0..order)
        .map(|k| {
            let t = 2.0 * k as f64 / order as f64;
            Complex64::new(crate::specfun::cos_pi(t), crate::specfun::sin_pi(t))
        })
        .collect();
    let tables = Arc::new(GroupTables {
        generator: g,
        dlog,
        roots,
    });
    Ok((0..order).map(|j| DirichletCharacter::build(j, tables.clone())).collect())
}

/// The even characters modulo `q`, principal first.
pub fn even_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    Ok(character_group(q)?.into_iter().filter(|c| c.is_even()).collect())
}

/// `G(chi) = sum_{h=1}^{q-1} chi(h) e^{2 pi i h / q}`; equals -1 for a
/// principal character modulo a prime.
pub fn gauss_sum<C: Character + ?Sized>(chi: &C) -> Complex64 {
    let q = chi.modulus();
    (1..q)
        .map(|h| {
            let t = 2.0 * h as f64 / q as f64;
            chi.value(h as i64) * Complex64::new(crate::specfun::cos_pi(t), crate::specfun::sin_pi(t))
        })
        .sum()
}

/// `sum_{chi even} chi(a) conj(chi(h))` modulo the prime `q`.
pub fn even_orthogonality(q: u64, h: i64, a: i64) -> Result<f64> {
    let qi = q as i64;
    if h.rem_euclid(qi) == 0 || a.rem_euclid(qi) == 0 {
        return Err(Error::InvalidArgument(format!("q = {q} must divide neither h nor a")));
    }
    let s: Complex64 = even_characters(q)?
        .iter()
        .map(|c| c.value(a) * c.value(h).conj())
        .sum();
    Ok(s.re)
}

/// The real primitive character `n -> (D / n)` modulo `|D|`.
#[derive(Debug, Clone)]
pub struct KroneckerCharacter {
    disc: FundamentalDiscriminant,
    table: Vec<i8>,
}

impl KroneckerCharacter {
    pub fn new(disc: FundamentalDiscriminant) -> Result<Self> {
        if disc.value() == 1 {
            return Err(Error::InvalidArgument("D = 1 gives the principal character".into()));
        }
        let m = disc.abs() as i64;
        let table = (0..m).map(|n| kronecker(disc.value(), n)).collect();
        Ok(KroneckerCharacter { disc, table })
    }

    pub fn disc(&self) -> FundamentalDiscriminant {
        self.disc
    }

    #[inline]
    pub fn value_i8(&self, n: i64) -> i8 {
        self.table[n.rem_euclid(self.table.len() as i64) as usize]
    }
}

impl Character for KroneckerCharacter {
    fn modulus(&self) -> u64 {
        self.disc.abs()
    }

    #[inline]
    fn value(&self, n: i64) -> Complex64 {
        Complex64::new(self.value_i8(n) as f64, 0.0)
    }

    fn is_even(&self) -> bool {
        self.disc.value() > 0
    }

    fn is_principal(&self) -> bool {
        false
    }
}

pub fn kronecker_character(d: i64) -> Result<KroneckerCharacter> {
    KroneckerCharacter::new(FundamentalDiscriminant::new(d)?)
}

/// `cos(2 pi h a / q)` rebuilt from even characters and Gauss sums.
pub fn cos_via_characters(q: u64, h: i64, a: i64) -> Result<f64> {
    let chars = even_characters(q)?;
    let s: Complex64 = chars
        .iter()
        .map(|c| c.value(a) * c.value(h) * gauss_sum(&c.conj()))
        .sum();
    Ok(s.re / (q - 1) as f64)
}
