//! Exact arithmetic over Z and Z_N: primes, units, totient, canonical residues.
//!
//! Everything is unsigned. A residue is always stored in canonical form
//! `0 <= value < modulus`; the only way to produce a "negative" residue is
//! [`ZModElement::neg`].

use num_integer::Integer;
use thiserror::Error;

/// Default cap on the modulus of a [`ZModElement`].
pub const DEFAULT_MODULUS_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("modulus {modulus} exceeds the cap {cap}")]
    ModulusTooLarge { modulus: u64, cap: u64 },
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("modulus mismatch: {left} vs {right}")]
    Mismatch { left: u64, right: u64 },
}

/// A residue class of Z_N in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZModElement {
    value: u64,
    modulus: u64,
}

impl ZModElement {
    /// Reduces `value` modulo `modulus`.
    pub fn new(value: u64, modulus: u64) -> Result<Self, ModError> {
        if modulus == 0 {
            return Err(ModError::ZeroModulus);
        }
        if modulus > DEFAULT_MODULUS_CAP {
            return Err(ModError::ModulusTooLarge {
                modulus,
                cap: DEFAULT_MODULUS_CAP,
            });
        }
        Ok(Self {
            value: value % modulus,
            modulus,
        })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    fn same(self, other: Self) -> Result<u64, ModError> {
        if self.modulus != other.modulus {
            return Err(ModError::Mismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(self.modulus)
    }

    pub fn add(self, other: Self) -> Result<Self, ModError> {
        let n = self.same(other)?;
        Ok(Self {
            value: add_mod(self.value, other.value, n),
            modulus: n,
        })
    }

    pub fn sub(self, other: Self) -> Result<Self, ModError> {
        let n = self.same(other)?;
        Ok(Self {
            value: sub_mod(self.value, other.value, n),
            modulus: n,
        })
    }

    pub fn mul(self, other: Self) -> Result<Self, ModError> {
        let n = self.same(other)?;
        Ok(Self {
            value: mul_mod(self.value, other.value, n),
            modulus: n,
        })
    }

    pub fn neg(self) -> Self {
        Self {
            value: neg_mod(self.value, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn is_unit(self) -> bool {
        self.value.gcd(&self.modulus) == 1
    }
}

/// The multiplicative group U(Z_N) as a sorted list of residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    pub modulus: u64,
    pub elements: Vec<u64>,
}

impl UnitGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, u: u64) -> bool {
        self.elements.binary_search(&u).is_ok()
    }
}

pub fn add_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 + b as u128) % n as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, n: u64) -> u64 {
    add_mod(a % n, n - b % n, n)
}

pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn neg_mod(a: u64, n: u64) -> u64 {
    (n - a % n) % n
}

/// Sieve of Eratosthenes: all primes `p <= bound`, ascending.
pub fn primes_upto(bound: u64) -> Vec<u64> {
    prime_table(bound)
        .iter()
        .enumerate()
        .filter(|(_, &p)| p)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Primality table indexed by `0..=bound`.
pub fn prime_table(bound: u64) -> Vec<bool> {
    let len = bound as usize + 1;
    let mut table = vec![true; len];
    table[0] = false;
    if len > 1 {
        table[1] = false;
    }
    let mut i = 2usize;
    while i * i < len {
        if table[i] {
            let mut j = i * i;
            while j < len {
                table[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    table
}

/// Trial division.
pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// True iff `x == 1` or `x` is prime.
pub fn is_prime_or_one(x: u64) -> bool {
    x == 1 || is_prime(x)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn units(n: u64) -> UnitGroup {
    let elements = if n == 1 {
        vec![0]
    } else {
        (1..n).filter(|&u| u.gcd(&n) == 1).collect()
    };
    UnitGroup { modulus: n, elements }
}

/// Euler's totient via the prime factorization of `n`.
pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut phi = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            phi = phi / p * (p - 1);
        }
        p += 1;
    }
    if m > 1 {
        phi = phi / m * (m - 1);
    }
    phi
}

/// Inverse of `u` modulo `n`, if it exists.
pub fn inv_mod(u: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let e = (u as i128).extended_gcd(&(n as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(n as i128) as u64)
}

pub fn mod_inverse(u: ZModElement) -> Result<ZModElement, ModError> {
    inv_mod(u.value, u.modulus)
        .map(|v| ZModElement {
            value: v,
            modulus: u.modulus,
        })
        .ok_or(ModError::NotInvertible {
            value: u.value,
            modulus: u.modulus,
        })
}

/// Multiplicative order of a unit `u` modulo `n`.
pub fn unit_order(u: u64, n: u64) -> u64 {
    let mut x = u % n;
    let mut k = 1;
    let one = 1 % n;
    while x != one {
        x = mul_mod(x, u, n);
        k += 1;
    }
    k
}

/// Splits `n > 0` as `2^k * odd`.
pub fn two_adic(n: u64) -> (u32, u64) {
    let k = n.trailing_zeros();
    (k, n >> k)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
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
    small
}
