//! Membership criteria for G_N: divisor bounds, the cyclotomic and
//! orbit-count classifications, window sets Ā_{m,N} and the exclusion tests
//! for translations. Every criterion here is one-directional or a bound;
//! membership itself is only ever decided by enumeration.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::modarith::{divisors, gcd, is_prime, is_prime_or_one, two_adic, units};
use crate::sieve::{build_sieve, prime_split, GoldbachSieve, SieveError};
use crate::symmetry::{compute_symmetry_group, SymmetryError, SymmetryGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CriteriaError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("window needs an even m with 0 < m < N, got m={m}, N={n}")]
    BadWindow { m: u64, n: u64 },
    #[error("invalid pair d={d}, alpha={alpha} for N={n}")]
    BadPair { n: u64, d: u64, alpha: u64 },
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

fn group_of(sieve: &GoldbachSieve) -> Result<SymmetryGroup, CriteriaError> {
    Ok(compute_symmetry_group(sieve)?)
}

/// Counts behind the divisor bound on |G_{2p}|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeBound {
    pub p: u64,
    /// |A_{2p} ∩ U(Z_{2p})|.
    pub alpha: u64,
    /// |Ā_{2p} − {p}|.
    pub beta: u64,
    pub gcd: u64,
    /// Divisors of gcd(α, β).
    pub divisors: Vec<u64>,
    /// The even ones among `divisors`.
    pub even_divisors: Vec<u64>,
    pub sums_to_p_minus_one: bool,
    pub both_even: bool,
    pub group_order: u64,
    /// |G_{2p}| divides gcd(α, β).
    pub divides: bool,
}

pub fn twice_prime_divisor_bound(p: u64) -> Result<PrimeBound, CriteriaError> {
    if p < 3 || !is_prime(p) {
        return Err(CriteriaError::NotOddPrime(p));
    }
    let n = 2 * p;
    let sieve = build_sieve(n)?;
    let us = units(n).elements;
    let alpha = us.iter().filter(|&&u| !sieve.in_complement(u)).count() as u64;
    let beta = sieve.complement.iter().filter(|&&x| x != p).count() as u64;
    let g = gcd(alpha, beta);
    let divs = if g == 0 { Vec::new() } else { divisors(g) };
    let group_order = group_of(&sieve)?.order() as u64;
    Ok(PrimeBound {
        p,
        alpha,
        beta,
        gcd: g,
        even_divisors: divs.iter().copied().filter(|d| d % 2 == 0).collect(),
        divisors: divs,
        sums_to_p_minus_one: alpha + beta == p - 1,
        both_even: alpha % 2 == 0 && beta % 2 == 0,
        group_order,
        divides: g != 0 && g % group_order == 0,
    })
}

/// For p = 2q + 1 with q prime, G_{2p} ≅ Z_2.
pub fn safe_prime_verdict(p: u64) -> Option<&'static str> {
    (is_prime(p) && p >= 5 && is_prime((p - 1) / 2)).then_some("Z2")
}

/// Every odd prime up to ⌊√N⌋ divides N.
pub fn is_cyclotomic(n: u64) -> bool {
    let root = n.isqrt();
    (3..=root).step_by(2).filter(|&q| is_prime(q)).all(|q| n % q == 0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicVerdict {
    pub n: u64,
    pub cyclotomic: bool,
    /// Ā_N = U(Z_N).
    pub complement_is_units: bool,
    /// H = U(Z_N).
    pub unit_part_is_units: bool,
    /// Generator 2m of G^(1), if nontrivial.
    pub two_m: Option<u64>,
    pub group_order: u64,
}

impl CyclotomicVerdict {
    pub fn holds(&self) -> bool {
        !self.cyclotomic || (self.complement_is_units && self.unit_part_is_units)
    }
}

/// For cyclotomic N: Ā_N = U(Z_N) and G_N = ⟨T_{2m}⟩ ⋊ U(Z_N).
pub fn cyclotomic_structure_check(n: u64) -> Result<CyclotomicVerdict, CriteriaError> {
    let sieve = build_sieve(n)?;
    let g = group_of(&sieve)?;
    let us = units(n).elements;
    Ok(CyclotomicVerdict {
        n,
        cyclotomic: is_cyclotomic(n),
        complement_is_units: sieve.complement == us,
        unit_part_is_units: g.unit_part == us,
        two_m: g.g1_generator,
        group_order: g.order() as u64,
    })
}

/// H = U(Z_N) ⟹ N cyclotomic. True when the implication holds, including
/// vacuously.
pub fn converse_cyclotomic_check(n: u64) -> Result<bool, CriteriaError> {
    let sieve = build_sieve(n)?;
    if n <= 6 || sieve.complement.is_empty() {
        return Ok(true);
    }
    let g = group_of(&sieve)?;
    Ok(g.unit_part != units(n).elements || is_cyclotomic(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NClassification {
    pub n: u64,
    pub cyclotomic: bool,
    /// Exactly one non-dividing small prime.
    pub mono_orbital: bool,
    /// At most one.
    pub qmo: bool,
    /// Mono-orbital N has a nonempty complement.
    pub mono_orbital_has_pairs: bool,
    /// q.m.o 2^k·N̄ passes q.m.o down to 2^j·N̄ for 1 < j < k.
    pub qmo_inherited: bool,
}

fn qmo(n: u64) -> Result<bool, CriteriaError> {
    Ok(prime_split(n)?.q_list.len() <= 1)
}

pub fn orbit_classification(n: u64) -> Result<NClassification, CriteriaError> {
    let split = prime_split(n)?;
    let mono_orbital = split.q_list.len() == 1;
    let is_qmo = split.q_list.len() <= 1;
    let mono_orbital_has_pairs = !mono_orbital || !build_sieve(n)?.complement.is_empty();
    let (k, odd) = two_adic(n);
    let mut qmo_inherited = true;
    if is_qmo && k > 1 {
        for j in 2..k {
            qmo_inherited &= qmo(odd << j)?;
        }
    }
    let c = NClassification {
        n,
        cyclotomic: is_cyclotomic(n),
        mono_orbital,
        qmo: is_qmo,
        mono_orbital_has_pairs,
        qmo_inherited,
    };
    debug_assert!(!c.cyclotomic || c.qmo);
    debug_assert!(!c.mono_orbital || c.qmo);
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationBound {
    pub n: u64,
    /// Covered odd residues.
    pub alpha: u64,
    /// |Ā_N|.
    pub beta: u64,
    pub gcd: u64,
    pub g1_order: u64,
    /// |G^(1)| divides gcd(α, β).
    pub divides: bool,
    /// G^(1) ≤ ⟨T_{N/gcd(α,β)}⟩.
    pub within_bound: bool,
}

impl TranslationBound {
    pub fn holds(&self) -> bool {
        self.divides && self.within_bound
    }

    /// The generator N/gcd(α, β) of the bounding cyclic group.
    pub fn bound_generator(&self) -> Option<u64> {
        (self.gcd != 0).then(|| self.n / gcd(self.gcd, self.n))
    }
}

/// α counts covered odd residues and β the complement, so α + β = N/2.
pub fn translation_divisor_bound(n: u64) -> Result<TranslationBound, CriteriaError> {
    let sieve = build_sieve(n)?;
    let g = group_of(&sieve)?;
    let odd_in_complement = sieve.complement.iter().filter(|&&x| x % 2 == 1).count() as u64;
    let alpha = n / 2 - odd_in_complement;
    let beta = sieve.complement.len() as u64;
    let gg = gcd(alpha, beta);
    let g1_order = g.translation_order();
    let bound = TranslationBound {
        n,
        alpha,
        beta,
        gcd: gg,
        g1_order,
        divides: gg != 0 && gg % g1_order == 0,
        within_bound: false,
    };
    let within_bound = match (bound.bound_generator(), g.g1_generator) {
        (_, None) => true,
        (Some(step), Some(d)) => d % step == 0,
        (None, Some(_)) => false,
    };
    Ok(TranslationBound { within_bound, ..bound })
}

/// Ā_{m,N}: q in [1, m−1] with q and m − q both prime or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSet {
    pub m: u64,
    pub n: u64,
    pub members: Vec<u64>,
}

pub fn window_set(m: u64, n: u64) -> Result<WindowSet, CriteriaError> {
    if m == 0 || m % 2 != 0 || m >= n {
        return Err(CriteriaError::BadWindow { m, n });
    }
    Ok(WindowSet {
        m,
        n,
        members: (1..m)
            .filter(|&q| is_prime_or_one(q) && is_prime_or_one(m - q))
            .collect(),
    })
}

/// Pairs (d, α) with 2d | N, 2d < N, gcd(α, N) = 1 and 2dα < N.
pub fn valid_pairs(n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for two_d in divisors(n).into_iter().filter(|&x| x % 2 == 0 && x < n) {
        for alpha in (1..n / two_d).filter(|&a| gcd(a, n) == 1) {
            out.push((two_d / 2, alpha));
        }
    }
    out
}

fn check_pair(n: u64, d: u64, alpha: u64) -> Result<u64, CriteriaError> {
    let m = 2 * d * alpha;
    if d == 0 || alpha == 0 || n % (2 * d) != 0 || gcd(alpha, n) != 1 || m >= n {
        return Err(CriteriaError::BadPair { n, d, alpha });
    }
    Ok(m)
}

/// First exclusion test that fires for T_{2dα}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    /// Ā_{m,N} ∩ Ā_N is empty.
    EmptyWindow,
    /// The intersection is not symmetric under x ↦ m − x.
    Asymmetric,
    /// The translated union is a proper subset of Ā_N.
    ProperUnion,
    /// The translated union differs from Ā_N.
    UnionMismatch,
    NotExcluded,
}

impl Exclusion {
    pub fn excludes(self) -> bool {
        self != Self::NotExcluded
    }
}

fn window_intersection(sieve: &GoldbachSieve, m: u64) -> Result<Vec<u64>, CriteriaError> {
    Ok(window_set(m, sieve.n)?
        .members
        .into_iter()
        .filter(|&x| sieve.in_complement(x))
        .collect())
}

/// ⋃_{j < N/2d} T_{mj}(window), stopping at the first element outside Ā_N.
/// Returns `None` on such an element.
fn translated_union(sieve: &GoldbachSieve, window: &[u64], m: u64, d: u64) -> Option<BTreeSet<u64>> {
    let n = sieve.n;
    let mut union = BTreeSet::new();
    for j in 0..n / (2 * d) {
        let shift = (m * j) % n;
        for &x in window {
            let y = (x + shift) % n;
            if !sieve.in_complement(y) {
                return None;
            }
            union.insert(y);
        }
    }
    Some(union)
}

pub fn exclusion_criterion(sieve: &GoldbachSieve, d: u64, alpha: u64) -> Result<Exclusion, CriteriaError> {
    let m = check_pair(sieve.n, d, alpha)?;
    let window = window_intersection(sieve, m)?;
    if window.is_empty() {
        return Ok(Exclusion::EmptyWindow);
    }
    let set: BTreeSet<u64> = window.iter().copied().collect();
    if window.iter().any(|&x| !set.contains(&(m - x))) {
        return Ok(Exclusion::Asymmetric);
    }
    Ok(match translated_union(sieve, &window, m, d) {
        None => Exclusion::UnionMismatch,
        Some(u) if u.len() < sieve.complement.len() => Exclusion::ProperUnion,
        Some(_) => Exclusion::NotExcluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageCheck {
    /// Ā_N = ⋃_j T_{2dαj}(Ā_{2dα,N} ∩ Ā_N).
    pub identity_holds: bool,
    /// T_{2dα} ∈ G_N by enumeration.
    pub in_group: bool,
}

impl CoverageCheck {
    pub fn agrees(&self) -> bool {
        self.identity_holds == self.in_group
    }
}

pub fn coverage_identity_check(
    sieve: &GoldbachSieve,
    group: &SymmetryGroup,
    d: u64,
    alpha: u64,
) -> Result<CoverageCheck, CriteriaError> {
    let m = check_pair(sieve.n, d, alpha)?;
    let window = window_intersection(sieve, m)?;
    let identity_holds =
        translated_union(sieve, &window, m, d).is_some_and(|u| u.iter().copied().eq(sieve.complement.iter().copied()));
    Ok(CoverageCheck {
        identity_holds,
        in_group: group.contains_translation(m),
    })
}

/// T_{2dα} ∈ G_N forces a nonempty window intersection symmetric under x ↦ m − x.
pub fn window_necessity_holds(
    sieve: &GoldbachSieve,
    group: &SymmetryGroup,
    d: u64,
    alpha: u64,
) -> Result<bool, CriteriaError> {
    let m = check_pair(sieve.n, d, alpha)?;
    if !group.contains_translation(m) {
        return Ok(true);
    }
    let window = window_intersection(sieve, m)?;
    let set: BTreeSet<u64> = window.iter().copied().collect();
    Ok(!window.is_empty() && window.iter().all(|&x| set.contains(&(m - x))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum T2Verdict {
    /// N < 10 or empty complement.
    NotApplicable,
    Holds,
    Fails,
}

/// For N ≥ 10 with Ā_N ≠ ∅, T_2 ∉ G_N.
pub fn t2_exclusion_check(n: u64) -> Result<T2Verdict, CriteriaError> {
    let sieve = build_sieve(n)?;
    if n < 10 || sieve.complement.is_empty() {
        return Ok(T2Verdict::NotApplicable);
    }
    let g = group_of(&sieve)?;
    Ok(if g.contains_translation(2) {
        T2Verdict::Fails
    } else {
        T2Verdict::Holds
    })
}
