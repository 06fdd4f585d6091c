//! The affine group Aff(Z_N) of maps x ↦ a·x + b with a a unit, plus the
//! subgroup utilities needed to name the groups that turn up: closure,
//! centers and an isomorphism-type descriptor.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::modarith::{add_mod, gcd, inv_mod, mul_mod, neg_mod, units};

/// Upper bound on the number of maps materialized at once.
pub const AFFINE_CAPACITY: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AffineError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("multiplier {a} is not a unit modulo {n}")]
    NotUnit { a: u64, n: u64 },
    #[error("modulus mismatch: {left} vs {right}")]
    Mismatch { left: u64, right: u64 },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("input set is not closed under composition")]
    NotClosed,
    #[error("empty map set")]
    Empty,
}

/// x ↦ a·x + b on Z_N. Every map factors as T_b ∘ f_a.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    pub a: u64,
    pub b: u64,
    pub n: u64,
}

impl AffineMap {
    pub fn new(a: u64, b: u64, n: u64) -> Result<Self, AffineError> {
        if n == 0 {
            return Err(AffineError::ZeroModulus);
        }
        let a = a % n;
        if gcd(a, n) != 1 {
            return Err(AffineError::NotUnit { a, n });
        }
        Ok(Self { a, b: b % n, n })
    }

    pub fn identity(n: u64) -> Self {
        Self { a: 1 % n, b: 0, n }
    }

    /// T_d : x ↦ x + d.
    pub fn translation(d: u64, n: u64) -> Self {
        Self { a: 1 % n, b: d % n, n }
    }

    /// f_ν : x ↦ ν·x.
    pub fn unit_map(nu: u64, n: u64) -> Result<Self, AffineError> {
        Self::new(nu, 0, n)
    }

    pub fn apply(self, x: u64) -> u64 {
        add_mod(mul_mod(self.a, x, self.n), self.b, self.n)
    }

    pub fn is_identity(self) -> bool {
        self == Self::identity(self.n)
    }

    pub fn is_translation(self) -> bool {
        self.a == 1 % self.n
    }

    pub fn order(self) -> u64 {
        let mut x = self;
        let mut k = 1;
        while !x.is_identity() {
            x = compose_unchecked(x, self);
            k += 1;
        }
        k
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T_{} f_{}", self.b, self.a)
    }
}

fn compose_unchecked(f: AffineMap, g: AffineMap) -> AffineMap {
    let n = f.n;
    AffineMap {
        a: mul_mod(f.a, g.a, n),
        b: add_mod(mul_mod(f.a, g.b, n), f.b, n),
        n,
    }
}

/// `f ∘ g`.
pub fn affine_compose(f: AffineMap, g: AffineMap) -> Result<AffineMap, AffineError> {
    if f.n != g.n {
        return Err(AffineError::Mismatch { left: f.n, right: g.n });
    }
    Ok(compose_unchecked(f, g))
}

/// `(a, b)⁻¹ = (a⁻¹, −a⁻¹ b)`.
pub fn affine_inverse(f: AffineMap) -> AffineMap {
    let n = f.n;
    let ai = inv_mod(f.a, n).expect("multiplier is a unit");
    AffineMap {
        a: ai,
        b: neg_mod(mul_mod(ai, f.b, n), n),
        n,
    }
}

/// All N·φ(N) maps, ordered by (a, b).
pub fn full_affine_group(n: u64) -> Result<Vec<AffineMap>, AffineError> {
    if n == 0 {
        return Err(AffineError::ZeroModulus);
    }
    let us = units(n).elements;
    let size = us.len() as u128 * n as u128;
    if size > AFFINE_CAPACITY as u128 {
        return Err(AffineError::Capacity(format!("|Aff(Z_{n})| = {size}")));
    }
    Ok(us
        .into_iter()
        .flat_map(|a| (0..n).map(move |b| AffineMap { a, b, n }))
        .collect())
}

fn modulus_of(set: &[AffineMap]) -> Result<u64, AffineError> {
    let n = set.first().ok_or(AffineError::Empty)?.n;
    if let Some(bad) = set.iter().find(|f| f.n != n) {
        return Err(AffineError::Mismatch { left: n, right: bad.n });
    }
    Ok(n)
}

/// Fails with [`AffineError::NotClosed`] unless `set` is a subgroup.
pub fn check_closed(set: &[AffineMap]) -> Result<(), AffineError> {
    modulus_of(set)?;
    let lookup: HashSet<AffineMap> = set.iter().copied().collect();
    for &f in set {
        if !lookup.contains(&affine_inverse(f)) {
            return Err(AffineError::NotClosed);
        }
        for &g in set {
            if !lookup.contains(&compose_unchecked(f, g)) {
                return Err(AffineError::NotClosed);
            }
        }
    }
    Ok(())
}

/// Elements of `set` commuting with all of `set`, ordered by (a, b).
pub fn center(set: &[AffineMap]) -> Result<Vec<AffineMap>, AffineError> {
    check_closed(set)?;
    let mut z: Vec<AffineMap> = set
        .iter()
        .copied()
        .filter(|&f| set.iter().all(|&g| compose_unchecked(f, g) == compose_unchecked(g, f)))
        .collect();
    z.sort();
    Ok(z)
}

/// Breadth-first closure of `gens` inside Aff(Z_n), ordered by (a, b).
pub fn generated_subgroup(gens: &[AffineMap], n: u64) -> Result<Vec<AffineMap>, AffineError> {
    if n == 0 {
        return Err(AffineError::ZeroModulus);
    }
    if let Some(bad) = gens.iter().find(|g| g.n != n) {
        return Err(AffineError::Mismatch { left: n, right: bad.n });
    }
    let id = AffineMap::identity(n);
    let mut seen: BTreeSet<AffineMap> = BTreeSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = compose_unchecked(x, g);
            if seen.insert(y) {
                if seen.len() > AFFINE_CAPACITY {
                    return Err(AffineError::Capacity("generated subgroup too large".into()));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Isomorphism-type summary of a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub order: u64,
    pub is_abelian: bool,
    /// d_1 | d_2 | … with product equal to `order`; empty when nonabelian.
    pub invariant_factors: Vec<u64>,
    pub exponent: u64,
    pub center_order: u64,
    pub name: String,
}

/// Largest order given an explicit name.
pub const NAMED_ORDER_LIMIT: u64 = 64;

/// Names a closed subgroup of Aff(Z_N).
///
/// Abelian groups are decomposed from element-order counts: in the
/// p-primary part, `#{x : x^{p^k} = 1} = p^{Σ_i min(λ_i, k)}`, which
/// determines the partition λ.
pub fn recognize(set: &[AffineMap]) -> Result<GroupDescriptor, AffineError> {
    let z = center(set)?;
    let order = set.len() as u64;
    let orders: Vec<u64> = set.iter().map(|f| f.order()).collect();
    let exponent = orders.iter().fold(1u64, |acc, &o| crate::modarith::lcm(acc, o));
    let is_abelian = z.len() == set.len();
    let invariant_factors = if is_abelian {
        abelian_invariants(order, &orders)
    } else {
        Vec::new()
    };
    let name = if order > NAMED_ORDER_LIMIT {
        format!("({order},{exponent},{})", z.len())
    } else if is_abelian {
        abelian_name(&invariant_factors)
    } else {
        format!("nonabelian({order},{exponent},{})", z.len())
    };
    Ok(GroupDescriptor {
        order,
        is_abelian,
        invariant_factors,
        exponent,
        center_order: z.len() as u64,
        name,
    })
}

fn abelian_name(factors: &[u64]) -> String {
    match factors {
        [] => "Z1".into(),
        [2, 2] => "V".into(),
        [d, rest @ ..] if rest.iter().all(|x| x == d) && !rest.is_empty() => {
            format!("Z{d}^{}", factors.len())
        }
        _ => factors.iter().map(|d| format!("Z{d}")).collect::<Vec<_>>().join("x"),
    }
}

/// Invariant factors of an abelian group from the multiset of element orders.
pub fn abelian_invariants(order: u64, element_orders: &[u64]) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut m = order;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            primes.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    // Partitions per prime, as exponents sorted descending.
    let mut parts: Vec<(u64, Vec<u32>)> = Vec::new();
    for &p in &primes {
        let mut counts = vec![1u64];
        let mut pk = 1u64;
        loop {
            pk *= p;
            let c = element_orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            let prev = *counts.last().expect("nonempty");
            counts.push(c);
            if c == prev {
                break;
            }
        }
        // at_least[k] = number of cyclic factors with exponent >= k+1.
        let at_least: Vec<u32> = counts.windows(2).map(|w| ilog(w[1] / w[0], p)).collect();
        let mut lambda = Vec::new();
        for (k, w) in at_least.windows(2).enumerate() {
            lambda.extend(std::iter::repeat_n(k as u32 + 1, (w[0] - w[1]) as usize));
        }
        lambda.sort_unstable_by(|a, b| b.cmp(a));
        parts.push((p, lambda));
    }
    let width = parts.iter().map(|(_, l)| l.len()).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..width)
        .map(|i| parts.iter().map(|(p, l)| l.get(i).map_or(1, |&e| p.pow(e))).product())
        .collect();
    factors.reverse();
    factors
}

fn ilog(x: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut y = x;
    while y > 1 {
        y /= p;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dihedral::dihedral_action;
    use crate::group_core::{enumerate_invariant_group, invariant_group};
    use crate::modarith::euler_phi;
    use proptest::prelude::*;

    fn m(a: u64, b: u64, n: u64) -> AffineMap {
        AffineMap::new(a, b, n).unwrap()
    }

    #[test]
    fn compose_examples() {
        assert_eq!(affine_compose(m(3, 2, 10), m(1, 4, 10)).unwrap(), m(3, 4, 10));
        let f = m(7, 3, 12);
        assert_eq!(affine_compose(AffineMap::identity(12), f).unwrap(), f);
        for nu in units(10).elements {
            for d in 0..10 {
                let lhs = affine_compose(m(nu, 0, 10), AffineMap::translation(d, 10)).unwrap();
                let rhs = affine_compose(AffineMap::translation(d * nu, 10), m(nu, 0, 10)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        assert!(matches!(
            affine_compose(m(1, 0, 4), m(1, 0, 6)),
            Err(AffineError::Mismatch { .. })
        ));
        assert_eq!(AffineMap::new(2, 0, 10), Err(AffineError::NotUnit { a: 2, n: 10 }));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            affine_inverse(AffineMap::translation(3, 10)),
            AffineMap::translation(7, 10)
        );
        assert_eq!(affine_inverse(m(3, 0, 10)), m(7, 0, 10));
        assert_eq!(affine_inverse(m(3, 2, 10)), m(7, 6, 10));
    }

    #[test]
    fn full_group_sizes() {
        assert_eq!(full_affine_group(10).unwrap().len(), 40);
        assert_eq!(full_affine_group(2).unwrap().len(), 2);
        assert_eq!(full_affine_group(12).unwrap().len(), 48);
        assert!(matches!(full_affine_group(1 << 20), Err(AffineError::Capacity(_))));
        let g = full_affine_group(12).unwrap();
        assert!(g.windows(2).all(|w| (w[0].a, w[0].b) < (w[1].a, w[1].b)));
    }

    #[test]
    fn group_axioms_exhaustive() {
        for n in 1..=100u64 {
            let g = full_affine_group(n).unwrap();
            check_closed(&g).unwrap();
            let id = AffineMap::identity(n);
            let stride = (g.len() / 12).max(1);
            for &f in g.iter().step_by(stride) {
                assert_eq!(compose_unchecked(f, affine_inverse(f)), id);
                assert_eq!(compose_unchecked(f, id), f);
                for &h in g.iter().step_by(stride) {
                    for &k in g.iter().step_by(stride) {
                        assert_eq!(
                            compose_unchecked(compose_unchecked(f, h), k),
                            compose_unchecked(f, compose_unchecked(h, k))
                        );
                    }
                }
            }
            assert_eq!(g.len() as u64, n * euler_phi(n));
        }
    }

    #[test]
    fn pointwise_composition_oracle() {
        let n = 14;
        let g = full_affine_group(n).unwrap();
        for &f in &g {
            for &h in g.iter().step_by(5) {
                let c = compose_unchecked(f, h);
                assert!((0..n).all(|x| c.apply(x) == f.apply(h.apply(x))));
            }
        }
    }

    #[test]
    fn centers() {
        assert_eq!(
            center(&full_affine_group(10).unwrap()).unwrap(),
            vec![m(1, 0, 10), m(1, 5, 10)]
        );
        assert_eq!(
            center(&full_affine_group(6).unwrap()).unwrap(),
            vec![m(1, 0, 6), m(1, 3, 6)]
        );
        let cyc = generated_subgroup(&[AffineMap::translation(1, 9)], 9).unwrap();
        assert_eq!(center(&cyc).unwrap(), cyc);
        assert_eq!(center(&[m(3, 0, 10)]), Err(AffineError::NotClosed));
    }

    #[test]
    fn center_of_full_group_is_half_translation() {
        for n in (4..=60u64).step_by(2) {
            let z = center(&full_affine_group(n).unwrap()).unwrap();
            assert_eq!(
                z,
                vec![AffineMap::identity(n), AffineMap::translation(n / 2, n)],
                "n={n}"
            );
        }
    }

    #[test]
    fn generated_examples() {
        let t = generated_subgroup(&[AffineMap::translation(2, 10)], 10).unwrap();
        assert_eq!(t.iter().map(|f| f.b).collect::<Vec<_>>(), vec![0, 2, 4, 6, 8]);
        assert_eq!(generated_subgroup(&[], 10).unwrap(), vec![AffineMap::identity(10)]);
        // f_7 commutes with T_6, so these two only give a Klein four-group.
        let g = generated_subgroup(&[AffineMap::translation(6, 12), m(7, 0, 12)], 12).unwrap();
        assert_eq!(g.len(), 4);
        let g = generated_subgroup(&[AffineMap::translation(6, 12), m(5, 0, 12), m(7, 0, 12)], 12).unwrap();
        assert_eq!(g.len(), 8);
    }

    /// Element-order histogram of Z_{d1} × … × Z_{dr}, by brute force.
    fn product_order_histogram(factors: &[u64]) -> Vec<u64> {
        let mut orders = vec![1u64];
        for &d in factors {
            let mut next = Vec::new();
            for &o in &orders {
                for x in 0..d {
                    let ox = d / gcd(x, d);
                    next.push(crate::modarith::lcm(o, ox));
                }
            }
            orders = next;
        }
        orders.sort_unstable();
        orders
    }

    #[test]
    fn recognize_examples() {
        let z2 = generated_subgroup(&[AffineMap::translation(5, 10)], 10).unwrap();
        assert_eq!(recognize(&z2).unwrap().name, "Z2");
        let v = generated_subgroup(&[AffineMap::translation(6, 12), m(5, 0, 12)], 12).unwrap();
        let d = recognize(&v).unwrap();
        assert_eq!(d.name, "V");
        assert_eq!(d.invariant_factors, vec![2, 2]);
        assert_eq!(recognize(&[AffineMap::identity(7)]).unwrap().name, "Z1");
        let d = recognize(&full_affine_group(6).unwrap()).unwrap();
        assert!(!d.is_abelian);
        assert_eq!(d.name, "nonabelian(12,6,2)");
        let big = recognize(&full_affine_group(18).unwrap()).unwrap();
        assert_eq!(big.name, format!("(108,{},2)", big.exponent));
    }

    #[test]
    fn invariant_factors_match_histogram_oracle() {
        for n in 2..=40u64 {
            // abelian subgroups: the translations, the unit maps, and their mix with T_{n/2}
            let mut sets = vec![
                generated_subgroup(&[AffineMap::translation(1, n)], n).unwrap(),
                units(n).elements.iter().map(|&a| m(a, 0, n)).collect::<Vec<_>>(),
            ];
            if n % 2 == 0 {
                let mut gens: Vec<AffineMap> = units(n).elements.iter().map(|&a| m(a, 0, n)).collect();
                gens.push(AffineMap::translation(n / 2, n));
                let g = generated_subgroup(&gens, n).unwrap();
                if center(&g).unwrap().len() == g.len() {
                    sets.push(g);
                }
            }
            for s in sets {
                let d = recognize(&s).unwrap();
                assert!(d.is_abelian);
                assert_eq!(d.invariant_factors.iter().product::<u64>(), d.order);
                assert!(d.invariant_factors.windows(2).all(|w| w[1] % w[0] == 0));
                let mut hist: Vec<u64> = s.iter().map(|f| f.order()).collect();
                hist.sort_unstable();
                assert_eq!(hist, product_order_histogram(&d.invariant_factors), "n={n}");
            }
        }
    }

    #[test]
    fn invariant_group_is_affine_group() {
        let as_perm = |f: &AffineMap| (0..f.n).map(|x| f.apply(x) as usize).collect::<Vec<_>>();
        for n in [1u64, 3, 5, 7, 9, 4] {
            let action = dihedral_action(n).unwrap();
            let hat: Vec<Vec<usize>> = if 2 * n <= 10 {
                enumerate_invariant_group(&action)
                    .unwrap()
                    .into_iter()
                    .map(|f| f.perm)
                    .collect()
            } else {
                invariant_group(&action).unwrap().into_iter().map(|f| f.perm).collect()
            };
            let mut aff: Vec<Vec<usize>> = full_affine_group(2 * n).unwrap().iter().map(as_perm).collect();
            aff.sort();
            assert_eq!(hat, aff, "n={n}");
            assert_eq!(hat.len() as u64, 2 * n * euler_phi(2 * n));
        }
    }

    proptest! {
        #[test]
        fn semidirect_relation(n in 2u64..200, k in 0u64..1000, i in 0usize..1000) {
            let us = units(n).elements;
            let nu = us[i % us.len()];
            let f = m(nu, 0, n);
            let t = AffineMap::translation(2 * k, n);
            let lhs = compose_unchecked(compose_unchecked(f, t), affine_inverse(f));
            prop_assert_eq!(lhs, AffineMap::translation(2 * k * nu, n));
        }
    }
}
