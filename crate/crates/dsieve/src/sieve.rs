//! The Goldbach dihedral sieve over Z_N.
//!
//! Small primes are split into those dividing N (`p_list`) and those that do
//! not (`q_list`). Each p covers its multiples, the orbit of 0 under D_{N/p}
//! acting by x ↦ ±(x + kp). Each q covers Q = {±s·q : 2 ≤ s ≤ ⌊N/q⌋}, the
//! orbit of the base point 2q under a transported copy of D_{⌊N/q⌋−1}. What is
//! left uncovered, Ā_N, is the set of x with x and N − x both prime or 1.

use bitvec::prelude::*;
use thiserror::Error;

use crate::dihedral::{dihedral_mul, DihedralElement};
use crate::modarith::{is_prime, prime_table};

/// Largest N accepted by [`build_sieve`].
pub const MAX_SIEVE_N: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SieveError {
    #[error("N must be even and at least 2, got {0}")]
    BadModulus(u64),
    #[error("N = {n} exceeds the sieve cap {cap}")]
    TooLarge { n: u64, cap: u64 },
    #[error("q = {q} is not an odd prime below N = {n} that is coprime to it")]
    BadQ { q: u64, n: u64 },
    #[error("element of D_{got} used where D_{expected} acts")]
    WrongDihedral { got: u64, expected: u64 },
}

/// Primes up to ⌊√N⌋ split by whether they divide N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSplit {
    pub n: u64,
    /// Always starts with 2.
    pub p_list: Vec<u64>,
    pub q_list: Vec<u64>,
}

fn check_n(n: u64) -> Result<(), SieveError> {
    if n < 2 || n % 2 != 0 {
        return Err(SieveError::BadModulus(n));
    }
    if n > MAX_SIEVE_N {
        return Err(SieveError::TooLarge { n, cap: MAX_SIEVE_N });
    }
    Ok(())
}

/// 2 is kept in `p_list` even when it exceeds ⌊√N⌋ (only N = 2), so that
/// the even residues are always covered.
pub fn prime_split(n: u64) -> Result<PrimeSplit, SieveError> {
    check_n(n)?;
    let root = n.isqrt();
    let (mut p_list, mut q_list) = (vec![2], Vec::new());
    for q in (3..=root).step_by(2).filter(|&q| is_prime(q)) {
        if n % q == 0 {
            p_list.push(q);
        } else {
            q_list.push(q);
        }
    }
    Ok(PrimeSplit { n, p_list, q_list })
}

/// Q_k = C_k ⊔ C_{−k} for one non-dividing prime q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QOrbit {
    pub q: u64,
    /// s·q for s = 2, …, ⌊N/q⌋.
    pub c_plus: Vec<u64>,
    /// N − s·q for the same s.
    pub c_minus: Vec<u64>,
}

impl QOrbit {
    /// C_k ∪ C_{−k}, sorted.
    pub fn members(&self) -> Vec<u64> {
        let mut m: Vec<u64> = self.c_plus.iter().chain(&self.c_minus).copied().collect();
        m.sort_unstable();
        m
    }

    pub fn len(&self) -> usize {
        self.c_plus.len() + self.c_minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c_plus.is_empty()
    }

    /// Order parameter of the dihedral group acting on Q: ⌊N/q⌋ − 1.
    pub fn dihedral_order(&self, n: u64) -> u64 {
        n / self.q - 1
    }
}

fn check_q(n: u64, q: u64) -> Result<(), SieveError> {
    check_n(n)?;
    if q < 3 || !is_prime(q) || n % q == 0 || 2 * q > n {
        return Err(SieveError::BadQ { q, n });
    }
    Ok(())
}

pub fn q_orbit(n: u64, q: u64) -> Result<QOrbit, SieveError> {
    check_q(n, q)?;
    let top = n / q;
    Ok(QOrbit {
        q,
        c_plus: (2..=top).map(|s| s * q).collect(),
        c_minus: (2..=top).map(|s| n - s * q).collect(),
    })
}

/// D_{⌊N/q⌋−1} acting on Z_N: through the bijection σ^h ρ^m ↦ (−1)^h (2+m)q
/// on Q, and by x ↦ (−1)^h x elsewhere.
pub fn act_q(n: u64, q: u64, g: DihedralElement, x: u64) -> Result<u64, SieveError> {
    check_q(n, q)?;
    let order = n / q - 1;
    if g.n != order {
        return Err(SieveError::WrongDihedral {
            got: g.n,
            expected: order,
        });
    }
    let x = x % n;
    let top = n / q;
    let preimage = if x % q == 0 && (2..=top).contains(&(x / q)) {
        Some(DihedralElement {
            n: order,
            reflect: false,
            rot: x / q - 2,
        })
    } else if (n - x) % q == 0 && (2..=top).contains(&((n - x) / q)) {
        Some(DihedralElement {
            n: order,
            reflect: true,
            rot: (n - x) / q - 2,
        })
    } else {
        None
    };
    Ok(match preimage {
        Some(e) => {
            let y = dihedral_mul(g, e).expect("same order");
            let v = (2 + y.rot) * q;
            if y.reflect {
                n - v
            } else {
                v
            }
        }
        None if g.reflect => (n - x) % n,
        None => x,
    })
}

/// The sieve partition Z_N = A_N ⊔ Ā_N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldbachSieve {
    pub n: u64,
    pub split: PrimeSplit,
    /// Membership in A_N.
    pub covering: BitVec,
    /// Ā_N, ascending.
    pub complement: Vec<u64>,
    pub q_orbits: Vec<QOrbit>,
}

impl GoldbachSieve {
    pub fn in_complement(&self, x: u64) -> bool {
        !self.covering[x as usize]
    }

    pub fn covering_size(&self) -> usize {
        self.covering.count_ones()
    }
}

pub fn build_sieve(n: u64) -> Result<GoldbachSieve, SieveError> {
    let split = prime_split(n)?;
    let mut covering = bitvec![0; n as usize];
    for &p in &split.p_list {
        for x in (0..n).step_by(p as usize) {
            covering.set(x as usize, true);
        }
    }
    let q_orbits: Vec<QOrbit> = split.q_list.iter().map(|&q| q_orbit(n, q)).collect::<Result<_, _>>()?;
    for o in &q_orbits {
        for &x in o.c_plus.iter().chain(&o.c_minus) {
            covering.set(x as usize, true);
        }
    }
    let complement = covering.iter_zeros().map(|i| i as u64).collect();
    Ok(GoldbachSieve {
        n,
        split,
        covering,
        complement,
        q_orbits,
    })
}

/// Direct scan: x in [1, N−1] with x and N − x both prime or 1.
pub fn goldbach_oracle(n: u64) -> Result<Vec<u64>, SieveError> {
    check_n(n)?;
    let table = prime_table(n);
    let ok = |x: u64| x == 1 || table[x as usize];
    Ok((1..n).filter(|&x| ok(x) && ok(n - x)).collect())
}

/// The three-line text dump: `N=`, `complement=`, then `p= q=`.
pub fn format_dump(sieve: &GoldbachSieve) -> String {
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    format!(
        "N={}\ncomplement={}\np={} q={}\n",
        sieve.n,
        join(&sieve.complement),
        join(&sieve.split.p_list),
        join(&sieve.split.q_list)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dihedral::elements;
    use std::collections::BTreeSet;

    #[test]
    fn split_examples() {
        let s = prime_split(128).unwrap();
        assert_eq!((s.p_list, s.q_list), (vec![2], vec![3, 5, 7, 11]));
        let s = prime_split(12).unwrap();
        assert_eq!((s.p_list, s.q_list), (vec![2, 3], vec![]));
        let s = prime_split(2).unwrap();
        assert_eq!((s.p_list, s.q_list), (vec![2], vec![]));
        assert_eq!(prime_split(7), Err(SieveError::BadModulus(7)));
        assert_eq!(prime_split(0), Err(SieveError::BadModulus(0)));
    }

    #[test]
    fn q_orbit_examples() {
        let o = q_orbit(16, 3).unwrap();
        assert_eq!(o.c_plus, vec![6, 9, 12, 15]);
        assert_eq!(o.c_minus, vec![10, 7, 4, 1]);
        let o = q_orbit(10, 3).unwrap();
        assert_eq!(o.members(), vec![1, 4, 6, 9]);
        assert!(q_orbit(12, 3).is_err());
        for n in (10..200u64).step_by(2) {
            for q in prime_split(n).unwrap().q_list {
                let o = q_orbit(n, q).unwrap();
                assert!(o.c_plus.contains(&(2 * q)));
                assert_eq!(o.len() as u64, 2 * (n / q - 1));
                let plus: BTreeSet<u64> = o.c_plus.iter().copied().collect();
                assert!(o.c_minus.iter().all(|x| !plus.contains(x)));
                assert!(!o.members().contains(&q) && !o.members().contains(&(n - q)));
            }
        }
    }

    #[test]
    fn act_q_examples() {
        let (n, q) = (16, 3);
        let order = n / q - 1;
        let rho = DihedralElement::rho(order);
        let sigma = DihedralElement::sigma(order);
        assert_eq!(act_q(n, q, rho, 2 * q).unwrap(), 3 * q);
        assert_eq!(act_q(n, q, sigma, 5).unwrap(), 11);
        for x in 0..n {
            assert_eq!(act_q(n, q, DihedralElement::identity(order), x).unwrap(), x);
        }
        assert!(act_q(n, q, DihedralElement::rho(3), 6).is_err());
    }

    #[test]
    fn q_action_is_an_action_with_orbit_q() {
        for n in (10..80u64).step_by(2) {
            for q in prime_split(n).unwrap().q_list {
                let order = n / q - 1;
                let els = elements(order);
                for &a in &els {
                    for &b in &els {
                        let ab = dihedral_mul(a, b).unwrap();
                        for x in 0..n {
                            let lhs = act_q(n, q, a, act_q(n, q, b, x).unwrap()).unwrap();
                            assert_eq!(lhs, act_q(n, q, ab, x).unwrap());
                        }
                    }
                }
                let orbit: BTreeSet<u64> = els.iter().map(|&g| act_q(n, q, g, 2 * q).unwrap()).collect();
                assert_eq!(orbit.into_iter().collect::<Vec<_>>(), q_orbit(n, q).unwrap().members());
            }
        }
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(build_sieve(2).unwrap().complement, vec![1]);
        assert_eq!(build_sieve(4).unwrap().complement, vec![1, 3]);
        assert_eq!(build_sieve(6).unwrap().complement, vec![1, 3, 5]);
        assert_eq!(build_sieve(8).unwrap().complement, vec![1, 3, 5, 7]);
        assert_eq!(build_sieve(16).unwrap().complement, vec![3, 5, 11, 13]);
        // 127 is prime, so the pair (1, 127) survives alongside the prime pairs.
        assert_eq!(
            build_sieve(128).unwrap().complement,
            vec![1, 19, 31, 61, 67, 97, 109, 127]
        );
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(goldbach_oracle(16).unwrap(), vec![3, 5, 11, 13]);
        assert_eq!(goldbach_oracle(6).unwrap(), vec![1, 3, 5]);
        assert_eq!(goldbach_oracle(4).unwrap(), vec![1, 2, 3]);
        assert_eq!(goldbach_oracle(128).unwrap(), vec![1, 19, 31, 61, 67, 97, 109, 127]);
    }

    #[test]
    fn sieve_matches_oracle() {
        for n in (6..=2000u64).step_by(2) {
            let s = build_sieve(n).unwrap();
            assert_eq!(s.complement, goldbach_oracle(n).unwrap(), "N={n}");
            assert_eq!(s.covering_size() + s.complement.len(), n as usize);
            assert!(s.complement.iter().all(|&r| s.in_complement((n - r) % n)));
        }
        let four = build_sieve(4).unwrap();
        assert!(!four.complement.contains(&2));
        assert!(goldbach_oracle(4).unwrap().contains(&2));
    }

    #[test]
    fn dump_format() {
        let s = build_sieve(16).unwrap();
        assert_eq!(format_dump(&s), "N=16\ncomplement=3,5,11,13\np=2 q=3\n");
    }
}
