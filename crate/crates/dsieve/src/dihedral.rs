//! The dihedral group D_n in normal form σ^h ρ^k, its automorphisms T^k φ_ν,
//! and its action on Z_{2n} by ρ·x = x + 2 and σ·x = −x.

use thiserror::Error;

use crate::group_core::{automorphisms, FiniteAction, FiniteGroup, GroupAutomorphism, GroupError};
use crate::modarith::{gcd, mul_mod, units, ZModElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DihedralError {
    #[error("dihedral order parameter must be positive")]
    ZeroOrder,
    #[error("D_{left} and D_{right} do not match")]
    Mismatch { left: u64, right: u64 },
    #[error("point modulus {got} does not match Z_{expected}")]
    PointModulus { got: u64, expected: u64 },
    #[error("{nu} is not a unit modulo {n}")]
    NotUnit { nu: u64, n: u64 },
    #[error("closed form needs n >= 3, got {0}")]
    TooSmall(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// σ^reflect ρ^rot in D_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DihedralElement {
    pub n: u64,
    pub reflect: bool,
    pub rot: u64,
}

impl DihedralElement {
    pub fn new(n: u64, reflect: bool, rot: u64) -> Result<Self, DihedralError> {
        if n == 0 {
            return Err(DihedralError::ZeroOrder);
        }
        Ok(Self {
            n,
            reflect,
            rot: rot % n,
        })
    }

    pub fn identity(n: u64) -> Self {
        Self {
            n,
            reflect: false,
            rot: 0,
        }
    }

    pub fn rho(n: u64) -> Self {
        Self {
            n,
            reflect: false,
            rot: 1 % n,
        }
    }

    pub fn sigma(n: u64) -> Self {
        Self {
            n,
            reflect: true,
            rot: 0,
        }
    }

    /// Position in the Cayley table: `h·n + k`.
    pub fn index(self) -> usize {
        (self.reflect as u64 * self.n + self.rot) as usize
    }

    pub fn from_index(n: u64, i: usize) -> Self {
        let i = i as u64;
        Self {
            n,
            reflect: i >= n,
            rot: i % n,
        }
    }

    pub fn inverse(self) -> Self {
        if self.reflect {
            self
        } else {
            Self {
                rot: (self.n - self.rot) % self.n,
                ..self
            }
        }
    }
}

/// All 2n elements, in index order.
pub fn elements(n: u64) -> Vec<DihedralElement> {
    (0..2 * n as usize).map(|i| DihedralElement::from_index(n, i)).collect()
}

fn same(a: u64, b: u64) -> Result<u64, DihedralError> {
    if a != b {
        return Err(DihedralError::Mismatch { left: a, right: b });
    }
    Ok(a)
}

fn mul_unchecked(a: DihedralElement, b: DihedralElement) -> DihedralElement {
    let n = a.n;
    let k1 = if b.reflect { (n - a.rot) % n } else { a.rot };
    DihedralElement {
        n,
        reflect: a.reflect ^ b.reflect,
        rot: (k1 + b.rot) % n,
    }
}

/// `σ^{h1}ρ^{k1} · σ^{h2}ρ^{k2} = σ^{h1+h2} ρ^{±k1 + k2}`, using ρ^k σ = σ ρ^{-k}.
pub fn dihedral_mul(a: DihedralElement, b: DihedralElement) -> Result<DihedralElement, DihedralError> {
    same(a.n, b.n)?;
    Ok(mul_unchecked(a, b))
}

fn act_raw(g: DihedralElement, x: u64) -> u64 {
    let m = 2 * g.n;
    let y = (x + 2 * g.rot) % m;
    if g.reflect {
        (m - y) % m
    } else {
        y
    }
}

/// `σ^h ρ^k · x = (−1)^h (x + 2k)` on Z_{2n}.
pub fn act(g: DihedralElement, x: ZModElement) -> Result<ZModElement, DihedralError> {
    let m = 2 * g.n;
    if x.modulus() != m {
        return Err(DihedralError::PointModulus {
            got: x.modulus(),
            expected: m,
        });
    }
    Ok(ZModElement::new(act_raw(g, x.value()), m).expect("modulus already validated"))
}

/// T^k φ_ν, with T^k(σ) = ρ^k σ and φ_ν(ρ) = ρ^ν.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DihedralAut {
    pub n: u64,
    pub k: u64,
    pub nu: u64,
}

impl DihedralAut {
    pub fn new(n: u64, k: u64, nu: u64) -> Result<Self, DihedralError> {
        if n == 0 {
            return Err(DihedralError::ZeroOrder);
        }
        let nu = nu % n;
        if gcd(nu, n) != 1 {
            return Err(DihedralError::NotUnit { nu, n });
        }
        Ok(Self { n, k: k % n, nu })
    }

    pub fn identity(n: u64) -> Self {
        Self { n, k: 0, nu: 1 % n }
    }

    /// As an index permutation of the Cayley table from [`dihedral_group`].
    pub fn to_group_automorphism(self) -> GroupAutomorphism {
        GroupAutomorphism {
            images: elements(self.n)
                .into_iter()
                .map(|g| apply_unchecked(self, g).index())
                .collect(),
        }
    }
}

/// `(k, ν) ∘ (l, υ) = (k + νl, νυ)`.
pub fn aut_compose(a: DihedralAut, b: DihedralAut) -> Result<DihedralAut, DihedralError> {
    let n = same(a.n, b.n)?;
    Ok(DihedralAut {
        n,
        k: (a.k + mul_mod(a.nu, b.k, n)) % n,
        nu: mul_mod(a.nu, b.nu, n),
    })
}

fn apply_unchecked(a: DihedralAut, g: DihedralElement) -> DihedralElement {
    let n = a.n;
    let mut rot = mul_mod(a.nu, g.rot, n);
    if g.reflect {
        rot = (rot + n - a.k) % n;
    }
    DihedralElement {
        n,
        reflect: g.reflect,
        rot,
    }
}

/// `T^k φ_ν(σ^h ρ^j) = σ^h ρ^{νj − hk}`.
pub fn aut_apply(a: DihedralAut, g: DihedralElement) -> Result<DihedralElement, DihedralError> {
    same(a.n, g.n)?;
    Ok(apply_unchecked(a, g))
}

/// Every T^k φ_ν; this is all of Aut(D_n) when n >= 3.
pub fn automorphism_pairs(n: u64) -> Vec<DihedralAut> {
    let us = units(n).elements;
    (0..n)
        .flat_map(|k| us.iter().map(move |&nu| DihedralAut { n, k, nu }))
        .collect()
}

/// Aut(D_n) as index permutations, for every n. The (k, ν) family misses
/// automorphisms when n <= 2, so those cases fall back to table search.
pub fn automorphism_table(n: u64) -> Result<Vec<GroupAutomorphism>, DihedralError> {
    if n >= 3 {
        let mut out: Vec<GroupAutomorphism> = automorphism_pairs(n)
            .into_iter()
            .map(DihedralAut::to_group_automorphism)
            .collect();
        out.sort();
        Ok(out)
    } else {
        Ok(automorphisms(&dihedral_group(n)?)?)
    }
}

pub fn dihedral_group(n: u64) -> Result<FiniteGroup, DihedralError> {
    if n == 0 {
        return Err(DihedralError::ZeroOrder);
    }
    let g = FiniteGroup::from_fn(2 * n as usize, |a, b| {
        mul_unchecked(DihedralElement::from_index(n, a), DihedralElement::from_index(n, b)).index()
    })?;
    Ok(g)
}

/// D_n acting on Z_{2n}.
pub fn dihedral_action(n: u64) -> Result<FiniteAction, DihedralError> {
    let g = dihedral_group(n)?;
    Ok(FiniteAction::new(g, 2 * n as usize, |e, x| {
        act_raw(DihedralElement::from_index(n, e), x as u64) as usize
    })?)
}

/// Stabilizers of 0 and 1 and their normalizers, each sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerData {
    pub stab0: Vec<DihedralElement>,
    pub stab1: Vec<DihedralElement>,
    pub norm0: Vec<DihedralElement>,
    pub norm1: Vec<DihedralElement>,
}

/// Closed form: Stab(0) = ⟨σ⟩, Stab(1) = ⟨ρσ⟩; for odd n these are
/// self-normalizing, for even n each normalizer adds ρ^{n/2}.
pub fn stabilizers_and_normalizers(n: u64) -> Result<StabilizerData, DihedralError> {
    if n < 3 {
        return Err(DihedralError::TooSmall(n));
    }
    let e = |h: bool, k: u64| DihedralElement {
        n,
        reflect: h,
        rot: k % n,
    };
    let id = DihedralElement::identity(n);
    let stab0 = vec![id, e(true, 0)];
    // ρσ = σρ^{-1}
    let stab1 = vec![id, e(true, n - 1)];
    let (mut norm0, mut norm1) = (stab0.clone(), stab1.clone());
    if n % 2 == 0 {
        let half = n / 2;
        norm0.extend([e(false, half), e(true, half)]);
        // ρ^{n/2+1}σ = σρ^{n/2-1}
        norm1.extend([e(false, half), e(true, half - 1)]);
    }
    for v in [&mut norm0, &mut norm1] {
        v.sort();
    }
    Ok(StabilizerData {
        stab0,
        stab1,
        norm0,
        norm1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_core::{normalizer, stabilizer};
    use proptest::prelude::*;

    fn el(n: u64, h: bool, k: u64) -> DihedralElement {
        DihedralElement::new(n, h, k).unwrap()
    }

    #[test]
    fn mul_examples() {
        let n = 5;
        let id = DihedralElement::identity(n);
        assert_eq!(dihedral_mul(DihedralElement::rho(n), el(n, false, n - 1)).unwrap(), id);
        assert_eq!(
            dihedral_mul(DihedralElement::sigma(n), DihedralElement::sigma(n)).unwrap(),
            id
        );
        assert_eq!(dihedral_mul(el(5, false, 2), el(5, true, 1)).unwrap(), el(5, true, 4));
        assert!(matches!(
            dihedral_mul(id, DihedralElement::identity(4)),
            Err(DihedralError::Mismatch { .. })
        ));
    }

    /// Words in ρ and σ multiplied as permutations of Z_{2n}; the normal-form
    /// product must induce the same permutation.
    #[test]
    fn mul_matches_permutation_oracle() {
        for n in 1..=8u64 {
            let m = 2 * n;
            let perm = |g: DihedralElement| -> Vec<u64> {
                // σ^h ρ^k acts as ρ^k first, then σ^h.
                (0..m)
                    .map(|x| {
                        let mut y = x;
                        for _ in 0..g.rot {
                            y = (y + 2) % m;
                        }
                        if g.reflect {
                            y = (m - y) % m;
                        }
                        y
                    })
                    .collect()
            };
            for a in elements(n) {
                for b in elements(n) {
                    let pa = perm(a);
                    let pb = perm(b);
                    let composed: Vec<u64> = pb.iter().map(|&x| pa[x as usize]).collect();
                    assert_eq!(perm(dihedral_mul(a, b).unwrap()), composed);
                }
            }
        }
    }

    #[test]
    fn act_examples() {
        let x = ZModElement::new(3, 10).unwrap();
        assert_eq!(act(el(5, false, 1), x).unwrap().value(), 5);
        assert_eq!(act(el(5, true, 0), x).unwrap().value(), 7);
        assert_eq!(act(DihedralElement::identity(5), x).unwrap(), x);
        assert!(act(DihedralElement::identity(4), x).is_err());
    }

    #[test]
    fn aut_examples() {
        let a = DihedralAut::new(5, 2, 3).unwrap();
        let b = DihedralAut::new(5, 1, 1).unwrap();
        assert_eq!(aut_compose(a, b).unwrap(), DihedralAut::new(5, 0, 3).unwrap());
        assert_eq!(aut_compose(DihedralAut::identity(5), a).unwrap(), a);
        // φ_ν^{o(ν)} = identity
        let phi = DihedralAut::new(7, 0, 3).unwrap();
        let mut acc = DihedralAut::identity(7);
        for _ in 0..crate::modarith::unit_order(3, 7) {
            acc = aut_compose(acc, phi).unwrap();
        }
        assert_eq!(acc, DihedralAut::identity(7));
        assert_eq!(DihedralAut::new(6, 0, 2), Err(DihedralError::NotUnit { nu: 2, n: 6 }));
    }

    #[test]
    fn apply_examples() {
        let t = DihedralAut::new(5, 1, 1).unwrap();
        // ρσ = σρ^4
        assert_eq!(aut_apply(t, DihedralElement::sigma(5)).unwrap(), el(5, true, 4));
        let phi = DihedralAut::new(5, 0, 3).unwrap();
        assert_eq!(aut_apply(phi, DihedralElement::rho(5)).unwrap(), el(5, false, 3));
        for a in automorphism_pairs(5) {
            assert_eq!(
                aut_apply(a, DihedralElement::identity(5)).unwrap(),
                DihedralElement::identity(5)
            );
        }
    }

    #[test]
    fn translation_power_is_identity() {
        for n in 3..=12u64 {
            let t = DihedralAut::new(n, 1, 1).unwrap();
            let mut acc = DihedralAut::identity(n);
            for _ in 0..n {
                acc = aut_compose(acc, t).unwrap();
            }
            assert_eq!(acc, DihedralAut::identity(n));
        }
    }

    #[test]
    fn aut_table_matches_search() {
        for n in 1..=8u64 {
            let closed = automorphism_table(n).unwrap();
            let searched = automorphisms(&dihedral_group(n).unwrap()).unwrap();
            assert_eq!(closed, searched, "n={n}");
        }
    }

    #[test]
    fn closed_form_stabilizers_agree() {
        let ex = stabilizers_and_normalizers(5).unwrap();
        assert_eq!(ex.norm0, ex.stab0);
        let ex = stabilizers_and_normalizers(4).unwrap();
        assert_eq!(
            ex.norm0,
            vec![el(4, false, 0), el(4, false, 2), el(4, true, 0), el(4, true, 2)]
        );
        // {1, ρσ, ρ^2, ρ^3σ} = {1, σρ^3, ρ^2, σρ}
        assert_eq!(
            ex.norm1,
            vec![el(4, false, 0), el(4, false, 2), el(4, true, 1), el(4, true, 3)]
        );
        assert_eq!(stabilizers_and_normalizers(2), Err(DihedralError::TooSmall(2)));

        for n in 3..=12u64 {
            let action = dihedral_action(n).unwrap();
            let ex = stabilizers_and_normalizers(n).unwrap();
            let idx = |v: &[DihedralElement]| v.iter().map(|g| g.index()).collect::<Vec<_>>();
            let s0 = stabilizer(&action, 0).unwrap();
            let s1 = stabilizer(&action, 1).unwrap();
            assert_eq!(s0.members(), idx(&ex.stab0).as_slice());
            assert_eq!(s1.members(), idx(&ex.stab1).as_slice());
            assert_eq!(normalizer(action.group(), &s0).members(), idx(&ex.norm0).as_slice());
            assert_eq!(normalizer(action.group(), &s1).members(), idx(&ex.norm1).as_slice());
        }
    }

    fn arb_element(n: u64) -> impl Strategy<Value = DihedralElement> {
        (any::<bool>(), 0..n).prop_map(move |(h, k)| DihedralElement { n, reflect: h, rot: k })
    }

    proptest! {
        #[test]
        fn action_is_homomorphic(
            (n, a, b, x) in (1u64..=20).prop_flat_map(|n| (Just(n), arb_element(n), arb_element(n), 0..2 * n))
        ) {
            let x = ZModElement::new(x, 2 * n).unwrap();
            let lhs = act(a, act(b, x).unwrap()).unwrap();
            let rhs = act(dihedral_mul(a, b).unwrap(), x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn aut_apply_is_homomorphic(
            (n, g, h, k, i) in (3u64..=20).prop_flat_map(|n| (Just(n), arb_element(n), arb_element(n), 0..n, 0..n))
        ) {
            let us = units(n).elements;
            let a = DihedralAut::new(n, k, us[i as usize % us.len()]).unwrap();
            let lhs = aut_apply(a, dihedral_mul(g, h).unwrap()).unwrap();
            let rhs = dihedral_mul(aut_apply(a, g).unwrap(), aut_apply(a, h).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn aut_compose_matches_application(
            (n, g, k, l, i, j) in (3u64..=20).prop_flat_map(|n| (Just(n), arb_element(n), 0..n, 0..n, 0..n, 0..n))
        ) {
            let us = units(n).elements;
            let a = DihedralAut::new(n, k, us[i as usize % us.len()]).unwrap();
            let b = DihedralAut::new(n, l, us[j as usize % us.len()]).unwrap();
            let lhs = aut_apply(aut_compose(a, b).unwrap(), g).unwrap();
            let rhs = aut_apply(a, aut_apply(b, g).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
