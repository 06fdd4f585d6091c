//! G_N: the affine maps of Z_N that fix the Goldbach sieve, and the
//! structure of that group (translation part, unit part, mixed elements).

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::affine::{
    affine_compose, affine_inverse, full_affine_group, recognize, AffineError, AffineMap, GroupDescriptor,
};
use crate::dihedral::{automorphism_table, dihedral_mul, elements, DihedralElement, DihedralError};
use crate::modarith::{gcd, inv_mod, mul_mod, two_adic, units};
use crate::sieve::{act_q, GoldbachSieve};

/// Default cap on N for full enumeration of G_N.
pub const MAX_SYMMETRY_N: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("N = {n} exceeds the enumeration cap {cap}")]
    Capacity { n: u64, cap: u64 },
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Dihedral(#[from] DihedralError),
    #[error("computed set is not a subgroup")]
    NotSubgroup,
}

/// G_N with its derived structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryGroup {
    pub n: u64,
    /// Ordered by (a, b).
    pub elements: Vec<AffineMap>,
    /// Smallest d > 0 with T_d ∈ G_N.
    pub g1_generator: Option<u64>,
    /// H = {ν : f_ν ∈ G_N}, ascending.
    pub unit_part: Vec<u64>,
    /// Whether T_{N/2} f_{1+N/2} ∈ G_N; `None` unless 4 | N.
    pub central_element_present: Option<bool>,
    pub descriptor: GroupDescriptor,
}

impl SymmetryGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, f: AffineMap) -> bool {
        self.elements.binary_search(&f).is_ok()
    }

    pub fn contains_translation(&self, d: u64) -> bool {
        self.contains(AffineMap::translation(d, self.n))
    }

    pub fn contains_unit(&self, nu: u64) -> bool {
        self.unit_part.binary_search(&(nu % self.n)).is_ok()
    }

    /// |G^(1)|.
    pub fn translation_order(&self) -> u64 {
        self.g1_generator.map_or(1, |d| self.n / d)
    }

    /// T_d f_ν with neither T_d nor f_ν in the group.
    pub fn mixed_elements(&self) -> Vec<AffineMap> {
        self.elements
            .iter()
            .copied()
            .filter(|f| !self.contains_translation(f.b) && !self.contains_unit(f.a))
            .collect()
    }
}

fn fixes_complement(sieve: &GoldbachSieve, f: AffineMap) -> bool {
    sieve.complement.iter().all(|&x| sieve.in_complement(f.apply(x)))
}

/// Enumerates G_N. For a unit a, any b with a·Ā + b = Ā must send min Ā into
/// Ā, so only |Ā| offsets per multiplier are tried.
pub fn compute_symmetry_group(sieve: &GoldbachSieve) -> Result<SymmetryGroup, SymmetryError> {
    compute_with_cap(sieve, MAX_SYMMETRY_N)
}

pub fn compute_with_cap(sieve: &GoldbachSieve, cap: u64) -> Result<SymmetryGroup, SymmetryError> {
    let n = sieve.n;
    if n > cap {
        return Err(SymmetryError::Capacity { n, cap });
    }
    let elements: Vec<AffineMap> = match sieve.complement.first() {
        None => full_affine_group(n)?,
        Some(&r0) => {
            let mut found: Vec<AffineMap> = units(n)
                .elements
                .par_iter()
                .flat_map_iter(|&a| {
                    let shift = mul_mod(a, r0, n);
                    sieve
                        .complement
                        .iter()
                        .map(move |&s| AffineMap {
                            a,
                            b: (s + n - shift) % n,
                            n,
                        })
                        .filter(|&f| fixes_complement(sieve, f))
                        .collect::<Vec<_>>()
                })
                .collect();
            found.sort();
            found
        }
    };
    finish(n, elements)
}

/// Plain filter of all of Aff(Z_N); the reference for [`compute_symmetry_group`].
pub fn compute_symmetry_group_naive(sieve: &GoldbachSieve) -> Result<SymmetryGroup, SymmetryError> {
    let elements = full_affine_group(sieve.n)?
        .into_iter()
        .filter(|&f| fixes_complement(sieve, f))
        .collect();
    finish(sieve.n, elements)
}

fn finish(n: u64, elements: Vec<AffineMap>) -> Result<SymmetryGroup, SymmetryError> {
    let descriptor = recognize(&elements).map_err(|e| match e {
        AffineError::NotClosed => SymmetryError::NotSubgroup,
        other => other.into(),
    })?;
    let g1_generator = elements
        .iter()
        .filter(|f| f.is_translation() && f.b != 0)
        .map(|f| f.b)
        .min();
    let unit_part = elements.iter().filter(|f| f.b == 0).map(|f| f.a).collect();
    let mut g = SymmetryGroup {
        n,
        elements,
        g1_generator,
        unit_part,
        central_element_present: None,
        descriptor,
    };
    if n % 4 == 0 {
        g.central_element_present = Some(g.contains(central_element(n)));
    }
    Ok(g)
}

/// T_{N/2} f_{1+N/2}; fixes every odd residue when 4 | N.
pub fn central_element(n: u64) -> AffineMap {
    AffineMap {
        a: (1 + n / 2) % n,
        b: n / 2,
        n,
    }
}

/// Minimal positive d with T_d ∈ G, so G^(1) = ⟨T_d⟩.
pub fn translation_part(g: &SymmetryGroup) -> Option<u64> {
    g.g1_generator
}

/// Which structural description of G_N applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// G = ⟨T_{N/2} f_{1+N/2}⟩ × (⟨T_m⟩ ⋊ H), with T_{N/2}, f_{1+N/2} ∉ G.
    CentralProduct,
    /// No mixed elements: G = ⟨T_m⟩ ⋊ H.
    Split,
    /// Neither description matches the computed group.
    Violated,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CentralProduct => "central-product",
            Self::Split => "split",
            Self::Violated => "violated",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// N = 2^k · N̄.
    pub k: u32,
    pub odd_part: u64,
    pub regime: Regime,
    pub mixed_count: usize,
    pub g1_order: u64,
    pub h_order: usize,
    /// |G| against 2·|G^(1)|·|H| or |G^(1)|·|H|, depending on the regime tried.
    pub order_identity_holds: bool,
}

pub fn decompose(g: &SymmetryGroup) -> Decomposition {
    let n = g.n;
    let (k, odd_part) = two_adic(n);
    let mixed = g.mixed_elements();
    let g1_order = g.translation_order();
    let h_order = g.unit_part.len();
    let split_order = g1_order as usize * h_order;
    let half_in = k > 1 && g.contains_translation(n / 2);
    let lift_in = k > 1 && g.contains_unit(1 + n / 2);

    let (regime, order_identity_holds) = if k > 1 && !half_in && !lift_in {
        let holds = central_product_holds(g, &mixed);
        let order_ok = g.order() == 2 * split_order;
        (
            if holds && order_ok {
                Regime::CentralProduct
            } else {
                Regime::Violated
            },
            order_ok,
        )
    } else if k <= 1 || (half_in && lift_in) {
        let order_ok = g.order() == split_order;
        (
            if mixed.is_empty() && order_ok {
                Regime::Split
            } else {
                Regime::Violated
            },
            order_ok,
        )
    } else {
        (Regime::Violated, false)
    };
    Decomposition {
        k,
        odd_part,
        regime,
        mixed_count: mixed.len(),
        g1_order,
        h_order,
        order_identity_holds,
    }
}

/// c = T_{N/2} f_{1+N/2} is central, lies outside K = ⟨T_m⟩ ⋊ H, and
/// G = K ⊔ cK.
fn central_product_holds(g: &SymmetryGroup, mixed: &[AffineMap]) -> bool {
    let c = central_element(g.n);
    if !g.contains(c) {
        return false;
    }
    let central = g
        .elements
        .iter()
        .all(|&x| affine_compose(c, x).ok() == affine_compose(x, c).ok());
    let in_k = |x: AffineMap| g.contains_translation(x.b) && g.contains_unit(x.a);
    central && !in_k(c) && mixed.iter().all(|&x| in_k(affine_compose(c, x).expect("same modulus")))
}

/// For every mixed T_d f_ν: T_{2d} ∈ G and f_{ν²} ∈ G.
pub fn mixed_element_closure_check(g: &SymmetryGroup) -> bool {
    g.mixed_elements()
        .iter()
        .all(|f| g.contains_translation(2 * f.b % g.n) && g.contains_unit(mul_mod(f.a, f.a, g.n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfShift {
    /// G^(1) trivial or no mixed elements.
    NotApplicable,
    Holds,
    Fails,
}

/// All mixed elements lie in one coset (T_{m/2} f_ν)·(⟨T_m⟩ ⋊ H).
pub fn half_shift_uniqueness_check(g: &SymmetryGroup) -> HalfShift {
    let mixed = g.mixed_elements();
    let Some(m) = g.g1_generator else {
        return HalfShift::NotApplicable;
    };
    if mixed.is_empty() {
        return HalfShift::NotApplicable;
    }
    let in_k = |x: AffineMap| g.contains_translation(x.b) && g.contains_unit(x.a);
    let Some(&rep) = mixed.iter().find(|f| m % 2 == 0 && f.b == m / 2) else {
        return HalfShift::Fails;
    };
    let rep_inv = affine_inverse(rep);
    if mixed
        .iter()
        .all(|&y| in_k(affine_compose(rep_inv, y).expect("same modulus")))
    {
        HalfShift::Holds
    } else {
        HalfShift::Fails
    }
}

/// One dihedral group from the sieve's family and how it acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SieveGroup {
    /// D_{N/p} acting by (−1)^h (x + kp).
    P(u64),
    /// D_{⌊N/q⌋−1} acting through Q_k.
    Q(u64),
}

/// Result for one group: images of ρ and σ under a witnessing automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    pub group: SieveGroup,
    pub images: Option<(DihedralElement, DihedralElement)>,
}

impl Witness {
    pub fn holds(&self) -> bool {
        self.images.is_some()
    }
}

fn act_p(n: u64, p: u64, g: DihedralElement, x: u64) -> u64 {
    let y = (x + g.rot * p) % n;
    if g.reflect {
        (n - y) % n
    } else {
        y
    }
}

/// For each group of the sieve family, an automorphism φ (if any) with
/// f(g·x) = φ(g)·f(x) for all generators g and all x.
pub fn multi_invariance_witnesses(f: AffineMap, sieve: &GoldbachSieve) -> Result<Vec<Witness>, SymmetryError> {
    let n = sieve.n;
    let mut out = Vec::new();
    for &p in &sieve.split.p_list {
        let order = n / p;
        let act = move |g: DihedralElement, x: u64| act_p(n, p, g, x);
        out.push(Witness {
            group: SieveGroup::P(p),
            images: find_witness(f, n, order, act)?,
        });
    }
    for &q in &sieve.split.q_list {
        let order = n / q - 1;
        let act = move |g: DihedralElement, x: u64| act_q(n, q, g, x).expect("q from split");
        out.push(Witness {
            group: SieveGroup::Q(q),
            images: find_witness(f, n, order, act)?,
        });
    }
    Ok(out)
}

fn find_witness(
    f: AffineMap,
    n: u64,
    order: u64,
    act: impl Fn(DihedralElement, u64) -> u64,
) -> Result<Option<(DihedralElement, DihedralElement)>, SymmetryError> {
    let els = elements(order);
    // φ(g) must send f(x) to f(g·x) for every x.
    let candidates = |g: DihedralElement| -> Vec<DihedralElement> {
        els.iter()
            .copied()
            .filter(|&h| (0..n).all(|x| act(h, f.apply(x)) == f.apply(act(g, x))))
            .collect()
    };
    let rho = DihedralElement::rho(order);
    let sigma = DihedralElement::sigma(order);
    let (rs, ss) = (candidates(rho), candidates(sigma));
    if rs.is_empty() || ss.is_empty() {
        return Ok(None);
    }
    let auts: BTreeSet<(usize, usize)> = if order >= 3 {
        BTreeSet::new()
    } else {
        automorphism_table(order)?
            .iter()
            .map(|a| (a.apply(rho.index()), a.apply(sigma.index())))
            .collect()
    };
    let is_aut_image = |r: DihedralElement, s: DihedralElement| {
        if order >= 3 {
            // ρ ↦ ρ^ν with ν a unit, σ ↦ any reflection.
            !r.reflect && gcd(r.rot, order) == 1 && s.reflect
        } else {
            auts.contains(&(r.index(), s.index()))
        }
    };
    for &r in &rs {
        for &s in &ss {
            if is_aut_image(r, s) && dihedral_mul(s, s).map(|e| e.rot == 0 && !e.reflect).unwrap_or(false) {
                return Ok(Some((r, s)));
            }
        }
    }
    Ok(None)
}

/// Verdict of a check that can fail on specific inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub holds: bool,
    /// Human-readable first counterexample.
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    fn ok() -> Self {
        Self {
            holds: true,
            counterexample: None,
        }
    }

    fn fail(msg: String) -> Self {
        Self {
            holds: false,
            counterexample: Some(msg),
        }
    }
}

/// T_{2d} ∈ G ⟹ f_{1+2dt} ∈ G ∩ U(Z_N) for t = 1, …, N/(2d) − 1.
pub fn unit_lift_check(g: &SymmetryGroup) -> CheckOutcome {
    let n = g.n;
    let Some(m) = g.g1_generator else {
        return CheckOutcome::ok();
    };
    for two_d in (m..n).step_by(m as usize) {
        if two_d % 2 != 0 {
            continue;
        }
        for t in 1..n / two_d {
            let u = (1 + two_d * t) % n;
            if inv_mod(u, n).is_none() {
                return CheckOutcome::fail(format!("N={n}: T_{two_d} in G but 1+{two_d}*{t} = {u} is not a unit"));
            }
            if !g.contains_unit(u) {
                return CheckOutcome::fail(format!("N={n}: T_{two_d} in G but f_{u} is not"));
            }
        }
    }
    CheckOutcome::ok()
}

/// H = {1, N−1} forces G = ⟨f_{−1}⟩ (k = 1) or ⟨c⟩ × ⟨f_{−1}⟩ (k > 1).
pub fn minimal_unit_part_check(g: &SymmetryGroup) -> CheckOutcome {
    let n = g.n;
    if n <= 2 || g.unit_part != vec![1, n - 1] {
        return CheckOutcome::ok();
    }
    let minus = AffineMap { a: n - 1, b: 0, n };
    let mut expected = vec![AffineMap::identity(n), minus];
    if n % 4 == 0 {
        let c = central_element(n);
        expected.push(c);
        expected.push(affine_compose(c, minus).expect("same modulus"));
    }
    expected.sort();
    expected.dedup();
    if expected == g.elements {
        CheckOutcome::ok()
    } else {
        CheckOutcome::fail(format!(
            "N={n}: H = {{1, N-1}} but |G| = {} (expected {})",
            g.order(),
            expected.len()
        ))
    }
}
