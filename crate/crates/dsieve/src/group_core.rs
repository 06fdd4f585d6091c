//! Finite groups given by Cayley tables, their actions on small sets, and
//! brute-force machinery for automorphism-equivariant bijections.
//!
//! A bijection `f` of `X` is *φ-invariant* when `f(g·x) = φ(g)·f(x)` for every
//! `g` and `x`. The set of all bijections that are φ-invariant for some
//! automorphism φ is a subgroup of `Sym(X)`; this module enumerates it, builds
//! its elements from orbit data, and reports how it decomposes.
//!
//! Conventions: the identity is index 0; orbit representatives are minimal
//! point indices; conjugation is `S^g = g S g⁻¹`; whenever a group element
//! has to be chosen, the smallest index wins.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

/// Hard cap on the order of a Cayley-table group.
pub const MAX_GROUP_ORDER: usize = 200;
/// Hard cap on `|X|` for factorial enumeration of `Sym(X)`.
pub const MAX_BRUTE_POINTS: usize = 10;
/// Hard cap on generator-image tuples tried when enumerating automorphisms.
pub const MAX_AUT_CANDIDATES: usize = 10_000;
/// Cap on the number of choice combinations explored by bounded searches.
pub const MAX_SEARCH: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("empty Cayley table")]
    EmptyTable,
    #[error("row {row} has length {len}, expected {order}")]
    Ragged { row: usize, len: usize, order: usize },
    #[error("table entry {entry} out of range for order {order}")]
    EntryOutOfRange { entry: usize, order: usize },
    #[error("index 0 is not a two-sided identity")]
    IdentityNotZero,
    #[error("element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("action table has wrong size")]
    ActionShape,
    #[error("action sends a point outside the set")]
    ActionRange,
    #[error("identity moves point {0}")]
    ActionIdentity(usize),
    #[error("action is not compatible with multiplication at g={g}, h={h}, x={x}")]
    ActionCompat { g: usize, h: usize, x: usize },
    #[error("members do not form a subgroup")]
    NotSubgroup,
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
    #[error("fixture parse error: {0}")]
    Parse(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("no invariant function exists for this automorphism")]
    NoInvariant,
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("closure check failed: {0}")]
    NotClosed(String),
}

/// A finite group stored as a full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inv: Vec<usize>,
}

impl FiniteGroup {
    /// Validates the group axioms; identity must be index 0.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::EmptyTable);
        }
        if n > MAX_GROUP_ORDER {
            return Err(GroupError::Capacity(format!(
                "group order {n} exceeds {MAX_GROUP_ORDER}"
            )));
        }
        let mut table = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(GroupError::Ragged {
                    row,
                    len: r.len(),
                    order: n,
                });
            }
            for &e in r {
                if e >= n {
                    return Err(GroupError::EntryOutOfRange { entry: e, order: n });
                }
                table.push(e);
            }
        }
        let at = |a: usize, b: usize| table[a * n + b];
        for x in 0..n {
            if at(0, x) != x || at(x, 0) != x {
                return Err(GroupError::IdentityNotZero);
            }
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| at(a, b) == 0 && at(b, a) == 0)
                .ok_or(GroupError::NoInverse(a))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(Self { order: n, table, inv })
    }

    /// Builds the table from a closure; used for closed-form families.
    pub fn from_fn(order: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self, GroupError> {
        let rows = (0..order).map(|a| (0..order).map(|b| mul(a, b)).collect()).collect();
        Self::from_table(rows)
    }

    /// Parses the plain-text fixture format: `n`, then `n` rows of `n` indices.
    pub fn from_fixture(text: &str) -> Result<Self, GroupError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| GroupError::Parse("missing order line".into()))?
            .parse()
            .map_err(|e| GroupError::Parse(format!("bad order: {e}")))?;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| GroupError::Parse(format!("missing row {i}")))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| GroupError::Parse(format!("row {i}: {e}")))?;
            rows.push(row);
        }
        if lines.next().is_some() {
            return Err(GroupError::Parse("trailing data".into()));
        }
        Self::from_table(rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Members of the subgroup generated by `gens`, sorted.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    /// First irredundant generating sequence in index order.
    pub fn generating_sequence(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current = vec![0usize];
        for g in 1..self.order {
            if current.binary_search(&g).is_err() {
                gens.push(g);
                current = self.generated(&gens);
                if current.len() == self.order {
                    break;
                }
            }
        }
        gens
    }

    pub fn conjugate_element(&self, g: usize, s: usize) -> usize {
        self.mul(self.mul(g, s), self.inv(g))
    }
}

/// A subgroup as a sorted list of member indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    members: Vec<usize>,
}

impl Subgroup {
    /// Checks closure under multiplication and inversion.
    pub fn new(group: &FiniteGroup, members: impl IntoIterator<Item = usize>) -> Result<Self, GroupError> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if !set.contains(&0) || set.iter().any(|&m| m >= group.order()) {
            return Err(GroupError::NotSubgroup);
        }
        for &a in &set {
            if !set.contains(&group.inv(a)) {
                return Err(GroupError::NotSubgroup);
            }
            for &b in &set {
                if !set.contains(&group.mul(a, b)) {
                    return Err(GroupError::NotSubgroup);
                }
            }
        }
        Ok(Self {
            members: set.into_iter().collect(),
        })
    }

    fn from_sorted(members: Vec<usize>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }
}

/// A group acting on `{0, .., points-1}`.
#[derive(Debug, Clone)]
pub struct FiniteAction {
    group: FiniteGroup,
    points: usize,
    table: Vec<usize>,
}

impl FiniteAction {
    /// Tabulates `act` and checks the two action laws.
    pub fn new(group: FiniteGroup, points: usize, act: impl Fn(usize, usize) -> usize) -> Result<Self, GroupError> {
        let n = group.order();
        let mut table = Vec::with_capacity(n * points);
        for g in 0..n {
            for x in 0..points {
                let y = act(g, x);
                if y >= points {
                    return Err(GroupError::ActionRange);
                }
                table.push(y);
            }
        }
        let action = Self { group, points, table };
        action.validate()?;
        Ok(action)
    }

    fn validate(&self) -> Result<(), GroupError> {
        if self.table.len() != self.group.order() * self.points {
            return Err(GroupError::ActionShape);
        }
        for x in 0..self.points {
            if self.act(0, x) != x {
                return Err(GroupError::ActionIdentity(x));
            }
        }
        for g in 0..self.group.order() {
            for h in 0..self.group.order() {
                let gh = self.group.mul(g, h);
                for x in 0..self.points {
                    if self.act(g, self.act(h, x)) != self.act(gh, x) {
                        return Err(GroupError::ActionCompat { g, h, x });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.table[g * self.points + x]
    }
}

/// Orbit partition with canonical (minimal) representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbits {
    pub reps: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Orbit index of every point.
    pub index: Vec<usize>,
}

impl Orbits {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// An automorphism stored as the image of every group index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupAutomorphism {
    pub images: Vec<usize>,
}

impl GroupAutomorphism {
    pub fn identity(order: usize) -> Self {
        Self {
            images: (0..order).collect(),
        }
    }

    pub fn apply(&self, g: usize) -> usize {
        self.images[g]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&g| self.images[g]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            images: invert_perm(&self.images),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &g)| i == g)
    }

    /// Bijective and multiplication-preserving on `group`.
    pub fn is_automorphism_of(&self, group: &FiniteGroup) -> bool {
        let n = group.order();
        if self.images.len() != n || !is_permutation(&self.images) {
            return false;
        }
        (0..n).all(|a| (0..n).all(|b| self.apply(group.mul(a, b)) == group.mul(self.apply(a), self.apply(b))))
    }

    pub fn image_of(&self, s: &Subgroup) -> Subgroup {
        let mut m: Vec<usize> = s.members().iter().map(|&g| self.apply(g)).collect();
        m.sort_unstable();
        Subgroup::from_sorted(m)
    }
}

/// Choice of target orbit `j` and coset element `g_ij` for one orbit `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetChoice {
    pub target: usize,
    pub g: usize,
}

/// A φ-invariant bijection of `X` together with the data that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFunction {
    pub perm: Vec<usize>,
    pub phi: GroupAutomorphism,
    pub choices: Vec<CosetChoice>,
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// `p ∘ q`.
pub fn compose_perm(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&x| p[x]).collect()
}

pub fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

pub fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn orbits(action: &FiniteAction) -> Orbits {
    let n = action.points();
    let mut index = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut members = Vec::new();
    for x in 0..n {
        if index[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        let mut orbit: BTreeSet<usize> = BTreeSet::new();
        for g in 0..action.group().order() {
            orbit.insert(action.act(g, x));
        }
        for &y in &orbit {
            index[y] = id;
        }
        reps.push(x);
        members.push(orbit.into_iter().collect());
    }
    Orbits { reps, members, index }
}

pub fn stabilizer(action: &FiniteAction, x: usize) -> Result<Subgroup, GroupError> {
    if x >= action.points() {
        return Err(GroupError::PointOutOfRange(x));
    }
    Ok(Subgroup::from_sorted(
        (0..action.group().order()).filter(|&g| action.act(g, x) == x).collect(),
    ))
}

/// `S^g = g S g⁻¹`.
pub fn conjugate(group: &FiniteGroup, s: &Subgroup, g: usize) -> Subgroup {
    let mut m: Vec<usize> = s.members().iter().map(|&x| group.conjugate_element(g, x)).collect();
    m.sort_unstable();
    Subgroup::from_sorted(m)
}

pub fn normalizer(group: &FiniteGroup, s: &Subgroup) -> Subgroup {
    Subgroup::from_sorted((0..group.order()).filter(|&g| conjugate(group, s, g) == *s).collect())
}

/// Smallest `g` with `S1^g = S2`.
pub fn conjugating_element(group: &FiniteGroup, s1: &Subgroup, s2: &Subgroup) -> Option<usize> {
    if s1.len() != s2.len() {
        return None;
    }
    (0..group.order()).find(|&g| conjugate(group, s1, g) == *s2)
}

/// Every automorphism of `group`, sorted by image table.
pub fn automorphisms(group: &FiniteGroup) -> Result<Vec<GroupAutomorphism>, GroupError> {
    let n = group.order();
    let gens = group.generating_sequence();
    let orders: Vec<usize> = (0..n).map(|g| group.element_order(g)).collect();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| (0..n).filter(|&t| orders[t] == orders[s]).collect())
        .collect();
    let total = candidates
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
        .unwrap_or(usize::MAX);
    if total > MAX_AUT_CANDIDATES {
        return Err(GroupError::Capacity(format!(
            "{total} generator-image candidates exceed {MAX_AUT_CANDIDATES}"
        )));
    }
    let mut found = Vec::new();
    let mut pick = vec![0usize; gens.len()];
    loop {
        let images: Vec<usize> = pick.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        if let Some(map) = extend_hom(group, &gens, &images) {
            found.push(GroupAutomorphism { images: map });
        }
        if !advance(&mut pick, &candidates) {
            break;
        }
    }
    found.sort();
    Ok(found)
}

fn advance<T>(pick: &mut [usize], ranges: &[Vec<T>]) -> bool {
    for i in (0..pick.len()).rev() {
        pick[i] += 1;
        if pick[i] < ranges[i].len() {
            return true;
        }
        pick[i] = 0;
    }
    false
}

/// Extends generator images to a bijective homomorphism, if one exists.
///
/// Checking `φ(x·s) = φ(x)·φ(s)` on every edge of the Cayley graph is enough:
/// it propagates to all words in the generators.
fn extend_hom(group: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let n = group.order();
    let mut map = vec![usize::MAX; n];
    map[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = group.mul(x, s);
            let img = group.mul(map[x], t);
            if map[y] == usize::MAX {
                map[y] = img;
                queue.push_back(y);
            } else if map[y] != img {
                return None;
            }
        }
    }
    if map.contains(&usize::MAX) || !is_permutation(&map) {
        return None;
    }
    Some(map)
}

pub fn inner_automorphisms(group: &FiniteGroup) -> Vec<GroupAutomorphism> {
    let set: BTreeSet<GroupAutomorphism> = (0..group.order())
        .map(|g| GroupAutomorphism {
            images: (0..group.order()).map(|h| group.conjugate_element(g, h)).collect(),
        })
        .collect();
    set.into_iter().collect()
}

/// Stabilizers of the orbit representatives.
pub fn rep_stabilizers(action: &FiniteAction, orbs: &Orbits) -> Vec<Subgroup> {
    orbs.reps
        .iter()
        .map(|&x| stabilizer(action, x).expect("representative in range"))
        .collect()
}

fn conjugate_to(group: &FiniteGroup, a: &Subgroup, b: &Subgroup) -> bool {
    conjugating_element(group, a, b).is_some()
}

/// For each orbit `i`, the orbits `j` with `φ(S_i)` conjugate to `S_j`.
pub fn stabilizer_targets(
    action: &FiniteAction,
    orbs: &Orbits,
    stabs: &[Subgroup],
    phi: &GroupAutomorphism,
) -> Vec<Vec<usize>> {
    stabs
        .iter()
        .map(|s| {
            let img = phi.image_of(s);
            (0..orbs.count())
                .filter(|&j| conjugate_to(action.group(), &stabs[j], &img))
                .collect()
        })
        .collect()
}

fn passes_existence_criterion(targets: &[Vec<usize>]) -> bool {
    targets.iter().all(|t| !t.is_empty())
}

/// Automorphisms sending every representative stabilizer to a conjugate of
/// some representative stabilizer.
pub fn s_invariant_automorphisms(action: &FiniteAction) -> Result<Vec<GroupAutomorphism>, GroupError> {
    let orbs = orbits(action);
    let stabs = rep_stabilizers(action, &orbs);
    let all = automorphisms(action.group())?;
    let selected: Vec<GroupAutomorphism> = all
        .into_iter()
        .filter(|phi| passes_existence_criterion(&stabilizer_targets(action, &orbs, &stabs, phi)))
        .collect();
    let set: BTreeSet<&GroupAutomorphism> = selected.iter().collect();
    for a in &selected {
        if !set.contains(&a.inverse()) {
            return Err(GroupError::NotClosed("automorphism inverse missing".into()));
        }
        for b in &selected {
            if !set.contains(&a.compose(b)) {
                return Err(GroupError::NotClosed("automorphism product missing".into()));
            }
        }
    }
    Ok(selected)
}

/// Orbit permutations γ with `φ(S_i)` conjugate to `S_{γ(i)}` for all `i`, in
/// lexicographic order.
pub fn admissible_permutations(targets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn rec(i: usize, targets: &[Vec<usize>], used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == targets.len() {
            out.push(cur.clone());
            return;
        }
        for &j in &targets[i] {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(i + 1, targets, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, targets, &mut vec![false; targets.len()], &mut Vec::new(), &mut out);
    out
}

/// Minimal-index coset choices `g_i` with `φ(S_i) = S_{γ(i)}^{g_i}`.
pub fn canonical_coset_choices(
    action: &FiniteAction,
    phi: &GroupAutomorphism,
    gamma: &[usize],
) -> Result<Vec<CosetChoice>, GroupError> {
    let orbs = orbits(action);
    let stabs = rep_stabilizers(action, &orbs);
    if gamma.len() != orbs.count() || !is_permutation(gamma) {
        return Err(GroupError::Construction(
            "γ is not a permutation of orbit indices".into(),
        ));
    }
    gamma
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            conjugating_element(action.group(), &stabs[j], &phi.image_of(&stabs[i]))
                .map(|g| CosetChoice { target: j, g })
                .ok_or_else(|| GroupError::Construction(format!("φ(S_{i}) is not conjugate to S_{j}")))
        })
        .collect()
}

/// True iff `f(g·x) = φ(g)·f(x)` for all `g`, `x`.
pub fn is_equivariant(action: &FiniteAction, perm: &[usize], phi: &GroupAutomorphism) -> bool {
    (0..action.group().order()).all(|g| {
        let pg = phi.apply(g);
        (0..action.points()).all(|x| perm[action.act(g, x)] == action.act(pg, perm[x]))
    })
}

/// Builds `f(h·x_i) = φ(h)·g_i·x_{j}` and verifies it exhaustively.
pub fn build_phi_invariant(
    action: &FiniteAction,
    phi: &GroupAutomorphism,
    choices: &[CosetChoice],
) -> Result<InvariantFunction, GroupError> {
    let group = action.group();
    if !phi.is_automorphism_of(group) {
        return Err(GroupError::Construction("φ is not an automorphism".into()));
    }
    let orbs = orbits(action);
    let stabs = rep_stabilizers(action, &orbs);
    if !passes_existence_criterion(&stabilizer_targets(action, &orbs, &stabs, phi)) {
        return Err(GroupError::NoInvariant);
    }
    if choices.len() != orbs.count() {
        return Err(GroupError::Construction("one coset choice per orbit required".into()));
    }
    let gamma: Vec<usize> = choices.iter().map(|c| c.target).collect();
    if !is_permutation(&gamma) {
        return Err(GroupError::Construction("targets do not permute the orbits".into()));
    }
    for (i, c) in choices.iter().enumerate() {
        if c.g >= group.order() {
            return Err(GroupError::Construction(format!("g_{i} out of range")));
        }
        if conjugate(group, &stabs[c.target], c.g) != phi.image_of(&stabs[i]) {
            return Err(GroupError::Construction(format!(
                "φ(S_{i}) differs from S_{}^g",
                c.target
            )));
        }
    }
    let images: Vec<usize> = choices.iter().map(|c| action.act(c.g, orbs.reps[c.target])).collect();
    let perm = assemble(action, &orbs, phi, &images)
        .ok_or_else(|| GroupError::Construction("map is not a well-defined bijection".into()))?;
    if !is_equivariant(action, &perm, phi) {
        return Err(GroupError::Construction("equivariance check failed".into()));
    }
    Ok(InvariantFunction {
        perm,
        phi: phi.clone(),
        choices: choices.to_vec(),
    })
}

/// Extends `x_i ↦ images[i]` equivariantly; `None` if ill-defined or not bijective.
fn assemble(action: &FiniteAction, orbs: &Orbits, phi: &GroupAutomorphism, images: &[usize]) -> Option<Vec<usize>> {
    let mut perm = vec![usize::MAX; action.points()];
    for (i, &x) in orbs.reps.iter().enumerate() {
        for h in 0..action.group().order() {
            let y = action.act(h, x);
            let v = action.act(phi.apply(h), images[i]);
            if perm[y] == usize::MAX {
                perm[y] = v;
            } else if perm[y] != v {
                return None;
            }
        }
    }
    is_permutation(&perm).then_some(perm)
}

/// The permutation γ of orbit indices with `f(Orb_i) = Orb_{γ(i)}`.
pub fn induced_permutation(action: &FiniteAction, perm: &[usize]) -> Result<Vec<usize>, GroupError> {
    let orbs = orbits(action);
    let gamma: Vec<usize> = orbs.reps.iter().map(|&x| orbs.index[perm[x]]).collect();
    for (i, m) in orbs.members.iter().enumerate() {
        if m.iter().any(|&y| orbs.index[perm[y]] != gamma[i]) {
            return Err(GroupError::Construction(
                "function does not map orbits to orbits".into(),
            ));
        }
    }
    if !is_permutation(&gamma) {
        return Err(GroupError::Construction("orbit images collide".into()));
    }
    Ok(gamma)
}

fn record(action: &FiniteAction, orbs: &Orbits, perm: Vec<usize>, phi: &GroupAutomorphism) -> InvariantFunction {
    let choices = orbs
        .reps
        .iter()
        .map(|&x| {
            let y = perm[x];
            let target = orbs.index[y];
            let g = (0..action.group().order())
                .find(|&h| action.act(h, orbs.reps[target]) == y)
                .expect("y lies in orbit target");
            CosetChoice { target, g }
        })
        .collect();
    InvariantFunction {
        perm,
        phi: phi.clone(),
        choices,
    }
}

/// Brute force over all of `Sym(X)`: every bijection that is φ-invariant for
/// some automorphism φ. Sorted by permutation.
pub fn enumerate_invariant_group(action: &FiniteAction) -> Result<Vec<InvariantFunction>, GroupError> {
    let n = action.points();
    if n > MAX_BRUTE_POINTS {
        return Err(GroupError::Capacity(format!(
            "|X| = {n} exceeds {MAX_BRUTE_POINTS} for factorial enumeration"
        )));
    }
    let orbs = orbits(action);
    let auts = automorphisms(action.group())?;
    let gens = action.group().generating_sequence();
    let mut out = Vec::new();
    let mut perm = identity_perm(n);
    let mut c = vec![0usize; n];
    let mut visit = |p: &[usize]| {
        let witness = auts.iter().find(|phi| {
            gens.iter().all(|&g| {
                let pg = phi.apply(g);
                (0..n).all(|x| p[action.act(g, x)] == action.act(pg, p[x]))
            })
        });
        if let Some(phi) = witness {
            out.push(record(action, &orbs, p.to_vec(), phi));
        }
    };
    // Heap's algorithm.
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out.sort_by(|a, b| a.perm.cmp(&b.perm));
    verify_closure(&out)?;
    Ok(out)
}

/// Orbit-by-orbit construction of the same group: for every S-invariant φ,
/// every admissible image of each representative. Scales past `|X| = 10`.
pub fn invariant_group(action: &FiniteAction) -> Result<Vec<InvariantFunction>, GroupError> {
    let orbs = orbits(action);
    let stabs = rep_stabilizers(action, &orbs);
    let auts = s_invariant_automorphisms(action)?;
    let point_stabs: Vec<Subgroup> = (0..action.points())
        .map(|x| stabilizer(action, x).expect("in range"))
        .collect();
    let mut found: BTreeMap<Vec<usize>, InvariantFunction> = BTreeMap::new();
    let mut explored = 0usize;
    for phi in &auts {
        let options: Vec<Vec<usize>> = stabs
            .iter()
            .map(|s| {
                let img = phi.image_of(s);
                (0..action.points()).filter(|&y| point_stabs[y] == img).collect()
            })
            .collect();
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        let mut pick = vec![0usize; options.len()];
        loop {
            explored += 1;
            if explored > MAX_SEARCH * 10 {
                return Err(GroupError::Capacity("too many representative images".into()));
            }
            let images: Vec<usize> = pick.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            if let Some(perm) = assemble(action, &orbs, phi, &images) {
                if let std::collections::btree_map::Entry::Vacant(slot) = found.entry(perm) {
                    let f = record(action, &orbs, slot.key().clone(), phi);
                    slot.insert(f);
                }
            }
            if !advance(&mut pick, &options) {
                break;
            }
        }
    }
    let out: Vec<InvariantFunction> = found.into_values().collect();
    verify_closure(&out)?;
    Ok(out)
}

/// Closure under composition and inversion of a set of permutations.
pub fn verify_closure(elements: &[InvariantFunction]) -> Result<(), GroupError> {
    let set: BTreeSet<&[usize]> = elements.iter().map(|f| f.perm.as_slice()).collect();
    for f in elements {
        if !set.contains(invert_perm(&f.perm).as_slice()) {
            return Err(GroupError::NotClosed("inverse missing".into()));
        }
        for h in elements {
            if !set.contains(compose_perm(&f.perm, &h.perm).as_slice()) {
                return Err(GroupError::NotClosed("product missing".into()));
            }
        }
    }
    Ok(())
}

/// Automorphisms fixing every representative stabilizer with
/// `φ(g)·x_i = g·x_i` for all `g` and `i`.
pub fn quasi_identical(action: &FiniteAction, auts: &[GroupAutomorphism]) -> Vec<GroupAutomorphism> {
    let orbs = orbits(action);
    let stabs = rep_stabilizers(action, &orbs);
    auts.iter()
        .filter(|phi| {
            stabs.iter().all(|s| phi.image_of(s) == *s)
                && orbs
                    .reps
                    .iter()
                    .all(|&x| (0..action.group().order()).all(|g| action.act(phi.apply(g), x) == action.act(g, x)))
        })
        .cloned()
        .collect()
}

/// Outcome of checking one of the two decomposition hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssumptionCheck {
    /// The canonical choice already works.
    Canonical,
    /// The canonical choice fails but a bounded search found one that works.
    Searched,
    /// Exhaustive search shows no choice works.
    Unsatisfiable,
    /// Search bound reached without a decision.
    Undecided,
}

impl AssumptionCheck {
    pub fn is_satisfied(self) -> bool {
        matches!(self, Self::Canonical | Self::Searched)
    }
}

/// Cardinalities in the decomposition of the invariant group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport {
    pub hat_order: usize,
    /// ∏ |N_G(S_i) / S_i|.
    pub normalizer_quotient_product: usize,
    /// Orbit permutations induced by identity-invariant functions.
    pub identity_induced_count: usize,
    /// Orbit permutations induced by all invariant functions.
    pub induced_count: usize,
    pub aut_s_order: usize,
    pub quasi_identical_order: usize,
    pub ker_f_order: usize,
    pub orbit_fixing_order: usize,
    pub inner_order: usize,
    pub assumption_one: AssumptionCheck,
    pub assumption_two: AssumptionCheck,
    /// `|hat| = ∏|N_i/S_i| · |Sym(I)^{I_G}| · |Aut^S| / |I_G^S|`.
    pub product_identity_holds: bool,
}

/// Induced-permutation data shared by the report and the tests.
#[derive(Debug, Clone)]
pub struct InducedData {
    pub auts: Vec<GroupAutomorphism>,
    /// Γ(φ) for each automorphism in `auts`, lexicographic.
    pub gammas: Vec<Vec<Vec<usize>>>,
}

impl InducedData {
    pub fn new(action: &FiniteAction) -> Result<Self, GroupError> {
        let orbs = orbits(action);
        let stabs = rep_stabilizers(action, &orbs);
        let auts = s_invariant_automorphisms(action)?;
        let gammas = auts
            .iter()
            .map(|phi| admissible_permutations(&stabilizer_targets(action, &orbs, &stabs, phi)))
            .collect();
        Ok(Self { auts, gammas })
    }

    pub fn identity_gammas(&self) -> &[Vec<usize>] {
        let id = self
            .auts
            .iter()
            .position(|a| a.is_identity())
            .expect("identity is S-invariant");
        &self.gammas[id]
    }

    /// Union of Γ(φ) over all φ.
    pub fn all_gammas(&self) -> BTreeSet<Vec<usize>> {
        self.gammas.iter().flatten().cloned().collect()
    }

    /// φ with Γ(φ) ⊆ Γ(identity).
    pub fn ker_f(&self) -> Vec<GroupAutomorphism> {
        let ident: BTreeSet<&Vec<usize>> = self.identity_gammas().iter().collect();
        self.auts
            .iter()
            .zip(&self.gammas)
            .filter(|(_, g)| g.iter().all(|p| ident.contains(p)))
            .map(|(a, _)| a.clone())
            .collect()
    }
}

/// Automorphisms sending each representative stabilizer to one of its own conjugates.
pub fn orbit_fixing_automorphisms(action: &FiniteAction) -> Result<Vec<GroupAutomorphism>, GroupError> {
    let orbs = orbits(action);
    let stabs = rep_stabilizers(action, &orbs);
    Ok(automorphisms(action.group())?
        .into_iter()
        .filter(|phi| stabs.iter().all(|s| conjugate_to(action.group(), s, &phi.image_of(s))))
        .collect())
}

pub fn decomposition_report(action: &FiniteAction) -> Result<DecompositionReport, GroupError> {
    let group = action.group();
    let orbs = orbits(action);
    let stabs = rep_stabilizers(action, &orbs);
    let hat = invariant_group(action)?;
    let data = InducedData::new(action)?;
    let quasi = quasi_identical(action, &data.auts);
    let normalizer_quotient_product: usize = stabs.iter().map(|s| normalizer(group, s).len() / s.len()).product();
    let identity_induced_count = data.identity_gammas().len();
    let aut_s_order = data.auts.len();
    let product_identity_holds =
        hat.len() * quasi.len() == normalizer_quotient_product * identity_induced_count * aut_s_order;
    Ok(DecompositionReport {
        hat_order: hat.len(),
        normalizer_quotient_product,
        identity_induced_count,
        induced_count: data.all_gammas().len(),
        aut_s_order,
        quasi_identical_order: quasi.len(),
        ker_f_order: data.ker_f().len(),
        orbit_fixing_order: orbit_fixing_automorphisms(action)?.len(),
        inner_order: inner_automorphisms(group).len(),
        assumption_one: check_assumption_one(&data, &quasi),
        assumption_two: check_assumption_two(action, &data, &hat)?,
        product_identity_holds,
    })
}

/// Whether φ ↦ γ^φ can be chosen as a homomorphism trivial on the
/// quasi-identical automorphisms.
pub fn check_assumption_one(data: &InducedData, quasi: &[GroupAutomorphism]) -> AssumptionCheck {
    let index: HashMap<&GroupAutomorphism, usize> = data.auts.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let quasi_idx: Vec<usize> = quasi.iter().map(|q| index[q]).collect();
    let t = data.gammas[0].first().map_or(0, Vec::len);
    let id_perm = identity_perm(t);
    let is_valid = |sel: &[Vec<usize>]| {
        quasi_idx.iter().all(|&q| sel[q] == id_perm)
            && (0..data.auts.len()).all(|a| {
                (0..data.auts.len()).all(|b| {
                    let ab = index[&data.auts[a].compose(&data.auts[b])];
                    sel[ab] == compose_perm(&sel[a], &sel[b])
                })
            })
    };
    let canonical: Vec<Vec<usize>> = data.gammas.iter().map(|g| g[0].clone()).collect();
    if is_valid(&canonical) {
        return AssumptionCheck::Canonical;
    }
    // Search over images of a generating sequence of Aut^S.
    let n = data.auts.len();
    let mut gens: Vec<usize> = Vec::new();
    let mut reached: BTreeSet<usize> = BTreeSet::from([index[&GroupAutomorphism::identity(data.auts[0].images.len())]]);
    let close = |gens: &[usize]| {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let id = index[&GroupAutomorphism::identity(data.auts[0].images.len())];
        seen.insert(id);
        let mut q = VecDeque::from([id]);
        while let Some(x) = q.pop_front() {
            for &g in gens {
                let y = index[&data.auts[x].compose(&data.auts[g])];
                if seen.insert(y) {
                    q.push_back(y);
                }
            }
        }
        seen
    };
    for a in 0..n {
        if !reached.contains(&a) {
            gens.push(a);
            reached = close(&gens);
        }
    }
    let options: Vec<Vec<Vec<usize>>> = gens.iter().map(|&g| data.gammas[g].clone()).collect();
    let total = options
        .iter()
        .try_fold(1usize, |acc, o| acc.checked_mul(o.len()))
        .unwrap_or(usize::MAX);
    if total > MAX_SEARCH {
        return AssumptionCheck::Undecided;
    }
    let id = index[&GroupAutomorphism::identity(data.auts[0].images.len())];
    let mut pick = vec![0usize; gens.len()];
    loop {
        let mut sel: Vec<Option<Vec<usize>>> = vec![None; n];
        sel[id] = Some(id_perm.clone());
        let mut q = VecDeque::from([id]);
        let mut ok = true;
        while let Some(x) = q.pop_front() {
            for (k, &g) in gens.iter().enumerate() {
                let y = index[&data.auts[x].compose(&data.auts[g])];
                let img = compose_perm(sel[x].as_ref().expect("set"), &options[k][pick[k]]);
                match &sel[y] {
                    None => {
                        sel[y] = Some(img);
                        q.push_back(y);
                    }
                    Some(existing) if *existing != img => {
                        ok = false;
                        break;
                    }
                    _ => {}
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            let full: Vec<Vec<usize>> = sel.into_iter().map(|s| s.expect("generated")).collect();
            if is_valid(&full) {
                return AssumptionCheck::Searched;
            }
        }
        if !advance(&mut pick, &options) {
            return AssumptionCheck::Unsatisfiable;
        }
    }
}

/// Whether the subgroup of identity-invariant, orbit-fixing functions has a
/// complement in the invariant group.
pub fn check_assumption_two(
    action: &FiniteAction,
    data: &InducedData,
    hat: &[InvariantFunction],
) -> Result<AssumptionCheck, GroupError> {
    let n = action.points();
    let id_aut = GroupAutomorphism::identity(action.group().order());
    let kernel: BTreeSet<Vec<usize>> = hat
        .iter()
        .filter(|f| {
            is_equivariant(action, &f.perm, &id_aut)
                && induced_permutation(action, &f.perm)
                    .map(|g| g == identity_perm(g.len()))
                    .unwrap_or(false)
        })
        .map(|f| f.perm.clone())
        .collect();
    let quotient = hat.len() / kernel.len();
    let is_complement = |c: &BTreeSet<Vec<usize>>| {
        c.len() == quotient
            && c.iter().filter(|p| kernel.contains(*p)).count() == 1
            && c.iter().all(|a| c.iter().all(|b| c.contains(&compose_perm(a, b))))
    };

    let mut canonical: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (phi, gammas) in data.auts.iter().zip(&data.gammas) {
        for gamma in gammas {
            let choices = canonical_coset_choices(action, phi, gamma)?;
            canonical.insert(build_phi_invariant(action, phi, &choices)?.perm);
        }
    }
    if is_complement(&canonical) {
        return Ok(AssumptionCheck::Canonical);
    }

    // Lifts of a generating set of hat modulo the kernel.
    let kernel_vec: Vec<Vec<usize>> = kernel.iter().cloned().collect();
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut span = kernel.clone();
    for f in hat {
        if !span.contains(&f.perm) {
            gens.push(f.perm.clone());
            let mut seeds = kernel_vec.clone();
            seeds.extend(gens.iter().cloned());
            span = perm_closure(&seeds, n, usize::MAX);
        }
    }
    let options: Vec<Vec<Vec<usize>>> = gens
        .iter()
        .map(|g| kernel_vec.iter().map(|k| compose_perm(g, k)).collect())
        .collect();
    let total = options
        .iter()
        .try_fold(1usize, |acc, o| acc.checked_mul(o.len()))
        .unwrap_or(usize::MAX);
    if total > MAX_SEARCH {
        return Ok(AssumptionCheck::Undecided);
    }
    let mut pick = vec![0usize; gens.len()];
    loop {
        let lifts: Vec<Vec<usize>> = pick.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        let c = perm_closure(&lifts, n, quotient);
        if is_complement(&c) {
            return Ok(AssumptionCheck::Searched);
        }
        if !advance(&mut pick, &options) {
            return Ok(AssumptionCheck::Unsatisfiable);
        }
    }
}

/// Subgroup of `Sym(n)` generated by `gens`; stops early once larger than `cap`.
fn perm_closure(gens: &[Vec<usize>], n: usize, cap: usize) -> BTreeSet<Vec<usize>> {
    let id = identity_perm(n);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = compose_perm(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return seen;
                }
                queue.push_back(y);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z_n as a Cayley table.
    fn cyclic(n: usize) -> FiniteGroup {
        FiniteGroup::from_fn(n, |a, b| (a + b) % n).unwrap()
    }

    /// D_n with index h·n + k for σ^h ρ^k, acting on Z_{2n}.
    fn dihedral_action(n: usize) -> FiniteAction {
        let mul = |a: usize, b: usize| {
            let (h1, k1) = (a / n, a % n);
            let (h2, k2) = (b / n, b % n);
            let k = if h2 == 1 { (n - k1 + k2) % n } else { (k1 + k2) % n };
            ((h1 + h2) % 2) * n + k
        };
        let g = FiniteGroup::from_fn(2 * n, mul).unwrap();
        let m = 2 * n;
        FiniteAction::new(g, m, |e, x| {
            let (h, k) = (e / n, e % n);
            let y = (x + 2 * k) % m;
            if h == 1 {
                (m - y) % m
            } else {
                y
            }
        })
        .unwrap()
    }

    fn trivial_on(points: usize) -> FiniteAction {
        FiniteAction::new(cyclic(1), points, |_, x| x).unwrap()
    }

    #[test]
    fn table_validation() {
        assert_eq!(FiniteGroup::from_table(vec![]), Err(GroupError::EmptyTable));
        assert!(matches!(
            FiniteGroup::from_table(vec![vec![0, 1], vec![1]]),
            Err(GroupError::Ragged { .. })
        ));
        assert_eq!(
            FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]),
            Err(GroupError::IdentityNotZero)
        );
        // Latin square with identity 0 that is not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            FiniteGroup::from_table(loop5),
            Err(GroupError::NotAssociative(..))
        ));
        assert!(FiniteGroup::from_fn(MAX_GROUP_ORDER + 1, |a, b| (a + b) % (MAX_GROUP_ORDER + 1)).is_err());
    }

    #[test]
    fn fixture_round_trip() {
        let g = FiniteGroup::from_fixture("3\n0 1 2\n1 2 0\n2 0 1\n").unwrap();
        assert_eq!(g, cyclic(3));
        assert!(FiniteGroup::from_fixture("2\n0 1\n").is_err());
        assert!(FiniteGroup::from_fixture("2\n0 1\n1 0\n5\n").is_err());
    }

    #[test]
    fn action_validation() {
        let bad = FiniteAction::new(cyclic(2), 2, |g, _| g);
        assert!(matches!(bad, Err(GroupError::ActionIdentity(_))));
        let bad = FiniteAction::new(cyclic(3), 3, |g, x| if g == 0 { x } else { (x + 1) % 3 });
        assert!(matches!(bad, Err(GroupError::ActionCompat { .. })));
    }

    #[test]
    fn orbit_examples() {
        let o = orbits(&dihedral_action(3));
        assert_eq!(o.members, vec![vec![0, 2, 4], vec![1, 3, 5]]);
        assert_eq!(o.reps, vec![0, 1]);
        let o = orbits(&trivial_on(2));
        assert_eq!(o.members, vec![vec![0], vec![1]]);
        let o = orbits(&dihedral_action(4));
        assert_eq!(o.members, vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]]);
    }

    #[test]
    fn stabilizers_and_normalizers() {
        let a = dihedral_action(5);
        let (sigma, rho_sigma) = (5, 5 + 4);
        assert_eq!(stabilizer(&a, 0).unwrap().members(), &[0, sigma]);
        assert_eq!(stabilizer(&a, 1).unwrap().members(), &[0, rho_sigma]);
        let s0 = stabilizer(&a, 0).unwrap();
        assert_eq!(normalizer(a.group(), &s0), s0);
        let regular = FiniteAction::new(cyclic(4), 4, |g, x| (g + x) % 4).unwrap();
        assert_eq!(stabilizer(&regular, 2).unwrap().members(), &[0]);
        let z6 = cyclic(6);
        let s = Subgroup::new(&z6, [0, 3]).unwrap();
        assert_eq!(normalizer(&z6, &s).len(), 6);
        assert_eq!(Subgroup::new(&z6, [0, 1]), Err(GroupError::NotSubgroup));
    }

    #[test]
    fn conjugating_examples() {
        let a = dihedral_action(5);
        let s0 = stabilizer(&a, 0).unwrap();
        let s1 = stabilizer(&a, 1).unwrap();
        assert_eq!(conjugating_element(a.group(), &s0, &s0), Some(0));
        assert_eq!(conjugating_element(a.group(), &s0, &s1), Some(3));
        let b = dihedral_action(4);
        let t0 = stabilizer(&b, 0).unwrap();
        let t1 = stabilizer(&b, 1).unwrap();
        assert_eq!(conjugating_element(b.group(), &t0, &t1), None);
    }

    #[test]
    fn automorphism_counts() {
        // |Aut(D_n)| = n φ(n); |Aut(Z_n)| = φ(n).
        for (n, expect) in [(3usize, 6usize), (4, 8), (5, 20), (6, 12)] {
            assert_eq!(automorphisms(dihedral_action(n).group()).unwrap().len(), expect);
        }
        assert_eq!(automorphisms(&cyclic(12)).unwrap().len(), 4);
        for phi in automorphisms(dihedral_action(4).group()).unwrap() {
            assert!(phi.is_automorphism_of(dihedral_action(4).group()));
        }
    }

    #[test]
    fn s_invariant_examples() {
        assert_eq!(s_invariant_automorphisms(&dihedral_action(5)).unwrap().len(), 20);
        assert_eq!(s_invariant_automorphisms(&dihedral_action(4)).unwrap().len(), 8);
        let trivial = FiniteAction::new(cyclic(4), 3, |_, x| x).unwrap();
        assert_eq!(s_invariant_automorphisms(&trivial).unwrap().len(), 2);
    }

    #[test]
    fn build_examples() {
        let a = dihedral_action(5);
        let id = GroupAutomorphism::identity(10);
        let f = build_phi_invariant(
            &a,
            &id,
            &[CosetChoice { target: 0, g: 0 }, CosetChoice { target: 1, g: 0 }],
        )
        .unwrap();
        assert_eq!(f.perm, identity_perm(10));
        // inner automorphism by ρ^2 gives x ↦ ρ^2·x.
        let g = 2;
        let inner = GroupAutomorphism {
            images: (0..10).map(|h| a.group().conjugate_element(g, h)).collect(),
        };
        let f = build_phi_invariant(
            &a,
            &inner,
            &[CosetChoice { target: 0, g }, CosetChoice { target: 1, g }],
        )
        .unwrap();
        assert_eq!(f.perm, (0..10).map(|x| a.act(g, x)).collect::<Vec<_>>());
        // orbit swap with canonical coset choices is the translation by 5.
        let choices = canonical_coset_choices(&a, &id, &[1, 0]).unwrap();
        assert_eq!(
            choices,
            vec![CosetChoice { target: 1, g: 2 }, CosetChoice { target: 0, g: 3 }]
        );
        let f = build_phi_invariant(&a, &id, &choices).unwrap();
        assert_eq!(f.perm, (0..10).map(|x| (x + 5) % 10).collect::<Vec<_>>());
        assert_eq!(induced_permutation(&a, &f.perm).unwrap(), vec![1, 0]);
        // ill-formed coset choice
        let bad = build_phi_invariant(
            &a,
            &id,
            &[CosetChoice { target: 0, g: 1 }, CosetChoice { target: 1, g: 0 }],
        );
        assert!(matches!(bad, Err(GroupError::Construction(_))));
    }

    #[test]
    fn no_invariant_for_failing_automorphism() {
        // C2 × C2 acting on two points through its first factor only: the
        // swap of factors sends the stabilizer {0, b} to {0, a}, which is
        // no point stabilizer.
        let v = FiniteGroup::from_fn(4, |a, b| a ^ b).unwrap();
        let action = FiniteAction::new(v, 2, |g, x| if g & 1 == 1 { 1 - x } else { x }).unwrap();
        let swap = GroupAutomorphism {
            images: vec![0, 2, 1, 3],
        };
        assert!(swap.is_automorphism_of(action.group()));
        let r = build_phi_invariant(&action, &swap, &[CosetChoice { target: 0, g: 0 }]);
        assert_eq!(r.unwrap_err(), GroupError::NoInvariant);
        assert_eq!(s_invariant_automorphisms(&action).unwrap().len(), 2);
    }

    #[test]
    fn induced_of_inner_is_identity() {
        let a = dihedral_action(5);
        for g in 0..10 {
            let perm: Vec<usize> = (0..10).map(|x| a.act(g, x)).collect();
            assert_eq!(induced_permutation(&a, &perm).unwrap(), vec![0, 1]);
        }
    }

    #[test]
    fn brute_and_constructive_agree() {
        for n in [3usize, 4] {
            let a = dihedral_action(n);
            let brute: Vec<Vec<usize>> = enumerate_invariant_group(&a)
                .unwrap()
                .into_iter()
                .map(|f| f.perm)
                .collect();
            let built: Vec<Vec<usize>> = invariant_group(&a).unwrap().into_iter().map(|f| f.perm).collect();
            assert_eq!(brute, built);
        }
        let t = trivial_on(2);
        assert_eq!(enumerate_invariant_group(&t).unwrap().len(), 2);
        assert!(matches!(
            enumerate_invariant_group(&trivial_on(11)),
            Err(GroupError::Capacity(_))
        ));
    }

    #[test]
    fn invariant_group_orders() {
        // 2n φ(2n)
        assert_eq!(invariant_group(&dihedral_action(3)).unwrap().len(), 12);
        assert_eq!(invariant_group(&dihedral_action(4)).unwrap().len(), 32);
        assert_eq!(invariant_group(&dihedral_action(5)).unwrap().len(), 40);
    }

    #[test]
    fn uniqueness_when_normalizers_are_trivial() {
        let a = dihedral_action(5);
        let data = InducedData::new(&a).unwrap();
        let hat = invariant_group(&a).unwrap();
        for (phi, gammas) in data.auts.iter().zip(&data.gammas) {
            for gamma in gammas {
                let count = hat
                    .iter()
                    .filter(|f| is_equivariant(&a, &f.perm, phi) && induced_permutation(&a, &f.perm).unwrap() == *gamma)
                    .count();
                assert_eq!(count, 1);
            }
        }
    }

    #[test]
    fn reports() {
        let r = decomposition_report(&dihedral_action(3)).unwrap();
        assert_eq!(
            (
                r.hat_order,
                r.normalizer_quotient_product,
                r.identity_induced_count,
                r.aut_s_order,
                r.quasi_identical_order
            ),
            (12, 1, 2, 6, 1)
        );
        assert!(r.product_identity_holds);
        assert_eq!(r.assumption_one, AssumptionCheck::Canonical);
        assert!(r.assumption_two.is_satisfied());

        let r = decomposition_report(&dihedral_action(4)).unwrap();
        assert_eq!(r.hat_order, 32);
        assert_eq!(r.normalizer_quotient_product, 4);
        assert!(r.product_identity_holds);
        assert!(r.assumption_one.is_satisfied());
        assert_eq!(r.assumption_two, AssumptionCheck::Unsatisfiable);

        let r = decomposition_report(&trivial_on(1)).unwrap();
        assert_eq!(
            (r.hat_order, r.normalizer_quotient_product, r.identity_induced_count),
            (1, 1, 1)
        );
        assert!(r.product_identity_holds);
    }

    #[test]
    fn d4_normalizers_are_klein() {
        let a = dihedral_action(4);
        let n0 = normalizer(a.group(), &stabilizer(&a, 0).unwrap());
        // 1, ρ^2, σ, σρ^2
        assert_eq!(n0.members(), &[0, 2, 4, 6]);
        let n1 = normalizer(a.group(), &stabilizer(&a, 1).unwrap());
        assert_eq!(n1.members(), &[0, 2, 5, 7]);
    }

    fn witnesses(a: &FiniteAction, perm: &[usize]) -> Vec<GroupAutomorphism> {
        automorphisms(a.group())
            .unwrap()
            .into_iter()
            .filter(|phi| is_equivariant(a, perm, phi))
            .collect()
    }

    #[test]
    fn witness_laws() {
        let a = dihedral_action(3);
        let hat = enumerate_invariant_group(&a).unwrap();
        for f in &hat {
            let inv = invert_perm(&f.perm);
            assert!(is_equivariant(&a, &inv, &f.phi.inverse()));
            for h in &hat {
                let fh = compose_perm(&f.perm, &h.perm);
                assert!(is_equivariant(&a, &fh, &f.phi.compose(&h.phi)));
            }
            assert!(witnesses(&a, &f.perm).contains(&f.phi));
        }
    }

    #[test]
    fn automorphism_lattice() {
        for a in [dihedral_action(3), dihedral_action(4), dihedral_action(5)] {
            let data = InducedData::new(&a).unwrap();
            let inner: BTreeSet<_> = inner_automorphisms(a.group()).into_iter().collect();
            let fixing: BTreeSet<_> = orbit_fixing_automorphisms(&a).unwrap().into_iter().collect();
            let ker: BTreeSet<_> = data.ker_f().into_iter().collect();
            assert!(inner.is_subset(&fixing));
            assert!(fixing.is_subset(&ker));
        }
    }

    #[test]
    fn quotient_cardinality() {
        for a in [
            dihedral_action(3),
            dihedral_action(4),
            dihedral_action(5),
            dihedral_action(6),
        ] {
            let data = InducedData::new(&a).unwrap();
            let lhs = data.auts.len() * data.identity_gammas().len();
            let rhs = data.all_gammas().len() * data.ker_f().len();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn identity_induced_is_normal() {
        for a in [dihedral_action(3), dihedral_action(5)] {
            let data = InducedData::new(&a).unwrap();
            let ident: BTreeSet<Vec<usize>> = data.identity_gammas().iter().cloned().collect();
            for g in data.all_gammas() {
                let gi = invert_perm(&g);
                for s in &ident {
                    assert!(ident.contains(&compose_perm(&compose_perm(&g, s), &gi)));
                }
            }
        }
    }
}
