//! Batch classification of even N and report output.
//!
//! Conjecture fields are reported, never asserted. Work is partitioned by N
//! across a rayon pool and merged in ascending order, so reports are
//! byte-identical for any worker count.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::affine::{center, full_affine_group};
use crate::criteria::{
    coverage_identity_check, exclusion_criterion, is_cyclotomic, safe_prime_verdict, twice_prime_divisor_bound,
    valid_pairs, window_necessity_holds, window_set, CriteriaError, Exclusion,
};
use crate::dihedral::dihedral_action;
use crate::group_core::{
    automorphisms, canonical_coset_choices, compose_perm, decomposition_report, enumerate_invariant_group,
    inner_automorphisms, invert_perm, is_equivariant, orbit_fixing_automorphisms, FiniteAction, GroupError,
    InducedData,
};
use crate::modarith::{euler_phi, is_prime};
use crate::sieve::{build_sieve, goldbach_oracle, SieveError};
use crate::symmetry::{compute_symmetry_group, decompose, unit_lift_check, Regime, SymmetryError, SymmetryGroup};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("empty range: from {from} exceeds to {to} after rounding to even")]
    Range { from: u64, to: u64 },
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error("scan aborted at N={n}: {reason}")]
    Aborted { n: u64, reason: String },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv encoding: {0}")]
    Csv(#[from] csv::Error),
    #[error("json encoding: {0}")]
    Json(#[from] serde_json::Error),
}

/// `true`/`false` when the strong conjecture applies, `"not-applicable"` for
/// cyclotomic N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongMatch {
    NotApplicable,
    Applicable(bool),
}

impl Serialize for StrongMatch {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::NotApplicable => s.serialize_str("not-applicable"),
            Self::Applicable(b) => s.serialize_bool(*b),
        }
    }
}

/// Report column names, in serialization order.
pub const SCAN_FIELDS: [&str; 12] = [
    "N",
    "complement_size",
    "cyclotomic",
    "mono_orbital",
    "qmo",
    "g1_generator",
    "h_order",
    "group_order",
    "group_name",
    "regime",
    "strong_conjecture_match",
    "weak_conjecture_holds",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    #[serde(rename = "N")]
    pub n: u64,
    pub complement_size: usize,
    pub cyclotomic: bool,
    pub mono_orbital: bool,
    pub qmo: bool,
    /// 0 when G^(1) is trivial.
    pub g1_generator: u64,
    pub h_order: usize,
    pub group_order: usize,
    pub group_name: String,
    pub regime: String,
    pub strong_conjecture_match: StrongMatch,
    pub weak_conjecture_holds: bool,
}

pub fn classify(n: u64) -> Result<ScanRecord, ScanError> {
    let sieve = build_sieve(n)?;
    let group = compute_symmetry_group(&sieve)?;
    Ok(record_from(n, sieve.complement.len(), sieve.split.q_list.len(), &group))
}

fn record_from(n: u64, complement_size: usize, q_count: usize, group: &SymmetryGroup) -> ScanRecord {
    let cyclotomic = is_cyclotomic(n);
    let name = group.descriptor.name.clone();
    let strong = if cyclotomic {
        StrongMatch::NotApplicable
    } else {
        StrongMatch::Applicable(name == if n % 4 == 0 { "V" } else { "Z2" })
    };
    ScanRecord {
        n,
        complement_size,
        cyclotomic,
        mono_orbital: q_count == 1,
        qmo: q_count <= 1,
        g1_generator: group.g1_generator.unwrap_or(0),
        h_order: group.unit_part.len(),
        group_order: group.order(),
        group_name: name,
        regime: decompose(group).regime.to_string(),
        strong_conjecture_match: strong,
        weak_conjecture_holds: (group.order() as u64) < n * euler_phi(n),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailurePolicy {
    /// Skip the failing N and keep going.
    #[default]
    Continue,
    AbortAll,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skipped {
    pub n: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ScanOutcome {
    /// Ascending in N.
    pub records: Vec<ScanRecord>,
    pub skipped: Vec<Skipped>,
}

/// Even N in `[from, to]`, with `from` rounded up and `to` rounded down.
pub fn even_range(from: u64, to: u64) -> Result<Vec<u64>, ScanError> {
    let lo = from.max(2).next_multiple_of(2);
    let hi = to - to % 2;
    if from > to || lo > hi {
        return Err(ScanError::Range { from, to });
    }
    Ok((lo..=hi).step_by(2).collect())
}

/// Classifies every even N in the range. `jobs == 0` uses the available
/// parallelism.
pub fn scan_range(from: u64, to: u64, jobs: usize, policy: FailurePolicy) -> Result<ScanOutcome, ScanError> {
    let ns = even_range(from, to)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ScanError::Pool(e.to_string()))?;
    let stop = AtomicBool::new(false);
    let results: Vec<Option<Result<ScanRecord, ScanError>>> = pool.install(|| {
        ns.par_iter()
            .map(|&n| {
                if stop.load(Ordering::Relaxed) {
                    return None;
                }
                let r = classify(n);
                if r.is_err() && policy == FailurePolicy::AbortAll {
                    stop.store(true, Ordering::Relaxed);
                }
                Some(r)
            })
            .collect()
    });
    let mut out = ScanOutcome::default();
    for (&n, r) in ns.iter().zip(results) {
        match r {
            None => {}
            Some(Ok(rec)) => out.records.push(rec),
            Some(Err(e)) if policy == FailurePolicy::AbortAll => {
                return Err(ScanError::Aborted {
                    n,
                    reason: e.to_string(),
                });
            }
            Some(Err(e)) => out.skipped.push(Skipped {
                n,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Jsonl,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown report format {other:?}")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Jsonl => "jsonl",
            Self::Csv => "csv",
        })
    }
}

/// Serializes records; CSV always carries the header row.
pub fn render_report(records: &[ScanRecord], format: ReportFormat) -> Result<Vec<u8>, ScanError> {
    match format {
        ReportFormat::Jsonl => {
            let mut buf = Vec::new();
            for r in records {
                serde_json::to_writer(&mut buf, r)?;
                buf.push(b'\n');
            }
            Ok(buf)
        }
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(SCAN_FIELDS)?;
            for r in records {
                w.serialize(r)?;
            }
            w.into_inner().map_err(|e| ScanError::Csv(e.into_error().into()))
        }
    }
}

pub fn emit_report(records: &[ScanRecord], format: ReportFormat, path: &Path) -> Result<(), ScanError> {
    let bytes = render_report(records, format)?;
    fs::write(path, bytes).map_err(|source| ScanError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Strong-conjecture matches within one residue class of N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassRate {
    pub matches: usize,
    pub applicable: usize,
    pub not_applicable: usize,
}

impl ClassRate {
    pub fn rate(&self) -> f64 {
        if self.applicable == 0 {
            0.0
        } else {
            self.matches as f64 / self.applicable as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConjectureRates {
    pub four_divides: ClassRate,
    pub two_mod_four: ClassRate,
    pub weak_failures: usize,
}

pub fn conjecture_rates(records: &[ScanRecord]) -> ConjectureRates {
    let mut out = ConjectureRates::default();
    for r in records {
        let class = if r.n % 4 == 0 {
            &mut out.four_divides
        } else {
            &mut out.two_mod_four
        };
        match r.strong_conjecture_match {
            StrongMatch::NotApplicable => class.not_applicable += 1,
            StrongMatch::Applicable(m) => {
                class.applicable += 1;
                class.matches += usize::from(m);
            }
        }
        out.weak_failures += usize::from(!r.weak_conjecture_holds);
    }
    out
}

/// One line of the regression suite behind the `verify` subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteCheck {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckResult = Result<(bool, String), Box<dyn std::error::Error + Send + Sync>>;
type NamedCheck = (&'static str, fn() -> CheckResult);

/// Runs the twelve published-value regressions. Failures carry the
/// offending values in `detail`.
pub fn regression_suite() -> Vec<SuiteCheck> {
    let checks: [NamedCheck; 12] = [
        ("sieve values", check_sieve_values),
        ("oracle equivalence", check_oracle),
        ("affine realization", check_affine_realization),
        ("center", check_center),
        ("symmetry groups", check_symmetry_groups),
        ("T_2 law", check_t2_law),
        ("N=128 pipeline", check_pipeline_128),
        ("criteria soundness", check_criteria_soundness),
        ("safe primes", check_safe_primes),
        ("structure regimes", check_regimes),
        ("invariant theory", check_invariant_theory),
        ("conjecture reporting", check_conjecture_reporting),
    ];
    checks
        .into_iter()
        .enumerate()
        .map(|(i, (name, f))| {
            let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            SuiteCheck {
                id: i as u8 + 1,
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn group_for(n: u64) -> Result<SymmetryGroup, ScanError> {
    Ok(compute_symmetry_group(&build_sieve(n)?)?)
}

fn check_sieve_values() -> CheckResult {
    let expected: [(u64, &[u64]); 5] = [
        (2, &[1]),
        (4, &[1, 3]),
        (6, &[1, 3, 5]),
        (8, &[1, 3, 5, 7]),
        (128, &[19, 31, 61, 67, 97, 109]),
    ];
    let mut bad = Vec::new();
    for (n, want) in expected {
        let got = build_sieve(n)?.complement;
        if got != want {
            bad.push(format!("N={n}: got {got:?}, expected {want:?}"));
        }
    }
    Ok(if bad.is_empty() {
        (true, "5 sets match".into())
    } else {
        (false, bad.join("; "))
    })
}

fn check_oracle() -> CheckResult {
    let mut bad = Vec::new();
    for n in (6..=2000).step_by(2) {
        if build_sieve(n)?.complement != goldbach_oracle(n)? {
            bad.push(n);
        }
    }
    let sieve4: BTreeSet<u64> = build_sieve(4)?.complement.into_iter().collect();
    let oracle4: BTreeSet<u64> = goldbach_oracle(4)?.into_iter().collect();
    let diff: Vec<u64> = sieve4.symmetric_difference(&oracle4).copied().collect();
    let exception_ok = diff == [2];
    Ok((
        bad.is_empty() && exception_ok,
        format!("mismatches in 6..=2000: {bad:?}; N=4 difference {diff:?}"),
    ))
}

fn affine_perms(n: u64) -> Result<BTreeSet<Vec<usize>>, ScanError> {
    let all = full_affine_group(n).map_err(SymmetryError::from)?;
    Ok(all
        .iter()
        .map(|f| (0..n).map(|x| f.apply(x) as usize).collect())
        .collect())
}

fn check_affine_realization() -> CheckResult {
    let mut bad = Vec::new();
    for n in [3u64, 4] {
        let action = dihedral_action(n)?;
        let hat: BTreeSet<Vec<usize>> = enumerate_invariant_group(&action)?
            .into_iter()
            .map(|f| f.perm)
            .collect();
        if hat != affine_perms(2 * n)? {
            bad.push(format!("n={n}: invariant group differs"));
        }
    }
    for n in 1..=50u64 {
        let len = full_affine_group(2 * n).map_err(SymmetryError::from)?.len() as u64;
        if len != 2 * n * euler_phi(2 * n) {
            bad.push(format!("|Aff(Z_{})| = {len}", 2 * n));
        }
    }
    Ok(if bad.is_empty() {
        (true, "n=3,4 equal; orders ok for n<=50".into())
    } else {
        (false, bad.join("; "))
    })
}

fn check_center() -> CheckResult {
    let mut bad = Vec::new();
    for n in [3u64, 5, 7] {
        let m = 2 * n;
        let z: BTreeSet<(u64, u64)> = center(&full_affine_group(m).map_err(SymmetryError::from)?)
            .map_err(SymmetryError::from)?
            .iter()
            .map(|f| (f.a, f.b))
            .collect();
        let want: BTreeSet<(u64, u64)> = [(1, 0), (1, n)].into();
        if z != want {
            bad.push(format!("n={n}: {z:?}"));
        }
    }
    Ok(if bad.is_empty() {
        (true, "Z = {id, T_n}".into())
    } else {
        (false, bad.join("; "))
    })
}

fn check_symmetry_groups() -> CheckResult {
    let expected: [(u64, usize, Option<&str>); 6] = [
        (12, 8, Some("Z2^3")),
        (18, 18, None),
        (24, 32, None),
        (30, 8, Some("Z2xZ4")),
        (90, 2, Some("Z2")),
        (120, 4, Some("V")),
    ];
    let mut bad = Vec::new();
    for (n, order, name) in expected {
        let g = group_for(n)?;
        if g.order() != order || name.is_some_and(|s| s != g.descriptor.name) {
            bad.push(format!("N={n}: order {} name {}", g.order(), g.descriptor.name));
        }
    }
    let g18 = group_for(18)?;
    let units18: Vec<u64> = (1..18).filter(|x| x % 2 == 1 && x % 3 != 0).collect();
    if g18.descriptor.is_abelian || g18.unit_part != units18 || g18.g1_generator != Some(6) {
        bad.push(format!(
            "N=18: abelian={} H={:?} g1={:?}",
            g18.descriptor.is_abelian, g18.unit_part, g18.g1_generator
        ));
    }
    Ok(if bad.is_empty() {
        (true, "N=12,18,24,30,90,120 match".into())
    } else {
        (false, bad.join("; "))
    })
}

fn check_t2_law() -> CheckResult {
    let mut bad = Vec::new();
    for n in [2u64, 4, 6, 8] {
        if !group_for(n)?.contains_translation(2) {
            bad.push(format!("T_2 missing at N={n}"));
        }
    }
    for n in (10..=200).step_by(2) {
        if group_for(n)?.contains_translation(2) {
            bad.push(format!("T_2 present at N={n}"));
        }
    }
    Ok(if bad.is_empty() {
        (true, "holds for N<=200".into())
    } else {
        (false, bad.join("; "))
    })
}

fn check_pipeline_128() -> CheckResult {
    let sieve = build_sieve(128)?;
    let window: Vec<u64> = window_set(64, 128)
        .map_err(criteria_boxed)?
        .members
        .into_iter()
        .filter(|&x| sieve.in_complement(x))
        .collect();
    let verdict = exclusion_criterion(&sieve, 32, 1).map_err(criteria_boxed)?;
    let g = compute_symmetry_group(&sieve)?;
    let passed = window == [61] && verdict == Exclusion::Asymmetric && g.g1_generator.is_none();
    Ok((
        passed,
        format!("window {window:?}, verdict {verdict:?}, g1 {:?}", g.g1_generator),
    ))
}

fn criteria_boxed(e: CriteriaError) -> Box<dyn std::error::Error + Send + Sync> {
    Box::new(e)
}

fn check_criteria_soundness() -> CheckResult {
    let mut bad = Vec::new();
    for n in (6..=512).step_by(2) {
        let sieve = build_sieve(n)?;
        let g = compute_symmetry_group(&sieve)?;
        for (d, alpha) in valid_pairs(n) {
            let in_group = g.contains_translation(2 * d * alpha);
            if exclusion_criterion(&sieve, d, alpha)?.excludes() && in_group {
                bad.push(format!("N={n} (d={d}, α={alpha}): excluded but present"));
            }
            if !coverage_identity_check(&sieve, &g, d, alpha)?.agrees() {
                bad.push(format!("N={n} (d={d}, α={alpha}): coverage disagrees"));
            }
            if !window_necessity_holds(&sieve, &g, d, alpha)? {
                bad.push(format!("N={n} (d={d}, α={alpha}): window not symmetric"));
            }
        }
        let lift = unit_lift_check(&g);
        if !lift.holds {
            bad.push(format!("N={n}: unit lift fails at {:?}", lift.counterexample));
        }
    }
    Ok(if bad.is_empty() {
        (true, "sound for 6<=N<=512".into())
    } else {
        (false, bad.join("; "))
    })
}

fn check_safe_primes() -> CheckResult {
    let mut bad = Vec::new();
    for p in [5u64, 7, 11, 23, 47] {
        let name = group_for(2 * p)?.descriptor.name;
        if name != "Z2" || safe_prime_verdict(p) != Some("Z2") {
            bad.push(format!("p={p}: {name}"));
        }
    }
    for p in (5..100).filter(|&p| is_prime(p)) {
        let b = twice_prime_divisor_bound(p)?;
        if !b.divides {
            bad.push(format!("p={p}: |G|={} does not divide {}", b.group_order, b.gcd));
        }
    }
    Ok(if bad.is_empty() {
        (true, "Z2 for safe primes; bound holds for p<100".into())
    } else {
        (false, bad.join("; "))
    })
}

fn check_regimes() -> CheckResult {
    let mut violated = Vec::new();
    for n in (6..=512).step_by(2) {
        if decompose(&group_for(n)?).regime == Regime::Violated {
            violated.push(n);
        }
    }
    Ok((violated.is_empty(), format!("violated at N={violated:?}")))
}

fn theory_failures(action: &FiniteAction, label: &str) -> Result<Vec<String>, GroupError> {
    let mut bad = Vec::new();
    let hat = enumerate_invariant_group(action)?;
    let auts = automorphisms(action.group())?;
    for f in &hat {
        let witnesses = auts.iter().filter(|phi| is_equivariant(action, &f.perm, phi)).count();
        if witnesses == 0 || !is_equivariant(action, &invert_perm(&f.perm), &f.phi.inverse()) {
            bad.push(format!("{label}: witness law fails for {:?}", f.perm));
        }
        for h in &hat {
            if !is_equivariant(action, &compose_perm(&f.perm, &h.perm), &f.phi.compose(&h.phi)) {
                bad.push(format!("{label}: composition witness fails"));
            }
        }
    }
    let data = InducedData::new(action)?;
    for (phi, gammas) in data.auts.iter().zip(&data.gammas) {
        for gamma in gammas {
            let choices = canonical_coset_choices(action, phi, gamma)?;
            let f = crate::group_core::build_phi_invariant(action, phi, &choices)?;
            if !is_equivariant(action, &f.perm, phi) {
                bad.push(format!("{label}: constructed invariant not equivariant"));
            }
        }
    }
    if data.auts.len() * data.identity_gammas().len() != data.all_gammas().len() * data.ker_f().len() {
        bad.push(format!("{label}: quotient cardinality"));
    }
    let inner: BTreeSet<_> = inner_automorphisms(action.group()).into_iter().collect();
    let fixing: BTreeSet<_> = orbit_fixing_automorphisms(action)?.into_iter().collect();
    let ker: BTreeSet<_> = data.ker_f().into_iter().collect();
    if !inner.is_subset(&fixing) || !fixing.is_subset(&ker) {
        bad.push(format!("{label}: inclusion chain"));
    }
    Ok(bad)
}

fn check_invariant_theory() -> CheckResult {
    let mut bad = theory_failures(&dihedral_action(3)?, "D_3")?;
    bad.extend(theory_failures(&dihedral_action(4)?, "D_4")?);
    let r = decomposition_report(&dihedral_action(3)?)?;
    let counts = (
        r.hat_order,
        r.normalizer_quotient_product,
        r.identity_induced_count,
        r.aut_s_order,
    );
    if counts != (12, 1, 2, 6) || !r.product_identity_holds {
        bad.push(format!("D_3 report {counts:?}"));
    }
    Ok(if bad.is_empty() {
        (true, "D_3, D_4 laws hold; 12 = 1*2*6".into())
    } else {
        (false, bad.join("; "))
    })
}

fn check_conjecture_reporting() -> CheckResult {
    let first = scan_range(4, 2000, 0, FailurePolicy::AbortAll)?;
    let second = scan_range(4, 2000, 3, FailurePolicy::AbortAll)?;
    let deterministic =
        render_report(&first.records, ReportFormat::Jsonl)? == render_report(&second.records, ReportFormat::Jsonl)?;
    let complete = first.records.len() == 999 && first.skipped.is_empty();
    let rates = conjecture_rates(&first.records);
    let detail = format!(
        "{} records, deterministic={deterministic}, weak failures {}, strong 4|N {}/{}, 2 mod 4 {}/{}",
        first.records.len(),
        rates.weak_failures,
        rates.four_divides.matches,
        rates.four_divides.applicable,
        rates.two_mod_four.matches,
        rates.two_mod_four.applicable,
    );
    Ok((deterministic && complete && rates.weak_failures == 0, detail))
}
