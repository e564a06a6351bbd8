//! Checks tying the two evaluators together, plus the combinatorial
//! identities relating the path statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dyck::{enumerate_paths, DyckPath, KnotParams};
use crate::error::{KhrError, Result};
use crate::formula::{self, chi};
use crate::laurent::{Invariant, LaurentPoly, MonomialRatio};
use crate::sweep::{self, HhhProfile, IProfile, RuleTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub lhs: i64,
    pub rhs: i64,
}

impl IdentityCheck {
    fn new(lhs: i64, rhs: i64) -> Self {
        Self { lhs, rhs }
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The four counting identities for one path:
///
/// * `i1`: `|i| + |o| = chi`
/// * `i2`: `|o| - hplus = sum_{p in i} (k(p) - 1)`
/// * `i3`: `hplus + sum_{p in i} k(p) = chi`
/// * `i4`: `sum_{inner corners} k = sum_{v*} k`
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathIdentities {
    pub path: DyckPath,
    pub i1: IdentityCheck,
    pub i2: IdentityCheck,
    pub i3: IdentityCheck,
    pub i4: IdentityCheck,
}

impl PathIdentities {
    pub fn holds(&self) -> bool {
        [self.i1, self.i2, self.i3, self.i4].iter().all(IdentityCheck::holds)
    }
}

pub fn path_identities(path: &DyckPath) -> Result<PathIdentities> {
    let chi = chi(path.params()) as i64;
    let interior = path.interior_points();
    let (_, inner) = path.corners();
    let vstar = path.vstar()?;
    let ksum = |pts: &[crate::dyck::Point]| -> Result<i64> {
        pts.iter().map(|p| path.k_of(*p).map(i64::from)).sum()
    };
    let k_interior = ksum(&interior)?;
    let size_i = interior.len() as i64;
    let o = path.opairs() as i64;
    let hplus = path.hplus() as i64;
    Ok(PathIdentities {
        path: path.clone(),
        i1: IdentityCheck::new(size_i + o, chi),
        i2: IdentityCheck::new(o - hplus, k_interior - size_i),
        i3: IdentityCheck::new(hplus + k_interior, chi),
        i4: IdentityCheck::new(ksum(&inner)?, ksum(&vstar)?),
    })
}

pub fn identity_suite(params: KnotParams) -> Result<Vec<PathIdentities>> {
    enumerate_paths(params).iter().map(path_identities).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafDiff {
    pub path: String,
    pub direct: Option<Invariant>,
    pub sweep: Option<Invariant>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub pass: bool,
    pub direct_total: Invariant,
    pub sweep_total: Invariant,
    pub leaves: usize,
    pub mismatches: Vec<LeafDiff>,
}

/// Closed formula against sweep recursion, in total and leaf by leaf.
pub fn cross_check(params: KnotParams) -> Result<CrossCheck> {
    let direct_total = formula::hhh_direct(params)?;
    let eval = sweep::evaluate(params, &HhhProfile)?;

    let mut expected: BTreeMap<DyckPath, Invariant> = BTreeMap::new();
    for path in enumerate_paths(params) {
        let v = Invariant::new(formula::hhh_summand(&path)?, 1);
        expected.insert(path, v);
    }

    let mut mismatches = Vec::new();
    let mut seen = BTreeSet::new();
    for leaf in &eval.leaves {
        let path = match sweep::reconstruct_path(&leaf.record, params) {
            Ok(p) => p,
            Err(e) => {
                mismatches.push(LeafDiff { path: e.to_string(), direct: None, sweep: Some(leaf.value.clone()) });
                continue;
            }
        };
        let direct = expected.get(&path).cloned();
        if direct.as_ref() != Some(&leaf.value) || !seen.insert(path.clone()) {
            mismatches.push(LeafDiff { path: path.to_string(), direct, sweep: Some(leaf.value.clone()) });
        }
    }
    for (path, v) in &expected {
        if !seen.contains(path) {
            mismatches.push(LeafDiff { path: path.to_string(), direct: Some(v.clone()), sweep: None });
        }
    }

    Ok(CrossCheck {
        pass: mismatches.is_empty() && direct_total == eval.total,
        direct_total,
        sweep_total: eval.total,
        leaves: eval.leaves.len(),
        mismatches,
    })
}

/// Sweep state against path statistics: interval counts at branch events
/// are `k(p)`, contraction indices are `k(v)`, leaves biject onto paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoherenceCheck {
    pub pass: bool,
    pub leaves: usize,
    pub expected_leaves: u128,
    pub branch_events: usize,
    pub contract_events: usize,
    pub violations: Vec<String>,
}

pub fn sweep_coherence(params: KnotParams) -> Result<CoherenceCheck> {
    let eval = sweep::evaluate(params, &HhhProfile)?;
    let mut violations = Vec::new();
    let mut paths = BTreeSet::new();
    let (mut branch_events, mut contract_events) = (0, 0);
    for leaf in &eval.leaves {
        let path = match sweep::reconstruct_path(&leaf.record, params) {
            Ok(p) => p,
            Err(e) => {
                violations.push(e.to_string());
                continue;
            }
        };
        for ev in &leaf.record.events {
            let expected = match ev.tag {
                RuleTag::Split | RuleTag::Keep => {
                    branch_events += 1;
                    ev.intervals
                }
                // factor index is the count after removal
                RuleTag::Contract => {
                    contract_events += 1;
                    ev.intervals - 1
                }
                _ => continue,
            };
            let k = path.k_of(ev.point)? as usize;
            if k != expected {
                violations.push(format!(
                    "{path} at {} ({:?}): sweep index {expected}, k = {k}",
                    ev.point, ev.tag
                ));
            }
        }
        if !paths.insert(path.clone()) {
            violations.push(format!("{path} reached by two branches"));
        }
    }
    let expected_leaves = params.rational_catalan();
    if eval.leaves.len() as u128 != expected_leaves {
        violations.push(format!("{} leaves, expected {expected_leaves}", eval.leaves.len()));
    }
    if paths != enumerate_paths(params).into_iter().collect() {
        violations.push("leaf paths differ from the enumerated Dyck paths".to_string());
    }
    Ok(CoherenceCheck {
        pass: violations.is_empty(),
        leaves: eval.leaves.len(),
        expected_leaves,
        branch_events,
        contract_events,
        violations,
    })
}

/// Value at `a = 0, q = t = 1` of `(1 - t) * v`.
pub fn specialize_count(v: &Invariant) -> Result<i64> {
    v.numerator().specialize_count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CatalanCheck {
    pub pass: bool,
    pub expected: u128,
    pub specialized: i64,
}

pub fn catalan_check(params: KnotParams) -> Result<CatalanCheck> {
    let hhh = formula::hhh_direct(params)?;
    let specialized = specialize_count(&hhh)?;
    let expected = params.rational_catalan();
    Ok(CatalanCheck {
        pass: hhh.one_minus_t_pow() == 1 && u128::try_from(specialized).ok() == Some(expected),
        expected,
        specialized,
    })
}

/// Symmetries known from outside this construction; reported as
/// regression checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryResult {
    pub mn_symmetry: bool,
    pub qt_symmetry: bool,
    pub label: &'static str,
}

impl SymmetryResult {
    pub fn pass(&self) -> bool {
        self.mn_symmetry && self.qt_symmetry
    }
}

pub fn symmetry_checks(params: KnotParams) -> Result<SymmetryResult> {
    let p = formula::invariant_p(params)?;
    let transposed = formula::invariant_p(params.transposed())?;
    Ok(SymmetryResult {
        mn_symmetry: p == transposed,
        qt_symmetry: p.numerator().swap_qt() == *p.numerator(),
        label: "external property",
    })
}

/// The unnormalized series from the sweep has only integer powers of q, t.
pub fn parity_check(params: KnotParams) -> Result<bool> {
    Ok(sweep::evaluate(params, &HhhProfile)?.total.is_even_series())
}

/// In the superpolynomial's numerator, the coefficient of `a^{chi + j}` has
/// sign `(-1)^j`.
pub fn sign_structure(params: KnotParams) -> Result<bool> {
    let p = formula::invariant_p(params)?;
    let chi = chi(params) as i64;
    let ok = p.numerator().terms().all(|(e, c)| {
        let j = e.ea - chi;
        j >= 0 && (c > 0) == (j % 2 == 0)
    });
    Ok(ok)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DahaRow {
    pub path: DyckPath,
    pub i_value: Invariant,
    pub hhh_value: Invariant,
    /// `I-leaf / ((1-a)(1-t) HHH-leaf)`, when a signed monomial.
    pub ratio: Option<MonomialRatio>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DahaReport {
    pub rows: Vec<DahaRow>,
    /// Mandatory: every ratio is a signed monomial.
    pub all_monomial: bool,
    /// Informational: whether all leaves share one monomial.
    pub global_monomial: Option<MonomialRatio>,
}

pub fn daha_report(params: KnotParams) -> Result<DahaReport> {
    let hhh = sweep::leaf_table(&sweep::evaluate(params, &HhhProfile)?, params)?;
    let ival = sweep::leaf_table(&sweep::evaluate(params, &IProfile)?, params)?;
    if hhh.len() != ival.len() || hhh.iter().zip(&ival).any(|(h, i)| h.path != i.path) {
        return Err(KhrError::Internal(format!("{params}: profiles disagree on the branch tree")));
    }
    let factor = (&LaurentPoly::one() - &LaurentPoly::a()).try_mul(&LaurentPoly::one_minus_t())?;
    let mut rows = Vec::with_capacity(hhh.len());
    for (h, i) in hhh.into_iter().zip(ival) {
        let target = h.value.try_mul_poly(&factor)?;
        let d = target.one_minus_t_pow().max(i.value.one_minus_t_pow());
        let ratio = i.value.numerator_over(d)?.monomial_ratio(&target.numerator_over(d)?);
        rows.push(DahaRow { path: h.path, i_value: i.value, hhh_value: h.value, ratio });
    }
    let all_monomial = rows.iter().all(|r| r.ratio.is_some());
    let first = rows.first().and_then(|r| r.ratio);
    let global_monomial = first.filter(|f| rows.iter().all(|r| r.ratio == Some(*f)));
    Ok(DahaReport { rows, all_monomial, global_monomial })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Cross,
    Coherence,
    Catalan,
    Parity,
    Signs,
    Symmetry,
    Daha,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Identities,
        Suite::Cross,
        Suite::Coherence,
        Suite::Catalan,
        Suite::Parity,
        Suite::Signs,
        Suite::Symmetry,
        Suite::Daha,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Cross => "cross",
            Suite::Coherence => "coherence",
            Suite::Catalan => "catalan",
            Suite::Parity => "parity",
            Suite::Signs => "signs",
            Suite::Symmetry => "symmetry",
            Suite::Daha => "daha",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = KhrError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| KhrError::Parse(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub suites: BTreeSet<Suite>,
    /// Report symmetry failures as warnings instead of failures.
    pub symmetry_as_warning: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { suites: Suite::ALL.into_iter().collect(), symmetry_as_warning: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub params: KnotParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identities: Option<Vec<PathIdentities>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalan: Option<CatalanCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_structure: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub daha: Option<DahaReport>,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

pub fn verify(params: KnotParams, opts: &VerifyOptions) -> Result<VerificationReport> {
    let on = |s| opts.suites.contains(&s);
    let mut failures = Vec::new();
    let mut warnings = Vec::new();

    let identities = on(Suite::Identities).then(|| identity_suite(params)).transpose()?;
    if let Some(ids) = &identities {
        for r in ids.iter().filter(|r| !r.holds()) {
            failures.push(format!("identities fail on {}", r.path));
        }
    }
    let cross = on(Suite::Cross).then(|| cross_check(params)).transpose()?;
    if cross.as_ref().is_some_and(|c| !c.pass) {
        failures.push("cross-check".to_string());
    }
    let coherence = on(Suite::Coherence).then(|| sweep_coherence(params)).transpose()?;
    if let Some(c) = &coherence {
        failures.extend(c.violations.iter().map(|v| format!("coherence: {v}")));
    }
    let catalan = on(Suite::Catalan).then(|| catalan_check(params)).transpose()?;
    if catalan.is_some_and(|c| !c.pass) {
        failures.push("catalan specialization".to_string());
    }
    let parity = on(Suite::Parity).then(|| parity_check(params)).transpose()?;
    if parity == Some(false) {
        failures.push("parity: sweep output has half-integer powers".to_string());
    }
    let signs = on(Suite::Signs).then(|| sign_structure(params)).transpose()?;
    if signs == Some(false) {
        failures.push("sign structure".to_string());
    }
    let symmetry = on(Suite::Symmetry).then(|| symmetry_checks(params)).transpose()?;
    if let Some(s) = symmetry.filter(|s| !s.pass()) {
        let msg = format!("symmetry ({}): m<->n {}, q<->t {}", s.label, s.mn_symmetry, s.qt_symmetry);
        if opts.symmetry_as_warning {
            warnings.push(msg);
        } else {
            failures.push(msg);
        }
    }
    let daha = on(Suite::Daha).then(|| daha_report(params)).transpose()?;
    if let Some(d) = &daha {
        if !d.all_monomial {
            failures.push("daha: some leaf ratio is not a monomial".to_string());
        }
        if d.global_monomial.is_none() {
            warnings.push("daha: leaf ratios do not share a single monomial".to_string());
        }
    }

    Ok(VerificationReport {
        params,
        identities,
        cross_check: cross,
        coherence,
        catalan,
        parity,
        sign_structure: signs,
        symmetry,
        daha,
        pass: failures.is_empty(),
        failures,
        warnings,
    })
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        writeln!(f, "verify {}", self.params)?;
        if let Some(ids) = &self.identities {
            let bad = ids.iter().filter(|r| !r.holds()).count();
            writeln!(f, "  identities  {:>4}  {} paths, {bad} failing", mark(bad == 0), ids.len())?;
        }
        if let Some(c) = &self.cross_check {
            writeln!(f, "  cross       {:>4}  {} leaves, {} mismatches", mark(c.pass), c.leaves, c.mismatches.len())?;
        }
        if let Some(c) = &self.coherence {
            writeln!(
                f,
                "  coherence   {:>4}  {} branch / {} contract events",
                mark(c.pass),
                c.branch_events,
                c.contract_events
            )?;
        }
        if let Some(c) = &self.catalan {
            writeln!(f, "  catalan     {:>4}  {} (expected {})", mark(c.pass), c.specialized, c.expected)?;
        }
        if let Some(p) = self.parity {
            writeln!(f, "  parity      {:>4}", mark(p))?;
        }
        if let Some(s) = self.sign_structure {
            writeln!(f, "  signs       {:>4}", mark(s))?;
        }
        if let Some(s) = &self.symmetry {
            writeln!(
                f,
                "  symmetry    {:>4}  m<->n {}, q<->t {} [{}]",
                mark(s.pass()),
                s.mn_symmetry,
                s.qt_symmetry,
                s.label
            )?;
        }
        if let Some(d) = &self.daha {
            writeln!(f, "  daha        {:>4}  {} leaves", mark(d.all_monomial), d.rows.len())?;
            for r in &d.rows {
                match &r.ratio {
                    Some(x) => {
                        let mono = LaurentPoly::monomial(x.exponent, x.coeff);
                        writeln!(f, "      {:<24} {mono}", r.path.to_string())?
                    }
                    None => writeln!(f, "      {:<24} (not a monomial)", r.path.to_string())?,
                }
            }
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        write!(f, "  overall     {}", if self.pass { "PASS" } else { "FAIL" })
    }
}
