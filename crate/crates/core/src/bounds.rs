//! Upper bounds on the worst-case expected response length, each tagged with
//! the shared-key size its scheme consumes.
//!
//! Two coupling-based bounds always apply: the binary-alphabet form
//! `H(Q*) + log2(e)/e + 2` and the general form
//! `H(Q*) + (1 + log2 e)/2 + 1 + ceil(log2 |X|)`. When one coordinate of the
//! `(X, message)` joint determines the other, three decomposition bounds
//! sharpen them: the common-information bound `K + 1 + ceil(log2 |X|)`, an
//! LP relaxation of it, and the nullity bound
//! `log2(null(P(X|C)) + 1) + 1 + ceil(log2 |X|)`. Finally, whenever the
//! message alphabet is no larger than the private one, padding the message
//! itself costs just `ceil(log2 |C|)` bits with a key of size `|C|`.
//!
//! Reports never mix key assumptions: the worst case over demands is taken
//! per exact key size, plus one budget-constrained summary line.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::codec::ceil_log2;
use crate::coupling::greedy_qstar;
use crate::linalg;
use crate::prob::JointTable;
use crate::rational::{Ratio, to_f64};
use crate::scenario::Scenario;
use crate::zero_leakage::{
    build_axy_bxy, enumerate_polytope, k_min_entropy, membership_phat, x_given_c_nullity,
};
use crate::{Error, Result};

/// `log2(e) / e`.
pub const LOG2E_OVER_E: f64 = std::f64::consts::LOG2_E / std::f64::consts::E;
/// `(1 + log2 e) / 2`.
pub const GENERAL_GAP: f64 = (1.0 + std::f64::consts::LOG2_E) / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum BoundName {
    ThmBinary,
    ThmGeneral,
    CommonInfoK,
    LpBound,
    NullityBound,
    DirectOtp,
}

/// One evaluated bound for one demand case.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: BoundName,
    /// Bits; absent when the bound does not apply.
    pub bits: Option<f64>,
    pub required_key_size: u64,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl BoundEntry {
    fn applicable(name: BoundName, bits: f64, key: u64) -> Self {
        Self {
            name,
            bits: Some(bits),
            required_key_size: key,
            applicable: true,
            reason: None,
        }
    }

    fn not_applicable(name: BoundName, key: u64, reason: String) -> Self {
        Self {
            name,
            bits: None,
            required_key_size: key,
            applicable: false,
            reason: Some(reason),
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.reason = Some(note);
        self
    }
}

/// Entropy of the greedy coupling mass sequence for the kernel of the
/// message given the positive-mass private symbols.
fn qstar_entropy(joint: &JointTable) -> Result<f64> {
    let (kernel, _) = joint.conditional_of_positive_rows()?;
    Ok(greedy_qstar(&kernel)?.entropy_bits())
}

/// Binary-alphabet coupling bound `H(Q*) + log2(e)/e + 2`; needs `|X| = 2`.
pub fn bound_thm_binary(joint: &JointTable) -> Result<f64> {
    if joint.rows() != 2 {
        return Err(Error::NotApplicable(format!(
            "private alphabet has {} symbols, needs exactly 2",
            joint.rows()
        )));
    }
    Ok(qstar_entropy(joint)? + LOG2E_OVER_E + 2.0)
}

/// General coupling bound `H(Q*) + (1 + log2 e)/2 + 1 + ceil(log2 |X|)`.
pub fn bound_thm_general(joint: &JointTable) -> Result<f64> {
    if joint.rows() < 2 {
        return Err(Error::NotApplicable(
            "private alphabet must have at least 2 symbols".into(),
        ));
    }
    Ok(qstar_entropy(joint)? + GENERAL_GAP + 1.0 + ceil_log2(joint.rows()) as f64)
}

/// Pads the message itself: `ceil(log2 |C|)` bits with a key of size `|C|`;
/// stated for `|C| <= |X|`.
pub fn bound_direct_otp(joint: &JointTable) -> Result<f64> {
    if joint.cols() > joint.rows() {
        return Err(Error::NotApplicable(format!(
            "message alphabet {} exceeds private alphabet {}; the padded-message scheme itself would still work with key size {}",
            joint.cols(),
            joint.rows(),
            joint.cols()
        )));
    }
    Ok(ceil_log2(joint.cols()) as f64)
}

/// Nullity bound `log2(null(P(X|C)) + 1) + 1 + ceil(log2 |X|)`.
pub fn bound_nullity(joint: &JointTable) -> Result<f64> {
    let cert = membership_phat(joint);
    if !cert.is_certified() {
        return Err(Error::NotApplicable(cert.reason().into()));
    }
    let beta = ((x_given_c_nullity(joint)? + 1) as f64).log2();
    Ok(beta + 1.0 + ceil_log2(joint.rows()) as f64)
}

/// Common-information bound `K + 1 + ceil(log2 |X|)` with `K` the minimum
/// weight entropy over the optimal decompositions.
pub fn bound_common_info(joint: &JointTable) -> Result<f64> {
    let cert = membership_phat(joint);
    if !cert.is_certified() {
        return Err(Error::NotApplicable(cert.reason().into()));
    }
    let polytope = enumerate_polytope(joint)?;
    let k = k_min_entropy(&polytope)?;
    Ok(k.entropy_bits + 1.0 + ceil_log2(joint.rows()) as f64)
}

/// LP bound `H(C|X) + max{ sum P(c) a_c } + 1 + ceil(log2 |X|)`, maximizing
/// over `A a = b, a >= 0` with the mass-weighted sum capped at
/// `beta - H(C|X)`.
pub fn bound_lp(joint: &JointTable) -> Result<f64> {
    let cert = membership_phat(joint);
    if !cert.is_certified() {
        return Err(Error::NotApplicable(cert.reason().into()));
    }
    let system = build_axy_bxy(joint)?;
    let h_c_given_x = joint.conditional_entropy_bits();
    let beta = ((x_given_c_nullity(joint)? + 1) as f64).log2();
    let cap = beta - h_c_given_x;
    if cap < -1e-9 {
        return Err(Error::NotApplicable(
            "the mass-weighted cap is negative; the constraint set is empty".into(),
        ));
    }
    let objective = lp_maximize_capped(&system.a, &system.b, &system.c_masses, cap)?;
    Ok(h_c_given_x + objective + 1.0 + ceil_log2(joint.rows()) as f64)
}

/// Maximizes `c . a` over `{A a = b, a >= 0, c . a + s = cap, s >= 0}` by
/// enumerating basic solutions. Basis selection and invertibility are
/// decided on the exact rational constraint matrix; the right-hand side
/// carries entropy differences and is applied in floating point.
fn lp_maximize_capped(
    a: &[Vec<Ratio>],
    b: &[f64],
    c: &[Ratio],
    cap: f64,
) -> Result<f64> {
    let t = a.len();
    if t == 0 || t != b.len() {
        return Err(Error::DimensionMismatch("empty constraint system".into()));
    }
    let q = c.len();
    let vars = q + 1; // message coordinates plus the cap slack
    // rational constraint matrix: equality rows then the capped row
    let mut matrix: Vec<Vec<Ratio>> = Vec::with_capacity(t + 1);
    for row in a {
        let mut r = row.clone();
        r.push(Ratio::from_integer(0.into()));
        matrix.push(r);
    }
    let mut cap_row: Vec<Ratio> = c.to_vec();
    cap_row.push(Ratio::from_integer(1.into()));
    matrix.push(cap_row);
    let mut rhs: Vec<f64> = b.to_vec();
    rhs.push(cap);

    let rank = linalg::rank(&matrix);
    let candidates = num_integer::binomial(vars as u64, rank as u64);
    if candidates > crate::zero_leakage::MAX_BASES {
        return Err(Error::SizeLimit(format!(
            "{candidates} candidate bases exceed the enumeration guard"
        )));
    }
    let c_f64: Vec<f64> = c.iter().map(to_f64).collect();
    let mut best: Option<f64> = None;
    let rows = matrix.len();
    linalg::for_each_subset(vars, rank, |subset| {
        let sub: Vec<Vec<Ratio>> = (0..rows)
            .map(|i| subset.iter().map(|&j| matrix[i][j].clone()).collect())
            .collect();
        let pivot_rows = linalg::independent_rows(&sub);
        if pivot_rows.len() != rank {
            return; // dependent columns
        }
        let square: Vec<Vec<Ratio>> = pivot_rows
            .iter()
            .map(|&i| sub[i].clone())
            .collect();
        let Some(inverse) = linalg::invert(&square) else {
            return;
        };
        let rhs_rows: Vec<f64> = pivot_rows.iter().map(|&i| rhs[i]).collect();
        let solution: Vec<f64> = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| to_f64(&inverse[i][j]) * rhs_rows[j])
                    .sum()
            })
            .collect();
        // remaining rows must be consistent
        for i in 0..rows {
            if pivot_rows.contains(&i) {
                continue;
            }
            let lhs: f64 = (0..rank)
                .map(|j| to_f64(&sub[i][j]) * solution[j])
                .sum();
            if (lhs - rhs[i]).abs() > 1e-9 {
                return;
            }
        }
        if solution.iter().any(|&v| v < -1e-9) {
            return;
        }
        let objective: f64 = subset
            .iter()
            .zip(&solution)
            .filter(|&(&j, _)| j < q)
            .map(|(&j, v)| c_f64[j] * v)
            .sum();
        if best.is_none_or(|b| objective > b) {
            best = Some(objective);
        }
    });
    best.ok_or_else(|| Error::NotApplicable("the constraint set has no feasible point".into()))
}

/// All bounds for one `(X, message)` joint.
pub fn all_bounds(joint: &JointTable) -> Vec<BoundEntry> {
    let t = joint.rows() as u64;
    let entry = |name: BoundName, key: u64, result: Result<f64>| match result {
        Ok(bits) => BoundEntry::applicable(name, bits, key),
        Err(e) => BoundEntry::not_applicable(name, key, e.to_string()),
    };
    let common_info = match (membership_phat(joint).is_certified(), joint.cols()) {
        (true, _) => match enumerate_polytope(joint).and_then(|p| k_min_entropy(&p)) {
            Ok(k) => {
                let bits = k.entropy_bits + 1.0 + ceil_log2(joint.rows()) as f64;
                let e = BoundEntry::applicable(BoundName::CommonInfoK, bits, t);
                if k.exact {
                    e
                } else {
                    e.with_note("best-effort upper bound: enumeration guard reached".into())
                }
            }
            Err(e) => BoundEntry::not_applicable(BoundName::CommonInfoK, t, e.to_string()),
        },
        (false, _) => BoundEntry::not_applicable(
            BoundName::CommonInfoK,
            t,
            membership_phat(joint).reason().into(),
        ),
    };
    vec![
        entry(BoundName::ThmBinary, 2, bound_thm_binary(joint)),
        entry(BoundName::ThmGeneral, t, bound_thm_general(joint)),
        common_info,
        entry(BoundName::LpBound, t, bound_lp(joint)),
        entry(BoundName::NullityBound, t, bound_nullity(joint)),
        entry(
            BoundName::DirectOtp,
            joint.cols() as u64,
            bound_direct_otp(joint),
        ),
    ]
}

/// The evaluated bounds for one demand case.
#[derive(Debug, Clone, Serialize)]
pub struct DemandBounds {
    pub demand: String,
    pub entries: Vec<BoundEntry>,
    /// Minimum over applicable entries whose key fits the budget.
    pub best_within_budget: Option<f64>,
}

/// Bounds across every demand case of a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub key_budget: u64,
    pub per_demand: Vec<DemandBounds>,
    /// Worst case over demands of the best bound at each exact key size;
    /// absent when some demand has no applicable entry at that size.
    pub worst_case_by_key: BTreeMap<u64, Option<f64>>,
    /// Worst case over demands of the budget-constrained best bound.
    pub worst_case_within_budget: Option<f64>,
}

/// Bounds for one demand case, with the budget-constrained best attached.
pub fn bounds_for_case(joint: &JointTable, demand_label: String, key_budget: u64) -> DemandBounds {
    let entries = all_bounds(joint);
    let best_within_budget = entries
        .iter()
        .filter(|e| e.applicable && e.required_key_size <= key_budget)
        .filter_map(|e| e.bits)
        .min_by(f64::total_cmp);
    DemandBounds {
        demand: demand_label,
        entries,
        best_within_budget,
    }
}

/// Folds per-demand bounds into the worst-case views.
pub fn assemble_report(key_budget: u64, per_demand: Vec<DemandBounds>) -> BoundReport {
    let mut key_sizes = std::collections::BTreeSet::new();
    for d in &per_demand {
        for e in &d.entries {
            if e.applicable {
                key_sizes.insert(e.required_key_size);
            }
        }
    }
    let mut worst_case_by_key = BTreeMap::new();
    for &key in &key_sizes {
        let mut worst: Option<f64> = Some(f64::NEG_INFINITY);
        for d in &per_demand {
            let best = d
                .entries
                .iter()
                .filter(|e| e.applicable && e.required_key_size == key)
                .filter_map(|e| e.bits)
                .min_by(f64::total_cmp);
            match (best, &mut worst) {
                (Some(b), Some(w)) => *w = w.max(b),
                _ => worst = None,
            }
            if worst.is_none() {
                break;
            }
        }
        worst_case_by_key.insert(key, worst);
    }
    let worst_case_within_budget = per_demand
        .iter()
        .map(|d| d.best_within_budget)
        .try_fold(f64::NEG_INFINITY, |acc, b| b.map(|b| acc.max(b)));
    BoundReport {
        key_budget,
        per_demand,
        worst_case_by_key,
        worst_case_within_budget,
    }
}

/// Evaluates every bound for every demand case of the scenario.
pub fn evaluate_all(scenario: &Scenario, key_budget: u64) -> Result<BoundReport> {
    let mut per_demand = Vec::new();
    for case in scenario.demand_cases() {
        let joint = scenario.joint_for(case.as_ref())?;
        per_demand.push(bounds_for_case(
            &joint,
            Scenario::demand_label(case.as_ref()),
            key_budget,
        ));
    }
    Ok(assemble_report(key_budget, per_demand))
}
