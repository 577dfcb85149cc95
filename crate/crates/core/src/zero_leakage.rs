//! Perfect-privacy decompositions and the common-information machinery.
//!
//! For a joint of `(X, C)` the feasible columns are the distributions `p`
//! over the support of `C` with `P(X | C) p = P_X`: conditioning the message
//! on such a column reveals nothing about `X`. The feasible set is a
//! polytope; its vertices are enumerated exactly as the basic feasible
//! solutions of the equality system. Decomposing `P_C` into a mixture of
//! feasible columns yields a variable `U` with `I(U; X) = 0`; among the
//! mixtures maximizing `I(C; U)` we search for the one of minimum weight
//! entropy.
//!
//! Certification is deliberately conservative: the decomposition bounds are
//! only marked applicable when one coordinate determines the other on the
//! support, the two cases where the maximum over Markov mixtures is known to
//! equal the unconstrained one.

use num_integer::binomial;
use num_traits::{One, Zero};

use crate::linalg;
use crate::prob::{FiniteDistribution, JointTable};
use crate::rational::{Ratio, to_f64};
use crate::{Error, Result};

/// Guard on the support size of `C` for vertex enumeration.
pub const MAX_POLYTOPE_DIM: usize = 16;
/// Guard on the number of candidate bases in any exact enumeration.
pub const MAX_BASES: u64 = 1_000_000;

/// How membership in the equal-optima family was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhatCertificate {
    /// `X` is a deterministic function of `C` on the support.
    XDeterminedByC,
    /// `C` is a deterministic function of `X` on the support.
    CDeterminedByX,
    /// Neither sufficient condition holds; membership is unknown and the
    /// decomposition bounds are not certified.
    Unknown,
}

impl PhatCertificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self, Self::Unknown)
    }

    pub fn reason(&self) -> &'static str {
        match self {
            Self::XDeterminedByC => "X is a function of the message on the support",
            Self::CDeterminedByX => "the message is a function of X on the support",
            Self::Unknown => "neither variable determines the other; membership unknown",
        }
    }
}

/// Checks the two sufficient conditions exactly.
pub fn membership_phat(joint: &JointTable) -> PhatCertificate {
    let x_determined = (0..joint.cols()).all(|c| {
        (0..joint.rows())
            .filter(|&x| !joint.mass_at(x, c).is_zero())
            .count()
            <= 1
    });
    if x_determined {
        return PhatCertificate::XDeterminedByC;
    }
    let c_determined = (0..joint.rows()).all(|x| {
        (0..joint.cols())
            .filter(|&c| !joint.mass_at(x, c).is_zero())
            .count()
            <= 1
    });
    if c_determined {
        return PhatCertificate::CDeterminedByX;
    }
    PhatCertificate::Unknown
}

/// The feasible-column polytope over the support of `C`.
#[derive(Debug, Clone)]
pub struct PrivacyPolytope {
    /// Original column indices with positive mass; the polytope lives on
    /// these coordinates.
    pub support: Vec<usize>,
    /// All vertices, each a distribution over the support coordinates.
    pub vertices: Vec<FiniteDistribution>,
    /// `P(C)` restricted to the support.
    pub c_marginal: FiniteDistribution,
    /// `P(X | C)` columns on the support, row-indexed by `x`.
    pub x_given_c: Vec<FiniteDistribution>,
}

/// Enumerates every vertex of `{p >= 0 : P(X|C) p = P_X, sum p = 1}`
/// exactly: all rank-sized column subsets with a unique nonnegative solve,
/// deduplicated.
pub fn enumerate_polytope(joint: &JointTable) -> Result<PrivacyPolytope> {
    let (x_given_c, support) = joint.conditional_of_rows_given_positive_cols()?;
    let q = support.len();
    if q > MAX_POLYTOPE_DIM {
        return Err(Error::SizeLimit(format!(
            "message support of {q} exceeds the enumeration guard of {MAX_POLYTOPE_DIM}"
        )));
    }
    let x_marginal = joint.row_marginal();
    let t = joint.rows();
    // equality system: t rows of P(X|C), one normalization row
    let mut a: Vec<Vec<Ratio>> = (0..t)
        .map(|x| (0..q).map(|c| x_given_c[c].mass(x).clone()).collect())
        .collect();
    a.push(vec![Ratio::one(); q]);
    let mut b: Vec<Ratio> = (0..t).map(|x| x_marginal.mass(x).clone()).collect();
    b.push(Ratio::one());
    let solutions = linalg::basic_feasible_solutions(&a, &b, MAX_BASES)?;
    let vertices = solutions
        .into_iter()
        .map(FiniteDistribution::new)
        .collect::<Result<Vec<_>>>()?;
    let (c_marginal, _) = joint.col_marginal().prune_zeros();
    Ok(PrivacyPolytope {
        support,
        vertices,
        c_marginal,
        x_given_c,
    })
}

/// A mixture of feasible columns reproducing `P(C)` on the support.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub weights: Vec<Ratio>,
    pub columns: Vec<FiniteDistribution>,
}

impl Decomposition {
    /// Exact check that the weighted columns mix back to the marginal.
    pub fn mixes_to(&self, c_marginal: &FiniteDistribution) -> bool {
        if self.weights.len() != self.columns.len() {
            return false;
        }
        let total: Ratio = self.weights.iter().sum();
        if !total.is_one() {
            return false;
        }
        (0..c_marginal.len()).all(|c| {
            let mixed: Ratio = self
                .weights
                .iter()
                .zip(&self.columns)
                .map(|(w, col)| w * col.mass(c))
                .sum();
            &mixed == c_marginal.mass(c)
        })
    }

    pub fn weight_entropy_bits(&self) -> f64 {
        FiniteDistribution::new(self.weights.clone())
            .map(|d| d.entropy_bits())
            .unwrap_or(f64::NAN)
    }
}

fn weight_system(polytope: &PrivacyPolytope) -> (Vec<Vec<Ratio>>, Vec<Ratio>) {
    let q = polytope.c_marginal.len();
    let n = polytope.vertices.len();
    let a: Vec<Vec<Ratio>> = (0..q)
        .map(|c| (0..n).map(|v| polytope.vertices[v].mass(c).clone()).collect())
        .collect();
    let b: Vec<Ratio> = (0..q).map(|c| polytope.c_marginal.mass(c).clone()).collect();
    (a, b)
}

fn decomposition_from_weights(polytope: &PrivacyPolytope, weights: &[Ratio]) -> Decomposition {
    let mut w = Vec::new();
    let mut columns = Vec::new();
    for (v, weight) in weights.iter().enumerate() {
        if !weight.is_zero() {
            w.push(weight.clone());
            columns.push(polytope.vertices[v].clone());
        }
    }
    Decomposition {
        weights: w,
        columns,
    }
}

/// Maximizes `I(C; U) = H(C) - sum_u w_u H(column_u)` over vertex-supported
/// mixtures. The objective is linear in the weights, so the optimum sits at
/// a basic feasible solution of the mixing system; all of them are
/// enumerated exactly and compared in floating point.
pub fn solve_g0(polytope: &PrivacyPolytope) -> Result<(f64, Decomposition)> {
    if polytope.vertices.is_empty() {
        return Err(Error::NotApplicable(
            "the feasible-column polytope is empty".into(),
        ));
    }
    let (a, b) = weight_system(polytope);
    let solutions = linalg::basic_feasible_solutions(&a, &b, MAX_BASES)?;
    if solutions.is_empty() {
        return Err(Error::NotApplicable(
            "the marginal does not decompose over the polytope vertices".into(),
        ));
    }
    let h_c = polytope.c_marginal.entropy_bits();
    let vertex_entropy: Vec<f64> = polytope
        .vertices
        .iter()
        .map(FiniteDistribution::entropy_bits)
        .collect();
    let mut best: Option<(f64, Vec<Ratio>)> = None;
    for w in solutions {
        let mix_entropy: f64 = w
            .iter()
            .zip(&vertex_entropy)
            .map(|(wi, h)| to_f64(wi) * h)
            .sum();
        let objective = h_c - mix_entropy;
        if best.as_ref().is_none_or(|(b, _)| objective > *b) {
            best = Some((objective, w));
        }
    }
    let (value, weights) = best.expect("at least one feasible mixture");
    Ok((value, decomposition_from_weights(polytope, &weights)))
}

/// Minimum weight entropy over the mixtures achieving the [`solve_g0`]
/// optimum.
#[derive(Debug, Clone)]
pub struct MinEntropyOptimizer {
    pub entropy_bits: f64,
    pub decomposition: Decomposition,
    /// True when the exact enumeration completed within the guards, so the
    /// value is the true minimum over vertex-supported optimizers rather
    /// than a best-effort upper bound.
    pub exact: bool,
}

/// Searches the optimal face for the decomposition of minimum weight
/// entropy. Weight entropy is concave, so the minimum over the face is
/// attained at one of its basic feasible solutions; those are exactly the
/// enumerated mixtures whose objective matches the optimum.
pub fn k_min_entropy(polytope: &PrivacyPolytope) -> Result<MinEntropyOptimizer> {
    let (optimum, fallback) = solve_g0(polytope)?;
    let (a, b) = weight_system(polytope);
    let solutions = linalg::basic_feasible_solutions(&a, &b, MAX_BASES)?;
    let h_c = polytope.c_marginal.entropy_bits();
    let vertex_entropy: Vec<f64> = polytope
        .vertices
        .iter()
        .map(FiniteDistribution::entropy_bits)
        .collect();
    let mut best: Option<(f64, Vec<Ratio>)> = None;
    for w in solutions {
        let mix_entropy: f64 = w
            .iter()
            .zip(&vertex_entropy)
            .map(|(wi, h)| to_f64(wi) * h)
            .sum();
        if (h_c - mix_entropy - optimum).abs() > 1e-9 {
            continue; // not on the optimal face
        }
        let weight_entropy = FiniteDistribution::new(
            w.iter().filter(|wi| !wi.is_zero()).cloned().collect(),
        )?
        .entropy_bits();
        if best.as_ref().is_none_or(|(e, _)| weight_entropy < *e) {
            best = Some((weight_entropy, w));
        }
    }
    match best {
        Some((entropy_bits, weights)) => Ok(MinEntropyOptimizer {
            entropy_bits,
            decomposition: decomposition_from_weights(polytope, &weights),
            exact: true,
        }),
        None => Ok(MinEntropyOptimizer {
            entropy_bits: fallback.weight_entropy_bits(),
            decomposition: fallback,
            exact: false,
        }),
    }
}

/// Exact verdicts on the three optimizer identities for a decomposition,
/// evaluated on the joint it induces with `U` generated from `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizerReport {
    /// `C` is determined by `(U, X)`.
    pub message_determined: bool,
    /// `U` and `X` are independent given `C`.
    pub conditionally_independent: bool,
    /// `U` and `X` are independent.
    pub independent: bool,
}

impl OptimizerReport {
    pub fn all_hold(&self) -> bool {
        self.message_determined && self.conditionally_independent && self.independent
    }
}

/// Builds the exact joint `P(u, c, x) = w_u col_u(c) P(x | c)` on the
/// support and checks the three identities.
pub fn verify_optimizer(joint: &JointTable, decomposition: &Decomposition) -> Result<OptimizerReport> {
    let (x_given_c, support) = joint.conditional_of_rows_given_positive_cols()?;
    let q = support.len();
    let t = joint.rows();
    let n = decomposition.weights.len();
    if decomposition.columns.iter().any(|c| c.len() != q) {
        return Err(Error::DimensionMismatch(
            "decomposition columns do not match the message support".into(),
        ));
    }
    // mass[u][c][x]
    let cell = |u: usize, c: usize, x: usize| -> Ratio {
        &decomposition.weights[u] * decomposition.columns[u].mass(c) * x_given_c[c].mass(x)
    };
    let p_uc = |u: usize, c: usize| -> Ratio {
        &decomposition.weights[u] * decomposition.columns[u].mass(c)
    };
    let p_c = |c: usize| -> Ratio { (0..n).map(|u| p_uc(u, c)).sum() };
    let p_xc = |x: usize, c: usize| -> Ratio { p_c(c) * x_given_c[c].mass(x) };
    let p_ux = |u: usize, x: usize| -> Ratio { (0..q).map(|c| cell(u, c, x)).sum() };
    let p_x = |x: usize| -> Ratio { (0..q).map(|c| p_xc(x, c)).sum() };

    // C determined by (U, X): for each (u, x) of positive mass, a single c
    let mut message_determined = true;
    for u in 0..n {
        for x in 0..t {
            let support_size = (0..q).filter(|&c| !cell(u, c, x).is_zero()).count();
            if support_size > 1 {
                message_determined = false;
            }
        }
    }
    // U independent of X given C: P(u,c,x) P(c) = P(u,c) P(x,c)
    let mut conditionally_independent = true;
    for u in 0..n {
        for c in 0..q {
            for x in 0..t {
                if &cell(u, c, x) * p_c(c) != p_uc(u, c) * p_xc(x, c) {
                    conditionally_independent = false;
                }
            }
        }
    }
    // U independent of X: P(u,x) = P(u) P(x)
    let mut independent = true;
    for u in 0..n {
        let p_u: Ratio = (0..q).map(|c| p_uc(u, c)).sum();
        for x in 0..t {
            if p_ux(u, x) != &p_u * p_x(x) {
                independent = false;
            }
        }
    }
    Ok(OptimizerReport {
        message_determined,
        conditionally_independent,
        independent,
    })
}

/// The linear system feeding the decomposition-free length bound: row `x` of
/// `a` holds `P(c) - P(c | x)` over the support, `b[x] = H(C | x) - H(C | X)`
/// (evaluated in floating point from the exact masses), and `c_masses` holds
/// `P(c)` for the objective.
#[derive(Debug, Clone)]
pub struct AxyBxy {
    pub a: Vec<Vec<Ratio>>,
    pub b: Vec<f64>,
    pub c_masses: Vec<Ratio>,
    pub support: Vec<usize>,
}

pub fn build_axy_bxy(joint: &JointTable) -> Result<AxyBxy> {
    let (kernel, kept_rows) = joint.conditional_of_positive_rows()?;
    if kept_rows.len() != joint.rows() {
        return Err(Error::ZeroMassCondition(
            (0..joint.rows()).find(|&x| !kept_rows.contains(&x)).unwrap_or(0),
        ));
    }
    let (_, support) = joint.conditional_of_rows_given_positive_cols()?;
    let c_marginal = joint.col_marginal();
    let x_marginal = joint.row_marginal();
    let t = joint.rows();
    let mut a = Vec::with_capacity(t);
    let mut b = Vec::with_capacity(t);
    let h_c_given_x: f64 = (0..t)
        .map(|x| to_f64(x_marginal.mass(x)) * kernel.column(x).entropy_bits())
        .sum();
    for x in 0..t {
        let row: Vec<Ratio> = support
            .iter()
            .map(|&c| c_marginal.mass(c) - kernel.column(x).mass(c))
            .collect();
        a.push(row);
        b.push(kernel.column(x).entropy_bits() - h_c_given_x);
    }
    let c_masses = support.iter().map(|&c| c_marginal.mass(c).clone()).collect();
    Ok(AxyBxy {
        a,
        b,
        c_masses,
        support,
    })
}

/// Nullity of the `P(X | C)` support matrix: support size minus exact rank.
pub fn x_given_c_nullity(joint: &JointTable) -> Result<usize> {
    let (x_given_c, support) = joint.conditional_of_rows_given_positive_cols()?;
    let t = joint.rows();
    let matrix: Vec<Vec<Ratio>> = (0..t)
        .map(|x| (0..support.len()).map(|c| x_given_c[c].mass(x).clone()).collect())
        .collect();
    Ok(support.len() - linalg::rank(&matrix))
}

/// Number of vertex-basis candidates, used by callers to anticipate the
/// enumeration guard.
pub fn candidate_bases(columns: usize, system_rank: usize) -> u64 {
    binomial(columns as u64, system_rank as u64)
}
