//! Exact discrete probability: distributions, two-coordinate joint tables,
//! conditional kernels, entropy functionals, and majorization utilities.
//!
//! All masses are arbitrary-precision rationals and every constructor checks
//! that they sum to exactly 1. Entropies and mutual informations are
//! evaluated in double precision *from* the exact masses; independence and
//! majorization claims are decided exactly, never through floats.
//!
//! Zero-probability symbols are kept in alphabets, so cardinalities seen by
//! the bound calculators match the declared model; [`FiniteDistribution::prune_zeros`]
//! drops them explicitly when support-level objects are needed.

use num_traits::{One, Zero};

use crate::rational::{Ratio, to_f64};
use crate::{Error, Result};

/// A single exact probability mass in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Probability(Ratio);

impl Probability {
    pub fn new(value: Ratio) -> Result<Self> {
        if value < Ratio::zero() || value > Ratio::one() {
            return Err(Error::InvalidProbability(value.to_string()));
        }
        Ok(Self(value))
    }

    pub fn zero() -> Self {
        Self(Ratio::zero())
    }

    pub fn one() -> Self {
        Self(Ratio::one())
    }

    pub fn ratio(&self) -> &Ratio {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// A distribution over the alphabet `{0, .., n-1}` with exact masses summing
/// to 1. Zero masses are legal and preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDistribution {
    masses: Vec<Probability>,
}

impl FiniteDistribution {
    pub fn new(masses: Vec<Ratio>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::DimensionMismatch("empty distribution".into()));
        }
        let sum: Ratio = masses.iter().sum();
        if !sum.is_one() {
            return Err(Error::MassSum {
                got: sum.to_string(),
            });
        }
        let masses = masses
            .into_iter()
            .map(Probability::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { masses })
    }

    /// Normalized integer weights, handy in tests and generators.
    pub fn from_weights(weights: &[u64]) -> Result<Self> {
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(Error::InvalidParameter("all weights zero".into()));
        }
        Self::new(
            weights
                .iter()
                .map(|&w| Ratio::new(w.into(), total.into()))
                .collect(),
        )
    }

    pub fn point_mass(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(Error::DimensionMismatch(format!(
                "point mass at {at} outside alphabet of size {len}"
            )));
        }
        let mut masses = vec![Ratio::zero(); len];
        masses[at] = Ratio::one();
        Self::new(masses)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, i: usize) -> &Ratio {
        self.masses[i].ratio()
    }

    pub fn masses(&self) -> impl Iterator<Item = &Ratio> {
        self.masses.iter().map(Probability::ratio)
    }

    pub fn to_ratios(&self) -> Vec<Ratio> {
        self.masses().cloned().collect()
    }

    pub fn support_size(&self) -> usize {
        self.masses.iter().filter(|p| !p.is_zero()).count()
    }

    /// Drops zero-mass symbols; returns the pruned distribution and the
    /// original index of each kept symbol.
    pub fn prune_zeros(&self) -> (FiniteDistribution, Vec<usize>) {
        let mut kept = Vec::new();
        let mut masses = Vec::new();
        for (i, p) in self.masses.iter().enumerate() {
            if !p.is_zero() {
                kept.push(i);
                masses.push(p.ratio().clone());
            }
        }
        (
            FiniteDistribution::new(masses).expect("pruning preserves the total mass"),
            kept,
        )
    }

    /// Masses in non-increasing order; ties keep their original index order,
    /// so the result is deterministic.
    pub fn sorted_descending(&self) -> FiniteDistribution {
        let mut indexed: Vec<(usize, &Probability)> = self.masses.iter().enumerate().collect();
        indexed.sort_by(|(ia, pa), (ib, pb)| pb.cmp(pa).then(ia.cmp(ib)));
        FiniteDistribution::new(indexed.into_iter().map(|(_, p)| p.ratio().clone()).collect())
            .expect("permutation preserves the total mass")
    }

    /// Partial sums of the descending rearrangement.
    pub fn cumulative_descending(&self) -> Vec<Ratio> {
        let sorted = self.sorted_descending();
        let mut acc = Ratio::zero();
        sorted
            .masses()
            .map(|m| {
                acc += m;
                acc.clone()
            })
            .collect()
    }

    /// Shannon entropy in bits, with `0 log 0 = 0`.
    pub fn entropy_bits(&self) -> f64 {
        self.masses()
            .map(|m| {
                if m.is_zero() {
                    0.0
                } else {
                    let p = to_f64(m);
                    -p * p.log2()
                }
            })
            .sum()
    }
}

/// `lower ≺ upper`: every partial sum of the descending rearrangement of
/// `lower` is at most the corresponding one of `upper` (exact comparison;
/// shorter vectors are padded with zeros).
pub fn majorized_by(lower: &FiniteDistribution, upper: &FiniteDistribution) -> bool {
    let a = lower.cumulative_descending();
    let b = upper.cumulative_descending();
    let len = a.len().max(b.len());
    let one = Ratio::one();
    (0..len).all(|k| {
        let sa = a.get(k).unwrap_or(&one);
        let sb = b.get(k).unwrap_or(&one);
        sa <= sb
    })
}

/// Greatest lower bound of a family of distributions in the majorization
/// order: partial sums are the pointwise minima of the inputs' descending
/// partial sums. The inputs are padded to a common length.
pub fn majorization_glb(ds: &[FiniteDistribution]) -> Result<FiniteDistribution> {
    if ds.is_empty() {
        return Err(Error::DimensionMismatch(
            "majorization glb of an empty family".into(),
        ));
    }
    let len = ds.iter().map(FiniteDistribution::len).max().unwrap();
    let cumulatives: Vec<Vec<Ratio>> = ds.iter().map(|d| d.cumulative_descending()).collect();
    let one = Ratio::one();
    let mut masses = Vec::with_capacity(len);
    let mut prev = Ratio::zero();
    for k in 0..len {
        let min_k = cumulatives
            .iter()
            .map(|c| c.get(k).unwrap_or(&one))
            .min()
            .unwrap()
            .clone();
        masses.push(&min_k - &prev);
        prev = min_k;
    }
    FiniteDistribution::new(masses)
}

/// A family of conditional distributions sharing one outcome alphabet:
/// `column(x)` is the distribution of the outcome given conditioning symbol
/// `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalKernel {
    outcome_count: usize,
    columns: Vec<FiniteDistribution>,
}

impl ConditionalKernel {
    pub fn new(columns: Vec<FiniteDistribution>) -> Result<Self> {
        let outcome_count = match columns.first() {
            Some(c) => c.len(),
            None => {
                return Err(Error::DimensionMismatch("kernel with no columns".into()));
            }
        };
        if columns.iter().any(|c| c.len() != outcome_count) {
            return Err(Error::DimensionMismatch(
                "kernel columns of unequal length".into(),
            ));
        }
        Ok(Self {
            outcome_count,
            columns,
        })
    }

    pub fn num_conditions(&self) -> usize {
        self.columns.len()
    }

    pub fn num_outcomes(&self) -> usize {
        self.outcome_count
    }

    pub fn column(&self, x: usize) -> &FiniteDistribution {
        &self.columns[x]
    }

    pub fn columns(&self) -> &[FiniteDistribution] {
        &self.columns
    }
}

/// A two-coordinate joint distribution stored densely, rows first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    rows: usize,
    cols: usize,
    mass: Vec<Ratio>,
}

impl JointTable {
    pub fn new(rows: usize, cols: usize, mass: Vec<Ratio>) -> Result<Self> {
        if rows == 0 || cols == 0 || mass.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "joint table {rows}x{cols} with {} entries",
                mass.len()
            )));
        }
        let sum: Ratio = mass.iter().sum();
        if !sum.is_one() {
            return Err(Error::MassSum {
                got: sum.to_string(),
            });
        }
        if mass.iter().any(|m| m < &Ratio::zero()) {
            return Err(Error::InvalidProbability("negative joint mass".into()));
        }
        Ok(Self { rows, cols, mass })
    }

    /// Accumulates sparse `(row, col, mass)` entries into a dense table.
    pub fn from_entries(rows: usize, cols: usize, entries: &[(usize, usize, Ratio)]) -> Result<Self> {
        let mut mass = vec![Ratio::zero(); rows * cols];
        for (r, c, m) in entries {
            if *r >= rows || *c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside {rows}x{cols} table"
                )));
            }
            mass[r * cols + c] += m;
        }
        Self::new(rows, cols, mass)
    }

    /// Builds the joint from `P(col | row)` columns and a row marginal.
    pub fn from_kernel_rows(kernel: &ConditionalKernel, row_marginal: &FiniteDistribution) -> Result<Self> {
        if kernel.num_conditions() != row_marginal.len() {
            return Err(Error::DimensionMismatch(
                "kernel conditions do not match marginal length".into(),
            ));
        }
        let rows = row_marginal.len();
        let cols = kernel.num_outcomes();
        let mut mass = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let pr = row_marginal.mass(r);
            for c in 0..cols {
                mass.push(pr * kernel.column(r).mass(c));
            }
        }
        Self::new(rows, cols, mass)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mass_at(&self, r: usize, c: usize) -> &Ratio {
        &self.mass[r * self.cols + c]
    }

    pub fn row_marginal(&self) -> FiniteDistribution {
        let masses = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.mass_at(r, c)).sum())
            .collect();
        FiniteDistribution::new(masses).expect("marginalization preserves the total mass")
    }

    pub fn col_marginal(&self) -> FiniteDistribution {
        let masses = (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.mass_at(r, c)).sum())
            .collect();
        FiniteDistribution::new(masses).expect("marginalization preserves the total mass")
    }

    /// Joint Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.mass
            .iter()
            .map(|m| {
                if m.is_zero() {
                    0.0
                } else {
                    let p = to_f64(m);
                    -p * p.log2()
                }
            })
            .sum()
    }

    /// `I(row; col) = H(row) + H(col) - H(row, col)` in bits.
    pub fn mutual_information_bits(&self) -> f64 {
        self.row_marginal().entropy_bits() + self.col_marginal().entropy_bits()
            - self.entropy_bits()
    }

    /// Exact factorization test: the mutual information is zero if and only
    /// if this returns true.
    pub fn is_product(&self) -> bool {
        let rm = self.row_marginal();
        let cm = self.col_marginal();
        (0..self.rows).all(|r| {
            (0..self.cols).all(|c| self.mass_at(r, c) == &(rm.mass(r) * cm.mass(c)))
        })
    }

    /// `H(col | row) = H(row, col) - H(row)` in bits.
    pub fn conditional_entropy_bits(&self) -> f64 {
        self.entropy_bits() - self.row_marginal().entropy_bits()
    }

    /// Pushes the column coordinate through a deterministic map. The map must
    /// be defined on every column that carries mass.
    pub fn push_forward<F>(&self, new_cols: usize, f: F) -> Result<JointTable>
    where
        F: Fn(usize) -> Option<usize>,
    {
        let mut mass = vec![Ratio::zero(); self.rows * new_cols];
        for c in 0..self.cols {
            let target = f(c);
            for r in 0..self.rows {
                let m = self.mass_at(r, c);
                if m.is_zero() {
                    continue;
                }
                let t = target.ok_or(Error::UndefinedMap(c))?;
                if t >= new_cols {
                    return Err(Error::DimensionMismatch(format!(
                        "push-forward image {t} outside alphabet of size {new_cols}"
                    )));
                }
                mass[r * new_cols + t] += m;
            }
        }
        JointTable::new(self.rows, new_cols, mass)
    }

    /// `P(col | row)` for every row; fails on a zero-mass row.
    pub fn conditional_of_cols_given_rows(&self) -> Result<ConditionalKernel> {
        let rm = self.row_marginal();
        let mut columns = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let pr = rm.mass(r);
            if pr.is_zero() {
                return Err(Error::ZeroMassCondition(r));
            }
            let col = (0..self.cols).map(|c| self.mass_at(r, c) / pr).collect();
            columns.push(FiniteDistribution::new(col)?);
        }
        ConditionalKernel::new(columns)
    }

    /// `P(col | row)` restricted to rows with positive mass, together with
    /// the surviving row indices.
    pub fn conditional_of_positive_rows(&self) -> Result<(ConditionalKernel, Vec<usize>)> {
        let rm = self.row_marginal();
        let mut columns = Vec::new();
        let mut kept = Vec::new();
        for r in 0..self.rows {
            let pr = rm.mass(r);
            if pr.is_zero() {
                continue;
            }
            let col = (0..self.cols).map(|c| self.mass_at(r, c) / pr).collect();
            columns.push(FiniteDistribution::new(col)?);
            kept.push(r);
        }
        Ok((ConditionalKernel::new(columns)?, kept))
    }

    /// `P(row | col)` for columns with positive mass, together with the
    /// surviving column indices. This is the support-level object used by the
    /// polytope and rank computations.
    pub fn conditional_of_rows_given_positive_cols(
        &self,
    ) -> Result<(Vec<FiniteDistribution>, Vec<usize>)> {
        let cm = self.col_marginal();
        let mut columns = Vec::new();
        let mut kept = Vec::new();
        for c in 0..self.cols {
            let pc = cm.mass(c);
            if pc.is_zero() {
                continue;
            }
            let col = (0..self.rows).map(|r| self.mass_at(r, c) / pc).collect();
            columns.push(FiniteDistribution::new(col)?);
            kept.push(c);
        }
        Ok((columns, kept))
    }

    pub fn transposed(&self) -> JointTable {
        let mut mass = Vec::with_capacity(self.mass.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                mass.push(self.mass_at(r, c).clone());
            }
        }
        JointTable::new(self.cols, self.rows, mass).expect("transpose preserves the total mass")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn dist(entries: &[(i64, i64)]) -> FiniteDistribution {
        FiniteDistribution::new(entries.iter().map(|&(n, d)| ratio(n, d)).collect()).unwrap()
    }

    #[test]
    fn construction_requires_exact_unit_mass() {
        assert!(FiniteDistribution::new(vec![ratio(1, 2), ratio(1, 2)]).is_ok());
        assert!(matches!(
            FiniteDistribution::new(vec![ratio(1, 2), ratio(499, 1000)]),
            Err(Error::MassSum { .. })
        ));
        assert!(FiniteDistribution::new(vec![ratio(3, 2), ratio(-1, 2)]).is_err());
    }

    #[test]
    fn entropy_of_uniform_binary_is_one_bit() {
        assert_eq!(dist(&[(1, 2), (1, 2)]).entropy_bits(), 1.0);
    }

    #[test]
    fn entropy_matches_known_binary_and_quaternary_values() {
        // h(1/8) and H(1/6, 1/3, 1/4, 1/4)
        assert!((dist(&[(7, 8), (1, 8)]).entropy_bits() - 0.5436).abs() < 1e-3);
        let d = dist(&[(1, 6), (1, 3), (1, 4), (1, 4)]);
        assert!((d.entropy_bits() - 1.9591).abs() < 1e-3);
    }

    #[test]
    fn entropy_ignores_zero_masses_and_is_bounded_by_log_alphabet() {
        let d = dist(&[(1, 2), (0, 1), (1, 2), (0, 1)]);
        assert_eq!(d.entropy_bits(), 1.0);
        assert_eq!(d.support_size(), 2);
        assert!(d.entropy_bits() <= (d.len() as f64).log2());
    }

    #[test]
    fn prune_zeros_keeps_indices() {
        let d = dist(&[(0, 1), (1, 2), (0, 1), (1, 2)]);
        let (pruned, kept) = d.prune_zeros();
        assert_eq!(kept, vec![1, 3]);
        assert_eq!(pruned, dist(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn mutual_information_of_product_is_exactly_zero() {
        let j = JointTable::from_kernel_rows(
            &ConditionalKernel::new(vec![dist(&[(1, 3), (2, 3)]), dist(&[(1, 3), (2, 3)])])
                .unwrap(),
            &dist(&[(1, 2), (1, 2)]),
        )
        .unwrap();
        assert!(j.is_product());
        assert!(j.mutual_information_bits().abs() < 1e-12);
    }

    #[test]
    fn mutual_information_of_diagonal_binary_is_one_bit() {
        let j = JointTable::from_entries(
            2,
            2,
            &[(0, 0, ratio(1, 2)), (1, 1, ratio(1, 2))],
        )
        .unwrap();
        assert!(!j.is_product());
        assert!((j.mutual_information_bits() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_reduces_to_marginal_under_independence() {
        let j = JointTable::from_kernel_rows(
            &ConditionalKernel::new(vec![
                dist(&[(1, 4), (1, 4), (1, 2)]),
                dist(&[(1, 4), (1, 4), (1, 2)]),
            ])
            .unwrap(),
            &dist(&[(2, 5), (3, 5)]),
        )
        .unwrap();
        let h_col = j.col_marginal().entropy_bits();
        assert!((j.conditional_entropy_bits() - h_col).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_of_deterministic_column_is_zero() {
        // col = row
        let j = JointTable::from_entries(
            2,
            2,
            &[(0, 0, ratio(1, 3)), (1, 1, ratio(2, 3))],
        )
        .unwrap();
        assert!(j.conditional_entropy_bits().abs() < 1e-12);
    }

    #[test]
    fn push_forward_identity_and_constant() {
        let j = JointTable::from_entries(
            2,
            3,
            &[
                (0, 0, ratio(1, 6)),
                (0, 2, ratio(1, 3)),
                (1, 1, ratio(1, 2)),
            ],
        )
        .unwrap();
        let id = j.push_forward(3, Some).unwrap();
        assert_eq!(id, j);

        let constant = j.push_forward(2, |_| Some(0)).unwrap();
        assert_eq!(constant.col_marginal(), dist(&[(1, 1), (0, 1)]));
        assert_eq!(constant.row_marginal(), j.row_marginal());
    }

    #[test]
    fn push_forward_rejects_unmapped_reachable_symbols() {
        let j = JointTable::from_entries(1, 2, &[(0, 0, ratio(1, 2)), (0, 1, ratio(1, 2))])
            .unwrap();
        let err = j.push_forward(1, |c| if c == 0 { Some(0) } else { None });
        assert!(matches!(err, Err(Error::UndefinedMap(1))));
        // an unmapped zero-mass symbol is fine
        let j = JointTable::from_entries(1, 2, &[(0, 0, ratio(1, 1))]).unwrap();
        assert!(j.push_forward(1, |c| if c == 0 { Some(0) } else { None }).is_ok());
    }

    #[test]
    fn push_forward_preserves_row_marginal() {
        let j = JointTable::from_entries(
            2,
            4,
            &[
                (0, 0, ratio(1, 8)),
                (0, 3, ratio(1, 4)),
                (1, 1, ratio(1, 8)),
                (1, 2, ratio(1, 2)),
            ],
        )
        .unwrap();
        let pushed = j.push_forward(2, |c| Some(c % 2)).unwrap();
        assert_eq!(pushed.row_marginal(), j.row_marginal());
    }

    #[test]
    fn kernel_extraction_requires_positive_rows() {
        let j = JointTable::from_entries(2, 2, &[(0, 0, ratio(1, 2)), (0, 1, ratio(1, 2))])
            .unwrap();
        assert!(matches!(
            j.conditional_of_cols_given_rows(),
            Err(Error::ZeroMassCondition(1))
        ));
        let (kernel, kept) = j.conditional_of_positive_rows().unwrap();
        assert_eq!(kept, vec![0]);
        assert_eq!(kernel.column(0), &dist(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn majorization_glb_is_idempotent_on_identical_inputs() {
        let p = dist(&[(1, 4), (1, 2), (1, 4)]);
        let glb = majorization_glb(&[p.clone(), p.clone()]).unwrap();
        assert_eq!(glb, p.sorted_descending());
    }

    #[test]
    fn majorization_glb_matches_hand_computed_cases() {
        let glb = majorization_glb(&[dist(&[(3, 5), (2, 5)]), dist(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(glb, dist(&[(1, 2), (1, 2)]));

        let glb = majorization_glb(&[
            dist(&[(1, 2), (1, 3), (1, 6)]),
            dist(&[(1, 2), (1, 4), (1, 4)]),
        ])
        .unwrap();
        assert_eq!(glb, dist(&[(1, 2), (1, 4), (1, 4)]));
        assert!((glb.entropy_bits() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn glb_is_majorized_by_every_input() {
        let inputs = [
            dist(&[(1, 2), (1, 3), (1, 6)]),
            dist(&[(1, 2), (1, 4), (1, 4)]),
            dist(&[(9, 10), (1, 20), (1, 20)]),
        ];
        let glb = majorization_glb(&inputs).unwrap();
        for p in &inputs {
            assert!(majorized_by(&glb, p));
        }
    }

    #[test]
    fn glb_pads_mismatched_lengths_with_zeros() {
        let glb = majorization_glb(&[dist(&[(1, 1)]), dist(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(glb, dist(&[(1, 2), (1, 2)]));
    }
}
