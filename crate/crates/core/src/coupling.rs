//! Greedy minimum-entropy coupling of a conditional family.
//!
//! Given the kernel of the delivered message given the private symbol,
//! `{P(c | x)}`, the greedy construction repeatedly takes the smallest of the
//! per-column maxima, subtracts it from every column's top entry, and
//! re-sorts. The extracted mass sequence is the lower-bound distribution
//! `Q*`; recording which row each column's subtraction hit yields a coupling
//! whose atoms realize a variable `U` with `C` a function of `(U, X)` and `U`
//! exactly independent of `X`.
//!
//! Exact rational subtraction drives the residual to zero with no epsilon
//! anywhere, and at least one entry is zeroed per step, so the loop ends in
//! at most `rows * cols` iterations.

use num_traits::{One, Zero};

use crate::prob::{ConditionalKernel, FiniteDistribution, Probability};
use crate::rational::Ratio;
use crate::{Error, Result};

/// One atom of the coupling: a mass and, for every conditioning symbol, the
/// outcome that mass is pinned to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingAtom {
    pub mass: Probability,
    pub outcome_per_x: Vec<usize>,
}

/// The full coupling table. Atom masses sum to 1 and, for every `(x, c)`,
/// the atoms mapping `x` to `c` carry exactly mass `P(c | x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingTable {
    atoms: Vec<CouplingAtom>,
    num_conditions: usize,
    num_outcomes: usize,
}

impl CouplingTable {
    pub fn atoms(&self) -> &[CouplingAtom] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_conditions(&self) -> usize {
        self.num_conditions
    }

    pub fn num_outcomes(&self) -> usize {
        self.num_outcomes
    }

    /// The atom masses as a distribution over the atom alphabet.
    pub fn mass_distribution(&self) -> FiniteDistribution {
        FiniteDistribution::new(self.atoms.iter().map(|a| a.mass.ratio().clone()).collect())
            .expect("atom masses sum to one by construction")
    }
}

/// The mass sequence of the greedy construction, as a distribution sorted in
/// extraction (non-increasing) order.
pub fn greedy_qstar(kernel: &ConditionalKernel) -> Result<FiniteDistribution> {
    if kernel.num_conditions() == 0 {
        return Err(Error::DimensionMismatch("kernel with no columns".into()));
    }
    let mut columns: Vec<Vec<Ratio>> = kernel
        .columns()
        .iter()
        .map(|c| {
            let mut v = c.to_ratios();
            v.sort_by(|a, b| b.cmp(a));
            v
        })
        .collect();
    let mut masses = Vec::new();
    let mut remaining = Ratio::one();
    while !remaining.is_zero() {
        let q = columns
            .iter()
            .map(|c| c[0].clone())
            .min()
            .expect("at least one column");
        debug_assert!(!q.is_zero(), "positive residual implies positive maxima");
        for col in columns.iter_mut() {
            col[0] -= &q;
            col.sort_by(|a, b| b.cmp(a));
        }
        remaining -= &q;
        masses.push(q);
    }
    FiniteDistribution::new(masses)
}

/// The greedy coupling: the same iteration as [`greedy_qstar`], additionally
/// recording, per step and per column, the original row index the mass was
/// taken from. Ties (equal residuals within a column) resolve to the lowest
/// original row index, so the output is deterministic.
pub fn greedy_coupling(kernel: &ConditionalKernel) -> Result<CouplingTable> {
    if kernel.num_conditions() == 0 {
        return Err(Error::DimensionMismatch("kernel with no columns".into()));
    }
    // (residual mass, original row index) per column entry
    let mut columns: Vec<Vec<(Ratio, usize)>> = kernel
        .columns()
        .iter()
        .map(|c| {
            let mut v: Vec<(Ratio, usize)> = c.to_ratios().into_iter().zip(0..).collect();
            v.sort_by(|(ma, ia), (mb, ib)| mb.cmp(ma).then(ia.cmp(ib)));
            v
        })
        .collect();
    let mut atoms = Vec::new();
    let mut remaining = Ratio::one();
    while !remaining.is_zero() {
        let q = columns
            .iter()
            .map(|c| c[0].0.clone())
            .min()
            .expect("at least one column");
        let outcome_per_x: Vec<usize> = columns.iter().map(|c| c[0].1).collect();
        for col in columns.iter_mut() {
            col[0].0 -= &q;
            col.sort_by(|(ma, ia), (mb, ib)| mb.cmp(ma).then(ia.cmp(ib)));
        }
        remaining -= &q;
        atoms.push(CouplingAtom {
            mass: Probability::new(q).expect("extracted mass lies in [0, 1]"),
            outcome_per_x,
        });
    }
    Ok(CouplingTable {
        atoms,
        num_conditions: kernel.num_conditions(),
        num_outcomes: kernel.num_outcomes(),
    })
}

/// Per-`(x, c)` conditional law of the atom index: the encoder, having
/// observed its own `x` and the realized message `c`, draws the atom from
/// this row. Rows for pairs with `P(c | x) = 0` are unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerTable {
    num_conditions: usize,
    num_outcomes: usize,
    // row-major over (x, c)
    rows: Vec<Option<FiniteDistribution>>,
}

impl SamplerTable {
    pub fn row(&self, x: usize, c: usize) -> Option<&FiniteDistribution> {
        self.rows[x * self.num_outcomes + c].as_ref()
    }

    pub fn num_conditions(&self) -> usize {
        self.num_conditions
    }

    pub fn num_outcomes(&self) -> usize {
        self.num_outcomes
    }
}

/// The coupling repackaged for the encoder/decoder pair: atom masses, the
/// deterministic outcome map, and the conditional sampler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalRepresentation {
    atom_masses: FiniteDistribution,
    // outcomes[u][x] = c
    outcomes: Vec<Vec<usize>>,
    sampler: SamplerTable,
}

impl FunctionalRepresentation {
    /// `P(U)`: the atom mass distribution.
    pub fn atom_masses(&self) -> &FiniteDistribution {
        &self.atom_masses
    }

    pub fn num_atoms(&self) -> usize {
        self.outcomes.len()
    }

    /// The deterministic reconstruction map `(u, x) -> c`.
    pub fn outcome(&self, u: usize, x: usize) -> usize {
        self.outcomes[u][x]
    }

    pub fn sampler(&self) -> &SamplerTable {
        &self.sampler
    }

    /// Diagnostic variant with every sampler row collapsed to its
    /// highest-mass atom (ties to the lowest index). Encoding with it stays
    /// lossless but generally breaks the independence of the atom from `x`;
    /// the exact leakage check is expected to catch that.
    pub fn with_argmax_sampler(&self) -> FunctionalRepresentation {
        let mut collapsed = self.clone();
        for row in collapsed.sampler.rows.iter_mut() {
            if let Some(dist) = row {
                let argmax = (0..dist.len())
                    .max_by(|&a, &b| dist.mass(a).cmp(dist.mass(b)))
                    .expect("sampler rows are nonempty");
                *row = Some(
                    FiniteDistribution::point_mass(dist.len(), argmax)
                        .expect("argmax index is in range"),
                );
            }
        }
        collapsed
    }
}

/// Extracts `(P_U, f, sampler)` from a coupling table. The sampler row for
/// `(x, c)` is `mass(u) / P(c | x)` over the atoms with `f(u, x) = c`, which
/// is exactly the conditional law that makes the drawn atom independent of
/// `x`.
pub fn functional_representation(table: &CouplingTable) -> Result<FunctionalRepresentation> {
    let num_x = table.num_conditions();
    let num_c = table.num_outcomes();
    let mut rows: Vec<Option<FiniteDistribution>> = vec![None; num_x * num_c];
    for x in 0..num_x {
        for c in 0..num_c {
            let atom_masses: Vec<Ratio> = table
                .atoms
                .iter()
                .map(|a| {
                    if a.outcome_per_x[x] == c {
                        a.mass.ratio().clone()
                    } else {
                        Ratio::zero()
                    }
                })
                .collect();
            let total: Ratio = atom_masses.iter().sum();
            if total.is_zero() {
                continue; // unreachable pair
            }
            let normalized = atom_masses.into_iter().map(|m| m / &total).collect();
            rows[x * num_c + c] = Some(FiniteDistribution::new(normalized)?);
        }
    }
    Ok(FunctionalRepresentation {
        atom_masses: table.mass_distribution(),
        outcomes: table
            .atoms
            .iter()
            .map(|a| a.outcome_per_x.clone())
            .collect(),
        sampler: SamplerTable {
            num_conditions: num_x,
            num_outcomes: num_c,
            rows,
        },
    })
}

/// Outcome of the exact feasibility checks on a functional representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintReport {
    /// The outcome map is total and consistent with the sampler: whenever the
    /// sampler can emit atom `u` at `(x, c)`, the map sends `(u, x)` back to
    /// `c`. This is the exact form of "C is a function of (U, X)".
    pub message_determined: bool,
    /// Mixing each sampler row against `P(c | x)` returns the atom masses for
    /// every `x`: the exact certificate that the drawn atom is independent of
    /// `x`.
    pub atom_independent: bool,
}

/// Verifies both coupling constraints exactly against the kernel the
/// representation was built for.
pub fn verify_u_constraints(
    kernel: &ConditionalKernel,
    frep: &FunctionalRepresentation,
) -> Result<ConstraintReport> {
    let num_x = kernel.num_conditions();
    let num_c = kernel.num_outcomes();
    if frep.sampler.num_conditions() != num_x || frep.sampler.num_outcomes() != num_c {
        return Err(Error::DimensionMismatch(
            "representation does not match kernel alphabets".into(),
        ));
    }
    let mut message_determined = true;
    for x in 0..num_x {
        for c in 0..num_c {
            if let Some(row) = frep.sampler.row(x, c) {
                for u in 0..frep.num_atoms() {
                    if !row.mass(u).is_zero() && frep.outcome(u, x) != c {
                        message_determined = false;
                    }
                }
            }
        }
    }
    let mut atom_independent = true;
    for x in 0..num_x {
        for u in 0..frep.num_atoms() {
            let mixed: Ratio = (0..num_c)
                .map(|c| match frep.sampler.row(x, c) {
                    Some(row) => kernel.column(x).mass(c) * row.mass(u),
                    None => Ratio::zero(),
                })
                .sum();
            if &mixed != frep.atom_masses().mass(u) {
                atom_independent = false;
            }
        }
    }
    Ok(ConstraintReport {
        message_determined,
        atom_independent,
    })
}
