//! In-memory scenario model and the per-demand pipeline context.
//!
//! A scenario is either *cached* — a caching system plus the exact joint of
//! the private symbol and the database — or *direct*, where the joint of the
//! private symbol and the delivered message is given as data and no caching
//! layer exists. Building a [`DemandContext`] fixes one demand vector and
//! assembles everything the encoder, decoder, and verifiers need: the
//! induced message joint, its kernel, the greedy coupling, and the prefix
//! code for the atom variable.

use num_traits::Zero;

use crate::caching::{
    CacheContent, CachingParams, DatabaseRealization, DemandVector, all_demands, delivery,
    induced_joint, placement,
};
use crate::codec::PrefixCode;
use crate::coupling::{FunctionalRepresentation, functional_representation, greedy_coupling};
use crate::prob::{ConditionalKernel, JointTable};
use crate::rational::Ratio;
use crate::{Error, Result};

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub enum Scenario {
    Cached {
        params: CachingParams,
        /// Joint of `(X, database index)`; every `x` must carry positive mass.
        joint_xy: JointTable,
        /// Declared shared-key size, used as the budget in bound reports.
        key_size: u64,
    },
    Direct {
        /// Joint of `(X, message index)`; every `x` must carry positive mass.
        joint_xc: JointTable,
        key_size: u64,
    },
}

impl Scenario {
    pub fn new_cached(params: CachingParams, joint_xy: JointTable, key_size: u64) -> Result<Self> {
        if joint_xy.cols() != 1usize << params.database_bits() {
            return Err(Error::DimensionMismatch(format!(
                "joint has {} database columns, expected 2^{}",
                joint_xy.cols(),
                params.database_bits()
            )));
        }
        Self::check_positive_rows(&joint_xy)?;
        if key_size == 0 {
            return Err(Error::InvalidParameter("key size must be positive".into()));
        }
        Ok(Self::Cached {
            params,
            joint_xy,
            key_size,
        })
    }

    pub fn new_direct(joint_xc: JointTable, key_size: u64) -> Result<Self> {
        Self::check_positive_rows(&joint_xc)?;
        if key_size == 0 {
            return Err(Error::InvalidParameter("key size must be positive".into()));
        }
        Ok(Self::Direct { joint_xc, key_size })
    }

    fn check_positive_rows(joint: &JointTable) -> Result<()> {
        let rm = joint.row_marginal();
        for x in 0..joint.rows() {
            if rm.mass(x).is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "private symbol {x} has zero mass; shrink the alphabet"
                )));
            }
        }
        Ok(())
    }

    pub fn x_size(&self) -> usize {
        match self {
            Self::Cached { joint_xy, .. } => joint_xy.rows(),
            Self::Direct { joint_xc, .. } => joint_xc.rows(),
        }
    }

    pub fn key_size(&self) -> u64 {
        match self {
            Self::Cached { key_size, .. } | Self::Direct { key_size, .. } => *key_size,
        }
    }

    pub fn params(&self) -> Option<&CachingParams> {
        match self {
            Self::Cached { params, .. } => Some(params),
            Self::Direct { .. } => None,
        }
    }

    /// Every demand case of the scenario: all of `[N]^K` for a cached
    /// scenario, the single implicit case for a direct one.
    pub fn demand_cases(&self) -> Vec<Option<DemandVector>> {
        match self {
            Self::Cached { params, .. } => all_demands(params).into_iter().map(Some).collect(),
            Self::Direct { .. } => vec![None],
        }
    }

    /// The exact joint of `(X, message index)` for one demand case.
    pub fn joint_for(&self, demand: Option<&DemandVector>) -> Result<JointTable> {
        match (self, demand) {
            (Self::Cached { params, joint_xy, .. }, Some(d)) => induced_joint(joint_xy, params, d),
            (Self::Direct { joint_xc, .. }, None) => Ok(joint_xc.clone()),
            (Self::Cached { .. }, None) => Err(Error::InvalidParameter(
                "cached scenario requires a demand vector".into(),
            )),
            (Self::Direct { .. }, Some(_)) => Err(Error::InvalidParameter(
                "direct scenario takes no demand vector".into(),
            )),
        }
    }

    pub fn demand_label(demand: Option<&DemandVector>) -> String {
        match demand {
            Some(d) => d.label(),
            None => "-".to_string(),
        }
    }
}

/// One positive-mass source state: the private symbol, the carrier (database
/// index for cached scenarios), the induced message index, and the exact
/// mass.
#[derive(Debug, Clone)]
pub struct SourceState {
    pub x: usize,
    pub carrier: Option<usize>,
    pub cprime: usize,
    pub mass: Ratio,
}

#[derive(Debug, Clone)]
enum ContextKind {
    Cached {
        params: CachingParams,
        joint_xy: JointTable,
        demand: DemandVector,
        /// Delivery map on database indices; `None` where unreachable.
        cprime_of_y: Vec<Option<usize>>,
    },
    Direct,
}

/// The side information a cached-state decode check needs.
pub enum DemandCase {
    Cached {
        params: CachingParams,
        demand: DemandVector,
        caches: Vec<CacheContent>,
        db: DatabaseRealization,
    },
    Direct,
}

/// Everything fixed once a scenario and a demand case are chosen.
#[derive(Debug, Clone)]
pub struct DemandContext {
    pub x_size: usize,
    pub joint_xc: JointTable,
    pub kernel: ConditionalKernel,
    pub frep: FunctionalRepresentation,
    pub code: PrefixCode,
    pub label: String,
    kind: ContextKind,
}

/// Builds the full pipeline for one demand case: induced joint, kernel,
/// greedy coupling, functional representation, and prefix code.
pub fn build_demand_context(
    scenario: &Scenario,
    demand: Option<&DemandVector>,
) -> Result<DemandContext> {
    let joint_xc = scenario.joint_for(demand)?;
    let kernel = joint_xc.conditional_of_cols_given_rows()?;
    let coupling = greedy_coupling(&kernel)?;
    let frep = functional_representation(&coupling)?;
    let code = PrefixCode::build(frep.atom_masses())?;
    let kind = match (scenario, demand) {
        (Scenario::Cached { params, joint_xy, .. }, Some(d)) => {
            let mut cprime_of_y = vec![None; joint_xy.cols()];
            for (y, slot) in cprime_of_y.iter_mut().enumerate() {
                let reachable =
                    (0..joint_xy.rows()).any(|x| !joint_xy.mass_at(x, y).is_zero());
                if reachable {
                    let db = DatabaseRealization::from_index(params, y)?;
                    *slot = Some(delivery(params, &db, d)?.to_index());
                }
            }
            ContextKind::Cached {
                params: params.clone(),
                joint_xy: joint_xy.clone(),
                demand: d.clone(),
                cprime_of_y,
            }
        }
        (Scenario::Direct { .. }, None) => ContextKind::Direct,
        _ => {
            return Err(Error::InvalidParameter(
                "demand case does not match the scenario kind".into(),
            ));
        }
    };
    Ok(DemandContext {
        x_size: scenario.x_size(),
        joint_xc,
        kernel,
        frep,
        code,
        label: Scenario::demand_label(demand),
        kind,
    })
}

impl DemandContext {
    /// All positive-mass source states of this demand case.
    pub fn positive_states(&self) -> Result<Vec<SourceState>> {
        let mut states = Vec::new();
        match &self.kind {
            ContextKind::Cached {
                joint_xy,
                cprime_of_y,
                ..
            } => {
                for x in 0..joint_xy.rows() {
                    for y in 0..joint_xy.cols() {
                        let mass = joint_xy.mass_at(x, y);
                        if mass.is_zero() {
                            continue;
                        }
                        let cprime = cprime_of_y[y].ok_or(Error::UndefinedMap(y))?;
                        states.push(SourceState {
                            x,
                            carrier: Some(y),
                            cprime,
                            mass: mass.clone(),
                        });
                    }
                }
            }
            ContextKind::Direct => {
                for x in 0..self.joint_xc.rows() {
                    for c in 0..self.joint_xc.cols() {
                        let mass = self.joint_xc.mass_at(x, c);
                        if mass.is_zero() {
                            continue;
                        }
                        states.push(SourceState {
                            x,
                            carrier: None,
                            cprime: c,
                            mass: mass.clone(),
                        });
                    }
                }
            }
        }
        Ok(states)
    }

    /// Materializes the cache-side objects for one state of a cached
    /// scenario.
    pub fn case_for_state(&self, state: &SourceState) -> Result<DemandCase> {
        match &self.kind {
            ContextKind::Direct => Ok(DemandCase::Direct),
            ContextKind::Cached { params, demand, .. } => {
                let y = state
                    .carrier
                    .ok_or_else(|| Error::InvalidParameter("state without a carrier".into()))?;
                let db = DatabaseRealization::from_index(params, y)?;
                let caches = placement(params, &db)?;
                Ok(DemandCase::Cached {
                    params: params.clone(),
                    demand: demand.clone(),
                    caches,
                    db,
                })
            }
        }
    }

    pub fn is_cached(&self) -> bool {
        matches!(self.kind, ContextKind::Cached { .. })
    }

    /// Exhaustive tuple count of the exact verifiers:
    /// states x keys x atoms.
    pub fn exact_tuple_count(&self) -> Result<u64> {
        let states = self.positive_states()?.len() as u64;
        Ok(states * self.x_size as u64 * self.frep.num_atoms() as u64)
    }
}
