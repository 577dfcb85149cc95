//! Report structures. Everything serializes deterministically (vectors and
//! ordered maps only), so a fixed (config, seed, version) triple yields
//! byte-identical output. Exact rational values ride along as strings next
//! to their decimal renderings; the decimals never feed back into any
//! computation.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

use privcache_core::bounds::BoundEntry;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(command: &str, config_bytes: &[u8], seed: Option<u64>) -> Self {
        let digest = Sha256::digest(config_bytes);
        let config_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_sha256,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub kind: String,
    pub x_alphabet: usize,
    pub key_size: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub files: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub users: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file_bits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_files: Option<usize>,
}

/// Exhaustive verification results for one demand case.
#[derive(Debug, Clone, Serialize)]
pub struct ExactReport {
    pub expected_length_bits: f64,
    pub expected_length_exact: String,
    pub part1_bits: usize,
    pub part2_expected_bits: f64,
    pub leakage_bits: f64,
    pub leakage_exactly_zero: bool,
    pub lossless: bool,
    pub tuples_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Coupling details for one demand case.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub message_alphabet: usize,
    pub message_support: usize,
    pub qstar_masses: Vec<String>,
    pub qstar_entropy_bits: f64,
    pub atoms: Vec<AtomReport>,
    pub atom_entropy_bits: f64,
    /// Prefix codeword per atom, as a `"0101"` string.
    pub codewords: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomReport {
    pub mass: String,
    pub outcome_per_x: Vec<usize>,
}

/// Seeded sampling statistics for one demand case.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_length_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_dev_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_err_bits: Option<f64>,
    pub decode_failures: u64,
    pub exact_expected_length_bits: f64,
    pub exact_expected_length: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemandReport {
    pub demand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_bound_within_budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WorstCaseReport {
    pub key_budget: u64,
    /// Worst case over demands of the best bound at each exact key size.
    pub by_key_size: BTreeMap<u64, Option<f64>>,
    pub within_budget: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub scenario: ScenarioSummary,
    pub per_demand: Vec<DemandReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case: Option<WorstCaseReport>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One CSV row per demand and bound, followed by worst-case rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.per_demand.iter().any(|d| d.bounds.is_some()) {
            out.push_str("demand,bound,bits,required_key_size,applicable,reason\n");
            for d in &self.per_demand {
                for e in d.bounds.iter().flatten() {
                    out.push_str(&format!(
                        "{},{:?},{},{},{},{}\n",
                        d.demand,
                        e.name,
                        e.bits.map_or(String::new(), |b| format!("{b:.6}")),
                        e.required_key_size,
                        e.applicable,
                        e.reason.as_deref().unwrap_or("").replace(',', ";"),
                    ));
                }
            }
            if let Some(w) = &self.worst_case {
                for (key, value) in &w.by_key_size {
                    out.push_str(&format!(
                        "worst_case,key={key},{},,,\n",
                        value.map_or(String::new(), |v| format!("{v:.6}")),
                    ));
                }
                out.push_str(&format!(
                    "worst_case,budget={},{},,,\n",
                    w.key_budget,
                    w.within_budget.map_or(String::new(), |v| format!("{v:.6}")),
                ));
            }
            return out;
        }
        if self.per_demand.iter().any(|d| d.simulation.is_some()) {
            out.push_str("demand,samples,mean_length_bits,std_err_bits,decode_failures,exact_expected_length_bits\n");
            for d in &self.per_demand {
                if let Some(s) = &d.simulation {
                    out.push_str(&format!(
                        "{},{},{},{},{},{:.6}\n",
                        d.demand,
                        s.samples,
                        s.mean_length_bits.map_or(String::new(), |v| format!("{v:.6}")),
                        s.std_err_bits.map_or(String::new(), |v| format!("{v:.6}")),
                        s.decode_failures,
                        s.exact_expected_length_bits,
                    ));
                }
            }
            return out;
        }
        out.push_str("demand,expected_length_bits,leakage_bits,leakage_exactly_zero,lossless\n");
        for d in &self.per_demand {
            if let Some(e) = &d.exact {
                out.push_str(&format!(
                    "{},{:.6},{:.6},{},{}\n",
                    d.demand, e.expected_length_bits, e.leakage_bits, e.leakage_exactly_zero, e.lossless,
                ));
            }
        }
        out
    }
}
