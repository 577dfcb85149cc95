//! Scenario files: JSON with exact rational probabilities and hex
//! bit-strings, validated field by field on load.
//!
//! Two model kinds exist. A `cached` model declares the caching system and
//! the joint of the private symbol with the database, either as explicit
//! `(x, y, p)` entries or as a deterministic `x_def` table over the database
//! plus a database marginal (per-file product or full table). A `direct`
//! model gives the joint of the private symbol with the delivered message
//! and skips the caching layer entirely.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

use privcache_core::bits::{bits_to_index, hex_to_bits};
use privcache_core::caching::{CachingParams, DemandVector, make_params};
use privcache_core::prob::JointTable;
use privcache_core::rational::{Ratio, parse_ratio};
use privcache_core::scenario::Scenario;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub model: ModelSpec,
    #[serde(default)]
    pub demands: DemandsSpec,
    #[serde(default)]
    pub mode: ModeSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Cached {
        files: usize,
        users: usize,
        file_bits: usize,
        cache_files: usize,
        key_size: u64,
        x_alphabet: usize,
        joint: JointSpec,
    },
    Direct {
        x_alphabet: usize,
        message_alphabet: usize,
        key_size: u64,
        entries: Vec<DirectEntry>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectEntry {
    pub x: usize,
    pub c: usize,
    pub p: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum JointSpec {
    Entries {
        entries: Vec<CachedEntry>,
    },
    XDef {
        x_def: Vec<XDefEntry>,
        y_marginal: YMarginalSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CachedEntry {
    pub x: usize,
    pub y: Vec<String>,
    pub p: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XDefEntry {
    pub y: Vec<String>,
    pub x: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YMarginalSpec {
    /// One distribution per file; the files are independent.
    Product(Vec<Vec<YMass>>),
    /// Full distribution over database tuples.
    Table(Vec<YTableEntry>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YMass {
    pub y: String,
    pub p: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YTableEntry {
    pub y: Vec<String>,
    pub p: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DemandsSpec {
    Keyword(String),
    Explicit(Vec<Vec<usize>>),
}

impl Default for DemandsSpec {
    fn default() -> Self {
        DemandsSpec::Keyword("all".into())
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSpec {
    #[default]
    Exact,
    Montecarlo {
        samples: u64,
        seed: u64,
    },
}

/// A loaded and validated scenario, ready to run.
#[derive(Debug)]
pub struct LoadedScenario {
    pub name: String,
    pub scenario: Scenario,
    pub demands: Vec<Option<DemandVector>>,
    pub mode: ModeSpec,
    pub config_bytes: Vec<u8>,
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{path}: {msg}"))
}

/// Reads, parses, and validates a scenario file.
pub fn load_scenario(path: &Path) -> CliResult<LoadedScenario> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut deserializer = serde_json::Deserializer::from_slice(&bytes);
    let file: ScenarioFile = serde_path_to_error::deserialize(&mut deserializer)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if file.schema_version != 1 {
        return Err(invalid(
            "schema_version",
            format!("unsupported version {}", file.schema_version),
        ));
    }
    let name = file
        .name
        .clone()
        .unwrap_or_else(|| path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned()));
    let scenario = build_scenario(&file.model)?;
    let demands = resolve_demands(&scenario, &file.demands)?;
    Ok(LoadedScenario {
        name,
        scenario,
        demands,
        mode: file.mode,
        config_bytes: bytes,
    })
}

fn build_scenario(model: &ModelSpec) -> CliResult<Scenario> {
    match model {
        ModelSpec::Direct {
            x_alphabet,
            message_alphabet,
            key_size,
            entries,
        } => {
            let parsed: Vec<(usize, usize, Ratio)> = entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let p = parse_ratio(&e.p)
                        .map_err(|err| invalid(&format!("model.entries[{i}].p"), err))?;
                    if e.x >= *x_alphabet {
                        return Err(invalid(
                            &format!("model.entries[{i}].x"),
                            format!("{} outside alphabet of {x_alphabet}", e.x),
                        ));
                    }
                    if e.c >= *message_alphabet {
                        return Err(invalid(
                            &format!("model.entries[{i}].c"),
                            format!("{} outside alphabet of {message_alphabet}", e.c),
                        ));
                    }
                    Ok((e.x, e.c, p))
                })
                .collect::<CliResult<_>>()?;
            let joint = JointTable::from_entries(*x_alphabet, *message_alphabet, &parsed)
                .map_err(|e| invalid("model.entries", e))?;
            Ok(Scenario::new_direct(joint, *key_size)?)
        }
        ModelSpec::Cached {
            files,
            users,
            file_bits,
            cache_files,
            key_size,
            x_alphabet,
            joint,
        } => {
            let params = make_params(*files, *users, *file_bits, *cache_files)
                .map_err(|e| invalid("model", e))?;
            let table = build_cached_joint(&params, *x_alphabet, joint)?;
            Ok(Scenario::new_cached(params, table, *key_size)?)
        }
    }
}

fn parse_y_tuple(params: &CachingParams, path: &str, y: &[String]) -> CliResult<usize> {
    if y.len() != params.files() {
        return Err(invalid(
            path,
            format!("expected {} files, got {}", params.files(), y.len()),
        ));
    }
    let mut bits = Vec::with_capacity(params.database_bits());
    for (n, hex) in y.iter().enumerate() {
        let file_bits = hex_to_bits(hex, params.file_bits())
            .map_err(|e| invalid(&format!("{path}[{n}]"), e))?;
        bits.extend(file_bits);
    }
    Ok(bits_to_index(&bits))
}

fn build_cached_joint(
    params: &CachingParams,
    x_alphabet: usize,
    joint: &JointSpec,
) -> CliResult<JointTable> {
    let cols = 1usize << params.database_bits();
    match joint {
        JointSpec::Entries { entries } => {
            let parsed: Vec<(usize, usize, Ratio)> = entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let p = parse_ratio(&e.p)
                        .map_err(|err| invalid(&format!("model.joint.entries[{i}].p"), err))?;
                    if e.x >= x_alphabet {
                        return Err(invalid(
                            &format!("model.joint.entries[{i}].x"),
                            format!("{} outside alphabet of {x_alphabet}", e.x),
                        ));
                    }
                    let y = parse_y_tuple(params, &format!("model.joint.entries[{i}].y"), &e.y)?;
                    Ok((e.x, y, p))
                })
                .collect::<CliResult<_>>()?;
            Ok(JointTable::from_entries(x_alphabet, cols, &parsed)
                .map_err(|e| invalid("model.joint.entries", e))?)
        }
        JointSpec::XDef { x_def, y_marginal } => {
            let mut x_of_y: BTreeMap<usize, usize> = BTreeMap::new();
            for (i, entry) in x_def.iter().enumerate() {
                if entry.x >= x_alphabet {
                    return Err(invalid(
                        &format!("model.joint.x_def[{i}].x"),
                        format!("{} outside alphabet of {x_alphabet}", entry.x),
                    ));
                }
                let y = parse_y_tuple(params, &format!("model.joint.x_def[{i}].y"), &entry.y)?;
                if x_of_y.insert(y, entry.x).is_some() {
                    return Err(invalid(
                        &format!("model.joint.x_def[{i}]"),
                        "duplicate database tuple",
                    ));
                }
            }
            let y_masses = build_y_marginal(params, y_marginal)?;
            let mut entries = Vec::new();
            for (y, mass) in y_masses.iter().enumerate() {
                if mass == &Ratio::new(0.into(), 1.into()) {
                    continue;
                }
                let x = *x_of_y.get(&y).ok_or_else(|| {
                    invalid(
                        "model.joint.x_def",
                        format!("no private symbol defined for reachable database tuple {y}"),
                    )
                })?;
                entries.push((x, y, mass.clone()));
            }
            Ok(JointTable::from_entries(x_alphabet, cols, &entries)
                .map_err(|e| invalid("model.joint", e))?)
        }
    }
}

fn build_y_marginal(params: &CachingParams, spec: &YMarginalSpec) -> CliResult<Vec<Ratio>> {
    let cols = 1usize << params.database_bits();
    let zero = Ratio::new(0.into(), 1.into());
    match spec {
        YMarginalSpec::Table(entries) => {
            let mut masses = vec![zero; cols];
            for (i, e) in entries.iter().enumerate() {
                let y = parse_y_tuple(params, &format!("model.joint.y_marginal.table[{i}].y"), &e.y)?;
                let p = parse_ratio(&e.p)
                    .map_err(|err| invalid(&format!("model.joint.y_marginal.table[{i}].p"), err))?;
                masses[y] += p;
            }
            Ok(masses)
        }
        YMarginalSpec::Product(per_file) => {
            if per_file.len() != params.files() {
                return Err(invalid(
                    "model.joint.y_marginal.product",
                    format!("expected {} file distributions", params.files()),
                ));
            }
            let mut file_dists: Vec<Vec<Ratio>> = Vec::new();
            for (n, file) in per_file.iter().enumerate() {
                let mut d = vec![zero.clone(); 1usize << params.file_bits()];
                for (i, m) in file.iter().enumerate() {
                    let path = format!("model.joint.y_marginal.product[{n}][{i}]");
                    let bits = hex_to_bits(&m.y, params.file_bits())
                        .map_err(|e| invalid(&path, e))?;
                    let p = parse_ratio(&m.p).map_err(|e| invalid(&path, e))?;
                    d[bits_to_index(&bits)] += p;
                }
                file_dists.push(d);
            }
            let mut masses = vec![Ratio::new(1.into(), 1.into()); cols];
            let file_values = 1usize << params.file_bits();
            for (y, slot) in masses.iter_mut().enumerate() {
                let mut rest = y;
                // file 0 occupies the most significant bits
                for n in (0..params.files()).rev() {
                    let v = rest % file_values;
                    rest /= file_values;
                    *slot *= &file_dists[n][v];
                }
            }
            Ok(masses)
        }
    }
}

fn resolve_demands(
    scenario: &Scenario,
    spec: &DemandsSpec,
) -> CliResult<Vec<Option<DemandVector>>> {
    match spec {
        DemandsSpec::Keyword(k) if k == "all" => Ok(scenario.demand_cases()),
        DemandsSpec::Keyword(k) => Err(invalid(
            "demands",
            format!("unknown keyword {k:?}; use \"all\" or explicit vectors"),
        )),
        DemandsSpec::Explicit(list) => parse_demand_list(scenario, list),
    }
}

/// Parses 1-based demand vectors against a scenario.
pub fn parse_demand_list(
    scenario: &Scenario,
    list: &[Vec<usize>],
) -> CliResult<Vec<Option<DemandVector>>> {
    let Some(params) = scenario.params() else {
        return Err(CliError::Validation(
            "demands: a direct scenario takes no demand vectors".into(),
        ));
    };
    if list.is_empty() {
        return Err(CliError::Validation("demands: empty demand list".into()));
    }
    list.iter()
        .map(|d| {
            DemandVector::from_one_based(params, d)
                .map(Some)
                .map_err(|e| invalid("demands", e))
        })
        .collect()
}
