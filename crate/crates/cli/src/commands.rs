//! The four pipeline commands. Each returns a [`RunReport`] plus a flag
//! telling the binary whether verification failed (exit code 3).

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use privcache_core::bounds;
use privcache_core::codec::{
    self, SharedKey, ceil_log2, decode_response, encode_response, exact_leakage,
    verify_losslessness,
};
use privcache_core::coupling::greedy_qstar;
use privcache_core::rational::to_f64;
use privcache_core::scenario::{DemandContext, Scenario, build_demand_context};

use crate::report::{
    AtomReport, CouplingReport, DemandReport, ExactReport, Provenance, RunReport,
    ScenarioSummary, SimulationReport, WorstCaseReport,
};
use crate::scenario::{LoadedScenario, ModeSpec};
use crate::{CliError, CliResult};

/// Exhaustive verification is refused beyond this many
/// (state, key, atom) tuples; use sampling mode instead.
pub const EXACT_TUPLE_LIMIT: u64 = 1_000_000;

fn summarize(loaded: &LoadedScenario) -> ScenarioSummary {
    let s = &loaded.scenario;
    let params = s.params();
    ScenarioSummary {
        name: loaded.name.clone(),
        kind: match s {
            Scenario::Cached { .. } => "cached".into(),
            Scenario::Direct { .. } => "direct".into(),
        },
        x_alphabet: s.x_size(),
        key_size: s.key_size(),
        files: params.map(|p| p.files()),
        users: params.map(|p| p.users()),
        file_bits: params.map(|p| p.file_bits()),
        cache_files: params.map(|p| p.cache_files()),
    }
}

fn worst_case_report(report: &bounds::BoundReport) -> WorstCaseReport {
    WorstCaseReport {
        key_budget: report.key_budget,
        by_key_size: report.worst_case_by_key.clone(),
        within_budget: report.worst_case_within_budget,
    }
}

/// Evaluates every bound for every selected demand case.
pub fn cmd_bounds(loaded: &LoadedScenario, provenance: Provenance) -> CliResult<RunReport> {
    let budget = loaded.scenario.key_size();
    let mut demand_bounds = Vec::new();
    for case in &loaded.demands {
        let joint = loaded.scenario.joint_for(case.as_ref())?;
        demand_bounds.push(bounds::bounds_for_case(
            &joint,
            Scenario::demand_label(case.as_ref()),
            budget,
        ));
    }
    let full = bounds::assemble_report(budget, demand_bounds);
    let per_demand = full
        .per_demand
        .iter()
        .map(|d| DemandReport {
            demand: d.demand.clone(),
            exact: None,
            coupling: None,
            bounds: Some(d.entries.clone()),
            best_bound_within_budget: d.best_within_budget,
            simulation: None,
        })
        .collect();
    Ok(RunReport {
        provenance,
        scenario: summarize(loaded),
        per_demand,
        worst_case: Some(worst_case_report(&full)),
    })
}

/// The two-part code pads the private symbol over its own alphabet, so the
/// declared shared key must be at least that large.
fn require_codec_key(loaded: &LoadedScenario) -> CliResult<()> {
    let x = loaded.scenario.x_size() as u64;
    let key = loaded.scenario.key_size();
    if key < x {
        return Err(CliError::Validation(format!(
            "declared key size {key} is smaller than the private alphabet {x}; the two-part code pads over the private alphabet"
        )));
    }
    Ok(())
}

fn exact_report(ctx: &DemandContext, with_otp: bool) -> CliResult<ExactReport> {
    let tuples = ctx.exact_tuple_count()?;
    if tuples > EXACT_TUPLE_LIMIT {
        return Err(CliError::SizeLimit(format!(
            "{tuples} exhaustive tuples exceed {EXACT_TUPLE_LIMIT}; rerun with --mode mc:<samples>"
        )));
    }
    let leakage = exact_leakage(ctx, with_otp)?;
    let lossless = verify_losslessness(ctx)?;
    let (exact_len, len_bits) = codec::expected_length(ctx)?;
    let part1 = ceil_log2(ctx.x_size);
    Ok(ExactReport {
        expected_length_bits: len_bits,
        expected_length_exact: exact_len.to_string(),
        part1_bits: part1,
        part2_expected_bits: len_bits - part1 as f64,
        leakage_bits: leakage.bits,
        leakage_exactly_zero: leakage.exactly_zero,
        lossless: lossless.ok,
        tuples_checked: lossless.tuples_checked,
        failure: lossless.failure,
    })
}

/// Exhaustive losslessness and exact leakage per demand case. In sampling
/// mode, runs the seeded simulator with a per-sample decode check instead.
pub fn cmd_verify(
    loaded: &LoadedScenario,
    provenance: Provenance,
    with_otp: bool,
) -> CliResult<(RunReport, bool)> {
    require_codec_key(loaded)?;
    if let ModeSpec::Montecarlo { samples, seed } = effective_mode(loaded, &provenance) {
        let (report, failed) = simulate(loaded, provenance, samples, seed)?;
        return Ok((report, failed));
    }
    let mut per_demand = Vec::new();
    let mut failed = false;
    for case in &loaded.demands {
        let ctx = build_demand_context(&loaded.scenario, case.as_ref())?;
        let exact = exact_report(&ctx, with_otp)?;
        failed |= !exact.lossless || !exact.leakage_exactly_zero;
        per_demand.push(DemandReport {
            demand: ctx.label.clone(),
            exact: Some(exact),
            coupling: None,
            bounds: None,
            best_bound_within_budget: None,
            simulation: None,
        });
    }
    let report = RunReport {
        provenance,
        scenario: summarize(loaded),
        per_demand,
        worst_case: None,
    };
    Ok((report, failed))
}

fn effective_mode(loaded: &LoadedScenario, provenance: &Provenance) -> ModeSpec {
    match (loaded.mode, provenance.seed) {
        (ModeSpec::Montecarlo { samples, .. }, Some(seed)) => {
            ModeSpec::Montecarlo { samples, seed }
        }
        (mode, _) => mode,
    }
}

/// Seeded Monte Carlo run of the encoder/decoder over every selected demand.
pub fn cmd_simulate(
    loaded: &LoadedScenario,
    provenance: Provenance,
) -> CliResult<(RunReport, bool)> {
    require_codec_key(loaded)?;
    let (samples, seed) = match effective_mode(loaded, &provenance) {
        ModeSpec::Montecarlo { samples, seed } => (samples, seed),
        ModeSpec::Exact => {
            return Err(CliError::Validation(
                "simulate requires sampling mode: set mode.montecarlo in the scenario or pass --mode mc:<samples> (and --seed)".into(),
            ));
        }
    };
    simulate(loaded, provenance, samples, seed)
}

fn simulate(
    loaded: &LoadedScenario,
    provenance: Provenance,
    samples: u64,
    seed: u64,
) -> CliResult<(RunReport, bool)> {
    let mut per_demand = Vec::new();
    let mut failed = false;
    for (index, case) in loaded.demands.iter().enumerate() {
        let ctx = build_demand_context(&loaded.scenario, case.as_ref())?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let sim = simulate_demand(&ctx, samples, &mut rng)?;
        failed |= sim.decode_failures > 0;
        per_demand.push(DemandReport {
            demand: ctx.label.clone(),
            exact: None,
            coupling: None,
            bounds: None,
            best_bound_within_budget: None,
            simulation: Some(sim),
        });
    }
    let report = RunReport {
        provenance,
        scenario: summarize(loaded),
        per_demand,
        worst_case: None,
    };
    Ok((report, failed))
}

fn simulate_demand(
    ctx: &DemandContext,
    samples: u64,
    rng: &mut ChaCha12Rng,
) -> CliResult<SimulationReport> {
    let states = ctx.positive_states()?;
    let weights: Vec<f64> = states.iter().map(|s| to_f64(&s.mass)).collect();
    let (exact_ratio, exact_len) = codec::expected_length(ctx)?;
    let exact_expected_length = exact_ratio.to_string();
    if samples == 0 {
        return Ok(SimulationReport {
            samples: 0,
            mean_length_bits: None,
            std_dev_bits: None,
            std_err_bits: None,
            decode_failures: 0,
            exact_expected_length_bits: exact_len,
            exact_expected_length,
        });
    }
    let state_index = WeightedIndex::new(&weights)
        .map_err(|e| CliError::Validation(format!("degenerate state distribution: {e}")))?;
    let t = ctx.x_size as u64;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut decode_failures = 0u64;
    for _ in 0..samples {
        let state = &states[state_index.sample(rng)];
        let key = SharedKey::new(rng.random_range(0..t), t).map_err(CliError::from)?;
        let cw = encode_response(ctx, state.x, state.cprime, &key, rng)?;
        let len = cw.len_bits() as f64;
        sum += len;
        sum_sq += len * len;
        match decode_response(ctx, &cw, &key) {
            Ok((x, c)) if x == state.x && c == state.cprime => {}
            _ => decode_failures += 1,
        }
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = if samples > 1 {
        ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let std_dev = variance.sqrt();
    Ok(SimulationReport {
        samples,
        mean_length_bits: Some(mean),
        std_dev_bits: Some(std_dev),
        std_err_bits: Some(std_dev / n.sqrt()),
        decode_failures,
        exact_expected_length_bits: exact_len,
        exact_expected_length,
    })
}

fn coupling_report(ctx: &DemandContext) -> CliResult<CouplingReport> {
    let qstar = greedy_qstar(&ctx.kernel)?;
    let atoms = ctx.frep.atom_masses();
    let mut atom_reports = Vec::new();
    let mut codewords = Vec::new();
    for u in 0..ctx.frep.num_atoms() {
        atom_reports.push(AtomReport {
            mass: atoms.mass(u).to_string(),
            outcome_per_x: (0..ctx.x_size).map(|x| ctx.frep.outcome(u, x)).collect(),
        });
        codewords.push(privcache_core::bits::bits_to_string(
            ctx.code.codeword(u)?,
        ));
    }
    Ok(CouplingReport {
        message_alphabet: ctx.joint_xc.cols(),
        message_support: ctx.joint_xc.col_marginal().support_size(),
        qstar_masses: qstar.masses().map(|m| m.to_string()).collect(),
        qstar_entropy_bits: qstar.entropy_bits(),
        atoms: atom_reports,
        atom_entropy_bits: atoms.entropy_bits(),
        codewords,
    })
}

/// Full pipeline per demand: coupling details, exhaustive verification, and
/// every bound, plus the worst case.
pub fn cmd_analyze(
    loaded: &LoadedScenario,
    provenance: Provenance,
    with_otp: bool,
) -> CliResult<(RunReport, bool)> {
    require_codec_key(loaded)?;
    let budget = loaded.scenario.key_size();
    let mut per_demand = Vec::new();
    let mut demand_bounds = Vec::new();
    let mut failed = false;
    for case in &loaded.demands {
        let ctx = build_demand_context(&loaded.scenario, case.as_ref())?;
        let exact = exact_report(&ctx, with_otp)?;
        failed |= !exact.lossless || !exact.leakage_exactly_zero;
        let joint = loaded.scenario.joint_for(case.as_ref())?;
        let case_bounds = bounds::bounds_for_case(&joint, ctx.label.clone(), budget);
        per_demand.push(DemandReport {
            demand: ctx.label.clone(),
            exact: Some(exact),
            coupling: Some(coupling_report(&ctx)?),
            bounds: Some(case_bounds.entries.clone()),
            best_bound_within_budget: case_bounds.best_within_budget,
            simulation: None,
        });
        demand_bounds.push(case_bounds);
    }
    let full = bounds::assemble_report(budget, demand_bounds);
    let report = RunReport {
        provenance,
        scenario: summarize(loaded),
        per_demand,
        worst_case: Some(worst_case_report(&full)),
    };
    Ok((report, failed))
}
