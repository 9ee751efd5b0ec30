//! Synthetic cohorts whose consistency rates are known in advance.
#![allow(dead_code)]

use std::time::Instant;

use budgetpoll_core::agents::{run_cohort, sample_ideals, AgentSpec, CohortOutput};
use budgetpoll_core::analysis::{
    classify, consistency_by_lambda, peak_linear_consistency, preference_matrices, symmetry_consistency,
    AnalysisOptions, MatrixClass, Rate, SymmetryMode,
};
use budgetpoll_core::generators::BatteryConfig;
use budgetpoll_core::rng::stream;
use budgetpoll_core::{BatteryKind, UtilityModel};
use rand::Rng;

pub type Outcome = Result<String, String>;

pub const COHORT: usize = 40;

const SKIP_TIES: AnalysisOptions = AnalysisOptions { skip_tie_broken: true };

fn cohort(model: &UtilityModel, kind: BatteryKind, n: usize, noise: f64, seed: u64) -> Result<CohortOutput, String> {
    let all_positive = model.requires_all_positive() || BatteryConfig::default_for(kind).generator.requires_all_positive();
    let agents: Vec<AgentSpec> = sample_ideals(n, seed, all_positive)
        .into_iter()
        .map(|ideal| AgentSpec::new(ideal, model.clone()).with_noise(noise))
        .collect();
    let out = run_cohort(&agents, &BatteryConfig::default_for(kind), seed);
    match out.failures.first() {
        Some(f) => Err(format!("{:?} on {kind}: {f}", model.kind())),
        None => Ok(out),
    }
}

fn pooled<'a>(rates: impl IntoIterator<Item = &'a Rate>) -> Rate {
    rates.into_iter().fold(Rate::default(), |acc, r| Rate::new(acc.consistent + r.consistent, acc.total + r.total))
}

fn perfect(label: &str, rate: Rate) -> Result<(), String> {
    if rate.is_perfect() {
        Ok(())
    } else {
        Err(format!("{label}: {} of {}", rate.consistent, rate.total))
    }
}

/// Generic weights in `[lo, hi)` with six decimals, so exact ties are unlikely.
fn weights<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> [f64; 3] {
    std::array::from_fn(|_| (rng.random_range(lo..hi) * 1e6).round() / 1e6)
}

/// Noise-free L1, L2 and Leontief agents agree with every convex blend and
/// every peak-linear baseline.
pub fn distance_models(seed: u64) -> Outcome {
    let mut answers = 0;
    for model in [UtilityModel::L1, UtilityModel::L2, UtilityModel::Leontief] {
        let sp = cohort(&model, BatteryKind::SinglePeaked, COHORT, 0.0, seed)?;
        let rows = consistency_by_lambda(&sp.records, &SKIP_TIES).map_err(|e| e.to_string())?;
        for row in &rows {
            perfect(&format!("{} single-peaked λ={}", model.kind(), row.lambda), row.rate)?;
        }
        answers += pooled(rows.iter().map(|r| &r.rate)).total;

        let pl = cohort(&model, BatteryKind::PeakLinear, COHORT, 0.0, seed)?;
        let result = peak_linear_consistency(&pl.records, &SKIP_TIES).map_err(|e| e.to_string())?;
        perfect(&format!("{} peak-linear", model.kind()), result.overall())?;
        answers += result.overall().total;
    }
    Ok(format!("3 models, {answers} comparisons, all consistent"))
}

/// Noise-free L1 agents answer every rotated and every negated set alike.
pub fn l1_symmetry(seed: u64) -> Outcome {
    let mut parts = Vec::new();
    for (kind, mode) in [
        (BatteryKind::ProjectSymmetry, SymmetryMode::Project),
        (BatteryKind::SignSymmetry, SymmetryMode::Sign),
    ] {
        let out = cohort(&UtilityModel::L1, kind, COHORT, 0.0, seed)?;
        let rates = symmetry_consistency(&out.records, mode, &SKIP_TIES).map_err(|e| e.to_string())?;
        let rate = pooled(rates.values());
        perfect(mode.label(), rate)?;
        parts.push(format!("{} {} sets", mode.label().to_lowercase(), rate.total));
    }
    Ok(parts.join(", "))
}

/// Agents under the weighted model keep one answer per issue across all
/// magnitudes; agents under the exponent model switch at most once.
pub fn asymmetric_models(seed: u64) -> Outcome {
    let mut rng = stream(seed, "asymmetric-weights", 0);
    let ideals = sample_ideals(COHORT, seed, true);
    let config = BatteryConfig::default_for(BatteryKind::ConcentratedVsDistributed);
    let weighted: Vec<AgentSpec> = ideals
        .iter()
        .map(|ideal| {
            let model = UtilityModel::WeightedAsymmetric {
                gain_weights: weights(&mut rng, -2.0, -0.5),
                loss_weights: weights(&mut rng, -2.0, -0.5),
            };
            AgentSpec::new(ideal.clone(), model)
        })
        .collect();
    let monotone: Vec<AgentSpec> = ideals
        .iter()
        .map(|ideal| {
            let model = UtilityModel::MonotoneAsymmetric {
                gain_weights: weights(&mut rng, 0.5, 2.0),
                loss_weights: weights(&mut rng, 0.5, 2.0),
                gain_exponent: 1.0,
                loss_exponent: 2.0,
            };
            AgentSpec::new(ideal.clone(), model)
        })
        .collect();

    let matrices = |agents: &[AgentSpec]| {
        let out = run_cohort(agents, &config, seed);
        if let Some(f) = out.failures.first() {
            return Err(f.to_string());
        }
        preference_matrices(&out.records, &AnalysisOptions::default()).map_err(|e| e.to_string())
    };
    let w = matrices(&weighted)?;
    let fully = w.iter().filter(|m| classify(m) == MatrixClass::FullyConsistent).count();
    if fully != COHORT || w.len() != COHORT {
        return Err(format!("weighted: {fully} of {} fully consistent", w.len()));
    }
    let m = matrices(&monotone)?;
    let monotone_count = m.iter().filter(|m| m.is_monotone()).count();
    if monotone_count != COHORT || m.len() != COHORT {
        return Err(format!("exponent model: {monotone_count} of {} monotone", m.len()));
    }
    let switching = m.iter().filter(|m| classify(m) != MatrixClass::FullyConsistent).count();
    Ok(format!(
        "weighted {fully}/{COHORT} fully consistent, exponent model {monotone_count}/{COHORT} monotone ({switching} switch)"
    ))
}

/// With ε = 0.5 an L1 agent answers a binary question by its utility with
/// probability 1/2 and by a fair coin otherwise, so the blend is picked with
/// probability 3/4.
pub fn noisy_rate(seed: u64) -> Outcome {
    const AGENTS: usize = 1_200;
    let out = cohort(&UtilityModel::L1, BatteryKind::SinglePeaked, AGENTS, 0.5, seed)?;
    let rows = consistency_by_lambda(&out.records, &AnalysisOptions::default()).map_err(|e| e.to_string())?;
    let rate = pooled(rows.iter().map(|r| &r.rate));
    if rate.total < 10_000 {
        return Err(format!("only {} answers", rate.total));
    }
    let r = rate.to_f64();
    if !(0.72..=0.78).contains(&r) {
        return Err(format!("rate {r:.4} over {} answers", rate.total));
    }
    Ok(format!("rate {r:.4} over {} answers", rate.total))
}

/// All synthetic-agent oracles with the runtime budget.
pub fn run(seed: u64) -> Outcome {
    let start = Instant::now();
    let parts = [distance_models(seed)?, l1_symmetry(seed)?, asymmetric_models(seed)?, noisy_rate(seed)?];
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 120 {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} in {elapsed:?}", parts.join("; ")))
}
