//! Invariants every generated battery must satisfy, checked over many seeded
//! ideals with oracles written independently of the library's utility code.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::Instant;

use budgetpoll_core::agents::sample_ideals;
use budgetpoll_core::domain::{BudgetAllocation, IdealBudget};
use budgetpoll_core::generators::{build_battery, BatteryConfig, GenError, GeneratorConfig};
use budgetpoll_core::question::{Generator, Question, QuestionOptions};
use budgetpoll_core::rng::derive_seed;
use budgetpoll_core::{BatteryKind, ModelKind, UtilityModel};

/// Entries in hundredths of a point.
fn cents(a: &BudgetAllocation) -> [i64; 3] {
    a.entries().map(|e| e.hundredths())
}

/// Compares how much `p`'s holder likes `x` versus `y`.
fn oracle_cmp(model: ModelKind, p: [i64; 3], x: [i64; 3], y: [i64; 3]) -> Ordering {
    match model {
        // smaller distance is better
        ModelKind::L1 => {
            let d = |q: [i64; 3]| (0..3).map(|j| (q[j] - p[j]).abs()).sum::<i64>();
            d(y).cmp(&d(x))
        }
        ModelKind::L2 => {
            let d = |q: [i64; 3]| (0..3).map(|j| (q[j] - p[j]).pow(2)).sum::<i64>();
            d(y).cmp(&d(x))
        }
        ModelKind::Leontief => {
            // min ratio as a fraction (num, den), compared by cross-multiplying
            let m = |q: [i64; 3]| {
                (0..3)
                    .map(|j| (q[j] as i128, p[j] as i128))
                    .reduce(|a, b| if a.0 * b.1 <= b.0 * a.1 { a } else { b })
                    .unwrap()
            };
            let (a, b) = (m(x), m(y));
            (a.0 * b.1).cmp(&(b.0 * a.1))
        }
        other => panic!("no oracle for {other}"),
    }
}

fn check_allocation(a: &BudgetAllocation) -> Result<(), String> {
    let c = cents(a);
    if c.iter().all(|&v| (0..=10_000).contains(&v)) && c.iter().sum::<i64>() == 10_000 {
        Ok(())
    } else {
        Err(format!("invalid allocation {c:?}"))
    }
}

fn add(x: [i64; 3], y: [i64; 3]) -> [i64; 3] {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
}

fn check_question(q: &Question, p: [i64; 3], config: &GeneratorConfig) -> Result<(), String> {
    for a in q.all_allocations() {
        check_allocation(&a)?;
    }
    let distinct = match &q.options {
        QuestionOptions::Allocations(v) => (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j])),
        QuestionOptions::Biennial(v) => v[0] != v[1],
    };
    if !distinct {
        return Err(format!("{}: repeated option", q.id));
    }
    if q.is_alertness {
        return Ok(());
    }
    let prov = &q.provenance;
    let alloc = |i: usize| cents(&q.generator_allocation(i).unwrap());
    match prov.generator {
        Generator::ModelDisagreement => {
            let [ma, mb] = prov.models.ok_or("missing models")?;
            if oracle_cmp(ma, p, alloc(0), alloc(1)) != Ordering::Greater
                || oracle_cmp(mb, p, alloc(0), alloc(1)) != Ordering::Less
            {
                return Err(format!("{}: {ma} and {mb} do not disagree as labelled", q.id));
            }
        }
        Generator::ConcentratedVsDistributed if !prov.fallback => {
            if add(alloc(0), alloc(1)) != p.map(|v| 2 * v) {
                return Err(format!("{}: options do not reflect through the ideal", q.id));
            }
        }
        Generator::Biennial | Generator::TriangleSplit if prov.screening || prov.generator == Generator::Biennial => {
            let o = |i: usize| q.generator_biennial(i).unwrap();
            let (first, balancing) = (o(0), o(1));
            let sum = add(cents(&balancing.year1), cents(&balancing.year2));
            let ideal_first = [cents(&first.year1), cents(&first.year2)].contains(&p);
            let averages = sum == p.map(|v| 2 * v);
            let sub_poll = prov.sub_poll.ok_or("missing sub-poll")?;
            if !ideal_first || (sub_poll > 1 && !averages) {
                return Err(format!("{}: sub-poll {sub_poll} options are not balanced", q.id));
            }
        }
        Generator::TriangleSplit => {
            let o = |i: usize| q.generator_biennial(i).unwrap();
            let (concentrated, split) = (o(0), o(1));
            if cents(&concentrated.year1) != p {
                return Err(format!("{}: concentrated option does not start at the ideal", q.id));
            }
            // (p + q1) + (p + q2) = p + (p + q)
            if add(cents(&split.year1), cents(&split.year2)) != add(p, cents(&concentrated.year2)) {
                return Err(format!("{}: q is not q1 + q2", q.id));
            }
            if cents(&split.year1) == p || cents(&split.year2) == p {
                return Err(format!("{}: a split part is zero", q.id));
            }
        }
        _ => {}
    }
    if let GeneratorConfig::SinglePeakedRounded { .. } = config {
        if !q.generator_allocation(1).unwrap().is_grid5() {
            return Err(format!("{}: rounded option is off the grid", q.id));
        }
    }
    Ok(())
}

/// Tallies for one generator configuration.
#[derive(Debug, Default)]
pub struct Tally {
    pub batteries: usize,
    pub questions: usize,
    pub violations: Vec<String>,
    pub errors: BTreeMap<String, usize>,
}

fn error_kind(e: &GenError) -> String {
    let s = format!("{e:?}");
    s.split([' ', '(', '{']).next().unwrap_or("").to_string()
}

/// Builds and checks one battery per ideal.
pub fn check_config(config: &GeneratorConfig, n: usize, seed: u64) -> Tally {
    let all_positive = config.requires_all_positive()
        || matches!(config, GeneratorConfig::ModelDisagreement { model_a, model_b, .. }
            if *model_a == UtilityModel::Leontief || *model_b == UtilityModel::Leontief);
    let ideals = sample_ideals(n, seed, all_positive);
    let battery_config = BatteryConfig::new(config.clone());
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = ideals.len().div_ceil(threads).max(1);
    let parts: Vec<Tally> = std::thread::scope(|s| {
        let handles: Vec<_> = ideals
            .chunks(chunk)
            .enumerate()
            .map(|(c, ideals)| {
                let battery_config = &battery_config;
                s.spawn(move || {
                    let mut t = Tally::default();
                    for (i, ideal) in ideals.iter().enumerate() {
                        check_one(ideal, battery_config, derive_seed(seed, "battery", (c * chunk + i) as u64), &mut t);
                    }
                    t
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut total = Tally::default();
    for t in parts {
        total.batteries += t.batteries;
        total.questions += t.questions;
        total.violations.extend(t.violations);
        for (k, v) in t.errors {
            *total.errors.entry(k).or_default() += v;
        }
    }
    total
}

fn check_one(ideal: &IdealBudget, config: &BatteryConfig, seed: u64, t: &mut Tally) {
    let p = cents(ideal.peak());
    match build_battery(ideal, config, seed) {
        Ok(battery) => {
            t.batteries += 1;
            t.questions += battery.len();
            if battery.len() != config.battery_len() {
                t.violations.push(format!("{p:?}: {} questions", battery.len()));
            }
            for q in &battery.questions {
                if let Err(e) = check_question(q, p, &config.generator) {
                    t.violations.push(format!("ideal {p:?}: {e}"));
                }
            }
        }
        Err(e) => *t.errors.entry(error_kind(&e)).or_default() += 1,
    }
}

/// Every generator, including each head-to-head model pairing.
pub fn all_configs() -> Vec<(String, GeneratorConfig)> {
    let mut out = Vec::new();
    for (a, b) in [
        (UtilityModel::L1, UtilityModel::L2),
        (UtilityModel::L1, UtilityModel::Leontief),
        (UtilityModel::L2, UtilityModel::Leontief),
    ] {
        out.push((
            format!("model_disagreement({} vs {})", a.kind(), b.kind()),
            GeneratorConfig::ModelDisagreement { model_a: a, model_b: b, k: 10 },
        ));
    }
    for kind in BatteryKind::ALL {
        if kind != BatteryKind::ModelDisagreement {
            out.push((kind.as_str().to_string(), GeneratorConfig::default_for(kind)));
        }
    }
    out
}

/// Runs every configuration over `n` ideals. Fails on any invalid
/// allocation, violated invariant or generation error.
pub fn run(n: usize, seed: u64) -> Result<String, String> {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (name, config) in all_configs() {
        let t = check_config(&config, n, seed);
        lines.push(format!("{name}: {} batteries, {} questions", t.batteries, t.questions));
        if !t.errors.is_empty() {
            failures.push(format!("{name}: generation errors {:?}", t.errors));
        }
        if let Some(v) = t.violations.first() {
            failures.push(format!("{name}: {} violations, first: {v}", t.violations.len()));
        }
    }
    if !failures.is_empty() {
        return Err(failures.join("\n"));
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 60 {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} generators in {elapsed:?}\n{}", lines.len(), lines.join("\n")))
}
