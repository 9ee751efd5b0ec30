//! Response-set fixtures whose aggregate counts reproduce published result
//! tables. Shared by the integration and acceptance tests.
#![allow(dead_code)]

use budgetpoll_core::analysis::{
    analyze_all, biennial_consistency, disagreement_rates, majority_winner, peak_linear_consistency,
    ranking_consistency, threshold_summary, transitivity_cycle_detect, transitivity_summary,
    AnalysisError, AnalysisOptions, PollWinner, RankingSummary, Rate,
};
use budgetpoll_core::question::{Generator, Provenance, QuestionKind, ShiftDirection};
use budgetpoll_core::{Answer, BatteryKind, ModelKind, ResponseRecord, Weight};

pub fn w(h: u8) -> Weight {
    Weight::from_hundredths(h).unwrap()
}

pub fn record(
    pid: &str,
    qid: String,
    battery_kind: BatteryKind,
    provenance: Provenance,
    answer: Answer,
) -> ResponseRecord {
    let question_kind = match (&answer, battery_kind) {
        (Answer::Ranking(_), _) => QuestionKind::Ranking,
        (_, BatteryKind::Biennial | BatteryKind::TriangleSplit) => QuestionKind::Biennial,
        _ => QuestionKind::Pairwise,
    };
    ResponseRecord {
        participant_id: pid.to_string(),
        session_id: None,
        question_id: qid,
        battery_kind,
        question_kind,
        provenance,
        is_alertness: false,
        answer: answer.clone(),
        generator_answer: answer,
        tie_broken: false,
        received_at: None,
        answered_at: None,
    }
}

fn pid(prefix: &str, i: usize) -> String {
    format!("{prefix}{i:03}")
}

/// 44 participants, ten L1-versus-L2 answers each. The number of L1 answers
/// per participant is listed with the participant count.
pub fn disagreement_l1_l2() -> Vec<ResponseRecord> {
    let spec = [(10, 2), (7, 4), (6, 3), (5, 3), (4, 5), (3, 11), (2, 4), (1, 8), (0, 4)];
    let mut out = Vec::new();
    let mut i = 0;
    for (l1, count) in spec {
        for _ in 0..count {
            for q in 0..10 {
                let mut prov = Provenance::new(Generator::ModelDisagreement);
                prov.models = Some([ModelKind::L1, ModelKind::L2]);
                let choice = if q < l1 { 0 } else { 1 };
                out.push(record(
                    &pid("d", i),
                    format!("q{q:02}"),
                    BatteryKind::ModelDisagreement,
                    prov,
                    Answer::Choice(choice),
                ));
            }
            i += 1;
        }
    }
    out
}

/// 71 participants with ten convex-combination answers each; the consistent
/// count per λ is given, λ = 0.5 appearing twice.
pub fn convex_by_lambda() -> Vec<ResponseRecord> {
    let lambdas = [10, 20, 30, 40, 50, 50, 60, 70, 80, 90];
    let consistent = [55, 64, 66, 60, 65, 65, 65, 64, 63, 65];
    let mut out = Vec::new();
    for i in 0..71 {
        for (q, (&l, &c)) in lambdas.iter().zip(&consistent).enumerate() {
            let mut prov = Provenance::new(Generator::ConvexCombination);
            prov.lambda = Some(w(l));
            out.push(record(
                &pid("c", i),
                format!("q{q:02}"),
                BatteryKind::SinglePeaked,
                prov,
                Answer::Choice(if i < c { 1 } else { 0 }),
            ));
        }
    }
    out
}

/// 44 participants; consistent counts per λ row and extreme pair.
pub fn peak_linear() -> Vec<ResponseRecord> {
    let pairs = [[0, 1], [0, 2], [1, 2]];
    let cells = [(25, [30, 32, 31]), (50, [35, 37, 35]), (75, [40, 35, 35])];
    let mut out = Vec::new();
    for i in 0..44 {
        let p = pid("l", i);
        let mut q = 0;
        let mut push = |lambda: Option<u8>, pair: [usize; 2], choice: usize| {
            let mut prov = Provenance::new(Generator::PeakLinear);
            prov.lambda = lambda.map(w);
            prov.pair = Some(pair);
            out.push(record(&p, format!("q{q:02}"), BatteryKind::PeakLinear, prov, Answer::Choice(choice)));
            q += 1;
        };
        for pair in pairs {
            push(None, pair, 0);
        }
        for (lambda, counts) in cells {
            for (pair, c) in pairs.iter().zip(counts) {
                push(Some(lambda), *pair, if i < c { 0 } else { 1 });
            }
        }
    }
    out
}

/// 37 participants with four rankings each: 7 consistent in all three
/// relations, 9 in two, 11 in one and 10 in none.
pub fn rankings() -> Vec<ResponseRecord> {
    let groups: [(usize, [usize; 3]); 4] = [
        (7, [0, 1, 2]),
        (9, [1, 0, 2]),
        (11, [1, 2, 0]),
        (10, [2, 1, 0]),
    ];
    let mut out = Vec::new();
    let mut i = 0;
    for (count, last) in groups {
        for _ in 0..count {
            for q in 0..4 {
                let mut prov = Provenance::new(Generator::CyclicRanking);
                prov.direction = Some(if q < 2 { ShiftDirection::Pd } else { ShiftDirection::Nd });
                prov.lambda = Some(w(if q % 2 == 0 { 20 } else { 40 }));
                let ranking = if q == 3 { last.to_vec() } else { vec![0, 1, 2] };
                out.push(record(
                    &pid("r", i),
                    format!("q{q:02}"),
                    BatteryKind::CyclicRanking,
                    prov,
                    Answer::Ranking(ranking),
                ));
            }
            i += 1;
        }
    }
    out
}

/// 39 participants with four answers per sub-poll. Each entry is
/// `(participants, answers choosing the first option)`.
pub fn biennial() -> Vec<ResponseRecord> {
    let sub_polls: [&[(usize, usize)]; 3] = [
        &[(2, 2), (10, 3), (2, 1), (24, 4), (1, 0)],
        &[(2, 2), (6, 3), (4, 1), (27, 4)],
        &[(3, 2), (7, 3), (3, 1), (26, 4)],
    ];
    let mut out = Vec::new();
    for (s, groups) in sub_polls.iter().enumerate() {
        let mut i = 0;
        for &(count, first) in groups.iter() {
            for _ in 0..count {
                for round in 0..4 {
                    let mut prov = Provenance::new(Generator::Biennial);
                    prov.sub_poll = Some(s as u8 + 1);
                    prov.set_index = Some(round);
                    out.push(record(
                        &pid("b", i),
                        format!("q{:02}", round * 3 + s),
                        BatteryKind::Biennial,
                        prov,
                        Answer::Choice(if round < first { 0 } else { 1 }),
                    ));
                }
                i += 1;
            }
        }
        assert_eq!(i, 39);
    }
    out
}

/// 34 participants answering the three head-to-head polls on L1, L2 and
/// Leontief, ten questions each: 9 favour L1, 2 favour L2, 10 favour
/// Leontief, 12 prefer a different model in each poll and one splits a poll
/// evenly.
pub fn transitivity_triples() -> Vec<ResponseRecord> {
    use ModelKind::{Leontief, L1, L2};
    // answers favouring the first model of each poll: L1-L2, L2-Leontief, Leontief-L1
    let spec: [([usize; 3], usize); 6] = [
        ([8, 6, 3], 9),
        ([2, 7, 4], 2),
        ([4, 2, 9], 10),
        ([7, 8, 6], 6),
        ([3, 2, 4], 6),
        ([5, 7, 3], 1),
    ];
    let polls = [[L1, L2], [L2, Leontief], [Leontief, L1]];
    let mut out = Vec::new();
    let mut i = 0;
    for (firsts, count) in spec {
        for _ in 0..count {
            for (models, first) in polls.iter().zip(firsts) {
                for q in 0..10 {
                    let mut prov = Provenance::new(Generator::ModelDisagreement);
                    prov.models = Some(*models);
                    out.push(record(
                        &pid("t", i),
                        format!("{}_{}_q{q:02}", models[0], models[1]),
                        BatteryKind::ModelDisagreement,
                        prov,
                        Answer::Choice(usize::from(q >= first)),
                    ));
                }
            }
            i += 1;
        }
    }
    out
}

pub fn golden(name: &str) -> String {
    let path = format!("{}/../core/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn matches(name: &str, got: String) -> Result<(), String> {
    let want = golden(name);
    if got == want {
        Ok(())
    } else {
        Err(format!("{name} differs:\n{got}\nexpected:\n{want}"))
    }
}

/// Renders every fixture and compares it with its golden file, then checks
/// the transitivity counts and a cyclic participant.
pub fn golden_tables() -> Result<String, String> {
    let opts = AnalysisOptions::default();
    let err = |e: AnalysisError| e.to_string();

    let rates = disagreement_rates(&disagreement_l1_l2(), &opts).map_err(err)?;
    let per = rates.get(&[ModelKind::L1, ModelKind::L2]).ok_or("no L1 vs L2 rates")?;
    let table = threshold_summary(per, "L1", "L2").map_err(err)?.to_table("t");
    matches("thresholds_l1_vs_l2.md", table.to_markdown())?;

    let report = analyze_all(&convex_by_lambda(), None, &opts).map_err(err)?;
    matches("lambda.md", report.tables.first().ok_or("no lambda table")?.to_markdown())?;

    let result = peak_linear_consistency(&peak_linear(), &opts).map_err(err)?;
    matches("peak_linear.md", result.to_table("p").to_markdown())?;

    let counts = ranking_consistency(&rankings(), &opts).map_err(err)?;
    matches("ranking.md", RankingSummary::from_counts(&counts).to_table("r").to_markdown())?;

    let result = biennial_consistency(&biennial(), &opts).map_err(err)?;
    let mut md = Vec::new();
    for s in 1..=3 {
        md.push(result.sub_poll_table("b", s).ok_or("missing sub-poll")?.to_markdown());
    }
    md.push(result.cumulative_table("c").to_markdown());
    matches("biennial.md", md.join("\n"))?;

    let rates = disagreement_rates(&transitivity_triples(), &opts).map_err(err)?;
    let rows = transitivity_summary(&rates);
    let row = rows.first().ok_or("no transitivity row")?;
    let counts = (row.participants, row.transitive, row.cyclic, row.undecided);
    if rows.len() != 1 || counts != (34, 21, 12, 1) {
        return Err(format!("transitivity counts {counts:?}"));
    }
    // 7 of 10 for L1 over L2, 8 for L2 over Leontief, 6 for Leontief over L1
    let win = |models: [ModelKind; 2], first: usize| majority_winner(models, &Rate::new(first, 10));
    let polls: [PollWinner; 3] = [
        win([ModelKind::L1, ModelKind::L2], 7),
        win([ModelKind::L2, ModelKind::Leontief], 8),
        win([ModelKind::Leontief, ModelKind::L1], 6),
    ];
    let cycle = transitivity_cycle_detect(&polls).map_err(err)?;
    if cycle != Some([ModelKind::L1, ModelKind::L2, ModelKind::Leontief]) {
        return Err(format!("cycle {cycle:?}"));
    }
    Ok("5 tables match; 34 participants: 21 transitive, 12 cyclic, 1 undecided".into())
}
