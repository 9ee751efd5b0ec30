//! End-to-end scenarios driven through the HTTP router. Each returns a short
//! summary or the first discrepancy.

use budgetpoll_core::agents::{answer_seed, run_cohort, sample_ideals, AgentSpec};
use budgetpoll_core::analysis::{analyze_all, render_report, AnalysisOptions, ReportFormat};
use budgetpoll_core::domain::{BudgetAllocation, IdealBudget};
use budgetpoll_core::generators::BatteryConfig;
use budgetpoll_core::response::read_ndjson;
use budgetpoll_core::rng::rng_from_seed;
use budgetpoll_core::{BatteryKind, UtilityModel};
use budgetpoll_service::{NextQuestion, PollService, ServiceConfig};
use serde_json::{json, Value};

use super::{Client, ADMIN};

pub type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ideal(id: &str, points: [i64; 3]) -> IdealBudget {
    IdealBudget::new(id, BudgetAllocation::from_points(points).unwrap()).unwrap()
}

fn position_of(view: &Value, ideal: &Value) -> Option<usize> {
    view["options"].as_array()?.iter().position(|o| o == ideal)
}

/// A twelve-question biennial session served in sub-poll order 1, 2, 3, 1...
pub async fn biennial_session() -> Outcome {
    let c = Client::in_memory();
    let poll = c.create_poll(json!({"kind": "biennial", "k": 4, "alertness": false, "seed": 11})).await;
    let (sid, token) = c.start(&poll, "p1").await.map_err(|r| r.text)?;
    let r = c.post(&format!("/sessions/{sid}/ideal"), Some(&token), json!({"ideal": [50, 30, 20]})).await;
    ensure(r.status == 200 && r.json["total"] == 12, || format!("ideal: {} {}", r.status, r.text))?;
    for i in 0..12 {
        let next = c.get(&format!("/sessions/{sid}/next"), Some(&token)).await;
        let q = &next.json["question"];
        ensure(next.json["state"] == "active" && q["index"] == i && q["kind"] == "biennial", || {
            format!("question {i}: {}", next.text)
        })?;
        let ack = c
            .post(
                &format!("/sessions/{sid}/answers"),
                Some(&token),
                json!({"question_id": q["id"], "answer": {"choice": 0}}),
            )
            .await;
        ensure(ack.status == 200 && ack.json["cursor"] == i + 1, || format!("answer {i}: {}", ack.text))?;
    }
    let next = c.get(&format!("/sessions/{sid}/next"), Some(&token)).await;
    ensure(next.json["state"] == "completed", || format!("after 12 answers: {}", next.text))?;

    let (header, records) = read_ndjson(c.export(&poll).await.as_bytes()).map_err(|e| e.to_string())?;
    let state = header.map(|h| h.participants[0].state.clone());
    ensure(state.as_deref() == Some("completed"), || format!("exported state {state:?}"))?;
    let sub_polls: Vec<Option<u8>> = records.iter().map(|r| r.provenance.sub_poll).collect();
    let expected: Vec<Option<u8>> = (0..12).map(|i| Some(i % 3 + 1)).collect();
    ensure(sub_polls == expected, || format!("sub-poll order {sub_polls:?}"))?;
    ensure(
        records.iter().all(|r| r.received_at.is_some() && r.received_at <= r.answered_at),
        || "answer timestamps out of order".into(),
    )?;
    Ok("12 answers, sub-polls 1,2,3 × 4".into())
}

/// Failing the first alertness check blocks the session and any later one.
pub async fn alertness_block() -> Outcome {
    let c = Client::in_memory();
    let poll = c.create_poll(json!({"kind": "peak_linear"})).await;
    let other = c.create_poll(json!({"kind": "peak_linear"})).await;
    let (sid, token) = c.start(&poll, "careless").await.map_err(|r| r.text)?;
    let ideal = json!([40, 35, 25]);
    let r = c.post(&format!("/sessions/{sid}/ideal"), Some(&token), json!({"ideal": ideal})).await;
    ensure(r.status == 200, || r.text.clone())?;
    let mut answered = 0;
    loop {
        let next = c.get(&format!("/sessions/{sid}/next"), Some(&token)).await;
        let q = &next.json["question"];
        let check = position_of(q, &ideal);
        let pick = check.map_or(0, |i| 1 - i);
        let ack = c
            .post(
                &format!("/sessions/{sid}/answers"),
                Some(&token),
                json!({"question_id": q["id"], "answer": {"choice": pick}}),
            )
            .await;
        answered += 1;
        ensure(ack.status == 200, || ack.text.clone())?;
        if check.is_some() {
            ensure(ack.json["state"] == "blocked", || format!("after failing the check: {}", ack.text))?;
            break;
        }
        ensure(ack.json["state"] == "active" && answered < 20, || format!("no check served: {}", ack.text))?;
    }
    let next = c.get(&format!("/sessions/{sid}/next"), Some(&token)).await;
    ensure(next.status == 403 && next.json["error"] == "session_blocked", || next.text.clone())?;
    match c.start(&other, "careless").await {
        Err(r) if r.status == 403 && r.json["error"] == "participant_blocked" => {}
        Err(r) => return Err(format!("second session: {} {}", r.status, r.text)),
        Ok(_) => return Err("second session was allowed".into()),
    }
    let (header, records) = read_ndjson(c.export(&poll).await.as_bytes()).map_err(|e| e.to_string())?;
    let state = header.map(|h| h.participants[0].state.clone());
    ensure(state.as_deref() == Some("blocked"), || format!("exported state {state:?}"))?;
    ensure(records.last().is_some_and(|r| r.is_alertness), || "last record is not the check".into())?;
    Ok(format!("blocked after {answered} answers, second session refused"))
}

/// Reopening a data directory replays the event log to the same state.
pub async fn replay() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = ServiceConfig {
        admin_token: ADMIN.into(),
        data_dir: Some(dir.path().to_path_buf()),
    };
    let c = Client::with_config(config.clone());
    let poll = c.create_poll(json!({"kind": "peak_linear", "seed": 9})).await;
    let closed = c.create_poll(json!({"kind": "biennial", "k": 2})).await;
    let agent = AgentSpec::new(ideal("x", [40, 35, 25]), UtilityModel::L2);
    let state = c.run_agent(&poll, &agent, &mut rng_from_seed(2)).await;
    ensure(state == "completed", || format!("agent ended {state}"))?;
    let (sid, token) = c.start(&poll, "halfway").await.map_err(|r| r.text)?;
    c.post(&format!("/sessions/{sid}/ideal"), Some(&token), json!({"ideal": [60, 20, 20]})).await;
    c.get(&format!("/sessions/{sid}/next"), Some(&token)).await;
    c.post(&format!("/polls/{closed}/close"), Some(ADMIN), json!({})).await;
    let before = c.service.snapshot();
    let export = c.export(&poll).await;
    drop(c);

    let reopened = PollService::open(config).map_err(|e| e.to_string())?;
    ensure(reopened.snapshot() == before, || "snapshot differs after replay".into())?;
    ensure(reopened.export(&poll).ok().as_deref() == Some(export.as_str()), || "export differs after replay".into())?;
    let next = reopened.next_question(&sid, Some(&token)).map_err(|e| e.to_string())?;
    ensure(matches!(next, NextQuestion::Active { .. }), || "half-finished session is not active".into())?;
    let events: u64 = before.polls.iter().map(|p| p.last_seq).sum();
    Ok(format!("{} polls, {events} events replayed identically", before.polls.len()))
}

/// Responses collected through the service analyze exactly like the same
/// cohort run through the library.
pub async fn export_parity() -> Outcome {
    let seed = 77;
    let c = Client::in_memory();
    let poll = c.create_poll(json!({"kind": "single_peaked", "alertness": false, "seed": seed})).await;
    let plan = BatteryConfig {
        alertness: false,
        ..BatteryConfig::default_for(BatteryKind::SinglePeaked)
    };
    let agents: Vec<AgentSpec> = sample_ideals(12, 4, true)
        .into_iter()
        .enumerate()
        .map(|(i, ideal)| {
            let model = if i % 2 == 0 { UtilityModel::L1 } else { UtilityModel::Leontief };
            AgentSpec::new(ideal, model).with_noise(0.2)
        })
        .collect();
    for a in &agents {
        let mut rng = rng_from_seed(answer_seed(seed, a.participant_id()));
        let state = c.run_agent(&poll, a, &mut rng).await;
        ensure(state == "completed", || format!("{} ended {state}", a.participant_id()))?;
    }
    let (header, records) = read_ndjson(c.export(&poll).await.as_bytes()).map_err(|e| e.to_string())?;
    let options = AnalysisOptions::default();
    let via_service = analyze_all(&records, header.as_ref(), &options).map_err(|e| e.to_string())?;

    let direct = run_cohort(&agents, &plan, seed);
    ensure(direct.failures.is_empty(), || format!("{:?}", direct.failures))?;
    ensure(direct.records.len() == records.len(), || {
        format!("{} direct records, {} exported", direct.records.len(), records.len())
    })?;
    let direct = analyze_all(&direct.records, None, &options).map_err(|e| e.to_string())?;
    let mut bytes = 0;
    for format in [ReportFormat::Markdown, ReportFormat::Csv] {
        let (a, b) = (render_report(&via_service, format), render_report(&direct, format));
        ensure(a == b, || format!("{format:?} reports differ:\n{a}\n---\n{b}"))?;
        bytes += a.len();
    }
    Ok(format!("{} answers, {bytes} report bytes identical", records.len()))
}

/// Every scenario, in order.
pub async fn run() -> Outcome {
    let parts = [biennial_session().await?, alertness_block().await?, replay().await?, export_parity().await?];
    Ok(parts.join("; "))
}
