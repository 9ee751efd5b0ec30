//! Scripted HTTP client driving the router in-process. Shared by the service
//! integration tests and the acceptance harness.
#![allow(dead_code)]

pub mod e2e;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request};
use axum::Router;
use budgetpoll_core::agents::{answer, AgentSpec};
use budgetpoll_core::question::{Generator, Provenance, QuestionKind, QuestionOptions};
use budgetpoll_core::{BatteryKind, Question};
use budgetpoll_service::{router, PollService, ServiceConfig};
use http_body_util::BodyExt;
use rand::Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

pub const ADMIN: &str = "admin-secret";

pub struct Client {
    pub app: Router,
    pub service: Arc<PollService>,
}

#[derive(Debug)]
pub struct Reply {
    pub status: u16,
    pub json: Value,
    pub text: String,
}

impl Client {
    pub fn in_memory() -> Self {
        Self::with_config(ServiceConfig::in_memory(ADMIN))
    }

    pub fn with_config(config: ServiceConfig) -> Self {
        let service = Arc::new(PollService::open(config).expect("service opens"));
        Client {
            app: router(service.clone()),
            service,
        }
    }

    pub async fn call(&self, method: Method, uri: &str, token: Option<&str>, body: Option<Value>) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let req = match body {
            Some(b) => req
                .header("content-type", "application/json")
                .body(Body::from(b.to_string())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status().as_u16();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let text = String::from_utf8(bytes.to_vec()).unwrap();
        let json = serde_json::from_str(&text).unwrap_or(Value::Null);
        Reply { status, json, text }
    }

    pub async fn get(&self, uri: &str, token: Option<&str>) -> Reply {
        self.call(Method::GET, uri, token, None).await
    }

    pub async fn post(&self, uri: &str, token: Option<&str>, body: Value) -> Reply {
        self.call(Method::POST, uri, token, Some(body)).await
    }

    pub async fn create_poll(&self, config: Value) -> String {
        let r = self.post("/polls", Some(ADMIN), config).await;
        assert_eq!(r.status, 201, "{}", r.text);
        r.json["poll_id"].as_str().unwrap().to_string()
    }

    /// Starts a session and returns `(session_id, token)`.
    pub async fn start(&self, poll_id: &str, participant_id: &str) -> Result<(String, String), Reply> {
        let r = self
            .post(&format!("/polls/{poll_id}/sessions"), None, json!({"participant_id": participant_id}))
            .await;
        if r.status != 201 {
            return Err(r);
        }
        Ok((
            r.json["session_id"].as_str().unwrap().to_string(),
            r.json["token"].as_str().unwrap().to_string(),
        ))
    }

    pub async fn export(&self, poll_id: &str) -> String {
        let r = self.get(&format!("/polls/{poll_id}/export"), Some(ADMIN)).await;
        assert_eq!(r.status, 200, "{}", r.text);
        r.text
    }

    /// Runs one synthetic agent through a whole session and returns the final
    /// session state.
    pub async fn run_agent<R: Rng>(&self, poll_id: &str, agent: &AgentSpec, rng: &mut R) -> String {
        let (sid, token) = self.start(poll_id, agent.participant_id()).await.expect("session starts");
        let r = self
            .post(
                &format!("/sessions/{sid}/ideal"),
                Some(&token),
                json!({"ideal": agent.ideal.peak().entries()}),
            )
            .await;
        if r.status != 200 {
            return r.json["error"].as_str().unwrap_or("error").to_string();
        }
        loop {
            let next = self.get(&format!("/sessions/{sid}/next"), Some(&token)).await;
            assert_eq!(next.status, 200, "{}", next.text);
            if next.json["state"] == "completed" {
                return "completed".into();
            }
            let q = question_from_view(&next.json["question"]);
            let rec = answer(agent, BatteryKind::PeakLinear, &q, rng).expect("agent answers");
            let ack = self
                .post(
                    &format!("/sessions/{sid}/answers"),
                    Some(&token),
                    json!({"question_id": q.id, "answer": rec.answer}),
                )
                .await;
            assert_eq!(ack.status, 200, "{}", ack.text);
            let state = ack.json["state"].as_str().unwrap();
            if state != "active" {
                return state.to_string();
            }
        }
    }
}

/// Rebuilds a question from its participant view; provenance is not shown
/// to participants, so a placeholder is used.
pub fn question_from_view(view: &Value) -> Question {
    let kind: QuestionKind = serde_json::from_value(view["kind"].clone()).unwrap();
    let options: QuestionOptions = serde_json::from_value(view["options"].clone()).unwrap();
    Question {
        id: view["id"].as_str().unwrap().to_string(),
        kind,
        options,
        provenance: Provenance::new(Generator::Alertness),
        is_alertness: false,
    }
}
