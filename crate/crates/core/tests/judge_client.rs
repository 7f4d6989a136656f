//! Judge client behavior against a local stub endpoint: success, bounded
//! retry on transient failures, and no retry on authentication errors.

mod support;

use dcqg_core::eval::{
    call_judge, parse_judge_verdict, run_judge_batch, EndpointConfig, EvalError, JudgeCriterion,
    VerdictScore,
};
use support::{StubResponse, StubServer};

fn config_for(server: &StubServer, key_env: &str) -> EndpointConfig {
    std::env::set_var(key_env, "stub-key");
    EndpointConfig {
        url: server.url(),
        api_key_env: key_env.to_owned(),
        max_retries: 3,
        initial_backoff_ms: 1,
        timeout_secs: 5,
        max_in_flight: 3,
        ..EndpointConfig::default()
    }
}

#[test]
fn success_path_parses_to_verdict() {
    let server = StubServer::start(vec![StubResponse::chat("1")]);
    let config = config_for(&server, "JUDGE_KEY_SUCCESS");
    let raw = call_judge(&config, "judge this").unwrap();
    assert_eq!(raw, "1");
    let verdict = parse_judge_verdict(JudgeCriterion::Answerability, &raw);
    assert_eq!(verdict.score, VerdictScore::Score(1));
    assert_eq!(server.request_count(), 1);
}

#[test]
fn retries_once_after_429() {
    let server = StubServer::start(vec![
        StubResponse::status(429, "slow down"),
        StubResponse::chat("2"),
    ]);
    let config = config_for(&server, "JUDGE_KEY_RETRY");
    let raw = call_judge(&config, "judge this").unwrap();
    assert_eq!(raw, "2");
    assert_eq!(server.request_count(), 2);
}

#[test]
fn server_errors_retry_until_exhausted() {
    let server = StubServer::start(vec![StubResponse::status(500, "boom")]);
    let mut config = config_for(&server, "JUDGE_KEY_5XX");
    config.max_retries = 2;
    let err = call_judge(&config, "judge this").unwrap_err();
    assert!(matches!(err, EvalError::Status { status: 500, .. }));
    assert_eq!(server.request_count(), 3); // initial try + 2 retries
}

#[test]
fn auth_failure_never_retries() {
    let server = StubServer::start(vec![StubResponse::status(401, "bad key")]);
    let config = config_for(&server, "JUDGE_KEY_AUTH");
    let err = call_judge(&config, "judge this").unwrap_err();
    assert!(matches!(err, EvalError::Auth { status: 401 }));
    assert_eq!(server.request_count(), 1);
}

#[test]
fn missing_credentials_fail_before_any_request() {
    let server = StubServer::start(vec![StubResponse::chat("1")]);
    let config = EndpointConfig {
        url: server.url(),
        api_key_env: "JUDGE_KEY_DEFINITELY_UNSET".into(),
        ..EndpointConfig::default()
    };
    let err = call_judge(&config, "judge this").unwrap_err();
    assert!(matches!(err, EvalError::MissingCredentials(_)));
    assert_eq!(server.request_count(), 0);
}

#[test]
fn batch_preserves_order_under_concurrency() {
    let server = StubServer::start(vec![StubResponse::chat("0")]);
    let config = config_for(&server, "JUDGE_KEY_BATCH");
    let prompts: Vec<String> = (0..10).map(|k| format!("prompt {k}")).collect();
    let results = run_judge_batch(&config, &prompts);
    assert_eq!(results.len(), 10);
    for result in results {
        assert_eq!(result.unwrap(), "0");
    }
    assert_eq!(server.request_count(), 10);
}
