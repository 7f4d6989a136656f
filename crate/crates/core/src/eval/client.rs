//! Chat-completions client for judge calls: bearer auth from the
//! environment, bounded exponential backoff on transient failures, no
//! retries on authentication errors, and a capped-concurrency batch runner.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde_json::json;

use super::EvalError;

#[derive(Debug, Clone)]
pub struct EndpointConfig {
    /// Full URL of the chat-completions endpoint.
    pub url: String,
    pub model: String,
    pub temperature: f64,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
    /// Retries after the first attempt, for transient failures only.
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub timeout_secs: u64,
    /// Concurrent in-flight requests in [`run_judge_batch`].
    pub max_in_flight: usize,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            url: String::new(),
            model: "gpt-4.1-mini".into(),
            temperature: 0.0,
            api_key_env: "JUDGE_API_KEY".into(),
            max_retries: 3,
            initial_backoff_ms: 500,
            timeout_secs: 30,
            max_in_flight: 4,
        }
    }
}

/// Sends one prompt and returns the assistant message text.
///
/// Transport failures and 408/429/5xx responses are retried with doubling
/// backoff up to `max_retries`; 401/403 fail immediately; other statuses
/// fail with a body excerpt.
pub fn call_judge(config: &EndpointConfig, prompt: &str) -> Result<String, EvalError> {
    let key = std::env::var(&config.api_key_env)
        .map_err(|_| EvalError::MissingCredentials(config.api_key_env.clone()))?;
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(config.timeout_secs))
        .build()
        .map_err(|e| EvalError::Transport(e.to_string()))?;
    let body = json!({
        "model": config.model,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": config.temperature,
    });

    let mut backoff = Duration::from_millis(config.initial_backoff_ms);
    let mut attempt = 0u32;
    loop {
        let outcome = client
            .post(&config.url)
            .bearer_auth(&key)
            .json(&body)
            .send();
        let retryable = match outcome {
            Ok(response) => {
                let status = response.status();
                if status.is_success() {
                    let value: serde_json::Value = response
                        .json()
                        .map_err(|e| EvalError::MalformedResponse(e.to_string()))?;
                    return value["choices"][0]["message"]["content"]
                        .as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| {
                            EvalError::MalformedResponse(
                                "no choices[0].message.content in response".into(),
                            )
                        });
                }
                let code = status.as_u16();
                if code == 401 || code == 403 {
                    return Err(EvalError::Auth { status: code });
                }
                let transient = code == 408 || code == 429 || status.is_server_error();
                if !transient || attempt >= config.max_retries {
                    let excerpt: String =
                        response.text().unwrap_or_default().chars().take(200).collect();
                    return Err(EvalError::Status { status: code, body: excerpt });
                }
                true
            }
            Err(error) => {
                if attempt >= config.max_retries {
                    return Err(EvalError::Transport(error.to_string()));
                }
                true
            }
        };
        if retryable {
            std::thread::sleep(backoff);
            backoff *= 2;
            attempt += 1;
        }
    }
}

/// Sends prompts with at most `max_in_flight` concurrent requests. Results
/// line up with the input order; per-request failures do not abort the rest.
pub fn run_judge_batch(
    config: &EndpointConfig,
    prompts: &[String],
) -> Vec<Result<String, EvalError>> {
    if prompts.is_empty() {
        return Vec::new();
    }
    let workers = config.max_in_flight.max(1).min(prompts.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<String, EvalError>>>> =
        Mutex::new((0..prompts.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= prompts.len() {
                    break;
                }
                let outcome = call_judge(config, &prompts[index]);
                results.lock().expect("no panics hold this lock")[index] = Some(outcome);
            });
        }
    });

    results
        .into_inner()
        .expect("all workers joined")
        .into_iter()
        .map(|slot| slot.expect("every index visited"))
        .collect()
}
