//! End-to-end client behavior against a local stub endpoint: request shape,
//! retry policy, auth failures, and ordered parallel batches.

mod common;

use std::time::Duration;

use amrsplit::{build, complete, complete_batch, parse, LlmConfig, LlmError, PromptInputs, Strategy};
use common::{Mode, StubServer};

fn config_for(server: &StubServer) -> LlmConfig {
    LlmConfig {
        endpoint: server.endpoint(),
        model: "stub-model".to_owned(),
        api_key_env: "AMRSPLIT_TEST_UNSET_KEY".to_owned(),
        timeout_secs: 10,
        max_parallel: 1,
        temperature: 0.0,
    }
}

fn vanilla_payload(sentence: &str) -> amrsplit::PromptPayload {
    build(Strategy::Vanilla, sentence, &PromptInputs::default()).unwrap()
}

#[test]
fn echo_round_trip_returns_last_message_content() {
    let server = StubServer::start(Mode::Echo);
    let config = config_for(&server);
    let completion = complete(&config, &vanilla_payload("The cat sat on the mat.")).unwrap();
    assert!(completion.starts_with("ECHO: "));
    assert!(completion.contains("The cat sat on the mat."));
    assert_eq!(server.hits(), 1);
}

#[test]
fn request_carries_model_messages_and_temperature() {
    let server = StubServer::start(Mode::Echo);
    let mut config = config_for(&server);
    config.temperature = 0.25;
    complete(&config, &vanilla_payload("Hello.")).unwrap();

    let requests = server.requests();
    assert_eq!(requests.len(), 1);
    assert_eq!(requests[0].path, "/v1/chat/completions");
    let body: serde_json::Value = serde_json::from_str(&requests[0].body).unwrap();
    assert_eq!(body["model"], "stub-model");
    assert_eq!(body["temperature"], 0.25);
    let messages = body["messages"].as_array().unwrap();
    assert_eq!(messages[0]["role"], "system");
    assert_eq!(messages[1]["role"], "user");
}

#[test]
fn amrcoc_request_ends_with_assistant_prefix() {
    let server = StubServer::start(Mode::Echo);
    let graph = parse("(c / chase-01 :ARG0 (d / dog) :ARG1 (c2 / cat))").unwrap();
    let inputs = PromptInputs { graph: Some(&graph), ..PromptInputs::default() };
    let payload = build(Strategy::AmrCoc, "The dog chased the cat.", &inputs).unwrap();
    complete(&config_for(&server), &payload).unwrap();

    let body: serde_json::Value = serde_json::from_str(&server.requests()[0].body).unwrap();
    let messages = body["messages"].as_array().unwrap();
    let last = messages.last().unwrap();
    assert_eq!(last["role"], "assistant");
    assert_eq!(last["content"], "# Steps");
}

#[test]
fn api_key_header_sent_only_when_env_var_set() {
    let server = StubServer::start(Mode::Echo);
    let mut config = config_for(&server);
    config.api_key_env = "AMRSPLIT_TEST_KEY_PRESENT".to_owned();
    std::env::set_var("AMRSPLIT_TEST_KEY_PRESENT", "sk-test-123");
    complete(&config, &vanilla_payload("Hi.")).unwrap();
    let with_key = server.requests();
    assert_eq!(with_key[0].authorization.as_deref(), Some("Bearer sk-test-123"));

    let server2 = StubServer::start(Mode::Echo);
    let config2 = config_for(&server2); // names an unset variable
    complete(&config2, &vanilla_payload("Hi.")).unwrap();
    assert_eq!(server2.requests()[0].authorization, None);
}

#[test]
fn rate_limit_retried_until_success() {
    let server = StubServer::start(Mode::RateLimitTwiceThenEcho);
    let completion = complete(&config_for(&server), &vanilla_payload("Retry me.")).unwrap();
    assert!(completion.contains("Retry me."));
    assert_eq!(server.hits(), 3, "two 429s plus the successful attempt");
}

#[test]
fn server_errors_stop_after_three_attempts() {
    let server = StubServer::start(Mode::AlwaysServerError);
    let err = complete(&config_for(&server), &vanilla_payload("Doomed.")).unwrap_err();
    match err {
        LlmError::Http { status, attempts, .. } => {
            assert_eq!(status, 500);
            assert_eq!(attempts, 3);
        }
        other => panic!("unexpected error {other}"),
    }
    assert_eq!(server.hits(), 3);
}

#[test]
fn auth_rejection_fails_immediately_and_names_the_env_var() {
    let server = StubServer::start(Mode::AuthReject);
    let err = complete(&config_for(&server), &vanilla_payload("Who am I?")).unwrap_err();
    match err {
        LlmError::Auth { status, env } => {
            assert_eq!(status, 401);
            assert_eq!(env, "AMRSPLIT_TEST_UNSET_KEY");
        }
        other => panic!("unexpected error {other}"),
    }
    assert_eq!(server.hits(), 1, "auth failures are not retried");
}

#[test]
fn batch_results_follow_input_order() {
    let server = StubServer::start(Mode::EchoSlow(Duration::from_millis(20)));
    let mut config = config_for(&server);
    config.max_parallel = 4;
    let payloads: Vec<_> =
        (0..12).map(|i| vanilla_payload(&format!("Sentence number {i}."))).collect();
    let results = complete_batch(&config, &payloads).unwrap();
    assert_eq!(results.len(), 12);
    for (i, result) in results.iter().enumerate() {
        let text = result.as_ref().unwrap();
        assert!(text.contains(&format!("Sentence number {i}.")), "slot {i} got {text}");
    }
    assert_eq!(server.hits(), 12);
}

#[test]
fn parallelism_is_bounded_and_actually_parallel() {
    let server = StubServer::start(Mode::EchoSlow(Duration::from_millis(60)));
    let mut config = config_for(&server);
    config.max_parallel = 6;
    let payloads: Vec<_> = (0..6).map(|i| vanilla_payload(&format!("P{i}"))).collect();
    complete_batch(&config, &payloads).unwrap();
    let max = server.max_inflight();
    assert!(max >= 2, "expected overlapping requests, saw max in-flight {max}");
    assert!(max <= 6, "parallelism exceeded the configured bound: {max}");

    let server_serial = StubServer::start(Mode::EchoSlow(Duration::from_millis(10)));
    let mut serial = config_for(&server_serial);
    serial.max_parallel = 1;
    let payloads: Vec<_> = (0..4).map(|i| vanilla_payload(&format!("S{i}"))).collect();
    complete_batch(&serial, &payloads).unwrap();
    assert_eq!(server_serial.max_inflight(), 1, "serial mode must never overlap requests");
}

#[test]
fn malformed_response_body_is_reported() {
    // a server that returns 200 with a non-JSON body
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        use std::io::{Read, Write};
        if let Ok((mut stream, _)) = listener.accept() {
            let mut buffer = [0u8; 4096];
            let _ = stream.read(&mut buffer);
            let body = "this is not json";
            let response = format!(
                "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    let config = LlmConfig {
        endpoint: format!("http://{addr}/v1"),
        ..config_for(&StubServer::start(Mode::Echo))
    };
    let err = complete(&config, &vanilla_payload("x")).unwrap_err();
    assert!(matches!(err, LlmError::MalformedResponse(_)), "got {err}");
}
